"""Operation-state duality: gate teleportation, purification, tomography and storage of operations."""

__version__ = "0.1.0"
