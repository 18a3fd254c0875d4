"""Interactive synthesis of functional reactive and list programs from traces."""

__version__ = "0.1.0"
