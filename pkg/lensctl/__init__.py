__all__ = ["main"]
__version__ = "0.1.0"
