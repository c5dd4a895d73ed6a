from .base import FileSystem, FSConfig
from .local import LocalFileSystem

__all__ = ["FileSystem", "FSConfig", "LocalFileSystem"]
