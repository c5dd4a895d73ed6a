from __future__ import annotations

from typing import Protocol, Optional, BinaryIO


class FileSystem(Protocol):
	def open(self, path: str, mode: str = "rb") -> BinaryIO:  # read/write handled by mode
		...

	def exists(self, path: str) -> bool:
		...

	def makedirs(self, path: str, exist_ok: bool = True) -> None:
		...

	def write_atomic(self, path: str, data: bytes) -> str:
		...


class FSConfig:
	"""Output directory configuration carrier."""

	def __init__(self, root: Optional[str] = None):
		self.root = root
