import logging
import os
from pathlib import Path
from typing import Optional

from tasks import StorageInterface


def get_output_dir() -> str:
    return os.environ.get("OUTPUT_DIR", "output")


def create_storage_interface(output_dir: Optional[str] = None) -> StorageInterface:
    """
    Build an object to write the run outputs into ``output_dir`` or, when not
    given, into the directory named by the OUTPUT_DIR environment variable
    """
    return LocalDirectory(output_dir or get_output_dir())


class LocalDirectory(StorageInterface):
    """
    Class to store run outputs as files of a local directory
    """

    def __init__(self, root: str):
        self._root = Path(root)

    @property
    def root(self) -> Path:
        return self._root

    def get_content(self, file_key: str) -> str:
        logging.debug(f"Getting {file_key}")
        return (self._root / file_key).read_text(encoding="utf-8")

    def upload_content(self, file_key: str, content_to_be_uploaded: str) -> None:
        path = self._root / file_key
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(content_to_be_uploaded)
        logging.debug(f"Wrote {path}")
