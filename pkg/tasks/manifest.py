import enum
import json
import logging
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, Optional, Tuple

from .interfaces import StorageInterface
from .utils import get_checksum

TOOL_NAME = "betta-richness"
TOOL_VERSION = "1.0.0"
MANIFEST_FILE = "manifest.json"


class Command(str, enum.Enum):
    # fit writes the test, BLUP and diagnostic outputs as well
    ESTIMATE = "estimate"
    FIT = "fit"
    SIMULATE = "simulate"


@dataclass(frozen=True)
class RunManifest:
    command: Command
    inputs: Tuple[Dict[str, str], ...]
    output_dir: str
    seed: Optional[int]
    tool_version: str
    timestamp: str
    arguments: Dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, Any]:
        content = asdict(self)
        content["command"] = self.command.value
        content["inputs"] = [dict(item) for item in self.inputs]
        return content


def get_source_date_epoch() -> Optional[str]:
    return os.environ.get("SOURCE_DATE_EPOCH")


def get_run_timestamp() -> str:
    """
    UTC time of the run, fixed by SOURCE_DATE_EPOCH when it is set
    """
    epoch = get_source_date_epoch()
    if epoch:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(tz=timezone.utc).replace(microsecond=0)
    return moment.isoformat()


def create_run_manifest(
    command: Command,
    inputs: Iterable[Tuple[str, str]],
    output_dir: str,
    seed: Optional[int] = None,
    arguments: Optional[Dict[str, Any]] = None,
) -> RunManifest:
    """
    Describe a run from its command, the ``(path, content)`` pairs it read
    and the arguments it was given
    """
    return RunManifest(
        command=Command(command),
        inputs=tuple({"path": path, "md5": get_checksum(content)} for path, content in inputs),
        output_dir=str(output_dir),
        seed=seed,
        tool_version=f"{TOOL_NAME} {TOOL_VERSION}",
        timestamp=get_run_timestamp(),
        arguments=dict(arguments or {}),
    )


def write_run_manifest(manifest: RunManifest, storage: StorageInterface) -> None:
    storage.upload_content(MANIFEST_FILE, json.dumps(manifest.as_dict(), indent=2) + "\n")
    logging.debug(f"Manifest written for {manifest.command.value}")
