import hashlib
import os
import tempfile
from pathlib import Path
from typing import Mapping, Union

PathLike = Union[str, os.PathLike]


def fmt_float(x: float) -> str:
    """Shortest repr that round-trips through ``float()``."""
    return repr(float(x))


def atomic_write(path: PathLike, data: Union[str, bytes]) -> Path:
    path = Path(path)
    payload = data.encode("utf-8") if isinstance(data, str) else data
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def atomic_write_all(files: Mapping[Path, Union[str, bytes]]) -> None:
    """Stage every file to a temp sibling first, then rename them all.

    A failure while staging leaves none of the targets touched.
    """
    staged = []
    try:
        for path, data in files.items():
            path = Path(path)
            payload = data.encode("utf-8") if isinstance(data, str) else data
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            staged.append((tmp, path))
    except BaseException:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


def sha256_of(data: Union[str, bytes]) -> str:
    payload = data.encode("utf-8") if isinstance(data, str) else data
    return hashlib.sha256(payload).hexdigest()
