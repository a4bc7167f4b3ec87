"""Utility functions to write result files."""

import logging
import os
import pathlib
import tempfile

logger = logging.getLogger(__name__)


def get_next_name(file_path: str) -> str:
    """
    Get next available name for an output file.

    Parameters
    ----------
    file_path: str
        Requested output path.

    Returns
    -------
    str
        ``file_path`` itself when free, else ``<stem>-copy<N><suffixes>``
        with the smallest free ``N``.
    """
    if not os.path.exists(file_path):
        return file_path
    requested = pathlib.Path(file_path)
    suffixes = "".join(requested.suffixes)
    counter = 1
    while True:
        candidate = requested.parent / f"{requested.stem}-copy{counter}{suffixes}"
        if not candidate.exists():
            return str(candidate)
        counter += 1


def write_atomic(file_path: str, text: str) -> str:
    """
    Write ``text`` to ``file_path`` through a temporary sibling file.

    The target only appears once the content is complete; on failure the
    temporary file is removed and nothing is left behind.

    Parameters
    ----------
    file_path: str
        Destination path; parent directories are created.
    text: str
        File content.

    Returns
    -------
    str
        The destination path.
    """
    target = pathlib.Path(file_path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_path, target)
    except BaseException:
        try:
            os.remove(tmp_path)
        except OSError:
            pass
        logger.error("Cannot write %s", file_path)
        raise
    logger.info("Wrote %s", file_path)
    return str(target)
