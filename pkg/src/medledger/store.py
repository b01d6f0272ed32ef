"""Content-addressed blob store for prescriptions and bills.

The chain only ever carries digests; the documents themselves live here,
one file per digest under a two-character fanout directory:

    <root>/<hh>/<64-hex-digest>

Hashes render as ``sha256:`` plus 64 lowercase hex characters. Blobs are
immutable and deduplicated by construction; there is no garbage
collection because committed chains reference digests forever.
"""

from __future__ import annotations

import hashlib
import os
import re
import tempfile
from pathlib import Path

from .errors import BlobTooLarge, IntegrityError, NotFound

HASH_PREFIX = "sha256:"
CONTENT_HASH_RE = re.compile(r"^sha256:[0-9a-f]{64}$")
DEFAULT_MAX_BLOB_BYTES = 16 * 1024 * 1024


def content_hash(blob: bytes) -> str:
    return HASH_PREFIX + hashlib.sha256(blob).hexdigest()


def is_content_hash(value) -> bool:
    return isinstance(value, str) and bool(CONTENT_HASH_RE.match(value))


class BlobStore:
    def __init__(self, root: str | Path, max_blob_bytes: int = DEFAULT_MAX_BLOB_BYTES):
        self.root = Path(root)
        self.max_blob_bytes = max_blob_bytes
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, hash_str: str) -> Path:
        digest = hash_str[len(HASH_PREFIX):]
        return self.root / digest[:2] / digest

    def put(self, blob: bytes) -> str:
        """Store a blob and return its hash; identical bytes store once."""
        if len(blob) > self.max_blob_bytes:
            raise BlobTooLarge(f"{len(blob)} > {self.max_blob_bytes}")
        hash_str = content_hash(blob)
        path = self._path(hash_str)
        if path.exists():
            return hash_str
        path.parent.mkdir(parents=True, exist_ok=True)
        # Write-to-temp then atomic rename: concurrent duplicate puts converge
        # on one stored copy and readers never observe a partial file.
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".put-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(blob)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return hash_str

    def get(self, hash_str: str) -> bytes:
        """Return the exact original bytes for a previously stored hash."""
        if not is_content_hash(hash_str):
            raise NotFound(hash_str)
        path = self._path(hash_str)
        if not path.is_file():
            raise NotFound(hash_str)
        blob = path.read_bytes()
        if content_hash(blob) != hash_str:
            raise IntegrityError(f"stored bytes do not match {hash_str}")
        return blob

    def contains(self, hash_str: str) -> bool:
        return is_content_hash(hash_str) and self._path(hash_str).is_file()

    def __len__(self) -> int:
        return sum(1 for _ in self.root.glob("??/*"))
