from __future__ import annotations

import hashlib


def derive_seed(seed: int, *tags: int | str) -> int:
    """Stable 63-bit child seed; independent of PYTHONHASHSEED."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed)).encode())
    for t in tags:
        h.update(b"/" + str(t).encode())
    return int.from_bytes(h.digest(), "big") >> 1
