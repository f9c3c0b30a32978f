"""Deterministic seed derivation for pipeline stages.

All randomness in a run flows from one base seed; per-stage and per-page
seeds are derived by stable hashing so results do not depend on process
hash randomisation or iteration order.
"""

import hashlib


def stable_seed(*parts) -> int:
    """Derive a 63-bit seed from the given parts (ints/strings)."""
    h = hashlib.sha256("\x1f".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "big") >> 1
