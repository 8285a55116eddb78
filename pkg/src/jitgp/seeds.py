"""Master-seed fan-out.

Every randomized component derives its own seed from the master seed and a
fixed label, so any stage can be reproduced in isolation. The derivation is
sha256-based and therefore stable across platforms and library versions.
"""

import hashlib

COMPONENTS = (
    "split",
    "smote.final",
    "grid",
    "model.logreg",
    "model.rf",
    "model.gbdt",
    "louvain",
    "node2vec",
)


def derive_seed(master: int, label: str) -> int:
    digest = hashlib.sha256(f"{master}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def seed_derivation(master: int) -> dict:
    """Full component->seed map, recorded in run manifests."""
    return {label: derive_seed(master, label) for label in COMPONENTS}
