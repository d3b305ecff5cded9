"""Enumeration caps guarding the exponential code paths.

Defaults cover desk-scale inputs; the NETCAP_CAPS environment variable
raises them, e.g. NETCAP_CAPS="steiner_edges=28,dp_states=4000000".
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


class CapExceededError(RuntimeError):
    """An enumeration would exceed its configured cap."""


@dataclass(frozen=True)
class Caps:
    matroid_ground: int = 20        # subset enumeration of bases/circuits
    steiner_edges: int = 24         # Steiner tree enumeration / brute-force oracle
    parent_vars: int = 12           # basic-solution enumeration of parent polytopes
    messages: int = 16              # 2**|messages| weight-vector sweep
    active_set_edges: int = 12      # minimal-active-set enumeration per weight vector
    dp_states: int = 2_000_000      # live states kept by the min-cost code search


def load_caps() -> Caps:
    caps = Caps()
    raw = os.environ.get("NETCAP_CAPS", "").strip()
    if not raw:
        return caps
    known = {f.name for f in fields(Caps)}
    overrides = {}
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, value = item.partition("=")
        name = name.strip()
        if name not in known:
            raise ValueError(f"unknown cap {name!r} in NETCAP_CAPS")
        overrides[name] = int(value)
    return replace(caps, **overrides)
