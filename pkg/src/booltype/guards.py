"""Hard limits on exponential enumerations.

Each guard has a default; ``BOOLTYPE_GUARD`` (or the CLI ``--guard`` flag)
overrides them with a comma separated list of ``name=value`` entries.  A
bare integer sets the ``search`` guard.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

from .errors import GuardExceeded

DEFAULTS = {
    # |S| for sign-pattern enumeration in the Sikorski criterion
    "sikorski": 20,
    # number of blocks when searching atom bijections
    "isomorphism": 10,
    # universe size for full automorphism enumeration
    "automorphism": 9,
    # number of tuples m**k in a formula algebra
    "tuples": 100_000,
    # cells of an evaluation tensor m**(free + bound variables)
    "tensor": 10_000_000,
    # number of parameter supersets scanned by smoothness checks
    "supersets": 1024,
    # ladder length / approximation size / misc. search caps
    "search": 64,
}

_overrides: dict[str, int] = {}


def parse_overrides(text: str) -> dict[str, int]:
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" in part:
            key, value = part.split("=", 1)
            key = key.strip()
            if key not in DEFAULTS:
                raise ValueError(f"unknown guard {key!r}")
            out[key] = int(value)
        else:
            out["search"] = int(part)
    return out


def limit(name: str) -> int:
    if name in _overrides:
        return _overrides[name]
    env = os.environ.get("BOOLTYPE_GUARD")
    if env:
        parsed = parse_overrides(env)
        if name in parsed:
            return parsed[name]
    return DEFAULTS[name]


def check(name: str, value: int, what: str) -> None:
    cap = limit(name)
    if value > cap:
        raise GuardExceeded(f"{what}: {value} exceeds guard {name}={cap}")


@contextmanager
def overridden(**values: int):
    """Temporarily override guards (used by the CLI and tests)."""
    saved = dict(_overrides)
    _overrides.update(values)
    try:
        yield
    finally:
        _overrides.clear()
        _overrides.update(saved)
