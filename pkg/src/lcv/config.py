"""Process-wide size caps.

Every operation that enumerates or expands takes an explicit cap argument;
when it is omitted the value here is used.  The command line adjusts these
from its flags.
"""

import os
from contextlib import contextmanager
from dataclasses import dataclass, replace

DEFAULT_MAX_DEGREE = 12
DEFAULT_MAX_MONOMIAL_LEN = 8
DEFAULT_EXPONENT_CAP = 2**16


@dataclass(frozen=True)
class Limits:
    max_degree: int = DEFAULT_MAX_DEGREE
    max_monomial_len: int = DEFAULT_MAX_MONOMIAL_LEN
    exponent_cap: int = DEFAULT_EXPONENT_CAP


def _from_env():
    raw = os.environ.get("LINFTY_MAX_DEGREE")
    if raw is None:
        return Limits()
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"LINFTY_MAX_DEGREE must be an integer, got {raw!r}")
    return Limits(max_degree=value)


_current = _from_env()


def limits():
    return _current


def set_limits(**changes):
    global _current
    _current = replace(_current, **{k: v for k, v in changes.items() if v is not None})
    return _current


@contextmanager
def override(**changes):
    global _current
    saved = _current
    set_limits(**changes)
    try:
        yield _current
    finally:
        _current = saved
