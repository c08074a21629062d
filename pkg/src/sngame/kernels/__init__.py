"""Hot loops over the joint-strategy space.

Two interchangeable backends share one contract: ``numba`` (compiled
loops) and ``numpy`` (vectorised blocks). ``SNGAME_KERNEL=numpy`` forces
the fallback; without numba installed it is the only choice.
"""
from __future__ import annotations

import contextlib
import os
import warnings

import numpy as np

from . import _numpy

__all__ = [
    "BACKENDS",
    "IMPROVE",
    "BEST",
    "attractor",
    "edges",
    "get_backend",
    "longest",
    "payoffs",
    "peel",
    "reach",
    "scan",
    "set_backend",
    "use_backend",
]

IMPROVE = 0
BEST = 1


def _load_numba():
    try:
        from . import _numba
    except ImportError:
        return None
    return _numba


_nb = _load_numba()
HAVE_NUMBA = _nb is not None
BACKENDS = {"numpy": _numpy}
if HAVE_NUMBA:
    BACKENDS["numba"] = _nb


def _initial_backend() -> str:
    wanted = os.environ.get("SNGAME_KERNEL", "numba" if HAVE_NUMBA else "numpy").strip().lower()
    if wanted not in ("numba", "numpy"):
        raise ValueError(f"SNGAME_KERNEL must be 'numba' or 'numpy', got {wanted!r}")
    if wanted == "numba" and not HAVE_NUMBA:
        warnings.warn("numba is not installed; using the numpy kernels", RuntimeWarning)
        return "numpy"
    return wanted


_active = _initial_backend()


def get_backend() -> str:
    return _active


def set_backend(name: str) -> None:
    global _active
    if name not in BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(BACKENDS)}")
    _active = name


@contextlib.contextmanager
def use_backend(name: str):
    prev = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def _impl():
    return BACKENDS[_active]


def _net_args(space):
    return (space.opt_prod, space.opt_theta, space.in_ptr, space.in_src, space.in_w,
            space.is_source, np.int64(space.c0))


def payoffs(space, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Scaled payoff matrix (states x nodes) for states ``start:stop``."""
    stop = space.size if stop is None else stop
    return _impl().payoffs(start, stop, space.radix, *_net_args(space))


def scan(space) -> tuple[np.ndarray, np.ndarray]:
    """(is_nash, scaled welfare) for every state."""
    return _impl().scan(space.size, space.radix, *_net_args(space))


def edges(space, mode: int = IMPROVE):
    """CSR improvement graph: (indptr, successor, deviating player).

    Edges of a state are ordered by player, then by the target option.
    """
    return _impl().edges(space.size, mode, space.radix, space.stride, *_net_args(space))


def peel(indptr, succ) -> np.ndarray:
    return _impl().peel(indptr, succ)


def reach(indptr, succ, target) -> np.ndarray:
    return _impl().reach(indptr, succ, np.asarray(target, dtype=np.bool_))


def attractor(indptr, succ, player, terminal):
    return _impl().attractor(indptr, succ, player, np.asarray(terminal, dtype=np.bool_))


def longest(indptr, succ) -> np.ndarray:
    return _impl().longest(indptr, succ)
