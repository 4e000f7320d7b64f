"""Kernel backend selection: compiled extension if available, numpy fallback.

Set PONDERA_PURE=1 to force the pure-Python path (used by the benchmark and
for debugging).  Both backends expose the same functions; see
pondera._reference for the authoritative signatures.
"""

from __future__ import annotations

import os

from . import _reference

try:
    from . import _core
except ImportError:  # extension not built; numpy fallback is fully equivalent
    _core = None

_FORCE_PURE = os.environ.get("PONDERA_PURE", "") not in ("", "0")

backend = _reference if (_core is None or _FORCE_PURE) else _core


def backend_name() -> str:
    return "pure-python" if backend is _reference else "compiled"


def have_compiled() -> bool:
    return _core is not None


transfer_matrix = backend.transfer_matrix
output_cov = backend.output_cov
logneg = backend.logneg
duan = backend.duan
symplectic_pair = backend.symplectic_pair
genoni_two_mode = backend.genoni_two_mode
kappa_sums = backend.kappa_sums
