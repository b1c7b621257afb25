"""Backend selection for the hot misreport-evaluation kernel.

Prefers the compiled extension (`incratio._core`, built from Cython) and
falls back to the vectorized numpy implementation when the extension is
missing or when the environment variable INCRATIO_PURE_PYTHON is set to a
nonempty value. `BACKEND` reports which one is active;
`benchmarks/bench_backends.py` compares the two.
"""
from __future__ import annotations

import os

from . import _core_py

if os.environ.get("INCRATIO_PURE_PYTHON"):
    _impl = _core_py
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _core_py

BACKEND: str = _impl.BACKEND
cd_batch_eval = _impl.cd_batch_eval

# The compiled kernel keeps its minor buffers on the stack and is capped
# at this many commodities; larger problems use the numpy fallback.
_COMPILED_MAX_M = 16


def batch_eval(endow, alphas, agent, cands, alpha_true):
    """Dispatch to the active backend, falling back for very wide markets."""
    if BACKEND == "compiled" and endow.shape[1] > _COMPILED_MAX_M:
        return _core_py.cd_batch_eval(endow, alphas, agent, cands, alpha_true)
    return cd_batch_eval(endow, alphas, agent, cands, alpha_true)
