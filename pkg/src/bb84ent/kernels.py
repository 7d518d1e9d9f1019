"""Backend selection for the hot kernels.

The compiled extension ``bb84ent._ckernels`` is preferred. Set the
environment variable ``BB84ENT_PURE=1`` to force the pure-Python fallback.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

if os.environ.get("BB84ENT_PURE", "") not in ("", "0") or _ckernels is None:
    BACKEND = "python"
else:
    BACKEND = "cython"

_impl = BACKENDS[BACKEND]


def get_backend(name=None):
    """Return the kernel module for ``name`` (default: the active backend)."""
    if name is None:
        return _impl
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {sorted(BACKENDS)}")


def jacobi_eigvalsh_batch(mats, tol, max_sweeps):
    return _impl.jacobi_eigvalsh_batch(mats, tol, max_sweeps)


def sample_two_stage(cond, u_branch, u_out, branch_cdf, out_cdf):
    return _impl.sample_two_stage(cond, u_branch, u_out, branch_cdf, out_cdf)


def shuffle_indices(u):
    return _impl.shuffle_indices(u)
