"""Backend selection for the complexity kernels.

The compiled extension ``_kernels`` is used when it was built; otherwise the
numpy implementation in ``_kernels_py`` is loaded.  Setting the environment
variable ``QCOMPLEXITY_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("QCOMPLEXITY_PURE_PYTHON"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

state_blocks = _impl.state_blocks
state_nu = _impl.state_nu
batch_state_nu = _impl.batch_state_nu
ham_nu = _impl.ham_nu
batch_ham_nu = _impl.batch_ham_nu
ham_blocks = _kernels_py.ham_blocks

__all__ = [
    "BACKEND",
    "state_blocks",
    "state_nu",
    "batch_state_nu",
    "ham_nu",
    "batch_ham_nu",
    "ham_blocks",
]
