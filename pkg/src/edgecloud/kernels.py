"""Backend selection for the hot grid kernels.

The compiled extension is used when it was built; otherwise the NumPy
implementation is used.  ``BACKEND`` says which one was picked.
"""

from . import _grid_py

try:
    from . import _grid_core as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"
enumerate_grid = (_compiled or _grid_py).enumerate_grid
enumerate_grid_py = _grid_py.enumerate_grid
enumerate_grid_compiled = _compiled.enumerate_grid if _compiled is not None else None
