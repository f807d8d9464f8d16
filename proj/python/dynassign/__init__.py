"""Incremental weight assignment on dynamic complete bipartite graphs.

Thin re-export of the compiled module. Installed wheels place ``_core``
inside this package; in a plain CMake build tree the extension sits on
``PYTHONPATH`` as a top-level module instead.
"""

try:
    from dynassign._core import *  # noqa: F401,F403
    from dynassign._core import __version__  # noqa: F401
except ImportError:  # build-tree layout
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
