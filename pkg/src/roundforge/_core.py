"""Kernel selection: compiled extension when available, numpy fallback otherwise.

Set ROUNDFORGE_NO_EXT=1 to force the fallback (the benchmark uses this to
compare both implementations).
"""

import os

if os.environ.get("ROUNDFORGE_NO_EXT"):
    from roundforge import _kernels_py as kernels

    HAVE_EXT = False
else:
    try:
        from roundforge import _speedups as kernels  # type: ignore[no-redef]

        HAVE_EXT = True
    except ImportError:
        from roundforge import _kernels_py as kernels  # type: ignore[no-redef]

        HAVE_EXT = False

distance_field = kernels.distance_field
polyval2 = kernels.polyval2
directed_hausdorff = kernels.directed_hausdorff
pointset_min_dist = kernels.pointset_min_dist
self_intersects = kernels.self_intersects
