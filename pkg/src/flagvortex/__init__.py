"""Flag-fiber dimensional reduction toolkit.

Exact Bott-Borel-Weil cohomology of homogeneous bundles on G/P, the
reduction data (slopes, vortex parameters, extension dimensions) and a
numerical solver for the resulting twisted coupled vortex equations.
"""

__version__ = "0.1.0"
