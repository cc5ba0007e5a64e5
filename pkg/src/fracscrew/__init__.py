"""Numerics for screw-invariant solutions of the fractional Allen-Cahn equation.

Modules: ``potential`` (double wells), ``specfun`` (Bessel profiles),
``spectral1d`` (spectral fractional Laplacian on an interval), ``strip1d``
(reduced 1D problem), ``helicoid3d`` (cylinder problem, barrier, competitor),
``nmc`` (nonlocal mean curvature and fractional perimeter) and ``cli``.
"""

__version__ = "0.1.0"

from ._accel import HAVE_NUMBA, backend  # noqa: E402,F401
