"""
Adaptive quadrature on [0,1] sub-intervals.

Thin wrapper over scipy.integrate.quad that knows about integrand
breakpoints (step type models) and turns non-convergence into QuadratureError.
"""

from typing import Callable, Iterable, Optional

from scipy import integrate

from .errors import QuadratureError

ABS_TOL = 1e-11
REL_TOL = 1e-12
DEFAULT_LIMIT = 200
# Reported error estimates above this are treated as a failed integral.
ACCEPT_ERROR = 1e-8


def integrate_interval(
    func: Callable[[float], float],
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
    limit: Optional[int] = None,
) -> float:
    """Integrate func over [a, b] to ABS_TOL, splitting at breakpoints inside (a, b)."""
    if b <= a:
        return 0.0
    points = sorted({float(p) for p in breakpoints if a < p < b})
    # full_output=1: failures come back in result[3], never as warnings.
    result = integrate.quad(
        func,
        a,
        b,
        epsabs=ABS_TOL,
        epsrel=REL_TOL,
        limit=limit or DEFAULT_LIMIT,
        points=points or None,
        full_output=1,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > ACCEPT_ERROR:
        raise QuadratureError(
            f"Integral over [{a:.6g}, {b:.6g}] did not converge "
            f"(error estimate {abserr:.3g}): {result[3]}"
        )
    return float(value)
