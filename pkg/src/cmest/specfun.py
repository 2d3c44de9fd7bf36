"""Self-contained special functions used by the analytic variance formulas.

Only the real-valued pieces actually needed are implemented: the principal
branch of the Lambert W function (solves the Cauchy transmit-phase optimum)
and the confluent hypergeometric function 1F1 (Ricean fading penalty).
"""

import math

from .errors import DomainError, NonConvergenceError

__all__ = ["lambert_w0", "hyp1f1", "ricean_fading_penalty"]

_BRANCH_POINT = -math.exp(-1.0)  # -1/e, left edge of the real domain
_GAMMA_3_2 = math.sqrt(math.pi) / 2.0  # Gamma(3/2), kept as an exact constant


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function, the inverse of w*exp(w).

    Returns w >= -1 with w*exp(w) = x to relative accuracy ~1e-12.
    Halley iterations from a branch-point series (near -1/e) or a
    logarithmic initial guess.

    Raises DomainError for x < -1/e - 1e-14.
    """
    x = float(x)
    if x < _BRANCH_POINT:
        if x < _BRANCH_POINT - 1e-14:
            raise DomainError(f"lambert_w0 requires x >= -1/e, got {x}")
        x = _BRANCH_POINT
    if x == _BRANCH_POINT:
        return -1.0
    if x == 0.0:
        return 0.0

    if x < -0.3:
        # Branch-point expansion in p = sqrt(2(e*x + 1)).
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    elif x < 3.0:
        w = math.log1p(x)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)

    tol = 1e-13 * max(abs(x), 1e-300)
    for _ in range(60):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol:
            return w
        wp1 = w + 1.0
        # Halley step for f(w) = w*exp(w) - x.
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= 1e-16 * max(1.0, abs(w)):
            return w
    raise NonConvergenceError(f"lambert_w0 did not converge for x={x}")


def hyp1f1(a: float, b: float, x: float, max_terms: int = 10_000) -> float:
    """Kummer confluent hypergeometric function 1F1(a; b; x).

    Direct series sum_n (a)_n/(b)_n x^n/n!, terminated once
    |term|/|partial sum| < 1e-15.  For x < 0 the series alternates, so the
    identity 1F1(a;b;x) = exp(x) * 1F1(b-a;b;-x) is applied first and the
    stable positive-argument series is summed instead.

    Raises DomainError when b is a non-positive integer, and
    NonConvergenceError past ``max_terms`` terms.
    """
    a, b, x = float(a), float(b), float(x)
    if b <= 0.0 and b == math.floor(b):
        raise DomainError(f"hyp1f1 undefined for non-positive integer b={b}")
    if x < 0.0:
        return math.exp(x) * hyp1f1(b - a, b, -x, max_terms=max_terms)

    total = 1.0
    term = 1.0
    for n in range(max_terms):
        term *= (a + n) / (b + n) * x / (n + 1.0)
        total += term
        if abs(term) < 1e-15 * abs(total):
            return total
    raise NonConvergenceError(
        f"hyp1f1({a}, {b}, {x}) did not converge in {max_terms} terms"
    )


def ricean_fading_penalty(k_factor: float) -> float:
    """Multiplicative variance penalty (E[|h|])^-2 of unit-power Ricean fading.

    The Ricean envelope with line-of-sight factor K and E[|h|^2] = 1 has
    mean amplitude Gamma(3/2) * exp(-K) * 1F1(3/2; 1; K) / sqrt(K+1), so the
    penalty is (K+1) / (Gamma(3/2) * exp(-K) * 1F1(3/2; 1; K))^2.  It equals
    4/pi at K = 0 (Rayleigh) and decreases monotonically to 1 as the channel
    hardens (K -> infinity).
    """
    k = float(k_factor)
    if k < 0.0:
        raise DomainError(f"Ricean K factor must be >= 0, got {k}")
    mean_amp = _GAMMA_3_2 * math.exp(-k) * hyp1f1(1.5, 1.0, k) / math.sqrt(k + 1.0)
    return 1.0 / (mean_amp * mean_amp)
