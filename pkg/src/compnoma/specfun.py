"""Special functions used by the closed-form capacity and error-rate math.

The ergodic-capacity expressions reduce to terms of the form
``exp(a*k) * Ei(-a*k)`` (expectation of ``ln(x + a)`` under an exponential
density), so the exponential integral is only needed on the negative real
axis. The spatial-modulation error probabilities need the Gaussian
Q-function and the moment generating function of an exponential variate.
"""

import math

import numpy as np
from scipy.special import erfc

from .errors import NumericalDomainError

EULER_GAMMA = 0.5772156649015329

# Series/continued-fraction switchover for the exponential integral.
# Above |x| ~ 4 the ascending series loses too many digits to the
# cancellation between log|x| + gamma and the alternating sum.
_EI_SWITCH = 4.0
_MAX_ITER = 500


def _ei_series(x):
    # Ei(x) = gamma + ln|x| + sum_{n>=1} x^n / (n * n!),  -_EI_SWITCH < x < 0
    s = 0.0
    term = 1.0
    for n in range(1, _MAX_ITER):
        term *= x / n
        incr = term / n
        s += incr
        if abs(incr) <= 1e-17 * abs(s):
            break
    return EULER_GAMMA + math.log(-x) + s


def _e1_scaled_cf(t):
    # exp(t) * E1(t) for t >= _EI_SWITCH, modified Lentz continued fraction:
    # E1(t) = exp(-t) / (t + 1 - 1/(t + 3 - 4/(t + 5 - 9/(...))))
    tiny = 1e-300
    b = t + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for n in range(1, _MAX_ITER):
        a = -float(n * n)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise NumericalDomainError(f"continued fraction for E1({t}) did not converge")


def expi(x):
    """Exponential integral Ei(x) for strictly negative real x.

    Parameters
    ----------
    x : float
        Argument, must satisfy x < 0.

    Returns
    -------
    float
        Ei(x), always negative on this domain. Relative accuracy is
        better than 1e-12 against an adaptive-quadrature reference on
        x in [-50, -1e-10].
    """
    x = float(x)
    if not x < 0.0:
        raise NumericalDomainError(f"expi requires x < 0, got {x!r}")
    t = -x
    if t < _EI_SWITCH:
        return _ei_series(x)
    return -math.exp(-t) * _e1_scaled_cf(t)


def expi_scaled(y):
    """exp(y) * Ei(-y) for y > 0, computed without overflow.

    This is the combination the log-expectation formulas consume; for
    large y it tends to -1/y + O(1/y^2), while exp(y) alone would
    overflow long before the product loses meaning.
    """
    y = float(y)
    if not y > 0.0:
        raise NumericalDomainError(f"expi_scaled requires y > 0, got {y!r}")
    if y < _EI_SWITCH:
        return math.exp(y) * _ei_series(-y)
    return -_e1_scaled_cf(y)


def q_func(x):
    """Gaussian tail probability Q(x) = 0.5 * erfc(x / sqrt(2)).

    Accepts scalars or numpy arrays. Monotone decreasing, Q(0) = 0.5,
    and Q(x) + Q(-x) = 1.
    """
    return 0.5 * erfc(x / math.sqrt(2.0))


def mgf_exp(mean, s):
    """MGF of an exponential variate with the given mean, E[exp(-s X)].

    Equals 1 / (1 + s * mean); lies in (0, 1] for mean, s >= 0. Used in
    the Craig-form averaging of Q(sqrt(X)) over fading.
    """
    if np.any(np.asarray(mean) < 0.0) or np.any(np.asarray(s) < 0.0):
        raise NumericalDomainError("mgf_exp requires mean >= 0 and s >= 0")
    return 1.0 / (1.0 + s * mean)
