"""Log-gamma and polygamma functions for real positive arguments.

All functions accept scalars or numpy arrays and return the same kind.
Arguments are shifted upward by recurrence until they exceed ``_SHIFT``,
then evaluated with the Stirling / asymptotic series.
"""

import numpy as np

_SHIFT = 10.0
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)

# B_2 .. B_16
_BERNOULLI = np.array([
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
])
_K = np.arange(1, len(_BERNOULLI) + 1)


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


def _prepare(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError(f"{name} requires x > 0")
    return arr


def _finish(x, out):
    if np.ndim(x) == 0:
        return float(out)
    return out


def _shifted(x0):
    """Shift every argument to at least ``_SHIFT`` by unit steps.

    Returns the shifted array and a list of the intermediate values
    ``x, x+1, ...`` (masked to 0 where no step was taken) for the recurrence
    corrections. Whole-array operations keep this fast on large grids.
    """
    z = np.atleast_1d(x0).astype(float, copy=True)
    steps = []
    while True:
        low = z < _SHIFT
        if not low.any():
            return z, steps
        steps.append((low, z.copy()))
        z += low


def ln_gamma(x):
    """Natural log of the gamma function for x > 0."""
    x0 = _prepare(x, "ln_gamma")
    z, steps = _shifted(x0)
    prod = np.ones_like(z)
    acc = np.zeros_like(z)
    for i, (low, zi) in enumerate(steps):
        prod *= np.where(low, zi, 1.0)
        if i % 8 == 7:
            # flush before the running product can leave double range
            acc += np.log(prod)
            prod[:] = 1.0
    acc += np.log(prod)
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for k in range(len(_BERNOULLI), 0, -1):
        coef = _BERNOULLI[k - 1] / (2 * k * (2 * k - 1))
        series = series * inv2 + coef
    series *= inv
    out = (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + series - acc
    return _finish(x0, out.reshape(x0.shape))


def digamma(x):
    """Psi^(0)(x) = d ln Gamma(x) / dx for x > 0."""
    x0 = _prepare(x, "digamma")
    z, steps = _shifted(x0)
    acc = np.zeros_like(z)
    for low, zi in steps:
        acc += np.where(low, 1.0 / zi, 0.0)
    inv2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    for k in range(len(_BERNOULLI), 0, -1):
        series = series * inv2 + _BERNOULLI[k - 1] / (2 * k)
    series *= inv2
    out = np.log(z) - 0.5 / z - series - acc
    return _finish(x0, out.reshape(x0.shape))


def trigamma(x):
    """Psi^(1)(x) for x > 0."""
    x0 = _prepare(x, "trigamma")
    z, steps = _shifted(x0)
    acc = np.zeros_like(z)
    for low, zi in steps:
        acc += np.where(low, 1.0 / (zi * zi), 0.0)
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for k in range(len(_BERNOULLI), 0, -1):
        series = series * inv2 + _BERNOULLI[k - 1]
    series *= inv2 * inv
    out = inv + 0.5 * inv2 + series + acc
    return _finish(x0, out.reshape(x0.shape))


def tetragamma(x):
    """Psi^(2)(x) for x > 0."""
    x0 = _prepare(x, "tetragamma")
    z, steps = _shifted(x0)
    acc = np.zeros_like(z)
    for low, zi in steps:
        acc += np.where(low, 2.0 / (zi * zi * zi), 0.0)
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    for k in range(len(_BERNOULLI), 0, -1):
        series = series * inv2 + (2 * k + 1) * _BERNOULLI[k - 1]
    series *= inv2 * inv2
    out = -inv2 - inv2 * inv - series - acc
    return _finish(x0, out.reshape(x0.shape))


def delta_phi1(z1, z2):
    """Digamma difference Psi^(0)(z1) - Psi^(0)(z2)."""
    return digamma(z1) - digamma(z2)


def delta_phi2(z1, z2):
    """Trigamma difference Psi^(1)(z1) - Psi^(1)(z2)."""
    return trigamma(z1) - trigamma(z2)
