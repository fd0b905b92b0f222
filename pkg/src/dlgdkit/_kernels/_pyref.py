"""Pure-Python reference kernels.

These are the fallback implementations used when the compiled extension
(_speedups) is unavailable.  They are written to produce *bit-identical*
results for the random stream (integer mixing is exact, and the
transcendental steps go through the math module so both backends call the
same C library functions one value at a time) and numerically equivalent
results for the linear-algebra and special-function kernels.

Kernel contracts
----------------
normal_stream(seed, n)
    Deterministic standard-normal draws from a counter-based splitmix64
    generator fed through a Box-Muller transform.  Stream i (i = 1, 2, ...)
    of uniforms is u_i = ((mix64(seed + i*GAMMA) >> 11) + 1) * 2**-53,
    which lies in (0, 1] so log(u) is always finite.  Consecutive uniform
    pairs (u1, u2) map to r*cos(a), r*sin(a) with r = sqrt(-2 log u1) and
    a = TWO_PI * u2.  For odd n the trailing sine draw is discarded.

ols_solve(X, y)
    Least-squares coefficients via an orthogonal decomposition, plus the
    diagonal of (X'X)^-1 and the numerical rank.  A column is treated as
    dependent when its pivot falls below RANK_TOL relative to the largest
    pivot.  On rank deficiency the returned beta/diag are zeros and only
    the rank is meaningful.

reg_inc_beta(a, b, x)
    Regularized incomplete beta I_x(a, b) by continued fraction (modified
    Lentz), tolerance 1e-14, at most 300 iterations; raises
    ConvergenceError if the budget is exhausted.
"""

from __future__ import annotations

import math

import numpy as np

from dlgdkit.errors import ConvergenceError

GAMMA = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1
TWO_PI = 6.283185307179586
RANK_TOL = 1e-10

_CF_TOL = 1e-14
_CF_MAX_ITER = 300
_CF_TINY = 1e-300


def normal_stream(seed: int, n: int) -> np.ndarray:
    """Return ``n`` deterministic N(0,1) draws for the given 64-bit seed."""
    if n <= 0:
        return np.empty(0, dtype=np.float64)
    npairs = (n + 1) // 2
    # Uniform stage: counter-based, exact in uint64 arithmetic, so it can
    # be vectorized without any risk of diverging from the compiled path.
    idx = np.arange(1, 2 * npairs + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + idx * np.uint64(GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    u = ((z >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    # Box-Muller stage: scalar math-module calls on purpose.  numpy's
    # vectorized log differs from libm in the last bit for some inputs,
    # which would break bit-identity with the compiled backend.
    out = np.empty(2 * npairs, dtype=np.float64)
    for j in range(npairs):
        u1 = u[2 * j]
        u2 = u[2 * j + 1]
        r = math.sqrt(-2.0 * math.log(u1))
        arg = TWO_PI * u2
        out[2 * j] = r * math.cos(arg)
        out[2 * j + 1] = r * math.sin(arg)
    return out[:n]


def ols_solve(X: np.ndarray, y: np.ndarray):
    """Least squares via SVD; returns (beta, diag of (X'X)^-1, rank)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    k = X.shape[1]
    u, s, vt = np.linalg.svd(X, full_matrices=False)
    cutoff = RANK_TOL * s[0] if s.size and s[0] > 0.0 else 0.0
    rank = int(np.sum(s > cutoff))
    if rank < k:
        return np.zeros(k), np.zeros(k), rank
    beta = vt.T @ ((u.T @ y) / s)
    # (X'X)^-1 = V diag(1/s^2) V', so its diagonal is sum_j (V[i,j]/s[j])^2.
    diag = np.einsum("ji,ji->i", vt / s[:, None], vt / s[:, None])
    return beta, diag, rank


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # The continued fraction converges quickly only for x below the split
    # point (a+1)/(a+b+2); above it, use the reflection I_x(a,b) = 1 - I_{1-x}(b,a).
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge within "
        f"{_CF_MAX_ITER} iterations (a={a}, b={b}, x={x})"
    )
