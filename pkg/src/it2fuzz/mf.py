"""Gaussian membership machinery for interval type-2 fuzzy sets.

An interval type-2 fuzzy set is fully described by the band between its
lower and upper membership functions (the footprint of uncertainty, FOU).
Two FOU families are supported:

* uncertain mean: the Gaussian center ranges over [mean_lo, mean_hi] at a
  fixed width.  The exact upper bound is flat-topped between the two
  extreme means, and the exact lower bound is the pointwise minimum of
  the two extreme Gaussians.
* uncertain sigma: the center is fixed and the width ranges over
  [sigma_lo, sigma_hi]; both exact bounds are plain Gaussians.

The exact uncertain-mean bounds are not Gaussian themselves, so
``fit_bounds`` produces single scaled-Gaussian stand-ins by least squares.
The closed-form inference engines can run on either the exact bounds or
the fitted ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "ScaledGaussian",
    "IT2Gaussian",
    "UNCERTAIN_MEAN",
    "UNCERTAIN_SIGMA",
    "default_fit_window",
    "fit_bounds",
    "FitDominanceViolated",
    "NonConvergence",
]

UNCERTAIN_MEAN = "uncertain_mean"
UNCERTAIN_SIGMA = "uncertain_sigma"

# 1/phi, the golden-section step ratio.
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class FitDominanceViolated(ValueError):
    """Fitted lower bound exceeds the fitted upper bound on the fit grid."""


class NonConvergence(RuntimeError):
    """Bound fitter missed its parameter tolerance within the iteration budget."""


@dataclass(frozen=True)
class ScaledGaussian:
    """Amplitude-scaled Gaussian ``scale * exp(-((x - mean) / sigma)^2 / 2)``.

    ``scale`` must lie in (0, 1] so the curve is a valid membership
    function; ``sigma`` must be positive.
    """

    mean: float
    sigma: float
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 < self.scale <= 1.0:
            raise ValueError(f"scale must lie in (0, 1], got {self.scale}")

    def __call__(self, x: float) -> float:
        z = (x - self.mean) / self.sigma
        return self.scale * math.exp(-0.5 * z * z)

    def sample(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized evaluation over an array of abscissas."""
        z = (np.asarray(xs, dtype=float) - self.mean) / self.sigma
        return self.scale * np.exp(-0.5 * z * z)


@dataclass(frozen=True)
class IT2Gaussian:
    """Interval type-2 Gaussian set, either uncertain-mean or uncertain-sigma.

    Use the ``uncertain_mean`` / ``uncertain_sigma`` constructors rather
    than filling the fields directly.  ``fitted_umf`` / ``fitted_lmf``
    hold optional scaled-Gaussian stand-ins for the exact bounds; attach
    them with :meth:`with_fitted` or :meth:`fit`.
    """

    kind: str
    mean_lo: float
    mean_hi: float
    sigma_lo: float
    sigma_hi: float
    fitted_umf: ScaledGaussian | None = None
    fitted_lmf: ScaledGaussian | None = None

    def __post_init__(self) -> None:
        if self.kind not in (UNCERTAIN_MEAN, UNCERTAIN_SIGMA):
            raise ValueError(f"unknown FOU kind {self.kind!r}")
        if not self.mean_lo <= self.mean_hi:
            raise ValueError("mean_lo must not exceed mean_hi")
        if not 0.0 < self.sigma_lo <= self.sigma_hi:
            raise ValueError("sigmas must satisfy 0 < sigma_lo <= sigma_hi")
        if self.kind == UNCERTAIN_MEAN and self.sigma_lo != self.sigma_hi:
            raise ValueError("uncertain-mean sets use a single sigma")
        if self.kind == UNCERTAIN_SIGMA and self.mean_lo != self.mean_hi:
            raise ValueError("uncertain-sigma sets use a single mean")

    @classmethod
    def uncertain_mean(cls, mean_lo: float, mean_hi: float, sigma: float) -> "IT2Gaussian":
        return cls(UNCERTAIN_MEAN, float(mean_lo), float(mean_hi), float(sigma), float(sigma))

    @classmethod
    def uncertain_sigma(cls, mean: float, sigma_lo: float, sigma_hi: float) -> "IT2Gaussian":
        return cls(UNCERTAIN_SIGMA, float(mean), float(mean), float(sigma_lo), float(sigma_hi))

    @property
    def center(self) -> float:
        return 0.5 * (self.mean_lo + self.mean_hi)

    @property
    def mean_spread(self) -> float:
        """Half-width of the mean interval (zero for uncertain-sigma sets)."""
        return 0.5 * (self.mean_hi - self.mean_lo)

    # -- exact bounds ----------------------------------------------------

    def umf(self, x: float) -> float:
        """Exact upper membership bound at a point."""
        if self.kind == UNCERTAIN_SIGMA:
            z = (x - self.mean_lo) / self.sigma_hi
            return math.exp(-0.5 * z * z)
        if x < self.mean_lo:
            z = (x - self.mean_lo) / self.sigma_hi
        elif x > self.mean_hi:
            z = (x - self.mean_hi) / self.sigma_hi
        else:
            return 1.0
        return math.exp(-0.5 * z * z)

    def lmf(self, x: float) -> float:
        """Exact lower membership bound at a point."""
        if self.kind == UNCERTAIN_SIGMA:
            z = (x - self.mean_lo) / self.sigma_lo
            return math.exp(-0.5 * z * z)
        zl = (x - self.mean_lo) / self.sigma_lo
        zh = (x - self.mean_hi) / self.sigma_lo
        return min(math.exp(-0.5 * zl * zl), math.exp(-0.5 * zh * zh))

    def umf_samples(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.kind == UNCERTAIN_SIGMA:
            z = (xs - self.mean_lo) / self.sigma_hi
            return np.exp(-0.5 * z * z)
        zl = (xs - self.mean_lo) / self.sigma_hi
        zh = (xs - self.mean_hi) / self.sigma_hi
        out = np.ones_like(xs)
        left = xs < self.mean_lo
        right = xs > self.mean_hi
        out[left] = np.exp(-0.5 * zl[left] ** 2)
        out[right] = np.exp(-0.5 * zh[right] ** 2)
        return out

    def lmf_samples(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        if self.kind == UNCERTAIN_SIGMA:
            z = (xs - self.mean_lo) / self.sigma_lo
            return np.exp(-0.5 * z * z)
        zl = (xs - self.mean_lo) / self.sigma_lo
        zh = (xs - self.mean_hi) / self.sigma_lo
        return np.minimum(np.exp(-0.5 * zl * zl), np.exp(-0.5 * zh * zh))

    # -- fitted bounds ---------------------------------------------------

    def with_fitted(self, umf: ScaledGaussian, lmf: ScaledGaussian) -> "IT2Gaussian":
        """Return a copy with the given fitted bounds attached."""
        return replace(self, fitted_umf=umf, fitted_lmf=lmf)

    def fit(self, window: tuple[float, float] | None = None, samples: int = 1001) -> "IT2Gaussian":
        """Return a copy with freshly fitted bounds attached."""
        umf, lmf = fit_bounds(self, window=window, samples=samples)
        return self.with_fitted(umf, lmf)


def default_fit_window(m: IT2Gaussian) -> tuple[float, float]:
    """Symmetric fitting window covering the FOU out to three widths.

    Spans ``center +- 3 * (sigma_hi + mean_spread)``, wide enough that the
    residual tails carry no practical weight in the least-squares fit.
    """
    half = 3.0 * (m.sigma_hi + m.mean_spread)
    return (m.center - half, m.center + half)


def _golden_min(f, lo: float, hi: float, tol: float, max_iter: int) -> float:
    """Golden-section minimum of a unimodal function on [lo, hi].

    Shrinks the bracket until its width drops below ``tol``; raises
    NonConvergence if the budget runs out first.
    """
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            return 0.5 * (a + b)
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    raise NonConvergence(
        f"golden-section bracket still {b - a:.3e} wide after {max_iter} iterations"
    )


def fit_bounds(
    m: IT2Gaussian,
    window: tuple[float, float] | None = None,
    samples: int = 1001,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> tuple[ScaledGaussian, ScaledGaussian]:
    """Least-squares scaled-Gaussian stand-ins for the exact FOU bounds.

    Both fits keep the mean pinned at the FOU center.  The upper fit
    keeps scale = 1 and searches sigma only; the lower fit searches sigma
    and scale jointly (golden-section on sigma, closed-form least-squares
    scale, alternated to convergence).

    Returns (fitted_umf, fitted_lmf).  Raises FitDominanceViolated if the
    fitted lower bound pokes above the fitted upper bound anywhere on the
    sample grid, and NonConvergence if the parameter change fails to drop
    below ``tol`` within ``max_iter`` iterations.
    """
    if window is None:
        window = default_fit_window(m)
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError(f"empty fitting window ({lo}, {hi})")
    if lo > m.mean_lo or hi < m.mean_hi:
        raise ValueError("fitting window must contain the FOU mean interval")
    if samples < 101:
        raise ValueError(f"need at least 101 samples, got {samples}")

    xs = np.linspace(lo, hi, int(samples))
    center = m.center
    dx2 = (xs - center) ** 2
    u_target = m.umf_samples(xs)
    l_target = m.lmf_samples(xs)

    half = 0.5 * (hi - lo)
    sig_lo = 0.01 * min(m.sigma_lo, half)
    sig_hi = max(2.0 * half, 4.0 * m.sigma_hi)
    gs_tol = 1e-3 * tol

    def curve(sigma: float) -> np.ndarray:
        return np.exp(dx2 * (-0.5 / (sigma * sigma)))

    def sse(sigma: float, scale: float, target: np.ndarray) -> float:
        r = target - scale * curve(sigma)
        return float(np.dot(r, r))

    def improves(cand_val: float, cur_val: float) -> bool:
        # Within the float noise floor the objective is flat and a
        # bracketing search just wanders; only clear improvements count,
        # which gives every search below an exact resting point.
        return cand_val < cur_val - 4.0 * np.finfo(float).eps * (1.0 + cur_val)

    def best_sigma(scale: float, baseline: float, target: np.ndarray) -> float:
        cand = _golden_min(
            lambda s: sse(s, scale, target), sig_lo, sig_hi, gs_tol, max_iter
        )
        if improves(sse(cand, scale, target), sse(baseline, scale, target)):
            return cand
        return baseline

    def opt_scale(sigma: float, target: np.ndarray) -> float:
        g = curve(sigma)
        return min(max(float(np.dot(target, g) / np.dot(g, g)), 1e-12), 1.0)

    u_sigma = best_sigma(1.0, float(m.sigma_hi), u_target)
    fitted_umf = ScaledGaussian(center, u_sigma, 1.0)

    sigma = float(m.sigma_lo)
    scale = opt_scale(sigma, l_target)
    for _ in range(max_iter):
        new_sigma = best_sigma(scale, sigma, l_target)
        new_scale = opt_scale(new_sigma, l_target)
        done = abs(new_scale - scale) <= tol and abs(new_sigma - sigma) <= tol
        sigma, scale = new_sigma, new_scale
        if done:
            break
    else:
        raise NonConvergence(
            f"lower-bound fit still moving after {max_iter} alternations"
        )
    fitted_lmf = ScaledGaussian(center, sigma, scale)

    if np.any(fitted_lmf.sample(xs) > fitted_umf.sample(xs) + 1e-9):
        raise FitDominanceViolated(
            "fitted lower bound exceeds fitted upper bound on the fit grid"
        )
    return fitted_umf, fitted_lmf
