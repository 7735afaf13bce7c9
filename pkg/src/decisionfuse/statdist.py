"""Deterministic numeric kernels.

* Standard normal CDF via the complementary error function,
  Phi(z) = erfc(-z / sqrt(2)) / 2, accurate to ~1e-15 absolute.
* Chi-square survival function via the regularized upper incomplete
  gamma, Q(dof/2, x/2).
* Seeded, platform-independent random streams built on the Philox 4x64
  counter-based generator. Normal variates come from the inverse normal
  CDF applied to open-interval uniforms, so a stream's output is fully
  determined by (seed, stream_id) with no rejection-sampling state.
* Closed-form square roots of equicorrelation matrices, a*I + b*J, and a
  Kronecker-structured Gaussian sampler that never materializes an m x m
  matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

_SQRT2 = math.sqrt(2.0)


def std_normal_cdf(z):
    """Standard normal CDF, vectorized."""
    return 0.5 * special.erfc(-np.asarray(z, dtype=np.float64) / _SQRT2)


def two_sided_p(x, sigma):
    """Two-sided p-value of a z-test of zero mean: 2*(1 - Phi(|x|/sigma)).

    Computed as erfc(|x| / (sigma*sqrt(2))) to keep precision in the tail.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if (sigma <= 0).any():
        raise ValueError("sigma must be positive")
    return special.erfc(np.abs(np.asarray(x, dtype=np.float64)) / (sigma * _SQRT2))


def chisq_sf(x, dof):
    """Chi-square survival function P(X > x) with ``dof`` degrees of freedom."""
    x = np.asarray(x, dtype=np.float64)
    if (x < 0).any():
        raise ValueError("x must be non-negative")
    dof = np.asarray(dof, dtype=np.float64)
    if (dof <= 0).any():
        raise ValueError("dof must be positive")
    return special.gammaincc(dof / 2.0, x / 2.0)


class RngStream:
    """One deterministic random stream keyed by (seed, stream_id).

    Distinct stream ids give statistically independent Philox streams;
    identical keys reproduce bit-identical output on every platform. Each
    stream is single-owner: create one per concurrent task instead of
    sharing.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed) % (1 << 64)
        self.stream_id = int(stream_id) % (1 << 64)
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def uint64(self, size=None):
        return self.generator.integers(0, 1 << 64, size=size, dtype=np.uint64)

    def uniform(self, size=None):
        """Uniform float64 in [0, 1)."""
        return self.generator.random(size)

    def open_uniform(self, size=None):
        """Uniform float64 in (0, 1); safe input for inverse CDFs."""
        bits = self.generator.integers(0, 1 << 53, size=size)
        return (bits + 0.5) * 2.0 ** -53

    def standard_normal(self, size=None):
        """N(0, 1) variates via the inverse CDF of open-interval uniforms."""
        return special.ndtri(self.open_uniform(size))


def rng_stream(seed: int, stream_id: int = 0) -> RngStream:
    return RngStream(seed, stream_id)


@dataclass(frozen=True)
class EquicorrSpec:
    """An equicorrelation matrix (1-rho)*I + rho*J of given dimension."""

    dim: int
    rho: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if not self.rho < 1.0:
            raise ValueError("rho must be < 1")
        if self.dim > 1 and self.rho < -1.0 / (self.dim - 1):
            raise ValueError(
                f"rho={self.rho} breaks positive semidefiniteness for dim={self.dim}"
            )


def equicorr_sqrt_coeffs(spec: EquicorrSpec) -> tuple[float, float]:
    """Coefficients (a, b) with (a*I + b*J)^2 = (1-rho)*I + rho*J."""
    root = math.sqrt(1.0 - spec.rho)
    full = math.sqrt(1.0 - spec.rho + spec.dim * spec.rho)
    return root, (full - root) / spec.dim


def sample_kronecker_normal(
    m: int,
    d: int,
    rho_study: float,
    rho_hyp: float,
    means,
    stream: RngStream,
) -> np.ndarray:
    """Sample an m x d Gaussian matrix with Kronecker equicorrelation.

    Entry (i, j) has mean means[i], unit variance, correlation rho_study
    across studies (same i), rho_hyp across hypotheses (same j), and
    rho_study*rho_hyp for the cross term. The matrix square roots apply
    as a*row + b*rowsum, so nothing quadratic in m is allocated.
    """
    study_spec = EquicorrSpec(d, rho_study)
    hyp_spec = EquicorrSpec(m, rho_hyp)
    means = np.asarray(means, dtype=np.float64)
    if means.size != m:
        raise ValueError(f"means must have length {m}")

    z = stream.standard_normal((m, d))
    a_s, b_s = equicorr_sqrt_coeffs(study_spec)
    y = a_s * z + b_s * z.sum(axis=1, keepdims=True)
    a_h, b_h = equicorr_sqrt_coeffs(hyp_spec)
    x = a_h * y + b_h * y.sum(axis=0, keepdims=True)
    return means[:, None] + x
