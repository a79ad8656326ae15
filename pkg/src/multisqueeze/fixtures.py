"""Test inputs with known answers."""

from dataclasses import dataclass

import numpy as np

from .errors import BadParameter
from .hamiltonian import JSABlockHamiltonian


@dataclass(frozen=True)
class DoubleGaussianConfig:
    sigma_plus: float
    sigma_minus: float
    n_bins: int = 64
    amplitude: float = 1.0
    half_width: float = None

    def __post_init__(self):
        if not (np.isfinite(self.sigma_plus) and self.sigma_plus > 0):
            raise BadParameter(f"sigma_plus must be positive, got {self.sigma_plus}")
        if not (np.isfinite(self.sigma_minus) and self.sigma_minus > 0):
            raise BadParameter(f"sigma_minus must be positive, got {self.sigma_minus}")
        if int(self.n_bins) != self.n_bins or self.n_bins < 8:
            raise BadParameter(f"n_bins must be an integer >= 8, got {self.n_bins}")
        if not np.isfinite(self.amplitude):
            raise BadParameter("amplitude must be finite")
        if self.half_width is not None and not self.half_width > 0:
            raise BadParameter(f"half_width must be positive, got {self.half_width}")

    @property
    def grid(self):
        hw = self.half_width if self.half_width is not None else 2.5 * max(self.sigma_plus, self.sigma_minus)
        return np.linspace(-hw, hw, int(self.n_bins))


def double_gaussian_jsa(cfg):
    w = cfg.grid
    ws, wi = np.meshgrid(w, w, indexing="ij")
    return cfg.amplitude * np.exp(
        -((ws + wi) ** 2) / (2 * cfg.sigma_plus**2) - (ws - wi) ** 2 / (2 * cfg.sigma_minus**2)
    )


def fixture_double_gaussian(sigma_plus, sigma_minus, n_bins=64, amplitude=1.0, half_width=None):
    """Photon-pair Hamiltonian with a double-Gaussian joint spectral amplitude.

    ``F(ws, wi) = amplitude exp[-(ws + wi)^2 / (2 s+^2)] exp[-(ws - wi)^2 / (2 s-^2)]``
    on a symmetric grid shared by signal and idler. The grid spans
    ``+-2.5 max(s+, s-)`` unless ``half_width`` is given.

    Raises:
        BadParameter: for non-positive widths or fewer than 8 bins.
    """
    cfg = DoubleGaussianConfig(sigma_plus, sigma_minus, n_bins, amplitude, half_width)
    return JSABlockHamiltonian(double_gaussian_jsa(cfg), frequencies=cfg.grid)


def double_gaussian_schmidt_ratio(sigma_plus, sigma_minus):
    """Ratio ``t = (s+ - s-) / (s+ + s-)`` of consecutive JSA singular values.

    A continuous double Gaussian in the width convention above factors over
    Hermite-Gauss modes with singular values ``proportional to t^k`` (so the
    normalised Schmidt weights go as ``t^(2k)``). Only ``|t|`` matters.
    """
    return abs(sigma_plus - sigma_minus) / (sigma_plus + sigma_minus)


def double_gaussian_schmidt_weights(sigma_plus, sigma_minus, k):
    """First ``k`` normalised Schmidt weights ``(1 - t^2) t^(2n)``."""
    t2 = double_gaussian_schmidt_ratio(sigma_plus, sigma_minus) ** 2
    return (1.0 - t2) * t2 ** np.arange(k)


def schmidt_weights(f):
    """Normalised squared singular values of a JSA matrix, descending."""
    sv = np.linalg.svd(np.asarray(f), compute_uv=False)
    total = np.sum(sv**2)
    return sv**2 / total if total > 0 else sv**2


def purity(f):
    """``sum p_k^2`` of the Schmidt weights; 1 for a separable JSA."""
    return float(np.sum(schmidt_weights(f) ** 2))


__all__ = [
    "DoubleGaussianConfig",
    "double_gaussian_jsa",
    "double_gaussian_schmidt_ratio",
    "double_gaussian_schmidt_weights",
    "fixture_double_gaussian",
    "purity",
    "schmidt_weights",
]
