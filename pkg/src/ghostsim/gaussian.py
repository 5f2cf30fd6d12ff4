"""Complex-Gaussian wavepacket algebra used by the whole simulator.

One-particle objects are terms of the form

    g(y) = A exp(-(y - mu)^2 / w + i kappa y)

with complex amplitude ``A``, complex width parameter ``w`` (units m^2,
``Re w > 0``), real center ``mu`` (m) and real linear phase gradient
``kappa`` (1/m).  Free propagation over a leg ``(lambda, L)`` maps

    w -> w + i * Lambda * L,        Lambda = lambda / pi,

and rescales the amplitude so the L2 norm is conserved exactly; every other
element (mode projection, the lens) is a closed-form Gaussian integral.  No
quadrature happens anywhere in this module.

Two-particle states come in two shapes.  A finite sum of product terms
``c * g1(y1) * g2(y2)`` covers post-slit states; position-correlated sources
use the rotated coordinates ``u = y1 - y2`` and ``s = y1 + y2`` and a width
matrix ``W = [[w_r, w_x], [w_x, w_c]]``:

    psi(y1, y2) = A exp(-(u, s) W^{-1} (u, s)^T).

``w_x = 0`` is the separable case exp(-u^2/w_r - s^2/w_c) that sources start
from; free evolution couples the two channels whenever the two wavelengths
differ, which is why the cross width has to exist.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import PhysicsPreconditionError

__all__ = [
    "OpticalDistance",
    "GaussianTerm",
    "CorrelatedGaussian",
    "ProductTerm",
    "BiGaussianState",
    "normalized_packet",
    "overlap",
    "evolve_free",
    "evolve_correlated",
    "evolve_correlated_exact",
    "project_mode",
    "lens_transform",
]


@dataclass(frozen=True)
class OpticalDistance:
    """One propagation leg: wavelength and distance traveled, both in meters."""

    wavelength: float
    L: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "wavelength", float(self.wavelength))
        object.__setattr__(self, "L", float(self.L))
        if not self.wavelength > 0.0:
            raise PhysicsPreconditionError("wavelength must be > 0")
        if self.L < 0.0:
            raise PhysicsPreconditionError("propagation distance must be >= 0")

    @property
    def Lambda(self) -> float:
        """Width increment rate: free evolution adds ``i * Lambda * L`` to w."""
        return self.wavelength / math.pi


@dataclass(frozen=True)
class GaussianTerm:
    """A exp(-(y - center)^2 / width + i * phase_gradient * y)."""

    amplitude: complex
    center: float
    width: complex
    phase_gradient: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        object.__setattr__(self, "center", float(self.center))
        object.__setattr__(self, "width", complex(self.width))
        object.__setattr__(self, "phase_gradient", float(self.phase_gradient))
        if not (self.width.real > 0.0 and math.isfinite(self.width.real)):
            raise PhysicsPreconditionError(
                f"Gaussian width must have positive real part, got {self.width}"
            )

    def evaluate(self, y: np.ndarray | float) -> np.ndarray | complex:
        y = np.asarray(y, dtype=float)
        dy = y - self.center
        out = self.amplitude * np.exp(
            -dy * dy / self.width + 1j * self.phase_gradient * y
        )
        return out if out.ndim else complex(out)

    def norm_sq(self) -> float:
        """Integral of |g|^2 over the line, in closed form."""
        a = 2.0 * self.width.real / abs(self.width) ** 2  # 2 Re(1/w)
        return abs(self.amplitude) ** 2 * math.sqrt(math.pi / a)

    def normalized(self) -> "GaussianTerm":
        return replace(self, amplitude=self.amplitude / math.sqrt(self.norm_sq()))

    @property
    def intensity_sigma(self) -> float:
        """Standard deviation of |g|^2 around the center."""
        return abs(self.width) / (2.0 * math.sqrt(self.width.real))


def normalized_packet(center: float, eps: float) -> GaussianTerm:
    """Unit-norm real packet of 1/e half-width ``eps``: w = eps^2, kappa = 0."""
    if not eps > 0.0:
        raise PhysicsPreconditionError("packet width must be > 0")
    amplitude = (math.pi / 2.0) ** (-0.25) / math.sqrt(eps)
    return GaussianTerm(amplitude, center, eps * eps)


def overlap(bra: GaussianTerm, ket: GaussianTerm) -> complex:
    """L2 inner product <bra|ket> (bra conjugated), in closed form."""
    wb = bra.width.conjugate()
    alpha = 1.0 / wb + 1.0 / ket.width
    if not alpha.real > 0.0:
        raise PhysicsPreconditionError("divergent overlap integral")
    beta = (
        2.0 * bra.center / wb
        + 2.0 * ket.center / ket.width
        + 1j * (ket.phase_gradient - bra.phase_gradient)
    )
    const = -bra.center**2 / wb - ket.center**2 / ket.width
    return (
        bra.amplitude.conjugate()
        * ket.amplitude
        * cmath.sqrt(math.pi / alpha)
        * cmath.exp(beta * beta / (4.0 * alpha) + const)
    )


def evolve_free(term: GaussianTerm, od: OpticalDistance) -> GaussianTerm:
    """Free propagation: w += i*Lambda*L, amplitude rescaled; norm conserved.

    A nonzero phase gradient kappa makes the packet drift: the center moves
    by Lambda*L*kappa/2 and the amplitude picks up the matching constant
    phase.  With kappa = 0 the center never moves.
    """
    step = od.Lambda * od.L
    w_new = term.width + 1j * step
    amp = term.amplitude * cmath.sqrt(term.width) / cmath.sqrt(w_new)
    center = term.center
    if term.phase_gradient != 0.0:
        k = term.phase_gradient
        center = center + step * k / 2.0
        amp = amp * cmath.exp(-1j * step * k * k / 4.0)
    return GaussianTerm(amp, center, w_new, term.phase_gradient)


def lens_transform(term: GaussianTerm, od: OpticalDistance, f: float) -> GaussianTerm:
    """Thin converging lens acting on a packet with width sigma^2 + i*Lambda*L.

    The output width is sigma_new^2 + i*Lambda*(L - 4f) where sigma_new^2 is
    the root of  x^2 - R x + Lambda^2 (L - 4f)^2 = 0,  R = sigma^2 +
    Lambda^2 L^2 / sigma^2,  chosen so the element is continuous in f (the
    root relatively closer to sigma^2; ties break to the larger root).  The
    constraint keeps R, hence the intensity envelope width at the plane where
    the element acts, unchanged, and the amplitude factor

        sqrt(sigma + i*Lambda*L/sigma) / sqrt(sigma_new + i*q/sigma_new)

    has unit modulus, so the norm is conserved exactly.  The caller supplies
    L (the term's accumulated effective distance); it must agree with the
    imaginary part of the width.  Center and phase gradient pass through.
    """
    if not f > 0.0:
        raise PhysicsPreconditionError("focal length must be > 0")
    Lam = od.Lambda
    L = od.L
    w = term.width
    sigma2 = w.real
    scale = max(abs(w.imag), Lam * L, sigma2)
    if abs(w.imag - Lam * L) > 1e-9 * scale:
        raise PhysicsPreconditionError(
            "supplied distance inconsistent with the width's imaginary part"
        )
    R = sigma2 + (Lam * L) ** 2 / sigma2
    q = Lam * (L - 4.0 * f)
    disc = R * R - 4.0 * q * q
    if disc < 0.0:
        raise PhysicsPreconditionError(
            "lens condition unsatisfiable for these parameters"
        )
    r_hi = 0.5 * (R + math.sqrt(disc))
    r_lo = (q * q) / r_hi if r_hi > 0.0 else 0.0
    if r_lo <= 0.0:
        sigma2_new = r_hi
    else:
        d_hi = abs(r_hi - sigma2) / sigma2
        d_lo = abs(r_lo - sigma2) / sigma2
        sigma2_new = r_hi if d_hi <= d_lo else r_lo
    sigma = math.sqrt(sigma2)
    sigma_new = math.sqrt(sigma2_new)
    pref = cmath.sqrt(sigma + 1j * Lam * L / sigma) / cmath.sqrt(
        sigma_new + 1j * q / sigma_new
    )
    return replace(
        term,
        amplitude=term.amplitude * pref,
        width=complex(sigma2_new, q),
    )


@dataclass(frozen=True)
class CorrelatedGaussian:
    """A exp(-(u,s) W^{-1} (u,s)^T) with u = y1 - y2, s = y1 + y2.

    ``w_r`` is the difference-coordinate width, ``w_c`` the sum-coordinate
    width, ``w_x`` the cross coupling (zero for a freshly built source).
    """

    amplitude: complex
    w_r: complex
    w_c: complex
    w_x: complex = 0j

    def __post_init__(self) -> None:
        for name in ("amplitude", "w_r", "w_c", "w_x"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        m11, m12, m22 = self.inverse_widths()
        if not (m11.real > 0.0 and m11.real * m22.real - m12.real**2 > 0.0):
            raise PhysicsPreconditionError(
                "correlated Gaussian is not normalizable (width matrix invalid)"
            )

    def inverse_widths(self) -> tuple[complex, complex, complex]:
        """Entries (M11, M12, M22) of M = W^{-1} in the (u, s) basis."""
        det = self.w_r * self.w_c - self.w_x * self.w_x
        if det == 0:
            raise PhysicsPreconditionError("singular width matrix")
        return self.w_c / det, -self.w_x / det, self.w_r / det

    def evaluate(self, y1, y2):
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        u = y1 - y2
        s = y1 + y2
        m11, m12, m22 = self.inverse_widths()
        return self.amplitude * np.exp(-(m11 * u * u + 2.0 * m12 * u * s + m22 * s * s))

    def norm_sq(self) -> float:
        """Integral of |psi|^2 over the (y1, y2) plane (Jacobian du ds = 2 dy1 dy2)."""
        m11, m12, m22 = self.inverse_widths()
        det_re = m11.real * m22.real - m12.real**2
        return abs(self.amplitude) ** 2 * math.pi / (4.0 * math.sqrt(det_re))

    def normalized(self) -> "CorrelatedGaussian":
        return replace(self, amplitude=self.amplitude / math.sqrt(self.norm_sq()))

    def position_covariance(self) -> np.ndarray:
        """2x2 covariance matrix of (y1, y2) under |psi|^2."""
        m11, m12, m22 = self.inverse_widths()
        h = 2.0 * np.array(
            [[m11.real, m12.real], [m12.real, m22.real]]
        )  # |psi|^2 = exp(-x H x)
        cov_us = 0.5 * np.linalg.inv(h)
        j = 0.5 * np.array([[1.0, 1.0], [-1.0, 1.0]])  # (y1, y2) = J (u, s)
        return j @ cov_us @ j.T


@dataclass(frozen=True)
class ProductTerm:
    """c * g1(y1) * g2(y2)."""

    amplitude: complex
    g1: GaussianTerm
    g2: GaussianTerm

    def __post_init__(self) -> None:
        object.__setattr__(self, "amplitude", complex(self.amplitude))


@dataclass(frozen=True)
class BiGaussianState:
    """Two-particle state: either product terms or one correlated Gaussian."""

    terms: tuple[ProductTerm, ...] = ()
    correlated: CorrelatedGaussian | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        has_terms = len(self.terms) > 0
        has_corr = self.correlated is not None
        if has_terms == has_corr:
            raise ValueError(
                "state must hold either product terms or a correlated form, not both"
            )

    @classmethod
    def from_correlated(cls, cg: CorrelatedGaussian) -> "BiGaussianState":
        return cls(correlated=cg)

    @classmethod
    def from_terms(cls, terms) -> "BiGaussianState":
        return cls(terms=tuple(terms))

    def evaluate(self, y1, y2):
        """psi(y1, y2); arguments broadcast, so y1[:, None], y2[None, :] grids work."""
        if self.correlated is not None:
            return self.correlated.evaluate(y1, y2)
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        total = 0j
        for t in self.terms:
            total = total + t.amplitude * t.g1.evaluate(y1) * t.g2.evaluate(y2)
        return total

    def norm_sq(self) -> float:
        if self.correlated is not None:
            return self.correlated.norm_sq()
        acc = 0j
        for tj in self.terms:
            for tk in self.terms:
                acc += (
                    tj.amplitude.conjugate()
                    * tk.amplitude
                    * overlap(tj.g1, tk.g1)
                    * overlap(tj.g2, tk.g2)
                )
        return acc.real

    def normalize(self) -> "BiGaussianState":
        factor = 1.0 / math.sqrt(self.norm_sq())
        if self.correlated is not None:
            return BiGaussianState.from_correlated(
                replace(self.correlated, amplitude=self.correlated.amplitude * factor)
            )
        return BiGaussianState.from_terms(
            replace(t, amplitude=t.amplitude * factor) for t in self.terms
        )


def evolve_correlated(
    cg: CorrelatedGaussian, od1: OpticalDistance, od2: OpticalDistance
) -> CorrelatedGaussian:
    """Channel-diagonal evolution rule for separable correlated states.

    Adds i*(Lambda1 + Lambda2)*L to w_r and i*(Lambda1*Lambda2 /
    (Lambda1 + Lambda2))*L to w_c, with the amplitude rescaled so the norm is
    conserved.  This treats the difference and sum channels as independent
    1D packets, which requires w_x = 0 and a common L.  It is kept as the
    simple two-channel model; `evolve_correlated_exact` is what the full
    pipeline uses.
    """
    if od1.L != od2.L:
        raise PhysicsPreconditionError(
            f"mismatched propagation distances: {od1.L} != {od2.L}"
        )
    if cg.w_x != 0:
        raise PhysicsPreconditionError(
            "channel-diagonal evolution requires w_x = 0; use the exact rule"
        )
    L = od1.L
    lam_r = od1.Lambda + od2.Lambda
    lam_c = od1.Lambda * od2.Lambda / (od1.Lambda + od2.Lambda)
    w_r = cg.w_r + 1j * lam_r * L
    w_c = cg.w_c + 1j * lam_c * L
    amp = (
        cg.amplitude
        * cmath.sqrt(cg.w_r / w_r)
        * cmath.sqrt(cg.w_c / w_c)
    )
    return CorrelatedGaussian(amp, w_r, w_c, cg.w_x)


def evolve_correlated_exact(
    cg: CorrelatedGaussian, od1: OpticalDistance, od2: OpticalDistance
) -> CorrelatedGaussian:
    """Exact two-coordinate free evolution of a correlated Gaussian.

    In the (u, s) basis the kinetic quadratic form is
    (Lambda1 + Lambda2)(k_u^2 + k_s^2) + 2 (Lambda1 - Lambda2) k_u k_s, so
    the width matrix gains

        W += i L [[Lambda1 + Lambda2, Lambda1 - Lambda2],
                  [Lambda1 - Lambda2, Lambda1 + Lambda2]]

    and the amplitude scales by sqrt(det W_old / det W_new); the norm is
    conserved.  Distinct wavelengths generate the off-diagonal coupling.
    """
    if od1.L != od2.L:
        raise PhysicsPreconditionError(
            f"mismatched propagation distances: {od1.L} != {od2.L}"
        )
    L = od1.L
    dp = 1j * (od1.Lambda + od2.Lambda) * L
    dx = 1j * (od1.Lambda - od2.Lambda) * L
    w_r = cg.w_r + dp
    w_c = cg.w_c + dp
    w_x = cg.w_x + dx
    det_old = cg.w_r * cg.w_c - cg.w_x * cg.w_x
    det_new = w_r * w_c - w_x * w_x
    amp = cg.amplitude * cmath.sqrt(det_old / det_new)
    return CorrelatedGaussian(amp, w_r, w_c, w_x)


def _project_correlated(
    cg: CorrelatedGaussian, mode: GaussianTerm, coordinate: int
) -> GaussianTerm:
    """Closed-form integral of conj(mode(y_in)) * psi(y1, y2) over y_in."""
    m11, m12, m22 = cg.inverse_widths()
    # psi = A exp(-(G11 y1^2 + G22 y2^2 + 2 G12 y1 y2))
    g11 = m11 + m22 + 2.0 * m12
    g22 = m11 + m22 - 2.0 * m12
    g12 = m22 - m11
    gi, go = (g11, g22) if coordinate == 1 else (g22, g11)

    vb = mode.width.conjugate()
    alpha = 1.0 / vb + gi
    if not alpha.real > 0.0:
        raise PhysicsPreconditionError("divergent projection integral")
    b0 = 2.0 * mode.center / vb - 1j * mode.phase_gradient
    b1 = -2.0 * g12
    c2 = b1 * b1 / (4.0 * alpha) - go
    if not c2.real < 0.0:
        raise PhysicsPreconditionError("conditional state is not normalizable")
    c1 = b0 * b1 / (2.0 * alpha)
    c0 = b0 * b0 / (4.0 * alpha) - mode.center**2 / vb

    w_new = -1.0 / c2
    mu_new = -c1.real / (2.0 * c2.real)
    kappa_new = c1.imag + 2.0 * c2.imag * mu_new
    amp = (
        cg.amplitude
        * mode.amplitude.conjugate()
        * cmath.sqrt(math.pi / alpha)
        * cmath.exp(c0 - c2 * mu_new * mu_new)
    )
    return GaussianTerm(amp, mu_new, w_new, kappa_new)


def project_mode(
    state: BiGaussianState, mode: GaussianTerm, coordinate: int
) -> GaussianTerm:
    """Unnormalized conditional packet of the other coordinate.

    Computes integral of conj(mode(y_c)) * Psi over the chosen coordinate in
    closed form.  The result is a single Gaussian term, so the state must be
    one correlated Gaussian or one product term.
    """
    if coordinate not in (1, 2):
        raise ValueError("coordinate must be 1 or 2")
    if state.correlated is not None:
        return _project_correlated(state.correlated, mode, coordinate)
    if len(state.terms) != 1:
        raise ValueError(
            "projection of a multi-term state is a sum, not a single Gaussian term"
        )
    term = state.terms[0]
    own, other = (term.g1, term.g2) if coordinate == 1 else (term.g2, term.g1)
    coef = term.amplitude * overlap(mode, own)
    return replace(other, amplitude=other.amplitude * coef)
