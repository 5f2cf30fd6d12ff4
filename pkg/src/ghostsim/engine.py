"""End-to-end two-color ghost-interference pipeline.

The experiment being modeled: a source emits position-correlated particle
pairs with different wavelengths.  Particle 1 travels a distance L2 to a
double slit (separation d, slit width eps) and on to detector D1 a further
L1 away; particle 2 travels freely for the same legs (optionally through a
converging lens a distance f before its detector D2).  Coincidence counts
P(y1, y2) show fringes in y2 whose spacing depends on both wavelengths.

Two evaluation paths coexist by design:

* the exact path carries the full state through build -> evolve -> slit ->
  evolve as complex Gaussians (no approximation beyond float arithmetic);
* the closed path is the good-correlation closed form

      P = K [ exp(-2(y1-y0)^2/D1 - 2(y2-y0)^2/D2)
            + exp(-2(y1+y0)^2/D1 - 2(y2+y0)^2/D2)
            + 2 exp(-2(y1^2+y0^2)/D1 - 2(y2^2+y0^2)/D2) cos(t1 y1 + t2 y2) ]

  with envelope widths D1 = eps^2 + (lambda1 L1 / pi eps)^2 and
  D2 = gamma^2 + (X / pi gamma)^2, phase gradients t1, t2, and
  X = lambda2 L + lambda1 L2 (L -> L - 4f with the lens).

Their pointwise discrepancy is a first-class diagnostic, not an error; the
closed path is what the printed-formula fringe widths come from, the exact
path is what the grid oracle must reproduce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, PhysicsPreconditionError
from .gaussian import (
    BiGaussianState,
    CorrelatedGaussian,
    GaussianTerm,
    OpticalDistance,
    ProductTerm,
    evolve_correlated,
    evolve_correlated_exact,
    evolve_free,
    lens_transform,
    normalized_packet,
    overlap,
    project_mode,
)
from .pattern import Pattern

__all__ = [
    "Scenario",
    "RegimeReport",
    "Uncertainties",
    "SlitResult",
    "FringeWidths",
    "JointDensity",
    "build_source_state",
    "slit_modes",
    "apply_double_slit",
    "propagate_to_detectors",
    "joint_density",
    "uncertainties",
    "fringe_width",
    "coincidence_slice",
    "bucket_average",
    "marginal_particle1",
    "suggested_y2_grid",
    "suggested_y1_grid",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(96)


@dataclass(frozen=True)
class RegimeReport:
    """Where the scenario sits relative to the closed form's assumptions."""

    margin: float  # Omega / max(eps, ell_sigma)
    good_correlation: bool  # margin >= 10: closed form trustworthy
    slit_mode_overlap: float  # |<phi_A|phi_B>| = exp(-d^2 / 2 eps^2)
    orthogonal_modes: bool  # slit modes effectively orthogonal (< 1e-4)
    simplified_ratio: float  # pi gamma^2 / X; squared = simplified-w2 rel. error
    simplified_ok: bool  # ratio^2 <= 1e-2, i.e. simplified w2 within 1%
    omega: float  # the sum-coordinate width actually used
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class Scenario:
    """All physical parameters of one run.  Lengths in meters.

    ``ell_sigma`` is the relative-coordinate correlation length of the source
    and ``Omega`` the sum-coordinate width (default 10 * max(d, gamma), deep
    in the correlated regime while staying finite).  ``f``, when set, puts a
    converging lens in particle 2's arm a distance f before its detector.
    """

    lambda1: float
    lambda2: float
    L1: float
    L2: float
    d: float
    slit_width: float
    ell_sigma: float
    Omega: float | None = None
    f: float | None = None

    def __post_init__(self) -> None:
        problems = []
        for name in ("lambda1", "lambda2", "L1", "L2", "d", "slit_width", "ell_sigma"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                problems.append(f"scenario.{name}: must be a positive length, got {v!r}")
            else:
                object.__setattr__(self, name, float(v))
        if self.Omega is not None:
            if not (math.isfinite(self.Omega) and self.Omega > 0):
                problems.append(f"scenario.Omega: must be a positive length, got {self.Omega!r}")
            else:
                object.__setattr__(self, "Omega", float(self.Omega))
        if self.f is not None and not problems:
            if not (math.isfinite(self.f) and 0 < self.f < self.L1):
                problems.append(
                    f"scenario.f: lens must sit between slit plane and detector "
                    f"(0 < f < L1={self.L1!r}), got {self.f!r}"
                )
            else:
                object.__setattr__(self, "f", float(self.f))
        if problems:
            raise ConfigError("\n".join(problems))

    @classmethod
    def from_gamma(cls, *, gamma: float, slit_width: float, **kwargs) -> "Scenario":
        """Build from the combined width gamma^2 = slit_width^2 + ell_sigma^2."""
        if not gamma > slit_width:
            raise ConfigError(
                f"scenario.gamma: gamma <= slit_width means ell_sigma is undefined "
                f"(gamma={gamma!r}, slit_width={slit_width!r})"
            )
        ell = math.sqrt(gamma * gamma - slit_width * slit_width)
        return cls(slit_width=slit_width, ell_sigma=ell, **kwargs)

    # -- derived geometry ---------------------------------------------------

    @property
    def epsilon(self) -> float:
        return self.slit_width

    @property
    def y0(self) -> float:
        return 0.5 * self.d

    @property
    def gamma_sq(self) -> float:
        return self.slit_width**2 + self.ell_sigma**2

    @property
    def gamma(self) -> float:
        return math.sqrt(self.gamma_sq)

    @property
    def D(self) -> float:
        return self.L1 + 2.0 * self.L2

    @property
    def L(self) -> float:
        return self.L1 + self.L2

    @property
    def omega(self) -> float:
        if self.Omega is not None:
            return self.Omega
        return 10.0 * max(self.d, self.gamma)

    @property
    def X(self) -> float:
        """The wavelength-path combination setting particle 2's fringes."""
        L_eff = self.L - 4.0 * self.f if self.f is not None else self.L
        return self.lambda2 * L_eff + self.lambda1 * self.L2

    def regime(self) -> RegimeReport:
        margin = self.omega / max(self.slit_width, self.ell_sigma)
        ov = math.exp(-self.d**2 / (2.0 * self.slit_width**2))
        ratio = math.pi * self.gamma_sq / self.X
        warnings = []
        if ov > 1e-4:
            warnings.append(
                f"slit modes overlap by {ov:.3e}; the slit normalization "
                "neglects their cross term"
            )
        if margin < 10.0:
            warnings.append(
                f"correlation margin {margin:.2f} < 10; closed form inaccurate, "
                "exact path used by default"
            )
        return RegimeReport(
            margin=margin,
            good_correlation=margin >= 10.0,
            slit_mode_overlap=ov,
            orthogonal_modes=ov < 1e-4,
            simplified_ratio=ratio,
            simplified_ok=ratio * ratio <= 1e-2,
            omega=self.omega,
            warnings=tuple(warnings),
        )


@dataclass(frozen=True)
class Uncertainties:
    """Source spread diagnostics; dy * dk >= 1/2 with equality at ell_sigma = 2 Omega."""

    dy: float
    dk: float

    @property
    def product(self) -> float:
        return self.dy * self.dk


def uncertainties(s: Scenario) -> Uncertainties:
    dy = math.sqrt(s.omega**2 + s.ell_sigma**2 / 4.0)
    dk = 0.5 * math.sqrt(1.0 / s.ell_sigma**2 + 1.0 / (4.0 * s.omega**2))
    return Uncertainties(dy=dy, dk=dk)


def build_source_state(s: Scenario) -> BiGaussianState:
    """Unit-norm correlated source: w_r = ell_sigma^2, w_c = 4 Omega^2."""
    amp = math.sqrt(2.0 / (math.pi * s.ell_sigma * s.omega))
    return BiGaussianState.from_correlated(
        CorrelatedGaussian(amp, s.ell_sigma**2, 4.0 * s.omega**2)
    )


def slit_modes(s: Scenario) -> tuple[GaussianTerm, GaussianTerm]:
    """Unit-norm slit packets at +y0 and -y0."""
    return (
        normalized_packet(+s.y0, s.slit_width),
        normalized_packet(-s.y0, s.slit_width),
    )


@dataclass(frozen=True)
class SlitResult:
    """Outcome of conditioning on particle 1 passing the double slit.

    ``post_slit`` is (phi_A psi_A + phi_B psi_B) / C with C^2 = ||psi_A||^2 +
    ||psi_B||^2; the discarded component is never materialized, only its
    probability is reported.  ``y0_prime``/``Gamma`` are the center and width
    of the exact conditional packet psi_A; the ``*_model`` values come from
    the channel-diagonal evolution rule and the printed small-overlap
    approximations, kept for comparison.
    """

    post_slit: BiGaussianState
    y0_prime: float
    Gamma: complex
    pass_probability: float
    mode_overlap: float
    conditional_overlap: float  # |<psi_A|psi_B>| / (||psi_A|| ||psi_B||)
    y0_prime_model: float
    Gamma_model: complex
    y0_prime_printed: float
    Gamma_approx: complex
    warnings: tuple[str, ...] = ()


def apply_double_slit(state: BiGaussianState, s: Scenario) -> SlitResult:
    """Project coordinate 1 onto the two slit packets and renormalize."""
    if state.correlated is None:
        raise PhysicsPreconditionError(
            "double slit expects the evolved correlated source state"
        )
    phi_a, phi_b = slit_modes(s)
    psi_a = project_mode(state, phi_a, coordinate=1)
    psi_b = project_mode(state, phi_b, coordinate=1)
    na2 = psi_a.norm_sq()
    nb2 = psi_b.norm_sq()
    c2 = na2 + nb2
    if c2 <= 0.0 or not math.isfinite(c2):
        raise PhysicsPreconditionError("state misses the slits")
    pre = state.norm_sq()
    inv_c = 1.0 / math.sqrt(c2)
    post = BiGaussianState.from_terms(
        [ProductTerm(inv_c, phi_a, psi_a), ProductTerm(inv_c, phi_b, psi_b)]
    )
    cond_ov = abs(overlap(psi_a, psi_b)) / math.sqrt(na2 * nb2)

    # comparison values from the channel-diagonal rule and its printed limits
    od1 = OpticalDistance(s.lambda1, s.L2)
    od2 = OpticalDistance(s.lambda2, s.L2)
    source = build_source_state(s).correlated
    model = evolve_correlated(source, od1, od2)
    psi_a_model = project_mode(BiGaussianState.from_correlated(model), phi_a, 1)
    om2 = 4.0 * s.omega**2
    y0p_printed = s.y0 * (om2 - s.ell_sigma**2) / (
        om2 + s.ell_sigma**2 + 4.0 * s.slit_width**2
    )
    gamma_approx = s.gamma_sq + 1j * (od1.Lambda + od2.Lambda) * s.L2

    return SlitResult(
        post_slit=post,
        y0_prime=psi_a.center,
        Gamma=psi_a.width,
        pass_probability=c2 / pre,
        mode_overlap=abs(overlap(phi_a, phi_b)),
        conditional_overlap=cond_ov,
        y0_prime_model=psi_a_model.center,
        Gamma_model=psi_a_model.width,
        y0_prime_printed=y0p_printed,
        Gamma_approx=gamma_approx,
        warnings=s.regime().warnings,
    )


def propagate_to_detectors(post_slit: BiGaussianState, s: Scenario) -> BiGaussianState:
    """Evolve both coordinates from the slit plane to the detector planes.

    Particle 1 travels L1 to D1.  Particle 2 travels L1 to D2; with a lens,
    it travels L1 - f, passes the lens, then travels the remaining f.
    """
    od1 = OpticalDistance(s.lambda1, s.L1)
    lam2 = OpticalDistance(s.lambda2, 0.0).Lambda
    out = []
    for t in post_slit.terms:
        g1 = evolve_free(t.g1, od1)
        if s.f is None:
            g2 = evolve_free(t.g2, OpticalDistance(s.lambda2, s.L1))
        else:
            g2 = evolve_free(t.g2, OpticalDistance(s.lambda2, s.L1 - s.f))
            L_eff = g2.width.imag / lam2  # accumulated effective distance
            g2 = lens_transform(g2, OpticalDistance(s.lambda2, L_eff), s.f)
            g2 = evolve_free(g2, OpticalDistance(s.lambda2, s.f))
        out.append(ProductTerm(t.amplitude, g1, g2))
    return BiGaussianState.from_terms(out)


@dataclass(frozen=True)
class FringeWidths:
    exact: float
    simplified: float
    young_equivalent: float


def fringe_width(s: Scenario) -> FringeWidths:
    """Particle-2 fringe spacings: exact 2 pi / theta2, simplified X/d, Young."""
    x = s.X
    return FringeWidths(
        exact=x / s.d + s.gamma_sq**2 * math.pi**2 / (s.d * x),
        simplified=x / s.d,
        young_equivalent=s.lambda2 * s.D / s.d,
    )


@dataclass(frozen=True)
class JointDensity:
    """Coincidence density P(y1, y2) with both evaluation paths.

    ``default_path`` is "closed" when the correlation margin supports the
    closed form and "exact" otherwise; every pattern operation accepts an
    explicit ``path`` override.
    """

    scenario: Scenario
    Delta1: float
    Delta2: float
    theta1: float
    theta2: float
    y0: float
    norm_const: float
    X: float
    exact_state: BiGaussianState
    exact_norm_sq: float
    slit: SlitResult
    regime: RegimeReport
    default_path: str

    def evaluate(self, y1, y2, path: str | None = None):
        path = path or self.default_path
        if path == "closed":
            return self.evaluate_closed(y1, y2)
        if path == "exact":
            return self.evaluate_exact(y1, y2)
        raise ValueError(f"unknown path {path!r}")

    def evaluate_closed(self, y1, y2):
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        d1, d2, y0 = self.Delta1, self.Delta2, self.y0
        ta = np.exp(-2.0 * (y1 - y0) ** 2 / d1 - 2.0 * (y2 - y0) ** 2 / d2)
        tb = np.exp(-2.0 * (y1 + y0) ** 2 / d1 - 2.0 * (y2 + y0) ** 2 / d2)
        tx = (
            2.0
            * np.exp(-2.0 * (y1**2 + y0**2) / d1 - 2.0 * (y2**2 + y0**2) / d2)
            * np.cos(self.theta1 * y1 + self.theta2 * y2)
        )
        return self.norm_const * (ta + tb + tx)

    def evaluate_exact(self, y1, y2):
        amp = self.exact_state.evaluate(y1, y2)
        return (amp.real**2 + amp.imag**2) / self.exact_norm_sq

    def marginal1(self, y1, path: str | None = None):
        """Density of particle 1 alone: integral of P over y2 in closed form."""
        path = path or self.default_path
        y1 = np.asarray(y1, dtype=float)
        if path == "closed":
            d1, d2, y0 = self.Delta1, self.Delta2, self.y0
            env = np.exp(-2.0 * (y1 - y0) ** 2 / d1) + np.exp(
                -2.0 * (y1 + y0) ** 2 / d1
            )
            cross = (
                2.0
                * np.exp(-2.0 * (y1**2 + y0**2) / d1)
                * math.exp(-2.0 * y0**2 / d2)
                * math.exp(-self.theta2**2 * d2 / 8.0)
                * np.cos(self.theta1 * y1)
            )
            return self.norm_const * math.sqrt(math.pi * d2 / 2.0) * (env + cross)
        if path == "exact":
            out = np.zeros(np.shape(y1))
            for tj in self.exact_state.terms:
                for tk in self.exact_state.terms:
                    ov = tj.amplitude.conjugate() * tk.amplitude * overlap(tj.g2, tk.g2)
                    prod = np.conj(tj.g1.evaluate(y1)) * tk.g1.evaluate(y1) * ov
                    out = out + prod.real
            return out / self.exact_norm_sq
        raise ValueError(f"unknown path {path!r}")

    def closed_vs_exact(self, y1, y2) -> float:
        """Max |closed - exact| relative to the exact peak on the given grid."""
        a = self.evaluate_closed(y1, y2)
        b = self.evaluate_exact(y1, y2)
        return float(np.max(np.abs(a - b)) / np.max(b))


def joint_density(s: Scenario) -> JointDensity:
    """Run the exact pipeline and assemble both evaluation paths."""
    regime = s.regime()
    od1 = OpticalDistance(s.lambda1, s.L2)
    od2 = OpticalDistance(s.lambda2, s.L2)
    source = build_source_state(s)
    evolved = BiGaussianState.from_correlated(
        evolve_correlated_exact(source.correlated, od1, od2)
    )
    slit = apply_double_slit(evolved, s)
    final = propagate_to_detectors(slit.post_slit, s)

    beta1 = s.lambda1 * s.L1 / math.pi
    x = s.X
    delta1 = s.slit_width**2 + beta1**2 / s.slit_width**2
    delta2 = s.gamma_sq + x**2 / (math.pi**2 * s.gamma_sq)
    theta1 = 2.0 * s.d * beta1 / (s.slit_width**4 + beta1**2)
    theta2 = 2.0 * math.pi * s.d * x / (s.gamma_sq**2 * math.pi**2 + x**2)
    cross_atten = math.exp(
        -2.0 * s.y0**2 * (1.0 / delta1 + 1.0 / delta2)
    ) * math.exp(-(theta1**2 * delta1 + theta2**2 * delta2) / 8.0)
    norm_const = 1.0 / (
        (math.pi / 2.0) * math.sqrt(delta1 * delta2) * (2.0 + 2.0 * cross_atten)
    )
    return JointDensity(
        scenario=s,
        Delta1=delta1,
        Delta2=delta2,
        theta1=theta1,
        theta2=theta2,
        y0=s.y0,
        norm_const=norm_const,
        X=x,
        exact_state=final,
        exact_norm_sq=final.norm_sq(),
        slit=slit,
        regime=regime,
        default_path="closed" if regime.good_correlation else "exact",
    )


def suggested_y2_grid(jd: JointDensity, n: int = 2001) -> np.ndarray:
    """Symmetric y2 grid covering >= 4 fringe periods and the envelope."""
    half = max(
        4.0 * jd.X / jd.scenario.d, 2.5 * math.sqrt(jd.Delta2) + abs(jd.y0)
    )
    return np.linspace(-half, half, n)


def suggested_y1_grid(jd: JointDensity, n: int = 2001) -> np.ndarray:
    half = 2.5 * math.sqrt(jd.Delta1) + abs(jd.y0)
    return np.linspace(-half, half, n)


def coincidence_slice(
    jd: JointDensity, y1_fixed: float, y2_grid=None, path: str | None = None
) -> Pattern:
    """P(y1_fixed, y2) sampled on the grid; fringes live in y2."""
    y2 = suggested_y2_grid(jd) if y2_grid is None else np.asarray(y2_grid, dtype=float)
    values = jd.evaluate(float(y1_fixed), y2, path)
    notes = []
    spacing = 2.0 * math.pi / jd.theta2
    periods = (y2[-1] - y2[0]) / spacing
    if periods < 4.0:
        notes.append(
            f"grid spans {periods:.2f} fringe periods (< 4); spacing "
            "extraction may be degraded"
        )
    return Pattern(
        (y2,), values, label="coincidence-slice", y1_fixed=float(y1_fixed),
        notes=tuple(notes),
    )


def bucket_average(
    jd: JointDensity,
    y1_center: float,
    width: float,
    y2_grid=None,
    path: str | None = None,
) -> Pattern:
    """Mean of P over a detector window of the given width at D1.

    Returns (1/width) * integral of P(y1, y2) dy1 over the window, evaluated
    with a fixed-order Gauss-Legendre rule (deterministic).  width = 0
    degenerates to the point slice.
    """
    if width < 0:
        raise ConfigError("bucket width must be >= 0")
    y2 = suggested_y2_grid(jd) if y2_grid is None else np.asarray(y2_grid, dtype=float)
    if width == 0.0:
        base = coincidence_slice(jd, y1_center, y2, path)
        return Pattern(
            base.axes, base.values, label="bucket-average",
            y1_fixed=float(y1_center), window=0.0, notes=base.notes,
        )
    nodes = y1_center + 0.5 * width * _GL_NODES
    vals = jd.evaluate(nodes[:, None], y2[None, :], path)
    avg = 0.5 * (_GL_WEIGHTS @ vals)  # (width/2) * sum(w P) / width
    return Pattern(
        (y2,), avg, label="bucket-average", y1_fixed=float(y1_center),
        window=float(width),
    )


def marginal_particle1(
    jd: JointDensity, y1_grid=None, path: str | None = None
) -> Pattern:
    """Pattern of particle 1 alone (integrates to 1)."""
    y1 = suggested_y1_grid(jd) if y1_grid is None else np.asarray(y1_grid, dtype=float)
    return Pattern((y1,), jd.marginal1(y1, path), label="marginal1")
