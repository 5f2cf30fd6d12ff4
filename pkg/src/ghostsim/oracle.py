"""Independent FFT reference for the Gaussian pipeline.

This module re-runs the same physical stages as `engine` with none of its
algebra: the two-particle amplitude is sampled on a rectangular grid, free
propagation is a diagonal multiplier in the 2-D spectral domain, and the
double slit is a rank-2 conditioning applied by Riemann-sum inner products.
Agreement between the two paths is therefore evidence, not tautology.

Grid sizing is the whole game here and is done per coordinate:

* axis 1 must sample finely enough both to represent the slit packets
  without spectral fold-over (step <= 0.35 * slit_width keeps the packet's
  Nyquist amplitude below 1e-8 of its peak) and to contain the source's
  relative-coordinate spectrum (step <= pi / (8 * sigma_k));
* axis 2 must contain the detector-plane spread and the analysis window,
  which sets a floor on the extent;
* both axes must keep the occupied part of the spectrum inside the band.

Free-space tails are unbounded, so a perfect containment check would
reject every finite grid.  `propagate` instead uses the identity

    per-cell multiplier phase increment / pi  ==  Fresnel displacement / extent

(content whose displacement Lambda*L*k/2 exceeds the half-extent wraps
around, and that is exactly the content whose sampled chirp is aliased).
Occupied cells destined to wrap are summed; their amplitude fraction is
recorded as a diagnostic and is fatal only above a budget, because wrapped
content this weak lands in regions where the pattern itself is dead.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .engine import (
    Scenario,
    apply_double_slit,
    build_source_state,
    joint_density,
    slit_modes,
)
from .errors import ConfigError, PhysicsPreconditionError, ResourceBoundError
from .gaussian import (
    BiGaussianState,
    GaussianTerm,
    OpticalDistance,
    ProductTerm,
    evolve_correlated_exact,
    evolve_free,
    lens_transform,
    normalized_packet,
)
from .pattern import Pattern

__all__ = [
    "GridSpec",
    "GridState",
    "auto_grid",
    "discretize",
    "propagate",
    "slit_project",
    "lens_apply",
    "density",
    "grid_slice",
    "fit_packet",
    "run_pipeline",
]

_MAX_BYTES = 2**33  # refuse to allocate more than 8 GiB for one array
_OCCUPIED = 1e-12  # spectral intensity (rel. to peak) that counts as content
_WRAP_BUDGET = 1e-3  # max amplitude fraction allowed to wrap per stage
_SLIT_STEP = 0.35  # dy1 <= _SLIT_STEP * slit_width represents the packets
_K_MARGIN = 8.0  # dy1 <= pi / (_K_MARGIN * sigma_k) contains the spectrum
_K_MARGIN_MIN = 6.5  # smallest spectral margin worth running at all


def _workers() -> int:
    """FFT worker count; single-threaded by default for bitwise determinism."""
    raw = os.environ.get("GHOSTSIM_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        raise ConfigError(f"GHOSTSIM_THREADS must be an integer, got {raw!r}")


@dataclass(frozen=True)
class GridSpec:
    """Sampling layout: 2^k points per axis on [-extent, +extent)."""

    n1: int
    n2: int
    extent1: float
    extent2: float

    def __post_init__(self) -> None:
        for name in ("n1", "n2"):
            n = getattr(self, name)
            if not (isinstance(n, int) and n >= 16 and (n & (n - 1)) == 0):
                raise ConfigError(f"grid.{name}: must be a power of two >= 16, got {n!r}")
        for name in ("extent1", "extent2"):
            e = getattr(self, name)
            if not (isinstance(e, (int, float)) and math.isfinite(e) and e > 0):
                raise ConfigError(f"grid.{name}: must be a positive length, got {e!r}")
            object.__setattr__(self, name, float(e))

    @property
    def dy1(self) -> float:
        return 2.0 * self.extent1 / self.n1

    @property
    def dy2(self) -> float:
        return 2.0 * self.extent2 / self.n2

    def axis1(self) -> np.ndarray:
        return (np.arange(self.n1) - self.n1 // 2) * self.dy1

    def axis2(self) -> np.ndarray:
        return (np.arange(self.n2) - self.n2 // 2) * self.dy2

    def k1(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.n1, d=self.dy1)

    def k2(self) -> np.ndarray:
        return 2.0 * math.pi * np.fft.fftfreq(self.n2, d=self.dy2)


@dataclass(frozen=True)
class GridState:
    """Sampled amplitude plus the norm it had after every stage so far."""

    spec: GridSpec
    psi: np.ndarray
    norm_history: tuple[tuple[str, float], ...]
    diagnostics: tuple[str, ...] = ()

    def norm(self) -> float:
        mass = np.sum(self.psi.real**2 + self.psi.imag**2)
        return float(math.sqrt(mass * self.spec.dy1 * self.spec.dy2))

    def _with(self, psi, label, extra_diag=()) -> "GridState":
        out = GridState(
            self.spec, psi, self.norm_history, self.diagnostics + tuple(extra_diag)
        )
        return GridState(
            self.spec, psi, self.norm_history + ((label, out.norm()),),
            out.diagnostics,
        )


def _state_support(state: BiGaussianState):
    """Per-coordinate (|center|max, sigma) bounds of the sampled intensity."""
    if state.correlated is not None:
        cov = state.correlated.position_covariance()
        return (0.0, math.sqrt(cov[0, 0])), (0.0, math.sqrt(cov[1, 1]))
    out = []
    for pick in (lambda t: t.g1, lambda t: t.g2):
        c = max(abs(pick(t).center) for t in state.terms)
        s = max(pick(t).intensity_sigma for t in state.terms)
        out.append((c, s))
    return tuple(out)


def discretize(state: BiGaussianState, spec: GridSpec) -> GridState:
    """Sample the amplitude, refusing grids that cannot hold it.

    The preflight check requires each half-extent to cover the state's
    center offset plus six intensity sigmas; afterwards the Riemann-sum norm
    must match the analytic norm to 1e-9, which catches undersampling that
    extent checks alone would miss.
    """
    if 16 * spec.n1 * spec.n2 > _MAX_BYTES:
        raise ResourceBoundError(
            f"grid of {spec.n1} x {spec.n2} complex samples exceeds the "
            f"{_MAX_BYTES // 2**30} GiB allocation cap"
        )
    support = _state_support(state)
    for axis, (extent, (center, sigma)) in enumerate(
        zip((spec.extent1, spec.extent2), support), start=1
    ):
        needed = center + 6.0 * sigma
        if extent < needed:
            raise ConfigError(
                f"grid.extent{axis}: {extent:.6g} m does not cover the state "
                f"(needs >= {needed:.6g} m)"
            )
    y1 = spec.axis1()[:, None]
    y2 = spec.axis2()[None, :]
    psi = np.ascontiguousarray(state.evaluate(y1, y2), dtype=np.complex128)
    gs = GridState(spec, psi, (), ())
    gs = GridState(spec, psi, (("discretize", gs.norm()),))
    analytic = math.sqrt(state.norm_sq())
    rel = abs(gs.norm() - analytic) / analytic
    if rel > 1e-9:
        raise ConfigError(
            f"grid norm deviates from the analytic norm by {rel:.3e} "
            "(> 1e-9); increase the grid resolution or extent"
        )
    return gs


def _wrap_check(
    spec: GridSpec, intensity: np.ndarray, od: OpticalDistance, axis: int
) -> list[str]:
    """Flag occupied spectral content whose displacement leaves the grid."""
    if od.L == 0.0:
        return []
    k = spec.k1() if axis == 0 else spec.k2()
    extent = spec.extent1 if axis == 0 else spec.extent2
    profile = intensity.max(axis=1 - axis)
    occupied = profile > _OCCUPIED * float(intensity.max())
    displacement = 0.5 * od.Lambda * od.L * np.abs(k)
    wrapping = occupied & (displacement > extent)
    if not np.any(wrapping):
        return []
    total = float(np.sum(intensity))
    frac = math.sqrt(float(np.sum(profile[wrapping])) / total)
    if frac > _WRAP_BUDGET:
        raise ResourceBoundError(
            f"axis {axis + 1}: spectral content with amplitude fraction "
            f"{frac:.3e} would wrap around during propagation over "
            f"L={od.L:.6g} m; enlarge extent{axis + 1} or reduce L per step"
        )
    return [f"axis {axis + 1}: wrap amplitude fraction {frac:.3e} over L={od.L:.6g} m"]


def propagate(gs: GridState, od1: OpticalDistance, od2: OpticalDistance) -> GridState:
    """Free propagation of axis j over od_j via the spectral multiplier."""
    spec = gs.spec
    w = _workers()
    tilde = scipy.fft.fft2(gs.psi, workers=w)
    intensity = tilde.real**2 + tilde.imag**2
    diags = _wrap_check(spec, intensity, od1, 0) + _wrap_check(spec, intensity, od2, 1)
    k1 = spec.k1()[:, None]
    k2 = spec.k2()[None, :]
    phase = -0.25 * (od1.Lambda * od1.L * k1**2 + od2.Lambda * od2.L * k2**2)
    tilde *= np.exp(1j * phase)
    psi = scipy.fft.ifft2(tilde, workers=w)
    return gs._with(psi, "propagate", diags)


def slit_project(gs: GridState, s: Scenario) -> GridState:
    """Condition axis 1 on the two slit packets and renormalize.

    Matches the analytic slit exactly: psi -> (phi_A <phi_A|psi> +
    phi_B <phi_B|psi>) / C with no orthogonalization of the modes, then a
    renormalization to unit grid norm.  The passed fraction enters the norm
    history via the post-projection norm.
    """
    spec = gs.spec
    y1 = spec.axis1()
    phi_a, phi_b = slit_modes(s)
    va = phi_a.evaluate(y1)
    vb = phi_b.evaluate(y1)
    amp_a = (np.conj(va) @ gs.psi) * spec.dy1  # <phi_A | psi>(y2)
    amp_b = (np.conj(vb) @ gs.psi) * spec.dy1
    ca = float(np.sum(amp_a.real**2 + amp_a.imag**2) * spec.dy2)
    cb = float(np.sum(amp_b.real**2 + amp_b.imag**2) * spec.dy2)
    if ca + cb <= 0.0:
        raise PhysicsPreconditionError("state misses the slits")
    psi = va[:, None] * amp_a[None, :] + vb[:, None] * amp_b[None, :]
    projected = gs._with(psi, "slit:projected")
    n = projected.norm()  # = C, the analytic slit normalization, on the grid
    return projected._with(psi / n, "slit:renormalized")


def _mask_sampling_guard(
    spec: GridSpec, profile: np.ndarray, c: float, center: float
) -> None:
    """Refuse a quadratic phase exp(-i c (y2-center)^2) the grid cannot sample.

    Where the per-cell phase increment exceeds pi the sampled mask aliases;
    that is only fatal on cells where `profile` (the intensity the mask will
    actually multiply) holds amplitude.
    """
    y2 = spec.axis2()
    occupied = profile > _OCCUPIED * float(profile.max())
    increment = 2.0 * abs(c) * np.abs(y2 - center) * spec.dy2
    if np.any(occupied & (increment > math.pi)):
        raise ResourceBoundError(
            "lens mask is undersampled on occupied cells; increase n2 or "
            "reduce extent2"
        )


def lens_apply(
    gs: GridState,
    s: Scenario,
    mode: str = "exact",
    state: BiGaussianState | None = None,
) -> GridState:
    """Lens element on axis 2, a distance f before the particle-2 detector.

    ``exact`` applies the same parameter map the analytic pipeline uses.
    That map keeps every packet's center and phase gradient while changing
    only its complex width, and it preserves Re(1/w), so on each conditioned
    channel it is exactly a unit-modulus quadratic phase centered on that
    channel's packet -- but the center differs per channel, so no single
    pointwise mask realizes it.  The caller must therefore supply the
    analytic term decomposition of the grid state at the lens plane; the
    grid state is split into its slit channels, each channel's centered
    phase is applied, and the channels are reassembled.  The channel data
    passes through untouched apart from those phases; content outside the
    channel span (wrapped propagation tails, bounded by the wrap budget)
    is discarded here.

    ``thin`` is the classical thin-lens mask exp(-i y2^2 / (Lambda f)).
    It is a different physical element, not an approximation of ``exact``;
    it is kept for side-by-side comparison.
    """
    if s.f is None:
        raise ConfigError("scenario has no lens focal length set")
    lam = OpticalDistance(s.lambda2, 0.0).Lambda
    spec = gs.spec
    if mode == "thin":
        c = 1.0 / (lam * s.f)
        intensity = gs.psi.real**2 + gs.psi.imag**2
        _mask_sampling_guard(spec, intensity.max(axis=0), c, 0.0)
        psi = gs.psi * np.exp(-1j * c * spec.axis2() ** 2)[None, :]
        return gs._with(psi, "lens", ("lens: thin quadratic-phase model",))
    if mode != "exact":
        raise ValueError(f"unknown lens mode {mode!r}")
    if state is None:
        raise ConfigError(
            "lens mode 'exact' transforms Gaussian parameters channel by "
            "channel and needs the analytic term decomposition of the grid "
            "state at the lens plane (state=...)"
        )
    y1 = spec.axis1()
    y2 = spec.axis2()
    modes = np.stack([t.g1.evaluate(y1) for t in state.terms])
    gram = (np.conj(modes) @ modes.T) * spec.dy1
    coef = np.linalg.solve(gram, (np.conj(modes) @ gs.psi) * spec.dy1)
    residual = gs.psi - modes.T @ coef
    rel = float(np.linalg.norm(residual) / np.linalg.norm(gs.psi))
    # propagation may park up to _WRAP_BUDGET of the amplitude in wrapped
    # tails that no decomposition can describe; anything above that means
    # the caller's decomposition is wrong, not the grid
    if rel > _WRAP_BUDGET:
        raise PhysicsPreconditionError(
            f"the supplied decomposition does not span the grid state "
            f"(residual {rel:.3e} of the norm)"
        )
    for ch, t in enumerate(state.terms):
        g2 = t.g2
        out = lens_transform(g2, OpticalDistance(s.lambda2, g2.width.imag / lam), s.f)
        delta = 1.0 / out.width - 1.0 / g2.width  # Re(1/w) is preserved
        channel = coef[ch].real ** 2 + coef[ch].imag ** 2
        _mask_sampling_guard(spec, channel, delta.imag, g2.center)
        coef[ch] *= (out.amplitude / g2.amplitude) * np.exp(
            -delta * (y2 - g2.center) ** 2
        )
    psi = modes.T @ coef
    return gs._with(
        psi,
        "lens",
        (f"lens: exact parameter map on {len(state.terms)} channels, "
         f"decomposition residual {rel:.3e}",),
    )


def density(gs: GridState) -> Pattern:
    """Normalized |psi|^2 as a 2-D pattern on the grid axes."""
    spec = gs.spec
    vals = gs.psi.real**2 + gs.psi.imag**2
    mass = float(np.sum(vals) * spec.dy1 * spec.dy2)
    return Pattern(
        (spec.axis1(), spec.axis2()), vals / mass, label="oracle-density"
    )


def grid_slice(gs: GridState, y1: float) -> Pattern:
    """Normalized density row nearest to y1; the row's position is recorded."""
    spec = gs.spec
    axis1 = spec.axis1()
    row = int(np.argmin(np.abs(axis1 - y1)))
    vals = gs.psi[row].real**2 + gs.psi[row].imag**2
    mass = float(
        np.sum(gs.psi.real**2 + gs.psi.imag**2) * spec.dy1 * spec.dy2
    )
    return Pattern(
        (spec.axis2(),), vals / mass, label="oracle-slice",
        y1_fixed=float(axis1[row]),
    )


def fit_packet(y: np.ndarray, psi: np.ndarray) -> GaussianTerm:
    """Recover (amplitude, center, width, kappa) from a sampled 1-D packet.

    Moments give the center and Re(1/w); a quadratic fit to the unwrapped
    phase (intensity-weighted, restricted to samples above 1e-6 of the peak)
    gives Im(1/w) and the momentum offset.
    """
    y = np.asarray(y, dtype=float)
    psi = np.asarray(psi, dtype=complex)
    intensity = psi.real**2 + psi.imag**2
    mask = intensity > 1e-12 * float(intensity.max())
    if mask.sum() < 8:
        raise ValueError("not enough samples above the floor to fit")
    yy, ww, pp = y[mask], intensity[mask], psi[mask]
    total = float(ww.sum())
    mu = float((yy * ww).sum() / total)
    var = float(((yy - mu) ** 2 * ww).sum() / total)
    inv_re = 1.0 / (4.0 * var)
    phase = np.unwrap(np.angle(pp))
    p2, p1, _ = np.polyfit(yy, phase, 2, w=np.sqrt(ww))
    inv_w = inv_re - 1j * p2
    w = 1.0 / inv_w
    kappa = p1 + 2.0 * mu * p2
    model = np.exp(-((yy - mu) ** 2) * inv_w + 1j * kappa * yy)
    amp = complex((pp / model * ww).sum() / total)
    return GaussianTerm(amp, mu, w, kappa)


def norm_drift(gs: GridState) -> float:
    """Worst relative norm change between consecutive unitary stages.

    The slit projection discards amplitude on purpose, and the exact lens
    re-phases the slit channels against each other, which legitimately moves
    the total norm by the channel cross term; both are recorded in the
    history but excluded here.  Every other stage is unitary, so any drift
    there is numerical error.
    """
    drift = 0.0
    prev: float | None = None
    for label, n in gs.norm_history:
        if not (label.startswith("slit") or label == "lens"):
            if prev is not None:
                drift = max(drift, abs(n / prev - 1.0))
        prev = n
    return drift


def auto_grid(s: Scenario, n1: int = 2048, n2: int | None = None) -> GridSpec:
    """Choose per-axis extents for a pipeline run at the given sizes.

    Axis 1: the step is capped by the finer of the slit scale and the
    source's relative-coordinate spectral scale, and the resulting extent
    must still cover six sigma of every stage the axis sees (source, slit
    plane, detector).  Axis 2 has no sub-slit structure, so its extent
    balances position coverage against spectral coverage, with a hard floor
    at the fringe-analysis window.
    """
    n2 = n1 if n2 is None else n2
    src = build_source_state(s)
    evolved = BiGaussianState.from_correlated(
        evolve_correlated_exact(
            src.correlated,
            OpticalDistance(s.lambda1, s.L2),
            OpticalDistance(s.lambda2, s.L2),
        )
    )
    cov0 = src.correlated.position_covariance()
    cov1 = evolved.correlated.position_covariance()
    jd = joint_density(s)
    sigma_k_src = math.sqrt(1.0 / s.ell_sigma**2 + 1.0 / (4.0 * s.omega**2))

    m = s.y0
    # axis 1: the step prefers a full spectral margin but may stretch toward
    # a reduced (still safe) one when position coverage needs the room
    sigma_r1 = max(
        math.sqrt(cov0[0, 0]), math.sqrt(cov1[0, 0]), 0.5 * math.sqrt(jd.Delta1)
    )
    sigma_k1 = max(sigma_k_src, 1.0 / s.slit_width)
    dy1 = min(_SLIT_STEP * s.slit_width, math.pi / (_K_MARGIN * sigma_k1))
    dy1_max = min(_SLIT_STEP * s.slit_width, math.pi / (_K_MARGIN_MIN * sigma_k1))
    needed1 = m + 6.0 * sigma_r1
    if 0.5 * n1 * dy1 < needed1:
        dy1 = 2.0 * needed1 / n1
    if dy1 > dy1_max:
        n_req = 2 ** math.ceil(math.log2(2.0 * needed1 / dy1_max))
        raise ResourceBoundError(
            f"n1={n1} cannot both resolve axis 1 structure and cover the "
            f"state (needs extent1 >= {needed1:.6g} m at dy1 <= "
            f"{dy1_max:.6g} m; try n1 >= {n_req})"
        )
    extent1 = 0.5 * n1 * dy1

    # axis 2: balance position vs spectral coverage, floor at analysis window
    sigma_r2 = max(
        math.sqrt(cov0[1, 1]), math.sqrt(cov1[1, 1]), 0.5 * math.sqrt(jd.Delta2)
    )
    sigma_k2 = max(sigma_k_src, 1.0 / s.gamma)
    if s.f is not None:
        # the lens shrinks the coherent width sqrt(Re w) and broadens the
        # spectrum accordingly; budget for the post-lens packets (the thin
        # quadratic-phase model is guarded at run time instead)
        lam2 = OpticalDistance(s.lambda2, 0.0).Lambda
        for t in _decomposition_at_lens(s).terms:
            out = lens_transform(
                t.g2, OpticalDistance(s.lambda2, t.g2.width.imag / lam2), s.f
            )
            sigma_k2 = max(sigma_k2, 1.0 / math.sqrt(out.width.real))
    c2 = math.pi * n2 / (2.0 * sigma_k2)
    extent2 = 0.5 * (m + math.sqrt(m * m + 4.0 * sigma_r2 * c2))
    window = max(4.0 * jd.X / s.d, 2.5 * math.sqrt(jd.Delta2) + m)
    extent2 = max(extent2, window)
    margin2 = (extent2 - m) / sigma_r2
    if margin2 < 6.0 or math.pi * n2 / (2.0 * extent2) < 6.0 * sigma_k2:
        raise ResourceBoundError(
            f"n2={n2} cannot cover axis 2 in both position and spectrum "
            f"(position margin {margin2:.2f} sigma)"
        )
    return GridSpec(n1=n1, n2=n2, extent1=extent1, extent2=extent2)


def _decomposition_at_lens(s: Scenario) -> BiGaussianState:
    """Analytic term decomposition of the post-slit state at the lens plane."""
    evolved = BiGaussianState.from_correlated(
        evolve_correlated_exact(
            build_source_state(s).correlated,
            OpticalDistance(s.lambda1, s.L2),
            OpticalDistance(s.lambda2, s.L2),
        )
    )
    od1 = OpticalDistance(s.lambda1, s.L1 - s.f)
    od2 = OpticalDistance(s.lambda2, s.L1 - s.f)
    return BiGaussianState.from_terms(
        ProductTerm(t.amplitude, evolve_free(t.g1, od1), evolve_free(t.g2, od2))
        for t in apply_double_slit(evolved, s).post_slit.terms
    )


def run_pipeline(
    s: Scenario,
    spec: GridSpec | None = None,
    n: int = 2048,
    lens_model: str = "exact",
) -> GridState:
    """Source -> L2 -> double slit -> L1 (with optional lens) on the grid."""
    spec = spec if spec is not None else auto_grid(s, n)
    gs = discretize(build_source_state(s), spec)
    gs = propagate(
        gs, OpticalDistance(s.lambda1, s.L2), OpticalDistance(s.lambda2, s.L2)
    )
    gs = slit_project(gs, s)
    if s.f is None:
        gs = propagate(
            gs, OpticalDistance(s.lambda1, s.L1), OpticalDistance(s.lambda2, s.L1)
        )
    else:
        gs = propagate(
            gs,
            OpticalDistance(s.lambda1, s.L1 - s.f),
            OpticalDistance(s.lambda2, s.L1 - s.f),
        )
        state = _decomposition_at_lens(s) if lens_model == "exact" else None
        gs = lens_apply(gs, s, mode=lens_model, state=state)
        gs = propagate(
            gs, OpticalDistance(s.lambda1, s.f), OpticalDistance(s.lambda2, s.f)
        )
    return gs
