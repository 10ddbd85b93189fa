"""Exact pulse-sequence engine on spin-labeled coherent-state branches.

Because the Hamiltonian is quadratic for each spin projection, an initial
coherent state stays a finite superposition of coherent states under every
primitive we need: spin rotations about y, sudden trap displacements, and
(driven) free evolution.  A branch is one such coherent state: a spin label
sigma, complex mode amplitudes (alpha_plus, alpha_minus), an accumulated
dynamical phase, and a complex weight from the rotation history.

Conventions fixed here and relied on throughout:

- amplitudes map to the trap-frame center via
      zeta  = l * (alpha_plus + conj(alpha_minus)),
      zeta' = -i sigma l * (omega_plus alpha_plus - omega_minus conj(alpha_minus)),
  the inverse of :func:`mode_decompose`;
- undriven evolution rotates amplitudes as alpha_pm -> exp(-i sigma omega_pm t) alpha_pm;
- the branch phase integrates (m/hbar) g(t) . r(t) along the branch's own
  (driven) center path in the trap frame; branch wave packets are referenced
  to their centers, so displacements and mode zero-point energies contribute
  no phase;
- RotateY(theta) acts as exp(-i theta sigma_y / 2):
      |up>   -> cos(theta/2)|up> + sin(theta/2)|down>,
      |down> -> -sin(theta/2)|up> + cos(theta/2)|down>,
  and a branch changing spin keeps its phase-space center (amplitudes are
  converted through the center because the mode map depends on sigma);
- inter-branch orbital overlaps use the center separation only,
      <b1|b2> = exp(-|zeta_1 - zeta_2|**2 / l**2),
  the magnitude that governs the mirrored-path coherence envelope.
"""

from __future__ import annotations

import cmath
import math
import warnings
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .errors import ParameterError
from .signals import ForceSignal, Zero, _exp_poly_integral, modal_integral
from .trap import NormalModes, PhaseSpacePoint, TrapConfig, _check_sigma, derive_modes

__all__ = [
    "Branch",
    "SpinorCoherentState",
    "RotateY",
    "Displace",
    "Evolve",
    "Readout",
    "PulseSequence",
    "MeasurementRecord",
    "ground_state",
    "mode_decompose",
    "apply_rotation",
    "apply_displacement",
    "apply_evolution",
    "expectation_spin",
    "run_sequence",
    "preset_up",
    "preset_cp",
]

# readout calibration: signal = -<sigma_y>, which is +sin(differential phase)
# for the "up" preset (see run_sequence)
_SIGNAL_SIGN = -1.0

_MERGE_TOL = 1e-12
_PRUNE_TOL = 1e-15


@lru_cache(maxsize=256)
def _modes_cached(config: TrapConfig) -> NormalModes:
    return derive_modes(config)


@dataclass(frozen=True)
class Branch:
    """One spin-labeled coherent-state component of the interferometer state."""

    spin: int
    weight: complex
    alpha_plus: complex
    alpha_minus: complex
    phase: float = 0.0

    def __post_init__(self):
        _check_sigma(self.spin)
        for name in ("weight", "alpha_plus", "alpha_minus", "phase"):
            v = getattr(self, name)
            if not (math.isfinite(complex(v).real) and math.isfinite(complex(v).imag)):
                raise ParameterError(f"Branch.{name} is not finite")

    @property
    def amplitude(self) -> complex:
        """Total complex amplitude weight * exp(i phase)."""
        return self.weight * cmath.exp(1j * self.phase)


@dataclass(frozen=True)
class SpinorCoherentState:
    """Weighted superposition of branches, plus the current trap-frame bookkeeping.

    ``origin`` is the lab-frame position of the trap minimum (branch centers
    are trap-frame); ``time`` is the elapsed sequence time used to window the
    drive signal.
    """

    config: TrapConfig
    branches: tuple[Branch, ...]
    origin: tuple[float, float] = (0.0, 0.0)
    time: float = 0.0

    @property
    def modes(self) -> NormalModes:
        return _modes_cached(self.config)


def ground_state(config: TrapConfig, spin: int = +1) -> SpinorCoherentState:
    """Motional ground state at the trap center with a definite spin."""
    _check_sigma(spin)
    return SpinorCoherentState(
        config=config,
        branches=(Branch(spin=spin, weight=1.0 + 0.0j, alpha_plus=0j, alpha_minus=0j),),
    )


def mode_decompose(config: TrapConfig, sigma: int, point: PhaseSpacePoint):
    """Normal-mode amplitudes (alpha_plus, alpha_minus) of a phase-space point.

    The map diagonalizes the spin-sigma quadratic Hamiltonian: free evolution
    is alpha_pm -> exp(-i sigma omega_pm t) alpha_pm, and the energy above the
    zero point is hbar (omega_plus |alpha_plus|^2 + omega_minus |alpha_minus|^2)
    = m|v|^2/2 + m omega0^2 |r|^2 / 2.
    """
    sigma = _check_sigma(sigma)
    modes = _modes_cached(config)
    zeta = complex(point.x, point.y)
    zdot = complex(point.px, point.py) / config.mass
    return _amplitudes_from_center(modes, sigma, zeta, zdot)


def _amplitudes_from_center(modes: NormalModes, sigma: int, zeta: complex, zdot: complex):
    wp, wm, wt, l = modes.omega_plus, modes.omega_minus, modes.omega_tilde, modes.l_osc
    a_plus = (wm * zeta + 1j * sigma * zdot) / (2.0 * wt * l)
    a_minus = ((wp * zeta - 1j * sigma * zdot) / (2.0 * wt * l)).conjugate()
    return a_plus, a_minus


def _center_from_amplitudes(modes: NormalModes, sigma: int, a_plus: complex, a_minus: complex):
    wp, wm, l = modes.omega_plus, modes.omega_minus, modes.l_osc
    zeta = l * (a_plus + a_minus.conjugate())
    zdot = -1j * sigma * l * (wp * a_plus - wm * a_minus.conjugate())
    return zeta, zdot


def _branch_zeta(modes: NormalModes, b: Branch) -> complex:
    return modes.l_osc * (b.alpha_plus + b.alpha_minus.conjugate())


def _overlap(modes: NormalModes, b1: Branch, b2: Branch) -> float:
    dz = _branch_zeta(modes, b1) - _branch_zeta(modes, b2)
    return math.exp(-(abs(dz) / modes.l_osc) ** 2)


# ---------------------------------------------------------------------------
# primitives


@dataclass(frozen=True)
class RotateY:
    """Spin rotation exp(-i angle sigma_y / 2) about the y axis."""

    angle: float

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise ParameterError("rotation angle must be finite")


@dataclass(frozen=True)
class Displace:
    """Sudden displacement of the trap minimum by ``shift`` (lab meters)."""

    shift: tuple[float, float]

    def __post_init__(self):
        s = tuple(float(v) for v in self.shift)
        if len(s) != 2 or not all(math.isfinite(v) for v in s):
            raise ParameterError(f"shift must be a finite 2-vector, got {self.shift!r}")
        object.__setattr__(self, "shift", s)


@dataclass(frozen=True)
class Evolve:
    """Free evolution for ``duration`` under a drive (None = sequence drive).

    mode "exact" evolves amplitudes and phase with the full driven-oscillator
    solution; "first_order" keeps the undriven amplitudes and accumulates only
    the phase linear in the drive along the undriven path.
    """

    duration: float
    drive: ForceSignal | None = None
    mode: str = "exact"

    def __post_init__(self):
        if not (math.isfinite(self.duration) and self.duration >= 0):
            raise ParameterError(f"Evolve duration must be >= 0, got {self.duration}")
        if self.mode not in ("exact", "first_order"):
            raise ParameterError(f"Evolve mode must be 'exact' or 'first_order', got {self.mode!r}")


@dataclass(frozen=True)
class Readout:
    """Terminal spin measurement along ``axis`` in {x, y, z}."""

    axis: str = "z"

    def __post_init__(self):
        if self.axis not in ("x", "y", "z"):
            raise ParameterError(f"Readout axis must be one of x, y, z, got {self.axis!r}")


PulsePrimitive = RotateY | Displace | Evolve | Readout


@dataclass(frozen=True)
class PulseSequence:
    """Ordered primitives; at most one Readout, and it must be terminal."""

    steps: tuple[PulsePrimitive, ...]
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for i, s in enumerate(self.steps):
            if isinstance(s, Readout) and i != len(self.steps) - 1:
                raise ParameterError("Readout must be the terminal primitive")
            if not isinstance(s, (RotateY, Displace, Evolve, Readout)):
                raise ParameterError(f"unknown pulse primitive {s!r}")

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)


# ---------------------------------------------------------------------------
# rotation / displacement


def apply_rotation(state: SpinorCoherentState, angle: float) -> SpinorCoherentState:
    """Apply exp(-i angle sigma_y / 2) to every branch.

    Branches that change spin keep their phase-space center; their amplitudes
    are re-derived for the new spin's mode map.  Copies with matching spin,
    amplitudes, and phase (within 1e-12) merge by weight addition; weights
    below 1e-15 are pruned.
    """
    c = math.cos(angle / 2.0)
    s = math.sin(angle / 2.0)
    modes = state.modes
    out: list[Branch] = []
    for b in state.branches:
        # columns of [[c, -s], [s, c]] in the (up, down) basis
        if b.spin == +1:
            parts = ((+1, c), (-1, s))
        else:
            parts = ((+1, -s), (-1, c))
        flipped = None
        for new_spin, factor in parts:
            if abs(factor * b.weight) < _PRUNE_TOL:
                continue
            if new_spin == b.spin:
                out.append(replace(b, weight=factor * b.weight))
            else:
                if flipped is None:
                    zeta, zdot = _center_from_amplitudes(modes, b.spin, b.alpha_plus, b.alpha_minus)
                    flipped = _amplitudes_from_center(modes, new_spin, zeta, zdot)
                out.append(
                    Branch(
                        spin=new_spin,
                        weight=factor * b.weight,
                        alpha_plus=flipped[0],
                        alpha_minus=flipped[1],
                        phase=b.phase,
                    )
                )
    return replace(state, branches=_merge_branches(out))


def _merge_branches(branches: list[Branch]) -> tuple[Branch, ...]:
    merged: list[Branch] = []
    for b in branches:
        for i, m in enumerate(merged):
            if (
                m.spin == b.spin
                and abs(m.alpha_plus - b.alpha_plus) <= _MERGE_TOL
                and abs(m.alpha_minus - b.alpha_minus) <= _MERGE_TOL
                and abs(m.phase - b.phase) <= _MERGE_TOL
            ):
                merged[i] = replace(m, weight=m.weight + b.weight)
                break
        else:
            merged.append(b)
    return tuple(m for m in merged if abs(m.weight) >= _PRUNE_TOL)


def apply_displacement(state: SpinorCoherentState, shift) -> SpinorCoherentState:
    """Move the trap minimum by ``shift``; branch centers shift by -shift in the new frame."""
    sx, sy = (float(shift[0]), float(shift[1]))
    if not (math.isfinite(sx) and math.isfinite(sy)):
        raise ParameterError(f"shift must be finite, got {shift!r}")
    modes = state.modes
    stilde = complex(sx, sy)
    wp, wm, wt, l = modes.omega_plus, modes.omega_minus, modes.omega_tilde, modes.l_osc
    d_plus = -wm * stilde / (2.0 * wt * l)
    d_minus = -(wp * stilde).conjugate() / (2.0 * wt * l)
    branches = tuple(
        replace(b, alpha_plus=b.alpha_plus + d_plus, alpha_minus=b.alpha_minus + d_minus)
        for b in state.branches
    )
    return replace(
        state,
        branches=branches,
        origin=(state.origin[0] + sx, state.origin[1] + sy),
    )


# ---------------------------------------------------------------------------
# driven evolution

# Per (drive, config, sigma, window) the exact evolution is affine in the
# initial amplitudes and quadratic in the drive; these coefficients capture it:
#   alpha_pm' = rot_pm * (alpha_pm + kick_pm)
#   phase    += Re[p_lin * alpha_plus + q_lin * conj(alpha_minus)] + phase_g2
@dataclass(frozen=True)
class _SegmentCoeffs:
    rot_plus: complex
    rot_minus: complex
    kick_plus: complex
    kick_minus: complex
    p_lin: complex
    q_lin: complex
    phase_g2: float


_SEGMENT_CACHE: OrderedDict = OrderedDict()
_SEGMENT_CACHE_MAX = 4096


@lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _running_modal(pieces, nu: float, t0: float, taus: np.ndarray) -> np.ndarray:
    """J(tau) = integral_0^tau gtilde(t0 + s) exp(-i nu s) ds at sorted taus."""
    out = np.empty(taus.shape[0], dtype=complex)
    prefix = 0.0 + 0.0j
    idx = 0
    slack = 1e-12 * max((b - t0) for _, b, _ in pieces) if pieces else 0.0
    for a, b, terms in pieces:
        while idx < taus.shape[0] and taus[idx] <= (b - t0) + slack:
            local = min(max(taus[idx] - (a - t0), 0.0), b - a)
            ph = cmath.exp(-1j * nu * (a - t0))
            val = sum(c * _exp_poly_integral(p, mu - nu, local) for c, mu, p in terms)
            out[idx] = prefix + ph * val
            idx += 1
        ph = cmath.exp(-1j * nu * (a - t0))
        prefix += ph * sum(c * _exp_poly_integral(p, mu - nu, b - a) for c, mu, p in terms)
    while idx < taus.shape[0]:
        out[idx] = prefix
        idx += 1
    return out


def _phase_g2(config: TrapConfig, modes: NormalModes, sigma: int, pieces, t0: float) -> float:
    """(m/hbar) integral Re[conj(gtilde) zeta_d] over the segment.

    zeta_d is the zero-initial-condition driven response
    (exp(i nu1 tau) J_nu1 - exp(i nu2 tau) J_nu2) / (2 i omega_tilde) with
    (nu1, nu2) the spin-sigma mode exponents.  Gauss-Legendre per drive piece;
    node count scales with the piece's phase span so oscillatory integrands
    stay resolved.
    """
    wp, wm, wt = modes.omega_plus, modes.omega_minus, modes.omega_tilde
    if sigma == +1:
        nu1, nu2 = wm, -wp
    else:
        nu1, nu2 = wp, -wm

    taus_all: list[np.ndarray] = []
    gvals_all: list[np.ndarray] = []
    wts_all: list[np.ndarray] = []
    for a, b, terms in pieces:
        if not terms or b - a <= 0.0:
            continue
        fmax = max(abs(mu) for _, mu, _ in terms) + wp
        n = int(0.75 * (b - a) * fmax) + 24
        n = min(256, 8 * ((n + 7) // 8))
        x, w = _leggauss(n)
        half = 0.5 * (b - a)
        local = half * (x + 1.0)
        g = np.zeros(n, dtype=complex)
        for c, mu, p in terms:
            g += c * local**p * np.exp(1j * mu * local)
        taus_all.append((a - t0) + local)
        gvals_all.append(g)
        wts_all.append(half * w)
    if not taus_all:
        return 0.0
    taus = np.concatenate(taus_all)
    gvals = np.concatenate(gvals_all)
    wts = np.concatenate(wts_all)

    j1 = _running_modal(pieces, nu1, t0, taus)
    j2 = _running_modal(pieces, nu2, t0, taus)
    zeta_d = (np.exp(1j * nu1 * taus) * j1 - np.exp(1j * nu2 * taus) * j2) / (2j * wt)
    val = float(np.sum(wts * np.real(np.conj(gvals) * zeta_d)))
    return (config.mass / config.hbar) * val


def _segment_coeffs(
    config: TrapConfig, sigma: int, drive: ForceSignal, t_start: float, duration: float
) -> _SegmentCoeffs:
    key = (drive, config, sigma, t_start, duration)
    try:
        cached = _SEGMENT_CACHE.get(key)
    except TypeError:  # unhashable custom signal: compute without caching
        cached = None
        key = None
    if cached is not None:
        return cached

    modes = _modes_cached(config)
    wp, wm, wt, l = modes.omega_plus, modes.omega_minus, modes.omega_tilde, modes.l_osc
    t_end = t_start + duration
    m_plus = modal_integral(drive, sigma * wp, t_start, t_end)
    m_minus = modal_integral(drive, sigma * wm, t_start, t_end, conjugate=True)
    scale = sigma * 1j / (2.0 * wt * l)
    mh = config.mass / config.hbar
    pieces = drive.pieces(t_start, t_end)
    coeffs = _SegmentCoeffs(
        rot_plus=cmath.exp(-1j * sigma * wp * duration),
        rot_minus=cmath.exp(-1j * sigma * wm * duration),
        kick_plus=scale * m_plus,
        kick_minus=scale * m_minus,
        p_lin=mh * l * m_plus.conjugate(),
        q_lin=mh * l * m_minus,
        phase_g2=_phase_g2(config, modes, sigma, pieces, t_start),
    )
    if key is not None:
        _SEGMENT_CACHE[key] = coeffs
        if len(_SEGMENT_CACHE) > _SEGMENT_CACHE_MAX:
            _SEGMENT_CACHE.popitem(last=False)
    return coeffs


def apply_evolution(
    state: SpinorCoherentState,
    duration: float,
    drive: ForceSignal | None = None,
    mode: str = "exact",
) -> SpinorCoherentState:
    """Evolve every branch for ``duration`` under the trap plus optional drive.

    exact mode: amplitudes follow the driven-oscillator solution (mode
    rotation plus a drive kick) and the phase accumulates the full
    (m/hbar) integral g . r along the driven center path, which is quadratic
    in the drive.  first_order mode: undriven amplitudes, phase keeps only the
    part linear in the drive (evaluated along the undriven path).  With no
    drive both reduce to pure mode rotation and zero phase.
    """
    if not (math.isfinite(duration) and duration >= 0):
        raise ParameterError(f"duration must be >= 0, got {duration}")
    if mode not in ("exact", "first_order"):
        raise ParameterError(f"mode must be 'exact' or 'first_order', got {mode!r}")
    if duration == 0.0:
        return state
    if drive is None:
        drive = Zero()

    new_branches = []
    per_sigma: dict[int, _SegmentCoeffs] = {}
    for b in state.branches:
        cf = per_sigma.get(b.spin)
        if cf is None:
            cf = _segment_coeffs(state.config, b.spin, drive, state.time, duration)
            per_sigma[b.spin] = cf
        dphase = (cf.p_lin * b.alpha_plus + cf.q_lin * b.alpha_minus.conjugate()).real
        if mode == "exact":
            new_branches.append(
                replace(
                    b,
                    alpha_plus=cf.rot_plus * (b.alpha_plus + cf.kick_plus),
                    alpha_minus=cf.rot_minus * (b.alpha_minus + cf.kick_minus),
                    phase=b.phase + dphase + cf.phase_g2,
                )
            )
        else:
            new_branches.append(
                replace(
                    b,
                    alpha_plus=cf.rot_plus * b.alpha_plus,
                    alpha_minus=cf.rot_minus * b.alpha_minus,
                    phase=b.phase + dphase,
                )
            )
    return replace(state, branches=tuple(new_branches), time=state.time + duration)


# ---------------------------------------------------------------------------
# readout


def _gram_sums(state: SpinorCoherentState):
    """(up-block norm, down-block norm, up-down cross sum) with orbital overlaps."""
    modes = state.modes
    ups = [b for b in state.branches if b.spin == +1]
    downs = [b for b in state.branches if b.spin == -1]

    def block(rows, cols):
        tot = 0.0 + 0.0j
        for a in rows:
            for b in cols:
                tot += a.amplitude.conjugate() * b.amplitude * _overlap(modes, a, b)
        return tot

    return block(ups, ups).real, block(downs, downs).real, block(ups, downs)


def expectation_spin(state: SpinorCoherentState, axis: str) -> float:
    """Exact spin expectation along axis in {x, y, z}, overlap factors included."""
    if axis not in ("x", "y", "z"):
        raise ParameterError(f"axis must be one of x, y, z, got {axis!r}")
    n_up, n_down, cross = _gram_sums(state)
    norm = n_up + n_down
    if norm < 1e-300:
        raise ParameterError("state has zero norm")
    if axis == "z":
        return (n_up - n_down) / norm
    if axis == "x":
        return 2.0 * cross.real / norm
    return 2.0 * cross.imag / norm


@dataclass(frozen=True)
class MeasurementRecord:
    """Readout result plus diagnostics.

    ``signal`` is calibrated so a weak drive in the "up" preset gives
    +sin(differential phase); ``coherence`` and ``phase`` describe the spin
    off-diagonal element before the final recombination rotation (when the
    sequence has one), so coherence is the orbital-overlap envelope and
    signal = coherence * sin(phase).  ``expectations`` holds the raw x/y/z
    spin expectations of the final state; ``expectation`` is the one along
    the requested readout axis (None when the sequence has no Readout).
    """

    signal: float
    coherence: float
    phase: float
    expectation: float | None
    axis: str | None
    expectations: dict[str, float]
    norm: float
    trace: tuple
    state: SpinorCoherentState


def _coherence_record(state: SpinorCoherentState):
    n_up, n_down, cross = _gram_sums(state)
    norm = n_up + n_down
    if norm < 1e-300:
        raise ParameterError("state has zero norm")
    coherence = 2.0 * abs(cross) / norm
    phase = -cmath.phase(cross) if cross != 0 else 0.0
    signal = _SIGNAL_SIGN * 2.0 * cross.imag / norm
    return signal, coherence, phase, norm


def run_sequence(
    config: TrapConfig,
    initial,
    sequence: PulseSequence,
    drive: ForceSignal | None = None,
) -> MeasurementRecord:
    """Apply a pulse sequence and return the measurement record.

    ``initial`` may be None (motional ground state, spin up), a
    PhaseSpacePoint (spin-up coherent state at that point), or a full
    SpinorCoherentState.  ``drive`` is used by Evolve steps that do not carry
    their own.  The signal convention: for the "up" preset with a weak drive,
    signal = sin[2 (m/hbar) integral (zhat x r0) . g(t') h_perp(t') dt'];
    coherence and phase refer to the pre-recombination spin coherence, so the
    identity signal = coherence * sin(phase) holds.
    """
    if initial is None:
        state = ground_state(config)
    elif isinstance(initial, PhaseSpacePoint):
        ap, am = mode_decompose(config, +1, initial)
        state = SpinorCoherentState(
            config=config,
            branches=(Branch(spin=+1, weight=1.0 + 0.0j, alpha_plus=ap, alpha_minus=am),),
        )
    elif isinstance(initial, SpinorCoherentState):
        if initial.config != config:
            raise ParameterError("initial state was built for a different trap config")
        state = initial
    else:
        raise ParameterError(f"unsupported initial state {initial!r}")

    trace = [("init", state.time, state.branches)]
    pre_rotation = None  # state just before the most recent RotateY
    axis = None
    for step in sequence:
        if isinstance(step, RotateY):
            pre_rotation = state
            state = apply_rotation(state, step.angle)
        elif isinstance(step, Displace):
            state = apply_displacement(state, step.shift)
            pre_rotation = None
        elif isinstance(step, Evolve):
            state = apply_evolution(
                state, step.duration, step.drive if step.drive is not None else drive, step.mode
            )
            pre_rotation = None
        elif isinstance(step, Readout):
            axis = step.axis
        else:
            raise ParameterError(f"unknown pulse primitive {step!r}")
        trace.append((type(step).__name__, state.time, state.branches))

    # coherence diagnostics come from just before the recombination rotation
    # when the sequence ends with one; <sigma_y> is invariant under RotateY,
    # so the signal is the same either way
    coh_state = pre_rotation if pre_rotation is not None else state
    signal, coherence, phase, _ = _coherence_record(coh_state)

    n_up, n_down, cross = _gram_sums(state)
    norm = n_up + n_down
    expectations = {
        "z": (n_up - n_down) / norm,
        "x": 2.0 * cross.real / norm,
        "y": 2.0 * cross.imag / norm,
    }
    return MeasurementRecord(
        signal=signal,
        coherence=coherence,
        phase=phase,
        expectation=expectations[axis] if axis is not None else None,
        axis=axis,
        expectations=expectations,
        norm=norm,
        trace=tuple(trace),
        state=state,
    )


# ---------------------------------------------------------------------------
# presets


def preset_up(r0, t: float) -> PulseSequence:
    """Split, displace by r0, evolve for t, recombine, read out along z."""
    if not t > 0:
        raise ParameterError(f"t must be > 0, got {t}")
    return PulseSequence(
        steps=(
            RotateY(math.pi / 2.0),
            Displace(tuple(float(v) for v in r0)),
            Evolve(t),
            RotateY(-math.pi / 2.0),
            Readout("z"),
        ),
        name="up",
    )


def preset_cp(r0, t: float, modes: NormalModes | None = None) -> PulseSequence:
    """Spin-echo variant: pi flips at t and 3t, total interrogation 4t.

    The pi pulses time-reverse the orbital motion only when applied at
    velocity-zero times t = pi n / omega_tilde; pass ``modes`` to get a
    warning when t is not one.
    """
    if not t > 0:
        raise ParameterError(f"t must be > 0, got {t}")
    if modes is not None:
        n_half = t * modes.omega_tilde / math.pi
        if abs(n_half - round(n_half)) > 1e-6 * max(n_half, 1.0):
            warnings.warn(
                f"t = {t:.6g} s is not a velocity-zero time pi n / omega_tilde; "
                "the pi pulses will not time-reverse the orbits",
                stacklevel=2,
            )
    return PulseSequence(
        steps=(
            RotateY(math.pi / 2.0),
            Displace(tuple(float(v) for v in r0)),
            Evolve(t),
            RotateY(math.pi),
            Evolve(2.0 * t),
            RotateY(math.pi),
            Evolve(t),
            RotateY(-math.pi / 2.0),
            Readout("z"),
        ),
        name="cp",
    )
