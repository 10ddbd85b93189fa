"""Time-dependent drive accelerations g(t) = (g_x, g_y) in m/s^2.

Every signal exposes, besides pointwise evaluation, an exact expansion of the
complex combination gtilde(t) = g_x + i g_y into exponential-polynomial
pieces: over each piece [a, b],

    gtilde(a + tau) = sum_k  c_k * tau**p_k * exp(i mu_k tau),   0 <= tau <= b - a.

Parametric waveforms produce a single piece; tabulated data produces one
piece per grid interval of its linear interpolant.  The expansion is what the
exact evolution engine and the thermal suppression integrals consume, via
:func:`modal_integral`.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, ParameterError

__all__ = [
    "ForceSignal",
    "Zero",
    "Constant",
    "Sinusoid",
    "SumSignal",
    "Tabulated",
    "circular",
    "modal_integral",
]

# piece: (t_start, t_end, [(coefficient, mu, power), ...]) with local time tau = t - t_start
Piece = tuple[float, float, list[tuple[complex, float, int]]]


def _exp_poly_integral(p: int, mu: float, delta: float) -> complex:
    """integral_0^delta tau**p exp(i mu tau) d tau, stable for mu*delta -> 0.

    Small |mu*delta| uses the series delta**(p+1) * sum_k (i mu delta)^k / (k! (p+k+1));
    otherwise the closed-form recursion in p.
    """
    if delta == 0.0:
        return 0.0 + 0.0j
    z = 1j * mu * delta
    if abs(z) < 0.5:
        term = 1.0 + 0.0j  # z^k / k!
        acc = term / (p + 1)
        for k in range(1, 26):
            term *= z / k
            acc += term / (p + k + 1)
            if abs(term) < 1e-20 * abs(acc):
                break
        return delta ** (p + 1) * acc
    imu = 1j * mu
    val = (np.exp(imu * delta) - 1.0) / imu
    for q in range(1, p + 1):
        val = (delta**q * np.exp(imu * delta) - q * val) / imu
    return complex(val)


class ForceSignal(ABC):
    """Abstract drive; subclasses are immutable value objects."""

    @abstractmethod
    def evaluate(self, t):
        """g at time(s) t: shape (2,) for scalar t, (2, n) for array t."""

    @abstractmethod
    def pieces(self, t0: float, t1: float) -> list[Piece]:
        """Exponential-polynomial expansion of gtilde on [t0, t1]."""

    def spectral_lines(self) -> list[tuple[float, np.ndarray]]:
        """Discrete lines (omega_k, C_k) such that g(t) = sum_k Re[C_k exp(-i omega_k t)].

        Only parametric waveforms have an exact line spectrum; tabulated data
        exposes a windowed transform instead (:meth:`Tabulated.windowed_transform`).
        """
        raise NotImplementedError(f"{type(self).__name__} has no exact line spectrum")

    def _as_2vec(self, gx, gy, t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return np.array([float(gx), float(gy)])
        return np.stack([np.broadcast_to(gx, t.shape), np.broadcast_to(gy, t.shape)])


@dataclass(frozen=True)
class Zero(ForceSignal):
    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        return np.zeros(2) if t.ndim == 0 else np.zeros((2,) + t.shape)

    def pieces(self, t0, t1):
        return [(float(t0), float(t1), [])]

    def spectral_lines(self):
        return []


@dataclass(frozen=True)
class Constant(ForceSignal):
    gx: float
    gy: float = 0.0

    def evaluate(self, t):
        return self._as_2vec(self.gx, self.gy, t)

    def pieces(self, t0, t1):
        return [(float(t0), float(t1), [(complex(self.gx, self.gy), 0.0, 0)])]

    def spectral_lines(self):
        return [(0.0, np.array([self.gx, self.gy], dtype=complex))]


@dataclass(frozen=True)
class Sinusoid(ForceSignal):
    """g(t) = amplitude * cos(omega t + phase); amplitude is a 2-vector."""

    amplitude: tuple[float, float]
    omega: float
    phase: float = 0.0

    def __post_init__(self):
        amp = tuple(float(v) for v in self.amplitude)
        if len(amp) != 2 or not all(math.isfinite(v) for v in amp):
            raise ParameterError(f"amplitude must be a finite 2-vector, got {self.amplitude!r}")
        object.__setattr__(self, "amplitude", amp)
        if self.omega < 0:
            raise ParameterError(f"sinusoid omega must be >= 0, got {self.omega}")

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        c = np.cos(self.omega * t + self.phase)
        ax, ay = self.amplitude
        if t.ndim == 0:
            return np.array([ax * float(c), ay * float(c)])
        return np.stack([ax * c, ay * c])

    def pieces(self, t0, t1):
        ax, ay = self.amplitude
        g0 = complex(ax, ay) / 2.0
        th = self.omega * t0 + self.phase
        terms = [
            (g0 * np.exp(1j * th), self.omega, 0),
            (g0 * np.exp(-1j * th), -self.omega, 0),
        ]
        return [(float(t0), float(t1), terms)]

    def spectral_lines(self):
        ax, ay = self.amplitude
        return [(self.omega, np.array([ax, ay], dtype=complex) * np.exp(-1j * self.phase))]


@dataclass(frozen=True)
class SumSignal(ForceSignal):
    parts: tuple[ForceSignal, ...]

    def __init__(self, parts):
        object.__setattr__(self, "parts", tuple(parts))

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(2) if t.ndim == 0 else np.zeros((2,) + t.shape)
        for p in self.parts:
            out = out + p.evaluate(t)
        return out

    def pieces(self, t0, t1):
        # split at the union of the parts' internal boundaries, then merge terms
        edges = {float(t0), float(t1)}
        for p in self.parts:
            for a, b, _ in p.pieces(t0, t1):
                edges.add(a)
                edges.add(b)
        grid = sorted(edges)
        out: list[Piece] = []
        for a, b in zip(grid[:-1], grid[1:]):
            if b - a <= 0.0:
                continue
            terms: list[tuple[complex, float, int]] = []
            for p in self.parts:
                sub = p.pieces(a, b)
                assert len(sub) == 1, "sub-piece not atomic after edge splitting"
                terms.extend(sub[0][2])
            out.append((a, b, terms))
        return out

    def spectral_lines(self):
        lines: list[tuple[float, np.ndarray]] = []
        for p in self.parts:
            lines.extend(p.spectral_lines())
        return lines


class Tabulated(ForceSignal):
    """Uniformly sampled drive with linear interpolation between samples.

    Evaluation outside the grid raises :class:`CoverageError`.
    """

    def __init__(self, t_start: float, dt: float, values):
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.shape[1] != 2:
            raise ParameterError(f"values must have shape (n, 2), got {values.shape}")
        if values.shape[0] < 2:
            raise ParameterError("tabulated signal needs at least 2 samples")
        if not dt > 0:
            raise ParameterError(f"dt must be > 0, got {dt}")
        self.t_start = float(t_start)
        self.dt = float(dt)
        self.values = values
        self.t_end = self.t_start + (values.shape[0] - 1) * self.dt
        self._slack = 1e-9 * (self.t_end - self.t_start)

    @classmethod
    def from_csv(cls, path) -> "Tabulated":
        """Load a (t, gx[, gy]) table; the time column must be uniform."""
        try:
            data = np.loadtxt(path, delimiter=",")
        except ValueError:
            data = np.loadtxt(path, delimiter=",", skiprows=1)
        data = np.atleast_2d(data)
        if data.shape[1] == 2:
            data = np.column_stack([data, np.zeros(data.shape[0])])
        if data.shape[1] != 3:
            raise ParameterError(f"expected 2 or 3 CSV columns, got {data.shape[1]}")
        t = data[:, 0]
        if t.shape[0] < 2:
            raise ParameterError("tabulated signal needs at least 2 samples")
        steps = np.diff(t)
        if np.any(np.abs(steps - steps[0]) > 1e-9 * max(abs(steps[0]), 1e-300)):
            raise ParameterError("time column is not uniformly spaced")
        return cls(t[0], steps[0], data[:, 1:3])

    def _check_cover(self, lo: float, hi: float) -> None:
        if lo < self.t_start - self._slack or hi > self.t_end + self._slack:
            raise CoverageError(
                f"tabulated signal covers [{self.t_start:.6g}, {self.t_end:.6g}] s, "
                f"requested [{lo:.6g}, {hi:.6g}] s"
            )

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        self._check_cover(float(np.min(t)), float(np.max(t)))
        s = np.clip((t - self.t_start) / self.dt, 0.0, self.values.shape[0] - 1.0)
        i = np.minimum(s.astype(int), self.values.shape[0] - 2)
        w = s - i
        gx = (1.0 - w) * self.values[i, 0] + w * self.values[i + 1, 0]
        gy = (1.0 - w) * self.values[i, 1] + w * self.values[i + 1, 1]
        if t.ndim == 0:
            return np.array([float(gx), float(gy)])
        return np.stack([gx, gy])

    def _gtilde_at(self, t: float) -> complex:
        g = self.evaluate(t)
        return complex(g[0], g[1])

    def pieces(self, t0, t1):
        t0, t1 = float(t0), float(t1)
        self._check_cover(t0, t1)
        # grid nodes strictly inside (t0, t1)
        k_lo = int(math.ceil((t0 - self.t_start) / self.dt - 1e-9))
        k_hi = int(math.floor((t1 - self.t_start) / self.dt + 1e-9))
        nodes = [t0]
        for k in range(k_lo, k_hi + 1):
            tk = self.t_start + k * self.dt
            if t0 + 1e-15 < tk < t1 - 1e-15:
                nodes.append(tk)
        nodes.append(t1)
        out: list[Piece] = []
        for a, b in zip(nodes[:-1], nodes[1:]):
            if b - a <= 0.0:
                continue
            ga, gb = self._gtilde_at(a), self._gtilde_at(b)
            slope = (gb - ga) / (b - a)
            out.append((a, b, [(ga, 0.0, 0), (slope, 0.0, 1)]))
        return out

    def windowed_transform(self, omega):
        """integral over the grid of g(t) exp(i omega t) dt, exact for the interpolant.

        Returns a complex 2-vector per frequency (shape (2,) or (2, n)).
        """
        omegas = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.zeros((2, omegas.shape[0]), dtype=complex)
        pieces = self.pieces(self.t_start, self.t_end)
        for j, w in enumerate(omegas):
            gx = 0.0 + 0.0j
            gt = 0.0 + 0.0j
            for a, b, terms in pieces:
                ph = np.exp(1j * w * a)
                for c, mu, p in terms:
                    val = _exp_poly_integral(p, mu + w, b - a)
                    gt += ph * c * val
                    gx += ph * c.conjugate() * val  # conj(gtilde) carries gx - i gy
            # gtilde = gx + i gy, conj = gx - i gy  =>  gx = (gt + gx)/2, gy = (gt - gx)/2i
            out[0, j] = 0.5 * (gt + gx)
            out[1, j] = (gt - gx) / 2.0j
        return out[:, 0] if np.asarray(omega).ndim == 0 else out


def circular(amplitude: float, omega: float, phase: float = 0.0, sense: int = -1) -> SumSignal:
    """Circularly polarized drive of magnitude ``amplitude`` at ``omega``.

    sense = -1 gives gtilde = amplitude * exp(-i (omega t + phase)), i.e.
    g_x = A cos(omega t + phase), g_y = -A sin(omega t + phase); sense = +1
    rotates the other way.
    """
    if sense not in (+1, -1):
        raise ParameterError(f"sense must be +1 or -1, got {sense}")
    return SumSignal(
        [
            Sinusoid((amplitude, 0.0), omega, phase),
            Sinusoid((0.0, amplitude), omega, phase - sense * math.pi / 2.0),
        ]
    )


def modal_integral(signal: ForceSignal, omega: float, t0: float, t1: float,
                   conjugate: bool = False) -> complex:
    """integral_{t0}^{t1} gtilde(t) exp(i omega (t - t0)) dt, exactly.

    With ``conjugate=True`` the integrand uses conj(gtilde) instead.  This is
    the primitive behind the driven-mode kicks and the thermal gamma factors.
    """
    total = 0.0 + 0.0j
    for a, b, terms in signal.pieces(t0, t1):
        ph = np.exp(1j * omega * (a - t0))
        for c, mu, p in terms:
            if conjugate:
                c, mu = c.conjugate(), -mu
            total += ph * c * _exp_poly_integral(p, mu + omega, b - a)
    return complex(total)
