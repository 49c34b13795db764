"""Time-dependent drive amplitudes and their asymptotic-ratio diagnostics.

All shapes evaluate in units of the reference Rabi frequency; time arguments
are absolute (inverse reference-frequency units) while shape centers and
widths are expressed in units of the pulse time scale tau, so a schedule is
only meaningful together with the tau it was built for. PulseSchedule
therefore carries tau.

The transfer protocols are controlled by the weighted pulse ratio

    r(t) = g_B(t) * Omega_A(t) / (g_A(t) * Omega_B(t))

which must start at 0 for the state to begin in |g_a,g_0,0,0>, diverge at
late times for complete transfer (qubit target), or settle at inverse value
1/2 for the balanced three-way split (qutrit target).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

EPS_RATIO_DEFAULT = 1e-3


@dataclass(frozen=True)
class PulseShape:
    kind: str  # constant | gaussian | sum
    amplitude: float = 0.0
    center: float = 0.0  # units of tau
    width_divisor: float = 2.0  # envelope exp[-(t - center*tau)^2 / (d*tau^2)]
    terms: tuple = ()

    def __post_init__(self):
        if self.kind not in ("constant", "gaussian", "sum"):
            raise ConfigError(f"pulse kind: unknown value {self.kind!r}")
        if self.kind == "sum":
            if len(self.terms) < 2:
                raise ConfigError("pulse terms: a sum shape needs at least 2 terms")
        else:
            if self.amplitude < 0:
                raise ConfigError(f"pulse amplitude: must be >= 0, got {self.amplitude}")
            if self.kind == "gaussian" and self.width_divisor <= 0:
                raise ConfigError(
                    f"pulse width_divisor: must be > 0, got {self.width_divisor}"
                )

    def value(self, t, tau: float):
        """Evaluate at absolute time t (scalar or array)."""
        if self.kind == "constant":
            return self.amplitude * np.ones_like(np.asarray(t, dtype=float))
        if self.kind == "gaussian":
            dt = np.asarray(t, dtype=float) - self.center * tau
            return self.amplitude * np.exp(-(dt * dt) / (self.width_divisor * tau * tau))
        return sum(term.value(t, tau) for term in self.terms)

    def describe(self) -> dict:
        if self.kind == "sum":
            return {"kind": "sum", "terms": [s.describe() for s in self.terms]}
        out = {"kind": self.kind, "amplitude": self.amplitude}
        if self.kind == "gaussian":
            out["center"] = self.center
            out["width_divisor"] = self.width_divisor
        return out


def constant(amplitude: float) -> PulseShape:
    return PulseShape(kind="constant", amplitude=amplitude)


def gaussian(amplitude: float, center: float, width_divisor: float) -> PulseShape:
    return PulseShape(
        kind="gaussian", amplitude=amplitude, center=center, width_divisor=width_divisor
    )


@dataclass(frozen=True)
class PulseSchedule:
    omega_a: PulseShape
    omega_b: PulseShape
    g_a: PulseShape
    g_b: PulseShape
    tau: float = 1.0

    def evaluate(self, t):
        """(Omega_A, Omega_B, g_A, g_B) at absolute time t (scalar or array)."""
        return (
            self.omega_a.value(t, self.tau),
            self.omega_b.value(t, self.tau),
            self.g_a.value(t, self.tau),
            self.g_b.value(t, self.tau),
        )

    def describe(self) -> dict:
        return {
            "omega_A": self.omega_a.describe(),
            "omega_B": self.omega_b.describe(),
            "g_A": self.g_a.describe(),
            "g_B": self.g_b.describe(),
            "tau": self.tau,
        }


def evaluate(schedule: PulseSchedule, t):
    return schedule.evaluate(t)


def preset_stirap(params) -> PulseSchedule:
    """Counterintuitive Gaussian pair: Omega_B peaks at 0, Omega_A at t0 later."""
    d = params.width_divisor
    return PulseSchedule(
        omega_a=gaussian(1.0, params.t0, d),
        omega_b=gaussian(1.0, 0.0, d),
        g_a=constant(params.g),
        g_b=constant(params.g),
        tau=params.tau,
    )


def preset_fstirap(params) -> PulseSchedule:
    """Fractional variant: the delayed pulse gains a half-amplitude copy of the
    early envelope, so the pair is meant to die off at a fixed ratio."""
    d = params.width_divisor
    return PulseSchedule(
        omega_a=PulseShape(
            kind="sum",
            terms=(gaussian(1.0, params.t0, d), gaussian(0.5, 0.0, d)),
        ),
        omega_b=gaussian(1.0, 0.0, d),
        g_a=constant(params.g),
        g_b=constant(params.g),
        tau=params.tau,
    )


def zero_schedule(tau: float = 1.0) -> PulseSchedule:
    return PulseSchedule(constant(0.0), constant(0.0), constant(0.0), constant(0.0), tau)


def random_schedule(seed: int, tau: float = 1.0) -> PulseSchedule:
    """Seeded random schedule: Gaussian drives, constant couplings.

    Amplitude/center/width ranges loosely bracket the preset regime; the
    point is reproducible structural checks, not physical plausibility.
    """
    rng = np.random.default_rng(seed)

    def rand_drive():
        return gaussian(
            amplitude=float(rng.uniform(0.1, 2.0)),
            center=float(rng.uniform(-2.0, 4.0)),
            width_divisor=float(rng.uniform(0.5, 8.0)),
        )

    return PulseSchedule(
        omega_a=rand_drive(),
        omega_b=rand_drive(),
        g_a=constant(float(rng.uniform(1.0, 8.0))),
        g_b=constant(float(rng.uniform(1.0, 8.0))),
        tau=tau,
    )


def _quotient(num, den):
    """Pointwise num/den with NaN where both vanish and inf where only den does."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    out = np.full(num.shape, np.nan)
    both_zero = (num == 0.0) & (den == 0.0)
    div_zero = (den == 0.0) & ~both_zero
    ok = ~both_zero & ~div_zero
    out[ok] = num[ok] / den[ok]
    out[div_zero] = np.inf
    return out


def pump_stokes_ratio(schedule: PulseSchedule, t):
    """r(t) = g_B Omega_A / (g_A Omega_B); NaN where both products vanish."""
    oa, ob, ga, gb = schedule.evaluate(t)
    return _quotient(gb * oa, ga * ob)


def stokes_pump_ratio(schedule: PulseSchedule, t):
    """1/r(t) = g_A Omega_B / (g_B Omega_A); NaN where both products vanish."""
    oa, ob, ga, gb = schedule.evaluate(t)
    return _quotient(ga * ob, gb * oa)


@dataclass
class RatioReport:
    window: tuple
    r_start: float | None
    r_end: float | None
    r_min: float | None
    r_max: float | None
    crossings: dict = field(default_factory=dict)  # target -> tuple of times
    conditions: dict = field(default_factory=dict)
    eps_ratio: float = EPS_RATIO_DEFAULT
    n_undefined: int = 0

    def describe(self) -> dict:
        return {
            "window": list(self.window),
            "r_start": self.r_start,
            "r_end": self.r_end,
            "r_min": self.r_min,
            "r_max": self.r_max,
            "crossings": {str(k): list(v) for k, v in self.crossings.items()},
            "conditions": dict(self.conditions),
            "eps_ratio": self.eps_ratio,
            "n_undefined": self.n_undefined,
        }


def _refine_crossing(f, lo, hi, flo, fhi, iters=80):
    # plain bisection; callers guarantee a sign change on [lo, hi]
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (flo < 0) != (fmid < 0):
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def _grid_crossings(ts, values, target, f):
    hits = []
    for i in range(len(ts) - 1):
        a, b = values[i], values[i + 1]
        if not (math.isfinite(a) and math.isfinite(b)):
            continue
        fa, fb = a - target, b - target
        if fa == 0.0:
            hits.append(float(ts[i]))
        elif (fa < 0) != (fb < 0):
            hits.append(
                _refine_crossing(lambda t: f(t) - target, ts[i], ts[i + 1], fa, fb)
            )
    if values.size and math.isfinite(values[-1]) and values[-1] == target:
        hits.append(float(ts[-1]))
    return tuple(hits)


def ratio_diagnostics(
    schedule: PulseSchedule,
    window: tuple,
    n_grid: int = 1001,
    eps_ratio: float = EPS_RATIO_DEFAULT,
    targets=(0.5, 1.0, 2.0),
) -> RatioReport:
    """Characterize r(t) over a finite window.

    Reports endpoint values (None where both pulse products vanish), extrema
    over the defined grid points, crossing times of r with each target, and
    whether each asymptotic design condition holds at the window ends:

      early_ratio_zero    r(start) <= eps        (state begins dark at P1)
      late_inverse_zero   1/r(end) <= eps        (complete transfer, qubit)
      late_inverse_half   |1/r(end) - 1/2| <= eps (balanced split, qutrit)
    """
    t0, t1 = window
    ts = np.linspace(t0, t1, n_grid)
    r = pump_stokes_ratio(schedule, ts)
    finite = np.isfinite(r)
    r_start = None if not math.isfinite(r[0]) else float(r[0])
    r_end = None if not math.isfinite(r[-1]) else float(r[-1])

    inv_end = stokes_pump_ratio(schedule, np.array([t1]))[0]
    conditions = {
        "early_ratio_zero": r_start is not None and r_start <= eps_ratio,
        "late_inverse_zero": math.isfinite(inv_end) and inv_end <= eps_ratio,
        "late_inverse_half": math.isfinite(inv_end)
        and abs(inv_end - 0.5) <= eps_ratio,
    }
    # an endpoint exactly at infinity still satisfies the divergence condition
    if r is not None and np.isinf(r[-1]) and r[-1] > 0:
        conditions["late_inverse_zero"] = True

    crossings = {
        float(target): _grid_crossings(
            ts, r, target, lambda t: float(pump_stokes_ratio(schedule, t))
        )
        for target in targets
    }
    return RatioReport(
        window=(float(t0), float(t1)),
        r_start=r_start,
        r_end=r_end,
        r_min=float(np.min(r[finite])) if finite.any() else None,
        r_max=float(np.max(r[finite])) if finite.any() else None,
        crossings=crossings,
        conditions=conditions,
        eps_ratio=eps_ratio,
        n_undefined=int(np.sum(~finite)),
    )


def ratio_crossing(
    schedule: PulseSchedule, window: tuple, target: float = 0.5, n_grid: int = 2001
):
    """First time in the window where g_A Omega_B / (g_B Omega_A) equals target.

    Returns None when the inverse ratio never meets the target on the window.
    """
    ts = np.linspace(window[0], window[1], n_grid)
    q = stokes_pump_ratio(schedule, ts)
    hits = _grid_crossings(
        ts, q, target, lambda t: float(stokes_pump_ratio(schedule, t))
    )
    return hits[0] if hits else None
