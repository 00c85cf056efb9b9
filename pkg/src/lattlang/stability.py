"""Stability times of projector traces and polynomial/exponential scaling.

For a trace p(0..T) and tolerance 2^-m the stability time is the smallest
τ such that every pair of values in the window (τ, T] differs by less than
the tolerance.  The limit itself is never observed, so the estimator works
on a finite horizon, doubles it while the answer is censored, and reports a
censored value rather than guessing.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import least_squares

from .dynamics import Trace, build_counter, build_writer, counter_overflow_time, probability_trace
from .hilbert import IntervalProjector, StateVector, blank_label, restricted_distribution


@dataclass(frozen=True, order=False)
class TauEstimate:
    n: int
    m: int
    value: int | None          # None when censored
    horizon: int

    @property
    def censored(self) -> bool:
        return self.value is None

    def rank(self) -> float:
        """Sort key in which a censored estimate dominates any finite one."""
        return math.inf if self.value is None else self.value

    def __str__(self):
        return f"Censored({self.horizon})" if self.censored else str(self.value)


def min_window(T: int) -> int:
    """Points a stable window must span before a horizon-T estimate is trusted."""
    return max(2, (T + 1) // 2)


def estimate_tau(trace: Trace | Sequence[float], m: int, n: int = 0) -> TauEstimate:
    """Smallest τ with |p(t) - p(t')| < 2^-m for all t, t' in (τ, T].

    Censored when the stable window is shorter than :func:`min_window`.
    """
    values = trace.values if isinstance(trace, Trace) else [float(v) for v in trace]
    T = len(values) - 1
    if T < 2:
        raise ValueError("trace needs at least three points (T >= 2)")
    if m < 1:
        raise ValueError("tolerance exponent m must be at least 1")
    tol = 2.0 ** -m
    hi = lo = values[T]
    tau = T - 1
    # walk the window start left while the suffix stays within tolerance
    for t in range(T - 1, 0, -1):
        hi, lo = max(hi, values[t]), min(lo, values[t])
        if hi - lo >= tol:
            break
        tau = t - 1
    if T - tau < min_window(T):
        return TauEstimate(n, m, None, T)
    return TauEstimate(n, m, tau, T)


@dataclass
class TauTable:
    entries: dict[tuple[int, int], TauEstimate] = field(default_factory=dict)
    per_string: dict[tuple[int, int], list[tuple[tuple[str, ...], TauEstimate]]] = field(default_factory=dict)
    dynamics_id: str = ""

    @property
    def all_censored(self) -> bool:
        return bool(self.entries) and all(e.censored for e in self.entries.values())

    @property
    def n_values(self) -> list[int]:
        return sorted({n for n, _ in self.entries})

    @property
    def m_values(self) -> list[int]:
        return sorted({m for _, m in self.entries})

    def value(self, n: int, m: int) -> int | None:
        return self.entries[(n, m)].value

    def series(self, m: int) -> list[tuple[int, int]]:
        return [(n, e.value) for (n, mm), e in sorted(self.entries.items()) if mm == m and not e.censored]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "m", "tau", "censored", "horizon"])
        for (n, m), e in sorted(self.entries.items()):
            w.writerow([n, m, "" if e.censored else e.value, int(e.censored), e.horizon])
        return buf.getvalue()

    @classmethod
    def from_values(cls, values: Mapping[tuple[int, int], int | None], horizon: int = 0,
                    dynamics_id: str = "synthetic") -> "TauTable":
        return cls({(n, m): TauEstimate(n, m, v, horizon) for (n, m), v in values.items()},
                   dynamics_id=dynamics_id)


TraceSource = Callable[[int, tuple[str, ...], int], Trace]


def tau_table(source: TraceSource, strings: Mapping[int, Iterable[Sequence[str]]], m_list: Sequence[int],
              horizon: int | Callable[[int], int] = 16, horizon_cap: int = 4096,
              dynamics_id: str = "") -> TauTable:
    """τ(n, m) = max over the supplied strings s of length n of τ(n, s, m).

    ``source(n, s, T)`` returns the trace for string ``s`` up to horizon T.
    The horizon (an int, or a function of n) doubles while any estimate for
    that string is censored.  A trace that has not started moving within the
    horizon looks stable, so the starting horizon must reach past the first
    change.
    """
    if not strings:
        raise ValueError("need at least one string length")
    n_list = sorted(strings)
    table = TauTable(dynamics_id=dynamics_id)
    for n in n_list:
        best: dict[int, TauEstimate] = {}
        for s in strings[n]:
            s = tuple(s)
            T = horizon(n) if callable(horizon) else horizon
            while True:
                trace = source(n, s, T)
                ests = {m: estimate_tau(trace, m, n) for m in m_list}
                if not any(e.censored for e in ests.values()) or 2 * T > horizon_cap:
                    break
                T *= 2
            for m, e in ests.items():
                table.per_string.setdefault((n, m), []).append((s, e))
                if m not in best or e.rank() > best[m].rank():
                    best[m] = e
        for m, e in best.items():
            table.entries[(n, m)] = e
    return table


def writer_source(bound: int | None = None) -> TraceSource:
    """Trace source for the sweep-writer family: writer for s, projector on s."""
    cache = {}

    def source(n: int, s: tuple[str, ...], T: int) -> Trace:
        key = (s, T)
        if key not in cache:
            L = bound if bound is not None else max(12, n + T + 1)
            U = build_writer("".join(s), bound=L, depth=min(L, T + 1))
            psi0 = StateVector.basis(U.space, blank_label())
            cache[key] = probability_trace(psi0, U, IntervalProjector.for_word(s), T)
        return cache[key]

    return source


def counter_source() -> TraceSource:
    """Trace source for the counter control: projector on n zeros at 0..n-1.

    The string argument is ignored; the counter always settles on all zeros.
    Pair it with :func:`counter_horizon`.
    """
    cache = {}

    def source(n: int, s: tuple[str, ...], T: int) -> Trace:
        if (n, T) not in cache:
            U = build_counter(n)
            psi0 = StateVector.basis(U.space, blank_label())
            cache[(n, T)] = probability_trace(psi0, U, IntervalProjector.for_word("0" * n), T)
        return cache[(n, T)]

    return source


def counter_horizon(n: int) -> int:
    """Starting horizon past the counter's overflow, which is known exactly."""
    return max(16, 2 * counter_overflow_time(n))


def check_monotonicity(table: TauTable) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Pairs (n, m) <= (n', m') componentwise whose defined τ values decrease."""
    defined = sorted((k, e.value) for k, e in table.entries.items() if not e.censored)
    violations = []
    for i, ((n1, m1), v1) in enumerate(defined):
        for (n2, m2), v2 in defined[i + 1:]:
            if n1 <= n2 and m1 <= m2 and v1 > v2:
                violations.append(((n1, m1), (n2, m2)))
            elif n2 <= n1 and m2 <= m1 and v2 > v1:
                violations.append(((n2, m2), (n1, m1)))
    return violations


# -- scaling classification -------------------------------------------------

POLYNOMIAL, EXPONENTIAL, INDETERMINATE = "Polynomial", "Exponential", "Indeterminate"
_RSS_FLOOR = 1e-12


@dataclass(frozen=True)
class EfficiencyVerdict:
    kind: str
    params: dict
    diagnostics: dict

    def to_record(self) -> dict:
        return {"class": self.kind, "parameters": self.params, "residuals": self.diagnostics}


def fit_scaling(ns: Sequence[float], taus: Sequence[float]) -> dict:
    """Least-squares fits of log τ for both models plus a free-μ diagnostic."""
    n = np.asarray(ns, dtype=float)
    y = np.log(np.asarray(taus, dtype=float))
    slope, intercept = np.polyfit(np.log(n), y, 1)
    rss_poly = float(np.sum((y - intercept - slope * np.log(n)) ** 2))
    log_c = float(np.mean(y - n * math.log(2)))
    rss_exp = float(np.sum((y - log_c - n * math.log(2)) ** 2))

    def resid(x):
        return y - x[0] - n ** x[1] * math.log(2)

    free = least_squares(resid, x0=[log_c, 1.0], bounds=([-np.inf, 0.05], [np.inf, 5.0]))
    return {
        "K": float(math.exp(intercept)), "ell": float(slope), "rss_poly": rss_poly,
        "C": float(math.exp(log_c)), "rss_exp": rss_exp,
        "mu_free": float(free.x[1]), "C_free": float(math.exp(free.x[0])),
        "rss_exp_free": float(np.sum(free.fun ** 2)),
    }


def classify_points(ns: Sequence[int], taus: Sequence[float], margin: float = 2.0) -> EfficiencyVerdict:
    pts = [(n, t) for n, t in zip(ns, taus) if t is not None and t > 0]
    distinct = sorted({n for n, _ in pts})
    diag = {"points": len(pts), "margin": margin,
            "rule": "lower residual sum of squares wins by the margin ratio; a modelling choice"}
    if len(distinct) < 4:
        diag["reason"] = f"need at least 4 positive points at distinct n, got {len(distinct)}"
        return EfficiencyVerdict(INDETERMINATE, {}, diag)
    fit = fit_scaling([n for n, _ in pts], [t for _, t in pts])
    diag.update({k: fit[k] for k in ("rss_poly", "rss_exp", "mu_free", "C_free", "rss_exp_free")})
    rp, re = fit["rss_poly"], fit["rss_exp"]
    if rp < re and re >= margin * rp and re > _RSS_FLOOR:
        return EfficiencyVerdict(POLYNOMIAL, {"K": fit["K"], "ell": fit["ell"]}, diag)
    if re < rp and rp >= margin * re and rp > _RSS_FLOOR:
        return EfficiencyVerdict(EXPONENTIAL, {"C": fit["C"], "mu": 1.0, "mu_free": fit["mu_free"]}, diag)
    diag["reason"] = "residuals do not separate the models by the margin"
    return EfficiencyVerdict(INDETERMINATE, {"K": fit["K"], "ell": fit["ell"], "C": fit["C"]}, diag)


def classify_efficiency(table: TauTable, m: int, margin: float = 2.0) -> EfficiencyVerdict:
    """Polynomial K n^ℓ versus exponential C 2^n for the τ(n, m) column."""
    series = table.series(m)
    return classify_points([n for n, _ in series], [t for _, t in series], margin)


# -- target generation ----------------------------------------------------------

@dataclass(frozen=True)
class Dispersion:
    epsilon: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.epsilon <= self.threshold


def dispersion(distribution: Mapping[Sequence[str], float], target: Sequence[str],
               threshold: float = 0.05) -> Dispersion:
    """ε = 1 - p(target) for a limit distribution over assignments on [a, b]."""
    target = tuple(target)
    total = sum(distribution.values())
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"distribution sums to {total}, not 1")
    widths = {len(tuple(k)) for k in distribution}
    if widths and widths != {len(target)}:
        raise ValueError("target does not lie on the distribution's interval")
    p = sum(v for k, v in distribution.items() if tuple(k) == target)
    return Dispersion(max(0.0, 1.0 - p), threshold)


def limit_distribution(psi0: StateVector, U, a: int, b: int, T: int) -> dict[tuple[str, ...], float]:
    """Distribution over assignments on [a, b] at horizon T."""
    from .dynamics import evolve

    return restricted_distribution(evolve(psi0, U, T), a, b)
