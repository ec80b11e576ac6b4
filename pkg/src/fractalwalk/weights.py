"""Deterministic step-weight sequences and their energy bookkeeping.

A weight sequence is the deterministic part a_1, a_2, ... of a walk with
variable step length.  The running energy A_n = sum_{k<=n} a_k^2 drives every
normalization downstream, so it is cached once per sequence and accumulated
in extended precision; the per-step identity A_n - A_{n-1} = a_n^2 then holds
to 1e-12 relative even after 10^4 steps.

Two diagnostics live here as well.  `validate_assumptions` checks the pair of
standing hypotheses on a finite horizon: the energy diverges, and the last
step is small against it, a_n^2 = O(A_n^{1-delta}).  An O-statement is not
falsifiable at finite n, so the check reports the observed constant
K_hat = max_n a_n^2 / A_n^{1-delta} (with 0/0 := 0) together with a trend fit
over the trailing window, and the verdict is explicitly heuristic.
`growth_report` examines the two growth consequences used by the blocking
construction: A_n = O(n^{1/delta}) and the doubling bound A_{n+k} <= A_n q^k
from some index n0 on.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "WeightSequence",
    "AssumptionReport",
    "GrowthReport",
    "validate_assumptions",
    "growth_report",
]


def _as_positive_int(n, name: str) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"{name} must be >= 1, got {n}")
    return n


@dataclass(frozen=True)
class WeightSequence:
    """Lazily evaluated weight sequence with a shared energy cache.

    Build one through the classmethods (`constant`, `power`, ...) or from a
    serializable spec dict via `from_spec`; `explicit` sequences are zero
    beyond their stored values.
    """

    kind: str
    params: dict = field(default_factory=dict)
    _fn: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False, default=None)
    _cache: dict = field(repr=False, compare=False, default_factory=dict)
    _lock: threading.Lock = field(repr=False, compare=False, default_factory=threading.Lock)

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, c: float = 1.0) -> "WeightSequence":
        c = float(c)
        return cls("constant", {"c": c}, lambda k: np.full(k.shape, c))

    @classmethod
    def power(cls, exponent: float) -> "WeightSequence":
        e = float(exponent)
        return cls("power", {"exponent": e}, lambda k: k.astype(float) ** e)

    @classmethod
    def alternating(cls) -> "WeightSequence":
        # +1, -1, +1, ... starting at k = 1
        return cls("alternating", {}, lambda k: np.where(k % 2 == 1, 1.0, -1.0))

    @classmethod
    def odd_indicator(cls) -> "WeightSequence":
        # 1, 0, 1, 0, ...: half the steps are null moves
        return cls("odd_indicator", {}, lambda k: (k % 2 == 1).astype(float))

    @classmethod
    def geometric(cls, base: float) -> "WeightSequence":
        b = float(base)
        if b <= 0:
            raise ValueError(f"geometric base must be positive, got {b}")

        def fn(k: np.ndarray) -> np.ndarray:
            # b**k overflows float64 near k ~ 710/log(b); leave inf in place,
            # energies past that point are unusable and callers see it
            with np.errstate(over="ignore"):
                return b ** k.astype(float)

        return cls("geometric", {"base": b}, fn)

    @classmethod
    def explicit(cls, values) -> "WeightSequence":
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("explicit weights need a non-empty 1-d array")
        vals = vals.copy()
        vals.flags.writeable = False

        def fn(k: np.ndarray) -> np.ndarray:
            out = np.zeros(k.shape)
            inside = k <= vals.size
            out[inside] = vals[k[inside] - 1]
            return out

        return cls("explicit", {"values": [float(v) for v in vals]}, fn)

    @classmethod
    def from_spec(cls, spec: dict) -> "WeightSequence":
        kind = spec.get("kind")
        params = {k: v for k, v in spec.items() if k != "kind"}
        makers = {
            "constant": cls.constant,
            "power": cls.power,
            "alternating": cls.alternating,
            "odd_indicator": cls.odd_indicator,
            "geometric": cls.geometric,
            "explicit": cls.explicit,
        }
        if kind not in makers:
            raise ValueError(f"unknown weight kind {kind!r}")
        return makers[kind](**params)

    @property
    def spec(self) -> dict:
        """Serializable description, inverse of `from_spec`."""
        return {"kind": self.kind, **self.params}

    @property
    def length(self) -> int | None:
        """Number of stored values for explicit sequences, else None."""
        if self.kind == "explicit":
            return len(self.params["values"])
        return None

    # -- evaluation and cache ----------------------------------------------

    def _ensure(self, n: int) -> None:
        with self._lock:
            have = self._cache.get("n", 0)
            if have >= n:
                return
            grow = max(n, 2 * have, 64)
            k = np.arange(1, grow + 1, dtype=np.int64)
            vals = np.asarray(self._fn(k), dtype=float)
            # longdouble partial sums keep the A_n - A_{n-1} = a_n^2 identity
            # testable at 1e-12 relative for 1e4+ terms
            acc = np.cumsum(np.square(vals.astype(np.longdouble)))
            energies = acc.astype(float)
            vals.flags.writeable = False
            energies.flags.writeable = False
            self._cache["n"] = grow
            self._cache["values"] = vals
            self._cache["energies"] = energies

    def values(self, n: int) -> np.ndarray:
        """Read-only array (a_1, ..., a_n)."""
        n = _as_positive_int(n, "n")
        self._ensure(n)
        return self._cache["values"][:n]

    def a(self, k: int) -> float:
        """Single weight a_k, k >= 1."""
        k = _as_positive_int(k, "k")
        return float(self.values(k)[k - 1])

    def energies(self, n: int) -> np.ndarray:
        """Read-only array (A_1, ..., A_n) of partial energies."""
        n = _as_positive_int(n, "n")
        self._ensure(n)
        return self._cache["energies"][:n]

    def partial_energy(self, n: int) -> float:
        """A_n = sum_{k<=n} a_k^2, with A_0 = 0."""
        if n == 0:
            return 0.0
        return float(self.energies(n)[-1])


def _ratio_sequence(vals: np.ndarray, energies: np.ndarray, delta: float) -> np.ndarray:
    """a_n^2 / A_n^{1-delta} with the 0/0 := 0 convention."""
    sq = np.square(vals)
    if delta == 1.0:
        return sq
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = sq / energies ** (1.0 - delta)
    ratios[sq == 0.0] = 0.0
    return ratios


def _trailing_slope(ratios: np.ndarray, n_max: int) -> tuple[float, tuple[int, int]]:
    """Log-log trend of the ratio sequence over the last quarter of indices."""
    lo = max(1, (3 * n_max) // 4)
    ks = np.arange(lo, n_max + 1)
    window = ratios[lo - 1 : n_max]
    keep = np.isfinite(window) & (window > 0)
    if keep.sum() < 2:
        return 0.0, (lo, n_max)
    slope = np.polyfit(np.log(ks[keep].astype(float)), np.log(window[keep]), 1)[0]
    return float(slope), (lo, n_max)


@dataclass(frozen=True)
class AssumptionReport:
    delta: float
    n_max: int
    k_hat: float
    worst_index: int
    tail_slope: float
    slope_tol: float
    window: tuple[int, int]
    energy_final: float
    passed: bool
    ratios: np.ndarray = field(repr=False, compare=False, default=None)


def validate_assumptions(
    seq: WeightSequence,
    delta: float,
    n_max: int = 10_000,
    slope_tol: float = 0.01,
) -> AssumptionReport:
    """Finite-horizon check that a_n^2 = O(A_n^{1-delta}).

    Reports K_hat = max_{n<=n_max} a_n^2 / A_n^{1-delta} and the log-log slope
    of that ratio over the trailing quarter of indices.  Verdict: K_hat finite
    and slope <= slope_tol.  A strict zero threshold would reject sequences
    with a drifting but bounded ratio purely on fit noise, so the default
    tolerance is small but positive.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    n_max = _as_positive_int(n_max, "n_max")
    vals = seq.values(n_max)
    energies = seq.energies(n_max)
    ratios = _ratio_sequence(vals, energies, delta)
    ratios.flags.writeable = False
    bad = ~np.isfinite(ratios)
    if bad.any():
        # inf/inf from float overflow means the ratio genuinely diverged
        worst = int(np.argmax(bad)) + 1
        k_hat = float("inf")
    elif np.all(ratios == 0.0):
        k_hat, worst = 0.0, 1
    else:
        worst = int(np.argmax(ratios)) + 1
        k_hat = float(ratios[worst - 1])
    slope, window = _trailing_slope(ratios, n_max)
    passed = bool(np.isfinite(k_hat) and slope <= slope_tol)
    return AssumptionReport(
        delta=float(delta),
        n_max=n_max,
        k_hat=k_hat,
        worst_index=worst,
        tail_slope=slope,
        slope_tol=float(slope_tol),
        window=window,
        energy_final=float(energies[-1]),
        passed=passed,
    )


@dataclass(frozen=True)
class GrowthReport:
    delta: float
    q: float
    n0: int | None
    n_max: int
    poly_sup: float
    poly_sup_index: int
    poly_trend_slope: float
    poly_bounded: bool
    exp_ok: bool
    n0_min: int | None
    passed: bool


def growth_report(
    seq: WeightSequence,
    delta: float,
    q: float,
    n0: int | None = None,
    n_max: int = 10_000,
    slope_tol: float = 0.01,
) -> GrowthReport:
    """Check the two growth consequences the blocking construction relies on.

    Polynomial bound: A_n = O(n^{1/delta}), judged by the sup and trailing
    trend of A_n / n^{1/delta}.  Doubling bound: A_{n+k} <= A_n q^k for all
    n >= n0, equivalent to log A_n - n log q being non-increasing from n0 on.
    The bound is asymptotic, so when n0 is not pinned the verdict accepts any
    admissible starting index on the horizon; `n0_min` reports the smallest
    one (None if the last step still violates it).
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    if q <= 1.0:
        raise ValueError(f"q must be > 1, got {q}")
    n_max = _as_positive_int(n_max, "n_max")
    if n0 is not None:
        n0 = _as_positive_int(n0, "n0")
        if n0 >= n_max:
            raise ValueError(f"need n0 < n_max, got n0={n0}, n_max={n_max}")
    energies = seq.energies(n_max)

    ks = np.arange(1, n_max + 1, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        poly_ratio = energies / ks ** (1.0 / delta)
    sup_idx = int(np.nanargmax(poly_ratio)) + 1
    poly_sup = float(poly_ratio[sup_idx - 1])
    poly_slope, _ = _trailing_slope(poly_ratio, n_max)
    poly_bounded = bool(np.isfinite(poly_sup) and poly_slope <= slope_tol)

    with np.errstate(divide="ignore"):
        g = np.log(energies) - ks * np.log(q)
    # A_{n+k} <= A_n q^k for all n >= n0 iff g is non-increasing from n0 on;
    # nan steps (inf - inf after overflow) count as violations
    dg = np.diff(g)
    steps_up = np.where((dg > 1e-12) | np.isnan(dg))[0]  # g[i+1] > g[i], i = n-1
    if steps_up.size == 0:
        n0_min: int | None = 1
    elif steps_up[-1] + 2 <= n_max - 1:
        n0_min = int(steps_up[-1] + 2)
    else:
        n0_min = None
    if n0 is None:
        exp_ok = n0_min is not None
    else:
        exp_ok = steps_up[steps_up + 1 >= n0].size == 0

    return GrowthReport(
        delta=float(delta),
        q=float(q),
        n0=n0,
        n_max=n_max,
        poly_sup=poly_sup,
        poly_sup_index=sup_idx,
        poly_trend_slope=poly_slope,
        poly_bounded=poly_bounded,
        exp_ok=bool(exp_ok),
        n0_min=n0_min,
        passed=bool(poly_bounded and exp_ok),
    )
