"""Toy measure-preserving systems on R/Z: exact preimages, mixing gaps, orbit counting."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import kernels, psiexpr, rng
from .exact import fsum_exact
from .unitcircle import PREIMAGE_BUDGET, CircleSet

ZERO = Fraction(0)
GUARD_BITS = 64
TWO64 = 1 << 64


@dataclass(frozen=True)
class DynSystem:
    """kind 'mul' is x -> b x mod 1; kind 'rot' is x -> x + alpha mod 1."""

    kind: str
    b: int = 2
    alpha: Fraction = ZERO

    def __post_init__(self):
        if self.kind == "mul":
            if int(self.b) < 2:
                raise ValueError("the multiplier b must be at least 2")
        elif self.kind == "rot":
            object.__setattr__(self, "alpha", Fraction(self.alpha))
        else:
            raise ValueError(f"unknown system kind {self.kind!r}")

    @classmethod
    def times(cls, b: int) -> "DynSystem":
        return cls("mul", int(b))

    @classmethod
    def rotation(cls, alpha) -> "DynSystem":
        return cls("rot", alpha=Fraction(alpha))

    @property
    def shift_bits(self) -> int | None:
        """log2(b) when b is a power of two, else None."""
        if self.kind == "mul" and self.b & (self.b - 1) == 0:
            return self.b.bit_length() - 1
        return None

    def describe(self) -> str:
        return f"x{self.b}" if self.kind == "mul" else f"rot({self.alpha})"


def exact_preimage(A: CircleSet, n: int, sys: DynSystem, budget: int = PREIMAGE_BUDGET) -> CircleSet:
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return A
    if sys.kind == "rot":
        return A.translate(-n * sys.alpha)
    if A.intervals == ((ZERO, Fraction(1)),):
        return A
    return A.preimage_mul(sys.b**n, budget=budget)


def _periodic_mass(y: Fraction, c: Fraction, d: Fraction) -> Fraction:
    """|[0, y] & union_k [c + k, d + k]| for y >= 0 and [c, d] inside [0, 1]."""
    k = y.__floor__()
    return k * (d - c) + min(max(y - k - c, ZERO), d - c)


def _mul_intersection(A: CircleSet, B: CircleSet, N: int) -> Fraction:
    # mu(A & T^-1 B) for T = x N, without listing the N copies of B
    total = ZERO
    for u, v in A.intervals:
        for c, d in B.intervals:
            total += _periodic_mass(N * v, c, d) - _periodic_mass(N * u, c, d)
    return total / N


def mixing_gap(A: CircleSet, B: CircleSet, n: int, sys: DynSystem, budget: int = PREIMAGE_BUDGET) -> Fraction:
    """mu(A & T^-n B) - mu(A) mu(B).

    For x b maps the intersection is measured in closed form, so n is not
    limited by the preimage budget; rotations translate B.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if sys.kind == "mul":
        inter = _mul_intersection(A, B, sys.b**n)
    else:
        inter = A.intersect(exact_preimage(B, n, sys, budget)).measure()
    return inter - A.measure() * B.measure()


@dataclass
class MixingProfile:
    system: str
    gaps: list[list[Fraction]]  # gaps[pair][n-1]
    envelope_ok: bool
    worst_ratio: Fraction  # max |g_n| / (2 mu(B) b^-n) over pairs and n

    def envelope(self, n: int, b: int) -> Fraction:
        return Fraction(2, b**n)


def sigma_mixing_envelope(sys: DynSystem, pairs: Sequence[tuple[CircleSet, CircleSet]], N: int) -> MixingProfile:
    """Exact gaps for n = 1..N and the check |g_n| <= 2 mu(B) b^-n for every pair."""
    if sys.kind != "mul":
        raise ValueError("the envelope applies to x b maps only")
    gaps = []
    ok = True
    worst = ZERO
    for A, B in pairs:
        row = []
        mB = B.measure()
        for n in range(1, N + 1):
            g = mixing_gap(A, B, n, sys)
            row.append(g)
            env = 2 * mB / sys.b**n
            if abs(g) > env:
                ok = False
            if env:
                worst = max(worst, abs(g) / env)
        gaps.append(row)
    return MixingProfile(sys.describe(), gaps, ok, worst)


def averaged_mixing_gaps(A: CircleSet, B: CircleSet, N: int, window: int, sys: DynSystem) -> list[Fraction]:
    """Window means (1/w) sum_{j=n}^{n+w-1} g_j for n = 1..N.

    There is no canonical window length, so w is left to the caller.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    g = [mixing_gap(A, B, n, sys) for n in range(1, N + window)]
    return [sum(g[n:n + window], ZERO) / window for n in range(N)]


# ---------------------------------------------------------------- targets and orbits

@dataclass
class TargetSequence:
    """A_n = closed ball(x_n, r_n) for n >= 1."""

    radius: Callable[[int], Fraction]
    centre: Callable[[int], Fraction]
    description: str = ""

    @classmethod
    def from_rule(cls, radius, seed: int = 0, centres: dict[int, Fraction] | None = None) -> "TargetSequence":
        """Radii from an expression like '1/(4n)'; centres from a table or from the seeded stream.

        Streamed centres are k/2**32 with k taken from the centre stream.
        """
        r = psiexpr.as_callable(radius)
        if centres is not None:
            tab = {int(k): Fraction(v) for k, v in centres.items()}
            c = lambda n: tab.get(n, ZERO)  # noqa: E731
        else:
            c = lambda n: Fraction(int(rng.words(seed, n, 1, rng.STREAM_CENTRES)[0]) >> 32, 1 << 32)  # noqa: E731
        return cls(r, c, f"radius={radius if isinstance(radius, str) else 'rule'}, centres={'table' if centres else f'stream(seed={seed})'}")

    def ball(self, n: int) -> CircleSet:
        return CircleSet.from_arcs([(self.centre(n), self.radius(n))])

    def measure(self, n: int) -> Fraction:
        return min(2 * Fraction(self.radius(n)), Fraction(1))

    def phi(self, N: int) -> Fraction:
        return fsum_exact(self.measure(n) for n in range(1, N + 1))

    def phi_at(self, marks: Sequence[int]) -> dict[int, Fraction]:
        """Phi at each checkpoint, summing exactly segment by segment."""
        out, acc, prev = {}, ZERO, 0
        for m in sorted(set(marks)):
            acc += fsum_exact(self.measure(n) for n in range(prev + 1, m + 1))
            out[m], prev = acc, m
        return out


def required_precision(N: int, sys: DynSystem, guard: int = GUARD_BITS) -> int:
    k = sys.shift_bits
    if k is None:
        raise ValueError("orbit sampling needs b to be a power of two")
    return k * N + guard


def _target_arrays(targets: TargetSequence, N: int):
    llo = np.zeros(N + 1, np.uint64)
    wlo = np.zeros(N + 1, np.uint64)
    whi = np.zeros(N + 1, np.uint64)
    full = np.zeros(N + 1, bool)
    for n in range(1, N + 1):
        r = Fraction(targets.radius(n))
        if r < 0:
            raise ValueError(f"negative radius at n={n}")
        if 2 * r >= 1:
            full[n] = True
            continue
        lo = (Fraction(targets.centre(n)) - r) % 1
        llo[n] = math.floor(lo * TWO64)
        w = 2 * r * TWO64
        wlo[n] = math.floor(w)
        whi[n] = min(math.ceil(w), TWO64 - 1)
    return llo, wlo, whi, full


@dataclass
class OrbitRun:
    hits: np.ndarray  # rows: sample, n, ambiguous
    samples: int
    N: int
    P: int
    seed: int
    first_sample: int = 0

    def hit_counts(self, upto: int | None = None, include_ambiguous: bool = False) -> np.ndarray:
        rows = self.hits
        if upto is not None:
            rows = rows[rows[:, 1] <= upto]
        if not include_ambiguous:
            rows = rows[rows[:, 2] == 0]
        return np.bincount(rows[:, 0], minlength=self.samples)[: self.samples]


def orbit_hits(targets: TargetSequence, N: int, sys: DynSystem, samples: int, seed: int,
               P: int | None = None, start: int = 0) -> OrbitRun:
    """Count 1 <= n <= N with T^n x in A_n for x = X/2**P from the point stream.

    T^n x is read straight off the bits of x, so the only inexactness is the
    64-bit window; boundary cases are flagged ambiguous and not counted.
    """
    need = required_precision(N, sys)
    if P is None:
        P = need
    if P < need:
        raise ValueError(f"precision P={P} is too small; at least {need} bits are needed for N={N}")
    nwords = -(-P // 64) + 1
    W = rng.point_words(seed, samples, nwords, start)
    tail = P % 64
    if tail:
        W[:, P // 64] &= np.uint64(((1 << tail) - 1) << (64 - tail))
    W[:, -(-P // 64):] = 0  # padding word read by the last window
    llo, wlo, whi, full = _target_arrays(targets, N)
    raw = kernels.orbit_hits(W, sys.shift_bits, llo, wlo, whi, full)
    return OrbitRun(raw, samples, N, P, seed, start)


@dataclass
class CountingResult:
    rows: list[dict]
    pass_fraction: float
    K: Fraction
    eps: Fraction
    manifest: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["sample", "N", "hits", "phi_num", "phi_den", "residual", "bound", "pass"]
        w.writerow(cols)
        for r in self.rows:
            w.writerow([r[c] for c in cols])
        return buf.getvalue()


def residual_bound(phi: Fraction, K, eps) -> float:
    """K * Phi**(1/2) * (log Phi)**(3/2 + eps); 0 when Phi <= 1."""
    p = float(phi)
    if p <= 1:
        return 0.0
    return float(K) * math.sqrt(p) * math.log(p) ** (1.5 + float(eps))


def counting_experiment(sys: DynSystem, targets: TargetSequence, N: int, samples: int, eps, seed: int,
                        K=10, checkpoints: Sequence[int] | None = None) -> CountingResult:
    """Residuals hits(N) - Phi(N) per sample against K Phi^(1/2) (log Phi)^(3/2+eps)."""
    eps, K = Fraction(eps), Fraction(K)
    marks = sorted(set(checkpoints or [N]))
    if marks[-1] > N or marks[0] < 1:
        raise ValueError("checkpoints must lie in 1..N")
    run = orbit_hits(targets, N, sys, samples, seed)
    phis = targets.phi_at(marks)
    rows = []
    final_pass = []
    for m in marks:
        cnt = run.hit_counts(m)
        ph = phis[m]
        bound = residual_bound(ph, K, eps)
        for s in range(samples):
            res = cnt[s] - ph
            ok = abs(float(res)) <= bound
            rows.append({"sample": s, "N": m, "hits": int(cnt[s]), "phi_num": ph.numerator,
                         "phi_den": ph.denominator, "residual": f"{float(res):.6f}",
                         "bound": f"{bound:.6f}", "pass": int(ok)})
            if m == N:
                final_pass.append(ok)
    manifest = {"system": sys.describe(), "targets": targets.description, "N": N, "samples": samples,
                "seed": seed, "P": run.P, "K": str(K), "eps": str(eps), "rng": rng.ALGORITHM,
                "ambiguous_hits": int(run.hits[:, 2].sum()) if run.hits.size else 0}
    return CountingResult(rows, float(np.mean(final_pass)), K, eps, manifest)
