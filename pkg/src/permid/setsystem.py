"""Bounded-intersection set systems over [N]: randomized greedy existence
construction, complement transform, and the lower bounds that constrain any
constant-weight family (inverse-entropy bound, quadratic intersection bound,
Johnson bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    BoundViolationError,
    HypothesisError,
    ValidationError,
)
from .exact import ceil_pow2_over
from .rng import Stream


@dataclass(frozen=True)
class SetSystem:
    """M distinct subsets of [1..N]."""

    N: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        if not (isinstance(self.N, int) and self.N >= 1):
            raise ValidationError("ground-set size N must be a positive integer")
        seen = set()
        for s in self.sets:
            if not isinstance(s, frozenset):
                raise ValidationError("sets must be frozensets")
            if not s:
                raise ValidationError("empty member set")
            if not all(isinstance(e, int) and 1 <= e <= self.N for e in s):
                raise ValidationError(f"set {sorted(s)} leaves the ground set [1..{self.N}]")
            if s in seen:
                raise ValidationError(f"duplicate set {sorted(s)}")
            seen.add(s)

    @property
    def M(self) -> int:
        return len(self.sets)

    def is_constant_weight(self) -> bool:
        return len({len(s) for s in self.sets}) <= 1


@dataclass(frozen=True)
class IntersectionProfile:
    """Exact (Gamma, Delta) profile of a constant-weight system."""

    N: int
    M: int
    gamma: int
    delta: int

    @property
    def epsilon(self) -> Fraction:
        return Fraction(self.gamma, self.N)

    @property
    def delta_frac(self) -> Fraction:
        return Fraction(self.delta, self.N)

    @property
    def ratio(self) -> Fraction:
        """Delta/Gamma, the sum error of the induced identification code."""
        return Fraction(self.delta, self.gamma)


def verify_profile(system: SetSystem) -> IntersectionProfile:
    """Exact Gamma and Delta by full pairwise scan.

    Delta of a single-set family is 0 (max over an empty pair set).
    """
    sizes = {len(s) for s in system.sets}
    if len(sizes) != 1:
        raise ValidationError(f"not constant-weight: sizes {sorted(sizes)}")
    gamma = sizes.pop()
    delta = 0
    sets = system.sets
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            inter = len(sets[i] & sets[j])
            if inter > delta:
                delta = inter
    return IntersectionProfile(N=system.N, M=system.M, gamma=gamma, delta=delta)


def complement_system(system: SetSystem) -> SetSystem:
    """Replace every set by its complement in [1..N].

    Only useful (and only allowed) when Gamma > N/2; the complemented profile
    then satisfies Gamma' = N - Gamma, Delta' = N - 2*Gamma + Delta, and the
    error ratio does not get worse: Delta'/Gamma' <= Delta/Gamma. Both facts
    are replayed exactly on the output.
    """
    before = verify_profile(system)
    if 2 * before.gamma <= system.N:
        raise HypothesisError(
            f"complement transform needs Gamma > N/2, got Gamma={before.gamma}, N={system.N}"
        )
    ground = frozenset(range(1, system.N + 1))
    result = SetSystem(system.N, tuple(ground - s for s in system.sets))
    after = verify_profile(result)
    if after.gamma != system.N - before.gamma:
        raise BoundViolationError("complement size identity failed")
    if system.M >= 2 and after.delta != system.N - 2 * before.gamma + before.delta:
        raise BoundViolationError("complement intersection identity failed")
    if system.M >= 2 and after.ratio > before.ratio:
        raise BoundViolationError("complement transform increased Delta/Gamma")
    return result


def h2(x: float) -> float:
    """Binary entropy, log base 2."""
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"h2 needs x in [0,1], got {x}")
    if x in (0.0, 1.0):
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def h2_inv(v: float) -> float:
    """The unique x in [0, 1/2] with h2(x) = v, by bisection.

    Absolute error below 1e-12 (the interval is shrunk to float resolution).
    """
    if not 0.0 <= v <= 1.0:
        raise ValidationError(f"h2_inv needs v in [0,1], got {v}")
    if v == 0.0:
        return 0.0
    if v == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if mid in (lo, hi):
            break
        if h2(mid) < v:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


@dataclass(frozen=True)
class ExistenceHypothesis:
    """The two-part hypothesis behind the greedy existence floor."""

    epsilon: Fraction
    lam: Fraction
    log_base: int
    epsilon_ok: bool
    lambda_range_ok: bool
    product_ok: bool

    @property
    def ok(self) -> bool:
        return self.epsilon_ok and self.lambda_range_ok and self.product_ok


def existence_hypothesis(
    epsilon: Fraction, lam: Fraction, log_base: int = 2
) -> ExistenceHypothesis:
    """Check epsilon < 1/6, lambda in (0, 1/2), and lambda*log(1/epsilon - 1) > 2.

    The log base defaults to 2 and is exposed as a parameter.
    """
    epsilon = Fraction(epsilon)
    lam = Fraction(lam)
    if not 0 < epsilon < 1:
        raise ValidationError("epsilon must be in (0,1)")
    if lam <= 0:
        raise ValidationError("lambda must be positive")
    product = float(lam) * math.log(1.0 / float(epsilon) - 1.0, log_base)
    return ExistenceHypothesis(
        epsilon=epsilon,
        lam=lam,
        log_base=log_base,
        epsilon_ok=epsilon < Fraction(1, 6),
        lambda_range_ok=Fraction(0) < lam < Fraction(1, 2),
        product_ok=product > 2.0,
    )


def existence_floor(N: int, epsilon: Fraction) -> int:
    """The guaranteed family size ceil(2^(eps*N - 1) / N), computed exactly."""
    epsilon = Fraction(epsilon)
    return ceil_pow2_over(epsilon * N - 1, N)


@dataclass
class GreedyResult:
    """Outcome of the randomized greedy construction."""

    system: SetSystem
    profile: IntersectionProfile
    gamma: int
    cap: int
    target: int
    attempts: int
    reached_target: bool
    hypothesis: ExistenceHypothesis
    warning: str | None = None


def grow_family(
    N: int,
    gamma: int,
    cap: int,
    target: int,
    stream: Stream,
    max_attempts: int,
) -> tuple[list[frozenset[int]], int]:
    """Rejection-sample gamma-subsets of [1..N], keeping each candidate iff
    it is new and intersects every kept set in at most cap elements. Returns
    (kept sets, attempts used)."""
    if not 1 <= gamma <= N:
        raise ValidationError(f"set size {gamma} outside [1..{N}]")
    if cap < 0:
        raise ValidationError("intersection cap must be >= 0")
    if target < 1:
        raise ValidationError("target count must be >= 1")
    if target > math.comb(N, gamma):
        raise ValidationError(
            f"target {target} exceeds the {math.comb(N, gamma)} distinct "
            f"{gamma}-subsets of [1..{N}]"
        )
    rand = stream.rand
    ground = range(1, N + 1)
    kept: list[frozenset[int]] = []
    attempts = 0
    while len(kept) < target and attempts < max_attempts:
        attempts += 1
        candidate = frozenset(rand.sample(ground, gamma))
        if any(len(candidate & s) > cap or candidate == s for s in kept):
            continue
        kept.append(candidate)
    return kept, attempts


def greedy_gilbert(
    N: int,
    epsilon: Fraction,
    lam: Fraction,
    stream: Stream,
    max_attempts: int = 100_000,
    m_target: int | None = None,
    strict: bool = False,
    log_base: int = 2,
) -> GreedyResult:
    """Randomized greedy family of floor(eps*N)-subsets with pairwise
    intersections at most floor(lam*eps*N).

    The existence hypothesis (epsilon < 1/6, lambda in (0,1/2),
    lambda*log(1/epsilon - 1) > 2) guarantees a family of size
    existence_floor(N, epsilon). It is enforced when that floor is used as
    the target (m_target None) or when strict=True; with an explicit
    m_target the hypothesis is only recorded on the result, since the greedy
    itself is mechanical. If max_attempts runs out, the partial family is
    returned with `warning` set and reached_target False.
    """
    epsilon = Fraction(epsilon)
    lam = Fraction(lam)
    hyp = existence_hypothesis(epsilon, lam, log_base=log_base)
    if (m_target is None or strict) and not hyp.ok:
        raise HypothesisError(
            "existence hypothesis fails "
            f"(epsilon<1/6: {hyp.epsilon_ok}, lambda in (0,1/2): {hyp.lambda_range_ok}, "
            f"lambda*log(1/eps-1)>2: {hyp.product_ok}); "
            "pass an explicit m_target to build anyway"
        )
    gamma = math.floor(epsilon * N)
    if gamma < 1:
        raise ValidationError(f"floor(epsilon*N) = {gamma}; need at least 1")
    cap = math.floor(lam * epsilon * N)
    target = existence_floor(N, epsilon) if m_target is None else m_target
    kept, attempts = grow_family(N, gamma, cap, target, stream, max_attempts)
    system = SetSystem(N, tuple(kept))
    profile = verify_profile(system) if kept else IntersectionProfile(N, 0, gamma, 0)
    if kept and profile.delta > cap:
        raise BoundViolationError("greedy produced an intersection above its cap")
    reached = len(kept) >= target
    warning = None if reached else f"attempt budget {max_attempts} exhausted at {len(kept)}/{target} sets"
    return GreedyResult(
        system=system,
        profile=profile,
        gamma=gamma,
        cap=cap,
        target=target,
        attempts=attempts,
        reached_target=reached,
        hypothesis=hyp,
        warning=warning,
    )


def prop2_lower_bound(N: int, M: int, alpha: Fraction) -> float:
    """Universal lower bound on Delta/Gamma for any constant-weight system:
    (1 - alpha) * h2_inv(log2(M) / N), valid whenever M > 1 + N/alpha."""
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValidationError("alpha must be in (0,1)")
    if N < 1 or M < 1:
        raise ValidationError("N and M must be positive")
    if M <= 1 + Fraction(N) / alpha:
        raise HypothesisError(f"bound needs M > 1 + N/alpha = {1 + Fraction(N) / alpha}")
    ratio = math.log2(M) / N
    if ratio > 1.0 and M > 2**N:
        raise HypothesisError(f"log2(M)/N = {ratio:.6f} > 1; inverse entropy undefined")
    return (1.0 - float(alpha)) * h2_inv(min(ratio, 1.0))


def lemma6_check(system: SetSystem, alpha: Fraction) -> bool:
    """Assert the quadratic intersection bound delta > (1-alpha)*epsilon^2.

    Requires a constant-weight system with M > 1 + N/alpha. Under that
    hypothesis the inequality is a theorem, so a False outcome raises
    BoundViolationError instead of being returned.
    """
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValidationError("alpha must be in (0,1)")
    profile = verify_profile(system)
    if profile.M <= 1 + Fraction(profile.N) / alpha:
        raise HypothesisError(
            f"need M > 1 + N/alpha = {1 + Fraction(profile.N) / alpha}, got M={profile.M}"
        )
    eps = profile.epsilon
    delta = profile.delta_frac
    holds = delta > (1 - alpha) * eps * eps
    if not holds:
        raise BoundViolationError(
            f"delta={delta} <= (1-alpha)*eps^2={(1 - alpha) * eps * eps} "
            f"on a system with M={profile.M}: quadratic intersection bound violated"
        )
    return holds


def johnson_bound_M(N: int, d: int, w: int) -> int:
    """Johnson bound on constant-weight binary codes:
    A(N, d, w) <= floor(N*d / (2w^2 - 2Nw + Nd)) when the denominator is positive."""
    if N < 1 or d < 1 or w < 1:
        raise ValidationError("parameters must be positive")
    denom = 2 * w * w - 2 * N * w + N * d
    if denom <= 0:
        raise HypothesisError(f"denominator 2w^2-2Nw+Nd = {denom} <= 0; bound inapplicable")
    return (N * d) // denom


def johnson_bound_for_profile(profile: IntersectionProfile) -> int:
    """Johnson bound specialized to a (Gamma, Delta) profile.

    Characteristic vectors have weight w = Gamma and pairwise distance at
    least d = 2*(Gamma - Delta)."""
    return johnson_bound_M(profile.N, 2 * (profile.gamma - profile.delta), profile.gamma)
