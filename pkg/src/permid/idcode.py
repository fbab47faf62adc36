"""Identification codes and their exact error evaluation.

A code for message set [1..M] is a family of stochastic encoders together
with per-message accept tests. Decoding regions may overlap, which is what
separates identification from transmission: the receiver only checks the one
message it cares about. Error figures are the worst missed-detection
probability (lambda1) and the worst cross-acceptance probability (lambda2).

Two channel models are covered: the noiseless channel on a finite ground set
[1..N], and the q-ary uniform permutation channel on blocks (one or several
uses). Permutation-channel decoders are stored as per-orbit acceptance
counts, which is lossless for error evaluation: the chance that a decoder
accepts an output of orbit T is (size of decoder inside T) / |T|, whatever
the concrete vectors are.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .combinatorics import (
    count_types,
    index_to_tuple,
    tuple_to_index,
    type_index,
    type_of,
    type_representative,
    type_unrank,
    typeclass_size,
)
from .dist import Dist, tv_distance
from .errors import (
    BoundViolationError,
    HypothesisError,
    PermidError,
    ValidationError,
)
from .exact import compare_log2, floor_plus_log2, ceil_pow2_over
from .rng import Stream
from .setsystem import IntersectionProfile, SetSystem, grow_family, verify_profile

# Full matrices are kept only while M stays at or below this cap; above it the
# evaluators stream the maxima and per-message misses.
MATRIX_CAP = 4096

NoiselessDecoder = frozenset  # or a Mapping[int, Fraction] of accept probabilities


def _accept_prob(decoder, k: int) -> Fraction:
    if isinstance(decoder, frozenset):
        return Fraction(1) if k in decoder else Fraction(0)
    return Fraction(decoder.get(k, 0))


def _check_noiseless_decoder(decoder, N: int):
    if isinstance(decoder, frozenset):
        for k in decoder:
            if not (isinstance(k, int) and 1 <= k <= N):
                raise ValidationError(f"decoder element {k!r} outside [1..{N}]")
        return decoder
    if isinstance(decoder, Mapping):
        cleaned = {}
        for k, p in decoder.items():
            if not (isinstance(k, int) and 1 <= k <= N):
                raise ValidationError(f"decoder outcome {k!r} outside [1..{N}]")
            p = Fraction(p)
            if not 0 <= p <= 1:
                raise ValidationError(f"accept probability {p} outside [0,1]")
            if p:
                cleaned[k] = p
        return cleaned
    raise ValidationError("decoder must be a frozenset or a mapping to accept probabilities")


class NoiselessIdCode:
    """Identification code for the noiseless channel on [1..N].

    Decoders are frozensets (deterministic) or mappings k -> accept
    probability (stochastic); the two kinds can be mixed within one code.
    """

    def __init__(self, N: int, encoders: Sequence[Dist], decoders: Sequence):
        if not (isinstance(N, int) and N >= 1):
            raise ValidationError("N must be a positive integer")
        encoders = tuple(encoders)
        decoders = tuple(_check_noiseless_decoder(d, N) for d in decoders)
        if not encoders:
            raise ValidationError("need at least one message")
        if len(encoders) != len(decoders):
            raise ValidationError(
                f"{len(encoders)} encoders vs {len(decoders)} decoders"
            )
        for enc in encoders:
            if not isinstance(enc, Dist):
                raise ValidationError("encoders must be Dist instances")
            if enc.size != N:
                raise ValidationError(f"encoder ground set {enc.size} != {N}")
        self.N = N
        self.encoders = encoders
        self.decoders = decoders

    @property
    def M(self) -> int:
        return len(self.encoders)

    def accept_prob(self, i: int, k: int) -> Fraction:
        """P(decoder of message i accepts outcome k); i is 1-based."""
        return _accept_prob(self.decoders[i - 1], k)

    def is_deterministic(self) -> bool:
        return all(isinstance(d, frozenset) for d in self.decoders)


class PermIdCode:
    """Identification code for l uses of the q-ary permutation channel.

    Encoders are distributions over flat q-ary tuples of length n*l (the l
    blocks concatenated). Decoders are acceptance counts per orbit product,
    keyed by the combined orbit index in [1..N^l] (N = number of length-n
    orbits); the value at key t is |decoder region within orbit product t|.
    """

    def __init__(
        self,
        n: int,
        q: int,
        encoders: Sequence[Dist],
        decoder_counts: Sequence[Mapping[int, int]],
        l: int = 1,
    ):
        if not (isinstance(l, int) and l >= 1):
            raise ValidationError("l must be a positive integer")
        self.n = n
        self.q = q
        self.l = l
        self.N = count_types(n, q)
        self.ground = self.N**l
        encoders = tuple(encoders)
        if not encoders:
            raise ValidationError("need at least one message")
        if len(encoders) != len(decoder_counts):
            raise ValidationError(
                f"{len(encoders)} encoders vs {len(decoder_counts)} decoder count maps"
            )
        for enc in encoders:
            if not isinstance(enc, Dist):
                raise ValidationError("encoders must be Dist instances")
            for x in enc.support():
                self._check_input(x)
        cleaned = []
        for counts in decoder_counts:
            dec: dict[int, int] = {}
            for t, c in counts.items():
                if not (isinstance(t, int) and 1 <= t <= self.ground):
                    raise ValidationError(f"orbit index {t!r} outside [1..{self.ground}]")
                if not (isinstance(c, int) and c >= 0):
                    raise ValidationError(f"orbit count {c!r} must be a nonnegative integer")
                if c > self.orbit_size(t):
                    raise ValidationError(
                        f"count {c} exceeds orbit product size {self.orbit_size(t)} at index {t}"
                    )
                if c:
                    dec[t] = c
            cleaned.append(dec)
        self.encoders = encoders
        self.decoder_counts = tuple(cleaned)

    @property
    def M(self) -> int:
        return len(self.encoders)

    def _check_input(self, x) -> tuple[int, ...]:
        """Validate a flat input tuple and return its l block-type indices."""
        if not (isinstance(x, tuple) and len(x) == self.n * self.l):
            raise ValidationError(
                f"input must be a tuple of length n*l = {self.n * self.l}, got {x!r}"
            )
        return tuple(
            type_index(type_of(x[b * self.n : (b + 1) * self.n], self.q))
            for b in range(self.l)
        )

    def input_orbit(self, x) -> int:
        """Combined orbit index in [1..N^l] of a flat input tuple."""
        return tuple_to_index(self._check_input(x), self.N)

    def orbit_size(self, t: int) -> int:
        """Number of vectors in the orbit product with combined index t."""
        size = 1
        for j in index_to_tuple(t, self.N, self.l):
            size *= typeclass_size(type_unrank(j, self.n, self.q))
        return size

    def accept_prob_for_orbit(self, i: int, t: int) -> Fraction:
        """P(decoder of message i accepts | output lands in orbit product t)."""
        c = self.decoder_counts[i - 1].get(t, 0)
        if c == 0:
            return Fraction(0)
        return Fraction(c, self.orbit_size(t))

    def output_dist(self, i: int) -> Dist:
        """Distribution of the combined output orbit index under message i."""
        mass: dict[int, Fraction] = {}
        for x, p in self.encoders[i - 1].items():
            t = self.input_orbit(x)
            mass[t] = mass.get(t, Fraction(0)) + p
        return Dist(mass, size=self.ground)


def counts_from_vector_set(
    vectors, n: int, q: int, l: int = 1
) -> dict[int, int]:
    """Compress an explicit decoder region (set of flat tuples) to per-orbit
    acceptance counts."""
    N = count_types(n, q)
    counts: dict[int, int] = {}
    seen = set()
    for x in vectors:
        if x in seen:
            raise ValidationError(f"repeated decoder vector {x!r}")
        seen.add(x)
        types = tuple(
            type_index(type_of(x[b * n : (b + 1) * n], q)) for b in range(l)
        )
        t = tuple_to_index(types, N)
        counts[t] = counts.get(t, 0) + 1
    return counts


def full_orbit_counts(type_sets, n: int, q: int, l: int = 1) -> dict[int, int]:
    """Decoder that accepts every vector of the listed orbit products."""
    N = count_types(n, q)
    counts = {}
    for t in type_sets:
        size = 1
        for j in index_to_tuple(t, N, l):
            size *= typeclass_size(type_unrank(j, n, q))
        counts[t] = size
    return counts


@dataclass(frozen=True)
class ErrorReport:
    """Exact error figures of an identification code.

    `missed[i-1]` is the missed-detection probability of message i. `accept`
    is the full M x M acceptance matrix (row = sent message, column = tested
    message) when M <= MATRIX_CAP, else None. For M = 1 there are no cross
    pairs and lambda2 is 0 by convention. Messages are numbered 1..M.
    """

    M: int
    lambda1: Fraction
    lambda2: Fraction
    missed: tuple[Fraction, ...]
    argmax_miss: int
    argmax_cross: tuple[int, int] | None
    accept: tuple[tuple[Fraction, ...], ...] | None

    @property
    def total(self) -> Fraction:
        return self.lambda1 + self.lambda2


def _report_from_accept(accept_fn: Callable[[int, int], Fraction], M: int) -> ErrorReport:
    missed = []
    lambda2 = Fraction(0)
    argmax_cross = None
    keep_matrix = M <= MATRIX_CAP
    rows = [] if keep_matrix else None
    for i in range(1, M + 1):
        row = []
        for j in range(1, M + 1):
            p = accept_fn(i, j)
            if not 0 <= p <= 1:
                raise BoundViolationError(f"acceptance probability {p} outside [0,1]")
            if i != j and p > lambda2:
                lambda2 = p
                argmax_cross = (i, j)
            if keep_matrix:
                row.append(p)
            elif i == j:
                missed_own = 1 - p
        if keep_matrix:
            rows.append(tuple(row))
            missed.append(1 - row[i - 1])
        else:
            missed.append(missed_own)
    lambda1 = max(missed)
    argmax_miss = missed.index(lambda1) + 1
    return ErrorReport(
        M=M,
        lambda1=lambda1,
        lambda2=lambda2,
        missed=tuple(missed),
        argmax_miss=argmax_miss,
        argmax_cross=argmax_cross,
        accept=tuple(rows) if keep_matrix else None,
    )


def report_from_matrix(matrix: Sequence[Sequence[Fraction]]) -> ErrorReport:
    """Summarize a full acceptance matrix (row = sent, column = tested)."""
    return _report_from_accept(lambda i, j: matrix[i - 1][j - 1], len(matrix))


def acceptance_matrix(code) -> list[list[Fraction]]:
    """Full M x M acceptance matrix of a noiseless or permutation code,
    exact and uncapped. Entry [i][j] is P(decoder j+1 accepts | message i+1).
    """
    if isinstance(code, NoiselessIdCode):
        def accept(i: int, j: int) -> Fraction:
            dec = code.decoders[j - 1]
            return sum(
                (p * _accept_prob(dec, k) for k, p in code.encoders[i - 1].items()),
                Fraction(0),
            )
    elif isinstance(code, PermIdCode):
        pushed = [
            [(code.input_orbit(x), p) for x, p in code.encoders[i].items()]
            for i in range(code.M)
        ]
        sizes = {t: code.orbit_size(t) for pairs in pushed for t, _ in pairs}

        def accept(i: int, j: int) -> Fraction:
            dec = code.decoder_counts[j - 1]
            return sum(
                (p * Fraction(dec[t], sizes[t]) for t, p in pushed[i - 1] if t in dec),
                Fraction(0),
            )
    else:
        raise ValidationError(f"unsupported code type {type(code).__name__}")
    return [[accept(i, j) for j in range(1, code.M + 1)] for i in range(1, code.M + 1)]


def eval_noiseless(code: NoiselessIdCode) -> ErrorReport:
    """Exact acceptance matrix of a noiseless-channel code."""

    def accept(i: int, j: int) -> Fraction:
        dec = code.decoders[j - 1]
        return sum(
            (p * _accept_prob(dec, k) for k, p in code.encoders[i - 1].items()),
            Fraction(0),
        )

    return _report_from_accept(accept, code.M)


def eval_perm_exact(code: PermIdCode) -> ErrorReport:
    """Exact acceptance matrix of a permutation-channel code.

    Sums over encoder supports only; the channel enters through per-orbit
    acceptance ratios, so orbits are never enumerated.
    """
    # Cache each encoder as (orbit index, mass) pairs once, not per decoder.
    pushed = []
    for i in range(1, code.M + 1):
        pairs = []
        for x, p in code.encoders[i - 1].items():
            pairs.append((code.input_orbit(x), p))
        pushed.append(pairs)
    sizes = {t: code.orbit_size(t) for pairs in pushed for t, _ in pairs}

    def accept(i: int, j: int) -> Fraction:
        dec = code.decoder_counts[j - 1]
        total = Fraction(0)
        for t, p in pushed[i - 1]:
            c = dec.get(t, 0)
            if c:
                total += p * Fraction(c, sizes[t])
        return total

    return _report_from_accept(accept, code.M)


@dataclass(frozen=True)
class MCReport:
    """Monte Carlo estimate of the acceptance matrix.

    Every sampling step uses integer arithmetic on exact odds, so each cell
    estimator is unbiased for the true rational acceptance probability.
    `stderr` is the larger binomial standard error of the two reported
    extremes."""

    M: int
    trials: int
    lambda1_hat: float
    lambda2_hat: float
    stderr: float
    accept_hat: tuple[tuple[float, ...], ...] | None


def _exact_sampler(dist: Dist, rand) -> Callable[[], object]:
    """Sampler with the exact law of `dist`, via one randrange per draw."""
    items = sorted(dist.items(), key=lambda kv: repr(kv[0]))
    denom = math.lcm(*(p.denominator for _, p in items))
    cuts = []
    acc = 0
    for _, p in items:
        acc += p.numerator * (denom // p.denominator)
        cuts.append(acc)
    if acc != denom:
        raise PermidError("sampler weights must total the common denominator")
    keys = [k for k, _ in items]

    def draw():
        return keys[bisect_right(cuts, rand.randrange(denom))]

    return draw


def eval_perm_mc(code: PermIdCode, trials: int, stream: Stream) -> MCReport:
    """Estimate the acceptance matrix by simulating the channel.

    For each sent message, each trial draws an input from the encoder and a
    uniform position inside its output orbit; decoder j accepts when the
    position falls below its per-orbit count. Output vectors themselves are
    never materialized.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    M = code.M
    hits = [[0] * M for _ in range(M)]
    for i in range(1, M + 1):
        sub = stream.child(f"mc/msg{i}")
        rand = sub.rand
        draw = _exact_sampler(code.encoders[i - 1], rand)
        orbit_cache: dict[object, tuple[int, int]] = {}
        for _ in range(trials):
            x = draw()
            cached = orbit_cache.get(x)
            if cached is None:
                t = code.input_orbit(x)
                cached = (t, code.orbit_size(t))
                orbit_cache[x] = cached
            t, size = cached
            u = rand.randrange(size)
            row = hits[i - 1]
            for j in range(M):
                if u < code.decoder_counts[j].get(t, 0):
                    row[j] += 1
    accept_hat = tuple(tuple(h / trials for h in row) for row in hits)
    lambda1_hat = max(1.0 - accept_hat[i][i] for i in range(M))
    lambda2_hat = max(
        (accept_hat[i][j] for i in range(M) for j in range(M) if i != j),
        default=0.0,
    )
    def se(p: float) -> float:
        return math.sqrt(p * (1.0 - p) / trials)

    return MCReport(
        M=M,
        trials=trials,
        lambda1_hat=lambda1_hat,
        lambda2_hat=lambda2_hat,
        stderr=max(se(lambda1_hat), se(lambda2_hat)),
        accept_hat=accept_hat if M <= MATRIX_CAP else None,
    )


@dataclass(frozen=True)
class AchievableParams:
    """Derived parameters of the orbit-union achievable construction.

    The working exponent is s = a + l*log2(N) with a = eps * n^(l*(q-1)) + 1.
    Sets of `gamma` orbit indices with pairwise intersections at most `cap`
    yield codes with lambda1 = 0 and lambda2 <= cap/gamma; `target` is the
    guaranteed family size ceil(2^(s-1) / N^l), which collapses to the exact
    rational power ceil(2^(a-1)). `cap_vacuous` flags cap >= gamma, where the
    intersection constraint no longer binds and the lambda2 budget exceeds 1.
    """

    n: int
    q: int
    l: int
    epsilon: Fraction
    N: int
    ground: int
    a: Fraction
    gamma: int
    cap: int
    target: int
    cap_vacuous: bool

    @property
    def lambda2_budget(self) -> Fraction:
        return Fraction(self.cap, self.gamma)

    @property
    def s_float(self) -> float:
        return float(self.a) + self.l * math.log2(self.N)

    @property
    def eps_prime_float(self) -> float:
        return self.s_float / self.ground


def _stable_cap(a: Fraction, N: int, l: int) -> int:
    """floor(4*s / log2(N^l / s)) with s = a + l*log2(N), via adaptive-precision
    evaluation; raises if the floor is still ambiguous at 1000 digits."""
    import mpmath

    for digits in (60, 120, 240, 1000):
        with mpmath.workdps(digits):
            s = mpmath.mpf(a.numerator) / a.denominator + l * mpmath.log(N, 2)
            val = 4 * s / mpmath.log(mpmath.mpf(N) ** l / s, 2)
            fl = int(mpmath.floor(val))
            frac = val - fl
            pad = mpmath.mpf(10) ** (-(digits // 2))
            if pad < frac < 1 - pad:
                return fl
    raise PermidError("cap floor is numerically ambiguous at 1000 digits")


def _eps_prime_small(n: int, q: int, epsilon: Fraction, l: int) -> bool:
    """Exact test of eps' = s/N^l < 1/6 at this block length."""
    N = count_types(n, q)
    a = epsilon * n ** (l * (q - 1)) + 1
    return compare_log2(N, (N**l - 6 * a) / (6 * l)) < 0


def min_feasible_n(q: int, epsilon: Fraction, l: int = 1, n_max: int = 4096) -> int | None:
    """Smallest n <= n_max where the construction hypothesis eps' < 1/6 holds.

    Returns None when no block length up to n_max works; that happens when
    epsilon is too large for this alphabet (the leading term of s grows like
    epsilon * ((q-1)!)^l * N^l, so past a q-dependent threshold no n helps).
    """
    epsilon = Fraction(epsilon)
    for n in range(1, n_max + 1):
        if _eps_prime_small(n, q, epsilon, l):
            return n
    return None


def achievable_params(n: int, q: int, epsilon: Fraction, l: int = 1) -> AchievableParams:
    """Resolve the construction parameters and check its hypotheses exactly.

    Requires eps' = s/N^l < 1/6 (which already forces the second hypothesis
    (1-eps')^2 > eps', since t^2 - 3t + 1 > 0 for t > 6 with t = 1/eps').
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ValidationError("epsilon must be in (0,1)")
    if not (isinstance(l, int) and l >= 1):
        raise ValidationError("l must be a positive integer")
    N = count_types(n, q)
    ground = N**l
    a = epsilon * n ** (l * (q - 1)) + 1
    # eps' < 1/6  <=>  6*(a + l*log2 N) < N^l  <=>  log2 N < (N^l - 6a)/(6l)
    if compare_log2(N, (ground - 6 * a) / (6 * l)) >= 0:
        least = min_feasible_n(q, epsilon, l)
        hint = f"the smallest workable n is {least}" if least else "no n up to 4096 works"
        raise HypothesisError(
            f"eps' = s/{ground} with s = eps*n^(l*(q-1)) + 1 + l*log2(N) is "
            f"not below 1/6 at n={n}, q={q}, l={l}, eps={epsilon}; {hint}"
        )
    gamma = floor_plus_log2(a, N, mult=l)
    if gamma < 1:
        raise HypothesisError(f"orbit-set size floor(s) = {gamma} < 1")
    if gamma > ground:
        raise HypothesisError(f"orbit-set size {gamma} exceeds ground {ground}")
    cap = _stable_cap(a, N, l)
    target = ceil_pow2_over(a - 1, 1)
    return AchievableParams(
        n=n,
        q=q,
        l=l,
        epsilon=epsilon,
        N=N,
        ground=ground,
        a=a,
        gamma=gamma,
        cap=cap,
        target=target,
        cap_vacuous=cap >= gamma,
    )


@dataclass
class AchievableBuild:
    code: PermIdCode
    params: AchievableParams
    system: SetSystem
    profile: IntersectionProfile
    attempts: int


def _orbit_representative(t: int, n: int, q: int, N: int, l: int) -> tuple[int, ...]:
    """Lexicographically smallest vector of the orbit product t, flattened."""
    flat: tuple[int, ...] = ()
    for j in index_to_tuple(t, N, l):
        flat += type_representative(type_unrank(j, n, q))
    return flat


def build_multishot_achievable(
    n: int,
    q: int,
    l: int,
    epsilon: Fraction,
    stream: Stream,
    max_attempts: int = 500_000,
) -> AchievableBuild:
    """Construct an achievable code for l channel uses.

    Greedily collects `target` orbit-index sets of size gamma with pairwise
    intersections at most cap, then turns each set U into a message: encode
    uniformly over the gamma orbit representatives of U, accept exactly the
    union of those orbit products. Misses are impossible (the output orbit
    equals the input orbit), so lambda1 = 0 and every cross acceptance is
    |U_i meet U_j| / gamma.
    """
    params = achievable_params(n, q, epsilon, l=l)
    kept, attempts = grow_family(
        params.ground, params.gamma, params.cap, params.target, stream, max_attempts
    )
    if len(kept) < params.target:
        raise PermidError(
            f"greedy stalled at {len(kept)}/{params.target} sets "
            f"after {attempts} attempts; raise max_attempts"
        )
    system = SetSystem(params.ground, tuple(kept))
    profile = verify_profile(system)
    encoders = []
    counts = []
    for U in kept:
        reps = [_orbit_representative(t, n, q, params.N, l) for t in sorted(U)]
        encoders.append(Dist.uniform(reps))
        counts.append(full_orbit_counts(sorted(U), n, q, l))
    code = PermIdCode(n, q, encoders, counts, l=l)
    return AchievableBuild(
        code=code, params=params, system=system, profile=profile, attempts=attempts
    )


def build_oneshot_achievable(
    n: int,
    q: int,
    epsilon: Fraction,
    stream: Stream,
    max_attempts: int = 500_000,
) -> AchievableBuild:
    """Single channel use case of the orbit-union construction."""
    return build_multishot_achievable(
        n, q, 1, epsilon, stream, max_attempts=max_attempts
    )


def strong_converse_floor(code) -> Fraction:
    """Lower bound on lambda1 + lambda2 from output-distribution closeness:
    max(0, 1 - min over message pairs of the L1 output distance).

    Identical output laws force the floor 1 (the decoder cannot separate the
    pair at all); disjoint supports give L1 distance 2 and a trivial floor.
    """
    if code.M < 2:
        raise HypothesisError("the pairwise converse needs at least two messages")
    if isinstance(code, NoiselessIdCode):
        outs = list(code.encoders)
    elif isinstance(code, PermIdCode):
        outs = [code.output_dist(i) for i in range(1, code.M + 1)]
    else:
        raise ValidationError(f"unsupported code type {type(code).__name__}")
    best = min(
        tv_distance(outs[i], outs[j])
        for i in range(code.M)
        for j in range(i + 1, code.M)
    )
    floor = 1 - best
    return floor if floor > 0 else Fraction(0)


def check_strong_converse(code, report: ErrorReport) -> Fraction:
    """Replay the converse against an exact report; returns the floor."""
    floor = strong_converse_floor(code)
    if report.lambda1 + report.lambda2 < floor:
        raise BoundViolationError(
            f"lambda1+lambda2 = {report.lambda1 + report.lambda2} "
            f"below the converse floor {floor}"
        )
    return floor
