"""Two-phase identification over the permutation channel with feedback.

Phase one transmits a fixed pilot vector (from the largest orbit) for l-1
blocks; the noiseless feedback link shows the sender the realized outputs.
Phase two transmits the representative of an orbit chosen by a per-message
lookup table indexed by those outputs. The receiver, knowing the tables and
the feedback, accepts a message iff the last output lands in that message's
chosen orbit. A message always lands in its own chosen orbit, so misses are
impossible, and cross errors are table collisions, which exact counting or
simulation measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .combinatorics import (
    TypeVector,
    count_types,
    iter_types,
    type_index,
    type_of,
    type_representative,
    type_unrank,
    typeclass_size,
    vector_rank,
    vector_unrank,
)
from .errors import (
    BoundViolationError,
    BudgetError,
    HypothesisError,
    ValidationError,
)
from .rng import Stream

TABLE_BUDGET = 2**26
MATRIX_CAP = 4096


def max_typeclass(n: int, q: int) -> tuple[TypeVector, int]:
    """The orbit with the most vectors (ties to the smallest type index).

    For n >= q-1 the winner's size is also checked against the two-sided
    bound q^n / (2n)^(q-1) <= size <= q^n, exactly.
    """
    best: TypeVector | None = None
    best_size = -1
    for t in iter_types(n, q):
        size = typeclass_size(t)
        if size > best_size:
            best, best_size = t, size
    if n >= q - 1:
        if best_size > q**n or q**n > best_size * (2 * n) ** (q - 1):
            raise BoundViolationError(
                f"largest orbit size {best_size} violates its two-sided bound "
                f"at n={n}, q={q}"
            )
    return best, best_size


class FeedbackCode:
    """Pilot vector plus M lookup tables over pilot-output rank tuples.

    `maps` has shape (M, D) with D = |pilot orbit|^(l-1); rows are messages,
    columns are flattened rank tuples (first pilot block most significant),
    entries are orbit indices in [1..N].
    """

    def __init__(self, n: int, q: int, l: int, maps: np.ndarray):
        if not (isinstance(l, int) and l >= 2):
            raise ValidationError("feedback needs l >= 2 blocks")
        self.n = n
        self.q = q
        self.l = l
        self.N = count_types(n, q)
        self.pstar, self.orbit = max_typeclass(n, q)
        self.pilot = type_representative(self.pstar)
        self.D = self.orbit ** (l - 1)
        maps = np.asarray(maps)
        if maps.ndim != 2 or maps.shape[1] != self.D:
            raise ValidationError(
                f"maps must have shape (M, {self.D}), got {maps.shape}"
            )
        if maps.shape[0] < 1:
            raise ValidationError("need at least one message")
        if not np.issubdtype(maps.dtype, np.integer):
            raise ValidationError("map entries must be integers")
        if maps.min() < 1 or maps.max() > self.N:
            raise ValidationError(f"map entries must lie in [1..{self.N}]")
        self.maps = maps

    @property
    def M(self) -> int:
        return int(self.maps.shape[0])

    def flat_index(self, ranks) -> int:
        """Flatten a (l-1)-tuple of pilot-output ranks, each in [0..orbit)."""
        if len(ranks) != self.l - 1:
            raise ValidationError(f"need {self.l - 1} ranks, got {len(ranks)}")
        flat = 0
        for r in ranks:
            if not 0 <= r < self.orbit:
                raise ValidationError(f"rank {r} outside [0..{self.orbit})")
            flat = flat * self.orbit + r
        return flat


def _table_dtype(N: int):
    if N <= np.iinfo(np.uint8).max:
        return np.uint8
    if N <= np.iinfo(np.uint16).max:
        return np.uint16
    return np.uint32


def build_feedback_code(
    n: int, q: int, l: int, M: int, stream: Stream, budget: int = TABLE_BUDGET
) -> FeedbackCode:
    """Draw the M lookup tables i.i.d. uniform over [1..N].

    Refuses tables beyond `budget` entries; shrink the instance in that case
    (the tables are the whole construction, there is nothing to stream).
    """
    if not (isinstance(M, int) and M >= 1):
        raise ValidationError("M must be a positive integer")
    if l < 2:
        raise ValidationError("feedback needs l >= 2 blocks")
    N = count_types(n, q)
    _, orbit = max_typeclass(n, q)
    D = orbit ** (l - 1)
    if D > budget or M * D > budget:
        raise BudgetError(
            f"table of {M} x {D} entries exceeds the budget of {budget}"
        )
    maps = stream.numpy.integers(1, N + 1, size=(M, D), dtype=_table_dtype(N))
    return FeedbackCode(n, q, l, maps)


@dataclass(frozen=True)
class CollisionReport:
    """Collision statistics of the lookup tables.

    lambda_{j->k} is the fraction of rank tuples where tables j and k agree;
    it is symmetric, and equals the exact cross-acceptance probability of the
    code. `counts` holds the pairwise agreement counts (diagonal zeroed) when
    M*M is small enough, else None. lambda2 is None for a single message.
    Misses cannot happen, so lambda1 is identically zero.
    """

    M: int
    D: int
    N: int
    lambda1: Fraction
    lambda2: Fraction | None
    max_count: int
    argmax_pair: tuple[int, int] | None
    counts: np.ndarray | None
    target: Fraction

    @property
    def passed(self) -> bool:
        """Whether lambda2 meets the 2/N target (vacuously true at M=1)."""
        return self.lambda2 is None or self.lambda2 <= self.target


def eval_feedback_exact(code: FeedbackCode) -> CollisionReport:
    """Count table agreements for every message pair, exactly."""
    M, D = code.M, code.D
    keep = M <= MATRIX_CAP
    counts = np.zeros((M, M), dtype=np.int64) if keep else None
    max_count = -1
    argmax_pair = None
    for j in range(M - 1):
        agree = (code.maps[j + 1 :] == code.maps[j]).sum(axis=1)
        k_rel = int(agree.argmax())
        if int(agree[k_rel]) > max_count:
            max_count = int(agree[k_rel])
            argmax_pair = (j + 1, j + 2 + k_rel)
        if keep:
            counts[j, j + 1 :] = agree
            counts[j + 1 :, j] = agree
    if M == 1:
        return CollisionReport(
            M=M,
            D=D,
            N=code.N,
            lambda1=Fraction(0),
            lambda2=None,
            max_count=0,
            argmax_pair=None,
            counts=counts,
            target=Fraction(2, code.N),
        )
    return CollisionReport(
        M=M,
        D=D,
        N=code.N,
        lambda1=Fraction(0),
        lambda2=Fraction(max_count, D),
        max_count=max_count,
        argmax_pair=argmax_pair,
        counts=counts,
        target=Fraction(2, code.N),
    )


@dataclass(frozen=True)
class FeedbackMCReport:
    """Simulation estimates; lambda1_hat must come out exactly 0."""

    M: int
    trials: int
    lambda1_hat: float
    lambda2_hat: float
    stderr: float
    accept_hat: tuple[tuple[float, ...], ...] | None


def eval_feedback_mc(code: FeedbackCode, trials: int, stream: Stream) -> FeedbackMCReport:
    """Simulate the two phases end to end.

    Each trial permutes the pilot blocks (drawing a uniform orbit element),
    lets the sender read them back, transmits the chosen orbit's
    representative, permutes it, and runs every decoder on the final output.
    The sender's own decoder must accept in every trial.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    M = code.M
    hits = [[0] * M for _ in range(M)]
    for i in range(1, M + 1):
        rand = stream.child(f"mc/msg{i}").rand
        row = hits[i - 1]
        for _ in range(trials):
            ranks = []
            for _b in range(code.l - 1):
                y = vector_unrank(code.pstar, rand.randrange(code.orbit))
                ranks.append(vector_rank(y, code.q))
            flat = code.flat_index(ranks)
            sent_orbit = int(code.maps[i - 1, flat])
            x_last = type_representative(type_unrank(sent_orbit, code.n, code.q))
            t_last = type_of(x_last, code.q)
            y_last = vector_unrank(t_last, rand.randrange(typeclass_size(t_last)))
            out_orbit = type_index(type_of(y_last, code.q))
            if out_orbit != sent_orbit:
                raise BoundViolationError("channel output left the input orbit")
            column = code.maps[:, flat]
            for k in range(M):
                if int(column[k]) == out_orbit:
                    row[k] += 1
    accept_hat = tuple(tuple(h / trials for h in row) for row in hits)
    lambda1_hat = max(1.0 - accept_hat[i][i] for i in range(M))
    if lambda1_hat != 0.0:
        raise BoundViolationError("a sender's own decoder rejected in simulation")
    lambda2_hat = max(
        (accept_hat[i][j] for i in range(M) for j in range(M) if i != j),
        default=0.0,
    )
    return FeedbackMCReport(
        M=M,
        trials=trials,
        lambda1_hat=lambda1_hat,
        lambda2_hat=lambda2_hat,
        stderr=math.sqrt(lambda2_hat * (1.0 - lambda2_hat) / trials),
        accept_hat=accept_hat if M <= MATRIX_CAP else None,
    )


def target_test(code: FeedbackCode) -> bool:
    """True iff the exact lambda2 meets the 2/N target; M >= 2 required."""
    if code.M < 2:
        raise HypothesisError("the target test needs at least two messages")
    threshold = 2 * code.D  # lambda2 <= 2/N  <=>  N * max_count <= 2 * D
    for j in range(code.M - 1):
        agree = (code.maps[j + 1 :] == code.maps[j]).sum(axis=1)
        if int(agree.max()) * code.N > threshold:
            return False
    return True


@dataclass(frozen=True)
class RetryResult:
    code: FeedbackCode
    report: CollisionReport
    draws: int
    success: bool


def build_until_target(
    n: int,
    q: int,
    l: int,
    M: int,
    stream: Stream,
    budget_draws: int = 10,
) -> RetryResult:
    """Redraw the tables until the 2/N target passes or the budget runs out.

    Each draw uses a fresh child stream, so the sequence is reproducible and
    any draw can be replayed in isolation. The last drawn code is returned
    either way, with its exact report and the number of draws spent.
    """
    if budget_draws < 1:
        raise ValidationError("need at least one draw")
    code = None
    for attempt in range(1, budget_draws + 1):
        code = build_feedback_code(n, q, l, M, stream.child(f"draw{attempt}"))
        if target_test(code):
            return RetryResult(
                code=code,
                report=eval_feedback_exact(code),
                draws=attempt,
                success=True,
            )
    return RetryResult(
        code=code,
        report=eval_feedback_exact(code),
        draws=budget_draws,
        success=False,
    )


def feedback_counting_converse(n: int, q: int, l: int, M: int) -> bool:
    """True iff M < 2^(q^(n*l)), compared exactly without forming the tower.

    M messages need M distinct nonempty decoder subsets of the q^(n*l)
    possible output words, of which there are 2^(q^(n*l)) - 1. The
    comparison reduces to bit lengths: M < 2^E iff bit_length(M) <= E, and
    q^(n*l) >= bit_length(M) is settled by growing powers of q.
    """
    if n < 1 or l < 1:
        raise ValidationError("n and l must be positive")
    if q < 2:
        raise ValidationError("q must be >= 2")
    if M < 1:
        raise ValidationError("M must be positive")
    bl = M.bit_length()
    power, e = 1, 0
    while power < bl:
        power *= q
        e += 1
    # Now q^e is the first power reaching bit_length(M).
    return n * l >= e
