"""Code-to-code transformations with exactly verified error guarantees.

Five maps, designed to chain:

1. lift a permutation-channel code to an error-equivalent noiseless code on
   orbit indices (one or several channel uses);
2. threshold stochastic decoders into deterministic ones;
3. flatten each encoder to a uniform distribution on a well-chosen mass bin;
4. shrink each decoder to the encoder support so misses vanish;
5. keep a largest group of messages whose supports share one size.

The composite turns any permutation-channel code into an equal-size support
family whose intersection profile reproduces its cross error. Every map
re-derives the exact acceptance matrices of its input and output and checks
the advertised inequality entry by entry in rational (or algebraic-sign)
arithmetic; a failed check raises BoundViolationError, since it would mean
the construction is wrong, not the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .dist import Dist
from .errors import BoundViolationError, HypothesisError, PermidError, ValidationError
from .exact import compare_power, power_sign
from .idcode import (
    ErrorReport,
    NoiselessIdCode,
    PermIdCode,
    acceptance_matrix,
    report_from_matrix,
)
from .setsystem import IntersectionProfile, SetSystem, verify_profile


@dataclass(frozen=True)
class StepResult:
    """One transform application: the new code, exact reports on both sides,
    and the names of the inequalities that were verified."""

    name: str
    code: NoiselessIdCode
    before: ErrorReport
    after: ErrorReport
    checks: tuple[str, ...]


def gamma_for_rate(mu: Fraction, q: int) -> Fraction:
    """Default bin-resolution choice for one channel use: mu/(4(q-1))."""
    mu = Fraction(mu)
    if mu <= 0:
        raise ValidationError("mu must be positive")
    if q < 2:
        raise ValidationError("q must be >= 2")
    return mu / (4 * (q - 1))


def gamma_for_rate_multishot(mu: Fraction, q: int, l: int) -> Fraction:
    """Multishot variant spreading the same margin over l uses: mu/(4l(q-1))."""
    if l < 1:
        raise ValidationError("l must be >= 1")
    return gamma_for_rate(mu, q) / l


def perm_to_noiseless(code: PermIdCode) -> StepResult:
    """Replace the permutation channel by a noiseless channel on orbit
    indices, preserving the acceptance matrix exactly.

    Encoders push forward to output-orbit distributions; decoders become
    stochastic accept tables P(accept | orbit) = count / orbit size. When all
    counts are 0 or full, the table is 0/1-valued and is emitted as a
    deterministic decoder.
    """
    before_matrix = acceptance_matrix(code)
    encoders = [code.output_dist(i) for i in range(1, code.M + 1)]
    decoders = []
    for counts in code.decoder_counts:
        table = {t: Fraction(c, code.orbit_size(t)) for t, c in counts.items()}
        if all(p == 1 for p in table.values()):
            decoders.append(frozenset(table))
        else:
            decoders.append(table)
    lifted = NoiselessIdCode(code.ground, encoders, decoders)
    after_matrix = acceptance_matrix(lifted)
    if before_matrix != after_matrix:
        raise BoundViolationError("orbit lift changed the acceptance matrix")
    return StepResult(
        name="noiseless-lift",
        code=lifted,
        before=report_from_matrix(before_matrix),
        after=report_from_matrix(after_matrix),
        checks=("acceptance matrix equal entrywise",),
    )


def perm_to_noiseless_multishot(code: PermIdCode, l: int | None = None) -> StepResult:
    """Orbit lift for an l-use code; the ground set is the N^l orbit products.

    The lift is the same map as the single-use one (the code object already
    carries l); the parameter is accepted for explicitness and must match.
    """
    if l is not None and l != code.l:
        raise ValidationError(f"code has l={code.l}, got l={l}")
    return perm_to_noiseless(code)


def stoch_to_det_decoders(code: NoiselessIdCode) -> StepResult:
    """Threshold stochastic decoders at alpha = sqrt(lambda2).

    The new decoder keeps exactly the outcomes with accept probability above
    alpha, tested without radicals as P^2 > lambda2. Guarantees, verified
    exactly per entry: cross acceptances at most lambda_{i->j}/alpha (hence
    at most sqrt(lambda_{i->j})), misses grow by at most alpha. For
    lambda2 = 0 the rule degenerates to keeping the positive-probability
    outcomes, and the same comparisons go through.
    """
    before_matrix = acceptance_matrix(code)
    before = report_from_matrix(before_matrix)
    lam2 = before.lambda2
    decoders = []
    for dec in code.decoders:
        table = dec if isinstance(dec, dict) else {k: Fraction(1) for k in dec}
        decoders.append(frozenset(k for k, p in table.items() if p * p > lam2))
    new_code = NoiselessIdCode(code.N, code.encoders, decoders)
    after_matrix = acceptance_matrix(new_code)
    M = code.M
    for i in range(M):
        for j in range(M):
            old = before_matrix[i][j]
            new = after_matrix[i][j]
            if i == j:
                gap = (1 - new) - (1 - old)
                if gap > 0 and gap * gap > lam2:
                    raise BoundViolationError(
                        f"miss of message {i + 1} grew past sqrt(lambda2)"
                    )
            else:
                if new * new * lam2 > old * old:
                    raise BoundViolationError(
                        f"cross {i + 1}->{j + 1} exceeds lambda/alpha"
                    )
                if new * new > old:
                    raise BoundViolationError(
                        f"cross {i + 1}->{j + 1} exceeds sqrt(lambda)"
                    )
    return StepResult(
        name="deterministic-decoders",
        code=new_code,
        before=before,
        after=report_from_matrix(after_matrix),
        checks=(
            "cross * alpha <= old cross (squared form)",
            "cross <= sqrt(old cross) (squared form)",
            "miss increase <= alpha (squared form)",
        ),
    )


def _bin_of(p: Fraction, N: int, gamma: Fraction, kappa: int) -> int | None:
    """Index of the dyadic-in-N^gamma bin holding mass p, or None when the
    mass falls below every bin: bin b holds N^(-gamma*b) < p <= N^(-gamma*(b-1))."""
    for b in range(1, kappa + 1):
        if compare_power(p, N, -gamma * b) > 0:
            # p clears this bin's floor; the first cleared floor is the bin,
            # because the ceilings nest.
            return b
    return None


@dataclass(frozen=True)
class UniformizeResult(StepResult):
    """Step-3 payload: the resolution gamma, the bin count kappa, each
    message's chosen bin, and whether the published factor is vacuous
    (old lambda2 times factor at least 1)."""

    gamma: Fraction
    kappa: int
    chosen_bins: tuple[int, ...]
    factor_vacuous: bool


def to_uniform_encoders(code: NoiselessIdCode, gamma: Fraction) -> UniformizeResult:
    """Make every encoder uniform by keeping its heaviest mass bin.

    Masses are binned on the geometric grid N^(-gamma*b), b = 1..kappa with
    kappa = ceil(1/gamma) + 1; each encoder becomes uniform on its
    largest-mass bin U_i (ties to the smallest bin index). Each entry of the
    acceptance matrix, and each miss, grows by at most the factor
    (1+2*gamma)*N^gamma / (gamma*(1-N^(-gamma))); the construction actually
    achieves the sharper kappa*N^gamma / (1-N^(1-gamma*kappa)). Both bounds
    are verified per entry by exact sign evaluation; the published one is
    also flagged as vacuous when old-lambda2 times the factor reaches 1.
    """
    gamma = Fraction(gamma)
    if not 0 < gamma < 1:
        raise ValidationError("gamma must be in (0,1)")
    N = code.N
    if N < 2:
        raise HypothesisError("binning needs a ground set with N >= 2")
    kappa = math.ceil(1 / gamma) + 1
    # kappa sits strictly between the endpoints used to simplify the factor:
    # (1+gamma)/gamma <= kappa < (1+2*gamma)/gamma, the left side tight when
    # 1/gamma is an integer.
    if not ((1 + gamma) / gamma <= kappa < (1 + 2 * gamma) / gamma):
        raise PermidError(f"kappa = {kappa} outside its bracket for gamma = {gamma}")
    before_matrix = acceptance_matrix(code)
    before = report_from_matrix(before_matrix)
    encoders = []
    chosen = []
    for enc in code.encoders:
        bins: dict[int, list] = {}
        for k, p in enc.items():
            b = _bin_of(p, N, gamma, kappa)
            if b is not None:
                bins.setdefault(b, []).append(k)
        if not bins:
            raise HypothesisError(
                "every encoder mass sits below the last bin floor; "
                "impossible at total mass 1, so the encoder is malformed"
            )
        weight = {b: sum((enc[k] for k in ks), Fraction(0)) for b, ks in bins.items()}
        best = max(weight.values())
        b_star = min(b for b, w in weight.items() if w == best)
        chosen.append(b_star)
        encoders.append(Dist.uniform(bins[b_star], size=code.N))
    new_code = NoiselessIdCode(code.N, encoders, code.decoders)
    after_matrix = acceptance_matrix(new_code)
    published = (
        "published factor",
        lambda new, old: power_sign(
            [(new * gamma, 0), (-new * gamma, -gamma), (-old * (1 + 2 * gamma), gamma)],
            N,
        ),
    )
    internal = (
        "internal factor",
        lambda new, old: power_sign(
            [(new, 0), (-new, 1 - gamma * kappa), (-old * kappa, gamma)], N
        ),
    )
    M = code.M
    for i in range(M):
        for j in range(M):
            old = before_matrix[i][j] if i != j else 1 - before_matrix[i][j]
            new = after_matrix[i][j] if i != j else 1 - after_matrix[i][j]
            for label, check in (published, internal):
                if check(new, old) > 0:
                    raise BoundViolationError(
                        f"{label} bound fails at entry ({i + 1},{j + 1}): "
                        f"new={new}, old={old}, gamma={gamma}"
                    )
    lam2 = before.lambda2
    vacuous = (
        power_sign(
            [(lam2 * (1 + 2 * gamma), gamma), (-gamma, 0), (gamma, -gamma)], N
        )
        >= 0
    )
    return UniformizeResult(
        name="uniform-encoders",
        code=new_code,
        before=before,
        after=report_from_matrix(after_matrix),
        checks=(
            "entrywise growth within published factor",
            "entrywise growth within internal factor",
            "kappa bracket",
        ),
        gamma=gamma,
        kappa=kappa,
        chosen_bins=tuple(chosen),
        factor_vacuous=vacuous,
    )


def decoder_equals_support(code: NoiselessIdCode) -> StepResult:
    """Condition each encoder on its own decoder and shrink the decoder to
    the surviving support, so every message is always detected.

    Needs every miss probability below 1; a message whose encoder never hits
    its decoder has nothing to condition on and is rejected as inapplicable.
    Cross entries obey new * (1 - old miss of the sender) <= old, exactly.
    """
    if not code.is_deterministic():
        raise ValidationError(
            "support restriction expects deterministic decoders; "
            "threshold the code first"
        )
    before_matrix = acceptance_matrix(code)
    before = report_from_matrix(before_matrix)
    dead = [i + 1 for i in range(code.M) if before.missed[i] == 1]
    if dead:
        raise HypothesisError(
            f"messages {dead} never hit their decoder (miss probability 1); "
            "support restriction is inapplicable to them"
        )
    encoders = []
    decoders = []
    for idx, enc in enumerate(code.encoders):
        dec = code.decoders[idx]
        kept = {k: p for k, p in enc.items() if k in dec}
        total = sum(kept.values(), Fraction(0))
        encoders.append(Dist({k: p / total for k, p in kept.items()}, size=code.N))
        decoders.append(frozenset(kept))
    new_code = NoiselessIdCode(code.N, encoders, decoders)
    after_matrix = acceptance_matrix(new_code)
    after = report_from_matrix(after_matrix)
    if after.lambda1 != 0:
        raise BoundViolationError("support restriction left a positive miss")
    M = code.M
    for i in range(M):
        for j in range(M):
            if i == j:
                continue
            if after_matrix[i][j] * (1 - before.missed[i]) > before_matrix[i][j]:
                raise BoundViolationError(
                    f"cross {i + 1}->{j + 1} exceeds old/(1 - old miss)"
                )
    return StepResult(
        name="decoder-equals-support",
        code=new_code,
        before=before,
        after=after,
        checks=(
            "all misses exactly 0",
            "cross * (1 - old miss) <= old cross",
        ),
    )


@dataclass(frozen=True)
class SelectResult(StepResult):
    """Step-5 payload: which messages were kept and their shared support size."""

    kept: tuple[int, ...]
    support_size: int


def equal_size_supports(code: NoiselessIdCode) -> SelectResult:
    """Keep a largest group of messages with equal support size.

    Supports of distinct sizes can only form at most N groups, so the kept
    group has at least ceil(M/N) messages; ties go to the smallest size.
    Both error figures can only shrink, since the kept code is a sub-family.
    """
    before_matrix = acceptance_matrix(code)
    before = report_from_matrix(before_matrix)
    by_size: dict[int, list[int]] = {}
    for i, enc in enumerate(code.encoders, start=1):
        by_size.setdefault(len(enc.mass), []).append(i)
    best = max(len(v) for v in by_size.values())
    k_star = min(k for k, v in by_size.items() if len(v) == best)
    kept = tuple(by_size[k_star])
    new_code = NoiselessIdCode(
        code.N,
        [code.encoders[i - 1] for i in kept],
        [code.decoders[i - 1] for i in kept],
    )
    after = report_from_matrix(acceptance_matrix(new_code))
    if len(kept) * code.N < code.M:
        raise BoundViolationError("pigeonhole failed: kept group below M/N")
    if after.lambda1 > before.lambda1 or after.lambda2 > before.lambda2:
        raise BoundViolationError("sub-family increased an error figure")
    return SelectResult(
        name="equal-size-supports",
        code=new_code,
        before=before,
        after=after,
        checks=(
            "kept count >= ceil(M/N)",
            "lambda1 and lambda2 not increased",
        ),
        kept=kept,
        support_size=k_star,
    )


@dataclass(frozen=True)
class PipelineReport:
    """End-to-end result of the five-step chain.

    `system` collects the final equal-size supports; when two messages end
    with the same support the system cannot be formed from distinct sets, so
    it is omitted and `duplicate_supports` is set (the final lambda2 is then
    exactly 1). Otherwise the profile's Delta/Gamma equals the final lambda2
    (0 when a single message survives), which is re-checked here.
    """

    steps: tuple[StepResult, ...]
    final_code: NoiselessIdCode
    final: ErrorReport
    system: SetSystem | None
    profile: IntersectionProfile | None
    duplicate_supports: bool


def soft_converse_pipeline(code: PermIdCode, gamma: Fraction) -> PipelineReport:
    """Run the full chain on a permutation-channel code and distill the
    resulting equal-size support family with its intersection profile."""
    lift = perm_to_noiseless(code)
    det = stoch_to_det_decoders(lift.code)
    uni = to_uniform_encoders(det.code, gamma)
    restricted = decoder_equals_support(uni.code)
    selected = equal_size_supports(restricted.code)
    final_code = selected.code
    final = selected.after
    supports = [frozenset(enc.support()) for enc in final_code.encoders]
    duplicates = len(set(supports)) < len(supports)
    system = None
    profile = None
    if duplicates:
        if final.lambda2 != 1:
            raise BoundViolationError(
                "duplicate supports must force a cross acceptance of 1"
            )
    else:
        system = SetSystem(final_code.N, tuple(supports))
        profile = verify_profile(system)
        expected = Fraction(profile.delta, profile.gamma)
        if expected != final.lambda2:
            raise BoundViolationError(
                f"profile ratio {expected} differs from final lambda2 {final.lambda2}"
            )
    return PipelineReport(
        steps=(lift, det, uni, restricted, selected),
        final_code=final_code,
        final=final,
        system=system,
        profile=profile,
        duplicate_supports=duplicates,
    )
