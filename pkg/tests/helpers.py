"""Random code generators shared across the test modules.

Everything here is driven by a plain `random.Random` so the sweeps are
reproducible from the literal seeds written in the tests. Masses are built
from small integer weights, so every probability is an exact Fraction with a
modest denominator.
"""

from fractions import Fraction
from itertools import product

from permid import Dist, NoiselessIdCode, PermIdCode
from permid.combinatorics import count_types
from permid.idcode import counts_from_vector_set


def random_dist(rand, N, max_weight=9):
    """Exact random distribution on [1..N] with a random support."""
    k = rand.randint(1, N)
    support = rand.sample(range(1, N + 1), k)
    weights = [rand.randint(1, max_weight) for _ in support]
    total = sum(weights)
    return Dist({s: Fraction(w, total) for s, w in zip(support, weights)}, size=N)


def random_decoder(rand, N, stochastic, den=8):
    if not stochastic:
        k = rand.randint(1, N)
        return frozenset(rand.sample(range(1, N + 1), k))
    table = {}
    for k in range(1, N + 1):
        num = rand.randint(0, den)
        if num:
            table[k] = Fraction(num, den)
    if not table:
        table[rand.randint(1, N)] = Fraction(1)
    return table


def random_noiseless_code(rand, N, M, decoder_kind="det"):
    """decoder_kind: "det", "stoch", or "mixed"."""
    encoders = [random_dist(rand, N) for _ in range(M)]
    decoders = []
    for _ in range(M):
        if decoder_kind == "mixed":
            stochastic = rand.random() < 0.5
        else:
            stochastic = decoder_kind == "stoch"
        decoders.append(random_decoder(rand, N, stochastic))
    return NoiselessIdCode(N, encoders, decoders)


def random_vector(rand, n, q, l=1):
    return tuple(rand.randint(1, q) for _ in range(n * l))


def random_perm_code(rand, n, q, M, l=1, max_support=4, max_decoder=12):
    """Random permutation-channel code with sparse encoders and decoders
    assembled from explicit vector sets (so counts are honest by build)."""
    encoders = []
    for _ in range(M):
        support = set()
        for _ in range(rand.randint(1, max_support)):
            support.add(random_vector(rand, n, q, l))
        support = sorted(support)
        weights = [rand.randint(1, 9) for _ in support]
        total = sum(weights)
        encoders.append(
            Dist({x: Fraction(w, total) for x, w in zip(support, weights)})
        )
    decoders = []
    for _ in range(M):
        vectors = set()
        for _ in range(rand.randint(1, max_decoder)):
            vectors.add(random_vector(rand, n, q, l))
        decoders.append(counts_from_vector_set(sorted(vectors), n, q, l))
    return PermIdCode(n, q, encoders, decoders, l=l)


def all_vectors(n, q):
    return list(product(range(1, q + 1), repeat=n))


def orbit_products(n, q, l):
    """Ground size of the lifted code for quick assertions."""
    return count_types(n, q) ** l
