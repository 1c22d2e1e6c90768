"""Builders for the concrete systems: contracting controls, splitting, K-pairs and spines."""

import logging
from collections.abc import Sequence
from fractions import Fraction

from skewgraph.exceptions import ValidationError
from skewgraph.models.base import RationalLike, to_fraction
from skewgraph.models.maps import FiberMap, PLMap, ProductMap
from skewgraph.models.sets import IntervalUnion
from skewgraph.models.symbols import MarkovSpec
from skewgraph.models.system import SkewSystem
from skewgraph.models.zoo import KPairSpec, ZooEntry
from skewgraph.services.zoo.validation import KPairValidator, SpineFamilyValidator

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

# K-pair on [0,1]: f1 attracts to 0, f2 to 1, f1∘f2 repels at 7/20 with slope 9/4.
KPAIR_F1 = ((0, 0), (HALF, Fraction(1, 8)), (Fraction(3, 4), HALF), (1, Fraction(3, 4)))
KPAIR_F2 = ((0, Fraction(1, 4)), (Fraction(1, 4), HALF), (HALF, Fraction(7, 8)), (1, 1))
KPAIR_CONTRACTING_WORDS = (
    (1, 1, 1),
    (2, 2, 2),
    (1, 1, 1, 2),
    (1, 1, 1, 2, 2),
    (1, 1, 1, 2, 2, 1),
    (2, 2, 2, 1),
    (2, 2, 2, 1, 1),
    (2, 2, 2, 1, 1, 2),
)
KPAIR_REPELLING_WORD = (2, 1)

# Splitting family: f1 fixes 0 and 1, f2 contracts to 1/2.
SPLIT_F1 = ((0, 0), (HALF, Fraction(1, 4)), (1, 1))
SPLIT_CONTRACTION_DEPTH = 3

PORCUPINE_F1 = ((0, 0), (Fraction(1, 4), HALF), (1, 1))
PORCUPINE_TAIL = (2, 1, 1)


def _product(factor: PLMap, m: int) -> FiberMap:
    return factor if m == 1 else ProductMap(tuple(factor for _ in range(m)))


def _check_dimension(m: int) -> None:
    if not isinstance(m, int) or m < 1:
        raise ValidationError("Fiber dimension m must be a positive integer", "m")


def binary_maps() -> tuple[PLMap, PLMap]:
    return PLMap.affine(HALF, 0), PLMap.affine(HALF, HALF)


# Contracting systems


def build_binary_ifs() -> ZooEntry:
    """f1 = x/2, f2 = x/2 + 1/2 over the fair coin; ρ is the binary expansion of the past."""
    system = SkewSystem(binary_maps(), MarkovSpec.uniform(2), name="binary_ifs")
    return ZooEntry(
        system,
        "Binary contracting IFS; the coding map reads the past as binary digits",
        intervals=IntervalUnion.full(),
    )


def build_middle_third() -> ZooEntry:
    system = SkewSystem(
        (PLMap.affine(Fraction(1, 3), 0), PLMap.affine(Fraction(1, 3), Fraction(2, 3))),
        MarkovSpec.uniform(2),
        name="middle_third",
    )
    return ZooEntry(system, "Middle-third Cantor IFS")


def build_single_contraction(c: RationalLike = HALF, m: int = 1) -> ZooEntry:
    """Two identical maps x ↦ c·x on every coordinate."""
    _check_dimension(m)
    c = to_fraction(c)
    if not 0 < c < 1:
        raise ValidationError("Contraction factor must lie in (0, 1)", "c")
    f = _product(PLMap.affine(c, 0), m)
    system = SkewSystem((f, f), MarkovSpec.uniform(2), name="single_contraction")
    return ZooEntry(
        system, "Uniform contraction control", parameters={"c": c, "m": m}
    )


def build_identity(m: int = 1) -> ZooEntry:
    _check_dimension(m)
    f = _product(PLMap.identity(), m)
    system = SkewSystem((f, f), MarkovSpec.uniform(2), name="identity")
    return ZooEntry(system, "Identity control with no contraction", parameters={"m": m})


def build_contraction_cover(extra_maps: Sequence[PLMap] | None = None) -> ZooEntry:
    """
    The binary pair with extra monotone maps appended.

    [0,1] = f1([0,1]) ∪ f2([0,1]) stays inside the target set whatever the extras do.
    """
    extras = tuple(extra_maps) if extra_maps is not None else (PLMap.from_pairs(SPLIT_F1),)
    for f in extras:
        if not isinstance(f, PLMap):
            raise ValidationError("Extra maps must be one-dimensional PL maps", "extra_maps")
    maps = binary_maps() + extras
    system = SkewSystem(maps, MarkovSpec.uniform(len(maps)), name="contraction_cover")
    return ZooEntry(
        system,
        "Binary IFS plus extra maps; [0,1] lies in the target set",
        parameters={"extra_maps": len(extras)},
        intervals=IntervalUnion.full(),
    )


# Splitting


def build_msplits(
    m: int = 1, p11: RationalLike = HALF, p21: RationalLike = HALF
) -> ZooEntry:
    """
    A two-map system with the splitting property.

    f1 fixes 0 and attracts [0,1)^m to it; f2 = x/2 + 1/4 contracts to x1 = (1/2, ..., 1/2),
    and f1 moves every coordinate of x1. The splitting words are (2,...,2,1,2) and
    (2,...,2) of length SPLIT_CONTRACTION_DEPTH + 2.

    Args:
        m: Fiber dimension
        p11: Probability of staying on symbol 1
        p21: Probability of moving from 2 to 1

    Raises:
        ValidationError: If p11 ∉ [0,1) or p21 ∉ (0,1)
    """
    _check_dimension(m)
    p11_f, p21_f = float(to_fraction(p11)), float(to_fraction(p21))
    if not 0.0 <= p11_f < 1.0:
        raise ValidationError("p11 must lie in [0, 1)", "p11")
    if not 0.0 < p21_f < 1.0:
        raise ValidationError("p21 must lie in (0, 1)", "p21")
    markov = MarkovSpec.from_transition([[p11_f, 1.0 - p11_f], [p21_f, 1.0 - p21_f]])
    f1 = PLMap.from_pairs(SPLIT_F1)
    f2 = PLMap.affine(HALF, Fraction(1, 4))
    system = SkewSystem((_product(f1, m), _product(f2, m)), markov, name="msplits")
    depth = SPLIT_CONTRACTION_DEPTH
    words = ((2,) * depth + (1, 2), (2,) * (depth + 2))
    return ZooEntry(
        system,
        "Splitting system with an attracting fixed point and a moved contraction center",
        parameters={"m": m, "p11": p11_f, "p21": p21_f},
        splitting_words=words,
    )


# K-pairs


def build_kpair() -> KPairSpec:
    """
    The K-pair on J = [0,1].

    Raises:
        ValidationError: If the pair violates a K-pair property
    """
    spec = KPairSpec(
        interval=(Fraction(0), Fraction(1)),
        f1=PLMap.from_pairs(KPAIR_F1),
        f2=PLMap.from_pairs(KPAIR_F2),
        contracting_words=KPAIR_CONTRACTING_WORDS,
        repelling_word=KPAIR_REPELLING_WORD,
    )
    KPairValidator.validate(spec)
    return spec


def build_kpair_system() -> ZooEntry:
    spec = build_kpair()
    system = SkewSystem(spec.maps, MarkovSpec.uniform(2), name="kpair")
    return ZooEntry(
        system,
        "K-pair on [0,1]: bony attractor with a repelling composition",
        kpair=spec,
        intervals=IntervalUnion.full(),
        adversarial_tail=KPAIR_REPELLING_WORD,
    )


def transported_kpair(a: Fraction, length: Fraction, f1: PLMap, f2: PLMap) -> KPairSpec:
    """The K-pair words and interval moved onto [a, a + length]."""
    return KPairSpec(
        interval=(a, a + length),
        f1=f1,
        f2=f2,
        contracting_words=KPAIR_CONTRACTING_WORDS,
        repelling_word=KPAIR_REPELLING_WORD,
    )


def _family_geometry(m: int) -> tuple[Fraction, Fraction, list[Fraction]]:
    length = Fraction(2, 3 * m - 1)
    gap = length / 2
    starts = [(i * 3 * length) / 2 for i in range(m)]
    return length, gap, starts


def build_spine_family(m: int = 2, markov: MarkovSpec | None = None) -> ZooEntry:
    """
    Four maps whose spines over (12)-periodic pasts have exactly m components.

    I_i = [a_i, a_i + L] with L = 2/(3m - 1) and gaps L/2. f1, f2 restrict to the K-pair on
    every I_i and have a common repelling fixed point in each gap; f3 = L/4 + x·L/2 contracts
    into I_1; f4 moves I_i into the interior of I_{i+1} and I_m into its own interior.

    Args:
        m: Number of intervals
        markov: Base measure on 4 symbols (default Bernoulli(1/4, ..., 1/4))

    Raises:
        ValidationError: If m < 1 or the built maps violate a family condition
    """
    _check_dimension(m)
    length, gap, starts = _family_geometry(m)
    f1_pts: list[tuple[Fraction, Fraction]] = []
    f2_pts: list[tuple[Fraction, Fraction]] = []
    f4_pts: list[tuple[Fraction, Fraction]] = []
    for i, a in enumerate(starts):
        b = a + length
        f1_pts += [(a + length * x, a + length * y) for x, y in map(_as_fractions, KPAIR_F1)]
        f2_pts += [(a + length * x, a + length * y) for x, y in map(_as_fractions, KPAIR_F2)]
        if i + 1 < m:
            nxt = starts[i + 1]
            f4_pts += [(a, nxt + length / 8), (b, nxt + 3 * length / 8)]
            e, c, d = b + gap / 4, b + gap / 2, b + 3 * gap / 4
            f1_pts += [(c, c), (d, d + gap / 8)]
            f2_pts += [(e, e - gap / 8), (c, c)]
        else:
            f4_pts += [(a, a + 5 * length / 8), (b, a + 7 * length / 8)]
    f1 = PLMap.from_pairs(_dedupe(f1_pts))
    f2 = PLMap.from_pairs(_dedupe(f2_pts))
    f3 = PLMap.affine(length / 2, length / 4)
    f4 = PLMap.from_pairs(f4_pts)

    markov = markov if markov is not None else MarkovSpec.uniform(4)
    system = SkewSystem((f1, f2, f3, f4), markov, name="spine_family")
    intervals = IntervalUnion(tuple((a, a + length) for a in starts))
    SpineFamilyValidator.validate(system, intervals)
    for a in starts:
        KPairValidator.validate(transported_kpair(a, length, f1, f2))
    logger.debug(f"Built disconnected-spine family with m={m}, L={length}")
    return ZooEntry(
        system,
        f"Four-map family whose (12)-spines have {m} components",
        parameters={"m": m},
        trapping_region=intervals.inflate(length / 32),
        intervals=intervals,
        adversarial_tail=(1, 2),
    )


build_theorem2_family = build_spine_family


def _as_fractions(pair: tuple) -> tuple[Fraction, Fraction]:
    return to_fraction(pair[0]), to_fraction(pair[1])


def _dedupe(points: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    out: list[tuple[Fraction, Fraction]] = []
    for p in points:
        if not out or out[-1][0] != p[0]:
            out.append(p)
    return out


def family_spine_components(m: int) -> list[tuple[Fraction, Fraction]]:
    """Exact spine components over a past ending in (..., 2, 1): [a + L/12, a + 2L/3] each."""
    length, _, starts = _family_geometry(m)
    return [(a + length / 12, a + 2 * length / 3) for a in starts]


# Porcupine


def build_porcupine() -> ZooEntry:
    """
    Orientation-preserving porcupine-like system.

    f1 repels from 0 and attracts to 1, f2 = x/2 attracts to 0; the target set is [0,1].
    Pasts ending in (2,1,1) repeated have nontrivial spines [0, q].
    """
    system = SkewSystem(
        (PLMap.from_pairs(PORCUPINE_F1), PLMap.affine(HALF, 0)),
        MarkovSpec.uniform(2),
        name="porcupine",
    )
    return ZooEntry(
        system,
        "Orientation-preserving porcupine: points on most fibers, intervals on some",
        parameters={"orientation_preserving": True},
        intervals=IntervalUnion.full(),
        adversarial_tail=PORCUPINE_TAIL,
    )
