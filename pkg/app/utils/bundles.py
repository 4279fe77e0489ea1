"""
Classes of locally free sheaves on P^n.

A BundleClass is only (rank, total Chern class). Chern roots appear solely
inside symroots computations for the linear-algebra constructions and for
the root-expansion oracles of ch and td.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import List, Sequence

from app.utils.errors import DomainError
from app.utils.exact_core import (
    ChowClass,
    TruncatedSeries,
    chow_exp,
    chow_inverse,
    series_log,
    todd_series,
)
from app.utils.symroots import (
    MultiPoly,
    RootGroup,
    evaluate_universal,
    product_over_roots,
    reduce_to_elementaries,
    root_forms,
    subset_sums,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BundleClass:
    ambient: int
    rank: int
    chern: ChowClass

    def __post_init__(self):
        if self.rank < 0:
            raise DomainError(f"rank must be non-negative, got {self.rank}")
        if self.chern.ambient != self.ambient:
            raise DomainError(
                f"Chern class lives on P^{self.chern.ambient}, bundle on P^{self.ambient}"
            )
        if self.chern[0] != 1:
            raise DomainError(f"total Chern class must start with 1, got {self.chern[0]}")
        for k in range(min(self.rank, self.ambient) + 1, self.ambient + 1):
            if self.chern[k] != 0:
                raise DomainError(f"c_{k} must vanish on a bundle of rank {self.rank}")

    def c(self, k: int) -> ChowClass:
        """The k-th Chern class as a homogeneous Chow class."""
        return ChowClass.monomial(self.ambient, k, self.chern[k]) if k >= 0 else ChowClass.zero(self.ambient)

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "rank": self.rank, "chern": self.chern.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "BundleClass":
        try:
            chern = ChowClass.from_json(data["chern"])
            return cls(int(data["ambient"]), int(data["rank"]), chern)
        except (KeyError, TypeError) as e:
            raise DomainError(f"malformed bundle document: {e}")

    def __str__(self) -> str:
        return f"Bundle(rank={self.rank}, c={self.chern}) on P^{self.ambient}"


def _check_same_ambient(*bundles: BundleClass):
    ambients = {b.ambient for b in bundles}
    if len(ambients) > 1:
        raise DomainError(f"ambient mismatch: {sorted(ambients)}")


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def line_bundle(n: int, d: int) -> BundleClass:
    """O(d): rank 1, c = 1 + dH."""
    return BundleClass(n, 1, ChowClass.from_parts(n, [1, d]))


def trivial_bundle(n: int, rank: int = 1) -> BundleClass:
    return BundleClass(n, rank, ChowClass.unit(n))


def tangent_bundle(n: int) -> BundleClass:
    """T_{P^n}: c_k = C(n+1, k) H^k from the Euler sequence."""
    if n < 1:
        raise DomainError(f"tangent bundle needs n >= 1, got {n}")
    return BundleClass(n, n, ChowClass.from_parts(n, [comb(n + 1, k) for k in range(n + 1)]))


def cotangent_bundle(n: int) -> BundleClass:
    return dual(tangent_bundle(n))


def direct_sum(*bundles: BundleClass) -> BundleClass:
    """Whitney sum: ranks add, total Chern classes multiply."""
    if not bundles:
        raise DomainError("direct_sum needs at least one summand")
    _check_same_ambient(*bundles)
    n = bundles[0].ambient
    chern = ChowClass.unit(n)
    for bundle in bundles:
        chern = chern * bundle.chern
    return BundleClass(n, sum(b.rank for b in bundles), chern)


def _roots_construction(bundles: Sequence[BundleClass], rank: int, roots_of) -> BundleClass:
    """Total Chern class of a bundle whose roots are linear forms in the roots of the inputs."""
    n = bundles[0].ambient
    groups = tuple(RootGroup(label, b.rank) for label, b in zip("abcdefgh", bundles))
    forms = [root_forms(groups, n, i) for i in range(len(groups))]
    roots = roots_of(forms)
    total = product_over_roots(groups, n, roots)
    expansion = reduce_to_elementaries(total)
    logger.debug("root construction of rank %d: %d root terms, %d elementary terms",
                 rank, len(total.terms), len(expansion.terms))
    return BundleClass(n, rank, evaluate_universal(expansion, bundles))


def dual(bundle: BundleClass) -> BundleClass:
    """Roots negated, so c_k picks up (-1)^k."""
    return _roots_construction([bundle], bundle.rank, lambda forms: [-a for a in forms[0]])


def determinant(bundle: BundleClass) -> BundleClass:
    """Single root a1 + ... + ar, so c_1 is preserved."""
    return BundleClass(bundle.ambient, 1, ChowClass.from_parts(bundle.ambient, [1, bundle.chern[1]]))


def wedge(k: int, bundle: BundleClass) -> BundleClass:
    """k-th exterior power; roots are sums over k-subsets. k > rank gives the zero bundle."""
    if k < 0:
        raise DomainError(f"exterior power needs k >= 0, got {k}")
    if k > bundle.rank:
        return BundleClass(bundle.ambient, 0, ChowClass.unit(bundle.ambient))
    if k == 0:
        return trivial_bundle(bundle.ambient)
    return _roots_construction([bundle], comb(bundle.rank, k),
                               lambda forms: subset_sums(forms[0], k))


def sym(k: int, bundle: BundleClass) -> BundleClass:
    """k-th symmetric power; roots are sums over k-multisets."""
    if k < 0:
        raise DomainError(f"symmetric power needs k >= 0, got {k}")
    if k == 0:
        return trivial_bundle(bundle.ambient)
    if bundle.rank == 0:
        return BundleClass(bundle.ambient, 0, ChowClass.unit(bundle.ambient))
    return _roots_construction([bundle], comb(bundle.rank + k - 1, k),
                               lambda forms: subset_sums(forms[0], k, repeat=True))


def tensor(first: BundleClass, second: BundleClass) -> BundleClass:
    """Roots a_i + b_j, reduced in both root groups."""
    _check_same_ambient(first, second)
    if first.rank == 1 and second.rank == 1:
        n = first.ambient
        return BundleClass(n, 1, ChowClass.from_parts(n, [1, first.chern[1] + second.chern[1]]))
    return _roots_construction(
        [first, second], first.rank * second.rank,
        lambda forms: [a + b for a in forms[0] for b in forms[1]],
    )


def twist(bundle: BundleClass, d: int) -> BundleClass:
    """E tensor O(d)."""
    return tensor(bundle, line_bundle(bundle.ambient, d))


# ---------------------------------------------------------------------------
# Characteristic classes
# ---------------------------------------------------------------------------

def power_sums(bundle: BundleClass) -> List[ChowClass]:
    """Newton power sums p_0..p_n of the roots, computed from the Chern classes.

    p_k = sum_{i<k} (-1)^(i-1) c_i p_(k-i) + (-1)^(k-1) k c_k, with p_0 = rank.
    """
    n = bundle.ambient
    c = [bundle.c(k) for k in range(n + 1)]
    sums = [ChowClass.scalar(n, bundle.rank)]
    for k in range(1, n + 1):
        p = c[k].scale((-1) ** (k - 1) * k)
        for i in range(1, k):
            p = p + (c[i] * sums[k - i]).scale((-1) ** (i - 1))
        sums.append(p)
    return sums


def chern_character(bundle: BundleClass) -> ChowClass:
    """ch(E) = rank + sum_k p_k / k!."""
    n = bundle.ambient
    sums = power_sums(bundle)
    ch = ChowClass.scalar(n, bundle.rank)
    for k in range(1, n + 1):
        ch = ch + sums[k].scale(Fraction(1, factorial(k)))
    return ch


@lru_cache(maxsize=None)
def _log_todd(order: int) -> TruncatedSeries:
    return series_log(todd_series(order))


def todd(bundle: BundleClass) -> ChowClass:
    """td(E) = exp(sum_k q_k p_k) where sum_k q_k x^k = log(x / (1 - e^-x))."""
    n = bundle.ambient
    q = _log_todd(n)
    sums = power_sums(bundle)
    exponent = ChowClass.zero(n)
    for k in range(1, n + 1):
        exponent = exponent + sums[k].scale(q[k])
    return chow_exp(exponent)


def segre(bundle: BundleClass) -> ChowClass:
    """Total Segre class, the inverse of the total Chern class."""
    return chow_inverse(bundle.chern)


def chern_from_segre(s: ChowClass) -> ChowClass:
    """Invert a Segre class back to a Chern class with c_k = -sum_{i=1..k} s_i c_(k-i)."""
    if s[0] != 1:
        raise DomainError(f"a Segre class starts with 1, got {s[0]}")
    n = s.ambient
    c = [Fraction(1)]
    for k in range(1, n + 1):
        c.append(-sum((s[i] * c[k - i] for i in range(1, k + 1)), Fraction(0)))
    return ChowClass.from_parts(n, c)


def degree(bundle: BundleClass) -> Fraction:
    """deg(E) = coefficient of H in c_1(E)."""
    return bundle.chern[1]


# ---------------------------------------------------------------------------
# Root-expansion oracles
# ---------------------------------------------------------------------------

def _root_oracle(bundle: BundleClass, series_of_root) -> ChowClass:
    n = bundle.ambient
    group = RootGroup("a", bundle.rank)
    poly = series_of_root((group,), n, root_forms((group,), n, 0))
    return evaluate_universal(reduce_to_elementaries(poly), [bundle])


def chern_character_by_roots(bundle: BundleClass) -> ChowClass:
    """ch(E) = sum_i exp(a_i), expanded in the roots and reduced."""
    def build(groups, n, roots):
        exp_coefficients = TruncatedSeries.from_coefficients(
            [Fraction(1, factorial(k)) for k in range(n + 1)], n)
        total = MultiPoly(groups, n, {})
        for root in roots:
            total = total + root.substitute_series(exp_coefficients)
        return total
    return _root_oracle(bundle, build)


def todd_by_roots(bundle: BundleClass) -> ChowClass:
    """td(E) = prod_i a_i / (1 - e^-a_i), expanded in the roots and reduced."""
    def build(groups, n, roots):
        series = todd_series(n)
        total = MultiPoly.constant(groups, n)
        for root in roots:
            total = total * root.substitute_series(series)
        return total
    return _root_oracle(bundle, build)


def chern_classes_by_roots(bundle: BundleClass) -> ChowClass:
    """prod_i (1 + a_i) reduced; returns the input Chern class when the engine is sound."""
    return _root_oracle(bundle, lambda groups, n, roots: product_over_roots(groups, n, roots))
