"""
Splitting-principle engine.

Polynomials in formal Chern roots are elements of a sympy PolyRing over QQ
(lex order), truncated by total degree. Roots come in groups (one
group per bundle); a polynomial that is symmetric inside each group is
rewritten in the elementary symmetric polynomials of the groups, which are
then replaced by the Chern classes of concrete bundles.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import TYPE_CHECKING, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyElement, PolyRing

from app.utils.errors import DomainError
from app.utils.exact_core import (
    ChowClass,
    Scalar,
    TruncatedSeries,
    format_rational,
    from_qq,
    to_qq,
)

if TYPE_CHECKING:
    from app.utils.bundles import BundleClass

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]
# one tuple of e_1..e_r multiplicities per group
ElementaryMonomial = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class RootGroup:
    """The Chern roots of one bundle: label[1], ..., label[size]."""

    label: str
    size: int

    def __post_init__(self):
        if self.size < 0:
            raise DomainError(f"root group {self.label!r} has negative size {self.size}")

    def root_names(self) -> List[str]:
        return [f"{self.label}{i + 1}" for i in range(self.size)]


def _offsets(groups: Sequence[RootGroup]) -> List[int]:
    offsets, position = [], 0
    for group in groups:
        offsets.append(position)
        position += group.size
    return offsets


@lru_cache(maxsize=None)
def root_ring(groups: Tuple[RootGroup, ...]) -> PolyRing:
    """QQ[roots] in lex order, variables group by group."""
    names = [f"r{g}_{i}" for g, group in enumerate(groups) for i in range(group.size)]
    return PolyRing(names, QQ, lex)


def _ring_element(ring: PolyRing, terms: Mapping[Exponent, Scalar]) -> PolyElement:
    converted = {}
    for exponent, coefficient in terms.items():
        if len(exponent) != ring.ngens:
            raise DomainError(f"exponent {exponent} does not match {ring.ngens} roots")
        converted[tuple(exponent)] = to_qq(coefficient)
    return ring.from_dict(converted)


def _truncated(element: PolyElement, truncation: int, weights: Sequence[int] = None) -> PolyElement:
    """Drop every term whose (weighted) degree exceeds the truncation."""
    def degree(monom):
        return sum(monom) if weights is None else sum(w * m for w, m in zip(weights, monom))

    if all(degree(monom) <= truncation for monom in element.itermonoms()):
        return element
    return element.ring.from_dict(
        {monom: c for monom, c in element.iterterms() if degree(monom) <= truncation}
    )


@dataclass(frozen=True)
class MultiPoly:
    """Truncated polynomial in the roots of several groups.

    The element lives in ``root_ring(groups)``; no stored term exceeds the
    truncation degree. A plain mapping of exponent vectors is accepted and
    converted.
    """

    groups: Tuple[RootGroup, ...]
    truncation: int
    element: Union[PolyElement, Mapping[Exponent, Scalar]]

    def __post_init__(self):
        groups = tuple(self.groups)
        ring = root_ring(groups)
        element = self.element
        if not isinstance(element, PolyElement):
            element = _ring_element(ring, element)
        elif element.ring != ring:
            raise DomainError("polynomial does not belong to the ring of these root groups")
        object.__setattr__(self, 'groups', groups)
        object.__setattr__(self, 'element', _truncated(element, self.truncation))

    @property
    def ring(self) -> PolyRing:
        return root_ring(self.groups)

    @property
    def num_vars(self) -> int:
        return self.ring.ngens

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        return {monom: from_qq(c) for monom, c in self.element.iterterms()}

    @classmethod
    def constant(cls, groups: Sequence[RootGroup], truncation: int, value: Scalar = 1) -> "MultiPoly":
        groups = tuple(groups)
        return cls(groups, truncation, root_ring(groups).ground_new(to_qq(value)))

    @classmethod
    def root(cls, groups: Sequence[RootGroup], truncation: int, group_index: int, i: int) -> "MultiPoly":
        """The i-th root (0-based) of the given group."""
        groups = tuple(groups)
        if not 0 <= i < groups[group_index].size:
            raise DomainError(f"group {groups[group_index].label!r} has no root number {i + 1}")
        return cls(groups, truncation, root_ring(groups).gens[_offsets(groups)[group_index] + i])

    def _check(self, other: "MultiPoly"):
        if self.groups != other.groups or self.truncation != other.truncation:
            raise DomainError("polynomials live in different root rings")

    def _new(self, element: PolyElement) -> "MultiPoly":
        return MultiPoly(self.groups, self.truncation, element)

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        return self._new(self.element + other.element)

    def __neg__(self) -> "MultiPoly":
        return self._new(-self.element)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        return self._new(self.element - other.element)

    def scale(self, factor: Scalar) -> "MultiPoly":
        return self._new(self.element * to_qq(factor))

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            return self.scale(other)
        self._check(other)
        return self._new(self.element * other.element)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "MultiPoly":
        if exponent < 0:
            raise DomainError("negative powers of root polynomials are not defined")
        result = MultiPoly.constant(self.groups, self.truncation)
        for _ in range(exponent):
            result = result * self
        return result

    def is_zero(self) -> bool:
        return not self.element

    def constant_term(self) -> Fraction:
        return from_qq(self.element.get(self.ring.zero_monom, QQ.zero))

    def degree_part(self, degree: int) -> "MultiPoly":
        return self._new(self.ring.from_dict(
            {monom: c for monom, c in self.element.iterterms() if sum(monom) == degree}
        ))

    def swap(self, group_index: int, i: int, j: int) -> "MultiPoly":
        """Exchange roots i and j of one group."""
        offset = _offsets(self.groups)[group_index]
        a, b = offset + i, offset + j
        swapped = {}
        for monom, coefficient in self.element.iterterms():
            e = list(monom)
            e[a], e[b] = e[b], e[a]
            swapped[tuple(e)] = coefficient
        return self._new(self.ring.from_dict(swapped))

    def substitute_series(self, s: TruncatedSeries) -> "MultiPoly":
        """s(p) for a polynomial p without constant term."""
        if self.constant_term() != 0:
            raise DomainError("substitution needs a polynomial without constant term")
        result = MultiPoly.constant(self.groups, self.truncation, s[0])
        power = MultiPoly.constant(self.groups, self.truncation)
        for k in range(1, min(s.order, self.truncation) + 1):
            power = power * self
            if power.is_zero():
                break
            result = result + power.scale(s[k])
        return result

    def __str__(self) -> str:
        names = [name for g in self.groups for name in g.root_names()]
        if self.is_zero():
            return "0"
        terms = self.terms
        parts = []
        for exponent in sorted(terms, reverse=True):
            factors = [n if p == 1 else f"{n}^{p}" for n, p in zip(names, exponent) if p]
            parts.append("*".join([format_rational(terms[exponent])] + factors))
        return " + ".join(parts)


def elementary_symmetric(k: int, group: RootGroup, groups: Sequence[RootGroup] = None,
                         truncation: int = None) -> MultiPoly:
    """e_k of one group's roots, inside the ring of all given groups."""
    groups = tuple(groups) if groups is not None else (group,)
    if group not in groups:
        raise DomainError(f"root group {group.label!r} is not part of the ring")
    if not 0 <= k <= group.size:
        raise DomainError(f"e_{k} is undefined for a group of {group.size} roots")
    truncation = max(k, group.size) if truncation is None else truncation
    offset = _offsets(groups)[groups.index(group)]
    ring = root_ring(groups)
    element = ring.zero
    for subset in itertools.combinations(range(group.size), k):
        term = ring.one
        for i in subset:
            term = term * ring.gens[offset + i]
        element = element + term
    return MultiPoly(groups, truncation, element)


def power_sum(k: int, group: RootGroup, groups: Sequence[RootGroup] = None,
              truncation: int = None) -> MultiPoly:
    """p_k = sum of k-th powers of one group's roots."""
    groups = tuple(groups) if groups is not None else (group,)
    truncation = k if truncation is None else truncation
    if k < 0:
        raise DomainError(f"p_{k} is undefined")
    if k == 0:
        return MultiPoly.constant(groups, truncation, group.size)
    offset = _offsets(groups)[groups.index(group)]
    ring = root_ring(groups)
    element = ring.zero
    for i in range(group.size):
        element = element + ring.gens[offset + i] ** k
    return MultiPoly(groups, truncation, element)


@lru_cache(maxsize=None)
def elementary_ring(groups: Tuple[RootGroup, ...]) -> PolyRing:
    """QQ[e_1..e_r of each group] in lex order."""
    names = [f"e{k}_{g}" for g, group in enumerate(groups) for k in range(1, group.size + 1)]
    return PolyRing(names, QQ, lex)


def _elementary_weights(groups: Tuple[RootGroup, ...]) -> List[int]:
    return [k for group in groups for k in range(1, group.size + 1)]


def _flatten_key(key: ElementaryMonomial) -> Exponent:
    return tuple(itertools.chain.from_iterable(key))


def _split_key(groups: Tuple[RootGroup, ...], monom: Exponent) -> ElementaryMonomial:
    return tuple(monom[offset:offset + g.size] for offset, g in zip(_offsets(groups), groups))


@dataclass(frozen=True)
class ElementaryExpansion:
    """Polynomial in the elementary symmetric quantities of each group.

    ``terms`` maps a key holding, per group, the multiplicities of e_1..e_r
    to its coefficient; the weighted degree of a key (e_k has degree k)
    never exceeds the truncation.
    """

    groups: Tuple[RootGroup, ...]
    truncation: int
    element: Union[PolyElement, Mapping[ElementaryMonomial, Scalar]]

    def __post_init__(self):
        groups = tuple(self.groups)
        ring = elementary_ring(groups)
        element = self.element
        if not isinstance(element, PolyElement):
            converted = {}
            for key, coefficient in element.items():
                if tuple(len(m) for m in key) != tuple(g.size for g in groups):
                    raise DomainError(f"key {key} does not match the root groups")
                converted[_flatten_key(key)] = to_qq(coefficient)
            element = ring.from_dict(converted)
        elif element.ring != ring:
            raise DomainError("expansion does not belong to the ring of these root groups")
        object.__setattr__(self, 'groups', groups)
        object.__setattr__(self, 'element',
                           _truncated(element, self.truncation, _elementary_weights(groups)))

    @property
    def terms(self) -> Dict[ElementaryMonomial, Fraction]:
        return {_split_key(self.groups, monom): from_qq(c) for monom, c in self.element.iterterms()}

    @classmethod
    def constant(cls, groups: Sequence[RootGroup], truncation: int, value: Scalar = 1) -> "ElementaryExpansion":
        groups = tuple(groups)
        return cls(groups, truncation, elementary_ring(groups).ground_new(to_qq(value)))

    def _check(self, other: "ElementaryExpansion"):
        if self.groups != other.groups or self.truncation != other.truncation:
            raise DomainError("expansions live in different rings")

    def __add__(self, other: "ElementaryExpansion") -> "ElementaryExpansion":
        self._check(other)
        return ElementaryExpansion(self.groups, self.truncation, self.element + other.element)

    def __sub__(self, other: "ElementaryExpansion") -> "ElementaryExpansion":
        self._check(other)
        return ElementaryExpansion(self.groups, self.truncation, self.element - other.element)

    def __mul__(self, other: "ElementaryExpansion") -> "ElementaryExpansion":
        self._check(other)
        return ElementaryExpansion(self.groups, self.truncation, self.element * other.element)

    def scale(self, factor: Scalar) -> "ElementaryExpansion":
        return ElementaryExpansion(self.groups, self.truncation, self.element * to_qq(factor))

    def expand(self) -> MultiPoly:
        """Re-expand every e_k as a polynomial in the roots."""
        result = MultiPoly(self.groups, self.truncation, {})
        for key, coefficient in self.terms.items():
            result = result + _elementary_product(self.groups, self.truncation, key).scale(coefficient)
        return result

    def __str__(self) -> str:
        terms = self.terms
        if not terms:
            return "0"
        parts = []
        for key in sorted(terms, reverse=True):
            factors = []
            for group, multiplicities in zip(self.groups, key):
                for k, m in enumerate(multiplicities, start=1):
                    if m:
                        name = f"e{k}({group.label})"
                        factors.append(name if m == 1 else f"{name}^{m}")
            parts.append("*".join([format_rational(terms[key])] + factors))
        return " + ".join(parts)


def _elementary_product(groups: Tuple[RootGroup, ...], truncation: int,
                        key: ElementaryMonomial) -> MultiPoly:
    result = MultiPoly.constant(groups, truncation)
    for group, multiplicities in zip(groups, key):
        for k, m in enumerate(multiplicities, start=1):
            if m:
                result = result * elementary_symmetric(k, group, groups, truncation) ** m
    return result


def check_symmetric(p: MultiPoly):
    """Raise DomainError naming a transposition that changes p, if any."""
    for index, group in enumerate(p.groups):
        names = group.root_names()
        for i in range(group.size - 1):
            if p.swap(index, i, i + 1) != p:
                raise DomainError(
                    f"polynomial is not symmetric in group {group.label!r}: "
                    f"swapping {names[i]} and {names[i + 1]} changes it"
                )


def _split_group(p: MultiPoly, index: int) -> Dict[Exponent, Dict[Exponent, object]]:
    """Collect terms by their exponent in one group: group part -> remaining terms."""
    offset = _offsets(p.groups)[index]
    size = p.groups[index].size
    split: Dict[Exponent, Dict[Exponent, object]] = {}
    for monom, coefficient in p.element.iterterms():
        own = monom[offset:offset + size]
        rest = monom[:offset] + (0,) * size + monom[offset + size:]
        split.setdefault(own, {})[rest] = coefficient
    return split


def _reduce_group(p: MultiPoly, index: int) -> Dict[Tuple[int, ...], MultiPoly]:
    """Leading-term subtraction in one group; other roots act as coefficients.

    Returns e-multiplicities of this group -> coefficient polynomial free of
    this group's roots.
    """
    group = p.groups[index]
    result: Dict[Tuple[int, ...], MultiPoly] = {}
    if group.size == 0:
        return {(): p}
    cache: Dict[Tuple[int, ...], MultiPoly] = {}
    remainder = p
    steps = 0
    while not remainder.is_zero():
        split = _split_group(remainder, index)
        # lex-leading exponent of this group's roots
        leading = max(split)
        if any(leading[i] < leading[i + 1] for i in range(group.size - 1)):
            raise DomainError(
                f"polynomial is not symmetric in group {group.label!r} "
                f"(leading exponent {leading} is not a partition)"
            )
        multiplicities = tuple(
            leading[i] - (leading[i + 1] if i + 1 < group.size else 0) for i in range(group.size)
        )
        coefficient = MultiPoly(p.groups, p.truncation, p.ring.from_dict(split[leading]))
        if multiplicities not in cache:
            key = tuple(multiplicities if g is group else (0,) * g.size for g in p.groups)
            cache[multiplicities] = _elementary_product(p.groups, p.truncation, key)
        remainder = remainder - coefficient * cache[multiplicities]
        previous = result.get(multiplicities)
        result[multiplicities] = coefficient if previous is None else previous + coefficient
        steps += 1
    logger.debug("reduced group %s in %d leading-term steps", group.label, steps)
    return result


def reduce_to_elementaries(p: MultiPoly) -> ElementaryExpansion:
    """Rewrite a group-wise symmetric polynomial in elementary symmetric quantities.

    Groups are reduced one at a time, treating the roots of the other groups
    as coefficients.
    """
    check_symmetric(p)
    partial: Dict[ElementaryMonomial, MultiPoly] = {(): p}
    for index in range(len(p.groups)):
        next_partial: Dict[ElementaryMonomial, MultiPoly] = {}
        for key, poly in partial.items():
            for multiplicities, coefficient in _reduce_group(poly, index).items():
                new_key = key + (multiplicities,)
                previous = next_partial.get(new_key)
                next_partial[new_key] = coefficient if previous is None else previous + coefficient
        partial = next_partial

    terms = {}
    for key, poly in partial.items():
        if any(monom != p.ring.zero_monom for monom in poly.element.itermonoms()):
            raise DomainError("reduction left roots behind; input is not symmetric")
        constant = poly.constant_term()
        if constant:
            terms[key] = constant
    return ElementaryExpansion(p.groups, p.truncation, terms)


def evaluate_universal(expansion: ElementaryExpansion, bundles: Sequence["BundleClass"]) -> ChowClass:
    """Substitute c_k(E_g) for e_k of group g and evaluate in the Chow ring."""
    if len(bundles) != len(expansion.groups):
        raise DomainError(f"{len(expansion.groups)} root groups but {len(bundles)} bundles")
    ambients = {b.ambient for b in bundles}
    if len(ambients) != 1:
        raise DomainError(f"bundles live on different ambient spaces: {sorted(ambients)}")
    for group, bundle in zip(expansion.groups, bundles):
        if group.size != bundle.rank:
            raise DomainError(
                f"group {group.label!r} has {group.size} roots but the bundle has rank {bundle.rank}"
            )
    n = ambients.pop()
    chern_monomials = [
        [ChowClass.monomial(n, k, bundle.chern[k]) for k in range(bundle.rank + 1)]
        for bundle in bundles
    ]
    total = ChowClass.zero(n)
    for key, coefficient in expansion.terms.items():
        term = ChowClass.scalar(n, coefficient)
        for classes, multiplicities in zip(chern_monomials, key):
            for k, m in enumerate(multiplicities, start=1):
                if m:
                    term = term * classes[k] ** m
        total = total + term
    return total


def product_over_roots(groups: Sequence[RootGroup], truncation: int,
                       roots: Iterable[MultiPoly]) -> MultiPoly:
    """Total Chern class of a bundle whose roots are the given linear forms: prod(1 + root)."""
    groups = tuple(groups)
    one = MultiPoly.constant(groups, truncation)
    result = one
    for root in roots:
        result = result * (one + root)
    return result


def root_forms(groups: Sequence[RootGroup], truncation: int, group_index: int) -> List[MultiPoly]:
    return [MultiPoly.root(groups, truncation, group_index, i) for i in range(groups[group_index].size)]


def subset_sums(forms: Sequence[MultiPoly], k: int, repeat: bool = False) -> List[MultiPoly]:
    """Sums over k-subsets (or k-multisets when repeat is set) of the given root forms."""
    if k == 0:
        # the single empty sum is the zero root, which contributes a factor 1
        return []
    chooser = itertools.combinations_with_replacement if repeat else itertools.combinations
    sums = []
    for choice in chooser(range(len(forms)), k):
        total = None
        for i in choice:
            total = forms[i] if total is None else total + forms[i]
        sums.append(total)
    return sums
