"""
Graded Koszul complexes over Q[x_0, ..., x_{m-1}].

For a sequence a_1..a_s of homogeneous polynomials of degrees d_i, the
k-th chain module in internal degree t has the basis e_S * mu with |S| = k
and mu a monomial of degree t - sum_{i in S} d_i. The differential is

    d(e_{i_1} ^ ... ^ e_{i_k}) = sum_j (-1)^(j+1) a_{i_j} e_{S minus i_j}

and every homology dimension is obtained from exact ranks of these
matrices, one internal degree at a time.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, List, Sequence, Tuple

import pandas as pd
from sympy import Poly, QQ, Symbol
from sympy.polys.matrices import DomainMatrix
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from app.utils import linalg
from app.utils.errors import DomainError, InvariantViolation, PreconditionError

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
Polynomial = Dict[Monomial, Fraction]
BasisElement = Tuple[Tuple[int, ...], Monomial]


@dataclass(frozen=True)
class GradedRing:
    """Q[x0..x{m-1}] with every variable in degree 1."""

    num_vars: int

    def __post_init__(self):
        if self.num_vars < 1:
            raise DomainError(f"a polynomial ring needs at least one variable, got {self.num_vars}")

    @property
    def variable_names(self) -> List[str]:
        return [f"x{i}" for i in range(self.num_vars)]

    def monomials(self, degree: int) -> List[Monomial]:
        """All exponent vectors of the given total degree, in a fixed order."""
        if degree < 0:
            return []
        result = []
        for choice in itertools.combinations_with_replacement(range(self.num_vars), degree):
            exponent = [0] * self.num_vars
            for i in choice:
                exponent[i] += 1
            result.append(tuple(exponent))
        return result

    def dimension(self, degree: int) -> int:
        return comb(degree + self.num_vars - 1, self.num_vars - 1) if degree >= 0 else 0


def _format_polynomial(ring: GradedRing, poly: Polynomial) -> str:
    terms = []
    for exponent in sorted(poly, reverse=True):
        factors = [name if e == 1 else f"{name}^{e}"
                   for name, e in zip(ring.variable_names, exponent) if e]
        coefficient = poly[exponent]
        if not factors:
            terms.append(str(coefficient))
        elif coefficient == 1:
            terms.append("*".join(factors))
        elif coefficient == -1:
            terms.append("-" + "*".join(factors))
        else:
            terms.append(f"{coefficient}*" + "*".join(factors))
    return " + ".join(terms).replace("+ -", "- ")


@dataclass(frozen=True)
class HomogeneousSequence:
    ring: GradedRing
    elements: Tuple[Polynomial, ...]
    degrees: Tuple[int, ...]

    def __post_init__(self):
        if not self.elements:
            raise DomainError("a Koszul sequence needs at least one element")
        if len(self.elements) != len(self.degrees):
            raise DomainError("every element needs a recorded degree")
        cleaned = []
        for position, (poly, degree) in enumerate(zip(self.elements, self.degrees), start=1):
            poly = {tuple(e): Fraction(c) for e, c in poly.items() if c != 0}
            if not poly:
                raise DomainError(f"element {position} is zero")
            if degree < 1:
                raise DomainError(f"element {position} must have positive degree, got {degree}")
            for exponent in poly:
                if len(exponent) != self.ring.num_vars:
                    raise DomainError(f"element {position} uses a variable outside x0..x{self.ring.num_vars - 1}")
                if sum(exponent) != degree:
                    raise DomainError(f"element {position} is not homogeneous of degree {degree}")
            cleaned.append(poly)
        object.__setattr__(self, 'elements', tuple(cleaned))
        object.__setattr__(self, 'degrees', tuple(self.degrees))

    @property
    def length(self) -> int:
        return len(self.elements)

    def permuted(self, order: Sequence[int]) -> "HomogeneousSequence":
        return HomogeneousSequence(self.ring, tuple(self.elements[i] for i in order),
                                   tuple(self.degrees[i] for i in order))

    def subset_degree(self, subset: Sequence[int]) -> int:
        return sum(self.degrees[i] for i in subset)

    def to_json(self) -> List[str]:
        return [_format_polynomial(self.ring, poly) for poly in self.elements]


def parse_sequence(num_vars: int, texts: Sequence[str]) -> HomogeneousSequence:
    """Polynomial strings in x0..x{m-1} (with +, -, *, ^) to a homogeneous sequence."""
    ring = GradedRing(num_vars)
    symbols = [Symbol(name) for name in ring.variable_names]
    local = {str(s): s for s in symbols}
    transformations = standard_transformations + (convert_xor,)
    elements, degrees = [], []
    for position, text in enumerate(texts, start=1):
        text = text.strip()
        if not text:
            raise DomainError(f"element {position} is empty")
        try:
            expr = parse_expr(text, local_dict=local, transformations=transformations, evaluate=True)
        except Exception as e:
            raise DomainError(f"cannot parse element {position} {text!r}: {e}")
        unknown = sorted(str(s) for s in expr.free_symbols if s not in symbols)
        if unknown:
            raise DomainError(
                f"element {position} uses unknown variables {unknown}; expected x0..x{num_vars - 1}"
            )
        poly = Poly(expr, *symbols, domain=QQ)
        if poly.is_zero:
            raise DomainError(f"element {position} is zero")
        if not poly.is_homogeneous:
            raise DomainError(f"element {position} {text!r} is not homogeneous")
        terms = {tuple(monom): Fraction(int(c.p), int(c.q)) for monom, c in poly.terms()}
        elements.append(terms)
        degrees.append(poly.total_degree())
    return HomogeneousSequence(ring, tuple(elements), tuple(degrees))


# ---------------------------------------------------------------------------
# Chain modules and differentials
# ---------------------------------------------------------------------------

def chain_basis(seq: HomogeneousSequence, k: int, t: int) -> List[BasisElement]:
    """Basis (S, mu) of the degree-t part of the k-th Koszul module."""
    if k < 0 or k > seq.length:
        return []
    basis = []
    for subset in itertools.combinations(range(seq.length), k):
        for mu in seq.ring.monomials(t - seq.subset_degree(subset)):
            basis.append((subset, mu))
    return basis


def _multiply(poly: Polynomial, mu: Monomial) -> Polynomial:
    return {tuple(a + b for a, b in zip(exponent, mu)): c for exponent, c in poly.items()}


def differential(seq: HomogeneousSequence, k: int, t: int) -> DomainMatrix:
    """Matrix of d_k in internal degree t: rows index the (k-1)-basis, columns the k-basis."""
    source = chain_basis(seq, k, t)
    target = chain_basis(seq, k - 1, t)
    entries: Dict[Tuple[int, int], Fraction] = {}
    if source and target:
        index = {element: i for i, element in enumerate(target)}
        for column, (subset, mu) in enumerate(source):
            for j, generator in enumerate(subset):
                sign = 1 if j % 2 == 0 else -1
                rest = subset[:j] + subset[j + 1:]
                for exponent, coefficient in _multiply(seq.elements[generator], mu).items():
                    key = (index[(rest, exponent)], column)
                    entries[key] = entries.get(key, Fraction(0)) + sign * coefficient
    return linalg.sparse_matrix(len(target), len(source), entries)


def _assert_complex(d_low: DomainMatrix, d_high: DomainMatrix, k: int, t: int):
    if not linalg.is_zero(linalg.product(d_low, d_high)):
        raise InvariantViolation(f"d_{k} o d_{k + 1} != 0 in internal degree {t}")


@dataclass(frozen=True)
class DegreePiece:
    t: int
    chain_dims: Tuple[int, ...]
    ranks: Tuple[int, ...]
    homology: Tuple[int, ...]


def _degree_piece(seq: HomogeneousSequence, t: int) -> DegreePiece:
    s = seq.length
    chain_dims = tuple(len(chain_basis(seq, k, t)) for k in range(s + 1))
    matrices = {k: differential(seq, k, t) for k in range(1, s + 1)}
    for k in range(1, s):
        _assert_complex(matrices[k], matrices[k + 1], k, t)
    # ranks[k] is the rank of d_k; d_0 and d_{s+1} are zero
    ranks = [0] + [linalg.rank(matrices[k]) for k in range(1, s + 1)] + [0]
    homology = tuple(chain_dims[k] - ranks[k] - ranks[k + 1] for k in range(s + 1))
    logger.debug("degree %d: chain %s ranks %s homology %s", t, chain_dims, ranks, homology)
    return DegreePiece(t, chain_dims, tuple(ranks), homology)


@dataclass(frozen=True)
class KoszulReport:
    """Homology and chain dimensions, indexed [k][t] for 0 <= k <= s, 0 <= t <= D."""

    sequence: HomogeneousSequence
    max_degree: int
    dims: Tuple[Tuple[int, ...], ...]
    chain_dims: Tuple[Tuple[int, ...], ...]

    def euler_sides(self, t: int) -> Tuple[int, int]:
        chain = sum((-1) ** k * self.chain_dims[k][t] for k in range(len(self.chain_dims)))
        homology = sum((-1) ** k * self.dims[k][t] for k in range(len(self.dims)))
        return chain, homology

    def to_json(self) -> dict:
        return {
            "vars": self.sequence.ring.num_vars,
            "sequence": self.sequence.to_json(),
            "degrees": list(self.sequence.degrees),
            "maxDegree": self.max_degree,
            "dims": [list(row) for row in self.dims],
            "chainDims": [list(row) for row in self.chain_dims],
        }

    def to_frame(self, table: str = "dims") -> pd.DataFrame:
        rows = self.dims if table == "dims" else self.chain_dims
        frame = pd.DataFrame([list(r) for r in rows], columns=[f"t={t}" for t in range(self.max_degree + 1)])
        frame.index = [f"H_{k}" if table == "dims" else f"C_{k}" for k in range(len(rows))]
        return frame

    def to_table(self) -> str:
        return self.to_frame("dims").to_string()


def koszul_homology(seq: HomogeneousSequence, max_degree: int, workers: int = 1) -> KoszulReport:
    if max_degree < 0:
        raise DomainError(f"max degree must be non-negative, got {max_degree}")
    degrees = range(max_degree + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_degree_piece, seq, t) for t in degrees]
            pieces = [future.result() for future in futures]
    else:
        pieces = [_degree_piece(seq, t) for t in degrees]

    s = seq.length
    report = KoszulReport(
        sequence=seq,
        max_degree=max_degree,
        dims=tuple(tuple(p.homology[k] for p in pieces) for k in range(s + 1)),
        chain_dims=tuple(tuple(p.chain_dims[k] for p in pieces) for k in range(s + 1)),
    )
    for t in degrees:
        chain, homology = report.euler_sides(t)
        if chain != homology:
            raise InvariantViolation(f"Euler identity fails in degree {t}: {chain} != {homology}")
    logger.info("Koszul complex of %d elements in %d variables computed up to degree %d",
                s, seq.ring.num_vars, max_degree)
    return report


def is_regular_up_to(seq: HomogeneousSequence, max_degree: int, report: KoszulReport = None) -> bool:
    """True when H_k vanishes for every k >= 1 up to the given degree; a certificate, not a proof."""
    report = report or koszul_homology(seq, max_degree)
    return all(x == 0 for row in report.dims[1:] for x in row[:max_degree + 1])


def hilbert_function(seq: HomogeneousSequence, max_degree: int, report: KoszulReport = None) -> List[int]:
    """dim (A/I)_t = dim H_0 in degree t."""
    report = report or koszul_homology(seq, max_degree)
    return list(report.dims[0][:max_degree + 1])


def hilbert_product_formula(degrees: Sequence[int], num_vars: int, max_degree: int) -> List[int]:
    """Coefficients of prod_i (1 - q^d_i) / (1 - q)^m up to q^D."""
    numerator = [0] * (max_degree + 1)
    numerator[0] = 1
    for d in degrees:
        numerator = [numerator[t] - (numerator[t - d] if t >= d else 0) for t in range(max_degree + 1)]
    free = [comb(t + num_vars - 1, num_vars - 1) for t in range(max_degree + 1)]
    return [sum(numerator[i] * free[t - i] for i in range(t + 1)) for t in range(max_degree + 1)]


def tor_dimensions(seq: HomogeneousSequence, max_degree: int) -> List[List[int]]:
    """dim Tor_k(A/I, A/I)_t for a sequence certified regular up to the degree bound.

    Tensoring the Koszul resolution with A/I kills every differential, so
    Tor_k in degree t is the sum over |S| = k of dim (A/I)_{t - deg S}.
    """
    report = koszul_homology(seq, max_degree)
    if not is_regular_up_to(seq, max_degree, report):
        raise PreconditionError(
            f"sequence is not regular up to degree {max_degree}; the Koszul complex is not a resolution"
        )
    hilbert = report.dims[0]
    table = []
    for k in range(seq.length + 1):
        row = []
        for t in range(max_degree + 1):
            total = 0
            for subset in itertools.combinations(range(seq.length), k):
                shift = t - seq.subset_degree(subset)
                if shift >= 0:
                    total += hilbert[shift]
            row.append(total)
        table.append(row)
    return table


def homology_representatives(seq: HomogeneousSequence, k: int, t: int) -> List[List[Fraction]]:
    """Cycles in chain_basis(seq, k, t) whose classes form a basis of H_k in degree t."""
    cycles = linalg.nullspace(differential(seq, k, t))
    spanned = differential(seq, k + 1, t)
    spanned_rank = linalg.rank(spanned)
    representatives = []
    for v in cycles:
        extended = linalg.stack_columns(spanned, [v])
        extended_rank = linalg.rank(extended)
        if extended_rank > spanned_rank:
            representatives.append(v)
            spanned, spanned_rank = extended, extended_rank
    return representatives


def _times_generator(seq: HomogeneousSequence, j: int, k: int, t: int,
                     vector: Sequence[Fraction]) -> List[Fraction]:
    """a_j * v, with v in degree t, as a vector in degree t + d_j."""
    source = chain_basis(seq, k, t)
    target = chain_basis(seq, k, t + seq.degrees[j])
    index = {element: i for i, element in enumerate(target)}
    out = [Fraction(0)] * len(target)
    for value, (subset, mu) in zip(vector, source):
        if value:
            for exponent, coefficient in _multiply(seq.elements[j], mu).items():
                out[index[(subset, exponent)]] += value * coefficient
    return out


def annihilation_check(seq: HomogeneousSequence, k: int, max_degree: int) -> bool:
    """Every a_j kills H_k: a_j * v is a boundary for each homology representative v."""
    if k < 1:
        raise DomainError(f"annihilation is checked for k >= 1, got {k}")
    top = max_degree - max(seq.degrees)
    for t in range(top + 1):
        representatives = homology_representatives(seq, k, t)
        if not representatives:
            continue
        for j in range(seq.length):
            image = differential(seq, k + 1, t + seq.degrees[j])
            products = [_times_generator(seq, j, k, t, v) for v in representatives]
            # all products are boundaries iff appending them keeps the rank
            if linalg.rank(linalg.stack_columns(image, products)) != linalg.rank(image):
                logger.warning("a_%d does not annihilate H_%d in degree %d", j + 1, k, t)
                return False
    return True


def euler_identity_check(seq: HomogeneousSequence, max_degree: int, report: KoszulReport = None) -> bool:
    """Alternating sums of chain and homology dimensions agree in every degree."""
    report = report or koszul_homology(seq, max_degree)
    return all(report.euler_sides(t)[0] == report.euler_sides(t)[1] for t in range(max_degree + 1))
