"""
K_0(P^n) = Z[xi]/(1 - xi)^(n+1) with xi = [O(1)], stored on the basis
1, xi, ..., xi^n, together with the Euler characteristic and the Chern
character into the Chow ring.
"""

import logging
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence, Tuple

import numpy as np

from app.utils import linalg
from app.utils.errors import DomainError
from app.utils.exact_core import ChowClass, exp_series

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KClass:
    ambient: int
    coeffs: Tuple[int, ...]

    def __post_init__(self):
        if self.ambient < 1:
            raise DomainError(f"ambient dimension must be positive, got {self.ambient}")
        if len(self.coeffs) != self.ambient + 1:
            raise DomainError(f"a K-class on P^{self.ambient} has {self.ambient + 1} coefficients")
        for c in self.coeffs:
            if isinstance(c, bool) or not isinstance(c, int):
                raise DomainError(f"K-theory coefficients are integers, got {c!r}")

    def __add__(self, other: "KClass") -> "KClass":
        return k_add(self, other)

    def __sub__(self, other: "KClass") -> "KClass":
        return k_sub(self, other)

    def __neg__(self) -> "KClass":
        return k_neg(self)

    def __mul__(self, other: "KClass") -> "KClass":
        return k_mul(self, other)

    def __pow__(self, exponent: int) -> "KClass":
        return k_pow(self, exponent)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_json(self) -> dict:
        return {"ambient": self.ambient, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> "KClass":
        try:
            return cls(int(data["ambient"]), tuple(int(c) for c in data["coeffs"]))
        except (KeyError, TypeError, ValueError) as e:
            raise DomainError(f"malformed K-class document: {e}")

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            monomial = "" if k == 0 else "xi" if k == 1 else f"xi^{k}"
            if not monomial:
                terms.append(str(c))
            else:
                terms.append(monomial if c == 1 else f"-{monomial}" if c == -1 else f"{c}*{monomial}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def _reduce(n: int, poly: Sequence[int]) -> Tuple[int, ...]:
    """Reduce a polynomial in xi modulo (1 - xi)^(n+1).

    xi^(n+1) = sum_{j<=n} (-1)^(n+j) C(n+1, j) xi^j; the relation is monic
    up to sign, so integrality is preserved.
    """
    coeffs = [int(c) for c in poly]
    relation = [(-1) ** (n + j) * comb(n + 1, j) for j in range(n + 1)]
    for top in range(len(coeffs) - 1, n, -1):
        c = coeffs[top]
        if c == 0:
            continue
        coeffs[top] = 0
        shift = top - n - 1
        for j, r in enumerate(relation):
            coeffs[shift + j] += c * r
    coeffs = coeffs[:n + 1] + [0] * (n + 1 - len(coeffs))
    return tuple(coeffs)


def k_from_coeffs(n: int, coeffs: Iterable[int]) -> KClass:
    """Any integer polynomial in xi, reduced onto the basis."""
    return KClass(n, _reduce(n, list(coeffs)))


def k_zero(n: int) -> KClass:
    return KClass(n, (0,) * (n + 1))


def k_one(n: int) -> KClass:
    return k_line(n, 0)


def _xi_inverse(n: int) -> KClass:
    """xi^-1 = sum_{k<=n} (1 - xi)^k."""
    one_minus_xi = k_from_coeffs(n, [1, -1])
    total, power = k_zero(n), k_one(n)
    for _ in range(n + 1):
        total = k_add(total, power)
        power = k_mul(power, one_minus_xi)
    return total


def k_line(n: int, d: int) -> KClass:
    """[O(d)] on the basis; negative twists go through the unit inverse of xi."""
    if d >= 0:
        return k_from_coeffs(n, [0] * d + [1])
    return k_pow(_xi_inverse(n), -d)


def _check_ambient(a: KClass, b: KClass):
    if a.ambient != b.ambient:
        raise DomainError(f"ambient mismatch: P^{a.ambient} vs P^{b.ambient}")


def k_add(a: KClass, b: KClass) -> KClass:
    _check_ambient(a, b)
    return KClass(a.ambient, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))


def k_neg(a: KClass) -> KClass:
    return KClass(a.ambient, tuple(-x for x in a.coeffs))


def k_sub(a: KClass, b: KClass) -> KClass:
    return k_add(a, k_neg(b))


def k_mul(a: KClass, b: KClass) -> KClass:
    """[F].[G] = [F tensor G]: polynomial product, then reduction."""
    _check_ambient(a, b)
    n = a.ambient
    product = [0] * (2 * n + 1)
    for i, x in enumerate(a.coeffs):
        if x:
            for j, y in enumerate(b.coeffs):
                product[i + j] += x * y
    return k_from_coeffs(n, product)


def k_scale(a: KClass, factor: int) -> KClass:
    return KClass(a.ambient, tuple(factor * x for x in a.coeffs))


def k_pow(a: KClass, exponent: int) -> KClass:
    if exponent < 0:
        raise DomainError("negative powers are only defined for line classes; use k_line")
    result, base = k_one(a.ambient), a
    while exponent:
        if exponent & 1:
            result = k_mul(result, base)
        base = k_mul(base, base)
        exponent >>= 1
    return result


def k_rank(a: KClass) -> int:
    """Evaluation at xi = 1."""
    return sum(a.coeffs)


def k_dual(a: KClass) -> KClass:
    """The ring involution xi -> xi^-1."""
    n = a.ambient
    total = k_zero(n)
    for k, c in enumerate(a.coeffs):
        if c:
            total = k_add(total, k_scale(k_line(n, -k), c))
    return total


def k_alternating_sum(classes: Sequence[KClass]) -> KClass:
    """sum_i (-1)^i [F_i]; vanishes on exact sequences."""
    if not classes:
        raise DomainError("alternating sum of an empty sequence")
    total = k_zero(classes[0].ambient)
    for i, a in enumerate(classes):
        total = k_add(total, a if i % 2 == 0 else k_neg(a))
    return total


def k_dual_line_from_koszul(n: int) -> KClass:
    """[O(-1)] read off the dualized Koszul complex of x_0, ..., x_n.

    0 -> O(-1) -> O^(n+1) -> O(1)^C(n+1,2) -> ... -> O(n) -> 0 is exact, so
    [O(-1)] = sum_{k=1}^{n+1} (-1)^(k+1) C(n+1, k) xi^(k-1).
    """
    coeffs = [0] * (n + 1)
    for k in range(1, n + 2):
        coeffs[k - 1] += (-1) ** (k + 1) * comb(n + 1, k)
    return k_from_coeffs(n, coeffs)


def k_tangent(n: int) -> KClass:
    """[T] = (n+1) xi - 1 from the Euler sequence."""
    return k_from_coeffs(n, [-1, n + 1])


def euler_char(a: KClass) -> int:
    """chi(xi^k) = C(n+k, n), extended linearly."""
    return euler_char_of_polynomial(a.ambient, a.coeffs)


def ch_map(a: KClass) -> ChowClass:
    """Chern character: xi^k -> exp(kH)."""
    n = a.ambient
    total = ChowClass.zero(n)
    for k, c in enumerate(a.coeffs):
        if c:
            total = total + ChowClass.from_series(n, exp_series(n, k)).scale(c)
    return total


def ch_matrix(n: int) -> np.ndarray:
    """Column k holds the parts of ch(xi^k)."""
    m = np.zeros((n + 1, n + 1), dtype=object)
    for k in range(n + 1):
        m[:, k] = list(ChowClass.from_series(n, exp_series(n, k)).parts)
    return m


def ch_matrix_rank(n: int) -> int:
    r = linalg.rank(ch_matrix(n))
    logger.debug("ch matrix on P^%d has rank %d", n, r)
    return r


def euler_char_of_polynomial(n: int, poly: Sequence[int]) -> int:
    """chi of an unreduced polynomial in xi, term by term with chi(xi^d) = C(n+d, n)."""
    return sum(c * comb(n + d, n) for d, c in enumerate(poly))
