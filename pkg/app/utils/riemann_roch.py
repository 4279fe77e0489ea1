"""
Hirzebruch-Riemann-Roch on P^n and the numerical Riemann-Roch formulas for
curves and surfaces.

The left-hand side of every HRR check comes from K-theory (euler_char of a
tracked K-class); the right-hand side is the degree of ch(E).td(P^n). The
two are computed by unrelated code paths and compared exactly.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import List, Optional, Sequence, Tuple, Union

import pandas as pd

from app.utils.bundles import (
    BundleClass,
    chern_character,
    direct_sum,
    dual,
    line_bundle,
    tangent_bundle,
    tensor,
    trivial_bundle,
)
from app.utils.errors import (
    DomainError,
    InconsistentContextError,
    InvariantViolation,
    UnsupportedInputError,
)
from app.utils.exact_core import (
    ChowClass,
    TruncatedSeries,
    format_rational,
    integral,
    series_exp,
    series_inverse,
    series_log,
    todd_series,
)
from app.utils.ktheory import (
    KClass,
    euler_char,
    k_add,
    k_dual,
    k_line,
    k_mul,
    k_tangent,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Projective space
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def todd_of_projective_space(n: int) -> ChowClass:
    """td(P^n) = (H / (1 - e^-H))^(n+1), truncated at H^n."""
    if n < 1:
        raise DomainError(f"projective space needs n >= 1, got {n}")
    return ChowClass.from_series(n, todd_series(n) ** (n + 1))


@dataclass(frozen=True)
class TrackedBundle:
    """A bundle class together with its K-class, when the construction has one.

    Line bundles, the tangent and cotangent bundles, sums, tensor products,
    duals and twists keep the K-class in sync; anything else drops it.
    """

    bundle: BundleClass
    kclass: Optional[KClass] = None

    @property
    def ambient(self) -> int:
        return self.bundle.ambient

    @property
    def tracked(self) -> bool:
        return self.kclass is not None

    @classmethod
    def line(cls, n: int, d: int) -> "TrackedBundle":
        return cls(line_bundle(n, d), k_line(n, d))

    @classmethod
    def trivial(cls, n: int, rank: int = 1) -> "TrackedBundle":
        kclass = KClass(n, (rank,) + (0,) * n)
        return cls(trivial_bundle(n, rank), kclass)

    @classmethod
    def tangent(cls, n: int) -> "TrackedBundle":
        return cls(tangent_bundle(n), k_tangent(n))

    @classmethod
    def cotangent(cls, n: int) -> "TrackedBundle":
        return cls.tangent(n).dual()

    @classmethod
    def untracked(cls, bundle: BundleClass) -> "TrackedBundle":
        return cls(bundle, None)

    def sum(self, *others: "TrackedBundle") -> "TrackedBundle":
        bundle = direct_sum(self.bundle, *(o.bundle for o in others))
        kclass = self.kclass
        for other in others:
            kclass = k_add(kclass, other.kclass) if kclass is not None and other.kclass is not None else None
        return TrackedBundle(bundle, kclass)

    def tensor(self, other: "TrackedBundle") -> "TrackedBundle":
        kclass = k_mul(self.kclass, other.kclass) if self.tracked and other.tracked else None
        return TrackedBundle(tensor(self.bundle, other.bundle), kclass)

    def dual(self) -> "TrackedBundle":
        return TrackedBundle(dual(self.bundle), k_dual(self.kclass) if self.tracked else None)

    def twist(self, d: int) -> "TrackedBundle":
        return self.tensor(TrackedBundle.line(self.ambient, d))

    def to_json(self) -> dict:
        data = self.bundle.to_json()
        data["kclass"] = self.kclass.to_json()["coeffs"] if self.tracked else None
        return data


@dataclass(frozen=True)
class HrrReport:
    lhs: int
    rhs: Fraction
    equal: bool

    def __post_init__(self):
        if self.equal != (self.lhs == self.rhs):
            raise InvariantViolation("HrrReport.equal disagrees with lhs == rhs")

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": format_rational(self.rhs), "equal": self.equal}


def hrr_rhs(bundle: BundleClass) -> Fraction:
    """The degree of ch(E).td(P^n)."""
    return integral(chern_character(bundle) * todd_of_projective_space(bundle.ambient))


def hrr_check(bundle: Union[TrackedBundle, BundleClass], kclass: Optional[KClass] = None) -> HrrReport:
    """Compare chi from K-theory with the degree of ch(E).td(P^n)."""
    if isinstance(bundle, TrackedBundle):
        kclass = bundle.kclass if kclass is None else kclass
        bundle = bundle.bundle
    if kclass is None:
        raise UnsupportedInputError(
            "no K-class is tracked for this bundle; build it from line bundles, T, sum, tensor and dual"
        )
    if kclass.ambient != bundle.ambient:
        raise DomainError(f"K-class lives on P^{kclass.ambient}, bundle on P^{bundle.ambient}")
    if sum(kclass.coeffs) != bundle.rank:
        raise DomainError(f"K-class has rank {sum(kclass.coeffs)} but the bundle has rank {bundle.rank}")
    lhs = euler_char(kclass)
    rhs = hrr_rhs(bundle)
    report = HrrReport(lhs=lhs, rhs=rhs, equal=(lhs == rhs))
    logger.debug("HRR on P^%d: lhs=%s rhs=%s", bundle.ambient, lhs, rhs)
    return report


def hrr_rhs_residue(n: int, d: int) -> Fraction:
    """Degree of ch(O(d)).td(P^n) after substituting y = 1 - e^-x.

    The degree equals the residue of e^(dx) / (1 - e^-x)^(n+1) at 0. With
    x = -log(1 - y) and dx = dy / (1 - y), the residue is the coefficient of
    y^n in exp(d x(y)) / (1 - y).
    """
    if n < 1:
        raise DomainError(f"projective space needs n >= 1, got {n}")
    one_minus_y = TruncatedSeries.from_coefficients([1, -1], n)
    x_of_y = -series_log(one_minus_y)
    integrand = series_exp(x_of_y.scale(d)) * series_inverse(one_minus_y)
    return integrand[n]


def cohomology_oracle(n: int, d: int) -> int:
    """chi(P^n, O(d)) from the cohomology itself.

    H^0 counts monomials of degree d, the middle cohomology vanishes and H^n
    is dual to H^0(O(-d-n-1)) because the canonical bundle is O(-n-1).
    """
    if n < 1:
        raise DomainError(f"projective space needs n >= 1, got {n}")
    if d >= 0:
        return comb(n + d, n)
    if d >= -n:
        return 0
    return (-1) ** n * comb(-d - 1, n)


@dataclass(frozen=True)
class ChiRow:
    d: int
    k_theory: int
    integral: Fraction
    oracle: int
    residue: Fraction

    @property
    def consistent(self) -> bool:
        return self.k_theory == self.integral == self.oracle == self.residue

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "chi": self.k_theory,
            "integral": format_rational(self.integral),
            "oracle": self.oracle,
            "residue": format_rational(self.residue),
        }


def _chi_row(n: int, d: int) -> ChiRow:
    return ChiRow(
        d=d,
        k_theory=euler_char(k_line(n, d)),
        integral=hrr_rhs(line_bundle(n, d)),
        oracle=cohomology_oracle(n, d),
        residue=hrr_rhs_residue(n, d),
    )


def chi_table(n: int, dmin: int, dmax: int, workers: int = 1) -> List[ChiRow]:
    """chi(P^n, O(d)) for dmin <= d <= dmax by four independent routes."""
    if dmin > dmax:
        raise DomainError(f"empty range: dmin={dmin} > dmax={dmax}")
    degrees = list(range(dmin, dmax + 1))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(_chi_row, n, d) for d in degrees]
            rows = [future.result() for future in futures]
    else:
        rows = [_chi_row(n, d) for d in degrees]
    for row in rows:
        if not row.consistent:
            raise InvariantViolation(f"chi table on P^{n} disagrees at d={row.d}: {row.to_json()}")
    logger.info("chi table on P^%d for d in [%d, %d]: %d rows", n, dmin, dmax, len(rows))
    return rows


def chi_table_frame(rows: Sequence[ChiRow]) -> pd.DataFrame:
    return pd.DataFrame([row.to_json() for row in rows])


# ---------------------------------------------------------------------------
# Curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveContext:
    genus: int
    name: str = "C"

    def __post_init__(self):
        if isinstance(self.genus, bool) or not isinstance(self.genus, int) or self.genus < 0:
            raise DomainError(f"genus must be a non-negative integer, got {self.genus!r}")

    def to_json(self) -> dict:
        return {"name": self.name, "genus": self.genus}


def curve_context(genus: int, name: str = "C") -> CurveContext:
    return CurveContext(genus, name)


def curve_chi(ctx: CurveContext, rank: int, deg: int) -> int:
    """chi(C, E) = deg(E) + r (1 - g)."""
    if rank < 0:
        raise DomainError(f"rank must be non-negative, got {rank}")
    return deg + rank * (1 - ctx.genus)


def curve_chi_via_todd(ctx: CurveContext, rank: int, deg: int) -> Fraction:
    """Degree-one part of (r + c_1(E)).(1 + c_1(T_C)/2) with deg c_1(T_C) = 2 - 2g."""
    if rank < 0:
        raise DomainError(f"rank must be non-negative, got {rank}")
    ch = (Fraction(rank), Fraction(deg))
    td = (Fraction(1), Fraction(2 - 2 * ctx.genus, 2))
    return ch[0] * td[1] + ch[1] * td[0]


# ---------------------------------------------------------------------------
# Surfaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceContext:
    """Intersection data of a smooth projective surface in a divisor basis."""

    basis_names: Tuple[str, ...]
    pairing: Tuple[Tuple[int, ...], ...]
    canonical: Tuple[int, ...]
    c2_integral: int
    name: str = "S"

    def __post_init__(self):
        object.__setattr__(self, 'basis_names', tuple(self.basis_names))
        object.__setattr__(self, 'pairing', tuple(tuple(int(x) for x in row) for row in self.pairing))
        object.__setattr__(self, 'canonical', tuple(int(x) for x in self.canonical))
        size = len(self.basis_names)
        if size == 0:
            raise DomainError("a surface context needs at least one basis divisor")
        if len(self.pairing) != size or any(len(row) != size for row in self.pairing):
            raise DomainError(f"pairing must be a {size}x{size} matrix")
        if len(self.canonical) != size:
            raise DomainError(f"canonical class needs {size} coordinates")
        for i in range(size):
            for j in range(i + 1, size):
                if self.pairing[i][j] != self.pairing[j][i]:
                    raise DomainError(
                        f"pairing is not symmetric: {self.basis_names[i]}.{self.basis_names[j]}"
                    )

    def intersect(self, a: Sequence[int], b: Sequence[int]) -> int:
        if len(a) != len(self.basis_names) or len(b) != len(self.basis_names):
            raise DomainError(f"divisors need {len(self.basis_names)} coordinates")
        return sum(a[i] * self.pairing[i][j] * b[j]
                   for i in range(len(a)) for j in range(len(b)))

    @property
    def canonical_square(self) -> int:
        return self.intersect(self.canonical, self.canonical)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "basis": list(self.basis_names),
            "pairing": [list(row) for row in self.pairing],
            "canonical": list(self.canonical),
            "c2": self.c2_integral,
        }


def surface_context_p2() -> SurfaceContext:
    """P^2 with basis [H]: H.H = 1, K = -3H, deg c_2(T) = 3."""
    return SurfaceContext(("H",), ((1,),), (-3,), 3, name="P2")


def noether_chi(ctx: SurfaceContext) -> int:
    """chi(O_S) = (K^2 + c_2) / 12."""
    total = ctx.canonical_square + ctx.c2_integral
    if total % 12:
        raise InconsistentContextError(
            f"K^2 + c2 = {total} is not divisible by 12; no smooth surface has this data"
        )
    return total // 12


def surface_chi(ctx: SurfaceContext, divisor: Sequence[int]) -> Fraction:
    """chi(S, O(D)) = D.(D - K)/2 + chi(O_S)."""
    value = Fraction(ctx.intersect(divisor, divisor) - ctx.intersect(divisor, ctx.canonical), 2) \
        + noether_chi(ctx)
    if value.denominator != 1:
        raise InconsistentContextError(
            f"chi(O(D)) = {format_rational(value)} is not an integer; D.D and D.K must have equal parity"
        )
    return value


def surface_chi_via_todd(ctx: SurfaceContext, divisor: Sequence[int]) -> Fraction:
    """Degree-two part of ch(O(D)).td(S) with c_1(T_S) = -K and deg c_2 = c2."""
    c1 = [-k for k in ctx.canonical]
    # td_1 is c_1, halved when paired below
    td_0, td_1, td_2 = Fraction(1), c1, Fraction(ctx.intersect(c1, c1) + ctx.c2_integral, 12)
    ch_0, ch_1, ch_2 = Fraction(1), list(divisor), Fraction(ctx.intersect(divisor, divisor), 2)
    return ch_0 * td_2 + Fraction(ctx.intersect(ch_1, td_1), 2) + ch_2 * td_0
