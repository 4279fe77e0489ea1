"""
The property suite behind the ``check`` command.

Every group draws its randomized inputs from one seeded generator and
raises InvariantViolation on the first identity that fails.
"""

import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import comb
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from app.utils import bundles as bc
from app.utils import linalg
from app.utils.errors import InvariantViolation
from app.utils.exact_core import (
    ChowClass,
    TruncatedSeries,
    chow_inverse,
    hyperplane,
    integral,
    series_exp,
    series_inverse,
    series_log,
    todd_series,
)
from app.utils.expression import parse, print_expr, random_expression
from app.utils.koszul import (
    GradedRing,
    HomogeneousSequence,
    annihilation_check,
    hilbert_product_formula,
    is_regular_up_to,
    koszul_homology,
    parse_sequence,
    tor_dimensions,
)
from app.utils.ktheory import (
    ch_map,
    ch_matrix_rank,
    euler_char,
    euler_char_of_polynomial,
    k_dual_line_from_koszul,
    k_from_coeffs,
    k_line,
    k_mul,
    k_one,
)
from app.utils.riemann_roch import (
    TrackedBundle,
    chi_table,
    cohomology_oracle,
    curve_chi,
    curve_chi_via_todd,
    curve_context,
    hrr_check,
    noether_chi,
    surface_chi,
    surface_chi_via_todd,
    surface_context_p2,
    todd_of_projective_space,
)
from app.utils.symroots import (
    ElementaryExpansion,
    MultiPoly,
    RootGroup,
    elementary_symmetric,
    evaluate_universal,
    power_sum,
    reduce_to_elementaries,
)

logger = logging.getLogger(__name__)


def expect(condition: bool, message: str):
    if not condition:
        raise InvariantViolation(message)


def random_rational(rng: random.Random, bound: int = 9) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_bundle(rng: random.Random, n: int, max_rank: int = 4) -> bc.BundleClass:
    """Any rank in 0..max_rank with small random integer Chern classes."""
    rank = rng.randint(0, max_rank)
    parts = [1] + [rng.randint(-3, 3) for _ in range(min(rank, n))]
    return bc.BundleClass(n, rank, ChowClass.from_parts(n, parts))


def random_expansion(rng: random.Random, groups: Tuple[RootGroup, ...], truncation: int) -> ElementaryExpansion:
    """A few random monomials in the elementary quantities of the given groups."""
    terms = {}
    for _ in range(rng.randint(1, 4)):
        key = tuple(tuple(rng.randint(0, 2) for _ in range(g.size)) for g in groups)
        terms[key] = random_rational(rng)
    return ElementaryExpansion(groups, truncation, terms)


def random_tracked_bundle(rng: random.Random, n: int, depth: int = 2) -> TrackedBundle:
    """Lines combined by sum, tensor and dual, so the K-class stays tracked."""
    if depth <= 0:
        return TrackedBundle.line(n, rng.randint(-4, 4))
    choice = rng.randrange(4)
    if choice == 0:
        return random_tracked_bundle(rng, n, depth - 1).sum(random_tracked_bundle(rng, n, depth - 1))
    if choice == 1:
        return random_tracked_bundle(rng, n, depth - 1).tensor(TrackedBundle.line(n, rng.randint(-3, 3)))
    if choice == 2:
        return random_tracked_bundle(rng, n, depth - 1).dual()
    return TrackedBundle.line(n, rng.randint(-4, 4))


class InvariantSuite:
    """Runs every property group; results mirror the CLI's JSON report."""

    def __init__(self, cases: int = 200, seed: int = 20240, workers: int = 1):
        self.cases = cases
        self.seed = seed
        self.workers = workers
        self.results = {'passed': 0, 'failed': 0, 'groups': []}
        self.groups: Dict[str, Callable[[random.Random], int]] = {
            'exact-core': self.check_exact_core,
            'symroots': self.check_symroots,
            'bundle-calculus': self.check_bundles,
            'k-theory': self.check_ktheory,
            'riemann-roch': self.check_riemann_roch,
            'koszul': self.check_koszul,
            'expression': self.check_expressions,
        }

    def _rng(self, name: str) -> random.Random:
        return random.Random(f"{self.seed}:{name}")

    def _run_group(self, name: str) -> Tuple[str, int, float]:
        start = time.time()
        count = self.groups[name](self._rng(name))
        return name, count, time.time() - start

    def run(self, only: List[str] = None) -> dict:
        names = only or list(self.groups)
        logger.info("🧪 running %d property groups (%d cases, seed %d)", len(names), self.cases, self.seed)
        if self.workers > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                futures = [executor.submit(self._run_group, name) for name in names]
                outcomes = []
                for future in futures:
                    outcomes.append(future.result())
        else:
            outcomes = [self._run_group(name) for name in names]
        for name, count, elapsed in outcomes:
            self.results['passed'] += count
            self.results['groups'].append({'name': name, 'checks': count, 'seconds': round(elapsed, 3)})
            logger.info("✅ %s: %d checks in %.2fs", name, count, elapsed)
        return self.results

    # -- exact-core -------------------------------------------------------

    def check_exact_core(self, rng: random.Random) -> int:
        count = 0
        for _ in range(self.cases):
            a, b, c = (random_rational(rng) for _ in range(3))
            expect((a + b) + c == a + (b + c) and a * (b + c) == a * b + a * c, "rational ring axioms")
            if a != 0:
                expect(a * (1 / a) == 1, "rational inverse")
            count += 1

            order = rng.randint(0, 12)
            s = TruncatedSeries.from_coefficients([1] + [random_rational(rng) for _ in range(order)], order)
            one = TruncatedSeries.constant(1, order)
            expect(series_exp(series_log(s)) == s, f"exp(log(s)) != s for {s!r}")
            expect(s * series_inverse(s) == one and series_inverse(s) * s == one, f"inverse failed for {s!r}")
            count += 1

            n = rng.randint(1, 6)
            x, y, z = (ChowClass.from_parts(n, [random_rational(rng) for _ in range(n + 1)]) for _ in range(3))
            expect(x * y == y * x and (x * y) * z == x * (y * z), "Chow ring commutative and associative")
            expect(x * (y + z) == x * y + x * z, "Chow ring distributive")
            expect(integral(x + y) == integral(x) + integral(y), "integral is additive")
            count += 1

        for n in range(1, 9):
            expect((hyperplane(n) ** (n + 1)).is_zero(), f"H^{n + 1} != 0 on P^{n}")
            expect(not (hyperplane(n) ** n).is_zero(), f"H^{n} vanishes on P^{n}")
            count += 1
        expect(todd_series(4)[4] == Fraction(-1, 720), "Todd series x^4 coefficient")
        return count + 1

    # -- symroots ---------------------------------------------------------

    def check_symroots(self, rng: random.Random) -> int:
        count = 0
        for _ in range(max(1, self.cases // 10)):
            rank = rng.randint(1, 4)
            truncation = rng.randint(1, 6)
            group = RootGroup("a", rank)
            terms = {}
            for _ in range(rng.randint(1, 4)):
                key = tuple(rng.randint(0, 2) for _ in range(rank))
                terms[(key,)] = random_rational(rng)
            expansion = ElementaryExpansion((group,), truncation, terms)
            expect(reduce_to_elementaries(expansion.expand()) == expansion,
                   f"reduce(expand(e)) != e for {expansion}")
            count += 1

        for k in range(1, 7):
            group = RootGroup("a", 4)
            groups = (group,)
            # e_i vanishes past the group size
            newton = MultiPoly.constant(groups, k, 0)
            if k <= group.size:
                newton = elementary_symmetric(k, group, groups, k).scale((-1) ** (k - 1) * k)
            for i in range(1, min(k, group.size + 1)):
                newton = newton + (elementary_symmetric(i, group, groups, k)
                                   * power_sum(k - i, group, groups, k)).scale((-1) ** (i - 1))
            expect(newton == power_sum(k, group, groups, k), f"Newton identity fails for p_{k}")
            count += 1

        for _ in range(max(1, self.cases // 10)):
            n = rng.randint(1, 5)
            bundles = [random_bundle(rng, n, 3), random_bundle(rng, n, 3)]
            groups = (RootGroup("a", bundles[0].rank), RootGroup("b", bundles[1].rank))
            a, b = random_expansion(rng, groups, n), random_expansion(rng, groups, n)
            ev_a, ev_b = evaluate_universal(a, bundles), evaluate_universal(b, bundles)
            expect(evaluate_universal(a * b, bundles) == ev_a * ev_b,
                   f"evaluate_universal does not respect products of {a} and {b}")
            expect(evaluate_universal(a + b, bundles) == ev_a + ev_b,
                   f"evaluate_universal does not respect sums of {a} and {b}")
            count += 2
        return count

    # -- bundle-calculus --------------------------------------------------

    def check_bundles(self, rng: random.Random) -> int:
        count = 0
        for n in range(1, 9):
            t = bc.tangent_bundle(n)
            expect(all(t.chern[k] == comb(n + 1, k) for k in range(n + 1)), f"c(T) on P^{n}")
            expect(bc.todd(t) == todd_of_projective_space(n), f"td(T) on P^{n}")
            expect(integral(todd_of_projective_space(n)) == 1, f"chi(O) on P^{n}")
            count += 3

        for _ in range(self.cases):
            n = rng.randint(1, 6)
            e, f = random_bundle(rng, n), random_bundle(rng, n)
            s = bc.direct_sum(e, f)
            expect(s.chern == e.chern * f.chern, "Whitney formula")
            expect(bc.chern_character(s) == bc.chern_character(e) + bc.chern_character(f), "ch additive")
            expect(bc.todd(s) == bc.todd(e) * bc.todd(f), "td multiplicative")
            expect(bc.segre(e) * e.chern == ChowClass.unit(n), "segre . c = 1")
            expect(bc.chern_from_segre(bc.segre(e)) == e.chern, "Chern from Segre")
            d = bc.dual(e)
            expect(bc.dual(d) == e, "dual involution")
            expect(all(d.chern[k] == (-1) ** k * e.chern[k] for k in range(n + 1)), "dual signs")
            expect(bc.degree(e) == bc.degree(bc.determinant(e)), "degree of det")
            count += 8

        for _ in range(max(1, self.cases // 10)):
            n = rng.randint(1, 6)
            e = random_bundle(rng, n)
            expect(bc.chern_character(e) == bc.chern_character_by_roots(e), "ch Newton vs roots")
            expect(bc.todd(e) == bc.todd_by_roots(e), "td Newton vs roots")
            expect(bc.wedge(e.rank, e) == bc.determinant(e), "top wedge is det")
            expect(bc.sym(1, e) == e and bc.wedge(1, e) == e, "first powers")
            lhs = ChowClass.zero(n)
            for k in range(e.rank + 1):
                lhs = lhs + bc.chern_character(bc.wedge(k, e)).scale((-1) ** k)
            d = bc.dual(e)
            rhs = d.c(e.rank) * chow_inverse(bc.todd(d))
            expect(lhs == rhs, f"alternating wedge identity fails for {e}")
            count += 5

            m = rng.randint(1, 4)
            a, b = random_bundle(rng, m, 3), random_bundle(rng, m, 3)
            expect(bc.chern_character(bc.tensor(a, b)) == bc.chern_character(a) * bc.chern_character(b),
                   f"ch multiplicative on {a} and {b}")
            count += 1
        return count

    # -- k-theory ---------------------------------------------------------

    def check_ktheory(self, rng: random.Random) -> int:
        count = 0
        for n in range(1, 9):
            expect(k_from_coeffs(n, [comb(n + 1, j) * (-1) ** j for j in range(n + 2)]).is_zero(),
                   f"(1 - xi)^{n + 1} != 0")
            expect(k_mul(k_line(n, 1), k_line(n, -1)) == k_one(n), f"xi . xi^-1 != 1 on P^{n}")
            expect(ch_matrix_rank(n) == n + 1, f"ch matrix rank on P^{n}")
            expect(k_dual_line_from_koszul(n) == k_line(n, -1), f"Koszul [O(-1)] on P^{n}")
            relation = [comb(n + 1, j) * (-1) ** j for j in range(n + 2)]
            for m in range(n + 1):
                expect(euler_char_of_polynomial(n, [0] * m + relation) == 0,
                       f"chi does not kill (1 - xi)^{n + 1} xi^{m}")
            for d in range(-n - 5, 11):
                expect(euler_char(k_line(n, d)) == cohomology_oracle(n, d), f"chi(O({d})) on P^{n}")
            count += 4 + (n + 1) + (n + 16)

        for _ in range(self.cases):
            n = rng.randint(1, 6)
            a = k_from_coeffs(n, [rng.randint(-3, 3) for _ in range(n + 1)])
            b = k_from_coeffs(n, [rng.randint(-3, 3) for _ in range(n + 1)])
            expect(ch_map(a * b) == ch_map(a) * ch_map(b), "ch is a ring map")
            expect(a * b == b * a, "K_0 commutative")
            count += 2
        return count

    # -- riemann-roch -----------------------------------------------------

    def check_riemann_roch(self, rng: random.Random) -> int:
        count = 0
        for n in range(1, 9):
            count += len(chi_table(n, -n - 5, 10))
        for _ in range(max(1, self.cases // 4)):
            n = rng.randint(1, 6)
            report = hrr_check(random_tracked_bundle(rng, n))
            expect(report.equal, f"HRR fails: {report.to_json()}")
            count += 1
        for n in range(1, 7):
            expect(hrr_check(TrackedBundle.tangent(n)).equal, f"HRR for T on P^{n}")
            expect(hrr_check(TrackedBundle.cotangent(n)).equal, f"HRR for Omega on P^{n}")
            count += 2

        p2 = surface_context_p2()
        expect(noether_chi(p2) == 1, "Noether on P^2")
        for d in range(-8, 9):
            expect(surface_chi(p2, [d]) == cohomology_oracle(2, d), f"surface RR on P^2 at d={d}")
            expect(surface_chi_via_todd(p2, [d]) == surface_chi(p2, [d]), f"surface Todd path at d={d}")
            count += 2
        rational = curve_context(0)
        for d in range(-6, 7):
            expect(curve_chi(rational, 1, d) == cohomology_oracle(1, d), f"curve RR on P^1 at d={d}")
            count += 1
        for _ in range(self.cases):
            ctx = curve_context(rng.randint(0, 10))
            r, deg = rng.randint(0, 5), rng.randint(-20, 20)
            expect(curve_chi(ctx, r, deg) == curve_chi_via_todd(ctx, r, deg), "curve Todd path")
            count += 1
        return count + 1

    # -- koszul -----------------------------------------------------------

    def check_koszul(self, rng: random.Random) -> int:
        count = 0
        regular = [
            parse_sequence(3, ["x0", "x1", "x2"]),
            parse_sequence(2, ["x0^2", "x1^3"]),
            parse_sequence(3, ["x0^2", "x1", "x2^2"]),
        ]
        for _ in range(2):
            coefficients = [[random_rational(rng) for _ in range(3)] for _ in range(3)]
            regular.append(_linear_forms(coefficients))
        for seq in regular:
            if seq is None:
                continue
            report = koszul_homology(seq, 10, self.workers)
            expect(is_regular_up_to(seq, 10, report), f"regular sequence {seq.to_json()} shows homology")
            expect(list(report.dims[0]) == hilbert_product_formula(seq.degrees, seq.ring.num_vars, 10),
                   f"Hilbert function of {seq.to_json()}")
            count += 2

        xx = parse_sequence(1, ["x0", "x0"])
        report = koszul_homology(xx, 6)
        expect(report.dims[1][1] == 1 and sum(report.dims[1]) == 1, "H_1 of (x, x)")
        expect(annihilation_check(xx, 1, 6), "annihilation on (x, x)")
        count += 2

        for n in range(1, 5):
            seq = parse_sequence(n + 1, [f"x{i}" for i in range(n + 1)])
            tor = tor_dimensions(seq, n + 1)
            for k in range(n + 2):
                expect(tor[k][k] == comb(n + 1, k) and sum(tor[k]) == comb(n + 1, k),
                       f"Tor_{k} for the variables of P^{n}")
            count += 1

        for _ in range(min(self.cases, 50)):
            seq = _random_monomial_sequence(rng)
            k = rng.randint(1, min(3, seq.length))
            expect(annihilation_check(seq, k, 8), f"annihilation fails for {seq.to_json()} k={k}")
            if seq.length <= 3:
                order = list(range(seq.length))
                rng.shuffle(order)
                expect(koszul_homology(seq, 8).dims == koszul_homology(seq.permuted(order), 8).dims,
                       f"permutation changes homology of {seq.to_json()}")
            count += 2
        return count

    # -- expression -------------------------------------------------------

    def check_expressions(self, rng: random.Random) -> int:
        for _ in range(self.cases):
            expr = random_expression(rng, rng.randint(1, 6), ("E",))
            expect(parse(print_expr(expr)) == expr, f"print/parse round trip fails for {print_expr(expr)}")
        return self.cases


def _linear_forms(coefficients) -> Optional[HomogeneousSequence]:
    """Linear forms from a coefficient matrix; None unless the matrix has full rank."""
    if linalg.rank(np.array([list(r) for r in coefficients], dtype=object)) != len(coefficients):
        return None
    ring = GradedRing(len(coefficients[0]))
    elements = []
    for row in coefficients:
        elements.append({
            tuple(1 if j == i else 0 for j in range(ring.num_vars)): c
            for i, c in enumerate(row) if c
        })
    return HomogeneousSequence(ring, tuple(elements), (1,) * len(elements))


def _random_monomial_sequence(rng: random.Random) -> HomogeneousSequence:
    num_vars = rng.randint(1, 3)
    ring = GradedRing(num_vars)
    elements, degrees = [], []
    for _ in range(rng.randint(1, 3)):
        exponent = tuple(rng.randint(0, 2) for _ in range(num_vars))
        if sum(exponent) == 0:
            exponent = (1,) + exponent[1:]
        elements.append({exponent: Fraction(1)})
        degrees.append(sum(exponent))
    return HomogeneousSequence(ring, tuple(elements), tuple(degrees))


def run_suite(cases: int = 200, seed: int = 20240, workers: int = 1, only: List[str] = None) -> dict:
    return InvariantSuite(cases, seed, workers).run(only)
