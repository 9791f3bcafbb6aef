"""
Slope theory: μ, μ_max, μ_min, destabilizing subspaces and the
Harder–Narasimhan flag

Diagonal bundles on proper curves are split, so their flag is read off the
sorted line degrees. Lattice-hermitian bundles go through an enumeration of
saturated sublattices; the answers are certified relative to the bound.
"""

import math
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, List, Optional, Tuple

from app.config import settings
from app.exceptions import ArgumentError, UnsupportedError
from app.models.bundle import DiagonalPNF, LatticeHermitianBundle, SubspaceBasis
from app.models.curve import NevanlinnaCurve
from app.models.flag import EnumConfig, Enumerated, Flag, SlopeResult, SubquotientReport
from app.services.bundle import AnyBundle, get_bundle_algebra, gram_in_lattice_coordinates
from app.utils.arith import log_fraction
from app.utils.diagnostics import debug
from app.utils.lattice import canonical_basis, determinant, hstack, matmul, plucker_key, saturate, transpose


def _primitive_vectors(n: int, bound: int) -> List[Tuple[int, ...]]:
    """Primitive vectors of sup-norm ≤ bound, one per ± pair, in lexicographic order"""
    vectors = []
    for v in product(range(-bound, bound + 1), repeat=n):
        nonzero = [x for x in v if x != 0]
        if not nonzero or nonzero[0] < 0:
            continue
        g = 0
        for x in nonzero:
            g = math.gcd(g, x)
        if g == 1:
            vectors.append(v)
    return vectors


def _compound(G: List[List[Fraction]], k: int) -> List[List[Fraction]]:
    """k-th compound matrix Λᵏ(G): the k×k minors of G, index sets in lexicographic order"""
    index_sets = list(combinations(range(len(G)), k))
    return [[determinant([[G[i][j] for j in J] for i in I]) for J in index_sets] for I in index_sets]


def _span_key(rows: List[List[int]]) -> Optional[Tuple[int, ...]]:
    """Primitive Plücker vector of the span of the rows; None when they are dependent"""
    try:
        return plucker_key(transpose(rows))
    except ArgumentError:
        return None


class _Candidate:
    __slots__ = ("basis", "gram_det", "dim")

    def __init__(self, basis: List[List[int]], gram_det: Fraction, dim: int):
        self.basis = basis
        self.gram_det = gram_det
        self.dim = dim

    @property
    def degree(self) -> float:
        return -0.5 * log_fraction(self.gram_det)


class SlopeAnalyzer:
    """Slopes and Harder–Narasimhan flags"""

    def __init__(self):
        self.algebra = get_bundle_algebra()
        self.tolerance = settings.slope_tolerance

    # -- basic slopes ---------------------------------------------------

    def slope(self, b: AnyBundle) -> float:
        """μ(E) = deg(E)/rk(E)"""
        return self.algebra.slope(b)

    def _check_supported(self, b: AnyBundle) -> None:
        if isinstance(b, DiagonalPNF) and isinstance(b.curve, NevanlinnaCurve):
            raise UnsupportedError("slope theory is not available for Nevanlinna-family bundles")

    def line_degrees(self, b: DiagonalPNF) -> List[float]:
        """Degrees of the coordinate lines of a split bundle"""
        return [self.algebra.degree(DiagonalPNF(curve=b.curve, weights=[w], shape=b.shape)) for w in b.weights]

    def _coordinate_basis(self, n: int, indices: List[int]) -> SubspaceBasis:
        return SubspaceBasis(matrix=[[int(i == j) for j in sorted(indices)] for i in range(n)])

    def _degree_groups(self, degrees: List[float]) -> List[Tuple[float, List[int]]]:
        """Coordinates grouped by equal degree, largest degree first"""
        groups: List[Tuple[float, List[int]]] = []
        for i in sorted(range(len(degrees)), key=lambda i: (-degrees[i], i)):
            if groups and abs(groups[-1][0] - degrees[i]) <= self.tolerance:
                groups[-1][1].append(i)
            else:
                groups.append((degrees[i], [i]))
        return groups

    # -- enumeration ----------------------------------------------------

    def _enumerate(self, b: LatticeHermitianBundle, cfg: EnumConfig) -> Dict[Tuple[int, ...], _Candidate]:
        """
        Saturated sublattices spanned by vectors of sup-norm ≤ cfg.bound,
        keyed by dimension and primitive Plücker vector

        Gram determinants of the saturations come from Cauchy–Binet:
        det(BsᵀG′Bs) = pᵀ·Λᵏ(G′)·p with p the primitive Plücker vector.
        """
        n = b.rank
        if n > cfg.max_dim:
            raise UnsupportedError(f"rank {n} exceeds the enumeration limit max_dim = {cfg.max_dim}")
        G = gram_in_lattice_coordinates(b)
        vectors = _primitive_vectors(n, cfg.bound)
        found: Dict[Tuple[int, ...], _Candidate] = {}
        level: List[List[List[int]]] = [[]]

        # proper subspaces grow one generator at a time; E itself is added last
        for k in range(1, n):
            compound = _compound(G, k)
            next_level = []
            for rows in level:
                for v in vectors:
                    basis_rows = rows + [list(v)]
                    key = _span_key(basis_rows)
                    if key is None or (k,) + key in found:
                        continue
                    if len(found) >= cfg.max_candidates:
                        raise UnsupportedError(
                            f"more than {cfg.max_candidates} candidate subspaces at bound {cfg.bound}; "
                            f"lower the bound or raise max_candidates"
                        )
                    gram_det = sum(
                        (key[i] * compound[i][j] * key[j] for i in range(len(key)) for j in range(len(key))),
                        Fraction(0),
                    )
                    found[(k,) + key] = _Candidate(basis_rows, gram_det, k)
                    next_level.append(basis_rows)
            level = next_level

        whole = [[int(i == j) for j in range(n)] for i in range(n)]
        found[(n, 1)] = _Candidate(whole, determinant(G), n)
        debug(f"enumerated {len(found)} saturated subspaces of Z^{n} at bound {cfg.bound}")
        return found

    @staticmethod
    def _slope_key(c: _Candidate, L: int) -> Fraction:
        """Smaller key ⟺ larger slope: μ = −log(det)/(2k), compared exactly as det^(L/k)"""
        return c.gram_det ** (L // c.dim)

    def _hermitian_mu_max(self, b: LatticeHermitianBundle, cfg: EnumConfig) -> SlopeResult:
        found = self._enumerate(b, cfg)
        L = math.lcm(*range(1, b.rank + 1))
        best = min(self._slope_key(c, L) for c in found.values())
        winners = sorted(
            (key for key, c in found.items() if self._slope_key(c, L) == best),
            key=lambda key: (-found[key].dim, key),
        )
        maximizers = [SubspaceBasis(matrix=saturate(transpose(found[key].basis))) for key in winners]

        # greatest maximizer: the saturated sum of every maximizer
        all_rows = [row for key in winners for row in found[key].basis]
        span = saturate(transpose(canonical_basis(all_rows)))
        span_dim = len(span[0])
        G = gram_in_lattice_coordinates(b)
        span_det = determinant(matmul(matmul(transpose(span), G), span))
        if span_det ** (L // span_dim) == best:
            destabilizer, value = SubspaceBasis(matrix=span), -0.5 * log_fraction(span_det) / span_dim
        else:
            debug("sum of the enumerated maximizers is not a maximizer; keeping the largest one")
            top = found[winners[0]]
            destabilizer, value = maximizers[0], top.degree / top.dim
        return SlopeResult(
            value=value,
            basis=destabilizer,
            maximizers=maximizers,
            candidates=len(found),
            certification=Enumerated(enumerated=cfg.bound),
        )

    # -- μ_max / μ_min --------------------------------------------------

    def mu_max_enum(self, b: AnyBundle, cfg: Optional[EnumConfig] = None) -> SlopeResult:
        """
        μ_max(E) and the greatest maximizer

        Diagonal bundles: exact, over coordinate subspaces grouped by degree.
        Lattice-hermitian: lower-bound certificate from the enumeration.
        """
        cfg = cfg or EnumConfig()
        self._check_supported(b)
        if isinstance(b, DiagonalPNF):
            degree, indices = self._degree_groups(self.line_degrees(b))[0]
            basis = self._coordinate_basis(b.rank, indices)
            return SlopeResult(value=degree, basis=basis, maximizers=[basis], candidates=b.rank,
                               certification="exact-split")
        return self._hermitian_mu_max(b, cfg)

    def destabilizer(self, b: AnyBundle, cfg: Optional[EnumConfig] = None) -> SubspaceBasis:
        return self.mu_max_enum(b, cfg).basis

    def mu_min(self, b: AnyBundle, cfg: Optional[EnumConfig] = None) -> float:
        """μ_min(E) = −μ_max(E^∨) for hermitian bundles; least line degree on split bundles"""
        self._check_supported(b)
        if isinstance(b, DiagonalPNF):
            return min(self.line_degrees(b))
        return -self.mu_max_enum(self.algebra.dual_bundle(b), cfg).value

    # -- flags ----------------------------------------------------------

    def hn_flag(self, b: AnyBundle, cfg: Optional[EnumConfig] = None) -> Flag:
        """Harder–Narasimhan flag by iterated destabilizers of quotients"""
        cfg = cfg or EnumConfig()
        self._check_supported(b)
        if isinstance(b, DiagonalPNF):
            return self._split_flag(b)
        return self._hermitian_flag(b, cfg)

    def _split_flag(self, b: DiagonalPNF) -> Flag:
        steps, slopes, degrees = [], [], []
        taken: List[int] = []
        for degree, indices in self._degree_groups(self.line_degrees(b)):
            taken = taken + indices
            steps.append(self._coordinate_basis(b.rank, taken))
            slopes.append(degree)
            degrees.append(degree * len(indices))
        return Flag(steps=steps, slopes=slopes, degrees=degrees, semistable=[True] * len(steps),
                    certification="exact-split")

    def _hermitian_flag(self, b: LatticeHermitianBundle, cfg: EnumConfig) -> Flag:
        n = b.rank
        current: AnyBundle = b
        lift = [[int(i == j) for j in range(n)] for i in range(n)]
        step_columns: List[List[int]] = [[] for _ in range(n)]
        steps, slopes, degrees, verdicts = [], [], [], []

        while True:
            result = self.mu_max_enum(current, cfg)
            D = result.basis
            if slopes and result.value >= slopes[-1]:
                raise UnsupportedError(
                    f"enumeration at bound {cfg.bound} does not certify a flag "
                    f"(slope {result.value:.6g} after {slopes[-1]:.6g}); raise the bound"
                )
            lifted = [[int(x) for x in row] for row in matmul(lift, D.matrix)]
            step_columns = hstack(step_columns, lifted)
            steps.append(SubspaceBasis(matrix=saturate(step_columns)))
            slopes.append(result.value)
            degrees.append(result.value * D.dim)

            sub = self.algebra.restrict(current, D).bundle
            verdicts.append(sub.rank == 1 or self.mu_max_enum(sub, cfg).value <= result.value + self.tolerance)

            if D.dim == current.rank:
                break
            complement = self.algebra.complement_basis(D)
            current = self.algebra.quotient(current, D).bundle
            lift = [[int(x) for x in row] for row in matmul(lift, complement)]

        return Flag(steps=steps, slopes=slopes, degrees=degrees, semistable=verdicts,
                    certification=Enumerated(enumerated=cfg.bound))

    def subquotient_degrees(self, b: AnyBundle, flag: Flag) -> SubquotientReport:
        total = math.fsum(flag.degrees)
        degree = self.algebra.degree(b)
        return SubquotientReport(degrees=flag.degrees, total=total, degree=degree, residual=total - degree)

    def positive_degree(self, b: AnyBundle, cfg: Optional[EnumConfig] = None) -> float:
        """
        sup of deg(F) over subspaces F, the zero space included

        Split bundles: the sum of the positive line degrees.
        """
        cfg = cfg or EnumConfig()
        self._check_supported(b)
        if isinstance(b, DiagonalPNF):
            return math.fsum(d for d in self.line_degrees(b) if d > 0)
        found = self._enumerate(b, cfg)
        return max(0.0, max(c.degree for c in found.values()))


# Singleton instance
_slope_analyzer_instance: SlopeAnalyzer = None


def get_slope_analyzer() -> SlopeAnalyzer:
    """Get singleton slope analyzer instance"""
    global _slope_analyzer_instance
    if _slope_analyzer_instance is None:
        _slope_analyzer_instance = SlopeAnalyzer()
    return _slope_analyzer_instance
