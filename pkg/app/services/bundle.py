"""
Algebra of pseudo-norm families: dual, tensor, determinant, sub and quotient
bundles, Arakelov degrees, local distances and dominance witnesses
"""

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.linalg import eigh

from app.exceptions import ArgumentError, UnsupportedError
from app.models.bundle import (
    ArchimedeanShape,
    DiagonalPNF,
    DominanceWitness,
    ElementDegreeReport,
    LatticeHermitianBundle,
    NevanlinnaWeight,
    RestrictionResult,
    SubspaceBasis,
)
from app.models.curve import NevanlinnaCurve, QuadraticCurve, RationalCurve
from app.models.place import (
    NevanlinnaBoundary,
    NevanlinnaInterior,
    PlaceClass,
    QuadraticPlace,
    RationalFinite,
    RationalInfinite,
    WeightedPlace,
    parse_place_key,
)
from app.services.curve import get_curve_integrator, interior_weight, jensen_reference
from app.services.pav import get_pav_evaluator, zeros_and_poles
from app.utils.arith import QuadraticElement, log_fraction, prime_support, to_fraction
from app.utils.geometry import check_circle_clearance
from app.utils.lattice import (
    canonical_basis,
    denominator_primes,
    determinant,
    identity,
    inverse,
    kron,
    matmul,
    minors_gcd,
    padic_elementary_valuations,
    saturate,
    schur_complement,
    transpose,
    unimodular_completion,
)
from app.utils.polynomial import RationalFunction

AnyBundle = Union[DiagonalPNF, LatticeHermitianBundle]


def gram_in_lattice_coordinates(b: LatticeHermitianBundle) -> List[List[Fraction]]:
    """G′ = Mᵀ·G·M"""
    M = b.lattice_basis
    return matmul(matmul(transpose(M), b.gram), M)


def _is_coordinate_basis(B: SubspaceBasis) -> Optional[List[int]]:
    """Indices of the standard vectors spanning B when it is a coordinate subspace"""
    indices = []
    for col in B.vectors():
        nonzero = [i for i, x in enumerate(col) if x != 0]
        if len(nonzero) != 1:
            return None
        indices.append(nonzero[0])
    return sorted(indices) if len(set(indices)) == len(indices) else None


def _combine(logs: np.ndarray, shape: ArchimedeanShape, archimedean: bool) -> np.ndarray:
    """log‖x‖ from the per-coordinate logs log(|x_i|·‖e_i‖), along axis 0"""
    if archimedean and shape == ArchimedeanShape.L2:
        return 0.5 * np.logaddexp.reduce(2.0 * logs, axis=0)
    return np.max(logs, axis=0)


class BundleAlgebra:
    """Operations on DiagonalPNF and LatticeHermitianBundle"""

    def __init__(self):
        self.pav = get_pav_evaluator()
        self.curves = get_curve_integrator()

    # -- local data -----------------------------------------------------

    def place_measure(self, curve, place) -> float:
        """ν({ω}) for a discrete place of a rational, quadratic or Nevanlinna curve"""
        if isinstance(place, (RationalFinite, RationalInfinite)):
            return 1.0
        if isinstance(place, QuadraticPlace):
            splits = self.pav.split_rational_place(place.d, place.base)
            return float(next(s.weight for s in splits if s.place.index == place.index))
        if isinstance(place, NevanlinnaInterior):
            return interior_weight(place.R, place.point, place.z)
        raise ArgumentError(f"{place.key} is not a discrete place")

    def local_log_norms(self, b: DiagonalPNF, place) -> List[float]:
        """λ_i(ω) = log‖e_i‖_ω"""
        if isinstance(b.curve, NevanlinnaCurve):
            values = []
            for w in b.weights:
                value = self.pav.log_pav_eval(place, w.function)
                if isinstance(place, NevanlinnaBoundary):
                    value += w.log_scale
                values.append(value)
            return values
        return [w.get(place.key, 0.0) for w in b.weights]

    def weight_places(self, b: DiagonalPNF) -> List[WeightedPlace]:
        """Discrete places where some λ_i may be nonzero"""
        if isinstance(b.curve, NevanlinnaCurve):
            seen = {}
            for w in b.weights:
                for wp in self.curves.support_places(b.curve, w.function):
                    seen.setdefault(wp.key, wp)
            return list(seen.values())
        keys = sorted({key for w in b.weights for key in w})
        places = [parse_place_key(key) for key in keys]
        return [WeightedPlace(place=p, weight=self.place_measure(b.curve, p)) for p in places]

    # -- constructions --------------------------------------------------

    def dual_bundle(self, b: AnyBundle) -> AnyBundle:
        """Diagonal: λ ↦ −λ. Lattice-hermitian: M ↦ (Mᵀ)⁻¹, G ↦ G⁻¹."""
        if isinstance(b, LatticeHermitianBundle):
            return LatticeHermitianBundle(
                lattice_basis=inverse(transpose(b.lattice_basis)),
                gram=inverse(b.gram),
            )
        if isinstance(b.curve, NevanlinnaCurve):
            weights = [NevanlinnaWeight(function=1 / w.function, log_scale=-w.log_scale) for w in b.weights]
        else:
            weights = [{k: -v for k, v in w.items()} for w in b.weights]
        return DiagonalPNF(curve=b.curve, weights=weights, shape=b.shape)

    def _check_same_curve(self, b1: AnyBundle, b2: AnyBundle) -> None:
        if b1.curve != b2.curve:
            raise ArgumentError(f"bundles live on different curves ({b1.curve.label} vs {b2.curve.label})")

    def tensor_bundle(self, b1: AnyBundle, b2: AnyBundle) -> AnyBundle:
        """
        Tensor product on the product basis e_i ⊗ f_j (index i·rank(b2) + j)

        Diagonal inputs must share the archimedean shape (ℓ²⊗ℓ² = ℓ², max⊗max = max).
        """
        self._check_same_curve(b1, b2)
        if isinstance(b1, LatticeHermitianBundle) or isinstance(b2, LatticeHermitianBundle):
            h1, h2 = self.as_lattice_hermitian(b1), self.as_lattice_hermitian(b2)
            return LatticeHermitianBundle(
                lattice_basis=kron(h1.lattice_basis, h2.lattice_basis),
                gram=kron(h1.gram, h2.gram),
            )
        if b1.shape != b2.shape:
            raise UnsupportedError("tensor product of a max-shaped and an l2-shaped family is not diagonal")
        weights = []
        for w1 in b1.weights:
            for w2 in b2.weights:
                if isinstance(b1.curve, NevanlinnaCurve):
                    weights.append(NevanlinnaWeight(function=w1.function * w2.function,
                                                    log_scale=w1.log_scale + w2.log_scale))
                else:
                    keys = set(w1) | set(w2)
                    weights.append({k: w1.get(k, 0.0) + w2.get(k, 0.0) for k in sorted(keys)})
        return DiagonalPNF(curve=b1.curve, weights=weights, shape=b1.shape)

    def tensor_power(self, b: AnyBundle, m: int) -> AnyBundle:
        if m < 1:
            raise ArgumentError("tensor power must be at least 1")
        result = b
        for _ in range(m - 1):
            result = self.tensor_bundle(result, b)
        return result

    def det_bundle(self, b: AnyBundle) -> AnyBundle:
        """Rank-1 determinant bundle (Hadamard: attained on the orthogonal standard basis)"""
        if isinstance(b, LatticeHermitianBundle):
            return LatticeHermitianBundle(
                lattice_basis=[[determinant(b.lattice_basis)]],
                gram=[[determinant(b.gram)]],
            )
        if isinstance(b.curve, NevanlinnaCurve):
            g = RationalFunction(1)
            for w in b.weights:
                g = g * w.function
            weight = NevanlinnaWeight(function=g, log_scale=sum(w.log_scale for w in b.weights))
        else:
            keys = sorted({k for w in b.weights for k in w})
            weight = {k: sum(w.get(k, 0.0) for w in b.weights) for k in keys}
        return DiagonalPNF(curve=b.curve, weights=[weight], shape=b.shape)

    def restrict(self, b: AnyBundle, B: SubspaceBasis) -> RestrictionResult:
        """
        Sub-bundle on span(B)

        Non-saturated input is replaced by its saturation and flagged.
        Lattice-hermitian result is expressed in the saturated basis (M = I).
        """
        if B.ambient != b.rank:
            raise ArgumentError(f"subspace lives in rank {B.ambient}, bundle has rank {b.rank}")
        if isinstance(b, DiagonalPNF):
            indices = _is_coordinate_basis(B)
            if indices is None:
                return self.restrict(self.as_lattice_hermitian(b), B)
            basis = SubspaceBasis(matrix=[[int(i == j) for j in indices] for i in range(b.rank)])
            sub = DiagonalPNF(curve=b.curve, weights=[b.weights[i] for i in indices], shape=b.shape)
            return RestrictionResult(bundle=sub, basis=basis, auto_saturated=not B.saturated)

        Bs = saturate(B.matrix)
        G = gram_in_lattice_coordinates(b)
        sub_gram = matmul(matmul(transpose(Bs), G), Bs)
        k = len(Bs[0])
        return RestrictionResult(
            bundle=LatticeHermitianBundle(lattice_basis=identity(k), gram=sub_gram),
            basis=SubspaceBasis(matrix=Bs),
            auto_saturated=not B.saturated,
        )

    def quotient(self, b: AnyBundle, B: SubspaceBasis) -> RestrictionResult:
        """
        Quotient bundle E/span(B)

        Lattice-hermitian: complete the saturated basis to W ∈ GL_n(ℤ); the
        quotient lattice has basis the images of the remaining columns and
        its Gram matrix is the Schur complement of WᵀG′W.
        """
        if B.ambient != b.rank:
            raise ArgumentError(f"subspace lives in rank {B.ambient}, bundle has rank {b.rank}")
        if isinstance(b, DiagonalPNF):
            indices = _is_coordinate_basis(B)
            if indices is None:
                return self.quotient(self.as_lattice_hermitian(b), B)
            rest = [i for i in range(b.rank) if i not in indices]
            if not rest:
                raise ArgumentError("quotient by the whole space has rank 0")
            basis = SubspaceBasis(matrix=[[int(i == j) for j in indices] for i in range(b.rank)])
            quo = DiagonalPNF(curve=b.curve, weights=[b.weights[i] for i in rest], shape=b.shape)
            return RestrictionResult(bundle=quo, basis=basis, auto_saturated=not B.saturated)

        Bs = saturate(B.matrix)
        n, k = len(Bs), len(Bs[0])
        if k == n:
            raise ArgumentError("quotient by the whole space has rank 0")
        W = unimodular_completion(Bs)
        GW = matmul(matmul(transpose(W), gram_in_lattice_coordinates(b)), W)
        return RestrictionResult(
            bundle=LatticeHermitianBundle(lattice_basis=identity(n - k), gram=schur_complement(GW, k)),
            basis=SubspaceBasis(matrix=Bs),
            auto_saturated=not B.saturated,
        )

    def complement_basis(self, B: SubspaceBasis) -> List[List[int]]:
        """Columns of W ∈ GL_n(ℤ) after the saturated basis of B: lifts of the quotient basis"""
        Bs = saturate(B.matrix)
        W = unimodular_completion(Bs)
        k = len(Bs[0])
        return [row[k:] for row in W]

    # -- conversions ----------------------------------------------------

    def as_lattice_hermitian(self, b: AnyBundle) -> LatticeHermitianBundle:
        """
        Embed a diagonal family on ℚ as a lattice-hermitian bundle: lattice
        diag(Π p^{λ_i(p)/log p}), Gram diag(e^{2λ_i(∞)})
        """
        if isinstance(b, LatticeHermitianBundle):
            return b
        if not isinstance(b.curve, RationalCurve):
            raise UnsupportedError("only diagonal families on the rational curve embed as lattice-hermitian bundles")
        if b.shape != ArchimedeanShape.L2 and b.rank > 1:
            raise UnsupportedError("a max-shaped archimedean norm is not hermitian")
        n = b.rank
        M = [[Fraction(0)] * n for _ in range(n)]
        G = [[Fraction(0)] * n for _ in range(n)]
        for i, w in enumerate(b.weights):
            scale = Fraction(1)
            for key, value in w.items():
                place = parse_place_key(key)
                if isinstance(place, RationalInfinite):
                    continue
                exponent = value / math.log(place.p)
                if abs(exponent - round(exponent)) > 1e-9:
                    raise UnsupportedError(f"weight at {key} is not an integral power of {place.p}")
                k = int(round(exponent))
                scale *= Fraction(place.p) ** k
            M[i][i] = scale
            G[i][i] = Fraction.from_float(math.exp(2.0 * w.get("inf", 0.0)))
        return LatticeHermitianBundle(lattice_basis=M, gram=G)

    def induced_nevanlinna_bundle(self, curve: NevanlinnaCurve, norms: Sequence[float],
                                  shape: ArchimedeanShape = ArchimedeanShape.L2) -> DiagonalPNF:
        """Bundle on S_R induced by a normed space with ‖e_i‖ = norms[i] (g_i = 1)"""
        if any(x <= 0 for x in norms):
            raise ArgumentError("norms must be positive")
        weights = [NevanlinnaWeight(function="1", log_scale=math.log(x)) for x in norms]
        return DiagonalPNF(curve=curve, weights=weights, shape=shape)

    def rescale(self, b: AnyBundle, place_key: str, c: float) -> AnyBundle:
        """Multiply every norm at one place by e^c ("boundary" on S_R means every boundary place)"""
        if isinstance(b, LatticeHermitianBundle):
            if place_key != "inf":
                raise UnsupportedError("lattice-hermitian bundles are rescaled at the archimedean place only")
            factor = Fraction.from_float(math.exp(2.0 * c))
            return LatticeHermitianBundle(
                lattice_basis=b.lattice_basis,
                gram=[[factor * x for x in row] for row in b.gram],
            )
        if isinstance(b.curve, NevanlinnaCurve):
            if place_key != "boundary":
                raise UnsupportedError("Nevanlinna families are rescaled on the boundary only")
            weights = [NevanlinnaWeight(function=w.function, log_scale=w.log_scale + c) for w in b.weights]
        else:
            parse_place_key(place_key)
            weights = [{**w, place_key: w.get(place_key, 0.0) + c} for w in b.weights]
        return DiagonalPNF(curve=b.curve, weights=weights, shape=b.shape)

    # -- degrees --------------------------------------------------------

    def degree(self, b: AnyBundle) -> float:
        """
        Arakelov degree −∫ log‖η‖_det dν

        Diagonal: −Σ_i ∫ λ_i dν. Lattice-hermitian: −(1/2)·log det(MᵀGM).
        """
        if isinstance(b, LatticeHermitianBundle):
            return -0.5 * log_fraction(determinant(gram_in_lattice_coordinates(b)))
        if isinstance(b.curve, NevanlinnaCurve):
            total = 0.0
            for w in b.weights:
                total += self.curves.defect(b.curve, w.function).total + w.log_scale
            return -total
        total = 0.0
        for wp in self.weight_places(b):
            total += wp.weight * sum(self.local_log_norms(b, wp.place))
        return -total

    def slope(self, b: AnyBundle) -> float:
        if b.rank < 1:
            raise ArgumentError("slope of a rank-0 bundle is undefined")
        return self.degree(b) / b.rank

    def degree_element(self, b: AnyBundle, s: Sequence) -> float:
        """−∫ log‖s‖_ω dν for a nonzero vector s"""
        if len(s) != b.rank:
            raise ArgumentError(f"vector has {len(s)} coordinates, bundle has rank {b.rank}")

        if isinstance(b, LatticeHermitianBundle):
            x = [to_fraction(v) for v in s]
            if all(v == 0 for v in x):
                raise ArgumentError("degree of the zero vector is undefined")
            coords = [sum((row[j] * x[j] for j in range(len(x))), Fraction(0)) for row in inverse(b.lattice_basis)]
            num_gcd, den_lcm = 0, 1
            for c in coords:
                if c != 0:
                    num_gcd = math.gcd(num_gcd, abs(c.numerator))
                    den_lcm = math.lcm(den_lcm, c.denominator)
            content = Fraction(num_gcd, den_lcm)
            quadratic = sum((x[i] * b.gram[i][j] * x[j] for i in range(len(x)) for j in range(len(x))), Fraction(0))
            return log_fraction(content) - 0.5 * log_fraction(quadratic)

        if isinstance(b.curve, NevanlinnaCurve):
            return self._degree_element_nevanlinna(b, [RationalFunction.coerce(v) for v in s])

        if isinstance(b.curve, QuadraticCurve):
            xs = [QuadraticElement.coerce(v, b.curve.d) for v in s]
            if all(v.is_zero() for v in xs):
                raise ArgumentError("degree of the zero vector is undefined")
            supports = {}
            for v in xs:
                if not v.is_zero():
                    for wp in self.curves.support_places(b.curve, v):
                        supports.setdefault(wp.key, wp)
        else:
            xs = [to_fraction(v) for v in s]
            if all(v == 0 for v in xs):
                raise ArgumentError("degree of the zero vector is undefined")
            supports = {}
            for p in prime_support(xs):
                supports.setdefault(f"p={p}", WeightedPlace(place=RationalFinite(p=p), weight=1.0))

        for wp in self.weight_places(b) + self.curves.archimedean_places(b.curve):
            supports.setdefault(wp.key, wp)

        def local_log(place) -> float:
            lam = self.local_log_norms(b, place)
            logs = np.array([self.pav.log_pav_eval(place, v) + l for v, l in zip(xs, lam)])
            archimedean = self.pav.classify(place) == PlaceClass.ARCHIMEDEAN
            return float(_combine(logs, b.shape, archimedean))

        discrete, _, _ = self.curves.integrate(b.curve, list(supports.values()), local_log)
        return -discrete

    def _degree_element_nevanlinna(self, b: DiagonalPNF, s: List[RationalFunction]) -> float:
        if all(v.is_zero() for v in s):
            raise ArgumentError("degree of the zero vector is undefined")
        curve = b.curve
        products = [(v * w.function, w.log_scale) for v, w in zip(s, b.weights) if not v.is_zero()]
        # log‖s‖ blows up at poles of any coordinate and at common zeros only
        singular = []
        common = products[0][0].num
        places = {}
        for g, _ in products:
            singular.extend(zeros_and_poles(g)[1])
            common = common.gcd(g.num)
            for wp in self.curves.support_places(curve, g):
                places.setdefault(wp.key, wp)
        singular.extend(zeros_and_poles(RationalFunction(common))[0])
        check_circle_clearance(singular, float(curve.R), curve.clearance)

        def local_log(place) -> float:
            return max(self.pav.log_pav_eval(place, g) for g, _ in products)

        def boundary_log(zs: np.ndarray) -> np.ndarray:
            logs = np.array([g.log_abs(zs) + scale for g, scale in products])
            return _combine(logs, b.shape, True)

        discrete, boundary, _ = self.curves.integrate(curve, list(places.values()), local_log, boundary_log)
        return -(discrete + boundary)

    def element_degree_report(self, b: DiagonalPNF, f) -> ElementDegreeReport:
        """
        Degree of f·e in a rank-1 induced bundle on S_R, compared with
        −log|c(f,0)| − log‖e‖ and with T(R,f) − log‖e‖
        """
        from app.services.nevanlinna import get_nevanlinna_calculator

        if b.rank != 1 or not isinstance(b.curve, NevanlinnaCurve):
            raise ArgumentError("element degree report needs a rank-1 bundle on a Nevanlinna curve")
        f = RationalFunction.coerce(f)
        weight = b.weights[0]
        if not weight.function.is_constant():
            raise ArgumentError("element degree report needs an induced bundle (g = constant)")
        log_e = weight.log_scale + jensen_reference(weight.function)
        value = self.degree_element(b, [f])
        expected = -jensen_reference(f) - log_e
        stated = get_nevanlinna_calculator().characteristic_T(f, None, b.curve.R, template=b.curve) - log_e
        return ElementDegreeReport(
            value=value,
            expected=expected,
            stated=stated,
            residual_expected=value - expected,
            residual_stated=value - stated,
        )

    def subspace_degree(self, b: AnyBundle, B: SubspaceBasis) -> float:
        """log gcd(k×k minors of B) − (1/2)·log det(Bᵀ·G′·B)"""
        if B.ambient != b.rank:
            raise ArgumentError(f"subspace lives in rank {B.ambient}, bundle has rank {b.rank}")
        h = self.as_lattice_hermitian(b)
        G = gram_in_lattice_coordinates(h)
        gram = matmul(matmul(transpose(B.matrix), G), B.matrix)
        return math.log(minors_gcd(B.matrix)) - 0.5 * log_fraction(determinant(gram))

    # -- distances ------------------------------------------------------

    def local_distance(self, b1: AnyBundle, b2: AnyBundle, place) -> float:
        """
        d_ω(ξ1, ξ2)

        Diagonal pairs: max_i |λ1_i(ω) − λ2_i(ω)|. Hermitian pairs: (1/2)·max
        |log eig(G1⁻¹G2)| at ∞ and log p · max |v_p(elementary divisors of
        M1⁻¹M2)| at p.
        """
        self._check_same_curve(b1, b2)
        if b1.rank != b2.rank:
            raise ArgumentError("local distance needs bundles of equal rank")
        archimedean = self.pav.classify(place) == PlaceClass.ARCHIMEDEAN

        if isinstance(b1, DiagonalPNF) and isinstance(b2, DiagonalPNF):
            if archimedean and b1.shape != b2.shape:
                raise UnsupportedError("local distance between max and l2 archimedean shapes is not supported")
            l1, l2 = self.local_log_norms(b1, place), self.local_log_norms(b2, place)
            return max(abs(a - b) for a, b in zip(l1, l2))

        h1, h2 = self._hermitian_pair(b1, b2)
        if isinstance(place, RationalInfinite):
            eigenvalues = eigh(
                np.array(h2.gram, dtype=float), np.array(h1.gram, dtype=float), eigvals_only=True
            )
            return 0.5 * float(np.max(np.abs(np.log(eigenvalues))))
        if isinstance(place, RationalFinite):
            A = matmul(inverse(h1.lattice_basis), h2.lattice_basis)
            valuations = padic_elementary_valuations(A, place.p)
            return math.log(place.p) * max(abs(v) for v in valuations)
        raise ArgumentError(f"{place.key} is not a place of the rational curve")

    def _hermitian_pair(self, b1: AnyBundle, b2: AnyBundle):
        try:
            return self.as_lattice_hermitian(b1), self.as_lattice_hermitian(b2)
        except UnsupportedError as e:
            raise UnsupportedError(f"incomparable bundle shapes: {e}") from e

    def distance_integral(self, b1: AnyBundle, b2: AnyBundle) -> float:
        """∫ d_ω(ξ1, ξ2) dν(ω)"""
        self._check_same_curve(b1, b2)
        if b1.rank != b2.rank:
            raise ArgumentError("distance needs bundles of equal rank")

        if isinstance(b1, DiagonalPNF) and isinstance(b2, DiagonalPNF):
            curve = b1.curve
            if isinstance(curve, NevanlinnaCurve):
                return self._distance_nevanlinna(b1, b2)
            if b1.shape != b2.shape:
                raise UnsupportedError("local distance between max and l2 archimedean shapes is not supported")
            places = {wp.key: wp for wp in self.weight_places(b1) + self.weight_places(b2)}
            total = 0.0
            for wp in places.values():
                total += wp.weight * self.local_distance(b1, b2, wp.place)
            return total

        h1, h2 = self._hermitian_pair(b1, b2)
        A = matmul(inverse(h1.lattice_basis), h2.lattice_basis)
        primes = sorted(set(denominator_primes(A)) | set(denominator_primes(inverse(A))))
        total = self.local_distance(h1, h2, RationalInfinite())
        for p in primes:
            total += self.local_distance(h1, h2, RationalFinite(p=p))
        return total

    def _distance_nevanlinna(self, b1: DiagonalPNF, b2: DiagonalPNF) -> float:
        if b1.shape != b2.shape:
            raise UnsupportedError("local distance between max and l2 archimedean shapes is not supported")
        curve = b1.curve
        ratios = [(w1.function / w2.function, w1.log_scale - w2.log_scale) for w1, w2 in zip(b1.weights, b2.weights)]
        places = {}
        singular = []
        for g, _ in ratios:
            zeros, poles = zeros_and_poles(g)
            singular.extend(zeros + poles)
            for wp in self.curves.support_places(curve, g):
                places.setdefault(wp.key, wp)
        check_circle_clearance(singular, float(curve.R), curve.clearance)

        def local(place) -> float:
            return max(abs(self.pav.log_pav_eval(place, g)) for g, _ in ratios)

        def boundary(zs: np.ndarray) -> np.ndarray:
            return np.max(np.abs(np.array([g.log_abs(zs) + c for g, c in ratios])), axis=0)

        discrete, bnd, _ = self.curves.integrate(curve, list(places.values()), local, boundary)
        return discrete + bnd

    # -- dominance ------------------------------------------------------

    def standard_model(self, b: AnyBundle) -> AnyBundle:
        """The model family of the standard lattice (all weights zero, G = I)"""
        if isinstance(b, LatticeHermitianBundle):
            return LatticeHermitianBundle.standard(b.rank)
        if isinstance(b.curve, NevanlinnaCurve):
            weights = [NevanlinnaWeight() for _ in range(b.rank)]
        else:
            weights = [{} for _ in range(b.rank)]
        return DiagonalPNF(curve=b.curve, weights=weights, shape=b.shape)

    def dominance_witness(self, b: AnyBundle) -> DominanceWitness:
        """
        Record the model family dominating b: d_ω(ξ, model) vanishes outside
        finitely many places and is ν-integrable
        """
        model = self.standard_model(b)
        if isinstance(b, LatticeHermitianBundle):
            primes = sorted(set(denominator_primes(b.lattice_basis)) |
                            set(denominator_primes(inverse(b.lattice_basis))))
            places = [f"p={p}" for p in primes]
            if any(b.gram[i][j] != int(i == j) for i in range(b.rank) for j in range(b.rank)):
                places.append("inf")
            label = f"standard lattice Z^{b.rank} with G = I"
        elif isinstance(b.curve, NevanlinnaCurve):
            places = [wp.key for wp in self.weight_places(b)]
            if any(w.log_scale != 0 or not w.function.is_constant() for w in b.weights):
                places.append(f"nev-bnd(R={b.curve.R})")
            label = "constant family with g_i = 1 on S_R"
        else:
            places = [wp.key for wp in self.weight_places(b)
                      if any(v != 0 for v in self.local_log_norms(b, wp.place))]
            label = f"standard model family of rank {b.rank}"
        return DominanceWitness(model=label, places=places, distance_integral=self.distance_integral(b, model))


# Singleton instance
_bundle_algebra_instance: BundleAlgebra = None


def get_bundle_algebra() -> BundleAlgebra:
    """Get singleton bundle algebra instance"""
    global _bundle_algebra_instance
    if _bundle_algebra_instance is None:
        _bundle_algebra_instance = BundleAlgebra()
    return _bundle_algebra_instance
