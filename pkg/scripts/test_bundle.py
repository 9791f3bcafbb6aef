"""
Test script for adelic vector bundles: dual, tensor, determinant, sub and
quotient bundles, degrees, distances and dominance
"""

import math
import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from app.exceptions import AdelicError, ArgumentError, InfeasibleInputError, UnsupportedError
from app.models.bundle import ArchimedeanShape, DiagonalPNF, LatticeHermitianBundle, NevanlinnaWeight, SubspaceBasis
from app.models.curve import NevanlinnaCurve, RationalCurve
from app.models.place import RationalFinite, RationalInfinite
from app.services.bundle import get_bundle_algebra
from app.utils.lattice import canonical_basis, determinant, hstack, integer_kernel, matmul, rank, transpose

LOG2 = math.log(2)
LOG10 = math.log(10)


def _hermitian(gram, basis=None) -> LatticeHermitianBundle:
    n = len(gram)
    basis = basis or [[int(i == j) for j in range(n)] for i in range(n)]
    return LatticeHermitianBundle(lattice_basis=basis, gram=gram)


def _random_hermitian(rng: random.Random, n: int) -> LatticeHermitianBundle:
    while True:
        M = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        if determinant(M) != 0:
            break
    A = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
    G = matmul(transpose(A), A)
    G = [[G[i][j] + (1 if i == j else 0) for j in range(n)] for i in range(n)]
    return _hermitian(G, M)


def _random_diagonal(rng: random.Random, n: int) -> DiagonalPNF:
    weights = []
    for _ in range(n):
        w = {"inf": rng.uniform(-3, 3)}
        for p in rng.sample([2, 3, 5, 7], 2):
            w[f"p={p}"] = rng.randint(-2, 2) * math.log(p)
        weights.append(w)
    return DiagonalPNF(curve=RationalCurve(), weights=weights, shape=ArchimedeanShape.L2)


def test_dual():
    print("\n" + "="*70)
    print("TEST: Dual bundles")
    print("="*70)

    algebra = get_bundle_algebra()
    line = DiagonalPNF(weights=[{"inf": LOG2}])
    assert algebra.dual_bundle(line).weights[0]["inf"] == pytest.approx(-LOG2)

    standard = LatticeHermitianBundle.standard(2)
    assert algebra.dual_bundle(standard) == standard

    dual = algebra.dual_bundle(_hermitian([[4, 0], [0, 1]]))
    assert dual.gram == [[Fraction(1, 4), 0], [0, 1]]
    print("✓ λ ↦ -λ, standard is self-dual, diag(4,1) ↦ diag(1/4,1)")


def test_constructions():
    algebra = get_bundle_algebra()
    a, b = 0.7, -1.3
    det = algebra.det_bundle(DiagonalPNF(weights=[{"inf": a}, {"inf": b}]))
    assert det.rank == 1
    assert det.weights[0]["inf"] == pytest.approx(a + b)

    tensor = algebra.tensor_bundle(DiagonalPNF(weights=[{"inf": a}]), DiagonalPNF(weights=[{"inf": b}]))
    assert tensor.weights[0]["inf"] == pytest.approx(a + b)

    restricted = algebra.restrict(LatticeHermitianBundle.standard(2), SubspaceBasis.from_vectors([[0, 1]]))
    assert restricted.bundle == LatticeHermitianBundle.standard(1)
    assert not restricted.auto_saturated

    with pytest.raises(UnsupportedError):
        algebra.tensor_bundle(DiagonalPNF(weights=[{}], shape=ArchimedeanShape.MAX), DiagonalPNF(weights=[{}]))


def test_degree_examples():
    """deg of the standard bundle, a scaled line and diag(1, 1/100)"""
    print("\n" + "="*70)
    print("TEST: Arakelov degrees")
    print("="*70)

    algebra = get_bundle_algebra()
    assert algebra.degree(LatticeHermitianBundle.standard(2)) == pytest.approx(0.0)
    assert algebra.degree(DiagonalPNF(weights=[{"inf": -LOG2}])) == pytest.approx(LOG2)
    skewed = _hermitian([[1, 0], [0, Fraction(1, 100)]])
    assert algebra.degree(skewed) == pytest.approx(LOG10)
    assert algebra.slope(skewed) == pytest.approx(LOG10 / 2)
    print("✓ deg = 0, log 2, log 10")


def test_degree_element():
    algebra = get_bundle_algebra()
    assert algebra.degree_element(LatticeHermitianBundle.standard(2), [3, 4]) == pytest.approx(-math.log(5))
    assert algebra.degree_element(DiagonalPNF(weights=[{}, {}]), [3, 4]) == pytest.approx(-math.log(5))
    assert algebra.degree_element(DiagonalPNF(weights=[{"inf": -LOG2}]), [1]) == pytest.approx(LOG2)
    with pytest.raises(ArgumentError):
        algebra.degree_element(LatticeHermitianBundle.standard(2), [0, 0])


def test_element_degree_nevanlinna():
    """deg(f·e) = -log|c(f,0)| - log‖e‖ on every S_R; the T(R,f) form is only reported"""
    algebra = get_bundle_algebra()
    f = "(z-1)/(z-3)"
    expected = -math.log(1 / 3) - LOG2
    for R in (2, 4, 8):
        b = algebra.induced_nevanlinna_bundle(NevanlinnaCurve(R=R), [2.0])
        report = algebra.element_degree_report(b, f)
        assert report.value == pytest.approx(expected, abs=1e-6)
        assert abs(report.residual_expected) < 1e-6
        assert report.residual_stated is not None


def test_subspace_degree():
    algebra = get_bundle_algebra()
    standard = LatticeHermitianBundle.standard(2)
    assert algebra.subspace_degree(standard, SubspaceBasis.from_vectors([[3, 4]])) == pytest.approx(-math.log(5))
    skewed = _hermitian([[1, 0], [0, Fraction(1, 100)]])
    assert algebra.subspace_degree(skewed, SubspaceBasis.from_vectors([[0, 1]])) == pytest.approx(LOG10)
    non_saturated = SubspaceBasis.from_vectors([[2, 0]])
    assert not non_saturated.saturated
    assert algebra.subspace_degree(standard, non_saturated) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        SubspaceBasis.from_vectors([[1, 2], [2, 4]])


def _random_subspace(rng: random.Random, n: int, k: int) -> SubspaceBasis:
    while True:
        vectors = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(k)]
        if rank(vectors) == k:
            return SubspaceBasis.from_vectors(vectors)


def test_submodularity():
    """deg(F₁ ∩ F₂) + deg(F₁ + F₂) ≥ deg(F₁) + deg(F₂) on rank-4 lattices"""
    algebra = get_bundle_algebra()
    rng = random.Random(23)
    for _ in range(20):
        E = _random_hermitian(rng, 4)
        F1 = _random_subspace(rng, 4, 3)
        F2 = _random_subspace(rng, 4, 3)

        # (a, b) with F1·a = F2·b spans the intersection
        kernel = integer_kernel(hstack(F1.matrix, [[-x for x in row] for row in F2.matrix]))
        meet = [[sum(F1.matrix[i][j] * v[j] for j in range(3)) for i in range(4)] for v in kernel]
        join = canonical_basis(F1.vectors() + F2.vectors())

        lhs = algebra.subspace_degree(E, SubspaceBasis.from_vectors(canonical_basis(meet))) + \
            algebra.subspace_degree(E, SubspaceBasis.from_vectors(join))
        rhs = algebra.subspace_degree(E, F1) + algebra.subspace_degree(E, F2)
        assert lhs >= rhs - 1e-9, f"{F1.matrix} / {F2.matrix}: {lhs} < {rhs}"


def test_quotient_additivity():
    """deg(F) + deg(E/F) = deg(E)"""
    algebra = get_bundle_algebra()
    E = _hermitian([[2, 1], [1, 2]])
    F = SubspaceBasis.from_vectors([[1, 1]])
    sub = algebra.restrict(E, F).bundle
    quo = algebra.quotient(E, F).bundle
    assert algebra.degree(sub) + algebra.degree(quo) == pytest.approx(algebra.degree(E))

    rng = random.Random(17)
    for _ in range(20):
        E = _random_hermitian(rng, 3)
        F = SubspaceBasis.from_vectors([[1, rng.randint(-2, 2), rng.randint(-2, 2)]])
        total = algebra.degree(algebra.restrict(E, F).bundle) + algebra.degree(algebra.quotient(E, F).bundle)
        assert total == pytest.approx(algebra.degree(E), abs=1e-10)


def test_degree_identities():
    """Duality and the tensor formula on 100 random bundles of rank ≤ 4"""
    print("\n" + "="*70)
    print("TEST: Degree identities")
    print("="*70)

    algebra = get_bundle_algebra()
    rng = random.Random(23)
    for _ in range(50):
        E = _random_diagonal(rng, rng.randint(1, 4))
        F = _random_diagonal(rng, rng.randint(1, 4))
        assert algebra.degree(algebra.dual_bundle(E)) == pytest.approx(-algebra.degree(E), abs=1e-10)
        expected = F.rank * algebra.degree(E) + E.rank * algebra.degree(F)
        assert algebra.degree(algebra.tensor_bundle(E, F)) == pytest.approx(expected, abs=1e-10)
        assert algebra.degree(algebra.det_bundle(E)) == pytest.approx(algebra.degree(E), abs=1e-10)

    for _ in range(50):
        E = _random_hermitian(rng, rng.randint(1, 4))
        F = _random_hermitian(rng, rng.randint(1, 3))
        assert algebra.degree(algebra.dual_bundle(E)) == pytest.approx(-algebra.degree(E), abs=1e-10)
        expected = F.rank * algebra.degree(E) + E.rank * algebra.degree(F)
        assert algebra.degree(algebra.tensor_bundle(E, F)) == pytest.approx(expected, abs=1e-10)
    print("✓ deg(E^v) = -deg(E), deg(E⊗F) = rk F deg E + rk E deg F")


def test_lattice_embedding():
    """Integral p-adic weights embed as a lattice with the same degree"""
    algebra = get_bundle_algebra()
    b = DiagonalPNF(weights=[{"p=3": math.log(3), "inf": 0.5}, {"p=2": -2 * LOG2}])
    h = algebra.as_lattice_hermitian(b)
    assert algebra.degree(h) == pytest.approx(algebra.degree(b), abs=1e-12)
    with pytest.raises(UnsupportedError):
        algebra.as_lattice_hermitian(DiagonalPNF(weights=[{"p=3": 0.5}]))


def test_distances():
    print("\n" + "="*70)
    print("TEST: Local distances")
    print("="*70)

    algebra = get_bundle_algebra()
    b = DiagonalPNF(weights=[{"p=5": 0.2}, {"inf": 1.0}])
    assert algebra.distance_integral(b, b) == pytest.approx(0.0)

    shifted = algebra.rescale(b, "p=5", 0.75)
    assert algebra.local_distance(b, shifted, RationalFinite(p=5)) == pytest.approx(0.75)
    assert algebra.distance_integral(b, shifted) == pytest.approx(0.75)

    G1 = LatticeHermitianBundle.standard(2)
    G2 = _hermitian([[4, 0], [0, 1]])
    assert algebra.local_distance(G1, G2, RationalInfinite()) == pytest.approx(LOG2)
    assert algebra.distance_integral(G1, G2) == pytest.approx(LOG2)

    M2 = _hermitian([[1, 0], [0, 1]], [[3, 0], [0, 1]])
    assert algebra.distance_integral(G1, M2) == pytest.approx(math.log(3))

    with pytest.raises(UnsupportedError):
        algebra.distance_integral(DiagonalPNF(weights=[{}, {}], shape=ArchimedeanShape.MAX),
                                  DiagonalPNF(weights=[{}, {}]))
    print("✓ identical → 0, shift c → |c|, I vs diag(4,1) → log 2")


def test_nevanlinna_distance_and_rescale():
    algebra = get_bundle_algebra()
    curve = NevanlinnaCurve(R=2, nodes=1024)
    b = DiagonalPNF(curve=curve, weights=[NevanlinnaWeight(function="z-1/2"), NevanlinnaWeight()])
    shifted = algebra.rescale(b, "boundary", -0.4)
    assert algebra.distance_integral(b, shifted) == pytest.approx(0.4, abs=1e-10)
    assert algebra.degree(shifted) == pytest.approx(algebra.degree(b) + 0.8, abs=1e-10)
    assert algebra.degree(b) == pytest.approx(math.log(2), abs=1e-8)


def test_rescaling_hermitian():
    algebra = get_bundle_algebra()
    E = _hermitian([[2, 1], [1, 3]])
    c = 0.3
    assert algebra.degree(algebra.rescale(E, "inf", c)) == pytest.approx(algebra.degree(E) - 2 * c, abs=1e-12)
    with pytest.raises(UnsupportedError):
        algebra.rescale(E, "p=2", c)


def test_dominance():
    algebra = get_bundle_algebra()
    standard = algebra.dominance_witness(LatticeHermitianBundle.standard(3))
    assert standard.places == [] and standard.distance_integral == pytest.approx(0.0)

    b = DiagonalPNF(weights=[{"p=5": math.log(5)}, {}])
    witness = algebra.dominance_witness(b)
    assert witness.places == ["p=5"]
    assert witness.distance_integral == pytest.approx(math.log(5))


def test_infeasible_inputs():
    with pytest.raises(InfeasibleInputError):
        _hermitian([[1, 2], [2, 1]])
    with pytest.raises(InfeasibleInputError):
        _hermitian([[1, 0], [0, 1]], [[1, 2], [2, 4]])
    with pytest.raises(ValueError):
        DiagonalPNF(weights=[{"quad(d=-1,p=5,#0)": 1.0}])


def main():
    """Run every test in this file and print a summary"""
    tests = [
        test_dual,
        test_constructions,
        test_degree_examples,
        test_degree_element,
        test_element_degree_nevanlinna,
        test_subspace_degree,
        test_submodularity,
        test_quotient_additivity,
        test_degree_identities,
        test_lattice_embedding,
        test_distances,
        test_nevanlinna_distance_and_rescale,
        test_rescaling_hermitian,
        test_dominance,
        test_infeasible_inputs,
    ]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"✓ {test.__name__}")
        except (AssertionError, AdelicError) as e:
            failed += 1
            print(f"✗ {test.__name__}: {e}")

    print("\n" + "="*70)
    print(f"TEST SUMMARY: {len(tests) - failed}/{len(tests)} passed")
    print("="*70 + "\n")
    return failed == 0


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
