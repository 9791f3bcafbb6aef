"""
Exact linear algebra over ℚ and ℤ for lattice-hermitian bundles

Matrices are lists of rows. Rational matrices hold ``Fraction`` entries,
integer matrices hold ``int`` entries. Vectors of a subspace are stored as the
columns of an n×k matrix unless a function says otherwise.
"""

import math
from fractions import Fraction
from itertools import combinations
from typing import List, Sequence, Tuple

from app.exceptions import ArgumentError, InfeasibleInputError
from app.utils.arith import padic_valuation, prime_support, to_fraction

Matrix = List[List[Fraction]]
IntMatrix = List[List[int]]


# ---------------------------------------------------------------------------
# basic helpers
# ---------------------------------------------------------------------------

def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    matrix = [[to_fraction(x) for x in row] for row in rows]
    if matrix and any(len(row) != len(matrix[0]) for row in matrix):
        raise ArgumentError("Ragged matrix")
    return matrix


def shape(A: Sequence[Sequence]) -> Tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(A: Sequence[Sequence]) -> list:
    return [list(col) for col in zip(*A)] if A else []


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    if shape(A)[1] != len(B):
        raise ArgumentError(f"Dimension mismatch: {shape(A)} times {shape(B)}")
    Bt = transpose(B)
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def mat_vec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A]


def kron(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    """Kronecker product; basis order e_i ⊗ f_j ↦ index i·dim(F) + j"""
    (ra, ca), (rb, cb) = shape(A), shape(B)
    return [[A[i // rb][j // cb] * B[i % rb][j % cb] for j in range(ca * cb)] for i in range(ra * rb)]


def is_symmetric(A: Matrix) -> bool:
    n = len(A)
    return all(A[i][j] == A[j][i] for i in range(n) for j in range(i + 1, n))


def columns(A: Sequence[Sequence], indices: Sequence[int]) -> list:
    return [[row[j] for j in indices] for row in A]


def hstack(A: Sequence[Sequence], B: Sequence[Sequence]) -> list:
    return [list(a) + list(b) for a, b in zip(A, B)]


# ---------------------------------------------------------------------------
# Gaussian elimination over ℚ
# ---------------------------------------------------------------------------

def determinant(A: Sequence[Sequence]) -> Fraction:
    n, m = shape(A)
    if n != m:
        raise ArgumentError("Determinant of a non-square matrix")
    M = [[to_fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if M[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            M[c], M[pivot] = M[pivot], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            if M[r][c]:
                factor = M[r][c] / M[c][c]
                M[r] = [x - factor * y for x, y in zip(M[r], M[c])]
    return det


def inverse(A: Sequence[Sequence]) -> Matrix:
    """Gauss–Jordan inverse; singular input raises InfeasibleInputError"""
    n, m = shape(A)
    if n != m:
        raise ArgumentError("Inverse of a non-square matrix")
    M = [[to_fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if M[r][c] != 0), None)
        if pivot is None:
            raise InfeasibleInputError("Matrix is singular")
        M[c], M[pivot] = M[pivot], M[c]
        lead = M[c][c]
        M[c] = [x / lead for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                factor = M[r][c]
                M[r] = [x - factor * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def rank(A: Sequence[Sequence]) -> int:
    M = [[to_fraction(x) for x in row] for row in A]
    rows, cols = shape(M)
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if M[i][c] != 0), None)
        if pivot is None:
            continue
        M[r], M[pivot] = M[pivot], M[r]
        for i in range(r + 1, rows):
            if M[i][c]:
                factor = M[i][c] / M[r][c]
                M[i] = [x - factor * y for x, y in zip(M[i], M[r])]
        r += 1
        if r == rows:
            break
    return r


def is_positive_definite(G: Matrix) -> bool:
    """Sylvester's criterion on exact leading principal minors"""
    if not is_symmetric(G):
        return False
    n = len(G)
    return all(determinant([row[:k] for row in G[:k]]) > 0 for k in range(1, n + 1))


def schur_complement(G: Matrix, k: int) -> Matrix:
    """G22 − G21·G11⁻¹·G12 for the split after the first k coordinates"""
    n = len(G)
    G11 = [row[:k] for row in G[:k]]
    G12 = [row[k:] for row in G[:k]]
    G21 = [row[:k] for row in G[k:]]
    G22 = [row[k:] for row in G[k:]]
    if k == 0:
        return [list(row) for row in G22]
    correction = matmul(matmul(G21, inverse(G11)), G12)
    return [[G22[i][j] - correction[i][j] for j in range(n - k)] for i in range(n - k)]


# ---------------------------------------------------------------------------
# integer lattices
# ---------------------------------------------------------------------------

def integer_det(A: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of an integer matrix"""
    n = len(A)
    if n == 0:
        return 1
    M = [list(map(int, row)) for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if M[r][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def clear_denominators(A: Sequence[Sequence]) -> Tuple[IntMatrix, int]:
    """(D·A, D) with D the least common denominator of the entries"""
    entries = [to_fraction(x) for row in A for x in row]
    D = 1
    for x in entries:
        D = math.lcm(D, x.denominator)
    return [[int(to_fraction(x) * D) for x in row] for row in A], D


def hermite_form(A: Sequence[Sequence[int]]) -> Tuple[IntMatrix, IntMatrix]:
    """
    Row Hermite normal form

    Returns:
        (H, U) with U unimodular and U·A = H; nonzero rows of H come first,
        pivots are positive and entries above a pivot are reduced mod it
    """
    H = [list(map(int, row)) for row in A]
    m = len(H)
    n = len(H[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nonzero = [i for i in range(r, m) if H[i][c] != 0]
            if not nonzero:
                break
            pivot = min(nonzero, key=lambda i: abs(H[i][c]))
            H[r], H[pivot] = H[pivot], H[r]
            U[r], U[pivot] = U[pivot], U[r]
            clean = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[r])]
                    if H[i][c]:
                        clean = False
            if clean:
                break
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        for i in range(r):
            q = H[i][c] // H[r][c]
            if q:
                H[i] = [x - q * y for x, y in zip(H[i], H[r])]
                U[i] = [x - q * y for x, y in zip(U[i], U[r])]
        r += 1
    return H, U


def integer_kernel(A: Sequence[Sequence]) -> IntMatrix:
    """ℤ-basis (as rows) of {x ∈ ℤⁿ : A·x = 0}"""
    A_int, _ = clear_denominators(A)
    n = shape(A_int)[1]
    if not A_int:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    H, U = hermite_form(transpose(A_int))
    return [U[i] for i in range(n) if not any(H[i])]


def canonical_basis(vectors: Sequence[Sequence[int]]) -> IntMatrix:
    """Nonzero rows of the Hermite form: a canonical ℤ-basis (rows) of the lattice the vectors span"""
    H, _ = hermite_form(vectors)
    return [row for row in H if any(row)]


def saturate(B: Sequence[Sequence]) -> IntMatrix:
    """
    Saturation span_ℚ(B) ∩ ℤⁿ of the column span of the n×k matrix B

    Returns:
        n×k integer matrix whose columns are the canonical basis of the saturation
    """
    n, k = shape(B)
    if rank(B) != k:
        raise ArgumentError("Subspace basis is rank-deficient")
    if k == n:
        return [[int(i == j) for j in range(n)] for i in range(n)]
    orthogonal = integer_kernel(transpose(B))
    rows = integer_kernel(orthogonal)
    return transpose(canonical_basis(rows))


def minors(B: Sequence[Sequence[int]]) -> List[int]:
    """All k×k minors of the n×k matrix B, rows taken in lexicographic order"""
    n, k = shape(B)
    return [integer_det([B[i] for i in rows]) for rows in combinations(range(n), k)]


def minors_gcd(B: Sequence[Sequence[int]]) -> int:
    """gcd of the k×k minors of an integer n×k matrix; 1 exactly when B is saturated"""
    g = 0
    for minor in minors([[int(x) for x in row] for row in B]):
        g = math.gcd(g, minor)
    if g == 0:
        raise ArgumentError("Subspace basis is rank-deficient")
    return g


def plucker_key(B: Sequence[Sequence[int]]) -> Tuple[int, ...]:
    """Primitive Plücker vector with positive first nonzero entry; equal iff same ℚ-span"""
    coords = minors(B)
    g = 0
    for c in coords:
        g = math.gcd(g, c)
    if g == 0:
        raise ArgumentError("Subspace basis is rank-deficient")
    first = next(c for c in coords if c != 0)
    if first < 0:
        g = -g
    return tuple(c // g for c in coords)


def unimodular_completion(Bs: Sequence[Sequence[int]]) -> IntMatrix:
    """
    W ∈ GL_n(ℤ) whose first k columns are the saturated basis Bs (n×k)
    """
    n, k = shape(Bs)
    H, U = hermite_form(Bs)
    H1 = [row[:k] for row in H[:k]]
    if abs(integer_det(H1)) != 1:
        raise ArgumentError("Subspace basis is not saturated")
    V = inverse(U)
    V_int = [[int(x) for x in row] for row in V]
    left = matmul([row[:k] for row in V_int], H1)
    return [[int(x) for x in left[i]] + V_int[i][k:] for i in range(n)]


def padic_elementary_valuations(A: Sequence[Sequence], p: int) -> List[int]:
    """
    p-adic valuations of the elementary divisors of a nonsingular rational matrix

    Local Smith form: repeatedly pivot on an entry of least valuation; the
    eliminations stay p-integral relative to the pivot.
    """
    M = [[to_fraction(x) for x in row] for row in A]
    n = len(M)
    valuations = []
    for step in range(n):
        best = None
        for i in range(step, n):
            for j in range(step, n):
                if M[i][j] != 0:
                    v = padic_valuation(M[i][j], p)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            raise InfeasibleInputError("Matrix is singular")
        v, i, j = best
        M[step], M[i] = M[i], M[step]
        for row in M:
            row[step], row[j] = row[j], row[step]
        pivot = M[step][step]
        for r in range(step + 1, n):
            if M[r][step]:
                factor = M[r][step] / pivot
                M[r] = [x - factor * y for x, y in zip(M[r], M[step])]
        for c in range(step + 1, n):
            if M[step][c]:
                factor = M[step][c] / pivot
                for r in range(step, n):
                    M[r][c] -= factor * M[r][step]
        valuations.append(v)
    return valuations


def denominator_primes(A: Sequence[Sequence]) -> List[int]:
    return prime_support([Fraction(to_fraction(x).denominator) for row in A for x in row])
