"""Exact integer and rational linear algebra.

Matrices are plain lists of lists of Python ints (row-major), so entries never
overflow.  The central routine is :func:`smith_normal_form`; everything about
class groups reduces to cokernels computed from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

IntMatrix = list[list[int]]


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> IntMatrix:
    return [[0] * cols for _ in range(rows)]


def transpose(A: Sequence[Sequence[int]], cols: Optional[int] = None) -> IntMatrix:
    if not A:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*A)]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> list[list]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(A))]


def matvec(A: Sequence[Sequence], v: Sequence) -> list:
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def vector_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def lcm(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // gcd(a, b)


def determinant(A: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


# ---------------------------------------------------------------------------
# rational elimination

def rref(A: Sequence[Sequence], ncols: Optional[int] = None):
    """Reduced row echelon form over Q. Returns (rows, pivot columns)."""
    M = [[Fraction(x) for x in row] for row in A]
    ncols = len(M[0]) if M else (ncols or 0)
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(A: Sequence[Sequence], ncols: Optional[int] = None) -> int:
    return len(rref(A, ncols)[1])


def rational_nullspace(A: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : A x = 0} over Q."""
    R, pivots = rref(A, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(R, pivots):
            x[p] = -row[f]
        basis.append(x)
    return basis


def rational_solve(A: Sequence[Sequence], b: Sequence, ncols: int) -> Optional[list[Fraction]]:
    """One solution of A x = b over Q, or None."""
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(R, pivots):
        x[p] = row[ncols]
    return x


def primitive(v: Sequence) -> list[int]:
    """Scale a rational vector to the primitive integer vector on its ray."""
    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator) or den
    w = [int(Fraction(x) * den) for x in v]
    g = vector_gcd(w)
    return [x // g for x in w] if g else w


# ---------------------------------------------------------------------------
# Hermite and Smith forms

def hermite_normal_form(A: Sequence[Sequence[int]]) -> tuple[IntMatrix, IntMatrix]:
    """Row-style HNF: returns (H, U) with U unimodular and U A = H.

    H is in row echelon form, pivots positive, entries above each pivot
    reduced into [0, pivot).  Zero rows are at the bottom.
    """
    m = len(A)
    n = len(A[0]) if A else 0
    H = [list(row) for row in A]
    U = identity(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][c]))
            H[r], H[p] = H[p], H[r]
            U[r], U[p] = U[p], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if r < m and H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-a for a in H[r]]
                U[r] = [-a for a in U[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                if q:
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
            r += 1
    return H, U


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with U, V unimodular and D diagonal."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.V)))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def smith_normal_form(A: Sequence[Sequence[int]], cols: Optional[int] = None) -> SmithDecomposition:
    """Smith normal form with transforms, pivoting on minimal absolute value.

    ``cols`` is only needed when A has zero rows.
    """
    m = len(A)
    n = len(A[0]) if A else (cols or 0)
    D = [list(row) for row in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        D[dst] = [a - q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in D:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            clean = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, D[i][t] // D[t][t])
                    clean = clean and D[i][t] == 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, D[t][j] // D[t][t])
                    clean = clean and D[t][j] == 0
            if not clean:
                # move the smallest remainder in row/column t onto the pivot
                cand = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
                _, i, j = min(cand)
                if j == t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], -1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
    return SmithDecomposition(U, D, V)


def integer_kernel(A: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Lattice basis of {x in Z^ncols : A x = 0}."""
    if not A:
        return identity(ncols)
    snf = smith_normal_form(A, ncols)
    r = snf.rank
    return [[snf.V[i][j] for i in range(ncols)] for j in range(r, ncols)]


def integer_solve(A: Sequence[Sequence[int]], b: Sequence[int], ncols: int) -> Optional[list[int]]:
    """One integer solution of A x = b, or None when there is none."""
    if not A:
        return [0] * ncols
    snf = smith_normal_form(A, ncols)
    c = matvec(snf.U, b)
    diag = snf.diagonal
    y = [0] * ncols
    for i, ci in enumerate(c):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if ci != 0:
                return None
        else:
            if ci % d:
                return None
            y[i] = ci // d
    return matvec(snf.V, y)


def saturated_basis(vectors: Sequence[Sequence[int]], dim: int) -> tuple[IntMatrix, IntMatrix]:
    """Basis of the saturation of span(vectors) in Z^dim, plus a complement.

    Returns (basis, complement) whose rows together form a unimodular matrix.
    """
    if not vectors:
        return [], identity(dim)
    snf = smith_normal_form([list(v) for v in vectors], dim)
    r = snf.rank
    # rowspace(A) V = rowspace(D), so the saturated span is spanned by the
    # first r rows of V^{-1}.
    Vinv = _unimodular_inverse(snf.V)
    H, _ = hermite_normal_form(Vinv[:r])
    basis = H[:r]
    pivots = [next(j for j, x in enumerate(row) if x) for row in basis]
    complement = [[int(i == j) for i in range(dim)] for j in range(dim) if j not in pivots]
    if abs(determinant(basis + complement)) != 1:
        complement = Vinv[r:]
    return basis, complement


def _unimodular_inverse(V: IntMatrix) -> IntMatrix:
    n = len(V)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(V)]
    R, _ = rref(aug, 2 * n)
    return [[int(x) for x in row[n:]] for row in R]


# ---------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True)
class AbGroupPresentation:
    """Z^free_rank + sum of Z/torsion[j], presented as a quotient of Z^ambient.

    ``projection`` has one row per ambient basis vector; the image of an
    ambient vector y is ``y @ projection`` with torsion coordinates reduced.
    Coordinates are ordered free part first, then torsion.
    """

    ambient: int
    free_rank: int
    torsion: tuple[int, ...]
    projection: tuple[tuple[int, ...], ...]

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def order(self) -> Optional[int]:
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def image(self, y: Sequence[int]) -> tuple[int, ...]:
        coords = [sum(y[i] * self.projection[i][j] for i in range(self.ambient))
                  for j in range(self.ngens)]
        for k, d in enumerate(self.torsion):
            coords[self.free_rank + k] %= d
        return tuple(coords)

    def element_order(self, coords: Sequence[int]) -> int:
        """Order of an element given in presentation coordinates (0 = infinite)."""
        if any(coords[:self.free_rank]):
            return 0
        out = 1
        for c, d in zip(coords[self.free_rank:], self.torsion):
            out = lcm(out, d // gcd(c, d))
        return out

    def relation_rows(self) -> list[list[int]]:
        rows = []
        for k, d in enumerate(self.torsion):
            row = [0] * self.ngens
            row[self.free_rank + k] = d
            rows.append(row)
        return rows

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion), "name": str(self)}


def cokernel(A: Sequence[Sequence[int]], ambient: Optional[int] = None) -> AbGroupPresentation:
    """Presentation of Z^m modulo the lattice spanned by the rows of A.

    ``ambient`` (= m) is required when A has no rows.
    """
    m = len(A[0]) if A else (ambient or 0)
    if ambient is not None and A and ambient != m:
        raise ValueError("row length does not match ambient rank")
    snf = smith_normal_form(A, m)
    diag = snf.diagonal + [0] * (m - len(snf.diagonal))
    free_cols = [j for j in range(m) if diag[j] == 0]
    tors_cols = [j for j in range(m) if diag[j] > 1]
    cols = free_cols + tors_cols
    projection = tuple(tuple(snf.V[i][j] for j in cols) for i in range(m))
    return AbGroupPresentation(m, len(free_cols), tuple(diag[j] for j in tors_cols), projection)


def subgroup_generates(elements: Sequence[Sequence[int]], G: AbGroupPresentation) -> bool:
    """True iff the images of the ambient vectors ``elements`` generate G."""
    rows = [list(G.image(e)) for e in elements] + G.relation_rows()
    return cokernel(rows, G.ngens).is_trivial()


def subgroup_order(gens: Sequence[Sequence[int]], G: AbGroupPresentation) -> Optional[int]:
    """Order of the subgroup generated by presentation-coordinate vectors."""
    if G.free_rank:
        raise ValueError("subgroup_order only supports finite groups")
    total = G.order
    quotient = cokernel([list(g) for g in gens] + G.relation_rows(), G.ngens).order
    return total // quotient
