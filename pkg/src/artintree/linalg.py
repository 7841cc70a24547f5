"""Exact linear algebra over the prime field F_p.

Everything here works on plain Python integers reduced into [0, p).  Matrices
are immutable tuples of row tuples, subspaces are stored by their reduced
row echelon basis, and abelian invariants of integer relation matrices are
computed by Smith-style diagonalization over Z/p^B for a fixed power bound B.
No floats, no rationals, no third-party arrays.

The enumeration order of subspaces (echelon-lex, see ``enumerate_subspaces``)
is frozen: descendant labels produced elsewhere in the package depend on it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


def is_prime(p: int) -> bool:
    """Trial-division primality test, adequate for p < 2**16."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def inv_mod(a: int, p: int) -> int:
    """Inverse of a modulo the prime p."""
    a %= p
    if a == 0:
        raise ZeroDivisionError("zero has no inverse mod %d" % p)
    return pow(a, p - 2, p)


@dataclass(frozen=True)
class FpMatrix:
    """Dense matrix over F_p; entries are residues in [0, p)."""

    p: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError("modulus %r is not prime" % (self.p,))
        if self.rows:
            w = len(self.rows[0])
            for r in self.rows:
                if len(r) != w:
                    raise ValueError("ragged rows")
                for x in r:
                    if not 0 <= x < self.p:
                        raise ValueError("entry %r not reduced mod %d" % (x, self.p))

    @classmethod
    def make(cls, p: int, rows: Iterable[Iterable[int]]) -> "FpMatrix":
        return cls(p, tuple(tuple(x % p for x in r) for r in rows))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0


def rref_rows(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form of a list of rows over F_p.

    Returns (reduced rows including zero rows, pivot column list).  The row
    space is preserved; pivot entries are 1 and pivot columns are cleared
    above and below.
    """
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    pivots: list[int] = []
    row = 0
    for col in range(nc):
        if row >= nr:
            break
        sel = -1
        for i in range(row, nr):
            if m[i][col] % p:
                sel = i
                break
        if sel < 0:
            continue
        m[row], m[sel] = m[sel], m[row]
        inv = inv_mod(m[row][col], p)
        m[row] = [(x * inv) % p for x in m[row]]
        for i in range(nr):
            if i != row and m[i][col] % p:
                c = m[i][col] % p
                m[i] = [(a - c * b) % p for a, b in zip(m[i], m[row])]
        pivots.append(col)
        row += 1
    return m, pivots


def rref(mat: FpMatrix) -> tuple[FpMatrix, list[int]]:
    """RREF of an FpMatrix; returns (reduced matrix, pivot columns)."""
    rows, pivots = rref_rows(mat.rows, mat.p)
    return FpMatrix(mat.p, tuple(tuple(r) for r in rows)), pivots


def rank(rows: Sequence[Sequence[int]], p: int) -> int:
    return len(rref_rows(rows, p)[1]) if rows else 0


@dataclass(frozen=True)
class Subspace:
    """Subspace of F_p^ambient, stored by its reduced echelon basis.

    The basis rows are nonzero, in RREF, with strictly increasing pivot
    columns, so two Subspace objects are equal iff the subspaces are.
    """

    p: int
    ambient: int
    basis: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        for r in self.basis:
            if len(r) != self.ambient:
                raise ValueError("basis row has wrong length")
            if not any(r):
                raise ValueError("zero basis row")

    @classmethod
    def from_vectors(cls, p: int, ambient: int, vectors: Iterable[Sequence[int]]) -> "Subspace":
        vecs = [list(v) for v in vectors]
        if not vecs:
            return cls(p, ambient, ())
        rows, _ = rref_rows(vecs, p)
        return cls(p, ambient, tuple(tuple(r) for r in rows if any(r)))

    @classmethod
    def zero(cls, p: int, ambient: int) -> "Subspace":
        return cls(p, ambient, ())

    @classmethod
    def full(cls, p: int, ambient: int) -> "Subspace":
        rows = tuple(tuple(1 if j == i else 0 for j in range(ambient)) for i in range(ambient))
        return cls(p, ambient, rows)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.ambient - self.dim

    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(r) if x) for r in self.basis]

    def reduce_vector(self, v: Sequence[int]) -> list[int]:
        """Canonical representative of v modulo this subspace."""
        w = [x % self.p for x in v]
        for r in self.basis:
            lead = next(j for j, x in enumerate(r) if x)
            c = w[lead]
            if c:
                w = [(a - c * b) % self.p for a, b in zip(w, r)]
        return w

    def contains_vector(self, v: Sequence[int]) -> bool:
        return not any(self.reduce_vector(v))

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(r) for r in other.basis)

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace.from_vectors(self.p, self.ambient, list(self.basis) + list(other.basis))

    def apply_matrix(self, mat: Sequence[Sequence[int]]) -> "Subspace":
        """Image under the row-vector action v -> v * mat."""
        imgs = [mat_vec_left(r, mat, self.p) for r in self.basis]
        return Subspace.from_vectors(self.p, self.ambient, imgs)

    def __str__(self) -> str:
        return "span%s" % (list(map(list, self.basis)),)


def mat_vec_left(v: Sequence[int], mat: Sequence[Sequence[int]], p: int) -> list[int]:
    """Row vector times matrix over F_p."""
    n = len(mat[0]) if mat else 0
    out = [0] * n
    for i, c in enumerate(v):
        if c:
            row = mat[i]
            for j in range(n):
                out[j] = (out[j] + c * row[j]) % p
    return out


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], p: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(x for x in mat_vec_left(row, b, p)) for row in a)


def mat_inv(a: Sequence[Sequence[int]], p: int) -> tuple[tuple[int, ...], ...]:
    """Inverse of a square matrix over F_p by Gauss-Jordan."""
    n = len(a)
    aug = [list(a[i]) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    rows, pivots = rref_rows(aug, p)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular mod %d" % p)
    return tuple(tuple(rows[i][n:]) for i in range(n))


def identity_matrix(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(n))


def nullspace(mat: FpMatrix) -> Subspace:
    """Right kernel {v : mat . v = 0}, as a subspace of F_p^ncols."""
    p = mat.p
    nc = mat.ncols
    if mat.nrows == 0 or nc == 0:
        return Subspace.full(p, nc)
    rows, pivots = rref_rows(mat.rows, p)
    free = [j for j in range(nc) if j not in pivots]
    basis = []
    for f in free:
        v = [0] * nc
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-rows[i][f]) % p
        basis.append(v)
    return Subspace.from_vectors(p, nc, basis)


def gaussian_binomial(n: int, k: int, p: int) -> int:
    """Number of k-dimensional subspaces of F_p^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    assert num % den == 0
    return num // den


def enumerate_subspaces(ambient_dim: int, codim: int, p: int) -> Iterator[Subspace]:
    """Yield every subspace of the given codimension exactly once.

    Order (frozen): pivot column sets in lexicographic order; for each pivot
    set the free entries of the echelon basis matrix are counted row-major,
    last cell fastest, each cell running 0..p-1.  Downstream orbit counters
    depend on this order.
    """
    if not 0 <= codim <= ambient_dim:
        raise ValueError("codimension out of range")
    d = ambient_dim - codim
    if d == 0:
        yield Subspace.zero(p, ambient_dim)
        return
    for pivots in itertools.combinations(range(ambient_dim), d):
        free_cells = [
            (i, j)
            for i in range(d)
            for j in range(pivots[i] + 1, ambient_dim)
            if j not in pivots
        ]
        for vals in itertools.product(range(p), repeat=len(free_cells)):
            rows = [[0] * ambient_dim for _ in range(d)]
            for i in range(d):
                rows[i][pivots[i]] = 1
            for (i, j), v in zip(free_cells, vals):
                rows[i][j] = v
            yield Subspace(p, ambient_dim, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class IntMatrix:
    """Integer relation matrix (rows = relations among n generators)."""

    rows: tuple[tuple[int, ...], ...]
    ncols: int

    @classmethod
    def make(cls, rows: Iterable[Iterable[int]], ncols: int) -> "IntMatrix":
        out = tuple(tuple(int(x) for x in r) for r in rows)
        for r in out:
            if len(r) != ncols:
                raise ValueError("row length != ncols")
        return cls(out, ncols)


class AbelianQuotient:
    """Finite abelian p-group Z^n / (rows + p^B Z^n), diagonalized mod p^B.

    All arithmetic is done in Z/p^B; B must exceed the largest exponent that
    can occur, which makes every quotient finite by construction.  A diagonal
    entry of valuation B therefore flags a quotient that is not a p-group of
    exponent < p^B and is reported as an error by ``invariants``.
    """

    def __init__(self, rel_rows: Sequence[Sequence[int]], p: int, ngens: int, bound_exp: int = 7):
        if not is_prime(p):
            raise ValueError("p must be prime")
        self.p = p
        self.n = ngens
        self.B = bound_exp
        self.mod = p ** bound_exp
        rows = [[int(x) % self.mod for x in r] for r in rel_rows]
        for r in rows:
            if len(r) != ngens:
                raise ValueError("relation row length != ngens")
        if not rows:
            rows = [[0] * ngens]
        self._diagonalize(rows)

    def _val(self, x: int) -> int:
        """p-adic valuation within Z/p^B (valuation of 0 is B)."""
        if x == 0:
            return self.B
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def _diagonalize(self, rows: list[list[int]]) -> None:
        p, mod, n = self.p, self.mod, self.n
        V = [[1 if j == i else 0 for j in range(n)] for i in range(n)]
        m = rows
        nr = len(m)
        diag = []
        r0 = 0
        for c0 in range(n):
            # pivot: entry of minimal valuation in the remaining block
            best = None
            for i in range(r0, nr):
                for j in range(c0, n):
                    if m[i][j]:
                        v = self._val(m[i][j])
                        if best is None or v < best[0]:
                            best = (v, i, j)
                if best and best[0] == 0:
                    break
            if best is None:
                diag.append(0)
                continue
            _, bi, bj = best
            m[r0], m[bi] = m[bi], m[r0]
            if bj != c0:
                for row in m:
                    row[c0], row[bj] = row[bj], row[c0]
                V[c0], V[bj] = V[bj], V[c0]  # tracking column swaps as row swaps of V^T
            # scale pivot to a pure power of p (divide by its unit part)
            piv = m[r0][c0]
            v = self._val(piv)
            unit = piv // p**v
            uinv = pow(unit, -1, mod)
            m[r0] = [(x * uinv) % mod for x in m[r0]]
            piv = m[r0][c0]
            # clear column below/above
            for i in range(nr):
                if i != r0 and m[i][c0]:
                    q = m[i][c0] // piv if m[i][c0] % piv == 0 else None
                    if q is None:
                        # valuation of pivot is minimal, so divisible after unit scaling
                        raise AssertionError("pivot does not divide column entry")
                    m[i] = [(a - q * b) % mod for a, b in zip(m[i], m[r0])]
            # clear row to the right, tracking column ops in V
            for j in range(c0 + 1, n):
                if m[r0][j]:
                    assert m[r0][j] % piv == 0
                    q = m[r0][j] // piv
                    for row in m:
                        row[j] = (row[j] - q * row[c0]) % mod
                    for k in range(n):
                        V[j][k] = (V[j][k] - q * V[c0][k]) % mod
            diag.append(piv)
            r0 += 1
        # column ops were tracked on V transposed: V[j] is column j of the
        # accumulated transform, so x*V is computed via dot with V rows.
        self._V = V
        self._diag_vals = [self._val(d) if d else self.B for d in diag]

    def invariants(self) -> list[int]:
        """Type exponents e_1 >= e_2 >= ... with the group = prod C_{p^e_i}.

        Raises ValueError if any diagonal entry has valuation >= B, i.e. the
        presented quotient is not killed by the ambient bound.
        """
        exps = [v for v in self._diag_vals]
        if any(v >= self.B for v in exps):
            raise ValueError(
                "quotient has an invariant >= p^%d; not a finite p-group within the bound" % self.B
            )
        return sorted((v for v in exps if v > 0), reverse=True)

    def coords(self, vec: Sequence[int]) -> list[int]:
        """Transform a vector into diagonal coordinates (x -> x*V)."""
        x = [int(a) % self.mod for a in vec]
        out = []
        for j in range(self.n):
            s = 0
            for k in range(self.n):
                if x[k]:
                    s += x[k] * self._V[j][k]
            out.append(s % self.mod)
        return out

    def is_zero(self, vec: Sequence[int]) -> bool:
        """Whether vec lies in the relation lattice, i.e. is 0 in the quotient."""
        y = self.coords(vec)
        for yj, v in zip(y, self._diag_vals):
            if yj % (self.p**v):
                return False
        return True


def abelian_invariants(rel: IntMatrix | Sequence[Sequence[int]], p: int, gens: int, bound_exp: int = 7) -> list[int]:
    """Abelian type of the p-group presented by integer relation rows.

    Returns the descending list of exponents e_i with the group isomorphic to
    the direct product of C_{p^e_i}.  The empty list is the trivial group.
    """
    rows = rel.rows if isinstance(rel, IntMatrix) else rel
    return AbelianQuotient(rows, p, gens, bound_exp).invariants()
