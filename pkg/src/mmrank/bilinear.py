"""Compile verified decompositions into runnable bilinear matmul programs.

Each rank-one term (u, v, w) of a decomposition of the n x n
multiplication tensor becomes one product: the full inner products
<u, A> and <v, B> are multiplied, and the result contributes to output
entry (i, k) with coefficient w[k, i].  The transpose on w follows from
the index convention of the multiplication tensor (its third slot carries
the output with indices swapped).  Whenever a program is built, this
convention is confirmed against naive multiplication on all n**4 basis
pairs, which by bilinearity is a complete check, so a wrong program can
never be emitted.

Programs apply recursively to sides exactly n**d by block partitioning;
depth d costs exactly r**d bilinear multiplications.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fields import Field
from .tensors import Decomposition, Matrix, matmul_tensor, verify


@dataclass(frozen=True)
class OpCount:
    multiplications: int
    additions: int
    depth: int
    # Coefficient scalings other than 0 and +-1 cost one scalar
    # multiplication each; 0 for every program emitted by this package.
    scalar_multiplications: int = 0


class BilinearProgram:
    """r products of linear forms in A and B plus output combinations."""

    __slots__ = ("field", "n", "left", "right", "out")

    def __init__(self, field: Field, n: int, left, right, out):
        self.field = field
        self.n = n
        self.left = tuple(left)    # coefficient matrices applied to A
        self.right = tuple(right)  # coefficient matrices applied to B
        self.out = tuple(out)      # per-product output coefficients, w[k, i] feeds C[i, k]

    @property
    def r(self) -> int:
        return len(self.left)

    def apply(self, A: Matrix, B: Matrix) -> Matrix:
        """Exact product A * B via the r bilinear products."""
        f = self.field
        n = self.n
        if A.n != n or B.n != n:
            raise ValueError(f"program expects {n} x {n} operands")
        if A.field != f or B.field != f:
            raise ValueError("operands must be over the program field")
        add, mul = f.add, f.mul
        zero = f.zero
        c = [zero] * (n * n)
        for u, v, w in zip(self.left, self.right, self.out):
            la = zero
            for x, a in zip(u.entries, A.entries):
                if x != zero:
                    la = add(la, mul(x, a))
            rb = zero
            for y, b in zip(v.entries, B.entries):
                if y != zero:
                    rb = add(rb, mul(y, b))
            prod = mul(la, rb)
            if prod != zero:
                for k in range(n):
                    for i in range(n):
                        coef = w.entries[k * n + i]
                        if coef != zero:
                            c[i * n + k] = add(c[i * n + k], mul(coef, prod))
        return Matrix(f, n, c)

    def apply_recursive(self, A: Matrix, B: Matrix, depth: int) -> Matrix:
        """Block-recursive application to sides exactly n**depth."""
        side = self.n**depth
        if A.n != side or B.n != side:
            raise ValueError(f"depth {depth} needs side {side}, got {A.n} and {B.n}")
        if A.field != self.field or B.field != self.field:
            raise ValueError("operands must be over the program field")
        return self._recurse(A, B, depth)

    def _recurse(self, A: Matrix, B: Matrix, depth: int) -> Matrix:
        f = self.field
        if depth == 0:
            return Matrix(f, 1, [f.mul(A.entries[0], B.entries[0])])
        n = self.n
        m = A.n // n  # block side
        zero_block = Matrix.zero(f, m)
        a_blocks = _split_blocks(A, n)
        b_blocks = _split_blocks(B, n)
        c_blocks = [[zero_block] * n for _ in range(n)]
        zero = f.zero
        one = f.one
        for u, v, w in zip(self.left, self.right, self.out):
            la = _combine_blocks(a_blocks, u, zero, one)
            rb = _combine_blocks(b_blocks, v, zero, one)
            if la is None or rb is None:
                continue
            prod = self._recurse(la, rb, depth - 1)
            for k in range(n):
                for i in range(n):
                    coef = w.entries[k * n + i]
                    if coef != zero:
                        scaled = prod if coef == one else prod.scale(coef)
                        c_blocks[i][k] = c_blocks[i][k] + scaled
        return _join_blocks(c_blocks, f)

    def count_ops(self, depth: int) -> OpCount:
        """Exact operation counts for depth-d recursion.

        Multiplications are the r**d bilinear block products.  Additions
        are scalar entry additions, accumulated through the recursion;
        a linear form with k nonzero coefficients costs k - 1 block
        additions, and coefficients other than +-1 cost one scalar
        multiplication per entry (none occur for 0/+-1 programs).
        """
        f = self.field
        zero, one = f.zero, f.one
        minus_one = f.neg(f.one)

        def form_costs(mat: Matrix) -> tuple[int, int]:
            nz = sum(1 for e in mat.entries if e != zero)
            non_unit = sum(1 for e in mat.entries if e not in (zero, one, minus_one))
            return (max(nz - 1, 0), non_unit)

        adds_per_level = 0
        scalings_per_level = 0
        for u, v in zip(self.left, self.right):
            for mat in (u, v):
                a, s = form_costs(mat)
                adds_per_level += a
                scalings_per_level += s
        n = self.n
        for k in range(n):
            for i in range(n):
                nz = 0
                non_unit = 0
                for w in self.out:
                    e = w.entries[k * n + i]
                    if e != zero:
                        nz += 1
                        if e not in (one, minus_one):
                            non_unit += 1
                adds_per_level += max(nz - 1, 0)
                scalings_per_level += non_unit

        # Bottom-up: T(0) = 0; T(d) = r * T(d-1) + per_level * (n**(d-1))**2.
        additions = 0
        scalings = 0
        for d in range(1, depth + 1):
            block_entries = (n ** (d - 1)) ** 2
            additions = self.r * additions + adds_per_level * block_entries
            scalings = self.r * scalings + scalings_per_level * block_entries
        return OpCount(self.r**depth, additions, depth, scalings)


def _split_blocks(M: Matrix, n: int) -> list[list[Matrix]]:
    m = M.n // n
    f = M.field
    blocks = []
    for bi in range(n):
        row = []
        for bj in range(n):
            ent = []
            for i in range(m):
                base = (bi * m + i) * M.n + bj * m
                ent.extend(M.entries[base:base + m])
            row.append(Matrix(f, m, ent))
        blocks.append(row)
    return blocks


def _join_blocks(blocks: list[list[Matrix]], field: Field) -> Matrix:
    n = len(blocks)
    m = blocks[0][0].n
    side = n * m
    ent = [field.zero] * (side * side)
    for bi in range(n):
        for bj in range(n):
            b = blocks[bi][bj]
            for i in range(m):
                base = (bi * m + i) * side + bj * m
                ent[base:base + m] = b.entries[i * m:(i + 1) * m]
    return Matrix(field, side, ent)


def _combine_blocks(blocks, coeffs: Matrix, zero, one):
    """Linear form of blocks; None when every coefficient is zero."""
    n = coeffs.n
    total = None
    for i in range(n):
        for j in range(n):
            c = coeffs.entries[i * n + j]
            if c == zero:
                continue
            term = blocks[i][j] if c == one else blocks[i][j].scale(c)
            total = term if total is None else total + term
    return total


def naive_matmul(A: Matrix, B: Matrix) -> Matrix:
    """Textbook row-by-column product; the oracle for everything here."""
    if A.n != B.n:
        raise ValueError("sides differ")
    if A.field != B.field:
        raise ValueError("fields differ")
    f = A.field
    n = A.n
    add, mul = f.add, f.mul
    c = []
    for i in range(n):
        for k in range(n):
            acc = f.zero
            for j in range(n):
                acc = add(acc, mul(A.entries[i * n + j], B.entries[j * n + k]))
            c.append(acc)
    return Matrix(f, n, c)


def compile_program(d: Decomposition) -> BilinearProgram:
    """Verified decomposition -> bilinear program; refuses anything else."""
    target = matmul_tensor(d.n, d.field)
    res = verify(d, target)
    if not res.ok:
        raise ValueError(
            f"decomposition does not expand to the multiplication tensor "
            f"({len(res.mismatches)}+ differing coordinates)"
        )
    prog = BilinearProgram(
        d.field,
        d.n,
        [t.u for t in d.terms],
        [t.v for t in d.terms],
        [t.w for t in d.terms],
    )
    _validate_on_basis(prog)
    return prog


def _validate_on_basis(p: BilinearProgram) -> None:
    f, n = p.field, p.n
    for i, j, k, l in itertools.product(range(n), repeat=4):
        A = Matrix.basis(f, n, i, j)
        B = Matrix.basis(f, n, k, l)
        if p.apply(A, B) != naive_matmul(A, B):
            raise AssertionError(
                "compiled program disagrees with naive multiplication on a basis pair"
            )
