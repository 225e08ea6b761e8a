"""Finitely generated abelian groups over Z[1/P] in invariant-factor form.

A group is R^r + Z/d_1 + ... + Z/d_k with d_1 | ... | d_k, R = Z[1/P].
Elements are coordinate tuples (free coordinates in R, then residues).
Homomorphisms are matrices whose columns are the images of generators.
Every construction (kernel, cokernel, image, direct sum, pullback) is
reduced to one primitive: presenting R^n / colspan(relations) in
canonical form through a Smith normal form.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm, prod
from typing import Iterable, Iterator, Optional, Sequence

from .arith import ZZ, LocalizedRing, Scalar, exact_div, norm, residue
from .snf import identity, matmul, snf_full

Vector = tuple
Matrix = list  # row-major list of rows


@dataclass(frozen=True)
class FgAbelianGroup:
    free_rank: int = 0
    torsion: tuple[int, ...] = ()
    ring: LocalizedRing = ZZ

    def __post_init__(self):
        tors = tuple(int(d) for d in self.torsion)
        object.__setattr__(self, "torsion", tors)
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for d in tors:
            if d < 2:
                raise ValueError(f"torsion invariants must be >= 2, got {d}")
            if self.ring.strip(d) != d:
                raise ValueError(f"torsion invariant {d} is not coprime to inverted primes of {self.ring}")
        for a, b in zip(tors, tors[1:]):
            if b % a:
                raise ValueError(f"torsion invariants must form a divisibility chain: {a} does not divide {b}")

    @classmethod
    def from_invariants(cls, orders: Iterable[int], ring: LocalizedRing = ZZ) -> FgAbelianGroup:
        """Canonical form of a direct sum of cyclic groups (0 means free)."""
        orders = list(orders)
        rel = [[0] * len(orders) for _ in orders]
        for i, d in enumerate(orders):
            rel[i][i] = d
        return present(rel, len(orders), ring)[0]

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def moduli(self) -> tuple[Optional[int], ...]:
        """Per-coordinate modulus; None for free coordinates."""
        return (None,) * self.free_rank + self.torsion

    def relations(self) -> Matrix:
        """Relation columns of the presentation, shape ngens x len(torsion)."""
        rel = [[0] * len(self.torsion) for _ in range(self.ngens)]
        for i, d in enumerate(self.torsion):
            rel[self.free_rank + i][i] = d
        return rel

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    def order(self) -> Optional[int]:
        return prod(self.torsion) if self.is_finite else None

    @property
    def exponent(self) -> int:
        if not self.is_finite:
            return 0
        return self.torsion[-1] if self.torsion else 1

    # elements -------------------------------------------------------------
    def normalize(self, coords: Sequence[Scalar]) -> Vector:
        if len(coords) != self.ngens:
            raise ValueError(f"expected {self.ngens} coordinates, got {len(coords)}")
        out = []
        for x, d in zip(coords, self.moduli):
            if d is None:
                x = norm(Fraction(x)) if not isinstance(x, int) else x
                if not self.ring.contains(x):
                    raise ValueError(f"{x} is not in {self.ring}")
                out.append(x)
            else:
                out.append(residue(x, d))
        return tuple(out)

    def zero(self) -> Vector:
        return (0,) * self.ngens

    def add(self, x: Vector, y: Vector) -> Vector:
        return self.normalize([a + b for a, b in zip(x, y)])

    def sub(self, x: Vector, y: Vector) -> Vector:
        return self.normalize([a - b for a, b in zip(x, y)])

    def neg(self, x: Vector) -> Vector:
        return self.normalize([-a for a in x])

    def scale(self, k: int, x: Vector) -> Vector:
        return self.normalize([k * a for a in x])

    def generator(self, i: int) -> Vector:
        return tuple(int(j == i) for j in range(self.ngens))

    def elements(self) -> Iterator[Vector]:
        if not self.is_finite:
            raise ValueError("cannot enumerate an infinite group")
        return itertools.product(*(range(d) for d in self.torsion))

    def element_order(self, x: Vector) -> int:
        """Order of an element, 0 if infinite."""
        if any(x[: self.free_rank]):
            return 0
        return lcm(1, *(d // gcd(v, d) for v, d in zip(x[self.free_rank:], self.torsion)))

    def __str__(self):
        parts = []
        base = "Z" if self.ring == ZZ else str(self.ring)
        if self.free_rank == 1:
            parts.append(base)
        elif self.free_rank > 1:
            parts.append(f"{base}^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def cyclic(n: int, ring: LocalizedRing = ZZ) -> FgAbelianGroup:
    return FgAbelianGroup.from_invariants([n], ring)


def free(r: int, ring: LocalizedRing = ZZ) -> FgAbelianGroup:
    return FgAbelianGroup(r, (), ring)


TRIVIAL = FgAbelianGroup()


# --------------------------------------------------------------------------
# linear algebra over Z[1/P]

def _clear_rows(mat: Matrix, ring: LocalizedRing) -> tuple[Matrix, list[int]]:
    """Scale each row by a unit of ``ring`` to make it integral."""
    out, scales = [], []
    for row in mat:
        c = lcm(1, *(x.denominator for x in row if isinstance(x, Fraction)))
        if not ring.is_unit(c):
            raise ValueError(f"entry outside {ring}")
        out.append([int(x * c) for x in row])
        scales.append(c)
    return out, scales


def present(rel: Matrix, n: int, ring: LocalizedRing = ZZ):
    """Canonical form of R^n / colspan(rel).

    Returns (G, proj, sect): ``proj`` maps R^n coordinates to G coordinates
    (rows reduced where torsion), ``sect`` has as columns lifts in R^n of
    the generators of G.
    """
    k = len(rel[0]) if rel else 0
    if n == 0:
        return FgAbelianGroup(0, (), ring), [], []
    if k == 0:
        return FgAbelianGroup(n, (), ring), identity(n), identity(n)
    ints, scales = _clear_rows(rel, ring)
    u, uinv, d, _, _ = snf_full(ints, k)
    diag = [d[i][i] if i < k else 0 for i in range(n)]
    stripped = [ring.strip(x) for x in diag]
    free_idx = [i for i in range(n) if stripped[i] == 0]
    tors_idx = [i for i in range(n) if stripped[i] > 1]
    order = free_idx + tors_idx
    G = FgAbelianGroup(len(free_idx), tuple(stripped[i] for i in tors_idx), ring)
    # proj = u @ diag(scales); sect = diag(scales)^-1 @ uinv
    proj = []
    for pos, i in enumerate(order):
        row = [norm(Fraction(u[i][j] * scales[j])) for j in range(n)]
        if pos >= G.free_rank:
            row = [residue(x, stripped[i]) for x in row]
        proj.append(row)
    sect = [[exact_div(uinv[r][i], scales[r]) for i in order] for r in range(n)]
    return G, proj, sect


def group_from_relations(rel: Sequence[Sequence[Scalar]], ring: LocalizedRing = ZZ,
                         nrows: int | None = None) -> FgAbelianGroup:
    """The group R^n / colspan(rel) in canonical form."""
    rel = [list(r) for r in rel]
    return present(rel, len(rel) if nrows is None else nrows, ring)[0]


def _nullspace(mat: Matrix, ncols: int, ring: LocalizedRing) -> Matrix:
    """Basis (as columns, ncols x l) of {z in R^ncols : mat z = 0}."""
    if not mat:
        return identity(ncols)
    ints, _ = _clear_rows(mat, ring)
    _, _, d, v, _ = snf_full(ints, ncols)
    rank = sum(1 for i in range(min(len(d), ncols)) if d[i][i])
    return [row[rank:] for row in v]


def _solve(mat: Matrix, ncols: int, y: Sequence[Scalar], ring: LocalizedRing) -> Optional[list]:
    """Some z in R^ncols with mat z = y, or None."""
    m = len(mat)
    if m == 0:
        return [0] * ncols
    ints, scales = _clear_rows(mat, ring)
    u, _, d, v, _ = snf_full(ints, ncols)
    yc = [y[i] * scales[i] for i in range(m)]
    yp = [sum(u[i][j] * yc[j] for j in range(m)) for i in range(m)]
    w = []
    for i in range(m):
        di = d[i][i] if i < ncols else 0
        if di == 0:
            if yp[i] != 0:
                return None
        elif i < ncols:
            if not ring.divides(di, norm(Fraction(yp[i]))):
                return None
            w.append(exact_div(norm(Fraction(yp[i])), di))
    w += [0] * (ncols - len(w))
    return [norm(Fraction(sum(v[r][c] * w[c] for c in range(ncols)))) for r in range(ncols)]


def _hcat(*mats: Matrix, nrows: int) -> Matrix:
    return [sum((list(m[i]) for m in mats), []) for i in range(nrows)]


def _blockdiag(a: Matrix, arows: int, acols: int, b: Matrix, brows: int, bcols: int) -> Matrix:
    out = [list(a[i]) + [0] * bcols for i in range(arows)]
    out += [[0] * acols + list(b[i]) for i in range(brows)]
    return out


# --------------------------------------------------------------------------
# homomorphisms

@dataclass(frozen=True)
class AbelianHom:
    """Homomorphism given by the images of the domain generators.

    ``matrix`` has one row per codomain coordinate and one column per domain
    generator; rows for torsion coordinates are stored reduced.  The domain
    ring must be contained in the codomain ring (e.g. a localization unit).
    """

    domain: FgAbelianGroup
    codomain: FgAbelianGroup
    matrix: tuple = field(default=())

    def __post_init__(self):
        A, B = self.domain, self.codomain
        rows = [list(r) for r in self.matrix] if self.matrix else [[] for _ in range(B.ngens)]
        if B.ngens == 0:
            rows = []
        if len(rows) != B.ngens or any(len(r) != A.ngens for r in rows):
            raise ValueError(f"matrix shape must be {B.ngens} x {A.ngens}")
        if not A.ring.issubring(B.ring):
            raise ValueError(f"no homomorphisms from {A.ring}-modules to {B.ring}-modules assumed")
        cols = [B.normalize([rows[i][j] for i in range(B.ngens)]) for j in range(A.ngens)]
        for j, d in enumerate(A.moduli):
            if d is not None and any(B.scale(d, cols[j])):
                raise ValueError(f"generator {j} of order {d} maps to {cols[j]}, not killed by {d}")
        mat = tuple(tuple(cols[j][i] for j in range(A.ngens)) for i in range(B.ngens))
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_columns(cls, domain, codomain, columns: Sequence[Sequence[Scalar]]) -> AbelianHom:
        columns = list(columns)
        mat = [[columns[j][i] for j in range(domain.ngens)] for i in range(codomain.ngens)]
        return cls(domain, codomain, mat)

    @classmethod
    def identity(cls, A: FgAbelianGroup) -> AbelianHom:
        return cls(A, A, identity(A.ngens))

    @classmethod
    def zero(cls, A: FgAbelianGroup, B: FgAbelianGroup) -> AbelianHom:
        return cls(A, B, [[0] * A.ngens for _ in range(B.ngens)])

    @classmethod
    def multiplication(cls, A: FgAbelianGroup, k: int) -> AbelianHom:
        return cls(A, A, [[k * int(i == j) for j in range(A.ngens)] for i in range(A.ngens)])

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.matrix)

    @property
    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.domain.ngens)]

    def __call__(self, x: Sequence[Scalar]) -> Vector:
        B = self.codomain
        return B.normalize([sum(r * c for r, c in zip(row, x)) for row in self.matrix])

    def compose(self, other: AbelianHom) -> AbelianHom:
        """self after other."""
        if other.codomain != self.domain:
            raise ValueError("homomorphisms are not composable")
        k, n = self.domain.ngens, other.domain.ngens
        mat = [[sum(row[t] * other.matrix[t][j] for t in range(k)) for j in range(n)] for row in self.matrix]
        return AbelianHom(other.domain, self.codomain, mat)

    __matmul__ = compose

    def _check_parallel(self, other: AbelianHom):
        if (self.domain, self.codomain) != (other.domain, other.codomain):
            raise ValueError("homomorphisms are not parallel")

    def __add__(self, other: AbelianHom) -> AbelianHom:
        self._check_parallel(other)
        mat = [[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)]
        return AbelianHom(self.domain, self.codomain, mat)

    def __neg__(self) -> AbelianHom:
        return AbelianHom(self.domain, self.codomain, [[-a for a in r] for r in self.matrix])

    def __sub__(self, other: AbelianHom) -> AbelianHom:
        return self + (-other)

    def __rmul__(self, k: int) -> AbelianHom:
        return AbelianHom(self.domain, self.codomain, [[k * a for a in r] for r in self.matrix])

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.matrix)

    def is_injective(self) -> bool:
        return kernel(self)[0].is_trivial

    def is_surjective(self) -> bool:
        return cokernel(self)[0].is_trivial

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


def _same_ring(*groups: FgAbelianGroup) -> LocalizedRing:
    rings = {G.ring for G in groups}
    if len(rings) != 1:
        raise ValueError("operation needs groups over a common ring")
    return rings.pop()


def cokernel(h: AbelianHom) -> tuple[FgAbelianGroup, AbelianHom]:
    """Canonical quotient of the codomain by the image, with its projection."""
    A, B = h.domain, h.codomain
    ring = _same_ring(A, B)
    rel = _hcat(h.matrix, B.relations(), nrows=B.ngens)
    Q, proj, _ = present(rel, B.ngens, ring)
    return Q, AbelianHom(B, Q, proj)


def subgroup_generated(A: FgAbelianGroup, gens: Sequence[Sequence[Scalar]]) -> tuple[FgAbelianGroup, AbelianHom]:
    """Canonical form of the subgroup spanned by ``gens`` with its inclusion."""
    gens = [A.normalize(g) for g in gens]
    g = len(gens)
    if g == 0:
        return FgAbelianGroup(0, (), A.ring), AbelianHom.zero(FgAbelianGroup(0, (), A.ring), A)
    gm = [[gens[j][i] for j in range(g)] for i in range(A.ngens)]
    null = _nullspace(_hcat(gm, A.relations(), nrows=A.ngens), g + len(A.torsion), A.ring)
    rz = [row for row in null[:g]]
    S, _, sect = present(rz, g, A.ring)
    incl = matmul(gm, sect, g) if A.ngens else []
    return S, AbelianHom(S, A, incl)


def image(h: AbelianHom) -> tuple[FgAbelianGroup, AbelianHom]:
    _same_ring(h.domain, h.codomain)
    return subgroup_generated(h.codomain, h.columns)


def kernel(h: AbelianHom) -> tuple[FgAbelianGroup, AbelianHom]:
    """Canonical kernel with its inclusion into the domain."""
    A, B = h.domain, h.codomain
    ring = _same_ring(A, B)
    if B.ngens == 0:
        return A, AbelianHom.identity(A)
    mat = _hcat(h.matrix, B.relations(), nrows=B.ngens)
    null = _nullspace(mat, A.ngens + len(B.torsion), ring)
    gens = [tuple(null[i][c] for i in range(A.ngens)) for c in range(len(null[0]) if null else 0)]
    return subgroup_generated(A, gens)


def preimage(h: AbelianHom, y: Sequence[Scalar]) -> Optional[Vector]:
    """Some x with h(x) = y, or None when y is outside the image."""
    A, B = h.domain, h.codomain
    ring = B.ring
    y = B.normalize(y)
    if B.ngens == 0:
        return A.zero()
    mat = _hcat(h.matrix, B.relations(), nrows=B.ngens)
    z = _solve(mat, A.ngens + len(B.torsion), y, ring)
    if z is None:
        return None
    return A.normalize(z[: A.ngens])


def factor_through(h: AbelianHom, g: AbelianHom) -> Optional[AbelianHom]:
    """f with h o f = g (unique when h is injective), or None."""
    if h.codomain != g.codomain:
        raise ValueError("factor_through needs a common codomain")
    cols = []
    for c in g.columns:
        x = preimage(h, c)
        if x is None:
            return None
        cols.append(x)
    return AbelianHom.from_columns(g.domain, h.domain, cols)


def direct_sum(A: FgAbelianGroup, B: FgAbelianGroup):
    """Canonical A + B with injections (iA, iB) and projections (pA, pB)."""
    ring = _same_ring(A, B)
    rel = _blockdiag(A.relations(), A.ngens, len(A.torsion), B.relations(), B.ngens, len(B.torsion))
    S, proj, sect = present(rel, A.ngens + B.ngens, ring)
    iA = AbelianHom(A, S, [row[: A.ngens] for row in proj])
    iB = AbelianHom(B, S, [row[A.ngens:] for row in proj])
    pA = AbelianHom(S, A, sect[: A.ngens])
    pB = AbelianHom(S, B, sect[A.ngens:])
    return S, (iA, iB), (pA, pB)


def pullback(f: AbelianHom, g: AbelianHom) -> tuple[FgAbelianGroup, AbelianHom, AbelianHom]:
    """Kernel of f pr1 - g pr2 on A + B, with its two projections."""
    if f.codomain != g.codomain:
        raise ValueError("pullback needs a common codomain")
    S, _, (pA, pB) = direct_sum(f.domain, g.domain)
    diff = f.compose(pA) - g.compose(pB)
    P, incl = kernel(diff)
    return P, pA.compose(incl), pB.compose(incl)


def is_exact(seq: Sequence[AbelianHom]) -> bool:
    """Image equals kernel at every interior node of the sequence."""
    for f, g in zip(seq, seq[1:]):
        if f.codomain != g.domain:
            raise ValueError("sequence is not composable")
    for f, g in zip(seq, seq[1:]):
        if not g.compose(f).is_zero():
            return False
        _, incl = kernel(g)
        if any(preimage(f, c) is None for c in incl.columns):
            return False
    return True


def is_short_exact(i: AbelianHom, q: AbelianHom) -> bool:
    return is_exact([i, q]) and i.is_injective() and q.is_surjective()


# --------------------------------------------------------------------------
# subgroups as spans

class AbelianSubgroup:
    """Subgroup of ``parent`` spanned by ``gens``; equality is equality of spans."""

    __slots__ = ("parent", "gens")

    def __init__(self, parent: FgAbelianGroup, gens: Iterable[Sequence[Scalar]] = ()):
        self.parent = parent
        self.gens = tuple(parent.normalize(g) for g in gens if any(parent.normalize(g)))

    @classmethod
    def whole(cls, A: FgAbelianGroup) -> AbelianSubgroup:
        return cls(A, [A.generator(i) for i in range(A.ngens)])

    @classmethod
    def trivial(cls, A: FgAbelianGroup) -> AbelianSubgroup:
        return cls(A, [])

    @classmethod
    def image_of(cls, h: AbelianHom) -> AbelianSubgroup:
        return cls(h.codomain, h.columns)

    def inclusion(self) -> tuple[FgAbelianGroup, AbelianHom]:
        return subgroup_generated(self.parent, self.gens)

    def group(self) -> FgAbelianGroup:
        return self.inclusion()[0]

    def _span_hom(self) -> AbelianHom:
        free_dom = FgAbelianGroup(len(self.gens), (), self.parent.ring)
        return AbelianHom.from_columns(free_dom, self.parent, self.gens)

    def __contains__(self, x) -> bool:
        x = self.parent.normalize(x)
        if not any(x):
            return True
        if not self.gens:
            return False
        return preimage(self._span_hom(), x) is not None

    def __le__(self, other: AbelianSubgroup) -> bool:
        return self.parent == other.parent and all(g in other for g in self.gens)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AbelianSubgroup):
            return NotImplemented
        return self <= other and other <= self

    __hash__ = None

    def is_trivial(self) -> bool:
        return not self.gens

    def is_whole(self) -> bool:
        return AbelianSubgroup.whole(self.parent) <= self

    def elements(self) -> set[Vector]:
        S, incl = self.inclusion()
        return {incl(x) for x in S.elements()}

    def __repr__(self):
        return f"AbelianSubgroup({self.parent}, gens={list(self.gens)})"


# --------------------------------------------------------------------------
# enumeration (brute-force oracles)

def hom_images(A: FgAbelianGroup, B: FgAbelianGroup) -> Iterator[tuple[Vector, ...]]:
    """All homomorphisms from finite A to finite B as tuples of generator images."""
    if not (A.is_finite and B.is_finite):
        raise ValueError("hom enumeration needs finite groups")
    choices = []
    elems = list(B.elements())
    for d in A.torsion:
        choices.append([b for b in elems if not any(B.scale(d, b))])
    return itertools.product(*choices)


def homs(A: FgAbelianGroup, B: FgAbelianGroup) -> Iterator[AbelianHom]:
    for imgs in hom_images(A, B):
        yield AbelianHom.from_columns(A, B, imgs)


def finite_abelian_groups(max_order: int, min_order: int = 1) -> list[FgAbelianGroup]:
    """Every finite abelian group (up to isomorphism) of order in range."""
    from sympy import factorint
    from sympy.utilities.iterables import partitions

    out = []
    for n in range(min_order, max_order + 1):
        per_prime = []
        for p, e in sorted(factorint(n).items()):
            opts = []
            for part in partitions(e):
                opts.append([p ** k for k, mult in part.items() for _ in range(mult)])
            per_prime.append(opts)
        for combo in itertools.product(*per_prime):
            out.append(FgAbelianGroup.from_invariants([q for c in combo for q in c]))
    return sorted(set(out), key=lambda G: (G.order(), G.torsion))
