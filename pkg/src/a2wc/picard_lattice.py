"""The lattice Pic = Z E0 + ... + Z E9 with the blow-up form, the E6^(1)
root data, reflections and the two diagram automorphisms.

Classes are plain tuples of 10 integers in the basis E0..E9.  Lattice maps
are 10x10 integer matrices acting on column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .exact_algebra import hermite_normal_form, rank

DIM = 10
PicClass = tuple[int, ...]
LatticeMap = tuple[tuple[int, ...], ...]

NODES = (0, 1, 2, 3, 4, 5, 6)
GENERATORS = ("w0", "w1", "w2", "w3", "w4", "w5", "w6", "s1", "s2")


def E(i: int) -> PicClass:
    v = [0] * DIM
    v[i] = 1
    return tuple(v)


def combo(*terms: tuple[int, int]) -> PicClass:
    """Build sum c*E_i from (c, i) pairs."""
    v = [0] * DIM
    for c, i in terms:
        v[i] += c
    return tuple(v)


def add(*classes: PicClass) -> PicClass:
    return tuple(sum(xs) for xs in zip(*classes))


def scale(c: int, d: PicClass) -> PicClass:
    return tuple(c * x for x in d)


def intersect(a: Sequence[int], b: Sequence[int]) -> int:
    return a[0] * b[0] - sum(x * y for x, y in zip(a[1:], b[1:]))


def _diff(i: int, j: int) -> PicClass:
    return combo((1, i), (-1, j))


ROOTS: dict[int, PicClass] = {
    1: _diff(2, 3),
    2: _diff(1, 2),
    3: combo((1, 0), (-1, 1), (-1, 4), (-1, 6)),
    4: _diff(6, 7),
    5: _diff(7, 8),
    6: _diff(4, 5),
    0: _diff(5, 9),
}

# exceptional-class indices of each difference root, used by the parameter
# dictionary and the point-index permutations
DIFFERENCE_ROOTS: dict[int, tuple[int, int]] = {1: (2, 3), 2: (1, 2), 4: (6, 7), 5: (7, 8), 6: (4, 5), 0: (5, 9)}

MARKS: dict[int, int] = {1: 1, 2: 2, 3: 3, 4: 2, 5: 1, 6: 2, 0: 1}

D0 = combo((1, 0), (-1, 4), (-1, 5), (-1, 9))
D1 = combo((1, 0), (-1, 1), (-1, 2), (-1, 3))
D2 = combo((1, 0), (-1, 6), (-1, 7), (-1, 8))
DELTA = add(D0, D1, D2)

# permutations of the exceptional indices 1..9 (index 0 is fixed)
SIGMA_PERMS: dict[str, dict[int, int]] = {
    "s1": {1: 4, 4: 1, 2: 5, 5: 2, 3: 9, 9: 3},
    "s2": {4: 6, 6: 4, 5: 7, 7: 5, 8: 9, 9: 8},
}


def reflect(root: Sequence[int], d: Sequence[int]) -> PicClass:
    """Reflection d + (d.root) root in a (-2)-class."""
    if intersect(root, root) != -2:
        raise ValueError(f"reflection needs a (-2)-class, got self-intersection {intersect(root, root)}")
    k = intersect(d, root)
    return tuple(x + k * r for x, r in zip(d, root))


def apply_map(m: LatticeMap, d: Sequence[int]) -> PicClass:
    return tuple(sum(m[i][j] * d[j] for j in range(DIM)) for i in range(DIM))


def compose(a: LatticeMap, b: LatticeMap) -> LatticeMap:
    """The map a after b."""
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(DIM)) for j in range(DIM)) for i in range(DIM)
    )


IDENTITY: LatticeMap = tuple(E(i) for i in range(DIM))


def from_images(images: Sequence[PicClass]) -> LatticeMap:
    """Matrix whose j-th column is the image of E_j."""
    return tuple(tuple(images[j][i] for j in range(DIM)) for i in range(DIM))


def reflection_map(node: int) -> LatticeMap:
    root = ROOTS[node]
    return from_images([reflect(root, E(j)) for j in range(DIM)])


def permutation_map(perm: dict[int, int]) -> LatticeMap:
    return from_images([E(perm.get(j, j)) for j in range(DIM)])


def diagram_automorphism(which: str) -> LatticeMap:
    return permutation_map(SIGMA_PERMS[_sigma_key(which)])


def _sigma_key(which: str) -> str:
    key = which.lower().replace("σ", "s").replace("sigma", "s")
    if key not in SIGMA_PERMS:
        raise ValueError(f"unknown diagram automorphism {which!r}")
    return key


def generator_map(gen: str) -> LatticeMap:
    g = gen.lower()
    if g.startswith("w"):
        return reflection_map(int(g[1:]))
    return diagram_automorphism(g)


def point_permutation(gen: str) -> dict[int, int] | None:
    """Permutation of the nine point indices induced by a generator.

    None for w3, which does not permute exceptional classes.
    """
    g = gen.lower()
    if g == "w3":
        return None
    if g.startswith("w"):
        a, b = DIFFERENCE_ROOTS[int(g[1:])]
        perm = {a: b, b: a}
    else:
        perm = dict(SIGMA_PERMS[g])
    return {i: perm.get(i, i) for i in range(1, DIM)}


def node_of(root: Sequence[int]) -> int | None:
    for n, r in ROOTS.items():
        if tuple(root) == r:
            return n
    return None


def induced_node_permutation(which: str) -> dict[int, int]:
    m = diagram_automorphism(which)
    out = {}
    for n in NODES:
        image = node_of(apply_map(m, ROOTS[n]))
        if image is None:
            raise ValueError(f"{which} does not permute the simple roots")
        out[n] = image
    return out


def adjacency() -> dict[tuple[int, int], int]:
    return {(i, j): intersect(ROOTS[i], ROOTS[j]) for i, j in combinations(NODES, 2)}


def joined(i: int, j: int) -> bool:
    return intersect(ROOTS[i], ROOTS[j]) == 1


def preserves_form(m: LatticeMap) -> bool:
    for i in range(DIM):
        for j in range(i, DIM):
            if intersect(apply_map(m, E(i)), apply_map(m, E(j))) != intersect(E(i), E(j)):
                return False
    return True


def determinant(m: LatticeMap) -> int:
    """Integer determinant by fraction-free elimination (Bareiss)."""
    a = [list(r) for r in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# Published table for the central reflection, for basis classes E1..E9
W3_TABLE: dict[int, PicClass] = {
    1: combo((1, 0), (-1, 4), (-1, 6)),
    4: combo((1, 0), (-1, 1), (-1, 6)),
    6: combo((1, 0), (-1, 1), (-1, 4)),
}


@dataclass
class CoxeterReport:
    adjacency: dict[str, int]
    node_permutations: dict[str, dict[str, int]]
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def failures(self) -> list[str]:
        return sorted(k for k, ok in self.checks.items() if not ok)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "adjacency": self.adjacency,
            "checks": len(self.checks),
            "failures": self.failures,
            "node_permutations": self.node_permutations,
            "ok": self.ok,
        }


def verify_coxeter() -> CoxeterReport:
    """Check the presentation of the extended affine Weyl group on Pic."""
    w = {n: reflection_map(n) for n in NODES}
    s = {k: diagram_automorphism(k) for k in SIGMA_PERMS}
    adj = adjacency()
    report = CoxeterReport(
        adjacency={f"{i}-{j}": v for (i, j), v in sorted(adj.items())},
        node_permutations={},
    )
    checks = report.checks
    for n in NODES:
        checks[f"w{n}^2=1"] = compose(w[n], w[n]) == IDENTITY
        checks[f"alpha{n}^2=-2"] = intersect(ROOTS[n], ROOTS[n]) == -2
    for (i, j), v in sorted(adj.items()):
        checks[f"alpha{i}.alpha{j} in (0,1)"] = v in (0, 1)
        wij = compose(w[i], w[j])
        if v == 1:
            checks[f"braid w{i} w{j}"] = compose(w[i], compose(w[j], w[i])) == compose(
                w[j], compose(w[i], w[j])
            )
        else:
            checks[f"commute w{i} w{j}"] = wij == compose(w[j], w[i])
    for k, sk in s.items():
        checks[f"{k}^2=1"] = compose(sk, sk) == IDENTITY
        perm = induced_node_permutation(k)
        report.node_permutations[k] = {str(a): b for a, b in sorted(perm.items())}
        for n in NODES:
            checks[f"{k} w{n} {k} = w{perm[n]}"] = compose(sk, compose(w[n], sk)) == w[perm[n]]
    gens = {f"w{n}": w[n] for n in NODES} | s
    for name, m in gens.items():
        checks[f"{name} preserves form"] = preserves_form(m)
        checks[f"{name} fixes delta"] = apply_map(m, DELTA) == DELTA
        checks[f"{name} unimodular"] = abs(determinant(m)) == 1
    marks = add(*(scale(MARKS[n], ROOTS[n]) for n in NODES))
    checks["delta = marked root sum"] = marks == DELTA
    return report


def w3_table_agreement() -> dict[int, bool]:
    """Compare the central reflection with the published table on E1..E9."""
    return {j: reflect(ROOTS[3], E(j)) == W3_TABLE.get(j, E(j)) for j in range(1, DIM)}


def root_lattice_basis() -> list[PicClass]:
    return [ROOTS[n] for n in NODES]


def triangle_lattice_basis() -> list[PicClass]:
    """Generators of the A2^(1) lattice spanned by the triangle classes."""
    return [D0, D1, D2]


def delta_perp_basis() -> list[PicClass]:
    """A Z-basis of the orthogonal complement of delta (HNF rows)."""
    # D.delta = 3 d0 - sum d_i; complement = kernel of (3, -1, ..., -1) in the
    # standard pairing; basis: E_i - E_{i+1} (i=1..8) and E0 - E1 - E2 - E3
    gens = [_diff(i, i + 1) for i in range(1, DIM - 1)] + [combo((1, 0), (-1, 1), (-1, 2), (-1, 3))]
    return [tuple(r) for r in hermite_normal_form(gens)]


def sublattice_report() -> dict[str, object]:
    """Ranks and HNF comparison for Q(E6^(1)) + Q(A2^(1)) and their intersection."""
    e6 = root_lattice_basis()
    a2 = triangle_lattice_basis()
    both = e6 + a2
    total = hermite_normal_form(both)
    perp = delta_perp_basis()
    rank_sum = rank(both)
    rank_e6 = rank(e6)
    rank_a2 = rank(a2)
    return {
        "rank_e6": rank_e6,
        "rank_a2": rank_a2,
        "rank_sum": rank_sum,
        "rank_intersection": rank_e6 + rank_a2 - rank_sum,
        "index_in_delta_perp": _hnf_volume(total) // _hnf_volume(perp),
        "delta_primitive": _gcd_all(DELTA) == 1,
        "sum_spans_pic": rank_sum == DIM,
        "delta_in_both": _in_span(e6, DELTA) and _in_span(a2, DELTA),
        "all_orthogonal_to_delta": all(intersect(v, DELTA) == 0 for v in both),
    }


def _hnf_volume(rows) -> int:
    """Product of HNF pivots: the covolume of a full-rank lattice in its span."""
    vol = 1
    for r in rows:
        vol *= next(x for x in r if x != 0)
    return abs(vol)


def _gcd_all(v) -> int:
    from math import gcd

    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def _in_span(basis: list[PicClass], v: PicClass) -> bool:
    return rank(basis) == rank(basis + [v])
