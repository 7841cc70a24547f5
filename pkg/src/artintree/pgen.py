"""The p-group generation algorithm.

Covering groups are built by the tails method: every non-defining relation
of a consistent weighted presentation receives one new central generator of
exponent p, the consistency conditions of the extended presentation give
F_p-linear dependencies among the tails, and the quotient by those
dependencies is the p-covering group.  The surviving tail space is the
p-multiplicator (its dimension is the relation rank); the nucleus is the
term lambda_{c+1} of the exponent-p central series of the cover, with c the
p-class of the base group.

Immediate descendants of step size s are quotients of the cover by
allowable subgroups (codimension-s subspaces U of the multiplicator with
U + nucleus = multiplicator), one per orbit under the action of the base
group's automorphisms on the multiplicator.  Automorphisms travel the tree
as generator-image tuples: stabilizer generators are produced by Schreier's
lemma on the orbit and lifted to the child, together with the d*s central
automorphisms of the new layer.

Identification of an externally supplied group walks its exponent-p series
quotients down the tree, recovering at each level the allowable subgroup as
the kernel of the induced map from the parent's multiplicator onto the next
layer, and looking up its orbit.  Labels have the form R-#s1;n1-#s2;n2-...
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .linalg import (
    FpMatrix,
    Subspace,
    enumerate_subspaces,
    identity_matrix,
    inv_mod,
    mat_inv,
    mat_mul,
    mat_vec_left,
    nullspace,
    rref_rows,
)
from .pc import (
    Definition,
    InconsistentPresentationError,
    PcGroup,
    PcPresentation,
    Subgroup,
    Vector,
    consistency_violations,
    vector_word,
)

AutTuple = tuple[Vector, ...]  # images of all generators


class NotInTreeError(ValueError):
    pass


# -- generic tuple evaluation -------------------------------------------------


def initial_generators(pres: PcPresentation) -> list[int]:
    return [i for i in range(pres.n) if i not in pres.definitions]


def evaluate_images(pres: PcPresentation, init: dict[int, Vector], target: PcGroup) -> list[Vector]:
    """Values of all generators in `target` from values of the initial ones.

    Defined generators are evaluated recursively through their definitions:
    for a relation lhs = prefix * a_g the value is prefix^-1 * lhs.
    """
    vals: list[Optional[Vector]] = [None] * pres.n
    for i, v in init.items():
        vals[i] = v
    for g in sorted(pres.definitions):
        d = pres.definitions[g]
        pref = target.identity()
        for k, c in enumerate(d.prefix):
            if c:
                if vals[k] is None:
                    raise ValueError("definition of %s uses unevaluated generator" % pres.names[g])
                pref = target.multiply(pref, target.power_el(vals[k], c))
        if d.kind == "pow":
            lhs = target.power_el(vals[d.i], pres.p)
        else:
            lhs = target.commutator(vals[d.j], vals[d.i])
        vals[g] = target.multiply(target.inverse(pref), lhs)
    missing = [i for i, v in enumerate(vals) if v is None]
    if missing:
        raise ValueError("generators %s have no definition and no supplied image" % missing)
    return vals  # type: ignore[return-value]


def apply_aut(G: PcGroup, imgs: AutTuple, v: Vector) -> Vector:
    out = G.identity()
    for k, c in enumerate(v):
        if c:
            out = G.multiply(out, G.power_el(imgs[k], c))
    return out


def compose_auts(G: PcGroup, first: AutTuple, then: AutTuple) -> AutTuple:
    """(first then `then`)(x) = then(first(x))."""
    return tuple(apply_aut(G, then, v) for v in first)


def aut_ab_matrix(G: PcGroup, imgs: AutTuple) -> tuple[tuple[int, ...], ...]:
    """Induced matrix on G/G' (rows = images of the kept generators)."""
    q = G._ab_quotient
    return tuple(tuple(q.project(imgs[gi])) for gi in q.keep)


def is_homomorphism_tuple(G: PcGroup, imgs: AutTuple) -> bool:
    pres = G.pres
    for rel in pres.relations():
        rhs = pres.relation_rhs(rel)
        target_rhs = G.identity() if rhs is None else apply_aut(G, imgs, rhs)
        if rel[0] == "pow":
            lhs = G.power_el(imgs[rel[1]], G.p)
        else:
            lhs = G.commutator(imgs[rel[1]], imgs[rel[2]])
        if lhs != target_rhs:
            return False
    return True


def is_automorphism_tuple(G: PcGroup, imgs: AutTuple) -> bool:
    """Endomorphism that is invertible on the Frattini quotient."""
    if not is_homomorphism_tuple(G, imgs):
        return False
    try:
        mat_inv(aut_ab_matrix(G, imgs), G.p)
    except ValueError:
        return False
    return True


# -- layer machinery (for automorphism inversion) ------------------------------


def _layer_data(G: PcGroup):
    data = getattr(G, "_layers", None)
    if data is not None:
        return data
    lam = G.lambda_series
    layers = []
    for t in range(len(lam) - 1):
        upper, lower = lam[t], lam[t + 1]
        lower_leads = set(lower._leads)
        merged = sorted(list(lower.igs) + [h for h in upper.igs if
                        next(i for i, x in enumerate(h) if x) not in lower_leads],
                        key=lambda h: next(i for i, x in enumerate(h) if x))
        sub = Subgroup(G, merged)
        positions = [k for k, h in enumerate(merged)
                     if next(i for i, x in enumerate(h) if x) not in lower_leads]
        basis = [merged[k] for k in positions]
        layers.append((sub, positions, basis))
    G._layers = layers
    return layers


def invert_aut(G: PcGroup, imgs: AutTuple) -> AutTuple:
    """Inverse automorphism by successive approximation along the lambda layers."""
    layers = _layer_data(G)
    p = G.p
    # matrices of the action on each layer, with inverses
    mats = []
    for sub, positions, basis in layers:
        rows = []
        for b in basis:
            c = sub.coords(apply_aut(G, imgs, b))
            rows.append(tuple(c[k] % p for k in positions))
        mats.append(mat_inv(rows, p))
    out = []
    for gi in range(G.n):
        target = G.gen(gi)
        Y = G.identity()
        for (sub, positions, basis), minv in zip(layers, mats):
            D = G.multiply(G.inverse(apply_aut(G, imgs, Y)), target)
            if not any(D):
                break
            coords_full = sub.coords(D)  # raises if D escapes the layer subgroup
            d = [coords_full[k] % p for k in positions]
            c = mat_vec_left(d, minv, p)
            for b, ck in zip(basis, c):
                if ck:
                    Y = G.multiply(Y, G.power_el(b, ck))
        assert apply_aut(G, imgs, Y) == target, "automorphism inversion failed"
        out.append(Y)
    return tuple(out)


# -- covering groups -----------------------------------------------------------


@dataclass
class CoveringData:
    """p-covering group of `base` with multiplicator and nucleus data.

    cover generators: the base generators followed by mult_dim tail
    generators (central, exponent p).  rel_tails[c] is the relation slot of
    the base presentation whose tail survived as cover generator base.n + c.
    The nucleus is a subspace of the tail coordinate space.
    """

    base: PcGroup
    cover: PcGroup
    rel_tails: list[tuple]
    mult_dim: int
    nucleus: Subspace

    @property
    def nuclear_rank(self) -> int:
        return self.nucleus.dim


def p_covering_group(G: PcGroup) -> CoveringData:
    cached = getattr(G, "_covering", None)
    if cached is not None:
        return cached
    pres = G.pres
    p, n = pres.p, pres.n
    nondefs = [rel for rel in pres.relations() if not pres.is_definition(rel)]
    q = len(nondefs)
    N = n + q
    pclass = G.p_class

    def ext(v: Optional[Vector], tail: Optional[int]) -> Optional[tuple]:
        base = list(v) + [0] * q if v is not None else [0] * N
        if tail is not None:
            base[n + tail] = 1
        return tuple(base) if any(base) else None

    power: dict[int, tuple] = {}
    comm: dict[tuple[int, int], tuple] = {}
    tail_of: dict[tuple, int] = {rel: t for t, rel in enumerate(nondefs)}
    for rel in pres.relations():
        t = tail_of.get(rel)
        rhs = ext(pres.relation_rhs(rel), t)
        if rhs is None:
            continue
        if rel[0] == "pow":
            power[rel[1]] = rhs
        else:
            comm[(rel[1], rel[2])] = rhs
    names = list(pres.names) + ["t%d" % (t + 1) for t in range(q)]
    weights = list(pres.weights) + [pclass + 1] * q
    defs = {g: Definition(d.kind, d.i, d.j, tuple(d.prefix) + (0,) * q)
            for g, d in pres.definitions.items()}
    big = PcPresentation(p, N, power=power, comm=comm, weights=weights, names=names, definitions=defs)
    # dependencies among tails from the consistency conditions
    deps = []
    for desc, nf1, nf2 in consistency_violations(big, gens=range(n)):
        if nf1[:n] != nf2[:n]:
            raise InconsistentPresentationError(
                "base presentation is inconsistent at overlap %r" % (desc,))
        deps.append([(a - b) % p for a, b in zip(nf1[n:], nf2[n:])])
    if deps:
        dep_rows, dep_pivots = rref_rows(deps, p)
        dep_rows = [r for r in dep_rows if any(r)]
    else:
        dep_rows, dep_pivots = [], []
    survivors = [t for t in range(q) if t not in dep_pivots]
    pos = {t: k for k, t in enumerate(survivors)}
    d2 = len(survivors)

    def subst_tail(tv: Sequence[int]) -> list[int]:
        out = [0] * d2
        v = list(tv)
        for row, piv in zip(dep_rows, dep_pivots):
            c = v[piv]
            if c:
                # t_piv = -sum(row[j] t_j, j != piv)
                v[piv] = 0
                for j in range(q):
                    if j != piv and row[j]:
                        v[j] = (v[j] - c * row[j]) % p
        for t in survivors:
            out[pos[t]] = v[t] % p
        return out

    def remap(v: Optional[tuple]) -> Optional[tuple]:
        if v is None:
            return None
        out = list(v[:n]) + subst_tail(v[n:])
        return tuple(out) if any(out) else None

    power2: dict[int, tuple] = {}
    comm2: dict[tuple[int, int], tuple] = {}
    for i, v in power.items():
        w = remap(v)
        if w is not None:
            power2[i] = w
    for ji, v in comm.items():
        w = remap(v)
        if w is not None:
            comm2[ji] = w
    names2 = list(pres.names) + ["t%d" % (k + 1) for k in range(d2)]
    weights2 = list(pres.weights) + [pclass + 1] * d2
    defs2 = {g: Definition(d.kind, d.i, d.j, tuple(d.prefix) + (0,) * d2)
             for g, d in pres.definitions.items()}
    rel_tails = []
    for k, t in enumerate(survivors):
        rel = nondefs[t]
        rhs0 = pres.relation_rhs(rel)
        prefix = tuple(rhs0) + (0,) * d2 if rhs0 is not None else (0,) * (n + d2)
        g = n + k
        if rel[0] == "pow":
            defs2[g] = Definition("pow", i=rel[1], prefix=prefix)
        else:
            defs2[g] = Definition("comm", i=rel[2], j=rel[1], prefix=prefix)
        rel_tails.append(rel)
    cover = PcGroup(PcPresentation(p, n + d2, power=power2, comm=comm2,
                                   weights=weights2, names=names2, definitions=defs2))
    # nucleus: lambda_{c+1} of the cover, inside the tail space
    lam = cover.lambda_series
    if len(lam) > pclass:
        nuc_sub = lam[pclass]
        rows = []
        for h in nuc_sub.igs:
            assert not any(h[:n]), "nucleus escapes the multiplicator"
            rows.append(h[n:])
        nucleus = Subspace.from_vectors(p, d2, rows)
    else:
        nucleus = Subspace.zero(p, d2)
    data = CoveringData(G, cover, rel_tails, d2, nucleus)
    G._covering = data
    return data


def multiplicator_rank(G: PcGroup) -> int:
    """The p-multiplicator rank d2 (= relation rank)."""
    if G.n == 0:
        return 0
    return p_covering_group(G).mult_dim


def nuclear_rank(G: PcGroup) -> int:
    if G.n == 0:
        return 0
    return p_covering_group(G).nuclear_rank


def is_capable(G: PcGroup) -> bool:
    return nuclear_rank(G) >= 1


def allowable_subgroups(cov: CoveringData, s: int) -> Iterator[Subspace]:
    """Codimension-s subspaces U of the multiplicator with U + nucleus = all.

    Deterministic echelon-lex order.  Empty for s > nuclear rank.
    """
    if s < 1 or s > cov.nuclear_rank:
        return
    d2 = cov.mult_dim
    for U in enumerate_subspaces(d2, s, cov.base.p):
        if U.sum(cov.nucleus).dim == d2:
            yield U


# -- extension of automorphisms to the cover -----------------------------------


@dataclass
class ExtendedAut:
    imgs: AutTuple                       # on the base group
    cover_imgs: AutTuple                 # on the cover
    mult_matrix: tuple[tuple[int, ...], ...]   # action on the multiplicator (rows)
    ab_matrix: tuple[tuple[int, ...], ...]     # action on G/G'


def extend_aut(cov: CoveringData, imgs: AutTuple) -> ExtendedAut:
    base, cover = cov.base, cov.cover
    n, d2 = base.n, cov.mult_dim
    init = {}
    for i in initial_generators(base.pres):
        init[i] = tuple(imgs[i]) + (0,) * d2
    vals = evaluate_images(cover.pres, init, cover)
    rows = []
    for c in range(d2):
        v = vals[n + c]
        assert not any(v[:n]), "multiplicator image escapes the tail space"
        rows.append(tuple(v[n:]))
    return ExtendedAut(imgs, tuple(vals), tuple(rows), aut_ab_matrix(base, imgs))


# -- orbits of allowable subgroups ---------------------------------------------


@dataclass
class Orbit:
    counter: int                 # 1-based, in first-seen (lex) order
    rep: Subspace
    size: int
    sigma: bool                  # the child admits a GI-automorphism


@dataclass
class OrbitTable:
    step: int
    orbits: list[Orbit]
    point: dict[tuple, int]                       # basis key -> orbit index (0-based)
    forest: dict[tuple, tuple[int, Optional[tuple]]]   # key -> (gen idx, parent key)
    allowable_count: int


def _gl2_contains_minus_identity(p: int, bmats: Sequence[tuple]) -> bool:
    minus = tuple(tuple((-1 if i == j else 0) % p for j in range(2)) for i in range(2))
    ident = identity_matrix(2)
    gens = sorted({tuple(tuple(r) for r in b) for b in bmats})
    if minus in gens:
        return True
    seen = {ident}
    frontier = [ident]
    while frontier:
        m = frontier.pop()
        for g in gens:
            nm = mat_mul(m, g, p)
            if nm == minus:
                return True
            if nm not in seen:
                seen.add(nm)
                frontier.append(nm)
    return False


def compute_orbit_table(cov: CoveringData, exts: Sequence[ExtendedAut], s: int) -> OrbitTable:
    p = cov.base.p
    subspaces = list(allowable_subgroups(cov, s))
    index = {U.basis: U for U in subspaces}
    point: dict[tuple, int] = {}
    forest: dict[tuple, tuple[int, Optional[tuple]]] = {}
    pair_t: dict[tuple, tuple[tuple, tuple]] = {}
    orbits: list[Orbit] = []
    amats = [e.mult_matrix for e in exts]
    bmats = [e.ab_matrix for e in exts]
    for U in subspaces:
        key = U.basis
        if key in point:
            continue
        oi = len(orbits)
        point[key] = oi
        forest[key] = (-1, None)
        pair_t[key] = (identity_matrix(cov.mult_dim), identity_matrix(2))
        frontier = [U]
        members = [U]
        while frontier:
            V = frontier.pop()
            kV = V.basis
            tA, tB = pair_t[kV]
            for gi, (A, B) in enumerate(zip(amats, bmats)):
                W = V.apply_matrix(A)
                kW = W.basis
                if kW not in point:
                    point[kW] = oi
                    forest[kW] = (gi, kV)
                    pair_t[kW] = (mat_mul(tA, A, p), mat_mul(tB, B, p))
                    frontier.append(W)
                    members.append(W)
        # Schreier generators at the matrix-pair level decide the sigma flag
        schreier_b = set()
        for V in members:
            kV = V.basis
            tA, tB = pair_t[kV]
            for gi, (A, B) in enumerate(zip(amats, bmats)):
                kW = V.apply_matrix(A).basis
                wA, wB = pair_t[kW]
                sb = mat_mul(mat_mul(tB, B, p), mat_inv(wB, p), p)
                schreier_b.add(sb)
        sigma = _gl2_contains_minus_identity(p, sorted(schreier_b))
        orbits.append(Orbit(len(orbits) + 1, U, len(members), sigma))
    return OrbitTable(s, orbits, point, forest, len(subspaces))


# -- children -------------------------------------------------------------------


def _tail_substitution(cov: CoveringData, U: Subspace):
    """Map of tail coordinate vectors to the child's surviving tail coordinates."""
    pivots = U.pivots()
    survivors = [c for c in range(cov.mult_dim) if c not in pivots]
    pos = {c: k for k, c in enumerate(survivors)}
    p = cov.base.p

    def subst(tv: Sequence[int]) -> list[int]:
        red = U.reduce_vector(tv)
        return [red[c] % p for c in survivors]

    return survivors, subst


def child_from_subspace(cov: CoveringData, U: Subspace) -> PcGroup:
    """The immediate descendant cover/U, as a consistent pc group."""
    base, cover = cov.base, cov.cover
    p, n = base.p, base.n
    s = cov.mult_dim - U.dim
    survivors, subst = _tail_substitution(cov, U)

    def remap(v: Optional[Vector]) -> Optional[tuple]:
        if v is None:
            return None
        out = list(v[:n]) + subst(v[n:])
        return tuple(out) if any(out) else None

    power: dict[int, tuple] = {}
    comm: dict[tuple[int, int], tuple] = {}
    for i, v in enumerate(cover.pres.power):
        w = remap(v)
        if w is not None:
            power[i] = w
    for j in range(cover.n):
        for i in range(j):
            w = remap(cover.pres.comm[j][i])
            if w is not None:
                if j >= n and any(w):
                    raise AssertionError("tail generators must stay central")
                comm[(j, i)] = w
    names = list(base.pres.names) + ["g%d" % (n + k + 1) for k in range(s)]
    weights = list(base.pres.weights) + [base.p_class + 1] * s
    defs: dict[int, Definition] = {}
    for g, d in base.pres.definitions.items():
        defs[g] = Definition(d.kind, d.i, d.j, tuple(d.prefix) + (0,) * s)
    for k, c in enumerate(survivors):
        rel = cov.rel_tails[c]
        rhs0 = cov.base.pres.relation_rhs(rel)
        # prefix: the base part plus any other surviving tails of the image
        full = remap(tuple(rhs0) + (0,) * cov.mult_dim if rhs0 is not None else
                     (0,) * (n + cov.mult_dim))
        pref = list(full) if full is not None else [0] * (n + s)
        if pref[n + k] != 1:
            raise AssertionError("surviving tail lost its unit coefficient")
        pref[n + k] = 0
        if any(pref[n + k:]):
            raise AssertionError("tail definition has support after the defined generator")
        g = n + k
        if rel[0] == "pow":
            defs[g] = Definition("pow", i=rel[1], prefix=tuple(pref))
        else:
            defs[g] = Definition("comm", i=rel[2], j=rel[1], prefix=tuple(pref))
    child = PcGroup(PcPresentation(p, n + s, power=power, comm=comm,
                                   weights=weights, names=names, definitions=defs))
    return child


def project_to_child(cov: CoveringData, U: Subspace, v: Vector) -> Vector:
    n = cov.base.n
    _, subst = _tail_substitution(cov, U)
    return tuple(list(v[:n]) + subst(v[n:]))


def central_aut_tuples(child: PcGroup, d: int, s: int) -> list[AutTuple]:
    """Automorphisms a_j -> a_j * z over the new layer, identity elsewhere."""
    n = child.n
    out = []
    init_ids = initial_generators(child.pres)
    for j in init_ids[:d]:
        for t in range(s):
            init = {}
            for i in init_ids:
                v = list(child.gen(i))
                if i == j:
                    v[n - s + t] = 1
                init[i] = tuple(v)
            out.append(tuple(evaluate_images(child.pres, init, child)))
    return out


# -- the descendant tree ---------------------------------------------------------


def gl2_generator_matrices(p: int) -> list[tuple[tuple[int, ...], ...]]:
    """Generators of GL(2, p): a transvection, a diagonal torus part, a swap."""
    prim = _primitive_root(p)
    return [
        ((1, 1), (0, 1)),
        ((prim, 0), (0, 1)),
        ((0, 1), (1, 0)),
    ]


def _primitive_root(p: int) -> int:
    for g in range(2, p):
        seen = set()
        x = 1
        for _ in range(p - 1):
            x = x * g % p
            seen.add(x)
        if len(seen) == p - 1:
            return g
    raise ValueError("no primitive root found")


def root_aut_tuples(root: PcGroup) -> list[AutTuple]:
    if root.n != 2 or root.nilpotency_class > 1:
        raise ValueError("the tree root must be elementary abelian of rank 2")
    out = []
    for m in gl2_generator_matrices(root.p):
        out.append((tuple(m[0]), tuple(m[1])))
    return out


@dataclass
class DescendantEntry:
    counter: int
    step: int
    orbit_size: int
    rep: Subspace
    group: PcGroup
    sigma: bool
    ab_matches_root: bool


@dataclass
class DescendantBatch:
    parent_label: str
    step: int
    entries: list[DescendantEntry]
    allowable_count: int


class TreeNode:
    def __init__(self, label: str, group: PcGroup, aut: Optional[list[AutTuple]]):
        self.label = label
        self.group = group
        self.aut = aut
        self._exts: Optional[list[ExtendedAut]] = None
        self.orbit_tables: dict[int, OrbitTable] = {}
        self.children: dict[tuple[int, int], str] = {}

    def covering(self) -> CoveringData:
        return p_covering_group(self.group)

    def extended_auts(self) -> list[ExtendedAut]:
        if self._exts is None:
            if self.aut is None:
                raise ValueError("node %s has no automorphism data" % self.label)
            cov = self.covering()
            self._exts = [extend_aut(cov, a) for a in self.aut]
        return self._exts


class GenerationTree:
    """Cache of expansions of the descendant tree of an elementary [p,p] root."""

    def __init__(self, root: PcGroup, root_aut: Optional[list[AutTuple]] = None):
        self.p = root.p
        self.root = root
        aut = root_aut if root_aut is not None else root_aut_tuples(root)
        self.nodes: dict[str, TreeNode] = {"R": TreeNode("R", root, aut)}

    def node(self, label: str) -> TreeNode:
        return self.nodes[label]

    def orbits(self, node: TreeNode, s: int) -> OrbitTable:
        table = node.orbit_tables.get(s)
        if table is None:
            table = compute_orbit_table(node.covering(), node.extended_auts(), s)
            node.orbit_tables[s] = table
        return table

    def child_label(self, node: TreeNode, s: int, counter: int) -> str:
        return "%s-#%d;%d" % (node.label, s, counter)

    def expand(self, node: TreeNode, s: int) -> DescendantBatch:
        """All step-s descendants of a node, orbit by orbit, with children realized."""
        cov = node.covering()
        table = self.orbits(node, s)
        entries = []
        root_ab = tuple(sorted((1, 1), reverse=True))
        for orb in table.orbits:
            label = self.child_label(node, s, orb.counter)
            if label in self.nodes:
                child = self.nodes[label].group
            else:
                child = child_from_subspace(cov, orb.rep)
                self.nodes[label] = TreeNode(label, child, None)
            node.children[(s, orb.counter)] = label
            ab = _abelian_type_of(child)
            entries.append(DescendantEntry(orb.counter, s, orb.size, orb.rep, child,
                                           orb.sigma, ab == root_ab))
        return DescendantBatch(node.label, s, entries, table.allowable_count)

    # -- automorphism realization ------------------------------------------

    def _transversal_tuple(self, node: TreeNode, table: OrbitTable, key: tuple,
                           cache: dict[tuple, AutTuple]) -> AutTuple:
        if key in cache:
            return cache[key]
        gi, parent = table.forest[key]
        if parent is None:
            t = tuple(node.group.gen(i) for i in range(node.group.n))
        else:
            prev = self._transversal_tuple(node, table, parent, cache)
            t = compose_auts(node.group, prev, node.aut[gi])
        cache[key] = t
        return t

    def stabilizer_tuples(self, node: TreeNode, s: int, counter: int) -> list[AutTuple]:
        """Schreier generators of the stabilizer of the orbit representative."""
        G = node.group
        table = self.orbits(node, s)
        oi = counter - 1
        members = [k for k, v in table.point.items() if v == oi]
        cache: dict[tuple, AutTuple] = {}
        inv_cache: dict[tuple, AutTuple] = {}
        exts = node.extended_auts()
        out: dict[AutTuple, None] = {}
        identity = tuple(G.gen(i) for i in range(G.n))
        for key in members:
            U = Subspace(self.p, table.orbits[oi].rep.ambient, key)
            tV = self._transversal_tuple(node, table, key, cache)
            for gi, ext in enumerate(exts):
                W = U.apply_matrix(ext.mult_matrix)
                kW = W.basis
                if kW not in inv_cache:
                    tW = self._transversal_tuple(node, table, kW, cache)
                    inv_cache[kW] = invert_aut(G, tW)
                sigma = compose_auts(G, compose_auts(G, tV, node.aut[gi]), inv_cache[kW])
                if sigma != identity:
                    out[sigma] = None
        return list(out)

    def child_aut_tuples(self, node: TreeNode, s: int, counter: int) -> list[AutTuple]:
        """AutData for a child: lifted stabilizer generators plus central maps."""
        cov = node.covering()
        table = self.orbits(node, s)
        rep = table.orbits[counter - 1].rep
        child_label = self.child_label(node, s, counter)
        child = self.nodes[child_label].group
        lifted: dict[AutTuple, None] = {}
        n = node.group.n
        survivors, _ = _tail_substitution(cov, rep)
        child_gen_sources = list(range(n)) + [n + c for c in survivors]
        for sigma in self.stabilizer_tuples(node, s, counter):
            ext = extend_aut(cov, sigma)
            imgs = tuple(project_to_child(cov, rep, ext.cover_imgs[src])
                         for src in child_gen_sources)
            lifted[imgs] = None
        d = len(initial_generators(node.group.pres)) or node.group.n
        for c in central_aut_tuples(child, d, child.n - n):
            lifted[c] = None
        identity = tuple(child.gen(i) for i in range(child.n))
        lifted.pop(identity, None)
        return list(lifted)

    def ensure_aut(self, label: str) -> None:
        """Realize AutData for a node by lifting from its parent."""
        node = self.nodes[label]
        if node.aut is not None:
            return
        parent_label, tail = label.rsplit("-#", 1)
        s, counter = (int(x) for x in tail.split(";"))
        self.ensure_aut(parent_label)
        parent = self.nodes[parent_label]
        node.aut = self.child_aut_tuples(parent, s, counter)

    # -- identification ------------------------------------------------------

    def identify(self, h: PcGroup) -> str:
        """Orbit-path label of h inside this tree; NotInTreeError otherwise."""
        if h.p != self.p:
            raise NotInTreeError("prime mismatch")
        if _abelian_type_of(h) != (1, 1):
            raise NotInTreeError("abelianization does not match the root type [p,p]")
        lam = h.lambda_series
        cls = len(lam) - 1
        init_ids = None
        for i, j in itertools.combinations(range(h.n), 2):
            try:
                mat_inv([h.ab_coords(h.gen(i)), h.ab_coords(h.gen(j))], self.p)
                init_ids = (i, j)
                break
            except ValueError:
                continue
        if init_ids is None:
            raise NotInTreeError("could not find an independent generating pair")
        B = [h.gen(init_ids[0]), h.gen(init_ids[1])]
        node = self.nodes["R"]
        label = "R"
        for t in range(1, cls):
            quot = h.quotient(lam[t + 1])
            Q = quot.group
            z_rows = [quot.project(v) for v in lam[t].igs]
            Z = Subgroup.generated(Q, [r for r in z_rows if any(r)])
            s = Z.order_exponent
            cov = p_covering_group(node.group)
            if cov.mult_dim == 0:
                raise NotInTreeError("node %s is terminal but the walk continues" % label)
            n = node.group.n
            qB = [quot.project(b) for b in B]
            init = {}
            for i, gi in enumerate(initial_generators(node.group.pres)):
                init[gi] = qB[i]
            vals = evaluate_images(cov.cover.pres, init, Q)
            rows = []
            for c in range(cov.mult_dim):
                v = vals[n + c]
                if not Z.contains(v):
                    raise NotInTreeError("next-layer image escapes the layer at %s" % label)
                rows.append(tuple(x % self.p for x in Z.coords(v)))
            U = nullspace(FpMatrix.make(self.p, list(zip(*rows))))
            if U.dim != cov.mult_dim - s:
                raise NotInTreeError("kernel has wrong dimension at %s" % label)
            if U.sum(cov.nucleus).dim != cov.mult_dim:
                raise NotInTreeError("kernel is not allowable at %s" % label)
            table = self.orbits(node, s)
            oi = table.point.get(U.basis)
            if oi is None:
                raise NotInTreeError("kernel is outside every orbit at %s" % label)
            counter = table.orbits[oi].counter
            # move the marking tuple through the transversal
            cache: dict[tuple, AutTuple] = {}
            alpha = self._transversal_tuple(node, table, U.basis, cache)
            node_vals = evaluate_images(node.group.pres,
                                        {gi: B[i] for i, gi in enumerate(initial_generators(node.group.pres))},
                                        h)
            newB = []
            for j in initial_generators(node.group.pres):
                img = h.identity()
                for k, c in enumerate(alpha[j]):
                    if c:
                        img = h.multiply(img, h.power_el(node_vals[k], c))
                newB.append(img)
            B = newB
            self.expand(node, s)  # ensure children exist
            label = self.child_label(node, s, counter)
            node = self.nodes[label]
        if node.group.n != h.n:
            raise NotInTreeError("walk ended at the wrong order")
        return label


def _abelian_type_of(G: PcGroup) -> tuple[int, ...]:
    """Abelianization type exponents (descending) of a pc group."""
    from .linalg import AbelianQuotient

    q = G._ab_quotient
    qq = q.group
    rows = []
    for i in range(qq.n):
        v = qq.pres.power[i]
        row = [0] * qq.n if v is None else [-x for x in v]
        row[i] += qq.p
        rows.append(row)
    return tuple(AbelianQuotient(rows, qq.p, qq.n, 8).invariants())


def descendants(G: PcGroup, aut: Sequence[AutTuple], s: int) -> DescendantBatch:
    """Standalone immediate-descendant computation for one step size."""
    cov = p_covering_group(G)
    exts = [extend_aut(cov, a) for a in aut]
    table = compute_orbit_table(cov, exts, s)
    entries = []
    for orb in table.orbits:
        child = child_from_subspace(cov, orb.rep)
        entries.append(DescendantEntry(orb.counter, s, orb.size, orb.rep, child,
                                       orb.sigma, _abelian_type_of(child) == (1, 1)))
    return DescendantBatch("<anonymous>", s, entries, table.allowable_count)


def is_sigma_group(G: PcGroup, aut: Sequence[AutTuple]) -> bool:
    """Whether the automorphisms contain one inverting G/G'."""
    bmats = [aut_ab_matrix(G, a) for a in aut]
    return _gl2_contains_minus_identity(G.p, bmats)
