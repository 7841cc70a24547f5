"""Maximal subgroups, transfer homomorphisms, and transfer patterns.

For a group G with elementary abelian rank-2 quotient G/G' there are p+1
maximal subgroups M_1..M_{p+1}.  The transfer target type lists the abelian
types of the M_i/M_i'; the transfer kernel type lists the kernels of the
transfer maps G -> M_i/M_i' as subspaces of G/G'.  Kernels are encoded in
the usual shorthand: 0 for the full quotient, i for the line belonging to
M_i, and an explicit basis otherwise.

Two orderings of the maximal subgroups are used.  When the metabelianization
is of coclass 1 and class >= 3 the distinguished two-step centralizer line
comes first and the remaining lines follow as x*y^(i-2); otherwise the
deterministic echelon-lex order of lines applies.  The ordering in force is
recorded on the pattern, and ``canonicalize`` removes the dependence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .linalg import AbelianQuotient, Subspace, enumerate_subspaces, inv_mod
from .pc import PcGroup, Subgroup

ABELIAN_BOUND_EXP = 7  # exponents in scope divide p^6; one power of headroom


@dataclass(frozen=True, order=True)
class AbelianType:
    """Finite abelian p-group type, descending exponent list."""

    p: int
    exps: tuple[int, ...]

    def __post_init__(self):
        if list(self.exps) != sorted(self.exps, reverse=True) or any(e < 1 for e in self.exps):
            raise ValueError("type exponents must be a descending positive list")

    @property
    def rank(self) -> int:
        return len(self.exps)

    def order_exponent(self) -> int:
        return sum(self.exps)

    def __str__(self) -> str:
        return "[%s]" % ",".join(str(self.p**e) for e in self.exps)


def compare_types(a: AbelianType, b: AbelianType) -> str:
    """Partial order by epimorphic images: "<=", ">=", "=", or "incomparable".

    b is a quotient of a iff the padded descending exponent lists satisfy
    b_i <= a_i for every i.
    """
    if a.p != b.p:
        raise ValueError("mixed primes")
    k = max(len(a.exps), len(b.exps))
    ea = a.exps + (0,) * (k - len(a.exps))
    eb = b.exps + (0,) * (k - len(b.exps))
    le = all(x <= y for x, y in zip(ea, eb))
    ge = all(x >= y for x, y in zip(ea, eb))
    if le and ge:
        return "="
    if le:
        return "<="
    if ge:
        return ">="
    return "incomparable"


@dataclass(frozen=True)
class KernelCode:
    """Kernel of one transfer as a code over the ordered lines N_1..N_{p+1}.

    kind: "full" (total kernel, shorthand 0), "line" (N_index, shorthand the
    1-based index), "trivial" (never occurs in scope, shorthand -1), or
    "subspace" for anything else in higher rank.
    """

    kind: str
    index: int = 0
    basis: tuple[tuple[int, ...], ...] = ()

    def shorthand(self) -> int:
        if self.kind == "full":
            return 0
        if self.kind == "line":
            return self.index
        if self.kind == "trivial":
            return -1
        raise ValueError("no integer shorthand for explicit subspace kernels")

    def sort_key(self) -> tuple:
        # lines sort before the full kernel so that fixed points move to the
        # front under canonicalization; trivial sorts last
        if self.kind == "line":
            return (0, self.index)
        if self.kind == "full":
            return (1, 0)
        if self.kind == "subspace":
            return (2, self.basis)
        return (3, 0)


@dataclass(frozen=True)
class MaximalSubgroup:
    group: PcGroup
    line: Subspace          # N_i = M_i/G' inside G/G'
    subgroup: Subgroup

    def index_in(self) -> int:
        return self.group.p


@dataclass(frozen=True)
class Transfer:
    """Transfer to one maximal subgroup, as data over M/M'.

    rows: image coordinates of the abelianization generators of G in the
    igs coordinates of M; quotient: the diagonalized M/M' used for kernel
    membership tests.
    """

    source: PcGroup
    target: MaximalSubgroup
    rows: tuple[tuple[int, ...], ...]
    quotient: AbelianQuotient


@dataclass(frozen=True)
class ArtinPattern:
    p: int
    ttt: tuple[AbelianType, ...]
    tkt: tuple[KernelCode, ...]
    kernels: tuple[Subspace, ...]       # raw kernel subspaces of G/G'
    lines: tuple[Subspace, ...]         # ordered lines N_1..N_{p+1}
    ordering: str                       # "standard" | "echelon" | "canonical"

    def kappa_shorthand(self) -> tuple[int, ...]:
        return tuple(k.shorthand() for k in self.tkt)

    def __str__(self) -> str:
        return format_pattern(self)


def format_pattern(ap: ArtinPattern) -> str:
    """Text form, e.g. ``tau=[[25,5,5,5],[5,5],...] kappa=(1,0,0,0,0,0)``."""
    tau = "[%s]" % ",".join(str(t) for t in ap.ttt)
    kappa = "(%s)" % ",".join(str(k.shorthand()) for k in ap.tkt)
    return "tau=%s kappa=%s" % (tau, kappa)


def parse_pattern(text: str, p: int = 5) -> tuple[tuple[AbelianType, ...], tuple[int, ...]]:
    """Parse the text form back into (types, kappa shorthand)."""
    text = text.strip()
    tau_part, kappa_part = text.split("kappa=")
    tau_part = tau_part.replace("tau=", "").strip()
    types = []
    for chunk in tau_part.strip("[]").split("],["):
        vals = [int(x) for x in chunk.strip("[]").split(",") if x]
        exps = []
        for v in vals:
            e = 0
            while v > 1:
                v //= p
                e += 1
            exps.append(e)
        types.append(AbelianType(p, tuple(sorted(exps, reverse=True))))
    kappa = tuple(int(x) for x in kappa_part.strip().strip("()").split(",") if x.strip() != "")
    return tuple(types), kappa


# -- maximal subgroups --------------------------------------------------------


def _ab_lines(G: PcGroup) -> list[Subspace]:
    """All lines of G/G' in echelon-lex order (elementary rank 2 only)."""
    q = G._ab_quotient
    d = q.group.n
    if d < 2:
        raise ValueError("group has cyclic abelianization; no rank-2 line system")
    if d > 2:
        raise ValueError("abelianization rank > 2 not supported for line systems")
    if any(v is not None and any(v) for v in q.group.pres.power):
        raise ValueError("abelianization is not elementary of rank 2")
    return list(enumerate_subspaces(2, 1, G.p))


def _line_subgroup(G: PcGroup, line: Subspace) -> Subgroup:
    """The maximal subgroup with image `line` in G/G'."""
    q = G._ab_quotient
    v = line.basis[0]
    rep = [0] * G.n
    for k, gi in enumerate(q.keep):
        rep[gi] = v[k]
    gens = [tuple(rep)] + list(G.derived_subgroup().igs)
    gens += [G.power_el(G.gen(i), G.p) for i in range(G.n)]  # Frattini part
    return Subgroup.generated(G, gens, normal_closure=True)


def metabelianization(G: PcGroup) -> PcGroup:
    if G.derived_length <= 2:
        return G
    return G.quotient(G.derived_series[2]).group


def two_step_centralizer(G: PcGroup) -> Subgroup:
    """chi_2(G): full preimage of the centralizer of gamma_2/gamma_4."""
    if G.nilpotency_class < 2:
        raise ValueError("two-step centralizer needs class >= 2")
    lcs = G.lower_central_series
    g2 = lcs[1]
    g4 = lcs[3] if len(lcs) > 3 else G.trivial_subgroup()
    if G.nilpotency_class == 2:
        return G.full_subgroup()
    passing = []
    for line in _ab_lines(G):
        M = _line_subgroup(G, line)
        rep = next(h for h in M.igs if not g2.contains(h))
        if all(g4.contains(G.commutator(u, rep)) for u in g2.igs):
            passing.append((line, M))
    if len(passing) == len(_ab_lines(G)):
        return G.full_subgroup()
    if len(passing) != 1:
        raise ValueError("two-step centralizer is not a single maximal subgroup")
    return passing[0][1]


def defect(G: PcGroup) -> int:
    """Defect of commutativity k with [gamma_2, chi_2] = gamma_{m-k}.

    For groups that are not themselves of coclass 1 the defect of the
    metabelianization is returned, provided that has coclass 1.
    """
    H = G if G.coclass == 1 else metabelianization(G)
    if H.coclass != 1:
        raise ValueError("defect needs a coclass-1 group or metabelianization")
    if H.nilpotency_class < 2:
        return 0
    m = H.order_exponent
    chi2 = two_step_centralizer(H)
    g2 = H.lower_central_series[1]
    comms = [H.commutator(u, v) for u in g2.igs for v in chi2.igs]
    C = Subgroup.generated(H, comms, normal_closure=True)
    lcs = H.lower_central_series
    for j, term in enumerate(lcs, start=1):
        if term.igs == C.igs:
            return m - j if term.order_exponent else 0
    raise ValueError("[gamma_2, chi_2] is not a lower central term")


def ordered_maximal_lines(G: PcGroup) -> tuple[list[Subspace], str]:
    """Lines of G/G' in the standard order when available, else echelon-lex.

    Standard order: N_1 is the two-step centralizer line of the
    metabelianization, pulled back; N_i = <x*y^(i-2)> for the echelon
    representative x of a fixed non-centralizer generator line.
    """
    lines = _ab_lines(G)
    H = metabelianization(G)
    if H.coclass == 1 and H.nilpotency_class >= 3:
        chi2 = two_step_centralizer(H)
        # pull the centralizer line back through the common abelianization
        hq = H._ab_quotient
        rep = next(h for h in chi2.igs if any(hq.project(h)))
        y_bar = hq.project(rep)
        c = next(x for x in y_bar if x)
        y_bar = tuple((x * inv_mod(c, G.p)) % G.p for x in y_bar)
        n1 = Subspace.from_vectors(G.p, 2, [y_bar])
        x_bar = None
        for i in (0, 1):
            cand = G.ab_coords(G.gen(i))
            if any(cand) and not n1.contains_vector(cand):
                c = next(x for x in cand if x)
                x_bar = tuple((x * inv_mod(c, G.p)) % G.p for x in cand)
                break
        if x_bar is not None:
            ordered = [n1]
            for j in range(G.p):
                v = tuple((a + j * b) % G.p for a, b in zip(x_bar, y_bar))
                ordered.append(Subspace.from_vectors(G.p, 2, [v]))
            if len({s.basis for s in ordered}) == G.p + 1:
                return ordered, "standard"
    return lines, "echelon"


def maximal_subgroups(G: PcGroup) -> list[MaximalSubgroup]:
    """The p+1 maximal subgroups in the pattern ordering."""
    lines, _ = ordered_maximal_lines(G)
    return [MaximalSubgroup(G, line, _line_subgroup(G, line)) for line in lines]


# -- transfers ----------------------------------------------------------------


def _subgroup_relation_rows(G: PcGroup, M: Subgroup) -> list[list[int]]:
    """Abelianized relation matrix of M in its igs coordinates."""
    m = len(M.igs)
    rows = []
    for i, h in enumerate(M.igs):
        c = M.coords(G.power_el(h, G.p))
        row = [-x for x in c]
        row[i] += G.p
        rows.append(row)
    for i2 in range(m):
        for i1 in range(i2):
            rows.append(M.coords(G.commutator(M.igs[i2], M.igs[i1])))
    return rows


def subgroup_abelian_type(G: PcGroup, M: Subgroup) -> AbelianType:
    rows = _subgroup_relation_rows(G, M)
    quo = AbelianQuotient(rows, G.p, len(M.igs), ABELIAN_BOUND_EXP)
    return AbelianType(G.p, tuple(quo.invariants()))


def artin_transfer(G: PcGroup, M: MaximalSubgroup) -> Transfer:
    """Transfer G -> M/M' by the right-transversal product formula."""
    p = G.p
    sub = M.subgroup
    t = next(G.gen(i) for i in range(G.n) if not sub.contains(G.gen(i)))
    reps = [G.power_el(t, i) for i in range(p)]
    rows = []
    q = G._ab_quotient
    for gi in q.keep:
        g = G.gen(gi)
        total = [0] * len(sub.igs)
        for r in reps:
            u = G.multiply(r, g)
            for r2 in reps:
                cand = G.multiply(u, G.inverse(r2))
                if sub.contains(cand):
                    for k, c in enumerate(sub.coords(cand)):
                        total[k] += c
                    break
            else:
                raise AssertionError("transversal does not cover the coset")
        rows.append(tuple(total))
    quo = AbelianQuotient(_subgroup_relation_rows(G, sub), p, len(sub.igs), ABELIAN_BOUND_EXP)
    return Transfer(G, M, tuple(rows), quo)


def transfer_kernel(G: PcGroup, tr: Transfer) -> Subspace:
    """Kernel of the transfer inside G/G' (rank 2), by direct search."""
    p = G.p
    vecs = []
    for a, b in itertools.product(range(p), repeat=2):
        if a == 0 and b == 0:
            continue
        img = [(a * x + b * y) for x, y in zip(tr.rows[0], tr.rows[1])]
        if tr.quotient.is_zero(img):
            vecs.append((a, b))
    return Subspace.from_vectors(p, 2, vecs)


def ttt(G: PcGroup) -> list[AbelianType]:
    return list(artin_pattern(G).ttt)


def tkt(G: PcGroup) -> list[KernelCode]:
    return list(artin_pattern(G).tkt)


def _kernel_code(ker: Subspace, lines: Sequence[Subspace]) -> KernelCode:
    if ker.dim == ker.ambient:
        return KernelCode("full")
    if ker.dim == 0:
        return KernelCode("trivial")
    if ker.dim == 1:
        for i, line in enumerate(lines, start=1):
            if line.basis == ker.basis:
                return KernelCode("line", index=i)
    return KernelCode("subspace", basis=ker.basis)


def artin_pattern(G: PcGroup) -> ArtinPattern:
    """Index-aligned TTT and TKT over the ordered maximal subgroups."""
    cached = getattr(G, "_artin_pattern", None)
    if cached is not None:
        return cached
    lines, ordering = ordered_maximal_lines(G)
    taus = []
    kernels = []
    for line in lines:
        M = MaximalSubgroup(G, line, _line_subgroup(G, line))
        tr = artin_transfer(G, M)
        taus.append(AbelianType(G.p, tuple(tr.quotient.invariants())))
        kernels.append(transfer_kernel(G, tr))
    codes = tuple(_kernel_code(k, lines) for k in kernels)
    ap = ArtinPattern(G.p, tuple(taus), codes, tuple(kernels), tuple(lines), ordering)
    G._artin_pattern = ap
    return ap


# -- canonical form and comparison -------------------------------------------


def canonicalize(ap: ArtinPattern) -> ArtinPattern:
    """Minimal representative under simultaneous index permutations.

    A permutation sigma relabels position i to sigma(i) and every line code
    j to sigma(j); the minimum is taken lexicographically on (kappa sort
    keys, tau exponent lists).  Fixed-point kernels stay fixed points, so
    kappa ~ (1,0,...) and kappa ~ (2,0,...) normalize to distinct forms.
    """
    m = len(ap.ttt)
    best = None
    best_data = None
    for perm in itertools.permutations(range(m)):
        new_tkt: list[Optional[KernelCode]] = [None] * m
        new_ttt: list[Optional[AbelianType]] = [None] * m
        new_kernels: list[Optional[Subspace]] = [None] * m
        new_lines: list[Optional[Subspace]] = [None] * m
        for i in range(m):
            code = ap.tkt[i]
            if code.kind == "line":
                code = KernelCode("line", index=perm[code.index - 1] + 1)
            new_tkt[perm[i]] = code
            new_ttt[perm[i]] = ap.ttt[i]
            new_kernels[perm[i]] = ap.kernels[i]
            new_lines[perm[i]] = ap.lines[i]
        key = (tuple(c.sort_key() for c in new_tkt), tuple(t.exps for t in new_ttt))
        if best is None or key < best:
            best = key
            best_data = (tuple(new_ttt), tuple(new_tkt), tuple(new_kernels), tuple(new_lines))
    assert best_data is not None
    return ArtinPattern(ap.p, best_data[0], best_data[1], best_data[2], best_data[3], "canonical")


def canonical_key(ap: ArtinPattern) -> tuple:
    c = canonicalize(ap)
    return (tuple(k.sort_key() for k in c.tkt), tuple(t.exps for t in c.ttt))


def pattern_equal(a: ArtinPattern, b: ArtinPattern) -> bool:
    return canonical_key(a) == canonical_key(b)


def compare_patterns(child: ArtinPattern, parent: ArtinPattern, alignment: Optional[Sequence[int]] = None) -> str:
    """Monotony verdict for a (child, parent) pair of patterns.

    alignment[i] is the parent index of child component i; by default the
    components are aligned by equality of their lines in the shared
    abelianization.  Returns "monotone" or a description of the violation.
    Monotone means tau(child) >= tau(parent) componentwise and every child
    kernel is contained in the aligned parent kernel.
    """
    m = len(child.ttt)
    if alignment is None:
        alignment = []
        for i, line in enumerate(child.lines):
            js = [j for j, l2 in enumerate(parent.lines) if l2.basis == line.basis]
            if len(js) != 1:
                raise ValueError("lines do not align between child and parent")
            alignment.append(js[0])
    if sorted(alignment) != list(range(m)):
        raise ValueError("alignment is not a bijection")
    for i in range(m):
        j = alignment[i]
        cmp = compare_types(child.ttt[i], parent.ttt[j])
        if cmp not in (">=", "="):
            return "tau violation at component %d: %s vs %s" % (i + 1, child.ttt[i], parent.ttt[j])
        if not parent.kernels[j].contains(child.kernels[i]):
            return "kappa violation at component %d" % (i + 1)
    return "monotone"
