"""Weighted polycyclic power-commutator presentations and collection.

A presentation on generators a_1..a_n over a prime p stores, for each i, the
normal word for a_i^p supported on generators of index > i, and for each
j > i the normal word for [a_j, a_i] supported on indexes > j.  Elements are
normal forms a_1^{e_1}...a_n^{e_n}, represented as plain tuples of exponents
in [0, p).  Collection from the left brings arbitrary words to normal form;
termination needs only the triangularity of the relations.

Conventions: generator indexes are 0-based internally, 1-based (a1..an) in
the text format.  Commutators are [a, b] = a^-1 b^-1 a b, so the swap rule
reads a_j a_i = a_i a_j [a_j, a_i].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

from .linalg import inv_mod, is_prime

Vector = tuple[int, ...]
Word = tuple[tuple[int, int], ...]  # ((gen, exp), ...)


class InconsistentPresentationError(ValueError):
    pass


class NotInSubgroupError(ValueError):
    pass


def vector_word(v: Sequence[int]) -> Word:
    """Syllables of a normal form, ascending generator index."""
    return tuple((i, e) for i, e in enumerate(v) if e)


def inverse_word(w: Word) -> Word:
    return tuple((g, -e) for g, e in reversed(w))


@dataclass(frozen=True)
class Definition:
    """How a non-initial generator arises from earlier ones.

    kind "pow":  a_i^p = prefix * a_gen      (j unused)
    kind "comm": [a_j, a_i] = prefix * a_gen

    prefix is a normal vector supported on generators of index < gen; the
    defined generator occurs with exponent exactly 1.
    """

    kind: str
    i: int
    j: int = -1
    prefix: Vector = ()


class PcPresentation:
    """Consistent-by-contract weighted pc presentation.

    Invariants enforced at construction: entries reduced mod p, power words
    supported strictly after their generator, commutator words strictly after
    the larger generator, definitions well formed.  Consistency itself is a
    separate check (``consistency_violations``).
    """

    __slots__ = (
        "p", "n", "weights", "names", "power", "comm", "definitions",
        "_pow_word", "_comm_word", "_noncomm_above",
    )

    def __init__(
        self,
        p: int,
        n: int,
        power: dict[int, Sequence[int]] | Sequence[Optional[Sequence[int]]] = (),
        comm: dict[tuple[int, int], Sequence[int]] | None = None,
        weights: Sequence[int] | None = None,
        names: Sequence[str] | None = None,
        definitions: dict[int, Definition] | None = None,
    ):
        if not is_prime(p):
            raise ValueError("p = %r is not prime" % (p,))
        self.p = p
        self.n = n
        pw: list[Optional[Vector]] = [None] * n
        if isinstance(power, dict):
            for i, v in power.items():
                pw[i] = self._norm_vec(v)
        else:
            for i, v in enumerate(power):
                if v is not None:
                    pw[i] = self._norm_vec(v)
        cm: list[list[Optional[Vector]]] = [[None] * n for _ in range(n)]
        if comm:
            for (j, i), v in comm.items():
                if not 0 <= i < j < n:
                    raise ValueError("commutator indexes must satisfy j > i")
                cm[j][i] = self._norm_vec(v)
        for i, v in enumerate(pw):
            if v is not None and any(v[k] for k in range(i + 1)):
                raise ValueError("power word of a%d not supported after it" % (i + 1))
        for j in range(n):
            for i in range(j):
                v = cm[j][i]
                if v is not None and any(v[k] for k in range(j + 1)):
                    raise ValueError("commutator word [a%d,a%d] not supported after a%d" % (j + 1, i + 1, j + 1))
        self.power = tuple(pw)
        self.comm = tuple(tuple(row) for row in cm)
        self.names = tuple(names) if names else tuple("a%d" % (i + 1) for i in range(n))
        if len(self.names) != n:
            raise ValueError("need %d generator names" % n)
        if weights is None:
            weights = self._infer_weights(definitions or {})
        self.weights = tuple(weights)
        self.definitions = {g: self._check_definition(g, d) for g, d in (definitions or {}).items()}
        # collection caches
        self._pow_word = tuple(vector_word(v) if v is not None else None for v in self.power)
        self._comm_word = tuple(
            tuple(vector_word(v) if v is not None else None for v in row) for row in self.comm
        )
        self._noncomm_above = tuple(
            tuple(h for h in range(g + 1, n) if self.comm[h][g] is not None) for g in range(n)
        )

    def _norm_vec(self, v: Sequence[int]) -> Vector:
        if len(v) != self.n:
            raise ValueError("vector length != number of generators")
        out = tuple(int(x) % self.p for x in v)
        return out

    def _infer_weights(self, defs: dict[int, Definition]) -> list[int]:
        w = [1] * self.n
        for g in sorted(defs):
            d = defs[g]
            if d.kind == "pow":
                w[g] = w[d.i] + 1
            else:
                w[g] = w[d.j] + w[d.i]
        return w

    def _check_definition(self, g: int, d: Definition) -> Definition:
        if d.kind == "pow":
            rhs = self.power[d.i]
        elif d.kind == "comm":
            rhs = self.comm[d.j][d.i]
        else:
            raise ValueError("unknown definition kind %r" % (d.kind,))
        if rhs is None or rhs[g] != 1:
            raise ValueError("definition of %s does not expose it with exponent 1" % self.names[g])
        prefix = list(rhs)
        prefix[g] = 0
        if any(prefix[k] for k in range(g, self.n)):
            raise ValueError("definition of %s has support at or after it" % self.names[g])
        return Definition(d.kind, d.i, d.j, tuple(prefix))

    # -- basic words ------------------------------------------------------

    def identity(self) -> Vector:
        return (0,) * self.n

    def gen(self, i: int) -> Vector:
        v = [0] * self.n
        v[i] = 1
        return tuple(v)

    def collect(self, word: Iterable[tuple[int, int]]) -> Vector:
        """Collection from the left: normal form of an arbitrary word."""
        p = self.p
        n = self.n
        power = self.power
        pow_word = self._pow_word
        comm = self.comm
        comm_word = self._comm_word
        noncomm = self._noncomm_above
        ev = [0] * n
        stack = [(g, e) for g, e in word if e]
        stack.reverse()
        pop = stack.pop
        while stack:
            g, e = pop()
            if not 0 <= e < p:
                r = e % p
                k = (e - r) // p  # a^e = a^r (a^p)^k
                if k and power[g] is not None:
                    psyl = pow_word[g]
                    rep = psyl * k if k > 0 else inverse_word(psyl) * (-k)
                    stack.extend(reversed(rep))
                e = r
                if not e:
                    continue
            blockers = [h for h in noncomm[g] if ev[h]]
            if not blockers:
                s = ev[g] + e
                if s < p:
                    ev[g] = s
                else:
                    ev[g] = s - p
                    if power[g] is not None:
                        tail = [(h, ev[h]) for h in range(g + 1, n) if ev[h]]
                        if tail:
                            for h, _ in tail:
                                ev[h] = 0
                            stack.extend(reversed(tail))
                        stack.extend(reversed(pow_word[g]))
            else:
                # move a single a_g left past the tail, conjugating the tail
                tail = [(h, ev[h]) for h in range(g + 1, n) if ev[h]]
                for h, _ in tail:
                    ev[h] = 0
                seq: list[tuple[int, int]] = []
                for h, f in tail:
                    cw = comm_word[h][g]
                    if cw is None:
                        seq.append((h, f))
                    else:
                        one = ((h, 1),) + cw
                        seq.extend(one * f)
                if e > 1:
                    seq.append((g, e - 1))
                s = ev[g] + 1
                if s < p:
                    ev[g] = s
                else:
                    ev[g] = 0
                    if power[g] is not None:
                        seq = list(pow_word[g]) + seq
                stack.extend(reversed(seq))
        return tuple(ev)

    # -- relation access ---------------------------------------------------

    def relations(self) -> Iterator[tuple]:
        """All relation slots, defining or not: ("pow", i) and ("comm", j, i)."""
        for i in range(self.n):
            yield ("pow", i)
        for j in range(self.n):
            for i in range(j):
                yield ("comm", j, i)

    def is_definition(self, rel: tuple) -> bool:
        for g, d in self.definitions.items():
            if rel[0] == "pow" and d.kind == "pow" and d.i == rel[1]:
                return True
            if rel[0] == "comm" and d.kind == "comm" and (d.j, d.i) == (rel[1], rel[2]):
                return True
        return False

    def relation_rhs(self, rel: tuple) -> Optional[Vector]:
        return self.power[rel[1]] if rel[0] == "pow" else self.comm[rel[1]][rel[2]]


def consistency_violations(pres: PcPresentation, gens: Optional[Sequence[int]] = None) -> list[tuple]:
    """Overlap conditions that fail, as (description, nf_left, nf_right).

    The standard test set for prime-order pc presentations: associativity
    overlaps a_k(a_j a_i) = (a_k a_j)a_i for k > j > i and the power overlaps
    for each pair and single generator.  ``gens`` restricts the indexes that
    participate (used for covering presentations where the central tails
    cannot produce violations).
    """
    p = pres.p
    idx = list(gens) if gens is not None else list(range(pres.n))
    out = []
    collect = pres.collect

    def cword(j, i):
        w = pres._comm_word[j][i]
        return w if w is not None else ()

    def pword(i):
        w = pres._pow_word[i]
        return w if w is not None else ()

    for k, j, i in itertools.combinations(sorted(idx, reverse=True), 3):
        lhs = collect(((k, 1), (i, 1), (j, 1)) + cword(j, i))
        rhs = collect(((j, 1), (k, 1)) + cword(k, j) + ((i, 1),))
        if lhs != rhs:
            out.append((("assoc", k, j, i), lhs, rhs))
    for j, i in itertools.combinations(sorted(idx, reverse=True), 2):
        lhs = collect(((i, 1), (j, 1)) + cword(j, i) + ((i, p - 1),))
        rhs = collect(((j, 1),) + pword(i))
        if lhs != rhs:
            out.append((("pow_right", j, i), lhs, rhs))
        lhs = collect(pword(j) + ((i, 1),))
        rhs = collect(((j, p - 1), (i, 1), (j, 1)) + cword(j, i))
        if lhs != rhs:
            out.append((("pow_left", j, i), lhs, rhs))
    for i in idx:
        lhs = collect(((i, 1),) + pword(i))
        rhs = collect(pword(i) + ((i, 1),))
        if lhs != rhs:
            out.append((("pow_self", i), lhs, rhs))
    return out


class PcGroup:
    """A finite p-group given by a consistent pc presentation.

    Immutable; series and invariants are cached on first use.  Elements are
    exponent tuples.  |G| = p^n with n the number of generators.
    """

    def __init__(self, pres: PcPresentation, check: bool = False):
        self.pres = pres
        if check:
            bad = consistency_violations(pres)
            if bad:
                raise InconsistentPresentationError(
                    "presentation fails %d overlap condition(s), first: %r" % (len(bad), bad[0])
                )

    # -- element arithmetic -------------------------------------------------

    @property
    def p(self) -> int:
        return self.pres.p

    @property
    def n(self) -> int:
        return self.pres.n

    @property
    def order_exponent(self) -> int:
        return self.pres.n

    def identity(self) -> Vector:
        return self.pres.identity()

    def gen(self, i: int) -> Vector:
        return self.pres.gen(i)

    def gens(self) -> list[Vector]:
        return [self.pres.gen(i) for i in range(self.n)]

    def collect(self, word: Iterable[tuple[int, int]]) -> Vector:
        return self.pres.collect(word)

    def multiply(self, a: Vector, b: Vector) -> Vector:
        return self.pres.collect(vector_word(a) + vector_word(b))

    def inverse(self, a: Vector) -> Vector:
        return self.pres.collect(inverse_word(vector_word(a)))

    def power_el(self, a: Vector, k: int) -> Vector:
        if k < 0:
            return self.power_el(self.inverse(a), -k)
        result = self.identity()
        base = a
        while k:
            if k & 1:
                result = self.multiply(result, base)
            base = self.multiply(base, base)
            k >>= 1
        return result

    def conjugate(self, a: Vector, b: Vector) -> Vector:
        """b^-1 a b."""
        wb = vector_word(b)
        return self.pres.collect(inverse_word(wb) + vector_word(a) + wb)

    def commutator(self, a: Vector, b: Vector) -> Vector:
        """[a, b] = a^-1 b^-1 a b."""
        wa, wb = vector_word(a), vector_word(b)
        return self.pres.collect(inverse_word(wa) + inverse_word(wb) + wa + wb)

    def element_order(self, a: Vector) -> int:
        k = 1
        x = a
        while any(x):
            x = self.power_el(x, self.p)
            k *= self.p
        return k

    def elements(self, bound_exponent: int = 8) -> Iterator[Vector]:
        """Every element exactly once (all exponent tuples)."""
        if self.n > bound_exponent:
            raise ValueError("group order 5^%d exceeds enumeration bound" % self.n)
        return itertools.product(range(self.p), repeat=self.n)

    def evaluate_word(self, word: Word, images: Sequence[Vector], target: "PcGroup") -> Vector:
        out = target.identity()
        for g, e in word:
            out = target.multiply(out, target.power_el(images[g], e))
        return out

    def evaluate_vector(self, v: Vector, images: Sequence[Vector], target: "PcGroup") -> Vector:
        return self.evaluate_word(vector_word(v), images, target)

    # -- subgroups ----------------------------------------------------------

    def subgroup(self, generators: Iterable[Vector], normal_closure: bool = False) -> "Subgroup":
        return Subgroup.generated(self, generators, normal_closure=normal_closure)

    def trivial_subgroup(self) -> "Subgroup":
        return Subgroup(self, ())

    def full_subgroup(self) -> "Subgroup":
        return Subgroup.generated(self, self.gens())

    # -- series -------------------------------------------------------------

    @cached_property
    def lower_central_series(self) -> list["Subgroup"]:
        """G = gamma_1 > gamma_2 > ... > 1."""
        series = [self.full_subgroup()]
        while series[-1].order_exponent:
            cur = series[-1]
            comms = [self.commutator(h, g) for h in cur.igs for g in self.gens()]
            nxt = Subgroup.generated(self, comms, normal_closure=True)
            if nxt.order_exponent == cur.order_exponent:
                raise InconsistentPresentationError("lower central series does not descend")
            series.append(nxt)
            if nxt.order_exponent == 0:
                break
        return series

    @cached_property
    def lambda_series(self) -> list["Subgroup"]:
        """Lower exponent-p central series: lambda_{i+1} = [lambda_i, G] lambda_i^p."""
        series = [self.full_subgroup()]
        while series[-1].order_exponent:
            cur = series[-1]
            gens = [self.commutator(h, g) for h in cur.igs for g in self.gens()]
            gens += [self.power_el(h, self.p) for h in cur.igs]
            nxt = Subgroup.generated(self, gens, normal_closure=True)
            if nxt.order_exponent == cur.order_exponent:
                raise InconsistentPresentationError("exponent-p central series does not descend")
            series.append(nxt)
            if nxt.order_exponent == 0:
                break
        return series

    @cached_property
    def derived_series(self) -> list["Subgroup"]:
        series = [self.full_subgroup()]
        while series[-1].order_exponent:
            cur = series[-1]
            comms = [self.commutator(a, b) for a, b in itertools.combinations(cur.igs, 2)]
            nxt = Subgroup.generated(self, comms, normal_closure=True)
            if nxt.order_exponent == cur.order_exponent:
                break
            series.append(nxt)
        return series

    @property
    def nilpotency_class(self) -> int:
        return len(self.lower_central_series) - 1 if self.n else 0

    @property
    def p_class(self) -> int:
        return len(self.lambda_series) - 1 if self.n else 0

    @property
    def coclass(self) -> int:
        return self.order_exponent - self.nilpotency_class

    @property
    def derived_length(self) -> int:
        return len(self.derived_series) - 1 if self.n else 0

    def derived_subgroup(self) -> "Subgroup":
        return self.lower_central_series[1] if len(self.lower_central_series) > 1 else self.trivial_subgroup()

    def is_abelian(self) -> bool:
        return self.nilpotency_class <= 1

    # -- abelianization coordinates ------------------------------------------

    @cached_property
    def _ab_quotient(self) -> "Quotient":
        return self.quotient(self.derived_subgroup())

    def abelianization_rank(self) -> int:
        der = self.derived_subgroup()
        frat = Subgroup.generated(
            self, list(der.igs) + [self.power_el(g, self.p) for g in self.gens()], normal_closure=True
        )
        return self.n - frat.order_exponent

    def ab_coords(self, v: Vector) -> Vector:
        """Image of v in G/G' in the quotient's generator coordinates."""
        q = self._ab_quotient
        return q.project(v)

    def ab_dim(self) -> int:
        return self._ab_quotient.group.n

    # -- quotients ------------------------------------------------------------

    def quotient(self, nsub: "Subgroup") -> "Quotient":
        return Quotient(self, nsub)

    def parent(self) -> "PcGroup":
        """Quotient by the last nontrivial lower-central term; trivial for abelian."""
        if self.n == 0:
            raise ValueError("the trivial group has no parent")
        lcs = self.lower_central_series
        if len(lcs) <= 2:  # abelian: gamma_c = G itself
            return trivial_group(self.p)
        return self.quotient(lcs[-2]).group

    def centre(self) -> "Subgroup":
        """Centre as the intersection of generator centralizers."""
        cents = None
        for g in self.gens():
            c = self._centralizer_of(g)
            if c.order_exponent == self.n:
                continue  # g is central, no constraint
            cents = c if cents is None else _intersect_subgroups(cents, c)
            if cents.order_exponent == 0:
                break
        return cents if cents is not None else self.full_subgroup()

    def _centralizer_of(self, a: Vector) -> "Subgroup":
        """Centralizer of a single element by orbit-stabilizer on the class."""
        gens = self.gens()
        transversal: dict[Vector, Vector] = {a: self.identity()}
        frontier = [a]
        stab: list[Vector] = []
        while frontier:
            x = frontier.pop()
            tx = transversal[x]
            for g in gens:
                y = self.conjugate(x, g)
                ty = self.multiply(tx, g)
                if y not in transversal:
                    transversal[y] = ty
                    frontier.append(y)
                else:
                    # Schreier element fixing a
                    s = self.multiply(ty, self.inverse(transversal[y]))
                    stab.append(s)
        return Subgroup.generated(self, stab)

    def upper_central_series(self) -> list["Subgroup"]:
        """1 = zeta_0 < zeta_1 < ... < zeta_c = G, as subgroups of G."""
        series = [self.trivial_subgroup()]
        while series[-1].order_exponent < self.n:
            cur = series[-1]
            q = self.quotient(cur)
            zc = q.group.centre()
            lifted = [q.lift(h) for h in zc.igs] + list(cur.igs)
            nxt = Subgroup.generated(self, lifted, normal_closure=True)
            if nxt.order_exponent == cur.order_exponent:
                raise InconsistentPresentationError("upper central series stalled")
            series.append(nxt)
        return series

    def __repr__(self) -> str:
        return "PcGroup(p=%d, order=%d^%d)" % (self.p, self.p, self.n)


def trivial_group(p: int) -> PcGroup:
    return PcGroup(PcPresentation(p, 0))


class Subgroup:
    """Subgroup given by an induced generating sequence.

    The igs rows have strictly increasing leading indexes and leading
    exponent 1, and each row is reduced by the later rows (canonical form),
    so equal subgroups have equal igs.  Order is p^len(igs).
    """

    __slots__ = ("group", "igs", "_leads")

    def __init__(self, group: PcGroup, igs: Sequence[Vector]):
        self.group = group
        self.igs = tuple(igs)
        self._leads = {next(i for i, x in enumerate(v) if x): k for k, v in enumerate(self.igs)}

    @staticmethod
    def generated(group: PcGroup, generators: Iterable[Vector], normal_closure: bool = False) -> "Subgroup":
        p = group.p
        rows: dict[int, Vector] = {}

        def sift_in(v: Vector) -> bool:
            while any(v):
                lead = next(i for i, x in enumerate(v) if x)
                if lead in rows:
                    h = rows[lead]
                    c = v[lead]
                    v = group.multiply(v, group.power_el(group.inverse(h), c))
                else:
                    c = v[lead]
                    if c != 1:
                        v = group.power_el(v, inv_mod(c, p))
                    rows[lead] = v
                    return True
            return False

        work = [v for v in generators if any(v)]
        while work:
            v = work.pop()
            if sift_in(v):
                # close under powers, commutators and (optionally) conjugation
                snapshot = list(rows.values())
                for h in snapshot:
                    work.append(group.power_el(h, p))
                    for h2 in snapshot:
                        work.append(group.commutator(h, h2))
                    if normal_closure:
                        for g in group.gens():
                            work.append(group.conjugate(h, g))
        # canonical form: reduce each row by the later rows
        leads = sorted(rows)
        out = []
        for lead in leads:
            v = rows[lead]
            for lead2 in leads:
                if lead2 > lead:
                    c = v[lead2]
                    if c:
                        v = group.multiply(v, group.power_el(group.inverse(rows[lead2]), c))
            out.append(v)
        return Subgroup(group, out)

    @property
    def order_exponent(self) -> int:
        return len(self.igs)

    def sift(self, v: Vector) -> Vector:
        g = self.group
        while any(v):
            lead = next(i for i, x in enumerate(v) if x)
            k = self._leads.get(lead)
            if k is None:
                return v
            v = g.multiply(v, g.power_el(g.inverse(self.igs[k]), v[lead]))
        return v

    def contains(self, v: Vector) -> bool:
        return not any(self.sift(v))

    def contains_subgroup(self, other: "Subgroup") -> bool:
        return all(self.contains(v) for v in other.igs)

    def coords(self, v: Vector) -> list[int]:
        """Exponents c with v = prod igs[k]^{c_k}; raises if v not a member."""
        g = self.group
        out = []
        for row in self.igs:
            lead = next(i for i, x in enumerate(row) if x)
            c = v[lead]
            out.append(c)
            if c:
                v = g.multiply(g.power_el(g.inverse(row), c), v)
        if any(v):
            raise NotInSubgroupError("element is not in the subgroup")
        return out

    def elements(self) -> Iterator[Vector]:
        g = self.group
        for exps in itertools.product(range(g.p), repeat=len(self.igs)):
            x = g.identity()
            for row, e in zip(self.igs, exps):
                x = g.multiply(x, g.power_el(row, e))
            yield x

    def is_normal(self) -> bool:
        g = self.group
        return all(self.contains(g.conjugate(h, a)) for h in self.igs for a in g.gens())

    def key(self) -> tuple:
        return self.igs

    def __eq__(self, other) -> bool:
        return isinstance(other, Subgroup) and self.group is other.group and self.igs == other.igs

    def __hash__(self) -> int:
        return hash(self.igs)

    def __repr__(self) -> str:
        return "Subgroup(order=%d^%d)" % (self.group.p, len(self.igs))


def _intersect_subgroups(a: Subgroup, b: Subgroup) -> Subgroup:
    """Intersection by filtering the smaller subgroup's elements."""
    if a.contains_subgroup(b):
        return b
    if b.contains_subgroup(a):
        return a
    small, big = (a, b) if a.order_exponent <= b.order_exponent else (b, a)
    if small.order_exponent > 7:
        raise ValueError("intersection too large for enumeration")
    members = [x for x in small.elements() if big.contains(x)]
    return Subgroup.generated(small.group, members)


class Quotient:
    """Quotient group G/N with projection and a section for elements.

    The quotient presentation keeps the generators of G whose indexes are not
    leading indexes of N's igs; coset representatives are the normal forms
    with zero exponents at those leading indexes.
    """

    def __init__(self, group: PcGroup, nsub: Subgroup):
        if not nsub.is_normal():
            raise ValueError("subgroup is not normal")
        self.base = group
        self.nsub = nsub
        leads = set(nsub._leads)
        self.keep = [i for i in range(group.n) if i not in leads]
        self._pos = {gi: k for k, gi in enumerate(self.keep)}
        p = group.p
        m = len(self.keep)
        power: dict[int, Vector] = {}
        comm: dict[tuple[int, int], Vector] = {}
        for k, gi in enumerate(self.keep):
            v = self._restrict(self.reduce(group.power_el(group.gen(gi), p)))
            if any(v):
                power[k] = v
        for k2 in range(m):
            for k1 in range(k2):
                v = self._restrict(self.reduce(group.commutator(group.gen(self.keep[k2]), group.gen(self.keep[k1]))))
                if any(v):
                    comm[(k2, k1)] = v
        self.group = PcGroup(
            PcPresentation(
                p, m, power=power, comm=comm,
                weights=[group.pres.weights[gi] for gi in self.keep],
                names=[group.pres.names[gi] for gi in self.keep],
            )
        )

    def reduce(self, v: Vector) -> Vector:
        """Canonical coset representative of v in G."""
        g = self.base
        for row in self.nsub.igs:
            lead = next(i for i, x in enumerate(row) if x)
            c = v[lead]
            if c:
                v = g.multiply(v, g.power_el(g.inverse(row), c))
        return v

    def _restrict(self, v: Vector) -> Vector:
        assert not any(v[i] for i in self.nsub._leads), "reduced form has support on N"
        return tuple(v[i] for i in self.keep)

    def project(self, v: Vector) -> Vector:
        return self._restrict(self.reduce(v))

    def lift(self, w: Vector) -> Vector:
        v = [0] * self.base.n
        for k, gi in enumerate(self.keep):
            v[gi] = w[k]
        # exponent tuples are not multiplicative; rebuild by collection
        word = tuple((gi, w[k]) for k, gi in enumerate(self.keep) if w[k])
        return self.base.collect(word)


# -- text format ------------------------------------------------------------

FORMAT_HEADER = "# artintree pc presentation v1"


def print_presentation(pres: PcPresentation) -> str:
    """Canonical text form; parse(print(p)) reproduces p bit-exactly."""
    lines = [FORMAT_HEADER, "p = %d" % pres.p, "gens = %s" % ", ".join(pres.names)]
    lines.append("weights = %s" % ", ".join(str(w) for w in pres.weights))

    def word_str(v: Vector) -> str:
        parts = []
        for i, e in enumerate(v):
            if e:
                parts.append(pres.names[i] if e == 1 else "%s^%d" % (pres.names[i], e))
        return "*".join(parts) if parts else "1"

    # definitions with trivial prefix use the sugared form "g = [a,b]" which
    # doubles as the relation; prefixed definitions print the relation in
    # full plus an explicit "define" marker line.
    sugared = {}
    marker = []
    for g in sorted(pres.definitions):
        d = pres.definitions[g]
        slot = ("pow", d.i) if d.kind == "pow" else ("comm", d.j, d.i)
        if not any(d.prefix):
            sugared[slot] = g
        else:
            marker.append(g)
    for g in sorted(pres.definitions):
        d = pres.definitions[g]
        slot = ("pow", d.i) if d.kind == "pow" else ("comm", d.j, d.i)
        if slot in sugared and sugared[slot] == g:
            if d.kind == "pow":
                lines.append("%s = %s^%d" % (pres.names[g], pres.names[d.i], pres.p))
            else:
                lines.append("%s = [%s,%s]" % (pres.names[g], pres.names[d.j], pres.names[d.i]))
    for i in range(pres.n):
        if ("pow", i) in sugared:
            continue
        v = pres.power[i]
        if v is not None and any(v):
            lines.append("%s^%d = %s" % (pres.names[i], pres.p, word_str(v)))
    for j in range(pres.n):
        for i in range(j):
            if ("comm", j, i) in sugared:
                continue
            v = pres.comm[j][i]
            if v is not None and any(v):
                lines.append("[%s,%s] = %s" % (pres.names[j], pres.names[i], word_str(v)))
    for g in marker:
        d = pres.definitions[g]
        if d.kind == "pow":
            lines.append("define %s = %s^%d" % (pres.names[g], pres.names[d.i], pres.p))
        else:
            lines.append("define %s = [%s,%s]" % (pres.names[g], pres.names[d.j], pres.names[d.i]))
    return "\n".join(lines) + "\n"


class PresentationParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__("line %d: %s" % (lineno, message))
        self.lineno = lineno


def parse_presentation(text: str) -> PcPresentation:
    """Parse the text format produced by ``print_presentation``.

    Grammar (one item per line, '#' starts a comment):
        p = <prime>
        gens = name1, name2, ...          (defaults a1..an via "n = <int>")
        weights = w1, w2, ...             (optional)
        <name> = [<name>,<name>]          definition by commutator
        <name> = <name>^p                 definition by p-th power
        <name>^p = <word>                 power relation
        [<name>,<name>] = <word>          commutator relation
    Words are '*'-separated powers like "s5^4*u5", or "1" for the identity.
    """
    p = None
    names: list[str] = []
    weights = None
    rel_lines: list[tuple[int, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PresentationParseError(lineno, "expected '='")
        lhs, rhs = (s.strip() for s in line.split("=", 1))
        if lhs == "p":
            p = int(rhs)
        elif lhs == "n":
            names = ["a%d" % (i + 1) for i in range(int(rhs))]
        elif lhs == "gens":
            names = [s.strip() for s in rhs.split(",") if s.strip()]
        elif lhs == "weights":
            weights = [int(s) for s in rhs.split(",")]
        else:
            rel_lines.append((lineno, lhs, rhs))
    if p is None:
        raise PresentationParseError(0, "missing 'p = <prime>' header")
    if not names:
        raise PresentationParseError(0, "missing 'gens = ...' or 'n = ...' header")
    idx = {nm: i for i, nm in enumerate(names)}
    n = len(names)

    def parse_gen(tok: str, lineno: int) -> int:
        tok = tok.strip()
        if tok not in idx:
            raise PresentationParseError(lineno, "unknown generator %r" % tok)
        return idx[tok]

    def parse_word(s: str, lineno: int) -> list[int]:
        v = [0] * n
        s = s.strip()
        if s == "1":
            return v
        for part in s.split("*"):
            part = part.strip()
            if "^" in part:
                nm, e = part.split("^", 1)
                v[parse_gen(nm, lineno)] += int(e)
            else:
                v[parse_gen(part, lineno)] += 1
        return [x % p for x in v]

    power: dict[int, list[int]] = {}
    comm: dict[tuple[int, int], list[int]] = {}
    definitions: dict[int, Definition] = {}
    for lineno, lhs, rhs in rel_lines:
        if lhs.startswith("define "):
            g = parse_gen(lhs[len("define "):], lineno)
            r = rhs.strip()
            if r.startswith("["):
                a, b = (t.strip() for t in r.strip("[] ").split(","))
                definitions[g] = Definition("comm", i=parse_gen(b, lineno), j=parse_gen(a, lineno))
            else:
                nm, e = r.split("^", 1)
                if int(e) != p:
                    raise PresentationParseError(lineno, "definition power must be p")
                definitions[g] = Definition("pow", i=parse_gen(nm, lineno))
            continue
        if lhs.startswith("["):
            inner = lhs.strip("[] ")
            a, b = (t.strip() for t in inner.split(","))
            j, i = parse_gen(a, lineno), parse_gen(b, lineno)
            if not j > i:
                raise PresentationParseError(lineno, "commutator must be [later, earlier]")
            comm[(j, i)] = parse_word(rhs, lineno)
        elif "^" in lhs:
            nm, e = lhs.split("^", 1)
            if int(e) != p:
                raise PresentationParseError(lineno, "only p-th power relations allowed")
            power[parse_gen(nm, lineno)] = parse_word(rhs, lineno)
        else:
            # definition line: gen = [a,b] or gen = a^p
            g = parse_gen(lhs, lineno)
            r = rhs.strip()
            if r.startswith("["):
                a, b = (t.strip() for t in r.strip("[] ").split(","))
                j, i = parse_gen(a, lineno), parse_gen(b, lineno)
                v = [0] * n
                v[g] = 1
                comm[(j, i)] = v
                definitions[g] = Definition("comm", i=i, j=j, prefix=(0,) * n)
            else:
                nm, e = r.split("^", 1)
                if int(e) != p:
                    raise PresentationParseError(lineno, "definition power must be p")
                i = parse_gen(nm, lineno)
                v = [0] * n
                v[g] = 1
                power[i] = v
                definitions[g] = Definition("pow", i=i, prefix=(0,) * n)
    return PcPresentation(p, n, power=power, comm=comm, weights=weights, names=names, definitions=definitions)


def derive_definitions(pres: PcPresentation) -> dict[int, Definition]:
    """Find a defining relation (rhs exactly one generator) for each non-initial gen.

    Used on parsed or quotient presentations that lack explicit definitions.
    Generators of weight 1 (no definition found, index < Frattini rank) are
    skipped; raises if a generator of weight > 1 has no unit-vector relation.
    """
    defs: dict[int, Definition] = {}
    unit = {}
    for rel in pres.relations():
        rhs = pres.relation_rhs(rel)
        if rhs is None or sum(rhs) != 1:
            continue
        g = next(i for i, x in enumerate(rhs) if x)
        if rhs[g] == 1 and g not in unit:
            unit[g] = rel
    for g, rel in sorted(unit.items()):
        if rel[0] == "pow":
            defs[g] = Definition("pow", i=rel[1], prefix=(0,) * pres.n)
        else:
            defs[g] = Definition("comm", j=rel[1], i=rel[2], prefix=(0,) * pres.n)
    return defs
