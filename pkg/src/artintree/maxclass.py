"""Parametrized metabelian p-groups of maximal class, and the polarized
transfer-target predictor.

The constructor realizes the classical two-generator presentations
G_a^m(z,w) on x, y, s_2, ..., s_{m-1}: s_2 = [y,x], s_j = [s_{j-1},x],
commutator relations [s_j,y] with parameter family a, power relations for
x, y and the s_j with binomial-coefficient factors, nilpotency s_m = 1 and
the metabelian relations [s_i,s_j] = 1.  The binomial products are expanded
into normal words at construction time so the presentation is a plain pc
presentation.

Admissible defect ranges: k = 0 for m <= 4; 0 <= k <= m-4 for m >= 5;
additionally k <= p-2 once m >= p+1.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .artin import AbelianType
from .pc import Definition, PcGroup, PcPresentation


@dataclass(frozen=True)
class BlackburnParams:
    """Parameters (m, z, w, a) for a maximal-class representative.

    a is the family (a(m-k), ..., a(m-1)) indexed from the deepest term;
    empty a means defect k = 0, and a nonempty family needs a(m-k) > 0.
    """

    p: int
    m: int
    z: int
    w: int
    a: tuple[int, ...] = ()

    def __post_init__(self):
        p, m = self.p, self.m
        if m < 3:
            raise ValueError("index of nilpotency m must be >= 3")
        if not (0 <= self.z < p and 0 <= self.w < p):
            raise ValueError("z, w must be residues mod p")
        k = len(self.a)
        bound = defect_bound(p, m)
        if k > bound:
            raise ValueError("defect k=%d exceeds the admissible bound %d for p=%d, m=%d" % (k, bound, p, m))
        if self.a and self.a[0] == 0:
            raise ValueError("a(m-k) must be nonzero for a nonempty family")
        if any(not 0 <= x < p for x in self.a):
            raise ValueError("family entries must be residues mod p")

    @property
    def k(self) -> int:
        return len(self.a)

    @property
    def v(self) -> int:
        return self.a[0] if self.k == self.p - 2 and self.a else 0


def defect_bound(p: int, m: int) -> int:
    """Largest admissible defect; warns when the published ranges disagree."""
    if m <= 4:
        return 0
    bound = m - 4
    if m >= p + 1:
        if bound > p - 2:
            warnings.warn(
                "defect ranges disagree for p=%d, m=%d (m-4=%d vs p-2=%d); enforcing the tighter"
                % (p, m, bound, p - 2),
                stacklevel=2,
            )
        bound = min(bound, p - 2)
    return bound


def _abelian_normalize(p: int, m: int, pow_s: dict[int, dict[int, int]], vec: dict[int, int]) -> dict[int, int]:
    """Reduce a Z-exponent vector on the commuting s_j to exponents in [0,p).

    pow_s[j] is the (already normalized) vector for s_j^p; indexes >= m are
    trivial.  Carries propagate to strictly deeper generators, so this
    terminates.
    """
    out = dict(vec)
    changed = True
    while changed:
        changed = False
        for j in sorted(out):
            e = out[j]
            if 0 <= e < p:
                continue
            r = e % p
            q = (e - r) // p
            out[j] = r
            rep = pow_s.get(j, {})
            for h, c in rep.items():
                out[h] = out.get(h, 0) + q * c
            changed = True
    return {j: e for j, e in out.items() if e}


def blackburn_group(params: BlackburnParams) -> PcGroup:
    """Construct G_a^m(z,w) as a consistent pc group of order p^m."""
    p, m, z, w, a = params.p, params.m, params.z, params.w, params.a
    k = params.k
    n = m  # generators x, y, s2 .. s_{m-1}
    names = ["x", "y"] + ["s%d" % j for j in range(2, m)]
    sidx = {j: j for j in range(2, m)}  # s_j lives at index j (x=0, y=1)

    def svec(d: dict[int, int]) -> tuple[int, ...]:
        vv = [0] * n
        for j, c in d.items():
            if 2 <= j <= m - 1 and c % p:
                vv[sidx[j]] = c % p
        return tuple(vv)

    # power words for the s_j, deepest first:
    # s_t^p = (prod_{l=2}^{p} s_{t-1+l}^{C(p,l)})^{-1}, factors at index >= m trivial
    pow_s: dict[int, dict[int, int]] = {}
    for t in range(m - 1, 1, -1):
        acc: dict[int, int] = {}
        for l in range(2, p + 1):
            h = t - 1 + l
            if h <= m - 1:
                acc[h] = acc.get(h, 0) - math.comb(p, l)
        pow_s[t] = _abelian_normalize(p, m, pow_s, acc)

    power: dict[int, tuple[int, ...]] = {}
    for t in range(2, m):
        v = pow_s[t]
        if v:
            power[sidx[t]] = svec(v)
    # x^p = s_{m-1}^w  (the j=0 instance of the (x y^j)^p relations)
    if w:
        power[0] = svec({m - 1: w})
    # y^p = s_{m-1}^z * (prod_{l=2}^{p} s_l^{C(p,l)})^{-1}
    acc = {m - 1: z}
    for l in range(2, p + 1):
        if l <= m - 1:
            acc[l] = acc.get(l, 0) - math.comb(p, l)
    yv = _abelian_normalize(p, m, pow_s, acc)
    if yv:
        power[1] = svec(yv)

    comm: dict[tuple[int, int], tuple[int, ...]] = {(1, 0): svec({2: 1})}
    for j in range(2, m - 1):
        comm[(sidx[j], 0)] = svec({j + 1: 1})
    # [s_j, y] = prod_{l=1}^{k-j+2} s_{m-l}^{a(m-j+2-l)} for 2 <= j <= k+1
    for j in range(2, k + 2):
        d: dict[int, int] = {}
        for l in range(1, k - j + 3):
            # a(m-i) is stored at a[i - k + ... ]: a = (a(m-k), ..., a(m-1))
            coeff_index = (m - (j - 2) - l) - (m - k)  # position of a(m-j+2-l)
            if 0 <= coeff_index < k:
                d[m - l] = d.get(m - l, 0) + a[coeff_index]
        dv = _abelian_normalize(p, m, pow_s, d)
        if dv:
            comm[(sidx[j], 1)] = svec(dv)

    defs = {sidx[2]: Definition("comm", i=0, j=1)}
    for j in range(3, m):
        defs[sidx[j]] = Definition("comm", i=0, j=sidx[j - 1])
    pres = PcPresentation(p, n, power=power, comm=comm, definitions=defs,
                          names=names, weights=[1, 1] + list(range(2, m)))
    G = PcGroup(pres, check=True)
    return G


def admissible_parameters(p: int, m: int, exhaustive: bool = True,
                          zw_sample: Sequence[tuple[int, int]] = ((0, 0), (1, 0), (0, 1), (1, 1), (2, 3))
                          ) -> Iterator[BlackburnParams]:
    """Admissible (z, w, a) tuples for the given p and m, deterministic order.

    With exhaustive=False the (z, w) pairs are restricted to the fixed
    sample above (reduced mod p) while the defect family a stays exhaustive;
    used to keep large property sweeps tractable.
    """
    if exhaustive:
        zw = [(z, w) for z in range(p) for w in range(p)]
    else:
        zw = sorted({(z % p, w % p) for z, w in zw_sample})
    bound = defect_bound(p, m)
    families: list[tuple[int, ...]] = [()]
    for k in range(1, bound + 1):
        for first in range(1, p):
            for rest in itertools.product(range(p), repeat=k - 1):
                families.append((first,) + rest)
    for z, w in zw:
        for fam in families:
            yield BlackburnParams(p, m, z, w, fam)


def nearly_homocyclic(p: int, e: int) -> AbelianType:
    """Abelian p-group of order p^e whose invariants differ by at most one.

    For e >= p-1 with e = q(p-1) + r: r invariants p^(q+1) and p-1-r
    invariants p^q.  Below p-1 the group is elementary of rank e; e = 0 is
    the trivial group.
    """
    if e < 0:
        raise ValueError("order exponent must be >= 0")
    if e == 0:
        return AbelianType(p, ())
    if e < p - 1:
        return AbelianType(p, (1,) * e)
    q, r = divmod(e, p - 1)
    return AbelianType(p, (q + 1,) * r + (q,) * (p - 1 - r))


EXCEPTION_NONE = "none"
EXCEPTION_EXTRASPECIAL = "extraspecial_exponent_p2"   # G_0^3(0,1)
EXCEPTION_SYLOW = "sylow_alternating"                 # G_0^{p+1}(1,0)


def classify_exception(params: BlackburnParams) -> str:
    if params.m == 3 and params.z == 0 and params.w == 1 and not params.a:
        return EXCEPTION_EXTRASPECIAL
    if params.m == params.p + 1 and params.z == 1 and params.w == 0 and not params.a:
        return EXCEPTION_SYLOW
    return EXCEPTION_NONE


def predicted_ttt(p: int, c: int, k: int, exceptional: str = EXCEPTION_NONE) -> list[AbelianType]:
    """Polarized transfer-target prediction for maximal-class metabelianizations.

    Nearly homocyclic first component of order p^(c-k), then p copies of
    [p,p]; the two exceptional groups get ([p,p],[p^2]^p) and an elementary
    rank-p first component respectively.
    """
    pp = AbelianType(p, (1, 1))
    if exceptional == EXCEPTION_EXTRASPECIAL:
        return [pp] + [AbelianType(p, (2,))] * p
    if exceptional == EXCEPTION_SYLOW:
        return [AbelianType(p, (1,) * p)] + [pp] * p
    if exceptional != EXCEPTION_NONE:
        raise ValueError("unknown exception tag %r" % exceptional)
    return [nearly_homocyclic(p, c - k)] + [pp] * p
