"""Bundled catalog of explicit pc presentations.

The six cataloged groups are the candidates singled out by the tower
search: five non-metabelian groups of order 5^7 on generators
x, y, s2, s3, s4, s5, u5 with

    s2 = [y,x], s3 = [s2,x], s4 = [s3,x], s5 = [s4,x],
    x^5 = W, y^5 = s5^4, u5 = [s3,y] = [s4,y], [s3,s2] = u5^4,

where the relator word W distinguishes the catalog ids 361, 373, 374, 385,
386, and the metabelian order-5^6 quotient (id 635) obtained by u5 := 1.
Both metabelian relator variants W = s5 and W = s5^2 present the same group.
"""

from __future__ import annotations

from .pc import Definition, PcGroup, PcPresentation

TOWER_CANDIDATE_IDS = (361, 373, 374, 385, 386)
METABELIAN_ID = 635

_RELATOR = {
    361: (1, 0),
    373: (1, 1),
    374: (2, 1),
    385: (1, 2),
    386: (2, 2),
}


def tower_candidate(n: int) -> PcGroup:
    """One of the five order-5^7 candidates, by catalog id."""
    if n not in _RELATOR:
        raise ValueError("unknown catalog id %r; expected one of %s" % (n, TOWER_CANDIDATE_IDS))
    ws5, wu5 = _RELATOR[n]
    ng = 7  # x y s2 s3 s4 s5 u5
    e = lambda i, c=1: tuple(c if j == i else 0 for j in range(ng))
    W = tuple((ws5 if j == 5 else wu5 if j == 6 else 0) for j in range(ng))
    comm = {
        (1, 0): e(2), (2, 0): e(3), (3, 0): e(4), (4, 0): e(5),
        (3, 1): e(6), (4, 1): e(6), (3, 2): e(6, 4),
    }
    power = {0: W, 1: e(5, 4)}
    defs = {
        2: Definition("comm", i=0, j=1),
        3: Definition("comm", i=0, j=2),
        4: Definition("comm", i=0, j=3),
        5: Definition("comm", i=0, j=4),
        6: Definition("comm", i=1, j=3),
    }
    pres = PcPresentation(5, ng, power=power, comm=comm, definitions=defs,
                          names=["x", "y", "s2", "s3", "s4", "s5", "u5"])
    return PcGroup(pres, check=True)


def metabelian_quotient(relator_exp: int = 1) -> PcGroup:
    """The order-5^6 metabelian quotient (u5 := 1), W = s5^relator_exp.

    relator_exp 1 and 2 present isomorphic groups (catalog id 635).
    """
    if relator_exp not in (1, 2):
        raise ValueError("relator exponent must be 1 or 2")
    ng = 6  # x y s2 s3 s4 s5
    e = lambda i, c=1: tuple(c if j == i else 0 for j in range(ng))
    comm = {(1, 0): e(2), (2, 0): e(3), (3, 0): e(4), (4, 0): e(5)}
    power = {0: e(5, relator_exp), 1: e(5, 4)}
    defs = {
        2: Definition("comm", i=0, j=1),
        3: Definition("comm", i=0, j=2),
        4: Definition("comm", i=0, j=3),
        5: Definition("comm", i=0, j=4),
    }
    pres = PcPresentation(5, ng, power=power, comm=comm, definitions=defs,
                          names=["x", "y", "s2", "s3", "s4", "s5"])
    return PcGroup(pres, check=True)


def catalog_group(n: int, relator_exp: int = 1) -> PcGroup:
    """Catalog lookup: 361|373|374|385|386 or 635 (metabelian)."""
    if n == METABELIAN_ID:
        return metabelian_quotient(relator_exp)
    return tower_candidate(n)


def root_group(p: int = 5) -> PcGroup:
    """The elementary abelian rank-2 tree root [p, p]."""
    return PcGroup(PcPresentation(p, 2, names=["x", "y"]))
