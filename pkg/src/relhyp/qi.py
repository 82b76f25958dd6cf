"""Quasi-isometry checks between finite balls, in exact arithmetic.

Distances in a ``LabeledGraph`` are integers in units of ``1/scale``; every
inequality here is cleared of denominators before it is compared, so no
floating point enters a verdict.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Hashable, Mapping, Sequence

import numpy as np

from .complexes import LabeledGraph, coned_off_ball, coset_ball, relative_ball

NOTE_CONSTANTS = (
    "d~ <= 2 d_rel and d_rel/2 - 1/2 <= d~ give a quasi-isometry with lambda=2, c=1/2; "
    "lambda = c = 1/2 would fail the lower bound d_rel/lambda - c <= d~"
)


def _as_map(assoc, n1: int, n2: int) -> np.ndarray:
    if isinstance(assoc, Mapping):
        missing = [u for u in range(n1) if u not in assoc]
        if missing:
            raise ValueError(f"map undefined on vertex {missing[0]}")
        arr = np.asarray([assoc[u] for u in range(n1)], dtype=np.int64)
    else:
        arr = np.asarray(list(assoc), dtype=np.int64)
        if len(arr) != n1:
            raise ValueError("map must be defined on every vertex of the source ball")
    if len(arr) and (arr.min() < 0 or arr.max() >= n2):
        raise ValueError("map image outside the target graph")
    return arr


@dataclass
class QIVerdict:
    lam: Fraction
    c: Fraction
    epsilon: Fraction
    lower_ok: bool
    upper_ok: bool
    density_ok: bool
    # (x, y, d1, d2) for the tightest pair; (z, x, d2) for the farthest target vertex
    lower_witness: tuple | None = None
    upper_witness: tuple | None = None
    density_witness: tuple | None = None
    provisional: bool = False
    notes: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)
    labels: tuple[list[str], list[str]] | None = None

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.upper_ok and self.density_ok and all(self.extra.get("checks", {}).values())

    def _render(self, side: int, v: int) -> str:
        return self.labels[side][v] if self.labels else str(v)

    def to_json(self) -> dict:
        def pair(w):
            if w is None:
                return None
            x, y, d1, d2 = w
            return {"x": self._render(0, x), "y": self._render(0, y), "d1": str(d1), "d2": str(d2)}

        dens = None
        if self.density_witness is not None:
            z, x, d = self.density_witness
            dens = {"z": self._render(1, z), "nearest": self._render(0, x), "distance": str(d)}
        return {
            "lambda": str(self.lam),
            "c": str(self.c),
            "epsilon": str(self.epsilon),
            "pass": self.passed,
            "a_lower": self.lower_ok,
            "a_upper": self.upper_ok,
            "b_density": self.density_ok,
            "worst": {"a_lower": pair(self.lower_witness), "a_upper": pair(self.upper_witness), "b_density": dens},
            "provisional": self.provisional,
            "notes": self.notes,
            **self.extra,
        }


def check_qi_map(assoc, G1: LabeledGraph, G2: LabeledGraph, lam=1, c=0, epsilon=0) -> QIVerdict:
    """Exhaustive quasi-isometry check: (a) the two-sided bound over all vertex pairs, (b) density over all target vertices."""
    lam, c, epsilon = Fraction(lam), Fraction(c), Fraction(epsilon)
    if lam <= 0 or c < 0 or epsilon < 0:
        raise ValueError("need lambda > 0, c >= 0, epsilon >= 0")
    m = _as_map(assoc, G1.n, G2.n)
    D1 = G1.distances()
    D2 = G2.distances()[np.ix_(m, m)]
    s1, s2 = G1.scale, G2.scale
    ln, ld, cn, cd = lam.numerator, lam.denominator, c.numerator, c.denominator
    # d1/lam - c <= d2, multiplied by s1 s2 ln cd
    lower_slack = D2 * (s1 * ln * cd) - (D1 * (s2 * ld * cd) - cn * s1 * s2 * ln)
    # d2 <= lam d1 + c, multiplied by s1 s2 ld cd
    upper_slack = D1 * (s2 * ln * cd) + cn * s1 * s2 * ld - D2 * (s1 * ld * cd)

    def worst(slack):
        i, j = np.unravel_index(int(np.argmin(slack)), slack.shape)
        return bool(slack[i, j] >= 0), (int(i), int(j), Fraction(int(D1[i, j]), s1), Fraction(int(D2[i, j]), s2))

    lo_ok, lo_w = worst(lower_slack)
    up_ok, up_w = worst(upper_slack)
    # density: every target vertex within epsilon (rounded up to scaled units) of the image
    reach = G2.distances()[m, :]
    nearest = reach.min(axis=0)
    z = int(np.argmax(nearest))
    x = int(np.argmin(reach[:, z]))
    dens_ok = bool(nearest.max() <= ceil(epsilon * s2))
    return QIVerdict(
        lam, c, epsilon, lo_ok, up_ok, dens_ok, lo_w, up_w, (z, x, Fraction(int(nearest[z]), s2)),
        labels=([str(p) for p in G1.payloads], [str(p) for p in G2.payloads]),
    )


def _pairwise_le(A: np.ndarray, sa: int, B: np.ndarray, sb: int, k: Fraction = Fraction(1), const: Fraction = Fraction(0)):
    """Check A/sa <= k B/sb + const entrywise; return (ok, worst index)."""
    kn, kd, cn, cd = k.numerator, k.denominator, const.numerator, const.denominator
    slack = B * (sa * kn * cd) + cn * sa * sb * kd - A * (sb * kd * cd)
    i, j = np.unravel_index(int(np.argmin(slack)), slack.shape)
    return bool(slack[i, j] >= 0), (int(i), int(j))


def eqdef_check(G, X, parabolics, r: int = 3, R_H: int = 4, *, budget: int | None = None) -> tuple[QIVerdict, QIVerdict]:
    """Check the comparison between relative, coset and coned-off balls.

    First verdict: ``alpha(g) = gH_1`` from the relative ball into the coset
    ball against ``d~ <= 2 d_rel``, ``d_rel/2 - 1/2 <= d~`` and 1-density,
    and as a quasi-isometry with ``lambda=2, c=1/2, epsilon=1``.  Second verdict: the identity on group
    elements into the coned-off ball, an isometric embedding with a
    1-dense image.  Both are marked provisional unless the balls are stable
    when ``R_H`` grows by 2.
    """
    rel = relative_ball(G, X, parabolics, r, R_H, check_exact=True, budget=budget)
    pars = rel.context["parabolics"]
    if not pars:
        raise ValueError("eqdef_check needs at least one parabolic subgroup")
    cos = coset_ball(G, X, pars, r, R_H, relative=rel, budget=budget)
    cos.meta["exact"] = bool(rel.meta["exact"]) and _coset_stable(G, X, pars, r, R_H, cos, budget)
    provisional = not (rel.meta["exact"] and cos.meta["exact"])

    P1 = pars[0]
    alpha = [cos.index[(0, P1.coset(rel.payloads[u].word)[0])] for u in range(rel.n)]
    v1 = check_qi_map(alpha, rel, cos, 2, Fraction(1, 2), 1)
    D1 = rel.distances()
    D2 = cos.distances()[np.ix_(alpha, alpha)]
    upper, w1 = _pairwise_le(D2, 1, D1, 1, Fraction(2))
    # d_rel/2 - 1/2 <= d~  <=>  d_rel <= 2 d~ + 1
    lower, w2 = _pairwise_le(D1, 1, D2, 1, Fraction(2), Fraction(1))
    v1.provisional = provisional
    v1.notes.append(NOTE_CONSTANTS)
    v1.extra = {
        "map": "alpha(g) = g H_1",
        "checks": {"coset_upper": upper, "coset_lower": lower},
        "check_witnesses": {"coset_upper": list(w1), "coset_lower": list(w2)},
        "sizes": {"relative": rel.n, "coset": cos.n},
        "exact": {"relative": bool(rel.meta["exact"]), "coset": bool(cos.meta["exact"])},
        "r": r,
        "R_H": R_H,
    }

    con = coned_off_ball(G, X, pars, r, R_H, relative=rel, budget=budget)
    iota = list(range(rel.n))
    v2 = check_qi_map(iota, rel, con, 1, 0, 1)
    v2.provisional = provisional
    v2.extra = {
        "map": "identity on group elements",
        "checks": {},
        "sizes": {"relative": rel.n, "coned": con.n},
        "r": r,
        "R_H": R_H,
    }
    return v1, v2


def _coset_stable(G, X, pars, r, R_H, cos: LabeledGraph, budget) -> bool:
    bigger = coset_ball(G, X, pars, r, R_H + 2, budget=budget)
    if any(k not in bigger.index for k in cos.keys):
        return False
    ids = [bigger.index[k] for k in cos.keys]
    return bool((cos.distances() == bigger.distances()[np.ix_(ids, ids)]).all())


# --------------------------------------------------------------------------
# orbit-class Lipschitz bound


@dataclass
class LipschitzReport:
    M: Fraction
    forward_ok: bool
    class_constant: bool
    forward_witness: tuple | None
    M_inverse: Fraction | None = None
    backward_ok: bool | None = None
    backward_witness: tuple | None = None
    classes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.forward_ok and (self.backward_ok is None or self.backward_ok)

    @property
    def verdict(self) -> str:
        if not self.forward_ok:
            return "not Lipschitz"
        if self.backward_ok is None:
            return "Lipschitz (one direction only)"
        return "quasi-isometry (both directions)" if self.backward_ok else "not a quasi-isometry"

    def to_json(self) -> dict:
        return {
            "M": str(self.M),
            "forward_ok": self.forward_ok,
            "class_constant": self.class_constant,
            "forward_witness": self.forward_witness,
            "M_inverse": None if self.M_inverse is None else str(self.M_inverse),
            "backward_ok": self.backward_ok,
            "backward_witness": self.backward_witness,
            "verdict": self.verdict,
            "classes": self.classes,
        }


def label_classes(g: LabeledGraph) -> dict[Hashable, list[int]]:
    """Edges grouped by label, the orbit criterion for edges of a coset graph."""
    out: dict[Hashable, list[int]] = defaultdict(list)
    for k, e in enumerate(g.edges):
        out[str(e.label)].append(k)
    return dict(out)


def _class_bound(G1: LabeledGraph, G2: LabeledGraph, m: np.ndarray, classes) -> tuple[Fraction, bool, dict]:
    D2 = G2.distances()
    M = Fraction(0)
    constant = True
    info = {}
    for name, edges in classes.items():
        if not edges:
            continue
        disp = [Fraction(int(D2[m[G1.edges[k].u], m[G1.edges[k].v]]), G2.scale) / Fraction(G1.edges[k].length, G1.scale) for k in edges]
        M = max(M, disp[0])
        constant &= all(d == disp[0] for d in disp)
        info[str(name)] = str(disp[0])
    return M, constant, info


def lipschitz_orbit_bound(
    G1: LabeledGraph, G2: LabeledGraph, beta, edge_classes=None, inverse=None, inverse_classes=None
) -> LipschitzReport:
    """``M`` from one edge per class, then ``d2(bu, bv) <= M d1(u, v)`` over every pair.

    With ``inverse`` (a map from ``G2`` back to ``G1``) the constant ``M'`` is
    computed the same way on ``G2`` and ``d1(u, v) <= M' d2(bu, bv)`` is
    checked.  No additive slack is allowed: every finite ball is within
    bounded distance of a point, so an additive constant would make every
    map pass.
    """
    m = _as_map(beta, G1.n, G2.n)
    classes = edge_classes if edge_classes is not None else label_classes(G1)
    M, constant, info = _class_bound(G1, G2, m, classes)
    D1 = G1.distances()
    D2 = G2.distances()[np.ix_(m, m)]
    ok, w = _pairwise_le(D2, G2.scale, D1, G1.scale, M)
    rep = LipschitzReport(M, ok, constant, w, classes={"forward": info})
    if inverse is not None:
        inv = _as_map(inverse, G2.n, G1.n)
        iclasses = inverse_classes if inverse_classes is not None else label_classes(G2)
        Mi, iconst, iinfo = _class_bound(G2, G1, inv, iclasses)
        okb, wb = _pairwise_le(D1, G1.scale, D2, G2.scale, Mi)
        rep.M_inverse, rep.backward_ok, rep.backward_witness = Mi, okb, wb
        rep.classes["backward"] = iinfo
        rep.class_constant = constant and iconst
    return rep


def coset_tree_association(cos: LabeledGraph, tree: LabeledGraph) -> tuple[list[int], list[int]]:
    """Canonical bijection between a coset ball of an HNN extension rel its base and a Bass-Serre ball.

    Coset vertices ``(0, key)`` and tree vertices ``("H", key)`` name the same
    coset ``gH``.  Raises KeyError when the two balls do not cover the same cosets.
    """
    fwd = [tree.index[("H", k[1])] for k in cos.keys]
    back = [cos.index[(0, k[1])] for k in tree.keys]
    return fwd, back
