"""Exhaustive checks of the structural facts every tower must satisfy.

Each check instantiates its hypothesis over every tuple up to a depth and
confirms the conclusion.  A counterexample means the tower code is wrong.

Checks, by key:

``basic_equivalence``
    two distinct presentations ``(w, xi)``, ``(w', xi')`` of one point
    agree up to some position k, their tails land on embedded X0 points
    ``xi0``, ``xi0'`` and ``pi(w_k, xi0) == pi(w'_k, xi0')``.
``gluing_level``
    such a point lies in the image of level k.
``fresh_point_unique``
    a point of level n >= 2 outside the image of level n-1 has exactly
    one preimage in ``Y x X_{n-1}`` and in ``Y^{n-1} x X1``, and all its
    preimages in ``Y^n x X0`` share the first n-1 symbols.
``embedded_tail_x0`` / ``embedded_tail_xm``
    if ``(w, xi)`` projects onto an embedded X0 (resp. ``X_m``, ``m = |w|``)
    point then ``xi`` is an embedded X0 point.
``embedded_predecessor``
    if ``project(y, xi)`` is embedded from ``X_n`` then ``xi`` is embedded from ``X_{n-1}``.
``discrete_cells``
    for discrete schemes, every cell meets the previous level in at most one point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .scheme import is_discrete
from .tower import Tower, decompose, index_word, project_word, projection_table

CHECKS = (
    "basic_equivalence",
    "gluing_level",
    "fresh_point_unique",
    "embedded_tail_x0",
    "embedded_tail_xm",
    "embedded_predecessor",
    "discrete_cells",
)


@dataclass
class AuditReport:
    maxdepth: int
    counts: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CHECKS, 0))
    counterexamples: list[tuple[str, str]] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def fail(self, check: str, message: str) -> None:
        self.counterexamples.append((check, message))


def _image(tower: Tower, n: int, m: int) -> np.ndarray:
    """Boolean mask over ``X_n`` of the image of ``X_m``."""
    ids = np.arange(tower.level(m).size)
    for j in range(m + 1, n + 1):
        ids = tower.levels[j].emb[ids]
    mask = np.zeros(tower.level(n).size, dtype=bool)
    mask[ids] = True
    return mask


def _audit_equivalence(tower: Tower, report: AuditReport, n: int, m: int) -> None:
    scheme = tower.scheme
    k, q = len(scheme.Y), n - m
    size_q = tower.level(q).size
    table = projection_table(tower, m, q).ravel()
    order = np.argsort(table, kind="stable")
    bounds = np.flatnonzero(np.diff(table[order])) + 1
    level1 = tower.level(1).proj
    images = {j: _image(tower, n, j) for j in range(1, m + 1)}
    for group in np.split(order, bounds):
        if len(group) < 2:
            continue
        target = int(table[group[0]])
        members = [(index_word(int(e) // size_q, m, k), int(e) % size_q) for e in group]
        for left, right in combinations(members, 2):
            report.counts["basic_equivalence"] += 1
            try:
                wit = decompose(tower, n, left, right)
            except RuntimeError as exc:
                report.fail("basic_equivalence", f"n={n} pair {left} {right}: {exc}")
                continue
            (w, xi), (w2, xi2) = left, right
            j = wit.k
            emb0 = tower.level(n - j).emb0
            ok = (
                w[: j - 1] == w2[: j - 1]
                and project_word(tower, w[j:], q, xi) == emb0[wit.xi0]
                and project_word(tower, w2[j:], q, xi2) == emb0[wit.xi0prime]
                and level1[w[j - 1], wit.xi0] == level1[w2[j - 1], wit.xi0prime]
            )
            if not ok:
                report.fail("basic_equivalence", f"n={n} pair {left} {right} witness {wit}")
            report.counts["gluing_level"] += 1
            if not images[j][target]:
                report.fail("gluing_level", f"n={n} point {target} not embedded from level {j}")


def _audit_embedded_tails(tower: Tower, report: AuditReport, n: int, m: int) -> None:
    q = n - m
    table = projection_table(tower, m, q)
    tail_ok = _image(tower, q, 0)
    for check, source in (("embedded_tail_x0", 0), ("embedded_tail_xm", m)):
        hits = _image(tower, n, source)[table]
        report.counts[check] += int(hits.sum())
        bad = hits & ~tail_ok[None, :]
        if bad.any():
            wi, xi = map(int, np.argwhere(bad)[0])
            report.fail(check, f"n={n} m={m} word#{wi} tail {xi} not embedded from X0")


def _audit_predecessor(tower: Tower, report: AuditReport, n: int) -> None:
    proj = tower.level(n + 1).proj
    hits = _image(tower, n + 1, n)[proj]
    report.counts["embedded_predecessor"] += int(hits.sum())
    bad = hits & ~_image(tower, n, n - 1)[None, :]
    if bad.any():
        y, xi = map(int, np.argwhere(bad)[0])
        report.fail("embedded_predecessor", f"n={n} (y={y}, xi={xi})")


def _audit_fresh(tower: Tower, report: AuditReport, n: int) -> None:
    scheme = tower.scheme
    k = len(scheme.Y)
    lv = tower.level(n)
    full = projection_table(tower, n, 0)
    via_x1 = projection_table(tower, n - 1, 1)
    x1_counts = np.bincount(via_x1.ravel(), minlength=lv.size)
    level1 = tower.level(1).proj
    for x in sorted(lv.fresh):
        report.counts["fresh_point_unique"] += 1
        rows, cols = np.nonzero(full == x)
        pres = [(index_word(int(r), n, k), int(c)) for r, c in zip(rows, cols)]
        ok = len(lv.fibers[x]) == 1 and x1_counts[x] == 1
        for (w, x0), (w2, x02) in combinations(pres, 2):
            if w[:-1] != w2[:-1] or level1[w[-1], x0] != level1[w2[-1], x02]:
                ok = False
        if not ok:
            report.fail("fresh_point_unique", f"n={n} point {lv.names[x]}")


def _audit_discrete(tower: Tower, report: AuditReport, n: int) -> None:
    previous = _image(tower, n, n - 1)
    table = projection_table(tower, n, 0)
    for i, row in enumerate(table):
        report.counts["discrete_cells"] += 1
        if len({int(v) for v in row if previous[v]}) > 1:
            report.fail("discrete_cells", f"n={n} cell word#{i}")


def lemma_audit(tower: Tower, maxdepth: int) -> AuditReport:
    report = AuditReport(maxdepth)
    if maxdepth <= 0:
        return report
    tower = tower.upto(maxdepth)
    discrete, _ = is_discrete(tower.scheme)
    if not discrete:
        report.skipped.append("discrete_cells")
    for n in range(1, maxdepth + 1):
        for m in range(1, n + 1):
            _audit_equivalence(tower, report, n, m)
            _audit_embedded_tails(tower, report, n, m)
        if n + 1 <= maxdepth:
            _audit_predecessor(tower, report, n)
        if n >= 2:
            _audit_fresh(tower, report, n)
        if discrete:
            _audit_discrete(tower, report, n)
    return report
