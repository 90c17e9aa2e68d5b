"""Exit criteria for the build, one test per criterion at the stated tolerances."""
import math
import time
from fractions import Fraction as F

import numpy as np
import pytest

from flagricci import curvature as cv
from flagricci import dynamics as dy
from flagricci import flow as fl
from flagricci import lie_algebra as la
from flagricci.polynomial import RatPoly
from flagricci.spaces import FlagSpace

pytestmark = pytest.mark.acceptance

W = FlagSpace(1, 1)


def interior_metrics(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x, y = rng.uniform(0.02, 0.96, 2)
        if x + y < 0.98:
            out.append((x, y, 1 - x - y))
    return out


def simplex_samples(n, seed):
    return [(x, y) for x, y, _ in interior_metrics(n, seed)]


SAMPLES = interior_metrics(100, seed=2024)


def test_c01_sectional_table_matches_oracle(criterion):
    t0 = time.perf_counter()
    worst, worst_variant = 0.0, 0.0
    for g in SAMPLES:
        K = la.sectional_matrix(g)
        T = cv.sectional_table(g)
        P = cv.sectional_table(g, variant_row_25=True)
        for i in range(1, 7):
            for j in range(i + 1, 7):
                worst = max(worst, abs(K[i - 1, j - 1] - T[i, j]) / max(1.0, abs(T[i, j])))
        worst_variant = max(worst_variant, abs(K[1, 4] - P[2, 5]))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 1.0 and worst_variant > 1e-3
    criterion(1, ok, f"max rel err {worst:.1e} over 100 metrics in {elapsed:.2f}s; "
                     f"row (2,5): oracle gives 1/16, the 1/8 variant is off by up to {worst_variant:.2g}")


def test_c02_ricci_consistency(criterion):
    worst = 0.0
    for g in SAMPLES:
        r = np.array(cv.ricci_components(W, g).values, dtype=float)
        sums = la.sectional_matrix(g).sum(axis=1)
        worst = max(worst, float(np.max(np.abs(sums - la.KILLING_SCALE * np.repeat(r, 2)) / np.maximum(1, np.abs(sums)))))
    fam = cv.family_ricci_numerators()
    exact = tuple(n.substitute({"m": 1, "p": 1}) for n in fam) == cv.wallach_ricci_numerators()
    ok = worst < 1e-10 and exact
    criterion(2, ok, f"row sums = {la.KILLING_SCALE} r (Killing vs trace-form scale), max rel err {worst:.1e}; "
                     f"family forms at (1,1) equal the Wallach forms exactly: {exact}")


def test_c03_wallach_equilibria(criterion):
    dy._find_equilibria.cache_clear()
    t0 = time.perf_counter()
    eqs = dy.find_equilibria(W)
    elapsed = time.perf_counter() - t0
    want = [((F(1, 4), F(1, 4)), dy.SADDLE), ((F(1, 3), F(1, 3)), dy.REPELLER),
            ((F(1, 4), F(1, 2)), dy.SADDLE), ((F(1, 2), F(1, 4)), dy.SADDLE)]
    matched = 0
    for (px, py), kind in want:
        hits = [e for e in eqs if abs(e.point.x - px) < 1e-10 and abs(e.point.y - py) < 1e-10]
        matched += len(hits) == 1 and hits[0].kind == kind
    ok = len(eqs) == 4 and matched == 4 and elapsed < 5.0
    kinds = ", ".join(f"{e.label}={e.kind}" for e in eqs)
    criterion(3, ok, f"{len(eqs)} equilibria, {matched}/4 matched within 1e-10 ({kinds}) in {elapsed:.2f}s")


def test_c04_family_equilibrium(criterion):
    errs = []
    for m, p in [(1, 1), (2, 1), (3, 2)]:
        k = (m + p) / (2 * (m + 2 * p))
        eqs = dy.find_equilibria(FlagSpace(m, p))
        errs.append(min(math.hypot(e.point.x - k, e.point.y - k) for e in eqs))
    t = RatPoly.var("t")
    Ff = fl.family_field()
    diag = {"x": t, "y": t}
    identity = (Ff.u.substitute(diag) - Ff.v.substitute(diag)).is_zero()
    ok = max(errs) < 1e-10 and identity
    criterion(4, ok, f"diagonal equilibrium errors {[f'{e:.1e}' for e in errs]}; "
                     f"u(t,t)-v(t,t) is the zero polynomial in (t,m,p): {identity}")


def test_c05_invariant_lines(criterion):
    checks = {
        "wallach diagonal": dy.invariant_line_verify(W, dy.AffineLine.diagonal()),
        "family diagonal": dy.invariant_line_verify(fl.family_field(), dy.AffineLine.diagonal()),
        "x=1/2": dy.invariant_line_verify(W, dy.AffineLine.vertical(F(1, 2))),
        "y=1/2": dy.invariant_line_verify(W, dy.AffineLine.horizontal(F(1, 2))),
    }
    ok = all(v[0] and v[1].is_zero() for v in checks.values())
    criterion(5, ok, "zero residuals: " + ", ".join(f"{k}={v[0]}" for k, v in checks.items()))


def test_c06_segment_thresholds(criterion):
    root = cv.submersion_root(W, "r_x")
    th = {d: cv.ric_d_threshold(d) for d in (1, 2, 3, 4)}
    f3 = cv.f_d((0, 2, 1), F(3, 10))
    ok = (root == (F(1, 8), F(1, 8))
          and th == {1: F(3, 10), 2: F(3, 10), 3: F(5, 18), 4: F(1, 4)}
          and f3 == F(2, 5))
    criterion(6, ok, f"r_x root {root[0]}; thresholds {', '.join(f'd={d}:{v}' for d, v in th.items())}; "
                     f"f_3(3/10) = {f3} (not 0: discrepancy)")


def test_c07_ricci_mixed_scenario(criterion):
    t0 = time.perf_counter()
    fwd = fl.integrate(W, (0.2, 0.2), "forward")
    bwd = fl.integrate(W, (0.2, 0.2), "backward")
    elapsed = time.perf_counter() - t0
    dist = fwd.min_distance_to((0.25, 0.25))
    reached = any(s.point.x == 0.25 and s.point.y == 0.25 for s in fwd.samples)
    ev = bwd.first_event("r_x")
    ok = (fwd.status in (fl.CONVERGED, fl.HORIZON) and dist < 1e-6 and not reached
          and ev is not None and abs(ev.x - 0.125) <= 1e-6 and math.isfinite(ev.time)
          and elapsed < 5.0)
    criterion(7, ok, f"forward {fwd.status}, min distance to A {dist:.1e}; backward r_x event at "
                     f"t={ev.x if ev else None!r}, time {ev.time if ev else None!r}; {elapsed:.2f}s")


def test_c08_ricd_loss_scenario(criterion):
    run = fl.integrate(W, (0.32, 0.32), "forward")
    found = {}
    for d in (1, 2, 3):
        ev = run.first_event(f"ricd_min_{d}")
        found[d] = None if ev is None else ev.x
    hits = all(found[d] is not None and abs(found[d] - float(cv.ric_d_threshold(d))) <= 1e-6 for d in found)
    ric4 = [s.signature.ricd_min[4] for s in run.samples]
    stays = run.first_event("ricd_min_4") is None and min(ric4) > 0
    ok = hits and stays
    criterion(8, ok, "loss events " + ", ".join(f"d={d} at t={v!r}" for d, v in found.items())
              + f"; min Ric_4 along the run {min(ric4):.2e} > 0 ({run.status})")


def test_c09_family_dpos_scenario(criterion):
    space = FlagSpace(2, 1)
    s_lo, s_hi = cv.submersion_root(space, "scalar")         # computed before the run
    s_root = float((s_lo + s_hi) / 2)
    run = fl.integrate(space, (0.2, 0.2), "backward")
    e1, es = run.first_event("dpos_1"), run.first_event("scalar")
    ok = (e1 is not None and es is not None
          and abs(e1.x - 0.1) <= 1e-6 and abs(es.x - s_root) <= 1e-6
          and math.isfinite(e1.time) and math.isfinite(es.time)
          and abs(es.time) > abs(e1.time))
    kind = "rational" if s_lo == s_hi else f"irrational, bracket width {float(s_hi - s_lo):.0e}"
    criterion(9, ok, f"dpos_1 at t={e1.x if e1 else None!r} time {e1.time if e1 else None!r}; "
                     f"scalar zero at t={es.x if es else None!r} vs root {s_root!r} ({kind})")


def test_c10_no_periodic_orbits(criterion):
    # generic interior starts: off the diagonal and the lines x=1/2, y=1/2
    starts = []
    for i in range(1, 9):
        for j in range(1, 9):
            x, y = i / 9 + 0.013, j / 9 + 0.007
            if x + y < 0.95 and len(starts) < 20:
                starts.append((x, y))
    statuses = [fl.integrate(W, s, "forward", horizon=200, track_events=False).status for s in starts]
    bad = [s for s, st in zip(starts, statuses) if st not in (fl.CONVERGED, fl.COLLAR)]
    ok = len(starts) == 20 and not bad
    counts = {k: statuses.count(k) for k in sorted(set(statuses))}
    criterion(10, ok, f"{len(starts)} starts terminated as {counts}")


def test_c11_normalizer(criterion):
    worst_tan = 0.0
    pts = simplex_samples(50, seed=11)
    for Wt in (fl.simplex_weight(), fl.volume_weight(W)):
        R = lambda g: fl.unnormalized_field(W, tuple(float(c) for c in g))
        N = fl.normalize_field(R, Wt)
        for x, y in pts:
            g = np.array([x, y, 1 - x - y])
            g = g / Wt.func(g) ** (1 / Wt.alpha)
            worst_tan = max(worst_tan, abs(float(np.dot(Wt.grad(g), N(g)))))
    rep = fl.field_consistency(W, simplex_samples(50, seed=12))
    ok = worst_tan < 1e-12 and rep.parallel and rep.max_angle < 1e-9 and rep.skipped == 0
    criterion(11, ok, f"tangency residual {worst_tan:.1e} (trace and volume weights); "
                      f"polynomial vs generic field: max|sin| {rep.max_angle:.1e}, min ratio {rep.min_ratio:.3g} > 0")
