"""Acceptance criteria, one test per criterion, each at its stated tolerance."""

import io
import json
import time

import numpy as np

from flatmoduli.cli import run
from flatmoduli.errors import ExcludedSurface, ImageViolation
from flatmoduli.homotopy import GroupPath, certify_path, deform_to_semisimple, path_even, path_odd
from flatmoduli.lie_core import GroupElement, GroupSpec, haar_sample
from flatmoduli.rootsys import (
    TEST_MATRIX,
    build_root_system,
    build_weyl_element,
    cyclic_element,
    solve_translation,
    torus_representative,
    verify_no_unit_eigenvalue,
)
from flatmoduli.solver import SolverConfig, commutator_preimage, solve_relation
from flatmoduli.surface import SurfaceSig, TuplePoint, commutator_mu
from flatmoduli.topology import (
    FiniteAbelianGroup,
    all_abelian_groups,
    component_label,
    count_components,
    lift_obstruction,
    obstruction,
    quotient_by_squares,
    squares_quotient_enumerated,
    squares_quotient_formula,
)


def _near_set(values, allowed, tol=1e-10):
    allowed = np.asarray(allowed)
    return all(np.min(np.abs(allowed - z)) <= tol for z in values)


def test_criterion_1_weyl_table(criterion):
    start = time.perf_counter()
    failures = []
    for t, r in TEST_MATRIX:
        w = build_weyl_element(build_root_system(t, r))
        rep = verify_no_unit_eigenvalue(w)
        ev = w.eigenvalues
        if not rep.root_permutation_ok or rep.min_distance_to_1 < 0.5:
            failures.append(f"{t}{r}: permuted={rep.root_permutation_ok} min={rep.min_distance_to_1:.3g}")
        if t == "A":
            expect = np.exp(2j * np.pi * np.arange(1, r + 1) / (r + 1))
            if len(ev) != r or not _near_set(expect, ev) or not _near_set(ev, expect):
                failures.append(f"A{r} spectrum")
        if (t == "D" and r % 2) or (t, r) == ("E", 7):
            if not _near_set(ev, [1j, -1j, -1]):
                failures.append(f"{t}{r} spectrum {np.round(ev, 6)}")
        if t == "G":
            expect = [np.exp(2j * np.pi / 3), np.exp(-2j * np.pi / 3)]
            if not (_near_set(ev, expect) and _near_set(expect, ev)):
                failures.append("G2 spectrum")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 5
    criterion(1, "Weyl table", ok, f"{len(TEST_MATRIX)} systems, {elapsed:.2f}s; {failures or 'no failures'}")


def test_criterion_2_translation_identity(criterion):
    worst = 0.0
    for idx, (t, r) in enumerate(TEST_MATRIX):
        rs = build_root_system(t, r)
        w = build_weyl_element(rs)
        rng = np.random.default_rng(idx)
        for _ in range(100):
            xi = rs.span_basis @ rng.standard_normal(r)
            xp = solve_translation(w, xi)
            worst = max(worst, np.linalg.norm(w.matrix @ xp - xp - xi))
    group_worst = 0.0
    for n in (2, 3, 4):
        w = cyclic_element(n)
        a = torus_representative(GroupSpec("SU", n), w).mat
        rng = np.random.default_rng(100 + n)
        for _ in range(20):
            xi = rng.standard_normal(n)
            xi -= xi.mean()
            xp = solve_translation(w, xi)
            for s in (0.25, 0.5, 1.0):
                lhs = a @ np.diag(np.exp(1j * s * xp)) @ a.conj().T @ np.diag(np.exp(-1j * s * xp))
                group_worst = max(group_worst, np.linalg.norm(lhs - np.diag(np.exp(1j * s * xi))))
    ok = worst <= 1e-10 and group_worst <= 1e-10
    criterion(2, "translation identity", ok, f"linear {worst:.2e}, group {group_worst:.2e}")


def test_criterion_3_image_of_mu(criterion):
    start = time.perf_counter()
    spec = GroupSpec("U", 3)
    rng = np.random.default_rng(3)
    det_worst = 0.0
    for i in range(1000):
        genus = 1 + i % 3
        handles = [(haar_sample(spec, rng), haar_sample(spec, rng)) for _ in range(genus)]
        det_worst = max(det_worst, abs(commutator_mu(handles).det() - 1))
    successes = {}
    for n in (2, 3):
        su = GroupSpec("SU", n)
        hits = 0
        for i in range(100):
            g = haar_sample(su, [n, i])
            rep = commutator_preimage(g, 1, SolverConfig(seed=(n, i)))
            if rep.converged and rep.residual <= 1e-6:
                mu = commutator_mu(rep.solution.handles)
                hits += np.linalg.norm(mu.mat - g.mat) <= 1e-6
        successes[n] = hits
    elapsed = time.perf_counter() - start
    ok = det_worst <= 1e-10 and successes[2] >= 99 and successes[3] >= 95 and elapsed < 600
    criterion(3, "image of mu", ok,
              f"max |det mu - 1| = {det_worst:.2e}; SU(2) {successes[2]}/100, SU(3) {successes[3]}/100; {elapsed:.1f}s")


def test_criterion_4_obstruction_well_defined(criterion):
    spec = GroupSpec("U", 2)
    sig = SurfaceSig.from_crosscaps(5)
    det_worst, changed, unsolved = 0.0, 0, 0
    rng = np.random.default_rng(4)
    for seed in range(50):
        rep = solve_relation(sig, spec, None, SolverConfig(seed=seed))
        if not rep.converged:
            unsolved += 1
            continue
        x = rep.solution
        d = x.crosscap_gens[0].det()
        det_worst = max(det_worst, min(abs(d - 1), abs(d + 1)))
        base = obstruction(x)
        for _ in range(20):
            if obstruction(x.conjugate_by(haar_sample(spec, rng))) != base:
                changed += 1
    ok = unsolved == 0 and det_worst <= 1e-8 and changed == 0
    criterion(4, "obstruction well-defined", ok,
              f"50 solves, {unsolved} unsolved, max dist of det(c) to +-1 = {det_worst:.2e}, {changed} class changes")


def _census(sig, spec, seeds=20):
    labels = set()
    targets = [None] if spec.dim_S == 0 else [None, (0,), (1,)]
    for target in targets:
        for seed in range(seeds):
            rep = solve_relation(sig, spec, target, SolverConfig(seed=seed))
            if rep.converged:
                labels.add(component_label(rep.solution))
    return labels


def test_criterion_5_component_census(criterion):
    rows, ok = [], True
    for n in (1, 2, 3):
        for k in (3, 5):
            spec, sig = GroupSpec("U", n), SurfaceSig.from_crosscaps(k)
            found = len(_census(sig, spec))
            expect = count_components(sig, spec).components
            ok &= found == expect == 2
            rows.append(f"U({n}) k={k}: {found}/{expect}")
    for n in (2, 3):
        for k in (3, 5):
            spec, sig = GroupSpec("SU", n), SurfaceSig.from_crosscaps(k)
            found = len(_census(sig, spec))
            expect = count_components(sig, spec).components
            ok &= found == expect == 1
            rows.append(f"SU({n}) k={k}: {found}/{expect}")

    so3, torus = GroupSpec("SO3"), SurfaceSig.from_genus(1)
    lifts = set()
    for seed in range(20):
        for target in (None, 1, -1):
            rep = solve_relation(torus, so3, None, SolverConfig(seed=seed), target_lift=target)
            if rep.converged:
                lifts.add(lift_obstruction(rep.solution))
    a = GroupElement(so3, np.diag([1.0, -1.0, -1.0]))
    b = GroupElement(so3, np.diag([-1.0, 1.0, -1.0]))
    pi_pair = lift_obstruction(TuplePoint.from_elements(torus, so3, [a, b]))
    expect = count_components(torus, so3).components
    ok &= len(lifts) == expect == 2 and pi_pair == -1
    rows.append(f"SO(3) genus 1: {len(lifts)}/{expect}, pi pair -> {pi_pair}")
    criterion(5, "component census", ok, "; ".join(rows))


def test_criterion_6_finite_abelian_oracle(criterion):
    checked, mismatches = 0, []
    for order in range(1, 65):
        for g in all_abelian_groups(order):
            checked += 1
            if squares_quotient_formula(g) != squares_quotient_enumerated(g):
                mismatches.append(g.label())
    spots = {
        (2,): 2,
        (9,): 1,
        (2, 4): 4,
    }
    spot_ok = all(quotient_by_squares(FiniteAbelianGroup.from_cyclic_orders(k)) == v for k, v in spots.items())
    ok = not mismatches and spot_ok
    criterion(6, "finite abelian oracle", ok, f"{checked} groups of order <= 64, mismatches {mismatches}, spots ok={spot_ok}")


def _admissible_c(spec, seed):
    rng = np.random.default_rng([7, seed])
    m = haar_sample(GroupSpec("SU", spec.n), rng).mat
    if spec.family == "U" and rng.random() < 0.5:
        m = -m  # det = -1, lift -I (n odd)
    return GroupElement(spec, m)


def test_criterion_7_path_certification(criterion):
    rows, ok = [], True

    mu_worst = 0.0
    for i in range(20):
        spec = GroupSpec("U", 2 + i % 2)
        sig = SurfaceSig.from_genus(1 + i % 3)
        rng = np.random.default_rng([70, i])
        x = TuplePoint.from_elements(sig, spec, [haar_sample(spec, rng) for _ in range(sig.arity)])
        p = deform_to_semisimple(x, 100)
        mu_worst = max(mu_worst, float(np.max(p.residuals)))
        ok &= certify_path(p).certified
    ok &= mu_worst <= 1e-10
    rows.append(f"deform: max mu drift {mu_worst:.2e}")

    specs = [GroupSpec("SU", 2), GroupSpec("SU", 3), GroupSpec("U", 3)]
    constancy = 0.0
    for name, build in (("odd", "odd"), ("even", "even")):
        res_worst = end_worst = 0.0
        certified = 0
        for i in range(20):
            spec = specs[i % 3]
            if build == "odd":
                p = path_odd(_admissible_c(spec, i), SurfaceSig.from_crosscaps(3 + 2 * (i % 2)), 100)
            else:
                c1, c2 = _admissible_c(spec, 100 + i), _admissible_c(spec, 200 + i)
                p = path_even(c1, c2, SurfaceSig.from_crosscaps(6 + 2 * (i % 2)), 100)
            cert = certify_path(p)
            certified += cert.certified
            res_worst = max(res_worst, cert.max_residual)
            end_worst = max(end_worst, cert.max_endpoint_error)
            constancy = max(constancy, cert.relation_constancy)
        ok &= certified == 20 and res_worst <= 1e-8 and end_worst <= 1e-9
        rows.append(f"{name}: {certified}/20 certified, residual {res_worst:.2e}, endpoint {end_worst:.2e}")

    demos = [
        path_odd(GroupElement(GroupSpec("U", 2), np.diag([1.0, -1.0])), SurfaceSig.from_crosscaps(3), strict=False),
        path_odd(GroupElement(GroupSpec("U", 4), -haar_sample(GroupSpec("SU", 4), 1).mat @ np.diag([1, 1, 1, -1])),
                 SurfaceSig.from_crosscaps(5), strict=False),
        path_even(GroupElement(GroupSpec("U", 2), np.diag([1.0, 1j])), GroupElement(GroupSpec("U", 2), np.diag([1.0, 1j])),
                  SurfaceSig.from_crosscaps(6), strict=False),
    ]
    demo_const = max(p.relation_constancy() for p in demos)
    demo_uncertified = sum(not certify_path(p).certified for p in demos)
    constancy = max(constancy, demo_const)
    ok &= constancy <= 1e-8 and demo_uncertified == len(demos)
    rows.append(f"relation == k~^2 within {constancy:.2e} (inadmissible demos {demo_const:.2e}, {demo_uncertified} left the variety)")
    criterion(7, "path certification", ok, "; ".join(rows))


def test_criterion_8_negative_controls(criterion):
    rows, ok = [], True
    for k in (1, 2, 4):
        try:
            count_components(SurfaceSig.from_crosscaps(k), GroupSpec("U", 2))
            raised = False
        except ExcludedSurface:
            raised = True
        out = io.StringIO()
        code = run(["count", "--surface", f"crosscaps={k}", "--group", "U:2", "--json"], stdout=out)
        reason = json.loads(out.getvalue()).get("reason")
        ok &= raised and code == 2 and reason == "excluded_surface_k_in_{1,2,4}"
        rows.append(f"k={k} excluded={raised} cli exit {code}")

    refused = 0
    for seed in range(10):
        g = haar_sample(GroupSpec("U", 2), seed)
        try:
            commutator_preimage(g, 1)
        except ImageViolation:
            refused += 1
    ok &= refused == 10
    rows.append(f"ImageViolation {refused}/10")

    p = path_odd(_admissible_c(GroupSpec("U", 3), 0), SurfaceSig.from_crosscaps(3), 50)
    caught = 0
    for idx in (0, 25, 50):
        pts = list(p.points)
        els = pts[idx].elements
        els[-1] = GroupElement(els[-1].spec, els[-1].mat @ np.diag(np.exp(1j * np.array([1e-4, 0, 0]))))
        pts[idx] = TuplePoint.from_elements(pts[idx].sig, pts[idx].spec, els)
        bad = GroupPath(p.ts, pts, p.tag, p.fiber, p.targets, p.lift_square)
        caught += not certify_path(bad).certified
    ok &= caught == 3 and certify_path(p).certified
    rows.append(f"corrupted paths rejected {caught}/3")
    criterion(8, "negative controls", ok, "; ".join(rows))
