import numpy as np
import pytest

from flatmoduli.errors import ExcludedSurface, ImageViolation, NoConvergence, UnsupportedGroup
from flatmoduli.lie_core import GroupElement, GroupSpec, haar_sample
from flatmoduli.solver import (
    SolverConfig,
    SolverReport,
    commutator_preimage,
    require_converged,
    solve_relation,
    with_seed,
)
from flatmoduli.surface import SurfaceSig, commutator_mu, relation_residual, relation_value
from flatmoduli.topology import lift_obstruction, obstruction

U2, SU2, SU3 = GroupSpec("U", 2), GroupSpec("SU", 2), GroupSpec("SU", 3)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)
    with pytest.raises(ValueError):
        SolverConfig(residual_tol=1.5)
    assert SolverConfig(seed=3).seed_for(1, 2) == [3, 1, 2]
    assert SolverConfig(seed=(3, 4)).seed_for(5) == [3, 4, 5]


def test_preimage_of_identity_is_trivial():
    rep = commutator_preimage(GroupElement.identity(SU2), 1)
    assert rep.converged and rep.residual == 0
    assert all(np.array_equal(g.mat, np.eye(2)) for g in rep.solution.elements)


def test_preimage_of_diagonal_su2():
    g = GroupElement(SU2, np.diag([1j, -1j]))
    rep = commutator_preimage(g, 1)
    assert rep.converged and rep.residual <= 1e-6
    mu = commutator_mu(rep.solution.handles)
    assert np.linalg.norm(mu.mat - g.mat) <= 1e-6


def test_preimage_refuses_targets_off_the_image():
    with pytest.raises(ImageViolation) as err:
        commutator_preimage(GroupElement(U2, np.diag([1.0, -1.0])), 1)
    assert err.value.reason == "image_violation_det_not_1"


def test_preimage_needs_a_handle():
    with pytest.raises(ValueError):
        commutator_preimage(GroupElement.identity(SU2), 0)


def test_preimage_in_u_with_det_one_target():
    g = GroupElement(U2, haar_sample(SU2, 5).mat)
    rep = commutator_preimage(g, 1)
    assert rep.converged
    assert abs(commutator_mu(rep.solution.handles).det() - 1) < 1e-10


@pytest.mark.parametrize("bits", [(0,), (1,)])
def test_u2_crosscaps3_both_classes(bits):
    rep = solve_relation(SurfaceSig.from_crosscaps(3), U2, bits, SolverConfig(seed=1))
    assert rep.converged and rep.residual <= 1e-6
    assert obstruction(rep.solution).bits == bits
    det = rep.solution.crosscap_gens[0].det()
    assert abs(det - (-1 if bits[0] else 1)) < 1e-8


def test_solutions_are_polished():
    rep = solve_relation(SurfaceSig.from_crosscaps(5), GroupSpec("U", 3), (1,))
    assert rep.converged and rep.residual <= 1e-9


def test_unitarity_drift_is_small():
    rep = solve_relation(SurfaceSig.from_crosscaps(6), U2, (0,), SolverConfig(seed=4))
    for g in rep.solution.elements:
        assert np.linalg.norm(g.mat.conj().T @ g.mat - np.eye(2)) < 1e-9


def test_determinism():
    cfg = SolverConfig(seed=17)
    a = solve_relation(SurfaceSig.from_crosscaps(5), U2, None, cfg)
    b = solve_relation(SurfaceSig.from_crosscaps(5), U2, None, cfg)
    assert a.residual == b.residual and a.iters == b.iters
    assert np.array_equal(a.solution.arrays(), b.solution.arrays())
    c = solve_relation(SurfaceSig.from_crosscaps(5), U2, None, with_seed(cfg, 18))
    assert not np.array_equal(a.solution.arrays(), c.solution.arrays())


def test_objective_is_monotone():
    rep = solve_relation(SurfaceSig.from_genus(2), SU3, None, SolverConfig(seed=2), keep_history=True)
    h = np.array(rep.history)
    assert len(h) > 1
    assert np.all(np.diff(h) <= 1e-15)


def test_relation_det_is_always_a_square_of_crosscaps():
    # mu lands in SU(n), so det(relation) = det(c)^2 no matter how the solve went
    for seed in range(5):
        rep = solve_relation(SurfaceSig.from_crosscaps(3), U2, None, SolverConfig(seed=seed))
        x = rep.solution
        assert abs(relation_value(x).det() - x.crosscap_gens[0].det() ** 2) < 1e-10


def test_excluded_surfaces_refused():
    for k in (1, 2, 4):
        with pytest.raises(ExcludedSurface):
            solve_relation(SurfaceSig.from_crosscaps(k), U2)


def test_bad_targets():
    with pytest.raises(ValueError):
        solve_relation(SurfaceSig.from_crosscaps(3), U2, (0, 1))
    with pytest.raises(UnsupportedGroup):
        solve_relation(SurfaceSig.from_crosscaps(3), U2, target_lift=-1)


@pytest.mark.parametrize("lift", [1, -1])
def test_so3_targeted_lift_classes(lift):
    rep = solve_relation(SurfaceSig.from_genus(1), GroupSpec("SO3"), target_lift=lift)
    assert rep.converged
    assert np.isrealobj(rep.solution.elements[0].mat)
    assert lift_obstruction(rep.solution) == lift


def test_nonconvergence_is_reported():
    cfg = SolverConfig(max_iters=1, restarts=1, residual_tol=1e-14, polish_below=1e-300)
    rep = solve_relation(SurfaceSig.from_crosscaps(5), U2, None, cfg)
    assert not rep.converged and rep.solution is None
    with pytest.raises(NoConvergence):
        require_converged(rep)


def test_report_json():
    rep = solve_relation(SurfaceSig.from_crosscaps(3), U2, (1,))
    d = rep.to_json()
    assert d["converged"] is True and d["solution"]["spec"] == {"family": "U", "n": 2}
    assert isinstance(rep, SolverReport)
    assert relation_residual(rep.solution) == pytest.approx(rep.residual, abs=1e-12)
