import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from imcmoead.algorithm import (
    CONJUNCTIVE,
    AlgoConfig,
    conjunctive_survives,
    global_replacement_pass,
    offspring_survives,
    random_search,
    replace_conjunctive,
    replace_with_constraints,
    run,
)
from imcmoead.core import Problem, Solution, get_problem, nondominated_mask
from imcmoead.metrics import hypervolume_exact
from imcmoead.weights import WeightLattice, build_neighborhoods

LAM = np.array([0.5, 0.5])
Z = np.zeros(2)


def sol(f, cv=0.0):
    f = np.asarray(f, dtype=float)
    return Solution(x=f.copy(), f=f, g=np.zeros(1), h=np.zeros(0), cv=cv, feasible=cv == 0.0)


def test_infeasible_offspring_loses_to_feasible_incumbent():
    o, x = sol([0, 0], cv=0.5), sol([9, 9])
    assert replace_with_constraints(o, x, LAM, Z) is x


def test_feasible_offspring_beats_infeasible_incumbent():
    o, x = sol([9, 9]), sol([0, 0], cv=0.5)
    assert replace_with_constraints(o, x, LAM, Z) is o


def test_lower_violation_wins():
    o, x = sol([9, 9], cv=0.1), sol([0, 0], cv=0.5)
    assert replace_with_constraints(o, x, LAM, Z) is o


def test_better_tch_wins():
    # TCH(o) = 0.5 * 0.6 = 0.3, TCH(x) = 0.5 * 0.8 = 0.4
    o, x = sol([0.6, 0.2]), sol([0.8, 0.1])
    assert replace_with_constraints(o, x, LAM, Z) is o
    assert replace_with_constraints(x, o, LAM, Z) is o


def test_ties_keep_incumbent():
    assert replace_with_constraints(sol([1, 1]), x := sol([1, 1]), LAM, Z) is x
    assert replace_with_constraints(sol([0, 0], 0.2), x := sol([1, 1], 0.2), LAM, Z) is x


def test_conjunctive_blocks_feasible_offspring_with_worse_tch():
    o, x = sol([9, 9]), sol([0, 0], cv=0.5)
    assert replace_conjunctive(o, x, LAM, Z) is x
    assert replace_conjunctive(sol([0, 0]), x, LAM, Z).f[0] == 0


@given(
    st.booleans(), st.floats(0, 5), st.floats(0, 5),
    st.booleans(), st.floats(0, 5), st.floats(0, 5),
)
def test_feasible_never_replaced_by_infeasible(of, ocv, otch, xf, xcv, xtch):
    ocv = 0.0 if of else ocv + 0.01
    xcv = 0.0 if xf else xcv + 0.01
    if xf and not of:
        assert not offspring_survives(of, ocv, otch, xf, xcv, xtch)
        assert not conjunctive_survives(of, ocv, otch, xf, xcv, xtch)


def lattice_2d(weights, T):
    W = np.array(weights, dtype=float)
    return WeightLattice(W, len(W) - 1, T, build_neighborhoods(W, T))


def test_pass_dominated_offspring_no_replacement():
    lat = lattice_2d([(1, 0), (0.5, 0.5), (0, 1)], 2)
    pop = [sol([0.1, 0.9], 0.1), sol([0.5, 0.5], 0.1), sol([0.9, 0.1], 0.1)]
    before = list(pop)
    assert global_replacement_pass(sol([5, 5], 1.0), pop, lat, Z) == 0
    assert all(a is b for a, b in zip(pop, before))


def test_pass_feasible_offspring_takes_whole_infeasible_neighborhood():
    lat = lattice_2d([(1, 0), (0.75, 0.25), (0.5, 0.5), (0.25, 0.75), (0, 1)], 3)
    pop = [sol([i, 4 - i], 0.3) for i in range(5)]
    o = sol([3, 3])
    assert global_replacement_pass(o, pop, lat, Z) == 3
    assert sum(p is o for p in pop) == 3


def test_pass_hand_trace_one_replacement():
    # o = (0.4, 0.4) has TCH 0.2 at weight 1, best among all three weights.
    # B(1) = [1, 0] (tie with 2 goes to the lower index).
    # slot 1 (0.5, 0.5): TCH 0.25 > 0.2, replaced
    # slot 0 (0.1, 0.9) under weight (1, 0): max(0.1, 0.9e-6) = 0.1 < 0.4, kept
    lat = lattice_2d([(1, 0), (0.5, 0.5), (0, 1)], 2)
    assert list(lat.neighborhoods[1]) == [1, 0]
    pop = [sol([0.1, 0.9]), sol([0.5, 0.5]), sol([0.9, 0.1])]
    o = sol([0.4, 0.4])
    assert global_replacement_pass(o, pop, lat, Z) == 1
    assert pop[1] is o and pop[0].f[0] == 0.1 and pop[2].f[0] == 0.9


def test_pass_conjunctive_rule():
    lat = lattice_2d([(1, 0), (0.5, 0.5), (0, 1)], 2)
    pop = [sol([0.1, 0.9], 0.3), sol([0.05, 0.05], 0.3), sol([0.9, 0.1], 0.3)]
    assert global_replacement_pass(sol([0.4, 0.4]), pop, lat, Z, CONJUNCTIVE) == 0


def test_budget_smaller_than_population():
    with pytest.raises(ValueError, match="budget"):
        run(get_problem("BNH"), AlgoConfig(N=40, max_fe=39))


def test_config_validation():
    with pytest.raises(ValueError):
        AlgoConfig(replacement="bogus")
    assert AlgoConfig().group_size(2) == 2 and AlgoConfig().group_size(6) == 3
    assert AlgoConfig(L=1).group_size(6) == 1
    assert AlgoConfig().mutation_probability(4) == 0.25


@pytest.mark.parametrize("max_fe", [400, 437, 479])
def test_run_invariants(max_fe):
    trace = []
    cfg = AlgoConfig(N=40, max_fe=max_fe, K=5, seed=3)
    pop, hist = run(get_problem("CONSTR-RING"), cfg, lambda s, p: trace.append(list(p)))
    assert len(pop) == 40 and all(len(p) == 40 for p in trace)
    assert hist[-1].fe_used == max_fe
    fes = [h.fe_used for h in hist]
    assert fes[0] == 40 and all(b - a == 40 for a, b in zip(fes[:-2], fes[1:-1]))
    zs = np.array([h.z for h in hist])
    assert np.all(np.diff(zs, axis=0) <= 0)
    for before, after in zip(trace, trace[1:]):
        for a, b in zip(before, after):
            assert not (a.feasible and not b.feasible)


def test_run_deterministic():
    cfg = AlgoConfig(N=20, max_fe=300, K=4, seed=11)
    p = get_problem("OSY")
    a, ha = run(p, cfg)
    b, hb = run(p, cfg)
    np.testing.assert_array_equal([s.x for s in a], [s.x for s in b])
    assert [h.to_dict() for h in ha] == [h.to_dict() for h in hb]
    c, _ = run(p, AlgoConfig(N=20, max_fe=300, K=4, seed=12))
    assert not np.array_equal([s.x for s in a], [s.x for s in c])


def always_infeasible():
    return Problem(
        "INFEASIBLE",
        2,
        2,
        1,
        0,
        [0, 0],
        [1, 1],
        lambda x: (np.array([x[0], 1 - x[0] + x[1]]), np.array([1.0 + x[1]]), np.zeros(0)),
    )


def test_infeasible_problem_mean_cv_non_increasing():
    _, hist = run(always_infeasible(), AlgoConfig(N=20, max_fe=1000, K=3, seed=0))
    cv = [h.mean_cv for h in hist]
    assert all(b <= a for a, b in zip(cv, cv[1:]))
    assert all(h.feasible_count == 0 for h in hist)


def test_sphere2_convergence():
    problem = get_problem("SPHERE-2")
    pop, _ = run(problem, AlgoConfig(N=40, max_fe=5000, seed=0))
    F = np.array([s.f for s in pop if s.feasible])
    F = F[nondominated_mask(F)]
    t = np.linspace(0, 1, 10001)
    front = np.stack([t**2, (t - 1) ** 2], axis=1)
    ref = (1.1, 1.1)
    assert hypervolume_exact(F, ref) >= 0.95 * hypervolume_exact(front, ref)


def test_snapshots(tmp_path):
    cfg = AlgoConfig(N=10, max_fe=30, K=2, seed=0, snapshot_dir=str(tmp_path))
    run(get_problem("BNH"), cfg)
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == ["gen_00000.csv", "gen_00001.csv", "gen_00002.csv"]
    lines = (tmp_path / "gen_00000.csv").read_text().splitlines()
    assert lines[0] == "x0,x1,f0,f1,cv" and len(lines) == 11


def test_random_search_baseline():
    pop, hist = random_search(get_problem("BNH"), AlgoConfig(N=30, max_fe=650, seed=0))
    assert len(pop) <= 30
    assert hist[-1].fe_used == 650
    F = np.array([s.f for s in pop if s.feasible])
    assert np.all(nondominated_mask(F))
