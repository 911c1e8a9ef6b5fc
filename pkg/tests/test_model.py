from types import SimpleNamespace

import numpy as np
import pytest
from scipy.optimize import linprog

from girthforge.model import Cut, DesignSpec, MddProblem, ModelError
from girthforge.simplex import solve


def reference_lp(lp):
    n = lp.ncols
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for r in range(lp.nrows):
        dense = np.zeros(n)
        dense[lp.row_cols[r]] = lp.row_vals[r]
        if lp.senses[r] == "<=":
            a_ub.append(dense)
            b_ub.append(lp.rhs[r])
        else:
            a_eq.append(dense)
            b_eq.append(lp.rhs[r])
    return linprog(
        lp.objective,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=list(zip(lp.lower, lp.upper)),
        method="highs",
    )


class TestDesignSpec:
    def test_regular_constructor(self):
        spec = DesignSpec.regular(10, 20, 3, 6, 8)
        assert spec.dv == (3,) * 20
        assert spec.dc == (6,) * 10
        assert spec.regularity == (3, 6)
        assert spec.target_sum == 120

    def test_irregular_regularity_none(self):
        spec = DesignSpec(m=2, n=3, dv=(1, 2, 1), dc=(2, 2), T=4)
        assert spec.regularity is None

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(m=0, n=5, dv=(1,) * 5, dc=(), T=6),
            dict(m=2, n=2, dv=(1, 1), dc=(1, 1), T=5),
            dict(m=2, n=2, dv=(1, 1), dc=(1, 1), T=2),
            dict(m=2, n=2, dv=(3, 1), dc=(1, 1), T=6),
            dict(m=2, n=2, dv=(1,), dc=(1, 1), T=6),
        ],
    )
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ModelError):
            DesignSpec(**kwargs)


class TestBuildShape:
    def test_column_and_row_counts(self):
        prob = MddProblem(DesignSpec.regular(10, 20, 3, 6, 6))
        assert prob.lp.ncols == 10 * 20 + 20 + 10
        assert prob.lp.nrows == 30
        assert prob.xcol(1, 1) == 0
        assert prob.xcol(2, 1) == 20
        assert prob.dv_col(1) == 200
        assert prob.dc_col(10) == 229

    def test_objective_is_slack_sum(self):
        prob = MddProblem(DesignSpec.regular(3, 4, 2, 2, 4))
        assert np.all(prob.lp.objective[:12] == 0)
        assert np.all(prob.lp.objective[12:] == 1)


class TestRelaxation:
    def test_unconstrained_relaxation_is_zero(self):
        prob = MddProblem(DesignSpec.regular(5, 10, 3, 6, 6))
        sol = solve(prob.lp)
        assert sol.objective == pytest.approx(0.0, abs=1e-8)

    def test_all_cells_zero_gives_target_sum(self):
        spec = DesignSpec.regular(10, 20, 3, 6, 6)
        prob = MddProblem(spec)
        for col in range(spec.m * spec.n):
            prob.lp.set_bounds(col, 0, 0)
        sol = solve(prob.lp)
        assert sol.objective == pytest.approx(120.0, abs=1e-8)

    def test_matches_reference_with_cuts(self):
        prob = MddProblem(DesignSpec.regular(4, 8, 2, 4, 6))
        prob.add_cut(Cut.from_cycle({(1, 1), (1, 2), (2, 1), (2, 2)}))
        prob.add_cut(Cut(entry_set=frozenset({(3, 5), (3, 6), (4, 5)}), rhs=1))
        ref = reference_lp(prob.lp)
        sol = solve(prob.lp)
        assert ref.status == 0 and sol.status == "optimal"
        assert sol.objective == pytest.approx(ref.fun, abs=1e-7)


class TestFixing:
    def test_fix_and_conflict(self):
        prob = MddProblem(DesignSpec.regular(3, 4, 2, 2, 4))
        prob.fix_cell(1, 1, 1)
        assert prob.lp.lower[prob.xcol(1, 1)] == 1
        with pytest.raises(ModelError):
            prob.fix_cell(1, 1, 0)
        with pytest.raises(ModelError):
            prob.fix_cell(1, 2, 2)

    def test_apply_fixing_moves_objective(self):
        spec = DesignSpec.regular(5, 10, 3, 6, 6)
        prob = MddProblem(spec)
        plan = SimpleNamespace(
            ones={(1, j) for j in range(1, 7)},
            zeros={(1, j) for j in range(7, 11)},
        )
        prob.apply_fixing(plan)
        lo = prob.lp.lower
        assert lo[prob.xcol(1, 1)] == 1
        assert prob.lp.upper[prob.xcol(1, 7)] == 0
        sol = solve(prob.lp)
        # row 1 is saturated, the rest still relaxes to zero deviation
        assert sol.objective == pytest.approx(0.0, abs=1e-8)


class TestCutPool:
    def test_duplicate_cut_ignored(self):
        prob = MddProblem(DesignSpec.regular(3, 4, 2, 2, 4))
        cells = {(1, 1), (1, 2), (2, 1), (2, 2)}
        first = prob.add_cut(Cut.from_cycle(cells))
        assert first is not None
        assert prob.add_cut(Cut.from_cycle(frozenset(cells))) is None
        assert prob.lp.nrows == 3 + 4 + 1

    def test_cut_tightens_lp(self):
        spec = DesignSpec.regular(2, 2, 1, 1, 4)
        prob = MddProblem(spec)
        base = solve(prob.lp).objective
        prob.add_cut(Cut(entry_set=frozenset({(1, 1), (1, 2), (2, 1)}), rhs=0))
        cut_obj = solve(prob.lp).objective
        assert cut_obj >= base - 1e-9
        assert cut_obj == pytest.approx(2.0, abs=1e-8)

    def test_from_cycle_rhs(self):
        cut = Cut.from_cycle({(1, 1), (1, 2), (2, 1), (2, 2)})
        assert cut.rhs == 3
        assert cut.origin == "cycle"
