import math

import numpy as np
import pytest

from netpricing import GameSpec, GraphParams, linear, log1p, solve_optimal_price
from netpricing.errors import DomainError
from netpricing.experiments import (
    CSV_HEADER,
    ExperimentConfig,
    SweepRow,
    brute_force_optimal,
    emit_csv,
    emit_json,
    emit_plot,
    peak_inverse_poi,
    read_csv,
    run,
    run_alpha_sweep,
    run_gbar_sweep,
    sweep_point,
)


def star_cfg(f="log1p", grid=None):
    return ExperimentConfig("alpha_sweep", GraphParams("star", 10), 1.0, 1.0, f,
                            sweep_grid=grid or [])


def ring_cfg(mode="uniform", b=1.0, f="log1p", grid=None, n=100):
    return ExperimentConfig("gbar_sweep", GraphParams("ring", n), 2.0, b, f, mode=mode,
                            sweep_grid=grid or [])


class TestBruteForce:
    def test_scalar(self):
        g = GameSpec(a=[1.0], b=[1.0], G=[[0.0]], f=log1p())
        x, J = brute_force_optimal(g, x_max=1.0, coarse_step=1e-3)
        assert x[0] == pytest.approx(0.25, abs=1e-5)
        assert J == pytest.approx(0.125, abs=1e-9)

    def test_matches_pg(self):
        g = GameSpec(a=[2, 2], b=[1, 1], G=[[0, 0.5], [0.5, 0]], f=log1p())
        x, J = brute_force_optimal(g, x_max=2.0, coarse_step=1e-3)
        sol = solve_optimal_price(g)
        assert J == pytest.approx(sol.revenue, abs=1e-4)
        np.testing.assert_allclose(x, sol.x_star, atol=1e-4)

    def test_linear_stationary_point(self):
        G = np.array([[0, 0.4], [0.4, 0]])
        g = GameSpec(a=[1.0, 1.5], b=[1.0, 1.0], G=G, f=linear())
        x, _ = brute_force_optimal(g, x_max=1.5, coarse_step=1e-3)
        np.testing.assert_allclose(x, 0.5 * np.linalg.solve(g.B - G, g.a), atol=2e-5)

    def test_three_agents(self):
        G = np.array([[0, 0.2, 0.1], [0.3, 0, 0.2], [0.1, 0.1, 0]])
        g = GameSpec(a=[1.0, 1.2, 0.8], b=[1.0, 1.0, 1.0], G=G, f=log1p())
        x, J = brute_force_optimal(g, x_max=1.0, coarse_step=1e-2)
        assert J == pytest.approx(solve_optimal_price(g).revenue, abs=1e-6)

    def test_refuses_large(self):
        g = GameSpec(a=np.ones(4), b=np.ones(4), G=np.zeros((4, 4)), f=log1p())
        with pytest.raises(DomainError):
            brute_force_optimal(g, 1.0, 0.1)


class TestConfig:
    def test_defaults(self):
        assert len(star_cfg().sweep_grid) == 101
        assert len(ring_cfg().sweep_grid) == 100

    def test_validation(self):
        with pytest.raises(ValueError):
            star_cfg(grid=[0.2, 0.1])
        with pytest.raises(ValueError):
            star_cfg(grid=[0.5, 1.5])
        with pytest.raises(ValueError):
            ExperimentConfig("alpha_sweep", GraphParams("ring", 10), sweep_grid=[0.1])
        with pytest.raises(ValueError):
            ExperimentConfig("gbar_sweep", GraphParams("star", 10))
        with pytest.raises(ValueError):
            ExperimentConfig("bogus", GraphParams("star", 10))
        with pytest.raises(ValueError):
            ring_cfg(b="a_bar")

    def test_from_dict(self):
        cfg = ExperimentConfig.from_dict({
            "experiment": "gbar_sweep",
            "graph": {"family": "ring", "n": 20},
            "a": 2, "b": "g_bar", "f": "f1",
            "sweep_grid": [0.25, 0.5],
            "tolerances": {"tol": 1e-9, "max_iter": 5000},
        })
        g = cfg.game(0.5)
        np.testing.assert_allclose(g.b, 0.5)
        assert cfg.tol == 1e-9 and cfg.max_iter == 5000
        assert g.f.kind == "log1p"


class TestSweeps:
    def test_linear_star_symmetric_point(self):
        rows = run_alpha_sweep(star_cfg("linear", grid=[0.3, 0.5, 0.7]))
        assert rows[1].inverse_poi == pytest.approx(1.0, abs=1e-6)
        assert rows[0].inverse_poi < 1 and rows[2].inverse_poi < 1

    def test_rows_in_grid_order(self):
        grid = [0.0, 0.1, 0.35, 0.9]
        assert [r.param for r in run_alpha_sweep(star_cfg(grid=grid))] == grid

    def test_gbar_zero(self):
        for mode in ("uniform", "discriminatory"):
            (row,) = run_gbar_sweep(ring_cfg(mode=mode, grid=[0.0], n=20))
            assert row.ok
            assert row.gap == pytest.approx(0.0, abs=1e-9)
            assert row.bound == 0.0

    def test_b_following_gbar_skips_zero(self):
        rows = run_gbar_sweep(ring_cfg(mode="discriminatory", b="g_bar", grid=[0.0, 0.5], n=20))
        assert rows[0].status.startswith("skipped")
        assert math.isnan(rows[0].gap)
        assert rows[1].ok and rows[1].gap >= rows[1].bound > 0

    def test_assumption_violation_skipped(self):
        cfg = ring_cfg(mode="discriminatory", b=0.2, grid=[0.1, 0.5])
        rows = run_gbar_sweep(cfg)
        assert rows[0].ok
        assert rows[1].status == "skipped: diagonal dominance fails"

    def test_uniform_linear_zero_gap(self):
        rows = run_gbar_sweep(ring_cfg(f="linear", grid=[0.2, 0.5, 0.9]))
        for r in rows:
            assert r.gap == pytest.approx(0.0, abs=1e-10)
            assert r.bound == 0.0

    def test_uniform_half(self):
        (row,) = run_gbar_sweep(ring_cfg(grid=[0.5]))
        assert row.bound == pytest.approx(1.83e-4, abs=1e-6)
        assert row.gap >= row.bound

    def test_failure_recorded(self, monkeypatch):
        from netpricing import experiments
        from netpricing.errors import ConvergenceError

        def boom(*a, **k):
            raise ConvergenceError("nope")

        monkeypatch.setattr(experiments, "solve_optimal_price", boom)
        rows = run_alpha_sweep(star_cfg(grid=[0.1, 0.2]))
        assert [r.status for r in rows] == ["failed: nope"] * 2

    def test_single(self):
        cfg = ExperimentConfig("single", GraphParams("ring", 30, g_bar=0.5), 2.0, 1.0, "log1p")
        rep = run(cfg)
        assert rep.gap >= rep.lower_bound > 0


class TestPeak:
    def test_parabola_vertex(self):
        xs = np.linspace(0, 1, 11)
        rows = [SweepRow(x, 1, 1, 1 - (x - 0.43) ** 2, 0, 0, 0) for x in xs]
        at, val = peak_inverse_poi(rows)
        assert at == pytest.approx(0.43, abs=1e-12)
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_edge(self):
        rows = [SweepRow(x, 1, 1, x, 0, 0, 0) for x in (0.0, 0.5, 1.0)]
        assert peak_inverse_poi(rows) == (1.0, 1.0)


class TestOutput:
    def test_one_row(self, tmp_path):
        path = tmp_path / "out.csv"
        emit_csv([SweepRow(0.5, 1.0, 0.9, 0.9, 1 / 9, 0.01, 12)], path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].split(",")[:7] == ["param", "j_star", "j_agnostic", "inverse_poi", "gap",
                                           "bound", "iterations"]
        assert lines[1].split(",")[4] == repr(1 / 9)

    def test_empty(self, tmp_path):
        with pytest.raises(ValueError):
            emit_csv([], tmp_path / "x.csv")
        with pytest.raises(ValueError):
            emit_plot([], tmp_path / "x.svg")
        with pytest.raises(ValueError):
            emit_json([], tmp_path / "x.json")

    def test_full_alpha_sweep(self, tmp_path):
        rows = run_alpha_sweep(star_cfg())
        emit_csv(rows, tmp_path / "s.csv")
        assert len((tmp_path / "s.csv").read_text().splitlines()) == 102
        assert emit_plot(rows, tmp_path / "s.svg") == (0.0, 1.0)
        assert (tmp_path / "s.svg").read_text().lstrip().startswith("<?xml")
        back = read_csv(tmp_path / "s.csv")
        assert [r.inverse_poi for r in back] == [r.inverse_poi for r in rows]
        for r in rows:
            assert r.inverse_poi <= 1 + 1e-9
            if not math.isnan(r.bound):
                assert r.gap >= r.bound - 1e-9

    def test_gbar_plot(self, tmp_path):
        rows = run_gbar_sweep(ring_cfg(grid=[0.1, 0.5, 0.9], n=20))
        emit_plot(rows, tmp_path / "g.svg", kind="gbar")
        assert "lower bound" in (tmp_path / "g.svg").read_text()

    def test_deterministic_csv(self, tmp_path):
        cfg = ExperimentConfig("alpha_sweep", GraphParams("pa", 40, m=1, seed=9), 1.0, 2.0, "log1p",
                               sweep_grid=[0.0, 0.3, 0.6, 1.0])
        emit_csv(run(cfg), tmp_path / "a.csv")
        emit_csv(run(cfg), tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_skipped_row_csv(self, tmp_path):
        rows = [SweepRow.skipped(0.0, "skipped: b must be positive")]
        emit_csv(rows, tmp_path / "s.csv")
        assert tmp_path.joinpath("s.csv").read_text().splitlines()[1].endswith("skipped: b must be positive")
        assert CSV_HEADER[-1] == "status"

    def test_sweep_point_bad_game(self):
        row = sweep_point(ring_cfg(mode="discriminatory", b="g_bar", n=10), 0.0)
        assert not row.ok
