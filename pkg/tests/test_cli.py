"""End-to-end CLI runs on small configurations."""

import csv

from helmdual import read_field
from helmdual.cli import main

SOLVE_CFG = """
mode = solve
grid.points_per_axis = 48
descent.multistart_count = 5
descent.max_iters = 1500
seed = 20240601
"""

COMPARE_CFG = """
mode = compare
grid.points_per_axis = 48
descent.multistart_count = 3
descent.max_iters = 1500
bump.center = 3.0, 3.0
bump.radius = 1.2
bump.amplitude = 0.3
seed = 20240601
"""


def run_cli(tmp_path, name, cfg_text, mode, seed=None):
    cfg_file = tmp_path / f"{name}.cfg"
    cfg_file.write_text(cfg_text)
    out_dir = tmp_path / name
    argv = [mode, "--config", str(cfg_file), "--out", str(out_dir)]
    if seed is not None:
        argv += ["--seed", str(seed)]
    status = main(argv)
    return status, out_dir


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


class TestSolveMode:
    def test_artifacts_and_exit(self, tmp_path):
        status, out = run_cli(tmp_path, "solve", SOLVE_CFG, "solve")
        assert status == 0
        rows = read_rows(out / "solutions.csv")
        assert rows[0][0] == "index"
        assert len(rows) >= 3  # header plus at least two distinct solutions
        for row in rows[1:]:
            assert float(row[1]) > 0.0

        manifest = {r[0] for r in read_rows(out / "manifest.csv")[1:]}
        written = {p.name for p in out.iterdir()} - {"manifest.csv"}
        assert manifest == written

        field = read_field((out / "v_000.hlmf").read_bytes())
        assert field.grid.points_per_axis == 48
        assert (out / "effective_config.cfg").exists()

    def test_reproducible_csv_bytes(self, tmp_path):
        _, out1 = run_cli(tmp_path, "solve_a", SOLVE_CFG, "solve")
        _, out2 = run_cli(tmp_path, "solve_b", SOLVE_CFG, "solve")
        assert (out1 / "solutions.csv").read_bytes() == (out2 / "solutions.csv").read_bytes()
        assert (out1 / "v_000.hlmf").read_bytes() == (out2 / "v_000.hlmf").read_bytes()

    def test_seed_flag_overrides(self, tmp_path):
        _, out1 = run_cli(tmp_path, "seeded", SOLVE_CFG, "solve", seed=777)
        cfg_text = (out1 / "effective_config.cfg").read_text()
        assert "seed = 777" in cfg_text


class TestCompareMode:
    def test_zero_amplitude_gap_within_noise(self, tmp_path):
        cfg = COMPARE_CFG.replace("bump.amplitude = 0.3", "bump.amplitude = 0.0")
        status, out = run_cli(tmp_path, "compare0", cfg, "compare")
        assert status == 0
        rows = read_rows(out / "compare.csv")
        header, data = rows[0], rows[1]
        gap = float(data[header.index("gap")])
        c_inf = float(data[header.index("c_inf_est")])
        assert abs(gap) <= 1e-7 * abs(c_inf)

    def test_bumped_coefficient_lowers_level(self, tmp_path):
        status, out = run_cli(tmp_path, "compare", COMPARE_CFG, "compare")
        assert status == 0
        rows = read_rows(out / "compare.csv")
        header, data = rows[0], rows[1]
        assert int(data[header.index("transplant_check")]) == 1
        c_est = float(data[header.index("c_est")])
        c_inf = float(data[header.index("c_inf_est")])
        assert c_est <= c_inf + 1e-3 * abs(c_inf)


class TestErrors:
    def test_config_error_exit_code(self, tmp_path):
        cfg_file = tmp_path / "bad.cfg"
        cfg_file.write_text("gird.n = 64\n")
        assert main(["solve", "--config", str(cfg_file)]) == 2

    def test_run_error_writes_record(self, tmp_path):
        # resonant box with eps = 0 fails inside the run, not at parse time
        cfg_file = tmp_path / "resonant.cfg"
        cfg_file.write_text(
            "mode = solve\ngrid.box_length = 6.283185307179586\n"
            "grid.points_per_axis = 48\n"
        )
        out = tmp_path / "resonant"
        status = main(["solve", "--config", str(cfg_file), "--out", str(out)])
        assert status == 1
        assert (out / "error.json").exists()
        assert "ShellResonance" in (out / "error.json").read_text()
