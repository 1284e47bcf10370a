import json
import math
import os

import numpy as np
import pytest

from fracspace import lp_norm, make_function_family
from fracspace.harness import (
    ExperimentConfig,
    endpoint_rhs,
    estimate_operator_norm,
    load_config,
    local_kernel_integral_stat,
    run_suites,
    weak_type_statistic,
    write_reports,
)
from fracspace.harness.cli import main as cli_main
from fracspace.harness.config import ConfigError

SMALL = dict(
    ladder=[8, 12],
    light_ladder=[12, 16],
    families={"indicators": 4, "bumps": 3},
)


class TestConfig:
    def test_exponent_pairing_enforced(self):
        with pytest.raises(ConfigError, match="scaling line"):
            ExperimentConfig(alpha=0.5, pairs=[{"p": 1.5, "q": 5.0}])

    def test_weak_exponent_checked(self):
        with pytest.raises(ConfigError, match="1/\\(1 - alpha\\)"):
            ExperimentConfig(alpha=0.5, weak={"p": 1.0, "q": 3.0})

    def test_valid_pair_accepted(self):
        cfg = ExperimentConfig(alpha=0.25, pairs=[{"p": 2.0, "q": 4.0}], weak={"p": 1, "q": 4.0 / 3.0})
        assert cfg.kernel_spec().alpha == 0.25

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="unknown config fields"):
            load_config({"walrus": 1})

    def test_load_from_path(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"alpha": 0.5, "seed": 3}))
        assert load_config(str(path)).seed == 3


class TestStatistics:
    def test_identity_operator_norm_is_one(self, space3):
        fams = make_function_family(space3, "lp_atoms", 4)
        val, wit = estimate_operator_norm(space3, lambda f: f, 2.0, 2.0, fams)
        assert val == pytest.approx(1.0, rel=1e-12)
        assert wit >= 0

    def test_zero_operator(self, space3):
        fams = make_function_family(space3, "random", 3)
        val, _ = estimate_operator_norm(space3, lambda f: 0.0 * f, 1.5, 6.0, fams)
        assert val == 0.0

    def test_weak_below_strong(self, space3):
        fams = make_function_family(space3, "random", 6, seed=4)
        op = lambda f: np.cumsum(f) * 0.1
        weak, _ = weak_type_statistic(space3, op, 1.0, 2.0, fams)
        strong = max(
            lp_norm(space3, op(f), 2.0) / lp_norm(space3, f, 1.0)
            for f in fams
            if lp_norm(space3, f, 1.0) > 0
        )
        assert weak <= strong * (1 + 1e-12)

    def test_zero_functions_skipped(self, space3):
        fams = [np.zeros(3)]
        val, wit = estimate_operator_norm(space3, lambda f: f, 2.0, 2.0, fams)
        assert val == 0.0 and wit == -1

    def test_empty_family_rejected(self, space3):
        with pytest.raises(ValueError):
            estimate_operator_norm(space3, lambda f: f, 2.0, 2.0, [])


class TestEndpointRhs:
    def test_zero_function_gives_zero_sumless_lead(self, space3):
        rhs = endpoint_rhs(space3, np.zeros(3), 1.0, [1.0], [1.0])
        assert rhs == 0.0

    def test_k1_closed_form(self, space3):
        f = np.array([0.5, -1.0, 2.0])
        lam, bnorm = 0.7, 1.3
        rhs = endpoint_rhs(space3, f, lam, [1.0], [bnorm])
        phi = lambda t, s: t * math.log(2.0 + t) ** s
        inner1 = sum(phi(abs(v) / lam, 1.0) * w for v, w in zip(f, space3.w))
        inner0 = sum(abs(v) / lam * w for v, w in zip(f, space3.w))
        want = phi(bnorm, 1.0) * (inner1 + phi(inner0, 1.0))
        assert rhs == pytest.approx(want, rel=1e-12)

    def test_k2_subset_count(self, space3):
        # four subset terms for k = 2
        f = np.ones(3)
        rhs_a = endpoint_rhs(space3, f, 1.0, [1.0, 1.0], [1.0, 1.0])
        assert rhs_a > 0


class TestSuites:
    def test_run_suites_produces_rows(self):
        cfg = ExperimentConfig(**SMALL)
        reports = run_suites(cfg)
        assert {r.suite for r in reports} == {
            "boundedness",
            "commutators",
            "endpoint",
            "welland",
            "mean_zero_domination",
        }
        for rep in reports:
            assert rep.rows, rep.suite
            assert not rep.failures
            for row in rep.rows:
                assert np.isfinite(row["value"])

    def test_unknown_suite_rejected(self):
        cfg = ExperimentConfig(suites=["nonsense"], **SMALL)
        with pytest.raises(ValueError, match="unknown suite"):
            run_suites(cfg)

    def test_no_suites_is_empty_success(self):
        cfg = ExperimentConfig(suites=[], **SMALL)
        assert run_suites(cfg) == []

    def test_local_integral_stat_finite(self, space3):
        val, witness = local_kernel_integral_stat(space3, 0.5)
        assert np.isfinite(val) and val > 0
        assert witness is not None

    def test_reports_deterministic_bytes(self, tmp_path):
        cfg = ExperimentConfig(suites=["welland"], **SMALL)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        write_reports(run_suites(cfg), str(out1))
        write_reports(run_suites(cfg), str(out2))
        for name in sorted(os.listdir(out1)):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def write_space_doc(tmp_path):
    doc = {
        "points": [{"id": i, "coords": [float(i)]} for i in range(3)],
        "metric": {"type": "euclidean"},
        "weights": [1.0, 1.0, 1.0],
        "lambda": {"type": "power", "c0": 2.0, "kappa": 1.0},
    }
    path = tmp_path / "space.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestCli:
    def test_check_space(self, tmp_path, capsys):
        assert cli_main(["check-space", write_space_doc(tmp_path)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["points"] == 3
        assert out["upper_doubling_passed"] is True

    def test_apply(self, tmp_path, capsys):
        space_path = write_space_doc(tmp_path)
        f_path = tmp_path / "f.txt"
        f_path.write_text("1.0\n0.0\n0.0\n")
        code = cli_main(
            ["apply", "--space", space_path, "--kernel", '{"type": "frac_integral", "alpha": 0.5}', "--f", str(f_path)]
        )
        assert code == 0
        vals = [float(v) for v in capsys.readouterr().out.split()]
        assert vals == pytest.approx([0.0, 1.0 / np.sqrt(2.0), 0.5], abs=1e-10)

    def test_function_file_keyed_by_id(self, tmp_path, capsys):
        space_path = write_space_doc(tmp_path)
        f_path = tmp_path / "f.csv"
        f_path.write_text("2,0.0\n0,1.0\n1,0.0\n")
        code = cli_main(["norm", "--kind", "lp", "--space", space_path, "--f", str(f_path), "--p", "1"])
        assert code == 0
        assert float(capsys.readouterr().out) == pytest.approx(1.0)

    def test_apply_with_custom_matrix_file(self, tmp_path, capsys):
        space_path = write_space_doc(tmp_path)
        mat_path = tmp_path / "kernel.txt"
        np.savetxt(mat_path, [[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
        kern_path = tmp_path / "kernel.json"
        kern_path.write_text(
            json.dumps({"type": "custom", "alpha": 0.5, "matrix_file": str(mat_path)})
        )
        f_path = tmp_path / "f.txt"
        f_path.write_text("1.0\n0.0\n0.0\n")
        code = cli_main(["apply", "--space", space_path, "--kernel", str(kern_path), "--f", str(f_path)])
        assert code == 0
        vals = [float(v) for v in capsys.readouterr().out.split()]
        assert vals == [0.0, 1.0, 0.0]

    def test_czd_command(self, tmp_path, capsys):
        space_path = write_space_doc(tmp_path)
        f_path = tmp_path / "f.txt"
        f_path.write_text("10.0\n0.0\n0.0\n")
        code = cli_main(
            ["czd", "--space", space_path, "--f", str(f_path), "--p", "1", "--t", "8", "--gamma0", "2.0"]
        )
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["balls"]) == 1

    def test_coeff_command_with_trace(self, tmp_path, capsys):
        space_path = write_space_doc(tmp_path)
        trace = tmp_path / "trace.tsv"
        code = cli_main(
            [
                "coeff", "--kind", "Ktilde", "--space", space_path,
                "--b-center", "1", "--b-radius", "0.5",
                "--s-center", "1", "--s-radius", "1.5",
                "--trace", str(trace),
            ]
        )
        assert code == 0
        assert float(capsys.readouterr().out) == pytest.approx(1.5)
        lines = trace.read_text().strip().splitlines()
        assert len(lines) == 2  # header plus the single shell row

    def test_norm_kinds(self, tmp_path, capsys):
        space_path = write_space_doc(tmp_path)
        f_path = tmp_path / "f.txt"
        f_path.write_text("3.0\n1.0\n0.0\n")
        assert cli_main(["norm", "--kind", "weak", "--space", space_path, "--f", str(f_path), "--p", "1"]) == 0
        assert float(capsys.readouterr().out) == pytest.approx(3.0)
        assert cli_main(["norm", "--kind", "rbmo", "--space", space_path, "--f", str(f_path)]) == 0
        assert float(capsys.readouterr().out) > 0

    def test_run_command(self, tmp_path):
        cfg = dict(suites=["welland"], output_dir=str(tmp_path / "reports"), **SMALL)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        assert cli_main(["run", "--config", str(cfg_path)]) == 0
        assert (tmp_path / "reports" / "welland.tsv").exists()
        assert (tmp_path / "reports" / "summary.json").exists()

    def test_suite_command(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(dict(suites=["endpoint"], **SMALL)))
        assert cli_main(["suite", "endpoint", "--config", str(cfg_path)]) == 0
        assert "endpoint_k1" in capsys.readouterr().out

    def test_run_flags_baseline_regression(self, tmp_path, capsys):
        cfg = dict(
            suites=["welland"],
            output_dir=str(tmp_path / "reports"),
            baselines={
                "limits": [
                    {"suite": "welland", "statistic": "local_kernel_integral", "limit": 1e-6}
                ]
            },
            **SMALL,
        )
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        assert cli_main(["run", "--config", str(cfg_path)]) == 1


class TestNumbaFallback:
    def test_pure_python_path_matches(self):
        # force the fallback decorators and compare a pair-sweep value bitwise
        import subprocess
        import sys

        code = (
            "import sys; sys.modules['numba'] = None\n"
            "import numpy as np\n"
            "from fracspace import s3, rbmo_norm, osc_exp_norm\n"
            "import fracspace._fastpath as fp\n"
            "assert not fp.HAVE_NUMBA\n"
            "sp = s3()\n"
            "f = np.array([1.0, -1.0, 0.5])\n"
            "print(repr(rbmo_norm(sp, f).value))\n"
            "print(repr(osc_exp_norm(sp, f, 1.0)))\n"
        )
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, check=True
        )
        got = [float(line) for line in out.stdout.split()]
        import numpy as np
        from fracspace import osc_exp_norm, rbmo_norm, s3

        sp = s3()
        f = np.array([1.0, -1.0, 0.5])
        assert got[0] == rbmo_norm(sp, f).value
        assert got[1] == osc_exp_norm(sp, f, 1.0)


class TestCliFailurePaths:
    def test_check_space_flags_violations(self, tmp_path, capsys):
        doc = {
            "points": [{"id": 0}, {"id": 1}],
            "metric": {"type": "matrix", "values": [[0.0, 1.0], [1.0, 0.0]]},
            "weights": [50.0, 1.0],
            "lambda": {"type": "power", "c0": 1.0, "kappa": 1.0},
        }
        path = tmp_path / "bad_space.json"
        path.write_text(json.dumps(doc))
        assert cli_main(["check-space", str(path)]) == 1
        out = json.loads(capsys.readouterr().out)
        assert out["upper_doubling_passed"] is False
        assert out["violations"]
