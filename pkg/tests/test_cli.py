import json

import pytest

from eebounds import __version__
from eebounds.cli import main
from eebounds.numerics import LN2


def run(tmp_path, name, *argv):
    out = tmp_path / name
    rc = main(list(argv) + ["--out", str(out)])
    return rc, (out.read_text() if out.exists() else "")


def parse_csv(text):
    lines = text.strip().split("\n")
    assert lines[0] == f"# eebounds {__version__}"
    assert lines[1] == "R,bound,value,regime,valid"
    rows = []
    for ln in lines[2:]:
        r, b, v, regime, valid = ln.split(",")
        rows.append((float(r), b, float(v), regime, valid == "true"))
    return rows


CURVE_BSC = [
    "curve", "--channel", "bsc", "--p", "0.07", "--tau", "0.03",
    "--rmin", "0.05", "--rmax", "0.8", "--steps", "16",
]


class TestCurve:
    def test_deterministic_output(self, tmp_path):
        rc1, a = run(tmp_path, "a.csv", *CURVE_BSC)
        rc2, b = run(tmp_path, "b.csv", *CURVE_BSC)
        assert rc1 == rc2 == 0
        assert a == b

    def test_row_structure(self, tmp_path):
        rc, text = run(tmp_path, "c.csv", *CURVE_BSC)
        rows = parse_csv(text)
        assert len(rows) == 16 * 5
        # Ordered by R, then by the canonical bound order within each R.
        order = ("gallager", "bz_e", "bz_x", "m_plus", "m_minus")
        for i in range(0, len(rows), 5):
            block = rows[i : i + 5]
            assert tuple(b for _, b, _, _, _ in block) == order
            assert len({r for r, _, _, _, _ in block}) == 1

    def test_invalid_rows_emitted_not_dropped(self, tmp_path):
        _, text = run(tmp_path, "d.csv", *CURVE_BSC)
        rows = parse_csv(text)
        invalid = [r for r in rows if not r[4]]
        assert invalid  # several bounds die at high rates
        assert any(b == "bz_x" for _, b, _, _, _ in invalid)
        assert any(b == "m_minus" for _, b, _, _, _ in invalid)

    def test_tradeoff_dominates_rowwise(self, tmp_path):
        _, text = run(tmp_path, "e.csv", *CURVE_BSC)
        rows = {(r, b): (v, ok) for r, b, v, _, ok in parse_csv(text)}
        for (r, b), (v, ok) in rows.items():
            if b == "m_plus" and ok and rows[(r, "bz_e")][1]:
                assert v >= rows[(r, "bz_e")][0] - 1e-12

    def test_zero_margin_columns_identical(self, tmp_path):
        _, text = run(
            tmp_path, "f.csv",
            "curve", "--channel", "bsc", "--p", "0.07", "--tau", "0",
            "--rmin", "0.05", "--rmax", "0.6", "--steps", "12",
            "--bounds", "gallager,m_plus",
        )
        rows = parse_csv(text)
        gal = [v for _, b, v, _, _ in rows if b == "gallager"]
        mp = [v for _, b, v, _, _ in rows if b == "m_plus"]
        assert gal == mp

    def test_spherical_curve(self, tmp_path):
        rc, text = run(
            tmp_path, "g.csv",
            "curve", "--channel", "awgn", "--snr", "4", "--tau", "0.04",
            "--rmin", "0.05", "--rmax", "0.75", "--steps", "10",
        )
        rows = parse_csv(text)
        assert rc == 0
        assert {b for _, b, _, _, _ in rows} == {"shannon", "m_error", "m_erasure"}
        for r, b, v, _, ok in rows:
            if b == "m_error" and ok:
                era = next(
                    vv for rr, bb, vv, _, okk in rows if rr == r and bb == "m_erasure" and okk
                ) if any(
                    rr == r and bb == "m_erasure" and okk for rr, bb, vv, _, okk in rows
                ) else None
                if era is not None:
                    assert v >= era - 1e-10

    def test_units_conversion(self, tmp_path):
        _, nats = run(
            tmp_path, "h.csv",
            "curve", "--channel", "awgn", "--snr", "4", "--tau", "0",
            "--rmin", "0.3", "--rmax", "0.3", "--steps", "2",
            "--bounds", "shannon", "--units", "nats",
        )
        _, bits = run(
            tmp_path, "i.csv",
            "curve", "--channel", "awgn", "--snr", "4", "--tau", "0",
            "--rmin", str(0.3 / LN2), "--rmax", str(0.3 / LN2), "--steps", "2",
            "--bounds", "shannon", "--units", "bits",
        )
        vn = parse_csv(nats)[0][2]
        vb = parse_csv(bits)[0][2]
        assert vb == pytest.approx(vn / LN2, rel=1e-10)

    def test_json_format(self, tmp_path):
        rc, text = run(tmp_path, "j.json", *CURVE_BSC, "--format", "json")
        obj = json.loads(text)
        assert rc == 0
        assert obj["version"] == __version__
        assert len(obj["rows"]) == 16 * 5
        assert {"R", "bound", "value", "regime", "valid"} <= set(obj["rows"][0])

    def test_svg_format(self, tmp_path):
        rc, text = run(tmp_path, "k.svg", *CURVE_BSC, "--format", "svg")
        assert rc == 0
        assert text.startswith("<svg ")
        assert "<polyline" in text and text.rstrip().endswith("</svg>")

    def test_unknown_bound_is_usage_error(self, tmp_path):
        rc, _ = run(tmp_path, "x.csv", *CURVE_BSC[:-2], "--steps", "4", "--bounds", "nope")
        assert rc == 2

    def test_channel_bound_mismatch(self, tmp_path):
        rc, _ = run(tmp_path, "y.csv", *CURVE_BSC[:-2], "--steps", "4", "--bounds", "shannon")
        assert rc == 2

    def test_missing_channel_parameter(self, tmp_path):
        rc, _ = run(
            tmp_path, "z.csv",
            "curve", "--channel", "bsc", "--rmin", "0.1", "--rmax", "0.2", "--steps", "2",
        )
        assert rc == 2

    def test_bad_subcommand_exit_code(self):
        assert main(["no-such-command"]) == 2


class TestLandmarks:
    def test_binary_values(self, tmp_path):
        rc, text = run(tmp_path, "lm1.json", "landmarks", "--channel", "bsc", "--p", "0.07")
        obj = json.loads(text)
        assert rc == 0
        assert obj["R_c"] == pytest.approx(0.248529, abs=1e-5)
        assert obj["R_e"] == pytest.approx(0.077, abs=1e-3)

    def test_spherical_values_and_residuals(self, tmp_path):
        rc, text = run(
            tmp_path, "lm2.json", "landmarks", "--channel", "awgn", "--snr", "4", "--tau", "0"
        )
        obj = json.loads(text)
        assert rc == 0
        assert obj["theta_e"] == pytest.approx(0.904557, abs=1e-5)
        assert obj["theta_c"] == pytest.approx(0.666239, abs=1e-5)
        assert obj["R_star"] == pytest.approx(0.481212, abs=1e-5)
        assert all(abs(v) <= 1e-10 for v in obj["residuals"].values())


class TestFiniteBound:
    def test_binary_record(self, tmp_path):
        rc, text = run(
            tmp_path, "fb1.json",
            "finite-bound", "--channel", "bsc", "--p", "0.07", "--n", "256", "--rate", "0.3",
        )
        obj = json.loads(text)
        assert rc == 0
        assert obj["log2_bound"] < 0.0
        assert obj["exponent_bits"] == pytest.approx(-obj["log2_bound"] / 256, rel=1e-12)

    def test_awgn_record(self, tmp_path):
        rc, text = run(
            tmp_path, "fb2.json",
            "finite-bound", "--channel", "awgn", "--snr", "4", "--n", "200",
            "--rate", "0.3", "--rho", "1.0",
        )
        obj = json.loads(text)
        assert rc == 0
        assert obj["rho"] == 1.0
        assert obj["exponent_nats"] > 0.0


class TestSimulate:
    BSC = [
        "simulate", "--kind", "bsc", "--n", "7", "--k", "4", "--p", "0.05",
        "--trials", "20000", "--seed", "11",
    ]

    def test_byte_identical_runs(self, tmp_path):
        _, a = run(tmp_path, "s1.json", *self.BSC)
        _, b = run(tmp_path, "s2.json", *self.BSC)
        assert a == b

    def test_worker_count_invariance(self, tmp_path):
        _, a = run(tmp_path, "s3.json", *self.BSC, "--workers", "1")
        _, b = run(tmp_path, "s4.json", *self.BSC, "--workers", "4")
        assert json.loads(a)["counts"] == json.loads(b)["counts"]

    def test_noiseless_config_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "kind": "bsc", "n": [7], "k": 4, "p": 0.0, "t": 0,
            "trials": 5000, "seed": 1,
        }))
        rc, text = run(tmp_path, "s5.json", "simulate", str(cfg))
        obj = json.loads(text)
        assert rc == 0
        assert obj["counts"]["undetected"] == 0 and obj["counts"]["erasure"] == 0

    def test_flag_overrides_config(self, tmp_path):
        cfg = tmp_path / "cfg2.json"
        cfg.write_text(json.dumps({
            "kind": "bsc", "n": [7], "k": 4, "p": 0.0, "trials": 5000, "seed": 1,
        }))
        rc, text = run(tmp_path, "s6.json", "simulate", str(cfg), "--p", "0.2")
        obj = json.loads(text)
        assert rc == 0 and obj["p"] == 0.2
        assert obj["counts"]["correct"] < 5000

    def test_cone_regression_block(self, tmp_path):
        rc, text = run(
            tmp_path, "s7.json",
            "simulate", "--kind", "cone", "--n", "40", "80", "160",
            "--snr", "4", "--phi", "0.55", "--trials", "40000", "--seed", "2",
        )
        obj = json.loads(text)
        assert rc == 0
        assert len(obj["results"]) == 3
        assert obj["regression"]["slope"] > 0.0

    def test_missing_seed_is_usage_error(self, tmp_path):
        rc, _ = run(tmp_path, "s8.json", "simulate", "--kind", "bsc", "--n", "7",
                    "--k", "4", "--p", "0.05")
        assert rc == 2

    def test_unknown_kind_is_usage_error(self, tmp_path):
        rc, _ = run(tmp_path, "s9.json", "simulate", "--kind", "bsc", "--seed", "1")
        assert rc == 2


class TestValidate:
    def test_passes_and_reports(self, tmp_path):
        rc, text = run(tmp_path, "v1.txt", "validate")
        assert rc == 0
        assert "FAIL" not in text
        assert text.strip().endswith("OK")
        assert "critical-angle identity" in text

    def test_perturbation_negative_control(self, tmp_path):
        rc, text = run(tmp_path, "v2.txt", "validate", "--perturb-g", "1e-3")
        assert rc == 1
        assert "FAIL" in text
