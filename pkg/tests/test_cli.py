"""End-to-end tests of the command-line interface, run in-process."""

import json
import math

import pytest

from anharmonic import cli
from anharmonic.asymptotics import report_from_csv
from anharmonic.eigensolve import spectrum_from_csv, spectrum_from_json
from anharmonic.errors import ConfigError
from anharmonic.potential import PlainSum, PotentialSpec, dump_spec, spec_to_dict

PURE_QUARTIC = PotentialSpec(confining=PlainSum(terms=((1.0, 4.0),)), b=1.0)


def run_cli(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# spectrum


def test_spectrum_harmonic_csv(capsys):
    code, out, err = run_cli(capsys, ["spectrum", "--alpha", "2", "--n", "1..10"])
    assert code == 0
    spectrum = spectrum_from_csv(out)
    for e in spectrum.entries:
        assert e.lam == pytest.approx(2.0 * e.n - 1.0, abs=1e-6)


def test_spectrum_json_shape(capsys):
    code, out, _ = run_cli(
        capsys, ["spectrum", "--alpha", "2", "--n", "1..6", "--format", "json"]
    )
    assert code == 0
    doc = json.loads(out)
    assert sorted(doc) == ["eigenvalues", "meta"]
    assert doc["meta"]["schema_version"] == 1
    assert doc["meta"]["geometry"] == "full_line"
    assert doc["meta"]["potential"]["confining"] == {
        "family": "plain_sum",
        "terms": [[1.0, 2.0]],
    }
    assert [row["n"] for row in doc["eigenvalues"]] == list(range(1, 7))
    spectrum = spectrum_from_json(out)
    assert len(spectrum.entries) == 6


def test_spectrum_quartic_config_file(tmp_path, capsys):
    cfg = tmp_path / "quartic.json"
    cfg.write_text(dump_spec(PURE_QUARTIC), encoding="utf-8")
    code, out, _ = run_cli(
        capsys, ["spectrum", "--config", str(cfg), "--n", "1..1", "--tol", "1e-9"]
    )
    assert code == 0
    lam1 = spectrum_from_csv(out).entries[0].lam
    assert lam1 == pytest.approx(1.060362, abs=1e-5)


def test_run_config_document(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(
        json.dumps(
            {
                "schema_version": 1,
                "potential": spec_to_dict(
                    PotentialSpec(confining=PlainSum(terms=((1.0, 2.0),)), b=1.0)
                ),
                "index_range": [2, 4],
                "output": {"format": "json"},
            }
        ),
        encoding="utf-8",
    )
    code, out, _ = run_cli(capsys, ["spectrum", "--config", str(cfg)])
    assert code == 0
    doc = json.loads(out)
    assert [row["n"] for row in doc["eigenvalues"]] == [2, 3, 4]


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "quartic.json"
    cfg.write_text(dump_spec(PURE_QUARTIC), encoding="utf-8")
    code, out, _ = run_cli(
        capsys, ["spectrum", "--config", str(cfg), "--alpha", "2", "--n", "1..1"]
    )
    assert code == 0
    assert spectrum_from_csv(out).entries[0].lam == pytest.approx(1.0, abs=1e-6)


def test_out_writes_file(tmp_path, capsys):
    target = tmp_path / "spectrum.csv"
    code, out, _ = run_cli(
        capsys, ["spectrum", "--alpha", "2", "--n", "1..3", "--out", str(target)]
    )
    assert code == 0
    assert out == ""
    assert len(spectrum_from_csv(target.read_text(encoding="utf-8")).entries) == 3


def test_worker_count_keeps_bytes_identical(capsys):
    _, out1, _ = run_cli(capsys, ["spectrum", "--alpha", "2", "--n", "1..8", "--workers", "1"])
    _, out3, _ = run_cli(capsys, ["spectrum", "--alpha", "2", "--n", "1..8", "--workers", "3"])
    assert out1 == out3


def test_spectrum_halfline(capsys):
    code, out, _ = run_cli(
        capsys, ["spectrum", "--alpha", "2", "--bc", "dirichlet", "--n", "1..3"]
    )
    assert code == 0
    lams = [e.lam for e in spectrum_from_csv(out).entries]
    assert lams == pytest.approx([3.0, 7.0, 11.0], abs=1e-6)


def test_spectrum_with_step_perturbation(capsys):
    code, out, _ = run_cli(
        capsys,
        [
            "spectrum",
            "--alpha",
            "2",
            "--perturbation",
            "step:height=0.5,lo=-1,hi=1",
            "--n",
            "1..3",
        ],
    )
    assert code == 0
    for e in spectrum_from_csv(out).entries:
        base = 2.0 * e.n - 1.0
        assert -1e-7 <= e.lam - base <= 0.5 + 1e-7


def test_figures_directory(tmp_path, capsys):
    figdir = tmp_path / "figs"
    code, _, err = run_cli(
        capsys,
        ["spectrum", "--alpha", "2", "--n", "1..5", "--figures", str(figdir)],
    )
    assert code == 0
    assert "figure written" in err
    png = figdir / "spectrum.png"
    assert png.exists() and png.stat().st_size > 0


# ---------------------------------------------------------------------------
# compare


def _slope_from_stderr(err: str) -> float:
    for line in err.splitlines():
        if line.startswith("fitted |residual| decay slope:"):
            return float(line.split(":")[1])
    raise AssertionError(f"no slope line in stderr: {err!r}")


def test_compare_expansion_harmonic(capsys):
    code, out, err = run_cli(capsys, ["compare", "--alpha", "2", "--n", "10..40"])
    assert code == 0
    report = report_from_csv(out)
    assert [e.n for e in report.entries] == list(range(10, 41))
    # The harmonic expansion is exact, so residuals are at solver precision.
    assert max(abs(e.residual) for e in report.entries) < 1e-6
    _slope_from_stderr(err)


def test_compare_expansion_quartic(capsys):
    # Residual magnitudes and the report layout; the decay-rate acceptance
    # measurement for this potential lives in test_acceptance.
    code, out, err = run_cli(capsys, ["compare", "--alpha", "4", "--n", "10..40"])
    assert code == 0
    report = report_from_csv(out)
    assert max(abs(e.residual) for e in report.entries) <= 0.05
    assert _slope_from_stderr(err) <= -0.5


def test_compare_expansion_json_meta(capsys):
    code, out, _ = run_cli(
        capsys, ["compare", "--alpha", "4", "--n", "10..14", "--format", "json"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["schema_version"] == 1
    assert doc["meta"]["predictor"] == "expansion"
    assert isinstance(doc["meta"]["fitted_slope"], float)
    assert doc["meta"]["potential"]["support_radius"] == 1.0


def test_compare_quantization(capsys):
    code, out, _ = run_cli(
        capsys,
        ["compare", "--alpha", "2", "--n", "10..30", "--predictor", "quantization"],
    )
    assert code == 0
    rows = cli.read_table(out, "n,predicted,oracle,residual")
    assert len(rows) == 21
    for cells in rows:
        assert abs(float(cells[3])) <= 0.01
        assert float(cells[1]) > 0.0


def test_compare_thm2_leaves_predicted_blank(capsys):
    code, out, _ = run_cli(
        capsys, ["compare", "--alpha", "2", "--n", "10..14", "--predictor", "thm2"]
    )
    assert code == 0
    rows = cli.read_table(out, "n,predicted,oracle,residual")
    for cells in rows:
        assert cells[1] == ""
        assert math.isfinite(float(cells[3]))


def test_compare_rejects_half_line(capsys):
    code, _, err = run_cli(capsys, ["compare", "--alpha", "2", "--bc", "dirichlet"])
    assert code == 2
    assert "configuration error" in err


# ---------------------------------------------------------------------------
# quantize


def test_quantize_full_line(capsys):
    code, out, _ = run_cli(capsys, ["quantize", "--alpha", "2", "--n", "9..12"])
    assert code == 0
    rows = cli.read_table(out, "n,type,lambda")
    for cells in rows:
        n = int(cells[0])
        assert cells[1] == ("N_type" if n % 2 == 1 else "D_type")
        assert abs(float(cells[2]) - (2.0 * n - 1.0)) <= 0.01


def test_quantize_half_line(capsys):
    code, out, _ = run_cli(
        capsys, ["quantize", "--alpha", "2", "--bc", "dirichlet", "--n", "3..5"]
    )
    assert code == 0
    rows = cli.read_table(out, "n,type,lambda")
    for cells in rows:
        k = int(cells[0])
        assert cells[1] == "D_type"
        assert abs(float(cells[2]) - (4.0 * k - 1.0)) <= 0.05


def test_quantize_below_window_is_numerical_failure(capsys):
    # The lowest almost-even level sits below the admissible search window;
    # the solver reports that as a typed numerical failure, exit code 3.
    code, _, err = run_cli(capsys, ["quantize", "--alpha", "4", "--n", "1..1"])
    assert code == 3
    assert "numerical failure" in err


# ---------------------------------------------------------------------------
# counting and heat-trace


def test_counting_band(capsys):
    code, out, err = run_cli(
        capsys,
        ["counting", "--alpha", "2", "--lmin", "20", "--lmax", "200", "--count", "8"],
    )
    assert code == 0
    rows = cli.read_table(out, "lambda,counted,predicted,gap")
    assert len(rows) == 8
    for cells in rows:
        assert float(cells[1]) == int(float(cells[1]))  # counts are integers
        assert abs(float(cells[3])) <= 2.0
    assert "largest |count - prediction| gap" in err


def test_counting_validates_window(capsys):
    code, _, err = run_cli(capsys, ["counting", "--alpha", "2", "--lmin", "0.5"])
    assert code == 2
    assert "lmin" in err


def test_heat_trace_harmonic(capsys):
    code, out, _ = run_cli(
        capsys,
        ["heat-trace", "--alpha", "2", "--times", "0.05", "--n-max", "50"],
    )
    assert code == 0
    rows = cli.read_table(out, "t,numeric,predicted,rel_gap")
    assert len(rows) == 1
    numeric = float(rows[0][1])
    # Frozen closed form: sum over the exact spectrum is 1 / (2 sinh 0.05).
    assert numeric == pytest.approx(9.9958345482908392804, rel=2e-3)
    assert float(rows[0][3]) <= 0.05


# ---------------------------------------------------------------------------
# volterra-verify


def test_volterra_verify_passes(capsys):
    code, out, err = run_cli(
        capsys,
        [
            "volterra-verify",
            "--alpha",
            "2",
            "--b",
            "1",
            "--lmin",
            "100",
            "--lmax",
            "1e5",
            "--count",
            "6",
            "--samples",
            "2",
        ],
    )
    assert code == 0
    rows = cli.read_table(out, "check,value,threshold,passed")
    by_check = {cells[0]: cells for cells in rows}
    assert float(by_check["f_est_decay_exponent"][1]) >= 0.4
    assert by_check["f_est_decay_exponent"][3] == "True"
    assert by_check["dual_path_gap"][3] == "True"
    assert "PASS f_est_decay_exponent" in err


def test_volterra_verify_validates_window(capsys):
    code, _, err = run_cli(capsys, ["volterra-verify", "--alpha", "2", "--lmin", "1.5"])
    assert code == 2
    assert "lmin" in err


# ---------------------------------------------------------------------------
# examples


def test_examples_shifted_passes(capsys):
    code, out, _ = run_cli(capsys, ["examples", "shifted"])
    assert code == 0
    assert "[PASS] criterion 10" in out


# ---------------------------------------------------------------------------
# configuration errors and table parsing


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--alpha", "2", "--n", "5..2"],
        ["spectrum", "--alpha", "1.0", "--n", "1..3"],
        ["spectrum", "--alpha", "2", "--terms", "1:2", "--n", "1..3"],
        ["spectrum", "--n", "1..3"],
        ["spectrum", "--alpha", "2", "--perturbation", "step:height=0.5"],
        ["spectrum", "--alpha", "2", "--perturbation", "wiggle:foo=1"],
        ["spectrum", "--alpha", "2", "--tol", "-1"],
    ],
)
def test_configuration_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, argv)
    assert code == 2
    assert "configuration error" in err


def test_malformed_config_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    code, _, err = run_cli(capsys, ["spectrum", "--config", str(bad)])
    assert code == 2
    assert "not valid JSON" in err


def test_read_table_validation():
    with pytest.raises(ConfigError):
        cli.read_table("garbage", "a,b")
    with pytest.raises(ConfigError):
        cli.read_table("# schema_version=1\nwrong,header\n1,2", "a,b")
    with pytest.raises(ConfigError):
        cli.read_table("a,b\n1,2", "a,b")  # missing version line
    rows = cli.read_table("# schema_version=1\na,b\n1,2\n3,4", "a,b")
    assert rows == [["1", "2"], ["3", "4"]]
