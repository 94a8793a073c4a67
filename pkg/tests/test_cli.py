"""Tests for the command-line front end."""

import json
import math

import pytest

from src.renormgeo.cli.router import build_parser, load_config
from src.renormgeo.core.handlers import (
    EXIT_INTERNAL_ERROR,
    EXIT_LIBRARY_ERROR,
    EXIT_OK,
    handle_exception,
)
from src.renormgeo.main import main

HEMISPHERE = "builtin:geodesic_hemisphere"


def _run(capsys, argv: list[str]) -> tuple[int, dict]:
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


# ===== Parsing =====


def test_parser_knows_every_subcommand():
    """All seven subcommands are registered."""
    parser = build_parser()
    for argv in (
        ["catalog", "list"],
        ["curvature", "--surface", HEMISPHERE],
        ["integrate", "--surface", HEMISPHERE],
        ["renorm", "--surface", HEMISPHERE],
        ["expand", "--surface", HEMISPHERE],
        ["verify", "--theorem", "thm2", "--surface", HEMISPHERE],
        ["suite", "--quick"],
    ):
        assert parser.parse_args(argv).subcommand == argv[0]


def test_flags_override_config_file(tmp_path):
    """Explicit flags win over --config keys; theorem ids are case-insensitive."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"surface": HEMISPHERE, "rungs": 6, "theorem": "cor1"}))
    config = load_config(["--config", str(path), "--rungs", "9", "verify"])
    assert config.surface == HEMISPHERE
    assert config.rungs == 9
    assert config.theorem == "COR1"


def test_unknown_theorem_rejected_by_parser():
    """argparse refuses theorem ids it does not know."""
    with pytest.raises(SystemExit):
        load_config(["verify", "--theorem", "thm9"])


# ===== Commands =====


def test_catalog_list(capsys):
    """catalog list prints the five families as JSON."""
    code, payload = _run(capsys, ["catalog", "list"])
    assert code == EXIT_OK
    assert payload["success"] is True
    assert {s["name"] for s in payload["surfaces"]} >= {"geodesic_hemisphere", "round_sphere"}


def test_curvature_at_reference_point(capsys):
    """The curvature report carries both frames and the conformal residuals."""
    code, payload = _run(capsys, ["curvature", "--surface", HEMISPHERE])
    assert code == EXIT_OK
    assert payload["extrinsic"]["H_hyp"] == pytest.approx(0.0, abs=1e-12)
    assert payload["intrinsic"]["lambda"] == pytest.approx(-1.0)
    assert payload["conformal"]["success"] is True


def test_integrate_single_eps(capsys):
    """A single truncated area, 2 pi (1/eps - 1)."""
    code, payload = _run(
        capsys,
        ["--threads", "1", "integrate", "--surface", HEMISPHERE, "--eps", "0.25"],
    )
    assert code == EXIT_OK
    assert payload["integrals"][0]["value"] == pytest.approx(6 * math.pi, rel=1e-10)


def test_integrate_ladder_as_csv(capsys):
    """CSV output lists one (eps, value) row per rung."""
    code = main(
        ["--format", "csv", "--rungs", "4", "integrate", "--surface", HEMISPHERE]
    )
    lines = capsys.readouterr().out.strip().splitlines()
    assert code == EXIT_OK
    assert lines[0] == "eps,value"
    assert len(lines) == 5
    eps, value = (float(x) for x in lines[1].split(","))
    assert value == pytest.approx(2 * math.pi * (1 / eps - 1), rel=1e-10)


def test_renorm_writes_output_file(tmp_path, capsys):
    """--output sends the report to a file and leaves stdout empty."""
    target = tmp_path / "renorm.json"
    code = main(["--output", str(target), "renorm", "--surface", HEMISPHERE])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""
    payload = json.loads(target.read_text())
    assert payload["finite_part"] == pytest.approx(-2 * math.pi, rel=1e-7)


def test_verify_passing_identity(capsys):
    """A passing check exits 0 and reports pass."""
    code, payload = _run(
        capsys,
        ["verify", "--theorem", "gb", "--surface", "builtin:round_sphere", "--metric", "euclidean"],
    )
    assert code == EXIT_OK
    assert payload["pass"] is True
    assert payload["theorem_id"] == "GB"


# ===== Errors =====


def test_missing_surface_is_a_config_error(capsys):
    """Commands that need a surface say so with exit code 2."""
    code, payload = _run(capsys, ["integrate"])
    assert code == EXIT_LIBRARY_ERROR
    assert payload["error_code"] == "ConfigError"


def test_unknown_config_key(tmp_path, capsys):
    """Unknown keys in the config file are listed."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"surface": HEMISPHERE, "epsilon": 0.1}))
    code, payload = _run(capsys, ["--config", str(path), "renorm"])
    assert code == EXIT_LIBRARY_ERROR
    assert payload["details"]["unknown"] == ["epsilon"]


def test_invalid_value_is_a_validation_error(capsys):
    """Pydantic bounds on the run configuration surface as exit code 2."""
    code, payload = _run(capsys, ["--rungs", "1", "renorm", "--surface", HEMISPHERE])
    assert code == EXIT_LIBRARY_ERROR
    assert payload["error_code"] == "VALIDATION_ERROR"


def test_precondition_failure(capsys):
    """The area formula at eps = 0 on a non-closed chart is a library error."""
    code, payload = _run(
        capsys, ["verify", "--theorem", "prop1", "--surface", HEMISPHERE, "--eps", "0"]
    )
    assert code == EXIT_LIBRARY_ERROR
    assert payload["error_code"] == "VerificationError"


def test_dimension_mismatch_for_gauss_bonnet(capsys):
    """Gauss-Bonnet is for surfaces, Chern-Gauss-Bonnet for 4-manifolds."""
    code, payload = _run(
        capsys, ["verify", "--theorem", "cgb", "--surface", HEMISPHERE, "--eps", "0.1"]
    )
    assert code == EXIT_LIBRARY_ERROR
    assert payload["details"]["dom_dim"] == 2


def test_csv_refused_for_non_ladder_reports(capsys):
    """Only ladders have a CSV rendering."""
    code, payload = _run(capsys, ["--format", "csv", "catalog", "list"])
    assert code == EXIT_LIBRARY_ERROR
    assert payload["details"]["format"] == "csv"


def test_unexpected_errors_map_to_internal_error():
    """Anything outside the library hierarchy exits 3 without leaking the message."""
    report, code = handle_exception(ZeroDivisionError("boom"))
    assert code == EXIT_INTERNAL_ERROR
    assert report.error_code == "INTERNAL_ERROR"
    assert "boom" not in (report.message or "")
