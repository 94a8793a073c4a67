"""Tests for settings, config validation and error handling."""

import os

import pytest
from pydantic import ValidationError

from src.renormgeo.core.config import Settings
from src.renormgeo.core.exceptions import ConfigError, QuadratureError
from src.renormgeo.core.handlers import EXIT_LIBRARY_ERROR, handle_exception
from src.renormgeo.core.validators import validate_config_keys, validate_thread_count
from src.renormgeo.schemas.run import RunConfig
from src.renormgeo.services.theorems import TheoremService

# ===== Settings =====


def test_threads_zero_means_one_per_cpu(monkeypatch):
    """RENORMGEO_THREADS=0 resolves to the CPU count."""
    monkeypatch.setenv("RENORMGEO_THREADS", "0")
    assert Settings().threads == (os.cpu_count() or 1)


def test_threads_from_environment(monkeypatch):
    """An explicit worker count is used as given."""
    monkeypatch.setenv("RENORMGEO_THREADS", "3")
    assert Settings().threads == 3


@pytest.mark.parametrize("raw", ["-1", "many"])
def test_bad_thread_count_in_environment(monkeypatch, raw):
    """Negative and non-integer worker counts are rejected."""
    monkeypatch.setenv("RENORMGEO_THREADS", raw)
    with pytest.raises(ValueError):
        Settings().threads


def test_log_level_resolution():
    """An explicit level wins; otherwise debug mode picks DEBUG."""
    assert Settings(log_level="warning").resolved_log_level == "WARNING"
    assert Settings(log_level=None, debug=True).resolved_log_level == "DEBUG"
    assert Settings(log_level=None, debug=False).resolved_log_level == "INFO"


# ===== Validators =====


def test_unknown_keys_are_all_listed():
    """Every offending key is reported, sorted."""
    with pytest.raises(ConfigError) as info:
        validate_config_keys({"rungs": 5, "zeta": 1, "alpha": 2}, ["rungs", "eps0"])
    assert info.value.details["unknown"] == ["alpha", "zeta"]
    assert info.value.details["allowed"] == ["eps0", "rungs"]


def test_thread_count_validator():
    """Zero and positive counts pass through; negatives do not."""
    assert validate_thread_count(0) == 0
    assert validate_thread_count(4) == 4
    with pytest.raises(ConfigError):
        validate_thread_count(-2)


# ===== Run configuration =====


def test_run_config_forbids_extra_keys():
    """Typos in config files do not pass silently."""
    with pytest.raises(ValidationError):
        RunConfig.model_validate({"subcommand": "renorm", "epsilon": 0.1})


def test_run_config_bounds():
    """Ladder and quadrature overrides are range-checked."""
    for bad in ({"ratio": 1.0}, {"rungs": 2}, {"rule": 1}, {"eps": -0.1}, {"threads": -1}):
        with pytest.raises(ValidationError):
            RunConfig(subcommand="renorm", **bad)


def test_theorem_ids_are_upper_cased():
    """Lower-case ids from the command line map onto report ids."""
    assert RunConfig(subcommand="verify", theorem="thm3").theorem == "THM3"


def test_quadrature_overrides():
    """Only the overrides that were given replace the settings defaults."""
    default = RunConfig(subcommand="integrate").quadrature_spec()
    spec = RunConfig(subcommand="integrate", rule=12, threads=2).quadrature_spec()
    assert spec.rule == 12
    assert spec.threads == 2
    assert spec.profile_rule == default.profile_rule
    assert spec.subdivision == default.subdivision


# ===== Error handling =====


def test_library_errors_keep_their_class_name():
    """Library exceptions become error reports named after the exception class."""
    report, code = handle_exception(QuadratureError("integral diverges", details={"eps": 0.0}))
    assert code == EXIT_LIBRARY_ERROR
    assert report.success is False
    assert report.error_code == "QuadratureError"
    assert report.details == {"eps": 0.0}


def test_missing_files_are_io_errors(tmp_path):
    """OSError maps to IO_ERROR with the file name."""
    missing = tmp_path / "absent.json"
    try:
        missing.read_text()
    except OSError as exc:
        report, code = handle_exception(exc)
    assert code == EXIT_LIBRARY_ERROR
    assert report.error_code == "IO_ERROR"
    assert report.details["filename"] == str(missing)


def test_validation_errors_are_reported():
    """Pydantic errors carry their locations."""
    try:
        RunConfig(subcommand="renorm", rungs=1)
    except ValidationError as exc:
        report, code = handle_exception(exc)
    assert code == EXIT_LIBRARY_ERROR
    assert report.error_code == "VALIDATION_ERROR"
    assert report.details["errors"][0]["loc"] == ("rungs",)


def test_foreign_numeric_errors_are_wrapped(hemisphere, monkeypatch):
    """Failures outside the library surface as QuadratureError."""

    def explode(*args, **kwargs):
        raise FloatingPointError("overflow")

    monkeypatch.setattr("src.renormgeo.services.theorems.integrate_many", explode)
    with pytest.raises(QuadratureError) as info:
        TheoremService().prop1(hemisphere, 0.1)
    assert info.value.details["original_error"] == "overflow"
