"""
Tests for CSV emission, metadata sidecars, config hashing and logging.
"""

import logging

import numpy as np
import polars as pl
import pytest

from rabicat.utils.logging_config import get_logger, setup_logging
from rabicat.utils.tools import (
    format_float_column,
    get_package_version,
    hash_config,
    metadata_path_for,
    read_metadata,
    write_csv,
    write_metadata,
)


class TestWriteCsv:
    def test_float_formatting(self, tmp_path):
        df = pl.DataFrame({"t": [0.0, 0.1], "avg_x": [1.0 / 3.0, -2.5e-12]})
        path = write_csv(df, tmp_path / "out" / "run.csv")
        assert path.read_text().splitlines() == [
            "t,avg_x",
            "0,0.333333333333",
            "0.1,-2.5e-12",
        ]

    def test_string_and_integer_columns(self, tmp_path):
        df = pl.DataFrame({"n": [1, 2], "exit_channel": ["left", "none"], "error": ["", ""]})
        path = write_csv(df, tmp_path / "mixed.csv")
        assert path.read_text().splitlines() == ["n,exit_channel,error", "1,left,", "2,none,"]

    def test_repeated_writes_are_identical(self, tmp_path):
        rng = np.random.default_rng(0)
        df = pl.DataFrame({"a": rng.normal(size=50), "b": rng.normal(size=50)})
        first = write_csv(df, tmp_path / "a.csv").read_bytes()
        second = write_csv(df, tmp_path / "b.csv").read_bytes()
        assert first == second

    def test_format_float_column(self):
        out = format_float_column(np.array([1.0, np.nan, 123456789012345.0]))
        assert out.tolist() == ["1", "nan", "1.23456789012e+14"]


class TestMetadata:
    def test_sidecar_path(self, tmp_path):
        assert metadata_path_for(tmp_path / "run.csv").name == "run.csv.meta.yaml"

    def test_round_trip(self, tmp_path):
        data = tmp_path / "run.csv"
        data.write_text("t\n0\n")
        meta = {"config": {"model": {"R": 4.0}}, "method": "krylov", "config_hash": "abc"}
        write_metadata(data, meta)
        loaded = read_metadata(data)
        assert loaded["config"] == {"model": {"R": 4.0}}
        assert loaded["method"] == "krylov"
        assert loaded["rabicat_version"] == get_package_version()

    def test_missing_sidecar(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="sidecar"):
            read_metadata(tmp_path / "run.csv")

    def test_version_is_known(self):
        assert get_package_version() != "unknown"


class TestHashConfig:
    def test_key_order_does_not_matter(self):
        a = {"model": {"R": 100.0, "mu": 0.0}, "outputs": ["t"]}
        b = {"outputs": ["t"], "model": {"mu": 0.0, "R": 100.0}}
        assert hash_config(a) == hash_config(b)

    def test_values_matter(self):
        assert hash_config({"R": 100.0}) != hash_config({"R": 1000.0})


class TestLogging:
    def test_module_names_stay_in_package(self):
        assert get_logger("rabicat.analyze.sweeps").name == "rabicat.analyze.sweeps"
        assert get_logger("__main__").name == "rabicat.__main__"

    def test_setup_replaces_handlers(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        setup_logging("DEBUG", log_file=log_file, console_output=False)
        package = setup_logging("DEBUG", log_file=log_file, console_output=False)
        assert len(package.handlers) == 1
        assert package.level == logging.DEBUG

        get_logger("rabicat.simulation").debug("propagator chosen")
        for handler in package.handlers:
            handler.flush()
        assert log_file.read_text().count("propagator chosen") == 1

    def test_unknown_level_falls_back_to_info(self):
        package = setup_logging("chatty", console_output=False)
        assert package.level == logging.INFO
