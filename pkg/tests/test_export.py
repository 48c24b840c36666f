import json

import numpy as np
import pandas as pd
import pytest

from meanfield import export
from meanfield.masses import compute_masses
from meanfield.utils import config_hash, file_md5


def test_profile_roundtrip(tmp_path, profile_half, settings):
    header = export.run_header({"command": "shoot", "alpha": 0.0}, settings)
    path = export.write_profile(profile_half, tmp_path / "profile.txt", header)
    back = export.read_profile(path)
    np.testing.assert_array_equal(back.nodes.r, profile_half.nodes.r)
    np.testing.assert_array_equal(back.nodes.y, profile_half.nodes.y)
    np.testing.assert_array_equal(back.nodes.dy, profile_half.nodes.dy)
    np.testing.assert_array_equal(back.nodes.lap, profile_half.nodes.lap)
    assert back.nodes.log_from == profile_half.nodes.log_from
    x = np.geomspace(1e-3, 50.0, 40)
    np.testing.assert_array_equal(back.nodes.laplacian(x), profile_half.nodes.laplacian(x))
    assert back.beta_estimate == profile_half.beta_estimate
    assert back.config == profile_half.config
    assert back.diagnostics == profile_half.diagnostics


def test_table_header_and_line_endings(tmp_path, settings):
    header = export.run_header({"command": "test"}, settings)
    df = pd.DataFrame({"alpha": [2.0, 1.0], "value": [1 / 3, 2 / 3]})
    path = export.write_table(df, tmp_path / "t.csv", header, sort_by=["alpha"])
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    lines = raw.decode("utf-8").splitlines()
    assert lines[0].startswith("# version: ")
    assert any(line.startswith("# config_hash: ") for line in lines)
    back = export.read_table(path)
    assert list(back["alpha"]) == [1.0, 2.0]
    assert back["value"].iloc[0] == 2 / 3


def test_outputs_are_deterministic(tmp_path, profile_half, settings):
    reports = [compute_masses(profile_half, settings)]
    header = export.run_header({"command": "masses"}, settings)
    df = export.mass_frame(reports)
    a = export.write_table(df, tmp_path / "a.csv", header)
    b = export.write_table(df, tmp_path / "b.csv", header)
    assert file_md5(a) == file_md5(b)


def test_run_header_hash_tracks_config(settings):
    one = export.run_header({"command": "curve", "tau": 0.5}, settings)
    two = export.run_header({"command": "curve", "tau": 0.25}, settings)
    assert one["config_hash"] != two["config_hash"]
    assert one["config_hash"] == export.run_header({"tau": 0.5, "command": "curve"}, settings)["config_hash"]
    assert one["seed"] == settings.seed


def test_config_hash_is_key_order_independent():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})


def test_mass_frame_columns(profile_half, settings):
    df = export.mass_frame([compute_masses(profile_half, settings)])
    assert list(df.columns) == ["gamma", "alpha", "m1", "m_gamma", "total", "flux_mass",
                                "energy_residual", "tail_refused"]
    assert df["total"].iloc[0] == pytest.approx(df["m1"].iloc[0] + df["m_gamma"].iloc[0])


def test_write_json_sorted(tmp_path):
    path = export.write_json({"b": 1, "a": 2}, tmp_path / "x.json")
    text = path.read_text()
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": 2, "b": 1}
