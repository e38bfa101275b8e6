"""Field and measure serialization round-trips."""

import json

import numpy as np
import pytest

from fracpot import Grid, GridField, Measure
from fracpot.errors import ConfigError, GridMismatch
from fracpot.io import (
    field_to_csv,
    measure_from_dict,
    measure_to_dict,
    read_field,
    read_measure,
    write_field,
    write_measure,
)


@pytest.fixture
def grid():
    return Grid(2, 4.0, 32)


def test_field_round_trip_is_bitwise(tmp_path, grid):
    rng = np.random.default_rng(3)
    f = GridField(grid, rng.standard_normal(grid.shape))
    path = tmp_path / "u.field"
    write_field(f, path)
    g = read_field(path)
    assert g.grid == grid
    assert np.array_equal(g.values, f.values)


def test_field_sidecar_records_grid(tmp_path, grid):
    write_field(grid.zeros(), tmp_path / "u.field")
    sidecar = json.loads((tmp_path / "u.field.json").read_text())
    assert sidecar == {"n": 2, "N": 32, "L": 4.0}


def test_field_read_rejects_tampered_sidecar(tmp_path, grid):
    write_field(grid.zeros(), tmp_path / "u.field")
    side = tmp_path / "u.field.json"
    meta = json.loads(side.read_text())
    meta["N"] = 64
    side.write_text(json.dumps(meta))
    with pytest.raises(GridMismatch):
        read_field(tmp_path / "u.field")


def test_atomic_measure_round_trip(tmp_path):
    om = Measure.from_atoms(
        np.array([[0.5, -0.25], [0.0, 0.0]]), np.array([1.0, 2.5])
    )
    back = measure_from_dict(measure_to_dict(om))
    assert back.kind == "atomic"
    assert np.array_equal(back.atoms, om.atoms)
    assert np.array_equal(back.weights, om.weights)
    assert back.support_radius == om.support_radius
    path = tmp_path / "omega.json"
    write_measure(om, path)
    again = read_measure(path)
    assert again.total_mass() == pytest.approx(om.total_mass(), rel=1e-15)


def test_uniform_ball_measure_round_trip():
    om = Measure.uniform_ball(np.array([0.5, 0.0]), 1.5, 0.25)
    back = measure_from_dict(measure_to_dict(om))
    assert back.kind == "uniform_ball"
    assert back.ball_radius == om.ball_radius
    assert back.ball_amplitude == om.ball_amplitude
    assert back.total_mass() == pytest.approx(om.total_mass(), rel=1e-14)


def test_density_measure_round_trip(tmp_path, grid):
    X, Y = grid.coords()
    vals = np.exp(-(X**2 + Y**2))
    vals[X**2 + Y**2 > 9.0] = 0.0
    om = Measure.from_density(GridField(grid, vals), support_radius=3.0)
    write_field(om.density, tmp_path / "dens.field")
    d = measure_to_dict(om, density_file="dens.field")
    back = measure_from_dict(d, base_dir=tmp_path)
    assert np.array_equal(back.density.values, om.density.values)
    assert back.support_radius == om.support_radius


def test_density_measure_serialisation_needs_file_name():
    g = Grid(2, 2.0, 16)
    om = Measure.from_density(g.zeros(), support_radius=1.0)
    with pytest.raises(ConfigError):
        measure_to_dict(om)


def test_measure_dict_rejects_unknown_keys():
    om = Measure.from_atoms(np.zeros((1, 2)), np.ones(1))
    d = measure_to_dict(om)
    d["mystery"] = 1
    with pytest.raises(ConfigError):
        measure_from_dict(d)


def test_measure_dict_rejects_unknown_kind():
    with pytest.raises(ConfigError):
        measure_from_dict({"kind": "fractal", "support_radius": 1.0})


def test_field_to_csv_header_and_rows(tmp_path, grid):
    path = tmp_path / "u.csv"
    field_to_csv(grid.zeros(), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "i0,i1,x0,x1,value"
    assert len(lines) == 1 + grid.size
