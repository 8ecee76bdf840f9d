import numpy as np
import pytest

from fracadapt.errors import CellFailedError
from fracadapt.mc import (
    CSV_COLUMNS, REFERENCE_RATIOS, McConfig, _cells_from_records, delta_diagnostic, run_cell,
    run_tables, with_overrides)
from fracadapt.model import ModelSpec

SMALL = dict(n=64, reps=30, xi0_list=(0.25, 1.25), L_list=(1, 2))


def test_config_validation_and_presets():
    with pytest.raises(ValueError):
        McConfig(reps=0)
    with pytest.raises(ValueError):
        McConfig(n=16)
    with pytest.raises(ValueError):
        McConfig(trim_interval=(1.0, 0.0))
    with pytest.raises(ValueError):
        McConfig.table(6)
    assert McConfig.table(2).dist == "mixsym" and McConfig.table(5).dist == "t5"
    assert McConfig(phi_kinds=("id", "bounded")).phi_kinds == ("identity", "bounded")
    assert with_overrides(McConfig(), reps=5, n=None).reps == 5


def test_reference_tables_are_complete():
    assert sorted(REFERENCE_RATIOS) == [1, 2, 3, 4, 5]
    for rows in REFERENCE_RATIOS.values():
        assert np.array(rows).shape == (4, 8)
    assert REFERENCE_RATIOS[1][1][0] == 0.47
    assert REFERENCE_RATIOS[2][1][1] == 0.91
    assert REFERENCE_RATIOS[5][2][4] == 0.51


def test_table_shape_and_csv():
    tables = run_tables(McConfig(**SMALL))
    assert tables.ratios().shape == (2, 4)
    lines = tables.to_csv().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 1 + 8
    text = tables.to_text()
    assert "phi=identity" in text and "phi=bounded" in text
    for c in tables.cells:
        assert c.ratio == c.mse_adaptive / c.mse_initial
        assert 0 <= c.boundary_hits <= c.reps and 0 <= c.failures <= c.reps


def test_cells_are_paired_across_columns():
    cfg = McConfig(**SMALL)
    tables = run_tables(cfg)
    cell = run_cell(cfg, 0.25, "bounded", 2)
    same = [c for c in tables.cells if (c.xi0, c.phi, c.L) == (0.25, "bounded", 2)][0]
    assert cell == same
    row = [c.mse_initial for c in tables.cells if c.xi0 == 0.25]
    assert len(set(row)) == 1


def test_determinism_across_threads():
    cfg = McConfig(**SMALL, base_seed=7)
    a = run_tables(cfg).to_csv()
    assert run_tables(cfg).to_csv() == a
    assert run_tables(with_overrides(cfg, threads=3)).to_csv() == a
    assert run_tables(with_overrides(cfg, base_seed=8)).to_csv() != a


def test_all_failures_raise():
    with pytest.raises(CellFailedError):
        _cells_from_records(McConfig(reps=2), 0.25, [("identity", 1)],
                            [(np.nan, False, [np.nan]), (0.2, False, [np.nan])])


@pytest.mark.slow
def test_gaussian_ratios_and_boundary_accounting():
    tables = run_tables(McConfig(reps=1000, phi_kinds=("identity",)))
    assert np.all(tables.ratios() < 1.1)
    hits = {c.xi0: c.boundary_hits for c in tables.cells if c.L == 1}
    assert min(hits[-0.25], hits[1.25]) > max(hits[0.25], hits[0.75])


def test_delta_zero_for_white_noise():
    d = delta_diagnostic(0.0, "gaussian", 100, 5, 0)
    assert np.all(d[:, 1] == 0.0)
    np.testing.assert_array_equal(d[:, 0], np.arange(1, 101))


def test_delta_geometric_decay_for_ma():
    # with an AR(1) part the AR filter is finite and delta vanishes after t = 1;
    # an MA(1) part gives an infinite AR filter and geometric decay
    ar = delta_diagnostic(0.0, "gaussian", 40, 20, 1, ModelSpec(1, 0), (0.5,))
    assert np.all(ar[1:, 1] < 1e-25)
    ma = delta_diagnostic(0.0, "gaussian", 40, 200, 1, ModelSpec(0, 1), (0.5,))
    t, m = ma[:25, 0], ma[:25, 1]
    slope = np.polyfit(t, np.log(m), 1)[0]
    assert slope < -0.1


def test_delta_band_short_run():
    d = delta_diagnostic(0.25, "gaussian", 256, 100, 2)
    band = d[9:, 2]
    assert band.max() / band.min() < 10
