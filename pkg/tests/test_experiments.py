import json

import pytest

import dsmsim.experiments as experiments
from dsmsim.errors import ConfigError
from dsmsim.experiments import (
    CURVE_FIELDS,
    RESULT_FIELDS,
    FigureRunError,
    export_csv,
    export_json,
    parse_config,
    run_figure,
)


def test_minimal_document_gets_defaults():
    config = parse_config("{}")
    assert config.repetitions == 50
    assert config.mode == "pure"
    assert config.configuration == "both"
    assert config.copy_budgets == (1000,)
    assert config.state_kind == "ghz"


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        parse_config('{"shots": 100}')
    with pytest.raises(ConfigError):
        parse_config('{"task": "qfi", "copy_budgets": [10]}')


def test_epsilon_rejected_in_pure_mode():
    with pytest.raises(ConfigError):
        parse_config('{"mode": "pure", "epsilon": 0.5}')
    with pytest.raises(ConfigError):
        parse_config('{"mode": "pure", "epsilon_sweep": [0.1]}')


def test_sigma_prep_rejected_in_mixed_mode():
    with pytest.raises(ConfigError):
        parse_config('{"mode": "mixed", "sigma_prep": 0.1}')
    config = parse_config('{"mode": "mixed", "epsilon": 0.3, "sigma_post": 0.1}')
    assert config.epsilon == 0.3


@pytest.mark.parametrize("doc", [
    '{"mode": "thermal"}',
    '{"configuration": "C3"}',
    '{"copy_budgets": []}',
    '{"copy_budgets": [0]}',
    '{"repetitions": 0}',
    '{"sigma_sweep": []}',
    '{"sigma_sweep": [-0.1]}',
    '{"mode": "mixed", "epsilon": 1.5}',
    '{"state_kind": "dicke"}',
    '{"state_kind": "ghz", "dicke_excitations": 1}',
    '{"num_qubits": 0}',
    '{"state_kind": "custom"}',
    '{"num_qubits": true}',
    '{"repetitions": true}',
    '{"master_seed": -3}',
    '{"copy_budgets": [true]}',
    'not json',
    '[1, 2]',
])
def test_invalid_documents_rejected(doc):
    with pytest.raises(ConfigError):
        parse_config(doc)


def test_round_trip_identity():
    docs = [
        '{"state_kind": "w", "sigma_sweep": [0.0, 0.1], "copy_budgets": [10, 20]}',
        '{"mode": "mixed", "epsilon_sweep": [0.0, 1.0], "sigma_post": 0.05}',
        '{"task": "qfi", "sigma_prep": 0.2, "histogram_bins": 10}',
        '{"state_kind": "dicke", "dicke_excitations": 2, "num_qubits": 3}',
    ]
    for doc in docs:
        config = parse_config(doc)
        assert parse_config(json.dumps(config.to_dict())) == config


def test_custom_amplitudes_state():
    amps = [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
    config = parse_config(json.dumps(
        {"state_kind": "custom", "num_qubits": 2, "custom_amplitudes": amps}))
    state = config.build_state()
    assert state.amps[0] == 1.0 + 0.0j
    assert config.state_label() == "custom2"


def test_grid_row_count_and_order():
    config = parse_config(json.dumps({
        "num_qubits": 2,
        "sigma_sweep": [0.0, 0.01, 0.1],
        "copy_budgets": [60, 120, 240, 480],
        "repetitions": 2,
        "master_seed": 5,
    }))
    tables = run_figure(config)
    rows = tables["results"]
    assert len(rows) == 24
    assert [row["config"] for row in rows[:12]] == ["C1"] * 12
    assert [row["num_copies"] for row in rows[:4]] == [60, 120, 240, 480]
    assert rows[0]["sigma_prep"] == rows[0]["sigma_post"] == 0.0
    assert all(row["epsilon"] is None for row in rows)
    assert all(0.0 <= row["mean_distance"] <= 1.0 for row in rows)
    assert all(row["std_error"] >= 0.0 for row in rows)
    assert all(row["error"] == "" for row in rows)


def test_mixed_grid_uses_epsilon_sweep():
    config = parse_config(json.dumps({
        "mode": "mixed",
        "num_qubits": 2,
        "configuration": "C1",
        "sigma_sweep": [0.0, 0.05],
        "epsilon_sweep": [0.0, 0.5, 1.0],
        "copy_budgets": [96],
        "repetitions": 2,
    }))
    rows = run_figure(config)["results"]
    assert len(rows) == 6
    assert {row["epsilon"] for row in rows} == {0.0, 0.5, 1.0}
    assert all(row["sigma_prep"] == 0.0 for row in rows)


def test_eleven_by_eleven_grid_shape():
    config = parse_config(json.dumps({
        "mode": "mixed",
        "num_qubits": 2,
        "configuration": "both",
        "sigma_sweep": [round(0.01 * i, 2) for i in range(11)],
        "epsilon_sweep": [round(0.1 * i, 1) for i in range(11)],
        "copy_budgets": [48],
        "repetitions": 1,
    }))
    rows = run_figure(config)["results"]
    assert len(rows) == 121 * 2


def test_failed_grid_point_flushes_partial_rows(monkeypatch):
    config = parse_config(json.dumps({
        "num_qubits": 2, "configuration": "C1",
        "copy_budgets": [50, 60, 70], "repetitions": 1,
    }))
    calls = {"n": 0}
    real = experiments.run_repetitions

    def flaky(point, threads=1, executor=None):
        calls["n"] += 1
        if calls["n"] == 3:
            raise RuntimeError("worker exploded")
        return real(point, threads=threads, executor=executor)

    monkeypatch.setattr(experiments, "run_repetitions", flaky)
    with pytest.raises(FigureRunError) as excinfo:
        run_figure(config)
    rows = excinfo.value.rows
    assert len(rows) == 3
    assert rows[0]["error"] == "" and rows[1]["error"] == ""
    assert "worker exploded" in rows[2]["error"]
    assert rows[2]["mean_distance"] is None


def test_determinism_of_run_figure():
    doc = json.dumps({"num_qubits": 2, "configuration": "C2",
                      "copy_budgets": [300], "repetitions": 3, "master_seed": 9})
    first = run_figure(parse_config(doc))
    second = run_figure(parse_config(doc), threads=3)
    assert first == second


def test_qfi_task_tables():
    config = parse_config(json.dumps({
        "task": "qfi", "state_kind": "haar", "num_qubits": 3, "state_seed": 7,
        "sigma_prep": 0.1, "norm_samples": 20000,
        "norm_grid": [0.5, 2.0, 16], "histogram_bins": 12, "master_seed": 3,
    }))
    tables = run_figure(config)
    curves, hist = tables["curves"], tables["histogram"]
    assert len(curves) == 16
    assert all(row["variance_noiseless"] == pytest.approx(1 / 28) for row in curves)
    assert curves[0]["variance_noisy"] == pytest.approx(0.25 / 28)
    assert curves[-1]["variance_noisy"] == pytest.approx(4.0 / 28)
    assert len(hist) == 12
    widths = [row["bin_right"] - row["bin_left"] for row in hist]
    mass = sum(row["density"] * w for row, w in zip(hist, widths))
    assert mass == pytest.approx(1.0, abs=1e-9)
    assert run_figure(config) == tables


def test_csv_export_shapes(tmp_path):
    path = tmp_path / "table.csv"
    export_csv([], RESULT_FIELDS, path)
    assert path.read_text() == ",".join(RESULT_FIELDS) + "\n"
    row = {name: None for name in RESULT_FIELDS}
    row.update(state="ghz3", mode="pure", config="C1", sigma_prep=0.0,
               sigma_post=0.0, num_copies=10, repetitions=1, seed=0,
               mean_distance=0.25, std_error=0.0, error="")
    export_csv([row], RESULT_FIELDS, path)
    text = path.read_text()
    assert len(text.splitlines()) == 2
    assert ",,," not in text.splitlines()[0]
    assert text.splitlines()[1].split(",")[RESULT_FIELDS.index("epsilon")] == ""


def test_csv_quotes_error_messages(tmp_path):
    row = {name: "" for name in RESULT_FIELDS}
    row["error"] = 'ValueError: bad value, with "quotes"'
    path = tmp_path / "err.csv"
    export_csv([row], RESULT_FIELDS, path)
    import csv as csv_module
    with open(path, newline="") as handle:
        parsed = list(csv_module.DictReader(handle))
    assert parsed[0]["error"] == row["error"]


def test_exports_are_byte_stable(tmp_path):
    rows = [{"norm_const": 0.5, "variance_noiseless": 1 / 28, "variance_noisy": 0.25 / 28}]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    export_csv(rows, CURVE_FIELDS, a)
    export_csv(rows, CURVE_FIELDS, b)
    assert a.read_bytes() == b.read_bytes()
    ja, jb = tmp_path / "a.json", tmp_path / "b.json"
    export_json(rows, CURVE_FIELDS, ja)
    export_json(rows, CURVE_FIELDS, jb)
    assert ja.read_bytes() == jb.read_bytes()
    assert json.loads(ja.read_text())[0]["norm_const"] == 0.5
