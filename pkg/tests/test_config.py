"""Configuration resolution: precedence, validation, round-tripping."""

import pytest

from hierarchy_abm.config import (
    ConfigError,
    ModelParams,
    SweepSpec,
    config_as_dict,
    load_config_file,
    resolve_config,
    with_cell,
)


def test_defaults_resolve():
    config = resolve_config(env={})
    assert config.params.capacity == 200
    assert config.sweep.replicates == 20
    assert config.sweep.steps == 30000


def test_file_values_override_defaults():
    config = resolve_config({"capacity": 77, "replicates": 3}, env={})
    assert config.params.capacity == 77
    assert config.sweep.replicates == 3


def test_flags_override_file():
    config = resolve_config({"capacity": 77}, {"capacity": 99}, env={})
    assert config.params.capacity == 99


def test_none_overrides_ignored():
    config = resolve_config({"capacity": 77}, {"capacity": None}, env={})
    assert config.params.capacity == 77


def test_env_seed_between_flags_and_file():
    config = resolve_config({"base_seed": 1}, {}, env={"HIERARCHY_ABM_SEED": "5"})
    assert config.sweep.base_seed == 5
    config = resolve_config({"base_seed": 1}, {"base_seed": 2},
                            env={"HIERARCHY_ABM_SEED": "5"})
    assert config.sweep.base_seed == 2


def test_env_seed_must_be_integer():
    with pytest.raises(ConfigError):
        resolve_config({}, {}, env={"HIERARCHY_ABM_SEED": "yes"})


def test_unknown_key_named_in_error():
    with pytest.raises(ConfigError, match="wibble"):
        resolve_config({"wibble": 1}, env={})


def test_invalid_value_rejected():
    with pytest.raises(ConfigError):
        resolve_config({"fertility": 1.5}, env={})
    with pytest.raises(ConfigError):
        resolve_config({"replicates": 0}, env={})
    with pytest.raises(ConfigError):
        resolve_config({"village_centers": [[0, 0], [1, 1]]}, env={})


def test_grid_values_coerced_to_floats():
    config = resolve_config({"c_values": [0.05, "0.5"], "u_values": [1]}, env={})
    assert config.sweep.c_values == (0.05, 0.5)
    assert config.sweep.u_values == (1.0,)


def test_config_as_dict_round_trip():
    config = resolve_config({"capacity": 50}, env={})
    echoed = config_as_dict(config)
    rebuilt = resolve_config(echoed, env={})
    assert rebuilt == config


def test_with_cell_replaces_sweep_axes():
    params = ModelParams()
    cell = with_cell(params, 0.5, 2.0)
    assert cell.initial_spread == 0.5
    assert cell.mutation_scale == 2.0
    assert cell.capacity == params.capacity


def test_load_config_file(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("capacity: 10\nc_values: [0.1, 0.2]\n")
    values = load_config_file(str(path))
    assert values == {"capacity": 10, "c_values": [0.1, 0.2]}
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert load_config_file(str(empty)) == {}
    bad = tmp_path / "bad.yaml"
    bad.write_text("- just\n- a list\n")
    with pytest.raises(ConfigError):
        load_config_file(str(bad))


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(steps=50, sample_every=100)
    with pytest.raises(ValueError):
        SweepSpec(stability_window=0)
    with pytest.raises(ValueError):
        SweepSpec(workers=0)
    assert SweepSpec(steps=0).steps == 0
