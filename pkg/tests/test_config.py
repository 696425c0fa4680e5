import math

import pytest

from eisencont.config import (ConfigError, ContinuationConfig, GridConfig, RunConfig, load_config,
                              parse_flat)


def test_defaults_validate_and_flatten():
    cfg = RunConfig().validate()
    flat = cfg.to_flat()
    assert flat["grid.c0"] == pytest.approx(math.sqrt(3) / 2)
    assert flat["grid.nx"] == 32 and flat["kernel.radius"] == 0.5
    assert flat["continuation.uniqueness_samples"] == "1.6,2.0,1.8+0.4j"


def test_flat_round_trip():
    cfg = RunConfig().with_overrides({"grid.ny": "60", "continuation.uniqueness_samples": "1.7, 2.2+0.1j"})
    again = RunConfig().with_overrides({k: str(v) for k, v in cfg.to_flat().items()})
    assert again == cfg
    assert cfg.continuation.uniqueness_samples == (1.7 + 0j, 2.2 + 0.1j)


def test_parse_flat_comments_and_errors():
    text = "# header\n grid.nx = 16  # trailing\n\nkernel.power=8\n"
    assert parse_flat(text) == {"grid.nx": "16", "kernel.power": "8"}
    with pytest.raises(ConfigError, match="line 2"):
        parse_flat("grid.nx = 16\nnonsense\n")


@pytest.mark.parametrize("pairs", [
    {"nx": "16"},
    {"mesh.nx": "16"},
    {"grid.spacing": "1"},
    {"grid.nx": "sixteen"},
    {"grid.nx": "15"},
    {"grid.c": "0.9"},
    {"kernel.shape": "box"},
    {"continuation.svd": "lanczos"},
    {"continuation.uniqueness_samples": "0.8"},
    {"output.precision": "0"},
])
def test_invalid_overrides_are_rejected(pairs):
    with pytest.raises(ConfigError):
        RunConfig().with_overrides(pairs)


def test_kernel_support_must_fit_in_the_strip():
    with pytest.raises(ConfigError, match="support"):
        RunConfig().with_overrides({"kernel.radius": "0.8"})


def test_load_order_file_then_env_then_overrides(tmp_path, monkeypatch):
    path = tmp_path / "run.cfg"
    path.write_text("grid.nx = 16\ncontinuation.seed = 3\n")
    assert load_config(path).grid.nx == 16
    monkeypatch.setenv("EISEN_CONFIG", str(path))
    cfg = load_config(overrides={"continuation.seed": "9"})
    assert cfg.grid.nx == 16 and cfg.continuation.seed == 9
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.cfg")


def test_blocks_validate_independently():
    with pytest.raises(ConfigError):
        GridConfig(y_cusp=6.0).validate()
    with pytest.raises(ConfigError):
        ContinuationConfig(probe_count=0).validate()
