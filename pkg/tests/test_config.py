from pathlib import Path

import pytest

from sidonlab.bounds import C_BALAZARD_DESK
from sidonlab.config import Config, default_cache_dir, load_config, parse_config_text
from sidonlab.errors import DomainError


def test_defaults():
    cfg = load_config(env={})
    assert cfg.seed == 0 and cfg.margin_tol == 1e-9 and cfg.rho_tol == 1e-8
    assert cfg.c_balazard == C_BALAZARD_DESK and cfg.c_lower == cfg.c_upper == 0
    assert cfg.cache_dir == default_cache_dir()


def test_parse_text():
    vals = parse_config_text("# settings\nseed = 4\n\nmargin-tol = 1e-7  # looser\ncache_dir=~/x\n")
    assert vals == {"seed": 4, "margin_tol": 1e-7, "cache_dir": Path("~/x").expanduser()}


@pytest.mark.parametrize("text", ["seed 4", "colour = red", "seed = four"])
def test_parse_errors(text):
    with pytest.raises(DomainError):
        parse_config_text(text)


def test_precedence(tmp_path):
    path = tmp_path / "sidonlab.conf"
    path.write_text("seed = 1\nsidon_budget = 10\nc_upper = 0.5\n")
    assert load_config(path, env={}).seed == 1
    cfg = load_config(path, flags={"seed": 2, "c_upper": None}, env={})
    assert cfg.seed == 2 and cfg.c_upper == 0.5 and cfg.sidon_budget == 10
    cfg = load_config(path, flags={"seed": 2}, env={"SIDONLAB_SEED": "3", "SIDONLAB_CACHE_DIR": str(tmp_path)})
    assert cfg.seed == 3 and cfg.cache_dir == tmp_path
    # empty env values are ignored
    assert load_config(path, env={"SIDONLAB_SEED": ""}).seed == 1


def test_validation():
    with pytest.raises(DomainError):
        Config(margin_tol=0)
    with pytest.raises(DomainError):
        Config(sidon_budget=0)


def test_envelope_constants():
    env = Config(c_lower=-1.0, c_upper=2.0).envelope()
    assert env.C_lower == -1.0 and env.C_upper == 2.0


def test_writable_cache(tmp_path):
    assert Config(cache_dir=tmp_path / "a" / "b").writable_cache() == tmp_path / "a" / "b"
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert Config(cache_dir=blocker / "sub").writable_cache() is None
