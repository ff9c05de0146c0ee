from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermal_g2.config import load_config, parse_config, serialize_config
from thermal_g2.errors import ConfigParseError, ConfigurationError
from thermal_g2.layout import LayoutKind
from thermal_g2.presets import DIMENSIONLESS, PRESETS, preset

CONFIGS = sorted((Path(__file__).parent.parent / "configs").glob("*.cfg"))


def edit(text, **changes):
    lines = []
    for line in text.splitlines():
        key = line.split("=")[0].strip()
        if key in changes:
            value = changes.pop(key)
            if value is None:
                continue
            line = f"{key} = {value}"
        lines.append(line)
    lines.extend(f"{k} = {v}" for k, v in changes.items())
    return "\n".join(lines) + "\n"


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_preset_round_trip(name):
    config = preset(name)
    text = serialize_config(config)
    assert parse_config(text) == config
    assert serialize_config(parse_config(text)) == text


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.name)
def test_bundled_configs_load(path):
    config = load_config(path)
    assert parse_config(serialize_config(config)) == config


def test_comments_and_blank_lines():
    text = "# header\n\n" + DIMENSIONLESS.replace("run.seed = 20180601", "run.seed = 7  # trailing")
    assert parse_config(text).run.seed == 7


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 2**32),
    st.floats(-10, 10, allow_nan=False),
    st.integers(2, 50),
    st.sampled_from(["ideal", "physical"]),
)
def test_round_trip_idempotent(seed, phase, steps, mode):
    text = edit(
        DIMENSIONLESS,
        **{"run.seed": seed, "layout.extra_phase_T": repr(phase), "scan.steps": steps, "scan.sweep_mode": mode},
    )
    config = parse_config(text)
    once = serialize_config(config)
    assert serialize_config(parse_config(once)) == once
    assert parse_config(once) == config


@pytest.mark.parametrize(
    "changes,path",
    [
        ({"layout.wavelength": "1.0"}, "layout.wavelength"),
        ({"optics.mirror": "1"}, "optics.mirror"),
        ({"spectrum.omega0": None}, "spectrum.omega0"),
        ({"spectrum.omega0": "abc"}, "spectrum.omega0"),
        ({"run.n_samples": "1.5"}, "run.n_samples"),
        ({"run.batches": "1"}, "run.batches"),
        ({"run.seed": "-3"}, "run.seed"),
        ({"run.factor": "1.0"}, "run.factor"),
        ({"layout.kind": "CUSTOM"}, "layout.kind"),
        ({"layout.S_C": None}, "layout.S_C"),
        ({"layout.l_C": "0.0"}, "layout.l_C"),
        ({"scan.variable": "wavelength"}, "scan.variable"),
        ({"scan.sweep_mode": "virtual"}, "scan.sweep_mode"),
        ({"scan.spacing": "cubic"}, "scan.spacing"),
        ({"scan.stop": "-1.0"}, "scan.stop"),
        ({"scan.steps": "0"}, "scan.steps"),
    ],
)
def test_rejections_name_the_key(changes, path):
    with pytest.raises(ConfigParseError) as info:
        parse_config(edit(DIMENSIONLESS, **changes))
    assert info.value.key == path
    assert str(info.value).startswith(path)


def test_duplicate_key_rejected():
    with pytest.raises(ConfigParseError, match="duplicate"):
        parse_config(DIMENSIONLESS + "run.seed = 1\n")


def test_missing_section():
    text = "\n".join(line for line in DIMENSIONLESS.splitlines() if not line.startswith("grid."))
    with pytest.raises(ConfigParseError) as info:
        parse_config(text)
    assert info.value.key == "grid"


def test_physical_constraints_reported():
    with pytest.raises(ConfigurationError):
        parse_config(edit(DIMENSIONLESS, **{"spectrum.omega0": "5.0"}))
    with pytest.raises(ConfigurationError):
        parse_config(edit(DIMENSIONLESS, **{"layout.L_C": "0.5"}))


def test_scan_is_optional():
    text = "\n".join(line for line in DIMENSIONLESS.splitlines() if not line.startswith("scan."))
    config = parse_config(text)
    assert config.scan is None
    with pytest.raises(ConfigParseError):
        config.scan_values()


def test_log_spacing():
    config = parse_config(
        edit(DIMENSIONLESS, **{"scan.start": "20.0", "scan.stop": "2000.0", "scan.steps": "3", "scan.spacing": "log"})
    )
    assert config.scan_values() == pytest.approx([20.0, 200.0, 2000.0], rel=1e-14)


def test_build_layout_kinds():
    assert preset("dimensionless").build_layout().kind is LayoutKind.DOUBLE_MZ
    hbt = load_config(Path(__file__).parent.parent / "configs" / "hbt.cfg")
    assert hbt.build_layout().kind is LayoutKind.HBT
