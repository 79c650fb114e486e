"""Named figure-reproduction parameter sets shipped with the package.

Each preset is a plain JSON config file. Delta_C is not stated in the
source material for any figure; every preset sets it to 0 as the
documented choice. Override by copying the file and editing.
"""

from __future__ import annotations

import json
import os
from importlib import resources

from .errors import ConfigError
from .params import SystemConfig, config_from_dict

PRESETS = ("fig2", "fig3a", "fig3b", "fig3c", "fig4", "fig5", "fig6", "fig7", "fig8")


def preset_names() -> tuple[str, ...]:
    return PRESETS


def preset_text(name: str) -> str:
    """Raw JSON text of a shipped preset."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return resources.files("hybridom").joinpath(f"presets/{name}.json").read_text()


def load_preset(name: str) -> SystemConfig:
    return config_from_dict(json.loads(preset_text(name)))


def resolve_config(spec) -> SystemConfig:
    """Interpret a CLI --config value: a file path, or a preset name."""
    try:
        if os.path.exists(os.fspath(spec)):
            from .params import load_config

            return load_config(spec)
    except TypeError:
        pass
    if isinstance(spec, str) and spec in PRESETS:
        return load_preset(spec)
    raise ConfigError(
        f"config {spec!r} is neither an existing file nor a preset name "
        f"({', '.join(PRESETS)})"
    )
