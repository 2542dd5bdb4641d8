"""Flat key=value run configuration shared by all CLI subcommands.

Every key has a default, so an absent or empty file is a valid
configuration; unknown keys are rejected.  Lines starting with '#' and
blank lines are ignored.
"""

from .errors import DataError

# Defaults mirror TrainConfig, NetworkConfig, the three discretization
# specs, and the file names the CLI reads/writes inside data directories.
DEFAULTS = {
    # training
    "batch_size": 64,
    "base_lr": 0.01,
    "lr_decay_per_epoch": 0.95,
    "momentum": 0.9,
    "weight_decay": 0.0005,
    "stage2_trunk_lr": 0.001,
    "stage2_head2_lr": 0.01,
    "epochs_stage1": 20,
    "epochs_stage2": 10,
    "seed": 0,
    # network
    "input_channels": 3,
    # discretization
    "bd_lower": 0.0,
    "bd_upper": 1.0,
    "bd_levels": 25,
    "far_lower": 0.0,
    "far_upper": 10.0,
    "far_levels": 32,
    "pop_lower": 0.0,
    "pop_upper": 7500.0,
    "pop_levels": 40,
    # file names inside city/label/product directories
    "raster_file": "city.mcr1",
    "features_file": "features.geojson",
    "cell_size": 240.0,
}


def _convert(key, text):
    default = DEFAULTS[key]
    try:
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError as exc:
        raise DataError(f"config key {key}: {exc}") from exc
    return text


def load_config(path=None):
    """Defaults, overlaid with `path` when given."""
    config = dict(DEFAULTS)
    if path is None:
        return config
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in DEFAULTS:
                raise DataError(f"{path}:{lineno}: unknown config key {key!r}")
            config[key] = _convert(key, value.strip())
    return config


def save_config(config, path):
    """Write the effective configuration; load_config inverts this."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key in sorted(config):
            value = config[key]
            text = repr(value) if isinstance(value, float) else str(value)
            fh.write(f"{key}={text}\n")


def train_config(config):
    from .net.config import TrainConfig

    return TrainConfig(
        batch_size=config["batch_size"],
        base_lr=config["base_lr"],
        lr_decay_per_epoch=config["lr_decay_per_epoch"],
        momentum=config["momentum"],
        weight_decay=config["weight_decay"],
        stage2_trunk_lr=config["stage2_trunk_lr"],
        stage2_head2_lr=config["stage2_head2_lr"],
        epochs_stage1=config["epochs_stage1"],
        epochs_stage2=config["epochs_stage2"],
        seed=config["seed"],
    )


def network_config(config):
    from .net.config import NetworkConfig

    return NetworkConfig(input_channels=config["input_channels"])


def discretization_specs(config):
    from .geolabel.discretize import DiscretizationSpec
    from .taxonomy import LabelKind

    return {
        LabelKind.BD: DiscretizationSpec(
            config["bd_lower"], config["bd_upper"], config["bd_levels"]),
        LabelKind.FAR: DiscretizationSpec(
            config["far_lower"], config["far_upper"], config["far_levels"]),
        LabelKind.POP: DiscretizationSpec(
            config["pop_lower"], config["pop_upper"], config["pop_levels"]),
    }
