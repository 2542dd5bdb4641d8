"""Network and training configuration plus the Sample record."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError
from ..taxonomy import HEAD_WIDTHS, LabelKind

#: Edge length (pixels) of one training tile / one grid cell.
TILE_PIXELS = 200


@dataclass(frozen=True)
class NetworkConfig:
    """Fixed four-stage trunk with four classifier heads.

    Only the input channel count is adjustable; the stage layout
    (5x5-96 / max 7-4, 3x3-128 / max 3-2, [1x1-64 | 3x3-64] / max 3-2,
    [1x1-80 | 3x3-48] / average 10-1) and the head widths 13/25/32/40
    are structural.
    """

    input_channels: int = 3

    head_widths = dict(HEAD_WIDTHS)  # class attribute: structural constant

    def __post_init__(self):
        if self.input_channels < 1:
            raise ValueError("input_channels must be positive")

    def conv_shapes(self):
        """Ordered (name, kernel shape) pairs for every convolution."""
        c = self.input_channels
        pop_in = (HEAD_WIDTHS[LabelKind.LAND] + HEAD_WIDTHS[LabelKind.BD]
                  + HEAD_WIDTHS[LabelKind.FAR] + 128)
        return (
            ("stage1.conv", (96, 5, 5, c)),
            ("stage2.conv", (128, 3, 3, 96)),
            ("stage3.a", (64, 1, 1, 128)),
            ("stage3.b", (64, 3, 3, 128)),
            ("stage4.a", (80, 1, 1, 128)),
            ("stage4.b", (48, 3, 3, 128)),
            ("head.land", (HEAD_WIDTHS[LabelKind.LAND], 1, 1, 128)),
            ("head.bd", (HEAD_WIDTHS[LabelKind.BD], 1, 1, 128)),
            ("head.far", (HEAD_WIDTHS[LabelKind.FAR], 1, 1, 128)),
            ("head.pop", (HEAD_WIDTHS[LabelKind.POP], 1, 1, pop_in)),
        )


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and schedule settings for the two training stages."""

    batch_size: int = 64
    base_lr: float = 0.01
    lr_decay_per_epoch: float = 0.95
    momentum: float = 0.9
    weight_decay: float = 0.0005
    stage2_trunk_lr: float = 0.001
    stage2_head2_lr: float = 0.01
    epochs_stage1: int = 20
    epochs_stage2: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.stage2_trunk_lr >= self.stage2_head2_lr:
            raise ValueError("stage2_trunk_lr must be below stage2_head2_lr")


@dataclass
class Sample:
    """One training tile with exactly one label for one task."""

    tile: np.ndarray            # (TILE_PIXELS, TILE_PIXELS, channels)
    label_type: LabelKind
    label: int
    cell: tuple = None          # optional (row, col) provenance

    def __post_init__(self):
        if self.tile.ndim != 3 or self.tile.shape[0] != TILE_PIXELS \
                or self.tile.shape[1] != TILE_PIXELS:
            raise ShapeError(
                f"sample tiles must be {TILE_PIXELS}x{TILE_PIXELS}xC, "
                f"got {self.tile.shape}")
        width = HEAD_WIDTHS[self.label_type]
        if not 0 <= self.label < width:
            raise ValueError(
                f"label {self.label} out of range for {self.label_type}: "
                f"[0, {width})")
