"""Network architecture, multi-task loss, two-stage training, checkpoints."""

from .checkpoint import load_checkpoint, save_checkpoint
from .config import NetworkConfig, Sample, TILE_PIXELS, TrainConfig
from .loss import batch_loss, batch_step, sample_loss
from .model import HeadOutputs, Network, backward, build_network, forward, shape_trace
from .train import compute_norm_stats, lr_schedule, train_stage1, train_stage2

__all__ = [
    "HeadOutputs", "Network", "NetworkConfig", "Sample", "TILE_PIXELS",
    "TrainConfig", "backward", "batch_loss", "batch_step", "build_network",
    "compute_norm_stats", "forward", "load_checkpoint", "lr_schedule",
    "sample_loss", "save_checkpoint", "shape_trace", "train_stage1",
    "train_stage2",
]
