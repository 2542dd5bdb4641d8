"""Two-stage training loop.

Stage 1 optimizes the land-use, building-density and floor-area heads
together with the trunk at the base learning rate.  Stage 2 adds the
population objective and fine-tunes: the trunk and the three subnet
heads move at a reduced rate (default 0.001) while the population head
keeps the base 0.01; both rates decay by 0.95 per epoch, like stage 1.

Momentum buffers are cleared when stage 2 starts: checkpoints do not
carry velocities, so a stage-2 run behaves identically whether it
continues in-process or resumes from a saved stage-1 checkpoint.
"""

import logging

import numpy as np

from ..errors import DataError
from ..numerics.sgd import sgd_step
from ..numerics.tensor import OptimizerConfig
from ..taxonomy import LabelKind
from . import loss as loss_mod

log = logging.getLogger(__name__)


def lr_schedule(epoch, base_lr, decay=0.95):
    """Learning rate at a given epoch: base_lr * decay**epoch."""
    return base_lr * decay ** epoch


def compute_norm_stats(samples):
    """Per-channel mean/std over all tiles, in dataset order.

    Near-constant channels get std 1 so normalization stays finite.
    """
    if not samples:
        raise DataError("cannot compute normalization statistics without samples")
    channels = samples[0].tile.shape[2]
    total = np.zeros(channels)
    total_sq = np.zeros(channels)
    count = 0
    for s in samples:
        tile = np.asarray(s.tile, dtype=np.float64)
        total += tile.sum(axis=(0, 1))
        total_sq += (tile * tile).sum(axis=(0, 1))
        count += tile.shape[0] * tile.shape[1]
    mean = total / count
    var = np.maximum(total_sq / count - mean * mean, 0.0)
    std = np.sqrt(var)
    std[std < 1e-12] = 1.0
    return mean, std


def _ensure_norm_stats(net, dataset):
    if not net.has_norm_stats():
        net.norm_mean, net.norm_std = compute_norm_stats(dataset)


def _epoch_batches(order, batch_size):
    for start in range(0, len(order), batch_size):
        yield order[start:start + batch_size]


def _run_epochs(net, dataset, config, stage, epochs, lr_for_group):
    """Shared epoch loop; `lr_for_group` maps (epoch) -> [(params, lr), ...]."""
    rng = np.random.default_rng(config.seed)
    history = []
    n = len(dataset)
    for epoch in range(epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for batch_idx in _epoch_batches(order, config.batch_size):
            batch = [dataset[i] for i in batch_idx]
            epoch_loss += loss_mod.batch_step(net, batch, stage) * len(batch)
            for params, lr in lr_for_group(epoch):
                sgd_step(params, OptimizerConfig(
                    learning_rate=lr, momentum=config.momentum,
                    weight_decay=config.weight_decay))
        history.append(epoch_loss / n)
    return history


def train_stage1(net, dataset, config):
    """First stage: land/density/floor-area heads plus trunk.

    Returns the per-epoch mean loss history.  Fits the input
    normalization statistics from `dataset` if not already present.
    """
    if not dataset:
        raise DataError("stage-1 dataset is empty")
    kinds = {s.label_type for s in dataset}
    if LabelKind.POP in kinds:
        raise DataError("stage-1 dataset must not contain population samples")
    for kind in (LabelKind.LAND, LabelKind.BD, LabelKind.FAR):
        if kind not in kinds:
            log.warning("stage-1 dataset has no %s samples", kind.value)
    _ensure_norm_stats(net, dataset)

    everything = net.parameters()

    def groups(epoch):
        return [(everything, lr_schedule(epoch, config.base_lr,
                                         config.lr_decay_per_epoch))]

    return _run_epochs(net, dataset, config, loss_mod.STAGE_ONE,
                       config.epochs_stage1, groups)


def train_stage2(net, dataset, config):
    """Second stage: adds the population objective with per-group rates."""
    if not dataset:
        raise DataError("stage-2 dataset is empty")
    _ensure_norm_stats(net, dataset)
    for p in net.parameters():
        p.velocity[...] = 0.0

    trunk = net.trunk_and_subnet_params()
    head2 = net.population_head_params()

    def groups(epoch):
        return [
            (trunk, lr_schedule(epoch, config.stage2_trunk_lr,
                                config.lr_decay_per_epoch)),
            (head2, lr_schedule(epoch, config.stage2_head2_lr,
                                config.lr_decay_per_epoch)),
        ]

    return _run_epochs(net, dataset, config, loss_mod.STAGE_TWO,
                       config.epochs_stage2, groups)
