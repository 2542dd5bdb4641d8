"""Multi-task objective with per-sample head routing.

Each sample carries exactly one label, so it contributes cross-entropy
on exactly one head; the other heads' loss terms are zero for it.  The
stage-1 objective covers the land-use / building-density / floor-area
heads; stage 2 adds the population term, whose gradient reaches the
other three heads and the shared trunk through the concatenated softmax
outputs feeding the population head.
"""

from ..errors import DataError
from ..numerics import ops
from ..taxonomy import LabelKind
from . import model

STAGE_ONE, STAGE_TWO = 1, 2


def _check_stage(stage):
    if stage not in (STAGE_ONE, STAGE_TWO):
        raise ValueError(f"stage must be 1 or 2, got {stage}")


def sample_loss(heads, sample, stage):
    """Cross-entropy of one sample on its own head.

    Returns (loss, {kind: d loss / d head logits}).  Population samples
    are rejected in stage 1, where that head is not yet optimized.
    """
    _check_stage(stage)
    if stage == STAGE_ONE and sample.label_type is LabelKind.POP:
        raise DataError("population samples are not allowed in stage 1")
    probs = heads.get(sample.label_type)
    if probs.shape[:2] != (1, 1):
        raise DataError("training samples must produce 1x1 head outputs")
    loss = ops.cross_entropy(probs, sample.label)
    dlogits = ops.softmax_cross_entropy_grad(probs, sample.label)
    return loss, {sample.label_type: dlogits}


def batch_step(net, batch, stage):
    """Forward/backward one batch; accumulates gradients, returns mean loss.

    Per-sample gradients are scaled by 1/len(batch) so the accumulated
    parameter gradient matches the gradient of the batch-mean objective.
    Samples are processed in list order (fixed accumulation order).
    """
    _check_stage(stage)
    if not batch:
        raise DataError("empty batch")
    scale = 1.0 / len(batch)
    total = 0.0
    for sample in batch:
        heads, cache = model.forward(net, sample.tile)
        loss, seeds = sample_loss(heads, sample, stage)
        total += loss
        model.backward(net, cache,
                       {k: g * scale for k, g in seeds.items()})
    return total * scale


def batch_loss(net, batch, stage):
    """Mean objective of a batch without touching gradients."""
    _check_stage(stage)
    if not batch:
        raise DataError("empty batch")
    total = 0.0
    for sample in batch:
        heads, _ = model.forward(net, sample.tile)
        loss, _ = sample_loss(heads, sample, stage)
        total += loss
    return total / len(batch)
