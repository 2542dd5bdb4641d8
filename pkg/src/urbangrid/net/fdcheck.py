"""End-to-end finite-difference checks of the training objectives.

Verifies the assembled network gradient (conv stages, pooling routing,
head softmax/cross-entropy, and the population head's chained path back
into the trunk) by comparing batch_step's accumulated gradients against
central differences of batch_loss at sampled parameter entries.
"""

import numpy as np

from ..numerics.gradcheck import DEFAULT_EPSILON, grad_check
from ..taxonomy import LabelKind
from . import loss as loss_mod
from .config import NetworkConfig, Sample, TILE_PIXELS
from .model import build_network

# One representative parameter per architectural block.
_SAMPLED_PARAMS = (
    "stage1.conv.weight",
    "stage1.conv.bias",
    "stage2.conv.weight",
    "stage3.a.weight",
    "stage3.b.weight",
    "stage4.a.weight",
    "stage4.b.weight",
    "head.land.weight",
    "head.bd.weight",
    "head.far.weight",
    "head.pop.weight",
)


def _stage_batch(rng, stage):
    kinds = [(LabelKind.LAND, 3), (LabelKind.BD, 11), (LabelKind.FAR, 2)]
    if stage == loss_mod.STAGE_TWO:
        kinds.append((LabelKind.POP, 25))
    return [Sample(tile=rng.standard_normal((TILE_PIXELS, TILE_PIXELS, 3)),
                   label_type=kind, label=label)
            for kind, label in kinds]


def check_loss_gradients(stage, seed=0, indices_per_param=2,
                         epsilon=DEFAULT_EPSILON):
    """Max relative FD error per parameter for one stage's objective.

    Returns {parameter name: max relative error} over a few deterministic
    entries of each sampled parameter.  The population head is only
    reached by the stage-2 objective and is skipped in stage 1.
    """
    rng = np.random.default_rng(seed)
    net = build_network(NetworkConfig(), seed=seed + 1)
    batch = _stage_batch(rng, stage)

    for p in net.parameters():
        p.zero_grad()
    loss_mod.batch_step(net, batch, stage)

    errors = {}
    for name in _SAMPLED_PARAMS:
        if stage == loss_mod.STAGE_ONE and name == "head.pop.weight":
            continue
        p = net.param(name)
        idx = rng.choice(p.value.size, size=min(indices_per_param, p.value.size),
                         replace=False)

        def value_fn(_arr, _p=p):
            return loss_mod.batch_loss(net, batch, stage)

        errors[name] = grad_check(value_fn, p.grad, p.value,
                                  epsilon=epsilon, indices=[int(i) for i in idx])
    for p in net.parameters():
        p.zero_grad()
    return errors
