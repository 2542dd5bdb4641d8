"""Per-sample routing of the multi-task objective."""

import numpy as np
import pytest

from urbangrid.errors import DataError
from urbangrid.net import loss, model
from urbangrid.net.config import Sample
from urbangrid.taxonomy import LabelKind


@pytest.fixture(scope="module")
def net():
    n = model.build_network(seed=2)
    n.norm_mean = np.zeros(3)
    n.norm_std = np.ones(3)
    return n


def _sample(rng, kind, label):
    return Sample(tile=rng.normal(size=(200, 200, 3)), label_type=kind,
                  label=label)


def test_sample_loss_uses_own_head(net, rng):
    s = _sample(rng, LabelKind.BD, 11)
    heads, _ = model.forward(net, s.tile)
    val, seeds = loss.sample_loss(heads, s, stage=1)
    assert val == pytest.approx(-np.log(heads.bd[0, 0, 11]))
    assert set(seeds) == {LabelKind.BD}
    expected = heads.bd.copy()
    expected[0, 0, 11] -= 1.0
    np.testing.assert_array_equal(seeds[LabelKind.BD], expected)


def test_pop_sample_rejected_in_stage1(net, rng):
    s = _sample(rng, LabelKind.POP, 25)
    heads, _ = model.forward(net, s.tile)
    with pytest.raises(DataError):
        loss.sample_loss(heads, s, stage=1)
    # ... but accepted in stage 2.
    val, seeds = loss.sample_loss(heads, s, stage=2)
    assert val > 0.0
    assert set(seeds) == {LabelKind.POP}


def test_invalid_stage_rejected(net, rng):
    s = _sample(rng, LabelKind.LAND, 0)
    heads, _ = model.forward(net, s.tile)
    with pytest.raises(ValueError):
        loss.sample_loss(heads, s, stage=3)


def test_batch_step_mean_of_sample_losses(net, rng):
    batch = [_sample(rng, LabelKind.LAND, 3), _sample(rng, LabelKind.FAR, 2)]
    singles = []
    for s in batch:
        heads, _ = model.forward(net, s.tile)
        singles.append(loss.sample_loss(heads, s, stage=1)[0])
    for p in net.parameters():
        p.zero_grad()
    mean = loss.batch_step(net, batch, stage=1)
    assert mean == pytest.approx(sum(singles) / 2.0, rel=1e-12)
    for p in net.parameters():
        p.zero_grad()


def test_batch_step_grad_scale(net, rng):
    """Duplicating a sample leaves the mean gradient unchanged."""
    s = _sample(rng, LabelKind.LAND, 5)
    for p in net.parameters():
        p.zero_grad()
    loss.batch_step(net, [s], stage=1)
    g1 = net.param("stage1.conv.weight").grad.copy()
    for p in net.parameters():
        p.zero_grad()
    loss.batch_step(net, [s, s, s], stage=1)
    g3 = net.param("stage1.conv.weight").grad.copy()
    np.testing.assert_allclose(g3, g1, rtol=1e-9, atol=1e-15)
    for p in net.parameters():
        p.zero_grad()


def test_unused_heads_keep_zero_gradients(net, rng):
    for p in net.parameters():
        p.zero_grad()
    loss.batch_step(net, [_sample(rng, LabelKind.LAND, 1)], stage=1)
    assert np.all(net.param("head.bd.weight").grad == 0.0)
    assert np.all(net.param("head.far.weight").grad == 0.0)
    assert np.all(net.param("head.pop.weight").grad == 0.0)
    assert np.any(net.param("head.land.weight").grad != 0.0)
    assert np.any(net.param("stage2.conv.weight").grad != 0.0)
    for p in net.parameters():
        p.zero_grad()


def test_empty_batch_rejected(net):
    with pytest.raises(DataError):
        loss.batch_step(net, [], stage=1)
    with pytest.raises(DataError):
        loss.batch_loss(net, [], stage=2)


def test_batch_loss_matches_batch_step_value(net, rng):
    batch = [_sample(rng, LabelKind.BD, 0), _sample(rng, LabelKind.POP, 39)]
    val = loss.batch_loss(net, batch, stage=2)
    for p in net.parameters():
        p.zero_grad()
    stepped = loss.batch_step(net, batch, stage=2)
    assert val == pytest.approx(stepped, rel=1e-12)
    for p in net.parameters():
        p.zero_grad()
