#####################################################################################################
# aotlab: a desk-scale laboratory for hierarchical active object tracking.
# Copyright (c) 2024 by the aotlab developers. All rights reserved.
#
# Distributed under the terms of the BSD license; see LICENSE.md for details.
#####################################################################################################
"""
Tests for the gated mixture of policy experts
"""
import numpy as np
import pytest

from aotlab.mop.mixture import (
    MoPNetwork,
    gate_probs,
    load_balancing_loss,
    mop_forward,
    select_top_k,
)
from aotlab.nncore.autodiff import RejectedInputError, backward, tsum
from aotlab.utilities.config import get_config
from aotlab.utilities.testing import check_gradients, does_not_raise, get_readable_param

PROBS = (0.6439, 0.2369, 0.0871, 0.0321)


def make_net(seed=0, in_features=6, action_dim=2, n_experts=4, top_k=2):
    rng = np.random.default_rng(seed)
    return MoPNetwork(in_features, 8, action_dim, rng, n_experts=n_experts, top_k=top_k)


def set_gate_logits(net, logits):
    net.gate.weight.value[...] = 0.0
    net.gate.bias.value[...] = logits


def set_expert_mean(expert, value):
    last = expert.mean_net.layers[-1]
    last.weight.value[...] = 0.0
    last.bias.value[...] = value


@pytest.mark.unit
class TestGateProbs:
    def test_zero_gate_is_uniform(self):
        net = make_net()
        set_gate_logits(net, 0.0)
        np.testing.assert_allclose(gate_probs(net, np.ones(6)).value, 0.25)

    def test_softmax_values(self):
        net = make_net()
        set_gate_logits(net, [2.0, 1.0, 0.0, -1.0])
        np.testing.assert_allclose(gate_probs(net, np.ones(6)).value, PROBS, atol=1e-4)

    def test_shift_invariance(self):
        net = make_net()
        e = np.random.default_rng(3).normal(size=6)
        before = gate_probs(net, e).value
        net.gate.bias.value += 7.5
        np.testing.assert_allclose(gate_probs(net, e).value, before, atol=1e-12)


@pytest.mark.unit
class TestSelectTopK:
    def test_full_selection(self):
        selected, weights = select_top_k(PROBS, 4)
        assert sorted(selected) == [0, 1, 2, 3]
        np.testing.assert_allclose(weights, np.array(PROBS) / sum(PROBS))

    def test_top_two(self):
        selected, weights = select_top_k(PROBS, 2)
        assert list(selected) == [0, 1]
        np.testing.assert_allclose(weights, [0.7311, 0.2689], atol=1e-4)

    def test_ties_go_to_lowest_index(self):
        selected, weights = select_top_k([0.25, 0.25, 0.25, 0.25], 2)
        assert list(selected) == [0, 1]
        np.testing.assert_allclose(weights, [0.5, 0.5])

    @pytest.mark.parametrize(
        "k,expectation",
        [
            (0, pytest.raises(RejectedInputError)),
            (1, does_not_raise()),
            (4, does_not_raise()),
            (5, pytest.raises(RejectedInputError)),
        ],
        ids=get_readable_param,
    )
    def test_k_range(self, k, expectation):
        with expectation:
            select_top_k(PROBS, k)

    @pytest.mark.parametrize("seed", range(5))
    def test_weights_sum_to_one(self, seed):
        rng = np.random.default_rng(seed)
        for k in range(1, 7):
            probs = rng.dirichlet(np.ones(6))
            _, weights = select_top_k(probs, k)
            assert abs(weights.sum() - 1.0) < 1e-12
            assert np.all(weights > 0)

    @pytest.mark.parametrize("seed", range(5))
    def test_raising_a_selected_logit_keeps_it(self, seed):
        rng = np.random.default_rng(seed)
        logits = rng.normal(size=6)
        selected, _ = select_top_k(np.exp(logits) / np.exp(logits).sum(), 3)
        for i in selected:
            raised = logits.copy()
            raised[i] += rng.uniform(0.1, 3.0)
            again, _ = select_top_k(np.exp(raised) / np.exp(raised).sum(), 3)
            assert i in again

    def test_network_rejects_k_above_n(self):
        with pytest.raises(RejectedInputError, match="top_k"):
            make_net(n_experts=3, top_k=4)


@pytest.mark.unit
class TestMopForward:
    def test_blended_mean(self):
        net = make_net(action_dim=1)
        set_gate_logits(net, [2.0, 1.0, 0.0, -1.0])
        set_expert_mean(net.experts[0], 1.0)
        set_expert_mean(net.experts[1], 3.0)
        out = mop_forward(net, np.ones(6))
        assert out.selected == (0, 1)
        assert out.mean.value[0] == pytest.approx(1.5378, abs=1e-4)

    def test_single_expert_reduces_to_argmax(self):
        net = make_net(top_k=1)
        e = np.random.default_rng(5).normal(size=6)
        out = mop_forward(net, e)
        best = int(np.argmax(out.probs.value))
        mean, log_std = net.experts[best](e)
        assert out.selected == (best,)
        np.testing.assert_array_equal(out.mean.value, mean.value)
        np.testing.assert_array_equal(out.log_std.value, log_std.value)

    def test_identical_experts(self):
        net = make_net()
        for expert in net.experts:
            set_expert_mean(expert, [0.3, -0.7])
        out = mop_forward(net, np.random.default_rng(1).normal(size=6))
        np.testing.assert_allclose(out.mean.value, [0.3, -0.7], atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_full_selection_is_dense_mixture(self, seed):
        net = make_net(seed=seed, top_k=4)
        e = np.random.default_rng(seed + 100).normal(size=6)
        out = mop_forward(net, e)
        p = out.probs.value
        dense = sum(p[i] * net.experts[i](e)[0].value for i in range(4))
        np.testing.assert_allclose(out.mean.value, dense, atol=1e-12)

    @pytest.mark.parametrize("top_k", [1, 2, 3])
    def test_only_selected_experts_get_gradient(self, top_k):
        net = make_net(seed=top_k, top_k=top_k)
        net.zero_grad()
        out = mop_forward(net, np.random.default_rng(9).normal(size=6))
        backward(tsum(out.mean) + tsum(out.log_std))
        touched = [
            i
            for i, expert in enumerate(net.experts)
            if any(np.any(p.grad != 0.0) for p in expert.parameters())
        ]
        assert touched == sorted(out.selected)
        if top_k > 1:
            assert np.any(net.gate.weight.grad != 0.0)

    @pytest.mark.parametrize("seed", range(5))
    def test_finite_differences(self, seed):
        net = make_net(seed=seed)
        e = np.random.default_rng(seed + 50).normal(size=6)
        c = np.random.default_rng(seed + 60).normal(size=2)

        def loss():
            out = mop_forward(net, e)
            return tsum(out.mean * c) + tsum(out.log_std)

        assert check_gradients(loss, net.parameters()) < 1e-4

    def test_from_config(self):
        net = MoPNetwork.from_config(64, 2, get_config(), np.random.default_rng(0))
        assert (net.n_experts, net.top_k) == (4, 2)
        np.testing.assert_allclose(net.experts[0].log_std.value, np.log(0.5))


@pytest.mark.unit
class TestLoadBalancing:
    def test_uniform_importance_is_zero(self):
        net = make_net()
        set_gate_logits(net, 0.0)
        history = [gate_probs(net, np.ones(6)) for _ in range(3)]
        assert load_balancing_loss(history).item() == pytest.approx(0.0, abs=1e-12)

    def test_skewed_importance_is_positive(self):
        net = make_net()
        set_gate_logits(net, [3.0, 0.0, 0.0, 0.0])
        history = [gate_probs(net, np.ones(6))]
        assert load_balancing_loss(history).item() > 0.1

    def test_empty_history(self):
        assert load_balancing_loss([]).item() == 0.0
