"""Expertise classifiers: oracle rules and a small learned model.

A classifier maps per-agent observations (plus the underlying env states,
which only the oracle rules look at) to expertise scores in [0, 1]. The
learned variant is a one-hidden-layer sigmoid net trained on "was this
observation drawn from my own source task" labels built from the rollout
buffers kept during source training.
"""

from dataclasses import dataclass

import numpy as np

from medoe.envs.chainball import expert_doe_chainball
from medoe.envs.kitchen import expert_doe_kitchen
from medoe.funcapprox import MLP, Adam

BCE_CLAMP = 1e-7


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def binary_cross_entropy(pred, labels):
    p = np.clip(np.asarray(pred, dtype=np.float64), BCE_CLAMP, 1.0 - BCE_CLAMP)
    y = np.asarray(labels, dtype=np.float64)
    return float(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)).mean())


class ConstantDoE:
    """Fixed expertise everywhere; value 1 turns modulation off entirely."""

    def __init__(self, value):
        if not 0.0 <= value <= 1.0:
            raise ValueError("expertise must lie in [0, 1]")
        self.value = float(value)

    def evaluate(self, obs, states):
        n = len(obs) if isinstance(obs, (list, tuple)) else obs.shape[0]
        return np.full(n, self.value)


class ExpertChainballDoE:
    """Oracle rule keyed to the seat's source window."""

    def __init__(self, task, slot):
        self.task = task
        self.slot = slot

    def evaluate(self, obs, states):
        return expert_doe_chainball(self.task, self.slot, states)


class ExpertKitchenDoE:
    """Oracle rule keyed to the cook's source role."""

    def __init__(self, role):
        self.role = role

    def evaluate(self, obs, states):
        return np.array([expert_doe_kitchen(self.role, st) for st in states])


class LearnedDoE:
    """Sigmoid head over an MLP; scores are raw probabilities."""

    def __init__(self, net):
        if net.out_dim != 1:
            raise ValueError("classifier net must have scalar output")
        self.net = net

    def evaluate(self, obs, states):
        return sigmoid(self.net.forward(np.asarray(obs))[:, 0])


@dataclass
class DoEDataset:
    x_train: np.ndarray
    y_train: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray


def build_dataset(own_rows, other_rows, rng, test_fraction=0.1):
    """Label rows from the agent's own source task 1, rows from the other
    sub-teams' tasks 0. The negative pool is subsampled to the positive
    count so the classes stay balanced."""
    pos = np.asarray(own_rows, dtype=np.float64)
    neg = np.concatenate([np.asarray(r, dtype=np.float64) for r in other_rows], axis=0)
    if pos.shape[0] == 0 or neg.shape[0] == 0:
        raise ValueError("need both positive and negative rows")
    if neg.shape[0] > pos.shape[0]:
        pick = rng.permutation(neg.shape[0])[: pos.shape[0]]
        neg = neg[pick]
    x = np.concatenate([pos, neg], axis=0)
    y = np.concatenate([np.ones(pos.shape[0]), np.zeros(neg.shape[0])])
    order = rng.permutation(x.shape[0])
    x, y = x[order], y[order]
    n_test = max(1, int(x.shape[0] * test_fraction))
    return DoEDataset(x[n_test:], y[n_test:], x[:n_test], y[:n_test])


def train_classifier(dataset, rng, hidden=128, lr=1e-2, batch_size=512, epochs=1):
    """Fit the sigmoid net with Adam; returns the classifier and its
    held-out cross-entropy."""
    net = MLP(dataset.x_train.shape[1], (hidden,), 1, rng)
    opt = Adam(net.params, lr)
    n = dataset.x_train.shape[0]
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = order[start : start + batch_size]
            x, y = dataset.x_train[idx], dataset.y_train[idx]
            z, cache = net.forward(x, with_cache=True)
            dz = (sigmoid(z[:, 0]) - y)[:, None] / idx.size
            opt.step(net.params, net.backward(cache, dz))
    clf = LearnedDoE(net)
    test_bce = binary_cross_entropy(clf.evaluate(dataset.x_test, None), dataset.y_test)
    return clf, test_bce


def evaluate_against_expert(classifier, obs, states, expert):
    """Cross-entropy of the learned scores against the oracle labels."""
    pred = classifier.evaluate(obs, states)
    truth = expert.evaluate(obs, states)
    return binary_cross_entropy(pred, truth)
