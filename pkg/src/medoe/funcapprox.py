"""Numeric primitives: softmax policies, entropy, KL, Adam, tabular and MLP nets.

All arrays are float64. Gradients are hand-derived for the fixed loss forms;
there is no autodiff here.
"""

import numpy as np


def _scale_by_temperature(logits, temperature):
    t = np.asarray(temperature, dtype=np.float64)
    if np.any(t <= 0):
        raise ValueError("temperature must be positive")
    if t.ndim == 0:
        return logits / t
    # per-row temperatures
    return logits / t[:, None]


def softmax(logits, temperature=1.0):
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise FloatingPointError("non-finite logits")
    z = _scale_by_temperature(logits, temperature)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits, temperature=1.0):
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise FloatingPointError("non-finite logits")
    z = _scale_by_temperature(logits, temperature)
    z = z - z.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def entropy(probs):
    p = np.asarray(probs, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(p), 0.0)
    return -terms.sum(axis=-1)


def kl_divergence(p, q):
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if np.any((p > 0.0) & (q <= 0.0)):
        raise FloatingPointError("kl support violation: q is zero where p > 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(p / q), 0.0)
    return terms.sum(axis=-1)


class Adam:
    """Bias-corrected Adam over a list of parameter arrays."""

    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-5):
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params, grads):
        if len(params) != len(self.m):
            raise ValueError("parameter count mismatch")
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            if p.shape != g.shape:
                raise ValueError("gradient shape mismatch")
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
        return params

    def state_arrays(self):
        return {"m": self.m, "v": self.v, "t": self.t}


class Tabular:
    """Lookup-table net: rows indexed by a state id."""

    kind = "tabular"

    def __init__(self, n_rows, out_dim):
        self.table = np.zeros((n_rows, out_dim), dtype=np.float64)

    @property
    def params(self):
        return [self.table]

    @property
    def out_dim(self):
        return self.table.shape[1]

    @property
    def in_dim(self):
        return self.table.shape[0]

    def forward(self, row_ids, with_cache=False):
        out = self.table[row_ids]
        if with_cache:
            return out, row_ids
        return out

    def backward(self, cache, dout):
        grad = np.zeros_like(self.table)
        np.add.at(grad, cache, dout)
        return [grad]

    def clone(self):
        other = Tabular(self.table.shape[0], self.table.shape[1])
        other.table = self.table.copy()
        return other


class MLP:
    """Fully-connected ReLU net, linear output."""

    kind = "mlp"

    def __init__(self, in_dim, hidden, out_dim, rng=None):
        sizes = [int(in_dim), *[int(h) for h in hidden], int(out_dim)]
        self.sizes = sizes
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            if rng is None:
                w = np.zeros((fan_in, fan_out), dtype=np.float64)
            else:
                bound = 1.0 / np.sqrt(fan_in)
                w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
            self.weights.append(w)
            self.biases.append(np.zeros(fan_out, dtype=np.float64))

    @property
    def hidden(self):
        return tuple(self.sizes[1:-1])

    @property
    def in_dim(self):
        return self.sizes[0]

    @property
    def out_dim(self):
        return self.sizes[-1]

    @property
    def params(self):
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def forward(self, x, with_cache=False):
        h = np.asarray(x, dtype=np.float64)
        acts = [h]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = np.maximum(h, 0.0)
            acts.append(h)
        if with_cache:
            return h, acts
        return h

    def backward(self, cache, dout):
        acts = cache
        grads = [None] * (2 * len(self.weights))
        delta = np.asarray(dout, dtype=np.float64)
        for i in range(len(self.weights) - 1, -1, -1):
            grads[2 * i] = acts[i].T @ delta
            grads[2 * i + 1] = delta.sum(axis=0)
            if i > 0:
                delta = (delta @ self.weights[i].T) * (acts[i] > 0.0)
        return grads

    def clone(self):
        other = MLP(self.sizes[0], self.sizes[1:-1], self.sizes[-1], rng=None)
        other.weights = [w.copy() for w in self.weights]
        other.biases = [b.copy() for b in self.biases]
        return other


class Policy:
    """Action-logit net with a temperature-scaled softmax head."""

    def __init__(self, net, n_actions):
        if net.out_dim != n_actions:
            raise ValueError("net output dim must equal action count")
        self.net = net
        self.n_actions = n_actions

    def logits(self, inputs):
        return self.net.forward(inputs)

    def distribution(self, inputs, temperature=1.0):
        return softmax(self.net.forward(inputs), temperature)

    def clone(self):
        return Policy(self.net.clone(), self.n_actions)


class Critic:
    """Scalar value net."""

    def __init__(self, net):
        if net.out_dim != 1:
            raise ValueError("critic net must have scalar output")
        self.net = net

    def values(self, inputs):
        return self.net.forward(inputs)[:, 0]

    def clone(self):
        return Critic(self.net.clone())


def make_policy(kind, obs_dim, n_actions, hidden=(256, 128), rng=None):
    if kind == "tabular":
        return Policy(Tabular(obs_dim, n_actions), n_actions)
    if kind == "mlp":
        if rng is None:
            raise ValueError("mlp init needs an rng")
        return Policy(MLP(obs_dim, hidden, n_actions, rng), n_actions)
    raise ValueError(f"unknown approximator kind: {kind}")


def make_critic(kind, obs_dim, hidden=(256, 128), rng=None):
    if kind == "tabular":
        return Critic(Tabular(obs_dim, 1))
    if kind == "mlp":
        if rng is None:
            raise ValueError("mlp init needs an rng")
        return Critic(MLP(obs_dim, hidden, 1, rng))
    raise ValueError(f"unknown approximator kind: {kind}")
