"""Small fully-connected Q-value approximator trained by single-step TD.

Fixed architecture: tanh hidden layers and a linear 3-output head, one Q
value per weight-adjustment action (raise, lower, hold). Gradients are
hand-derived for this architecture; training is pure online single-transition
TD with the bootstrap target treated as a constant.
"""

import struct
from dataclasses import dataclass

import numpy as np

N_ACTIONS = 3

_MAGIC = b"FQN1"


@dataclass
class TrainConfig:
    """TD hyperparameters; epsilon decays linearly over the first steps."""

    alpha: float = 1e-3
    gamma: float = 0.9
    epsilon_start: float = 0.2
    epsilon_end: float = 0.01
    epsilon_decay_steps: int = 10_000
    grad_clip: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must be in [0, 1)")
        for eps in (self.epsilon_start, self.epsilon_end):
            if not 0.0 <= eps <= 1.0:
                raise ValueError("epsilon must be in [0, 1]")


def epsilon_at(config, step):
    """Linear decay from epsilon_start to epsilon_end, then constant."""
    if step >= config.epsilon_decay_steps:
        return config.epsilon_end
    frac = step / config.epsilon_decay_steps
    return config.epsilon_start + frac * (config.epsilon_end - config.epsilon_start)


class QNetwork:
    """Feed-forward net: input_dim -> hidden (tanh each) -> 3 linear outputs."""

    def __init__(self, input_dim, hidden=(32,), seed=0):
        if input_dim < 1:
            raise ValueError("input_dim must be at least 1")
        self.input_dim = int(input_dim)
        self.hidden = tuple(int(h) for h in hidden)
        self.seed = int(seed)
        sizes = [self.input_dim, *self.hidden, N_ACTIONS]
        rng = np.random.default_rng(self.seed)
        self.weights = []
        self.biases = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            self.biases.append(rng.uniform(-bound, bound, size=fan_out))

    @property
    def layer_sizes(self):
        return (self.input_dim, *self.hidden, N_ACTIONS)

    def parameters(self):
        """Flat list alternating weight matrices and bias vectors."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out

    def forward(self, state):
        """Q values plus the per-layer activations needed for backprop."""
        x = np.asarray(state, dtype=float)
        if x.shape != (self.input_dim,):
            raise ValueError(f"expected input of shape ({self.input_dim},), got {x.shape}")
        activations = [x]
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            x = np.tanh(w @ x + b)
            activations.append(x)
        q = self.weights[-1] @ x + self.biases[-1]
        return q, activations


def predict_q(net, state):
    """Forward pass; always a finite length-3 vector."""
    q, _ = net.forward(state)
    if not np.all(np.isfinite(q)):
        raise FloatingPointError(f"non-finite Q values {q}")
    return q


def select_action(net, state, epsilon, rng):
    """Greedy argmax (ties to the lowest index) except with prob epsilon."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be in [0, 1]")
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(N_ACTIONS))
    return int(np.argmax(predict_q(net, state)))


def q_gradients(net, state, action):
    """dQ(state, action)/dtheta for every parameter, in parameters() order.

    Backprop through the tanh stack for the single output `action`.
    """
    q, activations = net.forward(state)
    grads_w = [None] * len(net.weights)
    grads_b = [None] * len(net.biases)
    # output layer: Q_a = W[-1][a] . h + b[-1][a]
    delta = np.zeros(N_ACTIONS)
    delta[action] = 1.0
    grads_w[-1] = np.outer(delta, activations[-1])
    grads_b[-1] = delta
    upstream = net.weights[-1].T @ delta
    for layer in range(len(net.weights) - 2, -1, -1):
        h = activations[layer + 1]
        dz = upstream * (1.0 - h * h)  # tanh'
        grads_w[layer] = np.outer(dz, activations[layer])
        grads_b[layer] = dz
        upstream = net.weights[layer].T @ dz
    out = []
    for gw, gb in zip(grads_w, grads_b):
        out.append(gw)
        out.append(gb)
    return out


def td_update(net, state, action, reward, next_state, config):
    """One SGD step on 0.5*(target - Q(s,a))^2, target held constant.

    Returns the TD error target - Q(s,a). Gradients are clipped elementwise
    to [-grad_clip, grad_clip] before the step.
    """
    q, _ = net.forward(state)
    q_next, _ = net.forward(next_state)
    target = reward + config.gamma * float(np.max(q_next))
    err = target - float(q[action])
    loss = 0.5 * err * err
    if not np.isfinite(loss):
        raise FloatingPointError(
            f"non-finite TD loss (reward={reward}, q={q[action]}, target={target})"
        )
    grads = q_gradients(net, state, action)
    params = net.parameters()
    clip = config.grad_clip
    for p, g in zip(params, grads):
        step = np.clip(-err * g, -clip, clip)  # dLoss/dtheta = -err * dQ/dtheta
        p -= config.alpha * step
    return err


def save_params(net, path):
    """Binary snapshot: header (layer sizes, seed) then flat LE float64."""
    sizes = net.layer_sizes
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sqI", _MAGIC, net.seed, len(sizes)))
        fh.write(struct.pack(f"<{len(sizes)}I", *sizes))
        for p in net.parameters():
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_params(path):
    """Rebuild a QNetwork from a save_params snapshot."""
    with open(path, "rb") as fh:
        magic, seed, n_sizes = struct.unpack("<4sqI", fh.read(16))
        if magic != _MAGIC:
            raise ValueError(f"not a network snapshot: bad magic {magic!r}")
        sizes = struct.unpack(f"<{n_sizes}I", fh.read(4 * n_sizes))
        if sizes[-1] != N_ACTIONS:
            raise ValueError(f"snapshot output dim {sizes[-1]} unsupported")
        net = QNetwork(sizes[0], hidden=sizes[1:-1], seed=seed)
        for p in net.parameters():
            raw = fh.read(8 * p.size)
            if len(raw) != 8 * p.size:
                raise ValueError("snapshot truncated")
            p[...] = np.frombuffer(raw, dtype="<f8").reshape(p.shape)
        if fh.read(1):
            raise ValueError("snapshot has trailing bytes")
    return net
