"""Feed-forward candidate scorer with softmax over variable candidate sets.

A shared-weight MLP maps each 64-value candidate vector to one scalar;
the softmax runs across a word's candidates, so the number of "classes"
varies per instance.  The cross-entropy target spreads probability 1/n
over the n candidates that carry the gold stem.  Natural logarithms
throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError

INPUT_WIDTH = 64


@dataclass(frozen=True)
class ModelConfig:
    hidden: tuple = (32, 16, 8)
    seed: int = 0
    input_width: int = INPUT_WIDTH


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    batch_size: int = 256
    epochs: int = 50
    fine_tune_batch: int = 4000
    fine_tune_epochs: int = 100
    fine_tune: bool = False

    def __post_init__(self):
        if min(self.learning_rate, self.batch_size, self.epochs) <= 0:
            raise ValidationError("training hyperparameters must be positive")


@dataclass
class Prediction:
    probs: np.ndarray
    entropy: float


def entropy(probs) -> float:
    p = np.asarray(probs, dtype=np.float64)
    nz = p[p > 0]
    return float(-(nz * np.log(nz)).sum())


def softmax(scores: np.ndarray) -> np.ndarray:
    z = scores - scores.max()
    e = np.exp(z)
    return e / e.sum()


class Scorer:
    """MLP with rectifier hidden layers and a width-1 linear head."""

    def __init__(self, config: ModelConfig = ModelConfig()):
        self.config = config
        rng = np.random.default_rng(config.seed)
        sizes = [config.input_width] + list(config.hidden) + [1]
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            bound = 1.0 / math.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))

    # -- forward -----------------------------------------------------------

    def _forward(self, x: np.ndarray):
        """Returns per-layer activations; x is (n, input_width)."""
        acts = [x]
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i != last:
                h = np.maximum(h, 0.0)
            acts.append(h)
        return acts

    def scores(self, x: np.ndarray) -> np.ndarray:
        return self._forward(np.asarray(x, dtype=np.float64))[-1][:, 0]

    def score(self, candidates) -> Prediction:
        """Probabilities over one instance's candidate vectors."""
        x = np.asarray(candidates, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < 1:
            raise ValidationError("need at least one candidate")
        probs = softmax(self.scores(x))
        return Prediction(probs=probs, entropy=entropy(probs))

    # -- loss and gradient ---------------------------------------------------

    @staticmethod
    def target_distribution(candidate_stems, gold_stem) -> np.ndarray:
        hits = [i for i, s in enumerate(candidate_stems) if s == gold_stem]
        if not hits:
            raise ValidationError(f"gold stem {gold_stem!r} not among candidates")
        p = np.zeros(len(candidate_stems))
        p[hits] = 1.0 / len(hits)
        return p

    def loss(self, pred: Prediction, gold_stem, candidate_stems) -> float:
        p = self.target_distribution(candidate_stems, gold_stem)
        logs = np.log(np.clip(pred.probs, 1e-300, None))
        return float(-(p * logs).sum())

    def grad(self, batch):
        """Mean-loss gradients over a batch of (vectors, stems, gold) triples.

        Stacks every candidate of the batch into one matrix so the
        backward pass is a handful of matrix products.
        """
        mats = []
        targets = []
        bounds = [0]
        for vectors, stems, gold in batch:
            x = np.asarray(vectors, dtype=np.float64)
            mats.append(x)
            targets.append(self.target_distribution(stems, gold))
            bounds.append(bounds[-1] + x.shape[0])
        x_all = np.vstack(mats)
        acts = self._forward(x_all)
        scores = acts[-1][:, 0]
        dscores = np.zeros_like(scores)
        total_loss = 0.0
        for i, p in enumerate(targets):
            lo, hi = bounds[i], bounds[i + 1]
            probs = softmax(scores[lo:hi])
            logs = np.log(np.clip(probs, 1e-300, None))
            total_loss += float(-(p * logs).sum())
            dscores[lo:hi] = probs - p
        n = len(batch)
        dscores /= n
        total_loss /= n

        grads_w = [np.zeros_like(w) for w in self.weights]
        grads_b = [np.zeros_like(b) for b in self.biases]
        delta = dscores[:, None]
        last = len(self.weights) - 1
        for i in range(last, -1, -1):
            a_prev = acts[i]
            grads_w[i] = a_prev.T @ delta
            grads_b[i] = delta.sum(axis=0)
            if i:
                delta = (delta @ self.weights[i].T) * (acts[i] > 0)
        return total_loss, grads_w, grads_b

    # -- persistence ---------------------------------------------------------

    def state(self) -> dict:
        return {
            "format": "kinmorph-scorer-v1",
            "hidden": list(self.config.hidden),
            "seed": self.config.seed,
            "input_width": self.config.input_width,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    def save(self, path, optimizer_state: Optional[dict] = None):
        payload = self.state()
        if optimizer_state is not None:
            payload["optimizer"] = optimizer_state
        with open(path, "w") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path) -> "Scorer":
        with open(path) as fh:
            payload = json.load(fh)
        if payload.get("format") != "kinmorph-scorer-v1":
            raise ValidationError("unrecognized checkpoint format")
        model = cls(
            ModelConfig(
                hidden=tuple(payload["hidden"]),
                seed=payload["seed"],
                input_width=payload["input_width"],
            )
        )
        model.weights = [np.asarray(w, dtype=np.float64) for w in payload["weights"]]
        model.biases = [np.asarray(b, dtype=np.float64) for b in payload["biases"]]
        return model


@dataclass
class AdamState:
    m_w: list = field(default_factory=list)
    v_w: list = field(default_factory=list)
    m_b: list = field(default_factory=list)
    v_b: list = field(default_factory=list)

    @classmethod
    def for_model(cls, model: Scorer) -> "AdamState":
        return cls(
            m_w=[np.zeros_like(w) for w in model.weights],
            v_w=[np.zeros_like(w) for w in model.weights],
            m_b=[np.zeros_like(b) for b in model.biases],
            v_b=[np.zeros_like(b) for b in model.biases],
        )


def _adam_update(param, grad, m, v, t, lr, beta1, beta2, eps):
    m *= beta1
    m += (1 - beta1) * grad
    v *= beta2
    v += (1 - beta2) * grad * grad
    m_hat = m / (1 - beta1**t)
    v_hat = v / (1 - beta2**t)
    return lr * m_hat / (np.sqrt(v_hat) + eps)


def adam_step(model, grads_w, grads_b, state, t, lr=0.01, beta1=0.9, beta2=0.999, eps=1e-8):
    """Standard bias-corrected update; t counts steps from 1."""
    if t < 1:
        raise ValidationError("Adam step index starts at 1")
    for i, w in enumerate(model.weights):
        w -= _adam_update(w, grads_w[i], state.m_w[i], state.v_w[i], t, lr, beta1, beta2, eps)
    for i, b in enumerate(model.biases):
        b -= _adam_update(b, grads_b[i], state.m_b[i], state.v_b[i], t, lr, beta1, beta2, eps)


def lamb_step(
    model,
    grads_w,
    grads_b,
    state,
    t,
    lr=0.01,
    beta1=0.9,
    beta2=0.999,
    eps=1e-8,
    trust_clip=(0.01, 10.0),
):
    """Adam inner step rescaled per layer by the clamped trust ratio
    ||theta|| / ||update||; degenerate norms fall back to ratio 1."""
    if t < 1:
        raise ValidationError("LAMB step index starts at 1")

    def apply(param, update):
        w_norm = float(np.linalg.norm(param))
        u_norm = float(np.linalg.norm(update))
        if w_norm == 0.0 or u_norm == 0.0:
            ratio = 1.0
        else:
            ratio = min(max(w_norm / u_norm, trust_clip[0]), trust_clip[1])
        param -= ratio * update

    for i, w in enumerate(model.weights):
        apply(w, _adam_update(w, grads_w[i], state.m_w[i], state.v_w[i], t, lr, beta1, beta2, eps))
    for i, b in enumerate(model.biases):
        apply(b, _adam_update(b, grads_b[i], state.m_b[i], state.v_b[i], t, lr, beta1, beta2, eps))
