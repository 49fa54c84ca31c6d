"""Output heads and training losses.

The matching representation is pooled by splicing its first and last
unpadded rows (a mean+max variant exists behind a flag for comparison),
then a single linear layer with tanh produces either class
probabilities (softmax) or a ranking score in (-1, 1).
"""

from __future__ import annotations

import numpy as np

from . import tensor as T
from .errors import DataError

LOG_FLOOR = 1e-12


def pool_splice(z, mask):
    """Concat of the first and last unpadded rows, as a 1 x 2*width row."""
    idx = np.flatnonzero(np.asarray(mask) > 0)
    if idx.size == 0:
        raise DataError("cannot pool a fully masked sequence")
    picked = T.take_rows(z, [idx[0], idx[-1]])
    return T.reshape(picked, (1, 2 * z.shape[1]))


def pool_meanmax(z, mask):
    """Mean and max over unpadded rows, concatenated (comparison only)."""
    idx = np.flatnonzero(np.asarray(mask) > 0)
    if idx.size == 0:
        raise DataError("cannot pool a fully masked sequence")
    rows = T.take_rows(z, idx)
    mean = T.mul_const(T.matmul(T.constant(np.ones((1, idx.size))), rows), 1.0 / idx.size)
    peak = T.reshape(T.max_along(rows, axis=0), (1, z.shape[1]))
    return T.concat([mean, peak], axis=1)


def head_forward(pooled, w, b, task_kind):
    """Linear layer under tanh; softmax for classification, raw for ranking."""
    if pooled.shape[1] != w.shape[0]:
        raise DataError(f"pooled width {pooled.shape} does not match head weights {w.shape}")
    pre = T.tanh(T.add(T.matmul(pooled, w), b))
    if task_kind == "rank":
        return pre
    return T.softmax(pre, axis=1)


def cross_entropy(probs, labels, mean=True):
    """Negative log likelihood of the true classes.

    `probs` is an N x K tensor of distributions, `labels` integer class
    ids. Logs are floored at 1e-12. Averaged over the batch by default;
    `mean=False` gives the plain sum over samples.
    """
    n, k = probs.shape
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= k:
        raise DataError(f"label out of range [0, {k}): {labels.min()}..{labels.max()}")
    onehot = np.zeros((n, k))
    onehot[np.arange(n), labels] = 1.0
    picked = T.mul(T.constant(onehot), T.log(T.clamp_min(probs, LOG_FLOOR)))
    scale = -1.0 / n if mean else -1.0
    return T.mul_const(T.sum_all(picked), scale)


def hinge_loss(score_pos, score_neg):
    """Margin loss max(0, 1 - pos + neg), averaged over the batch.

    Scores come from the ranking head for the related and unrelated
    candidates of the same question.
    """
    if score_pos.shape != score_neg.shape:
        raise DataError(f"score shapes differ: {score_pos.shape} vs {score_neg.shape}")
    per_triple = T.relu(T.add_const(T.sub(score_neg, score_pos), 1.0))
    n = max(score_pos.size, 1)
    return T.mul_const(T.sum_all(per_triple), 1.0 / n)
