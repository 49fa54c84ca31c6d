"""Independent reference implementations used to check the real code.

Everything here is written against the mathematical definitions with
plain numpy / python loops and never imports the package's tensor engine,
so a bug in the engine cannot hide in the oracle.
"""

import math

import numpy as np


def matmul_loops(a, b):
    r, k = a.shape
    k2, c = b.shape
    assert k == k2
    out = np.zeros((r, c))
    for i in range(r):
        for j in range(c):
            s = 0.0
            for t in range(k):
                s += a[i, t] * b[t, j]
            out[i, j] = s
    return out


def conv1d_direct(x, kernels):
    n, d_in = x.shape
    w, _, d_out = kernels.shape
    half = w // 2
    out = np.zeros((n, d_out))
    for t in range(n):
        for o in range(d_out):
            s = 0.0
            for dt in range(w):
                src = t + dt - half
                if 0 <= src < n:
                    for i in range(d_in):
                        s += x[src, i] * kernels[dt, i, o]
            out[t, o] = s
    return out


def softmax_highprec(x):
    """Softmax of a 1-d vector in 50-digit arithmetic."""
    from mpmath import mp, mpf

    mp.dps = 50
    vals = [mp.e ** mpf(float(v)) for v in x]
    total = sum(vals)
    return np.array([float(v / total) for v in vals])


def softmax_rows(x, keep):
    """Row softmax restricted to the columns flagged in `keep` (bool)."""
    out = np.zeros_like(x)
    for i in range(x.shape[0]):
        cols = [j for j in range(x.shape[1]) if keep[j]]
        if not cols:
            continue
        m = max(x[i, j] for j in cols)
        exps = {j: math.exp(x[i, j] - m) for j in cols}
        z = sum(exps.values())
        for j in cols:
            out[i, j] = exps[j] / z
    return out


def softmax_vec(x, keep):
    out = np.zeros_like(x)
    idx = [i for i in range(len(x)) if keep[i]]
    if not idx:
        return out
    m = max(x[i] for i in idx)
    exps = {i: math.exp(x[i] - m) for i in idx}
    z = sum(exps.values())
    for i in idx:
        out[i] = exps[i] / z
    return out


def relu_np(x):
    return np.maximum(x, 0.0)


def align_direct(c, q, w_c, w_q, mask_a, mask_b):
    """Alignment between two encoded sentences, computed step by step.

    Projections pass through relu, their product gives the similarity
    grid, rows are normalized over the second sentence to mix its rows
    into the first, columns are normalized over the first sentence to mix
    its rows into the second. Padded rows of the outputs are zero.
    """
    pc = relu_np(c @ w_c)
    pq = relu_np(q @ w_q)
    s = pc @ pq.T
    a_rows = softmax_rows(s, mask_b.astype(bool))
    c_aligned = a_rows @ q
    a_cols = softmax_rows(s.T, mask_a.astype(bool))  # softmax over first-sentence positions
    q_aligned = a_cols @ c
    c_aligned = c_aligned * mask_a[:, None]
    q_aligned = q_aligned * mask_b[:, None]
    return c_aligned, q_aligned, s


def fuse_direct(x, y, w1, w2):
    n, d = x.shape
    out = np.zeros((n, d))
    for t in range(n):
        cat = np.concatenate([x[t], y[t], x[t] * y[t], x[t] - y[t]])
        cand = np.tanh(cat @ w1)
        gate = 1.0 / (1.0 + np.exp(-(cat @ w2)))
        out[t] = gate * cand + (1.0 - gate) * x[t]
    return out


def similarity_direct(h, p, w_h, w_p):
    return relu_np(h @ w_h) @ relu_np(p @ w_p).T


def h2p_direct(s, p, mask_b):
    weights = softmax_rows(s, mask_b.astype(bool))
    return weights @ p


def p2h_direct(s, h, mask_a, mask_b):
    n = s.shape[0]
    keep_b = mask_b.astype(bool)
    row_max = np.array(
        [max(s[t, j] for j in range(s.shape[1]) if keep_b[j]) if keep_b.any() else 0.0 for t in range(n)]
    )
    b = softmax_vec(row_max, mask_a.astype(bool))
    c = b @ h
    return c, np.tile(c, (n, 1))


def merge_direct(h, q, c_att):
    # c_att is the already-tiled n x d block
    return np.concatenate([h, q, h * q, h * c_att], axis=1)


def self_attend_direct(g, mask_a):
    e = g @ g.T
    weights = softmax_rows(e, mask_a.astype(bool))
    z = weights @ g
    return z * mask_a[:, None]


def head_direct(pooled, w, b, kind):
    pre = np.tanh(pooled @ w + b)
    if kind == "rank":
        return pre
    m = pre.max()
    e = np.exp(pre - m)
    return e / e.sum()


def cross_entropy_direct(probs, labels, mean=True):
    n, k = probs.shape
    total = 0.0
    for i in range(n):
        row = 0.0
        for j in range(k):
            y = 1.0 if j == labels[i] else 0.0
            row += y * math.log(max(probs[i, j], 1e-12))
        total -= row
    return total / n if mean else total


def hinge_direct(pos, neg):
    vals = [max(0.0, 1.0 - p + q) for p, q in zip(np.ravel(pos), np.ravel(neg))]
    return sum(vals) / len(vals)


def accuracy_count(preds, labels):
    hits = sum(1 for p, l in zip(preds, labels) if p == l)
    return hits / len(labels)


def map_mrr_bruteforce(groups):
    """groups: list of lists of (score, relevant) in stable input order."""
    ap_values = []
    rr_values = []
    for cands in groups:
        order = sorted(range(len(cands)), key=lambda i: -cands[i][0])
        seen_relevant = 0
        precisions = []
        first_rank = None
        for rank, i in enumerate(order, start=1):
            if cands[i][1]:
                seen_relevant += 1
                precisions.append(seen_relevant / rank)
                if first_rank is None:
                    first_rank = rank
        if not precisions:
            continue
        ap_values.append(sum(precisions) / len(precisions))
        rr_values.append(1.0 / first_rank)
    return sum(ap_values) / len(ap_values), sum(rr_values) / len(rr_values)


def adam_scalar(grads, lr, beta1, beta2, eps, x0=0.0):
    """Run the moment recurrences for one scalar parameter."""
    x, m, v = x0, 0.0, 0.0
    for t, g in enumerate(grads, start=1):
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g
        m_hat = m / (1.0 - beta1**t)
        v_hat = v / (1.0 - beta2**t)
        x -= lr * m_hat / (math.sqrt(v_hat) + eps)
    return x, m, v
