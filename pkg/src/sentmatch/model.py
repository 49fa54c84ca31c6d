"""Parameter construction and the full per-pair forward pass.

Weights live in one flat name->Tensor dict so the optimizer and the
checkpoint format can treat them uniformly. The forward pass can record
which architectural blocks ran into a caller-supplied trace list; the
structural tests use that to audit ablation variants.
"""

from __future__ import annotations

import math

import numpy as np

from . import tensor as T
from .data import task_spec
from .encoder import encode_pair, row_mask
from .errors import CacheMissError
from .heads import head_forward, pool_meanmax, pool_splice
from .interaction import interact


def _glorot(rng, fan_in, fan_out, shape):
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


def init_params(cfg, static_matrix, seed=None):
    """Build every trainable tensor the configuration calls for.

    `static_matrix` seeds the word-vector table; it becomes a trainable
    tensor unless the config freezes it. Ablations that remove a block
    also remove its weights, so disabling a component always shrinks the
    parameter count (the only_* switches reroute data instead and keep
    the count).
    """
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    d = cfg.hidden
    d_emb = cfg.static_dim + cfg.effective_contextual_dim
    w = cfg.kernel
    params = {}
    params["embed.static"] = T.Tensor(static_matrix.copy(), requires_grad=not cfg.freeze_static)
    params["enc.w_in"] = T.parameter(_glorot(rng, d_emb, d, (d_emb, d)))
    params["enc.conv1"] = T.parameter(_glorot(rng, w * d, d, (w, d, d)))
    params["enc.conv2"] = T.parameter(_glorot(rng, w * d, d, (w, d, d)))
    if not cfg.no_self_attention:
        params["enc.w_att"] = T.parameter(_glorot(rng, d, d, (d, d)))
    if not cfg.no_alignment:
        params["enc.w_c"] = T.parameter(_glorot(rng, d, d, (d, d)))
        params["enc.w_q"] = T.parameter(_glorot(rng, d, d, (d, d)))
    if cfg.no_fusion:
        params["enc.w_merge"] = T.parameter(_glorot(rng, 2 * d, d, (2 * d, d)))
    else:
        params["enc.w1"] = T.parameter(_glorot(rng, 4 * d, d, (4 * d, d)))
        params["enc.w2"] = T.parameter(_glorot(rng, 4 * d, d, (4 * d, d)))
    params["inter.w_h"] = T.parameter(_glorot(rng, d, d, (d, d)))
    params["inter.w_p"] = T.parameter(_glorot(rng, d, d, (d, d)))
    spec = task_spec(cfg.task)
    out_dim = spec.num_classes if spec.kind == "classify" else 1
    params["head.w"] = T.parameter(_glorot(rng, 8 * d, out_dim, (8 * d, out_dim)))
    params["head.b"] = T.parameter(np.zeros((1, out_dim)))
    return params


def param_count(params):
    return sum(t.size for t in params.values())


def trainable(params):
    return {name: t for name, t in params.items() if t.requires_grad}


class MatchModel:
    """The assembled network for one task.

    `provider` supplies per-sentence contextual vectors and is required
    whenever the effective contextual width is positive.
    """

    def __init__(self, cfg, params, provider=None):
        cfg.validate()
        self.cfg = cfg
        self.params = params
        self.provider = provider
        self.task = task_spec(cfg.task)
        if cfg.effective_contextual_dim > 0 and provider is None:
            raise CacheMissError("config asks for contextual vectors but no provider was given")

    def embed_sentence(self, ids, tokens, sid, mask, train=False, rng=None, trace=None):
        """Graph node for one sentence's embedding matrix.

        Static rows come from the trainable table (so gradients reach
        it); contextual rows are constants. Padded rows are forced to
        zero and training applies dropout right after lookup.
        """
        x = T.take_rows(self.params["embed.static"], np.asarray(ids, dtype=np.intp))
        ctx_dim = self.cfg.effective_contextual_dim
        if ctx_dim > 0:
            ctx = np.zeros((len(ids), ctx_dim))
            rows = self.provider.vectors(sid, tokens)
            ctx[: len(tokens)] = np.asarray(rows, dtype=np.float64)
            x = T.concat([x, T.constant(ctx)], axis=1)
        x = T.mul(x, row_mask(mask, x.shape[1]))
        if train and self.cfg.dropout > 0.0:
            x = T.dropout(x, self.cfg.dropout, rng)
        if trace is not None:
            trace.append("embed")
        return x

    def forward_pair(self, pair, train=False, rng=None, trace=None):
        """Probability row (classification) or score (ranking) for a pair."""
        cfg = self.cfg
        x = self.embed_sentence(pair.ids_a, pair.tokens_a, pair.sid_a, pair.mask_a, train, rng, trace)
        y = self.embed_sentence(pair.ids_b, pair.tokens_b, pair.sid_b, pair.mask_b, train, rng, None)
        h, p = encode_pair(
            x,
            y,
            pair.mask_a,
            pair.mask_b,
            self.params,
            no_alignment=cfg.no_alignment,
            no_fusion=cfg.no_fusion,
            use_self_attention=not cfg.no_self_attention,
            train=train,
            dropout_rate=cfg.dropout,
            rng=rng,
            trace=trace,
        )
        z = interact(
            h,
            p,
            pair.mask_a,
            pair.mask_b,
            self.params,
            only_h2p=cfg.only_h2p,
            only_p2h=cfg.only_p2h,
            no_self_attention=cfg.no_self_attention,
            trace=trace,
        )
        pool = pool_splice if cfg.pool == "splice" else pool_meanmax
        pooled = pool(z, pair.mask_a)
        if trace is not None:
            trace.append("pool")
        out = head_forward(pooled, self.params["head.w"], self.params["head.b"], self.task.kind)
        if trace is not None:
            trace.append("head")
        return out

    def predict_class(self, pair):
        probs = self.forward_pair(pair)
        return int(np.argmax(probs.data)), probs.data.ravel()

    def score(self, pair):
        return float(self.forward_pair(pair).data[0, 0])
