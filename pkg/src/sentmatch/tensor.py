"""Dense float64 tensors with reverse-mode automatic differentiation.

Every value in the model (activations, weights, losses) is a `Tensor`
wrapping a numpy float64 array. Operations record their inputs and a
vector-Jacobian closure on the output node; `Tensor.backward()` replays
the recorded graph once, in reverse topological order, accumulating
gradients into every node that requires them.

The engine is deliberately small: 0/1/2-d arrays, no broadcasting (equal
shapes are enforced where the contract says so), single-threaded per
graph. Tensors are immutable values once built; separate graphs can live
on separate threads because there is no global tape.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, NumericalError, ShapeError

# Additive bias for masked attention cells. Finite on purpose: exp(x) for
# x <= -745 underflows to exactly 0.0 in float64, so masked positions get
# weight 0 without inf-inf artifacts inside the stable softmax.
MASK_OFF = -1e30


def _asarray(data):
    # 3-d is reserved for convolution kernel stacks (width, d_in, d_out)
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim > 3:
        raise ShapeError(f"tensors are at most 3-d, got shape {arr.shape}")
    return arr


class Tensor:
    """A node in the computation graph.

    `data` is the forward value, `grad` the accumulated gradient (same
    shape, or None before backward). Leaf tensors are created with
    `requires_grad=True` for trainable weights and False for constants
    (masks, labels, precomputed vectors); interior nodes inherit the flag
    from their parents.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_vjp")

    def __init__(self, data, requires_grad=False, _parents=(), _vjp=None):
        self.data = _asarray(data)
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = _parents
        self._vjp = _vjp

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        return float(self.data)

    def detach(self):
        return Tensor(self.data.copy())

    def backward(self):
        """Propagate gradients from this scalar through the graph.

        Visits each recorded node exactly once, children before parents.
        Gradients of every node reachable through grad-requiring edges are
        reset first, so repeated backward calls on disjoint graphs do not
        leak accumulation across calls.
        """
        if self.data.size != 1:
            raise ShapeError(f"backward requires a scalar, got shape {self.shape}")
        topo = []
        seen = {id(self)}
        stack = [(self, iter(self._parents))]
        while stack:
            node, parents = stack[-1]
            advanced = False
            for p in parents:
                if p.requires_grad and id(p) not in seen:
                    seen.add(id(p))
                    stack.append((p, iter(p._parents)))
                    advanced = True
                    break
            if not advanced:
                topo.append(node)
                stack.pop()
        for node in topo:
            node.grad = None
        self.grad = np.ones_like(self.data)
        for node in reversed(topo):
            if node._vjp is not None:
                node._vjp(node.grad)

    # Operator sugar; the module-level functions are the real API.
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __matmul__(self, other):
        return matmul(self, other)

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"


def _accumulate(t, g):
    if t.requires_grad:
        t.grad = g if t.grad is None else t.grad + g


def constant(data):
    return Tensor(data, requires_grad=False)


def parameter(data):
    return Tensor(data, requires_grad=True)


def _node(data, parents, vjp):
    needs = any(p.requires_grad for p in parents)
    return Tensor(data, requires_grad=needs, _parents=tuple(parents), _vjp=vjp if needs else None)


# ---------------------------------------------------------------------------
# linear algebra


def matmul(a, b):
    """Matrix product of two 2-d tensors; gradients for both operands."""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul shapes incompatible: {a.shape} x {b.shape}")
    out_data = a.data @ b.data

    def vjp(g):
        _accumulate(a, g @ b.data.T)
        _accumulate(b, a.data.T @ g)

    return _node(out_data, (a, b), vjp)


def transpose(a):
    if a.ndim != 2:
        raise ShapeError(f"transpose expects 2-d, got {a.shape}")

    def vjp(g):
        _accumulate(a, g.T)

    return _node(a.data.T, (a,), vjp)


def reshape(a, shape):
    old = a.shape

    def vjp(g):
        _accumulate(a, g.reshape(old))

    return _node(a.data.reshape(shape), (a,), vjp)


def conv1d(x, kernels):
    """Same-padded cross-correlation along the sequence axis.

    `x` is len x d_in, `kernels` is width x d_in x d_out with odd width;
    zero padding keeps the output length equal to the input length.
    """
    if x.ndim != 2 or kernels.data.ndim != 3:
        raise ShapeError(f"conv1d expects (len,d_in) and (w,d_in,d_out), got {x.shape} and {kernels.shape}")
    w, d_in, d_out = kernels.shape
    if w % 2 == 0:
        raise ConfigError(f"conv1d kernel width must be odd, got {w}")
    if d_in != x.shape[1]:
        raise ShapeError(f"conv1d channel mismatch: input {x.shape} vs kernels {kernels.shape}")
    n = x.shape[0]
    pad = w // 2
    xp = np.zeros((n + 2 * pad, d_in))
    xp[pad:pad + n] = x.data
    out_data = np.zeros((n, d_out))
    for dt in range(w):
        out_data += xp[dt:dt + n] @ kernels.data[dt]

    def vjp(g):
        if x.requires_grad:
            gxp = np.zeros_like(xp)
            for dt in range(w):
                gxp[dt:dt + n] += g @ kernels.data[dt].T
            _accumulate(x, gxp[pad:pad + n])
        if kernels.requires_grad:
            gk = np.empty_like(kernels.data)
            for dt in range(w):
                gk[dt] = xp[dt:dt + n].T @ g
            _accumulate(kernels, gk)

    return _node(out_data, (x, kernels), vjp)


# ---------------------------------------------------------------------------
# nonlinearities and normalization


def softmax(x, axis=-1):
    """Numerically stable softmax along `axis`.

    Slices are shifted by their max before exponentiation, so extreme
    inputs do not overflow. A slice whose entries are all -inf (or all at
    `MASK_OFF`) normalizes to the uniform distribution; callers that fully
    mask a slice are expected to zero the corresponding output rows.
    """
    d = x.data
    m = np.max(d, axis=axis, keepdims=True)
    m_safe = np.where(np.isfinite(m), m, 0.0)
    e = np.exp(d - m_safe)
    s = np.sum(e, axis=axis, keepdims=True)
    k = d.shape[axis] if d.ndim else 1
    out_data = np.where(s > 0.0, e / np.where(s > 0.0, s, 1.0), 1.0 / k)

    def vjp(g):
        inner = np.sum(g * out_data, axis=axis, keepdims=True)
        _accumulate(x, out_data * (g - inner))

    return _node(out_data, (x,), vjp)


def relu(x):
    out_data = np.maximum(x.data, 0.0)

    def vjp(g):
        _accumulate(x, g * (x.data > 0.0))

    return _node(out_data, (x,), vjp)


def tanh(x):
    out_data = np.tanh(x.data)

    def vjp(g):
        _accumulate(x, g * (1.0 - out_data * out_data))

    return _node(out_data, (x,), vjp)


def sigmoid(x):
    # exp formulated per sign to stay stable for large |x|
    d = x.data
    out_data = np.where(d >= 0, 1.0 / (1.0 + np.exp(-np.abs(d))), np.exp(-np.abs(d)) / (1.0 + np.exp(-np.abs(d))))

    def vjp(g):
        _accumulate(x, g * out_data * (1.0 - out_data))

    return _node(out_data, (x,), vjp)


def log(x):
    out_data = np.log(x.data)

    def vjp(g):
        _accumulate(x, g / x.data)

    return _node(out_data, (x,), vjp)


def clamp_min(x, floor):
    out_data = np.maximum(x.data, floor)

    def vjp(g):
        _accumulate(x, g * (x.data > floor))

    return _node(out_data, (x,), vjp)


# ---------------------------------------------------------------------------
# pointwise arithmetic (equal shapes enforced, no broadcasting)


def _check_same_shape(op, a, b):
    if a.shape != b.shape:
        raise ShapeError(f"{op} requires equal shapes, got {a.shape} and {b.shape}")


def add(a, b):
    _check_same_shape("add", a, b)

    def vjp(g):
        _accumulate(a, g)
        _accumulate(b, g)

    return _node(a.data + b.data, (a, b), vjp)


def sub(a, b):
    _check_same_shape("sub", a, b)

    def vjp(g):
        _accumulate(a, g)
        _accumulate(b, -g)

    return _node(a.data - b.data, (a, b), vjp)


def mul(a, b):
    _check_same_shape("mul", a, b)

    def vjp(g):
        _accumulate(a, g * b.data)
        _accumulate(b, g * a.data)

    return _node(a.data * b.data, (a, b), vjp)


def add_const(x, c):
    def vjp(g):
        _accumulate(x, g)

    return _node(x.data + c, (x,), vjp)


def mul_const(x, c):
    def vjp(g):
        _accumulate(x, g * c)

    return _node(x.data * c, (x,), vjp)


def rsub_const(c, x):
    """c - x, elementwise against a python scalar."""

    def vjp(g):
        _accumulate(x, -g)

    return _node(c - x.data, (x,), vjp)


def concat(tensors, axis=0):
    """Concatenate along `axis`; shapes must agree off the concat axis."""
    tensors = list(tensors)
    if not tensors:
        raise ShapeError("concat of zero tensors")
    ndim = tensors[0].ndim
    for t in tensors[1:]:
        off_ok = t.ndim == ndim and all(
            t.shape[i] == tensors[0].shape[i] for i in range(ndim) if i != axis % max(ndim, 1)
        )
        if not off_ok:
            raise ShapeError(f"concat shapes incompatible off axis {axis}: {tensors[0].shape} and {t.shape}")
    out_data = np.concatenate([t.data for t in tensors], axis=axis)
    sizes = [t.shape[axis % ndim] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def vjp(g):
        for t, lo, hi in zip(tensors, offsets[:-1], offsets[1:]):
            idx = [slice(None)] * ndim
            idx[axis % ndim] = slice(lo, hi)
            _accumulate(t, g[tuple(idx)])

    return _node(out_data, tensors, vjp)


# ---------------------------------------------------------------------------
# reductions, gathers, shape utilities


def sum_all(x):
    def vjp(g):
        _accumulate(x, np.full(x.shape, float(g)))

    return _node(np.sum(x.data), (x,), vjp)


def max_along(x, axis):
    """Max reduction along one axis; gradient routes to the first argmax."""
    idx = np.argmax(x.data, axis=axis)
    out_data = np.max(x.data, axis=axis)

    def vjp(g):
        gx = np.zeros_like(x.data)
        if x.ndim == 1:
            gx[idx] = g
        elif axis % 2 == 1:
            gx[np.arange(x.shape[0]), idx] = g
        else:
            gx[idx, np.arange(x.shape[1])] = g
        _accumulate(x, gx)

    return _node(out_data, (x,), vjp)


def take_rows(x, indices):
    """Gather rows of a 2-d tensor; gradient scatter-adds back."""
    if x.ndim != 2:
        raise ShapeError(f"take_rows expects 2-d, got {x.shape}")
    idx = np.asarray(indices, dtype=np.intp)

    def vjp(g):
        gx = np.zeros_like(x.data)
        np.add.at(gx, idx, g)
        _accumulate(x, gx)

    return _node(x.data[idx], (x,), vjp)


def tile_rows(x, n):
    """Repeat a 1 x d row n times; gradient sums the copies."""
    if x.ndim != 2 or x.shape[0] != 1:
        raise ShapeError(f"tile_rows expects a 1 x d row, got {x.shape}")

    def vjp(g):
        _accumulate(x, g.sum(axis=0, keepdims=True))

    return _node(np.repeat(x.data, n, axis=0), (x,), vjp)


def dropout(x, rate, rng):
    """Inverted dropout: zero with probability `rate`, scale survivors.

    Caller decides training vs inference; at rate 0 this is the identity
    and draws nothing from `rng`.
    """
    if rate == 0.0:
        return x
    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)

    def vjp(g):
        _accumulate(x, g * keep)

    return _node(x.data * keep, (x,), vjp)


# ---------------------------------------------------------------------------
# gradient checking


class GradCheckReport:
    """Outcome of one finite-difference check.

    `max_rel_err` is the worst relative error (with a unit floor in the
    denominator, so near-zero gradients are judged absolutely), and
    `worst` names the offending (input index, flat coordinate).
    """

    def __init__(self, max_rel_err, worst, tolerance):
        self.max_rel_err = max_rel_err
        self.worst = worst
        self.passed = max_rel_err <= tolerance

    def __repr__(self):
        return f"GradCheckReport(max_rel_err={self.max_rel_err:.3e}, worst={self.worst}, passed={self.passed})"


def grad_check(op, inputs, tolerance=1e-4, step=1e-5):
    """Compare analytic gradients of `op` against central finite differences.

    `op` maps a list of tensors to one tensor; the check reduces it with
    sum_all so the seed gradient is well defined, then perturbs every
    coordinate of every input by +-`step`. Raises NumericalError (naming
    the coordinate) if any analytic or numeric value is non-finite.
    Returns a GradCheckReport; the caller compares against `tolerance`.
    """
    out = sum_all(op(inputs))
    out.backward()
    analytic = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in inputs]

    def forward():
        return float(sum_all(op(inputs)).data)

    max_rel = 0.0
    worst = (0, 0)
    for i, t in enumerate(inputs):
        flat = t.data.reshape(-1)
        for j in range(flat.size):
            orig = flat[j]
            flat[j] = orig + step
            f_plus = forward()
            flat[j] = orig - step
            f_minus = forward()
            flat[j] = orig
            numeric = (f_plus - f_minus) / (2.0 * step)
            a = analytic[i].reshape(-1)[j]
            if not (np.isfinite(numeric) and np.isfinite(a)):
                raise NumericalError(f"non-finite gradient at input {i}, coordinate {j}: analytic={a}, numeric={numeric}")
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1.0)
            if rel > max_rel:
                max_rel = rel
                worst = (i, j)
    return GradCheckReport(max_rel, worst, tolerance)
