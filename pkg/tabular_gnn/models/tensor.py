# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Dense matrices with reverse-mode differentiation.

Every value is a two dimensional ``float64`` numpy array. A :class:`Node`
wraps a value together with the record needed to push gradients back to its
parents; :func:`backward` walks the graph in reverse topological order and
accumulates gradients additively, so a node used twice receives the sum of
both path contributions.
"""

import logging
from collections import OrderedDict

import numpy as np
from scipy import special

from ..exception import InvalidDataError, ShapeMismatchError

_logger = logging.getLogger(__name__)

PARAMS_HEADER = '# tabular-gnn-params v1'

ACTIVATIONS = ('identity', 'relu', 'elu', 'leaky_relu', 'sigmoid', 'tanh',
               'log_sigmoid')


def as_matrix(values):
    """ Coerce ``values`` into a finite two dimensional float matrix
    :param values: Array-like of at most two dimensions
    :rtype: numpy.ndarray
    """
    matrix = np.array(values, dtype=np.float64)
    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    elif matrix.ndim == 1:
        matrix = matrix.reshape(-1, 1)
    elif matrix.ndim > 2:
        raise ShapeMismatchError(
            'A matrix has two dimensions, got %d' % matrix.ndim,
        )
    if matrix.size == 0:
        raise ShapeMismatchError('A matrix needs at least one entry')
    if not np.all(np.isfinite(matrix)):
        raise InvalidDataError('Matrix entries must be finite')
    return matrix


class Node(object):
    """ One value of a computation graph

    :param value: Matrix held by the node
    :param parents: Nodes this value was computed from
    :param backward_fn: Callable receiving the output gradient and returning
        one gradient (or ``None``) per parent
    :param requires_grad: Whether a gradient must be stored on this node
    """

    def __init__(self, value, parents=(), backward_fn=None,
                 requires_grad=None, name=None):
        self.value = value
        self.parents = tuple(parents)
        self.backward_fn = backward_fn
        if requires_grad is None:
            requires_grad = any(p.requires_grad for p in self.parents)
        self.requires_grad = requires_grad
        self.grad = None
        self.name = name

    def __repr__(self):
        return '<Node %s %dx%d>' % (
            self.name or 'anonymous', self.rows, self.cols,
        )

    @property
    def shape(self):
        return self.value.shape

    @property
    def rows(self):
        return self.value.shape[0]

    @property
    def cols(self):
        return self.value.shape[1]

    def item(self):
        """ Return the single entry of a scalar node """
        if self.value.shape != (1, 1):
            raise ShapeMismatchError(
                'item() needs a 1x1 node, got %dx%d' % self.value.shape,
            )
        return float(self.value[0, 0])

    def zero_grad(self):
        self.grad = None


class Parameter(Node):
    """ Trainable leaf of a computation graph """

    def __init__(self, value, name):
        super(Parameter, self).__init__(
            as_matrix(value), requires_grad=True, name=name,
        )

    def __repr__(self):
        return '<Parameter %s %dx%d>' % (self.name, self.rows, self.cols)


def constant(value, name=None):
    """ Wrap a plain matrix in a node that never receives a gradient """
    return Node(as_matrix(value), requires_grad=False, name=name)


def as_node(value):
    if isinstance(value, Node):
        return value
    return constant(value)


def _op(value, parents, backward_fn, name):
    return Node(value, parents=parents, backward_fn=backward_fn, name=name)


def _unbroadcast(grad, shape):
    """ Sum a gradient down to a row-broadcast operand shape """
    if grad.shape == shape:
        return grad
    if shape[0] == 1 and shape[1] == grad.shape[1]:
        return grad.sum(axis=0, keepdims=True)
    if shape[1] == 1 and shape[0] == grad.shape[0]:
        return grad.sum(axis=1, keepdims=True)
    if shape == (1, 1):
        return grad.sum(keepdims=True).reshape(1, 1)
    raise ShapeMismatchError(
        'Cannot reduce gradient %s to %s' % (grad.shape, shape),
    )


def _check_broadcast(a, b, op_name):
    if a.shape == b.shape:
        return
    rows_ok = b.rows in (1, a.rows)
    cols_ok = b.cols in (1, a.cols)
    if not (rows_ok and cols_ok):
        raise ShapeMismatchError(
            '%s: shapes %s and %s are not compatible' % (
                op_name, a.shape, b.shape,
            )
        )


def matmul(a, b):
    """ Matrix product ``a · b``
    :raises ShapeMismatchError: when ``a.cols != b.rows``
    """
    a, b = as_node(a), as_node(b)
    if a.cols != b.rows:
        raise ShapeMismatchError(
            'matmul: %dx%d · %dx%d' % (a.rows, a.cols, b.rows, b.cols),
        )

    def backward_fn(grad):
        return grad.dot(b.value.T), a.value.T.dot(grad)

    return _op(a.value.dot(b.value), (a, b), backward_fn, 'matmul')


def add(a, b):
    """ Elementwise sum; ``b`` may be a 1×c row or N×1 column broadcast """
    a, b = as_node(a), as_node(b)
    _check_broadcast(a, b, 'add')

    def backward_fn(grad):
        return grad, _unbroadcast(grad, b.shape)

    return _op(a.value + b.value, (a, b), backward_fn, 'add')


def subtract(a, b):
    a, b = as_node(a), as_node(b)
    _check_broadcast(a, b, 'subtract')

    def backward_fn(grad):
        return grad, -_unbroadcast(grad, b.shape)

    return _op(a.value - b.value, (a, b), backward_fn, 'subtract')


def multiply(a, b):
    """ Elementwise (Hadamard) product of equally shaped nodes """
    a, b = as_node(a), as_node(b)
    if a.shape != b.shape:
        raise ShapeMismatchError(
            'multiply: shapes %s and %s differ' % (a.shape, b.shape),
        )

    def backward_fn(grad):
        return grad * b.value, grad * a.value

    return _op(a.value * b.value, (a, b), backward_fn, 'multiply')


def scale(a, factor):
    """ Multiply every entry by the constant ``factor`` """
    a = as_node(a)
    factor = float(factor)

    def backward_fn(grad):
        return (grad * factor,)

    return _op(a.value * factor, (a,), backward_fn, 'scale')


def transpose(a):
    a = as_node(a)

    def backward_fn(grad):
        return (grad.T,)

    return _op(a.value.T.copy(), (a,), backward_fn, 'transpose')


def take_rows(a, indices):
    """ Gather rows ``indices`` of ``a``; repeated indices are allowed """
    a = as_node(a)
    indices = np.asarray(indices, dtype=np.intp)
    if indices.ndim != 1 or indices.size == 0:
        raise ShapeMismatchError('take_rows needs a non-empty index vector')
    if indices.min() < 0 or indices.max() >= a.rows:
        raise ShapeMismatchError(
            'take_rows: index out of range for %d rows' % a.rows,
        )

    def backward_fn(grad):
        out = np.zeros_like(a.value)
        np.add.at(out, indices, grad)
        return (out,)

    return _op(a.value[indices], (a,), backward_fn, 'take_rows')


def add_outer(column, row_column):
    """ N×N matrix ``e[p, q] = column[p] + row_column[q]`` from two N×1 nodes
    """
    column, row_column = as_node(column), as_node(row_column)
    if column.cols != 1 or row_column.cols != 1:
        raise ShapeMismatchError('add_outer needs two column vectors')

    def backward_fn(grad):
        return (grad.sum(axis=1, keepdims=True),
                grad.sum(axis=0).reshape(-1, 1))

    value = column.value + row_column.value.T
    return _op(value, (column, row_column), backward_fn, 'add_outer')


def concat_cols(nodes):
    """ Concatenate equally tall nodes side by side """
    nodes = [as_node(n) for n in nodes]
    rows = nodes[0].rows
    if any(n.rows != rows for n in nodes):
        raise ShapeMismatchError('concat_cols needs equal row counts')
    bounds = np.cumsum([0] + [n.cols for n in nodes])

    def backward_fn(grad):
        return tuple(
            grad[:, bounds[i]:bounds[i + 1]] for i in range(len(nodes))
        )

    value = np.hstack([n.value for n in nodes])
    return _op(value, nodes, backward_fn, 'concat_cols')


def sum_all(a):
    """ Scalar sum of every entry """
    a = as_node(a)

    def backward_fn(grad):
        return (np.full_like(a.value, grad[0, 0]),)

    return _op(a.value.sum().reshape(1, 1), (a,), backward_fn, 'sum')


def mean(a):
    a = as_node(a)
    return scale(sum_all(a), 1.0 / a.value.size)


def masked_mean(a, mask):
    """ Mean of the entries of ``a`` where the constant ``mask`` is 1

    An all-zero mask yields a constant 0 scalar.
    """
    a = as_node(a)
    mask = np.asarray(mask, dtype=np.float64)
    if mask.shape != a.shape:
        raise ShapeMismatchError(
            'masked_mean: mask %s vs value %s' % (mask.shape, a.shape),
        )
    count = mask.sum()
    if count == 0:
        return constant(0.0)

    def backward_fn(grad):
        return (mask * (grad[0, 0] / count),)

    value = np.array([[(a.value * mask).sum() / count]])
    return _op(value, (a,), backward_fn, 'masked_mean')


def abs_sum(a):
    """ L1 norm; the subgradient at 0 is taken as 0 """
    a = as_node(a)

    def backward_fn(grad):
        return (np.sign(a.value) * grad[0, 0],)

    value = np.abs(a.value).sum().reshape(1, 1)
    return _op(value, (a,), backward_fn, 'abs_sum')


def square_sum(a):
    """ Squared L2 (Frobenius) norm """
    a = as_node(a)

    def backward_fn(grad):
        return (2.0 * a.value * grad[0, 0],)

    value = np.square(a.value).sum().reshape(1, 1)
    return _op(value, (a,), backward_fn, 'square_sum')


def activation(x, kind, slope=0.2):
    """ Elementwise non-linearity
    :param kind: One of ``identity``, ``relu``, ``elu``, ``leaky_relu``,
        ``sigmoid``, ``tanh`` or ``log_sigmoid``
    :param slope: Negative-side slope of ``leaky_relu``
    """
    x = as_node(x)
    v = x.value
    if kind == 'identity':
        return x
    if kind == 'relu':
        value = np.maximum(v, 0.0)
        local = (v > 0).astype(np.float64)
    elif kind == 'leaky_relu':
        value = np.where(v > 0, v, slope * v)
        local = np.where(v > 0, 1.0, slope)
    elif kind == 'elu':
        neg = np.expm1(np.minimum(v, 0.0))
        value = np.where(v > 0, v, neg)
        local = np.where(v > 0, 1.0, neg + 1.0)
    elif kind == 'sigmoid':
        value = special.expit(v)
        local = value * (1.0 - value)
    elif kind == 'tanh':
        value = np.tanh(v)
        local = 1.0 - value ** 2
    elif kind == 'log_sigmoid':
        value = special.log_expit(v)
        local = special.expit(-v)
    else:
        raise ValueError('Unknown activation %r' % kind)

    def backward_fn(grad):
        return (grad * local,)

    return _op(value, (x,), backward_fn, kind)


def softmax_rows(x, mask=None):
    """ Row-wise softmax restricted to the entries where ``mask`` is 1

    Masked entries get probability exactly 0. A per-row maximum over the
    unmasked entries is subtracted before exponentiation.

    :raises ShapeMismatchError: when the mask shape differs
    :raises InvalidDataError: when a row is fully masked
    """
    x = as_node(x)
    if mask is None:
        mask = np.ones_like(x.value)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != x.shape:
        raise ShapeMismatchError(
            'softmax_rows: mask %s vs value %s' % (mask.shape, x.shape),
        )
    if not mask.any(axis=1).all():
        raise InvalidDataError('softmax_rows: a row is fully masked')
    masked = np.where(mask, x.value, -np.inf)
    shifted = masked - masked.max(axis=1, keepdims=True)
    exp = np.where(mask, np.exp(shifted), 0.0)
    probs = exp / exp.sum(axis=1, keepdims=True)

    def backward_fn(grad):
        inner = (grad * probs).sum(axis=1, keepdims=True)
        return (probs * (grad - inner),)

    return _op(probs, (x,), backward_fn, 'softmax_rows')


def _check_labels(labels, rows, classes):
    labels = np.asarray(labels, dtype=np.intp).ravel()
    if labels.size != rows:
        raise ShapeMismatchError(
            'cross_entropy: %d labels for %d rows' % (labels.size, rows),
        )
    if labels.size and (labels.min() < 0 or labels.max() >= classes):
        raise InvalidDataError(
            'cross_entropy: labels must lie in [0, %d)' % classes,
        )
    return labels


def cross_entropy(logits, labels):
    """ Mean negative log-softmax of the true class, a 1×1 node """
    logits = as_node(logits)
    labels = _check_labels(labels, logits.rows, logits.cols)
    log_norm = special.logsumexp(logits.value, axis=1, keepdims=True)
    log_probs = logits.value - log_norm
    rows = np.arange(logits.rows)
    loss = -log_probs[rows, labels].mean()

    def backward_fn(grad):
        out = np.exp(log_probs)
        out[rows, labels] -= 1.0
        return (out * (grad[0, 0] / logits.rows),)

    return _op(np.array([[loss]]), (logits,), backward_fn, 'cross_entropy')


def mse(pred, target):
    """ Mean squared elementwise difference between ``pred`` and a constant
    """
    pred = as_node(pred)
    target = np.asarray(target, dtype=np.float64)
    if target.shape != pred.shape:
        raise ShapeMismatchError(
            'mse: prediction %s vs target %s' % (pred.shape, target.shape),
        )
    diff = pred.value - target

    def backward_fn(grad):
        return (diff * (2.0 * grad[0, 0] / diff.size),)

    value = np.array([[np.mean(diff ** 2)]])
    return _op(value, (pred,), backward_fn, 'mse')


def _topological_order(root):
    order = []
    seen = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if parent.requires_grad and id(parent) not in seen:
                stack.append((parent, False))
    return order


def backward(loss):
    """ Accumulate ``d loss / d node`` on every node requiring a gradient
    :param loss: 1×1 node
    :raises ShapeMismatchError: when ``loss`` is not a scalar
    """
    if loss.shape != (1, 1):
        raise ShapeMismatchError(
            'backward needs a scalar loss, got %dx%d' % loss.shape,
        )
    if not loss.requires_grad:
        return
    grads = {id(loss): np.ones((1, 1))}
    for node in reversed(_topological_order(loss)):
        grad = grads.pop(id(node), None)
        if grad is None:
            continue
        if node.backward_fn is None:
            node.grad = grad if node.grad is None else node.grad + grad
            continue
        for parent, parent_grad in zip(node.parents, node.backward_fn(grad)):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + parent_grad
            else:
                grads[key] = parent_grad


def grad_check(func, params, epsilon=1e-5, floor=1e-4):
    """ Worst relative error between analytic and central-difference grads

    :param func: Callable without arguments returning a 1×1 node built from
        ``params``
    :param params: Iterable of :class:`Parameter`
    :param epsilon: Finite difference step
    :param floor: Lower bound of the relative error denominator, so entries
        whose gradients are both near zero compare absolutely
    :rtype: float
    """
    if epsilon <= 0:
        raise ValueError('epsilon must be positive')
    params = list(params)
    for param in params:
        param.zero_grad()
    backward(func())
    worst = 0.0
    for param in params:
        analytic = param.grad
        if analytic is None:
            analytic = np.zeros_like(param.value)
        it = np.nditer(param.value, flags=['multi_index'])
        for _ in it:
            idx = it.multi_index
            original = param.value[idx]
            param.value[idx] = original + epsilon
            upper = func().item()
            param.value[idx] = original - epsilon
            lower = func().item()
            param.value[idx] = original
            numeric = (upper - lower) / (2.0 * epsilon)
            denom = max(abs(numeric), abs(analytic[idx]), floor)
            worst = max(worst, abs(numeric - analytic[idx]) / denom)
    _logger.debug('grad_check worst relative error %s', worst)
    return worst


def save_params(params, path):
    """ Write named matrices to the versioned text container

    Layout: the header line, then per record a ``name rows cols`` line and
    a line holding the row-major values.

    :param params: Mapping or ordered pairs of name to matrix
    """
    if hasattr(params, 'items'):
        params = params.items()
    lines = [PARAMS_HEADER]
    for name, value in params:
        value = getattr(value, 'value', value)
        matrix = as_matrix(value)
        if ' ' in name:
            raise InvalidDataError('Parameter names cannot hold spaces')
        lines.append('%s %d %d' % (name, matrix.shape[0], matrix.shape[1]))
        lines.append(' '.join(repr(float(v)) for v in matrix.ravel()))
    with open(path, 'w') as fh:
        fh.write('\n'.join(lines) + '\n')


def load_params(path):
    """ Read a container written by :func:`save_params`
    :rtype: collections.OrderedDict
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != PARAMS_HEADER:
        raise InvalidDataError('%s is not a parameter container' % path)
    out = OrderedDict()
    body = lines[1:]
    if len(body) % 2:
        raise InvalidDataError('%s is truncated' % path)
    for head, values in zip(body[::2], body[1::2]):
        name, rows, cols = head.split(' ')
        rows, cols = int(rows), int(cols)
        data = np.array([float(v) for v in values.split(' ')])
        if data.size != rows * cols:
            raise InvalidDataError(
                '%s: %s holds %d values, expected %d' % (
                    path, name, data.size, rows * cols,
                )
            )
        out[name] = data.reshape(rows, cols)
    return out
