# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Feature-only baselines: multi-layer perceptron and logistic regression.
"""

import numpy as np

from ..exception import InvalidConfigError
from . import tensor
from .layers import Model, ParamSet, check_features, glorot

MLP_HIDDEN = (256, 128, 64)
PENALTIES = ('l1', 'l2')
# inverse regularization strengths searched for logistic regression
C_GRID = (0.01, 0.05, 0.5, 0.8, 1.0, 5.0)


class MLPParams(ParamSet):
    """ Dense ReLU layers 256-128-64 and a linear output layer """

    def __init__(self, dims):
        super(MLPParams, self).__init__()
        self.dims = list(dims)

    @classmethod
    def initialize(cls, in_dim, classes, hidden=MLP_HIDDEN, seed=0):
        rng = np.random.RandomState(seed)
        params = cls([in_dim] + list(hidden) + [classes])
        for i, (rows, cols) in enumerate(zip(params.dims, params.dims[1:])):
            params.add('mlp%d.W' % i, glorot(rng, rows, cols))
            params.add('mlp%d.b' % i, np.zeros((1, cols)))
        return params

    @property
    def depth(self):
        return len(self.dims) - 1


def mlp_forward(features, params):
    """ ReLU hidden layers followed by linear logits """
    hidden = check_features(features, params.dims[0])
    for i in range(params.depth):
        hidden = tensor.add(
            tensor.matmul(hidden, params['mlp%d.W' % i]),
            params['mlp%d.b' % i],
        )
        if i < params.depth - 1:
            hidden = tensor.activation(hidden, 'relu')
    return hidden


class LRParams(ParamSet):
    """ Multinomial logistic regression ``X·W + b`` with a penalty

    :param penalty: ``l1`` or ``l2``
    :param c: Inverse of the regularization strength
    """

    def __init__(self, in_dim, classes, penalty='l2', c=1.0):
        super(LRParams, self).__init__()
        if penalty not in PENALTIES:
            raise InvalidConfigError('Unknown penalty %r' % penalty)
        if c <= 0:
            raise InvalidConfigError('C must be positive')
        self.in_dim = in_dim
        self.classes = classes
        self.penalty = penalty
        self.c = float(c)

    @classmethod
    def initialize(cls, in_dim, classes, penalty='l2', c=1.0):
        params = cls(in_dim, classes, penalty=penalty, c=c)
        params.add('lr.W', np.zeros((in_dim, classes)))
        params.add('lr.b', np.zeros((1, classes)))
        return params


def lr_forward(features, params):
    features = check_features(features, params.in_dim)
    return tensor.add(tensor.matmul(features, params['lr.W']),
                      params['lr.b'])


def lr_penalty(params, rows):
    """ ``(1/C)·‖W‖₁`` or ``(1/(2C))·‖W‖₂²``, per training row

    The training loss is a mean over ``rows`` rows, so the penalty is
    divided by ``rows`` as well; the bias is not penalized.
    """
    weight = params['lr.W']
    if params.penalty == 'l1':
        norm = tensor.abs_sum(weight)
        factor = 1.0 / params.c
    else:
        norm = tensor.square_sum(weight)
        factor = 1.0 / (2.0 * params.c)
    return tensor.scale(norm, factor / max(rows, 1))


class MLPModel(Model):

    def forward(self, context, features):
        return mlp_forward(features, self.params)


class LRModel(Model):

    def __init__(self, params):
        super(LRModel, self).__init__(params)
        self.penalty_rows = 1

    def forward(self, context, features):
        return lr_forward(features, self.params)

    def penalty(self):
        return lr_penalty(self.params, self.penalty_rows)
