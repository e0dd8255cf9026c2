# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).


class BenchmarkException(Exception):
    """ Base Exception for the tabular graph benchmark """


class InvalidDataError(BenchmarkException):
    """ Input data is malformed or cannot satisfy a contract """


class ShapeMismatchError(BenchmarkException):
    """ Operands of a tensor or model operation have incompatible shapes """


class InvalidConfigError(BenchmarkException):
    """ A configuration object or command line is invalid """


class FailedFoldError(BenchmarkException):
    """ Training of one fold failed and must be recorded, not raised """

    def __init__(self, message, epoch=None):
        super(FailedFoldError, self).__init__(message)
        self.epoch = epoch


class NoSuccessfulFoldError(BenchmarkException):
    """ Every fold of a cross-validation failed """


class MismatchedFoldPlanError(BenchmarkException):
    """ Paired comparison of reports built on different fold plans """


class GraphConfigMismatchError(BenchmarkException):
    """ Inference graph does not use the configuration seen in training """
