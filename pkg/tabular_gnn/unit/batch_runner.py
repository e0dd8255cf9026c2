# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import logging

_logger = logging.getLogger(__name__)

try:
    from joblib import Parallel, cpu_count, delayed
except ImportError:
    _logger.warning('Cannot import joblib')


def default_jobs(task_count=None):
    """ Physical core count, capped by the number of tasks """
    jobs = max(cpu_count(only_physical_cores=True), 1)
    if task_count:
        jobs = min(jobs, task_count)
    return jobs


class BatchRunner(object):
    """ The role of a BatchRunner is to run a list of independent tasks,
    either directly or on a pool of workers, and return their results in
    task order.

    A task is a ``(function, args)`` pair.
    """

    def run(self, tasks):
        """ Run the tasks
        :rtype: list
        """
        tasks = list(tasks)
        _logger.info('Running %d task(s) with %s', len(tasks),
                     self.__class__.__name__)
        return self._run_tasks(tasks)

    def _run_tasks(self, tasks):
        """ Run tasks directly or on workers.
        Method to implement in sub-classes.
        """
        raise NotImplementedError


class DirectBatchRunner(BatchRunner):
    """ Run the tasks one after the other in this process """

    def _run_tasks(self, tasks):
        return [function(*args) for function, args in tasks]


class PooledBatchRunner(BatchRunner):
    """ Run the tasks on a bounded joblib worker pool """

    def __init__(self, jobs=None, backend='loky'):
        self.jobs = jobs or default_jobs()
        self.backend = backend

    def _run_tasks(self, tasks):
        pool = Parallel(n_jobs=self.jobs, backend=self.backend)
        return pool(delayed(function)(*args) for function, args in tasks)


def get_batch_runner(jobs=1, task_count=None):
    """ Direct runner for one job, pooled runner otherwise

    :param jobs: Worker count; ``0`` or ``None`` uses the physical cores
    :rtype: BatchRunner
    """
    if not jobs:
        jobs = default_jobs(task_count)
    elif task_count:
        jobs = min(jobs, task_count)
    if jobs <= 1:
        return DirectBatchRunner()
    return PooledBatchRunner(jobs=jobs)
