# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Benchmark run configuration.

A run is described by a sectioned key-value file::

    [run]
    input = wine.csv
    label = class
    seed = 0
    baselines = LR, MLP

    [method:LR]
    method = lr

    [method:GCN]
    method = gcn
    metric = cosine
    threshold = grid
    mode = grid

Training keys (``max_epochs``, ``patience``, ``learning_rate``,
``batch_size``, ``optimizer``, ``validation_in_graph``) set run-wide
defaults in ``[run]`` and may be overridden per method. ``threshold`` and
``mode`` accept one value, a comma separated list or ``grid``; ``metric``
accepts one value, a list or ``grid``. More than one value makes the
method a grid search.
"""

import configparser
import logging
import os
from dataclasses import asdict, dataclass, field, replace

from .exception import BenchmarkException, InvalidConfigError
from .models.dataset import SyntheticSpec
from .models.evaluation import GRID_THRESHOLDS, GridPlan, MethodSpec
from .models.graph import METRICS, MODES, SimilarityConfig
from .models.methods import ModelConfig, get_runner
from .unit.trainer import TrainConfig

_logger = logging.getLogger(__name__)

OUTPUT_ENV = 'TABULAR_GNN_OUTPUT'
DEFAULT_OUTPUT = 'results'
METHOD_SECTION = 'method:'
GRID = 'grid'

_TRAIN_KEYS = {
    'max_epochs': int,
    'patience': int,
    'learning_rate': float,
    'batch_size': int,
    'optimizer': str,
    'min_delta': float,
}
_SYNTHETIC_KEYS = {
    'samples': ('samples', int),
    'features': ('features', int),
    'classes': ('classes', int),
    'separation': ('cluster_mean_separation', float),
    'stddev': ('cluster_stddev', float),
}


def default_output():
    """ Output root from ``TABULAR_GNN_OUTPUT``, else ``results`` """
    return os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT


def split_list(value):
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return [str(v).strip() for v in value if str(v).strip()]
    return [part.strip() for part in str(value).split(',') if part.strip()]


def _parse_bool(value):
    value = str(value).strip().lower()
    if value in ('1', 'true', 'yes', 'on'):
        return True
    if value in ('0', 'false', 'no', 'off'):
        return False
    raise InvalidConfigError('%r is not a boolean' % value)


def _convert(key, value, kind):
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise InvalidConfigError('%s: cannot read %r' % (key, value))


def parse_values(key, value, choices=None, grid=None, kind=str):
    """ One value, a comma separated list, or ``grid`` for every choice """
    if value is None:
        return None
    if str(value).strip().lower() == GRID:
        return list(grid)
    values = [_convert(key, part, kind) for part in split_list(value)]
    if not values:
        raise InvalidConfigError('%s is empty' % key)
    if choices is not None:
        unknown = [v for v in values if v not in choices]
        if unknown:
            raise InvalidConfigError(
                '%s: unknown value(s) %s' % (key, ', '.join(unknown)),
            )
    return values


def train_config(options, base=None):
    """ :class:`TrainConfig` from string ``options`` over ``base`` """
    values = asdict(base or TrainConfig())
    for key, kind in _TRAIN_KEYS.items():
        if options.get(key) is not None:
            values[key] = _convert(key, options[key], kind)
    if options.get('patience') is None:
        # inherited patience never exceeds a lowered max_epochs
        values['patience'] = min(values['patience'], values['max_epochs'])
    if options.get('validation_in_graph') is not None:
        values['validation_in_graph'] = _parse_bool(
            options['validation_in_graph'],
        )
    return TrainConfig(**values)


def model_config(options):
    values = {}
    if options.get('hidden'):
        values['hidden'] = tuple(_convert('hidden', h, int)
                                 for h in split_list(options['hidden']))
    for key, kind in (('heads', int), ('output_heads', int),
                      ('embedding_dim', int), ('structure_weight', float),
                      ('normalization', str), ('penalty', str),
                      ('c', float)):
        if options.get(key) is not None:
            values[key] = _convert(key, options[key], kind)
    return ModelConfig(**values)


def method_plan(method, options=None, name=None, train=None):
    """ ``(MethodSpec, GridPlan or None)`` for one configured method

    :param method: Registered method name, such as ``gcn``
    :param options: String options: graph keys, model keys, train keys
    :param name: Key of the method in reports; defaults to its label, or to
        the upper-cased method name for a grid search
    """
    options = dict(options or {})
    method = method.strip().lower()
    runner = get_runner(method)
    train = train_config(options, train)
    model = model_config(options)
    graph_keys = [k for k in ('metric', 'threshold', 'mode', 'scaling')
                  if options.get(k) is not None]
    if not runner.graph_input:
        if graph_keys:
            raise InvalidConfigError(
                '%s does not take %s' % (method, ', '.join(graph_keys)),
            )
        return MethodSpec(method=method, model=model, train=train,
                          name=name), None
    metrics = parse_values('metric', options.get('metric') or 'cosine',
                           METRICS, METRICS)
    thresholds = parse_values('threshold',
                              options.get('threshold') or '0.5',
                              grid=GRID_THRESHOLDS, kind=float)
    modes = parse_values('mode', options.get('mode') or 'weighted', MODES,
                         MODES)
    scaling = options.get('scaling') or 'global'
    graph = SimilarityConfig(metric=metrics[0], threshold=thresholds[0],
                             mode=modes[0], scaling=scaling)
    grid = None
    if len(metrics) * len(thresholds) * len(modes) > 1:
        grid = GridPlan(metrics=metrics, thresholds=thresholds, modes=modes)
        name = name or method.upper()
    spec = MethodSpec(method=method, graph=graph, model=model, train=train,
                      name=name)
    return spec, grid


@dataclass(frozen=True)
class RunConfig(object):
    """ Dataset, methods, seed, output and parallelism of one run

    Exactly one of ``input`` (with ``label``) and ``synthetic`` is set.
    ``jobs`` of 0 or ``None`` uses the physical cores, capped by the task
    count of each batch.
    """

    plans: tuple
    input: str = None
    label: str = None
    synthetic: SyntheticSpec = None
    name: str = None
    seed: int = 0
    out: str = field(default_factory=default_output)
    jobs: int = None
    baselines: tuple = None
    fold_plan: str = None

    def __post_init__(self):
        if not self.plans:
            raise InvalidConfigError('A run needs at least one method')
        if (self.input is None) == (self.synthetic is None):
            raise InvalidConfigError(
                'Give either an input file or a synthetic dataset',
            )
        if self.input is not None and self.label is None:
            raise InvalidConfigError('An input file needs a label column')
        if self.jobs is not None and self.jobs < 0:
            raise InvalidConfigError('jobs must be >= 0')
        keys = [spec.key for spec, _ in self.plans]
        duplicates = sorted(set(k for k in keys if keys.count(k) > 1))
        if duplicates:
            raise InvalidConfigError(
                'Duplicate method names: %s' % ', '.join(duplicates),
            )
        object.__setattr__(self, 'plans', tuple(self.plans))
        if self.baselines is None:
            object.__setattr__(self, 'baselines', tuple(
                spec.key for spec, _ in self.plans if not spec.graph_method
            ))
        else:
            unknown = [b for b in self.baselines if b not in keys]
            if unknown:
                raise InvalidConfigError(
                    'Baselines %s are not configured methods' % unknown,
                )
            object.__setattr__(self, 'baselines', tuple(self.baselines))

    def check_output(self):
        """ Create the output root or fail when it is not writable """
        try:
            if not os.path.isdir(self.out):
                os.makedirs(self.out)
        except OSError as e:
            raise InvalidConfigError(
                'Cannot create output directory %s: %s' % (self.out, e),
            )
        if not os.access(self.out, os.W_OK):
            raise InvalidConfigError('%s is not writable' % self.out)
        return self.out

    def as_dict(self):
        """ Config echo written into the run manifest """
        return {
            'input': self.input,
            'label': self.label,
            'synthetic': asdict(self.synthetic) if self.synthetic else None,
            'name': self.name,
            'seed': self.seed,
            'jobs': self.jobs,
            'baselines': list(self.baselines),
            'fold_plan': self.fold_plan,
            'methods': [
                dict(spec.as_dict(), key=spec.key,
                     grid=asdict(grid) if grid else None)
                for spec, grid in self.plans
            ],
        }


def synthetic_spec(options, seed=0):
    values = {'seed': seed}
    for key, (attr, kind) in _SYNTHETIC_KEYS.items():
        if options.get(key) is not None:
            values[attr] = _convert(key, options[key], kind)
    return SyntheticSpec(**values)


def load_run_config(path, overrides=None):
    """ Read a run configuration file

    :param overrides: Values such as ``seed``, ``jobs`` or ``out`` taking
        precedence over the ``[run]`` section, ``None`` values ignored
    :rtype: RunConfig
    :raises InvalidConfigError: on a missing or malformed file
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        found = parser.read(path, encoding='utf-8')
    except configparser.Error as e:
        raise InvalidConfigError('%s: %s' % (path, e))
    if not found:
        raise InvalidConfigError('Cannot read config file %s' % path)
    if not parser.has_section('run'):
        raise InvalidConfigError('%s lacks a [run] section' % path)
    run = dict(parser.items('run'))
    for key, value in (overrides or {}).items():
        if value is not None:
            run[key] = value
    seed = _convert('seed', run.get('seed', 0), int)
    base_train = train_config(run, TrainConfig(seed=seed))
    plans = []
    for section in parser.sections():
        if not section.startswith(METHOD_SECTION):
            continue
        name = section[len(METHOD_SECTION):].strip()
        options = dict(parser.items(section))
        method = options.pop('method', name)
        try:
            plans.append(method_plan(method, options, name=name,
                                     train=base_train))
        except BenchmarkException as e:
            raise InvalidConfigError('[%s] %s' % (section, e))
    synthetic = None
    if run.get('synthetic') and _parse_bool(run['synthetic']):
        synthetic = synthetic_spec(run, seed)
    baselines = split_list(run['baselines']) if 'baselines' in run \
        else None
    jobs = None
    if run.get('jobs') is not None:
        jobs = _convert('jobs', run['jobs'], int)
    _logger.debug('Loaded %d method(s) from %s', len(plans), path)
    return RunConfig(
        plans=tuple(plans),
        input=run.get('input'),
        label=run.get('label'),
        synthetic=synthetic,
        name=run.get('name'),
        seed=seed,
        out=run.get('out') or default_output(),
        jobs=jobs,
        baselines=tuple(baselines) if baselines is not None else None,
        fold_plan=run.get('fold_plan'),
    )


def _method_from_record(record):
    try:
        model = dict(record['model'])
        if model.get('hidden') is not None:
            model['hidden'] = tuple(model['hidden'])
        graph = record.get('graph')
        spec = MethodSpec(
            method=record['method'],
            graph=SimilarityConfig(**graph) if graph else None,
            model=ModelConfig(**model),
            train=TrainConfig(**record['train']),
        )
        if record['key'] != spec.label:
            spec = replace(spec, name=record['key'])
        grid = GridPlan(**record['grid']) if record.get('grid') else None
    except (KeyError, TypeError) as e:
        raise InvalidConfigError('Unreadable method record: %s' % e)
    return spec, grid


def run_config_from_manifest(manifest, overrides=None):
    """ Rebuild the :class:`RunConfig` echoed into a run manifest

    :param manifest: Decoded ``manifest.json`` of a run
    :param overrides: ``out`` and ``jobs`` taking precedence, ``None``
        values ignored; every other value comes from the manifest
    :rtype: RunConfig
    :raises InvalidConfigError: when the manifest lacks its config echo
    """
    echo = manifest.get('config') if isinstance(manifest, dict) else None
    if not isinstance(echo, dict) or not echo.get('methods'):
        raise InvalidConfigError('The manifest holds no run configuration')
    overrides = dict((k, v) for k, v in (overrides or {}).items()
                     if v is not None)
    baselines = echo.get('baselines')
    synthetic = echo.get('synthetic')
    try:
        synthetic = SyntheticSpec(**synthetic) if synthetic else None
    except TypeError as e:
        raise InvalidConfigError('Unreadable synthetic record: %s' % e)
    return RunConfig(
        plans=tuple(_method_from_record(r) for r in echo['methods']),
        input=echo.get('input'),
        label=echo.get('label'),
        synthetic=synthetic,
        name=echo.get('name'),
        seed=echo.get('seed', 0),
        out=overrides.get('out') or default_output(),
        jobs=overrides.get('jobs', echo.get('jobs')),
        baselines=tuple(baselines) if baselines is not None else None,
        fold_plan=echo.get('fold_plan'),
    )
