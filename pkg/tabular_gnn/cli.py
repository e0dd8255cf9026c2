# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

"""
Command line entry point: ``python -m tabular_gnn <command>``.

Commands are ``synth``, ``build-graph``, ``benchmark`` and ``report``.
Exit codes are 0 on success, 1 on a usage or configuration error, 2 on a
data error and 3 when every configured run failed.
"""

import argparse
import logging
import os
import sys

from . import __version__, MANIFEST
from .config import (OUTPUT_ENV,
                     RunConfig,
                     default_output,
                     load_run_config,
                     method_plan,
                     run_config_from_manifest,
                     split_list,
                     synthetic_spec,
                     )
from .exception import (BenchmarkException,
                        InvalidConfigError,
                        InvalidDataError,
                        NoSuccessfulFoldError,
                        )
from .models.dataset import (content_hash,
                             fold_plan_hash,
                             generate_synthetic,
                             import_fold_plan,
                             load_csv,
                             scale_features,
                             stratified_kfold,
                             summarize,
                             )
from .models.evaluation import run_benchmark
from .models.methods import get_runner
from .models.graph import (METRICS,
                           MODES,
                           SCALINGS,
                           SimilarityConfig,
                           build_graph,
                           export_dense,
                           export_edge_list,
                           stats_json,
                           )
from .unit.csv_adapter import CsvAdapter
from .unit.exporter import RunExporter, consolidate

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_FAILED = 3


class UsageError(InvalidConfigError):
    """ The command line cannot be parsed """


class ArgumentParser(argparse.ArgumentParser):

    def error(self, message):
        raise UsageError('%s: %s' % (self.prog, message))


def _global_options():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--seed', type=int, default=None,
                        help='Seed of every random draw (default 0)')
    parent.add_argument('--jobs', type=int, default=None,
                        help='Worker processes; 0 uses every physical core')
    parent.add_argument('--out', default=None,
                        help='Output location; defaults below $%s '
                             '(or ./results)' % OUTPUT_ENV)
    verbosity = parent.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true',
                           help='Log debug messages')
    verbosity.add_argument('-q', '--quiet', action='store_true',
                           help='Log warnings and errors only')
    return parent


def _synthetic_options(parser):
    parser.add_argument('--samples', type=int, default=200)
    parser.add_argument('--features', type=int, default=5)
    parser.add_argument('--classes', type=int, default=4)
    parser.add_argument('--separation', type=float, default=6.0,
                        help='Minimum distance between cluster means')
    parser.add_argument('--stddev', type=float, default=1.0)


def _graph_options(parser, grid=False):
    suffix = ' or "grid"' if grid else ''
    parser.add_argument('--metric', default=None,
                        help='%s%s' % ('|'.join(METRICS), suffix))
    parser.add_argument('--threshold', default=None,
                        help='Similarity threshold in [0, 1]%s' % suffix)
    parser.add_argument('--mode', default=None,
                        help='%s%s' % ('|'.join(MODES), suffix))
    parser.add_argument('--scaling', default=None, choices=SCALINGS,
                        help='Euclidean distance scaling (default global)')


def build_parser():
    parent = _global_options()
    parser = ArgumentParser(
        prog='tabular_gnn',
        description='Benchmark graph neural networks on tabular data. '
                    'Output defaults to $%s when set.' % OUTPUT_ENV,
    )
    parser.add_argument('--version', action='version',
                        version='%s %s' % (MANIFEST['name'], __version__))
    commands = parser.add_subparsers(dest='command',
                                     parser_class=ArgumentParser)
    commands.required = True

    synth = commands.add_parser('synth', parents=[parent],
                                help='Write the synthetic dataset as CSV')
    _synthetic_options(synth)

    graph = commands.add_parser('build-graph', parents=[parent],
                                help='Write the similarity graph of a CSV')
    graph.add_argument('--input', required=True)
    graph.add_argument('--label', required=True,
                       help='Label column name or position')
    _graph_options(graph)
    graph.add_argument('--dense', action='store_true',
                       help='Write the full matrix instead of an edge list')

    bench = commands.add_parser('benchmark', parents=[parent],
                                help='Cross-validate methods on a dataset')
    bench.add_argument('--config', help='Run configuration file')
    bench.add_argument('--manifest',
                       help='manifest.json of an earlier run to repeat')
    bench.add_argument('--input')
    bench.add_argument('--label')
    bench.add_argument('--synthetic', action='store_true',
                       help='Benchmark the synthetic dataset')
    _synthetic_options(bench)
    bench.add_argument('--methods', default='lr',
                       help='Comma separated methods, such as lr,mlp,gcn')
    _graph_options(bench, grid=True)
    bench.add_argument('--name', help='Run directory name')
    bench.add_argument('--baselines',
                       help='Comma separated baseline method names')
    bench.add_argument('--fold-plan', help='Fold plan CSV to reuse')
    bench.add_argument('--max-epochs', type=int)
    bench.add_argument('--patience', type=int)
    bench.add_argument('--learning-rate', type=float)

    report = commands.add_parser('report', parents=[parent],
                                 help='Merge run summaries into one table')
    report.add_argument('--runs', nargs='+', required=True,
                        help='Run directories')
    return parser


def _configure_logging(args):
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(
        level=level,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )


def _output_root(args):
    return args.out or default_output()


def _seed(args):
    return 0 if args.seed is None else args.seed


def cmd_synth(args):
    """ Write the synthetic dataset, header ``f0..f{d-1},label`` """
    spec = synthetic_spec(vars(args), seed=_seed(args))
    table = generate_synthetic(spec)
    path = args.out or os.path.join(default_output(), 'synthetic.csv')
    columns = list(table.feature_names) + ['label']
    records = [
        list(row) + [int(label)]
        for row, label in zip(table.features.tolist(), table.labels)
    ]
    try:
        CsvAdapter().write_records(path, records, columns)
    except (IOError, OSError) as e:
        raise InvalidConfigError('Cannot write %s: %s' % (path, e))
    _logger.info('Wrote %d rows to %s', table.n_samples, path)
    return EXIT_OK


def _similarity_config(args):
    return SimilarityConfig(
        metric=args.metric or 'cosine',
        threshold=args.threshold if args.threshold is not None else 0.5,
        mode=args.mode or 'weighted',
        scaling=args.scaling or 'global',
    )


def cmd_build_graph(args):
    """ Write the graph of every row; print its statistics as JSON """
    config = _similarity_config(args)
    table = scale_features(load_csv(args.input, args.label))
    adjacency = build_graph(table, config)
    path = args.out or os.path.join(
        default_output(),
        '%s_%s_%s.csv' % (table.name, config.code, config.threshold),
    )
    if args.dense:
        export_dense(adjacency, path)
    else:
        export_edge_list(adjacency, path)
    sys.stdout.write(stats_json(adjacency) + '\n')
    return EXIT_OK


def _inline_run_config(args):
    if args.synthetic == bool(args.input):
        raise UsageError('Give either --input with --label or --synthetic')
    options = {
        'metric': args.metric,
        'threshold': args.threshold,
        'mode': args.mode,
        'scaling': args.scaling,
        'max_epochs': args.max_epochs,
        'patience': args.patience,
        'learning_rate': args.learning_rate,
    }
    plans = []
    for method in split_list(args.methods):
        method_options = dict(options)
        if not get_runner(method.lower()).graph_input:
            for key in ('metric', 'threshold', 'mode', 'scaling'):
                method_options.pop(key)
        plans.append(method_plan(method, method_options))
    baselines = split_list(args.baselines) if args.baselines else None
    return RunConfig(
        plans=tuple(plans),
        input=args.input,
        label=args.label,
        synthetic=synthetic_spec(vars(args), seed=_seed(args))
        if args.synthetic else None,
        name=args.name,
        seed=_seed(args),
        out=_output_root(args),
        jobs=args.jobs,
        baselines=tuple(baselines) if baselines is not None else None,
        fold_plan=args.fold_plan,
    )


def _recorded_manifest(args):
    if not args.manifest:
        return None
    if args.config:
        raise UsageError('Give either --config or --manifest')
    return CsvAdapter().read_json(args.manifest)


def _run_config(args, recorded=None):
    if recorded is not None:
        return run_config_from_manifest(recorded, {
            'jobs': args.jobs,
            'out': args.out,
        })
    if args.config:
        return load_run_config(args.config, {
            'seed': args.seed,
            'jobs': args.jobs,
            'out': args.out,
            'name': args.name,
        })
    return _inline_run_config(args)


def _load_table(config):
    if config.synthetic is not None:
        return generate_synthetic(config.synthetic)
    return load_csv(config.input, config.label)


def _check_provenance(recorded, manifest):
    """ Refuse to repeat a run on other data or other folds """
    dataset = recorded.get('dataset') or {}
    if dataset.get('hash') != manifest['dataset']['hash']:
        raise InvalidDataError(
            'The dataset differs from the one of the recorded run',
        )
    if recorded.get('fold_plan_hash') != manifest['fold_plan_hash']:
        raise InvalidDataError(
            'The fold plan differs from the one of the recorded run',
        )


def cmd_benchmark(args):
    """ Cross-validate the configured methods and export the run

    With ``--manifest`` the run recorded in that manifest is repeated on
    the same dataset and folds.
    """
    recorded = _recorded_manifest(args)
    config = _run_config(args, recorded)
    config.check_output()
    table = _load_table(config)
    if config.fold_plan:
        plan = import_fold_plan(config.fold_plan)
        if plan.assignments.size != table.n_samples:
            raise InvalidDataError(
                '%s covers %d rows, %s has %d' % (
                    config.fold_plan, plan.assignments.size, table.name,
                    table.n_samples,
                )
            )
    else:
        plan = stratified_kfold(table, seed=config.seed)
    summary = summarize(table)
    manifest = {
        'tool': MANIFEST['name'],
        'version': __version__,
        'seed': config.seed,
        'config': config.as_dict(),
        'dataset': dict(summary._asdict(), hash=content_hash(table),
                        class_counts=list(summary.class_counts)),
        'fold_plan_hash': fold_plan_hash(plan),
    }
    if recorded is not None:
        _check_provenance(recorded, manifest)
    run = run_benchmark(
        table, plan, config.plans,
        baselines=config.baselines,
        seed=config.seed,
        jobs=config.jobs,
        manifest=manifest,
    )
    run_dir = os.path.join(config.out, config.name or table.name)
    RunExporter(run_dir).export(run, plan)
    if run.failed:
        raise NoSuccessfulFoldError('Every configured method failed')
    return EXIT_OK


def cmd_report(args):
    """ Print the consolidated methods × datasets table as CSV """
    frame = consolidate(args.runs)
    text = frame.to_csv(index=False, lineterminator='\n')
    if args.out:
        CsvAdapter().write_text(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    'synth': cmd_synth,
    'build-graph': cmd_build_graph,
    'benchmark': cmd_benchmark,
    'report': cmd_report,
}


def exit_code(error):
    """ Exit code of a :class:`BenchmarkException` """
    if isinstance(error, NoSuccessfulFoldError):
        return EXIT_FAILED
    if isinstance(error, InvalidConfigError):
        return EXIT_USAGE
    return EXIT_DATA


def main(argv=None):
    """ Run one command
    :rtype: int
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except BenchmarkException as e:
        sys.stderr.write('%s\n' % e)
        return EXIT_USAGE
    except SystemExit as e:
        return EXIT_OK if not e.code else EXIT_USAGE
    _configure_logging(args)
    try:
        return COMMANDS[args.command](args)
    except BenchmarkException as e:
        _logger.error('%s', e)
        return exit_code(e)
