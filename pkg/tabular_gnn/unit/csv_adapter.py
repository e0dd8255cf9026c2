# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import io
import json
import logging
import os
import tempfile

import numpy as np

from ..exception import InvalidDataError

_logger = logging.getLogger(__name__)

try:
    import pandas as pd
except ImportError:
    _logger.warning('Cannot import pandas')


class CsvAdapter(object):
    """ File adapter for tables, fold plans and result artifacts

    Every write goes to a temporary file in the target directory which is
    then renamed over the target, so readers never see partial files.
    """

    READ_EXCEPTIONS = (
        IOError,
        OSError,
    )

    def __init__(self, encoding='utf-8'):
        self.encoding = encoding

    def read(self, path, comment=None):
        """ Read a comma separated file with a header row
        :param path: Path of the file
        :param comment: Leading character of lines to skip
        :rtype: :class:`pandas.DataFrame`
        """
        if not os.path.isfile(path):
            raise InvalidDataError('%s does not exist' % path)
        try:
            return pd.read_csv(
                path,
                sep=',',
                comment=comment,
                encoding=self.encoding,
                skipinitialspace=True,
            )
        except pd.errors.EmptyDataError:
            raise InvalidDataError('%s is empty' % path)
        except pd.errors.ParserError as e:
            raise InvalidDataError('%s: %s' % (path, e))
        except self.READ_EXCEPTIONS as e:
            raise InvalidDataError('%s cannot be read: %s' % (path, e))

    def read_first_line(self, path):
        if not os.path.isfile(path):
            raise InvalidDataError('%s does not exist' % path)
        with io.open(path, encoding=self.encoding) as fh:
            return fh.readline().rstrip('\r\n')

    def read_json_lines(self, path):
        """ Read line-delimited JSON records
        :rtype: list
        """
        if not os.path.isfile(path):
            raise InvalidDataError('%s does not exist' % path)
        with io.open(path, encoding=self.encoding) as fh:
            return [json.loads(line) for line in fh if line.strip()]

    def read_json(self, path):
        if not os.path.isfile(path):
            raise InvalidDataError('%s does not exist' % path)
        with io.open(path, encoding=self.encoding) as fh:
            try:
                return json.load(fh)
            except ValueError as e:
                raise InvalidDataError('%s: %s' % (path, e))

    @staticmethod
    def to_numeric(frame, path='<frame>'):
        """ Parse every cell of ``frame`` as a finite real

        The first offending cell is reported with its 1-based data row and
        its column name.

        :rtype: numpy.ndarray
        """
        columns = []
        for column in frame.columns:
            raw = frame[column]
            parsed = pd.to_numeric(raw, errors='coerce')
            bad = parsed.isna().to_numpy() | ~np.isfinite(
                parsed.to_numpy(dtype=np.float64, na_value=np.nan)
            )
            if bad.any():
                row = int(np.flatnonzero(bad)[0])
                raise InvalidDataError(
                    '%s: cannot parse %r at row %d, column %r' % (
                        path, raw.iloc[row], row + 1, column,
                    )
                )
            columns.append(parsed.to_numpy(dtype=np.float64))
        return np.column_stack(columns)

    @staticmethod
    def encode_labels(series):
        """ Dense integer codes in order of first appearance
        :rtype: tuple of (numpy.ndarray, numpy.ndarray)
        """
        codes, uniques = pd.factorize(series, sort=False)
        return codes, np.asarray(uniques)

    @staticmethod
    def stem(path):
        return os.path.splitext(os.path.basename(path))[0]

    def write_text(self, path, text):
        """ Atomically replace ``path`` with ``text`` """
        directory = os.path.dirname(os.path.abspath(path))
        if not os.path.isdir(directory):
            os.makedirs(directory)
        handle, temp_path = tempfile.mkstemp(
            prefix='.%s.' % os.path.basename(path), dir=directory,
        )
        try:
            with io.open(handle, 'w', encoding=self.encoding,
                         newline='') as fh:
                fh.write(text)
            os.replace(temp_path, path)
        except BaseException:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise
        _logger.debug('Wrote %s', path)
        return path

    def write_frame(self, path, frame, float_format=None):
        """ Atomically write a data frame as CSV without its index """
        text = frame.to_csv(index=False, float_format=float_format,
                            lineterminator='\n')
        return self.write_text(path, text)

    def write_records(self, path, records, columns, float_format=None):
        """ Write mapped records as CSV with the given column order """
        frame = pd.DataFrame.from_records(list(records), columns=columns)
        return self.write_frame(path, frame, float_format=float_format)

    def write_json(self, path, payload):
        text = json.dumps(payload, indent=2, sort_keys=True) + '\n'
        return self.write_text(path, text)

    def write_json_lines(self, path, records):
        text = ''.join(
            json.dumps(record, sort_keys=True) + '\n' for record in records
        )
        return self.write_text(path, text)
