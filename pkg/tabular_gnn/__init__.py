# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import ast
import os


def _read_manifest():
    """ Literal-evaluate the ``__manifest__.py`` that ships with the package
    :rtype: dict
    """
    path = os.path.join(os.path.dirname(__file__), '__manifest__.py')
    with open(path) as manifest:
        return ast.literal_eval(manifest.read())


MANIFEST = _read_manifest()
__version__ = MANIFEST['version']

from . import exception  # noqa: E402
from . import backend  # noqa: E402
from . import models  # noqa: E402
from . import unit  # noqa: E402
from . import config  # noqa: E402
