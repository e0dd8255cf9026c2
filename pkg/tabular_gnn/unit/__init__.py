# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

from . import csv_adapter
from . import mapper
from . import batch_runner
from . import trainer
from . import exporter
