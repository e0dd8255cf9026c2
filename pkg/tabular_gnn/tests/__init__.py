# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

from . import test_backend
from . import test_config

from . import test_csv_adapter
from . import test_mapper
from . import test_batch_runner
from . import test_trainer
from . import test_exporter

from . import test_cli

from .models import *
