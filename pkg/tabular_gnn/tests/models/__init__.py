# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

from . import test_dataset
from . import test_graph

from . import test_tensor
from . import test_layers
from . import test_gcn
from . import test_gat
from . import test_gate
from . import test_baseline

from . import test_metrics
from . import test_methods
from . import test_evaluation
