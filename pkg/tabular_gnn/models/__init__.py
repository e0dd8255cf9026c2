# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

# Data
from . import dataset
from . import graph

# Networks
from . import tensor
from . import layers
from . import gcn
from . import gat
from . import gate
from . import baseline

# Evaluation
from . import metrics
from . import methods
from . import evaluation
