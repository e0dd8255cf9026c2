# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import sys

from .cli import main

sys.exit(main())
