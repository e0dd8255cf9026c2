# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

{
    'name': 'Tabular GNN Benchmark',
    'summary': 'Similarity graphs and graph neural networks for tabular data',
    'version': '1.0.0',
    'category': 'Benchmark',
    'author': "LasLabs",
    'license': 'AGPL-3',
    'website': 'https://laslabs.com',
    "external_dependencies": {
        "python": [
            'numpy',
            'scipy',
            'sklearn',
            'pandas',
            'joblib',
        ],
    },
    'installable': True,
}
