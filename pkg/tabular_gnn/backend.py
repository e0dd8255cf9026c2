# -*- coding: utf-8 -*-
# Copyright 2026 LasLabs Inc.
# License AGPL-3.0 or later (http://www.gnu.org/licenses/agpl.html).

import logging

from .exception import InvalidConfigError

_logger = logging.getLogger(__name__)


class Backend(object):
    """ Registry of units keyed by method name.

    Units are registered by decorating the class with the backend instance.
    A unit declares the method names it serves in ``_method_name``::

        @benchmark
        class GCNRunner(MethodRunner):
            _method_name = 'gcn'
    """

    def __init__(self, name):
        self.name = name
        self._units = []

    def __call__(self, cls):
        self.register_class(cls)
        return cls

    def __repr__(self):
        return '<Backend %r>' % self.name

    def register_class(self, cls):
        """ Register a unit class on the backend
        :param cls: Unit class declaring ``_method_name``
        :type cls: type
        """
        names = cls._method_name
        if not names:
            raise InvalidConfigError(
                '%s must declare a _method_name' % cls.__name__,
            )
        _logger.debug('Registering %s on %s', cls.__name__, self)
        self._units.append(cls)

    def method_names(self, base_class):
        """ Return the sorted method names served by ``base_class`` units
        :rtype: list
        """
        names = set()
        for cls in self._units:
            if issubclass(cls, base_class):
                names.update(self._names_for(cls))
        return sorted(names)

    def get_class(self, base_class, method_name):
        """ Find the unit serving ``method_name`` that subclasses ``base_class``
        :param base_class: Unit parent class to search for
        :param method_name: Name of the method, such as ``gcn``
        :type method_name: str
        :rtype: type
        """
        for cls in self._units:
            if not issubclass(cls, base_class):
                continue
            if method_name in self._names_for(cls):
                return cls
        raise InvalidConfigError(
            'No %s is registered for method %r on %s' % (
                base_class.__name__, method_name, self,
            )
        )

    @staticmethod
    def _names_for(cls):
        names = cls._method_name
        if isinstance(names, str):
            return [names]
        return list(names)


benchmark = Backend('benchmark')
