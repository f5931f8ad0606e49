"""Typed exceptions raised at the binding boundary.

Native errors never cross raw: they are re-raised as the matching binding
exception carrying the native message.
"""

from __future__ import annotations

from contextlib import contextmanager

from ecomarl.core import errors as native


class BindingError(Exception):
    """Base class for errors surfaced through the binding."""


class BindingConfigurationError(BindingError):
    pass


class BindingActionError(BindingError):
    pass


class BindingLifecycleError(BindingError):
    pass


_MAP = {
    native.ConfigurationError: BindingConfigurationError,
    native.ActionError: BindingActionError,
    native.LifecycleError: BindingLifecycleError,
}


@contextmanager
def translate_native_errors():
    try:
        yield
    except native.EcomarlError as exc:
        wrapped = _MAP.get(type(exc), BindingError)
        raise wrapped(str(exc)) from None
