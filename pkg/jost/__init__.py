"""Функция Йоста, ее нули и псевдонормы состояний"""

from .errors import (
    JostError, DomainError, RangeError, PreconditionError, ClassificationError,
    IntegrationError, DerivativeError, ContourError, NewtonError,
    MultipleZeroError, DegenerateZeroError, RegularizationError
)

__version__ = "1.0.0"

__all__ = [
    'JostError', 'DomainError', 'RangeError', 'PreconditionError', 'ClassificationError',
    'IntegrationError', 'DerivativeError', 'ContourError', 'NewtonError',
    'MultipleZeroError', 'DegenerateZeroError', 'RegularizationError',
    '__version__'
]
