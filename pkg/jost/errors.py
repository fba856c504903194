from typing import Any, Dict, Optional


class JostError(Exception):
    """Базовая ошибка вычислений: сообщение плюс диагностический payload"""

    def __init__(self, message: str, payload: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.payload = payload or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "detail": self.message,
            "payload": self.payload,
        }


class DomainError(JostError, ValueError):
    """Аргумент вне области определения (z = 0 для n_l, k = 0 при l >= 1 и т.п.)"""


class RangeError(JostError, OverflowError):
    """Результат не представим в double"""


class PreconditionError(JostError, ValueError):
    """Нарушено предусловие операции"""


class ClassificationError(JostError):
    """Нуль вне классификации bound / virtual / resonant"""


class IntegrationError(JostError):
    """Отказ интегратора ОДУ"""


class DerivativeError(JostError):
    """Производная по k не сошлась"""


class ContourError(JostError):
    """Не удалось посчитать индекс контура"""


class NewtonError(JostError):
    """Итерации Ньютона разошлись"""


class MultipleZeroError(JostError):
    """Подозрение на кратный нуль"""


class DegenerateZeroError(JostError):
    """Вырожденный случай: f_l(-k0) = 0 или нулевая псевдонорма"""


class RegularizationError(JostError):
    """Регуляризованная последовательность не сходится"""
