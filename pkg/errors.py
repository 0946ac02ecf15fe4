# -*- coding: utf-8 -*-
"""
Errores y advertencias comunes a todos los módulos de la simulación.

Todas las excepciones de la biblioteca heredan de ``ProtocolError`` para que la
línea de comandos pueda capturarlas en un solo punto y devolver un código de
salida distinto de cero.
"""


class ProtocolError(Exception):
    """Error base de la simulación."""


class TruncationTooSmall(ProtocolError):
    """
    La dimensión de truncamiento no alcanza para representar el estado.

    Guarda el mensaje sin detalle (``detail``), la dimensión usada (``dim``) y,
    cuando se puede calcular, la dimensión mínima sugerida (``minimum``).
    """

    def __init__(self, message: str, dim: int, minimum: int | None = None):
        self.detail = message
        self.dim = dim
        self.minimum = minimum
        detalle = f"dim={dim}"
        if minimum is not None:
            detalle += f", minimo sugerido={minimum}"
        super().__init__(f"{message} ({detalle})")


class DimensionMismatch(ProtocolError, ValueError):
    pass


class AllMassRemoved(ProtocolError):
    """La resta de fotones eliminaría toda la masa del estado."""


class LowComponentMass(ProtocolError):
    """El estado tiene componentes de Fock bajas que invalidan la resta ideal."""


class ZeroMeanPhoton(ProtocolError, ZeroDivisionError):
    pass


class DiagonalizationFailure(ProtocolError):
    pass


class ConfigInvalid(ProtocolError, ValueError):
    pass


class IoFailure(ProtocolError, OSError):
    pass


# Advertencias: se emiten con warnings.warn y terminan en ProtocolResult.warnings
class TruncationWarning(UserWarning):
    pass


class NegativeArgumentWarning(UserWarning):
    pass
