"""Exception hierarchy shared by all fusionlab modules."""

from __future__ import annotations


class FusionError(Exception):
    """Base class for every domain error raised by this package."""


class NegativeExponentError(FusionError):
    def __init__(self, exponent: int):
        super().__init__(f"exponent evaluates to {exponent}, must be >= 0")
        self.exponent = exponent


class UnknownDimensionError(FusionError):
    def __init__(self, label: str):
        super().__init__(f"no dimensions available for label {label!r}")
        self.label = label


class EmptyLevelError(FusionError):
    def __init__(self, level: int):
        super().__init__(f"no definition fires at level {level}")
        self.level = level


class UndefinedLabelError(FusionError):
    def __init__(self, label: str, level: int):
        super().__init__(f"child label {label!r} is not defined at level {level - 1}")
        self.label = label
        self.level = level


class InvalidRepeatError(FusionError):
    def __init__(self, label: str, level: int, value: int):
        super().__init__(
            f"repeat for a placement in {label!r} at level {level} "
            f"evaluates to {value}, must be >= 1"
        )
        self.label = label
        self.level = level
        self.value = value


class InvalidRangeError(FusionError):
    def __init__(self, n: int, m: int):
        super().__init__(f"invalid level range: need 0 <= from <= to, got from={n} to={m}")
        self.from_level = n
        self.to_level = m


class ExpansionTooLargeError(FusionError):
    def __init__(self, predicted: int, cap: int):
        super().__init__(f"expansion needs {predicted} cells, budget allows {cap}")
        self.predicted = predicted
        self.cap = cap


class OverlapError(FusionError):
    """Two placed children claim the same cell."""

    def __init__(self, first_child: int, second_child: int, cell: tuple[int, int]):
        super().__init__(
            f"children #{first_child} and #{second_child} overlap at cell {cell}"
        )
        self.first_child = first_child
        self.second_child = second_child
        self.cell = cell


class DisconnectedError(FusionError):
    """An expanded patch splits into several edge-connected components."""

    def __init__(self, component_sizes: tuple[int, ...]):
        super().__init__(
            "patch is not edge-connected; component sizes "
            + ", ".join(str(s) for s in component_sizes)
        )
        self.component_sizes = component_sizes


class ParseError(FusionError):
    """Raised by the rule parser; carries ParseDiagnostic objects."""

    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        first = self.diagnostics[0] if self.diagnostics else None
        super().__init__(str(first) if first else "parse failed")


class ValidationError(FusionError):
    """Raised when a syntactically valid rule fails semantic validation."""

    def __init__(self, diagnostics):
        self.diagnostics = tuple(diagnostics)
        msg = "; ".join(str(d) for d in self.diagnostics) or "validation failed"
        super().__init__(msg)
