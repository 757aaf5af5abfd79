"""Exception hierarchy shared by every fracvar module."""


class FracvarError(Exception):
    """Base class; the CLI maps any subclass to exit code 1."""


class DomainError(FracvarError, ValueError):
    """A parameter lies outside its admissible range (e.g. H not in (0, 1))."""


class LengthError(FracvarError, ValueError):
    """Input sequence too short for the requested operation."""


class MalformedFilterError(FracvarError, ValueError):
    pass


class ShapeError(FracvarError, ValueError):
    pass


class DegenerateDataError(FracvarError, ValueError):
    """The data admit no estimate, e.g. a zero quadratic variation."""


class FamilyDesignError(FracvarError, ValueError):
    """A filter family / regression design cannot identify the target."""


class ScopeError(FracvarError, ValueError):
    """A limit theorem's hypothesis is violated for the requested quantity."""


class NumericalError(FracvarError, ArithmeticError):
    pass


class SettingError(FracvarError, ValueError):
    pass
