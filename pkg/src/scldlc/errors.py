"""Exception types shared across the package."""


class ScldlcError(Exception):
    """Base class for all package errors."""


class ParameterError(ScldlcError, ValueError):
    """A parameter violates its documented range or consistency rule."""


class ConstructionError(ScldlcError, RuntimeError):
    """A randomized graph construction exhausted its retry budget."""


class BracketError(ScldlcError, RuntimeError):
    """A threshold bracket could not be validated even after widening."""
