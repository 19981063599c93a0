"""Exception hierarchy shared by all modules."""


class WBergmanError(Exception):
    """Base class for every error raised by the package."""


class InvalidArgument(WBergmanError, ValueError):
    pass


class InvalidSpec(WBergmanError, ValueError):
    pass


class WeightSyntaxError(WBergmanError, ValueError):
    """Malformed weight expression; ``offset`` is the byte offset of the fault."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class WeightDomainError(WBergmanError, ArithmeticError):
    """A weight evaluated to a non-positive or non-finite value at ``point``."""

    def __init__(self, message, point=None):
        if point is not None:
            message = f"{message} at z={_fmt_point(point)}"
        super().__init__(message)
        self.point = point


class IntegrationError(WBergmanError, ArithmeticError):
    def __init__(self, message, node=None):
        if node is not None:
            message = f"{message} at node z={_fmt_point(node)}"
        super().__init__(message)
        self.node = node


def _fmt_point(z):
    try:
        return "(" + ", ".join(f"{complex(c):.6g}" for c in z) + ")"
    except TypeError:
        return repr(z)
