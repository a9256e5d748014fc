"""Exception hierarchy shared by every analysis.

All of them derive from ``ChopperError`` so callers (and the CLI) can tell
bad input apart from bugs.
"""
from typing import Optional


class ChopperError(Exception):
    """Base class for user-facing errors"""


class ParseError(ChopperError):
    pass


class SchemaError(ChopperError):
    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class UnknownFormat(ChopperError):
    def __init__(self, index: int, source: object):
        self.index = index
        self.source = source
        super().__init__(f"Cannot detect profile format of source #{index} ({source!r})")


class UnknownMetric(ChopperError, KeyError):
    def __init__(self, metric: str, run: Optional[str] = None):
        self.metric = metric
        self.run = run
        where = f" in run {run!r}" if run else ""
        super().__init__(f"Unknown metric {metric!r}{where}")

    def __str__(self):
        return self.args[0]


class UnknownNode(ChopperError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else "Unknown node"


class NotATree(ChopperError):
    pass


class InvalidThreshold(ChopperError, ValueError):
    pass


class InsufficientData(ChopperError, ValueError):
    pass


class DegenerateFit(ChopperError, ValueError):
    pass


class InvalidArity(ChopperError, ValueError):
    pass


class UnsupportedCombination(ChopperError, ValueError):
    pass


class DuplicateExecId(ChopperError, ValueError):
    pass
