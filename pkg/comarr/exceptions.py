"""
Exception hierarchy for comarr
Each error carries the process exit code the CLI reports for it
"""

from typing import Optional


class ComArrError(Exception):
    """Base class for all comarr errors"""

    exit_code = 1


class InvalidInputError(ComArrError, ValueError):
    """Bad flags, malformed files, or inputs outside an operation's domain"""

    exit_code = 2


class ResourceLimitError(ComArrError):
    """A desk-scale guard refused the job (hyperplane/cell limits, sampling budget)"""

    exit_code = 3


class PropertyTestFailure(ComArrError):
    """A property run found counterexamples"""

    exit_code = 4


class OracleDisagreement(ComArrError):
    """The rational-rank oracle disagrees with the cellular model of an inclusion"""

    exit_code = 5


class NonFreeActionError(ComArrError):
    """
    The symmetric group fixed a cell. On arrangements containing the braid
    arrangement this cannot happen, so it signals a construction bug.
    """

    def __init__(self, message: str, cell: Optional[str] = None):
        super().__init__(message)
        self.cell = cell
