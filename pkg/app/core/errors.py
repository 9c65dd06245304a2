"""Error hierarchy shared by the services, the HTTP surface and the CLI.

Every error knows the HTTP status the API answers with and the exit code the
CLI terminates with, so neither surface needs its own mapping table.
"""


class NetcodeError(Exception):
    status_code: int = 500
    exit_code: int = 1

    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


class UsageError(NetcodeError, ValueError):
    """Shape, field or argument mismatch at an API boundary."""

    status_code = 400
    exit_code = 2


class FieldDomainError(NetcodeError, ZeroDivisionError):
    """Operation undefined on the given field element (inverse of zero)."""

    status_code = 400
    exit_code = 2


class ConfigError(NetcodeError):
    status_code = 422
    exit_code = 2


class CapacityError(NetcodeError):
    """A desk-scale budget (enumeration, decoding, leakage) would be exceeded."""

    status_code = 413
    exit_code = 3


class InternalError(NetcodeError):
    """An invariant the harness relies on was violated."""

    status_code = 500
    exit_code = 1


class ResultsWriteError(NetcodeError):
    status_code = 500
    exit_code = 1
