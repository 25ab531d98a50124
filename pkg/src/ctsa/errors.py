"""Exception hierarchy shared by every module.

Each exception carries a short machine-readable ``code`` which the CLI
prints as ``error: <code>: <message>``.
"""


class CtsaError(Exception):
    code = "error"


class DomainError(CtsaError, ValueError):
    code = "domain"


class DegenerateBasisError(CtsaError, ValueError):
    code = "degenerate-basis"


class FitError(CtsaError, RuntimeError):
    code = "fit"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class UnsupportedOperationError(CtsaError, TypeError):
    code = "unsupported"


class IngestError(CtsaError, ValueError):
    code = "ingest"


class StoreError(CtsaError, ValueError):
    code = "store"


class ParseError(CtsaError, ValueError):
    code = "parse"

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class EvaluationError(CtsaError, ValueError):
    code = "eval"


class UnboundedGuaranteeError(CtsaError, ArithmeticError):
    code = "unbounded-guarantee"


class UnknownSeriesError(EvaluationError, KeyError):
    code = "unknown-series"

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class MissingRawError(EvaluationError):
    code = "missing-raw"


class CsvParseError(IngestError):
    code = "csv-parse"

    def __init__(self, message, line):
        super().__init__(f"line {line}: {message}")
        self.line = line
