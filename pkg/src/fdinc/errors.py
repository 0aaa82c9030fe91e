"""Exception hierarchy for fdinc."""


class FdincError(Exception):
    """Base class for all fdinc errors."""


class DataError(FdincError):
    """Problems with input data (ingestion, schema, size guards)."""


class IngestError(DataError):
    """Malformed CSV input: ragged rows, empty file, duplicate header names."""


class SchemaMismatchError(DataError):
    """A delta batch does not match the base relation's schema."""


class SizeGuardError(DataError):
    """A brute-force oracle was asked to run beyond its size guard."""


class StateError(FdincError):
    """Problems with a persisted state directory (missing, corrupt, locked)."""


class StalenessError(FdincError):
    """A transversal store was resumed against a hypergraph it does not match."""


class InternalError(FdincError):
    """An internal invariant was violated; indicates a bug, not bad input."""
