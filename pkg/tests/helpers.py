"""Small shared helpers for the test modules."""

from semicanon.backend import EXACT


def E(rows):
    """Exact matrix from nested lists of ints or strings."""
    return EXACT.asarray([[str(x) for x in r] for r in rows])


def as_lists(M):
    return [[str(x) for x in row] for row in M]
