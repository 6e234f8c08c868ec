"""Exception taxonomy shared by all modules."""

from __future__ import annotations


class AcqLabError(Exception):
    """Base class for every error raised by this package."""


class InvalidSubset(AcqLabError):
    """A k-subset is malformed (wrong size, duplicates, out of range)."""


class IndexOutOfRange(AcqLabError):
    """A subset rank is outside [0, C(n, k))."""


class InvalidProbability(AcqLabError):
    """An edge probability lies outside [0, 1]."""


class InvalidUniformity(AcqLabError):
    """Edge arity r is inconsistent with the structure or n."""


class InvalidArity(AcqLabError):
    """An edge has the wrong number of vertices for its structure."""


class InvalidDelta(AcqLabError):
    """A path-density parameter lies outside (0, 1)."""


class InvalidSpine(AcqLabError):
    """A proposed spine is not a path of the host graph."""


class NotAMatching(AcqLabError):
    """Swap pairs in one round share a vertex."""


class IllegalSwap(AcqLabError):
    """A swap pair is not an edge of the underlying graph."""


class SizeMismatch(AcqLabError):
    """Source and target sets of a routing request differ in size."""


class NotATree(AcqLabError):
    """A routing request was made on a graph that is not a tree."""


class InvalidTarget(AcqLabError):
    """A routing target is not a vertex permutation of the structure."""


class InvalidTree(AcqLabError):
    """A claimed good tree violates its structural invariants."""


class NotDivisible(AcqLabError):
    """A 1-factorization request with s not dividing N."""


class StructuralAssumptionViolated(AcqLabError):
    """The instance lacks structure a strategy needs (e.g. attachments)."""


class PathUnavailable(AcqLabError):
    """No spanning loose path was found within the search budget."""


class SearchBudgetExceeded(AcqLabError):
    """An exact search exceeded its configured state budget."""


class Unacquaintable(AcqLabError):
    """No sequence of rounds can ever acquaint all k-subsets."""
