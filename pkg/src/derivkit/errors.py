"""Exception hierarchy shared across the engine.

Every error carries a stable ``code`` (its class name) so the CLI and the
HTTP service can report machine-readable causes without string matching.
"""

from __future__ import annotations


class DerivError(Exception):
    """Base class for all engine errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


class PathOutOfRange(DerivError):
    """A path step exceeds a constructor's arity (or the path is empty)."""

    def __init__(self, path, prefix=()):
        self.path = tuple(path)
        self.prefix = tuple(prefix)
        super().__init__(f"path {list(self.path)} invalid after {list(self.prefix)}")


class SortMismatch(DerivError):
    """A term of one sort was placed where another sort is required."""

    def __init__(self, expected: str, found: str):
        self.expected = expected
        self.found = found
        super().__init__(f"expected a {expected} term, found a {found} term")


class OpenValue(DerivError):
    """Substitution was handed a value with free variables or holes."""


class UnboundAbbrev(DerivError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"abbreviation ${name} is not defined")


class UnknownSystem(DerivError):
    def __init__(self, system_id: str):
        self.system_id = system_id
        super().__init__(f"unknown rule system {system_id!r}")


class UnknownRule(DerivError):
    def __init__(self, name: str):
        self.rule_name = name
        super().__init__(f"unknown rule {name!r}")


class UnknownCategory(DerivError):
    def __init__(self, name: str):
        self.category = name
        super().__init__(f"unknown category {name!r}")


class UnknownNode(DerivError):
    def __init__(self, node_id: str):
        self.node_id = node_id
        super().__init__(f"unknown node {node_id!r}")


class UnknownSubtree(DerivError):
    def __init__(self, name: str):
        self.subtree = name
        super().__init__(f"unknown subtree {name!r}")


class ForwardSubtreeRef(DerivError):
    def __init__(self, name: str):
        self.subtree = name
        super().__init__(f"subtree {name!r} may only be referenced after its definition")


class DuplicateName(DerivError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"name {name!r} is already defined")


class BadPath(DerivError):
    """An edit names a path that does not exist or does not fit the command."""


class BadName(DerivError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"invalid name {name!r}")


class NameInUse(DerivError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"{name!r} is still referenced and cannot be removed")


class NothingToUndo(DerivError):
    def __init__(self):
        super().__init__("undo stack is empty")


class NothingToRedo(DerivError):
    def __init__(self):
        super().__init__("redo stack is empty")


class UnknownSession(DerivError):
    def __init__(self, session_id: str):
        self.session_id = session_id
        super().__init__(f"unknown session {session_id!r}")
