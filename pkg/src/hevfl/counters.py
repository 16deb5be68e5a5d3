"""Operation counters and nestable measurement scopes.

Backends report every logical ciphertext op (add / mult / rot / hst_rot) via
:func:`record_op`; the network simulator reports transmitted messages via
:func:`record_message`. Open scopes all accumulate, so nested scopes compose
additively. The scope stack is thread-local, so concurrent benchmark workers
each see only their own open scopes.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .errors import ScopeNotOpen


@dataclass
class OpCounter:
    add: int = 0
    mult: int = 0
    rot: int = 0
    hst_rot: int = 0

    def bump(self, kind: str, n: int = 1) -> None:
        setattr(self, kind, getattr(self, kind) + n)

    def __add__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(
            self.add + other.add,
            self.mult + other.mult,
            self.rot + other.rot,
            self.hst_rot + other.hst_rot,
        )

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.add, self.mult, self.rot, self.hst_rot)


@dataclass
class CommStats:
    """Per-direction byte/message totals plus modeled transfer seconds."""

    bytes_by_direction: dict[tuple[str, str], int] = field(default_factory=dict)
    messages_by_direction: dict[tuple[str, str], int] = field(default_factory=dict)
    modeled_seconds: float = 0.0

    def record(self, sender: str, receiver: str, nbytes: int, seconds: float) -> None:
        key = (sender, receiver)
        self.bytes_by_direction[key] = self.bytes_by_direction.get(key, 0) + nbytes
        self.messages_by_direction[key] = self.messages_by_direction.get(key, 0) + 1
        self.modeled_seconds += seconds

    @property
    def total_bytes(self) -> int:
        return sum(self.bytes_by_direction.values())

    @property
    def total_messages(self) -> int:
        return sum(self.messages_by_direction.values())


class MeasurementScope:
    """Context manager accumulating op counts and comm stats while open."""

    def __init__(self):
        self.ops = OpCounter()
        self.comm = CommStats()
        self._opened = False
        self._open = False

    def __enter__(self) -> "MeasurementScope":
        self._opened = True
        self._open = True
        _stack().append(self)
        return self

    def __exit__(self, *exc):
        self._open = False
        _stack().remove(self)
        return False

    def result(self) -> tuple[OpCounter, CommStats]:
        if not self._opened:
            raise ScopeNotOpen("scope was never entered")
        return self.ops, self.comm


_LOCAL = threading.local()


def _stack() -> list[MeasurementScope]:
    # One stack per thread so worker-pool cases cannot observe each other.
    stack = getattr(_LOCAL, "stack", None)
    if stack is None:
        stack = _LOCAL.stack = []
    return stack


def record_op(kind: str, n: int = 1) -> None:
    for scope in _stack():
        scope.ops.bump(kind, n)


def record_message(sender: str, receiver: str, nbytes: int, seconds: float) -> None:
    for scope in _stack():
        scope.comm.record(sender, receiver, nbytes, seconds)


def measure(scope: MeasurementScope) -> tuple[OpCounter, CommStats]:
    """Counts accumulated strictly inside the scope."""
    return scope.result()
