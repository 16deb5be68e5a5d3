"""Two-party network simulation with byte-accurate cost accounting.

Parties exchange :class:`Message` objects over reliable FIFO channels. Every
send charges the modeled channel (latency plus bytes/bandwidth) and appends a
structured record to the transcript; payload bytes for ciphertext kinds come
from the :class:`~hevfl.params.CostModel`, never from the in-memory Python
representation, so semantic and lattice runs of the same protocol produce
identical byte totals.

Transcripts are line-delimited JSON with a fixed field order, which makes two
runs diffable byte-for-byte. :func:`audit` checks the ciphertext traffic of a
transcript against a :class:`~hevfl.matmult.ComplexityPrediction`.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from .counters import MeasurementScope, record_message
from .errors import ChannelClosed, ConfigInvalid, IncompleteTranscript
from .matmult import ComplexityPrediction
from .params import CostModel

MESSAGE_KINDS = ("rlwe_ct", "lwe_ct_batch", "cleartext", "control")

CLEARTEXT_BYTES_PER_ELEMENT = 8  # one float64 / one mod-t residue

_RECORD_FIELDS = ("seq", "time", "sender", "receiver", "kind", "count", "bytes", "ops")


@dataclass(frozen=True)
class ChannelSpec:
    """Bandwidth (bytes/second) and one-way latency (seconds) of every link."""

    bandwidth: float = 50_000_000.0
    latency: float = 0.020

    def __post_init__(self):
        if self.bandwidth <= 0 or self.latency <= 0:
            raise ConfigInvalid(
                f"channel needs positive bandwidth and latency, got "
                f"({self.bandwidth}, {self.latency})"
            )

    def transfer_seconds(self, nbytes: int) -> float:
        return self.latency + nbytes / self.bandwidth


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str
    kind: str
    payload_bytes: int
    logical_time_sent: float
    count: int = 1
    payload: Any = None


class Network:
    """Reliable FIFO channels between a fixed set of named parties.

    The network holds a measurement scope open for its lifetime so each
    transcript record can embed a snapshot of the ciphertext-op counters at
    the moment of sending. Use as a context manager, or call :meth:`close`
    when the protocol run ends.
    """

    def __init__(
        self,
        cost: CostModel,
        spec: ChannelSpec | None = None,
        parties: Iterable[str] = ("A", "B"),
    ):
        self.cost = cost
        self.spec = spec or ChannelSpec()
        self.parties = tuple(parties)
        if len(self.parties) < 2 or len(set(self.parties)) != len(self.parties):
            raise ConfigInvalid(f"need >= 2 distinct parties, got {self.parties}")
        self._queues: dict[tuple[str, str], deque[Message]] = {}
        self.transcript: list[dict[str, Any]] = []
        self._clock = 0.0
        self._seq = 0
        self._closed = False
        self._scope = MeasurementScope()
        self._scope.__enter__()

    # -- lifecycle ----------------------------------------------------------

    def __enter__(self) -> "Network":
        return self

    def __exit__(self, *exc):
        self.close()
        return False

    def close(self) -> None:
        if not self._closed:
            self._closed = True
            self._scope.__exit__(None, None, None)

    @property
    def modeled_seconds(self) -> float:
        return self._clock

    @property
    def stats(self):
        return self._scope.comm

    # -- traffic ------------------------------------------------------------

    def _payload_bytes(self, kind: str, count: int) -> int:
        if kind == "rlwe_ct":
            return count * self.cost.rlwe_ct_bytes
        if kind == "lwe_ct_batch":
            return count * self.cost.lwe_ct_bytes
        if kind == "cleartext":
            return count * CLEARTEXT_BYTES_PER_ELEMENT
        return 0  # control

    def send(
        self,
        sender: str,
        receiver: str,
        kind: str,
        payload: Any = None,
        *,
        count: int = 1,
    ) -> Message:
        if self._closed:
            raise ChannelClosed("network is closed")
        if sender not in self.parties or receiver not in self.parties:
            raise ChannelClosed(f"unknown endpoint in {sender!r}->{receiver!r}")
        if sender == receiver:
            raise ChannelClosed("a party cannot message itself")
        if kind not in MESSAGE_KINDS:
            raise ConfigInvalid(f"unknown message kind {kind!r}; have {MESSAGE_KINDS}")
        if count < 0:
            raise ConfigInvalid("message count must be >= 0")
        nbytes = self._payload_bytes(kind, count)
        seconds = self.spec.transfer_seconds(nbytes)
        msg = Message(sender, receiver, kind, nbytes, self._clock, count, payload)
        self._queues.setdefault((sender, receiver), deque()).append(msg)
        self.transcript.append(
            {
                "seq": self._seq,
                "time": round(self._clock, 9),
                "sender": sender,
                "receiver": receiver,
                "kind": kind,
                "count": count,
                "bytes": nbytes,
                "ops": list(self._scope.ops.as_tuple()),
            }
        )
        self._seq += 1
        self._clock += seconds
        record_message(sender, receiver, nbytes, seconds)
        return msg

    def recv(self, receiver: str, sender: str | None = None) -> Message:
        if sender is None:
            pending = [
                s for s in sorted(self.parties)
                if self._queues.get((s, receiver))
            ]
            if not pending:
                raise ChannelClosed(f"no pending message for {receiver!r}")
            sender = pending[0]
        queue = self._queues.get((sender, receiver))
        if not queue:
            raise ChannelClosed(f"no pending message on {sender!r}->{receiver!r}")
        return queue.popleft()

    def pending(self) -> int:
        return sum(len(q) for q in self._queues.values())

    # -- transcript ---------------------------------------------------------

    def write_transcript(self, path: str | Path) -> None:
        Path(path).write_text(
            "".join(dumps_record(rec) + "\n" for rec in self.transcript)
        )

    def audit(self, expectation: ComplexityPrediction, src: str, dst: str):
        """Audit this run's ciphertext traffic; see module-level :func:`audit`."""
        if self.pending():
            raise IncompleteTranscript(
                f"{self.pending()} sent messages were never received"
            )
        return audit(self.transcript, expectation, src=src, dst=dst)


def dumps_record(rec: dict[str, Any]) -> str:
    """Serialize one transcript record with a fixed field order."""
    try:
        ordered = {k: rec[k] for k in _RECORD_FIELDS}
    except KeyError as exc:
        raise IncompleteTranscript(f"transcript record missing field {exc}") from None
    return json.dumps(ordered, separators=(",", ":"))


def load_transcript(path: str | Path) -> list[dict[str, Any]]:
    lines = Path(path).read_text().splitlines()
    return [json.loads(line) for line in lines if line.strip()]


@dataclass
class AuditReport:
    ok: bool
    mismatches: list[str] = field(default_factory=list)
    ct_units_in: dict[str, int] = field(default_factory=dict)
    ct_units_out: dict[str, int] = field(default_factory=dict)


def _ct_units(transcript, sender: str, receiver: str) -> dict[str, int]:
    units = {"rlwe_ct": 0, "lwe_ct_batch": 0}
    for rec in transcript:
        for key in _RECORD_FIELDS:
            if key not in rec:
                raise IncompleteTranscript(f"transcript record missing field {key!r}")
        if rec["sender"] == sender and rec["receiver"] == receiver:
            if rec["kind"] in units:
                units[rec["kind"]] += rec["count"]
    return units


def audit(
    transcript: list[dict[str, Any]],
    expectation: ComplexityPrediction,
    *,
    src: str = "B",
    dst: str = "A",
) -> AuditReport:
    """Check ciphertext traffic against a complexity prediction.

    ``expectation.ct_b_to_a`` is matched against ``src -> dst`` traffic and
    ``expectation.ct_a_to_b`` against the reverse direction. Cleartext and
    control messages are out of scope. Every mismatch is itemized; an empty
    transcript passes exactly when the expectation is zero in both directions.
    """
    inbound = _ct_units(transcript, src, dst)
    outbound = _ct_units(transcript, dst, src)
    report = AuditReport(ok=True, ct_units_in=inbound, ct_units_out=outbound)

    for direction, units, (want_count, want_kind) in (
        (f"{src}->{dst}", inbound, expectation.ct_b_to_a),
        (f"{dst}->{src}", outbound, expectation.ct_a_to_b),
    ):
        for kind in ("rlwe_ct", "lwe_ct_batch"):
            want = want_count if kind == want_kind else 0
            got = units[kind]
            if got != want:
                report.ok = False
                report.mismatches.append(
                    f"{direction}: expected {want} x {kind}, transcript has {got}"
                )
    return report
