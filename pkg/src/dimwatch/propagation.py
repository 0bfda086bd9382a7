"""Round-synchronous simulator for indicator and malicious-list propagation.

Detector nodes sit on an undirected topology and talk only to their
immediate neighbors. Each round every node packs the malicious-source
entries it acquired in earlier rounds (and has not yet sent to that
neighbor) into a message, fragments it, and ships the fragments across
the link; each fragment is independently lost with probability
``p_loss`` and an incomplete message is discarded whole. Receivers union
the entries into their own list — which only ever grows — so an entry
detected at distance d arrives after at least d rounds, and exactly d
when nothing is lost.

Fragmentation is an XOR pad scheme: m - 1 seeded random pads plus the
message XORed with all of them. Every proper subset of fragments is
independent of the message, so a link eavesdropper holding fewer than m
fragments learns nothing.

Nodes may also carry a local anomaly indicator and a labeled validation
set. An indicator is broadcast when its local risk changes (initially,
and after an adoption); a receiver adopts a received indicator only if
it scores a strictly lower empirical risk on the receiver's own
validation data.

The simulator is single-threaded and deterministic: identical topology,
event script and seed produce byte-identical traces.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractError,
    IncompleteMessageError,
    ParseError,
    ScriptError,
)
from .indicators import (
    IndividualAnomalyIndicator,
    empirical_risk,
    variant_from_payload,
    variant_payload,
    ZERO_ONE,
)


# ---------------------------------------------------------------------------
# Fragmentation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fragment:
    """One of m equal-length pieces of a message; indices are 1-based."""

    message_id: str
    index: int
    total: int
    payload: bytes


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def fragment_message(message: bytes, m: int, seed, message_id: str | None = None) -> list[Fragment]:
    """Split a message into m fragments, none of which reveals it alone.

    Fragments 1..m-1 are uniform random pads drawn from the seeded
    generator; fragment m is the message XORed with every pad, so any
    proper subset of fragments is statistically independent of the
    message and XORing all m restores it.
    """
    if m < 2:
        raise ContractError(f"fragment count must be at least 2, got {m}")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    pads = [rng.randbytes(len(message)) for _ in range(m - 1)]
    last = message
    for pad in pads:
        last = _xor(last, pad)
    if message_id is None:
        digest = hashlib.sha256(b"".join(pads) + message).hexdigest()
        message_id = digest[:16]
    fragments = [
        Fragment(message_id=message_id, index=i + 1, total=m, payload=pad)
        for i, pad in enumerate(pads)
    ]
    fragments.append(Fragment(message_id=message_id, index=m, total=m, payload=last))
    return fragments


def reassemble(fragments) -> bytes:
    """XOR all m fragments of one message back together.

    Raises:
        IncompleteMessageError: fragments are missing; names their indices.
        ContractError: fragments from different messages are mixed.
    """
    parts = list(fragments)
    if not parts:
        raise IncompleteMessageError("no fragments at all", missing=[])
    ids = {f.message_id for f in parts}
    if len(ids) != 1:
        raise ContractError(f"fragments from {len(ids)} different messages were mixed")
    totals = {f.total for f in parts}
    if len(totals) != 1:
        raise ContractError("fragments disagree on the total count")
    total = totals.pop()
    present = {f.index for f in parts}
    missing = sorted(set(range(1, total + 1)) - present)
    if missing:
        raise IncompleteMessageError(
            f"missing fragment(s) {missing} of {total}", missing=missing
        )
    out = bytes(len(parts[0].payload))
    for fragment in parts:
        out = _xor(out, fragment.payload)
    return out


# ---------------------------------------------------------------------------
# Topology, events, node state
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Topology:
    """Undirected graph of node ids; no self-loops."""

    nodes: list[str]
    edges: set

    @classmethod
    def from_edges(cls, pairs) -> "Topology":
        nodes: list[str] = []
        edges = set()
        for a, b in pairs:
            if a == b:
                raise ContractError(f"self-loop on node {a!r}")
            for n in (a, b):
                if n not in nodes:
                    nodes.append(n)
            edges.add(frozenset((a, b)))
        return cls(nodes=sorted(nodes), edges=edges)

    def neighbors(self, node: str) -> list[str]:
        return sorted(other for edge in self.edges for other in edge
                      if node in edge and other != node)

    def has_node(self, node: str) -> bool:
        return node in self.nodes


def parse_topology(text: str) -> Topology:
    """Parse an edge-list file: one ``nodeA nodeB`` pair per line."""
    pairs = []
    failures = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            failures.append((line_no, f"expected 'nodeA nodeB', got {raw!r}"))
            continue
        if tokens[0] == tokens[1]:
            failures.append((line_no, f"self-loop on {tokens[0]!r}"))
            continue
        pairs.append((tokens[0], tokens[1]))
    if failures:
        details = "; ".join(f"line {n}: {reason}" for n, reason in failures)
        raise ParseError(f"malformed topology: {details}", failures)
    if not pairs:
        raise ParseError("topology has no edges", [])
    return Topology.from_edges(pairs)


@dataclass(frozen=True)
class MaliciousEntry:
    source: str
    first_seen_round: int
    reporting_node: str

    def __post_init__(self):
        if self.first_seen_round < 0:
            raise ContractError("first_seen_round must be non-negative")


@dataclass(frozen=True)
class DetectionEvent:
    round: int
    node: str
    source: str


def parse_event_script(text: str) -> list[DetectionEvent]:
    """Parse ``round,node,source`` rows into detection events."""
    events = []
    failures = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            failures.append((line_no, f"expected 'round,node,source', got {raw!r}"))
            continue
        try:
            round_no = int(parts[0])
        except ValueError:
            failures.append((line_no, f"round {parts[0]!r} is not an integer"))
            continue
        events.append(DetectionEvent(round=round_no, node=parts[1], source=parts[2]))
    if failures:
        details = "; ".join(f"line {n}: {reason}" for n, reason in failures)
        raise ParseError(f"malformed event script: {details}", failures)
    return events


@dataclass(eq=False)
class NodeState:
    """One simulated detector node."""

    node_id: str
    malicious: dict = field(default_factory=dict)  # source -> MaliciousEntry
    acquired_round: dict = field(default_factory=dict)  # source -> round learned
    sent_to: dict = field(default_factory=dict)  # neighbor -> set of sources
    indicator: IndividualAnomalyIndicator | None = None
    validation_values: np.ndarray | None = None
    validation_labels: np.ndarray | None = None
    indicator_risk: float | None = None
    indicator_changed_round: int | None = None
    adoption_log: list = field(default_factory=list)

    def learn(self, entry: MaliciousEntry, round_no: int) -> bool:
        """Union one entry into the malicious list; lists only grow."""
        if entry.source in self.malicious:
            return False
        self.malicious[entry.source] = entry
        self.acquired_round[entry.source] = round_no
        return True

    def local_risk(self) -> float | None:
        if self.indicator is None or self.validation_values is None:
            return None
        return empirical_risk(self.indicator.variant, self.validation_values,
                              self.validation_labels, ZERO_ONE)


def adopt_indicator(node: NodeState, dimension_id: str,
                    variant, round_no: int = 0) -> bool:
    """Adopt a received indicator iff it beats the local one on local data.

    Both the local and the received indicator are scored on the node's
    labeled validation set; the received one replaces the local only when
    its risk is strictly lower. Every decision is logged with both risks.
    """
    if node.validation_values is None or node.indicator is None:
        node.adoption_log.append(
            {"round": round_no, "dimension": dimension_id, "adopted": False,
             "reason": "no local validation data"})
        return False
    if dimension_id != node.indicator.dimension_id:
        node.adoption_log.append(
            {"round": round_no, "dimension": dimension_id, "adopted": False,
             "reason": f"schema mismatch: local dimension is "
                       f"{node.indicator.dimension_id}"})
        return False
    local = empirical_risk(node.indicator.variant, node.validation_values,
                           node.validation_labels, ZERO_ONE)
    received = empirical_risk(variant, node.validation_values,
                              node.validation_labels, ZERO_ONE)
    adopted = received < local
    node.adoption_log.append(
        {"round": round_no, "dimension": dimension_id, "adopted": adopted,
         "local_risk": local, "received_risk": received})
    if adopted:
        node.indicator = IndividualAnomalyIndicator(
            dimension_id=dimension_id, variant=variant, empirical_risk=received)
        node.indicator_risk = received
        node.indicator_changed_round = round_no
    return adopted


# ---------------------------------------------------------------------------
# The simulator
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class SimulationState:
    topology: Topology
    nodes: dict
    rng: random.Random
    p_loss: float
    fragments: int
    exchange_indicators: str
    round: int = 0
    message_counter: int = 0
    messages_sent: int = 0
    fragments_dropped: int = 0
    adoptions: int = 0
    list_updates: int = 0


def _entries_payload(entries: list[MaliciousEntry]) -> bytes:
    rows = sorted(
        [[e.source, e.first_seen_round, e.reporting_node] for e in entries]
    )
    return json.dumps({"kind": "entries", "rows": rows}, sort_keys=True).encode("utf-8")


def _indicator_message(indicator: IndividualAnomalyIndicator) -> bytes:
    body = {
        "kind": "indicator",
        "dimension": indicator.dimension_id,
        "variant": variant_payload(indicator.variant),
    }
    return json.dumps(body, sort_keys=True).encode("utf-8")


def init_simulation(
    topology: Topology,
    seed: int,
    p_loss: float = 0.0,
    fragments: int = 3,
    exchange_indicators: str = "on_risk_change",
    node_setups: dict | None = None,
) -> SimulationState:
    """Build the initial state with one NodeState per topology node.

    ``node_setups`` optionally maps node id to a dict with keys
    ``indicator`` (an IndividualAnomalyIndicator) and ``validation``
    (a ``(values, labels)`` pair) for indicator-exchange scenarios.
    """
    if not 0.0 <= p_loss <= 1.0:
        raise ContractError(f"p_loss must lie in [0, 1], got {p_loss}")
    if fragments < 2:
        raise ContractError(f"fragment count must be at least 2, got {fragments}")
    nodes = {}
    for node_id in topology.nodes:
        state = NodeState(node_id=node_id)
        setup = (node_setups or {}).get(node_id)
        if setup:
            state.indicator = setup.get("indicator")
            validation = setup.get("validation")
            if validation is not None:
                values, labels = validation
                state.validation_values = np.asarray(values, dtype=float)
                state.validation_labels = np.asarray(labels, dtype=float)
            state.indicator_risk = state.local_risk()
            if state.indicator is not None:
                state.indicator_changed_round = 0
        nodes[node_id] = state
    return SimulationState(
        topology=topology, nodes=nodes, rng=random.Random(seed),
        p_loss=p_loss, fragments=fragments,
        exchange_indicators=exchange_indicators,
    )


def _transmit(state: SimulationState, sender: str, receiver: str,
              payload: bytes, kind: str, trace: list) -> bytes | None:
    """Fragment, push across the (lossy) link, reassemble; None if lost."""
    state.message_counter += 1
    message_id = f"m{state.message_counter}"
    frags = fragment_message(payload, state.fragments, state.rng, message_id=message_id)
    state.messages_sent += 1
    survivors = []
    dropped = []
    for fragment in frags:
        if state.rng.random() < state.p_loss:
            dropped.append(fragment.index)
        else:
            survivors.append(fragment)
    trace.append(
        f"round={state.round} event=send from={sender} to={receiver} "
        f"kind={kind} message={message_id} fragments={state.fragments}"
    )
    for index in dropped:
        state.fragments_dropped += 1
        trace.append(
            f"round={state.round} event=drop from={sender} to={receiver} "
            f"message={message_id} fragment={index}"
        )
    if dropped:
        trace.append(
            f"round={state.round} event=discard from={sender} to={receiver} "
            f"message={message_id} missing={','.join(str(i) for i in dropped)}"
        )
        return None
    return reassemble(survivors)


def _should_send_indicator(state: SimulationState, sender: NodeState,
                           neighbor: str, current: int) -> bool:
    if state.exchange_indicators == "never" or sender.indicator is None:
        return False
    if state.exchange_indicators == "always":
        return True
    # on_risk_change: send each indicator revision (identified by the round
    # it changed in) to each neighbor once, starting the round after.
    changed = sender.indicator_changed_round
    if changed is None or changed >= current:
        return False
    return changed not in sender.sent_to.get(f"__indicator__{neighbor}", set())


def propagate_round(state: SimulationState) -> list[str]:
    """Advance the simulation one synchronous round; returns trace lines.

    Entries acquired in round r are forwarded no earlier than round r+1,
    and each node relays an entry to each neighbor at most once.
    """
    state.round += 1
    trace: list[str] = []
    current = state.round

    deliveries = []  # (receiver, sender, decoded payload dict)
    for sender_id in state.topology.nodes:
        sender = state.nodes[sender_id]
        for neighbor in state.topology.neighbors(sender_id):
            sent = sender.sent_to.setdefault(neighbor, set())
            pending = sorted(
                source for source, acquired in sender.acquired_round.items()
                if acquired < current and source not in sent
            )
            if pending:
                entries = [sender.malicious[source] for source in pending]
                payload = _transmit(state, sender_id, neighbor,
                                    _entries_payload(entries), "entries", trace)
                sent.update(pending)
                if payload is not None:
                    deliveries.append((neighbor, sender_id, json.loads(payload)))
            if _should_send_indicator(state, sender, neighbor, current):
                payload = _transmit(state, sender_id, neighbor,
                                    _indicator_message(sender.indicator),
                                    "indicator", trace)
                sender.sent_to.setdefault(f"__indicator__{neighbor}", set()).add(
                    sender.indicator_changed_round)
                if payload is not None:
                    deliveries.append((neighbor, sender_id, json.loads(payload)))

    for receiver_id, sender_id, body in deliveries:
        receiver = state.nodes[receiver_id]
        if body["kind"] == "entries":
            for source, first_seen, reporter in body["rows"]:
                entry = MaliciousEntry(source=source, first_seen_round=first_seen,
                                       reporting_node=reporter)
                if receiver.learn(entry, current):
                    state.list_updates += 1
                    trace.append(
                        f"round={current} event=update node={receiver_id} "
                        f"source={source} first_seen={first_seen} reporter={reporter}"
                    )
        else:
            variant = variant_from_payload(body["variant"])
            before = len(receiver.adoption_log)
            adopted = adopt_indicator(receiver, body["dimension"], variant, current)
            log = receiver.adoption_log[before]
            detail = ""
            if "local_risk" in log:
                detail = (f" local_risk={log['local_risk']:g}"
                          f" received_risk={log['received_risk']:g}")
            else:
                detail = f" reason={log['reason'].replace(' ', '_')}"
            if adopted:
                state.adoptions += 1
            trace.append(
                f"round={current} event=adopt node={receiver_id} "
                f"dimension={body['dimension']} "
                f"adopted={'yes' if adopted else 'no'}{detail}"
            )
    return trace


@dataclass(eq=False)
class SimulationResult:
    trace: list
    state: SimulationState

    def trace_text(self) -> str:
        return "\n".join(self.trace) + "\n"


def simulate(
    topology: Topology,
    events: list[DetectionEvent],
    rounds: int,
    seed: int,
    p_loss: float = 0.0,
    fragments: int = 3,
    exchange_indicators: str = "on_risk_change",
    node_setups: dict | None = None,
) -> SimulationResult:
    """Run a full deterministic simulation and return its trace.

    The event script is validated before round 0: every event must name a
    topology node and a round within [0, rounds].
    """
    if rounds < 0:
        raise ScriptError(f"round count must be non-negative, got {rounds}")
    for event in events:
        if not topology.has_node(event.node):
            raise ScriptError(f"event references unknown node {event.node!r}")
        if not 0 <= event.round <= rounds:
            raise ScriptError(
                f"event round {event.round} is outside [0, {rounds}]"
            )

    state = init_simulation(topology, seed, p_loss=p_loss, fragments=fragments,
                            exchange_indicators=exchange_indicators,
                            node_setups=node_setups)
    by_round: dict[int, list[DetectionEvent]] = {}
    for event in events:
        by_round.setdefault(event.round, []).append(event)

    trace: list[str] = []

    def apply_detections(round_no: int):
        for event in sorted(by_round.get(round_no, []),
                            key=lambda e: (e.node, e.source)):
            entry = MaliciousEntry(source=event.source, first_seen_round=round_no,
                                   reporting_node=event.node)
            if state.nodes[event.node].learn(entry, round_no):
                state.list_updates += 1
                trace.append(
                    f"round={round_no} event=detect node={event.node} "
                    f"source={event.source}"
                )

    apply_detections(0)
    for _ in range(rounds):
        trace.extend(propagate_round(state))
        apply_detections(state.round)
    return SimulationResult(trace=trace, state=state)
