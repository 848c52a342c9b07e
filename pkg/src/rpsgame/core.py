"""Core allocations: flow -> payment, payment -> flow, and exhaustive core checks.

Payment orientation
-------------------
A player's payment is read off the two auxiliary edges at its node. With the
default ``Orientation.INFLOW`` it is ``f(i, t̄) - f(s̄, i)``, which by flow
conservation equals the reward flow entering ``i`` minus the penalty flow
leaving it. ``Orientation.MIRRORED`` negates that reading. The reconstruction
in :func:`flow_from_core` places the payment capacities so that the same
orientation reads ``p`` back. Only ``INFLOW`` yields efficient payments
whenever ``v(N) != 0``; ``MIRRORED`` exists so the other reading can be
exercised and shown to fail.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    FlowNotMaximal,
    NegativeAuxCapacity,
    NotInCore,
    NotSingletonInstance,
    ReconstructionFailed,
    ValidationError,
)
from .flow import (
    AUX_SINK,
    AUX_SOURCE,
    FlowNetwork,
    build_profit_sharing_graph,
    max_flow,
    player,
    required_flow_value,
)
from .instance import (
    Coalition,
    PaymentVector,
    RpsInstance,
    check_enumerable,
    enumeration_limit,
    grand_coalition,
    grand_value,
    lex_smallest,
    scale_instance,
    values_array,
)

log = logging.getLogger(__name__)


class Orientation(enum.Enum):
    INFLOW = "inflow"  # p_i = f(i, t̄) - f(s̄, i)
    MIRRORED = "mirrored"  # p_i = f(s̄, i) - f(i, t̄)


PAYMENT_ORIENTATION = Orientation.INFLOW


def _orientation(orientation):
    return PAYMENT_ORIENTATION if orientation is None else Orientation(orientation)


def payment_from_flow(inst: RpsInstance, net: FlowNetwork, orientation=None) -> PaymentVector:
    """Read the payment vector off a flow of full value on ``net``.

    ``net`` must be the profit-sharing graph of ``inst`` (or of ``inst``
    scaled by ``net.scale``); payments are divided by that scale.
    """
    orientation = _orientation(orientation)
    target = required_flow_value(inst) * net.scale
    value = net.value()
    if value < target:
        raise FlowNotMaximal(f"flow value {value} is below the required {target}")
    players = range(1, inst.n + 1)
    into_sink = net.edge_ids((player(i), AUX_SINK) for i in players)
    from_source = net.edge_ids((AUX_SOURCE, player(i)) for i in players)
    sign = -1 if orientation is Orientation.MIRRORED else 1
    return PaymentVector(
        tuple(Fraction(sign * (net.flow[a] - net.flow[b]), net.scale) for a, b in zip(into_sink, from_source))
    )


def core_element(inst: RpsInstance, orientation=None) -> PaymentVector:
    """An integral core allocation from one max flow on the profit-sharing graph."""
    _, net = max_flow(build_profit_sharing_graph(inst))
    return payment_from_flow(inst, net, orientation)


@dataclass(frozen=True)
class InCore:
    def __bool__(self):
        return True

    def to_dict(self) -> dict:
        return {"status": "in_core"}


@dataclass(frozen=True)
class Violation:
    """``gap`` is ``v(S) - p(S)``: the shortfall for CR, the mismatch for EFF."""

    property: str
    coalition: Coalition
    gap: Fraction

    def __bool__(self):
        return False

    def to_dict(self) -> dict:
        from .instance import format_fraction

        return {
            "status": "violation",
            "property": self.property,
            "coalition": self.coalition.sorted(),
            "gap": format_fraction(self.gap),
        }


def _subset_sums(values: list[int]) -> np.ndarray:
    dtype = np.int64 if sum(map(abs, values)) < 2**62 else object
    sums = np.zeros(1, dtype=dtype)
    for x in values:
        sums = np.concatenate([sums, sums + x])
    return sums


def is_core(inst: RpsInstance, p: PaymentVector, max_n: int | None = None):
    """Check efficiency, then coalitional rationality over all 2^n coalitions.

    Returns :class:`InCore` or the first :class:`Violation`; a CR witness is
    the lexicographically smallest violating coalition.
    """
    if len(p) != inst.n:
        raise ValidationError(f"payment vector has {len(p)} entries for {inst.n} players")
    check_enumerable(inst.n, max_n)
    gap = grand_value(inst) - p.total()
    if gap != 0:
        return Violation("EFF", grand_coalition(inst.n), gap)
    scale = p.common_denominator()
    scaled = [int(x * scale) for x in p]
    sums = _subset_sums(scaled)
    values = values_array(inst, max_n)
    if sums.dtype == object or int(np.abs(values).max(initial=0)) * scale >= 2**62:
        values = values.astype(object)
        sums = sums.astype(object)
    bad = np.flatnonzero(sums < values * scale)
    if len(bad) == 0:
        return InCore()
    mask = lex_smallest(int(m) for m in bad)
    S = Coalition.from_mask(mask)
    return Violation("CR", S, Fraction(int(values[mask]) * scale - int(sums[mask]), scale))


def singleton_core(inst: RpsInstance) -> PaymentVector:
    """The unique core vector of a game whose sets are all singletons."""
    if not inst.is_singleton_instance():
        raise NotSingletonInstance("every reward and penalty set must have exactly one member")
    p = [0] * inst.n
    for r in inst.rewards:
        (k,) = r.members
        p[k - 1] += r.value
    for b in inst.penalties:
        (k,) = b.members
        p[k - 1] -= b.value
    return PaymentVector(tuple(p))


def flow_from_core(
    inst: RpsInstance,
    p: PaymentVector,
    orientation=None,
    clamp: bool = True,
    max_n: int | None = None,
) -> FlowNetwork:
    """Flow of full value on the profit-sharing graph that induces ``p``.

    The unbounded player edges get capacity ``max(p_i, 0)`` on the edge that
    reads as a positive payment under ``orientation`` and ``max(-p_i, 0)`` on
    the other; the ``s̄ -> t̄`` edge gets what is left of the total penalty.
    A rational ``p`` is handled by scaling the instance by the common
    denominator; the returned network carries that factor in ``scale``.

    Core membership is checked exhaustively when ``n`` is within the
    enumeration limit. Above it, a failed reconstruction proves ``p`` is not
    in the core and raises :class:`NotInCore`.
    """
    orientation = _orientation(orientation)
    if len(p) != inst.n:
        raise ValidationError(f"payment vector has {len(p)} entries for {inst.n} players")
    checked = inst.n <= enumeration_limit(max_n)
    if checked:
        check = is_core(inst, p, max_n)
        if not check:
            raise NotInCore(f"payment vector is not in the core: {check}", check)
    elif p.total() != grand_value(inst):
        raise NotInCore("payment vector is not efficient")

    scale = p.common_denominator()
    work = scale_instance(inst, scale) if scale > 1 else inst
    q = [int(x * scale) for x in p]

    net = build_profit_sharing_graph(work)
    net.scale = scale
    if orientation is Orientation.INFLOW:
        to_aux_sink = [max(x, 0) for x in q]
        from_aux_source = [max(-x, 0) for x in q]
    else:
        to_aux_sink = [max(-x, 0) for x in q]
        from_aux_source = [max(x, 0) for x in q]
    players = range(1, inst.n + 1)
    source_edges = net.edge_ids((AUX_SOURCE, player(i)) for i in players)
    sink_edges = net.edge_ids((player(i), AUX_SINK) for i in players)
    for e, c in zip(source_edges, from_aux_source):
        net.cap[e] = c
    for e, c in zip(sink_edges, to_aux_sink):
        net.cap[e] = c
    aux = work.total_penalty - sum(from_aux_source)
    if aux < 0:
        if not clamp:
            raise NegativeAuxCapacity(f"s̄ -> t̄ capacity would be {aux}")
        log.warning("clamping negative s̄ -> t̄ capacity %d to 0", aux)
        aux = 0
    aux_edge = net.edge_id(AUX_SOURCE, AUX_SINK)
    net.cap[aux_edge] = aux
    for e in source_edges + sink_edges + [aux_edge]:
        net.unbounded[e] = False

    value, _ = max_flow(net)
    target = required_flow_value(work)
    if value != target:
        if not checked:
            raise NotInCore(f"no flow of value {target} induces this payment vector (max flow {value})")
        raise ReconstructionFailed(f"max flow {value} is below {target} for a core vector")
    if payment_from_flow(inst, net, orientation) != p:
        if not checked:
            raise NotInCore("no flow of full value induces this payment vector")
        raise ReconstructionFailed("reconstructed flow does not induce the given payment vector")
    return net
