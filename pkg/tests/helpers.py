"""Shared fixtures: bundled scenarios and seeded random instances."""

from __future__ import annotations

import random
from fractions import Fraction

from rainbownet import (
    DiscreteRnf,
    Edge,
    Network,
    enumerate_paths,
    is_admissible,
    load_flow,
    load_scenario,
)
from rainbownet.data import bundled_text

CAPACITY_CHOICES = (Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2))


def fig1_network() -> Network:
    return load_scenario(bundled_text("fig1"))


def fig1_flow(net: Network | None = None) -> DiscreteRnf:
    net = net or fig1_network()
    return load_flow(bundled_text("fig1_flow"), net)


def fig2_network() -> Network:
    return load_scenario(bundled_text("fig2"))


def fig2_flow(net: Network | None = None):
    net = net or fig2_network()
    return load_flow(bundled_text("fig2_flow"), net)


def random_network(rng: random.Random, max_nodes: int = 7) -> Network:
    """A small random directed network: one source, 2-3 sinks, mostly connected."""
    count = rng.randint(4, max_nodes)
    names = [str(i + 1) for i in range(count)]
    source = names[0]
    sink_count = min(rng.randint(2, 3), count - 1)
    sinks = rng.sample(names[1:], sink_count)

    edges: list[Edge] = []
    seen_pairs: set[tuple[str, str]] = set()

    def add(tail: str, head: str):
        if tail == head or (tail, head) in seen_pairs:
            return
        seen_pairs.add((tail, head))
        edges.append(
            Edge(f"e{tail}-{head}", tail, head, rng.choice(CAPACITY_CHOICES))
        )

    # spine: every node reachable-ish from the source
    for position in range(1, count):
        add(names[rng.randrange(position)], names[position])
    for _ in range(count + rng.randint(0, count)):
        add(rng.choice(names), rng.choice(names))

    return Network(
        nodes=tuple(names),
        edges=tuple(edges),
        sources=(source,),
        sinks=tuple(sorted(sinks)),
    )


def random_admissible_flow(
    rng: random.Random,
    net: Network,
    num_colors: int,
    rate: Fraction,
    max_len: int = 3,
) -> DiscreteRnf:
    """Grow a random admissible flow by accept/reject over shuffled paths."""
    universe = enumerate_paths(net, max_len)
    order = list(range(len(universe)))
    rng.shuffle(order)
    paths: list = []
    colors: list[int] = []
    for index in order:
        color = rng.randint(1, num_colors)
        candidate = DiscreteRnf(
            net,
            tuple(paths + [universe[index]]),
            tuple(colors + [color]),
            num_colors,
            rate,
        )
        if is_admissible(candidate):
            paths.append(universe[index])
            colors.append(color)
    return DiscreteRnf(net, tuple(paths), tuple(colors), num_colors, rate)
