"""Runtime values: messages, per-actor local states and global states.

Everything here is an immutable tuple so states hash and compare cheaply and
can be shipped to worker processes.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

INF = math.inf


class Message(NamedTuple):
    """A message sitting in a bag.

    Field order doubles as the canonical bag order: arrival first, then name,
    sender and arguments.
    """

    arrival: int
    name: str
    sender: int
    args: tuple = ()
    deadline: float = INF

    def shifted(self, delta):
        return self._replace(arrival=self.arrival + delta, deadline=self.deadline + delta)


class LocalState(NamedTuple):
    vars: tuple
    bag: tuple  # sorted tuple of Message
    time: int


class GlobalState(NamedTuple):
    actors: tuple
    error: Optional[str] = None

    @property
    def poisoned(self):
        return self.error is not None


def sort_bag(messages):
    return tuple(sorted(messages))


def add_to_bag(bag, msg):
    return tuple(sorted(bag + (msg,)))


def remove_from_bag(bag, msg):
    i = bag.index(msg)
    return bag[:i] + bag[i + 1:]


def shift_all_times(state: GlobalState, delta: int, interval_mask=None) -> GlobalState:
    """Shift every clock, arrival and deadline by ``delta``.

    ``interval_mask`` maps actor index to a tuple of booleans flagging the
    state variables that hold absolute times; those are shifted as well.
    """
    actors = []
    for i, a in enumerate(state.actors):
        vars_ = a.vars
        if interval_mask is not None:
            mask = interval_mask[i]
            vars_ = tuple(
                v + delta if m and v is not None else v for v, m in zip(vars_, mask)
            )
        actors.append(
            LocalState(vars_, tuple(m.shifted(delta) for m in a.bag), a.time + delta)
        )
    return GlobalState(tuple(actors), state.error)
