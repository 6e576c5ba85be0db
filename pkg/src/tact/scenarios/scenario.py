"""Scenario: a composed model plus the assertions to check on it."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..semantics.equivalence import EquivalenceConfig
from ..verify.assertions import parse_assertion


@dataclass
class Scenario:
    name: str
    composition: object  # patterns.compose.Composition
    assertions: list = field(default_factory=list)  # verify.assertions.Assertion
    expected: dict = field(default_factory=dict)  # assertion name -> True (pass) / False
    description: str = ""
    max_states: Optional[int] = None
    tags: tuple = ()

    @property
    def model(self):
        return self.composition.model

    @property
    def source(self):
        return self.composition.source

    @property
    def equivalence_config(self):
        return EquivalenceConfig.from_model(self.model)

    def with_assertions(self, specs):
        """Parse ``(name, text)`` pairs against this scenario's model."""
        frags = self.composition.fragments
        self.assertions = [parse_assertion(n, t, self.model, frags) for n, t in specs]
        return self
