"""Gold-structure to gold-action-sequence conversion.

Both oracles are pure functions.  Their defining property, exercised by
the test suite: replaying the returned actions through the transition
system reproduces the input structure exactly.
"""

from __future__ import annotations

from .transitions import (
    LEFT_ARC, NT, REDUCE, RIGHT_ARC, SHIFT,
    Action,
)
from .treebank import ConstTree, DepSentence


class OracleError(ValueError):
    """No gold action exists for the current simulated state (the input is
    outside the system's derivable class, e.g. non-projective)."""


def dep_oracle(gold: DepSentence) -> list[Action]:
    """Standard arc-standard oracle.

    LEFT-ARC when s1 depends on s0, RIGHT-ARC when s0 depends on s1 and
    s0 has no unattached dependents left, otherwise SHIFT.  Dependent
    exhaustion is tracked with counters, so the oracle is linear time.
    """
    n = len(gold)
    pending = [0] * (n + 1)  # unattached dependents per head, 1-based
    for head in gold.heads:
        if head != 0:
            pending[head] += 1

    actions: list[Action] = []
    stack: list[int] = []
    cursor = 1
    # A complete derivation has exactly n shifts and n-1 arcs.
    for _ in range(2 * n - 1):
        if len(stack) >= 2:
            s0, s1 = stack[-1], stack[-2]
            if gold.heads[s1 - 1] == s0 and pending[s1] == 0:
                actions.append(Action(LEFT_ARC, gold.labels[s1 - 1]))
                stack.pop()
                stack.pop()
                stack.append(s0)
                pending[s0] -= 1
                continue
            if gold.heads[s0 - 1] == s1 and pending[s0] == 0:
                actions.append(Action(RIGHT_ARC, gold.labels[s0 - 1]))
                stack.pop()
                pending[s1] -= 1
                continue
        if cursor > n:
            raise OracleError(
                f"stuck after {len(actions)} actions (sentence is not projective)"
            )
        actions.append(Action(SHIFT))
        stack.append(cursor)
        cursor += 1
    return actions


def const_oracle(gold: ConstTree) -> list[Action]:
    """Depth-first preorder: NT at each internal node, SHIFT at each leaf,
    REDUCE once a node's children are complete."""
    actions: list[Action] = []

    def walk(node: ConstTree):
        if node.is_leaf:
            actions.append(Action(SHIFT))
            return
        actions.append(Action(NT, node.label))
        for child in node.children:
            walk(child)
        actions.append(Action(REDUCE))

    walk(gold)
    return actions
