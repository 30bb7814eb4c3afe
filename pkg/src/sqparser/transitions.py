"""Shift-reduce transition systems: arc-standard dependency parsing and
top-down constituent parsing.

States are plain mutable objects owned by their caller; ``apply`` mutates
the given state in place and returns it.  ``legal_actions`` /
``legal_action_ids`` are total functions of the state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .treebank import ConstTree, DepSentence, Token, Vocabulary

DEPENDENCY = "dependency"
CONSTITUENT = "constituent"

# Label used for the implicit root arc when reading a finished parse out
# of a terminal state (the surviving stack item has no incoming action).
ROOT_LABEL = "root"

# Hard cap on simultaneously open nonterminals; keeps greedy decoding
# finite and is unreachable for real sentences.
MAX_OPEN_NTS = 100

SHIFT = "shift"
LEFT_ARC = "left_arc"
RIGHT_ARC = "right_arc"
NT = "nt"
REDUCE = "reduce"


class IllegalActionError(ValueError):
    """Action applied in a state where it is not legal."""


@dataclass(frozen=True)
class Action:
    kind: str
    label: str | None = None  # relation for arcs, nonterminal for NT

    def __post_init__(self):
        needs_label = self.kind in (LEFT_ARC, RIGHT_ARC, NT)
        if needs_label and not self.label:
            raise ValueError(f"{self.kind} action requires a label")
        if not needs_label and self.label is not None:
            raise ValueError(f"{self.kind} action takes no label")

    def __str__(self):
        if self.kind == SHIFT:
            return "SHIFT"
        if self.kind == REDUCE:
            return "REDUCE"
        if self.kind == LEFT_ARC:
            return f"LEFT-ARC({self.label})"
        if self.kind == RIGHT_ARC:
            return f"RIGHT-ARC({self.label})"
        return f"NT({self.label})"

    @classmethod
    def parse(cls, text: str) -> "Action":
        if text == "SHIFT":
            return cls(SHIFT)
        if text == "REDUCE":
            return cls(REDUCE)
        for prefix, kind in (("LEFT-ARC(", LEFT_ARC), ("RIGHT-ARC(", RIGHT_ARC), ("NT(", NT)):
            if text.startswith(prefix) and text.endswith(")"):
                return cls(kind, text[len(prefix):-1])
        raise ValueError(f"unrecognized action string {text!r}")


def format_actions(actions: list[Action]) -> str:
    return " ".join(str(a) for a in actions)


def parse_actions(line: str) -> list[Action]:
    return [Action.parse(tok) for tok in line.split()]


# ---------------------------------------------------------------------------
# Dependency states (arc-standard)
# ---------------------------------------------------------------------------

@dataclass
class DepState:
    """Arc-standard configuration: stack of token indices (top last),
    queue cursor, and the arc set built so far."""

    n: int
    stack: list[int] = field(default_factory=list)
    cursor: int = 1  # next queue index to shift, 1-based
    arcs: dict[int, tuple[int, str]] = field(default_factory=dict)  # dependent -> (head, label)

    @classmethod
    def initial(cls, n: int) -> "DepState":
        if n < 1:
            raise ValueError("sentence must be non-empty")
        return cls(n=n)

    @property
    def queue_size(self) -> int:
        return self.n - self.cursor + 1

    def check_invariants(self):
        # Every token is on the stack, in the unconsumed queue, or removed
        # as a dependent -- exactly once.
        on_stack = set(self.stack)
        in_queue = set(range(self.cursor, self.n + 1))
        removed = set(self.arcs)
        assert len(on_stack) == len(self.stack)
        assert not (on_stack & in_queue) and not (on_stack & removed) and not (in_queue & removed)
        assert on_stack | in_queue | removed == set(range(1, self.n + 1))
        assert len(self.arcs) <= self.n - 1


# ---------------------------------------------------------------------------
# Constituent states (top-down)
# ---------------------------------------------------------------------------

class OpenNT:
    __slots__ = ("label",)

    def __init__(self, label: str):
        self.label = label

    def __repr__(self):
        return f"OpenNT({self.label})"

    def __eq__(self, other):
        return isinstance(other, OpenNT) and self.label == other.label


@dataclass
class ConstState:
    """Top-down configuration: stack of OpenNT / ConstTree items (completed
    subtrees and shifted terminals are both ConstTree), queue cursor, and
    the count of open nonterminals."""

    tokens: list[Token]
    stack: list = field(default_factory=list)
    cursor: int = 1
    open_count: int = 0
    max_open_nts: int = MAX_OPEN_NTS

    @classmethod
    def initial(cls, tokens: list[Token], max_open_nts: int = MAX_OPEN_NTS) -> "ConstState":
        if not tokens:
            raise ValueError("sentence must be non-empty")
        return cls(tokens=list(tokens), max_open_nts=max_open_nts)

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def queue_size(self) -> int:
        return self.n - self.cursor + 1

    def check_invariants(self):
        assert self.open_count == sum(1 for it in self.stack if isinstance(it, OpenNT))


State = DepState | ConstState


# ---------------------------------------------------------------------------
# Legality, application, termination
# ---------------------------------------------------------------------------

def legal_kinds(state: State) -> set[str]:
    """The set of legal action kinds (label choice is unconstrained)."""
    if isinstance(state, DepState):
        kinds = set()
        if state.queue_size > 0:
            kinds.add(SHIFT)
        if len(state.stack) >= 2:
            kinds.add(LEFT_ARC)
            kinds.add(RIGHT_ARC)
        return kinds
    kinds = set()
    queue_nonempty = state.queue_size > 0
    if queue_nonempty and state.open_count >= 1:
        kinds.add(SHIFT)
    if queue_nonempty and state.open_count < state.max_open_nts:
        kinds.add(NT)
    if (state.stack and not isinstance(state.stack[-1], OpenNT)
            and state.open_count >= 1
            and not (state.open_count == 1 and queue_nonempty)):
        kinds.add(REDUCE)
    return kinds


def legal_actions(state: State, labels: list[str]) -> set[Action]:
    """All legal actions given the relation/nonterminal inventory."""
    out = set()
    for kind in legal_kinds(state):
        if kind in (SHIFT, REDUCE):
            out.add(Action(kind))
        else:
            out.update(Action(kind, lab) for lab in labels)
    return out


def legal_action_mask(state: State, vocab: Vocabulary) -> list[bool]:
    """Boolean mask over the action vocabulary, aligned with action ids."""
    kinds = legal_kinds(state)
    mask = []
    for text in vocab.action_strings():
        kind = Action.parse(text).kind
        mask.append(kind in kinds)
    return mask


def is_legal(state: State, action: Action) -> bool:
    return action.kind in legal_kinds(state)


def apply(state: State, action: Action) -> State:
    """Apply one induction rule in place.  Raises IllegalActionError if the
    action is not legal in this state."""
    if not is_legal(state, action):
        raise IllegalActionError(f"action {action} is illegal in state {_summary(state)}")
    if isinstance(state, DepState):
        if action.kind == SHIFT:
            state.stack.append(state.cursor)
            state.cursor += 1
        elif action.kind == LEFT_ARC:
            s0 = state.stack.pop()
            s1 = state.stack.pop()
            state.arcs[s1] = (s0, action.label)
            state.stack.append(s0)
        else:  # RIGHT_ARC
            s0 = state.stack.pop()
            state.arcs[s0] = (state.stack[-1], action.label)
        return state
    if action.kind == SHIFT:
        tok = state.tokens[state.cursor - 1]
        state.stack.append(ConstTree(token=tok))
        state.cursor += 1
    elif action.kind == NT:
        state.stack.append(OpenNT(action.label))
        state.open_count += 1
    else:  # REDUCE
        children = []
        while not isinstance(state.stack[-1], OpenNT):
            children.append(state.stack.pop())
        open_nt = state.stack.pop()
        children.reverse()
        state.stack.append(ConstTree(label=open_nt.label, children=children))
        state.open_count -= 1
    return state


def is_terminal(state: State) -> bool:
    if isinstance(state, DepState):
        return state.queue_size == 0 and len(state.stack) == 1
    return (state.queue_size == 0 and len(state.stack) == 1
            and state.open_count == 0 and not isinstance(state.stack[0], OpenNT))


def read_out(state: State, tokens: list[Token] | None = None) -> DepSentence | ConstTree:
    """Extract the finished structure from a terminal state.  For
    dependency states the surviving stack item becomes the root."""
    if not is_terminal(state):
        raise IllegalActionError(f"read_out on non-terminal state {_summary(state)}")
    if isinstance(state, DepState):
        if tokens is None:
            raise ValueError("dependency read_out needs the token list")
        heads, labels = [], []
        for i in range(1, state.n + 1):
            if i == state.stack[0]:
                heads.append(0)
                labels.append(ROOT_LABEL)
            else:
                head, label = state.arcs[i]
                heads.append(head)
                labels.append(label)
        return DepSentence(list(tokens), heads, labels)
    return state.stack[0]


def _summary(state: State) -> str:
    if isinstance(state, DepState):
        return f"(|S|={len(state.stack)}, |Q|={state.queue_size}, |L|={len(state.arcs)})"
    return f"(|S|={len(state.stack)}, |Q|={state.queue_size}, open={state.open_count})"


# ---------------------------------------------------------------------------
# Stack/queue boundary and gold-sequence simulation
# ---------------------------------------------------------------------------

def stack_boundary(state: State) -> int:
    """The sentence position t splitting the encoder into a stack segment
    [1, t] and a queue segment [t+1, n]; 0 means the stack is empty."""
    if isinstance(state, DepState):
        return state.stack[-1] if state.stack else 0
    # Constituent items never release their words, so the split falls
    # after the most recently shifted word.
    return state.cursor - 1


def initial_state(sentence: DepSentence | ConstTree | list[Token], mode: str,
                  max_open_nts: int = MAX_OPEN_NTS) -> State:
    if isinstance(sentence, DepSentence):
        tokens = sentence.tokens
    elif isinstance(sentence, ConstTree):
        tokens = sentence.leaves()
    else:
        tokens = sentence
    if mode == DEPENDENCY:
        return DepState.initial(len(tokens))
    if mode == CONSTITUENT:
        return ConstState.initial(tokens, max_open_nts=max_open_nts)
    raise ValueError(f"unknown mode {mode!r}")


def simulate(tokens: list[Token], actions: list[Action], mode: str) -> tuple[State, list[int]]:
    """Run a gold action sequence from the initial state, returning the
    final state and the boundary t observed before each action.

    Raises IllegalActionError as soon as an action is illegal, so a
    desynced oracle fails loudly instead of producing garbage."""
    state = initial_state(tokens, mode)
    boundaries = []
    for action in actions:
        boundaries.append(stack_boundary(state))
        apply(state, action)
    return state, boundaries
