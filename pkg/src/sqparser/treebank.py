"""Treebank I/O: CoNLL dependency files, bracketed constituent files,
vocabularies and pretrained word vectors.

Everything here is plain data.  Objects are immutable after construction
and safe to share across threads.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

UNK = "<unk>"

# POS tags treated as punctuation and excluded from attachment scores.
PUNCT_POS = {"``", "''", ":", ",", "."}


class TreebankError(ValueError):
    """Malformed or invalid treebank input."""


@dataclass(frozen=True)
class Token:
    form: str
    pos: str
    index: int  # 1-based position in the sentence

    def __post_init__(self):
        if not self.form:
            raise TreebankError("token form must be non-empty")
        if self.index < 1:
            raise TreebankError(f"token index must be >= 1, got {self.index}")


@dataclass
class DepSentence:
    """A dependency-annotated sentence.

    heads[i] is the 1-based head of token i+1, with 0 for the root.
    """

    tokens: list[Token]
    heads: list[int]
    labels: list[str]

    def __post_init__(self):
        self.validate()

    def __len__(self):
        return len(self.tokens)

    def validate(self):
        n = len(self.tokens)
        if not (len(self.heads) == len(self.labels) == n):
            raise TreebankError("tokens/heads/labels length mismatch")
        for i, tok in enumerate(self.tokens):
            if tok.index != i + 1:
                raise TreebankError(
                    f"token indices must be contiguous from 1, got {tok.index} at position {i + 1}"
                )
        for i, h in enumerate(self.heads):
            if h == i + 1:
                raise TreebankError(f"self-loop at token {i + 1} ({self.tokens[i].form})")
            if not 0 <= h <= n:
                raise TreebankError(f"head {h} of token {i + 1} out of range 0..{n}")
        roots = [i + 1 for i, h in enumerate(self.heads) if h == 0]
        if len(roots) != 1:
            raise TreebankError(f"expected exactly one root, found {len(roots)}")
        # Every token must be reachable from the root (connected + acyclic).
        children: dict[int, list[int]] = {}
        for i, h in enumerate(self.heads):
            children.setdefault(h, []).append(i + 1)
        seen = set()
        stack = [0]
        while stack:
            node = stack.pop()
            for c in children.get(node, []):
                if c in seen:
                    raise TreebankError(f"cycle detected at token {c}")
                seen.add(c)
                stack.append(c)
        if len(seen) != n:
            raise TreebankError("dependency structure is not a connected tree")

    @property
    def root(self) -> int:
        return self.heads.index(0) + 1

    def is_projective(self) -> bool:
        """True iff no two arcs cross (virtual root node 0 included)."""
        arcs = [(min(h, i + 1), max(h, i + 1)) for i, h in enumerate(self.heads)]
        for a in range(len(arcs)):
            la, ra = arcs[a]
            for b in range(a + 1, len(arcs)):
                lb, rb = arcs[b]
                if la < lb < ra < rb or lb < la < rb < ra:
                    return False
        return True


class ConstTree:
    """Constituent tree node: either an internal node with a nonterminal
    label and >= 1 children, or a leaf wrapping a Token."""

    __slots__ = ("label", "children", "token")

    def __init__(self, label: str | None = None, children: list["ConstTree"] | None = None,
                 token: Token | None = None):
        if token is not None:
            if label is not None or children:
                raise TreebankError("leaf node cannot carry a label or children")
            self.label = None
            self.children = []
            self.token = token
        else:
            if not label:
                raise TreebankError("internal node needs a nonterminal label")
            if not children:
                raise TreebankError(f"internal node {label!r} has zero children")
            self.label = label
            self.children = list(children)
            self.token = None

    @property
    def is_leaf(self) -> bool:
        return self.token is not None

    def leaves(self) -> list[Token]:
        if self.is_leaf:
            return [self.token]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out

    def spans(self) -> list[tuple[str, int, int]]:
        """All labeled spans (label, start, end), 1-based inclusive, preorder."""
        out = []

        def walk(node):
            if node.is_leaf:
                return node.token.index, node.token.index
            lo, hi = None, None
            for c in node.children:
                clo, chi = walk(c)
                lo = clo if lo is None else min(lo, clo)
                hi = chi if hi is None else max(hi, chi)
            out.append((node.label, lo, hi))
            return lo, hi

        walk(self)
        return out

    def nonterminals(self) -> set[str]:
        if self.is_leaf:
            return set()
        out = {self.label}
        for c in self.children:
            out |= c.nonterminals()
        return out

    def __eq__(self, other):
        if not isinstance(other, ConstTree):
            return NotImplemented
        if self.is_leaf != other.is_leaf:
            return False
        if self.is_leaf:
            return self.token == other.token
        return self.label == other.label and self.children == other.children

    def __repr__(self):
        return f"ConstTree({write_tree(self)!r})"


# ---------------------------------------------------------------------------
# CoNLL reading and writing
# ---------------------------------------------------------------------------

def read_conll(text: str) -> list[DepSentence]:
    """Parse CoNLL-X style content: 10 tab-separated columns, blank line
    between sentences.  Uses ID, FORM, POS (column 5), HEAD, DEPREL."""
    sentences = []
    rows: list[tuple[int, list[str]]] = []

    def flush():
        if not rows:
            return
        tokens, heads, labels = [], [], []
        for lineno, cols in rows:
            try:
                idx = int(cols[0])
                head = int(cols[6])
            except ValueError as e:
                raise TreebankError(f"line {lineno}: non-numeric ID or HEAD field") from e
            tokens.append(Token(form=cols[1], pos=cols[4], index=idx))
            heads.append(head)
            labels.append(cols[7])
        first = rows[0][0]
        try:
            sentences.append(DepSentence(tokens, heads, labels))
        except TreebankError as e:
            raise TreebankError(
                f"sentence starting at line {first} (#{len(sentences) + 1}): {e}"
            ) from e
        rows.clear()

    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip():
            flush()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise TreebankError(f"line {lineno}: expected 10 tab-separated columns, got {len(cols)}")
        rows.append((lineno, cols))
    flush()
    return sentences


def write_conll(sentences: list[DepSentence]) -> str:
    chunks = []
    for sent in sentences:
        lines = []
        for tok, head, label in zip(sent.tokens, sent.heads, sent.labels):
            lines.append("\t".join([
                str(tok.index), tok.form, "_", "_", tok.pos, "_",
                str(head), label, "_", "_",
            ]))
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + ("\n" if chunks else "")


# ---------------------------------------------------------------------------
# Bracketed tree reading and writing
# ---------------------------------------------------------------------------

def _strip_function_tag(label: str) -> str:
    # NP-SBJ -> NP, but leave labels like -NONE- alone.
    if label.startswith("-"):
        return label
    return label.split("-")[0].split("=")[0]


def _parse_tree(text: str, pos0: int, next_index: list[int]) -> tuple[ConstTree, int]:
    i = pos0
    if text[i] != "(":
        raise TreebankError(f"character {i}: expected '('")
    i += 1
    while i < len(text) and text[i].isspace():
        i += 1
    start = i
    while i < len(text) and not text[i].isspace() and text[i] not in "()":
        i += 1
    label = text[start:i]
    if not label:
        raise TreebankError(f"character {start}: missing node label")
    children: list[ConstTree] = []
    leaf_form = None
    while True:
        while i < len(text) and text[i].isspace():
            i += 1
        if i >= len(text):
            raise TreebankError(f"character {i}: unbalanced parentheses (unexpected end of input)")
        if text[i] == ")":
            i += 1
            break
        if text[i] == "(":
            child, i = _parse_tree(text, i, next_index)
            children.append(child)
        else:
            start = i
            while i < len(text) and not text[i].isspace() and text[i] not in "()":
                i += 1
            if leaf_form is not None or children:
                raise TreebankError(f"character {start}: mixed words and subtrees under {label!r}")
            leaf_form = text[start:i]
    if leaf_form is not None:
        next_index[0] += 1
        return ConstTree(token=Token(form=leaf_form, pos=label, index=next_index[0])), i
    if not children:
        raise TreebankError(f"internal node {label!r} has zero children")
    return ConstTree(label=_strip_function_tag(label), children=children), i


def read_tree(line: str) -> ConstTree:
    next_index = [0]
    i = 0
    while i < len(line) and line[i].isspace():
        i += 1
    tree, i = _parse_tree(line, i, next_index)
    while i < len(line) and line[i].isspace():
        i += 1
    if i != len(line):
        raise TreebankError(f"character {i}: trailing content after tree")
    if tree.is_leaf:
        raise TreebankError("top-level node must be a constituent, not a bare leaf")
    return tree


def read_brackets(text: str) -> list[ConstTree]:
    """One tree per line in nested-parenthesis form, leaves as (POS form)."""
    trees = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            trees.append(read_tree(line))
        except TreebankError as e:
            raise TreebankError(f"line {lineno}: {e}") from e
    return trees


def write_tree(tree: ConstTree) -> str:
    if tree.is_leaf:
        return f"({tree.token.pos} {tree.token.form})"
    inner = " ".join(write_tree(c) for c in tree.children)
    return f"({tree.label} {inner})"


def write_brackets(trees: list[ConstTree]) -> str:
    return "\n".join(write_tree(t) for t in trees) + ("\n" if trees else "")


# ---------------------------------------------------------------------------
# Vocabulary
# ---------------------------------------------------------------------------

@dataclass
class Vocabulary:
    """Dense 0-based symbol tables for words, POS tags, actions and
    structural labels (dependency relations or nonterminals).

    Word id 0 is always the unknown word; any form missing from the map
    resolves to it.
    """

    word_to_id: dict[str, int]
    pos_to_id: dict[str, int]
    action_to_id: dict[str, int]
    label_to_id: dict[str, int]
    word_freq: dict[str, int] = field(default_factory=dict)

    @property
    def unk_id(self) -> int:
        return self.word_to_id[UNK]

    def word_id(self, form: str) -> int:
        return self.word_to_id.get(form, self.unk_id)

    def pos_id(self, pos: str) -> int:
        if pos not in self.pos_to_id:
            raise KeyError(f"unknown POS tag {pos!r}")
        return self.pos_to_id[pos]

    @property
    def n_words(self):
        return len(self.word_to_id)

    @property
    def n_pos(self):
        return len(self.pos_to_id)

    @property
    def n_actions(self):
        return len(self.action_to_id)

    @property
    def n_labels(self):
        return len(self.label_to_id)

    def action_strings(self) -> list[str]:
        out = [None] * len(self.action_to_id)
        for s, i in self.action_to_id.items():
            out[i] = s
        return out

    def to_text(self) -> str:
        lines = []
        for kind, table in (
            ("word", self.word_to_id),
            ("pos", self.pos_to_id),
            ("action", self.action_to_id),
            ("label", self.label_to_id),
        ):
            for sym, idx in sorted(table.items(), key=lambda kv: kv[1]):
                lines.append(f"{kind}\t{sym}\t{idx}")
        for sym, cnt in sorted(self.word_freq.items()):
            lines.append(f"wordfreq\t{sym}\t{cnt}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Vocabulary":
        tables = {"word": {}, "pos": {}, "action": {}, "label": {}}
        freq = {}
        for lineno, line in enumerate(text.split("\n"), start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise TreebankError(f"vocabulary line {lineno}: expected 3 tab-separated fields")
            kind, sym, val = parts
            if kind == "wordfreq":
                freq[sym] = int(val)
            elif kind in tables:
                tables[kind][sym] = int(val)
            else:
                raise TreebankError(f"vocabulary line {lineno}: unknown kind {kind!r}")
        vocab = cls(tables["word"], tables["pos"], tables["action"], tables["label"], freq)
        for name, table in tables.items():
            ids = sorted(table.values())
            if ids != list(range(len(ids))):
                raise TreebankError(f"{name} ids are not dense 0-based")
        if UNK not in vocab.word_to_id:
            raise TreebankError("vocabulary is missing the unknown-word entry")
        return vocab


def dep_action_inventory(relations: list[str]) -> list[str]:
    out = ["SHIFT"]
    out += [f"LEFT-ARC({r})" for r in relations]
    out += [f"RIGHT-ARC({r})" for r in relations]
    return out


def const_action_inventory(nonterminals: list[str]) -> list[str]:
    return ["SHIFT", "REDUCE"] + [f"NT({x})" for x in nonterminals]


def build_vocab(treebank: list, min_freq: int = 2) -> Vocabulary:
    """Build vocabulary tables from a list of DepSentence or ConstTree.

    Words below min_freq collapse to the unknown id.  The action table
    enumerates exactly the action set induced by the formalism and the
    observed label/nonterminal inventory.
    """
    if not treebank:
        raise TreebankError("cannot build a vocabulary from an empty treebank")
    freq: dict[str, int] = {}
    pos_set: set[str] = set()
    labels: set[str] = set()
    is_dep = isinstance(treebank[0], DepSentence)
    for item in treebank:
        if is_dep != isinstance(item, DepSentence):
            raise TreebankError("mixed dependency/constituent treebank")
        tokens = item.tokens if is_dep else item.leaves()
        for tok in tokens:
            freq[tok.form] = freq.get(tok.form, 0) + 1
            pos_set.add(tok.pos)
        if is_dep:
            # The root arc is implicit in the transition system, so its
            # relation never becomes an action label.
            for head, lab in zip(item.heads, item.labels):
                if head != 0:
                    labels.add(lab)
        else:
            labels |= item.nonterminals()

    word_to_id = {UNK: 0}
    for form in sorted(freq):
        if freq[form] >= min_freq:
            word_to_id[form] = len(word_to_id)
    pos_to_id = {p: i for i, p in enumerate(sorted(pos_set))}
    label_list = sorted(labels)
    label_to_id = {l: i for i, l in enumerate(label_list)}
    inventory = dep_action_inventory(label_list) if is_dep else const_action_inventory(label_list)
    action_to_id = {a: i for i, a in enumerate(inventory)}
    return Vocabulary(word_to_id, pos_to_id, action_to_id, label_to_id, freq)


def filter_projective(sentences: list[DepSentence]) -> list[DepSentence]:
    """Drop non-projective sentences (not derivable by the shift/arc
    system), logging how many were skipped."""
    kept = [s for s in sentences if s.is_projective()]
    skipped = len(sentences) - len(kept)
    if skipped:
        log.info("skipped %d non-projective sentence(s) of %d", skipped, len(sentences))
    return kept


# ---------------------------------------------------------------------------
# Pretrained vectors
# ---------------------------------------------------------------------------

class PretrainedVectors:
    """Fixed word vectors: one entry per line, word then space-separated
    floats.  Never updated by training."""

    def __init__(self, vectors: dict[str, list[float]], dim: int, duplicates: int = 0):
        self.vectors = vectors
        self.dim = dim
        self.duplicates = duplicates

    def get(self, word: str):
        return self.vectors.get(word)

    def __len__(self):
        return len(self.vectors)


def load_vectors(text: str) -> PretrainedVectors:
    vectors: dict[str, list[float]] = {}
    dim = None
    duplicates = 0
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        parts = line.split()
        word, values = parts[0], parts[1:]
        if dim is None:
            dim = len(values)
            if dim == 0:
                raise TreebankError(f"line {lineno}: entry {word!r} has no vector components")
        elif len(values) != dim:
            raise TreebankError(
                f"line {lineno}: dimension mismatch, expected {dim} got {len(values)}"
            )
        if word in vectors:
            duplicates += 1
        try:
            vectors[word] = [float(v) for v in values]
        except ValueError as e:
            raise TreebankError(f"line {lineno}: non-numeric vector component") from e
    if dim is None:
        raise TreebankError("empty vector file: cannot infer dimension")
    if duplicates:
        log.warning("vector file contained %d duplicate word(s); last entry wins", duplicates)
    return PretrainedVectors(vectors, dim, duplicates)
