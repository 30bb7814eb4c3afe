"""Deterministic synthetic treebank generator.

Produces aligned constituent trees and (projective, by construction)
dependency sentences from a small hand-written grammar with head rules.
Used for desk-scale experiments and the test fixtures; real treebanks
plug in through the same file formats.

Prepositional phrases attach to the object noun or to the verb depending
on the preposition, so a parser must consult the queue to resolve the
attachment; clause coordination produces long sentences with repeated
patterns.  Both properties make the corpus discriminative between
decoder variants instead of trivially saturating.
"""

from __future__ import annotations

import random

from .treebank import ConstTree, DepSentence, Token

NAMES = ["Tom", "Mary", "John", "Sue", "Anna", "Bob", "Kim", "Lee"]
NOUNS = ["dog", "cat", "bird", "fish", "book", "car", "house", "tree",
         "apple", "garden", "child", "farmer", "teacher", "doctor",
         "river", "hill"]
PLURALS = ["dogs", "cats", "birds", "books", "apples", "tomatoes",
           "children", "farmers"]
VERBS_TRANS = ["likes", "sees", "finds", "takes", "wants", "helps",
               "follows", "carries"]
VERBS_INTRANS = ["sleeps", "runs", "smiles", "waits", "jumps", "swims"]
ADJECTIVES = ["red", "big", "small", "old", "young", "nice", "green",
              "happy", "quiet", "brave"]
DETERMINERS = ["the", "a", "every", "some", "this"]
ADVERBS = ["quickly", "quietly", "often", "today", "slowly"]

# Preposition identity decides PP attachment after an object noun:
# these modify the noun, the others modify the verb.
NOUN_PREPS = ["with", "near", "behind"]
VERB_PREPS = ["in", "on", "under"]


class _Node:
    """Grammar node: nonterminal with children, one head child, and a
    dependency relation for every non-head child."""

    __slots__ = ("label", "children", "head", "rels")

    def __init__(self, label, children, head, rels):
        self.label = label
        self.children = children
        self.head = head
        self.rels = rels


class _Leaf:
    __slots__ = ("pos", "form", "index")

    def __init__(self, pos, form):
        self.pos = pos
        self.form = form
        self.index = 0


class SentenceGenerator:
    def __init__(self, seed: int, min_len: int = 5, max_len: int = 25):
        self.rng = random.Random(seed)
        self.min_len = min_len
        self.max_len = max_len

    # -- grammar ------------------------------------------------------

    def np(self, depth: int) -> _Node:
        rng = self.rng
        roll = rng.random()
        if roll < 0.2:
            node = _Node("NP", [_Leaf("NNP", rng.choice(NAMES))], 0, [None])
        elif roll < 0.35:
            node = _Node("NP", [_Leaf("NNS", rng.choice(PLURALS))], 0, [None])
        else:
            kids = [_Leaf("DT", rng.choice(DETERMINERS))]
            rels = ["det"]
            for _ in range(rng.choices([0, 1, 2], weights=[6, 3, 1])[0]):
                kids.append(_Leaf("JJ", rng.choice(ADJECTIVES)))
                rels.append("amod")
            kids.append(_Leaf("NN", rng.choice(NOUNS)))
            rels.append(None)
            node = _Node("NP", kids, len(kids) - 1, rels)
        if depth < 3 and rng.random() < 0.18:
            pp = self.pp(depth + 1, noun_attached=True)
            node = _Node("NP", [node, pp], 0, [None, "prep"])
        if depth < 2 and rng.random() < 0.1:
            right = self.np(depth + 1)
            node = _Node("NP", [node, _Leaf("CC", "and"), right], 0, [None, "cc", "conj"])
        return node

    def pp(self, depth: int, noun_attached: bool) -> _Node:
        prep = self.rng.choice(NOUN_PREPS if noun_attached else VERB_PREPS)
        obj = self.np(depth + 1)
        return _Node("PP", [_Leaf("IN", prep), obj], 0, [None, "pobj"])

    def vp(self, depth: int) -> _Node:
        rng = self.rng
        if rng.random() < 0.3:
            kids = [_Leaf("VBZ", rng.choice(VERBS_INTRANS))]
            rels = [None]
            if rng.random() < 0.4:
                kids.append(_Leaf("RB", rng.choice(ADVERBS)))
                rels.append("advmod")
        else:
            verb = _Leaf("VBZ", rng.choice(VERBS_TRANS))
            obj = self.np(depth + 1)
            if rng.random() < 0.45:
                # Noun attachment hangs the PP inside the object NP;
                # verb attachment makes it a VP sister.
                if rng.random() < 0.5:
                    obj = _Node("NP", [obj, self.pp(depth + 1, noun_attached=True)],
                                0, [None, "prep"])
                    kids, rels = [verb, obj], [None, "dobj"]
                else:
                    pp = self.pp(depth + 1, noun_attached=False)
                    kids, rels = [verb, obj, pp], [None, "dobj", "prep"]
            else:
                kids, rels = [verb, obj], [None, "dobj"]
        return _Node("VP", kids, 0, rels)

    def clause(self) -> _Node:
        subj = self.np(0)
        pred = self.vp(0)
        return _Node("S", [subj, pred], 1, ["nsubj", None])

    def sentence_node(self) -> _Node:
        rng = self.rng
        clauses = [self.clause()]
        while len(clauses) < 3 and rng.random() < 0.22:
            clauses.append(self.clause())
        if len(clauses) == 1:
            kids = [clauses[0].children[0], clauses[0].children[1], _Leaf(".", ".")]
            return _Node("S", kids, 1, ["nsubj", None, "punct"])
        kids, rels = [clauses[0]], [None]
        for extra in clauses[1:]:
            kids.append(_Leaf("CC", "and"))
            rels.append("cc")
            kids.append(extra)
            rels.append("conj")
        kids.append(_Leaf(".", "."))
        rels.append("punct")
        return _Node("S", kids, 0, rels)

    # -- conversion ---------------------------------------------------

    @staticmethod
    def _leaves(node) -> list[_Leaf]:
        if isinstance(node, _Leaf):
            return [node]
        out = []
        for c in node.children:
            out.extend(SentenceGenerator._leaves(c))
        return out

    @staticmethod
    def _head_leaf(node) -> _Leaf:
        while isinstance(node, _Node):
            node = node.children[node.head]
        return node

    def generate(self) -> tuple[ConstTree, DepSentence]:
        while True:
            root = self.sentence_node()
            leaves = self._leaves(root)
            if self.min_len <= len(leaves) <= self.max_len:
                break
        for i, leaf in enumerate(leaves, start=1):
            leaf.index = i

        heads = [0] * len(leaves)
        labels = ["root"] * len(leaves)

        def collect(node):
            if isinstance(node, _Leaf):
                return
            h = self._head_leaf(node)
            for child, rel in zip(node.children, node.rels):
                if rel is not None:
                    d = self._head_leaf(child)
                    heads[d.index - 1] = h.index
                    labels[d.index - 1] = rel
                collect(child)

        collect(root)

        def to_tree(node) -> ConstTree:
            if isinstance(node, _Leaf):
                return ConstTree(token=Token(node.form, node.pos, node.index))
            return ConstTree(label=node.label, children=[to_tree(c) for c in node.children])

        tokens = [Token(l.form, l.pos, l.index) for l in leaves]
        return to_tree(root), DepSentence(tokens, heads, labels)


def generate_treebank(n_sentences: int, seed: int = 0, min_len: int = 5,
                      max_len: int = 25) -> tuple[list[ConstTree], list[DepSentence]]:
    """Generate aligned constituent and dependency annotations for
    n_sentences synthetic sentences."""
    gen = SentenceGenerator(seed, min_len, max_len)
    trees, sents = [], []
    for _ in range(n_sentences):
        tree, sent = gen.generate()
        trees.append(tree)
        sents.append(sent)
    return trees, sents
