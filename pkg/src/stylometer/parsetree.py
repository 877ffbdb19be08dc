"""Penn Treebank bracketed trees and lexicalized production-rule features."""

import re
from dataclasses import dataclass
from typing import NamedTuple

TOP = "TOP"

_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class ParseTree:
    """A constituent. Preterminals carry ``terminal`` and have no children."""

    label: str
    children: tuple = ()
    terminal: str | None = None

    @property
    def is_preterminal(self):
        return self.terminal is not None

    def terminals(self):
        if self.is_preterminal:
            return [self.terminal]
        out = []
        for c in self.children:
            out.extend(c.terminals())
        return out

    def __str__(self):
        return serialize(self)


class RuleFeature(NamedTuple):
    grandparent: str
    parent: str
    child: str

    def __str__(self):
        return f"{self.grandparent}^{self.parent}->{self.child}"


def serialize(tree):
    if tree.is_preterminal:
        return f"({tree.label} {tree.terminal})"
    return f"({tree.label} " + " ".join(serialize(c) for c in tree.children) + ")"


def parse_ptb(s):
    """Parse one bracketed tree such as ``(S (NP (PRP He)) (VP (VBD ran)))``.

    A ``ROOT`` or unlabeled outer wrapper with a single child is removed.
    """
    tokens = [(m.group(), m.start()) for m in _TOKEN_RE.finditer(s)]
    for (tok, pos), nxt in zip(tokens, tokens[1:] + [(None, None)]):
        if tok not in "()" and nxt[0] == "(" and nxt[1] == pos + len(tok):
            raise TreeError(f"parenthesis embedded in leaf {tok!r} at position {nxt[1]}")
    if not tokens:
        raise TreeError("empty tree string")
    if tokens[0][0] != "(":
        raise TreeError(f"tree must start with '(' (position {tokens[0][1]})")

    # stack of [label, children, terminal, open_pos]
    stack = []
    root = None
    i = 0
    while i < len(tokens):
        tok, pos = tokens[i]
        if root is not None:
            if tok == ")":
                raise TreeError(f"unbalanced ')' at position {pos}")
            raise TreeError(f"unexpected content after tree at position {pos}")
        if tok == "(":
            label = ""
            if i + 1 < len(tokens) and tokens[i + 1][0] not in "()":
                label = tokens[i + 1][0]
                i += 1
            elif i + 1 < len(tokens) and tokens[i + 1][0] == ")":
                raise TreeError(f"empty constituent '()' at position {pos}")
            stack.append([label, [], None, pos])
        elif tok == ")":
            if not stack:
                raise TreeError(f"unbalanced ')' at position {pos}")
            label, children, terminal, open_pos = stack.pop()
            if terminal is not None:
                node = ParseTree(label, (), terminal)
            elif children:
                node = ParseTree(label, tuple(children))
            else:
                raise TreeError(f"constituent {label!r} at position {open_pos} has no children")
            if stack:
                stack[-1][1].append(node)
                if stack[-1][2] is not None:
                    raise TreeError(f"node {stack[-1][0]!r} mixes a word and subtrees")
            else:
                root = node
        else:
            if not stack:
                raise TreeError(f"word {tok!r} outside brackets at position {pos}")
            top = stack[-1]
            if top[1]:
                raise TreeError(f"node {top[0]!r} mixes a word and subtrees at position {pos}")
            if top[2] is not None:
                raise TreeError(f"node {top[0]!r} has more than one word at position {pos}")
            if not top[0]:
                raise TreeError(f"word {tok!r} without a label at position {pos}")
            top[2] = tok
        i += 1
    if stack:
        raise TreeError(f"unbalanced '(' opened at position {stack[-1][3]}")
    while root.label in ("", "ROOT") and len(root.children) == 1:
        root = root.children[0]
    if not root.label:
        raise TreeError("outer wrapper without a label must have exactly one child")
    return root


def production_rule_features(tree):
    """One ``grandparent^parent->word`` feature per terminal, in tree order."""
    out = []

    def walk(node, parent_label):
        if node.is_preterminal:
            out.append(RuleFeature(parent_label, node.label, node.terminal.lower()))
            return
        for c in node.children:
            walk(c, node.label)

    walk(tree, TOP)
    return out
