"""Clinical-domain ontology: a shallow rooted forest of named categories.

The ontology file format is line oriented: one node per line, two spaces of
indentation per level, ``#`` starts a comment. Leaf categories are the nodes
without children; a leaf may repeat its parent's name to act as the parent's
catch-all bucket.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import OntologyParseError

MAX_DEPTH = 4
INDENT = "  "

# Level-1 domain names a registry is allowed to use.
ROOT_DOMAINS = ("Cognitive", "Motor", "Somatic")

LeafPath = tuple[str, ...]


@dataclass
class OntologyNode:
    name: str
    level: int
    children: list["OntologyNode"] = field(default_factory=list)
    parent: "OntologyNode | None" = field(default=None, repr=False, compare=False)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def path(self) -> LeafPath:
        names = []
        node: OntologyNode | None = self
        while node is not None:
            names.append(node.name)
            node = node.parent
        return tuple(reversed(names))


@dataclass
class OntologyTree:
    roots: list[OntologyNode] = field(default_factory=list)

    def nodes(self):
        """All nodes in document order."""
        stack = list(reversed(self.roots))
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self) -> list[OntologyNode]:
        return [n for n in self.nodes() if n.is_leaf]

    def leaf_paths(self) -> list[LeafPath]:
        return [n.path() for n in self.leaves()]

    def resolve(self, path: LeafPath) -> OntologyNode | None:
        """Follow a full path from a root; None when any segment is unknown."""
        level = {n.name: n for n in self.roots}
        node = None
        for name in path:
            node = level.get(name)
            if node is None:
                return None
            level = {c.name: c for c in node.children}
        return node

    def resolve_leaf(self, path: LeafPath) -> OntologyNode | None:
        node = self.resolve(path)
        if node is None or not node.is_leaf:
            return None
        return node


def parse_leaf_path(text: str) -> LeafPath:
    parts = tuple(p.strip() for p in text.split("/"))
    if any(not p for p in parts):
        raise ValueError(f"malformed leaf path: {text!r}")
    return parts


def format_leaf_path(path: LeafPath) -> str:
    return "/".join(path)


def parse_ontology(text: str, file: str | None = None) -> OntologyTree:
    """Parse the indented ontology format into a tree.

    Raises OntologyParseError (with line number) for: empty input, bad
    indentation, depth over MAX_DEPTH, duplicate sibling names, or a node
    indented deeper than one level below its predecessor.
    """
    tree = OntologyTree()
    stack: list[OntologyNode] = []  # stack[i] = current node at level i+1
    seen_any = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        seen_any = True
        stripped = line.lstrip(" ")
        indent = len(line) - len(stripped)
        if indent % len(INDENT) != 0:
            raise OntologyParseError(
                f"indentation must be a multiple of {len(INDENT)} spaces", lineno, file
            )
        level = indent // len(INDENT) + 1
        if level > MAX_DEPTH:
            raise OntologyParseError(
                f"depth {level} exceeds maximum of {MAX_DEPTH}", lineno, file
            )
        if level > len(stack) + 1:
            raise OntologyParseError(
                f"node {stripped!r} at level {level} has no parent at level {level - 1}",
                lineno,
                file,
            )
        name = stripped
        del stack[level - 1 :]
        siblings = tree.roots if level == 1 else stack[-1].children
        if any(s.name == name for s in siblings):
            raise OntologyParseError(
                f"duplicate sibling name {name!r} at level {level}", lineno, file
            )
        parent = stack[-1] if stack else None
        node = OntologyNode(name=name, level=level, parent=parent)
        siblings.append(node)
        stack.append(node)
    if not seen_any:
        raise OntologyParseError("ontology file is empty", 1, file)
    return tree


def serialize_ontology(tree: OntologyTree) -> str:
    lines = [INDENT * (node.level - 1) + node.name for node in tree.nodes()]
    return "\n".join(lines) + "\n"
