"""
Line-oriented text formats for graphs, blowup data and (X, W) pairs, and a
dot exporter for figures.

Every file is a sequence of records, one per line, keyed by their first
token. Blank lines and lines starting with '#' are ignored. Formatting is
canonical, so the same object always produces the same bytes.
"""

from typing import Dict, Iterator, List, Mapping, Optional, Tuple

from .blowup import BlowupData, BlowupGraph
from .chhs import XWPair
from .config import DEFAULT_LIMITS, Limits
from .errors import GraphFormatError
from .graph import Graph, Simplex

# record key -> fields the record needs after the key (None: any number)
GRAPH_RECORDS = {"v": 1, "e": 2}
BLOWUP_RECORDS = {**GRAPH_RECORDS, "base": 1}
XW_RECORDS = {**GRAPH_RECORDS, "cone": 1, "wsimp": 0, "wedge": 2}


def _records(text: str, allowed: Mapping[str, int]) -> Iterator[Tuple[int, str, List[str], str]]:
    """Yield (line number, key, fields, raw remainder) for every record."""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        if key not in allowed:
            raise GraphFormatError(f"unknown record {key!r}", number)
        fields = rest.split()
        if len(fields) < allowed[key]:
            raise GraphFormatError(f"record {key!r} needs at least {allowed[key]} fields", number)
        yield number, key, fields, rest.strip()


def _vertex_id(token: str, line: int) -> int:
    if not (token.isascii() and token.isdigit()):
        raise GraphFormatError(f"vertex ids must be non-negative integers, got {token!r}", line)
    return int(token)


class _GraphCollector:
    """Accumulates v/e records with line-numbered validation."""

    def __init__(self):
        self.vertices: List[int] = []
        self.labels: Dict[int, str] = {}
        self.edges: List[Tuple[int, int]] = []
        self._seen_vertices = set()
        self._seen_edges = set()
        self._pending: List[Tuple[int, int, int]] = []

    def add(self, number: int, key: str, fields: List[str], rest: str) -> bool:
        if key == "v":
            v = _vertex_id(fields[0], number)
            if v in self._seen_vertices:
                raise GraphFormatError(f"duplicate vertex {v}", number)
            self._seen_vertices.add(v)
            self.vertices.append(v)
            label = rest[len(fields[0]) :].strip()
            if label:
                self.labels[v] = label
            return True
        if key == "e":
            if len(fields) != 2:
                raise GraphFormatError("edge records take exactly two ids", number)
            a, b = _vertex_id(fields[0], number), _vertex_id(fields[1], number)
            if a == b:
                raise GraphFormatError(f"self-loop at vertex {a}", number)
            edge = (min(a, b), max(a, b))
            if edge in self._seen_edges:
                raise GraphFormatError(f"duplicate edge {a} {b}", number)
            self._seen_edges.add(edge)
            self._pending.append((number, a, b))
            self.edges.append(edge)
            return True
        return False

    def graph(self) -> Graph:
        for number, a, b in self._pending:
            for v in (a, b):
                if v not in self._seen_vertices:
                    raise GraphFormatError(f"edge endpoint {v} is not a declared vertex", number)
        return Graph(self.vertices, self.edges, self.labels)


def parse_graph(text: str) -> Graph:
    """Parse `v <id> [label]` and `e <a> <b>` records."""
    collector = _GraphCollector()
    for number, key, fields, rest in _records(text, GRAPH_RECORDS):
        collector.add(number, key, fields, rest)
    return collector.graph()


def _graph_lines(g: Graph) -> List[str]:
    lines = []
    for v in g.vertices:
        label = g.label(v)
        lines.append(f"v {v} {label}" if label is not None else f"v {v}")
    lines.extend(f"e {a} {b}" for a, b in g.edges)
    return lines


def format_graph(g: Graph) -> str:
    return "\n".join(_graph_lines(g)) + "\n"


def parse_blowup_data(text: str, allow_empty_bases: bool = False) -> BlowupData:
    """Parse a support graph followed by `base <support-id> <label>...` records."""
    collector = _GraphCollector()
    bases: Dict[int, List[str]] = {}
    base_lines: Dict[int, int] = {}
    for number, key, fields, rest in _records(text, BLOWUP_RECORDS):
        if collector.add(number, key, fields, rest):
            continue
        v = _vertex_id(fields[0], number)
        if v in bases:
            raise GraphFormatError(f"second base record for support vertex {v}", number)
        bases[v] = fields[1:]
        base_lines[v] = number
    support = collector.graph()
    for v, number in base_lines.items():
        if v not in support:
            raise GraphFormatError(f"base given for unknown support vertex {v}", number)
    missing = support.vertex_set - set(bases)
    if missing:
        raise GraphFormatError(f"support vertices without a base record: {sorted(missing)}")
    try:
        return BlowupData(support=support, bases=bases, allow_empty_bases=allow_empty_bases)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def format_blowup_data(d: BlowupData) -> str:
    lines = _graph_lines(d.support)
    for v in d.support.vertices:
        lines.append(" ".join(["base", str(v), *d.bases[v]]))
    return "\n".join(lines) + "\n"


def _blowup_from_cones(x: Graph, cones: Dict[int, List[int]], line: Optional[int]) -> BlowupGraph:
    apices = sorted(cones)
    support = Graph(
        apices,
        [(a, b) for a, b in x.edges if a in cones and b in cones],
        {v: x.label(v) for v in apices if x.label(v) is not None},
    )
    covered = set(apices).union(*map(set, cones.values()))
    if covered != x.vertex_set:
        raise GraphFormatError(
            f"cone records miss vertices {sorted(x.vertex_set - covered)}", line
        )
    try:
        blowup = BlowupGraph.from_cones(support, cones, x.labels)
    except ValueError as exc:
        raise GraphFormatError(str(exc), line) from exc
    if blowup.graph != x:
        raise GraphFormatError("edges do not form the blowup described by the cone records", line)
    return blowup


def parse_xw(text: str, limits: Limits = DEFAULT_LIMITS) -> XWPair:
    """
    Parse an (X, W) pair.

    Graph records come first; optional `cone <apex> <base>...` records mark X
    as a blowup; `wsimp` records list the maximal simplices in canonical
    order and `wedge <i> <j>` records the W-edges.
    """
    collector = _GraphCollector()
    cones: Dict[int, List[int]] = {}
    wsimps: List[Simplex] = []
    wedges: List[Tuple[int, int]] = []
    seen_wedges = set()
    first_cone = wsimp_line = None
    for number, key, fields, rest in _records(text, XW_RECORDS):
        if collector.add(number, key, fields, rest):
            continue
        ids = [_vertex_id(t, number) for t in fields]
        if key == "cone":
            if ids[0] in cones:
                raise GraphFormatError(f"second cone record for apex {ids[0]}", number)
            cones[ids[0]] = ids[1:]
            first_cone = first_cone or number
        elif key == "wsimp":
            wsimps.append(Simplex(ids))
            wsimp_line = wsimp_line or number
        else:
            if len(ids) != 2:
                raise GraphFormatError("wedge records take exactly two indices", number)
            i, j = ids
            if i >= j:
                raise GraphFormatError(f"wedge indices must satisfy i < j, got {i} {j}", number)
            if (i, j) in seen_wedges:
                raise GraphFormatError(f"duplicate wedge {i} {j}", number)
            seen_wedges.add((i, j))
            wedges.append((i, j))

    x = collector.graph()
    source = _blowup_from_cones(x, cones, first_cone) if cones else x
    try:
        return XWPair(source, wedges, maxsimps=wsimps if wsimps else None, limits=limits)
    except ValueError as exc:
        raise GraphFormatError(str(exc), wsimp_line) from exc


def format_xw(p: XWPair) -> str:
    lines = _graph_lines(p.x)
    if p.blowup is not None:
        for v in p.blowup.support.vertices:
            lines.append(" ".join(["cone", str(v), *map(str, sorted(p.blowup.base_of(v)))]))
    for s in p.maxsimps:
        lines.append(" ".join(["wsimp", *map(str, s)]))
    lines.extend(f"wedge {i} {j}" for i, j in sorted(p.w_edges))
    return "\n".join(lines) + "\n"


def depth_from_label(label: Optional[str]) -> int:
    """Depth encoded in a `p@n` label; 0 when there is none."""
    if not label or "@" not in label:
        return 0
    tail = label.rsplit("@", 1)[1]
    return int(tail) if tail.isascii() and tail.isdigit() else 0


def _dot_id(v: int, g: Graph) -> str:
    label = g.label(v)
    if label is None:
        return f"  {v};"
    escaped = label.replace("\\", "\\\\").replace('"', '\\"')
    return f'  {v} [label="{escaped}"];'


def to_dot(g: Graph, depth_of: Optional[Mapping[int, int]] = None, name: str = "G") -> str:
    """
    Render g in dot, grouping vertices of equal depth into rank=same subgraphs.

    Depths come from `depth_of` or, when it is None, from `p@n` labels.
    """
    depths = {
        v: depth_of[v] if depth_of is not None else depth_from_label(g.label(v))
        for v in g.vertices
    }
    lines = [f"graph {name} {{"]
    for n in sorted(set(depths.values())):
        lines.append(f"  subgraph depth_{n} {{")
        lines.append("    rank=same;")
        lines.extend("  " + _dot_id(v, g) for v in g.vertices if depths[v] == n)
        lines.append("  }")
    lines.extend(f"  {a} -- {b};" for a, b in g.edges)
    lines.append("}")
    return "\n".join(lines) + "\n"
