"""Building blocks for 4-manifolds with boundary and their boundary sums.

An expression is a flat sequence of atoms joined by boundary connected sum,
written ``term + term + ...``:

    P(A,4;2)            plumbing along the A_4 chain, every weight 2
    P(D,7;2)            plumbing along the D_7 tree, every weight 2
    E(-3)               disk bundle over S^2 with Euler number -3
    Estar(3)            E*_{-3}: the RP^2 bundle with its 1-handle traded for a 0-framed 2-handle
    SxS, SxtS           punctured S^2 x S^2 and the twisted bundle
    CP2, CP2bar, D4
    G{a:2,b:-1;a-b}     an arbitrary weighted plumbing graph
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .forms import HYPERBOLIC, TWISTED, FormError, IntegerSymmetricForm, direct_sum, finite_abelian_label


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class BoundaryError(ValueError):
    """The boundary is not a rational homology sphere."""


# ---------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class PlumbingGraph:
    """Weighted simple graph; ``vertices`` holds (id, weight) pairs."""

    vertices: tuple[tuple[str, int], ...]
    edges: tuple[tuple[str, str], ...]
    family: str | None = None  # "A" / "D" when built by the shorthand

    def __post_init__(self) -> None:
        ids = [v for v, _ in self.vertices]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate vertex id in plumbing graph")
        seen = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"loop at vertex {a}")
            if a not in ids or b not in ids:
                raise ValueError(f"edge {a}-{b} uses an unknown vertex")
            key = frozenset((a, b))
            if key in seen:
                raise ValueError(f"repeated edge {a}-{b}")
            seen.add(key)

    @classmethod
    def a_chain(cls, k: int, weight: int = 2) -> PlumbingGraph:
        ids = [str(i + 1) for i in range(k)]
        return cls(
            tuple((v, weight) for v in ids),
            tuple((ids[i], ids[i + 1]) for i in range(k - 1)),
            family="A",
        )

    @classmethod
    def d_tree(cls, k: int, weight: int = 2) -> PlumbingGraph:
        # vertices 1 and 2 hang off vertex 3, then the chain 3-4-...-k
        if k < 3:
            raise ValueError("D_k needs k >= 3")
        ids = [str(i + 1) for i in range(k)]
        edges = [("1", "3"), ("2", "3")] + [(ids[i], ids[i + 1]) for i in range(2, k - 1)]
        return cls(tuple((v, weight) for v in ids), tuple(edges), family="D")

    def matrix(self) -> IntegerSymmetricForm:
        index = {v: i for i, (v, _) in enumerate(self.vertices)}
        n = len(self.vertices)
        rows = [[0] * n for _ in range(n)]
        for v, w in self.vertices:
            rows[index[v]][index[v]] = w
        for a, b in self.edges:
            rows[index[a]][index[b]] = rows[index[b]][index[a]] = 1
        return IntegerSymmetricForm(rows)

    def uniform_weight(self) -> int | None:
        ws = {w for _, w in self.vertices}
        return ws.pop() if len(ws) == 1 else None


@dataclass(frozen=True)
class Plumbing:
    graph: PlumbingGraph

    def form(self) -> IntegerSymmetricForm:
        return self.graph.matrix()

    def text(self) -> str:
        g = self.graph
        w = g.uniform_weight()
        if g.family is not None and w is not None and g.vertices:
            return f"P({g.family},{len(g.vertices)};{w})"
        verts = ",".join(f"{v}:{w}" for v, w in g.vertices)
        edges = ",".join(f"{a}-{b}" for a, b in g.edges)
        return f"G{{{verts};{edges}}}"


@dataclass(frozen=True)
class DiskBundle:
    """E(xi_m): the D^2-bundle over S^2 with Euler number m."""

    m: int

    def form(self) -> IntegerSymmetricForm:
        return IntegerSymmetricForm(((self.m,),))

    def text(self) -> str:
        return f"E({self.m})"


@dataclass(frozen=True)
class EStar:
    """E*_{-n}: a 0-framed handle, and a (-n-2)-framed one running twice over it."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("Estar needs a positive parameter")

    def form(self) -> IntegerSymmetricForm:
        return IntegerSymmetricForm(((0, 2), (2, -self.n - 2)))

    def text(self) -> str:
        return f"Estar({self.n})"


@dataclass(frozen=True)
class Named:
    name: str

    def form(self) -> IntegerSymmetricForm:
        return _NAMED_FORMS[self.name]

    def text(self) -> str:
        return self.name


_NAMED_FORMS = {
    "SxS": HYPERBOLIC,
    "SxtS": TWISTED,
    "CP2": IntegerSymmetricForm(((1,),)),
    "CP2bar": IntegerSymmetricForm(((-1,),)),
    "D4": IntegerSymmetricForm.empty(),
}

SxS = Named("SxS")
SxtS = Named("SxtS")
CP2 = Named("CP2")
CP2bar = Named("CP2bar")
D4 = Named("D4")

Atom = Union[Plumbing, DiskBundle, EStar, Named]


@dataclass(frozen=True)
class Expr:
    """Boundary connected sum of atoms (the operation is associative)."""

    terms: tuple[Atom, ...]

    def __add__(self, other: Expr | Atom) -> Expr:
        return Expr(self.terms + as_expr(other).terms)

    def __radd__(self, other: Atom) -> Expr:
        return Expr(as_expr(other).terms + self.terms)

    def __str__(self) -> str:
        return " + ".join(t.text() for t in self.terms)

    def __mul__(self, k: int) -> Expr:
        return Expr(self.terms * k)


def as_expr(x: Expr | Atom) -> Expr:
    return x if isinstance(x, Expr) else Expr((x,))


def boundary_sum(*parts: Expr | Atom) -> Expr:
    terms: list[Atom] = []
    for p in parts:
        terms.extend(as_expr(p).terms)
    return Expr(tuple(terms))


def plumbing(family: str, k: int, weight: int = 2) -> Expr:
    if family == "A":
        return Expr((Plumbing(PlumbingGraph.a_chain(k, weight)),))
    if family == "D":
        return Expr((Plumbing(PlumbingGraph.d_tree(k, weight)),))
    raise ValueError(f"unknown plumbing family {family!r}")


def a_chain_or_ball(k: int) -> Expr:
    """P(A_k, 2); the empty chain (k = 0) is the 4-ball."""
    return plumbing("A", k) if k > 0 else Expr((D4,))


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>[+-]?\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[()+,;:{}\-])
    """,
    re.VERBOSE,
)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", *self._where(pos))
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.i = 0

    def _where(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("eof", "", len(self.text))

    def _fail(self, msg: str, tok=None):
        tok = tok or self._peek()
        raise ParseError(msg, *self._where(tok[2]))

    def _expect(self, value: str):
        tok = self._peek()
        if tok[1] != value:
            self._fail(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def _int(self) -> int:
        tok = self._peek()
        if tok[0] != "int":
            self._fail(f"expected an integer, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return int(tok[1])

    def _ident(self) -> str:
        tok = self._peek()
        if tok[0] not in ("name", "int"):
            self._fail("expected a vertex id")
        self.i += 1
        return tok[1]

    def parse(self) -> Expr:
        terms = [self._term()]
        while self._peek()[1] == "+":
            self.i += 1
            terms.append(self._term())
        if self._peek()[0] != "eof":
            self._fail(f"unexpected {self._peek()[1]!r}")
        return Expr(tuple(terms))

    def _term(self) -> Atom:
        tok = self._peek()
        if tok[0] != "name":
            self._fail(f"expected a building block, found {tok[1] or 'end of input'!r}")
        self.i += 1
        name = tok[1]
        if name == "P":
            self._expect("(")
            fam_tok = self._peek()
            fam = self._ident()
            if fam not in ("A", "D"):
                self._fail(f"unknown plumbing family {fam!r}", fam_tok)
            self._expect(",")
            k_tok = self._peek()
            k = self._int()
            self._expect(";")
            w = self._int()
            self._expect(")")
            if k < 1:
                self._fail("family size must be positive", k_tok)
            if fam == "D" and k < 3:
                self._fail("D family needs size >= 3", k_tok)
            return plumbing(fam, k, w).terms[0]
        if name == "E":
            self._expect("(")
            m = self._int()
            self._expect(")")
            return DiskBundle(m)
        if name == "Estar":
            self._expect("(")
            n_tok = self._peek()
            n = self._int()
            self._expect(")")
            if n < 1:
                self._fail("Estar parameter must be positive", n_tok)
            return EStar(n)
        if name == "G":
            return self._graph()
        if name in _NAMED_FORMS:
            return Named(name)
        self._fail(f"unknown building block {name!r}", tok)

    def _graph(self) -> Plumbing:
        start = self._expect("{")
        verts: list[tuple[str, int]] = []
        edges: list[tuple[str, str]] = []
        if self._peek()[1] != ";":
            while True:
                v = self._ident()
                self._expect(":")
                verts.append((v, self._int()))
                if self._peek()[1] != ",":
                    break
                self.i += 1
        self._expect(";")
        if self._peek()[1] != "}":
            while True:
                a = self._ident()
                # "1-2" lexes as int 1, int -2
                nxt = self._peek()
                if nxt[0] == "int" and nxt[1].startswith("-"):
                    self.i += 1
                    b = nxt[1][1:]
                else:
                    self._expect("-")
                    b = self._ident()
                edges.append((a, b))
                if self._peek()[1] != ",":
                    break
                self.i += 1
        self._expect("}")
        try:
            return Plumbing(PlumbingGraph(tuple(verts), tuple(edges)))
        except ValueError as exc:
            self._fail(str(exc), start)


def parse_expr(text: str) -> Expr:
    return _Parser(text).parse()


def format_expr(expr: Expr) -> str:
    return str(expr)


# ---------------------------------------------------------------------------
# invariants


def intersection_form(expr: Expr | Atom) -> IntegerSymmetricForm:
    return direct_sum(*(t.form() for t in as_expr(expr).terms))


def euler_characteristic(expr: Expr | Atom) -> int:
    terms = as_expr(expr).terms
    # each atom is a 0-handle plus 2-handles; the sum glues along 3-balls
    return sum(1 + t.form().n for t in terms) - (len(terms) - 1)


def signature(expr: Expr | Atom) -> int:
    """Sum of the atoms' signatures; avoids forming the big block matrix."""
    cache: dict = {}
    total = 0
    for t in as_expr(expr).terms:
        if t not in cache:
            cache[t] = t.form().signature
        total += cache[t]
    return total


@dataclass(frozen=True)
class BoundaryDescriptor:
    kind: str  # "LensSpace" | "DicyclicQuotient" | "Sphere" | "UnknownQHS"
    p: int | None = None
    q: int | None = None
    n: int | None = None
    h1: tuple[int, ...] = ()
    orientation: str = "as-stated"

    @property
    def h1_order(self) -> int:
        out = 1
        for d in self.h1:
            out *= d
        return out

    def __str__(self) -> str:
        if self.kind == "LensSpace":
            return f"L({self.p},{self.q})"
        if self.kind == "DicyclicQuotient":
            return f"S3/Dic{self.n}"
        if self.kind == "Sphere":
            return "S3"
        return f"QHS(H1={finite_abelian_label(self.h1)})"

    def to_json(self) -> dict:
        out = {"kind": self.kind, "name": str(self), "h1": finite_abelian_label(self.h1),
               "orientation": self.orientation}
        if self.kind == "LensSpace":
            out.update(p=self.p, q=self.q)
        if self.kind == "DicyclicQuotient":
            out["n"] = self.n
        return out


def _h1(form: IntegerSymmetricForm) -> tuple[int, ...]:
    return tuple(d for d in form.smith if d != 1)


def _atom_boundary(atom: Atom) -> BoundaryDescriptor | None:
    """Descriptor for recognised atoms; None for S^3 boundaries."""
    if isinstance(atom, Named):
        return None
    if isinstance(atom, DiskBundle):
        k = abs(atom.m)
        if k == 0:
            raise BoundaryError("E(0) has boundary S^1 x S^2")
        if k == 1:
            return None
        tag = "as-stated" if atom.m < 0 else "reversed"
        return BoundaryDescriptor("LensSpace", p=k, q=1, h1=(k,), orientation=tag)
    if isinstance(atom, EStar):
        return BoundaryDescriptor("DicyclicQuotient", n=atom.n, h1=_h1(atom.form()))
    g = atom.graph
    w = g.uniform_weight()
    k = len(g.vertices)
    if w == 2 and _is_chain(g):
        return BoundaryDescriptor("LensSpace", p=k + 1, q=1, h1=(k + 1,))
    if w == 2 and k >= 3 and _is_d_tree(g):
        return BoundaryDescriptor("DicyclicQuotient", n=k - 2, h1=_h1(atom.form()))
    form = atom.form()
    if form.determinant == 0:
        raise BoundaryError("degenerate plumbing: boundary is not a rational homology sphere")
    return BoundaryDescriptor("UnknownQHS", h1=_h1(form))


def _degrees(g: PlumbingGraph) -> dict[str, int]:
    deg = {v: 0 for v, _ in g.vertices}
    for a, b in g.edges:
        deg[a] += 1
        deg[b] += 1
    return deg


def _is_tree(g: PlumbingGraph) -> bool:
    k = len(g.vertices)
    if k == 0 or len(g.edges) != k - 1:
        return False
    adj = {v: [] for v, _ in g.vertices}
    for a, b in g.edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {g.vertices[0][0]}
    stack = [g.vertices[0][0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == k


def _is_chain(g: PlumbingGraph) -> bool:
    return _is_tree(g) and all(d <= 2 for d in _degrees(g).values())


def _is_d_tree(g: PlumbingGraph) -> bool:
    """Tree with one vertex of degree 3 carrying two leaves (or a 3-chain)."""
    if not _is_tree(g):
        return False
    deg = _degrees(g)
    if len(g.vertices) == 3:
        return _is_chain(g)
    branch = [v for v, d in deg.items() if d == 3]
    if len(branch) != 1 or any(d > 3 for d in deg.values()):
        return False
    b = branch[0]
    nbrs = [a if bb == b else bb for a, bb in g.edges if b in (a, bb)]
    return sum(1 for v in nbrs if deg[v] == 1) >= 2


def boundary_descriptor(expr: Expr | Atom) -> BoundaryDescriptor:
    """Name the boundary 3-manifold of a boundary sum.

    Atoms with S^3 boundary (SxS, SxtS, CP2, CP2bar, D4, E(+-1)) do not
    change the boundary.  One recognised non-sphere atom gives its descriptor;
    anything else falls back to H_1 read off the Smith normal form.
    """
    e = as_expr(expr)
    found = [d for d in (_atom_boundary(t) for t in e.terms) if d is not None]
    if not found:
        return BoundaryDescriptor("Sphere")
    if len(found) == 1:
        return found[0]
    form = intersection_form(e)
    if form.determinant == 0:
        raise BoundaryError("degenerate form: boundary is not a rational homology sphere")
    return BoundaryDescriptor("UnknownQHS", h1=_h1(form))


__all__ = [
    "Atom",
    "BoundaryDescriptor",
    "BoundaryError",
    "CP2",
    "CP2bar",
    "D4",
    "DiskBundle",
    "EStar",
    "Expr",
    "FormError",
    "Named",
    "ParseError",
    "Plumbing",
    "PlumbingGraph",
    "SxS",
    "SxtS",
    "a_chain_or_ball",
    "as_expr",
    "boundary_descriptor",
    "boundary_sum",
    "euler_characteristic",
    "format_expr",
    "intersection_form",
    "parse_expr",
    "plumbing",
    "signature",
]
