"""A small text format for alphabets, words, homomorphisms, graphs of groups,
towers and experiment tasks.

Example::

    alphabet F { x, y }
    word w in F = [x,y]
    tower T {
      base F
      level abelian attach [x,y] rank 1 gens (t)
    }
    task separate T set { x, y } max 16 seed 7 as s1

Word expressions are juxtapositions of factors (a generator, a previously
declared word of the same scope, ``1``, a parenthesized expression, or a
commutator ``[e1,e2]``), each with an optional integer exponent ``^n``.
A top-level expression ends at the end of its line.  Parsing resolves names
but does not validate groups; :meth:`Document.graph` and
:meth:`Document.tower` build (and validate) the engine objects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .gog import AbelianVertexGroup, Edge, FreeVertexGroup, GogHom, GraphOfGroups, Vertex, require_valid
from .homs import FreeHom
from .towers import AbelianExt, QuadraticExt, Tower, build_tower, user_alphabet_name, user_names
from .words import Alphabet, Word, commutator, rename

RESERVED = frozenset(
    {"rank", "gens", "images", "right", "left", "pm", "as", "max", "seed", "indivisible", "set", "tree",
     "singular", "attach", "boundary", "genus"}
)
TASK_KINDS = ("separate", "discriminate", "conj")
DEFAULT_TASK_N_MAX = 16


class ParseError(ValueError):
    def __init__(self, line: int, col: int, expected: Iterable[str], found: str, message: str = ""):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        self.found = found
        text = message or f"expected {' or '.join(self.expected)}, found {found}"
        super().__init__(f"{line}:{col}: {text}")


# -- declarations ----------------------------------------------------------


@dataclass(frozen=True)
class AlphabetDecl:
    name: str
    generators: tuple[str, ...]


@dataclass(frozen=True)
class WordDecl:
    name: str
    scope: str
    word: Word


@dataclass(frozen=True)
class HomDecl:
    name: str
    domain: str
    codomain: str
    images: tuple[tuple[str, Word], ...]


Attach = Union[Word, tuple[int, ...], None]


@dataclass(frozen=True)
class VertexDecl:
    name: str
    kind: str  # "free" | "abelian"
    alphabet: Optional[str]
    names: tuple[str, ...]


@dataclass(frozen=True)
class EdgeDecl:
    name: str
    src: str
    src_attach: Attach
    dst: str
    dst_attach: Attach
    tree: bool = False


@dataclass(frozen=True)
class GraphDecl:
    name: str
    vertices: tuple[VertexDecl, ...]
    edges: tuple[EdgeDecl, ...]
    base: str


@dataclass(frozen=True)
class TowerDecl:
    name: str
    base: str
    levels: tuple[Union[AbelianExt, QuadraticExt], ...]


@dataclass(frozen=True)
class TaskDecl:
    name: str
    kind: str
    target: str
    elements: tuple[Word, ...]
    n_max: Optional[int] = None
    seed: Optional[int] = None
    indivisible: tuple[int, ...] = ()
    pm: bool = False


Decl = Union[AlphabetDecl, WordDecl, HomDecl, GraphDecl, TowerDecl, TaskDecl]
_KIND = {
    AlphabetDecl: "alphabet",
    WordDecl: "word",
    HomDecl: "hom",
    GraphDecl: "graph",
    TowerDecl: "tower",
    TaskDecl: "task",
}


@dataclass
class Document:
    decls: tuple[Decl, ...] = ()
    _built: dict = field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other):
        return isinstance(other, Document) and self.decls == other.decls

    def find(self, kind: str, name: str) -> Decl:
        for d in self.decls:
            if _KIND[type(d)] == kind and d.name == name:
                return d
        raise KeyError(f"no {kind} named {name!r}")

    def of_kind(self, kind: str) -> list:
        return [d for d in self.decls if _KIND[type(d)] == kind]

    @property
    def tasks(self) -> list[TaskDecl]:
        return self.of_kind("task")

    def scope_kind(self, name: str) -> str:
        for d in self.decls:
            if d.name == name and isinstance(d, (AlphabetDecl, GraphDecl, TowerDecl)):
                return _KIND[type(d)]
        raise KeyError(f"no alphabet, graph or tower named {name!r}")

    def alphabet(self, name: str) -> Alphabet:
        d = self.find("alphabet", name)
        return Alphabet(d.name, d.generators)

    def graph(self, name: str) -> GraphOfGroups:
        key = ("graph", name)
        if key not in self._built:
            d = self.find("graph", name)
            g = graph_from_decl(d, self.alphabet)
            require_valid(g)
            self._built[key] = g
        return self._built[key]

    def tower(self, name: str) -> Tower:
        key = ("tower", name)
        if key not in self._built:
            d = self.find("tower", name)
            self._built[key] = build_tower(self.alphabet(d.base), d.levels, name=d.name)
        return self._built[key]

    def hom(self, name: str):
        d = self.find("hom", name)
        target = _scope_alphabet_of(self, d.codomain)
        if self.scope_kind(d.domain) == "graph":
            return GogHom(self.graph(d.domain), target, dict(d.images))
        return FreeHom.from_mapping(self.alphabet(d.domain), target, dict(d.images))


def graph_from_decl(d: GraphDecl, alphabet_of) -> GraphOfGroups:
    index = {v.name: i for i, v in enumerate(d.vertices)}
    verts = []
    for v in d.vertices:
        grp = FreeVertexGroup(alphabet_of(v.alphabet)) if v.kind == "free" else AbelianVertexGroup(len(v.names), v.names)
        verts.append(Vertex(v.name, grp))
    edges = tuple(
        Edge(e.name, index[e.src], e.src_attach, index[e.dst], e.dst_attach, tree=e.tree) for e in d.edges
    )
    return GraphOfGroups(d.name, tuple(verts), edges, base=index[d.base])


def graph_presentation_alphabet(d: GraphDecl, alphabet_of) -> Alphabet:
    names: list[str] = []
    for v in d.vertices:
        names.extend(alphabet_of(v.alphabet).generators if v.kind == "free" else v.names)
    names.extend(e.name for e in d.edges if not e.tree)
    return Alphabet(f"pi1({d.name})", tuple(names))


def _tower_alphabet(d: TowerDecl, base: Alphabet, upto: Optional[int] = None) -> Alphabet:
    n = len(d.levels) if upto is None else upto
    gens = base.generators
    for i, ext in enumerate(d.levels[:n], start=1):
        gens = gens + user_names(ext, i)
    return base if n == 0 else Alphabet(user_alphabet_name(d.name, n), gens)


def _scope_alphabet_of(doc: Document, name: str) -> Alphabet:
    kind = doc.scope_kind(name)
    if kind == "alphabet":
        return doc.alphabet(name)
    if kind == "graph":
        return graph_presentation_alphabet(doc.find("graph", name), doc.alphabet)
    d = doc.find("tower", name)
    return _tower_alphabet(d, doc.alphabet(d.base))


def document_from_graph(g: GraphOfGroups) -> Document:
    """Declarations (alphabets first) reproducing a graph with free / abelian vertices."""
    decls: list[Decl] = []
    verts = []
    for v in g.vertices:
        grp = v.group
        if isinstance(grp, FreeVertexGroup):
            decls.append(AlphabetDecl(grp.alphabet.name, grp.alphabet.generators))
            verts.append(VertexDecl(v.name, "free", grp.alphabet.name, ()))
        elif isinstance(grp, AbelianVertexGroup):
            names = grp.names or tuple(f"{v.name}_{k}" for k in range(1, grp.n + 1))
            verts.append(VertexDecl(v.name, "abelian", None, names))
        else:
            raise ValueError("only free and abelian vertex groups can be rendered")
    edges = tuple(
        EdgeDecl(e.name, g.vertices[e.src].name, e.src_attach, g.vertices[e.dst].name, e.dst_attach, e.tree)
        for e in g.edges
    )
    decls.append(GraphDecl(g.name, tuple(verts), edges, g.vertices[g.base].name))
    return Document(tuple(decls))


# -- tokenizer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)|(?P<op>->|=>|--)"
    r"|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[{}()\[\],:;=.^-])"
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | punct | nl | eof
    value: str
    line: int
    col: int

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        if self.kind == "nl":
            return "end of line"
        return repr(self.value)


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    line, start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(line, pos - start + 1, ("a token",), repr(text[pos]))
        kind = m.lastgroup
        col = pos - start + 1
        if kind == "nl":
            out.append(Token("nl", "\n", line, col))
            line += 1
            start = m.end()
        elif kind in ("op", "punct"):
            out.append(Token("punct", m.group(), line, col))
        elif kind in ("int", "ident"):
            out.append(Token(kind, m.group(), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


# -- parser ---------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0
        self.decls: list[Decl] = []
        self.words: dict[tuple[str, str], Word] = {}
        self.doc = Document()

    # token helpers
    def peek(self, skip_nl: bool = False) -> Token:
        if skip_nl:
            self.skip_nl()
        return self.toks[self.i]

    def skip_nl(self) -> None:
        while self.toks[self.i].kind == "nl":
            self.i += 1

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, expected: Iterable[str], tok: Optional[Token] = None, message: str = "") -> ParseError:
        tok = tok or self.peek()
        return ParseError(tok.line, tok.col, expected, tok.describe(), message)

    def at(self, value: str, skip_nl: bool = False) -> bool:
        t = self.peek(skip_nl)
        return t.kind in ("punct", "ident") and t.value == value

    def expect(self, value: str, skip_nl: bool = False) -> Token:
        t = self.peek(skip_nl)
        if t.kind in ("punct", "ident") and t.value == value:
            return self.advance()
        raise self.error((repr(value),))

    def ident(self, what: str = "identifier", skip_nl: bool = False) -> Token:
        t = self.peek(skip_nl)
        if t.kind != "ident":
            raise self.error((what,))
        return self.advance()

    def integer(self, signed: bool = False, skip_nl: bool = False) -> int:
        t = self.peek(skip_nl)
        sign = 1
        if signed and t.kind == "punct" and t.value == "-":
            self.advance()
            sign = -1
            t = self.peek()
        if t.kind != "int":
            raise self.error(("integer",))
        self.advance()
        return sign * int(t.value)

    def end_of_statement(self) -> None:
        t = self.peek()
        if t.kind in ("nl", "eof") or (t.kind == "punct" and t.value in (";", "}")):
            if t.kind == "punct" and t.value == ";":
                self.advance()
            return
        raise self.error(("end of line",))

    # symbol table
    def declared(self, kind: str, name: str) -> bool:
        return any(_KIND[type(d)] == kind and d.name == name for d in self.decls)

    def define(self, decl: Decl, tok: Token) -> None:
        kind = _KIND[type(decl)]
        if self.declared(kind, decl.name):
            raise self.error(("a new name",), tok, f"{kind} {decl.name!r} is already declared")
        if kind in ("alphabet", "graph", "tower"):
            for other in ("alphabet", "graph", "tower"):
                if self.declared(other, decl.name):
                    raise self.error(("a new name",), tok, f"{decl.name!r} is already declared as {other}")
        self.decls.append(decl)
        self.doc = Document(tuple(self.decls))

    def scope_alphabet(self, tok: Token) -> Alphabet:
        try:
            return _scope_alphabet_of(self.doc, tok.value)
        except KeyError:
            raise self.error(("alphabet, graph or tower name",), tok) from None

    def alphabet_ref(self) -> Alphabet:
        tok = self.ident("alphabet name")
        if not self.declared("alphabet", tok.value):
            raise self.error(("alphabet name",), tok)
        return self.doc.alphabet(tok.value)

    # words
    def word(self, A: Alphabet, scopes: tuple[str, ...], stop: frozenset = frozenset(), nested: bool = False) -> Word:
        factors: list[Word] = []
        while True:
            if nested:
                self.skip_nl()
            t = self.peek()
            if t.kind == "ident" and t.value not in stop:
                self.advance()
                f = self.atom(t, A, scopes)
            elif t.kind == "int" and t.value == "1":
                self.advance()
                f = A.identity()
            elif t.kind == "punct" and t.value == "(":
                self.advance()
                f = self.word(A, scopes, nested=True)
                self.expect(")", skip_nl=True)
            elif t.kind == "punct" and t.value == "[":
                self.advance()
                a = self.word(A, scopes, nested=True)
                self.expect(",", skip_nl=True)
                b = self.word(A, scopes, nested=True)
                self.expect("]", skip_nl=True)
                f = commutator(a, b)
            else:
                break
            if self.at("^"):
                self.advance()
                f = f ** self.integer(signed=True)
            factors.append(f)
        if not factors:
            raise self.error(("word",))
        out = A.identity()
        for f in factors:
            out = out * f
        return out

    def atom(self, t: Token, A: Alphabet, scopes: tuple[str, ...]) -> Word:
        if t.value in A.generators:
            return A.gen(t.value)
        for s in scopes:
            w = self.words.get((s, t.value))
            if w is not None:
                try:
                    return rename(w, A)
                except Exception:
                    raise self.error(("generator",), t, f"word {t.value!r} does not fit alphabet {A.name}") from None
        raise self.error((f"generator of {A.name} or word name",), t)

    def name_list(self) -> tuple[str, ...]:
        self.expect("(")
        names = [self.new_generator()]
        while self.at(",", skip_nl=True):
            self.advance()
            names.append(self.new_generator())
        self.expect(")", skip_nl=True)
        return tuple(names)

    def new_generator(self) -> str:
        t = self.ident("generator name", skip_nl=True)
        if t.value in RESERVED:
            raise self.error(("generator name",), t, f"{t.value!r} is a reserved word")
        return t.value

    # declarations
    def parse(self) -> Document:
        while True:
            t = self.peek(skip_nl=True)
            if t.kind == "eof":
                break
            if t.kind != "ident" or t.value not in ("alphabet", "word", "hom", "graph", "tower", "task"):
                raise self.error(("alphabet", "word", "hom", "graph", "tower", "task"))
            self.advance()
            getattr(self, "p_" + t.value)()
            self.end_of_statement()
        return Document(tuple(self.decls))

    def p_alphabet(self) -> None:
        tok = self.ident("alphabet name")
        self.expect("{", skip_nl=True)
        gens = [self.new_generator()]
        while self.at(",", skip_nl=True):
            self.advance()
            t = self.peek(skip_nl=True)
            g = self.new_generator()
            if g in gens:
                raise self.error(("new generator",), t, f"repeated generator {g!r}")
            gens.append(g)
        self.expect("}", skip_nl=True)
        self.define(AlphabetDecl(tok.value, tuple(gens)), tok)

    def p_word(self) -> None:
        tok = self.ident("word name")
        self.expect("in")
        st = self.ident("alphabet, graph or tower name")
        A = self.scope_alphabet(st)
        self.expect("=")
        w = self.word(A, self.scopes_for(st.value))
        self.define(WordDecl(tok.value, st.value, w), tok)
        self.words[(st.value, tok.value)] = w

    def scopes_for(self, scope: str) -> tuple[str, ...]:
        if self.declared("tower", scope):
            return (scope, self.doc.find("tower", scope).base)
        return (scope,)

    def p_hom(self) -> None:
        tok = self.ident("hom name")
        self.expect(":")
        dt = self.ident("domain name")
        D = self.scope_alphabet(dt)
        if self.declared("tower", dt.value):
            raise self.error(("alphabet or graph name",), dt)
        self.expect("->")
        ct = self.ident("codomain name")
        C = self.scope_alphabet(ct)
        self.expect("{", skip_nl=True)
        images: dict[str, Word] = {}
        while not self.at("}", skip_nl=True):
            gt = self.ident("generator", skip_nl=True)
            if gt.value not in D.generators:
                raise self.error((f"generator of {D.name}",), gt)
            if gt.value in images:
                raise self.error(("new generator",), gt, f"image of {gt.value!r} given twice")
            self.expect("=>")
            images[gt.value] = self.word(C, self.scopes_for(ct.value))
            if self.at(",") or self.at(";"):
                self.advance()
        close = self.expect("}", skip_nl=True)
        missing = [g for g in D.generators if g not in images]
        if missing:
            raise self.error(("image for " + missing[0],), close)
        ordered = tuple((g, images[g]) for g in D.generators)
        self.define(HomDecl(tok.value, dt.value, ct.value, ordered), tok)

    def p_graph(self) -> None:
        tok = self.ident("graph name")
        self.expect("{", skip_nl=True)
        verts: list[VertexDecl] = []
        edges: list[EdgeDecl] = []
        base = None
        while not self.at("}", skip_nl=True):
            kw = self.ident("vertex, edge or base", skip_nl=True)
            if kw.value == "vertex":
                vt = self.ident("vertex name")
                if any(v.name == vt.value for v in verts):
                    raise self.error(("new vertex name",), vt)
                self.expect("=")
                k = self.ident("free or abelian")
                if k.value == "free":
                    A = self.alphabet_ref()
                    verts.append(VertexDecl(vt.value, "free", A.name, ()))
                elif k.value == "abelian":
                    nt = self.peek()
                    n = self.integer()
                    if n < 1:
                        raise self.error(("positive rank",), nt)
                    names = self.name_list() if self.at("(") else tuple(f"{vt.value}_{j}" for j in range(1, n + 1))
                    if len(names) != n:
                        raise self.error((f"{n} names",), k)
                    verts.append(VertexDecl(vt.value, "abelian", None, names))
                else:
                    raise self.error(("free", "abelian"), k)
            elif kw.value == "edge":
                et = self.ident("edge name")
                if any(e.name == et.value for e in edges):
                    raise self.error(("new edge name",), et)
                self.expect(":")
                src, sa = self.edge_end(verts)
                self.expect("--")
                dst, da = self.edge_end(verts)
                tree = False
                if self.at("tree"):
                    self.advance()
                    tree = True
                edges.append(EdgeDecl(et.value, src, sa, dst, da, tree))
            elif kw.value == "base":
                bt = self.ident("vertex name")
                if not any(v.name == bt.value for v in verts):
                    raise self.error(("declared vertex",), bt)
                base = bt.value
            else:
                raise self.error(("vertex", "edge", "base"), kw)
            self.end_of_statement()
        close = self.expect("}", skip_nl=True)
        if not verts:
            raise self.error(("vertex",), close)
        self.define(GraphDecl(tok.value, tuple(verts), tuple(edges), base or verts[0].name), tok)

    def edge_end(self, verts: list[VertexDecl]) -> tuple[str, Attach]:
        vt = self.ident("vertex name")
        v = next((v for v in verts if v.name == vt.value), None)
        if v is None:
            raise self.error(("declared vertex",), vt)
        if not self.at("."):
            return v.name, None
        self.advance()
        self.expect("(")
        if v.kind == "free":
            A = self.doc.alphabet(v.alphabet)
            att: Attach = self.word(A, (v.alphabet,), nested=True)
        else:
            vals = [self.integer(signed=True, skip_nl=True)]
            while self.at(",", skip_nl=True):
                self.advance()
                vals.append(self.integer(signed=True, skip_nl=True))
            if len(vals) != len(v.names):
                raise self.error((f"{len(v.names)} coordinates",))
            att = tuple(vals)
        self.expect(")", skip_nl=True)
        return v.name, att

    def p_tower(self) -> None:
        tok = self.ident("tower name")
        self.expect("{", skip_nl=True)
        self.expect("base", skip_nl=True)
        base = self.alphabet_ref()
        self.end_of_statement()
        levels: list = []
        while not self.at("}", skip_nl=True):
            self.expect("level", skip_nl=True)
            i = len(levels) + 1
            A = _tower_alphabet(TowerDecl(tok.value, base.name, tuple(levels)), base)
            scopes = (base.name,)
            k = self.ident("abelian or quadratic")
            if k.value == "abelian":
                if self.at("singular"):
                    self.advance()
                    attach = None
                else:
                    self.expect("attach")
                    attach = self.word(A, scopes, stop=RESERVED)
                self.expect("rank")
                rt = self.peek()
                rank = self.integer()
                if rank < 1:
                    raise self.error(("positive rank",), rt)
                names = self.name_list() if self.at("gens") and self.advance() else ()
                ext = AbelianExt(attach, rank, names)
                if not names:
                    ext = AbelianExt(attach, rank, _names_or_error(self, ext, i, k))
                elif len(names) != rank:
                    raise self.error((f"{rank} names",), k)
            elif k.value == "quadratic":
                self.expect("genus")
                genus = self.integer()
                self.expect("boundary")
                bounds = [self.word(A, scopes, stop=RESERVED)]
                while self.at(","):
                    self.advance()
                    bounds.append(self.word(A, scopes, stop=RESERVED))
                images = []
                if self.at("images"):
                    self.advance()
                    while self.at("("):
                        self.advance()
                        x = self.word(A, scopes, nested=True)
                        self.expect(",", skip_nl=True)
                        y = self.word(A, scopes, nested=True)
                        self.expect(")", skip_nl=True)
                        images.append((x, y))
                if len(images) != genus:
                    raise self.error((f"{genus} image pairs",), k)
                names = self.name_list() if self.at("gens") and self.advance() else ()
                ext = QuadraticExt(genus, tuple(bounds), tuple(images), names)
                if not names:
                    ext = QuadraticExt(genus, tuple(bounds), tuple(images), _names_or_error(self, ext, i, k))
                elif len(names) != 2 * genus + len(bounds) - 1:
                    raise self.error((f"{2 * genus + len(bounds) - 1} names",), k)
            else:
                raise self.error(("abelian", "quadratic"), k)
            taken = set(A.generators)
            for n in user_names(ext, i):
                if n in taken:
                    raise self.error(("fresh generator names",), k, f"generator {n!r} already in use")
                taken.add(n)
            levels.append(ext)
            self.end_of_statement()
        self.expect("}", skip_nl=True)
        self.define(TowerDecl(tok.value, base.name, tuple(levels)), tok)

    def p_task(self) -> None:
        kt = self.ident("task kind")
        if kt.value not in TASK_KINDS:
            raise self.error(TASK_KINDS, kt)
        st = self.ident("target name")
        A = self.scope_alphabet(st)
        scopes = self.scopes_for(st.value)
        if kt.value in ("separate", "discriminate") and not self.declared("tower", st.value):
            raise self.error(("tower name",), st)
        elements: list[Word] = []
        opts: dict = {}
        pm = False
        name = None
        if kt.value == "conj":
            self.expect("left")
            elements.append(self.word(A, scopes, stop=RESERVED))
            self.expect("right")
            elements.append(self.word(A, scopes, stop=RESERVED))
            if self.at("pm"):
                self.advance()
                pm = True
        else:
            self.expect("set")
            self.expect("{", skip_nl=True)
            elements.append(self.word(A, scopes, nested=True))
            while self.at(",", skip_nl=True):
                self.advance()
                elements.append(self.word(A, scopes, nested=True))
            self.expect("}", skip_nl=True)
            while self.peek().kind == "ident" and self.peek().value in ("max", "seed", "indivisible"):
                key = self.advance()
                if key.value in opts:
                    raise self.error(("new option",), key, f"option {key.value!r} given twice")
                if key.value == "indivisible":
                    if kt.value != "separate":
                        raise self.error(("max", "seed", "as"), key)
                    self.expect("{")
                    idx = []
                    if not self.at("}"):
                        idx.append(self.integer())
                        while self.at(","):
                            self.advance()
                            idx.append(self.integer())
                    close = self.expect("}")
                    if any(j >= len(elements) for j in idx):
                        raise self.error(("element index",), close, "index out of range")
                    opts["indivisible"] = tuple(idx)
                else:
                    opts[key.value] = self.integer()
        if self.at("as"):
            self.advance()
            name = self.ident("task name").value
        if name is None:
            name = f"{kt.value}{len(self.doc.tasks) + 1}"
        tok = self.peek()
        self.define(
            TaskDecl(
                name,
                kt.value,
                st.value,
                tuple(elements),
                n_max=opts.get("max"),
                seed=opts.get("seed"),
                indivisible=opts.get("indivisible", ()),
                pm=pm,
            ),
            tok,
        )


def _names_or_error(p: _Parser, ext, i: int, tok: Token) -> tuple[str, ...]:
    from .towers import generator_names

    try:
        return generator_names(ext, i)
    except ValueError as e:
        raise p.error(("valid level",), tok, str(e)) from None


def parse(text: str) -> Document:
    return _Parser(text).parse()


def scope_alphabet(doc: Document, name: str) -> Alphabet:
    """Alphabet words in ``name`` are written over (presentation or user generators)."""
    return _scope_alphabet_of(doc, name)


def parse_word(text: str, alphabet: Alphabet, doc: Optional[Document] = None, scope: Optional[str] = None) -> Word:
    """A single word expression; word names of ``scope`` in ``doc`` may be used."""
    p = _Parser(text)
    scopes: tuple[str, ...] = ()
    if doc is not None:
        p.decls = list(doc.decls)
        p.doc = doc
        for d in doc.of_kind("word"):
            p.words[(d.scope, d.name)] = d.word
        if scope is not None:
            scopes = p.scopes_for(scope)
    w = p.word(alphabet, scopes, nested=True)
    if p.peek(skip_nl=True).kind != "eof":
        raise p.error(("end of word",))
    return w


# -- renderer --------------------------------------------------------------


def _w(w: Word) -> str:
    return str(w)


def _attach(v: str, a: Attach) -> str:
    if a is None:
        return v
    if isinstance(a, Word):
        return f"{v}.({_w(a)})"
    return f"{v}.({', '.join(str(x) for x in a)})"


def _render_decl(d: Decl) -> list[str]:
    if isinstance(d, AlphabetDecl):
        return [f"alphabet {d.name} {{ {', '.join(d.generators)} }}"]
    if isinstance(d, WordDecl):
        return [f"word {d.name} in {d.scope} = {_w(d.word)}"]
    if isinstance(d, HomDecl):
        return [f"hom {d.name} : {d.domain} -> {d.codomain} {{"] + [f"  {g} => {_w(w)}" for g, w in d.images] + ["}"]
    if isinstance(d, GraphDecl):
        out = [f"graph {d.name} {{"]
        for v in d.vertices:
            if v.kind == "free":
                out.append(f"  vertex {v.name} = free {v.alphabet}")
            else:
                out.append(f"  vertex {v.name} = abelian {len(v.names)} ({', '.join(v.names)})")
        for e in d.edges:
            tail = " tree" if e.tree else ""
            out.append(f"  edge {e.name} : {_attach(e.src, e.src_attach)} -- {_attach(e.dst, e.dst_attach)}{tail}")
        out.append(f"  base {d.base}")
        out.append("}")
        return out
    if isinstance(d, TowerDecl):
        out = [f"tower {d.name} {{", f"  base {d.base}"]
        for ext in d.levels:
            if isinstance(ext, AbelianExt):
                head = "singular" if ext.attach is None else f"attach {_w(ext.attach)}"
                out.append(f"  level abelian {head} rank {ext.rank} gens ({', '.join(ext.names)})")
            else:
                imgs = " ".join(f"({_w(x)}, {_w(y)})" for x, y in ext.images)
                line = f"  level quadratic genus {ext.genus} boundary {', '.join(_w(b) for b in ext.boundaries)}"
                if imgs:
                    line += f" images {imgs}"
                if ext.names:
                    line += f" gens ({', '.join(ext.names)})"
                out.append(line)
        out.append("}")
        return out
    if isinstance(d, TaskDecl):
        if d.kind == "conj":
            line = f"task conj {d.target} left {_w(d.elements[0])} right {_w(d.elements[1])}"
            if d.pm:
                line += " pm"
        else:
            line = f"task {d.kind} {d.target} set {{ {', '.join(_w(w) for w in d.elements)} }}"
            if d.n_max is not None:
                line += f" max {d.n_max}"
            if d.seed is not None:
                line += f" seed {d.seed}"
            if d.indivisible:
                line += f" indivisible {{ {', '.join(str(j) for j in d.indivisible)} }}"
        return [line + f" as {d.name}"]
    raise TypeError(f"cannot render {d!r}")


def render(doc: Document) -> str:
    lines: list[str] = []
    for d in doc.decls:
        lines.extend(_render_decl(d))
    return "\n".join(lines) + "\n"
