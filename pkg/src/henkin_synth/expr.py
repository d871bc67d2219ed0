"""Boolean expression trees for candidate functions.

Nodes are immutable. Repairs nest expressions deeply, so every traversal
here is iterative (``_postorder``) rather than recursive, and memoized by
node identity so shared subtrees are visited once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Union


@dataclass(frozen=True)
class Const:
    value: bool

    def __repr__(self):
        return "TRUE" if self.value else "FALSE"


@dataclass(frozen=True)
class VarRef:
    var: int

    def __repr__(self):
        return f"v{self.var}"


@dataclass(frozen=True)
class Not:
    child: "BoolExpr"


@dataclass(frozen=True)
class And:
    children: tuple["BoolExpr", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["BoolExpr", ...]


BoolExpr = Union[Const, VarRef, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


class UnassignedVariable(KeyError):
    pass


def _children(e: BoolExpr) -> tuple:
    if isinstance(e, Not):
        return (e.child,)
    if isinstance(e, (And, Or)):
        return e.children
    return ()


def _postorder(root: BoolExpr) -> Iterator[BoolExpr]:
    """Yield each distinct node (by identity) after all of its children."""
    done: set[int] = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if id(node) in done:
            continue
        if expanded:
            done.add(id(node))
            yield node
            continue
        stack.append((node, True))
        for c in reversed(_children(node)):
            if id(c) not in done:
                stack.append((c, False))


def _fold(root: BoolExpr, leaf: Callable, node: Callable) -> object:
    memo: dict[int, object] = {}
    for n in _postorder(root):
        if isinstance(n, (Const, VarRef)):
            memo[id(n)] = leaf(n)
        else:
            memo[id(n)] = node(n, [memo[id(c)] for c in _children(n)])
    return memo[id(root)]


# -- smart constructors (constant folding, flattening) ----------------------

def var(v: int) -> VarRef:
    return VarRef(v)


def lit(l: int) -> BoolExpr:
    """Expression for a DIMACS literal."""
    return VarRef(l) if l > 0 else Not(VarRef(-l))


def mk_not(e: BoolExpr) -> BoolExpr:
    if isinstance(e, Const):
        return FALSE if e.value else TRUE
    if isinstance(e, Not):
        return e.child
    return Not(e)


def _nary(cls, absorbing: bool, args) -> BoolExpr:
    out: list[BoolExpr] = []
    for a in args:
        if isinstance(a, Const):
            if a.value == absorbing:
                return Const(absorbing)
            continue
        if isinstance(a, cls):
            out.extend(a.children)
        else:
            out.append(a)
    if not out:
        return Const(not absorbing)
    if len(out) == 1:
        return out[0]
    return cls(tuple(out))


def mk_and(*args: BoolExpr) -> BoolExpr:
    return _nary(And, False, args)


def mk_or(*args: BoolExpr) -> BoolExpr:
    return _nary(Or, True, args)


def simplify(e: BoolExpr) -> BoolExpr:
    """Constant folding and flattening, bottom-up."""

    def node(n, kids):
        if isinstance(n, Not):
            return mk_not(kids[0])
        if isinstance(n, And):
            return mk_and(*kids)
        return mk_or(*kids)

    return _fold(e, lambda n: n, node)


# -- queries ----------------------------------------------------------------

def variables(e: BoolExpr) -> frozenset[int]:
    return frozenset(n.var for n in _postorder(e) if isinstance(n, VarRef))


def size(e: BoolExpr) -> int:
    return sum(1 for _ in _postorder(e))


def evaluate(e: BoolExpr, assignment: Mapping[int, bool]) -> bool:
    def leaf(n):
        if isinstance(n, Const):
            return n.value
        try:
            return bool(assignment[n.var])
        except KeyError:
            raise UnassignedVariable(n.var) from None

    def node(n, kids):
        if isinstance(n, Not):
            return not kids[0]
        if isinstance(n, And):
            return all(kids)
        return any(kids)

    return _fold(e, leaf, node)


def substitute(e: BoolExpr, mapping: Mapping[int, BoolExpr]) -> BoolExpr:
    """Replace ``VarRef(v)`` by ``mapping[v]`` wherever present; folds constants."""

    def leaf(n):
        if isinstance(n, VarRef) and n.var in mapping:
            return mapping[n.var]
        return n

    def node(n, kids):
        if isinstance(n, Not):
            return mk_not(kids[0])
        if isinstance(n, And):
            return mk_and(*kids)
        return mk_or(*kids)

    return _fold(e, leaf, node)


def rename(e: BoolExpr, mapping: Mapping[int, int]) -> BoolExpr:
    return substitute(e, {a: VarRef(b) for a, b in mapping.items()})


# -- CNF --------------------------------------------------------------------

class VarPool:
    """Fresh variable allocator; hands out ids strictly above ``top``."""

    def __init__(self, top: int):
        self.top = top

    def new(self) -> int:
        self.top += 1
        return self.top


def to_cnf_defs(
    e: BoolExpr,
    output: int,
    pool: VarPool,
    rename_map: Mapping[int, int] | None = None,
) -> list[tuple[int, ...]]:
    """Tseitin clauses forcing ``output <-> e`` in every model.

    Internal And/Or gates get fresh variables from ``pool``; a root gate
    uses ``output`` directly. ``rename_map`` redirects variable references
    (used to point Y references at their primed copies).
    """
    rename_map = rename_map or {}
    clauses: list[tuple[int, ...]] = []
    memo: dict[int, object] = {}

    def gate(kind, kid_lits, out):
        if kind is And:
            clauses.append(tuple([out] + [-k for k in kid_lits]))
            clauses.extend((-out, k) for k in kid_lits)
        else:
            clauses.append(tuple([-out] + list(kid_lits)))
            clauses.extend((out, -k) for k in kid_lits)

    for n in _postorder(e):
        if isinstance(n, Const):
            memo[id(n)] = n.value
        elif isinstance(n, VarRef):
            memo[id(n)] = rename_map.get(n.var, n.var)
        elif isinstance(n, Not):
            c = memo[id(n.child)]
            memo[id(n)] = (not c) if isinstance(c, bool) else -c
        else:
            kids = [memo[id(c)] for c in n.children]
            absorbing = isinstance(n, Or)
            if any(k is absorbing for k in kids):
                memo[id(n)] = absorbing
                continue
            kid_lits = list(dict.fromkeys(k for k in kids if not isinstance(k, bool)))
            if not kid_lits:
                memo[id(n)] = not absorbing
            elif len(kid_lits) == 1:
                memo[id(n)] = kid_lits[0]
            else:
                out = output if n is e else pool.new()
                gate(type(n), kid_lits, out)
                memo[id(n)] = out

    root = memo[id(e)]
    if isinstance(root, bool):
        clauses.append((output,) if root else (-output,))
    elif root != output:
        clauses.append((-output, root))
        clauses.append((output, -root))
    return clauses


# -- s-expressions (henkin-fn v1 bodies) ------------------------------------

def to_sexpr(e: BoolExpr) -> str:
    def leaf(n):
        if isinstance(n, Const):
            return "true" if n.value else "false"
        return str(n.var)

    def node(n, kids):
        if isinstance(n, Not):
            return f"(not {kids[0]})"
        op = "and" if isinstance(n, And) else "or"
        return f"({op} {' '.join(kids)})"

    return _fold(e, leaf, node)


def parse_sexpr(text: str) -> BoolExpr:
    """Inverse of ``to_sexpr``. No folding, so the tree is kept as written."""
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    if not tokens:
        raise ValueError("empty expression")
    # frames: [op, children]
    stack: list[list] = []
    result: BoolExpr | None = None
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "(":
            if i + 1 >= len(tokens) or tokens[i + 1] not in ("not", "and", "or"):
                raise ValueError(f"expected operator after '(' at token {i}")
            stack.append([tokens[i + 1], []])
            i += 2
            continue
        if tok == ")":
            if not stack:
                raise ValueError("unbalanced ')'")
            op, kids = stack.pop()
            if op == "not":
                if len(kids) != 1:
                    raise ValueError("'not' takes exactly one argument")
                node: BoolExpr = Not(kids[0])
            else:
                if not kids:
                    raise ValueError(f"'{op}' needs at least one argument")
                node = (And if op == "and" else Or)(tuple(kids))
        elif tok == "true":
            node = TRUE
        elif tok == "false":
            node = FALSE
        else:
            try:
                v = int(tok)
            except ValueError:
                raise ValueError(f"bad token {tok!r}") from None
            if v < 1:
                raise ValueError(f"variable id must be positive, got {v}")
            node = VarRef(v)
        i += 1
        if stack:
            stack[-1][1].append(node)
        elif result is None:
            result = node
        else:
            raise ValueError("trailing tokens after expression")
    if stack or result is None:
        raise ValueError("unbalanced '('")
    return result
