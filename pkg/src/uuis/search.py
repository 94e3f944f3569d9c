"""Substring search and the boolean query language.

Grammar: uppercase AND / OR / NOT are operators (precedence NOT > AND > OR),
parentheses group, and any run of other words between operators is one term:
"blue chair AND wood" is Term("blue chair") ∧ Term("wood"). Lowercase and/or/
not are ordinary words. A term matches a record when any of its textual
fields contains it case-insensitively (casefolded); numbers match by their
canonical decimal rendering. NOT complements within the restricted visible
universe.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable

from .authz import Authz
from .errors import err
from .model import INVENTORY_KINDS, Kind, Status, region_of
from .sessions import SessionService
from .storage import Store

NO_MATCHES_MESSAGE = "Search item not found"

SEARCH_CATEGORIES = {
    "persons": Kind.PERSON,
    "locations": Kind.LOCATION,
    "assets": Kind.ASSET,
    "licenses": Kind.LICENSE,
}


# ------------------------------------------------------------------ expressions

@dataclass(frozen=True)
class Term:
    text: str


@dataclass(frozen=True)
class And:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Or:
    left: "QueryExpr"
    right: "QueryExpr"


@dataclass(frozen=True)
class Not:
    child: "QueryExpr"


QueryExpr = Term | And | Or | Not

_OPERATORS = {"AND", "OR", "NOT"}


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    for chunk in text.replace("(", " ( ").replace(")", " ) ").split():
        tokens.append(chunk)
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def parse(self) -> QueryExpr:
        expr = self.parse_or()
        if self.peek() is not None:
            raise err("MALFORMED_QUERY", f"unexpected {self.peek()!r}")
        return expr

    def parse_or(self) -> QueryExpr:
        left = self.parse_and()
        while self.peek() == "OR":
            self.take()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> QueryExpr:
        left = self.parse_unary()
        while self.peek() == "AND":
            self.take()
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> QueryExpr:
        if self.peek() == "NOT":
            self.take()
            return Not(self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> QueryExpr:
        token = self.peek()
        if token is None:
            raise err("MALFORMED_QUERY", "query ends where a term was expected")
        if token == "(":
            self.take()
            expr = self.parse_or()
            if self.peek() != ")":
                raise err("MALFORMED_QUERY", "unbalanced parentheses")
            self.take()
            return expr
        if token in _OPERATORS or token == ")":
            raise err("MALFORMED_QUERY", f"string can't start with {token}")
        words = []
        while self.peek() is not None and self.peek() not in _OPERATORS \
                and self.peek() not in ("(", ")"):
            words.append(self.take())
        return Term(" ".join(words))


def parse_query(text: str) -> QueryExpr:
    if not text or not text.strip():
        raise err("EMPTY_QUERY")
    return _Parser(_tokenize(text)).parse()


# ------------------------------------------------------------------ matching

def searchable_strings(record: Any) -> list[str]:
    """The textual fields of a record, as searched.

    Strings are taken as-is, ints/floats by str(), enums by their value;
    timestamps, booleans, None and collections are not textual fields.
    """
    import dataclasses

    out: list[str] = []
    for f in dataclasses.fields(record):
        if f.name in ("password_digest", "biometric_digest"):
            continue
        value = getattr(record, f.name)
        if isinstance(value, Enum):
            v = value.value
            out.append(str(v))
        elif isinstance(value, bool) or value is None:
            continue
        elif isinstance(value, str):
            out.append(value)
        elif isinstance(value, (int, float)):
            out.append(str(value))
    return out


def term_matches(record: Any, needle: str, fields: Iterable[str] | None = None) -> bool:
    needle_cf = needle.casefold()
    import dataclasses

    if fields is None:
        return any(needle_cf in s.casefold() for s in searchable_strings(record))
    names = set(fields)
    for f in dataclasses.fields(record):
        if f.name not in names or f.name in ("password_digest", "biometric_digest"):
            continue
        value = getattr(record, f.name)
        if isinstance(value, Enum):
            value = value.value
        if isinstance(value, bool) or value is None:
            continue
        if isinstance(value, str) and needle_cf in value.casefold():
            return True
        if isinstance(value, (int, float)) and needle_cf in str(value).casefold():
            return True
    return False


def evaluate(expr: QueryExpr, record: Any, fields: Iterable[str] | None = None) -> bool:
    if isinstance(expr, Term):
        return term_matches(record, expr.text, fields)
    if isinstance(expr, And):
        return evaluate(expr.left, record, fields) and evaluate(expr.right, record, fields)
    if isinstance(expr, Or):
        return evaluate(expr.left, record, fields) or evaluate(expr.right, record, fields)
    if isinstance(expr, Not):
        return not evaluate(expr.child, record, fields)
    raise err("VALIDATION", f"unknown expression node {expr!r}")


@dataclass
class SearchRestriction:
    categories: list[str]
    fields: dict[str, list[str]] | None = None  # per-category field subsets

    def __post_init__(self) -> None:
        for name in self.categories:
            if name not in SEARCH_CATEGORIES:
                raise err("VALIDATION", f"unknown search category {name!r}")
        if self.fields:
            import dataclasses
            from .model import RECORD_TYPES
            for category, names in self.fields.items():
                if category not in SEARCH_CATEGORIES:
                    raise err("VALIDATION", f"unknown search category {category!r}")
                known = {f.name for f in dataclasses.fields(
                    RECORD_TYPES[SEARCH_CATEGORIES[category]])}
                for n in names:
                    if n not in known:
                        raise err("UNKNOWN_FIELD", field=n)


@dataclass
class SearchResult:
    groups: dict[str, list[dict[str, Any]]]
    total: int
    found: bool
    message: str | None = None


class SearchService:
    def __init__(self, store: Store, sessions: SessionService, authz: Authz):
        self.store = store
        self.sessions = sessions
        self.authz = authz

    def _visible_universe(self, session, kinds: Iterable[Kind]) -> dict[Kind, list[Any]]:
        person = self.store.get(Kind.PERSON, session.person_id)
        scope = person.scope()
        universe: dict[Kind, list[Any]] = {}
        for kind in kinds:
            universe[kind] = self.store.scan(
                kind,
                lambda r, k=kind: scope.contains(*region_of(k, r))
                and getattr(r, "status", None) != Status.UNAVAILABLE,
            )
        return universe

    def basic_search(self, token: str, query: str) -> SearchResult:
        session = self.sessions.require(token)
        self.authz.require(session, "basicSearch")
        if not query or not query.strip():
            raise err("EMPTY_QUERY")
        universe = self._visible_universe(session, INVENTORY_KINDS)
        groups: dict[str, list[dict[str, Any]]] = {}
        total = 0
        for name, kind in SEARCH_CATEGORIES.items():
            hits = [r for r in universe[kind] if term_matches(r, query)]
            groups[name] = [_row(kind, r) for r in hits]
            total += len(hits)
        self._log(session, "basic", query, total)
        return SearchResult(groups=groups, total=total, found=total > 0,
                            message=None if total else NO_MATCHES_MESSAGE)

    def advanced_search(self, token: str, query: str | QueryExpr,
                        restriction: SearchRestriction | None = None) -> SearchResult:
        session = self.sessions.require(token)
        self.authz.require(session, "advancedSearch")
        expr = parse_query(query) if isinstance(query, str) else query
        restriction = restriction or SearchRestriction(list(SEARCH_CATEGORIES))
        categories = restriction.categories or list(SEARCH_CATEGORIES)
        universe = self._visible_universe(
            session, [SEARCH_CATEGORIES[c] for c in categories])
        groups: dict[str, list[dict[str, Any]]] = {}
        total = 0
        for name in categories:
            kind = SEARCH_CATEGORIES[name]
            field_subset = (restriction.fields or {}).get(name)
            hits = [r for r in universe[kind] if evaluate(expr, r, field_subset)]
            groups[name] = [_row(kind, r) for r in hits]
            total += len(hits)
        self._log(session, "advanced", str(expr), total)
        return SearchResult(groups=groups, total=total, found=total > 0,
                            message=None if total else NO_MATCHES_MESSAGE)

    def _log(self, session, mode: str, query: str, total: int) -> None:
        with self.store.txn() as txn:
            txn.append_audit(session.person_id, "search.view", (),
                             f"{mode} search, {total} hit(s)")


def _row(kind: Kind, record: Any) -> dict[str, Any]:
    from .storage import encode_record

    doc = encode_record(record)
    doc.pop("password_digest", None)
    doc.pop("biometric_digest", None)
    doc["_category"] = kind.value
    return doc
