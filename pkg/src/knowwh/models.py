"""Finite first-order Kripke models, frame checks and canonical enumeration.

A model is a list of worlds, a shared element domain, an accessibility
relation and a per-world extension for every predicate.  Increasing-domain
models additionally carry a per-world subset of the domain that must grow
along the relation.  The declaration order of worlds and elements is the
canonical order used everywhere for deterministic reporting.

Canonical enumeration order, identical across runs and platforms:
world count ascending, then domain size ascending, then relation bitmask
ascending, then interpretation bitmask ascending, then per-world-domain
mask ascending.  Relation bit k stands for the world pair (k // n, k % n);
interpretation bits run predicate-major (names sorted), then world-major,
then tuple rank in lexicographic element-index order; per-world-domain bit
w*m + e marks element e as present at world w.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping

Extension = frozenset[tuple[str, ...]]


class ModelError(Exception):
    """Malformed model or model file."""


class EnumerationCapExceeded(Exception):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"model cap of {cap} exceeded")


class FrameClass(Enum):
    PREORDER = "pre"
    S42_STRONG = "s42"
    S42_WEAK = "s42w"
    KD45 = "kd45"
    UNRESTRICTED = "any"


@dataclass(frozen=True)
class Model:
    worlds: tuple[str, ...]
    domain: tuple[str, ...]
    relation: frozenset[tuple[str, str]]
    interp: Mapping[tuple[str, str], Extension] = field(default_factory=dict)
    world_domains: Mapping[str, tuple[str, ...]] | None = None

    def __post_init__(self):
        if not self.worlds:
            raise ModelError("a model needs at least one world")
        if not self.domain:
            raise ModelError("a model needs at least one element")
        if len(set(self.worlds)) != len(self.worlds):
            raise ModelError("duplicate world identifiers")
        if len(set(self.domain)) != len(self.domain):
            raise ModelError("duplicate element identifiers")
        wset, dset = set(self.worlds), set(self.domain)
        for (a, b) in self.relation:
            if a not in wset or b not in wset:
                raise ModelError(f"relation pair {a}->{b} references an unknown world")
        if self.world_domains is not None:
            for w, dom in self.world_domains.items():
                if w not in wset:
                    raise ModelError(f"world domain declared for unknown world {w}")
                if not dom:
                    raise ModelError(f"world {w} has an empty domain")
                if len(set(dom)) != len(dom) or not set(dom) <= dset:
                    raise ModelError(f"bad domain for world {w}")
            missing = wset - set(self.world_domains)
            if missing:
                raise ModelError(f"no domain declared for worlds {sorted(missing)}")
            for (a, b) in self.relation:
                if not set(self.world_domains[a]) <= set(self.world_domains[b]):
                    raise ModelError(
                        f"domain must not shrink along {a}->{b} in increasing mode")
        arities: dict[str, int] = {}
        cleaned = {}
        for (pred, w), tuples in self.interp.items():
            if w not in wset:
                raise ModelError(f"extension of {pred} declared at unknown world {w}")
            local = set(self.domain_at(w))
            for tup in tuples:
                seen = arities.setdefault(pred, len(tup))
                if seen != len(tup):
                    raise ModelError(
                        f"predicate {pred} used with arities {seen} and {len(tup)}")
                if not set(tup) <= local:
                    raise ModelError(
                        f"tuple {tup} of {pred} at {w} uses elements outside the domain of {w}")
            if tuples:
                cleaned[(pred, w)] = frozenset(tuples)
        object.__setattr__(self, "interp", cleaned)

    @property
    def increasing(self) -> bool:
        return self.world_domains is not None

    def domain_at(self, w: str) -> tuple[str, ...]:
        if self.world_domains is not None:
            return self.world_domains[w]
        return self.domain

    def successors(self, w: str) -> tuple[str, ...]:
        return tuple(v for v in self.worlds if (w, v) in self.relation)

    def extension(self, pred: str, w: str) -> Extension:
        return self.interp.get((pred, w), frozenset())


# Frame property checks, shared by check_frame and the enumerator.

def _reflexive(n: int, rel: frozenset[tuple[int, int]]) -> bool:
    return all((i, i) in rel for i in range(n))


def _transitive(rel: frozenset[tuple[int, int]]) -> bool:
    return all((a, d) in rel for (a, b) in rel for (c, d) in rel if b == c)


def _serial(n: int, rel: frozenset[tuple[int, int]]) -> bool:
    return all(any((i, j) in rel for j in range(n)) for i in range(n))


def _euclidean(rel: frozenset[tuple[int, int]]) -> bool:
    return all((b, d) in rel for (a, b) in rel for (c, d) in rel if a == c)


def _weakly_convergent(n: int, rel: frozenset[tuple[int, int]]) -> bool:
    for w in range(n):
        succ = [v for v in range(n) if (w, v) in rel]
        for v in succ:
            for v2 in succ:
                if not any((v, u) in rel and (v2, u) in rel for u in range(n)):
                    return False
    return True


def _strongly_convergent(n: int, rel: frozenset[tuple[int, int]]) -> bool:
    # For every w some u is reached by all of w's successors.
    for w in range(n):
        succ = [v for v in range(n) if (w, v) in rel]
        if not any(all((v, u) in rel for v in succ) for u in range(n)):
            return False
    return True


def _satisfies_class(n: int, rel: frozenset[tuple[int, int]], fc: FrameClass) -> bool:
    if fc is FrameClass.UNRESTRICTED:
        return True
    if fc is FrameClass.KD45:
        return _serial(n, rel) and _transitive(rel) and _euclidean(rel)
    if not (_reflexive(n, rel) and _transitive(rel)):
        return False
    if fc is FrameClass.PREORDER:
        return True
    if fc is FrameClass.S42_WEAK:
        return _weakly_convergent(n, rel)
    return _strongly_convergent(n, rel)


def check_frame(model: Model, frame_class: FrameClass) -> bool:
    """True iff the model's relation satisfies every property of the class."""
    index = {w: i for i, w in enumerate(model.worlds)}
    rel = frozenset((index[a], index[b]) for (a, b) in model.relation)
    return _satisfies_class(len(model.worlds), rel, frame_class)


def derive_belief_relation(model: Model) -> frozenset[tuple[str, str]]:
    """Pairs (w, u) such that every successor of w reaches u."""
    out = set()
    for w in model.worlds:
        succ = model.successors(w)
        for u in model.worlds:
            if all((v, u) in model.relation for v in succ):
                out.add((w, u))
    return frozenset(out)


@lru_cache(maxsize=None)
def frame_relations(n: int, frame_class: FrameClass) -> tuple[tuple[int, tuple[tuple[int, ...], ...]], ...]:
    """All relations on n labelled worlds in the class, by bitmask ascending.

    Each entry is (mask, successor lists per world).  Relation bit k encodes
    the pair (k // n, k % n).
    """
    pairs = [(i, j) for i in range(n) for j in range(n)]
    out = []
    for mask in range(1 << (n * n)):
        rel = frozenset(pairs[k] for k in range(n * n) if mask >> k & 1)
        if _satisfies_class(n, rel, frame_class):
            succs = tuple(tuple(j for j in range(n) if (i, j) in rel) for i in range(n))
            out.append((mask, succs))
    return tuple(out)


def relation_from_mask(n: int, mask: int) -> frozenset[tuple[str, str]]:
    return frozenset(
        (f"w{k // n}", f"w{k % n}") for k in range(n * n) if mask >> k & 1)


def interp_bit_layout(signature: Mapping[str, int], n: int, m: int
                      ) -> tuple[tuple[str, int, int], ...]:
    """(name, arity, first bit) per predicate, in canonical bit order."""
    layout = []
    offset = 0
    for name in sorted(signature):
        arity = signature[name]
        layout.append((name, arity, offset))
        offset += n * m ** arity
    return tuple(layout)


def interp_from_mask(signature: Mapping[str, int], n: int, m: int, mask: int,
                     ) -> dict[tuple[str, str], Extension]:
    elements = [f"a{i}" for i in range(m)]
    interp: dict[tuple[str, str], set[tuple[str, ...]]] = {}
    bit = 0
    for name in sorted(signature):
        arity = signature[name]
        for w in range(n):
            for tup in product(range(m), repeat=arity):
                if mask >> bit & 1:
                    interp.setdefault((name, f"w{w}"), set()).add(
                        tuple(elements[i] for i in tup))
                bit += 1
    return {k: frozenset(v) for k, v in interp.items()}


def _world_domain_configs(n: int, m: int, succs: tuple[tuple[int, ...], ...]
                          ) -> Iterator[tuple[int, dict[str, tuple[str, ...]]]]:
    """Nonempty, relation-monotone per-world domains by mask ascending."""
    elements = [f"a{i}" for i in range(m)]
    for mask in range(1 << (n * m)):
        doms = []
        ok = True
        for w in range(n):
            bits = mask >> (w * m) & ((1 << m) - 1)
            if bits == 0:
                ok = False
                break
            doms.append(bits)
        if not ok:
            continue
        if any(doms[w] | doms[v] != doms[v] for w in range(n) for v in succs[w]):
            continue
        named = {
            f"w{w}": tuple(e for i, e in enumerate(elements) if doms[w] >> i & 1)
            for w in range(n)
        }
        yield mask, named


def enumerate_models(max_worlds: int, max_domain: int,
                     signature: Mapping[str, int],
                     frame_class: FrameClass = FrameClass.S42_STRONG,
                     domain_mode: str = "constant",
                     cap: int | None = None) -> Iterator[Model]:
    """Yield every model within the bounds in canonical order.

    All labelled models are emitted; no isomorphism pruning.  Raises
    EnumerationCapExceeded after ``cap`` models.
    """
    if max_worlds < 1 or max_domain < 1:
        raise ValueError("bounds must be positive")
    if domain_mode not in ("constant", "increasing"):
        raise ValueError(f"unknown domain mode {domain_mode!r}")
    emitted = 0
    for n in range(1, max_worlds + 1):
        worlds = tuple(f"w{i}" for i in range(n))
        for m in range(1, max_domain + 1):
            domain = tuple(f"a{i}" for i in range(m))
            bits = sum(n * m ** signature[p] for p in signature)
            for rel_mask, succs in frame_relations(n, frame_class):
                relation = relation_from_mask(n, rel_mask)
                for interp_mask in range(1 << bits):
                    interp = interp_from_mask(signature, n, m, interp_mask)
                    if domain_mode == "constant":
                        configs: Iterable = [(0, None)]
                    else:
                        configs = _world_domain_configs(n, m, succs)
                    for _, wd in configs:
                        if wd is not None:
                            used = {
                                (p, w): tuples for (p, w), tuples in interp.items()}
                            if any(
                                not {e for tup in tuples for e in tup} <= set(wd[w])
                                    for (p, w), tuples in used.items()):
                                continue
                        if cap is not None and emitted >= cap:
                            raise EnumerationCapExceeded(cap)
                        emitted += 1
                        yield Model(worlds=worlds, domain=domain,
                                    relation=relation, interp=interp,
                                    world_domains=wd)


# Model file format (line oriented, '#' starts a comment):
#   worlds: w0 w1
#   domain: a b
#   domain@w0: a               optional; any such line selects increasing mode
#   rel: w0->w0 w0->w1
#   pred S@w0: n p             unary: elements; n-ary: (a,b) tuples; 0-ary: true/false

_RESERVED_TOKENS = {"true", "false"}


def load_model(text: str) -> Model:
    worlds: tuple[str, ...] | None = None
    domain: tuple[str, ...] | None = None
    world_domains: dict[str, tuple[str, ...]] = {}
    relation: set[tuple[str, str]] = set()
    interp: dict[tuple[str, str], set[tuple[str, ...]]] = {}
    zero_ary: dict[tuple[str, str], bool] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ModelError(f"line {lineno}: expected 'key: values'")
        key, _, rest = line.partition(":")
        key = key.strip()
        items = rest.split()
        if key == "worlds":
            if worlds is not None:
                raise ModelError(f"line {lineno}: duplicate worlds line")
            worlds = tuple(items)
        elif key == "domain":
            if domain is not None:
                raise ModelError(f"line {lineno}: duplicate domain line")
            if set(items) & _RESERVED_TOKENS:
                raise ModelError(f"line {lineno}: 'true'/'false' are reserved")
            domain = tuple(items)
        elif key.startswith("domain@"):
            w = key[len("domain@"):]
            world_domains[w] = tuple(items)
        elif key == "rel":
            for item in items:
                if "->" not in item:
                    raise ModelError(f"line {lineno}: bad relation pair {item!r}")
                a, _, b = item.partition("->")
                relation.add((a, b))
        elif key.startswith("pred "):
            head = key[len("pred "):]
            if "@" not in head:
                raise ModelError(f"line {lineno}: expected 'pred NAME@WORLD'")
            pred, _, w = head.partition("@")
            for item in items:
                if item in ("true", "false"):
                    zero_ary[(pred, w)] = item == "true"
                elif item.startswith("("):
                    if not item.endswith(")"):
                        raise ModelError(f"line {lineno}: bad tuple {item!r}")
                    parts = tuple(p.strip() for p in item[1:-1].split(","))
                    interp.setdefault((pred, w), set()).add(parts)
                else:
                    interp.setdefault((pred, w), set()).add((item,))
        else:
            raise ModelError(f"line {lineno}: unknown directive {key!r}")

    if worlds is None:
        raise ModelError("missing worlds line")
    if domain is None:
        raise ModelError("missing domain line")
    for (pred, w), val in zero_ary.items():
        if val:
            interp.setdefault((pred, w), set()).add(())
    wd = None
    if world_domains:
        wd = {w: world_domains.get(w, domain) for w in worlds}
    return Model(worlds=worlds, domain=domain, relation=frozenset(relation),
                 interp={k: frozenset(v) for k, v in interp.items()},
                 world_domains=wd)


def save_model(model: Model) -> str:
    """Canonical text rendering; load(save(m)) == m."""
    windex = {w: i for i, w in enumerate(model.worlds)}
    eindex = {e: i for i, e in enumerate(model.domain)}
    lines = [
        "worlds: " + " ".join(model.worlds),
        "domain: " + " ".join(model.domain),
    ]
    if model.world_domains is not None:
        for w in model.worlds:
            lines.append(f"domain@{w}: " + " ".join(model.world_domains[w]))
    pairs = sorted(model.relation, key=lambda p: (windex[p[0]], windex[p[1]]))
    lines.append("rel: " + " ".join(f"{a}->{b}" for a, b in pairs))
    for (pred, w) in sorted(model.interp, key=lambda k: (k[0], windex[k[1]])):
        tuples = model.interp[(pred, w)]
        if not tuples:
            continue
        arity = len(next(iter(tuples)))
        if arity == 0:
            body = "true"
        elif arity == 1:
            body = " ".join(t[0] for t in sorted(tuples, key=lambda t: eindex[t[0]]))
        else:
            body = " ".join(
                "(" + ",".join(t) + ")"
                for t in sorted(tuples, key=lambda t: tuple(eindex[e] for e in t)))
        lines.append(f"pred {pred}@{w}: {body}")
    return "\n".join(lines) + "\n"
