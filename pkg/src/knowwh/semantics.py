"""Satisfaction for bundled knowledge-wh formulas on finite Kripke models.

The recursive clauses:

    M,w,s |= P(x1..xn)        iff (s(x1),..,s(xn)) is in the extension at w
    M,w,s |= x = y            iff s(x) = s(y)
    M,w,s |= ~p, p & q        as usual
    M,w,s |= [K]p             iff p holds at every successor of w
    M,w,s |= wh[tB_MS x]p     iff some a has believed-and-true p(a)
    M,w,s |= wh[tB_MS_FS x]p  iff additionally no b has believed-but-false p(b)
    M,w,s |= wh[K_MS x]p      iff some a has [K]p(a)
    M,w,s |= wh[K_MS_FS x]p   iff some a has [K]p(a) and no b has
                              believed-but-false p(b)

"believed" means the definitional expansion <K>[K], never a primitive
operator.  In increasing-domain models the binder elements a, b range over
the domain of the evaluation world; assignments carried into successors
stay valid because domains only grow along the relation.

satisfies_via_rb is a cross-check semantics that evaluates every [B]
subformula (the ~[K]~[K] pattern) by universally quantifying over the
derived belief relation instead; it requires a strongly convergent
preorder frame, where the two routes agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

from .formulas import (And, Atom, BoxK, Formula, Ident, Not, Var, Wh, WhTag,
                       as_box_b, free_vars, pretty)
from .models import FrameClass, Model, check_frame, derive_belief_relation

Assignment = Mapping[Var, str]


class EvalError(Exception):
    """Unassigned free variable or out-of-domain value."""


class FrameError(Exception):
    """The model is outside the frame class required by the operation."""


@dataclass
class TraceStep:
    depth: int
    world: str
    formula: Formula
    assignment: dict[Var, str]
    verdict: bool

    def render(self) -> str:
        pad = "  " * self.depth
        binds = " ".join(f"{v.name}={e}" for v, e in sorted(
            self.assignment.items(), key=lambda kv: kv[0].name))
        binds = f" [{binds}]" if binds else ""
        return f"{pad}{self.world} |= {pretty(self.formula)}{binds} => {str(self.verdict).lower()}"


def _check_entry(model: Model, world: str, sigma: Assignment, formula: Formula) -> None:
    if world not in model.worlds:
        raise EvalError(f"unknown world {world!r}")
    fv = free_vars(formula)
    missing = [v.name for v in fv if v not in sigma]
    if missing:
        raise EvalError(f"unassigned free variables: {', '.join(sorted(missing))}")
    dom = set(model.domain_at(world))
    for v in fv:
        if sigma[v] not in set(model.domain):
            raise EvalError(f"{v.name}={sigma[v]} is not a domain element")
        if model.increasing and sigma[v] not in dom:
            raise EvalError(
                f"{v.name}={sigma[v]} lies outside the domain of {world}")


def _sat(model: Model, w: str, sigma: Assignment, f: Formula,
         rb: frozenset[tuple[str, str]] | None,
         trace: list[TraceStep] | None, depth: int) -> bool:
    if rb is not None:
        body = as_box_b(f)
        if body is not None:
            verdict = all(
                _sat(model, v, sigma, body, rb, trace, depth + 1)
                for v in model.worlds if (w, v) in rb)
            if trace is not None:
                trace.append(TraceStep(depth, w, f, _restrict(sigma, f), verdict))
            return verdict
    if isinstance(f, Atom):
        try:
            tup = tuple(sigma[a] for a in f.args)
        except KeyError as e:
            raise EvalError(f"unassigned variable {e.args[0]}") from None
        verdict = tup in model.extension(f.pred, w)
    elif isinstance(f, Ident):
        verdict = sigma[f.left] == sigma[f.right]
    elif isinstance(f, Not):
        verdict = not _sat(model, w, sigma, f.sub, rb, trace, depth + 1)
    elif isinstance(f, And):
        verdict = (_sat(model, w, sigma, f.left, rb, trace, depth + 1)
                   and _sat(model, w, sigma, f.right, rb, trace, depth + 1))
    elif isinstance(f, BoxK):
        verdict = all(
            _sat(model, v, sigma, f.sub, rb, trace, depth + 1)
            for v in model.successors(w))
    elif isinstance(f, Wh):
        verdict = _sat_wh(model, w, sigma, f, rb, trace, depth)
    else:
        raise TypeError(f"not a formula: {f!r}")
    if trace is not None:
        trace.append(TraceStep(depth, w, f, _restrict(sigma, f), verdict))
    return verdict


def _believes(model: Model, w: str, sigma: Assignment, f: Formula,
              rb: frozenset[tuple[str, str]] | None,
              trace: list[TraceStep] | None, depth: int) -> bool:
    # <K>[K]f, or a box over the derived belief relation in rb mode.
    if rb is not None:
        return all(_sat(model, v, sigma, f, rb, trace, depth)
                   for v in model.worlds if (w, v) in rb)
    return any(
        all(_sat(model, u, sigma, f, rb, trace, depth) for u in model.successors(v))
        for v in model.successors(w))


def _sat_wh(model: Model, w: str, sigma: Assignment, f: Wh,
            rb: frozenset[tuple[str, str]] | None,
            trace: list[TraceStep] | None, depth: int) -> bool:
    dom = model.domain_at(w)
    x, body = f.var, f.body
    d = depth + 1

    def believed_true(a: str) -> bool:
        s2 = {**sigma, x: a}
        return (_believes(model, w, s2, body, rb, trace, d)
                and _sat(model, w, s2, body, rb, trace, d))

    def known(a: str) -> bool:
        s2 = {**sigma, x: a}
        return all(_sat(model, v, s2, body, rb, trace, d)
                   for v in model.successors(w))

    def no_false_belief() -> bool:
        return all(
            not _believes(model, w, {**sigma, x: b}, body, rb, trace, d)
            or _sat(model, w, {**sigma, x: b}, body, rb, trace, d)
            for b in dom)

    if f.tag is WhTag.TB_MS:
        return any(believed_true(a) for a in dom)
    if f.tag is WhTag.TB_MS_FS:
        return any(believed_true(a) for a in dom) and no_false_belief()
    if f.tag is WhTag.K_MS:
        return any(known(a) for a in dom)
    if f.tag is WhTag.K_MS_FS:
        return any(known(a) for a in dom) and no_false_belief()
    raise TypeError(f"unknown tag {f.tag!r}")


def _restrict(sigma: Assignment, f: Formula) -> dict[Var, str]:
    fv = free_vars(f)
    return {v: e for v, e in sigma.items() if v in fv}


def satisfies(model: Model, world: str, sigma: Assignment, formula: Formula) -> bool:
    """Truth of ``formula`` at ``world`` under assignment ``sigma``."""
    _check_entry(model, world, sigma, formula)
    return _sat(model, world, sigma, formula, rb=None, trace=None, depth=0)


def satisfies_trace(model: Model, world: str, sigma: Assignment,
                    formula: Formula) -> tuple[bool, list[TraceStep]]:
    """Like satisfies, also returning the evaluation steps in visit order."""
    _check_entry(model, world, sigma, formula)
    steps: list[TraceStep] = []
    verdict = _sat(model, world, sigma, formula, rb=None, trace=steps, depth=0)
    return verdict, steps


def satisfies_via_rb(model: Model, world: str, sigma: Assignment,
                     formula: Formula) -> bool:
    """satisfies with [B] evaluated over the derived belief relation.

    Only defined on strongly convergent preorder frames.
    """
    if not check_frame(model, FrameClass.S42_STRONG):
        raise FrameError("model is not a strongly convergent preorder")
    _check_entry(model, world, sigma, formula)
    rb = derive_belief_relation(model)
    return _sat(model, world, sigma, formula, rb=rb, trace=None, depth=0)


def assignments_over(variables: frozenset[Var], elements: tuple[str, ...]
                     ) -> list[dict[Var, str]]:
    """All assignments of ``elements`` to ``variables`` in canonical order.

    Variables are sorted by name; values run in element order, last
    variable fastest.
    """
    names = sorted(variables, key=lambda v: v.name)
    return [dict(zip(names, combo)) for combo in product(elements, repeat=len(names))]


def valid_in_model(model: Model, formula: Formula) -> bool:
    """True iff the formula holds at every world under every assignment.

    Assignments range over the evaluation world's domain, which equals the
    shared domain on constant-domain models.
    """
    fv = free_vars(formula)
    for w in model.worlds:
        for sigma in assignments_over(fv, model.domain_at(w)):
            if not _sat(model, w, sigma, formula, rb=None, trace=None, depth=0):
                return False
    return True
