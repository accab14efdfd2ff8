"""Grounding, acyclicity checking and ground-program evaluation."""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Set

from .choices import ChoiceSpace
from .engine import GroundProgram, Grounder
from .errors import CycleFound, NotGround
from .program import Formula, Program, eval_formula, formula_atoms
from .terms import Fn, is_ground


def _program_ground_atoms(program: Program) -> List[Fn]:
    from .program import Neg, Pos

    seen: Dict[Fn, None] = {}
    for c in program.clauses:
        if is_ground(c.head):
            seen.setdefault(c.head)
        for lit in c.body:
            if isinstance(lit, (Pos, Neg)) and is_ground(lit.atom):
                seen.setdefault(lit.atom)
    return list(seen)


def relevant_ground(program: Program, goal: Formula, horizon: int,
                    space: Optional[ChoiceSpace] = None,
                    assumables: Iterable[Fn] = ()) -> GroundProgram:
    """Ground clause instances reachable backwards from the atoms of ``goal``.

    Goal atoms may contain variables (e.g. ``utility(U, S)``); every instance
    that could answer them is included.
    """
    g = Grounder(program, space, horizon, assumables)
    for atom in formula_atoms(goal):
        g.solve(atom)
    return g.ground


def level_map(gp: GroundProgram) -> Dict[Fn, int]:
    """Acyclicity witness for a ground program, or :class:`CycleFound`."""
    levels: Dict[Fn, int] = {}
    on_path: Dict[Fn, None] = {}

    def visit(atom: Fn) -> int:
        if atom in levels:
            return levels[atom]
        if atom in on_path:
            path = list(on_path)
            raise CycleFound(path[path.index(atom):] + [atom])
        on_path[atom] = None
        lv = 0
        for pos, neg in gp.rules.get(atom, ()):
            for b in pos + neg:
                lv = max(lv, visit(b) + 1)
        del on_path[atom]
        levels[atom] = lv
        return lv

    for atom in sorted(gp.atoms(), key=repr):
        visit(atom)
    return levels


def check_acyclic(program: Program, horizon: int, goals: Optional[Sequence[Fn]] = None,
                  space: Optional[ChoiceSpace] = None,
                  assumables: Iterable[Fn] = ()) -> Dict[Fn, int]:
    """Level map for the ground program relevant to ``goals`` up to ``horizon``.

    Without ``goals`` every ground atom written in the program is a goal.
    Raises :class:`CycleFound` or :class:`NonGroundableClause`.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if goals is None:
        goals = _program_ground_atoms(program)
    g = Grounder(program, space, horizon, assumables)
    for atom in goals:
        g.solve(atom)
    return level_map(g.ground)


def stable_model(gp: GroundProgram, assumed: Iterable[Fn] = (),
                 order: Optional[Sequence[Fn]] = None) -> Set[Fn]:
    """Compute the unique stable model bottom-up along ``order``.

    ``order`` must list every atom of ``gp`` after the atoms its rules mention;
    by default atoms are sorted by their level.
    """
    model: Set[Fn] = set(assumed)
    if order is None:
        levels = level_map(gp)
        order = sorted(levels, key=lambda a: (levels[a], repr(a)))
    for atom in order:
        if atom in model:
            continue
        for pos, neg in gp.rules.get(atom, ()):
            if all(p in model for p in pos) and not any(n in model for n in neg):
                model.add(atom)
                break
    return model


def holds(gp: GroundProgram, assumed: Iterable[Fn], goal: Formula) -> bool:
    """Truth of ``goal`` in the stable model of ``gp`` plus the assumed atoms."""
    for atom in formula_atoms(goal):
        if not is_ground(atom):
            raise NotGround(atom)
    model = stable_model(gp, assumed)
    return eval_formula(goal, lambda a: a in model)
