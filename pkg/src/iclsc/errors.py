"""Exception hierarchy shared by every part of the engine."""


class ICLError(Exception):
    """Base class for all engine errors."""


class NotGround(ICLError):
    def __init__(self, term, where=""):
        self.term = term
        msg = f"term is not ground: {term}"
        if where:
            msg += f" ({where})"
        super().__init__(msg)


class UnboundArithmetic(ICLError, ArithmeticError):
    pass


class RangeRestrictionError(ICLError):
    def __init__(self, clause, variables):
        self.clause = clause
        self.variables = variables
        names = ", ".join(sorted(str(v) for v in variables))
        super().__init__(f"variables {names} are not range restricted in: {clause}")


class CycleFound(ICLError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        chain = " -> ".join(str(a) for a in self.cycle)
        super().__init__(f"dependency cycle: {chain}")


class NonGroundableClause(ICLError):
    def __init__(self, clause, detail=""):
        self.clause = clause
        super().__init__(f"cannot ground clause {clause}" + (f": {detail}" if detail else ""))


class HorizonExceeded(ICLError):
    def __init__(self, atom, horizon):
        self.atom = atom
        self.horizon = horizon
        super().__init__(f"{atom} reaches beyond situation depth {horizon}")


class TheoryError(ICLError):
    """A theory failed validation; ``violations`` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class PlanError(ICLError):
    pass


class LoopBoundExceeded(ICLError):
    def __init__(self, condition, bound, situation):
        self.condition = condition
        self.bound = bound
        self.situation = situation
        super().__init__(
            f"while {condition} still sensed after {bound} iterations at {situation}"
        )


class UtilityIncomplete(ICLError):
    def __init__(self, witnesses):
        self.witnesses = list(witnesses)
        first = self.witnesses[0] if self.witnesses else None
        msg = f"{len(self.witnesses)} world/situation pair(s) without a unique utility"
        if first is not None:
            msg += f"; e.g. {first}"
        super().__init__(msg)


class TooManyWorlds(ICLError):
    def __init__(self, count, limit):
        self.count = count
        self.limit = limit
        super().__init__(f"{count} worlds exceeds the enumeration limit of {limit}")


class PlanEvaluationError(ICLError):
    def __init__(self, plan, cause):
        self.plan = plan
        self.cause = cause
        super().__init__(f"while evaluating plan {plan}: {cause}")


class ParseError(ICLError):
    def __init__(self, message, line, column):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}")


class DuplicateDeclaration(ParseError):
    pass


class BadTriggerPartition(ICLError):
    pass


class BadOutcomeDistribution(ICLError):
    pass
