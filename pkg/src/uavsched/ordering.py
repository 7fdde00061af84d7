"""Strict-total-order formulation of the handover problem.

Flows and retiring UAVs share one index set: flow i takes combined index i
(1-based), UAV j takes index n+j.  A feasible solution is a strict total
order on that set that contains every flow-before-its-UAV dependency pair;
its cost counts T_i * P_j for every flow ordered before a UAV.  The module
builds the binary model, exports it in LP format for external solvers,
validates candidate orders, and converts between orders and schedules.
"""

from dataclasses import dataclass
from pathlib import Path

from .errors import DimensionMismatch, EmptyInstance, InvalidOrder, IoFailure
from .model import ReplacementInstance, Schedule, ensure_valid_schedule


@dataclass(frozen=True)
class CombinedIndex:
    """1-based indexing of the combined flow+UAV set."""

    n: int
    m: int

    @property
    def size(self) -> int:
        return self.n + self.m

    def flow(self, i: int) -> int:
        return i + 1

    def uav(self, j: int) -> int:
        return self.n + 1 + j

    def is_flow(self, k: int) -> bool:
        return 1 <= k <= self.n


@dataclass(frozen=True)
class DependencyRelation:
    """Flow-before-UAV precedence pairs over combined indices (bipartite)."""

    n: int
    m: int
    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        for i, j in self.pairs:
            if not (1 <= i <= self.n < j <= self.n + self.m):
                raise ValueError(f"dependency pair ({i},{j}) is not flow-before-UAV")


@dataclass(frozen=True)
class TotalOrderMatrix:
    """Binary precedence matrix x over combined indices, x_ij = 1 iff i before j."""

    n: int
    m: int
    rows: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return self.n + self.m

    def value(self, i: int, j: int) -> int:
        return self.rows[i - 1][j - 1]

    @classmethod
    def from_sequence(cls, n: int, m: int, sequence) -> "TotalOrderMatrix":
        """Total order of a linear arrangement of all combined indices."""
        seq = tuple(sequence)
        size = n + m
        if sorted(seq) != list(range(1, size + 1)):
            raise ValueError(f"sequence must be a permutation of 1..{size}, got {seq!r}")
        position = {k: p for p, k in enumerate(seq)}
        rows = tuple(
            tuple(1 if i != j and position[i] < position[j] else 0 for j in range(1, size + 1))
            for i in range(1, size + 1)
        )
        return cls(n=n, m=m, rows=rows)


@dataclass(frozen=True)
class Violation:
    """One broken total-order property, naming the offending indices."""

    family: str  # irreflexive | totality | transitivity | dependency
    indices: tuple[int, ...]


@dataclass(frozen=True)
class IlpModel:
    """The binary ordering program of an instance.

    Only the objective and the dependency fixings carry instance data; the
    comparability equalities and transitivity inequalities range over all
    index pairs/triples and are generated on demand.
    """

    n: int
    m: int
    objective: tuple[tuple[tuple[int, int], float], ...]
    fixed: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return self.n + self.m

    @property
    def variable_count(self) -> int:
        return self.size * (self.size - 1)

    def variables(self):
        for i in range(1, self.size + 1):
            for j in range(1, self.size + 1):
                if i != j:
                    yield (i, j)

    def pair_equalities(self):
        for i in range(1, self.size + 1):
            for j in range(i + 1, self.size + 1):
                yield (i, j)

    @property
    def pair_count(self) -> int:
        return self.size * (self.size - 1) // 2

    def triple_inequalities(self):
        for i in range(1, self.size + 1):
            for j in range(1, self.size + 1):
                if j == i:
                    continue
                for k in range(1, self.size + 1):
                    if k != i and k != j:
                        yield (i, j, k)

    @property
    def triple_count(self) -> int:
        return self.size * (self.size - 1) * (self.size - 2)


def dependency_from_instance(instance: ReplacementInstance) -> DependencyRelation:
    """Every flow must precede each retiring UAV it crosses."""
    n = instance.n
    pairs = frozenset(
        (flow.id + 1, n + 1 + j) for flow in instance.flows for j in flow.retired_set
    )
    return DependencyRelation(n=n, m=instance.m, pairs=pairs)


def build_ilp(instance: ReplacementInstance) -> IlpModel:
    """Binary program: minimize sum T_i P_j x_ij over flow-before-UAV pairs."""
    n, m = instance.n, instance.m
    if n + m < 2:
        raise EmptyInstance(f"ordering model needs at least two elements, got n+m = {n + m}")
    times = instance.times
    powers = instance.powers
    objective = tuple(
        ((i + 1, n + 1 + j), times[i] * powers[j]) for i in range(n) for j in range(m)
    )
    fixed = tuple(sorted(dependency_from_instance(instance).pairs))
    return IlpModel(n=n, m=m, objective=objective, fixed=fixed)


def lp_text(model: IlpModel) -> str:
    """Render the model in LP file format, rows in lexicographic index order."""
    lines = ["Minimize", " obj:"]
    first = True
    for (i, j), coeff in model.objective:
        prefix = "   " if first else "   + "
        lines.append(f"{prefix}{coeff!r} x_{i}_{j}")
        first = False
    if first:
        lines.append("   0 x_1_2")
    lines.append("Subject To")
    for i, j in model.fixed:
        lines.append(f" dep_{i}_{j}: x_{i}_{j} = 1")
    for i, j in model.pair_equalities():
        lines.append(f" pair_{i}_{j}: x_{i}_{j} + x_{j}_{i} = 1")
    for i, j, k in model.triple_inequalities():
        lines.append(f" tri_{i}_{j}_{k}: x_{i}_{j} + x_{j}_{k} - x_{i}_{k} <= 1")
    lines.append("Binary")
    for i, j in model.variables():
        lines.append(f" x_{i}_{j}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_lp(model: IlpModel, destination) -> str:
    """Write the LP text to a file and return it."""
    text = lp_text(model)
    try:
        Path(destination).write_text(text, encoding="ascii")
    except OSError as exc:
        raise IoFailure(f"could not write LP file {destination}: {exc}") from exc
    return text


def validate_total_order(x: TotalOrderMatrix, dependency: DependencyRelation) -> list[Violation]:
    """Check all four strict-total-order properties; report every violation."""
    if (x.n, x.m) != (dependency.n, dependency.m):
        raise DimensionMismatch(
            f"matrix is for n={x.n}, m={x.m} but dependency is for n={dependency.n}, m={dependency.m}"
        )
    size = x.size
    rows = x.rows
    violations = []
    for i in range(size):
        if rows[i][i] != 0:
            violations.append(Violation("irreflexive", (i + 1,)))
    for i in range(size):
        for j in range(i + 1, size):
            if rows[i][j] + rows[j][i] != 1:
                violations.append(Violation("totality", (i + 1, j + 1)))
    for i in range(size):
        for j in range(size):
            if j == i:
                continue
            for k in range(size):
                if k == i or k == j:
                    continue
                if rows[i][j] + rows[j][k] > 1 + rows[i][k]:
                    violations.append(Violation("transitivity", (i + 1, j + 1, k + 1)))
    for i, j in sorted(dependency.pairs):
        if rows[i - 1][j - 1] != 1:
            violations.append(Violation("dependency", (i, j)))
    return violations


def order_to_schedule(x: TotalOrderMatrix) -> tuple[Schedule, tuple[int, ...]]:
    """Linearize a total order; return the flow schedule and each UAV's position.

    In a strict total order the successor counts are a permutation of
    0..size-1, so sorting by descending successor count is the unique
    linear extension.
    """
    size = x.size
    succ = [sum(row) for row in x.rows]
    if sorted(succ) != list(range(size)):
        raise InvalidOrder("successor counts are not a permutation; not a strict total order")
    sequence = sorted(range(1, size + 1), key=lambda k: -succ[k - 1])
    order = tuple(k - 1 for k in sequence if k <= x.n)
    positions = [0] * x.m
    for pos, k in enumerate(sequence):
        if k > x.n:
            positions[k - x.n - 1] = pos
    return Schedule(order=order), tuple(positions)


def schedule_to_canonical_order(instance: ReplacementInstance, schedule: Schedule) -> TotalOrderMatrix:
    """Complete a schedule into a total order with minimal cost.

    Each UAV is inserted immediately after the last of its flows (ascending
    UAV id on ties); UAVs pinned by no flow go first.  The resulting order
    is feasible and its objective equals the schedule's energy.
    """
    ensure_valid_schedule(instance, schedule)
    n = instance.n
    position = {f: p for p, f in enumerate(schedule.order)}
    released_after: dict[int, list[int]] = {}
    leading = []
    for j, members in enumerate(instance.flow_sets):
        if not members:
            leading.append(n + 1 + j)
            continue
        last = max(members, key=position.__getitem__)
        released_after.setdefault(last, []).append(n + 1 + j)
    sequence = list(leading)
    for f in schedule.order:
        sequence.append(f + 1)
        sequence.extend(sorted(released_after.get(f, ())))
    return TotalOrderMatrix.from_sequence(n, instance.m, sequence)


def ilp_objective(model: IlpModel, x: TotalOrderMatrix) -> float:
    """Objective value of an assignment: sum of coefficients of set variables."""
    if (model.n, model.m) != (x.n, x.m):
        raise DimensionMismatch(
            f"model is for n={model.n}, m={model.m} but matrix is for n={x.n}, m={x.m}"
        )
    total = 0.0
    for (i, j), coeff in model.objective:
        if x.rows[i - 1][j - 1]:
            total += coeff
    return total
