"""
Exact 0-1 Solvers

Purpose:
    Minimize a BipModel objective over binary assignments.

Capabilities:
    - solve_exhaustive: vectorized enumeration oracle (at most 25 free variables)
    - solve_bb: best-first branch-and-bound with bound propagation, optionally
      splitting the tree across worker processes
    - check_feasible: list the constraints an assignment violates

Both solvers treat objectives within 1e-9 as equal and then return the
lexicographically smallest assignment in variable index order.

Usage:
    >>> solution = solve_bb(model, SolverConfig(time_limit_s=60))
    >>> solution.status, solution.objective_value
"""

from __future__ import annotations

import heapq
import logging
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from facreg.core.config import SolverConfig
from facreg.errors import TooLarge
from facreg.models.bip import (
    BipModel,
    FeasibilityReport,
    Relation,
    Solution,
    SolveStats,
    SolveStatus,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE_CAP = 25
CHUNK = 1 << 16
TIE_TOL = 1e-9
FREE = 2


# ============ Compiled problem ============


@dataclass
class _Problem:
    """
    Model restricted to its free variables.

    Every constraint becomes one or two rows sum(coef * x) <= rhs over local
    indices 0..n-1 (free variables in index order), with fixed variables
    folded into rhs.
    """
    num_vars: int
    free: List[int]
    template: List[int]
    cost: List[float]
    const_cost: float
    rows: List[Tuple[List[int], List[int], int]] = field(default_factory=list)
    var_rows: List[List[int]] = field(default_factory=list)
    groups: List[List[int]] = field(default_factory=list)
    in_group: List[bool] = field(default_factory=list)
    branch_order: List[int] = field(default_factory=list)
    infeasible: bool = False

    @property
    def size(self) -> int:
        return len(self.free)

    def full_assignment(self, state: bytes) -> Tuple[int, ...]:
        values = list(self.template)
        for k, var in enumerate(self.free):
            values[var] = state[k]
        return tuple(values)


def _compile(model: BipModel) -> _Problem:
    free = model.free_vars()
    local = {var: k for k, var in enumerate(free)}
    template = [model.fixed_assignments.get(i, 0) for i in range(model.num_vars)]

    coefs = model.objective_coefficients()
    cost = [coefs[var] for var in free]
    const_cost = float(sum(coefs[i] * v for i, v in model.fixed_assignments.items()))

    problem = _Problem(model.num_vars, free, template, cost, const_cost)
    problem.var_rows = [[] for _ in free]
    claimed = [False] * len(free)

    def add_row(idx: List[int], co: List[int], rhs: int) -> None:
        if not idx:
            if rhs < 0:
                problem.infeasible = True
            return
        r = len(problem.rows)
        problem.rows.append((idx, co, rhs))
        for k in idx:
            problem.var_rows[k].append(r)

    for constraint in model.constraints:
        merged: Dict[int, int] = {}
        rhs = constraint.rhs
        for c, v in constraint.terms:
            fixed = model.fixed_assignments.get(v.index)
            if fixed is not None:
                rhs -= c * fixed
            else:
                k = local[v.index]
                merged[k] = merged.get(k, 0) + c
        idx = [k for k in sorted(merged) if merged[k] != 0]
        co = [merged[k] for k in idx]

        if constraint.relation in (Relation.LE, Relation.EQ):
            add_row(idx, co, rhs)
        if constraint.relation in (Relation.GE, Relation.EQ):
            add_row(idx, [-c for c in co], -rhs)

        # exactly-one groups over disjoint variables
        if (
            constraint.relation == Relation.EQ
            and rhs == 1
            and idx
            and all(c == 1 for c in co)
            and not any(claimed[k] for k in idx)
        ):
            problem.groups.append(idx)
            for k in idx:
                claimed[k] = True

    problem.in_group = claimed
    problem.branch_order = sorted(range(len(free)), key=lambda k: (-abs(cost[k]), k))
    return problem


# ============ Node operations ============


def _propagate(problem: _Problem, state: bytearray, rows: Optional[List[int]] = None) -> bool:
    """Force variables whose other value would violate a row; False on conflict"""
    queue = deque(range(len(problem.rows)) if rows is None else rows)
    queued = set(queue)
    while queue:
        r = queue.popleft()
        queued.discard(r)
        idx, co, rhs = problem.rows[r]

        minact = 0
        for k, c in zip(idx, co):
            s = state[k]
            if s == FREE:
                if c < 0:
                    minact += c
            elif s:
                minact += c
        if minact > rhs:
            return False

        slack = rhs - minact
        for k, c in zip(idx, co):
            if state[k] == FREE and abs(c) > slack:
                state[k] = 0 if c > 0 else 1
                for r2 in problem.var_rows[k]:
                    if r2 not in queued:
                        queued.add(r2)
                        queue.append(r2)
    return True


def _bound(problem: _Problem, state: bytearray) -> float:
    total = problem.const_cost
    cost = problem.cost
    for k, s in enumerate(state):
        if s == 1:
            total += cost[k]
        elif s == FREE and not problem.in_group[k] and cost[k] < 0:
            total += cost[k]
    for group in problem.groups:
        if any(state[k] == 1 for k in group):
            continue
        free_costs = [cost[k] for k in group if state[k] == FREE]
        if not free_costs:
            return float("inf")
        total += min(free_costs)
    return total


def _value(problem: _Problem, state: bytes) -> float:
    return problem.const_cost + sum(c for c, s in zip(problem.cost, state) if s == 1)


def _branch_var(problem: _Problem, state: bytearray) -> Optional[int]:
    for k in problem.branch_order:
        if state[k] == FREE:
            return k
    return None


def _children(problem: _Problem, state: bytearray) -> List[Tuple[bytearray, int]]:
    """Propagated, conflict-free children in branching order"""
    k = _branch_var(problem, state)
    assert k is not None
    values = (1, 0) if problem.cost[k] < 0 else (0, 1)
    out = []
    for value in values:
        child = bytearray(state)
        child[k] = value
        if _propagate(problem, child, problem.var_rows[k]):
            out.append((child, k))
    return out


def _is_leaf(state: bytearray) -> bool:
    return FREE not in state


@dataclass
class _Incumbent:
    value: float = float("inf")
    state: Optional[bytes] = None
    history: List[float] = field(default_factory=list)

    def offer(self, value: float, state: bytes) -> None:
        if self.state is None or value < self.value - TIE_TOL:
            self.value = value
            self.state = bytes(state)
            self.history.append(value)
            logger.debug("New incumbent %.9g", value)
        elif value <= self.value + TIE_TOL and bytes(state) < self.state:
            self.state = bytes(state)
            if value < self.value:
                self.value = value
                self.history.append(value)

    def beats(self, bound: float) -> bool:
        return self.state is not None and bound > self.value + TIE_TOL


@dataclass
class _SearchResult:
    value: float
    state: Optional[bytes]
    nodes: int
    history: List[float]
    timed_out: bool


def _dive(problem: _Problem, state: bytearray, incumbent: _Incumbent) -> None:
    # greedy descent for an early incumbent
    current = state
    while not _is_leaf(current):
        children = _children(problem, current)
        if not children:
            return
        current = children[0][0]
    incumbent.offer(_value(problem, current), bytes(current))


def _search(
    problem: _Problem,
    roots: List[bytes],
    deadline: float,
    depth0: int = 0,
) -> _SearchResult:
    incumbent = _Incumbent()
    heap: List[Tuple[float, int, int, bytes]] = []
    counter = 0

    for root in roots:
        state = bytearray(root)
        if _is_leaf(state):
            incumbent.offer(_value(problem, state), bytes(state))
            continue
        _dive(problem, state, incumbent)
        heapq.heappush(heap, (_bound(problem, state), -depth0, counter, bytes(state)))
        counter += 1

    nodes = 0
    timed_out = False
    while heap:
        bound, neg_depth, _, raw = heapq.heappop(heap)
        if incumbent.beats(bound):
            continue
        if nodes % 64 == 0 and time.time() > deadline:
            timed_out = True
            break
        nodes += 1
        if nodes % 1000 == 0:
            logger.debug(
                "B&B node %d: open=%d bound=%.6g incumbent=%.6g",
                nodes, len(heap), bound, incumbent.value,
            )

        for child, _ in _children(problem, bytearray(raw)):
            if _is_leaf(child):
                incumbent.offer(_value(problem, child), bytes(child))
                continue
            child_bound = _bound(problem, child)
            if incumbent.beats(child_bound):
                continue
            heapq.heappush(heap, (child_bound, neg_depth - 1, counter, bytes(child)))
            counter += 1

    return _SearchResult(incumbent.value, incumbent.state, nodes, incumbent.history, timed_out)


def _search_subtree(problem: _Problem, root: bytes, depth: int, deadline: float) -> _SearchResult:
    # deadline is absolute wall-clock time shared by every worker
    return _search(problem, [root], deadline, depth)


def _frontier(
    problem: _Problem, root: bytearray, target: int
) -> Tuple[List[Tuple[bytes, int]], List[bytes]]:
    """Breadth expansion into at least `target` disjoint open subtrees"""
    open_nodes: deque = deque([(bytes(root), 0)])
    leaves: List[bytes] = []
    while open_nodes and len(open_nodes) < target:
        raw, depth = open_nodes.popleft()
        for child, _ in _children(problem, bytearray(raw)):
            if _is_leaf(child):
                leaves.append(bytes(child))
            else:
                open_nodes.append((bytes(child), depth + 1))
    return list(open_nodes), leaves


# ============ Independent blocks ============


@dataclass
class _Block:
    """Free variables (problem indices, ascending) of one connected component"""
    members: List[int]
    problem: _Problem


def _blocks(problem: _Problem, root: bytearray) -> List[_Block]:
    """
    Split the variables left free at the root into groups that share no row.

    Each block becomes its own problem over local indices in the original
    order, with root-fixed values folded into rhs and a zero constant cost.
    """
    live = [k for k, s in enumerate(root) if s == FREE]
    position = {k: n for n, k in enumerate(live)}
    heads: List[int] = []
    tails: List[int] = []
    for idx, _, _ in problem.rows:
        row_live = [position[k] for k in idx if root[k] == FREE]
        heads.extend(row_live[:-1])
        tails.extend(row_live[1:])
    graph = csr_matrix(
        (np.ones(len(heads)), (heads, tails)), shape=(len(live), len(live))
    )
    _, labels = connected_components(graph, directed=False)

    members: Dict[int, List[int]] = {}
    for n, k in enumerate(live):
        members.setdefault(int(labels[n]), []).append(k)
    ordered = sorted(members.values(), key=lambda m: m[0])
    return [_Block(m, _sub_problem(problem, root, m)) for m in ordered]


def _sub_problem(problem: _Problem, root: bytearray, members: List[int]) -> _Problem:
    local = {k: n for n, k in enumerate(members)}
    sub = _Problem(
        num_vars=problem.num_vars,
        free=[problem.free[k] for k in members],
        template=problem.template,
        cost=[problem.cost[k] for k in members],
        const_cost=0.0,
    )
    sub.var_rows = [[] for _ in members]

    seen = set()
    for k in members:
        for r in problem.var_rows[k]:
            if r in seen:
                continue
            seen.add(r)
            idx, co, rhs = problem.rows[r]
            sub_idx, sub_co = [], []
            for j, c in zip(idx, co):
                if root[j] == FREE:
                    sub_idx.append(local[j])
                    sub_co.append(c)
                elif root[j]:
                    rhs -= c
            row = len(sub.rows)
            sub.rows.append((sub_idx, sub_co, rhs))
            for j in sub_idx:
                sub.var_rows[j].append(row)

    sub.in_group = [False] * len(members)
    for group in problem.groups:
        if not any(k in local for k in group) or any(root[k] == 1 for k in group):
            continue
        sub_group = [local[k] for k in group if root[k] == FREE]
        sub.groups.append(sub_group)
        for j in sub_group:
            sub.in_group[j] = True

    sub.branch_order = [local[k] for k in problem.branch_order if k in local]
    return sub


def _combine(
    problem: _Problem,
    root: bytearray,
    blocks: List[_Block],
    results: List[_SearchResult],
) -> _SearchResult:
    """Join per-block results into one result over the whole problem"""
    nodes = sum(r.nodes for r in results)
    timed_out = any(r.timed_out for r in results)
    if any(r.state is None for r in results):
        return _SearchResult(float("inf"), None, nodes, [], timed_out)

    state = bytearray(root)
    for block, result in zip(blocks, results):
        assert result.state is not None
        for n, k in enumerate(block.members):
            state[k] = result.state[n]

    # cumulative incumbent: first incumbent of every block, then each improvement
    total = _value(problem, root) + sum(r.history[0] for r in results if r.history)
    history = [total]
    for result in results:
        for previous, value in zip(result.history, result.history[1:]):
            total += value - previous
            history.append(total)
    return _SearchResult(_value(problem, bytes(state)), bytes(state), nodes, history, timed_out)


# ============ Public API ============


def _finish(
    model: BipModel,
    problem: _Problem,
    result: _SearchResult,
    started: float,
) -> Solution:
    stats = SolveStats(
        nodes=result.nodes,
        wall_time=time.monotonic() - started,
        free_vars=problem.size,
        incumbent_history=list(result.history),
    )
    if result.state is None:
        status = SolveStatus.TIMED_OUT if result.timed_out else SolveStatus.INFEASIBLE
        return Solution(None, float("inf"), status, stats)

    assignment = problem.full_assignment(result.state)
    status = SolveStatus.TIMED_OUT if result.timed_out else SolveStatus.OPTIMAL
    return Solution(assignment, model.evaluate_objective(assignment), status, stats)


def solve_bb(model: BipModel, config: Optional[SolverConfig] = None) -> Solution:
    """
    Solve a model exactly with best-first branch-and-bound.

    Node bound: cost of variables fixed to 1, plus the cheapest remaining
    member of every exactly-one group, plus every negative cost among the
    other free variables. Nodes are expanded by (bound, deeper first,
    creation order); the branching variable is the free one with the largest
    absolute cost, trying 1 first when its cost is negative.

    Variables left free after root propagation are split into blocks that
    share no constraint, and each block is searched on its own. The time
    limit is one absolute deadline for the whole solve.

    Args:
        model: Model to solve; not modified
        config: Time limit and worker count (defaults: 300 s, 1 worker)

    Returns:
        Solution with status OPTIMAL, INFEASIBLE or TIMED_OUT (best incumbent,
        possibly none)
    """
    config = config or SolverConfig()
    started = time.monotonic()
    deadline = time.time() + config.time_limit_s
    problem = _compile(model)

    root = bytearray([FREE] * problem.size)
    if problem.infeasible or not _propagate(problem, root):
        logger.info("Model %s is infeasible at the root", model.name)
        return _finish(model, problem, _SearchResult(float("inf"), None, 0, [], False), started)

    if _is_leaf(root):
        result = _SearchResult(_value(problem, root), bytes(root), 0, [_value(problem, root)], False)
    else:
        blocks = _blocks(problem, root)
        logger.debug("Model %s splits into %d independent blocks", model.name, len(blocks))
        if config.workers > 1:
            results = _solve_parallel(blocks, config.workers, deadline)
        else:
            results = [
                _search(b.problem, [bytes([FREE] * b.problem.size)], deadline) for b in blocks
            ]
        result = _combine(problem, root, blocks, results)

    solution = _finish(model, problem, result, started)
    if solution.status == SolveStatus.TIMED_OUT:
        logger.warning(
            "Time limit of %.1fs reached after %d nodes; returning incumbent",
            config.time_limit_s, solution.stats.nodes,
        )
    logger.info(
        "B&B %s: status=%s objective=%.9g nodes=%d free=%d time=%.3fs",
        model.name, solution.status.value, solution.objective_value,
        solution.stats.nodes, problem.size, solution.stats.wall_time,
    )
    return solution


def _solve_parallel(
    blocks: List[_Block], workers: int, deadline: float
) -> List[_SearchResult]:
    """Search the frontier subtrees of every block in one pool, merged per block"""
    incumbents = [_Incumbent() for _ in blocks]
    frontiers = []
    for block, incumbent in zip(blocks, incumbents):
        root = bytearray([FREE] * block.problem.size)
        subtrees, leaves = _frontier(block.problem, root, 2 * workers)
        for leaf in leaves:
            incumbent.offer(_value(block.problem, leaf), leaf)
        frontiers.append(subtrees)

    nodes = [0] * len(blocks)
    timed_out = [False] * len(blocks)
    jobs = [(b, raw, depth) for b, subtrees in enumerate(frontiers) for raw, depth in subtrees]
    if jobs:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                (b, pool.submit(_search_subtree, blocks[b].problem, raw, depth, deadline))
                for b, raw, depth in jobs
            ]
            for b, future in futures:
                r = future.result()
                nodes[b] += r.nodes
                timed_out[b] = timed_out[b] or r.timed_out
                if r.state is not None:
                    incumbents[b].offer(r.value, r.state)

    logger.debug("Merged %d subtrees of %d blocks from %d workers", len(jobs), len(blocks), workers)
    return [
        _SearchResult(inc.value, inc.state, nodes[b], inc.history, timed_out[b])
        for b, inc in enumerate(incumbents)
    ]


def _dense_rows(problem: _Problem) -> Tuple[np.ndarray, np.ndarray]:
    a = np.zeros((len(problem.rows), problem.size))
    b = np.zeros(len(problem.rows))
    for r, (idx, co, rhs) in enumerate(problem.rows):
        a[r, idx] = co
        b[r] = rhs
    return a, b


def solve_exhaustive(model: BipModel) -> Solution:
    """
    Enumerate every assignment of the free variables.

    Raises:
        TooLarge: If the model has more than 25 free variables
    """
    started = time.monotonic()
    problem = _compile(model)
    k = problem.size
    if k > EXHAUSTIVE_CAP:
        raise TooLarge(f"{k} free variables exceed the exhaustive cap of {EXHAUSTIVE_CAP}")

    if problem.infeasible:
        return _finish(model, problem, _SearchResult(float("inf"), None, 0, [], False), started)

    a, b = _dense_rows(problem)
    cost = np.asarray(problem.cost, dtype=float)
    # first free variable is the most significant bit: code order = lex order
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)

    best_value = float("inf")
    best_code: Optional[int] = None
    total = 1 << k
    for start in range(0, total, CHUNK):
        codes = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        x = ((codes[:, None] >> shifts) & 1).astype(float)
        feasible = np.all(x @ a.T <= b + 0.5, axis=1) if a.shape[0] else np.ones(len(codes), bool)
        if not feasible.any():
            continue
        values = x[feasible] @ cost + problem.const_cost
        chunk_min = float(values.min())
        first = int(np.flatnonzero(values <= chunk_min + TIE_TOL)[0])
        if best_code is None or chunk_min < best_value - TIE_TOL:
            best_value = chunk_min
            best_code = int(codes[feasible][first])

    if best_code is None:
        result = _SearchResult(float("inf"), None, 1 << k, [], False)
    else:
        state = bytes(int(bit) for bit in ((best_code >> shifts) & 1)) if k else b""
        result = _SearchResult(best_value, state, 1 << k, [best_value], False)
    return _finish(model, problem, result, started)


def check_feasible(model: BipModel, assignment: Any) -> FeasibilityReport:
    """
    Check a total assignment against every constraint.

    Raises:
        PartialAssignment: If some variable has no value
    """
    values = model.complete(assignment)
    violated = [i for i, c in enumerate(model.constraints) if not c.holds(values)]
    return FeasibilityReport(feasible=not violated, violated=violated)
