"""A conflict-driven clause-learning SAT engine.

Clauses use DIMACS literals at the API boundary. Internally variable ``v``
(1-based) maps to literals ``2v`` (positive) and ``2v + 1`` (negative), so
negation is ``lit ^ 1``. Binary clauses live in dedicated implication
lists; longer clauses use two watched literals.
"""

from __future__ import annotations

import heapq
import time
from typing import Iterable, Sequence

TRUE, FALSE, UNSET = 1, -1, 0


class SolverTimeout(Exception):
    """The deadline passed before the search finished."""


def _luby(i: int) -> int:
    """i-th element (0-based) of the Luby restart sequence 1,1,2,1,1,2,4,..."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class CDCLSolver:
    restart_unit = 100
    var_decay = 0.95

    def __init__(self, n_vars: int = 0):
        self.n_vars = 0
        self.val: list[int] = [UNSET, UNSET]
        self.level: list[int] = [0]
        self.reason: list = [None]
        self.activity: list[float] = [0.0]
        self.polarity: list[int] = [1]  # 1 means "negative" phase
        self.seen: list[int] = [0]
        self.watches: list[list] = [[], []]
        self.bins: list[list] = [[], []]
        self.clauses: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.lbd: dict[int, int] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.heap_key: list[float | None] = [None]  # activity of the var's live heap entry
        self.var_inc = 1.0
        self.ok = True
        self.max_learnts = 2000
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self._model: list[bool] | None = None
        self.ensure_vars(n_vars)

    # setup ----------------------------------------------------------------
    def ensure_vars(self, n: int) -> None:
        while self.n_vars < n:
            self.n_vars += 1
            self.val += [UNSET, UNSET]
            self.level.append(0)
            self.reason.append(None)
            self.activity.append(0.0)
            self.polarity.append(1)
            self.seen.append(0)
            self.watches += [[], []]
            self.bins += [[], []]
            self.heap_key.append(0.0)
            heapq.heappush(self.heap, (0.0, self.n_vars))

    @staticmethod
    def _lit(d: int) -> int:
        return 2 * d if d > 0 else -2 * d + 1

    def add_clause(self, clause: Iterable[int]) -> bool:
        """Add a DIMACS clause; returns False once the formula is known UNSAT."""
        if not self.ok:
            return False
        if self.trail_lim:
            self._backtrack(0)
        lits = set()
        for d in clause:
            if d == 0:
                raise ValueError("literal 0 is not allowed")
            v = abs(d)
            if v > self.n_vars:
                self.ensure_vars(v)
            lits.add(self._lit(d))
        val = self.val
        out = []
        for lit in lits:
            if lit ^ 1 in lits or val[lit] == TRUE:
                return True
            if val[lit] == UNSET:
                out.append(lit)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self._assign(out[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self._attach(out)
        self.clauses.append(out)
        return True

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> bool:
        for c in clauses:
            if not self.add_clause(c):
                return False
        return True

    def _attach(self, c: list[int]) -> None:
        if len(c) == 2:
            self.bins[c[0]].append((c[1], c))
            self.bins[c[1]].append((c[0], c))
        else:
            self.watches[c[0]].append(c)
            self.watches[c[1]].append(c)

    # trail ----------------------------------------------------------------
    def _assign(self, lit: int, reason) -> None:
        v = lit >> 1
        self.val[lit] = TRUE
        self.val[lit ^ 1] = FALSE
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        stop = self.trail_lim[lvl]
        val, polarity, reason, activity, heap = self.val, self.polarity, self.reason, self.activity, self.heap
        key = self.heap_key
        trail = self.trail
        for i in range(len(trail) - 1, stop - 1, -1):
            lit = trail[i]
            v = lit >> 1
            val[lit] = UNSET
            val[lit ^ 1] = UNSET
            polarity[v] = lit & 1
            reason[v] = None
            if key[v] != activity[v]:
                key[v] = activity[v]
                heapq.heappush(heap, (-activity[v], v))
        del trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(trail)

    def _propagate(self):
        """Unit propagation; returns a conflicting clause or None."""
        val, bins, watches, trail = self.val, self.bins, self.watches, self.trail
        level, reason = self.level, self.reason
        cur_level = len(self.trail_lim)
        qhead = self.qhead
        conflict = None
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            false_lit = p ^ 1
            for other, cl in bins[false_lit]:
                s = val[other]
                if s == TRUE:
                    continue
                if s == FALSE:
                    conflict = cl
                    break
                val[other] = TRUE
                val[other ^ 1] = FALSE
                v = other >> 1
                level[v] = cur_level
                reason[v] = cl
                trail.append(other)
            if conflict is not None:
                break
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == TRUE:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != FALSE:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == FALSE:
                        conflict = c
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        break
                    val[first] = TRUE
                    val[first ^ 1] = FALSE
                    v = first >> 1
                    level[v] = cur_level
                    reason[v] = c
                    trail.append(first)
            del ws[j:]
            if conflict is not None:
                break
        self.propagations += qhead - self.qhead
        self.qhead = qhead if conflict is None else len(trail)
        return conflict

    # learning -------------------------------------------------------------
    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.n_vars + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[i], i) for i in range(1, self.n_vars + 1) if self.val[2 * i] == UNSET]
            heapq.heapify(self.heap)
            self.heap_key = [None] + [act[i] if self.val[2 * i] == UNSET else None
                                      for i in range(1, self.n_vars + 1)]
        elif self.val[2 * v] == UNSET:
            self.heap_key[v] = act[v]
            heapq.heappush(self.heap, (-act[v], v))

    def _analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        cur = len(self.trail_lim)
        learnt = [0]
        counter = 0
        p = None
        idx = len(trail) - 1
        clause = conflict
        touched = []
        while True:
            for q in clause:
                if q == p:
                    continue
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    touched.append(v)
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                break
            clause = reason[p >> 1]
        learnt[0] = p ^ 1
        # drop literals whose reasons are (transitively) covered by the clause
        levels = {level[q >> 1] for q in learnt[1:]}
        kept = [learnt[0]] + [q for q in learnt[1:] if not self._redundant(q, levels, touched)]
        for v in touched:
            seen[v] = 0
        if len(kept) == 1:
            return kept, 0
        best = 1
        for i in range(2, len(kept)):
            if level[kept[i] >> 1] > level[kept[best] >> 1]:
                best = i
        kept[1], kept[best] = kept[best], kept[1]
        return kept, level[kept[1] >> 1]

    def _redundant(self, q: int, levels: set[int], touched: list[int]) -> bool:
        """True when ``q`` follows from literals already marked ``seen``.

        Successful checks mark their intermediate variables as seen too, so
        later checks reuse them; ``touched`` collects everything to reset.
        """
        seen, level, reason = self.seen, self.level, self.reason
        if reason[q >> 1] is None:
            return False
        stack, added = [q], []
        while stack:
            r = reason[stack.pop() >> 1]
            for x in r[1:] if len(r) > 2 else r:
                xv = x >> 1
                if seen[xv] or level[xv] == 0 or xv == q >> 1:
                    continue
                if reason[xv] is None or level[xv] not in levels:
                    for v in added:
                        seen[v] = 0
                    return False
                seen[xv] = 1
                added.append(xv)
                stack.append(x)
        touched.extend(added)
        return True

    def _reduce_db(self) -> None:
        """Forget the worse half of learnt clauses; called at decision level 0."""
        locked = {id(self.reason[lit >> 1]) for lit in self.trail if self.reason[lit >> 1] is not None}
        lbd = self.lbd
        self.learnts.sort(key=lambda c: lbd.get(id(c), 0))
        keep_n = len(self.learnts) // 2
        kept = []
        for i, c in enumerate(self.learnts):
            if i < keep_n or lbd.get(id(c), 0) <= 2 or id(c) in locked:
                kept.append(c)
            else:
                lbd.pop(id(c), None)
        self.learnts = kept
        for w in self.watches:
            w.clear()
        for b in self.bins:
            b.clear()
        for c in self.clauses:
            self._attach(c)
        for c in self.learnts:
            self._attach(c)

    # search ---------------------------------------------------------------
    def _pick_branch(self) -> int:
        heap, val, act, key = self.heap, self.val, self.activity, self.heap_key
        while heap:
            a, v = heapq.heappop(heap)
            if -a != key[v]:
                continue  # superseded entry
            key[v] = None
            if val[2 * v] == UNSET:
                return 2 * v + self.polarity[v]
        for v in range(1, self.n_vars + 1):
            if val[2 * v] == UNSET:
                return 2 * v + self.polarity[v]
        return -1

    def solve(self, time_limit: float | None = None, deadline: float | None = None) -> bool:
        """Return True for SAT (model via :meth:`model`), False for UNSAT."""
        if time_limit is not None:
            limit = time.monotonic() + time_limit
            deadline = limit if deadline is None else min(deadline, limit)
        self._model = None
        if not self.ok:
            return False
        self._backtrack(0)
        if self._propagate() is not None:
            self.ok = False
            return False
        restarts = 0
        budget = _luby(0) * self.restart_unit
        since_restart = 0
        checks = 0
        while True:
            conflict = self._propagate()
            if conflict is not None:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(conflict)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    self._attach(learnt)
                    self.learnts.append(learnt)
                    self.lbd[id(learnt)] = len({self.level[x >> 1] for x in learnt})
                    self._assign(learnt[0], learnt)
                self.var_inc /= self.var_decay
                if deadline is not None and self.conflicts % 64 == 0 and time.monotonic() > deadline:
                    self._backtrack(0)
                    raise SolverTimeout()
                continue
            if since_restart >= budget:
                restarts += 1
                since_restart = 0
                budget = _luby(restarts) * self.restart_unit
                self._backtrack(0)
                if len(self.learnts) > self.max_learnts + len(self.trail):
                    self._reduce_db()
                    self.max_learnts = int(self.max_learnts * 1.1)
                continue
            lit = self._pick_branch()
            if lit < 0:
                self._model = [False] + [self.val[2 * v] == TRUE for v in range(1, self.n_vars + 1)]
                self._backtrack(0)
                return True
            self.decisions += 1
            checks += 1
            if deadline is not None and checks % 256 == 0 and time.monotonic() > deadline:
                self._backtrack(0)
                raise SolverTimeout()
            self.trail_lim.append(len(self.trail))
            self._assign(lit, None)

    def model(self) -> list[bool]:
        """``model()[v]`` is the value of variable ``v`` (index 0 unused)."""
        if self._model is None:
            raise RuntimeError("no model available")
        return self._model


def solve_clauses(clauses: Iterable[Sequence[int]], n_vars: int = 0, time_limit: float | None = None):
    """One-shot helper: returns a model list or None when UNSAT."""
    s = CDCLSolver(n_vars)
    if not s.add_clauses(clauses):
        return None
    return s.model() if s.solve(time_limit=time_limit) else None
