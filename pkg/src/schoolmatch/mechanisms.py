"""Student-proposing deferred acceptance (with a full step trace), the
efficiency-adjusted rerun loop driven by interrupter removal, top trading
cycles, and trace-derived interrupter / hopeless-student extraction.

All three mechanisms require strict preference profiles and priority
structures; break ties first (:func:`schoolmatch.model.tie_break`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .model import Instance, Matching, UNASSIGNED


@dataclass(frozen=True)
class DaStep:
    """One proposal wave: who proposed where, who is held, who was rejected."""

    proposers: tuple[str, ...]
    proposals: dict[str, tuple[str, ...]]   # school -> new proposers this step
    holds: dict[str, tuple[str, ...]]       # school -> tentative accepts after the step
    rejections: dict[str, tuple[str, ...]]  # school -> students rejected this step


@dataclass(frozen=True)
class DaTrace:
    steps: tuple[DaStep, ...]

    def rejection_events(self) -> list[tuple[int, str, str]]:
        """All (step, school, student) rejection events, 1-based steps."""
        out = []
        for t, step in enumerate(self.steps, start=1):
            for s, rejected in step.rejections.items():
                for i in rejected:
                    out.append((t, s, i))
        return out


@dataclass(frozen=True)
class InterrupterPair:
    student: str
    school: str
    rejection_step: int


def _require_strict(instance: Instance) -> None:
    if not instance.is_strict:
        raise ValueError("mechanism requires a strict instance; run tie_break first")


def sosm(instance: Instance) -> tuple[Matching, DaTrace]:
    """Student-proposing deferred acceptance with multi-seat schools.

    Each step every unengaged student proposes to the best school that has
    not yet rejected her; each school keeps its top up-to-capacity students
    (by priority) among current holds plus new proposers.  Stops when no
    unengaged student has a school left to propose to.
    """
    _require_strict(instance)
    pref_lists = instance.strict_pref_lists
    prio = instance.prio_rank
    capacity = instance.capacity

    pointer = {i: 0 for i in instance.students}   # next list index to propose to
    held_at: dict[str, Optional[str]] = {i: UNASSIGNED for i in instance.students}
    holds: dict[str, list[str]] = {s: [] for s in instance.schools}
    steps: list[DaStep] = []

    while True:
        proposers = tuple(
            i for i in instance.students
            if held_at[i] is UNASSIGNED and pointer[i] < len(pref_lists[i])
        )
        if not proposers:
            break
        proposals: dict[str, list[str]] = {}
        for i in proposers:
            proposals.setdefault(pref_lists[i][pointer[i]], []).append(i)

        step_holds: dict[str, tuple[str, ...]] = {}
        step_rejections: dict[str, tuple[str, ...]] = {}
        for s, newcomers in proposals.items():
            pool = holds[s] + newcomers
            pool.sort(key=prio[s].__getitem__)
            kept, rejected = pool[: capacity[s]], pool[capacity[s]:]
            holds[s] = kept
            for i in newcomers:
                held_at[i] = s
            for i in rejected:
                held_at[i] = UNASSIGNED
                pointer[i] += 1
            step_holds[s] = tuple(kept)
            if rejected:
                step_rejections[s] = tuple(
                    sorted(rejected, key=instance.student_index.__getitem__)
                )
        steps.append(
            DaStep(
                proposers=proposers,
                proposals={s: tuple(v) for s, v in proposals.items()},
                holds=step_holds,
                rejections=step_rejections,
            )
        )

    matching = Matching.of(held_at, instance)
    return matching, DaTrace(tuple(steps))


def interrupters(trace: DaTrace) -> list[InterrupterPair]:
    """All interrupting pairs of a deferred-acceptance trace.

    Student ``i`` interrupts school ``s`` if she tentatively held ``s`` from
    step t, was rejected from it at step t' > t, and some other student was
    rejected from ``s`` at a step in [t, t'-1].
    """
    accepted_at: dict[tuple[str, str], int] = {}
    rejected_at: dict[tuple[str, str], int] = {}
    rejections_by_school: dict[str, list[tuple[int, str]]] = {}
    for t, step in enumerate(trace.steps, start=1):
        for s, newcomers in step.proposals.items():
            held = set(step.holds.get(s, ()))
            for i in newcomers:
                if i in held:
                    accepted_at[(i, s)] = t
        for s, rejected in step.rejections.items():
            for i in rejected:
                rejected_at[(i, s)] = t
                rejections_by_school.setdefault(s, []).append((t, i))

    pairs = []
    for (i, s), t in accepted_at.items():
        t_prime = rejected_at.get((i, s))
        if t_prime is None:
            continue
        if any(
            t <= r < t_prime and j != i
            for r, j in rejections_by_school.get(s, ())
        ):
            pairs.append(InterrupterPair(i, s, t_prime))
    pairs.sort(key=lambda p: p.rejection_step)
    return pairs


def hopeless_students(trace: DaTrace) -> frozenset[str]:
    """Proposers of the final step; none of them can gain from any
    Pareto improvement over the deferred-acceptance outcome.

    The guarantee covers only a final step in which every proposal is
    accepted.  When the run instead ends because a rejected student's
    list is exhausted, the conceptual final step has no proposers and
    the answer is empty.
    """
    if not trace.steps:
        return frozenset()
    last = trace.steps[-1]
    if any(last.rejections.values()):
        return frozenset()
    return frozenset(last.proposers)


@dataclass(frozen=True)
class EadamResult:
    matching: Matching
    removals: tuple[tuple[InterrupterPair, ...], ...]  # per round, pairs removed
    traces: tuple[DaTrace, ...]                        # one DA trace per round

    @property
    def removal_sequence(self) -> tuple[tuple[str, str], ...]:
        return tuple((p.student, p.school) for rnd in self.removals for p in rnd)


def eadam(instance: Instance, consenters: Iterable[str]) -> EadamResult:
    """Iterated deferred acceptance with consenting-interrupter removal.

    Each round reruns DA, finds the last step at which a consenting
    interrupter is rejected from its interrupted school, and removes
    exactly the interrupted school(s) of that step's consenting pairs from
    those students' lists.  Stops when no consenting pair remains.
    """
    _require_strict(instance)
    consent = frozenset(consenters)
    current = instance
    removals: list[tuple[InterrupterPair, ...]] = []
    traces: list[DaTrace] = []
    while True:
        matching, trace = sosm(current)
        traces.append(trace)
        consenting = [p for p in interrupters(trace) if p.student in consent]
        if not consenting:
            return EadamResult(matching, tuple(removals), tuple(traces))
        last_step = max(p.rejection_step for p in consenting)
        doomed = tuple(p for p in consenting if p.rejection_step == last_step)
        removals.append(doomed)
        current = current.replace_prefs(
            {p.student: current.prefs[p.student].without(p.school) for p in doomed}
        )


def ttc(instance: Instance) -> Matching:
    """Top trading cycles with multi-seat schools.

    Each round every unassigned student points to her best school with a
    free seat and every such school points to its highest-priority
    unassigned student; all (vertex-disjoint) cycles are resolved at once.
    """
    _require_strict(instance)
    pref_lists = instance.strict_pref_lists
    prio = instance.prio_rank
    seats = dict(instance.capacity)
    unassigned = list(instance.students)
    assignment: dict[str, Optional[str]] = {i: UNASSIGNED for i in instance.students}

    while unassigned:
        open_schools = {s for s in instance.schools if seats[s] > 0}
        student_pt: dict[str, str] = {}
        for i in unassigned:
            choices = [s for s in pref_lists[i] if s in open_schools]
            if not choices:
                return Matching.of(assignment, instance)
            student_pt[i] = choices[0]
        school_pt = {
            s: min(unassigned, key=prio[s].__getitem__) for s in open_schools
        }

        in_cycle = _functional_cycles(student_pt, school_pt)
        for i in in_cycle:
            s = student_pt[i]
            assignment[i] = s
            seats[s] -= 1
        unassigned = [i for i in unassigned if i not in in_cycle]
    return Matching.of(assignment, instance)


def _functional_cycles(student_pt: dict[str, str], school_pt: dict[str, str]) -> set[str]:
    """Students lying on a cycle of the student->school->student pointer graph."""
    succ = {i: school_pt[s] for i, s in student_pt.items()}
    on_cycle: set[str] = set()
    state: dict[str, int] = {}  # 1 = on current walk, 2 = finished
    for start in student_pt:
        if state.get(start):
            continue
        path = []
        node = start
        while state.get(node) is None:
            state[node] = 1
            path.append(node)
            node = succ[node]
        if state[node] == 1:  # closed a new cycle at `node`
            on_cycle.update(path[path.index(node):])
        for v in path:
            state[v] = 2
    return on_cycle
