"""Evaluative predicates and metrics over matchings: the preference
reverence index, priority violations, stability, Pareto domination and
efficiency, and reasonable fairness."""

from __future__ import annotations

from dataclasses import dataclass

from . import oracle
from .errors import InstanceTooLargeError
from .model import Instance, Matching, UNASSIGNED, rank


@dataclass(frozen=True)
class ViolationRecord:
    """Student ``violator`` holds a seat at ``school`` that ``victim``
    both prefers to her own assignment and has higher priority for."""

    violator: str
    victim: str
    school: str


def preference_index(instance: Instance, matching: Matching) -> int:
    """Sum over students of (rank of assigned school - 1); lower is better."""
    return sum(
        rank(instance.prefs[i], matching[i]) - 1 for i in instance.students
    )


def priority_violations(instance: Instance, matching: Matching) -> list[ViolationRecord]:
    records = []
    pref_rank = instance.pref_rank
    prio_rank = instance.prio_rank
    for s in instance.schools:
        holders = matching.students_at(s)
        if not holders:
            continue
        for victim in instance.students:
            assigned = matching[victim]
            if assigned == s:
                continue
            own = (
                pref_rank[victim][assigned]
                if assigned is not UNASSIGNED
                else len(instance.prefs[victim].classes) + 1
            )
            if pref_rank[victim][s] >= own:
                continue
            for violator in holders:
                if prio_rank[s][victim] < prio_rank[s][violator]:
                    records.append(ViolationRecord(violator, victim, s))
    records.sort(
        key=lambda r: (
            instance.school_index[r.school],
            instance.student_index[r.victim],
            instance.student_index[r.violator],
        )
    )
    return records


def is_stable(instance: Instance, matching: Matching) -> bool:
    """No priority violation and no student below a school with a free seat."""
    if priority_violations(instance, matching):
        return False
    fill = matching.fill_counts()
    pref_rank = instance.pref_rank
    for i in instance.students:
        assigned = matching[i]
        own = (
            pref_rank[i][assigned]
            if assigned is not UNASSIGNED
            else len(instance.prefs[i].classes) + 1
        )
        for s in instance.schools:
            if fill.get(s, 0) < instance.capacity[s] and pref_rank[i][s] < own:
                return False
    return True


def dominates(instance: Instance, a: Matching, b: Matching) -> bool:
    """True iff ``a`` weakly improves every student over ``b`` and strictly
    improves at least one (ranks taken in each student's own profile)."""
    strict = False
    for i in instance.students:
        profile = instance.prefs[i]
        ra, rb = rank(profile, a[i]), rank(profile, b[i])
        if ra > rb:
            return False
        if ra < rb:
            strict = True
    return strict


def is_efficient(
    instance: Instance,
    matching: Matching,
    bound: oracle.OracleBound = oracle.OracleBound(),
) -> bool:
    """True iff no valid matching dominates ``matching``.

    Uses the exhaustive oracle when the instance is within bound; otherwise
    falls back to the acyclicity test on the matching's trading graph, which
    is valid when the matching weakly dominates the deferred-acceptance
    baseline and nobody strictly prefers a school with a free seat.
    """
    try:
        oracle.check_bound(instance, bound)
    except InstanceTooLargeError:
        return _is_efficient_by_graph(instance, matching)
    return not any(
        dominates(instance, other, matching)
        for other in oracle.enumerate_matchings(instance, bound)
    )


def _is_efficient_by_graph(instance: Instance, matching: Matching) -> bool:
    from . import trading  # local import; trading depends on analysis
    from .mechanisms import sosm
    from .model import tie_break

    fill = matching.fill_counts()
    pref_rank = instance.pref_rank
    for i in instance.students:
        assigned = matching[i]
        own = (
            pref_rank[i][assigned]
            if assigned is not UNASSIGNED
            else len(instance.prefs[i].classes) + 1
        )
        for s in instance.schools:
            if fill.get(s, 0) < instance.capacity[s] and pref_rank[i][s] < own:
                raise InstanceTooLargeError(
                    "instance beyond oracle bound and matching leaves a "
                    "preferred seat vacant; no efficiency route applies"
                )
    baseline, _ = sosm(instance if instance.is_strict else tie_break(instance, 0))
    if matching != baseline and not dominates(instance, matching, baseline):
        raise InstanceTooLargeError(
            "instance beyond oracle bound and matching does not dominate "
            "the deferred-acceptance baseline"
        )
    graph = trading.build_graph(instance, matching)
    return not trading.has_trading_clique(graph)


def is_reasonably_fair(
    instance: Instance,
    matching: Matching,
    bound: oracle.OracleBound = oracle.OracleBound(),
) -> bool:
    """True iff no stable matching gives any student a strictly better seat."""
    for stable in oracle.stable_set(instance, bound):
        for i in instance.students:
            profile = instance.prefs[i]
            if rank(profile, stable[i]) < rank(profile, matching[i]):
                return False
    return True
