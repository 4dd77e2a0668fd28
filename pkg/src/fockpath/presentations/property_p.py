"""Seeded falsifier for the non-nilpotency half of property (P).

For combinations ``A = sum a_i L_{w_i}`` of equal-level words, every ``mu``
up to ``path_bound`` is tried and ``L_mu A`` classified as

* ``exactly_nilpotent``: some power vanishes in the path algebra itself,
  which no truncation can cause;
* ``non_nilpotent_stationary``: the level-to-level blocks of ``L_mu A`` settle
  into one repeated square block whose trace-power signature is nonzero;
* ``nilpotent_up_to_truncation``: the repeated block is nilpotent, but no
  power vanishes exactly;
* ``undetermined``: the blocks never settle within the truncation.

A combination whose every ``L_mu A`` is exactly nilpotent is a candidate
violation.  The search never concludes that the property holds.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from ..model import DirectedGraph, Path
from ..reports import CheckReport
from .category import CategoryPresentation
from .kgraph import KGraphSkeleton
from .structure import PathStructure, certify

TRACE_TOL = 1e-9


def _fmt(c: complex) -> list[float]:
    return [round(float(c.real), 12) + 0.0, round(float(c.imag), 12) + 0.0]


def classify(basis, structure: PathStructure, element: dict, max_power: int) -> dict:
    from ..fock import element_operator, multiply_elements, stationary_block, trace_power_signature

    if not element:
        return {"status": "exactly_nilpotent", "index": 1}
    limit = structure.certified_length
    power = element
    for n in range(2, max_power + 1):
        power = multiply_elements(structure, power, element)
        if not power:
            return {"status": "exactly_nilpotent", "index": n}
        if limit is not None and min(structure.level(w) for w in power) > limit:
            break
    shift = structure.level(next(iter(element)))
    block = stationary_block(basis, element_operator(basis, element), shift)
    if block.block is None:
        return {"status": "undetermined"}
    signature = trace_power_signature(block.block)
    if any(abs(t) > TRACE_TOL for t in signature):
        return {
            "status": "non_nilpotent_stationary",
            "from_level": block.start_level,
            "trace_signature": [_fmt(t) for t in signature],
        }
    return {"status": "nilpotent_up_to_truncation", "from_level": block.start_level}


def _as_structure(pres) -> PathStructure:
    if isinstance(pres, PathStructure):
        return pres
    if isinstance(pres, (DirectedGraph, KGraphSkeleton, CategoryPresentation)):
        return certify(pres)
    raise TypeError(f"unsupported structure {type(pres).__name__}")


def falsify_property_P_part2(
    pres,
    coeff_samples: int = 20,
    path_bound: int = 3,
    seed: int = 0,
    truncation: int = 8,
    combinations: Iterable[Mapping[str, complex]] | None = None,
    max_power: int | None = None,
) -> CheckReport:
    """Search for an equal-level combination ``A`` with every ``L_mu A`` nilpotent.

    ``combinations`` adds explicit ``{word: coefficient}`` combinations ahead
    of the ``coeff_samples`` random ones (complex Gaussian coefficients on a
    random non-empty set of classes of one random level ``1..path_bound``).
    """
    from ..fock import build_basis, multiply_elements

    structure = _as_structure(pres)
    if structure.certified_length is not None:
        truncation = min(truncation, structure.certified_length)
    basis = build_basis(structure, truncation)
    max_power = max_power or truncation + 1
    rng = np.random.default_rng(seed)

    combos: list[dict[Path, complex]] = []
    for c in combinations or ():
        combos.append({structure.path(w): complex(a) for w, a in c.items()})
    by_level: dict[int, list[Path]] = {}
    for p, l in zip(basis.paths, basis.levels):
        if l >= 1:
            by_level.setdefault(int(l), []).append(p)
    levels = [l for l in range(1, path_bound + 1) if l in by_level]
    for _ in range(coeff_samples if levels else 0):
        m = levels[int(rng.integers(len(levels)))]
        pool = by_level[m]
        r = int(rng.integers(1, len(pool) + 1))
        chosen = sorted(rng.choice(len(pool), size=r, replace=False).tolist())
        coeffs = rng.normal(size=r) + 1j * rng.normal(size=r)
        combos.append({pool[i]: complex(a) for i, a in zip(chosen, coeffs)})

    mus = [p for p, l in zip(basis.paths, basis.levels) if l <= path_bound]
    results, candidates = [], []
    for idx, combo in enumerate(combos):
        combo = {w: a for w, a in combo.items() if abs(a) > 0}
        levels_used = {structure.level(w) for w in combo}
        entry = {
            "combination": [[w.label, _fmt(a)] for w, a in sorted(combo.items(), key=lambda kv: basis.index[kv[0]])],
        }
        if len(levels_used) > 1:
            entry["outcome"] = "skipped: words of different levels"
            results.append(entry)
            continue
        statuses: dict[str, int] = {}
        witness = None
        for mu in mus:
            product = multiply_elements(structure, {mu: 1.0}, combo)
            verdict = classify(basis, structure, product, max_power)
            statuses[verdict["status"]] = statuses.get(verdict["status"], 0) + 1
            if verdict["status"] == "non_nilpotent_stationary":
                witness = {"mu": mu.label, **verdict}
                break
        entry["statuses"] = dict(sorted(statuses.items()))
        if witness is not None:
            entry["outcome"] = "non-nilpotent witness"
            entry["witness"] = witness
        elif set(statuses) == {"exactly_nilpotent"}:
            entry["outcome"] = "candidate violation"
            candidates.append(idx)
        else:
            entry["outcome"] = "inconclusive"
        results.append(entry)

    outcome = "candidate violation" if candidates else "no counterexample found within bounds"
    return CheckReport(
        "property_P_ii_falsifier",
        not candidates,
        {"path_bound": path_bound, "truncation": truncation, "max_power": max_power},
        [{"combination": results[i]["combination"]} for i in candidates],
        {
            "outcome": outcome,
            "seed": seed,
            "samples": results,
            "note": "bounded randomized search; never establishes the property",
        },
    )
