"""Benchmark: compiled evaluation core vs pure-Python twin vs reference.

Measures full-validity sweeps (every valuation of the free variables) on
random models and patterns, the hot loop behind ``holds`` and
``entails_over``.  Run as ``python benchmarks/bench_eval.py``.
"""

import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from matchlog import engine
from matchlog.semantics import Valuation, eval_pattern
from matchlog.syntax import free_evars, free_svars, well_formed

from genlib import random_model, random_pattern


def workload(seed=7, count=40, model_size=7):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        m = random_model(rng, symbols=("f", "g"), max_size=model_size,
                         min_size=model_size)
        phi = random_pattern(rng, symbols=("f", "g"), depth=4,
                             evars=("u", "v"), svars=("V",))
        if not (well_formed(phi) and free_evars(phi) and free_svars(phi)):
            continue
        # half the sweeps run on validities, so early exit cannot help
        if len(out) % 2 == 0:
            from matchlog.syntax import Imp

            phi = Imp(phi, phi)
        out.append((m, phi))
    return out


def time_core(items, force_pure):
    t0 = time.perf_counter()
    hits = 0
    for m, phi in items:
        cq = engine.compile_query(m, phi, force_pure=force_pure)
        if cq.core.holds_all() is None:
            hits += 1
    return time.perf_counter() - t0, hits


def time_reference(items):
    from itertools import product

    t0 = time.perf_counter()
    hits = 0
    for m, phi in items:
        fev = sorted(free_evars(phi))
        fsv = sorted(free_svars(phi))
        subsets = []
        n = len(m.carrier)
        for bits in range(1 << n):
            subsets.append(frozenset(e for i, e in enumerate(m.carrier)
                                     if bits >> i & 1))
        ok = True
        for ev in product(m.carrier, repeat=len(fev)):
            for sv in product(subsets, repeat=len(fsv)):
                rho = Valuation(dict(zip(fev, ev)), dict(zip(fsv, sv)))
                if eval_pattern(m, rho, phi) != m.full:
                    ok = False
                    break
            if not ok:
                break
        hits += ok
    return time.perf_counter() - t0, hits


def main():
    items = workload()
    print(f"validity sweeps over {len(items)} (model, pattern) pairs, "
          f"|M|={len(items[0][0].carrier)}")
    rows = []
    if engine.backend_name() == "compiled":
        t, h = time_core(items, force_pure=False)
        rows.append(("compiled core", t, h))
    else:
        print("note: compiled extension not built; skipping that row")
    t, h = time_core(items, force_pure=True)
    rows.append(("pure core", t, h))
    t, h = time_reference(items)
    rows.append(("reference evaluator", t, h))

    base = rows[0][1]
    print(f"{'backend':<22}{'seconds':>10}{'valid':>8}{'speedup':>10}")
    for name, t, h in rows:
        print(f"{name:<22}{t:>10.3f}{h:>8}{base / t if t else 0:>10.2f}x")
    checks = {h for _, _, h in rows}
    assert len(checks) == 1, f"backends disagree on validity counts: {checks}"
    print("all backends agree on every verdict")


if __name__ == "__main__":
    main()
