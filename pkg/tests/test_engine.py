import random

import pytest

from matchlog import engine
from matchlog._corepure import Core as PureCore
from matchlog.semantics import Valuation, eval_pattern, holds_detail
from matchlog.syntax import well_formed

from genlib import random_model, random_pattern, random_valuation


def test_backend_selected():
    # the build ships the compiled core; the pure twin must always import
    assert engine.backend_name() in ("compiled", "pure")
    assert engine.core_module(force_pure=True).__name__.endswith("_corepure")


@pytest.mark.parametrize("seed", range(120))
def test_fast_eval_matches_reference(seed):
    rng = random.Random(seed * 3 + 1)
    m = random_model(rng, symbols=("f", "g"), max_size=5)
    phi = random_pattern(rng, symbols=("f", "g"), depth=4,
                         evars=("u", "v"), svars=("V",))
    if not well_formed(phi):
        return
    rho = random_valuation(rng, m, phi)
    ref = eval_pattern(m, rho, phi)
    cq = engine.compile_query(m, phi)
    assert cq is not None
    fast = cq.eval_with(rho.evars, rho.svars)
    assert fast == ref


@pytest.mark.parametrize("seed", range(60))
def test_compiled_and_pure_cores_agree(seed):
    rng = random.Random(seed * 5 + 2)
    m = random_model(rng, symbols=("f",), max_size=4)
    phi = random_pattern(rng, symbols=("f",), depth=3,
                         evars=("u",), svars=("V",))
    if not well_formed(phi):
        return
    auto = engine.compile_query(m, phi)
    pure = engine.compile_query(m, phi, force_pure=True)
    assert isinstance(pure.core, PureCore)
    w1 = auto.core.holds_all()
    w2 = pure.core.holds_all()
    assert w1 == w2


@pytest.mark.parametrize("seed", range(40))
def test_holds_witness_consistent(seed):
    rng = random.Random(seed * 9 + 4)
    m = random_model(rng, symbols=("f",), max_size=4)
    phi = random_pattern(rng, symbols=("f",), depth=3,
                         evars=("u",), svars=("V",))
    if not well_formed(phi):
        return
    witness = holds_detail(m, phi)
    if witness is None:
        # spot-check a few valuations for fullness
        for _ in range(5):
            rho = random_valuation(rng, m, phi)
            assert eval_pattern(m, rho, phi) == m.full
    else:
        # the witness really is a counter-valuation
        assert eval_pattern(m, witness.valuation, phi) == witness.denotation
        assert witness.denotation != m.full


def test_compile_rejects_ill_formed():
    from matchlog.syntax import BoundEVar

    m = random_model(random.Random(0), max_size=3)
    assert engine.compile_query(m, BoundEVar(0)) is None
