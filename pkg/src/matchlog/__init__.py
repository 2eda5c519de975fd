"""matchlog: a matching logic workbench.

Locally nameless patterns, finite-model semantics with least fixpoints, a
Hilbert-style proof kernel with proofs as data, a derived-rule library with
a tautology prover, an interactive proof mode, and a CLI plus local HTTP
service on top.
"""

from .syntax import (
    App, BOT, Bot, BoundEVar, BoundSVar, Exists, FreeEVar, FreeSVar, Imp,
    Mu, Notation, NotationDef, Pattern, Signature, Sym,
    and_, expand, forall, free_evars, free_svars, fresh_evar, fresh_svar,
    iff_, not_, nu, or_, top, well_formed, wf_closed_ex, wf_closed_mu,
    wf_positive,
)
from .parser import ParseError, TheoryFile, parse_model, parse_pattern, parse_theory
from .printer import print_pattern
from .semantics import (
    BudgetExceededError, EvalError, Model, Valuation, entails_over,
    eval_pattern, holds, is_functional, is_predicate, lfp,
)
from .kernel import AppContext, Derivation, KernelError, Theorem, check

__version__ = "0.1.0"
