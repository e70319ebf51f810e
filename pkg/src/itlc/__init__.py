"""Decision toolkit for an intuitionistic temporal logic of dynamical systems.

Deciding validity and falsifiability via irreducible-moment quasimodel
search with machine-checkable falsification certificates, plus a finite
Alexandroff dynamical-system model checker that doubles as an
independent brute-force oracle.
"""

from .alexandroff import (Analysis, Countermodel, FinitePoset, FiniteSystem,
                          analyze, closure, enumerate_systems, evaluate,
                          find_countermodel, interior, is_valid_on_system,
                          load_system, minimal_five, random_system,
                          save_system, system, system_from_json,
                          system_to_json)
from .config import Caps, DEFAULT_CAPS
from .errors import (CapExceeded, FragmentError, InvariantViolation,
                     ItlcError, KitError, ParseError, SchemaError,
                     SigmaMismatchError)
from .formula import (Atom, And, Bottom, BOT, DIAMOND_FRAGMENT, Eventually,
                      Exists, Forall, Formula, Henceforth, Implies, Modality,
                      Next, Or, eliminate_exists, format_formula, fragment_of,
                      godel_tarski, in_diamond_fragment, neg, parse,
                      random_formula, subformulas)
from .labels import (SigmaContext, TypeSet, defects, enumerate_types,
                     profile_masks, sensible_pair, subformula_closure,
                     type_set, viable_types)
from .moments import (Moment, MomentStore, below, enumerate_irreducibles,
                      graft, is_irreducible, moment, reduce, submoment,
                      temporal_successor)
from .quasimodel import (Certificate, Check, Lasso, Quasimodel, Verdict,
                         build_realizing_path, certificate_from_json,
                         check_quasimodel, complete_path_below, decide,
                         extract_quasimodel, falsified_members,
                         load_certificate, prune_profile, save_certificate,
                         verify_certificate)

__version__ = "0.1.0"
