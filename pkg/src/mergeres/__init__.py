"""Merge resolution proof systems: checking, classification, simulations and
the F_{l,m,n} separating family."""
from .cnf import (SATISFIED, Clause, CnfFormula, DimacsError, InvalidResolution, Restriction,
                  apply_restriction, clashing_vars, implies, implies2, is_merge, is_satisfied,
                  parse_dimacs, resolve, write_dimacs)
from .proof import (Block, Proof, ProofBuilder, ProofError, ProofStep, TraceError, check_semantic,
                    check_valid, parse_trace, restrict_proof, stats, syntactic_equivalent,
                    write_trace)
from .unit import cl_i_member, input_derive, is_absorbed, is_empowering, unit_propagate
from .systems import ClassificationReport, classify
from .cdcl import SplitMix64, Trail, conflict_derivation, first_uip, random_episode, validate_trail
from .families import (FamilyLayout, FamilyParams, build_res_ub, build_rml_r1, build_rml_r3,
                       build_variant_refutation, gen_family)
from .transform import (decompose_input_structured, regularize_input, simulate_lreml, simulate_rml,
                        tree_to_input, tree_to_merge)
from .analysis import (RestrictionSample, find_respecting_restriction, is_autarky, is_k_respecting,
                       mu, sample_restriction, sigma_i, trim_r)

__version__ = "0.1.0"
