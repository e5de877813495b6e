"""Sign certification of limit sets for groups preserving a bilinear form of signature (p, q)."""

from .coxeter_vinberg import (CoxeterSpec, VinbergRep, build_gram, build_gram_exact, build_reflections,
                              check_hypotheses, check_no_empty_square, commuting_infinite_subsets,
                              coxeter_pipeline, fundamental_cone_membership, perturb_to_nondegenerate,
                              sample_sigma, sigma_membership)
from .errors import (CertError, DegenerateFormError, DomainError, FormViolationError, HypothesisError,
                     NotProximalError, NumericalFailure, PreconditionError)
from .pq_form import (LiftedCone, NormClass, ProjectivePoint, QuadraticSpace, ScanVerdict, Sign, Verdict,
                      certify_sign, make_standard_space, pairing, sign_constancy_scan, signature,
                      transversality_margin, triple_sign)
from .projective_convex import (HalfspaceDomain, QuadricDomain, boundary_segment_probe,
                                convex_hull_interior_sample, dual_domain, hilbert_distance,
                                omega_max_membership)
from .proximal_dynamics import (GroupRep, ProximalData, anosov_gap_diagnostic, enumerate_words, is_proximal,
                                repelling_data, sample_limit_set)
from .report import CertReport, certify_group
from .tolerances import DEFAULT_TOLERANCES, Tolerances

__version__ = "0.1.0"
