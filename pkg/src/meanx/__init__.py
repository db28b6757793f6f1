"""meanx: invariant-mean extensions of bivariate means and friends.

Highlights:

* classical mean families (power, quasiarithmetic, Gini, conjugated) with
  declared structural flags and randomized flag verification;
* the invariant-mean engine: barycentric fixed-point iteration extending a
  bivariate mean to arbitrary arity, with convergence diagnostics;
* ergodicity checks for the incidence graphs that guarantee uniqueness;
* comparability-region predicates for Gini means and a sampled check of the
  extension-ordering corollary;
* quasiarithmetic envelope estimators restricted to the power-generator
  family;
* a batch CLI (``meanx``) with machine-readable JSON/CSV output.
"""

from .domain import Interval, PointVector, POSITIVE, REALS
from .engine import (
    AveragingMapping,
    ExtensionResult,
    IterationConfig,
    apply_mapping,
    barycentric_apply,
    beta_extension_eval,
    extended_eval,
    extension_conjugacy_check,
    invariant_mean,
    iterative_extension_batch,
    iterative_extension_eval,
)
from .envelopes import (
    EnvelopeEstimate,
    FamilyWindow,
    OrderingReport,
    TransferReport,
    envelope_estimate,
    envelope_ordering_check,
    power_family_membership,
    transfer_theorem_check,
)
from .errors import (
    ArityError,
    DomainError,
    FlagError,
    MeanxError,
    NotConverged,
    NotErgodic,
    NotIrreducible,
    NumericalError,
    ParseError,
    ResourceLimit,
)
from .flags import FlagCheck, FlagReport, verify_flags
from .generators import CustomGen, ExpGen, GeneratorDescriptor, PowerGen
from .gini import (
    GiniParams,
    RegionReport,
    VerdictReport,
    corollary_check,
    in_delta_2,
    in_delta_inf,
    m_func,
    mu_func,
    region_report,
)
from .graphs import (
    ErgodicityReport,
    IncidenceGraph,
    IndexFamily,
    build_graph,
    complete_digraph,
    is_ergodic,
    is_irreducible,
    leave_one_out_family,
    period,
)
from .means import (
    ConjugateMean,
    CustomMean,
    ExtendedMean,
    GiniMean,
    MeanDescriptor,
    MeanFlags,
    PowerMean,
    QuasiArithmeticMean,
    conjugate_eval,
    eval_mean,
    eval_quasiarithmetic,
    eval_rows,
)
from .parser import format_descriptor, format_generator, parse_descriptor, parse_generator

__version__ = "0.1.0"
