"""gcnlab: geometric condition numbers of simplices, least-squares flats of
discrete measures, and numerical certification of their comparison bounds."""

__version__ = "0.1.0"

from .errors import (
    DegenerateMeasureError,
    DegenerateSimplexError,
    DimensionMismatchError,
    EnumerationCapError,
    GcnLabError,
    NumericalError,
)
from .hilbert_core import (
    AffineFlat,
    Spectrum,
    dist_to_flat,
    elementary_symmetric,
    gram_det,
    jacobi_eigh,
    weighted_spectrum,
)
from .simplex import (
    Simplex,
    affine_span,
    diam,
    height,
    max_at0,
    min_at0,
    min_edge,
    polar_sine,
    remove_vertex,
    replace_vertex,
    scale_at0,
    volume,
)
from .gcn import GcnKind, c_dls, c_ht, c_pol, c_vol, c_vol_mu, curvature_vol, eval_batch
from .measure import (
    DiscreteMeasure,
    LsFlatResult,
    SpectralSummary,
    center_of_mass,
    diameter,
    empirical_ls_error,
    ls_flat,
    regularity_probe,
    spectral_summary,
)
from .estimators import (
    BoundReport,
    ConcentrationSummary,
    IntegralSpec,
    McEstimate,
    MomentIdentity,
    SeparationCertificate,
    c_dsh_integral,
    certify_separation,
    concentration_experiment,
    integral_exact,
    integral_mc,
    leger_constants,
    lemma_either_or,
    moment_identity_check,
    sym_tail_ratio,
    verify_bound,
    verify_certificate,
    volume_moment,
)
from .applications import (
    AffinityMatrix,
    ClusterAssignment,
    scc_affinities,
    spectral_cluster,
    volume_sample_flat,
    volume_sampling_expected_error,
)
