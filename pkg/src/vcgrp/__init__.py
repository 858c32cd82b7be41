"""vcgrp: exact computation of group VC-dimension, almost-periodicity of
convolutions, Bohr sets, and arithmetic regularity on finite groups."""

__version__ = "0.1.0"

from .almost import (
    AlmostPeriodError,
    AlmostPeriodReport,
    BohrPeriodReport,
    bootstrap_bohr_periods,
    bootstrap_k,
    exact_almost_periods,
    sample_almost_periods,
    sample_size_for,
    tuple_is_good,
)
from .bohr import (
    BohrError,
    BohrRegularityError,
    BohrSpec,
    dilate,
    find_regular_dilate,
    is_regular,
    realize,
    regularity_defect,
    regularity_violations,
    size_lower_bound_check,
    smoothing_check,
    smoothing_l1,
    subgroup_inside,
)
from .exactmath import (
    ExactnessError,
    chord_sq_cmp,
    cmp_rational_times_pi_pow,
    max_chord_index,
)
from .experiment import (
    ExperimentConfig,
    ExperimentError,
    RunReport,
    count_flags,
)
from .experiment import run as run_experiment
from .fourier import (
    ChangCover,
    Spectrum,
    chang_cover,
    dft,
    dft_naive,
    inverse_dft,
    large_spectrum,
    parseval_gap,
)
from .freiman import (
    FreimanError,
    FreimanMap,
    GAPRealization,
    GAPSpec,
    IntEmbedding,
    IsoCheck,
    ModelEmbedding,
    embed_int_set,
    gap_realize,
    identity_map,
    is_2_isomorphism,
    is_2_isomorphism_pair,
    is_s_isomorphism,
    map_via,
    model_embed,
    translation_map,
    two_isomorphism_violation,
)
from .gensets import (
    ap,
    ap_union,
    box,
    build_set,
    gap,
    random_coset_union,
    random_set,
    random_subspace,
    subgroup_union,
)
from .groups import (
    CyclicProductGroup,
    Group,
    GroupError,
    TableGroup,
    VectorSpaceGroup,
    cyclic,
    cyclic_product,
    dihedral_group,
    from_table,
    make_group,
    symmetric_group,
    vector_space,
)
from .regularity import (
    BogolyubovReport,
    RegularityDecomposition,
    RegularityError,
    SubspaceExtraction,
    bogolyubov_bohr,
    bogolyubov_subspace,
    regularity_bohr,
    regularity_subspace,
)
from .selftest import (
    CriterionResult,
    SelftestReport,
    run_criterion,
    run_selftest,
)
from .serialize import (
    DescriptorError,
    group_from_dict,
    load_group,
    load_json,
    load_set,
    loads,
    set_from_dict,
    set_to_dict,
)
from .sets import (
    CountFn,
    GSet,
    SetError,
    convolve,
    iterate_product,
    linf_shift_deviation,
    product_set,
    quotient_set,
    skew_convolve,
    skew_convolve_counts,
)
from .stability import (
    OrderSearchResult,
    StabilityReport,
    StabilityVcdReport,
    StabilityWitness,
    find_order_witness,
    is_k_stable,
    make_witness,
    stability_vcd_relation,
    staircase_witness,
    verify_witness,
)
from .util import (
    canonical_dumps,
    format_rational,
    parse_rational,
    to_jsonable,
)
from .vc import (
    SetFamily,
    VCResult,
    shatters,
    translate_family,
    vc_dimension,
    vcd,
    vcd_global,
    vcd_self,
    vcdr,
)

__all__ = [
    "__version__",
    # groups
    "Group",
    "GroupError",
    "CyclicProductGroup",
    "VectorSpaceGroup",
    "TableGroup",
    "cyclic",
    "cyclic_product",
    "vector_space",
    "from_table",
    "make_group",
    "symmetric_group",
    "dihedral_group",
    # sets and convolution
    "GSet",
    "CountFn",
    "SetError",
    "product_set",
    "quotient_set",
    "iterate_product",
    "convolve",
    "skew_convolve",
    "skew_convolve_counts",
    "linf_shift_deviation",
    # VC dimension
    "SetFamily",
    "VCResult",
    "translate_family",
    "shatters",
    "vc_dimension",
    "vcd",
    "vcd_self",
    "vcd_global",
    "vcdr",
    # Fourier analysis
    "dft",
    "dft_naive",
    "inverse_dft",
    "parseval_gap",
    "Spectrum",
    "large_spectrum",
    "ChangCover",
    "chang_cover",
    # Bohr sets
    "BohrError",
    "BohrRegularityError",
    "BohrSpec",
    "realize",
    "dilate",
    "subgroup_inside",
    "size_lower_bound_check",
    "regularity_violations",
    "is_regular",
    "regularity_defect",
    "find_regular_dilate",
    "smoothing_l1",
    "smoothing_check",
    # almost periods
    "AlmostPeriodError",
    "AlmostPeriodReport",
    "BohrPeriodReport",
    "exact_almost_periods",
    "tuple_is_good",
    "sample_size_for",
    "sample_almost_periods",
    "bootstrap_k",
    "bootstrap_bohr_periods",
    # regularity decompositions
    "RegularityError",
    "RegularityDecomposition",
    "regularity_bohr",
    "regularity_subspace",
    "BogolyubovReport",
    "bogolyubov_bohr",
    "SubspaceExtraction",
    "bogolyubov_subspace",
    # Freiman maps and modelling
    "FreimanError",
    "FreimanMap",
    "IsoCheck",
    "map_via",
    "identity_map",
    "translation_map",
    "two_isomorphism_violation",
    "is_2_isomorphism_pair",
    "is_2_isomorphism",
    "is_s_isomorphism",
    "ModelEmbedding",
    "model_embed",
    "GAPSpec",
    "GAPRealization",
    "gap_realize",
    "IntEmbedding",
    "embed_int_set",
    # stability
    "StabilityWitness",
    "verify_witness",
    "make_witness",
    "staircase_witness",
    "OrderSearchResult",
    "find_order_witness",
    "StabilityReport",
    "is_k_stable",
    "StabilityVcdReport",
    "stability_vcd_relation",
    # exact numerics
    "ExactnessError",
    "chord_sq_cmp",
    "max_chord_index",
    "cmp_rational_times_pi_pow",
    # set generators
    "ap",
    "ap_union",
    "box",
    "gap",
    "random_set",
    "subgroup_union",
    "random_subspace",
    "random_coset_union",
    "build_set",
    # serialization
    "DescriptorError",
    "loads",
    "load_json",
    "set_to_dict",
    "set_from_dict",
    "load_set",
    "group_from_dict",
    "load_group",
    # experiments
    "ExperimentError",
    "ExperimentConfig",
    "RunReport",
    "run_experiment",
    "count_flags",
    # selftest
    "CriterionResult",
    "SelftestReport",
    "run_criterion",
    "run_selftest",
    # utilities
    "parse_rational",
    "format_rational",
    "to_jsonable",
    "canonical_dumps",
]
