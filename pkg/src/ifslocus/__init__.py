"""Certified membership tests for connectedness loci of collinear affine IFS.

The package decides whether a complex parameter belongs to the locus by a
finite backward search of the marked point 2c: entry into an explicit
self-covering trap certifies interior membership, extinction of all
branches from the attractor enclosure certifies exterior membership.  On
top of the decision procedure sit the capture-depth filtration, a
restricted-root oracle, verification of off-lens disk certificates, and
parameter-plane rasterization.
"""

__version__ = "0.1.0"

from .boxes import (
    Box,
    EnclosureBounds,
    base_capture_closed_form,
    canonical_trap,
    disk_prefilter,
    enclosure,
    inner_annulus,
    trap_is_valid,
)
from .capture import (
    BufferReport,
    CaptureResult,
    ClosureProbeReport,
    OffLensError,
    buffer_check,
    capture_time,
    closure_delay_probe,
)
from .certify import (
    BoundedValue,
    CertificateCheck,
    CertificateTuple,
    load_certificates,
    m20_sampling_check,
    rouche_remainder,
    rouche_test,
    verify_certificate,
)
from .geometry import (
    CanonicalCoords,
    DegenerateParameterError,
    DigitError,
    Family,
    Parameter,
    Word,
    backward_word,
    forward_word,
    inverse_step,
    lens_test,
    nearest_digit,
    to_coords,
    to_point,
    word_polynomial,
)
from .raster import (
    CloudResult,
    RasterField,
    ScanSpec,
    attractor_cloud,
    scan,
    write_pgm,
)
from .roots import (
    RestrictedPolynomial,
    RootRecord,
    enumerate_roots,
    word_from_polynomial,
)
from .search import (
    Node,
    SearchConfig,
    SearchStats,
    SurvivalResult,
    Verdict,
    branching_cap,
    classify,
    digit_window,
    frontier_nodes,
    survival_depth,
)

__all__ = [name for name in dir() if not name.startswith("_")]
