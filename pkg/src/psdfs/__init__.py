"""Photon-subtracted displaced Fock states N a^k D(alpha)|n>.

Closed-form amplitudes and Wigner functions with independent matrix oracles,
nonclassicality and non-Gaussianity measures, photon loss, and homodyne
detection with finite efficiency.
"""

from .channels import (
    KernelSupportError,
    LossParams,
    lossy_density_matrix,
    lossy_wigner_closed,
    lossy_wigner_convolution,
    lossy_wigner_oracle,
)
from .measures import (
    CovarianceMatrix,
    MeasureReport,
    NegativityEstimate,
    QuadConfig,
    beam_splitter_output,
    covariance_matrix,
    entropy_h,
    linear_entropy_potential,
    linear_entropy_series,
    measure_report,
    negativity_integral,
    relative_entropy_ng,
    skew_measure,
    wigner_log_negativity,
)
from .state import (
    DensityMatrix,
    FockVector,
    NullStateError,
    StateParams,
    TruncationError,
    density_matrix,
    expectation_adp_aq,
    normalization_constant,
    psdfs_closed_form,
    psdfs_matrix_oracle,
)
from .tomography import (
    DetectorParams,
    QuadratureError,
    detected_wigner,
    detected_wigner_via_channel,
    quadrature_distribution,
)
from .wigner import (
    GridGeometry,
    HudsonWitness,
    PhaseSpaceGrid,
    characteristic_function,
    hudson_bound_witness,
    wigner_closed,
    wigner_from_characteristic,
    wigner_grid,
    wigner_parity_oracle,
)

__version__ = "0.1.0"
