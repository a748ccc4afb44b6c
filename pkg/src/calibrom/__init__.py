"""calibrom: reduced-order temperature prediction for extruded profiles.

Offline, snapshots of the full-order cooling solve are compressed into an
orthonormal basis (method of snapshots) and a small tanh network learns the
map from process parameters to basis coefficients.  Online, the saved
bundle answers temperature-field queries in milliseconds.
"""

from .config import Config, desk_config, load_config, preset, table2_config
from .errors import (
    BundleFormatError,
    CalibromError,
    ConfigurationError,
    ConvergenceError,
    DivergenceError,
    NumericalError,
    ResolutionError,
)
from .fom import (
    Discretization,
    MaterialParams,
    ProcessParams,
    Snapshot,
    SnapshotSet,
    biot_fourier_report,
    generate_snapshot_matrix,
    read_snapshot_store,
    solve_fom,
    write_snapshot_store,
)
from .geometry import ProfileGeometry, RegionMasks, VoxelGrid, rasterize, region_masks
from .neural import Mlp, MlpLayout, TrainConfig, TrainReport, forward, grad_check, init_mlp, train
from .reduction import (
    ParamScaler,
    ReducedBasis,
    ReducedCoefficients,
    center,
    compute_basis,
    eigendecompose_spsd,
    gram,
    pod_basis,
    project,
    projection_error_spectrum,
    reconstruct,
)
from .rom import (
    ErrorReport,
    PredictionResult,
    RomBundle,
    SamplingPlan,
    build_rom,
    evaluate,
    load_bundle,
    predict,
    sample_params,
    save_bundle,
)

__version__ = "0.1.0"
