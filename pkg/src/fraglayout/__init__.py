"""Layout-stage DNA fragment assembly as permutation optimization with PSO variants."""

from .bench import (
    BenchDataset,
    CellFailure,
    PairwiseTest,
    TrialReport,
    emit_outputs,
    make_ztests,
    run_grid,
    z_test,
)
from .errors import (
    ConfigError,
    ContractViolation,
    FraglayoutError,
    ParseError,
    ShearError,
)
from .fragments import (
    Fragment,
    FragmentSet,
    OverlapMatrix,
    ShearResult,
    build_overlap_matrix,
    fitness,
    overlap_len,
    overlap_len_kmp,
    parse_reads,
    read_fragments,
    shear_reference,
    write_fasta,
)
from .spv import spv_decode
from .stochastic import (
    ChaosMap,
    ChaosState,
    LevyConfig,
    RngStream,
    chaos_step,
    chaotic_inertia,
    levy_draws,
    levy_step,
    mantegna_sigma,
    seed_chaos,
    substream_seed,
)
from .swarm import (
    Particle,
    RunTrace,
    SwarmState,
    Variant,
    VariantConfig,
    chaotic_initialize,
    constriction,
    default_config,
    position_update,
    reflect,
    run,
    schedule_coefficients,
    uniform_initialize,
    velocity_update,
)

__version__ = "0.1.0"
