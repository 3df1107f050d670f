"""Short-time entanglement generation for two qubits in Gaussian environments."""
from .baths import (
    DeltaFamily,
    EqualTimeMatrix,
    Mode,
    OUNoise,
    ThermalBath,
    WienerFieldModel,
    common_bath_delta,
    thermal_correlation,
    wiener_delta,
)
from .coeffs import BlockCoeffMatrix, assemble, equal_time_D, pt_transform
from .config import ConfigError, ModelConfig, dump_config, load_config, parse_config
from .criterion import (
    BasisPair,
    CriterionReport,
    OptimizerOptions,
    Regime,
    Side,
    Verdict,
    decide,
    eval_markovian,
    eval_nonmarkovian,
    scan_t0,
    witness_from_basis,
)
from .dynamics import (
    DephasingModel,
    dephasing_exact,
    dephasing_mc,
    dephasing_rk4,
    lindblad_apply,
    negativity,
    short_time_markov,
    short_time_nonmarkov,
)
from .oracle import Grid, Hybrid, OracleReport, Random, agreement_suite, certify, certify_batch
from .qlin import ValidationError, partial_transpose

__version__ = "0.1.0"
