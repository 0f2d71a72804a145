"""Information-theoretic bounds and constructions for fair compressed representations."""
from .bounds import (
    BoundReport,
    Quantities,
    RegimeWarning,
    crossovers,
    sweep,
    theorem1_bounds,
    theorem2_bounds,
    u0,
)
from .frl import (
    efrl_construct,
    esfrl_bound,
    frl_construct,
    mix_with_constant,
    sfrl_bound,
    sfrl_check,
)
from .info import (
    Alphabet,
    Channel,
    JointDistribution,
    compose,
    condition,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    get_base,
    marginalize,
    mutual_information,
    set_base,
    use_base,
)
from .jointfile import read_channel, read_joint, write_channel, write_joint
from .mechanism import (
    AuditResult,
    Mechanism,
    RegimeError,
    SizeGuardError,
    audit,
    construct,
    construct_L1,
    construct_L2_variant,
    construct_L3,
)
from .oracle import OracleResult, oracle_grid, oracle_optimize
from .typewriter import typewriter_joint

__version__ = "0.1.0"
