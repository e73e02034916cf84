"""Period finding with a coarse controlled-rotation gate set.

Library layout:

* ``su2``       -- 2x2 gate arithmetic, gate words, the trace distance
* ``qpf``       -- closed-form outcome distributions and the useful-output
                   probability, exact and under Gaussian gate noise
* ``oracle``    -- gate-by-gate state-vector simulation (ground truth)
* ``classical`` -- continued fractions, order recovery, factoring driver
* ``synth``     -- search for short fault-tolerant words approximating
                   small rotations
* ``scaling``   -- (L, d_max) sweeps, decay fits, the length/cutoff
                   trade-off calculator
* ``cli``       -- the ``aqftshor`` command
"""

from .classical import (
    CfExpansion,
    FactoringInstance,
    FactorReport,
    QpfSample,
    cf_expand,
    find_order,
    sample_outcome,
    shor_factor,
)
from .oracle import (
    PeriodicInput,
    apply_aqft_circuit,
    aqft_matrix,
    aqft_on_periodic,
    multiplicative_order,
    qpf_distribution_exact,
)
from .qpf import (
    AqftSpec,
    Distribution,
    NoiseModel,
    NoisyEstimate,
    aqft_phase,
    full_distribution,
    prob_j,
    prob_j_reference,
    prob_useful,
    prob_useful_noisy,
    useful_j_set,
)
from .scaling import (
    ScalingFit,
    ScalingPoint,
    characteristic_r,
    factor4_check,
    fit_decay,
    invert_lmax,
    lmax,
    sweep,
)
from .su2 import (
    GATES,
    GateWord,
    R128_WORD_31,
    controlled_rotation_matrix,
    decompose_controlled,
    dist,
    eval_word,
    rotation,
)
from .synth import (
    SearchConfig,
    SynthResult,
    baseline_distance,
    gate_count_scaling_report,
    search,
)

__all__ = [name for name in dir() if not name.startswith("_")]
