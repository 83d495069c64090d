"""Weak and modular values of pre/post-selected quantum ensembles."""
from .composite import ObservableSum, ProductRuleReport, ProductSumReport, \
    SumRuleReport, check_product_implies_sum, modular_of_sum, product_rule_report, \
    spin_pair_expansion, sum_rule_report, weak_joint
from .config import DEFAULT_TOLERANCES, RunConfig, Tolerances
from .meter import MeterOutcome, MeterPrep, ModularEstimate, ShotRecord, \
    TwoQubitMeterPrep, build_crz_circuit, crz_sweep, estimate_modular_from_shots, \
    modular_sweep, run_meter_unitary, run_single_meter, run_two_qubit_meter, \
    sample_meter
from .tensor import HilbertShape, Ket, Operator, SiteObservable, embed, \
    tensor_kets, tensor_ops
from .values import CouplingSpec, PrePostEnsemble, TwoLevelCoeffs, exp_lagrange, \
    exp_spectral, modular_from_weak, modular_value, two_level_coeffs, \
    weak_from_modular, weak_value
