from .config import ExperimentConfig, load_config
from .report import SuiteReport, trend_ratios, write_reports
from .stats import estimate_operator_norm, weak_type_statistic
from .suites import (
    SUITES,
    endpoint_rhs,
    local_kernel_integral_stat,
    run_suites,
    suite_boundedness,
    suite_commutators,
    suite_endpoint,
    suite_mean_zero_domination,
    suite_welland,
)
