from .checks import (CHECKS, estimate_log_mgf, test_association, test_clt, test_covariance,
                     test_ergodicity, test_extremes, test_lower_tail, test_mean_one, test_mgf_trend,
                     test_variance_growth)
from .report import FAIL, INCONCLUSIVE, PASS, EnsembleReport, ReportEntry
from .runner import EnsembleConfig, EnsembleStore, run_ensemble

__all__ = [
    "CHECKS", "EnsembleConfig", "EnsembleReport", "EnsembleStore", "FAIL", "INCONCLUSIVE", "PASS",
    "ReportEntry", "estimate_log_mgf", "run_ensemble", "test_association", "test_clt",
    "test_covariance", "test_ergodicity", "test_extremes", "test_lower_tail", "test_mean_one",
    "test_mgf_trend", "test_variance_growth",
]
