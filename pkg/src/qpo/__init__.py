"""Quasi proximate orders and growth of analytic functions in the unit disc."""

from .construct import (AssociatedMajorant, SequenceLedger, build_qpo, eta_necessity_sweep,
                        export_sigma_csv, find_anchor_sequences, verify_qpo)
from .disc import (AnalyticFunctionModel, DiscGrid, closed_form, disc_orders,
                   gap_series_from_profile, integral_mean_p, log_max_modulus, max_modulus,
                   mean_orders, power_series)
from .errors import (ConfigurationError, ConstructionInfeasible, DomainError, ParameterError,
                     QPOError, QuadratureError, SingularityError)
from .growth import (GridSpec, GrowthFunction, build_counterexample, estimate_orders,
                     eval_growth, growth_index)
from .harness import ExperimentConfig, RunManifest, export_csv, parse_config, run_experiment
from .report import PropertyRecord, PropertyReport
from .scales import polya_order, psi_tilde, smoothing_integral_I_alpha, upper_density
from .sigma import PiecewiseProximateOrder, smooth_corners
from .strip import (StripProfile, cartwright_witness, mean_proximate_order_L, omega_from_l,
                    real_part_witness, sector_modulus_relation, warschawski_map)
from .zeros import (ZeroSequence, canonical_product, jensen_residual, product_upper_bound,
                    zero_count_polar, zero_count_polar_bruteforce)

__version__ = "0.1.0"
