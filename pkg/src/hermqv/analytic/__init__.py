from src.hermqv.analytic.special import (KernelParams, beta, beta_tilde, beta_tilde_integral,
                                         beta_tilde_sup, kernel_exponent, kernel_norm_quadrature,
                                         kernel_norm_squared, norm_constant)
from src.hermqv.analytic.covariance import (cross_variance_bound, cross_variance_independent,
                                            fbm_qv_variance, fgn_autocovariance, increment_cov)
from src.hermqv.analytic.riemann import (DeltaTable, DiagonalPowerKernel, delta_ell, delta_table,
                                         epsilon_flag, riemann_bound_class, riemann_limit)
from src.hermqv.analytic.regime import (Exponents, LimitLaw, Rate, RegimeReport, alpha_k,
                                        boundary_curve, boundary_endpoint, boundary_table,
                                        classify_regime, exponents, limit_law_v1, limit_law_v2)
