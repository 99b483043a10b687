//! Predicted main terms: `zeta_q`, shifted divisor functions, the Euler
//! products of the twisted-moment and ratios formulas, and the one-level
//! density main term.

mod density;
mod divisor;
mod euler;
mod shifts;

pub use divisor::{
    complete_homogeneous, q_pow_neg, signed_elementary, tau_brute_force, tau_general,
    tau_mu_prime_power, zeta_q, zeta_u,
};
pub use density::{density_main, DensityPrediction, PhiHat};
pub use euler::{
    a_c, a_k1, b_c, ratio_k1_closed, ratios_main, ratios_main_unchecked, s_ratio, s_tilde,
    twisted_main, EulerTruncation, EulerValue, Truncation, DEFAULT_TOLERANCE,
    MAX_PRIME_DEGREE_CAP,
};
pub use shifts::{parse_complex, ShiftSet, TwistPoly};
