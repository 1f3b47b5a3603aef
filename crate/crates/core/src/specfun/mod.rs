//! Special functions and orthogonal polynomials.

mod bessel;
mod gamma;
mod poly;

pub use bessel::{bessel_a, bessel_j, bessel_j_zeros, sigma_hat, MAX_ARG, MAX_ORDER};
pub use gamma::{gamma, ln_gamma};
pub use poly::{
    binom_real, gegenbauer, gegenbauer_ratio, hermite_monic, jacobi_p, jacobi_p_scaled, laguerre,
    laguerre_at_zero, sph_harm_count, PolyFamily,
};

pub(crate) use bessel::{a_unchecked, j_unchecked, zeros_unchecked};
pub(crate) use gamma::lgamma;
pub(crate) use poly::{laguerre_all_scaled, laguerre_scaled, ln_binom_real};
