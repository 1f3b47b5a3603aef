//! Orthogonal polynomials by three-term recurrence, plus small combinatorial helpers.

use serde::{Deserialize, Serialize};

use super::gamma::lgamma;
use crate::error::{domain, Result};

/// A member of one of the classical families, tagged with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PolyFamily {
    Laguerre { degree: u32, nu: f64 },
    HermiteMonic { degree: u32 },
    Gegenbauer { degree: u32, nu: f64 },
    Jacobi { degree: u32, a: f64, b: f64 },
}

impl PolyFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PolyFamily::Laguerre { nu, .. } if !(nu > -1.0) => {
                Err(domain(format!("Laguerre parameter must exceed -1, got {nu}")))
            }
            PolyFamily::Gegenbauer { nu, .. } if !(nu > -0.5) => {
                Err(domain(format!("Gegenbauer parameter must exceed -1/2, got {nu}")))
            }
            PolyFamily::Jacobi { a, b, .. } if !(a > -1.0 && b > -1.0) => {
                Err(domain(format!("Jacobi parameters must exceed -1, got ({a}, {b})")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            PolyFamily::Laguerre { degree, nu } => laguerre(degree, nu, x),
            PolyFamily::HermiteMonic { degree } => hermite_monic(degree, x),
            PolyFamily::Gegenbauer { degree, nu } => gegenbauer(degree, nu, x),
            PolyFamily::Jacobi { degree, a, b } => jacobi_p(degree, a, b, x),
        })
    }
}

/// Generalized Laguerre `L_m^ν(x)`.
pub fn laguerre(m: u32, nu: f64, x: f64) -> f64 {
    laguerre_scaled(m, nu, x, 1.0)
}

/// `L_m^ν(x) · s`, with the scale folded into the starting values so large
/// degrees can be damped without overflow.
pub(crate) fn laguerre_scaled(m: u32, nu: f64, x: f64, s: f64) -> f64 {
    let mut prev = s;
    if m == 0 {
        return prev;
    }
    let mut cur = (1.0 + nu - x) * s;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + nu - x) * cur - (kf + nu) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `L_0^ν(x), …, L_m^ν(x)`, each multiplied by `s`.
pub(crate) fn laguerre_all_scaled(m: u32, nu: f64, x: f64, s: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m as usize + 1);
    out.push(s);
    if m == 0 {
        return out;
    }
    out.push((1.0 + nu - x) * s);
    for k in 1..m as usize {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + nu - x) * out[k] - (kf + nu) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// `L_m^ν(0) = C(ν+m, m)`.
pub fn laguerre_at_zero(m: u32, nu: f64) -> f64 {
    if m <= 500 {
        let mut v = 1.0;
        for j in 1..=m {
            let jf = j as f64;
            v *= (nu + jf) / jf;
        }
        v
    } else {
        ln_binom_real(nu + m as f64, m).exp()
    }
}

/// `ln C(a, m) = ln Γ(a+1) - ln Γ(m+1) - ln Γ(a-m+1)` for `a - m > -1`.
pub(crate) fn ln_binom_real(a: f64, m: u32) -> f64 {
    lgamma(a + 1.0) - lgamma(m as f64 + 1.0) - lgamma(a - m as f64 + 1.0)
}

/// Monic Hermite polynomial for the standard Gaussian weight.
pub fn hermite_monic(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = x;
    for k in 1..n {
        let next = x * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Gegenbauer `C_k^ν(α)`.
pub fn gegenbauer(k: u32, nu: f64, alpha: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 2.0 * nu * alpha;
    for j in 1..k {
        let jf = j as f64;
        let next = (2.0 * (jf + nu) * alpha * cur - (jf + 2.0 * nu - 1.0) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `C_k^ν(α) / C_k^ν(1)`, with the ν → 0 limit given by the Chebyshev polynomial `T_k(α)`.
pub fn gegenbauer_ratio(k: u32, nu: f64, alpha: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if nu == 0.0 {
        let (mut prev, mut cur) = (1.0, alpha);
        for _ in 1..k {
            let next = 2.0 * alpha * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    gegenbauer(k, nu, alpha) / gegenbauer(k, nu, 1.0)
}

/// Jacobi `P_m^{(a,b)}(x)`.
pub fn jacobi_p(m: u32, a: f64, b: f64, x: f64) -> f64 {
    jacobi_p_scaled(m, a, b, x, 1.0)
}

/// `P_m^{(a,b)}(x) / s^m`, evaluated without forming `P_m` when it would overflow.
pub fn jacobi_p_scaled(m: u32, a: f64, b: f64, x: f64, s: f64) -> f64 {
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = ((a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0)) / s;
    for n in 2..=m {
        let n = n as f64;
        let ab = a + b;
        let c = 2.0 * n + ab;
        let denom = 2.0 * n * (n + ab) * (c - 2.0);
        let lin = (c - 1.0) * (c * (c - 2.0) * x + a * a - b * b) / denom;
        let back = 2.0 * (n + a - 1.0) * (n + b - 1.0) * c / denom;
        let next = lin / s * cur - back / (s * s) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `α(α-1)…(α-h+1) / h!`; exactly zero when α is a nonnegative integer below h.
pub fn binom_real(alpha: f64, h: u32) -> f64 {
    let mut v = 1.0;
    for j in 0..h {
        v *= (alpha - j as f64) / (j as f64 + 1.0);
    }
    v
}

fn binom_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut v: u128 = 1;
    for j in 0..k {
        v = v * (n - j) as u128 / (j + 1) as u128;
    }
    v
}

/// Dimension of the space of degree-ℓ spherical harmonics on `S^d`.
pub fn sph_harm_count(d: u32, ell: u32) -> Result<u128> {
    if d < 1 {
        return Err(domain("sph_harm_count needs d >= 1"));
    }
    if ell == 0 {
        return Ok(1);
    }
    let (d, l) = (d as u64, ell as u64);
    let lower = if l >= 2 { binom_u128(l - 2 + d, d) } else { 0 };
    Ok(binom_u128(l + d, d) - lower)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre(2, 0.0, 0.0), 1.0);
        assert_eq!(laguerre(1, 0.0, 2.0), -1.0);
        assert_eq!(laguerre(2, 0.0, 2.0), -1.0);
        assert_eq!(laguerre_at_zero(0, 0.7), 1.0);
        assert_eq!(laguerre_at_zero(2, 0.0), 1.0);
        assert!((laguerre_at_zero(3, 0.5) - 2.1875).abs() < 1e-15);
    }

    #[test]
    fn laguerre_at_zero_paths_agree() {
        let direct = laguerre_at_zero(500, 1.5);
        let logs = ln_binom_real(501.5, 500).exp();
        assert!(((direct - logs) / direct).abs() < 1e-12);
    }

    #[test]
    fn hermite_examples() {
        assert_eq!(hermite_monic(0, 7.0), 1.0);
        assert_eq!(hermite_monic(1, 3.0), 3.0);
        assert_eq!(hermite_monic(2, 2.0), 3.0);
        assert_eq!(hermite_monic(3, 2.0), 2.0);
    }

    #[test]
    fn gegenbauer_examples() {
        assert!((gegenbauer(1, 0.8, 0.3) - 0.48).abs() < 1e-15);
        assert_eq!(gegenbauer(2, 1.0, 1.0), 3.0);
        assert_eq!(gegenbauer(3, 0.5, 0.0), 0.0);
        assert!((gegenbauer_ratio(4, 0.0, 0.3) - (8.0 * 0.0081 - 8.0 * 0.09 + 1.0)).abs() < 1e-15);
        // ν = 1/2 is Legendre
        let x: f64 = 0.4;
        assert!((gegenbauer(2, 0.5, x) - 0.5 * (3.0 * x * x - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi_p(0, 0.3, 0.2, 0.9), 1.0);
        assert_eq!(jacobi_p(1, 0.0, 0.0, 0.5), 0.5);
        for m in 0..30 {
            let v = jacobi_p(m, 1.5, 0.0, 1.0);
            let w = laguerre_at_zero(m, 1.5);
            assert!(((v - w) / w).abs() < 1e-12, "m={m}");
        }
        // P_2^{(0,0)} is Legendre
        assert!((jacobi_p(2, 0.0, 0.0, 0.3) - 0.5 * (3.0 * 0.09 - 1.0)).abs() < 1e-15);
        let s = -3.0;
        let v = jacobi_p_scaled(7, 0.5, 0.0, 2.2, s);
        assert!((v - jacobi_p(7, 0.5, 0.0, 2.2) / s.powi(7)).abs() < 1e-12);
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom_real(2.3, 0), 1.0);
        assert_eq!(binom_real(1.0, 2), 0.0);
        assert_eq!(binom_real(0.5, 1), 0.5);
        assert_eq!(binom_real(5.0, 2), 10.0);
    }

    #[test]
    fn harmonic_counts() {
        assert_eq!(sph_harm_count(4, 0).unwrap(), 1);
        assert_eq!(sph_harm_count(3, 1).unwrap(), 4);
        for l in 0..20 {
            assert_eq!(sph_harm_count(2, l).unwrap(), 2 * l as u128 + 1);
        }
        assert!(sph_harm_count(0, 1).is_err());
    }

    #[test]
    fn family_dispatch() {
        let f = PolyFamily::Laguerre { degree: 2, nu: 0.0 };
        assert_eq!(f.eval(2.0).unwrap(), -1.0);
        assert!(PolyFamily::Jacobi { degree: 1, a: -1.0, b: 0.0 }.eval(0.0).is_err());
        assert!(PolyFamily::Gegenbauer { degree: 1, nu: -0.5 }.validate().is_err());
    }
}
