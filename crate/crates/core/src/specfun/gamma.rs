//! Log-gamma on the positive real axis.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{domain, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// B_{2k} / (2k (2k-1)) for k = 1..=8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const TAYLOR_TERMS: usize = 56;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("ln_gamma requires a finite x > 0, got {x}")));
    }
    Ok(lgamma(x))
}

/// `Γ(x)` for `x > 0`; overflows to infinity past x ≈ 171.6.
pub fn gamma(x: f64) -> Result<f64> {
    ln_gamma(x).map(f64::exp)
}

pub(crate) fn lgamma(x: f64) -> f64 {
    if x.fract() == 0.0 && x <= 21.0 {
        let mut f = 1.0_f64;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f.ln();
    }
    if x < 0.5 {
        // Γ(x) = Γ(1+x)/x keeps small arguments accurate
        return lgamma(x + 1.0) - x.ln();
    }
    if x <= 1.5 {
        return ln_gamma_1p(x - 1.0);
    }
    if x < 15.0 {
        // shift down into [1.5, 2.5), where ln Γ(2+e) = ln(1+e) + ln Γ(1+e)
        let mut z = x;
        let mut prod = 1.0_f64;
        while z >= 2.5 {
            z -= 1.0;
            prod *= z;
        }
        let e = z - 2.0;
        return prod.ln() + e.ln_1p() + ln_gamma_1p(e);
    }
    stirling(x)
}

fn stirling(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        corr += c * pow;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + corr
}

// ln Γ(1+e) = -γ e + Σ_{k≥2} (-1)^k ζ(k) e^k / k, for |e| ≤ 1/2
fn ln_gamma_1p(e: f64) -> f64 {
    let zeta = zeta_table();
    let mut sum = 0.0;
    let mut pow = e * e;
    for (i, z) in zeta.iter().enumerate() {
        let k = (i + 2) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * z * pow / k;
        pow *= e;
    }
    -EULER_GAMMA * e + sum
}

fn zeta_table() -> &'static [f64; TAYLOR_TERMS] {
    static TABLE: OnceLock<[f64; TAYLOR_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TAYLOR_TERMS];
        for (i, v) in t.iter_mut().enumerate() {
            *v = zeta_int(i as u32 + 2);
        }
        t
    })
}

// Riemann zeta at an integer s ≥ 2 by Euler–Maclaurin summation.
fn zeta_int(s: u32) -> f64 {
    if s == 2 {
        return PI * PI / 6.0;
    }
    const N: u32 = 16;
    const B: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let sf = s as f64;
    let n = N as f64;
    let mut head = 0.0;
    for j in (1..N).rev() {
        head += (j as f64).powi(-(s as i32));
    }
    let mut tail = n.powf(1.0 - sf) / (sf - 1.0) + 0.5 * n.powf(-sf);
    // rising factorial s(s+1)...(s+2j-2) / (2j)!
    let mut rise = sf;
    let mut fact = 2.0;
    let mut pow = n.powf(-sf - 1.0);
    for (j, b) in B.iter().enumerate() {
        let j = j as f64 + 1.0;
        tail += b * rise / fact * pow;
        rise *= (sf + 2.0 * j - 1.0) * (sf + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        pow /= n * n;
    }
    head + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn integer_points() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        assert!(rel(ln_gamma(5.0).unwrap(), 24f64.ln()) < 1e-15);
        assert!(rel(ln_gamma(30.0).unwrap(), 71.257_038_967_168_01) < 1e-14);
    }

    #[test]
    fn half_integer() {
        assert!(rel(ln_gamma(0.5).unwrap(), 0.5 * PI.ln()) < 1e-14);
        assert!(rel(ln_gamma(1.5).unwrap(), (0.5 * PI.sqrt()).ln()) < 1e-13);
        assert!(rel(ln_gamma(2.5).unwrap(), (0.75 * PI.sqrt()).ln()) < 1e-13);
    }

    #[test]
    fn near_the_zeros() {
        // Γ(1+e) ≈ 1 - γ e near e = 0
        let e = 1e-6;
        let v = ln_gamma(1.0 + e).unwrap();
        assert!(rel(v, -EULER_GAMMA * e + 0.822_467_033_424_113_2 * e * e) < 1e-9);
        // lnΓ(2+e) = ln(1+e) + lnΓ(1+e)
        let w = ln_gamma(2.0 + e).unwrap();
        assert!(rel(w, (1.0 - EULER_GAMMA) * e) < 1e-5);
    }

    #[test]
    fn recurrence_consistency() {
        for i in 1..400 {
            let x = 0.037 * i as f64 + 0.01;
            let lhs = lgamma(x + 1.0);
            let rhs = lgamma(x) + x.ln();
            assert!((lhs - rhs).abs() <= 2e-14 * lhs.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn large_argument() {
        // ln Γ(10^4) = ln(9999!)
        let exact: f64 = (1..10_000).map(|k| (k as f64).ln()).sum();
        assert!(rel(ln_gamma(1e4).unwrap(), exact) < 1e-13);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
        assert!(ln_gamma(f64::NAN).is_err());
    }

    #[test]
    fn zeta_values() {
        assert!(rel(zeta_int(3), 1.202_056_903_159_594_2) < 1e-15);
        assert!(rel(zeta_int(4), PI.powi(4) / 90.0) < 1e-15);
        assert!(rel(zeta_int(6), PI.powi(6) / 945.0) < 1e-15);
    }
}
