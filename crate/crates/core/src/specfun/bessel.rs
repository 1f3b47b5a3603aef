//! Bessel functions of the first kind at integer and half-integer order.
//!
//! Orders are carried internally as `2ν` so that the integer and
//! half-integer families stay exact.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{domain, Result};

/// Largest supported order.
pub const MAX_ORDER: f64 = 64.0;
/// Largest supported argument.
pub const MAX_ARG: f64 = 1e4;

const HANKEL_MIN_X: f64 = 25.0;
const RESCALE: f64 = 1e250;

/// Validates an order and returns `2ν`.
pub(crate) fn twice_order(order: f64) -> Result<u32> {
    let t = 2.0 * order;
    if !(0.0..=2.0 * MAX_ORDER).contains(&t) || t.fract() != 0.0 {
        return Err(domain(format!(
            "Bessel order must be an integer or half-integer in [0, {MAX_ORDER}], got {order}"
        )));
    }
    Ok(t as u32)
}

fn check_arg(x: f64) -> Result<()> {
    if !(0.0..=MAX_ARG).contains(&x) {
        return Err(domain(format!("Bessel argument must lie in [0, {MAX_ARG}], got {x}")));
    }
    Ok(())
}

/// `J_ν(x)`.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    let two_nu = twice_order(order)?;
    check_arg(x)?;
    Ok(j_unchecked(two_nu, x))
}

/// `A_ν(x) = J_ν(x) / x^ν`, continuous at the origin.
pub fn bessel_a(order: f64, x: f64) -> Result<f64> {
    let two_nu = twice_order(order)?;
    check_arg(x)?;
    Ok(a_unchecked(two_nu, x))
}

/// Radial profile `(2π)^{d/2} A_{d/2-1}(r)` of the Fourier transform of surface measure on `S^{d-1}`.
pub fn sigma_hat(d: u32, r: f64) -> Result<f64> {
    if d < 2 {
        return Err(domain(format!("sigma_hat needs d >= 2, got {d}")));
    }
    let a = bessel_a(d as f64 / 2.0 - 1.0, r)?;
    Ok((2.0 * PI).powf(d as f64 / 2.0) * a)
}

pub(crate) fn j_unchecked(two_nu: u32, x: f64) -> f64 {
    let nu = two_nu as f64 / 2.0;
    if x == 0.0 {
        return if two_nu == 0 { 1.0 } else { 0.0 };
    }
    if x * x <= 4.0 * (nu + 1.0) {
        return (0.5 * x).powf(nu) * series(two_nu, x);
    }
    if two_nu % 2 == 0 {
        j_integer(two_nu / 2, x)
    } else {
        j_half(two_nu, x)
    }
}

pub(crate) fn a_unchecked(two_nu: u32, x: f64) -> f64 {
    let nu = two_nu as f64 / 2.0;
    if x * x <= 4.0 * (nu + 1.0) {
        return 0.5_f64.powf(nu) * series(two_nu, x);
    }
    j_unchecked(two_nu, x) / x.powf(nu)
}

/// `1 / Γ(ν + 1)` by exact products.
fn inv_gamma_nu1(two_nu: u32) -> f64 {
    let mut g = 1.0;
    if two_nu % 2 == 0 {
        for j in 2..=two_nu / 2 {
            g *= j as f64;
        }
    } else {
        g = PI.sqrt();
        for j in 0..=two_nu / 2 {
            g *= j as f64 + 0.5;
        }
    }
    1.0 / g
}

/// `Σ_m (-x²/4)^m / (m! Γ(ν+m+1))`.
fn series(two_nu: u32, x: f64) -> f64 {
    let nu = two_nu as f64 / 2.0;
    let y = -0.25 * x * x;
    let mut term = inv_gamma_nu1(two_nu);
    let mut sum = term;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= y / (m * (nu + m));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || term == 0.0 {
            break;
        }
    }
    sum
}

fn start_index(order: f64, x: f64) -> u32 {
    let m = order.max(x).ceil();
    let top = m + 16.0 + (40.0 * m).sqrt();
    let top = top as u32;
    top + top % 2
}

fn j_integer(n: u32, x: f64) -> f64 {
    if x < HANKEL_MIN_X || n as f64 >= x {
        return miller_integer(n, x);
    }
    let mut jm = hankel(0.0, x);
    if n == 0 {
        return jm;
    }
    let mut j = hankel(1.0, x);
    for k in 1..n {
        let jp = 2.0 * k as f64 / x * j - jm;
        jm = j;
        j = jp;
    }
    j
}

// Downward recurrence normalized by J_0 + 2 Σ J_{2k} = 1.
fn miller_integer(n: u32, x: f64) -> f64 {
    let top = start_index(n as f64, x);
    let mut above = 0.0;
    let mut cur = 1e-30;
    let mut sum = 0.0;
    let mut saved = if n == top { cur } else { 0.0 };
    for k in (1..=top).rev() {
        let below = 2.0 * k as f64 / x * cur - above;
        above = cur;
        cur = below;
        let idx = k - 1;
        if idx == n {
            saved = cur;
        }
        if idx > 0 && idx % 2 == 0 {
            sum += 2.0 * cur;
        }
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            above /= RESCALE;
            sum /= RESCALE;
            saved /= RESCALE;
        }
    }
    sum += cur;
    saved / sum
}

fn j_half(two_nu: u32, x: f64) -> f64 {
    let nu = two_nu as f64 / 2.0;
    let c = (2.0 / (PI * x)).sqrt();
    let (s, co) = x.sin_cos();
    let j_mhalf = c * co;
    let j_half = c * s;
    let target = (two_nu / 2) as i64; // μ = target + 1/2
    if nu <= x {
        let mut jm = j_mhalf;
        let mut j = j_half;
        for i in 0..target {
            let mu = i as f64 + 0.5;
            let jp = 2.0 * mu / x * j - jm;
            jm = j;
            j = jp;
        }
        return j;
    }
    let top = start_index(nu, x) as i64;
    let mut above = 0.0;
    let mut cur = 1e-30;
    let mut saved = 0.0;
    let mut at_half = 0.0;
    for i in (0..=top).rev() {
        // cur = J_{i+1/2}
        if i == target {
            saved = cur;
        }
        if i == 0 {
            at_half = cur;
        }
        let mu = i as f64 + 0.5;
        let below = 2.0 * mu / x * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            above /= RESCALE;
            saved /= RESCALE;
            at_half /= RESCALE;
        }
    }
    // cur = J_{-1/2}
    if s.abs() >= co.abs() {
        saved * (j_half / at_half)
    } else {
        saved * (j_mhalf / cur)
    }
}

/// Hankel asymptotic expansion, used for ν ∈ {0, 1} and x ≥ 25.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu - odd * odd) / (kf * 8.0 * x);
        if a.abs() >= prev || a == 0.0 {
            break;
        }
        prev = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let phase = (0.5 * nu) * PI + FRAC_PI_4;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let chi_cos = cx * cp + sx * sp;
    let chi_sin = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * chi_cos - q * chi_sin)
}

/// Positive zeros of `J_ν` in `(0, r_max)`, increasing.
pub fn bessel_j_zeros(order: f64, r_max: f64) -> Result<Vec<f64>> {
    let two_nu = twice_order(order)?;
    check_arg(r_max)?;
    Ok(zeros_unchecked(two_nu, r_max))
}

pub(crate) fn zeros_unchecked(two_nu: u32, r_max: f64) -> Vec<f64> {
    const STEP: f64 = 0.5;
    let nu = two_nu as f64 / 2.0;
    let mut out = Vec::new();
    let mut a = nu.max(STEP);
    let mut fa = j_unchecked(two_nu, a);
    while a < r_max {
        let b = (a + STEP).min(r_max);
        let fb = j_unchecked(two_nu, b);
        if fb == 0.0 && b < r_max {
            out.push(b);
        } else if fa != 0.0 && fa.signum() != fb.signum() {
            out.push(illinois(|t| j_unchecked(two_nu, t), a, b, fa, fb));
        }
        a = b;
        fa = fb;
    }
    out
}

/// Bracketed root refinement by the Illinois variant of regula falsi.
pub(crate) fn illinois(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> f64 {
    let mut side = 0;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        if (b - a).abs() <= 4.0 * f64::EPSILON * c.abs() {
            return c;
        }
        let fc = f(c);
        if fc == 0.0 {
            return c;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_a(0.0, 0.0).unwrap(), 1.0);
        assert!((bessel_a(1.0, 0.0).unwrap() - 0.5).abs() < 1e-16);
    }

    #[test]
    fn closed_form_half_order() {
        let v = bessel_j(0.5, PI / 2.0).unwrap();
        assert!((v - 2.0 / PI).abs() < 1e-15);
        assert!(bessel_a(0.5, PI).unwrap().abs() < 1e-15);
    }

    #[test]
    fn reference_values() {
        // J_0(1), J_1(1), J_0(30), J_5(10), J_10(1), J_30(50)
        let cases = [
            (0.0, 1.0, 0.765_197_686_557_966_6),
            (1.0, 1.0, 0.440_050_585_744_933_5),
            (0.0, 30.0, -0.086_367_983_581_040_22),
            (5.0, 10.0, -0.234_061_528_186_793_6),
            (10.0, 1.0, 2.630_615_123_687_453e-10),
            (1.0, 100.0, -0.077_145_352_014_112_16),
        ];
        for (n, x, want) in cases {
            let got = bessel_j(n, x).unwrap();
            assert!((got - want).abs() < 1e-14, "J_{n}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn integer_paths_agree() {
        // Miller and Hankel-plus-upward overlap for n < x in [25, 60]
        for n in [0u32, 1, 3, 10, 20] {
            for x in [25.5, 31.0, 47.3, 59.9] {
                let m = miller_integer(n, x);
                let h = j_integer(n, x);
                assert!((m - h).abs() < 1e-13, "n={n} x={x}: {m} vs {h}");
            }
        }
    }

    #[test]
    fn high_precision_battery() {
        // (order, x, J) from 40-digit reference evaluations
        let cases = [
            (0.5, 19.0, 0.027_434_614_372_855_06),
            (1.5, 6.0, -0.327_930_310_861_788_2),
            (4.5, 12.5, 0.157_316_493_034_311_64),
            (10.5, 19.0, -0.004_325_984_862_071_022),
            (20.5, 25.0, 0.113_698_835_094_925_14),
            (20.5, 12.0, 0.000_141_331_611_631_545_78),
            (40.5, 30.0, 0.000_238_381_059_806_245_18),
            (63.5, 50.0, 9.228_243_475_874_597e-5),
            (63.5, 2000.0, -0.017_536_493_542_385_432),
            (0.0, 1000.0, 0.024_786_686_152_420_176),
            (3.0, 2500.5, 0.013_351_965_765_610_173),
            (64.0, 80.0, 0.111_128_330_937_962_54),
            (64.0, 9999.0, -0.002_364_077_096_668_361_7),
            (29.0, 2000.0, 0.017_490_302_326_550_71),
            (40.0, 45.0, 0.126_600_621_268_202),
            (30.0, 27.0, 0.040_959_226_624_219_22),
            (2.0, 25.0001, -0.106_306_487_357_452_86),
            (7.0, 24.9, 0.005_471_314_245_286_767),
        ];
        for (nu, x, want) in cases {
            let got = bessel_j(nu, x).unwrap();
            assert!((got - want).abs() < 1e-12, "J_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn envelope_enforced() {
        assert!(bessel_j(0.3, 1.0).is_err());
        assert!(bessel_j(65.0, 1.0).is_err());
        assert!(bessel_j(1.0, 1e4 + 1.0).is_err());
        assert!(bessel_j(1.0, -1.0).is_err());
    }

    #[test]
    fn zeros_of_j0() {
        let z = bessel_j_zeros(0.0, 12.0).unwrap();
        let want = [2.404_825_557_695_773, 5.520_078_110_286_311, 8.653_727_912_911_013, 11.791_534_439_014_28];
        assert_eq!(z.len(), want.len());
        for (a, b) in z.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_hat_three_dimensions() {
        assert!((sigma_hat(3, 0.0).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!(sigma_hat(3, PI).unwrap().abs() < 1e-14);
        let r = 2.7;
        assert!((sigma_hat(2, r).unwrap() - 2.0 * PI * bessel_j(0.0, r).unwrap()).abs() < 1e-14);
    }
}
