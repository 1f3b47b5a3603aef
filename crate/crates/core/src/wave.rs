//! Wave (cone) constants: cosine Fourier coefficients, time normalization,
//! the `C(h)` scan, per-mode coercivity ratios and the audit that puts the
//! two readings of `C(1)` side by side.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Result};
use crate::params::WaveParams;
use crate::quadrature::{integrate_with, QuadOptions};
use crate::report::{CertReport, CoeffTable, CsvRecord, Margin, Verdict};
use crate::specfun::{lgamma, sph_harm_count};

/// `|S^n| = 2π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_area(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(domain("sphere dimension must be at least 1"));
    }
    Ok(crate::sphere::sphere_area(n))
}

/// `√(2/(d-1)) π^{1/p} |S^d|^{1/p - 1/2}` for odd `d ≥ 3`.
pub fn c_star(d: u32) -> Result<f64> {
    if d < 3 || d % 2 == 0 {
        return Err(domain(format!("c_star needs an odd d >= 3, got {d}")));
    }
    let p = WaveParams::new(d)?.p;
    let area = sphere_area(d)?;
    Ok((2.0 / (d as f64 - 1.0)).sqrt() * PI.powf(1.0 / p) * area.powf(1.0 / p - 0.5))
}

/// `∫_{-π}^{π} |cos(νT)|^p dT = 2√π Γ((p+1)/2) / Γ((p+2)/2)` for `2ν` a positive integer.
pub fn time_normalization_exponent(p: f64) -> f64 {
    2.0 * PI.sqrt() * (lgamma(0.5 * (p + 1.0)) - lgamma(0.5 * (p + 2.0))).exp()
}

pub fn time_normalization(params: &WaveParams) -> f64 {
    time_normalization_exponent(params.p)
}

/// The same integral by adaptive quadrature, split at the zeros of `cos(νT)`.
pub fn time_normalization_quad(params: &WaveParams, tol: f64) -> Result<f64> {
    let (p, nu) = (params.p, params.nu_d);
    let breaks = cosine_breaks(nu);
    let q = integrate_with(|t| (nu * t).cos().abs().powf(p), &breaks, &QuadOptions::with_tol(tol))?;
    Ok(q.value)
}

fn cosine_breaks(nu: f64) -> Vec<f64> {
    let mut b = vec![-PI];
    let step = PI / nu;
    let mut t = -PI + 0.5 * step;
    while t < PI - 1e-12 {
        if t > -PI + 1e-12 {
            b.push(t);
        }
        t += step;
    }
    b.push(PI);
    b
}

/// `Γ(α+1)² / (Γ(α+1+h) Γ(α+1-h))` as a product; exactly 0 past a pole.
fn signed_shifted_ratio(alpha: f64, h: u32) -> f64 {
    let mut v = 1.0;
    for j in 1..=h {
        let jf = j as f64;
        v *= (alpha + 1.0 - jf) / (alpha + jf);
    }
    v
}

/// Coefficient `a_h` of `|cos(βT)|^{2α} = a_0 + Σ_{h≥1} a_h cos(2hβT)`.
pub fn cosine_coeff(alpha: f64, h: u32) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(domain(format!("alpha must be positive, got {alpha}")));
    }
    let a0 = (lgamma(alpha + 0.5) - lgamma(alpha + 1.0)).exp() / PI.sqrt();
    Ok(if h == 0 {
        a0
    } else {
        2.0 * a0 * signed_shifted_ratio(alpha, h)
    })
}

/// Sup over `grid` of the truncation error of the cosine series at order `h_max`.
pub fn fourier_series_residual(alpha: f64, beta: f64, h_max: u32, grid: &[f64]) -> Result<f64> {
    if h_max > 10_000 {
        return Err(precondition(format!("truncation must be at most 10^4, got {h_max}")));
    }
    let coeffs: Vec<f64> = (0..=h_max).map(|h| cosine_coeff(alpha, h)).collect::<Result<_>>()?;
    Ok(grid
        .iter()
        .map(|&t| {
            let s: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(h, a)| a * (2.0 * h as f64 * beta * t).cos())
                .sum();
            (s - (beta * t).cos().abs().powf(2.0 * alpha)).abs()
        })
        .fold(0.0, f64::max))
}

/// `Γ(α)² / (Γ(α+h) Γ(α-h))` with signs, through the rising factorial
/// `Γ(α)/Γ(α-h) = (α-h)_h`. Exactly 0 when `α` is an integer `≤ h`.
pub fn signed_gamma_ratio(alpha: f64, h: u32) -> f64 {
    let mut v = 1.0;
    for j in 0..h {
        let jf = j as f64;
        v *= (alpha - 1.0 - jf) / (alpha + jf);
    }
    v
}

/// `|Γ(α)² / (Γ(α+h) Γ(α-h))|`.
pub fn abs_gamma_ratio(alpha: f64, h: u32) -> Result<f64> {
    if h < 1 {
        return Err(domain("h must be at least 1"));
    }
    if !(alpha > 0.0) {
        return Err(domain(format!("alpha must be positive, got {alpha}")));
    }
    Ok(signed_gamma_ratio(alpha, h).abs())
}

/// `|(p-1) Γ((p+2)/2) Γ((p-1)/2) / (Γ((p+1)/2) Γ(p/2)) - p|`.
pub fn gamma_identity_residual(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(domain(format!("p must exceed 1, got {p}")));
    }
    let l = lgamma(0.5 * (p + 2.0)) + lgamma(0.5 * (p - 1.0)) - lgamma(0.5 * (p + 1.0)) - lgamma(0.5 * p);
    Ok(((p - 1.0) * l.exp() - p).abs())
}

/// `C(h) = p + p |Γ(p/2)² / (Γ(p/2+h) Γ(p/2-h))|`.
pub fn c_of_h(params: &WaveParams, h: u32) -> Result<f64> {
    Ok(params.p + params.p * abs_gamma_ratio(params.alpha, h)?)
}

/// Result of scanning `C(h)` over `1 ≤ h ≤ h_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CSharpScan {
    pub argmax_h: u32,
    pub max_value: f64,
    /// `C(1)` evaluated directly, equal to `2p - 2`.
    pub c_one_scanned: f64,
    /// The closed value `p + (p-2)/p` attributed to `h = 1`.
    pub c_one_closed: f64,
    pub strictly_decreasing: bool,
}

pub fn c_sharp_scan(params: &WaveParams, h_max: u32) -> Result<CSharpScan> {
    if h_max < 2 {
        return Err(precondition("h_max must be at least 2"));
    }
    let vals: Vec<f64> = (1..=h_max).map(|h| c_of_h(params, h)).collect::<Result<_>>()?;
    let (mut argmax, mut best) = (1, vals[0]);
    for (i, &v) in vals.iter().enumerate() {
        if v > best {
            best = v;
            argmax = i as u32 + 1;
        }
    }
    let p = params.p;
    Ok(CSharpScan {
        argmax_h: argmax,
        max_value: best,
        c_one_scanned: vals[0],
        c_one_closed: p + (p - 2.0) / p,
        strictly_decreasing: vals.windows(2).all(|w| w[1] < w[0]),
    })
}

/// True iff `|g(α, h+1)| < |g(α, h)|` for `1 ≤ h < h_max`, where `g(α, h) = Γ(h-α+1)/Γ(α+h)`.
pub fn g_monotone_check(alpha: f64, h_max: u32) -> Result<bool> {
    if !(alpha > 0.5) {
        return Err(precondition(format!("alpha must exceed 1/2, got {alpha}")));
    }
    for h in 1..h_max {
        let top = h as f64 + 1.0 - alpha;
        if top <= 0.0 && top.fract() == 0.0 {
            return Ok(false);
        }
        // g(α, h+1) / g(α, h) = (h+1-α) / (α+h)
        if (top / (alpha + h as f64)).abs() >= 1.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Per-mode ratio `[p + p |Γ-ratio(ℓ/ν)| 1{ν | ℓ}] ν / (ℓ + ν)` for `ℓ ≥ 2`.
pub fn mode_ratio(params: &WaveParams, ell: u32) -> Result<f64> {
    if ell < 2 {
        return Err(precondition("mode index must be at least 2"));
    }
    let nu = params.nu_d;
    let two_nu = (2.0 * nu).round() as u32;
    let two_ell = 2 * ell;
    let cross = if two_ell % two_nu == 0 {
        params.p * abs_gamma_ratio(params.alpha, two_ell / two_nu)?
    } else {
        0.0
    };
    Ok((params.p + cross) * nu / (ell as f64 + nu))
}

/// The ratio `C ν/(ℓ+ν)` with every mode bounded by the closed value `C = p + (p-2)/p`.
pub fn mode_ratio_closed(params: &WaveParams, ell: u32) -> Result<f64> {
    if ell < 2 {
        return Err(precondition("mode index must be at least 2"));
    }
    let p = params.p;
    let nu = params.nu_d;
    Ok((p + (p - 2.0) / p) * nu / (ell as f64 + nu))
}

/// `p ν / (ℓ + ν)`, the per-mode ratio of the half-wave deficit.
pub fn half_wave_mode_ratio(params: &WaveParams, ell: u32) -> Result<f64> {
    if ell < 2 {
        return Err(precondition("mode index must be at least 2"));
    }
    Ok(params.p * params.nu_d / (ell as f64 + params.nu_d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveModeRow {
    pub d: u32,
    pub ell: u32,
    pub ratio: f64,
    pub rho_implied: f64,
}

impl CsvRecord for WaveModeRow {
    fn header() -> &'static [&'static str] {
        &["d", "ell", "ratio", "rho_implied"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            self.d.to_string(),
            self.ell.to_string(),
            format!("{:.15}", self.ratio),
            format!("{:.15}", self.rho_implied),
        ]
    }
}

/// Rows `ℓ = 2..=ℓ_max` of per-mode ratios with `ρ = 2 - ratio`.
pub fn mode_coercivity_table(params: &WaveParams, ell_max: u32) -> Result<CoeffTable<WaveModeRow>> {
    if ell_max < 2 {
        return Err(precondition("ell_max must be at least 2"));
    }
    let rows = (2..=ell_max)
        .into_par_iter()
        .map(|ell| {
            let ratio = mode_ratio(params, ell)?;
            Ok(WaveModeRow {
                d: params.d,
                ell,
                ratio,
                rho_implied: 2.0 - ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoeffTable::new(format!("wave_modes_d{}", params.d), rows))
}

/// Residuals of the two normalized orthogonality integrals, by quadrature.
pub fn orthog_formula_check(z: Complex64, ell: u32, h: u32, params: &WaveParams, tol: f64) -> Result<(f64, f64)> {
    if ell < 1 || h < 1 {
        return Err(precondition("ell and h must be at least 1"));
    }
    let (p, nu) = (params.p, params.nu_d);
    let norm = 1.0 / time_normalization(params);
    let opts = QuadOptions::with_tol(tol);
    let re2 = |t: f64| {
        let v = (z * Complex64::from_polar(1.0, t * ell as f64)).re;
        v * v
    };
    let breaks: Vec<f64> = (0..=16).map(|i| -PI + i as f64 * PI / 8.0).collect();
    let i1 = norm * integrate_with(re2, &breaks, &opts)?.value;
    let i2 = norm * integrate_with(|t| (2.0 * h as f64 * nu * t).cos() * re2(t), &breaks, &opts)?.value;
    let k = PI.sqrt() * (lgamma(0.5 * (p + 2.0)) - lgamma(0.5 * (p + 1.0))).exp();
    let want1 = 0.5 * k * z.norm_sqr();
    let hits = (2 * ell) as f64 == (2.0 * h as f64 * nu).round() && (2.0 * nu).fract() == 0.0;
    let want2 = if hits { 0.25 * k * (z * z).re } else { 0.0 };
    Ok(((i1 - want1).abs(), (i2 - want2).abs()))
}

/// Real dimension `2(d+2)` of the tangent space of the optimizer orbit.
pub fn tangent_dim(d: u32) -> Result<u32> {
    if d < 2 {
        return Err(domain("dimension must be at least 2"));
    }
    let counted = 2 * (sph_harm_count(d, 0)? + sph_harm_count(d, 1)?);
    let closed = 2 * (d + 2);
    debug_assert_eq!(counted, closed as u128);
    Ok(closed)
}

/// Both readings of the `h = 1` constant, reported without reconciliation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CSharpDiscrepancy {
    /// `p + p (p-2)/p`, i.e. the max-over-`h` display evaluated at `h = 1`.
    pub c_sharp_h1: f64,
    /// `p + (p-2)/p`, the stated closed value.
    pub c_h_one: f64,
    pub difference: f64,
    pub rho_from_c_sharp: f64,
    pub rho_from_c_h_one: f64,
    pub rho_claimed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveAudit {
    pub schema: u32,
    pub d: u32,
    pub p: f64,
    pub nu_d: f64,
    pub c_star: Option<f64>,
    pub time_normalization: f64,
    pub time_normalization_quad: f64,
    pub gamma_identity_residual: f64,
    pub c_sharp: CSharpScan,
    pub sup_ratio: f64,
    pub sup_ell: u32,
    pub rho: f64,
    pub half_wave_sup: f64,
    pub tangent_dim: u32,
    pub discrepancy: CSharpDiscrepancy,
    pub modes: Vec<WaveModeRow>,
    pub report: CertReport,
}

/// Computes every wave-side constant for dimension `d`.
///
/// `d = 3` passes when the per-mode sup is `4/3`. For odd `d ≥ 5` the two readings of
/// `C(1)` lead to different `ρ`, and the verdict is inconclusive. Even `d` is reported
/// but never certified.
pub fn wave_audit(d: u32, ell_max: u32, h_max: u32, tol: f64) -> Result<WaveAudit> {
    let params = WaveParams::new(d)?;
    let p = params.p;
    let nu = params.nu_d;
    let table = mode_coercivity_table(&params, ell_max)?;
    let (mut sup_ell, mut sup_ratio) = (2, f64::NEG_INFINITY);
    for r in &table.rows {
        if r.ratio > sup_ratio {
            sup_ratio = r.ratio;
            sup_ell = r.ell;
        }
    }
    let scan = c_sharp_scan(&params, h_max)?;
    let tn = time_normalization(&params);
    let tn_quad = time_normalization_quad(&params, tol)?;
    let gres = gamma_identity_residual(p)?;

    // the uniform bound decreases in ℓ, so its sup sits at ℓ = 2
    let closed_sup = mode_ratio_closed(&params, 2)?;
    let discrepancy = CSharpDiscrepancy {
        c_sharp_h1: scan.c_one_scanned,
        c_h_one: scan.c_one_closed,
        difference: scan.c_one_scanned - scan.c_one_closed,
        rho_from_c_sharp: 2.0 - sup_ratio,
        rho_from_c_h_one: 2.0 - closed_sup,
        rho_claimed: if d == 3 { 2.0 / 3.0 } else { 1.0 / (nu + 1.0) },
    };

    let mut report = CertReport::new(format!("wave d={d}"), Verdict::Inconclusive);
    report
        .margins
        .push(Margin::less_than("gamma identity residual < 1e-12", gres, 1e-12));
    report.margins.push(Margin::less_than(
        "time normalization quadrature gap < 1e-9",
        (tn - tn_quad).abs(),
        1e-9,
    ));
    let base_ok = report.margins.iter().all(|m| m.holds);
    report.verdict = if d == 3 {
        let m = Margin::less_than("|sup ratio - 4/3| < 1e-12", (sup_ratio - 4.0 / 3.0).abs(), 1e-12);
        let ok = m.holds && base_ok;
        report.margins.push(m);
        if ok {
            report.epsilon = Some(2.0 - sup_ratio);
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    } else if d % 2 == 0 {
        report
            .flags
            .push("even dimension: the symmetric-region identity is unavailable, values reported only".into());
        if base_ok {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    } else {
        report.flags.push(format!(
            "C(1) readings disagree: direct {} vs closed {}; rho {} vs {}",
            discrepancy.c_sharp_h1, discrepancy.c_h_one, discrepancy.rho_from_c_sharp, discrepancy.rho_from_c_h_one
        ));
        if scan.argmax_h != 1 {
            report.flags.push(format!("C(h) maximized at h = {}", scan.argmax_h));
        }
        if base_ok {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        }
    };

    Ok(WaveAudit {
        schema: 1,
        d,
        p,
        nu_d: nu,
        c_star: if d % 2 == 1 { Some(c_star(d)?) } else { None },
        time_normalization: tn,
        time_normalization_quad: tn_quad,
        gamma_identity_residual: gres,
        c_sharp: scan,
        sup_ratio,
        sup_ell,
        rho: 2.0 - sup_ratio,
        half_wave_sup: half_wave_mode_ratio(&params, 2)?,
        tangent_dim: tangent_dim(d)?,
        discrepancy,
        modes: table.rows,
        report,
    })
}
