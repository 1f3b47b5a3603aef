//! Schrödinger (paraboloid) coefficients `c_m`, explicit flows of the
//! Hermite and Laguerre modes, and the discretized Lens-model check.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::deficit::DiscreteDeficitModel;
use crate::error::{domain, precondition, Result};
use crate::params::SchrodParams;
use crate::quadrature::{gauss_legendre, integrate_mu_weighted, CertifiedValue, PolyGrowth};
use crate::report::{CertReport, Margin, Verdict};
use crate::specfun::{
    hermite_monic, jacobi_p_scaled, laguerre, laguerre_all_scaled, laguerre_at_zero, laguerre_scaled, lgamma, ln_binom_real,
};

/// Largest `m` for which [`cm_certificate`] also runs the quadrature route.
pub const QUAD_CROSSCHECK_MAX_M: u32 = 10;

/// The sharp Strichartz constant for the paraboloid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrichartzConstant {
    pub d: u32,
    pub value: f64,
}

/// `4^{-d/(8+4d)} (1+2/d)^{-d²/(8+4d)}`.
pub fn strichartz_constant(d: u32) -> Result<StrichartzConstant> {
    if d < 1 {
        return Err(domain("dimension must be at least 1"));
    }
    let df = d as f64;
    let den = 8.0 + 4.0 * df;
    let value = (-(df / den) * 4f64.ln() - (df * df / den) * (2.0 / df).ln_1p()).exp();
    Ok(StrichartzConstant { d, value })
}

/// `c_m = (p/2) Σ_j C(m+ν, m-j) C(m, j) (1-2/p)^{2m-2j} (2/p)^{2j}`, summed in log space.
pub fn cm_sum(params: &SchrodParams, m: u32) -> f64 {
    let p = params.p;
    let nu = params.nu;
    let a = 1.0 - 2.0 / p;
    let b = 2.0 / p;
    let ratio_ln = 2.0 * (b / a).ln();
    let mf = m as f64;
    let mut logs = Vec::with_capacity(m as usize + 1);
    let mut l = ln_binom_real(mf + nu, m) + 2.0 * mf * a.ln();
    if m <= 500 {
        l = laguerre_at_zero(m, nu).ln() + 2.0 * mf * a.ln();
    }
    logs.push(l);
    for j in 0..m {
        let jf = j as f64;
        l += ((mf - jf) / (nu + jf + 1.0)).ln() + ((mf - jf) / (jf + 1.0)).ln() + ratio_ln;
        logs.push(l);
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    let mut comp = 0.0;
    for v in &logs {
        let y = (v - top).exp() - comp;
        let t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    0.5 * p * top.exp() * s
}

/// `c_m = 2 C(2m, m) / 4^m`, the `d = 2` closed form.
pub fn cm_closed_p4(m: u32) -> f64 {
    let mut v = 2.0;
    for j in 1..=m {
        let jf = j as f64;
        v *= (m as f64 + jf) / (4.0 * jf);
    }
    v
}

/// `c_m = (p/2) Z^{-m} P_m^{(ν,0)}(X)`.
pub fn cm_jacobi(params: &SchrodParams, m: u32) -> Result<f64> {
    let (Some(z), Some(x)) = (params.z, params.x) else {
        return Err(domain("the Jacobi form is undefined at p = 4 (d = 2)"));
    };
    if m > 1000 {
        return Err(precondition(format!("m must be at most 1000, got {m}")));
    }
    Ok(0.5 * params.p * jacobi_p_scaled(m, params.nu, 0.0, x, z))
}

/// `c_m = L_m^ν(0)^{-1} (p/2) ∫ L_m^ν(2r/p)² dμ(r)` by quadrature.
pub fn cm_quad(params: &SchrodParams, m: u32, tol: f64) -> Result<CertifiedValue> {
    if m > 500 {
        return Err(precondition(format!("m must be at most 500, got {m}")));
    }
    let nu = params.nu;
    let p = params.p;
    let l0 = laguerre_at_zero(m, nu);
    let scale = 0.5 * p / l0;
    // |L_m(x)| ≤ Σ_j C(m+ν, m-j) x^j / j! ≤ B (1+x)^m with x = 2r/p ≤ r
    let b: f64 = (0..=m)
        .map(|j| (ln_binom_real(m as f64 + nu, m - j) - lgamma(j as f64 + 1.0)).exp())
        .sum();
    let growth = PolyGrowth {
        coeff: scale * b * b,
        degree: 2 * m,
    };
    let g = |r: f64| {
        let v = laguerre_scaled(m, nu, 2.0 * r / p, (-0.5 * r).exp());
        scale * v * v
    };
    integrate_mu_weighted(g, growth, nu, tol)
}

/// Per-`m` line of the coefficient certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmEntry {
    pub m: u32,
    pub cm: f64,
    pub method_spread: f64,
}

/// Certificate that `c_m < 1` on a finite range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchrodCertificate {
    pub d: u32,
    pub m_max: u32,
    pub min_gap: f64,
    pub verdict: Verdict,
    pub per_m: Vec<CmEntry>,
    pub report: CertReport,
}

/// Checks that `c_m √m` settles monotonically over the upper half of the range:
/// consecutive increments keep one sign and shrink.
pub fn decay_envelope_settles(cm: &[f64], m_max: u32) -> bool {
    let lo = (m_max / 2).max(2) as usize;
    let e: Vec<f64> = (lo..=m_max as usize).map(|m| cm[m] * (m as f64).sqrt()).collect();
    let diffs: Vec<f64> = e.windows(2).map(|w| w[1] - w[0]).collect();
    let sign_ok = diffs.iter().all(|d| *d >= 0.0) || diffs.iter().all(|d| *d <= 0.0);
    let shrink_ok = diffs
        .windows(2)
        .all(|w| w[1].abs() <= w[0].abs() * (1.0 + 1e-9) + 1e-15);
    sign_ok && shrink_ok
}

/// Verifies `c_m < 1` for `2 ≤ m ≤ m_max` together with the `m^{-1/2}` decay envelope.
pub fn cm_certificate(d: u32, m_max: u32, tol: f64) -> Result<SchrodCertificate> {
    if m_max < 2 {
        return Err(precondition("m_max must be at least 2"));
    }
    let params = SchrodParams::new(d)?;
    let cm: Vec<f64> = (0..=m_max).map(|m| cm_sum(&params, m)).collect();
    let mut per_m = Vec::with_capacity(cm.len());
    for (m, &c) in cm.iter().enumerate() {
        let m = m as u32;
        let mut alt = vec![c];
        if d == 2 {
            alt.push(cm_closed_p4(m));
        } else if m <= 1000 {
            alt.push(cm_jacobi(&params, m)?);
        }
        if m <= QUAD_CROSSCHECK_MAX_M {
            alt.push(cm_quad(&params, m, tol)?.value);
        }
        let hi = alt.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = alt.iter().cloned().fold(f64::INFINITY, f64::min);
        per_m.push(CmEntry { m, cm: c, method_spread: hi - lo });
    }

    let mut report = CertReport::new(format!("schrodinger d={d}"), Verdict::Pass);
    let mut verdicts = Vec::new();
    let mut max_c = f64::NEG_INFINITY;
    for (m, &c) in cm.iter().enumerate().skip(2) {
        max_c = max_c.max(c);
        let margin = Margin::less_than(format!("c_{m} < 1 - 1e-12"), c, 1.0 - 1e-12);
        verdicts.push(if margin.holds {
            Verdict::Pass
        } else if c > 1.0 + 1e-12 {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        });
        if m <= 10 || !margin.holds {
            report.margins.push(margin);
        }
    }
    if !decay_envelope_settles(&cm, m_max) {
        report.flags.push("c_m sqrt(m) does not settle over the upper half of the range".into());
        verdicts.push(Verdict::Inconclusive);
    }
    if let Some(m) = (3..=m_max as usize).find(|&m| cm[m] >= cm[m - 1]) {
        report.flags.push(format!("c_m not strictly decreasing at m = {m}"));
    }
    report.verdict = Verdict::all(verdicts);
    let min_gap = 1.0 - max_c;
    if report.verdict == Verdict::Pass {
        report.epsilon = Some(min_gap);
    }
    Ok(SchrodCertificate {
        d,
        m_max,
        min_gap,
        verdict: report.verdict,
        per_m,
        report,
    })
}

/// Residual of `L_m(λx)/L_m(0) = Σ_j C(m,j) (1-λ)^{m-j} λ^j L_j(x)/L_j(0)`.
pub fn laguerre_scaling_check(m: u32, nu: f64, lambda: f64, x: f64) -> Result<f64> {
    if m > 200 {
        return Err(precondition(format!("m must be at most 200, got {m}")));
    }
    let lhs = laguerre(m, nu, lambda * x) / laguerre(m, nu, 0.0);
    let mut rhs = 0.0;
    let mut binom = 1.0;
    for j in 0..=m {
        if j > 0 {
            binom *= (m - j + 1) as f64 / j as f64;
        }
        let w = binom * (1.0 - lambda).powi((m - j) as i32) * lambda.powi(j as i32);
        if w != 0.0 {
            rhs += w * laguerre(j, nu, x) / laguerre(j, nu, 0.0);
        }
    }
    Ok((lhs - rhs).abs())
}

/// `G_m(x) = L_m^ν(2π|x|²) e^{-π|x|²}` at radius `r`.
pub fn laguerre_mode(d: u32, m: u32, r: f64) -> f64 {
    let nu = d as f64 / 2.0 - 1.0;
    laguerre(m, nu, 2.0 * PI * r * r) * (-PI * r * r).exp()
}

/// `F_n(x) = Π_j H_{n_j}(√(4π) x_j) e^{-π|x|²}`.
pub fn hermite_mode(n: &[u32], x: &[f64]) -> f64 {
    let s = (4.0 * PI).sqrt();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    n.iter().zip(x).map(|(k, v)| hermite_monic(*k, s * v)).product::<f64>() * (-PI * r2).exp()
}

/// Common prefactor `(1+4πit)^{-d/2} ((1-4πit)/(1+4πit))^{q}` with `q` in half-units.
fn flow_factor(d: u32, half_q: f64, t: f64) -> (f64, f64) {
    let s = 1.0 + 16.0 * PI * PI * t * t;
    let th = (4.0 * PI * t).atan();
    let modulus = s.powf(-(d as f64) / 4.0);
    let phase = -0.5 * d as f64 * th - 2.0 * half_q * th;
    (modulus, phase)
}

/// `e^{itΔ} G_m` at radius `r`.
pub fn schrod_evolve_laguerre(d: u32, m: u32, t: f64, r: f64) -> Complex64 {
    let s = 1.0 + 16.0 * PI * PI * t * t;
    let (modulus, phase) = flow_factor(d, m as f64, t);
    let g = laguerre_mode(d, m, r / s.sqrt());
    let chirp = 4.0 * PI * PI * t * r * r / s;
    Complex64::from_polar(modulus * g, phase + chirp)
}

/// `e^{itΔ} F_n` at the point `x`.
pub fn schrod_evolve_hermite(n: &[u32], t: f64, x: &[f64]) -> Result<Complex64> {
    if n.len() != x.len() || n.is_empty() {
        return Err(domain("multi-index and point must share a positive dimension"));
    }
    let d = n.len() as u32;
    let s = 1.0 + 16.0 * PI * PI * t * t;
    let n1: u32 = n.iter().sum();
    let (modulus, phase) = flow_factor(d, 0.5 * n1 as f64, t);
    let xs: Vec<f64> = x.iter().map(|v| v / s.sqrt()).collect();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let chirp = 4.0 * PI * PI * t * r2 / s;
    Ok(Complex64::from_polar(modulus * hermite_mode(n, &xs), phase + chirp))
}

/// `|∂_t u − iΔu|` for the Laguerre flow by central differences of step `h`,
/// with the radial Laplacian `u_rr + (d-1)/r u_r`.
pub fn laguerre_flow_residual(d: u32, m: u32, t: f64, r: f64, h: f64) -> f64 {
    let u = |t: f64, r: f64| schrod_evolve_laguerre(d, m, t, r);
    let ut = (u(t + h, r) - u(t - h, r)) / (2.0 * h);
    let ur = (u(t, r + h) - u(t, r - h)) / (2.0 * h);
    let urr = (u(t, r + h) - u(t, r) * 2.0 + u(t, r - h)) / (h * h);
    let lap = urr + ur * ((d as f64 - 1.0) / r);
    (ut - Complex64::i() * lap).norm()
}

/// `|∂_t u − iΔu|` for the Hermite flow by central differences of step `h`.
pub fn hermite_flow_residual(n: &[u32], t: f64, x: &[f64], h: f64) -> Result<f64> {
    let u = |t: f64, x: &[f64]| schrod_evolve_hermite(n, t, x);
    let ut = (u(t + h, x)? - u(t - h, x)?) / (2.0 * h);
    let mut lap = Complex64::new(0.0, 0.0);
    let c = u(t, x)?;
    for k in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += h;
        xm[k] -= h;
        lap += (u(t, &xp)? - c * 2.0 + u(t, &xm)?) / (h * h);
    }
    Ok((ut - Complex64::i() * lap).norm())
}

/// Sizes of the Lens-model discretization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensGrid {
    /// Radial Gauss–Legendre nodes (in `u = √r`), rounded up to whole 16-point panels.
    pub radial: usize,
    /// Gauss–Legendre nodes in `s ∈ [-1/2, 1/2]`.
    pub time: usize,
}

impl LensGrid {
    pub fn for_modes(m_max: u32) -> Self {
        Self {
            radial: 320,
            time: 8 * m_max as usize + 16,
        }
    }
}

/// Outcome of the Lens-model second-variation check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LensCheck {
    pub d: u32,
    pub m_max: u32,
    pub gradient_norm: f64,
    pub model_scale: f64,
    /// `H_mm / (2(1-c_m) L_m(0))` for `m = 2..=m_max`.
    pub hessian_ratios: Vec<(u32, f64)>,
    pub max_offdiag: f64,
    pub diag_scale: f64,
    pub report: CertReport,
}

/// Builds the Lens-model deficit for radial data and compares its variations at the
/// Gaussian with the mode formula `2(1-c_m) L_m(0)`.
pub fn build_lens_model(d: u32, m_max: u32, grid: LensGrid, tol: f64) -> Result<DiscreteDeficitModel> {
    if m_max > 40 {
        return Err(precondition(format!("m_max must be at most 40, got {m_max}")));
    }
    if grid.radial == 0 || grid.time == 0 {
        return Err(domain("grid sizes must be positive"));
    }
    let params = SchrodParams::new(d)?;
    let (nu, p) = (params.nu, params.p);
    let n = m_max as usize + 1;

    // truncate where r^{ν + p m_max} e^{-r} is below tol
    let k = nu + p * m_max as f64 + 1.0;
    let mut r_max = (2.0 * k).max(8.0);
    while (k - 1.0) * r_max.ln() - r_max - lgamma(nu + 1.0) > tol.ln() {
        r_max *= 1.1;
    }
    let u_max = r_max.sqrt();
    let panels = grid.radial.div_ceil(16);
    let (gx, gw) = gauss_legendre(16);
    let mut rs = Vec::new();
    let mut rw = Vec::new();
    let norm = (-lgamma(nu + 1.0)).exp();
    let hp = u_max / panels as f64;
    for i in 0..panels {
        let a = i as f64 * hp;
        for (x, w) in gx.iter().zip(&gw) {
            let u = a + 0.5 * hp * (x + 1.0);
            // r = u², r^ν e^{-r} dr / Γ(ν+1) = 2 u^{2ν+1} e^{-u²} du / Γ(ν+1)
            rs.push(u * u);
            rw.push(0.5 * hp * w * 2.0 * norm * u.powf(2.0 * nu + 1.0) * (-u * u).exp());
        }
    }
    let (sx, sw) = gauss_legendre(grid.time);
    let ss: Vec<f64> = sx.iter().map(|x| 0.5 * x).collect();
    let sws: Vec<f64> = sw.iter().map(|w| 0.5 * w).collect();

    let mut operator = Vec::with_capacity(rs.len() * ss.len() * n);
    let mut weights = Vec::with_capacity(rs.len() * ss.len());
    for (r, wr) in rs.iter().zip(&rw) {
        let lag = laguerre_all_scaled(m_max, nu, 2.0 * r / p, 1.0);
        for (s, ws) in ss.iter().zip(&sws) {
            weights.push(wr * ws);
            for (m, l) in lag.iter().enumerate() {
                operator.push(Complex64::from_polar(*l, -2.0 * PI * m as f64 * s));
            }
        }
    }
    // drop grid points whose weight underflowed
    let keep: Vec<usize> = (0..weights.len()).filter(|&j| weights[j] > 0.0).collect();
    let weights: Vec<f64> = keep.iter().map(|&j| weights[j]).collect();
    let operator: Vec<Complex64> = keep
        .iter()
        .flat_map(|&j| operator[j * n..(j + 1) * n].iter().copied())
        .collect();
    let metric: Vec<f64> = (0..=m_max).map(|m| laguerre_at_zero(m, nu)).collect();
    let mut f_star = vec![Complex64::new(0.0, 0.0); n];
    f_star[0] = Complex64::new(1.0, 0.0);
    DiscreteDeficitModel::new(metric, operator, weights, p, f_star)
}

/// Gradient at the Gaussian and Hessian on modes `m ≥ 2` of the Lens model.
pub fn lens_model_check(d: u32, m_max: u32, grid: LensGrid, tol: f64) -> Result<LensCheck> {
    if m_max < 2 {
        return Err(precondition("m_max must be at least 2"));
    }
    let params = SchrodParams::new(d)?;
    let model = build_lens_model(d, m_max, grid, tol)?;
    let fs = model.f_star().to_vec();
    let var = model.variation_report(&fs)?;
    let model_scale = model.c_star_sq() * model.metric().iter().cloned().fold(0.0, f64::max);
    let h = model.hessian_matrix(&fs)?;
    let n = model.dim();

    let mut ratios = Vec::new();
    let mut diag_scale = 0.0_f64;
    for m in 2..=m_max {
        let idx = m as usize;
        let want = 2.0 * (1.0 - cm_sum(&params, m)) * laguerre_at_zero(m, params.nu);
        let got = h.get(idx, idx);
        diag_scale = diag_scale.max(got.abs());
        ratios.push((m, got / want));
    }
    let mut max_off = 0.0_f64;
    for a in 0..2 * n {
        for b in 0..2 * n {
            let (ma, mb) = (a % n, b % n);
            if a == b || ma < 2 || mb < 2 {
                continue;
            }
            max_off = max_off.max(h.get(a, b).abs());
        }
    }

    let mut report = CertReport::new(format!("lens model d={d}"), Verdict::Pass);
    report.margins.push(Margin::less_than(
        "gradient norm < 1e-6 model scale",
        var.gradient_norm(),
        1e-6 * model_scale,
    ));
    for (m, r) in &ratios {
        report.margins.push(Margin::less_than(
            format!("|H_{m}{m} ratio - 1| < 1e-3"),
            (r - 1.0).abs(),
            1e-3,
        ));
    }
    report.margins.push(Margin::less_than(
        "off-diagonal < 1e-6 diagonal scale",
        max_off,
        1e-6 * diag_scale,
    ));
    report.verdict = if report.margins.iter().all(|m| m.holds) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(LensCheck {
        d,
        m_max,
        gradient_norm: var.gradient_norm(),
        model_scale,
        hessian_ratios: ratios,
        max_offdiag: max_off,
        diag_scale,
        report,
    })
}
