//! Penrose compactification of the radial `(t, r)` half-plane.

use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::report::{CertReport, Margin, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiRadialPoint {
    pub t: f64,
    pub r: f64,
}

impl MinkowskiRadialPoint {
    pub fn new(t: f64, r: f64) -> Result<Self> {
        if !(r >= 0.0) || !t.is_finite() || !r.is_finite() {
            return Err(domain(format!("need finite t and r >= 0, got ({t}, {r})")));
        }
        Ok(Self { t, r })
    }
}

/// A point `(T, R)` of the open triangle `|T| + R < π`, `R ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactifiedPoint {
    #[serde(rename = "T")]
    pub big_t: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl CompactifiedPoint {
    pub fn new(big_t: f64, big_r: f64) -> Result<Self> {
        let p = Self { big_t, big_r };
        if !p.in_triangle() {
            return Err(domain(format!("({big_t}, {big_r}) lies outside |T| + R < pi, R >= 0")));
        }
        Ok(p)
    }

    pub fn in_triangle(&self) -> bool {
        self.big_r >= 0.0 && self.big_t.abs() + self.big_r < PI
    }
}

/// `T = atan(t+r) + atan(t-r)`, `R = atan(t+r) - atan(t-r)`.
pub fn penrose_forward(pt: MinkowskiRadialPoint) -> CompactifiedPoint {
    let a = (pt.t + pt.r).atan();
    let b = (pt.t - pt.r).atan();
    CompactifiedPoint {
        big_t: a + b,
        big_r: a - b,
    }
}

/// `t ± r = tan((T ± R)/2)`.
pub fn penrose_inverse(pt: CompactifiedPoint) -> Result<MinkowskiRadialPoint> {
    if !pt.in_triangle() {
        return Err(domain(format!(
            "({}, {}) lies outside the image triangle",
            pt.big_t, pt.big_r
        )));
    }
    let u = (0.5 * (pt.big_t + pt.big_r)).tan();
    let v = (0.5 * (pt.big_t - pt.big_r)).tan();
    Ok(MinkowskiRadialPoint {
        t: 0.5 * (u + v),
        r: (0.5 * (u - v)).max(0.0),
    })
}

/// `Ω = cos T + cos R`.
pub fn omega(pt: CompactifiedPoint) -> f64 {
    pt.big_t.cos() + pt.big_r.cos()
}

/// `Ω₀ = 1 + cos R`.
pub fn omega0(big_r: f64) -> f64 {
    1.0 + big_r.cos()
}

/// `|Ω₀(R(0, r)) - 2/(1+r²)|`.
pub fn omega0_identity_residual(r: f64) -> f64 {
    let big_r = penrose_forward(MinkowskiRadialPoint { t: 0.0, r }).big_r;
    (omega0(big_r) - 2.0 / (1.0 + r * r)).abs()
}

/// Max-entry deviation of `Jᵀ diag(1,-1) J` from `Ω² diag(1,-1)`, where `J` is the
/// central-difference Jacobian of `(t, r) ↦ (T, R)` with step `h`.
pub fn conformal_fd_residual(pt: MinkowskiRadialPoint, h: f64) -> Result<f64> {
    if !(h > 0.0) || pt.r < h {
        return Err(domain("need h > 0 and a point at least h away from the axis"));
    }
    let f = |t: f64, r: f64| penrose_forward(MinkowskiRadialPoint { t, r });
    let (tp, tm) = (f(pt.t + h, pt.r), f(pt.t - h, pt.r));
    let (rp, rm) = (f(pt.t, pt.r + h), f(pt.t, pt.r - h));
    // columns: ∂/∂t, ∂/∂r; rows: T, R
    let j = [
        [(tp.big_t - tm.big_t) / (2.0 * h), (rp.big_t - rm.big_t) / (2.0 * h)],
        [(tp.big_r - tm.big_r) / (2.0 * h), (rp.big_r - rm.big_r) / (2.0 * h)],
    ];
    let w2 = omega(penrose_forward(pt)).powi(2);
    let eta = [1.0, -1.0];
    let mut worst = 0.0_f64;
    for a in 0..2 {
        for b in 0..2 {
            let g = j[0][a] * j[0][b] - j[1][a] * j[1][b];
            let want = if a == b { w2 * eta[a] } else { 0.0 };
            worst = worst.max((g - want).abs());
        }
    }
    Ok(worst)
}

/// `|r - sin R / Ω|`, the angular block of the conformal identity.
pub fn angular_factor_residual(pt: MinkowskiRadialPoint) -> f64 {
    let c = penrose_forward(pt);
    (pt.r - c.big_r.sin() / omega(c)).abs()
}

/// `(1 + r²)^{-ν_d}` with `ν_d = (d-1)/2`.
pub fn f_star_profile(d: u32, r: f64) -> Result<f64> {
    if d < 2 {
        return Err(domain("dimension must be at least 2"));
    }
    Ok((1.0 + r * r).powf(-0.5 * (d as f64 - 1.0)))
}

/// `|(1 + r²)^{-ν_d} - 2^{-ν_d} Ω₀(R(r))^{ν_d}|`.
pub fn profile_residual(d: u32, r: f64) -> Result<f64> {
    let nu = 0.5 * (d as f64 - 1.0);
    let big_r = penrose_forward(MinkowskiRadialPoint { t: 0.0, r }).big_r;
    Ok((f_star_profile(d, r)? - (0.5 * omega0(big_r)).powf(nu)).abs())
}

/// Maxima of every geometric residual over a seeded sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenroseCheck {
    pub points: usize,
    pub step: f64,
    pub conformal_max: f64,
    pub angular_max: f64,
    pub roundtrip_max: f64,
    pub omega0_max: f64,
    pub profile_max: f64,
    pub report: CertReport,
}

/// Conformality at `points` random interior points with step `h`, round trips,
/// the `Ω₀` identity on `r ∈ [0, 10³]` and the profile identity on `r ∈ [0, 100]`.
pub fn penrose_check(points: usize, h: f64, seed: u64) -> Result<PenroseCheck> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut conformal_max = 0.0_f64;
    let mut angular_max = 0.0_f64;
    let mut roundtrip_max = 0.0_f64;
    for _ in 0..points {
        let pt = MinkowskiRadialPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..3.0))?;
        conformal_max = conformal_max.max(conformal_fd_residual(pt, h)?);
        angular_max = angular_max.max(angular_factor_residual(pt) / pt.r.max(1.0));
        let c = CompactifiedPoint::new(rng.gen_range(-PI..PI), 0.0)
            .and_then(|c| CompactifiedPoint::new(c.big_t, rng.gen_range(0.0..1.0) * (PI - c.big_t.abs())));
        if let Ok(c) = c {
            let back = penrose_forward(penrose_inverse(c)?);
            roundtrip_max = roundtrip_max.max((back.big_t - c.big_t).abs().max((back.big_r - c.big_r).abs()));
        }
    }
    let omega0_max = (0..=100_000)
        .map(|i| omega0_identity_residual(i as f64 * 1e-2))
        .fold(0.0, f64::max);
    let mut profile_max = 0.0_f64;
    for d in [3, 5, 7] {
        for i in 0..=10_000 {
            profile_max = profile_max.max(profile_residual(d, i as f64 * 1e-2)?);
        }
    }
    let mut report = CertReport::new("penrose", Verdict::Pass);
    report.margins = vec![
        Margin::less_than("conformality residual <= 1e-6", conformal_max, 1e-6 * (1.0 + 1e-12)),
        Margin::less_than("angular residual <= 1e-12", angular_max, 1e-12),
        Margin::less_than("round trip <= 1e-12", roundtrip_max, 1e-12),
        Margin::less_than("omega0 identity <= 1e-12", omega0_max, 1e-12),
        Margin::less_than("profile identity <= 1e-12", profile_max, 1e-12),
    ];
    if report.margins.iter().any(|m| !m.holds) {
        report.verdict = Verdict::Fail;
    }
    Ok(PenroseCheck {
        points,
        step: h,
        conformal_max,
        angular_max,
        roundtrip_max,
        omega0_max,
        profile_max,
        report,
    })
}
