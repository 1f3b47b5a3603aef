//! Exponents and derived parameters for the three settings.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Largest dimension covered by the sphere certificates.
pub const SPHERE_CERTIFIED_MAX_D: u32 = 60;

/// Sphere `S^{d-1}` in `R^d` at the endpoint exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereParams {
    pub d: u32,
    pub p: f64,
    pub nu: f64,
    pub lambda: f64,
}

impl SphereParams {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(domain(format!("sphere setting needs d >= 2, got {d}")));
        }
        let df = d as f64;
        Ok(Self {
            d,
            p: 2.0 * (df + 1.0) / (df - 1.0),
            nu: df / 2.0 - 1.0,
            lambda: (3.0 * df - 5.0) / (3.0 * df - 3.0),
        })
    }

    /// `2ν`, the integer label used by the Bessel routines.
    pub fn two_nu(&self) -> u32 {
        self.d - 2
    }

    pub fn is_certified_range(&self) -> bool {
        self.d <= SPHERE_CERTIFIED_MAX_D
    }
}

/// Paraboloid (Schrödinger) setting in `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchrodParams {
    pub d: u32,
    pub p: f64,
    pub nu: f64,
    /// `(1 - 4/p)^{-1}`; absent when p = 4.
    pub z: Option<f64>,
    /// `(Z + 1/Z) / 2`; absent when p = 4.
    pub x: Option<f64>,
}

impl SchrodParams {
    pub fn new(d: u32) -> Result<Self> {
        if d < 1 {
            return Err(domain("Schrödinger setting needs d >= 1"));
        }
        let df = d as f64;
        let p = 2.0 + 4.0 / df;
        // 1 - 4/p = (2 - d)/(2 + d)
        let (z, x) = if d == 2 {
            (None, None)
        } else {
            let z = (2.0 + df) / (2.0 - df);
            (Some(z), Some(0.5 * z + 0.5 / z))
        };
        Ok(Self { d, p, nu: df / 2.0 - 1.0, z, x })
    }
}

/// Cone (wave) setting in `R^{d+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub d: u32,
    pub p: f64,
    pub nu_d: f64,
    pub alpha: f64,
}

impl WaveParams {
    pub fn new(d: u32) -> Result<Self> {
        if d < 2 {
            return Err(domain(format!("wave setting needs d >= 2, got {d}")));
        }
        let df = d as f64;
        let p = 2.0 * (df + 1.0) / (df - 1.0);
        Ok(Self {
            d,
            p,
            nu_d: (df - 1.0) / 2.0,
            alpha: p / 2.0,
        })
    }
}

/// Parameters of any of the three settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "setting", rename_all = "lowercase")]
pub enum SettingParams {
    Sphere(SphereParams),
    Schrodinger(SchrodParams),
    Wave(WaveParams),
}

impl SettingParams {
    pub fn d(&self) -> u32 {
        match self {
            SettingParams::Sphere(s) => s.d,
            SettingParams::Schrodinger(s) => s.d,
            SettingParams::Wave(s) => s.d,
        }
    }

    pub fn p(&self) -> f64 {
        match self {
            SettingParams::Sphere(s) => s.p,
            SettingParams::Schrodinger(s) => s.p,
            SettingParams::Wave(s) => s.p,
        }
    }
}
