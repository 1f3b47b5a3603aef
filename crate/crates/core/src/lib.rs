//! Numerical certificates for local optimality of sharp Fourier extension
//! constants on the sphere, the paraboloid and the cone.
//!
//! The crate is organised bottom-up: [`specfun`] and [`quadrature`] supply
//! special functions and certified integrals; [`sphere`], [`schrod`] and
//! [`wave`] build the per-setting coefficients and certificates;
//! [`penrose`] and [`deficit`] hold the geometric and variational checks.

pub mod deficit;
pub mod error;
pub mod linalg;
pub mod params;
pub mod penrose;
pub mod quadrature;
pub mod report;
pub mod schrod;
pub mod specfun;
pub mod sphere;
pub mod wave;

pub use error::{Error, Result};
pub use params::{SchrodParams, SettingParams, SphereParams, WaveParams};
pub use quadrature::{CertifiedValue, QuadResult};
pub use report::{CertReport, CoeffTable, Margin, Verdict};
