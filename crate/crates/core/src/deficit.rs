//! Deficit functional `ψ(f) = C★² ⟨f|f⟩ − ‖Sf‖_p²` on a finite-dimensional model,
//! with closed-form first and second variations.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::DenseMatrix;

/// Step sizes for the finite-difference checks.
pub const FD_STEPS: [f64; 3] = [1e-3, 5e-4, 2.5e-4];

/// Finite-difference errors of both variations along one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdCheck {
    pub steps: [f64; 3],
    /// `|(ψ(f+εg) − ψ(f−εg))/2ε − ψ'(f)g|`.
    pub first_errors: [f64; 3],
    /// `|(ψ'(f+εg)g − ψ'(f−εg)g)/2ε − ψ''(f)(g,g)|`.
    pub second_errors: [f64; 3],
    pub first_order: f64,
    pub second_order: f64,
}

/// Smallest observed order over successive halvings; errors at the round-off
/// floor count as exact.
fn observed_order(errs: &[f64; 3], steps: &[f64; 3], floor: f64) -> f64 {
    let mut worst = f64::INFINITY;
    for k in 0..2 {
        if errs[k + 1] <= floor {
            continue;
        }
        worst = worst.min((errs[k] / errs[k + 1]).ln() / (steps[k] / steps[k + 1]).ln());
    }
    worst
}

/// A diagonal-metric Hilbert space mapped by `S` into weighted `L^p` on a finite grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDeficitModel {
    n: usize,
    metric: Vec<f64>,
    m: usize,
    /// Row-major `m × n`.
    operator: Vec<Complex64>,
    weights: Vec<f64>,
    p: f64,
    f_star: Vec<Complex64>,
    c_star_sq: f64,
}

/// The four pieces of the second variation; `total = metric - modulus - phase - coupling`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondVariationTerms {
    pub metric: f64,
    pub modulus: f64,
    pub phase: f64,
    pub coupling: f64,
}

impl SecondVariationTerms {
    pub fn total(&self) -> f64 {
        self.metric - self.modulus - self.phase - self.coupling
    }
}

/// Value and real gradient of `ψ` at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub psi_value: f64,
    /// `ψ'(f)` applied to the real unit directions `e_k`.
    pub gradient_re: Vec<f64>,
    /// `ψ'(f)` applied to the imaginary unit directions `i e_k`.
    pub gradient_im: Vec<f64>,
}

impl VariationReport {
    pub fn gradient_norm(&self) -> f64 {
        self.gradient_re
            .iter()
            .chain(&self.gradient_im)
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// `ψ'(f) g` from the stored gradient.
    pub fn apply(&self, g: &[Complex64]) -> f64 {
        g.iter()
            .enumerate()
            .map(|(k, z)| z.re * self.gradient_re[k] + z.im * self.gradient_im[k])
            .sum()
    }
}

impl DiscreteDeficitModel {
    pub fn new(
        metric: Vec<f64>,
        operator: Vec<Complex64>,
        weights: Vec<f64>,
        p: f64,
        f_star: Vec<Complex64>,
    ) -> Result<Self> {
        let n = metric.len();
        let m = weights.len();
        if n == 0 || m == 0 {
            return Err(domain("model needs a nonempty space and grid"));
        }
        if operator.len() != n * m || f_star.len() != n {
            return Err(domain("operator or reference element has the wrong size"));
        }
        if metric.iter().any(|g| !(*g > 0.0)) || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(domain("metric and grid weights must be positive"));
        }
        if !(p > 2.0) {
            return Err(domain(format!("exponent must exceed 2, got {p}")));
        }
        let mut model = Self {
            n,
            metric,
            m,
            operator,
            weights,
            p,
            f_star,
            c_star_sq: 0.0,
        };
        let fs = model.f_star.clone();
        let norm_sq = model.inner(&fs, &fs).re;
        let s_norm = model.lp_norm(&model.apply(&fs));
        if !(norm_sq > 0.0) || !(s_norm > 0.0) {
            return Err(Error::Degenerate("reference element must have nonzero image".into()));
        }
        model.c_star_sq = s_norm * s_norm / norm_sq;
        Ok(model)
    }

    /// Random dense model with a deterministic seed; entries are uniform in the unit box.
    pub fn sample(n: usize, m: usize, p: f64, seed: u64) -> Result<Self> {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut c = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let operator: Vec<Complex64> = (0..n * m).map(|_| c()).collect();
        let f_star: Vec<Complex64> = (0..n).map(|_| c()).collect();
        let metric = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let weights = (0..m).map(|_| rng.gen_range(0.1..1.0)).collect();
        Self::new(metric, operator, weights, p, f_star)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn f_star(&self) -> &[Complex64] {
        &self.f_star
    }

    pub fn metric(&self) -> &[f64] {
        &self.metric
    }

    pub fn c_star_sq(&self) -> f64 {
        self.c_star_sq
    }

    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        (0..self.m)
            .map(|j| {
                let row = &self.operator[j * self.n..(j + 1) * self.n];
                row.iter().zip(f).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// `⟨f|g⟩ = Σ_i metric_i conj(f_i) g_i`.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        self.metric
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| a.conj() * b * *w)
            .sum()
    }

    pub fn lp_norm(&self, u: &[Complex64]) -> f64 {
        self.weights
            .iter()
            .zip(u)
            .map(|(w, z)| w * z.norm().powf(self.p))
            .sum::<f64>()
            .powf(1.0 / self.p)
    }

    pub fn psi(&self, f: &[Complex64]) -> f64 {
        let s = self.lp_norm(&self.apply(f));
        self.c_star_sq * self.inner(f, f).re - s * s
    }

    fn image_norm(&self, u: &[Complex64]) -> Result<f64> {
        let n = self.lp_norm(u);
        if !(n > 0.0) {
            return Err(Error::Degenerate("Sf vanishes identically".into()));
        }
        Ok(n)
    }

    /// `Re ∫ |u|^{p-2} conj(u) v`.
    fn pairing(&self, u: &[Complex64], v: &[Complex64]) -> f64 {
        self.weights
            .iter()
            .zip(u.iter().zip(v))
            .map(|(w, (a, b))| {
                let r = a.norm();
                if r == 0.0 {
                    0.0
                } else {
                    w * r.powf(self.p - 2.0) * (a.conj() * b).re
                }
            })
            .sum()
    }

    /// `ψ'(f) g`.
    pub fn psi_prime(&self, f: &[Complex64], g: &[Complex64]) -> Result<f64> {
        let u = self.apply(f);
        let nu = self.image_norm(&u)?;
        let v = self.apply(g);
        Ok(2.0 * self.c_star_sq * self.inner(f, g).re - 2.0 * nu.powf(2.0 - self.p) * self.pairing(&u, &v))
    }

    fn bilinear_terms(&self, f: &[Complex64], g: &[Complex64], h: &[Complex64]) -> Result<SecondVariationTerms> {
        let p = self.p;
        let u = self.apply(f);
        let nu = self.image_norm(&u)?;
        let vg = self.apply(g);
        let vh = self.apply(h);
        let mut modulus = 0.0;
        let mut phase = 0.0;
        for j in 0..self.m {
            let r = u[j].norm();
            // both integrands are O(|u|^{p-2}) and extend by zero where u vanishes
            if r == 0.0 {
                continue;
            }
            let w = self.weights[j];
            modulus += w * r.powf(p - 2.0) * (vg[j].conj() * vh[j]).re;
            let ub = u[j].conj();
            phase += w * r.powf(p - 4.0) * (ub * ub * vg[j] * vh[j]).re;
        }
        let lead = nu.powf(2.0 - p);
        Ok(SecondVariationTerms {
            metric: 2.0 * self.c_star_sq * self.inner(g, h).re,
            modulus: lead * p * modulus,
            phase: lead * (p - 2.0) * phase,
            coupling: 2.0 * (2.0 - p) * nu.powf(2.0 - 2.0 * p) * self.pairing(&u, &vg) * self.pairing(&u, &vh),
        })
    }

    /// The four terms of `ψ''(f)(g, g)`.
    pub fn psi_second_terms(&self, f: &[Complex64], g: &[Complex64]) -> Result<SecondVariationTerms> {
        self.bilinear_terms(f, g, g)
    }

    /// `ψ''(f)(g, g)`.
    pub fn psi_second(&self, f: &[Complex64], g: &[Complex64]) -> Result<f64> {
        Ok(self.psi_second_terms(f, g)?.total())
    }

    /// Polarized second variation `ψ''(f)(g, h)`.
    pub fn psi_second_bilinear(&self, f: &[Complex64], g: &[Complex64], h: &[Complex64]) -> Result<f64> {
        Ok(self.bilinear_terms(f, g, h)?.total())
    }

    /// Real unit direction `k` of the `2n` basis: `e_k` for `k < n`, `i e_{k-n}` otherwise.
    pub fn basis_direction(&self, k: usize) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.n];
        if k < self.n {
            g[k] = Complex64::new(1.0, 0.0);
        } else {
            g[k - self.n] = Complex64::new(0.0, 1.0);
        }
        g
    }

    /// `2n × 2n` matrix of `ψ''(f)` over the real basis directions.
    pub fn hessian_matrix(&self, f: &[Complex64]) -> Result<DenseMatrix> {
        let dim = 2 * self.n;
        let u = self.apply(f);
        let nu = self.image_norm(&u)?;
        let p = self.p;
        let images: Vec<Vec<Complex64>> = (0..dim).map(|k| self.apply(&self.basis_direction(k))).collect();
        let pair: Vec<f64> = images.iter().map(|v| self.pairing(&u, v)).collect();
        let lead = nu.powf(2.0 - p);
        let coup = 2.0 * (2.0 - p) * nu.powf(2.0 - 2.0 * p);
        let mut h = DenseMatrix::zeros(dim);
        for a in 0..dim {
            for b in a..dim {
                let (va, vb) = (&images[a], &images[b]);
                let mut modulus = 0.0;
                let mut phase = 0.0;
                for j in 0..self.m {
                    let r = u[j].norm();
                    if r == 0.0 {
                        continue;
                    }
                    let w = self.weights[j];
                    modulus += w * r.powf(p - 2.0) * (va[j].conj() * vb[j]).re;
                    let ub = u[j].conj();
                    phase += w * r.powf(p - 4.0) * (ub * ub * va[j] * vb[j]).re;
                }
                let metric = if a % self.n == b % self.n && a / self.n == b / self.n {
                    2.0 * self.c_star_sq * self.metric[a % self.n]
                } else {
                    0.0
                };
                let v = metric - lead * (p * modulus + (p - 2.0) * phase) - coup * pair[a] * pair[b];
                h.set(a, b, v);
                h.set(b, a, v);
            }
        }
        Ok(h)
    }

    /// `ψ(f)` and `ψ'(f)` on every real basis direction.
    pub fn variation_report(&self, f: &[Complex64]) -> Result<VariationReport> {
        let grads = (0..2 * self.n)
            .map(|k| self.psi_prime(f, &self.basis_direction(k)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(VariationReport {
            psi_value: self.psi(f),
            gradient_re: grads[..self.n].to_vec(),
            gradient_im: grads[self.n..].to_vec(),
        })
    }

    /// Compares both variations at `f` along `g` with central differences at [`FD_STEPS`].
    pub fn fd_check(&self, f: &[Complex64], g: &[Complex64]) -> Result<FdCheck> {
        let shift = |e: f64| -> Vec<Complex64> { f.iter().zip(g).map(|(a, b)| a + b * e).collect() };
        let d1 = self.psi_prime(f, g)?;
        let d2 = self.psi_second(f, g)?;
        let mut first_errors = [0.0; 3];
        let mut second_errors = [0.0; 3];
        for (i, &e) in FD_STEPS.iter().enumerate() {
            let (fp, fm) = (shift(e), shift(-e));
            first_errors[i] = ((self.psi(&fp) - self.psi(&fm)) / (2.0 * e) - d1).abs();
            second_errors[i] = ((self.psi_prime(&fp, g)? - self.psi_prime(&fm, g)?) / (2.0 * e) - d2).abs();
        }
        let scale = self.c_star_sq * self.inner(g, g).re.max(self.inner(f, f).re) + d1.abs() + d2.abs();
        let floor = 1e-11 * scale;
        Ok(FdCheck {
            steps: FD_STEPS,
            first_order: observed_order(&first_errors, &FD_STEPS, floor),
            second_order: observed_order(&second_errors, &FD_STEPS, floor),
            first_errors,
            second_errors,
        })
    }

    /// Removes from `g` the components along the real-linear functionals
    /// `Re⟨f★|·⟩` and `ψ'(f★)`, so the coupling term of `ψ''(f★)(g, g)` vanishes.
    pub fn orthogonal_critical_direction(&self, g: &[Complex64]) -> Result<Vec<Complex64>> {
        let fs = self.f_star.clone();
        let u = self.apply(&fs);
        self.image_norm(&u)?;
        let dim = 2 * self.n;
        let func = |which: usize, k: usize| -> f64 {
            let e = self.basis_direction(k);
            if which == 0 {
                self.inner(&fs, &e).re
            } else {
                self.pairing(&u, &self.apply(&e))
            }
        };
        let mut rows: Vec<Vec<f64>> = (0..2).map(|w| (0..dim).map(|k| func(w, k)).collect()).collect();
        // Gram–Schmidt on the two functionals in the Euclidean coordinates of R^{2n}
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let n0 = dot(&rows[0], &rows[0]).sqrt();
        rows[0].iter_mut().for_each(|x| *x /= n0);
        let c = dot(&rows[0], &rows[1]);
        let r0 = rows[0].clone();
        rows[1].iter_mut().zip(&r0).for_each(|(x, y)| *x -= c * y);
        let n1 = dot(&rows[1], &rows[1]).sqrt();
        if n1 > 1e-12 * n0 {
            rows[1].iter_mut().for_each(|x| *x /= n1);
        } else {
            rows.truncate(1);
        }
        let mut x: Vec<f64> = g.iter().map(|z| z.re).chain(g.iter().map(|z| z.im)).collect();
        for _ in 0..2 {
            for r in &rows {
                let c = dot(r, &x);
                x.iter_mut().zip(r).for_each(|(xi, ri)| *xi -= c * ri);
            }
        }
        Ok((0..self.n).map(|k| Complex64::new(x[k], x[k + self.n])).collect())
    }
}

/// Summary of [`fd_battery`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdBattery {
    pub models: usize,
    pub seed: u64,
    pub min_first_order: f64,
    pub min_second_order: f64,
    /// Largest `|coupling| / |ψ''|` over the projected directions at `f★`.
    pub max_coupling_ratio: f64,
    pub checks: Vec<FdCheck>,
}

/// FD checks at a random point and direction on `models` random models with
/// `2 ≤ n, m ≤ max_dim` and `p ∈ (2.2, 6)`, plus the coupling term on projected
/// directions at `f★`.
pub fn fd_battery(models: usize, max_dim: usize, seed: u64) -> Result<FdBattery> {
    if max_dim < 2 {
        return Err(domain("max_dim must be at least 2"));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut checks = Vec::with_capacity(models);
    let mut max_coupling_ratio = 0.0_f64;
    for i in 0..models {
        let n = rng.gen_range(2..=max_dim);
        let m = rng.gen_range(2..=max_dim);
        let p = rng.gen_range(2.2..6.0);
        let model = DiscreteDeficitModel::sample(n, m, p, seed.wrapping_add(i as u64 + 1))?;
        let vec = |rng: &mut StdRng| -> Vec<Complex64> {
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        };
        let f = vec(&mut rng);
        let g = vec(&mut rng);
        checks.push(model.fd_check(&f, &g)?);

        let fs = model.f_star().to_vec();
        let h = model.orthogonal_critical_direction(&vec(&mut rng))?;
        let t = model.psi_second_terms(&fs, &h)?;
        let scale = t.metric.abs() + t.modulus.abs() + t.phase.abs();
        if scale > 0.0 {
            max_coupling_ratio = max_coupling_ratio.max(t.coupling.abs() / scale);
        }
    }
    let min_first_order = checks.iter().map(|c| c.first_order).fold(f64::INFINITY, f64::min);
    let min_second_order = checks.iter().map(|c| c.second_order).fold(f64::INFINITY, f64::min);
    Ok(FdBattery {
        models,
        seed,
        min_first_order,
        min_second_order,
        max_coupling_ratio,
        checks,
    })
}
