//! Dense symmetric and Hermitian eigenvalues by cyclic Jacobi rotations.

use num_complex::Complex64;

use crate::error::{domain, Result};

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    let n = a.n;
    if a.data.len() != n * n {
        return Err(domain("matrix data does not match its dimension"));
    }
    if a.data.iter().any(|v| !v.is_finite()) {
        return Err(domain("matrix has non-finite entries"));
    }
    let mut m = a.clone();
    let threshold = 1e-14 * a.frobenius_norm();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Eigenvalues of a Hermitian matrix (row-major, `n × n`), ascending.
///
/// Uses the real embedding `[[Re, -Im], [Im, Re]]`, whose spectrum is that of
/// the input with every eigenvalue doubled in multiplicity.
pub fn hermitian_eigenvalues(h: &[Complex64], n: usize) -> Result<Vec<f64>> {
    if h.len() != n * n {
        return Err(domain("matrix data does not match its dimension"));
    }
    let big = DenseMatrix::from_fn(2 * n, |i, j| {
        let (bi, ri) = (i / n, i % n);
        let (bj, rj) = (j / n, j % n);
        let z = h[ri * n + rj];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let ev = symmetric_eigenvalues(&big)?;
    Ok(ev.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let m = DenseMatrix { n: 2, data: vec![2.0, 1.0, 1.0, 2.0] };
        let ev = symmetric_eigenvalues(&m).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn trace_and_determinant_preserved() {
        let m = DenseMatrix::from_fn(5, |i, j| 1.0 / (i + j + 1) as f64);
        let ev = symmetric_eigenvalues(&m).unwrap();
        let tr: f64 = (0..5).map(|i| m.get(i, i)).sum();
        assert!((ev.iter().sum::<f64>() - tr).abs() < 1e-13);
        // Hilbert matrix of order 5 has determinant 1/266716800000
        let det: f64 = ev.iter().product();
        assert!((det * 266_716_800_000.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hermitian_pauli_y() {
        let i = Complex64::new(0.0, 1.0);
        let h = vec![Complex64::new(0.0, 0.0), -i, i, Complex64::new(0.0, 0.0)];
        let ev = hermitian_eigenvalues(&h, 2).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }
}
