//! Physicality-cone membership.
//!
//! Membership splits into a scale-invariant positivity part and a dominance
//! part (`e − e·R` is a physical effect). Preparation searches rely on the
//! split: positivity is checked once, dominance fixes the admissible scale.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{hermitian_eigenvalues, hermitian_map, pseudo_inverse, CMatrix};
use crate::pauli;
use crate::theory::{Cone, Theory, TransformationMatrix};

/// Violation amounts; zero means the corresponding condition holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeVerdict {
    pub positivity: f64,
    pub dominance: f64,
}

impl ConeVerdict {
    pub fn residual(&self) -> f64 {
        self.positivity.max(self.dominance)
    }

    pub fn is_member(&self, tol: f64) -> bool {
        self.residual() <= tol
    }
}

pub fn verdict(theory: &Theory, r: &TransformationMatrix) -> ConeVerdict {
    ConeVerdict {
        positivity: positivity_violation(theory, r),
        dominance: dominance_violation(theory, r),
    }
}

/// How far `R` is from the positive cone, in absolute units of `R`.
pub fn positivity_violation(theory: &Theory, r: &TransformationMatrix) -> f64 {
    match theory.cone {
        Cone::ClassicalSubstochastic => r.0.iter().fold(0.0f64, |m, &x| m.max(-x)),
        Cone::QuantumChoi { hilbert_dim } => match pauli::choi_from_ptm(&r.0, hilbert_dim) {
            Ok(choi) => {
                let min = hermitian_eigenvalues(&choi).first().copied().unwrap_or(0.0);
                (-min).max(0.0)
            }
            Err(_) => f64::INFINITY,
        },
        Cone::Hull => {
            let (gens, target) = hull_system(theory, r);
            nnls(&gens, &target).1
        }
    }
}

/// How far `e − e·R` is from being a physical effect.
pub fn dominance_violation(theory: &Theory, r: &TransformationMatrix) -> f64 {
    let eff = theory.effect_of(r);
    match theory.cone {
        Cone::QuantumChoi { hilbert_dim } => {
            match pauli::effect_operator(eff.0.as_slice(), hilbert_dim) {
                Ok(op) => {
                    let max = hermitian_eigenvalues(&op).last().copied().unwrap_or(0.0);
                    (max - 1.0).max(0.0)
                }
                Err(_) => f64::INFINITY,
            }
        }
        Cone::ClassicalSubstochastic | Cone::Hull => theory
            .extremal_states
            .iter()
            .map(|s| eff.0.dot(&s.value.0.transpose()) - 1.0)
            .fold(0.0, f64::max),
    }
}

fn hull_system(theory: &Theory, r: &TransformationMatrix) -> (DMatrix<f64>, DVector<f64>) {
    let d = theory.effect_dim();
    let gens: Vec<&TransformationMatrix> = std::iter::once(&theory.identity)
        .chain(theory.transformations.iter().map(|t| &t.value))
        .collect();
    let a = DMatrix::from_fn(d * d, gens.len(), |row, col| {
        gens[col].0[(row / d, row % d)]
    });
    let b = DVector::from_fn(d * d, |row, _| r.0[(row / d, row % d)]);
    (a, b)
}

/// Nonnegative least squares (Lawson-Hanson active set).
///
/// Returns the minimizer `x ≥ 0` of `‖Ax − b‖` and the residual norm.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0)
        * b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let grad_tol = 1e-12 * scale * (n.max(1) as f64);

    for _ in 0..(3 * n + 10) {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > grad_tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]).then(j.cmp(&i)));
        let Some(j) = candidate else { break };
        passive[j] = true;

        loop {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = DMatrix::from_fn(a.nrows(), idx.len(), |r, c| a[(r, idx[c])]);
            let (pinv, _) = pseudo_inverse(&sub, 1e-14);
            let zp = pinv * b;
            let mut z = DVector::<f64>::zeros(n);
            for (c, &k) in idx.iter().enumerate() {
                z[k] = zp[c];
            }
            if idx.iter().all(|&k| z[k] > 0.0) {
                x = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for &k in &idx {
                if z[k] <= 0.0 {
                    let denom = x[k] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[k] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            x = &x + (z - &x) * alpha;
            for &k in &idx {
                if x[k] <= 1e-15 {
                    x[k] = 0.0;
                    passive[k] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    let residual = (a * &x - b).norm();
    (x, residual)
}

/// Nearest-in-spirit physical transformation: clips the violating part of `R`.
///
/// Classical: negative entries to zero, then columns rescaled to sum at most 1.
/// Quantum: negative Choi eigenvalues removed, then the whole map rescaled if
/// its effect exceeds the identity. Hull: the nonnegative least-squares
/// reconstruction from the generators.
pub fn project_to_cone(theory: &Theory, r: &TransformationMatrix) -> TransformationMatrix {
    match theory.cone {
        Cone::ClassicalSubstochastic => {
            let mut m = r.0.map(|x| x.max(0.0));
            for mut col in m.column_iter_mut() {
                let s = col.sum();
                if s > 1.0 {
                    col /= s;
                }
            }
            TransformationMatrix(m)
        }
        Cone::QuantumChoi { hilbert_dim } => {
            let choi = match pauli::choi_from_ptm(&r.0, hilbert_dim) {
                Ok(c) => c,
                Err(_) => return r.clone(),
            };
            let clipped: CMatrix = hermitian_map(&choi, |l| l.max(0.0));
            let mut m = pauli::ptm_from_choi(&clipped, hilbert_dim).unwrap_or_else(|_| r.0.clone());
            let projected = TransformationMatrix(m.clone());
            let eff = theory.effect_of(&projected);
            if let Ok(op) = pauli::effect_operator(eff.0.as_slice(), hilbert_dim) {
                let max = hermitian_eigenvalues(&op).last().copied().unwrap_or(0.0);
                if max > 1.0 {
                    m /= max;
                }
            }
            TransformationMatrix(m)
        }
        Cone::Hull => {
            let (a, b) = hull_system(theory, r);
            let (x, _) = nnls(&a, &b);
            let d = theory.effect_dim();
            let v = a * x;
            TransformationMatrix(DMatrix::from_fn(d, d, |i, j| v[i * d + j]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nnls_feasible_system_has_zero_residual() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0, 3.0, 5.0]);
        let (x, res) = nnls(&a, &b);
        assert!(res < 1e-12);
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn nnls_infeasible_system_reports_distance() {
        // b = -e1 is outside the cone spanned by e1 and e2
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let b = DVector::from_vec(vec![-1.0, 0.5]);
        let (x, res) = nnls(&a, &b);
        assert_eq!(x[0], 0.0);
        assert!((x[1] - 0.5).abs() < 1e-12);
        assert!((res - 1.0).abs() < 1e-12);
    }
}
