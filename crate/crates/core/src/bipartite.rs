//! Two independent copies of a system, bipartite forms, faithfulness and
//! transposition.
//!
//! A bipartite state is stored as the matrix `F` with `Φ(a, b) = a · F · bᵀ`
//! for local effects `a` (system 1) and `b` (system 2). Joint effects live in
//! the Kronecker product space, index `i·d + j` for `a_i b_j`; a local
//! transformation on system 1 acts there as `R_A ⊗ I`.

use nalgebra::DMatrix;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{max_abs, SymmetricEigen};
use crate::theory::{EffectVector, StateVector, Theory, TransformationMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteForm(pub DMatrix<f64>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

impl BipartiteForm {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn value(&self, a: &EffectVector, b: &EffectVector) -> Result<f64> {
        check_dim("first effect", self.dim(), a.dim())?;
        check_dim("second effect", self.dim(), b.dim())?;
        Ok((&a.0 * &self.0).dot(&b.0))
    }

    /// `‖F − Fᵀ‖` (largest entry).
    pub fn symmetry_residual(&self) -> f64 {
        max_abs(&(&self.0 - self.0.transpose()))
    }

    /// Reduced state: side 1 is `F·eᵀ`, side 2 is `Fᵀ·eᵀ`.
    pub fn local_state(&self, side: Side, unit_effect: &EffectVector) -> StateVector {
        let e = unit_effect.0.transpose();
        match side {
            Side::First => StateVector(&self.0 * e),
            Side::Second => StateVector(self.0.transpose() * e),
        }
    }

    /// The joint form `(A, I)Φ`, i.e. `R_A · F`.
    pub fn after_first(&self, a: &TransformationMatrix) -> BipartiteForm {
        BipartiteForm(&a.0 * &self.0)
    }

    /// The joint form `(I, B)Φ`, i.e. `F · R_Bᵀ`.
    pub fn after_second(&self, b: &TransformationMatrix) -> BipartiteForm {
        BipartiteForm(&self.0 * b.0.transpose())
    }
}

/// Numerical rank of `F` and the dynamical-faithfulness verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct FaithfulnessReport {
    pub rank: usize,
    pub dim: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub faithful: bool,
}

/// `A ↦ R_A·F` is injective iff `F` is nonsingular.
pub fn is_dynamically_faithful(form: &BipartiteForm, tol: f64) -> FaithfulnessReport {
    let d = form.dim();
    // rank is read off the squared spectrum in the asymmetric case, where
    // square roots would lift rounding noise to ~1e-8
    let (mut singular_values, rank): (Vec<f64>, usize) = if form.symmetry_residual() == 0.0 {
        let eig = SymmetricEigen::new(&form.0);
        let sv: Vec<f64> = eig.eigenvalues.iter().map(|x| x.abs()).collect();
        let max = sv.iter().copied().fold(0.0, f64::max);
        let rank = sv.iter().filter(|&&s| s > tol * max).count();
        (sv, rank)
    } else {
        let eig = SymmetricEigen::new(&(form.0.transpose() * &form.0));
        let max = eig.max_abs();
        let rank = eig.eigenvalues.iter().filter(|&&x| x > tol * max).count();
        (
            eig.eigenvalues.iter().map(|x| x.max(0.0).sqrt()).collect(),
            rank,
        )
    };
    singular_values.sort_by(|a, b| b.total_cmp(a));
    FaithfulnessReport {
        rank,
        dim: d,
        singular_values,
        faithful: d > 0 && rank == d,
    }
}

/// A symmetric, invertible bipartite form with its spectral data.
#[derive(Debug, Clone)]
pub struct FaithfulForm {
    form: BipartiteForm,
    eigen: SymmetricEigen,
    inverse: DMatrix<f64>,
}

impl FaithfulForm {
    /// Rejects asymmetric forms and eigenvalues with `|λ| <= tol·|λ|_max`.
    pub fn new(form: BipartiteForm, tol: f64) -> Result<Self> {
        let d = form.dim();
        check_dim("bipartite form", d, form.0.ncols())?;
        let scale = max_abs(&form.0).max(f64::MIN_POSITIVE);
        if form.symmetry_residual() > tol * scale {
            return Err(Error::Input(format!(
                "faithful state must be symmetric (asymmetry {:e})",
                form.symmetry_residual()
            )));
        }
        let eigen = SymmetricEigen::new(&form.0);
        let rank = eigen.rank(tol);
        if d == 0 || rank < d {
            return Err(Error::NotFaithful { rank, dim: d });
        }
        let inverse = eigen.map(|l| 1.0 / l);
        Ok(FaithfulForm {
            form,
            eigen,
            inverse,
        })
    }

    pub fn form(&self) -> &BipartiteForm {
        &self.form
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.form.0
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn eigen(&self) -> &SymmetricEigen {
        &self.eigen
    }

    pub fn dim(&self) -> usize {
        self.form.dim()
    }

    /// The transposed transformation: `R_{A'} = F·R_Aᵀ·F⁻¹`, the unique
    /// solution of `R_A·F = F·R_{A'}ᵀ`.
    pub fn transpose(&self, a: &TransformationMatrix) -> TransformationMatrix {
        TransformationMatrix(&self.form.0 * a.0.transpose() * &self.inverse)
    }

    /// `‖R_A·F − F·R_{A'}ᵀ‖` (largest entry).
    pub fn defining_residual(
        &self,
        a: &TransformationMatrix,
        transposed: &TransformationMatrix,
    ) -> f64 {
        max_abs(&(&a.0 * &self.form.0 - &self.form.0 * transposed.0.transpose()))
    }
}

/// Every cross pair of joint-space transformations commutes within `tol`.
pub fn check_independence(first: &[DMatrix<f64>], second: &[DMatrix<f64>], tol: f64) -> bool {
    first.iter().all(|a| {
        second
            .iter()
            .all(|b| a.shape() == b.shape() && max_abs(&(a * b - b * a)) <= tol)
    })
}

/// `R ⊗ I_d`: `r` acting on system 1 of a pair of `d`-dimensional systems.
pub fn local_first(r: &TransformationMatrix) -> DMatrix<f64> {
    let d = r.dim();
    r.0.kronecker(&DMatrix::identity(d, d))
}

/// `I_d ⊗ R`.
pub fn local_second(r: &TransformationMatrix) -> DMatrix<f64> {
    let d = r.dim();
    DMatrix::<f64>::identity(d, d).kronecker(&r.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PreparationTarget {
    /// A joint state `Ω` to be reached as `(T, I)Φ ∝ Ω`.
    Joint(BipartiteForm),
    /// A state of system 2 to be reached by conditioning on `T` at system 1.
    Local(StateVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparationResult {
    pub transformation: TransformationMatrix,
    /// Success probability `Φ(T, I)`.
    pub lambda: f64,
    pub physical: bool,
}

const BISECTION_STEPS: usize = 64;

/// Finds a local transformation `T` on system 1 that steers `Φ` to `target`,
/// with the largest success probability `λ ≤ 1` the cone allows.
///
/// For a local target `s`, `T` first tests the effect `λ·(F⁻¹s)ᵀ` and then
/// reprepares `s`; if that effect is the unit effect, `T` is the identity.
pub fn find_preparing_transformation(
    faithful: &FaithfulForm,
    target: &PreparationTarget,
    theory: &Theory,
    tol: f64,
) -> Result<PreparationResult> {
    let d = faithful.dim();
    check_dim("theory", d, theory.effect_dim())?;
    let (candidate, label) = match target {
        PreparationTarget::Joint(omega) => {
            check_dim("target form", d, omega.dim())?;
            (
                TransformationMatrix(&omega.0 * faithful.inverse()),
                "joint state".to_string(),
            )
        }
        PreparationTarget::Local(s) => {
            check_dim("target state", d, s.dim())?;
            let norm = theory.unit_effect.0.dot(&s.0.transpose());
            if (norm - 1.0).abs() > tol {
                return Err(Error::Input(format!(
                    "target state must be normalized (e·s = {norm})"
                )));
            }
            let test = (faithful.inverse() * &s.0).transpose();
            let is_unit = (&test - &theory.unit_effect.0)
                .iter()
                .all(|x| x.abs() <= tol);
            let m = if is_unit {
                DMatrix::identity(d, d)
            } else {
                &s.0 * test
            };
            (TransformationMatrix(m), format!("{:?}", s.0.as_slice()))
        }
    };

    let scale = max_abs(&candidate.0).max(1.0);
    if crate::cone::positivity_violation(theory, &candidate) > tol * scale {
        return Err(Error::NotPreparable { target: label });
    }

    let member = |lambda: f64| theory.is_physical(&crate::theory::scale(lambda, &candidate), tol);
    let lambda = if member(1.0) {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if member(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    if lambda <= tol {
        return Err(Error::NotPreparable { target: label });
    }
    let transformation = crate::theory::scale(lambda, &candidate);
    let physical = theory.is_physical(&transformation, tol);
    Ok(PreparationResult {
        transformation,
        lambda,
        physical,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparationEntry {
    pub state: String,
    pub lambda: Option<f64>,
    pub physical: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparationalReport {
    pub entries: Vec<PreparationEntry>,
    /// Smallest eigenvalue of `|Φ| = S·F`; `None` if `F` is not faithful.
    pub abs_form_min_eigenvalue: Option<f64>,
    pub faithful: bool,
    pub reason: Option<String>,
}

/// Tries to prepare every declared extremal state of system 2.
pub fn is_preparationally_faithful(
    form: &BipartiteForm,
    theory: &Theory,
    tol: f64,
) -> PreparationalReport {
    let faithful = match FaithfulForm::new(form.clone(), tol) {
        Ok(f) => f,
        Err(e) => {
            return PreparationalReport {
                entries: Vec::new(),
                abs_form_min_eigenvalue: None,
                faithful: false,
                reason: Some(e.to_string()),
            }
        }
    };
    let entries: Vec<PreparationEntry> = theory
        .extremal_states
        .iter()
        .map(|s| {
            let target = PreparationTarget::Local(s.value.clone());
            match find_preparing_transformation(&faithful, &target, theory, tol) {
                Ok(r) => PreparationEntry {
                    state: s.name.clone(),
                    lambda: Some(r.lambda),
                    physical: r.physical,
                    error: None,
                },
                Err(e) => PreparationEntry {
                    state: s.name.clone(),
                    lambda: None,
                    physical: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let abs_min = faithful
        .eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, l| m.min(l.abs()));
    let ok = entries
        .iter()
        .all(|e| e.physical && e.lambda.is_some_and(|l| l > tol));
    PreparationalReport {
        entries,
        abs_form_min_eigenvalue: Some(abs_min),
        faithful: ok,
        reason: None,
    }
}
