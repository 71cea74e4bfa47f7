//! Adjoint, GNS scalar product and representation of the transformation algebra.
//!
//! Elements of the complexified algebra are complex `d×d` right-action
//! matrices. With `S` the spectral sign operator of the faithful form `F`,
//!
//! * transposition is `A' = F·Aᵀ·F⁻¹`,
//! * conjugation is `A^ς = S·A*·S` (entrywise complex conjugate),
//! * the adjoint is `A† = ς(A') = S·F·Aᴴ·F⁻¹·S`,
//! * the scalar product is `⟨A|B⟩ = φ(A†∘B) = e·A†·B·φ`, with `φ = F·eᵀ`.
//!
//! The Hilbert space is the quotient of the span of a real spanning set by
//! the null space of its Gram matrix. Quotient coordinates are orthonormal,
//! so `π(A)` is an ordinary complex matrix and its operator norm is its
//! largest singular value.

use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;

use crate::bipartite::{
    find_preparing_transformation, BipartiteForm, FaithfulForm, PreparationResult,
    PreparationTarget, Side,
};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    complexify, max_abs, numerical_rank, spectral_norm, CMatrix, CVector, SymmetricEigen,
};
use crate::theory::{EffectVector, StateVector, Theory, TransformationMatrix};

/// Default null-space threshold, relative to the largest Gram eigenvalue.
pub const DEFAULT_NULL_TOL: f64 = 1e-10;

/// `S = P₊ − P₋` from `F = Q·Λ·Qᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignInvolution {
    pub matrix: DMatrix<f64>,
    /// Eigenvalues of `F`, ascending.
    pub eigenvalues: Vec<f64>,
}

impl SignInvolution {
    pub fn from_faithful(faithful: &FaithfulForm) -> Self {
        SignInvolution {
            matrix: faithful.eigen().map(f64::signum),
            eigenvalues: faithful.eigen().eigenvalues.iter().copied().collect(),
        }
    }

    /// ς on effects: `a ↦ a·S`.
    pub fn apply_effect(&self, a: &EffectVector) -> EffectVector {
        EffectVector(&a.0 * &self.matrix)
    }

    /// `‖S² − I‖` (largest entry).
    pub fn square_residual(&self) -> f64 {
        let d = self.matrix.nrows();
        max_abs(&(&self.matrix * &self.matrix - DMatrix::identity(d, d)))
    }

    /// `|Φ|` as a matrix: `S·F`.
    pub fn abs_form(&self, form: &BipartiteForm) -> DMatrix<f64> {
        &self.matrix * &form.0
    }
}

/// Errors with [`Error::NotFaithful`] when an eigenvalue of `F` is below
/// `tol·|λ|_max`.
pub fn sign_involution(form: &BipartiteForm, tol: f64) -> Result<SignInvolution> {
    Ok(SignInvolution::from_faithful(&FaithfulForm::new(
        form.clone(),
        tol,
    )?))
}

/// `R_{A^ς} = S·R_A·S` for a real transformation.
pub fn conjugate_transformation(
    a: &TransformationMatrix,
    sign: &SignInvolution,
) -> TransformationMatrix {
    TransformationMatrix(&sign.matrix * &a.0 * &sign.matrix)
}

/// ς on a complex element: `S·A*·S`, antilinear in the coefficients.
pub fn conjugate(a: &CMatrix, sign: &SignInvolution) -> CMatrix {
    let s = complexify(&sign.matrix);
    &s * a.map(|z| z.conj()) * &s
}

/// The faithful form, its sign operator and the reference state `φ`.
#[derive(Debug, Clone)]
pub struct Algebra {
    faithful: FaithfulForm,
    sign: SignInvolution,
    unit_effect: RowDVector<f64>,
    local_state: DVector<f64>,
    // S·F and F⁻¹·S, complexified
    left: CMatrix,
    right: CMatrix,
}

impl Algebra {
    pub fn new(form: &BipartiteForm, unit_effect: &EffectVector, tol: f64) -> Result<Self> {
        check_dim("unit effect", form.dim(), unit_effect.dim())?;
        let faithful = FaithfulForm::new(form.clone(), tol)?;
        let sign = SignInvolution::from_faithful(&faithful);
        let local_state = form.local_state(Side::First, unit_effect).0;
        let left = complexify(&(&sign.matrix * faithful.matrix()));
        let right = complexify(&(faithful.inverse() * &sign.matrix));
        Ok(Algebra {
            faithful,
            sign,
            unit_effect: unit_effect.0.clone(),
            local_state,
            left,
            right,
        })
    }

    /// Uses the theory's declared faithful state.
    pub fn for_theory(theory: &Theory, tol: f64) -> Result<Self> {
        let form = theory.faithful_state.as_ref().ok_or_else(|| {
            Error::Input(format!(
                "theory `{}` declares no faithful state",
                theory.name
            ))
        })?;
        Algebra::new(form, &theory.unit_effect, tol)
    }

    pub fn faithful(&self) -> &FaithfulForm {
        &self.faithful
    }

    pub fn sign(&self) -> &SignInvolution {
        &self.sign
    }

    pub fn dim(&self) -> usize {
        self.faithful.dim()
    }

    /// `φ = F·eᵀ`.
    pub fn local_state(&self) -> &DVector<f64> {
        &self.local_state
    }

    /// Linear transposition `F·Aᵀ·F⁻¹`.
    pub fn transpose(&self, a: &CMatrix) -> CMatrix {
        complexify(self.faithful.matrix()) * a.transpose() * complexify(self.faithful.inverse())
    }

    /// `A† = S·F·Aᴴ·F⁻¹·S`.
    pub fn adjoint(&self, a: &CMatrix) -> CMatrix {
        &self.left * a.adjoint() * &self.right
    }

    pub fn adjoint_real(&self, a: &TransformationMatrix) -> TransformationMatrix {
        let m = (&self.sign.matrix * self.faithful.matrix())
            * a.0.transpose()
            * (self.faithful.inverse() * &self.sign.matrix);
        TransformationMatrix(m)
    }

    /// `φ(A) = e·A·φ`.
    pub fn state_value(&self, a: &CMatrix) -> Complex64 {
        let v = a * complexify_vec(&self.local_state);
        self.unit_effect
            .iter()
            .zip(v.iter())
            .map(|(e, z)| z * *e)
            .sum()
    }

    /// `⟨A|B⟩ = φ(A†∘B)`.
    pub fn inner(&self, a: &CMatrix, b: &CMatrix) -> Complex64 {
        self.state_value(&(self.adjoint(a) * b))
    }
}

fn complexify_vec(v: &DVector<f64>) -> CVector {
    v.map(|x| Complex64::new(x, 0.0))
}

/// `d²` matrix units `E_kl`, index `k·d + l`.
pub fn matrix_units(d: usize) -> Vec<TransformationMatrix> {
    (0..d * d)
        .map(|idx| {
            let mut m = DMatrix::zeros(d, d);
            m[(idx / d, idx % d)] = 1.0;
            TransformationMatrix(m)
        })
        .collect()
}

/// `G_ij = Re φ(B_i†∘B_j)` for a real spanning set (then `G` is real symmetric).
pub fn gram_matrix(algebra: &Algebra, basis: &[TransformationMatrix]) -> DMatrix<f64> {
    let cbasis: Vec<CMatrix> = basis.iter().map(|b| complexify(&b.0)).collect();
    let n = basis.len();
    DMatrix::from_fn(n, n, |i, j| algebra.inner(&cbasis[i], &cbasis[j]).re)
}

/// Orthonormal basis of the Gram quotient.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub eigen: SymmetricEigen,
    /// Columns are coefficient vectors `u_k` with `u_kᵀ G u_l = δ_kl`.
    pub basis: DMatrix<f64>,
    /// Columns are unit coefficient vectors spanning the numerical null space.
    pub null_vectors: DMatrix<f64>,
    pub dim: usize,
}

/// Splits the spectrum of `G` at `null_tol·λ_max`.
///
/// Errors with [`Error::PositivityViolation`] if an eigenvalue is below
/// `−psd_tol·λ_max`.
pub fn null_space_quotient(gram: &DMatrix<f64>, null_tol: f64, psd_tol: f64) -> Result<Quotient> {
    let eigen = SymmetricEigen::new(gram);
    let max = eigen.max().max(0.0);
    let min = eigen.min();
    if min < -psd_tol * max {
        return Err(Error::PositivityViolation {
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    let cut = null_tol * max;
    let n = gram.nrows();
    let kept: Vec<usize> = (0..n).filter(|&k| eigen.eigenvalues[k] > cut).collect();
    let null: Vec<usize> = (0..n).filter(|&k| eigen.eigenvalues[k] <= cut).collect();
    let basis = DMatrix::from_fn(n, kept.len(), |i, c| {
        let k = kept[c];
        eigen.eigenvectors[(i, k)] / eigen.eigenvalues[k].sqrt()
    });
    let null_vectors = DMatrix::from_fn(n, null.len(), |i, c| eigen.eigenvectors[(i, null[c])]);
    Ok(Quotient {
        dim: kept.len(),
        eigen,
        basis,
        null_vectors,
    })
}

/// The GNS Hilbert space of a faithful model.
#[derive(Debug, Clone)]
pub struct GnsSpace {
    algebra: Algebra,
    basis: Vec<TransformationMatrix>,
    gram: DMatrix<f64>,
    quotient: Quotient,
    // e·B_i† for each spanning element
    probes: Vec<RowDVector<Complex64>>,
    // quotient basis elements X_k = Σ_i u_k[i] B_i
    elements: Vec<CMatrix>,
}

impl GnsSpace {
    /// Spanning set of matrix units.
    pub fn new(algebra: Algebra, tol: f64, null_tol: f64) -> Result<Self> {
        let basis = matrix_units(algebra.dim());
        GnsSpace::with_basis(algebra, basis, tol, null_tol)
    }

    pub fn with_basis(
        algebra: Algebra,
        basis: Vec<TransformationMatrix>,
        tol: f64,
        null_tol: f64,
    ) -> Result<Self> {
        for b in &basis {
            check_dim("spanning element", algebra.dim(), b.dim())?;
        }
        let gram = gram_matrix(&algebra, &basis);
        let quotient = null_space_quotient(&gram, null_tol, tol)?;
        let e = algebra.unit_effect.map(|x| Complex64::new(x, 0.0));
        let probes = basis
            .iter()
            .map(|b| &e * algebra.adjoint(&complexify(&b.0)))
            .collect();
        let elements = (0..quotient.dim)
            .map(|k| {
                let mut m = DMatrix::<f64>::zeros(algebra.dim(), algebra.dim());
                for (i, b) in basis.iter().enumerate() {
                    m += &b.0 * quotient.basis[(i, k)];
                }
                complexify(&m)
            })
            .collect();
        Ok(GnsSpace {
            algebra,
            basis,
            gram,
            quotient,
            probes,
            elements,
        })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn quotient(&self) -> &Quotient {
        &self.quotient
    }

    pub fn spanning_set(&self) -> &[TransformationMatrix] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim
    }

    /// `Σ c_i B_i`.
    pub fn element(&self, coeffs: &CVector) -> CMatrix {
        let d = self.algebra.dim();
        let mut m = CMatrix::zeros(d, d);
        for (b, c) in self.basis.iter().zip(coeffs.iter()) {
            m += complexify(&b.0) * *c;
        }
        m
    }

    /// Orthonormal quotient coordinates of the class of `m`: `x_k = ⟨X_k|m⟩`.
    pub fn class_of(&self, m: &CMatrix) -> CVector {
        let v = m * complexify_vec(&self.algebra.local_state);
        let g = CVector::from_iterator(
            self.probes.len(),
            self.probes.iter().map(|p| (p * &v)[(0, 0)]),
        );
        complexify(&self.quotient.basis).transpose() * g
    }

    /// `π(A)`: the matrix of `X ↦ A∘X` in the quotient basis.
    pub fn representation(&self, a: &CMatrix) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (l, x) in self.elements.iter().enumerate() {
            out.set_column(l, &self.class_of(&(a * x)));
        }
        out
    }

    /// `‖A‖_Φ = sup_{‖B‖≤1} ‖A∘B‖_Φ`.
    pub fn operator_norm(&self, a: &CMatrix) -> f64 {
        spectral_norm(&self.representation(a))
    }

    /// `|‖A†∘A‖ − ‖A‖²| / max(1, ‖A‖²)`.
    pub fn cstar_residual(&self, a: &CMatrix) -> f64 {
        let norm = self.operator_norm(a);
        let sq = norm * norm;
        let lhs = self.operator_norm(&(self.algebra.adjoint(a) * a));
        (lhs - sq).abs() / sq.max(1.0)
    }

    /// Induced vector norm `√⟨A|A⟩`.
    pub fn vector_norm(&self, a: &CMatrix) -> f64 {
        self.algebra.inner(a, a).re.max(0.0).sqrt()
    }

    pub fn cauchy_schwarz(&self, a: &CMatrix, b: &CMatrix, tol: f64) -> CauchySchwarz {
        let lhs = self.algebra.inner(a, b).norm();
        let rhs = self.vector_norm(a) * self.vector_norm(b);
        CauchySchwarz {
            lhs,
            rhs,
            holds: lhs <= rhs + tol,
        }
    }

    /// Largest `⟨A∘X|A∘X⟩` over null vectors `X` and the given `A`, on the
    /// same scale as Gram eigenvalues.
    pub fn left_ideal_residual(&self, generators: &[CMatrix]) -> f64 {
        let mut worst = 0.0f64;
        for c in 0..self.quotient.null_vectors.ncols() {
            let coeffs = complexify_vec(&self.quotient.null_vectors.column(c).clone_owned());
            let x = self.element(&coeffs);
            for a in generators {
                let ax = a * &x;
                worst = worst.max(self.algebra.inner(&ax, &ax).norm());
            }
        }
        worst
    }

    /// `ρ = T′_ω / Φ(T_ω, I)` in quotient coordinates.
    pub fn born_state(&self, state: &StateVector, theory: &Theory, tol: f64) -> Result<BornState> {
        let prep = find_preparing_transformation(
            self.algebra.faithful(),
            &PreparationTarget::Local(state.clone()),
            theory,
            tol,
        )?;
        let transposed = self.algebra.faithful().transpose(&prep.transformation);
        let prep_effect = theory.effect_of(&prep.transformation);
        let normalization = self
            .algebra
            .faithful()
            .form()
            .value(&prep_effect, &theory.unit_effect)?;
        if normalization.abs() <= tol {
            return Err(Error::ZeroProbability {
                probability: normalization,
            });
        }
        let element = complexify(&transposed.0) / Complex64::new(normalization, 0.0);
        let vector = self.class_of(&element);
        Ok(BornState {
            transposed_effect: theory.effect_of(&transposed),
            preparation: prep,
            transposed,
            normalization,
            element,
            vector,
        })
    }

    /// `⟨A†|ρ⟩`.
    pub fn born_probability(&self, a: &CMatrix, rho: &CVector) -> Complex64 {
        self.class_of(&self.algebra.adjoint(a)).dotc(rho)
    }

    /// `⟨B†|π(A)|ρ⟩`, the probability of `B̄∘A`.
    pub fn born_conditioned(&self, b: &CMatrix, a: &CMatrix, rho: &CVector) -> Complex64 {
        let moved = self.representation(a) * rho;
        self.class_of(&self.algebra.adjoint(b)).dotc(&moved)
    }

    /// Quotient dimension against the effect-space dimension.
    pub fn identification(&self) -> Identification {
        Identification {
            quotient_dim: self.dim(),
            effect_dim: self.algebra.dim(),
            matches: self.dim() == self.algebra.dim(),
        }
    }

    /// Dimension of zero-effect elements of the span that keep a nonzero norm.
    ///
    /// Zero means informational equivalence classes and GNS classes agree on
    /// the span; anything else shows the quotient is not the effect space
    /// under the effect map.
    pub fn zero_effect_nonnull_dim(&self, tol: f64) -> usize {
        let d = self.algebra.dim();
        let n = self.basis.len();
        let effect_map = DMatrix::from_fn(d, n, |r, c| {
            (&self.algebra.unit_effect * &self.basis[c].0)[r]
        });
        let mut stacked = DMatrix::<f64>::zeros(d + n, n);
        stacked.rows_mut(0, d).copy_from(&effect_map);
        stacked.rows_mut(d, n).copy_from(&self.gram);
        numerical_rank(&stacked, tol) - numerical_rank(&effect_map, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchySchwarz {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Identification {
    pub quotient_dim: usize,
    pub effect_dim: usize,
    pub matches: bool,
}

#[derive(Debug, Clone)]
pub struct BornState {
    pub preparation: PreparationResult,
    pub transposed: TransformationMatrix,
    pub transposed_effect: EffectVector,
    /// `Φ(T_ω, I)`.
    pub normalization: f64,
    /// `T′_ω / Φ(T_ω, I)` as an algebra element.
    pub element: CMatrix,
    pub vector: CVector,
}

/// Effect-level readings of the scalar product over sampled representatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepresentativeReport {
    /// Largest change of `⟨A|C⟩` when `A` is replaced by an informationally
    /// equivalent representative.
    pub effect_level_deviation: f64,
    /// Largest change of the transposed effect `ā′` under the same swap.
    /// Nonzero means `ā′`, and with it the GNS class, is not a function of `ā`.
    pub transposed_effect_deviation: f64,
    /// Largest `|⟨A|B⟩ − Φ(ς(ā′), b̄′)|`: the scalar product reads only
    /// transposed effects.
    pub transposed_formula_residual: f64,
}

/// Perturbs each sample by a zero-effect element and records how the scalar
/// product and the transposed effect respond.
pub fn representative_independence(
    space: &GnsSpace,
    theory: &Theory,
    samples: &[TransformationMatrix],
) -> RepresentativeReport {
    let algebra = space.algebra();
    let phi = algebra.local_state();
    let mut effect_level = 0.0f64;
    let mut transposed_dev = 0.0f64;
    let mut formula = 0.0f64;
    let n = samples.len();
    let sign = algebra.sign();
    let form = algebra.faithful().form();

    for (k, a) in samples.iter().enumerate() {
        let z = &samples[(k + 1) % n];
        let c = &samples[(k + 2) % n];
        // D = Z − φ·(e·Z) has e·D = 0 because e·φ = 1
        let ez = theory.effect_of(z).0;
        let d = TransformationMatrix(&z.0 - phi * &ez);
        let shifted = TransformationMatrix(&a.0 + &d.0);

        let ca = complexify(&a.0);
        let cs = complexify(&shifted.0);
        let cc = complexify(&c.0);
        effect_level = effect_level.max((algebra.inner(&ca, &cc) - algebra.inner(&cs, &cc)).norm());

        let ta = theory.effect_of(&algebra.faithful().transpose(a));
        let ts = theory.effect_of(&algebra.faithful().transpose(&shifted));
        transposed_dev =
            transposed_dev.max((&ta.0 - &ts.0).iter().fold(0.0f64, |m, x| m.max(x.abs())));

        let tc = theory.effect_of(&algebra.faithful().transpose(c));
        let via_effects = form.value(&sign.apply_effect(&ta), &tc).unwrap_or(f64::NAN);
        formula = formula.max((algebra.inner(&ca, &cc).re - via_effects).abs());
    }

    RepresentativeReport {
        effect_level_deviation: effect_level,
        transposed_effect_deviation: transposed_dev,
        transposed_formula_residual: formula,
    }
}
