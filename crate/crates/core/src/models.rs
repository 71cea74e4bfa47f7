//! Built-in theories and seeded random elements.
//!
//! Two models ship with the crate: classical probability on `n` outcomes with
//! the perfectly correlated form `F = I/n`, and the qubit in Pauli
//! coordinates with the Bell form `F = diag(1, 1, −1, 1)/4`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bipartite::BipartiteForm;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::pauli;
use crate::rng;
use crate::theory::{
    Cone, EffectVector, Experiment, Named, StateVector, Theory, TransformationMatrix,
};

/// Rotation angle of the named qubit rotations `rx`, `ry`, `rz`.
pub const ROTATION_ANGLE: f64 = PI / 3.0;

/// Kraus operators `{K_i}` of a trace non-increasing map `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<CMatrix>,
}

impl KrausSet {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let n = ops
            .first()
            .map(|k| k.nrows())
            .ok_or_else(|| Error::Input("empty Kraus set".into()))?;
        for k in &ops {
            if k.nrows() != n || k.ncols() != n {
                return Err(Error::Input(
                    "Kraus operators must be square and equal-sized".into(),
                ));
            }
        }
        Ok(KrausSet { ops })
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn hilbert_dim(&self) -> usize {
        self.ops[0].nrows()
    }

    /// `I − Σ K_i† K_i`.
    pub fn completeness_defect(&self) -> CMatrix {
        let n = self.hilbert_dim();
        let mut acc = CMatrix::identity(n, n);
        for k in &self.ops {
            acc -= k.adjoint() * k;
        }
        acc
    }

    /// How far `Σ K†K` exceeds the identity (zero when trace non-increasing).
    pub fn trace_excess(&self) -> f64 {
        let min = hermitian_eigenvalues(&self.completeness_defect())
            .first()
            .copied()
            .unwrap_or(0.0);
        (-min).max(0.0)
    }
}

/// Right-action matrix on Pauli effect coordinates of `E ↦ Σ K† E K`.
pub fn ptm_from_kraus(kraus: &KrausSet) -> Result<TransformationMatrix> {
    let excess = kraus.trace_excess();
    if excess > 1e-9 {
        return Err(Error::TraceIncreasing { excess });
    }
    Ok(TransformationMatrix(pauli::ptm_from_kraus(kraus.ops())?))
}

/// `exp(−iθσ/2)` about Pauli axis 1 (x), 2 (y) or 3 (z).
pub fn rotation(axis: usize, angle: f64) -> CMatrix {
    let paulis = pauli::single_qubit_paulis();
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    &paulis[0] * Complex64::new(c, 0.0) + &paulis[axis] * Complex64::new(0.0, -s)
}

/// Channel of a single unitary.
pub fn unitary_channel(u: &CMatrix) -> TransformationMatrix {
    TransformationMatrix(pauli::ptm_from_kraus(std::slice::from_ref(u)).expect("unitary on qubits"))
}

fn ket_projector(v: &[Complex64]) -> CMatrix {
    let ket = nalgebra::DVector::from_column_slice(v);
    &ket * ket.adjoint()
}

/// The six Pauli eigenstates `(label, ket)`.
fn pauli_eigenstates() -> Vec<(&'static str, [Complex64; 2])> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    vec![
        ("z+", [c(1.0, 0.0), c(0.0, 0.0)]),
        ("z-", [c(0.0, 0.0), c(1.0, 0.0)]),
        ("x+", [c(h, 0.0), c(h, 0.0)]),
        ("x-", [c(h, 0.0), c(-h, 0.0)]),
        ("y+", [c(h, 0.0), c(0.0, h)]),
        ("y-", [c(h, 0.0), c(0.0, -h)]),
    ]
}

/// The Bell form `F_μν = ¼ Tr[(σ_μ ⊗ σ_ν) |Φ⁺⟩⟨Φ⁺|]`.
pub fn bell_form() -> BipartiteForm {
    BipartiteForm(DMatrix::from_diagonal(&DVector::from_vec(vec![
        0.25, 0.25, -0.25, 0.25,
    ])))
}

/// Qubit quantum mechanics in Pauli coordinates.
pub fn build_qubit() -> (Theory, BipartiteForm) {
    let mut transformations = Vec::new();
    for (axis, name) in [(1, "rx"), (2, "ry"), (3, "rz")] {
        transformations.push(Named::new(
            name,
            unitary_channel(&rotation(axis, ROTATION_ANGLE)),
        ));
    }
    let eigenstates = pauli_eigenstates();
    for (label, ket) in &eigenstates {
        let p = ket_projector(ket);
        transformations.push(Named::new(
            format!("proj_{label}"),
            TransformationMatrix(pauli::ptm_from_kraus(&[p]).expect("qubit")),
        ));
    }
    let paulis = pauli::single_qubit_paulis();
    let depolarize = KrausSet::new(
        paulis
            .iter()
            .map(|p| p * Complex64::new(0.5, 0.0))
            .collect(),
    )
    .and_then(|k| ptm_from_kraus(&k))
    .expect("depolarizing Kraus set is complete");
    transformations.push(Named::new("depolarize", depolarize));

    let extremal_states = eigenstates
        .iter()
        .map(|(label, ket)| {
            let coords = pauli::state_coords(&ket_projector(ket)).expect("qubit");
            Named::new(*label, StateVector::from_vec(coords))
        })
        .collect();

    let experiments = vec![
        experiment("measure_z", &["proj_z+", "proj_z-"]),
        experiment("measure_x", &["proj_x+", "proj_x-"]),
        experiment("measure_y", &["proj_y+", "proj_y-"]),
        experiment("rotate_x", &["rx"]),
        experiment("rotate_y", &["ry"]),
        experiment("rotate_z", &["rz"]),
        experiment("depolarize", &["depolarize"]),
    ];

    let form = bell_form();
    let theory = Theory::new(
        "qubit",
        EffectVector::from_vec(vec![2.0, 0.0, 0.0, 0.0]),
        TransformationMatrix::identity(4),
        transformations,
        extremal_states,
        experiments,
        Cone::QuantumChoi { hilbert_dim: 2 },
        Some(form.clone()),
    )
    .expect("built-in qubit theory is well formed");
    (theory, form)
}

fn experiment(name: &str, members: &[&str]) -> Experiment {
    Experiment {
        name: name.to_string(),
        members: members.iter().map(|m| m.to_string()).collect(),
    }
}

/// Classical probability on `n ≥ 1` outcomes in point coordinates.
pub fn build_classical(n: usize) -> Result<(Theory, BipartiteForm)> {
    if n == 0 {
        return Err(Error::Input(
            "classical model needs at least one outcome".into(),
        ));
    }
    let mut transformations = Vec::new();
    for k in 0..n {
        let mut m = DMatrix::zeros(n, n);
        m[(k, k)] = 1.0;
        transformations.push(Named::new(format!("select_{k}"), TransformationMatrix(m)));
    }
    if n >= 2 {
        let shift = DMatrix::from_fn(n, n, |i, j| if i == (j + 1) % n { 1.0 } else { 0.0 });
        transformations.push(Named::new("shift", TransformationMatrix(shift)));
    }
    if n >= 3 {
        let mut swap = DMatrix::identity(n, n);
        swap.swap_columns(0, 1);
        transformations.push(Named::new("swap_01", TransformationMatrix(swap)));
    }
    let reset = DMatrix::from_fn(n, n, |i, _| if i == 0 { 1.0 } else { 0.0 });
    transformations.push(Named::new("reset", TransformationMatrix(reset)));

    let extremal_states = (0..n)
        .map(|k| {
            let mut s = vec![0.0; n];
            s[k] = 1.0;
            Named::new(format!("s{k}"), StateVector::from_vec(s))
        })
        .collect();

    let selects: Vec<String> = (0..n).map(|k| format!("select_{k}")).collect();
    let mut experiments = vec![Experiment {
        name: "measure".into(),
        members: selects,
    }];
    if n >= 2 {
        experiments.push(experiment("shift", &["shift"]));
    }
    experiments.push(experiment("reset", &["reset"]));

    let form = BipartiteForm(DMatrix::identity(n, n) / n as f64);
    let theory = Theory::new(
        format!("classical{n}"),
        EffectVector::from_vec(vec![1.0; n]),
        TransformationMatrix::identity(n),
        transformations,
        extremal_states,
        experiments,
        Cone::ClassicalSubstochastic,
        Some(form.clone()),
    )?;
    Ok((theory, form))
}

/// Names of the built-in models: `qubit` or `classicalN`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Classical(usize),
    Qubit,
}

impl Model {
    pub fn build(self) -> Result<(Theory, BipartiteForm)> {
        match self {
            Model::Classical(n) => build_classical(n),
            Model::Qubit => Ok(build_qubit()),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::Classical(n) => write!(f, "classical{n}"),
            Model::Qubit => write!(f, "qubit"),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "qubit" {
            return Ok(Model::Qubit);
        }
        if let Some(n) = s.strip_prefix("classical") {
            if let Ok(n) = n.parse::<usize>() {
                if n >= 1 {
                    return Ok(Model::Classical(n));
                }
            }
        }
        Err(Error::Unknown {
            kind: "model",
            name: s.to_string(),
        })
    }
}

fn gaussian_complex<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Gaussian matrix orthonormalized column by column (modified Gram-Schmidt).
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let mut m = gaussian_complex(rng, n);
    for j in 0..n {
        for k in 0..j {
            let qk = m.column(k).clone_owned();
            let proj = qk.dotc(&m.column(j));
            let mut col = m.column_mut(j);
            col -= qk * proj;
        }
        let norm = m.column(j).norm();
        let mut col = m.column_mut(j);
        col /= Complex64::new(norm, 0.0);
    }
    m
}

/// One to three Gaussian Kraus operators scaled so `Σ K†K ≤ u·I`, `u ∈ [0.3, 1]`.
pub fn random_kraus<R: Rng>(rng: &mut R, n: usize) -> KrausSet {
    let count = rng.random_range(1..=3);
    let ops: Vec<CMatrix> = (0..count).map(|_| gaussian_complex(rng, n)).collect();
    let mut total = CMatrix::zeros(n, n);
    for k in &ops {
        total += k.adjoint() * k;
    }
    let max = hermitian_eigenvalues(&total).last().copied().unwrap_or(1.0);
    let bound: f64 = rng.random_range(0.3..=1.0);
    let factor = Complex64::new((bound / max).sqrt(), 0.0);
    KrausSet {
        ops: ops.into_iter().map(|k| k * factor).collect(),
    }
}

/// A random physical transformation of `theory`, drawn by cone type.
pub fn sample_transformation<R: Rng>(theory: &Theory, rng: &mut R) -> TransformationMatrix {
    let d = theory.effect_dim();
    match theory.cone {
        Cone::QuantumChoi { hilbert_dim } => {
            let kraus = random_kraus(rng, hilbert_dim);
            TransformationMatrix(
                pauli::ptm_from_kraus(kraus.ops()).expect("power-of-two dimension"),
            )
        }
        Cone::ClassicalSubstochastic => {
            let mut m = DMatrix::from_fn(d, d, |_, _| rng.random::<f64>());
            for mut col in m.column_iter_mut() {
                let target: f64 = rng.random_range(0.3..=1.0);
                let sum = col.sum();
                if sum > 0.0 {
                    col *= target / sum;
                }
            }
            TransformationMatrix(m)
        }
        Cone::Hull => {
            let gens: Vec<&TransformationMatrix> = std::iter::once(&theory.identity)
                .chain(theory.transformations.iter().map(|t| &t.value))
                .collect();
            let weights: Vec<f64> = gens.iter().map(|_| rng.random::<f64>()).collect();
            let total: f64 = weights.iter().sum();
            let mut m = DMatrix::zeros(d, d);
            for (g, w) in gens.iter().zip(&weights) {
                m += &g.0 * (w / total);
            }
            TransformationMatrix(m)
        }
    }
}

/// Deterministic in `seed`: sample `i` comes from stream `i`.
pub fn random_transformation(seed: u64, theory: &Theory) -> TransformationMatrix {
    sample_transformation(theory, &mut rng::stream(seed, 0))
}

pub fn random_transformations(
    theory: &Theory,
    seed: u64,
    count: usize,
) -> Vec<TransformationMatrix> {
    (0..count)
        .map(|i| sample_transformation(theory, &mut rng::stream(seed, i as u64)))
        .collect()
}

/// A random normalized state: Ginibre density matrix, uniform simplex point,
/// or convex mixture of declared extremal states.
pub fn sample_state<R: Rng>(theory: &Theory, rng: &mut R) -> StateVector {
    match theory.cone {
        Cone::QuantumChoi { hilbert_dim } => {
            let g = gaussian_complex(rng, hilbert_dim);
            let rho = &g * g.adjoint();
            let tr = rho.trace();
            let rho = rho / tr;
            StateVector::from_vec(pauli::state_coords(&rho).expect("power-of-two dimension"))
        }
        Cone::ClassicalSubstochastic => {
            let w: Vec<f64> = (0..theory.effect_dim())
                .map(|_| -(1.0 - rng.random::<f64>()).ln())
                .collect();
            let total: f64 = w.iter().sum();
            StateVector::from_vec(w.into_iter().map(|x| x / total).collect())
        }
        Cone::Hull => {
            let w: Vec<f64> = theory
                .extremal_states
                .iter()
                .map(|_| rng.random::<f64>())
                .collect();
            let total: f64 = w.iter().sum();
            let mut s = DVector::zeros(theory.effect_dim());
            for (st, wi) in theory.extremal_states.iter().zip(&w) {
                s += &st.value.0 * (wi / total);
            }
            StateVector(s)
        }
    }
}

/// `c₁A₁ + c₂A₂` with complex Gaussian coefficients and physical `A_i`.
pub fn sample_algebra_element<R: Rng>(theory: &Theory, rng: &mut R) -> CMatrix {
    let a = sample_transformation(theory, rng);
    let b = sample_transformation(theory, rng);
    let c1 = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let c2 = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    a.0.map(|x| c1 * x) + b.0.map(|x| c2 * x)
}
