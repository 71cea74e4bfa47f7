//! Pauli coordinates for systems of `k` qubits (Hilbert dimension `n = 2^k`).
//!
//! Effects carry `a_μ = Tr[E σ_μ]`, states carry `s_μ = Tr[ρ σ_μ] / n`, so a
//! probability is the plain dot product `a · s = Tr[E ρ]`. The unit effect is
//! `(n, 0, ..., 0)`. A map with Schrödinger action `ρ ↦ Λ(ρ)` has the
//! right-action matrix `R_μν = Tr[Λ*(σ_μ) σ_ν] / n`, where `Λ*` is the dual
//! (Heisenberg) map; states transform as `s ↦ R s`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `[σ_0, σ_x, σ_y, σ_z]`.
pub fn single_qubit_paulis() -> [CMatrix; 4] {
    [
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
        CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

/// Number of qubits for a Hilbert dimension, if it is a power of two.
pub fn qubit_count(hilbert_dim: usize) -> Result<usize> {
    if hilbert_dim >= 2 && hilbert_dim.is_power_of_two() {
        Ok(hilbert_dim.trailing_zeros() as usize)
    } else {
        Err(Error::Input(format!(
            "Pauli coordinates need a power-of-two Hilbert dimension, got {hilbert_dim}"
        )))
    }
}

/// Pauli strings `σ_{μ1} ⊗ ... ⊗ σ_{μk}` in lexicographic order (first factor slowest).
pub fn pauli_basis(hilbert_dim: usize) -> Result<Vec<CMatrix>> {
    let k = qubit_count(hilbert_dim)?;
    let single = single_qubit_paulis();
    let mut basis = vec![CMatrix::from_element(1, 1, ONE)];
    for _ in 0..k {
        basis = basis
            .iter()
            .flat_map(|b| single.iter().map(move |s| b.kronecker(s)))
            .collect();
    }
    Ok(basis)
}

fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    // Tr[AB] without forming the product
    let mut acc = ZERO;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `a_μ = Re Tr[E σ_μ]`.
pub fn effect_coords(effect: &CMatrix) -> Result<Vec<f64>> {
    let basis = pauli_basis(effect.nrows())?;
    Ok(basis.iter().map(|s| trace_product(effect, s).re).collect())
}

/// `s_μ = Re Tr[ρ σ_μ] / n`.
pub fn state_coords(rho: &CMatrix) -> Result<Vec<f64>> {
    let n = rho.nrows();
    let basis = pauli_basis(n)?;
    Ok(basis
        .iter()
        .map(|s| trace_product(rho, s).re / n as f64)
        .collect())
}

/// `E = (1/n) Σ a_μ σ_μ`.
pub fn effect_operator(coords: &[f64], hilbert_dim: usize) -> Result<CMatrix> {
    let basis = pauli_basis(hilbert_dim)?;
    check_len(coords.len(), basis.len())?;
    let scale = 1.0 / hilbert_dim as f64;
    Ok(combine(&basis, coords.iter().map(|a| a * scale)))
}

/// `ρ = Σ s_μ σ_μ`.
pub fn state_operator(coords: &[f64], hilbert_dim: usize) -> Result<CMatrix> {
    let basis = pauli_basis(hilbert_dim)?;
    check_len(coords.len(), basis.len())?;
    Ok(combine(&basis, coords.iter().copied()))
}

fn combine(basis: &[CMatrix], weights: impl Iterator<Item = f64>) -> CMatrix {
    let n = basis[0].nrows();
    let mut out = CMatrix::zeros(n, n);
    for (b, w) in basis.iter().zip(weights) {
        out += b * Complex64::new(w, 0.0);
    }
    out
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    crate::error::check_dim("Pauli coordinates", expected, found)
}

/// Right-action matrix of the map `ρ ↦ Σ K ρ K†`.
pub fn ptm_from_kraus(kraus: &[CMatrix]) -> Result<DMatrix<f64>> {
    let n = kraus
        .first()
        .map(|k| k.nrows())
        .ok_or_else(|| Error::Input("empty Kraus set".into()))?;
    let basis = pauli_basis(n)?;
    let d = basis.len();
    let dual: Vec<CMatrix> = basis
        .iter()
        .map(|s| {
            let mut acc = CMatrix::zeros(n, n);
            for k in kraus {
                acc += k.adjoint() * s * k;
            }
            acc
        })
        .collect();
    Ok(DMatrix::from_fn(d, d, |mu, nu| {
        trace_product(&dual[mu], &basis[nu]).re / n as f64
    }))
}

/// Choi matrix `J = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|) = (1/n) Σ R_μν σ_νᵀ ⊗ σ_μ`.
pub fn choi_from_ptm(ptm: &DMatrix<f64>, hilbert_dim: usize) -> Result<CMatrix> {
    let basis = pauli_basis(hilbert_dim)?;
    let d = basis.len();
    crate::error::check_dim("transfer matrix", d, ptm.nrows())?;
    crate::error::check_dim("transfer matrix", d, ptm.ncols())?;
    let n2 = hilbert_dim * hilbert_dim;
    let mut j = CMatrix::zeros(n2, n2);
    let scale = 1.0 / hilbert_dim as f64;
    for nu in 0..d {
        let input = basis[nu].transpose();
        for mu in 0..d {
            let w = ptm[(mu, nu)] * scale;
            if w != 0.0 {
                j += input.kronecker(&basis[mu]) * Complex64::new(w, 0.0);
            }
        }
    }
    Ok(j)
}

/// Inverse of [`choi_from_ptm`]: `R_μν = Re Tr[J (σ_νᵀ ⊗ σ_μ)] / n`.
pub fn ptm_from_choi(choi: &CMatrix, hilbert_dim: usize) -> Result<DMatrix<f64>> {
    let basis = pauli_basis(hilbert_dim)?;
    let d = basis.len();
    crate::error::check_dim("Choi matrix", hilbert_dim * hilbert_dim, choi.nrows())?;
    Ok(DMatrix::from_fn(d, d, |mu, nu| {
        let probe = basis[nu].transpose().kronecker(&basis[mu]);
        trace_product(choi, &probe).re / hilbert_dim as f64
    }))
}
