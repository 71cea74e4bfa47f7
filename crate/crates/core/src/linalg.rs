//! Dense linear algebra kernels.
//!
//! Every spectral quantity in the crate (sign operators, ranks, inverses,
//! quotient bases, operator norms) goes through [`SymmetricEigen`], a cyclic
//! Jacobi solver. The sweep order is fixed and the stopping rule is
//! `off(A) <= 1e-14 * ||A||_F`, so results are reproducible bit for bit on a
//! given platform.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Relative off-diagonal threshold at which Jacobi sweeps stop.
pub const JACOBI_THRESHOLD: f64 = 1e-14;
const MAX_SWEEPS: usize = 100;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigendecomposition `A = Q diag(values) Qᵀ` of a real symmetric matrix.
///
/// Eigenvalues are sorted ascending; each eigenvector is signed so that its
/// largest-magnitude component is positive.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
    pub sweeps: usize,
}

impl SymmetricEigen {
    /// Runs cyclic Jacobi on the symmetric part of `a`.
    ///
    /// Panics if `a` is not square.
    pub fn new(a: &DMatrix<f64>) -> Self {
        assert!(a.is_square(), "symmetric eigensolver needs a square matrix");
        let n = a.nrows();
        let mut a = (a + a.transpose()) * 0.5;
        let mut v = DMatrix::<f64>::identity(n, n);
        let scale = a.norm();
        let mut sweeps = 0;

        if scale > 0.0 {
            while sweeps < MAX_SWEEPS {
                if off_diagonal_norm(&a) <= JACOBI_THRESHOLD * scale {
                    break;
                }
                sweeps += 1;
                for p in 0..n {
                    for q in (p + 1)..n {
                        let apq = a[(p, q)];
                        if apq == 0.0 {
                            continue;
                        }
                        let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                        let c = 1.0 / (t * t + 1.0).sqrt();
                        let s = t * c;
                        rotate_columns(&mut a, p, q, c, s);
                        rotate_rows(&mut a, p, q, c, s);
                        rotate_columns(&mut v, p, q, c, s);
                        a[(p, q)] = 0.0;
                        a[(q, p)] = 0.0;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));

        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
        let mut eigenvectors = DMatrix::<f64>::zeros(n, n);
        for (col, &i) in order.iter().enumerate() {
            let mut vec = v.column(i).clone_owned();
            let mut pivot = 0;
            for k in 1..n {
                if vec[k].abs() > vec[pivot].abs() {
                    pivot = k;
                }
            }
            if n > 0 && vec[pivot] < 0.0 {
                vec.neg_mut();
            }
            eigenvectors.set_column(col, &vec);
        }

        SymmetricEigen {
            eigenvalues,
            eigenvectors,
            sweeps,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest eigenvalue magnitude.
    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of eigenvalues with `|λ| > rel_tol * max|λ|`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let cut = rel_tol * self.max_abs();
        self.eigenvalues.iter().filter(|x| x.abs() > cut).count()
    }

    /// `Q diag(f(λ)) Qᵀ`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            let w = f(self.eigenvalues[k]);
            if w == 0.0 {
                continue;
            }
            let q = self.eigenvectors.column(k);
            out += w * q * q.transpose();
        }
        out
    }
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
}

fn rotate_rows(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..m.ncols() {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
}

/// Real symmetric embedding `[[Re H, -Im H], [Im H, Re H]]` of a Hermitian matrix.
fn real_embedding(h: &CMatrix) -> DMatrix<f64> {
    let n = h.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            m[(i, j)] = z.re;
            m[(i + n, j + n)] = z.re;
            m[(i + n, j)] = z.im;
            m[(i, j + n)] = -z.im;
        }
    }
    m
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Computed through the real embedding, where every eigenvalue appears twice;
/// each returned value is the mean of its pair.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    assert!(h.is_square(), "Hermitian eigenvalues need a square matrix");
    let hs = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(&real_embedding(&hs));
    eig.eigenvalues
        .as_slice()
        .chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect()
}

/// Applies `f` spectrally to a Hermitian matrix.
pub fn hermitian_map(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = h.nrows();
    let hs = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mapped = SymmetricEigen::new(&real_embedding(&hs)).map(f);
    CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(mapped[(i, j)], mapped[(i + n, j)])
    })
}

/// Moore-Penrose pseudo-inverse through the eigendecomposition of `MᵀM`.
///
/// Eigenvalues of `MᵀM` at or below `rel_tol * λ_max` are discarded; the
/// retained count is returned as the numerical rank.
pub fn pseudo_inverse(m: &DMatrix<f64>, rel_tol: f64) -> (DMatrix<f64>, usize) {
    let gram = m.transpose() * m;
    let eig = SymmetricEigen::new(&gram);
    let cut = rel_tol * eig.max_abs();
    let rank = eig.eigenvalues.iter().filter(|&&l| l > cut).count();
    let inv = eig.map(|l| if l > cut { 1.0 / l } else { 0.0 });
    (inv * m.transpose(), rank)
}

/// Numerical rank of a rectangular matrix: eigenvalues of `MᵀM` above
/// `rel_tol * λ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let gram = if m.nrows() < m.ncols() {
        m * m.transpose()
    } else {
        m.transpose() * m
    };
    let eig = SymmetricEigen::new(&gram);
    let cut = rel_tol * eig.max_abs();
    eig.eigenvalues.iter().filter(|&&l| l > cut).count()
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Largest entry modulus of a complex matrix.
pub fn cmax_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Largest singular value of a complex matrix, from the Hermitian eigenproblem of `MᴴM`.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    hermitian_eigenvalues(&gram)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}
