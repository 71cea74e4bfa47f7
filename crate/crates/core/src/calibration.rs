//! Identifying an unknown transformation from joint statistics on half of a
//! faithful state.
//!
//! The transformation `A` acts on system 1; fiducial observables `{f_i}` and
//! `{g_j}` are read out on systems 1 and 2. Outcome `(i, j)` has probability
//! `p_ij = (f_i·R_A)·F·g_jᵀ`, and `1 − Σp_ij` is the probability that `A`
//! does not occur at all. Since `p = Fid₁ · R_A · (F·Fid₂ᵀ)`, ordinary least
//! squares gives `R̂ = Fid₁⁺ · p̂ · (F·Fid₂ᵀ)⁺`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::bipartite::BipartiteForm;
use crate::cone;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{max_abs, pseudo_inverse};
use crate::rng;
use crate::theory::{EffectVector, Theory, TransformationMatrix};

/// Outcome counts: `table[i][j]` for fiducial pair `(i, j)` plus the
/// no-occurrence cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counts {
    pub table: Vec<Vec<u64>>,
    pub no_occurrence: u64,
}

impl Counts {
    pub fn shots(&self) -> u64 {
        self.table.iter().flatten().sum::<u64>() + self.no_occurrence
    }

    pub fn frequencies(&self) -> Result<DMatrix<f64>> {
        let n = self.shots();
        if n == 0 {
            return Err(Error::Input("no shots recorded".into()));
        }
        let rows = self.table.len();
        let cols = self.table.first().map_or(0, Vec::len);
        Ok(DMatrix::from_fn(rows, cols, |i, j| {
            self.table[i][j] as f64 / n as f64
        }))
    }
}

/// Outcome probabilities of one transformation.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeProbabilities {
    pub table: DMatrix<f64>,
    pub no_occurrence: f64,
}

#[derive(Debug, Clone)]
pub struct Calibrator {
    form: BipartiteForm,
    first: Vec<EffectVector>,
    second: Vec<EffectVector>,
    left_pinv: DMatrix<f64>,
    right_pinv: DMatrix<f64>,
}

impl Calibrator {
    /// Both fiducial sets must be observables of `theory`; the linear model
    /// must have full rank on both sides, which needs a faithful `form`.
    pub fn new(
        form: BipartiteForm,
        theory: &Theory,
        first: Vec<EffectVector>,
        second: Vec<EffectVector>,
        tol: f64,
    ) -> Result<Self> {
        let d = theory.effect_dim();
        check_dim("bipartite form", d, form.dim())?;
        for (label, set) in [("first", &first), ("second", &second)] {
            if !theory.is_observable(set, tol) {
                return Err(Error::Input(format!(
                    "{label} fiducial set is not an observable (effects must sum to e)"
                )));
            }
        }
        let fid1 = effect_matrix(&first, d);
        let right = &form.0 * effect_matrix(&second, d).transpose();
        let (left_pinv, left_rank) = pseudo_inverse(&fid1, tol);
        if left_rank < d {
            return Err(Error::Identifiability {
                rank: left_rank,
                dim: d,
            });
        }
        let (right_pinv, right_rank) = pseudo_inverse(&right.transpose(), tol);
        if right_rank < d {
            return Err(Error::Identifiability {
                rank: right_rank,
                dim: d,
            });
        }
        Ok(Calibrator {
            form,
            first,
            second,
            left_pinv,
            right_pinv: right_pinv.transpose(),
        })
    }

    /// Faithful state from the theory; the same default fiducials on both sides.
    pub fn for_theory(theory: &Theory, tol: f64) -> Result<Self> {
        let form = theory.faithful_state.clone().ok_or_else(|| {
            Error::Input(format!(
                "theory `{}` declares no faithful state",
                theory.name
            ))
        })?;
        let fid = default_fiducials(theory)?;
        Calibrator::new(form, theory, fid.clone(), fid, tol)
    }

    pub fn first(&self) -> &[EffectVector] {
        &self.first
    }

    pub fn second(&self) -> &[EffectVector] {
        &self.second
    }

    /// Errors with [`Error::NegativeProbability`] below `−tol`; tiny negatives are clipped.
    pub fn probabilities(
        &self,
        a: &TransformationMatrix,
        tol: f64,
    ) -> Result<OutcomeProbabilities> {
        check_dim("transformation", self.form.dim(), a.dim())?;
        let d = self.form.dim();
        let fid1 = effect_matrix(&self.first, d);
        let fid2 = effect_matrix(&self.second, d);
        let mut table = fid1 * &a.0 * &self.form.0 * fid2.transpose();
        for p in table.iter_mut() {
            if *p < -tol {
                return Err(Error::NegativeProbability { probability: *p });
            }
            *p = p.max(0.0);
        }
        let rest = 1.0 - table.sum();
        if rest < -tol {
            return Err(Error::NegativeProbability { probability: rest });
        }
        Ok(OutcomeProbabilities {
            table,
            no_occurrence: rest.max(0.0),
        })
    }

    /// Multinomial draw of `shots` outcomes, by sequential conditional binomials.
    pub fn simulate(
        &self,
        a: &TransformationMatrix,
        shots: u64,
        seed: u64,
        tol: f64,
    ) -> Result<Counts> {
        let probs = self.probabilities(a, tol)?;
        let rows = probs.table.nrows();
        let cols = probs.table.ncols();
        let cells: Vec<f64> = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| probs.table[(i, j)])
            .chain(std::iter::once(probs.no_occurrence))
            .collect();
        let drawn = multinomial(&mut rng::stream(seed, 0), shots, &cells);
        let table = (0..rows)
            .map(|i| drawn[i * cols..(i + 1) * cols].to_vec())
            .collect();
        Ok(Counts {
            table,
            no_occurrence: drawn[rows * cols],
        })
    }

    /// Least-squares `R̂` from observed frequencies.
    pub fn estimate(&self, counts: &Counts) -> Result<TransformationMatrix> {
        let freq = counts.frequencies()?;
        check_dim("count rows", self.first.len(), freq.nrows())?;
        check_dim("count columns", self.second.len(), freq.ncols())?;
        Ok(self.estimate_from_probabilities(&freq))
    }

    pub fn estimate_from_probabilities(&self, p: &DMatrix<f64>) -> TransformationMatrix {
        TransformationMatrix(&self.left_pinv * p * &self.right_pinv)
    }

    /// Root-mean-square Frobenius error of the estimate after `shots` draws,
    /// from the exact multinomial covariance.
    pub fn expected_error(&self, a: &TransformationMatrix, shots: u64, tol: f64) -> Result<f64> {
        if shots == 0 {
            return Err(Error::Input("no shots recorded".into()));
        }
        let p = self.probabilities(a, tol)?.table;
        let d = self.form.dim();
        let mut total = 0.0;
        for r in 0..d {
            for c in 0..d {
                let mut second = 0.0;
                let mut mean = 0.0;
                for i in 0..p.nrows() {
                    for j in 0..p.ncols() {
                        let w = self.left_pinv[(r, i)] * self.right_pinv[(j, c)];
                        second += w * w * p[(i, j)];
                        mean += w * p[(i, j)];
                    }
                }
                total += second - mean * mean;
            }
        }
        Ok((total.max(0.0) / shots as f64).sqrt())
    }
}

fn effect_matrix(effects: &[EffectVector], d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(effects.len(), d, |i, j| effects[i].0[j])
}

/// `counts[k] ~ Multinomial(n, probs)`; `probs` must sum to one.
pub fn multinomial<R: Rng>(rng: &mut R, n: u64, probs: &[f64]) -> Vec<u64> {
    let mut out = vec![0u64; probs.len()];
    let mut remaining = n;
    let mut mass = 1.0f64;
    for (k, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if k + 1 == probs.len() {
            out[k] = remaining;
            break;
        }
        let q = if mass > 0.0 {
            (p / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let x = Binomial::new(remaining, q)
            .map(|b| b.sample(rng))
            .unwrap_or(0);
        out[k] = x;
        remaining -= x;
        mass -= p;
    }
    out
}

/// Effects of all declared experiments, each weighted by one over the number
/// of experiments: an observable that is informationally complete whenever
/// the experiments jointly span the effect space.
pub fn default_fiducials(theory: &Theory) -> Result<Vec<EffectVector>> {
    let measuring: Vec<_> = theory
        .experiments
        .iter()
        .filter(|e| e.members.len() > 1)
        .collect();
    let chosen: Vec<_> = if measuring.is_empty() {
        theory.experiments.iter().collect()
    } else {
        measuring
    };
    if chosen.is_empty() {
        return Err(Error::Input(format!(
            "theory `{}` declares no experiments to build fiducials from",
            theory.name
        )));
    }
    let weight = 1.0 / chosen.len() as f64;
    let mut out = Vec::new();
    for exp in chosen {
        for t in theory.experiment_members(exp)? {
            out.push(EffectVector(theory.effect_of(t).0 * weight));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationError {
    pub frobenius: f64,
    /// Largest `|ω(â) − ω(a)|` over declared extremal states.
    pub worst_probability: f64,
}

pub fn estimation_error(
    estimate: &TransformationMatrix,
    truth: &TransformationMatrix,
    theory: &Theory,
) -> EstimationError {
    let diff = &estimate.0 - &truth.0;
    let eff = theory.effect_of(&TransformationMatrix(diff.clone()));
    let worst_probability = theory
        .extremal_states
        .iter()
        .map(|s| eff.0.dot(&s.value.0.transpose()).abs())
        .fold(0.0, f64::max);
    EstimationError {
        frobenius: diff.norm(),
        worst_probability,
    }
}

/// Optional post-step: clip the estimate into the theory's cone.
pub fn project_estimate(theory: &Theory, estimate: &TransformationMatrix) -> TransformationMatrix {
    cone::project_to_cone(theory, estimate)
}

/// Largest entry of `|R̂ − R|`, for noiseless round-trip checks.
pub fn round_trip_residual(cal: &Calibrator, a: &TransformationMatrix, tol: f64) -> Result<f64> {
    let p = cal.probabilities(a, tol)?;
    Ok(max_abs(
        &(cal.estimate_from_probabilities(&p.table).0 - &a.0),
    ))
}
