//! Single-system operational theories.
//!
//! Effects are row vectors, states are column vectors and a transformation is
//! stored as its right-action matrix on effects: the effect `b` followed by
//! `A` is `b · R_A`, and the unnormalized state after `A` is `R_A · s`.
//!
//! Composition convention, used by every module: `B∘A` means "A occurs, then
//! B", and `R_{B∘A} = R_B · R_A`. So `compose(a, b)` returns `R_a · R_b`.

use nalgebra::{DMatrix, DVector, RowDVector};
use serde::{Deserialize, Serialize};

use crate::bipartite::BipartiteForm;
use crate::check::CheckRecord;
use crate::cone::{self, ConeVerdict};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{max_abs, numerical_rank};

/// Default absolute tolerance for equality checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TransformationMatrix(pub DMatrix<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct EffectVector(pub RowDVector<f64>);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(pub DVector<f64>);

impl TransformationMatrix {
    pub fn identity(d: usize) -> Self {
        TransformationMatrix(DMatrix::identity(d, d))
    }

    pub fn zeros(d: usize) -> Self {
        TransformationMatrix(DMatrix::zeros(d, d))
    }

    /// Builds a square matrix from rows; errors on ragged or non-square input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        for row in rows {
            check_dim("transformation row", d, row.len())?;
        }
        Ok(TransformationMatrix(DMatrix::from_fn(d, d, |i, j| {
            rows[i][j]
        })))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

impl EffectVector {
    pub fn from_vec(coords: Vec<f64>) -> Self {
        EffectVector(RowDVector::from_vec(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The effect of "this effect after `a`": `b · R_a`.
    pub fn after(&self, a: &TransformationMatrix) -> EffectVector {
        EffectVector(&self.0 * &a.0)
    }
}

impl StateVector {
    pub fn from_vec(coords: Vec<f64>) -> Self {
        StateVector(DVector::from_vec(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// ω(ā) = ā · s.
pub fn probability(state: &StateVector, effect: &EffectVector) -> Result<f64> {
    check_dim("effect", state.dim(), effect.dim())?;
    Ok(effect.0.dot(&state.0.transpose()))
}

/// Matrix of `a∘b` ("b occurs, then a").
pub fn compose(a: &TransformationMatrix, b: &TransformationMatrix) -> Result<TransformationMatrix> {
    check_dim("composition", a.dim(), b.dim())?;
    Ok(TransformationMatrix(&a.0 * &b.0))
}

pub fn add_transformations(
    a: &TransformationMatrix,
    b: &TransformationMatrix,
) -> Result<TransformationMatrix> {
    check_dim("sum", a.dim(), b.dim())?;
    Ok(TransformationMatrix(&a.0 + &b.0))
}

pub fn scale(lambda: f64, a: &TransformationMatrix) -> TransformationMatrix {
    TransformationMatrix(&a.0 * lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Cone {
    ClassicalSubstochastic,
    QuantumChoi {
        hilbert_dim: usize,
    },
    /// Nonnegative combinations of the listed generators (and the identity)
    /// whose effect is dominated by the unit effect.
    Hull,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Named<T> {
    pub name: String,
    pub value: T,
}

impl<T> Named<T> {
    pub fn new(name: impl Into<String>, value: T) -> Self {
        Named {
            name: name.into(),
            value,
        }
    }
}

/// A declared experiment: names of transformations whose effects sum to `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    pub name: String,
    pub unit_effect: EffectVector,
    pub identity: TransformationMatrix,
    pub transformations: Vec<Named<TransformationMatrix>>,
    pub extremal_states: Vec<Named<StateVector>>,
    pub experiments: Vec<Experiment>,
    pub cone: Cone,
    pub faithful_state: Option<BipartiteForm>,
}

impl Theory {
    /// Checks shapes and cross-references; axiom checks live in [`Theory::validate`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        unit_effect: EffectVector,
        identity: TransformationMatrix,
        transformations: Vec<Named<TransformationMatrix>>,
        extremal_states: Vec<Named<StateVector>>,
        experiments: Vec<Experiment>,
        cone: Cone,
        faithful_state: Option<BipartiteForm>,
    ) -> Result<Self> {
        let d = unit_effect.dim();
        if d == 0 {
            return Err(Error::Input("effect dimension must be positive".into()));
        }
        check_dim("identity", d, identity.dim())?;
        for t in &transformations {
            check_dim(&format!("transformation `{}`", t.name), d, t.value.dim())?;
        }
        for s in &extremal_states {
            check_dim(&format!("state `{}`", s.name), d, s.value.dim())?;
        }
        if let Some(f) = &faithful_state {
            check_dim("faithful state", d, f.dim())?;
        }
        if let Cone::QuantumChoi { hilbert_dim } = cone {
            check_dim(
                "quantum-choi effect dimension",
                hilbert_dim * hilbert_dim,
                d,
            )?;
            crate::pauli::qubit_count(hilbert_dim)?;
        }
        let theory = Theory {
            name: name.into(),
            unit_effect,
            identity,
            transformations,
            extremal_states,
            experiments,
            cone,
            faithful_state,
        };
        for exp in &theory.experiments {
            theory.experiment_members(exp)?;
        }
        Ok(theory)
    }

    pub fn effect_dim(&self) -> usize {
        self.unit_effect.dim()
    }

    pub fn transformation(&self, name: &str) -> Result<&TransformationMatrix> {
        self.transformations
            .iter()
            .find(|t| t.name == name)
            .map(|t| &t.value)
            .ok_or_else(|| Error::Unknown {
                kind: "transformation",
                name: name.to_string(),
            })
    }

    pub fn state(&self, name: &str) -> Result<&StateVector> {
        self.extremal_states
            .iter()
            .find(|s| s.name == name)
            .map(|s| &s.value)
            .ok_or_else(|| Error::Unknown {
                kind: "state",
                name: name.to_string(),
            })
    }

    pub fn experiment_members(&self, exp: &Experiment) -> Result<Vec<&TransformationMatrix>> {
        exp.members.iter().map(|m| self.transformation(m)).collect()
    }

    /// `e · R_A`.
    pub fn effect_of(&self, a: &TransformationMatrix) -> EffectVector {
        self.unit_effect.after(a)
    }

    /// Bayes conditioning: returns `(R_A s / ω(ā), ω(ā))`.
    pub fn conditional_state(
        &self,
        state: &StateVector,
        a: &TransformationMatrix,
        tol: f64,
    ) -> Result<(StateVector, f64)> {
        check_dim("state", self.effect_dim(), state.dim())?;
        check_dim("transformation", self.effect_dim(), a.dim())?;
        let p = probability(state, &self.effect_of(a))?;
        if p <= tol {
            return Err(Error::ZeroProbability { probability: p });
        }
        Ok((StateVector(&a.0 * &state.0 / p), p))
    }

    /// Worst `ω(ā) + ω(b̄)` over the declared extremal states.
    ///
    /// The supremum over all states is attained on extreme points, so this
    /// is exact only when the declared list generates the state set.
    pub fn worst_joint_probability(
        &self,
        a: &TransformationMatrix,
        b: &TransformationMatrix,
    ) -> f64 {
        let ea = self.effect_of(a);
        let eb = self.effect_of(b);
        self.extremal_states
            .iter()
            .map(|s| ea.0.dot(&s.value.0.transpose()) + eb.0.dot(&s.value.0.transpose()))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn are_coexistent(
        &self,
        a: &TransformationMatrix,
        b: &TransformationMatrix,
        tol: f64,
    ) -> bool {
        self.worst_joint_probability(a, b) <= 1.0 + tol
    }

    /// Sum of two transformations, refused unless they are coexistent.
    pub fn add_physical(
        &self,
        a: &TransformationMatrix,
        b: &TransformationMatrix,
        tol: f64,
    ) -> Result<TransformationMatrix> {
        let worst = self.worst_joint_probability(a, b);
        if worst > 1.0 + tol {
            return Err(Error::NotCoexistent { worst });
        }
        add_transformations(a, b)
    }

    /// `λA` for a physical rescaling, `0 ≤ λ ≤ 1`.
    pub fn scale_physical(
        &self,
        lambda: f64,
        a: &TransformationMatrix,
    ) -> Result<TransformationMatrix> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Input(format!(
                "physical rescaling needs 0 <= λ <= 1, got {lambda}"
            )));
        }
        Ok(scale(lambda, a))
    }

    pub fn informationally_equivalent(
        &self,
        a: &TransformationMatrix,
        b: &TransformationMatrix,
        tol: f64,
    ) -> bool {
        let diff = &self.effect_of(a).0 - &self.effect_of(b).0;
        diff.iter().all(|x| x.abs() <= tol)
    }

    /// Conditional states agree on every declared extremal state where either
    /// transformation occurs with probability above `tol`.
    pub fn dynamically_equivalent(
        &self,
        a: &TransformationMatrix,
        b: &TransformationMatrix,
        tol: f64,
    ) -> bool {
        self.extremal_states.iter().all(|s| {
            match (
                self.conditional_state(&s.value, a, tol),
                self.conditional_state(&s.value, b, tol),
            ) {
                (Ok((sa, _)), Ok((sb, _))) => (&sa.0 - &sb.0).iter().all(|x| x.abs() <= tol),
                (Err(_), Err(_)) => true,
                _ => false,
            }
        })
    }

    /// `Σ l_i = e` within `tol`.
    pub fn is_observable(&self, effects: &[EffectVector], tol: f64) -> bool {
        let d = self.effect_dim();
        if effects.iter().any(|l| l.dim() != d) {
            return false;
        }
        let sum = effects
            .iter()
            .fold(RowDVector::zeros(d), |acc, l| acc + &l.0);
        (sum - &self.unit_effect.0).iter().all(|x| x.abs() <= tol)
    }

    /// The effects span the whole effect space.
    pub fn is_informationally_complete(&self, effects: &[EffectVector], tol: f64) -> bool {
        effect_rank(effects, self.effect_dim(), tol) == self.effect_dim()
    }

    /// Informationally complete with exactly `d` effects.
    pub fn is_minimal_informationally_complete(&self, effects: &[EffectVector], tol: f64) -> bool {
        effects.len() == self.effect_dim() && self.is_informationally_complete(effects, tol)
    }

    pub fn cone_verdict(&self, r: &TransformationMatrix) -> ConeVerdict {
        cone::verdict(self, r)
    }

    pub fn is_physical(&self, r: &TransformationMatrix, tol: f64) -> bool {
        self.cone_verdict(r).is_member(tol)
    }

    /// Axiom checks; failures are report entries, never errors.
    pub fn validate(&self, tol: f64) -> ValidationReport {
        let e = &self.unit_effect;
        let d = self.effect_dim();

        let identity_residual = max_abs(&(&self.identity.0 - DMatrix::<f64>::identity(d, d)))
            .max(max_abs_row(&(&e.after(&self.identity).0 - &e.0)));

        let normalization = self
            .extremal_states
            .iter()
            .map(|s| (e.0.dot(&s.value.0.transpose()) - 1.0).abs())
            .fold(0.0, f64::max);

        let mut range = 0.0f64;
        for t in &self.transformations {
            let eff = self.effect_of(&t.value);
            for s in &self.extremal_states {
                let p = eff.0.dot(&s.value.0.transpose());
                range = range.max(-p).max(p - 1.0);
            }
        }

        let mut completeness = 0.0f64;
        for exp in &self.experiments {
            // members were resolved at construction
            let members = self.experiment_members(exp).unwrap_or_default();
            let sum = members
                .iter()
                .fold(RowDVector::zeros(d), |acc, t| acc + self.effect_of(t).0);
            completeness = completeness.max(max_abs_row(&(sum - &e.0)));
        }

        let cone_residual = self
            .transformations
            .iter()
            .map(|t| self.cone_verdict(&t.value).residual())
            .fold(0.0, f64::max);

        ValidationReport {
            checks: vec![
                CheckRecord::against("identity_neutrality", identity_residual, tol),
                CheckRecord::against("state_normalization", normalization, tol),
                CheckRecord::against("effect_range", range.max(0.0), tol),
                CheckRecord::against("experiment_completeness", completeness, tol),
                CheckRecord::against("cone_membership", cone_residual, tol),
            ],
        }
    }
}

fn max_abs_row(v: &RowDVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Numerical rank of the matrix whose rows are the given effects.
pub fn effect_rank(effects: &[EffectVector], d: usize, tol: f64) -> usize {
    if effects.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(effects.len(), d, |i, j| effects[i].0[j]);
    numerical_rank(&m, tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckRecord>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        crate::check::all_passed(&self.checks)
    }

    pub fn worst_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Bayes chaining, monoid laws and convex closure over sampled transformations.
///
/// `mixing` supplies the convex weights used for the closure check, one per
/// consecutive sample pair.
pub fn property_suite(
    theory: &Theory,
    samples: &[TransformationMatrix],
    mixing: &[f64],
    tol: f64,
) -> Vec<CheckRecord> {
    let id = &theory.identity;
    let mut bayes = 0.0f64;
    let mut assoc = 0.0f64;
    let mut neutral = 0.0f64;
    let mut convex = 0.0f64;

    for (k, a) in samples.iter().enumerate() {
        let b = &samples[(k + 1) % samples.len()];
        let c = &samples[(k + 2) % samples.len()];

        let ba = TransformationMatrix(&b.0 * &a.0);
        for s in &theory.extremal_states {
            if let Ok((conditioned, p)) = theory.conditional_state(&s.value, a, tol) {
                let direct = probability(&s.value, &theory.effect_of(&ba)).unwrap_or(f64::NAN);
                let chained =
                    probability(&conditioned, &theory.effect_of(b)).unwrap_or(f64::NAN) * p;
                bayes = bayes.max((direct - chained).abs());
            }
        }

        let left = (&a.0 * &b.0) * &c.0;
        let right = &a.0 * (&b.0 * &c.0);
        assoc = assoc.max(max_abs(&(left - right)));

        let il = &id.0 * &a.0;
        let ir = &a.0 * &id.0;
        neutral = neutral
            .max(max_abs(&(il - &a.0)))
            .max(max_abs(&(ir - &a.0)));

        let lambda = mixing.get(k).copied().unwrap_or(0.5);
        let mix = TransformationMatrix(&a.0 * lambda + &b.0 * (1.0 - lambda));
        convex = convex.max(theory.cone_verdict(&mix).residual());
    }

    vec![
        CheckRecord::against("bayes_chaining", bayes, 1e-10),
        CheckRecord::against("monoid_associativity", assoc, 1e-12),
        CheckRecord::against("monoid_identity", neutral, 0.0),
        CheckRecord::against("convex_closure", convex, tol),
    ]
}
