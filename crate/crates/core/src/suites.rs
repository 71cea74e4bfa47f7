//! Property suites over seeded samples, one per front-end command.
//!
//! Every suite returns its check records and a JSON data block with the
//! measured quantities. Samples are drawn from [`crate::rng::stream`] with
//! fixed stream offsets so each suite is reproducible in isolation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::{json, Map, Value};

use crate::bipartite::{
    find_preparing_transformation, is_dynamically_faithful, is_preparationally_faithful,
    FaithfulForm, PreparationTarget, Side,
};
use crate::calibration::{estimation_error, project_estimate, round_trip_residual, Calibrator};
use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::gns::{conjugate, representative_independence, Algebra, GnsSpace};
use crate::linalg::{
    cmax_abs, complexify, hermitian_eigenvalues, max_abs, CMatrix, CVector, SymmetricEigen,
};
use crate::models::{
    random_transformations, sample_algebra_element, sample_state, sample_transformation,
};
use crate::rng::stream;
use crate::theory::{property_suite, Theory, TransformationMatrix};

const ELEMENT_STREAM: u64 = 1 << 20;
const VECTOR_STREAM: u64 = 2 << 20;
const STATE_STREAM: u64 = 3 << 20;
const MIXING_STREAM: u64 = 4 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Suite {
    pub checks: Vec<CheckRecord>,
    pub data: Map<String, Value>,
}

impl Suite {
    pub fn passed(&self) -> bool {
        crate::check::all_passed(&self.checks)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn matrix_json(m: &DMatrix<f64>) -> Value {
    json!(m
        .row_iter()
        .map(|r| r.iter().copied().collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn faithful_state(theory: &Theory) -> Result<&crate::bipartite::BipartiteForm> {
    theory.faithful_state.as_ref().ok_or_else(|| {
        Error::Input(format!(
            "theory `{}` declares no faithful state",
            theory.name
        ))
    })
}

fn algebra_elements(theory: &Theory, seed: u64, count: usize) -> Vec<CMatrix> {
    (0..count)
        .map(|i| sample_algebra_element(theory, &mut stream(seed, ELEMENT_STREAM + i as u64)))
        .collect()
}

fn random_cvector<R: Rng>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Axiom checks plus Bayes chaining, monoid laws and convex closure.
pub fn theory_suite(theory: &Theory, samples: usize, seed: u64, tol: f64) -> Suite {
    let report = theory.validate(tol);
    let draws = random_transformations(theory, seed, samples.max(1));
    let mut mix_rng = stream(seed, MIXING_STREAM);
    let mixing: Vec<f64> = draws.iter().map(|_| mix_rng.random::<f64>()).collect();
    let mut checks = report.checks;
    checks.extend(property_suite(theory, &draws, &mixing, tol));

    let mut data = Map::new();
    data.insert("effect_dim".into(), json!(theory.effect_dim()));
    data.insert(
        "transformations".into(),
        json!(theory.transformations.len()),
    );
    data.insert(
        "extremal_states".into(),
        json!(theory.extremal_states.len()),
    );
    data.insert("experiments".into(), json!(theory.experiments.len()));
    data.insert("samples".into(), json!(draws.len()));
    Suite { checks, data }
}

/// Symmetry, normalization, dynamical and preparational faithfulness.
pub fn faithful_suite(theory: &Theory, tol: f64) -> Result<Suite> {
    let form = faithful_state(theory)?;
    let e = &theory.unit_effect;
    let d = theory.effect_dim();
    let mut checks = Vec::new();
    let mut data = Map::new();

    checks.push(CheckRecord::against(
        "symmetry",
        form.symmetry_residual(),
        tol,
    ));
    let norm = form.value(e, e)?;
    checks.push(CheckRecord::against(
        "normalization",
        (norm - 1.0).abs(),
        tol,
    ));

    let dynamic = is_dynamically_faithful(form, tol);
    checks.push(
        CheckRecord::boolean(
            "dynamically_faithful",
            dynamic.faithful,
            (d - dynamic.rank) as f64,
        )
        .with_detail(format!("rank {} of {}", dynamic.rank, d)),
    );
    data.insert("rank".into(), json!(dynamic.rank));
    data.insert("singular_values".into(), json!(dynamic.singular_values));

    let first = form.local_state(Side::First, e);
    let second = form.local_state(Side::Second, e);
    let local_norm = (e.0.dot(&first.0.transpose()) - 1.0)
        .abs()
        .max((e.0.dot(&second.0.transpose()) - 1.0).abs());
    checks.push(CheckRecord::against(
        "local_state_normalization",
        local_norm,
        tol,
    ));
    data.insert("local_state_first".into(), json!(first.0.as_slice()));
    data.insert("local_state_second".into(), json!(second.0.as_slice()));

    let prep = is_preparationally_faithful(form, theory, tol);
    let entries: Vec<Value> = prep
        .entries
        .iter()
        .map(|p| json!({"state": p.state, "lambda": p.lambda, "physical": p.physical, "error": p.error}))
        .collect();
    data.insert("preparations".into(), json!(entries));
    let mut prep_check = CheckRecord::boolean(
        "preparationally_faithful",
        prep.faithful,
        prep.entries.iter().filter(|p| !p.physical).count() as f64,
    );
    if let Some(reason) = &prep.reason {
        prep_check = prep_check.with_detail(reason.clone());
    }
    checks.push(prep_check);

    if let Ok(faithful) = FaithfulForm::new(form.clone(), tol) {
        // conditional state on system 2 after each preparation
        let mut worst = 0.0f64;
        for s in &theory.extremal_states {
            let target = PreparationTarget::Local(s.value.clone());
            if let Ok(r) = find_preparing_transformation(&faithful, &target, theory, tol) {
                let unnorm = (&theory.effect_of(&r.transformation).0 * form.0.clone()).transpose();
                let got = &unnorm / r.lambda;
                worst = worst.max((got - &s.value.0).amax());
            }
        }
        checks.push(CheckRecord::against("prepared_state_match", worst, 1e-8));

        let sign = crate::gns::SignInvolution::from_faithful(&faithful);
        let abs_min = SymmetricEigen::new(&sign.abs_form(form)).min();
        checks.push(
            CheckRecord::boolean("abs_form_strictly_positive", abs_min > 0.0, abs_min)
                .with_detail("smallest eigenvalue of S·F"),
        );
    }
    Ok(Suite { checks, data })
}

/// Transposition axioms over seeded samples, and optionally one named transformation.
pub fn transpose_suite(
    theory: &Theory,
    samples: usize,
    seed: u64,
    tol: f64,
    named: Option<&str>,
) -> Result<Suite> {
    let faithful = FaithfulForm::new(faithful_state(theory)?.clone(), tol)?;
    let draws = random_transformations(theory, seed, samples.max(2));
    let mut involution = 0.0f64;
    let mut anti = 0.0f64;
    let mut additive = 0.0f64;
    let mut defining = 0.0f64;
    for (k, a) in draws.iter().enumerate() {
        let b = &draws[(k + 1) % draws.len()];
        let at = faithful.transpose(a);
        let bt = faithful.transpose(b);
        involution = involution.max(max_abs(&(faithful.transpose(&at).0 - &a.0)));
        let ab = TransformationMatrix(&a.0 * &b.0);
        anti = anti.max(max_abs(&(faithful.transpose(&ab).0 - &bt.0 * &at.0)));
        let sum = TransformationMatrix(&a.0 + &b.0);
        additive = additive.max(max_abs(&(faithful.transpose(&sum).0 - (&at.0 + &bt.0))));
        defining = defining.max(faithful.defining_residual(a, &at));
    }
    let it = faithful.transpose(&theory.identity);
    let mut checks = vec![
        CheckRecord::against("transpose_involution", involution, 1e-9),
        CheckRecord::against("transpose_anti_homomorphism", anti, 1e-9),
        CheckRecord::against("transpose_additivity", additive, 1e-9),
        CheckRecord::against("transpose_defining_relation", defining, 1e-10),
        CheckRecord::against(
            "transpose_identity",
            max_abs(&(it.0 - &theory.identity.0)),
            1e-9,
        ),
    ];
    let mut data = Map::new();
    data.insert("samples".into(), json!(draws.len()));
    if let Some(name) = named {
        let a = theory.transformation(name)?;
        let at = faithful.transpose(a);
        checks.push(CheckRecord::against(
            format!("defining_relation[{name}]"),
            faithful.defining_residual(a, &at),
            1e-10,
        ));
        data.insert("transformation".into(), json!(name));
        data.insert("matrix".into(), matrix_json(&a.0));
        data.insert("transposed".into(), matrix_json(&at.0));
    }
    Ok(Suite { checks, data })
}

/// Sign involution, adjoint axioms, Gram positivity, left ideal,
/// representation identities and the informational identification checks.
pub fn gns_suite(
    theory: &Theory,
    samples: usize,
    seed: u64,
    tol: f64,
    null_tol: f64,
) -> Result<Suite> {
    let form = faithful_state(theory)?;
    let algebra = Algebra::new(form, &theory.unit_effect, tol)?;
    let space = GnsSpace::new(algebra.clone(), tol, null_tol)?;
    let sign = algebra.sign();
    let d = theory.effect_dim();
    let mut checks = Vec::new();
    let mut data = Map::new();

    checks.push(CheckRecord::against(
        "sign_square",
        sign.square_residual(),
        1e-12,
    ));
    checks.push(CheckRecord::against(
        "sign_symmetric",
        max_abs(&(&sign.matrix - sign.matrix.transpose())),
        1e-12,
    ));
    let abs_min = SymmetricEigen::new(&sign.abs_form(form)).min();
    checks.push(CheckRecord::boolean(
        "abs_form_positive_definite",
        abs_min > 0.0,
        abs_min,
    ));

    let elements = algebra_elements(theory, seed, samples.max(2));
    let n = elements.len();
    let id = complexify(&theory.identity.0);
    let mut dagger_twice = 0.0f64;
    let mut dagger_product = 0.0f64;
    let mut conj_twice = 0.0f64;
    let mut conj_product = 0.0f64;
    for (k, a) in elements.iter().enumerate() {
        let b = &elements[(k + 1) % n];
        dagger_twice = dagger_twice.max(cmax_abs(&(algebra.adjoint(&algebra.adjoint(a)) - a)));
        let lhs = algebra.adjoint(&(a * b));
        let rhs = algebra.adjoint(b) * algebra.adjoint(a);
        dagger_product = dagger_product.max(cmax_abs(&(lhs - rhs)));
        conj_twice = conj_twice.max(cmax_abs(&(conjugate(&conjugate(a, sign), sign) - a)));
        conj_product = conj_product.max(cmax_abs(
            &(conjugate(&(a * b), sign) - conjugate(a, sign) * conjugate(b, sign)),
        ));
    }
    checks.push(CheckRecord::against(
        "adjoint_involution",
        dagger_twice,
        1e-9,
    ));
    checks.push(CheckRecord::against(
        "adjoint_anti_homomorphism",
        dagger_product,
        1e-9,
    ));
    checks.push(CheckRecord::against(
        "adjoint_identity",
        cmax_abs(&(algebra.adjoint(&id) - &id)),
        1e-9,
    ));
    checks.push(CheckRecord::against(
        "conjugation_involution",
        conj_twice,
        1e-12,
    ));
    checks.push(CheckRecord::against(
        "conjugation_multiplicative",
        conj_product,
        1e-12,
    ));

    let eig = &space.quotient().eigen;
    let (gmin, gmax) = (eig.min(), eig.max());
    checks.push(CheckRecord::against(
        "gram_hermitian",
        max_abs(&(space.gram() - space.gram().transpose())),
        1e-12,
    ));
    checks.push(CheckRecord::against(
        "gram_psd",
        (-gmin / gmax).max(0.0),
        1e-9,
    ));

    let generators: Vec<CMatrix> = theory
        .transformations
        .iter()
        .map(|t| complexify(&t.value.0))
        .chain(elements.iter().take(10).cloned())
        .collect();
    checks.push(CheckRecord::against(
        "left_ideal",
        space.left_ideal_residual(&generators),
        1e-8 * gmax,
    ));

    let mut hom = 0.0f64;
    let mut adj_compat = 0.0f64;
    let mut cs_excess = 0.0f64;
    let dim_h = space.dim();
    for (k, a) in elements.iter().enumerate() {
        let b = &elements[(k + 1) % n];
        let pa = space.representation(a);
        let pb = space.representation(b);
        hom = hom.max(cmax_abs(&(space.representation(&(a * b)) - &pa * &pb)));
        let mut rng = stream(seed, VECTOR_STREAM + k as u64);
        let x = random_cvector(&mut rng, dim_h);
        let y = random_cvector(&mut rng, dim_h);
        let pad = space.representation(&algebra.adjoint(a));
        let lhs = (&pad * &x).dotc(&y);
        let rhs = x.dotc(&(&pa * &y));
        adj_compat = adj_compat.max((lhs - rhs).norm());
        let cs = space.cauchy_schwarz(a, b, 0.0);
        cs_excess = cs_excess.max(cs.lhs - cs.rhs);
    }
    let pi_id = space.representation(&id);
    checks.push(CheckRecord::against(
        "representation_identity",
        cmax_abs(&(pi_id - CMatrix::identity(dim_h, dim_h))),
        1e-9,
    ));
    checks.push(CheckRecord::against(
        "representation_homomorphism",
        hom,
        1e-9,
    ));
    checks.push(CheckRecord::against(
        "representation_adjoint",
        adj_compat,
        1e-9,
    ));
    checks.push(CheckRecord::against(
        "cauchy_schwarz",
        cs_excess.max(0.0),
        1e-10,
    ));

    let ident = space.identification();
    checks.push(
        CheckRecord::informational(
            "quotient_dimension",
            ident.quotient_dim as f64,
            ident.effect_dim as f64,
        )
        .with_detail(format!(
            "dim H = {}, effect dimension = {}, {}",
            ident.quotient_dim,
            ident.effect_dim,
            if ident.matches { "match" } else { "mismatch" }
        )),
    );
    let zero_eff = space.zero_effect_nonnull_dim(tol);
    checks.push(
        CheckRecord::informational("zero_effect_nonnull_dimension", zero_eff as f64, 0.0)
            .with_detail("zero-effect elements of the span with nonzero GNS norm"),
    );
    let reals = random_transformations(theory, seed, samples.max(3));
    let rep = representative_independence(&space, theory, &reals);
    checks.push(
        CheckRecord::informational(
            "effect_level_representative_independence",
            rep.effect_level_deviation,
            tol,
        )
        .with_detail("largest change of <A|C> under A -> A + D with zero-effect D"),
    );
    checks.push(
        CheckRecord::informational(
            "transposed_effect_effect_dependence",
            rep.transposed_effect_deviation,
            tol,
        )
        .with_detail("largest change of the transposed effect under the same swap"),
    );
    checks.push(
        CheckRecord::informational(
            "transposed_effect_formula",
            rep.transposed_formula_residual,
            tol,
        )
        .with_detail("largest |<A|B> - Phi(s(a'), b')|"),
    );

    data.insert("form_eigenvalues".into(), json!(sign.eigenvalues));
    data.insert("sign_matrix".into(), matrix_json(&sign.matrix));
    data.insert("gram_spectrum".into(), json!(eig.eigenvalues.as_slice()));
    data.insert("dim_h".into(), json!(dim_h));
    data.insert("effect_dim".into(), json!(d));
    data.insert("identification".into(), json!(ident.matches));
    data.insert("zero_effect_nonnull_dim".into(), json!(zero_eff));
    data.insert("samples".into(), json!(n));
    Ok(Suite { checks, data })
}

/// C*-identity, norm homogeneity and norms of unitary elements.
pub fn cstar_suite(
    theory: &Theory,
    samples: usize,
    seed: u64,
    tol: f64,
    null_tol: f64,
) -> Result<Suite> {
    let algebra = Algebra::new(faithful_state(theory)?, &theory.unit_effect, tol)?;
    let space = GnsSpace::new(algebra.clone(), tol, null_tol)?;
    let elements = algebra_elements(theory, seed, samples.max(1));
    let physical = random_transformations(theory, seed, samples.max(1));

    let mut cstar = 0.0f64;
    let mut homogeneity = 0.0f64;
    for (k, a) in elements.iter().enumerate() {
        let p = complexify(&physical[k].0);
        cstar = cstar
            .max(space.cstar_residual(a))
            .max(space.cstar_residual(&p));
        let mut rng = stream(seed, VECTOR_STREAM + k as u64);
        let lambda = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let na = space.operator_norm(a);
        let scaled = space.operator_norm(&(a * lambda));
        homogeneity =
            homogeneity.max((scaled - lambda.norm() * na).abs() / (lambda.norm() * na).max(1.0));
    }
    let id = complexify(&theory.identity.0);
    let mut checks = vec![
        CheckRecord::against("cstar_identity", cstar, 1e-6),
        CheckRecord::against("norm_homogeneity", homogeneity, 1e-9),
        CheckRecord::against(
            "identity_norm",
            (space.operator_norm(&id) - 1.0).abs(),
            1e-9,
        ),
    ];

    let mut norms = Map::new();
    let mut unitary_dev = 0.0f64;
    let mut unitary_count = 0;
    for t in &theory.transformations {
        let a = complexify(&t.value.0);
        let norm = space.operator_norm(&a);
        norms.insert(t.name.clone(), json!(norm));
        if cmax_abs(&(algebra.adjoint(&a) * &a - &id)) <= 1e-9 {
            unitary_count += 1;
            unitary_dev = unitary_dev.max((norm - 1.0).abs());
        }
    }
    checks.push(
        CheckRecord::against("unitary_norms", unitary_dev, 1e-8)
            .with_detail(format!("{unitary_count} generators with A†A = I")),
    );
    let mut data = Map::new();
    data.insert("generator_norms".into(), Value::Object(norms));
    data.insert("samples".into(), json!(elements.len()));
    Ok(Suite { checks, data })
}

/// Born rule through the GNS representation against direct evaluation.
///
/// Trial 0 uses the first declared extremal state; the rest use random states.
pub fn born_suite(
    theory: &Theory,
    trials: usize,
    seed: u64,
    tol: f64,
    null_tol: f64,
) -> Result<Suite> {
    let algebra = Algebra::new(faithful_state(theory)?, &theory.unit_effect, tol)?;
    let space = GnsSpace::new(algebra.clone(), tol, null_tol)?;
    let mut direct_gap = 0.0f64;
    let mut conditioned_gap = 0.0f64;
    let mut unit_gap = 0.0f64;
    let mut lambdas = Vec::new();
    let id = complexify(&theory.identity.0);

    for k in 0..trials.max(1) {
        let mut rng = stream(seed, STATE_STREAM + k as u64);
        let state = match (k, theory.extremal_states.first()) {
            (0, Some(s)) => s.value.clone(),
            _ => sample_state(theory, &mut rng),
        };
        let a = sample_transformation(theory, &mut rng);
        let b = sample_transformation(theory, &mut rng);
        let born = space.born_state(&state, theory, tol)?;
        lambdas.push(born.preparation.lambda);

        let ca = complexify(&a.0);
        let cb = complexify(&b.0);
        let direct = crate::theory::probability(&state, &theory.effect_of(&a))?;
        direct_gap = direct_gap.max((space.born_probability(&ca, &born.vector) - direct).norm());
        let chained = crate::theory::probability(
            &state,
            &theory.effect_of(&TransformationMatrix(&b.0 * &a.0)),
        )?;
        conditioned_gap =
            conditioned_gap.max((space.born_conditioned(&cb, &ca, &born.vector) - chained).norm());
        unit_gap = unit_gap.max((space.born_probability(&id, &born.vector) - 1.0).norm());
    }

    // the reference state itself is prepared by the identity
    let phi = crate::theory::StateVector(algebra.local_state().clone());
    let reference = space.born_state(&phi, theory, tol)?;
    let ref_gap = (reference.vector - space.class_of(&id)).norm();

    let checks = vec![
        CheckRecord::against("born_direct", direct_gap, 1e-8),
        CheckRecord::against("born_conditioned", conditioned_gap, 1e-8),
        CheckRecord::against("born_normalization", unit_gap, 1e-8),
        CheckRecord::against("born_reference_state", ref_gap, 1e-8),
    ];
    let mut data = Map::new();
    data.insert("trials".into(), json!(lambdas.len()));
    data.insert("preparation_lambdas".into(), json!(lambdas));
    data.insert(
        "reference_lambda".into(),
        json!(reference.preparation.lambda),
    );
    Ok(Suite { checks, data })
}

/// Noiseless round trips, one seeded finite-shot run and its error.
pub fn calibrate_suite(
    theory: &Theory,
    name: &str,
    shots: u64,
    seed: u64,
    tol: f64,
    project: bool,
) -> Result<(
    Suite,
    Option<crate::calibration::Counts>,
    Option<TransformationMatrix>,
)> {
    let cal = Calibrator::for_theory(theory, tol)?;
    let truth = theory.transformation(name)?.clone();
    let mut roundtrip = round_trip_residual(&cal, &truth, tol)?;
    for a in random_transformations(theory, seed, 50) {
        roundtrip = roundtrip.max(round_trip_residual(&cal, &a, tol)?);
    }
    let mut checks = vec![CheckRecord::against(
        "noiseless_round_trip",
        roundtrip,
        1e-10,
    )];
    let mut data = Map::new();
    data.insert("transformation".into(), json!(name));
    data.insert("shots".into(), json!(shots));
    data.insert("fiducials".into(), json!(cal.first().len()));
    data.insert("truth".into(), matrix_json(&truth.0));

    if shots == 0 {
        return Ok((Suite { checks, data }, None, None));
    }
    let counts = cal.simulate(&truth, shots, seed, tol)?;
    let mut estimate = cal.estimate(&counts)?;
    if project {
        estimate = project_estimate(theory, &estimate);
    }
    let err = estimation_error(&estimate, &truth, theory);
    let expected = cal.expected_error(&truth, shots, tol)?;
    checks.push(
        CheckRecord::against("statistical_error", err.frobenius, 4.0 * expected)
            .with_detail("Frobenius distance against four times its expected rms"),
    );
    data.insert("expected_rms_error".into(), json!(expected));
    data.insert("estimate".into(), matrix_json(&estimate.0));
    data.insert("frobenius_error".into(), json!(err.frobenius));
    data.insert(
        "worst_probability_error".into(),
        json!(err.worst_probability),
    );
    data.insert("no_occurrence".into(), json!(counts.no_occurrence));
    data.insert("projected".into(), json!(project));
    Ok((Suite { checks, data }, Some(counts), Some(estimate)))
}

/// Spectrum of a Hermitian matrix, exposed for report consumers.
pub fn hermitian_spectrum(m: &CMatrix) -> Vec<f64> {
    hermitian_eigenvalues(m)
}
