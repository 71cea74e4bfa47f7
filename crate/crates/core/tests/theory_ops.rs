use approx::assert_abs_diff_eq;
use nalgebra::{DMatrix, DVector};
use opcstar_core::models::{build_classical, build_qubit, rotation, unitary_channel};
use opcstar_core::pauli;
use opcstar_core::theory::{add_transformations, compose, probability, scale};
use opcstar_core::{EffectVector, Error, StateVector, TransformationMatrix};

fn tm(rows: &[&[f64]]) -> TransformationMatrix {
    TransformationMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn classical_bit_validates_with_zero_residual() {
    let (bit, _) = build_classical(2).unwrap();
    let report = bit.validate(1e-9);
    assert!(report.all_passed());
    assert_eq!(report.worst_residual(), 0.0);
}

#[test]
fn qubit_validates_within_1e_12() {
    let (qubit, _) = build_qubit();
    let report = qubit.validate(1e-12);
    assert!(report.all_passed(), "{:#?}", report.checks);
}

#[test]
fn maximally_mixed_on_zero_projector_is_half() {
    // Tr[½I · |0⟩⟨0|] computed on operators
    let rho = pauli::state_operator(&[0.5, 0.0, 0.0, 0.0], 2).unwrap();
    let p0 = pauli::effect_operator(&[1.0, 0.0, 0.0, 1.0], 2).unwrap();
    let oracle = (rho * p0).trace().re;
    let s = StateVector::from_vec(vec![0.5, 0.0, 0.0, 0.0]);
    let a = EffectVector::from_vec(vec![1.0, 0.0, 0.0, 1.0]);
    assert_abs_diff_eq!(probability(&s, &a).unwrap(), oracle, epsilon = 1e-15);
    assert_abs_diff_eq!(oracle, 0.5, epsilon = 1e-15);
}

#[test]
fn probability_rejects_mismatched_dimensions() {
    let s = StateVector::from_vec(vec![1.0, 0.0]);
    let a = EffectVector::from_vec(vec![1.0, 0.0, 0.0]);
    assert!(matches!(
        probability(&s, &a),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn effect_of_examples() {
    let (bit, _) = build_classical(2).unwrap();
    let select = tm(&[&[1.0, 0.0], &[0.0, 0.0]]);
    assert_eq!(bit.effect_of(&select).0.as_slice(), &[1.0, 0.0]);

    let (qubit, _) = build_qubit();
    let dep = TransformationMatrix(DMatrix::from_diagonal(&DVector::from_vec(vec![
        1.0, 0.0, 0.0, 0.0,
    ])));
    assert_eq!(qubit.effect_of(&dep).0, qubit.unit_effect.0);
    assert_eq!(
        qubit
            .effect_of(qubit.transformation("depolarize").unwrap())
            .0,
        qubit.unit_effect.0
    );
}

#[test]
fn conditional_state_on_point_masses() {
    let (bit, _) = build_classical(2).unwrap();
    let s = StateVector::from_vec(vec![0.5, 0.5]);
    let (post, p) = bit
        .conditional_state(&s, bit.transformation("select_0").unwrap(), 1e-12)
        .unwrap();
    assert_eq!(post.0.as_slice(), &[1.0, 0.0]);
    assert_eq!(p, 0.5);
    let never = TransformationMatrix::zeros(2);
    assert!(matches!(
        bit.conditional_state(&s, &never, 1e-12),
        Err(Error::ZeroProbability { .. })
    ));
}

#[test]
fn classical_compose_is_declared_order_product() {
    let a = tm(&[&[0.5, 0.25], &[0.0, 1.0]]);
    let b = tm(&[&[0.0, 1.0], &[1.0, 0.0]]);
    // (A∘B) effect-level: first A then B; R_a·R_b by hand
    let expected = tm(&[&[0.25, 0.5], &[1.0, 0.0]]);
    assert_eq!(compose(&a, &b).unwrap(), expected);
}

#[test]
fn pauli_x_twice_is_identity() {
    let x = pauli::single_qubit_paulis()[1].clone();
    let rx = unitary_channel(&x);
    let rr = compose(&rx, &rx).unwrap();
    assert_abs_diff_eq!(rr.0, DMatrix::identity(4, 4), epsilon = 1e-15);
}

#[test]
fn two_outcome_sum_is_unit_effect() {
    let (bit, _) = build_classical(2).unwrap();
    let sum = add_transformations(
        bit.transformation("select_0").unwrap(),
        bit.transformation("select_1").unwrap(),
    )
    .unwrap();
    assert_eq!(bit.effect_of(&sum).0, bit.unit_effect.0);
    assert_eq!(scale(0.5, &sum).0, DMatrix::identity(2, 2) * 0.5);
}

#[test]
fn coexistence_examples() {
    let (bit, _) = build_classical(2).unwrap();
    let s0 = bit.transformation("select_0").unwrap();
    let s1 = bit.transformation("select_1").unwrap();
    assert!(bit.are_coexistent(s0, s1, 1e-12));
    assert!(!bit.are_coexistent(&bit.identity, s0, 1e-12));
    assert!(matches!(
        bit.add_physical(&bit.identity, s0, 1e-12),
        Err(Error::NotCoexistent { .. })
    ));
    assert!(bit.scale_physical(1.5, s0).is_err());
}

#[test]
fn informational_versus_dynamical_equivalence() {
    let (bit, _) = build_classical(2).unwrap();
    let r1 = tm(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let r2 = tm(&[&[0.0, 0.0], &[0.0, 1.0]]);
    assert!(bit.informationally_equivalent(&r1, &r2, 1e-12));
    assert!(!bit.dynamically_equivalent(&r1, &r2, 1e-12));

    let (qubit, _) = build_qubit();
    let u = unitary_channel(&rotation(2, 0.7));
    let half = scale(0.5, &u);
    assert!(qubit.dynamically_equivalent(&u, &half, 1e-12));
    assert!(!qubit.informationally_equivalent(&u, &half, 1e-12));
}

#[test]
fn observables_and_informational_completeness() {
    let (qubit, _) = build_qubit();
    let s = 1.0 / 3f64.sqrt();
    let sic: Vec<EffectVector> = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
        .iter()
        .map(|n| EffectVector::from_vec(vec![0.5, 0.5 * n[0], 0.5 * n[1], 0.5 * n[2]]))
        .collect();
    assert!(qubit.is_observable(&sic, 1e-12));
    assert!(qubit.is_informationally_complete(&sic, 1e-9));
    assert!(qubit.is_minimal_informationally_complete(&sic, 1e-9));

    let unit = vec![qubit.unit_effect.clone()];
    assert!(qubit.is_observable(&unit, 1e-12));
    assert!(!qubit.is_informationally_complete(&unit, 1e-9));

    let (bit, _) = build_classical(2).unwrap();
    let points = vec![
        EffectVector::from_vec(vec![1.0, 0.0]),
        EffectVector::from_vec(vec![0.0, 1.0]),
    ];
    assert!(bit.is_observable(&points, 0.0));
    assert!(bit.is_minimal_informationally_complete(&points, 1e-9));
}

#[test]
fn built_in_model_examples() {
    let (qubit, form) = build_qubit();
    assert_eq!(
        qubit
            .effect_of(qubit.transformation("proj_z+").unwrap())
            .0
            .as_slice(),
        &[1.0, 0.0, 0.0, 1.0]
    );
    assert_eq!(form.symmetry_residual(), 0.0);
    assert_eq!(
        form.value(&qubit.unit_effect, &qubit.unit_effect).unwrap(),
        1.0
    );

    let (bit, bit_form) = build_classical(2).unwrap();
    assert!(bit.validate(1e-12).all_passed());
    assert_eq!(
        opcstar_core::bipartite::is_dynamically_faithful(&bit_form, 1e-9).rank,
        2
    );
    assert!(matches!(build_classical(0), Err(Error::Input(_))));
}

#[test]
fn unknown_names_are_reported() {
    let (qubit, _) = build_qubit();
    assert!(matches!(
        qubit.transformation("nope"),
        Err(Error::Unknown { .. })
    ));
    assert!(matches!(qubit.state("nope"), Err(Error::Unknown { .. })));
}
