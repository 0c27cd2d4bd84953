//! Cross-module invariants on random states: the measure chain ordering,
//! assemblage/box generation invariants, and the operational link between
//! Q₂ and dimension-bounded steering models.

use qcorr_core::assemblage::{assemblage_from_state, box_from_state, mub_pair};
use qcorr_core::measures::scmub_profile;
use qcorr_core::state::{cq_state, random_density_matrix, random_unit_vector, seeded_rng, QubitBasis};
use qcorr_core::steering::lhvlhs::{lhvlhs_search, LhvLhsConfig};
use rand::Rng;

#[test]
fn measure_chain_holds_on_500_random_states() {
    let mut rng = seeded_rng(2024);
    for i in 0..500 {
        let rho = random_density_matrix(&mut rng, 2, 2);
        let p = scmub_profile(&rho).unwrap();
        assert!(p.c1 + 1e-9 >= p.q2, "#{i}: c1 {} < q2 {}", p.c1, p.q2);
        assert!(p.q2 + 1e-9 >= p.q3, "#{i}: q2 {} < q3 {}", p.q2, p.q3);
        assert!(p.q3 >= 0.0);
        assert!(p.discord >= 0.0);
        assert!((p.discord + p.c1 - p.mutual_info).abs() < 1e-9);
    }
}

#[test]
fn generated_assemblages_and_boxes_respect_no_signaling() {
    let mut rng = seeded_rng(2025);
    let bases = [QubitBasis::x(), QubitBasis::y(), QubitBasis::z()];
    for _ in 0..200 {
        let rho = random_density_matrix(&mut rng, 2, 2);
        let asm = assemblage_from_state(&rho, &bases).unwrap();
        assert!(asm.no_signaling_deviation() <= 1e-10);
        let boxed = box_from_state(&rho, &bases[..2], &bases[..2]).unwrap();
        boxed.validate().unwrap();
    }
}

#[test]
fn q2_positive_states_give_no_bounded_model_in_their_optimal_bases() {
    // States with simultaneous correlations in two MUBs, measured in the
    // C₁ and Q₂ bases with the same directions trusted on Bob's side,
    // produce boxes outside the d_λ = 2 model set.
    for id in ["tau_prime", "tau_dprime", "giorgi_n3"] {
        let rho = qcorr_core::catalog::get(id, &Default::default())
            .unwrap()
            .into_state()
            .unwrap();
        let p = scmub_profile(&rho).unwrap();
        assert!(p.q2 > 1e-3, "{id} should have q2 > 0");
        let n1 = p.c1_basis;
        let n2 = (p.q2_basis - n1 * n1.dot(&p.q2_basis)).normalize();
        let bases = [QubitBasis::new(n1).unwrap(), QubitBasis::new(n2).unwrap()];
        let boxed = box_from_state(&rho, &bases, &bases).unwrap();
        let (outcome, _) =
            lhvlhs_search(&boxed, &[n1, n2], &LhvLhsConfig::default()).unwrap();
        assert!(
            outcome.model().is_none(),
            "{id}: unexpected model at residual {}",
            outcome.best_residual()
        );
        assert!(outcome.best_residual() > 1e-6, "{id}");
    }
}

#[test]
fn cq_states_always_admit_bounded_models() {
    let mut rng = seeded_rng(2026);
    for _ in 0..5 {
        let basis = QubitBasis::new(random_unit_vector(&mut rng)).unwrap();
        let r0 = random_unit_vector(&mut rng) * rng.random::<f64>();
        let r1 = random_unit_vector(&mut rng) * rng.random::<f64>();
        let rho = cq_state(&basis, rng.random(), [r0, r1]).unwrap();
        let alice = [
            QubitBasis::new(random_unit_vector(&mut rng)).unwrap(),
            QubitBasis::new(random_unit_vector(&mut rng)).unwrap(),
        ];
        let bob = [QubitBasis::x(), QubitBasis::y()];
        let boxed = box_from_state(&rho, &alice, &bob).unwrap();
        let (outcome, _) =
            lhvlhs_search(&boxed, &mub_pair().to_vec(), &LhvLhsConfig::default()).unwrap();
        let model = outcome.model().expect("CQ boxes admit a 2-state model");
        assert!(model.residual < 1e-9);
        // The model's hidden states must be valid Bloch vectors.
        for r in &model.hidden_blochs {
            assert!(r.norm() <= 1.0 + 1e-9);
        }
        let total: f64 = model.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn q3_basis_is_mutually_unbiased_to_the_other_two() {
    let mut rng = seeded_rng(2027);
    for _ in 0..25 {
        let rho = random_density_matrix(&mut rng, 2, 2);
        let p = scmub_profile(&rho).unwrap();
        // Bases count as MUB when their Bloch directions are orthogonal.
        let dot12 = p.c1_basis.dot(&p.q2_basis).abs();
        let dot13 = p.c1_basis.dot(&p.q3_basis).abs();
        let dot23 = p.q2_basis.dot(&p.q3_basis).abs();
        assert!(dot12 < 1e-6 && dot13 < 1e-6 && dot23 < 1e-6);
    }
}

#[test]
fn werner_degenerate_optimum_is_flagged_as_continuum() {
    let rho = qcorr_core::catalog::werner(0.4);
    let opts = qcorr_core::measures::ScmubOptions::default();
    let c1 = qcorr_core::measures::classical_correlation(&rho, &opts).unwrap();
    assert!(c1.continuum, "Werner states have a continuum of optimal bases");
    // Every direction is optimal: the closed form is 1 - h((1+v)/2).
    let expect = 1.0 - qcorr_core::state::binary_entropy((1.0 + 0.4) / 2.0).unwrap();
    assert!((c1.value - expect).abs() < 1e-8);
}
