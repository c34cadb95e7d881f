//! Pipeline-level integration checks beyond the acceptance criteria.

use fqs::amplification::run_adiabatic;
use fqs::hamiltonian::{pauli_x, pauli_z};
use fqs::linalg::{eigh, fidelity};
use fqs::presets;

/// Slower schedules prepare the target eigenstate better: evolving the
/// ground state of Z over a quarter period of the sine interpolation lands
/// near the ground state of X, with infidelity falling as omega shrinks.
#[test]
fn adiabatic_state_preparation_trend() {
    let gs_x = {
        let eig = eigh(&pauli_x()).unwrap();
        eig.vectors.column(0).to_owned()
    };
    let gs_z = {
        let eig = eigh(&pauli_z()).unwrap();
        eig.vectors.column(0).to_owned()
    };
    let mut infidelities = Vec::new();
    for &omega in &[2.0, 1.0, 0.5] {
        let model = presets::adiabatic_prep_default(omega).unwrap();
        let h = &model.hamiltonian;
        let quarter = h.period() / 4.0;
        let (state, diag) = run_adiabatic(h, &gs_z, quarter, 1e-4).unwrap();
        assert!(diag.deviation <= 1e-4);
        let infid = 1.0 - fidelity(&gs_x, &state.vector);
        infidelities.push((omega, infid));
    }
    for w in infidelities.windows(2) {
        assert!(
            w[1].1 < w[0].1,
            "preparation should improve as the schedule slows: {infidelities:?}",
            infidelities = infidelities
        );
    }
    // and the slowest schedule should be visibly adiabatic
    assert!(infidelities.last().unwrap().1 < 0.1, "{:?}", infidelities);
}

/// The adiabatic pipeline on an exponentially-decaying mode set: truncation
/// selection switches to the exponential-profile formula and the refined
/// Hamiltonian wraps every stored hop.
#[test]
fn adiabatic_pipeline_with_exponential_profile() {
    use fqs::hamiltonian::{scaled, DecayProfile, FourierHamiltonian};
    use std::collections::BTreeMap;

    let mut c = BTreeMap::new();
    c.insert(0, pauli_z());
    for m in 1..=3i32 {
        let w = 0.8 * (-(m as f64)).exp();
        c.insert(m, scaled(&pauli_x(), w));
        c.insert(-m, scaled(&pauli_x(), w));
    }
    let h = FourierHamiltonian::from_components(
        1.0,
        c,
        DecayProfile::ExponentialDecay { h: 1.6, zeta: 1.0 },
    )
    .unwrap();
    let psi0 = {
        let eig = eigh(&h.evaluate_at(0.0)).unwrap();
        eig.vectors.column(0).to_owned()
    };
    let (_state, diag) = run_adiabatic(&h, &psi0, 0.1, 0.2).unwrap();
    assert!(
        diag.l_max >= 13,
        "exponential-profile selection, got {}",
        diag.l_max
    );
    assert!(diag.deviation <= 0.2, "deviation {:.3e}", diag.deviation);
    assert!(diag.fidelity >= 1.0 - 1e-6);
}

/// The long-time pipeline with a fractional tail step (delta > 0).
#[test]
fn longtime_with_fractional_period() {
    let model = presets::driven_qubit(1.0, 0.8, 2.0).unwrap();
    let h = &model.hamiltonian;
    let t = 2.5 * h.period();
    let psi0 = model.ground_state_at_zero();
    let (_state, diag) = fqs::amplification::run_longtime(h, &psi0, t, 1e-3).unwrap();
    assert_eq!(diag.n_steps, Some(2));
    let delta = diag.delta_fraction.unwrap();
    assert!((delta - 0.5).abs() < 1e-9);
    assert!(diag.deviation <= 1e-3, "deviation {:.3e}", diag.deviation);
    assert!(diag.fidelity >= 1.0 - 1e-3);
}
