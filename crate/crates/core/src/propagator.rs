//! Time evolution: the time-ordered ODE oracle, exact exponential action for
//! Sambe operators, and extraction of the truncated-space state.
//!
//! `exact_evolve` is the independent reference every bound is checked
//! against; it integrates i d/dt psi = H(t) psi with an embedded
//! Dormand-Prince 5(4) scheme and must be kept free of any Sambe-space code
//! path.

use crate::error::{FqsError, FqsResult};
use crate::hamiltonian::FourierHamiltonian;
use crate::linalg::{
    dagger, eigh, expm_apply_from_eig, hermiticity_residual, vec_norm, CMat, CVec, C64,
};
use crate::sambe::{build_effective, SambeOperator, SambeSpace};

/// A normalized state of the physical system at a given time.
#[derive(Debug, Clone)]
pub struct SystemState {
    pub vector: CVec,
    pub time: f64,
}

/// A state on the truncated Floquet-Hilbert space.
#[derive(Debug, Clone)]
pub struct SambeState {
    pub space: SambeSpace,
    pub vector: CVec,
}

impl SambeState {
    /// `|0> (x) psi0`: the physical state placed at Fourier label l = 0.
    pub fn embed_at_zero(space: SambeSpace, psi0: &CVec) -> Self {
        assert_eq!(psi0.len(), space.dim_sys());
        let mut vector = CVec::zeros(space.dim_total());
        let slot = space.slot_of(0).expect("l = 0 is always inside D^L");
        let d = space.dim_sys();
        for a in 0..d {
            vector[slot * d + a] = psi0[a];
        }
        Self { space, vector }
    }

    /// The d-dimensional block at Fourier label `l`.
    pub fn block(&self, l: i64) -> FqsResult<CVec> {
        let slot = self.space.slot_of(l).ok_or(FqsError::IndexOutOfRange {
            l,
            l_max: self.space.half_width(),
        })?;
        let d = self.space.dim_sys();
        Ok(self
            .vector
            .slice(ndarray::s![slot * d..(slot + 1) * d])
            .to_owned())
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.vector)
    }
}

// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [&[f64]; 6] = [
    &[0.2],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
    ],
    &[
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
    ],
    &[
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn rhs(h: &FourierHamiltonian, t: f64, psi: &CVec) -> CVec {
    let mat = h.evaluate_at(t);
    mat.dot(psi).mapv(|z| z * C64::new(0.0, -1.0))
}

/// Solve `i d/dt psi = H(t) psi` from 0 to `t` with local error <= `tol`.
///
/// The end state is renormalized; norm drift beyond integrator expectations
/// is a hard failure. `tol` must lie in [1e-13, 1e-6].
pub fn exact_evolve(
    h: &FourierHamiltonian,
    psi0: &CVec,
    t: f64,
    tol: f64,
) -> FqsResult<SystemState> {
    if !(1e-13..=1e-6).contains(&tol) {
        return Err(FqsError::Validation(format!(
            "oracle tolerance must lie in [1e-13, 1e-6], got {tol}"
        )));
    }
    let n0 = vec_norm(psi0);
    if (n0 - 1.0).abs() > 1e-8 {
        return Err(FqsError::Validation(format!(
            "initial state must be normalized, ||psi0|| = {n0}"
        )));
    }
    if t == 0.0 {
        return Ok(SystemState {
            vector: psi0.clone(),
            time: 0.0,
        });
    }

    let direction = t.signum();
    let t_abs = t.abs();
    let mut time = 0.0f64;
    let mut psi = psi0.clone();
    let mut k1 = rhs(h, 0.0, &psi);
    let mut step = {
        let scale = 1.0 + vec_norm(&k1);
        (0.1 / scale).min(t_abs)
    };
    let min_step = 1e-14 * t_abs;

    let mut ks: Vec<CVec> = vec![CVec::zeros(psi.len()); 7];
    while time < t_abs {
        step = step.min(t_abs - time);
        if step < min_step {
            return Err(FqsError::StepUnderflow {
                t: direction * time,
                h: step,
            });
        }
        let hdir = direction * step;
        ks[0] = k1.clone();
        for stage in 0..6 {
            let mut y = psi.clone();
            for (j, &a) in DP_A[stage].iter().enumerate() {
                if a != 0.0 {
                    y.zip_mut_with(&ks[j], |yi, &ki| *yi += ki * C64::new(a * hdir, 0.0));
                }
            }
            ks[stage + 1] = rhs(h, direction * (time + DP_C[stage] * step), &y);
        }
        // 5th-order solution and embedded error estimate
        let mut y5 = psi.clone();
        let mut err_vec = CVec::zeros(psi.len());
        for j in 0..7 {
            if DP_B5[j] != 0.0 {
                y5.zip_mut_with(&ks[j], |yi, &ki| *yi += ki * C64::new(DP_B5[j] * hdir, 0.0));
            }
            if DP_ERR[j] != 0.0 {
                err_vec.zip_mut_with(&ks[j], |ei, &ki| {
                    *ei += ki * C64::new(DP_ERR[j] * hdir, 0.0)
                });
            }
        }
        let err = vec_norm(&err_vec);
        // error-per-unit-step control keeps the accumulated error near tol
        let budget = tol * step / t_abs;
        if err <= budget {
            time += step;
            psi = y5;
            k1 = ks[6].clone(); // FSAL
        }
        let factor = if err > 0.0 {
            0.9 * (budget / err).powf(0.25)
        } else {
            5.0
        };
        step *= factor.clamp(0.2, 5.0);
    }

    let norm = vec_norm(&psi);
    let drift = (norm - 1.0).abs();
    if drift > (10.0 * tol).max(1e-9 * (1.0 + t_abs)) {
        return Err(FqsError::Numerical(format!(
            "integrator norm drift {drift:.3e} over t = {t}"
        )));
    }
    psi.mapv_inplace(|z| z / norm);
    Ok(SystemState {
        vector: psi,
        time: t,
    })
}

/// Time-ordered evolution operator `U(t)` column by column via the ODE
/// oracle (monodromy when `t = T`).
pub fn evolve_unitary(h: &FourierHamiltonian, t: f64, tol: f64) -> FqsResult<CMat> {
    let d = h.dim();
    let mut u = CMat::zeros((d, d));
    for j in 0..d {
        let mut e = CVec::zeros(d);
        e[j] = C64::new(1.0, 0.0);
        let out = exact_evolve(h, &e, t, tol)?;
        for i in 0..d {
            u[[i, j]] = out.vector[i];
        }
    }
    Ok(u)
}

/// `e^{-i M t} v` for a Hermitian matrix `M`.
///
/// Eigendecomposition below 1024 dimensions, scaling-and-squaring on the
/// full matrix above. For repeated times on one operator prefer
/// [`expm_apply_op`], which reuses the operator's cached eigensystem.
pub fn expm_apply(matrix: &CMat, v: &CVec, t: f64) -> FqsResult<CVec> {
    let res = hermiticity_residual(matrix);
    if res > 1e-10 {
        return Err(FqsError::NonHermitian(res));
    }
    if matrix.nrows() <= 1024 {
        let eig = eigh(matrix)?;
        Ok(expm_apply_from_eig(&eig, v, t))
    } else {
        let u = expm_scaling_squaring(matrix, t);
        Ok(u.dot(v))
    }
}

/// `e^{-i op t} v` using the operator's cached eigendecomposition.
pub fn expm_apply_op(op: &SambeOperator, v: &CVec, t: f64) -> CVec {
    expm_apply_from_eig(op.eig(), v, t)
}

/// Scaled Taylor series with repeated squaring for `e^{-i M t}`.
fn expm_scaling_squaring(matrix: &CMat, t: f64) -> CMat {
    let n = matrix.nrows();
    // infinity-norm upper bound on ||M t||
    let norm: f64 = (0..n)
        .map(|i| (0..n).map(|j| matrix[[i, j]].norm()).sum::<f64>())
        .fold(0.0, f64::max)
        * t.abs();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = C64::new(0.0, -t / 2f64.powi(s as i32));
    let a = matrix.mapv(|z| z * scale);
    let mut u = CMat::eye(n);
    let mut term = CMat::eye(n);
    for k in 1..=24 {
        term = term.dot(&a).mapv(|z| z / k as f64);
        u += &term;
        let tn: f64 = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if tn < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        u = u.dot(&u);
    }
    u
}

/// The truncated-space state
/// `|psi^L(t)> = sum_{l in D^L} e^{-i l omega t} <l| e^{-i H_eff^L t} |0> |psi0>`,
/// returned unnormalized; its norm deficit is the truncation diagnostic and
/// callers renormalize when they need a state.
pub fn sambe_extract(h: &FourierHamiltonian, l_half: usize, psi0: &CVec, t: f64) -> CVec {
    let op = build_effective(h, l_half);
    sambe_extract_with(&op, h.omega(), psi0, t)
}

/// [`sambe_extract`] against a prebuilt effective operator (reuses its
/// cached eigensystem across a time sweep).
pub fn sambe_extract_with(op: &SambeOperator, omega: f64, psi0: &CVec, t: f64) -> CVec {
    let space = *op.space();
    let start = SambeState::embed_at_zero(space, psi0);
    let evolved = expm_apply_op(op, &start.vector, t);
    let d = space.dim_sys();
    let mut out = CVec::zeros(d);
    for l in space.labels() {
        let slot = space.slot_of(l).unwrap();
        let phase = C64::from_polar(1.0, -(l as f64) * omega * t);
        for a in 0..d {
            out[a] += phase * evolved[slot * d + a];
        }
    }
    out
}

/// The d x d transition block `<l| e^{-i op t} |l_src>`.
pub fn transition_block(op: &SambeOperator, l: i64, l_src: i64, t: f64) -> FqsResult<CMat> {
    let space = op.space();
    let d = space.dim_sys();
    let row = space.slot_of(l).ok_or(FqsError::IndexOutOfRange {
        l,
        l_max: space.half_width(),
    })?;
    let col = space.slot_of(l_src).ok_or(FqsError::IndexOutOfRange {
        l: l_src,
        l_max: space.half_width(),
    })?;
    let eig = op.eig();
    let n = eig.values.len();
    // <l| V e^{-i lambda t} V^dag |l_src> assembled from the two row strips
    let v = &eig.vectors;
    let mut strip = CMat::zeros((d, n));
    for a in 0..d {
        for k in 0..n {
            strip[[a, k]] = v[[row * d + a, k]] * C64::from_polar(1.0, -eig.values[k] * t);
        }
    }
    let mut src = CMat::zeros((n, d));
    for k in 0..n {
        for b in 0..d {
            src[[k, b]] = v[[col * d + b, k]].conj();
        }
    }
    Ok(strip.dot(&src))
}

/// Columns `<l| e^{-i op t} |0>` for every l, as one (2L d) vector per
/// physical basis column; convenience for sweeps.
pub fn propagate_zero_column(op: &SambeOperator, psi0: &CVec, t: f64) -> SambeState {
    let space = *op.space();
    let start = SambeState::embed_at_zero(space, psi0);
    SambeState {
        space,
        vector: expm_apply_op(op, &start.vector, t),
    }
}

/// Unitary `e^{-i op t}` as a dense matrix (test sizes only).
pub fn expm_dense(op: &SambeOperator, t: f64) -> CMat {
    let eig = op.eig();
    let mut scaled = eig.vectors.clone();
    for j in 0..eig.values.len() {
        let phase = C64::from_polar(1.0, -eig.values[j] * t);
        for i in 0..eig.vectors.nrows() {
            scaled[[i, j]] *= phase;
        }
    }
    scaled.dot(&dagger(&eig.vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{pauli_x, pauli_z, scaled, DecayProfile};
    use crate::linalg::max_abs_diff;
    use ndarray::array;
    use std::collections::BTreeMap;

    fn driven_qubit(delta: f64, v: f64, omega: f64) -> FourierHamiltonian {
        let mut c = BTreeMap::new();
        c.insert(0, scaled(&pauli_z(), delta / 2.0));
        if v != 0.0 {
            c.insert(1, scaled(&pauli_x(), v / 2.0));
            c.insert(-1, scaled(&pauli_x(), v / 2.0));
        }
        FourierHamiltonian::from_components(omega, c, DecayProfile::Finite { m_max: 1 }).unwrap()
    }

    fn ket0() -> CVec {
        array![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    }

    #[test]
    fn static_limit_matches_matrix_exponential() {
        let h = driven_qubit(1.0, 0.0, 1.0);
        let psi0: CVec = array![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let t = 2.7;
        let out = exact_evolve(&h, &psi0, t, 1e-12).unwrap();
        let u = crate::linalg::expm_hermitian(h.component(0).unwrap(), t).unwrap();
        let expect = u.dot(&psi0);
        let diff = (&out.vector - &expect).mapv(|z| z.norm()).sum();
        assert!(diff < 1e-10, "diff = {diff:.3e}");
    }

    #[test]
    fn eigenstate_picks_up_phase_only() {
        // V = 0, psi0 = |0>, Delta = 1: psi(t) = e^{-i t/2} |0>
        let h = driven_qubit(1.0, 0.0, 1.0);
        let out = exact_evolve(&h, &ket0(), 1.3, 1e-12).unwrap();
        let expect = C64::from_polar(1.0, -0.65);
        assert!((out.vector[0] - expect).norm() < 1e-10);
        assert!(out.vector[1].norm() < 1e-12);
    }

    #[test]
    fn oracle_self_consistency_on_tol() {
        let h = driven_qubit(1.0, 1.0, 1.0);
        let t = 3.0;
        let a = exact_evolve(&h, &ket0(), t, 1e-8).unwrap();
        let b = exact_evolve(&h, &ket0(), t, 5e-9).unwrap();
        let diff = vec_norm(&(&a.vector - &b.vector));
        assert!(
            diff < 10.0 * 1e-8,
            "halving tol moved the answer by {diff:.3e}"
        );
    }

    #[test]
    fn expm_apply_basics() {
        let m = array![
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(2.0, 0.0)]
        ];
        let v: CVec = array![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        // t = 0 leaves v untouched
        let out = expm_apply(&m, &v, 0.0).unwrap();
        assert!(vec_norm(&(&out - &v)) < 1e-15);
        // diagonal case at t = pi
        let out = expm_apply(&m, &v, std::f64::consts::PI).unwrap();
        assert!((out[0] - C64::from_polar(1.0, -std::f64::consts::PI)).norm() < 1e-13);
        // group property
        let w: CVec = array![C64::new(0.6, 0.2), C64::new(-0.3, 0.7)];
        let half = expm_apply(&m, &expm_apply(&m, &w, 0.45).unwrap(), 0.45).unwrap();
        let full = expm_apply(&m, &w, 0.9).unwrap();
        assert!(vec_norm(&(&half - &full)) < 1e-10);
        // non-Hermitian rejected
        let bad = array![
            [C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]
        ];
        assert!(matches!(
            expm_apply(&bad, &v, 1.0),
            Err(FqsError::NonHermitian(_))
        ));
    }

    #[test]
    fn scaling_squaring_agrees_with_eig_path() {
        // force both paths on the same matrix and compare
        let h = driven_qubit(1.0, 1.0, 1.0);
        let op = build_effective(&h, 3);
        let t = 0.8;
        let u_eig = expm_dense(&op, t);
        let u_ss = expm_scaling_squaring(op.matrix(), t);
        assert!(max_abs_diff(&u_eig, &u_ss) < 1e-12);
    }

    #[test]
    fn sambe_extract_static_limit() {
        let h = driven_qubit(1.0, 0.0, 1.0);
        let out = sambe_extract(&h, 3, &ket0(), 1.1);
        let expect = C64::from_polar(1.0, -0.55);
        assert!((out[0] - expect).norm() < 1e-12);
        assert!((vec_norm(&out) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sambe_extract_converges_to_oracle() {
        let h = driven_qubit(1.0, 1.0, 1.0);
        let t = 1.0; // gamma t = 1
        let oracle = exact_evolve(&h, &ket0(), t, 1e-12).unwrap();
        let trunc = choose_l();
        let approx = sambe_extract(&h, trunc, &ket0(), t);
        let diff = vec_norm(&(&approx - &oracle.vector));
        assert!(diff < 1e-6, "sambe extraction off by {diff:.3e}");

        fn choose_l() -> usize {
            crate::sambe::choose_l_max(1.0, 1.0, 1, 1e-6).unwrap().l_max
        }
    }

    #[test]
    fn sambe_column_is_normalized() {
        // unitarity of the Sambe evolution: sum_l ||<l| e^{-i H t} |0> psi0||^2 = 1
        let h = driven_qubit(1.0, 1.0, 1.0);
        let op = build_effective(&h, 6);
        let col = propagate_zero_column(&op, &ket0(), 0.9);
        assert!((col.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transition_block_identity_at_t0() {
        let h = driven_qubit(1.0, 1.0, 1.0);
        let op = build_effective(&h, 4);
        let b = transition_block(&op, 2, 2, 0.0).unwrap();
        assert!(max_abs_diff(&b, &CMat::eye(2)) < 1e-12);
        let z = transition_block(&op, 3, -1, 0.0).unwrap();
        assert!(z.iter().all(|v| v.norm() < 1e-12));
        assert!(matches!(
            transition_block(&op, 5, 0, 0.0),
            Err(FqsError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn truncation_proof_split_bounds_the_difference() {
        // || psi^{L'} - psi^L || <= eps_1 + eps_2, the two-term split of the
        // truncation proof: eps_1 sums boundary transition blocks of the
        // larger space, eps_2 the blocks where the two evolutions differ.
        let h = driven_qubit(1.0, 1.0, 1.0);
        let psi0 = ket0();
        for &(l_small, l_large, t) in &[(1usize, 2usize, 0.6), (2, 4, 1.0), (3, 6, 1.5)] {
            let small = build_effective(&h, l_small);
            let large = build_effective(&h, l_large);
            let a = sambe_extract_with(&small, 1.0, &psi0, t);
            let b = sambe_extract_with(&large, 1.0, &psi0, t);
            let diff = vec_norm(&(&b - &a));
            let mut eps1 = 0.0;
            for l in large.space().labels() {
                if small.space().slot_of(l).is_none() {
                    eps1 +=
                        crate::linalg::spectral_norm(&transition_block(&large, l, 0, t).unwrap());
                }
            }
            let mut eps2 = 0.0;
            for l in small.space().labels() {
                let big_block = transition_block(&large, l, 0, t).unwrap();
                let small_block = transition_block(&small, l, 0, t).unwrap();
                eps2 += crate::linalg::spectral_norm(&(big_block - small_block));
            }
            assert!(
                diff <= eps1 + eps2 + 1e-12,
                "L={l_small}->{l_large}, t={t}: {diff:.3e} > {:.3e}",
                eps1 + eps2
            );
        }
    }

    #[test]
    fn linear_potential_evolution_is_identity_at_full_period() {
        // e^{-i H_LP T} = 1: every diagonal entry advances by 2 pi l
        let omega = 1.7;
        let period = 2.0 * std::f64::consts::PI / omega;
        let lp = crate::sambe::build_linear_potential(5, omega, 2);
        let u = expm_dense(&lp, period);
        assert!(max_abs_diff(&u, &CMat::eye(lp.space().dim_total())) < 1e-10);
    }

    #[test]
    fn eig_cache_is_safe_for_concurrent_readers() {
        let h = driven_qubit(1.0, 1.0, 1.0);
        let op = std::sync::Arc::new(build_effective(&h, 6));
        let handles: Vec<_> = (0..4)
            .map(|k| {
                let op = op.clone();
                std::thread::spawn(move || {
                    let b = transition_block(&op, k as i64, 0, 0.5).unwrap();
                    crate::linalg::spectral_norm(&b)
                })
            })
            .collect();
        for hnd in handles {
            let norm = hnd.join().unwrap();
            assert!(norm.is_finite());
        }
    }

    #[test]
    fn transition_block_respects_lieb_robinson_example() {
        // gamma t = 0.5: ||<4| e^{-i H_eff t} |0>|| <= 2 (0.5)^4/4! = 1/192
        let h = driven_qubit(1.0, 1.0, 1.0);
        let op = build_effective(&h, 8);
        let b = transition_block(&op, 4, 0, 0.5).unwrap();
        let norm = crate::linalg::spectral_norm(&b);
        let bound = 2.0 * 0.5f64.powi(4) / 24.0;
        assert!((bound - 0.005_208_333_333_333_333).abs() < 1e-15);
        assert!(norm <= bound, "{norm} > {bound}");
    }
}
