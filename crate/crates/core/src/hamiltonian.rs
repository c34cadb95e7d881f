//! Time-periodic Hamiltonians given by their Fourier components.
//!
//! A driven system H(t) = sum_m H_m e^{-i m omega t} with period T = 2 pi / omega
//! is stored as the map m -> H_m together with a decay profile for the mode
//! norms. Hermiticity of H(t) is equivalent to H_{-m} = H_m^dagger, which is
//! enforced at construction.

use std::collections::BTreeMap;

use crate::error::{FqsError, FqsResult};
use crate::linalg::{
    dagger, hermiticity_residual, max_abs_diff, spectral_norm, unitarity_residual, CMat, C64,
};

const PAIR_TOL: f64 = 1e-12;

/// Decay behaviour of the Fourier mode norms `||H_m||`.
#[derive(Debug, Clone, PartialEq)]
pub enum DecayProfile {
    /// `H_m = 0` for `|m| > m_max`.
    Finite { m_max: usize },
    /// `||H_m|| <= h e^{-|m|/zeta}` for every stored mode.
    ExponentialDecay { h: f64, zeta: f64 },
}

/// A time-periodic Hamiltonian in Fourier representation.
#[derive(Debug, Clone)]
pub struct FourierHamiltonian {
    omega: f64,
    dim: usize,
    components: BTreeMap<i32, CMat>,
    profile: DecayProfile,
}

impl FourierHamiltonian {
    /// Validate and build a Hamiltonian from its Fourier components.
    ///
    /// Missing Hermitian partners are auto-completed: if `H_m` is stored and
    /// `H_{-m}` is not, `H_{-m} = H_m^dagger` is inserted. If both are stored
    /// they must agree to 1e-12.
    pub fn from_components(
        omega: f64,
        components: BTreeMap<i32, CMat>,
        profile: DecayProfile,
    ) -> FqsResult<Self> {
        if omega <= 0.0 || !omega.is_finite() {
            return Err(FqsError::Validation(format!(
                "omega must be positive and finite, got {omega}"
            )));
        }
        if components.is_empty() {
            return Err(FqsError::Validation(
                "no Fourier components supplied".into(),
            ));
        }
        let dim = components.values().next().unwrap().nrows();
        if dim < 2 {
            return Err(FqsError::Validation(format!(
                "system dimension must be >= 2, got {dim}"
            )));
        }
        for (m, h) in &components {
            if h.nrows() != dim || h.ncols() != dim {
                return Err(FqsError::Validation(format!(
                    "component m = {m} has shape {}x{}, expected {dim}x{dim}",
                    h.nrows(),
                    h.ncols()
                )));
            }
        }

        // Complete or check the Hermitian pairs.
        let mut full: BTreeMap<i32, CMat> = BTreeMap::new();
        for (&m, h) in &components {
            match components.get(&(-m)) {
                Some(partner) => {
                    let residual = max_abs_diff(partner, &dagger(h));
                    if residual > PAIR_TOL {
                        return Err(FqsError::NonHermitianPair { m, residual });
                    }
                    full.insert(m, h.clone());
                }
                None => {
                    full.insert(m, h.clone());
                    full.insert(-m, dagger(h));
                }
            }
        }

        let out = Self {
            omega,
            dim,
            components: full,
            profile,
        };
        out.check_profile()?;
        Ok(out)
    }

    fn check_profile(&self) -> FqsResult<()> {
        match &self.profile {
            DecayProfile::Finite { m_max } => {
                for (&m, h) in &self.components {
                    if m.unsigned_abs() as usize > *m_max && spectral_norm(h) > PAIR_TOL {
                        return Err(FqsError::ProfileViolation {
                            m,
                            detail: format!("nonzero component beyond m_max = {m_max}"),
                        });
                    }
                }
            }
            DecayProfile::ExponentialDecay { h, zeta } => {
                if *h <= 0.0 || *zeta <= 0.0 || !h.is_finite() || !zeta.is_finite() {
                    return Err(FqsError::Validation(
                        "ExponentialDecay requires h > 0 and zeta > 0".into(),
                    ));
                }
                for (&m, hm) in &self.components {
                    if m == 0 {
                        // ||H_0|| unconstrained by the decay assumption.
                        continue;
                    }
                    let norm = spectral_norm(hm);
                    let cap = h * (-(m.abs() as f64) / zeta).exp();
                    if norm > cap + PAIR_TOL {
                        return Err(FqsError::ProfileViolation {
                            m,
                            detail: format!(
                                "||H_m|| = {norm:.6e} exceeds h e^(-|m|/zeta) = {cap:.6e}"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Drive period `T = 2 pi / omega`.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn profile(&self) -> &DecayProfile {
        &self.profile
    }

    /// Stored Fourier component, or `None` when `H_m = 0`.
    pub fn component(&self, m: i32) -> Option<&CMat> {
        self.components.get(&m)
    }

    /// Stored mode indices in ascending order.
    pub fn modes(&self) -> impl Iterator<Item = i32> + '_ {
        self.components.keys().copied()
    }

    pub fn components(&self) -> &BTreeMap<i32, CMat> {
        &self.components
    }

    /// Largest stored `|m|` with a numerically nonzero component.
    pub fn m_max_stored(&self) -> usize {
        self.components
            .iter()
            .filter(|(_, h)| h.iter().any(|z| z.norm() > PAIR_TOL))
            .map(|(m, _)| m.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Hopping range used by the Sambe-space builders: `m_max` for a finite
    /// profile, the largest stored mode otherwise.
    pub fn hop_range(&self) -> usize {
        match self.profile {
            DecayProfile::Finite { m_max } => m_max,
            DecayProfile::ExponentialDecay { .. } => self.m_max_stored(),
        }
    }

    /// `H(t) = sum_m H_m e^{-i m omega t}`.
    pub fn evaluate_at(&self, t: f64) -> CMat {
        let mut out = CMat::zeros((self.dim, self.dim));
        for (&m, h) in &self.components {
            let phase = C64::from_polar(1.0, -(m as f64) * self.omega * t);
            out.zip_mut_with(h, |o, &v| *o += phase * v);
        }
        out
    }
}

/// Energy-scale summary of a driven Hamiltonian.
///
/// `gamma` is a grid-search estimate of `sup_t ||H(t) - H_0||` (a lower bound
/// on the true sup); `gamma_upper = sum_{m != 0} ||H_m||` is the certified
/// upper bound used wherever rigour matters; `alpha` is the block-encoding
/// normalization `sum_m alpha_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyScales {
    pub alpha: f64,
    pub gamma: f64,
    pub gamma_upper: f64,
}

/// Compute [`EnergyScales`] for a Hamiltonian.
///
/// When `alphas` is `None` each `alpha_m` defaults to `||H_m||`, the tightest
/// valid normalization. `n_grid` uniform times over one period feed the
/// `gamma` search (>= 16).
pub fn energy_scales(
    h: &FourierHamiltonian,
    alphas: Option<&BTreeMap<i32, f64>>,
    n_grid: usize,
) -> FqsResult<EnergyScales> {
    if n_grid < 16 {
        return Err(FqsError::Validation(format!(
            "n_grid must be >= 16, got {n_grid}"
        )));
    }
    let h0 = h
        .component(0)
        .cloned()
        .unwrap_or_else(|| CMat::zeros((h.dim(), h.dim())));
    let period = h.period();
    let mut gamma: f64 = 0.0;
    for k in 0..n_grid {
        let t = period * (k as f64) / (n_grid as f64);
        let diff = h.evaluate_at(t) - &h0;
        gamma = gamma.max(spectral_norm(&diff));
    }
    let gamma_upper: f64 = h
        .components()
        .iter()
        .filter(|(&m, _)| m != 0)
        .map(|(_, hm)| spectral_norm(hm))
        .sum();
    let alpha = match alphas {
        Some(map) => map.values().sum(),
        None => h.components().values().map(spectral_norm).sum(),
    };
    Ok(EnergyScales {
        alpha,
        gamma,
        gamma_upper,
    })
}

/// Fourier components of a closed-form periodic signal by trapezoidal
/// quadrature on `n_quad` uniform nodes.
///
/// Modes beyond `m_cut` are dropped, Hermiticity is enforced by the
/// symmetrization `(H_m + H_{-m}^dagger)/2`, and the reconstruction is
/// checked against the input signal at the quadrature nodes with tolerance
/// `recon_tol`. The resulting Hamiltonian carries `profile` when supplied and
/// `Finite { m_cut }` otherwise.
pub fn fourier_from_signal(
    signal: impl Fn(f64) -> CMat,
    omega: f64,
    m_cut: usize,
    n_quad: usize,
    recon_tol: f64,
    profile: Option<DecayProfile>,
) -> FqsResult<FourierHamiltonian> {
    if omega <= 0.0 || omega.is_nan() {
        return Err(FqsError::Validation("omega must be positive".into()));
    }
    if n_quad < 4 * m_cut.max(1) {
        return Err(FqsError::Validation(format!(
            "n_quad = {n_quad} too small, need >= 4 m_cut = {}",
            4 * m_cut.max(1)
        )));
    }
    let period = 2.0 * std::f64::consts::PI / omega;
    let nodes: Vec<f64> = (0..n_quad)
        .map(|k| period * (k as f64) / (n_quad as f64))
        .collect();
    let samples: Vec<CMat> = nodes.iter().map(|&t| signal(t)).collect();
    let dim = samples[0].nrows();

    // Uniform nodes on a periodic integrand: trapezoid = plain average.
    let mut components: BTreeMap<i32, CMat> = BTreeMap::new();
    for m in -(m_cut as i32)..=(m_cut as i32) {
        let mut acc = CMat::zeros((dim, dim));
        for (t, s) in nodes.iter().zip(samples.iter()) {
            let phase = C64::from_polar(1.0 / n_quad as f64, (m as f64) * omega * t);
            acc.zip_mut_with(s, |a, &v| *a += phase * v);
        }
        components.insert(m, acc);
    }
    // Symmetrize pairs and drop numerically empty modes.
    let mut sym: BTreeMap<i32, CMat> = BTreeMap::new();
    for m in 0..=(m_cut as i32) {
        let hp = components.get(&m).unwrap();
        let hm = components.get(&(-m)).unwrap();
        let avg = (hp + &dagger(hm)) * C64::new(0.5, 0.0);
        if avg.iter().any(|z| z.norm() > 1e-14) {
            sym.insert(m, avg.clone());
            sym.insert(-m, dagger(&avg));
        }
    }
    if sym.is_empty() {
        // keep a zero DC mode so the reconstruction check below reports the
        // miss as a quadrature residual
        sym.insert(0, CMat::zeros((dim, dim)));
    }

    let out = FourierHamiltonian::from_components(
        omega,
        sym,
        profile.unwrap_or(DecayProfile::Finite { m_max: m_cut }),
    )?;

    let mut residual: f64 = 0.0;
    for (t, s) in nodes.iter().zip(samples.iter()) {
        residual = residual.max(max_abs_diff(&out.evaluate_at(*t), s));
    }
    if residual > recon_tol {
        return Err(FqsError::QuadratureResidual {
            residual,
            tol: recon_tol,
        });
    }
    Ok(out)
}

/// A linear combination of unitaries, `H = sum_j alpha_j U_j` with
/// `alpha_j >= 0`.
#[derive(Debug, Clone)]
pub struct LCUDecomposition {
    terms: Vec<(f64, CMat)>,
}

impl LCUDecomposition {
    /// Validate coefficients (>= 0) and unitarity of every term.
    pub fn new(terms: Vec<(f64, CMat)>) -> FqsResult<Self> {
        if terms.is_empty() {
            return Err(FqsError::Validation("empty LCU".into()));
        }
        let dim = terms[0].1.nrows();
        for (idx, (coeff, u)) in terms.iter().enumerate() {
            if *coeff < 0.0 {
                return Err(FqsError::NegativeCoefficient(*coeff));
            }
            if u.nrows() != dim || u.ncols() != dim {
                return Err(FqsError::Validation(format!(
                    "LCU term {idx} has inconsistent shape"
                )));
            }
            let residual = unitarity_residual(u);
            if residual > PAIR_TOL {
                return Err(FqsError::NonUnitaryTerm {
                    index: idx,
                    residual,
                });
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(f64, CMat)] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.terms[0].1.nrows()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total weight `alpha = sum_j alpha_j`.
    pub fn alpha(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c).sum()
    }

    /// `sum_j alpha_j U_j`.
    pub fn reconstruct(&self) -> CMat {
        let dim = self.dim();
        let mut out = CMat::zeros((dim, dim));
        for (c, u) in &self.terms {
            out.zip_mut_with(u, |o, &v| *o += C64::new(*c, 0.0) * v);
        }
        out
    }

    /// Check that the reconstruction matches `target` to `tol` (entrywise).
    pub fn verify_encodes(&self, target: &CMat, tol: f64) -> FqsResult<()> {
        let diff = max_abs_diff(&self.reconstruct(), target);
        if diff > tol {
            return Err(FqsError::Validation(format!(
                "LCU reconstruction misses target by {diff:.3e} (tol {tol:.1e})"
            )));
        }
        Ok(())
    }

    /// Generic LCU for an arbitrary matrix on `2^n` dimensions from its Pauli
    /// expansion; complex coefficients are absorbed into the unitaries as
    /// phases. Terms below 1e-13 are dropped.
    pub fn from_pauli_basis(matrix: &CMat) -> FqsResult<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || !dim.is_power_of_two() {
            return Err(FqsError::Validation(
                "Pauli-basis LCU needs a square 2^n-dimensional matrix".into(),
            ));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        let paulis = [pauli_i(), pauli_x(), pauli_y(), pauli_z()];
        let mut terms = Vec::new();
        let n_strings = 4usize.pow(n_qubits as u32);
        for code in 0..n_strings {
            let mut p = CMat::eye(1);
            let mut c = code;
            for _ in 0..n_qubits {
                p = crate::linalg::kron(&p, &paulis[c % 4]);
                c /= 4;
            }
            // coefficient = tr(P M) / dim (Paulis are Hermitian)
            let mut tr = C64::new(0.0, 0.0);
            for i in 0..dim {
                for k in 0..dim {
                    tr += p[[i, k]] * matrix[[k, i]];
                }
            }
            let coeff = tr / dim as f64;
            if coeff.norm() > 1e-13 {
                let phase = coeff / coeff.norm();
                terms.push((coeff.norm(), p.mapv(|v| v * phase)));
            }
        }
        Self::new(terms)
    }
}

pub fn pauli_i() -> CMat {
    CMat::eye(2)
}

pub fn pauli_x() -> CMat {
    ndarray::array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
    ]
}

pub fn pauli_y() -> CMat {
    ndarray::array![
        [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        [C64::new(0.0, 1.0), C64::new(0.0, 0.0)]
    ]
}

pub fn pauli_z() -> CMat {
    ndarray::array![
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
    ]
}

/// Scale a matrix by a real factor.
pub fn scaled(m: &CMat, factor: f64) -> CMat {
    m.mapv(|v| v * factor)
}

/// Verify a matrix is Hermitian to `tol`, returning it for chaining.
pub fn require_hermitian(m: &CMat, tol: f64) -> FqsResult<()> {
    let r = hermiticity_residual(m);
    if r > tol {
        return Err(FqsError::NonHermitian(r));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vec_norm;
    use ndarray::array;
    use std::collections::BTreeMap;

    pub fn driven_qubit_components(delta: f64, v: f64) -> BTreeMap<i32, CMat> {
        let mut c = BTreeMap::new();
        c.insert(0, scaled(&pauli_z(), delta / 2.0));
        c.insert(1, scaled(&pauli_x(), v / 2.0));
        c.insert(-1, scaled(&pauli_x(), v / 2.0));
        c
    }

    fn driven_qubit() -> FourierHamiltonian {
        FourierHamiltonian::from_components(
            1.0,
            driven_qubit_components(1.0, 1.0),
            DecayProfile::Finite { m_max: 1 },
        )
        .unwrap()
    }

    #[test]
    fn driven_qubit_is_valid() {
        let h = driven_qubit();
        assert_eq!(h.dim(), 2);
        assert_eq!(h.m_max_stored(), 1);
    }

    #[test]
    fn auto_completes_missing_partner() {
        let mut c = BTreeMap::new();
        c.insert(0, scaled(&pauli_z(), 0.5));
        // i/2 * (X + iY) is not Hermitian; its partner must be auto-inserted
        let m = (pauli_x() + pauli_y().mapv(|v| v * C64::new(0.0, 1.0)))
            .mapv(|v| v * C64::new(0.0, 0.5));
        c.insert(1, m.clone());
        let h =
            FourierHamiltonian::from_components(1.0, c, DecayProfile::Finite { m_max: 1 }).unwrap();
        assert!(max_abs_diff(h.component(-1).unwrap(), &dagger(&m)) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian_pair() {
        // H_1 = H_{-1} = (i/2) X violates H_{-1} = H_1^dagger
        let mut c = BTreeMap::new();
        let ix = pauli_x().mapv(|v| v * C64::new(0.0, 0.5));
        c.insert(1, ix.clone());
        c.insert(-1, ix);
        let err = FourierHamiltonian::from_components(1.0, c, DecayProfile::Finite { m_max: 1 })
            .unwrap_err();
        assert!(matches!(err, FqsError::NonHermitianPair { .. }));
    }

    #[test]
    fn rejects_profile_violation() {
        let mut c = BTreeMap::new();
        c.insert(0, pauli_z());
        c.insert(2, scaled(&pauli_x(), 0.3));
        c.insert(-2, scaled(&pauli_x(), 0.3));
        let err = FourierHamiltonian::from_components(1.0, c, DecayProfile::Finite { m_max: 1 })
            .unwrap_err();
        assert!(matches!(err, FqsError::ProfileViolation { .. }));
    }

    #[test]
    fn evaluate_at_matches_closed_form() {
        let h = driven_qubit();
        // t = 0: (1/2) Z + X
        let expect0 = scaled(&pauli_z(), 0.5) + &pauli_x();
        assert!(max_abs_diff(&h.evaluate_at(0.0), &expect0) < 1e-14);
        // t = T: periodicity
        assert!(max_abs_diff(&h.evaluate_at(h.period()), &expect0) < 1e-12);
        // t = T/4 with omega = 1: cos(pi/2) = 0 kills the drive
        let expect_quarter = scaled(&pauli_z(), 0.5);
        assert!(max_abs_diff(&h.evaluate_at(h.period() / 4.0), &expect_quarter) < 1e-12);
    }

    #[test]
    fn evaluate_at_is_hermitian() {
        let h = driven_qubit();
        for k in 0..13 {
            let t = 0.37 * k as f64;
            assert!(hermiticity_residual(&h.evaluate_at(t)) < 1e-12);
        }
    }

    #[test]
    fn quadrature_recovers_cosine_drive() {
        let sig = |t: f64| scaled(&pauli_x(), t.cos());
        let h = fourier_from_signal(sig, 1.0, 1, 64, 1e-10, None).unwrap();
        assert!(max_abs_diff(h.component(1).unwrap(), &scaled(&pauli_x(), 0.5)) < 1e-12);
        assert!(max_abs_diff(h.component(-1).unwrap(), &scaled(&pauli_x(), 0.5)) < 1e-12);
        assert!(h.component(0).is_none());
    }

    #[test]
    fn quadrature_constant_signal_is_dc_only() {
        let sig = |_t: f64| scaled(&pauli_z(), 0.7);
        let h = fourier_from_signal(sig, 2.0, 3, 32, 1e-10, None).unwrap();
        assert!(max_abs_diff(h.component(0).unwrap(), &scaled(&pauli_z(), 0.7)) < 1e-12);
        assert_eq!(h.modes().count(), 1);
    }

    #[test]
    fn quadrature_flags_underresolved_signal() {
        // band limit 3 but m_cut 1: reconstruction cannot match
        let sig = |t: f64| scaled(&pauli_x(), (3.0 * t).cos());
        let err = fourier_from_signal(sig, 1.0, 1, 64, 1e-10, None).unwrap_err();
        assert!(matches!(err, FqsError::QuadratureResidual { .. }));
    }

    #[test]
    fn energy_scales_driven_qubit() {
        let h = driven_qubit();
        let mut alphas = BTreeMap::new();
        alphas.insert(0, 0.5);
        alphas.insert(1, 0.5);
        alphas.insert(-1, 0.5);
        let es = energy_scales(&h, Some(&alphas), 256).unwrap();
        // gamma = max_t ||cos(t) X|| = 1, attained on the grid at t = 0
        assert!((es.gamma - 1.0).abs() < 1e-10);
        assert!((es.gamma_upper - 1.0).abs() < 1e-10);
        assert!((es.alpha - 1.5).abs() < 1e-12);
        // defaulted alphas use ||H_m||: same 3/2 here
        let es2 = energy_scales(&h, None, 256).unwrap();
        assert!((es2.alpha - 1.5).abs() < 1e-10);
    }

    #[test]
    fn energy_scales_static_hamiltonian() {
        let mut c = BTreeMap::new();
        c.insert(0, pauli_z());
        let h =
            FourierHamiltonian::from_components(1.0, c, DecayProfile::Finite { m_max: 0 }).unwrap();
        let es = energy_scales(&h, None, 64).unwrap();
        assert_eq!(es.gamma, 0.0);
        assert_eq!(es.gamma_upper, 0.0);
    }

    #[test]
    fn lcu_validation_and_reconstruction() {
        let lcu = LCUDecomposition::new(vec![(0.5, pauli_z()), (0.5, pauli_x())]).unwrap();
        assert!((lcu.alpha() - 1.0).abs() < 1e-15);
        let target = scaled(&pauli_z(), 0.5) + scaled(&pauli_x(), 0.5);
        lcu.verify_encodes(&target, 1e-12).unwrap();

        let err = LCUDecomposition::new(vec![(-0.1, pauli_z())]).unwrap_err();
        assert!(matches!(err, FqsError::NegativeCoefficient(_)));

        let not_unitary = scaled(&pauli_z(), 0.4);
        let err = LCUDecomposition::new(vec![(1.0, not_unitary)]).unwrap_err();
        assert!(matches!(err, FqsError::NonUnitaryTerm { .. }));
    }

    #[test]
    fn pauli_basis_lcu_reconstructs_random_hermitian() {
        let m = array![
            [C64::new(0.3, 0.0), C64::new(0.1, -0.7)],
            [C64::new(0.1, 0.7), C64::new(-1.1, 0.0)]
        ];
        let lcu = LCUDecomposition::from_pauli_basis(&m).unwrap();
        lcu.verify_encodes(&m, 1e-12).unwrap();
        // also for a non-Hermitian matrix (phases get absorbed)
        let nh = array![
            [C64::new(0.0, 0.5), C64::new(0.2, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, -0.5)]
        ];
        let lcu = LCUDecomposition::from_pauli_basis(&nh).unwrap();
        lcu.verify_encodes(&nh, 1e-12).unwrap();
    }

    #[test]
    fn gaussian_packet_quadrature_matches_closed_form() {
        // Appendix-style wave-packet drive on a qubit carrier: p = 2 waves per
        // packet, omega tau = 1. The closed form for the envelope coefficient:
        // A_m = (omega tau / sqrt(2 pi)) e^{-(p^2+m^2)(omega tau)^2/2} sinh(p |m| (omega tau)^2).
        let p = 2_i32;
        let omega = 1.0;
        let tau = 1.0;
        let period = 2.0 * std::f64::consts::PI / omega;
        let big_omega = p as f64 * omega;
        let sig = move |t: f64| {
            let mut env = 0.0;
            for n in -8..=8 {
                let dt = t - (n as f64 + 0.5) * period;
                env += (-dt * dt / (2.0 * tau * tau)).exp();
            }
            scaled(&pauli_x(), env * (big_omega * t).sin())
        };
        let h = fourier_from_signal(sig, omega, 12, 256, 1e-9, None).unwrap();
        let a = |m: i32| -> f64 {
            let wt = omega * tau;
            wt / (2.0 * std::f64::consts::PI).sqrt()
                * (-((p * p + m * m) as f64) * wt * wt / 2.0).exp()
                * ((p * m.abs()) as f64 * wt * wt).sinh()
        };
        // frozen closed-form values (p = 2, omega tau = 1)
        assert!((a(1) - 0.118_769_438_053_602_67).abs() < 1e-15);
        assert!((a(2) - 0.199_404_225_087_833_9).abs() < 1e-15);
        for m in 1..=6 {
            // H_m = i (-1)^{p+m} sgn(m) A_m X  =>  ||H_m|| = A_m ||X|| = A_m
            let norm = spectral_norm(h.component(m).unwrap());
            assert!(
                (norm - a(m)).abs() < 1e-9,
                "m={m}: quadrature {norm} vs closed form {}",
                a(m)
            );
            // phase structure: H_m = i (-1)^{p+m} sgn(m) A_m X
            let expect = pauli_x().mapv(|v| {
                v * C64::new(0.0, 1.0)
                    * C64::new((-1.0f64).powi(p + m) * (m.signum() as f64) * a(m), 0.0)
            });
            assert!(max_abs_diff(h.component(m).unwrap(), &expect) < 1e-9);
        }
    }

    #[test]
    fn fidelity_helper_behaves() {
        let a: crate::linalg::CVec = array![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let b: crate::linalg::CVec = array![C64::new(0.0, 1.0), C64::new(0.0, 0.0)];
        assert!((crate::linalg::fidelity(&a, &b) - 1.0).abs() < 1e-15);
        assert!((vec_norm(&a) - 1.0).abs() < 1e-15);
    }
}
