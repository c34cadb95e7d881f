//! Model systems: the cosine-driven qubit, the two-site Fermi-Hubbard chain
//! under monochromatic light, the sine-schedule adiabatic interpolation, and
//! the Gaussian-wave-packet drive. Each preset carries its Hamiltonian plus
//! per-mode LCU decompositions for the block-encoding layer.

use std::collections::BTreeMap;

use crate::error::{FqsError, FqsResult};
use crate::hamiltonian::{
    fourier_from_signal, pauli_x, pauli_z, scaled, DecayProfile, FourierHamiltonian,
    LCUDecomposition,
};
use crate::linalg::{dagger, kron, spectral_norm, CMat, CVec, C64};

/// A Hamiltonian bundled with mode LCUs and their normalization weights.
#[derive(Debug, Clone)]
pub struct PresetModel {
    pub name: String,
    pub hamiltonian: FourierHamiltonian,
    pub lcus: BTreeMap<i32, LCUDecomposition>,
    pub alphas: BTreeMap<i32, f64>,
}

impl PresetModel {
    fn from_parts(
        name: &str,
        hamiltonian: FourierHamiltonian,
        lcus: BTreeMap<i32, LCUDecomposition>,
    ) -> FqsResult<Self> {
        let mut alphas = BTreeMap::new();
        for (&m, lcu) in &lcus {
            let target = hamiltonian
                .component(m)
                .ok_or_else(|| FqsError::Validation(format!("LCU supplied for absent mode {m}")))?;
            lcu.verify_encodes(target, 1e-12)?;
            alphas.insert(m, lcu.alpha());
        }
        Ok(Self {
            name: name.to_string(),
            hamiltonian,
            lcus,
            alphas,
        })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Ground state of `H(0)` (lowest eigenvector), a convenient default
    /// initial state.
    pub fn ground_state_at_zero(&self) -> CVec {
        let eig = crate::linalg::eigh(&self.hamiltonian.evaluate_at(0.0)).expect("preset eigh");
        eig.vectors.column(0).to_owned()
    }
}

/// Driven qubit `H(t) = (Delta/2) Z + V cos(omega t) X`.
pub fn driven_qubit(delta: f64, v: f64, omega: f64) -> FqsResult<PresetModel> {
    let mut c = BTreeMap::new();
    c.insert(0, scaled(&pauli_z(), delta / 2.0));
    c.insert(1, scaled(&pauli_x(), v / 2.0));
    c.insert(-1, scaled(&pauli_x(), v / 2.0));
    let h = FourierHamiltonian::from_components(omega, c, DecayProfile::Finite { m_max: 1 })?;
    let mut lcus = BTreeMap::new();
    lcus.insert(
        0,
        LCUDecomposition::new(vec![(delta.abs() / 2.0, signed(&pauli_z(), delta))])?,
    );
    lcus.insert(
        1,
        LCUDecomposition::new(vec![(v.abs() / 2.0, signed(&pauli_x(), v))])?,
    );
    lcus.insert(
        -1,
        LCUDecomposition::new(vec![(v.abs() / 2.0, signed(&pauli_x(), v))])?,
    );
    PresetModel::from_parts("driven_qubit", h, lcus)
}

fn signed(m: &CMat, sign_of: f64) -> CMat {
    if sign_of < 0.0 {
        m.mapv(|z| -z)
    } else {
        m.clone()
    }
}

/// Parameters of the two-site Fermi-Hubbard chain under light.
#[derive(Debug, Clone)]
pub struct HubbardParams {
    /// Single-particle energies of the two momentum modes (>= 0).
    pub eps_k: [f64; 2],
    /// On-site interaction U (>= 0).
    pub u: f64,
    /// Drive amplitudes per site (>= 0).
    pub v_x: [f64; 2],
    /// Drive frequency Omega.
    pub big_omega: f64,
}

impl Default for HubbardParams {
    fn default() -> Self {
        // kinetic term from hopping J = 1 shifted to eps >= 0; a weak drive
        // keeps gamma T at desk scale
        Self {
            eps_k: [0.0, 2.0],
            u: 2.0,
            v_x: [0.25, 0.25],
            big_omega: 4.0 * std::f64::consts::PI,
        }
    }
}

/// Fermionic machinery on 4 spin-orbitals, Jordan-Wigner ordering
/// (site 0 up, site 1 up, site 0 down, site 1 down).
pub mod fermion {
    use super::*;

    pub const N_MODES: usize = 4;
    pub const DIM: usize = 16;

    /// Annihilation operators `c_p = Z^(x p) (x) sigma^- (x) I^(x rest)`;
    /// occupation of mode p is bit p (most significant first).
    pub fn annihilation_ops() -> Vec<CMat> {
        let z = pauli_z();
        let sm = {
            // |0><1| in the (empty, occupied) = (0, 1) basis
            let mut m = CMat::zeros((2, 2));
            m[[0, 1]] = C64::new(1.0, 0.0);
            m
        };
        let id = CMat::eye(2);
        (0..N_MODES)
            .map(|p| {
                let mut op = CMat::eye(1);
                for q in 0..N_MODES {
                    let factor = if q < p {
                        &z
                    } else if q == p {
                        &sm
                    } else {
                        &id
                    };
                    op = kron(&op, factor);
                }
                op
            })
            .collect()
    }

    /// Number operators `n_p = c_p^dag c_p`.
    pub fn number_ops() -> Vec<CMat> {
        annihilation_ops()
            .iter()
            .map(|c| dagger(c).dot(c))
            .collect()
    }

    /// Mode index of (site, spin) with spin 0 = up.
    pub fn mode(site: usize, spin: usize) -> usize {
        spin * 2 + site
    }
}

/// Two-site Fermi-Hubbard model under monochromatic light:
/// `H_0 = sum_{k sigma} eps_k n_{k sigma} + U sum_x n_{x up} n_{x down}`,
/// `H_ext(t) = sin(Omega t) sum_{x sigma} V_x n_{x sigma}`, so
/// `H_{+-1} = (+-i) sum_{x sigma} (V_x/2) n_{x sigma}`.
pub fn hubbard2(params: &HubbardParams) -> FqsResult<PresetModel> {
    for &e in &params.eps_k {
        if e < 0.0 {
            return Err(FqsError::Validation("eps_k must be >= 0".into()));
        }
    }
    if params.u < 0.0 || params.v_x.iter().any(|&v| v < 0.0) {
        return Err(FqsError::Validation("U and V_x must be >= 0".into()));
    }
    let cs = fermion::annihilation_ops();
    let ns = fermion::number_ops();
    let dim = fermion::DIM;
    let eye = CMat::eye(dim);

    // momentum-mode number operators from the 2-site Fourier transform
    // c_{k sigma} = (c_{0 sigma} + (-1)^k c_{1 sigma})/sqrt(2)
    let momentum_number = |k: usize, spin: usize| -> CMat {
        let s = if k == 0 { 1.0 } else { -1.0 };
        let ck = (&cs[fermion::mode(0, spin)] + &cs[fermion::mode(1, spin)].mapv(|z| z * s))
            .mapv(|z| z / C64::new(2f64.sqrt(), 0.0));
        dagger(&ck).dot(&ck)
    };

    let mut h0 = CMat::zeros((dim, dim));
    let mut h0_lcu_terms: Vec<(f64, CMat)> = Vec::new();
    // identity weight collects all constant pieces
    let mut id_weight = 0.0;
    for spin in 0..2 {
        for k in 0..2 {
            let nk = momentum_number(k, spin);
            h0 += &nk.mapv(|z| z * params.eps_k[k]);
            // n = (I + Ztilde)/2 with Ztilde = 2n - I (an involution)
            let ztilde = nk.mapv(|z| z * 2.0) - &eye;
            id_weight += params.eps_k[k] / 2.0;
            if params.eps_k[k] > 0.0 {
                h0_lcu_terms.push((params.eps_k[k] / 2.0, ztilde));
            }
        }
    }
    for site in 0..2 {
        let nu = &ns[fermion::mode(site, 0)];
        let nd = &ns[fermion::mode(site, 1)];
        h0 += &nu.dot(nd).mapv(|z| z * params.u);
        if params.u > 0.0 {
            // n_up n_down = (I + Z_up)(I + Z_down)/4
            let zu = nu.mapv(|z| z * 2.0) - &eye;
            let zd = nd.mapv(|z| z * 2.0) - &eye;
            id_weight += params.u / 4.0;
            h0_lcu_terms.push((params.u / 4.0, zu.clone()));
            h0_lcu_terms.push((params.u / 4.0, zd.clone()));
            h0_lcu_terms.push((params.u / 4.0, zu.dot(&zd)));
        }
    }
    if id_weight > 0.0 {
        h0_lcu_terms.insert(0, (id_weight, eye.clone()));
    }

    // drive operator sum_{x sigma} V_x n_{x sigma}
    let mut drive = CMat::zeros((dim, dim));
    let mut drive_terms_scaled: Vec<(f64, CMat)> = Vec::new(); // for (i/2) V n decomposition
    let mut drive_id_weight = 0.0;
    for site in 0..2 {
        for spin in 0..2 {
            let n = &ns[fermion::mode(site, spin)];
            drive += &n.mapv(|z| z * params.v_x[site]);
            if params.v_x[site] > 0.0 {
                let z = n.mapv(|z| z * 2.0) - &eye;
                drive_id_weight += params.v_x[site] / 4.0;
                drive_terms_scaled.push((params.v_x[site] / 4.0, z));
            }
        }
    }

    // H_{+1} = (i/2) drive, H_{-1} = (-i/2) drive
    let i_unit = C64::new(0.0, 1.0);
    let h_plus = drive.mapv(|z| z * i_unit * 0.5);
    let mut c = BTreeMap::new();
    c.insert(0, h0.clone());
    c.insert(1, h_plus.clone());
    c.insert(-1, dagger(&h_plus));
    let h = FourierHamiltonian::from_components(
        params.big_omega,
        c,
        DecayProfile::Finite { m_max: 1 },
    )?;

    let mut lcus = BTreeMap::new();
    lcus.insert(0, LCUDecomposition::new(h0_lcu_terms)?);
    for sign in [1i32, -1] {
        let phase = C64::new(0.0, sign as f64);
        let mut terms: Vec<(f64, CMat)> = Vec::new();
        if drive_id_weight > 0.0 {
            terms.push((drive_id_weight, eye.mapv(|z| z * phase)));
        }
        for (w, z) in &drive_terms_scaled {
            terms.push((*w, z.mapv(|v| v * phase)));
        }
        lcus.insert(sign, LCUDecomposition::new(terms)?);
    }
    PresetModel::from_parts("hubbard2", h, lcus)
}

/// Sine-schedule interpolation `H(t) = Hbar_0 (1 - sin wt) + Hbar_1 sin wt`
/// between two static Hamiltonians; `H(0) = Hbar_0`, `H(T/4) = Hbar_1`.
/// `H_{+-1} = -+ i (Hbar_0 - Hbar_1)/2`.
pub fn adiabatic_prep(h_bar0: &CMat, h_bar1: &CMat, omega: f64) -> FqsResult<PresetModel> {
    let b = (h_bar0 - h_bar1).mapv(|z| z * C64::new(0.0, -0.5));
    let mut c = BTreeMap::new();
    c.insert(0, h_bar0.clone());
    c.insert(1, b.clone());
    c.insert(-1, dagger(&b));
    let h = FourierHamiltonian::from_components(omega, c, DecayProfile::Finite { m_max: 1 })?;
    let mut lcus = BTreeMap::new();
    lcus.insert(0, LCUDecomposition::from_pauli_basis(h_bar0)?);
    lcus.insert(1, LCUDecomposition::from_pauli_basis(&b)?);
    lcus.insert(-1, LCUDecomposition::from_pauli_basis(&dagger(&b))?);
    PresetModel::from_parts("adiabatic_prep", h, lcus)
}

/// The default adiabatic-preparation instance: `Hbar_0 = Z`, `Hbar_1 = X`.
pub fn adiabatic_prep_default(omega: f64) -> FqsResult<PresetModel> {
    adiabatic_prep(&pauli_z(), &pauli_x(), omega)
}

/// Composite oracles for the interpolation modes, mirroring the two-branch
/// construction `O_{+-1} = |0><0| (x) (-+ i Obar_0) + |1><1| (x) (+- i Obar_1)`
/// with `|G_{+-1}> = (sqrt(abar_0)|0>|Gbar_0> + sqrt(abar_1)|1>|Gbar_1>)/sqrt(abar_0+abar_1)`.
/// Returns the block-encoding of `2 H_{+-1} / (abar_0 + abar_1)`.
pub fn adiabatic_prep_mode_encoding(
    h_bar0: &CMat,
    h_bar1: &CMat,
    sign_plus: bool,
) -> FqsResult<crate::blockenc::BlockEncoding> {
    let lcu0 = LCUDecomposition::from_pauli_basis(h_bar0)?;
    let lcu1 = LCUDecomposition::from_pauli_basis(h_bar1)?;
    let phase = if sign_plus {
        C64::new(0.0, -1.0) // -i Obar_0 on the first branch for H_{+1}
    } else {
        C64::new(0.0, 1.0)
    };
    let mut terms: Vec<(f64, CMat)> = Vec::new();
    for (w, u) in lcu0.terms() {
        terms.push((*w, u.mapv(|z| z * phase)));
    }
    for (w, u) in lcu1.terms() {
        terms.push((*w, u.mapv(|z| z * -phase)));
    }
    let lcu = LCUDecomposition::new(terms)?;
    crate::blockenc::encode_lcu(&lcu)
}

/// Gaussian-wave-packet drive on the two-site Hubbard system: packets of
/// `p` carrier waves, width `tau`, peaks at `t = (n + 1/2) T`. The Fourier
/// components decay like `e^{-O(m^2)}`, so this preset carries an
/// exponential-decay profile. `m_cut` must resolve the packet (around
/// `p + 6` for `omega tau = 1`); an under-resolved cutoff fails the
/// reconstruction check.
pub fn gaussian_packet(
    params: &HubbardParams,
    p_waves: u32,
    omega_tau: f64,
    m_cut: usize,
) -> FqsResult<PresetModel> {
    let base = hubbard2(params)?;
    let omega = params.big_omega / p_waves as f64;
    let tau = omega_tau / omega;
    let period = 2.0 * std::f64::consts::PI / omega;
    let h0 = base.hamiltonian.component(0).unwrap().clone();
    let ns = fermion::number_ops();
    let mut drive = CMat::zeros((fermion::DIM, fermion::DIM));
    for site in 0..2 {
        for spin in 0..2 {
            drive += &ns[fermion::mode(site, spin)].mapv(|z| z * params.v_x[site]);
        }
    }
    let big_omega = params.big_omega;
    let signal = move |t: f64| -> CMat {
        let mut env = 0.0;
        for n in -8i64..=8 {
            let dt = t - (n as f64 + 0.5) * period;
            env += (-dt * dt / (2.0 * tau * tau)).exp();
        }
        &h0 + &drive.mapv(|z| z * env * (big_omega * t).sin())
    };
    // tightest exponential envelope for the quadrature modes at zeta = 1
    let n_quad = (8 * m_cut).max(256);
    let probe = fourier_from_signal(&signal, omega, m_cut, n_quad, 1e-8, None)?;
    let zeta = 1.0;
    let mut h_env: f64 = 1e-300;
    for m in probe.modes() {
        if m != 0 {
            h_env = h_env
                .max(spectral_norm(probe.component(m).unwrap()) * ((m.abs() as f64) / zeta).exp());
        }
    }
    let h = FourierHamiltonian::from_components(
        omega,
        probe.components().clone(),
        DecayProfile::ExponentialDecay { h: h_env, zeta },
    )?;
    // LCUs per stored mode from the Pauli basis (16 = 2^4 dimensional)
    let mut lcus = BTreeMap::new();
    for m in h.modes() {
        lcus.insert(
            m,
            LCUDecomposition::from_pauli_basis(h.component(m).unwrap())?,
        );
    }
    PresetModel::from_parts("gaussian_packet", h, lcus)
}
