//! Matrix-level block-encodings and qubitization certificates.
//!
//! A block-encoding is a unitary `O`, a unit oracle state `|G>`, and a
//! normalization `alpha_enc` with `<G|O|G> = target/alpha_enc`. LCU oracles
//! and the linear-potential oracle are kept dense; the composite oracle for
//! the refined effective Hamiltonian is stored in structured form (its
//! registers multiply out quickly) and densified only at test sizes.
//!
//! Register order for the composite oracle, most significant first:
//! d (branch flag, dim 2), c (mode selector, dim 2 m_max + 1), b
//! (linear-potential ancilla, dim 2L), a (per-mode LCU ancilla), then the
//! encoded system (Fourier register of dim 2L times the physical system).
//!
//! Note on normalization: summing the 2L linear-potential unitaries with
//! coefficient omega/2 gives total weight L omega, so the composite encodes
//! at alpha + L omega (for the amplification space C^(8 l_max) this reads
//! alpha + 4 l_max omega).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{FqsError, FqsResult};
use crate::hamiltonian::{FourierHamiltonian, LCUDecomposition};
use crate::linalg::{
    dagger, eigh, inner, kron, spectral_norm, unitarity_residual, vec_norm, CMat, CVec, C64,
};
use crate::sambe::{build_effective_pbc, build_linear_potential, SambeSpace};

const RESIDUAL_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-12;
/// Largest joint dimension the oracle is materialized at.
const DENSE_CAP: usize = 2048;

/// Unitary oracle in either dense or structured (composite) form.
#[derive(Debug, Clone)]
pub enum OracleRepr {
    Dense(CMat),
    Effective(Box<EffectiveOracle>),
}

/// A verified block-encoding `(O, |G>, alpha_enc)` of a Hermitian target.
#[derive(Debug, Clone)]
pub struct BlockEncoding {
    pub oracle: OracleRepr,
    pub oracle_state: CVec,
    pub alpha_enc: f64,
    pub target: CMat,
    /// Ancilla register layout, most significant first.
    pub layout: Vec<(&'static str, usize)>,
}

impl BlockEncoding {
    pub fn anc_dim(&self) -> usize {
        self.layout.iter().map(|(_, d)| d).product()
    }

    pub fn sys_dim(&self) -> usize {
        self.target.nrows()
    }

    pub fn joint_dim(&self) -> usize {
        self.anc_dim() * self.sys_dim()
    }

    /// Apply the oracle to a joint (ancilla x system) vector.
    pub fn apply_oracle(&self, v: &CVec) -> CVec {
        match &self.oracle {
            OracleRepr::Dense(o) => o.dot(v),
            OracleRepr::Effective(e) => e.apply(v, false),
        }
    }

    pub fn apply_oracle_dagger(&self, v: &CVec) -> CVec {
        match &self.oracle {
            OracleRepr::Dense(o) => dagger(o).dot(v),
            OracleRepr::Effective(e) => e.apply(v, true),
        }
    }

    /// Dense oracle matrix; errors above the internal dense-size cap.
    pub fn oracle_dense(&self) -> FqsResult<CMat> {
        match &self.oracle {
            OracleRepr::Dense(o) => Ok(o.clone()),
            OracleRepr::Effective(e) => {
                if self.joint_dim() > DENSE_CAP {
                    return Err(FqsError::Validation(format!(
                        "joint dimension {} exceeds dense cap {}",
                        self.joint_dim(),
                        DENSE_CAP
                    )));
                }
                Ok(e.to_dense())
            }
        }
    }

    /// `<G| O |G>` on the system factor.
    pub fn encoded(&self) -> CMat {
        let ns = self.sys_dim();
        let na = self.anc_dim();
        let mut out = CMat::zeros((ns, ns));
        for j in 0..ns {
            let applied = match &self.oracle {
                OracleRepr::Dense(o) => {
                    let mut joint = CVec::zeros(na * ns);
                    for (ia, g) in self.oracle_state.iter().enumerate() {
                        joint[ia * ns + j] = *g;
                    }
                    o.dot(&joint)
                }
                OracleRepr::Effective(e) => e.apply_state_column(&self.oracle_state, j),
            };
            for i in 0..ns {
                let mut acc = C64::new(0.0, 0.0);
                for ia in 0..na {
                    acc += self.oracle_state[ia].conj() * applied[ia * ns + i];
                }
                out[[i, j]] = acc;
            }
        }
        out
    }

    /// Spectral-norm residual `||<G|O|G> - target/alpha_enc||`.
    pub fn residual(&self) -> f64 {
        let diff = self.encoded() - self.target.mapv(|z| z / self.alpha_enc);
        spectral_norm(&diff)
    }

    /// Unitarity of the oracle: dense check below the cap, factor checks
    /// plus random-vector probes above it.
    pub fn oracle_unitarity_residual(&self) -> f64 {
        match &self.oracle {
            OracleRepr::Dense(o) => unitarity_residual(o),
            OracleRepr::Effective(e) => {
                if self.joint_dim() <= DENSE_CAP {
                    unitarity_residual(&e.to_dense())
                } else {
                    e.unitarity_probe()
                }
            }
        }
    }

    /// Enforce the block-encoding invariants.
    pub fn validate(&self) -> FqsResult<()> {
        let state_norm = vec_norm(&self.oracle_state);
        if (state_norm - 1.0).abs() > UNITARY_TOL {
            return Err(FqsError::Validation(format!(
                "oracle state norm {state_norm} != 1"
            )));
        }
        let u = self.oracle_unitarity_residual();
        if u > UNITARY_TOL {
            return Err(FqsError::Validation(format!(
                "oracle unitarity residual {u:.3e}"
            )));
        }
        let norm_target = spectral_norm(&self.target);
        if self.alpha_enc + 1e-12 < norm_target {
            return Err(FqsError::Validation(format!(
                "alpha_enc = {} below ||target|| = {norm_target}",
                self.alpha_enc
            )));
        }
        let r = self.residual();
        if r > RESIDUAL_TOL {
            return Err(FqsError::Validation(format!(
                "block-encoding residual {r:.3e} exceeds {RESIDUAL_TOL:.1e}"
            )));
        }
        Ok(())
    }
}

/// LCU block-encoding: `O = sum_j |j><j| (x) U_j`, `|G> = sum_j sqrt(a_j/a)|j>`.
pub fn encode_lcu(decomp: &LCUDecomposition) -> FqsResult<BlockEncoding> {
    let n_terms = decomp.n_terms();
    let d = decomp.dim();
    let alpha = decomp.alpha();
    if alpha <= 0.0 {
        return Err(FqsError::AllZero);
    }
    let mut oracle = CMat::zeros((n_terms * d, n_terms * d));
    let mut state = CVec::zeros(n_terms);
    for (j, (coeff, u)) in decomp.terms().iter().enumerate() {
        for a in 0..d {
            for b in 0..d {
                oracle[[j * d + a, j * d + b]] = u[[a, b]];
            }
        }
        state[j] = C64::new((coeff / alpha).sqrt(), 0.0);
    }
    Ok(BlockEncoding {
        oracle: OracleRepr::Dense(oracle),
        oracle_state: state,
        alpha_enc: alpha,
        target: decomp.reconstruct(),
        layout: vec![("j", n_terms)],
    })
}

/// Comparator `|l, l'>|b> -> |l, l'>|b (+) [l' < l]>` on C^(2L) (x) C^(2L) (x) C^2.
pub fn comparator(l_half: usize) -> CMat {
    let space = SambeSpace::new(l_half, 1);
    let n = space.slots();
    let dim = n * n * 2;
    let mut mat = CMat::zeros((dim, dim));
    for (i, l) in space.labels().enumerate() {
        for (j, lp) in space.labels().enumerate() {
            let flip = usize::from(lp < l);
            for b in 0..2 {
                let row = (i * n + j) * 2 + (b ^ flip);
                let col = (i * n + j) * 2 + b;
                mat[[row, col]] = C64::new(1.0, 0.0);
            }
        }
    }
    mat
}

/// The sign core of the linear-potential oracle, `sum_l |l><l|_b (x) V_l`,
/// a (2L)^2 diagonal of +-1: +1 where the system label is >= the ancilla
/// label, -1 otherwise.
pub fn linear_potential_sign_core(l_half: usize) -> CMat {
    let space = SambeSpace::new(l_half, 1);
    let n = space.slots();
    let mut mat = CMat::zeros((n * n, n * n));
    for (i, l) in space.labels().enumerate() {
        for (j, lp) in space.labels().enumerate() {
            let sign = if lp >= l { 1.0 } else { -1.0 };
            mat[[i * n + j, i * n + j]] = C64::new(sign, 0.0);
        }
    }
    mat
}

/// The same sign core obtained through the comparator:
/// `Comp^dag (I (x) I (x) Z) Comp` restricted to the `b' = 0` sector.
pub fn linear_potential_sign_via_comparator(l_half: usize) -> CMat {
    let comp = comparator(l_half);
    let n = 2 * l_half;
    let dim = n * n * 2;
    let mut z = CMat::zeros((dim, dim));
    for i in 0..(n * n) {
        z[[i * 2, i * 2]] = C64::new(1.0, 0.0);
        z[[i * 2 + 1, i * 2 + 1]] = C64::new(-1.0, 0.0);
    }
    let full = dagger(&comp).dot(&z).dot(&comp);
    // b' = 0 sector
    let mut out = CMat::zeros((n * n, n * n));
    for i in 0..(n * n) {
        for j in 0..(n * n) {
            out[[i, j]] = full[[i * 2, j * 2]];
        }
    }
    out
}

/// Uniform superposition `|a^L>` over D^L.
pub fn uniform_state(l_half: usize) -> CVec {
    let n = 2 * l_half;
    CVec::from_elem(n, C64::new(1.0 / (n as f64).sqrt(), 0.0))
}

/// Block-encoding of the linear-potential Hamiltonian on C^(2L) (x) C^d,
/// with oracle `O_LP = sum_l |l><l|_b (x) V_l (x) I_d`, oracle state
/// `|a^L>_b`, and normalization `alpha_enc = L omega`.
pub fn encode_linear_potential(l_half: usize, omega: f64, dim_sys: usize) -> BlockEncoding {
    let core = linear_potential_sign_core(l_half);
    let oracle = kron(&core.mapv(|z| z), &CMat::eye(dim_sys));
    // scale: H_LP = sum_l (omega/2) V_l; |D^L| = 2L terms of weight omega/2
    let target = build_linear_potential(l_half, omega, dim_sys)
        .matrix()
        .clone();
    BlockEncoding {
        oracle: OracleRepr::Dense(oracle),
        oracle_state: uniform_state(l_half),
        alpha_enc: l_half as f64 * omega,
        target,
        layout: vec![("b", 2 * l_half)],
    }
}

/// Structured composite oracle for the refined effective Hamiltonian.
#[derive(Debug, Clone)]
pub struct EffectiveOracle {
    pub m_max: usize,
    pub l_half: usize,
    pub a_dim: usize,
    pub sys_dim: usize,
    /// Dense `O_m` on the (a x system) factor, one per mode slot.
    pub mode_oracles: BTreeMap<i32, CMat>,
}

impl EffectiveOracle {
    fn n_c(&self) -> usize {
        2 * self.m_max + 1
    }

    fn n_f(&self) -> usize {
        2 * self.l_half
    }

    pub fn joint_dim(&self) -> usize {
        2 * self.n_c() * self.n_f() * self.a_dim * self.n_f() * self.sys_dim
    }

    /// Apply `O_eff` (or its adjoint) to a joint vector.
    ///
    /// d = 0 branch: mode-selected adder on the Fourier register and `O_m`
    /// on (a x system); d = 1 branch: minus the linear-potential sign.
    pub fn apply(&self, v: &CVec, adjoint: bool) -> CVec {
        let (nc, nf, na, ns) = (self.n_c(), self.n_f(), self.a_dim, self.sys_dim);
        let space = SambeSpace::new(self.l_half, 1);
        let mut out = CVec::zeros(v.len());
        let block = na * ns;
        let mut gathered = CVec::zeros(block);
        // strides with index order (d, c, b, a, F, s)
        let s_s = 1;
        let s_f = ns;
        let s_a = nf * ns;
        let s_b = na * nf * ns;
        let s_c = nf * s_b;
        let s_d = nc * s_c;

        // d = 0: sum_m |m><m|_c (x) I_b (x) Add_m^F (x) O_m^{a,s}
        for ic in 0..nc {
            let m = ic as i64 - self.m_max as i64;
            let om = &self.mode_oracles[&(m as i32)];
            for ib in 0..nf {
                for if_src in 0..nf {
                    let l_src = space.l_of(if_src);
                    let shift = if adjoint { -m } else { m };
                    let if_dst = space.slot_of(space.wrap_add(l_src, shift)).unwrap();
                    let base_src = ic * s_c + ib * s_b + if_src * s_f;
                    let base_dst = ic * s_c + ib * s_b + if_dst * s_f;
                    for ia in 0..na {
                        for is in 0..ns {
                            gathered[ia * ns + is] = v[base_src + ia * s_a + is * s_s];
                        }
                    }
                    for row in 0..block {
                        let mut acc = C64::new(0.0, 0.0);
                        if adjoint {
                            for col in 0..block {
                                acc += om[[col, row]].conj() * gathered[col];
                            }
                        } else {
                            for col in 0..block {
                                acc += om[[row, col]] * gathered[col];
                            }
                        }
                        let (ia, is) = (row / ns, row % ns);
                        out[base_dst + ia * s_a + is * s_s] += acc;
                    }
                }
            }
        }

        // d = 1: -(sign) diagonal, self-adjoint
        for ic in 0..nc {
            for ib in 0..nf {
                let l_b = space.l_of(ib);
                for if_idx in 0..nf {
                    let l_f = space.l_of(if_idx);
                    let sign = if l_f >= l_b { -1.0 } else { 1.0 };
                    let base = s_d + ic * s_c + ib * s_b + if_idx * s_f;
                    for ia in 0..na {
                        for is in 0..ns {
                            let idx = base + ia * s_a + is;
                            out[idx] = v[idx] * sign;
                        }
                    }
                }
            }
        }
        out
    }

    /// `O (|G> (x) e_j)` exploiting the sparsity of a single system column;
    /// same arithmetic as [`Self::apply`] with the source Fourier slot and
    /// physical index pinned.
    pub fn apply_state_column(&self, g: &CVec, j: usize) -> CVec {
        let (nc, nf, na, ns) = (self.n_c(), self.n_f(), self.a_dim, self.sys_dim);
        let space = SambeSpace::new(self.l_half, 1);
        let (if_j, is_j) = (j / ns, j % ns);
        let l_j = space.l_of(if_j);
        let mut out = CVec::zeros(self.joint_dim());
        let block = na * ns;
        let s_f = ns;
        let s_a = nf * ns;
        let s_b = na * nf * ns;
        let s_c = nf * s_b;
        let s_d = nc * s_c;

        for ic in 0..nc {
            let m = ic as i64 - self.m_max as i64;
            let om = &self.mode_oracles[&(m as i32)];
            let if_dst = space.slot_of(space.wrap_add(l_j, m)).unwrap();
            for ib in 0..nf {
                let base_dst = ic * s_c + ib * s_b + if_dst * s_f;
                for row in 0..block {
                    let mut acc = C64::new(0.0, 0.0);
                    for ia in 0..na {
                        let gv = g[(ic * nf + ib) * na + ia];
                        if gv != C64::new(0.0, 0.0) {
                            acc += om[[row, ia * ns + is_j]] * gv;
                        }
                    }
                    if acc != C64::new(0.0, 0.0) {
                        let (ia, is) = (row / ns, row % ns);
                        out[base_dst + ia * s_a + is] += acc;
                    }
                }
            }
        }
        let d1_state = nc * nf * na;
        for ic in 0..nc {
            for ib in 0..nf {
                let l_b = space.l_of(ib);
                let sign = if l_j >= l_b { -1.0 } else { 1.0 };
                for ia in 0..na {
                    let gv = g[d1_state + (ic * nf + ib) * na + ia];
                    if gv != C64::new(0.0, 0.0) {
                        let idx = s_d + ic * s_c + ib * s_b + ia * s_a + if_j * s_f + is_j;
                        out[idx] += gv * sign;
                    }
                }
            }
        }
        out
    }

    /// Densify (test sizes only).
    pub fn to_dense(&self) -> CMat {
        let dim = self.joint_dim();
        let mut out = CMat::zeros((dim, dim));
        let mut basis = CVec::zeros(dim);
        for j in 0..dim {
            basis[j] = C64::new(1.0, 0.0);
            let col = self.apply(&basis, false);
            for i in 0..dim {
                out[[i, j]] = col[i];
            }
            basis[j] = C64::new(0.0, 0.0);
        }
        out
    }

    /// Probe unitarity: exact check of every stored factor plus
    /// norm-preservation and round-trip checks on pseudo-random vectors.
    pub fn unitarity_probe(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for om in self.mode_oracles.values() {
            worst = worst.max(unitarity_residual(om));
        }
        let dim = self.joint_dim();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..4 {
            let v: CVec = (0..dim).map(|_| C64::new(next(), next())).collect();
            let nv = vec_norm(&v);
            let ov = self.apply(&v, false);
            worst = worst.max((vec_norm(&ov) / nv - 1.0).abs());
            let back = self.apply(&ov, true);
            let diff = (&back - &v)
                .mapv(|z| z.norm())
                .fold(0.0f64, |a, &b| a.max(b));
            worst = worst.max(diff / nv);
        }
        worst
    }
}

/// Composite block-encoding of the refined (PBC) effective Hamiltonian from
/// per-mode LCUs. Encodes `build_effective_pbc(h, L) / (alpha + L omega)`.
pub fn encode_effective(
    h: &FourierHamiltonian,
    l_half: usize,
    lcus: &BTreeMap<i32, LCUDecomposition>,
) -> FqsResult<BlockEncoding> {
    let m_max = match h.profile() {
        crate::hamiltonian::DecayProfile::Finite { m_max } => *m_max,
        _ => {
            return Err(FqsError::Validation(
                "encode_effective requires a finite profile".into(),
            ))
        }
    };
    if l_half < m_max + 1 {
        return Err(FqsError::LTooSmall {
            l: l_half,
            required: m_max + 1,
        });
    }
    let d_sys = h.dim();
    let nf = 2 * l_half;
    let omega = h.omega();

    // Per-mode alphas and oracle states; identity oracle for absent modes.
    let mut alphas: BTreeMap<i32, f64> = BTreeMap::new();
    let mut a_dim = 1usize;
    for m in -(m_max as i32)..=(m_max as i32) {
        match h.component(m) {
            Some(hm) if hm.iter().any(|z| z.norm() > 1e-14) => {
                let lcu = lcus.get(&m).ok_or(FqsError::MissingModeEncoding(m))?;
                lcu.verify_encodes(hm, 1e-12)?;
                a_dim = a_dim.max(lcu.n_terms());
                alphas.insert(m, lcu.alpha());
            }
            _ => {
                alphas.insert(m, 0.0);
            }
        }
    }
    let alpha: f64 = alphas.values().sum();
    let alpha_enc = alpha + l_half as f64 * omega;

    // Mode oracles padded onto the common a register.
    let mut mode_oracles = BTreeMap::new();
    let mut mode_states: BTreeMap<i32, CVec> = BTreeMap::new();
    for m in -(m_max as i32)..=(m_max as i32) {
        let mut om = CMat::eye(a_dim * d_sys);
        let mut gm = CVec::zeros(a_dim);
        gm[0] = C64::new(1.0, 0.0);
        if alphas[&m] > 0.0 {
            let lcu = &lcus[&m];
            for (j, (coeff, u)) in lcu.terms().iter().enumerate() {
                for r in 0..d_sys {
                    for c in 0..d_sys {
                        om[[j * d_sys + r, j * d_sys + c]] = u[[r, c]];
                    }
                }
                gm[j] = C64::new((coeff / lcu.alpha()).sqrt(), 0.0);
            }
        }
        mode_oracles.insert(m, om);
        mode_states.insert(m, gm);
    }

    let oracle = EffectiveOracle {
        m_max,
        l_half,
        a_dim,
        sys_dim: d_sys,
        mode_oracles,
    };

    // |G> over (d, c, b, a): d = 0 branch sqrt(alpha_m/alpha_enc) |m>|a^L>|G_m>,
    // d = 1 branch sqrt(L omega/alpha_enc) |0_c>|a^L>|0_a>.
    let nc = 2 * m_max + 1;
    let anc_dim = 2 * nc * nf * a_dim;
    let mut g = CVec::zeros(anc_dim);
    let b_amp = 1.0 / (nf as f64).sqrt();
    for ic in 0..nc {
        let m = ic as i64 - m_max as i64;
        let w = (alphas[&(m as i32)] / alpha_enc).sqrt();
        if w == 0.0 {
            continue;
        }
        let gm = &mode_states[&(m as i32)];
        for ib in 0..nf {
            for (ia, ga) in gm.iter().enumerate() {
                g[(ic * nf + ib) * a_dim + ia] += C64::new(w * b_amp, 0.0) * ga;
            }
        }
    }
    let w_lp = (l_half as f64 * omega / alpha_enc).sqrt();
    let ic0 = m_max; // c slot of m = 0
    let d1_offset = nc * nf * a_dim;
    for ib in 0..nf {
        g[d1_offset + (ic0 * nf + ib) * a_dim] += C64::new(w_lp * b_amp, 0.0);
    }

    let target = build_effective_pbc(h, l_half)?.matrix().clone();
    Ok(BlockEncoding {
        oracle: OracleRepr::Effective(Box::new(oracle)),
        oracle_state: g,
        alpha_enc,
        target,
        layout: vec![("d", 2), ("c", nc), ("b", nf), ("a", a_dim)],
    })
}

/// Coefficient-oracle state `sum_m sqrt(alpha_m/alpha) |m>` over ascending m.
pub fn g_coef(alphas: &BTreeMap<i32, f64>) -> FqsResult<CVec> {
    for &a in alphas.values() {
        if a < 0.0 {
            return Err(FqsError::NegativeCoefficient(a));
        }
    }
    let total: f64 = alphas.values().sum();
    if total <= 0.0 {
        return Err(FqsError::AllZero);
    }
    Ok(alphas
        .values()
        .map(|&a| C64::new((a / total).sqrt(), 0.0))
        .collect())
}

/// Coefficient-oracle state over (m, j) pairs, lexicographic in ascending m
/// then j; returns the state and its index layout.
pub fn g_coef_pairs(alpha_mj: &BTreeMap<i32, Vec<f64>>) -> FqsResult<(CVec, Vec<(i32, usize)>)> {
    let mut total = 0.0;
    for alphas in alpha_mj.values() {
        for &a in alphas {
            if a < 0.0 {
                return Err(FqsError::NegativeCoefficient(a));
            }
            total += a;
        }
    }
    if total <= 0.0 {
        return Err(FqsError::AllZero);
    }
    let mut layout = Vec::new();
    let mut entries = Vec::new();
    for (&m, alphas) in alpha_mj {
        for (j, &a) in alphas.iter().enumerate() {
            layout.push((m, j));
            entries.push(C64::new((a / total).sqrt(), 0.0));
        }
    }
    Ok((CVec::from(entries), layout))
}

/// The qubitization iterate `W = ((2|G><G| - I) (x) I) O`.
#[derive(Debug, Clone)]
pub struct WalkOperator {
    pub matrix: CMat,
    pub alpha_enc: f64,
    /// True when the oracle was extended with a flag qubit to make it
    /// self-inverse before forming the iterate.
    pub extended: bool,
    pub anc_dim: usize,
    pub sys_dim: usize,
    pub oracle_state: CVec,
}

/// Build the walk operator. Oracles that are not self-inverse get the
/// standard one-qubit extension `|1><0| (x) O + |0><1| (x) O^dag` first, so
/// the eigenphase relation `+-arccos(lambda/alpha_enc)` holds exactly.
pub fn walk_operator(be: &BlockEncoding) -> FqsResult<WalkOperator> {
    let o = be.oracle_dense()?;
    let ns = be.sys_dim();
    let self_inverse = {
        let sq = o.dot(&o);
        let mut r: f64 = 0.0;
        for i in 0..sq.nrows() {
            for j in 0..sq.ncols() {
                let expect = if i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
                r = r.max((sq[[i, j]] - expect).norm());
            }
        }
        r < 1e-12
    };
    let (oracle, state, extended) = if self_inverse {
        (o, be.oracle_state.clone(), false)
    } else {
        let dim = o.nrows();
        let mut ext = CMat::zeros((2 * dim, 2 * dim));
        let od = dagger(&o);
        for i in 0..dim {
            for j in 0..dim {
                ext[[dim + i, j]] = o[[i, j]]; // |1><0| (x) O
                ext[[i, dim + j]] = od[[i, j]]; // |0><1| (x) O^dag
            }
        }
        let mut st = CVec::zeros(2 * be.anc_dim());
        let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for (i, gv) in be.oracle_state.iter().enumerate() {
            st[i] = amp * gv;
            st[be.anc_dim() + i] = amp * gv;
        }
        (ext, st, true)
    };
    let na = state.len();
    // reflection (2|G><G| - I) (x) I_sys
    let mut refl = CMat::zeros((na * ns, na * ns));
    for ia in 0..na {
        for ja in 0..na {
            let val = state[ia] * state[ja].conj() * 2.0;
            for s in 0..ns {
                refl[[ia * ns + s, ja * ns + s]] = val;
            }
        }
    }
    for i in 0..(na * ns) {
        refl[[i, i]] -= C64::new(1.0, 0.0);
    }
    Ok(WalkOperator {
        matrix: refl.dot(&oracle),
        alpha_enc: be.alpha_enc,
        extended,
        anc_dim: na,
        sys_dim: ns,
        oracle_state: state,
    })
}

/// Largest deviation of the walk eigenphases from `+-arccos(lambda/alpha)`
/// over every eigenpair of the target.
pub fn walk_eigenphase_residual(be: &BlockEncoding) -> FqsResult<f64> {
    let w = walk_operator(be)?;
    let eig = eigh(&be.target)?;
    let ns = w.sys_dim;
    let mut worst: f64 = 0.0;
    for (k, &lam) in eig.values.iter().enumerate() {
        let x = (lam / w.alpha_enc).clamp(-1.0, 1.0);
        let theta = x.acos();
        // u1 = |G> (x) v_k
        let mut u1 = CVec::zeros(w.anc_dim * ns);
        for (ia, g) in w.oracle_state.iter().enumerate() {
            for s in 0..ns {
                u1[ia * ns + s] = g * eig.vectors[[s, k]];
            }
        }
        let u2 = w.matrix.dot(&u1);
        let overlap = inner(&u1, &u2);
        let mut perp = u2.clone();
        perp.zip_mut_with(&u1, |p, &u| *p -= overlap * u);
        let pn = vec_norm(&perp);
        if pn < 1e-8 {
            // 1D case (|lambda| = alpha): W u1 = +- u1, phase arccos(+-1)
            let expected = C64::from_polar(1.0, -theta);
            let dev = (overlap - expected)
                .norm()
                .min((overlap - expected.conj()).norm());
            worst = worst.max(dev);
            continue;
        }
        let perp = perp.mapv(|z| z / pn);
        // 2x2 restriction of W on span{u1, perp}
        let wu2 = w.matrix.dot(&perp);
        let m = [
            inner(&u1, &u2),
            inner(&u1, &wu2),
            inner(&perp, &u2),
            inner(&perp, &wu2),
        ];
        // invariance of the subspace
        let mut leak1 = u2.clone();
        leak1.zip_mut_with(&u1, |p, &u| *p -= m[0] * u);
        leak1.zip_mut_with(&perp, |p, &u| *p -= m[2] * u);
        let mut leak2 = wu2.clone();
        leak2.zip_mut_with(&u1, |p, &u| *p -= m[1] * u);
        leak2.zip_mut_with(&perp, |p, &u| *p -= m[3] * u);
        worst = worst.max(vec_norm(&leak1)).max(vec_norm(&leak2));
        // eigenphases of the 2x2 block
        let tr = m[0] + m[3];
        let det = m[0] * m[3] - m[1] * m[2];
        let disc = (tr * tr - det * 4.0).sqrt();
        let mu1 = (tr + disc) * 0.5;
        let mu2 = (tr - disc) * 0.5;
        let phases = [mu1.arg().abs(), mu2.arg().abs()];
        let dev = (phases[0] - theta).abs().max((phases[1] - theta).abs());
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Selected query degree for simulating `e^{-i x tau}` on x in [-1, 1].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QueryDegree {
    pub q: usize,
    pub tau: f64,
    pub epsilon: f64,
    /// Certified Jacobi-Anger tail at the selected degree.
    pub tail: f64,
    /// The Theta-form estimate `tau + ln(1/eps)/ln(e + ln(1/eps)/tau)`.
    pub closed_form: f64,
}

/// `J_0(x) .. J_kmax(x)` by Miller downward recurrence.
pub fn bessel_jn_scan(x: f64, kmax: usize) -> Vec<f64> {
    assert!(x >= 0.0);
    if x == 0.0 {
        let mut out = vec![0.0; kmax + 1];
        out[0] = 1.0;
        return out;
    }
    let start = kmax.max(x.ceil() as usize) + 51;
    let mut js = vec![0.0f64; start + 2];
    js[start + 1] = 0.0;
    js[start] = 1e-300;
    for k in (1..=start).rev() {
        js[k - 1] = (2.0 * k as f64 / x) * js[k] - js[k + 1];
        if js[k - 1].abs() > 1e250 {
            let scale = js[k - 1].abs();
            for v in js[(k - 1)..].iter_mut() {
                *v /= scale;
            }
        }
    }
    // normalization J_0 + 2 sum_{k even >= 2} J_k = 1
    let mut norm = js[0];
    let mut k = 2;
    while k <= start {
        norm += 2.0 * js[k];
        k += 2;
    }
    js.truncate(kmax + 1);
    for v in js.iter_mut() {
        *v /= norm;
    }
    js
}

/// log of the certified tail remainder `4 (x/2)^(K+1) / (K+1)!`, valid once
/// `K + 1 >= x`.
fn log_tail_remainder(x: f64, k: usize) -> f64 {
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    let n = (k + 1) as f64;
    4f64.ln() + n * (x / 2.0).ln() - crate::bounds::ln_factorial(k as u64 + 1)
}

/// Smallest degree q whose Jacobi-Anger truncation error
/// `2 sum_{k>q} |J_k(tau)|` (plus a certified remainder) is at most epsilon.
pub fn query_degree(tau: f64, epsilon: f64) -> FqsResult<QueryDegree> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(FqsError::InvalidEpsilon(epsilon));
    }
    if tau < 0.0 {
        return Err(FqsError::Validation("tau must be >= 0".into()));
    }
    let l = (1.0 / epsilon).ln();
    let closed_form = if tau > 0.0 {
        tau + l / (std::f64::consts::E + l / tau).ln()
    } else {
        0.0
    };
    if tau == 0.0 {
        return Ok(QueryDegree {
            q: 1,
            tau,
            epsilon,
            tail: 0.0,
            closed_form,
        });
    }
    // find a cutoff K with negligible certified remainder
    let mut k_top = ((2.0 * tau).ceil() as usize).max(4 * closed_form.ceil() as usize) + 60;
    let floor = (epsilon * 1e-6).ln().min((1e-18f64).ln());
    while log_tail_remainder(tau, k_top) > floor {
        k_top *= 2;
        if k_top > 1_000_000 {
            return Err(FqsError::Numerical("query_degree cutoff blew up".into()));
        }
    }
    let js = bessel_jn_scan(tau, k_top);
    let remainder = log_tail_remainder(tau, k_top).exp();
    // suffix sums of 2|J_k|
    let mut q = k_top;
    let mut tail = remainder;
    let mut tail_at_q = tail;
    while q > 0 {
        let next = tail + 2.0 * js[q].abs();
        if next > epsilon {
            break;
        }
        tail = next;
        q -= 1;
        tail_at_q = tail;
    }
    let q = q.max(1);
    Ok(QueryDegree {
        q,
        tau,
        epsilon,
        tail: tail_at_q,
        closed_form,
    })
}

/// Max-norm error of the degree-q Chebyshev (Jacobi-Anger) truncation of
/// `e^{-i x tau}` on a uniform grid over [-1, 1]; the grid oracle for
/// [`query_degree`].
pub fn chebyshev_truncation_error(tau: f64, q: usize, n_grid: usize) -> f64 {
    let js = bessel_jn_scan(tau, q);
    let mut worst: f64 = 0.0;
    for g in 0..n_grid {
        let x = -1.0 + 2.0 * g as f64 / (n_grid - 1) as f64;
        // T_k recurrence
        let mut acc = C64::new(js[0], 0.0);
        let mut t_prev = 1.0f64;
        let mut t_cur = x;
        let mut ik = C64::new(0.0, -1.0); // (-i)^k for k = 1
        for &jk in &js[1..=q] {
            acc += ik * C64::new(2.0 * jk * t_cur, 0.0);
            let t_next = 2.0 * x * t_cur - t_prev;
            t_prev = t_cur;
            t_cur = t_next;
            ik *= C64::new(0.0, -1.0);
        }
        let exact = C64::from_polar(1.0, -tau * x);
        worst = worst.max((exact - acc).norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{pauli_x, pauli_z, scaled, DecayProfile};
    use crate::linalg::max_abs_diff;
    use std::collections::BTreeMap;

    fn driven_qubit() -> FourierHamiltonian {
        let mut c = BTreeMap::new();
        c.insert(0, scaled(&pauli_z(), 0.5));
        c.insert(1, scaled(&pauli_x(), 0.5));
        c.insert(-1, scaled(&pauli_x(), 0.5));
        FourierHamiltonian::from_components(1.0, c, DecayProfile::Finite { m_max: 1 }).unwrap()
    }

    fn driven_qubit_lcus() -> BTreeMap<i32, LCUDecomposition> {
        let mut l = BTreeMap::new();
        l.insert(0, LCUDecomposition::new(vec![(0.5, pauli_z())]).unwrap());
        l.insert(1, LCUDecomposition::new(vec![(0.5, pauli_x())]).unwrap());
        l.insert(-1, LCUDecomposition::new(vec![(0.5, pauli_x())]).unwrap());
        l
    }

    #[test]
    fn lcu_single_term_is_trivial() {
        let lcu = LCUDecomposition::new(vec![(1.0, pauli_x())]).unwrap();
        let be = encode_lcu(&lcu).unwrap();
        assert_eq!(be.anc_dim(), 1);
        assert!((be.alpha_enc - 1.0).abs() < 1e-15);
        assert!(max_abs_diff(&be.encoded(), &pauli_x()) < 1e-15);
        be.validate().unwrap();
    }

    #[test]
    fn lcu_half_z_half_x() {
        let lcu = LCUDecomposition::new(vec![(0.5, pauli_z()), (0.5, pauli_x())]).unwrap();
        let be = encode_lcu(&lcu).unwrap();
        assert!(be.residual() < 1e-12);
        be.validate().unwrap();
    }

    #[test]
    fn comparator_is_controlled_flip() {
        let l_half = 2;
        let comp = comparator(l_half);
        assert!(unitarity_residual(&comp) < 1e-15);
        let space = SambeSpace::new(l_half, 1);
        let n = space.slots();
        // (l, l') = (0, 0): b stays 0; (1, 0): flips
        let idx = |l: i64, lp: i64, b: usize| {
            (space.slot_of(l).unwrap() * n + space.slot_of(lp).unwrap()) * 2 + b
        };
        assert_eq!(comp[[idx(0, 0, 0), idx(0, 0, 0)]], C64::new(1.0, 0.0));
        assert_eq!(comp[[idx(1, 0, 1), idx(1, 0, 0)]], C64::new(1.0, 0.0));
        assert_eq!(comp[[idx(1, 0, 0), idx(1, 0, 0)]], C64::new(0.0, 0.0));
    }

    #[test]
    fn comparator_route_equals_direct_sign_core() {
        for l_half in [1usize, 2, 4, 8] {
            let direct = linear_potential_sign_core(l_half);
            let via = linear_potential_sign_via_comparator(l_half);
            assert!(
                max_abs_diff(&direct, &via) < 1e-14,
                "mismatch at L = {l_half}"
            );
        }
    }

    #[test]
    fn linear_potential_encoding_l1() {
        let be = encode_linear_potential(1, 1.0, 1);
        // alpha_enc = L omega = 1; encoded = diag(0, 1)/1
        assert!((be.alpha_enc - 1.0).abs() < 1e-15);
        let enc = be.encoded();
        assert!(enc[[0, 0]].norm() < 1e-14);
        assert!((enc[[1, 1]] - C64::new(1.0, 0.0)).norm() < 1e-14);
        be.validate().unwrap();
        // V_l are diagonal +-1
        let o = be.oracle_dense().unwrap();
        for i in 0..o.nrows() {
            for j in 0..o.ncols() {
                if i == j {
                    assert!((o[[i, j]].norm() - 1.0).abs() < 1e-15);
                    assert!(o[[i, j]].im.abs() < 1e-15);
                } else {
                    assert!(o[[i, j]].norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn linear_potential_matches_builder() {
        for l_half in [1usize, 2, 4] {
            let omega = 0.9;
            let be = encode_linear_potential(l_half, omega, 2);
            let target = build_linear_potential(l_half, omega, 2);
            let expect = target.matrix().mapv(|z| z / be.alpha_enc);
            assert!(max_abs_diff(&be.encoded(), &expect) < 1e-13);
            be.validate().unwrap();
        }
    }

    #[test]
    fn effective_encoding_driven_qubit() {
        let h = driven_qubit();
        for l_half in [2usize, 4] {
            let be = encode_effective(&h, l_half, &driven_qubit_lcus()).unwrap();
            // alpha = 3/2, alpha_enc = alpha + L omega
            assert!((be.alpha_enc - (1.5 + l_half as f64)).abs() < 1e-12);
            let r = be.residual();
            assert!(r < 1e-10, "residual {r:.3e} at L = {l_half}");
            be.validate().unwrap();
        }
    }

    #[test]
    fn effective_encoding_hubbard_composite() {
        // 16-dimensional system with an 11-term mode register; exercises the
        // structured oracle path end to end including alpha_enc >= ||target||
        let model = crate::presets::hubbard2(&crate::presets::HubbardParams::default()).unwrap();
        let be = encode_effective(&model.hamiltonian, 2, &model.lcus).unwrap();
        let alpha: f64 = model.alphas.values().sum();
        assert!((be.alpha_enc - (alpha + 2.0 * model.hamiltonian.omega())).abs() < 1e-10);
        be.validate().unwrap();
    }

    #[test]
    fn effective_encoding_static_hamiltonian() {
        // gamma = 0: only the m = 0 branch and the linear-potential branch
        let mut c = BTreeMap::new();
        c.insert(0, scaled(&pauli_z(), 0.5));
        let h =
            FourierHamiltonian::from_components(1.0, c, DecayProfile::Finite { m_max: 1 }).unwrap();
        let mut lcus = BTreeMap::new();
        lcus.insert(0, LCUDecomposition::new(vec![(0.5, pauli_z())]).unwrap());
        let be = encode_effective(&h, 2, &lcus).unwrap();
        be.validate().unwrap();
    }

    #[test]
    fn effective_encoded_sparse_path_matches_dense_oracle() {
        let h = driven_qubit();
        let be = encode_effective(&h, 2, &driven_qubit_lcus()).unwrap();
        let sparse = be.encoded();
        // same contraction through the densified oracle
        let o = be.oracle_dense().unwrap();
        let (na, ns) = (be.anc_dim(), be.sys_dim());
        let mut dense = CMat::zeros((ns, ns));
        for j in 0..ns {
            let mut joint = crate::linalg::CVec::zeros(na * ns);
            for (ia, g) in be.oracle_state.iter().enumerate() {
                joint[ia * ns + j] = *g;
            }
            let applied = o.dot(&joint);
            for i in 0..ns {
                for ia in 0..na {
                    dense[[i, j]] += be.oracle_state[ia].conj() * applied[ia * ns + i];
                }
            }
        }
        assert!(max_abs_diff(&sparse, &dense) < 1e-13);
    }

    #[test]
    fn effective_encoding_missing_mode_errors() {
        let h = driven_qubit();
        let mut lcus = driven_qubit_lcus();
        lcus.remove(&1);
        assert!(matches!(
            encode_effective(&h, 2, &lcus),
            Err(FqsError::MissingModeEncoding(1))
        ));
    }

    #[test]
    fn g_coef_normalization() {
        let mut alphas = BTreeMap::new();
        alphas.insert(-1, 1.0);
        alphas.insert(0, 2.0);
        alphas.insert(1, 1.0);
        let g = g_coef(&alphas).unwrap();
        assert!((g[0].re - 0.5).abs() < 1e-15);
        assert!((g[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g[2].re - 0.5).abs() < 1e-15);

        let mut single = BTreeMap::new();
        single.insert(3, 0.7);
        let g = g_coef(&single).unwrap();
        assert!((g[0].re - 1.0).abs() < 1e-15);

        let mut zeros = BTreeMap::new();
        zeros.insert(0, 0.0);
        assert!(matches!(g_coef(&zeros), Err(FqsError::AllZero)));
    }

    #[test]
    fn g_coef_gaussian_packet_entries() {
        // coefficient-oracle state over the wave-packet mode weights: the
        // entries follow sqrt(A_m) with A_m the packet envelope coefficients
        let a_m = |m: i32| -> f64 {
            let (p, wt) = (2i32, 1.0f64);
            wt / (2.0 * std::f64::consts::PI).sqrt()
                * (-((p * p + m * m) as f64) * wt * wt / 2.0).exp()
                * ((p * m.abs()) as f64 * wt * wt).sinh()
        };
        let mut alphas = BTreeMap::new();
        for m in -6..=6i32 {
            if m != 0 {
                alphas.insert(m, a_m(m));
            }
        }
        let g = g_coef(&alphas).unwrap();
        assert!((crate::linalg::vec_norm(&g) - 1.0).abs() < 1e-12);
        let total: f64 = alphas.values().sum();
        for (i, (_, &a)) in alphas.iter().enumerate() {
            assert!((g[i].re - (a / total).sqrt()).abs() < 1e-14);
        }
        // the paired (m, j) variant stays normalized too
        let mut pairs = BTreeMap::new();
        pairs.insert(1, vec![0.25, 0.5]);
        pairs.insert(-1, vec![0.25]);
        let (gp, layout) = g_coef_pairs(&pairs).unwrap();
        assert_eq!(layout, vec![(-1, 0), (1, 0), (1, 1)]);
        assert!((crate::linalg::vec_norm(&gp) - 1.0).abs() < 1e-14);
        assert!((gp[0].re - 0.5).abs() < 1e-14);
    }

    #[test]
    fn walk_operator_trivial_phases() {
        // target = alpha I: phases 0; target = 0: phases +-pi/2
        let lcu = LCUDecomposition::new(vec![(1.0, CMat::eye(2))]).unwrap();
        let be = encode_lcu(&lcu).unwrap();
        assert!(walk_eigenphase_residual(&be).unwrap() < 1e-12);

        // 0 = (1/2)(Z) + (1/2)(-Z)
        let lcu =
            LCUDecomposition::new(vec![(0.5, pauli_z()), (0.5, pauli_z().mapv(|z| -z))]).unwrap();
        let be = encode_lcu(&lcu).unwrap();
        assert!(walk_eigenphase_residual(&be).unwrap() < 1e-12);
    }

    #[test]
    fn walk_operator_lcu_qubit() {
        let lcu = LCUDecomposition::new(vec![(0.5, pauli_z()), (0.5, pauli_x())]).unwrap();
        let be = encode_lcu(&lcu).unwrap();
        let r = walk_eigenphase_residual(&be).unwrap();
        assert!(r < 1e-10, "eigenphase residual {r:.3e}");
    }

    #[test]
    fn walk_operator_effective_needs_extension() {
        let h = driven_qubit();
        let be = encode_effective(&h, 2, &driven_qubit_lcus()).unwrap();
        let w = walk_operator(&be).unwrap();
        assert!(w.extended);
        let r = walk_eigenphase_residual(&be).unwrap();
        assert!(r < 1e-8, "eigenphase residual {r:.3e}");
    }

    #[test]
    fn bessel_scan_reference_values() {
        let js = bessel_jn_scan(1.0, 1);
        assert!((js[0] - 0.765_197_686_557_966_6).abs() < 1e-13);
        assert!((js[1] - 0.440_050_585_744_933_5).abs() < 1e-13);
        let js = bessel_jn_scan(5.0, 10);
        assert!((js[5] - 0.261_140_546_120_170_1).abs() < 1e-13);
        assert!((js[10] - 0.001_467_802_647_310_474).abs() < 1e-15);
        let js = bessel_jn_scan(20.0, 20);
        assert!((js[0] - 0.167_024_664_340_583_15).abs() < 1e-12);
        assert!((js[20] - 0.164_747_773_775_326_53).abs() < 1e-12);
    }

    #[test]
    fn query_degree_meets_grid_oracle() {
        for &(tau, eps) in &[(1.0, 1e-6), (5.0, 1e-10), (20.0, 1e-6)] {
            let qd = query_degree(tau, eps).unwrap();
            assert!(qd.tail <= eps);
            let grid_err = chebyshev_truncation_error(tau, qd.q, 1001);
            assert!(
                grid_err <= eps,
                "tau={tau} eps={eps}: grid error {grid_err:.3e} with q={}",
                qd.q
            );
            // sanity envelope: within 4x of the closed form
            assert!((qd.q as f64) <= 4.0 * qd.closed_form + 4.0);
            assert!((qd.q as f64) >= qd.closed_form / 4.0);
        }
    }

    #[test]
    fn query_degree_edge_cases() {
        let qd = query_degree(0.0, 1e-8).unwrap();
        assert!(qd.q <= 1);
        assert!(matches!(
            query_degree(1.0, 0.0),
            Err(FqsError::InvalidEpsilon(_))
        ));
        // tau doubled: q grows roughly linearly
        let q1 = query_degree(10.0, 1e-8).unwrap().q;
        let q2 = query_degree(20.0, 1e-8).unwrap().q;
        assert!(q2 > q1);
        assert!(q2 < 4 * q1);
    }

    #[test]
    fn truncation_error_superexponential_decay() {
        // eps_q decays faster than (tau/q)^q for q >= 2 tau
        let tau = 3.0;
        for q in [6usize, 8, 10, 12] {
            let err = chebyshev_truncation_error(tau, q, 601);
            let envelope = (tau / q as f64).powi(q as i32);
            assert!(
                err < envelope,
                "q={q}: {err:.3e} vs envelope {envelope:.3e}"
            );
        }
    }
}
