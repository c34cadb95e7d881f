//! The truncated Floquet-Hilbert space.
//!
//! Fourier labels live on the index set D^L = {-L+1, ..., L} (2L slots); the
//! joint space is C^(2L) (x) C^d. Array slot i holds label l = i - L + 1.
//! The cyclic shift used by the periodic-boundary refinement is
//! l (+) m = ((l + m + L - 1) mod 2L) - L + 1, so D^L is closed under it.

use std::f64::consts::E;
use std::sync::OnceLock;

use ndarray::Array1;

use crate::error::{FqsError, FqsResult};
use crate::hamiltonian::FourierHamiltonian;
use crate::linalg::{eigh, hermiticity_residual, CMat, EigH, C64};

/// Which pipeline a truncation order was selected for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Regime {
    Adiabatic,
    LongTime,
}

/// A selected Fourier-index cutoff.
#[derive(Debug, Clone, Copy)]
pub struct TruncationOrder {
    pub l_max: usize,
    pub regime: Regime,
    pub epsilon_target: f64,
}

/// Truncation order for a finitely-supported profile.
///
/// l_max = m_max + ceil(e^2 m_max gt + 4 m_max ln(10 m_max/eps)
///                      / ln(e + ln(10 m_max/eps)/(e gt))),
///
/// which makes 10 m_max (e m_max gt / (l_max - m_max))^((l_max-m_max)/m_max)
/// <= eps. Logarithms are natural throughout. gt = 0 degenerates to
/// l_max = m_max + 1 (one hop of margin around the l = 0 column).
pub fn choose_l_max(gamma: f64, t: f64, m_max: usize, epsilon: f64) -> FqsResult<TruncationOrder> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(FqsError::InvalidEpsilon(epsilon));
    }
    if m_max == 0 {
        return Err(FqsError::Validation("m_max must be >= 1".into()));
    }
    let gt = gamma * t;
    if gt < 0.0 || !gt.is_finite() {
        return Err(FqsError::Validation(format!(
            "gamma*t must be >= 0, got {gt}"
        )));
    }
    let m = m_max as f64;
    let l_max = if gt == 0.0 {
        m_max + 1
    } else {
        let big_l = (10.0 * m / epsilon).ln();
        let denom = (E + big_l / (E * gt)).ln();
        let raw = E * E * m * gt + 4.0 * m * big_l / denom;
        m_max + (raw.ceil() as usize).max(1)
    };
    Ok(TruncationOrder {
        l_max,
        regime: Regime::Adiabatic,
        epsilon_target: epsilon,
    })
}

/// Exponential-decay constants beta = (1 - e^(-1/zeta))^(-1) and
/// zeta' = (1/zeta - 1 + e^(-1/zeta))^(-1).
pub fn exp_decay_constants(zeta: f64) -> (f64, f64) {
    let beta = 1.0 / (1.0 - (-1.0 / zeta).exp());
    let zeta_prime = 1.0 / (1.0 / zeta - 1.0 + (-1.0 / zeta).exp());
    (beta, zeta_prime)
}

/// Truncation order for exponentially-decaying Fourier components:
/// l_max = ceil(2 beta zeta' h t + zeta' ln(1/eps) + zeta' ln(4 zeta') + 2 zeta'/beta + 1).
pub fn choose_l_max_exp(h: f64, zeta: f64, t: f64, epsilon: f64) -> FqsResult<TruncationOrder> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(FqsError::InvalidEpsilon(epsilon));
    }
    if !(h > 0.0 && zeta > 0.0) {
        return Err(FqsError::Validation("h and zeta must be positive".into()));
    }
    let (beta, zp) = exp_decay_constants(zeta);
    let raw = 2.0 * beta * zp * h * t
        + zp * (1.0 / epsilon).ln()
        + zp * (4.0 * zp).ln()
        + 2.0 * zp / beta
        + 1.0;
    Ok(TruncationOrder {
        l_max: (raw.ceil() as usize).max(1),
        regime: Regime::Adiabatic,
        epsilon_target: epsilon,
    })
}

/// The truncated Floquet-Hilbert space `C^(2L) (x) C^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SambeSpace {
    half_width: usize,
    dim_sys: usize,
}

impl SambeSpace {
    pub fn new(half_width: usize, dim_sys: usize) -> Self {
        assert!(half_width >= 1 && dim_sys >= 1);
        Self {
            half_width,
            dim_sys,
        }
    }

    /// Half-width L; the index set is D^L = {-L+1, ..., L}.
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn dim_sys(&self) -> usize {
        self.dim_sys
    }

    /// Number of Fourier slots, 2L.
    pub fn slots(&self) -> usize {
        2 * self.half_width
    }

    pub fn dim_total(&self) -> usize {
        self.slots() * self.dim_sys
    }

    /// Array slot of label l, or None when l is outside D^L.
    pub fn slot_of(&self, l: i64) -> Option<usize> {
        let lw = self.half_width as i64;
        if (-lw + 1..=lw).contains(&l) {
            Some((l + lw - 1) as usize)
        } else {
            None
        }
    }

    /// Fourier label stored at array slot i.
    pub fn l_of(&self, slot: usize) -> i64 {
        slot as i64 - self.half_width as i64 + 1
    }

    /// Cyclic shift l (+) m keeping D^L closed.
    pub fn wrap_add(&self, l: i64, m: i64) -> i64 {
        let lw = self.half_width as i64;
        (l + m + lw - 1).rem_euclid(2 * lw) - lw + 1
    }

    /// All labels in D^L, ascending.
    pub fn labels(&self) -> impl Iterator<Item = i64> {
        let lw = self.half_width as i64;
        (-lw + 1)..=lw
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Effective,
    LinearPotential,
    EffectivePbc,
}

/// A dense Hermitian operator on the truncated Floquet-Hilbert space, with a
/// lazily populated eigendecomposition (single writer, concurrent readers).
#[derive(Debug)]
pub struct SambeOperator {
    space: SambeSpace,
    kind: OperatorKind,
    matrix: CMat,
    eig: OnceLock<EigH>,
}

impl Clone for SambeOperator {
    fn clone(&self) -> Self {
        Self {
            space: self.space,
            kind: self.kind,
            matrix: self.matrix.clone(),
            eig: OnceLock::new(),
        }
    }
}

impl SambeOperator {
    fn new(space: SambeSpace, kind: OperatorKind, matrix: CMat) -> Self {
        debug_assert!(hermiticity_residual(&matrix) < 1e-12);
        Self {
            space,
            kind,
            matrix,
            eig: OnceLock::new(),
        }
    }

    pub fn space(&self) -> &SambeSpace {
        &self.space
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// The d x d block `<l| op |l_src>`.
    pub fn block(&self, l: i64, l_src: i64) -> FqsResult<CMat> {
        let d = self.space.dim_sys();
        let i = self.space.slot_of(l).ok_or(FqsError::IndexOutOfRange {
            l,
            l_max: self.space.half_width(),
        })?;
        let j = self.space.slot_of(l_src).ok_or(FqsError::IndexOutOfRange {
            l: l_src,
            l_max: self.space.half_width(),
        })?;
        let mut out = CMat::zeros((d, d));
        for a in 0..d {
            for b in 0..d {
                out[[a, b]] = self.matrix[[i * d + a, j * d + b]];
            }
        }
        Ok(out)
    }

    /// Cached Hermitian eigendecomposition.
    pub fn eig(&self) -> &EigH {
        self.eig
            .get_or_init(|| eigh(&self.matrix).expect("Sambe operator eigensolve"))
    }

    pub fn hermiticity_residual(&self) -> f64 {
        hermiticity_residual(&self.matrix)
    }
}

/// The truncated effective Hamiltonian: diagonal blocks `H_0 - l omega` and
/// hopping blocks `<l| . |l+m> = H_{-m}` for stored modes, no wrap-around.
pub fn build_effective(h: &FourierHamiltonian, l_half: usize) -> SambeOperator {
    assert!(l_half >= 1);
    let space = SambeSpace::new(l_half, h.dim());
    let d = h.dim();
    let mut mat = CMat::zeros((space.dim_total(), space.dim_total()));
    for l in space.labels() {
        let row = space.slot_of(l).unwrap();
        for m in h.modes() {
            let l_col = l + m as i64;
            let Some(col) = space.slot_of(l_col) else {
                continue;
            };
            let hm = h.component(-m).unwrap();
            for a in 0..d {
                for b in 0..d {
                    mat[[row * d + a, col * d + b]] += hm[[a, b]];
                }
            }
        }
        // diagonal shift -l omega
        let shift = C64::new(-(l as f64) * h.omega(), 0.0);
        for a in 0..d {
            mat[[row * d + a, row * d + a]] += shift;
        }
    }
    SambeOperator::new(space, OperatorKind::Effective, mat)
}

/// The linear-potential Hamiltonian `sum_l l omega |l><l| (x) I_d`.
pub fn build_linear_potential(l_half: usize, omega: f64, dim_sys: usize) -> SambeOperator {
    assert!(l_half >= 1);
    let space = SambeSpace::new(l_half, dim_sys);
    let mut mat = CMat::zeros((space.dim_total(), space.dim_total()));
    for l in space.labels() {
        let slot = space.slot_of(l).unwrap();
        let val = C64::new(l as f64 * omega, 0.0);
        for a in 0..dim_sys {
            mat[[slot * dim_sys + a, slot * dim_sys + a]] = val;
        }
    }
    SambeOperator::new(space, OperatorKind::LinearPotential, mat)
}

/// The refined effective Hamiltonian with periodic wrap-around hoppings:
/// `sum_m Add_m (x) H_m - H_LP`, where `Add_m |l> = |l (+) m>`.
pub fn build_effective_pbc(h: &FourierHamiltonian, l_half: usize) -> FqsResult<SambeOperator> {
    let hop = h.hop_range();
    let required = hop + 1;
    if l_half < required {
        return Err(FqsError::LTooSmall {
            l: l_half,
            required,
        });
    }
    let space = SambeSpace::new(l_half, h.dim());
    let d = h.dim();
    let mut mat = CMat::zeros((space.dim_total(), space.dim_total()));
    for l in space.labels() {
        let col = space.slot_of(l).unwrap();
        for m in h.modes() {
            let hm = h.component(m).unwrap();
            let row = space.slot_of(space.wrap_add(l, m as i64)).unwrap();
            for a in 0..d {
                for b in 0..d {
                    mat[[row * d + a, col * d + b]] += hm[[a, b]];
                }
            }
        }
        let shift = C64::new(-(l as f64) * h.omega(), 0.0);
        for a in 0..d {
            mat[[col * d + a, col * d + a]] += shift;
        }
    }
    Ok(SambeOperator::new(space, OperatorKind::EffectivePbc, mat))
}

/// The cyclic adder `Add_m |l> = |l (+) m>` as a 2L x 2L permutation matrix.
pub fn adder(m: i64, l_half: usize) -> CMat {
    let space = SambeSpace::new(l_half, 1);
    let n = space.slots();
    let mut mat = CMat::zeros((n, n));
    for l in space.labels() {
        let col = space.slot_of(l).unwrap();
        let row = space.slot_of(space.wrap_add(l, m)).unwrap();
        mat[[row, col]] = C64::new(1.0, 0.0);
    }
    mat
}

/// Eigenvalues of an effective operator folded into the first Floquet zone
/// `[-omega/2, omega/2)`, with degeneracy weights (tolerance 1e-9).
pub fn quasienergies(op: &SambeOperator, omega: f64) -> Vec<(f64, usize)> {
    let eig = op.eig();
    let mut folded: Vec<f64> = eig
        .values
        .iter()
        .map(|&e| fold_quasienergy(e, omega))
        .collect();
    folded.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<(f64, usize)> = Vec::new();
    for q in folded {
        match out.last_mut() {
            Some((prev, w)) if (q - *prev).abs() < 1e-9 => *w += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

/// Fold an energy into `[-omega/2, omega/2)`.
pub fn fold_quasienergy(e: f64, omega: f64) -> f64 {
    let mut f = e - omega * (e / omega).round();
    if f >= omega / 2.0 {
        f -= omega;
    }
    if f < -omega / 2.0 {
        f += omega;
    }
    f
}

/// Spectrum helper for tests: eigenvalues of the underlying matrix.
pub fn spectrum(op: &SambeOperator) -> Array1<f64> {
    op.eig().values.clone()
}
