//! Entry laws and sampling for quaternion self-dual Hermitian matrices,
//! plus the truncation/standardization pipeline.
//!
//! A sampled matrix `Y_n` stores the upper-triangle quaternion entries and a
//! real scalar diagonal; the lower triangle is derived through the self-dual
//! constraint `x_jk = conj(x_kj)` and never stored. Off-diagonal laws are
//! normalized to `E||y||^2 = 1`, the diagonal to `E||y||^2 = sigma^2`.
//!
//! The truncation pipeline replaces each entry by its centered, truncated,
//! variance-normalized version: entries are cut at `n^{1/4}`, recentered by
//! the truncated mean (identically zero for the sign-symmetric laws built
//! here) and divided by the truncated standard deviation.

use crate::quadrature::integrate;
use crate::quaternion::Quaternion;
use crate::rng::{entry_stream, mix};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EnsembleError {
    #[error("invalid entry-law spec: {0}")]
    InvalidSpec(String),
    #[error("degenerate truncated variance (sigma_jk = {sigma_jk:.3e} < {guard}) at n = {n}")]
    DegenerateVariance { sigma_jk: f64, guard: f64, n: usize },
    #[error("matrix is already scaled by 1/sqrt(n)")]
    AlreadyScaled,
}

/// Guard threshold for truncated standard deviations. Under a finite sixth
/// moment, `1 - sigma_jk^2 = O(1/n)`, so anything this small signals a spec
/// inconsistent with the moment conditions rather than a valid regime.
pub const VARIANCE_GUARD: f64 = 0.1;

/// Entry distribution family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryLawKind {
    /// Off-diagonal components a,b,c,d i.i.d. centered Gaussian with variance
    /// 1/4 each; real Gaussian diagonal. The canonical symplectic-invariant
    /// choice.
    Gse,
    /// Each component uniform on +-1/2, so every off-diagonal entry has norm
    /// exactly 1; diagonal is a +-sigma coin flip.
    BoundedDiscrete,
    /// Each component an independent symmetrized Pareto with the given tail
    /// index, rescaled so that `E||y||^2 = 1`. Exercises the truncation path
    /// while keeping the sixth moment finite.
    HeavyTail { tail_index: f64 },
    /// All entries identically zero. Admitted only in test mode; violates the
    /// unit-variance condition by construction.
    DegenerateZero,
}

/// Entry-law spec: family plus the diagonal scale `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryLawSpec {
    pub kind: EntryLawKind,
    pub sigma: f64,
}

impl EntryLawSpec {
    pub fn gse(sigma: f64) -> Result<Self, EnsembleError> {
        let spec = Self {
            kind: EntryLawKind::Gse,
            sigma,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn bounded_discrete(sigma: f64) -> Result<Self, EnsembleError> {
        let spec = Self {
            kind: EntryLawKind::BoundedDiscrete,
            sigma,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn heavy_tail(sigma: f64, tail_index: f64) -> Result<Self, EnsembleError> {
        let spec = Self {
            kind: EntryLawKind::HeavyTail { tail_index },
            sigma,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn degenerate_zero() -> Self {
        Self {
            kind: EntryLawKind::DegenerateZero,
            sigma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if !self.sigma.is_finite() || self.sigma < 0.0 {
            return Err(EnsembleError::InvalidSpec(format!(
                "sigma must be finite and >= 0, got {}",
                self.sigma
            )));
        }
        if let EntryLawKind::HeavyTail { tail_index } = self.kind {
            // tail index <= 6 breaks the finite-sixth-moment condition
            if !(tail_index > 6.0) {
                return Err(EnsembleError::InvalidSpec(format!(
                    "heavy-tail index must exceed 6 for a finite sixth moment, got {tail_index}"
                )));
            }
        }
        Ok(())
    }

    pub fn tag(&self) -> String {
        match self.kind {
            EntryLawKind::Gse => "gse".to_string(),
            EntryLawKind::BoundedDiscrete => "bounded-discrete".to_string(),
            EntryLawKind::HeavyTail { .. } => "heavy-tail".to_string(),
            EntryLawKind::DegenerateZero => "degenerate".to_string(),
        }
    }

    /// Component scale for the heavy-tail law: `s^2 * E P^2 = 1/4`.
    fn pareto_component_scale(tail_index: f64) -> f64 {
        ((tail_index - 2.0) / (4.0 * tail_index)).sqrt()
    }

    /// Scalar scale for the heavy-tail diagonal: `s_d^2 * E P^2 = 1`.
    fn pareto_diag_scale(tail_index: f64) -> f64 {
        ((tail_index - 2.0) / tail_index).sqrt()
    }

    fn sample_offdiag(&self, rng: &mut impl Rng) -> Quaternion {
        match self.kind {
            EntryLawKind::Gse => {
                let mut comp = [0.0; 4];
                for c in comp.iter_mut() {
                    let z: f64 = StandardNormal.sample(rng);
                    *c = 0.5 * z;
                }
                Quaternion::new(comp[0], comp[1], comp[2], comp[3])
            }
            EntryLawKind::BoundedDiscrete => {
                let mut comp = [0.0; 4];
                for c in comp.iter_mut() {
                    *c = if rng.gen::<bool>() { 0.5 } else { -0.5 };
                }
                Quaternion::new(comp[0], comp[1], comp[2], comp[3])
            }
            EntryLawKind::HeavyTail { tail_index } => {
                let s = Self::pareto_component_scale(tail_index);
                let mut comp = [0.0; 4];
                for c in comp.iter_mut() {
                    *c = s * sym_pareto(tail_index, rng);
                }
                Quaternion::new(comp[0], comp[1], comp[2], comp[3])
            }
            EntryLawKind::DegenerateZero => Quaternion::ZERO,
        }
    }

    fn sample_diag(&self, rng: &mut impl Rng) -> f64 {
        if self.sigma == 0.0 {
            // keep the stream advancing uniformly regardless of sigma
            let _ = rng.gen::<u64>();
            return 0.0;
        }
        match self.kind {
            EntryLawKind::Gse => {
                let z: f64 = StandardNormal.sample(rng);
                self.sigma * z
            }
            EntryLawKind::BoundedDiscrete => {
                if rng.gen::<bool>() {
                    self.sigma
                } else {
                    -self.sigma
                }
            }
            EntryLawKind::HeavyTail { tail_index } => {
                let s = Self::pareto_diag_scale(tail_index);
                self.sigma * s * sym_pareto(tail_index, rng)
            }
            EntryLawKind::DegenerateZero => 0.0,
        }
    }

    /// Population sixth moment `E||y||^6` of the off-diagonal law.
    pub fn offdiag_sixth_moment(&self) -> f64 {
        match self.kind {
            EntryLawKind::Gse => 3.0, // ||y||^2 ~ chi^2_4 / 4
            EntryLawKind::BoundedDiscrete => 1.0,
            EntryLawKind::HeavyTail { tail_index } => {
                // E (sum of 4 iid W_i)^3 with W = s^2 P^2
                let a = tail_index;
                let m1 = a / (a - 2.0);
                let m2 = a / (a - 4.0);
                let m3 = a / (a - 6.0);
                let s2 = (a - 2.0) / (4.0 * a);
                s2.powi(3) * (4.0 * m3 + 36.0 * m2 * m1 + 24.0 * m1.powi(3))
            }
            EntryLawKind::DegenerateZero => 0.0,
        }
    }
}

/// Symmetrized Pareto draw: random sign times `(1-U)^{-1/alpha} >= 1`.
fn sym_pareto(alpha: f64, rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen();
    let magnitude = (1.0 - u).powf(-1.0 / alpha);
    if rng.gen::<bool>() {
        magnitude
    } else {
        -magnitude
    }
}

/// An `n x n` quaternion self-dual Hermitian matrix. Only the diagonal and
/// the strict upper triangle are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct QSelfDualMatrix {
    n: usize,
    diag: Vec<f64>,
    upper: Vec<Quaternion>,
    scaled: bool,
}

impl QSelfDualMatrix {
    pub fn from_parts(n: usize, diag: Vec<f64>, upper: Vec<Quaternion>, scaled: bool) -> Self {
        assert_eq!(diag.len(), n);
        assert_eq!(upper.len(), n * (n - 1) / 2);
        Self {
            n,
            diag,
            upper,
            scaled,
        }
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            diag: vec![0.0; n],
            upper: vec![Quaternion::ZERO; n * (n - 1) / 2],
            scaled: false,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    fn upper_index(&self, j: usize, k: usize) -> usize {
        debug_assert!(j < k && k < self.n);
        j * (2 * self.n - j - 1) / 2 + (k - j - 1)
    }

    /// Entry `(j, k)`; the lower triangle is the quaternion conjugate of the
    /// mirrored entry.
    pub fn entry(&self, j: usize, k: usize) -> Quaternion {
        use std::cmp::Ordering;
        match j.cmp(&k) {
            Ordering::Equal => Quaternion::scalar(self.diag[j]),
            Ordering::Less => self.upper[self.upper_index(j, k)],
            Ordering::Greater => self.upper[self.upper_index(k, j)].conj(),
        }
    }

    pub fn set_upper(&mut self, j: usize, k: usize, q: Quaternion) {
        let idx = self.upper_index(j, k);
        self.upper[idx] = q;
    }

    pub fn set_diag(&mut self, j: usize, t: f64) {
        self.diag[j] = t;
    }

    pub fn upper_entries(&self) -> &[Quaternion] {
        &self.upper
    }
}

/// Draw the unscaled matrix `Y_n`. The output is a deterministic function of
/// `(spec, n, seed)`: each entry gets its own counter-derived RNG stream, so
/// results do not depend on traversal order.
pub fn sample_matrix(
    spec: &EntryLawSpec,
    n: usize,
    seed: u64,
) -> Result<QSelfDualMatrix, EnsembleError> {
    spec.validate()?;
    if n == 0 {
        return Err(EnsembleError::InvalidSpec("n must be >= 1".into()));
    }
    let mut m = QSelfDualMatrix::zero(n);
    for j in 0..n {
        let mut rng = entry_stream(seed, j, j);
        m.diag[j] = spec.sample_diag(&mut rng);
        for k in j + 1..n {
            let mut rng = entry_stream(seed, j, k);
            let q = spec.sample_offdiag(&mut rng);
            m.set_upper(j, k, q);
        }
    }
    Ok(m)
}

/// Multiply all entries by `n^{-1/2}` and set the scale flag.
pub fn scaled_matrix(y: &QSelfDualMatrix) -> Result<QSelfDualMatrix, EnsembleError> {
    if y.scaled {
        return Err(EnsembleError::AlreadyScaled);
    }
    let s = 1.0 / (y.n as f64).sqrt();
    Ok(QSelfDualMatrix {
        n: y.n,
        diag: y.diag.iter().map(|t| t * s).collect(),
        upper: y.upper.iter().map(|q| q.scale(s)).collect(),
        scaled: true,
    })
}

/// What the truncation step did, and the population quantities it used.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    /// Number of entries with `||y_jk|| > n^{1/4}` over `j <= k`.
    pub count_truncated: usize,
    /// Strictly upper-triangle truncation count (j < k).
    pub count_offdiag: usize,
    /// Diagonal truncation count.
    pub count_diag: usize,
    /// Truncated standard deviation used for off-diagonal entries.
    pub sigma_offdiag: f64,
    /// Truncated standard deviation used for diagonal entries.
    pub sigma_diag: f64,
    /// The truncation threshold `n^{1/4}`.
    pub threshold: f64,
    /// True when any sigma fell below the guard (reported before erroring in
    /// permissive contexts).
    pub guard_triggered: bool,
}

/// Truncated second moments `E ||y||^2 I(||y|| <= t)` for the off-diagonal
/// and diagonal laws. The truncated means vanish exactly by component sign
/// symmetry of every law built here.
fn truncated_moments(spec: &EntryLawSpec, n: usize) -> (f64, f64) {
    let t = (n as f64).powf(0.25);
    let off = match spec.kind {
        EntryLawKind::Gse => {
            // radial density of ||y||: 8 r^3 exp(-2 r^2)
            integrate(|r| 8.0 * r.powi(5) * (-2.0 * r * r).exp(), 0.0, t, 1e-13).min(1.0)
        }
        EntryLawKind::BoundedDiscrete => {
            if 1.0 <= t {
                1.0
            } else {
                0.0
            }
        }
        EntryLawKind::HeavyTail { tail_index } => heavy_tail_truncated_moment(tail_index, n),
        EntryLawKind::DegenerateZero => 0.0,
    };
    let diag = if spec.sigma == 0.0 {
        0.0
    } else {
        match spec.kind {
            EntryLawKind::Gse => {
                let s = spec.sigma;
                let density = move |r: f64| {
                    2.0 * (-(r * r) / (2.0 * s * s)).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
                };
                integrate(|r| r * r * density(r), 0.0, t, 1e-13).min(s * s)
            }
            EntryLawKind::BoundedDiscrete => {
                if spec.sigma <= t {
                    spec.sigma * spec.sigma
                } else {
                    0.0
                }
            }
            EntryLawKind::HeavyTail { tail_index } => {
                // |y| = sigma * s_d * P with Pareto density alpha x^{-alpha-1}
                let scale = spec.sigma * EntryLawSpec::pareto_diag_scale(tail_index);
                if t <= scale {
                    0.0
                } else {
                    let a = tail_index;
                    integrate(
                        |r| r * r * (a / scale) * (r / scale).powf(-a - 1.0),
                        scale,
                        t,
                        1e-13,
                    )
                }
            }
            EntryLawKind::DegenerateZero => 0.0,
        }
    };
    (off, diag)
}

/// Deterministic Monte Carlo estimate of the off-diagonal truncated second
/// moment for the component-wise heavy-tail law (the norm of four independent
/// Pareto components has no one-dimensional radial density). Estimates the
/// small truncated-away mass `E ||y||^2 I(||y|| > t)` directly, which keeps
/// the absolute error of the result near 1e-5; cached per (tail index, n).
fn heavy_tail_truncated_moment(tail_index: f64, n: usize) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), f64>>> = OnceLock::new();
    let key = (tail_index.to_bits(), n);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return *v;
    }

    let t2 = (n as f64).sqrt(); // threshold squared
    let s2 = (tail_index - 2.0) / (4.0 * tail_index);
    let samples: u64 = 1 << 24;
    let mut rng = entry_stream(mix(0x7275_6e63, tail_index.to_bits(), n as u64, 0), 0, 0);
    let mut tail_mass = 0.0;
    for _ in 0..samples {
        let mut norm_sq = 0.0;
        for _ in 0..4 {
            let u: f64 = rng.gen();
            let p = (1.0 - u).powf(-1.0 / tail_index);
            norm_sq += s2 * p * p;
        }
        if norm_sq > t2 {
            tail_mass += norm_sq;
        }
    }
    let value = (1.0 - tail_mass / samples as f64).max(0.0);
    cache.lock().unwrap().insert(key, value);
    value
}

/// Truncate entries at `threshold` without recentering or rescaling.
/// Returns the truncated matrix and the (offdiag-pairs, diag) counts over
/// `j < k` and `j` respectively.
pub fn truncated_matrix(y: &QSelfDualMatrix, threshold: f64) -> (QSelfDualMatrix, usize, usize) {
    let mut out = y.clone();
    let mut count_off = 0;
    let mut count_diag = 0;
    for j in 0..y.n {
        if y.diag[j].abs() > threshold {
            out.diag[j] = 0.0;
            count_diag += 1;
        }
        for k in j + 1..y.n {
            let q = y.entry(j, k);
            if q.norm() > threshold {
                out.set_upper(j, k, Quaternion::ZERO);
                count_off += 1;
            }
        }
    }
    (out, count_off, count_diag)
}

/// The truncation/standardization pipeline. Takes the unscaled `Y_n` and
/// produces the unscaled standardized matrix (the caller divides by
/// `sqrt(n)`): off-diagonal entries become `(y I(||y|| <= t) - m_t)/sigma_jk`
/// and diagonal ones `sigma * (y I - m_t)/sigma_jj`, where `m_t` is the
/// truncated mean (zero for all laws here) and `sigma_jk` the truncated
/// standard deviation.
pub fn truncate_standardize(
    spec: &EntryLawSpec,
    y: &QSelfDualMatrix,
) -> Result<(QSelfDualMatrix, TruncationReport), EnsembleError> {
    spec.validate()?;
    if y.scaled {
        return Err(EnsembleError::AlreadyScaled);
    }
    let n = y.n;
    let threshold = (n as f64).powf(0.25);
    let (var_off, var_diag) = truncated_moments(spec, n);
    let sigma_offdiag = var_off.sqrt();
    let sigma_diag = var_diag.sqrt();

    let guard_triggered =
        sigma_offdiag < VARIANCE_GUARD || (spec.sigma > 0.0 && sigma_diag < VARIANCE_GUARD);
    if sigma_offdiag < VARIANCE_GUARD {
        return Err(EnsembleError::DegenerateVariance {
            sigma_jk: sigma_offdiag,
            guard: VARIANCE_GUARD,
            n,
        });
    }
    if spec.sigma > 0.0 && sigma_diag < VARIANCE_GUARD {
        return Err(EnsembleError::DegenerateVariance {
            sigma_jk: sigma_diag,
            guard: VARIANCE_GUARD,
            n,
        });
    }

    let mut out = y.clone();
    let mut count_off = 0;
    let mut count_diag = 0;
    for j in 0..n {
        let v = y.diag[j];
        let truncated = if v.abs() > threshold {
            count_diag += 1;
            0.0
        } else {
            v
        };
        out.diag[j] = if spec.sigma > 0.0 {
            spec.sigma * truncated / sigma_diag
        } else {
            0.0
        };
        for k in j + 1..n {
            let q = y.entry(j, k);
            let truncated = if q.norm() > threshold {
                count_off += 1;
                Quaternion::ZERO
            } else {
                q
            };
            out.set_upper(j, k, truncated.scale(1.0 / sigma_offdiag));
        }
    }
    let report = TruncationReport {
        count_truncated: count_off + count_diag,
        count_offdiag: count_off,
        count_diag,
        sigma_offdiag,
        sigma_diag,
        threshold,
        guard_triggered,
    };
    Ok((out, report))
}
