//! Hermitian expansion, eigenvalues, empirical spectral distributions, and
//! distribution distances.
//!
//! The `2n x 2n` complex Hermitian image of a quaternion self-dual matrix is
//! built block-by-block from the quaternion embedding, so `H = H*` holds
//! exactly. Eigenvalues are computed values-only: Householder reduction of
//! the Hermitian matrix to a real symmetric tridiagonal form (subdiagonal
//! phases are absorbed by a diagonal unitary, which leaves the spectrum
//! unchanged) followed by the implicit-shift QL iteration.

use crate::ensemble::QSelfDualMatrix;
use crate::linalg::CMatrix;
use crate::stieltjes::SemicircleLaw;
use num_complex::Complex64;
use thiserror::Error;

/// Default relative tolerance for the even-multiplicity pairing check.
/// Paired eigenvalues are exactly degenerate in theory; observed splitting is
/// pure roundoff.
pub const PAIRING_TOL: f64 = 1e-8;

/// QL sweep budget per eigenvalue.
const MAX_QL_ITER: usize = 50;

#[derive(Debug, Error, PartialEq)]
pub enum SpectraError {
    #[error("eigensolver failed to converge for eigenvalue {index} within {budget} sweeps")]
    ConvergenceFailure { index: usize, budget: usize },
    #[error("eigenvalue pairing violated at pair {pair}: gap {gap:.3e} (relative {rel:.3e})")]
    PairingViolation { pair: usize, gap: f64, rel: f64 },
}

/// Dense complex Hermitian image of a quaternion self-dual matrix.
#[derive(Debug, Clone)]
pub struct HermitianExpansion {
    mat: CMatrix,
}

impl HermitianExpansion {
    /// Dimension `2n`.
    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// `H - z I` as a dense matrix.
    pub fn shifted(&self, z: Complex64) -> CMatrix {
        let mut m = self.mat.clone();
        m.shift_diagonal(z);
        m
    }

    /// Max entrywise deviation from `H = H*`; zero by construction.
    pub fn hermitian_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.dim() {
            for j in 0..=i {
                r = r.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }
}

/// Expand a quaternion self-dual matrix into its `2n x 2n` Hermitian image.
pub fn expand_hermitian(m: &QSelfDualMatrix) -> HermitianExpansion {
    let n = m.n();
    let mut h = CMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let block = m.entry(j, k).to_block();
            h[(2 * j, 2 * k)] = block.entries[0];
            h[(2 * j, 2 * k + 1)] = block.entries[1];
            h[(2 * j + 1, 2 * k)] = block.entries[2];
            h[(2 * j + 1, 2 * k + 1)] = block.entries[3];
        }
    }
    HermitianExpansion { mat: h }
}

/// All eigenvalues of the expansion, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSpectrum {
    eigenvalues: Vec<f64>,
    n: usize,
}

impl EmpiricalSpectrum {
    /// Wrap a sorted eigenvalue list of length `2n`.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, n: usize) -> Self {
        assert_eq!(eigenvalues.len(), 2 * n, "expected 2n eigenvalues");
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self { eigenvalues, n }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal
/// form, values-only. Returns `(d, e)` where `e[i]` couples rows `i-1, i`.
fn tridiagonalize(mat: &CMatrix) -> (Vec<f64>, Vec<f64>) {
    let m = mat.rows;
    let mut a: Vec<Complex64> = mat.as_slice().to_vec();
    let idx = |i: usize, j: usize| i * m + j;
    let mut d = vec![0.0; m];
    let mut e = vec![0.0; m];
    if m == 0 {
        return (d, e);
    }
    let mut u = vec![Complex64::new(0.0, 0.0); m];
    let mut p = vec![Complex64::new(0.0, 0.0); m];

    for k in 0..m.saturating_sub(2) {
        let mut norm_sq = 0.0;
        for i in k + 1..m {
            norm_sq += a[idx(i, k)].norm_sqr();
        }
        let sigma = norm_sq.sqrt();
        e[k + 1] = sigma;
        if sigma == 0.0 {
            continue;
        }
        let alpha = a[idx(k + 1, k)];
        let amod = alpha.norm();
        let phase = if amod > 0.0 {
            alpha / amod
        } else {
            Complex64::new(1.0, 0.0)
        };
        // Reflector v = x + phase*sigma*e1, normalized: ||v||^2 = 2 sigma (sigma + |alpha|)
        let vnorm = (2.0 * sigma * (sigma + amod)).sqrt();
        u[k + 1] = (alpha + phase * sigma) / vnorm;
        for i in k + 2..m {
            u[i] = a[idx(i, k)] / vnorm;
        }

        // p = 2 A u on the trailing block, one pass over the lower triangle
        for q in p.iter_mut().take(m).skip(k + 1) {
            *q = Complex64::new(0.0, 0.0);
        }
        for i in k + 1..m {
            let row = &a[idx(i, 0)..idx(i, 0) + m];
            let ui = u[i];
            let mut acc = row[i] * ui;
            for j in k + 1..i {
                acc += row[j] * u[j];
                p[j] += row[j].conj() * ui;
            }
            p[i] += acc;
        }
        for q in p.iter_mut().take(m).skip(k + 1) {
            *q *= 2.0;
        }

        // kappa = u* p is real for Hermitian A; forcing it keeps the update
        // exactly Hermitian under rounding.
        let kappa: f64 = (k + 1..m).map(|i| (u[i].conj() * p[i]).re).sum();
        for i in k + 1..m {
            p[i] -= kappa * u[i]; // now q of the rank-2 update
        }
        for i in k + 1..m {
            let ui = u[i];
            let qi = p[i];
            let row = &mut a[idx(i, 0)..idx(i, 0) + m];
            for j in k + 1..=i {
                row[j] -= ui * p[j].conj() + qi * u[j].conj();
            }
        }
    }
    if m >= 2 {
        e[m - 1] = a[idx(m - 1, m - 2)].norm();
    }
    for i in 0..m {
        d[i] = a[idx(i, i)].re;
    }
    (d, e)
}

/// Implicit-shift QL on a symmetric tridiagonal, values-only.
/// `deflation_tol` is a relative threshold (clamped to machine epsilon).
fn ql_implicit(
    d: &mut [f64],
    e_in: &[f64],
    deflation_tol: f64,
) -> Result<(), SpectraError> {
    let m = d.len();
    if m <= 1 {
        return Ok(());
    }
    // shift to the coupling convention e[i] joins d[i], d[i+1]
    let mut e: Vec<f64> = (0..m).map(|i| if i + 1 < m { e_in[i + 1] } else { 0.0 }).collect();
    let tol = deflation_tol.max(f64::EPSILON);

    for l in 0..m {
        let mut iter = 0;
        loop {
            let mut mi = l;
            while mi < m - 1 {
                let dd = d[mi].abs() + d[mi + 1].abs();
                if e[mi].abs() <= tol * dd + f64::MIN_POSITIVE {
                    break;
                }
                mi += 1;
            }
            if mi == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITER {
                return Err(SpectraError::ConvergenceFailure {
                    index: l,
                    budget: MAX_QL_ITER,
                });
            }
            // Wilkinson-style shift from the leading 2x2
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let denom = g + if g >= 0.0 { r } else { -r };
            g = d[mi] - d[l] + e[l] / denom;
            let (mut s, mut c) = (1.0_f64, 1.0_f64);
            let mut p = 0.0_f64;
            let mut aborted = false;
            for i in (l..mi).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mi] = 0.0;
                    aborted = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if aborted {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mi] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues of a Hermitian expansion, sorted ascending. `tol` controls
/// the QL deflation threshold (relative; clamped to machine epsilon).
pub fn hermitian_eigenvalues(
    h: &HermitianExpansion,
    tol: f64,
) -> Result<EmpiricalSpectrum, SpectraError> {
    let (mut d, e) = tridiagonalize(h.as_matrix());
    ql_implicit(&mut d, &e, tol)?;
    Ok(EmpiricalSpectrum::from_eigenvalues(d, h.dim() / 2))
}

/// Eigenvalues of an arbitrary Hermitian `CMatrix` (test and diagnostics
/// path; the input is assumed Hermitian).
pub fn dense_hermitian_eigenvalues(mat: &CMatrix, tol: f64) -> Result<Vec<f64>, SpectraError> {
    let (mut d, e) = tridiagonalize(mat);
    ql_implicit(&mut d, &e, tol)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Right-continuous step CDF with unit total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCDF {
    /// Sorted distinct jump locations.
    xs: Vec<f64>,
    /// Cumulative values after each jump; last entry is 1.
    cum: Vec<f64>,
}

impl StepCDF {
    /// Build from weighted atoms; weights must sum to 1 (renormalized
    /// defensively against rounding).
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Self {
        assert!(!atoms.is_empty());
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        let mut xs = Vec::with_capacity(atoms.len());
        let mut cum = Vec::with_capacity(atoms.len());
        let mut acc = 0.0;
        for (x, w) in atoms {
            acc += w / total;
            if let Some(last) = xs.last() {
                if *last == x {
                    *cum.last_mut().unwrap() = acc;
                    continue;
                }
            }
            xs.push(x);
            cum.push(acc);
        }
        *cum.last_mut().unwrap() = 1.0;
        Self { xs, cum }
    }

    /// Equal mass at each of the values.
    pub fn from_sorted_values(values: &[f64]) -> Self {
        let w = 1.0 / values.len() as f64;
        Self::from_atoms(values.iter().map(|&x| (x, w)).collect())
    }

    pub fn jumps(&self) -> &[f64] {
        &self.xs
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cum
    }

    /// F(x), right-continuous.
    pub fn eval(&self, x: f64) -> f64 {
        match self.xs.partition_point(|&j| j <= x) {
            0 => 0.0,
            idx => self.cum[idx - 1],
        }
    }

    /// Left limit F(x-).
    pub fn eval_left(&self, x: f64) -> f64 {
        match self.xs.partition_point(|&j| j < x) {
            0 => 0.0,
            idx => self.cum[idx - 1],
        }
    }

    pub fn min_jump(&self) -> f64 {
        self.xs[0]
    }

    pub fn max_jump(&self) -> f64 {
        *self.xs.last().unwrap()
    }
}

/// Step CDF of a spectrum: jumps of `1/(2n)` at each of the `2n` eigenvalues
/// (identical to `1/n` at each paired value).
pub fn esd(spec: &EmpiricalSpectrum) -> StepCDF {
    StepCDF::from_sorted_values(spec.eigenvalues())
}

/// A distribution function argument: empirical step CDF or semicircle CDF.
#[derive(Debug, Clone, Copy)]
pub enum Cdf<'a> {
    Step(&'a StepCDF),
    Semicircle(&'a SemicircleLaw),
}

impl Cdf<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Cdf::Step(f) => f.eval(x),
            Cdf::Semicircle(law) => law.cdf(x),
        }
    }

    pub fn eval_left(&self, x: f64) -> f64 {
        match self {
            Cdf::Step(f) => f.eval_left(x),
            Cdf::Semicircle(law) => law.cdf(x),
        }
    }
}

/// Kolmogorov (sup) distance between two CDFs. Exact for any combination
/// involving a step function: the supremum of a monotone-vs-step difference
/// is attained at jumps, so it is evaluated at every jump from both sides.
pub fn sup_distance(f: Cdf, g: Cdf) -> f64 {
    match (f, g) {
        (Cdf::Step(a), Cdf::Step(b)) => {
            let mut sup: f64 = 0.0;
            for &x in a.jumps().iter().chain(b.jumps().iter()) {
                sup = sup.max((a.eval(x) - b.eval(x)).abs());
                sup = sup.max((a.eval_left(x) - b.eval_left(x)).abs());
            }
            sup
        }
        (Cdf::Step(a), Cdf::Semicircle(law)) | (Cdf::Semicircle(law), Cdf::Step(a)) => {
            let mut sup: f64 = 0.0;
            for (i, &x) in a.jumps().iter().enumerate() {
                let gx = law.cdf(x);
                let after = a.cumulative()[i];
                let before = if i == 0 { 0.0 } else { a.cumulative()[i - 1] };
                sup = sup.max((gx - after).abs()).max((gx - before).abs());
            }
            sup
        }
        (Cdf::Semicircle(a), Cdf::Semicircle(b)) => {
            if a.sigma == b.sigma {
                return 0.0;
            }
            // |F_a - F_b| is even in x and unimodal on [0, 2 max(sigma)]
            let hi = 2.0 * a.sigma.max(b.sigma);
            let h = |x: f64| (a.cdf(x) - b.cdf(x)).abs();
            let (mut lo, mut up) = (0.0, hi);
            for _ in 0..200 {
                let m1 = lo + (up - lo) / 3.0;
                let m2 = up - (up - lo) / 3.0;
                if h(m1) < h(m2) {
                    lo = m1;
                } else {
                    up = m2;
                }
            }
            h(0.5 * (lo + up)).max(h(0.0)).max(h(hi))
        }
    }
}

/// Levy distance: `inf { eps > 0 : G(x-eps)-eps <= F(x) <= G(x+eps)+eps }`,
/// computed by bisection on `eps` to absolute accuracy 1e-9.
pub fn levy_distance(f: &StepCDF, g: Cdf) -> f64 {
    // The band condition for a step F reduces to checks at its jumps: on each
    // constant piece the worst point is an endpoint by monotonicity of G.
    let satisfied = |eps: f64| -> bool {
        for (i, &x) in f.jumps().iter().enumerate() {
            let after = f.cumulative()[i];
            let before = if i == 0 { 0.0 } else { f.cumulative()[i - 1] };
            // F(x) <= G(x+eps)+eps at the left end of the piece [x_i, x_{i+1})
            if after > g.eval(x + eps) + eps + 1e-15 {
                return false;
            }
            // G(x-eps)-eps <= F on the piece ending just before x_i
            if g.eval_left(x - eps) - eps > before + 1e-15 {
                return false;
            }
        }
        true
    };
    // Levy distance never exceeds the sup distance.
    let mut hi = match g {
        Cdf::Step(b) => sup_distance(Cdf::Step(f), Cdf::Step(b)),
        Cdf::Semicircle(law) => sup_distance(Cdf::Step(f), Cdf::Semicircle(law)),
    } + 1e-12;
    if satisfied(0.0) {
        return 0.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if satisfied(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Result of the even-multiplicity pairing check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingReport {
    /// Largest gap between the two eigenvalues of a pair.
    pub max_gap: f64,
    /// Largest relative gap `gap / max(1, |lambda|)`.
    pub max_rel_gap: f64,
    /// Index of the worst pair.
    pub worst_pair: usize,
}

/// Verify that eigenvalues pair up (all multiplicities even). Fails with
/// `PairingViolation` when a pair splits by more than `tol * max(1, |lambda|)`.
pub fn even_multiplicity_check(
    spec: &EmpiricalSpectrum,
    tol: f64,
) -> Result<PairingReport, SpectraError> {
    let ev = spec.eigenvalues();
    let mut report = PairingReport {
        max_gap: 0.0,
        max_rel_gap: 0.0,
        worst_pair: 0,
    };
    for pair in 0..spec.n() {
        let lo = ev[2 * pair];
        let hi = ev[2 * pair + 1];
        let gap = hi - lo;
        let rel = gap / hi.abs().max(1.0);
        if rel > report.max_rel_gap {
            report.max_rel_gap = rel;
            report.max_gap = gap;
            report.worst_pair = pair;
        }
        if rel > tol {
            return Err(SpectraError::PairingViolation {
                pair,
                gap,
                rel,
            });
        }
    }
    Ok(report)
}
