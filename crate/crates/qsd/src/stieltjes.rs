//! The semicircular law in closed form, Stieltjes transforms, the Bai
//! Kolmogorov-distance bound, and the delta diagnostic.
//!
//! Transform conventions: `s_G(z) = integral dG(y)/(y - z)` for `z = u + iv`
//! in the upper half-plane, so `Im s > 0` throughout. The square root in the
//! semicircle transform takes the branch with `Im sqrt(z^2-4) > 0` for
//! `Im z > 0`, which makes `s(z) -> 0` at infinity and pins `Im s > 0`.

use crate::spectra::{EmpiricalSpectrum, StepCDF};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StieltjesError {
    #[error("invalid bound parameters: {0}")]
    InvalidParams(String),
    #[error("transform grid too coarse: spacing {spacing:.3e} > v/10 = {required:.3e}")]
    GridTooCoarse { spacing: f64, required: f64 },
    #[error("transform grid does not cover [-{limit:.3}, {limit:.3}]")]
    GridTooShort { limit: f64 },
    #[error("delta root-finding did not reach residual {target:.1e} in {iters} iterations")]
    NoConvergence { target: f64, iters: usize },
}

/// A point `z = u + iv` in the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPoint {
    u: f64,
    v: f64,
}

impl ComplexPoint {
    /// Panics unless `v > 0`.
    pub fn new(u: f64, v: f64) -> Self {
        assert!(v > 0.0, "ComplexPoint requires Im z > 0, got v = {v}");
        Self { u, v }
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }
}

/// Semicircular law with scale `sigma`: density
/// `sqrt(4 sigma^2 - x^2) / (2 pi sigma^2)` supported on `[-2 sigma, 2 sigma]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemicircleLaw {
    pub sigma: f64,
}

impl SemicircleLaw {
    pub fn new(sigma: f64) -> Self {
        assert!(sigma > 0.0, "semicircle scale must be positive");
        Self { sigma }
    }

    pub fn support(&self) -> (f64, f64) {
        (-2.0 * self.sigma, 2.0 * self.sigma)
    }

    pub fn density(&self, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let r = 4.0 * s2 - x * x;
        if r <= 0.0 {
            0.0
        } else {
            r.sqrt() / (2.0 * PI * s2)
        }
    }

    /// Closed-form CDF.
    pub fn cdf(&self, x: f64) -> f64 {
        let edge = 2.0 * self.sigma;
        if x <= -edge {
            return 0.0;
        }
        if x >= edge {
            return 1.0;
        }
        let s2 = self.sigma * self.sigma;
        0.5 + x * (4.0 * s2 - x * x).sqrt() / (4.0 * PI * s2) + (x / edge).asin() / PI
    }

    /// Exact antiderivative of the CDF with `Phi(-2 sigma) = 0`; linear of
    /// slope one above the support.
    pub fn cdf_antiderivative(&self, x: f64) -> f64 {
        let edge = 2.0 * self.sigma;
        if x <= -edge {
            return 0.0;
        }
        if x >= edge {
            return edge + (x - edge);
        }
        let s2 = self.sigma * self.sigma;
        x * self.cdf(x) + (4.0 * s2 - x * x).powf(1.5) / (6.0 * PI * s2)
    }

    /// Inverse CDF by bisection.
    pub fn quantile(&self, p: f64) -> f64 {
        assert!((0.0..=1.0).contains(&p));
        let (mut lo, mut hi) = self.support();
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Stieltjes transform; for scale sigma this is `s(z/sigma)/sigma` in
    /// terms of the unit-scale transform.
    pub fn stieltjes(&self, z: ComplexPoint) -> Complex64 {
        let zz = z.as_complex() / self.sigma;
        unit_semicircle_stieltjes(zz) / self.sigma
    }
}

fn upper_branch_sqrt(w: Complex64, im_sign: f64) -> Complex64 {
    let r = w.sqrt();
    if r.im * im_sign < 0.0 {
        -r
    } else {
        r
    }
}

fn unit_semicircle_stieltjes(z: Complex64) -> Complex64 {
    let root = upper_branch_sqrt(z * z - 4.0, z.im);
    0.5 * (root - z)
}

/// Stieltjes transform of the unit-scale semicircular law,
/// `s(z) = -(z - sqrt(z^2 - 4))/2` with `Im s > 0`.
pub fn semicircle_stieltjes(z: ComplexPoint) -> Complex64 {
    unit_semicircle_stieltjes(z.as_complex())
}

/// Empirical Stieltjes transform `(2n)^{-1} sum 1/(lambda_i - z)`.
pub fn empirical_stieltjes(spec: &EmpiricalSpectrum, z: ComplexPoint) -> Complex64 {
    let zc = z.as_complex();
    let sum: Complex64 = spec
        .eigenvalues()
        .iter()
        .map(|&l| (Complex64::new(l, 0.0) - zc).inv())
        .sum();
    sum / spec.eigenvalues().len() as f64
}

/// Parameter bundle `(A, B, a, v)` with the derived constants `gamma` and
/// `kappa` for the Kolmogorov-distance bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaiBoundParams {
    pub a: f64,
    pub big_a: f64,
    pub big_b: f64,
    pub v: f64,
    pub gamma: f64,
    pub kappa: f64,
}

impl BaiBoundParams {
    pub fn new(a: f64, big_a: f64, big_b: f64, v: f64) -> Result<Self, StieltjesError> {
        let gamma = 2.0 / PI * a.atan();
        if !(gamma > 0.5) {
            return Err(StieltjesError::InvalidParams(format!(
                "gamma = (2/pi) atan(a) = {gamma:.4} must exceed 1/2 (requires a > 1)"
            )));
        }
        if !(big_a > big_b && big_b > 0.0) {
            return Err(StieltjesError::InvalidParams(format!(
                "need A > B > 0, got A = {big_a}, B = {big_b}"
            )));
        }
        if !(v > 0.0) {
            return Err(StieltjesError::InvalidParams(format!("v must be > 0, got {v}")));
        }
        let kappa = 4.0 * big_b / (PI * (big_a - big_b) * (2.0 * gamma - 1.0));
        if !(kappa < 1.0) {
            return Err(StieltjesError::InvalidParams(format!(
                "kappa = {kappa:.4} must be < 1"
            )));
        }
        Ok(Self {
            a,
            big_a,
            big_b,
            v,
            gamma,
            kappa,
        })
    }

    /// The defaults used by the experiment sweeps: a = 2, A = 20, B = 3.
    pub fn defaults(v: f64) -> Result<Self, StieltjesError> {
        Self::new(2.0, 20.0, 3.0, v)
    }
}

/// Samples of a Stieltjes transform on a uniform grid `u_i + iv`.
#[derive(Debug, Clone)]
pub struct TransformGrid {
    pub u0: f64,
    pub du: f64,
    pub v: f64,
    pub values: Vec<Complex64>,
}

impl TransformGrid {
    pub fn u_end(&self) -> f64 {
        self.u0 + self.du * (self.values.len() - 1) as f64
    }
}

/// Sample the empirical transform of `spec` on a grid spanning
/// `[-limit, limit]` with spacing at most `max_spacing`.
pub fn sample_empirical_transform(
    spec: &EmpiricalSpectrum,
    v: f64,
    limit: f64,
    max_spacing: f64,
) -> TransformGrid {
    assert!(v > 0.0 && limit > 0.0 && max_spacing > 0.0);
    let steps = (2.0 * limit / max_spacing).ceil() as usize;
    let du = 2.0 * limit / steps as f64;
    let values = (0..=steps)
        .map(|i| {
            let u = -limit + du * i as f64;
            empirical_stieltjes(spec, ComplexPoint::new(u, v))
        })
        .collect();
    TransformGrid {
        u0: -limit,
        du,
        v,
        values,
    }
}

/// The evaluated bound plus its three constituent terms.
#[derive(Debug, Clone, Copy)]
pub struct BaiBound {
    /// The full right-hand side; an upper bound for the Kolmogorov distance.
    pub value: f64,
    /// Transform-difference integral over `[-A, A]`.
    pub term_transform: f64,
    /// Tail integral of `|F - G|` outside `[-B, B]` (already scaled by
    /// `2 pi / v`).
    pub term_tail: f64,
    /// Smoothness term `v^{-1} sup_x` of the windowed CDF increment.
    pub term_smooth: f64,
    /// Estimate of the quadrature error in the transform term (same scale as
    /// `value`).
    pub discretization_error: f64,
}

/// Kolmogorov-distance bound from Stieltjes-transform closeness: a scaled sum
/// of the transform-difference integral, the tail integral of `|F - G|`, and
/// a smoothness modulus of `G`. The tail and smoothness pieces use the exact
/// piecewise antiderivatives; only the transform integral is discretized (on
/// the caller-supplied grid).
pub fn bai_bound(
    grid: &TransformGrid,
    law: &SemicircleLaw,
    f: &StepCDF,
    params: &BaiBoundParams,
) -> Result<BaiBound, StieltjesError> {
    if !(params.gamma > 0.5) || !(params.kappa < 1.0) {
        return Err(StieltjesError::InvalidParams(
            "gamma <= 1/2 or kappa >= 1".into(),
        ));
    }
    let required = params.v / 10.0;
    if grid.du > required * (1.0 + 1e-12) {
        return Err(StieltjesError::GridTooCoarse {
            spacing: grid.du,
            required,
        });
    }
    if grid.u0 > -params.big_a + 1e-12 || grid.u_end() < params.big_a - 1e-12 {
        return Err(StieltjesError::GridTooShort {
            limit: params.big_a,
        });
    }
    if (grid.v - params.v).abs() > 1e-12 * params.v {
        return Err(StieltjesError::InvalidParams(format!(
            "grid sampled at v = {} but params specify v = {}",
            grid.v, params.v
        )));
    }

    // Term 1: integral of |f - g| over [-A, A] from the grid samples.
    let diffs: Vec<f64> = grid
        .values
        .iter()
        .enumerate()
        .map(|(i, &fv)| {
            let u = grid.u0 + grid.du * i as f64;
            (fv - law.stieltjes(ComplexPoint::new(u, params.v))).norm()
        })
        .collect();
    let trapezoid: f64 = {
        let inner: f64 = diffs[1..diffs.len() - 1].iter().sum();
        grid.du * (0.5 * (diffs[0] + diffs[diffs.len() - 1]) + inner)
    };
    let simpson = composite_simpson(&diffs, grid.du);
    let term_transform = simpson;
    let disc_err = (simpson - trapezoid).abs();

    // Term 2: 2 pi v^{-1} integral of |F - G| outside [-B, B], piecewise exact.
    let tail = tail_integral(f, law, params.big_b);
    let term_tail = 2.0 * PI / params.v * tail;

    // Term 3: v^{-1} sup_x of the windowed increment of G.
    let window = 2.0 * params.v * params.a;
    let inner = |x: f64| {
        law.cdf_antiderivative(x + window) + law.cdf_antiderivative(x - window)
            - 2.0 * law.cdf_antiderivative(x)
    };
    // The density peaks at 0, so the sup sits near 0; scan a grid wide enough
    // to guard the edges, then refine around the best point.
    let (lo_edge, hi_edge) = law.support();
    let step = params.v * params.a / 5.0;
    let mut best_x = 0.0;
    let mut best = inner(0.0);
    let mut x = lo_edge - window;
    while x <= hi_edge + window {
        let val = inner(x);
        if val > best {
            best = val;
            best_x = x;
        }
        x += step;
    }
    let (mut lo, mut hi) = (best_x - step, best_x + step);
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if inner(m1) < inner(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best = best.max(inner(0.5 * (lo + hi)));
    let term_smooth = best / params.v;

    let scale = 1.0 / (PI * (1.0 - params.kappa) * (2.0 * params.gamma - 1.0));
    Ok(BaiBound {
        value: scale * (term_transform + term_tail + term_smooth),
        term_transform,
        term_tail,
        term_smooth,
        discretization_error: scale * disc_err,
    })
}

fn composite_simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut i = 0;
    while i + 2 < n {
        acc += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
        i += 2;
    }
    if i + 1 < n {
        // odd interval count: trapezoid on the last strip
        acc += 0.5 * h * (values[n - 2] + values[n - 1]);
    }
    acc
}

/// Exact `integral_{|x| > B} |F - G| dx` for a step `F` and semicircle `G`.
fn tail_integral(f: &StepCDF, law: &SemicircleLaw, big_b: f64) -> f64 {
    let (lo_edge, hi_edge) = law.support();
    let right_end = f.max_jump().max(hi_edge).max(big_b);
    let left_end = f.min_jump().min(lo_edge).min(-big_b);
    segment_integral(f, law, big_b, right_end) + segment_integral(f, law, left_end, -big_b)
}

/// Exact integral of |F - G| on [a, b]: split at F's atoms, then on each
/// constant piece split at the crossing of G with the piece value.
fn segment_integral(f: &StepCDF, law: &SemicircleLaw, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut cuts: Vec<f64> = vec![a];
    for &x in f.jumps() {
        if x > a && x < b {
            cuts.push(x);
        }
    }
    // G's kinks at the support edges keep each piece smooth
    let (lo_edge, hi_edge) = law.support();
    for edge in [lo_edge, hi_edge] {
        if edge > a && edge < b {
            cuts.push(edge);
        }
    }
    cuts.push(b);
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());

    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        if x1 <= x0 {
            continue;
        }
        let c = f.eval(x0);
        let g0 = law.cdf(x0);
        let g1 = law.cdf(x1);
        let integral_piece = |p: f64, q: f64| -> f64 {
            // integral of (G - c) over [p, q]
            law.cdf_antiderivative(q) - law.cdf_antiderivative(p) - c * (q - p)
        };
        if (g0 - c) * (g1 - c) >= 0.0 {
            total += integral_piece(x0, x1).abs();
        } else {
            // G crosses the piece value once; bisect for the crossing
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if (law.cdf(mid) - c) * (g0 - c) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let xc = 0.5 * (lo + hi);
            total += integral_piece(x0, xc).abs() + integral_piece(xc, x1).abs();
        }
    }
    total
}

/// Result of inverting the self-consistent transform equation for `delta`.
#[derive(Debug, Clone, Copy)]
pub struct DeltaDiagnostic {
    pub z: ComplexPoint,
    pub measured_esn: Complex64,
    pub solved_delta: Complex64,
    /// `|reconstruction(delta) - measured|`.
    pub residual: f64,
}

fn delta_reconstruct(delta: Complex64, z: Complex64) -> Complex64 {
    let root = upper_branch_sqrt((z + delta) * (z + delta) - 4.0, 1.0);
    0.5 * (delta - z + root)
}

/// Solve `Esn = -(z - delta - sqrt((z + delta)^2 - 4))/2` for `delta` by
/// damped Newton from `delta = 0`, taking the `Im sqrt > 0` branch. The
/// measured transform must lie in the upper half-plane.
pub fn delta_solve(
    measured_esn: Complex64,
    z: ComplexPoint,
) -> Result<DeltaDiagnostic, StieltjesError> {
    assert!(
        measured_esn.im > 0.0,
        "measured transform must have positive imaginary part"
    );
    let zc = z.as_complex();
    let target = 1e-9;
    let mut delta = Complex64::new(0.0, 0.0);
    let mut g = delta_reconstruct(delta, zc) - measured_esn;
    let mut iters = 0;
    while g.norm() > 1e-12 && iters < 200 {
        iters += 1;
        let root = upper_branch_sqrt((zc + delta) * (zc + delta) - 4.0, 1.0);
        let dg = 0.5 * (Complex64::new(1.0, 0.0) + (zc + delta) / root);
        let mut step = g / dg;
        // damping: halve until the residual decreases
        let mut accepted = false;
        for _ in 0..30 {
            let cand = delta - step;
            let gc = delta_reconstruct(cand, zc) - measured_esn;
            if gc.norm() < g.norm() {
                delta = cand;
                g = gc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let residual = g.norm();
    if residual > target {
        return Err(StieltjesError::NoConvergence {
            target,
            iters,
        });
    }
    Ok(DeltaDiagnostic {
        z,
        measured_esn,
        solved_delta: delta,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, integrate_complex};
    use crate::spectra::Cdf;

    #[test]
    fn density_values_and_mass() {
        let law = SemicircleLaw::new(1.0);
        assert!((law.density(0.0) - 1.0 / PI).abs() < 1e-15);
        assert_eq!(law.density(2.0), 0.0);
        assert_eq!(law.density(-2.0), 0.0);
        let mass = integrate(|x| law.density(x), -2.0, 2.0, 1e-12);
        assert!((mass - 1.0).abs() < 1e-10, "mass {mass}");
    }

    #[test]
    fn cdf_matches_quadrature() {
        let law = SemicircleLaw::new(1.0);
        assert!((law.cdf(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(law.cdf(2.0), 1.0);
        assert_eq!(law.cdf(-2.0), 0.0);
        for i in 0..=100 {
            let x = -2.0 + 4.0 * i as f64 / 100.0;
            let q = integrate(|t| law.density(t), -2.0, x, 1e-12);
            assert!(
                (law.cdf(x) - q).abs() < 1e-10,
                "x = {x}: cdf {} vs quadrature {q}",
                law.cdf(x)
            );
        }
    }

    #[test]
    fn cdf_antiderivative_matches_quadrature() {
        let law = SemicircleLaw::new(0.8);
        for x in [-1.6, -0.5, 0.0, 0.3, 1.2, 1.6, 2.5] {
            let q = integrate(|t| law.cdf(t), -1.6, x, 1e-12);
            assert!(
                (law.cdf_antiderivative(x) - q).abs() < 1e-9,
                "x = {x}"
            );
        }
    }

    #[test]
    fn stieltjes_at_i_and_branch() {
        let s = semicircle_stieltjes(ComplexPoint::new(0.0, 1.0));
        let expect = Complex64::new(0.0, (5.0_f64.sqrt() - 1.0) / 2.0);
        assert!((s - expect).norm() < 1e-14);
    }

    #[test]
    fn stieltjes_satisfies_quadratic_and_is_contractive() {
        for &u in &[-5.0, -2.0, -0.3, 0.0, 0.7, 2.0, 5.0] {
            for &v in &[0.05, 0.1, 0.3, 0.5, 1.0] {
                let z = ComplexPoint::new(u, v);
                let s = semicircle_stieltjes(z);
                assert!(s.im > 0.0, "Im s <= 0 at {u}+{v}i");
                assert!(s.norm() < 1.0, "|s| >= 1 at {u}+{v}i");
                let resid = (s * s + z.as_complex() * s + 1.0).norm();
                assert!(resid <= 1e-12, "quadratic residual {resid}");
            }
        }
    }

    #[test]
    fn stieltjes_matches_quadrature_oracle() {
        // independent oracle: integrate the density against 1/(x - z) with a
        // trig substitution that removes the edge kinks
        let law = SemicircleLaw::new(1.0);
        for &(u, v) in &[(0.0, 1.0), (0.5, 0.3), (-1.5, 0.2), (2.5, 0.8)] {
            let z = Complex64::new(u, v);
            let oracle = integrate_complex(
                |theta| {
                    // x = 2 sin(theta): f(x) dx = (2 cos(theta))^2/(2 pi) dtheta
                    let x = 2.0 * theta.sin();
                    let w = 2.0 * theta.cos();
                    w * w / (2.0 * PI) / (x - z)
                },
                -PI / 2.0,
                PI / 2.0,
                1e-13,
            );
            let s = law.stieltjes(ComplexPoint::new(u, v));
            assert!((s - oracle).norm() < 1e-10, "z = {u}+{v}i: {s} vs {oracle}");
        }
    }

    #[test]
    fn empirical_transform_examples() {
        let spec = EmpiricalSpectrum::from_eigenvalues(vec![0.0, 0.0], 1);
        let s = empirical_stieltjes(&spec, ComplexPoint::new(0.0, 1.0));
        assert!((s - Complex64::new(0.0, 1.0)).norm() < 1e-15);

        let spec = EmpiricalSpectrum::from_eigenvalues(vec![-1.0, -1.0, 1.0, 1.0], 2);
        let s = empirical_stieltjes(&spec, ComplexPoint::new(0.0, 1.0));
        assert!((s - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn transform_bounded_by_pi_over_v() {
        let spec = EmpiricalSpectrum::from_eigenvalues(vec![-0.9, -0.9, 0.1, 0.1, 1.7, 1.7], 3);
        for &v in &[0.05, 0.2, 1.0] {
            for &u in &[-3.0, -0.9, 0.0, 0.1, 2.0] {
                let s = empirical_stieltjes(&spec, ComplexPoint::new(u, v));
                assert!(s.norm() <= PI / v + 1e-12);
                assert!(s.im > 0.0);
            }
        }
    }

    #[test]
    fn params_validation() {
        assert!(BaiBoundParams::new(0.5, 20.0, 3.0, 0.1).is_err());
        assert!(BaiBoundParams::new(2.0, 3.0, 20.0, 0.1).is_err());
        assert!(BaiBoundParams::new(2.0, 20.0, 3.0, -0.1).is_err());
        let p = BaiBoundParams::defaults(0.1).unwrap();
        assert!(p.gamma > 0.5 && p.kappa < 1.0);
        // kappa formula spot check
        let expect_kappa = 4.0 * 3.0 / (PI * 17.0 * (2.0 * p.gamma - 1.0));
        assert!((p.kappa - expect_kappa).abs() < 1e-15);
    }

    #[test]
    fn bound_dominates_for_quantile_discretization() {
        let law = SemicircleLaw::new(1.0);
        let m = 2048;
        let values: Vec<f64> = (1..=m)
            .map(|i| law.quantile((i as f64 - 0.5) / m as f64))
            .collect();
        let f = StepCDF::from_sorted_values(&values);
        let spec_like = EmpiricalSpectrum::from_eigenvalues(values, m / 2);
        let v = 0.05;
        let params = BaiBoundParams::defaults(v).unwrap();
        let grid = sample_empirical_transform(&spec_like, v, params.big_a, v / 10.0);
        let bound = bai_bound(&grid, &law, &f, &params).unwrap();
        let ks = crate::spectra::sup_distance(Cdf::Step(&f), Cdf::Semicircle(&law));
        assert!(bound.value >= ks, "bound {} < distance {ks}", bound.value);
        assert!(bound.value > 0.0);
    }

    #[test]
    fn grid_too_coarse_is_rejected() {
        let law = SemicircleLaw::new(1.0);
        let values: Vec<f64> = (1..=8).map(|i| law.quantile((i as f64 - 0.5) / 8.0)).collect();
        let spec_like = EmpiricalSpectrum::from_eigenvalues(values.clone(), 4);
        let f = StepCDF::from_sorted_values(&values);
        let params = BaiBoundParams::defaults(0.1).unwrap();
        let grid = sample_empirical_transform(&spec_like, 0.1, params.big_a, 0.05);
        assert!(matches!(
            bai_bound(&grid, &law, &f, &params),
            Err(StieltjesError::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn delta_zero_at_exact_semicircle() {
        let z = ComplexPoint::new(0.0, 1.0);
        let s = semicircle_stieltjes(z);
        let diag = delta_solve(s, z).unwrap();
        assert!(diag.solved_delta.norm() <= 1e-9);
        assert!(diag.residual <= 1e-9);
    }

    #[test]
    fn delta_roundtrip_recovers_planted_value() {
        // plant a delta, reconstruct the transform, and solve back
        for &(du, dv) in &[(0.02, 0.01), (-0.05, 0.03), (0.1, -0.02)] {
            let z = ComplexPoint::new(0.5, 0.2);
            let planted = Complex64::new(du, dv);
            let measured = delta_reconstruct(planted, z.as_complex());
            assert!(measured.im > 0.0);
            let diag = delta_solve(measured, z).unwrap();
            assert!(
                (diag.solved_delta - planted).norm() < 1e-8,
                "recovered {} vs planted {}",
                diag.solved_delta,
                planted
            );
            // closed-form cross-check: delta = (s^2 + z s + 1)/(z + s)
            let s = measured;
            let closed = (s * s + z.as_complex() * s + 1.0) / (z.as_complex() + s);
            assert!((diag.solved_delta - closed).norm() < 1e-8);
        }
    }
}
