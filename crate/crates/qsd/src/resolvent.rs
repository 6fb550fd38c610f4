//! Resolvents, quaternion minors, the epsilon_k diagnostics, and the
//! Type-I/Type-II structural classifiers.
//!
//! In 2x2 block terms (quaternion coordinates), a matrix is classified here
//! as Type-I when every diagonal block is scalar (`t_j I_2`) and each
//! off-diagonal block `[[a,b],[c,d]]` is paired with `[[d,-b],[-c,a]]` at the
//! mirrored position. Type-II additionally requires each off-diagonal block
//! to be a quaternion image (`m21 = -conj(m12)`, `m22 = conj(m11)`), which
//! turns the mirrored pairing into the conjugate transpose. A shifted
//! expansion `H - zI` is Type-II by construction; inverses of invertible
//! Type-II matrices are Type-I, which the resolvent tests exercise.

use crate::ensemble::{scaled_matrix, QSelfDualMatrix};
use crate::linalg::{cond1, CMatrix, Lu};
use crate::quaternion::Quaternion;
use crate::rng::entry_stream;
use crate::spectra::{expand_hermitian, HermitianExpansion};
use crate::stieltjes::ComplexPoint;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ResolventError {
    #[error("quaternion index {k} out of range for n = {n}")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("matrix dimension {dim} is odd; quaternion block structure requires an even dimension")]
    OddDimension { dim: usize },
    #[error("matrix numerically singular (condition estimate {cond:.3e})")]
    NumericallySingular { cond: f64 },
    #[error("singular block in partitioned inverse: {0}")]
    SingularBlock(String),
    #[error("shifted system is singular")]
    SingularSystem,
}

/// Dense resolvent `(W - zI)^{-1}`.
#[derive(Debug, Clone)]
pub struct Resolvent {
    pub z: ComplexPoint,
    pub mat: CMatrix,
}

impl Resolvent {
    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    /// Normalized trace `(dim)^{-1} tr D`; equals the empirical Stieltjes
    /// transform of the underlying spectrum.
    pub fn trace_transform(&self) -> Complex64 {
        self.trace() / self.dim() as f64
    }

    /// Max entry of `(W - zI) D - I`.
    pub fn residual(&self, w: &HermitianExpansion) -> f64 {
        w.shifted(self.z.as_complex())
            .matmul(&self.mat)
            .residual_from_identity()
    }
}

/// Invert `W - zI` by LU with partial pivoting. `Im z > 0` guarantees
/// invertibility for Hermitian `W`.
pub fn resolvent(w: &HermitianExpansion, z: ComplexPoint) -> Result<Resolvent, ResolventError> {
    let shifted = w.shifted(z.as_complex());
    let lu = Lu::factor(&shifted).map_err(|_| ResolventError::SingularSystem)?;
    Ok(Resolvent {
        z,
        mat: lu.inverse(),
    })
}

/// Everything attached to removing the k-th quaternion row/column: the minor
/// resolvent `D_k`, its square `P_k`, and the removed column block `Q_k`
/// (stored unscaled, i.e. multiplied back by `sqrt(n)`).
#[derive(Debug, Clone)]
pub struct MinorContext {
    pub k: usize,
    pub n: usize,
    pub z: ComplexPoint,
    /// `(2n-2) x 2` unscaled k-th quaternion column with the k-th entry
    /// removed.
    pub q_k: CMatrix,
    pub d_k: CMatrix,
    pub p_k: CMatrix,
}

impl MinorContext {
    pub fn tr_d_k(&self) -> Complex64 {
        self.d_k.trace()
    }

    /// First column of `Q_k`.
    pub fn varpi(&self) -> Vec<Complex64> {
        (0..self.q_k.rows).map(|i| self.q_k[(i, 0)]).collect()
    }

    /// Second column of `Q_k`.
    pub fn varrho(&self) -> Vec<Complex64> {
        (0..self.q_k.rows).map(|i| self.q_k[(i, 1)]).collect()
    }
}

/// Remove quaternion row/column `k` (0-based) from the scaled expansion and
/// invert the shifted minor.
pub fn minor_resolvent(
    w: &HermitianExpansion,
    k: usize,
    z: ComplexPoint,
) -> Result<MinorContext, ResolventError> {
    let dim = w.dim();
    let n = dim / 2;
    if k >= n {
        return Err(ResolventError::IndexOutOfRange { k, n });
    }
    let mat = w.as_matrix();
    let keep: Vec<usize> = (0..dim).filter(|&i| i != 2 * k && i != 2 * k + 1).collect();
    let minor_dim = dim - 2;
    let mut shifted = CMatrix::from_fn(minor_dim, minor_dim, |i, j| mat[(keep[i], keep[j])]);
    shifted.shift_diagonal(z.as_complex());
    let d_k = if minor_dim == 0 {
        CMatrix::zeros(0, 0)
    } else {
        Lu::factor(&shifted)
            .map_err(|_| ResolventError::SingularSystem)?
            .inverse()
    };
    let p_k = if minor_dim == 0 {
        CMatrix::zeros(0, 0)
    } else {
        d_k.matmul(&d_k)
    };
    let scale = (n as f64).sqrt();
    let q_k = CMatrix::from_fn(minor_dim, 2, |i, j| mat[(keep[i], 2 * k + j)] * scale);
    Ok(MinorContext {
        k,
        n,
        z,
        q_k,
        d_k,
        p_k,
    })
}

/// The 2x2 diagnostic `epsilon_k = x_kk/sqrt(n) - Q_k* D_k Q_k / n + Esn I_2`
/// together with its deviation from scalar form.
#[derive(Debug, Clone, Copy)]
pub struct EpsilonK {
    pub k: usize,
    pub value: [Complex64; 4],
    /// `max(|off-diagonal|, |e11 - e22|)`.
    pub scalar_deviation: f64,
}

impl EpsilonK {
    /// The scalar it represents (mean of the diagonal).
    pub fn scalar(&self) -> Complex64 {
        0.5 * (self.value[0] + self.value[3])
    }

    /// `xi_k = ((z + Esn) I - epsilon_k)^{-1}` as a 2x2 matrix.
    pub fn xi(&self, z: ComplexPoint, esn: Complex64) -> [Complex64; 4] {
        let w = z.as_complex() + esn;
        let m = [
            w - self.value[0],
            -self.value[1],
            -self.value[2],
            w - self.value[3],
        ];
        let det = m[0] * m[3] - m[1] * m[2];
        [m[3] / det, -m[1] / det, -m[2] / det, m[0] / det]
    }

    /// `t_n tr(epsilon_k xi_k)`, the per-k summand of the delta average,
    /// with `t_n = (z + Esn)^{-1}`.
    pub fn delta_summand(&self, z: ComplexPoint, esn: Complex64) -> Complex64 {
        let t = (z.as_complex() + esn).inv();
        let xi = self.xi(z, esn);
        let e = &self.value;
        let tr = e[0] * xi[0] + e[1] * xi[2] + e[2] * xi[1] + e[3] * xi[3];
        t * tr
    }
}

/// Evaluate `epsilon_k` from a minor context, the unscaled diagonal entry
/// `x_kk`, and a supplied `Esn` (Monte Carlo average or single-instance
/// transform).
pub fn epsilon_k(ctx: &MinorContext, x_kk: Quaternion, esn: Complex64) -> EpsilonK {
    let n = ctx.n as f64;
    let block = x_kk.to_block();
    let quad = ctx.q_k.adjoint().matmul(&ctx.d_k).matmul(&ctx.q_k);
    let mut value = [Complex64::new(0.0, 0.0); 4];
    for (i, v) in value.iter_mut().enumerate() {
        let (r, c) = (i / 2, i % 2);
        let diag = if r == c {
            esn
        } else {
            Complex64::new(0.0, 0.0)
        };
        *v = block.entries[i] / n.sqrt() - quad[(r, c)] / n + diag;
    }
    let scalar_deviation = value[1]
        .norm()
        .max(value[2].norm())
        .max((value[0] - value[3]).norm());
    EpsilonK {
        k: ctx.k,
        value,
        scalar_deviation,
    }
}

/// Compute `epsilon_k` for every k of an unscaled matrix. When `esn` is
/// `None` the single-instance transform `(2n)^{-1} tr D` is used. Returns the
/// diagnostics plus the `Esn` value employed and the full resolvent trace.
pub fn epsilon_all(
    y: &QSelfDualMatrix,
    z: ComplexPoint,
    esn: Option<Complex64>,
) -> Result<(Vec<EpsilonK>, Complex64, Complex64), ResolventError> {
    let scaled = scaled_matrix(y).expect("epsilon_all expects an unscaled matrix");
    let h = expand_hermitian(&scaled);
    let d = resolvent(&h, z)?;
    let esn_used = esn.unwrap_or_else(|| d.trace_transform());
    let mut out = Vec::with_capacity(y.n());
    for k in 0..y.n() {
        let ctx = minor_resolvent(&h, k, z)?;
        out.push(epsilon_k(&ctx, y.entry(k, k), esn_used));
    }
    Ok((out, esn_used, d.trace()))
}

fn block_at(m: &CMatrix, bj: usize, bk: usize) -> [Complex64; 4] {
    [
        m[(2 * bj, 2 * bk)],
        m[(2 * bj, 2 * bk + 1)],
        m[(2 * bj + 1, 2 * bk)],
        m[(2 * bj + 1, 2 * bk + 1)],
    ]
}

fn scalar_diag_residual(m: &CMatrix, bj: usize) -> f64 {
    let d = block_at(m, bj, bj);
    d[1].norm().max(d[2].norm()).max((d[0] - d[3]).norm())
}

/// Max deviation from the Type-I pattern.
pub fn type1_residual(m: &CMatrix) -> Result<f64, ResolventError> {
    if m.rows % 2 != 0 || m.rows != m.cols {
        return Err(ResolventError::OddDimension { dim: m.rows });
    }
    let n = m.rows / 2;
    let mut r: f64 = 0.0;
    for j in 0..n {
        r = r.max(scalar_diag_residual(m, j));
        for k in j + 1..n {
            let u = block_at(m, j, k);
            let l = block_at(m, k, j);
            r = r
                .max((l[0] - u[3]).norm())
                .max((l[1] + u[1]).norm())
                .max((l[2] + u[2]).norm())
                .max((l[3] - u[0]).norm());
        }
    }
    Ok(r)
}

/// Max deviation from the Type-II pattern (conjugate pairing).
pub fn type2_residual(m: &CMatrix) -> Result<f64, ResolventError> {
    if m.rows % 2 != 0 || m.rows != m.cols {
        return Err(ResolventError::OddDimension { dim: m.rows });
    }
    let n = m.rows / 2;
    let mut r: f64 = 0.0;
    for j in 0..n {
        r = r.max(scalar_diag_residual(m, j));
        for k in j + 1..n {
            let u = block_at(m, j, k);
            let l = block_at(m, k, j);
            // quaternion-image structure of the upper block
            r = r
                .max((u[2] + u[1].conj()).norm())
                .max((u[3] - u[0].conj()).norm());
            // conjugate pairing: lower block is the adjoint of the upper one
            r = r
                .max((l[0] - u[0].conj()).norm())
                .max((l[1] - u[2].conj()).norm())
                .max((l[2] - u[1].conj()).norm())
                .max((l[3] - u[3].conj()).norm());
        }
    }
    Ok(r)
}

fn structural_tol(m: &CMatrix, tol: f64) -> f64 {
    tol * m.max_abs().max(1.0)
}

/// Type-I classifier: scalar diagonal blocks plus the mirrored
/// `[[d,-b],[-c,a]]` pairing, within `tol` scaled by the matrix magnitude.
pub fn is_type1(m: &CMatrix, tol: f64) -> Result<bool, ResolventError> {
    Ok(type1_residual(m)? <= structural_tol(m, tol))
}

/// Type-II classifier: scalar diagonal blocks, quaternion-image off-diagonal
/// blocks, conjugate pairing across the diagonal.
pub fn is_type2(m: &CMatrix, tol: f64) -> Result<bool, ResolventError> {
    Ok(type2_residual(m)? <= structural_tol(m, tol))
}

/// Result of inverting a Type-II matrix and checking the inverse's Type-I
/// structure.
#[derive(Debug, Clone, Copy)]
pub struct InverseStructureReport {
    pub condition: f64,
    pub type1_residual: f64,
    pub passed: bool,
}

/// Invert a Type-II matrix by dense LU and verify that the inverse is
/// Type-I. The input must classify as Type-II at `tol`.
pub fn verify_inverse_type1(
    m: &CMatrix,
    tol: f64,
) -> Result<InverseStructureReport, ResolventError> {
    assert!(
        is_type2(m, tol)?,
        "verify_inverse_type1 requires a Type-II input (residual {:.3e})",
        type2_residual(m)?
    );
    let lu = Lu::factor(m).map_err(|_| ResolventError::SingularSystem)?;
    let inv = lu.inverse();
    let cond = cond1(m, &inv);
    if cond > 1e12 {
        return Err(ResolventError::NumericallySingular { cond });
    }
    let residual = type1_residual(&inv)?;
    Ok(InverseStructureReport {
        condition: cond,
        type1_residual: residual,
        passed: residual <= structural_tol(&inv, tol),
    })
}

/// Random invertible Type-II matrix of quaternion dimension `n`: quaternion
/// off-diagonal blocks (entries scaled down with `n` for conditioning),
/// complex scalar diagonal kept away from zero. Deterministic in `seed`.
pub fn sample_type2(n: usize, seed: u64) -> CMatrix {
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    let offdiag_scale = 0.5 / (n as f64).sqrt();
    for j in 0..n {
        let mut rng = entry_stream(seed, j, j);
        let radius = 1.0 + rng.gen::<f64>();
        let angle = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
        let t = Complex64::from_polar(radius, angle);
        m[(2 * j, 2 * j)] = t;
        m[(2 * j + 1, 2 * j + 1)] = t;
        for k in j + 1..n {
            let mut rng = entry_stream(seed, j, k);
            let mut comp = [0.0; 4];
            for c in comp.iter_mut() {
                let g: f64 = StandardNormal.sample(&mut rng);
                *c = offdiag_scale * g;
            }
            let q = Quaternion::new(comp[0], comp[1], comp[2], comp[3]);
            let block = q.to_block();
            for (idx, &val) in block.entries.iter().enumerate() {
                let (r, c) = (idx / 2, idx % 2);
                m[(2 * j + r, 2 * k + c)] = val;
                // conjugate pairing
                m[(2 * k + c, 2 * j + r)] = val.conj();
            }
        }
    }
    m
}

/// The four blocks of a partitioned inverse via the Schur complement.
#[derive(Debug, Clone)]
pub struct BlockInverse {
    pub top_left: CMatrix,
    pub top_right: CMatrix,
    pub bottom_left: CMatrix,
    pub bottom_right: CMatrix,
}

impl BlockInverse {
    pub fn assemble(&self) -> CMatrix {
        let p = self.top_left.rows;
        let q = self.bottom_right.rows;
        CMatrix::from_fn(p + q, p + q, |i, j| match (i < p, j < p) {
            (true, true) => self.top_left[(i, j)],
            (true, false) => self.top_right[(i, j - p)],
            (false, true) => self.bottom_left[(i - p, j)],
            (false, false) => self.bottom_right[(i - p, j - p)],
        })
    }
}

/// Partitioned inverse: with `S = Sigma22 - Sigma21 Sigma11^{-1} Sigma12`,
/// the inverse blocks are
/// `[A^{-1} + A^{-1} B S^{-1} C A^{-1}, -A^{-1} B S^{-1}; -S^{-1} C A^{-1}, S^{-1}]`.
pub fn block_inverse(m: &CMatrix, split: usize) -> Result<BlockInverse, ResolventError> {
    assert!(m.rows == m.cols && split > 0 && split < m.rows);
    let p = split;
    let q = m.rows - split;
    let a = CMatrix::from_fn(p, p, |i, j| m[(i, j)]);
    let b = CMatrix::from_fn(p, q, |i, j| m[(i, j + p)]);
    let c = CMatrix::from_fn(q, p, |i, j| m[(i + p, j)]);
    let d = CMatrix::from_fn(q, q, |i, j| m[(i + p, j + p)]);

    let a_lu = Lu::factor(&a)
        .map_err(|e| ResolventError::SingularBlock(format!("leading block: {e}")))?;
    let a_inv = a_lu.inverse();
    let schur = d.sub(&c.matmul(&a_inv).matmul(&b));
    let s_lu = Lu::factor(&schur)
        .map_err(|e| ResolventError::SingularBlock(format!("Schur complement: {e}")))?;
    let s_inv = s_lu.inverse();

    let a_inv_b = a_inv.matmul(&b);
    let c_a_inv = c.matmul(&a_inv);
    let top_left = {
        let corr = a_inv_b.matmul(&s_inv).matmul(&c_a_inv);
        let mut tl = a_inv.clone();
        for i in 0..p {
            for j in 0..p {
                tl[(i, j)] += corr[(i, j)];
            }
        }
        tl
    };
    let top_right = a_inv_b.matmul(&s_inv).scale(Complex64::new(-1.0, 0.0));
    let bottom_left = s_inv.matmul(&c_a_inv).scale(Complex64::new(-1.0, 0.0));
    Ok(BlockInverse {
        top_left,
        top_right,
        bottom_left,
        bottom_right: s_inv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_matrix, EntryLawSpec};
    use crate::spectra::hermitian_eigenvalues;
    use crate::stieltjes::empirical_stieltjes;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gse_expansion(n: usize, seed: u64) -> (QSelfDualMatrix, HermitianExpansion) {
        let spec = EntryLawSpec::gse(1.0).unwrap();
        let y = sample_matrix(&spec, n, seed).unwrap();
        let s = scaled_matrix(&y).unwrap();
        (y, expand_hermitian(&s))
    }

    #[test]
    fn resolvent_of_zero_matrix() {
        let h = expand_hermitian(&QSelfDualMatrix::zero(2));
        let d = resolvent(&h, ComplexPoint::new(0.0, 1.0)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((d.mat[(i, j)] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn resolvent_of_unit_diagonal() {
        let mut m = QSelfDualMatrix::zero(1);
        m.set_diag(0, 1.0);
        let h = expand_hermitian(&m);
        let d = resolvent(&h, ComplexPoint::new(0.0, 1.0)).unwrap();
        let expect = Complex64::new(1.0, -1.0).inv();
        assert!((d.mat[(0, 0)] - expect).norm() < 1e-14);
        assert!((d.mat[(1, 1)] - expect).norm() < 1e-14);
    }

    #[test]
    fn resolvent_residual_and_trace_agreement() {
        let (_, h) = gse_expansion(8, 31);
        let z = ComplexPoint::new(0.4, 0.6);
        let d = resolvent(&h, z).unwrap();
        assert!(d.residual(&h) <= 1e-10 * h.dim() as f64);
        let spec = hermitian_eigenvalues(&h, 1e-14).unwrap();
        let sn = empirical_stieltjes(&spec, z);
        assert!(
            (d.trace_transform() - sn).norm() < 1e-10,
            "trace {} vs eigen sum {}",
            d.trace_transform(),
            sn
        );
    }

    #[test]
    fn minor_n1_is_empty_and_interlacing_holds() {
        let (_, h) = gse_expansion(1, 4);
        let z = ComplexPoint::new(0.0, 0.5);
        let ctx = minor_resolvent(&h, 0, z).unwrap();
        assert_eq!(ctx.d_k.rows, 0);
        assert_eq!(ctx.tr_d_k(), Complex64::new(0.0, 0.0));
        let d = resolvent(&h, z).unwrap();
        assert!(d.trace().norm() <= 2.0 / 0.5 + 1e-12);
    }

    #[test]
    fn minor_of_diagonal_matrix() {
        let mut m = QSelfDualMatrix::zero(3);
        m.set_diag(0, 1.0);
        m.set_diag(1, 2.0);
        m.set_diag(2, 3.0);
        let h = expand_hermitian(&m);
        let z = ComplexPoint::new(0.0, 1.0);
        let ctx = minor_resolvent(&h, 1, z).unwrap();
        // minor keeps quaternion entries 1 and 3
        let e1 = (Complex64::new(1.0, -1.0)).inv();
        let e3 = (Complex64::new(3.0, -1.0)).inv();
        assert!((ctx.d_k[(0, 0)] - e1).norm() < 1e-14);
        assert!((ctx.d_k[(3, 3)] - e3).norm() < 1e-14);
        assert!(matches!(
            minor_resolvent(&h, 3, z),
            Err(ResolventError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn trace_interlacing_all_k() {
        let (_, h) = gse_expansion(16, 7);
        for &v in &[0.1, 0.3, 1.0] {
            let z = ComplexPoint::new(0.2, v);
            let d = resolvent(&h, z).unwrap();
            for k in 0..16 {
                let ctx = minor_resolvent(&h, k, z).unwrap();
                let gap = (d.trace() - ctx.tr_d_k()).norm();
                assert!(gap <= 2.0 / v + 1e-10, "k={k}, v={v}: gap {gap}");
            }
        }
    }

    #[test]
    fn epsilon_of_zero_matrix_is_esn_scalar() {
        let y = QSelfDualMatrix::zero(4);
        let z = ComplexPoint::new(0.0, 1.0);
        let esn = crate::stieltjes::semicircle_stieltjes(z);
        let (eps, used, _) = epsilon_all(&y, z, Some(esn)).unwrap();
        assert_eq!(used, esn);
        for e in eps {
            assert!(e.scalar_deviation < 1e-15);
            assert!((e.scalar() - esn).norm() < 1e-15);
        }
    }

    #[test]
    fn epsilon_scalar_structure_on_gse() {
        let spec = EntryLawSpec::gse(1.0).unwrap();
        let y = sample_matrix(&spec, 12, 3).unwrap();
        let z = ComplexPoint::new(0.5, 0.3);
        let (eps, esn, _) = epsilon_all(&y, z, None).unwrap();
        for e in &eps {
            assert!(
                e.scalar_deviation <= 1e-10,
                "k = {}: deviation {}",
                e.k,
                e.scalar_deviation
            );
        }
        // xi identity: xi = t I + t xi eps, with t = (z + Esn)^{-1}
        let t = (z.as_complex() + esn).inv();
        for e in &eps {
            let xi = e.xi(z, esn);
            let idp = [
                t + t * (xi[0] * e.value[0] + xi[1] * e.value[2]),
                t * (xi[0] * e.value[1] + xi[1] * e.value[3]),
                t * (xi[2] * e.value[0] + xi[3] * e.value[2]),
                t + t * (xi[2] * e.value[1] + xi[3] * e.value[3]),
            ];
            for (lhs, rhs) in xi.iter().zip(idp.iter()) {
                assert!((lhs - rhs).norm() <= 1e-10, "xi identity violated");
            }
        }
    }

    #[test]
    fn transform_decomposes_into_delta_summands() {
        // exact per-instance identity: s_n = -t_n - (2n)^{-1} sum t_n tr(eps_k xi_k)
        let spec = EntryLawSpec::gse(1.0).unwrap();
        let y = sample_matrix(&spec, 10, 5).unwrap();
        let z = ComplexPoint::new(0.3, 0.7);
        let (eps, esn, trace) = epsilon_all(&y, z, None).unwrap();
        let sn = trace / 20.0;
        let t = (z.as_complex() + esn).inv();
        let sum: Complex64 = eps.iter().map(|e| e.delta_summand(z, esn)).sum();
        let reconstructed = -t - sum / 20.0;
        assert!(
            (sn - reconstructed).norm() < 1e-10,
            "sn {sn} vs reconstruction {reconstructed}"
        );
    }

    #[test]
    fn quadratic_form_imaginary_part_bound() {
        let (_, h) = gse_expansion(12, 9);
        let v = 0.4;
        let z = ComplexPoint::new(-0.3, v);
        for k in 0..12 {
            let ctx = minor_resolvent(&h, k, z).unwrap();
            let varpi = ctx.varpi();
            let dv = ctx.d_k.matvec(&varpi);
            let quad: Complex64 = varpi
                .iter()
                .zip(dv.iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            let val = -z.as_complex() - quad / 12.0;
            assert!(val.im < -v + 1e-12, "k={k}: Im {} not below {}", val.im, -v);
        }
    }

    #[test]
    fn type_classifiers_basic_cases() {
        let id = CMatrix::identity(4);
        assert!(is_type1(&id, 1e-10).unwrap());
        assert!(is_type2(&id, 1e-10).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dense = CMatrix::from_fn(4, 4, |_, _| {
            Complex64::new(rng.gen::<f64>(), rng.gen::<f64>())
        });
        assert!(!is_type1(&dense, 1e-10).unwrap());
        assert!(!is_type2(&dense, 1e-10).unwrap());

        let odd = CMatrix::zeros(3, 3);
        assert!(matches!(
            is_type1(&odd, 1e-10),
            Err(ResolventError::OddDimension { .. })
        ));
    }

    #[test]
    fn type1_but_not_type2_witness() {
        // off-diagonal block [[1,2],[3,4]] with mirrored [[4,-2],[-3,1]]
        // satisfies the Type-I pairing but violates the conjugate pairing
        let mut m = CMatrix::identity(4);
        let u = [1.0, 2.0, 3.0, 4.0];
        m[(0, 2)] = Complex64::new(u[0], 0.0);
        m[(0, 3)] = Complex64::new(u[1], 0.0);
        m[(1, 2)] = Complex64::new(u[2], 0.0);
        m[(1, 3)] = Complex64::new(u[3], 0.0);
        m[(2, 0)] = Complex64::new(u[3], 0.0);
        m[(2, 1)] = Complex64::new(-u[1], 0.0);
        m[(3, 0)] = Complex64::new(-u[2], 0.0);
        m[(3, 1)] = Complex64::new(u[0], 0.0);
        assert!(is_type1(&m, 1e-10).unwrap());
        assert!(!is_type2(&m, 1e-10).unwrap());
    }

    #[test]
    fn shifted_expansion_is_type2_and_resolvent_is_type1() {
        let (_, h) = gse_expansion(10, 21);
        for z in [ComplexPoint::new(0.3, 0.4), ComplexPoint::new(-1.0, 0.05)] {
            let shifted = h.shifted(z.as_complex());
            assert!(is_type2(&shifted, 1e-10).unwrap());
            // real shift too
            let real_shifted = h.shifted(Complex64::new(0.7, 0.0));
            assert_eq!(type2_residual(&real_shifted).unwrap(), 0.0);

            let d = resolvent(&h, z).unwrap();
            let res = type1_residual(&d.mat).unwrap();
            assert!(res <= 1e-10, "resolvent Type-I residual {res}");
        }
    }

    #[test]
    fn inverse_of_type2_is_type1() {
        // scalar matrix: trivially both
        let three_i = CMatrix::identity(4).scale(Complex64::new(3.0, 0.0));
        let report = verify_inverse_type1(&three_i, 1e-10).unwrap();
        assert!(report.passed);

        for seed in 0..10 {
            let m = sample_type2(10, 1000 + seed);
            assert!(is_type2(&m, 1e-12).unwrap());
            let report = verify_inverse_type1(&m, 1e-10).unwrap();
            assert!(
                report.passed,
                "seed {seed}: residual {} cond {}",
                report.type1_residual, report.condition
            );
        }
    }

    #[test]
    fn block_inverse_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let m = CMatrix::from_fn(10, 10, |i, j| {
            let diag = if i == j { 4.0 } else { 0.0 };
            Complex64::new(rng.gen::<f64>() - 0.5 + diag, rng.gen::<f64>() - 0.5)
        });
        let blocks = block_inverse(&m, 6).unwrap();
        let assembled = blocks.assemble();
        assert!(m.matmul(&assembled).residual_from_identity() < 1e-10);
        let dense = crate::linalg::inverse(&m).unwrap();
        let diff = assembled.sub(&dense).max_abs();
        assert!(diff < 1e-10, "blockwise vs dense inverse differ by {diff}");
    }

    #[test]
    fn block_inverse_of_block_diagonal() {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = Complex64::new(2.0, 0.0);
        m[(1, 1)] = Complex64::new(4.0, 0.0);
        m[(2, 2)] = Complex64::new(5.0, 0.0);
        m[(3, 3)] = Complex64::new(10.0, 0.0);
        let blocks = block_inverse(&m, 2).unwrap();
        assert!(blocks.top_right.max_abs() == 0.0);
        assert!(blocks.bottom_left.max_abs() == 0.0);
        assert!((blocks.top_left[(0, 0)] - 0.5).norm() < 1e-15);
        assert!((blocks.bottom_right[(1, 1)] - 0.1).norm() < 1e-15);
    }

    #[test]
    fn block_inverse_two_by_two_adjugate() {
        let m = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Complex64::new(3.0, 0.0),
            (0, 1) => Complex64::new(1.0, 0.0),
            (1, 0) => Complex64::new(2.0, 0.0),
            _ => Complex64::new(4.0, 0.0),
        });
        let blocks = block_inverse(&m, 1).unwrap();
        let det = 10.0;
        assert!((blocks.top_left[(0, 0)] - 4.0 / det).norm() < 1e-14);
        assert!((blocks.top_right[(0, 0)] + 1.0 / det).norm() < 1e-14);
        assert!((blocks.bottom_left[(0, 0)] + 2.0 / det).norm() < 1e-14);
        assert!((blocks.bottom_right[(0, 0)] - 3.0 / det).norm() < 1e-14);
        assert!(matches!(
            block_inverse(&CMatrix::zeros(2, 2), 1),
            Err(ResolventError::SingularBlock(_))
        ));
    }
}
