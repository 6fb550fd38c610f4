//! Property tests for the algebraic and distributional invariants.

use proptest::prelude::*;
use qsd::ensemble::{sample_matrix, scaled_matrix, EntryLawSpec};
use qsd::quaternion::{block_to_quat, qconj, qmul, qnorm, quat_to_block, Quaternion};
use qsd::spectra::{
    esd, expand_hermitian, hermitian_eigenvalues, levy_distance, sup_distance, Cdf, StepCDF,
};
use qsd::stieltjes::{delta_solve, ComplexPoint, SemicircleLaw};

fn quat_strategy() -> impl Strategy<Value = Quaternion> {
    (
        -10.0..10.0f64,
        -10.0..10.0f64,
        -10.0..10.0f64,
        -10.0..10.0f64,
    )
        .prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
}

proptest! {
    #[test]
    fn block_embedding_is_multiplicative(p in quat_strategy(), q in quat_strategy()) {
        let lhs = quat_to_block(qmul(p, q));
        let rhs = quat_to_block(p).matmul(&quat_to_block(q));
        let scale = 1.0 + qnorm(p) * qnorm(q);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-13 * scale);
    }

    #[test]
    fn conjugation_reverses_products(p in quat_strategy(), q in quat_strategy()) {
        let lhs = qconj(qmul(p, q));
        let rhs = qmul(qconj(q), qconj(p));
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + qnorm(p) * qnorm(q)));
    }

    #[test]
    fn block_round_trip_is_exact(q in quat_strategy()) {
        let back = block_to_quat(&quat_to_block(q), 1e-10).unwrap();
        prop_assert_eq!(back, q);
    }

    #[test]
    fn norm_is_multiplicative(p in quat_strategy(), q in quat_strategy()) {
        let err = (qnorm(qmul(p, q)) - qnorm(p) * qnorm(q)).abs();
        prop_assert!(err <= 1e-12 * (1.0 + qnorm(p) * qnorm(q)));
    }

    #[test]
    fn step_cdf_is_monotone_with_unit_mass(mut atoms in prop::collection::vec(-50.0..50.0f64, 1..40)) {
        atoms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let f = StepCDF::from_sorted_values(&atoms);
        let cum = f.cumulative();
        prop_assert!((cum.last().unwrap() - 1.0).abs() < 1e-12);
        for w in cum.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        // right continuity at jumps
        for &x in f.jumps() {
            prop_assert!(f.eval(x) >= f.eval_left(x));
        }
    }

    #[test]
    fn levy_never_exceeds_kolmogorov(
        xs in prop::collection::vec(-3.0..3.0f64, 1..20),
        ys in prop::collection::vec(-3.0..3.0f64, 1..20),
    ) {
        let f = StepCDF::from_sorted_values(&xs);
        let g = StepCDF::from_sorted_values(&ys);
        let k = sup_distance(Cdf::Step(&f), Cdf::Step(&g));
        let l = levy_distance(&f, Cdf::Step(&g));
        prop_assert!(l <= k + 1e-8, "levy {} > kolmogorov {}", l, k);
    }

    #[test]
    fn sup_distance_is_symmetric_and_bounded(
        xs in prop::collection::vec(-3.0..3.0f64, 1..20),
        ys in prop::collection::vec(-3.0..3.0f64, 1..20),
    ) {
        let f = StepCDF::from_sorted_values(&xs);
        let g = StepCDF::from_sorted_values(&ys);
        let d1 = sup_distance(Cdf::Step(&f), Cdf::Step(&g));
        let d2 = sup_distance(Cdf::Step(&g), Cdf::Step(&f));
        prop_assert_eq!(d1, d2);
        prop_assert!((0.0..=1.0).contains(&d1));
    }

    #[test]
    fn sampled_expansions_stay_hermitian_and_paired(n in 1usize..12, seed in 0u64..500) {
        let spec = EntryLawSpec::gse(1.0).unwrap();
        let y = sample_matrix(&spec, n, seed).unwrap();
        let s = scaled_matrix(&y).unwrap();
        let h = expand_hermitian(&s);
        prop_assert_eq!(h.hermitian_residual(), 0.0);
        let spectrum = hermitian_eigenvalues(&h, 1e-14).unwrap();
        let f = esd(&spectrum);
        prop_assert!((f.cumulative().last().unwrap() - 1.0).abs() < 1e-12);
        // paired eigenvalues
        let ev = spectrum.eigenvalues();
        for pair in 0..n {
            let gap = ev[2 * pair + 1] - ev[2 * pair];
            prop_assert!(gap <= 1e-8 * ev[2 * pair + 1].abs().max(1.0));
        }
    }

    #[test]
    fn esd_distance_to_law_is_in_unit_interval(n in 1usize..10, seed in 0u64..200) {
        let spec = EntryLawSpec::gse(1.0).unwrap();
        let y = sample_matrix(&spec, n, seed).unwrap();
        let s = scaled_matrix(&y).unwrap();
        let spectrum = hermitian_eigenvalues(&expand_hermitian(&s), 1e-14).unwrap();
        let f = esd(&spectrum);
        let law = SemicircleLaw::new(1.0);
        let d = sup_distance(Cdf::Step(&f), Cdf::Semicircle(&law));
        prop_assert!(d > 0.0 && d <= 1.0);
        let l = levy_distance(&f, Cdf::Semicircle(&law));
        prop_assert!(l <= d + 1e-8);
    }

    #[test]
    fn delta_solve_reconstructs_planted_values(
        du in -0.2..0.2f64,
        dv in -0.1..0.1f64,
        u in -1.0..1.0f64,
        v in 0.15..1.0f64,
    ) {
        let z = ComplexPoint::new(u, v);
        let planted = num_complex::Complex64::new(du, dv);
        // reconstruct the transform this delta would produce
        let zc = z.as_complex();
        let w = (zc + planted) * (zc + planted) - 4.0;
        let mut root = w.sqrt();
        if root.im < 0.0 {
            root = -root;
        }
        let measured = 0.5 * (planted - zc + root);
        prop_assume!(measured.im > 1e-3);
        let diag = delta_solve(measured, z).unwrap();
        prop_assert!(diag.residual <= 1e-9);
        prop_assert!((diag.solved_delta - planted).norm() <= 1e-7);
    }
}
