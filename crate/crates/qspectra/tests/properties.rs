//! Randomized invariant checks with proptest.

use nalgebra::Matrix2;
use num_complex::Complex64;
use proptest::prelude::*;

use qspectra::embed::embed_scalar;
use qspectra::metrics::{kolmogorov_distance, levy_distance, Cdf, StepCdf};
use qspectra::mp::MPLaw;
use qspectra::sampling::{derive_seed, preprocess_entries, sample_matrix, EntryDistribution};
use qspectra::spectra::spectral_sample;
use qspectra::Quaternion;

fn quat() -> impl Strategy<Value = Quaternion> {
    (-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0)
        .prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
}

fn mat2_norm(m: &Matrix2<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_is_multiplicative(x in quat(), y in quat()) {
        let lhs = embed_scalar(x * y);
        let rhs = embed_scalar(x) * embed_scalar(y);
        let scale = f64::max(1.0, mat2_norm(&rhs));
        prop_assert!(mat2_norm(&(lhs - rhs)) <= 1e-10 * scale);
    }

    #[test]
    fn embedding_determinant_is_squared_norm(x in quat()) {
        let det = embed_scalar(x).determinant();
        let scale = f64::max(1.0, x.norm_sq());
        prop_assert!((det.re - x.norm_sq()).abs() <= 1e-10 * scale);
        prop_assert!(det.im.abs() <= 1e-10 * scale);
    }

    #[test]
    fn embedding_preserves_adjoint(x in quat()) {
        let lhs = embed_scalar(x.conjugate());
        let rhs = embed_scalar(x).adjoint();
        prop_assert!(mat2_norm(&(lhs - rhs)) == 0.0);
    }

    #[test]
    fn quaternion_norm_is_multiplicative(x in quat(), y in quat()) {
        let lhs = (x * y).norm();
        let rhs = x.norm() * y.norm();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * f64::max(1.0, rhs));
    }

    #[test]
    fn levy_never_exceeds_kolmogorov(
        xs in prop::collection::vec(-5.0f64..5.0, 1..20),
        ys in prop::collection::vec(-5.0f64..5.0, 1..20),
    ) {
        let f = StepCdf::new(xs);
        let g = StepCdf::new(ys);
        let ks = kolmogorov_distance(&f, &g);
        let l = levy_distance(&f, &g);
        prop_assert!(l <= ks + 1e-6, "levy {} > ks {}", l, ks);
    }

    #[test]
    fn step_cdf_is_monotone_in_unit_interval(
        xs in prop::collection::vec(-5.0f64..5.0, 1..30),
        probe in prop::collection::vec(-6.0f64..6.0, 2..10),
    ) {
        let f = StepCdf::new(xs);
        let mut sorted = probe.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = 0.0;
        for &x in &sorted {
            let v = f.eval(x);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(f.eval_left(x) <= v);
            prop_assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn mp_cdf_is_monotone(y in 0.05f64..4.0, sigma2 in 0.2f64..3.0, t in 0.0f64..1.0) {
        let law = MPLaw::new(y, sigma2).unwrap();
        let x1 = law.a + t * (law.b - law.a);
        let x2 = x1 + 0.1 * (law.b - law.a);
        prop_assert!(law.cdf(x2) + 1e-9 >= law.cdf(x1));
        prop_assert!(law.cdf(law.b) <= 1.0 + 1e-8);
    }

    #[test]
    fn eigenvalues_come_in_kramers_pairs(p in 1usize..6, n in 1usize..6, seed in 0u64..1000) {
        let x = sample_matrix(p, n, &EntryDistribution::Gaussian { sigma2: 1.0 }, seed).unwrap();
        let s = spectral_sample(&x, seed, "gaussian").unwrap();
        prop_assert_eq!(s.eigenvalues.len(), 2 * p);
        prop_assert!(s.pairing_gap() <= 1e-8 * f64::max(1.0, s.lambda_max()));
        prop_assert!(s.eigenvalues[0] >= -1e-10 * f64::max(1.0, s.lambda_max()));
    }

    #[test]
    fn truncation_bounds_every_entry(p in 1usize..5, n in 1usize..5, seed in 0u64..1000) {
        let dist = EntryDistribution::StudentT { df: 3.0, sigma2: 1.0 };
        let x = sample_matrix(p, n, &dist, seed).unwrap();
        let (truncated, _, _) = preprocess_entries(&x, &dist, 0.5, seed).unwrap();
        for q in truncated.matrix.entries() {
            prop_assert!(q.norm() <= truncated.threshold + 1e-12);
        }
    }

    #[test]
    fn seed_derivation_is_injective_on_small_streams(seed in any::<u64>()) {
        let mut seen = std::collections::HashSet::new();
        for stream in 0u64..64 {
            prop_assert!(seen.insert(derive_seed(seed, stream)));
        }
    }
}
