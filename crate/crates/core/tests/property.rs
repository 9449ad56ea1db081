//! Property tests for the structural invariants: partition identities,
//! weight algebra laws, operator group laws, and quadrature homogeneity.

use num_complex::Complex64;
use proptest::prelude::*;

use modscale::function::{dilate_l1, synthesize, SyntheticKind};
use modscale::norms::lp_norm_field;
use modscale::partition::{FrequencyCell, PartitionOfUnity};
use modscale::util::{japanese_bracket_vec, pow2};
use modscale::weights::VectorWeight;
use modscale::GridSpec;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn partition_translates_sum_to_one(xi in -60.0f64..60.0) {
        let pou = PartitionOfUnity::new(1).unwrap();
        let k0 = xi.floor() as i64;
        let sum: f64 = (k0 - 1..=k0 + 1).map(|k| pou.psi1(xi - k as f64)).sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn window_even_and_bounded(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let pou = PartitionOfUnity::new(2).unwrap();
        let v = pou.psi(&[x, y]);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v, pou.psi(&[-x, -y]));
    }

    #[test]
    fn cell_evaluation_rescales(j in -6i64..6, k in -20i64..20, xi in -100.0f64..100.0) {
        let pou = PartitionOfUnity::new(1).unwrap();
        let scaled = pou.eval_cell(&FrequencyCell::new(j, vec![k]), &[xi]);
        let unit = pou.eval_cell(&FrequencyCell::new(0, vec![k]), &[xi * pow2(-j)]);
        prop_assert!((scaled - unit).abs() <= 1e-15);
    }

    #[test]
    fn bracket_dominates(x in -500.0f64..500.0, y in -500.0f64..500.0) {
        let b = japanese_bracket_vec(&[x, y]);
        prop_assert!(b >= 1.0);
        prop_assert!(b >= x.abs().max(y.abs()));
    }

    #[test]
    fn weight_shift_group_action(
        bp in -2.0f64..2.0,
        bm in -2.0f64..2.0,
        m in -6i64..6,
        n in -6i64..6,
        j in -8i64..8,
    ) {
        let w = VectorWeight::power(1.0, bp, bm).unwrap();
        let left = w.shifted(m).shifted(n).value(j).unwrap();
        let right = w.shifted(m + n).value(j).unwrap();
        prop_assert!((left - right).abs() <= 1e-12 * right.abs().max(1e-12));
    }

    #[test]
    fn multiplicative_weights_are_powers(beta in -1.5f64..1.5, i in -8i64..8, j in -8i64..8) {
        let w = VectorWeight::power(1.0, beta, beta).unwrap();
        prop_assert!(w.is_multiplicative());
        let lhs = w.value(i + j).unwrap();
        let rhs = w.value(i).unwrap() * w.value(j).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
    }

    #[test]
    fn l1_dilation_group_law(i in -5i64..5, j in -5i64..5, xi in -3.0f64..3.0) {
        let f = synthesize(SyntheticKind::Gaussian, 1).unwrap();
        let composed = dilate_l1(&dilate_l1(&f, i), j);
        let direct = dilate_l1(&f, i + j);
        prop_assert!((composed.eval(&[xi]) - direct.eval(&[xi])).norm() <= 1e-15);
    }
}

proptest! {
    // Transform-heavy properties get fewer cases.
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lp_norm_absolutely_homogeneous(re in -3.0f64..3.0, im in -3.0f64..3.0, seed in 0u64..50) {
        let grid = GridSpec::new(1, 3, 3).unwrap();
        let f = synthesize(
            SyntheticKind::RandomBandlimited {
                seed,
                box_region: modscale::BoxRegion::cube(1, -4.0, 4.0),
            },
            1,
        )
        .unwrap();
        let c = Complex64::new(re, im);
        let base = lp_norm_field(&f.sample(&grid).unwrap(), 3.0).unwrap();
        let scaled = lp_norm_field(&f.scale(c).sample(&grid).unwrap(), 3.0).unwrap();
        prop_assert!((scaled - c.norm() * base).abs() <= 1e-12 * (1.0 + base));
    }

    #[test]
    fn plancherel_on_random_fields(seed in 0u64..50) {
        let grid = GridSpec::new(1, 4, 3).unwrap();
        let f = synthesize(
            SyntheticKind::RandomBandlimited {
                seed,
                box_region: modscale::BoxRegion::cube(1, -6.0, 6.0),
            },
            1,
        )
        .unwrap();
        let field = f.sample(&grid).unwrap();
        let l2 = lp_norm_field(&field, 2.0).unwrap();
        let freq: f64 = field.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * grid.dxi();
        prop_assert!((l2 * l2 - freq).abs() <= 1e-12 * freq.max(1e-30));
    }

    #[test]
    fn snapshot_roundtrip_random(seed in 0u64..50) {
        let grid = GridSpec::new(1, 3, 2).unwrap();
        let f = synthesize(
            SyntheticKind::RandomBandlimited {
                seed,
                box_region: modscale::BoxRegion::cube(1, -3.0, 3.0),
            },
            1,
        )
        .unwrap();
        let field = f.sample(&grid).unwrap();
        let mut buf = Vec::new();
        modscale::snapshot::write_field(&mut buf, &field).unwrap();
        let back = modscale::snapshot::read_field(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back.values, field.values);
    }
}
