use proptest::prelude::*;
use zonobal::lp::{solve_inf_norm_min, LpStatus};
use zonobal::numerics::{dot, Matrix, Rng};

fn instance(seed: u64, m: usize, d: usize) -> (Matrix, Vec<f64>) {
    let mut rng = Rng::new(seed);
    let b = Matrix::from_vec(m, d, rng.gaussian_vector(m * d)).unwrap();
    let z = rng.gaussian_vector(d);
    (b, z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn value_scales_with_target(seed in any::<u64>(), d in 1usize..6, extra in 0usize..12, alpha in -50.0f64..50.0) {
        let (b, z) = instance(seed, d + extra, d);
        let base = solve_inf_norm_min(&b, &z).unwrap();
        prop_assert_eq!(base.status, LpStatus::Optimal);
        let scaled: Vec<f64> = z.iter().map(|v| alpha * v).collect();
        let s = solve_inf_norm_min(&b, &scaled).unwrap();
        prop_assert!((s.value - alpha.abs() * base.value).abs() <= 1e-8 * (1.0 + alpha.abs() * base.value));
    }

    #[test]
    fn value_dominates_support_ratios(seed in any::<u64>(), d in 1usize..6, extra in 0usize..12) {
        let (b, z) = instance(seed, d + extra, d);
        let sol = solve_inf_norm_min(&b, &z).unwrap();
        let mut rng = Rng::new(seed ^ 0xabc);
        for _ in 0..100 {
            let theta = rng.gaussian_vector(d);
            let h: f64 = b.row_iter().map(|r| dot(r, &theta).abs()).sum();
            if h > 0.0 {
                prop_assert!(sol.value >= dot(&theta, &z) / h - 1e-9 * (1.0 + sol.value));
            }
        }
        // the solution reproduces the target
        let back = b.tr_mul_vec(&sol.y);
        for (a, c) in back.iter().zip(&z) {
            prop_assert!((a - c).abs() <= 1e-8 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn more_generators_never_hurt(seed in any::<u64>(), d in 1usize..6, extra in 0usize..8, added in 1usize..6) {
        let (b, z) = instance(seed, d + extra, d);
        let more = b.vstack(&Matrix::from_vec(added, d, Rng::new(!seed).gaussian_vector(added * d)).unwrap()).unwrap();
        let v0 = solve_inf_norm_min(&b, &z).unwrap().value;
        let v1 = solve_inf_norm_min(&more, &z).unwrap().value;
        prop_assert!(v1 <= v0 * (1.0 + 1e-9) + 1e-12);
    }
}
