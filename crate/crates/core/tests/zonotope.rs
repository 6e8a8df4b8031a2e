use proptest::prelude::*;
use zonobal::numerics::{dot, norm2, Matrix, Rng};
use zonobal::zonotope::{
    lewis_weights, lewis_weights_from, normalize, random_normalized_zonotope, regularity_report,
    Zonotope,
};
use zonobal::Tolerances;

fn gaussian_zonotope(seed: u64, m: usize, d: usize) -> Zonotope {
    let a = Matrix::from_vec(m, d, Rng::new(seed).gaussian_vector(m * d)).unwrap();
    Zonotope::new(a, 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_dominates_probe_ratios(seed in any::<u64>(), d in 1usize..6, extra in 0usize..10) {
        let k = gaussian_zonotope(seed, d + extra, d);
        let mut rng = Rng::new(seed ^ 7);
        let x = rng.gaussian_vector(d);
        let norm = k.norm(&x).unwrap();
        for _ in 0..200 {
            let theta = rng.unit_vector(d);
            let ratio = dot(&theta, &x) / k.support(&theta);
            prop_assert!(norm >= ratio - 1e-7 * (1.0 + norm));
        }
    }

    // A planar zonotope's facet normals are the generators turned by 90
    // degrees, and the gauge is the largest ratio over facet normals.
    #[test]
    fn planar_facet_normals_give_gauge(seed in any::<u64>(), extra in 0usize..10) {
        let k = gaussian_zonotope(seed, 2 + extra, 2);
        let x = Rng::new(seed ^ 11).gaussian_vector(2);
        let norm = k.norm(&x).unwrap();
        let best = k
            .generators()
            .row_iter()
            .flat_map(|a| [[-a[1], a[0]], [a[1], -a[0]]])
            .map(|theta| dot(&theta, &x) / k.support(&theta))
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((best - norm).abs() <= 1e-9 * (1.0 + norm), "facet ratio {best} vs gauge {norm}");
    }

    #[test]
    fn normalized_body_sits_in_ball(seed in any::<u64>(), d in 1usize..7, factor in 1usize..6) {
        let mut rng = Rng::new(seed);
        let Ok(k) = random_normalized_zonotope(d, d * factor, &mut rng) else {
            return Ok(());
        };
        let root_d = (d as f64).sqrt();
        for _ in 0..1000 {
            let y: Vec<f64> = (0..k.segments()).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            prop_assert!(norm2(&k.point(&y)) <= root_d + 1e-7);
        }
    }

    #[test]
    fn normalization_sandwich(seed in any::<u64>(), d in 1usize..5, extra in 0usize..20) {
        let k = gaussian_zonotope(seed, d + extra, d);
        let norm = normalize(&k, &Tolerances::default()).unwrap();
        let kt = &norm.k_tilde;
        prop_assert!(regularity_report(kt.generators(), kt.scale()).is_regular);
        let mut rng = Rng::new(seed ^ 3);
        for _ in 0..1000 {
            let theta = rng.unit_vector(d);
            let inner = norm.mapped_support(&k, &theta);
            let outer = kt.support(&theta);
            prop_assert!(0.8 * outer <= inner * (1.0 + 1e-7));
            prop_assert!(inner <= outer * (1.0 + 1e-7));
        }
    }

    #[test]
    fn lewis_trace_and_uniqueness(seed in any::<u64>(), d in 1usize..8, extra in 0usize..40) {
        let m = d + extra;
        let a = Matrix::from_vec(m, d, Rng::new(seed).gaussian_vector(m * d)).unwrap();
        let w = lewis_weights(&a, 1e-12).unwrap();
        prop_assert!((w.w_bar.iter().sum::<f64>() - d as f64).abs() <= 1e-6);
        let init: Vec<f64> = (0..m).map(|i| 0.1 + (i % 7) as f64).collect();
        let w2 = lewis_weights_from(&a, &init, 1e-12).unwrap();
        for (p, q) in w.w_bar.iter().zip(&w2.w_bar) {
            prop_assert!((p - q).abs() <= 1e-6);
        }
    }

    #[test]
    fn text_round_trip(seed in any::<u64>(), d in 1usize..5, extra in 0usize..6, s in 0.01f64..10.0) {
        let k = gaussian_zonotope(seed, d + extra, d);
        let k = Zonotope::new(k.generators().clone(), s).unwrap();
        let back = Zonotope::from_text(&k.to_text()).unwrap();
        prop_assert_eq!(back, k);
    }
}
