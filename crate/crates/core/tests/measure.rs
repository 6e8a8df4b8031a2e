use proptest::prelude::*;
use zonobal::measure::{comparison_check, estimate_section_measure, strip_chain, strip_grid};
use zonobal::numerics::{orthonormalize, Matrix, Rng};
use zonobal::zonotope::random_normalized_zonotope;
use zonobal::Tolerances;

#[test]
fn chain_holds_on_grid() {
    for c in strip_grid() {
        let chain = strip_chain(c.a_norm, c.t);
        assert!(chain.holds, "{chain:?}");
        assert!((chain.links[0] - c.lhs).abs() < 1e-15 && (chain.links[3] - c.rhs).abs() < 1e-15);
    }
}

#[test]
fn estimates_grow_with_t() {
    let mut rng = Rng::new(12);
    let k = random_normalized_zonotope(4, 16, &mut rng).unwrap();
    let h = orthonormalize(
        &Matrix::from_vec(4, 2, rng.gaussian_vector(8)).unwrap(),
        &Tolerances::default(),
    )
    .unwrap();
    let mut prev: Option<zonobal::measure::MeasureEstimate> = None;
    for t in [1.0, 1.25, 1.5, 2.0, 3.0] {
        // small C so that the measure is far from saturated
        let e = estimate_section_measure(&k, &h, t, 0.3, 20_000, &Rng::new(40)).unwrap();
        if let Some(p) = prev {
            assert!(
                e.p_hat >= p.p_hat - (e.ci_radius + p.ci_radius),
                "t = {t}: {e:?} after {p:?}"
            );
        }
        prev = Some(e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ordered_covariances_ordered_mass(seed in any::<u64>(), d in 1usize..4) {
        let mut rng = Rng::new(seed);
        let k = random_normalized_zonotope(d, 3 * d, &mut rng).unwrap();
        let ga = Matrix::from_vec(d, d, rng.gaussian_vector(d * d)).unwrap();
        let gb = Matrix::from_vec(d, d, rng.gaussian_vector(d * d)).unwrap();
        let a = ga.gram().scaled(0.2);
        let b = Matrix::from_vec(d, d, (0..d * d).map(|i| a.as_slice()[i] + 0.2 * gb.gram().as_slice()[i]).collect()).unwrap();
        let c = comparison_check(&k, &a, &b, 20_000, &Rng::new(seed ^ 1)).unwrap();
        prop_assert!(c.ordered(), "{c:?}");
    }
}
