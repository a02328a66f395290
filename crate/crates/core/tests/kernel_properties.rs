use std::sync::Arc;

use proptest::prelude::*;
use statfem::kernels::{gram, kernel_sum, Kernel, Matern, MaternParams};

fn matern_params() -> impl Strategy<Value = MaternParams> {
    (0usize..8, 0.05f64..5.0, 0.01f64..200.0)
        .prop_map(|(p, l, v)| MaternParams::new(p as f64 + 0.5, l, v).unwrap())
}

proptest! {
    #[test]
    fn matern_is_symmetric_and_bounded(params in matern_params(), x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let k = Matern::new(params, 1).unwrap();
        let (a, b) = (k.eval1(x, y), k.eval1(y, x));
        prop_assert_eq!(a, b);
        prop_assert!(a > 0.0);
        prop_assert!(a <= params.variance * (1.0 + 1e-12));
        prop_assert!((k.eval1(x, x) - params.variance).abs() <= 1e-12 * params.variance);
    }

    #[test]
    fn matern_decreases_with_distance(params in matern_params(), r in 0.0f64..3.0, dr in 1e-3f64..1.0) {
        let k = Matern::new(params, 1).unwrap();
        prop_assert!(k.eval_distance(r + dr) <= k.eval_distance(r));
    }

    #[test]
    fn gram_of_sum_is_sum_of_grams(
        p1 in matern_params(),
        p2 in matern_params(),
        xs in prop::collection::vec(0.0f64..1.0, 1..12),
    ) {
        let a: Arc<dyn Kernel> = Arc::new(Matern::new(p1, 1).unwrap());
        let b: Arc<dyn Kernel> = Arc::new(Matern::new(p2, 1).unwrap());
        let s = kernel_sum(a.clone(), b.clone()).unwrap();
        let pts: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        let gs = gram(&s, &pts).unwrap().entries;
        let ga = gram(a.as_ref(), &pts).unwrap().entries;
        let gb = gram(b.as_ref(), &pts).unwrap().entries;
        let diff = (&gs - (&ga + &gb)).abs().max();
        prop_assert!(diff <= 1e-12 * (p1.variance + p2.variance));
    }

    #[test]
    fn matern_gram_is_psd(params in matern_params(), xs in prop::collection::vec(0.0f64..1.0, 1..25)) {
        let k = Matern::new(params, 1).unwrap();
        let pts: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        let g = gram(&k, &pts).unwrap();
        prop_assert!(g.min_eigenvalue() >= -1e-8 * params.variance);
    }

    #[test]
    fn non_half_integer_smoothness_is_unsupported(nu in 0.0f64..10.0) {
        prop_assume!(((nu - 0.5) - (nu - 0.5).round()).abs() > 1e-9);
        prop_assert!(MaternParams::new(nu, 1.0, 1.0).is_err());
    }
}

#[test]
fn multivariate_gram_is_symmetric() {
    let k = Matern::new(MaternParams::new(1.5, 0.7, 2.0).unwrap(), 3).unwrap();
    let pts = [[0.1, 0.2, 0.3], [0.9, 0.1, 0.4], [0.5, 0.5, 0.5]];
    let g = gram(&k, &pts).unwrap();
    assert_eq!(g.entries, g.entries.transpose());
    assert!(g.is_psd());
}

#[test]
fn duplicate_points_are_reported() {
    let k = Matern::new_1d(0.5, 1.0, 1.0).unwrap();
    let g = gram(&k, &[[0.3], [0.3], [0.6]]).unwrap();
    assert_eq!(g.duplicate_pairs, vec![(0, 1)]);
    assert!(g.is_psd());
}
