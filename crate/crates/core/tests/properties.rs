//! Invariants of the homogenization chain as randomized properties.

use proptest::prelude::*;

use gradhom_core::discrepancy::{is_negative_definite, Discrepancy, IsotropicDiscrepancy, OrthotropicDiscrepancy};
use gradhom_core::geometry::{rve_inertia_decomposition, Microstructure, Phase, Shape, DEFAULT_DILUTE_THRESHOLD};
use gradhom_core::homogenization::{
    analyze, assemble_from_params, effective_grad_tensor, extract_ortho_params, spherical_case, Model, NonlocalParams,
};
use gradhom_core::tensor::{desymmetrize, is_positive_definite, symmetrize, Dense, Rotate};
use gradhom_core::{Dim, ElasticTensor, GradElasticTensor, Lame, OrthogonalTransform, SymMatrix};

fn dim_of(three: bool) -> Dim {
    if three {
        Dim::Three
    } else {
        Dim::Two
    }
}

fn elastic(dim: Dim, vals: &[f64]) -> ElasticTensor {
    let mut it = vals.iter().cycle();
    ElasticTensor::projected(&Dense::<4>::from_fn(dim, |_| *it.next().unwrap()))
}

/// `R R^T + eps I` from a flat list of entries.
fn inertia(dim: Dim, vals: &[f64]) -> SymMatrix {
    let n = dim.n();
    let rows: Vec<f64> = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            let dot: f64 = (0..n).map(|k| vals[i * n + k] * vals[j * n + k]).sum();
            dot + if i == j { 0.01 } else { 0.0 }
        })
        .collect();
    SymMatrix::new(dim, &rows).unwrap()
}

fn rel(diff: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn linear_in_fraction(three in any::<bool>(), c in entries(81), b in entries(9), f in 1e-4f64..0.05, s in 0.1f64..10.0) {
        let dim = dim_of(three);
        let (c, b) = (elastic(dim, &c), inertia(dim, &b));
        let a1 = effective_grad_tensor(&c, &b, f).unwrap().scaled(s);
        let a2 = effective_grad_tensor(&c, &b, s * f).unwrap();
        prop_assert!(rel(a1.max_abs_diff(&a2), a1.dense().max_abs()) <= 1e-14);
    }

    #[test]
    fn spherical_reduction(three in any::<bool>(), lambda in -3.0f64..3.0, mu in -3.0f64..3.0, rho in 0.01f64..2.0, f in 1e-6f64..0.05) {
        let dim = dim_of(three);
        let c = IsotropicDiscrepancy::new(lambda, mu, dim).to_tensor();
        let a = effective_grad_tensor(&c, &SymMatrix::scalar(dim, rho * rho), f).unwrap();
        let s = spherical_case(&c, rho, f).unwrap();
        prop_assert!(rel(a.max_abs_diff(&s), s.dense().max_abs()) <= 1e-12);
    }

    #[test]
    fn rotation_equivariance(three in any::<bool>(), c in entries(81), b in entries(9), seed in any::<u64>()) {
        use rand::SeedableRng;
        let dim = dim_of(three);
        let (c, b) = (elastic(dim, &c), inertia(dim, &b));
        let q = OrthogonalTransform::random(dim, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let rotated_inputs = effective_grad_tensor(&c.rotate(&q).unwrap(), &b.rotate(&q).unwrap(), 0.02).unwrap();
        let rotated_output = effective_grad_tensor(&c, &b, 0.02).unwrap().rotate(&q).unwrap();
        prop_assert!(rel(rotated_inputs.max_abs_diff(&rotated_output), rotated_output.dense().max_abs()) <= 1e-12);
    }

    #[test]
    fn mindlin_symmetries_hold(three in any::<bool>(), c in entries(81), b in entries(9)) {
        let dim = dim_of(three);
        let a = effective_grad_tensor(&elastic(dim, &c), &inertia(dim, &b), 0.03).unwrap();
        for idx in gradhom_core::tensor::indices::<6>(dim) {
            let [i, j, h, l, m, k] = idx;
            let v = a.get(idx);
            prop_assert_eq!(v, a.get([l, m, k, i, j, h]));
            prop_assert_eq!(v, a.get([j, i, h, l, m, k]));
            prop_assert_eq!(v, a.get([i, j, h, m, l, k]));
        }
    }

    #[test]
    fn symmetrize_inverts_desymmetrize(three in any::<bool>(), vals in entries(64)) {
        let dim = dim_of(three);
        let mut it = vals.iter().cycle();
        let a = GradElasticTensor::projected(&Dense::<6>::from_fn(dim, |_| *it.next().unwrap()));
        let back = symmetrize(&desymmetrize(&a)).unwrap();
        prop_assert!(rel(a.max_abs_diff(&back), a.dense().max_abs()) <= 1e-13);
    }

    #[test]
    fn definiteness_law_isotropic(three in any::<bool>(), lambda in -3.0f64..3.0, mu in -3.0f64..3.0, radii in prop::collection::vec(0.05f64..1.0, 3)) {
        let dim = dim_of(three);
        let iso = IsotropicDiscrepancy::new(lambda, mu, dim);
        // Stay clear of the semidefinite boundary.
        prop_assume!(iso.bulk().abs() > 1e-6 && mu.abs() > 1e-6);
        let b = SymMatrix::diagonal(&radii[..dim.n()]).unwrap();
        let a = effective_grad_tensor(&iso.to_tensor(), &b, 0.02).unwrap();
        prop_assert_eq!(is_positive_definite(&a).positive_definite, iso.bulk() < 0.0 && mu < 0.0);
    }

    #[test]
    fn definiteness_law_orthotropic(p in prop::collection::vec(-2.0f64..2.0, 4), angle in 0.0f64..3.2, b in entries(4)) {
        let d = Discrepancy::Orthotropic(OrthotropicDiscrepancy {
            lambda: p[0],
            mu: p[1],
            xi: p[2],
            omega: p[3],
            axes: OrthogonalTransform::rotation_2d(angle),
        });
        let nd = is_negative_definite(&d);
        let scale = nd.min_eigenvalue.abs().max(nd.max_eigenvalue.abs());
        prop_assume!(nd.max_eigenvalue.abs() > 1e-6 * scale && nd.min_eigenvalue.abs() > 1e-6 * scale);
        let a = effective_grad_tensor(&d.to_full_tensor(), &inertia(Dim::Two, &b), 0.02).unwrap();
        prop_assert_eq!(is_positive_definite(&a).positive_definite, nd.negative_definite);
    }

    #[test]
    fn extraction_recovers_assembled_params(p in prop::collection::vec(-1.0f64..1.0, 8), angle in 0.0f64..3.2) {
        let axes = OrthogonalTransform::rotation_2d(angle);
        let mut params = NonlocalParams::zeros(axes.clone());
        params.a2 = vec![p[0], p[1]];
        params.a4 = vec![p[2], p[3]];
        params.a5 = vec![p[4], p[5]];
        params.a6 = Some(p[6]);
        params.a9 = Some(p[7]);
        let ex = extract_ortho_params(&assemble_from_params(&params), &axes).unwrap();
        prop_assert!(ex.structural);
        prop_assert!(ex.params.relative_difference(&params) <= 1e-10);
    }

    #[test]
    fn isotropic_diagonal_is_structural(three in any::<bool>(), lambda in -3.0f64..3.0, mu in -3.0f64..3.0, radii in prop::collection::vec(0.05f64..1.0, 3), f in 1e-4f64..0.05) {
        let dim = dim_of(three);
        let r2 = &radii[..dim.n()];
        let a = effective_grad_tensor(&IsotropicDiscrepancy::new(lambda, mu, dim).to_tensor(), &SymMatrix::diagonal(r2).unwrap(), f).unwrap();
        let ex = extract_ortho_params(&a, &OrthogonalTransform::identity(dim)).unwrap();
        prop_assert!(ex.structural);
        let want = NonlocalParams::from_moduli(OrthogonalTransform::identity(dim), f, r2, lambda, mu, None);
        prop_assert!(ex.params.relative_difference(&want) <= 1e-10);
    }

    #[test]
    fn sum_rule(h1 in 0.5f64..2.0, h2 in 0.5f64..2.0, b1 in 0.01f64..0.2, ratio in 0.1f64..1.0, angle in 0.0f64..3.2) {
        let inc = Shape::ellipse(b1, ratio * b1).unwrap().rotated(&OrthogonalTransform::rotation_2d(angle)).unwrap();
        let m = Microstructure::new(Shape::rectangle(h1, h2).unwrap(), inc, Lame::new(1.0, 1.0), Phase::Void, None, DEFAULT_DILUTE_THRESHOLD).unwrap();
        prop_assert!(rve_inertia_decomposition(&m).unwrap().sum_rule_residual() <= 1e-15);
    }

    #[test]
    fn length_scaling(c in 0.2f64..5.0, ratio in 0.05f64..1.0, nu in -0.5f64..0.45) {
        let build = |len: f64| {
            let m = Microstructure::new(
                Shape::square(len).unwrap(),
                Shape::ellipse(0.1 * len, 0.1 * ratio * len).unwrap(),
                Lame::from_poisson_shear(nu, 1.0),
                Phase::Void,
                None,
                DEFAULT_DILUTE_THRESHOLD,
            ).unwrap();
            analyze(&m, &Model::Catalog { erratum_sign: false }).unwrap()
        };
        let (base, long) = (build(1.0), build(c));
        prop_assert!(base.params().scaled(c * c).relative_difference(long.params()) <= 1e-12);
        prop_assert!(rel(base.ctilde.max_abs_diff(&long.ctilde), base.ctilde.dense().max_abs()) <= 1e-12);
    }
}
