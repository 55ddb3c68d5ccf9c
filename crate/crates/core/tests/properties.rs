//! Randomized invariants of fields, operators and the energy.

use fraclat::model::{Nonlinearity, Potential, SiteFunction};
use fraclat::nehari::{nehari_scale, project_m, unproject};
use fraclat::spectral::{apply_kernel, halpha_inner, FractionalOrder, Kernel, Multiplier};
use fraclat::{Boundary, Field, LatticeGeometry, Model, SpectralConfig};
use proptest::prelude::*;

fn geometry(dim: usize, radius: usize, periodic: bool) -> LatticeGeometry {
    let b = if periodic {
        Boundary::PeriodicWrap
    } else {
        Boundary::ZeroExtended
    };
    LatticeGeometry::new(dim, radius, b).unwrap()
}

/// A geometry together with values for one field on it.
fn field_strategy(periodic: bool) -> impl Strategy<Value = Field<f64>> {
    (1usize..=2, 1usize..=5).prop_flat_map(move |(d, l)| {
        let geom = geometry(d, l, periodic);
        let n = geom.len();
        prop::collection::vec(-1.0f64..1.0, n)
            .prop_filter("nonzero", |v| v.iter().any(|x| *x != 0.0))
            .prop_map(move |v| Field::from_values(&geom, v).unwrap())
    })
}

fn pair_strategy() -> impl Strategy<Value = (Field<f64>, Field<f64>)> {
    (1usize..=2, 1usize..=5).prop_flat_map(|(d, l)| {
        let geom = geometry(d, l, true);
        let n = geom.len();
        (
            prop::collection::vec(-1.0f64..1.0, n),
            prop::collection::vec(-1.0f64..1.0, n),
        )
            .prop_map(move |(a, b)| {
                (
                    Field::from_values(&geom, a).unwrap(),
                    Field::from_values(&geom, b).unwrap(),
                )
            })
    })
}

fn order(a: f64) -> FractionalOrder<f64> {
    FractionalOrder::new(a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lp_norms_decrease_in_the_exponent(u in field_strategy(false)) {
        let exps = [2.0, 2.5, 3.0, 4.0, 8.0, f64::INFINITY];
        for w in exps.windows(2) {
            let (lo, hi) = (u.norm(w[0]).unwrap(), u.norm(w[1]).unwrap());
            prop_assert!(hi <= lo * (1.0 + 1e-14));
        }
    }

    #[test]
    fn interpolation_inequality_holds(u in field_strategy(false), q in 2.01f64..10.0) {
        let (lhs, rhs) = u.interpolation_check(q).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-14));
    }

    #[test]
    fn periodic_shift_is_invertible(u in field_strategy(true), y in -20i64..20) {
        let offset = vec![y; u.geom().dim()];
        let back: Vec<i64> = offset.iter().map(|c| -c).collect();
        prop_assert_eq!(u.shift(&offset).shift(&back), u.clone());
        prop_assert_eq!(u.norm(3.0).unwrap().to_bits(), u.norm(3.0).unwrap().to_bits());
    }

    #[test]
    fn periodic_operator_is_self_adjoint_and_bounded(
        (u, v) in pair_strategy(),
        alpha in 0.05f64..=1.0,
    ) {
        let geom = u.geom().clone();
        let kernel = Kernel::periodized(order(alpha), &geom);
        let h = Potential::constant(0.7).unwrap();
        let uv = halpha_inner(&u, &v, &kernel, &h).unwrap();
        let vu = halpha_inner(&v, &u, &kernel, &h).unwrap();
        prop_assert!((uv - vu).abs() <= 1e-12);

        let fast = Multiplier::new(order(alpha), &geom).apply(&u).unwrap();
        let direct = apply_kernel(&u, &kernel).unwrap();
        let gap = (&fast - &direct).norm_sup();
        prop_assert!(gap <= 1e-12);
        let bound = (4.0 * geom.dim() as f64).powf(alpha);
        prop_assert!(fast.norm2() <= bound * u.norm2() * (1.0 + 1e-12));
        let seminorm = fast.dot(&u);
        prop_assert!(seminorm >= -1e-12);
        prop_assert!(seminorm <= bound * u.dot(&u) * (1.0 + 1e-12));
    }

    #[test]
    fn convolution_is_linear((u, v) in pair_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let geom = u.geom().with_boundary(Boundary::ZeroExtended);
        let u = Field::from_values(&geom, u.into_values()).unwrap();
        let v = Field::from_values(&geom, v.into_values()).unwrap();
        let cfg = SpectralConfig::new(128, 6).unwrap();
        let k = fraclat::kernel_table(order(0.6), geom.dim(), &cfg).unwrap();
        let lhs = apply_kernel(&u.scale(a).add_scaled(b, &v), &k).unwrap();
        let rhs = apply_kernel(&u, &k).unwrap().scale(a).add_scaled(b, &apply_kernel(&v, &k).unwrap());
        prop_assert!((&lhs - &rhs).norm_sup() <= 1e-12);
    }

    #[test]
    fn projection_lands_on_the_manifold(u in field_strategy(true), c in 0.01f64..100.0) {
        let m = Model::new(
            u.geom(),
            order(0.5),
            Potential::constant(1.0).unwrap(),
            Nonlinearity::pure_power(3.0).unwrap(),
            &SpectralConfig::default_for(u.geom().dim(), u.geom().radius()),
        ).unwrap();
        let p = project_m(&m, &u).unwrap();
        let norm2 = m.inner(&p, &p).unwrap();
        prop_assert!(m.nehari_residual(&p).unwrap().abs() <= 1e-12 * norm2);
        prop_assert!(m.energy(&p).unwrap() > 0.0);
        // Depends on the ray only, and is odd.
        let scaled = project_m(&m, &u.scale(c)).unwrap();
        prop_assert!(m.norm_alpha(&(&scaled - &p)).unwrap() <= 1e-10 * norm2.sqrt());
        let negated = project_m(&m, &u.scale(-1.0)).unwrap();
        prop_assert!(m.norm_alpha(&(&negated + &p)).unwrap() <= 1e-12 * norm2.sqrt());
        // Scaling is homogeneous of degree -1.
        let s1 = nehari_scale(&m, &u).unwrap();
        let sc = nehari_scale(&m, &u.scale(c)).unwrap();
        prop_assert!((sc * c / s1 - 1.0).abs() <= 1e-12);
        // The normalization inverts the projection.
        let unit = u.scale(m.norm_alpha(&u).unwrap().recip());
        let back = unproject(&m, &p).unwrap();
        prop_assert!(m.norm_alpha(&(&back - &unit)).unwrap() <= 1e-12);
    }
}

#[test]
fn periodic_coefficients_give_shift_invariant_energy() {
    let geom = geometry(2, 4, true);
    let h = SiteFunction::periodic(vec![3, 1], vec![1.0, 2.0, 0.5]).unwrap();
    let a = SiteFunction::periodic(vec![1, 3], vec![1.0, 0.25, 3.0]).unwrap();
    let m = Model::new(
        &geom,
        order(0.7),
        Potential::new(h).unwrap(),
        Nonlinearity::weighted_power(3.5, a).unwrap(),
        &SpectralConfig::default_for(2, 4),
    )
    .unwrap();
    let u = Field::from_fn(&geom, |x| ((x[0] * 3 + x[1]) as f64).sin());
    let e = m.energy(&u).unwrap();
    for y in [[3, 0], [0, 3], [3, 3], [-6, 9]] {
        let shifted = m.energy(&u.shift(&y)).unwrap();
        assert!((shifted - e).abs() <= 1e-12 * e.abs());
    }
    // A shift off the period changes the energy.
    assert!((m.energy(&u.shift(&[1, 0])).unwrap() - e).abs() > 1e-6);
}

#[test]
fn incommensurate_period_is_rejected() {
    let geom = geometry(1, 4, true);
    let h = SiteFunction::periodic(vec![2], vec![1.0, 2.0]).unwrap();
    let built = Model::new(
        &geom,
        order(0.5),
        Potential::new(h).unwrap(),
        Nonlinearity::pure_power(4.0).unwrap(),
        &SpectralConfig::default_for(1, 4),
    );
    assert!(built.is_err());
}

#[test]
fn gradient_matches_richardson_differences() {
    let geom = geometry(2, 3, false);
    let m = Model::new(
        &geom,
        order(0.35),
        Potential::new(SiteFunction::periodic(vec![2, 2], vec![1.0, 2.0, 1.5, 0.5]).unwrap())
            .unwrap(),
        Nonlinearity::pure_power(5.0).unwrap(),
        &SpectralConfig::new(256, 6).unwrap(),
    )
    .unwrap();
    let u = Field::from_fn(&geom, |x| 0.3 * ((x[0] + 2 * x[1]) as f64).cos());
    let v = Field::from_fn(&geom, |x| ((x[0] * x[1]) as f64 + 0.5).sin());
    let exact = m.gradient(&u).unwrap().dot(&v);
    let central = |h: f64| {
        (m.energy(&u.add_scaled(h, &v)).unwrap() - m.energy(&u.add_scaled(-h, &v)).unwrap())
            / (2.0 * h)
    };
    let errs: Vec<f64> = [1e-2, 5e-3]
        .iter()
        .map(|&h| (central(h) - exact).abs())
        .collect();
    // Second order: halving the step quarters the error.
    assert!((errs[0] / errs[1] - 4.0).abs() < 0.1, "{errs:?}");
    let richardson = (4.0 * central(5e-3) - central(1e-2)) / 3.0;
    assert!((richardson - exact).abs() <= 1e-9 * (1.0 + exact.abs()));
}

#[test]
fn single_precision_path_agrees() {
    let geom = geometry(1, 16, true);
    let m32 = Model::<f32>::new(
        &geom,
        FractionalOrder::new(0.5f32).unwrap(),
        Potential::constant(1.0f32).unwrap(),
        Nonlinearity::pure_power(4.0f32).unwrap(),
        &SpectralConfig::default_for(1, 16),
    )
    .unwrap();
    let m64 = Model::<f64>::new(
        &geom,
        order(0.5),
        Potential::constant(1.0).unwrap(),
        Nonlinearity::pure_power(4.0).unwrap(),
        &SpectralConfig::default_for(1, 16),
    )
    .unwrap();
    let u64f = Field::from_fn(&geom, |x| (-(x[0] as f64).powi(2) / 4.0).exp());
    let u32f = Field::from_fn(&geom, |x| (-(x[0] as f32).powi(2) / 4.0).exp());
    let (e32, e64) = (m32.energy(&u32f).unwrap(), m64.energy(&u64f).unwrap());
    assert!(((e32 as f64) - e64).abs() <= 1e-5 * e64.abs());
}
