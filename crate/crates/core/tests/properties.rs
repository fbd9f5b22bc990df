use std::sync::Arc;

use oapoly::algebra::{GroupAlgebra, SharedAlgebra};
use oapoly::circle::{convolve_t, TrigPoly};
use oapoly::fourier::{convolve, fourier, AlgElement};
use oapoly::group::{builtin_by_name, BUILTIN_NAMES};
use oapoly::pnorms::{sn_bound, NormContext};
use oapoly::polynomials::polarize;
use oapoly::represent::{prototypical, LinearMap};
use oapoly::rng::{complex_normal_vec, seeded};
use oapoly::Complex64;
use proptest::prelude::*;

fn group_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(BUILTIN_NAMES.to_vec())
}

fn scale(v: f64) -> f64 {
    v.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_is_associative(name in group_name(), seed in any::<u64>()) {
        let (g, _) = builtin_by_name(name).unwrap();
        let mut rng = seeded(seed);
        let [a, b, c] = [(); 3].map(|_| AlgElement::random(&g, &mut rng));
        let left = convolve(&convolve(&a, &b).unwrap(), &c).unwrap();
        let right = convolve(&a, &convolve(&b, &c).unwrap()).unwrap();
        prop_assert!((&left - &right).max_abs() <= 1e-12 * scale(left.max_abs()));
    }

    #[test]
    fn fourier_reverses_products(name in group_name(), seed in any::<u64>()) {
        let (g, r) = builtin_by_name(name).unwrap();
        let mut rng = seeded(seed);
        let f = AlgElement::random(&g, &mut rng);
        let h = AlgElement::random(&g, &mut rng);
        let lhs = fourier(&convolve(&f, &h).unwrap(), &r).unwrap();
        let rhs = fourier(&h, &r).unwrap().block_product(&fourier(&f, &r).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn l1_norm_is_submultiplicative(name in group_name(), seed in any::<u64>()) {
        let (g, _) = builtin_by_name(name).unwrap();
        let mut rng = seeded(seed);
        let f = AlgElement::random(&g, &mut rng);
        let h = AlgElement::random(&g, &mut rng);
        let prod = convolve(&f, &h).unwrap().l1_norm();
        prop_assert!(prod <= f.l1_norm() * h.l1_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn prototypical_is_homogeneous_and_polarizes(
        name in prop::sample::select(vec!["z4", "s3", "q8"]),
        n in 2usize..=3,
        seed in any::<u64>(),
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
    ) {
        let (g, _) = builtin_by_name(name).unwrap();
        let alg: SharedAlgebra = Arc::new(GroupAlgebra::new(g));
        let mut rng = seeded(seed);
        let phi0 = LinearMap::random(&mut rng, alg.descriptor(), 1);
        let p = prototypical(Arc::clone(&alg), n, &phi0).unwrap();
        let x = complex_normal_vec(&mut rng, alg.dim());
        let lambda = Complex64::new(re, im);
        let lx: Vec<Complex64> = x.iter().map(|v| v * lambda).collect();
        let expected = p.eval(&x)[0] * lambda.powu(n as u32);
        let got = p.eval(&lx)[0];
        prop_assert!((got - expected).norm() <= 1e-9 * scale(expected.norm()));

        let phi = polarize(&p).unwrap();
        let args: Vec<&[Complex64]> = vec![&x; n];
        let diag = phi.eval(&args)[0];
        let direct = p.eval(&x)[0];
        prop_assert!((diag - direct).norm() <= 1e-9 * scale(direct.norm()));
    }

    #[test]
    fn sn_bound_scales_linearly(seed in any::<u64>(), t in 0.01f64..100.0) {
        let (g, _) = builtin_by_name("d4").unwrap();
        let a = AlgElement::random(&g, &mut seeded(seed));
        let ctx = NormContext::l1();
        let base = sn_bound(&a, 3, &ctx).unwrap();
        let scaled = sn_bound(&a.scale(Complex64::new(t, 0.0)), 3, &ctx).unwrap();
        prop_assert!((scaled.upper - t * base.upper).abs() <= 1e-12 * scale(t * base.upper));
    }

    #[test]
    fn trig_convolution_multiplies_coefficients(
        cap in 0usize..12,
        seed in any::<u64>(),
    ) {
        let mut rng = seeded(seed);
        let f = TrigPoly::from_dense(cap, complex_normal_vec(&mut rng, 2 * cap + 1)).unwrap();
        let h = TrigPoly::from_dense(cap, complex_normal_vec(&mut rng, 2 * cap + 1)).unwrap();
        let fh = convolve_t(&f, &h);
        for k in -(cap as i64)..=(cap as i64) {
            prop_assert_eq!(fh.coeff(k), f.coeff(k) * h.coeff(k));
        }
    }
}
