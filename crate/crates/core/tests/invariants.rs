use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use reslab::algebra::CRational;
use reslab::anomaly::{coboundary_anomaly, hochschild_b, weighted_cochain, CoefficientConvention, Operand, OracleTrace};
use reslab::harness::fixtures::random_symbol;
use reslab::symbol::{compose, ClassicalSymbol, EigenvalueLaw, Weight};

fn sym(seed: u64, order: i64) -> ClassicalSymbol {
    random_symbol(&mut ChaCha8Rng::seed_from_u64(seed), order, 7, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn composition_is_associative(s in any::<u64>(), oa in -1i64..=1, ob in -1i64..=1, oc in -1i64..=1) {
        let (a, b, c) = (sym(s, oa), sym(s ^ 1, ob), sym(s ^ 2, oc));
        let floor = oa + ob + oc - 3;
        let left = compose(&compose(&a, &b, floor - oc).unwrap(), &c, floor).unwrap();
        let right = compose(&a, &compose(&b, &c, floor - oa).unwrap(), floor).unwrap();
        prop_assert_eq!(left.truncate(floor), right.truncate(floor));
    }

    #[test]
    fn residue_is_a_trace(s in any::<u64>(), oa in -2i64..=2, ob in -2i64..=2) {
        let (a, b) = (sym(s, oa), sym(s ^ 7, ob));
        let ab = compose(&a, &b, -2).unwrap().residue().unwrap();
        let ba = compose(&b, &a, -2).unwrap().residue().unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn residue_is_linear(s in any::<u64>(), num in -5i64..=5, den in 1i64..=4) {
        let (a, b) = (sym(s, 0), sym(s ^ 3, 0));
        let lam = CRational::from_frac(num, den);
        let lhs = a.add(&b.scale(&lam)).unwrap().residue().unwrap();
        let rhs = a.residue().unwrap() + lam * b.residue().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coboundary_scales_with_first_argument(s in any::<u64>(), num in -5i64..=5) {
        let w = Weight::from_law(EigenvalueLaw::laplacian(), 1);
        let (a, b) = (sym(s, 0), sym(s ^ 5, 1));
        let lam = CRational::from_int(num);
        let base = coboundary_anomaly(&w, &[a.clone(), b.clone()], CoefficientConvention::Exact, 0).unwrap().value;
        let scaled = coboundary_anomaly(&w, &[a.scale(&lam), b], CoefficientConvention::Exact, 0).unwrap().value;
        prop_assert_eq!(scaled, lam * base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    // The residue formula for bχ₀ against the Hochschild coboundary of the
    // weighted trace computed spectrally.
    #[test]
    fn coboundary_formula_matches_spectral_hochschild(s in any::<u64>()) {
        let w = Weight::from_law(EigenvalueLaw::from_ints(&[1, 1]).unwrap(), 1);
        let (a, b) = (sym(s, 0), sym(s ^ 9, 1));
        let formula = coboundary_anomaly(&w, &[a.clone(), b.clone()], CoefficientConvention::Exact, 0).unwrap().value;
        let ops = [Operand::new(a), Operand::new(b)];
        let chi = |x: &[Operand]| weighted_cochain(&w, x, &OracleTrace, CoefficientConvention::Exact);
        let hb = hochschild_b(&chi, &ops, &|x: &Operand, y: &Operand| x.mul(y)).unwrap();
        let f = formula.to_c64();
        prop_assert!((f - hb.value).norm() <= 1e-8 * (1.0 + f.norm()), "{f} vs {}", hb.value);
    }
}
