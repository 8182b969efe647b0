use num_bigint::BigInt;
use num_rational::BigRational;
use operadkit::families::{make_family, BSource, FamilyKind, FamilySpec};
use operadkit::graded_algebra::{self, multiply, NormalWordAlgebra};
use operadkit::interval;
use operadkit::operad::{ideal_generated_by, ideal_product, Operad, OperadElement};
use operadkit::scalars::{Elem, Field};
use operadkit::series::{fit_rational, HilbertSeries};
use operadkit::symmetry::Permutation;
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::from_images(&v).unwrap())
}

fn family(kind: FamilyKind, h: usize) -> Operad {
    make_family(&FamilySpec::new(kind, &Field::rationals(), h)).unwrap()
}

fn random_element(p: &Operad, n: usize, coeffs: &[i64]) -> OperadElement {
    let f = p.field();
    let c = (0..p.dim(n)).map(|k| f.from_i64(coeffs[k % coeffs.len()])).collect();
    p.element(n, c).unwrap()
}

fn fields() -> Vec<Field> {
    vec![Field::rationals(), Field::prime(5).unwrap(), Field::prime(2).unwrap().adjoin_quadratic_standard().unwrap(), Field::prime(3).unwrap().adjoin_quadratic_standard().unwrap()]
}

fn elem(f: &Field, a: i64, b: i64) -> Elem {
    // a + b·θ when the field has a generator, a/(|b|+1) over Q
    if f.degree() > 1 {
        f.add(&f.from_i64(a), &f.mul(&f.from_i64(b), &f.basis_element(1)))
    } else if f.characteristic() == 0 {
        f.from_ratio(a, b.abs() + 1).unwrap()
    } else {
        f.from_i64(a * 7 + b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms(fi in 0usize..4, a in -20i64..20, b in -20i64..20, c in -20i64..20, d in -20i64..20, e in -5i64..5, g in -5i64..5) {
        let f = &fields()[fi];
        let (x, y, z) = (elem(f, a, b), elem(f, c, d), elem(f, e, g));
        prop_assert_eq!(f.mul(&f.mul(&x, &y), &z), f.mul(&x, &f.mul(&y, &z)));
        prop_assert_eq!(f.mul(&x, &f.add(&y, &z)), f.add(&f.mul(&x, &y), &f.mul(&x, &z)));
        prop_assert_eq!(f.mul(&x, &y), f.mul(&y, &x));
        prop_assert!(f.is_zero(&f.add(&x, &f.neg(&x))));
        if !f.is_zero(&x) {
            prop_assert!(f.is_one(&f.mul(&x, &f.inv(&x).unwrap())));
        }
    }

    #[test]
    fn sign_is_a_homomorphism(s in perm(6), t in perm(6)) {
        prop_assert_eq!(s.compose(&t).sign(), s.sign() * t.sign());
        prop_assert!(s.compose(&s.inverse()).is_identity());
    }

    #[test]
    fn right_action_is_functorial(k in 0usize..4, s in perm(5), t in perm(5), c in proptest::collection::vec(-3i64..4, 1..4)) {
        let kind = [FamilyKind::Com, FamilyKind::Mas, FamilyKind::LinO { b: BSource::SquareZero { b: 1 } }, FamilyKind::LinE { b: BSource::Truncated { b: 2 } }][k].clone();
        let p = family(kind, 5);
        let x = random_element(&p, 5, &c);
        let lhs = p.act(&p.act(&x, &s).unwrap(), &t).unwrap();
        let rhs = p.act(&x, &s.compose(&t)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ideal_product_is_monotone(a1 in 2usize..5, a2 in 2usize..5, b in 2usize..5) {
        let p = family(FamilyKind::Com, 7).direct_sum(&family(FamilyKind::Mas, 7)).unwrap();
        let h = 7;
        let g1 = p.basis_element(a1, 0);
        let g2 = p.basis_element(a2, p.dim(a2) - 1);
        let small = ideal_generated_by(&p, &[g1.clone()], h);
        let large = ideal_generated_by(&p, &[g1, g2], h);
        prop_assert!(small.is_contained_in(&large));
        let j = ideal_generated_by(&p, &[p.basis_element(b, 0)], h);
        prop_assert!(ideal_product(&p, &small, &j, h).is_contained_in(&ideal_product(&p, &large, &j, h)));
    }

    #[test]
    fn truncation_zeroes_low_arities(w in 2usize..6, k in 0usize..3) {
        let kind = [FamilyKind::Com, FamilyKind::Mas, FamilyKind::ComW { w: 2 }][k].clone();
        let p = family(kind, 8);
        let t = p.truncate(w).unwrap();
        let (hp, ht) = (p.hilbert_series(), t.hilbert_series());
        for n in 0..=8 {
            let expect = if n >= 2 && n < w { 0 } else { hp.coefficient(n) };
            prop_assert_eq!(ht.coefficient(n), expect);
        }
    }

    #[test]
    fn exp_and_ln_enclose(num in 1i64..2000, den in 1i64..200) {
        let x = BigRational::new(BigInt::from(num), BigInt::from(den));
        let xf = num as f64 / den as f64;
        let e = interval::exp(&x, 80);
        prop_assert!(e.lo <= e.hi);
        let back = interval::ln(&x, 80);
        prop_assert!((back.midpoint_f64() - xf.ln()).abs() < 1e-9 * (1.0 + xf.ln().abs()));
        if xf < 60.0 {
            prop_assert!((e.midpoint_f64() / xf.exp() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rational_fit_recovers_recurrences(a in 0u64..4, b in 0u64..3, c0 in 1u64..4, c1 in 0u64..5) {
        // c_n = a c_{n-1} + b c_{n-2}
        let mut v = vec![c0, c1];
        while v.len() < 40 {
            let n = v.len();
            v.push(a * v[n - 1] + b * v[n - 2]);
            if v[n] > 1 << 40 { break; }
        }
        let h = HilbertSeries::new(v.clone());
        let r = fit_rational(&h, None).unwrap().expect("order-2 recurrence");
        let ex = r.expand(v.len());
        for (k, c) in v.iter().enumerate() {
            prop_assert_eq!(&ex[k], &BigRational::from_integer(BigInt::from(*c)));
        }
    }

    #[test]
    fn csv_round_trip(v in proptest::collection::vec(0u64..1000, 1..40)) {
        let h = HilbertSeries::new(v);
        prop_assert_eq!(HilbertSeries::from_csv(&h.to_csv("degree")).unwrap(), h);
    }

    #[test]
    fn squarefree_words_multiply_associatively(d1 in 0usize..20, d2 in 0usize..20, d3 in 0usize..20) {
        let q = Field::rationals();
        let a = NormalWordAlgebra::binary_squarefree(&q, 64);
        let (x, y, z) = (graded_algebra::basis_element(&a, d1, 0), graded_algebra::basis_element(&a, d2, 0), graded_algebra::basis_element(&a, d3, 0));
        let l = multiply(&a, &multiply(&a, &x, &y).unwrap(), &z).unwrap();
        let r = multiply(&a, &x, &multiply(&a, &y, &z).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }
}
