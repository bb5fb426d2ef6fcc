#![allow(clippy::needless_range_loop)]

use num_traits::{One, Zero};
use proptest::prelude::*;

use probstir::probabilistic::prob_triangle;
use probstir::rational::{parse_rational, rat, to_exact_string};
use probstir::series::lagrange_extract;
use probstir::special::triangle;
use probstir::verify::check_orthogonality;
use probstir::{DeltaSeries, Family, LagrangeFormula, RandomVariable, Rational, Series};

const ORDER: usize = 7;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    small_rational().prop_filter("nonzero", |q| !q.is_zero())
}

fn series(order: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(small_rational(), order + 1).prop_map(Series::from_coeffs)
}

fn unit_series(order: usize) -> impl Strategy<Value = Series> {
    (
        nonzero_rational(),
        prop::collection::vec(small_rational(), order),
    )
        .prop_map(|(c0, rest)| Series::from_coeffs(std::iter::once(c0).chain(rest).collect()))
}

fn delta_series(order: usize) -> impl Strategy<Value = DeltaSeries> {
    (
        nonzero_rational(),
        prop::collection::vec(small_rational(), order - 1),
    )
        .prop_map(|(c1, rest)| {
            let coeffs = [Rational::zero(), c1].into_iter().chain(rest).collect();
            DeltaSeries::new(Series::from_coeffs(coeffs)).unwrap()
        })
}

fn no_constant(order: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(small_rational(), order).prop_map(|rest| {
        Series::from_coeffs(std::iter::once(Rational::zero()).chain(rest).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reversion_is_a_two_sided_inverse(f in delta_series(ORDER)) {
        let g = f.revert();
        let t = Series::var(ORDER);
        prop_assert_eq!(f.series().compose(g.series()).unwrap(), t.clone());
        prop_assert_eq!(g.series().compose(f.series()).unwrap(), t);
    }

    #[test]
    fn lagrange_powers_match_reversion(f in delta_series(ORDER)) {
        let g = f.revert();
        for k in 1..=ORDER {
            let power = g.series().powi(k as i64).unwrap();
            for n in k..=ORDER {
                let via = lagrange_extract(&Series::zero(ORDER), &f, n, k, LagrangeFormula::B).unwrap();
                prop_assert_eq!(&via, power.coeff(n).unwrap(), "n={} k={}", n, k);
            }
        }
        for n in 1..=ORDER {
            let via = lagrange_extract(&Series::zero(ORDER), &f, n, 1, LagrangeFormula::C).unwrap();
            prop_assert_eq!(&via, g.series().coeff(n).unwrap());
        }
    }

    #[test]
    fn lagrange_composition(f in delta_series(ORDER), h in series(ORDER)) {
        let composed = h.compose(f.revert().series()).unwrap();
        for n in 0..=ORDER {
            let via = lagrange_extract(&h, &f, n, 0, LagrangeFormula::A).unwrap();
            prop_assert_eq!(&via, composed.coeff(n).unwrap());
        }
    }

    #[test]
    fn exp_and_log1p_are_inverse(f in no_constant(ORDER)) {
        let one = Rational::one();
        let back = f.exp().unwrap().add_constant(&-one).log1p().unwrap();
        prop_assert_eq!(back, f.clone());
        let forward = f.log1p().unwrap().exp().unwrap();
        prop_assert_eq!(forward, f.add_constant(&Rational::one()));
    }

    #[test]
    fn powers_add(
        f in no_constant(ORDER).prop_map(|s| s.add_constant(&Rational::one())),
        a in small_rational(),
        b in small_rational(),
    ) {
        // constant term 1, so any rational exponent is allowed
        let lhs = f.pow(&(&a + &b)).unwrap();
        let rhs = f.pow(&a).unwrap().mul(&f.pow(&b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn integer_powers_match_repeated_products(f in unit_series(ORDER), e in -3i64..=4) {
        let direct = f.pow(&rat(e, 1)).unwrap();
        let mut by_hand = Series::one(ORDER);
        for _ in 0..e.unsigned_abs() {
            by_hand = by_hand.mul(&f).unwrap();
        }
        if e < 0 {
            by_hand = by_hand.recip().unwrap();
        }
        prop_assert_eq!(direct, by_hand);
    }

    #[test]
    fn product_is_commutative_and_associative(a in series(ORDER), b in series(ORDER), c in series(ORDER)) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        // and distributes over addition
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn division_undoes_multiplication(a in series(ORDER), b in unit_series(ORDER)) {
        prop_assert_eq!(a.mul(&b).unwrap().div(&b).unwrap(), a);
    }

    #[test]
    fn rational_text_round_trips(n in any::<i64>(), d in 1i64..=i64::MAX) {
        let q = rat(n, d);
        let text = to_exact_string(&q);
        prop_assert_eq!(parse_rational(&text).unwrap(), q);
    }

    #[test]
    fn degenerate_orthogonality(lambda in small_rational()) {
        let t2 = triangle(Family::DegS2, &lambda, 9).unwrap();
        let t1 = triangle(Family::DegS1, &lambda, 9).unwrap();
        prop_assert!(check_orthogonality(&t2, &t1).unwrap().passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn probabilistic_orthogonality(lambda in small_rational(), idx in 0usize..9) {
        let rv = RandomVariable::builtin()[idx].clone();
        for (second, first) in [(Family::ProbS2, Family::ProbS1), (Family::ProbH, Family::ProbG)] {
            let t2 = prob_triangle(&rv, &lambda, second, 8).unwrap();
            let t1 = prob_triangle(&rv, &lambda, first, 8).unwrap();
            let report = check_orthogonality(&t2, &t1).unwrap();
            prop_assert!(report.passed(), "{}", report);
        }
    }

    #[test]
    fn second_kind_diagonal_is_mean_power(p in (1i64..=9).prop_map(|n| rat(n, 10)), lambda in small_rational()) {
        let rv = RandomVariable::Bernoulli { p: p.clone() };
        let t2 = prob_triangle(&rv, &lambda, Family::ProbS2, 8).unwrap();
        let mut power = Rational::one();
        for n in 0..=8 {
            prop_assert_eq!(t2.get(n, n), power.clone());
            power *= &p;
        }
    }
}
