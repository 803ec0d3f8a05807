use msc_core::calculus::{exterior_derivative, lie_derivative, schouten_bracket};
use msc_core::hamiltonian::{kernel_basis, solve_hamiltonian_field};
use msc_core::multiphase::{omega, theta, volume, volume_contracted};
use msc_core::random::Sampler;
use msc_core::scalar::parity;
use msc_core::{Chart, Form, Multivector, Rational, Scalar};
use proptest::prelude::*;

fn c21() -> Chart {
    Chart::extended(2, 1).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn scalar_ring_axioms(seed in any::<u64>()) {
        let ch = c21();
        let mut s = Sampler::new(seed);
        let (a, b, c) = (s.scalar(ch), s.scalar(ch), s.scalar(ch));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &Scalar::one(ch), a);
    }

    #[test]
    fn partial_derivatives_commute(seed in any::<u64>(), i in 0usize..6, j in 0usize..6) {
        let ch = c21();
        let f = Sampler::new(seed).scalar(ch);
        prop_assert_eq!(f.partial(i).unwrap().partial(j).unwrap(), f.partial(j).unwrap().partial(i).unwrap());
    }

    #[test]
    fn partial_derivative_is_a_derivation(seed in any::<u64>(), i in 0usize..6) {
        let ch = c21();
        let mut s = Sampler::new(seed);
        let (a, b) = (s.scalar(ch), s.scalar(ch));
        let lhs = (&a * &b).partial(i).unwrap();
        prop_assert_eq!(lhs, &(&a.partial(i).unwrap() * &b) + &(&a * &b.partial(i).unwrap()));
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(seed in any::<u64>(), point in prop::collection::vec(-4i64..=4, 6)) {
        let ch = c21();
        let mut s = Sampler::new(seed);
        let (a, b) = (s.scalar(ch), s.scalar(ch));
        let pt: Vec<Rational> = point.into_iter().map(|v| Rational::from_integer(v.into())).collect();
        prop_assert_eq!((&a * &b).eval(&pt).unwrap(), a.eval(&pt).unwrap() * b.eval(&pt).unwrap());
        prop_assert_eq!((&a + &b).eval(&pt).unwrap(), a.eval(&pt).unwrap() + b.eval(&pt).unwrap());
    }

    #[test]
    fn wedge_is_graded_commutative_and_associative(seed in any::<u64>(), p in 0usize..4, q in 0usize..4, t in 0usize..3) {
        let ch = c21();
        let mut s = Sampler::new(seed);
        let (a, b, c) = (s.form(ch, p), s.form(ch, q), s.form(ch, t));
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).signed(p * q));
        prop_assert_eq!(a.wedge(&b).wedge(&c), a.wedge(&b.wedge(&c)));
        let (x, y) = (s.multivector(ch, p), s.multivector(ch, q));
        prop_assert_eq!(x.wedge(&y), y.wedge(&x).signed(p * q));
    }

    #[test]
    fn vector_contraction_is_an_antiderivation(seed in any::<u64>(), p in 0usize..4, q in 0usize..3) {
        let ch = c21();
        let mut s = Sampler::new(seed);
        let (a, b, v) = (s.form(ch, p), s.form(ch, q), s.multivector(ch, 1));
        let lhs = a.wedge(&b).contract(&v);
        let rhs = a.contract(&v).wedge(&b) + a.wedge(&b.contract(&v)).signed(p);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn contraction_with_a_wedge_is_iterated(seed in any::<u64>(), p in 2usize..5, r in 1usize..3, t in 1usize..3) {
        let ch = c21();
        let mut s = Sampler::new(seed);
        let (a, x, y) = (s.form(ch, p), s.multivector(ch, r), s.multivector(ch, t));
        prop_assert_eq!(a.contract(&x.wedge(&y)), a.contract(&x).contract(&y));
    }

    #[test]
    fn exterior_derivative_squares_to_zero_and_is_graded(seed in any::<u64>(), p in 0usize..4, q in 0usize..3) {
        let ch = c21();
        let mut s = Sampler::new(seed);
        let (a, b) = (s.form(ch, p), s.form(ch, q));
        prop_assert!(exterior_derivative(&exterior_derivative(&a)).is_zero());
        let lhs = exterior_derivative(&a.wedge(&b));
        let rhs = exterior_derivative(&a).wedge(&b) + a.wedge(&exterior_derivative(&b)).signed(p);
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn schouten_antisymmetry_and_leibniz(seed in any::<u64>(), r in 1usize..4, u in 1usize..3, t in 1usize..3) {
        let ch = c21();
        let mut s = Sampler::new(seed);
        let (x, y, z) = (s.multivector(ch, r), s.multivector(ch, u), s.multivector(ch, t));
        let xy = schouten_bracket(&x, &y).unwrap();
        prop_assert_eq!(schouten_bracket(&y, &x).unwrap(), -xy.signed((r - 1) * (u - 1)));
        let lhs = schouten_bracket(&x, &y.wedge(&z)).unwrap();
        let rhs = xy.wedge(&z) + y.wedge(&schouten_bracket(&x, &z).unwrap()).signed((r - 1) * u);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lie_derivative_identities(seed in any::<u64>(), r in 1usize..3, u in 1usize..3, p in 2usize..5) {
        let ch = c21();
        let mut s = Sampler::new(seed);
        let (x, y, a) = (s.multivector(ch, r), s.multivector(ch, u), s.form(ch, p));
        let la = lie_derivative(&a, &x).unwrap();
        prop_assert_eq!(exterior_derivative(&la), lie_derivative(&exterior_derivative(&a), &x).unwrap().signed(r - 1));
        let bracket = schouten_bracket(&x, &y).unwrap();
        let lhs = a.contract(&bracket);
        let rhs = lie_derivative(&a.contract(&y), &x).unwrap().signed((r - 1) * u) - la.contract(&y);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn naturality_under_affine_changes(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let base = Chart::base(2, 1).unwrap();
        let change = s.affine_change(base);
        let ext = c21();
        let alpha = s.form(base, 1);
        let beta = s.form(base, 2);
        let pulled = change.pullback_form(&alpha).unwrap().wedge(&change.pullback_form(&beta).unwrap());
        prop_assert_eq!(pulled, change.pullback_form(&alpha.wedge(&beta)).unwrap());
        prop_assert_eq!(
            change.pullback_form(&exterior_derivative(&alpha)).unwrap(),
            exterior_derivative(&change.pullback_form(&alpha).unwrap())
        );
        let th = theta(ext).unwrap();
        prop_assert_eq!(change.pullback_form(&th).unwrap(), th);
    }

    #[test]
    fn hamiltonian_solutions_are_unique_modulo_kernel(seed in any::<u64>()) {
        let ch = c21();
        let mut s = Sampler::new(seed);
        let kind = s.below(3);
        let pair = s.poisson_pair(ch, kind).unwrap();
        let solved = solve_hamiltonian_field(pair.form()).unwrap();
        let r = pair.r();
        prop_assert_eq!(omega(ch).unwrap().contract(solved.field()), exterior_derivative(pair.form()));
        if r > 0 {
            let basis = kernel_basis(ch, r).unwrap();
            prop_assert!(basis.contains(&(solved.field().clone() - pair.field().clone())));
        }
    }
}

#[test]
fn wedge_with_contracted_volumes_exhaustive() {
    for n in 1..=3 {
        let ch = Chart::extended(n, 1).unwrap();
        for r in 0..=n {
            for tuple in tuples(n, r) {
                let lhs_base = volume_contracted(ch, &tuple);
                for kappa in 0..n {
                    let lhs = Form::coordinate(ch, ch.x(kappa)).wedge(&lhs_base);
                    let mut rhs = Form::zero(ch, n - r + 1);
                    for (pos, &mu) in tuple.iter().enumerate() {
                        if mu == kappa {
                            let mut rest = tuple.clone();
                            rest.remove(pos);
                            rhs = rhs + volume_contracted(ch, &rest).scale_rational(&parity(r - 1 - pos));
                        }
                    }
                    assert_eq!(lhs, rhs, "n={n} kappa={kappa} tuple={tuple:?}");
                    let v = Multivector::coordinate(ch, ch.x(kappa));
                    let mut longer = tuple.clone();
                    longer.push(kappa);
                    assert_eq!(lhs_base.contract(&v), volume_contracted(ch, &longer));
                }
            }
        }
        assert_eq!(volume_contracted(ch, &[]), volume(ch));
    }
}

fn tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for t in tuples(n, r - 1) {
        for mu in (0..n).filter(|mu| !t.contains(mu)) {
            let mut u = t.clone();
            u.push(mu);
            out.push(u);
        }
    }
    out
}

#[test]
fn omega_has_no_vector_kernel() {
    for (n, fields) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
        let ch = Chart::extended(n, fields).unwrap();
        assert!(kernel_basis(ch, 1).unwrap().elements.is_empty(), "C({n},{fields})");
    }
}
