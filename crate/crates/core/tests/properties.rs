use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use padic_hecke::arith::{
    dirichlet_conv, dirichlet_inverse, int, is_prime, kronecker, numdiv, ordp, rat, sigma1, ArithFn, Rat, Val,
};
use padic_hecke::canonical::{phi_modular, CanonicalBranch};
use padic_hecke::cm::{class_number_formula, class_number_forms, is_discriminant, reduction_type};
use padic_hecke::divisor::{axpy, Divisor};
use padic_hecke::kite::{kite_top, tau_m_closed, tau_m_recursive};
use padic_hecke::orbit::{
    gauss_mass_report, tate_hecke_valuations, tate_mass_outside, AnnularPoint, MassWindow, RadialData,
};
use padic_hecke::padic::PadicInt;

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    (-10_000i64..10_000, 1i64..10_000).prop_filter_map("nonzero", |(a, b)| (a != 0).then(|| rat(a, b)))
}

fn kite_point(p: u64) -> impl Strategy<Value = Rat> {
    (1i64..=1_000_000).prop_map(move |n| kite_top(p) * rat(n, 1_000_000))
}

fn small_divisor() -> impl Strategy<Value = Divisor<i64>> {
    prop::collection::vec((-20i64..20, -5i64..5), 0..8).prop_map(|v| v.into_iter().map(|(p, m)| (p, int(m))).collect())
}

fn neg_disc() -> impl Strategy<Value = i64> {
    (3i64..5000).prop_map(|n| -n).prop_filter("discriminant", |&d| is_discriminant(d))
}

proptest! {
    #[test]
    fn valuation_is_a_valuation(a in nonzero_rat(), b in nonzero_rat(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        prop_assert_eq!(ordp(&(&a * &b), p), &ordp(&a, p) + &ordp(&b, p));
        prop_assert!(ordp(&(&a + &b), p) >= ordp(&a, p).min(ordp(&b, p)));
        prop_assert_eq!(ordp(&Rat::zero(), p), Val::Infinite);
    }

    #[test]
    fn kronecker_is_multiplicative(d in neg_disc(), m in 1i64..500, n in 1i64..500) {
        prop_assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
    }

    #[test]
    fn kronecker_counts_square_roots(d in neg_disc(), q in (3u64..400).prop_filter("odd prime", |&q| is_prime(q))) {
        prop_assume!(d.rem_euclid(q as i64) != 0);
        let q = q as i64;
        let roots = (0..q).filter(|x| (x * x - d).rem_euclid(q) == 0).count() as i64;
        prop_assert_eq!(roots, 1 + kronecker(d, q) as i64);
    }

    #[test]
    fn ideal_count_at_primes(d in neg_disc(), q in (2u64..200).prop_filter("prime", |&q| is_prime(q))) {
        let r = ArithFn::ideal_count(d, q as usize);
        prop_assert_eq!(r.at(q).clone(), int(1 + kronecker(d, q as i64) as i64));
    }

    #[test]
    fn dirichlet_inverse_inverts(head in 1i64..5, rest in prop::collection::vec(-5i64..5, 40)) {
        let mut values = vec![int(head)];
        values.extend(rest.iter().map(|&x| int(x)));
        let g = ArithFn::from_values(values);
        let inv = dirichlet_inverse(&g, g.len()).unwrap();
        prop_assert_eq!(dirichlet_conv(&g, &inv, g.len()), ArithFn::unit(g.len()));
    }

    #[test]
    fn divisors_form_a_vector_space(a in small_divisor(), b in small_divisor(), c in small_divisor(), s in -4i64..4) {
        let s = int(s);
        let zero = Divisor::new();
        // (a + b) + c = a + (b + c), a + b = b + a
        let one = Rat::one();
        prop_assert_eq!(axpy(&one, &axpy(&one, &a, &b), &c), axpy(&one, &a, &axpy(&one, &b, &c)));
        prop_assert_eq!(axpy(&one, &a, &b), axpy(&one, &b, &a));
        prop_assert_eq!(axpy(&-one.clone(), &a, &a), zero);
        prop_assert_eq!(axpy(&s, &axpy(&one, &a, &b), &Divisor::new()), axpy(&s, &a, &b.scale(&s)));
        prop_assert_eq!(axpy(&s, &a, &b).degree(), &s * a.degree() + b.degree());
        prop_assert!(a.iter().all(|(_, m)| !m.is_zero()));
    }

    #[test]
    fn restriction_partitions(a in small_divisor(), cut in -20i64..20) {
        let lo = a.restrict(|&x| x < cut);
        let hi = a.restrict(|&x| x >= cut);
        prop_assert_eq!(axpy(&Rat::one(), &lo, &hi), a);
    }

    #[test]
    fn kite_closed_form(p in prop::sample::select(vec![2u64, 3, 5]), m in 0u32..7, n in 1i64..=1_000_000) {
        let x = kite_top(p) * rat(n, 1_000_000);
        let d = tau_m_closed(p, m, &x).unwrap();
        prop_assert_eq!(&d, &tau_m_recursive(p, m, &x).unwrap());
        prop_assert!(d.is_effective());
        prop_assert_eq!(d.degree(), rat((p.pow(m + 1) - 1) as i64, p as i64 - 1));
        prop_assert!(d.iter().all(|(y, _)| y.0.is_positive() && y.0 <= kite_top(p)));
    }

    #[test]
    fn kite_points_stay_in_the_kite(x in kite_point(2)) {
        let d = tau_m_closed(2, 3, &x).unwrap();
        prop_assert!(d.iter().all(|(y, _)| y.0 <= kite_top(2)));
    }

    #[test]
    fn reduction_type_ignores_prime_to_p_conductor(d in neg_disc(), q in prop::sample::select(vec![3i64, 5, 7, 11])) {
        for p in [2u64, 3] {
            if q as u64 == p {
                continue;
            }
            let a = reduction_type(p, d).unwrap();
            let b = reduction_type(p, d * q * q).unwrap();
            prop_assert_eq!(a.label(), b.label());
            prop_assert_eq!(a.supsn(), b.supsn());
        }
    }

    #[test]
    fn class_number_routes_agree(d in (3i64..60_000).prop_map(|n| -n).prop_filter("disc", |&d| is_discriminant(d))) {
        prop_assert_eq!(class_number_formula(d).unwrap(), class_number_forms(d).unwrap());
    }

    #[test]
    fn padic_ring_operations(a in any::<i32>(), b in any::<i32>(), p in prop::sample::select(vec![2u64, 3, 5]), k in 1u32..40) {
        let (a, b) = (a as i64, b as i64);
        let x = PadicInt::from_i64(p, k, a);
        let y = PadicInt::from_i64(p, k, b);
        prop_assert_eq!(x.add(&y), PadicInt::from_i64(p, k, a + b));
        prop_assert_eq!(x.sub(&y), PadicInt::from_i64(p, k, a - b));
        prop_assert_eq!(x.mul(&y), PadicInt::from_i64(p, k, a * b));
        if x.is_unit() {
            prop_assert_eq!(x.mul(&x.inverse().unwrap()), PadicInt::from_i64(p, k, 1));
        }
        prop_assert_eq!(x.reduce(k / 2 + 1).prec(), k / 2 + 1);
    }

    #[test]
    fn tate_degree_and_bound(n in 1u64..20_000, ordz in 1i64..5, rho in 1i64..5) {
        let (ordz, rho) = (int(ordz), int(rho));
        prop_assert_eq!(tate_hecke_valuations(&ordz, n).unwrap().degree(), int(sigma1(n).unwrap() as i64));
        let t = tate_mass_outside(&ordz, n, &rho).unwrap();
        let d = numdiv(n).unwrap() as i64;
        // mass² < (ordz/ρ)·n·d(n)²
        prop_assert_eq!(t.within_bound, int(t.mass as i64).pow(2) * &rho < &ordz * int(n as i64 * d * d));
        prop_assert!(t.fraction <= Rat::one());
    }

    #[test]
    fn window_masses_are_consistent(radii in prop::collection::vec((1i64..40, 1i64..4), 1..6), bad in prop::collection::vec(1i64..10, 0..4), rho in 1i64..12, a in 0i64..64) {
        let mut pts = Divisor::new();
        for (r, m) in &radii {
            pts.add_point(AnnularPoint::SupsAt { center: int(0), radial: RadialData::Exact(Val::from_int(*r)) }, int(*m));
        }
        for o in &bad {
            pts.add_point(AnnularPoint::Bad { ord_j: int(-o) }, Rat::one());
        }
        let inner = MassWindow::inner(int(0), int(rho)).unwrap();
        let moved = MassWindow::inner(int(a), int(rho)).unwrap();
        let outer = MassWindow::outer(int(rho)).unwrap();
        let r = gauss_mass_report(2, &pts, &[inner, outer, moved]).unwrap();
        for w in &r.windows {
            prop_assert!(w.lower <= w.upper && w.upper <= r.degree);
        }
        // disjoint windows
        prop_assert!(r.windows[0].upper_fraction.clone() + r.windows[1].upper_fraction.clone() <= Rat::one());
        prop_assert!(r.windows[0].is_exact() && r.windows[1].is_exact());
    }
}

fn branch(p: u64) -> &'static CanonicalBranch {
    static B: [OnceLock<CanonicalBranch>; 2] = [OnceLock::new(), OnceLock::new()];
    B[p as usize - 2].get_or_init(|| CanonicalBranch::for_precision(p, 32).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn branch_contracts_and_lifts_frobenius(x in 1i64..1_000_000_000, e in 1u32..10, u in 1i64..1000, p in prop::sample::select(vec![2u64, 3])) {
        prop_assume!(x % p as i64 != 0);
        let k = 32;
        let branch = branch(p);
        let y = x + (p as i64).pow(e) * u;
        let tx = branch.eval(&PadicInt::from_i64(p, k, x)).unwrap().value;
        let ty = branch.eval(&PadicInt::from_i64(p, k, y)).unwrap().value;
        let cert = tx.prec().min(ty.prec());
        prop_assert!(tx.reduce(cert).distance(&ty.reduce(cert)) >= (e + 1).min(cert));
        // t(x) ≡ x^p mod p and Φ_p(x, t(x)) = 0
        let xp = PadicInt::from_i64(p, k, x);
        prop_assert!(tx.congruent(&xp.pow(p as u32).reduce(tx.prec()), 1));
        let phi = phi_modular(p).unwrap();
        prop_assert!(phi.eval_padic(&xp.reduce(tx.prec()), &tx).ord().is_none());
    }
}
