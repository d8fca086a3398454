mod common;

use common::{jet, jet_of, nonzero_rational, poly, rational};
use folhol_core::exact_series::{parse_bivariate, rat, Rational};
use folhol_core::groupoid_model::{
    check_separation_sample, component_of, f_theta, in_u_theta, omega_chart, separation_epsilon, Component,
    GaugeArrow, GroupoidElement, OmegaPoint, SampleCheck,
};
use folhol_core::jet_groups::Jet;
use proptest::prelude::*;

fn pair(a: i64, b: i64) -> GroupoidElement {
    GroupoidElement::pair(rat(a, 1), rat(b, 1)).unwrap()
}

#[test]
fn composition_examples() {
    assert_eq!(pair(3, 2).compose(&pair(2, 1)).unwrap(), pair(3, 1));
    let g = GroupoidElement::Jet(jet("y + y^2", 3));
    assert_eq!(g.compose(&g).unwrap(), GroupoidElement::Jet(jet("y + 2y^2 + 2y^3", 3)));
    let a = pair(-4, 7);
    assert_eq!(a.compose(&a.inverse()).unwrap(), GroupoidElement::unit(&a.target(), 2));
    assert!(pair(3, 2).compose(&pair(3, 2)).is_err());
}

#[test]
fn chart_examples() {
    let id = Jet::identity(2);
    let p = OmegaPoint::new(rat(3, 2), rat(0, 1), id.clone(), 2).unwrap();
    assert_eq!(omega_chart(&p, 2).unwrap(), GroupoidElement::Jet(jet("y + 3/2 y^2", 2)));
    let p = OmegaPoint::new(rat(0, 1), rat(-5, 3), id, 2).unwrap();
    assert_eq!(omega_chart(&p, 2).unwrap(), GroupoidElement::unit(&rat(-5, 3), 2));
    let p = OmegaPoint::new(rat(1, 1), rat(1, 1), jet("2y", 2), 2).unwrap();
    assert_eq!(omega_chart(&p, 2).unwrap(), pair(4, 1));
    assert!(OmegaPoint::new(rat(-2, 1), rat(1, 1), jet("y", 2), 2).is_err());
}

#[test]
fn component_examples() {
    assert_eq!(component_of(&pair(-1, -2)).unwrap(), Component::Positive);
    assert_eq!(component_of(&pair(1, -1)).unwrap(), Component::Negative);
    assert_eq!(component_of(&GroupoidElement::Jet(jet("-y", 2))).unwrap(), Component::Negative);
}

#[test]
fn f_theta_examples() {
    let tb = |s: &str| parse_bivariate(s, ('t', 'y')).unwrap();
    assert_eq!(f_theta(&poly("2y"), 2).unwrap(), tb("2t"));
    assert_eq!(f_theta(&poly("y"), 2).unwrap(), tb("t"));
    assert_eq!(f_theta(&poly("y + y^2"), 2).unwrap(), tb("t + 2t y + t^2 y^2"));
}

#[test]
fn u_theta_examples() {
    assert!(in_u_theta(&poly("2y"), &rat(1, 1), &rat(1, 8), 2).unwrap());
    assert!(!in_u_theta(&poly("2y"), &rat(2, 1), &rat(1, 1), 2).unwrap());
    for t in [rat(-9, 1), rat(0, 1), rat(100, 3)] {
        assert!(in_u_theta(&poly("y - 4y^3"), &t, &rat(0, 1), 3).unwrap());
    }
}

#[test]
fn separation_examples() {
    let c = separation_epsilon(&poly("y"), &poly("2y"), 2).unwrap();
    assert!(c.epsilon > rat(0, 1) && c.epsilon <= rat(1, 4));
    let c = separation_epsilon(&poly("y"), &poly("y + y^2"), 3).unwrap();
    assert!(c.epsilon > rat(0, 1) && c.epsilon <= rat(1, 4));
    assert!(separation_epsilon(&poly("y"), &poly("y"), 2).is_err());
}

#[test]
fn gauge_arrows() {
    let a = GaugeArrow { target: 2, source: 1, jet: jet("2y + y^2", 2) };
    let b = GaugeArrow { target: 1, source: 0, jet: jet("-y", 2) };
    let ab = a.compose(&b).unwrap();
    assert_eq!((ab.target, ab.source), (2, 0));
    assert_eq!(ab.jet, jet("-2y + y^2", 2));
    assert_eq!(ab.compose(&ab.inverse()).unwrap(), GaugeArrow::unit(2, 2));
    assert!(b.compose(&b).is_err());
}

proptest! {
    #[test]
    fn pair_laws(a in nonzero_rational(), b in nonzero_rational(), c in nonzero_rational(), d in nonzero_rational()) {
        let x = GroupoidElement::pair(a.clone(), b.clone()).unwrap();
        let y = GroupoidElement::pair(b, c.clone()).unwrap();
        let z = GroupoidElement::pair(c, d).unwrap();
        prop_assert_eq!(x.compose(&y).unwrap().compose(&z).unwrap(), x.compose(&y.compose(&z).unwrap()).unwrap());
        prop_assert_eq!(x.compose(&x.inverse()).unwrap(), GroupoidElement::unit(&a, 2));
        let cx = component_of(&x).unwrap();
        let cy = component_of(&y).unwrap();
        prop_assert_eq!(component_of(&x.compose(&y).unwrap()).unwrap(), cx.times(cy));
    }

    #[test]
    fn jet_arrow_laws(a in jet_of(3), b in jet_of(3)) {
        let x = GroupoidElement::Jet(a);
        let y = GroupoidElement::Jet(b);
        prop_assert!(x.compose(&x.inverse()).unwrap().is_unit());
        prop_assert_eq!(GroupoidElement::unit(&rat(0, 1), 3).compose(&x).unwrap(), x.clone());
        let prod = x.compose(&y).unwrap();
        prop_assert_eq!(component_of(&prod).unwrap(), component_of(&x).unwrap().times(component_of(&y).unwrap()));
    }

    #[test]
    fn chart_on_the_isotropy_slice(s in rational(), t in rational()) {
        let id = Jet::identity(4);
        let at = |x: &Rational| omega_chart(&OmegaPoint::new(x.clone(), rat(0, 1), id.clone(), 4).unwrap(), 4).unwrap();
        prop_assert_eq!(at(&s).compose(&at(&t)).unwrap(), at(&(&s + &t)));
    }

    #[test]
    fn f_theta_identity(c in prop::collection::vec(rational(), 4), k in 2usize..5, t in rational(), y in rational()) {
        let mut coeffs = vec![folhol_core::exact_series::Scalar::zero()];
        coeffs.extend(c.into_iter().map(folhol_core::exact_series::Scalar::from_rational));
        let theta = folhol_core::exact_series::TruncatedSeries::new('y', coeffs, 4);
        let f = f_theta(&theta, k).unwrap();
        let ts = folhol_core::exact_series::Scalar::from_rational(t.clone());
        let ys = folhol_core::exact_series::Scalar::from_rational(y.clone());
        let tau = &ys + &(&ts * &ys.pow(k as i64).unwrap());
        let lhs = &theta.evaluate(&ys) + &(&f.evaluate(&ts, &ys) * &ys.pow(k as i64).unwrap());
        prop_assert_eq!(lhs, theta.evaluate(&tau));
    }

    #[test]
    fn separation_certificates_hold(
        a in prop::collection::vec(rational(), 3),
        b in prop::collection::vec(rational(), 3),
        k in 2usize..4,
        samples in prop::collection::vec((rational(), rational(), 1i64..100, any::<bool>()), 20),
    ) {
        let build = |c: &[Rational]| {
            let mut coeffs = vec![folhol_core::exact_series::Scalar::zero()];
            coeffs.extend(c.iter().cloned().map(folhol_core::exact_series::Scalar::from_rational));
            folhol_core::exact_series::TruncatedSeries::new('y', coeffs, 3)
        };
        let (t1, t2) = (build(&a), build(&b));
        prop_assume!((1..k).any(|j| t1.coeff(j) != t2.coeff(j)));
        let eps = separation_epsilon(&t1, &t2, k).unwrap().epsilon;
        for (s1, s2, n, neg) in samples {
            let y = { let y = &eps * rat(n, 100); if neg { -y } else { y } };
            let omega = |t: &Rational| (rat(1, 1) + t * num_traits::pow(y.clone(), k - 1)) > rat(0, 1);
            if omega(&s1) && omega(&s2) {
                prop_assert_ne!(check_separation_sample(&t1, &t2, k, &s1, &s2, &y).unwrap(), SampleCheck::Collision);
            }
        }
    }
}
