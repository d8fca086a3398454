#![allow(dead_code)]

use folhol_core::exact_series::{parse_polynomial, parse_series, rat, Rational, Scalar, TruncatedSeries};
use folhol_core::jet_groups::Jet;
use proptest::prelude::*;

pub fn series(text: &str, order: usize) -> TruncatedSeries {
    parse_series(text, 'y', order).unwrap()
}

pub fn poly(text: &str) -> TruncatedSeries {
    parse_polynomial(text, 'y').unwrap()
}

pub fn jet(text: &str, order: usize) -> Jet {
    Jet::from_series(series(text, order)).unwrap()
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |q| *q != rat(0, 1))
}

pub fn scalar() -> impl Strategy<Value = Scalar> {
    rational().prop_map(Scalar::from_rational)
}

pub fn series_of(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(scalar(), order + 1).prop_map(move |c| TruncatedSeries::new('y', c, order))
}

/// Series with zero constant term.
pub fn composable(order: usize) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec(scalar(), order).prop_map(move |c| {
        let mut coeffs = vec![Scalar::zero()];
        coeffs.extend(c);
        TruncatedSeries::new('y', coeffs, order)
    })
}

pub fn jet_of(order: usize) -> impl Strategy<Value = Jet> {
    (nonzero_rational(), prop::collection::vec(scalar(), order - 1)).prop_map(|(a1, rest)| {
        let mut coeffs = vec![Scalar::from_rational(a1)];
        coeffs.extend(rest);
        Jet::new(coeffs).unwrap()
    })
}
