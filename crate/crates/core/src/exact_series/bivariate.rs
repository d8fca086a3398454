use std::collections::BTreeMap;
use std::fmt;

use super::scalar::Scalar;
use super::series::TruncatedSeries;

/// Sparse polynomial in two variables, truncated at `order_x` and `order_y`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BivariateTruncated {
    vars: (char, char),
    order_x: usize,
    order_y: usize,
    /// `(i, j)` is the monomial `x^i y^j`; zero coefficients are never stored.
    coeffs: BTreeMap<(usize, usize), Scalar>,
}

impl BivariateTruncated {
    pub fn new(vars: (char, char), order_x: usize, order_y: usize) -> Self {
        BivariateTruncated {
            vars,
            order_x,
            order_y,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds from `(i, j, c)` triples, summing duplicates and dropping terms
    /// outside the declared orders.
    pub fn from_terms<I>(vars: (char, char), order_x: usize, order_y: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let mut p = Self::new(vars, order_x, order_y);
        for (i, j, c) in terms {
            p.add_term(i, j, &c);
        }
        p
    }

    /// Smallest orders containing every term.
    pub fn from_terms_fitted<I>(vars: (char, char), terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Scalar)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        let ox = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let oy = terms.iter().map(|t| t.1).max().unwrap_or(0);
        Self::from_terms(vars, ox, oy, terms)
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: &Scalar) {
        if i > self.order_x || j > self.order_y || c.is_zero() {
            return;
        }
        let sum = match self.coeffs.get(&(i, j)) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.coeffs.remove(&(i, j));
        } else {
            self.coeffs.insert((i, j), sum);
        }
    }

    pub fn vars(&self) -> (char, char) {
        self.vars
    }

    pub fn order_x(&self) -> usize {
        self.order_x
    }

    pub fn order_y(&self) -> usize {
        self.order_y
    }

    pub fn coeff(&self, i: usize, j: usize) -> Scalar {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.coeffs.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The polynomial in `x` multiplying `y^j`, as a series of order `order_x`.
    pub fn coefficient_of_y(&self, j: usize) -> TruncatedSeries {
        let coeffs = (0..=self.order_x).map(|i| self.coeff(i, j)).collect();
        TruncatedSeries::new(self.vars.0, coeffs, self.order_x)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_terms(
            self.vars,
            self.order_x,
            self.order_y,
            self.terms().map(|(i, j, a)| (i, j, a * c)),
        )
    }

    /// Evaluate at a point.
    pub fn evaluate(&self, x: &Scalar, y: &Scalar) -> Scalar {
        self.terms().fold(Scalar::zero(), |acc, (i, j, c)| {
            let xi = x.pow(i as i64).expect("nonnegative power");
            let yj = y.pow(j as i64).expect("nonnegative power");
            &acc + &(&(c * &xi) * &yj)
        })
    }
}

impl fmt::Display for BivariateTruncated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        // ascending in y, then in x
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by_key(|&(i, j, _)| (j, i));
        let mut out = String::new();
        for (i, j, c) in terms {
            let mut sym = Vec::new();
            match i {
                0 => {}
                1 => sym.push(self.vars.0.to_string()),
                _ => sym.push(format!("{}^{}", self.vars.0, i)),
            }
            match j {
                0 => {}
                1 => sym.push(self.vars.1.to_string()),
                _ => sym.push(format!("{}^{}", self.vars.1, j)),
            }
            let sym = sym.join(" ");
            let term = c.to_string();
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) if c.as_monomial().is_some() => (true, rest.to_string()),
                _ => (false, term),
            };
            let body = match (body.as_str(), sym.is_empty()) {
                (_, true) => body,
                ("1", false) => sym,
                (b, false) if c.as_monomial().is_some() => format!("{b} {sym}"),
                (b, false) => format!("({b}) {sym}"),
            };
            match (out.is_empty(), neg) {
                (true, false) => out.push_str(&body),
                (true, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (false, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (false, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn coefficient_of_y_examples() {
        // p = y + x y^2
        let p = BivariateTruncated::from_terms(('x', 'y'), 2, 3, [(0, 1, int(1)), (1, 2, int(1))]);
        assert_eq!(p.coefficient_of_y(2), TruncatedSeries::variable('x', 2));
        assert_eq!(p.coefficient_of_y(1), TruncatedSeries::constant('x', int(1), 2));
        let q = BivariateTruncated::from_terms(('x', 'y'), 0, 3, [(0, 1, int(3)), (0, 3, int(7))]);
        assert!(q.coefficient_of_y(2).is_zero());
    }

    #[test]
    fn zero_terms_are_not_stored() {
        let p = BivariateTruncated::from_terms(('x', 'y'), 1, 1, [(1, 1, int(2)), (1, 1, int(-2))]);
        assert!(p.is_zero());
        assert_eq!(p.terms().count(), 0);
    }

    #[test]
    fn display_orders_by_y_then_x() {
        let p = BivariateTruncated::from_terms_fitted(
            ('t', 'y'),
            [(2, 2, int(1)), (1, 0, int(1)), (1, 1, int(2))],
        );
        assert_eq!(p.to_string(), "t + 2 t y + t^2 y^2");
    }
}
