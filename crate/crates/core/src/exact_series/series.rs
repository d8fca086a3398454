use std::fmt;

use crate::error::{Error, Result};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::scalar::{monomial_symbols, Rational, Scalar, SymbolStyle};

/// Dense univariate power series truncated at a fixed order.
///
/// `coeffs[i]` is the coefficient of `var^i`; there are always `order + 1` of
/// them and nothing beyond `order` is ever represented.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruncatedSeries {
    var: char,
    coeffs: Vec<Scalar>,
}

impl TruncatedSeries {
    /// Builds a series, padding with zeros or dropping terms above `order`.
    pub fn new(var: char, mut coeffs: Vec<Scalar>, order: usize) -> Self {
        coeffs.resize(order + 1, Scalar::zero());
        TruncatedSeries { var, coeffs }
    }

    pub fn zero(var: char, order: usize) -> Self {
        Self::new(var, Vec::new(), order)
    }

    pub fn constant(var: char, c: Scalar, order: usize) -> Self {
        Self::new(var, vec![c], order)
    }

    /// The series `var` itself (requires `order >= 1` to be nonzero).
    pub fn variable(var: char, order: usize) -> Self {
        Self::new(var, vec![Scalar::zero(), Scalar::one()], order)
    }

    /// `c var^n`.
    pub fn monomial(var: char, c: Scalar, n: usize, order: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); order + 1];
        if n <= order {
            coeffs[n] = c;
        }
        TruncatedSeries { var, coeffs }
    }

    pub fn var(&self) -> char {
        self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    /// Coefficient of `var^i` (zero above the order).
    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    /// Least power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Highest power with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| !c.is_zero())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VariableMismatch {
                left: self.var,
                right: other.var,
            });
        }
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(TruncatedSeries {
            var: self.var,
            coeffs,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(TruncatedSeries {
            var: self.var,
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            var: self.var,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        TruncatedSeries {
            var: self.var,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(TruncatedSeries {
            var: self.var,
            coeffs: mul_truncated(&self.coeffs, &other.coeffs, self.order()),
        })
    }

    /// `self ∘ inner`, truncating after every Horner step.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check_compatible(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        Ok(TruncatedSeries {
            var: self.var,
            coeffs: compose_truncated(&self.coeffs, &inner.coeffs, self.order()),
        })
    }

    /// Compositional inverse `u` with `self ∘ u = var = u ∘ self`, solved one
    /// coefficient at a time.
    pub fn compose_inverse(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        let order = self.order();
        if order == 0 {
            return Ok(self.clone());
        }
        let lead_inv = self.coeffs[1]
            .checked_inv()
            .map_err(|_| Error::NotInvertible(format!("leading coefficient {}", self.coeffs[1])))?;
        // solve u∘s = y: the y^r coefficient is sum_j u_j [s^j]_r with [s^r]_r = s_1^r
        let mut powers = vec![self.coeffs.clone()];
        for _ in 2..=order {
            let next = mul_truncated(powers.last().expect("nonempty"), &self.coeffs, order);
            powers.push(next);
        }
        let mut u = vec![Scalar::zero(); order + 1];
        u[1] = lead_inv.clone();
        let mut lead_inv_pow = lead_inv.clone();
        for r in 2..=order {
            lead_inv_pow = &lead_inv_pow * &lead_inv;
            let mut acc = Scalar::zero();
            for j in 1..r {
                acc = &acc + &(&u[j] * &powers[j - 1][r]);
            }
            u[r] = -&(&acc * &lead_inv_pow);
        }
        Ok(TruncatedSeries {
            var: self.var,
            coeffs: u,
        })
    }

    /// Keep terms up to `order` (must not exceed the current order).
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::OrderMismatch {
                left: order,
                right: self.order(),
            });
        }
        Ok(TruncatedSeries {
            var: self.var,
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    /// Pad with zero coefficients up to `order` (must not be below the current order).
    pub fn extend(&self, order: usize) -> Result<Self> {
        if order < self.order() {
            return Err(Error::OrderMismatch {
                left: order,
                right: self.order(),
            });
        }
        Ok(Self::new(self.var, self.coeffs.clone(), order))
    }

    /// Formal derivative; the top coefficient becomes zero.
    pub fn derivative(&self) -> Self {
        let order = self.order();
        let coeffs = (0..=order)
            .map(|i| match self.coeffs.get(i + 1) {
                Some(c) => c * &Scalar::from_int(i as i64 + 1),
                None => Scalar::zero(),
            })
            .collect();
        TruncatedSeries {
            var: self.var,
            coeffs,
        }
    }

    /// Apply `f` to every coefficient.
    pub fn map_coeffs<F>(&self, f: F) -> Self
    where
        F: FnMut(&Scalar) -> Scalar,
    {
        TruncatedSeries {
            var: self.var,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn try_map_coeffs<F>(&self, f: F) -> Result<Self>
    where
        F: FnMut(&Scalar) -> Result<Scalar>,
    {
        Ok(TruncatedSeries {
            var: self.var,
            coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// Evaluate the polynomial at a point.
    pub fn evaluate(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn fmt_with(&self, style: &SymbolStyle<'_>) -> String {
        format_polynomial(&self.coeffs, self.var, style)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&SymbolStyle::default()))
    }
}

/// Cauchy product of two coefficient slices, keeping powers `0..=order`.
pub(crate) fn mul_truncated(a: &[Scalar], b: &[Scalar], order: usize) -> Vec<Scalar> {
    if let (Some(x), Some(y)) = (integer_form(a), integer_form(b)) {
        return mul_integer(&x, &y, order);
    }
    let mut out = vec![Scalar::zero(); order + 1];
    for (i, ai) in a.iter().enumerate().take(order + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(order + 1 - i) {
            if bj.is_zero() {
                continue;
            }
            out[i + j] = &out[i + j] + &(ai * bj);
        }
    }
    out
}

/// Horner evaluation of `outer` at `inner` with truncation at every step.
/// `inner` must have zero constant term.
pub(crate) fn compose_truncated(outer: &[Scalar], inner: &[Scalar], order: usize) -> Vec<Scalar> {
    let top = outer.len().min(order + 1);
    if let (Some(a), Some(b)) = (integer_form(&outer[..top]), integer_form(inner)) {
        return compose_integer(&a, &b, order);
    }
    let mut acc = vec![Scalar::zero(); order + 1];
    for c in outer[..top].iter().rev() {
        acc = mul_truncated(&acc, inner, order);
        acc[0] = &acc[0] + c;
    }
    acc
}

/// Coefficients as integers over one common denominator, when all are rational.
fn integer_form(c: &[Scalar]) -> Option<(Vec<BigInt>, BigInt)> {
    let rats: Vec<&Rational> = c.iter().map(Scalar::as_rational).collect::<Option<_>>()?;
    let den = rats.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let nums = rats.iter().map(|q| q.numer() * (&den / q.denom())).collect();
    Some((nums, den))
}

fn convolve(a: &[BigInt], b: &[BigInt], order: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn mul_integer(a: &(Vec<BigInt>, BigInt), b: &(Vec<BigInt>, BigInt), order: usize) -> Vec<Scalar> {
    let den = &a.1 * &b.1;
    convolve(&a.0, &b.0, order)
        .into_iter()
        .map(|x| Scalar::from_rational(Rational::new(x, den.clone())))
        .collect()
}

/// Homogeneous Horner over the integers, reducing once per coefficient:
/// `sum A_j (B/d)^j / D = (sum A_j B^j d^(n-j)) / (D d^n)`.
fn compose_integer(outer: &(Vec<BigInt>, BigInt), inner: &(Vec<BigInt>, BigInt), order: usize) -> Vec<Scalar> {
    let (a, da) = outer;
    let (b, db) = inner;
    let n = a.len().saturating_sub(1);
    let mut acc = vec![BigInt::zero(); order + 1];
    let mut dpow = BigInt::one();
    for c in a.iter().rev() {
        let mut next = convolve(&acc, b, order);
        next[0] += c * &dpow;
        dpow *= db;
        acc = next;
    }
    let den = da * num_traits::pow(db.clone(), n);
    acc.into_iter()
        .map(|x| Scalar::from_rational(Rational::new(x, den.clone())))
        .collect()
}

/// Canonical text for `sum c_i var^i`: ascending powers, unit coefficients
/// dropped, compound coefficients parenthesised.
pub(crate) fn format_polynomial(coeffs: &[Scalar], var: char, style: &SymbolStyle<'_>) -> String {
    let mut out = String::new();
    for (n, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let power = match n {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{n}"),
        };
        let (negative, body) = format_coefficient_times(c, &power, style);
        match (out.is_empty(), negative) {
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
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Returns `(is_negative, unsigned text)` for `c * power`.
fn format_coefficient_times(c: &Scalar, power: &str, style: &SymbolStyle<'_>) -> (bool, String) {
    let join = |a: String, b: &str| -> String {
        match (a.is_empty(), b.is_empty()) {
            (true, _) => b.to_string(),
            (_, true) => a,
            _ => format!("{a} {b}"),
        }
    };
    if let Some((r, j, m)) = c.as_monomial() {
        let negative = r < num_traits::Zero::zero();
        let abs = if negative { -r } else { r };
        let symbols = monomial_symbols(j, m, style);
        let coeff = if num_traits::One::is_one(&abs) && !(symbols.is_empty() && power.is_empty()) {
            String::new()
        } else {
            abs.to_string()
        };
        return (negative, join(join(coeff, &symbols), power));
    }
    (false, join(format!("({})", c.fmt_with(style)), power))
}
