//! Exact coefficient ring.
//!
//! A [`Scalar`] is an element of `Q(E)[t]`: a polynomial in the time symbol `t`
//! whose coefficients are rational functions of one transcendental symbol `E`
//! (standing for `e^a` for a fixed rational `a`). Plain rationals, Laurent
//! polynomials in `E` and polynomials in `t` over either are all special cases
//! and are stored canonically, so structural equality is mathematical equality.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shorthand for a rational `p/q`. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Dense polynomial in `E` with rational coefficients; index is the power.
/// Trailing zeros are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub(crate) struct EPoly(Vec<Rational>);

impl EPoly {
    fn trimmed(mut v: Vec<Rational>) -> Self {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        EPoly(v)
    }

    fn zero() -> Self {
        EPoly(Vec::new())
    }

    fn one() -> Self {
        EPoly(vec![Rational::one()])
    }

    fn constant(c: Rational) -> Self {
        Self::trimmed(vec![c])
    }

    fn monomial(c: Rational, deg: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rational::zero(); deg + 1];
        v[deg] = c;
        EPoly(v)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> &Rational {
        self.0.last().expect("leading coefficient of zero polynomial")
    }

    fn valuation(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    fn is_monomial(&self) -> bool {
        !self.is_zero() && self.0.iter().filter(|c| !c.is_zero()).count() == 1
    }

    fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let zero = Rational::zero();
        let v = (0..n)
            .map(|i| self.0.get(i).unwrap_or(&zero) + other.0.get(i).unwrap_or(&zero))
            .collect();
        Self::trimmed(v)
    }

    fn neg(&self) -> Self {
        EPoly(self.0.iter().map(|c| -c).collect())
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::trimmed(v)
    }

    fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        EPoly(self.0.iter().map(|a| a * c).collect())
    }

    fn shift(&self, n: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rational::zero(); n];
        v.extend(self.0.iter().cloned());
        EPoly(v)
    }

    fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc_inv = d.lead().recip();
        let mut rem = self.0.clone();
        let mut quot = vec![Rational::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] * &lc_inv;
            if !c.is_zero() {
                let shift = top - dd;
                for (i, di) in d.0.iter().enumerate() {
                    rem[shift + i] -= &c * di;
                }
                quot[shift] = c;
            }
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Self::trimmed(quot), Self::trimmed(rem))
    }

    fn exact_div(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lead().recip())
    }

    /// Monic greatest common divisor.
    fn gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_monomial() {
            return EPoly::monomial(Rational::one(), a.valuation().min(b.valuation()));
        }
        if b.is_monomial() {
            return EPoly::monomial(Rational::one(), b.valuation().min(a.valuation()));
        }
        let (mut x, mut y) = (a.monic(), b.monic());
        while !y.is_zero() {
            let (_, r) = x.div_rem(&y);
            x = y;
            y = r.monic();
        }
        x
    }

    /// `E * d/dE`.
    fn euler(&self) -> Self {
        Self::trimmed(
            self.0
                .iter()
                .enumerate()
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// `p(E^n)` for `n >= 0`.
    fn spread(&self, n: usize) -> Self {
        if n == 0 {
            let s = self.0.iter().fold(Rational::zero(), |acc, c| acc + c);
            return Self::constant(s);
        }
        let mut v = vec![Rational::zero(); self.0.len().saturating_sub(1) * n + 1];
        for (i, c) in self.0.iter().enumerate() {
            v[i * n] = c.clone();
        }
        Self::trimmed(v)
    }

    /// `p(E^-n)` for `n > 0`, returned as `q(E) / E^shift`.
    fn spread_negative(&self, n: usize) -> (Self, usize) {
        let Some(deg) = self.degree() else {
            return (Self::zero(), 0);
        };
        let mut v = vec![Rational::zero(); deg * n + 1];
        for (i, c) in self.0.iter().enumerate() {
            v[(deg - i) * n] = c.clone();
        }
        (Self::trimmed(v), deg * n)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Symbolic {
    /// Coefficients of `t^0, t^1, ...`; never empty, last entry nonzero.
    num: Vec<EPoly>,
    /// Monic, coprime to every entry of `num`.
    den: EPoly,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Rat(Rational),
    Sym(Box<Symbolic>),
}

/// Exact element of `Q(E)[t]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar(Repr);

/// How the formal symbols are rendered.
#[derive(Clone, Debug)]
pub struct SymbolStyle<'a> {
    /// Name printed for the time symbol.
    pub time: &'a str,
    /// When set, `E^m` is printed as `E^(m s)` with `s` this symbol.
    pub exp_multiplier: Option<&'a str>,
}

impl Default for SymbolStyle<'_> {
    fn default() -> Self {
        SymbolStyle {
            time: "t",
            exp_multiplier: None,
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Rat(Rational::zero()))
    }

    pub fn one() -> Self {
        Scalar(Repr::Rat(Rational::one()))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(Repr::Rat(Rational::from_integer(BigInt::from(n))))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar(Repr::Rat(r))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar(Repr::Rat(rat(p, q)))
    }

    /// `E^m` for any integer `m`.
    pub fn exp_power(m: i64) -> Self {
        let deg = m.unsigned_abs() as usize;
        if m >= 0 {
            Self::normalize(vec![EPoly::monomial(Rational::one(), deg)], EPoly::one())
        } else {
            Self::normalize(vec![EPoly::one()], EPoly::monomial(Rational::one(), deg))
        }
    }

    /// The exponential symbol `E`.
    pub fn exp_symbol() -> Self {
        Self::exp_power(1)
    }

    /// `t^j`.
    pub fn time_power(j: usize) -> Self {
        let mut num = vec![EPoly::zero(); j];
        num.push(EPoly::one());
        Self::normalize(num, EPoly::one())
    }

    /// The time symbol `t`.
    pub fn time_symbol() -> Self {
        Self::time_power(1)
    }

    fn normalize(mut num: Vec<EPoly>, mut den: EPoly) -> Self {
        while num.last().is_some_and(EPoly::is_zero) {
            num.pop();
        }
        if num.is_empty() {
            return Self::zero();
        }
        if !den.is_one() {
            let mut g = den.monic();
            for c in &num {
                if g.is_one() {
                    break;
                }
                if !c.is_zero() {
                    g = EPoly::gcd(&g, c);
                }
            }
            if !g.is_one() {
                den = den.exact_div(&g);
                for c in &mut num {
                    if !c.is_zero() {
                        *c = c.exact_div(&g);
                    }
                }
            }
            let lc = den.lead().clone();
            if !lc.is_one() {
                let inv = lc.recip();
                den = den.scale(&inv);
                for c in &mut num {
                    *c = c.scale(&inv);
                }
            }
        }
        if den.is_one() && num.len() == 1 && num[0].degree().unwrap_or(0) == 0 {
            let c = num[0].0.first().cloned().unwrap_or_else(Rational::zero);
            return Scalar(Repr::Rat(c));
        }
        Scalar(Repr::Sym(Box::new(Symbolic { num, den })))
    }

    fn parts(&self) -> (Vec<EPoly>, EPoly) {
        match &self.0 {
            Repr::Rat(r) => (vec![EPoly::constant(r.clone())], EPoly::one()),
            Repr::Sym(s) => (s.num.clone(), s.den.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Rat(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Rat(r) if r.is_one())
    }

    /// The rational value, when the scalar involves no symbol.
    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.0 {
            Repr::Rat(r) => Some(r),
            Repr::Sym(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Integer value, when the scalar is a rational integer fitting in `i64`.
    pub fn as_integer(&self) -> Option<i64> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .and_then(|r| r.to_integer().to_i64())
    }

    /// Degree in the time symbol `t` (0 for constants and for zero).
    pub fn time_degree(&self) -> usize {
        match &self.0 {
            Repr::Rat(_) => 0,
            Repr::Sym(s) => s.num.len() - 1,
        }
    }

    pub fn is_time_free(&self) -> bool {
        self.time_degree() == 0
    }

    /// Whether the scalar involves the exponential symbol `E`.
    pub fn involves_exp(&self) -> bool {
        match &self.0 {
            Repr::Rat(_) => false,
            Repr::Sym(s) => !s.den.is_one() || s.num.iter().any(|c| c.degree().unwrap_or(0) > 0),
        }
    }

    pub fn checked_inv(&self) -> Result<Self> {
        match &self.0 {
            Repr::Rat(r) if r.is_zero() => Err(Error::NotInvertible("0".into())),
            Repr::Rat(r) => Ok(Scalar(Repr::Rat(r.recip()))),
            Repr::Sym(s) => {
                if s.num.len() > 1 {
                    return Err(Error::NotInvertible(self.to_string()));
                }
                Ok(Self::normalize(vec![s.den.clone()], s.num[0].clone()))
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.checked_inv()?)
    }

    /// Integer power; negative exponents require invertibility.
    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.checked_inv()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Scalar::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Sign, deciding `Q(E)` elements with the convention that `E` exceeds every
    /// fixed rational. Exact for rationals and for monomials `c E^m`.
    pub fn sign(&self) -> Result<Ordering> {
        match &self.0 {
            Repr::Rat(r) => Ok(r.cmp(&Rational::zero())),
            Repr::Sym(s) => {
                if s.num.len() > 1 {
                    return Err(Error::UndecidableSign(self.to_string()));
                }
                Ok(s.num[0].lead().cmp(&Rational::zero()))
            }
        }
    }

    /// Coefficients of `t^0, t^1, ...`, each free of `t`.
    pub fn time_coefficients(&self) -> Vec<Scalar> {
        match &self.0 {
            Repr::Rat(_) => vec![self.clone()],
            Repr::Sym(s) => s
                .num
                .iter()
                .map(|c| Self::normalize(vec![c.clone()], s.den.clone()))
                .collect(),
        }
    }

    /// `sum_j c_j t^j`; the `c_j` must be free of `t`.
    pub fn from_time_coefficients(coeffs: &[Scalar]) -> Self {
        let t = Scalar::time_symbol();
        coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| &(&acc * &t) + c)
    }

    /// Replace `t` by `value`.
    pub fn substitute_time(&self, value: &Scalar) -> Scalar {
        if self.is_time_free() {
            return self.clone();
        }
        self.time_coefficients()
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| &(&acc * value) + c)
    }

    /// Formal derivative with respect to `t`.
    pub fn time_derivative(&self) -> Scalar {
        let c = self.time_coefficients();
        let d: Vec<Scalar> = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, cj)| cj * &Scalar::from_int(j as i64))
            .collect();
        Self::from_time_coefficients(&d)
    }

    /// `integral_0^t` of the scalar, as a polynomial in `t`.
    pub fn time_integral(&self) -> Scalar {
        let c = self.time_coefficients();
        let mut d = vec![Scalar::zero()];
        d.extend(
            c.iter()
                .enumerate()
                .map(|(j, cj)| cj * &Scalar::ratio(1, j as i64 + 1)),
        );
        Self::from_time_coefficients(&d)
    }

    /// `E d/dE`, the time derivative when `E` stands for `e^t`.
    pub fn exp_euler(&self) -> Scalar {
        match &self.0 {
            Repr::Rat(_) => Scalar::zero(),
            Repr::Sym(s) => {
                let dden = s.den.euler();
                let num = s
                    .num
                    .iter()
                    .map(|n| n.euler().mul(&s.den).sub(&n.mul(&dden)))
                    .collect();
                Self::normalize(num, s.den.mul(&s.den))
            }
        }
    }

    /// Replace `E` by `E^n`. Fails only when `n = 0` makes the denominator vanish.
    pub fn substitute_exp_power(&self, n: i64) -> Result<Scalar> {
        let Repr::Sym(s) = &self.0 else {
            return Ok(self.clone());
        };
        if n == 1 {
            return Ok(self.clone());
        }
        if n >= 0 {
            let k = n as usize;
            let den = s.den.spread(k);
            if den.is_zero() {
                return Err(Error::Domain(format!("{self} has a pole at E = 1")));
            }
            let num = s.num.iter().map(|c| c.spread(k)).collect();
            return Ok(Self::normalize(num, den));
        }
        let k = n.unsigned_abs() as usize;
        let (den, den_shift) = s.den.spread_negative(k);
        let mut num = Vec::with_capacity(s.num.len());
        let mut shifts = Vec::with_capacity(s.num.len());
        for c in &s.num {
            let (p, sh) = c.spread_negative(k);
            num.push(p);
            shifts.push(sh);
        }
        // value = (p_j / E^{sh_j}) / (den / E^{den_shift})
        let max_shift = shifts.iter().copied().max().unwrap_or(0);
        let num = num
            .into_iter()
            .zip(shifts)
            .map(|(p, sh)| p.shift(max_shift - sh + den_shift))
            .collect();
        Ok(Self::normalize(num, den.shift(max_shift)))
    }

    /// Terms `(t-degree, E-degree, coefficient)` when the denominator is a power
    /// of `E` (i.e. the scalar is a Laurent polynomial in `E` over `Q[t]`).
    pub fn laurent_terms(&self) -> Option<Vec<(usize, i64, Rational)>> {
        match &self.0 {
            Repr::Rat(r) if r.is_zero() => Some(Vec::new()),
            Repr::Rat(r) => Some(vec![(0, 0, r.clone())]),
            Repr::Sym(s) => {
                if !(s.den.is_one() || s.den.is_monomial()) {
                    return None;
                }
                let m = s.den.valuation() as i64;
                let mut out = Vec::new();
                for (j, p) in s.num.iter().enumerate() {
                    for (i, c) in p.0.iter().enumerate() {
                        if !c.is_zero() {
                            out.push((j, i as i64 - m, c.clone()));
                        }
                    }
                }
                Some(out)
            }
        }
    }

    /// Inverse of [`Scalar::laurent_terms`].
    pub fn from_laurent_terms<I>(terms: I) -> Scalar
    where
        I: IntoIterator<Item = (usize, i64, Rational)>,
    {
        terms.into_iter().fold(Scalar::zero(), |acc, (j, m, c)| {
            let mono = &(&Scalar::time_power(j) * &Scalar::exp_power(m)) * &Scalar::from_rational(c);
            &acc + &mono
        })
    }

    /// `(c, j, m)` when the scalar is a single nonzero monomial `c t^j E^m`.
    pub fn as_monomial(&self) -> Option<(Rational, usize, i64)> {
        let terms = self.laurent_terms()?;
        match terms.as_slice() {
            [(j, m, c)] => Some((c.clone(), *j, *m)),
            _ => None,
        }
    }

    /// Exact real `n`-th root inside the ring, preferring the positive root.
    /// Supported for rationals and monomials `c E^m`.
    pub fn exact_root(&self, n: u32) -> Option<Scalar> {
        if n == 1 {
            return Some(self.clone());
        }
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        let (c, j, m) = self.as_monomial()?;
        if j != 0 || m % n as i64 != 0 {
            return None;
        }
        let root_int = |x: &BigInt| -> Option<BigInt> {
            if x.is_negative() {
                if n % 2 == 0 {
                    return None;
                }
                let r = (-x).nth_root(n);
                (r.pow(n) == -x).then(|| -r)
            } else {
                let r = x.nth_root(n);
                (r.pow(n) == *x).then_some(r)
            }
        };
        let num = root_int(c.numer())?;
        let den = root_int(c.denom())?;
        let c_root = Scalar::from_rational(Rational::new(num, den));
        Some(&c_root * &Scalar::exp_power(m / n as i64))
    }

    pub fn fmt_with(&self, style: &SymbolStyle<'_>) -> String {
        match &self.0 {
            Repr::Rat(r) => r.to_string(),
            Repr::Sym(s) => match self.laurent_terms() {
                Some(terms) => format_sum(&terms, style),
                None => {
                    let num_terms: Vec<(usize, i64, Rational)> = s
                        .num
                        .iter()
                        .enumerate()
                        .flat_map(|(j, p)| {
                            p.0.iter()
                                .enumerate()
                                .filter(|(_, c)| !c.is_zero())
                                .map(move |(i, c)| (j, i as i64, c.clone()))
                        })
                        .collect();
                    let den_terms: Vec<(usize, i64, Rational)> = s
                        .den
                        .0
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(i, c)| (0, i as i64, c.clone()))
                        .collect();
                    format!(
                        "({})/({})",
                        format_sum(&num_terms, style),
                        format_sum(&den_terms, style)
                    )
                }
            },
        }
    }
}

/// Symbol part of a monomial, e.g. `t^2 E^-1`; empty for constants.
pub(crate) fn monomial_symbols(j: usize, m: i64, style: &SymbolStyle<'_>) -> String {
    let mut parts = Vec::new();
    match j {
        0 => {}
        1 => parts.push(style.time.to_string()),
        _ => parts.push(format!("{}^{}", style.time, j)),
    }
    if m != 0 {
        match style.exp_multiplier {
            None if m == 1 => parts.push("E".to_string()),
            None => parts.push(format!("E^{m}")),
            Some(s) if m == 1 => parts.push(format!("E^{s}")),
            Some(s) if m == -1 => parts.push(format!("E^(-{s})")),
            Some(s) => parts.push(format!("E^({m}{s})")),
        }
    }
    parts.join(" ")
}

/// A monomial with a nonnegative coefficient, e.g. `3/2 t^2`.
fn format_unsigned_monomial(c: &Rational, symbols: &str) -> String {
    if symbols.is_empty() {
        c.to_string()
    } else if c.is_one() {
        symbols.to_string()
    } else {
        format!("{c} {symbols}")
    }
}

fn format_sum(terms: &[(usize, i64, Rational)], style: &SymbolStyle<'_>) -> String {
    let mut sorted = terms.to_vec();
    sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut out = String::new();
    for (idx, (j, m, c)) in sorted.iter().enumerate() {
        let symbols = monomial_symbols(*j, *m, style);
        let body = format_unsigned_monomial(&c.abs(), &symbols);
        match (idx, c.is_negative()) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
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

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(&SymbolStyle::default()))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::from_rational(r)
    }
}

impl Add for &Scalar {
    type Output = Scalar;

    fn add(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => Scalar(Repr::Rat(a + b)),
            _ => {
                let (n1, d1) = self.parts();
                let (n2, d2) = rhs.parts();
                let len = n1.len().max(n2.len());
                let zero = EPoly::zero();
                if d1 == d2 {
                    let num = (0..len)
                        .map(|i| n1.get(i).unwrap_or(&zero).add(n2.get(i).unwrap_or(&zero)))
                        .collect();
                    Scalar::normalize(num, d1)
                } else {
                    let num = (0..len)
                        .map(|i| {
                            n1.get(i)
                                .unwrap_or(&zero)
                                .mul(&d2)
                                .add(&n2.get(i).unwrap_or(&zero).mul(&d1))
                        })
                        .collect();
                    Scalar::normalize(num, d1.mul(&d2))
                }
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Rat(a) => Scalar(Repr::Rat(-a)),
            Repr::Sym(s) => Scalar(Repr::Sym(Box::new(Symbolic {
                num: s.num.iter().map(EPoly::neg).collect(),
                den: s.den.clone(),
            }))),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => Scalar(Repr::Rat(a - b)),
            _ => self + &(-rhs),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Rat(a), Repr::Rat(b)) => Scalar(Repr::Rat(a * b)),
            (Repr::Rat(a), Repr::Sym(s)) | (Repr::Sym(s), Repr::Rat(a)) => {
                if a.is_zero() {
                    return Scalar::zero();
                }
                // scaling by a unit keeps the representation canonical
                Scalar(Repr::Sym(Box::new(Symbolic {
                    num: s.num.iter().map(|p| p.scale(a)).collect(),
                    den: s.den.clone(),
                })))
            }
            (Repr::Sym(x), Repr::Sym(y)) => {
                let mut num = vec![EPoly::zero(); x.num.len() + y.num.len() - 1];
                for (i, a) in x.num.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    for (j, b) in y.num.iter().enumerate() {
                        num[i + j] = num[i + j].add(&a.mul(b));
                    }
                }
                Scalar::normalize(num, x.den.mul(&y.den))
            }
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Extended gcd on machine integers: returns `(g, x, y)` with `a x + b y = g`.
pub(crate) fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    (e.gcd, e.x, e.y)
}
