//! The holonomy groupoid of the model foliation on the line: pairs of
//! nonzero points glued to `J^k` over the origin, its `Ω` chart, and the
//! separation of chart images.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_series::{BivariateTruncated, Rational, Scalar, TruncatedSeries};
use crate::jet_groups::{jet_embed_translation, Jet, JET_VAR};

/// An arrow of `(R∖{0})² ∪ J^k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GroupoidElement {
    /// From `source` to `target`, both nonzero.
    Pair { target: Rational, source: Rational },
    /// An isotropy arrow at the origin.
    Jet(Jet),
}

impl GroupoidElement {
    pub fn pair(target: Rational, source: Rational) -> Result<Self> {
        if target.is_zero() || source.is_zero() {
            return Err(Error::Domain("pair arrows join nonzero points".into()));
        }
        Ok(GroupoidElement::Pair { target, source })
    }

    /// The unit at `point`; at the origin it is the identity of `J^k`.
    pub fn unit(point: &Rational, k: usize) -> Self {
        if point.is_zero() {
            GroupoidElement::Jet(Jet::identity(k))
        } else {
            GroupoidElement::Pair {
                target: point.clone(),
                source: point.clone(),
            }
        }
    }

    pub fn source(&self) -> Rational {
        match self {
            GroupoidElement::Pair { source, .. } => source.clone(),
            GroupoidElement::Jet(_) => Rational::zero(),
        }
    }

    pub fn target(&self) -> Rational {
        match self {
            GroupoidElement::Pair { target, .. } => target.clone(),
            GroupoidElement::Jet(_) => Rational::zero(),
        }
    }

    pub fn is_unit(&self) -> bool {
        match self {
            GroupoidElement::Pair { target, source } => target == source,
            GroupoidElement::Jet(j) => j.is_identity(),
        }
    }

    /// `self · other`, defined when `source(self) = target(other)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (
                GroupoidElement::Pair { target, source },
                GroupoidElement::Pair {
                    target: t2,
                    source: s2,
                },
            ) => {
                if source != t2 {
                    return Err(Error::Domain(format!(
                        "cannot compose: source {source} differs from target {t2}"
                    )));
                }
                Ok(GroupoidElement::Pair {
                    target: target.clone(),
                    source: s2.clone(),
                })
            }
            (GroupoidElement::Jet(a), GroupoidElement::Jet(b)) => Ok(GroupoidElement::Jet(a.mul(b)?)),
            _ => Err(Error::Domain(
                "cannot compose an arrow at the origin with one between nonzero points".into(),
            )),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupoidElement::Pair { target, source } => GroupoidElement::Pair {
                target: source.clone(),
                source: target.clone(),
            },
            GroupoidElement::Jet(j) => GroupoidElement::Jet(j.inv()),
        }
    }
}

impl fmt::Display for GroupoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupoidElement::Pair { target, source } => write!(f, "Pair({target}, {source})"),
            GroupoidElement::Jet(j) => write!(f, "Jet({j})"),
        }
    }
}

/// The two connected components.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Component {
    /// `J^k_+`, `(R_-)²` and `(R_+)²`.
    Positive,
    /// `J^k_-`, `R_- × R_+` and `R_+ × R_-`.
    Negative,
}

impl Component {
    /// The sign group law.
    pub fn times(self, other: Component) -> Component {
        if self == other {
            Component::Positive
        } else {
            Component::Negative
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::Positive => "positive_component",
            Component::Negative => "negative_component",
        })
    }
}

pub fn component_of(g: &GroupoidElement) -> Result<Component> {
    let positive = match g {
        GroupoidElement::Pair { target, source } => target.is_positive() == source.is_positive(),
        GroupoidElement::Jet(j) => j.is_orientation_preserving()?,
    };
    Ok(if positive {
        Component::Positive
    } else {
        Component::Negative
    })
}

/// Rational coefficients `a_0, a_1, ...` of a polynomial in `y`.
fn rational_coeffs(p: &TruncatedSeries, what: &str) -> Result<Vec<Rational>> {
    p.coeffs()
        .iter()
        .map(|c| {
            c.as_rational()
                .cloned()
                .ok_or_else(|| Error::UnsupportedRing(format!("{what} needs rational coefficients, found {c}")))
        })
        .collect()
}

fn eval(a: &[Rational], y: &Rational) -> Rational {
    a.iter().rev().fold(Rational::zero(), |acc, c| acc * y + c)
}

fn pow(y: &Rational, n: usize) -> Rational {
    num_traits::pow(y.clone(), n)
}

/// `y + t y^k`.
fn tau(t: &Rational, y: &Rational, k: usize) -> Rational {
    y + t * pow(y, k)
}

fn check_omega(t: &Rational, y: &Rational, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::validation("transverse order", "k must be at least 2"));
    }
    if (Rational::one() + t * pow(y, k - 1)).is_positive() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "(t, y) = ({t}, {y}) lies outside Omega: 1 + t y^{} <= 0",
            k - 1
        )))
    }
}

/// A point of the chart `Ω = {1 + t y^{k-1} > 0}` twisted by `θ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OmegaPoint {
    t: Rational,
    y: Rational,
    theta: Jet,
}

impl OmegaPoint {
    pub fn new(t: Rational, y: Rational, theta: Jet, k: usize) -> Result<Self> {
        check_omega(&t, &y, k)?;
        if theta.order() < k {
            return Err(Error::validation(
                "twisting jet",
                format!("order {} is below k = {k}", theta.order()),
            ));
        }
        Ok(OmegaPoint { t, y, theta })
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn theta(&self) -> &Jet {
        &self.theta
    }
}

/// `(t, y) ↦ (θ(y + t y^k), y)` off the origin and `j^k θ ∘ (y + t y^k)` on it.
pub fn omega_chart(p: &OmegaPoint, k: usize) -> Result<GroupoidElement> {
    check_omega(&p.t, &p.y, k)?;
    if p.y.is_zero() {
        let theta = p.theta.project(k)?;
        let shift = jet_embed_translation(&Scalar::from_rational(p.t.clone()), k)?;
        return Ok(GroupoidElement::Jet(theta.mul(&shift)?));
    }
    let a = rational_coeffs(p.theta.series(), "the twisting polynomial")?;
    let image = eval(&a, &tau(&p.t, &p.y, k));
    if image.is_zero() {
        return Err(Error::Domain(format!(
            "theta(y + t y^{k}) vanishes at (t, y) = ({}, {})",
            p.t, p.y
        )));
    }
    GroupoidElement::pair(image, p.y.clone())
}

fn binomial(n: usize, r: usize) -> Rational {
    let mut b = Rational::one();
    for i in 0..r {
        b = b * Rational::from_integer((n - i).into()) / Rational::from_integer((i + 1).into());
    }
    b
}

/// The polynomial `f_θ(t, y)` with `θ(y + t y^k) = θ(y) + f_θ(t, y) y^k`.
pub fn f_theta(theta: &TruncatedSeries, k: usize) -> Result<BivariateTruncated> {
    if k < 2 {
        return Err(Error::validation("transverse order", "k must be at least 2"));
    }
    if !theta.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let mut terms = Vec::new();
    for (i, a) in theta.coeffs().iter().enumerate().skip(1) {
        if a.is_zero() {
            continue;
        }
        // a (y + t y^k)^i = a Σ_j C(i, j) t^j y^{i + j(k-1)}
        for j in 1..=i {
            let c = a * &Scalar::from_rational(binomial(i, j));
            terms.push((j, i + j * (k - 1) - k, c));
        }
    }
    Ok(BivariateTruncated::from_terms_fitted(('t', JET_VAR), terms))
}

/// `|y|^{1/2} |f_θ(t, y)| < 1`, tested as `|y| f_θ(t, y)² < 1`.
pub fn in_u_theta(theta: &TruncatedSeries, t: &Rational, y: &Rational, k: usize) -> Result<bool> {
    check_omega(t, y, k)?;
    if !theta.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    Ok(in_u(&IntPoly::new(&rational_coeffs(theta, "theta")?), t, y, k).0)
}

/// Unreduced fraction with positive denominator; avoids gcds in hot loops.
#[derive(Clone, Debug)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn from_rational(q: &Rational) -> Frac {
        Frac {
            num: q.numer().clone(),
            den: q.denom().clone(),
        }
    }

    fn add(&self, o: &Frac) -> Frac {
        Frac {
            num: &self.num * &o.den + &o.num * &self.den,
            den: &self.den * &o.den,
        }
    }

    fn mul(&self, o: &Frac) -> Frac {
        Frac {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
    }

    fn pow(&self, n: usize) -> Frac {
        Frac {
            num: num_traits::pow(self.num.clone(), n),
            den: num_traits::pow(self.den.clone(), n),
        }
    }

    fn same(&self, o: &Frac) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }
}

/// A polynomial with rational coefficients stored as integers over a common
/// denominator.
struct IntPoly {
    coeffs: Vec<BigInt>,
    den: BigInt,
}

impl IntPoly {
    fn new(a: &[Rational]) -> IntPoly {
        let den = a.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let coeffs = a
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        IntPoly { coeffs, den }
    }

    /// Homogeneous Horner at `x = p / q`.
    fn eval(&self, x: &Frac) -> Frac {
        let n = self.coeffs.len().saturating_sub(1);
        let mut acc = BigInt::zero();
        let mut qpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * &x.num + c * &qpow;
            qpow *= &x.den;
        }
        Frac {
            num: acc,
            den: &self.den * num_traits::pow(x.den.clone(), n),
        }
    }
}

/// Membership in `U_θ` and the chart image `θ(y + t y^k)`.
fn in_u(a: &IntPoly, t: &Rational, y: &Rational, k: usize) -> (bool, Frac) {
    let yf = Frac::from_rational(y);
    let yk = yf.pow(k);
    let tau = yf.add(&Frac::from_rational(t).mul(&yk));
    let image = a.eval(&tau);
    if y.is_zero() {
        return (true, image);
    }
    // f = (θ(τ) - θ(y)) / y^k, and |y| f^2 < 1 with every denominator cleared
    let at_y = a.eval(&yf);
    let diff_num = &image.num * &at_y.den - &at_y.num * &image.den;
    let diff_den = &image.den * &at_y.den;
    let f_num = diff_num * &yk.den;
    let f_den = diff_den * &yk.num;
    let lhs = yf.num.abs() * &f_num * &f_num;
    let rhs = yf.den.clone() * &f_den * &f_den;
    (lhs < rhs, image)
}

/// The bound behind a separation radius.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeparationCertificate {
    pub epsilon: Rational,
    /// Lowest degree `d` of `D = θ_1 - θ_2`.
    pub degree: usize,
    pub leading: Rational,
    /// Sum of the absolute values of the coefficients of `D` above degree `d`.
    pub tail: Rational,
}

impl fmt::Display for SeparationCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree;
        let bound = if self.tail.is_zero() {
            self.leading.abs()
        } else {
            self.leading.abs() / Rational::from_integer(2.into())
        };
        writeln!(f, "epsilon = {}", self.epsilon)?;
        writeln!(f, "lowest term of theta1 - theta2: ({}) y^{d}", self.leading)?;
        writeln!(f, "higher coefficients: absolute sum {}", self.tail)?;
        writeln!(
            f,
            "for 0 < |y| < epsilon: |theta1(y) - theta2(y)| >= {bound} |y|^{d} > 2 |y|^(k - 1/2)"
        )?;
        write!(
            f,
            "hence U_theta1 and U_theta2 have disjoint images over 0 < |y| < epsilon"
        )
    }
}

/// A radius `ε` with `|θ_1(y) - θ_2(y)| > 2|y|^{k-1/2}` for `0 < |y| < ε`.
pub fn separation_epsilon(
    theta1: &TruncatedSeries,
    theta2: &TruncatedSeries,
    k: usize,
) -> Result<SeparationCertificate> {
    if k < 2 {
        return Err(Error::validation("transverse order", "k must be at least 2"));
    }
    let a = rational_coeffs(theta1, "theta1")?;
    let b = rational_coeffs(theta2, "theta2")?;
    let n = a.len().max(b.len());
    let get = |v: &[Rational], i: usize| v.get(i).cloned().unwrap_or_else(Rational::zero);
    let diff: Vec<Rational> = (0..n).map(|i| get(&a, i) - get(&b, i)).collect();
    if !diff[0].is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let degree = match diff.iter().position(|c| !c.is_zero()) {
        Some(d) if d < k => d,
        _ => {
            return Err(Error::Domain(format!(
                "theta1 and theta2 have the same {}-jet",
                k - 1
            )))
        }
    };
    let leading = diff[degree].clone();
    let tail: Rational = diff[degree + 1..].iter().map(Signed::abs).sum();
    let sq = &leading * &leading;
    let one = Rational::one();
    let epsilon = if tail.is_zero() {
        std::cmp::min(one, sq / Rational::from_integer(4.into()))
    } else {
        let by_tail = leading.abs() / (Rational::from_integer(2.into()) * &tail);
        std::cmp::min(std::cmp::min(one, by_tail), sq / Rational::from_integer(16.into()))
    };
    Ok(SeparationCertificate {
        epsilon,
        degree,
        leading,
        tail,
    })
}

/// Result of testing the disjointness claim at one sample.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SampleCheck {
    /// One of the points lies outside its `U_θ`, so nothing is claimed.
    Vacuous,
    /// Both points lie in `U_θ` and their images differ.
    Disjoint,
    /// Both points lie in `U_θ` and their images agree: a counterexample.
    Collision,
}

/// Tests whether `θ_1(y + t_1 y^k) ≠ θ_2(y + t_2 y^k)` whenever `(t_1, y)`
/// and `(t_2, y)` lie in the respective `U_θ`.
pub fn check_separation_sample(
    theta1: &TruncatedSeries,
    theta2: &TruncatedSeries,
    k: usize,
    t1: &Rational,
    t2: &Rational,
    y: &Rational,
) -> Result<SampleCheck> {
    check_omega(t1, y, k)?;
    check_omega(t2, y, k)?;
    let (in1, image1) = in_u(&IntPoly::new(&rational_coeffs(theta1, "theta1")?), t1, y, k);
    if !in1 {
        return Ok(SampleCheck::Vacuous);
    }
    let (in2, image2) = in_u(&IntPoly::new(&rational_coeffs(theta2, "theta2")?), t2, y, k);
    Ok(if !in2 {
        SampleCheck::Vacuous
    } else if image1.same(&image2) {
        SampleCheck::Collision
    } else {
        SampleCheck::Disjoint
    })
}

/// An arrow of the gauge picture over the singular leaf, after trivializing
/// along a spanning tree: vertices are labels and the jet is the transport.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaugeArrow {
    pub target: usize,
    pub source: usize,
    pub jet: Jet,
}

impl GaugeArrow {
    pub fn unit(vertex: usize, k: usize) -> Self {
        GaugeArrow {
            target: vertex,
            source: vertex,
            jet: Jet::identity(k),
        }
    }

    pub fn compose(&self, other: &GaugeArrow) -> Result<GaugeArrow> {
        if self.source != other.target {
            return Err(Error::Domain(format!(
                "cannot compose: source vertex {} differs from target vertex {}",
                self.source, other.target
            )));
        }
        let jet = match GroupoidElement::Jet(self.jet.clone()).compose(&GroupoidElement::Jet(other.jet.clone()))? {
            GroupoidElement::Jet(j) => j,
            GroupoidElement::Pair { .. } => unreachable!("jets compose to jets"),
        };
        Ok(GaugeArrow {
            target: self.target,
            source: other.source,
            jet,
        })
    }

    pub fn inverse(&self) -> GaugeArrow {
        GaugeArrow {
            target: self.source,
            source: self.target,
            jet: self.jet.inv(),
        }
    }
}
