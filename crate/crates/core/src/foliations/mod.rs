//! Declarative descriptions of transverse order-k foliations and the
//! coefficient criteria for local defining submersions.

pub(crate) mod spec_file;

use std::fmt;

use crate::error::{Error, Result};
use crate::exact_series::BivariateTruncated;
use crate::flows::VectorField;
use crate::jet_groups::Jet;

pub use spec_file::{parse_spec, print_spec};

/// Finite presentation of the fundamental group of the singular leaf.
///
/// Generators are single lowercase letters; in relators the capital letter
/// stands for the inverse generator.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LeafPresentation {
    generators: Vec<char>,
    relators: Vec<String>,
}

impl LeafPresentation {
    /// Validates the generators and freely reduces the relators; relators that
    /// reduce to the empty word are dropped.
    pub fn new(generators: Vec<char>, relators: Vec<String>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if !g.is_ascii_lowercase() {
                return Err(Error::validation(
                    "generator",
                    format!("'{g}' is not a single lowercase letter"),
                ));
            }
            if generators[..i].contains(g) {
                return Err(Error::validation("generator", format!("'{g}' is listed twice")));
            }
        }
        let mut reduced = Vec::new();
        for r in relators {
            let word: Vec<char> = r.chars().filter(|c| !c.is_whitespace()).collect();
            for c in &word {
                if !c.is_ascii_alphabetic() || !generators.contains(&c.to_ascii_lowercase()) {
                    return Err(Error::validation(
                        "relator",
                        format!("\"{r}\" uses unknown generator '{c}'"),
                    ));
                }
            }
            let w = free_reduce(&word);
            if !w.is_empty() {
                reduced.push(w.into_iter().collect());
            }
        }
        Ok(LeafPresentation {
            generators,
            relators: reduced,
        })
    }

    /// The presentation of the trivial group.
    pub fn trivial() -> Self {
        LeafPresentation::default()
    }

    /// One generator and no relators: the fundamental group of a circle.
    pub fn circle(g: char) -> Self {
        LeafPresentation::new(vec![g], Vec::new()).expect("a single lowercase generator")
    }

    pub fn generators(&self) -> &[char] {
        &self.generators
    }

    pub fn relators(&self) -> &[String] {
        &self.relators
    }
}

fn inverse_letter(c: char) -> char {
    if c.is_ascii_lowercase() {
        c.to_ascii_uppercase()
    } else {
        c.to_ascii_lowercase()
    }
}

/// Cancels adjacent `xX` and `Xx` pairs.
pub fn free_reduce(word: &[char]) -> Vec<char> {
    let mut out: Vec<char> = Vec::with_capacity(word.len());
    for &c in word {
        if out.last() == Some(&inverse_letter(c)) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

/// Holonomy around one generating loop.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum HolonomyDatum {
    /// Time-one flow of `d/dx + g(y) d/dy` once around the loop, given by `g`.
    Flow(VectorField),
    /// An explicit jet.
    Jet(Jet),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratorData {
    pub datum: HolonomyDatum,
    /// Sign of the normal bundle around the loop, `+1` or `-1`.
    pub orientation: i8,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FoliationSpec {
    k: usize,
    leaf: LeafPresentation,
    data: Vec<GeneratorData>,
    bundle_trivial: bool,
}

impl FoliationSpec {
    /// `data` is indexed like `leaf.generators()`.
    pub fn new(
        k: usize,
        leaf: LeafPresentation,
        data: Vec<GeneratorData>,
        bundle_trivial: bool,
    ) -> Result<Self> {
        if k == 1 {
            return Err(Error::validation(
                "transverse order",
                "k = 1 is degenerate: there is a unique foliation of transverse order 1",
            ));
        }
        if k == 0 {
            return Err(Error::validation("transverse order", "k must be at least 2"));
        }
        if data.len() != leaf.generators().len() {
            return Err(Error::validation(
                "holonomy data",
                format!(
                    "{} generators but {} holonomy entries",
                    leaf.generators().len(),
                    data.len()
                ),
            ));
        }
        for (g, d) in leaf.generators().iter().zip(&data) {
            if d.orientation != 1 && d.orientation != -1 {
                return Err(Error::validation(
                    format!("orientation of {g}"),
                    "must be +1 or -1",
                ));
            }
            if let HolonomyDatum::Jet(j) = &d.datum {
                if j.order() < k - 1 {
                    return Err(Error::validation(
                        format!("jet of {g}"),
                        format!("order {} is below k - 1 = {}", j.order(), k - 1),
                    ));
                }
                if j.coeffs().iter().any(|c| !c.is_time_free()) {
                    return Err(Error::UnsupportedRing(format!(
                        "jet of {g} depends on t"
                    )));
                }
            }
        }
        Ok(FoliationSpec {
            k,
            leaf,
            data,
            bundle_trivial,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn leaf(&self) -> &LeafPresentation {
        &self.leaf
    }

    pub fn data(&self) -> &[GeneratorData] {
        &self.data
    }

    pub fn bundle_trivial(&self) -> bool {
        self.bundle_trivial
    }

    pub fn generator_data(&self, g: char) -> Option<&GeneratorData> {
        let i = self.leaf.generators().iter().position(|&c| c == g)?;
        Some(&self.data[i])
    }
}

impl fmt::Display for FoliationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_spec(self))
    }
}

/// Taylor data of a candidate defining function `p(x, y)` near the leaf `y = 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubmersionCandidate {
    p: BivariateTruncated,
    k: usize,
}

impl SubmersionCandidate {
    pub fn new(p: BivariateTruncated, k: usize) -> Result<Self> {
        if p.terms().any(|(_, j, _)| j == 0) {
            return Err(Error::validation(
                "submersion candidate",
                "p(x, 0) must vanish along the leaf",
            ));
        }
        if k < 2 {
            return Err(Error::validation("transverse order", "k must be at least 2"));
        }
        Ok(SubmersionCandidate { p, k })
    }

    pub fn p(&self) -> &BivariateTruncated {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Outcome of a coefficient criterion, naming the first failing power of `y`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CriterionVerdict {
    pub holds: bool,
    pub failing_order: Option<usize>,
    pub diagnostic: String,
}

impl CriterionVerdict {
    fn pass(diagnostic: impl Into<String>) -> Self {
        CriterionVerdict {
            holds: true,
            failing_order: None,
            diagnostic: diagnostic.into(),
        }
    }

    fn fail(r: usize, diagnostic: impl Into<String>) -> Self {
        CriterionVerdict {
            holds: false,
            failing_order: Some(r),
            diagnostic: diagnostic.into(),
        }
    }
}

/// The coefficient of `y^r` must be constant along the leaf for
/// `r = 1..k-1`, and the coefficient of `y` must be nonzero.
pub fn check_local_submersion(c: &SubmersionCandidate) -> CriterionVerdict {
    for r in 1..c.k {
        let coeff = c.p.coefficient_of_y(r);
        if coeff.degree().unwrap_or(0) > 0 {
            return CriterionVerdict::fail(
                r,
                format!("coefficient of y^{r} is {coeff}, which varies along the leaf"),
            );
        }
        if r == 1 && coeff.is_zero() {
            return CriterionVerdict::fail(1, "coefficient of y vanishes: p is not a submersion");
        }
    }
    CriterionVerdict::pass(format!(
        "coefficients of y^1..y^{} are constant and the linear one is nonzero",
        c.k - 1
    ))
}

/// For a family `θ_x(y)` of vertical maps, the coefficients of
/// `y^1..y^{k-1}` must not depend on `x`.
pub fn check_vertical_automorphism(theta: &BivariateTruncated, k: usize) -> Result<CriterionVerdict> {
    if theta.terms().any(|(_, j, _)| j == 0) {
        return Err(Error::validation("vertical family", "θ_x(0) must vanish"));
    }
    for r in 1..k {
        let coeff = theta.coefficient_of_y(r);
        if coeff.degree().unwrap_or(0) > 0 {
            return Ok(CriterionVerdict::fail(
                r,
                format!("coefficient of y^{r} is {coeff}, which depends on the leaf coordinate"),
            ));
        }
    }
    Ok(CriterionVerdict::pass(format!(
        "coefficients of y^1..y^{} are independent of the leaf coordinate",
        k.saturating_sub(1)
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_series::parse_bivariate;

    fn cand(text: &str, k: usize) -> SubmersionCandidate {
        SubmersionCandidate::new(parse_bivariate(text, ('x', 'y')).unwrap(), k).unwrap()
    }

    #[test]
    fn submersion_examples() {
        assert!(check_local_submersion(&cand("y + x y^2", 2)).holds);
        let v = check_local_submersion(&cand("y + x y^2", 3));
        assert!(!v.holds);
        assert_eq!(v.failing_order, Some(2));
        assert!(check_local_submersion(&cand("2y + 5y^2 + x y^3", 3)).holds);
        assert_eq!(check_local_submersion(&cand("x y", 2)).failing_order, Some(1));
        assert_eq!(check_local_submersion(&cand("y^2", 2)).failing_order, Some(1));
        assert!(SubmersionCandidate::new(parse_bivariate("x + y", ('x', 'y')).unwrap(), 2).is_err());
    }

    #[test]
    fn vertical_examples() {
        let th = |s: &str| parse_bivariate(s, ('x', 'y')).unwrap();
        assert!(!check_vertical_automorphism(&th("y + x y"), 2).unwrap().holds);
        assert!(check_vertical_automorphism(&th("2y - y^3"), 4).unwrap().holds);
        assert!(check_vertical_automorphism(&th("y + x y^2"), 2).unwrap().holds);
        assert!(!check_vertical_automorphism(&th("y + x y^2"), 3).unwrap().holds);
    }

    #[test]
    fn presentations() {
        let p = LeafPresentation::new(vec!['a', 'b'], vec!["abA B".into(), "aA".into()]).unwrap();
        assert_eq!(p.relators(), ["abAB".to_string()]);
        assert!(LeafPresentation::new(vec!['a'], vec!["ab".into()]).is_err());
        assert!(LeafPresentation::new(vec!['a', 'a'], vec![]).is_err());
        assert!(LeafPresentation::new(vec!['A'], vec![]).is_err());
        assert_eq!(free_reduce(&['a', 'b', 'B', 'A', 'c']), vec!['c']);
    }

    #[test]
    fn k_one_is_rejected() {
        let err = FoliationSpec::new(1, LeafPresentation::trivial(), vec![], true).unwrap_err();
        assert!(err.to_string().contains("unique foliation"));
    }
}
