//! The holonomy invariant of a transverse order-k foliation: a homomorphism
//! from the leaf group to `J^{k-1}`, up to conjugation.

pub mod conjugacy;

use std::fmt;

use crate::error::{Error, Result};
use crate::exact_series::{parse_series, Rational, Scalar, SymbolStyle};
use crate::flows::{flow_at, flow_jet, unipotent_log, FlowJet, FlowRegime};
use crate::foliations::spec_file::{parse_list, parse_sections, rebase, unquote};
use crate::foliations::{FoliationSpec, GeneratorData, HolonomyDatum, LeafPresentation};
use crate::jet_groups::{jet_embed_translation, Jet, JET_VAR};

pub use conjugacy::{conjugate_tuples, unipotent_normal_form, ConjugacyVerdict, NormalForm};

/// A homomorphism `π_1(L) → J^{k-1}`, one image per generator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HolonomyHom {
    presentation: LeafPresentation,
    target_order: usize,
    images: Vec<Jet>,
    relator_residuals: Vec<(String, Jet)>,
    /// `E` in the coefficients stands for `e^{exp_rate}`; `None` when no
    /// coefficient involves `E`.
    exp_rate: Option<Rational>,
}

impl HolonomyHom {
    /// Checks orders and evaluates every relator, which must give the identity.
    pub fn new(
        presentation: LeafPresentation,
        target_order: usize,
        images: Vec<Jet>,
        exp_rate: Option<Rational>,
    ) -> Result<Self> {
        if images.len() != presentation.generators().len() {
            return Err(Error::validation(
                "homomorphism",
                format!(
                    "{} generators but {} images",
                    presentation.generators().len(),
                    images.len()
                ),
            ));
        }
        for (g, j) in presentation.generators().iter().zip(&images) {
            if j.order() != target_order {
                return Err(Error::validation(
                    format!("image of {g}"),
                    format!("order {} differs from the target order {target_order}", j.order()),
                ));
            }
            if j.coeffs().iter().any(|c| !c.is_time_free()) {
                return Err(Error::UnsupportedRing(format!("image of {g} depends on t")));
            }
        }
        let uses_exp = images
            .iter()
            .any(|j| j.coeffs().iter().any(Scalar::involves_exp));
        let exp_rate = if uses_exp { exp_rate.or_else(|| Some(Rational::from_integer(1.into()))) } else { None };
        let mut hom = HolonomyHom {
            presentation,
            target_order,
            images,
            relator_residuals: Vec::new(),
            exp_rate,
        };
        let mut residuals = Vec::new();
        for r in hom.presentation.relators() {
            let residual = hom.evaluate_word(r)?;
            if !residual.is_identity() {
                return Err(Error::InconsistentHolonomy {
                    relator: r.clone(),
                    residual: residual.to_string(),
                });
            }
            residuals.push((r.clone(), residual));
        }
        hom.relator_residuals = residuals;
        Ok(hom)
    }

    pub fn presentation(&self) -> &LeafPresentation {
        &self.presentation
    }

    pub fn generators(&self) -> &[char] {
        self.presentation.generators()
    }

    pub fn target_order(&self) -> usize {
        self.target_order
    }

    pub fn images(&self) -> &[Jet] {
        &self.images
    }

    pub fn image(&self, g: char) -> Option<&Jet> {
        let i = self.generators().iter().position(|&c| c == g)?;
        Some(&self.images[i])
    }

    pub fn relator_residuals(&self) -> &[(String, Jet)] {
        &self.relator_residuals
    }

    pub fn exp_rate(&self) -> Option<&Rational> {
        self.exp_rate.as_ref()
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(Jet::is_identity)
    }

    /// Image of a word; capital letters are inverses.
    pub fn evaluate_word(&self, word: &str) -> Result<Jet> {
        let mut acc = Jet::identity(self.target_order);
        for c in word.chars() {
            let img = self
                .image(c.to_ascii_lowercase())
                .ok_or_else(|| Error::validation("word", format!("unknown generator '{c}'")))?;
            let factor = if c.is_ascii_uppercase() { img.inv() } else { img.clone() };
            acc = acc.mul(&factor)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for HolonomyHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, j) in self.generators().iter().zip(&self.images) {
            writeln!(f, "{g} ↦ {j}")?;
        }
        Ok(())
    }
}

fn merge_rate(current: &mut Option<Rational>, new: Rational) -> Result<()> {
    match current {
        Some(old) if *old != new => Err(Error::UnsupportedRing(format!(
            "two exponential symbols e^{old} and e^{new} in one computation"
        ))),
        _ => {
            *current = Some(new);
            Ok(())
        }
    }
}

/// The image of a generator under the holonomy: time-one flow or the given
/// jet, cut to order `k - 1`.
fn generator_image(d: &GeneratorData, k: usize, rate: &mut Option<Rational>) -> Result<Jet> {
    match &d.datum {
        HolonomyDatum::Flow(x) => {
            let f = flow_jet(x, k - 1)?;
            if let FlowRegime::Exponential { rate: a } = f.regime() {
                merge_rate(rate, a.clone())?;
            }
            flow_at(&f, &Scalar::one())
        }
        HolonomyDatum::Jet(j) => {
            let p = j.project(k - 1)?;
            if p.coeffs().iter().any(Scalar::involves_exp) {
                merge_rate(rate, Rational::from_integer(1.into()))?;
            }
            Ok(p)
        }
    }
}

/// The holonomy homomorphism of a spec.
pub fn holonomy_hom(spec: &FoliationSpec) -> Result<HolonomyHom> {
    let k = spec.k();
    let mut rate = None;
    let images = spec
        .data()
        .iter()
        .map(|d| generator_image(d, k, &mut rate))
        .collect::<Result<Vec<_>>>()?;
    HolonomyHom::new(spec.leaf().clone(), k - 1, images, rate)
}

/// Decides whether two homomorphisms with the same generators are conjugate.
pub fn are_conjugate(g1: &HolonomyHom, g2: &HolonomyHom) -> Result<ConjugacyVerdict> {
    if g1.target_order != g2.target_order {
        return Err(Error::OrderMismatch {
            left: g1.target_order,
            right: g2.target_order,
        });
    }
    if g1.generators() != g2.generators() {
        return Err(Error::validation(
            "comparison",
            "the two leaf presentations have different generators",
        ));
    }
    if let (Some(a), Some(b)) = (&g1.exp_rate, &g2.exp_rate) {
        if a != b {
            return Err(Error::UnsupportedRing(format!(
                "E stands for e^{a} on one side and e^{b} on the other"
            )));
        }
    }
    conjugate_tuples(g1.generators(), &g1.images, &g2.images, g1.target_order)
}

/// A spec whose holonomy is exactly `hom`: each generator gets an explicit
/// jet, lifted to order `k` with zero top coefficient.
pub fn realize_hom(hom: &HolonomyHom, k: usize) -> Result<FoliationSpec> {
    if k != hom.target_order + 1 {
        return Err(Error::validation(
            "realization",
            format!("k = {k} does not match images of order {}", hom.target_order),
        ));
    }
    if hom.exp_rate.as_ref().is_some_and(|r| !r.is_integer() || *r != Rational::from_integer(1.into())) {
        return Err(Error::UnsupportedRing(
            "explicit jets read E as e; rescale the homomorphism first".into(),
        ));
    }
    let data = hom
        .images
        .iter()
        .map(|j| {
            Ok(GeneratorData {
                datum: HolonomyDatum::Jet(j.lift(k)?),
                orientation: if j.is_orientation_preserving()? { 1 } else { -1 },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    FoliationSpec::new(k, hom.presentation.clone(), data, true)
}

/// The GL(1) monodromy: leading coefficient of each image.
pub fn bott_character(hom: &HolonomyHom) -> Vec<(char, Scalar)> {
    hom.generators()
        .iter()
        .zip(&hom.images)
        .map(|(&g, j)| (g, j.leading()))
        .collect()
}

/// Closed form of the powers `γ(a)^n` for a single generator, when known.
#[derive(Clone, Debug)]
pub enum PowerPattern {
    /// All images are the identity.
    Trivial,
    /// `γ(a)^n` is the time-`n` flow of `log γ(a)`.
    Unipotent(FlowJet),
    /// `γ(a) = c y`, so `γ(a)^n = c^n y`.
    Linear(Scalar),
}

/// The preimage `Γ_R ⊂ J^k` of the holonomy group `Γ ⊂ J^{k-1}`.
#[derive(Clone, Debug)]
pub struct GammaR {
    pub base: HolonomyHom,
    pub k: usize,
    /// Order-`k` lifts of the images with zero top coefficient.
    pub lifts: Vec<Jet>,
    pub pattern: Option<PowerPattern>,
}

pub fn gamma_r(hom: &HolonomyHom, k: usize) -> Result<GammaR> {
    if k != hom.target_order + 1 {
        return Err(Error::validation(
            "Gamma_R",
            format!("k = {k} does not match images of order {}", hom.target_order),
        ));
    }
    let lifts = hom
        .images
        .iter()
        .map(|j| j.lift(k))
        .collect::<Result<Vec<_>>>()?;
    let pattern = if hom.is_trivial() {
        Some(PowerPattern::Trivial)
    } else if let [g] = hom.images.as_slice() {
        if g.is_unipotent() {
            let z = unipotent_log(g)?;
            Some(PowerPattern::Unipotent(flow_jet(&z, g.order())?))
        } else if (2..=g.order()).all(|i| g.coeff(i).is_zero()) {
            Some(PowerPattern::Linear(g.leading()))
        } else {
            None
        }
    } else {
        None
    };
    Ok(GammaR {
        base: hom.clone(),
        k,
        lifts,
        pattern,
    })
}

impl GammaR {
    fn central_term(&self) -> String {
        format!("t {JET_VAR}^{}", self.k)
    }

    /// The element `γ(a)^n` of the pattern, at order `k - 1`.
    pub fn pattern_at(&self, n: i64) -> Result<Option<Jet>> {
        let r = self.k - 1;
        Ok(match &self.pattern {
            Some(PowerPattern::Trivial) => Some(Jet::identity(r)),
            Some(PowerPattern::Unipotent(f)) => Some(flow_at(f, &Scalar::from_int(n))?),
            Some(PowerPattern::Linear(c)) => Some(Jet::linear(c.pow(n)?, r)?),
            None => None,
        })
    }

    /// `{ ... + t y^k }` when a closed form is known.
    pub fn descriptor(&self) -> String {
        let central = self.central_term();
        match &self.pattern {
            Some(PowerPattern::Trivial) => format!("{{{JET_VAR} + {central}}}"),
            Some(PowerPattern::Unipotent(f)) => {
                let style = SymbolStyle {
                    time: "n",
                    exp_multiplier: None,
                };
                format!("{{{} + {central}}}", f.series().fmt_with(&style))
            }
            Some(PowerPattern::Linear(c)) => {
                let power = match c.as_monomial() {
                    Some((q, 0, m)) if q == Rational::from_integer(1.into()) && m != 0 => {
                        Scalar::exp_power(m).fmt_with(&SymbolStyle {
                            time: "t",
                            exp_multiplier: Some("n"),
                        })
                    }
                    _ => format!("({c})^n"),
                };
                format!("{{{power} {JET_VAR} + {central}}}")
            }
            None => {
                let gens: Vec<String> = self
                    .base
                    .generators()
                    .iter()
                    .zip(&self.lifts)
                    .map(|(g, j)| format!("{g}: {j}"))
                    .collect();
                format!("<{}> . {{{JET_VAR} + {central}}}", gens.join(", "))
            }
        }
    }

    /// `y + t y^k`, the central subgroup.
    pub fn central_element(&self, t: &Scalar) -> Result<Jet> {
        jet_embed_translation(t, self.k)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IdealKind {
    K,
    KPlusK,
}

impl fmt::Display for IdealKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdealKind::K => "K",
            IdealKind::KPlusK => "K+K",
        })
    }
}

/// Structure of `0 → I → C*(G(F)) → C*(Γ_R) ⊗ K → 0`.
#[derive(Clone, Debug)]
pub struct ExtensionReport {
    pub ideal_kind: IdealKind,
    pub quotient_descriptor: String,
    pub open_leaf_count: u8,
}

pub fn extension_report(spec: &FoliationSpec) -> Result<ExtensionReport> {
    let hom = holonomy_hom(spec)?;
    let gr = gamma_r(&hom, spec.k())?;
    let mut two_sided = spec.bundle_trivial();
    for (d, img) in spec.data().iter().zip(hom.images()) {
        two_sided &= d.orientation == 1 && img.is_orientation_preserving()?;
    }
    let (open_leaf_count, ideal_kind) = if two_sided {
        (2, IdealKind::KPlusK)
    } else {
        (1, IdealKind::K)
    };
    Ok(ExtensionReport {
        ideal_kind,
        quotient_descriptor: format!("C*(Gamma_R) (x) K, Gamma_R = {}", gr.descriptor()),
        open_leaf_count,
    })
}

/// Reads a homomorphism file:
///
/// ```text
/// [hom]
/// generators = [a]
/// relators = []
///
/// [images]
/// a = "y + y^2 + y^3"
/// ```
///
/// Images are cut to `target_order`; `E` is read as `e`.
pub fn parse_hom(text: &str, target_order: usize) -> Result<HolonomyHom> {
    let sections = parse_sections(text)?;
    for (name, sec) in &sections {
        if name != "hom" && name != "images" {
            return Err(Error::parse(sec.line, 1, format!("unknown section [{name}]")));
        }
    }
    let hom_sec = sections
        .iter()
        .find(|(n, _)| n == "hom")
        .map(|(_, s)| s)
        .ok_or_else(|| Error::parse(1, 1, "missing [hom] section"))?;
    for (key, e) in &hom_sec.entries {
        if key != "generators" && key != "relators" {
            return Err(Error::parse(e.line, e.column, format!("unknown key '{key}' in [hom]")));
        }
    }
    let mut generators = Vec::new();
    if let Some(e) = hom_sec.entries.get("generators") {
        for (item, col) in parse_list(e)? {
            let mut cs = item.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) if c.is_ascii_lowercase() => generators.push(c),
                _ => {
                    return Err(Error::parse(
                        e.line,
                        col,
                        format!("generator '{item}' must be a single lowercase letter"),
                    ))
                }
            }
        }
    }
    let mut relators = Vec::new();
    if let Some(e) = hom_sec.entries.get("relators") {
        for (item, col) in parse_list(e)? {
            let entry = crate::foliations::spec_file::Entry {
                value: item,
                line: e.line,
                column: col,
            };
            relators.push(unquote(&entry)?.0);
        }
    }
    let presentation = LeafPresentation::new(generators, relators)?;
    let empty = Default::default();
    let images_sec = sections
        .iter()
        .find(|(n, _)| n == "images")
        .map(|(_, s)| s)
        .unwrap_or(&empty);
    for (key, e) in &images_sec.entries {
        let known = key.len() == 1 && presentation.generators().contains(&key.chars().next().unwrap_or(' '));
        if !known {
            return Err(Error::parse(e.line, e.column, format!("image for unknown generator '{key}'")));
        }
    }
    let mut images = Vec::new();
    for g in presentation.generators() {
        let e = images_sec
            .entries
            .get(&g.to_string())
            .ok_or_else(|| Error::validation(format!("generator {g}"), "missing image"))?;
        let (lit, col) = unquote(e)?;
        let s = parse_series(&lit, JET_VAR, target_order).map_err(|err| rebase(err, e.line, col))?;
        images.push(Jet::from_series(s)?);
    }
    HolonomyHom::new(presentation, target_order, images, None)
}

/// Canonical text accepted by [`parse_hom`].
pub fn print_hom(hom: &HolonomyHom) -> String {
    let gens: Vec<String> = hom.generators().iter().map(char::to_string).collect();
    let rels: Vec<String> = hom
        .presentation
        .relators()
        .iter()
        .map(|r| format!("\"{r}\""))
        .collect();
    let mut out = format!(
        "[hom]\ngenerators = [{}]\nrelators = [{}]\n\n[images]\n",
        gens.join(", "),
        rels.join(", ")
    );
    for (g, j) in hom.generators().iter().zip(&hom.images) {
        out.push_str(&format!("{g} = \"{j}\"\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foliations::parse_spec;

    fn circle_spec(k: usize, body: &str) -> FoliationSpec {
        parse_spec(&format!(
            "[foliation]\nk = {k}\ngenerators = [a]\n\n[holonomy.a]\n{body}\n"
        ))
        .unwrap()
    }

    fn jet(text: &str, r: usize) -> Jet {
        Jet::from_series(parse_series(text, 'y', r).unwrap()).unwrap()
    }

    #[test]
    fn table_rows() {
        let row2 = holonomy_hom(&circle_spec(2, "type = flow\nfield = \"0\"")).unwrap();
        assert!(row2.is_trivial());
        assert_eq!(row2.target_order(), 1);
        let row3 = holonomy_hom(&circle_spec(2, "type = flow\nfield = \"y\"")).unwrap();
        assert_eq!(row3.images()[0], Jet::linear(Scalar::exp_symbol(), 1).unwrap());
        let row4 = holonomy_hom(&circle_spec(4, "type = flow\nfield = \"y^2\"")).unwrap();
        assert_eq!(row4.images()[0], jet("y + y^2 + y^3", 3));
    }

    #[test]
    fn gamma_r_descriptors() {
        let row2 = holonomy_hom(&circle_spec(2, "type = flow\nfield = \"0\"")).unwrap();
        assert_eq!(gamma_r(&row2, 2).unwrap().descriptor(), "{y + t y^2}");
        let row3 = holonomy_hom(&circle_spec(2, "type = flow\nfield = \"y\"")).unwrap();
        assert_eq!(gamma_r(&row3, 2).unwrap().descriptor(), "{E^n y + t y^2}");
        let row4 = holonomy_hom(&circle_spec(4, "type = flow\nfield = \"y^2\"")).unwrap();
        let gr = gamma_r(&row4, 4).unwrap();
        assert_eq!(gr.descriptor(), "{y + n y^2 + n^2 y^3 + t y^4}");
        assert_eq!(gr.lifts[0], jet("y + y^2 + y^3", 4));
        for n in -3..=3 {
            assert_eq!(gr.pattern_at(n).unwrap().unwrap(), row4.images()[0].pow(n));
        }
    }

    #[test]
    fn bott() {
        let row3 = holonomy_hom(&circle_spec(2, "type = flow\nfield = \"y\"")).unwrap();
        assert_eq!(bott_character(&row3), vec![('a', Scalar::exp_symbol())]);
        let refl = holonomy_hom(&circle_spec(3, "type = jet\njet = \"-y + y^2\"")).unwrap();
        assert_eq!(bott_character(&refl), vec![('a', Scalar::from_int(-1))]);
    }

    #[test]
    fn relators_must_hold() {
        let text = "[foliation]\nk = 2\ngenerators = [a, b]\nrelators = [\"abAB\"]\n\n[holonomy.a]\ntype = jet\njet = \"2y\"\n\n[holonomy.b]\ntype = jet\njet = \"3y\"\n";
        assert!(holonomy_hom(&parse_spec(text).unwrap()).is_ok());
        let text = "[foliation]\nk = 3\ngenerators = [a, b]\nrelators = [\"abAB\"]\n\n[holonomy.a]\ntype = jet\njet = \"2y\"\n\n[holonomy.b]\ntype = jet\njet = \"y + y^2\"\n";
        assert!(matches!(
            holonomy_hom(&parse_spec(text).unwrap()),
            Err(Error::InconsistentHolonomy { .. })
        ));
    }

    #[test]
    fn conjugacy_through_homs() {
        let trivial = holonomy_hom(&circle_spec(2, "type = flow\nfield = \"0\"")).unwrap();
        let twisted = holonomy_hom(&circle_spec(2, "type = flow\nfield = \"y\"")).unwrap();
        let v = are_conjugate(&trivial, &twisted).unwrap();
        assert!(matches!(v, ConjugacyVerdict::NotConjugate { order: 1, .. }));
    }

    #[test]
    fn realization() {
        let hom = parse_hom("[hom]\ngenerators = [a]\n\n[images]\na = \"y + y^2 + y^3\"\n", 3).unwrap();
        let spec = realize_hom(&hom, 4).unwrap();
        assert_eq!(holonomy_hom(&spec).unwrap(), hom);
        assert_eq!(parse_hom(&print_hom(&hom), 3).unwrap(), hom);
        let trivial = parse_hom("[hom]\ngenerators = [a]\n[images]\na = \"y\"\n", 1).unwrap();
        assert!(holonomy_hom(&realize_hom(&trivial, 2).unwrap()).unwrap().is_trivial());
    }

    #[test]
    fn extension_reports() {
        let row4 = circle_spec(4, "type = flow\nfield = \"y^2\"");
        let rep = extension_report(&row4).unwrap();
        assert_eq!((rep.open_leaf_count, rep.ideal_kind), (2, IdealKind::KPlusK));
        let refl = circle_spec(2, "type = jet\njet = \"-y\"");
        let rep = extension_report(&refl).unwrap();
        assert_eq!((rep.open_leaf_count, rep.ideal_kind), (1, IdealKind::K));
        let plane = parse_spec("[foliation]\nk = 2\n").unwrap();
        assert_eq!(extension_report(&plane).unwrap().open_leaf_count, 2);
    }
}
