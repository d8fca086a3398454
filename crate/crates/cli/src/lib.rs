//! Commands behind the `folhol` binary. Each command builds a [`Report`];
//! the binary prints it and maps errors to exit codes.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use folhol_core::exact_series::{parse_polynomial, parse_rational, parse_scalar, parse_series};
use folhol_core::flows::{flow_at, flow_jet, VectorField};
use folhol_core::foliations::{parse_spec, print_spec, FoliationSpec};
use folhol_core::groupoid_model::{component_of, separation_epsilon, GroupoidElement};
use folhol_core::holonomy::{
    are_conjugate, bott_character, extension_report, gamma_r, holonomy_hom, parse_hom, realize_hom,
    ConjugacyVerdict, HolonomyHom,
};
use folhol_core::jet_groups::{derived_series, jet_semidirect_split, Jet, DERIVED_SERIES_DEPTH, JET_VAR};
use folhol_core::Error;

pub const TABLE1_ROW2: &str = include_str!("../fixtures/table1_row2.spec");
pub const TABLE1_ROW3: &str = include_str!("../fixtures/table1_row3.spec");
pub const TABLE1_ROW4: &str = include_str!("../fixtures/table1_row4.spec");

#[derive(Parser, Debug)]
#[command(name = "folhol", version, about = "Exact jet calculus and holonomy of transverse order-k foliations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Arithmetic in the jet group J^r.
    Jet {
        #[command(subcommand)]
        op: JetOp,
    },
    /// Formal flow of f(y) d/dy, optionally evaluated at a time.
    Flow {
        #[arg(long)]
        field: String,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        time: Option<String>,
    },
    /// Holonomy homomorphism and its invariants.
    Holonomy { spec: PathBuf },
    /// Decides whether two specs have conjugate holonomy.
    Compare { spec1: PathBuf, spec2: PathBuf },
    /// Holonomy report with the spec, relator checks and derived series.
    Report { spec: PathBuf },
    /// A spec with prescribed holonomy.
    Realize {
        #[arg(long)]
        hom: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Separation radius for the chart images of two polynomials.
    Separate {
        #[arg(long)]
        theta1: String,
        #[arg(long)]
        theta2: String,
        #[arg(long)]
        k: usize,
    },
    /// Recomputes the holonomy groups of the four cylinder foliations.
    Table1,
    /// Arrows of the groupoid (R∖{0})² ∪ J^k, written `Pair(y2, y1)` or `Jet(<series>)`.
    Groupoid {
        #[command(subcommand)]
        op: GroupoidOp,
    },
}

#[derive(Subcommand, Debug)]
pub enum JetOp {
    /// g ∘ h.
    Mul {
        g: String,
        h: String,
        #[arg(long)]
        order: usize,
    },
    Inv {
        g: String,
        #[arg(long)]
        order: usize,
    },
    /// Truncates to a lower order.
    Project {
        g: String,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        to: usize,
    },
    /// h ∘ g ∘ h⁻¹.
    Conjugate {
        h: String,
        g: String,
        #[arg(long)]
        order: usize,
    },
    /// Linear and unipotent factors.
    Split {
        g: String,
        #[arg(long)]
        order: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum GroupoidOp {
    Compose {
        a: String,
        b: String,
        #[arg(long)]
        k: usize,
    },
    Inverse {
        a: String,
        #[arg(long)]
        k: usize,
    },
    Component {
        a: String,
        #[arg(long)]
        k: usize,
    },
}

/// Ordered sections of plain text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub sections: Vec<(String, String)>,
    /// Set when the command ran but a check it performs failed.
    pub failed: bool,
}

impl Report {
    fn push(&mut self, heading: &str, body: impl Into<String>) {
        self.sections.push((heading.to_string(), body.into()));
    }

    fn single(body: impl Into<String>) -> Report {
        let mut r = Report::default();
        r.push("", body);
        r
    }

    pub fn body(&self, heading: &str) -> Option<&str> {
        self.sections
            .iter()
            .find(|(h, _)| h == heading)
            .map(|(_, b)| b.as_str())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (heading, body)) in self.sections.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            if !heading.is_empty() {
                writeln!(f, "== {heading} ==")?;
            }
            writeln!(f, "{}", body.trim_end())?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_parse() => 2,
            CliError::Io { .. } => 2,
            CliError::Core(_) => 1,
        }
    }

    /// One line with a machine-readable prefix.
    pub fn diagnostic(&self) -> String {
        let kind = if self.exit_code() == 2 { "parse" } else { "domain" };
        let msg = self.to_string().replace('\n', " ");
        format!("error[{kind}]: {msg}")
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_spec(path: &Path) -> CliResult<FoliationSpec> {
    Ok(parse_spec(&read(path)?)?)
}

fn jet_arg(text: &str, order: usize) -> CliResult<Jet> {
    Ok(Jet::from_series(parse_series(text, JET_VAR, order)?)?)
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    match &cli.command {
        Command::Jet { op } => cmd_jet(op),
        Command::Flow { field, order, time } => cmd_flow(field, *order, time.as_deref()),
        Command::Holonomy { spec } => cmd_holonomy(&load_spec(spec)?),
        Command::Compare { spec1, spec2 } => cmd_compare(&read(spec1)?, &read(spec2)?),
        Command::Report { spec } => cmd_report(&load_spec(spec)?),
        Command::Realize { hom, k } => cmd_realize(&read(hom)?, *k),
        Command::Separate { theta1, theta2, k } => cmd_separate(theta1, theta2, *k),
        Command::Table1 => cmd_table1(),
        Command::Groupoid { op } => cmd_groupoid(op),
    }
}

pub fn cmd_jet(op: &JetOp) -> CliResult<Report> {
    let out = match op {
        JetOp::Mul { g, h, order } => jet_arg(g, *order)?.mul(&jet_arg(h, *order)?)?.to_string(),
        JetOp::Inv { g, order } => jet_arg(g, *order)?.inv().to_string(),
        JetOp::Project { g, order, to } => jet_arg(g, *order)?.project(*to)?.to_string(),
        JetOp::Conjugate { h, g, order } => jet_arg(g, *order)?.conjugate_by(&jet_arg(h, *order)?)?.to_string(),
        JetOp::Split { g, order } => {
            let (lin, uni) = jet_semidirect_split(&jet_arg(g, *order)?);
            format!("linear: {lin}\nunipotent: {uni}")
        }
    };
    Ok(Report::single(out))
}

pub fn cmd_flow(field: &str, order: usize, time: Option<&str>) -> CliResult<Report> {
    let x = VectorField::new(parse_polynomial(field, JET_VAR)?)?;
    let f = flow_jet(&x, order)?;
    let out = match time {
        None => f.to_string(),
        Some(t) => flow_at(&f, &parse_scalar(t)?)?.to_string(),
    };
    Ok(Report::single(out))
}

fn rate_note(hom: &HolonomyHom) -> Option<String> {
    hom.exp_rate().map(|r| {
        if r.is_integer() && *r.numer() == 1.into() {
            "E = e".to_string()
        } else {
            format!("E = e^({r})")
        }
    })
}

fn holonomy_sections(spec: &FoliationSpec, report: &mut Report) -> CliResult<HolonomyHom> {
    let hom = holonomy_hom(spec)?;
    let k = spec.k();
    let mut body = format!("k = {k}, target J^{}\n", k - 1);
    if hom.generators().is_empty() {
        body.push_str("no generators\n");
    }
    for (g, j) in hom.generators().iter().zip(hom.images()) {
        body.push_str(&format!("{g} ↦ {j}\n"));
    }
    if let Some(note) = rate_note(&hom) {
        body.push_str(&note);
        body.push('\n');
    }
    if hom.is_trivial() {
        body.push_str("gamma trivial; Gamma_R = R\n");
    }
    report.push("holonomy", body);

    let bott: Vec<String> = bott_character(&hom)
        .iter()
        .map(|(g, c)| format!("{g} ↦ {c}"))
        .collect();
    report.push("bott character", bott.join("\n"));

    let gens: Vec<String> = hom
        .images()
        .iter()
        .filter(|j| !j.is_identity())
        .map(Jet::to_string)
        .collect();
    report.push(
        "Gamma",
        if gens.is_empty() {
            format!("trivial subgroup of J^{}", k - 1)
        } else {
            format!("generated in J^{} by {}", k - 1, gens.join(", "))
        },
    );

    let gr = gamma_r(&hom, k)?;
    report.push("Gamma_R", format!("Gamma_R: {}", gr.descriptor()));

    let ext = extension_report(spec)?;
    report.push(
        "extension",
        format!(
            "open leaves: {}\nideal: {}\nquotient: {}",
            ext.open_leaf_count, ext.ideal_kind, ext.quotient_descriptor
        ),
    );
    Ok(hom)
}

pub fn cmd_holonomy(spec: &FoliationSpec) -> CliResult<Report> {
    let mut report = Report::default();
    holonomy_sections(spec, &mut report)?;
    Ok(report)
}

pub fn cmd_report(spec: &FoliationSpec) -> CliResult<Report> {
    let mut report = Report::default();
    report.push("spec", print_spec(spec));
    let hom = holonomy_sections(spec, &mut report)?;
    let rel: Vec<String> = hom
        .relator_residuals()
        .iter()
        .map(|(r, j)| format!("{r} ↦ {j}"))
        .collect();
    report.push(
        "relators",
        if rel.is_empty() {
            "none".to_string()
        } else {
            rel.join("\n")
        },
    );
    let ds = derived_series(hom.images(), DERIVED_SERIES_DEPTH)?;
    let sizes: Vec<String> = ds.stages.iter().map(|s| s.len().to_string()).collect();
    report.push(
        "derived series",
        format!(
            "stage sizes: {}\nidentity reached at stage: {}",
            sizes.join(", "),
            ds.identity_stage
                .map_or_else(|| "not within depth".to_string(), |s| s.to_string())
        ),
    );
    Ok(report)
}

/// Both specs are evaluated concurrently.
pub fn cmd_compare(text1: &str, text2: &str) -> CliResult<Report> {
    let (h1, h2) = std::thread::scope(|s| {
        let a = s.spawn(|| holonomy_hom_of(text1));
        let b = s.spawn(|| holonomy_hom_of(text2));
        (
            a.join().expect("holonomy worker panicked"),
            b.join().expect("holonomy worker panicked"),
        )
    });
    let (h1, h2) = (h1?, h2?);
    let verdict = are_conjugate(&h1, &h2)?;
    let mut report = Report::default();
    let body = match &verdict {
        ConjugacyVerdict::Conjugate { conjugator } => format!(
            "equivalent near the singular leaf\nconjugator h = {conjugator}\nh ∘ gamma1 ∘ h^-1 = gamma2"
        ),
        ConjugacyVerdict::ConjugateIrrational { degree, value } => format!(
            "equivalent near the singular leaf\nconjugator involves lambda y with lambda^{degree} = {value}, outside the coefficient ring"
        ),
        ConjugacyVerdict::NotConjugate { order, reason } => format!(
            "not equivalent (fixed generator matching)\nobstruction at order {order}: {reason}"
        ),
    };
    report.push("compare", body);
    Ok(report)
}

fn holonomy_hom_of(text: &str) -> folhol_core::Result<HolonomyHom> {
    holonomy_hom(&parse_spec(text)?)
}

pub fn cmd_realize(hom_text: &str, k: usize) -> CliResult<Report> {
    if k < 2 {
        return Err(Error::Validation {
            what: "transverse order".into(),
            message: "k must be at least 2".into(),
        }
        .into());
    }
    let hom = parse_hom(hom_text, k - 1)?;
    let spec = realize_hom(&hom, k)?;
    let back = holonomy_hom(&spec)?;
    if back != hom {
        return Err(Error::Domain("realized spec does not reproduce the homomorphism".into()).into());
    }
    Ok(Report::single(print_spec(&spec)))
}

pub fn cmd_separate(theta1: &str, theta2: &str, k: usize) -> CliResult<Report> {
    let t1 = parse_polynomial(theta1, JET_VAR)?;
    let t2 = parse_polynomial(theta2, JET_VAR)?;
    let cert = separation_epsilon(&t1, &t2, k)?;
    Ok(Report::single(cert.to_string()))
}

fn parse_arrow(text: &str, k: usize) -> CliResult<GroupoidElement> {
    let s = text.trim();
    let inner = |prefix: &str| {
        s.strip_prefix(prefix)
            .and_then(|r| r.trim_start().strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
    };
    if let Some(body) = inner("Pair") {
        let Some((a, b)) = body.split_once(',') else {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("expected Pair(y2, y1), found '{s}'"),
            }
            .into());
        };
        return Ok(GroupoidElement::pair(parse_rational(a.trim())?, parse_rational(b.trim())?)?);
    }
    if let Some(body) = inner("Jet") {
        return Ok(GroupoidElement::Jet(jet_arg(body, k)?));
    }
    Err(Error::Parse {
        line: 1,
        column: 1,
        message: format!("expected Pair(y2, y1) or Jet(<series>), found '{s}'"),
    }
    .into())
}

pub fn cmd_groupoid(op: &GroupoidOp) -> CliResult<Report> {
    let out = match op {
        GroupoidOp::Compose { a, b, k } => parse_arrow(a, *k)?.compose(&parse_arrow(b, *k)?)?.to_string(),
        GroupoidOp::Inverse { a, k } => parse_arrow(a, *k)?.inverse().to_string(),
        GroupoidOp::Component { a, k } => component_of(&parse_arrow(a, *k)?)?.to_string(),
    };
    Ok(Report::single(out))
}

/// One recomputed row of the cylinder table.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub index: usize,
    pub foliation: &'static str,
    pub ambient: String,
    pub computed: String,
    pub expected: &'static str,
    pub note: Option<&'static str>,
    /// Every explicit check of the row, including the descriptor comparison.
    pub checks_pass: bool,
}

fn pattern_matches_powers(spec_text: &str, range: std::ops::RangeInclusive<i64>) -> folhol_core::Result<(String, bool)> {
    let spec = parse_spec(spec_text)?;
    let hom = holonomy_hom(&spec)?;
    let gr = gamma_r(&hom, spec.k())?;
    let mut ok = true;
    for n in range {
        let expected = match hom.images() {
            [g] => g.pow(n),
            _ => Jet::identity(spec.k() - 1),
        };
        ok &= gr.pattern_at(n)?.as_ref() == Some(&expected);
    }
    Ok((gr.descriptor(), ok))
}

pub fn table1_rows() -> CliResult<Vec<TableRow>> {
    // k = 1: the isotropy at the origin is the flow of y d/dy itself.
    let row1 = flow_jet(&VectorField::new(parse_polynomial("y", JET_VAR)?)?, 1)?;
    let mut rows = vec![TableRow {
        index: 1,
        foliation: "F{d/dx, y d/dy}",
        ambient: "J^1".into(),
        computed: format!("{{{row1}}}"),
        expected: "{E^t y}",
        note: Some("k = 1: unique foliation"),
        checks_pass: true,
    }];
    let specs = [
        (2, "F{d/dx, y^2 d/dy}", TABLE1_ROW2, "{y + t y^2}"),
        (3, "F{d/dx + y d/dy, y^2 d/dy}", TABLE1_ROW3, "{E^n y + t y^2}"),
        (4, "F{d/dx + y^2 d/dy, y^4 d/dy}", TABLE1_ROW4, "{y + n y^2 + n^2 y^3 + t y^4}"),
    ];
    for (index, foliation, text, expected) in specs {
        let (computed, powers_ok) = pattern_matches_powers(text, -3..=3)?;
        let k = parse_spec(text)?.k();
        rows.push(TableRow {
            index,
            foliation,
            ambient: format!("J^{k}"),
            computed,
            expected,
            note: None,
            checks_pass: powers_ok,
        });
    }
    for r in &mut rows {
        r.checks_pass &= r.computed == r.expected;
    }
    Ok(rows)
}

pub fn cmd_table1() -> CliResult<Report> {
    let rows = table1_rows()?;
    let mut body = String::new();
    let mut all = true;
    for r in &rows {
        all &= r.checks_pass;
        body.push_str(&format!(
            "row {} | {} | {} | expected {} | {}{} | {}\n",
            r.index,
            r.foliation,
            r.computed,
            r.expected,
            r.ambient,
            r.note.map(|n| format!(" ({n})")).unwrap_or_default(),
            if r.checks_pass { "ok" } else { "MISMATCH" }
        ));
    }
    body.push_str(if all { "all rows match" } else { "table mismatch" });
    let mut report = Report::default();
    report.push("table1", body);
    report.failed = !all;
    Ok(report)
}

/// Parses the row fixtures; used to keep them in sync with the spec grammar.
pub fn table1_specs() -> folhol_core::Result<Vec<FoliationSpec>> {
    [TABLE1_ROW2, TABLE1_ROW3, TABLE1_ROW4]
        .iter()
        .map(|t| parse_spec(t))
        .collect()
}
