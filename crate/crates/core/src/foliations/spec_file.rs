//! Reader and canonical printer for foliation spec files.
//!
//! ```text
//! [foliation]
//! k = 4
//! generators = [a]
//! relators = []
//! bundle_trivial = true
//!
//! [holonomy.a]
//! type = flow
//! field = "y^2"
//! orientation = +1
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact_series::parse_polynomial;
use crate::flows::VectorField;
use crate::jet_groups::Jet;

use super::{FoliationSpec, GeneratorData, HolonomyDatum, LeafPresentation};

/// A value together with the position where it starts.
#[derive(Clone, Debug)]
pub(crate) struct Entry {
    pub(crate) value: String,
    pub(crate) line: usize,
    pub(crate) column: usize,
}

#[derive(Debug, Default)]
pub(crate) struct Section {
    pub(crate) line: usize,
    pub(crate) entries: BTreeMap<String, Entry>,
}

pub(crate) fn parse_sections(text: &str) -> Result<Vec<(String, Section)>> {
    let mut sections: Vec<(String, Section)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let col = line[..indent].chars().count() + 1;
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(Error::parse(line_no, col, "unterminated section header"));
            };
            let name = name.trim().to_string();
            if sections.iter().any(|(n, _)| *n == name) {
                return Err(Error::parse(line_no, col, format!("duplicate section [{name}]")));
            }
            sections.push((
                name,
                Section {
                    line: line_no,
                    entries: BTreeMap::new(),
                },
            ));
            continue;
        }
        let Some((_, section)) = sections.last_mut() else {
            return Err(Error::parse(line_no, col, "key outside of any section"));
        };
        let Some(eq) = line.find('=') else {
            return Err(Error::parse(line_no, col, "expected 'key = value'"));
        };
        let key = line[..eq].trim().to_string();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::parse(line_no, col, format!("invalid key '{key}'")));
        }
        let after = &line[eq + 1..];
        let lead = after.len() - after.trim_start().len();
        let value = after.trim().to_string();
        let vcol = line[..eq + 1 + lead].chars().count() + 1;
        if value.is_empty() {
            return Err(Error::parse(line_no, vcol, format!("missing value for '{key}'")));
        }
        if section.entries.contains_key(&key) {
            return Err(Error::parse(line_no, col, format!("duplicate key '{key}'")));
        }
        section.entries.insert(
            key,
            Entry {
                value,
                line: line_no,
                column: vcol,
            },
        );
    }
    Ok(sections)
}

/// Drops a `#` comment that is not inside a string.
fn strip_comment(line: &str) -> &str {
    let mut in_string = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_string = !in_string,
            '#' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

pub(crate) fn unquote(e: &Entry) -> Result<(String, usize)> {
    let v = e.value.as_str();
    if v.len() >= 2 && v.starts_with('"') && v.ends_with('"') {
        Ok((v[1..v.len() - 1].to_string(), e.column + 1))
    } else {
        Err(Error::parse(e.line, e.column, "expected a quoted string"))
    }
}

/// Re-bases a literal parse error onto the file position of the literal.
pub(crate) fn rebase(err: Error, line: usize, column: usize) -> Error {
    match err {
        Error::Parse {
            line: 1,
            column: c,
            message,
        } => Error::parse(line, column + c - 1, message),
        Error::Parse { message, .. } => Error::parse(line, column, message),
        other => other,
    }
}

fn parse_int(e: &Entry) -> Result<i64> {
    e.value
        .parse::<i64>()
        .map_err(|_| Error::parse(e.line, e.column, format!("expected an integer, found '{}'", e.value)))
}

fn parse_bool(e: &Entry) -> Result<bool> {
    match e.value.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::parse(e.line, e.column, format!("expected true or false, found '{other}'"))),
    }
}

/// Items of `[x, y, ...]`, each with its column.
pub(crate) fn parse_list(e: &Entry) -> Result<Vec<(String, usize)>> {
    let v = e.value.as_str();
    if !(v.starts_with('[') && v.ends_with(']')) {
        return Err(Error::parse(e.line, e.column, "expected a list in brackets"));
    }
    let inner = &v[1..v.len() - 1];
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut offset = 1;
    for item in inner.split(',') {
        let lead = item.len() - item.trim_start().len();
        let col = e.column + v[..offset + lead].chars().count();
        let item_t = item.trim();
        if item_t.is_empty() {
            return Err(Error::parse(e.line, col, "empty list item"));
        }
        out.push((item_t.to_string(), col));
        offset += item.len() + 1;
    }
    Ok(out)
}

fn known_keys(e: &Section, name: &str, allowed: &[&str]) -> Result<()> {
    for (k, entry) in &e.entries {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::parse(
                entry.line,
                entry.column,
                format!("unknown key '{k}' in [{name}]"),
            ));
        }
    }
    Ok(())
}

/// Parses and validates a spec file.
pub fn parse_spec(text: &str) -> Result<FoliationSpec> {
    let sections = parse_sections(text)?;
    let Some((_, fol)) = sections.iter().find(|(n, _)| n == "foliation") else {
        return Err(Error::parse(1, 1, "missing [foliation] section"));
    };
    known_keys(fol, "foliation", &["k", "generators", "relators", "bundle_trivial"])?;
    let k_entry = fol
        .entries
        .get("k")
        .ok_or_else(|| Error::parse(fol.line, 1, "[foliation] needs k"))?;
    let k = parse_int(k_entry)?;
    if k < 1 {
        return Err(Error::validation("transverse order", format!("k = {k} must be at least 2")));
    }
    let k = k as usize;

    let mut generators = Vec::new();
    if let Some(e) = fol.entries.get("generators") {
        for (item, col) in parse_list(e)? {
            let mut chars = item.chars();
            match (chars.next(), chars.next()) {
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
    if let Some(e) = fol.entries.get("relators") {
        for (item, col) in parse_list(e)? {
            let entry = Entry {
                value: item,
                line: e.line,
                column: col,
            };
            relators.push(unquote(&entry)?.0);
        }
    }
    let bundle_trivial = match fol.entries.get("bundle_trivial") {
        Some(e) => parse_bool(e)?,
        None => true,
    };
    let leaf = LeafPresentation::new(generators, relators)?;

    for (name, section) in &sections {
        if name == "foliation" {
            continue;
        }
        let known = name
            .strip_prefix("holonomy.")
            .and_then(|g| {
                let mut cs = g.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => Some(c),
                    _ => None,
                }
            })
            .is_some_and(|g| leaf.generators().contains(&g));
        if !known {
            return Err(Error::parse(section.line, 1, format!("unknown section [{name}]")));
        }
    }

    let mut data = Vec::new();
    for &g in leaf.generators() {
        let name = format!("holonomy.{g}");
        let Some((_, sec)) = sections.iter().find(|(n, _)| *n == name) else {
            return Err(Error::validation(
                format!("generator {g}"),
                format!("missing [{name}] section"),
            ));
        };
        data.push(parse_generator(sec, &name, k)?);
    }
    FoliationSpec::new(k, leaf, data, bundle_trivial)
}

fn parse_generator(sec: &Section, name: &str, k: usize) -> Result<GeneratorData> {
    known_keys(sec, name, &["type", "field", "jet", "order", "orientation"])?;
    let ty = sec
        .entries
        .get("type")
        .ok_or_else(|| Error::parse(sec.line, 1, format!("[{name}] needs type = flow|jet")))?;
    let orientation = match sec.entries.get("orientation") {
        None => 1,
        Some(e) => match e.value.as_str() {
            "+1" | "1" => 1,
            "-1" => -1,
            other => {
                return Err(Error::parse(
                    e.line,
                    e.column,
                    format!("orientation must be +1 or -1, found '{other}'"),
                ))
            }
        },
    };
    let datum = match ty.value.as_str() {
        "flow" => {
            if let Some(e) = sec.entries.get("jet").or(sec.entries.get("order")) {
                return Err(Error::parse(e.line, e.column, "flow data take only a field"));
            }
            let e = sec
                .entries
                .get("field")
                .ok_or_else(|| Error::parse(sec.line, 1, format!("[{name}] needs field")))?;
            let (lit, col) = unquote(e)?;
            let series = parse_polynomial(&lit, 'y').map_err(|err| rebase(err, e.line, col))?;
            HolonomyDatum::Flow(VectorField::new(series)?)
        }
        "jet" => {
            if let Some(e) = sec.entries.get("field") {
                return Err(Error::parse(e.line, e.column, "jet data take a jet, not a field"));
            }
            let e = sec
                .entries
                .get("jet")
                .ok_or_else(|| Error::parse(sec.line, 1, format!("[{name}] needs jet")))?;
            let (lit, col) = unquote(e)?;
            let poly = parse_polynomial(&lit, 'y').map_err(|err| rebase(err, e.line, col))?;
            let default_order = default_jet_order(poly.degree().unwrap_or(1), k);
            let order = match sec.entries.get("order") {
                None => default_order,
                Some(o) => {
                    let v = parse_int(o)?;
                    if v < 1 {
                        return Err(Error::parse(o.line, o.column, "order must be positive"));
                    }
                    v as usize
                }
            };
            let series = if order >= poly.order() {
                poly.extend(order)?
            } else {
                poly.truncate(order)?
            };
            HolonomyDatum::Jet(Jet::from_series(series)?)
        }
        other => {
            return Err(Error::parse(
                ty.line,
                ty.column,
                format!("type must be flow or jet, found '{other}'"),
            ))
        }
    };
    Ok(GeneratorData { datum, orientation })
}

fn default_jet_order(degree: usize, k: usize) -> usize {
    degree.max(k - 1).max(1)
}

/// Canonical text of a spec; `parse_spec(print_spec(s)) == s`.
pub fn print_spec(spec: &FoliationSpec) -> String {
    let gens: Vec<String> = spec.leaf().generators().iter().map(char::to_string).collect();
    let rels: Vec<String> = spec.leaf().relators().iter().map(|r| format!("\"{r}\"")).collect();
    let mut out = String::new();
    out.push_str("[foliation]\n");
    out.push_str(&format!("k = {}\n", spec.k()));
    out.push_str(&format!("generators = [{}]\n", gens.join(", ")));
    out.push_str(&format!("relators = [{}]\n", rels.join(", ")));
    out.push_str(&format!("bundle_trivial = {}\n", spec.bundle_trivial()));
    for (g, d) in spec.leaf().generators().iter().zip(spec.data()) {
        out.push_str(&format!("\n[holonomy.{g}]\n"));
        match &d.datum {
            HolonomyDatum::Flow(x) => {
                out.push_str("type = flow\n");
                out.push_str(&format!("field = \"{}\"\n", x.series().to_string()));
            }
            HolonomyDatum::Jet(j) => {
                out.push_str("type = jet\n");
                out.push_str(&format!("jet = \"{j}\"\n"));
                let degree = j.series().degree().unwrap_or(1);
                if j.order() != default_jet_order(degree, spec.k()) {
                    out.push_str(&format!("order = {}\n", j.order()));
                }
            }
        }
        let o = if d.orientation > 0 { "+1" } else { "-1" };
        out.push_str(&format!("orientation = {o}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW4: &str = "[foliation]\nk = 4\ngenerators = [a]\nrelators = []\nbundle_trivial = true\n\n[holonomy.a]\ntype = flow\nfield = \"y^2\"\norientation = +1\n";

    #[test]
    fn row4_round_trip() {
        let spec = parse_spec(ROW4).unwrap();
        assert_eq!(spec.k(), 4);
        assert!(matches!(spec.data()[0].datum, HolonomyDatum::Flow(_)));
        assert_eq!(print_spec(&spec), ROW4);
        assert_eq!(parse_spec(&print_spec(&spec)).unwrap(), spec);
    }

    #[test]
    fn trivial_leaf() {
        let spec = parse_spec("[foliation]\nk = 2\ngenerators = []\n").unwrap();
        assert!(spec.leaf().generators().is_empty());
    }

    #[test]
    fn unknown_generator_in_relator() {
        let text = "[foliation]\nk = 2\ngenerators = [a]\nrelators = [\"ab\"]\n[holonomy.a]\ntype = jet\njet = \"y\"\n";
        assert!(matches!(parse_spec(text), Err(Error::Validation { .. })));
    }

    #[test]
    fn literal_errors_point_into_the_file() {
        let text = "[foliation]\nk = 2\ngenerators = [a]\n[holonomy.a]\ntype = jet\njet = \"y + x\"\n";
        match parse_spec(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (6, 12)),
            other => panic!("{other:?}"),
        }
        let text = "[foliation]\nk = two\n";
        match parse_spec(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert!(parse_spec("k = 2\n").unwrap_err().is_parse());
        assert!(parse_spec("[foliation]\nk = 2\nfoo = 1\n").unwrap_err().is_parse());
        assert!(parse_spec("[foliation]\nk = 2\n[holonomy.b]\n").unwrap_err().is_parse());
        assert!(parse_spec("[foliation]\nk = 1\n").is_err());
        let missing = "[foliation]\nk = 2\ngenerators = [a]\n";
        assert!(matches!(parse_spec(missing), Err(Error::Validation { .. })));
    }

    #[test]
    fn jet_orders_survive_printing() {
        let text = "[foliation]\nk = 3\ngenerators = [a, b]\nrelators = [\"abAB\"]\nbundle_trivial = false\n\n[holonomy.a]\ntype = jet\njet = \"-y + 1/2 y^2\"\norder = 3\norientation = -1\n\n[holonomy.b]\ntype = jet\njet = \"E y\"\norientation = +1\n";
        let spec = parse_spec(text).unwrap();
        let printed = print_spec(&spec);
        assert_eq!(printed, text);
        assert_eq!(parse_spec(&printed).unwrap(), spec);
    }
}
