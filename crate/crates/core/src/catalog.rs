//! The built-in model catalog and its text format.
//!
//! The catalog ships as a data file (`data/models.txt`) embedded into the
//! library and parsed at startup. Each record carries a model's canonical
//! name, step set, symmetry-group generators, reported classification tags
//! (kept verbatim as unverified metadata, including trailing `?` marks), and
//! the side conditions under which the sources report better behavior.

use crate::expr::parse_frac;
use crate::kernel::{GroupElement, Model, StepSet};
use crate::{Error, Result};

/// Canonical embedded copy of the catalog file.
pub const CATALOG_TEXT: &str = include_str!("../data/models.txt");

/// One catalog record.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub aliases: Vec<String>,
    pub steps: StepSet,
    pub generators: Vec<GroupElement>,
    /// Group order as listed; `group_closure` verifies it.
    pub order: usize,
    pub class_xy: String,
    pub class_t: String,
    pub df_condition: String,
    pub alg_condition: String,
}

impl CatalogEntry {
    /// Model with unit weights.
    pub fn model(&self) -> Model {
        Model::unweighted(self.name.clone(), self.steps.clone())
    }
}

/// Parsed catalog with lookup by name or alias.
#[derive(Debug, Clone)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    /// Parse the embedded catalog.
    pub fn builtin() -> Catalog {
        Catalog::parse(CATALOG_TEXT).expect("embedded catalog parses")
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        let needle = name.to_ascii_lowercase();
        self.entries
            .iter()
            .find(|e| e.name == needle || e.aliases.iter().any(|a| *a == needle))
    }

    pub fn parse(text: &str) -> Result<Catalog> {
        let mut entries = Vec::new();
        let mut fields: Vec<(String, String)> = Vec::new();
        let flush = |fields: &mut Vec<(String, String)>, entries: &mut Vec<CatalogEntry>| -> Result<()> {
            if fields.is_empty() {
                return Ok(());
            }
            entries.push(parse_entry(std::mem::take(fields))?);
            Ok(())
        };
        for raw in text.lines() {
            let line = raw.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                flush(&mut fields, &mut entries)?;
                continue;
            }
            let (key, value) = line
                .split_once(' ')
                .ok_or_else(|| Error::Parse(format!("malformed catalog line {line:?}")))?;
            fields.push((key.to_string(), value.trim().to_string()));
        }
        flush(&mut fields, &mut entries)?;
        if entries.is_empty() {
            return Err(Error::Parse("empty catalog".into()));
        }
        Ok(Catalog { entries })
    }
}

fn parse_entry(fields: Vec<(String, String)>) -> Result<CatalogEntry> {
    let mut name = None;
    let mut aliases = Vec::new();
    let mut steps = None;
    let mut generators = Vec::new();
    let mut order = None;
    let mut class_xy = String::from("-");
    let mut class_t = String::from("-");
    let mut df_condition = String::from("-");
    let mut alg_condition = String::from("-");
    for (key, value) in fields {
        match key.as_str() {
            "model" => name = Some(value),
            "aliases" => {
                aliases = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            }
            "steps" => steps = Some(StepSet::parse(&value)?),
            "group" => {
                for part in value.split(';') {
                    generators.push(parse_generator(part.trim())?);
                }
            }
            "order" => {
                order = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad group order {value:?}")))?,
                )
            }
            "class-xy" => class_xy = value,
            "class-t" => class_t = value,
            "df-condition" => df_condition = value,
            "alg-condition" => alg_condition = value,
            other => {
                return Err(Error::Parse(format!("unknown catalog field {other:?}")));
            }
        }
    }
    let name = name.ok_or_else(|| Error::Parse("catalog record missing model name".into()))?;
    Ok(CatalogEntry {
        steps: steps.ok_or_else(|| Error::Parse(format!("model {name} missing steps")))?,
        order: order.ok_or_else(|| Error::Parse(format!("model {name} missing group order")))?,
        name,
        aliases,
        generators,
        class_xy,
        class_t,
        df_condition,
        alg_condition,
    })
}

fn parse_generator(src: &str) -> Result<GroupElement> {
    let inner = src
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("generator {src:?} is not parenthesized")))?;
    // split at the top-level comma
    let mut depth = 0usize;
    let mut split = None;
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                split = Some(i);
                break;
            }
            _ => {}
        }
    }
    let at = split.ok_or_else(|| Error::Parse(format!("generator {src:?} missing comma")))?;
    let fx = parse_frac(&inner[..at])?;
    let fy = parse_frac(&inner[at + 1..])?;
    Ok(GroupElement::new(fx, fy))
}
