//! Named seed transforms.
//!
//! Registry files hold one code per line:
//!
//! ```text
//! # name  n k m  kinds  row decimals (2(n+m) of them, MSB = first column)
//! my-code 3 1 3  e,e    4091 3736 2097 1336 1601 279 3093 502 1792 3020 226 1100
//! ```
//!
//! `kinds` lists `a` (ancilla) or `e` (ebit) for each of the `n - k` ancilla
//! qubits. `#` starts a comment. A later record with an existing name replaces
//! the earlier one, built-ins included, and leaves a warning.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pauli::{AncillaKind, SeedTransform, OPT_INNER_DECIMALS, OPT_OUTER_DECIMALS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntrySource {
    Builtin,
    Line(usize),
}

#[derive(Clone, Debug)]
pub struct RegistryEntry {
    pub name: String,
    pub seed: SeedTransform,
    pub source: EntrySource,
}

#[derive(Clone, Debug, Default)]
pub struct CodeRegistry {
    entries: BTreeMap<String, RegistryEntry>,
    warnings: Vec<String>,
}

impl CodeRegistry {
    /// `opt-inner` (all ebits) and `opt-outer` (all ancillas).
    pub fn builtin() -> Self {
        let mut reg = CodeRegistry::default();
        let inner = SeedTransform::from_decimals(&OPT_INNER_DECIMALS, 3, 1, 3, vec![AncillaKind::Ebit; 2])
            .expect("built-in inner seed is symplectic");
        let outer = SeedTransform::from_decimals(&OPT_OUTER_DECIMALS, 3, 1, 3, vec![AncillaKind::Ancilla; 2])
            .expect("built-in outer seed is symplectic");
        reg.insert("opt-inner", inner, EntrySource::Builtin);
        reg.insert("opt-outer", outer, EntrySource::Builtin);
        reg
    }

    /// Built-ins plus the records in `text`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reg = Self::builtin();
        reg.extend_from_str(text)?;
        Ok(reg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read registry {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn extend_from_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (name, seed) = parse_record(body).map_err(|message| Error::Registry { line, message })?;
            self.insert(&name, seed, EntrySource::Line(line));
        }
        Ok(())
    }

    fn insert(&mut self, name: &str, seed: SeedTransform, source: EntrySource) {
        if let Some(old) = self.entries.get(name) {
            let from = match old.source {
                EntrySource::Builtin => "built-in".to_string(),
                EntrySource::Line(l) => format!("line {l}"),
            };
            let to = match source {
                EntrySource::Builtin => "built-in".to_string(),
                EntrySource::Line(l) => format!("line {l}"),
            };
            self.warnings.push(format!("code '{name}' from {to} overrides the definition from {from}"));
        }
        self.entries.insert(name.to_string(), RegistryEntry { name: name.to_string(), seed, source });
    }

    pub fn get(&self, name: &str) -> Option<&SeedTransform> {
        self.entries.get(name).map(|e| &e.seed)
    }

    pub fn require(&self, name: &str) -> Result<&SeedTransform> {
        self.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.names().collect();
            Error::InvalidInput(format!("unknown code '{name}' (known: {})", known.join(", ")))
        })
    }

    pub fn entry(&self, name: &str) -> Option<&RegistryEntry> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Registry text that parses back to the same entries.
    pub fn to_text(&self) -> String {
        self.entries.values().map(|e| format_record(&e.name, &e.seed) + "\n").collect()
    }
}

pub fn format_record(name: &str, seed: &SeedTransform) -> String {
    let kinds: Vec<String> = seed.ancilla_kinds().iter().map(|k| k.letter().to_string()).collect();
    let decimals: Vec<String> = seed.to_decimals().iter().map(u64::to_string).collect();
    format!("{name} {} {} {} {} {}", seed.n(), seed.k(), seed.m(), kinds.join(","), decimals.join(" "))
}

fn parse_record(body: &str) -> std::result::Result<(String, SeedTransform), String> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() < 5 {
        return Err(format!("expected 'name n k m kinds decimals...', got {} fields", fields.len()));
    }
    let name = fields[0].to_string();
    let count = |i: usize, what: &str| -> std::result::Result<usize, String> {
        fields[i].parse().map_err(|_| format!("{what} '{}' is not a non-negative integer", fields[i]))
    };
    let (n, k, m) = (count(1, "n")?, count(2, "k")?, count(3, "m")?);
    let kinds = fields[4]
        .split(',')
        .map(|s| AncillaKind::from_letter(s.trim()).ok_or_else(|| format!("ancilla kind '{s}' must be 'a' or 'e'")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let decimals = fields[5..]
        .iter()
        .map(|s| s.parse::<u64>().map_err(|_| format!("row decimal '{s}' is not a non-negative integer")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let seed = SeedTransform::from_decimals(&decimals, n, k, m, kinds).map_err(|e| e.to_string())?;
    Ok((name, seed))
}
