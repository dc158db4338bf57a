//! Named groups, sets and generators persisted as canonical JSON.

use crate::parse::{group_ref, parse_generator, parse_group, parse_set, ParseError};
use crate::CliError;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use zariski::config::Config;
use zariski::coset::GroupRef;
use zariski::sets::{DescribedSet, RoundGenerator};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub group: String,
    pub expr: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Session {
    pub schema_version: u32,
    pub current_group: Option<String>,
    pub groups: BTreeMap<String, String>,
    pub sets: BTreeMap<String, Bound>,
    pub generators: BTreeMap<String, Bound>,
    pub config: Config,
}

impl Default for Session {
    fn default() -> Self {
        Session {
            schema_version: SCHEMA_VERSION,
            current_group: None,
            groups: BTreeMap::new(),
            sets: BTreeMap::new(),
            generators: BTreeMap::new(),
            config: Config::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Group,
    Set,
    Generator,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(name, "Z" | "Q" | "G" | "Zp")
}

impl Session {
    pub fn load(path: &Path) -> Result<Session, CliError> {
        if !path.exists() {
            return Ok(Session::default());
        }
        let text = std::fs::read_to_string(path)?;
        let s: Session = serde_json::from_str(&text).map_err(|e| CliError::Session(e.to_string()))?;
        if s.schema_version != SCHEMA_VERSION {
            return Err(CliError::Session(format!(
                "session schema {} is not supported (expected {SCHEMA_VERSION})",
                s.schema_version
            )));
        }
        s.config.validate()?;
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        // going through Value sorts every object's keys
        let doc = serde_json::to_value(self).map_err(|e| CliError::Session(e.to_string()))?;
        let text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Session(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    fn taken(&self, name: &str) -> Option<Kind> {
        if self.groups.contains_key(name) {
            Some(Kind::Group)
        } else if self.sets.contains_key(name) {
            Some(Kind::Set)
        } else if self.generators.contains_key(name) {
            Some(Kind::Generator)
        } else {
            None
        }
    }

    fn claim(&self, name: &str, kind: Kind) -> Result<(), CliError> {
        if !valid_name(name) {
            return Err(CliError::Session(format!("'{name}' is not a valid name")));
        }
        match self.taken(name) {
            Some(k) if k != kind => Err(CliError::Session(format!("'{name}' is already defined as a {k:?}"))),
            _ => Ok(()),
        }
    }

    /// Group named `name`, or `name` parsed as a group expression.
    pub fn group(&self, name_or_expr: &str) -> Result<GroupRef, CliError> {
        let text = self.groups.get(name_or_expr).map(String::as_str).unwrap_or(name_or_expr);
        Ok(group_ref(parse_group(text)?))
    }

    /// The explicit group, else the current one.
    pub fn ambient(&self, explicit: Option<&str>) -> Result<(String, GroupRef), CliError> {
        let name = explicit
            .map(str::to_string)
            .or_else(|| self.current_group.clone())
            .ok_or_else(|| CliError::Session("no group given and no current group set".into()))?;
        let g = self.group(&name)?;
        Ok((name, g))
    }

    pub fn define_group(&mut self, name: &str, expr: &str, make_current: bool) -> Result<String, CliError> {
        self.claim(name, Kind::Group)?;
        let canonical = parse_group(expr)?.to_string();
        self.groups.insert(name.to_string(), canonical.clone());
        if make_current || self.current_group.is_none() {
            self.current_group = Some(name.to_string());
        }
        Ok(canonical)
    }

    pub fn define_set(&mut self, name: &str, expr: &str, group: Option<&str>) -> Result<String, CliError> {
        self.claim(name, Kind::Set)?;
        let (gname, g) = self.ambient(group)?;
        let canonical = parse_set(&g, expr, &self.config)?.to_string();
        self.sets.insert(name.to_string(), Bound { group: gname, expr: canonical.clone() });
        Ok(canonical)
    }

    pub fn define_generator(&mut self, name: &str, expr: &str, group: Option<&str>) -> Result<String, CliError> {
        self.claim(name, Kind::Generator)?;
        let (gname, g) = self.ambient(group)?;
        let canonical = parse_generator(&g, expr)?.to_string();
        self.generators.insert(name.to_string(), Bound { group: gname, expr: canonical.clone() });
        Ok(canonical)
    }

    /// A named set, or an expression over the explicit or current group.
    pub fn set(&self, name_or_expr: &str, group: Option<&str>, cfg: &Config) -> Result<DescribedSet, CliError> {
        if let Some(b) = self.sets.get(name_or_expr) {
            let g = self.group(&b.group)?;
            return Ok(parse_set(&g, &b.expr, cfg)?);
        }
        let (_, g) = self.ambient(group)?;
        Ok(parse_set(&g, name_or_expr, cfg)?)
    }

    pub fn generator(&self, name_or_expr: &str, group: Option<&str>) -> Result<RoundGenerator, CliError> {
        if let Some(b) = self.generators.get(name_or_expr) {
            let g = self.group(&b.group)?;
            return Ok(parse_generator(&g, &b.expr)?);
        }
        let (_, g) = self.ambient(group)?;
        Ok(parse_generator(&g, name_or_expr)?)
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e)
    }
}
