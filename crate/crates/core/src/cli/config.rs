//! Experiment configs: flat `key = value` pairs grouped under `[section]`
//! headers, read with the TOML grammar (strings quoted, no nesting).

use std::path::Path;
use std::str::FromStr;

use toml::{Table, Value};

use super::CliError;

#[derive(Debug, Clone, Default)]
pub struct Config {
    table: Table,
}

fn bad(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl FromStr for Config {
    type Err = CliError;
    fn from_str(text: &str) -> Result<Self, CliError> {
        let table: Table = text.parse().map_err(|e| CliError::Config(format!("config is not valid: {e}")))?;
        for (name, v) in &table {
            match v {
                Value::Table(t) => {
                    if let Some((k, _)) = t.iter().find(|(_, v)| matches!(v, Value::Table(_) | Value::Array(_))) {
                        return Err(bad(&format!("{name}.{k}"), "nested values are not supported"));
                    }
                }
                _ => return Err(bad(name, "keys must live under a [section] header")),
            }
        }
        Ok(Self { table })
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        text.parse()
    }

    fn get(&self, section: &str, key: &str) -> Option<&Value> {
        self.table.get(section)?.as_table()?.get(key)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.table.contains_key(section)
    }

    pub fn f64(&self, section: &str, key: &str) -> Result<Option<f64>, CliError> {
        let field = format!("{section}.{key}");
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::Float(x)) if x.is_finite() => Ok(Some(*x)),
            Some(Value::Integer(i)) => Ok(Some(*i as f64)),
            Some(other) => Err(bad(&field, format!("expected a finite number, found {other}"))),
        }
    }

    pub fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64(section, key)?.unwrap_or(default))
    }

    pub fn req_f64(&self, section: &str, key: &str) -> Result<f64, CliError> {
        self.f64(section, key)?.ok_or_else(|| bad(&format!("{section}.{key}"), "missing"))
    }

    pub fn u64_or(&self, section: &str, key: &str, default: u64) -> Result<u64, CliError> {
        match self.get(section, key) {
            None => Ok(default),
            Some(Value::Integer(i)) if *i >= 0 => Ok(*i as u64),
            Some(other) => Err(bad(&format!("{section}.{key}"), format!("expected a non-negative integer, found {other}"))),
        }
    }

    pub fn str(&self, section: &str, key: &str) -> Result<Option<&str>, CliError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(bad(&format!("{section}.{key}"), format!("expected a string, found {other}"))),
        }
    }

    pub fn req_str(&self, section: &str, key: &str) -> Result<&str, CliError> {
        self.str(section, key)?.ok_or_else(|| bad(&format!("{section}.{key}"), "missing"))
    }

    /// Comma-separated numbers in a string, e.g. `"0.1, 0.5, 1"`.
    pub fn f64_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let field = format!("{section}.{key}");
        match self.str(section, key)? {
            None => Ok(None),
            Some(s) => s
                .split(',')
                .map(|p| p.trim().parse::<f64>().map_err(|e| bad(&field, format!("`{}`: {e}", p.trim()))))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
        }
    }

    /// Parses a string field with `FromStr`, naming the field on failure.
    pub fn parse<T>(&self, section: &str, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.str(section, key)? {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|e| bad(&format!("{section}.{key}"), e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_sections() {
        let c: Config = "[graph]\ncase = \"III\"\nk = 0.5\nell = 1\n[sweep]\nlambdas = \"1, 2.5\"\n".parse().unwrap();
        assert_eq!(c.req_str("graph", "case").unwrap(), "III");
        assert_eq!(c.req_f64("graph", "ell").unwrap(), 1.0);
        assert_eq!(c.f64_list("sweep", "lambdas").unwrap().unwrap(), vec![1.0, 2.5]);
        assert_eq!(c.u64_or("sweep", "points", 7).unwrap(), 7);
    }

    #[test]
    fn errors_name_the_field() {
        let c: Config = "[graph]\nk = \"half\"\n".parse().unwrap();
        let msg = c.req_f64("graph", "k").unwrap_err().to_string();
        assert!(msg.contains("graph.k"), "{msg}");
        assert!("k = 1\n".parse::<Config>().is_err());
        assert!("[a]\nb = [1, 2]\n".parse::<Config>().is_err());
    }
}
