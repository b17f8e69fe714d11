use std::str::FromStr;

use crate::{Error, Result};

/// Ordered `key = value` document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDocument {
    entries: Vec<(String, String, usize)>,
}

impl KvDocument {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses every non-blank, non-comment line as `key = value`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            doc.push_line(line, i + 1)?;
        }
        Ok(doc)
    }

    pub(crate) fn push_line(&mut self, line: &str, lineno: usize) -> Result<()> {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(lineno, format!("expected 'key = value', got '{line}'")))?;
        let key = k.trim();
        if key.is_empty() {
            return Err(Error::parse(lineno, "empty key"));
        }
        if self.entries.iter().any(|(existing, _, _)| existing == key) {
            return Err(Error::parse(lineno, format!("duplicate key '{key}'")));
        }
        self.entries
            .push((key.to_string(), v.trim().to_string(), lineno));
        Ok(())
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        match self.entries.iter_mut().find(|(k, _, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value, 0)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map_or(0, |e| e.2)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::parse(0, format!("missing mandatory key '{key}'")))
    }

    pub fn require_parsed<T>(&self, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        let raw = self.require(key)?;
        raw.parse::<T>()
            .map_err(|e| Error::parse(self.line_of(key), format!("key '{key}': {e}")))
    }

    pub fn parsed<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some(_) => self.require_parsed(key).map(Some),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _, _)| k.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v, _) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_lookup() {
        let doc =
            KvDocument::parse("# header\n a0_angstrom = 3.555\n\nlabel=experiment\n").unwrap();
        assert_eq!(doc.get("label"), Some("experiment"));
        assert_eq!(doc.require_parsed::<f64>("a0_angstrom").unwrap(), 3.555);
        assert!(doc.require("b0_gpa").is_err());
        assert_eq!(doc.parsed::<f64>("b0_gpa").unwrap(), None);
    }

    #[test]
    fn rejects_malformed() {
        assert!(KvDocument::parse("just words\n").is_err());
        assert!(KvDocument::parse("a = 1\na = 2\n").is_err());
        assert!(KvDocument::parse(" = 2\n").is_err());
        let doc = KvDocument::parse("x = abc\n").unwrap();
        assert!(doc.require_parsed::<f64>("x").is_err());
    }
}
