//! JSON-lines traces: one object per event, `{"seq", "kind", "data"}`.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    lines: Vec<String>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, kind: &str, data: impl Serialize) {
        let data = serde_json::to_value(data).unwrap_or_else(|e| Value::String(format!("unserializable: {e}")));
        let line = json!({ "seq": self.lines.len(), "kind": kind, "data": data });
        self.lines.push(line.to_string());
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn count(&self, kind: &str) -> usize {
        self.events().filter(|(k, _)| k == kind).count()
    }

    /// Parsed `(kind, data)` pairs.
    pub fn events(&self) -> impl Iterator<Item = (String, Value)> + '_ {
        self.lines.iter().filter_map(|l| {
            let v: Value = serde_json::from_str(l).ok()?;
            Some((v["kind"].as_str()?.to_string(), v["data"].clone()))
        })
    }

    pub fn append(&mut self, other: &Trace) {
        for (kind, data) in other.events() {
            self.push(&kind, data);
        }
    }

    pub fn write_to(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        f.flush()
    }

    pub fn read_from(path: &Path) -> std::io::Result<Trace> {
        let text = std::fs::read_to_string(path)?;
        Ok(Trace {
            lines: text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(str::to_string)
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_numbered_json() {
        let mut t = Trace::new();
        t.push("stage", json!({"s": 0}));
        t.push("defeat", [1, 2]);
        assert_eq!(t.lines()[1], r#"{"data":[1,2],"kind":"defeat","seq":1}"#);
        assert_eq!(t.count("defeat"), 1);
        let mut u = Trace::new();
        u.append(&t);
        assert_eq!(u, t);
    }
}
