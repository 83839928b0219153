//! Command reports: tables and pass/fail checks, printed as text or JSON.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), ..Default::default() }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    pub fn table(&mut self, title: &str, columns: &[&str], rows: Vec<Vec<String>>) {
        self.tables.push(Table { title: title.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows });
    }

    pub fn check(&mut self, name: &str, pass: bool, witness: Option<String>) {
        self.checks.push(Check { name: name.into(), pass, witness });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        for (k, v) in &self.parameters {
            let _ = writeln!(s, "  {k} = {v}");
        }
        for t in &self.tables {
            let _ = writeln!(s, "\n{}", t.title);
            let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
            for r in &t.rows {
                for (i, x) in r.iter().enumerate() {
                    if i < widths.len() {
                        widths[i] = widths[i].max(x.chars().count());
                    }
                }
            }
            let line = |cells: &[String]| {
                let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                parts.join("  ")
            };
            let _ = writeln!(s, "{}", line(&t.columns));
            for r in &t.rows {
                let _ = writeln!(s, "{}", line(r));
            }
        }
        if !self.checks.is_empty() {
            let _ = writeln!(s);
        }
        for c in &self.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            match &c.witness {
                Some(w) => {
                    let _ = writeln!(s, "[{status}] {} ({w})", c.name);
                }
                None => {
                    let _ = writeln!(s, "[{status}] {}", c.name);
                }
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json() {
        let mut r = Report::new("demo");
        r.param("L", 3);
        r.table("dims", &["k", "dim"], vec![vec!["0".into(), "4".into()]]);
        r.check("square zero", true, None);
        r.check("other", false, Some("w".into()));
        assert!(!r.passed());
        let t = r.to_text();
        assert!(t.contains("[FAIL] other (w)") && t.contains("  L = 3"));
        let j: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(j["checks"][0]["pass"], true);
        assert_eq!(j["tables"][0]["rows"][0][1], "4");
    }
}
