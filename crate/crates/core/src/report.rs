//! Structured reports with dual rendering.  The JSON form is authoritative
//! and round-trips losslessly; the text form is derived from it.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub label: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Report {
    pub title: String,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<Table>,
    pub witnesses: Vec<WitnessRow>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
    /// 0 success/descend, 1 violation/not-descend, 2 input error.
    pub exit_code: i32,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), ..Default::default() }
    }

    pub fn verdict(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.verdicts.push(Verdict { name: name.into(), value: value.into() });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn table(
        &mut self,
        title: impl Into<String>,
        columns: Vec<String>,
        rows: Vec<Vec<String>>,
    ) {
        self.tables.push(Table { title: title.into(), columns, rows });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== {} ==\n", self.title));
        for v in &self.verdicts {
            out.push_str(&format!("{}: {}\n", v.name, v.value));
        }
        for t in &self.tables {
            out.push_str(&format!("\n-- {} --\n", t.title));
            out.push_str(&format!("{}\n", t.columns.join(" | ")));
            for row in &t.rows {
                out.push_str(&format!("{}\n", row.join(" | ")));
            }
        }
        if !self.witnesses.is_empty() {
            out.push_str("\nwitnesses:\n");
            for w in &self.witnesses {
                out.push_str(&format!("  {}: {}\n", w.label, w.reason));
            }
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }
}
