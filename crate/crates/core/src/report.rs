//! Machine-readable reports and their JSON, CSV and text renderings.
//!
//! The serialized report contains no timing data, so identical configurations
//! render to identical bytes.

use std::fmt::Write as _;
use std::time::Duration;

use serde::Serialize;

use crate::analysis::{ClassSurvey, Verdict};
use crate::lexarray::LexArray;
use crate::returns::{ClassId, ReturnClass, ReturnSet, StabilizationPolicy, StabilizationReport};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for Tool {
    fn default() -> Self {
        Tool {
            name: "abret",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Everything needed to rerun the command that produced a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub max_factor_length: usize,
    pub policy: StabilizationPolicy,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub all_lengths: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
}

/// One queried abelian class with its returns and stabilization data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReturnsEntry {
    pub target: ClassId,
    /// Factors of the target class; only the queried word for `--target`.
    pub members: Vec<Word>,
    pub classes: Vec<ReturnClass>,
    pub occurrences: usize,
    pub stable: bool,
    pub prefix_used: usize,
    pub history: Vec<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReturnsEntry {
    pub fn from_result(
        target: ClassId,
        members: Vec<Word>,
        result: Result<(ReturnSet, StabilizationReport), String>,
    ) -> Self {
        match result {
            Ok((set, report)) => ReturnsEntry {
                target: set.target,
                members,
                classes: set.classes,
                occurrences: set.occurrences,
                stable: report.stable,
                prefix_used: report.prefix_used,
                history: report.history,
                error: None,
            },
            Err(e) => ReturnsEntry {
                target,
                members,
                classes: Vec::new(),
                occurrences: 0,
                stable: false,
                prefix_used: 0,
                history: Vec::new(),
                error: Some(e),
            },
        }
    }

    pub fn from_survey(c: &ClassSurvey) -> Self {
        let result = match (&c.returns, &c.stabilization, &c.error) {
            (Some(set), Some(report), _) => Ok((set.clone(), report.clone())),
            (_, _, Some(e)) => Err(e.clone()),
            _ => Err("no data".to_string()),
        };
        ReturnsEntry::from_result(c.id, c.members.clone(), result)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Payload {
    Generate {
        length: usize,
        word: Word,
    },
    Returns {
        entries: Vec<ReturnsEntry>,
    },
    #[serde(rename = "lexarray", rename_all = "camelCase")]
    LexArray {
        array: LexArray,
        balanced: bool,
        column_shift: bool,
    },
    Verify {
        verdicts: Vec<Verdict>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub tool: Tool,
    pub config: RunConfig,
    pub payload: Payload,
    #[serde(skip)]
    pub duration: Duration,
}

/// Process exit status derived from a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    Violations,
    CaveatsOnly,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Clean => 0,
            Outcome::Violations => 1,
            Outcome::CaveatsOnly => 2,
        }
    }
}

impl Report {
    pub fn outcome(&self) -> Outcome {
        match &self.payload {
            Payload::Generate { .. } | Payload::LexArray { .. } => Outcome::Clean,
            Payload::Verify { verdicts } => {
                if verdicts.iter().any(|v| !v.holds) {
                    Outcome::Violations
                } else if verdicts.iter().any(|v| !v.caveats.is_empty()) {
                    Outcome::CaveatsOnly
                } else {
                    Outcome::Clean
                }
            }
            Payload::Returns { entries } => {
                let binary = entries.iter().all(|e| e.target.vector.alphabet() == 2);
                let out_of_range = self.config.all_lengths
                    && binary
                    && entries
                        .iter()
                        .any(|e| e.stable && !(2..=3).contains(&e.classes.len()));
                if out_of_range {
                    Outcome::Violations
                } else if entries.iter().any(|e| !e.stable) {
                    Outcome::CaveatsOnly
                } else {
                    Outcome::Clean
                }
            }
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.render_csv(),
            Format::Text => self.render_text(),
        }
    }

    fn render_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut row = |fields: &[String]| w.write_record(fields).expect("in-memory csv write");
        match &self.payload {
            Payload::Generate { length, word } => {
                row(&["length".into(), "word".into()]);
                row(&[length.to_string(), word.to_string()]);
            }
            Payload::LexArray { array, .. } => {
                row(&["row".into(), "word".into()]);
                for (i, r) in array.rows().iter().enumerate() {
                    row(&[i.to_string(), r.to_string()]);
                }
            }
            Payload::Returns { entries } => {
                row(&[
                    "factor_length",
                    "class",
                    "class_representative",
                    "return_length",
                    "return_class",
                    "return_representative",
                    "occurrences",
                    "stable",
                    "prefix_used",
                ]
                .map(String::from));
                for e in entries {
                    let rep = e.members.first().map(Word::to_string).unwrap_or_default();
                    if e.classes.is_empty() {
                        row(&[
                            e.target.length.to_string(),
                            e.target.to_string(),
                            rep.clone(),
                            String::new(),
                            String::new(),
                            String::new(),
                            e.occurrences.to_string(),
                            e.stable.to_string(),
                            e.prefix_used.to_string(),
                        ]);
                    }
                    for c in &e.classes {
                        row(&[
                            e.target.length.to_string(),
                            e.target.to_string(),
                            rep.clone(),
                            c.id.length.to_string(),
                            c.id.to_string(),
                            c.representative.to_string(),
                            e.occurrences.to_string(),
                            e.stable.to_string(),
                            e.prefix_used.to_string(),
                        ]);
                    }
                }
            }
            Payload::Verify { verdicts } => {
                row(&["theorem", "holds", "kind", "length", "factor", "detail"].map(String::from));
                for v in verdicts {
                    let base = |kind: &str, length: String, factor: String, detail: String| {
                        vec![
                            v.theorem.clone(),
                            v.holds.to_string(),
                            kind.to_string(),
                            length,
                            factor,
                            detail,
                        ]
                    };
                    row(&base(
                        "summary",
                        v.checked_lengths.to.to_string(),
                        String::new(),
                        String::new(),
                    ));
                    for x in &v.witnesses {
                        row(&base(
                            "witness",
                            x.length.to_string(),
                            x.factor.to_string(),
                            x.observed.clone(),
                        ));
                    }
                    for x in &v.caveats {
                        row(&base(
                            "caveat",
                            x.length.to_string(),
                            x.factor.to_string(),
                            x.reason.clone(),
                        ));
                    }
                    for note in &v.notes {
                        row(&base("note", String::new(), String::new(), note.clone()));
                    }
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        match &self.payload {
            Payload::Generate { word, .. } => {
                let _ = writeln!(out, "{word}");
            }
            Payload::LexArray {
                array,
                balanced,
                column_shift,
            } => {
                out.push_str(&array.grid());
                out.push('\n');
                let _ = writeln!(out, "p = {}, q = {}", array.p, array.q);
                let _ = writeln!(out, "balanced: {balanced}");
                let _ = writeln!(out, "column shift identity: {column_shift}");
            }
            Payload::Returns { entries } => {
                if let Some(src) = &self.config.source {
                    let _ = writeln!(out, "source: {src}");
                }
                for e in entries {
                    let members: Vec<String> = e.members.iter().map(Word::to_string).collect();
                    let _ = write!(
                        out,
                        "[{}] length {}: ",
                        members.join(" ~ab "),
                        e.target.length
                    );
                    if let Some(err) = &e.error {
                        let _ = writeln!(out, "{err}");
                        continue;
                    }
                    let reps: Vec<String> = e
                        .classes
                        .iter()
                        .map(|c| c.representative.to_string())
                        .collect();
                    let status = if e.stable { "stable" } else { "unstable" };
                    let _ = writeln!(
                        out,
                        "{} abelian returns {{{}}} ({status} at prefix {}, {} occurrences)",
                        e.classes.len(),
                        reps.join(", "),
                        e.prefix_used,
                        e.occurrences
                    );
                }
            }
            Payload::Verify { verdicts } => {
                if let Some(src) = &self.config.source {
                    let _ = writeln!(out, "source: {src}");
                }
                for v in verdicts {
                    let _ = writeln!(
                        out,
                        "{}: {} (lengths {}..={})",
                        v.theorem,
                        if v.holds { "holds" } else { "fails" },
                        v.checked_lengths.from,
                        v.checked_lengths.to
                    );
                    for x in &v.witnesses {
                        let _ =
                            writeln!(out, "  witness n={} {}: {}", x.length, x.factor, x.observed);
                    }
                    for x in &v.caveats {
                        let _ = writeln!(out, "  caveat n={} {}: {}", x.length, x.factor, x.reason);
                    }
                    for note in &v.notes {
                        let _ = writeln!(out, "  note: {note}");
                    }
                }
            }
        }
        out
    }
}
