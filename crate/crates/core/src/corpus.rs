//! Line-delimited corpus records and pattern-distribution statistics.
//!
//! Each line is a JSON object with the fields `id`, `pos`, `gloss`, and the
//! optional `tree` (bracketed parse), `instance`, `gold` and `predicted`
//! (inline annotations).

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::PartOfSpeech;
use crate::patterns::{pattern_of, Pattern};
use crate::rolemodel::{parse_gold, serialize_gold, Annotation, GoldError};
use crate::syntree::{parse_bracketed, serialize, SynTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefinitionRecord {
    pub id: String,
    pub pos: PartOfSpeech,
    pub gloss: String,
    pub tree: Option<SynTree>,
    pub instance: bool,
    pub gold: Option<Annotation>,
    pub predicted: Option<Annotation>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawRecord {
    id: String,
    pos: String,
    gloss: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tree: Option<String>,
    #[serde(default)]
    instance: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gold: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    predicted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub id: Option<String>,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.id {
            Some(id) => write!(f, "line {} ({id}): {}", self.line, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("zero records parsed ({} diagnostics)", .0.len())]
    NoRecords(Vec<Diagnostic>),
    #[error("record {id}: {source}")]
    Serialize { id: String, source: GoldError },
}

#[derive(Debug, Clone, Default)]
pub struct CorpusRead {
    pub records: Vec<DefinitionRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

fn annotation_field(
    raw: Option<&str>,
    field: &str,
    id: &str,
    tree: Option<&SynTree>,
) -> Result<Option<Annotation>, String> {
    let Some(text) = raw else { return Ok(None) };
    let mut ann = parse_gold(text).map_err(|e| format!("bad {field}: {e}"))?;
    if let Some(tree) = tree {
        if ann.tokens != tree.tokens() {
            return Err(format!("{field} tokens differ from tree leaves"));
        }
    }
    ann.definition_id = id.to_string();
    Ok(Some(ann))
}

fn convert(raw: RawRecord) -> Result<DefinitionRecord, String> {
    let pos: PartOfSpeech = raw.pos.parse()?;
    let tree = raw
        .tree
        .as_deref()
        .map(parse_bracketed)
        .transpose()
        .map_err(|e| format!("bad tree: {e}"))?;
    let gold = annotation_field(raw.gold.as_deref(), "gold", &raw.id, tree.as_ref())?;
    let predicted = annotation_field(raw.predicted.as_deref(), "predicted", &raw.id, tree.as_ref())?;
    Ok(DefinitionRecord {
        id: raw.id,
        pos,
        gloss: raw.gloss,
        tree,
        instance: raw.instance,
        gold,
        predicted,
    })
}

/// Parses a corpus. Bad lines become diagnostics; only a corpus with no
/// usable record at all is an error.
pub fn read_corpus(source: &str) -> Result<CorpusRead, CorpusError> {
    let mut out = CorpusRead::default();
    for (i, line) in source.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let raw: RawRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                out.diagnostics.push(Diagnostic {
                    line: line_no,
                    id: None,
                    message: format!("unparseable record: {e}"),
                });
                continue;
            }
        };
        let id = raw.id.clone();
        match convert(raw) {
            Ok(rec) => out.records.push(rec),
            Err(message) => out.diagnostics.push(Diagnostic {
                line: line_no,
                id: Some(id),
                message,
            }),
        }
    }
    if out.records.is_empty() {
        return Err(CorpusError::NoRecords(out.diagnostics));
    }
    Ok(out)
}

pub fn write_record(record: &DefinitionRecord) -> Result<String, CorpusError> {
    let gold_text = |a: &Option<Annotation>| {
        a.as_ref().map(serialize_gold).transpose().map_err(|source| CorpusError::Serialize {
            id: record.id.clone(),
            source,
        })
    };
    let raw = RawRecord {
        id: record.id.clone(),
        pos: record.pos.to_string(),
        gloss: record.gloss.clone(),
        tree: record.tree.as_ref().map(serialize),
        instance: record.instance,
        gold: gold_text(&record.gold)?,
        predicted: gold_text(&record.predicted)?,
    };
    Ok(serde_json::to_string(&raw).expect("record serialization is infallible"))
}

/// One canonical JSON line per record, newline-terminated.
pub fn write_corpus(records: &[DefinitionRecord]) -> Result<String, CorpusError> {
    let mut out = String::new();
    for r in records {
        out.push_str(&write_record(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// Pattern counts in descending order. Ties keep first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Distribution {
    pub rows: Vec<(Pattern, usize)>,
    /// Number of annotations whose pattern occurred once.
    pub other: usize,
    pub total: usize,
}

pub fn distribution(annotations: &[Annotation]) -> Distribution {
    let mut index: HashMap<Pattern, usize> = HashMap::new();
    let mut rows: Vec<(Pattern, usize)> = Vec::new();
    for a in annotations {
        let p = pattern_of(a);
        match index.get(&p) {
            Some(&i) => rows[i].1 += 1,
            None => {
                index.insert(p.clone(), rows.len());
                rows.push((p, 1));
            }
        }
    }
    rows.sort_by_key(|r| std::cmp::Reverse(r.1));
    let other = rows.iter().filter(|(_, c)| *c == 1).count();
    Distribution {
        rows,
        other,
        total: annotations.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub pattern: String,
    pub count: usize,
    pub percent: f64,
}

impl Distribution {
    fn percent(&self, count: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * count as f64 / self.total as f64
        }
    }

    /// Rows as presented in a report: repeated patterns, then "Other" for
    /// the singletons, then "Total".
    pub fn table_rows(&self) -> Vec<TableRow> {
        let mut out: Vec<TableRow> = self
            .rows
            .iter()
            .filter(|(_, c)| *c > 1)
            .map(|(p, c)| TableRow {
                pattern: p.render(),
                count: *c,
                percent: self.percent(*c),
            })
            .collect();
        if self.other > 0 {
            out.push(TableRow {
                pattern: "Other".into(),
                count: self.other,
                percent: self.percent(self.other),
            });
        }
        out.push(TableRow {
            pattern: "Total".into(),
            count: self.total,
            percent: self.percent(self.total),
        });
        out
    }

    pub fn render_table(&self) -> String {
        let rows = self.table_rows();
        let width = rows.iter().map(|r| r.pattern.len()).max().unwrap_or(0).max(7);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:>5}  {:>6}", "Pattern", "Total", "%");
        for r in rows {
            let _ = writeln!(out, "{:<width$}  {:>5}  {:>6.1}", r.pattern, r.count, r.percent);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"id":"baseball_coach","pos":"noun","gloss":"a coach of baseball players","tree":"(NP (NP (DT a) (NN coach)) (PP (IN of) (NP (NN baseball) (NNS players))))","instance":false,"gold":"a {supertype|coach} {differentia_quality|of baseball players}"}"#;

    #[test]
    fn three_lines() {
        let text = format!("{GOOD}\n{GOOD}\n\n{GOOD}\n");
        let read = read_corpus(&text).unwrap();
        assert_eq!(read.records.len(), 3);
        assert!(read.diagnostics.is_empty());
        assert_eq!(read.records[0].gold.as_ref().unwrap().definition_id, "baseball_coach");
    }

    #[test]
    fn bad_tree_is_isolated() {
        let bad = GOOD.replace("(NN coach))", "(NN coach)");
        let text = format!("{GOOD}\n{bad}\n{GOOD}\nnot json\n");
        let read = read_corpus(&text).unwrap();
        assert_eq!(read.records.len(), 2);
        assert_eq!(read.diagnostics.len(), 2);
        assert_eq!(read.diagnostics[0].line, 2);
        assert!(read.diagnostics[0].message.contains("bad tree"));
        assert_eq!(read.diagnostics[1].line, 4);
    }

    #[test]
    fn token_mismatch_is_diagnosed() {
        let bad = GOOD.replace("of baseball players}", "of football players}");
        let err = read_corpus(&bad).unwrap_err();
        match err {
            CorpusError::NoRecords(d) => assert!(d[0].message.contains("differ")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_input() {
        assert!(matches!(read_corpus(""), Err(CorpusError::NoRecords(d)) if d.is_empty()));
    }

    #[test]
    fn canonical_line_round_trips() {
        let read = read_corpus(GOOD).unwrap();
        assert_eq!(write_corpus(&read.records).unwrap(), format!("{GOOD}\n"));
    }

    #[test]
    fn distribution_counts() {
        let st_dq = parse_gold("{supertype|a} {differentia_quality|b}").unwrap();
        let st_de = parse_gold("{supertype|a} {differentia_event|b}").unwrap();
        let mut anns = vec![st_dq.clone(); 27];
        anns.extend(vec![st_de; 13]);
        let d = distribution(&anns);
        assert_eq!(d.rows[0].1, 27);
        assert_eq!(d.rows[1].1, 13);
        assert_eq!(d.rows[0].0.render(), "(supertype) (differentia quality)");
        assert_eq!(d.total, 40);
        assert_eq!(d.other, 0);
        assert_eq!(distribution(&[]), Distribution::default());
    }

    #[test]
    fn single_annotation_table() {
        let a = parse_gold("{supertype|a}").unwrap();
        let d = distribution(&[a]);
        let rows = d.table_rows();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].pattern, "Other");
        assert_eq!(rows[1].pattern, "Total");
        assert_eq!(rows[1].count, 1);
    }
}
