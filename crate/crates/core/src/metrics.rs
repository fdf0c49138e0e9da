//! Precision/recall/F1 of predicted role annotations against gold ones.
//!
//! Scores are generic over the float type; see the `EvalReport64` alias at
//! the crate root for the usual instantiation.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};

use num_traits::Float;
use serde::Serialize;
use thiserror::Error;

use crate::rolemodel::{Annotation, Role};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignmentError {
    #[error("gold has {gold} definitions but predicted has {predicted}")]
    Length { gold: usize, predicted: usize },
    #[error("definition {gold:?} is paired with {predicted:?}")]
    IdMismatch { gold: String, predicted: String },
    #[error("definition {id:?}: token sequences differ")]
    TokenMismatch { id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Counts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf<F> {
    pub precision: F,
    pub recall: F,
    pub f1: F,
}

fn ratio<F: Float>(num: usize, den: usize) -> F {
    if den == 0 {
        F::zero()
    } else {
        F::from(num).unwrap() / F::from(den).unwrap()
    }
}

impl<F: Float> Prf<F> {
    /// Zero denominators yield zero scores.
    pub fn from_counts(c: Counts) -> Self {
        let precision = ratio::<F>(c.true_positives, c.true_positives + c.false_positives);
        let recall = ratio::<F>(c.true_positives, c.true_positives + c.false_negatives);
        Prf {
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
        }
    }
}

pub fn harmonic_mean<F: Float>(p: F, r: F) -> F {
    if p + r == F::zero() {
        F::zero()
    } else {
        let two = F::one() + F::one();
        two * p * r / (p + r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport<F> {
    pub definitions: usize,
    /// Exact-span scores per role.
    pub per_role: BTreeMap<Role, Prf<F>>,
    /// Token-overlap scores per role.
    pub token_level: BTreeMap<Role, Prf<F>>,
    /// Micro-averaged exact-span scores over all roles.
    pub overall: Prf<F>,
    pub supertype_accuracy: F,
    pub ill_formed_agreement: F,
    /// Gold span count per role.
    pub support: BTreeMap<Role, usize>,
    pub span_counts: BTreeMap<Role, Counts>,
    pub notes: Vec<String>,
}

fn check_alignment(gold: &[Annotation], predicted: &[Annotation]) -> Result<(), AlignmentError> {
    if gold.len() != predicted.len() {
        return Err(AlignmentError::Length {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    for (g, p) in gold.iter().zip(predicted) {
        if g.definition_id != p.definition_id {
            return Err(AlignmentError::IdMismatch {
                gold: g.definition_id.clone(),
                predicted: p.definition_id.clone(),
            });
        }
        if g.tokens != p.tokens {
            return Err(AlignmentError::TokenMismatch {
                id: g.definition_id.clone(),
            });
        }
    }
    Ok(())
}

/// Scores `predicted` against `gold`, pairing definitions by position.
/// Roles absent from both sides are omitted from the per-role maps.
pub fn evaluate<F: Float>(gold: &[Annotation], predicted: &[Annotation]) -> Result<EvalReport<F>, AlignmentError> {
    check_alignment(gold, predicted)?;

    let mut span_counts: BTreeMap<Role, Counts> = BTreeMap::new();
    let mut token_counts: BTreeMap<Role, Counts> = BTreeMap::new();
    let mut support: BTreeMap<Role, usize> = BTreeMap::new();
    let mut predicted_spans: BTreeMap<Role, usize> = BTreeMap::new();
    let mut supertype_agree = 0usize;
    let mut ill_formed_agree = 0usize;

    for (g, p) in gold.iter().zip(predicted) {
        let gold_set: HashSet<_> = g.spans.iter().map(|s| (s.role, s.span)).collect();
        let pred_set: HashSet<_> = p.spans.iter().map(|s| (s.role, s.span)).collect();
        for s in &gold_set {
            *support.entry(s.0).or_default() += 1;
            let c = span_counts.entry(s.0).or_default();
            if pred_set.contains(s) {
                c.true_positives += 1;
            } else {
                c.false_negatives += 1;
            }
        }
        for s in &pred_set {
            *predicted_spans.entry(s.0).or_default() += 1;
            if !gold_set.contains(s) {
                span_counts.entry(s.0).or_default().false_positives += 1;
            }
        }

        let roles: HashSet<Role> = g.spans.iter().chain(&p.spans).map(|s| s.role).collect();
        for role in roles {
            let gt: HashSet<usize> = g.token_set(role).into_iter().collect();
            let pt: HashSet<usize> = p.token_set(role).into_iter().collect();
            let c = token_counts.entry(role).or_default();
            c.true_positives += gt.intersection(&pt).count();
            c.false_negatives += gt.difference(&pt).count();
            c.false_positives += pt.difference(&gt).count();
        }

        if g.token_set(Role::Supertype) == p.token_set(Role::Supertype) {
            supertype_agree += 1;
        }
        if g.ill_formed == p.ill_formed {
            ill_formed_agree += 1;
        }
    }

    let total = span_counts.values().fold(Counts::default(), |acc, c| Counts {
        true_positives: acc.true_positives + c.true_positives,
        false_positives: acc.false_positives + c.false_positives,
        false_negatives: acc.false_negatives + c.false_negatives,
    });
    let mut notes = Vec::new();
    for role in span_counts.keys() {
        if predicted_spans.get(role).copied().unwrap_or(0) == 0 {
            notes.push(format!("{role}: no predicted spans; precision undefined, reported as 0"));
        }
        if support.get(role).copied().unwrap_or(0) == 0 {
            notes.push(format!("{role}: zero gold support; recall undefined, reported as 0"));
        }
    }

    Ok(EvalReport {
        definitions: gold.len(),
        per_role: span_counts.iter().map(|(r, c)| (*r, Prf::from_counts(*c))).collect(),
        token_level: token_counts.iter().map(|(r, c)| (*r, Prf::from_counts(*c))).collect(),
        overall: Prf::from_counts(total),
        supertype_accuracy: ratio(supertype_agree, gold.len()),
        ill_formed_agreement: ratio(ill_formed_agree, gold.len()),
        support,
        span_counts,
        notes,
    })
}

impl<F: Float + fmt::Display> EvalReport<F> {
    /// Plain-text report with scores to six decimals.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "definitions: {}", self.definitions);
        let _ = writeln!(out, "supertype accuracy: {:.6}", self.supertype_accuracy);
        let _ = writeln!(out, "ill-formed agreement: {:.6}", self.ill_formed_agreement);
        let _ = writeln!(
            out,
            "overall exact-span: P={:.6} R={:.6} F1={:.6}",
            self.overall.precision, self.overall.recall, self.overall.f1
        );
        let _ = writeln!(out, "{:<22} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>7}", "role", "P", "R", "F1", "tok-P", "tok-R", "tok-F1", "support");
        for (role, prf) in &self.per_role {
            let tok = self.token_level.get(role).copied().unwrap_or(Prf {
                precision: F::zero(),
                recall: F::zero(),
                f1: F::zero(),
            });
            let _ = writeln!(
                out,
                "{:<22} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>7}",
                role.as_str(),
                prf.precision,
                prf.recall,
                prf.f1,
                tok.precision,
                tok.recall,
                tok.f1,
                self.support.get(role).copied().unwrap_or(0)
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}
