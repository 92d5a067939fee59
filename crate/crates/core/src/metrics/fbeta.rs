use crate::error::{Error, Result};
use crate::text::{Edit, EditSet};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// β weights recall against precision; β < 1 favours precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FBetaConfig {
    pub beta: f64,
}

impl FBetaConfig {
    /// Strong precision bias found to track human rankings best.
    pub const PRECISION_BIASED: FBetaConfig = FBetaConfig { beta: 0.18 };

    pub fn validate(&self) -> Result<()> {
        if self.beta.is_finite() && self.beta > 0.0 {
            Ok(())
        } else {
            Err(Error::Config(format!("beta must be positive, got {}", self.beta)))
        }
    }
}

impl Default for FBetaConfig {
    fn default() -> Self {
        FBetaConfig { beta: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FBetaScore {
    pub precision: f64,
    pub recall: f64,
    pub f_beta: f64,
}

/// Matched, proposed and gold edit counts; shards add up exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EditCounts {
    pub matched: u64,
    pub proposed: u64,
    pub gold: u64,
}

impl EditCounts {
    pub fn add(&mut self, other: EditCounts) {
        self.matched += other.matched;
        self.proposed += other.proposed;
        self.gold += other.gold;
    }

    /// Empty hypothesis gives precision 1; empty gold gives recall 1.
    pub fn score(&self, cfg: &FBetaConfig) -> FBetaScore {
        let precision = if self.proposed == 0 {
            1.0
        } else {
            self.matched as f64 / self.proposed as f64
        };
        let recall = if self.gold == 0 {
            1.0
        } else {
            self.matched as f64 / self.gold as f64
        };
        FBetaScore {
            precision,
            recall,
            f_beta: f_beta(precision, recall, cfg.beta),
        }
    }
}

pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if precision + recall == 0.0 || denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    }
}

/// Counts exact span-and-replacement matches between two edit sets.
pub fn edit_counts(gold: &EditSet, hyp: &EditSet) -> Result<EditCounts> {
    if gold.source_len() != hyp.source_len() {
        return Err(Error::Input(format!(
            "edit sets were extracted from sources of different lengths ({} vs {})",
            gold.source_len(),
            hyp.source_len()
        )));
    }
    let gold_set: HashSet<&Edit> = gold.edits().iter().collect();
    let hyp_set: HashSet<&Edit> = hyp.edits().iter().collect();
    Ok(EditCounts {
        matched: hyp_set.intersection(&gold_set).count() as u64,
        proposed: hyp_set.len() as u64,
        gold: gold_set.len() as u64,
    })
}

pub fn fbeta_edits(gold: &EditSet, hyp: &EditSet, cfg: &FBetaConfig) -> Result<FBetaScore> {
    cfg.validate()?;
    Ok(edit_counts(gold, hyp)?.score(cfg))
}

/// Pools counts over sentences before dividing.
pub fn fbeta_corpus(pairs: &[(EditSet, EditSet)], cfg: &FBetaConfig) -> Result<FBetaScore> {
    cfg.validate()?;
    let mut total = EditCounts::default();
    for (gold, hyp) in pairs {
        total.add(edit_counts(gold, hyp)?);
    }
    Ok(total.score(cfg))
}
