//! Job descriptions, from flags or from a JSON job file.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    #[default]
    Moments,
    Verify,
    Expand,
    Eta,
    Mc,
    Selftest,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomCorpus {
    pub count: usize,
    pub degree: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default)]
    pub words: Vec<String>,
    #[serde(default)]
    pub random: Option<RandomCorpus>,
    #[serde(default)]
    pub order: Option<u32>,
    #[serde(default)]
    pub dims: Vec<usize>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_TOLERANCE: f64 = 4.0;

impl JobSpec {
    pub fn validate(&self) -> Result<(), String> {
        let has_corpus = !self.words.is_empty() || self.random.as_ref().is_some_and(|r| r.count > 0);
        match self.command {
            Command::Selftest => {
                if has_corpus || self.order.is_some() || !self.dims.is_empty() {
                    return Err("selftest takes no words, order or dimensions".into());
                }
            }
            _ if !has_corpus => return Err("no words given (use --word or --random)".into()),
            _ => {}
        }
        if let Some(r) = &self.random {
            if r.degree < 2 {
                return Err("random corpus degree must be at least 2".into());
            }
        }
        if self.order.is_some() && !matches!(self.command, Command::Verify | Command::Expand) {
            return Err("an order only applies to verify and expand".into());
        }
        if self.dims.contains(&0) {
            return Err("dimensions must be positive".into());
        }
        match self.command {
            Command::Mc => {
                if self.dims.is_empty() {
                    return Err("mc needs at least one dimension".into());
                }
                if self.samples == Some(0) || self.samples == Some(1) {
                    return Err("mc needs at least two samples".into());
                }
                if let Some(t) = self.tolerance {
                    if !(t.is_finite() && t > 0.0) {
                        return Err("tolerance must be a positive number".into());
                    }
                }
            }
            Command::Moments => {}
            _ if !self.dims.is_empty() => return Err("dimensions only apply to moments and mc".into()),
            _ => {}
        }
        if !matches!(self.command, Command::Mc) && (self.samples.is_some() || self.tolerance.is_some()) {
            return Err("samples and tolerance only apply to mc".into());
        }
        Ok(())
    }
}
