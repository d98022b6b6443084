use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use super::FeatureName;
use crate::error::{Error, Result};
use crate::io::{read_to_string, write_atomic};

/// One of the three classifiers in the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    ArgId,
    Syn,
    Sem,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::ArgId, Stage::Syn, Stage::Sem];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::ArgId => "argid",
            Stage::Syn => "syn",
            Stage::Sem => "sem",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "argid" => Ok(Stage::ArgId),
            "syn" => Ok(Stage::Syn),
            "sem" => Ok(Stage::Sem),
            other => Err(format!("unknown stage `{other}` (expected argid, syn or sem)")),
        }
    }
}

/// Enabled features per stage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeatureSubset {
    pub argid: BTreeSet<FeatureName>,
    pub syn: BTreeSet<FeatureName>,
    pub sem: BTreeSet<FeatureName>,
}

const DEFAULT_SUBSETS: &str = include_str!("../../data/default_subsets.txt");

impl FeatureSubset {
    /// The subsets found by hill-climbing on the reference training data.
    pub fn paper_default() -> Self {
        Self::parse(DEFAULT_SUBSETS).expect("bundled subset file is valid")
    }

    pub fn uniform(features: BTreeSet<FeatureName>) -> Self {
        FeatureSubset {
            argid: features.clone(),
            syn: features.clone(),
            sem: features,
        }
    }

    pub fn get(&self, stage: Stage) -> &BTreeSet<FeatureName> {
        match stage {
            Stage::ArgId => &self.argid,
            Stage::Syn => &self.syn,
            Stage::Sem => &self.sem,
        }
    }

    pub fn get_mut(&mut self, stage: Stage) -> &mut BTreeSet<FeatureName> {
        match stage {
            Stage::ArgId => &mut self.argid,
            Stage::Syn => &mut self.syn,
            Stage::Sem => &mut self.sem,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut subset = FeatureSubset::default();
        let mut stage = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                stage = Some(name.parse::<Stage>().map_err(|e| Error::parse(i + 1, e))?);
                continue;
            }
            let stage = stage
                .ok_or_else(|| Error::parse(i + 1, "feature listed before any `[stage]` header"))?;
            let feature: FeatureName = line.parse()?;
            subset.get_mut(stage).insert(feature);
        }
        Ok(subset)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path, self.to_string().as_bytes())
    }
}

impl fmt::Display for FeatureSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, stage) in Stage::ALL.into_iter().enumerate() {
            if k > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "[{stage}]");
            for feature in self.get(stage) {
                let _ = writeln!(out, "{feature}");
            }
        }
        f.write_str(&out)
    }
}
