use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use subshift_core::{MorseSpec, SequenceSource, Substitution, Word};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Substitution,
    Morse,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
}

/// Level bounds for each analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Levels {
    pub recurrence: usize,
    pub disagree_len: usize,
    pub disagree_ceiling: usize,
    pub axioms: usize,
    pub tprime: usize,
    pub cofinal_word: String,
    pub bratteli: usize,
    pub phi: usize,
    pub naturality: usize,
    pub k0_from: usize,
    pub k0_to: usize,
    pub measure: usize,
    pub shift: usize,
    pub trace: usize,
    pub tolerance: f64,
}

impl Default for Levels {
    fn default() -> Self {
        Self {
            recurrence: 6,
            disagree_len: 8,
            disagree_ceiling: 3,
            axioms: 5,
            tprime: 5,
            cofinal_word: "0".into(),
            bratteli: 4,
            phi: 10,
            naturality: 8,
            k0_from: 4,
            k0_to: 10,
            measure: 8,
            shift: 6,
            trace: 3,
            tolerance: 1e-3,
        }
    }
}

/// Everything a run depends on. Identical configs give identical artifacts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub kind: SourceKind,
    /// Substitution rules, `"0:01,1:10"`.
    pub rules: String,
    /// Seed `b.a` of the two-sided fixed point.
    pub seed: String,
    pub power: usize,
    pub blocks: Vec<String>,
    pub cycle: bool,
    pub pattern: String,
    /// Half-width `N` of the window used for the language.
    pub window: usize,
    /// Half-width of the window used for empirical frequencies.
    pub scan: usize,
    /// Language depth `L`.
    pub depth: usize,
    pub levels: Levels,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            kind: SourceKind::Substitution,
            rules: "0:01,1:10".into(),
            seed: "1.0".into(),
            power: 2,
            blocks: vec!["01".into()],
            cycle: true,
            pattern: "01".into(),
            window: 4096,
            scan: 1 << 19,
            depth: 24,
            levels: Levels::default(),
            out_dir: PathBuf::from("out"),
            formats: vec![Format::Json, Format::Csv, Format::Dot],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.depth == 0 {
            return Err(CliError::Usage("depth must be positive".into()));
        }
        if 2 * self.window < 3 * self.depth {
            return Err(CliError::Usage(format!(
                "window half-width {} is too small for depth {}",
                self.window, self.depth
            )));
        }
        if self.levels.k0_from > self.levels.k0_to {
            return Err(CliError::Usage("k0_from must not exceed k0_to".into()));
        }
        Ok(())
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn source(&self) -> Result<SequenceSource, CliError> {
        let usage = |e: subshift_core::Error| CliError::Usage(e.to_string());
        Ok(match self.kind {
            SourceKind::Substitution => {
                let sigma = Substitution::parse(&self.rules).map_err(usage)?;
                let seed = self.seed.as_bytes();
                if seed.len() != 3 || seed[1] != b'.' {
                    return Err(CliError::Usage(format!("seed must look like b.a, got {:?}", self.seed)));
                }
                SequenceSource::SubstitutionFixedPoint { sigma, seed: (seed[0], seed[2]), power: self.power }
            }
            SourceKind::Morse => {
                let blocks = self.blocks.iter().map(|b| Word::from(b.as_str())).collect();
                SequenceSource::MorseProduct(MorseSpec::new(blocks, self.cycle).map_err(usage)?)
            }
            SourceKind::Periodic => SequenceSource::ExplicitPeriodic(Word::from(self.pattern.as_str())),
        })
    }

    /// Short description of the source for artifact headers.
    pub fn source_label(&self) -> String {
        match self.kind {
            SourceKind::Substitution => format!("substitution {} seed {} power {}", self.rules, self.seed, self.power),
            SourceKind::Morse => {
                format!("morse [{}]{}", self.blocks.join(","), if self.cycle { " cyclic" } else { "" })
            }
            SourceKind::Periodic => format!("periodic ({})", self.pattern),
        }
    }
}
