//! Declarative run configuration, read from TOML and overridden by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use rxnsplit_core::eval::{EvalMode, DEFAULT_BEAM_WIDTH, DEFAULT_KS};
use rxnsplit_core::shift::{FingerprintConfig, DEFAULT_BINS, DEFAULT_K};
use rxnsplit_core::splits::{
    AuthorDocumentParams, ClassCodeSet, RandomParams, ReactionTypeParams, ReactionTypePreset, Role, TimeParams,
};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Raw input for `clean`, cleaned corpus for everything else.
    pub corpus: Option<PathBuf>,
    pub output: PathBuf,
    pub seed: u64,
    /// Abort on the first malformed input line.
    pub strict: bool,
    /// Thread count; never part of any output.
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
    pub fingerprint: FingerprintConfig,
    pub split: SplitConfig,
    pub eval: EvalConfig,
    pub shift: ShiftConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            output: PathBuf::from("out"),
            seed: 0,
            strict: true,
            workers: None,
            fingerprint: FingerprintConfig::default(),
            split: SplitConfig::default(),
            eval: EvalConfig::default(),
            shift: ShiftConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub random: RandomParams,
    pub doc_author: AuthorDocumentParams,
    pub time: TimeParams,
    /// When non-empty, `split time` also writes a test set of these classes
    /// that avoids every cutoff's training and validation records.
    pub class_test: Vec<String>,
    pub reaction_type: ReactionTypeConfig,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            random: RandomParams::default(),
            doc_author: AuthorDocumentParams::default(),
            time: TimeParams::default(),
            class_test: default_class_test(),
            reaction_type: ReactionTypeConfig::default(),
        }
    }
}

/// Class codes of the held-out amination test set written next to the
/// time split.
pub fn default_class_test() -> Vec<String> {
    ["1.3.1", "1.3.2", "1.3.3", "1.3.4", "1.9.43"].map(String::from).to_vec()
}

/// A preset plus optional overrides of its class codes and sizes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReactionTypeConfig {
    pub preset: ReactionTypePreset,
    pub held_out: Option<Vec<String>>,
    pub train: Option<usize>,
    pub val: Option<usize>,
    pub id_test: Option<usize>,
    pub ood_train_inject: Option<usize>,
    pub ood_test_cap: Option<usize>,
}

impl ReactionTypeConfig {
    pub fn params(&self) -> Result<ReactionTypeParams> {
        let mut p = ReactionTypeParams::preset(self.preset);
        if let Some(codes) = &self.held_out {
            p.held_out = ClassCodeSet::parse(codes.iter().map(String::as_str))
                .map_err(|e| Error::Usage(format!("held_out: {e}")))?;
        }
        p.train = self.train.unwrap_or(p.train);
        p.val = self.val.unwrap_or(p.val);
        p.id_test = self.id_test.unwrap_or(p.id_test);
        p.ood_train_inject = self.ood_train_inject.unwrap_or(p.ood_train_inject);
        p.ood_test_cap = self.ood_test_cap.unwrap_or(p.ood_test_cap);
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub ks: Vec<usize>,
    pub modes: Vec<EvalMode>,
    pub beam_width: usize,
    pub role: Option<Role>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { ks: DEFAULT_KS.to_vec(), modes: vec![EvalMode::Exact], beam_width: DEFAULT_BEAM_WIDTH, role: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftConfig {
    pub k: usize,
    pub bins: usize,
    pub test_role: Option<Role>,
    pub train_roles: Vec<Role>,
}

impl Default for ShiftConfig {
    fn default() -> Self {
        ShiftConfig { k: DEFAULT_K, bins: DEFAULT_BINS, test_role: None, train_roles: vec![Role::Train] }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::io(path))?;
        toml::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn corpus_path(&self) -> Result<&Path> {
        self.corpus.as_deref().ok_or_else(|| Error::Usage("no corpus given (--corpus or `corpus` in the config)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rxnsplit_core::splits::TrainSize;

    #[test]
    fn partial_file_keeps_defaults() {
        let c = RunConfig::from_toml(
            r#"
            seed = 7
            [split.random]
            train = 100
            [split.time]
            cutoffs = [1996, 2020]
            train = { fixed = 50 }
            [eval]
            modes = ["exact", "stereo_agnostic"]
            "#,
        )
        .unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.split.random.train, 100);
        assert_eq!(c.split.random.val, RandomParams::default().val);
        assert_eq!(c.split.time.cutoffs, vec![1996, 2020]);
        assert_eq!(c.split.time.train, TrainSize::Fixed(50));
        assert_eq!(c.split.time.start_year, 1976);
        assert_eq!(c.eval.modes, vec![EvalMode::Exact, EvalMode::StereoAgnostic]);
        assert_eq!(c.fingerprint, FingerprintConfig::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("sead = 1").is_err());
        assert!(RunConfig::from_toml("[split.random]\ntrian = 1").is_err());
    }

    #[test]
    fn round_trip() {
        let mut c = RunConfig::default();
        c.split.reaction_type.preset = ReactionTypePreset::Heck;
        c.split.reaction_type.train = Some(10);
        c.corpus = Some("x.jsonl".into());
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn workers_not_serialized() {
        let c = RunConfig { workers: Some(3), ..RunConfig::default() };
        assert!(!c.to_toml().contains("workers"));
        assert!(!serde_json::to_string(&c).unwrap().contains("workers"));
    }
}
