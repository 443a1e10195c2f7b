use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{
    AdaBoostParams, ClassifierSpec, DecisionTableParams, GbmParams, KnnParams, LogregParams, RandomForestParams,
    TreeParams,
};
use crate::preprocess::{check_leakage, Encoding, PreprocessConfig};
use crate::resample::{ResampleMode, ResamplePlan};

fn default_name() -> String {
    "custom".into()
}
fn default_selector_k() -> usize {
    4
}
fn default_hash_width() -> usize {
    8
}
fn default_split_ratio() -> f64 {
    0.75
}
fn default_cv_k() -> usize {
    10
}
fn default_true() -> bool {
    true
}
fn default_encoding() -> Encoding {
    Encoding::Hashed
}
fn default_resample() -> ResamplePlan {
    ResamplePlan::none()
}

/// Everything a run needs. Written back into the run directory as
/// `config.json`; running that file again reproduces the outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub data_path: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_selector_k")]
    pub selector_k: usize,
    #[serde(default = "default_hash_width")]
    pub hash_width: usize,
    #[serde(default = "default_resample")]
    pub resample: ResamplePlan,
    #[serde(default = "default_split_ratio")]
    pub split_ratio: f64,
    pub models: Vec<ClassifierSpec>,
    #[serde(default = "default_cv_k")]
    pub cv_k: usize,
    pub report_dir: PathBuf,
    #[serde(default = "default_encoding")]
    pub encoding: Encoding,
    #[serde(default = "default_true")]
    pub signed_hash: bool,
    /// Input columns to build features from; all non-target columns if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<Vec<String>>,
    /// Stratified subsample of the labelled rows taken before the split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_limit: Option<usize>,
    /// Score KNN on at most this many rows per evaluation set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knn_test_cap: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("cannot parse experiment config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::Config("models must be nonempty".into()));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(Error::Config(format!("split_ratio must be in (0, 1), got {}", self.split_ratio)));
        }
        if self.cv_k < 2 {
            return Err(Error::Config(format!("cv_k must be >= 2, got {}", self.cv_k)));
        }
        if self.selector_k == 0 {
            return Err(Error::Config("selector_k must be >= 1".into()));
        }
        if self.hash_width == 0 {
            return Err(Error::Config("hash_width must be >= 1".into()));
        }
        if self.row_limit == Some(0) || self.knn_test_cap == Some(0) {
            return Err(Error::Config("row_limit and knn_test_cap must be >= 1 when set".into()));
        }
        check_leakage(self.features.as_deref())?;
        self.resample.validate()?;
        for m in &self.models {
            m.validate()?;
        }
        let mut labels: Vec<String> = self.models.iter().map(ClassifierSpec::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("two models share the label {:?}", w[0])));
        }
        Ok(())
    }

    pub fn preprocess_config(&self) -> PreprocessConfig {
        PreprocessConfig {
            encoding: self.encoding,
            hash_width: self.hash_width,
            signed_hash: self.signed_hash,
            selector_k: self.selector_k,
            features: self.features.clone(),
            ..Default::default()
        }
    }
}

/// The three built-in arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Original class balance.
    Experiment1,
    /// Majority class randomly undersampled.
    Experiment2,
    /// Minority class oversampled with SMOTE.
    Experiment3,
}

impl Preset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "experiment1" => Ok(Preset::Experiment1),
            "experiment2" => Ok(Preset::Experiment2),
            "experiment3" => Ok(Preset::Experiment3),
            other => Err(Error::Config(format!(
                "unknown preset {other:?}; expected experiment1, experiment2 or experiment3"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Experiment1 => "experiment1",
            Preset::Experiment2 => "experiment2",
            Preset::Experiment3 => "experiment3",
        }
    }

    pub fn resample_mode(self) -> ResampleMode {
        match self {
            Preset::Experiment1 => ResampleMode::None,
            Preset::Experiment2 => ResampleMode::UndersampleRandom,
            Preset::Experiment3 => ResampleMode::Smote,
        }
    }

    pub fn config(self, data_path: PathBuf, seed: u64, report_dir: PathBuf) -> ExperimentConfig {
        ExperimentConfig {
            name: self.name().into(),
            data_path,
            seed,
            selector_k: default_selector_k(),
            hash_width: default_hash_width(),
            resample: ResamplePlan { mode: self.resample_mode(), k_neighbors: 5, seed },
            split_ratio: default_split_ratio(),
            models: default_roster(),
            cv_k: default_cv_k(),
            report_dir,
            encoding: Encoding::Hashed,
            signed_hash: true,
            features: None,
            row_limit: None,
            knn_test_cap: None,
        }
    }
}

/// The standard line-up: seven kinds, GBM at three learning rates.
pub fn default_roster() -> Vec<ClassifierSpec> {
    let mut v = vec![
        ClassifierSpec::Logreg(LogregParams::default()),
        ClassifierSpec::Tree(TreeParams::default()),
        ClassifierSpec::Knn(KnnParams { k: 25 }),
        ClassifierSpec::DecisionTable(DecisionTableParams::default()),
        ClassifierSpec::RandomForest(RandomForestParams::default()),
        ClassifierSpec::Adaboost(AdaBoostParams::default()),
    ];
    for lr in [0.05, 0.1, 0.25] {
        v.push(ClassifierSpec::Gbm(GbmParams { learning_rate: lr, ..Default::default() }));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preset() -> ExperimentConfig {
        Preset::Experiment2.config("w.csv".into(), 42, "out".into())
    }

    #[test]
    fn presets_validate_and_round_trip() {
        for p in [Preset::Experiment1, Preset::Experiment2, Preset::Experiment3] {
            let c = p.config("w.csv".into(), 1, "out".into());
            c.validate().unwrap();
            assert_eq!(ExperimentConfig::from_json(&c.to_json().unwrap()).unwrap(), c);
            assert_eq!(Preset::parse(p.name()).unwrap(), p);
        }
        assert_eq!(default_roster().len(), 9);
    }

    #[test]
    fn empty_models_rejected() {
        let c = ExperimentConfig { models: vec![], ..preset() };
        match c.validate() {
            Err(Error::Config(m)) => assert_eq!(m, "models must be nonempty"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_fields_rejected() {
        assert!(ExperimentConfig { split_ratio: 1.0, ..preset() }.validate().is_err());
        assert!(ExperimentConfig { cv_k: 1, ..preset() }.validate().is_err());
        let leaky = ExperimentConfig { features: Some(vec!["RISK_MM".into()]), ..preset() };
        assert!(matches!(leaky.validate(), Err(Error::Leakage(_))));
        let dup = ExperimentConfig {
            models: vec![ClassifierSpec::Logreg(LogregParams::default()); 2],
            ..preset()
        };
        assert!(dup.validate().is_err());
        assert!(Preset::parse("experiment4").is_err());
    }

    #[test]
    fn minimal_json_fills_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"data_path":"d.csv","report_dir":"r","models":[{"kind":"logreg"}],
                "resample":{"mode":"smote"}}"#,
        )
        .unwrap();
        assert_eq!((c.split_ratio, c.cv_k, c.selector_k, c.hash_width), (0.75, 10, 4, 8));
        assert_eq!(c.resample.k_neighbors, 5);
        assert!(ExperimentConfig::from_json(r#"{"data_path":"d","report_dir":"r","models":[],"bogus":1}"#).is_err());
    }
}
