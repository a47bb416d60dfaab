//! TOML pipeline configuration.
//!
//! ```toml
//! output_dir = "out"
//! seed = 7
//! aggregate = ["model", "dataset", "setting", "target_lang", "granularity"]
//! wpr_mode = "paper-compat"
//!
//! [[inputs]]
//! path = "corpus.jsonl"
//! format = "generic-jsonl"
//!
//! [[detectors]]
//! name = "bundled"
//!
//! [entropy]
//! log_base = "natural"
//! zero_convention = "support"
//!
//! [[graphs]]
//! name = "features"
//! path = "features.tsv"
//! kind = "multivalued"
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use langconf_core::lid::seed::bundled_detector;
use langconf_core::lid::{read_profiles, ClassifyOptions, Detector, DetectorChain, NgramDetector};
use langconf_core::metrics::{
    AggregateField, AggregateKey, EntropyOptions, PValueMethod, PassReference, WprMode,
};
use langconf_core::typology::{GraphKind, Kernel};
use langconf_core::Execution;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::ingest::InputFormat;

/// Default directory for trained profiles when a detector names none.
pub const PROFILE_DIR_ENV: &str = "LANGCONF_PROFILE_DIR";
/// File name of a profile set inside a profile directory.
pub const PROFILE_FILE: &str = "profiles.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub path: PathBuf,
    pub format: InputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    /// `bundled` for the built-in profiles, `ngram` for trained ones.
    pub name: String,
    /// Profile directory or file; `ngram` falls back to the environment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profiles: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub name: String,
    pub path: PathBuf,
    pub kind: GraphKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Kernel>,
    /// Source id to ISO 639-3 mapping TSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mapping: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationMethod {
    #[default]
    TDistribution,
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationSpec {
    #[serde(default)]
    pub method: CorrelationMethod,
    #[serde(default = "default_permutations")]
    pub permutations: usize,
}

fn default_permutations() -> usize {
    10_000
}

impl Default for CorrelationSpec {
    fn default() -> Self {
        Self {
            method: CorrelationMethod::default(),
            permutations: default_permutations(),
        }
    }
}

fn default_detectors() -> Vec<DetectorSpec> {
    vec![DetectorSpec {
        name: "bundled".into(),
        profiles: None,
    }]
}

fn default_aggregate() -> AggregateKey {
    AggregateKey::new([
        AggregateField::Model,
        AggregateField::Dataset,
        AggregateField::Setting,
        AggregateField::TargetLang,
        AggregateField::Granularity,
    ])
    .expect("non-empty")
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub parallel: bool,
    #[serde(default = "default_aggregate")]
    pub aggregate: AggregateKey,
    #[serde(default)]
    pub wpr_mode: WprMode,
    #[serde(default)]
    pub pass_reference: PassReference,
    pub inputs: Vec<InputSpec>,
    #[serde(default = "default_detectors")]
    pub detectors: Vec<DetectorSpec>,
    #[serde(default)]
    pub classify: ClassifyOptions,
    #[serde(default)]
    pub entropy: EntropyOptions,
    #[serde(default)]
    pub correlation: CorrelationSpec,
    #[serde(default)]
    pub graphs: Vec<GraphSpec>,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads a config file and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        if let Some(base) = path.parent() {
            config.resolve_paths(base);
        }
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        self.inputs.iter_mut().for_each(|i| fix(&mut i.path));
        for d in &mut self.detectors {
            if let Some(p) = d.profiles.as_mut() {
                fix(p);
            }
        }
        for g in &mut self.graphs {
            fix(&mut g.path);
            if let Some(m) = g.mapping.as_mut() {
                fix(m);
            }
        }
    }

    pub fn execution(&self) -> Execution {
        if self.parallel {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }

    pub fn p_value_method(&self) -> PValueMethod {
        match self.correlation.method {
            CorrelationMethod::TDistribution => PValueMethod::TDistribution,
            CorrelationMethod::Exact => PValueMethod::Exact,
            CorrelationMethod::MonteCarlo => PValueMethod::MonteCarlo {
                samples: self.correlation.permutations,
                seed: self.seed,
            },
        }
    }

    /// Checks every referenced path and setting before any work starts.
    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(CliError::Validation("config lists no inputs".into()));
        }
        for input in &self.inputs {
            if !input.path.is_file() {
                return Err(CliError::FileNotFound(input.path.clone()));
            }
        }
        if self.detectors.is_empty() {
            return Err(CliError::Validation("config lists no detectors".into()));
        }
        for d in &self.detectors {
            detector_profile_path(d)?;
        }
        for g in &self.graphs {
            if !g.path.is_file() {
                return Err(CliError::FileNotFound(g.path.clone()));
            }
            if let Some(m) = &g.mapping {
                if !m.is_file() {
                    return Err(CliError::FileNotFound(m.clone()));
                }
            }
            if let Some(k) = g.kernel {
                if !k.applies_to(g.kind) {
                    return Err(CliError::Validation(format!(
                        "graph {}: kernel {k} does not apply to {} graphs",
                        g.name, g.kind
                    )));
                }
            }
        }
        let mut names: Vec<_> = self.graphs.iter().map(|g| g.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Validation("graph names must be unique".into()));
        }
        if !(self.classify.margin >= 0.0 && (0.0..=1.0).contains(&self.classify.min_coverage)) {
            return Err(CliError::Validation(
                "classify margin must be >= 0 and min_coverage in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Profile file for an `ngram` detector, or `None` for `bundled`.
fn detector_profile_path(spec: &DetectorSpec) -> Result<Option<PathBuf>> {
    match spec.name.as_str() {
        "bundled" => Ok(None),
        "ngram" => {
            let path = spec
                .profiles
                .clone()
                .or_else(|| std::env::var_os(PROFILE_DIR_ENV).map(PathBuf::from))
                .ok_or_else(|| {
                    CliError::Validation(format!(
                        "ngram detector needs a profiles path or {PROFILE_DIR_ENV}"
                    ))
                })?;
            let file = if path.is_dir() {
                path.join(PROFILE_FILE)
            } else {
                path
            };
            if !file.is_file() {
                return Err(CliError::Validation(format!(
                    "profile file {} not found",
                    file.display()
                )));
            }
            Ok(Some(file))
        }
        other => Err(CliError::Validation(format!(
            "unknown detector {other:?} (bundled, ngram)"
        ))),
    }
}

pub fn load_detector(spec: &DetectorSpec, options: ClassifyOptions) -> Result<Arc<dyn Detector>> {
    match detector_profile_path(spec)? {
        None => Ok(Arc::new(bundled_detector(options))),
        Some(file) => {
            let reader = std::fs::File::open(&file).map_err(|e| CliError::io(&file, e))?;
            let profiles =
                read_profiles(std::io::BufReader::new(reader)).map_err(CliError::data)?;
            let name = format!("ngram:{}", file.display());
            Ok(Arc::new(
                NgramDetector::new(name, &profiles, options).map_err(CliError::data)?,
            ))
        }
    }
}

pub fn build_chain(specs: &[DetectorSpec], options: ClassifyOptions) -> Result<DetectorChain> {
    let detectors = specs
        .iter()
        .map(|s| load_detector(s, options))
        .collect::<Result<Vec<_>>>()?;
    DetectorChain::new(detectors).map_err(|e| CliError::Validation(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
output_dir = "out"
seed = 7

[[inputs]]
path = "corpus.jsonl"
format = "generic-jsonl"

[[graphs]]
name = "emb"
path = "emb.tsv"
kind = "embedding"
kernel = "angular-cosine"
"#;

    #[test]
    fn defaults_and_round_trip() {
        let c = PipelineConfig::from_toml(EXAMPLE).unwrap();
        assert_eq!(c.detectors, default_detectors());
        assert_eq!(c.aggregate, default_aggregate());
        assert_eq!(c.wpr_mode, WprMode::PaperCompat);
        assert_eq!(c.graphs[0].kernel, Some(Kernel::AngularCosine));
        let back = PipelineConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err =
            PipelineConfig::from_toml("output_dir = \"o\"\ninputs = []\nbogus = 1\n").unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_VALIDATION);
    }

    #[test]
    fn relative_paths_resolve_against_config_dir() {
        let mut c = PipelineConfig::from_toml(EXAMPLE).unwrap();
        c.resolve_paths(Path::new("/data/run"));
        assert_eq!(c.inputs[0].path, Path::new("/data/run/corpus.jsonl"));
        assert_eq!(c.output_dir, Path::new("/data/run/out"));
    }

    #[test]
    fn missing_profile_dir_fails_validation() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("c.jsonl");
        std::fs::write(&input, "").unwrap();
        let mut c = PipelineConfig::from_toml(EXAMPLE).unwrap();
        c.graphs.clear();
        c.inputs[0].path = input;
        c.detectors = vec![DetectorSpec {
            name: "ngram".into(),
            profiles: Some(dir.path().join("missing")),
        }];
        let err = c.validate().unwrap_err();
        assert!(matches!(err, CliError::Validation(_)), "{err}");
    }

    #[test]
    fn mismatched_kernel_fails_validation() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("c.jsonl");
        let graph = dir.path().join("g.tsv");
        std::fs::write(&input, "").unwrap();
        std::fs::write(&graph, "").unwrap();
        let mut c = PipelineConfig::from_toml(EXAMPLE).unwrap();
        c.inputs[0].path = input;
        c.graphs[0].path = graph;
        c.graphs[0].kernel = Some(Kernel::Jaccard);
        assert!(matches!(c.validate(), Err(CliError::Validation(_))));
    }
}
