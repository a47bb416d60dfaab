//! End-to-end run: ingest, detect, score, aggregate, compare, record.
//!
//! Every artifact is computed in memory first and only then written, each
//! through an atomic rename, with `manifest.json` last. A failed run leaves
//! no partial output behind.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use langconf_core::divergence::{align_matrices, kl_matrix_divergence, EPSILON};
use langconf_core::lid::{build_all_distributions, DetectorChain, RecordDistributions};
use langconf_core::metrics::{
    aggregate_entropy, build_confusion_matrix, confusion_entropy, is_line_error, line_pass_rate,
    spearman_with, word_pass_rate, AggregateField, EntropyOptions, EntropyResult, MetricsError,
    PValueMethod, PassRateInput, PassReference, WprMode, CLAMP_EPSILON,
};
use langconf_core::model::ModelError;
use langconf_core::typology::{
    build_similarity_matrix, load_code_mapping, load_embedding_table, load_feature_table,
    GraphKind, Kernel, LanguageGraph,
};
use langconf_core::{
    Execution, GenerationRecord, Granularity, LabeledMatrix, LanguageDistribution, Setting,
};
use serde::Serialize;

use crate::config::{build_chain, GraphSpec, InputSpec, PipelineConfig};
use crate::error::{CliError, Result};
use crate::ingest::ingest;
use crate::output::{csv_bytes, num, opt_num, sha256_hex, write_atomic};

/// One record with its distributions and per-granularity entropy.
///
/// Entropy is `None` when the granularity has no units or none of them was
/// identified.
#[derive(Debug, Clone)]
pub struct Scored {
    pub record: GenerationRecord,
    pub distributions: RecordDistributions,
    pub line: Option<EntropyResult>,
    pub word: Option<EntropyResult>,
}

impl Scored {
    pub fn entropy(&self, granularity: Granularity) -> Option<&EntropyResult> {
        match granularity {
            Granularity::Line => self.line.as_ref(),
            Granularity::Word => self.word.as_ref(),
        }
    }

    fn has_text(&self) -> bool {
        self.distributions.line.unit_count() > 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Exclusions {
    pub empty_response: usize,
    pub unidentified_line: usize,
    pub unidentified_word: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputReport {
    pub path: PathBuf,
    pub format: String,
    pub sha256: String,
    pub records: usize,
    pub malformed: usize,
}

/// Reads every input. Ids must be unique across inputs.
pub fn load_inputs(inputs: &[InputSpec]) -> Result<(Vec<GenerationRecord>, Vec<InputReport>)> {
    let mut records = Vec::new();
    let mut reports = Vec::new();
    let mut ids = BTreeSet::new();
    for spec in inputs {
        let bytes = std::fs::read(&spec.path).map_err(|e| CliError::io(&spec.path, e))?;
        let ingested = ingest(&spec.path, spec.format)?;
        for m in &ingested.malformed {
            log::warn!("{}:{}: skipped: {}", spec.path.display(), m.line, m.message);
        }
        for r in &ingested.records {
            if !ids.insert(r.id.clone()) {
                return Err(CliError::Data(format!(
                    "record id {:?} appears in more than one input",
                    r.id
                )));
            }
        }
        reports.push(InputReport {
            path: spec.path.clone(),
            format: spec.format.to_string(),
            sha256: sha256_hex(&bytes),
            records: ingested.records.len(),
            malformed: ingested.malformed.len(),
        });
        records.extend(ingested.records);
    }
    if records.is_empty() {
        return Err(CliError::Data("inputs contain no valid records".into()));
    }
    Ok((records, reports))
}

fn entropy_of(
    record: &GenerationRecord,
    d: &LanguageDistribution,
    options: EntropyOptions,
) -> Result<Option<EntropyResult>> {
    if d.unit_count() == 0 {
        return Ok(None);
    }
    match d.normalize() {
        Ok(n) => confusion_entropy(&n, &record.expectation(), options)
            .map(Some)
            .map_err(|e| CliError::Internal(format!("{}: {e}", record.id))),
        Err(ModelError::AllUnidentified) => Ok(None),
        Err(e) => Err(CliError::Internal(format!("{}: {e}", record.id))),
    }
}

/// Detects languages in every record and scores both granularities.
pub fn score(
    records: Vec<GenerationRecord>,
    chain: &DetectorChain,
    options: EntropyOptions,
    execution: Execution,
) -> Result<(Vec<Scored>, Exclusions)> {
    let distributions = build_all_distributions(&records, chain, execution);
    let pairs: Vec<_> = records.into_iter().zip(distributions).collect();
    let scored = execution
        .map(&pairs, |(record, d)| -> Result<Scored> {
            Ok(Scored {
                line: entropy_of(record, &d.line, options)?,
                word: entropy_of(record, &d.word, options)?,
                record: record.clone(),
                distributions: d.clone(),
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut ex = Exclusions::default();
    for s in &scored {
        if !s.has_text() {
            ex.empty_response += 1;
            continue;
        }
        if s.line.is_none() {
            ex.unidentified_line += 1;
        }
        if s.word.is_none() && s.distributions.word.unit_count() > 0 {
            ex.unidentified_word += 1;
        }
    }
    if ex != Exclusions::default() {
        log::warn!("excluded from entropy: {ex:?}");
    }
    Ok((scored, ex))
}

const GRANULARITIES: [Granularity; 2] = [Granularity::Line, Granularity::Word];

fn units(s: &Scored, g: Granularity) -> usize {
    match g {
        Granularity::Line => s.distributions.line.unit_count(),
        Granularity::Word => s.distributions.word.unit_count(),
    }
}

fn entropy_pairs(scored: &[Scored]) -> Vec<(&GenerationRecord, &EntropyResult)> {
    GRANULARITIES
        .iter()
        .flat_map(|&g| {
            scored
                .iter()
                .filter_map(move |s| s.entropy(g).map(|e| (&s.record, e)))
        })
        .collect()
}

pub fn distributions_jsonl(scored: &[Scored]) -> Vec<u8> {
    #[derive(Serialize)]
    struct Row<'a> {
        id: &'a str,
        line: &'a LanguageDistribution,
        word: &'a LanguageDistribution,
    }
    let mut out = Vec::new();
    for s in scored {
        let row = Row {
            id: &s.record.id,
            line: &s.distributions.line,
            word: &s.distributions.word,
        };
        serde_json::to_writer(&mut out, &row).expect("distribution serializes");
        out.push(b'\n');
    }
    out
}

pub fn entropy_records_csv(scored: &[Scored]) -> Result<Vec<u8>> {
    let header = [
        "id",
        "model",
        "dataset",
        "setting",
        "task",
        "target_lang",
        "eval_step",
        "granularity",
        "entropy",
        "units",
        "unidentified_mass",
        "missing_expected",
    ];
    let rows = GRANULARITIES.iter().flat_map(|&g| {
        scored.iter().filter_map(move |s| {
            let e = s.entropy(g)?;
            let r = &s.record;
            Some(vec![
                r.id.clone(),
                r.model.clone(),
                r.dataset.clone(),
                r.setting.to_string(),
                r.task.to_string(),
                r.target_lang.to_string(),
                r.eval_step.clone().unwrap_or_else(|| "-".into()),
                g.to_string(),
                num(e.value),
                units(s, g).to_string(),
                num(e.unidentified_mass),
                e.support_missing_expected
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            ])
        })
    });
    csv_bytes(&header, rows)
}

pub fn entropy_summary_csv(
    scored: &[Scored],
    key: &langconf_core::metrics::AggregateKey,
) -> Result<Vec<u8>> {
    let pairs = entropy_pairs(scored);
    let mut header: Vec<&str> = key.fields().iter().map(|f| f.name()).collect();
    header.extend(["mean", "stddev", "count"]);
    let rows = if pairs.is_empty() {
        Vec::new()
    } else {
        aggregate_entropy(&pairs, key).map_err(|e| CliError::Internal(e.to_string()))?
    };
    csv_bytes(
        &header,
        rows.into_iter().map(|r| {
            let mut cells = r.key;
            cells.extend([num(r.mean), num(r.stddev), r.count.to_string()]);
            cells
        }),
    )
}

fn field_value(field: AggregateField, r: &GenerationRecord) -> String {
    match field {
        AggregateField::Model => r.model.clone(),
        AggregateField::Dataset => r.dataset.clone(),
        AggregateField::Setting => r.setting.to_string(),
        AggregateField::TargetLang => r.target_lang.to_string(),
        AggregateField::EvalStep => r.eval_step.clone().unwrap_or_else(|| "-".into()),
        AggregateField::Granularity => unreachable!("granularity is not a record field"),
    }
}

/// Record-level grouping fields: the aggregation key without granularity.
pub fn group_fields(key: &langconf_core::metrics::AggregateKey) -> Vec<AggregateField> {
    let fields: Vec<_> = key
        .fields()
        .iter()
        .copied()
        .filter(|f| *f != AggregateField::Granularity)
        .collect();
    if fields.is_empty() {
        vec![
            AggregateField::Model,
            AggregateField::Dataset,
            AggregateField::Setting,
            AggregateField::TargetLang,
        ]
    } else {
        fields
    }
}

/// Per-group entropy means and pass rates; the unit of correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMetrics {
    pub key: Vec<String>,
    /// Records with a non-empty response.
    pub n: usize,
    pub line_passers: usize,
    pub lpr: f64,
    /// `None` when no record passes the line level.
    pub wpr: Option<f64>,
    pub hc_line: Option<f64>,
    pub hc_word: Option<f64>,
}

impl GroupMetrics {
    pub fn metric(&self, name: &str) -> Option<f64> {
        match name {
            "hc_line" => self.hc_line,
            "hc_word" => self.hc_word,
            "lpr" => Some(self.lpr),
            "wpr" => self.wpr,
            _ => None,
        }
    }
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

pub fn group_metrics(
    scored: &[Scored],
    fields: &[AggregateField],
    mode: WprMode,
    reference: PassReference,
) -> Result<Vec<GroupMetrics>> {
    let mut groups: BTreeMap<Vec<String>, Vec<&Scored>> = BTreeMap::new();
    for s in scored.iter().filter(|s| s.has_text()) {
        let key = fields.iter().map(|f| field_value(*f, &s.record)).collect();
        groups.entry(key).or_default().push(s);
    }
    groups
        .into_iter()
        .map(|(key, members)| {
            let lines: Vec<_> = members
                .iter()
                .map(|s| (&s.record, &s.distributions.line))
                .collect();
            let lpr =
                line_pass_rate(&lines, reference).map_err(|e| CliError::Internal(e.to_string()))?;
            let inputs: Vec<_> = members
                .iter()
                .map(|s| PassRateInput {
                    record: &s.record,
                    line: &s.distributions.line,
                    word: &s.distributions.word,
                })
                .collect();
            let wpr = match word_pass_rate(&inputs, mode, reference) {
                Ok(v) => Some(v),
                Err(MetricsError::NoLinePassers) => None,
                Err(e) => return Err(CliError::Internal(e.to_string())),
            };
            let line_passers = members
                .iter()
                .filter(|s| !is_line_error(&s.record, &s.distributions.line, reference))
                .count();
            let h = |g| {
                mean(
                    &members
                        .iter()
                        .filter_map(|s| s.entropy(g).map(|e| e.value))
                        .collect::<Vec<_>>(),
                )
            };
            Ok(GroupMetrics {
                n: members.len(),
                line_passers,
                lpr,
                wpr,
                hc_line: h(Granularity::Line),
                hc_word: h(Granularity::Word),
                key,
            })
        })
        .collect()
}

pub fn passrates_csv(groups: &[GroupMetrics], fields: &[AggregateField]) -> Result<Vec<u8>> {
    let mut header: Vec<&str> = fields.iter().map(|f| f.name()).collect();
    header.extend(["n", "line_passers", "lpr", "wpr"]);
    csv_bytes(
        &header,
        groups.iter().map(|g| {
            let mut cells = g.key.clone();
            cells.extend([
                g.n.to_string(),
                g.line_passers.to_string(),
                num(g.lpr),
                opt_num(g.wpr),
            ]);
            cells
        }),
    )
}

pub fn group_metrics_csv(groups: &[GroupMetrics], fields: &[AggregateField]) -> Result<Vec<u8>> {
    let mut header: Vec<&str> = fields.iter().map(|f| f.name()).collect();
    header.extend(["n", "hc_line", "hc_word", "lpr", "wpr"]);
    csv_bytes(
        &header,
        groups.iter().map(|g| {
            let mut cells = g.key.clone();
            cells.extend([
                g.n.to_string(),
                opt_num(g.hc_line),
                opt_num(g.hc_word),
                num(g.lpr),
                opt_num(g.wpr),
            ]);
            cells
        }),
    )
}

/// Metric pairs correlated across groups.
pub const CORRELATION_PAIRS: [(&str, &str); 6] = [
    ("hc_line", "hc_word"),
    ("hc_line", "lpr"),
    ("hc_word", "lpr"),
    ("hc_line", "wpr"),
    ("hc_word", "wpr"),
    ("lpr", "wpr"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub scope: &'static str,
    pub x: &'static str,
    pub y: &'static str,
    pub n: usize,
    pub rho: Option<f64>,
    pub p_value: Option<f64>,
    pub note: String,
}

fn in_scope(scope: &str, s: &Scored) -> bool {
    match scope {
        "monolingual" => s.record.setting == Setting::Monolingual,
        "crosslingual" => s.record.setting == Setting::Crosslingual,
        _ => true,
    }
}

/// Spearman correlation of every metric pair over groups, for all records
/// and for each setting separately.
pub fn correlations(
    scored: &[Scored],
    fields: &[AggregateField],
    mode: WprMode,
    reference: PassReference,
    method: PValueMethod,
) -> Result<Vec<CorrelationRow>> {
    let mut rows = Vec::new();
    for scope in ["all", "monolingual", "crosslingual"] {
        let subset: Vec<Scored> = scored
            .iter()
            .filter(|s| in_scope(scope, s))
            .cloned()
            .collect();
        let groups = group_metrics(&subset, fields, mode, reference)?;
        for (x, y) in CORRELATION_PAIRS {
            let (xs, ys): (Vec<f64>, Vec<f64>) = groups
                .iter()
                .filter_map(|g| Some((g.metric(x)?, g.metric(y)?)))
                .unzip();
            let row = match spearman_with(&xs, &ys, method) {
                Ok(c) => CorrelationRow {
                    scope,
                    x,
                    y,
                    n: c.n,
                    rho: Some(c.rho),
                    p_value: Some(c.p_value),
                    note: String::new(),
                },
                Err(e) => CorrelationRow {
                    scope,
                    x,
                    y,
                    n: xs.len(),
                    rho: None,
                    p_value: None,
                    note: e.to_string(),
                },
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn correlations_csv(rows: &[CorrelationRow], method: PValueMethod) -> Result<Vec<u8>> {
    let method = method.to_string();
    csv_bytes(
        &[
            "scope", "x", "y", "n", "rho", "p_value", "stars", "method", "note",
        ],
        rows.iter().map(|r| {
            vec![
                r.scope.to_string(),
                r.x.to_string(),
                r.y.to_string(),
                r.n.to_string(),
                opt_num(r.rho),
                opt_num(r.p_value),
                r.p_value
                    .map(langconf_core::metrics::stars)
                    .unwrap_or_default()
                    .to_string(),
                method.clone(),
                r.note.clone(),
            ]
        }),
    )
}

/// Confusion matrix per dataset and granularity.
pub fn confusion_matrices(
    scored: &[Scored],
) -> Result<BTreeMap<(String, Granularity), LabeledMatrix>> {
    let mut by_key: BTreeMap<(String, Granularity), Vec<(&GenerationRecord, &EntropyResult)>> =
        BTreeMap::new();
    for s in scored {
        for g in GRANULARITIES {
            if let Some(e) = s.entropy(g) {
                by_key
                    .entry((s.record.dataset.clone(), g))
                    .or_default()
                    .push((&s.record, e));
            }
        }
    }
    by_key
        .into_iter()
        .map(|(k, pairs)| {
            let m =
                build_confusion_matrix(&pairs).map_err(|e| CliError::Internal(e.to_string()))?;
            Ok((k, m))
        })
        .collect()
}

pub fn load_graph(spec: &GraphSpec) -> Result<LanguageGraph> {
    let mapping = spec
        .mapping
        .as_deref()
        .map(load_code_mapping)
        .transpose()
        .map_err(CliError::data)?;
    let graph = match spec.kind {
        GraphKind::Embedding => load_embedding_table(&spec.path, mapping.as_ref()),
        kind => load_feature_table(&spec.path, kind, mapping.as_ref()),
    }
    .map_err(|e| CliError::Data(format!("graph {}: {e}", spec.name)))?;
    match spec.kernel {
        Some(k) => graph
            .with_kernel(k)
            .map_err(|e| CliError::Validation(format!("graph {}: {e}", spec.name))),
        None => Ok(graph),
    }
}

/// Keeps file names portable.
pub fn slug(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct KlSummaryRow {
    pub graph: String,
    pub dataset: String,
    pub granularity: Granularity,
    pub mean_kl: Option<f64>,
    pub columns: usize,
    pub skipped_columns: usize,
    pub dropped_labels: usize,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub records: usize,
    pub excluded: Exclusions,
    /// File name to SHA-256 of its contents.
    pub artifacts: BTreeMap<String, String>,
}

/// Hash of the configuration with the output directory blanked, so the same
/// analysis written to two places hashes the same.
pub fn config_hash(config: &PipelineConfig) -> String {
    let mut c = config.clone();
    c.output_dir = PathBuf::new();
    sha256_hex(c.to_toml().as_bytes())
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<RunSummary> {
    config.validate()?;
    let execution = config.execution();
    let method = config.p_value_method();
    let chain = build_chain(&config.detectors, config.classify)?;
    let graphs = config
        .graphs
        .iter()
        .map(load_graph)
        .collect::<Result<Vec<_>>>()?;
    let (records, inputs) = load_inputs(&config.inputs)?;
    let n_records = records.len();
    log::info!("{n_records} records from {} inputs", inputs.len());

    let (scored, excluded) = score(records, &chain, config.entropy, execution)?;
    let fields = group_fields(&config.aggregate);
    let groups = group_metrics(&scored, &fields, config.wpr_mode, config.pass_reference)?;
    let corr = correlations(
        &scored,
        &fields,
        config.wpr_mode,
        config.pass_reference,
        method,
    )?;

    let mut files: BTreeMap<String, Vec<u8>> = BTreeMap::new();
    files.insert("distributions.jsonl".into(), distributions_jsonl(&scored));
    files.insert("entropy_records.csv".into(), entropy_records_csv(&scored)?);
    files.insert(
        "entropy_summary.csv".into(),
        entropy_summary_csv(&scored, &config.aggregate)?,
    );
    files.insert("passrates.csv".into(), passrates_csv(&groups, &fields)?);
    files.insert(
        "group_metrics.csv".into(),
        group_metrics_csv(&groups, &fields)?,
    );
    files.insert("correlations.csv".into(), correlations_csv(&corr, method)?);

    let confusion = confusion_matrices(&scored)?;
    for ((dataset, g), m) in &confusion {
        files.insert(
            format!("confusion_{}_{g}.csv", slug(dataset)),
            m.to_csv().into_bytes(),
        );
    }

    let langs: Vec<_> = confusion
        .values()
        .flat_map(|m| m.row_labels().iter().chain(m.col_labels()))
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut kl_rows = Vec::new();
    let mut notes = Vec::new();
    for (spec, graph) in config.graphs.iter().zip(&graphs) {
        let sim = match build_similarity_matrix(graph, &langs, &langs, execution) {
            Ok(s) => s,
            Err(e) => {
                log::warn!("graph {}: {e}", spec.name);
                notes.push(format!("graph {}: {e}", spec.name));
                continue;
            }
        };
        let name = slug(&spec.name);
        files.insert(
            format!("similarity_{name}.csv"),
            sim.matrix.to_csv().into_bytes(),
        );
        if graph.kernel() == Kernel::Cosine {
            files.insert(
                format!("similarity_{name}_raw.csv"),
                sim.raw.to_csv().into_bytes(),
            );
        }
        for ((dataset, g), m) in &confusion {
            let mut row = KlSummaryRow {
                graph: spec.name.clone(),
                dataset: dataset.clone(),
                granularity: *g,
                mean_kl: None,
                columns: 0,
                skipped_columns: 0,
                dropped_labels: 0,
                note: String::new(),
            };
            let result = align_matrices(m, &sim.matrix).and_then(|a| {
                let c = &a.coverage;
                row.dropped_labels = c.m1_dropped_rows.len() + c.m1_dropped_cols.len();
                kl_matrix_divergence(&a.m1, &a.m2, execution)
            });
            match result {
                Ok(report) => {
                    row.mean_kl = Some(report.mean_kl);
                    row.columns = report.per_column.len();
                    row.skipped_columns = report.skipped_columns.len();
                    files.insert(
                        format!("kl_{name}_{}_{g}.json", slug(dataset)),
                        report.to_json().into_bytes(),
                    );
                }
                Err(e) => row.note = e.to_string(),
            }
            kl_rows.push(row);
        }
    }
    if !config.graphs.is_empty() {
        files.insert(
            "kl_summary.csv".into(),
            csv_bytes(
                &[
                    "graph",
                    "dataset",
                    "granularity",
                    "mean_kl",
                    "columns",
                    "skipped_columns",
                    "dropped_labels",
                    "note",
                ],
                kl_rows.iter().map(|r| {
                    vec![
                        r.graph.clone(),
                        r.dataset.clone(),
                        r.granularity.to_string(),
                        opt_num(r.mean_kl),
                        r.columns.to_string(),
                        r.skipped_columns.to_string(),
                        r.dropped_labels.to_string(),
                        r.note.clone(),
                    ]
                }),
            )?,
        );
    }

    let artifacts: BTreeMap<String, String> = files
        .iter()
        .map(|(k, v)| (k.clone(), sha256_hex(v)))
        .collect();
    let manifest = serde_json::json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config_sha256": config_hash(config),
        "inputs": inputs,
        "records": n_records,
        "excluded": excluded,
        "conventions": {
            "log_base": config.entropy.log_base.to_string(),
            "zero_convention": config.entropy.zero_convention.to_string(),
            "clamp_epsilon": CLAMP_EPSILON,
            "wpr_mode": config.wpr_mode.to_string(),
            "pass_reference": config.pass_reference.to_string(),
            "group_fields": fields.iter().map(|f| f.name()).collect::<Vec<_>>(),
            "kl_epsilon": EPSILON,
            "kl_log": "natural",
            "kl_zero_columns": "skipped",
            "similarity_clipping": "max(0, s)",
            "significance_stars": "*** p<0.001, ** p<0.01, * p<0.05",
            "correlation_method": method.to_string(),
            "seed": config.seed,
            "execution": if execution.is_parallel() { "parallel" } else { "sequential" },
            "detectors": chain.detectors().iter().map(|d| d.name().to_string()).collect::<Vec<_>>(),
            "classify": config.classify,
        },
        "notes": notes,
        "artifacts": artifacts,
        "generated_at": humantime::format_rfc3339_seconds(std::time::SystemTime::now()).to_string(),
    });
    let manifest = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");

    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for (name, bytes) in &files {
        write_atomic(&dir.join(name), bytes)?;
    }
    write_atomic(&dir.join("manifest.json"), &manifest)?;
    Ok(RunSummary {
        output_dir: dir.clone(),
        records: n_records,
        excluded,
        artifacts,
    })
}

/// Reads the artifact hashes recorded in a manifest.
pub fn manifest_artifacts(dir: &Path) -> Result<BTreeMap<String, String>> {
    let path = dir.join("manifest.json");
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(CliError::data)?;
    serde_json::from_value(v["artifacts"].clone()).map_err(CliError::data)
}
