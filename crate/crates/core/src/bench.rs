//! Benchmark studies: hardware overhead, filter classification and success
//! rates, plus CSV/JSON report writers.

use std::collections::HashMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::anneal::{batch_solve, AnnealSchedule, BatchConfig, RunRecord, SolveMode};
use crate::error::{Error, Result};
use crate::filter::{accuracy, classify, sample_balanced, FilterConfig, FilterModel};
use crate::qkp::{brute_force_oracle, QkpInstance};
use crate::qubo::{build_dqubo, build_inequality_qubo};
use crate::seed;

/// Success threshold as a fraction of the optimum.
pub const SUCCESS_FRACTION: f64 = 0.95;

/// Filter (working + replica) plus crossbar cells for the gated formulation.
pub fn inequality_cells(rows: usize, n: usize, bits: u32) -> u64 {
    2 * rows as u64 * n as u64 + (n as u64).pow(2) * bits as u64
}

/// Crossbar cells for the penalty formulation.
pub fn dqubo_cells(n: usize, capacity: u64, bits: u32) -> u64 {
    (n as u64 + capacity).pow(2) * bits as u64
}

pub fn saving_fraction(inequality_cells: u64, dqubo_cells: u64) -> f64 {
    1.0 - inequality_cells as f64 / dqubo_cells as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadReport {
    pub instance: String,
    pub n: usize,
    pub capacity: i64,
    /// `None` when the penalty matrix cannot be built (overflow or size limit).
    pub dqubo_dim: Option<usize>,
    pub ineq_bits: u32,
    pub dqubo_bits: Option<u32>,
    pub ineq_max_element: u64,
    pub dqubo_max_element: Option<u64>,
    pub ineq_cells: u64,
    pub dqubo_cells: Option<u64>,
    pub saving_fraction: Option<f64>,
    /// `log2` of the eliminated search space, `(n + C) - n = C`.
    pub search_space_reduction_exponent: i64,
}

pub fn overhead_report(instance: &QkpInstance, filter: &FilterConfig, alpha: i64, beta: i64) -> OverheadReport {
    let n = instance.n();
    let ineq = build_inequality_qubo(instance).quantization();
    let ineq_cells = inequality_cells(filter.rows, n, ineq.bits);
    let dq = match build_dqubo(instance, alpha, beta) {
        Ok(m) => Some((m.dim(), m.quantization())),
        Err(e) => {
            log::warn!("{}: penalty QUBO unavailable: {e}", instance.name());
            None
        }
    };
    let dqubo_cells_v = dq.map(|(_, qi)| dqubo_cells(n, instance.capacity() as u64, qi.bits));
    OverheadReport {
        instance: instance.name().to_string(),
        n,
        capacity: instance.capacity(),
        dqubo_dim: dq.map(|(d, _)| d),
        ineq_bits: ineq.bits,
        dqubo_bits: dq.map(|(_, qi)| qi.bits),
        ineq_max_element: ineq.max_abs_element,
        dqubo_max_element: dq.map(|(_, qi)| qi.max_abs_element),
        ineq_cells,
        dqubo_cells: dqubo_cells_v,
        saving_fraction: dqubo_cells_v.map(|d| saving_fraction(ineq_cells, d)),
        search_space_reduction_exponent: dq.map(|(d, _)| (d - n) as i64).unwrap_or(instance.capacity()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterStudyRow {
    pub instance: String,
    pub config_id: usize,
    pub weight_sum: i64,
    pub capacity: i64,
    pub working_ml: f64,
    pub replica_ml: f64,
    pub normalized_ml: f64,
    pub predicted: bool,
    pub actual: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterInstanceSummary {
    pub instance: String,
    pub samples: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterStudy {
    pub rows: Vec<FilterStudyRow>,
    pub per_instance: Vec<FilterInstanceSummary>,
    pub accuracy: f64,
}

/// Balanced Monte-Carlo configurations per instance, each classified by the
/// filter and compared with the exact inequality.
pub fn filter_study(
    instances: &[QkpInstance],
    filter: &FilterConfig,
    configs_per_instance: usize,
    seed: u64,
) -> Result<FilterStudy> {
    let mut rows = Vec::new();
    let mut per_instance = Vec::new();
    for (idx, inst) in instances.iter().enumerate() {
        let model = FilterModel::for_instance(inst, filter)?;
        let s = seed::derive(seed, &[idx as u64]);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let configs = sample_balanced(inst, configs_per_instance.div_ceil(2), &mut rng)?;
        let configs = &configs[..configs_per_instance.min(configs.len())];
        let samples = classify(&model, inst, configs, s)?;
        per_instance.push(FilterInstanceSummary {
            instance: inst.name().to_string(),
            samples: samples.len(),
            accuracy: accuracy(&samples),
        });
        rows.extend(samples.into_iter().map(|c| FilterStudyRow {
            instance: inst.name().to_string(),
            config_id: c.config_id,
            weight_sum: c.weight_sum,
            capacity: c.capacity,
            working_ml: c.working_ml,
            replica_ml: c.replica_ml,
            normalized_ml: c.normalized_ml(),
            predicted: c.predicted,
            actual: c.actual,
        }));
    }
    let correct = rows.iter().filter(|r| r.predicted == r.actual).count();
    let accuracy = if rows.is_empty() {
        1.0
    } else {
        correct as f64 / rows.len() as f64
    };
    Ok(FilterStudy {
        rows,
        per_instance,
        accuracy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "values")]
pub enum OptimumSource {
    /// Exhaustive enumeration (small instances only).
    Oracle,
    /// Best-known value per instance name.
    Provided(HashMap<String, i64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub runs: usize,
    pub success_rate: f64,
    /// Mean of `best_qkp_value / optimum`.
    pub mean_normalized_value: f64,
    /// Fraction of runs whose best configuration satisfies the capacity.
    pub feasible_fraction: f64,
    /// Mean exact energy of the best configurations.
    pub mean_best_energy: f64,
    pub schedule: AnnealSchedule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessReport {
    pub instance: String,
    pub n: usize,
    pub capacity: i64,
    pub optimum: i64,
    pub threshold: f64,
    pub ineq: ModeSummary,
    pub dqubo: ModeSummary,
}

/// Flat CSV row of a [`SuccessReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessRow {
    pub instance: String,
    pub n: usize,
    pub capacity: i64,
    pub optimum: i64,
    pub threshold: f64,
    pub ineq_success_rate: f64,
    pub dqubo_success_rate: f64,
    pub ineq_runs: usize,
    pub dqubo_runs: usize,
    pub ineq_mean_normalized: f64,
    pub dqubo_mean_normalized: f64,
    pub ineq_feasible_fraction: f64,
    pub dqubo_feasible_fraction: f64,
    pub ineq_mean_best_energy: f64,
    pub dqubo_mean_best_energy: f64,
    pub ineq_t_start: f64,
    pub ineq_t_end: f64,
    pub dqubo_t_start: f64,
    pub dqubo_t_end: f64,
    pub iterations: usize,
}

impl From<&SuccessReport> for SuccessRow {
    fn from(r: &SuccessReport) -> Self {
        SuccessRow {
            instance: r.instance.clone(),
            n: r.n,
            capacity: r.capacity,
            optimum: r.optimum,
            threshold: r.threshold,
            ineq_success_rate: r.ineq.success_rate,
            dqubo_success_rate: r.dqubo.success_rate,
            ineq_runs: r.ineq.runs,
            dqubo_runs: r.dqubo.runs,
            ineq_mean_normalized: r.ineq.mean_normalized_value,
            dqubo_mean_normalized: r.dqubo.mean_normalized_value,
            ineq_feasible_fraction: r.ineq.feasible_fraction,
            dqubo_feasible_fraction: r.dqubo.feasible_fraction,
            ineq_mean_best_energy: r.ineq.mean_best_energy,
            dqubo_mean_best_energy: r.dqubo.mean_best_energy,
            ineq_t_start: r.ineq.schedule.t_start,
            ineq_t_end: r.ineq.schedule.t_end,
            dqubo_t_start: r.dqubo.schedule.t_start,
            dqubo_t_end: r.dqubo.schedule.t_end,
            iterations: r.ineq.schedule.iterations,
        }
    }
}

pub fn is_success(run: &RunRecord, threshold: f64) -> bool {
    run.best_qkp_value as f64 >= threshold
}

fn summarize(runs: &[RunRecord], optimum: i64, threshold: f64, schedule: AnnealSchedule) -> ModeSummary {
    let count = runs.len().max(1) as f64;
    let norm = |v: i64| if optimum > 0 { v as f64 / optimum as f64 } else { 1.0 };
    ModeSummary {
        runs: runs.len(),
        success_rate: runs.iter().filter(|r| is_success(r, threshold)).count() as f64 / count,
        mean_normalized_value: runs.iter().map(|r| norm(r.best_qkp_value)).sum::<f64>() / count,
        feasible_fraction: runs.iter().filter(|r| r.best_feasible).count() as f64 / count,
        mean_best_energy: runs.iter().map(|r| r.best_energy as f64).sum::<f64>() / count,
        schedule,
    }
}

fn schedule_for(instance: &QkpInstance, mode: SolveMode, config: &BatchConfig) -> Result<AnnealSchedule> {
    match mode {
        SolveMode::Inequality => config.schedule_for(&build_inequality_qubo(instance).qubo),
        SolveMode::Dqubo => config.schedule_for(&build_dqubo(instance, config.alpha, config.beta)?.qubo),
    }
}

/// Both modes under the same budget, seeds and initial item selections.
pub fn success_rate_study(
    instances: &[QkpInstance],
    config: &BatchConfig,
    optimum_source: &OptimumSource,
) -> Result<Vec<SuccessReport>> {
    instances
        .iter()
        .map(|inst| {
            let optimum = match optimum_source {
                OptimumSource::Oracle => brute_force_oracle(inst)?.best_value,
                OptimumSource::Provided(map) => *map.get(inst.name()).ok_or_else(|| {
                    Error::Config(format!("no best-known value provided for instance {:?}", inst.name()))
                })?,
            };
            let threshold = SUCCESS_FRACTION * optimum as f64;
            let ineq_runs = batch_solve(inst, SolveMode::Inequality, config)?;
            let dqubo_runs = batch_solve(inst, SolveMode::Dqubo, config)?;
            Ok(SuccessReport {
                instance: inst.name().to_string(),
                n: inst.n(),
                capacity: inst.capacity(),
                optimum,
                threshold,
                ineq: summarize(
                    &ineq_runs,
                    optimum,
                    threshold,
                    schedule_for(inst, SolveMode::Inequality, config)?,
                ),
                dqubo: summarize(
                    &dqubo_runs,
                    optimum,
                    threshold,
                    schedule_for(inst, SolveMode::Dqubo, config)?,
                ),
            })
        })
        .collect()
}

/// Unweighted means over instances: `(ineq, dqubo)`.
pub fn suite_average(reports: &[SuccessReport]) -> (f64, f64) {
    let n = reports.len().max(1) as f64;
    (
        reports.iter().map(|r| r.ineq.success_rate).sum::<f64>() / n,
        reports.iter().map(|r| r.dqubo.success_rate).sum::<f64>() / n,
    )
}

/// CSV with a leading `# {metadata json}` line.
pub fn write_csv<W: Write, T: Serialize>(mut out: W, metadata: &serde_json::Value, rows: &[T]) -> Result<()> {
    writeln!(out, "# {}", serde_json::to_string(metadata)?)?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// `{"metadata": ..., "rows": [...]}`.
pub fn write_json<W: Write, T: Serialize>(mut out: W, metadata: &serde_json::Value, rows: &[T]) -> Result<()> {
    let doc = serde_json::json!({ "metadata": metadata, "rows": rows });
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)?;
    Ok(())
}
