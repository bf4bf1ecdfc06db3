//! Filter-gated simulated annealing.
//!
//! In inequality mode every proposal first passes the inequality filter;
//! rejected proposals never reach the energy evaluator and still consume the
//! iteration. In penalty mode every proposal is evaluated. Both modes run on
//! either the behavioral CiM models or an exact incremental software path;
//! with noise disabled the two produce identical runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::crossbar::{program_crossbar_with, CrossbarModel};
use crate::error::{Error, Result};
use crate::filter::{FilterConfig, FilterModel};
use crate::qkp::QkpInstance;
use crate::qubo::{build_dqubo, build_inequality_qubo, DQuboModel, InequalityQuboModel, MatrixLayout, QuboMatrix};
use crate::seed;

pub const DEFAULT_ITERATIONS: usize = 1000;
pub const DEFAULT_SWAP_PROBABILITY: f64 = 0.5;

const NOISE_STREAM: u64 = 0x004E_015E;
const INITIAL_STREAM: u64 = 0x1417;
const RUN_STREAM: u64 = 0x5EED;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolveMode {
    /// Inequality-gated QUBO with the filter in the loop.
    #[serde(rename = "ineq", alias = "inequality")]
    Inequality,
    /// One-hot penalty QUBO, every proposal evaluated.
    #[serde(rename = "dqubo")]
    Dqubo,
}

impl SolveMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMode::Inequality => "ineq",
            SolveMode::Dqubo => "dqubo",
        }
    }
}

impl std::fmt::Display for SolveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    BehavioralCim,
    ExactSoftware,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Backend {
    pub kind: BackendKind,
    /// Filter parameters (inequality mode only).
    pub filter: FilterConfig,
    /// Relative per-cell current noise of the crossbar.
    pub crossbar_noise: f64,
}

impl Backend {
    pub fn exact() -> Self {
        Backend {
            kind: BackendKind::ExactSoftware,
            filter: FilterConfig::default(),
            crossbar_noise: 0.0,
        }
    }

    pub fn cim(filter: FilterConfig, crossbar_noise: f64) -> Self {
        Backend {
            kind: BackendKind::BehavioralCim,
            filter,
            crossbar_noise,
        }
    }
}

/// Geometric cooling from `t_start` to `t_end` over `iterations` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub iterations: usize,
    pub t_start: f64,
    pub t_end: f64,
    /// Probability that a proposal swaps one selected item for one
    /// unselected item instead of flipping a single bit.
    #[serde(default = "default_swap_probability")]
    pub swap_probability: f64,
}

fn default_swap_probability() -> f64 {
    DEFAULT_SWAP_PROBABILITY
}

impl AnnealSchedule {
    pub fn new(iterations: usize, t_start: f64, t_end: f64) -> Result<Self> {
        let s = AnnealSchedule {
            iterations,
            t_start,
            t_end,
            swap_probability: DEFAULT_SWAP_PROBABILITY,
        };
        s.validate()?;
        Ok(s)
    }

    /// `t_start = max|Q_ij|`, `t_end = t_start / 100`, default swap rate.
    pub fn for_matrix(q: &QuboMatrix, iterations: usize) -> Self {
        let t_start = (q.max_abs_entry() as f64).max(1.0);
        AnnealSchedule {
            iterations,
            t_start,
            t_end: 0.01 * t_start,
            swap_probability: DEFAULT_SWAP_PROBABILITY,
        }
    }

    pub fn with_swaps(mut self, swap_probability: f64) -> Result<Self> {
        self.swap_probability = swap_probability;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::validation("iterations", "must be positive"));
        }
        if !(self.t_end > 0.0 && self.t_start >= self.t_end && self.t_start.is_finite()) {
            return Err(Error::validation(
                "schedule",
                format!("need t_start >= t_end > 0, got {} and {}", self.t_start, self.t_end),
            ));
        }
        if !(0.0..=1.0).contains(&self.swap_probability) {
            return Err(Error::validation("swap_probability", "must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Temperature at iteration `it` (0-based); reaches `t_end` at the last one.
    pub fn temperature(&self, it: usize) -> f64 {
        if self.iterations <= 1 {
            return self.t_start;
        }
        let frac = it as f64 / (self.iterations - 1) as f64;
        self.t_start * (self.t_end / self.t_start).powf(frac)
    }
}

/// The formulation being annealed.
#[derive(Debug, Clone, Copy)]
pub enum Problem<'a> {
    Inequality(&'a InequalityQuboModel),
    Dqubo(&'a DQuboModel),
}

impl Problem<'_> {
    pub fn mode(&self) -> SolveMode {
        match self {
            Problem::Inequality(_) => SolveMode::Inequality,
            Problem::Dqubo(_) => SolveMode::Dqubo,
        }
    }

    pub fn qubo(&self) -> &QuboMatrix {
        match self {
            Problem::Inequality(m) => &m.qubo,
            Problem::Dqubo(m) => &m.qubo,
        }
    }

    pub fn dim(&self) -> usize {
        self.qubo().dim()
    }

    /// Item count.
    pub fn n(&self) -> usize {
        match self {
            Problem::Inequality(m) => m.n(),
            Problem::Dqubo(m) => m.n,
        }
    }

    fn weights(&self) -> &[i64] {
        match self {
            Problem::Inequality(m) => &m.weights,
            Problem::Dqubo(m) => &m.weights,
        }
    }

    fn capacity(&self) -> i64 {
        match self {
            Problem::Inequality(m) => m.capacity,
            Problem::Dqubo(m) => m.capacity,
        }
    }

    /// Knapsack value of the item part of `z`, or 0 if it overflows the capacity.
    pub fn qkp_value(&self, z: &BitVector) -> Result<i64> {
        Error::check_dim(self.dim(), z.len())?;
        let n = self.n();
        let w = self.weights();
        let items: Vec<usize> = (0..n).filter(|&i| z.get(i)).collect();
        let sx: i64 = items.iter().map(|&i| w[i]).sum();
        if sx > self.capacity() {
            return Ok(0);
        }
        let q = self.qubo();
        let quad: i64 = items
            .iter()
            .map(|&i| items.iter().map(|&j| q.get(i, j)).sum::<i64>())
            .sum();
        Ok(match self {
            Problem::Inequality(_) => -quad,
            // x-block entries are β w_i w_j - p_ij
            Problem::Dqubo(m) => m.beta * sx * sx - quad,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub energy: f64,
    pub accepted: bool,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub mode: SolveMode,
    pub initial_index: usize,
    pub run_index: usize,
    /// Exact energy of `best_config` (constrained energy or penalty energy).
    pub best_energy: i64,
    pub best_config: BitVector,
    /// Whether the item part of `best_config` satisfies the capacity.
    pub best_feasible: bool,
    pub best_qkp_value: i64,
    pub final_energy: f64,
    pub iterations: usize,
    pub filter_rejections: u64,
    pub evaluations: u64,
    /// Evaluations performed at a configuration violating the capacity.
    pub infeasible_evaluations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<TrajectoryPoint>>,
}

/// Mutable state of the exact incremental evaluator.
struct SoftwareState {
    /// field[k] = Σ_{j != k} q_kj z_j
    field: Vec<i64>,
    /// zᵀQz without offset
    raw: i64,
}

impl SoftwareState {
    fn new(q: &QuboMatrix, z: &BitVector) -> Self {
        let dim = q.dim();
        let mut field = vec![0i64; dim];
        for j in z.ones_indices() {
            for (k, f) in field.iter_mut().enumerate() {
                if k != j {
                    *f += q.get(k, j);
                }
            }
        }
        let raw = q.quadratic_form(z).expect("dimension checked by caller");
        SoftwareState { field, raw }
    }

    #[inline]
    fn delta(&self, q: &QuboMatrix, z: &BitVector, k: usize) -> i64 {
        let d = q.get(k, k) + 2 * self.field[k];
        if z.get(k) {
            -d
        } else {
            d
        }
    }

    /// Apply the flip of `k`; `z` must still hold the pre-flip value.
    fn commit(&mut self, q: &QuboMatrix, z: &BitVector, k: usize) {
        self.raw += self.delta(q, z, k);
        let sign = if z.get(k) { -1 } else { 1 };
        let row = q.row(k);
        for (j, f) in self.field.iter_mut().enumerate() {
            if j != k {
                *f += sign * row[j];
            }
        }
    }
}

impl SoftwareState {
    fn move_delta(&self, q: &QuboMatrix, z: &BitVector, mv: &Move) -> i64 {
        match *mv.bits() {
            [k] => self.delta(q, z, k),
            [a, b] => {
                let sa = if z.get(a) { -1 } else { 1 };
                let sb = if z.get(b) { -1 } else { 1 };
                self.delta(q, z, a) + self.delta(q, z, b) + 2 * sa * sb * q.get(a, b)
            }
            _ => unreachable!("moves touch one or two bits"),
        }
    }

    fn commit_move(&mut self, q: &QuboMatrix, z: &mut BitVector, mv: &Move) {
        for &k in mv.bits() {
            self.commit(q, z, k);
            z.flip(k);
        }
    }
}

/// One or two distinct bits to flip together.
#[derive(Debug, Clone, Copy)]
struct Move {
    bits: [usize; 2],
    len: usize,
}

impl Move {
    fn flip(k: usize) -> Self {
        Move { bits: [k, k], len: 1 }
    }

    fn swap(a: usize, b: usize) -> Self {
        Move { bits: [a, b], len: 2 }
    }

    fn bits(&self) -> &[usize] {
        &self.bits[..self.len]
    }

    fn apply(&self, z: &mut BitVector) {
        for &k in self.bits() {
            z.flip(k);
        }
    }
}

fn propose(rng: &mut ChaCha8Rng, z: &BitVector, n: usize, dim: usize, swap_probability: f64) -> Move {
    if swap_probability > 0.0 && rng.random::<f64>() < swap_probability {
        let ones = (0..n).filter(|&i| z.get(i)).count();
        if ones > 0 && ones < n {
            let a = (0..n)
                .filter(|&i| z.get(i))
                .nth(rng.random_range(0..ones))
                .expect("in range");
            let b = (0..n)
                .filter(|&i| !z.get(i))
                .nth(rng.random_range(0..n - ones))
                .expect("in range");
            return Move::swap(a, b);
        }
    }
    Move::flip(rng.random_range(0..dim))
}

/// A problem bound to a backend, reusable across runs.
pub struct Annealer<'a> {
    problem: Problem<'a>,
    backend: Backend,
    filter: Option<FilterModel>,
    crossbar: Option<CrossbarModel>,
}

impl<'a> Annealer<'a> {
    pub fn new(problem: Problem<'a>, backend: Backend) -> Result<Self> {
        let noisy_filter = backend.filter.noise_sigma > 0.0;
        match backend.kind {
            BackendKind::ExactSoftware if noisy_filter || backend.crossbar_noise > 0.0 => {
                return Err(Error::Config("device noise requires the behavioral-cim backend".into()))
            }
            BackendKind::BehavioralCim if noisy_filter && problem.mode() == SolveMode::Dqubo => {
                return Err(Error::Config(
                    "penalty mode has no inequality filter; filter noise does not apply".into(),
                ))
            }
            _ => {}
        }
        let (filter, crossbar) = match backend.kind {
            BackendKind::ExactSoftware => (None, None),
            BackendKind::BehavioralCim => {
                let (filter, layout) = match problem {
                    Problem::Inequality(m) => (
                        Some(FilterModel::build(&m.weights, m.capacity, &backend.filter)?),
                        MatrixLayout::Symmetric,
                    ),
                    Problem::Dqubo(_) => (None, MatrixLayout::UpperTriangular),
                };
                let crossbar = program_crossbar_with(problem.qubo(), layout).with_noise(backend.crossbar_noise);
                (filter, Some(crossbar))
            }
        };
        Ok(Annealer {
            problem,
            backend,
            filter,
            crossbar,
        })
    }

    pub fn problem(&self) -> Problem<'a> {
        self.problem
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn default_schedule(&self, iterations: usize) -> AnnealSchedule {
        AnnealSchedule::for_matrix(self.problem.qubo(), iterations)
    }

    pub fn run(
        &self,
        schedule: &AnnealSchedule,
        initial: &BitVector,
        seed: u64,
        record_trajectory: bool,
    ) -> Result<RunRecord> {
        schedule.validate()?;
        let problem = self.problem;
        let q = problem.qubo();
        let dim = q.dim();
        Error::check_dim(dim, initial.len())?;
        let n = problem.n();
        let weights = problem.weights();
        let capacity = problem.capacity();
        let offset = q.offset() as f64;
        let gated = problem.mode() == SolveMode::Inequality;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut noise_rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, &[NOISE_STREAM]));

        let mut z = initial.clone();
        let mut soft = SoftwareState::new(q, &z);
        let mut weight: i64 = (0..n).filter(|&i| z.get(i)).map(|i| weights[i]).sum();

        // Hardware view of the current configuration.
        let measure = |z: &BitVector, noise_rng: &mut ChaCha8Rng, soft_energy: i64| -> Result<f64> {
            match &self.crossbar {
                Some(xb) => Ok(xb.read(z, Some(noise_rng))?.value),
                None => Ok(soft_energy as f64 + offset),
            }
        };
        let passes_filter = |z: &BitVector, noise_rng: &mut ChaCha8Rng, exact_weight: i64| -> Result<bool> {
            match &self.filter {
                Some(f) => Ok(f.check_with_rng(z, noise_rng)?.feasible),
                None => Ok(exact_weight <= capacity),
            }
        };

        let mut feasible_cur = if gated {
            passes_filter(&z, &mut noise_rng, weight)?
        } else {
            weight <= capacity
        };
        // Infeasible starts sit at E = 0 until the first feasible acceptance.
        let mut energy = if !gated || feasible_cur {
            measure(&z, &mut noise_rng, soft.raw)?
        } else {
            0.0
        };

        let mut best_energy = energy;
        let mut best_z = z.clone();
        let mut best_valid = !gated || feasible_cur;

        let mut filter_rejections = 0u64;
        let mut evaluations = 0u64;
        let mut infeasible_evaluations = 0u64;
        let mut trajectory = record_trajectory.then(|| Vec::with_capacity(schedule.iterations));

        for it in 0..schedule.iterations {
            let t = schedule.temperature(it);
            let mv = propose(&mut rng, &z, n, dim, schedule.swap_probability);
            let dw: i64 = mv
                .bits()
                .iter()
                .filter(|&&k| k < n)
                .map(|&k| if z.get(k) { -weights[k] } else { weights[k] })
                .sum();
            let new_weight = weight + dw;

            let mut accepted = false;
            let mut evaluate = true;
            if gated {
                mv.apply(&mut z);
                let ok = passes_filter(&z, &mut noise_rng, new_weight);
                mv.apply(&mut z);
                if !ok? {
                    filter_rejections += 1;
                    evaluate = false;
                    // Both sides sit at E = 0: a zero-energy move, taken.
                    if !feasible_cur {
                        soft.commit_move(q, &mut z, &mv);
                        weight = new_weight;
                        accepted = true;
                    }
                }
            }

            if evaluate {
                evaluations += 1;
                if new_weight > capacity {
                    infeasible_evaluations += 1;
                }
                let new_raw = soft.raw + soft.move_delta(q, &z, &mv);
                let new_energy = if self.crossbar.is_some() {
                    mv.apply(&mut z);
                    let e = measure(&z, &mut noise_rng, new_raw);
                    mv.apply(&mut z);
                    e?
                } else {
                    new_raw as f64 + offset
                };
                let de = new_energy - energy;
                accepted = de <= 0.0 || rng.random::<f64>() < (-de / t).exp();
                if accepted {
                    soft.commit_move(q, &mut z, &mv);
                    weight = new_weight;
                    energy = new_energy;
                    if gated {
                        feasible_cur = true;
                    }
                }
            }

            if !gated {
                feasible_cur = weight <= capacity;
            }
            let valid = !gated || feasible_cur;
            if valid && (!best_valid || energy < best_energy) {
                best_energy = energy;
                best_z.clone_from(&z);
                best_valid = true;
            }
            if let Some(tr) = trajectory.as_mut() {
                tr.push(TrajectoryPoint {
                    iteration: it,
                    energy,
                    accepted,
                    feasible: weight <= capacity,
                });
            }
        }

        let best_feasible = {
            let sx: i64 = (0..n).filter(|&i| best_z.get(i)).map(|i| weights[i]).sum();
            sx <= capacity
        };
        let best_exact = match problem {
            Problem::Inequality(m) => m.constrained_energy(&best_z)?,
            Problem::Dqubo(m) => m.energy(&best_z)?,
        };
        Ok(RunRecord {
            seed,
            mode: problem.mode(),
            initial_index: 0,
            run_index: 0,
            best_energy: best_exact,
            best_qkp_value: problem.qkp_value(&best_z)?,
            best_config: best_z,
            best_feasible,
            final_energy: energy,
            iterations: schedule.iterations,
            filter_rejections,
            evaluations,
            infeasible_evaluations,
            trajectory,
        })
    }
}

pub fn sa_run(
    problem: Problem<'_>,
    backend: &Backend,
    schedule: &AnnealSchedule,
    initial: &BitVector,
    seed: u64,
) -> Result<RunRecord> {
    Annealer::new(problem, backend.clone())?.run(schedule, initial, seed, false)
}

/// Batch parameters shared by both modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub num_initials: usize,
    pub runs_per_initial: usize,
    pub iterations: usize,
    /// Explicit schedule; `None` derives one from the matrix.
    pub schedule: Option<AnnealSchedule>,
    pub backend: Backend,
    pub master_seed: u64,
    pub alpha: i64,
    pub beta: i64,
    /// Swap rate of derived schedules.
    pub swap_probability: f64,
}

impl BatchConfig {
    /// The explicit schedule, or one derived from `q`.
    pub fn schedule_for(&self, q: &QuboMatrix) -> Result<AnnealSchedule> {
        match self.schedule {
            Some(s) => Ok(s),
            None => AnnealSchedule::for_matrix(q, self.iterations).with_swaps(self.swap_probability),
        }
    }
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            num_initials: 100,
            runs_per_initial: 10,
            iterations: DEFAULT_ITERATIONS,
            schedule: None,
            backend: Backend::exact(),
            master_seed: 0,
            alpha: crate::qubo::DEFAULT_ALPHA,
            beta: crate::qubo::DEFAULT_BETA,
            swap_probability: DEFAULT_SWAP_PROBABILITY,
        }
    }
}

/// Monte-Carlo initial configuration `idx`. The item bits come first and
/// depend only on `(master_seed, idx)`, so both modes start from the same
/// item selection; auxiliary bits follow from the same stream.
pub fn initial_configuration(dim: usize, master_seed: u64, idx: usize) -> BitVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(master_seed, &[INITIAL_STREAM, idx as u64]));
    BitVector::random(dim, &mut rng)
}

pub fn run_seed(master_seed: u64, initial_index: usize, run_index: usize) -> u64 {
    seed::derive(master_seed, &[RUN_STREAM, initial_index as u64, run_index as u64])
}

/// Runs every `(initial, run)` pair of a batch on a prepared annealer.
/// Output order is `(initial_index, run_index)` regardless of thread count.
pub fn batch_runs(annealer: &Annealer<'_>, config: &BatchConfig) -> Result<Vec<RunRecord>> {
    let schedule = config.schedule_for(annealer.problem().qubo())?;
    let dim = annealer.problem().dim();
    let initials: Vec<BitVector> = (0..config.num_initials)
        .map(|i| initial_configuration(dim, config.master_seed, i))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..config.num_initials)
        .flat_map(|i| (0..config.runs_per_initial).map(move |r| (i, r)))
        .collect();
    jobs.par_iter()
        .map(|&(i, r)| {
            let mut rec = annealer.run(&schedule, &initials[i], run_seed(config.master_seed, i, r), false)?;
            rec.initial_index = i;
            rec.run_index = r;
            Ok(rec)
        })
        .collect()
}

pub fn batch_solve(instance: &QkpInstance, mode: SolveMode, config: &BatchConfig) -> Result<Vec<RunRecord>> {
    match mode {
        SolveMode::Inequality => {
            let model = build_inequality_qubo(instance);
            let annealer = Annealer::new(Problem::Inequality(&model), config.backend.clone())?;
            batch_runs(&annealer, config)
        }
        SolveMode::Dqubo => {
            let model = build_dqubo(instance, config.alpha, config.beta)?;
            let annealer = Annealer::new(Problem::Dqubo(&model), config.backend.clone())?;
            batch_runs(&annealer, config)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig5() -> QkpInstance {
        QkpInstance::from_triangle("fig5", &[5, 3, 4], &[2, 0, 1], vec![4, 7, 2], 9).unwrap()
    }

    #[test]
    fn schedule_endpoints() {
        let s = AnnealSchedule::new(1000, 50.0, 0.5).unwrap();
        assert_eq!(s.temperature(0), 50.0);
        assert!((s.temperature(999) - 0.5).abs() < 1e-9);
        assert!(s.temperature(500) < 50.0 && s.temperature(500) > 0.5);
        assert!(AnnealSchedule::new(10, 1.0, 2.0).is_err());
        assert!(AnnealSchedule::new(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn small_instance_reaches_optimum() {
        let model = build_inequality_qubo(&fig5());
        let a = Annealer::new(Problem::Inequality(&model), Backend::exact()).unwrap();
        for seed in 0..20 {
            let init = BitVector::from_code(3, seed % 8);
            let rec = a.run(&a.default_schedule(1000), &init, seed, false).unwrap();
            assert_eq!(rec.best_qkp_value, 9, "seed {seed}");
            assert!(rec.best_feasible);
            assert!(rec.filter_rejections + rec.evaluations <= 1000);
        }
    }

    #[test]
    fn penalty_mode_reports_item_value() {
        let inst = fig5();
        let model = build_dqubo(&inst, 2, 2).unwrap();
        let p = Problem::Dqubo(&model);
        // x = 101 with y one-hot at 6
        let mut z = BitVector::zeros(model.dim());
        z.set(0, true);
        z.set(2, true);
        z.set(3 + 5, true);
        assert_eq!(p.qkp_value(&z).unwrap(), 9);
        assert_eq!(model.energy(&z).unwrap(), -9);
        z.set(1, true);
        assert_eq!(p.qkp_value(&z).unwrap(), 0);
    }

    #[test]
    fn mismatched_backend_is_a_configuration_error() {
        let model = build_inequality_qubo(&fig5());
        let mut b = Backend::exact();
        b.crossbar_noise = 0.1;
        assert!(matches!(
            Annealer::new(Problem::Inequality(&model), b),
            Err(Error::Config(_))
        ));
        let d = build_dqubo(&fig5(), 2, 2).unwrap();
        let f = FilterConfig {
            noise_sigma: 0.1,
            ..FilterConfig::default()
        };
        assert!(matches!(
            Annealer::new(Problem::Dqubo(&d), Backend::cim(f, 0.0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn wrong_initial_length() {
        let model = build_inequality_qubo(&fig5());
        let s = AnnealSchedule::new(10, 1.0, 1.0).unwrap();
        assert!(matches!(
            sa_run(
                Problem::Inequality(&model),
                &Backend::exact(),
                &s,
                &BitVector::zeros(4),
                0
            ),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn infeasible_start_walks_to_feasibility() {
        let model = build_inequality_qubo(&fig5());
        let a = Annealer::new(Problem::Inequality(&model), Backend::exact()).unwrap();
        let rec = a.run(&a.default_schedule(200), &BitVector::ones(3), 3, true).unwrap();
        assert!(rec.best_feasible);
        assert_eq!(rec.infeasible_evaluations, 0);
        let tr = rec.trajectory.unwrap();
        assert_eq!(tr.len(), 200);
    }

    #[test]
    fn batch_counts_and_seeds() {
        let cfg = BatchConfig {
            num_initials: 2,
            runs_per_initial: 3,
            iterations: 50,
            ..BatchConfig::default()
        };
        let recs = batch_solve(&fig5(), SolveMode::Inequality, &cfg).unwrap();
        assert_eq!(recs.len(), 6);
        let seeds: std::collections::HashSet<_> = recs.iter().map(|r| r.seed).collect();
        assert_eq!(seeds.len(), 6);
        assert_eq!(recs[4].initial_index, 1);
        assert_eq!(recs[4].run_index, 1);
    }

    #[test]
    fn modes_share_item_bits_of_initials() {
        let a = initial_configuration(3, 9, 4);
        let b = initial_configuration(12, 9, 4);
        assert_eq!(b.prefix(3), a);
    }
}
