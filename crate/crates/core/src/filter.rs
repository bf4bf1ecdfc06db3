//! Behavioral model of the multi-level inequality filter.
//!
//! Each item weight is split over a column of `rows` cells holding levels
//! `0..=levels`. Reading a configuration precharges the shared matchline to
//! `vdd` and steps the gate through `levels` read phases; a selected cell
//! storing level `k` conducts in exactly `k` of them. Every conduction event
//! removes `unit_drop` volts from the matchline. A replica array programmed to
//! sum to the capacity provides the comparator reference.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::qkp::QkpInstance;

pub const DEFAULT_ROWS: usize = 16;
pub const DEFAULT_LEVELS: u32 = 4;
pub const DEFAULT_VDD: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub rows: usize,
    /// Highest storable level per cell; also the number of read phases.
    pub levels: u32,
    pub vdd: f64,
    /// Volts per conduction event. `None` picks a mid-rail replica when a model is built.
    pub unit_drop: Option<f64>,
    /// Relative standard deviation of each conduction event.
    pub noise_sigma: f64,
    /// Working matchline must exceed the replica by this many volts to pass.
    pub comparator_offset: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            rows: DEFAULT_ROWS,
            levels: DEFAULT_LEVELS,
            vdd: DEFAULT_VDD,
            unit_drop: None,
            noise_sigma: 0.0,
            comparator_offset: 0.0,
        }
    }
}

impl FilterConfig {
    /// Largest weight one column can hold.
    pub fn column_capacity(&self) -> i64 {
        self.rows as i64 * self.levels as i64
    }

    fn validate(&self) -> Result<()> {
        if self.rows == 0 {
            return Err(Error::validation("rows", "must be positive"));
        }
        if self.levels == 0 || self.levels > u8::MAX as u32 {
            return Err(Error::validation("levels", "must be in 1..=255"));
        }
        if !(self.vdd > 0.0 && self.vdd.is_finite()) {
            return Err(Error::validation("vdd", "must be positive"));
        }
        if let Some(u) = self.unit_drop {
            if !(u > 0.0 && u.is_finite()) {
                return Err(Error::validation("unit_drop", "must be positive"));
            }
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::validation("noise_sigma", "must be non-negative"));
        }
        Ok(())
    }

    fn unit_drop(&self) -> Result<f64> {
        self.unit_drop
            .ok_or_else(|| Error::Config("unit_drop must be resolved before reading an array".into()))
    }
}

/// `rows × cols` cell levels, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightPlane {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl WeightPlane {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn cell(&self, row: usize, col: usize) -> u8 {
        self.cells[row * self.cols + col]
    }

    pub fn column(&self, col: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.cell(r, col)).collect()
    }

    pub fn column_sum(&self, col: usize) -> i64 {
        (0..self.rows).map(|r| self.cell(r, col) as i64).sum()
    }
}

/// Greedy top-down split: row 0 takes `min(w, levels)`, the rest flows down.
pub fn decompose_weights(weights: &[i64], config: &FilterConfig) -> Result<WeightPlane> {
    config.validate()?;
    let rows = config.rows;
    let cols = weights.len();
    let levels = config.levels as i64;
    let mut cells = vec![0u8; rows * cols];
    for (col, &w) in weights.iter().enumerate() {
        if w < 0 {
            return Err(Error::validation(
                "weights",
                format!("w[{}] = {w} is negative", col + 1),
            ));
        }
        if w > config.column_capacity() {
            return Err(Error::Capacity(format!(
                "weight {w} in column {} exceeds the column capacity {} ({} rows × {} levels); \
                 increase the number of rows",
                col + 1,
                config.column_capacity(),
                rows,
                levels
            )));
        }
        let mut rest = w;
        for row in 0..rows {
            if rest == 0 {
                break;
            }
            let take = rest.min(levels);
            cells[row * cols + col] = take as u8;
            rest -= take;
        }
    }
    Ok(WeightPlane { rows, cols, cells })
}

/// Replica array and its fixed input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplicaConfig {
    pub plane: WeightPlane,
    pub input: BitVector,
}

impl ReplicaConfig {
    /// `Σ w'_i x'_i`.
    pub fn encoded_sum(&self) -> i64 {
        self.input.ones_indices().map(|c| self.plane.column_sum(c)).sum()
    }
}

/// Fills columns left to right with up to one column capacity each until the
/// running sum reaches `capacity`.
pub fn build_replica(capacity: i64, cols: usize, config: &FilterConfig) -> Result<ReplicaConfig> {
    config.validate()?;
    let per_col = config.column_capacity();
    let total = per_col * cols as i64;
    if capacity < 0 || capacity > total {
        return Err(Error::Capacity(format!(
            "capacity {capacity} exceeds the replica array capacity {total} ({cols} columns × {per_col})"
        )));
    }
    let mut weights = vec![0i64; cols];
    let mut input = BitVector::zeros(cols);
    let mut rest = capacity;
    for (col, w) in weights.iter_mut().enumerate() {
        if rest == 0 {
            break;
        }
        *w = rest.min(per_col);
        input.set(col, true);
        rest -= *w;
    }
    let plane = decompose_weights(&weights, config)?;
    Ok(ReplicaConfig { plane, input })
}

/// Matchline voltage after all read phases.
///
/// With `noise` present and `config.noise_sigma > 0`, each conduction event
/// drops `unit_drop · (1 + η)` with `η ~ N(0, noise_sigma²)`.
pub fn evaluate_ml<R: Rng + ?Sized>(
    plane: &WeightPlane,
    x: &BitVector,
    config: &FilterConfig,
    noise: Option<&mut R>,
) -> Result<f64> {
    Error::check_dim(plane.cols, x.len())?;
    let unit = config.unit_drop()?;
    let active: Vec<usize> = x.ones_indices().collect();
    let drop = match noise {
        Some(rng) if config.noise_sigma > 0.0 => {
            let mut drop = 0.0;
            for phase in 1..=config.levels as u8 {
                for &col in &active {
                    for row in 0..plane.rows {
                        if plane.cell(row, col) >= phase {
                            let eta: f64 = rng.sample(StandardNormal);
                            drop += unit * (1.0 + config.noise_sigma * eta);
                        }
                    }
                }
            }
            drop
        }
        _ => {
            let mut events = 0i64;
            for phase in 1..=config.levels as u8 {
                for &col in &active {
                    events += (0..plane.rows).filter(|&row| plane.cell(row, col) >= phase).count() as i64;
                }
            }
            unit * events as f64
        }
    };
    Ok((config.vdd - drop).clamp(0.0, config.vdd))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub working_ml: f64,
    pub replica_ml: f64,
    pub feasible: bool,
}

impl FilterDecision {
    /// Working matchline over replica matchline.
    pub fn normalized_ml(&self) -> f64 {
        self.working_ml / self.replica_ml
    }
}

/// Working array, replica and comparator for one inequality `w·x ≤ C`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterModel {
    config: FilterConfig,
    working: WeightPlane,
    replica: ReplicaConfig,
    capacity: i64,
    replica_ml: f64,
}

impl FilterModel {
    pub fn build(weights: &[i64], capacity: i64, config: &FilterConfig) -> Result<Self> {
        config.validate()?;
        let working = decompose_weights(weights, config)?;
        let replica = build_replica(capacity, weights.len(), config)?;
        let mut config = config.clone();
        let unit = match config.unit_drop {
            Some(u) => u,
            None => {
                let scale = capacity.max(weights.iter().copied().max().unwrap_or(1)).max(1);
                config.vdd / (2.0 * scale as f64)
            }
        };
        if unit * capacity as f64 >= config.vdd {
            return Err(Error::Config(format!(
                "unit_drop {unit} V discharges the replica (C = {capacity}) to ground; \
                 it must stay below vdd / C"
            )));
        }
        config.unit_drop = Some(unit);
        let replica_ml = evaluate_ml::<ChaCha8Rng>(&replica.plane, &replica.input, &config, None)?;
        Ok(FilterModel {
            config,
            working,
            replica,
            capacity,
            replica_ml,
        })
    }

    pub fn for_instance(instance: &QkpInstance, config: &FilterConfig) -> Result<Self> {
        FilterModel::build(instance.weights(), instance.capacity(), config)
    }

    pub fn config(&self) -> &FilterConfig {
        &self.config
    }

    pub fn unit_drop(&self) -> f64 {
        self.config.unit_drop.expect("resolved in build")
    }

    pub fn working(&self) -> &WeightPlane {
        &self.working
    }

    pub fn replica(&self) -> &ReplicaConfig {
        &self.replica
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    pub fn n(&self) -> usize {
        self.working.cols
    }

    /// Reference matchline, always read without noise.
    pub fn replica_ml(&self) -> f64 {
        self.replica_ml
    }

    pub fn is_noisy(&self) -> bool {
        self.config.noise_sigma > 0.0
    }

    pub fn check_with_rng<R: Rng + ?Sized>(&self, x: &BitVector, rng: &mut R) -> Result<FilterDecision> {
        let working_ml = evaluate_ml(&self.working, x, &self.config, Some(rng))?;
        Ok(self.decide(working_ml))
    }

    /// Noise, when configured, is drawn from a stream seeded by `seed` (0 if absent).
    pub fn check(&self, x: &BitVector, seed: Option<u64>) -> Result<FilterDecision> {
        let working_ml = if self.is_noisy() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
            evaluate_ml(&self.working, x, &self.config, Some(&mut rng))?
        } else {
            evaluate_ml::<ChaCha8Rng>(&self.working, x, &self.config, None)?
        };
        Ok(self.decide(working_ml))
    }

    fn decide(&self, working_ml: f64) -> FilterDecision {
        FilterDecision {
            working_ml,
            replica_ml: self.replica_ml,
            feasible: working_ml >= self.replica_ml + self.config.comparator_offset,
        }
    }
}

pub fn filter_check(model: &FilterModel, x: &BitVector, seed: Option<u64>) -> Result<FilterDecision> {
    model.check(x, seed)
}

/// One filter reading alongside the exact inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedSample {
    pub config_id: usize,
    pub x: BitVector,
    pub weight_sum: i64,
    pub capacity: i64,
    pub working_ml: f64,
    pub replica_ml: f64,
    pub predicted: bool,
    pub actual: bool,
}

impl ClassifiedSample {
    pub fn normalized_ml(&self) -> f64 {
        self.working_ml / self.replica_ml
    }

    pub fn correct(&self) -> bool {
        self.predicted == self.actual
    }
}

/// Monte-Carlo search for `per_class` distinct feasible and `per_class`
/// distinct infeasible configurations. Each attempt draws a fill probability
/// uniformly and then independent bits, so weight sums spread across the
/// whole range. Feasible samples come first in the result.
pub fn sample_balanced<R: Rng + ?Sized>(
    instance: &QkpInstance,
    per_class: usize,
    rng: &mut R,
) -> Result<Vec<BitVector>> {
    let n = instance.n();
    let budget = 2000 * per_class.max(1) + 10_000;
    let mut seen = HashSet::new();
    let mut feasible = Vec::with_capacity(per_class);
    let mut infeasible = Vec::with_capacity(per_class);
    for _ in 0..budget {
        if feasible.len() == per_class && infeasible.len() == per_class {
            break;
        }
        let fill: f64 = rng.random();
        let x: BitVector = (0..n).map(|_| rng.random::<f64>() < fill).collect();
        let ok = instance.is_feasible(&x)?;
        let bucket = if ok { &mut feasible } else { &mut infeasible };
        if bucket.len() < per_class && seen.insert(x.clone()) {
            bucket.push(x);
        }
    }
    if feasible.len() < per_class || infeasible.len() < per_class {
        return Err(Error::Sampling {
            feasible: feasible.len(),
            infeasible: infeasible.len(),
            wanted: per_class,
        });
    }
    feasible.extend(infeasible);
    Ok(feasible)
}

/// Reads every configuration through the filter. Noise for sample `k` is
/// drawn from a stream derived from `(seed, k)`.
pub fn classify(
    model: &FilterModel,
    instance: &QkpInstance,
    configs: &[BitVector],
    seed: u64,
) -> Result<Vec<ClassifiedSample>> {
    Error::check_dim(instance.n(), model.n())?;
    configs
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let d = model.check(x, Some(crate::seed::derive(seed, &[0xF117, k as u64])))?;
            let weight_sum = instance.weight(x)?;
            Ok(ClassifiedSample {
                config_id: k,
                x: x.clone(),
                weight_sum,
                capacity: instance.capacity(),
                working_ml: d.working_ml,
                replica_ml: d.replica_ml,
                predicted: d.feasible,
                actual: weight_sum <= instance.capacity(),
            })
        })
        .collect()
}

pub fn accuracy(samples: &[ClassifiedSample]) -> f64 {
    if samples.is_empty() {
        return 1.0;
    }
    samples.iter().filter(|s| s.correct()).count() as f64 / samples.len() as f64
}

/// Fraction of balanced Monte-Carlo samples the filter labels correctly.
pub fn classification_accuracy(
    model: &FilterModel,
    instance: &QkpInstance,
    num_samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = sample_balanced(instance, num_samples.div_ceil(2), &mut rng)?;
    Ok(accuracy(&classify(model, instance, &configs, seed)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(unit_drop: f64) -> FilterConfig {
        FilterConfig {
            unit_drop: Some(unit_drop),
            ..FilterConfig::default()
        }
    }

    #[test]
    fn greedy_decomposition() {
        let c = FilterConfig::default();
        let plane = decompose_weights(&[7, 64, 0], &c).unwrap();
        let mut seven = vec![0u8; 16];
        seven[0] = 4;
        seven[1] = 3;
        assert_eq!(plane.column(0), seven);
        assert_eq!(plane.column(1), vec![4u8; 16]);
        assert_eq!(plane.column_sum(2), 0);
        assert!(matches!(decompose_weights(&[65], &c), Err(Error::Capacity(_))));
    }

    #[test]
    fn replica_fills_left_to_right() {
        let c = FilterConfig::default();
        let r = build_replica(9, 3, &c).unwrap();
        assert_eq!(&r.plane.column(0)[..4], &[4, 4, 1, 0]);
        assert_eq!(r.input.to_string(), "100");
        assert_eq!(r.encoded_sum(), 9);

        let r = build_replica(100, 100, &c).unwrap();
        assert_eq!(r.plane.column_sum(0), 64);
        assert_eq!(r.plane.column_sum(1), 36);
        assert_eq!(r.plane.column_sum(2), 0);
        assert_eq!(r.input.count_ones(), 2);
        assert_eq!(r.encoded_sum(), 100);

        assert!(build_replica(6400, 100, &c).is_ok());
        assert!(matches!(build_replica(6401, 100, &c), Err(Error::Capacity(_))));
    }

    #[test]
    fn matchline_levels_by_hand() {
        let c = cfg(0.05);
        let plane = decompose_weights(&[4, 7, 2], &c).unwrap();
        let v0 = evaluate_ml::<ChaCha8Rng>(&plane, &BitVector::zeros(3), &c, None).unwrap();
        assert_eq!(v0, 2.0);
        let x: BitVector = [1u8, 1, 0].iter().collect();
        let v = evaluate_ml::<ChaCha8Rng>(&plane, &x, &c, None).unwrap();
        assert!((v - 1.45).abs() < 1e-12);

        let model = FilterModel::build(&[4, 7, 2], 9, &c).unwrap();
        assert!((model.replica_ml() - 1.55).abs() < 1e-12);
        let d = model.check(&x, None).unwrap();
        assert!(!d.feasible);
        assert!(d.working_ml < d.replica_ml);
    }

    #[test]
    fn boundary_sum_is_feasible() {
        let model = FilterModel::build(&[4, 7, 2], 9, &FilterConfig::default()).unwrap();
        let x: BitVector = [0u8, 1, 1].iter().collect();
        let d = model.check(&x, None).unwrap();
        assert!(d.feasible);
        assert_eq!(d.working_ml, d.replica_ml);
        assert!(model.check(&BitVector::zeros(3), None).unwrap().feasible);
    }

    #[test]
    fn default_unit_drop_puts_replica_mid_rail() {
        let model = FilterModel::build(&[4, 7, 2], 9, &FilterConfig::default()).unwrap();
        assert!((model.replica_ml() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oversized_unit_drop_is_rejected() {
        assert!(matches!(
            FilterModel::build(&[4, 7, 2], 9, &cfg(0.5)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn dimension_mismatch() {
        let model = FilterModel::build(&[4, 7, 2], 9, &FilterConfig::default()).unwrap();
        assert!(matches!(
            model.check(&BitVector::zeros(4), None),
            Err(Error::Dimension { expected: 3, actual: 4 })
        ));
    }

    #[test]
    fn noisy_reading_is_seeded() {
        let c = FilterConfig {
            noise_sigma: 0.1,
            ..FilterConfig::default()
        };
        let model = FilterModel::build(&[4, 7, 2], 9, &c).unwrap();
        let x = BitVector::ones(3);
        let a = model.check(&x, Some(3)).unwrap();
        let b = model.check(&x, Some(3)).unwrap();
        let other = model.check(&x, Some(4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.working_ml, other.working_ml);
        // replica is a fixed reference
        assert_eq!(a.replica_ml, model.replica_ml());
    }

    #[test]
    fn vacuous_capacity_cannot_be_balanced() {
        let inst = QkpInstance::from_triangle("v", &[1, 1, 1], &[0, 0, 0], vec![1, 1, 1], 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            sample_balanced(&inst, 2, &mut rng),
            Err(Error::Sampling { infeasible: 0, .. })
        ));
    }
}
