//! Quadratic knapsack instances: validation, file formats, a seeded
//! generator and the exhaustive reference solver.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};

/// Largest item count the exhaustive oracle accepts.
pub const ORACLE_MAX_ITEMS: usize = 24;

/// Parameters recorded by [`generate_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n: usize,
    pub density: f64,
    pub wmax: i64,
    pub pmax: i64,
    pub cap_ratio: f64,
    pub seed: u64,
}

/// A quadratic knapsack problem: maximize `Σ_{i,j} p_ij x_i x_j`
/// subject to `Σ_i w_i x_i ≤ C`.
///
/// The objective counts every off-diagonal pair twice (`p_ij` and `p_ji`).
#[derive(Debug, Clone)]
pub struct QkpInstance {
    name: String,
    n: usize,
    /// Full symmetric `n × n` profit matrix, row-major.
    profits: Vec<i64>,
    weights: Vec<i64>,
    capacity: i64,
    generator: Option<GeneratorParams>,
}

impl PartialEq for QkpInstance {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.n == other.n
            && self.profits == other.profits
            && self.weights == other.weights
            && self.capacity == other.capacity
    }
}

impl Eq for QkpInstance {}

impl QkpInstance {
    /// Validates and builds an instance from a full profit matrix (row-major).
    pub fn new(name: impl Into<String>, profits: Vec<i64>, weights: Vec<i64>, capacity: i64) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::validation("n", "instance must contain at least one item"));
        }
        if profits.len() != n * n {
            return Err(Error::validation(
                "profits",
                format!("expected {} entries for n = {n}, got {}", n * n, profits.len()),
            ));
        }
        for i in 0..n {
            for j in 0..n {
                let p = profits[i * n + j];
                if p < 0 {
                    return Err(Error::validation(
                        "profits",
                        format!("p[{}][{}] = {p} is negative", i + 1, j + 1),
                    ));
                }
                if p != profits[j * n + i] {
                    return Err(Error::validation(
                        "profits",
                        format!("matrix is not symmetric at ({}, {})", i + 1, j + 1),
                    ));
                }
            }
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, &w)| w < 1) {
            return Err(Error::validation(
                "weights",
                format!("w[{}] = {w} must be at least 1", i + 1),
            ));
        }
        if capacity < 1 {
            return Err(Error::validation(
                "capacity",
                format!("C = {capacity} must be at least 1"),
            ));
        }
        let instance = QkpInstance {
            name: name.into(),
            n,
            profits,
            weights,
            capacity,
            generator: None,
        };
        if instance.is_vacuous() {
            log::warn!(
                "instance {:?}: capacity {} admits every item (total weight {})",
                instance.name,
                instance.capacity,
                instance.total_weight()
            );
        }
        Ok(instance)
    }

    /// Builds an instance from the diagonal and the row-major strict upper triangle.
    pub fn from_triangle(
        name: impl Into<String>,
        diag: &[i64],
        upper: &[i64],
        weights: Vec<i64>,
        capacity: i64,
    ) -> Result<Self> {
        let n = diag.len();
        if weights.len() != n {
            return Err(Error::validation(
                "weights",
                format!("expected {n} weights, got {}", weights.len()),
            ));
        }
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::validation(
                "profits_upper",
                format!(
                    "expected {} entries for n = {n}, got {}",
                    n * n.saturating_sub(1) / 2,
                    upper.len()
                ),
            ));
        }
        let mut profits = vec![0i64; n * n];
        for (i, &p) in diag.iter().enumerate() {
            profits[i * n + i] = p;
        }
        let mut it = upper.iter();
        for i in 0..n {
            for j in i + 1..n {
                let p = *it.next().expect("length checked above");
                profits[i * n + j] = p;
                profits[j * n + i] = p;
            }
        }
        QkpInstance::new(name, profits, weights, capacity)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn profit(&self, i: usize, j: usize) -> i64 {
        self.profits[i * self.n + j]
    }

    pub fn profits(&self) -> &[i64] {
        &self.profits
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    pub fn generator(&self) -> Option<&GeneratorParams> {
        self.generator.as_ref()
    }

    pub fn total_weight(&self) -> i64 {
        self.weights.iter().sum()
    }

    pub fn max_profit(&self) -> i64 {
        self.profits.iter().copied().max().unwrap_or(0)
    }

    /// True when the capacity admits every item at once.
    pub fn is_vacuous(&self) -> bool {
        self.capacity >= self.total_weight()
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.profit(i, i)).collect()
    }

    /// Strict upper triangle, row-major.
    pub fn upper_triangle(&self) -> Vec<i64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.profit(i, j));
            }
        }
        out
    }

    /// Same problem with a different capacity.
    pub fn with_capacity(&self, capacity: i64) -> Result<Self> {
        let mut out = QkpInstance::new(self.name.clone(), self.profits.clone(), self.weights.clone(), capacity)?;
        out.generator = self.generator;
        Ok(out)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `Σ_{i,j} p_ij x_i x_j`.
    pub fn objective(&self, x: &BitVector) -> Result<i64> {
        Error::check_dim(self.n, x.len())?;
        let ones: Vec<usize> = x.ones_indices().collect();
        let mut total = 0i64;
        for &i in &ones {
            let row = &self.profits[i * self.n..(i + 1) * self.n];
            total += ones.iter().map(|&j| row[j]).sum::<i64>();
        }
        Ok(total)
    }

    /// `Σ_i w_i x_i`.
    pub fn weight(&self, x: &BitVector) -> Result<i64> {
        Error::check_dim(self.n, x.len())?;
        Ok(x.ones_indices().map(|i| self.weights[i]).sum())
    }

    pub fn is_feasible(&self, x: &BitVector) -> Result<bool> {
        Ok(self.weight(x)? <= self.capacity)
    }

    /// Objective if feasible, otherwise 0.
    pub fn feasible_value(&self, x: &BitVector) -> Result<i64> {
        if self.is_feasible(x)? {
            self.objective(x)
        } else {
            Ok(0)
        }
    }
}

/// Canonical text or JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceFormat {
    CanonicalText,
    Json,
}

impl InstanceFormat {
    /// Guesses from a file extension; anything other than `.json` is text.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => InstanceFormat::Json,
            _ => InstanceFormat::CanonicalText,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    name: String,
    n: usize,
    profits_diag: Vec<i64>,
    profits_upper: Vec<i64>,
    capacity: i64,
    weights: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GeneratorParams>,
}

pub fn parse_instance(text: &str, format: InstanceFormat) -> Result<QkpInstance> {
    match format {
        InstanceFormat::CanonicalText => parse_text(text),
        InstanceFormat::Json => parse_json(text),
    }
}

pub fn serialize_instance(instance: &QkpInstance, format: InstanceFormat) -> Result<String> {
    match format {
        InstanceFormat::CanonicalText => Ok(to_text(instance)),
        InstanceFormat::Json => {
            let wire = InstanceJson {
                name: instance.name.clone(),
                n: instance.n,
                profits_diag: instance.diagonal(),
                profits_upper: instance.upper_triangle(),
                capacity: instance.capacity,
                weights: instance.weights.clone(),
                generator: instance.generator,
            };
            Ok(serde_json::to_string_pretty(&wire)?)
        }
    }
}

fn parse_json(text: &str) -> Result<QkpInstance> {
    let wire: InstanceJson = serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    if wire.profits_diag.len() != wire.n {
        return Err(Error::validation(
            "profits_diag",
            format!("expected {} entries, got {}", wire.n, wire.profits_diag.len()),
        ));
    }
    let mut instance = QkpInstance::from_triangle(
        wire.name,
        &wire.profits_diag,
        &wire.profits_upper,
        wire.weights,
        wire.capacity,
    )?;
    instance.generator = wire.generator;
    Ok(instance)
}

fn to_text(instance: &QkpInstance) -> String {
    let join = |vals: &mut dyn Iterator<Item = i64>| vals.map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    let n = instance.n;
    let mut out = String::new();
    let _ = writeln!(out, "{}", instance.name);
    let _ = writeln!(out, "{n}");
    let _ = writeln!(out, "{}", join(&mut instance.diagonal().into_iter()));
    for i in 0..n.saturating_sub(1) {
        let _ = writeln!(out, "{}", join(&mut (i + 1..n).map(|j| instance.profit(i, j))));
    }
    let _ = writeln!(out, "{}", instance.capacity);
    let _ = writeln!(out, "{}", join(&mut instance.weights.iter().copied()));
    out
}

/// Non-blank lines with their 1-based line numbers.
struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines: Vec<_> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        let last_line = text.lines().count().max(1);
        Lines {
            lines,
            pos: 0,
            last_line,
        }
    }

    fn remaining(&self) -> usize {
        self.lines.len() - self.pos
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let item = self
            .lines
            .get(self.pos)
            .copied()
            .ok_or_else(|| Error::parse(self.last_line, format!("unexpected end of input, expected {what}")))?;
        self.pos += 1;
        Ok(item)
    }

    fn ints(&mut self, count: usize, what: &str) -> Result<Vec<i64>> {
        let (line, text) = self.next(what)?;
        let vals = text
            .split_whitespace()
            .map(|tok| {
                tok.parse::<i64>()
                    .map_err(|_| Error::parse(line, format!("{what}: {tok:?} is not an integer")))
            })
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != count {
            return Err(Error::parse(
                line,
                format!("{what}: expected {count} integers, found {}", vals.len()),
            ));
        }
        Ok(vals)
    }
}

fn parse_text(text: &str) -> Result<QkpInstance> {
    let mut lines = Lines::new(text);
    let (_, name) = lines.next("instance name")?;
    let n = lines.ints(1, "item count")?[0];
    if n < 1 {
        return Err(Error::validation("n", format!("item count {n} must be positive")));
    }
    let n = n as usize;
    let diag = lines.ints(n, "diagonal profits")?;
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 1..n {
        upper.extend(lines.ints(n - i, &format!("profit row {i}"))?);
    }
    // Published QKP files carry a constraint-type line ("0") before the capacity.
    if lines.remaining() == 3 {
        let (line, tag) = lines.next("constraint type")?;
        if tag != "0" {
            return Err(Error::parse(line, format!("unexpected line {tag:?} before capacity")));
        }
    }
    let capacity = lines.ints(1, "capacity")?[0];
    let weights = lines.ints(n, "weights")?;
    if lines.remaining() > 0 {
        let (line, _) = lines.next("end of input")?;
        return Err(Error::parse(line, "trailing content after weights"));
    }
    QkpInstance::from_triangle(name, &diag, &upper, weights, capacity)
}

/// Seeded random instance.
///
/// Weights are uniform on `[1, wmax]`, each diagonal profit uniform on
/// `[1, pmax]`, and each pair `i < j` is nonzero with probability `density`
/// (then uniform on `[1, pmax]`). The capacity is `max(1, round(cap_ratio · Σw))`.
pub fn generate_instance(params: GeneratorParams) -> Result<QkpInstance> {
    let GeneratorParams {
        n,
        density,
        wmax,
        pmax,
        cap_ratio,
        seed,
    } = params;
    if n < 2 {
        return Err(Error::validation("n", "generator needs at least 2 items"));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::validation("density", format!("{density} not in (0, 1]")));
    }
    if !(cap_ratio > 0.0 && cap_ratio < 1.0) {
        return Err(Error::validation("cap_ratio", format!("{cap_ratio} not in (0, 1)")));
    }
    if wmax < 1 {
        return Err(Error::validation("wmax", "must be positive"));
    }
    if pmax < 1 {
        return Err(Error::validation("pmax", "must be positive"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag: Vec<i64> = (0..n).map(|_| rng.random_range(1..=pmax)).collect();
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for _ in 0..n * (n - 1) / 2 {
        let p = if rng.random::<f64>() < density {
            rng.random_range(1..=pmax)
        } else {
            0
        };
        upper.push(p);
    }
    let weights: Vec<i64> = (0..n).map(|_| rng.random_range(1..=wmax)).collect();
    let total: i64 = weights.iter().sum();
    let capacity = ((cap_ratio * total as f64).round() as i64).max(1);

    let name = format!("gen_n{n}_s{seed}");
    let mut instance = QkpInstance::from_triangle(name, &diag, &upper, weights, capacity)?;
    instance.generator = Some(params);
    Ok(instance)
}

/// Result of exhaustive enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_value: i64,
    pub best_config: BitVector,
    pub feasible_count: u64,
}

/// Enumerates all `2^n` configurations in Gray-code order.
///
/// Ties on the objective resolve to the smallest integer encoding of `x`.
pub fn brute_force_oracle(instance: &QkpInstance) -> Result<OracleResult> {
    let n = instance.n;
    if n > ORACLE_MAX_ITEMS {
        return Err(Error::Capacity(format!(
            "exhaustive oracle is limited to {ORACLE_MAX_ITEMS} items (instance has {n}); \
             use the annealing solver with a provided best-known value"
        )));
    }
    let cap = instance.capacity;
    let mut x = vec![false; n];
    // field[k] = Σ_{j != k} p_kj x_j
    let mut field = vec![0i64; n];
    let mut objective = 0i64;
    let mut weight = 0i64;
    let mut code = 0u64;

    let mut best_value = 0i64;
    let mut best_code = 0u64;
    let mut feasible_count = 1u64;

    for step in 1u64..(1u64 << n) {
        let k = step.trailing_zeros() as usize;
        let gain = instance.profit(k, k) + 2 * field[k];
        let sign = if x[k] { -1 } else { 1 };
        x[k] = !x[k];
        objective += sign * gain;
        weight += sign * instance.weights[k];
        let row = &instance.profits[k * n..(k + 1) * n];
        for (j, f) in field.iter_mut().enumerate() {
            if j != k {
                *f += sign * row[j];
            }
        }
        code ^= 1 << k;
        if weight <= cap {
            feasible_count += 1;
            if objective > best_value || (objective == best_value && code < best_code) {
                best_value = objective;
                best_code = code;
            }
        }
    }

    Ok(OracleResult {
        best_value,
        best_config: BitVector::from_code(n, best_code),
        feasible_count,
    })
}
