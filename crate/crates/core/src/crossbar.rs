//! Bit-sliced crossbar evaluating `xᵀQx`.
//!
//! Each stored magnitude `|q_ij|` is split over binary planes; a cell in plane
//! `b` conducts one unit of current when its bit is set and both `x_i` and
//! `x_j` are 1. Plane currents are scaled by `2^b`, signed digitally, and the
//! offset is added after sensing. Matrices with both signs are held as a
//! positive and a negative array whose readings subtract.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::qubo::{quantization_info_for, MatrixLayout, QuboMatrix};

/// One single-signed bit-sliced array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossbarArray {
    sign: i64,
    /// `planes[b][row]` is a bitset over columns.
    planes: Vec<Vec<Vec<u64>>>,
}

impl CrossbarArray {
    pub fn sign(&self) -> i64 {
        self.sign
    }

    pub fn bits(&self) -> u32 {
        self.planes.len() as u32
    }

    /// Bit `b` of the magnitude stored at `(i, j)`.
    pub fn bit(&self, b: usize, i: usize, j: usize) -> bool {
        (self.planes[b][i][j / 64] >> (j % 64)) & 1 == 1
    }

    /// `Σ_b 2^b · plane_b(i, j)`.
    pub fn magnitude(&self, i: usize, j: usize) -> u64 {
        (0..self.planes.len())
            .filter(|&b| self.bit(b, i, j))
            .map(|b| 1u64 << b)
            .sum()
    }

    pub fn on_cells(&self) -> u64 {
        self.planes
            .iter()
            .flatten()
            .flatten()
            .map(|w| w.count_ones() as u64)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossbarModel {
    dim: usize,
    layout: MatrixLayout,
    bits: u32,
    arrays: Vec<CrossbarArray>,
    offset: i64,
    noise_sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReading {
    pub value: f64,
    pub exact_value: i64,
    pub activated_cells: u64,
}

fn bit_length(v: u64) -> u32 {
    (64 - v.leading_zeros()).max(1)
}

/// Programs `q` cell-for-cell.
pub fn program_crossbar(q: &QuboMatrix) -> CrossbarModel {
    program_crossbar_with(q, MatrixLayout::Symmetric)
}

/// Programs `q` in the given layout. The plane count is the smallest that
/// stores every magnitude exactly, which is never below the quantization bits.
pub fn program_crossbar_with(q: &QuboMatrix, layout: MatrixLayout) -> CrossbarModel {
    let dim = q.dim();
    let stored = |i: usize, j: usize| -> i64 {
        match layout {
            MatrixLayout::Symmetric => q.get(i, j),
            MatrixLayout::UpperTriangular if i == j => q.get(i, i),
            MatrixLayout::UpperTriangular if i < j => q.get(i, j) + q.get(j, i),
            MatrixLayout::UpperTriangular => 0,
        }
    };
    let max = quantization_info_for(q, layout).max_abs_element;
    let bits = bit_length(max);
    let words = dim.div_ceil(64).max(1);

    let has_pos = (0..dim).any(|i| (0..dim).any(|j| stored(i, j) > 0));
    let has_neg = (0..dim).any(|i| (0..dim).any(|j| stored(i, j) < 0));
    let mut signs = Vec::new();
    if has_neg {
        signs.push(-1);
    }
    if has_pos || !has_neg {
        signs.push(1);
    }

    let arrays = signs
        .into_iter()
        .map(|sign| {
            let mut planes = vec![vec![vec![0u64; words]; dim]; bits as usize];
            for i in 0..dim {
                for j in 0..dim {
                    let v = stored(i, j);
                    if v.signum() != sign {
                        continue;
                    }
                    let mag = v.unsigned_abs();
                    for (b, plane) in planes.iter_mut().enumerate() {
                        if (mag >> b) & 1 == 1 {
                            plane[i][j / 64] |= 1 << (j % 64);
                        }
                    }
                }
            }
            CrossbarArray { sign, planes }
        })
        .collect();

    CrossbarModel {
        dim,
        layout,
        bits,
        arrays,
        offset: q.offset(),
        noise_sigma: 0.0,
    }
}

impl CrossbarModel {
    pub fn with_noise(mut self, noise_sigma: f64) -> Self {
        self.noise_sigma = noise_sigma;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn layout(&self) -> MatrixLayout {
        self.layout
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn arrays(&self) -> &[CrossbarArray] {
        &self.arrays
    }

    /// Global sign for single-signed models, `None` when split.
    pub fn sign(&self) -> Option<i64> {
        match self.arrays.as_slice() {
            [one] => Some(one.sign),
            _ => None,
        }
    }

    /// Signed value stored for `(i, j)` in this model's layout.
    pub fn stored_value(&self, i: usize, j: usize) -> i64 {
        self.arrays.iter().map(|a| a.sign * a.magnitude(i, j) as i64).sum()
    }

    pub fn on_cells(&self) -> u64 {
        self.arrays.iter().map(|a| a.on_cells()).sum()
    }

    pub fn is_noisy(&self) -> bool {
        self.noise_sigma > 0.0
    }

    /// Reads `xᵀQx + offset`. Noise, when configured and `rng` is given,
    /// perturbs every conducting cell's unit current by `N(0, σ²)`; the sum of
    /// `k` such cells on a line is drawn as `N(k, kσ²)`.
    pub fn read<R: Rng + ?Sized>(&self, x: &BitVector, mut rng: Option<&mut R>) -> Result<EnergyReading> {
        Error::check_dim(self.dim, x.len())?;
        let active: Vec<usize> = x.ones_indices().collect();
        let xw = x.to_words();
        let noisy = self.noise_sigma > 0.0 && rng.is_some();
        let mut exact: i64 = 0;
        let mut value = 0.0;
        let mut activated = 0u64;
        for array in &self.arrays {
            for (b, plane) in array.planes.iter().enumerate() {
                let scale = 1i64 << b;
                let mut plane_cells = 0u64;
                let mut plane_current = 0.0;
                for &i in &active {
                    let k: u64 = plane[i]
                        .iter()
                        .zip(&xw)
                        .map(|(row, xv)| (row & xv).count_ones() as u64)
                        .sum();
                    plane_cells += k;
                    if noisy && k > 0 {
                        let z: f64 = rng.as_deref_mut().expect("checked").sample(StandardNormal);
                        plane_current += k as f64 + self.noise_sigma * (k as f64).sqrt() * z;
                    }
                }
                activated += plane_cells;
                exact += array.sign * scale * plane_cells as i64;
                if noisy {
                    value += (array.sign * scale) as f64 * plane_current;
                }
            }
        }
        exact += self.offset;
        let value = if noisy {
            value + self.offset as f64
        } else {
            exact as f64
        };
        Ok(EnergyReading {
            value,
            exact_value: exact,
            activated_cells: activated,
        })
    }

    /// Noise stream seeded by `seed` (0 if absent) when configured.
    pub fn read_seeded(&self, x: &BitVector, seed: Option<u64>) -> Result<EnergyReading> {
        if self.is_noisy() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
            self.read(x, Some(&mut rng))
        } else {
            self.read::<ChaCha8Rng>(x, None)
        }
    }
}

pub fn vmv_energy(model: &CrossbarModel, x: &BitVector, seed: Option<u64>) -> Result<EnergyReading> {
    model.read_seeded(x, seed)
}

/// Summed current with the first `k` programmed cells active.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearityPoint {
    pub k: u64,
    pub mean: f64,
    pub stddev: f64,
}

/// Activates `k = 0..=max_cells` ON cells in a fixed row-major order and
/// reports the summed unit current over `repetitions` independent draws of
/// the per-cell perturbations.
pub fn linearity_sweep(
    model: &CrossbarModel,
    max_cells: u64,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<LinearityPoint>> {
    let total = model.on_cells();
    if max_cells > total {
        return Err(Error::Capacity(format!(
            "requested {max_cells} active cells but only {total} are programmed ON"
        )));
    }
    let reps = repetitions.max(1);
    let mut sums = vec![vec![0.0f64; reps]; max_cells as usize + 1];
    for (r, _) in (0..reps).enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(crate::seed::derive(seed, &[r as u64]));
        let mut acc = 0.0;
        for row in sums.iter_mut().skip(1) {
            let eta: f64 = if model.noise_sigma > 0.0 {
                model.noise_sigma * rng.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            };
            acc += 1.0 + eta;
            row[r] = acc;
        }
    }
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(k, vals)| {
            let mean = vals.iter().sum::<f64>() / reps as f64;
            let var = if reps > 1 {
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64
            } else {
                0.0
            };
            LinearityPoint {
                k: k as u64,
                mean,
                stddev: var.sqrt(),
            }
        })
        .collect())
}

/// Least-squares slope of `mean` against `k`.
pub fn fit_slope(points: &[LinearityPoint]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.k as f64).sum::<f64>() / n;
    let my = points.iter().map(|p| p.mean).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.k as f64 - mx) * (p.mean - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.k as f64 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> QuboMatrix {
        QuboMatrix::from_dense(2, vec![-5, -2, -2, -3], 0).unwrap()
    }

    #[test]
    fn single_signed_programming() {
        let m = program_crossbar(&small());
        assert_eq!(m.sign(), Some(-1));
        assert_eq!(m.bits(), 3);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m.stored_value(i, j), small().get(i, j));
            }
        }
        let r = m.read_seeded(&BitVector::ones(2), None).unwrap();
        assert_eq!(r.exact_value, -12);
        assert_eq!(r.value, -12.0);
    }

    #[test]
    fn zero_matrix_has_one_empty_plane() {
        let m = program_crossbar(&QuboMatrix::zeros(3));
        assert_eq!(m.bits(), 1);
        assert_eq!(m.on_cells(), 0);
        assert_eq!(m.sign(), Some(1));
    }

    #[test]
    fn all_zero_input_reads_offset() {
        let q = QuboMatrix::from_dense(2, vec![1, -4, -4, 7], 11).unwrap();
        let m = program_crossbar(&q);
        assert_eq!(m.sign(), None);
        let r = m.read_seeded(&BitVector::zeros(2), None).unwrap();
        assert_eq!(r.exact_value, 11);
        assert_eq!(r.activated_cells, 0);
    }

    #[test]
    fn triangular_layout_reads_the_same_energy() {
        let q = QuboMatrix::from_dense(3, vec![1, -4, 2, -4, 7, 0, 2, 0, -3], -1).unwrap();
        let sym = program_crossbar(&q);
        let tri = program_crossbar_with(&q, MatrixLayout::UpperTriangular);
        assert_eq!(tri.stored_value(0, 1), -8);
        assert_eq!(tri.stored_value(1, 0), 0);
        for code in 0..8 {
            let x = BitVector::from_code(3, code);
            let direct = q.energy(&x).unwrap();
            assert_eq!(sym.read_seeded(&x, None).unwrap().exact_value, direct);
            assert_eq!(tri.read_seeded(&x, None).unwrap().exact_value, direct);
        }
    }

    #[test]
    fn power_of_two_magnitudes_fit() {
        let q = QuboMatrix::from_dense(1, vec![-64], 0).unwrap();
        let m = program_crossbar(&q);
        assert_eq!(m.bits(), 7);
        assert_eq!(m.read_seeded(&BitVector::ones(1), None).unwrap().exact_value, -64);
    }

    #[test]
    fn linearity_noiseless() {
        let q = QuboMatrix::from_dense(32, vec![1; 1024], 0).unwrap();
        let m = program_crossbar(&q);
        let pts = linearity_sweep(&m, 32, 1, 0).unwrap();
        assert_eq!(pts[0].mean, 0.0);
        assert_eq!(pts[32].mean, 32.0);
        assert!((fit_slope(&pts) - 1.0).abs() < 1e-12);
        assert!(linearity_sweep(&m, 1025, 1, 0).is_err());
    }
}
