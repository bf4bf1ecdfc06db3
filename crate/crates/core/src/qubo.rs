//! QUBO matrices and the two knapsack formulations: the inequality-gated form
//! and the one-hot penalty (D-QUBO) baseline. Also the spin/binary conversion
//! and quantization bookkeeping.

use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::qkp::QkpInstance;

/// Refuse to materialize dense penalty matrices beyond this dimension.
pub const DQUBO_MAX_DIM: usize = 16_384;

/// Symmetric integer matrix `Q` with an energy offset; the modeled energy is
/// `xᵀQx + offset`. Linear coefficients live on the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuboMatrix {
    dim: usize,
    q: Vec<i64>,
    offset: i64,
}

impl QuboMatrix {
    pub fn zeros(dim: usize) -> Self {
        QuboMatrix {
            dim,
            q: vec![0; dim * dim],
            offset: 0,
        }
    }

    /// Builds from a row-major dense array, rejecting asymmetric input.
    pub fn from_dense(dim: usize, q: Vec<i64>, offset: i64) -> Result<Self> {
        if q.len() != dim * dim {
            return Err(Error::validation(
                "q",
                format!("expected {} entries, got {}", dim * dim, q.len()),
            ));
        }
        for i in 0..dim {
            for j in i + 1..dim {
                if q[i * dim + j] != q[j * dim + i] {
                    return Err(Error::validation("q", format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(QuboMatrix { dim, q, offset })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.q[i * self.dim + j]
    }

    pub fn entries(&self) -> &[i64] {
        &self.q
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.q[i * self.dim..(i + 1) * self.dim]
    }

    /// Adds `v` to `(i, j)` and, off the diagonal, to `(j, i)`.
    fn add_sym(&mut self, i: usize, j: usize, v: i64) -> Result<()> {
        let dim = self.dim;
        let bump = |slot: &mut i64| {
            *slot = slot
                .checked_add(v)
                .ok_or_else(|| Error::Overflow(format!("matrix entry ({i}, {j}) exceeds 64 bits")))?;
            Ok::<_, Error>(())
        };
        bump(&mut self.q[i * dim + j])?;
        if i != j {
            bump(&mut self.q[j * dim + i])?;
        }
        Ok(())
    }

    fn add_offset(&mut self, v: i64) -> Result<()> {
        self.offset = self
            .offset
            .checked_add(v)
            .ok_or_else(|| Error::Overflow("offset exceeds 64 bits".into()))?;
        Ok(())
    }

    /// `xᵀQx` without the offset.
    pub fn quadratic_form(&self, x: &BitVector) -> Result<i64> {
        Error::check_dim(self.dim, x.len())?;
        let ones: Vec<usize> = x.ones_indices().collect();
        let mut total = 0i64;
        for &i in &ones {
            let row = self.row(i);
            total += ones.iter().map(|&j| row[j]).sum::<i64>();
        }
        Ok(total)
    }

    /// `xᵀQx + offset`.
    pub fn energy(&self, x: &BitVector) -> Result<i64> {
        Ok(self.quadratic_form(x)? + self.offset)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn max_abs_entry(&self) -> u64 {
        self.q.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn nonzero_count(&self) -> usize {
        self.q.iter().filter(|&&v| v != 0).count()
    }
}

/// How a matrix is laid out on hardware cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixLayout {
    /// Every `q_ij` in its own cell; off-diagonal pairs appear twice.
    Symmetric,
    /// One cell per monomial: `q_ii` on the diagonal, `q_ij + q_ji` above it.
    UpperTriangular,
}

/// Precision needed to store the largest matrix element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizationInfo {
    pub max_abs_element: u64,
    pub bits: u32,
}

impl QuantizationInfo {
    /// `bits = ⌈log2 max⌉`, floored at 1.
    pub fn from_max(max_abs_element: u64) -> Self {
        let bits = if max_abs_element <= 1 {
            1
        } else {
            64 - (max_abs_element - 1).leading_zeros()
        };
        QuantizationInfo { max_abs_element, bits }
    }
}

/// Largest `|q_ij|` over all stored entries (offset excluded).
pub fn quantization_info(q: &QuboMatrix) -> QuantizationInfo {
    QuantizationInfo::from_max(q.max_abs_entry())
}

pub fn quantization_info_for(q: &QuboMatrix, layout: MatrixLayout) -> QuantizationInfo {
    match layout {
        MatrixLayout::Symmetric => quantization_info(q),
        MatrixLayout::UpperTriangular => {
            let n = q.dim();
            let mut max = 0u64;
            for i in 0..n {
                max = max.max(q.get(i, i).unsigned_abs());
                for j in i + 1..n {
                    let folded = q.get(i, j) as i128 + q.get(j, i) as i128;
                    max = max.max(folded.unsigned_abs().min(u64::MAX as u128) as u64);
                }
            }
            QuantizationInfo::from_max(max)
        }
    }
}

/// Spin model `H(σ) = Σ_{i,j} J_ij σ_i σ_j + Σ_i h_i σ_i + offset`, with the
/// double sum running over both orderings of each pair.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub n: usize,
    /// Row-major symmetric couplings with zero diagonal.
    pub couplings: Vec<f64>,
    pub fields: Vec<f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn new(n: usize, couplings: Vec<f64>, fields: Vec<f64>, offset: f64) -> Result<Self> {
        if couplings.len() != n * n {
            return Err(Error::validation("couplings", "expected an n×n matrix"));
        }
        if fields.len() != n {
            return Err(Error::validation("fields", "expected n entries"));
        }
        for i in 0..n {
            if couplings[i * n + i] != 0.0 {
                return Err(Error::validation("couplings", format!("J[{i}][{i}] must be zero")));
            }
            for j in i + 1..n {
                if couplings[i * n + j] != couplings[j * n + i] {
                    return Err(Error::validation("couplings", format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(IsingModel {
            n,
            couplings,
            fields,
            offset,
        })
    }

    #[inline]
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.n + j]
    }

    /// Energy at spins `σ_i = 1 - 2 x_i`.
    pub fn energy_at_bits(&self, x: &BitVector) -> Result<f64> {
        Error::check_dim(self.n, x.len())?;
        let spin = |i: usize| if x.get(i) { -1.0 } else { 1.0 };
        let mut h = self.offset;
        for i in 0..self.n {
            let si = spin(i);
            h += self.fields[i] * si;
            for j in 0..self.n {
                h += self.coupling(i, j) * si * spin(j);
            }
        }
        Ok(h)
    }
}

/// Substitutes `σ = 1 - 2x`. Fails if a resulting coefficient is not integral.
pub fn ising_to_qubo(m: &IsingModel) -> Result<QuboMatrix> {
    let n = m.n;
    let integral = |v: f64, what: &'static str| -> Result<i64> {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            Ok(v as i64)
        } else {
            Err(Error::validation(what, format!("coefficient {v} is not an integer")))
        }
    };
    let mut q = vec![0i64; n * n];
    let mut offset = m.offset;
    for i in 0..n {
        let row_sum: f64 = (0..n).map(|j| m.coupling(i, j)).sum();
        for j in 0..n {
            if i != j {
                q[i * n + j] = integral(4.0 * m.coupling(i, j), "couplings")?;
            }
        }
        q[i * n + i] = integral(-4.0 * row_sum - 2.0 * m.fields[i], "fields")?;
        offset += row_sum + m.fields[i];
    }
    QuboMatrix::from_dense(n, q, integral(offset, "offset")?)
}

/// Substitutes `x = (1 - σ) / 2`.
pub fn qubo_to_ising(q: &QuboMatrix) -> IsingModel {
    let n = q.dim();
    let mut couplings = vec![0.0; n * n];
    let mut fields = vec![0.0; n];
    let mut offset = q.offset() as f64;
    for i in 0..n {
        let mut off_row = 0.0;
        for j in 0..n {
            if i != j {
                let v = q.get(i, j) as f64;
                couplings[i * n + j] = v / 4.0;
                off_row += v;
            }
        }
        fields[i] = -(q.get(i, i) as f64 + off_row) / 2.0;
    }
    for i in 0..n {
        offset -= fields[i];
        for j in 0..n {
            offset -= couplings[i * n + j];
        }
    }
    IsingModel {
        n,
        couplings,
        fields,
        offset,
    }
}

/// `E(x) = [Σ w_i x_i ≤ C] · xᵀQx` with `Q = -P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityQuboModel {
    pub qubo: QuboMatrix,
    pub weights: Vec<i64>,
    pub capacity: i64,
}

impl InequalityQuboModel {
    pub fn n(&self) -> usize {
        self.qubo.dim()
    }

    pub fn weight(&self, x: &BitVector) -> Result<i64> {
        Error::check_dim(self.weights.len(), x.len())?;
        Ok(x.ones_indices().map(|i| self.weights[i]).sum())
    }

    pub fn constrained_energy(&self, x: &BitVector) -> Result<i64> {
        if self.weight(x)? <= self.capacity {
            self.qubo.quadratic_form(x)
        } else {
            Ok(0)
        }
    }

    /// The profit matrix is stored cell-for-cell.
    pub fn quantization(&self) -> QuantizationInfo {
        quantization_info_for(&self.qubo, MatrixLayout::Symmetric)
    }
}

pub fn build_inequality_qubo(instance: &QkpInstance) -> InequalityQuboModel {
    let n = instance.n();
    let q = instance.profits().iter().map(|&p| -p).collect();
    InequalityQuboModel {
        qubo: QuboMatrix { dim: n, q, offset: 0 },
        weights: instance.weights().to_vec(),
        capacity: instance.capacity(),
    }
}

pub fn constrained_energy(model: &InequalityQuboModel, x: &BitVector) -> Result<i64> {
    model.constrained_energy(x)
}

/// Penalty formulation over `(x_1..x_n, y_1..y_C)`:
/// `-Σ p_ij x_i x_j + α(Σ_k y_k - 1)² + β(Σ_i w_i x_i - Σ_k k y_k)²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DQuboModel {
    pub qubo: QuboMatrix,
    pub alpha: i64,
    pub beta: i64,
    pub n: usize,
    pub capacity: i64,
    pub weights: Vec<i64>,
}

pub const DEFAULT_ALPHA: i64 = 2;
pub const DEFAULT_BETA: i64 = 2;

impl DQuboModel {
    pub fn dim(&self) -> usize {
        self.qubo.dim()
    }

    /// Number of auxiliary one-hot variables, equal to `C`.
    pub fn aux_count(&self) -> usize {
        self.dim() - self.n
    }

    /// Matrix energy including the offset.
    pub fn energy(&self, z: &BitVector) -> Result<i64> {
        self.qubo.energy(z)
    }

    /// Splits `z` into the item part and the auxiliary part.
    pub fn split(&self, z: &BitVector) -> Result<(BitVector, BitVector)> {
        Error::check_dim(self.dim(), z.len())?;
        let x = z.prefix(self.n);
        let y: BitVector = z.as_slice()[self.n..].iter().copied().collect();
        Ok((x, y))
    }

    /// `α(Σy - 1)² + β(Σwx - Σky)²` evaluated directly.
    pub fn penalty(&self, z: &BitVector) -> Result<i64> {
        let (x, y) = self.split(z)?;
        let sx: i64 = x.ones_indices().map(|i| self.weights[i]).sum();
        let count = y.count_ones() as i64;
        let sy: i64 = y.ones_indices().map(|k| k as i64 + 1).sum();
        Ok(self.alpha * (count - 1).pow(2) + self.beta * (sx - sy).pow(2))
    }

    pub fn is_x_feasible(&self, z: &BitVector) -> Result<bool> {
        Error::check_dim(self.dim(), z.len())?;
        let sx: i64 = (0..self.n).filter(|&i| z.get(i)).map(|i| self.weights[i]).sum();
        Ok(sx <= self.capacity)
    }

    /// The penalty polynomial is stored one cell per monomial.
    pub fn quantization(&self) -> QuantizationInfo {
        quantization_info_for(&self.qubo, MatrixLayout::UpperTriangular)
    }
}

pub fn build_dqubo(instance: &QkpInstance, alpha: i64, beta: i64) -> Result<DQuboModel> {
    if alpha < 1 {
        return Err(Error::validation("alpha", "must be at least 1"));
    }
    if beta < 1 {
        return Err(Error::validation("beta", "must be at least 1"));
    }
    let n = instance.n();
    let c = instance.capacity();
    let aux = usize::try_from(c).map_err(|_| Error::Overflow("capacity".into()))?;
    let dim = n + aux;
    if dim > DQUBO_MAX_DIM {
        return Err(Error::Capacity(format!(
            "penalty QUBO dimension {dim} exceeds the dense limit of {DQUBO_MAX_DIM}"
        )));
    }
    let overflow = |what: &str| Error::Overflow(format!("{what} does not fit in 64 bits"));
    let mul = |a: i64, b: i64, what: &str| a.checked_mul(b).ok_or_else(|| overflow(what));
    let w = instance.weights();
    let y = |k: usize| n + k - 1;

    let mut m = QuboMatrix::zeros(dim);

    // objective: -Σ p_ij x_i x_j
    for i in 0..n {
        for j in i..n {
            let p = instance.profit(i, j);
            if p != 0 {
                m.add_sym(i, j, -p)?;
            }
        }
    }

    // α(Σy - 1)² = α Σ_k Σ_l y_k y_l - 2α Σ_k y_k + α, with y_k² = y_k
    for k in 1..=aux {
        m.add_sym(y(k), y(k), alpha - 2 * alpha)?;
        for l in k + 1..=aux {
            m.add_sym(y(k), y(l), alpha)?;
        }
    }
    m.add_offset(alpha)?;

    // β(Σwx)²
    for i in 0..n {
        for j in i..n {
            m.add_sym(i, j, mul(beta, mul(w[i], w[j], "w_i w_j")?, "β w_i w_j")?)?;
        }
    }
    // β(Σky)²
    for k in 1..=aux {
        let kk = k as i64;
        for l in k..=aux {
            m.add_sym(y(k), y(l), mul(beta, mul(kk, l as i64, "k l")?, "β k l")?)?;
        }
    }
    // -2β(Σwx)(Σky): each ordered cell (x_i, y_k) and (y_k, x_i) carries -β w_i k
    for (i, &wi) in w.iter().enumerate() {
        for k in 1..=aux {
            m.add_sym(i, y(k), -mul(beta, mul(wi, k as i64, "w_i k")?, "β w_i k")?)?;
        }
    }

    Ok(DQuboModel {
        qubo: m,
        alpha,
        beta,
        n,
        capacity: c,
        weights: w.to_vec(),
    })
}

/// Which formulation a serialized matrix encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuboMode {
    Inequality,
    Dqubo,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "encoding", content = "entries", rename_all = "lowercase")]
pub enum QuboEntries {
    /// Row-major rows of the full matrix.
    Dense(Vec<Vec<i64>>),
    /// `(i, j, value)` for nonzero entries with `i ≤ j`; the lower triangle mirrors it.
    Sparse(Vec<(usize, usize, i64)>),
}

/// Wire form of a QUBO together with the side-car data of its formulation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuboDocument {
    pub mode: QuboMode,
    pub dim: usize,
    pub offset: i64,
    #[serde(flatten)]
    pub entries: QuboEntries,
    pub n: usize,
    pub weights: Vec<i64>,
    pub capacity: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<i64>,
}

/// Dense encoding is used at or above this fraction of nonzero entries.
pub const DENSE_THRESHOLD: f64 = 0.25;

fn encode_entries(q: &QuboMatrix) -> QuboEntries {
    let dim = q.dim();
    let density = if dim == 0 {
        1.0
    } else {
        q.nonzero_count() as f64 / (dim * dim) as f64
    };
    if density >= DENSE_THRESHOLD {
        QuboEntries::Dense((0..dim).map(|i| q.row(i).to_vec()).collect())
    } else {
        let mut triples = Vec::new();
        for i in 0..dim {
            for j in i..dim {
                let v = q.get(i, j);
                if v != 0 {
                    triples.push((i, j, v));
                }
            }
        }
        QuboEntries::Sparse(triples)
    }
}

impl QuboDocument {
    pub fn from_inequality(model: &InequalityQuboModel) -> Self {
        QuboDocument {
            mode: QuboMode::Inequality,
            dim: model.qubo.dim(),
            offset: model.qubo.offset(),
            entries: encode_entries(&model.qubo),
            n: model.n(),
            weights: model.weights.clone(),
            capacity: model.capacity,
            alpha: None,
            beta: None,
        }
    }

    pub fn from_dqubo(model: &DQuboModel) -> Self {
        QuboDocument {
            mode: QuboMode::Dqubo,
            dim: model.dim(),
            offset: model.qubo.offset(),
            entries: encode_entries(&model.qubo),
            n: model.n,
            weights: model.weights.clone(),
            capacity: model.capacity,
            alpha: Some(model.alpha),
            beta: Some(model.beta),
        }
    }

    pub fn to_matrix(&self) -> Result<QuboMatrix> {
        let dim = self.dim;
        match &self.entries {
            QuboEntries::Dense(rows) => {
                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                    return Err(Error::validation("entries", "dense rows do not match dim"));
                }
                QuboMatrix::from_dense(dim, rows.concat(), self.offset)
            }
            QuboEntries::Sparse(triples) => {
                let mut q = vec![0i64; dim * dim];
                for &(i, j, v) in triples {
                    if i > j || j >= dim {
                        return Err(Error::validation(
                            "entries",
                            format!("sparse entry ({i}, {j}) outside the upper triangle"),
                        ));
                    }
                    q[i * dim + j] = v;
                    q[j * dim + i] = v;
                }
                QuboMatrix::from_dense(dim, q, self.offset)
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_item() -> QkpInstance {
        QkpInstance::from_triangle("two", &[5, 3], &[2], vec![1, 1], 2).unwrap()
    }

    #[test]
    fn inequality_qubo_negates_profits() {
        let model = build_inequality_qubo(&two_item());
        assert_eq!(model.qubo.entries(), &[-5, -2, -2, -3]);
        assert_eq!(model.qubo.offset(), 0);
        let ones = BitVector::ones(2);
        assert_eq!(model.qubo.quadratic_form(&ones).unwrap(), -12);
        assert_eq!(model.constrained_energy(&ones).unwrap(), -12);
        assert_eq!(model.constrained_energy(&BitVector::zeros(2)).unwrap(), 0);
        let tight = QkpInstance::from_triangle("two", &[5, 3], &[2], vec![1, 1], 1).unwrap();
        let model = build_inequality_qubo(&tight);
        assert_eq!(model.constrained_energy(&ones).unwrap(), 0);
        assert!(model.constrained_energy(&BitVector::zeros(3)).is_err());
    }

    #[test]
    fn quantization_bits() {
        assert_eq!(QuantizationInfo::from_max(0).bits, 1);
        assert_eq!(QuantizationInfo::from_max(1).bits, 1);
        assert_eq!(QuantizationInfo::from_max(2).bits, 1);
        assert_eq!(QuantizationInfo::from_max(5).bits, 3);
        assert_eq!(QuantizationInfo::from_max(64).bits, 6);
        assert_eq!(QuantizationInfo::from_max(100).bits, 7);
        assert_eq!(QuantizationInfo::from_max(40_000).bits, 16);
        assert_eq!(quantization_info(&QuboMatrix::zeros(4)).bits, 1);
    }

    #[test]
    fn triangular_layout_folds_pairs() {
        let q = QuboMatrix::from_dense(2, vec![-5, -2, -2, -3], 0).unwrap();
        assert_eq!(quantization_info_for(&q, MatrixLayout::Symmetric).max_abs_element, 5);
        assert_eq!(
            quantization_info_for(&q, MatrixLayout::UpperTriangular).max_abs_element,
            5
        );
        let q = QuboMatrix::from_dense(2, vec![1, -4, -4, 1], 0).unwrap();
        assert_eq!(
            quantization_info_for(&q, MatrixLayout::UpperTriangular).max_abs_element,
            8
        );
    }

    #[test]
    fn dqubo_shape_and_offset() {
        let inst = QkpInstance::from_triangle("t", &[1, 1], &[0], vec![1, 1], 2).unwrap();
        let model = build_dqubo(&inst, 2, 2).unwrap();
        assert_eq!(model.dim(), 4);
        assert_eq!(model.qubo.offset(), 2);
        assert!(model.qubo.is_symmetric());
        // y_2 diagonal: -α + β·2²
        assert_eq!(model.qubo.get(3, 3), -2 + 8);
    }

    #[test]
    fn dqubo_rejects_bad_coefficients() {
        assert!(build_dqubo(&two_item(), 0, 2).is_err());
        assert!(build_dqubo(&two_item(), 2, 0).is_err());
    }

    #[test]
    fn dqubo_overflow_is_an_error() {
        let inst = QkpInstance::from_triangle("big", &[1, 1], &[0], vec![1 << 40, 1 << 40], 1).unwrap();
        assert!(matches!(build_dqubo(&inst, 2, 2), Err(Error::Overflow(_))));
    }

    #[test]
    fn single_spin_substitution() {
        let m = IsingModel::new(1, vec![0.0], vec![1.0], 0.0).unwrap();
        let q = ising_to_qubo(&m).unwrap();
        assert_eq!(q.get(0, 0), -2);
        assert_eq!(q.offset(), 1);
    }

    #[test]
    fn two_spin_energies_match() {
        let m = IsingModel::new(2, vec![0.0, 1.0, 1.0, 0.0], vec![0.0, 0.0], 0.0).unwrap();
        let q = ising_to_qubo(&m).unwrap();
        // H = 2 σ1 σ2 over all four assignments
        for code in 0..4 {
            let x = BitVector::from_code(2, code);
            let s1 = if x.get(0) { -1.0 } else { 1.0 };
            let s2 = if x.get(1) { -1.0 } else { 1.0 };
            assert_eq!(q.energy(&x).unwrap() as f64, 2.0 * s1 * s2);
            assert_eq!(m.energy_at_bits(&x).unwrap(), 2.0 * s1 * s2);
        }
        assert_eq!(qubo_to_ising(&q), m);
    }

    #[test]
    fn non_integral_ising_is_rejected() {
        let m = IsingModel::new(1, vec![0.0], vec![0.25], 0.0).unwrap();
        assert!(ising_to_qubo(&m).is_err());
    }

    #[test]
    fn document_round_trip_dense_and_sparse() {
        let inst = two_item();
        let ineq = build_inequality_qubo(&inst);
        let doc = QuboDocument::from_inequality(&ineq);
        assert!(matches!(doc.entries, QuboEntries::Dense(_)));
        let back = QuboDocument::from_json(&doc.to_json().unwrap()).unwrap();
        assert_eq!(back.to_matrix().unwrap(), ineq.qubo);

        let mut q = QuboMatrix::zeros(8);
        q.add_sym(1, 5, -3).unwrap();
        q.add_sym(2, 2, 4).unwrap();
        let m = InequalityQuboModel {
            qubo: q.clone(),
            weights: vec![1; 8],
            capacity: 3,
        };
        let doc = QuboDocument::from_inequality(&m);
        assert!(matches!(doc.entries, QuboEntries::Sparse(ref t) if t.len() == 2));
        let json = doc.to_json().unwrap();
        assert!(json.contains("\"encoding\":\"sparse\""));
        assert_eq!(QuboDocument::from_json(&json).unwrap().to_matrix().unwrap(), q);
    }
}
