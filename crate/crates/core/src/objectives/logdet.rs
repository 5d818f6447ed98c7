use std::collections::HashMap;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{unknown, ValueOracle};
use crate::{Element, ElementId, Error, Result};

/// Determinants below this value are treated as singular and clamped.
pub const DET_FLOOR: f64 = 1e-300;

const SYMMETRY_TOL: f64 = 1e-9;
const EIGEN_TOL: f64 = -1e-8;

/// A symmetric positive semidefinite DPP kernel `L` indexed by element id.
#[derive(Debug, Clone)]
pub struct DppKernel {
    n: usize,
    data: Vec<f64>,
    index: HashMap<ElementId, usize>,
    ids: Vec<ElementId>,
}

/// Result of a log-determinant computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDetValue {
    pub value: f64,
    /// The submatrix was numerically singular and `value` was clamped to
    /// `ln(DET_FLOOR)`.
    pub clamped: bool,
}

impl DppKernel {
    /// Builds a kernel whose row `i` belongs to element id `i`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let ids = (0..rows.len() as ElementId).collect();
        Self::with_ids(rows, ids)
    }

    pub fn with_ids(rows: Vec<Vec<f64>>, ids: Vec<ElementId>) -> Result<Self> {
        let n = rows.len();
        if ids.len() != n {
            return Err(Error::config(format!("{} ids for a {n}x{n} kernel", ids.len())));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::config(format!(
                    "kernel row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        let index: HashMap<ElementId, usize> =
            ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        if index.len() != n {
            return Err(Error::config("duplicate ids in kernel index"));
        }
        let kernel = DppKernel { n, data, index, ids };
        kernel.validate()?;
        Ok(kernel)
    }

    /// Reads a dense matrix file: the first line holds `n`, followed by `n`
    /// rows of `n` whitespace-separated reals.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty kernel file"))?;
        let n: usize = header
            .parse()
            .map_err(|_| Error::parse(line_no, format!("expected matrix size, got {header:?}")))?;
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let (line_no, line) = lines
                .next()
                .ok_or_else(|| Error::parse(line_no + rows.len() + 1, "missing kernel row"))?;
            let row = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|_| Error::parse(line_no, format!("invalid number {tok:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != n {
                return Err(Error::parse(line_no, format!("expected {n} entries, got {}", row.len())));
            }
            rows.push(row);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::parse(line_no, "trailing data after kernel rows"));
        }
        Self::from_rows(rows)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..i {
                if (self.at(i, j) - self.at(j, i)).abs() > SYMMETRY_TOL {
                    return Err(Error::config(format!("kernel is not symmetric at ({i}, {j})")));
                }
            }
        }
        if self.n > 0 {
            let m = DMatrix::from_row_slice(self.n, self.n, &self.data);
            let min_eig = m
                .symmetric_eigenvalues()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            if min_eig < EIGEN_TOL {
                return Err(Error::config(format!(
                    "kernel is not positive semidefinite (smallest eigenvalue {min_eig:e})"
                )));
            }
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn ids(&self) -> &[ElementId] {
        &self.ids
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn entry(&self, a: ElementId, b: ElementId) -> Result<f64> {
        Ok(self.at(self.position(a)?, self.position(b)?))
    }

    fn position(&self, id: ElementId) -> Result<usize> {
        self.index.get(&id).copied().ok_or_else(|| unknown(id, "kernel"))
    }

    /// `ln det(L_S)` via Cholesky factorization of the submatrix. The empty
    /// determinant is 1.
    pub fn log_det(&self, ids: &[ElementId]) -> Result<LogDetValue> {
        let rows = ids.iter().map(|&id| self.position(id)).collect::<Result<Vec<_>>>()?;
        Ok(cholesky_log_det(rows.len(), |i, j| self.at(rows[i], rows[j])))
    }

    /// `ln det(D + L_S)` where `D` is diagonal with entries `diag`.
    pub(crate) fn log_det_shifted(&self, ids: &[ElementId], diag: &[f64]) -> Result<LogDetValue> {
        let rows = ids.iter().map(|&id| self.position(id)).collect::<Result<Vec<_>>>()?;
        Ok(cholesky_log_det(rows.len(), |i, j| {
            let v = self.at(rows[i], rows[j]);
            if i == j {
                v + diag[i]
            } else {
                v
            }
        }))
    }
}

fn cholesky_log_det(n: usize, entry: impl Fn(usize, usize) -> f64) -> LogDetValue {
    let floor = DET_FLOOR.ln();
    let mut factor = vec![0.0; n * n];
    let mut total = 0.0;
    for j in 0..n {
        let mut pivot = entry(j, j);
        for k in 0..j {
            pivot -= factor[j * n + k] * factor[j * n + k];
        }
        if !(pivot > DET_FLOOR) {
            return LogDetValue {
                value: floor,
                clamped: true,
            };
        }
        let root = pivot.sqrt();
        factor[j * n + j] = root;
        total += pivot.ln();
        for i in j + 1..n {
            let mut v = entry(i, j);
            for k in 0..j {
                v -= factor[i * n + k] * factor[j * n + k];
            }
            factor[i * n + j] = v / root;
        }
    }
    if total < floor {
        LogDetValue {
            value: floor,
            clamped: true,
        }
    } else {
        LogDetValue {
            value: total,
            clamped: false,
        }
    }
}

/// `f(S) = ln det(L_S) + offset`, non-monotone submodular.
#[derive(Debug)]
pub struct LogDet {
    kernel: Arc<DppKernel>,
    offset: f64,
    clamped: AtomicBool,
}

impl LogDet {
    pub fn new(kernel: Arc<DppKernel>, offset: f64) -> Result<Self> {
        if !(offset >= 0.0) || !offset.is_finite() {
            return Err(Error::config(format!("log-det offset {offset} must be finite and >= 0")));
        }
        Ok(LogDet {
            kernel,
            offset,
            clamped: AtomicBool::new(false),
        })
    }

    pub fn kernel(&self) -> &DppKernel {
        &self.kernel
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Set once any evaluation hit a numerically singular submatrix.
    pub fn clamped(&self) -> bool {
        self.clamped.load(Ordering::Relaxed)
    }

    pub fn value_of_ids(&self, ids: &[ElementId]) -> Result<f64> {
        let v = self.kernel.log_det(ids)?;
        if v.clamped {
            self.clamped.store(true, Ordering::Relaxed);
        }
        Ok(v.value + self.offset)
    }
}

impl ValueOracle for LogDet {
    fn eval(&self, set: &[&Element]) -> Result<f64> {
        let ids: Vec<ElementId> = set.iter().map(|e| e.id).collect();
        self.value_of_ids(&ids)
    }

    fn ground_size_hint(&self) -> Option<usize> {
        Some(self.kernel.size())
    }
}

/// Heuristic non-negativity offset: `max(0, -min raw log-det) + 1` where the
/// minimum runs over all singletons and (up to a budget) pairs of the kernel.
/// Larger subsets may still dip below zero; the global minimum is intractable.
pub fn suggest_offset(kernel: &DppKernel) -> Result<f64> {
    const PAIR_BUDGET: usize = 50_000;
    let ids = kernel.ids();
    let mut min = f64::INFINITY;
    for &a in ids {
        min = min.min(kernel.log_det(&[a])?.value);
    }
    let n = ids.len();
    let pairs = n * n.saturating_sub(1) / 2;
    let stride = pairs.div_ceil(PAIR_BUDGET).max(1);
    let mut counter = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if counter.is_multiple_of(stride) {
                min = min.min(kernel.log_det(&[ids[i], ids[j]])?.value);
            }
            counter += 1;
        }
    }
    if min == f64::INFINITY {
        min = 0.0;
    }
    Ok((-min).max(0.0) + 1.0)
}

/// Smallest offset making `ln det(L_S) + offset >= 0` for every `S ⊆ ids`,
/// found by enumeration (at most 20 ids).
pub fn exact_offset(kernel: &DppKernel, ids: &[ElementId]) -> Result<f64> {
    const CAP: usize = 20;
    if ids.len() > CAP {
        return Err(Error::Capacity {
            size: ids.len(),
            cap: CAP,
        });
    }
    let mut min = 0.0f64;
    let mut subset = Vec::with_capacity(ids.len());
    for mask in 1u32..(1u32 << ids.len()) {
        subset.clear();
        subset.extend((0..ids.len()).filter(|i| mask >> i & 1 == 1).map(|i| ids[i]));
        min = min.min(kernel.log_det(&subset)?.value);
    }
    Ok(-min)
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::*;

    fn diag(values: &[f64]) -> DppKernel {
        let n = values.len();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { values[i] } else { 0.0 }).collect())
            .collect();
        DppKernel::from_rows(rows).unwrap()
    }

    #[test]
    fn identity_has_zero_log_det() {
        let f = LogDet::new(Arc::new(diag(&[1.0, 1.0])), 0.0).unwrap();
        assert_eq!(eval_ids(&f, &elems(&[0, 1]), &[0, 1]), 0.0);
    }

    #[test]
    fn diagonal_kernel_values() {
        let f = LogDet::new(Arc::new(diag(&[2.0, 3.0])), 0.0).unwrap();
        let g = elems(&[0, 1]);
        let v = eval_ids(&f, &g, &[0, 1]);
        assert!((v - 6f64.ln()).abs() < 1e-12);
        assert!((v - 1.7918).abs() < 1e-4);
        let gain = f.marginal_gain(&g[1], &[&g[0]]).unwrap();
        assert!((gain - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn empty_set_is_offset() {
        let f = LogDet::new(Arc::new(diag(&[2.0])), 5.0).unwrap();
        assert_eq!(f.eval(&[]).unwrap(), 5.0);
    }

    #[test]
    fn two_by_two_determinant() {
        // det [[2, 1], [1, 2]] = 3
        let k = DppKernel::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let v = k.log_det(&[0, 1]).unwrap();
        assert!((v.value - 3f64.ln()).abs() < 1e-12);
        assert!(!v.clamped);
    }

    #[test]
    fn singular_submatrix_is_clamped_not_error() {
        let k = DppKernel::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let f = LogDet::new(Arc::new(k), 0.0).unwrap();
        assert!(!f.clamped());
        let v = f.value_of_ids(&[0, 1]).unwrap();
        assert_eq!(v, DET_FLOOR.ln());
        assert!(f.clamped());
    }

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        assert!(DppKernel::from_rows(vec![vec![1.0, 0.5], vec![0.0, 1.0]]).is_err());
        assert!(DppKernel::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).is_err());
    }

    #[test]
    fn parses_matrix_file() {
        let k = DppKernel::parse("2\n2 0\n0 3\n").unwrap();
        assert_eq!(k.size(), 2);
        assert_eq!(k.entry(1, 1).unwrap(), 3.0);
        assert!(matches!(
            DppKernel::parse("2\n1 0\n0 x\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(DppKernel::parse("3\n1 0 0\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn offsets() {
        let k = diag(&[0.5, 0.25, 2.0]);
        // exact: min over subsets is ln(0.5 * 0.25)
        let exact = exact_offset(&k, &[0, 1, 2]).unwrap();
        assert!((exact + (0.125f64).ln()).abs() < 1e-12);
        let heur = suggest_offset(&k).unwrap();
        assert!((heur - (exact + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn unknown_id() {
        let f = LogDet::new(Arc::new(diag(&[1.0])), 0.0).unwrap();
        assert!(matches!(f.eval(&[&Element::new(3)]), Err(Error::Domain(_))));
    }
}
