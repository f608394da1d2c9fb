//! CSR storage, Jacobi preconditioning and preconditioned conjugate gradients.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed CSR structure: {0}")]
    InvalidStructure(String),
    #[error("diagonal entry of row {row} is {value}, must be positive")]
    NonpositiveDiagonal { row: usize, value: f64 },
    #[error("non-finite value encountered at iteration {iteration}")]
    NaNDetected { iteration: usize },
    #[error("nonpositive curvature p·Ap = {curvature} at iteration {iteration}; matrix is not SPD")]
    Breakdown { iteration: usize, curvature: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl SolverError {
    pub fn name(&self) -> &'static str {
        match self {
            SolverError::DimensionMismatch { .. } => "DimensionMismatch",
            SolverError::InvalidStructure(_) => "InvalidStructure",
            SolverError::NonpositiveDiagonal { .. } => "NonpositiveDiagonal",
            SolverError::NaNDetected { .. } => "NaNDetected",
            SolverError::Breakdown { .. } => "Breakdown",
            SolverError::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

/// Square compressed-sparse-row matrix with sorted, unique columns per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, SolverError> {
        let bad = |m: String| Err(SolverError::InvalidStructure(m));
        if row_offsets.len() != n + 1 || row_offsets[0] != 0 {
            return bad(format!("row_offsets must have length {} and start at 0", n + 1));
        }
        if row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("row_offsets must be nondecreasing".into());
        }
        let nnz = row_offsets[n];
        if col_indices.len() != nnz || values.len() != nnz {
            return bad(format!("expected {nnz} entries"));
        }
        for i in 0..n {
            let cols = &col_indices[row_offsets[i]..row_offsets[i + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("columns of row {i} are not strictly increasing"));
            }
            if cols.last().is_some_and(|&c| c >= n) {
                return bad(format!("column index out of range in row {i}"));
            }
        }
        Ok(CsrMatrix {
            n,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Sums duplicate entries. Duplicates are added in input order, so the
    /// result is reproducible for a given triplet sequence.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self, SolverError> {
        if let Some(&(i, j, _)) = triplets.iter().find(|&&(i, j, _)| i >= n || j >= n) {
            return Err(SolverError::InvalidStructure(format!(
                "entry ({i}, {j}) outside {n}x{n}"
            )));
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));
        let mut row_offsets = vec![0; n + 1];
        let mut col_indices = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut last = None;
        for k in order {
            let (i, j, v) = triplets[k];
            if last == Some((i, j)) {
                *values.last_mut().expect("entry exists") += v;
            } else {
                col_indices.push(j);
                values.push(v);
                row_offsets[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(CsrMatrix {
            n,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Stores every nonzero of a dense row-major matrix.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self, SolverError> {
        let n = rows.len();
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SolverError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            triplets.extend(
                row.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| (i, j, v)),
            );
        }
        Self::from_triplets(n, &triplets)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n]; self.n];
        for (i, row) in dense.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        dense
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> (&[usize], &mut [f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &mut self.values[r])
    }

    /// Stored value at `(i, j)`, zero when the entry is not in the pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    pub fn diagonal(&self) -> Vec<Option<f64>> {
        (0..self.n)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.binary_search(&i).ok().map(|k| vals[k])
            })
            .collect()
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, SolverError> {
        if x.len() != self.n {
            return Err(SolverError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
    }

    /// Exact entrywise symmetry of the stored pattern and values.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).all(|(&j, &v)| {
                let (tc, tv) = self.row(j);
                tc.binary_search(&i).is_ok_and(|k| tv[k] == v)
            })
        })
    }
}

/// Left preconditioner `z = M⁻¹ r`.
pub trait Preconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Diagonal scaling by `1 / A_ii`.
#[derive(Debug, Clone)]
pub struct JacobiPreconditioner {
    inv_diag: Vec<f64>,
}

impl JacobiPreconditioner {
    pub fn new(a: &CsrMatrix) -> Result<Self, SolverError> {
        let inv_diag = a
            .diagonal()
            .into_iter()
            .enumerate()
            .map(|(row, d)| match d {
                Some(value) if value > 0.0 && value.is_finite() => Ok(1.0 / value),
                other => Err(SolverError::NonpositiveDiagonal {
                    row,
                    value: other.unwrap_or(0.0),
                }),
            })
            .collect::<Result<_, _>>()?;
        Ok(JacobiPreconditioner { inv_diag })
    }
}

impl Preconditioner for JacobiPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * di;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// `‖b − A x‖₂ / ‖b‖₂` of the returned iterate, recomputed explicitly.
    pub final_relative_residual: f64,
    pub converged: bool,
}

/// Pairwise summation over fixed halves, independent of thread count.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let (lo, hi) = v.split_at(v.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let products: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise_sum(&products)
}

pub fn default_max_iter(n: usize) -> usize {
    1000.max(10 * n)
}

/// Solves `A x = b` from a zero initial guess. See [`pcg_solve_from`].
pub fn pcg_solve(
    a: &CsrMatrix,
    b: &[f64],
    precond: &dyn Preconditioner,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats), SolverError> {
    pcg_solve_from(a, b, vec![0.0; a.n()], precond, tol, max_iter)
}

/// Preconditioned conjugate gradients for SPD `A`.
///
/// Stops when `‖b − A x‖₂ ≤ tol·‖b‖₂`. When the recurrence residual reports
/// convergence the true residual is recomputed; if it has drifted above the
/// threshold the iteration restarts from it. Reaching `max_iter` is not an
/// error: the last iterate is returned with `converged = false`.
pub fn pcg_solve_from(
    a: &CsrMatrix,
    b: &[f64],
    x0: Vec<f64>,
    precond: &dyn Preconditioner,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveStats), SolverError> {
    let n = a.n();
    for len in [b.len(), x0.len()] {
        if len != n {
            return Err(SolverError::DimensionMismatch { expected: n, got: len });
        }
    }
    if !(tol > 0.0) {
        return Err(SolverError::InvalidParameter("tol must be positive".into()));
    }
    let b_norm = dot(b, b).sqrt();
    if !b_norm.is_finite() {
        return Err(SolverError::NaNDetected { iteration: 0 });
    }
    if b_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveStats {
                iterations: 0,
                final_relative_residual: 0.0,
                converged: true,
            },
        ));
    }

    let mut x = x0;
    let mut q = vec![0.0; n];
    let true_residual = |x: &[f64], q: &mut [f64]| -> Vec<f64> {
        a.matvec_into(x, q);
        b.iter().zip(q.iter()).map(|(bi, qi)| bi - qi).collect()
    };
    let mut r = true_residual(&x, &mut q);
    let threshold = tol * b_norm;
    let mut r_norm = dot(&r, &r).sqrt();
    if r_norm <= threshold {
        return Ok((
            x,
            SolveStats {
                iterations: 0,
                final_relative_residual: r_norm / b_norm,
                converged: true,
            },
        ));
    }
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);

    for iteration in 1..=max_iter {
        a.matvec_into(&p, &mut q);
        let curvature = dot(&p, &q);
        if !curvature.is_finite() || !rz.is_finite() {
            return Err(SolverError::NaNDetected { iteration });
        }
        if curvature <= 0.0 {
            return Err(SolverError::Breakdown { iteration, curvature });
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        r_norm = dot(&r, &r).sqrt();
        if !r_norm.is_finite() {
            return Err(SolverError::NaNDetected { iteration });
        }
        let mut restart = false;
        if r_norm <= threshold {
            r = true_residual(&x, &mut q);
            r_norm = dot(&r, &r).sqrt();
            if r_norm <= threshold {
                return Ok((
                    x,
                    SolveStats {
                        iterations: iteration,
                        final_relative_residual: r_norm / b_norm,
                        converged: true,
                    },
                ));
            }
            restart = true;
        }
        precond.apply(&r, &mut z);
        let rz_next = dot(&r, &z);
        let beta = if restart { 0.0 } else { rz_next / rz };
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rz = rz_next;
    }

    let r = true_residual(&x, &mut q);
    let final_relative_residual = dot(&r, &r).sqrt() / b_norm;
    Ok((
        x,
        SolveStats {
            iterations: max_iter,
            final_relative_residual,
            converged: final_relative_residual <= tol,
        },
    ))
}
