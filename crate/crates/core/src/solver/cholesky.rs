//! Sparse Cholesky factorization `P A Pᵀ = L Lᵀ` (elimination tree + up-looking
//! numeric phase) with an approximate-minimum-degree fill-reducing ordering.

use crate::scalar::Real;

use super::csr::CsrMatrix;
use super::SolverError;

const NONE: usize = usize::MAX;

/// Fill-reducing ordering applied before factorization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Ordering {
    #[default]
    ApproximateMinimumDegree,
    Natural,
}

/// Factor of a sparse symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct SpdFactor<T> {
    n: usize,
    /// `perm[k]` is the original index eliminated at step `k`.
    perm: Vec<usize>,
    l_colptr: Vec<usize>,
    l_rowind: Vec<usize>,
    l_values: Vec<T>,
}

impl<T: Real> SpdFactor<T> {
    pub fn new(a: &CsrMatrix<T>) -> Result<Self, SolverError> {
        Self::with_ordering(a, Ordering::default())
    }

    pub fn with_ordering(a: &CsrMatrix<T>, ordering: Ordering) -> Result<Self, SolverError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(SolverError::NotSquare { rows: n, cols: a.ncols() });
        }
        let perm = match ordering {
            Ordering::Natural => (0..n).collect(),
            Ordering::ApproximateMinimumDegree => amd_order(a)?,
        };
        let mut pinv = vec![0; n];
        for (k, &i) in perm.iter().enumerate() {
            pinv[i] = k;
        }

        // Upper triangle of C = P A Pᵀ, column by column.
        let mut c_colptr = Vec::with_capacity(n + 1);
        let mut c_rowind = Vec::new();
        let mut c_values = Vec::new();
        c_colptr.push(0);
        for k in 0..n {
            let mut col: Vec<(usize, T)> = a
                .row(perm[k])
                .map(|(j, v)| (pinv[j], v))
                .filter(|&(i, _)| i <= k)
                .collect();
            col.sort_unstable_by_key(|&(i, _)| i);
            for (i, v) in col {
                c_rowind.push(i);
                c_values.push(v);
            }
            c_colptr.push(c_rowind.len());
        }

        let parent = etree(n, &c_colptr, &c_rowind);

        // Symbolic pass: column counts of L.
        let mut stack = vec![0; n];
        let mut mark = vec![NONE; n];
        let mut counts = vec![1usize; n];
        for k in 0..n {
            let top = ereach(&c_colptr, &c_rowind, k, &parent, &mut stack, &mut mark);
            for &i in &stack[top..] {
                counts[i] += 1;
            }
        }
        let mut l_colptr = vec![0; n + 1];
        for k in 0..n {
            l_colptr[k + 1] = l_colptr[k] + counts[k];
        }
        let nnz = l_colptr[n];
        let mut l_rowind = vec![0; nnz];
        let mut l_values = vec![T::zero(); nnz];
        let mut next: Vec<usize> = l_colptr[..n].to_vec();

        // Numeric pass.
        let mut x = vec![T::zero(); n];
        mark.iter_mut().for_each(|m| *m = NONE);
        for k in 0..n {
            let top = ereach(&c_colptr, &c_rowind, k, &parent, &mut stack, &mut mark);
            let mut diag_in = T::zero();
            for p in c_colptr[k]..c_colptr[k + 1] {
                x[c_rowind[p]] = c_values[p];
            }
            let mut d = x[k];
            diag_in = diag_in.max(d.abs());
            x[k] = T::zero();
            for &i in &stack[top..] {
                let lki = x[i] / l_values[l_colptr[i]];
                x[i] = T::zero();
                for p in (l_colptr[i] + 1)..next[i] {
                    x[l_rowind[p]] -= l_values[p] * lki;
                }
                d -= lki * lki;
                let p = next[i];
                next[i] += 1;
                l_rowind[p] = k;
                l_values[p] = lki;
            }
            let tol = T::lit(64.0) * <T as Real>::epsilon() * diag_in;
            if !(d > tol) || !d.is_finite() {
                return Err(SolverError::NotPositiveDefinite { pivot: perm[k], value: d.as_f64() });
            }
            let p = next[k];
            next[k] += 1;
            l_rowind[p] = k;
            l_values[p] = d.sqrt();
        }

        Ok(Self { n, perm, l_colptr, l_rowind, l_values })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Elimination order: `ordering()[k]` is the original index pivoted at step `k`.
    pub fn ordering(&self) -> &[usize] {
        &self.perm
    }

    pub fn factor_nnz(&self) -> usize {
        self.l_values.len()
    }

    /// `log det A = 2 Σ log L_kk`
    pub fn log_det(&self) -> T {
        (0..self.n).map(|k| self.l_values[self.l_colptr[k]].ln()).sum::<T>() * T::lit(2.0)
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.n, "rhs length mismatch");
        let mut x: Vec<T> = self.perm.iter().map(|&i| b[i]).collect();
        self.lsolve(&mut x);
        self.ltsolve(&mut x);
        let mut out = vec![T::zero(); self.n];
        for (k, &i) in self.perm.iter().enumerate() {
            out[i] = x[k];
        }
        out
    }

    fn lsolve(&self, x: &mut [T]) {
        for j in 0..self.n {
            let start = self.l_colptr[j];
            x[j] /= self.l_values[start];
            let xj = x[j];
            for p in (start + 1)..self.l_colptr[j + 1] {
                x[self.l_rowind[p]] -= self.l_values[p] * xj;
            }
        }
    }

    fn ltsolve(&self, x: &mut [T]) {
        for j in (0..self.n).rev() {
            let start = self.l_colptr[j];
            let mut acc = x[j];
            for p in (start + 1)..self.l_colptr[j + 1] {
                acc -= self.l_values[p] * x[self.l_rowind[p]];
            }
            x[j] = acc / self.l_values[start];
        }
    }
}

fn amd_order<T: Real>(a: &CsrMatrix<T>) -> Result<Vec<usize>, SolverError> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let control = amd::Control::default();
    let (p, _pinv, _info) = amd::order::<usize>(n, a.indptr(), a.indices(), &control)
        .map_err(|status| SolverError::Ordering(format!("{status:?}")))?;
    Ok(p)
}

/// Elimination tree of a matrix given by its upper-triangular CSC pattern.
fn etree(n: usize, colptr: &[usize], rowind: &[usize]) -> Vec<usize> {
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for k in 0..n {
        for &row in &rowind[colptr[k]..colptr[k + 1]] {
            let mut i = row;
            while i != NONE && i < k {
                let inext = ancestor[i];
                ancestor[i] = k;
                if inext == NONE {
                    parent[i] = k;
                }
                i = inext;
            }
        }
    }
    parent
}

/// Nonzero pattern of row `k` of L, written to `stack[top..]` in topological order.
fn ereach(
    colptr: &[usize],
    rowind: &[usize],
    k: usize,
    parent: &[usize],
    stack: &mut [usize],
    mark: &mut [usize],
) -> usize {
    let n = stack.len();
    let mut top = n;
    mark[k] = k;
    for &row in &rowind[colptr[k]..colptr[k + 1]] {
        let mut i = row;
        if i > k {
            continue;
        }
        let mut len = 0;
        while mark[i] != k {
            stack[len] = i;
            len += 1;
            mark[i] = k;
            i = parent[i];
        }
        while len > 0 {
            top -= 1;
            len -= 1;
            stack[top] = stack[len];
        }
    }
    top
}
