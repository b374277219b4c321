//! Dense and sparse linear algebra over a small prime field `F_p`.
//!
//! Elimination is Gauss-Jordan with first-nonzero pivoting in column order, so
//! results do not depend on thread scheduling. Entries are `u32`; row updates
//! accumulate without reduction and the whole matrix is reduced only when the
//! next update could overflow.

use rayon::prelude::*;

use crate::arith::inv_mod;

/// Row count above which row updates are spread over the thread pool.
const PAR_ROWS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        assert!(
            (2..(1 << 16)).contains(&p),
            "field characteristic {p} out of range"
        );
        Self { p: p as u32 }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.p - b) % self.p
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        (self.p - a % self.p) % self.p
    }

    pub fn inv(&self, a: u32) -> u32 {
        inv_mod(a as u64, self.p as u64).expect("inverse of zero in F_p") as u32
    }

    /// Number of unreduced row updates a `u32` entry can absorb.
    fn lazy_budget(&self) -> u64 {
        let step = (self.p as u64 - 1).pow(2).max(1);
        (u32::MAX as u64 - self.p as u64) / step
    }
}

/// Row-major dense matrix with entries in `[0, p)` between operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &DenseMatrix, f: Fp) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let p = f.p() as u64;
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        let oc = other.cols;
        out.data
            .par_chunks_mut(oc.max(1))
            .enumerate()
            .for_each(|(i, orow)| {
                let mut acc = vec![0u64; oc];
                for (k, &a) in self.row(i).iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    for (x, &b) in acc.iter_mut().zip(other.row(k)) {
                        *x += a as u64 * b as u64;
                    }
                    // p < 2^16 keeps 2^32 additions of p^2 below 2^64
                }
                for (o, x) in orow.iter_mut().zip(acc) {
                    *o = (x % p) as u32;
                }
            });
        out
    }

    /// `self - c·I` for a square matrix.
    pub fn sub_scalar(&self, c: u32, f: Fp) -> DenseMatrix {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        for i in 0..self.rows {
            let v = m.get(i, i);
            m.set(i, i, f.sub(v, c % f.p()));
        }
        m
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        DenseMatrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    /// Vertical concatenation.
    pub fn vcat(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        DenseMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_rows(&self, idx: impl IntoIterator<Item = usize>) -> DenseMatrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for i in idx {
            data.extend_from_slice(self.row(i));
            rows += 1;
        }
        DenseMatrix {
            rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, range: std::ops::Range<usize>) -> DenseMatrix {
        let cols = range.len();
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(&self.row(i)[range.clone()]);
        }
        DenseMatrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    pub fn rank(&self, f: Fp) -> usize {
        let mut m = self.clone();
        rref_in_place(&mut m, f, self.cols).len()
    }
}

/// Reduces `m` to reduced row echelon form, choosing pivots only among the
/// first `pivot_limit` columns (later columns are carried along). Returns the
/// pivot columns; pivot rows come first, in order.
pub fn rref_in_place(m: &mut DenseMatrix, f: Fp, pivot_limit: usize) -> Vec<usize> {
    let p = f.p();
    let cols = m.cols;
    let nrows = m.rows;
    let budget = f.lazy_budget();
    let mut since_reduce: u64 = 0;
    let mut pivots = Vec::new();
    let mut r = 0;
    let mut pivot_row = vec![0u32; cols];
    for c in 0..pivot_limit.min(cols) {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| !m.data[i * cols + c].is_multiple_of(p)) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                m.data.swap(pr * cols + j, r * cols + j);
            }
        }
        {
            let row = &mut m.data[r * cols..(r + 1) * cols];
            let inv = f.inv(row[c] % p) as u64;
            for x in row.iter_mut() {
                *x = ((*x % p) as u64 * inv % p as u64) as u32;
            }
            pivot_row.copy_from_slice(row);
        }
        if since_reduce >= budget {
            m.data.par_iter_mut().for_each(|x| *x %= p);
            since_reduce = 0;
        }
        since_reduce += 1;
        let piv = &pivot_row[c..];
        let update = |(i, row): (usize, &mut [u32])| {
            if i == r {
                return;
            }
            let lead = row[c] % p;
            if lead == 0 {
                return;
            }
            let factor = p - lead;
            for (x, &y) in row[c..].iter_mut().zip(piv) {
                *x = x.wrapping_add(factor.wrapping_mul(y));
            }
            row[c] = 0;
        };
        if nrows >= PAR_ROWS {
            m.data.par_chunks_mut(cols).enumerate().for_each(update);
        } else {
            m.data.chunks_mut(cols).enumerate().for_each(update);
        }
        pivots.push(c);
        r += 1;
    }
    m.data.par_iter_mut().for_each(|x| *x %= p);
    pivots
}

/// Basis of `{ v : v·A = 0 }` as rows.
pub fn left_kernel(a: &DenseMatrix, f: Fp) -> DenseMatrix {
    right_kernel(&a.transpose(), f)
}

/// Basis of `{ x : A·x = 0 }` as rows.
pub fn right_kernel(a: &DenseMatrix, f: Fp) -> DenseMatrix {
    let mut r = a.clone();
    let pivots = rref_in_place(&mut r, f, a.cols);
    kernel_from_rref(&r, &pivots, f)
}

fn kernel_from_rref(r: &DenseMatrix, pivots: &[usize], f: Fp) -> DenseMatrix {
    kernel_subspace_from_rref(r, pivots, f).basis
}

/// Kernel rows carry the identity on the free columns, which become the pivots.
fn kernel_subspace_from_rref(r: &DenseMatrix, pivots: &[usize], f: Fp) -> Subspace {
    let n = r.cols;
    let mut is_pivot = vec![false; n];
    for &c in pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut k = DenseMatrix::zeros(free.len(), n);
    k.data
        .par_chunks_mut(n.max(1))
        .zip(free.par_iter())
        .for_each(|(row, &fc)| {
            row[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                let v = r.get(i, fc);
                if v != 0 {
                    row[pc] = f.neg(v);
                }
            }
        });
    Subspace {
        basis: k,
        pivots: free,
    }
}

/// `{ v : v·A = 0 }` as a subspace.
pub fn left_kernel_subspace(a: &DenseMatrix, f: Fp) -> Subspace {
    let mut r = a.transpose();
    let lim = r.cols;
    let pivots = rref_in_place(&mut r, f, lim);
    kernel_subspace_from_rref(&r, &pivots, f)
}

/// A subspace of `F_p^n` given by basis rows whose restriction to the pivot
/// columns is the identity, so the coordinates of any member are its entries
/// at the pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    pub basis: DenseMatrix,
    pub pivots: Vec<usize>,
}

impl Subspace {
    /// Echelonizes arbitrary spanning rows.
    pub fn from_spanning_rows(mut rows: DenseMatrix, f: Fp) -> Self {
        let lim = rows.cols;
        let pivots = rref_in_place(&mut rows, f, lim);
        let basis = rows.select_rows(0..pivots.len());
        Self { basis, pivots }
    }

    pub fn whole(n: usize) -> Self {
        Self {
            basis: DenseMatrix::identity(n),
            pivots: (0..n).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.cols
    }

    /// Coordinates of `v` if it lies in the subspace.
    pub fn coordinates(&self, v: &[u32], f: Fp) -> Option<Vec<u32>> {
        let c: Vec<u32> = self.pivots.iter().map(|&j| v[j] % f.p()).collect();
        let mut w: Vec<u32> = v.iter().map(|&x| x % f.p()).collect();
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            for (x, &b) in w.iter_mut().zip(self.basis.row(i)) {
                *x = f.sub(*x, f.mul(ci, b));
            }
        }
        w.iter().all(|&x| x == 0).then_some(c)
    }

    pub fn contains(&self, v: &[u32], f: Fp) -> bool {
        self.coordinates(v, f).is_some()
    }

    /// Matrix of the operator `T` (acting on row vectors, `v ↦ v·T`) restricted
    /// to this subspace, assuming the subspace is `T`-invariant.
    pub fn restrict(&self, t: &SparseMatrix, f: Fp) -> DenseMatrix {
        assert_eq!(t.nrows(), self.ambient_dim());
        let k = self.dim();
        let mut slot = vec![u32::MAX; self.ambient_dim()];
        for (i, &c) in self.pivots.iter().enumerate() {
            slot[c] = i as u32;
        }
        let p = f.p() as u64;
        let mut out = DenseMatrix::zeros(k, k);
        out.data
            .par_chunks_mut(k.max(1))
            .enumerate()
            .for_each(|(i, orow)| {
                let mut acc = vec![0u64; k];
                for (j, &w) in self.basis.row(i).iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    for &(c, v) in t.row(j) {
                        let s = slot[c as usize];
                        if s != u32::MAX {
                            acc[s as usize] += w as u64 * v as u64;
                        }
                    }
                }
                for (o, x) in orow.iter_mut().zip(acc) {
                    *o = (x % p) as u32;
                }
            });
        out
    }

    /// The subspace spanned by `coeffs · basis` for coefficient rows relative to this basis.
    pub fn sub_from_coordinates(&self, coeffs: &DenseMatrix, f: Fp) -> Subspace {
        Subspace::from_spanning_rows(coeffs.mul(&self.basis, f), f)
    }
}

/// Solves `v·A = w` and provides the iterated-kernel construction, from one
/// elimination of `[A | I]`.
pub struct LeftSolver {
    f: Fp,
    n: usize,
    /// Reduced echelon form `R = U·A`, first `rank` rows nonzero.
    r: DenseMatrix,
    u: DenseMatrix,
    pivots: Vec<usize>,
}

impl LeftSolver {
    pub fn new(a: &DenseMatrix, f: Fp) -> Self {
        assert_eq!(a.rows, a.cols, "square operator expected");
        let n = a.rows;
        let mut aug = a.hcat(&DenseMatrix::identity(n));
        let pivots = rref_in_place(&mut aug, f, n);
        let r = aug.select_cols(0..n);
        let u = aug.select_cols(n..2 * n);
        Self { f, n, r, u, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// `{ v : v·A = 0 }`.
    pub fn kernel(&self) -> DenseMatrix {
        self.u.select_rows(self.rank()..self.n)
    }

    /// Writes `w = c·R + residual`; returns `(c, residual)`.
    fn decompose(&self, w: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let f = self.f;
        let mut res: Vec<u32> = w.iter().map(|&x| x % f.p()).collect();
        let mut c = vec![0u32; self.rank()];
        for (i, &pc) in self.pivots.iter().enumerate() {
            let ci = res[pc];
            if ci == 0 {
                continue;
            }
            c[i] = ci;
            for (x, &y) in res.iter_mut().zip(self.r.row(i)) {
                *x = f.sub(*x, f.mul(ci, y));
            }
        }
        (c, res)
    }

    /// A solution of `v·A = w`, if one exists.
    pub fn solve(&self, w: &[u32]) -> Option<Vec<u32>> {
        let (c, res) = self.decompose(w);
        if res.iter().any(|&x| x != 0) {
            return None;
        }
        Some(self.combine_u(&c))
    }

    fn combine_u(&self, c: &[u32]) -> Vec<u32> {
        let f = self.f;
        let mut v = vec![0u64; self.n];
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(self.u.row(i)) {
                *x += ci as u64 * y as u64;
            }
        }
        v.into_iter().map(|x| (x % f.p() as u64) as u32).collect()
    }

    /// `A^{-1}(K) = { v : v·A ∈ span K }` for a subspace given by basis rows.
    pub fn preimage(&self, k: &DenseMatrix) -> DenseMatrix {
        let f = self.f;
        let mut coeffs = Vec::with_capacity(k.rows());
        let mut residuals = Vec::with_capacity(k.rows());
        for i in 0..k.rows() {
            let (c, res) = self.decompose(k.row(i));
            coeffs.push(c);
            residuals.push(res);
        }
        let kern = self.kernel();
        if k.rows() == 0 {
            return kern;
        }
        // combinations λ with Σ λ_j residual_j = 0 land in the image of A
        let res_m = DenseMatrix::from_rows(self.n, &residuals);
        let lambdas = left_kernel(&res_m, f);
        let mut rows = kern.row_vecs();
        for li in 0..lambdas.rows() {
            let lam = lambdas.row(li);
            let mut c = vec![0u32; self.rank()];
            for (j, &l) in lam.iter().enumerate() {
                if l == 0 {
                    continue;
                }
                for (x, &y) in c.iter_mut().zip(&coeffs[j]) {
                    *x = f.add(*x, f.mul(l, y));
                }
            }
            rows.push(self.combine_u(&c));
        }
        let span = DenseMatrix::from_rows(self.n, &rows);
        Subspace::from_spanning_rows(span, f).basis
    }
}

/// Generalized kernel `ker A^∞` of a square operator, by iterated kernels
/// `K₁ = ker A`, `K_{i+1} = A^{-1}(K_i)` until the dimension stops growing.
/// Returns basis rows in reduced echelon form.
pub fn generalized_kernel(a: &DenseMatrix, f: Fp) -> DenseMatrix {
    let solver = LeftSolver::new(a, f);
    let mut k = Subspace::from_spanning_rows(solver.kernel(), f).basis;
    for _ in 0..a.rows() {
        if k.rows() == 0 {
            break;
        }
        let next = solver.preimage(&k);
        if next.rows() == k.rows() {
            break;
        }
        k = next;
    }
    k
}

/// Row-sparse matrix: `rows[i]` lists `(column, value)` with values in `[1, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    ncols: usize,
    rows: Vec<Vec<(u32, u32)>>,
}

impl SparseMatrix {
    pub fn new(ncols: usize, rows: Vec<Vec<(u32, u32)>>) -> Self {
        Self { ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[(u32, u32)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows.len(), self.ncols);
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                m.set(i, c as usize, v);
            }
        }
        m
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let rows = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(c, &v)| (c as u32, v))
                    .collect()
            })
            .collect();
        Self {
            ncols: m.cols(),
            rows,
        }
    }

    /// `v·self` for a dense row vector.
    pub fn left_apply(&self, v: &[u32], f: Fp) -> Vec<u32> {
        let mut acc = vec![0u64; self.ncols];
        for (i, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for &(c, y) in &self.rows[i] {
                acc[c as usize] += x as u64 * y as u64;
            }
        }
        acc.into_iter().map(|x| (x % f.p() as u64) as u32).collect()
    }
}
