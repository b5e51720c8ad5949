//! Exact linear algebra over ℚ.
//!
//! Elimination is fraction-free: rows are scaled to primitive integer vectors,
//! combined with integer multipliers and re-reduced by their content after
//! every step. Pivots are normalised to 1 only once the echelon form is
//! complete. Matrices with fewer than [`DENSE_COLUMN_LIMIT`] columns are stored
//! densely; wider ones (the block-structured derivation matrices) use sorted
//! sparse rows.

use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::prelude::*;

pub type Q = BigRational;

/// Column count from which matrices switch to sparse storage.
pub const DENSE_COLUMN_LIMIT: usize = 64;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

type SparseRow = Vec<(usize, Q)>;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Storage {
    Dense(Vec<Vec<Q>>),
    Sparse(Vec<SparseRow>),
}

/// A rows × cols matrix of rationals.
#[derive(Clone, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    storage: Storage,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && (0..self.rows).all(|i| self.sparse_row(i) == other.sparse_row(i))
    }
}

impl Eq for Matrix {}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_sparse_rows(cols, vec![Vec::new(); rows])
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, Q::one())]).collect();
        Self::from_sparse_rows(n, rows)
    }

    /// Build from dense rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Q>>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        let sparse = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        Self::from_sparse_rows(cols, sparse)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect())
    }

    /// Build from sparse rows of `(column, value)` pairs, in any order.
    pub fn from_sparse_rows(cols: usize, rows: Vec<Vec<(usize, Q)>>) -> Self {
        let rows_n = rows.len();
        let mut clean: Vec<SparseRow> = Vec::with_capacity(rows_n);
        for mut r in rows {
            r.sort_by_key(|(c, _)| *c);
            let mut out: SparseRow = Vec::with_capacity(r.len());
            for (c, v) in r {
                assert!(c < cols, "column index {c} out of bounds ({cols})");
                match out.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv += v,
                    _ => out.push((c, v)),
                }
            }
            out.retain(|(_, v)| !v.is_zero());
            clean.push(out);
        }
        let storage = if cols < DENSE_COLUMN_LIMIT {
            Storage::Dense(
                clean
                    .into_iter()
                    .map(|r| {
                        let mut d = vec![Q::zero(); cols];
                        for (c, v) in r {
                            d[c] = v;
                        }
                        d
                    })
                    .collect(),
            )
        } else {
            Storage::Sparse(clean)
        };
        Matrix {
            rows: rows_n,
            cols,
            storage,
        }
    }

    /// Build from columns given as sparse `(row, value)` lists.
    pub fn from_sparse_columns(rows: usize, columns: &[Vec<(usize, Q)>]) -> Self {
        let mut r: Vec<SparseRow> = vec![Vec::new(); rows];
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col {
                r[*i].push((j, v.clone()));
            }
        }
        Self::from_sparse_rows(columns.len(), r)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        assert!(i < self.rows && j < self.cols, "matrix index out of bounds");
        match &self.storage {
            Storage::Dense(d) => d[i][j].clone(),
            Storage::Sparse(s) => s[i]
                .binary_search_by_key(&j, |(c, _)| *c)
                .map(|k| s[i][k].1.clone())
                .unwrap_or_else(|_| Q::zero()),
        }
    }

    pub fn sparse_row(&self, i: usize) -> SparseRow {
        match &self.storage {
            Storage::Dense(d) => d[i]
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (c, v.clone()))
                .collect(),
            Storage::Sparse(s) => s[i].clone(),
        }
    }

    pub fn row(&self, i: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.cols];
        for (c, v) in self.sparse_row(i) {
            out[c] = v;
        }
        out
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        (0..self.rows).all(|i| self.sparse_row(i).is_empty())
    }

    pub fn transpose(&self) -> Matrix {
        let mut cols: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.rows];
        for (i, col) in cols.iter_mut().enumerate() {
            *col = self.sparse_row(i);
        }
        Matrix::from_sparse_columns(self.cols, &cols)
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|i| {
                self.sparse_row(i)
                    .iter()
                    .fold(Q::zero(), |acc, (c, a)| acc + a * &v[*c])
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let other_rows: Vec<SparseRow> = (0..other.rows).map(|i| other.sparse_row(i)).collect();
        let rows = (0..self.rows)
            .map(|i| {
                let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                for (k, a) in self.sparse_row(i) {
                    for (j, b) in &other_rows[k] {
                        *acc.entry(*j).or_insert_with(Q::zero) += &a * b;
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        Matrix::from_sparse_rows(other.cols, rows)
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

fn primitive_dense(row: &[Q]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .filter(|v| !v.is_zero())
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut ints: Vec<BigInt> = row
        .iter()
        .map(|v| (v * Q::from_integer(lcm.clone())).to_integer())
        .collect();
    divide_content(&mut ints);
    ints
}

fn divide_content(ints: &mut [BigInt]) {
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in ints.iter_mut() {
            *v = &*v / &g;
        }
    }
}

fn divide_content_sparse(row: &mut [(usize, BigInt)]) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

fn rref_dense(m: &Matrix) -> Rref {
    let cols = m.cols;
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows).map(|i| primitive_dense(&m.row(i))).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r >= rows.len() {
            break;
        }
        // smallest nonzero pivot keeps the integers small
        let Some(p) = (r..rows.len())
            .filter(|&i| !rows[i][col].is_zero())
            .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()))
        else {
            continue;
        };
        rows.swap(r, p);
        let pivot_row = rows[r].clone();
        let pv = pivot_row[col].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let e = row[col].clone();
            let g = pv.gcd(&e);
            let (a, b) = (&pv / &g, &e / &g);
            for (x, y) in row.iter_mut().zip(pivot_row.iter()) {
                *x = &a * &*x - &b * y;
            }
            divide_content(row);
        }
        pivots.push(col);
        r += 1;
    }
    let mut out: Vec<Vec<Q>> = Vec::with_capacity(m.rows);
    for (i, row) in rows.into_iter().enumerate() {
        if i < pivots.len() {
            let pv = row[pivots[i]].clone();
            out.push(row.into_iter().map(|v| Q::new(v, pv.clone())).collect());
        } else {
            out.push(vec![Q::zero(); cols]);
        }
    }
    let rank = pivots.len();
    Rref {
        matrix: Matrix::from_rows(cols, out),
        pivots,
        rank,
    }
}

fn combine_sparse(
    a: &BigInt,
    row: &[(usize, BigInt)],
    b: &BigInt,
    pivot: &[(usize, BigInt)],
) -> Vec<(usize, BigInt)> {
    // a*row - b*pivot, merged by column
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j >= pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i >= row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push((row[i].0, a * &row[i].1));
            i += 1;
        } else if take_piv {
            out.push((pivot[j].0, -(b * &pivot[j].1)));
            j += 1;
        } else {
            let v = a * &row[i].1 - b * &pivot[j].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn rref_sparse(m: &Matrix) -> Rref {
    let cols = m.cols;
    let mut rows: Vec<Vec<(usize, BigInt)>> = (0..m.rows)
        .map(|i| {
            let sr = m.sparse_row(i);
            let lcm = sr.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
            let mut ints: Vec<(usize, BigInt)> = sr
                .into_iter()
                .map(|(c, v)| (c, (v * Q::from_integer(lcm.clone())).to_integer()))
                .collect();
            divide_content_sparse(&mut ints);
            ints
        })
        .collect();
    let entry = |row: &[(usize, BigInt)], col: usize| -> Option<BigInt> {
        row.binary_search_by_key(&col, |(c, _)| *c)
            .ok()
            .map(|k| row[k].1.clone())
    };
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r >= rows.len() {
            break;
        }
        // fewest nonzeros first limits fill-in
        let Some(p) = (r..rows.len())
            .filter(|&i| entry(&rows[i], col).is_some())
            .min_by_key(|&i| rows[i].len())
        else {
            continue;
        };
        rows.swap(r, p);
        let pivot_row = rows[r].clone();
        let pv = entry(&pivot_row, col).expect("pivot entry");
        for i in 0..rows.len() {
            if i == r {
                continue;
            }
            let Some(e) = entry(&rows[i], col) else {
                continue;
            };
            let g = pv.gcd(&e);
            let (a, b) = (&pv / &g, &e / &g);
            let mut nr = combine_sparse(&a, &rows[i], &b, &pivot_row);
            divide_content_sparse(&mut nr);
            rows[i] = nr;
        }
        pivots.push(col);
        r += 1;
    }
    let mut out: Vec<Vec<(usize, Q)>> = Vec::with_capacity(m.rows);
    for (i, row) in rows.into_iter().enumerate() {
        if i < pivots.len() {
            let pv = entry(&row, pivots[i]).expect("pivot entry");
            out.push(row.into_iter().map(|(c, v)| (c, Q::new(v, pv.clone()))).collect());
        } else {
            out.push(Vec::new());
        }
    }
    let rank = pivots.len();
    Rref {
        matrix: Matrix::from_sparse_rows(cols, out),
        pivots,
        rank,
    }
}

/// The unique reduced row echelon form of `m`.
pub fn rref(m: &Matrix) -> Rref {
    if m.is_sparse() {
        rref_sparse(m)
    } else {
        rref_dense(m)
    }
}

/// Dense-path elimination regardless of width; exposed so the two storage
/// strategies can be checked against each other.
pub fn rref_dense_path(m: &Matrix) -> Rref {
    rref_dense(m)
}

/// Sparse-path elimination regardless of width.
pub fn rref_sparse_path(m: &Matrix) -> Rref {
    rref_sparse(m)
}

/// A linear subspace of ℚ^ambient, stored by its RREF basis.
///
/// The RREF is canonical, so structural equality is subspace equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    /// Nonzero RREF rows.
    basis: Vec<SparseRow>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, &Matrix::identity(ambient).to_rows())
    }

    /// Span of the given vectors (each of length `ambient`).
    pub fn span(ambient: usize, vectors: &[Vec<Q>]) -> Self {
        Self::span_sparse(
            ambient,
            vectors
                .iter()
                .map(|v| {
                    assert_eq!(v.len(), ambient, "vector length differs from ambient dimension");
                    v.iter()
                        .enumerate()
                        .filter(|(_, x)| !x.is_zero())
                        .map(|(c, x)| (c, x.clone()))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn span_sparse(ambient: usize, vectors: Vec<Vec<(usize, Q)>>) -> Self {
        let m = Matrix::from_sparse_rows(ambient, vectors);
        let r = rref(&m);
        let basis = (0..r.rank).map(|i| r.matrix.sparse_row(i)).collect();
        Subspace {
            ambient,
            basis,
            pivots: r.pivots,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// The RREF basis as dense vectors.
    pub fn basis(&self) -> Vec<Vec<Q>> {
        self.basis
            .iter()
            .map(|r| {
                let mut v = vec![Q::zero(); self.ambient];
                for (c, x) in r {
                    v[*c] = x.clone();
                }
                v
            })
            .collect()
    }

    pub fn basis_matrix(&self) -> Matrix {
        Matrix::from_sparse_rows(self.ambient, self.basis.clone())
    }

    /// Residual of `v` after reduction by the basis; zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.ambient, "vector length differs from ambient dimension");
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (c, x) in row {
                w[*c] -= &f * x;
            }
        }
        w
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Q]) -> Option<Vec<Q>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis().iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span_sparse(self.ambient, vs)
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        // solve Σ a_i s_i = Σ b_j o_j; the intersection is spanned by Σ a_i s_i
        let s = self.basis();
        let o = other.basis();
        if s.is_empty() || o.is_empty() {
            return Subspace::zero(self.ambient);
        }
        let cols: Vec<Vec<(usize, Q)>> = s
            .iter()
            .cloned()
            .chain(o.iter().map(|v| v.iter().map(|x| -x.clone()).collect()))
            .map(|v| {
                v.into_iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .collect()
            })
            .collect();
        let m = Matrix::from_sparse_columns(self.ambient, &cols);
        let k = kernel_basis(&m);
        let vecs: Vec<Vec<Q>> = k
            .basis()
            .iter()
            .map(|coef| {
                let mut v = vec![Q::zero(); self.ambient];
                for (a, sv) in coef.iter().zip(&s) {
                    if a.is_zero() {
                        continue;
                    }
                    for (x, y) in v.iter_mut().zip(sv) {
                        *x += a * y;
                    }
                }
                v
            })
            .collect();
        Subspace::span(self.ambient, &vecs)
    }

    /// Image of the subspace under the coordinate projection onto `coords`.
    pub fn project(&self, coords: &[usize]) -> Subspace {
        let vecs: Vec<Vec<Q>> = self
            .basis()
            .iter()
            .map(|v| coords.iter().map(|&c| v[c].clone()).collect())
            .collect();
        Subspace::span(coords.len(), &vecs)
    }

    /// Linear functionals vanishing on the subspace, as a subspace of the dual.
    pub fn annihilator(&self) -> Subspace {
        kernel_basis(&self.basis_matrix())
    }
}

/// Basis of `{v : m·v = 0}`.
pub fn kernel_basis(m: &Matrix) -> Subspace {
    let r = rref(m);
    let n = m.cols();
    let pivot_set: BTreeSet<usize> = r.pivots.iter().copied().collect();
    let rows: Vec<SparseRow> = (0..r.rank).map(|i| r.matrix.sparse_row(i)).collect();
    let mut vecs: Vec<Vec<(usize, Q)>> = Vec::new();
    for free in (0..n).filter(|c| !pivot_set.contains(c)) {
        let mut v: Vec<(usize, Q)> = vec![(free, Q::one())];
        for (row, &p) in rows.iter().zip(&r.pivots) {
            if let Ok(k) = row.binary_search_by_key(&free, |(c, _)| *c) {
                v.push((p, -row[k].1.clone()));
            }
        }
        vecs.push(v);
    }
    Subspace::span_sparse(n, vecs)
}

/// Solve `a·x = b`: `None` when `b` is outside the column space, otherwise a
/// particular solution (free variables zero) and the kernel of `a`.
pub fn solve_affine(a: &Matrix, b: &[Q]) -> Result<Option<(Vec<Q>, Subspace)>> {
    if b.len() != a.rows() {
        return Err(Error::contract(format!(
            "solve_affine: right-hand side has length {} but the matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let n = a.cols();
    let rows: Vec<Vec<(usize, Q)>> = (0..a.rows())
        .map(|i| {
            let mut r = a.sparse_row(i);
            if !b[i].is_zero() {
                r.push((n, b[i].clone()));
            }
            r
        })
        .collect();
    let aug = Matrix::from_sparse_rows(n + 1, rows);
    let r = rref(&aug);
    if r.pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = vec![Q::zero(); n];
    for (i, &p) in r.pivots.iter().enumerate() {
        x[p] = r.matrix.get(i, n);
    }
    Ok(Some((x, kernel_basis(a))))
}

/// Dimension of `cycles / boundaries` and vectors projecting to a basis of it.
pub fn subquotient_basis(cycles: &Subspace, boundaries: &Subspace) -> Result<(usize, Vec<Vec<Q>>)> {
    if cycles.ambient() != boundaries.ambient() {
        return Err(Error::contract("subquotient: ambient dimensions differ"));
    }
    if !boundaries.is_subspace_of(cycles) {
        return Err(Error::contract(
            "subquotient: boundaries are not contained in cycles",
        ));
    }
    let mut acc = boundaries.clone();
    let mut reps = Vec::new();
    for v in cycles.basis() {
        if !acc.contains(&v) {
            acc = acc.sum(&Subspace::span(cycles.ambient(), core::slice::from_ref(&v)));
            reps.push(v);
        }
    }
    Ok((reps.len(), reps))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64_rows(rows)
    }

    #[test]
    fn rref_identity() {
        let r = rref(&Matrix::identity(3));
        assert_eq!(r.matrix, Matrix::identity(3));
        assert_eq!(r.pivots, vec![0, 1, 2]);
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn rref_proportional_rows() {
        let r = rref(&m(&[&[1, 2], &[2, 4]]));
        assert_eq!(r.matrix, m(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn rref_zero() {
        let r = rref(&Matrix::zeros(2, 2));
        assert_eq!(r.rank, 0);
        assert!(r.matrix.is_zero());
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&Matrix::identity(2)).is_zero());
        let k = kernel_basis(&m(&[&[1, 1]]));
        assert_eq!(k, Subspace::span(2, &[vec![q(1), q(-1)]]));
        let k = kernel_basis(&m(&[&[2, 4]]));
        assert_eq!(k.dim(), 1);
        // normalised on its pivot: (1, -1/2)
        assert_eq!(k.basis(), vec![vec![q(1), q_frac(-1, 2)]]);
    }

    #[test]
    fn solve_examples() {
        let (x, k) = solve_affine(&m(&[&[2]]), &[q(3)]).unwrap().unwrap();
        assert_eq!(x, vec![q_frac(3, 2)]);
        assert!(k.is_zero());
        assert!(solve_affine(&m(&[&[1, 1], &[1, 1]]), &[q(1), q(2)]).unwrap().is_none());
        let (x, k) = solve_affine(&m(&[&[1, 1]]), &[q(2)]).unwrap().unwrap();
        assert_eq!(x, vec![q(2), q(0)]);
        assert_eq!(k, Subspace::span(2, &[vec![q(1), q(-1)]]));
        assert!(matches!(solve_affine(&m(&[&[1, 1]]), &[q(1), q(1)]), Err(Error::Contract(_))));
    }

    #[test]
    fn subquotient_examples() {
        let e1 = vec![q(1), q(0)];
        let e2 = vec![q(0), q(1)];
        let (d, reps) = subquotient_basis(&Subspace::span(2, &[e1.clone()]), &Subspace::zero(2)).unwrap();
        assert_eq!((d, reps), (1, vec![e1.clone()]));
        let c = Subspace::span(2, &[e1.clone()]);
        assert_eq!(subquotient_basis(&c, &c).unwrap().0, 0);
        let cyc = Subspace::span(2, &[e1.clone(), e2.clone()]);
        let bd = Subspace::span(2, &[vec![q(1), q(1)]]);
        assert_eq!(subquotient_basis(&cyc, &bd).unwrap().0, 1);
        assert!(subquotient_basis(&Subspace::span(2, &[e1]), &Subspace::span(2, &[e2])).is_err());
    }

    #[test]
    fn wide_matrices_use_sparse_storage() {
        let w = Matrix::zeros(2, DENSE_COLUMN_LIMIT);
        assert!(w.is_sparse());
        assert!(!Matrix::zeros(2, DENSE_COLUMN_LIMIT - 1).is_sparse());
    }

    #[test]
    fn intersection_and_annihilator() {
        let a = Subspace::span(3, &[vec![q(1), q(0), q(0)], vec![q(0), q(1), q(0)]]);
        let b = Subspace::span(3, &[vec![q(0), q(1), q(0)], vec![q(0), q(0), q(1)]]);
        assert_eq!(a.intersection(&b), Subspace::span(3, &[vec![q(0), q(1), q(0)]]));
        assert_eq!(a.annihilator(), Subspace::span(3, &[vec![q(0), q(0), q(1)]]));
    }
}
