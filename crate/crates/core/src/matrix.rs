//! Dense matrices over F_q, column permutations, and the Gaussian-elimination
//! decompositions `P·A·Q` into the canonical block shapes used by the solvers.

use std::fmt;
use std::ops::Range;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{dims, Error, Result};
use crate::field::{FieldVector, PrimeField};

/// Random column permutations tried before a decomposition gives up.
pub const MAX_RETRIES: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: PrimeField,
    cols: usize,
    rows: Vec<FieldVector>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, m: usize, n: usize) -> Self {
        Matrix {
            field,
            cols: n,
            rows: vec![FieldVector::zeros(field, n); m],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let rows = (0..n).map(|i| FieldVector::unit(field, n, i)).collect();
        Matrix {
            field,
            cols: n,
            rows,
        }
    }

    /// Builds a matrix from rows of residues; every row must have the same length.
    pub fn from_rows(field: PrimeField, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut out = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(dims(format!(
                    "row {} has {} entries, expected {cols}",
                    i + 1,
                    r.len()
                )));
            }
            out.push(FieldVector::from_residues(field, r)?);
        }
        Ok(Matrix {
            field,
            cols,
            rows: out,
        })
    }

    pub fn from_vectors(field: PrimeField, cols: usize, rows: Vec<FieldVector>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.field() != field {
                return Err(Error::FieldMismatch {
                    left: field.q(),
                    right: r.field().q(),
                });
            }
            if r.len() != cols {
                return Err(dims(format!(
                    "row {} has {} entries, expected {cols}",
                    i + 1,
                    r.len()
                )));
            }
        }
        Ok(Matrix { field, cols, rows })
    }

    /// The matrix whose columns are the given vectors.
    pub fn from_columns(field: PrimeField, m: usize, columns: &[FieldVector]) -> Result<Self> {
        let mut out = Matrix::zeros(field, m, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != m {
                return Err(dims(format!(
                    "column {} has length {}, expected {m}",
                    j + 1,
                    c.len()
                )));
            }
            for i in c.support() {
                out.rows[i].set(j, c.get(i));
            }
        }
        Ok(out)
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, m: usize, n: usize, rng: &mut R) -> Self {
        let rows = (0..m).map(|_| FieldVector::random(field, n, rng)).collect();
        Matrix {
            field,
            cols: n,
            rows,
        }
    }

    /// Uniform full-row-rank matrix, by rejection. Requires `m <= n`.
    pub fn random_full_row_rank<R: Rng + ?Sized>(
        field: PrimeField,
        m: usize,
        n: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if m > n {
            return Err(Error::InvalidParameter(format!(
                "{m} rows cannot have full rank with {n} columns"
            )));
        }
        loop {
            let a = Self::random(field, m, n, rng);
            if a.rank() == m {
                return Ok(a);
            }
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &FieldVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[FieldVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<FieldVector> {
        self.rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u32) {
        self.rows[i].set(j, x)
    }

    pub fn column(&self, j: usize) -> FieldVector {
        let mut c = FieldVector::zeros(self.field, self.n_rows());
        for (i, r) in self.rows.iter().enumerate() {
            let x = r.get(j);
            if x != 0 {
                c.set(i, x);
            }
        }
        c
    }

    pub fn to_residues(&self) -> Vec<Vec<u32>> {
        self.rows.iter().map(|r| r.to_residues()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.n_rows());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.support() {
                t.rows[j].set(i, r.get(j));
            }
        }
        t
    }

    fn check_field(&self, other_field: PrimeField) -> Result<()> {
        if self.field != other_field {
            return Err(Error::FieldMismatch {
                left: self.field.q(),
                right: other_field.q(),
            });
        }
        Ok(())
    }

    /// Matrix product `self · b`.
    pub fn mul(&self, b: &Matrix) -> Result<Matrix> {
        self.check_field(b.field)?;
        if self.cols != b.n_rows() {
            return Err(dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows(),
                self.cols,
                b.n_rows(),
                b.cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = FieldVector::zeros(self.field, b.cols);
                for j in r.support() {
                    acc.add_scaled(r.get(j), &b.rows[j]);
                }
                acc
            })
            .collect();
        Ok(Matrix {
            field: self.field,
            cols: b.cols,
            rows,
        })
    }

    /// Matrix-vector product `self · v`.
    pub fn mul_vec(&self, v: &FieldVector) -> Result<FieldVector> {
        self.check_field(v.field())?;
        if self.cols != v.len() {
            return Err(dims(format!(
                "cannot multiply {}x{} matrix by vector of length {}",
                self.n_rows(),
                self.cols,
                v.len()
            )));
        }
        let mut out = FieldVector::zeros(self.field, self.n_rows());
        for (i, r) in self.rows.iter().enumerate() {
            let x = r.dot(v);
            if x != 0 {
                out.set(i, x);
            }
        }
        Ok(out)
    }

    pub fn add(&self, b: &Matrix) -> Result<Matrix> {
        self.check_field(b.field)?;
        if self.n_rows() != b.n_rows() || self.cols != b.cols {
            return Err(dims("matrix sum needs equal shapes"));
        }
        let rows = self
            .rows
            .iter()
            .zip(&b.rows)
            .map(|(x, y)| x.add(y))
            .collect();
        Ok(Matrix {
            field: self.field,
            cols: self.cols,
            rows,
        })
    }

    pub fn sub(&self, b: &Matrix) -> Result<Matrix> {
        self.check_field(b.field)?;
        if self.n_rows() != b.n_rows() || self.cols != b.cols {
            return Err(dims("matrix difference needs equal shapes"));
        }
        let rows = self
            .rows
            .iter()
            .zip(&b.rows)
            .map(|(x, y)| x.sub(y))
            .collect();
        Ok(Matrix {
            field: self.field,
            cols: self.cols,
            rows,
        })
    }

    pub fn hstack(&self, b: &Matrix) -> Result<Matrix> {
        self.check_field(b.field)?;
        if self.n_rows() != b.n_rows() {
            return Err(dims("horizontal stacking needs equal row counts"));
        }
        let rows = self
            .rows
            .iter()
            .zip(&b.rows)
            .map(|(x, y)| x.concat(y))
            .collect();
        Ok(Matrix {
            field: self.field,
            cols: self.cols + b.cols,
            rows,
        })
    }

    pub fn vstack(&self, b: &Matrix) -> Result<Matrix> {
        self.check_field(b.field)?;
        if self.cols != b.cols {
            return Err(dims("vertical stacking needs equal column counts"));
        }
        let mut rows = self.rows.clone();
        rows.extend(b.rows.iter().cloned());
        Ok(Matrix {
            field: self.field,
            cols: self.cols,
            rows,
        })
    }

    /// Rows `rows` and columns `cols` (half-open ranges).
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Matrix {
        let out = self.rows[rows]
            .iter()
            .map(|r| r.slice(cols.start, cols.end))
            .collect();
        Matrix {
            field: self.field,
            cols: cols.len(),
            rows: out,
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.n_rows(), idx.len());
        for (i, r) in self.rows.iter().enumerate() {
            for (j, &c) in idx.iter().enumerate() {
                let x = r.get(c);
                if x != 0 {
                    out.rows[i].set(j, x);
                }
            }
        }
        out
    }

    /// `A·Q`: column `i` of the result is column `π(i)` of `A`.
    pub fn permute_columns(&self, q: &Permutation) -> Matrix {
        assert_eq!(q.len(), self.cols, "permutation size mismatch");
        self.select_columns(q.map())
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            if pivot_on(&mut rows, r, c, self.field) {
                r += 1;
            }
        }
        r
    }

    pub fn is_invertible(&self) -> bool {
        self.n_rows() == self.cols && self.rank() == self.cols
    }

    /// Inverse of a square matrix by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.n_rows();
        if n != self.cols {
            return Err(dims(format!("{}x{} matrix is not square", n, self.cols)));
        }
        let aug = self.hstack(&Matrix::identity(self.field, n))?;
        let mut rows = aug.rows;
        for c in 0..n {
            if !pivot_on(&mut rows, c, c, self.field) {
                return Err(Error::NotFullRank {
                    rank: self.rank(),
                    rows: n,
                });
            }
        }
        let out = rows.iter().map(|r| r.slice(n, 2 * n)).collect();
        Ok(Matrix {
            field: self.field,
            cols: n,
            rows: out,
        })
    }
}

/// One Gauss-Jordan step: find a row `>= r` with a nonzero in column `c`, move it
/// to position `r`, normalize it, and clear column `c` in every other row.
/// Returns false (leaving `rows` untouched) when no such row exists.
fn pivot_on(rows: &mut [FieldVector], r: usize, c: usize, field: PrimeField) -> bool {
    let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c) != 0) else {
        return false;
    };
    rows.swap(r, p);
    let lead = rows[r].get(c);
    if lead != 1 {
        let inv = field.inv(lead).expect("pivot is nonzero");
        rows[r].scale(inv);
    }
    let (before, rest) = rows.split_at_mut(r);
    let (pivot, after) = rest.split_first_mut().expect("pivot row exists");
    for row in before.iter_mut().chain(after.iter_mut()) {
        let x = row.get(c);
        if x != 0 {
            row.add_scaled(field.neg(x), pivot);
        }
    }
    true
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A permutation matrix Q stored as the map π with `Q·e_i = e_{π(i)}` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for &x in &map {
            if x >= map.len() || seen[x] {
                return Err(Error::InvalidParameter("mapping is not a bijection".into()));
            }
            seen[x] = true;
        }
        Ok(Permutation { map })
    }

    /// From a 1-based image list, as written in external formats.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidParameter(
                "1-based permutation contains 0".into(),
            ));
        }
        Self::from_map(images.iter().map(|x| x - 1).collect())
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.shuffle(rng);
        Permutation { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// π(i).
    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { map: inv }
    }

    /// `Q·z`, i.e. `x[π(i)] = z[i]`.
    pub fn apply(&self, z: &FieldVector) -> FieldVector {
        assert_eq!(z.len(), self.map.len(), "permutation size mismatch");
        let mut x = FieldVector::zeros(z.field(), z.len());
        for i in z.support() {
            x.set(self.map[i], z.get(i));
        }
        x
    }

    /// `Q⁻¹·x`, i.e. `z[i] = x[π(i)]`.
    pub fn apply_inverse(&self, x: &FieldVector) -> FieldVector {
        assert_eq!(x.len(), self.map.len(), "permutation size mismatch");
        let mut z = FieldVector::zeros(x.field(), x.len());
        for (i, &p) in self.map.iter().enumerate() {
            let v = x.get(p);
            if v != 0 {
                z.set(i, v);
            }
        }
        z
    }

    /// `Q·M`: row `π(i)` of the result is row `i` of `M`.
    pub fn apply_rows(&self, m: &Matrix) -> Matrix {
        assert_eq!(m.n_rows(), self.map.len(), "permutation size mismatch");
        let mut rows = vec![FieldVector::zeros(m.field(), m.n_cols()); m.n_rows()];
        for (i, r) in m.rows().iter().enumerate() {
            rows[self.map[i]] = r.clone();
        }
        Matrix {
            field: m.field(),
            cols: m.n_cols(),
            rows,
        }
    }

    pub fn to_matrix(&self, field: PrimeField) -> Matrix {
        let n = self.map.len();
        let mut m = Matrix::zeros(field, n, n);
        for (i, &p) in self.map.iter().enumerate() {
            m.set(p, i, 1);
        }
        m
    }
}

/// Canonical shapes of `P·A·Q` (r = rank, k = n - r):
///
/// | form | shape |
/// |---|---|
/// | `RightIdFull` | `[V I_r]` |
/// | `LeftIdFull` | `[I_r A2]` |
/// | `RightIdDeficient` | `[A1 I_r; 0 0]` |
/// | `LeftIdDeficient` | `[I_r A2; 0 0]` |
/// | `PartialGe(ℓ)` | `[V1 0; V3 I_{r-ℓ}]`, V1 is ℓ×(k+ℓ) |
/// | `MultiId(ℓ1..ℓj)` | `[V I_r]` with V and I_r split into row blocks ℓ1, .., ℓj, r-Σℓ |
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Form {
    RightIdFull,
    LeftIdFull,
    RightIdDeficient,
    LeftIdDeficient,
    PartialGe(usize),
    MultiId(Vec<usize>),
}

impl Form {
    fn requires_full_rank(&self) -> bool {
        !matches!(self, Form::RightIdDeficient | Form::LeftIdDeficient)
    }

    fn identity_on_left(&self) -> bool {
        matches!(self, Form::LeftIdFull | Form::LeftIdDeficient)
    }

    /// True for forms of shape `[V I_r]` (possibly with block bookkeeping).
    pub fn is_right_identity_full(&self) -> bool {
        matches!(
            self,
            Form::RightIdFull | Form::MultiId(_) | Form::PartialGe(0)
        )
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::RightIdFull => f.write_str("RIGHT_ID_FULL"),
            Form::LeftIdFull => f.write_str("LEFT_ID_FULL"),
            Form::RightIdDeficient => f.write_str("RIGHT_ID_DEFICIENT"),
            Form::LeftIdDeficient => f.write_str("LEFT_ID_DEFICIENT"),
            Form::PartialGe(l) => write!(f, "PARTIAL_GE({l})"),
            Form::MultiId(ls) => {
                let parts: Vec<String> = ls.iter().map(|l| l.to_string()).collect();
                write!(f, "MULTI_ID({})", parts.join(","))
            }
        }
    }
}

/// A decomposition `P·A·Q` into one of the canonical [`Form`]s.
///
/// `block` is the non-identity part restricted to the first `r` rows:
/// V (right forms, r×k), A2 (left forms, r×k), or `[V1; V3]` (partial form,
/// r×(k+ℓ)). Its columns are cached because candidate generation is a sum of
/// block columns.
#[derive(Clone, Debug)]
pub struct Transformation {
    p: Matrix,
    q: Permutation,
    form: Form,
    rank: usize,
    block: Matrix,
    block_cols: Vec<FieldVector>,
}

impl Transformation {
    pub fn p(&self) -> &Matrix {
        &self.p
    }

    pub fn q(&self) -> &Permutation {
        &self.q
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn field(&self) -> PrimeField {
        self.p.field()
    }

    /// Number of rows of A.
    pub fn m(&self) -> usize {
        self.p.n_rows()
    }

    /// Number of columns of A.
    pub fn n(&self) -> usize {
        self.q.len()
    }

    /// Columns outside the identity block: n - r, or k + ℓ for the partial form.
    pub fn free_cols(&self) -> usize {
        self.block.n_cols()
    }

    /// The non-identity block (V, A1, A2, or `[V1; V3]`).
    pub fn block(&self) -> &Matrix {
        &self.block
    }

    /// Column `j` of [`Self::block`].
    #[inline]
    pub fn block_col(&self, j: usize) -> &FieldVector {
        &self.block_cols[j]
    }

    /// ℓ for the partial form; 0 otherwise.
    pub fn ell(&self) -> usize {
        match self.form {
            Form::PartialGe(l) => l,
            _ => 0,
        }
    }

    /// True for `PartialGe(r)`, where the identity block is empty.
    pub fn is_degenerate(&self) -> bool {
        matches!(self.form, Form::PartialGe(l) if l == self.rank)
    }

    /// Row ranges of the identity blocks for `MultiId`; a single range otherwise.
    pub fn row_blocks(&self) -> Vec<Range<usize>> {
        match &self.form {
            Form::MultiId(ls) => {
                let mut out = Vec::new();
                let mut start = 0;
                for &l in ls {
                    out.push(start..start + l);
                    start += l;
                }
                if start < self.rank {
                    out.push(start..self.rank);
                }
                out
            }
            _ => vec![0..self.rank],
        }
    }

    /// `P·b`.
    pub fn transform_rhs(&self, b: &FieldVector) -> Result<FieldVector> {
        self.p.mul_vec(b)
    }

    /// Rebuilds the canonical matrix `P·A·Q` from the stored blocks.
    pub fn canonical(&self) -> Matrix {
        let f = self.field();
        let (m, n, r, w) = (self.m(), self.n(), self.rank, self.free_cols());
        let mut out = Matrix::zeros(f, m, n);
        match self.form {
            Form::LeftIdFull | Form::LeftIdDeficient => {
                for i in 0..r {
                    out.set(i, i, 1);
                    for j in self.block.row(i).support() {
                        out.set(i, r + j, self.block.get(i, j));
                    }
                }
            }
            Form::PartialGe(l) => {
                for i in 0..r {
                    for j in self.block.row(i).support() {
                        out.set(i, j, self.block.get(i, j));
                    }
                    if i >= l {
                        out.set(i, w + (i - l), 1);
                    }
                }
            }
            _ => {
                for i in 0..r {
                    for j in self.block.row(i).support() {
                        out.set(i, j, self.block.get(i, j));
                    }
                    out.set(i, w + i, 1);
                }
            }
        }
        out
    }

    /// Re-multiplies `P·A·Q` and compares against the canonical shape; also
    /// checks that P is invertible.
    pub fn verify(&self, a: &Matrix) -> bool {
        if a.n_rows() != self.m() || a.n_cols() != self.n() || a.field() != self.field() {
            return false;
        }
        let Ok(pa) = self.p.mul(a) else { return false };
        pa.permute_columns(&self.q) == self.canonical() && self.p.is_invertible()
    }

    /// Wraps an externally supplied `(P, Q)` pair, validating that `P·A·Q`
    /// has the requested shape.
    pub fn from_parts(a: &Matrix, p: Matrix, q: Permutation, form: Form) -> Result<Self> {
        if p.n_rows() != a.n_rows() || p.n_cols() != a.n_rows() || q.len() != a.n_cols() {
            return Err(dims("P must be m×m and Q n×n"));
        }
        let reduced = p.mul(a)?.permute_columns(&q);
        let rank = reduced.rank();
        let t = Self::assemble(&reduced, p, q, form, rank)?;
        if !t.verify(a) {
            return Err(Error::WrongForm {
                expected: t.form.to_string(),
                found: "other".into(),
            });
        }
        Ok(t)
    }

    fn assemble(
        reduced: &Matrix,
        p: Matrix,
        q: Permutation,
        form: Form,
        rank: usize,
    ) -> Result<Self> {
        let n = reduced.n_cols();
        let block = match form {
            Form::LeftIdFull | Form::LeftIdDeficient => reduced.submatrix(0..rank, rank..n),
            Form::PartialGe(l) => reduced.submatrix(0..rank, 0..n - rank + l),
            _ => reduced.submatrix(0..rank, 0..n - rank),
        };
        let block_cols = (0..block.n_cols()).map(|j| block.column(j)).collect();
        Ok(Transformation {
            p,
            q,
            form,
            rank,
            block,
            block_cols,
        })
    }
}

/// Decomposes `A` into the requested canonical form with a random column
/// permutation drawn from `rng`, retrying up to [`MAX_RETRIES`] permutations.
pub fn decompose<R: Rng + ?Sized>(a: &Matrix, form: Form, rng: &mut R) -> Result<Transformation> {
    let m = a.n_rows();
    let rank = a.rank();
    if form.requires_full_rank() && rank != m {
        return Err(Error::NotFullRank { rank, rows: m });
    }
    match &form {
        Form::PartialGe(l) if *l > rank => {
            return Err(Error::InvalidParameter(format!(
                "ℓ={l} exceeds rank {rank}"
            )));
        }
        Form::MultiId(ls) if ls.iter().sum::<usize>() > rank => {
            return Err(Error::InvalidParameter(format!(
                "block sizes sum to {} which exceeds rank {rank}",
                ls.iter().sum::<usize>()
            )));
        }
        _ => {}
    }
    for _ in 0..MAX_RETRIES {
        let q = Permutation::random(a.n_cols(), rng);
        if let Some(t) = decompose_with_permutation(a, form.clone(), q, rank)? {
            return Ok(t);
        }
    }
    Err(Error::RetryExhausted {
        retries: MAX_RETRIES,
    })
}

/// `[V1 0; V3 I_{r-ℓ}]` decomposition of a full-row-rank matrix.
pub fn decompose_partial<R: Rng + ?Sized>(
    a: &Matrix,
    ell: usize,
    rng: &mut R,
) -> Result<Transformation> {
    decompose(a, Form::PartialGe(ell), rng)
}

/// `[V I_r]` with the identity split into blocks of the listed sizes.
pub fn decompose_multi<R: Rng + ?Sized>(
    a: &Matrix,
    ells: &[usize],
    rng: &mut R,
) -> Result<Transformation> {
    decompose(a, Form::MultiId(ells.to_vec()), rng)
}

/// Deterministic elimination for a fixed column permutation. Returns `None`
/// when the pivot block of `A·Q` is singular. `rank` must equal `rank(A)`.
pub fn decompose_with_permutation(
    a: &Matrix,
    form: Form,
    q: Permutation,
    rank: usize,
) -> Result<Option<Transformation>> {
    let f = a.field();
    let (m, n) = (a.n_rows(), a.n_cols());
    let r = rank;
    let pivots = match form {
        Form::PartialGe(l) => n - (r - l)..n,
        _ if form.identity_on_left() => 0..r,
        _ => n - r..n,
    };
    let aq = a.permute_columns(&q);
    let mut rows: Vec<FieldVector> = aq
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| row.concat(&FieldVector::unit(f, m, i)))
        .collect();
    for (i, c) in pivots.enumerate() {
        if !pivot_on(&mut rows, i, c, f) {
            return Ok(None);
        }
    }
    if let Form::PartialGe(l) = form {
        // pivot rows go to the bottom so that the top ℓ rows read [V1 0]
        rows[..r].rotate_left(r - l);
    }
    let reduced: Vec<FieldVector> = rows.iter().map(|x| x.slice(0, n)).collect();
    if reduced[r..].iter().any(|x| !x.is_zero()) {
        return Ok(None);
    }
    let p_rows = rows.iter().map(|x| x.slice(n, n + m)).collect();
    let p = Matrix {
        field: f,
        cols: m,
        rows: p_rows,
    };
    let reduced = Matrix {
        field: f,
        cols: n,
        rows: reduced,
    };
    Ok(Some(Transformation::assemble(&reduced, p, q, form, r)?))
}
