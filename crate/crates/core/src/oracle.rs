//! Brute-force ground truth for small instances.
//!
//! The elimination here deliberately does not reuse [`crate::matrix`]: it works
//! on plain residue tables with its own modular inverse so that tests comparing
//! the two are genuinely independent.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{dims, Error, Result};
use crate::field::{FieldVector, PrimeField};
use crate::matrix::Matrix;

/// Largest solution set [`enum_coset`] will enumerate.
pub const COSET_CAP: u64 = 1 << 22;

/// Every solution of `A·x = b`, with summary statistics.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub solutions: Vec<FieldVector>,
    /// Minimum weight over all solutions (0 when `b = 0`).
    pub min_weight: usize,
    /// Minimum weight over nonzero solutions, if any exist.
    pub min_nonzero_weight: Option<usize>,
    pub count: u64,
}

fn inv_mod(a: u64, q: u64) -> u64 {
    // extended Euclid
    let (mut r0, mut r1) = (q as i64, (a % q) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (t0, t1) = (t1, t0 - k * t1);
    }
    t0.rem_euclid(q as i64) as u64
}

/// Reduced row echelon form of a residue table; returns pivot columns.
fn rref(rows: &mut [Vec<u64>], ncols: usize, q: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = inv_mod(rows[r][c], q);
        for x in rows[r].iter_mut() {
            *x = *x * inv % q;
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..rows[i].len() {
                    rows[i][j] = (rows[i][j] + q * q - f * rows[r][j]) % q;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn table(a: &Matrix) -> Vec<Vec<u64>> {
    a.to_residues()
        .into_iter()
        .map(|r| r.into_iter().map(u64::from).collect())
        .collect()
}

/// A particular solution (if any) and a null-space basis of `A·x = b`.
fn solve_affine(a: &Matrix, b: &FieldVector) -> Result<(Option<Vec<u64>>, Vec<Vec<u64>>)> {
    if b.len() != a.n_rows() {
        return Err(dims("right-hand side length must equal the number of rows"));
    }
    let q = a.field().q() as u64;
    let n = a.n_cols();
    let mut rows = table(a);
    for (i, row) in rows.iter_mut().enumerate() {
        row.push(b.get(i) as u64);
    }
    let pivots = rref(&mut rows, n, q);
    let consistent = rows[pivots.len()..].iter().all(|r| r[n] == 0);
    let particular = consistent.then(|| {
        let mut x = vec![0; n];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = rows[i][n];
        }
        x
    });
    let mut basis = Vec::new();
    for f in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0; n];
        v[f] = 1;
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = (q - rows[i][f]) % q;
        }
        basis.push(v);
    }
    Ok((particular, basis))
}

/// Null-space basis of `A` as residue vectors.
pub fn null_space_basis(a: &Matrix) -> Vec<Vec<u32>> {
    let zero = FieldVector::zeros(a.field(), a.n_rows());
    let (_, basis) = solve_affine(a, &zero).expect("zero right-hand side has matching length");
    basis
        .into_iter()
        .map(|v| v.into_iter().map(|x| x as u32).collect())
        .collect()
}

/// Enumerates the full solution set of `A·x = b` as particular solution plus
/// every combination of a null-space basis.
pub fn enum_coset(a: &Matrix, b: &FieldVector) -> Result<OracleReport> {
    let field = a.field();
    let q = field.q() as u64;
    let (particular, basis) = solve_affine(a, b)?;
    let Some(x0) = particular else {
        return Err(Error::Inconsistent);
    };
    let dim = basis.len() as u32;
    let count = match q.checked_pow(dim) {
        Some(c) if c <= COSET_CAP => c,
        _ => return Err(Error::TooLarge(format!("{q}^{dim}"))),
    };
    let n = a.n_cols();
    let mut coeffs = vec![0u64; basis.len()];
    let mut solutions = Vec::with_capacity(count as usize);
    let mut min_weight = usize::MAX;
    let mut min_nonzero = None;
    loop {
        let mut x = x0.clone();
        for (c, v) in coeffs.iter().zip(&basis) {
            if *c != 0 {
                for j in 0..n {
                    x[j] = (x[j] + c * v[j]) % q;
                }
            }
        }
        let w = x.iter().filter(|&&e| e != 0).count();
        min_weight = min_weight.min(w);
        if w > 0 {
            min_nonzero = Some(min_nonzero.map_or(w, |m: usize| m.min(w)));
        }
        let residues: Vec<u32> = x.iter().map(|&e| e as u32).collect();
        solutions.push(FieldVector::from_residues(field, &residues)?);
        // mixed-radix increment, last coefficient fastest
        let mut carry = true;
        for c in coeffs.iter_mut().rev() {
            *c += 1;
            if *c < q {
                carry = false;
                break;
            }
            *c = 0;
        }
        if carry {
            break;
        }
    }
    Ok(OracleReport {
        solutions,
        min_weight,
        min_nonzero_weight: min_nonzero,
        count,
    })
}

/// Minimum weight over the coset `{x : A·x = b}`.
pub fn min_coset_weight(a: &Matrix, b: &FieldVector) -> Result<usize> {
    Ok(enum_coset(a, b)?.min_weight)
}

/// Minimum weight of a nonzero vector in the kernel of `H`, or `None` when the
/// kernel is trivial.
pub fn min_codeword_weight(h: &Matrix) -> Result<Option<usize>> {
    let zero = FieldVector::zeros(h.field(), h.n_rows());
    Ok(enum_coset(h, &zero)?.min_nonzero_weight)
}

/// Weight thresholds near the Gilbert-Varshamov bound for `[n, k]_q` codes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GvReport {
    pub n: u64,
    pub k: u64,
    pub q: u64,
    /// Largest t with Σ_{i≤t} C(n,i) ≤ q^{n-k}.
    pub primary: u64,
    /// Largest t with Σ_{i≤t-1} C(n,i) ≤ q^{n-k}.
    pub adjacent: u64,
    /// Largest t with Σ_{i≤t} C(n,i)(q-1)^i ≤ q^{n-k} (counts every nonzero value).
    pub qary: u64,
}

fn largest_t(n: u64, budget: &BigUint, weight: u64, shift: u64) -> u64 {
    // largest t ≤ n with Σ_{i ≤ t - shift} C(n,i)·weight^i ≤ budget
    let mut sum = BigUint::from(0u32);
    let mut term = BigUint::from(1u32); // C(n,0)·weight^0
    let mut best = 0;
    for i in 0..=n {
        sum += &term;
        if &sum > budget {
            break;
        }
        best = (i + shift).min(n);
        term = term * (n - i) * weight / (i + 1);
    }
    best
}

/// The primary threshold of [`gv_report`].
pub fn gv_threshold(n: u64, k: u64, q: u64) -> Result<u64> {
    Ok(gv_report(n, k, q)?.primary)
}

/// All threshold conventions, in exact integer arithmetic.
pub fn gv_report(n: u64, k: u64, q: u64) -> Result<GvReport> {
    PrimeField::new(q)?;
    if k > n {
        return Err(Error::InvalidParameter(format!("k={k} exceeds n={n}")));
    }
    if n > 10_000 {
        return Err(Error::InvalidParameter(format!("n={n} exceeds 10000")));
    }
    let budget = BigUint::from(q).pow((n - k) as u32);
    Ok(GvReport {
        n,
        k,
        q,
        primary: largest_t(n, &budget, 1, 0),
        adjacent: largest_t(n, &budget, 1, 1),
        qary: largest_t(n, &budget, q - 1, 0),
    })
}
