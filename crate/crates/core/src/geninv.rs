//! Generalized inverses: verification, the `[X1; I_r - V·X1]` parameterization,
//! enumeration, steering of `X1·b̄`, the null-space parameterization, and the
//! rewrite of an arbitrary GI as `Q̄·[0; I_r]·P̄`.

use std::sync::{Arc, OnceLock};

use crate::error::{dims, Error, Result};
use crate::field::FieldVector;
use crate::matrix::{decompose, Form, Matrix, Transformation};
use crate::rng;

/// Default bound on the number of GIs [`enumerate_gi`] will produce.
pub const ENUMERATION_CAP: u64 = 1 << 24;

/// True iff `A·X·A = A`.
pub fn is_gi(a: &Matrix, x: &Matrix) -> Result<bool> {
    if x.n_rows() != a.n_cols() || x.n_cols() != a.n_rows() {
        return Err(dims(format!(
            "GI of a {}x{} matrix must be {}x{}, got {}x{}",
            a.n_rows(),
            a.n_cols(),
            a.n_cols(),
            a.n_rows(),
            x.n_rows(),
            x.n_cols()
        )));
    }
    Ok(&a.mul(x)?.mul(a)? == a)
}

/// A generalized inverse, optionally remembering the `(T, X1)` it came from.
///
/// With an origin, `X` is only materialized on demand and `X·b` is computed
/// as `Q·[X1·b̄; b̄ - V·X1·b̄]` with `b̄ = P·b`.
#[derive(Clone, Debug)]
pub struct GenInverse {
    x: OnceLock<Matrix>,
    origin: Option<(Arc<Transformation>, Matrix)>,
}

impl GenInverse {
    pub fn from_matrix(x: Matrix) -> Self {
        let cell = OnceLock::new();
        let _ = cell.set(x);
        GenInverse {
            x: cell,
            origin: None,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        self.x.get_or_init(|| {
            let (t, x1) = self
                .origin
                .as_ref()
                .expect("GI without matrix has an origin");
            materialize(t, x1)
        })
    }

    pub fn x1(&self) -> Option<&Matrix> {
        self.origin.as_ref().map(|(_, x1)| x1)
    }

    pub fn transformation(&self) -> Option<&Arc<Transformation>> {
        self.origin.as_ref().map(|(t, _)| t)
    }

    /// `X·b`.
    pub fn apply(&self, b: &FieldVector) -> Result<FieldVector> {
        match &self.origin {
            Some((t, x1)) => {
                let sbar = t.transform_rhs(b)?;
                let z1 = x1.mul_vec(&sbar)?;
                Ok(solution_from_z1(t, &sbar, &z1))
            }
            None => self.matrix().mul_vec(b),
        }
    }
}

fn materialize(t: &Transformation, x1: &Matrix) -> Matrix {
    let lower = Matrix::identity(t.field(), t.rank())
        .sub(&t.block().mul(x1).expect("shapes checked at construction"))
        .expect("shapes checked at construction");
    let stacked = x1.vstack(&lower).expect("shapes checked at construction");
    t.q()
        .apply_rows(&stacked)
        .mul(t.p())
        .expect("shapes checked at construction")
}

fn require_right_identity(t: &Transformation) -> Result<()> {
    if !t.form().is_right_identity_full() {
        return Err(Error::WrongForm {
            expected: Form::RightIdFull.to_string(),
            found: t.form().to_string(),
        });
    }
    Ok(())
}

/// The GI `Q·[X1; I_r - V·X1]·P` for a transformation of shape `[V I_r]`.
pub fn gi_from_x1(t: &Arc<Transformation>, x1: Matrix) -> Result<GenInverse> {
    require_right_identity(t)?;
    if x1.n_rows() != t.free_cols() || x1.n_cols() != t.rank() {
        return Err(dims(format!(
            "X1 must be {}x{}, got {}x{}",
            t.free_cols(),
            t.rank(),
            x1.n_rows(),
            x1.n_cols()
        )));
    }
    if x1.field() != t.field() {
        return Err(Error::FieldMismatch {
            left: t.field().q(),
            right: x1.field().q(),
        });
    }
    Ok(GenInverse {
        x: OnceLock::new(),
        origin: Some((Arc::clone(t), x1)),
    })
}

/// `Q·[z1; s̄ - V·z1]`, the solution selected by any X1 with `X1·s̄ = z1`.
pub fn solution_from_z1(t: &Transformation, sbar: &FieldVector, z1: &FieldVector) -> FieldVector {
    let z2 = redundancy_part(t, sbar, z1);
    t.q().apply(&z1.concat(&z2))
}

/// `s̄ - V·z1`.
pub fn redundancy_part(t: &Transformation, sbar: &FieldVector, z1: &FieldVector) -> FieldVector {
    let f = t.field();
    let mut z2 = sbar.clone();
    for j in z1.support() {
        z2.add_scaled(f.neg(z1.get(j)), t.block_col(j));
    }
    z2
}

/// Iterator over all X1 ∈ M_{k,r}(F_q) in lexicographic row-major order
/// (the last entry changes fastest).
pub struct X1Enumerator {
    t: Arc<Transformation>,
    digits: Vec<u32>,
    done: bool,
}

impl Iterator for X1Enumerator {
    type Item = Matrix;

    fn next(&mut self) -> Option<Matrix> {
        if self.done {
            return None;
        }
        let (k, r) = (self.t.free_cols(), self.t.rank());
        let rows: Vec<Vec<u32>> = (0..k)
            .map(|i| self.digits[i * r..(i + 1) * r].to_vec())
            .collect();
        let x1 = if k == 0 {
            Matrix::zeros(self.t.field(), 0, r)
        } else {
            Matrix::from_rows(self.t.field(), &rows).expect("digits are canonical")
        };
        let q = self.t.field().q();
        self.done = true;
        for d in self.digits.iter_mut().rev() {
            *d += 1;
            if *d < q {
                self.done = false;
                break;
            }
            *d = 0;
        }
        Some(x1)
    }
}

fn enumeration_size(t: &Transformation) -> Result<u64> {
    let exp = (t.free_cols() * t.rank()) as u32;
    let q = t.field().q() as u64;
    match q.checked_pow(exp) {
        Some(size) if size <= ENUMERATION_CAP => Ok(size),
        _ => Err(Error::CapExceeded {
            size: format!("{q}^{exp}"),
            cap: ENUMERATION_CAP,
        }),
    }
}

/// All X1 blocks for a `[V I_r]` transformation.
pub fn enumerate_x1(t: &Arc<Transformation>) -> Result<X1Enumerator> {
    require_right_identity(t)?;
    enumeration_size(t)?;
    Ok(X1Enumerator {
        t: Arc::clone(t),
        digits: vec![0; t.free_cols() * t.rank()],
        done: false,
    })
}

/// Every GI of A, q^{k·r} of them, as a stream over X1.
pub fn enumerate_gi(t: &Arc<Transformation>) -> Result<impl Iterator<Item = GenInverse>> {
    let t2 = Arc::clone(t);
    Ok(enumerate_x1(t)?
        .map(move |x1| gi_from_x1(&t2, x1).expect("enumerated X1 has the right shape")))
}

/// The X1 with a single nonzero column `j` (first index with `s̄(j) ≠ 0`)
/// holding `w·s̄(j)⁻¹`, so that `X1·s̄ = w`.
pub fn steer_column(sbar: &FieldVector, w: &FieldVector) -> Result<Matrix> {
    let f = sbar.field();
    let Some(&j) = sbar.support().first() else {
        return Err(Error::ZeroSyndrome);
    };
    let inv = f.inv(sbar.get(j))?;
    let mut x1 = Matrix::zeros(f, w.len(), sbar.len());
    for i in w.support() {
        x1.set(i, j, f.mul(w.get(i), inv));
    }
    Ok(x1)
}

/// [`steer_column`] with shapes checked against the transformation.
pub fn steer_x1(t: &Transformation, sbar: &FieldVector, w: &FieldVector) -> Result<Matrix> {
    if sbar.len() != t.rank() || w.len() != t.free_cols() {
        return Err(dims(format!(
            "steering needs s̄ of length {} and w of length {}",
            t.rank(),
            t.free_cols()
        )));
    }
    steer_column(sbar, w)
}

/// Null-space vector `Q·[w; -V·w]`, parameterized by `w = Z·P·b`.
pub fn null_from_w(t: &Transformation, bbar: &FieldVector, w: &FieldVector) -> Result<FieldVector> {
    require_right_identity(t)?;
    if bbar.is_zero() {
        return Err(Error::ZeroVector);
    }
    if w.len() != t.free_cols() {
        return Err(dims(format!("w must have length {}", t.free_cols())));
    }
    let zero = FieldVector::zeros(t.field(), t.rank());
    Ok(solution_from_z1(t, &zero, w))
}

/// Rewrites a GI `X` of a full-row-rank `A` as `X = Q̄·[0; I_r]·P̄` with
/// `P̄·A·Q̄ = [V̄ I_r]`. Q̄ is in general not a permutation.
///
/// With `P·A·Q = [V I_r]` and `B = Q⁻¹·X·P⁻¹`, column elimination gives
/// `B·E = B'` in reduced column echelon form. Then `Y = E⁻¹`, `Z = [C B']`
/// where C holds unit vectors on the non-pivot rows of `B'`, `P̄ = Y·P` and
/// `Q̄ = Q·Z`.
pub fn gi_to_prange_pair(a: &Matrix, x: &Matrix) -> Result<(Matrix, Matrix)> {
    let (m, n) = (a.n_rows(), a.n_cols());
    if a.rank() != m {
        return Err(Error::NotFullRank {
            rank: a.rank(),
            rows: m,
        });
    }
    if !is_gi(a, x)? {
        return Err(Error::NotAGi);
    }
    let f = a.field();
    let t = decompose(a, Form::RightIdFull, &mut rng::stream(0, 0))?;
    let qmat = t.q().to_matrix(f);
    let b = t.q().inverse().apply_rows(x).mul(&t.p().inverse()?)?;

    // Row-reduce Bᵀ while tracking the operations: Eᵀ·Bᵀ = R.
    let bt = b.transpose();
    let aug = bt.hstack(&Matrix::identity(f, m))?;
    let mut rows = aug.into_rows();
    let mut pivots = Vec::with_capacity(m);
    for c in 0..n {
        if pivots.len() == m {
            break;
        }
        if pivot_row(&mut rows, pivots.len(), c, f) {
            pivots.push(c);
        }
    }
    if pivots.len() != m {
        return Err(Error::NotAGi);
    }
    let et = Matrix::from_vectors(f, m, rows.iter().map(|r| r.slice(n, n + m)).collect())?;
    let reduced = Matrix::from_vectors(f, n, rows.iter().map(|r| r.slice(0, n)).collect())?;
    let b_prime = reduced.transpose();
    let y = et.transpose().inverse()?;

    let mut z_cols = Vec::with_capacity(n);
    for i in (0..n).filter(|i| !pivots.contains(i)) {
        z_cols.push(FieldVector::unit(f, n, i));
    }
    for j in 0..m {
        z_cols.push(b_prime.column(j));
    }
    let z = Matrix::from_columns(f, n, &z_cols)?;
    let p_bar = y.mul(t.p())?;
    let q_bar = qmat.mul(&z)?;

    let mut zero_i = Matrix::zeros(f, n - m, m).vstack(&Matrix::identity(f, m))?;
    zero_i = q_bar.mul(&zero_i)?.mul(&p_bar)?;
    let shape = p_bar.mul(a)?.mul(&q_bar)?;
    if &zero_i != x || shape.submatrix(0..m, n - m..n) != Matrix::identity(f, m) {
        return Err(Error::NotAGi);
    }
    Ok((p_bar, q_bar))
}

fn pivot_row(rows: &mut [FieldVector], r: usize, c: usize, f: crate::field::PrimeField) -> bool {
    let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c) != 0) else {
        return false;
    };
    rows.swap(r, p);
    let inv = f.inv(rows[r].get(c)).expect("pivot is nonzero");
    rows[r].scale(inv);
    let pivot = rows[r].clone();
    for (i, row) in rows.iter_mut().enumerate() {
        let x = row.get(c);
        if i != r && x != 0 {
            row.add_scaled(f.neg(x), &pivot);
        }
    }
    true
}

/// Steers the support of a solution of `A·x = b` on the positions outside
/// the identity block of a left- or right-identity decomposition (full or
/// rank deficient).
///
/// `target` lists original 0-based coordinates and must lie in
/// `π([r, n))` for left-identity forms or `π([0, n-r))` for right-identity
/// forms. Returns the GI used (materialized) and `x = X·b`, whose support
/// restricted to that region is exactly `target`.
pub fn steer_support(
    t: &Transformation,
    b: &FieldVector,
    target: &[usize],
) -> Result<(GenInverse, FieldVector)> {
    let f = t.field();
    let (m, n, r) = (t.m(), t.n(), t.rank());
    let left = match t.form() {
        Form::LeftIdFull | Form::LeftIdDeficient => true,
        Form::RightIdFull | Form::RightIdDeficient | Form::MultiId(_) => false,
        other => {
            return Err(Error::WrongForm {
                expected: "an identity-block form".into(),
                found: other.to_string(),
            })
        }
    };
    let bbar = t.transform_rhs(b)?;
    let head = bbar.slice(0, r);
    let Some(&j) = head.support().first() else {
        return Err(Error::ZeroSyndrome);
    };
    let region = if left { r..n } else { 0..n - r };
    let inv_q = t.q().inverse();
    let mut chosen = Matrix::zeros(f, n - r, m);
    for &pos in target {
        let local = inv_q.image(pos);
        if !region.contains(&local) {
            return Err(Error::InvalidParameter(format!(
                "position {} is not in the steerable region",
                pos + 1
            )));
        }
        chosen.set(local - region.start, j, 1);
    }
    // The other block is fixed by the GI block equation: I - A2·X3 (left) or I - A1·X1 (right).
    let mut other = Matrix::identity(f, r).hstack(&Matrix::zeros(f, r, m - r))?;
    other = other.sub(&t.block().mul(&chosen)?)?;
    let stacked = if left {
        other.vstack(&chosen)?
    } else {
        chosen.vstack(&other)?
    };
    let x = t.q().apply_rows(&stacked).mul(t.p())?;
    let sol = x.mul_vec(b)?;
    Ok((GenInverse::from_matrix(x), sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::matrix::{decompose_with_permutation, Permutation};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn m2(rows: &[Vec<u32>]) -> Matrix {
        Matrix::from_rows(PrimeField::BINARY, rows).unwrap()
    }

    fn v(q: u64, xs: &[u32]) -> FieldVector {
        FieldVector::from_residues(PrimeField::new(q).unwrap(), xs).unwrap()
    }

    #[test]
    fn is_gi_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = PrimeField::new(5).unwrap();
        let a = Matrix::random_full_row_rank(f, 4, 4, &mut rng).unwrap();
        assert!(is_gi(&a, &a.inverse().unwrap()).unwrap());
        let a = m2(&[vec![1, 0, 1], vec![0, 1, 1]]);
        assert!(is_gi(&a, &m2(&[vec![1, 0], vec![0, 1], vec![0, 0]])).unwrap());
        assert!(!is_gi(&a, &Matrix::zeros(PrimeField::BINARY, 3, 2)).unwrap());
        assert!(is_gi(&a, &Matrix::zeros(PrimeField::BINARY, 2, 2)).is_err());
    }

    #[test]
    fn prange_gi_is_q_zero_identity_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = PrimeField::new(3).unwrap();
        let a = Matrix::random_full_row_rank(f, 3, 7, &mut rng).unwrap();
        let t = Arc::new(decompose(&a, Form::RightIdFull, &mut rng).unwrap());
        let gi = gi_from_x1(&t, Matrix::zeros(f, 4, 3)).unwrap();
        let expected = t
            .q()
            .apply_rows(
                &Matrix::zeros(f, 4, 3)
                    .vstack(&Matrix::identity(f, 3))
                    .unwrap(),
            )
            .mul(t.p())
            .unwrap();
        assert_eq!(gi.matrix(), &expected);
        assert!(is_gi(&a, gi.matrix()).unwrap());
    }

    #[test]
    fn fast_apply_matches_materialized_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for q in [2u64, 3, 7] {
            let f = PrimeField::new(q).unwrap();
            let a = Matrix::random_full_row_rank(f, 4, 9, &mut rng).unwrap();
            let t = Arc::new(decompose(&a, Form::RightIdFull, &mut rng).unwrap());
            let gi = gi_from_x1(&t, Matrix::random(f, 5, 4, &mut rng)).unwrap();
            let b = FieldVector::random(f, 4, &mut rng);
            assert_eq!(gi.apply(&b).unwrap(), gi.matrix().mul_vec(&b).unwrap());
            assert_eq!(a.mul_vec(&gi.apply(&b).unwrap()).unwrap(), b);
        }
    }

    #[test]
    fn gi_from_x1_rejects_bad_shapes() {
        let a = m2(&[vec![1, 0, 1], vec![0, 1, 1]]);
        let t = Arc::new(decompose(&a, Form::RightIdFull, &mut rng::stream(1, 0)).unwrap());
        assert!(matches!(
            gi_from_x1(&t, Matrix::zeros(PrimeField::BINARY, 2, 2)),
            Err(Error::DimensionMismatch(_))
        ));
        let left = Arc::new(decompose(&a, Form::LeftIdFull, &mut rng::stream(1, 0)).unwrap());
        assert!(matches!(
            gi_from_x1(&left, Matrix::zeros(PrimeField::BINARY, 1, 2)),
            Err(Error::WrongForm { .. })
        ));
    }

    #[test]
    fn enumeration_counts() {
        let a = m2(&[vec![1, 0, 1], vec![0, 1, 1]]);
        let t = Arc::new(decompose(&a, Form::RightIdFull, &mut rng::stream(1, 0)).unwrap());
        let gis: Vec<Matrix> = enumerate_gi(&t)
            .unwrap()
            .map(|g| g.matrix().clone())
            .collect();
        assert_eq!(gis.len(), 4);
        let mut brute = Vec::new();
        for bits in 0u32..64 {
            let rows: Vec<Vec<u32>> = (0..3)
                .map(|i| vec![(bits >> (2 * i)) & 1, (bits >> (2 * i + 1)) & 1])
                .collect();
            let x = m2(&rows);
            if is_gi(&a, &x).unwrap() {
                brute.push(x);
            }
        }
        assert_eq!(brute.len(), 4);
        for x in &brute {
            assert!(gis.contains(x));
        }

        let f = PrimeField::new(7).unwrap();
        let sq = Matrix::random_full_row_rank(f, 3, 3, &mut rng::stream(2, 0)).unwrap();
        let ts = Arc::new(decompose(&sq, Form::RightIdFull, &mut rng::stream(2, 1)).unwrap());
        let only: Vec<GenInverse> = enumerate_gi(&ts).unwrap().collect();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].matrix(), &sq.inverse().unwrap());
    }

    #[test]
    fn enumeration_order_is_row_major_lexicographic() {
        let a = m2(&[vec![1, 0, 1, 1], vec![0, 1, 1, 0]]);
        let t = Arc::new(decompose(&a, Form::RightIdFull, &mut rng::stream(3, 0)).unwrap());
        let x1s: Vec<Vec<u32>> = enumerate_x1(&t)
            .unwrap()
            .map(|x| x.to_residues().concat())
            .collect();
        assert_eq!(x1s.len(), 16);
        assert_eq!(x1s[0], vec![0, 0, 0, 0]);
        assert_eq!(x1s[1], vec![0, 0, 0, 1]);
        assert_eq!(x1s[2], vec![0, 0, 1, 0]);
        assert_eq!(x1s[15], vec![1, 1, 1, 1]);
    }

    #[test]
    fn enumeration_cap() {
        let f = PrimeField::BINARY;
        let a = Matrix::random_full_row_rank(f, 5, 10, &mut rng::stream(4, 0)).unwrap();
        let t = Arc::new(decompose(&a, Form::RightIdFull, &mut rng::stream(4, 1)).unwrap());
        assert!(matches!(enumerate_gi(&t), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn steering_examples() {
        let w0 = v(2, &[0]);
        let x1 = steer_column(&v(2, &[1, 1]), &w0).unwrap();
        assert!(x1.is_zero());
        let x1 = steer_column(&v(2, &[1, 1]), &v(2, &[1])).unwrap();
        assert_eq!(x1.mul_vec(&v(2, &[1, 1])).unwrap(), v(2, &[1]));
        assert_eq!(x1.to_residues(), vec![vec![1, 0]]);
        let x1 = steer_column(&v(7, &[0, 3]), &v(7, &[2, 4])).unwrap();
        assert_eq!(x1.to_residues(), vec![vec![0, 3], vec![0, 6]]);
        assert_eq!(x1.mul_vec(&v(7, &[0, 3])).unwrap(), v(7, &[2, 4]));
        assert!(matches!(
            steer_column(&v(7, &[0, 0]), &v(7, &[1])),
            Err(Error::ZeroSyndrome)
        ));
    }

    #[test]
    fn distinct_x1_same_solution() {
        let f = PrimeField::new(3).unwrap();
        let a = Matrix::random_full_row_rank(f, 3, 6, &mut rng::stream(5, 0)).unwrap();
        let t = Arc::new(decompose(&a, Form::RightIdFull, &mut rng::stream(5, 1)).unwrap());
        let s = v(3, &[1, 2, 1]);
        let sbar = t.transform_rhs(&s).unwrap();
        let w = v(3, &[2, 0, 1]);
        let x1a = steer_x1(&t, &sbar, &w).unwrap();
        // a second X1: add a matrix whose columns are orthogonal to s̄
        let mut x1b = x1a.clone();
        let j = sbar.support()[0];
        let other = (0..3).find(|&c| c != j).unwrap();
        let c = f.neg(f.mul(sbar.get(other), f.inv(sbar.get(j)).unwrap()));
        x1b.set(0, other, f.add(x1b.get(0, other), 1));
        x1b.set(0, j, f.add(x1b.get(0, j), c));
        assert_ne!(x1a, x1b);
        let ga = gi_from_x1(&t, x1a).unwrap();
        let gb = gi_from_x1(&t, x1b).unwrap();
        assert_ne!(ga.matrix(), gb.matrix());
        assert_eq!(ga.apply(&s).unwrap(), gb.apply(&s).unwrap());
    }

    #[test]
    fn null_space_example() {
        let a = m2(&[vec![1, 0, 1], vec![0, 1, 1]]);
        let t = decompose(&a, Form::RightIdFull, &mut rng::stream(6, 0)).unwrap();
        let bbar = t.transform_rhs(&v(2, &[1, 1])).unwrap();
        assert!(null_from_w(&t, &bbar, &v(2, &[0])).unwrap().is_zero());
        assert_eq!(
            null_from_w(&t, &bbar, &v(2, &[1])).unwrap(),
            v(2, &[1, 1, 1])
        );
        assert!(matches!(
            null_from_w(&t, &v(2, &[0, 0]), &v(2, &[1])),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn prange_pair_examples() {
        let f = PrimeField::BINARY;
        let a = Matrix::random_full_row_rank(f, 2, 4, &mut rng::stream(7, 0)).unwrap();
        let t = Arc::new(decompose(&a, Form::RightIdFull, &mut rng::stream(7, 1)).unwrap());
        for x1 in enumerate_x1(&t).unwrap() {
            let gi = gi_from_x1(&t, x1).unwrap();
            let (pb, qb) = gi_to_prange_pair(&a, gi.matrix()).unwrap();
            let lhs = qb
                .mul(
                    &Matrix::zeros(f, 2, 2)
                        .vstack(&Matrix::identity(f, 2))
                        .unwrap(),
                )
                .unwrap()
                .mul(&pb)
                .unwrap();
            assert_eq!(&lhs, gi.matrix());
            let shape = pb.mul(&a).unwrap().mul(&qb).unwrap();
            assert_eq!(shape.submatrix(0..2, 2..4), Matrix::identity(f, 2));
        }
        assert!(matches!(
            gi_to_prange_pair(&a, &Matrix::zeros(f, 4, 2)),
            Err(Error::NotAGi)
        ));
    }

    #[test]
    fn support_steering_on_deficient_forms() {
        let f = PrimeField::new(3).unwrap();
        let base = Matrix::random_full_row_rank(f, 2, 6, &mut rng::stream(8, 0)).unwrap();
        let mix = Matrix::random_full_row_rank(f, 2, 4, &mut rng::stream(8, 1))
            .unwrap()
            .transpose();
        let a = mix.mul(&base).unwrap();
        assert_eq!(a.rank(), 2);
        let x0 = FieldVector::random(f, 6, &mut rng::stream(8, 2));
        let b = a.mul_vec(&x0).unwrap();
        for form in [Form::LeftIdDeficient, Form::RightIdDeficient] {
            let t = decompose(&a, form.clone(), &mut rng::stream(8, 3)).unwrap();
            if t.transform_rhs(&b).unwrap().slice(0, 2).is_zero() {
                continue;
            }
            let region: Vec<usize> = if form == Form::LeftIdDeficient {
                (2..6).map(|i| t.q().image(i)).collect()
            } else {
                (0..4).map(|i| t.q().image(i)).collect()
            };
            for mask in 0u32..16 {
                let target: Vec<usize> = (0..4)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| region[i])
                    .collect();
                let (gi, x) = steer_support(&t, &b, &target).unwrap();
                assert!(is_gi(&a, gi.matrix()).unwrap());
                assert_eq!(a.mul_vec(&x).unwrap(), b);
                let mut got: Vec<usize> = x
                    .support()
                    .into_iter()
                    .filter(|p| region.contains(p))
                    .collect();
                let mut want = target.clone();
                got.sort();
                want.sort();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn hand_built_transformation_matches_decomposition() {
        let a = m2(&[vec![1, 0, 1], vec![0, 1, 1]]);
        let q = Permutation::from_one_based(&[3, 1, 2]).unwrap();
        let t = decompose_with_permutation(&a, Form::RightIdFull, q, 2)
            .unwrap()
            .unwrap();
        assert_eq!(t.block(), &m2(&[vec![1], vec![1]]));
        assert_eq!(t.q().map(), &[2, 0, 1]);
    }
}
