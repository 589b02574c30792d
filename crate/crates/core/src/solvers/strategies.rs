//! Candidate generators. Each works in the permuted coordinates of a
//! transformation: a candidate is `z = [z1; z2]` with `[V I]·z = s̄` (or the
//! partial-form analogue), and the solution is `x = Q·z`.
//!
//! Generators are callback driven: they call `emit` once per candidate and
//! stop as soon as it returns `ControlFlow::Break`.

use std::collections::HashMap;
use std::ops::ControlFlow;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{FieldVector, PrimeField};
use crate::geninv::{redundancy_part, steer_column};
use crate::matrix::{Form, Matrix, Transformation};

/// Largest packed collision key, in bits.
pub const MAX_KEY_BITS: u32 = 30;

/// A point of the solution space in permuted coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Candidate {
    pub z1: FieldVector,
    pub z2: FieldVector,
}

impl Candidate {
    pub fn weight(&self) -> usize {
        self.z1.weight() + self.z2.weight()
    }

    /// `x = Q·[z1; z2]`.
    pub fn to_solution(&self, t: &Transformation) -> FieldVector {
        t.q().apply(&self.z1.concat(&self.z2))
    }
}

pub type Emit<'a> = dyn FnMut(&Candidate) -> ControlFlow<()> + 'a;

fn full_candidate(t: &Transformation, sbar: &FieldVector, z1: FieldVector) -> Candidate {
    let z2 = redundancy_part(t, sbar, &z1);
    Candidate { z1, z2 }
}

/// The Prange candidate `z = [0; s̄]`.
pub fn prange_candidate(t: &Transformation, sbar: &FieldVector) -> Candidate {
    Candidate {
        z1: FieldVector::zeros(t.field(), t.free_cols()),
        z2: sbar.clone(),
    }
}

/// `x = Q·[0; P·s]`.
pub fn prange_sample(t: &Transformation, s: &FieldVector) -> Result<FieldVector> {
    let sbar = t.transform_rhs(s)?;
    Ok(prange_candidate(t, &sbar).to_solution(t))
}

/// Visits every weight-`w` pattern over `positions` with nonzero coefficients:
/// position sets in lexicographic order, coefficients in increasing order.
pub fn for_each_pattern(
    field: PrimeField,
    positions: &[usize],
    w: usize,
    f: &mut dyn FnMut(&[usize], &[u32]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if w > positions.len() {
        return ControlFlow::Continue(());
    }
    let mut idx: Vec<usize> = (0..w).collect();
    let mut chosen = vec![0usize; w];
    let mut coefs = vec![1u32; w];
    let q = field.q();
    loop {
        for (c, &i) in chosen.iter_mut().zip(&idx) {
            *c = positions[i];
        }
        coefs.iter_mut().for_each(|c| *c = 1);
        loop {
            f(&chosen, &coefs)?;
            let mut carry = true;
            for c in coefs.iter_mut().rev() {
                *c += 1;
                if *c < q {
                    carry = false;
                    break;
                }
                *c = 1;
            }
            if carry {
                break;
            }
        }
        // next combination
        let mut i = w;
        loop {
            if i == 0 {
                return ControlFlow::Continue(());
            }
            i -= 1;
            if idx[i] != i + positions.len() - w {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..w {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn pattern_vector(field: PrimeField, len: usize, pos: &[usize], coefs: &[u32]) -> FieldVector {
    let mut z = FieldVector::zeros(field, len);
    for (&p, &c) in pos.iter().zip(coefs) {
        z.set(p, c);
    }
    z
}

/// Lee-Brickell: every `z1` of exact weight `p` over the information positions.
pub fn lee_brickell(
    t: &Transformation,
    sbar: &FieldVector,
    p: usize,
    emit: &mut Emit,
) -> ControlFlow<()> {
    let f = t.field();
    let k = t.free_cols();
    let positions: Vec<usize> = (0..k).collect();
    for_each_pattern(f, &positions, p, &mut |pos, coefs| {
        emit(&full_candidate(t, sbar, pattern_vector(f, k, pos, coefs)))
    })
}

/// Leon: Lee-Brickell patterns that also cancel the first `ell` rows, i.e.
/// `V1·z1 = s̄'` so that the top of `z2` vanishes.
pub fn leon(
    t: &Transformation,
    sbar: &FieldVector,
    p: usize,
    ell: usize,
    emit: &mut Emit,
) -> ControlFlow<()> {
    lee_brickell(t, sbar, p, &mut |c: &Candidate| {
        if (0..ell).all(|i| c.z2.get(i) == 0) {
            emit(c)
        } else {
            ControlFlow::Continue(())
        }
    })
}

struct Projection {
    field: PrimeField,
    bits: u32,
    cols: Vec<FieldVector>,
}

impl Projection {
    /// First `ell` rows of the block columns.
    fn new(t: &Transformation, ell: usize) -> Self {
        let f = t.field();
        let cols = (0..t.free_cols())
            .map(|j| t.block_col(j).slice(0, ell))
            .collect();
        Projection {
            field: f,
            bits: f.bits(),
            cols,
        }
    }

    fn key(&self, v: &FieldVector) -> u64 {
        if let Some(w) = v.words() {
            return w.first().copied().unwrap_or(0);
        }
        let mut key = 0u64;
        for i in v.support() {
            key |= (v.get(i) as u64) << (i as u32 * self.bits);
        }
        key
    }

    fn combine(&self, start: &FieldVector, pos: &[usize], coefs: &[u32], sign: i32) -> FieldVector {
        let mut acc = start.clone();
        for (&p, &c) in pos.iter().zip(coefs) {
            let c = if sign < 0 { self.field.neg(c) } else { c };
            acc.add_scaled(c, &self.cols[p]);
        }
        acc
    }
}

type Pattern = (Vec<usize>, Vec<u32>);

/// Meet in the middle on the projected rows: every pair of a weight-`pl`
/// pattern `a` over `left` and weight-`pr` pattern `b` over `right` with
/// `(target - V·a)_L = (V·b)_L`.
fn collide(
    proj: &Projection,
    target: &FieldVector,
    left: &[usize],
    right: &[usize],
    pl: usize,
    pr: usize,
    f: &mut dyn FnMut(&Pattern, &Pattern) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut table: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut patterns: Vec<Pattern> = Vec::new();
    let _ = for_each_pattern(proj.field, left, pl, &mut |pos, coefs| {
        let key = proj.key(&proj.combine(target, pos, coefs, -1));
        table.entry(key).or_default().push(patterns.len());
        patterns.push((pos.to_vec(), coefs.to_vec()));
        ControlFlow::Continue(())
    });
    if table.is_empty() {
        return ControlFlow::Continue(());
    }
    let zero = FieldVector::zeros(proj.field, target.len());
    for_each_pattern(proj.field, right, pr, &mut |pos, coefs| {
        let key = proj.key(&proj.combine(&zero, pos, coefs, 1));
        if let Some(hits) = table.get(&key) {
            let b: Pattern = (pos.to_vec(), coefs.to_vec());
            for &h in hits {
                f(&patterns[h], &b)?;
            }
        }
        ControlFlow::Continue(())
    })
}

fn merge(field: PrimeField, len: usize, a: &Pattern, b: &Pattern) -> FieldVector {
    let mut z = pattern_vector(field, len, &a.0, &a.1);
    for (&p, &c) in b.0.iter().zip(&b.1) {
        z.set(p, c);
    }
    z
}

pub(crate) fn check_key_width(field: PrimeField, ell: usize) -> Result<()> {
    if ell as u64 * field.bits() as u64 > MAX_KEY_BITS as u64 {
        return Err(Error::Config(format!(
            "window ℓ={ell} needs {} key bits, limit is {MAX_KEY_BITS}",
            ell as u64 * field.bits() as u64
        )));
    }
    Ok(())
}

/// Stern: information positions split into `I1` (first ⌈k/2⌉) and `I2`;
/// weight-`p` patterns on each half whose sum matches `s̄` on the first
/// `ell` rows.
pub fn stern(
    t: &Transformation,
    sbar: &FieldVector,
    p: usize,
    ell: usize,
    emit: &mut Emit,
) -> Result<ControlFlow<()>> {
    check_key_width(t.field(), ell)?;
    if ell > t.rank() {
        return Err(Error::Config(format!("ℓ={ell} exceeds r={}", t.rank())));
    }
    let k = t.free_cols();
    let half = k.div_ceil(2);
    let i1: Vec<usize> = (0..half).collect();
    let i2: Vec<usize> = (half..k).collect();
    let proj = Projection::new(t, ell);
    let target = sbar.slice(0, ell);
    let f = t.field();
    Ok(collide(&proj, &target, &i1, &i2, p, p, &mut |a, b| {
        emit(&full_candidate(t, sbar, merge(f, k, a, b)))
    }))
}

/// Finiasz-Sendrier on a `[V1 0; V3 I_{r-ℓ}]` transformation: every weight-`p`
/// solution `z1` of `V1·z1 = s̄1` (meet in the middle over the two halves of
/// the k+ℓ columns, all splits p1+p2 = p), with `z2 = s̄2 - V3·z1`.
pub fn finiasz_sendrier(
    t: &Transformation,
    sbar: &FieldVector,
    p: usize,
    emit: &mut Emit,
) -> Result<ControlFlow<()>> {
    let Form::PartialGe(ell) = *t.form() else {
        return Err(Error::WrongForm {
            expected: "PARTIAL_GE".into(),
            found: t.form().to_string(),
        });
    };
    check_key_width(t.field(), ell)?;
    let f = t.field();
    let w = t.free_cols();
    let half = w.div_ceil(2);
    let left: Vec<usize> = (0..half).collect();
    let right: Vec<usize> = (half..w).collect();
    let proj = Projection::new(t, ell);
    let target = sbar.slice(0, ell);
    let r = t.rank();
    for pl in 0..=p {
        let flow = collide(&proj, &target, &left, &right, pl, p - pl, &mut |a, b| {
            let z1 = merge(f, w, a, b);
            let z2 = redundancy_part(t, sbar, &z1).slice(ell, r);
            emit(&Candidate { z1, z2 })
        });
        if flow.is_break() {
            return Ok(flow);
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// Multi-block steering: block `i` of `s̄` (rows of identity block `i`)
/// steers `X_i·s̄_i = w_i` independently. Returns the candidate with
/// `z1 = Σ w_i` and the indices of blocks whose `s̄_i` is zero (those only
/// contribute their identity part, so their `w_i` must be zero).
pub fn multi_decomp_candidate(
    t: &Transformation,
    sbar: &FieldVector,
    ws: &[FieldVector],
) -> Result<(Candidate, Vec<usize>)> {
    let blocks = t.row_blocks();
    if ws.len() != blocks.len() {
        return Err(Error::Config(format!(
            "{} steering vectors for {} blocks",
            ws.len(),
            blocks.len()
        )));
    }
    let mut z1 = FieldVector::zeros(t.field(), t.free_cols());
    let mut zero_blocks = Vec::new();
    for (i, (range, w)) in blocks.iter().zip(ws).enumerate() {
        if sbar.slice(range.start, range.end).is_zero() {
            zero_blocks.push(i);
            if !w.is_zero() {
                return Err(Error::ZeroSyndrome);
            }
            continue;
        }
        z1.add_assign(w);
    }
    Ok((full_candidate(t, sbar, z1), zero_blocks))
}

/// The full `k×r` X1 of a multi-block steering, `[X_1 | X_2 | ...]` with
/// `X_i = steer_column(s̄_i, w_i)`.
pub fn multi_decomp_x1(
    t: &Transformation,
    sbar: &FieldVector,
    ws: &[FieldVector],
) -> Result<Matrix> {
    let f = t.field();
    let k = t.free_cols();
    let mut x1 = Matrix::zeros(f, k, 0);
    for (range, w) in t.row_blocks().iter().zip(ws) {
        let part = sbar.slice(range.start, range.end);
        let xi = if part.is_zero() {
            Matrix::zeros(f, k, range.len())
        } else {
            steer_column(&part, w)?
        };
        x1 = x1.hstack(&xi)?;
    }
    Ok(x1)
}

/// Random steering vectors of weight `p` for each nonzero block of `s̄`.
pub fn random_block_steering<R: Rng + ?Sized>(
    t: &Transformation,
    sbar: &FieldVector,
    p: usize,
    rng: &mut R,
) -> Vec<FieldVector> {
    let k = t.free_cols();
    t.row_blocks()
        .iter()
        .map(|range| {
            if sbar.slice(range.start, range.end).is_zero() {
                FieldVector::zeros(t.field(), k)
            } else {
                FieldVector::random_of_weight(t.field(), k, p, rng)
            }
        })
        .collect()
}

/// A uniformly random GI with `X1·s̄ ≠ 0`. For uniform X1 and `s̄ ≠ 0`,
/// `X1·s̄` is uniform on F^k, so the product is drawn directly.
pub fn gi_random_candidate<R: Rng + ?Sized>(
    t: &Transformation,
    sbar: &FieldVector,
    rng: &mut R,
) -> Candidate {
    let z1 = FieldVector::random_nonzero(t.field(), t.free_cols(), rng);
    full_candidate(t, sbar, z1)
}
