//! Reduction of binary minimum coset/codeword weight to MIN-SAT over affine
//! (XOR) constraints, with assignment lifting, a brute-force solver and the
//! `.affsat` text format.
//!
//! For `P·A·Q = [A1 | I_m]` every solution of `A·x = b` is
//! `x = Q·[z; P·b - A1·z]`, so the weight of `x` is the number of satisfied
//! constraints among `z_i = 1` and `(A1·z)_j = 1 ⊕ (P·b)_j`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldVector, PrimeField};
use crate::geninv::solution_from_z1;
use crate::matrix::{decompose, Form, Matrix, Transformation};
use crate::rng;

/// Seed of the decomposition used by [`reduce_cwp`] and [`reduce_swp`].
pub const REDUCTION_SEED: u64 = 0;

/// Largest variable count accepted by [`brute_minsat`].
pub const MAX_BRUTE_VARS: usize = 24;

/// `XOR_{v ∈ vars} γ(v) = rhs`, variables 1-based and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineConstraint {
    pub vars: Vec<usize>,
    pub rhs: bool,
}

impl AffineConstraint {
    pub fn is_satisfied(&self, gamma: &Assignment) -> bool {
        let parity = self
            .vars
            .iter()
            .fold(false, |acc, &v| acc ^ gamma.bits[v - 1]);
        parity == self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinSatInstance {
    pub n_vars: usize,
    pub constraints: Vec<AffineConstraint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub bits: Vec<bool>,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment {
            bits: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Assignment whose bit string, read left to right, is the `n`-bit binary
    /// expansion of `code` (first variable most significant).
    pub fn from_code(n: usize, code: u32) -> Self {
        Assignment {
            bits: (0..n).map(|i| code >> (n - 1 - i) & 1 == 1).collect(),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = Error;

    /// Parses the assignment file format: one line of `0`/`1` characters.
    fn from_str(s: &str) -> Result<Self> {
        let line = s.strip_suffix('\n').unwrap_or(s);
        if line.contains('\n') {
            return Err(Error::Parse {
                line: 2,
                msg: "assignment must be a single line".into(),
            });
        }
        let bits = line
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    line: 1,
                    msg: format!("unexpected character {c:?}"),
                }),
            })
            .collect::<Result<_>>()?;
        Ok(Assignment { bits })
    }
}

/// What is needed to map an assignment back to a vector of `F_2^n`.
#[derive(Clone, Debug)]
pub struct LiftContext {
    transformation: Transformation,
    pb: Option<FieldVector>,
    seed: u64,
}

impl LiftContext {
    pub fn p(&self) -> &Matrix {
        self.transformation.p()
    }

    pub fn q(&self) -> &crate::matrix::Permutation {
        self.transformation.q()
    }

    /// The block A1 of `P·A·Q = [A1 | I_m]`.
    pub fn a1(&self) -> &Matrix {
        self.transformation.block()
    }

    /// `P·b`, absent for codeword reductions.
    pub fn pb(&self) -> Option<&FieldVector> {
        self.pb.as_ref()
    }

    pub fn transformation(&self) -> &Transformation {
        &self.transformation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn m(&self) -> usize {
        self.transformation.m()
    }

    pub fn n(&self) -> usize {
        self.transformation.n()
    }

    pub fn verify(&self, a: &Matrix) -> bool {
        self.transformation.verify(a)
    }
}

fn check_input(a: &Matrix) -> Result<()> {
    if !a.field().is_binary() {
        return Err(Error::WrongField(a.field().q()));
    }
    let rank = a.rank();
    if rank != a.n_rows() {
        return Err(Error::NotFullRank {
            rank,
            rows: a.n_rows(),
        });
    }
    if a.n_rows() >= a.n_cols() {
        return Err(Error::InvalidParameter("reduction needs m < n".into()));
    }
    Ok(())
}

/// Reduces the minimum-weight solution of `A·x = b` over F2.
pub fn reduce_cwp(a: &Matrix, b: &FieldVector) -> Result<(MinSatInstance, LiftContext)> {
    check_input(a)?;
    let t = decompose(a, Form::RightIdFull, &mut rng::stream(REDUCTION_SEED, 0))?;
    reduce_cwp_with_transformation(a, b, t, REDUCTION_SEED)
}

/// [`reduce_cwp`] for a caller-chosen `(P, Q)`; `t` must decompose `a` as `[A1 | I_m]`.
pub fn reduce_cwp_with_transformation(
    a: &Matrix,
    b: &FieldVector,
    t: Transformation,
    seed: u64,
) -> Result<(MinSatInstance, LiftContext)> {
    check_input(a)?;
    if b.len() != a.n_rows() || b.field() != a.field() {
        return Err(Error::DimensionMismatch("b must have length m".into()));
    }
    if b.is_zero() {
        return Err(Error::ZeroSyndrome);
    }
    check_transformation(a, &t)?;
    let pb = t.transform_rhs(b)?;
    let inst = build(&t, Some(&pb));
    Ok((
        inst,
        LiftContext {
            transformation: t,
            pb: Some(pb),
            seed,
        },
    ))
}

/// Reduces the minimum-weight codeword of `ker A` over F2.
pub fn reduce_swp(a: &Matrix) -> Result<(MinSatInstance, LiftContext)> {
    check_input(a)?;
    let t = decompose(a, Form::RightIdFull, &mut rng::stream(REDUCTION_SEED, 0))?;
    reduce_swp_with_transformation(a, t, REDUCTION_SEED)
}

pub fn reduce_swp_with_transformation(
    a: &Matrix,
    t: Transformation,
    seed: u64,
) -> Result<(MinSatInstance, LiftContext)> {
    check_input(a)?;
    check_transformation(a, &t)?;
    let inst = build(&t, None);
    Ok((
        inst,
        LiftContext {
            transformation: t,
            pb: None,
            seed,
        },
    ))
}

fn check_transformation(a: &Matrix, t: &Transformation) -> Result<()> {
    if !t.form().is_right_identity_full() || t.ell() != 0 || !t.verify(a) {
        return Err(Error::WrongForm {
            expected: Form::RightIdFull.to_string(),
            found: t.form().to_string(),
        });
    }
    Ok(())
}

fn build(t: &Transformation, pb: Option<&FieldVector>) -> MinSatInstance {
    let k = t.free_cols();
    let a1 = t.block();
    let mut constraints: Vec<AffineConstraint> = (1..=k)
        .map(|v| AffineConstraint {
            vars: vec![v],
            rhs: true,
        })
        .collect();
    for j in 0..a1.n_rows() {
        let vars = a1.row(j).support().into_iter().map(|i| i + 1).collect();
        let pb_j = pb.is_some_and(|pb| pb.get(j) == 1);
        constraints.push(AffineConstraint { vars, rhs: !pb_j });
    }
    MinSatInstance {
        n_vars: k,
        constraints,
    }
}

/// `x = Q·[γ; P·b - A1·γ]` (with `P·b = 0` for codeword reductions).
pub fn lift(ctx: &LiftContext, gamma: &Assignment) -> Result<FieldVector> {
    let t = &ctx.transformation;
    if gamma.len() != t.free_cols() {
        return Err(Error::DimensionMismatch(format!(
            "assignment has {} bits, expected {}",
            gamma.len(),
            t.free_cols()
        )));
    }
    let f = PrimeField::BINARY;
    let residues: Vec<u32> = gamma.bits.iter().map(|&b| b as u32).collect();
    let z = FieldVector::from_residues(f, &residues)?;
    let pb = ctx
        .pb
        .clone()
        .unwrap_or_else(|| FieldVector::zeros(f, t.m()));
    Ok(solution_from_z1(t, &pb, &z))
}

pub fn count_satisfied(inst: &MinSatInstance, gamma: &Assignment) -> Result<usize> {
    if gamma.len() != inst.n_vars {
        return Err(Error::DimensionMismatch(format!(
            "assignment has {} bits, expected {}",
            gamma.len(),
            inst.n_vars
        )));
    }
    Ok(inst
        .constraints
        .iter()
        .filter(|c| c.is_satisfied(gamma))
        .count())
}

struct Packed {
    masks: Vec<(u32, u32)>,
}

impl Packed {
    fn new(inst: &MinSatInstance) -> Result<Self> {
        let n = inst.n_vars;
        if n > MAX_BRUTE_VARS {
            return Err(Error::TooManyVars(n));
        }
        let masks = inst
            .constraints
            .iter()
            .map(|c| {
                let mask = c.vars.iter().fold(0u32, |m, &v| m | 1 << (n - v));
                (mask, c.rhs as u32)
            })
            .collect();
        Ok(Packed { masks })
    }

    #[inline]
    fn count(&self, code: u32) -> usize {
        self.masks
            .iter()
            .filter(|&&(m, rhs)| (m & code).count_ones() & 1 == rhs)
            .count()
    }
}

/// Exhaustive minimum over all assignments. Ties go to the lexicographically
/// smallest bit string.
pub fn brute_minsat(inst: &MinSatInstance) -> Result<(Assignment, usize)> {
    let packed = Packed::new(inst)?;
    let (mu, code) = min_over(&packed, 0, 1u64 << inst.n_vars);
    Ok((Assignment::from_code(inst.n_vars, code), mu))
}

/// Minimum over nonzero assignments, `None` when there are no variables. For
/// codeword reductions these are exactly the assignments lifting to nonzero
/// codewords.
pub fn brute_minsat_nonzero(inst: &MinSatInstance) -> Result<Option<(Assignment, usize)>> {
    let packed = Packed::new(inst)?;
    if inst.n_vars == 0 {
        return Ok(None);
    }
    let (mu, code) = min_over(&packed, 1, 1u64 << inst.n_vars);
    Ok(Some((Assignment::from_code(inst.n_vars, code), mu)))
}

fn min_over(packed: &Packed, start: u64, end: u64) -> (usize, u32) {
    const SHARD: u64 = 1 << 14;
    let shards = (end - start).div_ceil(SHARD);
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let lo = start + s * SHARD;
            let hi = (lo + SHARD).min(end);
            (lo..hi)
                .map(|c| (packed.count(c as u32), c as u32))
                .min()
                .expect("shard is nonempty")
        })
        .min()
        .expect("range is nonempty")
}

impl MinSatInstance {
    /// `.affsat` serialization.
    pub fn to_affsat(&self) -> String {
        let mut out = format!("p affsat {} {}\n", self.n_vars, self.constraints.len());
        for c in &self.constraints {
            out.push_str(&format!("{} {}", c.rhs as u8, c.vars.len()));
            for v in &c.vars {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_affsat(text: &str) -> Result<Self> {
        let err = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.into(),
        };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file"))?;
        let h: Vec<&str> = header.split_ascii_whitespace().collect();
        if h.len() != 4 || h[0] != "p" || h[1] != "affsat" {
            return Err(err(1, "expected 'p affsat <n_vars> <n_constraints>'"));
        }
        let n_vars: usize = h[2].parse().map_err(|_| err(1, "bad variable count"))?;
        let n_cons: usize = h[3].parse().map_err(|_| err(1, "bad constraint count"))?;
        let mut constraints = Vec::with_capacity(n_cons);
        for (no, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let nums: Vec<usize> = line
                .split_ascii_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| err(no, "expected a nonnegative integer"))
                })
                .collect::<Result<_>>()?;
            if nums.len() < 2 || nums[0] > 1 || nums.len() != nums[1] + 2 {
                return Err(err(no, "expected '<rhs> <k> <v1> ... <vk>'"));
            }
            let vars = nums[2..].to_vec();
            if vars.windows(2).any(|w| w[0] >= w[1]) || vars.iter().any(|&v| v == 0 || v > n_vars) {
                return Err(err(
                    no,
                    "variables must be sorted, distinct and within 1..n_vars",
                ));
            }
            constraints.push(AffineConstraint {
                vars,
                rhs: nums[0] == 1,
            });
        }
        if constraints.len() != n_cons {
            return Err(err(1, "constraint count does not match header"));
        }
        Ok(MinSatInstance {
            n_vars,
            constraints,
        })
    }
}
