//! Instance generation and the line-oriented `.gid` / solution file formats.
//!
//! ```text
//! GID v1
//! problem: sdp
//! q: 2
//! n: 4
//! k: 2
//! t: 1
//! H:
//! 1 0 1 1
//! 0 1 1 0
//! s:
//! 1 1
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{FieldVector, PrimeField};
use crate::matrix::{Matrix, MAX_RETRIES};
use crate::rng;
use crate::solvers::{Instance, LwpInstance, SdpInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMode {
    /// Uniform nonzero syndrome.
    Random,
    /// `s = H·e` for a uniform `e` of weight exactly `t`.
    Planted,
}

impl FromStr for GenMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(GenMode::Random),
            "planted" => Ok(GenMode::Planted),
            _ => Err(Error::Config(format!("unknown generation mode '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub instance: SdpInstance,
    pub planted: Option<FieldVector>,
}

/// Random `[n, k]_q` syndrome decoding instance with a uniform full-row-rank `H`.
pub fn gen_instance(
    n: usize,
    k: usize,
    q: u64,
    t: usize,
    mode: GenMode,
    seed: u64,
) -> Result<Generated> {
    let field = PrimeField::new(q).map_err(|e| Error::Config(e.to_string()))?;
    if k >= n || t > n {
        return Err(Error::Config(format!(
            "need k < n and t ≤ n, got n={n}, k={k}, t={t}"
        )));
    }
    if mode == GenMode::Planted && t == 0 {
        return Err(Error::Config(
            "a planted error of weight 0 gives a zero syndrome".into(),
        ));
    }
    let mut rng = rng::stream(seed, 0);
    let h = Matrix::random_full_row_rank(field, n - k, n, &mut rng)?;
    let (s, planted) = match mode {
        GenMode::Random => (FieldVector::random_nonzero(field, n - k, &mut rng), None),
        GenMode::Planted => {
            let mut found = None;
            for _ in 0..MAX_RETRIES {
                let e = FieldVector::random_of_weight(field, n, t, &mut rng);
                let s = h.mul_vec(&e)?;
                if !s.is_zero() {
                    found = Some((s, Some(e)));
                    break;
                }
            }
            found.ok_or_else(|| Error::Config("every drawn error was a codeword".into()))?
        }
    };
    Ok(Generated {
        instance: SdpInstance::new(h, s, t)?,
        planted,
    })
}

/// Random `[n, k]_q` low-weight codeword instance.
pub fn gen_lwp_instance(n: usize, k: usize, q: u64, t: usize, seed: u64) -> Result<LwpInstance> {
    let field = PrimeField::new(q).map_err(|e| Error::Config(e.to_string()))?;
    if k >= n || t == 0 || t > n {
        return Err(Error::Config(format!(
            "need k < n and 1 ≤ t ≤ n, got n={n}, k={k}, t={t}"
        )));
    }
    let h = Matrix::random_full_row_rank(field, n - k, n, &mut rng::stream(seed, 0))?;
    LwpInstance::new(h, t)
}

fn push_vector(out: &mut String, v: &FieldVector) {
    let _ = writeln!(out, "{v}");
}

/// `.gid` serialization.
pub fn write_instance(inst: &Instance) -> String {
    let h = inst.h();
    let mut out = String::from("GID v1\n");
    let problem = if matches!(inst, Instance::Sdp(_)) {
        "sdp"
    } else {
        "lwp"
    };
    let _ = write!(
        out,
        "problem: {problem}\nq: {}\nn: {}\nk: {}\nt: {}\nH:\n",
        h.field().q(),
        h.n_cols(),
        h.n_cols() - h.n_rows(),
        inst.t()
    );
    for row in h.rows() {
        push_vector(&mut out, row);
    }
    if let Instance::Sdp(i) = inst {
        out.push_str("s:\n");
        push_vector(&mut out, &i.s);
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok(l.trim_end_matches('\r'))
            }
            None => Err(Error::Parse {
                line: self.last + 1,
                msg: "unexpected end of file".into(),
            }),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.last,
            msg: msg.into(),
        }
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(':'))
            .map(str::trim)
            .ok_or_else(|| self.err(format!("expected '{key}:'")))
    }

    fn number(&mut self, key: &str) -> Result<usize> {
        let v = self.field(key)?;
        v.parse()
            .map_err(|_| self.err(format!("'{key}' must be a nonnegative integer")))
    }

    fn vector(&mut self, field: PrimeField, len: usize) -> Result<FieldVector> {
        let line = self.next()?;
        let vals: Vec<u32> = line
            .split_ascii_whitespace()
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| self.err(format!("bad residue '{t}'")))
                    .and_then(|v| field.check(v))
            })
            .collect::<Result<_>>()
            .map_err(|e| match e {
                Error::Parse { .. } => e,
                other => self.err(other.to_string()),
            })?;
        if vals.len() != len {
            return Err(self.err(format!("expected {len} entries, found {}", vals.len())));
        }
        FieldVector::from_residues(field, &vals)
    }
}

/// Parses a `.gid` file.
pub fn read_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    if lines.next()?.trim() != "GID v1" {
        return Err(lines.err("expected header 'GID v1'"));
    }
    let problem = lines.field("problem")?;
    if problem != "sdp" && problem != "lwp" {
        return Err(lines.err("problem must be 'sdp' or 'lwp'"));
    }
    let q = lines.number("q")?;
    let field = PrimeField::new(q as u64).map_err(|e| lines.err(e.to_string()))?;
    let n = lines.number("n")?;
    let k = lines.number("k")?;
    let t = lines.number("t")?;
    if k >= n {
        return Err(lines.err("k must be smaller than n"));
    }
    if !lines.field("H")?.is_empty() {
        return Err(lines.err("expected 'H:' on its own line"));
    }
    let rows = (0..n - k)
        .map(|_| lines.vector(field, n))
        .collect::<Result<Vec<_>>>()?;
    let h = Matrix::from_vectors(field, n, rows)?;
    let inst = if problem == "sdp" {
        if !lines.field("s")?.is_empty() {
            return Err(lines.err("expected 's:' on its own line"));
        }
        let s = lines.vector(field, n - k)?;
        Instance::Sdp(SdpInstance::new(h, s, t)?)
    } else {
        Instance::Lwp(LwpInstance::new(h, t)?)
    };
    while let Some((i, l)) = lines.inner.next() {
        if !l.trim().is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                msg: "trailing content".into(),
            });
        }
    }
    Ok(inst)
}

/// Solution file: the vector, then `weight: <w>`.
pub fn write_solution(x: &FieldVector) -> String {
    format!("{x}\nweight: {}\n", x.weight())
}

/// Parses a solution file for a vector over `field` of length `n`. The stated
/// weight must match the vector.
pub fn read_solution(text: &str, field: PrimeField, n: usize) -> Result<FieldVector> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let x = lines.vector(field, n)?;
    let w = lines.number("weight")?;
    if w != x.weight() {
        return Err(lines.err(format!(
            "stated weight {w} differs from actual weight {}",
            x.weight()
        )));
    }
    Ok(x)
}
