//! Easy-weight coverage experiment: which solution weights of `H·x = s` a
//! handful of steered GIs reach per decomposition.
//!
//! For each decomposition `P·H·Q = [V I_r]` and each iteration, every size
//! `i = 1..k` draws a random set `E` of information positions with nonzero
//! coefficients `c`, and records the weight `i + |s̄ - V_E·c|` of the solution
//! selected by a GI steered onto `z1 = Σ c_j e_j`.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read, Write};
use std::time::Instant;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldVector, PrimeField};
use crate::geninv::{redundancy_part, solution_from_z1};
use crate::instance::{gen_instance, GenMode};
use crate::matrix::{decompose, Form, Matrix, Transformation};
use crate::rng;
use crate::solvers::SdpInstance;

/// Largest `q^k` accepted by [`exhaustive_weights`].
pub const EXHAUSTIVE_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub q: u64,
    pub iterations: usize,
    pub decompositions: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(n: usize, k: usize, q: u64, seed: u64) -> Self {
        ExperimentConfig {
            n,
            k,
            q,
            iterations: 10,
            decompositions: 1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<PrimeField> {
        let field = PrimeField::new(self.q).map_err(|e| Error::Config(e.to_string()))?;
        if self.k == 0 || self.k >= self.n {
            return Err(Error::Config(format!(
                "need 0 < k < n, got n={}, k={}",
                self.n, self.k
            )));
        }
        if self.iterations == 0 || self.decompositions == 0 {
            return Err(Error::Config(
                "iterations and decompositions must be positive".into(),
            ));
        }
        Ok(field)
    }

    /// The instance `(H, s)` shared by all decompositions (stream 0 of the seed).
    pub fn instance(&self) -> Result<SdpInstance> {
        self.validate()?;
        Ok(gen_instance(self.n, self.k, self.q, 0, GenMode::Random, self.seed)?.instance)
    }
}

/// Cumulative reached weights per decomposition.
///
/// `first_reached[d][w - 1]` is the first iteration (1-based) at which
/// decomposition `d` produced a solution of weight `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightCoverageReport {
    pub config: ExperimentConfig,
    pub first_reached: Vec<Vec<Option<u32>>>,
    pub elapsed_ms: u64,
}

impl WeightCoverageReport {
    /// Weights in `[1, n]` that decomposition `d` has not reached after `iteration` iterations.
    pub fn missing(&self, d: usize, iteration: usize) -> Vec<usize> {
        self.first_reached[d]
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_some_and(|it| it as usize <= iteration))
            .map(|(w, _)| w + 1)
            .collect()
    }

    /// Weights reached by any decomposition.
    pub fn reached(&self) -> BTreeSet<usize> {
        self.first_reached
            .iter()
            .flat_map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, r)| r.is_some())
                    .map(|(w, _)| w + 1)
            })
            .collect()
    }

    /// `[min, max]` of [`Self::reached`].
    pub fn interval(&self) -> Option<(usize, usize)> {
        let r = self.reached();
        Some((*r.first()?, *r.last()?))
    }

    /// True when every weight of `[lo, hi]` was reached.
    pub fn covers(&self, lo: usize, hi: usize) -> bool {
        let r = self.reached();
        (lo..=hi).all(|w| r.contains(&w))
    }

    /// Long-form CSV with a metadata comment line, header and summary row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let c = &self.config;
        let mut out = out;
        writeln!(
            out,
            "# n={} k={} q={} iterations={} decompositions={} seed={}",
            c.n, c.k, c.q, c.iterations, c.decompositions, c.seed
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["decomp", "iteration", "weight", "reached"])
            .map_err(csv_err)?;
        for (d, row) in self.first_reached.iter().enumerate() {
            for it in 1..=c.iterations {
                for (wt, r) in row.iter().enumerate() {
                    let reached = r.is_some_and(|f| f as usize <= it);
                    w.write_record([
                        d.to_string(),
                        it.to_string(),
                        (wt + 1).to_string(),
                        (reached as u8).to_string(),
                    ])
                    .map_err(csv_err)?;
                }
            }
        }
        let (lo, hi) = self
            .interval()
            .map_or((String::new(), String::new()), |(a, b)| {
                (a.to_string(), b.to_string())
            });
        w.write_record(["summary".to_string(), lo, hi, self.elapsed_ms.to_string()])
            .map_err(csv_err)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut input = BufReader::new(input);
        let mut meta = String::new();
        input.read_line(&mut meta)?;
        let config = parse_meta(&meta)?;
        let (n, iters) = (config.n, config.iterations);
        let mut first_reached = vec![vec![None; n]; config.decompositions];
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = rdr.headers().map_err(csv_err)?.clone();
        if header.iter().collect::<Vec<_>>() != ["decomp", "iteration", "weight", "reached"] {
            return Err(Error::Parse {
                line: 2,
                msg: "unexpected CSV header".into(),
            });
        }
        let mut elapsed_ms = None;
        let mut rows = 0usize;
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 3;
            let rec = rec.map_err(csv_err)?;
            let bad = |msg: &str| Error::Parse {
                line,
                msg: msg.into(),
            };
            if &rec[0] == "summary" {
                elapsed_ms = Some(rec[3].parse().map_err(|_| bad("bad elapsed time"))?);
                continue;
            }
            let num = |j: usize| {
                rec[j]
                    .parse::<usize>()
                    .map_err(|_| bad("expected an integer"))
            };
            let (d, it, wt, reached) = (num(0)?, num(1)?, num(2)?, num(3)?);
            if d >= first_reached.len() || it == 0 || it > iters || wt == 0 || wt > n || reached > 1
            {
                return Err(bad("row out of range"));
            }
            let slot = &mut first_reached[d][wt - 1];
            match (reached == 1, *slot) {
                (true, None) => *slot = Some(it as u32),
                (false, Some(f)) if f as usize <= it => {
                    return Err(bad("coverage is not monotone"))
                }
                _ => {}
            }
            rows += 1;
        }
        if rows != config.decompositions * iters * n {
            return Err(Error::Parse {
                line: 0,
                msg: "missing rows".into(),
            });
        }
        let elapsed_ms = elapsed_ms.ok_or(Error::Parse {
            line: 0,
            msg: "missing summary row".into(),
        })?;
        Ok(WeightCoverageReport {
            config,
            first_reached,
            elapsed_ms,
        })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse {
        line: e.position().map_or(0, |p| p.line() as usize),
        msg: e.to_string(),
    }
}

fn parse_meta(line: &str) -> Result<ExperimentConfig> {
    let bad = |msg: String| Error::Parse { line: 1, msg };
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| bad("expected '# n=...' metadata".into()))?;
    let mut vals = std::collections::HashMap::new();
    for kv in body.split_ascii_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| bad(format!("bad field '{kv}'")))?;
        let v: u64 = v.parse().map_err(|_| bad(format!("bad value in '{kv}'")))?;
        vals.insert(k, v);
    }
    let get = |k: &str| {
        vals.get(k)
            .copied()
            .ok_or_else(|| bad(format!("missing '{k}'")))
    };
    Ok(ExperimentConfig {
        n: get("n")? as usize,
        k: get("k")? as usize,
        q: get("q")?,
        iterations: get("iterations")? as usize,
        decompositions: get("decompositions")? as usize,
        seed: get("seed")?,
    })
}

/// Regeneration data for one reached weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub seed: u64,
    pub decomp: usize,
    pub iteration: usize,
    /// 0-based information positions, sorted.
    pub positions: Vec<usize>,
    pub coefficients: Vec<u32>,
    pub weight: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentOutput {
    pub report: WeightCoverageReport,
    /// One witness per weight reached by some decomposition (the first found).
    pub witnesses: Vec<Witness>,
}

fn decomposition(h: &Matrix, seed: u64, d: usize) -> Result<(Transformation, rng::Rng)> {
    let mut rng = rng::stream(seed, d as u64 + 1);
    let t = decompose(h, Form::RightIdFull, &mut rng)?;
    Ok((t, rng))
}

pub fn run_easy_weights(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let field = cfg.validate()?;
    let start = Instant::now();
    let inst = cfg.instance()?;
    let per_decomp: Vec<(Vec<Option<u32>>, Vec<Option<Witness>>)> = (0..cfg.decompositions)
        .into_par_iter()
        .map(|d| run_decomposition(cfg, field, &inst, d))
        .collect::<Result<_>>()?;
    let mut first_reached = Vec::with_capacity(per_decomp.len());
    let mut witnesses: Vec<Option<Witness>> = vec![None; cfg.n];
    for (row, wits) in per_decomp {
        for (slot, w) in witnesses.iter_mut().zip(wits) {
            if slot.is_none() {
                *slot = w;
            }
        }
        first_reached.push(row);
    }
    let report = WeightCoverageReport {
        config: cfg.clone(),
        first_reached,
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    Ok(ExperimentOutput {
        report,
        witnesses: witnesses.into_iter().flatten().collect(),
    })
}

fn run_decomposition(
    cfg: &ExperimentConfig,
    field: PrimeField,
    inst: &SdpInstance,
    d: usize,
) -> Result<(Vec<Option<u32>>, Vec<Option<Witness>>)> {
    let (t, mut rng) = decomposition(&inst.h, cfg.seed, d)?;
    let sbar = t.transform_rhs(&inst.s)?;
    let k = t.free_cols();
    let mut first = vec![None; cfg.n];
    let mut wits: Vec<Option<Witness>> = vec![None; cfg.n];
    for it in 1..=cfg.iterations {
        for i in 1..=k {
            let mut positions = index::sample(&mut rng, k, i).into_vec();
            positions.sort_unstable();
            let coefficients: Vec<u32> = positions
                .iter()
                .map(|_| {
                    if field.is_binary() {
                        1
                    } else {
                        field.random_nonzero(&mut rng)
                    }
                })
                .collect();
            let mut z2 = sbar.clone();
            for (&j, &c) in positions.iter().zip(&coefficients) {
                z2.add_scaled(field.neg(c), t.block_col(j));
            }
            let weight = i + z2.weight();
            if first[weight - 1].is_none() {
                first[weight - 1] = Some(it as u32);
                wits[weight - 1] = Some(Witness {
                    seed: cfg.seed,
                    decomp: d,
                    iteration: it,
                    positions,
                    coefficients,
                    weight,
                });
            }
        }
    }
    Ok((first, wits))
}

/// Rebuilds the solution a witness stands for.
pub fn replay_witness(cfg: &ExperimentConfig, w: &Witness) -> Result<FieldVector> {
    let field = cfg.validate()?;
    let inst = cfg.instance()?;
    let (t, _) = decomposition(&inst.h, w.seed, w.decomp)?;
    let sbar = t.transform_rhs(&inst.s)?;
    let mut z1 = FieldVector::zeros(field, t.free_cols());
    for (&j, &c) in w.positions.iter().zip(&w.coefficients) {
        z1.set(j, c);
    }
    Ok(solution_from_z1(&t, &sbar, &z1))
}

/// All weights reachable from decomposition 0 by sweeping every `z1 ∈ F^k`.
pub fn exhaustive_weights(cfg: &ExperimentConfig) -> Result<BTreeSet<usize>> {
    let field = cfg.validate()?;
    let size = (cfg.q as u128)
        .checked_pow(cfg.k as u32)
        .unwrap_or(u128::MAX);
    if size > EXHAUSTIVE_CAP as u128 {
        return Err(Error::CapExceeded {
            size: size.to_string(),
            cap: EXHAUSTIVE_CAP,
        });
    }
    let inst = cfg.instance()?;
    let (t, _) = decomposition(&inst.h, cfg.seed, 0)?;
    let sbar = t.transform_rhs(&inst.s)?;
    let q = field.q();
    let mut digits = vec![0u32; cfg.k];
    let mut out = BTreeSet::new();
    loop {
        let z1 = FieldVector::from_residues(field, &digits)?;
        out.insert(z1.weight() + redundancy_part(&t, &sbar, &z1).weight());
        let Some(pos) = digits.iter().rposition(|&x| x + 1 < q) else {
            break;
        };
        digits[pos] += 1;
        digits[pos + 1..].iter_mut().for_each(|x| *x = 0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enum_coset;

    #[test]
    fn small_run_is_consistent() {
        let mut cfg = ExperimentConfig::new(40, 20, 2, 5);
        cfg.decompositions = 3;
        let out = run_easy_weights(&cfg).unwrap();
        let inst = cfg.instance().unwrap();
        for w in &out.witnesses {
            let x = replay_witness(&cfg, w).unwrap();
            assert_eq!(x.weight(), w.weight);
            assert_eq!(inst.h.mul_vec(&x).unwrap(), inst.s);
        }
        assert_eq!(out.witnesses.len(), out.report.reached().len());
        for d in 0..3 {
            for it in 1..cfg.iterations {
                let before: BTreeSet<_> = out.report.missing(d, it).into_iter().collect();
                let after: BTreeSet<_> = out.report.missing(d, it + 1).into_iter().collect();
                assert!(after.is_subset(&before));
            }
        }
    }

    #[test]
    fn exhaustive_matches_oracle() {
        for seed in 0..5 {
            let cfg = ExperimentConfig::new(6, 3, 2, seed);
            let inst = cfg.instance().unwrap();
            let oracle: BTreeSet<usize> = enum_coset(&inst.h, &inst.s)
                .unwrap()
                .solutions
                .iter()
                .map(|x| x.weight())
                .collect();
            assert_eq!(exhaustive_weights(&cfg).unwrap(), oracle);
        }
    }

    #[test]
    fn csv_round_trip() {
        let mut cfg = ExperimentConfig::new(30, 12, 3, 1);
        cfg.iterations = 3;
        cfg.decompositions = 2;
        let out = run_easy_weights(&cfg).unwrap();
        let mut buf = Vec::new();
        out.report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# n=30 k=12 q=3 iterations=3 decompositions=2 seed=1\ndecomp,iteration,weight,reached\n"));
        assert_eq!(
            WeightCoverageReport::read_csv(buf.as_slice()).unwrap(),
            out.report
        );
        let json = serde_json::to_string(&out.report).unwrap();
        assert_eq!(
            serde_json::from_str::<WeightCoverageReport>(&json).unwrap(),
            out.report
        );
    }

    #[test]
    fn invalid_configs() {
        assert!(run_easy_weights(&ExperimentConfig::new(10, 10, 2, 0)).is_err());
        assert!(run_easy_weights(&ExperimentConfig::new(10, 5, 6, 0)).is_err());
        let mut c = ExperimentConfig::new(10, 5, 2, 0);
        c.iterations = 0;
        assert!(run_easy_weights(&c).is_err());
        assert!(matches!(
            exhaustive_weights(&ExperimentConfig::new(60, 30, 2, 0)),
            Err(Error::CapExceeded { .. })
        ));
    }
}
