//! Generic GI-based solvers for the syndrome decoding problem (find `x` with
//! `H·x = s`, `|x| ≤ t`) and the low-weight codeword problem (nonzero `x` with
//! `H·x = 0`, `|x| ≤ t`), with pluggable sampling strategies.
//!
//! Every solver iterates over random decompositions of `H` and, for each, over
//! a strategy-specific family of generalized inverses, until a candidate of
//! weight at most `t` appears or the [`Budget`] runs out.

pub mod strategies;

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::FieldVector;
use crate::matrix::{decompose, Form, Matrix, Transformation};
use crate::rng;
use strategies::Candidate;

/// A syndrome decoding instance `(H, s, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SdpInstance {
    pub h: Matrix,
    pub s: FieldVector,
    pub t: usize,
}

impl SdpInstance {
    /// Checks that `H` has full row rank, `s ≠ 0` has matching length and `t ≤ n`.
    pub fn new(h: Matrix, s: FieldVector, t: usize) -> Result<Self> {
        check_parity_matrix(&h, t)?;
        if s.len() != h.n_rows() || s.field() != h.field() {
            return Err(Error::DimensionMismatch(
                "syndrome length must equal n-k".into(),
            ));
        }
        if s.is_zero() {
            return Err(Error::ZeroSyndrome);
        }
        Ok(SdpInstance { h, s, t })
    }

    pub fn n(&self) -> usize {
        self.h.n_cols()
    }

    pub fn k(&self) -> usize {
        self.h.n_cols() - self.h.n_rows()
    }
}

/// A low-weight codeword instance `(H, t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LwpInstance {
    pub h: Matrix,
    pub t: usize,
}

impl LwpInstance {
    pub fn new(h: Matrix, t: usize) -> Result<Self> {
        check_parity_matrix(&h, t)?;
        if t == 0 {
            return Err(Error::InvalidParameter(
                "target weight must be at least 1".into(),
            ));
        }
        Ok(LwpInstance { h, t })
    }

    pub fn n(&self) -> usize {
        self.h.n_cols()
    }

    pub fn k(&self) -> usize {
        self.h.n_cols() - self.h.n_rows()
    }
}

fn check_parity_matrix(h: &Matrix, t: usize) -> Result<()> {
    let rank = h.rank();
    if rank != h.n_rows() {
        return Err(Error::NotFullRank {
            rank,
            rows: h.n_rows(),
        });
    }
    if t > h.n_cols() {
        return Err(Error::InvalidParameter(format!(
            "t={t} exceeds n={}",
            h.n_cols()
        )));
    }
    Ok(())
}

/// Sampling strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Prange,
    LeeBrickell,
    Leon,
    Stern,
    FiniaszSendrier,
    MultiDecomp,
    GiRandom,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 7] = [
        StrategyKind::Prange,
        StrategyKind::LeeBrickell,
        StrategyKind::Leon,
        StrategyKind::Stern,
        StrategyKind::FiniaszSendrier,
        StrategyKind::MultiDecomp,
        StrategyKind::GiRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Prange => "prange",
            StrategyKind::LeeBrickell => "lee_brickell",
            StrategyKind::Leon => "leon",
            StrategyKind::Stern => "stern",
            StrategyKind::FiniaszSendrier => "finiasz_sendrier",
            StrategyKind::MultiDecomp => "multi_decomp",
            StrategyKind::GiRandom => "gi_random",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_").to_ascii_lowercase();
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::Config(format!("unknown strategy '{s}'")))
    }
}

/// Strategy parameters. `None` fields take per-strategy defaults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyConfig {
    pub kind: StrategyKind,
    /// Enumeration weight (per half for Stern).
    pub p: Option<usize>,
    /// Window length ℓ (Leon, Stern, Finiasz-Sendrier).
    pub ell: Option<usize>,
    /// Identity block sizes for multi-block steering.
    pub ell_list: Vec<usize>,
    /// GIs drawn per decomposition by the randomized strategies.
    pub samples_per_decomposition: Option<usize>,
    pub seed: u64,
}

impl StrategyConfig {
    pub fn new(kind: StrategyKind, seed: u64) -> Self {
        StrategyConfig {
            kind,
            p: None,
            ell: None,
            ell_list: Vec::new(),
            samples_per_decomposition: None,
            seed,
        }
    }

    pub fn with_p(mut self, p: usize) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_ell(mut self, ell: usize) -> Self {
        self.ell = Some(ell);
        self
    }

    pub fn with_ell_list(mut self, ells: Vec<usize>) -> Self {
        self.ell_list = ells;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples_per_decomposition = Some(samples);
        self
    }

    /// Validated parameters for an instance with `n` columns and redundancy `r`.
    fn resolve(&self, n: usize, r: usize, q_bits: u32) -> Result<Resolved> {
        let k = n - r;
        let p_default = match self.kind {
            StrategyKind::Prange => 0,
            StrategyKind::Leon | StrategyKind::FiniaszSendrier => 2,
            _ => 1,
        };
        let p = self.p.unwrap_or(p_default);
        let max_ell = (strategies::MAX_KEY_BITS / q_bits) as usize;
        let ell = match (self.kind, self.ell) {
            (_, Some(l)) => l,
            (StrategyKind::FiniaszSendrier, None) => fs_default_ell(k, p).min(r).min(max_ell),
            (StrategyKind::Stern | StrategyKind::Leon, None) => 2usize.min(r),
            _ => 0,
        };
        let bad = |msg: String| Err(Error::Config(msg));
        match self.kind {
            StrategyKind::Prange | StrategyKind::GiRandom => {}
            StrategyKind::LeeBrickell | StrategyKind::MultiDecomp if p > k => {
                return bad(format!("p={p} exceeds k={k}"));
            }
            StrategyKind::Leon if p > k || ell > r => {
                return bad(format!("need p ≤ k={k} and ℓ ≤ r={r}, got p={p}, ℓ={ell}"));
            }
            StrategyKind::Stern if p > k.div_ceil(2) || ell > r || ell > max_ell => {
                return bad(format!(
                    "need p ≤ ⌈k/2⌉={}, ℓ ≤ min(r, {max_ell}), got p={p}, ℓ={ell}",
                    k.div_ceil(2)
                ));
            }
            StrategyKind::FiniaszSendrier if ell > r || ell > max_ell || p > k + ell => {
                return bad(format!(
                    "need ℓ ≤ min(r={r}, {max_ell}) and p ≤ k+ℓ, got p={p}, ℓ={ell}"
                ));
            }
            _ => {}
        }
        if self.kind == StrategyKind::MultiDecomp && self.ell_list.iter().sum::<usize>() > r {
            return bad(format!("block sizes {:?} sum above r={r}", self.ell_list));
        }
        Ok(Resolved { p, ell })
    }

    fn form(&self, ell: usize) -> Form {
        match self.kind {
            StrategyKind::FiniaszSendrier => Form::PartialGe(ell),
            StrategyKind::MultiDecomp => Form::MultiId(self.ell_list.clone()),
            _ => Form::RightIdFull,
        }
    }
}

struct Resolved {
    p: usize,
    ell: usize,
}

/// ⌈log2 C(⌈k/2⌉, p)⌉, the usual window for a balanced collision search.
pub fn fs_default_ell(k: usize, p: usize) -> usize {
    let h = k.div_ceil(2) as f64;
    let log2_binom: f64 = (0..p)
        .map(|j| ((h - j as f64) / (j as f64 + 1.0)).max(1.0).log2())
        .sum();
    log2_binom.ceil().max(0.0) as usize
}

/// Search limits. `max_samples_per_decomposition = None` means `10·k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_decompositions: usize,
    pub max_samples_per_decomposition: Option<usize>,
    pub wall_clock_limit: Option<Duration>,
    pub workers: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_decompositions: 100,
            max_samples_per_decomposition: None,
            wall_clock_limit: None,
            workers: 1,
        }
    }
}

impl Budget {
    pub fn decompositions(n: usize) -> Self {
        Budget {
            max_decompositions: n,
            ..Budget::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_decompositions == 0
            || self.workers == 0
            || self.max_samples_per_decomposition == Some(0)
        {
            return Err(Error::Config("budget limits must be positive".into()));
        }
        if self.wall_clock_limit == Some(Duration::ZERO) {
            return Err(Error::Config("wall clock limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Found { x: FieldVector, weight: usize },
    Fail,
}

#[derive(Clone, Debug)]
pub struct DecodeResult {
    pub outcome: Outcome,
    pub decompositions_used: usize,
    pub samples_used: u64,
    pub elapsed: Duration,
    pub seed: u64,
    /// Block steerings skipped because the matching block of `s̄` was zero.
    pub zero_blocks: u64,
}

impl DecodeResult {
    pub fn is_found(&self) -> bool {
        matches!(self.outcome, Outcome::Found { .. })
    }

    pub fn solution(&self) -> Option<&FieldVector> {
        match &self.outcome {
            Outcome::Found { x, .. } => Some(x),
            Outcome::Fail => None,
        }
    }
}

/// SDP: `H·x = s` and `|x| ≤ t`.
pub fn verify_sdp(inst: &SdpInstance, x: &FieldVector) -> bool {
    x.len() == inst.n()
        && x.field() == inst.h.field()
        && x.weight() <= inst.t
        && inst.h.mul_vec(x).is_ok_and(|hx| hx == inst.s)
}

/// LWP: `H·x = 0`, `x ≠ 0` and `|x| ≤ t`.
pub fn verify_lwp(inst: &LwpInstance, x: &FieldVector) -> bool {
    x.len() == inst.n()
        && x.field() == inst.h.field()
        && !x.is_zero()
        && x.weight() <= inst.t
        && inst.h.mul_vec(x).is_ok_and(|hx| hx.is_zero())
}

/// Either problem, for callers holding a parsed instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Sdp(SdpInstance),
    Lwp(LwpInstance),
}

impl Instance {
    pub fn h(&self) -> &Matrix {
        match self {
            Instance::Sdp(i) => &i.h,
            Instance::Lwp(i) => &i.h,
        }
    }

    pub fn t(&self) -> usize {
        match self {
            Instance::Sdp(i) => i.t,
            Instance::Lwp(i) => i.t,
        }
    }
}

pub fn verify_solution(inst: &Instance, x: &FieldVector) -> bool {
    match inst {
        Instance::Sdp(i) => verify_sdp(i, x),
        Instance::Lwp(i) => verify_lwp(i, x),
    }
}

/// Searches a GI `X` of `H` with `|X·s| ≤ t`.
pub fn solve_cwp(
    inst: &SdpInstance,
    strat: &StrategyConfig,
    budget: &Budget,
) -> Result<DecodeResult> {
    run(&Instance::Sdp(inst.clone()), strat, budget)
}

/// Searches a nonzero null-space vector `v` with `|v| ≤ t`, using
/// `b = H·x0` for a random weight-3 `x0` to parameterize the null space.
pub fn solve_swp(
    inst: &LwpInstance,
    strat: &StrategyConfig,
    budget: &Budget,
) -> Result<DecodeResult> {
    if strat.kind == StrategyKind::Prange {
        return Err(Error::Config(
            "prange yields only the zero codeword; pick another strategy".into(),
        ));
    }
    run(&Instance::Lwp(inst.clone()), strat, budget)
}

struct Shared {
    next: AtomicUsize,
    stop: AtomicBool,
    found: Mutex<Option<(usize, FieldVector)>>,
    samples: AtomicUsize,
    zero_blocks: AtomicUsize,
    used: AtomicUsize,
}

fn run(inst: &Instance, strat: &StrategyConfig, budget: &Budget) -> Result<DecodeResult> {
    budget.validate()?;
    let h = inst.h();
    let (n, r) = (h.n_cols(), h.n_rows());
    let params = strat.resolve(n, r, h.field().bits())?;
    let start = Instant::now();
    let shared = Shared {
        next: AtomicUsize::new(0),
        stop: AtomicBool::new(false),
        found: Mutex::new(None),
        samples: AtomicUsize::new(0),
        zero_blocks: AtomicUsize::new(0),
        used: AtomicUsize::new(0),
    };
    let deadline = budget.wall_clock_limit.map(|d| start + d);
    if budget.workers == 1 {
        worker(inst, strat, &params, budget, deadline, &shared, 0)?;
    } else {
        let errors: Vec<Result<()>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..budget.workers)
                .map(|w| {
                    let shared = &shared;
                    let params = &params;
                    scope.spawn(move || {
                        worker(inst, strat, params, budget, deadline, shared, w as u64)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });
        for e in errors {
            e?;
        }
    }
    let found = shared.found.into_inner().expect("lock poisoned");
    let outcome = match found {
        Some((_, x)) => {
            let weight = x.weight();
            Outcome::Found { x, weight }
        }
        None => Outcome::Fail,
    };
    Ok(DecodeResult {
        outcome,
        decompositions_used: shared.used.load(Ordering::Relaxed),
        samples_used: shared.samples.load(Ordering::Relaxed) as u64,
        elapsed: start.elapsed(),
        seed: strat.seed,
        zero_blocks: shared.zero_blocks.load(Ordering::Relaxed) as u64,
    })
}

fn syndrome_for<R: Rng>(inst: &Instance, rng: &mut R) -> FieldVector {
    match inst {
        Instance::Sdp(i) => i.s.clone(),
        Instance::Lwp(i) => {
            let n = i.n();
            // weight 3 can be a codeword for every support on tiny codes; weight 1
            // always terminates because a full-rank H has a nonzero column
            for attempt in 0.. {
                let w = if attempt < 16 { 3.min(n) } else { 1 };
                let x0 = FieldVector::random_of_weight(i.h.field(), n, w, rng);
                let b = i.h.mul_vec(&x0).expect("x0 has length n");
                if !b.is_zero() {
                    return b;
                }
            }
            unreachable!("a nonzero column is hit with probability at least 1/n")
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn worker(
    inst: &Instance,
    strat: &StrategyConfig,
    params: &Resolved,
    budget: &Budget,
    deadline: Option<Instant>,
    shared: &Shared,
    index: u64,
) -> Result<()> {
    let mut rng = rng::stream(strat.seed, index);
    let h = inst.h();
    let k = h.n_cols() - h.n_rows();
    let cap = budget
        .max_samples_per_decomposition
        .unwrap_or((10 * k).max(1));
    let per_decomp = strat.samples_per_decomposition.unwrap_or(cap).min(cap);
    let t_max = inst.t();
    let lwp = matches!(inst, Instance::Lwp(_));
    loop {
        if shared.stop.load(Ordering::Relaxed) || deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(());
        }
        let d = shared.next.fetch_add(1, Ordering::Relaxed);
        if d >= budget.max_decompositions {
            return Ok(());
        }
        shared.used.fetch_add(1, Ordering::Relaxed);
        let t = decompose(h, strat.form(params.ell), &mut rng)?;
        let b = syndrome_for(inst, &mut rng);
        let bbar = t.transform_rhs(&b)?;
        // For codewords the null space is swept as Q·[w; -V·w]: same generators, zero target.
        let target = if lwp {
            FieldVector::zeros(h.field(), bbar.len())
        } else {
            bbar.clone()
        };
        let mut samples = 0usize;
        let mut hit: Option<FieldVector> = None;
        let mut check = |c: &Candidate| -> ControlFlow<()> {
            samples += 1;
            if cfg!(debug_assertions) {
                let x = c.to_solution(&t);
                let hx = h.mul_vec(&x).expect("candidate has length n");
                assert!(
                    if lwp { hx.is_zero() } else { hx == b },
                    "candidate outside the solution space"
                );
            }
            if c.weight() <= t_max && !(lwp && c.z1.is_zero()) {
                let x = c.to_solution(&t);
                if verify_solution(inst, &x) {
                    hit = Some(x);
                    return ControlFlow::Break(());
                }
            }
            if samples >= per_decomp
                || shared.stop.load(Ordering::Relaxed)
                || (samples % 64 == 0 && deadline.is_some_and(|dl| Instant::now() >= dl))
            {
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        };
        let zero_blocks = generate(&t, &target, strat, params, per_decomp, &mut rng, &mut check)?;
        shared.samples.fetch_add(samples, Ordering::Relaxed);
        shared.zero_blocks.fetch_add(zero_blocks, Ordering::Relaxed);
        if let Some(x) = hit {
            let mut slot = shared.found.lock().expect("lock poisoned");
            // lowest decomposition index wins, so parallel runs stay reproducible when possible
            if !matches!(slot.as_ref(), Some((prev, _)) if *prev <= d) {
                *slot = Some((d, x));
            }
            shared.stop.store(true, Ordering::Relaxed);
            return Ok(());
        }
    }
}

/// Feeds one decomposition's candidates to `emit`. Returns the number of
/// zero `s̄` blocks met by multi-block steering.
fn generate<R: Rng>(
    t: &Transformation,
    sbar: &FieldVector,
    strat: &StrategyConfig,
    params: &Resolved,
    per_decomp: usize,
    rng: &mut R,
    emit: &mut strategies::Emit,
) -> Result<usize> {
    let p = params.p;
    match strat.kind {
        StrategyKind::Prange => {
            let _ = emit(&strategies::prange_candidate(t, sbar));
        }
        StrategyKind::LeeBrickell => {
            for w in 0..=p {
                if strategies::lee_brickell(t, sbar, w, emit).is_break() {
                    break;
                }
            }
        }
        StrategyKind::Leon => {
            for w in 0..=p {
                if strategies::leon(t, sbar, w, params.ell, emit).is_break() {
                    break;
                }
            }
        }
        StrategyKind::Stern => {
            let _ = strategies::stern(t, sbar, p, params.ell, emit)?;
        }
        StrategyKind::FiniaszSendrier => {
            for w in 0..=p {
                if strategies::finiasz_sendrier(t, sbar, w, emit)?.is_break() {
                    break;
                }
            }
        }
        StrategyKind::MultiDecomp => {
            let mut zero = 0;
            for _ in 0..per_decomp {
                let ws = strategies::random_block_steering(t, sbar, p, rng);
                let (c, zb) = strategies::multi_decomp_candidate(t, sbar, &ws)?;
                zero += zb.len();
                if emit(&c).is_break() {
                    break;
                }
            }
            return Ok(zero);
        }
        StrategyKind::GiRandom => {
            if t.free_cols() == 0 {
                return Ok(0);
            }
            for _ in 0..per_decomp {
                if emit(&strategies::gi_random_candidate(t, sbar, rng)).is_break() {
                    break;
                }
            }
        }
    }
    Ok(0)
}
