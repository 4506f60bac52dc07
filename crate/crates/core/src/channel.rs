//! Store-and-forward channel: packet losses clear 1-bits, injections set
//! 0-bits. Monte-Carlo evaluation of a concatenated code over it.

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::ConcatenatedCode;
use crate::words::{ArrayWord, ColumnWord};
use crate::{Error, Result};

/// Generator used for every trial, recorded in simulation output.
pub const GENERATOR: &str = "ChaCha8Rng::seed_from_u64(seed + trial)";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Flip positions drawn uniformly over the whole array.
    #[default]
    Uniform,
    /// Losses and injections spread round-robin over a random column order,
    /// so no column gets more than `⌈L/n⌉` losses or `⌈I/n⌉` injections.
    PerColumnCapped,
}

impl std::str::FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Placement::Uniform),
            "per-column-capped" => Ok(Placement::PerColumnCapped),
            _ => Err(Error::param(format!("unknown placement policy {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub losses: usize,
    pub injections: usize,
    pub policy: Placement,
    pub seed: u64,
}

impl ChannelSpec {
    pub fn new(losses: usize, injections: usize, seed: u64) -> Self {
        ChannelSpec { losses, injections, policy: Placement::Uniform, seed }
    }

    pub fn with_policy(self, policy: Placement) -> Self {
        ChannelSpec { policy, ..self }
    }

    pub fn check(&self, m: usize, n: usize, w: usize) -> Result<()> {
        if self.losses > n * w {
            return Err(Error::param(format!("{} losses exceed the {} ones of the array", self.losses, n * w)));
        }
        if self.injections > n * (m - w) {
            return Err(Error::param(format!(
                "{} injections exceed the {} zeros of the array",
                self.injections,
                n * (m - w)
            )));
        }
        Ok(())
    }
}

/// Applies `spec` to `word` using a generator seeded with `spec.seed`.
pub fn corrupt(word: &ArrayWord, spec: &ChannelSpec) -> Result<Vec<ColumnWord>> {
    spec.check(word.m(), word.n(), word.w())?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(corrupt_with(word, spec.losses, spec.injections, spec.policy, &mut rng))
}

fn corrupt_with<R: Rng>(word: &ArrayWord, losses: usize, injections: usize, policy: Placement, rng: &mut R) -> Vec<ColumnWord> {
    let (m, n) = (word.m(), word.n());
    let cols = word.columns();
    let mut flips: Vec<Vec<usize>> = vec![Vec::new(); n];
    match policy {
        Placement::Uniform => {
            let ones: Vec<(usize, usize)> =
                cols.iter().enumerate().flat_map(|(j, c)| c.support().iter().map(move |&p| (j, p))).collect();
            let zeros: Vec<(usize, usize)> = cols
                .iter()
                .enumerate()
                .flat_map(|(j, c)| (0..m).filter(|&p| !c.contains(p)).map(move |p| (j, p)))
                .collect();
            for i in sample(rng, ones.len(), losses) {
                flips[ones[i].0].push(ones[i].1);
            }
            for i in sample(rng, zeros.len(), injections) {
                flips[zeros[i].0].push(zeros[i].1);
            }
        }
        Placement::PerColumnCapped => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let share = |total: usize, slot: usize| total / n + usize::from(slot < total % n);
            for (slot, &j) in order.iter().enumerate() {
                let ones = cols[j].support();
                let zeros: Vec<usize> = (0..m).filter(|&p| !cols[j].contains(p)).collect();
                flips[j].extend(sample(rng, ones.len(), share(losses, slot)).into_iter().map(|i| ones[i]));
                flips[j].extend(sample(rng, zeros.len(), share(injections, slot)).into_iter().map(|i| zeros[i]));
            }
        }
    }
    cols.iter()
        .zip(flips)
        .map(|(c, f)| f.into_iter().fold(c.clone(), |acc, p| acc.with_flipped(p).expect("position in range")))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    Success,
    Wrong,
    Failure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub outcome: TrialOutcome,
    pub inner_erasures: usize,
    pub beyond_guarantee: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeSummary {
    pub m: usize,
    pub w: usize,
    pub f: usize,
    pub n: usize,
    pub k: usize,
    pub b: u32,
    pub guarantee: usize,
}

impl From<&ConcatenatedCode> for CodeSummary {
    fn from(c: &ConcatenatedCode) -> Self {
        CodeSummary { m: c.m(), w: c.w(), f: c.f(), n: c.n(), k: c.k(), b: c.bits(), guarantee: c.guarantee() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub generator: String,
    pub code: CodeSummary,
    pub spec: ChannelSpec,
    pub trials: u64,
    pub success: u64,
    pub wrong: u64,
    pub failure: u64,
    pub beyond_guarantee: u64,
    pub success_rate: f64,
    pub wrong_decode_rate: f64,
    pub failure_rate: f64,
    pub mean_inner_erasures: f64,
}

fn run_trial(code: &ConcatenatedCode, spec: &ChannelSpec, trial: u64) -> Result<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(trial));
    let size = 1u16 << code.bits();
    let message: Vec<u16> = (0..code.k()).map(|_| rng.gen_range(0..size)).collect();
    let word = code.encode(&message)?;
    let received = corrupt_with(&word, spec.losses, spec.injections, spec.policy, &mut rng);
    let out = code.decode(&received)?;
    let outcome = match &out.message {
        Some(m) if *m == message => TrialOutcome::Success,
        Some(_) => TrialOutcome::Wrong,
        None => TrialOutcome::Failure,
    };
    Ok(TrialRecord {
        trial,
        outcome,
        inner_erasures: out.columns.iter().filter(|c| c.erased).count(),
        beyond_guarantee: out.beyond_guarantee,
    })
}

/// Runs `trials` independent trials on the global thread pool and returns
/// per-trial records in trial order.
pub fn simulate_records(code: &ConcatenatedCode, spec: &ChannelSpec, trials: u64) -> Result<Vec<TrialRecord>> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1".to_string()));
    }
    spec.check(code.m(), code.n(), code.w())?;
    (0..trials).into_par_iter().map(|t| run_trial(code, spec, t)).collect()
}

pub fn summarize(code: &ConcatenatedCode, spec: &ChannelSpec, records: &[TrialRecord]) -> SimStats {
    let count = |o: TrialOutcome| records.iter().filter(|r| r.outcome == o).count() as u64;
    let trials = records.len() as u64;
    let (success, wrong, failure) = (count(TrialOutcome::Success), count(TrialOutcome::Wrong), count(TrialOutcome::Failure));
    let erasures: usize = records.iter().map(|r| r.inner_erasures).sum();
    let t = trials as f64;
    SimStats {
        generator: GENERATOR.into(),
        code: code.into(),
        spec: *spec,
        trials,
        success,
        wrong,
        failure,
        beyond_guarantee: records.iter().filter(|r| r.beyond_guarantee).count() as u64,
        success_rate: success as f64 / t,
        wrong_decode_rate: wrong as f64 / t,
        failure_rate: failure as f64 / t,
        mean_inner_erasures: erasures as f64 / t,
    }
}

pub fn simulate(code: &ConcatenatedCode, spec: &ChannelSpec, trials: u64) -> Result<SimStats> {
    Ok(summarize(code, spec, &simulate_records(code, spec, trials)?))
}

/// [`simulate`] on a dedicated pool of `threads` workers.
pub fn simulate_with_threads(code: &ConcatenatedCode, spec: &ChannelSpec, trials: u64, threads: usize) -> Result<SimStats> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::param(format!("thread pool: {e}")))?;
    pool.install(|| simulate(code, spec, trials))
}
