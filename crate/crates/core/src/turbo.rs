//! Serially concatenated quantum turbo code: frame simulation, iterative
//! decoding and Monte-Carlo error tallies.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::DepolarizingChannel;
use crate::error::{Error, Result};
use crate::exec::{domain, par_map, stream_rng};
use crate::exit::{measure_mi, measure_mi_truth};
use crate::interleaver::QuantumInterleaver;
use crate::message::{MessageRole, MessageSequence, MessageSubject};
use crate::pauli::{EffectiveVector, SeedTransform};
use crate::qcc::{siso_decode, track_error, CodeRole, CodeSpec, SyndromeSequence};

pub const DEFAULT_MAX_ITERATIONS: usize = 15;
/// Iteration stops once both extrinsic MIs move by less than this.
pub const EARLY_EXIT_TOL: f64 = 1e-4;
/// Frames per scheduling batch in [`run_qber`]; independent of the worker count.
pub const QBER_BATCH: usize = 64;

#[derive(Clone, Debug)]
pub struct TurboSystem {
    pub inner: CodeSpec,
    pub outer: CodeSpec,
    pub interleaver: QuantumInterleaver,
    pub max_iterations: usize,
    /// `None` disables early exit.
    pub early_exit_tol: Option<f64>,
}

impl TurboSystem {
    pub fn new(inner: CodeSpec, outer: CodeSpec, interleaver: QuantumInterleaver, max_iterations: usize) -> Result<Self> {
        let len = interleaver.size();
        if inner.logical_len() != len || outer.physical_len() != len {
            return Err(Error::Dimension(format!(
                "interleaver size {len} must equal inner logical length {} and outer physical length {}",
                inner.logical_len(),
                outer.physical_len()
            )));
        }
        if max_iterations == 0 {
            return Err(Error::InvalidInput("max_iterations must be at least 1".into()));
        }
        Ok(TurboSystem { inner, outer, interleaver, max_iterations, early_exit_tol: Some(EARLY_EXIT_TOL) })
    }

    /// Builds both codes around a random interleaver of `interleaver_len`
    /// qubits drawn from `master_seed`.
    pub fn from_seeds(
        inner: SeedTransform,
        outer: SeedTransform,
        interleaver_len: usize,
        max_iterations: usize,
        master_seed: u64,
    ) -> Result<Self> {
        if interleaver_len == 0 || interleaver_len % inner.k() != 0 || interleaver_len % outer.n() != 0 {
            return Err(Error::InvalidInput(format!(
                "interleaver length {interleaver_len} must be a positive multiple of inner k = {} and outer n = {}",
                inner.k(),
                outer.n()
            )));
        }
        let (bi, bo) = (interleaver_len / inner.k(), interleaver_len / outer.n());
        let inner = CodeSpec::new(inner, CodeRole::Inner, bi)?;
        let outer = CodeSpec::new(outer, CodeRole::Outer, bo)?;
        let mut rng = stream_rng(master_seed, domain::INTERLEAVER, 0);
        let il = QuantumInterleaver::new_random(interleaver_len, &mut rng)?;
        Self::new(inner, outer, il, max_iterations)
    }

    pub fn with_early_exit(mut self, tol: Option<f64>) -> Self {
        self.early_exit_tol = tol;
        self
    }

    pub fn rate(&self) -> f64 {
        self.inner.seed().rate() * self.outer.seed().rate()
    }

    pub fn interleaver_len(&self) -> usize {
        self.interleaver.size()
    }
}

/// Everything about one transmitted frame, including the hidden errors.
#[derive(Clone, Debug)]
pub struct SimulatedFrame {
    pub p1: EffectiveVector,
    pub l1: EffectiveVector,
    pub syn1: SyndromeSequence,
    pub p2: EffectiveVector,
    pub syn2: SyndromeSequence,
    pub true_l2: EffectiveVector,
}

pub fn simulate_frame<R: Rng + ?Sized>(sys: &TurboSystem, ch: &DepolarizingChannel, rng: &mut R) -> Result<SimulatedFrame> {
    let p1 = ch.sample_error(sys.inner.physical_len(), rng);
    frame_from_error(sys, p1)
}

/// Runs a given inner physical error through both inverse encoders.
pub fn frame_from_error(sys: &TurboSystem, p1: EffectiveVector) -> Result<SimulatedFrame> {
    let inner = track_error(&sys.inner, &p1)?;
    let p2 = sys.interleaver.inverse_apply(&inner.logical)?;
    let outer = track_error(&sys.outer, &p2)?;
    Ok(SimulatedFrame { p1, l1: inner.logical, syn1: inner.syndrome, p2, syn2: outer.syndrome, true_l2: outer.logical })
}

/// Mutual information of the messages exchanged in one iteration.
///
/// `*_est` values use the truth-free estimator; `*_true` values are measured
/// against the actual errors and are only present when those were supplied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationMi {
    pub iteration: usize,
    pub inner_ext_est: f64,
    pub outer_ext_est: f64,
    /// `I_A(L1)`: inner a-priori input.
    pub ia_l1_true: Option<f64>,
    /// `I_E(L1)`: inner extrinsic output.
    pub ie_l1_true: Option<f64>,
    /// `I_E(P2)`: outer extrinsic output, the next inner a-priori input.
    pub ie_p2_true: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct DecodeOutput {
    pub estimated_l2: EffectiveVector,
    /// Hard decision after each iteration actually run.
    pub per_iteration_l2: Vec<EffectiveVector>,
    pub iterations: usize,
    pub mi_log: Vec<IterationMi>,
}

/// True errors used to annotate the MI log.
#[derive(Clone, Copy, Debug)]
pub struct Truth<'a> {
    pub l1: &'a EffectiveVector,
    pub p2: &'a EffectiveVector,
}

pub fn turbo_decode(
    sys: &TurboSystem,
    syn1: &SyndromeSequence,
    syn2: &SyndromeSequence,
    ch: &DepolarizingChannel,
) -> Result<DecodeOutput> {
    turbo_decode_traced(sys, syn1, syn2, ch, None)
}

/// Iterative decoding loop.
///
/// Each iteration runs the inner decoder on channel priors and the fed-back
/// logical priors, moves its logical extrinsic through the inverse
/// interleaver into physical priors for the outer decoder (which has uniform
/// logical priors), and moves the outer physical extrinsic back through the
/// interleaver as the next inner logical priors. The estimate is the
/// symbol-wise argmax of the outer logical a-posteriori messages.
pub fn turbo_decode_traced(
    sys: &TurboSystem,
    syn1: &SyndromeSequence,
    syn2: &SyndromeSequence,
    ch: &DepolarizingChannel,
    truth: Option<Truth<'_>>,
) -> Result<DecodeOutput> {
    let chan = MessageSequence::new(
        MessageRole::APriori,
        MessageSubject::Physical,
        vec![ch.symbol_priors(); sys.inner.physical_len()],
    );
    let uniform_l2 = MessageSequence::uniform(sys.outer.logical_len(), MessageRole::APriori, MessageSubject::Logical);
    let mut priors_l1 = MessageSequence::uniform(sys.inner.logical_len(), MessageRole::APriori, MessageSubject::Logical);
    let mut per_iteration_l2 = Vec::with_capacity(sys.max_iterations);
    let mut mi_log: Vec<IterationMi> = Vec::with_capacity(sys.max_iterations);
    let wrap = |iteration: usize| move |e: Error| Error::TurboFailure { iteration, source: Box::new(e) };

    for it in 1..=sys.max_iterations {
        let ia_l1_true = truth.map(|t| measure_mi_truth(t.l1, &priors_l1)).transpose().map_err(wrap(it))?;
        let inner = siso_decode(&sys.inner, &chan, &priors_l1, syn1).map_err(wrap(it))?;
        let priors_p2 = sys.interleaver.inverse_apply_messages(&inner.ext_l).map_err(wrap(it))?.with_role(MessageRole::APriori);
        let outer = siso_decode(&sys.outer, &priors_p2, &uniform_l2, syn2).map_err(wrap(it))?;
        priors_l1 = sys.interleaver.apply_messages(&outer.ext_p).map_err(wrap(it))?.with_role(MessageRole::APriori);
        per_iteration_l2.push(outer.post_l.hard_decision());

        let record = IterationMi {
            iteration: it,
            inner_ext_est: measure_mi(&inner.ext_l).map_err(wrap(it))?,
            outer_ext_est: measure_mi(&outer.ext_p).map_err(wrap(it))?,
            ia_l1_true,
            ie_l1_true: truth.map(|t| measure_mi_truth(t.l1, &inner.ext_l)).transpose().map_err(wrap(it))?,
            ie_p2_true: truth.map(|t| measure_mi_truth(t.p2, &outer.ext_p)).transpose().map_err(wrap(it))?,
        };
        let converged = match (sys.early_exit_tol, mi_log.last()) {
            (Some(tol), Some(prev)) => {
                (record.inner_ext_est - prev.inner_ext_est).abs() < tol
                    && (record.outer_ext_est - prev.outer_ext_est).abs() < tol
            }
            _ => false,
        };
        mi_log.push(record);
        if converged {
            break;
        }
    }
    let iterations = per_iteration_l2.len();
    Ok(DecodeOutput { estimated_l2: per_iteration_l2[iterations - 1].clone(), per_iteration_l2, iterations, mi_log })
}

#[derive(Clone, Debug)]
pub struct FrameResult {
    pub true_l2: EffectiveVector,
    pub estimated_l2: EffectiveVector,
    pub qubit_errors: usize,
    pub word_error: bool,
    pub iterations: usize,
    /// Qubit errors had decoding stopped after iteration `i + 1`; entries past
    /// an early exit repeat the final count.
    pub qubit_errors_by_iteration: Vec<usize>,
    pub mi_log: Vec<IterationMi>,
}

pub fn run_frame<R: Rng + ?Sized>(sys: &TurboSystem, ch: &DepolarizingChannel, rng: &mut R) -> Result<FrameResult> {
    let frame = simulate_frame(sys, ch, rng)?;
    let out = turbo_decode(sys, &frame.syn1, &frame.syn2, ch)?;
    let mut by_iter: Vec<usize> =
        out.per_iteration_l2.iter().map(|e| e.symbol_differences(&frame.true_l2)).collect::<Result<_>>()?;
    let last = *by_iter.last().expect("at least one iteration");
    by_iter.resize(sys.max_iterations, last);
    Ok(FrameResult {
        qubit_errors: last,
        word_error: last > 0,
        true_l2: frame.true_l2,
        estimated_l2: out.estimated_l2,
        iterations: out.iterations,
        qubit_errors_by_iteration: by_iter,
        mi_log: out.mi_log,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QberRecord {
    pub p: f64,
    pub frames: u64,
    pub logical_qubits_per_frame: u64,
    pub qubit_errors: u64,
    pub word_errors: u64,
    pub iteration_sum: u64,
    /// Qubit errors summed over frames, per iteration count.
    pub qubit_errors_by_iteration: Vec<u64>,
}

impl QberRecord {
    pub fn qber(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.qubit_errors as f64 / (self.frames * self.logical_qubits_per_frame) as f64
    }

    pub fn wer(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.word_errors as f64 / self.frames as f64
    }

    pub fn mean_iterations(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.iteration_sum as f64 / self.frames as f64
    }

    /// QBER had every frame stopped after `iteration` iterations (1-based).
    pub fn qber_at_iteration(&self, iteration: usize) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.qubit_errors_by_iteration[iteration - 1] as f64 / (self.frames * self.logical_qubits_per_frame) as f64
    }
}

/// Monte-Carlo QBER/WER at one depolarizing probability.
///
/// Frame `i` draws from stream `i` of the master seed. Frames run in batches
/// of [`QBER_BATCH`] and are tallied in index order, stopping right after the
/// frame that brings the word-error count to `stop_at_errors` (0 disables the
/// cutoff), so the tally does not depend on `workers`.
pub fn run_qber(
    sys: &TurboSystem,
    ch: &DepolarizingChannel,
    frames: u64,
    stop_at_errors: u64,
    master_seed: u64,
    workers: usize,
) -> Result<QberRecord> {
    if frames == 0 {
        return Err(Error::InvalidInput("frames must be at least 1".into()));
    }
    let mut rec = QberRecord {
        p: ch.p(),
        frames: 0,
        logical_qubits_per_frame: sys.outer.logical_len() as u64,
        qubit_errors: 0,
        word_errors: 0,
        iteration_sum: 0,
        qubit_errors_by_iteration: vec![0; sys.max_iterations],
    };
    let mut start = 0u64;
    while start < frames {
        let count = (frames - start).min(QBER_BATCH as u64) as usize;
        let results = par_map(count, workers, |j| {
            let mut rng = stream_rng(master_seed, domain::FRAME, start + j as u64);
            run_frame(sys, ch, &mut rng)
        })?;
        for r in results {
            let r = r?;
            rec.frames += 1;
            rec.qubit_errors += r.qubit_errors as u64;
            rec.word_errors += u64::from(r.word_error);
            rec.iteration_sum += r.iterations as u64;
            for (acc, &e) in rec.qubit_errors_by_iteration.iter_mut().zip(&r.qubit_errors_by_iteration) {
                *acc += e as u64;
            }
            if stop_at_errors > 0 && rec.word_errors >= stop_at_errors {
                return Ok(rec);
            }
        }
        start += count as u64;
    }
    Ok(rec)
}
