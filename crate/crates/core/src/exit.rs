//! EXIT-chart engine: Gaussian a-priori model, 4-ary mutual information,
//! transfer curves, tunnel analysis, threshold search, trajectories and
//! EXIT-area code search.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::DepolarizingChannel;
use crate::error::{Error, Result};
use crate::exec::{domain, par_map, stream_rng};
use crate::message::{MessageRole, MessageSequence, MessageSubject, SymbolDistribution};
use crate::pauli::{random_symplectic, AncillaKind, EffectiveVector, PauliSymbol, SeedTransform};
use crate::qcc::{siso_decode, track_error, CodeRole, CodeSpec};
use crate::turbo::{simulate_frame, turbo_decode_traced, Truth, TurboSystem};

/// Largest a-priori standard deviation; `I_A = 1` is an exact delta instead.
pub const SIGMA_CAP: f64 = 40.0;

fn log2_1p_exp(x: f64) -> f64 {
    let ln = if x > 0.0 { x + (-x).exp().ln_1p() } else { x.exp().ln_1p() };
    ln / std::f64::consts::LN_2
}

/// Mutual information between a bit and its consistent-Gaussian LLR
/// `N(sigma^2 / 2, sigma^2)`, by Simpson integration.
pub fn j_function(sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(Error::OutOfRange { what: "a-priori sigma", value: sigma });
    }
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let mean = sigma * sigma / 2.0;
    let (lo, hi) = (-12.0f64, 12.0f64);
    let steps = ((400.0 * sigma).ceil() as usize).max(4000) & !1;
    let h = (hi - lo) / steps as f64;
    let f = |z: f64| {
        let pdf = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        pdf * log2_1p_exp(-(mean + sigma * z))
    };
    let mut acc = f(lo) + f(hi);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * h);
    }
    Ok((1.0 - acc * h / 3.0).clamp(0.0, 1.0))
}

/// Inverse of [`j_function`] by bisection on `[0, SIGMA_CAP]`.
pub fn j_inverse(mi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&mi) {
        return Err(Error::OutOfRange { what: "mutual information for J inverse", value: mi });
    }
    if mi == 0.0 {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0f64, SIGMA_CAP);
    if j_function(hi)? <= mi {
        return Ok(SIGMA_CAP);
    }
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if j_function(mid)? < mi {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A-priori messages about `true_errors` carrying `target_ia` bits of
/// (normalized) information per qubit.
///
/// Each Z- and X-bit gets an independent LLR `sigma^2/2 (1 - 2b) + sigma n`
/// with `n ~ N(0, 1)` and `sigma = J^{-1}(target_ia)`; the symbol table is the
/// product of the two bit tables.
pub fn generate_apriori<R: Rng + ?Sized>(
    true_errors: &EffectiveVector,
    target_ia: f64,
    subject: MessageSubject,
    rng: &mut R,
) -> Result<MessageSequence> {
    if !(0.0..=1.0).contains(&target_ia) {
        return Err(Error::OutOfRange { what: "target a-priori information", value: target_ia });
    }
    if target_ia == 0.0 {
        return Ok(MessageSequence::uniform(true_errors.n_qubits(), MessageRole::APriori, subject));
    }
    if target_ia == 1.0 {
        return Ok(MessageSequence::delta(true_errors, MessageRole::APriori, subject));
    }
    let sigma = j_inverse(target_ia)?;
    let mean = sigma * sigma / 2.0;
    let mut bit = |b: bool| -> f64 {
        let n: f64 = rng.sample(StandardNormal);
        let llr = if b { -mean } else { mean } + sigma * n;
        // P(b = 1) = 1 / (1 + e^{llr})
        1.0 / (1.0 + llr.exp())
    };
    let dists = true_errors
        .symbols()
        .map(|s| {
            let (z, x) = s.bits();
            let pz = bit(z);
            let px = bit(x);
            SymbolDistribution::from_bit_probs(pz, px)
        })
        .collect();
    Ok(MessageSequence::new(MessageRole::APriori, subject, dists))
}

/// Time-average estimate `1/2 (2 + E[sum_s P(s) log2 P(s)])`, clamped to `[0, 1]`.
pub fn measure_mi(msgs: &MessageSequence) -> Result<f64> {
    if msgs.is_empty() {
        return Err(Error::InvalidInput("cannot measure information of an empty sequence".into()));
    }
    msgs.check_normalized(1e-6)?;
    let mean = msgs.dists.iter().map(SymbolDistribution::neg_entropy_bits).sum::<f64>() / msgs.len() as f64;
    Ok((0.5 * (2.0 + mean)).clamp(0.0, 1.0))
}

/// [`measure_mi`] with a length check against the errors the messages describe.
pub fn measure_mi_for(true_errors: &EffectiveVector, msgs: &MessageSequence) -> Result<f64> {
    if true_errors.n_qubits() != msgs.len() {
        return Err(Error::LengthMismatch { expected: true_errors.n_qubits(), actual: msgs.len() });
    }
    measure_mi(msgs)
}

/// `1/2 (2 + E[log2 P(true symbol)])`, clamped to `[0, 1]`.
pub fn measure_mi_truth(true_errors: &EffectiveVector, msgs: &MessageSequence) -> Result<f64> {
    if true_errors.n_qubits() != msgs.len() {
        return Err(Error::LengthMismatch { expected: true_errors.n_qubits(), actual: msgs.len() });
    }
    if msgs.is_empty() {
        return Err(Error::InvalidInput("cannot measure information of an empty sequence".into()));
    }
    msgs.check_normalized(1e-6)?;
    let total: f64 = true_errors.symbols().zip(&msgs.dists).map(|(s, d)| d.prob(s).max(1e-300).log2()).sum();
    Ok((0.5 * (2.0 + total / msgs.len() as f64)).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitPoint {
    pub i_a: f64,
    pub i_e: f64,
    /// Frames dropped because the decoder could not normalize a message.
    pub failures: usize,
}

fn average_frames(i_a: f64, frames: usize, mut one: impl FnMut() -> Result<f64>) -> Result<ExitPoint> {
    let mut sum = 0.0;
    let mut ok = 0usize;
    let mut failures = 0usize;
    for _ in 0..frames {
        match one() {
            Ok(v) => {
                sum += v;
                ok += 1;
            }
            Err(Error::DecodingFailure { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    if ok == 0 {
        return Err(Error::DecodingFailure { step: 0 });
    }
    Ok(ExitPoint { i_a, i_e: sum / ok as f64, failures })
}

/// Inner decoder transfer point: channel errors at `ch`, a-priori messages on
/// the inner logical error, extrinsic information about that error.
pub fn inner_exit_point<R: Rng + ?Sized>(
    spec: &CodeSpec,
    ch: &DepolarizingChannel,
    target_ia: f64,
    frames: usize,
    rng: &mut R,
) -> Result<ExitPoint> {
    let chan = MessageSequence::new(MessageRole::APriori, MessageSubject::Physical, vec![ch.symbol_priors(); spec.physical_len()]);
    average_frames(target_ia, frames, || {
        let p1 = ch.sample_error(spec.physical_len(), rng);
        let tracked = track_error(spec, &p1)?;
        let priors_l = generate_apriori(&tracked.logical, target_ia, MessageSubject::Logical, rng)?;
        let out = siso_decode(spec, &chan, &priors_l, &tracked.syndrome)?;
        measure_mi_for(&tracked.logical, &out.ext_l)
    })
}

/// Outer decoder transfer point. The physical error is uniform over the four
/// symbols and reaches the decoder only through the a-priori channel.
pub fn outer_exit_point<R: Rng + ?Sized>(spec: &CodeSpec, target_ia: f64, frames: usize, rng: &mut R) -> Result<ExitPoint> {
    let priors_l = MessageSequence::uniform(spec.logical_len(), MessageRole::APriori, MessageSubject::Logical);
    average_frames(target_ia, frames, || {
        let syms: Vec<PauliSymbol> = (0..spec.physical_len()).map(|_| PauliSymbol::from_index(rng.random_range(0..4))).collect();
        let p2 = EffectiveVector::from_symbols(&syms);
        let tracked = track_error(spec, &p2)?;
        let priors_p = generate_apriori(&p2, target_ia, MessageSubject::Physical, rng)?;
        let out = siso_decode(spec, &priors_p, &priors_l, &tracked.syndrome)?;
        measure_mi_for(&p2, &out.ext_p)
    })
}

/// Sampling knobs shared by every EXIT computation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitConfig {
    pub grid: usize,
    pub frames: usize,
    /// Interleaver length, i.e. inner logical / outer physical qubits per frame.
    pub length: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for ExitConfig {
    fn default() -> Self {
        ExitConfig { grid: 21, frames: 10, length: 3000, seed: 0, workers: 0 }
    }
}

impl ExitConfig {
    fn grid_values(&self) -> Result<Vec<f64>> {
        if self.grid < 2 {
            return Err(Error::InvalidInput(format!("EXIT grid needs at least 2 points, got {}", self.grid)));
        }
        if self.frames == 0 {
            return Err(Error::InvalidInput("EXIT points need at least one frame".into()));
        }
        Ok((0..self.grid).map(|i| i as f64 / (self.grid - 1) as f64).collect())
    }

    fn block_count(&self, per_step: usize) -> Result<usize> {
        if self.length == 0 || self.length % per_step != 0 {
            return Err(Error::InvalidInput(format!("length {} is not a positive multiple of {per_step}", self.length)));
        }
        Ok(self.length / per_step)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExitCurve {
    pub role: CodeRole,
    /// Depolarizing probability; inner curves only.
    pub p: Option<f64>,
    pub points: Vec<ExitPoint>,
}

impl ExitCurve {
    pub fn i_a(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.i_a).collect()
    }
    pub fn i_e(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.i_e).collect()
    }
}

/// Evaluates `point` on a uniform `I_A` grid over `[0, 1]`; grid point `i`
/// draws from stream `i` of `(cfg.seed, stream_domain)`.
pub fn exit_curve<F>(role: CodeRole, p: Option<f64>, cfg: &ExitConfig, stream_domain: u64, point: F) -> Result<ExitCurve>
where
    F: Fn(f64, &mut ChaCha8Rng) -> Result<ExitPoint> + Sync + Send,
{
    let grid = cfg.grid_values()?;
    let points = par_map(grid.len(), cfg.workers, |i| {
        let mut rng = stream_rng(cfg.seed, stream_domain, i as u64);
        point(grid[i], &mut rng)
    })?
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(ExitCurve { role, p, points })
}

pub fn inner_exit_curve(seed: &SeedTransform, p: f64, cfg: &ExitConfig) -> Result<ExitCurve> {
    let spec = CodeSpec::new(seed.clone(), CodeRole::Inner, cfg.block_count(seed.k())?)?;
    let ch = DepolarizingChannel::new(p)?;
    exit_curve(CodeRole::Inner, Some(p), cfg, domain::EXIT_INNER, |ia, rng| {
        inner_exit_point(&spec, &ch, ia, cfg.frames, rng)
    })
}

pub fn outer_exit_curve(seed: &SeedTransform, cfg: &ExitConfig) -> Result<ExitCurve> {
    let spec = CodeSpec::new(seed.clone(), CodeRole::Outer, cfg.block_count(seed.n())?)?;
    exit_curve(CodeRole::Outer, None, cfg, domain::EXIT_OUTER, |ia, rng| outer_exit_point(&spec, ia, cfg.frames, rng))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TunnelReport {
    pub open: bool,
    /// Trapezoidal area of the positive gap between the curves.
    pub area: f64,
    /// First interior grid point where the tunnel is closed.
    pub crossover_ia: Option<f64>,
    /// Smallest gap over interior grid points.
    pub min_gap: f64,
}

/// `I_A` the outer decoder needs to output `x`, from its curve with axes
/// swapped; `INFINITY` if it never gets there.
fn outer_inverse(a: &[f64], b: &[f64], x: f64) -> f64 {
    // running max keeps the inverse well defined under estimator noise
    let mut prev: Option<(f64, f64)> = None;
    let mut env = f64::NEG_INFINITY;
    for (&ai, &bi) in a.iter().zip(b) {
        env = env.max(bi);
        if env >= x {
            return match prev {
                None => ai,
                Some((pa, pb)) if env > pb => pa + (x - pb) / (env - pb) * (ai - pa),
                Some((pa, _)) => pa,
            };
        }
        prev = Some((ai, env));
    }
    f64::INFINITY
}

pub fn tunnel_analysis(inner: &ExitCurve, outer: &ExitCurve) -> Result<TunnelReport> {
    let x = inner.i_a();
    let ax = outer.i_a();
    if x.len() < 2 || x.len() != ax.len() || x.iter().zip(&ax).any(|(p, q)| (p - q).abs() > 1e-12) {
        return Err(Error::InvalidInput("inner and outer curves must share the same I_A grid".into()));
    }
    if x.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("EXIT grid must be strictly increasing".into()));
    }
    let y = inner.i_e();
    let b = outer.i_e();
    let gaps: Vec<f64> = x.iter().zip(&y).map(|(&xi, &yi)| yi - outer_inverse(&ax, &b, xi)).collect();
    let interior = 1..x.len() - 1;
    let crossover = interior.clone().find(|&i| gaps[i] <= 0.0);
    let min_gap = interior.map(|i| gaps[i]).fold(f64::INFINITY, f64::min);
    let pos: Vec<f64> = gaps.iter().map(|g| g.max(0.0)).collect();
    let area = x.windows(2).zip(pos.windows(2)).map(|(xw, gw)| 0.5 * (xw[1] - xw[0]) * (gw[0] + gw[1])).sum();
    Ok(TunnelReport { open: crossover.is_none(), area, crossover_ia: crossover.map(|i| x[i]), min_gap })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEval {
    pub p: f64,
    pub open: bool,
    pub area: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub p_star: f64,
    pub lo: f64,
    pub hi: f64,
    pub evaluations: Vec<ThresholdEval>,
}

/// Bisects on the tunnel-open predicate between `p_lo` (open) and `p_hi` (closed).
pub fn threshold_search(
    inner: &SeedTransform,
    outer: &SeedTransform,
    p_lo: f64,
    p_hi: f64,
    tol: f64,
    cfg: &ExitConfig,
) -> Result<ThresholdResult> {
    if !(p_lo < p_hi) || !(tol > 0.0) {
        return Err(Error::Bracket(format!("need p_lo < p_hi and tol > 0, got [{p_lo}, {p_hi}], tol {tol}")));
    }
    let outer_curve = outer_exit_curve(outer, cfg)?;
    let mut evaluations = Vec::new();
    let mut eval = |p: f64| -> Result<TunnelReport> {
        let r = tunnel_analysis(&inner_exit_curve(inner, p, cfg)?, &outer_curve)?;
        evaluations.push(ThresholdEval { p, open: r.open, area: r.area });
        Ok(r)
    };
    let lo_report = eval(p_lo)?;
    let hi_report = eval(p_hi)?;
    if !lo_report.open || hi_report.open {
        return Err(Error::Bracket(format!(
            "tunnel must be open at p_lo and closed at p_hi; p_lo = {p_lo}: {lo_report:?}; p_hi = {p_hi}: {hi_report:?}"
        )));
    }
    let (mut lo, mut hi) = (p_lo, p_hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if eval(mid)?.open {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult { p_star: 0.5 * (lo + hi), lo, hi, evaluations })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Inner,
    Outer,
}

/// One corner of the staircase, in EXIT-chart axes: `x = I_A(L1) = I_E(P2)`,
/// `y = I_E(L1) = I_A(P2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub stage: Stage,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub p: f64,
    pub interleaver_len: usize,
    pub points: Vec<TrajectoryPoint>,
    pub qubit_errors: usize,
}

impl Trajectory {
    /// A-priori information the inner decoder would receive next.
    pub fn final_ia(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.x)
    }
}

/// Decodes one frame, measuring exchanged messages against the true errors.
pub fn trajectory(sys: &TurboSystem, ch: &DepolarizingChannel, seed: u64) -> Result<Trajectory> {
    let mut rng = stream_rng(seed, domain::TRAJECTORY, 0);
    let f = simulate_frame(sys, ch, &mut rng)?;
    let out = turbo_decode_traced(sys, &f.syn1, &f.syn2, ch, Some(Truth { l1: &f.l1, p2: &f.p2 }))?;
    let mut points = Vec::with_capacity(2 * out.mi_log.len());
    for r in &out.mi_log {
        let (ia, ie1, ie2) = (r.ia_l1_true.unwrap_or(0.0), r.ie_l1_true.unwrap_or(0.0), r.ie_p2_true.unwrap_or(0.0));
        points.push(TrajectoryPoint { iteration: r.iteration, stage: Stage::Inner, x: ia, y: ie1 });
        points.push(TrajectoryPoint { iteration: r.iteration, stage: Stage::Outer, x: ie2, y: ie1 });
    }
    Ok(Trajectory {
        p: ch.p(),
        interleaver_len: sys.interleaver_len(),
        points,
        qubit_errors: out.estimated_l2.symbol_differences(&f.true_l2)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub trial: usize,
    pub inner_decimals: Vec<u64>,
    pub outer_decimals: Vec<u64>,
    pub open: bool,
    pub area: f64,
}

/// Tunnel report of an (inner, outer) pair at `target_p`.
pub fn evaluate_pair(inner: &SeedTransform, outer: &SeedTransform, target_p: f64, cfg: &ExitConfig) -> Result<TunnelReport> {
    let i = inner_exit_curve(inner, target_p, cfg)?;
    let o = outer_exit_curve(outer, cfg)?;
    tunnel_analysis(&i, &o)
}

/// Open tunnels first, then ascending area; trial index breaks ties.
pub fn rank_candidates(c: &mut [Candidate]) {
    c.sort_by(|a, b| b.open.cmp(&a.open).then(a.area.total_cmp(&b.area)).then(a.trial.cmp(&b.trial)));
}

/// Random search for (all-ebit inner, unassisted outer) seed pairs.
///
/// Trial `i` draws both seeds from stream `i`; trials run in parallel and
/// each trial's curves are computed serially.
pub fn optimize_search(n: usize, k: usize, m: usize, target_p: f64, trials: usize, cfg: &ExitConfig) -> Result<Vec<Candidate>> {
    let serial = ExitConfig { workers: 1, ..*cfg };
    let results = par_map(trials, cfg.workers, |trial| -> Result<Option<Candidate>> {
        let mut rng = stream_rng(cfg.seed, domain::OPTIMIZE, trial as u64);
        let ui = random_symplectic(n + m, &mut rng);
        let uo = random_symplectic(n + m, &mut rng);
        let (Ok(inner), Ok(outer)) = (
            SeedTransform::new(ui, n, k, m, vec![AncillaKind::Ebit; n - k]),
            SeedTransform::new(uo, n, k, m, vec![AncillaKind::Ancilla; n - k]),
        ) else {
            return Ok(None);
        };
        let report = evaluate_pair(&inner, &outer, target_p, &serial)?;
        Ok(Some(Candidate {
            trial,
            inner_decimals: inner.to_decimals(),
            outer_decimals: outer.to_decimals(),
            open: report.open,
            area: report.area,
        }))
    })?;
    let mut out = Vec::new();
    for r in results {
        if let Some(c) = r? {
            out.push(c);
        }
    }
    rank_candidates(&mut out);
    Ok(out)
}
