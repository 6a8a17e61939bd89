//! Quantum convolutional codes over effective errors.
//!
//! A code is a seed transform repeated along a trellis. Step `t` maps the
//! memory error `M_{t-1}`, the logical error `L_t` and the ancilla error `S_t`
//! onto the physical error `P_t` and the next memory error `M_t`.
//!
//! Error tracking runs the inverse encoder backwards from a terminated final
//! memory (`M_{N_b} = I`), which is defined for every symplectic seed. The
//! initial memory comes out as an extra error `M_0` whose X-part is observable,
//! exactly like an ancilla prepared in `|0>`.
//!
//! Inside the trellis an `r`-qubit error is a small integer with two bits per
//! qubit: bit `2j` is the Z-bit of qubit `j` and bit `2j + 1` its X-bit.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::message::{MessageRole, CODE_TO_INDEX, MessageSequence, MessageSubject, SymbolDistribution};
use crate::pauli::{AncillaKind, EffectiveVector, PauliSymbol, SeedTransform};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CodeRole {
    Inner,
    Outer,
}

/// Mask of the Z-bits (`z == true`) or X-bits of an `r`-qubit trellis code.
fn half_mask(r: usize, z: bool) -> usize {
    (0..r).fold(0, |acc, j| acc | 1 << (2 * j + usize::from(!z)))
}

fn block_code(v: &EffectiveVector, start: usize, len: usize) -> usize {
    (0..len).fold(0, |acc, j| acc | v.get(start + j).code() << (2 * j))
}

fn write_block(v: &mut EffectiveVector, start: usize, len: usize, code: usize) {
    for j in 0..len {
        v.set(start + j, PauliSymbol::from_code((code >> (2 * j)) & 3));
    }
}

#[derive(Clone, Copy, Debug)]
struct Branch {
    physical: u16,
    memory: u16,
}

/// Per-step lookup tables of one seed transform.
#[derive(Debug)]
struct StepTables {
    k: usize,
    m: usize,
    /// Indexed by `mu | lambda << 2m | sigma << 2(m+k)`.
    encode: Vec<Branch>,
    /// Indexed by `memory_out | physical << 2m`; yields the encoder input index.
    decode: Vec<u16>,
}

impl StepTables {
    fn new(seed: &SeedTransform) -> Self {
        let (n, k, m) = (seed.n(), seed.k(), seed.m());
        let d = n + m;
        let to_word = |input: usize| -> u64 {
            // trellis code over d qubits -> matrix row word
            let mut w = 0u64;
            for q in 0..d {
                let c = (input >> (2 * q)) & 3;
                w |= ((c & 1) as u64) << q;
                w |= ((c >> 1) as u64) << (d + q);
            }
            w
        };
        let from_word = |w: u64, start: usize, len: usize| -> usize {
            (0..len).fold(0, |acc, j| {
                let q = start + j;
                let c = ((w >> q) & 1) as usize | (((w >> (d + q)) & 1) as usize) << 1;
                acc | c << (2 * j)
            })
        };
        let size = 1usize << (2 * d);
        let mut encode = Vec::with_capacity(size);
        let mut decode = vec![0u16; size];
        let mat = seed.matrix();
        for input in 0..size {
            let out = mat.apply_word(to_word(input));
            let memory = from_word(out, 0, m);
            let physical = from_word(out, m, n);
            encode.push(Branch { physical: physical as u16, memory: memory as u16 });
            decode[memory | physical << (2 * m)] = input as u16;
        }
        StepTables { k, m, encode, decode }
    }

    #[inline]
    fn input_index(&self, mu: usize, lambda: usize, sigma: usize) -> usize {
        mu | lambda << (2 * self.m) | sigma << (2 * (self.m + self.k))
    }

    fn split_input(&self, input: usize) -> (usize, usize, usize) {
        let mu = input & ((1 << (2 * self.m)) - 1);
        let lambda = (input >> (2 * self.m)) & ((1 << (2 * self.k)) - 1);
        let sigma = input >> (2 * (self.m + self.k));
        (mu, lambda, sigma)
    }
}

/// A seed transform laid out over a frame of `block_count` trellis steps.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    seed: SeedTransform,
    role: CodeRole,
    block_count: usize,
    terminated: bool,
    tables: Arc<StepTables>,
}

impl CodeSpec {
    pub fn new(seed: SeedTransform, role: CodeRole, block_count: usize) -> Result<Self> {
        if block_count == 0 {
            return Err(Error::InvalidInput("block count must be at least 1".into()));
        }
        let tables = Arc::new(StepTables::new(&seed));
        Ok(CodeSpec { seed, role, block_count, terminated: true, tables })
    }

    /// Same code over a different number of trellis steps.
    pub fn with_block_count(&self, block_count: usize) -> Result<Self> {
        if block_count == 0 {
            return Err(Error::InvalidInput("block count must be at least 1".into()));
        }
        Ok(CodeSpec { block_count, ..self.clone() })
    }

    pub fn with_role(&self, role: CodeRole) -> Self {
        CodeSpec { role, ..self.clone() }
    }

    /// Decoder boundary at the end of the frame: `true` pins the final memory
    /// to the identity (matching [`track_error`]), `false` leaves it uniform.
    pub fn with_terminated(&self, terminated: bool) -> Self {
        CodeSpec { terminated, ..self.clone() }
    }

    pub fn seed(&self) -> &SeedTransform {
        &self.seed
    }
    pub fn role(&self) -> CodeRole {
        self.role
    }
    pub fn block_count(&self) -> usize {
        self.block_count
    }
    pub fn terminated(&self) -> bool {
        self.terminated
    }
    pub fn n(&self) -> usize {
        self.seed.n()
    }
    pub fn k(&self) -> usize {
        self.seed.k()
    }
    pub fn m(&self) -> usize {
        self.seed.m()
    }
    pub fn physical_len(&self) -> usize {
        self.n() * self.block_count
    }
    pub fn logical_len(&self) -> usize {
        self.k() * self.block_count
    }
    pub fn ancilla_len(&self) -> usize {
        (self.n() - self.k()) * self.block_count
    }

    /// Bits of an ancilla trellis code that the syndrome reveals: every X-bit,
    /// plus the Z-bit of each ebit.
    pub fn syndrome_mask(&self) -> usize {
        let mut mask = half_mask(self.n() - self.k(), false);
        for (j, kind) in self.seed.ancilla_kinds().iter().enumerate() {
            if *kind == AncillaKind::Ebit {
                mask |= 1 << (2 * j);
            }
        }
        mask
    }

    /// Observable bits of the initial memory error (X-bits only).
    pub fn memory_mask(&self) -> usize {
        half_mask(self.m(), false)
    }
}

/// Observable syndrome of one frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeSequence {
    /// Ancilla trellis code per step, already masked to `known_mask`.
    pub values: Vec<u16>,
    /// Which ancilla bits are observed (X-bits always, Z-bits at ebits).
    pub known_mask: u16,
    /// X-part of the initial memory error.
    pub initial_memory: u16,
    pub memory_mask: u16,
}

impl SyndromeSequence {
    /// All-zero syndrome matching the layout of `spec`.
    pub fn zeros(spec: &CodeSpec) -> Self {
        SyndromeSequence {
            values: vec![0; spec.block_count()],
            known_mask: spec.syndrome_mask() as u16,
            initial_memory: 0,
            memory_mask: spec.memory_mask() as u16,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.initial_memory == 0 && self.values.iter().all(|&v| v == 0)
    }

    /// Observed X-part of ancilla `j` at step `t`.
    pub fn x_bit(&self, t: usize, j: usize) -> bool {
        (self.values[t] >> (2 * j + 1)) & 1 == 1
    }

    /// Observed Z-part of ancilla `j` at step `t`, if that ancilla is an ebit.
    pub fn z_bit(&self, t: usize, j: usize) -> Option<bool> {
        ((self.known_mask >> (2 * j)) & 1 == 1).then(|| (self.values[t] >> (2 * j)) & 1 == 1)
    }

    fn check(&self, spec: &CodeSpec) -> Result<()> {
        if self.values.len() != spec.block_count() {
            return Err(Error::LengthMismatch { expected: spec.block_count(), actual: self.values.len() });
        }
        if self.known_mask as usize != spec.syndrome_mask() || self.memory_mask as usize != spec.memory_mask() {
            return Err(Error::InvalidInput("syndrome layout does not match the code's ancilla kinds".into()));
        }
        Ok(())
    }
}

/// Result of passing a physical error through the inverse encoder.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackedError {
    pub logical: EffectiveVector,
    pub syndrome: SyndromeSequence,
    /// Complete ancilla error, including the unobservable Z-parts.
    pub full_syndrome: EffectiveVector,
    /// Error left on the initial memory qubits.
    pub initial_memory: EffectiveVector,
}

/// `(u_p, u_m)`: the physical-output and memory-output columns of the seed.
pub fn split_seed(seed: &SeedTransform) -> (crate::pauli::BitMatrix, crate::pauli::BitMatrix) {
    (seed.u_p(), seed.u_m())
}

/// One encoder step on effective vectors: `(m_prev, l_t, s_t) -> (p_t, m_t)`.
pub fn encode_step(
    m_prev: &EffectiveVector,
    l_t: &EffectiveVector,
    s_t: &EffectiveVector,
    seed: &SeedTransform,
) -> Result<(EffectiveVector, EffectiveVector)> {
    let (n, k, m) = (seed.n(), seed.k(), seed.m());
    for (len, v) in [(m, m_prev), (k, l_t), (n - k, s_t)] {
        if v.n_qubits() != len {
            return Err(Error::Dimension(format!("block has {} qubits, expected {len}", v.n_qubits())));
        }
    }
    let mut input = EffectiveVector::zeros(n + m);
    for (start, v) in [(0, m_prev), (m, l_t), (m + k, s_t)] {
        for j in 0..v.n_qubits() {
            input.set(start + j, v.get(j));
        }
    }
    let out = EffectiveVector::from_word(seed.matrix().apply_word(input.to_word()), n + m);
    Ok((out.slice(m, n), out.slice(0, m)))
}

/// Inverse step: `(p_t, m_t) U^{-1} = (m_prev, l_t, s_t)`.
pub fn inverse_encode_step(
    p_t: &EffectiveVector,
    m_t: &EffectiveVector,
    seed: &SeedTransform,
) -> Result<(EffectiveVector, EffectiveVector, EffectiveVector)> {
    let (n, k, m) = (seed.n(), seed.k(), seed.m());
    if p_t.n_qubits() != n || m_t.n_qubits() != m {
        return Err(Error::Dimension(format!(
            "inverse step needs {n} physical and {m} memory qubits, got {} and {}",
            p_t.n_qubits(),
            m_t.n_qubits()
        )));
    }
    let mut out = EffectiveVector::zeros(n + m);
    for j in 0..m {
        out.set(j, m_t.get(j));
    }
    for j in 0..n {
        out.set(m + j, p_t.get(j));
    }
    let input = EffectiveVector::from_word(seed.matrix().inverse().apply_word(out.to_word()), n + m);
    Ok((input.slice(0, m), input.slice(m, k), input.slice(m + k, n - k)))
}

/// Tracks a physical error back to logical error and syndrome.
pub fn track_error(spec: &CodeSpec, physical: &EffectiveVector) -> Result<TrackedError> {
    if physical.n_qubits() != spec.physical_len() {
        return Err(Error::LengthMismatch { expected: spec.physical_len(), actual: physical.n_qubits() });
    }
    let tables = &spec.tables;
    let (n, k, m) = (spec.n(), spec.k(), spec.m());
    let a = n - k;
    let mut logical = EffectiveVector::zeros(spec.logical_len());
    let mut full = EffectiveVector::zeros(spec.ancilla_len());
    let mask = spec.syndrome_mask();
    let mut values = vec![0u16; spec.block_count()];
    let mut memory = 0usize;
    for t in (0..spec.block_count()).rev() {
        let p = block_code(physical, t * n, n);
        let input = tables.decode[memory | p << (2 * m)] as usize;
        let (mu, lambda, sigma) = tables.split_input(input);
        write_block(&mut logical, t * k, k, lambda);
        write_block(&mut full, t * a, a, sigma);
        values[t] = (sigma & mask) as u16;
        memory = mu;
    }
    let mut initial_memory = EffectiveVector::zeros(m);
    write_block(&mut initial_memory, 0, m, memory);
    Ok(TrackedError {
        logical,
        syndrome: SyndromeSequence {
            values,
            known_mask: mask as u16,
            initial_memory: (memory & spec.memory_mask()) as u16,
            memory_mask: spec.memory_mask() as u16,
        },
        full_syndrome: full,
        initial_memory,
    })
}

/// Runs the encoder forwards from `initial_memory`; returns the physical error
/// and the final memory error.
pub fn encode_frame(
    spec: &CodeSpec,
    logical: &EffectiveVector,
    ancilla: &EffectiveVector,
    initial_memory: &EffectiveVector,
) -> Result<(EffectiveVector, EffectiveVector)> {
    let (n, k, m) = (spec.n(), spec.k(), spec.m());
    let a = n - k;
    for (expected, v) in [(spec.logical_len(), logical), (spec.ancilla_len(), ancilla), (m, initial_memory)] {
        if v.n_qubits() != expected {
            return Err(Error::LengthMismatch { expected, actual: v.n_qubits() });
        }
    }
    let mut physical = EffectiveVector::zeros(spec.physical_len());
    let mut memory = block_code(initial_memory, 0, m);
    for t in 0..spec.block_count() {
        let lambda = block_code(logical, t * k, k);
        let sigma = block_code(ancilla, t * a, a);
        let b = spec.tables.encode[spec.tables.input_index(memory, lambda, sigma)];
        write_block(&mut physical, t * n, n, b.physical as usize);
        memory = b.memory as usize;
    }
    let mut final_memory = EffectiveVector::zeros(m);
    write_block(&mut final_memory, 0, m, memory);
    Ok((physical, final_memory))
}

/// Messages produced by one soft-in soft-out pass.
#[derive(Clone, Debug)]
pub struct SisoOutput {
    pub ext_l: MessageSequence,
    pub ext_p: MessageSequence,
    pub post_l: MessageSequence,
    pub post_p: MessageSequence,
}

fn product_table(dists: &[SymbolDistribution], qubits: usize) -> Vec<f64> {
    let size = 1usize << (2 * qubits);
    (0..size)
        .map(|code| (0..qubits).map(|j| dists[j].prob_code((code >> (2 * j)) & 3)).product())
        .collect()
}

fn normalize(v: &mut [f64]) -> bool {
    let s: f64 = v.iter().sum();
    if !(s > 0.0) || !s.is_finite() {
        return false;
    }
    let inv = 1.0 / s;
    v.iter_mut().for_each(|x| *x *= inv);
    true
}

fn submasks(mask: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut sub = mask;
    while sub != 0 {
        out.push(sub);
        sub = (sub - 1) & mask;
    }
    out.sort_unstable();
    out
}

/// Degenerate forward-backward decoder over the code trellis.
///
/// Branches sum over the memory error `mu`, the logical error `lambda` and the
/// unobserved bits of the ancilla error (Z-parts of plain ancillas); the
/// observed ancilla bits are pinned to the syndrome. `alpha` starts on the
/// memory errors whose X-part matches the observed initial memory, and `beta`
/// ends on the identity when the code is terminated.
pub fn siso_decode(
    spec: &CodeSpec,
    priors_p: &MessageSequence,
    priors_l: &MessageSequence,
    syn: &SyndromeSequence,
) -> Result<SisoOutput> {
    if priors_p.len() != spec.physical_len() {
        return Err(Error::LengthMismatch { expected: spec.physical_len(), actual: priors_p.len() });
    }
    if priors_l.len() != spec.logical_len() {
        return Err(Error::LengthMismatch { expected: spec.logical_len(), actual: priors_l.len() });
    }
    syn.check(spec)?;
    let tables = &*spec.tables;
    let (n, k, m) = (spec.n(), spec.k(), spec.m());
    let nb = spec.block_count();
    let n_mem = 1usize << (2 * m);
    let n_log = 1usize << (2 * k);
    let n_phys = 1usize << (2 * n);
    let full_anc = (1usize << (2 * (n - k))) - 1;
    let free = submasks(full_anc & !(syn.known_mask as usize));

    let p_tables: Vec<Vec<f64>> = (0..nb).map(|t| product_table(&priors_p.dists[t * n..(t + 1) * n], n)).collect();
    let l_tables: Vec<Vec<f64>> = (0..nb).map(|t| product_table(&priors_l.dists[t * k..(t + 1) * k], k)).collect();

    // alpha[t] is the distribution of M_t, t = 0..=nb
    let mut alpha = vec![0.0f64; (nb + 1) * n_mem];
    let mm = syn.memory_mask as usize;
    for mu in 0..n_mem {
        if mu & mm == syn.initial_memory as usize {
            alpha[mu] = 1.0;
        }
    }
    if !normalize(&mut alpha[..n_mem]) {
        return Err(Error::DecodingFailure { step: 0 });
    }
    for t in 0..nb {
        let (head, tail) = alpha.split_at_mut((t + 1) * n_mem);
        let cur = &head[t * n_mem..];
        let next = &mut tail[..n_mem];
        let sv = syn.values[t] as usize;
        let (pt, lt) = (&p_tables[t], &l_tables[t]);
        for (mu, &a) in cur.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (lambda, &pl) in lt.iter().enumerate() {
                let al = a * pl;
                if al == 0.0 {
                    continue;
                }
                for &f in &free {
                    let b = tables.encode[tables.input_index(mu, lambda, sv | f)];
                    next[b.memory as usize] += al * pt[b.physical as usize];
                }
            }
        }
        if !normalize(next) {
            return Err(Error::DecodingFailure { step: t + 1 });
        }
    }

    // beta[t] is the backward message on M_t, t = 0..=nb
    let mut beta = vec![0.0f64; (nb + 1) * n_mem];
    if spec.terminated {
        beta[nb * n_mem] = 1.0;
    } else {
        beta[nb * n_mem..].fill(1.0 / n_mem as f64);
    }
    for t in (0..nb).rev() {
        let (head, tail) = beta.split_at_mut((t + 1) * n_mem);
        let cur = &mut head[t * n_mem..];
        let next = &tail[..n_mem];
        let sv = syn.values[t] as usize;
        let (pt, lt) = (&p_tables[t], &l_tables[t]);
        for (mu, out) in cur.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (lambda, &pl) in lt.iter().enumerate() {
                if pl == 0.0 {
                    continue;
                }
                let mut inner = 0.0;
                for &f in &free {
                    let b = tables.encode[tables.input_index(mu, lambda, sv | f)];
                    inner += pt[b.physical as usize] * next[b.memory as usize];
                }
                acc += pl * inner;
            }
            *out = acc;
        }
        if !normalize(cur) {
            return Err(Error::DecodingFailure { step: t });
        }
    }

    // Joint weights of each step leave out that step's own L (resp. P)
    // priors, so each qubit's extrinsic message excludes exactly its prior.
    let mut post_l = Vec::with_capacity(spec.logical_len());
    let mut post_p = Vec::with_capacity(spec.physical_len());
    let mut ext_l = Vec::with_capacity(spec.logical_len());
    let mut ext_p = Vec::with_capacity(spec.physical_len());
    let mut joint_l = vec![0.0f64; n_log];
    let mut joint_p = vec![0.0f64; n_phys];
    for t in 0..nb {
        joint_l.fill(0.0);
        joint_p.fill(0.0);
        let a_t = &alpha[t * n_mem..(t + 1) * n_mem];
        let b_next = &beta[(t + 1) * n_mem..(t + 2) * n_mem];
        let sv = syn.values[t] as usize;
        let (pt, lt) = (&p_tables[t], &l_tables[t]);
        for (mu, &a) in a_t.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (lambda, &pl) in lt.iter().enumerate() {
                for &f in &free {
                    let b = tables.encode[tables.input_index(mu, lambda, sv | f)];
                    let ab = a * b_next[b.memory as usize];
                    joint_l[lambda] += ab * pt[b.physical as usize];
                    joint_p[b.physical as usize] += ab * pl;
                }
            }
        }
        let fail = || Error::DecodingFailure { step: t };
        let (pl_t, el_t) = split_marginals(&joint_l, &priors_l.dists[t * k..(t + 1) * k]).ok_or_else(fail)?;
        let (pp_t, ep_t) = split_marginals(&joint_p, &priors_p.dists[t * n..(t + 1) * n]).ok_or_else(fail)?;
        post_l.extend(pl_t);
        ext_l.extend(el_t);
        post_p.extend(pp_t);
        ext_p.extend(ep_t);
    }

    Ok(SisoOutput {
        ext_l: MessageSequence::new(MessageRole::Extrinsic, MessageSubject::Logical, ext_l),
        ext_p: MessageSequence::new(MessageRole::Extrinsic, MessageSubject::Physical, ext_p),
        post_l: MessageSequence::new(MessageRole::APosteriori, MessageSubject::Logical, post_l),
        post_p: MessageSequence::new(MessageRole::APosteriori, MessageSubject::Physical, post_p),
    })
}

/// Per-qubit a-posteriori and extrinsic marginals from a joint table over a
/// block that excludes the block's own priors.
fn split_marginals(
    joint: &[f64],
    priors: &[SymbolDistribution],
) -> Option<(Vec<SymbolDistribution>, Vec<SymbolDistribution>)> {
    let qubits = priors.len();
    let mut post = Vec::with_capacity(qubits);
    let mut ext = Vec::with_capacity(qubits);
    for j in 0..qubits {
        let mut e = [0.0f64; 4];
        for (code, &w) in joint.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let others: f64 = (0..qubits)
                .filter(|&i| i != j)
                .map(|i| priors[i].prob_code((code >> (2 * i)) & 3))
                .product();
            e[CODE_TO_INDEX[(code >> (2 * j)) & 3]] += w * others;
        }
        let mut p = e;
        for (s, x) in p.iter_mut().enumerate() {
            *x *= priors[j].0[s];
        }
        post.push(SymbolDistribution(p).normalized()?);
        ext.push(SymbolDistribution(e).normalized()?);
    }
    Some((post, ext))
}

/// Weight enumeration of low-weight error events.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceSpectrum {
    /// Events whose logical input is not identically zero, keyed by physical weight.
    pub logical: BTreeMap<usize, u64>,
    /// Events driven only by degenerate (stabilizer) ancilla inputs.
    pub stabilizer: BTreeMap<usize, u64>,
    /// Set when a path hit `max_steps` or the node budget before closing.
    pub truncated: bool,
    pub nodes_visited: u64,
}

impl DistanceSpectrum {
    pub fn min_distance(&self) -> Option<usize> {
        self.logical.keys().next().copied()
    }

    /// Logical and stabilizer events added together.
    pub fn combined(&self) -> BTreeMap<usize, u64> {
        let mut out = self.logical.clone();
        for (&w, &c) in &self.stabilizer {
            *out.entry(w).or_default() += c;
        }
        out
    }
}

/// Default cap on visited trellis nodes for [`distance_spectrum`].
pub const SPECTRUM_NODE_BUDGET: u64 = 2_000_000_000;

/// Enumerates error events up to `max_weight`.
///
/// An event leaves the zero memory state at step 1 with a nonzero input,
/// keeps every observable ancilla bit at zero (X-parts, and Z-parts of ebits),
/// lets plain-ancilla Z-parts vary freely, and ends at its first return to the
/// zero memory state. Its weight is the total Pauli weight of the physical
/// errors it produces.
pub fn distance_spectrum(spec: &CodeSpec, max_weight: usize, max_steps: usize, node_budget: u64) -> DistanceSpectrum {
    let tables = &*spec.tables;
    let (n, k) = (spec.n(), spec.k());
    let free = submasks(((1usize << (2 * (n - k))) - 1) & !spec.syndrome_mask());
    let weights: Vec<usize> =
        (0..1usize << (2 * n)).map(|p| (0..n).filter(|j| (p >> (2 * j)) & 3 != 0).count()).collect();
    let mut out = DistanceSpectrum {
        logical: BTreeMap::new(),
        stabilizer: BTreeMap::new(),
        truncated: false,
        nodes_visited: 0,
    };

    struct Walk<'a> {
        tables: &'a StepTables,
        free: &'a [usize],
        weights: &'a [usize],
        n_log: usize,
        max_weight: usize,
        max_steps: usize,
        budget: u64,
    }

    fn dfs(w: &Walk<'_>, out: &mut DistanceSpectrum, memory: usize, weight: usize, step: usize, has_logical: bool) {
        if out.nodes_visited >= w.budget {
            out.truncated = true;
            return;
        }
        out.nodes_visited += 1;
        if step >= w.max_steps {
            out.truncated = true;
            return;
        }
        for lambda in 0..w.n_log {
            for &f in w.free {
                if step == 0 && lambda == 0 && f == 0 {
                    continue;
                }
                let b = w.tables.encode[w.tables.input_index(memory, lambda, f)];
                let nw = weight + w.weights[b.physical as usize];
                if nw > w.max_weight {
                    continue;
                }
                let logical = has_logical || lambda != 0;
                if b.memory == 0 {
                    let table = if logical { &mut out.logical } else { &mut out.stabilizer };
                    *table.entry(nw).or_default() += 1;
                    continue;
                }
                dfs(w, out, b.memory as usize, nw, step + 1, logical);
            }
        }
    }

    let walk = Walk {
        tables,
        free: &free,
        weights: &weights,
        n_log: 1 << (2 * k),
        max_weight,
        max_steps,
        budget: node_budget,
    };
    dfs(&walk, &mut out, 0, 0, 0, false);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{random_symplectic, BinarySymplecticMatrix, OPT_INNER_DECIMALS, OPT_OUTER_DECIMALS};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> EffectiveVector {
        let syms: Vec<PauliSymbol> = (0..n).map(|_| PauliSymbol::from_index(rng.random_range(0..4))).collect();
        EffectiveVector::from_symbols(&syms)
    }

    fn opt_outer() -> SeedTransform {
        SeedTransform::from_decimals(&OPT_OUTER_DECIMALS, 3, 1, 3, vec![AncillaKind::Ancilla; 2]).unwrap()
    }

    fn opt_inner() -> SeedTransform {
        SeedTransform::from_decimals(&OPT_INNER_DECIMALS, 3, 1, 3, vec![AncillaKind::Ebit; 2]).unwrap()
    }

    fn identity_seed() -> SeedTransform {
        SeedTransform::new(BinarySymplecticMatrix::identity(6), 3, 1, 3, vec![AncillaKind::Ancilla; 2]).unwrap()
    }

    #[test]
    fn split_seed_of_identity() {
        let (u_p, u_m) = split_seed(&identity_seed());
        assert_eq!((u_p.n_rows(), u_p.n_cols()), (12, 6));
        assert_eq!((u_m.n_rows(), u_m.n_cols()), (12, 6));
        // physical output qubit j is input qubit m + j
        for j in 0..3 {
            assert!(u_p.get(3 + j, j));
            assert!(u_p.get(9 + j, 3 + j));
            assert!(u_m.get(j, j));
        }
        assert_eq!(u_p.rank(), 6);
    }

    #[test]
    fn split_blocks_reproduce_full_product() {
        let seed = opt_inner();
        let (u_p, u_m) = split_seed(&seed);
        let pc = seed.physical_columns();
        let mc = seed.memory_columns();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let row = rng.random::<u64>() & 0xfff;
            let full = seed.matrix().apply_word(row);
            let p = u_p.mul_word(row);
            let mm = u_m.mul_word(row);
            for (j, &c) in pc.iter().enumerate() {
                assert_eq!((p >> j) & 1, (full >> c) & 1);
            }
            for (j, &c) in mc.iter().enumerate() {
                assert_eq!((mm >> j) & 1, (full >> c) & 1);
            }
        }
        assert_eq!(u_m.mul_word(0), 0);
    }

    #[test]
    fn encode_step_examples() {
        let seed = opt_outer();
        let (p, m) =
            encode_step(&EffectiveVector::zeros(3), &EffectiveVector::zeros(1), &EffectiveVector::zeros(2), &seed)
                .unwrap();
        assert!(p.is_identity() && m.is_identity());

        let id = identity_seed();
        let l = EffectiveVector::from_symbols(&[PauliSymbol::Y]);
        let (p, m) = encode_step(&EffectiveVector::zeros(3), &l, &EffectiveVector::zeros(2), &id).unwrap();
        assert_eq!(p.get(0), PauliSymbol::Y);
        assert_eq!(p.weight(), 1);
        assert!(m.is_identity());

        assert!(encode_step(&EffectiveVector::zeros(2), &l, &EffectiveVector::zeros(2), &id).is_err());
    }

    #[test]
    fn step_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in [opt_inner(), opt_outer()] {
            for _ in 0..100 {
                let (mp, l, s) = (random_vec(&mut rng, 3), random_vec(&mut rng, 1), random_vec(&mut rng, 2));
                let (p, m) = encode_step(&mp, &l, &s, &seed).unwrap();
                let (mp2, l2, s2) = inverse_encode_step(&p, &m, &seed).unwrap();
                assert_eq!((mp2, l2, s2), (mp.clone(), l.clone(), s.clone()));
            }
        }
        let (a, b, c) = inverse_encode_step(&EffectiveVector::zeros(3), &EffectiveVector::zeros(3), &opt_outer()).unwrap();
        assert!(a.is_identity() && b.is_identity() && c.is_identity());
    }

    #[test]
    fn inverse_step_of_identity_relabels_blocks() {
        let id = identity_seed();
        let p = EffectiveVector::from_symbols(&[PauliSymbol::X, PauliSymbol::Y, PauliSymbol::Z]);
        let m = EffectiveVector::from_symbols(&[PauliSymbol::Z, PauliSymbol::I, PauliSymbol::X]);
        let (mp, l, s) = inverse_encode_step(&p, &m, &id).unwrap();
        assert_eq!(mp, m);
        assert_eq!(l.get(0), PauliSymbol::X);
        assert_eq!(s.symbols().collect::<Vec<_>>(), vec![PauliSymbol::Y, PauliSymbol::Z]);
    }

    #[test]
    fn track_zero_error() {
        let spec = CodeSpec::new(opt_outer(), CodeRole::Outer, 20).unwrap();
        let t = track_error(&spec, &EffectiveVector::zeros(60)).unwrap();
        assert!(t.logical.is_identity());
        assert!(t.full_syndrome.is_identity());
        assert!(t.syndrome.is_trivial());
        assert!(track_error(&spec, &EffectiveVector::zeros(59)).is_err());
    }

    #[test]
    fn track_is_linear_and_reencodes() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for seed in [opt_inner(), opt_outer()] {
            let spec = CodeSpec::new(seed, CodeRole::Inner, 25).unwrap();
            for _ in 0..20 {
                let a = random_vec(&mut rng, 75);
                let b = random_vec(&mut rng, 75);
                let ta = track_error(&spec, &a).unwrap();
                let tb = track_error(&spec, &b).unwrap();
                let tab = track_error(&spec, &a.add(&b).unwrap()).unwrap();
                assert_eq!(tab.logical, ta.logical.add(&tb.logical).unwrap());
                assert_eq!(tab.full_syndrome, ta.full_syndrome.add(&tb.full_syndrome).unwrap());
                assert_eq!(tab.initial_memory, ta.initial_memory.add(&tb.initial_memory).unwrap());

                let (p, final_mem) = encode_frame(&spec, &ta.logical, &ta.full_syndrome, &ta.initial_memory).unwrap();
                assert_eq!(p, a);
                assert!(final_mem.is_identity());
            }
        }
    }

    #[test]
    fn encode_then_track_is_identity_on_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let spec = CodeSpec::new(opt_outer(), CodeRole::Outer, 30).unwrap();
        for _ in 0..20 {
            let l = random_vec(&mut rng, 30);
            let s = random_vec(&mut rng, 60);
            let m0 = random_vec(&mut rng, 3);
            let (p, mf) = encode_frame(&spec, &l, &s, &m0).unwrap();
            if !mf.is_identity() {
                continue;
            }
            let t = track_error(&spec, &p).unwrap();
            assert_eq!(t.logical, l);
            assert_eq!(t.full_syndrome, s);
            assert_eq!(t.initial_memory, m0);
        }
    }

    #[test]
    fn ebit_syndrome_exposes_z_parts() {
        let spec = CodeSpec::new(opt_inner(), CodeRole::Inner, 10).unwrap();
        assert_eq!(spec.syndrome_mask(), 0b1111);
        let spec = CodeSpec::new(opt_outer(), CodeRole::Outer, 10).unwrap();
        assert_eq!(spec.syndrome_mask(), 0b1010);
        assert_eq!(spec.memory_mask(), 0b101010);
    }

    #[test]
    fn noiseless_priors_concentrate_on_identity() {
        let spec = CodeSpec::new(opt_outer(), CodeRole::Inner, 12).unwrap();
        let priors_p = MessageSequence::new(
            MessageRole::APriori,
            MessageSubject::Physical,
            vec![SymbolDistribution([1.0, 0.0, 0.0, 0.0]); spec.physical_len()],
        );
        let priors_l = MessageSequence::uniform(spec.logical_len(), MessageRole::APriori, MessageSubject::Logical);
        let out = siso_decode(&spec, &priors_p, &priors_l, &SyndromeSequence::zeros(&spec)).unwrap();
        for d in &out.ext_l.dists {
            assert!(d.prob(PauliSymbol::I) >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn siso_rejects_bad_lengths() {
        let spec = CodeSpec::new(opt_outer(), CodeRole::Inner, 4).unwrap();
        let pp = MessageSequence::uniform(11, MessageRole::APriori, MessageSubject::Physical);
        let pl = MessageSequence::uniform(4, MessageRole::APriori, MessageSubject::Logical);
        assert!(siso_decode(&spec, &pp, &pl, &SyndromeSequence::zeros(&spec)).is_err());
    }

    #[test]
    fn impossible_syndrome_is_a_decoding_failure() {
        let spec = CodeSpec::new(opt_outer(), CodeRole::Inner, 6).unwrap();
        let pp = MessageSequence::new(
            MessageRole::APriori,
            MessageSubject::Physical,
            vec![SymbolDistribution([1.0, 0.0, 0.0, 0.0]); spec.physical_len()],
        );
        let pl = MessageSequence::uniform(6, MessageRole::APriori, MessageSubject::Logical);
        let mut syn = SyndromeSequence::zeros(&spec);
        syn.values[2] = 0b10;
        assert!(matches!(siso_decode(&spec, &pp, &pl, &syn), Err(Error::DecodingFailure { .. })));
    }

    fn random_dists(rng: &mut ChaCha8Rng, len: usize) -> Vec<SymbolDistribution> {
        (0..len)
            .map(|_| {
                let mut d = [0.0; 4];
                d.iter_mut().for_each(|p| *p = rng.random_range(0.05..1.0));
                SymbolDistribution(d).normalized().unwrap()
            })
            .collect()
    }

    /// Exhaustive posterior over every (L, S, M_0) consistent with the syndrome.
    fn brute_force_posteriors(
        spec: &CodeSpec,
        pp: &MessageSequence,
        pl: &MessageSequence,
        syn: &SyndromeSequence,
    ) -> (Vec<SymbolDistribution>, Vec<SymbolDistribution>) {
        let (nl, na, m) = (spec.logical_len(), spec.ancilla_len(), spec.m());
        let total = nl + na + m;
        let mut post_l = vec![SymbolDistribution([0.0; 4]); nl];
        let mut post_p = vec![SymbolDistribution([0.0; 4]); spec.physical_len()];
        let a = spec.n() - spec.k();
        for idx in 0..1usize << (2 * total) {
            let sym = |q: usize| PauliSymbol::from_index((idx >> (2 * q)) & 3);
            let l = EffectiveVector::from_symbols(&(0..nl).map(sym).collect::<Vec<_>>());
            let s = EffectiveVector::from_symbols(&(nl..nl + na).map(sym).collect::<Vec<_>>());
            let m0 = EffectiveVector::from_symbols(&(nl + na..total).map(sym).collect::<Vec<_>>());
            let consistent = (0..spec.block_count())
                .all(|t| (block_code(&s, t * a, a) & syn.known_mask as usize) == syn.values[t] as usize)
                && (block_code(&m0, 0, m) & syn.memory_mask as usize) == syn.initial_memory as usize;
            if !consistent {
                continue;
            }
            let (p, mf) = encode_frame(spec, &l, &s, &m0).unwrap();
            if !mf.is_identity() {
                continue;
            }
            let w: f64 = l.symbols().zip(&pl.dists).map(|(x, d)| d.prob(x)).product::<f64>()
                * p.symbols().zip(&pp.dists).map(|(x, d)| d.prob(x)).product::<f64>();
            for (i, x) in l.symbols().enumerate() {
                post_l[i].0[x.index()] += w;
            }
            for (i, x) in p.symbols().enumerate() {
                post_p[i].0[x.index()] += w;
            }
        }
        let norm = |v: Vec<SymbolDistribution>| v.into_iter().map(|d| d.normalized().unwrap()).collect();
        (norm(post_l), norm(post_p))
    }

    #[test]
    fn siso_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for trial in 0..12 {
            let kind = if trial % 2 == 0 { AncillaKind::Ancilla } else { AncillaKind::Ebit };
            let seed = SeedTransform::new(random_symplectic(3, &mut rng), 2, 1, 1, vec![kind]).unwrap();
            let spec = CodeSpec::new(seed, CodeRole::Inner, 1 + trial % 3).unwrap();
            let truth = random_vec(&mut rng, spec.physical_len());
            let syn = track_error(&spec, &truth).unwrap().syndrome;
            let pp = MessageSequence::new(MessageRole::APriori, MessageSubject::Physical, random_dists(&mut rng, spec.physical_len()));
            let pl = MessageSequence::new(MessageRole::APriori, MessageSubject::Logical, random_dists(&mut rng, spec.logical_len()));
            let out = siso_decode(&spec, &pp, &pl, &syn).unwrap();
            let (bl, bp) = brute_force_posteriors(&spec, &pp, &pl, &syn);
            for (a, b) in out.post_l.dists.iter().zip(&bl).chain(out.post_p.dists.iter().zip(&bp)) {
                for s in 0..4 {
                    assert!((a.0[s] - b.0[s]).abs() < 1e-9, "trial {trial}: {a:?} vs {b:?}");
                }
            }
            for ((e, po), pr) in out.ext_l.dists.iter().zip(&out.post_l.dists).zip(&pl.dists) {
                let mut want = [0.0; 4];
                (0..4).for_each(|s| want[s] = po.0[s] / pr.0[s]);
                let want = SymbolDistribution(want).normalized().unwrap();
                (0..4).for_each(|s| assert!((e.0[s] - want.0[s]).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn identity_seed_has_distance_one() {
        let spec = CodeSpec::new(identity_seed(), CodeRole::Outer, 1).unwrap();
        let d = distance_spectrum(&spec, 3, 10, SPECTRUM_NODE_BUDGET);
        assert_eq!(d.min_distance(), Some(1));
        assert_eq!(d.logical[&1], 3);
        let d = distance_spectrum(&spec, 0, 10, SPECTRUM_NODE_BUDGET);
        assert!(d.logical.is_empty());
    }

    #[test]
    fn optimized_outer_low_weight_spectrum() {
        let spec = CodeSpec::new(opt_outer(), CodeRole::Outer, 1).unwrap();
        let d = distance_spectrum(&spec, 5, 40, SPECTRUM_NODE_BUDGET);
        assert_eq!(d.min_distance(), Some(3));
        assert_eq!(d.logical.get(&3), Some(&2));
        assert_eq!(d.logical.get(&4), Some(&19));
        assert_eq!(d.logical.get(&5), Some(&107));
        assert_eq!(d.combined().get(&5), Some(&108));
        assert!(!d.truncated);
        let low = distance_spectrum(&spec, 2, 40, SPECTRUM_NODE_BUDGET);
        assert!(low.logical.is_empty());
    }

    #[test]
    fn random_seed_tracking_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let seed = SeedTransform::new(random_symplectic(3, &mut rng), 2, 1, 1, vec![AncillaKind::Ancilla]).unwrap();
        let spec = CodeSpec::new(seed, CodeRole::Inner, 7).unwrap();
        let e = random_vec(&mut rng, 14);
        let t = track_error(&spec, &e).unwrap();
        let (p, _) = encode_frame(&spec, &t.logical, &t.full_syndrome, &t.initial_memory).unwrap();
        assert_eq!(p, e);
    }
}
