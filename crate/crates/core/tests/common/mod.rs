//! Exhaustive-enumeration oracles for tiny codes. Everything here works from
//! the raw seed matrix, not from the decoder's trellis tables.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use qtc_core::pauli::apply_matrix;
use qtc_core::{CodeSpec, EffectiveVector, PauliSymbol, SeedTransform, SymbolDistribution, SyndromeSequence};

/// Result of inverting the encoder over a frame.
pub struct Unrolled {
    pub logical: Vec<PauliSymbol>,
    /// Ancilla symbols per step.
    pub ancilla: Vec<Vec<PauliSymbol>>,
    pub initial_memory: Vec<PauliSymbol>,
}

/// Runs the seed inverse backwards from an identity final memory.
pub fn unroll(seed: &SeedTransform, steps: usize, physical: &[PauliSymbol]) -> Unrolled {
    let (n, k, m) = (seed.n(), seed.k(), seed.m());
    let inv = seed.matrix().inverse();
    let mut memory = vec![PauliSymbol::I; m];
    let mut logical = vec![PauliSymbol::I; k * steps];
    let mut ancilla = vec![Vec::new(); steps];
    for t in (0..steps).rev() {
        let mut out = EffectiveVector::zeros(n + m);
        for (i, &s) in memory.iter().enumerate() {
            out.set(i, s);
        }
        for j in 0..n {
            out.set(m + j, physical[t * n + j]);
        }
        let input = apply_matrix(&out, &inv).unwrap();
        memory = (0..m).map(|i| input.get(i)).collect();
        for j in 0..k {
            logical[t * k + j] = input.get(m + j);
        }
        ancilla[t] = (m + k..n + m).map(|i| input.get(i)).collect();
    }
    Unrolled { logical, ancilla, initial_memory: memory }
}

/// Two bits per qubit, Z-bit low.
pub fn trellis_code(symbols: &[PauliSymbol]) -> u16 {
    symbols.iter().enumerate().map(|(j, s)| (s.code() as u16) << (2 * j)).sum()
}

/// What the decoder gets to see of a physical error.
pub fn observe(spec: &CodeSpec, physical: &[PauliSymbol]) -> SyndromeSequence {
    let u = unroll(spec.seed(), spec.block_count(), physical);
    let mask = spec.syndrome_mask() as u16;
    let mem_mask = spec.memory_mask() as u16;
    SyndromeSequence {
        values: u.ancilla.iter().map(|a| trellis_code(a) & mask).collect(),
        known_mask: mask,
        initial_memory: trellis_code(&u.initial_memory) & mem_mask,
        memory_mask: mem_mask,
    }
}

pub fn random_symbols(rng: &mut ChaCha8Rng, len: usize) -> Vec<PauliSymbol> {
    (0..len).map(|_| PauliSymbol::from_index(rng.random_range(0..4))).collect()
}

pub fn random_dist(rng: &mut ChaCha8Rng) -> SymbolDistribution {
    let raw: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.05..1.0));
    SymbolDistribution(raw).normalized().unwrap()
}

pub struct Marginals {
    pub post_l: Vec<SymbolDistribution>,
    pub post_p: Vec<SymbolDistribution>,
    /// Same sums with the qubit's own prior left out.
    pub ext_l: Vec<SymbolDistribution>,
    pub ext_p: Vec<SymbolDistribution>,
}

fn leave_one_out(symbols: &[PauliSymbol], priors: &[SymbolDistribution], scale: f64, post: &mut [[f64; 4]], ext: &mut [[f64; 4]]) {
    let factors: Vec<f64> = symbols.iter().zip(priors).map(|(s, d)| d.prob(*s)).collect();
    let all: f64 = factors.iter().product();
    for (q, s) in symbols.iter().enumerate() {
        let others: f64 = factors.iter().enumerate().filter(|&(i, _)| i != q).map(|(_, f)| f).product();
        post[q][s.index()] += scale * all;
        ext[q][s.index()] += scale * others;
    }
}

/// Per-qubit posteriors and extrinsics from summing every physical error
/// pattern that reproduces `syn`, weighted by the physical and logical priors.
pub fn brute_force(
    spec: &CodeSpec,
    syn: &SyndromeSequence,
    pp: &[SymbolDistribution],
    pl: &[SymbolDistribution],
) -> Marginals {
    let steps = spec.block_count();
    let np = spec.physical_len();
    let nl = spec.logical_len();
    let (mut post_p, mut ext_p) = (vec![[0.0f64; 4]; np], vec![[0.0f64; 4]; np]);
    let (mut post_l, mut ext_l) = (vec![[0.0f64; 4]; nl], vec![[0.0f64; 4]; nl]);
    let mut pattern = vec![PauliSymbol::I; np];
    for idx in 0..1usize << (2 * np) {
        for (q, s) in pattern.iter_mut().enumerate() {
            *s = PauliSymbol::from_index((idx >> (2 * q)) & 3);
        }
        let u = unroll(spec.seed(), steps, &pattern);
        let consistent = u.ancilla.iter().zip(&syn.values).all(|(a, &o)| trellis_code(a) & syn.known_mask == o)
            && trellis_code(&u.initial_memory) & syn.memory_mask == syn.initial_memory;
        if !consistent {
            continue;
        }
        let wp: f64 = pattern.iter().zip(pp).map(|(s, d)| d.prob(*s)).product();
        let wl: f64 = u.logical.iter().zip(pl).map(|(s, d)| d.prob(*s)).product();
        leave_one_out(&pattern, pp, wl, &mut post_p, &mut ext_p);
        leave_one_out(&u.logical, pl, wp, &mut post_l, &mut ext_l);
    }
    let norm = |raw: Vec<[f64; 4]>| -> Vec<SymbolDistribution> {
        raw.into_iter().map(|r| SymbolDistribution(r).normalized().unwrap()).collect()
    };
    Marginals { post_l: norm(post_l), post_p: norm(post_p), ext_l: norm(ext_l), ext_p: norm(ext_p) }
}

pub fn max_gap(a: &[SymbolDistribution], b: &[SymbolDistribution]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).flat_map(|(x, y)| (0..4).map(move |s| (x.0[s] - y.0[s]).abs())).fold(0.0, f64::max)
}
