//! Quantum interleaver: a qubit permutation plus a single-qubit symplectic
//! twist on every qubit.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::message::{MessageSequence, SymbolDistribution};
use crate::pauli::{single_qubit_symplectics, EffectiveVector, PauliSymbol};

/// `TWISTS[t][s]` is the symbol index that symbol index `s` becomes under twist `t`.
fn twist_tables() -> &'static [[usize; 4]; 6] {
    static TABLES: OnceLock<[[usize; 4]; 6]> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut out = [[0; 4]; 6];
        for (t, m) in single_qubit_symplectics().iter().enumerate() {
            for s in PauliSymbol::ALL {
                // a one-qubit word is exactly the symbol code (z low, x high)
                let image = PauliSymbol::from_code(m.apply_word(s.code() as u64) as usize);
                out[t][s.index()] = image.index();
            }
        }
        out
    })
}

fn inverse_twist_tables() -> &'static [[usize; 4]; 6] {
    static TABLES: OnceLock<[[usize; 4]; 6]> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut out = [[0; 4]; 6];
        for (t, table) in twist_tables().iter().enumerate() {
            for s in 0..4 {
                out[t][table[s]] = s;
            }
        }
        out
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumInterleaver {
    perm: Vec<usize>,
    /// Indices into [`single_qubit_symplectics`].
    twists: Vec<u8>,
}

impl QuantumInterleaver {
    /// Uniform permutation (Fisher-Yates) and i.i.d. uniform twists.
    pub fn new_random<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidInput("interleaver size must be at least 1".into()));
        }
        let mut perm: Vec<usize> = (0..size).collect();
        perm.shuffle(rng);
        let twists = (0..size).map(|_| rng.random_range(0..6u8)).collect();
        Ok(QuantumInterleaver { perm, twists })
    }

    pub fn identity(size: usize) -> Self {
        QuantumInterleaver { perm: (0..size).collect(), twists: vec![0; size] }
    }

    pub fn from_parts(perm: Vec<usize>, twists: Vec<u8>) -> Result<Self> {
        if perm.len() != twists.len() {
            return Err(Error::LengthMismatch { expected: perm.len(), actual: twists.len() });
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput("interleaver permutation is not a bijection".into()));
            }
        }
        if let Some(&t) = twists.iter().find(|&&t| t >= 6) {
            return Err(Error::InvalidInput(format!("twist index {t} out of range 0..6")));
        }
        Ok(QuantumInterleaver { perm, twists })
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn twists(&self) -> &[u8] {
        &self.twists
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.size() {
            return Err(Error::LengthMismatch { expected: self.size(), actual: len });
        }
        Ok(())
    }

    /// Twists qubit `i`, then moves it to `perm[i]`.
    pub fn apply(&self, v: &EffectiveVector) -> Result<EffectiveVector> {
        self.check(v.n_qubits())?;
        let tables = twist_tables();
        let mut out = EffectiveVector::zeros(self.size());
        for (i, (&dst, &t)) in self.perm.iter().zip(&self.twists).enumerate() {
            let s = v.get(i).index();
            out.set(dst, PauliSymbol::from_index(tables[t as usize][s]));
        }
        Ok(out)
    }

    pub fn inverse_apply(&self, v: &EffectiveVector) -> Result<EffectiveVector> {
        self.check(v.n_qubits())?;
        let tables = inverse_twist_tables();
        let mut out = EffectiveVector::zeros(self.size());
        for (i, (&src, &t)) in self.perm.iter().zip(&self.twists).enumerate() {
            let s = v.get(src).index();
            out.set(i, PauliSymbol::from_index(tables[t as usize][s]));
        }
        Ok(out)
    }

    /// Moves each table to `perm[i]`, relabelling symbol `s` as `twist(s)`.
    pub fn apply_messages(&self, msgs: &MessageSequence) -> Result<MessageSequence> {
        self.check(msgs.len())?;
        let tables = twist_tables();
        let mut dists = vec![SymbolDistribution([0.0; 4]); self.size()];
        for (i, (&dst, &t)) in self.perm.iter().zip(&self.twists).enumerate() {
            let table = &tables[t as usize];
            for s in 0..4 {
                dists[dst].0[table[s]] = msgs.dists[i].0[s];
            }
        }
        Ok(MessageSequence::new(msgs.role, msgs.subject, dists))
    }

    pub fn inverse_apply_messages(&self, msgs: &MessageSequence) -> Result<MessageSequence> {
        self.check(msgs.len())?;
        let tables = twist_tables();
        let mut dists = vec![SymbolDistribution([0.0; 4]); self.size()];
        for (i, (&src, &t)) in self.perm.iter().zip(&self.twists).enumerate() {
            let table = &tables[t as usize];
            for s in 0..4 {
                dists[i].0[s] = msgs.dists[src].0[table[s]];
            }
        }
        Ok(MessageSequence::new(msgs.role, msgs.subject, dists))
    }
}
