//! Per-qubit probability tables over the four effective Pauli symbols.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{EffectiveVector, PauliSymbol};

/// Probabilities indexed by [`PauliSymbol::index`] (`I, X, Y, Z`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolDistribution(pub [f64; 4]);

impl SymbolDistribution {
    pub const UNIFORM: SymbolDistribution = SymbolDistribution([0.25; 4]);

    pub fn delta(s: PauliSymbol) -> Self {
        let mut p = [0.0; 4];
        p[s.index()] = 1.0;
        SymbolDistribution(p)
    }

    /// Product of two independent bit distributions, `P(z = 1)` and `P(x = 1)`.
    pub fn from_bit_probs(pz1: f64, px1: f64) -> Self {
        let mut p = [0.0; 4];
        for s in PauliSymbol::ALL {
            let (z, x) = s.bits();
            let fz = if z { pz1 } else { 1.0 - pz1 };
            let fx = if x { px1 } else { 1.0 - px1 };
            p[s.index()] = fz * fx;
        }
        SymbolDistribution(p)
    }

    pub fn prob(&self, s: PauliSymbol) -> f64 {
        self.0[s.index()]
    }

    /// Probability of the symbol with two-bit code `code` (Z-bit low).
    #[inline]
    pub fn prob_code(&self, code: usize) -> f64 {
        self.0[CODE_TO_INDEX[code]]
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        self.0.iter().all(|&p| p >= 0.0 && p.is_finite()) && (self.sum() - 1.0).abs() <= tol
    }

    /// Scales to unit sum; `None` if the total mass is zero or not finite.
    pub fn normalized(&self) -> Option<Self> {
        let s = self.sum();
        if !(s > 0.0) || !s.is_finite() {
            return None;
        }
        Some(SymbolDistribution(self.0.map(|p| p / s)))
    }

    /// Most likely symbol, ties going to the earlier symbol in `I < X < Y < Z`.
    pub fn argmax(&self) -> PauliSymbol {
        let mut best = 0;
        for i in 1..4 {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        PauliSymbol::from_index(best)
    }

    /// `sum_s p(s) log2 p(s)`, with `0 log 0 = 0`.
    pub fn neg_entropy_bits(&self) -> f64 {
        self.0.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum()
    }
}

/// Maps a two-bit code (bit 0 = z, bit 1 = x) to a symbol index.
pub(crate) const CODE_TO_INDEX: [usize; 4] = [0, 3, 1, 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageRole {
    APriori,
    Extrinsic,
    APosteriori,
}

/// Which error sequence a message refers to: the logical or physical side of a code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageSubject {
    Logical,
    Physical,
}

/// One distribution per qubit position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MessageSequence {
    pub role: MessageRole,
    pub subject: MessageSubject,
    pub dists: Vec<SymbolDistribution>,
}

impl MessageSequence {
    pub fn new(role: MessageRole, subject: MessageSubject, dists: Vec<SymbolDistribution>) -> Self {
        MessageSequence { role, subject, dists }
    }

    pub fn uniform(len: usize, role: MessageRole, subject: MessageSubject) -> Self {
        Self::new(role, subject, vec![SymbolDistribution::UNIFORM; len])
    }

    /// Delta distributions on the symbols of `v`.
    pub fn delta(v: &EffectiveVector, role: MessageRole, subject: MessageSubject) -> Self {
        Self::new(role, subject, v.symbols().map(SymbolDistribution::delta).collect())
    }

    pub fn len(&self) -> usize {
        self.dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        match self.dists.iter().position(|d| !d.is_normalized(tol)) {
            None => Ok(()),
            Some(i) => Err(Error::InvalidInput(format!("message at position {i} is not a distribution: {:?}", self.dists[i]))),
        }
    }

    /// Symbol-wise argmax over the whole sequence.
    pub fn hard_decision(&self) -> EffectiveVector {
        let syms: Vec<PauliSymbol> = self.dists.iter().map(|d| d.argmax()).collect();
        EffectiveVector::from_symbols(&syms)
    }

    pub fn with_role(mut self, role: MessageRole) -> Self {
        self.role = role;
        self
    }
}
