//! Depolarizing channel and the capacity formulas used to judge code designs.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::message::SymbolDistribution;
use crate::pauli::{EffectiveVector, PauliSymbol};

/// Maximum tolerable depolarizing probability for an entanglement consumption
/// rate of 6/9 (entanglement-assisted hashing bound); used for dB gaps only.
pub const EA_HASHING_PMAX: f64 = 0.3779;

/// Each qubit suffers X, Y or Z with probability `p / 3` each.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepolarizingChannel {
    p: f64,
}

impl DepolarizingChannel {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange { what: "depolarizing probability", value: p });
        }
        Ok(DepolarizingChannel { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn symbol_priors(&self) -> SymbolDistribution {
        let q = self.p / 3.0;
        SymbolDistribution([1.0 - self.p, q, q, q])
    }

    pub fn sample_symbol<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliSymbol {
        let u: f64 = rng.random();
        if u >= self.p {
            return PauliSymbol::I;
        }
        // u / p is uniform on [0, 1) given an error
        match (3.0 * u / self.p) as usize {
            0 => PauliSymbol::X,
            1 => PauliSymbol::Y,
            _ => PauliSymbol::Z,
        }
    }

    pub fn sample_error<R: Rng + ?Sized>(&self, n_qubits: usize, rng: &mut R) -> EffectiveVector {
        let mut v = EffectiveVector::zeros(n_qubits);
        for i in 0..n_qubits {
            v.set(i, self.sample_symbol(rng));
        }
        v
    }
}

pub fn sample_error<R: Rng + ?Sized>(ch: &DepolarizingChannel, n_qubits: usize, rng: &mut R) -> EffectiveVector {
    ch.sample_error(n_qubits, rng)
}

pub fn symbol_priors(ch: &DepolarizingChannel) -> SymbolDistribution {
    ch.symbol_priors()
}

fn check_prob(what: &'static str, q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&q) || q.is_nan() {
        return Err(Error::OutOfRange { what, value: q });
    }
    Ok(())
}

/// `H2(q)` in bits, exact zero at `q = 0` and `q = 1`.
pub fn binary_entropy(q: f64) -> Result<f64> {
    check_prob("binary entropy argument", q)?;
    if q == 0.0 || q == 1.0 {
        return Ok(0.0);
    }
    Ok(-q * q.log2() - (1.0 - q) * (1.0 - q).log2())
}

/// Capacity of either of the two binary symmetric channels with crossover `2p/3`.
pub fn bsc_capacity(p: f64) -> Result<f64> {
    check_prob("depolarizing probability", p)?;
    let q = 2.0 * p / 3.0;
    Ok(1.0 - binary_entropy(q)?)
}

/// Classical capacity of each half of the 4-ary symmetric channel.
pub fn fourary_classical_capacity(p: f64) -> Result<f64> {
    check_prob("depolarizing probability", p)?;
    Ok(0.5 * (2.0 - binary_entropy(p)? - p * 3f64.log2()))
}

/// Quantum hashing bound `1 - H2(p) - p log2 3`.
pub fn hashing_bound(p: f64) -> Result<f64> {
    check_prob("depolarizing probability", p)?;
    Ok(1.0 - binary_entropy(p)? - p * 3f64.log2())
}

/// Equivalent classical rate of a quantum stabilizer code of rate `r_q`.
pub fn classical_rate(r_q: f64) -> Result<f64> {
    check_prob("quantum code rate", r_q)?;
    Ok(0.5 * (1.0 + r_q))
}

/// `10 log10(p_a / p_b)`.
pub fn db_gap(p_a: f64, p_b: f64) -> Result<f64> {
    if !(p_a > 0.0) {
        return Err(Error::OutOfRange { what: "dB gap numerator", value: p_a });
    }
    if !(p_b > 0.0) {
        return Err(Error::OutOfRange { what: "dB gap denominator", value: p_b });
    }
    Ok(10.0 * (p_a / p_b).log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sample_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let zero = DepolarizingChannel::new(0.0).unwrap();
        assert!(zero.sample_error(1000, &mut rng).is_identity());
        let one = DepolarizingChannel::new(1.0).unwrap();
        assert_eq!(one.sample_error(1000, &mut rng).weight(), 1000);
        assert!(DepolarizingChannel::new(1.5).is_err());
        assert!(DepolarizingChannel::new(-0.1).is_err());
    }

    #[test]
    fn sample_frequencies_match_priors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ch = DepolarizingChannel::new(0.3).unwrap();
        let n = 100_000;
        let e = ch.sample_error(n, &mut rng);
        let mut counts = [0usize; 4];
        for s in e.symbols() {
            counts[s.index()] += 1;
        }
        let sigma = (n as f64 * 0.1 * 0.9).sqrt();
        for s in [PauliSymbol::X, PauliSymbol::Y, PauliSymbol::Z] {
            let c = counts[s.index()] as f64;
            assert!((c - 0.1 * n as f64).abs() < 3.0 * sigma, "{s}: {c}");
        }
    }

    #[test]
    fn priors_examples() {
        let d = DepolarizingChannel::new(0.0).unwrap().symbol_priors();
        assert_eq!(d.0, [1.0, 0.0, 0.0, 0.0]);
        let d = DepolarizingChannel::new(0.75).unwrap().symbol_priors();
        for p in d.0 {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn priors_reproduce_xz_correlation_table() {
        let p = 0.27;
        let d = DepolarizingChannel::new(p).unwrap().symbol_priors();
        let x_flip = d.prob(PauliSymbol::X) + d.prob(PauliSymbol::Y);
        let z_flip = d.prob(PauliSymbol::Z) + d.prob(PauliSymbol::Y);
        assert!((x_flip - 2.0 * p / 3.0).abs() < 1e-15);
        assert!((z_flip - 2.0 * p / 3.0).abs() < 1e-15);
        assert!((d.prob(PauliSymbol::Y) - p / 3.0).abs() < 1e-15);
        assert!((d.prob(PauliSymbol::I) - (1.0 - p)).abs() < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(bsc_capacity(0.0).unwrap(), 1.0);
        assert!(bsc_capacity(0.75).unwrap().abs() < 1e-15);
        let q: f64 = 1.0 / 15.0;
        let h = -q * q.log2() - (1.0 - q) * (1.0 - q).log2();
        assert!((bsc_capacity(0.1).unwrap() - (1.0 - h)).abs() < 1e-15);
        assert!(bsc_capacity(1.01).is_err());

        assert_eq!(fourary_classical_capacity(0.0).unwrap(), 1.0);
        assert!(fourary_classical_capacity(0.75).unwrap().abs() < 1e-12);
        assert_eq!(hashing_bound(0.0).unwrap(), 1.0);
    }

    #[test]
    fn hashing_bound_is_twice_fourary_minus_one() {
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            let lhs = hashing_bound(p).unwrap();
            let rhs = 2.0 * fourary_classical_capacity(p).unwrap() - 1.0;
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn hashing_bound_decreasing_and_rate_one_ninth_root() {
        let mut prev = hashing_bound(0.0).unwrap();
        for i in 1..=25 {
            let cur = hashing_bound(i as f64 / 100.0).unwrap();
            assert!(cur < prev);
            prev = cur;
        }
        // bisection oracle on [0, 0.25]
        let (mut lo, mut hi) = (0.0f64, 0.25f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if hashing_bound(mid).unwrap() > 1.0 / 9.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        assert!(root > 0.0 && root < 0.25);
        assert!((hashing_bound(root).unwrap() - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn classical_rate_examples() {
        assert!((classical_rate(1.0 / 9.0).unwrap() - 5.0 / 9.0).abs() < 1e-15);
        assert_eq!(classical_rate(0.0).unwrap(), 0.5);
        assert_eq!(classical_rate(1.0).unwrap(), 1.0);
        assert!(classical_rate(1.5).is_err());
    }

    #[test]
    fn db_gap_examples() {
        let g = db_gap(0.35, EA_HASHING_PMAX).unwrap();
        assert!((g - (-0.333)).abs() < 0.005, "{g}");
        assert_eq!((g.abs() * 10.0).round() / 10.0, 0.3);
        let g = db_gap(0.2925, 0.3275).unwrap();
        assert!((g - (-0.49)).abs() < 0.005, "{g}");
        assert_eq!((g.abs() * 10.0).round() / 10.0, 0.5);
        assert_eq!(db_gap(0.2, 0.2).unwrap(), 0.0);
        assert!(db_gap(0.0, 0.2).is_err());
        assert!(db_gap(0.2, -1.0).is_err());
    }
}
