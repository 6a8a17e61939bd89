//! Binary effective-Pauli algebra.
//!
//! A Pauli error on `N` qubits, with its global phase dropped, is a length-`2N`
//! binary vector: the `N` Z-bits followed by the `N` X-bits. Clifford maps act on
//! these vectors as binary symplectic matrices multiplied from the right
//! (`v -> v M`), with row `i < d` of `M` being the image of `Z_i` and row `d + i`
//! the image of `X_i`.
//!
//! Small matrices (at most 32 qubits) store each row in a `u64`, bit `j` holding
//! column `j`. The same packing is used for short vectors via
//! [`EffectiveVector::to_word`].

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four effective single-qubit Pauli errors.
///
/// The discriminant order `I < X < Y < Z` is also the tie-break order used by
/// the final symbol decision of the decoder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliSymbol {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl PauliSymbol {
    pub const ALL: [PauliSymbol; 4] = [PauliSymbol::I, PauliSymbol::X, PauliSymbol::Y, PauliSymbol::Z];

    /// `(z, x)` encoding: I=(0,0), X=(0,1), Y=(1,1), Z=(1,0).
    pub fn from_bits(z: bool, x: bool) -> Self {
        match (z, x) {
            (false, false) => PauliSymbol::I,
            (false, true) => PauliSymbol::X,
            (true, true) => PauliSymbol::Y,
            (true, false) => PauliSymbol::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliSymbol::I => (false, false),
            PauliSymbol::X => (false, true),
            PauliSymbol::Y => (true, true),
            PauliSymbol::Z => (true, false),
        }
    }

    /// Two-bit code with the Z-bit in bit 0 and the X-bit in bit 1.
    pub fn code(self) -> usize {
        let (z, x) = self.bits();
        z as usize | (x as usize) << 1
    }

    pub fn from_code(code: usize) -> Self {
        Self::from_bits(code & 1 == 1, code & 2 == 2)
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn is_identity(self) -> bool {
        self == PauliSymbol::I
    }
}

impl fmt::Display for PauliSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            PauliSymbol::I => 'I',
            PauliSymbol::X => 'X',
            PauliSymbol::Y => 'Y',
            PauliSymbol::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// Effective error vector on `n_qubits` qubits, stored as packed Z and X halves.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EffectiveVector {
    n_qubits: usize,
    z: Vec<u64>,
    x: Vec<u64>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl EffectiveVector {
    pub fn zeros(n_qubits: usize) -> Self {
        let w = words_for(n_qubits);
        EffectiveVector { n_qubits, z: vec![0; w], x: vec![0; w] }
    }

    pub fn from_symbols(symbols: &[PauliSymbol]) -> Self {
        let mut v = Self::zeros(symbols.len());
        for (i, &s) in symbols.iter().enumerate() {
            v.set(i, s);
        }
        v
    }

    /// Builds a vector from its `2N` bits laid out as `[z_1..z_N | x_1..x_N]`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!("odd effective-vector length {}", bits.len())));
        }
        let n = bits.len() / 2;
        let mut v = Self::zeros(n);
        for i in 0..n {
            v.set(i, PauliSymbol::from_bits(bits[i] != 0, bits[n + i] != 0));
        }
        Ok(v)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        let mut out = vec![0u8; 2 * self.n_qubits];
        for i in 0..self.n_qubits {
            let (z, x) = self.get(i).bits();
            out[i] = z as u8;
            out[self.n_qubits + i] = x as u8;
        }
        out
    }

    /// Packs a vector of at most 32 qubits into one word: bit `i` is `z_i`,
    /// bit `n + i` is `x_i`.
    pub fn to_word(&self) -> u64 {
        assert!(self.n_qubits <= 32, "to_word needs at most 32 qubits");
        let n = self.n_qubits;
        let mask = if n == 0 { 0 } else { u64::MAX >> (64 - n) };
        let z = self.z.first().copied().unwrap_or(0) & mask;
        let x = self.x.first().copied().unwrap_or(0) & mask;
        z | (x << n)
    }

    pub fn from_word(word: u64, n_qubits: usize) -> Self {
        assert!(n_qubits <= 32, "from_word needs at most 32 qubits");
        let mut v = Self::zeros(n_qubits);
        if n_qubits > 0 {
            let mask = u64::MAX >> (64 - n_qubits);
            v.z[0] = word & mask;
            v.x[0] = (word >> n_qubits) & mask;
        }
        v
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn get(&self, i: usize) -> PauliSymbol {
        debug_assert!(i < self.n_qubits);
        let (w, b) = (i / 64, i % 64);
        PauliSymbol::from_bits((self.z[w] >> b) & 1 == 1, (self.x[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, i: usize, s: PauliSymbol) {
        debug_assert!(i < self.n_qubits);
        let (w, b) = (i / 64, i % 64);
        let (z, x) = s.bits();
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
    }

    pub fn symbols(&self) -> impl Iterator<Item = PauliSymbol> + '_ {
        (0..self.n_qubits).map(move |i| self.get(i))
    }

    /// Number of qubits carrying a non-identity symbol.
    pub fn weight(&self) -> usize {
        self.z.iter().zip(&self.x).map(|(z, x)| (z | x).count_ones() as usize).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.z.iter().chain(&self.x).all(|&w| w == 0)
    }

    /// Product of Pauli operators, which is addition over GF(2).
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_len(self.n_qubits, other.n_qubits)?;
        let z = self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect();
        let x = self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect();
        Ok(EffectiveVector { n_qubits: self.n_qubits, z, x })
    }

    /// Copies qubits `start..start + len` into a new vector.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        let mut out = Self::zeros(len);
        for i in 0..len {
            out.set(i, self.get(start + i));
        }
        out
    }

    /// Counts positions where the two vectors carry different symbols.
    pub fn symbol_differences(&self, other: &Self) -> Result<usize> {
        Ok(self.add(other)?.weight())
    }
}

impl fmt::Debug for EffectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.symbols().map(|s| s.to_string()).collect();
        write!(f, "EffectiveVector({s})")
    }
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// `(a_z . b_x + a_x . b_z) mod 2`; zero exactly when the operators commute.
pub fn symplectic_product(a: &EffectiveVector, b: &EffectiveVector) -> Result<u8> {
    check_len(a.n_qubits, b.n_qubits)?;
    let mut acc = 0u32;
    for w in 0..a.z.len() {
        acc ^= ((a.z[w] & b.x[w]) ^ (a.x[w] & b.z[w])).count_ones() & 1;
    }
    Ok(acc as u8)
}

/// Symplectic product of two packed `d`-qubit words.
#[inline]
pub fn word_symplectic_product(a: u64, b: u64, d: usize) -> u8 {
    let mask = low_mask(d);
    let (az, ax) = (a & mask, (a >> d) & mask);
    let (bz, bx) = (b & mask, (b >> d) & mask);
    (((az & bx) ^ (ax & bz)).count_ones() & 1) as u8
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Dense binary matrix with at most 64 columns; row `i` is a packed word.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitMatrix {
    rows: Vec<u64>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64);
        BitMatrix { rows: vec![0; rows], cols }
    }

    pub fn identity(side: usize) -> Self {
        let mut m = Self::zeros(side, side);
        for i in 0..side {
            m.rows[i] = 1 << i;
        }
        m
    }

    pub fn from_rows(rows: Vec<u64>, cols: usize) -> Self {
        assert!(cols <= 64);
        let mask = low_mask(cols);
        BitMatrix { rows: rows.into_iter().map(|r| r & mask).collect(), cols }
    }

    /// Builds a matrix from a row-major list of 0/1 entries.
    pub fn from_entries(entries: &[Vec<u8>]) -> Result<Self> {
        let cols = entries.first().map_or(0, |r| r.len());
        if cols > 64 {
            return Err(Error::Dimension(format!("{cols} columns exceed the 64-column limit")));
        }
        let mut rows = Vec::with_capacity(entries.len());
        for r in entries {
            check_len(cols, r.len())?;
            rows.push(r.iter().enumerate().fold(0u64, |acc, (j, &b)| acc | ((b as u64 & 1) << j)));
        }
        Ok(BitMatrix { rows, cols })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.rows[r] >> c) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        if value {
            self.rows[r] |= 1 << c;
        } else {
            self.rows[r] &= !(1 << c);
        }
    }

    /// Row vector times matrix over GF(2).
    #[inline]
    pub fn mul_word(&self, v: u64) -> u64 {
        let mut out = 0;
        let mut bits = v;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            out ^= self.rows[i];
            bits &= bits - 1;
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.n_rows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows(),
                self.cols,
                other.n_rows(),
                other.cols
            )));
        }
        let rows = self.rows.iter().map(|&r| other.mul_word(r)).collect();
        Ok(BitMatrix { rows, cols: other.cols })
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.n_rows());
        for (i, &row) in self.rows.iter().enumerate() {
            for j in 0..self.cols {
                if (row >> j) & 1 == 1 {
                    t.rows[j] |= 1 << i;
                }
            }
        }
        t
    }

    /// Keeps the listed rows and columns, in the order given.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, self.get(r, c));
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&i| (rows[i] >> c) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && (*r >> c) & 1 == 1 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.n_rows() == self.cols && self.rank() == self.cols
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.n_rows(), self.cols)?;
        for &r in &self.rows {
            let line: String = (0..self.cols).map(|j| if (r >> j) & 1 == 1 { '1' } else { '0' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// The symplectic form `[[0, I_d], [I_d, 0]]` as a `2d x 2d` matrix.
pub fn symplectic_form(d: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        m.set(i, d + i, true);
        m.set(d + i, i, true);
    }
    m
}

/// First row pair `(i, j)` with `<row_i, row_j> != form_ij`, if any.
fn symplectic_violation(m: &BitMatrix) -> Option<(usize, usize)> {
    let d = m.n_cols() / 2;
    let side = m.n_rows();
    for i in 0..side {
        for j in i..side {
            let expected = u8::from(j == i + d);
            if word_symplectic_product(m.rows[i], m.rows[j], d) != expected {
                return Some((i, j));
            }
        }
    }
    None
}

/// True iff `M Λ Mᵀ = Λ` over GF(2).
pub fn is_symplectic(m: &BitMatrix) -> Result<bool> {
    if m.n_rows() != m.n_cols() {
        return Err(Error::Dimension(format!("matrix is {}x{}, not square", m.n_rows(), m.n_cols())));
    }
    if m.n_cols() % 2 != 0 {
        return Err(Error::Dimension(format!("odd side {}", m.n_cols())));
    }
    Ok(symplectic_violation(m).is_none())
}

/// A validated binary symplectic matrix acting on `dim_qubits` qubits.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinarySymplecticMatrix {
    dim_qubits: usize,
    matrix: BitMatrix,
}

impl BinarySymplecticMatrix {
    pub fn new(matrix: BitMatrix) -> Result<Self> {
        is_symplectic(&matrix)?;
        if let Some((row_a, row_b)) = symplectic_violation(&matrix) {
            return Err(Error::NotSymplectic { row_a, row_b });
        }
        if matrix.n_cols() > 64 {
            return Err(Error::Dimension("symplectic matrices are limited to 32 qubits".into()));
        }
        Ok(BinarySymplecticMatrix { dim_qubits: matrix.n_cols() / 2, matrix })
    }

    pub fn identity(dim_qubits: usize) -> Self {
        BinarySymplecticMatrix { dim_qubits, matrix: BitMatrix::identity(2 * dim_qubits) }
    }

    pub fn dim_qubits(&self) -> usize {
        self.dim_qubits
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    #[inline]
    pub fn apply_word(&self, v: u64) -> u64 {
        self.matrix.mul_word(v)
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(BinarySymplecticMatrix { dim_qubits: self.dim_qubits, matrix: self.matrix.mul(&other.matrix)? })
    }

    /// Group inverse, `Λ Mᵀ Λ`.
    pub fn inverse(&self) -> Self {
        let d = self.dim_qubits;
        let t = self.matrix.transpose();
        // Conjugating by Λ swaps the Z and X halves of both rows and columns.
        let swap = |w: u64| ((w & low_mask(d)) << d) | ((w >> d) & low_mask(d));
        let mut rows = vec![0u64; 2 * d];
        for (i, &r) in t.rows().iter().enumerate() {
            let target = if i < d { i + d } else { i - d };
            rows[target] = swap(r);
        }
        BinarySymplecticMatrix { dim_qubits: d, matrix: BitMatrix::from_rows(rows, 2 * d) }
    }
}

impl fmt::Debug for BinarySymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinarySymplecticMatrix(d={}) {:?}", self.dim_qubits, self.matrix)
    }
}

/// `v M` for an effective vector whose length matches the matrix.
pub fn apply_matrix(v: &EffectiveVector, m: &BinarySymplecticMatrix) -> Result<EffectiveVector> {
    check_len(m.dim_qubits, v.n_qubits())?;
    Ok(EffectiveVector::from_word(m.apply_word(v.to_word()), v.n_qubits()))
}

pub fn invert_symplectic(m: &BinarySymplecticMatrix) -> BinarySymplecticMatrix {
    m.inverse()
}

/// Uniformly random element of `Sp(2d, GF(2))`.
///
/// Builds a symplectic basis one hyperbolic pair at a time: `v` uniform and
/// nonzero in the symplectic complement of the pairs chosen so far, then `w`
/// uniform in that complement subject to `<v, w> = 1`. Projecting a uniform
/// vector onto the complement is uniform on it, so every group element is
/// produced by exactly one sequence of choices.
pub fn random_symplectic<R: Rng + ?Sized>(dim_qubits: usize, rng: &mut R) -> BinarySymplecticMatrix {
    assert!((1..=32).contains(&dim_qubits), "dim_qubits must be in 1..=32");
    let d = dim_qubits;
    let mask = low_mask(2 * d);
    let mut pairs: Vec<(u64, u64)> = Vec::with_capacity(d);
    let project = |u: u64, pairs: &[(u64, u64)]| {
        let mut out = u;
        for &(v, w) in pairs {
            if word_symplectic_product(u, w, d) == 1 {
                out ^= v;
            }
            if word_symplectic_product(u, v, d) == 1 {
                out ^= w;
            }
        }
        out
    };
    for _ in 0..d {
        let v = loop {
            let cand = project(rng.random::<u64>() & mask, &pairs);
            if cand != 0 {
                break cand;
            }
        };
        let w = loop {
            let cand = project(rng.random::<u64>() & mask, &pairs);
            if word_symplectic_product(v, cand, d) == 1 {
                break cand;
            }
        };
        pairs.push((v, w));
    }
    let mut rows = vec![0u64; 2 * d];
    for (i, (v, w)) in pairs.into_iter().enumerate() {
        rows[i] = v;
        rows[d + i] = w;
    }
    BinarySymplecticMatrix { dim_qubits: d, matrix: BitMatrix::from_rows(rows, 2 * d) }
}

/// The six elements of `Sp(2, GF(2))`, ordered lexicographically by the
/// two-bit codes of `(image of Z, image of X)`; index 0 is the identity.
pub fn single_qubit_symplectics() -> Vec<BinarySymplecticMatrix> {
    let mut out = Vec::with_capacity(6);
    for zi in 1u64..4 {
        for xi in 1u64..4 {
            if zi != xi {
                out.push(BinarySymplecticMatrix { dim_qubits: 1, matrix: BitMatrix::from_rows(vec![zi, xi], 2) });
            }
        }
    }
    out
}

/// Whether ancilla `j` of a stabilizer code is a plain `|0>` ancilla or half of
/// a pre-shared entangled pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AncillaKind {
    Ancilla,
    Ebit,
}

impl AncillaKind {
    pub fn letter(self) -> char {
        match self {
            AncillaKind::Ancilla => 'a',
            AncillaKind::Ebit => 'e',
        }
    }

    pub fn from_letter(c: &str) -> Option<Self> {
        match c {
            "a" => Some(AncillaKind::Ancilla),
            "e" => Some(AncillaKind::Ebit),
            _ => None,
        }
    }
}

/// How a decimal row maps onto matrix columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BitOrder {
    /// The most significant bit is column 0.
    MsbFirst,
    LsbFirst,
}

/// Seed transformation of an `[n, k, m]` quantum convolutional code.
///
/// The matrix acts on `n + m` qubits. Input qubits (rows) are ordered
/// `[memory(m), logical(k), ancilla(n-k)]`; output qubits (columns) are ordered
/// `[memory(m), physical(n)]`. One encoder step is therefore
/// `(M_{t-1} : L_t : S_t) U = (M_t : P_t)` in qubit order, each role block
/// occupying the same qubit range in both the Z and the X half.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedTransform {
    n: usize,
    k: usize,
    m: usize,
    matrix: BinarySymplecticMatrix,
    ancilla_kinds: Vec<AncillaKind>,
    bit_order: BitOrder,
}

impl fmt::Debug for SeedTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeedTransform")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("m", &self.m)
            .field("ancilla_kinds", &self.ancilla_kinds)
            .field("decimals", &self.to_decimals())
            .finish()
    }
}

impl SeedTransform {
    pub fn new(
        matrix: BinarySymplecticMatrix,
        n: usize,
        k: usize,
        m: usize,
        ancilla_kinds: Vec<AncillaKind>,
    ) -> Result<Self> {
        if k >= n {
            return Err(Error::InvalidInput(format!("need k < n, got k={k}, n={n}")));
        }
        if m == 0 {
            return Err(Error::InvalidInput("need m >= 1".into()));
        }
        if matrix.dim_qubits() != n + m {
            return Err(Error::Dimension(format!(
                "seed matrix acts on {} qubits, expected n+m = {}",
                matrix.dim_qubits(),
                n + m
            )));
        }
        if ancilla_kinds.len() != n - k {
            return Err(Error::LengthMismatch { expected: n - k, actual: ancilla_kinds.len() });
        }
        // 3 * (n + m) bits of step tables have to stay addressable.
        if n + m > 10 {
            return Err(Error::InvalidInput(format!("n + m = {} exceeds the supported 10 qubits", n + m)));
        }
        Ok(SeedTransform { n, k, m, matrix, ancilla_kinds, bit_order: BitOrder::MsbFirst })
    }

    /// Decodes the decimal row representation, trying MSB-first and falling
    /// back to LSB-first when only that reading is symplectic.
    pub fn from_decimals(
        decimals: &[u64],
        n: usize,
        k: usize,
        m: usize,
        ancilla_kinds: Vec<AncillaKind>,
    ) -> Result<Self> {
        let side = 2 * (n + m);
        if side > 64 {
            return Err(Error::Dimension(format!("{side} columns exceed the 64-column limit")));
        }
        if decimals.len() != side {
            return Err(Error::SeedRowCount { expected: side, actual: decimals.len() });
        }
        for (row, &value) in decimals.iter().enumerate() {
            if side < 64 && value >> side != 0 {
                return Err(Error::SeedValueRange { row, value, bits: side });
            }
        }
        let msb = decode_rows(decimals, side, BitOrder::MsbFirst);
        let (matrix, order) = match BinarySymplecticMatrix::new(msb) {
            Ok(mat) => (mat, BitOrder::MsbFirst),
            Err(msb_err) => match BinarySymplecticMatrix::new(decode_rows(decimals, side, BitOrder::LsbFirst)) {
                Ok(mat) => (mat, BitOrder::LsbFirst),
                Err(_) => return Err(msb_err),
            },
        };
        let mut seed = Self::new(matrix, n, k, m, ancilla_kinds)?;
        seed.bit_order = order;
        Ok(seed)
    }

    pub fn to_decimals(&self) -> Vec<u64> {
        let side = 2 * (self.n + self.m);
        self.matrix
            .matrix()
            .rows()
            .iter()
            .map(|&r| match self.bit_order {
                BitOrder::MsbFirst => reverse_bits(r, side),
                BitOrder::LsbFirst => r,
            })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn matrix(&self) -> &BinarySymplecticMatrix {
        &self.matrix
    }
    pub fn ancilla_kinds(&self) -> &[AncillaKind] {
        &self.ancilla_kinds
    }
    pub fn bit_order(&self) -> BitOrder {
        self.bit_order
    }

    pub fn with_ancilla_kinds(&self, kinds: Vec<AncillaKind>) -> Result<Self> {
        if kinds.len() != self.n - self.k {
            return Err(Error::LengthMismatch { expected: self.n - self.k, actual: kinds.len() });
        }
        Ok(SeedTransform { ancilla_kinds: kinds, ..self.clone() })
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn total_qubits(&self) -> usize {
        self.n + self.m
    }

    /// Matrix column indices (both halves) of the physical output qubits.
    pub fn physical_columns(&self) -> Vec<usize> {
        let d = self.total_qubits();
        let q: Vec<usize> = (self.m..d).collect();
        q.iter().copied().chain(q.iter().map(|i| i + d)).collect()
    }

    /// Matrix column indices (both halves) of the memory output qubits.
    pub fn memory_columns(&self) -> Vec<usize> {
        let d = self.total_qubits();
        (0..self.m).chain(d..d + self.m).collect()
    }

    /// Columns of `U` acting on the physical outputs: `2(n+m) x 2n`.
    pub fn u_p(&self) -> BitMatrix {
        let rows: Vec<usize> = (0..2 * self.total_qubits()).collect();
        self.matrix.matrix().submatrix(&rows, &self.physical_columns())
    }

    /// Columns of `U` acting on the memory outputs: `2(n+m) x 2m`.
    pub fn u_m(&self) -> BitMatrix {
        let rows: Vec<usize> = (0..2 * self.total_qubits()).collect();
        self.matrix.matrix().submatrix(&rows, &self.memory_columns())
    }

    /// GF(2) rank of the block mapping the (logical, ancilla) inputs onto the
    /// physical outputs. Full rank `2n` means a channel error can be tracked
    /// forward from a known memory state one step at a time.
    pub fn ls_to_physical_rank(&self) -> usize {
        let d = self.total_qubits();
        let ls: Vec<usize> = (self.m..d).chain(d + self.m..2 * d).collect();
        self.matrix.matrix().submatrix(&ls, &self.physical_columns()).rank()
    }
}

fn reverse_bits(value: u64, width: usize) -> u64 {
    value.reverse_bits() >> (64 - width)
}

fn decode_rows(decimals: &[u64], side: usize, order: BitOrder) -> BitMatrix {
    let rows = decimals
        .iter()
        .map(|&v| match order {
            BitOrder::MsbFirst => reverse_bits(v, side),
            BitOrder::LsbFirst => v,
        })
        .collect();
    BitMatrix::from_rows(rows, side)
}

/// Convenience wrapper matching the registry record layout.
pub fn decode_seed_decimals(
    decimals: &[u64],
    n: usize,
    k: usize,
    m: usize,
    ancilla_kinds: Vec<AncillaKind>,
) -> Result<SeedTransform> {
    SeedTransform::from_decimals(decimals, n, k, m, ancilla_kinds)
}

/// Row decimals of the optimized entanglement-assisted inner code.
pub const OPT_INNER_DECIMALS: [u64; 12] = [4091, 3736, 2097, 1336, 1601, 279, 3093, 502, 1792, 3020, 226, 1100];

/// Row decimals of the optimized unassisted outer code.
pub const OPT_OUTER_DECIMALS: [u64; 12] = [1048, 3872, 3485, 2054, 983, 3164, 3145, 1824, 987, 3282, 2505, 1984];
