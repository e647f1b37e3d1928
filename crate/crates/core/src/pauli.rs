//! Weighted sums of Pauli strings.
//!
//! Qubit `i` corresponds to bit `i` of a computational-basis index, so the
//! dense matrix of a string is `P_{n-1} ⊗ ... ⊗ P_1 ⊗ P_0`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64, I, ONE};

/// Hard cap on the number of qubits for dense realizations (2^10 x 2^10).
pub const MAX_DENSE_QUBITS: usize = 10;

/// Largest addressable qubit index plus one.
pub const MAX_QUBITS: usize = 64;

/// Merged coefficients below this magnitude are dropped.
pub const MERGE_TOLERANCE: f64 = 1e-14;

/// Imaginary residue allowed in a merged coefficient of H^2.
pub const SQUARE_IMAG_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn code(self) -> u8 {
        match self {
            Axis::X => 1,
            Axis::Y => 2,
            Axis::Z => 3,
        }
    }

    fn from_bits(x: bool, z: bool) -> Option<Axis> {
        match (x, z) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        })
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            other => Err(format!("unknown Pauli axis '{other}'")),
        }
    }
}

/// A power of `i`: the phase picked up when multiplying Pauli strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    fn times(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn to_complex(self) -> C64 {
        match self.0 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        }
    }
}

/// Single-qubit product `a * b` (None is the identity).
fn multiply_single(a: Option<Axis>, b: Option<Axis>) -> (Phase, Option<Axis>) {
    use Axis::*;
    match (a, b) {
        (None, p) | (p, None) => (Phase::ONE, p),
        (Some(p), Some(q)) if p == q => (Phase::ONE, None),
        (Some(X), Some(Y)) => (Phase::I, Some(Z)),
        (Some(Y), Some(Z)) => (Phase::I, Some(X)),
        (Some(Z), Some(X)) => (Phase::I, Some(Y)),
        (Some(Y), Some(X)) => (Phase::MINUS_I, Some(Z)),
        (Some(Z), Some(Y)) => (Phase::MINUS_I, Some(X)),
        (Some(X), Some(Z)) => (Phase::MINUS_I, Some(Y)),
        _ => unreachable!(),
    }
}

/// Tensor product of single-qubit Paulis, stored as X/Z bit masks
/// (Y sets both bits).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    x: u64,
    z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    /// Builds a string from (qubit, axis) factors; rejects repeated qubits.
    pub fn from_factors(factors: &[(usize, Axis)]) -> Result<Self> {
        let mut s = PauliString::IDENTITY;
        for &(q, axis) in factors {
            if q >= MAX_QUBITS {
                return Err(Error::InvalidTerm(format!(
                    "qubit index {q} exceeds the maximum of {}",
                    MAX_QUBITS - 1
                )));
            }
            if s.axis(q).is_some() {
                return Err(Error::InvalidTerm(format!("qubit {q} appears twice")));
            }
            s.set(q, Some(axis));
        }
        Ok(s)
    }

    pub fn single(qubit: usize, axis: Axis) -> Self {
        let mut s = PauliString::IDENTITY;
        s.set(qubit, Some(axis));
        s
    }

    pub fn axis(&self, qubit: usize) -> Option<Axis> {
        let bit = 1u64 << qubit;
        Axis::from_bits(self.x & bit != 0, self.z & bit != 0)
    }

    fn set(&mut self, qubit: usize, axis: Option<Axis>) {
        let bit = 1u64 << qubit;
        self.x &= !bit;
        self.z &= !bit;
        if let Some(a) = axis {
            let (x, z) = a.bits();
            if x {
                self.x |= bit;
            }
            if z {
                self.z |= bit;
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Factors in ascending qubit order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, Axis)> + '_ {
        let support = self.x | self.z;
        (0..MAX_QUBITS)
            .filter(move |q| support & (1u64 << q) != 0)
            .map(move |q| (q, self.axis(q).unwrap()))
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    /// Smallest qubit count that can host this string.
    pub fn min_qubits(&self) -> usize {
        MAX_QUBITS - (self.x | self.z).leading_zeros() as usize
    }

    /// Product `self * other`, applying the single-qubit rules factor by factor.
    pub fn multiply(&self, other: &PauliString) -> (Phase, PauliString) {
        let support = self.x | self.z | other.x | other.z;
        let mut phase = Phase::ONE;
        let mut out = PauliString::IDENTITY;
        for q in (0..MAX_QUBITS).filter(|q| support & (1u64 << q) != 0) {
            let (p, axis) = multiply_single(self.axis(q), other.axis(q));
            phase = phase.times(p);
            out.set(q, axis);
        }
        (phase, out)
    }

    /// Action on a basis state: `P|b> = phase * |b'>`.
    #[inline]
    pub fn apply(&self, basis: usize) -> (usize, C64) {
        let b = basis as u64;
        // Y = i X Z on each qubit carrying both bits.
        let y_count = (self.x & self.z).count_ones();
        let sign_flips = (b & self.z).count_ones();
        let phase = Phase(((y_count + 2 * sign_flips) % 4) as u8);
        ((b ^ self.x) as usize, phase.to_complex())
    }

    pub(crate) fn flip_mask(&self) -> usize {
        self.x as usize
    }

    /// Dense realization on `num_qubits` qubits.
    pub fn to_matrix(&self, num_qubits: usize) -> Result<Matrix> {
        check_dense(num_qubits)?;
        let dim = 1usize << num_qubits;
        let mut m = Matrix::zeros(dim);
        for b in 0..dim {
            let (row, ph) = self.apply(b);
            m[(row, b)] += ph;
        }
        Ok(m)
    }

    fn sort_key(&self) -> (Vec<usize>, Vec<u8>) {
        self.factors().map(|(q, a)| (q, a.code())).unzip()
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (q, a) in self.factors() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{a}{q}")?;
            first = false;
        }
        Ok(())
    }
}

fn check_dense(num_qubits: usize) -> Result<()> {
    if num_qubits > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { qubits: num_qubits, cap: MAX_DENSE_QUBITS });
    }
    Ok(())
}

/// Real coefficient times a Pauli string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: f64, factors: &[(usize, Axis)]) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::InvalidTerm(format!("non-finite coefficient {coefficient}")));
        }
        Ok(Self { coefficient, string: PauliString::from_factors(factors)? })
    }

    pub fn identity(coefficient: f64) -> Self {
        Self { coefficient, string: PauliString::IDENTITY }
    }
}

/// Product of two terms; the coefficient carries the phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasedTerm {
    pub coefficient: C64,
    pub string: PauliString,
}

pub fn multiply_terms(a: &PauliTerm, b: &PauliTerm) -> PhasedTerm {
    let (phase, string) = a.string.multiply(&b.string);
    PhasedTerm { coefficient: phase.to_complex() * (a.coefficient * b.coefficient), string }
}

/// Canonical weighted sum of Pauli strings on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian {
    num_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliHamiltonian {
    /// Merges duplicate strings, drops near-zero sums, and sorts canonically.
    pub fn new(num_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::InvalidTerm(format!(
                "qubit count {num_qubits} outside 1..={MAX_QUBITS}"
            )));
        }
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for t in terms {
            if !t.coefficient.is_finite() {
                return Err(Error::InvalidTerm(format!("non-finite coefficient {}", t.coefficient)));
            }
            if t.string.min_qubits() > num_qubits {
                return Err(Error::InvalidTerm(format!(
                    "term '{}' does not fit on {num_qubits} qubits",
                    t.string
                )));
            }
            *merged.entry(t.string).or_insert(0.0) += t.coefficient;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.abs() >= MERGE_TOLERANCE)
            .map(|(string, coefficient)| PauliTerm { coefficient, string })
            .collect();
        Ok(Self { num_qubits, terms })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1usize << self.num_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(
            self.num_qubits,
            self.terms.iter().map(|t| PauliTerm { coefficient: t.coefficient * s, string: t.string }),
        )
        .expect("scaling preserves validity")
    }

    /// Sum of two Hamiltonians on the same register.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, got: other.num_qubits });
        }
        Self::new(self.num_qubits, self.terms.iter().chain(&other.terms).copied())
    }

    /// `Σ_j c_j P_j` as a dense 2^n x 2^n matrix.
    pub fn to_matrix(&self) -> Result<Matrix> {
        check_dense(self.num_qubits)?;
        let dim = self.dim();
        let mut m = Matrix::zeros(dim);
        for t in &self.terms {
            for b in 0..dim {
                let (row, ph) = t.string.apply(b);
                m[(row, b)] += ph * t.coefficient;
            }
        }
        Ok(m)
    }

    /// Symbolic expansion of H^2 = Σ_jk P_j P_k.
    pub fn square(&self) -> Result<Self> {
        let mut acc: BTreeMap<PauliString, C64> = BTreeMap::new();
        for a in &self.terms {
            for b in &self.terms {
                let p = multiply_terms(a, b);
                *acc.entry(p.string).or_insert(C64::new(0.0, 0.0)) += p.coefficient;
            }
        }
        let mut terms = Vec::with_capacity(acc.len());
        for (string, c) in acc {
            if c.im.abs() > SQUARE_IMAG_TOLERANCE {
                return Err(Error::ImaginaryResidue(c.im));
            }
            terms.push(PauliTerm { coefficient: c.re, string });
        }
        Self::new(self.num_qubits, terms)
    }

    /// Parses the line format `<coefficient> [<axis><index>]...` with `#`
    /// comments and an optional `qubits <n>` header.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut terms = Vec::new();
        let mut max_index: Option<usize> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let first = tokens.next().unwrap();
            if first == "qubits" {
                if header.is_some() {
                    return Err(err("repeated 'qubits' header".into()));
                }
                let n: usize = tokens
                    .next()
                    .ok_or_else(|| err("missing qubit count".into()))?
                    .parse()
                    .map_err(|e| err(format!("bad qubit count: {e}")))?;
                if tokens.next().is_some() {
                    return Err(err("trailing tokens after qubit count".into()));
                }
                header = Some((n, line_no));
                continue;
            }
            let coefficient: f64 =
                first.parse().map_err(|_| err(format!("bad coefficient '{first}'")))?;
            if !coefficient.is_finite() {
                return Err(err(format!("non-finite coefficient '{first}'")));
            }
            let mut factors = Vec::new();
            for tok in tokens {
                let (axis, index) = tok.split_at(tok.chars().next().map_or(0, char::len_utf8));
                let axis: Axis = match axis {
                    "X" => Axis::X,
                    "Y" => Axis::Y,
                    "Z" => Axis::Z,
                    _ => return Err(err(format!("bad factor '{tok}': axis must be X, Y or Z"))),
                };
                if index.is_empty() || !index.bytes().all(|c| c.is_ascii_digit()) {
                    return Err(err(format!("bad factor '{tok}': missing qubit index")));
                }
                let q: usize = index.parse().map_err(|_| err(format!("bad qubit index in '{tok}'")))?;
                max_index = Some(max_index.map_or(q, |m| m.max(q)));
                factors.push((q, axis));
            }
            let term = PauliTerm::new(coefficient, &factors).map_err(|e| err(e.to_string()))?;
            terms.push(term);
        }
        let inferred = max_index.map_or(1, |m| m + 1);
        let num_qubits = match header {
            Some((n, line)) => {
                if n < inferred {
                    return Err(Error::Parse {
                        line,
                        msg: format!("header declares {n} qubits but index {} is used", inferred - 1),
                    });
                }
                n
            }
            None => inferred,
        };
        Self::new(num_qubits, terms)
    }
}

impl FromStr for PauliHamiltonian {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for PauliHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.num_qubits)?;
        for t in &self.terms {
            if t.string.is_identity() {
                writeln!(f, "{:?}", t.coefficient)?;
            } else {
                writeln!(f, "{:?} {}", t.coefficient, t.string)?;
            }
        }
        Ok(())
    }
}
