//! Phaseless Pauli algebra: symbols, bit-packed operator strings, syndromes.
//!
//! Operators are stored as a pair of bit vectors (x-part, z-part) so that
//! multiplication and syndrome extraction reduce to word-wide XOR/AND plus
//! popcount. Phases are dropped throughout; decoding only ever needs the
//! projective Pauli group.

use std::fmt;

use crate::QbpError;

/// Single-qubit Pauli operator, phase ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(u8)]
pub enum Pauli {
    #[default]
    I = 0b00,
    X = 0b01,
    Z = 0b10,
    Y = 0b11,
}

impl Pauli {
    /// All non-identity symbols in hard-decision tie-break order.
    pub const XYZ: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    #[inline]
    pub fn x_bit(self) -> u64 {
        (self as u8 & 0b01) as u64
    }

    #[inline]
    pub fn z_bit(self) -> u64 {
        ((self as u8 & 0b10) >> 1) as u64
    }

    #[inline]
    pub fn from_bits(x: u64, z: u64) -> Pauli {
        match ((z & 1) << 1) | (x & 1) {
            0b00 => Pauli::I,
            0b01 => Pauli::X,
            0b10 => Pauli::Z,
            _ => Pauli::Y,
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// 1 iff `a` and `b` anticommute, i.e. they are distinct non-identity symbols.
///
/// This is the symplectic (trace) inner product of the two symbols.
#[inline]
pub fn commute(a: Pauli, b: Pauli) -> u8 {
    ((a.x_bit() & b.z_bit()) ^ (a.z_bit() & b.x_bit())) as u8
}

/// Phaseless single-symbol product: X*Z = Y and so on; every symbol is
/// self-inverse.
#[inline]
pub fn mul_symbol(a: Pauli, b: Pauli) -> Pauli {
    Pauli::from_bits(a.x_bit() ^ b.x_bit(), a.z_bit() ^ b.z_bit())
}

/// Length-N Pauli operator, bit-packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliVector {
    len: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliVector {
    pub fn identity(len: usize) -> PauliVector {
        let words = len.div_ceil(64);
        PauliVector {
            len,
            x: vec![0; words],
            z: vec![0; words],
        }
    }

    /// Parse from a string of `I`/`X`/`Y`/`Z` characters.
    pub fn parse(s: &str) -> Result<PauliVector, QbpError> {
        let mut v = PauliVector::identity(s.chars().count());
        for (j, c) in s.chars().enumerate() {
            let p = Pauli::from_char(c)
                .ok_or_else(|| QbpError::Parse(format!("unknown Pauli symbol '{c}'")))?;
            v.set(j, p);
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, j: usize) -> Pauli {
        debug_assert!(j < self.len);
        let (w, b) = (j / 64, j % 64);
        Pauli::from_bits(self.x[w] >> b, self.z[w] >> b)
    }

    #[inline]
    pub fn set(&mut self, j: usize, p: Pauli) {
        debug_assert!(j < self.len);
        let (w, b) = (j / 64, j % 64);
        self.x[w] = (self.x[w] & !(1 << b)) | (p.x_bit() << b);
        self.z[w] = (self.z[w] & !(1 << b)) | (p.z_bit() << b);
    }

    /// Number of non-identity entries.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Elementwise phaseless product. Errors on length mismatch.
    pub fn mul(&self, other: &PauliVector) -> Result<PauliVector, QbpError> {
        if self.len != other.len {
            return Err(QbpError::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        let mut out = self.clone();
        for (w, o) in out.x.iter_mut().zip(&other.x) {
            *w ^= o;
        }
        for (w, o) in out.z.iter_mut().zip(&other.z) {
            *w ^= o;
        }
        Ok(out)
    }

    /// 1 iff `self` and `other` anticommute as full operators.
    pub fn commutation(&self, other: &PauliVector) -> u8 {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for i in 0..self.x.len() {
            acc ^= (self.x[i] & other.z[i]).count_ones() ^ (self.z[i] & other.x[i]).count_ones();
        }
        (acc & 1) as u8
    }

    pub fn iter(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.len).map(|j| self.get(j))
    }

    pub(crate) fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub(crate) fn z_words(&self) -> &[u64] {
        &self.z
    }
}

impl fmt::Debug for PauliVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.iter() {
            write!(f, "{}", p.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Display for PauliVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Measurement outcome bits, one per check.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Syndrome {
    pub bits: Vec<u8>,
}

impl Syndrome {
    pub fn zeros(m: usize) -> Syndrome {
        Syndrome { bits: vec![0; m] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }
}

impl fmt::Debug for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.bits.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "]")
    }
}

impl From<Vec<u8>> for Syndrome {
    fn from(bits: Vec<u8>) -> Syndrome {
        Syndrome { bits }
    }
}
