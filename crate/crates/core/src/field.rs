//! Prime-field arithmetic and vectors over F_q.
//!
//! Vectors over F_2 are bit-packed into `u64` words so that addition is a
//! word-wide XOR; other fields store one `u16` residue per entry.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported modulus bound (exclusive of 2^16 itself, which is not prime).
pub const MAX_MODULUS: u64 = 1 << 16;

/// The prime field F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    pub const BINARY: PrimeField = PrimeField { q: 2 };

    /// Validates that `q` is a prime not larger than 2^16.
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_MODULUS {
            return Err(Error::ModulusTooLarge(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q: q as u32 })
    }

    #[inline]
    pub fn q(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn is_binary(self) -> bool {
        self.q == 2
    }

    /// Number of bits needed to store one residue.
    pub fn bits(self) -> u32 {
        32 - (self.q - 1).leading_zeros()
    }

    pub fn check(self, a: u64) -> Result<u32> {
        if a < self.q as u64 {
            Ok(a as u32)
        } else {
            Err(Error::NotCanonical {
                value: a,
                q: self.q,
            })
        }
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(self, a: u32) -> Result<u32> {
        if a % self.q == 0 {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn pow(self, mut a: u32, mut e: u32) -> u32 {
        let mut acc = 1 % self.q;
        a %= self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Canonical residue of a signed integer.
    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.q as i64) as u32
    }

    pub fn random_element<R: Rng + ?Sized>(self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.q)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(self, rng: &mut R) -> u32 {
        rng.gen_range(1..self.q)
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Data {
    Bits(Vec<u64>),
    Dense(Vec<u16>),
}

/// A vector over F_q. Unused high bits of the last packed word are always zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldVector {
    field: PrimeField,
    len: usize,
    data: Data,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl FieldVector {
    pub fn zeros(field: PrimeField, len: usize) -> Self {
        let data = if field.is_binary() {
            Data::Bits(vec![0; words_for(len)])
        } else {
            Data::Dense(vec![0; len])
        };
        FieldVector { field, len, data }
    }

    pub fn from_residues(field: PrimeField, values: &[u32]) -> Result<Self> {
        let mut v = Self::zeros(field, values.len());
        for (i, &x) in values.iter().enumerate() {
            v.set(i, field.check(x as u64)?);
        }
        Ok(v)
    }

    /// The `i`-th standard basis vector (0-based).
    pub fn unit(field: PrimeField, len: usize, i: usize) -> Self {
        let mut v = Self::zeros(field, len);
        v.set(i, 1);
        v
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(field, len);
        match &mut v.data {
            Data::Bits(w) => {
                for x in w.iter_mut() {
                    *x = rng.gen();
                }
                v.clear_tail();
            }
            Data::Dense(d) => {
                for x in d.iter_mut() {
                    *x = field.random_element(rng) as u16;
                }
            }
        }
        v
    }

    pub fn random_nonzero<R: Rng + ?Sized>(field: PrimeField, len: usize, rng: &mut R) -> Self {
        assert!(len > 0, "no nonzero vector of length 0");
        loop {
            let v = Self::random(field, len, rng);
            if !v.is_zero() {
                return v;
            }
        }
    }

    /// Uniform vector of exact weight `w`.
    pub fn random_of_weight<R: Rng + ?Sized>(
        field: PrimeField,
        len: usize,
        w: usize,
        rng: &mut R,
    ) -> Self {
        let mut v = Self::zeros(field, len);
        for i in rand::seq::index::sample(rng, len, w) {
            v.set(i, field.random_nonzero(rng));
        }
        v
    }

    fn clear_tail(&mut self) {
        if let Data::Bits(w) = &mut self.data {
            let rem = self.len % 64;
            if rem != 0 {
                if let Some(last) = w.last_mut() {
                    *last &= (1u64 << rem) - 1;
                }
            }
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed words when the field is F_2.
    pub fn words(&self) -> Option<&[u64]> {
        match &self.data {
            Data::Bits(w) => Some(w),
            Data::Dense(_) => None,
        }
    }

    /// Raw residues when the field is not F_2.
    pub fn dense(&self) -> Option<&[u16]> {
        match &self.data {
            Data::Dense(d) => Some(d),
            Data::Bits(_) => None,
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> u32 {
        debug_assert!(i < self.len, "index {i} out of range {}", self.len);
        match &self.data {
            Data::Bits(w) => ((w[i / 64] >> (i % 64)) & 1) as u32,
            Data::Dense(d) => d[i] as u32,
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, x: u32) {
        debug_assert!(i < self.len, "index {i} out of range {}", self.len);
        debug_assert!(x < self.field.q);
        match &mut self.data {
            Data::Bits(w) => {
                let bit = 1u64 << (i % 64);
                if x & 1 == 1 {
                    w[i / 64] |= bit;
                } else {
                    w[i / 64] &= !bit;
                }
            }
            Data::Dense(d) => d[i] = x as u16,
        }
    }

    pub fn to_residues(&self) -> Vec<u32> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn weight(&self) -> usize {
        match &self.data {
            Data::Bits(w) => w.iter().map(|x| x.count_ones() as usize).sum(),
            Data::Dense(d) => d.iter().filter(|&&x| x != 0).count(),
        }
    }

    /// 0-based positions of the nonzero entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        match &self.data {
            Data::Bits(w) => {
                let mut out = Vec::new();
                for (wi, &word) in w.iter().enumerate() {
                    let mut x = word;
                    while x != 0 {
                        out.push(wi * 64 + x.trailing_zeros() as usize);
                        x &= x - 1;
                    }
                }
                out
            }
            Data::Dense(d) => (0..d.len()).filter(|&i| d[i] != 0).collect(),
        }
    }

    /// Weight and 1-based support, as used in external interfaces.
    pub fn weight_support(&self) -> (usize, Vec<usize>) {
        let s: Vec<usize> = self.support().into_iter().map(|i| i + 1).collect();
        (s.len(), s)
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Data::Bits(w) => w.iter().all(|&x| x == 0),
            Data::Dense(d) => d.iter().all(|&x| x == 0),
        }
    }

    fn same_shape(&self, other: &Self) {
        assert_eq!(self.field, other.field, "vectors over different fields");
        assert_eq!(self.len, other.len, "vector length mismatch");
    }

    /// `self += other`.
    pub fn add_assign(&mut self, other: &Self) {
        self.same_shape(other);
        let f = self.field;
        match (&mut self.data, &other.data) {
            (Data::Bits(a), Data::Bits(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x ^= y),
            (Data::Dense(a), Data::Dense(b)) => a
                .iter_mut()
                .zip(b)
                .for_each(|(x, &y)| *x = f.add(*x as u32, y as u32) as u16),
            _ => unreachable!(),
        }
    }

    /// `self -= other`.
    pub fn sub_assign(&mut self, other: &Self) {
        self.same_shape(other);
        let f = self.field;
        match (&mut self.data, &other.data) {
            (Data::Bits(a), Data::Bits(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x ^= y),
            (Data::Dense(a), Data::Dense(b)) => a
                .iter_mut()
                .zip(b)
                .for_each(|(x, &y)| *x = f.sub(*x as u32, y as u32) as u16),
            _ => unreachable!(),
        }
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: u32, other: &Self) {
        self.same_shape(other);
        if c == 0 {
            return;
        }
        let f = self.field;
        match (&mut self.data, &other.data) {
            (Data::Bits(a), Data::Bits(b)) => a.iter_mut().zip(b).for_each(|(x, y)| *x ^= y),
            (Data::Dense(a), Data::Dense(b)) => {
                let q = f.q as u64;
                let c = c as u64;
                a.iter_mut()
                    .zip(b)
                    .for_each(|(x, &y)| *x = ((*x as u64 + c * y as u64) % q) as u16)
            }
            _ => unreachable!(),
        }
    }

    pub fn scale(&mut self, c: u32) {
        let f = self.field;
        match &mut self.data {
            Data::Bits(w) => {
                if c == 0 {
                    w.iter_mut().for_each(|x| *x = 0)
                }
            }
            Data::Dense(d) => d.iter_mut().for_each(|x| *x = f.mul(*x as u32, c) as u16),
        }
    }

    pub fn negate(&mut self) {
        let f = self.field;
        if let Data::Dense(d) = &mut self.data {
            d.iter_mut().for_each(|x| *x = f.neg(*x as u32) as u16);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign(other);
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.negate();
        out
    }

    pub fn dot(&self, other: &Self) -> u32 {
        self.same_shape(other);
        match (&self.data, &other.data) {
            (Data::Bits(a), Data::Bits(b)) => {
                let ones: u32 = a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum();
                ones & 1
            }
            (Data::Dense(a), Data::Dense(b)) => {
                let q = self.field.q as u64;
                let mut acc = 0u64;
                for (&x, &y) in a.iter().zip(b) {
                    acc += x as u64 * y as u64;
                    if acc >= 1 << 62 {
                        acc %= q;
                    }
                }
                (acc % q) as u32
            }
            _ => unreachable!(),
        }
    }

    /// Entries `start..end` as a new vector.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        assert!(
            start <= end && end <= self.len,
            "slice {start}..{end} out of range"
        );
        match &self.data {
            Data::Dense(d) => FieldVector {
                field: self.field,
                len: end - start,
                data: Data::Dense(d[start..end].to_vec()),
            },
            Data::Bits(_) => {
                let mut out = Self::zeros(self.field, end - start);
                for i in start..end {
                    if self.get(i) != 0 {
                        out.set(i - start, 1);
                    }
                }
                out
            }
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        assert_eq!(self.field, other.field, "vectors over different fields");
        let mut out = Self::zeros(self.field, self.len + other.len);
        for i in self.support() {
            out.set(i, self.get(i));
        }
        for i in other.support() {
            out.set(self.len + i, other.get(i));
        }
        out
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", self.get(i))?;
        }
        Ok(())
    }
}
