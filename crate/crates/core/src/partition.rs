//! Arithmetic-progression partitions of `F_p` and the leakage map they
//! induce.
//!
//! Bucket `j` of the unscaled partition is the run `{jt, ..., jt + t - 1}`
//! of canonical residues; the last bucket stops at `p - 1` and may be
//! shorter. Scaling every bucket by a nonzero step `gamma` gives another
//! partition, and a node leaks the index of the scaled bucket holding its
//! symbol.

use crate::error::{Error, Result};
use crate::field::{ceil_div, ceil_log2, FieldElement, PrimeField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionScheme {
    field: PrimeField,
    t: u64,
    s: u64,
    gamma: u64,
    gamma_inv: u64,
}

impl PartitionScheme {
    pub fn new(field: PrimeField, t: u64, gamma: FieldElement) -> Result<Self> {
        if gamma.field() != field {
            return Err(Error::FieldMismatch(
                field.modulus(),
                gamma.field().modulus(),
            ));
        }
        Self::from_raw(field, t, gamma.value())
    }

    pub fn from_raw(field: PrimeField, t: u64, gamma: u64) -> Result<Self> {
        let p = field.modulus();
        if t == 0 || t >= p {
            return Err(Error::WidthOutOfRange { p, t });
        }
        let gamma = gamma % p;
        if gamma == 0 {
            return Err(Error::ZeroStep);
        }
        Ok(PartitionScheme {
            field,
            t,
            s: ceil_div(p, t),
            gamma,
            gamma_inv: field.inv(gamma)?,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn width(&self) -> u64 {
        self.t
    }

    pub fn bucket_count(&self) -> u64 {
        self.s
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    pub fn gamma_inv(&self) -> u64 {
        self.gamma_inv
    }

    /// Bits needed to send one bucket index, `ceil(log2 s)`.
    pub fn bits(&self) -> u32 {
        ceil_log2(self.s)
    }

    /// Index of the bucket containing `x` (the leakage function).
    #[inline]
    pub fn leak(&self, x: u64) -> u64 {
        self.field.mul(self.gamma_inv, x) / self.t
    }

    pub fn leak_elem(&self, x: FieldElement) -> u64 {
        self.leak(x.value())
    }

    pub fn bucket_size(&self, j: u64) -> Result<u64> {
        self.check_index(j)?;
        Ok(self.unscaled_range(j).count() as u64)
    }

    /// The residues `gamma * A_j`, listed in the order of `A_j`.
    pub fn bucket_members(&self, j: u64) -> Result<Vec<u64>> {
        self.check_index(j)?;
        Ok(self
            .unscaled_range(j)
            .map(|a| self.field.mul(self.gamma, a))
            .collect())
    }

    pub fn bucket_elements(&self, j: u64) -> Result<Vec<FieldElement>> {
        Ok(self
            .bucket_members(j)?
            .into_iter()
            .map(|v| self.field.elem(v))
            .collect())
    }

    #[inline]
    pub fn contains(&self, j: u64, x: u64) -> bool {
        self.leak(x) == j
    }

    fn unscaled_range(&self, j: u64) -> std::ops::Range<u64> {
        let start = j * self.t;
        start..(start + self.t).min(self.field.modulus())
    }

    fn check_index(&self, j: u64) -> Result<()> {
        if j >= self.s {
            Err(Error::IndexOutOfRange {
                index: j,
                count: self.s,
            })
        } else {
            Ok(())
        }
    }
}
