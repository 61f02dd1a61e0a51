use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Measurement outcome over physical qubits. Character `q` of the string form
/// is the bit of qubit `q`; as an integer, qubit 0 is the least significant bit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Outcome {
    bits: Vec<bool>,
}

impl Outcome {
    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn from_index(index: u64, n: usize) -> Self {
        Self {
            bits: (0..n).map(|q| q < 64 && (index >> q) & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, q: usize) -> bool {
        self.bits[q]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Basis index; only defined for at most 64 qubits.
    pub fn index(&self) -> Result<u64> {
        if self.bits.len() > 64 {
            return invalid(format!("outcome of {} bits has no u64 index", self.bits.len()));
        }
        Ok(self
            .bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (q, &b)| acc | ((b as u64) << q)))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => invalid(format!("outcome character {other:?} is not a bit")),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bits })
    }
}

impl TryFrom<String> for Outcome {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Outcome> for String {
    fn from(o: Outcome) -> String {
        o.to_string()
    }
}
