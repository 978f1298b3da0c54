//! Plain-array reference: O(1) updates, O(n) prefix sums.
//!
//! Used as the behavioral oracle in tests and as the baseline structure in
//! benchmarks. It shares no code with the forest encoding.

use crate::encoding::{Boundary, EncodingError, Mode};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveArray {
    values: Vec<i64>,
    mode: Mode,
}

impl NaiveArray {
    pub fn new(n: usize, mode: Mode) -> Self {
        NaiveArray {
            values: vec![0; n],
            mode,
        }
    }

    pub fn from_values(values: &[i64], mode: Mode) -> Result<Self, EncodingError> {
        if mode == Mode::Bit {
            for (index, &value) in values.iter().enumerate() {
                if value != 0 && value != 1 {
                    return Err(EncodingError::NotABit { index, value });
                }
            }
        }
        Ok(NaiveArray {
            values: values.to_vec(),
            mode,
        })
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn update(&mut self, j: usize, delta: i64) -> Result<(), EncodingError> {
        if j >= self.values.len() {
            return Err(EncodingError::IndexOutOfRange {
                index: j,
                size: self.values.len(),
            });
        }
        match self.mode {
            Mode::Bit => {
                if delta != 1 {
                    return Err(EncodingError::BadDelta { delta });
                }
                self.values[j] ^= 1;
            }
            Mode::Count => self.values[j] += delta,
        }
        Ok(())
    }

    pub fn prefix(&self, j: usize, boundary: Boundary) -> Result<i64, EncodingError> {
        if j >= self.values.len() {
            return Err(EncodingError::IndexOutOfRange {
                index: j,
                size: self.values.len(),
            });
        }
        let limit = match boundary {
            Boundary::Inclusive => j + 1,
            Boundary::Exclusive => j,
        };
        Ok(match self.mode {
            Mode::Bit => self.values[..limit].iter().fold(0, |acc, v| acc ^ v),
            Mode::Count => self.values[..limit].iter().sum(),
        })
    }
}
