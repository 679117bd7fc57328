//! Validation reports shared by the classical and quantum models.

use std::fmt;

use crate::error::{Error, Result};

/// One numeric problem found by validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Entry of `T_symbol` outside `[0, 1]`.
    EntryRange {
        symbol: u8,
        row: usize,
        col: usize,
        value: f64,
    },
    /// Column of `T_0 + T_1` not summing to one.
    ColumnSum { col: usize, sum: f64 },
    /// Entry of `p0` outside `[0, 1]`.
    InitialEntry { index: usize, value: f64 },
    InitialSum { sum: f64 },
    /// Max-abs deviation of the Kraus completeness sum from the identity.
    Completeness { deviation: f64 },
    NotHermitian { deviation: f64 },
    Trace { trace: f64 },
    NegativeEigenvalue { value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EntryRange {
                symbol,
                row,
                col,
                value,
            } => write!(f, "t{symbol}[{row}][{col}] = {value} is outside [0, 1]"),
            Violation::ColumnSum { col, sum } => {
                write!(f, "column {col} of t0 + t1 sums to {sum}, expected 1")
            }
            Violation::InitialEntry { index, value } => {
                write!(f, "p0[{index}] = {value} is outside [0, 1]")
            }
            Violation::InitialSum { sum } => write!(f, "p0 sums to {sum}, expected 1"),
            Violation::Completeness { deviation } => write!(
                f,
                "Kraus completeness: sum of K^dagger K deviates from identity by {deviation:e}"
            ),
            Violation::NotHermitian { deviation } => {
                write!(f, "rho0 is not Hermitian (deviation {deviation:e})")
            }
            Violation::Trace { trace } => write!(f, "rho0 has trace {trace}, expected 1"),
            Violation::NegativeEigenvalue { value } => {
                write!(f, "rho0 has negative eigenvalue {value:e}")
            }
        }
    }
}

/// Result of validating a model; empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidModel(self.to_string()))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, v) in self.violations.iter().enumerate() {
            if n > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
