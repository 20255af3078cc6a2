//! Sharp ±1 value assignments for the Mermin–Peres square.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::{Label, MERMIN_ROWS, MERMIN_TARGETS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MerminError {
    #[error("value for {0} must be +1 or -1, got {1}")]
    NotSign(Label, i8),
    #[error("label {label} occurs {count} times across the rows, expected 2")]
    Occurrence { label: Label, count: usize },
}

/// One ±1 value per observable of the square, indexed by [`Label::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MerminAssignment([i8; 9]);

impl MerminAssignment {
    pub fn new(values: [i8; 9]) -> Result<Self, MerminError> {
        for (label, &v) in Label::ALL.iter().zip(&values) {
            if v != 1 && v != -1 {
                return Err(MerminError::NotSign(*label, v));
            }
        }
        Ok(Self(values))
    }

    pub fn all_plus() -> Self {
        Self([1; 9])
    }

    /// Bit `k` set means label `k` takes −1.
    pub fn from_bits(bits: u16) -> Self {
        let mut values = [1i8; 9];
        for (k, v) in values.iter_mut().enumerate() {
            if bits >> k & 1 == 1 {
                *v = -1;
            }
        }
        Self(values)
    }

    pub fn get(&self, label: Label) -> i8 {
        self.0[label.index()]
    }

    pub fn with(mut self, label: Label, value: i8) -> Result<Self, MerminError> {
        if value != 1 && value != -1 {
            return Err(MerminError::NotSign(label, value));
        }
        self.0[label.index()] = value;
        Ok(self)
    }

    pub fn values(&self) -> [i8; 9] {
        self.0
    }
}

/// Row products in equation order.
pub fn evaluate_rows(a: &MerminAssignment) -> [i8; 6] {
    MERMIN_ROWS.map(|row| row.iter().map(|&l| a.get(l)).product())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub targets: [i8; 6],
    pub count: usize,
    pub satisfiers: Vec<MerminAssignment>,
}

/// Scans all 512 assignments for those whose row products equal `targets`.
pub fn exhaustive_search(targets: [i8; 6]) -> SearchResult {
    let satisfiers: Vec<_> = (0u16..512)
        .map(MerminAssignment::from_bits)
        .filter(|a| evaluate_rows(a) == targets)
        .collect();
    SearchResult {
        targets,
        count: satisfiers.len(),
        satisfiers,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityCertificate {
    /// Occurrences of each label across the six rows.
    pub occurrences: [usize; 9],
    /// Product of all left-hand sides for any assignment.
    pub lhs_product: i8,
    pub rhs_product: i8,
}

/// Every label appears in exactly two rows, so the product of all six left
/// sides is `v² · … = +1` regardless of the assignment, while the right
/// sides multiply to −1.
pub fn parity_certificate() -> Result<ParityCertificate, MerminError> {
    let mut occurrences = [0usize; 9];
    for row in &MERMIN_ROWS {
        for l in row {
            occurrences[l.index()] += 1;
        }
    }
    for (label, &count) in Label::ALL.iter().zip(&occurrences) {
        if count != 2 {
            return Err(MerminError::Occurrence { label: *label, count });
        }
    }
    Ok(ParityCertificate {
        occurrences,
        lhs_product: 1,
        rhs_product: MERMIN_TARGETS.iter().product(),
    })
}
