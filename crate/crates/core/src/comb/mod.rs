//! Exact representation, validation, and enumeration of combinatorial data
//! sets: a partition of ℤ/(2d−2) into non-crossing classes together with a
//! marked subset H of homoclinic labels.
//!
//! Labels 0..2d−3 stand for the separatrix directions
//! δ_ℓ = exp(2πiℓ/(2d−2)); even labels are incoming, odd outgoing. The disk
//! model places δ_ℓ on the unit circle and spans each class by its geodesic
//! convex hull; everything here is integer arithmetic on that picture.

mod cells;
mod chains;
mod enumerate;
mod props;
mod serial;

#[cfg(test)]
mod tests;

pub use cells::{Cell, CellKind};
pub use chains::{HChain, TChain};
pub use enumerate::{enumerate_candidates, enumerate_data_sets, enumerate_structurally_stable, MAX_ENUM_DEGREE};
pub use props::{Component, CountingReport};

use thiserror::Error;

/// A separatrix label in ℤ/(2d−2), canonical representatives 0..2d−3.
pub type Label = usize;

#[derive(Debug, Error)]
pub enum CombError {
    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("classes do not partition 0..{expected}: {reason}")]
    NotAPartition { expected: usize, reason: String },
    #[error("label {0} out of range for degree {1}")]
    BadLabel(Label, usize),
    #[error("class {0:?} is homoclinic; parity changes are defined for landing classes only")]
    HomoclinicClass(Vec<Label>),
    #[error("cell with ends {0:?} matches none of the five cell types")]
    CellTypeViolation(Vec<Label>),
    #[error("data set fails validation: {0}")]
    Invalid(String),
    #[error("enumeration supported for 2 ≤ d ≤ {max}, got {d}")]
    UnsupportedDegree { d: usize, max: usize },
    #[error("malformed data set JSON: {0}")]
    Parse(String),
}

/// The combinatorial invariant (∼, H) of degree d.
///
/// Canonical form: each class sorted ascending, classes sorted by minimum
/// element, H sorted ascending. Equality of canonical forms is structural
/// equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialDataSet {
    d: usize,
    classes: Vec<Vec<Label>>,
    h: Vec<Label>,
    // derived lookups
    class_of: Vec<usize>,
    sigma: Vec<Label>,
    sigma_inv: Vec<Label>,
    in_h: Vec<bool>,
}

impl CombinatorialDataSet {
    /// Builds a structurally well-formed data set: `classes` must partition
    /// 0..2d−3 and `h` must contain only valid labels. Conditions 1–3 of
    /// validity are checked separately by [`validate`](Self::validate).
    pub fn new(
        d: usize,
        classes: Vec<Vec<Label>>,
        h: Vec<Label>,
    ) -> Result<Self, CombError> {
        if d < 2 {
            return Err(CombError::DegreeTooSmall(d));
        }
        let n = 2 * d - 2;
        let mut seen = vec![false; n];
        let mut canon: Vec<Vec<Label>> = Vec::with_capacity(classes.len());
        for mut class in classes {
            if class.is_empty() {
                return Err(CombError::NotAPartition {
                    expected: n - 1,
                    reason: "empty class".into(),
                });
            }
            class.sort_unstable();
            for &l in &class {
                if l >= n {
                    return Err(CombError::BadLabel(l, d));
                }
                if seen[l] {
                    return Err(CombError::NotAPartition {
                        expected: n - 1,
                        reason: format!("label {l} appears twice"),
                    });
                }
                seen[l] = true;
            }
            canon.push(class);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(CombError::NotAPartition {
                expected: n - 1,
                reason: format!("label {missing} missing"),
            });
        }
        canon.sort_by_key(|c| c[0]);

        let mut h = h;
        h.sort_unstable();
        h.dedup();
        let mut in_h = vec![false; n];
        for &l in &h {
            if l >= n {
                return Err(CombError::BadLabel(l, d));
            }
            in_h[l] = true;
        }

        let mut class_of = vec![0usize; n];
        for (i, c) in canon.iter().enumerate() {
            for &l in c {
                class_of[l] = i;
            }
        }
        let mut sigma = vec![0 as Label; n];
        let mut sigma_inv = vec![0 as Label; n];
        for c in &canon {
            for (i, &l) in c.iter().enumerate() {
                let next = c[(i + 1) % c.len()];
                sigma[l] = next;
                sigma_inv[next] = l;
            }
        }
        Ok(CombinatorialDataSet {
            d,
            classes: canon,
            h,
            class_of,
            sigma,
            sigma_inv,
            in_h,
        })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    /// Number of labels, 2d−2.
    pub fn label_count(&self) -> usize {
        2 * self.d - 2
    }

    pub fn classes(&self) -> &[Vec<Label>] {
        &self.classes
    }

    pub fn h_labels(&self) -> &[Label] {
        &self.h
    }

    pub fn is_homoclinic(&self, l: Label) -> bool {
        self.in_h[l]
    }

    pub fn class_of(&self, l: Label) -> usize {
        self.class_of[l]
    }

    /// Shift map σ: the next label of ℓ's class counter-clockwise.
    pub fn sigma(&self, l: Label) -> Label {
        self.sigma[l]
    }

    /// σ⁻¹: the next label of ℓ's class clockwise.
    pub fn sigma_inv(&self, l: Label) -> Label {
        self.sigma_inv[l]
    }

    /// Class indices contained in H (homoclinic classes), ascending.
    pub fn h_class_ids(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| self.classes[i].iter().all(|&l| self.in_h[l]))
            .filter(|&i| !self.classes[i].is_empty())
            .collect()
    }

    /// Class indices disjoint from H (landing classes), ascending.
    pub fn landing_class_ids(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&i| self.classes[i].iter().all(|&l| !self.in_h[l]))
            .collect()
    }

    /// Number of parity changes p_[ℓ] of a landing class: the count of
    /// members whose gap to σ(ℓ′) is odd. Always even; equals the number of
    /// sepal zones at the class's equilibrium.
    pub fn parity_changes(&self, class_id: usize) -> Result<usize, CombError> {
        let class = &self.classes[class_id];
        if class.iter().any(|&l| self.in_h[l]) {
            return Err(CombError::HomoclinicClass(class.clone()));
        }
        Ok(class
            .iter()
            .filter(|&&l| (self.sigma[l] + self.label_count() - l) % 2 == 1)
            .count())
    }

    /// Sum of p_[ℓ] over all landing classes: the total sepal count.
    pub fn total_parity_changes(&self) -> usize {
        self.landing_class_ids()
            .iter()
            .map(|&i| self.parity_changes(i).unwrap())
            .sum()
    }

    /// Condition 1: distinct class hulls are disjoint, tested pairwise via
    /// the gap-containment criterion.
    pub fn is_non_crossing(&self) -> bool {
        let k = self.classes.len();
        for a in 0..k {
            for b in a + 1..k {
                if self.classes_cross(&self.classes[a], &self.classes[b]) {
                    return false;
                }
            }
        }
        true
    }

    fn classes_cross(&self, a: &[Label], b: &[Label]) -> bool {
        if a.len() < 2 {
            return false;
        }
        // hulls are disjoint iff b sits inside a single cyclic gap between
        // consecutive members of a
        let n = self.label_count();
        let gap_index = |x: Label| -> usize {
            for i in 0..a.len() {
                let lo = a[i];
                let hi = a[(i + 1) % a.len()];
                let span = (hi + n - lo) % n;
                let off = (x + n - lo) % n;
                if off > 0 && off < span {
                    return i;
                }
            }
            unreachable!("x belongs to some gap of a");
        };
        let first = gap_index(b[0]);
        b.iter().any(|&x| gap_index(x) != first)
    }

    /// Condition 2: every class meeting H is contained in H and consists of
    /// exactly two labels of different parity, and H is a union of classes.
    pub fn condition2_ok(&self) -> bool {
        for class in &self.classes {
            let marked = class.iter().filter(|&&l| self.in_h[l]).count();
            if marked == 0 {
                continue;
            }
            if marked != class.len() || class.len() != 2 || class[0] % 2 == class[1] % 2 {
                return false;
            }
        }
        true
    }

    /// Full validation of conditions 1–3.
    pub fn validate(&self) -> ValidationReport {
        let condition1 = self.is_non_crossing();
        let condition2 = self.condition2_ok();
        let (condition3, offending_cell, cells) = if condition1 && condition2 {
            match self.decompose_cells() {
                Ok(cells) => (true, None, Some(cells)),
                Err(CombError::CellTypeViolation(ends)) => (false, Some(ends), None),
                Err(_) => (false, None, None),
            }
        } else {
            (false, None, None)
        };
        let decomposition_properties = if condition1 && condition2 {
            Some(self.decomposition_properties())
        } else {
            None
        };
        let euler_characteristic = cells
            .as_ref()
            .map(|c| self.euler_characteristic_from_cells(c));
        ValidationReport {
            condition1,
            condition2,
            condition3,
            offending_cell,
            decomposition_properties,
            euler_characteristic,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().valid()
    }

    /// H = ∅ and no mixed classes: the open dense stratum where the Newton
    /// realizer operates.
    pub fn is_structurally_stable(&self) -> bool {
        if !self.h.is_empty() {
            return false;
        }
        self.classes
            .iter()
            .all(|c| c.iter().all(|&l| l % 2 == c[0] % 2))
    }
}

/// Per-condition outcome of [`CombinatorialDataSet::validate`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub condition1: bool,
    pub condition2: bool,
    pub condition3: bool,
    /// On a condition-3 failure, the ends of a cell matching no type.
    pub offending_cell: Option<Vec<Label>>,
    /// Evaluated when conditions 1–2 hold.
    pub decomposition_properties: Option<bool>,
    /// Evaluated when the cell decomposition exists; must be 2.
    pub euler_characteristic: Option<i64>,
}

impl ValidationReport {
    pub fn valid(&self) -> bool {
        self.condition1 && self.condition2 && self.condition3
    }
}
