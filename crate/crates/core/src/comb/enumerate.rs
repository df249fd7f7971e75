//! Exhaustive enumeration of combinatorial data sets at small degree.
//!
//! Non-crossing partitions of the label circle are generated directly by
//! the classical block recursion (the block of the minimum element splits
//! the rest into independent gaps), then every admissible homoclinic
//! marking is attached and the result filtered through full validation.

use super::{CombError, CombinatorialDataSet, Label};
use crate::par;

/// Enumeration is exact but exponential; beyond this degree the counts
/// explode without adding test value.
pub const MAX_ENUM_DEGREE: usize = 6;

/// All valid data sets of degree d in canonical form, ordered
/// lexicographically by canonical serialization.
pub fn enumerate_data_sets(d: usize) -> Result<Vec<CombinatorialDataSet>, CombError> {
    let candidates = enumerate_candidates(d)?;
    let mut valid: Vec<CombinatorialDataSet> = par::map_collect(candidates, |ds| {
        if ds.validate().valid() {
            Some(ds)
        } else {
            None
        }
    })
    .into_iter()
    .flatten()
    .collect();
    valid.sort_by_key(|ds| ds.to_canonical_json());
    Ok(valid)
}

/// All (partition, marking) pairs satisfying conditions 1–2, before the
/// cell-typing condition is applied. This is the search space for the
/// executable equivalence between cell typing and the decomposition
/// properties.
pub fn enumerate_candidates(d: usize) -> Result<Vec<CombinatorialDataSet>, CombError> {
    if !(2..=MAX_ENUM_DEGREE).contains(&d) {
        return Err(CombError::UnsupportedDegree {
            d,
            max: MAX_ENUM_DEGREE,
        });
    }
    let n = 2 * d - 2;
    let mut out = Vec::new();
    for partition in non_crossing_partitions(n) {
        // condition 2 admits exactly the markings by subsets of the
        // two-element mixed-parity classes
        let eligible: Vec<usize> = (0..partition.len())
            .filter(|&i| {
                partition[i].len() == 2 && partition[i][0] % 2 != partition[i][1] % 2
            })
            .collect();
        for mask in 0..(1u64 << eligible.len()) {
            let mut h = Vec::new();
            for (bit, &ci) in eligible.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    h.extend_from_slice(&partition[ci]);
                }
            }
            out.push(CombinatorialDataSet::new(d, partition.clone(), h)?);
        }
    }
    Ok(out)
}

/// Valid data sets with H = ∅ and no mixed classes.
pub fn enumerate_structurally_stable(d: usize) -> Result<Vec<CombinatorialDataSet>, CombError> {
    Ok(enumerate_data_sets(d)?
        .into_iter()
        .filter(|ds| ds.is_structurally_stable())
        .collect())
}

/// All non-crossing partitions of {0, …, n−1}.
fn non_crossing_partitions(n: usize) -> Vec<Vec<Vec<Label>>> {
    let labels: Vec<Label> = (0..n).collect();
    nc_rec(&labels)
}

fn nc_rec(labels: &[Label]) -> Vec<Vec<Vec<Label>>> {
    if labels.is_empty() {
        return vec![Vec::new()];
    }
    let first = labels[0];
    let rest = &labels[1..];
    let mut out = Vec::new();
    // choose the block containing `first` as a subset of `rest` (by index
    // mask over gap structure): iterate over subsets via recursion to keep
    // only non-crossing completions
    for subset_mask in 0..(1u64 << rest.len().min(63)) {
        let mut block = vec![first];
        let mut gaps: Vec<Vec<Label>> = Vec::new();
        let mut current_gap: Vec<Label> = Vec::new();
        for (i, &l) in rest.iter().enumerate() {
            if subset_mask & (1 << i) != 0 {
                block.push(l);
                gaps.push(std::mem::take(&mut current_gap));
            } else {
                current_gap.push(l);
            }
        }
        gaps.push(current_gap);
        // partition each gap independently and take the cartesian product
        let sub: Vec<Vec<Vec<Vec<Label>>>> = gaps.iter().map(|g| nc_rec(g)).collect();
        let mut acc: Vec<Vec<Vec<Label>>> = vec![vec![block.clone()]];
        for gap_parts in sub {
            let mut next = Vec::new();
            for base in &acc {
                for choice in &gap_parts {
                    let mut combined = base.clone();
                    combined.extend(choice.iter().cloned());
                    next.push(combined);
                }
            }
            acc = next;
        }
        out.extend(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalan(n: usize) -> usize {
        // C_0..: 1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796
        let mut c = vec![0usize; n + 1];
        c[0] = 1;
        for i in 1..=n {
            for j in 0..i {
                c[i] += c[j] * c[i - 1 - j];
            }
        }
        c[n]
    }

    #[test]
    fn non_crossing_partition_counts_are_catalan() {
        for n in 0..=8 {
            let parts = non_crossing_partitions(n);
            assert_eq!(parts.len(), catalan(n), "n = {n}");
        }
    }

    #[test]
    fn partitions_are_noncrossing_and_complete() {
        for parts in non_crossing_partitions(6) {
            let ds = CombinatorialDataSet::new(4, parts, vec![]).unwrap();
            assert!(ds.is_non_crossing());
        }
    }
}
