//! Decomposition properties, the homoclinic component split, and the
//! counting identities of valid data sets.

use super::{CombError, CombinatorialDataSet, Label};

/// One connected component of the disk minus the homoclinic hulls.
///
/// Splitting along the h homoclinic geodesics yields h+1 components; each
/// carries the landing labels on its circle boundary and, when non-empty,
/// an induced data set with H = ∅ (labels renumbered by circular position,
/// preserving parity).
#[derive(Debug, Clone)]
pub struct Component {
    /// Landing labels of the original data set on this component, ascending.
    pub labels: Vec<Label>,
    /// Induced degree: `labels.len() = 2·d_i − 2`, so d_i = len/2 + 1.
    pub induced_degree: usize,
    /// The induced data set when `induced_degree > 1`.
    pub induced: Option<CombinatorialDataSet>,
}

/// Outcome of the counting identities on a valid data set.
#[derive(Debug, Clone)]
pub struct CountingReport {
    /// q = d − ½Σp on every homoclinic component.
    pub class_count_per_component: bool,
    /// The split count identity on both sides of every αω transversal,
    /// evaluated inside each induced H = ∅ component.
    pub transversal_splits: bool,
    /// s + h = d − 1 − p/2.
    pub strip_homoclinic_sum: bool,
}

impl CountingReport {
    pub fn all_hold(&self) -> bool {
        self.class_count_per_component && self.transversal_splits && self.strip_homoclinic_sum
    }
}

impl CombinatorialDataSet {
    /// Splits the disk along the homoclinic hulls into h+1 components.
    pub fn homoclinic_components(&self) -> Vec<Component> {
        let n = self.label_count();
        // walk the reduced disk model whose only hulls are the homoclinic
        // geodesics: σ_H swaps within H-classes and fixes everything else
        let sigma_h_inv = |l: Label| -> Label {
            if self.is_homoclinic(l) {
                self.sigma(l) // 2-element class: σ = σ⁻¹
            } else {
                l
            }
        };
        let mut visited = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut ends = Vec::new();
            let mut l = start;
            loop {
                visited[l] = true;
                ends.push(l);
                l = (sigma_h_inv(l) + 1) % n;
                if l == start {
                    break;
                }
            }
            let mut labels: Vec<Label> = ends
                .iter()
                .copied()
                .filter(|&e| !self.is_homoclinic(e))
                .collect();
            labels.sort_unstable();
            comps.push(self.build_component(labels));
        }
        comps.sort_by_key(|c| c.labels.first().copied().unwrap_or(usize::MAX));
        comps
    }

    fn build_component(&self, labels: Vec<Label>) -> Component {
        let count = labels.len();
        debug_assert!(count % 2 == 0);
        let induced_degree = count / 2 + 1;
        let induced = if count >= 2 {
            // parities alternate along the component circle (every removed
            // homoclinic pair takes one odd and one even label), so rotating
            // the sorted cyclic order to start at an even label makes the
            // renumbering parity-preserving
            let mut cyclic = labels.clone();
            if cyclic[0] % 2 == 1 {
                cyclic.rotate_left(1);
            }
            let pos: std::collections::HashMap<Label, Label> = cyclic
                .iter()
                .enumerate()
                .map(|(i, &l)| (l, i as Label))
                .collect();
            debug_assert!(cyclic.iter().enumerate().all(|(i, &l)| i % 2 == l % 2));
            let mut classes: Vec<Vec<Label>> = Vec::new();
            for c in self.classes() {
                if c.iter().all(|&l| pos.contains_key(&l)) {
                    classes.push(c.iter().map(|&l| pos[&l]).collect());
                }
            }
            debug_assert_eq!(
                classes.iter().map(|c| c.len()).sum::<usize>(),
                count,
                "landing classes must not straddle components"
            );
            CombinatorialDataSet::new(induced_degree, classes, Vec::new()).ok()
        } else {
            None
        };
        Component {
            labels,
            induced_degree,
            induced,
        }
    }

    /// The decomposition properties, equivalent to the cell-typing
    /// condition for data sets satisfying conditions 1–2:
    ///
    /// i. each homoclinic component with d_i > 1 carries exactly
    ///    d_i − ½Σp classes, and none when d_i = 1;
    /// ii. every interval split [ℓ₀,ℓ₁] / [ℓ₁+1,ℓ₀−1] respecting the
    ///    classes, with both parts of odd size, carries the analogous
    ///    counts;
    /// iii. within a component, every landing gap σ(ℓ)−ℓ is even or spans
    ///    no other landing label of that component.
    pub fn decomposition_properties(&self) -> bool {
        let comps = self.homoclinic_components();
        // properties ii–iii live inside the H = ∅ components; property i
        // ties the components together
        self.property_component_counts(&comps)
            && comps.iter().all(|c| match &c.induced {
                Some(ind) => ind.property_interval_splits(),
                None => true,
            })
            && self.property_gap_parity(&comps)
    }

    fn property_component_counts(&self, comps: &[Component]) -> bool {
        for comp in comps {
            let labelset: std::collections::HashSet<Label> =
                comp.labels.iter().copied().collect();
            let classes_in: Vec<usize> = self
                .landing_class_ids()
                .into_iter()
                .filter(|&i| self.classes()[i].iter().all(|l| labelset.contains(l)))
                .collect();
            if comp.induced_degree == 1 {
                if !classes_in.is_empty() {
                    return false;
                }
                continue;
            }
            let p_sum: usize = classes_in
                .iter()
                .map(|&i| self.parity_changes(i).unwrap())
                .sum();
            let expected = comp.induced_degree as i64 - (p_sum / 2) as i64;
            if classes_in.len() as i64 != expected {
                return false;
            }
        }
        true
    }

    fn property_interval_splits(&self) -> bool {
        let n = self.label_count();
        // all splits into two cyclic intervals of odd size that do not cut
        // through any class
        for l0 in 0..n {
            for half in 0..n / 2 {
                let l1 = (l0 + 2 * half) % n; // same parity as l0
                let i0 = cyclic_interval(l0, l1, n);
                if i0.len() == n {
                    continue;
                }
                let inside: std::collections::HashSet<Label> = i0.iter().copied().collect();
                let mut split_ok = true;
                let mut classes_i0 = 0i64;
                let mut p_i0 = 0usize;
                for (id, class) in self.classes().iter().enumerate() {
                    let cnt = class.iter().filter(|l| inside.contains(l)).count();
                    if cnt != 0 && cnt != class.len() {
                        split_ok = false;
                        break;
                    }
                    if cnt == class.len() {
                        classes_i0 += 1;
                        if !self.is_homoclinic(class[0]) {
                            p_i0 += self.parity_changes(id).unwrap();
                        }
                    }
                }
                if !split_ok {
                    continue;
                }
                let expected = (i0.len() as i64 + 1) / 2 - (p_i0 / 2) as i64;
                if classes_i0 != expected {
                    return false;
                }
            }
        }
        true
    }

    fn property_gap_parity(&self, comps: &[Component]) -> bool {
        let n = self.label_count();
        for comp in comps {
            let in_comp: std::collections::HashSet<Label> =
                comp.labels.iter().copied().collect();
            for &l in &comp.labels {
                let s = self.sigma(l);
                if (s + n - l) % 2 == 0 {
                    continue;
                }
                // odd gap: the open interval (ℓ, σ(ℓ)) must avoid the
                // component's other landing labels
                let mut x = (l + 1) % n;
                while x != s {
                    if in_comp.contains(&x) {
                        return false;
                    }
                    x = (x + 1) % n;
                }
            }
        }
        true
    }

    /// Verifies the three counting identities on a valid data set.
    pub fn counting_identities(&self) -> Result<CountingReport, CombError> {
        let cells = self.decompose_cells()?;
        let comps = self.homoclinic_components();
        let class_count_per_component = self.property_component_counts(&comps);

        // the split identity around every αω transversal, inside each
        // induced H = ∅ component
        let mut transversal_splits = true;
        'outer: for comp in &comps {
            let Some(ind) = &comp.induced else { continue };
            if ind.landing_class_ids().len() < 2 {
                continue;
            }
            let cells_i = match ind.decompose_cells() {
                Ok(c) => c,
                Err(_) => {
                    transversal_splits = false;
                    break;
                }
            };
            let m = ind.label_count();
            for cell in cells_i.iter().filter(|c| c.is_alpha_omega()) {
                let super::CellKind::AlphaOmega { k, j } = cell.kind else {
                    unreachable!()
                };
                for (lo, hi) in [(k, (j + m - 1) % m), (j, (k + m - 1) % m)] {
                    let interval = cyclic_interval(lo, hi, m);
                    let inside: std::collections::HashSet<Label> =
                        interval.iter().copied().collect();
                    let mut q = 0i64;
                    let mut p = 0usize;
                    for (id, class) in ind.classes().iter().enumerate() {
                        if class.iter().all(|l| inside.contains(l)) {
                            q += 1;
                            p += ind.parity_changes(id).unwrap();
                        }
                    }
                    let d_i = (interval.len() as i64 + 1) / 2;
                    if q != d_i - (p / 2) as i64 {
                        transversal_splits = false;
                        break 'outer;
                    }
                }
            }
        }

        let s = cells.iter().filter(|c| c.is_alpha_omega()).count() as i64;
        let p = cells.iter().filter(|c| c.is_sepal()).count() as i64;
        let h = (self.h_labels().len() / 2) as i64;
        let d = self.degree() as i64;
        let strip_homoclinic_sum = s + h == d - 1 - p / 2 && p % 2 == 0;

        Ok(CountingReport {
            class_count_per_component,
            transversal_splits,
            strip_homoclinic_sum,
        })
    }
}

/// Labels of the closed cyclic interval [lo, hi] read counter-clockwise.
pub(super) fn cyclic_interval(lo: Label, hi: Label, n: usize) -> Vec<Label> {
    let mut out = Vec::new();
    let mut x = lo;
    loop {
        out.push(x);
        if x == hi {
            break;
        }
        x = (x + 1) % n;
    }
    out
}
