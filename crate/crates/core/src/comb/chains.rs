//! H-chains and T-chains: the linked structures of homoclinic classes and
//! essential transversals.
//!
//! A homoclinic class {k, j} (k odd) is followed counter-clockwise by the
//! class containing σ(k)+1 when that label is homoclinic, and clockwise by
//! the class containing σ(j)+1. Closed chains bound center cells; open
//! chains lie on the boundaries of sepal and αω-cells.
//!
//! Essential transversals arise from the hull sides (b, σ(b)) with even
//! gap: the transversal joins the mid-points of the ends ε_{b+1} and
//! ε_{σ(b)}. Chained by "next odd = previous even + 1" they close around
//! sources (counter-clockwise) and sinks (clockwise); open chains bound
//! the interpetal structure of multiple equilibria.

use super::{CombinatorialDataSet, Label};

/// A maximal chain of homoclinic classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HChain {
    pub ccw: bool,
    pub closed: bool,
    /// Class ids in chain order.
    pub classes: Vec<usize>,
}

/// A maximal chain of essential transversals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TChain {
    pub ccw: bool,
    pub closed: bool,
    /// Transversal pairs (k, j), k odd, in chain order.
    pub pairs: Vec<(Label, Label)>,
    /// For a closed chain, the enclosed landing class (a source for a
    /// counter-clockwise chain, a sink for a clockwise one).
    pub enclosed_class: Option<usize>,
}

impl CombinatorialDataSet {
    /// Odd representative of a homoclinic class id.
    fn h_odd(&self, class_id: usize) -> Label {
        let c = &self.classes()[class_id];
        if c[0] % 2 == 1 {
            c[0]
        } else {
            c[1]
        }
    }

    fn h_even(&self, class_id: usize) -> Label {
        let c = &self.classes()[class_id];
        if c[0] % 2 == 0 {
            c[0]
        } else {
            c[1]
        }
    }

    /// All maximal H-chains. Every homoclinic class lies in exactly one
    /// counter-clockwise and one clockwise chain (open or closed); chains
    /// of length 0 are implicit and not listed.
    pub fn extract_h_chains(&self) -> Vec<HChain> {
        let n = self.label_count();
        let h_ids = self.h_class_ids();
        let mut out = Vec::new();
        for &ccw in &[true, false] {
            // successor: next class in the given orientation
            let succ = |id: usize| -> Option<usize> {
                let anchor = if ccw { self.h_odd(id) } else { self.h_even(id) };
                let next = (self.sigma(anchor) + 1) % n;
                if self.is_homoclinic(next) {
                    Some(self.class_of(next))
                } else {
                    None
                }
            };
            let mut placed = vec![false; self.classes().len()];
            // open chains start at classes with no predecessor
            for &id in &h_ids {
                let anchor = if ccw { self.h_odd(id) } else { self.h_even(id) };
                let prev = (anchor + n - 1) % n;
                if self.is_homoclinic(prev) {
                    continue;
                }
                let mut chain = vec![id];
                placed[id] = true;
                let mut cur = id;
                while let Some(nx) = succ(cur) {
                    chain.push(nx);
                    placed[nx] = true;
                    cur = nx;
                }
                out.push(HChain {
                    ccw,
                    closed: false,
                    classes: chain,
                });
            }
            // the rest are cycles
            for &id in &h_ids {
                if placed[id] {
                    continue;
                }
                let mut chain = vec![id];
                placed[id] = true;
                let mut cur = succ(id).expect("cycle member has a successor");
                while cur != id {
                    chain.push(cur);
                    placed[cur] = true;
                    cur = succ(cur).expect("cycle member has a successor");
                }
                // canonical rotation: start at the smallest class id
                let min_pos = chain
                    .iter()
                    .position(|c| c == chain.iter().min().unwrap())
                    .unwrap();
                chain.rotate_left(min_pos);
                out.push(HChain {
                    ccw,
                    closed: true,
                    classes: chain,
                });
            }
        }
        out.sort_by_key(|c| (!c.ccw, !c.closed, c.classes[0]));
        out
    }

    /// Number of closed H-chains (the center count c).
    pub fn closed_h_chain_count(&self) -> usize {
        self.extract_h_chains().iter().filter(|c| c.closed).count()
    }

    /// The set T of essential transversal pairs (k, j), k odd, sorted.
    ///
    /// One pair per label b with even gap σ(b) − b, hugging the hull side
    /// (b, σ(b)); distinct b may induce the same pair, which is emitted
    /// once.
    pub fn essential_transversals(&self) -> Vec<(Label, Label)> {
        let n = self.label_count();
        let mut pairs: Vec<(Label, Label)> = (0..n)
            .filter(|&b| (self.sigma(b) + n - b) % 2 == 0)
            .map(|b| {
                let e1 = (b + 1) % n;
                let e2 = self.sigma(b);
                if e1 % 2 == 1 {
                    (e1, e2)
                } else {
                    (e2, e1)
                }
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// All maximal T-chains over the essential transversals.
    ///
    /// Chains are followed along the hull sides (b, σ(b)) the transversals
    /// hug, which stay within one class: two transversal pairs may share an
    /// end, but sides link unambiguously. A pure-parity class closes into
    /// one cycle (even: counter-clockwise around a source; odd: clockwise
    /// around a sink); the even-gap runs of a mixed class are the open
    /// chains along its interpetals.
    pub fn extract_t_chains(&self) -> Vec<TChain> {
        let n = self.label_count();
        let is_side = |b: Label| (self.sigma(b) + n - b) % 2 == 0;
        let mut placed = vec![false; n];
        let mut out = Vec::new();

        // open runs start where the clockwise class neighbor is not a side
        for b0 in 0..n {
            if !is_side(b0) || placed[b0] || is_side(self.sigma_inv(b0)) {
                continue;
            }
            let mut sides = vec![b0];
            placed[b0] = true;
            let mut cur = b0;
            while is_side(self.sigma(cur)) && self.sigma(cur) != b0 {
                cur = self.sigma(cur);
                sides.push(cur);
                placed[cur] = true;
            }
            out.push(self.build_t_chain(false, sides));
        }
        // the rest are closed cycles (whole pure-parity classes)
        for b0 in 0..n {
            if !is_side(b0) || placed[b0] {
                continue;
            }
            let mut sides = vec![b0];
            placed[b0] = true;
            let mut cur = self.sigma(b0);
            while cur != b0 {
                sides.push(cur);
                placed[cur] = true;
                cur = self.sigma(cur);
            }
            out.push(self.build_t_chain(true, sides));
        }
        out.sort_by_key(|c| (!c.ccw, !c.closed, c.pairs[0]));
        out
    }

    fn build_t_chain(&self, closed: bool, sides: Vec<Label>) -> TChain {
        let n = self.label_count();
        let ccw = sides[0] % 2 == 0;
        let pairs: Vec<(Label, Label)> = sides
            .iter()
            .map(|&b| {
                let e1 = (b + 1) % n;
                let e2 = self.sigma(b);
                if e1 % 2 == 1 {
                    (e1, e2)
                } else {
                    (e2, e1)
                }
            })
            .collect();
        let enclosed_class = if closed {
            Some(self.class_of(sides[0]))
        } else {
            None
        };
        TChain {
            ccw,
            closed,
            pairs,
            enclosed_class,
        }
    }
}
