//! Cell decomposition of the disk model.
//!
//! The complement of the class hulls in the closed disk falls apart into
//! cells, each carrying the ends ε_ℓ (circle arcs from δ_{ℓ−1} to δ_ℓ) on
//! its boundary. Walking a cell boundary counter-clockwise, the end ε_ℓ is
//! followed by the end ε_{σ⁻¹(ℓ)+1}: past a singleton hull the walk just
//! continues along the circle, otherwise it rides the hull side from δ_ℓ
//! back to δ_{σ⁻¹(ℓ)}. Cells are therefore exactly the cycles of
//! ℓ ↦ σ⁻¹(ℓ)+1 on ℤ/(2d−2), and the chain equations of the five cell
//! types hold automatically along the walk; what remains to check is the
//! run pattern of parities and H-membership around each cycle.

use super::{CombError, CombinatorialDataSet, Label};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellKind {
    /// Two distinct boundary equilibria; labeled by the landing odd end k
    /// and landing even end j.
    AlphaOmega { k: Label, j: Label },
    /// Attached to a multiple equilibrium; labeled by its unique landing
    /// separatrix.
    OddSepal { k: Label },
    EvenSepal { j: Label },
    /// Bounded by a closed H-chain; the enclosed equilibrium is a center.
    OddCenter,
    EvenCenter,
}

/// One cell of the disk model.
#[derive(Debug, Clone)]
pub struct Cell {
    pub kind: CellKind,
    /// End labels in counter-clockwise boundary order. Canonical rotation:
    /// centers start at the smallest end; sepals put the landing end last;
    /// αω-cells run odd ends first, each run ending in its landing end.
    pub ends: Vec<Label>,
    /// Homoclinic classes (as class ids) forming the counter-clockwise
    /// (odd-side) open or closed chain on the boundary, in chain order.
    pub ccw_chain: Vec<usize>,
    /// Clockwise (even-side) chain, in chain order.
    pub cw_chain: Vec<usize>,
    /// Landing classes adjacent to the boundary geodesics: for an αω-cell
    /// `[class(k), class(j)]`, for a sepal `[its mixed class]`, empty for
    /// centers.
    pub landing_classes: Vec<usize>,
}

impl Cell {
    pub fn is_alpha_omega(&self) -> bool {
        matches!(self.kind, CellKind::AlphaOmega { .. })
    }

    pub fn is_sepal(&self) -> bool {
        matches!(self.kind, CellKind::OddSepal { .. } | CellKind::EvenSepal { .. })
    }

    pub fn is_center(&self) -> bool {
        matches!(self.kind, CellKind::OddCenter | CellKind::EvenCenter)
    }
}

impl CombinatorialDataSet {
    /// Decomposes the disk model into cells and classifies each against the
    /// five admissible types. A cell matching none of them is reported as a
    /// [`CombError::CellTypeViolation`]; this is exactly how condition 3 of
    /// validity fails.
    ///
    /// Requires conditions 1–2 (non-crossing, well-formed H) to be
    /// geometrically meaningful.
    pub fn decompose_cells(&self) -> Result<Vec<Cell>, CombError> {
        let n = self.label_count();
        let mut visited = vec![false; n];
        let mut cells = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut l = start;
            loop {
                visited[l] = true;
                cycle.push(l);
                l = (self.sigma_inv(l) + 1) % n;
                if l == start {
                    break;
                }
            }
            cells.push(self.classify_cell(cycle)?);
        }
        // total end count is the label count by construction; order cells
        // deterministically by smallest end
        cells.sort_by_key(|c| *c.ends.iter().min().unwrap());
        Ok(cells)
    }

    fn classify_cell(&self, cycle: Vec<Label>) -> Result<Cell, CombError> {
        let odd_total = cycle.iter().filter(|&&l| l % 2 == 1).count();
        let even_total = cycle.len() - odd_total;

        if odd_total > 0 && even_total > 0 {
            return self.classify_alpha_omega(cycle);
        }

        let non_h: Vec<usize> = (0..cycle.len())
            .filter(|&i| !self.is_homoclinic(cycle[i]))
            .collect();
        let odd = even_total == 0;
        match non_h.len() {
            0 => {
                // closed chain of homoclinic geodesics around a center
                let start = cycle
                    .iter()
                    .position(|l| l == cycle.iter().min().unwrap())
                    .unwrap();
                let ends: Vec<Label> = rotate(&cycle, start);
                let chain: Vec<usize> = ends.iter().map(|&l| self.class_of(l)).collect();
                let (ccw_chain, cw_chain, kind) = if odd {
                    (chain, Vec::new(), CellKind::OddCenter)
                } else {
                    (Vec::new(), chain, CellKind::EvenCenter)
                };
                Ok(Cell {
                    kind,
                    ends,
                    ccw_chain,
                    cw_chain,
                    landing_classes: Vec::new(),
                })
            }
            1 => {
                // open chain plus one landing end: a sepal
                let ends = rotate(&cycle, (non_h[0] + 1) % cycle.len());
                let landing = *ends.last().unwrap();
                let chain: Vec<usize> = ends[..ends.len() - 1]
                    .iter()
                    .map(|&l| self.class_of(l))
                    .collect();
                let landing_classes = vec![self.class_of(landing)];
                let (kind, ccw_chain, cw_chain) = if odd {
                    (CellKind::OddSepal { k: landing }, chain, Vec::new())
                } else {
                    (CellKind::EvenSepal { j: landing }, Vec::new(), chain)
                };
                Ok(Cell {
                    kind,
                    ends,
                    ccw_chain,
                    cw_chain,
                    landing_classes,
                })
            }
            _ => Err(CombError::CellTypeViolation(sorted(cycle))),
        }
    }

    fn classify_alpha_omega(&self, cycle: Vec<Label>) -> Result<Cell, CombError> {
        let len = cycle.len();
        // exactly one odd run and one even run around the cycle
        let changes = (0..len)
            .filter(|&i| cycle[i] % 2 != cycle[(i + 1) % len] % 2)
            .count();
        if changes != 2 {
            return Err(CombError::CellTypeViolation(sorted(cycle)));
        }
        // rotate so the odd run comes first
        let first_odd = (0..len)
            .find(|&i| cycle[i] % 2 == 1 && cycle[(i + len - 1) % len] % 2 == 0)
            .unwrap();
        let ends = rotate(&cycle, first_odd);
        let odd_count = ends.iter().filter(|&&l| l % 2 == 1).count();
        let (odd_run, even_run) = ends.split_at(odd_count);

        // each run: homoclinic ends first, the single landing end last
        for run in [odd_run, even_run] {
            let (last, init) = run.split_last().unwrap();
            if self.is_homoclinic(*last) || init.iter().any(|&l| !self.is_homoclinic(l)) {
                return Err(CombError::CellTypeViolation(sorted(cycle)));
            }
        }
        let k = *odd_run.last().unwrap();
        let j = *even_run.last().unwrap();
        let ccw_chain: Vec<usize> = odd_run[..odd_run.len() - 1]
            .iter()
            .map(|&l| self.class_of(l))
            .collect();
        let cw_chain: Vec<usize> = even_run[..even_run.len() - 1]
            .iter()
            .map(|&l| self.class_of(l))
            .collect();
        Ok(Cell {
            kind: CellKind::AlphaOmega { k, j },
            ends,
            ccw_chain,
            cw_chain,
            landing_classes: vec![self.class_of(k), self.class_of(j)],
        })
    }

    /// Euler characteristic V − E + F of the sphere model built from a
    /// valid data set; always 2.
    ///
    /// Vertices: the pole at infinity plus every equilibrium that is not a
    /// center. Edges: the 2(d−1) − h separatrices. Faces: strips, center
    /// basins, and half-planes.
    pub fn euler_characteristic(&self) -> Result<i64, CombError> {
        let cells = self.decompose_cells()?;
        Ok(self.euler_characteristic_from_cells(&cells))
    }

    pub(super) fn euler_characteristic_from_cells(&self, cells: &[Cell]) -> i64 {
        let d = self.degree() as i64;
        let s = cells.iter().filter(|c| c.is_alpha_omega()).count() as i64;
        let p = cells.iter().filter(|c| c.is_sepal()).count() as i64;
        let c = cells.iter().filter(|c| c.is_center()).count() as i64;
        let h = (self.h_labels().len() / 2) as i64;
        let v = 1 + d - c - p / 2;
        let e = 2 * (d - 1) - h;
        let f = s + c + p;
        v - e + f
    }
}

fn rotate(cycle: &[Label], start: usize) -> Vec<Label> {
    let mut out = Vec::with_capacity(cycle.len());
    out.extend_from_slice(&cycle[start..]);
    out.extend_from_slice(&cycle[..start]);
    out
}

fn sorted(mut v: Vec<Label>) -> Vec<Label> {
    v.sort_unstable();
    v
}
