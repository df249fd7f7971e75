//! Assembly of the full classification: the combinatorial invariant
//! (∼, H) from traced fates, zone labeling, the analytic invariant
//! A = (α₁..α_s, τ₁..τ_h), and the residue-relation cross-check suite.
//!
//! The α of an αω-zone is computed from residues: α equals the sum of the
//! dynamical residues ρ(ζ) over the equilibria left of any transversal of
//! the zone, and the left side of the oriented transversal e_k → e_j is
//! combinatorial: the landing classes inside the label interval [j, k−1]
//! plus the centers whose cells sit inside. Direct quadrature of ∫ dz/P
//! along a numerically constructed transversal (a trajectory of the
//! rotated field e^{iθ}P) is the independent cross-check, not the primary
//! route: residue sums are exact given the roots.

use crate::comb::{Cell, CellKind, CombError, CombinatorialDataSet, HChain, Label};
use crate::json;
use crate::poly::{EquilibriumKind, Polynomial};
use crate::tracer::{
    self, ray_integral, Fate, TraceConfig, TraceError, TraceSet,
};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("traced topology fails validation ({0}); the numerical classification disagrees with the theory, indicating a tolerance failure")]
    InvalidTopology(String),
    #[error(transparent)]
    Comb(#[from] CombError),
    #[error("cannot assign centers to closed homoclinic chains: {0}")]
    CenterAssignment(String),
    #[error("no αω-zone carries the {side} label {label}")]
    MissingZone { side: &'static str, label: Label },
    #[error("transversal quadrature for zone ({k},{j}) exited through end {exit_end} instead of {j}")]
    QuadratureExit { k: Label, j: Label, exit_end: usize },
    #[error("left-of sets disagree: combinatorial {combinatorial:?} vs geometric {geometric:?} for homoclinic at label {label}")]
    LeftOfMismatch {
        label: Label,
        combinatorial: Vec<usize>,
        geometric: Vec<usize>,
    },
}

/// The tuple A(ξ) ∈ ℍ^s × ℝ₊^h: strip invariants ordered by ascending
/// even zone label, homoclinic times by ascending odd label.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticInvariant {
    pub alphas: Vec<Complex64>,
    pub taus: Vec<f64>,
}

impl AnalyticInvariant {
    pub fn s(&self) -> usize {
        self.alphas.len()
    }

    pub fn h(&self) -> usize {
        self.taus.len()
    }
}

/// A zone of the vector field, in bijection with a cell of the disk model.
#[derive(Debug, Clone)]
pub struct Zone {
    pub cell: Cell,
    /// Strip invariant for αω-zones.
    pub alpha: Option<Complex64>,
    /// Equilibria on the zone boundary: [ζ_α, ζ_ω] for αω-zones, the
    /// multiple point for sepals, the enclosed center for center zones.
    pub equilibria: Vec<usize>,
    /// Labels of the separatrices on the zone boundary.
    pub boundary_labels: Vec<Label>,
}

/// All zones, ordered by type then label per the numbering conventions.
#[derive(Debug, Clone)]
pub struct ZoneLabeling {
    pub zones: Vec<Zone>,
}

impl ZoneLabeling {
    /// Purely combinatorial zone labeling of a valid data set: kinds,
    /// boundary labels, and ordering, with no analytic content.
    pub fn from_data_set(ds: &CombinatorialDataSet) -> Result<ZoneLabeling, CombError> {
        let cells = ds.decompose_cells()?;
        let mut zones: Vec<Zone> = cells
            .into_iter()
            .map(|cell| {
                let boundary_labels = boundary_labels(ds, &cell);
                Zone {
                    cell,
                    alpha: None,
                    equilibria: Vec::new(),
                    boundary_labels,
                }
            })
            .collect();
        zones.sort_by_key(|z| zone_order_key(&z.cell));
        Ok(ZoneLabeling { zones })
    }

    pub fn alpha_omega_zones(&self) -> impl Iterator<Item = (&Zone, Label, Label)> {
        self.zones.iter().filter_map(|z| match z.cell.kind {
            CellKind::AlphaOmega { k, j } => Some((z, k, j)),
            _ => None,
        })
    }
}

fn zone_order_key(cell: &Cell) -> (u8, usize) {
    match cell.kind {
        CellKind::AlphaOmega { j, .. } => (0, j),
        CellKind::OddSepal { k } => (1, k),
        CellKind::EvenSepal { j } => (2, j),
        CellKind::OddCenter => (3, *cell.ends.iter().min().unwrap()),
        CellKind::EvenCenter => (4, *cell.ends.iter().min().unwrap()),
    }
}

fn boundary_labels(ds: &CombinatorialDataSet, cell: &Cell) -> Vec<Label> {
    let n = ds.label_count();
    let mut labels: Vec<Label> = cell
        .ends
        .iter()
        .flat_map(|&e| [(e + n - 1) % n, e])
        .collect();
    labels.sort_unstable();
    labels.dedup();
    labels
}

/// Numerical cross-checks accumulated during assembly. Error fields are
/// relative; `None` means the relation had no instances.
#[derive(Debug, Clone)]
pub struct CrossChecks {
    /// |Σρ| / max|ρ|.
    pub residue_sum_rel: f64,
    /// αω-zones: α from residue sums vs independent quadrature.
    pub relation1_max_err: Option<f64>,
    /// Homoclinic times: traced τ vs Σρ left of the separatrix.
    pub relation2_max_err: Option<f64>,
    /// Sources: ρ vs Σ α⁻ over the class.
    pub relation3_max_err: Option<f64>,
    /// Sinks: ρ vs −Σ α⁺ over the class.
    pub relation4_max_err: Option<f64>,
    /// Centers: ρ vs ±Σ τ over the boundary homoclinics.
    pub relation5_max_err: Option<f64>,
    /// Traced τ of the two orientations of each homoclinic.
    pub tau_pair_max_err: Option<f64>,
    /// Largest imaginary residual of assembled transit times.
    pub time_imag_max: f64,
    pub counting_identities: bool,
    pub euler_characteristic: i64,
    /// Spectral center detection agrees with the topological one.
    pub center_consistency: bool,
    /// Segment sweep over all sampled separatrices (full checks only).
    pub polylines_non_crossing: Option<bool>,
}

/// The assembled classification of one polynomial vector field.
#[derive(Debug, Clone)]
pub struct Classification {
    pub traces: TraceSet,
    pub data_set: CombinatorialDataSet,
    pub zones: ZoneLabeling,
    pub invariant: AnalyticInvariant,
    /// Landing class id → equilibrium index.
    pub class_equilibrium: Vec<Option<usize>>,
    pub h_chains: Vec<HChain>,
    /// Chain index → enclosed center equilibrium (closed chains only).
    pub chain_center: Vec<Option<usize>>,
    pub checks: CrossChecks,
}

/// How much verification [`assemble`] performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChecksLevel {
    /// Residue relations only; used inside solver loops.
    Fast,
    /// Adds transversal quadrature, geometric left-of verification, and
    /// the polyline crossing sweep.
    Full,
}

/// Builds the combinatorial data set from a complete set of traces.
///
/// Homoclinic labels form H (paired by exit label); landing labels are
/// grouped into classes by their shared landing equilibrium.
pub fn build_data_set(set: &TraceSet) -> Result<CombinatorialDataSet, InvariantError> {
    let mut h = Vec::new();
    let mut by_eq: std::collections::BTreeMap<usize, Vec<Label>> = Default::default();
    let mut classes: Vec<Vec<Label>> = Vec::new();
    let mut seen_pairs = std::collections::BTreeSet::new();
    for t in &set.traces {
        match t.fate {
            Fate::Homoclinic { exit_label } => {
                h.push(t.label);
                let pair = (t.label.min(exit_label), t.label.max(exit_label));
                if seen_pairs.insert(pair) {
                    classes.push(vec![pair.0, pair.1]);
                }
            }
            Fate::Landing { equilibrium } => {
                by_eq.entry(equilibrium).or_default().push(t.label);
            }
        }
    }
    classes.extend(by_eq.into_values());
    let ds = CombinatorialDataSet::new(set.polynomial.degree(), classes, h)?;
    let report = ds.validate();
    if !report.valid() {
        return Err(InvariantError::InvalidTopology(format!(
            "conditions (1,2,3) = ({},{},{}) for {}",
            report.condition1,
            report.condition2,
            report.condition3,
            ds.to_canonical_json()
        )));
    }
    Ok(ds)
}

/// Landing-class → equilibrium bindings (None for homoclinic classes).
fn bind_classes(set: &TraceSet, ds: &CombinatorialDataSet) -> Vec<Option<usize>> {
    ds.classes()
        .iter()
        .map(|class| {
            set.traces.iter().find_map(|t| match t.fate {
                Fate::Landing { equilibrium } if class.contains(&t.label) => Some(equilibrium),
                _ => None,
            })
        })
        .collect()
}

/// Assigns each closed H-chain its enclosed center by winding number of
/// the traced chain loop, closed through arcs at infinity.
fn assign_centers(
    set: &TraceSet,
    ds: &CombinatorialDataSet,
    chains: &[HChain],
) -> Result<Vec<Option<usize>>, InvariantError> {
    let centers: Vec<usize> = set
        .equilibria
        .iter()
        .enumerate()
        .filter(|(_, e)| e.kind == EquilibriumKind::Center)
        .map(|(i, _)| i)
        .collect();
    let mut used = vec![false; set.equilibria.len()];
    let mut out = vec![None; chains.len()];
    for (ci, chain) in chains.iter().enumerate() {
        if !chain.closed {
            continue;
        }
        let looped = chain_loop(set, ds, chain);
        let expected = if chain.ccw { 1 } else { -1 };
        let mut found = None;
        for &eq in &centers {
            let w = winding_number(&looped, set.equilibria[eq].location);
            if w == expected {
                if found.is_some() {
                    return Err(InvariantError::CenterAssignment(format!(
                        "two centers wind {expected} around the same chain"
                    )));
                }
                found = Some(eq);
            }
        }
        let Some(eq) = found else {
            return Err(InvariantError::CenterAssignment(format!(
                "no center has winding {expected} inside chain {ci}"
            )));
        };
        if used[eq] {
            return Err(InvariantError::CenterAssignment(format!(
                "center {eq} claimed by two chains"
            )));
        }
        used[eq] = true;
        out[ci] = Some(eq);
    }
    for &eq in &centers {
        if !used[eq] {
            return Err(InvariantError::CenterAssignment(format!(
                "center at {} not enclosed by any closed chain",
                set.equilibria[eq].location
            )));
        }
    }
    Ok(out)
}

/// The polyline of a closed chain: each homoclinic traced from its odd
/// label, joined by short arcs at infinity between exit and next entry.
fn chain_loop(set: &TraceSet, ds: &CombinatorialDataSet, chain: &HChain) -> Vec<Complex64> {
    let n = ds.label_count();
    let mut points = Vec::new();
    let odd_of = |cid: usize| -> Label {
        let c = &ds.classes()[cid];
        if c[0] % 2 == 1 {
            c[0]
        } else {
            c[1]
        }
    };
    let m = chain.classes.len();
    for (idx, &cid) in chain.classes.iter().enumerate() {
        let k = odd_of(cid);
        let trace = &set.traces[k];
        points.extend(trace.samples.iter().map(|&(_, z)| z));
        let exit = match trace.fate {
            Fate::Homoclinic { exit_label } => exit_label,
            Fate::Landing { .. } => unreachable!("chain members are homoclinic"),
        };
        let next_k = odd_of(chain.classes[(idx + 1) % m]);
        let r = trace.samples.last().map(|&(_, z)| z.norm()).unwrap();
        let a0 = 2.0 * PI * exit as f64 / n as f64;
        let mut a1 = 2.0 * PI * next_k as f64 / n as f64;
        if chain.ccw {
            while a1 <= a0 {
                a1 += 2.0 * PI;
            }
        } else {
            while a1 >= a0 {
                a1 -= 2.0 * PI;
            }
        }
        for step in 1..=32 {
            let a = a0 + (a1 - a0) * step as f64 / 32.0;
            points.push(Complex64::from_polar(r, a));
        }
    }
    points
}

fn winding_number(points: &[Complex64], center: Complex64) -> i64 {
    let mut total = 0.0f64;
    for i in 0..points.len() {
        let a = points[i] - center;
        let b = points[(i + 1) % points.len()] - center;
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// Equilibrium descriptors combinatorially left of the oriented homoclinic
/// separatrix with odd label k: landing classes inside [j+1, k−1] and
/// center chains whose cells sit inside [j+1, k].
pub fn left_of_homoclinic(
    ds: &CombinatorialDataSet,
    cells: &[Cell],
    chains: &[HChain],
    k: Label,
) -> (Vec<usize>, Vec<usize>) {
    let n = ds.label_count();
    let j = ds.sigma(k);
    let span = (k + n - j) % n;
    // landing classes strictly between δ_j and δ_k, center cells with ends
    // in [j+1, k]; both empty when the directions are adjacent
    let landing = landing_classes_between(ds, j, 1, span.wrapping_sub(1));
    let centers = center_chains_between(ds, cells, chains, j, 1, span);
    (landing, centers)
}

/// Landing classes whose labels x all satisfy lo ≤ (x − anchor) mod n ≤ hi;
/// empty when hi < lo (or hi underflowed).
fn landing_classes_between(
    ds: &CombinatorialDataSet,
    anchor: Label,
    lo: usize,
    hi: usize,
) -> Vec<usize> {
    let n = ds.label_count();
    if hi >= n || hi < lo {
        return Vec::new();
    }
    let inside = |x: Label| {
        let off = (x + n - anchor) % n;
        off >= lo && off <= hi
    };
    ds.landing_class_ids()
        .into_iter()
        .filter(|&i| ds.classes()[i].iter().all(|&l| inside(l)))
        .collect()
}

/// Closed chains whose center cells have all ends x with
/// lo ≤ (x − anchor) mod n ≤ hi.
fn center_chains_between(
    ds: &CombinatorialDataSet,
    cells: &[Cell],
    chains: &[HChain],
    anchor: Label,
    lo: usize,
    hi: usize,
) -> Vec<usize> {
    let n = ds.label_count();
    if hi >= n || hi < lo {
        return Vec::new();
    }
    let inside = |x: Label| {
        let off = (x + n - anchor) % n;
        off >= lo && off <= hi
    };
    chains
        .iter()
        .enumerate()
        .filter(|(_, chain)| chain.closed)
        .filter(|(_, chain)| {
            cells.iter().any(|c| {
                cell_matches_chain(c, chain) && c.ends.iter().all(|&e| inside(e))
            })
        })
        .map(|(i, _)| i)
        .collect()
}

/// A center cell corresponds to the closed chain with the same classes and
/// matching orientation (odd center ↔ counter-clockwise).
fn cell_matches_chain(cell: &Cell, chain: &HChain) -> bool {
    let orientation_ok = match cell.kind {
        CellKind::OddCenter => chain.ccw,
        CellKind::EvenCenter => !chain.ccw,
        _ => return false,
    };
    orientation_ok && chain_of_center_cell(cell) == sorted_classes(chain)
}

fn chain_of_center_cell(cell: &Cell) -> Vec<usize> {
    let mut v: Vec<usize> = cell
        .ccw_chain
        .iter()
        .chain(cell.cw_chain.iter())
        .copied()
        .collect();
    v.sort_unstable();
    v
}

fn sorted_classes(chain: &HChain) -> Vec<usize> {
    let mut v = chain.classes.clone();
    v.sort_unstable();
    v
}

/// Sum of residues over a left-of set.
fn residue_sum(
    set: &TraceSet,
    class_eq: &[Option<usize>],
    chain_center: &[Option<usize>],
    landing: &[usize],
    centers: &[usize],
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &cid in landing {
        if let Some(eq) = class_eq[cid] {
            acc += set.equilibria[eq].residue;
        }
    }
    for &chain in centers {
        if let Some(eq) = chain_center[chain] {
            acc += set.equilibria[eq].residue;
        }
    }
    acc
}

/// τ-sum of an open chain attached to a zone boundary, from traced times.
fn chain_tau_sum(set: &TraceSet, ds: &CombinatorialDataSet, chain_classes: &[usize]) -> f64 {
    chain_classes
        .iter()
        .map(|&cid| {
            let c = &ds.classes()[cid];
            let k = if c[0] % 2 == 1 { c[0] } else { c[1] };
            set.traces[k].transit_time().unwrap_or(0.0)
        })
        .sum()
}

/// Classifies a polynomial vector field: traces, data set, zones, analytic
/// invariant, and the cross-check report.
pub fn assemble(
    p: &Polynomial,
    cfg: Option<TraceConfig>,
    level: ChecksLevel,
) -> Result<Classification, InvariantError> {
    let set = tracer::trace_all(p, cfg)?;
    assemble_from_traces(set, level)
}

/// Full classification with default configuration.
pub fn classify(p: &Polynomial) -> Result<Classification, InvariantError> {
    assemble(p, None, ChecksLevel::Full)
}

pub fn assemble_from_traces(
    set: TraceSet,
    level: ChecksLevel,
) -> Result<Classification, InvariantError> {
    let ds = build_data_set(&set)?;
    let cells = ds.decompose_cells()?;
    let chains = ds.extract_h_chains();
    let class_eq = bind_classes(&set, &ds);
    let chain_center = assign_centers(&set, &ds, &chains)?;

    let mut zones = ZoneLabeling::from_data_set(&ds)?;

    // strip invariants from residue sums; taus from traced times
    let mut alphas: Vec<(Label, Complex64)> = Vec::new();
    for zone in &mut zones.zones {
        match zone.cell.kind {
            CellKind::AlphaOmega { k, j } => {
                let n = ds.label_count();
                // left of the transversal e_k → e_j: classes in [j, k−1]
                // and center cells inside (j, k)
                let span = (k + n - j) % n;
                let landing = landing_classes_between(&ds, j, 0, span - 1);
                let centers =
                    center_chains_between(&ds, &cells, &chains, j, 1, span.wrapping_sub(1));
                let alpha = residue_sum(&set, &class_eq, &chain_center, &landing, &centers);
                zone.alpha = Some(alpha);
                alphas.push((j, alpha));
                // ζ_α is the landing point of [j], ζ_ω of [k]
                let alpha_eq = class_eq[ds.class_of(j)];
                let omega_eq = class_eq[ds.class_of(k)];
                zone.equilibria = [alpha_eq, omega_eq].iter().flatten().copied().collect();
            }
            CellKind::OddSepal { k } => {
                zone.equilibria = class_eq[ds.class_of(k)].iter().copied().collect();
            }
            CellKind::EvenSepal { j } => {
                zone.equilibria = class_eq[ds.class_of(j)].iter().copied().collect();
            }
            CellKind::OddCenter | CellKind::EvenCenter => {
                let chain_id = chains
                    .iter()
                    .position(|c| c.closed && cell_matches_chain(&zone.cell, c))
                    .expect("center cell has a matching closed chain");
                zone.equilibria = chain_center[chain_id].iter().copied().collect();
            }
        }
    }
    alphas.sort_by_key(|&(j, _)| j);

    let mut taus: Vec<(Label, f64)> = Vec::new();
    for &hid in &ds.h_class_ids() {
        let c = &ds.classes()[hid];
        let k = if c[0] % 2 == 1 { c[0] } else { c[1] };
        let tau = set.traces[k]
            .transit_time()
            .expect("homoclinic labels have transit times");
        taus.push((k, tau));
    }
    taus.sort_by_key(|&(k, _)| k);

    let invariant = AnalyticInvariant {
        alphas: alphas.iter().map(|&(_, a)| a).collect(),
        taus: taus.iter().map(|&(_, t)| t).collect(),
    };

    let checks = run_checks(
        &set,
        &ds,
        &cells,
        &chains,
        &class_eq,
        &chain_center,
        &zones,
        level,
    )?;

    Ok(Classification {
        traces: set,
        data_set: ds,
        zones,
        invariant,
        class_equilibrium: class_eq,
        h_chains: chains,
        chain_center,
        checks,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_checks(
    set: &TraceSet,
    ds: &CombinatorialDataSet,
    cells: &[Cell],
    chains: &[HChain],
    class_eq: &[Option<usize>],
    chain_center: &[Option<usize>],
    zones: &ZoneLabeling,
    level: ChecksLevel,
) -> Result<CrossChecks, InvariantError> {
    let n = ds.label_count();
    let max_rho = set
        .equilibria
        .iter()
        .map(|e| e.residue.norm())
        .fold(0.0, f64::max);
    let rho_total: Complex64 = set.equilibria.iter().map(|e| e.residue).sum();
    let residue_sum_rel = rho_total.norm() / max_rho.max(1e-300);

    let mut max_err = CheckMax::default();

    // relation 2: τ(s) = Σ ρ left of s, plus pairwise τ agreement
    for &hid in &ds.h_class_ids() {
        let c = &ds.classes()[hid];
        let (k, j) = if c[0] % 2 == 1 {
            (c[0], c[1])
        } else {
            (c[1], c[0])
        };
        let tau = set.traces[k].transit_time().unwrap();
        let tau_back = set.traces[j].transit_time().unwrap();
        max_err
            .tau_pair
            .update((tau - tau_back).abs() / (1.0 + tau.abs()));
        let (landing, centers) = left_of_homoclinic(ds, cells, chains, k);
        let rho = residue_sum(set, class_eq, chain_center, &landing, &centers);
        max_err
            .relation2
            .update((rho - Complex64::new(tau, 0.0)).norm() / (1.0 + tau.abs()));

        if level == ChecksLevel::Full {
            // geometric cross-check of the combinatorial left set
            let geometric = geometric_left_equilibria(set, ds, k);
            let mut combinatorial: Vec<usize> = landing
                .iter()
                .filter_map(|&cid| class_eq[cid])
                .chain(centers.iter().filter_map(|&ch| chain_center[ch]))
                .collect();
            combinatorial.sort_unstable();
            if combinatorial != geometric {
                return Err(InvariantError::LeftOfMismatch {
                    label: k,
                    combinatorial,
                    geometric,
                });
            }
        }
    }

    // relation 1: α versus the independent transversal quadrature
    if level == ChecksLevel::Full {
        for (zone, k, j) in zones.alpha_omega_zones() {
            let alpha = zone.alpha.unwrap();
            let quad = transversal_quadrature(set, n, k, j, alpha)?;
            max_err
                .relation1
                .update((quad - alpha).norm() / (1.0 + alpha.norm()));
        }
    }

    // relations 3 and 4 over sources and sinks
    let zone_by_even: std::collections::HashMap<Label, usize> = zones
        .zones
        .iter()
        .enumerate()
        .filter_map(|(i, z)| match z.cell.kind {
            CellKind::AlphaOmega { j, .. } => Some((j, i)),
            _ => None,
        })
        .collect();
    let zone_by_odd: std::collections::HashMap<Label, usize> = zones
        .zones
        .iter()
        .enumerate()
        .filter_map(|(i, z)| match z.cell.kind {
            CellKind::AlphaOmega { k, .. } => Some((k, i)),
            _ => None,
        })
        .collect();
    for (cid, class) in ds.classes().iter().enumerate() {
        let Some(eq) = class_eq[cid] else { continue };
        let e = &set.equilibria[eq];
        match e.kind {
            EquilibriumKind::Source => {
                let mut acc = Complex64::new(0.0, 0.0);
                for &j in class {
                    let Some(&zi) = zone_by_even.get(&j) else {
                        return Err(InvariantError::MissingZone {
                            side: "even",
                            label: j,
                        });
                    };
                    let zone = &zones.zones[zi];
                    acc += zone.alpha.unwrap() + chain_tau_sum(set, ds, &zone.cell.ccw_chain);
                }
                max_err
                    .relation3
                    .update((acc - e.residue).norm() / (1.0 + e.residue.norm()));
            }
            EquilibriumKind::Sink => {
                let mut acc = Complex64::new(0.0, 0.0);
                for &k in class {
                    let Some(&zi) = zone_by_odd.get(&k) else {
                        return Err(InvariantError::MissingZone {
                            side: "odd",
                            label: k,
                        });
                    };
                    let zone = &zones.zones[zi];
                    acc += zone.alpha.unwrap() + chain_tau_sum(set, ds, &zone.cell.cw_chain);
                }
                // negative sign: winding counter-clockwise around a sink
                // traverses its essential transversals against their
                // e_k → e_j orientation
                max_err
                    .relation4
                    .update((acc + e.residue).norm() / (1.0 + e.residue.norm()));
            }
            _ => {}
        }
    }

    // relation 5: centers against the τ-sum of their chain
    for (ci, chain) in chains.iter().enumerate() {
        if !chain.closed {
            continue;
        }
        let Some(eq) = chain_center[ci] else { continue };
        let e = &set.equilibria[eq];
        let tau_sum = chain_tau_sum(set, ds, &chain.classes);
        let sign = if e.derivative.im > 0.0 { 1.0 } else { -1.0 };
        let expected = Complex64::new(sign * tau_sum, 0.0);
        max_err
            .relation5
            .update((e.residue - expected).norm() / (1.0 + e.residue.norm()));
    }

    let time_imag_max = set
        .traces
        .iter()
        .map(|t| t.time_imag_residual.abs())
        .fold(0.0, f64::max);

    let counting = ds.counting_identities()?;
    let euler = ds.euler_characteristic()?;

    let spectral_centers = set
        .equilibria
        .iter()
        .filter(|e| e.kind == EquilibriumKind::Center)
        .count();
    let closed_chains = chains.iter().filter(|c| c.closed).count();
    let center_consistency = spectral_centers == closed_chains;

    let polylines = match level {
        ChecksLevel::Full => Some(tracer::polylines_non_crossing(set)),
        ChecksLevel::Fast => None,
    };

    Ok(CrossChecks {
        residue_sum_rel,
        relation1_max_err: max_err.relation1.get(),
        relation2_max_err: max_err.relation2.get(),
        relation3_max_err: max_err.relation3.get(),
        relation4_max_err: max_err.relation4.get(),
        relation5_max_err: max_err.relation5.get(),
        tau_pair_max_err: max_err.tau_pair.get(),
        time_imag_max,
        counting_identities: counting.all_hold(),
        euler_characteristic: euler,
        center_consistency,
        polylines_non_crossing: polylines,
    })
}

#[derive(Default)]
struct CheckMax {
    relation1: MaxTracker,
    relation2: MaxTracker,
    relation3: MaxTracker,
    relation4: MaxTracker,
    relation5: MaxTracker,
    tau_pair: MaxTracker,
}

#[derive(Default)]
struct MaxTracker(Option<f64>);

impl MaxTracker {
    fn update(&mut self, v: f64) {
        self.0 = Some(self.0.map_or(v, |m| m.max(v)));
    }

    fn get(&self) -> Option<f64> {
        self.0
    }
}

/// Equilibria geometrically left of the traced homoclinic with odd label
/// k: winding-number test against the trace closed through a large arc.
fn geometric_left_equilibria(set: &TraceSet, ds: &CombinatorialDataSet, k: Label) -> Vec<usize> {
    let n = ds.label_count();
    let trace = &set.traces[k];
    let j = match trace.fate {
        Fate::Homoclinic { exit_label } => exit_label,
        Fate::Landing { .. } => unreachable!(),
    };
    let mut points: Vec<Complex64> = trace.samples.iter().map(|&(_, z)| z).collect();
    // counter-clockwise arc from the exit direction δ_j back to the entry
    // direction δ_k closes the loop with the left region inside
    let r = points.last().unwrap().norm();
    let a0 = 2.0 * PI * j as f64 / n as f64;
    let mut a1 = 2.0 * PI * k as f64 / n as f64;
    while a1 <= a0 {
        a1 += 2.0 * PI;
    }
    for step in 1..=64 {
        let a = a0 + (a1 - a0) * step as f64 / 64.0;
        points.push(Complex64::from_polar(r, a));
    }
    let mut left = Vec::new();
    for (i, e) in set.equilibria.iter().enumerate() {
        if winding_number(&points, e.location) == 1 {
            left.push(i);
        }
    }
    left.sort_unstable();
    left
}

/// Independent quadrature of ∫ dz/P across an αω-zone.
///
/// The transversal is realized as a trajectory of the rotated field
/// e^{iθ}P with θ = arg α, launched on the midpoint ray of end e_k. In
/// rectifying coordinates that trajectory is the straight segment of
/// length |α| across the strip, so integrating for exactly |α| rotated
/// time units deposits the endpoint near end e_j at roughly the start
/// radius. The exit sector is verified and the integral assembled from
/// the rotated time plus the two ray tails.
fn transversal_quadrature(
    set: &TraceSet,
    n: usize,
    k: Label,
    j: Label,
    alpha: Complex64,
) -> Result<Complex64, InvariantError> {
    let p = &set.polynomial;
    let cfg = &set.config;
    let theta = alpha.arg();
    let mid_k = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 - 0.5) / n as f64);
    let z0 = cfg.start_radius * mid_k;
    // In rectifying coordinates the launch point sits at −ray(z₀) relative
    // to the end E_k and the far end E_j at α. Aim the straight crossing
    // at a target backed off from E_j along the crossing direction, so the
    // endpoint comes to rest inside the access of e_j at a finite radius
    // comparable to the launch radius.
    let ray0 = ray_integral(p, z0);
    let backoff = 2.0 * ray0.norm() * Complex64::from_polar(1.0, theta);
    let displacement = alpha + ray0 - backoff;
    let s_target = displacement.norm();
    let factor = displacement / s_target;
    if s_target <= 0.0 || !s_target.is_finite() {
        return Err(InvariantError::QuadratureExit {
            k,
            j,
            exit_end: usize::MAX,
        });
    }
    let z_exit = match tracer::integrate_fixed_time(p, factor, z0, s_target, cfg) {
        Ok(z) => z,
        Err(_) => {
            return Err(InvariantError::QuadratureExit {
                k,
                j,
                exit_end: usize::MAX,
            })
        }
    };
    // the endpoint must sit outside the roots, in the access of end e_j
    // (the sector between δ_{j−1} and δ_j)
    let sector = 2.0 * PI / n as f64;
    let theta_exit = z_exit.arg().rem_euclid(2.0 * PI);
    let end_of_exit = ((theta_exit / sector).floor() as usize + 1) % n;
    if end_of_exit != j || z_exit.norm() < 0.3 * cfg.start_radius {
        return Err(InvariantError::QuadratureExit {
            k,
            j,
            exit_end: end_of_exit,
        });
    }
    Ok(-ray0 + factor * s_target + ray_integral(p, z_exit))
}

// --- canonical JSON --------------------------------------------------------

impl Classification {
    /// Canonical classification JSON with fixed field order and float
    /// format; byte-identical for identical inputs.
    pub fn to_canonical_json(&self) -> String {
        let p = &self.traces.polynomial;
        let poly = format!(
            "{{\"d\":{},\"coeffs\":{}}}",
            p.degree(),
            json::fmt_complex_list(p.coeffs())
        );
        let alphas = json::fmt_complex_list(&self.invariant.alphas);
        let taus = json::fmt_f64_list(&self.invariant.taus);
        let residues: Vec<Complex64> = self
            .ordered_equilibria()
            .iter()
            .map(|&eq| self.traces.equilibria[eq].residue)
            .collect();
        let zones: Vec<String> = self.zones.zones.iter().map(zone_json).collect();
        format!(
            "{{\"polynomial\":{},\"data_set\":{},\"alphas\":{},\"taus\":{},\"residues\":{},\"zones\":[{}],\"checks\":{}}}",
            poly,
            self.data_set.to_canonical_json(),
            alphas,
            taus,
            json::fmt_complex_list(&residues),
            zones.join(","),
            checks_json(&self.checks),
        )
    }

    /// Equilibrium indices in canonical order: landing classes by minimum
    /// label, then centers by chain order.
    pub fn ordered_equilibria(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (cid, _) in self.data_set.classes().iter().enumerate() {
            if let Some(eq) = self.class_equilibrium[cid] {
                if !out.contains(&eq) {
                    out.push(eq);
                }
            }
        }
        for center in self.chain_center.iter().flatten() {
            if !out.contains(center) {
                out.push(*center);
            }
        }
        out
    }
}

fn zone_json(zone: &Zone) -> String {
    let eq = json::fmt_usize_list(&zone.equilibria);
    let boundary = json::fmt_usize_list(&zone.boundary_labels);
    match zone.cell.kind {
        CellKind::AlphaOmega { k, j } => format!(
            "{{\"kind\":\"alpha-omega\",\"k\":{},\"j\":{},\"alpha\":{},\"equilibria\":{},\"boundary\":{}}}",
            k,
            j,
            json::fmt_complex(zone.alpha.unwrap_or_default()),
            eq,
            boundary
        ),
        CellKind::OddSepal { k } => format!(
            "{{\"kind\":\"odd-sepal\",\"k\":{},\"equilibria\":{},\"boundary\":{}}}",
            k, eq, boundary
        ),
        CellKind::EvenSepal { j } => format!(
            "{{\"kind\":\"even-sepal\",\"j\":{},\"equilibria\":{},\"boundary\":{}}}",
            j, eq, boundary
        ),
        CellKind::OddCenter => format!(
            "{{\"kind\":\"odd-center\",\"ends\":{},\"equilibria\":{},\"boundary\":{}}}",
            json::fmt_usize_list(&zone.cell.ends),
            eq,
            boundary
        ),
        CellKind::EvenCenter => format!(
            "{{\"kind\":\"even-center\",\"ends\":{},\"equilibria\":{},\"boundary\":{}}}",
            json::fmt_usize_list(&zone.cell.ends),
            eq,
            boundary
        ),
    }
}

fn opt_err(v: Option<f64>) -> String {
    match v {
        Some(x) => json::fmt_f64(x),
        None => "null".to_string(),
    }
}

fn checks_json(c: &CrossChecks) -> String {
    format!(
        "{{\"residue_sum_rel\":{},\"relation1_max_err\":{},\"relation2_max_err\":{},\"relation3_max_err\":{},\"relation4_max_err\":{},\"relation5_max_err\":{},\"tau_pair_max_err\":{},\"time_imag_max\":{},\"counting_identities\":{},\"euler_characteristic\":{},\"center_consistency\":{},\"polylines_non_crossing\":{}}}",
        json::fmt_f64(c.residue_sum_rel),
        opt_err(c.relation1_max_err),
        opt_err(c.relation2_max_err),
        opt_err(c.relation3_max_err),
        opt_err(c.relation4_max_err),
        opt_err(c.relation5_max_err),
        opt_err(c.tau_pair_max_err),
        json::fmt_f64(c.time_imag_max),
        c.counting_identities,
        c.euler_characteristic,
        c.center_consistency,
        match c.polylines_non_crossing {
            Some(b) => b.to_string(),
            None => "null".to_string(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::poly::Polynomial;

    fn poly(coeffs: &[(f64, f64)]) -> Polynomial {
        Polynomial::new(coeffs.iter().map(|&(re, im)| c64(re, im)).collect()).unwrap()
    }

    #[test]
    fn classify_z2_minus_1() {
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let c = classify(&p).unwrap();
        assert_eq!(
            c.data_set.to_canonical_json(),
            "{\"d\":2,\"classes\":[[0],[1]],\"H\":[]}"
        );
        assert_eq!(c.invariant.s(), 1);
        assert_eq!(c.invariant.h(), 0);
        let alpha = c.invariant.alphas[0];
        assert!((alpha - c64(0.0, PI)).norm() < 1e-6, "alpha = {alpha}");
        assert!(c.checks.relation1_max_err.unwrap() < 1e-6);
        assert!(c.checks.relation3_max_err.unwrap() < 1e-9);
        assert!(c.checks.relation4_max_err.unwrap() < 1e-9);
    }

    #[test]
    fn classify_z2_plus_1() {
        let p = poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let c = classify(&p).unwrap();
        assert_eq!(
            c.data_set.to_canonical_json(),
            "{\"d\":2,\"classes\":[[0,1]],\"H\":[0,1]}"
        );
        assert_eq!(c.invariant.s(), 0);
        assert_eq!(c.invariant.h(), 1);
        assert!((c.invariant.taus[0] - PI).abs() < 1e-6);
        assert!(c.checks.relation2_max_err.unwrap() < 1e-6);
        assert!(c.checks.relation5_max_err.unwrap() < 1e-6);
        assert!(c.checks.center_consistency);
    }

    #[test]
    fn classify_z2() {
        let p = poly(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let c = classify(&p).unwrap();
        assert_eq!(
            c.data_set.to_canonical_json(),
            "{\"d\":2,\"classes\":[[0,1]],\"H\":[]}"
        );
        assert_eq!(c.invariant.s(), 0);
        assert_eq!(c.invariant.h(), 0);
        assert_eq!(c.zones.zones.len(), 2);
    }

    #[test]
    fn left_of_homoclinic_is_center_at_i() {
        let p = poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let c = classify(&p).unwrap();
        let ds = &c.data_set;
        let cells = ds.decompose_cells().unwrap();
        let (landing, centers) = left_of_homoclinic(ds, &cells, &c.h_chains, 1);
        assert!(landing.is_empty());
        assert_eq!(centers.len(), 1);
        let eq = c.chain_center[centers[0]].unwrap();
        let loc = c.traces.equilibria[eq].location;
        assert!((loc - c64(0.0, 1.0)).norm() < 1e-9);
    }

    #[test]
    fn alpha_of_z2_minus_small_c_scales() {
        // α = iπ/√c for z² − c
        for &cval in &[0.25f64, 0.04] {
            let p = poly(&[(-cval, 0.0), (0.0, 0.0), (1.0, 0.0)]);
            let c = classify(&p).unwrap();
            let expected = c64(0.0, PI / cval.sqrt());
            assert!(
                (c.invariant.alphas[0] - expected).norm() < 1e-6 * expected.norm(),
                "alpha = {} expected {}",
                c.invariant.alphas[0],
                expected
            );
        }
    }

    #[test]
    fn ordering_is_deterministic() {
        let p = poly(&[(0.3, 0.2), (-1.0, 0.4), (0.0, 0.0), (1.0, 0.0)]);
        let a = classify(&p).unwrap().to_canonical_json();
        let b = classify(&p).unwrap().to_canonical_json();
        assert_eq!(a, b);
    }

    #[test]
    fn zone_labeling_combinatorial_examples() {
        // d=2 stable: a single zone labeled (1, 0)
        let ds = CombinatorialDataSet::new(2, vec![vec![0], vec![1]], vec![]).unwrap();
        let zl = ZoneLabeling::from_data_set(&ds).unwrap();
        assert_eq!(zl.zones.len(), 1);
        assert!(matches!(
            zl.zones[0].cell.kind,
            CellKind::AlphaOmega { k: 1, j: 0 }
        ));
        assert_eq!(zl.zones[0].boundary_labels, vec![0, 1]);

        // the z² pattern: odd sepal at 1 and even sepal at 0
        let ds = CombinatorialDataSet::new(2, vec![vec![0, 1]], vec![]).unwrap();
        let zl = ZoneLabeling::from_data_set(&ds).unwrap();
        assert_eq!(zl.zones.len(), 2);
        assert!(zl
            .zones
            .iter()
            .any(|z| matches!(z.cell.kind, CellKind::OddSepal { k: 1 })));
        assert!(zl
            .zones
            .iter()
            .any(|z| matches!(z.cell.kind, CellKind::EvenSepal { j: 0 })));
    }
}
