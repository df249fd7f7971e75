//! Numerical tracing of the 2d−2 separatrices of ż = P(z).
//!
//! Each separatrix is launched at R₀·δ_ℓ on its asymptotic direction
//! δ_ℓ = exp(2πiℓ/(2d−2)) and integrated into the plane: forward in time
//! for odd ℓ (outgoing from infinity), backward for even ℓ. A trace ends
//! either by certified landing at an equilibrium or by escaping past the
//! escape radius, in which case the exit direction names the homoclinic
//! partner label.
//!
//! Transit times are assembled from the integrated interior time plus ray
//! integrals ∫ dz/P from the start and exit points to infinity. Outside a
//! disk containing all roots the form dz/P is exact (the residues sum to
//! zero), so those tails are path independent and the assembled homoclinic
//! time matches the true invariant to integrator accuracy regardless of
//! the launch offset.

use crate::par;
use crate::poly::{Equilibrium, EquilibriumKind, PolyError, Polynomial, CLUSTER_TOL};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace of separatrix {label} inconclusive after {steps} steps (t = {time:.3e}); the trajectory neither landed nor escaped")]
    Inconclusive { label: usize, steps: usize, time: f64 },
    #[error("separatrix {label} exited at angle {angle:.6} rad, not within tolerance of any asymptotic direction; try a larger escape radius")]
    AmbiguousExit { label: usize, angle: f64 },
    #[error("separatrix {label} exited along direction {exit}, which has the same parity; classification is unreliable")]
    WrongExitParity { label: usize, exit: usize },
    #[error("homoclinic pairing is not involutive: {0:?}")]
    PairingNotInvolutive(Vec<(usize, usize)>),
    #[error("equilibrium at {location} of kind {kind:?} received {received} separatrices")]
    SeparatrixCountMismatch {
        location: Complex64,
        kind: EquilibriumKind,
        received: usize,
    },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Integration and fate-detection parameters, normally derived from the
/// polynomial by [`TraceConfig::for_polynomial`].
#[derive(Debug, Clone)]
pub struct TraceConfig {
    pub start_radius: f64,
    pub escape_radius: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_time: f64,
    pub max_steps: usize,
    /// Landing radius for simple equilibria; multiple equilibria widen it
    /// to cover their cluster.
    pub landing_radius: f64,
    /// Accepted angular deviation from an asymptotic direction at escape,
    /// as a fraction of the sector width 2π/(2d−2).
    pub direction_tol: f64,
}

impl TraceConfig {
    /// Ties every tolerance to the problem scale: the start radius is the
    /// smallest radius where |P(z)/z^d − 1| < 10⁻⁴ (and at least twice the
    /// root bound), the escape radius ten times that, and the landing
    /// radius 10⁻⁶ of the smallest pairwise root separation.
    pub fn for_polynomial(p: &Polynomial, equilibria: &[Equilibrium]) -> TraceConfig {
        let d = p.degree();
        let root_scale = equilibria
            .iter()
            .map(|e| e.location.norm())
            .fold(1.0, f64::max);
        let mut r0 = 2.0 * root_scale.max(1.0);
        loop {
            // sup over |z| = r of |P/z^d − 1| ≤ Σ |a_i| r^{i−d}
            let bound: f64 = p
                .coeffs()
                .iter()
                .take(d)
                .enumerate()
                .map(|(i, c)| c.norm() * r0.powi(i as i32 - d as i32))
                .sum();
            if bound < 1e-4 {
                break;
            }
            r0 *= 1.5;
        }
        let min_sep = min_pairwise_distance(equilibria).unwrap_or(root_scale);
        let time_scale: f64 = 1.0 + equilibria.iter().map(|e| e.residue.norm()).sum::<f64>();
        TraceConfig {
            start_radius: r0,
            escape_radius: 10.0 * r0,
            rel_tol: 1e-10,
            abs_tol: 1e-13 * root_scale,
            max_time: 1e7 * time_scale,
            max_steps: 400_000,
            landing_radius: 1e-6 * min_sep,
            direction_tol: 0.35,
        }
    }

    pub fn with_start_radius(mut self, r0: f64) -> Self {
        self.escape_radius = r0 * self.escape_radius / self.start_radius;
        self.start_radius = r0;
        self
    }
}

fn min_pairwise_distance(equilibria: &[Equilibrium]) -> Option<f64> {
    let mut best = None;
    for i in 0..equilibria.len() {
        for j in i + 1..equilibria.len() {
            let dist = (equilibria[i].location - equilibria[j].location).norm();
            best = Some(best.map_or(dist, |b: f64| b.min(dist)));
        }
    }
    best
}

/// How a conclusive trace ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    /// Landed at `equilibria[index]`.
    Landing { equilibrium: usize },
    /// Escaped back to infinity along δ_{exit_label}.
    Homoclinic { exit_label: usize },
}

/// One traced separatrix.
#[derive(Debug, Clone)]
pub struct SeparatrixTrace {
    pub label: usize,
    /// Sampled curve (t, z); t is the real flow time, negative for
    /// backward (even-label) traces.
    pub samples: Vec<(f64, Complex64)>,
    pub fate: Fate,
    /// Unsigned time between the start- and escape-radius crossings.
    pub interior_time: f64,
    /// Asymptotic tail corrections at both ends (zero for landings, which
    /// carry an infinite forward time).
    pub tail_time: f64,
    /// Imaginary residual of the assembled homoclinic transit time; a
    /// numerical diagnostic, ideally ≈ 0.
    pub time_imag_residual: f64,
}

impl SeparatrixTrace {
    /// Total homoclinic transit time τ = interior + tails.
    pub fn transit_time(&self) -> Option<f64> {
        match self.fate {
            Fate::Homoclinic { .. } => Some(self.interior_time + self.tail_time),
            Fate::Landing { .. } => None,
        }
    }
}

/// A complete set of traces for one polynomial.
#[derive(Debug, Clone)]
pub struct TraceSet {
    pub polynomial: Polynomial,
    pub equilibria: Vec<Equilibrium>,
    pub config: TraceConfig,
    pub traces: Vec<SeparatrixTrace>,
}

pub fn direction(label: usize, label_count: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * label as f64 / label_count as f64)
}

/// Traces a single separatrix.
pub fn trace_separatrix(
    p: &Polynomial,
    equilibria: &[Equilibrium],
    label: usize,
    cfg: &TraceConfig,
) -> Result<SeparatrixTrace, TraceError> {
    let n = 2 * p.degree() - 2;
    let delta = direction(label, n);
    let z0 = cfg.start_radius * delta;
    // odd labels flow out of infinity forward in time; even labels are
    // traced backward
    let forward = label % 2 == 1;
    let factor = if forward {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(-1.0, 0.0)
    };

    // radius below which the linearization traps the trajectory at a
    // simple attracting equilibrium, certifying the landing without
    // integrating the (possibly very long) spiral tail
    let lin_radius: Vec<f64> = equilibria
        .iter()
        .enumerate()
        .map(|(i, e)| {
            if e.multiplicity != 1 {
                return 0.0;
            }
            let nearest = equilibria
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, o)| (o.location - e.location).norm())
                .fold(f64::INFINITY, f64::min)
                .min(4.0 * e.location.norm().max(1.0));
            let taylor = p.taylor_at(e.location);
            let second = taylor.get(2).map(|c| c.norm()).unwrap_or(0.0);
            let curvature_bound = if second > 0.0 {
                0.25 * e.derivative.re.abs() / second
            } else {
                f64::INFINITY
            };
            (0.25 * nearest).min(curvature_bound)
        })
        .collect();
    let attracting_sign = if forward { -1.0 } else { 1.0 };

    let mut landing: Option<usize> = None;
    let mut contraction: usize = 0;
    let mut last_dist = f64::INFINITY;
    let outcome = integrate_adaptive(p, factor, z0, cfg, |_, z| {
        if z.norm() > cfg.escape_radius {
            return Some(Err(z));
        }
        let (idx, dist) = nearest_equilibrium(equilibria, z);
        if dist < lin_radius[idx]
            && equilibria[idx].derivative.re * attracting_sign > 0.0
        {
            return Some(Ok(idx));
        }
        let radius = landing_radius_for(&equilibria[idx], cfg);
        if dist < radius && landing == Some(idx) {
            if dist < last_dist {
                contraction += 1;
            } else {
                contraction = 0;
            }
            last_dist = dist;
            if contraction >= 10 {
                return Some(Ok(idx));
            }
        } else if dist < radius {
            landing = Some(idx);
            contraction = 0;
            last_dist = dist;
        } else {
            landing = None;
        }
        None
    });

    let (raw_samples, end) = match outcome {
        Ok(v) => v,
        Err(IntegrationGaveUp { steps, time }) => {
            return Err(TraceError::Inconclusive { label, steps, time })
        }
    };
    // report real flow time: backward traces run in s = −t
    let samples: Vec<(f64, Complex64)> = raw_samples
        .iter()
        .map(|&(s, z)| (if forward { s } else { -s }, z))
        .collect();

    match end {
        Ok(equilibrium) => Ok(SeparatrixTrace {
            label,
            interior_time: samples.last().map(|&(t, _)| t.abs()).unwrap_or(0.0),
            samples,
            fate: Fate::Landing { equilibrium },
            tail_time: 0.0,
            time_imag_residual: 0.0,
        }),
        Err(z_exit) => {
            let exit_label = match_exit_direction(z_exit, label, n, cfg)?;
            let interior = samples.last().map(|&(t, _)| t.abs()).unwrap_or(0.0);
            // τ = ∫ dz/P from ∞ to start + interior + exit to ∞, with the
            // outer legs taken along rays (path independent out there)
            let tail = if forward {
                ray_integral(p, z_exit) - ray_integral(p, z0)
            } else {
                ray_integral(p, z0) - ray_integral(p, z_exit)
            };
            Ok(SeparatrixTrace {
                label,
                samples,
                fate: Fate::Homoclinic { exit_label },
                interior_time: interior,
                tail_time: tail.re,
                time_imag_residual: tail.im,
            })
        }
    }
}

fn landing_radius_for(e: &Equilibrium, cfg: &TraceConfig) -> f64 {
    if e.multiplicity > 1 {
        cfg.landing_radius.max(10.0 * e.cluster_radius)
    } else {
        cfg.landing_radius
    }
}

fn nearest_equilibrium(equilibria: &[Equilibrium], z: Complex64) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for (i, e) in equilibria.iter().enumerate() {
        let dist = (z - e.location).norm();
        if dist < best.1 {
            best = (i, dist);
        }
    }
    best
}

fn match_exit_direction(
    z_exit: Complex64,
    label: usize,
    n: usize,
    cfg: &TraceConfig,
) -> Result<usize, TraceError> {
    let sector = 2.0 * PI / n as f64;
    let theta = z_exit.arg().rem_euclid(2.0 * PI);
    let nearest = (theta / sector).round() as usize % n;
    let residual = (theta - (theta / sector).round() * sector).abs();
    if residual > cfg.direction_tol * sector {
        return Err(TraceError::AmbiguousExit { label, angle: theta });
    }
    if nearest % 2 == label % 2 {
        return Err(TraceError::WrongExitParity {
            label,
            exit: nearest,
        });
    }
    Ok(nearest)
}

/// Traces all 2d−2 separatrices (in parallel when the `parallel` feature
/// is on) and cross-checks the global structure.
pub fn trace_all(
    p: &Polynomial,
    cfg_override: Option<TraceConfig>,
) -> Result<TraceSet, TraceError> {
    trace_all_impl(p, cfg_override, false)
}

/// Sequential twin of [`trace_all`] for benchmark comparison.
pub fn trace_all_seq(
    p: &Polynomial,
    cfg_override: Option<TraceConfig>,
) -> Result<TraceSet, TraceError> {
    trace_all_impl(p, cfg_override, true)
}

fn trace_all_impl(
    p: &Polynomial,
    cfg_override: Option<TraceConfig>,
    force_seq: bool,
) -> Result<TraceSet, TraceError> {
    let equilibria = crate::poly::find_roots(p, CLUSTER_TOL)?;
    let cfg = cfg_override.unwrap_or_else(|| TraceConfig::for_polynomial(p, &equilibria));
    let n = 2 * p.degree() - 2;
    let labels: Vec<usize> = (0..n).collect();
    let job = |l: usize| trace_separatrix(p, &equilibria, l, &cfg);
    let traced = if force_seq {
        par::map_collect_seq(labels, job)
    } else {
        par::map_collect(labels, job)
    };
    let mut traces = Vec::with_capacity(n);
    for t in traced {
        traces.push(t?);
    }
    check_consistency(&traces, &equilibria)?;
    Ok(TraceSet {
        polynomial: p.clone(),
        equilibria,
        config: cfg,
        traces,
    })
}

fn check_consistency(
    traces: &[SeparatrixTrace],
    equilibria: &[Equilibrium],
) -> Result<(), TraceError> {
    // homoclinic pairing must be an involution
    let mut bad = Vec::new();
    for t in traces {
        if let Fate::Homoclinic { exit_label } = t.fate {
            match traces[exit_label].fate {
                Fate::Homoclinic { exit_label: back } if back == t.label => {}
                _ => bad.push((t.label, exit_label)),
            }
        }
    }
    if !bad.is_empty() {
        return Err(TraceError::PairingNotInvolutive(bad));
    }
    // every non-center equilibrium receives a separatrix; centers none
    for (i, e) in equilibria.iter().enumerate() {
        let received = traces
            .iter()
            .filter(|t| t.fate == Fate::Landing { equilibrium: i })
            .count();
        let ok = match e.kind {
            EquilibriumKind::Center => received == 0,
            _ => received >= 1,
        };
        if !ok {
            return Err(TraceError::SeparatrixCountMismatch {
                location: e.location,
                kind: e.kind,
                received,
            });
        }
    }
    Ok(())
}

/// Homoclinic transit time of a trace, τ = interior + tails.
pub fn homoclinic_time(trace: &SeparatrixTrace) -> Option<f64> {
    trace.transit_time()
}

// --- adaptive Dormand–Prince 5(4) ----------------------------------------

pub(crate) struct IntegrationGaveUp {
    pub steps: usize,
    pub time: f64,
}

/// Integrates ż = factor·P(z) from z0 with adaptive step control, calling
/// `check` after every accepted step; `check` returns Some(outcome) to
/// stop. Time `s` passed to `check` is the internal (positive) parameter.
pub(crate) fn integrate_adaptive<T>(
    p: &Polynomial,
    factor: Complex64,
    z0: Complex64,
    cfg: &TraceConfig,
    mut check: impl FnMut(f64, Complex64) -> Option<T>,
) -> Result<(Vec<(f64, Complex64)>, T), IntegrationGaveUp> {
    let f = |z: Complex64| factor * p.eval(z);
    let mut z = z0;
    let mut s = 0.0f64;
    let mut samples = vec![(0.0, z0)];
    let mut h = 0.01 * (1.0 + z0.norm()) / f(z0).norm().max(1e-300);
    let mut steps = 0usize;

    loop {
        if steps >= cfg.max_steps || s > cfg.max_time {
            return Err(IntegrationGaveUp { steps, time: s });
        }
        steps += 1;
        let (z_new, err) = dopri5_step(&f, z, h);
        let tol = cfg.abs_tol + cfg.rel_tol * z.norm().max(z_new.norm());
        if err <= tol || h <= 1e-14 * (1.0 + s) {
            z = z_new;
            s += h;
            samples.push((s, z));
            if let Some(outcome) = check(s, z) {
                return Ok((samples, outcome));
            }
        }
        let scale = if err > 0.0 {
            0.9 * (tol / err).powf(0.2)
        } else {
            5.0
        };
        h *= scale.clamp(0.2, 5.0);
    }
}

/// Integrates ż = factor·P(z) for exactly `s_total` time units and returns
/// the endpoint.
pub(crate) fn integrate_fixed_time(
    p: &Polynomial,
    factor: Complex64,
    z0: Complex64,
    s_total: f64,
    cfg: &TraceConfig,
) -> Result<Complex64, IntegrationGaveUp> {
    let f = |z: Complex64| factor * p.eval(z);
    let mut z = z0;
    let mut s = 0.0f64;
    let mut h = (0.01 * (1.0 + z0.norm()) / f(z0).norm().max(1e-300)).min(s_total);
    let mut steps = 0usize;
    while s < s_total * (1.0 - 1e-15) {
        if steps >= cfg.max_steps || !z.re.is_finite() || !z.im.is_finite() {
            return Err(IntegrationGaveUp { steps, time: s });
        }
        steps += 1;
        let h_try = h.min(s_total - s);
        let (z_new, err) = dopri5_step(&f, z, h_try);
        let tol = cfg.abs_tol + cfg.rel_tol * z.norm().max(z_new.norm());
        if err <= tol || h_try <= 1e-15 * s_total {
            z = z_new;
            s += h_try;
        }
        let scale = if err > 0.0 {
            0.9 * (tol / err).powf(0.2)
        } else {
            5.0
        };
        h = (h_try * scale.clamp(0.2, 5.0)).max(1e-15 * s_total);
    }
    Ok(z)
}

/// One Dormand–Prince 5(4) step; returns the 5th-order solution and the
/// embedded error estimate.
fn dopri5_step(f: &impl Fn(Complex64) -> Complex64, z: Complex64, h: f64) -> (Complex64, f64) {
    let k1 = f(z);
    let k2 = f(z + h * (0.2 * k1));
    let k3 = f(z + h * (0.075 * k1 + 0.225 * k2));
    let k4 = f(z + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    let k5 = f(z
        + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3
            - 212.0 / 729.0 * k4));
    let k6 = f(z
        + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3
            + 49.0 / 176.0 * k4
            - 5103.0 / 18656.0 * k5));
    let z5 = z
        + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4
            - 2187.0 / 6784.0 * k5
            + 11.0 / 84.0 * k6);
    let k7 = f(z5);
    let z4 = z
        + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 + 393.0 / 640.0 * k4
            - 92097.0 / 339200.0 * k5
            + 187.0 / 2100.0 * k6
            + 1.0 / 40.0 * k7);
    (z5, (z5 - z4).norm())
}

// --- ray integrals to infinity -------------------------------------------

/// ∫ dz/P from z to ∞ along the ray of direction z/|z|, by Gauss–Legendre
/// quadrature after the substitution u = 1/r. Requires the ray to avoid
/// the roots of P, which holds whenever |z| exceeds the root bound.
pub fn ray_integral(p: &Polynomial, z: Complex64) -> Complex64 {
    let r = z.norm();
    let dir = z / r;
    let upper = 1.0 / r;
    let (nodes, weights) = gauss_legendre_64();
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, &w) in nodes.iter().zip(weights.iter()) {
        let u = 0.5 * upper * (x + 1.0);
        if u > 0.0 {
            acc += w * dir / (u * u * p.eval(dir / u));
        }
    }
    acc * 0.5 * upper
}

fn gauss_legendre_64() -> (&'static [f64; 64], &'static [f64; 64]) {
    use std::sync::OnceLock;
    static TABLE: OnceLock<([f64; 64], [f64; 64])> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut nodes = [0.0; 64];
        let mut weights = [0.0; 64];
        let n = 64usize;
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (pn, dpn) = legendre_with_deriv(n, x);
                let dx = pn / dpn;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dpn) = legendre_with_deriv(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
        }
        (nodes, weights)
    });
    (&table.0, &table.1)
}

fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

// --- polyline crossing check ----------------------------------------------

/// Verifies that the sampled separatrices are pairwise non-crossing at
/// sample resolution (trajectories of a holomorphic field never cross;
/// a crossing indicates integration failure).
///
/// Segments inside the landing funnel of an equilibrium (a few percent of
/// the local root separation) are excluded: chords of two arms spiraling
/// into the same root interleave below chord resolution there without
/// meaning anything, while a genuine integration failure shows up at zone
/// scale.
pub fn polylines_non_crossing(set: &TraceSet) -> bool {
    let exclusion: Vec<(Complex64, f64)> = set
        .equilibria
        .iter()
        .map(|e| {
            let nearest = set
                .equilibria
                .iter()
                .filter(|o| (o.location - e.location).norm() > 0.0)
                .map(|o| (o.location - e.location).norm())
                .fold(f64::INFINITY, f64::min);
            let scale = if nearest.is_finite() {
                nearest
            } else {
                e.location.norm().max(1.0)
            };
            (
                e.location,
                (0.05 * scale).max(100.0 * landing_radius_for(e, &set.config)),
            )
        })
        .collect();
    let mut segments: Vec<(usize, Complex64, Complex64)> = Vec::new();
    for (ti, t) in set.traces.iter().enumerate() {
        for w in t.samples.windows(2) {
            let (a, b) = (w[0].1, w[1].1);
            let excluded = exclusion
                .iter()
                .any(|&(c, r)| (a - c).norm() < r && (b - c).norm() < r);
            if !excluded {
                segments.push((ti, a, b));
            }
        }
    }
    let key = |s: &(usize, Complex64, Complex64)| s.1.re.min(s.2.re);
    segments.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    let mut active: Vec<usize> = Vec::new();
    for i in 0..segments.len() {
        let xmin = key(&segments[i]);
        active.retain(|&j| segments[j].1.re.max(segments[j].2.re) >= xmin);
        for &j in &active {
            if segments[j].0 != segments[i].0
                && segments_cross(segments[i].1, segments[i].2, segments[j].1, segments[j].2)
            {
                return false;
            }
        }
        active.push(i);
    }
    true
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let cross = |o: Complex64, p: Complex64, q: Complex64| -> f64 {
        (p.re - o.re) * (q.im - o.im) - (p.im - o.im) * (q.re - o.re)
    };
    let eps = 1e-12 * (b - a).norm().max((d - c).norm()).max(1e-300);
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    (d1 > eps && d2 < -eps || d1 < -eps && d2 > eps)
        && (d3 > eps && d4 < -eps || d3 < -eps && d4 > eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn poly(coeffs: &[(f64, f64)]) -> Polynomial {
        Polynomial::new(coeffs.iter().map(|&(re, im)| c64(re, im)).collect()).unwrap()
    }

    #[test]
    fn z2_minus_1_separatrices_land() {
        // phase line of ẋ = x² − 1: s₀ lands at the source +1 (backward
        // trace), s₁ at the sink −1
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let set = trace_all(&p, None).unwrap();
        let eq_plus = set
            .equilibria
            .iter()
            .position(|e| e.location.re > 0.0)
            .unwrap();
        let eq_minus = 1 - eq_plus;
        assert_eq!(set.traces[0].fate, Fate::Landing { equilibrium: eq_plus });
        assert_eq!(set.traces[1].fate, Fate::Landing { equilibrium: eq_minus });
    }

    #[test]
    fn z2_plus_1_is_homoclinic_with_time_pi() {
        // ẋ = x² + 1 > 0 on ℝ: the real axis is a homoclinic connection
        // with τ = ∫ dx/(1+x²) = π
        let p = poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let set = trace_all(&p, None).unwrap();
        assert_eq!(set.traces[1].fate, Fate::Homoclinic { exit_label: 0 });
        assert_eq!(set.traces[0].fate, Fate::Homoclinic { exit_label: 1 });
        let tau = set.traces[1].transit_time().unwrap();
        assert!((tau - PI).abs() < 1e-6, "tau = {tau}");
        let tau_back = set.traces[0].transit_time().unwrap();
        assert!((tau - tau_back).abs() <= 1e-6 * tau.max(tau_back));
        assert!(set.traces[1].time_imag_residual.abs() < 1e-6);
    }

    #[test]
    fn z2_plus_4_transit_time() {
        let p = poly(&[(4.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let set = trace_all(&p, None).unwrap();
        let tau = set.traces[1].transit_time().unwrap();
        assert!((tau - PI / 2.0).abs() < 1e-6, "tau = {tau}");
    }

    #[test]
    fn z2_both_separatrices_land_on_double_root() {
        let p = poly(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let set = trace_all(&p, None).unwrap();
        assert_eq!(set.equilibria.len(), 1);
        for t in &set.traces {
            assert_eq!(t.fate, Fate::Landing { equilibrium: 0 });
        }
    }

    #[test]
    fn transit_time_stable_under_start_radius_doubling() {
        let p = poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let set1 = trace_all(&p, None).unwrap();
        let cfg2 = set1
            .config
            .clone()
            .with_start_radius(2.0 * set1.config.start_radius);
        let set2 = trace_all(&p, Some(cfg2)).unwrap();
        let t1 = set1.traces[1].transit_time().unwrap();
        let t2 = set2.traces[1].transit_time().unwrap();
        assert!((t1 - t2).abs() <= 1e-6 * t1.max(t2), "t1 = {t1}, t2 = {t2}");
    }

    #[test]
    fn traced_polylines_do_not_cross() {
        for coeffs in [
            vec![(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
            vec![(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
            vec![(0.3, 0.2), (-1.0, 0.4), (0.0, 0.0), (1.0, 0.0)],
        ] {
            let p = poly(&coeffs);
            let set = trace_all(&p, None).unwrap();
            assert!(polylines_non_crossing(&set));
        }
    }

    #[test]
    fn ray_integral_matches_closed_form_for_z2() {
        // ∫_R^∞ dr/r² = 1/R along the positive real axis for P = z²
        let p = poly(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let v = ray_integral(&p, c64(5.0, 0.0));
        assert!((v - c64(0.2, 0.0)).norm() < 1e-12);
        // along the imaginary ray: ∫ dz/z² from iR to i∞ = −i/R
        let v = ray_integral(&p, c64(0.0, 5.0));
        assert!((v - c64(0.0, -0.2)).norm() < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre_64();
        // ∫_{−1}^{1} x^10 dx = 2/11
        let acc: f64 = nodes
            .iter()
            .zip(weights.iter())
            .map(|(&x, &w)| w * x.powi(10))
            .sum();
        assert!((acc - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }
}
