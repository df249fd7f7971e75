//! Numerical inverse of the classification: given a valid combinatorial
//! data set and a matching analytic tuple, find the unique monic centered
//! polynomial realizing them.
//!
//! Uniqueness guarantees a single solution per combinatorial class, so a
//! class-guarded damped Newton iteration on the forward map is a correct
//! solver wherever it converges: every accepted step must classify
//! conclusively into the target class, and the converged polynomial is
//! re-verified. Degree 2 is handled in closed form for all three data
//! sets; for d ≥ 3 the Newton path requires the structurally stable case,
//! where the 2(d−1) real unknowns match the 2s constraints exactly.

use crate::comb::{CellKind, CombinatorialDataSet};
use crate::invariants::{
    assemble, AnalyticInvariant, ChecksLevel, Classification, InvariantError, ZoneLabeling,
};
use crate::par;
use crate::poly::{PolyError, Polynomial};
use crate::tracer::direction;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RealizeError {
    #[error("data set is not valid: {0}")]
    InvalidDataSet(String),
    #[error("analytic tuple has wrong shape: data set has s={s}, h={h} but got {alphas} strip invariants and {taus} transit times")]
    ShapeMismatch {
        s: usize,
        h: usize,
        alphas: usize,
        taus: usize,
    },
    #[error("strip invariant {0} must lie in the upper half plane, got {1}")]
    AlphaNotInUpperHalfPlane(usize, Complex64),
    #[error("transit time {0} must be positive, got {1}")]
    TauNotPositive(usize, f64),
    #[error("the target lies on a non-generic stratum: 2s + h = {constraints} real constraints vs 2(d−1) = {unknowns} real unknowns; realization off the structurally stable case is implemented only for d = 2")]
    NonGenericStratum { constraints: usize, unknowns: usize },
    #[error("no restart converged; best residual {best_residual:.3e} after {restarts} restarts")]
    NoConvergence { best_residual: f64, restarts: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// Solver knobs; defaults are calibrated for desk-scale degrees.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub max_iterations: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Relative max-norm residual accepted as converged.
    pub tolerance: f64,
    /// Finite-difference step factor for the Jacobian.
    pub fd_step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 40,
            restarts: 16,
            seed: 0x5eed,
            tolerance: 1e-10,
            fd_step: 1e-6,
        }
    }
}

/// A realization target: the combinatorial invariant plus the analytic
/// tuple it should carry.
#[derive(Debug, Clone)]
pub struct RealizationProblem {
    pub data_set: CombinatorialDataSet,
    pub target: AnalyticInvariant,
    pub options: SolverOptions,
}

impl RealizationProblem {
    pub fn new(data_set: CombinatorialDataSet, target: AnalyticInvariant) -> Self {
        RealizationProblem {
            data_set,
            target,
            options: SolverOptions::default(),
        }
    }

    fn check_shape(&self) -> Result<(usize, usize), RealizeError> {
        let report = self.data_set.validate();
        if !report.valid() {
            return Err(RealizeError::InvalidDataSet(
                self.data_set.to_canonical_json(),
            ));
        }
        let cells = self.data_set.decompose_cells().expect("validated");
        let s = cells.iter().filter(|c| c.is_alpha_omega()).count();
        let h = self.data_set.h_labels().len() / 2;
        if self.target.alphas.len() != s || self.target.taus.len() != h {
            return Err(RealizeError::ShapeMismatch {
                s,
                h,
                alphas: self.target.alphas.len(),
                taus: self.target.taus.len(),
            });
        }
        for (i, a) in self.target.alphas.iter().enumerate() {
            if a.im <= 0.0 {
                return Err(RealizeError::AlphaNotInUpperHalfPlane(i, *a));
            }
        }
        for (i, t) in self.target.taus.iter().enumerate() {
            if *t <= 0.0 {
                return Err(RealizeError::TauNotPositive(i, *t));
            }
        }
        Ok((s, h))
    }
}

/// The forward map the solver inverts: classification reduced to the
/// combinatorial and analytic invariants.
pub fn forward_map(
    p: &Polynomial,
) -> Result<(CombinatorialDataSet, AnalyticInvariant), InvariantError> {
    let c = assemble(p, None, ChecksLevel::Fast)?;
    Ok((c.data_set, c.invariant))
}

/// Realizes the target invariants as a monic centered polynomial, with
/// a final full-check classification verifying the result.
pub fn realize(prob: &RealizationProblem) -> Result<Polynomial, RealizeError> {
    let (s, h) = prob.check_shape()?;
    let d = prob.data_set.degree();

    if d == 2 {
        return realize_d2(prob);
    }

    let unknowns = 2 * (d - 1);
    let constraints = 2 * s + h;
    if !prob.data_set.is_structurally_stable() || constraints != unknowns {
        return Err(RealizeError::NonGenericStratum {
            constraints,
            unknowns,
        });
    }

    newton_realize(prob)
}

/// Degree 2 in closed form: the three data sets are
/// {{0},{1}} ↦ z² − ζ² with ζ = πi/α, {{0,1}} ↦ z², and
/// {{0,1}}, H={0,1} ↦ z² + (π/τ)².
fn realize_d2(prob: &RealizationProblem) -> Result<Polynomial, RealizeError> {
    let ds = &prob.data_set;
    let lower;
    if ds.h_labels().len() == 2 {
        let tau = prob.target.taus[0];
        lower = vec![Complex64::new((PI / tau).powi(2), 0.0)];
    } else if ds.classes().len() == 1 {
        lower = vec![Complex64::new(0.0, 0.0)];
    } else {
        // the source root: ρ(ζ) = α and ρ = 2πi/P'(ζ) = πi/ζ
        let alpha = prob.target.alphas[0];
        let zeta = Complex64::new(0.0, PI) / alpha;
        lower = vec![-zeta * zeta];
    }
    let p = Polynomial::from_lower_coeffs(&lower)?;
    verify_realization(&p, prob)?;
    Ok(p)
}

/// Seeds the Newton iteration: root multipliers from the residue
/// relations (ρ(source) = Σα⁻, ρ(sink) = −Σα⁺, chains empty in the
/// stable case), roots placed along the mean asymptotic direction of
/// their class at radii matching |P′|, then recentered.
pub fn initial_guess(
    ds: &CombinatorialDataSet,
    target: &AnalyticInvariant,
) -> Result<Vec<Complex64>, RealizeError> {
    let zl = ZoneLabeling::from_data_set(ds)
        .map_err(|e| RealizeError::InvalidDataSet(e.to_string()))?;
    let n = ds.label_count();
    let d = ds.degree();
    // zone αs in the same ascending-j order as the invariant tuple
    let mut alpha_by_even: std::collections::HashMap<usize, Complex64> = Default::default();
    let mut alpha_by_odd: std::collections::HashMap<usize, Complex64> = Default::default();
    let mut idx = 0;
    for z in &zl.zones {
        if let CellKind::AlphaOmega { k, j } = z.cell.kind {
            alpha_by_even.insert(j, target.alphas[idx]);
            alpha_by_odd.insert(k, target.alphas[idx]);
            idx += 1;
        }
    }

    let mut roots = Vec::with_capacity(d);
    for class in ds.classes() {
        let even = class[0] % 2 == 0;
        let mut rho = Complex64::new(0.0, 0.0);
        for &l in class {
            let a = if even {
                alpha_by_even.get(&l)
            } else {
                alpha_by_odd.get(&l)
            };
            match a {
                Some(&a) => rho += a,
                None => {
                    return Err(RealizeError::InvalidDataSet(format!(
                        "label {l} carries no strip invariant"
                    )))
                }
            }
        }
        if !even {
            rho = -rho;
        }
        let dp = Complex64::new(0.0, 2.0 * PI) / rho;
        let radius = (dp.norm() / d as f64).powf(1.0 / (d as f64 - 1.0));
        let mean_dir: Complex64 = class.iter().map(|&l| direction(l, n)).sum();
        let dir = if mean_dir.norm() > 1e-9 {
            mean_dir / mean_dir.norm()
        } else {
            direction(class[0], n)
        };
        roots.push(radius * dir);
    }
    Ok(roots)
}

fn newton_realize(prob: &RealizationProblem) -> Result<Polynomial, RealizeError> {
    let base_roots = initial_guess(&prob.data_set, &prob.target)?;
    let opts = &prob.options;

    // the unperturbed guess lands in the Newton basin most of the time;
    // only fan out into perturbed restarts when it fails
    let mut best_residual = f64::INFINITY;
    match newton_from(&base_roots, prob) {
        Ok(p) => {
            verify_realization(&p, prob)?;
            return Ok(p);
        }
        Err(res) => best_residual = best_residual.min(res),
    }

    let restarts: Vec<usize> = (1..opts.restarts).collect();
    let attempts = par::map_collect(restarts, |r| {
        let mut roots = base_roots.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64));
        for z in &mut roots {
            let scale = 0.08 * r as f64 / opts.restarts as f64 + 0.08;
            *z *= Complex64::new(
                1.0 + rng.random_range(-scale..scale),
                rng.random_range(-scale..scale),
            );
        }
        newton_from(&roots, prob)
    });
    for attempt in attempts {
        match attempt {
            Ok(p) => {
                verify_realization(&p, prob)?;
                return Ok(p);
            }
            Err(res) => best_residual = best_residual.min(res),
        }
    }
    Err(RealizeError::NoConvergence {
        best_residual,
        restarts: opts.restarts,
    })
}

/// One damped Newton path from a root-placement guess; returns the best
/// residual on failure.
fn newton_from(roots: &[Complex64], prob: &RealizationProblem) -> Result<Polynomial, f64> {
    let opts = &prob.options;
    let p0 = Polynomial::from_roots(roots).map_err(|_| f64::INFINITY)?;
    let mut x = coeffs_to_vec(&p0);
    let scale = 1.0 + prob.target.alphas.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut best = f64::INFINITY;

    let Some(mut r) = eval_residual(&x, prob) else {
        return Err(f64::INFINITY);
    };
    for _ in 0..opts.max_iterations {
        let rnorm = max_norm(&r);
        best = best.min(rnorm);
        if rnorm <= opts.tolerance * scale {
            return vec_to_poly(&x).ok_or(best);
        }
        let Some(jac) = jacobian(&x, prob) else {
            return Err(best);
        };
        let Some(step) = solve_linear(&jac, &r) else {
            return Err(best);
        };
        // damped line search, rejecting inconclusive or wrong-class steps
        let mut lambda = 1.0f64;
        let mut advanced = false;
        for _ in 0..8 {
            let trial: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .map(|(xi, si)| xi - lambda * si)
                .collect();
            if let Some(rt) = eval_residual(&trial, prob) {
                if max_norm(&rt) < rnorm * (1.0 - 0.25 * lambda) || max_norm(&rt) < opts.tolerance * scale
                {
                    x = trial;
                    r = rt;
                    advanced = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !advanced {
            return Err(best);
        }
    }
    let rnorm = max_norm(&r);
    if rnorm <= opts.tolerance * scale {
        vec_to_poly(&x).ok_or(rnorm)
    } else {
        Err(best.min(rnorm))
    }
}

fn coeffs_to_vec(p: &Polynomial) -> Vec<f64> {
    p.lower_coeffs()
        .iter()
        .flat_map(|c| [c.re, c.im])
        .collect()
}

fn vec_to_poly(x: &[f64]) -> Option<Polynomial> {
    let lower: Vec<Complex64> = x
        .chunks(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect();
    Polynomial::from_lower_coeffs(&lower).ok()
}

/// Residual of the analytic invariant against the target, or None when
/// the polynomial classifies inconclusively or into a different class.
fn eval_residual(x: &[f64], prob: &RealizationProblem) -> Option<Vec<f64>> {
    let p = vec_to_poly(x)?;
    let Ok(c) = assemble(&p, None, ChecksLevel::Fast) else {
        return None;
    };
    if c.data_set != prob.data_set {
        return None;
    }
    let mut r = Vec::with_capacity(x.len());
    for (a, t) in c.invariant.alphas.iter().zip(prob.target.alphas.iter()) {
        r.push(a.re - t.re);
        r.push(a.im - t.im);
    }
    for (tau, t) in c.invariant.taus.iter().zip(prob.target.taus.iter()) {
        r.push(tau - t);
    }
    Some(r)
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Central-difference Jacobian, columns evaluated in parallel.
fn jacobian(x: &[f64], prob: &RealizationProblem) -> Option<Vec<Vec<f64>>> {
    let n = x.len();
    let h0 = prob.options.fd_step;
    let cols: Vec<Option<Vec<f64>>> = par::map_collect((0..n).collect(), |i| {
        let h = h0 * (1.0 + x[i].abs());
        let mut xp = x.to_vec();
        xp[i] += h;
        let mut xm = x.to_vec();
        xm[i] -= h;
        let rp = eval_residual(&xp, prob)?;
        let rm = eval_residual(&xm, prob)?;
        Some(
            rp.iter()
                .zip(rm.iter())
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect(),
        )
    });
    let mut jac = vec![vec![0.0; n]; n];
    for (i, col) in cols.into_iter().enumerate() {
        let col = col?;
        if col.len() != n {
            return None;
        }
        for (row_idx, v) in col.into_iter().enumerate() {
            jac[row_idx][i] = v;
        }
    }
    Some(jac)
}

/// Gaussian elimination with partial pivoting for the small square system.
fn solve_linear(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b.iter())
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap()
        })?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = m[row][n];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Full-check classification of a candidate and comparison with the
/// target, never returning a wrong-class polynomial silently.
fn verify_realization(
    p: &Polynomial,
    prob: &RealizationProblem,
) -> Result<Classification, RealizeError> {
    let c = assemble(p, None, ChecksLevel::Full)?;
    if c.data_set != prob.data_set {
        return Err(RealizeError::InvalidDataSet(format!(
            "converged polynomial classifies as {} instead of the target {}",
            c.data_set.to_canonical_json(),
            prob.data_set.to_canonical_json()
        )));
    }
    let scale = 1.0
        + prob
            .target
            .alphas
            .iter()
            .map(|a| a.norm())
            .chain(prob.target.taus.iter().copied())
            .fold(0.0, f64::max);
    let mut err = 0.0f64;
    for (a, t) in c.invariant.alphas.iter().zip(prob.target.alphas.iter()) {
        err = err.max((a - t).norm());
    }
    for (tau, t) in c.invariant.taus.iter().zip(prob.target.taus.iter()) {
        err = err.max((tau - t).abs());
    }
    if err > 1e-8 * scale {
        return Err(RealizeError::NoConvergence {
            best_residual: err,
            restarts: 0,
        });
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::invariants::classify;

    fn ds(d: usize, classes: &[&[usize]], h: &[usize]) -> CombinatorialDataSet {
        CombinatorialDataSet::new(d, classes.iter().map(|c| c.to_vec()).collect(), h.to_vec())
            .unwrap()
    }

    #[test]
    fn d2_alpha_i_pi_gives_z2_minus_1() {
        let prob = RealizationProblem::new(
            ds(2, &[&[0], &[1]], &[]),
            AnalyticInvariant {
                alphas: vec![c64(0.0, PI)],
                taus: vec![],
            },
        );
        let p = realize(&prob).unwrap();
        assert!((p.coeffs()[0] - c64(-1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn d2_alpha_2i_pi_gives_quarter() {
        let prob = RealizationProblem::new(
            ds(2, &[&[0], &[1]], &[]),
            AnalyticInvariant {
                alphas: vec![c64(0.0, 2.0 * PI)],
                taus: vec![],
            },
        );
        let p = realize(&prob).unwrap();
        // roots ±1/2
        assert!((p.coeffs()[0] - c64(-0.25, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn d2_homoclinic_tau_pi_gives_z2_plus_1() {
        let prob = RealizationProblem::new(
            ds(2, &[&[0, 1]], &[0, 1]),
            AnalyticInvariant {
                alphas: vec![],
                taus: vec![PI],
            },
        );
        let p = realize(&prob).unwrap();
        assert!((p.coeffs()[0] - c64(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn d2_single_class_gives_z2() {
        let prob = RealizationProblem::new(
            ds(2, &[&[0, 1]], &[]),
            AnalyticInvariant {
                alphas: vec![],
                taus: vec![],
            },
        );
        let p = realize(&prob).unwrap();
        assert!(p.coeffs()[0].norm() < 1e-12);
    }

    #[test]
    fn round_trip_d3_examples() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 8 {
            let lower: Vec<Complex64> = (0..2)
                .map(|_| c64(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)))
                .collect();
            let p = Polynomial::from_lower_coeffs(&lower).unwrap();
            let Ok(c) = classify(&p) else { continue };
            if !c.data_set.is_structurally_stable() {
                continue;
            }
            done += 1;
            let prob = RealizationProblem::new(c.data_set.clone(), c.invariant.clone());
            let q = realize(&prob).unwrap();
            let err = p
                .coeffs()
                .iter()
                .zip(q.coeffs())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-6, "coefficient error {err}");
        }
    }

    #[test]
    fn scaling_law_for_d2() {
        // α ↦ α/c scales the roots by c (from ρ = 2πi/P′ linearity)
        let base = c64(0.3, PI);
        let c = 3.0;
        let p1 = realize(&RealizationProblem::new(
            ds(2, &[&[0], &[1]], &[]),
            AnalyticInvariant {
                alphas: vec![base],
                taus: vec![],
            },
        ))
        .unwrap();
        let p2 = realize(&RealizationProblem::new(
            ds(2, &[&[0], &[1]], &[]),
            AnalyticInvariant {
                alphas: vec![base / c],
                taus: vec![],
            },
        ))
        .unwrap();
        // z² − ζ²: the constant coefficient scales by c²
        let ratio = p2.coeffs()[0] / p1.coeffs()[0];
        assert!((ratio - c64(c * c, 0.0)).norm() < 1e-9, "ratio {ratio}");
    }

    #[test]
    fn refuses_non_generic_stratum_for_d3() {
        // a d=3 target with a homoclinic pair: 2s + h = 3 ≠ 4
        let data = ds(3, &[&[0, 1], &[2], &[3]], &[0, 1]);
        assert!(data.is_valid());
        let prob = RealizationProblem::new(
            data,
            AnalyticInvariant {
                alphas: vec![c64(0.0, 1.0)],
                taus: vec![1.0],
            },
        );
        match realize(&prob) {
            Err(RealizeError::NonGenericStratum {
                constraints,
                unknowns,
            }) => {
                assert_eq!((constraints, unknowns), (3, 4));
            }
            other => panic!("expected stratum refusal, got {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_analytic_tuples() {
        let data = ds(2, &[&[0], &[1]], &[]);
        let bad = RealizationProblem::new(
            data,
            AnalyticInvariant {
                alphas: vec![c64(1.0, -0.1)],
                taus: vec![],
            },
        );
        assert!(matches!(
            realize(&bad),
            Err(RealizeError::AlphaNotInUpperHalfPlane(_, _))
        ));
    }
}
