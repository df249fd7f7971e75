//! Polynomial arithmetic, root finding with multiplicities, equilibrium
//! typing, dynamical residues, and affine normalization.
//!
//! Everything downstream consumes the vector field ż = P(z) through the
//! types here. `P` is always monic and centered (leading coefficient 1,
//! degree−1 coefficient 0); arbitrary polynomials enter only through
//! [`normalize`].

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Relative tolerance on Re P'(ζ) below which a simple equilibrium is
/// classified as a center. Centers are a codimension-1 phenomenon, so an
/// exact-zero test is meaningless in floating point; the tracer's
/// topological evidence cross-validates this choice downstream.
pub const CENTER_RE_TOL: f64 = 1e-9;

/// Default relative clustering tolerance for multiple-root recovery.
pub const CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("polynomial is not monic: leading coefficient {0}")]
    NotMonic(Complex64),
    #[error("polynomial is not centered: coefficient of z^{0} is {1}")]
    NotCentered(usize, Complex64),
    #[error("leading coefficient is zero")]
    ZeroLeadingCoefficient,
    #[error("root finder did not converge after {iterations} iterations for {poly}")]
    RootsDidNotConverge { iterations: usize, poly: String },
    #[error("equilibrium at {0} claims multiplicity 1 but P'(ζ) ≈ 0")]
    InconsistentMultiplicity(Complex64),
    #[error("equilibrium at {0} is degenerate: P'(ζ) ≈ 0 (multiplicity ≥ 2)")]
    DegenerateCenter(Complex64),
    #[error("{0}")]
    NotACenter(String),
}

/// Monic centered polynomial of degree d ≥ 2, coefficients in ascending
/// powers (index n holds the coefficient of z^n).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Builds from ascending coefficients, enforcing the monic and centered
    /// invariants exactly.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, PolyError> {
        if coeffs.len() < 3 {
            return Err(PolyError::DegreeTooSmall(coeffs.len().saturating_sub(1)));
        }
        let d = coeffs.len() - 1;
        if coeffs[d] != Complex64::new(1.0, 0.0) {
            return Err(PolyError::NotMonic(coeffs[d]));
        }
        if coeffs[d - 1] != Complex64::new(0.0, 0.0) {
            return Err(PolyError::NotCentered(d - 1, coeffs[d - 1]));
        }
        Ok(Polynomial { coeffs })
    }

    /// Monic centered polynomial from the d−1 free coefficients a_0..a_{d−2}.
    pub fn from_lower_coeffs(lower: &[Complex64]) -> Result<Self, PolyError> {
        let mut coeffs = lower.to_vec();
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.push(Complex64::new(1.0, 0.0));
        Polynomial::new(coeffs)
    }

    /// Monic centered polynomial with the given roots. The roots are shifted
    /// by their mean so the result is centered exactly.
    pub fn from_roots(roots: &[Complex64]) -> Result<Self, PolyError> {
        let d = roots.len();
        if d < 2 {
            return Err(PolyError::DegreeTooSmall(d));
        }
        let mean = roots.iter().sum::<Complex64>() / d as f64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        let mut deg = 0;
        for r in roots {
            let r = r - mean;
            // multiply running product by (z - r)
            for i in (0..=deg).rev() {
                let c = coeffs[i];
                coeffs[i + 1] += c;
                coeffs[i] = -r * c;
            }
            deg += 1;
        }
        // kill the centering coefficient exactly; it is zero up to rounding
        coeffs[d - 1] = Complex64::new(0.0, 0.0);
        coeffs[d] = Complex64::new(1.0, 0.0);
        Polynomial::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Free coefficients a_0..a_{d−2}.
    pub fn lower_coeffs(&self) -> &[Complex64] {
        &self.coeffs[..self.coeffs.len() - 2]
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }

    /// P(z) and P'(z) in one Horner pass.
    pub fn eval_with_deriv(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Taylor coefficients of P about `center`, ascending.
    pub fn taylor_at(&self, center: Complex64) -> Vec<Complex64> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        // repeated synthetic division by (z - center)
        for i in 0..n - 1 {
            for j in (i..n - 1).rev() {
                let next = c[j + 1];
                c[j] += center * next;
            }
        }
        c
    }

    /// A radius bounding all roots (Cauchy bound).
    pub fn root_bound(&self) -> f64 {
        let d = self.degree();
        1.0 + self.coeffs[..d].iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn display_coeffs(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| format!("{}{:+}i", c.re, c.im))
            .collect();
        format!("[{}]", parts.join(", "))
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Equilibrium point type by the sign of Re P'(ζ); `Multiple` for m ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquilibriumKind {
    Source,
    Sink,
    Center,
    Multiple,
}

/// A root of P with multiplicity, spectral type, and dynamical residue.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub location: Complex64,
    pub multiplicity: usize,
    pub kind: EquilibriumKind,
    /// P'(ζ); meaningful for simple equilibria only.
    pub derivative: Complex64,
    /// Dynamical residue ρ(ζ) = 2πi Res(1/P, ζ).
    pub residue: Complex64,
    /// Radius of the root cluster this equilibrium was condensed from
    /// (zero for well-separated simple roots).
    pub cluster_radius: f64,
}

/// Finds all equilibria of P with multiplicities recovered by clustering
/// roots closer than `cluster_tol` (relative to the root scale).
///
/// The residues are populated via [`residue_of`]. Multiplicities sum to d.
pub fn find_roots(p: &Polynomial, cluster_tol: f64) -> Result<Vec<Equilibrium>, PolyError> {
    let raw = aberth_roots(p, 14, 1000)?;
    let scale = raw.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = cluster_tol * scale;

    // union-find clustering on pairwise distance
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if (raw[i] - raw[j]).norm() < tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    let mut cluster_of_root = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if cluster_of_root[r] == usize::MAX {
            cluster_of_root[r] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[cluster_of_root[r]].push(raw[i]);
    }

    let mut eqs = Vec::with_capacity(clusters.len());
    for members in &clusters {
        let m = members.len();
        let mut centroid = members.iter().sum::<Complex64>() / m as f64;
        if m >= 2 {
            // P^{(m-1)} has a simple root at an exact m-fold root; polishing
            // the centroid on it recovers machine precision there
            centroid = polish_on_derivative(p, centroid, m - 1);
        }
        let radius = members
            .iter()
            .map(|z| (z - centroid).norm())
            .fold(0.0, f64::max);
        let (_, dp) = p.eval_with_deriv(centroid);
        let kind = if m >= 2 {
            EquilibriumKind::Multiple
        } else {
            if dp.norm() <= 1e-12 * scale.powi(p.degree() as i32 - 1) {
                return Err(PolyError::InconsistentMultiplicity(centroid));
            }
            classify_simple(dp)
        };
        let mut eq = Equilibrium {
            location: centroid,
            multiplicity: m,
            kind,
            derivative: dp,
            residue: Complex64::new(0.0, 0.0),
            cluster_radius: radius,
        };
        eq.residue = residue_of(p, &eq)?;
        eqs.push(eq);
    }
    // deterministic order: by (re, im) of location
    eqs.sort_by(|a, b| {
        (a.location.re, a.location.im)
            .partial_cmp(&(b.location.re, b.location.im))
            .unwrap()
    });
    Ok(eqs)
}

fn polish_on_derivative(p: &Polynomial, start: Complex64, order: usize) -> Complex64 {
    let mut z = start;
    for _ in 0..8 {
        let t = p.taylor_at(z);
        if t.len() <= order + 1 {
            break;
        }
        // k! cancels between numerator and denominator up to the factor k+1
        let f = t[order];
        let df = t[order + 1] * (order as f64 + 1.0);
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        z -= step;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

fn classify_simple(dp: Complex64) -> EquilibriumKind {
    if dp.re.abs() <= CENTER_RE_TOL * dp.norm() {
        EquilibriumKind::Center
    } else if dp.re > 0.0 {
        EquilibriumKind::Source
    } else {
        EquilibriumKind::Sink
    }
}

/// Aberth–Ehrlich simultaneous iteration with lightly perturbed initial
/// guesses on a circle. Deterministic: the perturbation is a fixed
/// low-discrepancy jitter, not an RNG draw.
fn aberth_roots(
    p: &Polynomial,
    digits: u32,
    max_iter: usize,
) -> Result<Vec<Complex64>, PolyError> {
    let d = p.degree();
    let r = p.root_bound() * 0.7;
    let mut z: Vec<Complex64> = (0..d)
        .map(|i| {
            // irrational stride avoids the symmetric stalls of exact roots
            // of unity on polynomials like z^d - c
            let theta = 2.0 * PI * (i as f64 + 0.5) / d as f64 + 0.4371 * (i as f64).sin();
            Complex64::from_polar(r, theta)
        })
        .collect();
    let eps = 10f64.powi(-(digits as i32));

    // |P(z)| below this bound is indistinguishable from zero in f64; used
    // as the stopping criterion at (near-)multiple roots where the Aberth
    // steps stall around sqrt(machine epsilon)
    let eval_floor = |z: Complex64| -> f64 {
        let mut bound = 0.0;
        let mut zk = 1.0;
        for c in p.coeffs() {
            bound += c.norm() * zk;
            zk *= z.norm();
        }
        8.0 * f64::EPSILON * bound * (d as f64)
    };

    for _ in 0..max_iter {
        let mut done = true;
        let mut next = z.clone();
        for i in 0..d {
            let (pv, dv) = p.eval_with_deriv(z[i]);
            if pv.norm() <= eval_floor(z[i]) {
                continue;
            }
            let newton = pv / dv;
            let mut rep = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    rep += 1.0 / (z[i] - z[j]);
                }
            }
            let denom = 1.0 - newton * rep;
            let step = if denom.norm() < 1e-300 {
                newton
            } else {
                newton / denom
            };
            next[i] = z[i] - step;
            if step.norm() > eps * (1.0 + z[i].norm()) {
                done = false;
            }
        }
        z = next;
        if done {
            return Ok(z);
        }
    }
    Err(PolyError::RootsDidNotConverge {
        iterations: max_iter,
        poly: p.display_coeffs(),
    })
}

/// Dynamical residue ρ(ζ) = 2πi Res(1/P, ζ).
///
/// For a simple root this is 2πi/P'(ζ). For multiplicity m ≥ 2 the residue
/// is the (m−1)-st coefficient of the reciprocal of g(z) = P(z)/(z−ζ)^m,
/// computed from the Taylor expansion of P about ζ with the first m
/// coefficients projected to zero (they vanish identically for an exact
/// multiple root; for a numerical cluster they are below the cluster
/// tolerance).
pub fn residue_of(p: &Polynomial, e: &Equilibrium) -> Result<Complex64, PolyError> {
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    if e.multiplicity == 1 {
        let (_, dp) = p.eval_with_deriv(e.location);
        if dp.norm() == 0.0 {
            return Err(PolyError::InconsistentMultiplicity(e.location));
        }
        return Ok(two_pi_i / dp);
    }
    let m = e.multiplicity;
    let taylor = p.taylor_at(e.location);
    // g = P/(z-ζ)^m has Taylor coefficients taylor[m..]
    let g: Vec<Complex64> = taylor[m..].to_vec();
    let inv = series_reciprocal(&g, m);
    Ok(two_pi_i * inv[m - 1])
}

/// First `n` coefficients of 1/g for a power series with g[0] ≠ 0.
fn series_reciprocal(g: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut r = vec![Complex64::new(0.0, 0.0); n];
    r[0] = 1.0 / g[0];
    for k in 1..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..=k {
            let gj = if j < g.len() {
                g[j]
            } else {
                Complex64::new(0.0, 0.0)
            };
            acc += gj * r[k - j];
        }
        r[k] = -acc / g[0];
    }
    r
}

/// Period of the periodic trajectories around a center:
/// τ = ±2πi/P'(ζ), sign chosen so that τ > 0.
pub fn period_of_center(p: &Polynomial, e: &Equilibrium) -> Result<f64, PolyError> {
    if e.kind != EquilibriumKind::Center || e.multiplicity != 1 {
        return Err(PolyError::NotACenter(format!(
            "equilibrium at {} is not a simple center",
            e.location
        )));
    }
    let (_, dp) = p.eval_with_deriv(e.location);
    if dp.im == 0.0 {
        return Err(PolyError::DegenerateCenter(e.location));
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let tau = if dp.im > 0.0 {
        two_pi_i / dp
    } else {
        -two_pi_i / dp
    };
    Ok(tau.re)
}

/// An affine change of variable w = A·z + B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub a: Complex64,
    pub b: Complex64,
}

impl AffineMap {
    pub fn identity() -> Self {
        AffineMap {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }
}

/// Push-forward of the vector field q(z) d/dz under the affine map
/// w = Az + B: the transformation rule for vector fields, which multiplies
/// by A and substitutes, not mere substitution.
fn push_forward(q: &[Complex64], map: &AffineMap) -> Vec<Complex64> {
    // p̃(w) = A · q((w − B)/A) = A · q(w/A − B/A): shift the argument by
    // −B/A, then scale by 1/A, then multiply the field by A
    let n = q.len();
    let c = taylor_shift(q, -map.b / map.a);
    let mut out = Vec::with_capacity(n);
    let mut ak = Complex64::new(1.0, 0.0);
    for k in 0..n {
        out.push(map.a * c[k] / ak);
        ak *= map.a;
    }
    out
}

/// Coefficients of q(z + s), ascending.
fn taylor_shift(q: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let n = q.len();
    let mut c = q.to_vec();
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            let next = c[j + 1];
            c[j] += s * next;
        }
    }
    c
}

/// Result of normalizing an arbitrary polynomial vector field.
#[derive(Debug, Clone)]
pub struct Normalization {
    /// The canonical monic centered representative.
    pub polynomial: Polynomial,
    /// The affine map w = Az + B realizing it.
    pub map: AffineMap,
    /// All d−1 candidate normalizations (the choices of (d−1)-st root of
    /// the leading coefficient), canonical first.
    pub candidates: Vec<(Polynomial, AffineMap)>,
}

/// Conjugates an arbitrary degree-d polynomial vector field (ascending
/// coefficients, leading nonzero, d ≥ 2) to a monic centered one.
///
/// Among the d−1 choices of (d−1)-st root for A, the canonical pick is the
/// one with the smallest non-negative argument.
pub fn normalize(q: &[Complex64]) -> Result<Normalization, PolyError> {
    if q.len() < 3 {
        return Err(PolyError::DegreeTooSmall(q.len().saturating_sub(1)));
    }
    let d = q.len() - 1;
    let cd = q[d];
    if cd.norm() == 0.0 {
        return Err(PolyError::ZeroLeadingCoefficient);
    }
    // A^{d-1} = c_d; enumerate all roots, sorted by argument in [0, 2π)
    let root_count = d - 1;
    let modulus = cd.norm().powf(1.0 / root_count as f64);
    let base_arg = cd.arg();
    let mut all_a: Vec<Complex64> = (0..root_count)
        .map(|k| {
            Complex64::from_polar(
                modulus,
                (base_arg + 2.0 * PI * k as f64) / root_count as f64,
            )
        })
        .map(|a| {
            let mut arg = a.arg();
            if arg < 0.0 {
                arg += 2.0 * PI;
            }
            Complex64::from_polar(modulus, arg)
        })
        .collect();
    all_a.sort_by(|x, y| {
        let (ax, ay) = (pos_arg(*x), pos_arg(*y));
        ax.partial_cmp(&ay).unwrap()
    });

    let mut candidates = Vec::with_capacity(root_count);
    for a in all_a {
        // B chosen so the image is centered: B = c_{d-1}·A/(d·c_d)
        let b = q[d - 1] * a / (d as f64 * cd);
        let map = AffineMap { a, b };
        let mut coeffs = push_forward(q, &map);
        // the monic and centered coefficients are exact up to rounding;
        // snap them so the invariants hold bit-exactly
        let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        debug_assert!((coeffs[d] - Complex64::new(1.0, 0.0)).norm() < 1e-9 * scale);
        debug_assert!(coeffs[d - 1].norm() < 1e-9 * scale);
        coeffs[d] = Complex64::new(1.0, 0.0);
        coeffs[d - 1] = Complex64::new(0.0, 0.0);
        let poly = Polynomial::new(coeffs)?;
        candidates.push((poly, map));
    }
    let (polynomial, map) = candidates[0].clone();
    Ok(Normalization {
        polynomial,
        map,
        candidates,
    })
}

impl Polynomial {
    /// Canonical polynomial JSON: `{"d": …, "coeffs": [{"re","im"}, …]}`,
    /// ascending powers.
    pub fn to_canonical_json(&self) -> String {
        format!(
            "{{\"d\":{},\"coeffs\":{}}}",
            self.degree(),
            crate::json::fmt_complex_list(&self.coeffs)
        )
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<Self, String> {
        let d = crate::json::as_usize(crate::json::get(v, "d")?, "d")?;
        let coeffs_v = crate::json::as_array(crate::json::get(v, "coeffs")?, "coeffs")?;
        let coeffs: Result<Vec<Complex64>, String> = coeffs_v
            .iter()
            .map(|c| crate::json::as_complex(c, "coefficient"))
            .collect();
        let coeffs = coeffs?;
        if coeffs.len() != d + 1 {
            return Err(format!(
                "degree {d} needs {} coefficients, got {}",
                d + 1,
                coeffs.len()
            ));
        }
        Polynomial::new(coeffs).map_err(|e| e.to_string())
    }
}

fn pos_arg(z: Complex64) -> f64 {
    let a = z.arg();
    // snap tiny negative rounding to zero so "smallest non-negative" is stable
    if a < -1e-12 {
        a + 2.0 * PI
    } else if a < 0.0 {
        0.0
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn poly(coeffs: &[(f64, f64)]) -> Polynomial {
        Polynomial::new(coeffs.iter().map(|&(re, im)| c64(re, im)).collect()).unwrap()
    }

    /// Independent oracle: ∮ dz/P on a circle by the trapezoid rule,
    /// which is exponentially accurate for analytic integrands.
    fn contour_residue(p: &Polynomial, center: Complex64, radius: f64) -> Complex64 {
        let n = 4096;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let theta = 2.0 * PI * k as f64 / n as f64;
            let dir = Complex64::from_polar(1.0, theta);
            let z = center + radius * dir;
            let dz_dtheta = Complex64::new(0.0, 1.0) * radius * dir;
            acc += dz_dtheta / p.eval(z);
        }
        acc * (2.0 * PI / n as f64)
    }

    #[test]
    fn finds_roots_of_z2_minus_1() {
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let eqs = find_roots(&p, CLUSTER_TOL).unwrap();
        assert_eq!(eqs.len(), 2);
        let minus = &eqs[0];
        let plus = &eqs[1];
        assert!((minus.location - c64(-1.0, 0.0)).norm() < 1e-12);
        assert!((plus.location - c64(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(minus.kind, EquilibriumKind::Sink);
        assert_eq!(plus.kind, EquilibriumKind::Source);
        assert!((plus.derivative - c64(2.0, 0.0)).norm() < 1e-10);
        assert!((minus.derivative - c64(-2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn finds_double_root_of_z2() {
        let p = poly(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let eqs = find_roots(&p, CLUSTER_TOL).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].multiplicity, 2);
        assert_eq!(eqs[0].kind, EquilibriumKind::Multiple);
        assert!(eqs[0].location.norm() < 1e-7);
    }

    #[test]
    fn cubic_roots_match_closed_form() {
        // z³ − c·z with c = 3 + ε has roots 0, ±√c
        let eps = 1e-3;
        let c = 3.0 + eps;
        let p = poly(&[(0.0, 0.0), (-c, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let eqs = find_roots(&p, CLUSTER_TOL).unwrap();
        assert_eq!(eqs.len(), 3);
        let sq = c.sqrt();
        let expected = [c64(-sq, 0.0), c64(0.0, 0.0), c64(sq, 0.0)];
        for (eq, want) in eqs.iter().zip(expected) {
            assert!((eq.location - want).norm() < 1e-9, "root {}", eq.location);
        }
        assert_eq!(eqs[1].kind, EquilibriumKind::Sink);
        assert_eq!(eqs[0].kind, EquilibriumKind::Source);
        assert_eq!(eqs[2].kind, EquilibriumKind::Source);
    }

    #[test]
    fn random_cubics_match_cardano() {
        // depressed cubic z³ + pz + q solved by Cardano's formula
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let pc = c64(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let qc = c64(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let p = Polynomial::new(vec![qc, pc, c64(0.0, 0.0), c64(1.0, 0.0)]).unwrap();
            let disc = (qc / 2.0) * (qc / 2.0) + (pc / 3.0) * (pc / 3.0) * (pc / 3.0);
            let u = (-qc / 2.0 + disc.sqrt()).powf(1.0 / 3.0);
            let u = if u.norm() < 1e-12 {
                (-qc / 2.0 - disc.sqrt()).powf(1.0 / 3.0)
            } else {
                u
            };
            let v = -pc / (3.0 * u);
            let omega = c64(-0.5, 3f64.sqrt() / 2.0);
            let mut expected = vec![u + v, omega * u + v / omega, omega * omega * u + v / (omega * omega)];
            let eqs = find_roots(&p, CLUSTER_TOL).unwrap();
            let mut got: Vec<Complex64> = eqs.iter().map(|e| e.location).collect();
            // greedy match
            for g in &mut got {
                let (idx, _) = expected
                    .iter()
                    .enumerate()
                    .min_by(|(_, a), (_, b)| {
                        (*g - **a).norm().partial_cmp(&(*g - **b).norm()).unwrap()
                    })
                    .unwrap();
                assert!((*g - expected[idx]).norm() < 1e-8);
                expected.remove(idx);
            }
        }
    }

    #[test]
    fn residue_examples() {
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let eqs = find_roots(&p, CLUSTER_TOL).unwrap();
        let plus = eqs.iter().find(|e| e.location.re > 0.0).unwrap();
        assert!((plus.residue - c64(0.0, PI)).norm() < 1e-12);

        let p = poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let eqs = find_roots(&p, CLUSTER_TOL).unwrap();
        let at_i = eqs.iter().find(|e| e.location.im > 0.0).unwrap();
        assert!((at_i.residue - c64(PI, 0.0)).norm() < 1e-12);

        // z³: residue of z^{-3} has no 1/z term
        let p = poly(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let eqs = find_roots(&p, CLUSTER_TOL).unwrap();
        assert_eq!(eqs[0].multiplicity, 3);
        assert!(eqs[0].residue.norm() < 1e-9);
    }

    #[test]
    fn multiple_residue_matches_contour_quadrature() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            // roots: one double, two simple, centered by construction
            let a = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let b = c64(rng.random_range(1.5..2.5), rng.random_range(-1.0..1.0));
            let cr = -(a * 2.0 + b); // forces sum 2a + b + c = 0
            let p = Polynomial::from_roots(&[a, a, b, cr]).unwrap();
            let eqs = find_roots(&p, 1e-5).unwrap();
            let double = eqs.iter().find(|e| e.multiplicity == 2);
            let Some(double) = double else {
                continue; // cluster may split if the random draw put b, c too close to a
            };
            let sep = eqs
                .iter()
                .filter(|e| e.multiplicity == 1)
                .map(|e| (e.location - double.location).norm())
                .fold(f64::INFINITY, f64::min);
            let oracle = contour_residue(&p, double.location, sep * 0.5);
            let rel = (double.residue - oracle).norm() / oracle.norm().max(1e-30);
            assert!(rel < 1e-8, "rel err {rel}");
        }
    }

    #[test]
    fn residue_sum_vanishes() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in 2..=5usize {
            for _ in 0..60 {
                let lower: Vec<Complex64> = (0..d - 1)
                    .map(|_| c64(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
                    .collect();
                let p = Polynomial::from_lower_coeffs(&lower).unwrap();
                let eqs = find_roots(&p, CLUSTER_TOL).unwrap();
                let total: Complex64 = eqs.iter().map(|e| e.residue).sum();
                let max_rho = eqs.iter().map(|e| e.residue.norm()).fold(0.0, f64::max);
                assert!(
                    total.norm() <= 1e-9 * max_rho.max(1e-12),
                    "residue sum {} for d={}",
                    total,
                    d
                );
            }
        }
    }

    #[test]
    fn period_examples() {
        let p = poly(&[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let eqs = find_roots(&p, CLUSTER_TOL).unwrap();
        for e in &eqs {
            assert_eq!(e.kind, EquilibriumKind::Center);
            let tau = period_of_center(&p, e).unwrap();
            assert!((tau - PI).abs() < 1e-12);
        }
        let p = poly(&[(4.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let eqs = find_roots(&p, CLUSTER_TOL).unwrap();
        let top = eqs.iter().find(|e| e.location.im > 0.0).unwrap();
        let tau = period_of_center(&p, top).unwrap();
        assert!((tau - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_identity_on_monic_centered() {
        let q = vec![c64(-1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)];
        let n = normalize(&q).unwrap();
        assert_eq!(n.map, AffineMap::identity());
        assert_eq!(n.polynomial.coeffs(), q.as_slice());
    }

    #[test]
    fn normalize_scales_2z2() {
        // push-forward of 2z² d/dz under z ↦ 2z is w² d/dw
        let q = vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(2.0, 0.0)];
        let n = normalize(&q).unwrap();
        assert!((n.map.a - c64(2.0, 0.0)).norm() < 1e-12);
        assert!(n.map.b.norm() < 1e-12);
        assert!((n.polynomial.coeffs()[0]).norm() < 1e-12);
    }

    #[test]
    fn normalize_completes_square_and_preserves_residues() {
        // z² + 2z → z² − 1 under z ↦ z + 1
        let q = vec![c64(0.0, 0.0), c64(2.0, 0.0), c64(1.0, 0.0)];
        let n = normalize(&q).unwrap();
        assert!((n.map.a - c64(1.0, 0.0)).norm() < 1e-12);
        assert!((n.map.b - c64(1.0, 0.0)).norm() < 1e-12);
        assert!((n.polynomial.coeffs()[0] - c64(-1.0, 0.0)).norm() < 1e-12);

        // residues are invariant under affine conjugacy of the field:
        // roots of q: 0, −2 with q' = 2z+2 → residues ±πi; same set for z²−1
        let eqs = find_roots(&n.polynomial, CLUSTER_TOL).unwrap();
        let mut rs: Vec<Complex64> = eqs.iter().map(|e| e.residue).collect();
        rs.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((rs[0] - c64(0.0, -PI)).norm() < 1e-10);
        assert!((rs[1] - c64(0.0, PI)).norm() < 1e-10);
    }

    #[test]
    fn normalize_idempotent_and_candidate_count() {
        let q = vec![c64(1.0, 2.0), c64(0.5, 0.0), c64(0.0, -1.0), c64(3.0, 1.0)];
        let n = normalize(&q).unwrap();
        assert_eq!(n.candidates.len(), 2);
        let coeffs: Vec<Complex64> = n.polynomial.coeffs().to_vec();
        let again = normalize(&coeffs).unwrap();
        assert_eq!(again.map, AffineMap::identity());
        for (a, b) in again.polynomial.coeffs().iter().zip(n.polynomial.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn taylor_shift_matches_eval() {
        let p = poly(&[(1.0, 0.5), (-2.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let center = c64(0.3, -0.7);
        let t = p.taylor_at(center);
        let z = c64(0.11, 0.23);
        let direct = p.eval(center + z);
        let via = horner(&t, z);
        assert!((direct - via).norm() < 1e-12);
    }
}
