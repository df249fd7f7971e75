//! SVG emission: the disk model of a combinatorial data set and the phase
//! portrait of a classified polynomial.
//!
//! Disk-model conventions: the unit circle with the division points δ_ℓ,
//! class hulls drawn as geodesics of the Poincaré metric, and essential
//! transversals as grey dashed geodesics joining the midpoints of the end
//! arcs. Phase portraits draw the traced separatrices (landing solid blue,
//! homoclinic solid red) and mark roots by kind.

use crate::comb::{CombinatorialDataSet, Label};
use crate::invariants::Classification;
use crate::poly::EquilibriumKind;
use crate::tracer::Fate;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write;

/// Rendering mode of the `render` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    DiskModel,
    PhasePortrait,
}

/// Canvas size and feature flags.
#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub mode: RenderMode,
    pub size: u32,
    pub transversals: bool,
    pub ends: bool,
    pub labels: bool,
    pub residues: bool,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            mode: RenderMode::DiskModel,
            size: 640,
            transversals: true,
            ends: false,
            labels: true,
            residues: false,
        }
    }
}

fn fnum(x: f64) -> String {
    format!("{:.4}", x)
}

struct Canvas {
    body: String,
    size: f64,
    scale: f64,
    center: Complex64,
}

impl Canvas {
    fn new(size: u32, world_center: Complex64, world_radius: f64) -> Canvas {
        Canvas {
            body: String::new(),
            size: size as f64,
            scale: size as f64 / (2.0 * world_radius),
            center: world_center,
        }
    }

    fn map(&self, z: Complex64) -> (f64, f64) {
        let w = (z - self.center) * self.scale;
        (self.size / 2.0 + w.re, self.size / 2.0 - w.im)
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n<rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>\n{body}</svg>\n",
            s = self.size,
            body = self.body
        )
    }

    fn circle(&mut self, z: Complex64, r_px: f64, style: &str) {
        let (x, y) = self.map(z);
        writeln!(
            self.body,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" {}/>",
            fnum(x),
            fnum(y),
            fnum(r_px),
            style
        )
        .unwrap();
    }

    fn line(&mut self, a: Complex64, b: Complex64, style: &str) {
        let (x1, y1) = self.map(a);
        let (x2, y2) = self.map(b);
        writeln!(
            self.body,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {}/>",
            fnum(x1),
            fnum(y1),
            fnum(x2),
            fnum(y2),
            style
        )
        .unwrap();
    }

    fn polyline(&mut self, points: &[Complex64], style: &str) {
        if points.len() < 2 {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|&z| {
                let (x, y) = self.map(z);
                format!("{},{}", fnum(x), fnum(y))
            })
            .collect();
        writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" {}/>",
            coords.join(" "),
            style
        )
        .unwrap();
    }

    fn text(&mut self, z: Complex64, content: &str, style: &str) {
        let (x, y) = self.map(z);
        writeln!(
            self.body,
            "<text x=\"{}\" y=\"{}\" {}>{}</text>",
            fnum(x),
            fnum(y),
            style,
            content
        )
        .unwrap();
    }

    /// Geodesic of the Poincaré disk between two boundary points, as a
    /// circular arc orthogonal to the unit circle (a diameter when the
    /// points are antipodal).
    fn geodesic(&mut self, a: Complex64, b: Complex64, style: &str) {
        let det = a.re * b.im - a.im * b.re;
        if det.abs() < 1e-9 {
            self.line(a, b, style);
            return;
        }
        // orthogonality to the unit circle: Re(a·c̄) = Re(b·c̄) = 1
        let cx = (b.im - a.im) / det;
        let cy = (a.re - b.re) / det;
        let c = Complex64::new(cx, cy);
        let r = ((c.norm_sqr()) - 1.0).max(0.0).sqrt();
        let theta_a = (a - c).arg();
        let theta_b = (b - c).arg();
        let mut delta = theta_b - theta_a;
        while delta > PI {
            delta -= 2.0 * PI;
        }
        while delta <= -PI {
            delta += 2.0 * PI;
        }
        // svg y-axis points down, so a counter-clockwise world arc has
        // sweep flag 0
        let sweep = if delta > 0.0 { 0 } else { 1 };
        let (x1, y1) = self.map(a);
        let (x2, y2) = self.map(b);
        let r_px = r * self.scale;
        writeln!(
            self.body,
            "<path d=\"M {} {} A {} {} 0 0 {} {} {}\" fill=\"none\" {}/>",
            fnum(x1),
            fnum(y1),
            fnum(r_px),
            fnum(r_px),
            sweep,
            fnum(x2),
            fnum(y2),
            style
        )
        .unwrap();
    }
}

fn division_point(l: Label, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * l as f64 / n as f64)
}

fn end_midpoint(l: Label, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (l as f64 - 0.5) / n as f64)
}

/// Disk model of a data set: unit circle, division points, hull
/// geodesics, and (optionally) the essential transversals dashed in grey.
pub fn disk_model(ds: &CombinatorialDataSet, spec: &RenderSpec) -> String {
    let n = ds.label_count();
    let mut canvas = Canvas::new(spec.size, Complex64::new(0.0, 0.0), 1.25);
    canvas.circle(
        Complex64::new(0.0, 0.0),
        canvas.scale,
        "fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"",
    );

    // hull geodesics: consecutive class members, homoclinic pairs in red
    for class in ds.classes() {
        if class.len() < 2 {
            continue;
        }
        let homoclinic = class.iter().all(|&l| ds.is_homoclinic(l));
        let style = if homoclinic {
            "stroke=\"#cc2222\" stroke-width=\"1.6\""
        } else {
            "stroke=\"#222222\" stroke-width=\"1.4\""
        };
        for (i, &l) in class.iter().enumerate() {
            let next = class[(i + 1) % class.len()];
            if class.len() == 2 && i == 1 {
                break;
            }
            canvas.geodesic(division_point(l, n), division_point(next, n), style);
        }
    }

    if spec.transversals {
        for (k, j) in ds.essential_transversals() {
            canvas.geodesic(
                end_midpoint(k, n),
                end_midpoint(j, n),
                "stroke=\"#999999\" stroke-width=\"1.2\" stroke-dasharray=\"6,4\"",
            );
        }
    }

    for l in 0..n {
        let z = division_point(l, n);
        let fill = if ds.is_homoclinic(l) {
            "fill=\"#cc2222\""
        } else {
            "fill=\"black\""
        };
        canvas.circle(z, 4.0, fill);
        if spec.labels {
            canvas.text(
                z * 1.12,
                &l.to_string(),
                "font-size=\"16\" text-anchor=\"middle\" dominant-baseline=\"middle\"",
            );
        }
    }

    if spec.ends {
        for l in 0..n {
            canvas.text(
                end_midpoint(l, n) * 1.12,
                &format!("e{l}"),
                "font-size=\"12\" fill=\"#555555\" text-anchor=\"middle\" dominant-baseline=\"middle\"",
            );
        }
    }

    canvas.finish()
}

/// Phase portrait of a classified field: separatrices colored by fate and
/// equilibria marked by kind.
pub fn phase_portrait(c: &Classification, spec: &RenderSpec) -> String {
    let set = &c.traces;
    let root_radius = set
        .equilibria
        .iter()
        .map(|e| e.location.norm())
        .fold(1.0, f64::max);
    let view = 2.2 * root_radius;
    let mut canvas = Canvas::new(spec.size, Complex64::new(0.0, 0.0), view);

    for t in &set.traces {
        let style = match t.fate {
            Fate::Landing { .. } => "stroke=\"#2255cc\" stroke-width=\"1.3\"",
            Fate::Homoclinic { .. } => "stroke=\"#cc2222\" stroke-width=\"1.5\"",
        };
        let clipped: Vec<Complex64> = t
            .samples
            .iter()
            .map(|&(_, z)| z)
            .filter(|z| z.norm() <= view * 1.4)
            .collect();
        canvas.polyline(&clipped, style);
    }

    if spec.labels {
        let n = set.traces.len();
        for l in 0..n {
            let z = Complex64::from_polar(view * 0.93, 2.0 * PI * l as f64 / n as f64);
            canvas.text(
                z,
                &format!("s{l}"),
                "font-size=\"13\" fill=\"#444444\" text-anchor=\"middle\" dominant-baseline=\"middle\"",
            );
        }
    }

    for e in &set.equilibria {
        match e.kind {
            EquilibriumKind::Source => {
                canvas.circle(e.location, 5.0, "fill=\"#dd4422\" stroke=\"black\"");
            }
            EquilibriumKind::Sink => {
                canvas.circle(e.location, 5.0, "fill=\"#2244dd\" stroke=\"black\"");
            }
            EquilibriumKind::Center => {
                canvas.circle(
                    e.location,
                    5.0,
                    "fill=\"none\" stroke=\"#119933\" stroke-width=\"2.5\"",
                );
            }
            EquilibriumKind::Multiple => {
                let (x, y) = canvas.map(e.location);
                writeln!(
                    canvas.body,
                    "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" transform=\"rotate(45 {} {})\" fill=\"black\"/>",
                    fnum(x - 5.0),
                    fnum(y - 5.0),
                    fnum(x),
                    fnum(y)
                )
                .unwrap();
            }
        }
        if spec.residues {
            canvas.text(
                e.location + Complex64::new(0.04 * view, 0.04 * view),
                &format!("ρ={:.4}{:+.4}i", e.residue.re, e.residue.im),
                "font-size=\"11\" fill=\"#333333\"",
            );
        }
    }

    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_model_svg_contains_all_pieces() {
        let ds = CombinatorialDataSet::new(
            9,
            vec![
                vec![0, 2],
                vec![1],
                vec![3, 4],
                vec![5, 6],
                vec![7, 8, 11],
                vec![9, 10],
                vec![12, 15],
                vec![13, 14],
            ],
            vec![3, 4, 5, 6, 9, 10, 12, 15, 13, 14],
        )
        .unwrap();
        let svg = disk_model(&ds, &RenderSpec::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("stroke-dasharray")); // transversals
        assert!(svg.contains("#cc2222")); // homoclinic hulls
        assert_eq!(svg.matches("<circle").count(), 1 + 16); // circle + 16 points
        // deterministic output
        assert_eq!(svg, disk_model(&ds, &RenderSpec::default()));
    }

    #[test]
    fn phase_portrait_smoke() {
        let p = crate::poly::Polynomial::new(vec![
            crate::c64(1.0, 0.0),
            crate::c64(0.0, 0.0),
            crate::c64(1.0, 0.0),
        ])
        .unwrap();
        let c = crate::invariants::classify(&p).unwrap();
        let spec = RenderSpec {
            mode: RenderMode::PhasePortrait,
            residues: true,
            ..Default::default()
        };
        let svg = phase_portrait(&c, &spec);
        assert!(svg.contains("polyline"));
        assert!(svg.contains("#119933")); // two centers
        assert!(svg.contains("ρ="));
    }
}
