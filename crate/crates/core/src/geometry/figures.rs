//! SVG figures and `loop_id,x,y` CSV dumps for slices and developments.

use std::fmt::Write;

use super::develop::Development;
use super::slice::SliceResult;

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 20.0;

struct Frame {
    min: [f64; 2],
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a [f64; 2]>) -> Frame {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if !lo[0].is_finite() {
            lo = [-1.0, -1.0];
            hi = [1.0, 1.0];
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
        let scale = (CANVAS - 2.0 * MARGIN) / span;
        Frame {
            min: lo,
            scale,
            height: (hi[1] - lo[1]) * scale + 2.0 * MARGIN,
        }
    }

    fn map(&self, p: &[f64; 2]) -> (f64, f64) {
        (
            MARGIN + (p[0] - self.min[0]) * self.scale,
            self.height - MARGIN - (p[1] - self.min[1]) * self.scale,
        )
    }

    fn open(&self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{CANVAS}\" height=\"{:.1}\" viewBox=\"0 0 {CANVAS} {:.1}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            self.height, self.height
        )
    }

    fn points(&self, pts: &[[f64; 2]]) -> String {
        pts.iter()
            .map(|p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn slice_svg(s: &SliceResult) -> String {
    let frame = Frame::fit(s.loops.iter().chain(&s.open_chains).flatten());
    let mut out = frame.open();
    for l in &s.loops {
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"orange\" fill-opacity=\"0.35\" stroke=\"black\" stroke-width=\"0.8\" fill-rule=\"evenodd\"/>",
            frame.points(l)
        );
    }
    for ch in &s.open_chains {
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"1.2\"/>",
            frame.points(ch)
        );
    }
    out.push_str("</svg>\n");
    out
}

pub fn slice_csv(s: &SliceResult) -> String {
    let mut out = String::from("loop_id,x,y\n");
    for (i, l) in s.loops.iter().enumerate() {
        for p in l {
            let _ = writeln!(out, "{i},{:.17e},{:.17e}", p[0], p[1]);
        }
    }
    out
}

/// Faces of the fundamental domain and its translates by `a*l1 + b*l2`
/// for `|a|, |b| <= copies`, with the base copy outlined.
pub fn development_svg(d: &Development, copies: i32) -> String {
    let faces = d.to_f64();
    let [l1, l2] = d.lattice_f64();
    let mut tiles: Vec<(bool, Vec<[f64; 2]>)> = Vec::new();
    for a in -copies..=copies {
        for b in -copies..=copies {
            let shift = [
                a as f64 * l1[0] + b as f64 * l2[0],
                a as f64 * l1[1] + b as f64 * l2[1],
            ];
            for f in &faces {
                let tri = f
                    .iter()
                    .map(|p| [p[0] + shift[0], p[1] + shift[1]])
                    .collect();
                tiles.push((a == 0 && b == 0, tri));
            }
        }
    }
    let frame = Frame::fit(tiles.iter().flat_map(|(_, t)| t.iter()));
    let mut out = frame.open();
    for (base, tri) in &tiles {
        let (fill, width) = if *base {
            ("#9ecae1", 1.2)
        } else {
            ("#f0f0f0", 0.5)
        };
        let _ = writeln!(
            out,
            "<polygon points=\"{}\" fill=\"{fill}\" stroke=\"black\" stroke-width=\"{width}\"/>",
            frame.points(tri)
        );
    }
    let origin = frame.map(&[0.0, 0.0]);
    for l in [l1, l2] {
        let tip = frame.map(&l);
        let _ = writeln!(
            out,
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"red\" stroke-width=\"1.5\"/>",
            origin.0, origin.1, tip.0, tip.1
        );
    }
    out.push_str("</svg>\n");
    out
}

/// One loop per face of the fundamental domain.
pub fn development_csv(d: &Development) -> String {
    let mut out = String::from("loop_id,x,y\n");
    for (i, f) in d.to_f64().iter().enumerate() {
        for p in f {
            let _ = writeln!(out, "{i},{:.17e},{:.17e}", p[0], p[1]);
        }
    }
    out
}
