//! Double points of the planar projection of a knot in ℝ³.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::curve::{wrap, Curve, CurveKind};
use crate::error::{Error, Result};
use crate::linalg::solve2;

/// A transverse double point f₁(s) = f₁(t), s < t.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub s: f64,
    pub t: f64,
    pub sign: i8,
    /// Whether f(s) is the upper point.
    pub over_s: bool,
    pub point: [f64; 2],
}

impl Crossing {
    pub fn over(&self) -> f64 {
        if self.over_s {
            self.s
        } else {
            self.t
        }
    }

    pub fn under(&self) -> f64 {
        if self.over_s {
            self.t
        } else {
            self.s
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CrossingOptions {
    /// Subdivision factor applied to the curve's own sample parameters.
    pub refine: usize,
    /// Minimal |sin| of the crossing angle.
    pub transversality: f64,
    /// Parameter distance below which two strands count as the same.
    pub merge_tol: f64,
    /// Report degeneracies as errors; otherwise drop what cannot be refined.
    pub strict: bool,
}

impl Default for CrossingOptions {
    fn default() -> Self {
        CrossingOptions {
            refine: 1,
            transversality: 1e-7,
            merge_tol: 1e-9,
            strict: true,
        }
    }
}

pub fn crossings(curve: &dyn Curve) -> Result<Vec<Crossing>> {
    crossings_with(curve, &CrossingOptions::default())
}

fn p2(curve: &dyn Curve, t: f64, order: usize) -> [f64; 2] {
    let x = curve.d(t, order);
    [x[1], x[2]]
}

fn polyline(curve: &dyn Curve, refine: usize) -> Result<Vec<f64>> {
    let base = curve.sample_params();
    let compact = curve.kind() == CurveKind::Compact;
    let mut ts = Vec::with_capacity(base.len() * refine + 2);
    let m = base.len();
    let segs = if compact { m } else { m - 1 };
    for i in 0..segs {
        let lo = base[i];
        let hi = if i + 1 < m { base[i + 1] } else { base[0] + TAU };
        for k in 0..refine {
            ts.push(lo + (hi - lo) * k as f64 / refine as f64);
        }
    }
    if !compact {
        ts.push(base[m - 1]);
        let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
        for &t in &ts {
            let q = p2(curve, t, 0);
            for k in 0..2 {
                lo[k] = lo[k].min(q[k]);
                hi[k] = hi[k].max(q[k]);
            }
        }
        let diag = ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt() + 1.0;
        let dir = p2(curve, ts[0] - 1.0, 1);
        let speed = dir[0].hypot(dir[1]);
        if speed == 0.0 {
            return Err(Error::Genericity("long-knot tail is vertical".into()));
        }
        let reach = 2.0 * diag / speed;
        ts.insert(0, ts[0] - reach);
        ts.push(ts[ts.len() - 1] + reach);
    }
    Ok(ts)
}

fn seg_hit(a0: [f64; 2], a1: [f64; 2], b0: [f64; 2], b1: [f64; 2]) -> Option<(f64, f64)> {
    let da = [a1[0] - a0[0], a1[1] - a0[1]];
    let db = [b1[0] - b0[0], b1[1] - b0[1]];
    let r = [b0[0] - a0[0], b0[1] - a0[1]];
    let [u, v] = solve2(da, [-db[0], -db[1]], r)?;
    let e = 1e-9;
    ((-e..=1.0 + e).contains(&u) && (-e..=1.0 + e).contains(&v)).then_some((u, v))
}

/// Polish f₁(s) = f₁(t) by Newton's method in (s, t).
pub fn refine_pair(curve: &dyn Curve, mut s: f64, mut t: f64) -> Option<(f64, f64)> {
    let scale = 1.0 + s.abs().max(t.abs());
    for _ in 0..40 {
        let (a, b) = (p2(curve, s, 0), p2(curve, t, 0));
        let f = [a[0] - b[0], a[1] - b[1]];
        let ds = p2(curve, s, 1);
        let dt = p2(curve, t, 1);
        let [x, y] = solve2(ds, [-dt[0], -dt[1]], [-f[0], -f[1]])?;
        s += x;
        t += y;
        if !(s.is_finite() && t.is_finite()) {
            return None;
        }
        if x.abs().max(y.abs()) < 1e-15 * scale {
            break;
        }
    }
    let (a, b) = (p2(curve, s, 0), p2(curve, t, 0));
    let res = (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
    (res < 1e-11 * (1.0 + a[0].abs().max(a[1].abs()))).then_some((s, t))
}

fn normalize(kind: CurveKind, s: f64, t: f64) -> (f64, f64) {
    let (s, t) = match kind {
        CurveKind::Compact => (wrap(s), wrap(t)),
        CurveKind::Long => (s, t),
    };
    if s <= t {
        (s, t)
    } else {
        (t, s)
    }
}

fn param_dist(kind: CurveKind, a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    match kind {
        CurveKind::Compact => d.min(TAU - d),
        CurveKind::Long => d,
    }
}

/// Build the crossing record at a refined pair.
pub fn make_crossing(curve: &dyn Curve, s: f64, t: f64) -> Crossing {
    let (fs, ft) = (curve.d(s, 0), curve.d(t, 0));
    let over_s = fs[0] > ft[0];
    let (o, u) = if over_s { (s, t) } else { (t, s) };
    let (vo, vu) = (p2(curve, o, 1), p2(curve, u, 1));
    let det = vo[0] * vu[1] - vo[1] * vu[0];
    Crossing {
        s,
        t,
        sign: if det >= 0.0 { 1 } else { -1 },
        over_s,
        point: [fs[1], fs[2]],
    }
}

pub fn crossings_with(curve: &dyn Curve, opt: &CrossingOptions) -> Result<Vec<Crossing>> {
    if curve.dim() != 3 {
        return Err(Error::Dimension(format!(
            "crossings need n = 3, got n = {}",
            curve.dim()
        )));
    }
    let kind = curve.kind();
    let ts = polyline(curve, opt.refine.max(1))?;
    let pts: Vec<[f64; 2]> = ts.iter().map(|&t| p2(curve, t, 0)).collect();
    let m = pts.len();
    let nseg = if kind == CurveKind::Compact { m } else { m - 1 };
    let end = |i: usize| if i + 1 < m { i + 1 } else { 0 };
    let seg_t1 = |i: usize| if i + 1 < m { ts[i + 1] } else { ts[0] + TAU };
    let mut boxes: Vec<(f64, f64, f64, f64, usize)> = (0..nseg)
        .map(|i| {
            let (a, b) = (pts[i], pts[end(i)]);
            (a[0].min(b[0]), a[0].max(b[0]), a[1].min(b[1]), a[1].max(b[1]), i)
        })
        .collect();
    boxes.sort_by(|x, y| x.0.total_cmp(&y.0));
    let adjacent = |i: usize, j: usize| {
        let d = i.abs_diff(j);
        d <= 1 || (kind == CurveKind::Compact && d == nseg - 1)
    };
    let mut raw = Vec::new();
    for (k, bi) in boxes.iter().enumerate() {
        for bj in &boxes[k + 1..] {
            if bj.0 > bi.1 {
                break;
            }
            if bj.3 < bi.2 || bj.2 > bi.3 || adjacent(bi.4, bj.4) {
                continue;
            }
            let (i, j) = (bi.4, bj.4);
            if let Some((u, v)) = seg_hit(pts[i], pts[end(i)], pts[j], pts[end(j)]) {
                let s0 = ts[i] + u * (seg_t1(i) - ts[i]);
                let t0 = ts[j] + v * (seg_t1(j) - ts[j]);
                raw.push((s0, t0));
            }
        }
    }
    let mut out: Vec<Crossing> = Vec::new();
    for (s0, t0) in raw {
        let Some((s, t)) = refine_pair(curve, s0, t0) else {
            if opt.strict {
                return Err(Error::Genericity(format!(
                    "crossing refinement failed near (s, t) = ({s0:.9}, {t0:.9})"
                )));
            }
            continue;
        };
        let (s, t) = normalize(kind, s, t);
        if param_dist(kind, s, t) < opt.merge_tol {
            continue;
        }
        if out.iter().any(|c| {
            param_dist(kind, c.s, s) < opt.merge_tol && param_dist(kind, c.t, t) < opt.merge_tol
        }) {
            continue;
        }
        let c = make_crossing(curve, s, t);
        if opt.strict {
            check_crossing(curve, &c, opt)?;
        }
        out.push(c);
    }
    out.sort_by(|a, b| a.s.total_cmp(&b.s).then(a.t.total_cmp(&b.t)));
    if opt.strict {
        check_triples(kind, &out, opt.merge_tol)?;
    }
    Ok(out)
}

fn check_crossing(curve: &dyn Curve, c: &Crossing, opt: &CrossingOptions) -> Result<()> {
    let (vs, vt) = (p2(curve, c.s, 1), p2(curve, c.t, 1));
    let (ns, nt) = (vs[0].hypot(vs[1]), vt[0].hypot(vt[1]));
    let at = format!("(s, t) = ({:.9}, {:.9})", c.s, c.t);
    if ns < 1e-12 || nt < 1e-12 {
        return Err(Error::Genericity(format!("vertical tangent at crossing {at}")));
    }
    let sin = (vs[0] * vt[1] - vs[1] * vt[0]).abs() / (ns * nt);
    if sin < opt.transversality {
        return Err(Error::Genericity(format!("tangential crossing at {at}")));
    }
    let dh = (curve.d(c.s, 0)[0] - curve.d(c.t, 0)[0]).abs();
    if dh < 1e-13 {
        return Err(Error::Genericity(format!("curve is not embedded at {at}")));
    }
    Ok(())
}

fn check_triples(kind: CurveKind, cs: &[Crossing], tol: f64) -> Result<()> {
    for (i, a) in cs.iter().enumerate() {
        for b in &cs[i + 1..] {
            for x in [a.s, a.t] {
                for y in [b.s, b.t] {
                    if param_dist(kind, x, y) < tol {
                        return Err(Error::Genericity(format!(
                            "triple point of the projection near parameter {x:.9}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}
