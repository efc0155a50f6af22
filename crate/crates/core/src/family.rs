//! Families of knots over parameter manifolds (the cycles classes are evaluated on).

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::crossing::{crossings_with, CrossingOptions};
use crate::curve::{Curve, CurveKind, ParamCurve};
use crate::error::{Error, Result};
use crate::{Vecn, MAX_DIM};

/// Parameter manifold of a family. Points are stored as coordinate vectors:
/// `[]` for a point, `[τ]` with τ ∈ [0,1) for the circle, unit quaternions
/// `[w,x,y,z]` for SO(3) (modulo sign) and S³.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Point,
    Circle,
    Box { lo: Vec<f64>, hi: Vec<f64> },
    So3,
    S3,
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Point => 0,
            Domain::Circle => 1,
            Domain::Box { lo, .. } => lo.len(),
            Domain::So3 | Domain::S3 => 3,
        }
    }

    /// Move from `base` by a chart vector `delta` of length `dim()`.
    pub fn retract(&self, base: &[f64], delta: &[f64]) -> Vec<f64> {
        match self {
            Domain::Point => vec![],
            Domain::Circle => vec![(base[0] + delta[0]).rem_euclid(1.0)],
            Domain::Box { .. } => base.iter().zip(delta).map(|(a, b)| a + b).collect(),
            Domain::So3 | Domain::S3 => {
                let q = qmul(&[base[0], base[1], base[2], base[3]], &qexp(delta));
                self.normalize(&q)
            }
        }
    }

    pub fn normalize(&self, u: &[f64]) -> Vec<f64> {
        match self {
            Domain::Circle => vec![u[0].rem_euclid(1.0)],
            Domain::So3 | Domain::S3 => {
                let r = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                let mut q: Vec<f64> = u.iter().map(|x| x / r).collect();
                if *self == Domain::So3 {
                    let lead = q.iter().copied().find(|x| x.abs() > 1e-12).unwrap_or(1.0);
                    if lead < 0.0 {
                        q.iter_mut().for_each(|x| *x = -*x);
                    }
                }
                q
            }
            _ => u.to_vec(),
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let maxdiff = |a: &[f64], b: &[f64], sgn: f64| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - sgn * y).abs())
                .fold(0.0, f64::max)
        };
        match self {
            Domain::Point => 0.0,
            Domain::Circle => {
                let d = (a[0] - b[0]).rem_euclid(1.0);
                d.min(1.0 - d)
            }
            Domain::Box { .. } | Domain::S3 => maxdiff(a, b, 1.0),
            Domain::So3 => maxdiff(a, b, 1.0).min(maxdiff(a, b, -1.0)),
        }
    }

    /// Regular grid of points; `res` sets the number of nodes per axis.
    pub fn grid(&self, res: usize) -> Vec<Vec<f64>> {
        let res = res.max(1);
        match self {
            Domain::Point => vec![vec![]],
            Domain::Circle => (0..res).map(|i| vec![i as f64 / res as f64]).collect(),
            Domain::Box { lo, hi } => {
                let mut out = vec![vec![]];
                for (a, b) in lo.iter().zip(hi) {
                    let mut next = Vec::new();
                    for p in &out {
                        for i in 0..res {
                            let mut q = p.clone();
                            q.push(a + (b - a) * (i as f64 + 0.5) / res as f64);
                            next.push(q);
                        }
                    }
                    out = next;
                }
                out
            }
            Domain::So3 => {
                let mut out = Vec::new();
                for i in 0..2 * res {
                    for j in 0..res {
                        for k in 0..2 * res {
                            let a = PI * i as f64 / res as f64;
                            let b = PI * (j as f64 + 0.5) / res as f64;
                            let g = PI * k as f64 / res as f64;
                            out.push(self.normalize(&quat_zyz(a, b, g)));
                        }
                    }
                }
                out
            }
            Domain::S3 => {
                let mut out = Vec::new();
                for i in 0..res {
                    for j in 0..res {
                        for k in 0..2 * res {
                            let psi = PI * (i as f64 + 0.5) / res as f64;
                            let th = PI * (j as f64 + 0.5) / res as f64;
                            let ph = PI * k as f64 / res as f64;
                            out.push(vec![
                                psi.cos(),
                                psi.sin() * th.cos(),
                                psi.sin() * th.sin() * ph.cos(),
                                psi.sin() * th.sin() * ph.sin(),
                            ]);
                        }
                    }
                }
                out
            }
        }
    }
}

pub fn qmul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

/// exp of the pure quaternion (0, v).
pub fn qexp(v: &[f64]) -> [f64; 4] {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if r < 1e-300 {
        return [1.0, v[0], v[1], v[2]];
    }
    let s = r.sin() / r;
    [r.cos(), s * v[0], s * v[1], s * v[2]]
}

fn quat_zyz(a: f64, b: f64, g: f64) -> Vec<f64> {
    let qa = [(a / 2.0).cos(), 0.0, 0.0, (a / 2.0).sin()];
    let qb = [(b / 2.0).cos(), 0.0, (b / 2.0).sin(), 0.0];
    let qg = [(g / 2.0).cos(), 0.0, 0.0, (g / 2.0).sin()];
    qmul(&qmul(&qa, &qb), &qg).to_vec()
}

/// Rotation matrix (row-major) of a unit quaternion.
pub fn rotation(q: &[f64]) -> [[f64; 3]; 3] {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// A family u ↦ f_u of knots over a [`Domain`].
pub trait KnotCycle: Send + Sync {
    fn kind(&self) -> CurveKind;
    fn n(&self) -> usize;
    fn domain(&self) -> &Domain;
    fn curve_at(&self, u: &[f64]) -> Box<dyn Curve + '_>;

    fn dim(&self) -> usize {
        self.domain().dim()
    }

    /// Best guess, at `ub`, for the knot parameter that continues `s` from `ua`
    /// (one-parameter families only). Identity unless the family moves
    /// features along the knot.
    fn transport(&self, _ua: f64, _ub: f64, s: f64) -> f64 {
        s
    }

    /// Largest loop-time step that cannot skip over a fast feature anywhere
    /// in [ta, tb] (one-parameter families only).
    fn max_step(&self, _ta: f64, _tb: f64) -> f64 {
        f64::INFINITY
    }
}

/// A single knot viewed as a 0-dimensional cycle.
pub struct SingleKnot<C: Curve>(pub C);

impl<C: Curve> KnotCycle for SingleKnot<C> {
    fn kind(&self) -> CurveKind {
        self.0.kind()
    }
    fn n(&self) -> usize {
        self.0.dim()
    }
    fn domain(&self) -> &Domain {
        &Domain::Point
    }
    fn curve_at(&self, _u: &[f64]) -> Box<dyn Curve + '_> {
        Box::new(CurveRef(&self.0))
    }
}

/// Borrowed curve as a boxed trait object.
pub struct CurveRef<'a>(pub &'a dyn Curve);

impl Curve for CurveRef<'_> {
    fn kind(&self) -> CurveKind {
        self.0.kind()
    }
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn d(&self, t: f64, order: usize) -> Vecn {
        self.0.d(t, order)
    }
    fn window(&self) -> (f64, f64) {
        self.0.window()
    }
    fn sample_params(&self) -> Vec<f64> {
        self.0.sample_params()
    }
}

/// A loop of spline knots given by frames at τ = i/N, interpolated
/// periodically in τ sample by sample.
pub struct FrameLoop {
    frames: Vec<ParamCurve>,
    params: Vec<f64>,
    tracks: Vec<ParamCurve>,
}

impl FrameLoop {
    pub fn new(frames: Vec<ParamCurve>) -> Result<Self> {
        if frames.len() < 3 {
            return Err(Error::Input("a frame loop needs at least 3 frames".into()));
        }
        let first = frames[0].samples();
        let params: Vec<f64> = first.iter().map(|s| s.0).collect();
        for f in &frames {
            let same = f.kind() == frames[0].kind()
                && f.dim() == frames[0].dim()
                && f.samples().iter().map(|s| s.0).eq(params.iter().copied());
            if !same {
                return Err(Error::Input("frames must share kind, n and sample parameters".into()));
            }
        }
        let nf = frames.len();
        let tracks = (0..params.len())
            .map(|j| {
                let pts = frames
                    .iter()
                    .enumerate()
                    .map(|(i, f)| (TAU * i as f64 / nf as f64, f.samples()[j].1))
                    .collect();
                ParamCurve::compact(frames[0].dim(), pts)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FrameLoop {
            frames,
            params,
            tracks,
        })
    }

    pub fn frames(&self) -> &[ParamCurve] {
        &self.frames
    }

    fn at(&self, tau: f64) -> ParamCurve {
        let samples: Vec<(f64, Vecn)> = self
            .params
            .iter()
            .zip(&self.tracks)
            .map(|(&t, tr)| (t, tr.d(TAU * tau, 0)))
            .collect();
        let f0 = &self.frames[0];
        match f0.kind() {
            CurveKind::Long => ParamCurve::long(f0.dim(), samples, f0.tail()),
            CurveKind::Compact => ParamCurve::compact(f0.dim(), samples),
        }
        .expect("interpolated frame has the validated layout")
    }
}

impl KnotCycle for FrameLoop {
    fn kind(&self) -> CurveKind {
        self.frames[0].kind()
    }
    fn n(&self) -> usize {
        self.frames[0].dim()
    }
    fn domain(&self) -> &Domain {
        &Domain::Circle
    }
    fn curve_at(&self, u: &[f64]) -> Box<dyn Curve + '_> {
        Box::new(self.at(u[0].rem_euclid(1.0)))
    }
}

/// Smooth compactly supported bump (1−x²)⁴ and its derivatives.
fn bump(x: f64, order: usize) -> f64 {
    if x.abs() >= 1.0 {
        return 0.0;
    }
    let g = 1.0 - x * x;
    match order {
        0 => g.powi(4),
        1 => -8.0 * x * g.powi(3),
        2 => -8.0 * g.powi(3) + 48.0 * x * x * g * g,
        _ => 144.0 * x * g * g - 192.0 * x.powi(3) * g,
    }
}

/// A base cycle plus a small bump on the knots, varying with the family
/// parameter: f_u(t) + ψ((t−c)/w)·(a + sin θ·b + cos θ·c), θ = 2π·u₀ + φ.
pub struct Perturbed {
    pub base: Arc<dyn KnotCycle>,
    pub center: f64,
    pub width: f64,
    pub a: Vecn,
    pub b: Vecn,
    pub c: Vecn,
    pub phase: f64,
}

struct PerturbedCurve<'a> {
    inner: Box<dyn Curve + 'a>,
    p: &'a Perturbed,
    coef: Vecn,
}

impl Curve for PerturbedCurve<'_> {
    fn kind(&self) -> CurveKind {
        self.inner.kind()
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn d(&self, t: f64, order: usize) -> Vecn {
        let mut x = self.inner.d(t, order);
        let mut dt = t - self.p.center;
        if self.kind() == CurveKind::Compact {
            dt = (dt + PI).rem_euclid(TAU) - PI;
        }
        let s = bump(dt / self.p.width, order) / self.p.width.powi(order as i32);
        for i in 0..MAX_DIM {
            x[i] += s * self.coef[i];
        }
        x
    }
    fn window(&self) -> (f64, f64) {
        let (a, b) = self.inner.window();
        if self.kind() == CurveKind::Long {
            (a.min(self.p.center - self.p.width), b.max(self.p.center + self.p.width))
        } else {
            (a, b)
        }
    }
    fn sample_params(&self) -> Vec<f64> {
        let mut ts = self.inner.sample_params();
        let (c, w) = (self.p.center, self.p.width);
        let extra = (0..=BUMP_SAMPLES).map(|i| c - w + 2.0 * w * i as f64 / BUMP_SAMPLES as f64);
        match self.kind() {
            CurveKind::Long => ts.extend(extra),
            CurveKind::Compact => ts.extend(extra.map(crate::curve::wrap)),
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        ts
    }
}

const BUMP_SAMPLES: usize = 96;

impl KnotCycle for Perturbed {
    fn kind(&self) -> CurveKind {
        self.base.kind()
    }
    fn n(&self) -> usize {
        self.base.n()
    }
    fn domain(&self) -> &Domain {
        self.base.domain()
    }
    fn curve_at(&self, u: &[f64]) -> Box<dyn Curve + '_> {
        let (sn, cs) = u.first().map_or((0.0, 0.0), |x| (TAU * x + self.phase).sin_cos());
        let mut coef = [0.0; MAX_DIM];
        for i in 0..MAX_DIM {
            coef[i] = self.a[i] + sn * self.b[i] + cs * self.c[i];
        }
        Box::new(PerturbedCurve {
            inner: self.base.curve_at(u),
            p: self,
            coef,
        })
    }
    fn transport(&self, ua: f64, ub: f64, s: f64) -> f64 {
        self.base.transport(ua, ub, s)
    }
    fn max_step(&self, ta: f64, tb: f64) -> f64 {
        self.base.max_step(ta, tb)
    }
}

/// A loop run through with a different orientation-preserving parametrization
/// τ ↦ τ + a·sin(2πτ)/(2π), |a| < 1.
pub struct Reparametrized {
    pub base: Arc<dyn KnotCycle>,
    pub a: f64,
}

impl Reparametrized {
    fn map(&self, tau: f64) -> f64 {
        (tau + self.a * (TAU * tau).sin() / TAU).rem_euclid(1.0)
    }
}

impl KnotCycle for Reparametrized {
    fn kind(&self) -> CurveKind {
        self.base.kind()
    }
    fn n(&self) -> usize {
        self.base.n()
    }
    fn domain(&self) -> &Domain {
        &Domain::Circle
    }
    fn curve_at(&self, u: &[f64]) -> Box<dyn Curve + '_> {
        self.base.curve_at(&[self.map(u[0])])
    }
    fn transport(&self, ua: f64, ub: f64, s: f64) -> f64 {
        self.base.transport(self.map(ua), self.map(ub), s)
    }
    fn max_step(&self, ta: f64, tb: f64) -> f64 {
        self.base.max_step(self.map(ta), self.map(tb)) / (1.0 + self.a.abs())
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct GenericityReport {
    pub samples: usize,
    pub flags: Vec<String>,
    /// Degenerate projections at single grid nodes of a family of dimension
    /// at least 2; such loci are expected and do not block evaluation.
    #[serde(default)]
    pub isolated: Vec<String>,
}

impl GenericityReport {
    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }
}

/// Sample the family and flag degenerate projections (n = 3 only; for larger
/// n only closedness is checked).
pub fn genericity_report(cycle: &dyn KnotCycle, res: usize) -> GenericityReport {
    let mut rep = GenericityReport::default();
    let nodes = match cycle.domain() {
        Domain::Circle => (0..res).map(|i| vec![(i as f64 + 0.5) / res as f64]).collect(),
        d => d.grid(res.min(4)),
    };
    if *cycle.domain() == Domain::Circle {
        let (c0, c1) = (cycle.curve_at(&[0.0]), cycle.curve_at(&[1.0 - 1e-15]));
        let (a, b) = c0.window();
        let gap = (0..=16)
            .map(|i| a + (b - a) * i as f64 / 16.0)
            .map(|t| {
                let (x, y) = (c0.d(t, 0), c1.d(t, 0));
                (0..MAX_DIM).map(|k| (x[k] - y[k]).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if gap > 1e-6 {
            rep.flags.push(format!("loop does not close: gap {gap:.3e}"));
        }
    }
    if cycle.n() == 3 {
        let opt = CrossingOptions::default();
        for u in &nodes {
            rep.samples += 1;
            if let Err(e) = crossings_with(cycle.curve_at(u).as_ref(), &opt) {
                let msg = format!("at u = {u:?}: {e}");
                if cycle.dim() >= 2 {
                    rep.isolated.push(msg);
                } else {
                    rep.flags.push(msg);
                }
            }
        }
    }
    rep
}
