//! The trefoil-bead loop: a small copy of a long trefoil slides along a large
//! flattened one, then a diagram-preserving homotopy closes the loop.
//!
//! Template coordinates (u, w): u runs along the tail direction d̂, which
//! points at 45° from `right` in the projection plane.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::curve::{Curve, CurveKind};
use crate::family::{Domain, KnotCycle};
use crate::{Vecn, MAX_DIM};

/// Tail speed of the template in u per unit σ.
const V: f64 = 3.0;

fn quintic(r: f64, order: usize) -> [f64; 4] {
    let (r2, r3) = (r * r, r * r * r);
    match order {
        0 => [
            1.0 - 10.0 * r3 + 15.0 * r3 * r - 6.0 * r3 * r2,
            r - 6.0 * r3 + 8.0 * r3 * r - 3.0 * r3 * r2,
            10.0 * r3 - 15.0 * r3 * r + 6.0 * r3 * r2,
            -4.0 * r3 + 7.0 * r3 * r - 3.0 * r3 * r2,
        ],
        1 => [
            -30.0 * r2 + 60.0 * r3 - 30.0 * r3 * r,
            1.0 - 18.0 * r2 + 32.0 * r3 - 15.0 * r3 * r,
            30.0 * r2 - 60.0 * r3 + 30.0 * r3 * r,
            -12.0 * r2 + 28.0 * r3 - 15.0 * r3 * r,
        ],
        2 => [
            -60.0 * r + 180.0 * r2 - 120.0 * r3,
            -36.0 * r + 96.0 * r2 - 60.0 * r3,
            60.0 * r - 180.0 * r2 + 120.0 * r3,
            -24.0 * r + 84.0 * r2 - 60.0 * r3,
        ],
        _ => [
            -60.0 + 360.0 * r - 360.0 * r2,
            -36.0 + 192.0 * r - 180.0 * r2,
            60.0 - 360.0 * r + 360.0 * r2,
            -24.0 + 168.0 * r - 180.0 * r2,
        ],
    }
}

/// C² long-trefoil template on σ ∈ [0, 1]: planar path P(σ) with P = (Vσ, 0)
/// at the ends, and heights H(σ), zero at the ends.
#[derive(Clone, Debug)]
pub struct Template {
    knots: Vec<f64>,
    pts: Vec<[f64; 3]>,
    vels: Vec<[f64; 3]>,
}

impl Template {
    /// Crossings A = (0.5, 0), B = (1.5, 0.35), C = (2.5, 0) visited in the
    /// order A B C A B C with passages U O U O U O and tangent angles (from
    /// d̂) 0°, 9°, −90°, 90°, −9°, 0°.
    pub fn trefoil() -> Self {
        let a = [0.5, 0.0];
        let b = [1.5, 0.35];
        let c = [2.5, 0.0];
        let visits: [([f64; 2], f64, f64); 6] = [
            (a, 0.0, -1.0),
            (b, 9.0, 1.0),
            (c, -90.0, -1.0),
            (a, 90.0, 1.0),
            (b, -9.0, -1.0),
            (c, 0.0, 1.0),
        ];
        let lengths = [0.5, 1.06, 1.25, 2.9, 1.45, 1.05, 0.5];
        let total: f64 = lengths.iter().sum();
        let mut knots = vec![0.0];
        for l in lengths {
            knots.push(knots.last().unwrap() + l / total);
        }
        *knots.last_mut().unwrap() = 1.0;
        let speed = total;
        let mut pts = vec![[0.0, 0.0, 0.0]];
        let mut vels = vec![[V, 0.0, 0.0]];
        for (p, ang, h) in visits {
            let r = ang.to_radians();
            pts.push([p[0], p[1], h]);
            vels.push([speed * r.cos(), speed * r.sin(), 0.0]);
        }
        pts.push([V, 0.0, 0.0]);
        vels.push([V, 0.0, 0.0]);
        Template { knots, pts, vels }
    }

    /// Deviation (P(σ) − (Vσ, 0), H(σ)) and its σ-derivatives; zero outside [0, 1].
    pub fn dev(&self, sigma: f64, order: usize) -> [f64; 3] {
        if !(0.0..1.0).contains(&sigma) {
            return [0.0; 3];
        }
        let i = self.knots.partition_point(|&k| k <= sigma).clamp(1, self.knots.len() - 1) - 1;
        let d = self.knots[i + 1] - self.knots[i];
        let r = (sigma - self.knots[i]) / d;
        let h = quintic(r, order);
        let scale = d.powi(order as i32);
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = (h[0] * self.pts[i][k]
                + h[1] * d * self.vels[i][k]
                + h[2] * self.pts[i + 1][k]
                + h[3] * d * self.vels[i + 1][k])
                / scale;
        }
        match order {
            0 => out[0] -= V * sigma,
            1 => out[0] -= V,
            _ => {}
        }
        out
    }

    /// Template tangent angle (radians, from d̂) at σ.
    pub fn angle(&self, sigma: f64) -> f64 {
        let d = self.dev(sigma, 1);
        let (du, dw) = if (0.0..1.0).contains(&sigma) { (d[0] + V, d[1]) } else { (V, 0.0) };
        dw.atan2(du)
    }
}

/// One knotted piece placed on the line: window [c, c+w], size g, vertical
/// factor h, planar rotation ψ relative to d̂.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece {
    pub c: f64,
    pub w: f64,
    pub g: f64,
    pub h: f64,
    pub psi: f64,
}

/// Long knot: the line t ↦ V t d̂ plus template copies.
pub struct Composite<'a> {
    pub template: &'a Template,
    pub pieces: Vec<Piece>,
    pub samples_per_piece: usize,
}

const D_HAT: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];
const D_PERP: [f64; 2] = [-FRAC_1_SQRT_2, FRAC_1_SQRT_2];

impl Composite<'_> {
    fn piece_dev(&self, p: &Piece, t: f64, order: usize) -> [f64; 3] {
        let sigma = (t - p.c) / p.w;
        let d = self.template.dev(sigma, order);
        let s = p.g / p.w.powi(order as i32);
        let (sn, cs) = p.psi.sin_cos();
        let (u, w) = (cs * d[0] - sn * d[1], sn * d[0] + cs * d[1]);
        [s * p.h * d[2], s * u, s * w]
    }

    /// Horizontal velocity in template coordinates (u, w) at t.
    pub fn planar_velocity(&self, t: f64) -> [f64; 2] {
        let mut v = [V, 0.0];
        for p in &self.pieces {
            let d = self.piece_dev(p, t, 1);
            v[0] += d[1];
            v[1] += d[2];
        }
        v
    }
}

impl Curve for Composite<'_> {
    fn kind(&self) -> CurveKind {
        CurveKind::Long
    }

    fn dim(&self) -> usize {
        3
    }

    fn d(&self, t: f64, order: usize) -> Vecn {
        let (mut h, mut u, mut w) = match order {
            0 => (0.0, V * t, 0.0),
            1 => (0.0, V, 0.0),
            _ => (0.0, 0.0, 0.0),
        };
        for p in &self.pieces {
            let d = self.piece_dev(p, t, order);
            h += d[0];
            u += d[1];
            w += d[2];
        }
        let mut out = [0.0; MAX_DIM];
        out[0] = h;
        out[1] = u * D_HAT[0] + w * D_PERP[0];
        out[2] = u * D_HAT[1] + w * D_PERP[1];
        out
    }

    fn window(&self) -> (f64, f64) {
        let lo = self.pieces.iter().map(|p| p.c).fold(f64::MAX, f64::min);
        let hi = self.pieces.iter().map(|p| p.c + p.w).fold(f64::MIN, f64::max);
        (lo, hi)
    }

    fn sample_params(&self) -> Vec<f64> {
        let n = self.samples_per_piece;
        let mut ts: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| (0..=n).map(move |i| p.c + p.w * i as f64 / n as f64))
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        ts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transport {
    /// Bead frame from the large knot's tangent at the bead's left end,
    /// uniform speed.
    Tangent,
    /// Frame from the tangent at the bead's middle, eased speed.
    Centered,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeadParams {
    pub eps: f64,
    pub frames: usize,
    pub transport: Transport,
    pub samples_per_piece: usize,
    /// Fixed rotation of the bead's diagram against the channel frame.
    pub twist: f64,
}

impl Default for BeadParams {
    fn default() -> Self {
        BeadParams {
            eps: 0.05,
            frames: 2048,
            transport: Transport::Tangent,
            samples_per_piece: 360,
            twist: 0.05,
        }
    }
}

/// Fraction of the loop spent transporting the bead; the rest is split
/// evenly between the three closing phases.
const T_TRANSPORT: f64 = 0.85;
const GAP: f64 = 0.02;

pub struct BeadLoop {
    pub params: BeadParams,
    template: Template,
    /// Crossing parameters of the large knot.
    visits: Vec<f64>,
}

pub fn trefoil_bead_loop(params: BeadParams) -> crate::Result<BeadLoop> {
    if !(params.eps > 0.0 && params.eps <= 0.1) {
        return Err(crate::Error::Construction(format!(
            "bead loop needs 0 < ε ≤ 0.1, got {}",
            params.eps
        )));
    }
    if params.twist.abs() > 0.12 {
        return Err(crate::Error::Construction(format!(
            "bead twist {} changes the bead's diagram; keep |twist| ≤ 0.12",
            params.twist
        )));
    }
    if params.frames < 512 {
        return Err(crate::Error::Construction("bead loop needs at least 512 frames".into()));
    }
    let mut lp = BeadLoop {
        params,
        template: Template::trefoil(),
        visits: vec![],
    };
    let large = Composite {
        template: &lp.template,
        pieces: vec![lp.large()],
        samples_per_piece: params.samples_per_piece,
    };
    lp.visits = crate::crossing::crossings(&large)?
        .iter()
        .flat_map(|c| [c.s, c.t])
        .collect();
    Ok(lp)
}

fn smooth(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
}

impl BeadLoop {
    pub fn template(&self) -> &Template {
        &self.template
    }

    fn eps3(&self) -> f64 {
        self.params.eps.powi(3)
    }

    fn large(&self) -> Piece {
        Piece {
            c: 0.0,
            w: 1.0,
            g: 1.0,
            h: self.params.eps.powi(2),
            psi: 0.0,
        }
    }

    /// Bead parked with its left end at s0 on the large knot.
    fn bead_at(&self, s0: f64) -> Piece {
        let g = self.eps3();
        let large = Composite {
            template: &self.template,
            pieces: vec![self.large()],
            samples_per_piece: 0,
        };
        let frame_at = |t: f64| {
            let v = large.planar_velocity(t);
            (v[0].hypot(v[1]), v[1].atan2(v[0]))
        };
        let (speed, psi) = match self.params.transport {
            Transport::Tangent => frame_at(s0),
            Transport::Centered => {
                let (sp, _) = frame_at(s0);
                frame_at(s0 + 0.5 * g * V / sp)
            }
        };
        Piece {
            c: s0,
            w: g * V / speed,
            g,
            h: 1.0,
            psi: psi + self.params.twist,
        }
    }

    /// Left end of the bead during transport.
    fn s0(&self, tau: f64) -> f64 {
        let (s_start, s_end) = (-GAP - self.eps3(), 1.0 + GAP);
        let x = tau / T_TRANSPORT;
        let x = match self.params.transport {
            Transport::Tangent => x,
            Transport::Centered => x + 0.04 * (std::f64::consts::TAU * x).sin(),
        };
        s_start + (s_end - s_start) * x
    }

    /// The two pieces (large, bead) at loop time τ ∈ [0, 1).
    pub fn pieces(&self, tau: f64) -> [Piece; 2] {
        let e3 = self.eps3();
        let e2 = self.params.eps.powi(2);
        let tau = tau.rem_euclid(1.0);
        let s_end = 1.0 + GAP;
        if tau < T_TRANSPORT {
            return [self.large(), self.bead_at(self.s0(tau))];
        }
        let phase = (tau - T_TRANSPORT) / ((1.0 - T_TRANSPORT) / 3.0);
        let (k, x) = (phase.floor().min(2.0) as usize, smooth(phase - phase.floor().min(2.0)));
        let lerp = |a: f64, b: f64, x: f64| a + (b - a) * x;
        let (gl, gk) = match k {
            0 => (lerp(1.0, e3, x), lerp(e3, 1.0, x)),
            _ => (e3, 1.0),
        };
        let (hl, hk) = match k {
            0 => (e2, 1.0),
            1 => (lerp(e2, 1.0, x), lerp(1.0, e2, x)),
            _ => (1.0, e2),
        };
        let tw = self.params.twist;
        let (pl, pk) = match k {
            0 => (lerp(0.0, tw, x), lerp(tw, 0.0, x)),
            _ => (tw, 0.0),
        };
        let shift = if k == 2 { -s_end * x } else { 0.0 };
        [
            Piece { c: 1.0 - gl + shift, w: gl, g: gl, h: hl, psi: pl },
            Piece { c: s_end + shift, w: gk, g: gk, h: hk, psi: pk },
        ]
    }

    pub fn composite(&self, tau: f64) -> Composite<'_> {
        Composite {
            template: &self.template,
            pieces: self.pieces(tau).to_vec(),
            samples_per_piece: self.params.samples_per_piece,
        }
    }

    /// Loop times of the transport phase.
    pub fn transport_interval(&self) -> (f64, f64) {
        (0.0, T_TRANSPORT)
    }
}

impl KnotCycle for BeadLoop {
    fn kind(&self) -> CurveKind {
        CurveKind::Long
    }
    fn n(&self) -> usize {
        3
    }
    fn domain(&self) -> &Domain {
        &Domain::Circle
    }
    fn curve_at(&self, u: &[f64]) -> Box<dyn Curve + '_> {
        Box::new(self.composite(u[0]))
    }
    fn max_step(&self, ta: f64, tb: f64) -> f64 {
        let (ta, tb) = (ta.max(0.0), tb.min(T_TRANSPORT));
        if ta >= tb {
            return f64::INFINITY;
        }
        let (sa, sb) = (self.s0(ta), self.s0(tb));
        let w = self.bead_at(sa).w.min(self.bead_at(sb).w);
        let near = self.visits.iter().any(|&v| sb > v - 4.0 * w && sa < v + 3.0 * w);
        if near {
            // ds0/dτ is at most 1.3 · (s_end − s_start) / T_TRANSPORT.
            0.02 * w * T_TRANSPORT / (1.3 * (1.0 + 2.0 * GAP + self.eps3()))
        } else {
            f64::INFINITY
        }
    }

    fn transport(&self, ua: f64, ub: f64, s: f64) -> f64 {
        let (mut pa, mut pb) = (self.pieces(ua), self.pieces(ub));
        if ub < ua - 0.5 {
            pb.swap(0, 1);
        } else if ua < ub - 0.5 {
            pa.swap(0, 1);
        }
        for i in [1, 0] {
            let (a, b) = (pa[i], pb[i]);
            if s >= a.c - 0.25 * a.w && s <= a.c + 1.25 * a.w {
                return b.c + (s - a.c) * b.w / a.w;
            }
        }
        s
    }
}

/// The large trefoil alone, unflattened, as a long knot.
pub fn long_trefoil_template() -> Template {
    Template::trefoil()
}

pub fn long_trefoil(template: &Template) -> Composite<'_> {
    Composite {
        template,
        pieces: vec![Piece { c: 0.0, w: 1.0, g: 1.0, h: 1.0, psi: 0.0 }],
        samples_per_piece: 400,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossing::crossings;

    #[test]
    fn large_trefoil_has_three_crossings() {
        let t = Template::trefoil();
        let k = long_trefoil(&t);
        let cs = crossings(&k).unwrap();
        for c in &cs {
            eprintln!("{c:?} angles {:.2} {:.2}", t.angle(c.s).to_degrees(), t.angle(c.t).to_degrees());
        }
        assert_eq!(cs.len(), 3);
    }

    #[test]
    fn loop_closes() {
        let b = trefoil_bead_loop(BeadParams::default()).unwrap();
        let (x, y) = (b.composite(0.0), b.composite(1.0 - 1e-13));
        for i in 0..200 {
            let t = -0.1 + 1.2 * i as f64 / 200.0;
            let (p, q) = (x.d(t, 0), y.d(t, 0));
            for k in 0..3 {
                assert!((p[k] - q[k]).abs() < 1e-9, "t={t} k={k}");
            }
        }
    }
}
