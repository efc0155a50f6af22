//! Square systems of equations and strict inequalities on (family parameter,
//! configuration points), and their numerical solution.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::crossing::Crossing;
use crate::curve::{Curve, CurveKind};
use crate::error::{Error, Result};
use crate::family::KnotCycle;
use crate::linalg::{det_sign, equilibrated_cond, solve};
use crate::Vecn;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub newton_tol: f64,
    pub dedup_radius: f64,
    pub margin_tol: f64,
    pub cond_threshold: f64,
    /// Finite-difference step in family chart coordinates.
    pub fd_step: f64,
    /// Largest Newton correction accepted at convergence.
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            newton_tol: 1e-10,
            dedup_radius: 1e-6,
            margin_tol: 1e-8,
            cond_threshold: 1e8,
            fd_step: 1e-9,
            step_tol: 1e-9,
            max_iter: 60,
        }
    }
}

/// A configuration point: free unknown, fixed parameter, or free plus offset.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Pt {
    Free(usize),
    Anchor(f64),
    Offset(usize, f64),
}

impl Pt {
    fn value(&self, a: &[f64]) -> f64 {
        match *self {
            Pt::Free(i) => a[i],
            Pt::Anchor(v) => v,
            Pt::Offset(i, c) => a[i] + c,
        }
    }

    fn free(&self) -> Option<usize> {
        match *self {
            Pt::Free(i) | Pt::Offset(i, _) => Some(i),
            Pt::Anchor(_) => None,
        }
    }
}

/// Equation blocks. Indices: coordinate 0 is up, 1 is right, 2.. are the
/// directions of the projection orthogonal to right.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Eqn {
    /// p(f(x)) = p(f(y)): n−1 scalars.
    Coincide(Pt, Pt),
    /// f₁′(x) ∥ right: n−2 scalars.
    TangentAlong(Pt),
    /// p(f(x)) − p(f(y)) ∥ right: n−2 scalars.
    DiffAlong(Pt, Pt),
    /// f₁′(x), f₁′(y), right linearly dependent: n−3 scalars.
    Coplanar(Pt, Pt),
}

impl Eqn {
    pub fn scalars(&self, n: usize) -> usize {
        match self {
            Eqn::Coincide(..) => n - 1,
            Eqn::TangentAlong(_) | Eqn::DiffAlong(..) => n - 2,
            Eqn::Coplanar(..) => n - 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Ineq {
    /// f(x) above f(y).
    Above(Pt, Pt),
    /// ⟨f₁′(x), right⟩ > 0.
    TangentRight(Pt),
    /// ⟨p(f(x)) − p(f(y)), right⟩ > 0.
    DiffRight(Pt, Pt),
    /// right = λ f₁′(x) + μ f₁′(y) with min(λ, μ) < 0.
    ExteriorAngle(Pt, Pt),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Order {
    /// a₁ < … < a_m on ℝ.
    Linear,
    /// lo ≤ a₁ < … < a_m < hi after reduction mod 2π.
    Cyclic { lo: f64, hi: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumSystem {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub order: Order,
    pub eqs: Vec<Eqn>,
    pub ineqs: Vec<Ineq>,
}

impl StratumSystem {
    pub fn new(
        name: &str,
        n: usize,
        k: usize,
        m: usize,
        order: Order,
        eqs: Vec<Eqn>,
        ineqs: Vec<Ineq>,
    ) -> Result<Self> {
        let s = StratumSystem {
            name: name.into(),
            n,
            k,
            m,
            order,
            eqs,
            ineqs,
        };
        if s.equations() != k + m {
            return Err(Error::Dimension(format!(
                "{name}: {} scalar equations for {} unknowns",
                s.equations(),
                k + m
            )));
        }
        Ok(s)
    }

    pub fn equations(&self) -> usize {
        self.eqs.iter().map(|e| e.scalars(self.n)).sum()
    }

    pub fn unknowns(&self) -> usize {
        self.k + self.m
    }

    fn cyclic(&self) -> bool {
        matches!(self.order, Order::Cyclic { .. })
    }

    /// Residual vector at configuration `a` on `curve`.
    pub fn residual(&self, curve: &dyn Curve, a: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut r = Vec::with_capacity(self.equations());
        for e in &self.eqs {
            match *e {
                Eqn::Coincide(x, y) => {
                    let (fx, fy) = (curve.d(x.value(a), 0), curve.d(y.value(a), 0));
                    r.extend((1..n).map(|i| fx[i] - fy[i]));
                }
                Eqn::TangentAlong(x) => {
                    let v = curve.d(x.value(a), 1);
                    r.extend((2..n).map(|i| v[i]));
                }
                Eqn::DiffAlong(x, y) => {
                    let (fx, fy) = (curve.d(x.value(a), 0), curve.d(y.value(a), 0));
                    r.extend((2..n).map(|i| fx[i] - fy[i]));
                }
                Eqn::Coplanar(x, y) => {
                    let (v, w) = (curve.d(x.value(a), 1), curve.d(y.value(a), 1));
                    r.extend((3..n).map(|j| v[2] * w[j] - v[j] * w[2]));
                }
            }
        }
        r
    }

    /// Analytic partial derivatives of the residual in the configuration.
    fn jac_config(&self, curve: &dyn Curve, a: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        let mut j = DMatrix::zeros(self.equations(), self.m);
        let mut row = 0;
        let put = |j: &mut DMatrix<f64>, row: usize, p: Pt, col: &[f64], sign: f64| {
            if let Some(i) = p.free() {
                for (k, v) in col.iter().enumerate() {
                    j[(row + k, i)] += sign * v;
                }
            }
        };
        for e in &self.eqs {
            match *e {
                Eqn::Coincide(x, y) => {
                    let (dx, dy) = (curve.d(x.value(a), 1), curve.d(y.value(a), 1));
                    put(&mut j, row, x, &dx[1..n], 1.0);
                    put(&mut j, row, y, &dy[1..n], -1.0);
                }
                Eqn::TangentAlong(x) => {
                    let ddx = curve.d(x.value(a), 2);
                    put(&mut j, row, x, &ddx[2..n], 1.0);
                }
                Eqn::DiffAlong(x, y) => {
                    let (dx, dy) = (curve.d(x.value(a), 1), curve.d(y.value(a), 1));
                    put(&mut j, row, x, &dx[2..n], 1.0);
                    put(&mut j, row, y, &dy[2..n], -1.0);
                }
                Eqn::Coplanar(x, y) => {
                    let (v, w) = (curve.d(x.value(a), 1), curve.d(y.value(a), 1));
                    let (dv, dw) = (curve.d(x.value(a), 2), curve.d(y.value(a), 2));
                    let cx: Vec<f64> = (3..n).map(|k| dv[2] * w[k] - dv[k] * w[2]).collect();
                    let cy: Vec<f64> = (3..n).map(|k| v[2] * dw[k] - v[k] * dw[2]).collect();
                    put(&mut j, row, x, &cx, 1.0);
                    put(&mut j, row, y, &cy, 1.0);
                }
            }
            row += e.scalars(n);
        }
        j
    }

    /// Signed margins of the strict inequalities (positive = satisfied).
    pub fn margins(&self, curve: &dyn Curve, a: &[f64]) -> Vec<(String, f64)> {
        let n = self.n;
        self.ineqs
            .iter()
            .map(|q| match *q {
                Ineq::Above(x, y) => {
                    ("above".into(), curve.d(x.value(a), 0)[0] - curve.d(y.value(a), 0)[0])
                }
                Ineq::TangentRight(x) => {
                    let v = curve.d(x.value(a), 1);
                    let norm = (1..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
                    ("tangent-right".into(), v[1] / norm)
                }
                Ineq::DiffRight(x, y) => {
                    ("diff-right".into(), curve.d(x.value(a), 0)[1] - curve.d(y.value(a), 0)[1])
                }
                Ineq::ExteriorAngle(x, y) => {
                    let (v, w) = (curve.d(x.value(a), 1), curve.d(y.value(a), 1));
                    ("exterior-angle".into(), -exterior_coeffs(&v, &w, n).0.min(exterior_coeffs(&v, &w, n).1))
                }
            })
            .collect()
    }

    /// Gaps of the ordering constraints (positive = satisfied).
    fn order_gaps(&self, a: &[f64]) -> Vec<f64> {
        let mut g: Vec<f64> = a.windows(2).map(|w| w[1] - w[0]).collect();
        if let Order::Cyclic { lo, hi } = self.order {
            if let (Some(f), Some(l)) = (a.first(), a.last()) {
                g.push(f - lo);
                g.push(hi - l);
            }
        }
        g
    }

    /// All points of the configuration (free and anchored), for the
    /// diagonal test.
    fn all_points(&self, a: &[f64]) -> Vec<f64> {
        let mut refs: Vec<Pt> = Vec::new();
        let mut add = |p: Pt| {
            if !refs.contains(&p) {
                refs.push(p)
            }
        };
        for e in &self.eqs {
            match *e {
                Eqn::Coincide(x, y) | Eqn::DiffAlong(x, y) | Eqn::Coplanar(x, y) => {
                    add(x);
                    add(y)
                }
                Eqn::TangentAlong(x) => add(x),
            }
        }
        let mut pts: Vec<f64> = refs.iter().map(|p| p.value(a)).collect();
        if self.cyclic() {
            pts.iter_mut().for_each(|x| *x = x.rem_euclid(TAU));
        }
        pts.sort_by(f64::total_cmp);
        pts
    }
}

/// Coefficients (λ, μ) of right = λ v̂ + μ ŵ in the projection (unit v̂, ŵ),
/// least squares when n > 3.
fn exterior_coeffs(v: &Vecn, w: &Vecn, n: usize) -> (f64, f64) {
    let nv = (1..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
    let nw = (1..n).map(|i| w[i] * w[i]).sum::<f64>().sqrt();
    let vv: Vec<f64> = (1..n).map(|i| v[i] / nv).collect();
    let ww: Vec<f64> = (1..n).map(|i| w[i] / nw).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let (a11, a12, a22) = (dot(&vv, &vv), dot(&vv, &ww), dot(&ww, &ww));
    let (b1, b2) = (vv[0], ww[0]);
    let det = a11 * a22 - a12 * a12;
    ((a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub stratum: String,
    pub u: Vec<f64>,
    pub config: Vec<f64>,
    pub residual: f64,
    pub jacobian_sign: i8,
    pub tags: Vec<String>,
    pub multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub u: Vec<f64>,
    pub a: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub seeds: usize,
    pub converged: usize,
    pub diverged: usize,
    pub discarded: usize,
    pub roots: usize,
}

fn full_jacobian(
    sys: &StratumSystem,
    cycle: &dyn KnotCycle,
    u: &[f64],
    a: &[f64],
    tol: &Tolerances,
) -> (DVector<f64>, DMatrix<f64>) {
    let curve = cycle.curve_at(u);
    let r = DVector::from_vec(sys.residual(curve.as_ref(), a));
    let (neq, k) = (sys.equations(), sys.k);
    let mut j = DMatrix::zeros(neq, k + sys.m);
    let dom = cycle.domain();
    for i in 0..k {
        let mut d = vec![0.0; k];
        d[i] = tol.fd_step;
        let up = dom.retract(u, &d);
        d[i] = -tol.fd_step;
        let um = dom.retract(u, &d);
        let rp = sys.residual(cycle.curve_at(&up).as_ref(), a);
        let rm = sys.residual(cycle.curve_at(&um).as_ref(), a);
        for row in 0..neq {
            j[(row, i)] = (rp[row] - rm[row]) / (2.0 * tol.fd_step);
        }
    }
    let jc = sys.jac_config(curve.as_ref(), a);
    j.view_mut((0, k), (neq, sys.m)).copy_from(&jc);
    (r, j)
}

/// Residual with each row divided by max(1, |row of J|∞): a residual at the
/// floating-point floor of a steep equation counts as converged.
fn scaled_norm(r: &DVector<f64>, j: &DMatrix<f64>) -> f64 {
    (0..r.len())
        .map(|i| r[i].abs() / j.row(i).amax().max(1.0))
        .fold(0.0, f64::max)
}

/// Damped Newton from one seed; returns the converged point.
pub fn newton(
    sys: &StratumSystem,
    cycle: &dyn KnotCycle,
    seed: &Seed,
    tol: &Tolerances,
) -> Option<Seed> {
    let dom = cycle.domain();
    let (mut u, mut a) = (seed.u.clone(), seed.a.clone());
    for _ in 0..tol.max_iter {
        let (r, j) = full_jacobian(sys, cycle, &u, &a, tol);
        let rn = r.amax();
        if !rn.is_finite() {
            return None;
        }
        let step = solve(&j, &(-&r))?;
        if scaled_norm(&r, &j) < tol.newton_tol && step.amax() < tol.step_tol {
            return Some(Seed { u, a });
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let du: Vec<f64> = (0..sys.k).map(|i| lambda * step[i]).collect();
            let u2 = dom.retract(&u, &du);
            let a2: Vec<f64> = (0..sys.m).map(|i| a[i] + lambda * step[sys.k + i]).collect();
            let r2 = DVector::from_vec(sys.residual(cycle.curve_at(&u2).as_ref(), &a2));
            if r2.amax() < rn || lambda < 1e-3 {
                u = u2;
                a = a2;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let (r, j) = full_jacobian(sys, cycle, &u, &a, tol);
    let step = solve(&j, &(-&r))?;
    (scaled_norm(&r, &j) < tol.newton_tol && step.amax() < tol.step_tol).then_some(Seed { u, a })
}

fn describe(u: &[f64], a: &[f64]) -> String {
    format!("u = {u:?}, config = {a:?}")
}

fn cyc_dist(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Newton from every seed, then filter, check transversality and deduplicate.
pub fn solve_square(
    sys: &StratumSystem,
    cycle: &dyn KnotCycle,
    seeds: &[Seed],
    tol: &Tolerances,
) -> Result<(Vec<Event>, SolveStats)> {
    if sys.k != cycle.dim() {
        return Err(Error::Dimension(format!(
            "{} needs a {}-dimensional cycle, got {}",
            sys.name,
            sys.k,
            cycle.dim()
        )));
    }
    let mut stats = SolveStats {
        seeds: seeds.len(),
        ..Default::default()
    };
    let roots: Vec<Option<Seed>> = seeds.par_iter().map(|s| newton(sys, cycle, s, tol)).collect();
    let mut events: Vec<Event> = Vec::new();
    let dom = cycle.domain();
    for root in roots {
        let Some(Seed { u, mut a }) = root else {
            stats.diverged += 1;
            continue;
        };
        stats.converged += 1;
        let u = dom.normalize(&u);
        if sys.cyclic() {
            a.iter_mut().for_each(|x| *x = x.rem_euclid(TAU));
        }
        let pts = sys.all_points(&a);
        let diagonal = pts.windows(2).any(|w| (w[1] - w[0]).abs() < tol.dedup_radius)
            || (sys.cyclic()
                && pts.len() > 1
                && cyc_dist(pts[0], *pts.last().unwrap()) < tol.dedup_radius);
        if diagonal {
            stats.discarded += 1;
            continue;
        }
        let gaps = sys.order_gaps(&a);
        if gaps.iter().any(|&g| g < -tol.margin_tol) {
            stats.discarded += 1;
            continue;
        }
        if let Some(g) = gaps.iter().find(|g| g.abs() <= tol.margin_tol) {
            return Err(Error::InequalityTie {
                what: format!("{} ordering", sys.name),
                location: describe(&u, &a),
                margin: *g,
            });
        }
        let curve = cycle.curve_at(&u);
        let margins = sys.margins(curve.as_ref(), &a);
        if margins.iter().any(|m| m.1 < -tol.margin_tol) {
            stats.discarded += 1;
            continue;
        }
        if let Some((what, m)) = margins.iter().find(|m| m.1.abs() <= tol.margin_tol) {
            return Err(Error::InequalityTie {
                what: format!("{} {what}", sys.name),
                location: describe(&u, &a),
                margin: *m,
            });
        }
        let same = |e: &Event| {
            let du = dom.distance(&e.u, &u);
            let da = e
                .config
                .iter()
                .zip(&a)
                .map(|(x, y)| if sys.cyclic() { cyc_dist(*x, *y) } else { (x - y).abs() })
                .fold(0.0, f64::max);
            du.max(da) < tol.dedup_radius
        };
        if events.iter().any(same) {
            continue;
        }
        let (r, j) = full_jacobian(sys, cycle, &u, &a, tol);
        let cond = equilibrated_cond(&j);
        if !(cond < tol.cond_threshold) {
            return Err(Error::NonTransverse {
                location: format!("{}: {}", sys.name, describe(&u, &a)),
                cond,
            });
        }
        events.push(Event {
            stratum: sys.name.clone(),
            u,
            config: a,
            residual: r.amax(),
            jacobian_sign: det_sign(&j),
            tags: margins.iter().map(|m| m.0.clone()).collect(),
            multiplicity: 1,
        });
    }
    sort_events(&mut events);
    stats.roots = events.len();
    Ok((events, stats))
}

pub fn sort_events(events: &mut [Event]) {
    events.sort_by(|x, y| {
        x.stratum
            .cmp(&y.stratum)
            .then_with(|| cmp_slices(&x.u, &y.u))
            .then_with(|| cmp_slices(&x.config, &y.config))
    });
}

fn cmp_slices(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Grid seeds over (domain × ordered configurations), keeping those whose
/// coincidence residual is below `prune`.
pub fn seed_grid(
    sys: &StratumSystem,
    cycle: &dyn KnotCycle,
    density: usize,
    config_density: usize,
    prune: f64,
) -> Vec<Seed> {
    let us = cycle.domain().grid(density);
    let (lo, hi) = match sys.order {
        Order::Cyclic { lo, hi } => (lo, hi),
        Order::Linear => {
            let c = cycle.curve_at(&us[0]);
            c.window()
        }
    };
    let cd = config_density.max(1);
    let vals: Vec<f64> = (0..cd).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / cd as f64).collect();
    let mut configs: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..sys.m {
        let mut next = Vec::new();
        for c in &configs {
            for &v in &vals {
                if c.last().map_or(true, |&l| v > l) {
                    let mut c2 = c.clone();
                    c2.push(v);
                    next.push(c2);
                }
            }
        }
        configs = next;
    }
    let coincide: Vec<Eqn> = sys.eqs.iter().filter(|e| matches!(e, Eqn::Coincide(..))).copied().collect();
    let probe = StratumSystem {
        eqs: coincide,
        ..sys.clone()
    };
    us.par_iter()
        .flat_map_iter(|u| {
            let curve = cycle.curve_at(u);
            configs
                .iter()
                .filter(|a| {
                    probe
                        .residual(curve.as_ref(), a)
                        .iter()
                        .all(|r| r.abs() < prune)
                })
                .map(|a| Seed { u: u.clone(), a: a.clone() })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Seeds matching every coincidence block of `sys` with a crossing (or a
/// nearly merging pair of crossings) of a sampled frame; the remaining
/// equations must hold to `angle_tol` (normalized).
pub fn seed_from_crossings(
    sys: &StratumSystem,
    cycle: &dyn KnotCycle,
    frames: &[(Vec<f64>, Vec<Crossing>)],
    merge_tol: f64,
    angle_tol: f64,
) -> Vec<Seed> {
    let blocks: Vec<(Pt, Pt)> = sys
        .eqs
        .iter()
        .filter_map(|e| match *e {
            Eqn::Coincide(x, y) => Some((x, y)),
            _ => None,
        })
        .collect();
    let others: Vec<Eqn> = sys.eqs.iter().filter(|e| !matches!(e, Eqn::Coincide(..))).copied().collect();
    let compact = cycle.kind() == CurveKind::Compact;
    let dist = |x: f64, y: f64| if compact { cyc_dist(x, y) } else { (x - y).abs() };
    let mut seeds: Vec<Seed> = frames
        .par_iter()
        .flat_map_iter(|(u, cs)| {
            let mut found: Vec<Vec<f64>> = Vec::new();
            let mut assign = vec![None; sys.m];
            extend(&blocks, 0, cs, &mut assign, &mut found, merge_tol, &dist);
            let curve = cycle.curve_at(u);
            found
                .into_iter()
                .filter(|a| {
                    let mut sorted = a.clone();
                    sorted.sort_by(f64::total_cmp);
                    sorted == *a
                })
                .filter(|a| others.iter().all(|e| normalized_ok(e, curve.as_ref(), a, sys.n, angle_tol)))
                .map(|a| Seed { u: u.clone(), a })
                .collect::<Vec<_>>()
        })
        .collect();
    seeds.dedup();
    seeds
}

fn normalized_ok(e: &Eqn, curve: &dyn Curve, a: &[f64], n: usize, tol: f64) -> bool {
    let unit = |v: Vecn| {
        let r = (1..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        let mut o = v;
        o.iter_mut().for_each(|x| *x /= r);
        o
    };
    match *e {
        Eqn::TangentAlong(x) => {
            let v = unit(curve.d(x.value(a), 1));
            (2..n).all(|i| v[i].abs() < tol) && v[1] > 0.0
        }
        Eqn::DiffAlong(x, y) => {
            let (fx, fy) = (curve.d(x.value(a), 0), curve.d(y.value(a), 0));
            let mut d = [0.0; crate::MAX_DIM];
            for i in 0..n {
                d[i] = fx[i] - fy[i];
            }
            let v = unit(d);
            (2..n).all(|i| v[i].abs() < tol)
        }
        Eqn::Coplanar(x, y) => {
            let (v, w) = (unit(curve.d(x.value(a), 1)), unit(curve.d(y.value(a), 1)));
            (3..n).all(|j| (v[2] * w[j] - v[j] * w[2]).abs() < tol)
        }
        Eqn::Coincide(..) => true,
    }
}

fn extend(
    blocks: &[(Pt, Pt)],
    i: usize,
    cs: &[Crossing],
    assign: &mut Vec<Option<f64>>,
    out: &mut Vec<Vec<f64>>,
    tol: f64,
    dist: &dyn Fn(f64, f64) -> f64,
) {
    if i == blocks.len() {
        if assign.iter().all(Option::is_some) {
            out.push(assign.iter().map(|x| x.unwrap()).collect());
        }
        return;
    }
    let (x, y) = blocks[i];
    for c in cs {
        for (vx, vy) in [(c.s, c.t), (c.t, c.s)] {
            let saved = assign.clone();
            if bind(x, vx, assign, tol, dist) && bind(y, vy, assign, tol, dist) {
                extend(blocks, i + 1, cs, assign, out, tol, dist);
            }
            *assign = saved;
        }
    }
}

fn bind(p: Pt, v: f64, assign: &mut [Option<f64>], tol: f64, dist: &dyn Fn(f64, f64) -> f64) -> bool {
    let (i, off) = match p {
        Pt::Anchor(a) => return dist(a, v) < tol,
        Pt::Free(i) => (i, 0.0),
        Pt::Offset(i, c) => (i, c),
    };
    match assign[i] {
        Some(old) => dist(old + off, v) < tol,
        None => {
            assign[i] = Some(v - off);
            true
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Mod2,
    Signed,
}

/// Σ multiplicity (mod 2), or Σ multiplicity · jacobian_sign.
pub fn count(events: &[Event], mode: CountMode) -> i64 {
    match mode {
        CountMode::Mod2 => events.iter().map(|e| e.multiplicity as i64).sum::<i64>().rem_euclid(2),
        CountMode::Signed => events.iter().map(|e| e.multiplicity as i64 * e.jacobian_sign as i64).sum(),
    }
}
