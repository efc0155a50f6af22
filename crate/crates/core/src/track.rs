//! Event detection along a loop of long knots by continuing the crossings of
//! the projection between frames.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crossing::{crossings_with, make_crossing, refine_pair, Crossing, CrossingOptions};
use crate::curve::CurveKind;
use crate::error::{Error, Result};
use crate::family::KnotCycle;
use crate::strata::{newton, Eqn, Order, Pt, Seed, StratumSystem, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackOptions {
    pub frames: usize,
    pub min_dt: f64,
    pub max_depth: usize,
    /// Allowed visit displacement as a fraction of the gap to its neighbours.
    pub quiet: f64,
    pub match_tol: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            frames: 2048,
            min_dt: 1e-10,
            max_depth: 60,
            quiet: 0.3,
            match_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub tau: f64,
    pub crossings: Vec<Crossing>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    TriplePoint,
    Tangency,
    Alignment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackEvent {
    pub kind: EventKind,
    pub tau: f64,
    pub bracket: (f64, f64),
    /// Triple point: x < y < z. Alignment: (b, d) with b the aligned lower
    /// strand. Tangency: empty.
    pub strands: Vec<f64>,
    pub heights: Vec<f64>,
    /// Crossings of the frame just before the event.
    pub before: Vec<Crossing>,
    pub polished: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub frames: Vec<Frame>,
    pub events: Vec<TrackEvent>,
}

fn lenient() -> CrossingOptions {
    CrossingOptions {
        strict: false,
        refine: 8,
        ..Default::default()
    }
}

fn at(tau: f64) -> [f64; 1] {
    [tau.rem_euclid(1.0)]
}

fn frame(cycle: &dyn KnotCycle, tau: f64) -> Frame {
    let curve = cycle.curve_at(&at(tau));
    Frame {
        tau,
        crossings: crossings_with(curve.as_ref(), &lenient()).unwrap_or_default(),
    }
}

/// Continue crossing `c` from frame time `ta` to `tb`.
fn continue_crossing(cycle: &dyn KnotCycle, c: &Crossing, ta: f64, tb: f64) -> Option<Crossing> {
    let (ua, ub) = (at(ta)[0], at(tb)[0]);
    let s = cycle.transport(ua, ub, c.s);
    let t = cycle.transport(ua, ub, c.t);
    let curve = cycle.curve_at(&[ub]);
    let (s, t) = refine_pair(curve.as_ref(), s, t)?;
    let (s, t) = if s <= t { (s, t) } else { (t, s) };
    ((t - s).abs() > 1e-12).then(|| make_crossing(curve.as_ref(), s, t))
}

enum Interval {
    Quiet(Vec<usize>),
    Busy,
}

fn match_frames(cycle: &dyn KnotCycle, a: &Frame, b: &Frame, opt: &TrackOptions) -> Interval {
    if a.crossings.len() != b.crossings.len() {
        return Interval::Busy;
    }
    let (ua, ub) = (at(a.tau)[0], at(b.tau)[0]);
    let mut map = Vec::with_capacity(a.crossings.len());
    let mut used = vec![false; b.crossings.len()];
    // (transported visit parameter, matched parameter)
    let mut visits: Vec<(f64, f64)> = Vec::new();
    for c in &a.crossings {
        let Some(d) = continue_crossing(cycle, c, a.tau, b.tau) else {
            return Interval::Busy;
        };
        let j = b.crossings.iter().position(|e| {
            (e.s - d.s).abs().max((e.t - d.t).abs()) < opt.match_tol
                && e.over_s == d.over_s
                && e.sign == d.sign
        });
        let Some(j) = j else {
            return Interval::Busy;
        };
        if used[j] {
            return Interval::Busy;
        }
        used[j] = true;
        map.push(j);
        let e = &b.crossings[j];
        visits.push((cycle.transport(ua, ub, c.s), e.s));
        visits.push((cycle.transport(ua, ub, c.t), e.t));
    }
    visits.sort_by(|x, y| x.0.total_cmp(&y.0));
    for i in 0..visits.len() {
        let lo = if i > 0 { visits[i].0 - visits[i - 1].0 } else { f64::INFINITY };
        let hi = if i + 1 < visits.len() { visits[i + 1].0 - visits[i].0 } else { f64::INFINITY };
        let gap = lo.min(hi);
        if (visits[i].1 - visits[i].0).abs() >= opt.quiet * gap {
            return Interval::Busy;
        }
    }
    if visits.windows(2).any(|w| w[1].1 <= w[0].1) {
        return Interval::Busy;
    }
    Interval::Quiet(map)
}

/// Tangent components (right, transverse) of the strand `s` at frame `tau`.
fn tangent(cycle: &dyn KnotCycle, tau: f64, s: f64) -> (f64, f64) {
    let v = cycle.curve_at(&at(tau)).d(s, 1);
    (v[1], v[2])
}

fn height(cycle: &dyn KnotCycle, tau: f64, s: f64) -> f64 {
    cycle.curve_at(&at(tau)).d(s, 0)[0]
}

fn polish(sys: &StratumSystem, cycle: &dyn KnotCycle, tau: f64, a: Vec<f64>) -> Option<Seed> {
    let seed = Seed { u: at(tau).to_vec(), a };
    newton(sys, cycle, &seed, &Tolerances::default())
}

pub fn triple_system() -> StratumSystem {
    use Pt::Free;
    StratumSystem::new(
        "triple",
        3,
        1,
        3,
        Order::Linear,
        vec![Eqn::Coincide(Free(0), Free(1)), Eqn::Coincide(Free(0), Free(2))],
        vec![],
    )
    .expect("square")
}

pub fn alignment_system() -> StratumSystem {
    use Pt::Free;
    StratumSystem::new(
        "alignment",
        3,
        1,
        2,
        Order::Linear,
        vec![Eqn::Coincide(Free(0), Free(1)), Eqn::TangentAlong(Free(0))],
        vec![],
    )
    .expect("square")
}

/// Lift a polished τ back near the bracket (the circle chart wraps to [0, 1)).
fn lift(tau: f64, near: f64) -> f64 {
    tau + (near - tau).round()
}

fn locate_alignment(
    cycle: &dyn KnotCycle,
    a: &Frame,
    c: &Crossing,
    tb: f64,
    opt: &TrackOptions,
) -> Result<TrackEvent> {
    let (mut lo, mut hi) = (a.tau, tb);
    let mut cur = *c;
    let mut cur_t = a.tau;
    let g0 = tangent(cycle, lo, c.s).1.signum();
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        let Some(d) = continue_crossing(cycle, &cur, cur_t, mid) else {
            break;
        };
        if tangent(cycle, mid, d.s).1.signum() == g0 {
            lo = mid;
            cur = d;
            cur_t = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    let (mut tau, mut strands, mut polished) = (mid, vec![cur.s, cur.t], false);
    if let Some(p) = polish(&alignment_system(), cycle, mid, strands.clone()) {
        let t = lift(p.u[0], mid);
        if (t - mid).abs() < (tb - a.tau).max(opt.min_dt) {
            tau = t;
            strands = p.a;
            polished = true;
        }
    }
    Ok(TrackEvent {
        kind: EventKind::Alignment,
        tau,
        bracket: (a.tau, tb),
        heights: strands.iter().map(|&s| height(cycle, tau, s)).collect(),
        strands,
        before: frame(cycle, lo).crossings,
        polished,
    })
}

fn alignments(
    cycle: &dyn KnotCycle,
    a: &Frame,
    b: &Frame,
    map: &[usize],
    opt: &TrackOptions,
) -> Result<Option<Vec<TrackEvent>>> {
    let mut out = Vec::new();
    for (i, c) in a.crossings.iter().enumerate() {
        if c.over_s {
            continue;
        }
        let d = &b.crossings[map[i]];
        let (ra, ga) = tangent(cycle, a.tau, c.s);
        let (rb, gb) = tangent(cycle, b.tau, d.s);
        if ga.signum() == gb.signum() {
            continue;
        }
        if (ra > 0.0) != (rb > 0.0) {
            return Ok(None);
        }
        if ra > 0.0 {
            out.push(locate_alignment(cycle, a, c, b.tau, opt)?);
        }
    }
    Ok(Some(out))
}

/// Three crossings pairwise sharing strands, with the smallest planar
/// diameter. Returns the crossing indices ordered as (x,y), (x,z), (y,z) and
/// the strand parameters.
fn smallest_triangle(cs: &[Crossing]) -> Option<([usize; 3], [f64; 3], f64)> {
    let mut best: Option<([usize; 3], [f64; 3], f64)> = None;
    let dist = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]);
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            for k in j + 1..cs.len() {
                let idx = [i, j, k];
                let mut ps: Vec<(f64, usize)> = idx
                    .iter()
                    .flat_map(|&q| [(cs[q].s, q), (cs[q].t, q)])
                    .collect();
                ps.sort_by(|x, y| x.0.total_cmp(&y.0));
                let clusters = [(ps[0], ps[1]), (ps[2], ps[3]), (ps[4], ps[5])];
                if clusters.iter().any(|(p, q)| p.1 == q.1) {
                    continue;
                }
                let spread = clusters.iter().map(|(p, q)| q.0 - p.0).fold(0.0, f64::max);
                let sep = (ps[2].0 - ps[1].0).min(ps[4].0 - ps[3].0);
                if spread >= 0.1 * sep {
                    continue;
                }
                let diam = dist(cs[i].point, cs[j].point)
                    .max(dist(cs[i].point, cs[k].point))
                    .max(dist(cs[j].point, cs[k].point));
                if best.as_ref().map_or(true, |b| diam < b.2) {
                    let strands = [clusters[0].0 .0, clusters[1].0 .0, clusters[2].0 .0];
                    let pick = |a: usize, b: usize| {
                        *idx.iter()
                            .find(|&&q| {
                                let has = |c: usize| clusters[c].0 .1 == q || clusters[c].1 .1 == q;
                                has(a) && has(b)
                            })
                            .unwrap()
                    };
                    best = Some(([pick(0, 1), pick(0, 2), pick(1, 2)], strands, diam));
                }
            }
        }
    }
    best
}

/// Order of the visits to (x,y) and (x,z) along strand x.
fn orientation(cs: &[Crossing], tri: [usize; 3]) -> f64 {
    (cs[tri[0]].s - cs[tri[1]].s).signum()
}

fn nearest(cs: &[Crossing], c: &Crossing) -> Option<usize> {
    (0..cs.len()).min_by(|&i, &j| {
        let d = |e: &Crossing| (e.s - c.s).abs() + (e.t - c.t).abs();
        d(&cs[i]).total_cmp(&d(&cs[j]))
    })
}

/// Classify an interval that could not be shown quiet at the finest scale.
fn classify(cycle: &dyn KnotCycle, a: &Frame, b: &Frame) -> Result<Vec<TrackEvent>> {
    let mid = 0.5 * (a.tau + b.tau);
    if a.crossings.len() != b.crossings.len() {
        return Ok(vec![TrackEvent {
            kind: EventKind::Tangency,
            tau: mid,
            bracket: (a.tau, b.tau),
            strands: vec![],
            heights: vec![],
            before: a.crossings.clone(),
            polished: false,
        }]);
    }
    if let Some((tri, strands, _)) = smallest_triangle(&a.crossings) {
        let image: Option<Vec<usize>> = tri
            .iter()
            .map(|&i| {
                let c = continue_crossing(cycle, &a.crossings[i], a.tau, b.tau).unwrap_or(a.crossings[i]);
                nearest(&b.crossings, &c)
            })
            .collect();
        if let Some(image) = image {
            let tb = [image[0], image[1], image[2]];
            let distinct = tb[0] != tb[1] && tb[1] != tb[2] && tb[0] != tb[2];
            if distinct && orientation(&a.crossings, tri) != orientation(&b.crossings, tb) {
                let (mut tau, mut st, mut polished) = (mid, strands.to_vec(), false);
                if let Some(p) = polish(&triple_system(), cycle, mid, st.clone()) {
                    let t = lift(p.u[0], mid);
                    if (t - mid).abs() < 1e-8 {
                        tau = t;
                        st = p.a;
                        polished = true;
                    }
                }
                return Ok(vec![TrackEvent {
                    kind: EventKind::TriplePoint,
                    tau,
                    bracket: (a.tau, b.tau),
                    heights: st.iter().map(|&s| height(cycle, tau, s)).collect(),
                    strands: st,
                    before: a.crossings.clone(),
                    polished,
                }]);
            }
        }
    }
    // Same word up to relabelling: nothing happened.
    let ok = a.crossings.iter().all(|c| {
        let d = continue_crossing(cycle, c, a.tau, b.tau).unwrap_or(*c);
        nearest(&b.crossings, &d).is_some_and(|j| {
            let e = &b.crossings[j];
            e.over_s == c.over_s && e.sign == c.sign
        })
    });
    if ok {
        Ok(vec![])
    } else {
        Err(Error::Unresolved {
            t: mid,
            detail: format!(
                "crossings could not be matched across [{}, {}]",
                a.tau, b.tau
            ),
        })
    }
}

fn process(
    cycle: &dyn KnotCycle,
    a: Frame,
    b: Frame,
    depth: usize,
    opt: &TrackOptions,
    frames: &mut Vec<Frame>,
    events: &mut Vec<TrackEvent>,
) -> Result<()> {
    let resolved = b.tau - a.tau <= cycle.max_step(a.tau, b.tau);
    if !resolved && b.tau - a.tau > opt.min_dt {
        let m = frame(cycle, 0.5 * (a.tau + b.tau));
        process(cycle, a, m.clone(), depth, opt, frames, events)?;
        return process(cycle, m, b, depth, opt, frames, events);
    }
    if let Interval::Quiet(map) = match_frames(cycle, &a, &b, opt) {
        if let Some(found) = alignments(cycle, &a, &b, &map, opt)? {
            events.extend(found);
            frames.push(a);
            return Ok(());
        }
    }
    if b.tau - a.tau <= opt.min_dt || depth >= opt.max_depth {
        events.extend(classify(cycle, &a, &b)?);
        frames.push(a);
        return Ok(());
    }
    let m = frame(cycle, 0.5 * (a.tau + b.tau));
    process(cycle, a, m.clone(), depth + 1, opt, frames, events)?;
    process(cycle, m, b, depth + 1, opt, frames, events)
}

/// Sweep the loop τ ∈ [0, 1] and report every triple point, tangency and
/// right-alignment of a lower-earlier strand at a crossing.
pub fn track_crossings(cycle: &dyn KnotCycle, opt: &TrackOptions) -> Result<Track> {
    if cycle.dim() != 1 || cycle.kind() != CurveKind::Long || cycle.n() != 3 {
        return Err(Error::Unsupported(
            "crossing tracking needs a loop of long knots in ℝ³".into(),
        ));
    }
    let n = opt.frames.max(2);
    let top: Vec<Frame> = (0..=n)
        .into_par_iter()
        .map(|i| frame(cycle, i as f64 / n as f64))
        .collect();
    let parts: Vec<Result<(Vec<Frame>, Vec<TrackEvent>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (mut f, mut e) = (Vec::new(), Vec::new());
            process(cycle, top[i].clone(), top[i + 1].clone(), 0, opt, &mut f, &mut e)?;
            Ok((f, e))
        })
        .collect();
    let mut track = Track::default();
    for p in parts {
        let (f, e) = p?;
        track.frames.extend(f);
        track.events.extend(e);
    }
    track.events.sort_by(|x, y| x.tau.total_cmp(&y.tau));
    Ok(track)
}
