//! Stratum definitions and evaluation of the long-knot cocycle and the four
//! compact-knot classes on cycles.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::crossing::{crossings, Crossing};
use crate::curve::{Curve, CurveKind};
use crate::error::{Error, Result};
use crate::family::{genericity_report, GenericityReport, KnotCycle};
use crate::linalg::det_sign;
use crate::strata::{
    count, seed_from_crossings, seed_grid, solve_square, sort_events, CountMode, Eqn, Event, Ineq,
    Order, Pt, SolveStats, StratumSystem, Tolerances,
};
use crate::track::{track_crossings, EventKind, Track, TrackEvent, TrackOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassId {
    #[serde(rename = "tt")]
    Tt,
    A,
    B,
    C,
    D,
}

impl ClassId {
    /// Cycle dimension the class is evaluated on.
    pub fn dim(&self, n: usize) -> usize {
        match self {
            ClassId::Tt => 3 * n - 8,
            ClassId::A => n - 1,
            ClassId::B => n - 2,
            ClassId::C => 2 * n - 3,
            ClassId::D => 2 * n - 6,
        }
    }

    pub fn kind(&self) -> CurveKind {
        match self {
            ClassId::Tt => CurveKind::Long,
            _ => CurveKind::Compact,
        }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassId::Tt => "tt",
            ClassId::A => "A",
            ClassId::B => "B",
            ClassId::C => "C",
            ClassId::D => "D",
        })
    }
}

impl FromStr for ClassId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tt" | "TT" => Ok(ClassId::Tt),
            "A" | "a" => Ok(ClassId::A),
            "B" | "b" => Ok(ClassId::B),
            "C" | "c" => Ok(ClassId::C),
            "D" | "d" => Ok(ClassId::D),
            _ => Err(Error::Input(format!("unknown class `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumResult {
    pub name: String,
    pub events: Vec<Event>,
    pub count_mod2: i64,
    pub count_signed: i64,
    pub stats: SolveStats,
}

impl StratumResult {
    fn new(name: &str, mut events: Vec<Event>, stats: SolveStats) -> Self {
        sort_events(&mut events);
        StratumResult {
            name: name.into(),
            count_mod2: count(&events, CountMode::Mod2),
            count_signed: count(&events, CountMode::Signed),
            events,
            stats,
        }
    }

    /// Σ multiplicity.
    pub fn total(&self) -> i64 {
        self.events.iter().map(|e| e.multiplicity as i64).sum()
    }
}

/// Independent recount of the same strata by Newton's method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub counts: Vec<(String, i64)>,
    pub total_mod2: i64,
    pub agree: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub genericity: Option<GenericityReport>,
    pub frames: usize,
    pub triple_points: usize,
    pub tangencies: usize,
    pub alignments: usize,
    pub cross_check: Option<CrossCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub class: ClassId,
    pub n: usize,
    pub strata: Vec<StratumResult>,
    pub total_mod2: i64,
    pub total_signed: i64,
    pub diagnostics: Diagnostics,
}

impl Evaluation {
    fn new(class: ClassId, n: usize, strata: Vec<StratumResult>, diagnostics: Diagnostics) -> Self {
        let total: i64 = strata.iter().map(StratumResult::total).sum();
        Evaluation {
            class,
            n,
            total_mod2: total.rem_euclid(2),
            total_signed: strata.iter().map(|s| s.count_signed).sum(),
            strata,
            diagnostics,
        }
    }

    pub fn stratum(&self, name: &str) -> Option<&StratumResult> {
        self.strata.iter().find(|s| s.name == name)
    }

    /// Σ multiplicity of a stratum (0 if absent).
    pub fn count_of(&self, name: &str) -> i64 {
        self.stratum(name).map_or(0, StratumResult::total)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalOptions {
    pub tol: Tolerances,
    pub track: TrackOptions,
    /// Chart grid resolution for blind seeding.
    pub grid: usize,
    /// Grid points per free configuration point.
    pub config_grid: usize,
    /// Coincidence residual bound for keeping a grid seed.
    pub prune: f64,
    /// Parameter distance for matching crossings to shared points.
    pub merge_tol: f64,
    pub cross_check: bool,
    pub genericity_res: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            tol: Tolerances::default(),
            track: TrackOptions::default(),
            grid: 8,
            config_grid: 32,
            prune: 0.8,
            merge_tol: 1e-6,
            cross_check: true,
            genericity_res: 16,
        }
    }
}

use Pt::{Anchor, Free, Offset};

/// The three strata of the long-knot cocycle of dimension 3n−8.
pub fn tt_strata(n: usize) -> Result<[StratumSystem; 3]> {
    if !(3..=crate::MAX_DIM).contains(&n) {
        return Err(Error::Dimension(format!("n = {n} outside 3..=5")));
    }
    let k = 3 * n - 8;
    let (a, b, c, d, e) = (Free(0), Free(1), Free(2), Free(3), Free(4));
    let sa = StratumSystem::new(
        "Sa",
        n,
        k,
        5,
        Order::Linear,
        vec![Eqn::Coincide(a, d), Eqn::Coincide(e, c), Eqn::Coincide(e, b)],
        vec![Ineq::Above(a, d), Ineq::Above(e, c), Ineq::Above(e, b)],
    )?;
    let sb = StratumSystem::new(
        "Sb",
        n,
        k,
        4,
        Order::Linear,
        vec![Eqn::Coincide(a, c), Eqn::Coincide(b, d), Eqn::TangentAlong(b)],
        vec![Ineq::Above(a, c), Ineq::Above(d, b), Ineq::TangentRight(b)],
    )?;
    let sc = StratumSystem::new(
        "Sc",
        n,
        k,
        3,
        Order::Linear,
        vec![Eqn::Coincide(a, b), Eqn::Coincide(a, c), Eqn::Coplanar(a, b)],
        vec![Ineq::Above(a, b), Ineq::Above(c, a), Ineq::ExteriorAngle(a, b)],
    )?;
    Ok([sa, sb, sc])
}

/// Strata of a compact class; Db only exists for n > 3.
pub fn compact_strata(class: ClassId, n: usize) -> Result<Vec<StratumSystem>> {
    if !(3..=crate::MAX_DIM).contains(&n) {
        return Err(Error::Dimension(format!("n = {n} outside 3..=5")));
    }
    let k = class.dim(n);
    let full = Order::Cyclic { lo: 0.0, hi: TAU };
    let al = Free(0);
    let sys = |name, m, order, eqs, ineqs| StratumSystem::new(name, n, k, m, order, eqs, ineqs);
    Ok(match class {
        ClassId::Tt => return Err(Error::Input("tt is a long-knot class".into())),
        ClassId::A => vec![sys(
            "A",
            0,
            full,
            vec![Eqn::Coincide(Anchor(0.0), Anchor(PI))],
            vec![Ineq::Above(Anchor(0.0), Anchor(PI))],
        )?],
        ClassId::B => vec![
            sys(
                "Ba",
                1,
                Order::Cyclic { lo: 0.0, hi: PI },
                vec![Eqn::Coincide(al, Offset(0, PI))],
                vec![Ineq::Above(al, Offset(0, PI))],
            )?,
            sys(
                "Bb",
                0,
                full,
                vec![Eqn::DiffAlong(Anchor(0.0), Anchor(PI))],
                vec![Ineq::DiffRight(Anchor(0.0), Anchor(PI))],
            )?,
        ],
        ClassId::C => vec![
            sys(
                "Ca",
                1,
                Order::Cyclic { lo: 0.0, hi: FRAC_PI_2 },
                vec![
                    Eqn::Coincide(al, Offset(0, PI)),
                    Eqn::Coincide(Offset(0, FRAC_PI_2), Offset(0, 3.0 * FRAC_PI_2)),
                ],
                vec![
                    Ineq::Above(Offset(0, PI), al),
                    Ineq::Above(Offset(0, FRAC_PI_2), Offset(0, 3.0 * FRAC_PI_2)),
                ],
            )?,
            sys(
                "Cb",
                0,
                full,
                vec![
                    Eqn::Coincide(Anchor(0.0), Anchor(PI)),
                    Eqn::DiffAlong(Anchor(FRAC_PI_2), Anchor(3.0 * FRAC_PI_2)),
                ],
                vec![
                    Ineq::Above(Anchor(PI), Anchor(0.0)),
                    Ineq::DiffRight(Anchor(FRAC_PI_2), Anchor(3.0 * FRAC_PI_2)),
                ],
            )?,
        ],
        ClassId::D => {
            let (a, b, c, d) = (Free(0), Free(1), Free(2), Free(3));
            let mut v = vec![sys(
                "Da",
                4,
                full,
                vec![Eqn::Coincide(a, c), Eqn::Coincide(b, d)],
                vec![Ineq::Above(c, a), Ineq::Above(b, d)],
            )?];
            if n > 3 {
                // β < γ < δ.
                let (b, c, d) = (Free(0), Free(1), Free(2));
                v.push(sys(
                    "Db",
                    3,
                    Order::Cyclic { lo: 0.0, hi: TAU },
                    vec![Eqn::Coincide(c, Anchor(0.0)), Eqn::DiffAlong(d, b)],
                    vec![Ineq::Above(c, Anchor(0.0)), Ineq::DiffRight(d, b)],
                )?);
            }
            v
        }
    })
}

fn check_cycle(class: ClassId, cycle: &dyn KnotCycle) -> Result<()> {
    let n = cycle.n();
    if cycle.kind() != class.kind() {
        return Err(Error::Input(format!("class {class} needs {:?} knots", class.kind())));
    }
    if cycle.dim() != class.dim(n) {
        return Err(Error::Dimension(format!(
            "class {class} for n = {n} is evaluated on {}-cycles, got dimension {}",
            class.dim(n),
            cycle.dim()
        )));
    }
    Ok(())
}

fn genericity(cycle: &dyn KnotCycle, opt: &EvalOptions) -> Result<GenericityReport> {
    let rep = genericity_report(cycle, opt.genericity_res);
    if !rep.is_clean() {
        return Err(Error::Genericity(rep.flags.join("; ")));
    }
    Ok(rep)
}

/// Exterior-angle coefficients of `right` in the basis f₁′(x), f₁′(y).
fn exterior(curve: &dyn Curve, x: f64, y: f64) -> (f64, f64) {
    let (v, w) = (curve.d(x, 1), curve.d(y, 1));
    let (nv, nw) = (v[1].hypot(v[2]), w[1].hypot(w[2]));
    let (v1, v2, w1, w2) = (v[1] / nv, v[2] / nv, w[1] / nw, w[2] / nw);
    let det = v1 * w2 - v2 * w1;
    (w2 / det, -v2 / det)
}

fn near_any(p: f64, strands: &[f64]) -> bool {
    strands.iter().any(|s| (p - s).abs() < 1e-7)
}

fn own(c: &Crossing, strands: &[f64]) -> bool {
    near_any(c.s, strands) && near_any(c.t, strands)
}

/// Multiplicity and stratum of one tracked event (None: not in any stratum).
fn classify_event(
    cycle: &dyn KnotCycle,
    ev: &TrackEvent,
    tol: &Tolerances,
) -> Result<Vec<(&'static str, u32, Vec<String>)>> {
    let mut out = Vec::new();
    match ev.kind {
        EventKind::Tangency => {}
        EventKind::TriplePoint => {
            let (x, y, z) = (ev.strands[0], ev.strands[1], ev.strands[2]);
            let (hx, hy, hz) = (ev.heights[0], ev.heights[1], ev.heights[2]);
            if hz > hx && hz > hy {
                let m = ev
                    .before
                    .iter()
                    .filter(|c| !own(c, &ev.strands))
                    .filter(|c| c.s < x && c.t > y && c.t < z && c.over_s)
                    .count() as u32;
                if m > 0 {
                    out.push(("Sa", m, vec!["triple-point".into(), format!("auxiliary={m}")]));
                }
            }
            if hy < hx && hx < hz {
                let curve = cycle.curve_at(&[ev.tau.rem_euclid(1.0)]);
                let (l, m) = exterior(curve.as_ref(), x, y);
                if l.abs() <= tol.margin_tol || m.abs() <= tol.margin_tol {
                    return Err(Error::InequalityTie {
                        what: "Sc exterior-angle".into(),
                        location: format!("τ = {}", ev.tau),
                        margin: l.abs().min(m.abs()),
                    });
                }
                if l.min(m) < 0.0 {
                    out.push(("Sc", 1, vec!["triple-point".into(), "exterior-angle".into()]));
                }
            }
        }
        EventKind::Alignment => {
            let (b, d) = (ev.strands[0], ev.strands[1]);
            let m = ev
                .before
                .iter()
                .filter(|c| !own(c, &ev.strands))
                .filter(|c| c.s < b && c.t > b && c.t < d && c.over_s)
                .count() as u32;
            if m > 0 {
                out.push(("Sb", m, vec!["alignment".into(), format!("auxiliary={m}")]));
            }
        }
    }
    Ok(out)
}

fn event_sign(cycle: &dyn KnotCycle, ev: &TrackEvent, tol: &Tolerances) -> i8 {
    let sys = match ev.kind {
        EventKind::TriplePoint => crate::track::triple_system(),
        EventKind::Alignment => crate::track::alignment_system(),
        EventKind::Tangency => return 1,
    };
    let dom = cycle.domain();
    let u = [ev.tau.rem_euclid(1.0)];
    let h = tol.fd_step;
    let (up, um) = (dom.retract(&u, &[h]), dom.retract(&u, &[-h]));
    let rp = sys.residual(cycle.curve_at(&up).as_ref(), &ev.strands);
    let rm = sys.residual(cycle.curve_at(&um).as_ref(), &ev.strands);
    let curve = cycle.curve_at(&u);
    let neq = sys.equations();
    let mut j = nalgebra::DMatrix::zeros(neq, neq);
    for r in 0..neq {
        j[(r, 0)] = (rp[r] - rm[r]) / (2.0 * h);
    }
    // Configuration columns by central differences as well; the mini systems
    // are tiny.
    for i in 0..sys.m {
        let mut ap = ev.strands.clone();
        let mut am = ev.strands.clone();
        let hs = 1e-9;
        ap[i] += hs;
        am[i] -= hs;
        let (p, q) = (sys.residual(curve.as_ref(), &ap), sys.residual(curve.as_ref(), &am));
        for r in 0..neq {
            j[(r, 1 + i)] = (p[r] - q[r]) / (2.0 * hs);
        }
    }
    det_sign(&j)
}

/// Evaluate the long-knot cocycle on a loop of long knots in ℝ³ by
/// event-driven counting, optionally recounted by Newton's method.
pub fn evaluate_tt(cycle: &dyn KnotCycle, opt: &EvalOptions) -> Result<Evaluation> {
    check_cycle(ClassId::Tt, cycle)?;
    if cycle.n() != 3 {
        return Err(Error::Unsupported("evaluate_tt handles loops in ℝ³ (n = 3)".into()));
    }
    let track = track_crossings(cycle, &opt.track)?;
    let mut buckets: [Vec<Event>; 3] = Default::default();
    for ev in &track.events {
        for (name, m, tags) in classify_event(cycle, ev, &opt.tol)? {
            let idx = ["Sa", "Sb", "Sc"].iter().position(|s| *s == name).unwrap();
            buckets[idx].push(Event {
                stratum: name.into(),
                u: vec![ev.tau],
                config: ev.strands.clone(),
                residual: 0.0,
                jacobian_sign: event_sign(cycle, ev, &opt.tol),
                tags,
                multiplicity: m,
            });
        }
    }
    let strata: Vec<StratumResult> = ["Sa", "Sb", "Sc"]
        .iter()
        .zip(buckets)
        .map(|(name, evs)| StratumResult::new(name, evs, SolveStats::default()))
        .collect();
    let count_kind = |k: EventKind| track.events.iter().filter(|e| e.kind == k).count();
    let mut diagnostics = Diagnostics {
        genericity: None,
        frames: track.frames.len(),
        triple_points: count_kind(EventKind::TriplePoint),
        tangencies: count_kind(EventKind::Tangency),
        alignments: count_kind(EventKind::Alignment),
        cross_check: None,
    };
    let mut eval = Evaluation::new(ClassId::Tt, 3, strata, diagnostics.clone());
    if opt.cross_check {
        diagnostics.cross_check = Some(newton_tt(cycle, &track, &eval, opt)?);
        eval.diagnostics = diagnostics;
    }
    Ok(eval)
}

/// Solve the three full systems from seeds read off the tracked frames.
pub fn newton_tt(
    cycle: &dyn KnotCycle,
    track: &Track,
    reference: &Evaluation,
    opt: &EvalOptions,
) -> Result<CrossCheck> {
    let frames: Vec<(Vec<f64>, Vec<Crossing>)> = track
        .frames
        .iter()
        .map(|f| (vec![f.tau.rem_euclid(1.0)], f.crossings.clone()))
        .collect();
    let mut counts = Vec::new();
    for sys in tt_strata(3)? {
        let seeds = seed_from_crossings(&sys, cycle, &frames, opt.merge_tol, 0.3);
        let (events, _) = solve_square(&sys, cycle, &seeds, &opt.tol)?;
        counts.push((sys.name.clone(), events.len() as i64));
    }
    let total: i64 = counts.iter().map(|c| c.1).sum();
    let agree = counts.iter().all(|(name, c)| reference.count_of(name) == *c);
    Ok(CrossCheck {
        counts,
        total_mod2: total.rem_euclid(2),
        agree,
    })
}

/// Evaluate a compact-knot class by Newton's method on its strata.
pub fn evaluate_compact(class: ClassId, cycle: &dyn KnotCycle, opt: &EvalOptions) -> Result<Evaluation> {
    check_cycle(class, cycle)?;
    let n = cycle.n();
    let rep = genericity(cycle, opt)?;
    let mut strata = Vec::new();
    for sys in compact_strata(class, n)? {
        let seeds = if cycle.dim() == 0 {
            let curve = cycle.curve_at(&[]);
            let cs = if n == 3 { crossings(curve.as_ref())? } else { vec![] };
            let mut s = seed_from_crossings(&sys, cycle, &[(vec![], cs)], opt.merge_tol, 1e-3);
            if n > 3 || s.is_empty() {
                s.extend(seed_grid(&sys, cycle, 1, opt.config_grid, opt.prune));
            }
            s
        } else {
            seed_grid(&sys, cycle, opt.grid, opt.config_grid, opt.prune)
        };
        let (events, stats) = solve_square(&sys, cycle, &seeds, &opt.tol)?;
        strata.push(StratumResult::new(&sys.name, events, stats));
    }
    let diagnostics = Diagnostics {
        genericity: Some(rep),
        ..Default::default()
    };
    Ok(Evaluation::new(class, n, strata, diagnostics))
}

/// Dispatch on the class.
pub fn evaluate(class: ClassId, cycle: &dyn KnotCycle, opt: &EvalOptions) -> Result<Evaluation> {
    match class {
        ClassId::Tt => evaluate_tt(cycle, opt),
        _ => evaluate_compact(class, cycle, opt),
    }
}

/// Σ sign(X)·sign(Y) over crossing pairs X = (α, γ), Y = (β, δ) with
/// α < β < γ < δ, f(γ) above f(α) and f(β) above f(δ).
pub fn evaluate_d3_direct(knot: &dyn Curve) -> Result<i64> {
    if knot.kind() != CurveKind::Compact || knot.dim() != 3 {
        return Err(Error::Input("evaluate_d3_direct needs a compact knot in ℝ³".into()));
    }
    let cs = crossings(knot)?;
    let mut total = 0i64;
    for x in cs.iter().filter(|c| !c.over_s) {
        for y in cs.iter().filter(|c| c.over_s) {
            if x.s < y.s && y.s < x.t && x.t < y.t {
                total += (x.sign * y.sign) as i64;
            }
        }
    }
    Ok(total)
}
