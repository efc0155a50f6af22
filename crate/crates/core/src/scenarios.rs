//! Concrete knots and cycles of knots.

use rand::{Rng, SeedableRng};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::sync::Arc;

use crate::curve::{Curve, CurveKind, ParamCurve, TrigCurve};
use crate::cocycle::ClassId;
use crate::family::{qmul, rotation, Domain, KnotCycle, Perturbed, SingleKnot};
use crate::error::{Error, Result};
use crate::{Vecn, MAX_DIM};

pub use crate::bead::{trefoil_bead_loop, BeadLoop, BeadParams, Transport};

type Terms = Vec<(u32, f64, f64)>;

fn trig(up: Terms, x: Terms, y: Terms) -> TrigCurve {
    TrigCurve::new(vec![up, x, y])
}

/// Compact trefoil (−sin 3t, sin t + 2 sin 2t, cos t − 2 cos 2t).
pub fn trefoil() -> TrigCurve {
    trig(
        vec![(3, 0.0, -1.0)],
        vec![(1, 0.0, 1.0), (2, 0.0, 2.0)],
        vec![(1, 1.0, 0.0), (2, -2.0, 0.0)],
    )
}

/// Negate the up coordinate.
pub fn mirror(c: &TrigCurve) -> TrigCurve {
    let mut m = c.clone();
    for t in &mut m.terms[0] {
        t.1 = -t.1;
        t.2 = -t.2;
    }
    m
}

/// (2,3) torus knot (sin 3t, (2 + cos 3t) cos 2t, (2 + cos 3t) sin 2t).
pub fn torus_trefoil() -> TrigCurve {
    trig(
        vec![(3, 0.0, 1.0)],
        vec![(2, 2.0, 0.0), (1, 0.5, 0.0), (5, 0.5, 0.0)],
        vec![(2, 0.0, 2.0), (5, 0.0, 0.5), (1, 0.0, -0.5)],
    )
}

/// Figure-eight knot (sin 4t, (2 + cos 2t) cos 3t, (2 + cos 2t) sin 3t).
pub fn figure_eight() -> TrigCurve {
    trig(
        vec![(4, 0.0, 1.0)],
        vec![(3, 2.0, 0.0), (1, 0.5, 0.0), (5, 0.5, 0.0)],
        vec![(3, 0.0, 2.0), (5, 0.0, 0.5), (1, 0.0, 0.5)],
    )
}

/// Slightly tilted round circle: no crossings.
pub fn round_unknot() -> TrigCurve {
    trig(vec![(1, 0.0, 0.3)], vec![(1, 1.0, 0.0)], vec![(1, 0.0, 1.0)])
}

/// Unknot whose projection is a figure eight: one crossing.
pub fn kinked_unknot() -> TrigCurve {
    trig(vec![(1, 0.0, 1.0)], vec![(1, 1.0, 0.0)], vec![(2, 0.0, 0.5)])
}

/// Apply a rotation of ℝ³ to a trigonometric curve.
pub fn rotated(c: &TrigCurve, r: &[[f64; 3]; 3]) -> TrigCurve {
    let mut ks: Vec<u32> = c.terms.iter().flatten().map(|t| t.0).collect();
    ks.sort_unstable();
    ks.dedup();
    let coef = |i: usize, k: u32| -> (f64, f64) {
        c.terms[i]
            .iter()
            .filter(|t| t.0 == k)
            .fold((0.0, 0.0), |acc, t| (acc.0 + t.1, acc.1 + t.2))
    };
    let terms = (0..3)
        .map(|i| {
            ks.iter()
                .map(|&k| {
                    let (mut a, mut b) = (0.0, 0.0);
                    for j in 0..3 {
                        let (cj, dj) = coef(j, k);
                        a += r[i][j] * cj;
                        b += r[i][j] * dj;
                    }
                    (k, a, b)
                })
                .collect()
        })
        .collect();
    TrigCurve::new(terms)
}

/// Uniformly random rotation from a seed.
pub fn random_rotation(seed: u64) -> [[f64; 3]; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q: Vec<f64> = loop {
        let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r2: f64 = v.iter().map(|x| x * x).sum();
        if r2 > 1e-3 && r2 < 1.0 {
            let r = r2.sqrt();
            break v.iter().map(|x| x / r).collect();
        }
    };
    rotation(&q)
}

/// Add random trigonometric terms of total size `amp` (C¹-small for small amp).
pub fn perturb_knot(c: &TrigCurve, seed: u64, amp: f64) -> TrigCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = c.clone();
    for coord in &mut out.terms {
        for k in 1..=3u32 {
            let s = amp / (3.0 * k as f64);
            coord.push((k, rng.gen_range(-s..s), rng.gen_range(-s..s)));
        }
    }
    out
}

/// Named compact fixture knots in ℝ³.
pub fn fixture_knots() -> Vec<(&'static str, TrigCurve)> {
    vec![
        ("unknot", round_unknot()),
        ("kinked_unknot", kinked_unknot()),
        ("trefoil", trefoil()),
        ("mirror_trefoil", mirror(&trefoil())),
        ("torus_trefoil", torus_trefoil()),
        ("figure_eight", figure_eight()),
        ("trefoil_rotated", rotated(&trefoil(), &random_rotation(1))),
        ("figure_eight_rotated", rotated(&figure_eight(), &random_rotation(3))),
    ]
}

/// Long unknot: the line t ↦ (0, t, 0) with a smooth wiggle on [0, 1].
pub fn long_unknot() -> ParamCurve {
    let samples = (0..=64)
        .map(|i| {
            let t = i as f64 / 64.0;
            let b = 16.0 * (t * (1.0 - t)).powi(2);
            (t, [0.2 * b, t, 0.3 * b * (TAU * t).sin(), 0.0, 0.0])
        })
        .collect();
    ParamCurve::long(3, samples, None).expect("fixture is valid")
}

/// The large trefoil of the bead loop as a long spline knot.
pub fn long_trefoil_spline() -> ParamCurve {
    let template = crate::bead::long_trefoil_template();
    let k = crate::bead::long_trefoil(&template);
    let samples = (0..=400)
        .map(|i| {
            let t = i as f64 / 400.0;
            (t, k.d(t, 0))
        })
        .collect();
    ParamCurve::long(3, samples, None).expect("fixture is valid")
}

/// A window of the long trefoil's tail lifted above the knot and swung round
/// a circle of the given radius over the crossings. Shrinking the radius
/// contracts the loop.
pub fn finger_loop(radius: f64) -> Perturbed {
    Perturbed {
        base: arc(ConstantLoop(long_trefoil_spline())),
        center: 1.35,
        width: 0.25,
        a: vecn(&[40.0, -2.6, -0.9]),
        b: vecn(&[0.0, radius, 0.0]),
        c: vecn(&[0.0, 0.0, radius]),
        phase: 0.3,
    }
}

/// Great circles f_R(θ) = R·(0, cos θ, sin θ), R ∈ SO(3).
pub struct GreatCircles;

impl KnotCycle for GreatCircles {
    fn kind(&self) -> CurveKind {
        CurveKind::Compact
    }
    fn n(&self) -> usize {
        3
    }
    fn domain(&self) -> &Domain {
        &Domain::So3
    }
    fn curve_at(&self, u: &[f64]) -> Box<dyn Curve + '_> {
        let r = rotation(u);
        Box::new(TrigCurve::new(
            (0..3).map(|i| vec![(1, r[i][1], r[i][2])]).collect(),
        ))
    }
}

pub fn great_circle_cycle() -> GreatCircles {
    GreatCircles
}

/// Fibers of the Hopf bundle S³ → S²: f_q(θ) = (cos θ + i sin θ)·q in ℍ = ℝ⁴,
/// coordinates (w, x, y, z) with w pointing up.
pub struct HopfFibers;

impl KnotCycle for HopfFibers {
    fn kind(&self) -> CurveKind {
        CurveKind::Compact
    }
    fn n(&self) -> usize {
        4
    }
    fn domain(&self) -> &Domain {
        &Domain::S3
    }
    fn curve_at(&self, u: &[f64]) -> Box<dyn Curve + '_> {
        let q = [u[0], u[1], u[2], u[3]];
        let iq = qmul(&[0.0, 1.0, 0.0, 0.0], &q);
        Box::new(TrigCurve::new((0..4).map(|i| vec![(1, q[i], iq[i])]).collect()))
    }
}

pub fn hopf_fiber_cycle() -> HopfFibers {
    HopfFibers
}

/// Constant one-parameter family.
pub struct ConstantLoop<C: Curve>(pub C);

impl<C: Curve> KnotCycle for ConstantLoop<C> {
    fn kind(&self) -> CurveKind {
        self.0.kind()
    }
    fn n(&self) -> usize {
        self.0.dim()
    }
    fn domain(&self) -> &Domain {
        &Domain::Circle
    }
    fn curve_at(&self, _u: &[f64]) -> Box<dyn Curve + '_> {
        Box::new(crate::family::CurveRef(&self.0))
    }
}

/// A knot rocked by the rotations exp(a·(cos 2πτ·X + sin 2πτ·Y)): a loop in a
/// ball of SO(3), hence contractible.
pub struct WobbleLoop {
    pub knot: TrigCurve,
    pub amplitude: f64,
}

impl KnotCycle for WobbleLoop {
    fn kind(&self) -> CurveKind {
        CurveKind::Compact
    }
    fn n(&self) -> usize {
        3
    }
    fn domain(&self) -> &Domain {
        &Domain::Circle
    }
    fn curve_at(&self, u: &[f64]) -> Box<dyn Curve + '_> {
        let a = TAU * u[0];
        let h = self.amplitude / 2.0;
        let q = crate::family::qexp(&[h * a.cos(), h * a.sin(), 0.3 * h * (2.0 * a).sin()]);
        Box::new(rotated(&self.knot, &rotation(&q)))
    }
}

/// Shared handle for building derived cycles.
pub fn arc<K: KnotCycle + 'static>(k: K) -> Arc<dyn KnotCycle> {
    Arc::new(k)
}

/// Coordinates of `v` in the first `n` slots.
pub fn vecn(v: &[f64]) -> Vecn {
    let mut out = [0.0; MAX_DIM];
    out[..v.len()].copy_from_slice(v);
    out
}

/// A named cycle with the class it is meant to be evaluated against.
pub struct Scenario {
    pub name: &'static str,
    pub class: ClassId,
    pub cycle: Arc<dyn KnotCycle>,
}

pub const SCENARIOS: [&str; 8] = [
    "trefoil_bead_loop",
    "finger_loop",
    "constant_loop",
    "great_circles",
    "hopf_fibers",
    "wobble_loop",
    "knot",
    "unknot",
];

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FingerParams {
    radius: f64,
}

impl Default for FingerParams {
    fn default() -> Self {
        FingerParams { radius: 0.9 }
    }
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct KnotParams {
    knot: String,
    amplitude: f64,
}

impl Default for KnotParams {
    fn default() -> Self {
        KnotParams {
            knot: "trefoil".into(),
            amplitude: 2.5,
        }
    }
}

fn fixture(name: &str) -> Result<TrigCurve> {
    fixture_knots()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, k)| k)
        .ok_or_else(|| Error::Input(format!("unknown fixture knot `{name}`")))
}

fn params<T: DeserializeOwned + Default>(v: &serde_json::Value) -> Result<T> {
    if v.is_null() {
        Ok(T::default())
    } else {
        Ok(T::deserialize(v)?)
    }
}

/// Build a scenario by name; `params` may be null for the defaults.
pub fn scenario(name: &str, p: &serde_json::Value) -> Result<Scenario> {
    let (name, class, cycle): (&'static str, ClassId, Arc<dyn KnotCycle>) = match name {
        "trefoil_bead_loop" => (
            "trefoil_bead_loop",
            ClassId::Tt,
            arc(trefoil_bead_loop(params::<BeadParams>(p)?)?),
        ),
        "finger_loop" => {
            let fp: FingerParams = params(p)?;
            if !(0.0..1.2).contains(&fp.radius) {
                return Err(Error::Construction(format!(
                    "finger radius {} must lie in [0, 1.2)",
                    fp.radius
                )));
            }
            ("finger_loop", ClassId::Tt, arc(finger_loop(fp.radius)))
        }
        "constant_loop" => ("constant_loop", ClassId::Tt, arc(ConstantLoop(long_trefoil_spline()))),
        "great_circles" => ("great_circles", ClassId::C, arc(great_circle_cycle())),
        "hopf_fibers" => ("hopf_fibers", ClassId::A, arc(hopf_fiber_cycle())),
        "wobble_loop" => {
            let kp: KnotParams = params(p)?;
            let knot = fixture(&kp.knot)?;
            ("wobble_loop", ClassId::B, arc(WobbleLoop { knot, amplitude: kp.amplitude }))
        }
        "knot" => {
            let kp: KnotParams = params(p)?;
            ("knot", ClassId::D, arc(SingleKnot(fixture(&kp.knot)?)))
        }
        "unknot" => ("unknot", ClassId::D, arc(SingleKnot(round_unknot()))),
        other => {
            return Err(Error::Input(format!(
                "unknown scenario `{other}`; known: {}",
                SCENARIOS.join(", ")
            )))
        }
    };
    Ok(Scenario { name, class, cycle })
}
