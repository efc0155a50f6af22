//! The acceptance suite, shared by the `selftest` verb and the test target.

use num_rational::Rational64;
use std::fmt;
use std::time::{Duration, Instant};

use crate::chord::{
    boundary, boundary_chain, enumerate_cells, example1_equation, example2_equations,
    homology_table, principal_part_five_cells, principal_part_two_cells, verify_cycle,
};
use crate::cocycle::{
    compact_strata, evaluate_compact, evaluate_d3_direct, evaluate_tt, tt_strata, ClassId,
    EvalOptions, Evaluation,
};
use crate::error::Result;
use crate::family::{KnotCycle, Perturbed, Reparametrized};
use crate::gauss::{evaluate_formula, formula_by_name, parse_gauss, project_to_diagram, GaussDiagram};
use crate::scenarios::{
    arc, finger_loop, fixture_knots, great_circle_cycle, hopf_fiber_cycle, trefoil, trefoil_bead_loop,
    vecn, BeadParams, WobbleLoop,
};

pub struct Criterion {
    pub id: &'static str,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {} ({:.1} s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Budgets in seconds.
pub const BEAD_BUDGET: f64 = 300.0;
pub const COMPACT_BUDGET: f64 = 60.0;
pub const CHAINS_BUDGET: f64 = 60.0;
/// Largest residual accepted for a reported root.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Reference per-stratum counts of the bead loop.
pub const BEAD_REFERENCE: [i64; 3] = [3, 3, 1];

fn timed(
    id: &'static str,
    name: &'static str,
    f: impl FnOnce() -> Result<(bool, String)>,
) -> Criterion {
    let t0 = Instant::now();
    let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Criterion {
        id,
        name,
        pass,
        detail,
        elapsed: t0.elapsed(),
    }
}

fn counts(ev: &Evaluation) -> Vec<i64> {
    ev.strata.iter().map(|s| s.total()).collect()
}

fn max_residual(ev: &Evaluation) -> f64 {
    ev.strata
        .iter()
        .flat_map(|s| &s.events)
        .map(|e| e.residual)
        .fold(0.0, f64::max)
}

fn bead_loop(opt: &EvalOptions) -> Result<(Evaluation, Duration)> {
    let t0 = Instant::now();
    let l = trefoil_bead_loop(BeadParams::default())?;
    let ev = evaluate_tt(&l, opt)?;
    Ok((ev, t0.elapsed()))
}

pub fn bead_parity(bead: &Result<(Evaluation, Duration)>) -> Criterion {
    let mut c = timed("1", "bead-loop parity", || {
        let (ev, dt) = match bead {
            Ok(x) => x,
            Err(e) => return Ok((false, format!("error: {e}"))),
        };
        let c = counts(ev);
        let secs = dt.as_secs_f64();
        let pass = ev.total_mod2 == 1 && secs < BEAD_BUDGET;
        let reference = if c[..] == BEAD_REFERENCE[..] { "matches" } else { "differs from" };
        Ok((
            pass,
            format!(
                "total mod 2 = {} (need 1); (Sa, Sb, Sc) = ({}, {}, {}), total {}, {reference} reference (3, 3, 1); {:.1} s < {BEAD_BUDGET} s at {} frames",
                ev.total_mod2,
                c[0],
                c[1],
                c[2],
                c.iter().sum::<i64>(),
                secs,
                ev.diagnostics.frames
            ),
        ))
    });
    if let Ok((_, dt)) = bead {
        c.elapsed = *dt;
    }
    c
}

pub fn great_circles(opt: &EvalOptions) -> Criterion {
    timed("2", "great circles, class C", || {
        let t0 = Instant::now();
        let ev = evaluate_compact(ClassId::C, &great_circle_cycle(), opt)?;
        let secs = t0.elapsed().as_secs_f64();
        let (ca, cb) = (ev.stratum("Ca").map_or(0, |s| s.events.len()), ev.stratum("Cb").map_or(0, |s| s.events.len()));
        let res = max_residual(&ev);
        let pass = ca == 0 && cb == 1 && ev.total_signed.abs() == 1 && res < RESIDUAL_TOL && secs < COMPACT_BUDGET;
        Ok((
            pass,
            format!(
                "Ca = {ca}, Cb = {cb}, |value| = {}; max residual {res:.1e} < {RESIDUAL_TOL:.0e}",
                ev.total_signed.abs()
            ),
        ))
    })
}

pub fn hopf(opt: &EvalOptions) -> Criterion {
    timed("3", "Hopf fibers, class A (n = 4)", || {
        let t0 = Instant::now();
        let ev = evaluate_compact(ClassId::A, &hopf_fiber_cycle(), opt)?;
        let secs = t0.elapsed().as_secs_f64();
        let a = ev.stratum("A").map_or(0, |s| s.events.len());
        let res = max_residual(&ev);
        let pass = ev.n == 4 && a == 1 && res < RESIDUAL_TOL && secs < COMPACT_BUDGET;
        Ok((pass, format!("A = {a} event(s); max residual {res:.1e}")))
    })
}

/// Trefoil codes related by an R1 kink and an R2 bigon.
pub const TREFOIL_CODES: [&str; 3] = [
    "compact: O1+ U2+ O3+ U1+ O2+ U3+",
    "compact: O1+ O4+ U4+ U2+ O3+ U1+ O2+ U3+",
    "compact: O1+ O5+ O6- U2+ O3+ U1+ U5+ U6- O2+ U3+",
];

/// v2 by scanning every 4-element subsequence of the word for the pattern
/// under(a) < over(b) < over(a) < under(b).
pub fn v2_by_subsequences(g: &GaussDiagram) -> i64 {
    let w = &g.word;
    let n = w.len();
    let mut total = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let (a, b) = (w[i].crossing, w[j].crossing);
                    let pattern = !w[i].over
                        && w[j].over
                        && w[k].over
                        && !w[l].over
                        && w[k].crossing == a
                        && w[l].crossing == b
                        && a != b;
                    if pattern {
                        total += g.signs[a] as i64 * g.signs[b] as i64;
                    }
                }
            }
        }
    }
    total
}

pub fn gauss_suite() -> Criterion {
    timed("4", "Gauss-diagram suite", || {
        let v2 = formula_by_name("v2")?;
        let v3 = formula_by_name("v3")?;
        let unknot = parse_gauss("long:")?;
        let v2_unknot = evaluate_formula(&v2, &unknot)?;
        let codes = TREFOIL_CODES.iter().map(|c| parse_gauss(c)).collect::<Result<Vec<_>>>()?;
        let v2s = codes.iter().map(|g| evaluate_formula(&v2, g)).collect::<Result<Vec<_>>>()?;
        let brute: Vec<i64> = codes.iter().map(v2_by_subsequences).collect();
        let v3s = codes.iter().map(|g| evaluate_formula(&v3, g)).collect::<Result<Vec<_>>>()?;
        let v3m = codes.iter().map(|g| evaluate_formula(&v3, &g.mirror())).collect::<Result<Vec<_>>>()?;
        let same = |v: &[Rational64]| v.iter().all(|x| *x == v[0]);
        let pass = v2_unknot == Rational64::from(0)
            && same(&v2s)
            && v2s.iter().zip(&brute).all(|(a, b)| *a == Rational64::from(*b))
            && same(&v3s)
            && v3s.iter().zip(&v3m).all(|(a, b)| *a == -*b);
        let show = |v: &[Rational64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        Ok((
            pass,
            format!(
                "v2(unknot) = {v2_unknot}; v2 = [{}] vs subsequence count {brute:?}; v3 = [{}], v3(mirror) = [{}]",
                show(&v2s),
                show(&v3s),
                show(&v3m)
            ),
        ))
    })
}

pub fn cross_validation() -> Criterion {
    timed("5", "D(3) direct = v2 of the projected diagram", || {
        let v2 = formula_by_name("v2")?;
        let mut rows = Vec::new();
        let mut pass = true;
        for (name, k) in fixture_knots() {
            let d = evaluate_d3_direct(&k)?;
            let f = evaluate_formula(&v2, &project_to_diagram(&k)?)?;
            pass &= Rational64::from(d) == f;
            rows.push(format!("{name} {d}/{f}"));
        }
        pass &= rows.len() >= 5;
        Ok((pass, rows.join(", ")))
    })
}

pub fn chain_suite() -> Criterion {
    timed("6", "chain-complex golden suite", || {
        let t0 = Instant::now();
        let (chord, star) = example1_equation();
        let e1 = boundary(&chord) == star;
        let eqs = example2_equations();
        let e2 = eqs.iter().filter(|(c, b)| boundary(c) == *b).count();
        let mut dd = true;
        for p in 1..=3 {
            dd &= enumerate_cells(p, None)?
                .iter()
                .all(|c| boundary_chain(&boundary(c)).is_zero());
        }
        let cycles = verify_cycle(&principal_part_two_cells()) && verify_cycle(&principal_part_five_cells());
        let nonzero = |p: usize| -> Result<Vec<usize>> {
            Ok(homology_table(p)?.into_iter().filter(|r| r.rank > 0).map(|r| r.rank).collect())
        };
        let (h1, h2, h3) = (nonzero(1)?, nonzero(2)?, nonzero(3)?);
        let ranks = h1.is_empty() && h2 == [1] && h3 == [1, 1];
        let secs = t0.elapsed().as_secs_f64();
        let pass = e1 && e2 == 13 && eqs.len() == 13 && dd && cycles && ranks && secs < CHAINS_BUDGET;
        Ok((
            pass,
            format!(
                "∂(chord) = star: {e1}; {e2}/13 equations; ∂² = 0 for p ≤ 3: {dd}; principal parts are cycles: {cycles}; nonzero ranks p=1 {h1:?}, p=2 {h2:?}, p=3 {h3:?}"
            ),
        ))
    })
}

fn tt_parity(cycle: &dyn KnotCycle, opt: &EvalOptions) -> Result<i64> {
    Ok(evaluate_tt(cycle, opt)?.total_mod2)
}

pub fn property_suite(bead: &Result<(Evaluation, Duration)>, opt: &EvalOptions) -> Criterion {
    timed("7", "property suite", || {
        let mut notes = Vec::new();
        let mut pass = true;

        let mut square = 0;
        for n in 3..=5 {
            tt_strata(n)?;
            square += 3;
            for class in [ClassId::A, ClassId::B, ClassId::C, ClassId::D] {
                square += compact_strata(class, n)?.len();
            }
        }
        notes.push(format!("{square} systems square"));

        match bead {
            Ok((ev, _)) => {
                let agree = ev
                    .diagnostics
                    .cross_check
                    .as_ref()
                    .is_some_and(|c| c.total_mod2 == ev.total_mod2);
                pass &= agree;
                notes.push(format!("tracker/Newton parity agree: {agree}"));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("bead loop failed: {e}"));
            }
        }

        let base = arc(trefoil_bead_loop(BeadParams::default())?);
        let perturbed = Perturbed {
            base: base.clone(),
            center: 0.5,
            width: 0.06,
            a: vecn(&[0.0, 0.0, 0.0]),
            b: vecn(&[0.01, 0.01, -0.01]),
            c: vecn(&[0.0, 0.01, 0.01]),
            phase: 0.7,
        };
        let reparam = Reparametrized { base: base.clone(), a: 0.3 };
        let mut fine = *opt;
        fine.track.frames = 2 * opt.track.frames;
        let twisted = trefoil_bead_loop(BeadParams { twist: -0.1, ..Default::default() })?;
        let homotopic = [
            ("perturbed", tt_parity(&perturbed, opt)?),
            ("reparametrized", tt_parity(&reparam, opt)?),
            ("doubled frames", tt_parity(base.as_ref(), &fine)?),
            ("twist -0.1", tt_parity(&twisted, opt)?),
        ];
        for (name, p) in homotopic {
            pass &= p == 1;
            notes.push(format!("{name} parity {p}"));
        }

        let finger = evaluate_tt(&finger_loop(0.9), opt)?;
        let n_finger: usize = finger.strata.iter().map(|s| s.events.len()).sum();
        pass &= finger.total_mod2 == 0 && n_finger > 0;
        notes.push(format!("contractible TT loop: {n_finger} events, parity {}", finger.total_mod2));

        let wobble = evaluate_compact(ClassId::B, &WobbleLoop { knot: trefoil(), amplitude: 2.5 }, opt)?;
        let n_wobble: usize = wobble.strata.iter().map(|s| s.events.len()).sum();
        pass &= wobble.total_mod2 == 0 && n_wobble > 0;
        notes.push(format!("contractible B loop: {n_wobble} events, parity {}", wobble.total_mod2));

        Ok((pass, notes.join("; ")))
    })
}

/// Every criterion, in order.
pub fn run_all() -> Vec<Criterion> {
    let opt = EvalOptions::default();
    let bead = bead_loop(&opt);
    vec![
        bead_parity(&bead),
        great_circles(&opt),
        hopf(&opt),
        gauss_suite(),
        cross_validation(),
        chain_suite(),
        property_suite(&bead, &opt),
    ]
}
