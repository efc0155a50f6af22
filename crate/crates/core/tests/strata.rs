use num_rational::Rational64;
use proptest::prelude::*;

use knotstrata::cocycle::{
    compact_strata, evaluate, evaluate_compact, evaluate_d3_direct, evaluate_tt, tt_strata, ClassId, EvalOptions,
};
use knotstrata::curve::TrigCurve;
use knotstrata::family::SingleKnot;
use knotstrata::gauss::{evaluate_formula, formula_by_name, project_to_diagram};
use knotstrata::scenarios::{
    figure_eight, fixture_knots, great_circle_cycle, hopf_fiber_cycle, long_unknot, perturb_knot, random_rotation,
    rotated, trefoil, ConstantLoop, WobbleLoop,
};

fn reversed(c: &TrigCurve) -> TrigCurve {
    let mut r = c.clone();
    for coord in &mut r.terms {
        for t in coord.iter_mut() {
            t.2 = -t.2;
        }
    }
    r
}

fn events(ev: &knotstrata::cocycle::Evaluation, name: &str) -> usize {
    ev.stratum(name).map_or(0, |s| s.events.len())
}

#[test]
fn tt_systems_for_space_curves() {
    let [sa, sb, sc] = tt_strata(3).unwrap();
    let shape = |s: &knotstrata::strata::StratumSystem| (s.equations(), s.unknowns());
    assert_eq!((shape(&sa), shape(&sb), shape(&sc)), ((6, 6), (5, 5), (4, 4)));
    assert!([&sa, &sb, &sc].iter().all(|s| s.k == 1));
}

#[test]
fn every_system_is_square() {
    for n in 3..=5 {
        for s in tt_strata(n).unwrap() {
            assert_eq!(s.k, 3 * n - 8);
            assert_eq!(s.equations(), s.unknowns(), "{} n={n}", s.name);
        }
        for class in [ClassId::A, ClassId::B, ClassId::C, ClassId::D] {
            for s in compact_strata(class, n).unwrap() {
                assert_eq!(s.k, class.dim(n));
                assert_eq!(s.equations(), s.unknowns(), "{} n={n}", s.name);
            }
        }
    }
}

#[test]
fn compact_system_arities() {
    for n in 3..=5 {
        let a = compact_strata(ClassId::A, n).unwrap();
        assert_eq!((a[0].m, a[0].equations()), (0, n - 1));
        let c = compact_strata(ClassId::C, n).unwrap();
        let ca = c.iter().find(|s| s.name == "Ca").unwrap();
        assert_eq!((ca.m, ca.equations()), (1, 2 * (n - 1)));
    }
    let d = compact_strata(ClassId::D, 3).unwrap();
    assert_eq!((d[0].k, d[0].m, d[0].equations()), (0, 4, 4));
}

#[test]
fn d3_agrees_with_v2() {
    let v2 = formula_by_name("v2").unwrap();
    let opt = EvalOptions::default();
    let mut knots = fixture_knots();
    knots.push(("reversed_trefoil", reversed(&trefoil())));
    assert!(knots.len() >= 5);
    for (name, k) in knots {
        let ev = evaluate(ClassId::D, &SingleKnot(k.clone()), &opt).unwrap();
        let direct = evaluate_d3_direct(&k).unwrap();
        let formula = evaluate_formula(&v2, &project_to_diagram(&k).unwrap()).unwrap();
        assert_eq!(ev.total_signed, direct, "{name}");
        assert_eq!(Rational64::from(direct), formula, "{name}");
        assert!(ev.strata.iter().flat_map(|s| &s.events).all(|e| e.residual < 1e-8));
    }
}

#[test]
fn reversal_keeps_v2() {
    for (name, k) in fixture_knots() {
        assert_eq!(
            evaluate_d3_direct(&k).unwrap(),
            evaluate_d3_direct(&reversed(&k)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn great_circles_meet_cb_once() {
    let ev = evaluate_compact(ClassId::C, &great_circle_cycle(), &EvalOptions::default()).unwrap();
    assert_eq!(events(&ev, "Ca"), 0);
    assert_eq!(events(&ev, "Cb"), 1);
    assert_eq!(ev.total_signed.abs(), 1);
    assert!(ev.strata.iter().flat_map(|s| &s.events).all(|e| e.residual < 1e-8));
}

#[test]
fn hopf_fibers_meet_a_once() {
    let ev = evaluate_compact(ClassId::A, &hopf_fiber_cycle(), &EvalOptions::default()).unwrap();
    assert_eq!(ev.n, 4);
    assert_eq!(events(&ev, "A"), 1);
    assert_eq!(ev.total_mod2, 1);
}

#[test]
fn constant_loop_has_no_events() {
    let ev = evaluate_tt(&ConstantLoop(long_unknot()), &EvalOptions::default()).unwrap();
    assert_eq!(ev.strata.iter().map(|s| s.events.len()).sum::<usize>(), 0);
    assert_eq!(ev.total_mod2, 0);
}

#[test]
fn contractible_b_loop_is_even() {
    let ev = evaluate_compact(
        ClassId::B,
        &WobbleLoop {
            knot: trefoil(),
            amplitude: 2.5,
        },
        &EvalOptions::default(),
    )
    .unwrap();
    assert!(ev.strata.iter().map(|s| s.events.len()).sum::<usize>() > 0);
    assert_eq!(ev.total_mod2, 0);
}

#[test]
fn class_and_family_must_fit() {
    let opt = EvalOptions::default();
    assert!(evaluate(ClassId::Tt, &SingleKnot(trefoil()), &opt).is_err());
    assert!(evaluate(ClassId::D, &ConstantLoop(long_unknot()), &opt).is_err());
    assert!(evaluate(ClassId::A, &great_circle_cycle(), &opt).is_err());
    assert!(tt_strata(2).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn d3_is_v2_in_general_position(seed in 0u64..10_000, eight in any::<bool>()) {
        let base = if eight { figure_eight() } else { trefoil() };
        let k = perturb_knot(&rotated(&base, &random_rotation(seed)), seed, 0.05);
        let v2 = evaluate_formula(&formula_by_name("v2").unwrap(), &project_to_diagram(&k).unwrap()).unwrap();
        let ev = evaluate(ClassId::D, &SingleKnot(k.clone()), &EvalOptions::default()).unwrap();
        prop_assert_eq!(Rational64::from(ev.total_signed), v2);
        prop_assert_eq!(Rational64::from(if eight { -1 } else { 1 }), v2);
    }
}
