use proptest::prelude::*;
use std::f64::consts::TAU;

use knotstrata::crossing::{crossings, crossings_with, Crossing, CrossingOptions};
use knotstrata::curve::{eval, wrap, Curve, CurveKind, ParamCurve};
use knotstrata::scenarios::{figure_eight, kinked_unknot, long_unknot, round_unknot, torus_trefoil, trefoil};

/// Crossings of a dense closed polyline, by checking every segment pair.
fn polyline_crossings(c: &dyn Curve, m: usize) -> Vec<(f64, f64, i8)> {
    let ts: Vec<f64> = (0..=m).map(|i| TAU * i as f64 / m as f64).collect();
    let pts: Vec<_> = ts.iter().map(|&t| c.d(t, 0)).collect();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 2..m {
            if i == 0 && j == m - 1 {
                continue;
            }
            let (a, b, p, q) = (pts[i], pts[i + 1], pts[j], pts[j + 1]);
            let r = [b[1] - a[1], b[2] - a[2]];
            let s = [q[1] - p[1], q[2] - p[2]];
            let den = r[0] * s[1] - r[1] * s[0];
            if den == 0.0 {
                continue;
            }
            let w = [p[1] - a[1], p[2] - a[2]];
            let u = (w[0] * s[1] - w[1] * s[0]) / den;
            let v = (w[0] * r[1] - w[1] * r[0]) / den;
            if (0.0..1.0).contains(&u) && (0.0..1.0).contains(&v) {
                let ha = a[0] + u * (b[0] - a[0]);
                let hp = p[0] + v * (q[0] - p[0]);
                let (o, un) = if ha > hp { (r, s) } else { (s, r) };
                let sign = if o[0] * un[1] - o[1] * un[0] >= 0.0 { 1 } else { -1 };
                let lerp = |k: usize, f: f64| ts[k] + f * (ts[k + 1] - ts[k]);
                out.push((lerp(i, u), lerp(j, v), sign));
            }
        }
    }
    out
}

fn matches(lib: &[Crossing], oracle: &[(f64, f64, i8)]) -> bool {
    lib.len() == oracle.len()
        && oracle.iter().all(|&(s, t, sign)| {
            lib.iter()
                .any(|c| (c.s - s).abs() < 1e-3 && (c.t - t).abs() < 1e-3 && c.sign == sign)
        })
}

#[test]
fn trefoil_crossings_share_a_sign() {
    let cs = crossings(&trefoil()).unwrap();
    assert_eq!(cs.len(), 3);
    assert!(cs.iter().all(|c| c.sign == cs[0].sign));
    assert!(matches(&cs, &polyline_crossings(&trefoil(), 4000)));
}

#[test]
fn figure_eight_signs_cancel() {
    let cs = crossings(&figure_eight()).unwrap();
    assert_eq!(cs.len(), 4);
    assert_eq!(cs.iter().map(|c| c.sign as i32).sum::<i32>(), 0);
    assert!(matches(&cs, &polyline_crossings(&figure_eight(), 4000)));
}

#[test]
fn fixtures_match_polyline_oracle() {
    for k in [round_unknot(), kinked_unknot(), torus_trefoil()] {
        let cs = crossings(&k).unwrap();
        assert!(matches(&cs, &polyline_crossings(&k, 4000)), "{cs:?}");
    }
}

#[test]
fn doubled_density_moves_nothing() {
    for k in [trefoil(), figure_eight(), torus_trefoil()] {
        let a = crossings(&k).unwrap();
        let b = crossings_with(
            &k,
            &CrossingOptions {
                refine: 2,
                ..CrossingOptions::default()
            },
        )
        .unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.s - y.s).abs() < 1e-6 && (x.t - y.t).abs() < 1e-6);
            assert_eq!(x.sign, y.sign);
            assert_eq!(x.over_s, y.over_s);
        }
    }
}

#[test]
fn crossings_are_ordered_pairs() {
    for k in [trefoil(), figure_eight(), torus_trefoil(), kinked_unknot()] {
        let cs = crossings(&k).unwrap();
        for w in cs.windows(2) {
            assert!((w[0].s, w[0].t) < (w[1].s, w[1].t));
        }
        for c in &cs {
            assert!(c.s < c.t);
            let (o, u) = (k.d(c.over(), 0), k.d(c.under(), 0));
            assert!(o[0] > u[0]);
            assert!((o[1] - u[1]).abs() < 1e-9 && (o[2] - u[2]).abs() < 1e-9);
        }
    }
}

#[test]
fn long_unknot_is_straight_outside_window() {
    let c = long_unknot();
    assert_eq!(c.kind(), CurveKind::Long);
    let (a, b) = c.window();
    for t in [a - 3.0, a - 0.5, b + 0.5, b + 7.0] {
        let dd = c.d(t, 2);
        assert!(dd.iter().all(|x| x.abs() < 1e-9), "{t}: {dd:?}");
    }
    assert!(crossings(&c).unwrap().is_empty());
}

#[test]
fn fourth_derivative_is_refused() {
    assert!(eval(&trefoil(), 0.3, 3).is_ok());
    assert!(eval(&trefoil(), 0.3, 4).is_err());
}

#[test]
fn spline_interpolates_its_samples() {
    let ts: Vec<f64> = (0..200).map(|i| TAU * i as f64 / 200.0).collect();
    let c = ParamCurve::from_curve(&trefoil(), &ts).unwrap();
    for (t, x) in c.samples() {
        let y = c.d(t, 0);
        for i in 0..3 {
            assert!((x[i] - y[i]).abs() < 1e-12);
        }
    }
    assert_eq!(crossings(&c).unwrap().len(), 3);
}

fn fd_check(c: &dyn Curve, t: f64, order: usize, h: f64, tol: f64) -> Result<(), TestCaseError> {
    let (p, m, d) = (c.d(t + h, order), c.d(t - h, order), c.d(t, order + 1));
    for i in 0..c.dim() {
        let fd = (p[i] - m[i]) / (2.0 * h);
        prop_assert!((fd - d[i]).abs() < tol * (1.0 + d[i].abs()), "order {order} coord {i}: {fd} vs {}", d[i]);
    }
    Ok(())
}

proptest! {
    #[test]
    fn trig_derivatives_are_consistent(t in 0.0..TAU, order in 0usize..3) {
        for k in [trefoil(), figure_eight()] {
            fd_check(&k, t, order, 1e-5, 1e-6)?;
        }
    }

    #[test]
    fn spline_derivatives_are_consistent(t in 0.0..TAU, order in 0usize..2) {
        let ts: Vec<f64> = (0..64).map(|i| TAU * i as f64 / 64.0).collect();
        let c = ParamCurve::from_curve(&trefoil(), &ts).unwrap();
        fd_check(&c, t, order, 1e-6, 1e-4)?;
    }

    #[test]
    fn wrap_lands_in_period(t in -100.0f64..100.0) {
        let w = wrap(t);
        prop_assert!((0.0..TAU).contains(&w));
        let k = ((t - w) / TAU).round();
        prop_assert!((t - w - k * TAU).abs() < 1e-9);
    }
}
