use std::f64::consts::TAU;

use knotstrata::cocycle::{evaluate, ClassId, EvalOptions};
use knotstrata::curve::{Curve, ParamCurve};
use knotstrata::io::{
    parse_family, read_curve, read_family, read_record, summary_csv, write_curve, write_family, write_results,
    CurveJson, FamilyJson, RunConfig, RunRecord,
};
use knotstrata::scenarios::{long_unknot, trefoil};
use knotstrata::Error;

fn trefoil_spline(m: usize) -> ParamCurve {
    let ts: Vec<f64> = (0..m).map(|i| TAU * i as f64 / m as f64).collect();
    ParamCurve::from_curve(&trefoil(), &ts).unwrap()
}

#[test]
fn curve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for c in [trefoil_spline(120), long_unknot()] {
        let path = dir.path().join("curve.json");
        write_curve(&c, &path).unwrap();
        let back = read_curve(&path).unwrap();
        assert_eq!(back.samples(), c.samples());
        assert_eq!(back.kind(), c.kind());
        for t in [0.1, 1.3, 4.0] {
            assert_eq!(back.d(t, 1), c.d(t, 1));
        }
    }
}

#[test]
fn bad_curves_are_rejected() {
    let mut j = CurveJson::from_curve(&long_unknot());
    j.samples[3].pop();
    assert!(j.to_curve().is_err());
    let mut j = CurveJson::from_curve(&long_unknot());
    j.window = Some([-1.0, 1.0]);
    assert!(j.to_curve().is_err());
    let mut j = CurveJson::from_curve(&trefoil_spline(40));
    j.n = 9;
    assert!(j.to_curve().is_err());
}

#[test]
fn family_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let frames = vec![CurveJson::from_curve(&trefoil_spline(80))];
    let point = FamilyJson::Frames {
        domain: "point".into(),
        grid: vec![],
        frames,
    };
    let path = dir.path().join("family.json");
    write_family(&point, &path).unwrap();
    let fam = read_family(&path).unwrap();
    assert_eq!(fam.spec, point);
    assert_eq!(fam.cycle.dim(), 0);
    assert!(fam.class.is_none());

    let scen = parse_family(r#"{"scenario": "great_circles"}"#).unwrap().build().unwrap();
    assert_eq!(scen.class, Some(ClassId::C));
    assert_eq!(scen.cycle.dim(), 3);
}

#[test]
fn circle_frames_must_be_uniform() {
    let frames: Vec<CurveJson> = (0..4).map(|_| CurveJson::from_curve(&long_unknot())).collect();
    let ok = FamilyJson::Frames {
        domain: "circle".into(),
        grid: vec![0.0, 0.25, 0.5, 0.75],
        frames: frames.clone(),
    };
    assert_eq!(ok.build().unwrap().cycle.dim(), 1);
    let bad = FamilyJson::Frames {
        domain: "circle".into(),
        grid: vec![0.0, 0.2, 0.5, 0.75],
        frames: frames.clone(),
    };
    assert!(bad.build().is_err());
    let so3 = FamilyJson::Frames {
        domain: "so3".into(),
        grid: vec![],
        frames,
    };
    assert!(matches!(so3.build(), Err(Error::Unsupported(_))));
}

#[test]
fn scenario_parameters_are_checked() {
    assert!(parse_family(r#"{"scenario": "finger_loop", "params": {"radius": 5.0}}"#)
        .unwrap()
        .build()
        .is_err());
    assert!(parse_family(r#"{"scenario": "trefoil_bead_loop", "params": {"twist": 0.5}}"#)
        .unwrap()
        .build()
        .is_err());
    assert!(parse_family(r#"{"scenario": "trefoil_bead_loop", "params": {"spin": 1}}"#)
        .unwrap()
        .build()
        .is_err());
    assert!(parse_family(r#"{"scenario": "no_such_thing"}"#).unwrap().build().is_err());
}

#[test]
fn config_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"seed": 7, "eval": {"tol": {"newton_tol": 1e-11}}}"#).unwrap();
    let cfg = RunConfig::load(&path).unwrap();
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg.eval.tol.newton_tol, 1e-11);
    assert_eq!(cfg.eval.track, EvalOptions::default().track);
    std::fs::write(&path, r#"{"eval": {"tol": {"newton_tol": -1}}}"#).unwrap();
    assert!(RunConfig::load(&path).is_err());
    std::fs::write(&path, r#"{"colour": "blue"}"#).unwrap();
    assert!(RunConfig::load(&path).is_err());
}

#[test]
fn results_are_deterministic() {
    let spec = parse_family(r#"{"scenario": "knot", "params": {"knot": "figure_eight"}}"#).unwrap();
    let cfg = RunConfig::default();
    let run = |dir: &std::path::Path| {
        let fam = spec.build().unwrap();
        let ev = evaluate(ClassId::D, fam.cycle.as_ref(), &cfg.eval).unwrap();
        let rec = RunRecord::new(&spec, &cfg, ev).unwrap();
        let paths = write_results(&rec, dir).unwrap();
        (rec, std::fs::read(&paths.record).unwrap(), paths)
    };
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (rec, bytes_a, paths) = run(a.path());
    let (_, bytes_b, _) = run(b.path());
    assert_eq!(bytes_a, bytes_b);
    assert_eq!(read_record(&paths.record).unwrap(), rec);
    assert_eq!(rec.input_hash.len(), 64);

    let lines = std::fs::read_to_string(&paths.events).unwrap();
    let n_events: usize = rec.evaluation.strata.iter().map(|s| s.events.len()).sum();
    assert_eq!(lines.lines().count(), n_events);
    let csv = summary_csv(&rec.evaluation).unwrap();
    assert!(csv.starts_with("stratum,count_mod2,count_signed,n_events,multiplicity\n"));
    assert!(csv.lines().last().unwrap().starts_with(&format!("total,{},{}", rec.evaluation.total_mod2, rec.evaluation.total_signed)));
}

#[test]
fn hash_tracks_config() {
    let spec = parse_family(r#"{"scenario": "knot"}"#).unwrap();
    let ev = evaluate(ClassId::D, spec.build().unwrap().cycle.as_ref(), &EvalOptions::default()).unwrap();
    let a = RunRecord::new(&spec, &RunConfig::default(), ev.clone()).unwrap();
    let cfg = RunConfig {
        seed: 2,
        ..RunConfig::default()
    };
    let b = RunRecord::new(&spec, &cfg, ev).unwrap();
    assert_ne!(a.input_hash, b.input_hash);
}
