use num_rational::Rational64;
use proptest::prelude::*;

use knotstrata::curve::CurveKind;
use knotstrata::gauss::{evaluate_formula, formula_by_name, parse_formula, parse_gauss, project_to_diagram, GaussDiagram};
use knotstrata::scenarios::{figure_eight, kinked_unknot, mirror, round_unknot, torus_trefoil, trefoil};

/// v2 from crossing pairs: under(a) < over(b) < over(a) < under(b).
fn v2_pairs(g: &GaussDiagram) -> i64 {
    let pos = |c: usize, over: bool| {
        g.word
            .iter()
            .position(|v| v.crossing == c && v.over == over)
            .unwrap()
    };
    let k = g.crossings();
    let mut total = 0;
    for a in 0..k {
        for b in 0..k {
            if a != b && pos(a, false) < pos(b, true) && pos(b, true) < pos(a, true) && pos(a, true) < pos(b, false) {
                total += (g.signs[a] * g.signs[b]) as i64;
            }
        }
    }
    total
}

fn v(name: &str, g: &GaussDiagram) -> Rational64 {
    evaluate_formula(&formula_by_name(name).unwrap(), g).unwrap()
}

#[test]
fn trefoil_codes_agree() {
    let codes = [
        "compact: O1+ U2+ O3+ U1+ O2+ U3+",
        "compact: O1+ O4+ U4+ U2+ O3+ U1+ O2+ U3+",
        "compact: O1+ O5+ O6- U2+ O3+ U1+ U5+ U6- O2+ U3+",
    ];
    for c in codes {
        let g = parse_gauss(c).unwrap();
        assert_eq!(v("v2", &g), Rational64::from(1), "{c}");
        assert_eq!(v2_pairs(&g), 1, "{c}");
        assert_eq!(v("v3", &g), -v("v3", &g.mirror()), "{c}");
        assert_ne!(v("v3", &g), Rational64::from(0), "{c}");
    }
}

#[test]
fn basepoint_does_not_change_v2() {
    let word = ["O1+", "U2+", "O3+", "U1+", "O2+", "U3+"];
    for b in 0..word.len() {
        let mut toks: Vec<&str> = word.to_vec();
        toks.insert(b, "@");
        let g = parse_gauss(&format!("compact: {}", toks.join(" "))).unwrap();
        assert_eq!(v("v2", &g), Rational64::from(1));
    }
}

#[test]
fn empty_long_code_is_unknot() {
    let g = parse_gauss("long:").unwrap();
    assert_eq!(g.kind, CurveKind::Long);
    assert_eq!(v("v2", &g), Rational64::from(0));
    assert_eq!(v("v3", &g), Rational64::from(0));
}

#[test]
fn projected_fixtures() {
    let cases = [
        (round_unknot(), 0, 0),
        (kinked_unknot(), 0, 0),
        (trefoil(), 3, 1),
        (mirror(&trefoil()), 3, 1),
        (torus_trefoil(), 3, 1),
        (figure_eight(), 4, -1),
    ];
    for (k, crossings, v2) in cases {
        let g = project_to_diagram(&k).unwrap();
        if crossings > 0 {
            assert_eq!(g.crossings(), crossings);
        }
        assert_eq!(v("v2", &g), Rational64::from(v2));
        assert_eq!(v2_pairs(&g), v2);
    }
    let t = v("v3", &project_to_diagram(&trefoil()).unwrap());
    let m = v("v3", &project_to_diagram(&mirror(&trefoil())).unwrap());
    assert_eq!(t, -m);
    assert_ne!(t, Rational64::from(0));
    assert_eq!(v("v3", &project_to_diagram(&figure_eight()).unwrap()), Rational64::from(0));
}

#[test]
fn malformed_codes_are_rejected() {
    for bad in [
        "O1+ U1+",
        "loop: O1+ U1+",
        "long: O1+ U1-",
        "long: O1+ O1+",
        "long: O1+",
        "long: X1+",
        "long: O+ U+",
        "long: O1 U1",
        "long: @ O1+ U1+",
        "compact: @ O1+ @ U1+",
    ] {
        assert!(parse_gauss(bad).is_err(), "{bad}");
    }
}

#[test]
fn malformed_formulas_are_rejected() {
    for bad in ["1 * D[1>1]", "1 * D[1>3]", "1/0 * D[1>2]", "D[1>2", "2 * Q[1>2]"] {
        assert!(parse_formula(bad).is_err(), "{bad}");
    }
}

fn arb_gauss() -> impl Strategy<Value = (bool, Vec<(usize, bool)>, Vec<bool>)> {
    (1usize..6).prop_flat_map(|k| {
        let visits: Vec<(usize, bool)> = (0..k).flat_map(|c| [(c, true), (c, false)]).collect();
        (
            any::<bool>(),
            Just(visits).prop_shuffle(),
            proptest::collection::vec(any::<bool>(), k),
        )
    })
}

fn code(long: bool, word: &[(usize, bool)], pos: &[bool]) -> String {
    let toks: Vec<String> = word
        .iter()
        .map(|&(c, o)| format!("{}{}{}", if o { 'O' } else { 'U' }, c + 1, if pos[c] { '+' } else { '-' }))
        .collect();
    format!("{}: {}", if long { "long" } else { "compact" }, toks.join(" "))
}

proptest! {
    #[test]
    fn display_round_trips((long, word, pos) in arb_gauss()) {
        let g = parse_gauss(&code(long, &word, &pos)).unwrap();
        prop_assert_eq!(parse_gauss(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn v2_matches_pair_oracle((long, word, pos) in arb_gauss()) {
        let g = parse_gauss(&code(long, &word, &pos)).unwrap();
        prop_assert_eq!(v("v2", &g), Rational64::from(v2_pairs(&g)));
    }

    #[test]
    fn mirror_is_an_involution((long, word, pos) in arb_gauss()) {
        let g = parse_gauss(&code(long, &word, &pos)).unwrap();
        prop_assert_eq!(g.mirror().mirror(), g);
    }

    #[test]
    fn formulas_are_linear((long, word, pos) in arb_gauss(), a in -5i64..5, b in 1i64..5) {
        let g = parse_gauss(&code(long, &word, &pos)).unwrap();
        let d = "D[1>3, 4>2]";
        let o = "O[1>3, 2>5, 4>6]";
        let lhs = evaluate_formula(&parse_formula(&format!("{a}/{b} * {d} + 2 * {o}")).unwrap(), &g).unwrap();
        let x = evaluate_formula(&parse_formula(d).unwrap(), &g).unwrap();
        let y = evaluate_formula(&parse_formula(o).unwrap(), &g).unwrap();
        prop_assert_eq!(lhs, Rational64::new(a, b) * x + Rational64::from(2) * y);
    }
}
