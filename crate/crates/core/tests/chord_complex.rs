use knotstrata::chord::*;

#[test]
fn p1_has_chord_and_star() {
    let cells = enumerate_cells(1, None).unwrap();
    assert_eq!(cells.len(), 2);
    let (chord, rhs) = example1_equation();
    assert_eq!(chord.degree(), 2);
    assert_eq!(boundary(&chord), rhs);
    assert!(!verify_cycle(&[chord].into_iter().collect()));
}

#[test]
fn p2_cell_counts() {
    assert_eq!(enumerate_cells(2, None).unwrap().len(), 13);
    assert_eq!(enumerate_cells(2, Some(5)).unwrap().len(), 4);
    assert_eq!(enumerate_cells(2, Some(4)).unwrap().len(), 6);
    assert_eq!(enumerate_cells(2, Some(3)).unwrap().len(), 3);
}

#[test]
fn p2_golden_equations() {
    let eqs = example2_equations();
    assert_eq!(eqs.len(), 13);
    let all = enumerate_cells(2, None).unwrap();
    for (c, rhs) in &eqs {
        assert!(all.contains(c), "{c}");
        assert_eq!(&boundary(c), rhs, "boundary of {c}");
    }
}

#[test]
fn boundary_squares_to_zero() {
    for p in 1..=3 {
        for c in enumerate_cells(p, None).unwrap() {
            let b = boundary(&c);
            assert!(boundary_chain(&b).is_zero(), "∂∂ {c}");
            assert!(b.iter().all(|f| f.complexity() == p && f.degree() + 1 == c.degree()));
        }
    }
}

#[test]
fn homology_ranks() {
    for row in homology_table(1).unwrap() {
        assert_eq!(row.rank, 0);
    }
    let r2: Vec<_> = homology_table(2).unwrap().into_iter().filter(|r| r.rank > 0).collect();
    assert_eq!(r2.len(), 1);
    assert_eq!((r2[0].degree, r2[0].rank), (5, 1));
    let g = order2_generator();
    assert!(verify_cycle(&g));
    assert!(bounding_chain(&g).is_none());
    let r3: Vec<_> = homology_table(3).unwrap().into_iter().filter(|r| r.rank > 0).collect();
    assert_eq!(r3.len(), 2, "{r3:?}");
    assert!(r3.iter().all(|r| r.rank == 1));
}

#[test]
fn principal_parts_are_homologous_cycles() {
    let a = principal_part_two_cells();
    let b = principal_part_five_cells();
    assert!(verify_cycle(&a));
    assert!(verify_cycle(&b));
    assert!(bounding_chain(&a).is_none());
    let mut sum = a.clone();
    sum.add_chain(&b);
    assert!(bounding_chain(&sum).is_some());
}

#[test]
fn text_round_trip() {
    for c in enumerate_cells(3, None).unwrap() {
        let back: GCDCell = c.to_string().parse().unwrap();
        assert_eq!(back, c);
    }
    assert!("[m=2 | chords: (1,1) | stars: ]".parse::<GCDCell>().is_err());
}

#[test]
fn enumeration_is_canonical() {
    let a = enumerate_cells(3, None).unwrap();
    let mut b = a.clone();
    b.reverse();
    b.sort();
    assert_eq!(a, b);
}
