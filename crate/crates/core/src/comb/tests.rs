use super::*;

fn ds(d: usize, classes: &[&[Label]], h: &[Label]) -> CombinatorialDataSet {
    CombinatorialDataSet::new(
        d,
        classes.iter().map(|c| c.to_vec()).collect(),
        h.to_vec(),
    )
    .unwrap()
}

/// The degree-9 reference configuration with all five cell types:
/// H = {{3,4},{5,6},{9,10},{12,15},{13,14}}, [0]={0,2}, [1]={1},
/// [7]={7,8,11}.
fn five_cell_types() -> CombinatorialDataSet {
    ds(
        9,
        &[
            &[0, 2],
            &[1],
            &[3, 4],
            &[5, 6],
            &[7, 8, 11],
            &[9, 10],
            &[12, 15],
            &[13, 14],
        ],
        &[3, 4, 5, 6, 9, 10, 12, 15, 13, 14],
    )
}

#[test]
fn shift_map_examples() {
    let s = ds(4, &[&[5], &[0, 1, 2, 3, 4]], &[]);
    assert_eq!(s.sigma(5), 5); // singleton is a fixed point

    let big = five_cell_types();
    assert_eq!(big.sigma(7), 8);
    assert_eq!(big.sigma(8), 11);
    assert_eq!(big.sigma(11), 7);

    // σ is an involution on H
    assert_eq!(big.sigma(3), 4);
    assert_eq!(big.sigma(4), 3);
    for &l in big.h_labels() {
        assert_eq!(big.sigma(big.sigma(l)), l);
    }
}

#[test]
fn parity_change_examples() {
    let s = ds(3, &[&[0, 2], &[1], &[3]], &[]);
    assert_eq!(s.parity_changes(0).unwrap(), 0);

    let big = five_cell_types();
    let mixed = big.class_of(7);
    assert_eq!(big.parity_changes(mixed).unwrap(), 2);

    // the z^d pattern: a single class, every gap is 1
    let zd = ds(4, &[&[0, 1, 2, 3, 4, 5]], &[]);
    assert_eq!(zd.parity_changes(0).unwrap(), 6);
}

#[test]
fn parity_changes_rejects_homoclinic_classes() {
    let s = ds(2, &[&[0, 1]], &[0, 1]);
    assert!(matches!(
        s.parity_changes(0),
        Err(CombError::HomoclinicClass(_))
    ));
}

#[test]
fn non_crossing_examples() {
    let nested = ds(3, &[&[0, 2], &[1], &[3]], &[]);
    assert!(nested.is_non_crossing());

    let crossing = ds(3, &[&[0, 2], &[1, 3]], &[]);
    assert!(!crossing.is_non_crossing());

    assert!(five_cell_types().is_non_crossing());
}

#[test]
fn cells_of_the_five_type_example() {
    let big = five_cell_types();
    let cells = big.decompose_cells().unwrap();
    assert_eq!(cells.len(), 9);
    let total_ends: usize = cells.iter().map(|c| c.ends.len()).sum();
    assert_eq!(total_ends, big.label_count());

    let kinds: Vec<&CellKind> = cells.iter().map(|c| &c.kind).collect();
    let count = |f: &dyn Fn(&CellKind) -> bool| kinds.iter().filter(|k| f(k)).count();
    assert_eq!(count(&|k| matches!(k, CellKind::AlphaOmega { .. })), 2);
    assert_eq!(count(&|k| matches!(k, CellKind::OddSepal { .. })), 1);
    assert_eq!(count(&|k| matches!(k, CellKind::EvenSepal { .. })), 1);
    assert_eq!(count(&|k| matches!(k, CellKind::OddCenter)), 1);
    assert_eq!(count(&|k| matches!(k, CellKind::EvenCenter)), 4);

    // the two αω-cells carry the landing ends (1,2) and (7,0)
    let mut aw: Vec<(Label, Label)> = cells
        .iter()
        .filter_map(|c| match c.kind {
            CellKind::AlphaOmega { k, j } => Some((k, j)),
            _ => None,
        })
        .collect();
    aw.sort_unstable();
    assert_eq!(aw, vec![(1, 2), (7, 0)]);

    // the big αω-cell has the two-class ccw chain and one-class cw chain
    let big_cell = cells
        .iter()
        .find(|c| matches!(c.kind, CellKind::AlphaOmega { k: 7, j: 0 }))
        .unwrap();
    let ccw_odd: Vec<Label> = big_cell
        .ccw_chain
        .iter()
        .map(|&i| big.classes()[i][0])
        .collect();
    assert_eq!(ccw_odd, vec![3, 5]);
    assert_eq!(big_cell.cw_chain.len(), 1);
    assert_eq!(big.classes()[big_cell.cw_chain[0]], vec![12, 15]);
}

#[test]
fn cells_for_d2() {
    // {{0},{1}}: one αω-cell labeled (1,0)
    let stable = ds(2, &[&[0], &[1]], &[]);
    let cells = stable.decompose_cells().unwrap();
    assert_eq!(cells.len(), 1);
    assert!(matches!(cells[0].kind, CellKind::AlphaOmega { k: 1, j: 0 }));

    // {{0,1}}, H = ∅: the z² pattern, one odd and one even sepal
    let zd = ds(2, &[&[0, 1]], &[]);
    let cells = zd.decompose_cells().unwrap();
    assert_eq!(cells.len(), 2);
    assert!(cells
        .iter()
        .any(|c| matches!(c.kind, CellKind::OddSepal { k: 1 })));
    assert!(cells
        .iter()
        .any(|c| matches!(c.kind, CellKind::EvenSepal { j: 0 })));

    // {{0,1}}, H = {0,1}: two center cells
    let hom = ds(2, &[&[0, 1]], &[0, 1]);
    let cells = hom.decompose_cells().unwrap();
    assert_eq!(cells.len(), 2);
    assert!(cells.iter().any(|c| c.kind == CellKind::OddCenter));
    assert!(cells.iter().any(|c| c.kind == CellKind::EvenCenter));
}

#[test]
fn z3_pattern_has_four_sepals() {
    let zd = ds(3, &[&[0, 1, 2, 3]], &[]);
    assert!(zd.validate().valid());
    let cells = zd.decompose_cells().unwrap();
    assert_eq!(cells.len(), 4);
    assert_eq!(cells.iter().filter(|c| c.is_sepal()).count(), 4);
    assert_eq!(
        cells
            .iter()
            .filter(|c| matches!(c.kind, CellKind::OddSepal { .. }))
            .count(),
        2
    );
}

#[test]
fn h_chains_of_the_reference_example() {
    let big = five_cell_types();
    let chains = big.extract_h_chains();
    let name = |c: &HChain| -> Vec<Vec<Label>> {
        c.classes.iter().map(|&i| big.classes()[i].clone()).collect()
    };
    let ccw_open: Vec<_> = chains.iter().filter(|c| c.ccw && !c.closed).collect();
    let ccw_closed: Vec<_> = chains.iter().filter(|c| c.ccw && c.closed).collect();
    let cw_open: Vec<_> = chains.iter().filter(|c| !c.ccw && !c.closed).collect();
    let cw_closed: Vec<_> = chains.iter().filter(|c| !c.ccw && c.closed).collect();

    // ccw: open ⟨{3,4},{5,6}⟩ and ⟨{9,10}⟩, closed ⟨{12,15},{13,14}⟩
    // (a cycle; canonical rotation starts at the smallest class)
    assert_eq!(ccw_open.len(), 2);
    assert!(ccw_open
        .iter()
        .any(|c| name(c) == vec![vec![3, 4], vec![5, 6]]));
    assert!(ccw_open.iter().any(|c| name(c) == vec![vec![9, 10]]));
    assert_eq!(ccw_closed.len(), 1);
    assert_eq!(name(ccw_closed[0]), vec![vec![12, 15], vec![13, 14]]);

    // cw: four closed length-1 chains, one open ⟨{12,15}⟩
    assert_eq!(cw_closed.len(), 4);
    assert_eq!(cw_open.len(), 1);
    assert_eq!(name(cw_open[0]), vec![vec![12, 15]]);
}

#[test]
fn h_chain_d2_pair() {
    // d=2, H={0,1}: one ccw and one cw closed chain of length 1
    let hom = ds(2, &[&[0, 1]], &[0, 1]);
    let chains = hom.extract_h_chains();
    assert_eq!(chains.len(), 2);
    assert!(chains.iter().all(|c| c.closed && c.classes.len() == 1));
    assert!(chains.iter().any(|c| c.ccw));
    assert!(chains.iter().any(|c| !c.ccw));

    let none = ds(2, &[&[0], &[1]], &[]);
    assert!(none.extract_h_chains().is_empty());
}

#[test]
fn essential_transversals_examples() {
    let stable = ds(2, &[&[0], &[1]], &[]);
    assert_eq!(stable.essential_transversals(), vec![(1, 0)]);

    // the z^d class: every gap is odd, no essential transversals
    let zd = ds(4, &[&[0, 1, 2, 3, 4, 5]], &[]);
    assert!(zd.essential_transversals().is_empty());

    let big = five_cell_types();
    assert_eq!(
        big.essential_transversals(),
        vec![(1, 2), (3, 0), (7, 12)]
    );
}

#[test]
fn t_chains_d2_and_reference() {
    let stable = ds(2, &[&[0], &[1]], &[]);
    let chains = stable.extract_t_chains();
    assert_eq!(chains.len(), 2);
    for c in &chains {
        assert!(c.closed);
        assert_eq!(c.pairs, vec![(1, 0)]);
        let enclosed = c.enclosed_class.unwrap();
        if c.ccw {
            assert_eq!(stable.classes()[enclosed], vec![0]); // source
        } else {
            assert_eq!(stable.classes()[enclosed], vec![1]); // sink
        }
    }

    let big = five_cell_types();
    let chains = big.extract_t_chains();
    // closed: ccw ⟨(1,2),(3,0)⟩ around the source {0,2}, cw ⟨(1,2)⟩ around
    // the sink {1}; open: one clockwise interpetal chain ⟨(7,12)⟩ at the
    // attracting side of the multiple point {7,8,11}
    let ccw_closed: Vec<_> = chains.iter().filter(|c| c.ccw && c.closed).collect();
    assert_eq!(ccw_closed.len(), 1);
    assert_eq!(ccw_closed[0].pairs, vec![(1, 2), (3, 0)]);
    assert_eq!(big.classes()[ccw_closed[0].enclosed_class.unwrap()], vec![0, 2]);
    let cw_closed: Vec<_> = chains.iter().filter(|c| !c.ccw && c.closed).collect();
    assert_eq!(cw_closed.len(), 1);
    assert_eq!(cw_closed[0].pairs, vec![(1, 2)]);
    assert_eq!(big.classes()[cw_closed[0].enclosed_class.unwrap()], vec![1]);
    let open: Vec<_> = chains.iter().filter(|c| !c.closed).collect();
    assert_eq!(open.len(), 1);
    assert!(!open[0].ccw);
    assert_eq!(open[0].pairs, vec![(7, 12)]);
}

#[test]
fn sources_and_sinks_vs_closed_t_chains() {
    // every enumerated valid set: ccw closed T-chains ↔ pure even classes,
    // cw closed ↔ pure odd classes
    for d in 2..=4 {
        for s in enumerate_data_sets(d).unwrap() {
            let chains = s.extract_t_chains();
            let sources = s
                .landing_class_ids()
                .into_iter()
                .filter(|&i| s.classes()[i].iter().all(|l| l % 2 == 0))
                .count();
            let sinks = s
                .landing_class_ids()
                .into_iter()
                .filter(|&i| s.classes()[i].iter().all(|l| l % 2 == 1))
                .count();
            let ccw_closed = chains.iter().filter(|c| c.ccw && c.closed).count();
            let cw_closed = chains.iter().filter(|c| !c.ccw && c.closed).count();
            assert_eq!(ccw_closed, sources, "{}", s.to_canonical_json());
            assert_eq!(cw_closed, sinks, "{}", s.to_canonical_json());
        }
    }
}

#[test]
fn validation_examples() {
    // z³ pattern: valid, with 2 odd + 2 even sepal cells (checked above)
    assert!(ds(3, &[&[0, 1, 2, 3]], &[]).validate().valid());

    // H must consist of 2-element mixed-parity classes
    let bad = ds(2, &[&[0], &[1]], &[0, 1]);
    let report = bad.validate();
    assert!(!report.condition2);
    assert!(!report.valid());

    assert!(five_cell_types().validate().valid());
}

#[test]
fn decomposition_property_examples() {
    // all-singleton d=3: property i fails (expected q = 3, found 4)
    let singles = ds(3, &[&[0], &[1], &[2], &[3]], &[]);
    assert!(!singles.decomposition_properties());
    assert!(!singles.validate().valid());

    // z² pattern: single class, p = 2, q = 2 − 1 = 1
    assert!(ds(2, &[&[0, 1]], &[]).decomposition_properties());

    assert!(five_cell_types().decomposition_properties());
}

#[test]
fn euler_characteristic_d2_cases() {
    // {{0},{1}}: V=3, E=2, F=1
    assert_eq!(ds(2, &[&[0], &[1]], &[]).euler_characteristic().unwrap(), 2);
    // {{0,1}}, H={0,1}: V=1, E=1, F=2
    assert_eq!(
        ds(2, &[&[0, 1]], &[0, 1]).euler_characteristic().unwrap(),
        2
    );
    // {{0,1}}, H=∅: V=2, E=2, F=2
    assert_eq!(ds(2, &[&[0, 1]], &[]).euler_characteristic().unwrap(), 2);
}

#[test]
fn counting_identities_on_reference() {
    let big = five_cell_types();
    let report = big.counting_identities().unwrap();
    assert!(report.all_hold());

    // d=2 αω: s + h = 1 + 0 = d − 1 − 0
    let stable = ds(2, &[&[0], &[1]], &[]);
    assert!(stable.counting_identities().unwrap().all_hold());
}

#[test]
fn enumerate_d2_gives_exactly_three() {
    let all = enumerate_data_sets(2).unwrap();
    assert_eq!(all.len(), 3);
    let canon: Vec<String> = all.iter().map(|s| s.to_canonical_json()).collect();
    assert!(canon.contains(&"{\"d\":2,\"classes\":[[0],[1]],\"H\":[]}".to_string()));
    assert!(canon.contains(&"{\"d\":2,\"classes\":[[0,1]],\"H\":[]}".to_string()));
    assert!(canon.contains(&"{\"d\":2,\"classes\":[[0,1]],\"H\":[0,1]}".to_string()));
}

/// Independent oracle: count the non-crossing pairings of the d−1 odd ends
/// with the d−1 even ends by brute force over all bijections.
fn stable_pairing_count_oracle(d: usize) -> usize {
    let n = 2 * d - 2;
    let odds: Vec<usize> = (0..n).filter(|l| l % 2 == 1).collect();
    let evens: Vec<usize> = (0..n).filter(|l| l % 2 == 0).collect();
    let mut perm: Vec<usize> = (0..evens.len()).collect();
    let mut count = 0;
    permute(&mut perm, 0, &mut |p| {
        // chords (odd end k, even end p(k)) as arcs on the end circle;
        // crossing iff the endpoints interleave
        let chords: Vec<(usize, usize)> = odds
            .iter()
            .zip(p.iter().map(|&i| evens[i]))
            .map(|(&a, b)| (a, b))
            .collect();
        let crossing = |x: (usize, usize), y: (usize, usize)| -> bool {
            let inside = |a: usize, lo: usize, hi: usize| -> bool {
                // strictly between lo and hi counter-clockwise
                let span = (hi + n - lo) % n;
                let off = (a + n - lo) % n;
                off > 0 && off < span
            };
            inside(y.0, x.0, x.1) != inside(y.1, x.0, x.1)
        };
        let mut ok = true;
        for i in 0..chords.len() {
            for j in i + 1..chords.len() {
                if crossing(chords[i], chords[j]) {
                    ok = false;
                }
            }
        }
        if ok {
            count += 1;
        }
    });
    count
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

#[test]
fn structurally_stable_counts_match_pairing_oracle() {
    let expected = [1usize, 2, 5];
    for (i, d) in (2..=4).enumerate() {
        let by_oracle = stable_pairing_count_oracle(d);
        let by_enum = enumerate_structurally_stable(d).unwrap().len();
        assert_eq!(by_oracle, expected[i], "oracle disagrees at d={d}");
        assert_eq!(by_enum, expected[i], "enumeration disagrees at d={d}");
    }
}

#[test]
fn selsim_equivalence_small_degrees() {
    // cell typing ⇔ decomposition properties over all candidates (the
    // acceptance suite runs this through d = 5)
    for d in 2..=4 {
        for cand in enumerate_candidates(d).unwrap() {
            let by_cells = cand.decompose_cells().is_ok();
            let by_props = cand.decomposition_properties();
            assert_eq!(
                by_cells,
                by_props,
                "mismatch at {}",
                cand.to_canonical_json()
            );
        }
    }
}

#[test]
fn adjacent_pair_property_on_stable_sets() {
    // every H=∅ set with >1 class satisfying the decomposition properties,
    // d > 2, contains some ℓ with ℓ ∼ ℓ+2
    for d in 3..=5usize {
        for s in enumerate_data_sets(d).unwrap() {
            if !s.h_labels().is_empty() || s.classes().len() < 2 {
                continue;
            }
            let n = s.label_count();
            let found = (0..n).any(|l| s.class_of(l) == s.class_of((l + 2) % n));
            assert!(found, "{}", s.to_canonical_json());
        }
    }
}

#[test]
fn enumerated_sets_have_consistent_structure() {
    for d in 2..=5usize {
        for s in enumerate_data_sets(d).unwrap() {
            // Euler characteristic 2 and counting identities
            assert_eq!(s.euler_characteristic().unwrap(), 2);
            assert!(s.counting_identities().unwrap().all_hold());

            // σ is a bijection per class and an involution on H
            for &l in s.h_labels() {
                assert_eq!(s.sigma(s.sigma(l)), l);
            }
            // every H-class in exactly one ccw and one cw chain
            let chains = s.extract_h_chains();
            for &hid in &s.h_class_ids() {
                let ccw = chains
                    .iter()
                    .filter(|c| c.ccw && c.classes.contains(&hid))
                    .count();
                let cw = chains
                    .iter()
                    .filter(|c| !c.ccw && c.classes.contains(&hid))
                    .count();
                assert_eq!((ccw, cw), (1, 1));
            }
            // center cells ↔ closed chains
            let cells = s.decompose_cells().unwrap();
            let centers = cells.iter().filter(|c| c.is_center()).count();
            let closed = chains.iter().filter(|c| c.closed).count();
            assert_eq!(centers, closed);

            // parity changes are even
            for id in s.landing_class_ids() {
                assert_eq!(s.parity_changes(id).unwrap() % 2, 0);
            }

            // serialization round-trips
            let text = s.to_canonical_json();
            let back = CombinatorialDataSet::parse_json(&text).unwrap();
            assert_eq!(&back, &s);
        }
    }
}

#[test]
fn interval_definition_of_non_crossing_agrees_with_hull_test() {
    // the literal interval-containment definition, quantified over all
    // member pairs, must agree with the pairwise hull-gap test
    let literal = |s: &CombinatorialDataSet| -> bool {
        let n = s.label_count();
        // b ⊆ labels strictly ccw-between lp and lpp
        let strictly_between = |b: &[Label], lp: Label, lpp: Label| -> bool {
            let span = (lpp + n - lp) % n;
            b.iter().all(|&x| {
                let off = (x + n - lp) % n;
                off > 0 && off < span
            })
        };
        for a in s.classes() {
            for &l1 in a {
                for &l2 in a {
                    if l1 == l2 {
                        continue;
                    }
                    for b in s.classes() {
                        if std::ptr::eq(a, b) {
                            continue;
                        }
                        if !(strictly_between(b, l1, l2) || strictly_between(b, l2, l1)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    };
    for d in 2..=4usize {
        for cand in enumerate_candidates(d).unwrap() {
            assert!(literal(&cand), "{}", cand.to_canonical_json());
        }
    }
    // crossing examples must fail both tests
    for d in 3..=4usize {
        let mut classes: Vec<Vec<Label>> = vec![vec![0, 2], vec![1, 3]];
        for l in 4..2 * d - 2 {
            classes.push(vec![l]);
        }
        let crossing = CombinatorialDataSet::new(d, classes, vec![]).unwrap();
        assert!(!literal(&crossing));
        assert!(!crossing.is_non_crossing());
    }
}
