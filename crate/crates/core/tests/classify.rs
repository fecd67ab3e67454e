mod common;

use common::*;
use lattice_walks::chain::Beta;
use lattice_walks::classify::{
    classify_explosion, classify_recurrence, classify_report, ChainKind, ExplosionClass, Recurrence,
};
use lattice_walks::{Error, Graph, GraphFamily, Params, Variant};

fn named_small() -> Vec<Graph> {
    use GraphFamily::*;
    let mut v = Vec::new();
    for n in 1..=6 {
        v.push(graph(Complete(n)));
        v.push(graph(Path(n)));
        v.push(graph(Edgeless(n)));
        if n >= 3 {
            v.push(graph(Cycle(n)));
        }
        if n >= 2 {
            v.push(graph(Star(n - 1)));
        }
    }
    v
}

const GRID: [f64; 6] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0];

#[test]
fn transience_is_monotone_in_both_parameters() {
    for g in named_small() {
        let class = |a: f64, b: f64| {
            classify_recurrence(&Params::standard(a, b).unwrap(), &g)
                .unwrap()
                .class
        };
        for &a0 in &GRID {
            for &b0 in &GRID {
                if class(a0, b0) != Recurrence::Transient {
                    continue;
                }
                for &a in GRID.iter().filter(|&&a| a >= a0) {
                    for &b in GRID.iter().filter(|&&b| b >= b0) {
                        assert_eq!(
                            class(a, b),
                            Recurrence::Transient,
                            "{} ({a0},{b0}) -> ({a},{b})",
                            g.label()
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn recurrent_chains_do_not_explode() {
    for g in named_small() {
        let mut betas: Vec<Beta> = GRID.iter().map(|&b| Beta::Finite(b)).collect();
        betas.push(Beta::HardCore);
        for &a in &GRID {
            for &b in &betas {
                let p = Params::new(a, b, Variant::Standard).unwrap();
                let r = classify_recurrence(&p, &g).unwrap();
                let e = classify_explosion(&p, &g).unwrap();
                if r.class.is_recurrent() {
                    assert_eq!(
                        e.class,
                        ExplosionClass::NonExplosive,
                        "{} {a} {b:?}",
                        g.label()
                    );
                }
                if g.is_regular() {
                    assert_ne!(
                        e.class,
                        ExplosionClass::OpenConjecturedExplosive,
                        "{} {a} {b:?}",
                        g.label()
                    );
                }
            }
        }
    }
}

#[test]
fn open_region_on_irregular_graph() {
    // star:2: lambda1 = sqrt 2, min degree 1.
    let g = graph(GraphFamily::Star(2));
    let e = classify_explosion(&Params::standard(-1.0, 0.9).unwrap(), &g).unwrap();
    assert_eq!(
        (e.class, e.rule_fired),
        (ExplosionClass::OpenConjecturedExplosive, "Rexpl.open")
    );
    let e = classify_explosion(&Params::standard(-1.0, 1.5).unwrap(), &g).unwrap();
    assert_eq!(
        (e.class, e.rule_fired),
        (ExplosionClass::ExplosiveAS, "Texpl.ii.c")
    );
    // alpha + beta * min degree = 0 exactly stays open.
    let e = classify_explosion(&Params::standard(-1.0, 1.0).unwrap(), &g).unwrap();
    assert_eq!(e.class, ExplosionClass::OpenConjecturedExplosive);
}

#[test]
fn quarter_grid_matches_table_for_larger_cycles_and_stars() {
    use GraphFamily::*;
    // Extra fixtures beyond the acceptance set, all with integer or
    // square-root lambda1.
    let extra = [
        PhaseFixture {
            family: Cycle(9),
            n: 9,
            edges: 9,
            kappa: 4,
            min_degree: 2,
            lambda1: Surd::int(2),
        },
        PhaseFixture {
            family: Cycle(12),
            n: 12,
            edges: 12,
            kappa: 6,
            min_degree: 2,
            lambda1: Surd::int(2),
        },
        PhaseFixture {
            family: Star(5),
            n: 6,
            edges: 5,
            kappa: 5,
            min_degree: 1,
            lambda1: Surd {
                p: 0,
                q: 1,
                d: 5,
                r: 1,
            },
        },
        PhaseFixture {
            family: Star(8),
            n: 9,
            edges: 8,
            kappa: 8,
            min_degree: 1,
            lambda1: Surd {
                p: 0,
                q: 2,
                d: 2,
                r: 1,
            },
        },
        PhaseFixture {
            family: Complete(5),
            n: 5,
            edges: 10,
            kappa: 1,
            min_degree: 4,
            lambda1: Surd::int(4),
        },
        PhaseFixture {
            family: Edgeless(5),
            n: 5,
            edges: 0,
            kappa: 5,
            min_degree: 0,
            lambda1: Surd::int(0),
        },
    ];
    let mut cells = 0;
    for fx in extra {
        let g = graph(fx.family);
        assert!((g.spectral_info().lambda1 - fx.lambda1.value()).abs() < 1e-10);
        for a in quarter_grid() {
            for b in quarter_grid() {
                for modified in [false, true] {
                    let p = if modified {
                        Params::modified(a as f64 / 4.0, b as f64 / 4.0)
                    } else {
                        Params::standard(a as f64 / 4.0, b as f64 / 4.0)
                    }
                    .unwrap();
                    let r = classify_recurrence(&p, &g).unwrap();
                    assert_eq!(
                        (r.class.as_str(), r.rule_fired),
                        expected_recurrence(&fx, a, Some(b), modified)
                    );
                    if !modified {
                        let e = classify_explosion(&p, &g).unwrap();
                        assert_eq!(
                            (e.class.as_str(), e.rule_fired),
                            expected_explosion(&fx, a, Some(b))
                        );
                    }
                    cells += 1;
                }
            }
        }
    }
    assert_eq!(cells, 6 * 13 * 13 * 2);
}

#[test]
fn boundary_note_presence() {
    let k2 = graph(GraphFamily::Complete(2));
    let on = classify_recurrence(&Params::standard(-1.0, 1.0).unwrap(), &k2).unwrap();
    assert!(on.boundary_note.is_some());
    assert_eq!(on.class, Recurrence::Transient);
    let off = classify_recurrence(&Params::standard(-1.0, 0.5).unwrap(), &k2).unwrap();
    assert!(off.boundary_note.is_none());
    let hc = classify_recurrence(&Params::hard_core(-1.0).unwrap(), &k2).unwrap();
    assert!(hc.boundary_note.is_none());
    // A perturbation far below the tolerance is still the boundary.
    let near = classify_recurrence(&Params::standard(-1.0, 1.0 + 1e-13).unwrap(), &k2).unwrap();
    assert!(near.boundary_note.is_some());
}

#[test]
fn modified_boundary_exception() {
    let k2 = graph(GraphFamily::Complete(2));
    let r = classify_recurrence(&Params::modified(-1.0, 1.0).unwrap(), &k2).unwrap();
    assert_eq!((r.class, r.rule_fired), (Recurrence::NullRecurrent, "Ttxi"));
    // e(G) = 2: no exception.
    let p3 = graph(GraphFamily::Path(3));
    let b = 1.0 / 2f64.sqrt();
    let r = classify_recurrence(&Params::modified(-1.0, b).unwrap(), &p3).unwrap();
    assert_eq!(r.class, Recurrence::Transient);
    assert!(matches!(
        classify_explosion(&Params::modified(-1.0, 1.0).unwrap(), &k2),
        Err(Error::Capability(_))
    ));
}

#[test]
fn reports() {
    let k2 = graph(GraphFamily::Complete(2));
    let rep = classify_report(&Params::standard(-1.0, 0.5).unwrap(), &k2, ChainKind::Ctmc).unwrap();
    assert_eq!(rep.rule_fired, "Tmain.i");
    assert_eq!(rep.explosion.as_ref().unwrap().rule_fired, "Texpl.i.a");
    assert_eq!(rep.inputs_echo.kappa, Some(1));
    assert!(rep.components.is_empty());

    let dt = classify_report(&Params::standard(-1.0, 0.5).unwrap(), &k2, ChainKind::Dtmc).unwrap();
    assert!(dt.explosion.is_none());
    assert_eq!(dt.recurrence.class, rep.recurrence.class);

    let md = classify_report(&Params::modified(-1.0, 0.5).unwrap(), &k2, ChainKind::Ctmc).unwrap();
    assert!(md.explosion.is_none());
    assert!(md.notes.iter().any(|n| n.contains("modified")));

    let json = serde_json::to_value(&rep).unwrap();
    assert_eq!(json["rule_fired"], "Tmain.i");
    assert_eq!(json["recurrence"]["class"], "PositiveRecurrent");
}

#[test]
fn disconnected_graphs() {
    // Three isolated vertices at alpha = beta = 0: transient as a whole,
    // null recurrent componentwise.
    let e3 = graph(GraphFamily::Edgeless(3));
    let rep = classify_report(&Params::standard(0.0, 0.0).unwrap(), &e3, ChainKind::Ctmc).unwrap();
    assert_eq!(rep.recurrence.class, Recurrence::Transient);
    assert_eq!(rep.components.len(), 3);
    assert!(rep
        .components
        .iter()
        .all(|c| c.recurrence == Recurrence::NullRecurrent));
    assert!(rep
        .notes
        .iter()
        .any(|n| n.starts_with("derived combination")));

    // K2 + K1, modified, on the boundary of the K2 component.
    let g = Graph::new(3, &[(1, 2)]).unwrap();
    let rep = classify_report(&Params::modified(-1.0, 1.0).unwrap(), &g, ChainKind::Ctmc).unwrap();
    assert_eq!(rep.recurrence.class, Recurrence::NullRecurrent);

    // K3 + star:2 with alpha + 2 beta > 0 but alpha + beta * 1 < 0 on the
    // star: the triangle explodes, so the union does too.
    let g = Graph::new(6, &[(1, 2), (2, 3), (1, 3), (4, 5), (4, 6)]).unwrap();
    let p = Params::standard(-1.0, 0.8).unwrap();
    let whole = classify_explosion(&p, &g).unwrap();
    assert_eq!(whole.class, ExplosionClass::OpenConjecturedExplosive);
    let rep = classify_report(&p, &g, ChainKind::Ctmc).unwrap();
    assert_eq!(rep.explosion.unwrap().class, ExplosionClass::ExplosiveAS);
    assert_eq!(
        rep.components[0].explosion,
        Some(ExplosionClass::ExplosiveAS)
    );
}

#[test]
fn hard_core_conventions() {
    use GraphFamily::*;
    let p = Params::hard_core(-0.5).unwrap();
    assert_eq!(
        classify_recurrence(&p, &graph(Edgeless(2))).unwrap().class,
        Recurrence::PositiveRecurrent
    );
    let p0 = Params::hard_core(0.0).unwrap();
    assert_eq!(
        classify_recurrence(&p0, &graph(Cycle(5)))
            .unwrap()
            .rule_fired,
        "Tmain.ii.a"
    );
    assert_eq!(
        classify_recurrence(&p0, &graph(Cycle(6)))
            .unwrap()
            .rule_fired,
        "Tmain.iii.e"
    );
    assert_eq!(
        classify_explosion(&p0, &graph(Cycle(6))).unwrap().class,
        ExplosionClass::NonExplosive
    );
}
