//! Phase classification: recurrence class and explosion class as functions
//! of `(alpha, beta, G)`.
//!
//! The verdicts are exact decision rules on `alpha`, the sign of `beta`, the
//! sign of `alpha + beta * lambda1(G)`, the independence number and the edge
//! count. The only numerical step is the sign of `alpha + beta * lambda1`,
//! which is decided from the certified eigenvalue enclosure.

use serde::Serialize;

use crate::chain::{boundary_tolerance, Beta, Chain, CriticalSign, Params, Variant};
use crate::error::{capability, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Recurrence {
    PositiveRecurrent,
    NullRecurrent,
    Transient,
}

impl Recurrence {
    pub fn is_recurrent(self) -> bool {
        self != Recurrence::Transient
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Recurrence::PositiveRecurrent => "PositiveRecurrent",
            Recurrence::NullRecurrent => "NullRecurrent",
            Recurrence::Transient => "Transient",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceClass {
    pub class: Recurrence,
    /// Present when `|alpha + beta * lambda1|` is within the boundary
    /// tolerance, i.e. when the verdict rests on the boundary convention.
    pub boundary_note: Option<String>,
    pub rule_fired: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExplosionClass {
    NonExplosive,
    ExplosiveAS,
    /// `alpha < 0`, `alpha + beta * min degree <= 0 < alpha + beta * lambda1`:
    /// explosion is expected but not established.
    OpenConjecturedExplosive,
}

impl ExplosionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ExplosionClass::NonExplosive => "NonExplosive",
            ExplosionClass::ExplosiveAS => "ExplosiveAS",
            ExplosionClass::OpenConjecturedExplosive => "OpenConjecturedExplosive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplosionVerdict {
    pub class: ExplosionClass,
    pub rule_fired: &'static str,
}

/// Continuous-time chain or its embedded jump chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    #[default]
    Ctmc,
    Dtmc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputsEcho {
    pub alpha: f64,
    pub beta: Beta,
    pub lambda1: f64,
    pub lambda1_error_bound: f64,
    /// `None` only when the graph is too large for the exact search.
    pub kappa: Option<usize>,
    pub edge_count: usize,
    pub n: usize,
    pub min_degree: usize,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentVerdict {
    /// 1-based vertex labels of the component.
    pub vertices: Vec<usize>,
    pub recurrence: Recurrence,
    pub rule_fired: &'static str,
    pub explosion: Option<ExplosionClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub chain: ChainKind,
    pub recurrence: RecurrenceClass,
    /// Reported for the continuous-time standard chain only.
    pub explosion: Option<ExplosionVerdict>,
    pub rule_fired: &'static str,
    pub inputs_echo: InputsEcho,
    /// Per-component verdicts; empty for connected graphs.
    pub components: Vec<ComponentVerdict>,
    pub notes: Vec<String>,
}

/// Recurrence class of the chain (identical for the CTMC and the DTMC).
pub fn classify_recurrence(p: &Params, g: &Graph) -> Result<RecurrenceClass> {
    let chain = Chain::new(*p, g.clone());
    let sign = chain.critical_sign()?;
    let note = boundary_note(&chain);
    let alpha = p.alpha;
    // Edgeless graphs use the normalized beta for the verdict and the
    // requested sign of beta only to name the clause.
    let beta_sign = chain.requested_params().beta.signum();
    let e = g.edge_count();
    let n = g.n();

    let (class, rule_fired) = if alpha < 0.0 {
        match sign {
            CriticalSign::Negative => (Recurrence::PositiveRecurrent, "Tmain.i"),
            CriticalSign::Boundary if p.variant == Variant::Modified && e == 1 => {
                (Recurrence::NullRecurrent, "Ttxi")
            }
            _ => (Recurrence::Transient, "Tmain.iii.f"),
        }
    } else if alpha > 0.0 {
        (Recurrence::Transient, "Tmain.iii.a")
    } else {
        match beta_sign {
            -1 => {
                if g.independence_number()? <= 2 {
                    (Recurrence::NullRecurrent, "Tmain.ii.a")
                } else {
                    (Recurrence::Transient, "Tmain.iii.e")
                }
            }
            0 => {
                if n <= 2 {
                    (Recurrence::NullRecurrent, "Tmain.ii.b")
                } else {
                    (Recurrence::Transient, "Tmain.iii.d")
                }
            }
            _ => {
                if e > 0 {
                    (Recurrence::Transient, "Tmain.iii.b")
                } else if n <= 2 {
                    (Recurrence::NullRecurrent, "Tmain.ii.c")
                } else {
                    (Recurrence::Transient, "Tmain.iii.c")
                }
            }
        }
    };
    Ok(RecurrenceClass {
        class,
        boundary_note: note,
        rule_fired,
    })
}

/// Explosion class of the continuous-time standard chain.
pub fn classify_explosion(p: &Params, g: &Graph) -> Result<ExplosionVerdict> {
    if p.variant == Variant::Modified {
        return capability("explosion is not classified for the modified chain");
    }
    let chain = Chain::new(*p, g.clone());
    let alpha = p.alpha;
    let beta_sign = chain.requested_params().beta.signum();
    let e = g.edge_count();

    let (class, rule_fired) = if alpha > 0.0 {
        (ExplosionClass::ExplosiveAS, "Texpl.ii.a")
    } else if alpha == 0.0 {
        if beta_sign <= 0 {
            (ExplosionClass::NonExplosive, "Texpl.i.b")
        } else if e > 0 {
            (ExplosionClass::ExplosiveAS, "Texpl.ii.b")
        } else {
            (ExplosionClass::NonExplosive, "Texpl.i.c")
        }
    } else {
        match chain.critical_sign()? {
            CriticalSign::Negative | CriticalSign::Boundary => {
                (ExplosionClass::NonExplosive, "Texpl.i.a")
            }
            CriticalSign::Positive => {
                // beta > 0 here, so the degree combination is exact up to
                // rounding of a product with an integer.
                let b = chain.params().beta.finite().unwrap_or(0.0);
                let value = alpha + b * g.min_degree() as f64;
                if value > boundary_tolerance(alpha) {
                    (ExplosionClass::ExplosiveAS, "Texpl.ii.c")
                } else {
                    (ExplosionClass::OpenConjecturedExplosive, "Rexpl.open")
                }
            }
        }
    };
    Ok(ExplosionVerdict { class, rule_fired })
}

/// Full report: recurrence, explosion (CTMC, standard chain), the inputs used
/// and, for disconnected graphs, the per-component verdicts.
pub fn classify_report(p: &Params, g: &Graph, kind: ChainKind) -> Result<ClassificationReport> {
    let recurrence = classify_recurrence(p, g)?;
    let mut notes = Vec::new();
    let want_explosion = kind == ChainKind::Ctmc && p.variant == Variant::Standard;
    let mut explosion = if want_explosion {
        Some(classify_explosion(p, g)?)
    } else {
        None
    };
    if kind == ChainKind::Ctmc && p.variant == Variant::Modified {
        notes.push("explosion is not classified for the modified chain".to_string());
    }
    if kind == ChainKind::Dtmc {
        notes.push("embedded jump chain: recurrence class equals that of the CTMC".to_string());
    }

    let mut components = Vec::new();
    if !g.is_connected() {
        for comp in g.connected_components() {
            let rc = classify_recurrence(p, &comp.graph)?;
            let ex = if want_explosion {
                Some(classify_explosion(p, &comp.graph)?.class)
            } else {
                None
            };
            components.push(ComponentVerdict {
                vertices: comp.vertices.iter().map(|v| v + 1).collect(),
                recurrence: rc.class,
                rule_fired: rc.rule_fired,
                explosion: ex,
            });
        }
        let nulls = components
            .iter()
            .filter(|c| c.recurrence == Recurrence::NullRecurrent)
            .count();
        if nulls > 1 {
            notes.push(format!(
                "derived combination: {nulls} null recurrent components; the whole-graph verdict is used"
            ));
        }
        // Independent components: the product explodes iff some factor does.
        if let (Some(verdict), true) = (explosion.as_mut(), want_explosion) {
            let per: Vec<ExplosionClass> = components.iter().filter_map(|c| c.explosion).collect();
            if verdict.class == ExplosionClass::OpenConjecturedExplosive
                && per.contains(&ExplosionClass::ExplosiveAS)
            {
                verdict.class = ExplosionClass::ExplosiveAS;
                verdict.rule_fired = "Texpl.ii.c";
                notes.push("derived combination: a component explodes almost surely".to_string());
            }
        }
    }

    let info = g.spectral_info();
    let inputs_echo = InputsEcho {
        alpha: p.alpha,
        beta: p.beta,
        lambda1: info.lambda1,
        lambda1_error_bound: info.lambda1_error_bound,
        kappa: g.independence_number().ok(),
        edge_count: g.edge_count(),
        n: g.n(),
        min_degree: g.min_degree(),
        variant: p.variant,
    };
    Ok(ClassificationReport {
        chain: kind,
        rule_fired: recurrence.rule_fired,
        recurrence,
        explosion,
        inputs_echo,
        components,
        notes,
    })
}

fn boundary_note(chain: &Chain) -> Option<String> {
    let b = chain.params().beta.finite()?;
    let info = chain.graph().spectral_info();
    let alpha = chain.alpha();
    let value = alpha + b * info.lambda1;
    let tol = boundary_tolerance(alpha);
    if value.abs() > tol {
        return None;
    }
    Some(format!(
        "alpha + beta*lambda1 = {value:e} is within {tol:e} of zero (lambda1 = {} +/- {:e})",
        info.lambda1, info.lambda1_error_bound
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphFamily;

    fn g(f: GraphFamily) -> Graph {
        Graph::named(f).unwrap()
    }

    #[test]
    fn recurrence_examples() {
        let std = |a, b| Params::standard(a, b).unwrap();
        for fam in [
            GraphFamily::Complete(4),
            GraphFamily::Star(3),
            GraphFamily::Edgeless(5),
        ] {
            let r = classify_recurrence(&std(-1.0, 0.0), &g(fam)).unwrap();
            assert_eq!(r.class, Recurrence::PositiveRecurrent);
        }
        let r = classify_recurrence(&std(0.0, -1.0), &g(GraphFamily::Star(3))).unwrap();
        assert_eq!(
            (r.class, r.rule_fired),
            (Recurrence::Transient, "Tmain.iii.e")
        );
        let r = classify_recurrence(&std(0.0, -1.0), &g(GraphFamily::Cycle(5))).unwrap();
        assert_eq!(r.class, Recurrence::NullRecurrent);
        let r = classify_recurrence(&std(0.0, -1.0), &g(GraphFamily::Cycle(6))).unwrap();
        assert_eq!(r.class, Recurrence::Transient);

        let k2 = g(GraphFamily::Complete(2));
        let m = classify_recurrence(&Params::modified(-1.0, 1.0).unwrap(), &k2).unwrap();
        assert_eq!((m.class, m.rule_fired), (Recurrence::NullRecurrent, "Ttxi"));
        assert!(m.boundary_note.is_some());
        let s = classify_recurrence(&std(-1.0, 1.0), &k2).unwrap();
        assert_eq!(
            (s.class, s.rule_fired),
            (Recurrence::Transient, "Tmain.iii.f")
        );
    }

    #[test]
    fn explosion_examples() {
        let k14 = g(GraphFamily::Star(4));
        let e = classify_explosion(&Params::standard(2.0, -5.0).unwrap(), &k14).unwrap();
        assert_eq!(
            (e.class, e.rule_fired),
            (ExplosionClass::ExplosiveAS, "Texpl.ii.a")
        );
        let e = classify_explosion(
            &Params::standard(-1.0, 1.0).unwrap(),
            &g(GraphFamily::Complete(2)),
        )
        .unwrap();
        assert_eq!(e.class, ExplosionClass::NonExplosive);
        let e = classify_explosion(&Params::standard(-1.0, 0.9).unwrap(), &k14).unwrap();
        assert_eq!(
            (e.class, e.rule_fired),
            (ExplosionClass::OpenConjecturedExplosive, "Rexpl.open")
        );
        assert!(classify_explosion(&Params::modified(0.0, 0.0).unwrap(), &k14).is_err());
    }

    #[test]
    fn report_examples() {
        let p = Params::standard(-1.0, 0.0).unwrap();
        let r = classify_report(&p, &g(GraphFamily::Complete(3)), ChainKind::Dtmc).unwrap();
        assert_eq!(r.recurrence.class, Recurrence::PositiveRecurrent);
        assert!(r.explosion.is_none());

        let p = Params::standard(0.0, 0.0).unwrap();
        let r = classify_report(&p, &g(GraphFamily::Edgeless(3)), ChainKind::Ctmc).unwrap();
        assert_eq!(r.recurrence.class, Recurrence::Transient);
        assert_eq!(r.components.len(), 3);
        assert!(r
            .components
            .iter()
            .all(|c| c.recurrence == Recurrence::NullRecurrent));

        let k2k1 = Graph::new(3, &[(1, 2)]).unwrap();
        let p = Params::modified(-1.0, 1.0).unwrap();
        let r = classify_report(&p, &k2k1, ChainKind::Ctmc).unwrap();
        assert_eq!(r.recurrence.class, Recurrence::NullRecurrent);
        let kinds: Vec<_> = r.components.iter().map(|c| c.recurrence).collect();
        assert!(kinds.contains(&Recurrence::NullRecurrent));
        assert!(kinds.contains(&Recurrence::PositiveRecurrent));
    }

    #[test]
    fn hard_core_arithmetic() {
        let hc = Params::hard_core(0.0).unwrap();
        let r = classify_recurrence(&hc, &g(GraphFamily::Cycle(5))).unwrap();
        assert_eq!(r.class, Recurrence::NullRecurrent);
        let r = classify_recurrence(
            &Params::hard_core(-0.1).unwrap(),
            &g(GraphFamily::Complete(5)),
        )
        .unwrap();
        assert_eq!(r.class, Recurrence::PositiveRecurrent);
        let r = classify_recurrence(&hc, &g(GraphFamily::Edgeless(2))).unwrap();
        assert_eq!(
            (r.class, r.rule_fired),
            (Recurrence::NullRecurrent, "Tmain.ii.a")
        );
    }
}
