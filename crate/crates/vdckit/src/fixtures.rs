//! Packaged fixtures: the small virtual double categories and presentations
//! used throughout the test and theorem suites.

use crate::basic::DiscreteVdc;
use crate::error::Result;
use crate::fincat::{discrete_cat, empty_cat, terminal_cat, walking_arrow_cat, FinCat, FinFunctor};
use crate::ident::{atom, tagged, Ident};
use crate::instances::span::{cell_ident, span_vdc, SpanData, SpanVdc};
use crate::presentation::{induced_vdc, PdcPresentation};
use crate::table::TableVdc;
use crate::vdc::{Cell, Frame, Loose, NormalVdc, Vdc, VdcHandle};
use std::collections::BTreeMap;
use std::sync::Arc;

pub use crate::basic::terminal_vdc as terminal;

/// The empty virtual double category.
pub fn empty_vdc() -> VdcHandle {
    Arc::new(DiscreteVdc::new("empty", empty_cat()))
}

/// The discrete virtual double category on the terminal category.
pub fn discrete_terminal() -> VdcHandle {
    Arc::new(DiscreteVdc::new("o(1)", terminal_cat()))
}

/// The discrete virtual double category on the walking arrow.
pub fn discrete_walking_arrow() -> VdcHandle {
    Arc::new(DiscreteVdc::new("o(2)", walking_arrow_cat()))
}

/// The strict presentation of the terminal pseudo double category.
pub fn terminal_presentation() -> PdcPresentation {
    let tight = terminal_cat();
    let cellcat = FinCat {
        objects: vec![atom("l")],
        morphisms: vec![crate::fincat::MorData {
            id: atom("1l"),
            src: atom("l"),
            tgt: atom("l"),
        }],
        id_of: [(atom("l"), atom("1l"))].into(),
        comp: [((atom("1l"), atom("1l")), atom("1l"))].into(),
    };
    let to_star = FinFunctor {
        on_ob: [(atom("l"), atom("*"))].into(),
        on_mor: [(atom("1l"), atom("1"))].into(),
    };
    let unit = FinFunctor {
        on_ob: [(atom("*"), atom("l"))].into(),
        on_mor: [(atom("1"), atom("1l"))].into(),
    };
    PdcPresentation {
        name: "terminal".into(),
        tight,
        cellcat,
        s: to_star.clone(),
        t: to_star,
        unit,
        hcomp_ob: [((atom("l"), atom("l")), atom("l"))].into(),
        hcomp_mor: [((atom("1l"), atom("1l")), atom("1l"))].into(),
        assoc: [((atom("l"), atom("l"), atom("l")), atom("1l"))].into(),
        lunit: [(atom("l"), atom("1l"))].into(),
        runit: [(atom("l"), atom("1l"))].into(),
    }
}

/// The strictified walking loose morphism: objects `a`, `b`, one loose
/// `p : a -/-> b`, loose identities, and identity structure cells only.
pub fn walking_loose_presentation() -> PdcPresentation {
    let tight = discrete_cat(&["a", "b"]);
    let obs = vec![atom("Ia"), atom("Ib"), atom("p")];
    let mor = |x: &str| atom(format!("1{x}"));
    let cellcat = FinCat {
        objects: obs.clone(),
        morphisms: obs
            .iter()
            .map(|o| crate::fincat::MorData {
                id: mor(o.as_atom().unwrap()),
                src: o.clone(),
                tgt: o.clone(),
            })
            .collect(),
        id_of: obs
            .iter()
            .map(|o| (o.clone(), mor(o.as_atom().unwrap())))
            .collect(),
        comp: obs
            .iter()
            .map(|o| {
                let m = mor(o.as_atom().unwrap());
                ((m.clone(), m.clone()), m)
            })
            .collect(),
    };
    let s = FinFunctor {
        on_ob: [
            (atom("Ia"), atom("a")),
            (atom("Ib"), atom("b")),
            (atom("p"), atom("a")),
        ]
        .into(),
        on_mor: [
            (atom("1Ia"), atom("1a")),
            (atom("1Ib"), atom("1b")),
            (atom("1p"), atom("1a")),
        ]
        .into(),
    };
    let t = FinFunctor {
        on_ob: [
            (atom("Ia"), atom("a")),
            (atom("Ib"), atom("b")),
            (atom("p"), atom("b")),
        ]
        .into(),
        on_mor: [
            (atom("1Ia"), atom("1a")),
            (atom("1Ib"), atom("1b")),
            (atom("1p"), atom("1b")),
        ]
        .into(),
    };
    let unit = FinFunctor {
        on_ob: [(atom("a"), atom("Ia")), (atom("b"), atom("Ib"))].into(),
        on_mor: [(atom("1a"), atom("1Ia")), (atom("1b"), atom("1Ib"))].into(),
    };
    let mut hcomp_ob = BTreeMap::new();
    hcomp_ob.insert((atom("Ia"), atom("Ia")), atom("Ia"));
    hcomp_ob.insert((atom("Ib"), atom("Ib")), atom("Ib"));
    hcomp_ob.insert((atom("p"), atom("Ia")), atom("p"));
    hcomp_ob.insert((atom("Ib"), atom("p")), atom("p"));
    let mut hcomp_mor = BTreeMap::new();
    for ((x, y), z) in &hcomp_ob {
        hcomp_mor.insert(
            (mor(x.as_atom().unwrap()), mor(y.as_atom().unwrap())),
            mor(z.as_atom().unwrap()),
        );
    }
    let mut assoc = BTreeMap::new();
    for x in &obs {
        for y in &obs {
            for z in &obs {
                let Some(xy) = hcomp_ob.get(&(x.clone(), y.clone())) else {
                    continue;
                };
                let Some(total) = hcomp_ob.get(&(xy.clone(), z.clone())) else {
                    continue;
                };
                assoc.insert(
                    (x.clone(), y.clone(), z.clone()),
                    mor(total.as_atom().unwrap()),
                );
            }
        }
    }
    let lunit = obs
        .iter()
        .map(|o| (o.clone(), mor(o.as_atom().unwrap())))
        .collect();
    let runit = obs
        .iter()
        .map(|o| (o.clone(), mor(o.as_atom().unwrap())))
        .collect();
    PdcPresentation {
        name: "wlm".into(),
        tight,
        cellcat,
        s,
        t,
        unit,
        hcomp_ob,
        hcomp_mor,
        assoc,
        lunit,
        runit,
    }
}

/// The loosely discrete presentation on a category: loose identities only,
/// with cell category isomorphic to the base.
pub fn free_discrete_presentation(name: &str, cat: FinCat) -> PdcPresentation {
    let iloose = |x: &Ident| tagged("I", vec![x.clone()]);
    let icell = |f: &Ident| tagged("Iu", vec![f.clone()]);
    let cellcat = FinCat {
        objects: cat.objects.iter().map(iloose).collect(),
        morphisms: cat
            .morphisms
            .iter()
            .map(|m| crate::fincat::MorData {
                id: icell(&m.id),
                src: iloose(&m.src),
                tgt: iloose(&m.tgt),
            })
            .collect(),
        id_of: cat
            .objects
            .iter()
            .map(|x| (iloose(x), icell(&cat.id_of[x])))
            .collect(),
        comp: cat
            .comp
            .iter()
            .map(|((f, g), h)| ((icell(f), icell(g)), icell(h)))
            .collect(),
    };
    let boundary = FinFunctor {
        on_ob: cat.objects.iter().map(|x| (iloose(x), x.clone())).collect(),
        on_mor: cat
            .morphisms
            .iter()
            .map(|m| (icell(&m.id), m.id.clone()))
            .collect(),
    };
    let unit = FinFunctor {
        on_ob: cat.objects.iter().map(|x| (x.clone(), iloose(x))).collect(),
        on_mor: cat
            .morphisms
            .iter()
            .map(|m| (m.id.clone(), icell(&m.id)))
            .collect(),
    };
    let hcomp_ob: BTreeMap<(Ident, Ident), Ident> = cat
        .objects
        .iter()
        .map(|x| ((iloose(x), iloose(x)), iloose(x)))
        .collect();
    // cells compose horizontally exactly when they share their boundary tight
    let hcomp_mor: BTreeMap<(Ident, Ident), Ident> = cat
        .morphisms
        .iter()
        .map(|m| ((icell(&m.id), icell(&m.id)), icell(&m.id)))
        .collect();
    let assoc = cat
        .objects
        .iter()
        .map(|x| {
            (
                (iloose(x), iloose(x), iloose(x)),
                icell(&cat.id_of[x]),
            )
        })
        .collect();
    let lunit: BTreeMap<Ident, Ident> = cat
        .objects
        .iter()
        .map(|x| (iloose(x), icell(&cat.id_of[x])))
        .collect();
    PdcPresentation {
        name: name.into(),
        tight: cat,
        cellcat,
        s: boundary.clone(),
        t: boundary,
        unit,
        hcomp_ob,
        hcomp_mor,
        assoc,
        runit: lunit.clone(),
        lunit,
    }
}

/// The bare walking loose morphism: two objects, one loose morphism, and
/// only its identity cell. Table-backed and complete.
pub fn walking_loose_vdc() -> VdcHandle {
    let tight = discrete_cat(&["a", "b"]);
    let p = Loose {
        id: atom("p"),
        src: atom("a"),
        tgt: atom("b"),
    };
    let frame = Frame::new(vec![atom("p")], atom("1b"), atom("1a"), atom("p"));
    let mut cells = BTreeMap::new();
    cells.insert(frame.clone(), vec![atom("1p")]);
    let mut compose = BTreeMap::new();
    compose.insert(
        (
            vec![(frame.clone(), atom("1p"))],
            (frame.clone(), atom("1p")),
        ),
        atom("1p"),
    );
    let table = TableVdc {
        name: "wlm-bare".into(),
        tight,
        looses: vec![p],
        cells,
        identities: [(atom("p"), atom("1p"))].into(),
        compose,
        bound: 1,
        complete: true,
    };
    table.validate().expect("walking loose morphism table");
    Arc::new(table)
}

/// The induced handle of the terminal presentation.
pub fn terminal_induced() -> Result<NormalVdc> {
    induced_vdc(Arc::new(terminal_presentation()))
}

/// The induced handle of the strictified walking loose morphism.
pub fn wlm_induced() -> Result<NormalVdc> {
    induced_vdc(Arc::new(walking_loose_presentation()))
}

/// The Z/2 loose monad data inside span(2): carrier `{*}`, endo span with
/// two-element apex, multiplication given by xor, unit the first element.
pub struct Z2Fixture {
    pub span: Arc<SpanVdc>,
    pub carrier: Ident,
    pub endo: Loose,
    pub mult: Cell,
    pub unit: Cell,
}

pub fn z2_span_monad() -> Z2Fixture {
    let span = span_vdc(2);
    let endo_data = SpanData {
        src: 1,
        tgt: 1,
        apex: 2,
        to_src: vec![0, 0],
        to_tgt: vec![0, 0],
    };
    let endo = Loose {
        id: endo_data.ident(),
        src: crate::ident::nat(1),
        tgt: crate::ident::nat(1),
    };
    let one = span.tight().identity(&crate::ident::nat(1)).unwrap();
    // pullback of the chain (T, T): all four pairs, lexicographic; xor table
    let mult = Cell {
        frame: Frame::new(
            vec![endo.id.clone(), endo.id.clone()],
            one.clone(),
            one.clone(),
            endo.id.clone(),
        ),
        id: cell_ident(&[0, 1, 1, 0]),
    };
    let unit = Cell {
        frame: Frame::new(vec![], one.clone(), one, endo.id.clone()),
        id: cell_ident(&[0]),
    };
    Z2Fixture {
        span,
        carrier: crate::ident::nat(1),
        endo,
        mult,
        unit,
    }
}

/// Span(FinSet) over sets of size at most `bound`, with normal structure.
pub fn span_fixture(bound: usize) -> NormalVdc {
    span_vdc(bound).normal()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vdc::frames;

    #[test]
    fn presentations_are_coherent() {
        assert!(terminal_presentation().coherence_violations().is_empty());
        assert!(
            walking_loose_presentation()
                .coherence_violations()
                .is_empty(),
            "{:?}",
            walking_loose_presentation().coherence_violations()
        );
        let fd = free_discrete_presentation("fd2", walking_arrow_cat());
        assert!(
            fd.coherence_violations().is_empty(),
            "{:?}",
            fd.coherence_violations()
        );
    }

    #[test]
    fn broken_assoc_is_reported() {
        let mut p = walking_loose_presentation();
        // replace an associator component with a non-inverse cell: there are
        // only identities here, so break its shape instead by pointing the
        // pentagon at the wrong composite
        p.assoc
            .insert((atom("Ia"), atom("Ia"), atom("Ia")), atom("1p"));
        let v = p.coherence_violations();
        assert!(v.iter().any(|e| e.contains("assoc")), "{v:?}");
    }

    #[test]
    fn induced_terminal_matches_terminal_vdc() {
        let ind = terminal_induced().unwrap();
        let t = terminal();
        for f in frames(t.vdc.as_ref(), 3) {
            // identically-shaped frame in the induced handle
            let fr = Frame::new(
                f.chain.iter().map(|_| atom("l")).collect(),
                atom("1"),
                atom("1"),
                atom("l"),
            );
            assert_eq!(ind.vdc.cells(&fr).unwrap().len(), 1);
        }
    }

    #[test]
    fn induced_wlm_unary_cells() {
        let ind = wlm_induced().unwrap();
        // frame (p; 1b, 1a; p): exactly the identity
        let fr = Frame::new(vec![atom("p")], atom("1b"), atom("1a"), atom("p"));
        assert_eq!(ind.vdc.cells(&fr).unwrap(), vec![atom("1p")]);
        // nullary frame at a with codomain Ia: exactly the identity
        let fr0 = Frame::new(vec![], atom("1a"), atom("1a"), atom("Ia"));
        assert_eq!(ind.vdc.cells(&fr0).unwrap(), vec![atom("1Ia")]);
        // frame (p; 1, 1; Ia) has no cells
        let fr_bad = Frame::new(vec![atom("p")], atom("1b"), atom("1a"), atom("p"));
        assert_eq!(ind.vdc.cells(&fr_bad).unwrap().len(), 1);
    }

    #[test]
    fn tight_opposite_is_an_involution() {
        for p in [terminal_presentation(), walking_loose_presentation()] {
            let opt = p.tight_opposite().unwrap();
            assert!(opt.coherence_violations().is_empty());
            let back = opt.tight_opposite().unwrap();
            assert_eq!(format!("{:?}", back.tight), format!("{:?}", p.tight));
            assert_eq!(back.hcomp_ob, p.hcomp_ob);
            assert_eq!(back.assoc, p.assoc);
            assert_eq!(back.lunit, p.lunit);
        }
    }

    #[test]
    fn z2_monad_satisfies_monad_equations() {
        let z = z2_span_monad();
        let s = &z.span;
        let id_t = s.identity_cell(&z.endo.id).unwrap();
        // associativity
        let lhs = s
            .compose(&[z.mult.clone(), id_t.clone()], &z.mult)
            .unwrap();
        let rhs = s
            .compose(&[id_t.clone(), z.mult.clone()], &z.mult)
            .unwrap();
        assert_eq!(lhs, rhs);
        // unit laws
        let lu = s.compose(&[z.unit.clone(), id_t.clone()], &z.mult).unwrap();
        assert_eq!(lu, id_t);
        let ru = s.compose(&[id_t.clone(), z.unit.clone()], &z.mult).unwrap();
        assert_eq!(ru, id_t);
    }

    #[test]
    fn chosen_composite_rebracketing() {
        // in the wlm presentation, chain (Ib, Ib, p): left-nested composite
        // is p; rebracketing to the right-nested tree goes through assoc
        let pdc = walking_loose_presentation();
        let chain = vec![atom("Ib"), atom("Ib"), atom("p")];
        let (l, cell) = pdc.chosen_composite(&chain, None).unwrap();
        assert_eq!(l, atom("p"));
        assert_eq!(cell.id, atom("1p"));
        let flat = crate::presentation::LTree::left_nested(&chain, &atom("b"));
        let right = crate::presentation::LTree::Node(
            Box::new(crate::presentation::LTree::Leaf(atom("Ib"))),
            Box::new(crate::presentation::LTree::Node(
                Box::new(crate::presentation::LTree::Leaf(atom("Ib"))),
                Box::new(crate::presentation::LTree::Leaf(atom("p"))),
            )),
        );
        let c = pdc.rebracket(&flat, &right).unwrap();
        assert_eq!(c, atom("1p"));
    }
}
