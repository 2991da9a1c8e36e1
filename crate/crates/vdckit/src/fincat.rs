//! Finite categories, functors between them, and natural transformations.
//!
//! A [`FinCat`] is a plain table: objects, morphisms with endpoints,
//! identity assignment and a composition table defined exactly on
//! composable pairs. Composition is written diagrammatically:
//! `comp(f, g)` is "f then g" and is defined when `tgt f = src g`.

use crate::error::{Result, VdcError};
use crate::ident::{atom, Ident};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorData {
    pub id: Ident,
    pub src: Ident,
    pub tgt: Ident,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinCat {
    pub objects: Vec<Ident>,
    pub morphisms: Vec<MorData>,
    pub id_of: BTreeMap<Ident, Ident>,
    pub comp: BTreeMap<(Ident, Ident), Ident>,
}

impl FinCat {
    pub fn has_object(&self, x: &Ident) -> bool {
        self.objects.contains(x)
    }

    pub fn mor(&self, f: &Ident) -> Option<&MorData> {
        self.morphisms.iter().find(|m| &m.id == f)
    }

    pub fn src(&self, f: &Ident) -> Result<&Ident> {
        self.mor(f)
            .map(|m| &m.src)
            .ok_or_else(|| VdcError::UnknownTight(f.clone()))
    }

    pub fn tgt(&self, f: &Ident) -> Result<&Ident> {
        self.mor(f)
            .map(|m| &m.tgt)
            .ok_or_else(|| VdcError::UnknownTight(f.clone()))
    }

    pub fn identity(&self, x: &Ident) -> Result<Ident> {
        self.id_of
            .get(x)
            .cloned()
            .ok_or_else(|| VdcError::UnknownObject(x.clone()))
    }

    pub fn is_identity(&self, f: &Ident) -> bool {
        self.mor(f)
            .map(|m| self.id_of.get(&m.src) == Some(f))
            .unwrap_or(false)
    }

    /// Diagrammatic composite `f ; g`, defined when `tgt f = src g`.
    pub fn compose(&self, f: &Ident, g: &Ident) -> Result<Ident> {
        self.comp
            .get(&(f.clone(), g.clone()))
            .cloned()
            .ok_or_else(|| {
                VdcError::NotComposable(format!("tight morphisms {f} ; {g} do not compose"))
            })
    }

    /// Compose a path of morphisms left to right; empty path yields `id_at`.
    pub fn compose_path(&self, at: &Ident, path: &[Ident]) -> Result<Ident> {
        let mut acc = self.identity(at)?;
        for f in path {
            acc = self.compose(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn hom(&self, x: &Ident, y: &Ident) -> Vec<Ident> {
        self.morphisms
            .iter()
            .filter(|m| &m.src == x && &m.tgt == y)
            .map(|m| m.id.clone())
            .collect()
    }

    pub fn from(&self, x: &Ident) -> Vec<Ident> {
        self.morphisms
            .iter()
            .filter(|m| &m.src == x)
            .map(|m| m.id.clone())
            .collect()
    }

    /// Morphisms with an inverse on both sides.
    pub fn is_iso(&self, f: &Ident) -> bool {
        self.inverse(f).is_some()
    }

    pub fn inverse(&self, f: &Ident) -> Option<Ident> {
        let m = self.mor(f)?;
        let id_src = self.id_of.get(&m.src)?;
        let id_tgt = self.id_of.get(&m.tgt)?;
        self.morphisms.iter().find_map(|g| {
            (g.src == m.tgt
                && g.tgt == m.src
                && self.comp.get(&(f.clone(), g.id.clone())) == Some(id_src)
                && self.comp.get(&(g.id.clone(), f.clone())) == Some(id_tgt))
            .then(|| g.id.clone())
        })
    }

    pub fn terminal_objects(&self) -> Vec<Ident> {
        self.objects
            .iter()
            .filter(|t| self.objects.iter().all(|x| self.hom(x, t).len() == 1))
            .cloned()
            .collect()
    }

    /// All category axiom violations, as human-readable strings.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for x in &self.objects {
            if !seen.insert(x.clone()) {
                out.push(format!("duplicate object {x}"));
            }
        }
        let mut mseen = std::collections::BTreeSet::new();
        for m in &self.morphisms {
            if !mseen.insert(m.id.clone()) {
                out.push(format!("duplicate morphism {}", m.id));
            }
            if !self.has_object(&m.src) || !self.has_object(&m.tgt) {
                out.push(format!("morphism {} has dangling endpoint", m.id));
            }
        }
        for x in &self.objects {
            match self.id_of.get(x) {
                None => out.push(format!("object {x} has no identity")),
                Some(i) => match self.mor(i) {
                    None => out.push(format!("identity of {x} is not a morphism")),
                    Some(m) => {
                        if &m.src != x || &m.tgt != x {
                            out.push(format!("identity of {x} is not an endomorphism"));
                        }
                    }
                },
            }
        }
        for f in &self.morphisms {
            for g in &self.morphisms {
                let defined = self.comp.contains_key(&(f.id.clone(), g.id.clone()));
                if (f.tgt == g.src) != defined {
                    out.push(format!(
                        "compose({}, {}) {} defined",
                        f.id,
                        g.id,
                        if defined { "wrongly" } else { "not" }
                    ));
                    continue;
                }
                if defined {
                    let fg = &self.comp[&(f.id.clone(), g.id.clone())];
                    match self.mor(fg) {
                        None => out.push(format!("compose({}, {}) is dangling", f.id, g.id)),
                        Some(m) => {
                            if m.src != f.src || m.tgt != g.tgt {
                                out.push(format!(
                                    "compose({}, {}) has wrong endpoints",
                                    f.id, g.id
                                ));
                            }
                        }
                    }
                }
            }
        }
        for m in &self.morphisms {
            if let (Some(il), Some(ir)) = (self.id_of.get(&m.src), self.id_of.get(&m.tgt)) {
                if self.comp.get(&(il.clone(), m.id.clone())) != Some(&m.id) {
                    out.push(format!("left unit law fails at {}", m.id));
                }
                if self.comp.get(&(m.id.clone(), ir.clone())) != Some(&m.id) {
                    out.push(format!("right unit law fails at {}", m.id));
                }
            }
        }
        for f in &self.morphisms {
            for g in &self.morphisms {
                if f.tgt != g.src {
                    continue;
                }
                for h in &self.morphisms {
                    if g.tgt != h.src {
                        continue;
                    }
                    let fg = &self.comp[&(f.id.clone(), g.id.clone())];
                    let gh = &self.comp[&(g.id.clone(), h.id.clone())];
                    let a = self.comp.get(&(fg.clone(), h.id.clone()));
                    let b = self.comp.get(&(f.id.clone(), gh.clone()));
                    if a != b {
                        out.push(format!(
                            "associativity fails at ({}, {}, {})",
                            f.id, g.id, h.id
                        ));
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(VdcError::CoherenceFailure(v.join("; ")))
        }
    }

    pub fn opposite(&self) -> FinCat {
        FinCat {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorData {
                    id: m.id.clone(),
                    src: m.tgt.clone(),
                    tgt: m.src.clone(),
                })
                .collect(),
            id_of: self.id_of.clone(),
            comp: self
                .comp
                .iter()
                .map(|((f, g), h)| ((g.clone(), f.clone()), h.clone()))
                .collect(),
        }
    }

    pub fn product(&self, other: &FinCat) -> FinCat {
        let pair = |x: &Ident, y: &Ident| Ident::List(vec![x.clone(), y.clone()]);
        let mut objects = Vec::new();
        for x in &self.objects {
            for y in &other.objects {
                objects.push(pair(x, y));
            }
        }
        let mut morphisms = Vec::new();
        for f in &self.morphisms {
            for g in &other.morphisms {
                morphisms.push(MorData {
                    id: pair(&f.id, &g.id),
                    src: pair(&f.src, &g.src),
                    tgt: pair(&f.tgt, &g.tgt),
                });
            }
        }
        let mut id_of = BTreeMap::new();
        for x in &self.objects {
            for y in &other.objects {
                id_of.insert(pair(x, y), pair(&self.id_of[x], &other.id_of[y]));
            }
        }
        let mut comp = BTreeMap::new();
        for ((f1, g1), h1) in &self.comp {
            for ((f2, g2), h2) in &other.comp {
                comp.insert((pair(f1, f2), pair(g1, g2)), pair(h1, h2));
            }
        }
        FinCat {
            objects,
            morphisms,
            id_of,
            comp,
        }
    }
}

/// A functor between finite categories, as total assignment tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinFunctor {
    pub on_ob: BTreeMap<Ident, Ident>,
    pub on_mor: BTreeMap<Ident, Ident>,
}

impl FinFunctor {
    pub fn identity(cat: &FinCat) -> FinFunctor {
        FinFunctor {
            on_ob: cat.objects.iter().map(|x| (x.clone(), x.clone())).collect(),
            on_mor: cat
                .morphisms
                .iter()
                .map(|m| (m.id.clone(), m.id.clone()))
                .collect(),
        }
    }

    pub fn ob(&self, x: &Ident) -> Result<&Ident> {
        self.on_ob
            .get(x)
            .ok_or_else(|| VdcError::UnknownObject(x.clone()))
    }

    pub fn mor(&self, f: &Ident) -> Result<&Ident> {
        self.on_mor
            .get(f)
            .ok_or_else(|| VdcError::UnknownTight(f.clone()))
    }

    pub fn violations(&self, dom: &FinCat, cod: &FinCat) -> Vec<String> {
        let mut out = Vec::new();
        for x in &dom.objects {
            match self.on_ob.get(x) {
                None => out.push(format!("no image for object {x}")),
                Some(y) if !cod.has_object(y) => out.push(format!("image of {x} is dangling")),
                _ => {}
            }
        }
        for m in &dom.morphisms {
            match self.on_mor.get(&m.id) {
                None => out.push(format!("no image for morphism {}", m.id)),
                Some(n) => match cod.mor(n) {
                    None => out.push(format!("image of {} is dangling", m.id)),
                    Some(nd) => {
                        if self.on_ob.get(&m.src) != Some(&nd.src)
                            || self.on_ob.get(&m.tgt) != Some(&nd.tgt)
                        {
                            out.push(format!("image of {} has wrong endpoints", m.id));
                        }
                    }
                },
            }
        }
        for x in &dom.objects {
            if let (Some(ix), Some(y)) = (dom.id_of.get(x), self.on_ob.get(x)) {
                if self.on_mor.get(ix) != cod.id_of.get(y) {
                    out.push(format!("identity of {x} not preserved"));
                }
            }
        }
        for ((f, g), h) in &dom.comp {
            if let (Some(ff), Some(gg), Some(hh)) = (
                self.on_mor.get(f),
                self.on_mor.get(g),
                self.on_mor.get(h),
            ) {
                if cod.comp.get(&(ff.clone(), gg.clone())) != Some(hh) {
                    out.push(format!("composite ({f}, {g}) not preserved"));
                }
            }
        }
        out
    }

    pub fn validate(&self, dom: &FinCat, cod: &FinCat) -> Result<()> {
        let v = self.violations(dom, cod);
        if v.is_empty() {
            Ok(())
        } else {
            Err(VdcError::CoherenceFailure(v.join("; ")))
        }
    }

    /// Diagrammatic composite: `self` then `other`.
    pub fn then(&self, other: &FinFunctor) -> Result<FinFunctor> {
        let mut on_ob = BTreeMap::new();
        for (x, y) in &self.on_ob {
            on_ob.insert(x.clone(), other.ob(y)?.clone());
        }
        let mut on_mor = BTreeMap::new();
        for (f, g) in &self.on_mor {
            on_mor.insert(f.clone(), other.mor(g)?.clone());
        }
        Ok(FinFunctor { on_ob, on_mor })
    }

    /// Stable identifier for use as an object of a functor category.
    pub fn ident(&self) -> Ident {
        let obs = self
            .on_ob
            .iter()
            .map(|(k, v)| Ident::List(vec![k.clone(), v.clone()]))
            .collect();
        let mors = self
            .on_mor
            .iter()
            .map(|(k, v)| Ident::List(vec![k.clone(), v.clone()]))
            .collect();
        Ident::List(vec![atom("F"), Ident::List(obs), Ident::List(mors)])
    }
}

/// Exhaustively enumerate all functors `dom -> cod`, in deterministic order.
///
/// `ceiling` bounds the number of raw candidates examined; exceeding it is an
/// error rather than a truncated answer.
pub fn all_functors(dom: &FinCat, cod: &FinCat, ceiling: usize) -> Result<Vec<FinFunctor>> {
    // Candidate count: |cod objects| ^ |dom objects| object maps.
    let mut count: usize = 1;
    for _ in &dom.objects {
        count = count.saturating_mul(cod.objects.len().max(1));
        if count > ceiling {
            return Err(VdcError::SizeExceeded(format!(
                "functor space above ceiling {ceiling}"
            )));
        }
    }
    let mut result = Vec::new();
    let mut ob_assignments = vec![BTreeMap::new()];
    for x in &dom.objects {
        let mut next = Vec::new();
        for partial in &ob_assignments {
            for y in &cod.objects {
                let mut p = partial.clone();
                p.insert(x.clone(), y.clone());
                next.push(p);
            }
        }
        ob_assignments = next;
        if ob_assignments.is_empty() {
            return Ok(result);
        }
    }
    let mut examined: usize = 0;
    for on_ob in ob_assignments {
        // Extend to morphisms one at a time, pruning by endpoints and by the
        // composition table against already-assigned morphisms.
        let mut partials: Vec<BTreeMap<Ident, Ident>> = vec![BTreeMap::new()];
        for m in &dom.morphisms {
            let src = &on_ob[&m.src];
            let tgt = &on_ob[&m.tgt];
            let candidates: Vec<Ident> = if dom.id_of.get(&m.src) == Some(&m.id) {
                vec![cod.id_of[src].clone()]
            } else {
                cod.hom(src, tgt)
            };
            let mut next = Vec::new();
            for partial in &partials {
                'cand: for c in &candidates {
                    examined += 1;
                    if examined > ceiling {
                        return Err(VdcError::SizeExceeded(format!(
                            "functor space above ceiling {ceiling}"
                        )));
                    }
                    // check compositions among assigned morphisms
                    for (f, ff) in partial.iter() {
                        if let Some(h) = dom.comp.get(&(f.clone(), m.id.clone())) {
                            if let Some(hh) = partial.get(h).or(if h == &m.id {
                                Some(c)
                            } else {
                                None
                            }) {
                                if cod.comp.get(&(ff.clone(), c.clone())) != Some(hh) {
                                    continue 'cand;
                                }
                            }
                        }
                        if let Some(h) = dom.comp.get(&(m.id.clone(), f.clone())) {
                            if let Some(hh) = partial.get(h).or(if h == &m.id {
                                Some(c)
                            } else {
                                None
                            }) {
                                if cod.comp.get(&(c.clone(), ff.clone())) != Some(hh) {
                                    continue 'cand;
                                }
                            }
                        }
                    }
                    if let Some(h) = dom.comp.get(&(m.id.clone(), m.id.clone())) {
                        if let Some(hh) = partial.get(h).or(if h == &m.id { Some(c) } else { None })
                        {
                            if cod.comp.get(&(c.clone(), c.clone())) != Some(hh) {
                                continue 'cand;
                            }
                        }
                    }
                    let mut p = partial.clone();
                    p.insert(m.id.clone(), c.clone());
                    next.push(p);
                }
            }
            partials = next;
            if partials.is_empty() {
                break;
            }
        }
        for on_mor in partials {
            let f = FinFunctor {
                on_ob: on_ob.clone(),
                on_mor,
            };
            if f.violations(dom, cod).is_empty() {
                result.push(f);
            }
        }
    }
    Ok(result)
}

/// A natural transformation between functors `dom -> cod`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NatTrans {
    pub components: BTreeMap<Ident, Ident>,
}

impl NatTrans {
    pub fn identity(dom: &FinCat, f: &FinFunctor, cod: &FinCat) -> NatTrans {
        NatTrans {
            components: dom
                .objects
                .iter()
                .map(|x| (x.clone(), cod.id_of[&f.on_ob[x]].clone()))
                .collect(),
        }
    }

    pub fn at(&self, x: &Ident) -> Result<&Ident> {
        self.components
            .get(x)
            .ok_or_else(|| VdcError::UnknownObject(x.clone()))
    }

    pub fn is_natural(&self, dom: &FinCat, cod: &FinCat, f: &FinFunctor, g: &FinFunctor) -> bool {
        dom.morphisms.iter().all(|m| {
            let (Some(cx), Some(cy)) = (self.components.get(&m.src), self.components.get(&m.tgt))
            else {
                return false;
            };
            let (Some(fm), Some(gm)) = (f.on_mor.get(&m.id), g.on_mor.get(&m.id)) else {
                return false;
            };
            cod.comp.get(&(fm.clone(), cy.clone())) == cod.comp.get(&(cx.clone(), gm.clone()))
                && cod.comp.contains_key(&(fm.clone(), cy.clone()))
        })
    }

    pub fn ident(&self) -> Ident {
        Ident::List(vec![
            atom("nt"),
            Ident::List(
                self.components
                    .iter()
                    .map(|(k, v)| Ident::List(vec![k.clone(), v.clone()]))
                    .collect(),
            ),
        ])
    }
}

pub fn all_nat_trans(dom: &FinCat, cod: &FinCat, f: &FinFunctor, g: &FinFunctor) -> Vec<NatTrans> {
    let mut partials: Vec<BTreeMap<Ident, Ident>> = vec![BTreeMap::new()];
    for x in &dom.objects {
        let candidates = cod.hom(&f.on_ob[x], &g.on_ob[x]);
        let mut next = Vec::new();
        for p in &partials {
            for c in &candidates {
                let mut q = p.clone();
                q.insert(x.clone(), c.clone());
                next.push(q);
            }
        }
        partials = next;
    }
    partials
        .into_iter()
        .map(|components| NatTrans { components })
        .filter(|n| n.is_natural(dom, cod, f, g))
        .collect()
}

/// The functor category `[dom, cod]` as a finite category.
pub fn functor_category(dom: &FinCat, cod: &FinCat, ceiling: usize) -> Result<FinCat> {
    let functors = all_functors(dom, cod, ceiling)?;
    let objects: Vec<Ident> = functors.iter().map(|f| f.ident()).collect();
    let mut morphisms = Vec::new();
    let mut id_of = BTreeMap::new();
    let mut all: Vec<(Ident, Ident, NatTrans)> = Vec::new();
    for f in &functors {
        for g in &functors {
            for n in all_nat_trans(dom, cod, f, g) {
                all.push((f.ident(), g.ident(), n));
            }
        }
    }
    let mor_ident = |srcf: &Ident, tgtf: &Ident, n: &NatTrans| {
        Ident::List(vec![srcf.clone(), tgtf.clone(), n.ident()])
    };
    for (sf, tf, n) in &all {
        morphisms.push(MorData {
            id: mor_ident(sf, tf, n),
            src: sf.clone(),
            tgt: tf.clone(),
        });
    }
    for f in &functors {
        let n = NatTrans::identity(dom, f, cod);
        id_of.insert(f.ident(), mor_ident(&f.ident(), &f.ident(), &n));
    }
    let mut comp = BTreeMap::new();
    for (sf, tf, n) in &all {
        for (sg, tg, m) in &all {
            if tf != sg {
                continue;
            }
            let mut components = BTreeMap::new();
            for x in &dom.objects {
                components.insert(
                    x.clone(),
                    cod.compose(&n.components[x], &m.components[x])?,
                );
            }
            let nm = NatTrans { components };
            comp.insert(
                (mor_ident(sf, tf, n), mor_ident(sg, tg, m)),
                mor_ident(sf, tg, &nm),
            );
        }
    }
    Ok(FinCat {
        objects,
        morphisms,
        id_of,
        comp,
    })
}

// Small standard categories, used pervasively by fixtures and tests.

pub fn terminal_cat() -> FinCat {
    FinCat {
        objects: vec![atom("*")],
        morphisms: vec![MorData {
            id: atom("1"),
            src: atom("*"),
            tgt: atom("*"),
        }],
        id_of: [(atom("*"), atom("1"))].into(),
        comp: [((atom("1"), atom("1")), atom("1"))].into(),
    }
}

pub fn empty_cat() -> FinCat {
    FinCat {
        objects: vec![],
        morphisms: vec![],
        id_of: BTreeMap::new(),
        comp: BTreeMap::new(),
    }
}

pub fn discrete_cat(names: &[&str]) -> FinCat {
    let objects: Vec<Ident> = names.iter().map(|s| atom(*s)).collect();
    let morphisms: Vec<MorData> = names
        .iter()
        .map(|s| MorData {
            id: atom(format!("1{s}")),
            src: atom(*s),
            tgt: atom(*s),
        })
        .collect();
    let id_of = names
        .iter()
        .map(|s| (atom(*s), atom(format!("1{s}"))))
        .collect();
    let comp = names
        .iter()
        .map(|s| {
            (
                (atom(format!("1{s}")), atom(format!("1{s}"))),
                atom(format!("1{s}")),
            )
        })
        .collect();
    FinCat {
        objects,
        morphisms,
        id_of,
        comp,
    }
}

/// The walking arrow: objects `a`, `b` and one non-identity `u : a -> b`.
pub fn walking_arrow_cat() -> FinCat {
    let mut c = discrete_cat(&["a", "b"]);
    c.morphisms.push(MorData {
        id: atom("u"),
        src: atom("a"),
        tgt: atom("b"),
    });
    c.comp.insert((atom("1a"), atom("u")), atom("u"));
    c.comp.insert((atom("u"), atom("1b")), atom("u"));
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walking_arrow_is_a_category() {
        assert!(walking_arrow_cat().violations().is_empty());
        assert!(terminal_cat().violations().is_empty());
        assert!(empty_cat().violations().is_empty());
    }

    #[test]
    fn broken_comp_is_caught() {
        let mut c = walking_arrow_cat();
        c.comp.insert((atom("1a"), atom("u")), atom("1a"));
        assert!(!c.violations().is_empty());
    }

    #[test]
    fn functor_enumeration_counts() {
        let one = terminal_cat();
        let two = walking_arrow_cat();
        // functors 1 -> walking arrow: one per object
        assert_eq!(all_functors(&one, &two, 10_000).unwrap().len(), 2);
        // functors walking arrow -> 1: exactly one
        assert_eq!(all_functors(&two, &one, 10_000).unwrap().len(), 1);
        // endofunctors of the walking arrow: pick images of a, b with a map
        // a->b; three monotone choices
        assert_eq!(all_functors(&two, &two, 10_000).unwrap().len(), 3);
    }

    #[test]
    fn functor_category_of_terminal() {
        let one = terminal_cat();
        let two = walking_arrow_cat();
        let fc = functor_category(&one, &two, 10_000).unwrap();
        assert!(fc.violations().is_empty());
        assert_eq!(fc.objects.len(), 2);
        assert_eq!(fc.morphisms.len(), 3);
    }

    #[test]
    fn opposite_involutive() {
        let c = walking_arrow_cat();
        assert_eq!(c.opposite().opposite(), c);
        assert!(c.opposite().violations().is_empty());
    }

    #[test]
    fn terminal_object_detection() {
        let c = walking_arrow_cat();
        assert_eq!(c.terminal_objects(), vec![atom("b")]);
    }
}
