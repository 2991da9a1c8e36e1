//! Lax functor data out of a presentation, its coherence laws, and the
//! two-sided translation with loose monads and modules in the exponential.
//!
//! A lax functor `A -> X` carries stratum maps, a unitor per object and a
//! compositor per composable pair of loose morphisms. Such data is exactly
//! a functor of virtual double categories out of the induced handle of
//! `A`, and equally a loose monad in `X^A`; both translations are
//! implemented here and verified against each other by the theorem suite.

use crate::constructions::monads::{Module, Monad};
use crate::error::{Result, VdcError};
use crate::exponential::{family_ident, ExpVdc, Family, GraphMorphism};
use crate::fincat::{FinFunctor, NatTrans};
use crate::functor::{FunHandle, VdcFun};
use crate::ident::Ident;
use crate::presentation::{LTree, PdcPresentation};
use crate::vdc::{Cell, Frame, Vdc, VdcHandle};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaxFunctorData {
    pub on_ob: BTreeMap<Ident, Ident>,
    pub on_tight: BTreeMap<Ident, Ident>,
    pub on_loose: BTreeMap<Ident, Ident>,
    pub on_cell1: BTreeMap<Ident, Cell>,
    pub unitor: BTreeMap<Ident, Cell>,
    pub compositor: BTreeMap<(Ident, Ident), Cell>,
}

impl LaxFunctorData {
    pub fn ident(&self) -> Ident {
        crate::ident::tagged(
            "lax",
            vec![
                Ident::List(
                    self.on_ob
                        .iter()
                        .map(|(k, v)| Ident::List(vec![k.clone(), v.clone()]))
                        .collect(),
                ),
                Ident::List(
                    self.on_loose
                        .iter()
                        .map(|(k, v)| Ident::List(vec![k.clone(), v.clone()]))
                        .collect(),
                ),
                Ident::List(
                    self.unitor
                        .iter()
                        .map(|(k, v)| Ident::List(vec![k.clone(), v.id.clone()]))
                        .collect(),
                ),
                Ident::List(
                    self.compositor
                        .iter()
                        .map(|((p, q), v)| {
                            Ident::List(vec![p.clone(), q.clone(), v.id.clone()])
                        })
                        .collect(),
                ),
            ],
        )
    }

    /// The n-ary compositor along the left-nested bracketing; the unitor
    /// for the empty chain, the identity for singletons.
    pub fn compositor_n(
        &self,
        pdc: &PdcPresentation,
        x: &dyn Vdc,
        chain: &[Ident],
        at: &Ident,
    ) -> Result<Cell> {
        if chain.is_empty() {
            return self
                .unitor
                .get(at)
                .cloned()
                .ok_or_else(|| VdcError::IncoherentLaxFunctor(format!("missing unitor at {at}")));
        }
        let mut acc = x.identity_cell(&self.on_loose[&chain[0]])?;
        let mut acc_loose = chain[0].clone();
        for q in &chain[1..] {
            let mu = self
                .compositor
                .get(&(acc_loose.clone(), q.clone()))
                .ok_or_else(|| {
                    VdcError::IncoherentLaxFunctor(format!(
                        "missing compositor at ({acc_loose}, {q})"
                    ))
                })?;
            let idq = x.identity_cell(&self.on_loose[q])?;
            acc = x.compose(&[acc, idq], mu)?;
            acc_loose = pdc.hcomp(&acc_loose, q)?;
        }
        Ok(acc)
    }

    /// All violated coherence equations, with tags.
    pub fn violations(&self, pdc: &PdcPresentation, x: &dyn Vdc) -> Vec<String> {
        let mut out = Vec::new();
        // stratum 0: a functor of tight categories
        let f0 = FinFunctor {
            on_ob: self.on_ob.clone(),
            on_mor: self.on_tight.clone(),
        };
        for v in f0.violations(&pdc.tight, x.tight()) {
            out.push(format!("lax-stratum0: {v}"));
        }
        // stratum 1: the graph part
        for q in &pdc.cellcat.objects {
            match self.on_loose.get(q) {
                None => out.push(format!("lax-graph: no image for loose {q}")),
                Some(lq) => match crate::vdc::loose_data(x, lq) {
                    Err(_) => out.push(format!("lax-graph: dangling image of {q}")),
                    Ok(ld) => {
                        let su = pdc.loose_src(q).ok().and_then(|u| self.on_ob.get(u));
                        let tv = pdc.loose_tgt(q).ok().and_then(|v| self.on_ob.get(v));
                        if su != Some(&ld.src) || tv != Some(&ld.tgt) {
                            out.push(format!("lax-graph: image of {q} has wrong endpoints"));
                        }
                    }
                },
            }
        }
        for m in &pdc.cellcat.morphisms {
            match self.on_cell1.get(&m.id) {
                None => out.push(format!("lax-graph: no image for cell {}", m.id)),
                Some(c) => {
                    let want = (|| -> Result<Frame> {
                        Ok(Frame::new(
                            vec![self.on_loose[&m.src].clone()],
                            self.on_tight[&pdc.t.on_mor[&m.id]].clone(),
                            self.on_tight[&pdc.s.on_mor[&m.id]].clone(),
                            self.on_loose[&m.tgt].clone(),
                        ))
                    })();
                    if want.ok().as_ref() != Some(&c.frame) || !x.has_cell(c).unwrap_or(false) {
                        out.push(format!("lax-graph: image of cell {} has wrong frame", m.id));
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for q in &pdc.cellcat.objects {
            let want = x.identity_cell(&self.on_loose[q]).ok();
            if self.on_cell1.get(&pdc.cellcat.id_of[q]) != want.as_ref() {
                out.push(format!("lax-graph: identity on {q} not preserved"));
            }
        }
        for ((m1, m2), m12) in &pdc.cellcat.comp {
            let lhs = x
                .compose(&[self.on_cell1[m1].clone()], &self.on_cell1[m2])
                .ok();
            if lhs.as_ref() != Some(&self.on_cell1[m12]) {
                out.push(format!("lax-graph: composite ({m1}, {m2}) not preserved"));
            }
        }
        // unitors
        for a in &pdc.tight.objects {
            match self.unitor.get(a) {
                None => out.push(format!("lax-unitor: missing at {a}")),
                Some(u) => {
                    let want = (|| -> Result<Frame> {
                        let ia = x.tight().identity(&self.on_ob[a])?;
                        Ok(Frame::new(
                            vec![],
                            ia.clone(),
                            ia,
                            self.on_loose[pdc.unit_loose(a)?].clone(),
                        ))
                    })();
                    if want.ok().as_ref() != Some(&u.frame) || !x.has_cell(u).unwrap_or(false) {
                        out.push(format!("lax-unitor: wrong frame at {a}"));
                    }
                }
            }
        }
        for ((p, q), mu) in &self.compositor {
            let want = (|| -> Result<Frame> {
                let pq = pdc.hcomp(p, q)?;
                let it = x.tight().identity(&self.on_ob[pdc.loose_tgt(p)?])?;
                let is = x.tight().identity(&self.on_ob[pdc.loose_src(q)?])?;
                Ok(Frame::new(
                    vec![self.on_loose[p].clone(), self.on_loose[q].clone()],
                    it,
                    is,
                    self.on_loose[&pq].clone(),
                ))
            })();
            if want.ok().as_ref() != Some(&mu.frame) || !x.has_cell(mu).unwrap_or(false) {
                out.push(format!("lax-compositor: wrong frame at ({p}, {q})"));
            }
        }
        for (p, q) in pdc.composable_pairs() {
            if !self.compositor.contains_key(&(p.clone(), q.clone())) {
                out.push(format!("lax-compositor: missing at ({p}, {q})"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        // unitor naturality
        for a0 in &pdc.tight.morphisms {
            if pdc.tight.is_identity(&a0.id) {
                continue;
            }
            let iu = &pdc.unit.on_mor[&a0.id];
            let lhs = x
                .compose(&[self.unitor[&a0.src].clone()], &self.on_cell1[iu])
                .ok();
            let rhs = x.restrict_nullary(&self.unitor[&a0.tgt], &self.on_tight[&a0.id]);
            if rhs.is_none() {
                out.push(format!(
                    "lax-unitor: naturality at {} unverifiable (no restriction)",
                    a0.id
                ));
            } else if lhs != rhs {
                out.push(format!("lax-unitor: naturality fails at {}", a0.id));
            }
        }
        // compositor naturality
        for m in &pdc.cellcat.morphisms {
            for n in &pdc.cellcat.morphisms {
                if pdc.s.on_ob[&m.src] != pdc.t.on_ob[&n.src]
                    || pdc.s.on_ob[&m.tgt] != pdc.t.on_ob[&n.tgt]
                    || pdc.s.on_mor[&m.id] != pdc.t.on_mor[&n.id]
                {
                    continue;
                }
                let res = (|| -> Result<bool> {
                    let lhs = x.compose(
                        &[self.on_cell1[&m.id].clone(), self.on_cell1[&n.id].clone()],
                        &self.compositor[&(m.tgt.clone(), n.tgt.clone())],
                    )?;
                    let folded = pdc.hcomp_cells(&m.id, &n.id)?;
                    let rhs = x.compose(
                        &[self.compositor[&(m.src.clone(), n.src.clone())].clone()],
                        &self.on_cell1[&folded],
                    )?;
                    Ok(lhs == rhs)
                })();
                if !matches!(res, Ok(true)) {
                    out.push(format!(
                        "lax-compositor: naturality fails at ({}, {})",
                        m.id, n.id
                    ));
                }
            }
        }
        // associativity coherence
        for (p, q) in pdc.composable_pairs() {
            for r in &pdc.cellcat.objects {
                if pdc.s.on_ob[&q] != pdc.t.on_ob[r] {
                    continue;
                }
                let res = (|| -> Result<bool> {
                    let pq = pdc.hcomp(&p, &q)?;
                    let qr = pdc.hcomp(&q, r)?;
                    let idr = x.identity_cell(&self.on_loose[r])?;
                    let idp = x.identity_cell(&self.on_loose[&p])?;
                    let one = x.compose(
                        &[self.compositor[&(p.clone(), q.clone())].clone(), idr],
                        &self.compositor[&(pq.clone(), r.clone())],
                    )?;
                    let assoc = &pdc.assoc[&(p.clone(), q.clone(), r.clone())];
                    let one = x.compose(&[one], &self.on_cell1[assoc])?;
                    let two = x.compose(
                        &[idp, self.compositor[&(q.clone(), r.clone())].clone()],
                        &self.compositor[&(p.clone(), qr.clone())],
                    )?;
                    Ok(one == two)
                })();
                if !matches!(res, Ok(true)) {
                    out.push(format!("lax-assoc: fails at ({p}, {q}, {r})"));
                }
            }
        }
        // unit coherence
        for p in &pdc.cellcat.objects {
            let res = (|| -> Result<bool> {
                let tp = pdc.loose_tgt(p)?.clone();
                let sp = pdc.loose_src(p)?.clone();
                let itp = pdc.unit_loose(&tp)?.clone();
                let isp = pdc.unit_loose(&sp)?.clone();
                let idp = x.identity_cell(&self.on_loose[p])?;
                let l = x.compose(
                    &[self.unitor[&tp].clone(), idp.clone()],
                    &self.compositor[&(itp.clone(), p.clone())],
                )?;
                let l = x.compose(&[l], &self.on_cell1[&pdc.lunit[p]])?;
                let r = x.compose(
                    &[idp.clone(), self.unitor[&sp].clone()],
                    &self.compositor[&(p.clone(), isp.clone())],
                )?;
                let r = x.compose(&[r], &self.on_cell1[&pdc.runit[p]])?;
                Ok(l == idp && r == idp)
            })();
            if !matches!(res, Ok(true)) {
                out.push(format!("lax-unit-coherence: fails at {p}"));
            }
        }
        out
    }
}

/// The functor of virtual double categories induced by lax functor data:
/// a multiary cell factors as its chain's compositor followed by the image
/// of its unary part.
pub struct LaxAsFun {
    pub data: LaxFunctorData,
    pub pdc: Arc<PdcPresentation>,
    pub dom: VdcHandle,
    pub cod: VdcHandle,
}

impl VdcFun for LaxAsFun {
    fn name(&self) -> String {
        "lax".into()
    }
    fn dom(&self) -> &VdcHandle {
        &self.dom
    }
    fn cod(&self) -> &VdcHandle {
        &self.cod
    }
    fn ob(&self, a: &Ident) -> Result<Ident> {
        self.data
            .on_ob
            .get(a)
            .cloned()
            .ok_or_else(|| VdcError::UnknownObject(a.clone()))
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        self.data
            .on_tight
            .get(f)
            .cloned()
            .ok_or_else(|| VdcError::UnknownTight(f.clone()))
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        self.data
            .on_loose
            .get(p)
            .cloned()
            .ok_or_else(|| VdcError::UnknownLoose(p.clone()))
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        let at = self.pdc.tight.src(&c.frame.left)?.clone();
        let mu = self
            .data
            .compositor_n(&self.pdc, self.cod.as_ref(), &c.frame.chain, &at)?;
        let m = self
            .data
            .on_cell1
            .get(&c.id)
            .ok_or_else(|| VdcError::UnknownCell(c.id.clone()))?;
        self.cod.compose(&[mu], m)
    }
}

/// Read lax functor data off a functor of virtual double categories out of
/// the induced handle.
pub fn functor_to_lax(pdc: &PdcPresentation, f: &dyn VdcFun) -> Result<LaxFunctorData> {
    let mut on_ob = BTreeMap::new();
    let mut on_tight = BTreeMap::new();
    for a in &pdc.tight.objects {
        on_ob.insert(a.clone(), f.ob(a)?);
    }
    for m in &pdc.tight.morphisms {
        on_tight.insert(m.id.clone(), f.tight(&m.id)?);
    }
    let mut on_loose = BTreeMap::new();
    for q in &pdc.cellcat.objects {
        on_loose.insert(q.clone(), f.loose(q)?);
    }
    let mut on_cell1 = BTreeMap::new();
    for m in &pdc.cellcat.morphisms {
        let c = Cell {
            frame: Frame::new(
                vec![m.src.clone()],
                pdc.t.on_mor[&m.id].clone(),
                pdc.s.on_mor[&m.id].clone(),
                m.tgt.clone(),
            ),
            id: m.id.clone(),
        };
        on_cell1.insert(m.id.clone(), f.cell(&c)?);
    }
    let mut unitor = BTreeMap::new();
    for a in &pdc.tight.objects {
        let i_a = pdc.unit_loose(a)?.clone();
        let c = Cell {
            frame: Frame::new(
                vec![],
                pdc.tight.identity(a)?,
                pdc.tight.identity(a)?,
                i_a.clone(),
            ),
            id: pdc.cellcat.identity(&i_a)?,
        };
        unitor.insert(a.clone(), f.cell(&c)?);
    }
    let mut compositor = BTreeMap::new();
    for (p, q) in pdc.composable_pairs() {
        let pq = pdc.hcomp(&p, &q)?;
        let c = Cell {
            frame: Frame::new(
                vec![p.clone(), q.clone()],
                pdc.tight.identity(pdc.loose_tgt(&p)?)?,
                pdc.tight.identity(pdc.loose_src(&q)?)?,
                pq.clone(),
            ),
            id: pdc.cellcat.identity(&pq)?,
        };
        compositor.insert((p, q), f.cell(&c)?);
    }
    Ok(LaxFunctorData {
        on_ob,
        on_tight,
        on_loose,
        on_cell1,
        unitor,
        compositor,
    })
}

/// The loose monad in `X^A` carried by a lax functor `A -> X`: the endo is
/// the graph part, the unit is the unitor family, the multiplication is
/// the compositor family.
pub fn lax_to_monad(exp: &ExpVdc, lax: &LaxFunctorData) -> Result<Monad> {
    let carrier = FinFunctor {
        on_ob: lax.on_ob.clone(),
        on_mor: lax.on_tight.clone(),
    }
    .ident();
    let endo = GraphMorphism {
        src_f: carrier.clone(),
        tgt_f: carrier.clone(),
        on_loose: lax.on_loose.clone(),
        on_cell: lax.on_cell1.clone(),
    }
    .ident();
    let id_nat = exp.tight().identity(&carrier)?;
    let mut unit_family: Family = BTreeMap::new();
    for (a, u) in &lax.unitor {
        unit_family.insert(vec![a.clone()], u.clone());
    }
    let unit = Cell {
        frame: Frame::new(vec![], id_nat.clone(), id_nat.clone(), endo.clone()),
        id: family_ident(&unit_family),
    };
    let mut mult_family: Family = BTreeMap::new();
    for ((p, q), mu) in &lax.compositor {
        mult_family.insert(vec![p.clone(), q.clone()], mu.clone());
    }
    let mult = Cell {
        frame: Frame::new(
            vec![endo.clone(), endo.clone()],
            id_nat.clone(),
            id_nat,
            endo.clone(),
        ),
        id: family_ident(&mult_family),
    };
    Ok(Monad {
        carrier,
        endo,
        mult,
        unit,
    })
}

/// Read lax functor data back off a loose monad in the exponential.
pub fn monad_to_lax(exp: &ExpVdc, monad: &Monad) -> Result<LaxFunctorData> {
    let f = exp.functor(&monad.carrier)?;
    let gm = exp.graph(&monad.endo)?;
    let unit_family = exp.family_of(&monad.unit)?;
    let mult_family = exp.family_of(&monad.mult)?;
    let mut unitor = BTreeMap::new();
    for (k, v) in &unit_family {
        unitor.insert(k[0].clone(), v.clone());
    }
    let mut compositor = BTreeMap::new();
    for (k, v) in &mult_family {
        compositor.insert((k[0].clone(), k[1].clone()), v.clone());
    }
    Ok(LaxFunctorData {
        on_ob: f.on_ob.clone(),
        on_tight: f.on_mor.clone(),
        on_loose: gm.on_loose.clone(),
        on_cell1: gm.on_cell.clone(),
        unitor,
        compositor,
    })
}

/// Exhaustive, direct enumeration of lax functors `A -> X`, slot by slot
/// with the unit laws used to prune compositor candidates early.
pub fn enumerate_lax_functors(
    pdc: &Arc<PdcPresentation>,
    x: &VdcHandle,
    ceiling: usize,
) -> Result<Vec<LaxFunctorData>> {
    let mut out = Vec::new();
    let f0s = crate::fincat::all_functors(&pdc.tight, x.tight(), ceiling)?;
    let mut examined = 0usize;
    for f0 in f0s {
        // graph parts
        let mut loose_maps: Vec<BTreeMap<Ident, Ident>> = vec![BTreeMap::new()];
        for q in &pdc.cellcat.objects {
            let srcx = &f0.on_ob[&pdc.s.on_ob[q]];
            let tgtx = &f0.on_ob[&pdc.t.on_ob[q]];
            let candidates: Vec<Ident> = x
                .looses()
                .iter()
                .filter(|l| &l.src == srcx && &l.tgt == tgtx)
                .map(|l| l.id.clone())
                .collect();
            let mut next = Vec::new();
            for m in &loose_maps {
                for c in &candidates {
                    examined += 1;
                    if examined > ceiling {
                        return Err(VdcError::SizeExceeded("lax functor space".into()));
                    }
                    let mut m2 = m.clone();
                    m2.insert(q.clone(), c.clone());
                    next.push(m2);
                }
            }
            loose_maps = next;
        }
        for on_loose in loose_maps {
            // cell images (forced for identities)
            let mut cell_maps: Vec<BTreeMap<Ident, Cell>> = vec![BTreeMap::new()];
            let mut dead = false;
            for m in &pdc.cellcat.morphisms {
                let frame = Frame::new(
                    vec![on_loose[&m.src].clone()],
                    f0.on_mor[&pdc.t.on_mor[&m.id]].clone(),
                    f0.on_mor[&pdc.s.on_mor[&m.id]].clone(),
                    on_loose[&m.tgt].clone(),
                );
                let candidates: Vec<Cell> = if pdc.cellcat.is_identity(&m.id) {
                    match x.identity_cell(&on_loose[&m.src]) {
                        Ok(c) => vec![c],
                        Err(_) => {
                            dead = true;
                            break;
                        }
                    }
                } else {
                    match x.cells(&frame) {
                        Ok(cs) => cs
                            .into_iter()
                            .map(|id| Cell {
                                frame: frame.clone(),
                                id,
                            })
                            .collect(),
                        Err(_) => {
                            dead = true;
                            break;
                        }
                    }
                };
                let mut next = Vec::new();
                for cm in &cell_maps {
                    for c in &candidates {
                        examined += 1;
                        if examined > ceiling {
                            return Err(VdcError::SizeExceeded("lax functor space".into()));
                        }
                        let mut cm2 = cm.clone();
                        cm2.insert(m.id.clone(), c.clone());
                        next.push(cm2);
                    }
                }
                cell_maps = next;
                if cell_maps.is_empty() {
                    dead = true;
                    break;
                }
            }
            if dead {
                continue;
            }
            for on_cell1 in cell_maps {
                // unitors first: cheap, and they pin the compositors
                let mut unitor_maps: Vec<BTreeMap<Ident, Cell>> = vec![BTreeMap::new()];
                let mut dead2 = false;
                for a in &pdc.tight.objects {
                    let i_a = pdc.unit_loose(a).unwrap().clone();
                    let frame = (|| -> Result<Frame> {
                        let ia = x.tight().identity(&f0.on_ob[a])?;
                        Ok(Frame::new(vec![], ia.clone(), ia, on_loose[&i_a].clone()))
                    })();
                    let candidates: Vec<Cell> = match frame.and_then(|fr| {
                        Ok(x.cells(&fr)?
                            .into_iter()
                            .map(|id| Cell {
                                frame: fr.clone(),
                                id,
                            })
                            .collect())
                    }) {
                        Ok(cs) => cs,
                        Err(_) => {
                            dead2 = true;
                            break;
                        }
                    };
                    let mut next = Vec::new();
                    for um in &unitor_maps {
                        for c in &candidates {
                            let mut u2 = um.clone();
                            u2.insert(a.clone(), c.clone());
                            next.push(u2);
                        }
                    }
                    unitor_maps = next;
                    if unitor_maps.is_empty() {
                        dead2 = true;
                        break;
                    }
                }
                if dead2 {
                    continue;
                }
                for unitor in unitor_maps {
                    // compositor slots, pruned by the unit coherence laws
                    let mut comp_maps: Vec<BTreeMap<(Ident, Ident), Cell>> =
                        vec![BTreeMap::new()];
                    let mut dead3 = false;
                    for (p, q) in pdc.composable_pairs() {
                        let res = (|| -> Result<Vec<Cell>> {
                            let pq = pdc.hcomp(&p, &q)?;
                            let it = x.tight().identity(&f0.on_ob[&pdc.t.on_ob[&p]])?;
                            let is = x.tight().identity(&f0.on_ob[&pdc.s.on_ob[&q]])?;
                            let frame = Frame::new(
                                vec![on_loose[&p].clone(), on_loose[&q].clone()],
                                it,
                                is,
                                on_loose[&pq].clone(),
                            );
                            let mut cands = Vec::new();
                            'cand: for id in x.cells(&frame)? {
                                let c = Cell {
                                    frame: frame.clone(),
                                    id,
                                };
                                examined += 1;
                                if examined > ceiling {
                                    return Err(VdcError::SizeExceeded(
                                        "lax functor space".into(),
                                    ));
                                }
                                // left unit law when p is the unit at tgt q
                                if &p == pdc.unit_loose(&pdc.t.on_ob[&q])? {
                                    let idq = x.identity_cell(&on_loose[&q])?;
                                    let l = x.compose(
                                        &[unitor[&pdc.t.on_ob[&q]].clone(), idq.clone()],
                                        &c,
                                    )?;
                                    let l = x.compose(&[l], &on_cell1[&pdc.lunit[&q]])?;
                                    if l != idq {
                                        continue 'cand;
                                    }
                                }
                                // right unit law when q is the unit at src p
                                if &q == pdc.unit_loose(&pdc.s.on_ob[&p])? {
                                    let idp = x.identity_cell(&on_loose[&p])?;
                                    let r = x.compose(
                                        &[idp.clone(), unitor[&pdc.s.on_ob[&p]].clone()],
                                        &c,
                                    )?;
                                    let r = x.compose(&[r], &on_cell1[&pdc.runit[&p]])?;
                                    if r != idp {
                                        continue 'cand;
                                    }
                                }
                                cands.push(c);
                            }
                            Ok(cands)
                        })();
                        let candidates = match res {
                            Ok(cs) => cs,
                            Err(VdcError::SizeExceeded(e)) => {
                                return Err(VdcError::SizeExceeded(e))
                            }
                            Err(_) => {
                                dead3 = true;
                                break;
                            }
                        };
                        let mut next = Vec::new();
                        for cm in &comp_maps {
                            for c in &candidates {
                                let mut c2 = cm.clone();
                                c2.insert((p.clone(), q.clone()), c.clone());
                                next.push(c2);
                            }
                        }
                        comp_maps = next;
                        if comp_maps.is_empty() {
                            dead3 = true;
                            break;
                        }
                    }
                    if dead3 {
                        continue;
                    }
                    for compositor in comp_maps {
                        let data = LaxFunctorData {
                            on_ob: f0.on_ob.clone(),
                            on_tight: f0.on_mor.clone(),
                            on_loose: on_loose.clone(),
                            on_cell1: on_cell1.clone(),
                            unitor: unitor.clone(),
                            compositor,
                        };
                        if data.violations(pdc, x.as_ref()).is_empty() {
                            out.push(data);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Module data between two lax functors in the style of componentwise
/// families: a graph part, a left action per composable pair, a right
/// action per composable pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PareModule {
    pub on_loose: BTreeMap<Ident, Ident>,
    pub on_cell1: BTreeMap<Ident, Cell>,
    pub lact: BTreeMap<(Ident, Ident), Cell>,
    pub ract: BTreeMap<(Ident, Ident), Cell>,
}

/// The tagged axiom violations of module data between lax functors
/// `t` (acting on the left) and `s` (acting on the right).
pub fn pare_module_violations(
    pdc: &PdcPresentation,
    x: &dyn Vdc,
    t: &LaxFunctorData,
    s: &LaxFunctorData,
    m: &PareModule,
) -> Vec<String> {
    let mut out = Vec::new();
    // (M1 & M2): graph morphism data
    for q in &pdc.cellcat.objects {
        match m.on_loose.get(q) {
            None => out.push(format!("M1: no carrier loose at {q}")),
            Some(lq) => match crate::vdc::loose_data(x, lq) {
                Err(_) => out.push(format!("M1: dangling carrier at {q}")),
                Ok(ld) => {
                    if s.on_ob.get(&pdc.s.on_ob[q]) != Some(&ld.src)
                        || t.on_ob.get(&pdc.t.on_ob[q]) != Some(&ld.tgt)
                    {
                        out.push(format!("M2: carrier at {q} has wrong endpoints"));
                    }
                }
            },
        }
    }
    for cm in &pdc.cellcat.morphisms {
        match m.on_cell1.get(&cm.id) {
            None => out.push(format!("M2: no carrier cell at {}", cm.id)),
            Some(c) => {
                let want = Frame::new(
                    vec![m.on_loose[&cm.src].clone()],
                    t.on_tight[&pdc.t.on_mor[&cm.id]].clone(),
                    s.on_tight[&pdc.s.on_mor[&cm.id]].clone(),
                    m.on_loose[&cm.tgt].clone(),
                );
                if want != c.frame || !x.has_cell(c).unwrap_or(false) {
                    out.push(format!("M2: carrier cell at {} has wrong frame", cm.id));
                }
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    // (M3): action data shapes
    for (p, q) in pdc.composable_pairs() {
        let pq = pdc.hcomp(&p, &q).unwrap();
        let want_l = Frame::new(
            vec![t.on_loose[&p].clone(), m.on_loose[&q].clone()],
            x.tight().identity(&t.on_ob[&pdc.t.on_ob[&p]]).unwrap(),
            x.tight().identity(&s.on_ob[&pdc.s.on_ob[&q]]).unwrap(),
            m.on_loose[&pq].clone(),
        );
        match m.lact.get(&(p.clone(), q.clone())) {
            None => out.push(format!("M3: missing left action at ({p}, {q})")),
            Some(c) => {
                if c.frame != want_l || !x.has_cell(c).unwrap_or(false) {
                    out.push(format!("M3: left action at ({p}, {q}) has wrong frame"));
                }
            }
        }
        let want_r = Frame::new(
            vec![m.on_loose[&p].clone(), s.on_loose[&q].clone()],
            x.tight().identity(&t.on_ob[&pdc.t.on_ob[&p]]).unwrap(),
            x.tight().identity(&s.on_ob[&pdc.s.on_ob[&q]]).unwrap(),
            m.on_loose[&pq].clone(),
        );
        match m.ract.get(&(p.clone(), q.clone())) {
            None => out.push(format!("M3: missing right action at ({p}, {q})")),
            Some(c) => {
                if c.frame != want_r || !x.has_cell(c).unwrap_or(false) {
                    out.push(format!("M3: right action at ({p}, {q}) has wrong frame"));
                }
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    // (M4): functoriality of the graph part
    for q in &pdc.cellcat.objects {
        if m.on_cell1.get(&pdc.cellcat.id_of[q]) != x.identity_cell(&m.on_loose[q]).ok().as_ref()
        {
            out.push(format!("M4: identity not preserved at {q}"));
        }
    }
    for ((m1, m2), m12) in &pdc.cellcat.comp {
        let lhs = x.compose(&[m.on_cell1[m1].clone()], &m.on_cell1[m2]).ok();
        if lhs.as_ref() != Some(&m.on_cell1[m12]) {
            out.push(format!("M4: composite ({m1}, {m2}) not preserved"));
        }
    }
    // (M5): naturality of the actions
    for u in &pdc.cellcat.morphisms {
        for v in &pdc.cellcat.morphisms {
            if pdc.s.on_ob[&u.src] != pdc.t.on_ob[&v.src]
                || pdc.s.on_ob[&u.tgt] != pdc.t.on_ob[&v.tgt]
                || pdc.s.on_mor[&u.id] != pdc.t.on_mor[&v.id]
            {
                continue;
            }
            let folded = pdc.hcomp_cells(&u.id, &v.id).unwrap();
            let l_lhs = x
                .compose(
                    &[t.on_cell1[&u.id].clone(), m.on_cell1[&v.id].clone()],
                    &m.lact[&(u.tgt.clone(), v.tgt.clone())],
                )
                .ok();
            let l_rhs = x
                .compose(
                    &[m.lact[&(u.src.clone(), v.src.clone())].clone()],
                    &m.on_cell1[&folded],
                )
                .ok();
            if l_lhs.is_none() || l_lhs != l_rhs {
                out.push(format!("M5: left action naturality at ({}, {})", u.id, v.id));
            }
            let r_lhs = x
                .compose(
                    &[m.on_cell1[&u.id].clone(), s.on_cell1[&v.id].clone()],
                    &m.ract[&(u.tgt.clone(), v.tgt.clone())],
                )
                .ok();
            let r_rhs = x
                .compose(
                    &[m.ract[&(u.src.clone(), v.src.clone())].clone()],
                    &m.on_cell1[&folded],
                )
                .ok();
            if r_lhs.is_none() || r_lhs != r_rhs {
                out.push(format!(
                    "M5: right action naturality at ({}, {})",
                    u.id, v.id
                ));
            }
        }
    }
    // (M6): compatibility with multiplication and of the two actions
    for (p, q) in pdc.composable_pairs() {
        for r in &pdc.cellcat.objects {
            if pdc.s.on_ob[&q] != pdc.t.on_ob[r] {
                continue;
            }
            let pq = pdc.hcomp(&p, &q).unwrap();
            let qr = pdc.hcomp(&q, r).unwrap();
            let assoc = &pdc.assoc[&(p.clone(), q.clone(), r.clone())];
            // left action vs compositor of t
            let res = (|| -> Result<bool> {
                let idr = x.identity_cell(&m.on_loose[r])?;
                let idp = x.identity_cell(&t.on_loose[&p])?;
                let one = x.compose(
                    &[t.compositor[&(p.clone(), q.clone())].clone(), idr],
                    &m.lact[&(pq.clone(), r.clone())],
                )?;
                let one = x.compose(&[one], &m.on_cell1[assoc])?;
                let two = x.compose(
                    &[idp, m.lact[&(q.clone(), r.clone())].clone()],
                    &m.lact[&(p.clone(), qr.clone())],
                )?;
                Ok(one == two)
            })();
            if !matches!(res, Ok(true)) {
                out.push(format!("M6: left action vs mult at ({p}, {q}, {r})"));
            }
            // right action vs compositor of s
            let res = (|| -> Result<bool> {
                let idp = x.identity_cell(&m.on_loose[&p])?;
                let idq = x.identity_cell(&s.on_loose[&q])?;
                let one = x.compose(
                    &[m.ract[&(p.clone(), q.clone())].clone(), idq.clone()],
                    &m.ract[&(pq.clone(), r.clone())],
                )?;
                let _ = idq;
                let one = x.compose(&[one], &m.on_cell1[assoc])?;
                let two = x.compose(
                    &[idp, s.compositor[&(q.clone(), r.clone())].clone()],
                    &m.ract[&(p.clone(), qr.clone())],
                )?;
                Ok(one == two)
            })();
            if !matches!(res, Ok(true)) {
                out.push(format!("M6: right action vs mult at ({p}, {q}, {r})"));
            }
            // the two actions commute
            let res = (|| -> Result<bool> {
                let idr = x.identity_cell(&s.on_loose[r])?;
                let idp = x.identity_cell(&t.on_loose[&p])?;
                let one = x.compose(
                    &[m.lact[&(p.clone(), q.clone())].clone(), idr],
                    &m.ract[&(pq.clone(), r.clone())],
                )?;
                let one = x.compose(&[one], &m.on_cell1[assoc])?;
                let two = x.compose(
                    &[idp, m.ract[&(q.clone(), r.clone())].clone()],
                    &m.lact[&(p.clone(), qr.clone())],
                )?;
                Ok(one == two)
            })();
            if !matches!(res, Ok(true)) {
                out.push(format!("M6: actions commute at ({p}, {q}, {r})"));
            }
        }
    }
    // (M7): unit compatibility
    for q in &pdc.cellcat.objects {
        let res = (|| -> Result<bool> {
            let tq = pdc.loose_tgt(q)?.clone();
            let sq = pdc.loose_src(q)?.clone();
            let itq = pdc.unit_loose(&tq)?.clone();
            let isq = pdc.unit_loose(&sq)?.clone();
            let idq = x.identity_cell(&m.on_loose[q])?;
            let l = x.compose(
                &[t.unitor[&tq].clone(), idq.clone()],
                &m.lact[&(itq, q.clone())],
            )?;
            let l = x.compose(&[l], &m.on_cell1[&pdc.lunit[q]])?;
            let r = x.compose(
                &[idq.clone(), s.unitor[&sq].clone()],
                &m.ract[&(q.clone(), isq)],
            )?;
            let r = x.compose(&[r], &m.on_cell1[&pdc.runit[q]])?;
            Ok(l == idq && r == idq)
        })();
        if !matches!(res, Ok(true)) {
            out.push(format!("M7: unit compatibility at {q}"));
        }
    }
    out
}

/// Translate module data into a module in `Mod(X^A)`.
pub fn pare_to_module(
    exp: &ExpVdc,
    t_monad: &Monad,
    s_monad: &Monad,
    pm: &PareModule,
) -> Result<Module> {
    let t_gm = exp.graph(&t_monad.endo)?;
    let s_gm = exp.graph(&s_monad.endo)?;
    let carrier = GraphMorphism {
        src_f: s_gm.src_f.clone(),
        tgt_f: t_gm.tgt_f.clone(),
        on_loose: pm.on_loose.clone(),
        on_cell: pm.on_cell1.clone(),
    }
    .ident();
    let id_t = exp.tight().identity(&t_monad.carrier)?;
    let id_s = exp.tight().identity(&s_monad.carrier)?;
    let mut l_family: Family = BTreeMap::new();
    for ((p, q), c) in &pm.lact {
        l_family.insert(vec![p.clone(), q.clone()], c.clone());
    }
    let mut r_family: Family = BTreeMap::new();
    for ((p, q), c) in &pm.ract {
        r_family.insert(vec![p.clone(), q.clone()], c.clone());
    }
    Ok(Module {
        src_monad: s_monad.ident(),
        tgt_monad: t_monad.ident(),
        carrier: carrier.clone(),
        left_action: Cell {
            frame: Frame::new(
                vec![t_monad.endo.clone(), carrier.clone()],
                id_t.clone(),
                id_s.clone(),
                carrier.clone(),
            ),
            id: family_ident(&l_family),
        },
        right_action: Cell {
            frame: Frame::new(
                vec![carrier.clone(), s_monad.endo.clone()],
                id_t,
                id_s,
                carrier.clone(),
            ),
            id: family_ident(&r_family),
        },
    })
}

/// Read module data back off a module in `Mod(X^A)`.
pub fn module_to_pare(exp: &ExpVdc, m: &Module) -> Result<PareModule> {
    let gm = exp.graph(&m.carrier)?;
    let l_family = exp.family_of(&m.left_action)?;
    let r_family = exp.family_of(&m.right_action)?;
    let mut lact = BTreeMap::new();
    for (k, v) in &l_family {
        lact.insert((k[0].clone(), k[1].clone()), v.clone());
    }
    let mut ract = BTreeMap::new();
    for (k, v) in &r_family {
        ract.insert((k[0].clone(), k[1].clone()), v.clone());
    }
    Ok(PareModule {
        on_loose: gm.on_loose.clone(),
        on_cell1: gm.on_cell.clone(),
        lact,
        ract,
    })
}

/// Direct enumeration of module data between two lax functors, pruned by
/// the unit compatibility laws.
pub fn enumerate_pare_modules(
    pdc: &Arc<PdcPresentation>,
    x: &VdcHandle,
    t: &LaxFunctorData,
    s: &LaxFunctorData,
    ceiling: usize,
) -> Result<Vec<PareModule>> {
    let mut out = Vec::new();
    let mut examined = 0usize;
    // carrier graph parts
    let mut loose_maps: Vec<BTreeMap<Ident, Ident>> = vec![BTreeMap::new()];
    for q in &pdc.cellcat.objects {
        let srcx = &s.on_ob[&pdc.s.on_ob[q]];
        let tgtx = &t.on_ob[&pdc.t.on_ob[q]];
        let candidates: Vec<Ident> = x
            .looses()
            .iter()
            .filter(|l| &l.src == srcx && &l.tgt == tgtx)
            .map(|l| l.id.clone())
            .collect();
        let mut next = Vec::new();
        for m in &loose_maps {
            for c in &candidates {
                examined += 1;
                if examined > ceiling {
                    return Err(VdcError::SizeExceeded("module space".into()));
                }
                let mut m2 = m.clone();
                m2.insert(q.clone(), c.clone());
                next.push(m2);
            }
        }
        loose_maps = next;
    }
    for on_loose in loose_maps {
        let mut cell_maps: Vec<BTreeMap<Ident, Cell>> = vec![BTreeMap::new()];
        let mut dead = false;
        for cm in &pdc.cellcat.morphisms {
            let frame = Frame::new(
                vec![on_loose[&cm.src].clone()],
                t.on_tight[&pdc.t.on_mor[&cm.id]].clone(),
                s.on_tight[&pdc.s.on_mor[&cm.id]].clone(),
                on_loose[&cm.tgt].clone(),
            );
            let candidates: Vec<Cell> = if pdc.cellcat.is_identity(&cm.id) {
                match x.identity_cell(&on_loose[&cm.src]) {
                    Ok(c) => vec![c],
                    Err(_) => {
                        dead = true;
                        break;
                    }
                }
            } else {
                match x.cells(&frame) {
                    Ok(cs) => cs
                        .into_iter()
                        .map(|id| Cell {
                            frame: frame.clone(),
                            id,
                        })
                        .collect(),
                    Err(_) => {
                        dead = true;
                        break;
                    }
                }
            };
            let mut next = Vec::new();
            for cmap in &cell_maps {
                for c in &candidates {
                    examined += 1;
                    if examined > ceiling {
                        return Err(VdcError::SizeExceeded("module space".into()));
                    }
                    let mut cm2 = cmap.clone();
                    cm2.insert(cm.id.clone(), c.clone());
                    next.push(cm2);
                }
            }
            cell_maps = next;
            if cell_maps.is_empty() {
                dead = true;
                break;
            }
        }
        if dead {
            continue;
        }
        for on_cell1 in cell_maps {
            // left actions, unit-pruned slotwise
            let pairs = pdc.composable_pairs();
            let mut l_maps: Vec<BTreeMap<(Ident, Ident), Cell>> = vec![BTreeMap::new()];
            let mut dead2 = false;
            for (p, q) in &pairs {
                let res = (|| -> Result<Vec<Cell>> {
                    let pq = pdc.hcomp(p, q)?;
                    let frame = Frame::new(
                        vec![t.on_loose[p].clone(), on_loose[q].clone()],
                        x.tight().identity(&t.on_ob[&pdc.t.on_ob[p]])?,
                        x.tight().identity(&s.on_ob[&pdc.s.on_ob[q]])?,
                        on_loose[&pq].clone(),
                    );
                    let mut cands = Vec::new();
                    for id in x.cells(&frame)? {
                        let c = Cell {
                            frame: frame.clone(),
                            id,
                        };
                        if p == pdc.unit_loose(&pdc.t.on_ob[q])? {
                            let idq = x.identity_cell(&on_loose[q])?;
                            let l = x.compose(
                                &[t.unitor[&pdc.t.on_ob[q]].clone(), idq.clone()],
                                &c,
                            )?;
                            let l = x.compose(&[l], &on_cell1[&pdc.lunit[q]])?;
                            if l != idq {
                                continue;
                            }
                        }
                        cands.push(c);
                    }
                    Ok(cands)
                })();
                let candidates = match res {
                    Ok(cs) => cs,
                    Err(_) => {
                        dead2 = true;
                        break;
                    }
                };
                let mut next = Vec::new();
                for lm in &l_maps {
                    for c in &candidates {
                        examined += 1;
                        if examined > ceiling {
                            return Err(VdcError::SizeExceeded("module space".into()));
                        }
                        let mut l2 = lm.clone();
                        l2.insert((p.clone(), q.clone()), c.clone());
                        next.push(l2);
                    }
                }
                l_maps = next;
                if l_maps.is_empty() {
                    dead2 = true;
                    break;
                }
            }
            if dead2 {
                continue;
            }
            // right actions, unit-pruned slotwise
            let mut r_maps: Vec<BTreeMap<(Ident, Ident), Cell>> = vec![BTreeMap::new()];
            let mut dead3 = false;
            for (p, q) in &pairs {
                let res = (|| -> Result<Vec<Cell>> {
                    let pq = pdc.hcomp(p, q)?;
                    let frame = Frame::new(
                        vec![on_loose[p].clone(), s.on_loose[q].clone()],
                        x.tight().identity(&t.on_ob[&pdc.t.on_ob[p]])?,
                        x.tight().identity(&s.on_ob[&pdc.s.on_ob[q]])?,
                        on_loose[&pq].clone(),
                    );
                    let mut cands = Vec::new();
                    for id in x.cells(&frame)? {
                        let c = Cell {
                            frame: frame.clone(),
                            id,
                        };
                        if q == pdc.unit_loose(&pdc.s.on_ob[p])? {
                            let idp = x.identity_cell(&on_loose[p])?;
                            let r = x.compose(
                                &[idp.clone(), s.unitor[&pdc.s.on_ob[p]].clone()],
                                &c,
                            )?;
                            let r = x.compose(&[r], &on_cell1[&pdc.runit[p]])?;
                            if r != idp {
                                continue;
                            }
                        }
                        cands.push(c);
                    }
                    Ok(cands)
                })();
                let candidates = match res {
                    Ok(cs) => cs,
                    Err(_) => {
                        dead3 = true;
                        break;
                    }
                };
                let mut next = Vec::new();
                for rm in &r_maps {
                    for c in &candidates {
                        examined += 1;
                        if examined > ceiling {
                            return Err(VdcError::SizeExceeded("module space".into()));
                        }
                        let mut r2 = rm.clone();
                        r2.insert((p.clone(), q.clone()), c.clone());
                        next.push(r2);
                    }
                }
                r_maps = next;
                if r_maps.is_empty() {
                    dead3 = true;
                    break;
                }
            }
            if dead3 {
                continue;
            }
            for lact in &l_maps {
                for ract in &r_maps {
                    let pm = PareModule {
                        on_loose: on_loose.clone(),
                        on_cell1: on_cell1.clone(),
                        lact: lact.clone(),
                        ract: ract.clone(),
                    };
                    if pare_module_violations(pdc, x.as_ref(), t, s, &pm).is_empty() {
                        out.push(pm);
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponential::exponential;
    use crate::fixtures;

    #[test]
    fn lax_functors_terminal_to_span1_are_the_small_monoids() {
        // lax functors 1 -> span(1) are monoid structures on sets of size
        // at most one: exactly the trivial monoid, plus the empty carrier
        let pdc = Arc::new(fixtures::terminal_presentation());
        let s = fixtures::span_fixture(1);
        let lax = enumerate_lax_functors(&pdc, &s.vdc, 100_000).unwrap();
        assert_eq!(lax.len(), 2);
    }

    #[test]
    fn lax_to_monad_round_trip() {
        let pdc = Arc::new(fixtures::terminal_presentation());
        let s = fixtures::span_fixture(1);
        let exp = exponential(s.vdc.clone(), pdc.clone(), 100_000).unwrap();
        for lax in enumerate_lax_functors(&pdc, &s.vdc, 100_000).unwrap() {
            let monad = lax_to_monad(&exp, &lax).unwrap();
            assert!(
                crate::constructions::monads::monad_violations(exp.as_ref(), &monad).is_empty()
            );
            let back = monad_to_lax(&exp, &monad).unwrap();
            assert_eq!(back, lax);
        }
    }

    #[test]
    fn lax_as_fun_is_a_functor() {
        let pdc = Arc::new(fixtures::walking_loose_presentation());
        let dom = fixtures::wlm_induced().unwrap();
        let s = fixtures::span_fixture(1);
        let lax = enumerate_lax_functors(&pdc, &s.vdc, 1_000_000).unwrap();
        assert!(!lax.is_empty());
        for data in lax.iter().take(3) {
            let f = LaxAsFun {
                data: data.clone(),
                pdc: pdc.clone(),
                dom: dom.vdc.clone(),
                cod: s.vdc.clone(),
            };
            let v = crate::functor::functor_violations(&f, 2, 5_000);
            assert!(v.is_empty(), "{v:?}");
        }
    }
}
