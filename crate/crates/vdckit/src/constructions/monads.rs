//! Loose monads, monad morphisms, modules, and the Mod construction.
//!
//! `Mod(X)` has loose monads in `X` as objects, monad morphisms as tight
//! morphisms, modules as loose morphisms, and equivariant cells of `X` as
//! cells. It is normal: the loose identity on a monad is the monad acting
//! on itself.

use crate::error::{Result, VdcError};
use crate::fincat::{FinCat, MorData};
use crate::ident::{tagged, Ident};
use crate::vdc::{
    check_frame, loose_data, pasted_frame, AritySupport, Cell, Frame, Loose, NormalStructure,
    NormalVdc, Vdc, VdcHandle,
};
use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monad {
    pub carrier: Ident,
    pub endo: Ident,
    pub mult: Cell,
    pub unit: Cell,
}

impl Monad {
    pub fn ident(&self) -> Ident {
        tagged(
            "mnd",
            vec![
                self.carrier.clone(),
                self.endo.clone(),
                self.mult.id.clone(),
                self.unit.id.clone(),
            ],
        )
    }

    /// The n-fold multiplication cell `T, ..., T => T` (left-nested).
    pub fn mult_n(&self, base: &dyn Vdc, n: usize) -> Result<Cell> {
        match n {
            0 => Ok(self.unit.clone()),
            1 => base.identity_cell(&self.endo),
            _ => {
                let prev = self.mult_n(base, n - 1)?;
                let idt = base.identity_cell(&self.endo)?;
                base.compose(&[prev, idt], &self.mult)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonadMorphism {
    pub src: Ident,
    pub tgt: Ident,
    pub tight: Ident,
    pub cell: Cell,
}

impl MonadMorphism {
    pub fn ident(&self) -> Ident {
        tagged("mm", vec![self.tight.clone(), self.cell.id.clone()])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module {
    /// Monad at the module's source (acting on the right).
    pub src_monad: Ident,
    /// Monad at the module's target (acting on the left).
    pub tgt_monad: Ident,
    pub carrier: Ident,
    pub left_action: Cell,
    pub right_action: Cell,
}

impl Module {
    pub fn ident(&self) -> Ident {
        tagged(
            "mod",
            vec![
                self.tgt_monad.clone(),
                self.src_monad.clone(),
                self.carrier.clone(),
                self.left_action.id.clone(),
                self.right_action.id.clone(),
            ],
        )
    }
}

/// Check the three monad equations; returns the violated equation names.
pub fn monad_violations(base: &dyn Vdc, m: &Monad) -> Vec<String> {
    let mut out = Vec::new();
    let run = |r: Result<Cell>| r.ok();
    let idt = match base.identity_cell(&m.endo) {
        Ok(c) => c,
        Err(e) => return vec![format!("endo identity: {e}")],
    };
    let lhs = run(base.compose(&[m.mult.clone(), idt.clone()], &m.mult));
    let rhs = run(base.compose(&[idt.clone(), m.mult.clone()], &m.mult));
    if lhs.is_none() || lhs != rhs {
        out.push("monad-assoc".into());
    }
    if run(base.compose(&[m.unit.clone(), idt.clone()], &m.mult)) != Some(idt.clone()) {
        out.push("monad-left-unit".into());
    }
    if run(base.compose(&[idt.clone(), m.unit.clone()], &m.mult)) != Some(idt) {
        out.push("monad-right-unit".into());
    }
    out
}

/// Check the two monad morphism equations (multiplication and unit
/// compatibility). The unit law whiskers the target's unit along the tight
/// morphism and so needs nullary restriction in the base.
pub fn monad_morphism_violations(
    base: &dyn Vdc,
    src: &Monad,
    tgt: &Monad,
    tight: &Ident,
    cell: &Cell,
) -> Vec<String> {
    let mut out = Vec::new();
    let lhs = base
        .compose(&[src.mult.clone()], cell)
        .ok();
    let rhs = base
        .compose(&[cell.clone(), cell.clone()], &tgt.mult)
        .ok();
    if lhs.is_none() || lhs != rhs {
        out.push("mm-mult".into());
    }
    let lhs_u = base.compose(&[src.unit.clone()], cell).ok();
    match base.restrict_nullary(&tgt.unit, tight) {
        Some(ru) => {
            if lhs_u != Some(ru) {
                out.push("mm-unit".into());
            }
        }
        None => out.push("mm-unit-unsupported-restriction".into()),
    }
    out
}

/// Check the five module equations.
pub fn module_violations(base: &dyn Vdc, tgt: &Monad, src: &Monad, m: &Module) -> Vec<String> {
    let mut out = Vec::new();
    let Ok(idm) = base.identity_cell(&m.carrier) else {
        return vec!["module carrier identity".into()];
    };
    let Ok(idt) = base.identity_cell(&tgt.endo) else {
        return vec!["target endo identity".into()];
    };
    let Ok(ids) = base.identity_cell(&src.endo) else {
        return vec!["source endo identity".into()];
    };
    let l = &m.left_action;
    let r = &m.right_action;
    let run = |x: Result<Cell>| x.ok();
    if run(base.compose(&[tgt.mult.clone(), idm.clone()], l))
        != run(base.compose(&[idt.clone(), l.clone()], l))
    {
        out.push("module-left-assoc".into());
    }
    if run(base.compose(&[tgt.unit.clone(), idm.clone()], l)) != Some(idm.clone()) {
        out.push("module-left-unit".into());
    }
    if run(base.compose(&[idm.clone(), src.mult.clone()], r))
        != run(base.compose(&[r.clone(), ids.clone()], r))
    {
        out.push("module-right-assoc".into());
    }
    if run(base.compose(&[idm.clone(), src.unit.clone()], r)) != Some(idm.clone()) {
        out.push("module-right-unit".into());
    }
    if run(base.compose(&[l.clone(), ids.clone()], r))
        != run(base.compose(&[idt.clone(), r.clone()], l))
    {
        out.push("module-action-commute".into());
    }
    out
}

/// Equivariance of an underlying cell as a cell of `Mod(X)`, per the
/// number of module slots in its frame.
pub fn equivariance_violations(
    base: &dyn Vdc,
    chain: &[Module],
    left: &MonadMorphism,
    right: &MonadMorphism,
    cod: &Module,
    monads: &BTreeMap<Ident, Monad>,
    cell: &Cell,
) -> Vec<String> {
    let mut out = Vec::new();
    let run = |x: Result<Cell>| x.ok();
    let n = chain.len();
    if n == 0 {
        // (f, phi) . lambda = (phi, f') . rho
        let lhs = run(base.compose(
            &[left.cell.clone(), cell.clone()],
            &cod.left_action,
        ));
        let rhs = run(base.compose(
            &[cell.clone(), right.cell.clone()],
            &cod.right_action,
        ));
        if lhs.is_none() || lhs != rhs {
            out.push("equivariance-nullary".into());
        }
        return out;
    }
    let ids: Vec<Cell> = match chain
        .iter()
        .map(|m| base.identity_cell(&m.carrier))
        .collect::<Result<Vec<_>>>()
    {
        Ok(v) => v,
        Err(e) => return vec![format!("chain identities: {e}")],
    };
    // left action compatibility
    {
        let mut inner = ids.clone();
        inner[0] = chain[0].left_action.clone();
        let lhs = run(base.compose(&inner, cell));
        let rhs = run(base.compose(
            &[left.cell.clone(), cell.clone()],
            &cod.left_action,
        ));
        if lhs.is_none() || lhs != rhs {
            out.push("equivariance-left".into());
        }
    }
    // right action compatibility
    {
        let mut inner = ids.clone();
        inner[n - 1] = chain[n - 1].right_action.clone();
        let lhs = run(base.compose(&inner, cell));
        let rhs = run(base.compose(
            &[cell.clone(), right.cell.clone()],
            &cod.right_action,
        ));
        if lhs.is_none() || lhs != rhs {
            out.push("equivariance-right".into());
        }
    }
    // inner action compatibility
    for i in 0..n - 1 {
        let _ = monads;
        let mut inner_l = ids.clone();
        inner_l[i + 1] = chain[i + 1].left_action.clone();
        let mut inner_r = ids.clone();
        inner_r[i] = chain[i].right_action.clone();
        let lhs = run(base.compose(&inner_l, cell));
        let rhs = run(base.compose(&inner_r, cell));
        if lhs.is_none() || lhs != rhs {
            out.push(format!("equivariance-inner-{i}"));
        }
    }
    out
}

pub struct ModVdc {
    pub base: VdcHandle,
    pub monads: BTreeMap<Ident, Monad>,
    pub morphisms: BTreeMap<Ident, MonadMorphism>,
    tight: FinCat,
    modules: OnceLock<BTreeMap<Ident, Module>>,
    looses: OnceLock<Vec<Loose>>,
    cell_cache: std::sync::Mutex<BTreeMap<Frame, Vec<Ident>>>,
}

impl ModVdc {
    pub fn new(base: VdcHandle) -> Result<Arc<ModVdc>> {
        if let AritySupport::UpTo(k) = base.arity_support() {
            return Err(VdcError::UnsupportedArity {
                requested: k + 1,
                supported: k,
            });
        }
        let monads = enumerate_monads(base.as_ref())?;
        let mut morphisms = BTreeMap::new();
        let mut mors = Vec::new();
        let mut id_of = BTreeMap::new();
        for (sid, s) in &monads {
            for (tid, t) in &monads {
                for f in base.tight().hom(&s.carrier, &t.carrier) {
                    let frame = Frame::new(
                        vec![s.endo.clone()],
                        f.clone(),
                        f.clone(),
                        t.endo.clone(),
                    );
                    let Ok(cells) = base.cells(&frame) else {
                        continue;
                    };
                    for c in cells {
                        let cell = Cell {
                            frame: frame.clone(),
                            id: c,
                        };
                        if monad_morphism_violations(base.as_ref(), s, t, &f, &cell).is_empty() {
                            let mm = MonadMorphism {
                                src: sid.clone(),
                                tgt: tid.clone(),
                                tight: f.clone(),
                                cell,
                            };
                            mors.push(MorData {
                                id: mm.ident(),
                                src: sid.clone(),
                                tgt: tid.clone(),
                            });
                            morphisms.insert(mm.ident(), mm);
                        }
                    }
                }
            }
        }
        for (tid, t) in &monads {
            let mm = MonadMorphism {
                src: tid.clone(),
                tgt: tid.clone(),
                tight: base.tight().identity(&t.carrier)?,
                cell: base.identity_cell(&t.endo)?,
            };
            id_of.insert(tid.clone(), mm.ident());
        }
        let mut comp = BTreeMap::new();
        for (fid, f) in &morphisms {
            for (gid, g) in &morphisms {
                if f.tgt != g.src {
                    continue;
                }
                let tight = base.tight().compose(&f.tight, &g.tight)?;
                let cell = base.compose(&[f.cell.clone()], &g.cell)?;
                let composite = MonadMorphism {
                    src: f.src.clone(),
                    tgt: g.tgt.clone(),
                    tight,
                    cell,
                };
                comp.insert((fid.clone(), gid.clone()), composite.ident());
            }
        }
        let tight = FinCat {
            objects: monads.keys().cloned().collect(),
            morphisms: mors,
            id_of,
            comp,
        };
        Ok(Arc::new(ModVdc {
            base,
            monads,
            morphisms,
            tight,
            modules: OnceLock::new(),
            looses: OnceLock::new(),
            cell_cache: std::sync::Mutex::new(BTreeMap::new()),
        }))
    }

    pub fn modules(&self) -> &BTreeMap<Ident, Module> {
        self.modules.get_or_init(|| {
            let mut out = BTreeMap::new();
            for (tid, t) in &self.monads {
                for (sid, s) in &self.monads {
                    for m in enumerate_modules(self.base.as_ref(), t, s).unwrap_or_default() {
                        let mut m = m;
                        m.tgt_monad = tid.clone();
                        m.src_monad = sid.clone();
                        out.insert(m.ident(), m);
                    }
                }
            }
            out
        })
    }

    pub fn monad(&self, id: &Ident) -> Result<&Monad> {
        self.monads
            .get(id)
            .ok_or_else(|| VdcError::UnknownObject(id.clone()))
    }

    pub fn monad_morphism(&self, id: &Ident) -> Result<&MonadMorphism> {
        self.morphisms
            .get(id)
            .ok_or_else(|| VdcError::UnknownTight(id.clone()))
    }

    pub fn module(&self, id: &Ident) -> Result<&Module> {
        self.modules()
            .get(id)
            .ok_or_else(|| VdcError::UnknownLoose(id.clone()))
    }

    /// The identity module of a monad: the monad acting on itself.
    pub fn identity_module(&self, monad: &Ident) -> Result<Module> {
        let t = self.monad(monad)?;
        Ok(Module {
            src_monad: monad.clone(),
            tgt_monad: monad.clone(),
            carrier: t.endo.clone(),
            left_action: t.mult.clone(),
            right_action: t.mult.clone(),
        })
    }

    fn underlying_frame(&self, frame: &Frame) -> Result<Frame> {
        Ok(Frame {
            chain: frame
                .chain
                .iter()
                .map(|m| self.module(m).map(|x| x.carrier.clone()))
                .collect::<Result<_>>()?,
            left: self.monad_morphism(&frame.left)?.tight.clone(),
            right: self.monad_morphism(&frame.right)?.tight.clone(),
            cod: self.module(&frame.cod)?.carrier.clone(),
        })
    }

    pub fn underlying_cell(&self, cell: &Cell) -> Result<Cell> {
        Ok(Cell {
            frame: self.underlying_frame(&cell.frame)?,
            id: cell.id.clone(),
        })
    }

    /// Build Mod(X) together with its normal structure.
    pub fn normal(self: &Arc<Self>) -> NormalVdc {
        let mut chosen_identity = BTreeMap::new();
        let mut chosen_nullary_opcart = BTreeMap::new();
        for (tid, t) in &self.monads {
            let idm = self.identity_module(tid).unwrap();
            chosen_identity.insert(tid.clone(), idm.ident());
            let id_mm = &self.tight.id_of[tid];
            chosen_nullary_opcart.insert(
                tid.clone(),
                Cell {
                    frame: Frame::new(vec![], id_mm.clone(), id_mm.clone(), idm.ident()),
                    id: t.unit.id.clone(),
                },
            );
        }
        NormalVdc {
            vdc: self.clone() as VdcHandle,
            normal: NormalStructure {
                chosen_identity,
                chosen_nullary_opcart,
            },
        }
    }
}

pub fn enumerate_monads(base: &dyn Vdc) -> Result<BTreeMap<Ident, Monad>> {
    if let Some(exp) = base.as_any().downcast_ref::<crate::exponential::ExpVdc>() {
        return enumerate_monads_exp(exp);
    }
    let mut out = BTreeMap::new();
    for a in &base.tight().objects {
        let ida = base.tight().identity(a)?;
        for endo in base.looses() {
            if &endo.src != a || &endo.tgt != a {
                continue;
            }
            let unit_frame = Frame::new(vec![], ida.clone(), ida.clone(), endo.id.clone());
            let units = base.cells(&unit_frame)?;
            if units.is_empty() {
                continue;
            }
            let mult_frame = Frame::new(
                vec![endo.id.clone(), endo.id.clone()],
                ida.clone(),
                ida.clone(),
                endo.id.clone(),
            );
            let mults = base.cells(&mult_frame)?;
            for mult in &mults {
                for unit in &units {
                    let m = Monad {
                        carrier: a.clone(),
                        endo: endo.id.clone(),
                        mult: Cell {
                            frame: mult_frame.clone(),
                            id: mult.clone(),
                        },
                        unit: Cell {
                            frame: unit_frame.clone(),
                            id: unit.clone(),
                        },
                    };
                    if monad_violations(base, &m).is_empty() {
                        out.insert(m.ident(), m);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Enumerate loose monads over an exponential base, gating endomorphisms
/// by the existence of a unit family and pruning multiplication slots by
/// the unit laws evaluated componentwise.
fn enumerate_monads_exp(exp: &crate::exponential::ExpVdc) -> Result<BTreeMap<Ident, Monad>> {
    use crate::exponential::family_ident;
    let mut out = BTreeMap::new();
    let pdc = &exp.pdc;
    for fi in exp.tight().objects.clone() {
        let id_nat = exp.tight().identity(&fi)?;
        for endo in exp.looses().to_vec() {
            if endo.src != fi || endo.tgt != fi {
                continue;
            }
            let unit_frame = Frame::new(vec![], id_nat.clone(), id_nat.clone(), endo.id.clone());
            let units = exp.cells(&unit_frame)?;
            if units.is_empty() {
                continue;
            }
            let mult_frame = Frame::new(
                vec![endo.id.clone(), endo.id.clone()],
                id_nat.clone(),
                id_nat.clone(),
                endo.id.clone(),
            );
            let slots = exp.slot_candidates(&mult_frame)?;
            let gm = exp.graph(&endo.id)?;
            for unit in &units {
                let unit_cell = Cell {
                    frame: unit_frame.clone(),
                    id: unit.clone(),
                };
                let unit_family = exp.family_of(&unit_cell)?;
                // per-slot unit-law pruning: the left law pins slots
                // (I_{tgt q}, q) and the right law pins (q, I_{src q})
                let mut families: Vec<crate::exponential::Family> = vec![BTreeMap::new()];
                let mut dead = false;
                for (key, candidates) in &slots {
                    let (q1, q2) = (&key[0], &key[1]);
                    let mut surviving = Vec::new();
                    'cand: for c in candidates {
                        if q1 == pdc.unit_loose(pdc.loose_tgt(q2)?)? {
                            let tq = pdc.loose_tgt(q2)?.clone();
                            let idq = exp.base.identity_cell(gm.loose_at(q2)?)?;
                            let pasted = exp
                                .base
                                .compose(&[unit_family[&vec![tq.clone()]].clone(), idq.clone()], c)?;
                            let blocked = crate::presentation::LTree::left_nested_trees(vec![
                                crate::presentation::LTree::Unit(tq.clone()),
                                crate::presentation::LTree::Leaf(q2.clone()),
                            ]);
                            let flat = crate::presentation::LTree::Leaf(q2.clone());
                            let r = pdc.rebracket(&blocked, &flat)?;
                            let lhs = if pdc.cellcat.is_identity(&r) {
                                pasted
                            } else {
                                exp.base.compose(&[pasted], gm.cell_at(&r)?)?
                            };
                            if lhs != idq {
                                continue 'cand;
                            }
                        }
                        if q2 == pdc.unit_loose(pdc.loose_src(q1)?)? {
                            let sq = pdc.loose_src(q1)?.clone();
                            let idq = exp.base.identity_cell(gm.loose_at(q1)?)?;
                            let pasted = exp
                                .base
                                .compose(&[idq.clone(), unit_family[&vec![sq.clone()]].clone()], c)?;
                            let blocked = crate::presentation::LTree::left_nested_trees(vec![
                                crate::presentation::LTree::Leaf(q1.clone()),
                                crate::presentation::LTree::Unit(sq.clone()),
                            ]);
                            let flat = crate::presentation::LTree::Leaf(q1.clone());
                            let r = pdc.rebracket(&blocked, &flat)?;
                            let lhs = if pdc.cellcat.is_identity(&r) {
                                pasted
                            } else {
                                exp.base.compose(&[pasted], gm.cell_at(&r)?)?
                            };
                            if lhs != idq {
                                continue 'cand;
                            }
                        }
                        surviving.push(c.clone());
                    }
                    if surviving.is_empty() {
                        dead = true;
                        break;
                    }
                    let mut next = Vec::new();
                    for fam in &families {
                        for c in &surviving {
                            let mut f2 = fam.clone();
                            f2.insert(key.clone(), c.clone());
                            next.push(f2);
                        }
                    }
                    families = next;
                }
                if dead {
                    continue;
                }
                for fam in &families {
                    if !exp.family_is_natural(&mult_frame, fam)? {
                        continue;
                    }
                    let m = Monad {
                        carrier: fi.clone(),
                        endo: endo.id.clone(),
                        mult: Cell {
                            frame: mult_frame.clone(),
                            id: family_ident(fam),
                        },
                        unit: unit_cell.clone(),
                    };
                    if monad_violations(exp, &m).is_empty() {
                        out.insert(m.ident(), m);
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn enumerate_modules(base: &dyn Vdc, tgt: &Monad, src: &Monad) -> Result<Vec<Module>> {
    if let Some(exp) = base.as_any().downcast_ref::<crate::exponential::ExpVdc>() {
        return enumerate_modules_exp(exp, tgt, src);
    }
    let mut out = Vec::new();
    for carrier in base.looses() {
        if carrier.src != src.carrier || carrier.tgt != tgt.carrier {
            continue;
        }
        let ids = base.tight().identity(&carrier.src)?;
        let idt = base.tight().identity(&carrier.tgt)?;
        let left_frame = Frame::new(
            vec![tgt.endo.clone(), carrier.id.clone()],
            idt.clone(),
            ids.clone(),
            carrier.id.clone(),
        );
        let right_frame = Frame::new(
            vec![carrier.id.clone(), src.endo.clone()],
            idt.clone(),
            ids.clone(),
            carrier.id.clone(),
        );
        let lefts = base.cells(&left_frame)?;
        if lefts.is_empty() {
            continue;
        }
        let rights = base.cells(&right_frame)?;
        for l in &lefts {
            for r in &rights {
                let m = Module {
                    src_monad: src.ident(),
                    tgt_monad: tgt.ident(),
                    carrier: carrier.id.clone(),
                    left_action: Cell {
                        frame: left_frame.clone(),
                        id: l.clone(),
                    },
                    right_action: Cell {
                        frame: right_frame.clone(),
                        id: r.clone(),
                    },
                };
                if module_violations(base, tgt, src, &m).is_empty() {
                    out.push(m);
                }
            }
        }
    }
    Ok(out)
}

impl Vdc for ModVdc {
    fn name(&self) -> String {
        format!("Mod({})", self.base.name())
    }
    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
    fn tight(&self) -> &FinCat {
        &self.tight
    }
    fn looses(&self) -> &[Loose] {
        self.looses.get_or_init(|| {
            let mut v: Vec<Loose> = self
                .modules()
                .values()
                .map(|m| Loose {
                    id: m.ident(),
                    src: m.src_monad.clone(),
                    tgt: m.tgt_monad.clone(),
                })
                .collect();
            v.sort();
            v
        })
    }
    fn cells(&self, frame: &Frame) -> Result<Vec<Ident>> {
        if let Some(hit) = self.cell_cache.lock().unwrap().get(frame) {
            return Ok(hit.clone());
        }
        check_frame(self, frame)?;
        let chain: Vec<Module> = frame
            .chain
            .iter()
            .map(|m| self.module(m).cloned())
            .collect::<Result<_>>()?;
        let left = self.monad_morphism(&frame.left)?.clone();
        let right = self.monad_morphism(&frame.right)?.clone();
        let cod = self.module(&frame.cod)?.clone();
        let under = self.underlying_frame(frame)?;
        let mut out = Vec::new();
        for id in self.base.cells(&under)? {
            let cell = Cell {
                frame: under.clone(),
                id: id.clone(),
            };
            if equivariance_violations(
                self.base.as_ref(),
                &chain,
                &left,
                &right,
                &cod,
                &self.monads,
                &cell,
            )
            .is_empty()
            {
                out.push(id);
            }
        }
        out.sort();
        self.cell_cache
            .lock()
            .unwrap()
            .insert(frame.clone(), out.clone());
        Ok(out)
    }
    fn identity_cell(&self, p: &Ident) -> Result<Cell> {
        let m = self.module(p)?;
        let l = loose_data(self, p)?;
        let under = self.base.identity_cell(&m.carrier)?;
        Ok(Cell {
            frame: Frame::new(
                vec![p.clone()],
                self.tight.identity(&l.tgt)?,
                self.tight.identity(&l.src)?,
                p.clone(),
            ),
            id: under.id,
        })
    }
    fn compose(&self, inner: &[Cell], outer: &Cell) -> Result<Cell> {
        let frames: Vec<Frame> = inner.iter().map(|c| c.frame.clone()).collect();
        let frame = pasted_frame(self, &frames, &outer.frame)?;
        if inner.is_empty() {
            return Ok(outer.clone());
        }
        let inner_under: Vec<Cell> = inner
            .iter()
            .map(|c| self.underlying_cell(c))
            .collect::<Result<_>>()?;
        let outer_under = self.underlying_cell(outer)?;
        let composite = self.base.compose(&inner_under, &outer_under)?;
        Ok(Cell {
            frame,
            id: composite.id,
        })
    }
    fn restrict_nullary(&self, cell: &Cell, tight: &Ident) -> Option<Cell> {
        if !cell.frame.chain.is_empty() {
            return None;
        }
        let mm = self.monad_morphism(tight).ok()?;
        let under = self.underlying_cell(cell).ok()?;
        let restricted = self.base.restrict_nullary(&under, &mm.tight)?;
        let t = self.tight();
        Some(Cell {
            frame: Frame::new(
                vec![],
                t.compose(tight, &cell.frame.left).ok()?,
                t.compose(tight, &cell.frame.right).ok()?,
                cell.frame.cod.clone(),
            ),
            id: restricted.id,
        })
    }
}

/// Mod of a virtual double category, with its canonical normal structure.
pub fn mod_vdc(base: VdcHandle) -> Result<(Arc<ModVdc>, NormalVdc)> {
    let m = ModVdc::new(base)?;
    let n = m.normal();
    Ok((m, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ident::nat;

    #[test]
    fn mod_of_terminal_is_terminal() {
        let t = fixtures::terminal();
        let (m, _) = mod_vdc(t.vdc.clone()).unwrap();
        assert_eq!(m.monads.len(), 1);
        assert_eq!(m.tight().morphisms.len(), 1);
        assert_eq!(m.looses().len(), 1);
        let l = m.looses()[0].clone();
        let fr = Frame::new(
            vec![l.id.clone(), l.id.clone()],
            m.tight().id_of[&l.src].clone(),
            m.tight().id_of[&l.src].clone(),
            l.id.clone(),
        );
        assert_eq!(m.cells(&fr).unwrap().len(), 1);
    }

    #[test]
    fn span1_monads_are_the_small_categories() {
        // carrier and apex of size <= 1: the empty category and the
        // trivial monoid
        let s = crate::instances::span::span_vdc(1);
        let (m, _) = mod_vdc(s as VdcHandle).unwrap();
        assert_eq!(m.monads.len(), 2);
        let carriers: Vec<Ident> = m.monads.values().map(|t| t.carrier.clone()).collect();
        assert!(carriers.contains(&nat(0)));
        assert!(carriers.contains(&nat(1)));
    }

    #[test]
    fn z2_is_a_valid_monad() {
        let z = fixtures::z2_span_monad();
        let m = Monad {
            carrier: z.carrier.clone(),
            endo: z.endo.id.clone(),
            mult: z.mult.clone(),
            unit: z.unit.clone(),
        };
        assert!(monad_violations(z.span.as_ref(), &m).is_empty());
    }

    #[test]
    fn span2_monad_count_matches_category_count() {
        let s = crate::instances::span::span_vdc(2);
        let (m, _) = mod_vdc(s as VdcHandle).unwrap();
        // labeled categories with at most 2 objects and at most 2 morphisms:
        // empty (1), monoids on one object with 1 or 2 elements (1 + 4),
        // two-object discrete with either apex labeling (2)
        assert_eq!(m.monads.len(), 8);
    }

    #[test]
    fn identity_module_passes_module_equations() {
        let z = fixtures::z2_span_monad();
        let m = Monad {
            carrier: z.carrier.clone(),
            endo: z.endo.id.clone(),
            mult: z.mult.clone(),
            unit: z.unit.clone(),
        };
        let idm = Module {
            src_monad: m.ident(),
            tgt_monad: m.ident(),
            carrier: m.endo.clone(),
            left_action: m.mult.clone(),
            right_action: m.mult.clone(),
        };
        assert!(module_violations(z.span.as_ref(), &m, &m, &idm).is_empty());
    }
}
