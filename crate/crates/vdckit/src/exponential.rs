//! Exponentials of virtual double categories by finite pseudo double
//! category presentations, with the currying bijection.
//!
//! For a coherent presentation `A` and a handle `X`, the exponential `X^A`
//! has functors of underlying categories as objects, natural
//! transformations as tight morphisms, graph morphisms as loose morphisms,
//! and as cells the families of cells of `X` indexed by composable loose
//! chains of `A`, natural in unary cells of `A`. Composition pastes the
//! families pointwise and corrects the codomain by the image of the
//! canonical rebracketing cell.

use crate::error::{Result, VdcError};
use crate::fincat::{all_functors, all_nat_trans, FinCat, FinFunctor, MorData, NatTrans};
use crate::functor::{FunHandle, VdcFun};
use crate::ident::{tagged, Ident};
use crate::presentation::{LTree, PdcPresentation};
use crate::vdc::{check_frame, pasted_frame, Cell, Frame, Loose, Vdc, VdcHandle};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

/// A loose morphism of the exponential: a graph morphism from the source
/// functor to the target functor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMorphism {
    pub src_f: Ident,
    pub tgt_f: Ident,
    pub on_loose: BTreeMap<Ident, Ident>,
    pub on_cell: BTreeMap<Ident, Cell>,
}

impl GraphMorphism {
    pub fn ident(&self) -> Ident {
        tagged(
            "gm",
            vec![
                self.src_f.clone(),
                self.tgt_f.clone(),
                Ident::List(
                    self.on_loose
                        .iter()
                        .map(|(k, v)| Ident::List(vec![k.clone(), v.clone()]))
                        .collect(),
                ),
                Ident::List(
                    self.on_cell
                        .iter()
                        .map(|(k, v)| Ident::List(vec![k.clone(), v.id.clone()]))
                        .collect(),
                ),
            ],
        )
    }

    pub fn loose_at(&self, q: &Ident) -> Result<&Ident> {
        self.on_loose
            .get(q)
            .ok_or_else(|| VdcError::UnknownLoose(q.clone()))
    }

    pub fn cell_at(&self, m: &Ident) -> Result<&Cell> {
        self.on_cell
            .get(m)
            .ok_or_else(|| VdcError::UnknownCell(m.clone()))
    }
}

/// A cell of the exponential: a family of cells of the base indexed by
/// composable chains of the exponent (objects, for nullary frames).
pub type Family = BTreeMap<Vec<Ident>, Cell>;

pub fn family_ident(family: &Family) -> Ident {
    tagged(
        "xc",
        vec![Ident::List(
            family
                .iter()
                .map(|(k, v)| {
                    Ident::List(vec![Ident::List(k.clone()), v.id.clone()])
                })
                .collect(),
        )],
    )
}

pub struct ExpVdc {
    pub base: VdcHandle,
    pub pdc: Arc<PdcPresentation>,
    tight: FinCat,
    pub functors: BTreeMap<Ident, FinFunctor>,
    nats: BTreeMap<Ident, (Ident, Ident, NatTrans)>,
    looses: Vec<Loose>,
    graphs: BTreeMap<Ident, GraphMorphism>,
    cell_cache: Mutex<BTreeMap<Frame, Vec<Ident>>>,
}

fn nat_ident(src_f: &Ident, tgt_f: &Ident, n: &NatTrans) -> Ident {
    Ident::List(vec![src_f.clone(), tgt_f.clone(), n.ident()])
}

impl ExpVdc {
    pub fn new(base: VdcHandle, pdc: Arc<PdcPresentation>, ceiling: usize) -> Result<Arc<ExpVdc>> {
        pdc.check_coherence()?;
        // objects: functors between the underlying categories
        let fs = all_functors(&pdc.tight, base.tight(), ceiling)?;
        let mut functors = BTreeMap::new();
        for f in fs {
            functors.insert(f.ident(), f);
        }
        // tights: natural transformations
        let mut morphisms = Vec::new();
        let mut id_of = BTreeMap::new();
        let mut nats = BTreeMap::new();
        for (fi, f) in &functors {
            for (gi, g) in &functors {
                for n in all_nat_trans(&pdc.tight, base.tight(), f, g) {
                    let id = nat_ident(fi, gi, &n);
                    morphisms.push(MorData {
                        id: id.clone(),
                        src: fi.clone(),
                        tgt: gi.clone(),
                    });
                    nats.insert(id, (fi.clone(), gi.clone(), n));
                }
            }
            let idn = NatTrans::identity(&pdc.tight, f, base.tight());
            id_of.insert(fi.clone(), nat_ident(fi, fi, &idn));
        }
        let mut comp = BTreeMap::new();
        for (ni, (sf, tf, n)) in &nats {
            for (mi, (sg, tg, m)) in &nats {
                if tf != sg {
                    continue;
                }
                let mut components = BTreeMap::new();
                for x in &pdc.tight.objects {
                    components.insert(
                        x.clone(),
                        base.tight().compose(&n.components[x], &m.components[x])?,
                    );
                }
                comp.insert(
                    (ni.clone(), mi.clone()),
                    nat_ident(sf, tg, &NatTrans { components }),
                );
            }
        }
        let tight = FinCat {
            objects: functors.keys().cloned().collect(),
            morphisms,
            id_of,
            comp,
        };
        // looses: graph morphisms
        let mut graphs = BTreeMap::new();
        let mut looses = Vec::new();
        let mut examined = 0usize;
        for (gi, g) in &functors {
            for (fi, f) in &functors {
                // loose from g to f: q : U -/-> V maps to g(U) -/-> f(V)
                let mut loose_maps: Vec<BTreeMap<Ident, Ident>> = vec![BTreeMap::new()];
                for q in &pdc.cellcat.objects {
                    let u = pdc.loose_src(q)?;
                    let v = pdc.loose_tgt(q)?;
                    let srcx = &g.on_ob[u];
                    let tgtx = &f.on_ob[v];
                    let candidates: Vec<Ident> = base
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
                                return Err(VdcError::SizeExceeded(format!(
                                    "graph morphism space above ceiling {ceiling}"
                                )));
                            }
                            let mut m2 = m.clone();
                            m2.insert(q.clone(), c.clone());
                            next.push(m2);
                        }
                    }
                    loose_maps = next;
                }
                for on_loose in loose_maps {
                    // cell assignments: identities are forced, then filter
                    // functoriality
                    let mut cell_maps: Vec<BTreeMap<Ident, Cell>> = vec![BTreeMap::new()];
                    let mut dead = false;
                    for m in &pdc.cellcat.morphisms {
                        let dom = &on_loose[&m.src];
                        let cod = &on_loose[&m.tgt];
                        let frame = Frame::new(
                            vec![dom.clone()],
                            f.on_mor[&pdc.t.on_mor[&m.id]].clone(),
                            g.on_mor[&pdc.s.on_mor[&m.id]].clone(),
                            cod.clone(),
                        );
                        let candidates: Vec<Cell> = if pdc.cellcat.is_identity(&m.id) {
                            match base.identity_cell(dom) {
                                Ok(c) => vec![c],
                                Err(_) => {
                                    dead = true;
                                    break;
                                }
                            }
                        } else {
                            match base.cells(&frame) {
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
                                    return Err(VdcError::SizeExceeded(format!(
                                        "graph morphism space above ceiling {ceiling}"
                                    )));
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
                    'outer: for on_cell in cell_maps {
                        // functoriality on composites
                        for ((m1, m2), m12) in &pdc.cellcat.comp {
                            let lhs = base
                                .compose(&[on_cell[m1].clone()], &on_cell[m2])
                                .ok();
                            if lhs.as_ref() != Some(&on_cell[m12]) {
                                continue 'outer;
                            }
                        }
                        let gm = GraphMorphism {
                            src_f: gi.clone(),
                            tgt_f: fi.clone(),
                            on_loose: on_loose.clone(),
                            on_cell,
                        };
                        let id = gm.ident();
                        looses.push(Loose {
                            id: id.clone(),
                            src: gi.clone(),
                            tgt: fi.clone(),
                        });
                        graphs.insert(id, gm);
                    }
                }
            }
        }
        looses.sort();
        Ok(Arc::new(ExpVdc {
            base,
            pdc,
            tight,
            functors,
            nats,
            looses,
            graphs,
            cell_cache: Mutex::new(BTreeMap::new()),
        }))
    }

    pub fn functor(&self, id: &Ident) -> Result<&FinFunctor> {
        self.functors
            .get(id)
            .ok_or_else(|| VdcError::UnknownObject(id.clone()))
    }

    pub fn nat(&self, id: &Ident) -> Result<&(Ident, Ident, NatTrans)> {
        self.nats
            .get(id)
            .ok_or_else(|| VdcError::UnknownTight(id.clone()))
    }

    pub fn graph(&self, id: &Ident) -> Result<&GraphMorphism> {
        self.graphs
            .get(id)
            .ok_or_else(|| VdcError::UnknownLoose(id.clone()))
    }

    pub fn nat_ident_of(&self, src_f: &Ident, tgt_f: &Ident, n: &NatTrans) -> Ident {
        nat_ident(src_f, tgt_f, n)
    }

    /// The indexing keys of a family for frames of the given arity: chains
    /// for positive arity, objects for arity zero.
    pub fn family_keys(&self, arity: usize) -> Vec<Vec<Ident>> {
        if arity == 0 {
            self.pdc.tight.objects.iter().map(|a| vec![a.clone()]).collect()
        } else {
            let mut out = Vec::new();
            let mut acc: Vec<Vec<Ident>> =
                self.pdc.cellcat.objects.iter().map(|q| vec![q.clone()]).collect();
            for _ in 1..arity {
                let mut next = Vec::new();
                for c in &acc {
                    let last_src = self.pdc.loose_src(&c[c.len() - 1]).unwrap();
                    for q in &self.pdc.cellcat.objects {
                        if self.pdc.loose_tgt(q).unwrap() == last_src {
                            let mut c2 = c.clone();
                            c2.push(q.clone());
                            next.push(c2);
                        }
                    }
                }
                acc = next;
            }
            out.extend(acc);
            out
        }
    }

    /// The frame in the base for one family entry of a frame of the
    /// exponential.
    pub fn entry_frame(&self, frame: &Frame, key: &[Ident]) -> Result<Frame> {
        let arity = frame.arity();
        let cod_graph = self.graph(&frame.cod)?;
        let (_, _, phi) = self.nat(&frame.left)?;
        let (_, _, phi2) = self.nat(&frame.right)?;
        if arity == 0 {
            let a = &key[0];
            let i_a = self.pdc.unit_loose(a)?.clone();
            return Ok(Frame::new(
                vec![],
                phi.components[a].clone(),
                phi2.components[a].clone(),
                cod_graph.loose_at(&i_a)?.clone(),
            ));
        }
        let chain_graphs: Vec<&GraphMorphism> = frame
            .chain
            .iter()
            .map(|x| self.graph(x))
            .collect::<Result<_>>()?;
        let mut xchain = Vec::with_capacity(arity);
        for (i, q) in key.iter().enumerate() {
            xchain.push(chain_graphs[i].loose_at(q)?.clone());
        }
        let a0 = self.pdc.loose_tgt(&key[0])?.clone();
        let an = self.pdc.loose_src(&key[arity - 1])?.clone();
        let composite = self.pdc.left_nested_loose(key, &a0)?;
        Ok(Frame::new(
            xchain,
            phi.components[&a0].clone(),
            phi2.components[&an].clone(),
            cod_graph.loose_at(&composite)?.clone(),
        ))
    }

    /// Assemble a family from a cell identifier at a frame.
    pub fn family_of(&self, cell: &Cell) -> Result<Family> {
        let entries = match cell.id.untag() {
            Some(("xc", [Ident::List(entries)])) => entries,
            _ => return Err(VdcError::UnknownCell(cell.id.clone())),
        };
        let mut out = BTreeMap::new();
        for e in entries {
            match e.as_list() {
                Some([Ident::List(key), v]) => {
                    let frame = self.entry_frame(&cell.frame, key)?;
                    out.insert(
                        key.clone(),
                        Cell {
                            frame,
                            id: v.clone(),
                        },
                    );
                }
                _ => return Err(VdcError::UnknownCell(cell.id.clone())),
            }
        }
        Ok(out)
    }

    /// Naturality of a candidate family over tuples of unary cells of the
    /// exponent (for positive arity) or tight morphisms (for arity zero).
    pub fn family_is_natural(&self, frame: &Frame, family: &Family) -> Result<bool> {
        let arity = frame.arity();
        let cod_graph = self.graph(&frame.cod)?;
        if arity == 0 {
            for a0 in &self.pdc.tight.morphisms {
                if self.pdc.tight.is_identity(&a0.id) {
                    continue;
                }
                // a0 : A' -> A transports the component at A to A'
                let src_entry = &family[&vec![a0.src.clone()]];
                let tgt_entry = &family[&vec![a0.tgt.clone()]];
                let iu = &self.pdc.unit.on_mor[&a0.id];
                let lhs = self
                    .base
                    .compose(&[src_entry.clone()], cod_graph.cell_at(iu)?)?;
                let (_, _, _phi) = self.nat(&frame.left)?;
                // the chain-base functor: source of the left tight
                let f0 = self.tight.src(&frame.left)?.clone();
                let f0_fun = self.functor(&f0)?;
                let rhs = self
                    .base
                    .restrict_nullary(tgt_entry, &f0_fun.on_mor[&a0.id])
                    .ok_or_else(|| {
                        VdcError::Unsupported(format!(
                            "base {} does not support nullary restriction",
                            self.base.name()
                        ))
                    })?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
            return Ok(true);
        }
        let chain_graphs: Vec<&GraphMorphism> = frame
            .chain
            .iter()
            .map(|x| self.graph(x))
            .collect::<Result<_>>()?;
        // tuples of unary cells with matching boundaries
        let mut tuples: Vec<Vec<&MorData>> = vec![vec![]];
        for i in 0..arity {
            let mut next = Vec::new();
            for t in &tuples {
                for m in &self.pdc.cellcat.morphisms {
                    if let Some(last) = t.last() {
                        if self.pdc.s.on_mor[&last.id] != self.pdc.t.on_mor[&m.id] {
                            continue;
                        }
                    }
                    let _ = i;
                    let mut t2 = t.clone();
                    t2.push(m);
                    next.push(t2);
                }
            }
            tuples = next;
        }
        for t in &tuples {
            if t.iter().all(|m| self.pdc.cellcat.is_identity(&m.id)) {
                continue;
            }
            // codomain chain of the tuple and its source chain
            let cod_key: Vec<Ident> = t.iter().map(|m| m.tgt.clone()).collect();
            let src_key: Vec<Ident> = t.iter().map(|m| m.src.clone()).collect();
            let (Some(cod_entry), Some(src_entry)) =
                (family.get(&cod_key), family.get(&src_key))
            else {
                continue;
            };
            let tops: Vec<Cell> = t
                .iter()
                .enumerate()
                .map(|(i, m)| chain_graphs[i].cell_at(&m.id).cloned())
                .collect::<Result<_>>()?;
            let lhs = self.base.compose(&tops, cod_entry)?;
            // fold the tuple into a single unary cell on the composites
            let mut folded = t[0].id.clone();
            for m in &t[1..] {
                folded = self.pdc.hcomp_cells(&folded, &m.id)?;
            }
            let rhs = self
                .base
                .compose(&[src_entry.clone()], cod_graph.cell_at(&folded)?)?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Candidate cells per family slot for a frame.
    pub fn slot_candidates(&self, frame: &Frame) -> Result<Vec<(Vec<Ident>, Vec<Cell>)>> {
        let mut out = Vec::new();
        for key in self.family_keys(frame.arity()) {
            let ef = self.entry_frame(frame, &key)?;
            let cells = self
                .base
                .cells(&ef)?
                .into_iter()
                .map(|id| Cell {
                    frame: ef.clone(),
                    id,
                })
                .collect();
            out.push((key, cells));
        }
        Ok(out)
    }
}

impl Vdc for ExpVdc {
    fn name(&self) -> String {
        format!("{}^{}", self.base.name(), self.pdc.name)
    }
    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
    fn tight(&self) -> &FinCat {
        &self.tight
    }
    fn looses(&self) -> &[Loose] {
        &self.looses
    }
    fn cells(&self, frame: &Frame) -> Result<Vec<Ident>> {
        if let Some(hit) = self.cell_cache.lock().unwrap().get(frame) {
            return Ok(hit.clone());
        }
        check_frame(self, frame)?;
        let slots = self.slot_candidates(frame)?;
        let mut families: Vec<Family> = vec![BTreeMap::new()];
        for (key, candidates) in &slots {
            let mut next = Vec::new();
            for fam in &families {
                for c in candidates {
                    let mut f2 = fam.clone();
                    f2.insert(key.clone(), c.clone());
                    next.push(f2);
                }
            }
            families = next;
            if families.is_empty() {
                break;
            }
        }
        let mut out = Vec::new();
        for fam in &families {
            if self.family_is_natural(frame, fam)? {
                out.push(family_ident(fam));
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
        let gm = self.graph(p)?;
        let mut family = BTreeMap::new();
        for q in &self.pdc.cellcat.objects {
            family.insert(
                vec![q.clone()],
                self.base.identity_cell(gm.loose_at(q)?)?,
            );
        }
        Ok(Cell {
            frame: Frame::new(
                vec![p.clone()],
                self.tight.identity(&gm.tgt_f)?,
                self.tight.identity(&gm.src_f)?,
                p.clone(),
            ),
            id: family_ident(&family),
        })
    }
    fn compose(&self, inner: &[Cell], outer: &Cell) -> Result<Cell> {
        let frames: Vec<Frame> = inner.iter().map(|c| c.frame.clone()).collect();
        let frame = pasted_frame(self, &frames, &outer.frame)?;
        if inner.is_empty() {
            return Ok(outer.clone());
        }
        let inner_families: Vec<Family> = inner
            .iter()
            .map(|c| self.family_of(c))
            .collect::<Result<_>>()?;
        let outer_family = self.family_of(outer)?;
        let cod_graph = self.graph(&frame.cod)?;
        let arities: Vec<usize> = inner.iter().map(|c| c.frame.arity()).collect();
        let mut family = BTreeMap::new();
        for key in self.family_keys(frame.arity()) {
            // split the key into blocks; empty blocks live at the object
            // junction
            let chain: &[Ident] = if frame.arity() == 0 { &[] } else { &key };
            let mut blocks: Vec<Vec<Ident>> = Vec::with_capacity(inner.len());
            let mut offset = 0usize;
            for a in &arities {
                blocks.push(chain[offset..offset + a].to_vec());
                offset += a;
            }
            // junction objects at the start of each block
            let mut junctions = Vec::with_capacity(inner.len());
            {
                let mut cursor = if chain.is_empty() {
                    key[0].clone()
                } else {
                    self.pdc.loose_tgt(&chain[0])?.clone()
                };
                for b in &blocks {
                    junctions.push(cursor.clone());
                    if !b.is_empty() {
                        cursor = self.pdc.loose_src(&b[b.len() - 1])?.clone();
                    }
                }
            }
            // inner components and block composites
            let mut comps = Vec::with_capacity(inner.len());
            let mut block_looses = Vec::with_capacity(inner.len());
            let mut block_trees = Vec::with_capacity(inner.len());
            for (i, b) in blocks.iter().enumerate() {
                let k = if b.is_empty() {
                    vec![junctions[i].clone()]
                } else {
                    b.clone()
                };
                comps.push(inner_families[i][&k].clone());
                let tree = LTree::left_nested(b, &junctions[i]);
                block_looses.push(self.pdc.eval_tree(&tree)?);
                block_trees.push(tree);
            }
            let pasted = self.base.compose(&comps, &outer_family[&block_looses])?;
            // codomain correction: rebracket the blocked composite to the
            // flat left-nested composite
            let blocked = LTree::left_nested_trees(block_trees);
            let at = if chain.is_empty() {
                key[0].clone()
            } else {
                self.pdc.loose_tgt(&chain[0])?.clone()
            };
            let flat = LTree::left_nested(chain, &at);
            let r = self.pdc.rebracket(&blocked, &flat)?;
            let entry = if self.pdc.cellcat.is_identity(&r) {
                pasted
            } else {
                self.base.compose(&[pasted], cod_graph.cell_at(&r)?)?
            };
            family.insert(key, entry);
        }
        Ok(Cell {
            frame,
            id: family_ident(&family),
        })
    }
    fn restrict_nullary(&self, cell: &Cell, tight: &Ident) -> Option<Cell> {
        if !cell.frame.chain.is_empty() {
            return None;
        }
        let (_, _, u) = self.nat(tight).ok()?;
        let family = self.family_of(cell).ok()?;
        let mut out = BTreeMap::new();
        for (k, entry) in &family {
            let comp = &u.components[&k[0]];
            out.insert(k.clone(), self.base.restrict_nullary(entry, comp)?);
        }
        let t = self.tight();
        Some(Cell {
            frame: Frame::new(
                vec![],
                t.compose(tight, &cell.frame.left).ok()?,
                t.compose(tight, &cell.frame.right).ok()?,
                cell.frame.cod.clone(),
            ),
            id: family_ident(&out),
        })
    }
}

/// Build the exponential `X^A`.
pub fn exponential(
    base: VdcHandle,
    pdc: Arc<PdcPresentation>,
    ceiling: usize,
) -> Result<Arc<ExpVdc>> {
    ExpVdc::new(base, pdc, ceiling)
}

/// Curry a functor `W x A -> X` to a functor `W -> X^A`. The product must
/// pair `W` with the induced handle of the exponent presentation.
pub struct CurriedFun {
    pub inner: FunHandle,
    pub exp: Arc<ExpVdc>,
    pub w: VdcHandle,
    cod: VdcHandle,
}

impl CurriedFun {
    pub fn new(inner: FunHandle, exp: Arc<ExpVdc>, w: VdcHandle) -> CurriedFun {
        let cod = exp.clone() as VdcHandle;
        CurriedFun { inner, exp, w, cod }
    }

    fn pairi(x: &Ident, y: &Ident) -> Ident {
        Ident::List(vec![x.clone(), y.clone()])
    }

    fn functor_at(&self, w: &Ident) -> Result<FinFunctor> {
        let pdc = &self.exp.pdc;
        let mut on_ob = BTreeMap::new();
        for a in &pdc.tight.objects {
            on_ob.insert(a.clone(), self.inner.ob(&Self::pairi(w, a))?);
        }
        let idw = self.w.tight().identity(w)?;
        let mut on_mor = BTreeMap::new();
        for m in &pdc.tight.morphisms {
            on_mor.insert(m.id.clone(), self.inner.tight(&Self::pairi(&idw, &m.id))?);
        }
        Ok(FinFunctor { on_ob, on_mor })
    }
}

impl VdcFun for CurriedFun {
    fn name(&self) -> String {
        format!("curry({})", self.inner.name())
    }
    fn dom(&self) -> &VdcHandle {
        &self.w
    }
    fn cod(&self) -> &VdcHandle {
        &self.cod
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        Ok(self.functor_at(x)?.ident())
    }
    fn tight(&self, h: &Ident) -> Result<Ident> {
        let t = self.w.tight();
        let src = t.src(h)?.clone();
        let tgt = t.tgt(h)?.clone();
        let pdc = &self.exp.pdc;
        let mut components = BTreeMap::new();
        for a in &pdc.tight.objects {
            let ida = pdc.tight.identity(a)?;
            components.insert(a.clone(), self.inner.tight(&Self::pairi(h, &ida))?);
        }
        Ok(self.exp.nat_ident_of(
            &self.ob(&src)?,
            &self.ob(&tgt)?,
            &NatTrans { components },
        ))
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        let l = crate::vdc::loose_data(self.w.as_ref(), p)?.clone();
        let pdc = &self.exp.pdc;
        let mut on_loose = BTreeMap::new();
        for q in &pdc.cellcat.objects {
            on_loose.insert(q.clone(), self.inner.loose(&Self::pairi(p, q))?);
        }
        let idp = self.w.identity_cell(p)?;
        let mut on_cell = BTreeMap::new();
        for m in &pdc.cellcat.morphisms {
            // the pair of the identity cell on p with the unary cell m
            let a_cell = Cell {
                frame: Frame::new(
                    vec![m.src.clone()],
                    pdc.t.on_mor[&m.id].clone(),
                    pdc.s.on_mor[&m.id].clone(),
                    m.tgt.clone(),
                ),
                id: m.id.clone(),
            };
            let pair_cell = Cell {
                frame: Frame::new(
                    vec![Self::pairi(&idp.frame.chain[0], &a_cell.frame.chain[0])],
                    Self::pairi(&idp.frame.left, &a_cell.frame.left),
                    Self::pairi(&idp.frame.right, &a_cell.frame.right),
                    Self::pairi(&idp.frame.cod, &a_cell.frame.cod),
                ),
                id: Self::pairi(&idp.id, &a_cell.id),
            };
            on_cell.insert(m.id.clone(), self.inner.cell(&pair_cell)?);
        }
        Ok(GraphMorphism {
            src_f: self.ob(&l.src)?,
            tgt_f: self.ob(&l.tgt)?,
            on_loose,
            on_cell,
        }
        .ident())
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        let pdc = &self.exp.pdc;
        let arity = c.frame.arity();
        let mut family = BTreeMap::new();
        for key in self.exp.family_keys(arity) {
            let (a_cell, junction) = if arity == 0 {
                let a = &key[0];
                let i_a = pdc.unit_loose(a)?.clone();
                (
                    Cell {
                        frame: Frame::new(
                            vec![],
                            pdc.tight.identity(a)?,
                            pdc.tight.identity(a)?,
                            i_a,
                        ),
                        id: pdc.cellcat.identity(pdc.unit_loose(a)?)?,
                    },
                    a.clone(),
                )
            } else {
                let (composite, opcart) = pdc.chosen_composite(&key, None)?;
                let _ = composite;
                (opcart, pdc.loose_tgt(&key[0])?.clone())
            };
            let _ = junction;
            // pair of the w-cell with the opcartesian cell of the exponent
            let chain: Vec<Ident> = c
                .frame
                .chain
                .iter()
                .zip(a_cell.frame.chain.iter())
                .map(|(x, y)| Self::pairi(x, y))
                .collect();
            let pair_cell = Cell {
                frame: Frame::new(
                    chain,
                    Self::pairi(&c.frame.left, &a_cell.frame.left),
                    Self::pairi(&c.frame.right, &a_cell.frame.right),
                    Self::pairi(&c.frame.cod, &a_cell.frame.cod),
                ),
                id: Self::pairi(&c.id, &a_cell.id),
            };
            let entry = self.inner.cell(&pair_cell)?;
            family.insert(key, entry);
        }
        let frame = Frame {
            chain: c
                .frame
                .chain
                .iter()
                .map(|p| self.loose(p))
                .collect::<Result<_>>()?,
            left: self.tight(&c.frame.left)?,
            right: self.tight(&c.frame.right)?,
            cod: self.loose(&c.frame.cod)?,
        };
        Ok(Cell {
            frame,
            id: family_ident(&family),
        })
    }
}

/// Uncurry a functor `W -> X^A` to a functor `W x A -> X`.
pub struct UncurriedFun {
    pub inner: FunHandle,
    pub exp: Arc<ExpVdc>,
    pub product: VdcHandle,
}

impl UncurriedFun {
    fn split(x: &Ident) -> Result<(&Ident, &Ident)> {
        match x.as_list() {
            Some([a, b]) => Ok((a, b)),
            _ => Err(VdcError::ShapeMismatch(format!("{x} is not a pair"))),
        }
    }
}

impl VdcFun for UncurriedFun {
    fn name(&self) -> String {
        format!("uncurry({})", self.inner.name())
    }
    fn dom(&self) -> &VdcHandle {
        &self.product
    }
    fn cod(&self) -> &VdcHandle {
        &self.exp.base
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        let (w, a) = Self::split(x)?;
        let f = self.exp.functor(&self.inner.ob(w)?)?;
        Ok(f.on_ob[a].clone())
    }
    fn tight(&self, h: &Ident) -> Result<Ident> {
        let (hw, ha) = Self::split(h)?;
        let wt = self.exp.base.tight();
        // G(h) at the source object, then G(w') applied to ha
        let t = self.product.tight();
        let src = t.src(h)?;
        let (_, a_src) = Self::split(src)?;
        let wtgt = self.exp.dom_tgt(hw, &self.inner)?;
        let (_, _, n) = self.exp.nat(&self.inner.tight(hw)?)?;
        let comp_at_src = &n.components[a_src];
        let g2 = self.exp.functor(&wtgt)?;
        wt.compose(comp_at_src, &g2.on_mor[ha])
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        let (pw, qa) = Self::split(p)?;
        let gm = self.exp.graph(&self.inner.loose(pw)?)?;
        Ok(gm.loose_at(qa)?.clone())
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        // the A-side of the pair cell is a cell of the induced handle: a
        // unary cell out of the chain's chosen composite
        let mut w_chain = Vec::new();
        let mut a_chain = Vec::new();
        for p in &c.frame.chain {
            let (pw, qa) = Self::split(p)?;
            w_chain.push(pw.clone());
            a_chain.push(qa.clone());
        }
        let (cw, ca) = Self::split(&c.id)?;
        let (lw, la) = Self::split(&c.frame.left)?;
        let (rw, ra) = Self::split(&c.frame.right)?;
        let (codw, coda) = Self::split(&c.frame.cod)?;
        let w_cell = Cell {
            frame: Frame::new(w_chain.clone(), lw.clone(), rw.clone(), codw.clone()),
            id: cw.clone(),
        };
        let img = self.inner.cell(&w_cell)?;
        let family = self.exp.family_of(&img)?;
        let key = if a_chain.is_empty() {
            let t = self.product.tight();
            let src = t.src(&c.frame.left)?;
            let (_, a0) = Self::split(src)?;
            vec![a0.clone()]
        } else {
            a_chain.clone()
        };
        let comp_entry = family
            .get(&key)
            .ok_or_else(|| VdcError::FrameMismatch("missing family entry".into()))?;
        // paste with the image of the unary factorization under the
        // codomain graph morphism
        let cod_gm = self.exp.graph(&self.inner.loose(codw)?)?;
        let m_cell = cod_gm.cell_at(ca)?;
        let la2 = la;
        let ra2 = ra;
        let _ = (la2, ra2, coda);
        self.exp.base.compose(&[comp_entry.clone()], m_cell)
    }
}

impl ExpVdc {
    fn dom_tgt(&self, hw: &Ident, inner: &FunHandle) -> Result<Ident> {
        let (_, tgt, _) = self.nat(&inner.tight(hw)?)?;
        Ok(tgt.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::vdc::frames;

    #[test]
    fn exponential_by_terminal_matches_base() {
        // X^1 has the strata of X for small X
        let t = fixtures::terminal();
        let pdc = Arc::new(fixtures::terminal_presentation());
        let e = exponential(t.vdc.clone(), pdc, 100_000).unwrap();
        assert_eq!(e.tight().objects.len(), 1);
        assert_eq!(e.looses().len(), 1);
        for f in frames(e.as_ref(), 3) {
            assert_eq!(e.cells(&f).unwrap().len(), 1, "at {f}");
        }
    }

    #[test]
    fn exponential_span1_by_terminal_counts() {
        let s = fixtures::span_fixture(1);
        let pdc = Arc::new(fixtures::terminal_presentation());
        let e = exponential(s.vdc.clone(), pdc, 100_000).unwrap();
        // objects and looses are in bijection with those of span(1)
        assert_eq!(e.tight().objects.len(), 2);
        assert_eq!(e.looses().len(), s.vdc.looses().len());
    }

    #[test]
    fn exponential_composition_is_unital() {
        let s = fixtures::span_fixture(1);
        let pdc = Arc::new(fixtures::walking_loose_presentation());
        let e = exponential(s.vdc.clone(), pdc, 1_000_000).unwrap();
        for l in e.looses().iter().take(6) {
            let c = e.identity_cell(&l.id).unwrap();
            assert!(e.has_cell(&c).unwrap(), "identity of {} is a cell", l.id);
            let cc = e.compose(&[c.clone()], &c).unwrap();
            assert_eq!(cc, c);
        }
    }
}
