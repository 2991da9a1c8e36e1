//! Functors of virtual double categories and transformations between them.
//!
//! A functor assigns objects, tight morphisms, loose morphisms and cells,
//! strictly preserving identities and composites. Structural functors
//! (units, counits, projections, ...) are implemented as rule-based
//! [`VdcFun`] values; enumerated functor spaces are table-backed.

use crate::error::{Result, VdcError};
use crate::ident::Ident;
use crate::vdc::{
    check_frame, frames, loose_data, Cell, Frame, Vdc, VdcHandle,
};
use std::collections::BTreeMap;
use std::sync::Arc;

pub trait VdcFun: Send + Sync {
    fn name(&self) -> String;
    fn dom(&self) -> &VdcHandle;
    fn cod(&self) -> &VdcHandle;
    fn ob(&self, x: &Ident) -> Result<Ident>;
    fn tight(&self, f: &Ident) -> Result<Ident>;
    fn loose(&self, p: &Ident) -> Result<Ident>;
    fn cell(&self, c: &Cell) -> Result<Cell>;
}

pub type FunHandle = Arc<dyn VdcFun>;

/// The image of a frame under a functor.
pub fn map_frame(f: &dyn VdcFun, frame: &Frame) -> Result<Frame> {
    Ok(Frame {
        chain: frame
            .chain
            .iter()
            .map(|p| f.loose(p))
            .collect::<Result<_>>()?,
        left: f.tight(&frame.left)?,
        right: f.tight(&frame.right)?,
        cod: f.loose(&frame.cod)?,
    })
}

pub struct IdentityFun {
    vdc: VdcHandle,
}

impl IdentityFun {
    pub fn new(vdc: VdcHandle) -> IdentityFun {
        IdentityFun { vdc }
    }
}

impl VdcFun for IdentityFun {
    fn name(&self) -> String {
        format!("id({})", self.vdc.name())
    }
    fn dom(&self) -> &VdcHandle {
        &self.vdc
    }
    fn cod(&self) -> &VdcHandle {
        &self.vdc
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        Ok(x.clone())
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        Ok(f.clone())
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        Ok(p.clone())
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        Ok(c.clone())
    }
}

pub struct ComposedFun {
    first: FunHandle,
    second: FunHandle,
}

/// Diagrammatic composition: `first` then `second`.
pub fn compose_funs(first: FunHandle, second: FunHandle) -> FunHandle {
    Arc::new(ComposedFun { first, second })
}

impl VdcFun for ComposedFun {
    fn name(&self) -> String {
        format!("{} ; {}", self.first.name(), self.second.name())
    }
    fn dom(&self) -> &VdcHandle {
        self.first.dom()
    }
    fn cod(&self) -> &VdcHandle {
        self.second.cod()
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        self.second.ob(&self.first.ob(x)?)
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        self.second.tight(&self.first.tight(f)?)
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        self.second.loose(&self.first.loose(p)?)
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        self.second.cell(&self.first.cell(c)?)
    }
}

/// A fully tabulated functor; cell images are stored per frame up to a
/// chain-length bound.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FunctorTable {
    pub on_ob: BTreeMap<Ident, Ident>,
    pub on_tight: BTreeMap<Ident, Ident>,
    pub on_loose: BTreeMap<Ident, Ident>,
    pub on_cell: BTreeMap<(Frame, Ident), Ident>,
    pub cell_bound: usize,
}

pub struct TableFun {
    pub name: String,
    pub dom: VdcHandle,
    pub cod: VdcHandle,
    pub table: FunctorTable,
}

impl VdcFun for TableFun {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn dom(&self) -> &VdcHandle {
        &self.dom
    }
    fn cod(&self) -> &VdcHandle {
        &self.cod
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        self.table
            .on_ob
            .get(x)
            .cloned()
            .ok_or_else(|| VdcError::UnknownObject(x.clone()))
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        self.table
            .on_tight
            .get(f)
            .cloned()
            .ok_or_else(|| VdcError::UnknownTight(f.clone()))
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        self.table
            .on_loose
            .get(p)
            .cloned()
            .ok_or_else(|| VdcError::UnknownLoose(p.clone()))
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        let id = self
            .table
            .on_cell
            .get(&(c.frame.clone(), c.id.clone()))
            .cloned()
            .ok_or_else(|| VdcError::UnknownCell(c.id.clone()))?;
        Ok(Cell {
            frame: map_frame(self, &c.frame)?,
            id,
        })
    }
}

/// Tabulate any functor over its domain's frames within a chain bound.
pub fn tabulate_fun(f: &dyn VdcFun, cell_bound: usize) -> Result<FunctorTable> {
    let dom = f.dom();
    let mut on_ob = BTreeMap::new();
    for x in &dom.tight().objects {
        on_ob.insert(x.clone(), f.ob(x)?);
    }
    let mut on_tight = BTreeMap::new();
    for m in &dom.tight().morphisms {
        on_tight.insert(m.id.clone(), f.tight(&m.id)?);
    }
    let mut on_loose = BTreeMap::new();
    for l in dom.looses() {
        on_loose.insert(l.id.clone(), f.loose(&l.id)?);
    }
    let mut on_cell = BTreeMap::new();
    for frame in frames(dom.as_ref(), cell_bound) {
        for id in dom.cells(&frame)? {
            let c = Cell {
                frame: frame.clone(),
                id: id.clone(),
            };
            on_cell.insert((frame.clone(), id), f.cell(&c)?.id);
        }
    }
    Ok(FunctorTable {
        on_ob,
        on_tight,
        on_loose,
        on_cell,
        cell_bound,
    })
}

/// Extensional equality of two parallel functors within a chain bound.
pub fn functors_equal(f: &dyn VdcFun, g: &dyn VdcFun, chain_bound: usize) -> Result<bool> {
    let dom = f.dom();
    for x in &dom.tight().objects {
        if f.ob(x)? != g.ob(x)? {
            return Ok(false);
        }
    }
    for m in &dom.tight().morphisms {
        if f.tight(&m.id)? != g.tight(&m.id)? {
            return Ok(false);
        }
    }
    for l in dom.looses() {
        if f.loose(&l.id)? != g.loose(&l.id)? {
            return Ok(false);
        }
    }
    for frame in frames(dom.as_ref(), chain_bound) {
        for id in dom.cells(&frame)? {
            let c = Cell {
                frame: frame.clone(),
                id,
            };
            if f.cell(&c)? != g.cell(&c)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All functor-law violations within the bounds: frame preservation,
/// identity preservation, and composite preservation over the enumerated
/// configurations.
pub fn functor_violations(f: &dyn VdcFun, chain_bound: usize, budget: usize) -> Vec<String> {
    let mut out = Vec::new();
    let dom = f.dom();
    let cod = f.cod();
    for x in &dom.tight().objects {
        match f.ob(x) {
            Err(e) => out.push(format!("object {x}: {e}")),
            Ok(y) => {
                if !cod.tight().has_object(&y) {
                    out.push(format!("object {x} maps outside the codomain"));
                }
                let fi = f.tight(&dom.tight().id_of[x]);
                if fi.ok().as_ref() != cod.tight().id_of.get(&y) {
                    out.push(format!("tight identity at {x} not preserved"));
                }
            }
        }
    }
    for m in &dom.tight().morphisms {
        match f.tight(&m.id) {
            Err(e) => out.push(format!("tight {}: {e}", m.id)),
            Ok(n) => match cod.tight().mor(&n) {
                None => out.push(format!("tight {} maps outside the codomain", m.id)),
                Some(nd) => {
                    if f.ob(&m.src).ok().as_ref() != Some(&nd.src)
                        || f.ob(&m.tgt).ok().as_ref() != Some(&nd.tgt)
                    {
                        out.push(format!("tight {} has wrong image endpoints", m.id));
                    }
                }
            },
        }
    }
    for ((a, b), c) in &dom.tight().comp {
        let lhs = f
            .tight(a)
            .and_then(|fa| f.tight(b).and_then(|fb| cod.tight().compose(&fa, &fb)));
        if lhs.ok() != f.tight(c).ok() {
            out.push(format!("tight composite ({a}, {b}) not preserved"));
        }
    }
    for l in dom.looses() {
        match f.loose(&l.id) {
            Err(e) => out.push(format!("loose {}: {e}", l.id)),
            Ok(p) => match loose_data(cod.as_ref(), &p) {
                Err(_) => out.push(format!("loose {} maps outside the codomain", l.id)),
                Ok(pd) => {
                    if f.ob(&l.src).ok().as_ref() != Some(&pd.src)
                        || f.ob(&l.tgt).ok().as_ref() != Some(&pd.tgt)
                    {
                        out.push(format!("loose {} has wrong image endpoints", l.id));
                    }
                }
            },
        }
        match f.cell(&dom.identity_cell(&l.id).unwrap()) {
            Err(e) => out.push(format!("identity cell of {}: {e}", l.id)),
            Ok(img) => {
                let want = f.loose(&l.id).and_then(|p| cod.identity_cell(&p));
                if want.ok() != Some(img) {
                    out.push(format!("identity cell of {} not preserved", l.id));
                }
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    // cell images land in the right frames
    for frame in frames(dom.as_ref(), chain_bound) {
        let Ok(cells) = dom.cells(&frame) else {
            continue;
        };
        for id in cells {
            let c = Cell {
                frame: frame.clone(),
                id,
            };
            match f.cell(&c) {
                Err(e) => out.push(format!("cell {} at {}: {e}", c.id, c.frame)),
                Ok(img) => {
                    let want = map_frame(f, &frame);
                    if want.ok().as_ref() != Some(&img.frame) {
                        out.push(format!("cell {} maps to a wrong frame", c.id));
                    } else if !cod.has_cell(&img).unwrap_or(false) {
                        out.push(format!("cell {} maps outside the codomain", c.id));
                    }
                }
            }
            if out.len() > 20 {
                return out;
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    // composite preservation over enumerated configurations
    let mut checked = 0usize;
    for (inner, outer) in composition_configs(dom.as_ref(), chain_bound) {
        if checked >= budget {
            break;
        }
        checked += 1;
        let lhs = dom
            .compose(&inner, &outer)
            .and_then(|c| f.cell(&c));
        let rhs = (|| -> Result<Cell> {
            let fi: Vec<Cell> = inner.iter().map(|c| f.cell(c)).collect::<Result<_>>()?;
            let fo = f.cell(&outer)?;
            f.cod().compose(&fi, &fo)
        })();
        match (lhs, rhs) {
            (Ok(a), Ok(b)) if a == b => {}
            (Err(_), _) | (_, Err(_)) => out.push(format!(
                "composite image undefined for outer {} at {}",
                outer.id, outer.frame
            )),
            _ => out.push(format!(
                "composite not preserved for outer {} at {}",
                outer.id, outer.frame
            )),
        }
        if out.len() > 20 {
            return out;
        }
    }
    out
}

/// Deterministic enumeration of composition configurations: every outer
/// cell with chain within the bound, filled with every compatible tuple of
/// inner cells whose total arity stays within the bound.
pub fn composition_configs(vdc: &dyn Vdc, chain_bound: usize) -> Vec<(Vec<Cell>, Cell)> {
    let mut out = Vec::new();
    let all_frames = frames(vdc, chain_bound);
    let mut cells_by_cod: BTreeMap<Ident, Vec<Cell>> = BTreeMap::new();
    for frame in &all_frames {
        if let Ok(cells) = vdc.cells(frame) {
            for id in cells {
                cells_by_cod
                    .entry(frame.cod.clone())
                    .or_default()
                    .push(Cell {
                        frame: frame.clone(),
                        id,
                    });
            }
        }
    }
    for frame in &all_frames {
        let Ok(outer_cells) = vdc.cells(frame) else {
            continue;
        };
        if outer_cells.is_empty() {
            continue;
        }
        // all inner tuples for this outer frame
        let mut tuples: Vec<(Vec<Cell>, usize)> = vec![(vec![], 0)];
        for slot in &frame.chain {
            let candidates = cells_by_cod.get(slot).cloned().unwrap_or_default();
            let mut next = Vec::new();
            for (prefix, used) in &tuples {
                for c in &candidates {
                    if used + c.frame.arity() > chain_bound {
                        continue;
                    }
                    if let Some(last) = prefix.last() {
                        if last.frame.right != c.frame.left {
                            continue;
                        }
                    }
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    next.push((p, used + c.frame.arity()));
                }
            }
            tuples = next;
        }
        for id in &outer_cells {
            let outer = Cell {
                frame: frame.clone(),
                id: id.clone(),
            };
            for (inner, _) in &tuples {
                out.push((inner.clone(), outer.clone()));
            }
        }
    }
    out
}

/// Enumerate all functors `dom -> cod` with cell tables within the chain
/// bound, pruned by identity preservation and filtered by the functor laws.
pub fn all_vdc_functors(
    dom: &VdcHandle,
    cod: &VdcHandle,
    chain_bound: usize,
    ceiling: usize,
) -> Result<Vec<Arc<TableFun>>> {
    let tight_functors = crate::fincat::all_functors(dom.tight(), cod.tight(), ceiling)?;
    let mut result = Vec::new();
    let dom_frames = frames(dom.as_ref(), chain_bound);
    let mut examined = 0usize;
    for tf in tight_functors {
        // loose assignments
        let mut loose_maps: Vec<BTreeMap<Ident, Ident>> = vec![BTreeMap::new()];
        for l in dom.looses() {
            let src = &tf.on_ob[&l.src];
            let tgt = &tf.on_ob[&l.tgt];
            let candidates: Vec<Ident> = cod
                .looses()
                .iter()
                .filter(|c| &c.src == src && &c.tgt == tgt)
                .map(|c| c.id.clone())
                .collect();
            let mut next = Vec::new();
            for m in &loose_maps {
                for c in &candidates {
                    examined += 1;
                    if examined > ceiling {
                        return Err(VdcError::SizeExceeded(format!(
                            "functor space above ceiling {ceiling}"
                        )));
                    }
                    let mut m2 = m.clone();
                    m2.insert(l.id.clone(), c.clone());
                    next.push(m2);
                }
            }
            loose_maps = next;
        }
        for on_loose in loose_maps {
            // cell assignments per frame; identity cells are forced
            let mut cell_maps: Vec<BTreeMap<(Frame, Ident), Ident>> = vec![BTreeMap::new()];
            let mut dead = false;
            for frame in &dom_frames {
                let Ok(cells) = dom.cells(frame) else {
                    dead = true;
                    break;
                };
                if cells.is_empty() {
                    continue;
                }
                let image_frame = Frame {
                    chain: frame
                        .chain
                        .iter()
                        .map(|p| on_loose[p].clone())
                        .collect(),
                    left: tf.on_mor[&frame.left].clone(),
                    right: tf.on_mor[&frame.right].clone(),
                    cod: on_loose[&frame.cod].clone(),
                };
                if check_frame(cod.as_ref(), &image_frame).is_err() {
                    dead = true;
                    break;
                }
                let image_cells = match cod.cells(&image_frame) {
                    Ok(cs) => cs,
                    Err(_) => {
                        dead = true;
                        break;
                    }
                };
                for id in cells {
                    let forced = dom
                        .identity_cell(&frame.cod)
                        .ok()
                        .filter(|ic| ic.frame == *frame && ic.id == id)
                        .map(|_| cod.identity_cell(&image_frame.cod).map(|c| c.id));
                    let candidates: Vec<Ident> = match forced {
                        Some(Ok(forced_id)) => vec![forced_id],
                        Some(Err(_)) => {
                            dead = true;
                            break;
                        }
                        None => image_cells.clone(),
                    };
                    let mut next = Vec::new();
                    for m in &cell_maps {
                        for c in &candidates {
                            examined += 1;
                            if examined > ceiling {
                                return Err(VdcError::SizeExceeded(format!(
                                    "functor space above ceiling {ceiling}"
                                )));
                            }
                            let mut m2 = m.clone();
                            m2.insert((frame.clone(), id.clone()), c.clone());
                            next.push(m2);
                        }
                    }
                    cell_maps = next;
                    if cell_maps.is_empty() {
                        dead = true;
                        break;
                    }
                }
                if dead {
                    break;
                }
            }
            if dead {
                continue;
            }
            for on_cell in cell_maps {
                let f = Arc::new(TableFun {
                    name: "enumerated".into(),
                    dom: dom.clone(),
                    cod: cod.clone(),
                    table: FunctorTable {
                        on_ob: tf.on_ob.clone(),
                        on_tight: tf.on_mor.clone(),
                        on_loose: on_loose.clone(),
                        on_cell,
                        cell_bound: chain_bound,
                    },
                });
                if functor_violations(f.as_ref(), chain_bound, usize::MAX).is_empty() {
                    result.push(f);
                }
            }
        }
    }
    Ok(result)
}

/// A transformation between parallel functors: a tight component per object
/// and a cell component per loose morphism.
#[derive(Clone, Debug)]
pub struct Transformation {
    pub tight_components: BTreeMap<Ident, Ident>,
    pub loose_components: BTreeMap<Ident, Cell>,
}

impl Transformation {
    pub fn identity(f: &dyn VdcFun) -> Result<Transformation> {
        let dom = f.dom();
        let cod = f.cod();
        let mut tight_components = BTreeMap::new();
        for x in &dom.tight().objects {
            tight_components.insert(x.clone(), cod.tight().identity(&f.ob(x)?)?);
        }
        let mut loose_components = BTreeMap::new();
        for l in dom.looses() {
            loose_components.insert(l.id.clone(), cod.identity_cell(&f.loose(&l.id)?)?);
        }
        Ok(Transformation {
            tight_components,
            loose_components,
        })
    }

    pub fn at_ob(&self, x: &Ident) -> Result<&Ident> {
        self.tight_components
            .get(x)
            .ok_or_else(|| VdcError::UnknownObject(x.clone()))
    }

    pub fn at_loose(&self, p: &Ident) -> Result<&Cell> {
        self.loose_components
            .get(p)
            .ok_or_else(|| VdcError::UnknownLoose(p.clone()))
    }

    /// Naturality violations within the chain bound. Naturality at nullary
    /// cells needs the codomain to support nullary restriction; frames
    /// where it does not are reported as skipped, not as failures.
    pub fn violations(
        &self,
        f: &dyn VdcFun,
        g: &dyn VdcFun,
        chain_bound: usize,
    ) -> (Vec<String>, Vec<String>) {
        let mut out = Vec::new();
        let mut skipped = Vec::new();
        let dom = f.dom();
        let cod = f.cod();
        for x in &dom.tight().objects {
            let Some(c) = self.tight_components.get(x) else {
                out.push(format!("missing tight component at {x}"));
                continue;
            };
            let ok = cod
                .tight()
                .mor(c)
                .map(|m| Ok::<bool, VdcError>(m.src == f.ob(x)? && m.tgt == g.ob(x)?))
                .unwrap_or(Ok(false));
            if !matches!(ok, Ok(true)) {
                out.push(format!("tight component at {x} has wrong endpoints"));
            }
        }
        for m in &dom.tight().morphisms {
            let lhs = (|| -> Result<Ident> {
                cod.tight()
                    .compose(&f.tight(&m.id)?, self.at_ob(&m.tgt)?)
            })();
            let rhs = (|| -> Result<Ident> {
                cod.tight()
                    .compose(self.at_ob(&m.src)?, &g.tight(&m.id)?)
            })();
            match (lhs, rhs) {
                (Ok(a), Ok(b)) if a == b => {}
                _ => out.push(format!("tight naturality fails at {}", m.id)),
            }
        }
        for l in dom.looses() {
            let Some(c) = self.loose_components.get(&l.id) else {
                out.push(format!("missing loose component at {}", l.id));
                continue;
            };
            let want = (|| -> Result<Frame> {
                Ok(Frame::new(
                    vec![f.loose(&l.id)?],
                    self.at_ob(&l.tgt)?.clone(),
                    self.at_ob(&l.src)?.clone(),
                    g.loose(&l.id)?,
                ))
            })();
            if want.ok().as_ref() != Some(&c.frame) || !cod.has_cell(c).unwrap_or(false) {
                out.push(format!("loose component at {} has wrong frame", l.id));
            }
        }
        if !out.is_empty() {
            return (out, skipped);
        }
        for frame in frames(dom.as_ref(), chain_bound) {
            let Ok(cells) = dom.cells(&frame) else {
                continue;
            };
            for id in cells {
                let chi = Cell {
                    frame: frame.clone(),
                    id,
                };
                let lhs = (|| -> Result<Cell> {
                    cod.compose(
                        &[f.cell(&chi)?],
                        self.at_loose(&frame.cod)?,
                    )
                })();
                if frame.arity() == 0 {
                    let rhs = (|| -> Result<Option<Cell>> {
                        let base = dom.tight().src(&frame.left)?;
                        let gchi = g.cell(&chi)?;
                        Ok(cod.restrict_nullary(&gchi, self.at_ob(base)?))
                    })();
                    match rhs {
                        Ok(Some(r)) => {
                            if lhs.ok() != Some(r) {
                                out.push(format!(
                                    "naturality fails at nullary cell {} at {}",
                                    chi.id, chi.frame
                                ));
                            }
                        }
                        Ok(None) => skipped.push(format!(
                            "nullary naturality unchecked at {} (no restriction)",
                            chi.frame
                        )),
                        Err(e) => out.push(format!("naturality at {}: {e}", chi.frame)),
                    }
                } else {
                    let rhs = (|| -> Result<Cell> {
                        let comps: Vec<Cell> = frame
                            .chain
                            .iter()
                            .map(|p| self.at_loose(p).cloned())
                            .collect::<Result<_>>()?;
                        cod.compose(&comps, &g.cell(&chi)?)
                    })();
                    match (lhs, rhs) {
                        (Ok(a), Ok(b)) if a == b => {}
                        _ => out.push(format!(
                            "naturality fails at cell {} at {}",
                            chi.id, chi.frame
                        )),
                    }
                }
            }
        }
        (out, skipped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn identity_functor_is_lawful() {
        let t = fixtures::terminal();
        let f = IdentityFun::new(t.vdc.clone());
        assert!(functor_violations(&f, 3, usize::MAX).is_empty());
    }

    #[test]
    fn functors_from_terminal_to_wlm() {
        // the bare walking loose morphism admits no functor from the
        // terminal vdc: no endo loose exists
        let t = fixtures::terminal();
        let w = fixtures::walking_loose_vdc();
        let fs = all_vdc_functors(&t.vdc, &w, 3, 100_000).unwrap();
        assert!(fs.is_empty());
    }

    #[test]
    fn functors_wlm_to_terminal() {
        let t = fixtures::terminal();
        let w = fixtures::walking_loose_vdc();
        let fs = all_vdc_functors(&w, &t.vdc, 3, 100_000).unwrap();
        assert_eq!(fs.len(), 1);
    }

    #[test]
    fn identity_transformation_is_natural() {
        let t = fixtures::terminal();
        let f = IdentityFun::new(t.vdc.clone());
        let tr = Transformation::identity(&f).unwrap();
        let (bad, skipped) = tr.violations(&f, &f, 3);
        assert!(bad.is_empty(), "{bad:?}");
        assert!(skipped.is_empty());
    }
}
