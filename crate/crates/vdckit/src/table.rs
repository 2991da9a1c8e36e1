//! Table-backed virtual double categories.
//!
//! All data is explicit: a finite cell table per frame up to a chain-length
//! bound, an identity table, and a composition table over configurations
//! within the bound. `complete` marks tables whose loose structure admits
//! no chains beyond the bound, in which case the table describes the whole
//! virtual double category and supports all arities.

use crate::error::{Result, VdcError};
use crate::fincat::FinCat;
use crate::ident::Ident;
use crate::vdc::{
    chains, check_frame, frames, pasted_frame, AritySupport, Cell, Frame, Loose, Vdc, VdcHandle,
};
use std::collections::BTreeMap;

pub type ComposeKey = (Vec<(Frame, Ident)>, (Frame, Ident));

pub struct TableVdc {
    pub name: String,
    pub tight: FinCat,
    pub looses: Vec<Loose>,
    pub cells: BTreeMap<Frame, Vec<Ident>>,
    pub identities: BTreeMap<Ident, Ident>,
    pub compose: BTreeMap<ComposeKey, Ident>,
    pub bound: usize,
    pub complete: bool,
}

impl TableVdc {
    /// Structural sanity of the tables; law checking is the checker's job.
    pub fn validate(&self) -> Result<()> {
        self.tight.validate()?;
        for l in &self.looses {
            if !self.tight.has_object(&l.src) || !self.tight.has_object(&l.tgt) {
                return Err(VdcError::CoherenceFailure(format!(
                    "loose {} has dangling endpoint",
                    l.id
                )));
            }
        }
        for frame in self.cells.keys() {
            check_frame(self, frame)?;
        }
        for l in &self.looses {
            let id = self.identities.get(&l.id).ok_or_else(|| {
                VdcError::CoherenceFailure(format!("loose {} has no identity cell", l.id))
            })?;
            let fr = self.identity_frame(&l.id)?;
            if !self.cells.get(&fr).map(|cs| cs.contains(id)).unwrap_or(false) {
                return Err(VdcError::CoherenceFailure(format!(
                    "identity cell of {} is not in its frame's cell table",
                    l.id
                )));
            }
        }
        Ok(())
    }

    fn identity_frame(&self, p: &Ident) -> Result<Frame> {
        let l = crate::vdc::loose_data(self, p)?;
        Ok(Frame::new(
            vec![p.clone()],
            self.tight.identity(&l.tgt)?,
            self.tight.identity(&l.src)?,
            p.clone(),
        ))
    }
}

impl Vdc for TableVdc {
    fn name(&self) -> String {
        self.name.clone()
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
    fn arity_support(&self) -> AritySupport {
        if self.complete {
            AritySupport::All
        } else {
            AritySupport::UpTo(self.bound)
        }
    }
    fn cells(&self, frame: &Frame) -> Result<Vec<Ident>> {
        check_frame(self, frame)?;
        if frame.arity() > self.bound && !self.complete {
            return Err(VdcError::UnsupportedArity {
                requested: frame.arity(),
                supported: self.bound,
            });
        }
        Ok(self.cells.get(frame).cloned().unwrap_or_default())
    }
    fn identity_cell(&self, p: &Ident) -> Result<Cell> {
        let id = self
            .identities
            .get(p)
            .ok_or_else(|| VdcError::UnknownLoose(p.clone()))?;
        Ok(Cell {
            frame: self.identity_frame(p)?,
            id: id.clone(),
        })
    }
    fn compose(&self, inner: &[Cell], outer: &Cell) -> Result<Cell> {
        let frames: Vec<Frame> = inner.iter().map(|c| c.frame.clone()).collect();
        let frame = pasted_frame(self, &frames, &outer.frame)?;
        if inner.is_empty() {
            return Ok(outer.clone());
        }
        if frame.arity() > self.bound && !self.complete {
            return Err(VdcError::UnsupportedArity {
                requested: frame.arity(),
                supported: self.bound,
            });
        }
        let key: ComposeKey = (
            inner
                .iter()
                .map(|c| (c.frame.clone(), c.id.clone()))
                .collect(),
            (outer.frame.clone(), outer.id.clone()),
        );
        let id = self.compose.get(&key).ok_or_else(|| {
            VdcError::Unsupported(format!(
                "composition table has no entry for outer {} in frame {}",
                outer.id, outer.frame
            ))
        })?;
        Ok(Cell {
            frame,
            id: id.clone(),
        })
    }
}

/// Whether a handle's loose structure admits any composable chain longer
/// than `bound`; if not, a table at `bound` is total.
pub fn chains_stop_at(vdc: &dyn Vdc, bound: usize) -> bool {
    chains(vdc, bound + 1).is_empty()
}

/// Materialize any handle as an explicit table within a chain-length bound.
pub fn tabulate(vdc: &VdcHandle, bound: usize) -> Result<TableVdc> {
    let mut cells = BTreeMap::new();
    let all_frames = frames(vdc.as_ref(), bound);
    for frame in &all_frames {
        let cs = vdc.cells(frame)?;
        if !cs.is_empty() {
            cells.insert(frame.clone(), cs);
        }
    }
    let mut identities = BTreeMap::new();
    for l in vdc.looses() {
        identities.insert(l.id.clone(), vdc.identity_cell(&l.id)?.id);
    }
    let mut compose = BTreeMap::new();
    // All configurations whose pasted chain stays within the bound.
    for outer_frame in &all_frames {
        let outer_cells = cells.get(outer_frame).cloned().unwrap_or_default();
        if outer_cells.is_empty() {
            continue;
        }
        let slot_fill = inner_configurations(vdc.as_ref(), &cells, outer_frame, bound);
        for inner in &slot_fill {
            for oc in &outer_cells {
                let outer_cell = Cell {
                    frame: outer_frame.clone(),
                    id: oc.clone(),
                };
                let composite = vdc.compose(inner, &outer_cell)?;
                if inner.is_empty() {
                    continue;
                }
                let key: ComposeKey = (
                    inner
                        .iter()
                        .map(|c| (c.frame.clone(), c.id.clone()))
                        .collect(),
                    (outer_frame.clone(), oc.clone()),
                );
                compose.insert(key, composite.id);
            }
        }
    }
    let table = TableVdc {
        name: format!("table({})", vdc.name()),
        tight: vdc.tight().clone(),
        looses: vdc.looses().to_vec(),
        cells,
        identities,
        compose,
        bound,
        complete: chains_stop_at(vdc.as_ref(), bound),
    };
    table.validate()?;
    Ok(table)
}

/// All ways to fill the slots of `outer_frame` with cells from `cells`,
/// keeping the total pasted arity within `bound`.
pub fn inner_configurations(
    vdc: &dyn Vdc,
    cells: &BTreeMap<Frame, Vec<Ident>>,
    outer_frame: &Frame,
    bound: usize,
) -> Vec<Vec<Cell>> {
    let t = vdc.tight();
    let m = outer_frame.chain.len();
    if m == 0 {
        return vec![vec![]];
    }
    // candidate cells per slot, grouped by (left tight, right tight)
    let mut acc: Vec<(Vec<Cell>, usize)> = vec![(vec![], 0)];
    for i in 0..m {
        let cod = &outer_frame.chain[i];
        let mut next = Vec::new();
        for (prefix, used) in &acc {
            for (frame, ids) in cells.iter() {
                if &frame.cod != cod {
                    continue;
                }
                if used + frame.arity() > bound {
                    continue;
                }
                if let Some(last) = prefix.last() {
                    if last.frame.right != frame.left {
                        continue;
                    }
                }
                // boundary sanity: the frame's tights must exist
                if t.mor(&frame.left).is_none() || t.mor(&frame.right).is_none() {
                    continue;
                }
                for id in ids {
                    let mut p = prefix.clone();
                    p.push(Cell {
                        frame: frame.clone(),
                        id: id.clone(),
                    });
                    next.push((p, used + frame.arity()));
                }
            }
        }
        acc = next;
    }
    acc.into_iter().map(|(cells, _)| cells).collect()
}
