//! The free normal virtual double category on a virtual double category:
//! one formal loose identity is adjoined per object, cells over padded
//! chains are cells of the base over the chain with the padding erased,
//! and each tight morphism carries a unique cell between formal chains.

use crate::error::{Result, VdcError};
use crate::fincat::FinCat;
use crate::functor::VdcFun;
use crate::ident::{atom, tagged, Ident};
use crate::vdc::{
    check_frame, pasted_frame, Cell, Frame, Loose, NormalStructure, NormalVdc, Vdc, VdcHandle,
};
use std::collections::BTreeMap;
use std::sync::Arc;

pub fn base_loose(p: &Ident) -> Ident {
    tagged("b", vec![p.clone()])
}

pub fn formal_identity(x: &Ident) -> Ident {
    tagged("i", vec![x.clone()])
}

fn split_loose(p: &Ident) -> Result<FreeLoose<'_>> {
    match p.untag() {
        Some(("b", [q])) => Ok(FreeLoose::Base(q)),
        Some(("i", [x])) => Ok(FreeLoose::Formal(x)),
        _ => Err(VdcError::UnknownLoose(p.clone())),
    }
}

enum FreeLoose<'a> {
    Base(&'a Ident),
    Formal(#[allow(dead_code)] &'a Ident),
}

pub struct FreeNormalVdc {
    pub base: VdcHandle,
    looses: Vec<Loose>,
}

impl FreeNormalVdc {
    pub fn new(base: VdcHandle) -> Arc<FreeNormalVdc> {
        let mut looses: Vec<Loose> = base
            .looses()
            .iter()
            .map(|l| Loose {
                id: base_loose(&l.id),
                src: l.src.clone(),
                tgt: l.tgt.clone(),
            })
            .collect();
        for x in &base.tight().objects {
            looses.push(Loose {
                id: formal_identity(x),
                src: x.clone(),
                tgt: x.clone(),
            });
        }
        looses.sort();
        Arc::new(FreeNormalVdc { base, looses })
    }

    /// The erased chain: base entries only. Paddings are endomorphisms, so
    /// the boundary objects are unchanged.
    fn erase_chain(&self, chain: &[Ident]) -> Result<Vec<Ident>> {
        let mut out = Vec::new();
        for p in chain {
            if let FreeLoose::Base(q) = split_loose(p)? {
                out.push(q.clone());
            }
        }
        Ok(out)
    }

    fn erase_frame(&self, frame: &Frame) -> Result<Option<Frame>> {
        match split_loose(&frame.cod)? {
            FreeLoose::Formal(_) => Ok(None),
            FreeLoose::Base(q) => Ok(Some(Frame {
                chain: self.erase_chain(&frame.chain)?,
                left: frame.left.clone(),
                right: frame.right.clone(),
                cod: q.clone(),
            })),
        }
    }

    fn erase_cell(&self, cell: &Cell) -> Result<Option<Cell>> {
        Ok(self.erase_frame(&cell.frame)?.map(|frame| Cell {
            frame,
            id: cell.id.clone(),
        }))
    }
}

impl Vdc for FreeNormalVdc {
    fn name(&self) -> String {
        format!("F({})'", self.base.name())
    }
    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
    fn tight(&self) -> &FinCat {
        self.base.tight()
    }
    fn looses(&self) -> &[Loose] {
        &self.looses
    }
    fn cells(&self, frame: &Frame) -> Result<Vec<Ident>> {
        check_frame(self, frame)?;
        match split_loose(&frame.cod)? {
            FreeLoose::Formal(_) => {
                // unique cell per tight morphism, over equal tights, with an
                // all-formal chain
                let all_formal = frame
                    .chain
                    .iter()
                    .all(|p| matches!(split_loose(p), Ok(FreeLoose::Formal(_))));
                if all_formal && frame.left == frame.right {
                    Ok(vec![atom("!")])
                } else {
                    Ok(vec![])
                }
            }
            FreeLoose::Base(_) => {
                let erased = self.erase_frame(frame)?.unwrap();
                self.base.cells(&erased)
            }
        }
    }
    fn identity_cell(&self, p: &Ident) -> Result<Cell> {
        let l = crate::vdc::loose_data(self, p)?;
        let t = self.tight();
        let frame = Frame::new(
            vec![p.clone()],
            t.identity(&l.tgt)?,
            t.identity(&l.src)?,
            p.clone(),
        );
        match split_loose(p)? {
            FreeLoose::Formal(_) => Ok(Cell {
                frame,
                id: atom("!"),
            }),
            FreeLoose::Base(q) => Ok(Cell {
                frame,
                id: self.base.identity_cell(q)?.id,
            }),
        }
    }
    fn compose(&self, inner: &[Cell], outer: &Cell) -> Result<Cell> {
        let frames: Vec<Frame> = inner.iter().map(|c| c.frame.clone()).collect();
        let frame = pasted_frame(self, &frames, &outer.frame)?;
        if inner.is_empty() {
            return Ok(outer.clone());
        }
        match split_loose(&outer.frame.cod)? {
            FreeLoose::Formal(_) => Ok(Cell {
                frame,
                id: atom("!"),
            }),
            FreeLoose::Base(_) => {
                let outer_erased = self.erase_cell(outer)?.unwrap();
                let base_inners: Vec<Cell> = inner
                    .iter()
                    .filter_map(|c| self.erase_cell(c).transpose())
                    .collect::<Result<_>>()?;
                if base_inners.is_empty() {
                    // every inner cell is formal; they share one tight, and
                    // the erased outer is nullary
                    let x = &inner[0].frame.left;
                    let restricted = self
                        .base
                        .restrict_nullary(&outer_erased, x)
                        .ok_or_else(|| {
                            VdcError::Unsupported(format!(
                                "base {} does not support nullary restriction along {x}",
                                self.base.name()
                            ))
                        })?;
                    Ok(Cell {
                        frame,
                        id: restricted.id,
                    })
                } else {
                    let composite = self.base.compose(&base_inners, &outer_erased)?;
                    Ok(Cell {
                        frame,
                        id: composite.id,
                    })
                }
            }
        }
    }
    fn restrict_nullary(&self, cell: &Cell, tight: &Ident) -> Option<Cell> {
        if !cell.frame.chain.is_empty() {
            return None;
        }
        let t = self.tight();
        let frame = Frame::new(
            vec![],
            t.compose(tight, &cell.frame.left).ok()?,
            t.compose(tight, &cell.frame.right).ok()?,
            cell.frame.cod.clone(),
        );
        match split_loose(&cell.frame.cod).ok()? {
            FreeLoose::Formal(_) => (frame.left == frame.right).then(|| Cell {
                frame,
                id: atom("!"),
            }),
            FreeLoose::Base(_) => {
                let erased = self.erase_cell(cell).ok()??;
                let r = self.base.restrict_nullary(&erased, tight)?;
                Some(Cell { frame, id: r.id })
            }
        }
    }
}

/// The free normal virtual double category with its canonical structure.
pub fn free_normal(base: VdcHandle) -> NormalVdc {
    let f = FreeNormalVdc::new(base);
    let mut chosen_identity = BTreeMap::new();
    let mut chosen_nullary_opcart = BTreeMap::new();
    for x in &f.tight().objects {
        chosen_identity.insert(x.clone(), formal_identity(x));
        let idx = f.tight().identity(x).unwrap();
        chosen_nullary_opcart.insert(
            x.clone(),
            Cell {
                frame: Frame::new(vec![], idx.clone(), idx, formal_identity(x)),
                id: atom("!"),
            },
        );
    }
    NormalVdc {
        vdc: f,
        normal: NormalStructure {
            chosen_identity,
            chosen_nullary_opcart,
        },
    }
}

/// The unit embedding `X -> F(X)'`.
pub struct FreeUnitFun {
    pub base: VdcHandle,
    pub free: VdcHandle,
}

impl VdcFun for FreeUnitFun {
    fn name(&self) -> String {
        format!("unit({})", self.base.name())
    }
    fn dom(&self) -> &VdcHandle {
        &self.base
    }
    fn cod(&self) -> &VdcHandle {
        &self.free
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        Ok(x.clone())
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        Ok(f.clone())
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        Ok(base_loose(p))
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        Ok(Cell {
            frame: Frame {
                chain: c.frame.chain.iter().map(base_loose).collect(),
                left: c.frame.left.clone(),
                right: c.frame.right.clone(),
                cod: base_loose(&c.frame.cod),
            },
            id: c.id.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::vdc::frames;

    #[test]
    fn free_on_discrete_terminal_is_terminal() {
        // F(o1)' has one object and one loose morphism (the formal
        // identity) with a single cell per frame
        let f = free_normal(fixtures::discrete_terminal());
        assert_eq!(f.vdc.looses().len(), 1);
        let fs = frames(f.vdc.as_ref(), 3);
        assert_eq!(fs.len(), 4);
        for fr in &fs {
            assert_eq!(f.vdc.cells(&fr).unwrap().len(), 1);
        }
    }

    #[test]
    fn free_on_empty_is_empty() {
        let f = free_normal(fixtures::empty_vdc());
        assert!(f.vdc.looses().is_empty());
        assert!(f.vdc.tight().objects.is_empty());
    }

    #[test]
    fn free_on_walking_arrow_has_unique_cells_over_the_arrow() {
        // looses: two formal identities; over the non-identity tight there
        // is exactly one cell per formal frame
        let f = free_normal(fixtures::discrete_walking_arrow());
        assert_eq!(f.vdc.looses().len(), 2);
        let u = crate::ident::atom("u");
        let ia = formal_identity(&crate::ident::atom("a"));
        let ib = formal_identity(&crate::ident::atom("b"));
        let fr = Frame::new(vec![ia.clone(), ia.clone()], u.clone(), u.clone(), ib);
        assert_eq!(f.vdc.cells(&fr).unwrap(), vec![atom("!")]);
        // and none when the two tights differ
        let fr2 = Frame::new(vec![ia.clone()], u, crate::ident::atom("1a"), ia);
        assert!(f.vdc.cells(&fr2).unwrap_or_default().is_empty());
    }

    #[test]
    fn free_terminal_has_two_endo_looses() {
        // the base loose and the adjoined formal identity
        let f = free_normal(fixtures::terminal().vdc);
        assert_eq!(f.vdc.looses().len(), 2);
    }
}
