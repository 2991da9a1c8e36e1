//! Binary products of virtual double categories, componentwise at every
//! stratum.

use crate::error::{Result, VdcError};
use crate::fincat::FinCat;
use crate::functor::{FunHandle, VdcFun};
use crate::ident::Ident;
use crate::vdc::{check_frame, pasted_frame, AritySupport, Cell, Frame, Loose, Vdc, VdcHandle};
use std::sync::Arc;

pub fn pair(x: &Ident, y: &Ident) -> Ident {
    Ident::List(vec![x.clone(), y.clone()])
}

pub fn unpair(x: &Ident) -> Result<(&Ident, &Ident)> {
    match x.as_list() {
        Some([a, b]) => Ok((a, b)),
        _ => Err(VdcError::ShapeMismatch(format!("{x} is not a pair"))),
    }
}

pub struct ProductVdc {
    pub left: VdcHandle,
    pub right: VdcHandle,
    tight: FinCat,
    looses: Vec<Loose>,
}

impl ProductVdc {
    pub fn new(left: VdcHandle, right: VdcHandle) -> Arc<ProductVdc> {
        let tight = left.tight().product(right.tight());
        let mut looses = Vec::new();
        for p in left.looses() {
            for q in right.looses() {
                looses.push(Loose {
                    id: pair(&p.id, &q.id),
                    src: pair(&p.src, &q.src),
                    tgt: pair(&p.tgt, &q.tgt),
                });
            }
        }
        looses.sort();
        Arc::new(ProductVdc {
            left,
            right,
            tight,
            looses,
        })
    }

    pub fn split_frame(&self, frame: &Frame) -> Result<(Frame, Frame)> {
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for p in &frame.chain {
            let (a, b) = unpair(p)?;
            c1.push(a.clone());
            c2.push(b.clone());
        }
        let (l1, l2) = unpair(&frame.left)?;
        let (r1, r2) = unpair(&frame.right)?;
        let (q1, q2) = unpair(&frame.cod)?;
        Ok((
            Frame::new(c1, l1.clone(), r1.clone(), q1.clone()),
            Frame::new(c2, l2.clone(), r2.clone(), q2.clone()),
        ))
    }

    pub fn split_cell(&self, cell: &Cell) -> Result<(Cell, Cell)> {
        let (f1, f2) = self.split_frame(&cell.frame)?;
        let (a, b) = unpair(&cell.id)?;
        Ok((
            Cell {
                frame: f1,
                id: a.clone(),
            },
            Cell {
                frame: f2,
                id: b.clone(),
            },
        ))
    }
}

impl Vdc for ProductVdc {
    fn name(&self) -> String {
        format!("{} x {}", self.left.name(), self.right.name())
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
        match (self.left.arity_support(), self.right.arity_support()) {
            (AritySupport::All, AritySupport::All) => AritySupport::All,
            (AritySupport::UpTo(a), AritySupport::All) => AritySupport::UpTo(a),
            (AritySupport::All, AritySupport::UpTo(b)) => AritySupport::UpTo(b),
            (AritySupport::UpTo(a), AritySupport::UpTo(b)) => AritySupport::UpTo(a.min(b)),
        }
    }
    fn cells(&self, frame: &Frame) -> Result<Vec<Ident>> {
        check_frame(self, frame)?;
        let (f1, f2) = self.split_frame(frame)?;
        let cs1 = self.left.cells(&f1)?;
        let cs2 = self.right.cells(&f2)?;
        let mut out = Vec::with_capacity(cs1.len() * cs2.len());
        for a in &cs1 {
            for b in &cs2 {
                out.push(pair(a, b));
            }
        }
        out.sort();
        Ok(out)
    }
    fn identity_cell(&self, p: &Ident) -> Result<Cell> {
        let (a, b) = unpair(p)?;
        let c1 = self.left.identity_cell(a)?;
        let c2 = self.right.identity_cell(b)?;
        Ok(Cell {
            frame: Frame::new(
                vec![p.clone()],
                pair(&c1.frame.left, &c2.frame.left),
                pair(&c1.frame.right, &c2.frame.right),
                p.clone(),
            ),
            id: pair(&c1.id, &c2.id),
        })
    }
    fn compose(&self, inner: &[Cell], outer: &Cell) -> Result<Cell> {
        let frames: Vec<Frame> = inner.iter().map(|c| c.frame.clone()).collect();
        let frame = pasted_frame(self, &frames, &outer.frame)?;
        if inner.is_empty() {
            return Ok(outer.clone());
        }
        let splits: Vec<(Cell, Cell)> = inner
            .iter()
            .map(|c| self.split_cell(c))
            .collect::<Result<_>>()?;
        let (o1, o2) = self.split_cell(outer)?;
        let i1: Vec<Cell> = splits.iter().map(|(a, _)| a.clone()).collect();
        let i2: Vec<Cell> = splits.iter().map(|(_, b)| b.clone()).collect();
        let c1 = self.left.compose(&i1, &o1)?;
        let c2 = self.right.compose(&i2, &o2)?;
        Ok(Cell {
            frame,
            id: pair(&c1.id, &c2.id),
        })
    }
    fn restrict_nullary(&self, cell: &Cell, tight: &Ident) -> Option<Cell> {
        let (c1, c2) = self.split_cell(cell).ok()?;
        let (t1, t2) = unpair(tight).ok()?;
        let r1 = self.left.restrict_nullary(&c1, t1)?;
        let r2 = self.right.restrict_nullary(&c2, t2)?;
        Some(Cell {
            frame: Frame::new(
                vec![],
                pair(&r1.frame.left, &r2.frame.left),
                pair(&r1.frame.right, &r2.frame.right),
                cell.frame.cod.clone(),
            ),
            id: pair(&r1.id, &r2.id),
        })
    }
}

/// The two projection functors of a product.
pub struct ProjectionFun {
    product: Arc<ProductVdc>,
    handle: VdcHandle,
    target: VdcHandle,
    first: bool,
}

pub fn projections(p: &Arc<ProductVdc>) -> (FunHandle, FunHandle) {
    let handle: VdcHandle = p.clone();
    (
        Arc::new(ProjectionFun {
            product: p.clone(),
            handle: handle.clone(),
            target: p.left.clone(),
            first: true,
        }),
        Arc::new(ProjectionFun {
            product: p.clone(),
            handle,
            target: p.right.clone(),
            first: false,
        }),
    )
}

impl VdcFun for ProjectionFun {
    fn name(&self) -> String {
        format!("pi{}", if self.first { 1 } else { 2 })
    }
    fn dom(&self) -> &VdcHandle {
        &self.handle
    }
    fn cod(&self) -> &VdcHandle {
        &self.target
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        let (a, b) = unpair(x)?;
        Ok(if self.first { a.clone() } else { b.clone() })
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        self.ob(f)
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        self.ob(p)
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        let (c1, c2) = self.product.split_cell(c)?;
        Ok(if self.first { c1 } else { c2 })
    }
}

/// The pairing of two functors into a product.
pub struct PairFun {
    pub f: FunHandle,
    pub g: FunHandle,
    pub target: VdcHandle,
}

impl VdcFun for PairFun {
    fn name(&self) -> String {
        format!("<{}, {}>", self.f.name(), self.g.name())
    }
    fn dom(&self) -> &VdcHandle {
        self.f.dom()
    }
    fn cod(&self) -> &VdcHandle {
        &self.target
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        Ok(pair(&self.f.ob(x)?, &self.g.ob(x)?))
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        Ok(pair(&self.f.tight(f)?, &self.g.tight(f)?))
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        Ok(pair(&self.f.loose(p)?, &self.g.loose(p)?))
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        let a = self.f.cell(c)?;
        let b = self.g.cell(c)?;
        Ok(Cell {
            frame: Frame::new(
                c.frame
                    .chain
                    .iter()
                    .map(|p| Ok(pair(&self.f.loose(p)?, &self.g.loose(p)?)))
                    .collect::<Result<_>>()?,
                pair(&a.frame.left, &b.frame.left),
                pair(&a.frame.right, &b.frame.right),
                pair(&a.frame.cod, &b.frame.cod),
            ),
            id: pair(&a.id, &b.id),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::vdc::frames;

    #[test]
    fn cells_of_product_are_pairs() {
        let t = fixtures::terminal();
        let w = fixtures::walking_loose_vdc();
        let p = ProductVdc::new(t.vdc.clone(), w.clone());
        for f in frames(p.as_ref(), 2) {
            let (f1, f2) = p.split_frame(&f).unwrap();
            assert_eq!(
                p.cells(&f).unwrap().len(),
                p.left.cells(&f1).unwrap().len() * p.right.cells(&f2).unwrap().len()
            );
        }
    }

    #[test]
    fn product_with_discrete_terminal_forgets_looses() {
        // X x o1 has no loose morphisms at all
        let t = fixtures::terminal();
        let d = fixtures::discrete_terminal();
        let p = ProductVdc::new(t.vdc.clone(), d);
        assert!(p.looses().is_empty());
        assert_eq!(p.tight().objects.len(), 1);
    }
}
