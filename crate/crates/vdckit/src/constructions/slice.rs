//! Slices of a virtual double category over a loose monad, as the comma
//! object unwound to finite data.
//!
//! Objects are pairs of an object with a tight morphism into the monad's
//! carrier; loose morphisms carry a comparison cell into the monad; a cell
//! is a base cell whose pasting into the codomain comparison equals the
//! chain's comparisons pasted into the iterated multiplication.

use crate::constructions::monads::{monad_violations, Monad};
use crate::error::{Result, VdcError};
use crate::fincat::{FinCat, MorData};
use crate::functor::{FunHandle, VdcFun};
use crate::ident::{tagged, Ident};
use crate::vdc::{check_frame, pasted_frame, Cell, Frame, Loose, Vdc, VdcHandle};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

fn slice_ob(a: &Ident, u: &Ident) -> Ident {
    tagged("sl", vec![a.clone(), u.clone()])
}

fn slice_loose(p: &Ident, alpha: &Ident) -> Ident {
    tagged("sp", vec![p.clone(), alpha.clone()])
}

pub struct SliceVdc {
    pub base: VdcHandle,
    pub monad: Monad,
    tight: FinCat,
    looses: Vec<Loose>,
    /// comparison cell per slice loose
    comparisons: BTreeMap<Ident, Cell>,
    /// underlying data per slice object
    anchors: BTreeMap<Ident, (Ident, Ident)>,
    cell_cache: Mutex<BTreeMap<Frame, Vec<Ident>>>,
}

impl SliceVdc {
    pub fn new(base: VdcHandle, monad: Monad) -> Result<Arc<SliceVdc>> {
        let bad = monad_violations(base.as_ref(), &monad);
        if !bad.is_empty() {
            return Err(VdcError::InvalidMonad(bad.join("; ")));
        }
        let bt = base.tight();
        let mut objects = Vec::new();
        let mut anchors = BTreeMap::new();
        for a in &bt.objects {
            for u in bt.hom(a, &monad.carrier) {
                let id = slice_ob(a, &u);
                objects.push(id.clone());
                anchors.insert(id, (a.clone(), u));
            }
        }
        objects.sort();
        let mut morphisms = Vec::new();
        let mut id_of = BTreeMap::new();
        let mut comp = BTreeMap::new();
        for (x, (a, u)) in &anchors {
            for (y, (b, v)) in &anchors {
                for f in bt.hom(a, b) {
                    if &bt.compose(&f, v)? == u {
                        morphisms.push(MorData {
                            id: f.clone(),
                            src: x.clone(),
                            tgt: y.clone(),
                        });
                    }
                }
            }
            id_of.insert(x.clone(), bt.identity(a)?);
        }
        // tight composition is inherited; keys must pair the same underlying
        // morphisms with matching middle anchors
        for m in &morphisms {
            for n in &morphisms {
                if m.tgt != n.src {
                    continue;
                }
                comp.insert(
                    (m.id.clone(), n.id.clone()),
                    bt.compose(&m.id, &n.id)?,
                );
            }
        }
        // deduplicate parallel entries introduced by shared underlying ids:
        // slice tights are identified by their underlying tight, which is
        // unambiguous because the anchor condition pins src and tgt
        morphisms.sort_by(|a, b| (a.src.clone(), a.tgt.clone(), a.id.clone()).cmp(&(
            b.src.clone(),
            b.tgt.clone(),
            b.id.clone(),
        )));
        morphisms.dedup();
        let tight = FinCat {
            objects,
            morphisms,
            id_of,
            comp,
        };
        let mut looses = Vec::new();
        let mut comparisons = BTreeMap::new();
        for (x, (a, u)) in &anchors {
            for (y, (b, v)) in &anchors {
                // loose from x to y: base loose p : a -/-> b with a cell
                // (p; v, u; T)
                for p in base.looses() {
                    if &p.src != a || &p.tgt != b {
                        continue;
                    }
                    let frame = Frame::new(
                        vec![p.id.clone()],
                        v.clone(),
                        u.clone(),
                        monad.endo.clone(),
                    );
                    for alpha in base.cells(&frame)? {
                        let id = slice_loose(&p.id, &alpha);
                        looses.push(Loose {
                            id: id.clone(),
                            src: x.clone(),
                            tgt: y.clone(),
                        });
                        comparisons.insert(
                            id,
                            Cell {
                                frame: frame.clone(),
                                id: alpha,
                            },
                        );
                    }
                }
            }
        }
        looses.sort();
        Ok(Arc::new(SliceVdc {
            base,
            monad,
            tight,
            looses,
            comparisons,
            anchors,
            cell_cache: Mutex::new(BTreeMap::new()),
        }))
    }

    pub fn anchor(&self, x: &Ident) -> Result<&(Ident, Ident)> {
        self.anchors
            .get(x)
            .ok_or_else(|| VdcError::UnknownObject(x.clone()))
    }

    pub fn comparison(&self, p: &Ident) -> Result<&Cell> {
        self.comparisons
            .get(p)
            .ok_or_else(|| VdcError::UnknownLoose(p.clone()))
    }

    pub fn underlying_loose(&self, p: &Ident) -> Result<Ident> {
        match p.untag() {
            Some(("sp", [q, _])) => Ok(q.clone()),
            _ => Err(VdcError::UnknownLoose(p.clone())),
        }
    }

    fn underlying_frame(&self, frame: &Frame) -> Result<Frame> {
        Ok(Frame {
            chain: frame
                .chain
                .iter()
                .map(|p| self.underlying_loose(p))
                .collect::<Result<_>>()?,
            left: frame.left.clone(),
            right: frame.right.clone(),
            cod: self.underlying_loose(&frame.cod)?,
        })
    }

    /// The slice cell condition: the base cell pasted into the codomain
    /// comparison equals the chain comparisons pasted into the iterated
    /// multiplication.
    fn is_slice_cell(&self, frame: &Frame, under: &Cell) -> Result<bool> {
        let beta = self.comparison(&frame.cod)?;
        let lhs = self.base.compose(&[under.clone()], beta)?;
        let n = frame.chain.len();
        let rhs = if n == 0 {
            // whisker the monad unit along the nullary cell's anchor
            let x = slice_ob_of_frame(self, frame)?;
            let (_, w) = self.anchor(&x)?.clone();
            match self.base.restrict_nullary(&self.monad.unit, &w) {
                Some(c) => c,
                None => {
                    return Err(VdcError::Unsupported(format!(
                        "base {} does not support nullary restriction along {w}",
                        self.base.name()
                    )))
                }
            }
        } else {
            let comps: Vec<Cell> = frame
                .chain
                .iter()
                .map(|p| self.comparison(p).cloned())
                .collect::<Result<_>>()?;
            let multn = self.monad.mult_n(self.base.as_ref(), n)?;
            self.base.compose(&comps, &multn)?
        };
        Ok(lhs == rhs)
    }
}

fn slice_ob_of_frame(s: &SliceVdc, frame: &Frame) -> Result<Ident> {
    // the slice object a nullary cell sits at: source of the left tight
    s.tight
        .src(&frame.left)
        .map(|x| x.clone())
}

impl Vdc for SliceVdc {
    fn name(&self) -> String {
        format!("{}/T", self.base.name())
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
        let under = self.underlying_frame(frame)?;
        // the underlying frame uses the slice tights' underlying morphisms,
        // which coincide with the slice identifiers
        let mut under = under;
        under.left = frame.left.clone();
        under.right = frame.right.clone();
        let mut out = Vec::new();
        for id in self.base.cells(&under)? {
            let cell = Cell {
                frame: under.clone(),
                id: id.clone(),
            };
            if self.is_slice_cell(frame, &cell)? {
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
        let l = crate::vdc::loose_data(self, p)?;
        let q = self.underlying_loose(p)?;
        Ok(Cell {
            frame: Frame::new(
                vec![p.clone()],
                self.tight.identity(&l.tgt)?,
                self.tight.identity(&l.src)?,
                p.clone(),
            ),
            id: self.base.identity_cell(&q)?.id,
        })
    }
    fn compose(&self, inner: &[Cell], outer: &Cell) -> Result<Cell> {
        let frames: Vec<Frame> = inner.iter().map(|c| c.frame.clone()).collect();
        let frame = pasted_frame(self, &frames, &outer.frame)?;
        if inner.is_empty() {
            return Ok(outer.clone());
        }
        let to_base = |c: &Cell| -> Result<Cell> {
            let mut f = self.underlying_frame(&c.frame)?;
            f.left = c.frame.left.clone();
            f.right = c.frame.right.clone();
            Ok(Cell {
                frame: f,
                id: c.id.clone(),
            })
        };
        let bi: Vec<Cell> = inner.iter().map(to_base).collect::<Result<_>>()?;
        let bo = to_base(outer)?;
        let composite = self.base.compose(&bi, &bo)?;
        Ok(Cell {
            frame,
            id: composite.id,
        })
    }
    fn restrict_nullary(&self, cell: &Cell, tight: &Ident) -> Option<Cell> {
        if !cell.frame.chain.is_empty() {
            return None;
        }
        let mut under = self.underlying_frame(&cell.frame).ok()?;
        under.left = cell.frame.left.clone();
        under.right = cell.frame.right.clone();
        let r = self.base.restrict_nullary(
            &Cell {
                frame: under,
                id: cell.id.clone(),
            },
            tight,
        )?;
        let t = self.tight();
        Some(Cell {
            frame: Frame::new(
                vec![],
                t.compose(tight, &cell.frame.left).ok()?,
                t.compose(tight, &cell.frame.right).ok()?,
                cell.frame.cod.clone(),
            ),
            id: r.id,
        })
    }
}

/// The projection functor from the slice to the base.
pub struct SliceProjection {
    pub slice: Arc<SliceVdc>,
    pub handle: VdcHandle,
}

pub fn slice_projection(s: &Arc<SliceVdc>) -> FunHandle {
    Arc::new(SliceProjection {
        slice: s.clone(),
        handle: s.clone() as VdcHandle,
    })
}

impl VdcFun for SliceProjection {
    fn name(&self) -> String {
        "slice-projection".into()
    }
    fn dom(&self) -> &VdcHandle {
        &self.handle
    }
    fn cod(&self) -> &VdcHandle {
        &self.slice.base
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        Ok(self.slice.anchor(x)?.0.clone())
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        Ok(f.clone())
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        self.slice.underlying_loose(p)
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        let mut f = self.slice.underlying_frame(&c.frame)?;
        f.left = c.frame.left.clone();
        f.right = c.frame.right.clone();
        Ok(Cell {
            frame: f,
            id: c.id.clone(),
        })
    }
}

/// Slice a virtual double category over a loose monad.
pub fn slice_vdc(base: VdcHandle, monad: Monad) -> Result<Arc<SliceVdc>> {
    SliceVdc::new(base, monad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ident::atom;

    #[test]
    fn slice_of_terminal_over_its_monad_is_terminal() {
        let t = fixtures::terminal();
        let monad = Monad {
            carrier: atom("*"),
            endo: atom("l"),
            mult: Cell {
                frame: Frame::new(
                    vec![atom("l"), atom("l")],
                    atom("1"),
                    atom("1"),
                    atom("l"),
                ),
                id: atom("!"),
            },
            unit: Cell {
                frame: Frame::new(vec![], atom("1"), atom("1"), atom("l")),
                id: atom("!"),
            },
        };
        let s = slice_vdc(t.vdc.clone(), monad).unwrap();
        assert_eq!(s.tight().objects.len(), 1);
        assert_eq!(s.looses().len(), 1);
        let l = s.looses()[0].clone();
        let fr = Frame::new(
            vec![l.id.clone(), l.id.clone()],
            s.tight().id_of[&l.src].clone(),
            s.tight().id_of[&l.src].clone(),
            l.id.clone(),
        );
        assert_eq!(s.cells(&fr).unwrap().len(), 1);
    }

    #[test]
    fn slice_of_span_over_z2() {
        let z = fixtures::z2_span_monad();
        let monad = Monad {
            carrier: z.carrier.clone(),
            endo: z.endo.id.clone(),
            mult: z.mult.clone(),
            unit: z.unit.clone(),
        };
        let s = slice_vdc(z.span.clone() as VdcHandle, monad).unwrap();
        // objects: tights from each set into 1; every set of size <= 2 has
        // exactly one map to 1, the empty set included
        assert_eq!(s.tight().objects.len(), 3);
        assert!(!s.looses().is_empty());
        // cells compose and stay in the slice
        for l in s.looses().iter().take(4) {
            let c = s.identity_cell(&l.id).unwrap();
            let cc = s.compose(&[c.clone()], &c).unwrap();
            assert_eq!(cc, c);
        }
    }
}
