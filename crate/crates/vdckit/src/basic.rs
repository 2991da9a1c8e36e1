//! The terminal, discrete, and chaotic virtual double categories.

use crate::error::{Result, VdcError};
use crate::fincat::FinCat;
use crate::ident::{atom, tagged, Ident};
use crate::vdc::{
    check_frame, pasted_frame, Cell, Frame, Loose, NormalStructure, NormalVdc, Vdc,
};
use std::collections::BTreeMap;
use std::sync::Arc;

/// The terminal virtual double category: one object, one tight morphism,
/// one loose morphism, and a single n-ary cell for each n.
pub struct TerminalVdc {
    tight: FinCat,
    looses: Vec<Loose>,
}

pub const UNIQUE_CELL: &str = "!";

impl TerminalVdc {
    pub fn new() -> TerminalVdc {
        TerminalVdc {
            tight: crate::fincat::terminal_cat(),
            looses: vec![Loose {
                id: atom("l"),
                src: atom("*"),
                tgt: atom("*"),
            }],
        }
    }
}

impl Default for TerminalVdc {
    fn default() -> Self {
        Self::new()
    }
}

impl Vdc for TerminalVdc {
    fn name(&self) -> String {
        "terminal".into()
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
        check_frame(self, frame)?;
        Ok(vec![atom(UNIQUE_CELL)])
    }
    fn identity_cell(&self, p: &Ident) -> Result<Cell> {
        if p != &atom("l") {
            return Err(VdcError::UnknownLoose(p.clone()));
        }
        Ok(Cell {
            frame: Frame::new(vec![atom("l")], atom("1"), atom("1"), atom("l")),
            id: atom(UNIQUE_CELL),
        })
    }
    fn compose(&self, inner: &[Cell], outer: &Cell) -> Result<Cell> {
        let frames: Vec<Frame> = inner.iter().map(|c| c.frame.clone()).collect();
        let frame = pasted_frame(self, &frames, &outer.frame)?;
        Ok(Cell {
            frame,
            id: atom(UNIQUE_CELL),
        })
    }
    fn restrict_nullary(&self, cell: &Cell, _tight: &Ident) -> Option<Cell> {
        Some(cell.clone())
    }
}

pub fn terminal_vdc() -> NormalVdc {
    let vdc: Arc<dyn Vdc> = Arc::new(TerminalVdc::new());
    let mut chosen_identity = BTreeMap::new();
    chosen_identity.insert(atom("*"), atom("l"));
    let mut chosen_nullary_opcart = BTreeMap::new();
    chosen_nullary_opcart.insert(
        atom("*"),
        Cell {
            frame: Frame::new(vec![], atom("1"), atom("1"), atom("l")),
            id: atom(UNIQUE_CELL),
        },
    );
    NormalVdc {
        vdc,
        normal: NormalStructure {
            chosen_identity,
            chosen_nullary_opcart,
        },
    }
}

/// The discrete virtual double category on a category: no loose morphisms
/// and no cells.
pub struct DiscreteVdc {
    name: String,
    tight: FinCat,
    looses: Vec<Loose>,
}

impl DiscreteVdc {
    pub fn new(name: impl Into<String>, cat: FinCat) -> DiscreteVdc {
        DiscreteVdc {
            name: name.into(),
            tight: cat,
            looses: vec![],
        }
    }
}

impl Vdc for DiscreteVdc {
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
    fn cells(&self, frame: &Frame) -> Result<Vec<Ident>> {
        Err(VdcError::UnknownLoose(frame.cod.clone()))
    }
    fn identity_cell(&self, p: &Ident) -> Result<Cell> {
        Err(VdcError::UnknownLoose(p.clone()))
    }
    fn compose(&self, _inner: &[Cell], outer: &Cell) -> Result<Cell> {
        Err(VdcError::UnknownLoose(outer.frame.cod.clone()))
    }
}

pub fn discrete_vdc(cat: FinCat) -> Arc<dyn Vdc> {
    Arc::new(DiscreteVdc::new("discrete", cat))
}

/// The chaotic virtual double category on a category: a unique loose
/// morphism between every ordered pair of objects and a unique cell in
/// every frame.
pub struct ChaoticVdc {
    name: String,
    tight: FinCat,
    looses: Vec<Loose>,
}

pub fn chaotic_loose(a: &Ident, b: &Ident) -> Ident {
    tagged("ch", vec![a.clone(), b.clone()])
}

impl ChaoticVdc {
    pub fn new(name: impl Into<String>, cat: FinCat) -> ChaoticVdc {
        let mut looses = Vec::new();
        for a in &cat.objects {
            for b in &cat.objects {
                looses.push(Loose {
                    id: chaotic_loose(a, b),
                    src: a.clone(),
                    tgt: b.clone(),
                });
            }
        }
        looses.sort();
        ChaoticVdc {
            name: name.into(),
            tight: cat,
            looses,
        }
    }
}

impl Vdc for ChaoticVdc {
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
    fn cells(&self, frame: &Frame) -> Result<Vec<Ident>> {
        check_frame(self, frame)?;
        Ok(vec![atom(UNIQUE_CELL)])
    }
    fn identity_cell(&self, p: &Ident) -> Result<Cell> {
        let l = crate::vdc::loose_data(self, p)?;
        Ok(Cell {
            frame: Frame::new(
                vec![p.clone()],
                self.tight.identity(&l.tgt)?,
                self.tight.identity(&l.src)?,
                p.clone(),
            ),
            id: atom(UNIQUE_CELL),
        })
    }
    fn compose(&self, inner: &[Cell], outer: &Cell) -> Result<Cell> {
        let frames: Vec<Frame> = inner.iter().map(|c| c.frame.clone()).collect();
        let frame = pasted_frame(self, &frames, &outer.frame)?;
        Ok(Cell {
            frame,
            id: atom(UNIQUE_CELL),
        })
    }
    fn restrict_nullary(&self, cell: &Cell, tight: &Ident) -> Option<Cell> {
        let t = self.tight();
        let src = t.src(tight).ok()?.clone();
        let left = t.compose(tight, &cell.frame.left).ok()?;
        let right = t.compose(tight, &cell.frame.right).ok()?;
        let _ = src;
        Some(Cell {
            frame: Frame::new(vec![], left, right, cell.frame.cod.clone()),
            id: atom(UNIQUE_CELL),
        })
    }
}

/// The chaotic embedding of a category, with its canonical normal structure.
pub fn chaotic_vdc(cat: FinCat) -> NormalVdc {
    let ch = ChaoticVdc::new("chaotic", cat);
    let mut chosen_identity = BTreeMap::new();
    let mut chosen_nullary_opcart = BTreeMap::new();
    for a in &ch.tight.objects {
        chosen_identity.insert(a.clone(), chaotic_loose(a, a));
        chosen_nullary_opcart.insert(
            a.clone(),
            Cell {
                frame: Frame::new(
                    vec![],
                    ch.tight.identity(a).unwrap(),
                    ch.tight.identity(a).unwrap(),
                    chaotic_loose(a, a),
                ),
                id: atom(UNIQUE_CELL),
            },
        );
    }
    NormalVdc {
        vdc: Arc::new(ch),
        normal: NormalStructure {
            chosen_identity,
            chosen_nullary_opcart,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vdc::frames;

    #[test]
    fn terminal_has_one_cell_per_frame() {
        let t = terminal_vdc();
        let fs = frames(t.vdc.as_ref(), 3);
        // chains of length 0..=3 over the unique endo loose, identity tights
        assert_eq!(fs.len(), 4);
        for f in &fs {
            assert_eq!(t.vdc.cells(&f).unwrap().len(), 1);
        }
    }

    #[test]
    fn discrete_terminal_has_no_frames() {
        let d = discrete_vdc(crate::fincat::terminal_cat());
        assert!(frames(d.as_ref(), 3).is_empty());
    }

    #[test]
    fn chaotic_of_empty_is_empty() {
        let c = chaotic_vdc(crate::fincat::empty_cat());
        assert!(c.vdc.looses().is_empty());
        assert!(frames(c.vdc.as_ref(), 2).is_empty());
    }

    #[test]
    fn chaotic_of_terminal_matches_terminal() {
        let c = chaotic_vdc(crate::fincat::terminal_cat());
        let t = terminal_vdc();
        assert_eq!(c.vdc.looses().len(), t.vdc.looses().len());
        assert_eq!(
            frames(c.vdc.as_ref(), 3).len(),
            frames(t.vdc.as_ref(), 3).len()
        );
    }
}
