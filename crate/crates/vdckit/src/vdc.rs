//! The uniform interface to a finite virtual double category.
//!
//! Conventions, fixed once for the whole toolkit:
//!
//! * A loose morphism `p` has a source and a target object. In pasting
//!   diagrams the target is drawn on the left, so a chain `[p1, .., pn]`
//!   is composable when `src(p_i) = tgt(p_{i+1})`.
//! * A [`Frame`] is the boundary of a cell: a composable chain on top, a
//!   left tight morphism out of the chain's left end (`tgt p1`), a right
//!   tight morphism out of the chain's right end (`src pn`), and a loose
//!   codomain running from the right tight's target to the left tight's
//!   target. For an empty chain the two boundary objects coincide and are
//!   recovered from the tights.
//! * Cells are identified per frame; [`Cell`] carries its frame.

use crate::error::{Result, VdcError};
use crate::fincat::FinCat;
use crate::ident::Ident;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Loose {
    pub id: Ident,
    pub src: Ident,
    pub tgt: Ident,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Frame {
    pub chain: Vec<Ident>,
    pub left: Ident,
    pub right: Ident,
    pub cod: Ident,
}

impl Frame {
    pub fn new(chain: Vec<Ident>, left: Ident, right: Ident, cod: Ident) -> Frame {
        Frame {
            chain,
            left,
            right,
            cod,
        }
    }

    pub fn arity(&self) -> usize {
        self.chain.len()
    }

    /// Globular frame: both tights are identities on the chain's endpoints.
    pub fn globular(vdc: &dyn Vdc, chain: Vec<Ident>, cod: Ident) -> Result<Frame> {
        let (lo, ro) = chain_endpoints(vdc, &chain, None)?;
        Ok(Frame {
            chain,
            left: vdc.tight().identity(&lo)?,
            right: vdc.tight().identity(&ro)?,
            cod,
        })
    }
}

impl std::fmt::Display for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.chain.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "; {}, {}; {})", self.left, self.right, self.cod)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub frame: Frame,
    pub id: Ident,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AritySupport {
    All,
    UpTo(usize),
}

impl AritySupport {
    pub fn supports(&self, n: usize) -> bool {
        match self {
            AritySupport::All => true,
            AritySupport::UpTo(k) => n <= *k,
        }
    }
}

/// A handle to a finite virtual double category.
///
/// Handles are immutable after construction and safe for concurrent reads.
pub trait Vdc: Send + Sync {
    fn name(&self) -> String;

    /// The category of objects and tight morphisms.
    fn tight(&self) -> &FinCat;

    /// All loose morphisms, in deterministic order.
    fn looses(&self) -> &[Loose];

    fn arity_support(&self) -> AritySupport {
        AritySupport::All
    }

    /// All cell identifiers with the given frame, lexicographically sorted.
    fn cells(&self, frame: &Frame) -> Result<Vec<Ident>>;

    fn has_cell(&self, cell: &Cell) -> Result<bool> {
        Ok(self.cells(&cell.frame)?.contains(&cell.id))
    }

    fn identity_cell(&self, p: &Ident) -> Result<Cell>;

    /// Paste `inner` cells into `outer` per the multicategorical composition
    /// law: `outer`'s chain must equal the codomains of `inner`, adjacent
    /// inner cells must share their boundary tights, and the composite's
    /// frame is the pasted frame.
    fn compose(&self, inner: &[Cell], outer: &Cell) -> Result<Cell>;

    /// Whisker a nullary cell by a tight morphism on top (the restriction
    /// of the cell along the tight). Not every virtual double category
    /// supports this; identity tights always do.
    fn restrict_nullary(&self, cell: &Cell, tight: &Ident) -> Option<Cell> {
        if self.tight().is_identity(tight) {
            Some(cell.clone())
        } else {
            None
        }
    }

    /// Downcasting hook, used by constructions with specialized enumeration
    /// strategies for particular bases.
    fn as_any(&self) -> &dyn std::any::Any;
}

pub type VdcHandle = Arc<dyn Vdc>;

pub fn loose_data<'a>(vdc: &'a dyn Vdc, p: &Ident) -> Result<&'a Loose> {
    vdc.looses()
        .iter()
        .find(|l| &l.id == p)
        .ok_or_else(|| VdcError::UnknownLoose(p.clone()))
}

/// Left and right boundary objects of a chain. An empty chain needs the
/// shared object supplied via `at`.
pub fn chain_endpoints(
    vdc: &dyn Vdc,
    chain: &[Ident],
    at: Option<&Ident>,
) -> Result<(Ident, Ident)> {
    if chain.is_empty() {
        let a = at.ok_or_else(|| {
            VdcError::NotComposable("empty chain without a base object".into())
        })?;
        return Ok((a.clone(), a.clone()));
    }
    for w in chain.windows(2) {
        let a = loose_data(vdc, &w[0])?;
        let b = loose_data(vdc, &w[1])?;
        if a.src != b.tgt {
            return Err(VdcError::NotComposable(format!(
                "chain breaks between {} and {}",
                w[0], w[1]
            )));
        }
    }
    let first = loose_data(vdc, &chain[0])?;
    let last = loose_data(vdc, &chain[chain.len() - 1])?;
    Ok((first.tgt.clone(), last.src.clone()))
}

/// Validate a frame against a handle.
pub fn check_frame(vdc: &dyn Vdc, frame: &Frame) -> Result<()> {
    let t = vdc.tight();
    let left_src = t.src(&frame.left)?.clone();
    let right_src = t.src(&frame.right)?.clone();
    let (lo, ro) = chain_endpoints(vdc, &frame.chain, Some(&left_src))?;
    if lo != left_src {
        return Err(VdcError::FrameMismatch(format!(
            "left tight {} does not start at the chain's left object {lo}",
            frame.left
        )));
    }
    if ro != right_src {
        return Err(VdcError::FrameMismatch(format!(
            "right tight {} does not start at the chain's right object {ro}",
            frame.right
        )));
    }
    let cod = loose_data(vdc, &frame.cod)?;
    if &cod.tgt != t.tgt(&frame.left)? {
        return Err(VdcError::FrameMismatch(format!(
            "codomain target {} differs from left tight target",
            cod.tgt
        )));
    }
    if &cod.src != t.tgt(&frame.right)? {
        return Err(VdcError::FrameMismatch(format!(
            "codomain source {} differs from right tight target",
            cod.src
        )));
    }
    Ok(())
}

/// The pasted frame of a composition configuration, with all compatibility
/// conditions checked. With no inner cells the outer frame is returned.
pub fn pasted_frame(vdc: &dyn Vdc, inner: &[Frame], outer: &Frame) -> Result<Frame> {
    if outer.chain.len() != inner.len() {
        return Err(VdcError::FrameMismatch(format!(
            "outer arity {} but {} inner cells",
            outer.chain.len(),
            inner.len()
        )));
    }
    if inner.is_empty() {
        return Ok(outer.clone());
    }
    for (i, fr) in inner.iter().enumerate() {
        if fr.cod != outer.chain[i] {
            return Err(VdcError::FrameMismatch(format!(
                "inner cell {i} has codomain {} but the outer chain expects {}",
                fr.cod, outer.chain[i]
            )));
        }
    }
    for i in 0..inner.len() - 1 {
        if inner[i].right != inner[i + 1].left {
            return Err(VdcError::FrameMismatch(format!(
                "inner cells {i} and {} do not share a boundary tight",
                i + 1
            )));
        }
    }
    let t = vdc.tight();
    let chain: Vec<Ident> = inner.iter().flat_map(|f| f.chain.clone()).collect();
    Ok(Frame {
        chain,
        left: t.compose(&inner[0].left, &outer.left)?,
        right: t.compose(&inner[inner.len() - 1].right, &outer.right)?,
        cod: outer.cod.clone(),
    })
}

/// All composable chains of exactly length `n`, lexicographic.
pub fn chains(vdc: &dyn Vdc, n: usize) -> Vec<Vec<Ident>> {
    if n == 0 {
        return vec![vec![]];
    }
    let looses = vdc.looses();
    let mut acc: Vec<Vec<&Loose>> = looses.iter().map(|l| vec![l]).collect();
    for _ in 1..n {
        let mut next = Vec::new();
        for c in &acc {
            let last = c[c.len() - 1];
            for l in looses {
                if l.tgt == last.src {
                    let mut c2 = c.clone();
                    c2.push(l);
                    next.push(c2);
                }
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|c| c.into_iter().map(|l| l.id.clone()).collect())
        .collect()
}

/// All frames whose chain length is at most `max_chain`, lexicographic.
pub fn frames(vdc: &dyn Vdc, max_chain: usize) -> Vec<Frame> {
    let t = vdc.tight();
    let mut out = Vec::new();
    for n in 0..=max_chain {
        for chain in chains(vdc, n) {
            let endpoint_opts: Vec<(Ident, Ident)> = if chain.is_empty() {
                t.objects.iter().map(|a| (a.clone(), a.clone())).collect()
            } else {
                match chain_endpoints(vdc, &chain, None) {
                    Ok(e) => vec![e],
                    Err(_) => continue,
                }
            };
            for (lo, ro) in endpoint_opts {
                for f in t.from(&lo) {
                    for g in t.from(&ro) {
                        let ft = t.tgt(&f).unwrap().clone();
                        let gt = t.tgt(&g).unwrap().clone();
                        for q in vdc.looses() {
                            if q.tgt == ft && q.src == gt {
                                out.push(Frame {
                                    chain: chain.clone(),
                                    left: f.clone(),
                                    right: g.clone(),
                                    cod: q.id.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// A choice of loose identities and nullary opcartesian cells.
#[derive(Clone, Debug)]
pub struct NormalStructure {
    pub chosen_identity: BTreeMap<Ident, Ident>,
    pub chosen_nullary_opcart: BTreeMap<Ident, Cell>,
}

impl NormalStructure {
    pub fn identity_loose(&self, a: &Ident) -> Result<&Ident> {
        self.chosen_identity
            .get(a)
            .ok_or_else(|| VdcError::MissingNormalStructure(format!("{a}")))
    }

    pub fn opcart(&self, a: &Ident) -> Result<&Cell> {
        self.chosen_nullary_opcart
            .get(a)
            .ok_or_else(|| VdcError::MissingNormalStructure(format!("{a}")))
    }
}

/// A virtual double category together with chosen loose identities.
#[derive(Clone)]
pub struct NormalVdc {
    pub vdc: VdcHandle,
    pub normal: NormalStructure,
}
