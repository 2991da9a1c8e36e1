//! Finite presentations of pseudo double categories, and the virtual double
//! category they induce.
//!
//! A presentation consists of the tight category `A0`, a category `A1` of
//! loose morphisms and unary cells with boundary functors `s, t : A1 -> A0`,
//! a unit functor `I : A0 -> A1`, composition tables for looses and unary
//! cells, and associator/unitor components. The induced virtual double
//! category realizes a multiary cell over a chain as a unary cell out of
//! the chain's chosen (left-nested) composite; all rebracketing goes
//! through the stored structure cells.

use crate::error::{Result, VdcError};
use crate::fincat::{FinCat, FinFunctor};
use crate::ident::Ident;
use crate::vdc::{
    check_frame, pasted_frame, Cell, Frame, Loose, NormalStructure, NormalVdc, Vdc,
};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

#[derive(Clone, Debug)]
pub struct PdcPresentation {
    pub name: String,
    pub tight: FinCat,
    pub cellcat: FinCat,
    pub s: FinFunctor,
    pub t: FinFunctor,
    pub unit: FinFunctor,
    pub hcomp_ob: BTreeMap<(Ident, Ident), Ident>,
    pub hcomp_mor: BTreeMap<(Ident, Ident), Ident>,
    pub assoc: BTreeMap<(Ident, Ident, Ident), Ident>,
    pub lunit: BTreeMap<Ident, Ident>,
    pub runit: BTreeMap<Ident, Ident>,
}

/// A bracketing of a loose chain, with explicit unit leaves.
#[derive(Clone, Debug)]
pub enum LTree {
    Unit(Ident),
    Leaf(Ident),
    Node(Box<LTree>, Box<LTree>),
}

impl LTree {
    pub fn leaves(&self) -> Vec<Ident> {
        match self {
            LTree::Unit(_) => vec![],
            LTree::Leaf(p) => vec![p.clone()],
            LTree::Node(l, r) => {
                let mut xs = l.leaves();
                xs.extend(r.leaves());
                xs
            }
        }
    }

    /// Left-nested tree over a chain; the empty chain is a unit leaf.
    pub fn left_nested(chain: &[Ident], at: &Ident) -> LTree {
        if chain.is_empty() {
            return LTree::Unit(at.clone());
        }
        let mut tree = LTree::Leaf(chain[0].clone());
        for p in &chain[1..] {
            tree = LTree::Node(Box::new(tree), Box::new(LTree::Leaf(p.clone())));
        }
        tree
    }

    /// Left-nested tree over a list of subtrees; must be nonempty.
    pub fn left_nested_trees(mut blocks: Vec<LTree>) -> LTree {
        let mut tree = blocks.remove(0);
        for b in blocks {
            tree = LTree::Node(Box::new(tree), Box::new(b));
        }
        tree
    }
}

impl PdcPresentation {
    pub fn loose_src(&self, p: &Ident) -> Result<&Ident> {
        self.s.ob(p)
    }

    pub fn loose_tgt(&self, p: &Ident) -> Result<&Ident> {
        self.t.ob(p)
    }

    /// The left boundary tight of a unary cell (its action under `t`).
    pub fn cell_left(&self, m: &Ident) -> Result<&Ident> {
        self.t.mor(m)
    }

    /// The right boundary tight of a unary cell (its action under `s`).
    pub fn cell_right(&self, m: &Ident) -> Result<&Ident> {
        self.s.mor(m)
    }

    pub fn unit_loose(&self, a: &Ident) -> Result<&Ident> {
        self.unit.ob(a)
    }

    pub fn hcomp(&self, p: &Ident, q: &Ident) -> Result<Ident> {
        self.hcomp_ob
            .get(&(p.clone(), q.clone()))
            .cloned()
            .ok_or_else(|| VdcError::NotComposable(format!("{p} (.) {q} undefined")))
    }

    pub fn hcomp_cells(&self, m: &Ident, n: &Ident) -> Result<Ident> {
        self.hcomp_mor
            .get(&(m.clone(), n.clone()))
            .cloned()
            .ok_or_else(|| VdcError::NotComposable(format!("cells {m} (.) {n} undefined")))
    }

    pub fn invert_cell(&self, m: &Ident) -> Result<Ident> {
        self.cellcat
            .inverse(m)
            .ok_or_else(|| VdcError::CoherenceFailure(format!("cell {m} is not invertible")))
    }

    pub fn vcomp(&self, m: &Ident, n: &Ident) -> Result<Ident> {
        self.cellcat.compose(m, n)
    }

    /// Evaluate a bracketing tree to a loose morphism.
    pub fn eval_tree(&self, tree: &LTree) -> Result<Ident> {
        match tree {
            LTree::Unit(a) => Ok(self.unit_loose(a)?.clone()),
            LTree::Leaf(p) => Ok(p.clone()),
            LTree::Node(l, r) => {
                let lp = self.eval_tree(l)?;
                let rp = self.eval_tree(r)?;
                self.hcomp(&lp, &rp)
            }
        }
    }

    /// The left-nested composite of a chain (the unit loose for an empty
    /// chain at `at`).
    pub fn left_nested_loose(&self, chain: &[Ident], at: &Ident) -> Result<Ident> {
        self.eval_tree(&LTree::left_nested(chain, at))
    }

    /// The canonical cell `eval(tree) -> L(leaves(tree))` built from the
    /// stored associator and unitor components.
    pub fn normalize_tree(&self, tree: &LTree) -> Result<Ident> {
        match tree {
            LTree::Unit(a) => Ok(self.cellcat.identity(self.unit_loose(a)?)?),
            LTree::Leaf(p) => Ok(self.cellcat.identity(p)?),
            LTree::Node(l, r) => {
                let cl = self.normalize_tree(l)?;
                let cr = self.normalize_tree(r)?;
                let step = self.hcomp_cells(&cl, &cr)?;
                let fl = l.leaves();
                let fr = r.leaves();
                let at_l = self.tree_right_object(l)?;
                let merge = self.merge_cell(&fl, &fr, &at_l)?;
                self.vcomp(&step, &merge)
            }
        }
    }

    fn tree_right_object(&self, tree: &LTree) -> Result<Ident> {
        match tree {
            LTree::Unit(a) => Ok(a.clone()),
            LTree::Leaf(p) => Ok(self.loose_src(p)?.clone()),
            LTree::Node(_, r) => self.tree_right_object(r),
        }
    }

    /// The canonical cell `L(fl) (.) L(fr) -> L(fl ++ fr)`. `at` is the
    /// object between the two lists, needed when either is empty.
    fn merge_cell(&self, fl: &[Ident], fr: &[Ident], at: &Ident) -> Result<Ident> {
        let ll = self.left_nested_loose(fl, at)?;
        if fr.is_empty() {
            return self
                .runit
                .get(&ll)
                .cloned()
                .ok_or_else(|| VdcError::CoherenceFailure(format!("missing runit at {ll}")));
        }
        if fl.is_empty() {
            let lr = self.left_nested_loose(fr, at)?;
            return self
                .lunit
                .get(&lr)
                .cloned()
                .ok_or_else(|| VdcError::CoherenceFailure(format!("missing lunit at {lr}")));
        }
        if fr.len() == 1 {
            // L(fl) (.) q is already L(fl ++ [q])
            let whole = self.hcomp(&ll, &fr[0])?;
            return Ok(self.cellcat.identity(&whole)?);
        }
        let (init, last) = fr.split_at(fr.len() - 1);
        let lr_init = self.left_nested_loose(init, at)?;
        let a = self
            .assoc
            .get(&(ll.clone(), lr_init.clone(), last[0].clone()))
            .cloned()
            .ok_or_else(|| {
                VdcError::CoherenceFailure(format!(
                    "missing associator at ({ll}, {lr_init}, {})",
                    last[0]
                ))
            })?;
        // invert: L(fl) (.) (L(init) (.) last) -> (L(fl) (.) L(init)) (.) last
        let a_inv = self.invert_cell(&a)?;
        let inner = self.merge_cell(fl, init, at)?;
        let step = self.hcomp_cells(&inner, &self.cellcat.identity(&last[0])?)?;
        self.vcomp(&a_inv, &step)
    }

    /// The canonical rebracketing cell `eval(from) -> eval(to)` for trees
    /// with the same leaf list.
    pub fn rebracket(&self, from: &LTree, to: &LTree) -> Result<Ident> {
        if from.leaves() != to.leaves() {
            return Err(VdcError::FrameMismatch(
                "rebracketing between different leaf lists".into(),
            ));
        }
        let down = self.normalize_tree(from)?;
        let up = self.invert_cell(&self.normalize_tree(to)?)?;
        self.vcomp(&down, &up)
    }

    /// Composable loose pairs, in order.
    pub fn composable_pairs(&self) -> Vec<(Ident, Ident)> {
        let mut out = Vec::new();
        for p in &self.cellcat.objects {
            for q in &self.cellcat.objects {
                if self.s.on_ob.get(p) == self.t.on_ob.get(q) {
                    out.push((p.clone(), q.clone()));
                }
            }
        }
        out
    }

    /// All equation violations of the presentation, with equation tags.
    pub fn coherence_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for v in self.tight.violations() {
            out.push(format!("tight: {v}"));
        }
        for v in self.cellcat.violations() {
            out.push(format!("cells: {v}"));
        }
        if !out.is_empty() {
            return out;
        }
        for v in self.s.violations(&self.cellcat, &self.tight) {
            out.push(format!("s-functor: {v}"));
        }
        for v in self.t.violations(&self.cellcat, &self.tight) {
            out.push(format!("t-functor: {v}"));
        }
        for v in self.unit.violations(&self.tight, &self.cellcat) {
            out.push(format!("unit-functor: {v}"));
        }
        if !out.is_empty() {
            return out;
        }
        // unit boundaries
        for a in &self.tight.objects {
            let i = &self.unit.on_ob[a];
            if self.s.on_ob.get(i) != Some(a) || self.t.on_ob.get(i) != Some(a) {
                out.push(format!("unit-boundary: I({a}) is not an endomorphism"));
            }
        }
        // hcomp on looses: total exactly on composable pairs, right boundaries
        let pairs = self.composable_pairs();
        for (p, q) in &pairs {
            match self.hcomp_ob.get(&(p.clone(), q.clone())) {
                None => out.push(format!("hcomp: missing composite {p} (.) {q}")),
                Some(pq) => {
                    if !self.cellcat.has_object(pq) {
                        out.push(format!("hcomp: dangling composite {p} (.) {q}"));
                    } else if self.t.on_ob.get(pq) != self.t.on_ob.get(p)
                        || self.s.on_ob.get(pq) != self.s.on_ob.get(q)
                    {
                        out.push(format!("hcomp: composite {p} (.) {q} has wrong boundary"));
                    }
                }
            }
        }
        for (p, q) in self.hcomp_ob.keys() {
            if self.s.on_ob.get(p) != self.t.on_ob.get(q) {
                out.push(format!("hcomp: spurious composite {p} (.) {q}"));
            }
        }
        // hcomp on cells: totality, boundaries, functoriality
        let cell_pairs: Vec<(Ident, Ident)> = self
            .cellcat
            .morphisms
            .iter()
            .flat_map(|m| {
                self.cellcat.morphisms.iter().filter_map(|n| {
                    (self.composable_cells(&m.id, &n.id)).then(|| (m.id.clone(), n.id.clone()))
                })
            })
            .collect();
        for (m, n) in &cell_pairs {
            match self.hcomp_mor.get(&(m.clone(), n.clone())) {
                None => out.push(format!("hcomp-cells: missing {m} (.) {n}")),
                Some(mn) => {
                    let md = self.cellcat.mor(m).unwrap();
                    let nd = self.cellcat.mor(n).unwrap();
                    let want_src = self.hcomp_ob.get(&(md.src.clone(), nd.src.clone()));
                    let want_tgt = self.hcomp_ob.get(&(md.tgt.clone(), nd.tgt.clone()));
                    match self.cellcat.mor(mn) {
                        None => out.push(format!("hcomp-cells: dangling {m} (.) {n}")),
                        Some(d) => {
                            if Some(&d.src) != want_src || Some(&d.tgt) != want_tgt {
                                out.push(format!("hcomp-cells: wrong boundary for {m} (.) {n}"));
                            } else if self.t.on_mor.get(mn) != self.t.on_mor.get(m)
                                || self.s.on_mor.get(mn) != self.s.on_mor.get(n)
                            {
                                out.push(format!("hcomp-cells: wrong tights for {m} (.) {n}"));
                            }
                        }
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (p, q) in &pairs {
            let ip = &self.cellcat.id_of[p];
            let iq = &self.cellcat.id_of[q];
            let pq = &self.hcomp_ob[&(p.clone(), q.clone())];
            if self.hcomp_mor.get(&(ip.clone(), iq.clone())) != Some(&self.cellcat.id_of[pq]) {
                out.push(format!("hcomp-functorial: identity at ({p}, {q})"));
            }
        }
        for (m, n) in &cell_pairs {
            for (m2, n2) in &cell_pairs {
                let md = self.cellcat.mor(m).unwrap();
                let m2d = self.cellcat.mor(m2).unwrap();
                let nd = self.cellcat.mor(n).unwrap();
                let n2d = self.cellcat.mor(n2).unwrap();
                if md.tgt != m2d.src || nd.tgt != n2d.src {
                    continue;
                }
                let lhs = self
                    .vcomp(m, m2)
                    .and_then(|mm| self.vcomp(n, n2).and_then(|nn| self.hcomp_cells(&mm, &nn)));
                let rhs = self
                    .hcomp_cells(m, n)
                    .and_then(|a| self.hcomp_cells(m2, n2).and_then(|b| self.vcomp(&a, &b)));
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) if a == b => {}
                    _ => out.push(format!(
                        "hcomp-functorial: interchange at ({m}, {n}) ; ({m2}, {n2})"
                    )),
                }
            }
        }
        // unitor and associator components: shape, invertibility, naturality
        for p in &self.cellcat.objects {
            let tp = &self.t.on_ob[p];
            let sp = &self.s.on_ob[p];
            let ip_t = &self.unit.on_ob[tp];
            let ip_s = &self.unit.on_ob[sp];
            for (name, table, dom) in [
                ("lunit", &self.lunit, self.hcomp_ob.get(&(ip_t.clone(), p.clone()))),
                ("runit", &self.runit, self.hcomp_ob.get(&(p.clone(), ip_s.clone()))),
            ] {
                match (table.get(p), dom) {
                    (Some(c), Some(d)) => {
                        let ok = self
                            .cellcat
                            .mor(c)
                            .map(|cd| &cd.src == d && &cd.tgt == p)
                            .unwrap_or(false);
                        if !ok {
                            out.push(format!("{name}: component at {p} has wrong shape"));
                        } else {
                            if !self.is_globular(c) {
                                out.push(format!("{name}: component at {p} is not globular"));
                            }
                            if self.cellcat.inverse(c).is_none() {
                                out.push(format!("{name}: component at {p} is not invertible"));
                            }
                        }
                    }
                    _ => out.push(format!("{name}: missing component at {p}")),
                }
            }
        }
        let triples: Vec<(Ident, Ident, Ident)> = pairs
            .iter()
            .flat_map(|(p, q)| {
                self.cellcat.objects.iter().filter_map(move |r| {
                    (self.s.on_ob.get(q) == self.t.on_ob.get(r))
                        .then(|| (p.clone(), q.clone(), r.clone()))
                })
            })
            .collect();
        for (p, q, r) in &triples {
            let key = (p.clone(), q.clone(), r.clone());
            match self.assoc.get(&key) {
                None => out.push(format!("assoc: missing component at ({p}, {q}, {r})")),
                Some(c) => {
                    let dom = self
                        .hcomp(p, q)
                        .and_then(|pq| self.hcomp(&pq, r))
                        .ok();
                    let cod = self
                        .hcomp(q, r)
                        .and_then(|qr| self.hcomp(p, &qr))
                        .ok();
                    let ok = match (self.cellcat.mor(c), dom, cod) {
                        (Some(cd), Some(d), Some(e)) => cd.src == d && cd.tgt == e,
                        _ => false,
                    };
                    if !ok {
                        out.push(format!("assoc: component at ({p}, {q}, {r}) has wrong shape"));
                    } else {
                        if !self.is_globular(c) {
                            out.push(format!("assoc: component at ({p}, {q}, {r}) not globular"));
                        }
                        if self.cellcat.inverse(c).is_none() {
                            out.push(format!(
                                "assoc: component at ({p}, {q}, {r}) not invertible"
                            ));
                        }
                    }
                }
            }
        }
        if !out.is_empty() {
            return out;
        }
        if !out.is_empty() {
            return out;
        }
        // naturality of unitors
        for m in &self.cellcat.morphisms {
            let p = &m.src;
            let p2 = &m.tgt;
            let tm = &self.t.on_mor[&m.id];
            let sm = &self.s.on_mor[&m.id];
            let l_lhs = self.vcomp(&self.lunit[p], &m.id);
            let l_rhs = self
                .hcomp_cells(&self.unit.on_mor[tm], &m.id)
                .and_then(|x| self.vcomp(&x, &self.lunit[p2]));
            if l_lhs.ok() != l_rhs.ok() {
                out.push(format!("lunit: naturality fails at {}", m.id));
            }
            let r_lhs = self.vcomp(&self.runit[p], &m.id);
            let r_rhs = self
                .hcomp_cells(&m.id, &self.unit.on_mor[sm])
                .and_then(|x| self.vcomp(&x, &self.runit[p2]));
            if r_lhs.ok() != r_rhs.ok() {
                out.push(format!("runit: naturality fails at {}", m.id));
            }
        }
        // naturality of the associator
        for (m, n) in &cell_pairs {
            for o in &self.cellcat.morphisms {
                if !self.composable_cells(n, &o.id) {
                    continue;
                }
                let md = self.cellcat.mor(m).unwrap();
                let nd = self.cellcat.mor(n).unwrap();
                let dom_key = (md.src.clone(), nd.src.clone(), o.src.clone());
                let cod_key = (md.tgt.clone(), nd.tgt.clone(), o.tgt.clone());
                let lhs = self
                    .hcomp_cells(m, n)
                    .and_then(|mn| self.hcomp_cells(&mn, &o.id))
                    .and_then(|x| self.vcomp(&x, &self.assoc[&cod_key]));
                let rhs = self
                    .hcomp_cells(n, &o.id)
                    .and_then(|no| self.hcomp_cells(m, &no))
                    .and_then(|x| self.vcomp(&self.assoc[&dom_key], &x));
                if lhs.ok() != rhs.ok() {
                    out.push(format!("assoc: naturality fails at ({m}, {n}, {})", o.id));
                }
            }
        }
        // pentagon
        for (p, q, r) in &triples {
            for sx in &self.cellcat.objects {
                if self.s.on_ob.get(r) != self.t.on_ob.get(sx) {
                    continue;
                }
                let res = (|| -> Result<bool> {
                    let pq = self.hcomp(p, q)?;
                    let rs = self.hcomp(r, sx)?;
                    let qr = self.hcomp(q, r)?;
                    let a1 = &self.assoc[&(pq.clone(), r.clone(), sx.clone())];
                    let a2 = &self.assoc[&(p.clone(), q.clone(), rs.clone())];
                    let one = self.vcomp(a1, a2)?;
                    let b1 = self.hcomp_cells(&self.assoc[&(p.clone(), q.clone(), r.clone())],
                        &self.cellcat.identity(sx)?)?;
                    let b2 = &self.assoc[&(p.clone(), qr.clone(), sx.clone())];
                    let b3 = self.hcomp_cells(&self.cellcat.identity(p)?,
                        &self.assoc[&(q.clone(), r.clone(), sx.clone())])?;
                    let two = self.vcomp(&self.vcomp(&b1, b2)?, &b3)?;
                    Ok(one == two)
                })();
                if !matches!(res, Ok(true)) {
                    out.push(format!("pentagon: fails at ({p}, {q}, {r}, {sx})"));
                }
            }
        }
        // triangle
        for (p, q) in &pairs {
            let res = (|| -> Result<bool> {
                let mid = self.unit_loose(self.loose_src(p)?)?.clone();
                let a = &self.assoc[&(p.clone(), mid.clone(), q.clone())];
                let lhs = self.vcomp(
                    a,
                    &self.hcomp_cells(&self.cellcat.identity(p)?, &self.lunit[q])?,
                )?;
                let rhs = self.hcomp_cells(&self.runit[p], &self.cellcat.identity(q)?)?;
                Ok(lhs == rhs)
            })();
            if !matches!(res, Ok(true)) {
                out.push(format!("triangle: fails at ({p}, {q})"));
            }
        }
        out
    }

    fn composable_cells(&self, m: &Ident, n: &Ident) -> bool {
        let (Some(md), Some(nd)) = (self.cellcat.mor(m), self.cellcat.mor(n)) else {
            return false;
        };
        self.s.on_ob.get(&md.src) == self.t.on_ob.get(&nd.src)
            && self.s.on_ob.get(&md.tgt) == self.t.on_ob.get(&nd.tgt)
            && self.s.on_mor.get(m) == self.t.on_mor.get(n)
    }

    fn is_globular(&self, m: &Ident) -> bool {
        self.t
            .on_mor
            .get(m)
            .map(|f| self.tight.is_identity(f))
            .unwrap_or(false)
            && self
                .s
                .on_mor
                .get(m)
                .map(|f| self.tight.is_identity(f))
                .unwrap_or(false)
    }

    pub fn check_coherence(&self) -> Result<()> {
        let v = self.coherence_violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(VdcError::CoherenceFailure(v.join("; ")))
        }
    }

    /// The canonical (left-nested) composite of a chain with its opcartesian
    /// cell in the induced virtual double category. The empty chain needs
    /// its base object.
    pub fn chosen_composite(&self, chain: &[Ident], at: Option<&Ident>) -> Result<(Ident, Cell)> {
        let base = if chain.is_empty() {
            at.cloned().ok_or_else(|| {
                VdcError::NotComposable("empty chain without a base object".into())
            })?
        } else {
            self.loose_tgt(&chain[0])?.clone()
        };
        for w in chain.windows(2) {
            if self.loose_src(&w[0])? != self.loose_tgt(&w[1])? {
                return Err(VdcError::NotComposable(format!(
                    "chain breaks between {} and {}",
                    w[0], w[1]
                )));
            }
        }
        let composite = self.left_nested_loose(chain, &base)?;
        let right = if chain.is_empty() {
            base.clone()
        } else {
            self.loose_src(&chain[chain.len() - 1])?.clone()
        };
        let cell = Cell {
            frame: Frame::new(
                chain.to_vec(),
                self.tight.identity(&base)?,
                self.tight.identity(&right)?,
                composite.clone(),
            ),
            id: self.cellcat.identity(&composite)?,
        };
        Ok((composite, cell))
    }

    /// The tight opposite presentation: reverse both categories, keep the
    /// loose data, invert the structure cells.
    pub fn tight_opposite(&self) -> Result<PdcPresentation> {
        let mut assoc = BTreeMap::new();
        for (k, v) in &self.assoc {
            assoc.insert(k.clone(), self.invert_cell(v)?);
        }
        let mut lunit = BTreeMap::new();
        for (k, v) in &self.lunit {
            lunit.insert(k.clone(), self.invert_cell(v)?);
        }
        let mut runit = BTreeMap::new();
        for (k, v) in &self.runit {
            runit.insert(k.clone(), self.invert_cell(v)?);
        }
        Ok(PdcPresentation {
            name: format!("{}^opt", self.name),
            tight: self.tight.opposite(),
            cellcat: self.cellcat.opposite(),
            s: self.s.clone(),
            t: self.t.clone(),
            unit: self.unit.clone(),
            hcomp_ob: self.hcomp_ob.clone(),
            hcomp_mor: self.hcomp_mor.clone(),
            assoc,
            lunit,
            runit,
        })
    }
}

/// The virtual double category induced by a presentation: cells over a
/// chain are unary cells out of the chain's chosen composite.
pub struct InducedVdc {
    pub pdc: Arc<PdcPresentation>,
    looses: Vec<Loose>,
    cell_cache: Mutex<BTreeMap<Frame, Vec<Ident>>>,
}

impl InducedVdc {
    pub fn new(pdc: Arc<PdcPresentation>) -> Result<InducedVdc> {
        pdc.check_coherence()?;
        let mut looses = Vec::new();
        for p in &pdc.cellcat.objects {
            looses.push(Loose {
                id: p.clone(),
                src: pdc.loose_src(p)?.clone(),
                tgt: pdc.loose_tgt(p)?.clone(),
            });
        }
        looses.sort();
        Ok(InducedVdc {
            pdc,
            looses,
            cell_cache: Mutex::new(BTreeMap::new()),
        })
    }

    fn block_tree(&self, frame: &Frame) -> Result<LTree> {
        let at = self.pdc.tight.src(&frame.left)?.clone();
        Ok(LTree::left_nested(&frame.chain, &at))
    }
}

impl Vdc for InducedVdc {
    fn name(&self) -> String {
        format!("induced({})", self.pdc.name)
    }
    fn as_any(&self) -> &dyn std::any::Any {
        self
    }
    fn tight(&self) -> &FinCat {
        &self.pdc.tight
    }
    fn looses(&self) -> &[Loose] {
        &self.looses
    }
    fn cells(&self, frame: &Frame) -> Result<Vec<Ident>> {
        if let Some(hit) = self.cell_cache.lock().unwrap().get(frame) {
            return Ok(hit.clone());
        }
        check_frame(self, frame)?;
        let at = self.pdc.tight.src(&frame.left)?.clone();
        let dom = self.pdc.left_nested_loose(&frame.chain, &at)?;
        let mut out: Vec<Ident> = self
            .pdc
            .cellcat
            .morphisms
            .iter()
            .filter(|m| {
                m.src == dom
                    && m.tgt == frame.cod
                    && self.pdc.t.on_mor.get(&m.id) == Some(&frame.left)
                    && self.pdc.s.on_mor.get(&m.id) == Some(&frame.right)
            })
            .map(|m| m.id.clone())
            .collect();
        out.sort();
        self.cell_cache
            .lock()
            .unwrap()
            .insert(frame.clone(), out.clone());
        Ok(out)
    }
    fn identity_cell(&self, p: &Ident) -> Result<Cell> {
        let l = crate::vdc::loose_data(self, p)?;
        Ok(Cell {
            frame: Frame::new(
                vec![p.clone()],
                self.pdc.tight.identity(&l.tgt)?,
                self.pdc.tight.identity(&l.src)?,
                p.clone(),
            ),
            id: self.pdc.cellcat.identity(p)?,
        })
    }
    fn compose(&self, inner: &[Cell], outer: &Cell) -> Result<Cell> {
        let frames: Vec<Frame> = inner.iter().map(|c| c.frame.clone()).collect();
        let frame = pasted_frame(self, &frames, &outer.frame)?;
        if inner.is_empty() {
            return Ok(outer.clone());
        }
        let blocks: Vec<LTree> = inner
            .iter()
            .map(|c| self.block_tree(&c.frame))
            .collect::<Result<_>>()?;
        let blocked = LTree::left_nested_trees(blocks);
        // L(full chain) -> eval(blocked)
        let at = self.pdc.tight.src(&frame.left)?.clone();
        let flat = LTree::left_nested(&frame.chain, &at);
        let c1 = self.pdc.rebracket(&flat, &blocked)?;
        // eval(blocked) -> L(outer chain), the inner cells composed side by side
        let mut c2 = inner[0].id.clone();
        for c in &inner[1..] {
            c2 = self.pdc.hcomp_cells(&c2, &c.id)?;
        }
        let id = self.pdc.vcomp(&self.pdc.vcomp(&c1, &c2)?, &outer.id)?;
        Ok(Cell { frame, id })
    }
    fn restrict_nullary(&self, cell: &Cell, tight: &Ident) -> Option<Cell> {
        if !cell.frame.chain.is_empty() {
            return None;
        }
        let iu = self.pdc.unit.on_mor.get(tight)?;
        let id = self.pdc.vcomp(iu, &cell.id).ok()?;
        let t = self.tight();
        Some(Cell {
            frame: Frame::new(
                vec![],
                t.compose(tight, &cell.frame.left).ok()?,
                t.compose(tight, &cell.frame.right).ok()?,
                cell.frame.cod.clone(),
            ),
            id,
        })
    }
}

/// Build the induced virtual double category with its canonical normal
/// structure.
pub fn induced_vdc(pdc: Arc<PdcPresentation>) -> Result<NormalVdc> {
    let induced = InducedVdc::new(pdc.clone())?;
    let mut chosen_identity = BTreeMap::new();
    let mut chosen_nullary_opcart = BTreeMap::new();
    for a in &pdc.tight.objects {
        let i = pdc.unit_loose(a)?.clone();
        chosen_identity.insert(a.clone(), i.clone());
        chosen_nullary_opcart.insert(
            a.clone(),
            Cell {
                frame: Frame::new(
                    vec![],
                    pdc.tight.identity(a)?,
                    pdc.tight.identity(a)?,
                    i.clone(),
                ),
                id: pdc.cellcat.identity(&i)?,
            },
        );
    }
    Ok(NormalVdc {
        vdc: Arc::new(induced),
        normal: NormalStructure {
            chosen_identity,
            chosen_nullary_opcart,
        },
    })
}
