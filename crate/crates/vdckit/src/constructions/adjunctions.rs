//! Canonical structure in normal virtual double categories, the unit and
//! counit of the Mod adjunction, its lax-idempotence witness, and the
//! transposes of the free-normal adjunction.

use crate::constructions::free_normal::FreeNormalVdc;
use crate::constructions::monads::{ModVdc, Monad, MonadMorphism, Module};
use crate::error::{Result, VdcError};
use crate::functor::{FunHandle, Transformation, VdcFun};
use crate::ident::Ident;
use crate::vdc::{Cell, Frame, NormalVdc, VdcHandle};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Factor a nullary cell through the chosen nullary opcartesian at `a`:
/// the unique unary cell `psi : (I_a) => cod` with `o_a ; psi = phi`.
pub fn factor_through_nullary_opcart(x: &NormalVdc, a: &Ident, phi: &Cell) -> Result<Cell> {
    let o = x.normal.opcart(a)?;
    let i = x.normal.identity_loose(a)?;
    let frame = Frame::new(
        vec![i.clone()],
        phi.frame.left.clone(),
        phi.frame.right.clone(),
        phi.frame.cod.clone(),
    );
    let mut found = Vec::new();
    for id in x.vdc.cells(&frame)? {
        let cand = Cell {
            frame: frame.clone(),
            id,
        };
        if x.vdc.compose(&[o.clone()], &cand)? == *phi {
            found.push(cand);
        }
    }
    match found.len() {
        1 => Ok(found.pop_unwrap()),
        0 => Err(VdcError::CoherenceFailure(format!(
            "no factorization of a nullary cell through the opcartesian at {a}"
        ))),
        _ => Err(VdcError::CoherenceFailure(format!(
            "factorization through the opcartesian at {a} is not unique"
        ))),
    }
}

trait PopUnwrap<T> {
    fn pop_unwrap(self) -> T;
}

impl<T> PopUnwrap<T> for Vec<T> {
    fn pop_unwrap(mut self) -> T {
        self.pop().unwrap()
    }
}

/// The multiplication of the identity loose monad on `a`: the unique
/// binary cell for which the chosen nullary opcartesian is a two-sided
/// unit.
pub fn normal_mult(x: &NormalVdc, a: &Ident) -> Result<Cell> {
    let i = x.normal.identity_loose(a)?.clone();
    let o = x.normal.opcart(a)?.clone();
    let one = x.vdc.identity_cell(&i)?;
    let ida = x.vdc.tight().identity(a)?;
    let frame = Frame::new(vec![i.clone(), i.clone()], ida.clone(), ida, i.clone());
    let mut found = Vec::new();
    for id in x.vdc.cells(&frame)? {
        let cand = Cell {
            frame: frame.clone(),
            id,
        };
        if x.vdc.compose(&[o.clone(), one.clone()], &cand)? == one
            && x.vdc.compose(&[one.clone(), o.clone()], &cand)? == one
        {
            found.push(cand);
        }
    }
    match found.len() {
        1 => Ok(found.pop_unwrap()),
        n => Err(VdcError::CoherenceFailure(format!(
            "identity monad multiplication at {a}: {n} candidates"
        ))),
    }
}

/// The identity loose monad on an object of a normal handle.
pub fn identity_monad(x: &NormalVdc, a: &Ident) -> Result<Monad> {
    Ok(Monad {
        carrier: a.clone(),
        endo: x.normal.identity_loose(a)?.clone(),
        mult: normal_mult(x, a)?,
        unit: x.normal.opcart(a)?.clone(),
    })
}

/// The canonical actions `(I, p) => p` and `(p, I) => p` absorbing chosen
/// identities on either side of a loose morphism.
pub fn normal_actions(x: &NormalVdc, p: &Ident) -> Result<(Cell, Cell)> {
    let l = crate::vdc::loose_data(x.vdc.as_ref(), p)?.clone();
    let one = x.vdc.identity_cell(p)?;
    let o_t = x.normal.opcart(&l.tgt)?.clone();
    let o_s = x.normal.opcart(&l.src)?.clone();
    let i_t = x.normal.identity_loose(&l.tgt)?.clone();
    let i_s = x.normal.identity_loose(&l.src)?.clone();
    let idt = x.vdc.tight().identity(&l.tgt)?;
    let ids = x.vdc.tight().identity(&l.src)?;
    let lframe = Frame::new(vec![i_t, p.clone()], idt.clone(), ids.clone(), p.clone());
    let rframe = Frame::new(vec![p.clone(), i_s], idt, ids, p.clone());
    let mut lact = Vec::new();
    for id in x.vdc.cells(&lframe)? {
        let cand = Cell {
            frame: lframe.clone(),
            id,
        };
        if x.vdc.compose(&[o_t.clone(), one.clone()], &cand)? == one {
            lact.push(cand);
        }
    }
    let mut ract = Vec::new();
    for id in x.vdc.cells(&rframe)? {
        let cand = Cell {
            frame: rframe.clone(),
            id,
        };
        if x.vdc.compose(&[one.clone(), o_s.clone()], &cand)? == one {
            ract.push(cand);
        }
    }
    if lact.len() != 1 || ract.len() != 1 {
        return Err(VdcError::CoherenceFailure(format!(
            "canonical actions on {p}: {} left and {} right candidates",
            lact.len(),
            ract.len()
        )));
    }
    Ok((lact.pop_unwrap(), ract.pop_unwrap()))
}

/// A loose morphism of a normal handle as a module over identity monads.
pub fn unit_module(x: &NormalVdc, p: &Ident) -> Result<Module> {
    let l = crate::vdc::loose_data(x.vdc.as_ref(), p)?.clone();
    let (lact, ract) = normal_actions(x, p)?;
    Ok(Module {
        src_monad: identity_monad(x, &l.src)?.ident(),
        tgt_monad: identity_monad(x, &l.tgt)?.ident(),
        carrier: p.clone(),
        left_action: lact,
        right_action: ract,
    })
}

/// The unit cell on a tight morphism `y : A -> B` in a normal handle: the
/// unique unary cell `I_A => I_B` over `(y, y)` compatible with the chosen
/// opcartesians.
pub fn unit_cell_on_tight(x: &NormalVdc, y: &Ident) -> Result<Cell> {
    let t = x.vdc.tight();
    let a = t.src(y)?.clone();
    let b = t.tgt(y)?.clone();
    let ob = x.normal.opcart(&b)?;
    let restricted = x.vdc.restrict_nullary(ob, y).ok_or_else(|| {
        VdcError::Unsupported(format!(
            "{} does not support nullary restriction along {y}",
            x.vdc.name()
        ))
    })?;
    factor_through_nullary_opcart(x, &a, &restricted)
}

/// The unit of the Mod adjunction at a normal handle: send an object to
/// its identity loose monad and a loose morphism to itself as a module.
pub struct ModUnitFun {
    pub normal_dom: NormalVdc,
    pub mod_handle: Arc<ModVdc>,
    cod: VdcHandle,
}

impl ModUnitFun {
    pub fn new(normal_dom: NormalVdc, mod_handle: Arc<ModVdc>) -> ModUnitFun {
        let cod = mod_handle.clone() as VdcHandle;
        ModUnitFun {
            normal_dom,
            mod_handle,
            cod,
        }
    }
}

impl VdcFun for ModUnitFun {
    fn name(&self) -> String {
        format!("mod-unit({})", self.normal_dom.vdc.name())
    }
    fn dom(&self) -> &VdcHandle {
        &self.normal_dom.vdc
    }
    fn cod(&self) -> &VdcHandle {
        &self.cod
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        Ok(identity_monad(&self.normal_dom, x)?.ident())
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        let t = self.normal_dom.vdc.tight();
        let src = t.src(f)?.clone();
        let tgt = t.tgt(f)?.clone();
        let cell = unit_cell_on_tight(&self.normal_dom, f)?;
        Ok(MonadMorphism {
            src: self.ob(&src)?,
            tgt: self.ob(&tgt)?,
            tight: f.clone(),
            cell,
        }
        .ident())
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        Ok(unit_module(&self.normal_dom, p)?.ident())
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        Ok(Cell {
            frame: Frame {
                chain: c
                    .frame
                    .chain
                    .iter()
                    .map(|p| self.loose(p))
                    .collect::<Result<_>>()?,
                left: self.tight(&c.frame.left)?,
                right: self.tight(&c.frame.right)?,
                cod: self.loose(&c.frame.cod)?,
            },
            id: c.id.clone(),
        })
    }
}

/// The counit of the Mod adjunction: forget monad structure.
pub struct ModCounitFun {
    pub mod_handle: Arc<ModVdc>,
    dom: VdcHandle,
}

impl ModCounitFun {
    pub fn new(mod_handle: Arc<ModVdc>) -> ModCounitFun {
        let dom = mod_handle.clone() as VdcHandle;
        ModCounitFun { mod_handle, dom }
    }
}

impl VdcFun for ModCounitFun {
    fn name(&self) -> String {
        format!("mod-counit({})", self.mod_handle.base.name())
    }
    fn dom(&self) -> &VdcHandle {
        &self.dom
    }
    fn cod(&self) -> &VdcHandle {
        &self.mod_handle.base
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        Ok(self.mod_handle.monad(x)?.carrier.clone())
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        Ok(self.mod_handle.monad_morphism(f)?.tight.clone())
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        Ok(self.mod_handle.module(p)?.carrier.clone())
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        self.mod_handle.underlying_cell(c)
    }
}

/// Mod applied to a functor, componentwise on all monad data.
pub struct ModOfFun {
    pub inner: FunHandle,
    pub dom_mod: Arc<ModVdc>,
    pub cod_mod: Arc<ModVdc>,
    dom: VdcHandle,
    cod: VdcHandle,
}

impl ModOfFun {
    pub fn new(inner: FunHandle, dom_mod: Arc<ModVdc>, cod_mod: Arc<ModVdc>) -> ModOfFun {
        let dom = dom_mod.clone() as VdcHandle;
        let cod = cod_mod.clone() as VdcHandle;
        ModOfFun {
            inner,
            dom_mod,
            cod_mod,
            dom,
            cod,
        }
    }
}

impl VdcFun for ModOfFun {
    fn name(&self) -> String {
        format!("Mod({})", self.inner.name())
    }
    fn dom(&self) -> &VdcHandle {
        &self.dom
    }
    fn cod(&self) -> &VdcHandle {
        &self.cod
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        let m = self.dom_mod.monad(x)?;
        Ok(Monad {
            carrier: self.inner.ob(&m.carrier)?,
            endo: self.inner.loose(&m.endo)?,
            mult: self.inner.cell(&m.mult)?,
            unit: self.inner.cell(&m.unit)?,
        }
        .ident())
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        let mm = self.dom_mod.monad_morphism(f)?;
        Ok(MonadMorphism {
            src: self.ob(&mm.src)?,
            tgt: self.ob(&mm.tgt)?,
            tight: self.inner.tight(&mm.tight)?,
            cell: self.inner.cell(&mm.cell)?,
        }
        .ident())
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        let m = self.dom_mod.module(p)?;
        Ok(Module {
            src_monad: self.ob(&m.src_monad)?,
            tgt_monad: self.ob(&m.tgt_monad)?,
            carrier: self.inner.loose(&m.carrier)?,
            left_action: self.inner.cell(&m.left_action)?,
            right_action: self.inner.cell(&m.right_action)?,
        }
        .ident())
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        let under = self.dom_mod.underlying_cell(c)?;
        let image = self.inner.cell(&under)?;
        Ok(Cell {
            frame: Frame {
                chain: c
                    .frame
                    .chain
                    .iter()
                    .map(|p| self.loose(p))
                    .collect::<Result<_>>()?,
                left: self.tight(&c.frame.left)?,
                right: self.tight(&c.frame.right)?,
                cod: self.loose(&c.frame.cod)?,
            },
            id: image.id,
        })
    }
}

/// The counit transformation of the inner (lax-idempotence) adjunction:
/// at a loose monad `S` on `A`, the monad morphism `(1_A, unit of S)` and
/// the identity cell on each module.
pub fn laxidem_counit(
    x: &NormalVdc,
    mod_handle: &Arc<ModVdc>,
) -> Result<Transformation> {
    let mut tight_components = BTreeMap::new();
    for (sid, s) in &mod_handle.monads {
        let upsilon = factor_through_nullary_opcart(x, &s.carrier, &s.unit)?;
        let mm = MonadMorphism {
            src: identity_monad(x, &s.carrier)?.ident(),
            tgt: sid.clone(),
            tight: x.vdc.tight().identity(&s.carrier)?,
            cell: upsilon,
        };
        tight_components.insert(sid.clone(), mm.ident());
    }
    let mut loose_components = BTreeMap::new();
    for (pid, m) in mod_handle.modules() {
        let src_mm = &tight_components[&m.src_monad];
        let tgt_mm = &tight_components[&m.tgt_monad];
        let src_mod = mod_handle.module(pid)?.clone();
        let unit_mod = unit_module(x, &src_mod.carrier)?;
        loose_components.insert(
            pid.clone(),
            Cell {
                frame: Frame::new(
                    vec![unit_mod.ident()],
                    tgt_mm.clone(),
                    src_mm.clone(),
                    pid.clone(),
                ),
                id: x.vdc.identity_cell(&src_mod.carrier)?.id,
            },
        );
    }
    Ok(Transformation {
        tight_components,
        loose_components,
    })
}

/// Extend a functor `H : X -> Y'` (into a normal handle) to a normal
/// functor `F(X)' -> Y'`, interpreting the formal identities as the chosen
/// loose identities and erasure cells through the canonical actions.
pub struct FreeExtendFun {
    pub free: Arc<FreeNormalVdc>,
    pub inner: FunHandle,
    pub normal_cod: NormalVdc,
    dom: VdcHandle,
}

impl FreeExtendFun {
    pub fn new(
        free: Arc<FreeNormalVdc>,
        inner: FunHandle,
        normal_cod: NormalVdc,
    ) -> FreeExtendFun {
        let dom = free.clone() as VdcHandle;
        FreeExtendFun {
            free,
            inner,
            normal_cod,
            dom,
        }
    }

    /// The globular cell absorbing `k` identities on the left and `l` on
    /// the right of a loose morphism of the codomain.
    fn absorber(&self, p: &Ident, k: usize, l: usize) -> Result<Cell> {
        let y = &self.normal_cod;
        let ld = crate::vdc::loose_data(y.vdc.as_ref(), p)?.clone();
        let (lact, ract) = normal_actions(y, p)?;
        let i_t = y.normal.identity_loose(&ld.tgt)?.clone();
        let i_s = y.normal.identity_loose(&ld.src)?.clone();
        let mut c = y.vdc.identity_cell(p)?;
        for _ in 0..k {
            let one_i = y.vdc.identity_cell(&i_t)?;
            c = y.vdc.compose(&[one_i, c], &lact)?;
        }
        for _ in 0..l {
            let one_i = y.vdc.identity_cell(&i_s)?;
            c = y.vdc.compose(&[c, one_i], &ract)?;
        }
        Ok(c)
    }
}

impl VdcFun for FreeExtendFun {
    fn name(&self) -> String {
        format!("extend({})", self.inner.name())
    }
    fn dom(&self) -> &VdcHandle {
        &self.dom
    }
    fn cod(&self) -> &VdcHandle {
        &self.normal_cod.vdc
    }
    fn ob(&self, x: &Ident) -> Result<Ident> {
        self.inner.ob(x)
    }
    fn tight(&self, f: &Ident) -> Result<Ident> {
        self.inner.tight(f)
    }
    fn loose(&self, p: &Ident) -> Result<Ident> {
        match p.untag() {
            Some(("b", [q])) => self.inner.loose(q),
            Some(("i", [x])) => Ok(self
                .normal_cod
                .normal
                .identity_loose(&self.inner.ob(x)?)?
                .clone()),
            _ => Err(VdcError::UnknownLoose(p.clone())),
        }
    }
    fn cell(&self, c: &Cell) -> Result<Cell> {
        let y = &self.normal_cod;
        let target_frame = Frame {
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
        // classify the chain into padding runs and base entries
        let mut runs: Vec<usize> = vec![0];
        let mut bases: Vec<Ident> = Vec::new();
        for p in &c.frame.chain {
            match p.untag() {
                Some(("i", _)) => *runs.last_mut().unwrap() += 1,
                Some(("b", [q])) => {
                    bases.push(q.clone());
                    runs.push(0);
                }
                _ => return Err(VdcError::UnknownLoose(p.clone())),
            }
        }
        let is_formal_cod = matches!(c.frame.cod.untag(), Some(("i", _)));
        if is_formal_cod {
            // unique cell over (x, x) with an all-formal chain
            let x_img = self.tight(&c.frame.left)?;
            let a_img = y.vdc.tight().src(&x_img)?.clone();
            let kappa = unit_cell_on_tight(y, &x_img)?;
            let mono = identity_monad(y, &a_img)?;
            let power = mono.mult_n(y.vdc.as_ref(), runs[0])?;
            let id = if runs[0] == 1 {
                kappa.clone()
            } else {
                y.vdc.compose(&[power], &kappa)?
            };
            return Ok(Cell {
                frame: target_frame,
                id: id.id,
            });
        }
        // base codomain: the underlying cell of the base, with padding
        // absorbed into each slot
        let under = Cell {
            frame: Frame {
                chain: bases.clone(),
                left: c.frame.left.clone(),
                right: c.frame.right.clone(),
                cod: match c.frame.cod.untag() {
                    Some(("b", [q])) => q.clone(),
                    _ => unreachable!(),
                },
            },
            id: c.id.clone(),
        };
        let image = self.inner.cell(&under)?;
        if bases.is_empty() {
            // all-formal chain into a base loose: factor through the
            // opcartesian and absorb the powers
            let x_img = self.tight(&c.frame.left)?;
            let a_img = y.vdc.tight().src(&x_img)?.clone();
            let kappa = factor_through_nullary_opcart(y, &a_img, &image)?;
            let mono = identity_monad(y, &a_img)?;
            let power = mono.mult_n(y.vdc.as_ref(), runs[0])?;
            let composite = if runs[0] == 1 {
                kappa
            } else {
                y.vdc.compose(&[power], &kappa)?
            };
            return Ok(Cell {
                frame: target_frame,
                id: composite.id,
            });
        }
        let n = bases.len();
        let mut absorbers = Vec::with_capacity(n);
        for (i, q) in bases.iter().enumerate() {
            let left_pad = runs[i];
            let right_pad = if i == n - 1 { runs[n] } else { 0 };
            // interior padding goes to the left of the following slot
            absorbers.push(self.absorber(&self.inner.loose(q)?, left_pad, right_pad)?);
        }
        let composite = y.vdc.compose(&absorbers, &image)?;
        Ok(Cell {
            frame: target_frame,
            id: composite.id,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::monads::mod_vdc;
    use crate::fixtures;
    use crate::functor::functor_violations;
    use crate::ident::nat;

    #[test]
    fn identity_monad_in_span() {
        let s = fixtures::span_fixture(2);
        let m = identity_monad(&s, &nat(2)).unwrap();
        assert!(
            crate::constructions::monads::monad_violations(s.vdc.as_ref(), &m).is_empty()
        );
    }

    #[test]
    fn mod_unit_is_a_functor_on_span1() {
        let s = fixtures::span_fixture(1);
        let (m, _) = mod_vdc(s.vdc.clone()).unwrap();
        let unit = ModUnitFun::new(s, m);
        let v = functor_violations(&unit, 2, 10_000);
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn counit_after_unit_is_identity_on_objects() {
        let s = fixtures::span_fixture(1);
        let (m, _) = mod_vdc(s.vdc.clone()).unwrap();
        let unit = ModUnitFun::new(s.clone(), m.clone());
        let counit = ModCounitFun::new(m);
        for a in &s.vdc.tight().objects {
            assert_eq!(&counit.ob(&unit.ob(a).unwrap()).unwrap(), a);
        }
        for l in s.vdc.looses() {
            assert_eq!(&counit.loose(&unit.loose(&l.id).unwrap()).unwrap(), &l.id);
        }
    }

    #[test]
    fn laxidem_counit_exists_for_terminal() {
        let t = fixtures::terminal();
        let (m, _) = mod_vdc(t.vdc.clone()).unwrap();
        let gamma = laxidem_counit(&t, &m).unwrap();
        assert_eq!(gamma.tight_components.len(), 1);
        assert_eq!(gamma.loose_components.len(), 1);
    }
}
