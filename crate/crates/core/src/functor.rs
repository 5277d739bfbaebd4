//! Finitely presented functors presented by a single module morphism.
//!
//! A functor `F` with defining morphism `f: X -> Y` evaluates at a module
//! `A` to `coker(Hom(Y, A) -> Hom(X, A))`, the map being precomposition
//! with `f`. Representable functors are the special case `X -> 0`, tensor
//! functors arise from transposed presentations. Natural transformations
//! are lift pairs `(u, v)` against the defining morphisms; their group is
//! computed as the kernel of the induced map `G(X_F) -> G(Y_F)`, and
//! kernels/cokernels of transformations are again functors, presented by
//! the usual mapping-cone style recipe.

use std::cell::{OnceCell, RefCell};
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::abelian::{AbMap, Coords, Window};
use crate::error::{Error, Result};
use crate::module::{
    direct_sum, hom_group, FpModule, HomGroup, ModuleMorphism, MorphismJson, Side,
    INTERNAL_MODULE_BOUND,
};

pub struct FpFunctor {
    /// side of the modules the functor consumes
    pub side: Side,
    pub defining: ModuleMorphism,
    eval_cache: RefCell<HashMap<u64, Rc<Evaluation>>>,
    key: OnceCell<u64>,
}

impl std::fmt::Debug for FpFunctor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FpFunctor")
            .field("side", &self.side)
            .field("defining", &self.defining)
            .finish()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctorJson {
    pub variable_side: Side,
    pub defining: MorphismJson,
}

impl FpFunctor {
    pub fn from_morphism(f: ModuleMorphism) -> Rc<FpFunctor> {
        Rc::new(FpFunctor {
            side: f.source.side,
            defining: f,
            eval_cache: RefCell::new(HashMap::new()),
            key: OnceCell::new(),
        })
    }

    pub fn x_module(&self) -> &Rc<FpModule> {
        &self.defining.source
    }

    pub fn y_module(&self) -> &Rc<FpModule> {
        &self.defining.target
    }

    pub fn ring(&self) -> &Rc<crate::ring::FiniteRing> {
        &self.defining.source.ring
    }

    pub fn key(&self) -> u64 {
        *self.key.get_or_init(|| {
            let mut h = std::collections::hash_map::DefaultHasher::new();
            self.side.hash(&mut h);
            self.defining.key().hash(&mut h);
            h.finish()
        })
    }

    pub fn to_json(&self) -> FunctorJson {
        FunctorJson { variable_side: self.side, defining: self.defining.to_json() }
    }
}

/// `F(A)` together with decode to representing morphisms `X_F -> A`.
pub struct Evaluation {
    pub module: Rc<FpModule>,
    pub window: Rc<Window>,
    hom_x: HomGroup,
}

impl Evaluation {
    pub fn group(&self) -> crate::abelian::AbGroup {
        self.window.group()
    }

    /// A representing morphism `X_F -> A` for the class.
    pub fn decode(&self, c: &Coords) -> ModuleMorphism {
        let amb = self.window.decode(c);
        let coords: Coords = amb.iter().map(|&x| x as u64).collect();
        self.hom_x.decode(&coords)
    }

    /// Class of a representing morphism.
    pub fn encode(&self, h: &ModuleMorphism) -> Coords {
        let inner = self.hom_x.encode(h);
        let amb: Vec<i128> = inner.iter().map(|&x| x as i128).collect();
        self.window.encode(&amb).expect("evaluation ambient is full")
    }
}

/// `F(A) = coker(Hom(Y_F, A) -> Hom(X_F, A))`.
pub fn evaluate(f: &Rc<FpFunctor>, a: &Rc<FpModule>) -> Result<Rc<Evaluation>> {
    if a.side != f.side {
        return Err(Error::SideMismatch { expected: f.side, got: a.side });
    }
    if let Some(hit) = f.eval_cache.borrow().get(&a.key()) {
        return Ok(hit.clone());
    }
    let hom_y = hom_group(f.y_module(), a)?;
    let hom_x = hom_group(f.x_module(), a)?;
    let img = hom_y
        .window
        .generators()
        .iter()
        .map(|c| {
            let h = hom_y.decode(c);
            let composed = f.defining.then(&h).expect("precomposition is defined");
            hom_x.encode(&composed)
        })
        .collect();
    let pre = AbMap::new(hom_y.window.clone(), hom_x.window.clone(), img);
    let window = pre.cokernel();
    let eval = Rc::new(Evaluation { module: a.clone(), window, hom_x });
    f.eval_cache.borrow_mut().insert(a.key(), eval.clone());
    Ok(eval)
}

/// The induced map `F(A) -> F(B)` of a module morphism `a: A -> B`.
pub fn map_on_morphism(f: &Rc<FpFunctor>, a: &ModuleMorphism) -> Result<AbMap> {
    let ea = evaluate(f, &a.source)?;
    let eb = evaluate(f, &a.target)?;
    let img = ea
        .window
        .generators()
        .iter()
        .map(|c| {
            let h = ea.decode(c);
            eb.encode(&h.then(a).expect("postcomposition is defined"))
        })
        .collect();
    Ok(AbMap::new(ea.window.clone(), eb.window.clone(), img))
}

/// The representable functor `A -> Hom(X, A)`, presented by `X -> 0`.
pub fn yoneda(x: &Rc<FpModule>) -> Rc<FpFunctor> {
    let zero = FpModule::zero(x.ring.clone(), x.side);
    let f = ModuleMorphism::new(x.clone(), zero, vec![vec![]; x.gens])
        .expect("map to the zero module");
    FpFunctor::from_morphism(f)
}

/// The tensor functor of `X`: a functor on modules of the opposite side
/// whose evaluation at `N` is `X ⊗ N` (resp. `N ⊗ X`). The defining
/// morphism is the transpose of a minimized presentation of `X`, between
/// free modules of the opposite side.
pub fn tensor_functor(x: &Rc<FpModule>) -> Result<Rc<FpFunctor>> {
    let out_side = x.side.flip();
    let rows = x.min_relations().to_vec();
    let k = x.gens;
    let m = rows.len();
    let p = FpModule::free(x.ring.clone(), out_side, k, INTERNAL_MODULE_BOUND)?;
    let q = FpModule::free(x.ring.clone(), out_side, m, INTERNAL_MODULE_BOUND)?;
    let images: Vec<Vec<u8>> = (0..k)
        .map(|j| rows.iter().map(|row| row[j]).collect())
        .collect();
    let psi = ModuleMorphism::new(p, q, images)?;
    Ok(FpFunctor::from_morphism(psi))
}

pub fn zero_functor(ring: &Rc<crate::ring::FiniteRing>, side: Side) -> Rc<FpFunctor> {
    let z = FpModule::zero(ring.clone(), side);
    FpFunctor::from_morphism(ModuleMorphism::identity(&z))
}

/// Objectwise product (equivalently biproduct) of two functors.
pub fn product_functor(f: &Rc<FpFunctor>, g: &Rc<FpFunctor>) -> Result<Rc<FpFunctor>> {
    if f.side != g.side {
        return Err(Error::SideMismatch { expected: f.side, got: g.side });
    }
    let sx = direct_sum(f.x_module(), g.x_module())?;
    let sy = direct_sum(f.y_module(), g.y_module())?;
    let fx = sx.proj.0.then(&f.defining)?.then(&sy.inj.0)?;
    let gx = sx.proj.1.then(&g.defining)?.then(&sy.inj.1)?;
    Ok(FpFunctor::from_morphism(fx.add(&gx)))
}

/// Natural transformation `F -> G` as a lift pair against the defining
/// morphisms: `u: X_G -> X_F`, `v: Y_G -> Y_F` with `f∘u = v∘g`.
#[derive(Clone)]
pub struct NatTransformation {
    pub src: Rc<FpFunctor>,
    pub dst: Rc<FpFunctor>,
    pub u: ModuleMorphism,
    pub v: ModuleMorphism,
}

impl std::fmt::Debug for NatTransformation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NatTransformation")
            .field("u", &self.u)
            .field("v", &self.v)
            .finish()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NatJson {
    pub src: FunctorJson,
    pub dst: FunctorJson,
    pub u: Vec<Vec<u8>>,
    pub v: Vec<Vec<u8>>,
}

impl NatTransformation {
    pub fn new(
        src: Rc<FpFunctor>,
        dst: Rc<FpFunctor>,
        u: ModuleMorphism,
        v: ModuleMorphism,
    ) -> Result<NatTransformation> {
        if src.side != dst.side {
            return Err(Error::SideMismatch { expected: src.side, got: dst.side });
        }
        let lhs = u.then(&src.defining)?;
        let rhs = dst.defining.then(&v)?;
        if !lhs.equal(&rhs) {
            return Err(Error::internal("lift pair does not commute with the presentations"));
        }
        Ok(NatTransformation { src, dst, u, v })
    }

    pub fn identity(f: &Rc<FpFunctor>) -> NatTransformation {
        NatTransformation {
            src: f.clone(),
            dst: f.clone(),
            u: ModuleMorphism::identity(f.x_module()),
            v: ModuleMorphism::identity(f.y_module()),
        }
    }

    pub fn zero(src: &Rc<FpFunctor>, dst: &Rc<FpFunctor>) -> NatTransformation {
        NatTransformation {
            src: src.clone(),
            dst: dst.clone(),
            u: ModuleMorphism::zero(dst.x_module(), src.x_module()),
            v: ModuleMorphism::zero(dst.y_module(), src.y_module()),
        }
    }

    /// `other ∘ self` (self first).
    pub fn then(&self, other: &NatTransformation) -> Result<NatTransformation> {
        if self.dst.key() != other.src.key() {
            return Err(Error::NotComposable { position: 0 });
        }
        Ok(NatTransformation {
            src: self.src.clone(),
            dst: other.dst.clone(),
            u: other.u.then(&self.u)?,
            v: other.v.then(&self.v)?,
        })
    }

    pub fn add(&self, other: &NatTransformation) -> NatTransformation {
        NatTransformation {
            src: self.src.clone(),
            dst: self.dst.clone(),
            u: self.u.add(&other.u),
            v: self.v.add(&other.v),
        }
    }

    pub fn neg(&self) -> NatTransformation {
        NatTransformation {
            src: self.src.clone(),
            dst: self.dst.clone(),
            u: self.u.neg(),
            v: self.v.neg(),
        }
    }

    /// The component at `A` as a map of evaluation groups.
    pub fn at_module(&self, a: &Rc<FpModule>) -> Result<AbMap> {
        let ef = evaluate(&self.src, a)?;
        let eg = evaluate(&self.dst, a)?;
        let img = ef
            .window
            .generators()
            .iter()
            .map(|c| {
                let h = ef.decode(c);
                Ok(eg.encode(&self.u.then(&h)?))
            })
            .collect::<Result<_>>()?;
        Ok(AbMap::new(ef.window.clone(), eg.window.clone(), img))
    }

    pub fn normal_form(&self) -> Result<Coords> {
        nat_group(&self.src, &self.dst)?.encode(self)
    }

    pub fn equal(&self, other: &NatTransformation) -> Result<bool> {
        if self.src.key() != other.src.key() || self.dst.key() != other.dst.key() {
            return Ok(false);
        }
        Ok(self.normal_form()? == other.normal_form()?)
    }

    pub fn is_pointwise_iso(&self, basis: &[Rc<FpModule>]) -> Result<bool> {
        for b in basis {
            if !self.at_module(b)?.is_iso() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_pointwise_mono(&self, basis: &[Rc<FpModule>]) -> Result<bool> {
        for b in basis {
            if !self.at_module(b)?.is_injective() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_json(&self) -> NatJson {
        NatJson {
            src: self.src.to_json(),
            dst: self.dst.to_json(),
            u: self.u.images.clone(),
            v: self.v.images.clone(),
        }
    }
}

/// The group `Nat(F, G)`, computed as `ker(G(f): G(X_F) -> G(Y_F))`.
pub struct NatGroup {
    pub src: Rc<FpFunctor>,
    pub dst: Rc<FpFunctor>,
    pub window: Rc<Window>,
    eval_x: Rc<Evaluation>,
}

pub fn nat_group(f: &Rc<FpFunctor>, g: &Rc<FpFunctor>) -> Result<NatGroup> {
    if f.side != g.side {
        return Err(Error::SideMismatch { expected: f.side, got: g.side });
    }
    let eval_x = evaluate(g, f.x_module())?;
    let gf = map_on_morphism(g, &f.defining)?;
    let window = gf.kernel();
    Ok(NatGroup { src: f.clone(), dst: g.clone(), window, eval_x })
}

impl NatGroup {
    pub fn group(&self) -> crate::abelian::AbGroup {
        self.window.group()
    }

    /// Reconstruct a lift pair from the kernel element: pick a
    /// representative `u`, then solve `f∘u = v∘g` for `v`.
    pub fn decode(&self, c: &Coords) -> Result<NatTransformation> {
        let amb = self.window.decode(c);
        let inner: Coords = amb.iter().map(|&x| x as u64).collect();
        let u = self.eval_x.decode(&inner);
        let f = &self.src.defining;
        let g = &self.dst.defining;
        let target_hom = hom_group(&g.source, &f.target)?;
        let v_hom = hom_group(&g.target, &f.target)?;
        let precompose_g = AbMap::new(
            v_hom.window.clone(),
            target_hom.window.clone(),
            v_hom
                .window
                .generators()
                .iter()
                .map(|cc| {
                    let h = v_hom.decode(cc);
                    Ok(target_hom.encode(&g.then(&h)?))
                })
                .collect::<Result<_>>()?,
        );
        let target = target_hom.encode(&u.then(f)?);
        let v_coords = precompose_g.preimage(&target).ok_or_else(|| {
            Error::internal("no second lift component exists for a kernel element")
        })?;
        let v = v_hom.decode(&v_coords);
        NatTransformation::new(self.src.clone(), self.dst.clone(), u, v)
    }

    pub fn encode(&self, alpha: &NatTransformation) -> Result<Coords> {
        let inner = self.eval_x.encode(&alpha.u);
        let amb: Vec<i128> = inner.iter().map(|&x| x as i128).collect();
        self.window
            .encode(&amb)
            .ok_or_else(|| Error::internal("transformation class escapes the kernel window"))
    }

    /// All transformations in canonical order; guarded by group order.
    pub fn all(&self) -> Result<Vec<NatTransformation>> {
        if self.window.order() > (1 << 16) {
            return Err(Error::BoundExceeded {
                what: "natural transformation enumeration".into(),
                bound: 1 << 16,
            });
        }
        self.window.elements().iter().map(|c| self.decode(c)).collect()
    }
}

/// Kernel, image and cokernel of a natural transformation, as functors
/// with canonical arrows.
pub struct NatFactorization {
    pub kernel: Rc<FpFunctor>,
    pub kernel_mono: NatTransformation,
    pub image: Rc<FpFunctor>,
    pub image_mono: NatTransformation,
    pub image_epi: NatTransformation,
    pub cokernel: Rc<FpFunctor>,
    pub cokernel_epi: NatTransformation,
}

/// Cokernel of `α: F -> G` with lift `(u, g)`: the functor presented by
/// `(u, g): X_G -> X_F ⊕ Y_G`, with the canonical epi from `G`. The
/// presentation is simplified afterwards; iterated constructions would
/// otherwise pile up generators.
fn cokernel_of(alpha: &NatTransformation) -> Result<(Rc<FpFunctor>, NatTransformation)> {
    let g = &alpha.dst.defining;
    let sum = direct_sum(alpha.src.x_module(), alpha.dst.y_module())?;
    let ck_images: Vec<Vec<u8>> = alpha
        .u
        .images
        .iter()
        .zip(&g.images)
        .map(|(ui, gi)| {
            let a = sum.inj.0.apply(ui);
            let b = sum.inj.1.apply(gi);
            sum.module.add_elems(&a, &b)
        })
        .collect();
    let ck = ModuleMorphism::new(g.source.clone(), sum.module.clone(), ck_images)?;
    let (x_small, into_x, _onto_x) = crate::module::simplify(&ck.source)?;
    let (_y_small, into_y, onto_y) = crate::module::simplify(&ck.target)?;
    let ck_small = into_x.then(&ck)?.then(&onto_y)?;
    let coker = FpFunctor::from_morphism(ck_small);
    // epi G -> coker: identity on the X side, projection on the Y side
    let epi = NatTransformation::new(
        alpha.dst.clone(),
        coker.clone(),
        into_x,
        into_y.then(&sum.proj.1)?,
    )?;
    Ok((coker, epi))
}

/// Kernel of `α: F -> G`: present `C = coker(X_G -> X_F ⊕ Y_G, x -> (u x, -g x))`
/// and map it to `Y_F ⊕ coker(g)` by `(f, v)` and the canonical projection.
fn kernel_of(alpha: &NatTransformation) -> Result<(Rc<FpFunctor>, NatTransformation)> {
    let f = &alpha.src.defining;
    let g = &alpha.dst.defining;
    let sum_c = direct_sum(alpha.src.x_module(), alpha.dst.y_module())?;
    // C as a quotient of X_F ⊕ Y_G
    let mut rels = sum_c.module.relations.clone();
    for (ui, gi) in alpha.u.images.iter().zip(&g.images) {
        let a = sum_c.inj.0.apply(ui);
        let b = sum_c.inj.1.apply(&g.target.neg_elem(gi));
        rels.push(sum_c.module.add_elems(&a, &b));
    }
    let c_mod = FpModule::new(
        sum_c.module.ring.clone(),
        sum_c.module.side,
        sum_c.module.gens,
        rels,
        INTERNAL_MODULE_BOUND,
    )?;
    let (g_coker, g_coker_epi) = crate::module::cokernel_only(g)?;
    let sum_d = direct_sum(alpha.src.y_module(), &g_coker)?;
    // κ: C -> Y_F ⊕ coker(g) on the generators of X_F ⊕ Y_G
    let mut kappa_images = Vec::with_capacity(c_mod.gens);
    for j in 0..alpha.src.x_module().gens {
        kappa_images.push(sum_d.inj.0.apply(&f.images[j]));
    }
    for l in 0..alpha.dst.y_module().gens {
        let a = sum_d.inj.0.apply(&alpha.v.images[l]);
        let unit = {
            let m = alpha.dst.y_module();
            let mut v = vec![m.ring.zero; m.gens];
            v[l] = m.ring.one;
            v
        };
        let b = sum_d.inj.1.apply(&g_coker_epi.apply(&unit));
        kappa_images.push(sum_d.module.add_elems(&a, &b));
    }
    let kappa = ModuleMorphism::new(c_mod.clone(), sum_d.module.clone(), kappa_images)?;
    let (_c_small, into_c, onto_c) = crate::module::simplify(&c_mod)?;
    let (_d_small, _into_d, onto_d) = crate::module::simplify(&sum_d.module)?;
    let kappa_small = into_c.then(&kappa)?.then(&onto_d)?;
    let kernel = FpFunctor::from_morphism(kappa_small);
    // mono kernel -> F: X_F -> C is the inclusion followed by the quotient,
    // Y_F -> Y_F ⊕ coker(g) the inclusion, both pushed into the
    // simplified presentations
    let incl_x = ModuleMorphism::new(
        alpha.src.x_module().clone(),
        c_mod.clone(),
        (0..alpha.src.x_module().gens)
            .map(|j| {
                let m = alpha.src.x_module();
                let mut v = vec![m.ring.zero; m.gens];
                v[j] = m.ring.one;
                c_mod.reduce(&sum_c.inj.0.apply(&v))
            })
            .collect(),
    )?;
    let mono = NatTransformation::new(
        kernel.clone(),
        alpha.src.clone(),
        incl_x.then(&onto_c)?,
        sum_d.inj.0.then(&onto_d)?,
    )?;
    Ok((kernel, mono))
}

/// Solve `mono ∘ φ = alpha` for `φ`; `mono: M -> G` must be a kernel-style
/// mono with the same target as `alpha`.
pub fn factor_through_mono(
    alpha: &NatTransformation,
    mono: &NatTransformation,
) -> Result<NatTransformation> {
    let nm = nat_group(&alpha.src, &mono.src)?;
    let ng = nat_group(&alpha.src, &alpha.dst)?;
    let post = AbMap::new(
        nm.window.clone(),
        ng.window.clone(),
        nm.window
            .generators()
            .iter()
            .map(|c| {
                let phi = nm.decode(c)?;
                ng.encode(&phi.then(mono)?)
            })
            .collect::<Result<_>>()?,
    );
    let target = ng.encode(alpha)?;
    let coords = post
        .preimage(&target)
        .ok_or_else(|| Error::internal("transformation does not factor through the mono"))?;
    nm.decode(&coords)
}

pub fn nat_factorize(alpha: &NatTransformation) -> Result<NatFactorization> {
    let (cokernel, cokernel_epi) = cokernel_of(alpha)?;
    let (kernel, kernel_mono) = kernel_of(alpha)?;
    let (image, image_mono) = kernel_of(&cokernel_epi)?;
    let image_epi = factor_through_mono(alpha, &image_mono)?;
    Ok(NatFactorization { kernel, kernel_mono, image, image_mono, image_epi, cokernel, cokernel_epi })
}

/// Extensional verification of a factorization on a basis: the five-term
/// sequence must be exact at every basis module and the end groups must
/// match the pointwise kernels and cokernels.
pub fn verify_factorization(
    alpha: &NatTransformation,
    fac: &NatFactorization,
    basis: &[Rc<FpModule>],
) -> Result<()> {
    for b in basis {
        let at = alpha.at_module(b)?;
        let mono = fac.kernel_mono.at_module(b)?;
        let epi = fac.cokernel_epi.at_module(b)?;
        if !mono.is_injective() || !epi.is_surjective() {
            return Err(Error::internal("factorization ends are not mono/epi pointwise"));
        }
        // im(mono) = ker(alpha) and im(alpha) = ker(epi), as subgroups
        let im_mono = mono.image();
        let ker_alpha = at.kernel();
        if im_mono.order() != ker_alpha.order() {
            return Err(Error::internal("kernel mono image has wrong order"));
        }
        let im_alpha = at.image();
        let ker_epi = epi.kernel();
        if im_alpha.order() != ker_epi.order() {
            return Err(Error::internal("cokernel epi kernel has wrong order"));
        }
        for c in im_alpha.generators() {
            if !ker_epi.contains_ambient(&im_alpha.decode(&c)) {
                return Err(Error::internal("image does not sit inside the epi kernel"));
            }
        }
        let eval_coker = evaluate(&fac.cokernel, b)?;
        if eval_coker.group() != at.cokernel().group() {
            return Err(Error::internal("cokernel functor disagrees pointwise"));
        }
        let eval_ker = evaluate(&fac.kernel, b)?;
        if eval_ker.group() != at.kernel().group() {
            return Err(Error::internal("kernel functor disagrees pointwise"));
        }
        let eval_im = evaluate(&fac.image, b)?;
        if eval_im.group() != at.image().group() {
            return Err(Error::internal("image functor disagrees pointwise"));
        }
    }
    Ok(())
}

/// Zero test against a basis of modules.
pub fn is_zero_functor(f: &Rc<FpFunctor>, basis: &[Rc<FpModule>]) -> Result<bool> {
    for b in basis {
        if !evaluate(f, b)?.group().is_trivial() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Search `Nat(F, G)` for a transformation that is an isomorphism at
/// every basis module; returns the first witness in normal-form order.
pub fn functors_isomorphic(
    f: &Rc<FpFunctor>,
    g: &Rc<FpFunctor>,
    basis: &[Rc<FpModule>],
) -> Result<Option<NatTransformation>> {
    // cheap screen: the evaluations must agree
    for b in basis {
        if evaluate(f, b)?.group() != evaluate(g, b)?.group() {
            return Ok(None);
        }
    }
    let ng = nat_group(f, g)?;
    if ng.window.order() > (1 << 16) {
        return Err(Error::BoundExceeded {
            what: "isomorphism witness search".into(),
            bound: 1 << 16,
        });
    }
    for c in ng.window.elements() {
        let alpha = ng.decode(&c)?;
        if alpha.is_pointwise_iso(basis)? {
            return Ok(Some(alpha));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::DEFAULT_MODULE_BOUND;
    use crate::ring::make_zmod;

    fn setup() -> (Rc<FpModule>, Rc<FpModule>, Rc<FpFunctor>, Vec<Rc<FpModule>>) {
        let r = make_zmod(4).unwrap();
        let z2 = FpModule::new(r.clone(), Side::Right, 1, vec![vec![2]], DEFAULT_MODULE_BOUND)
            .unwrap();
        let z4 = FpModule::new(r.clone(), Side::Right, 1, vec![], DEFAULT_MODULE_BOUND).unwrap();
        // Ext^1(Z/2, -): defining morphism Z/2 -> Z/4, generator to 2
        let f = ModuleMorphism::new(z2.clone(), z4.clone(), vec![vec![2]]).unwrap();
        let ext = FpFunctor::from_morphism(f);
        let basis = vec![z2.clone(), z4.clone()];
        (z2, z4, ext, basis)
    }

    // independent oracle: A[2] / 2A by direct enumeration
    fn ext_oracle(a: &Rc<FpModule>) -> Vec<u64> {
        let els = a.elements().to_vec();
        let killed: Vec<Vec<u8>> = els
            .iter()
            .filter(|v| a.reduce(&a.scale(v, 2)) == a.zero_elem())
            .cloned()
            .collect();
        let doubled: std::collections::BTreeSet<Vec<u8>> =
            els.iter().map(|v| a.reduce(&a.scale(v, 2))).collect();
        // quotient killed / doubled
        let rep = |v: &Vec<u8>| -> Vec<u8> {
            doubled.iter().map(|d| a.add_elems(v, d)).min().unwrap()
        };
        let reps: std::collections::BTreeSet<Vec<u8>> = killed.iter().map(rep).collect();
        let reps: Vec<Vec<u8>> = reps.into_iter().collect();
        crate::abelian::invariant_factors_brute(&reps, |x, y| rep(&a.add_elems(x, y)), &rep(&a.zero_elem()))
    }

    #[test]
    fn ext_functor_values() {
        let (z2, z4, ext, _) = setup();
        let at_z4 = evaluate(&ext, &z4).unwrap();
        assert_eq!(at_z4.group().invariant_factors, ext_oracle(&z4));
        assert!(at_z4.group().is_trivial());
        let at_z2 = evaluate(&ext, &z2).unwrap();
        assert_eq!(at_z2.group().invariant_factors, ext_oracle(&z2));
        assert_eq!(at_z2.group().invariant_factors, vec![2]);
    }

    #[test]
    fn yoneda_evaluates_to_hom() {
        let (z2, z4, _, basis) = setup();
        let y = yoneda(&z4);
        for b in &basis {
            assert_eq!(
                evaluate(&y, b).unwrap().group(),
                hom_group(&z4, b).unwrap().group()
            );
        }
        assert_eq!(evaluate(&y, &z2).unwrap().group().invariant_factors, vec![2]);
        let y0 = yoneda(&FpModule::zero(z4.ring.clone(), Side::Right));
        assert!(is_zero_functor(&y0, &basis).unwrap());
    }

    #[test]
    fn zero_functor_from_identity_presentation() {
        let (z2, _, _, basis) = setup();
        let zf = FpFunctor::from_morphism(ModuleMorphism::identity(&z2));
        assert!(is_zero_functor(&zf, &basis).unwrap());
    }

    #[test]
    fn tensor_functor_agrees_with_tensor_group() {
        let (z2, z4, _, _) = setup();
        for x in [&z2, &z4] {
            let t = tensor_functor(x).unwrap();
            for n_rel in [vec![], vec![vec![2u8]]] {
                let n = FpModule::new(x.ring.clone(), Side::Left, 1, n_rel, DEFAULT_MODULE_BOUND)
                    .unwrap();
                let ev = evaluate(&t, &n).unwrap().group();
                let tg = crate::module::tensor_group(x, &n).unwrap().group();
                assert_eq!(ev, tg);
            }
        }
    }

    #[test]
    fn functoriality_on_morphisms() {
        let (_, z4, ext, basis) = setup();
        let id = ModuleMorphism::identity(&z4);
        let m = map_on_morphism(&ext, &id).unwrap();
        assert!(m.is_iso());
        // doubling on Z/4 induces the zero map on Ext^1(Z/2, -)
        let dbl = ModuleMorphism::new(z4.clone(), z4.clone(), vec![vec![2]]).unwrap();
        let md = map_on_morphism(&ext, &dbl).unwrap();
        assert!(md.is_zero());
        // composition is respected on a sample
        for b in &basis {
            let idb = ModuleMorphism::identity(b);
            let chain = idb.then(&idb).unwrap();
            let lhs = map_on_morphism(&ext, &chain).unwrap();
            let rhs = map_on_morphism(&ext, &idb)
                .unwrap()
                .then(&map_on_morphism(&ext, &idb).unwrap());
            assert!(lhs.equal(&rhs));
        }
    }

    #[test]
    fn yoneda_lemma_on_the_nose() {
        let (z2, z4, ext, basis) = setup();
        for x in [&z2, &z4] {
            let y = yoneda(x);
            let ng = nat_group(&y, &ext).unwrap();
            let ev = evaluate(&ext, x).unwrap();
            assert_eq!(ng.group(), ev.group());
            // α -> α_X(1_X) realizes the isomorphism
            for c in ng.window.elements() {
                let alpha = ng.decode(&c).unwrap();
                let at_x = alpha.at_module(x).unwrap();
                let id_class = ev_of_identity(&y, x);
                let image = at_x.apply(&id_class);
                // the class of u equals the evaluation at the identity
                let direct = ev.encode(&alpha.u);
                assert_eq!(image, direct);
            }
            let _ = basis;
        }
    }

    fn ev_of_identity(y: &Rc<FpFunctor>, x: &Rc<FpModule>) -> Coords {
        let e = evaluate(y, x).unwrap();
        e.encode(&ModuleMorphism::identity(x))
    }

    #[test]
    fn nat_group_matches_brute_family_count() {
        // Nat(Ext, Ext) over a tiny corpus, compared against enumerating
        // all natural families on the basis.
        let (z2, z4, ext, basis) = setup();
        let ng = nat_group(&ext, &ext).unwrap();
        let fast = ng.group();
        // brute force: all tuples of maps (φ_B) commuting with every
        // morphism between basis modules
        let evals: Vec<Rc<Evaluation>> =
            basis.iter().map(|b| evaluate(&ext, b).unwrap()).collect();
        let mut count = 0u64;
        let all_maps: Vec<Vec<AbMap>> = evals
            .iter()
            .map(|e| all_endos(&e.window))
            .collect();
        let mut idx = vec![0usize; basis.len()];
        loop {
            let family: Vec<&AbMap> =
                idx.iter().zip(&all_maps).map(|(&i, maps)| &maps[i]).collect();
            let mut natural = true;
            'check: for (bi, b) in basis.iter().enumerate() {
                for (bj, b2) in basis.iter().enumerate() {
                    let hom = hom_group(b, b2).unwrap();
                    for hc in hom.window.elements() {
                        let h = hom.decode(&hc);
                        let fh = map_on_morphism(&ext, &h).unwrap();
                        let lhs = family[bi].then(&fh);
                        let rhs = fh.then(family[bj]);
                        if !lhs.equal(&rhs) {
                            natural = false;
                            break 'check;
                        }
                    }
                }
            }
            if natural {
                count += 1;
            }
            // odometer
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < all_maps[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
            let _ = (z2.clone(), z4.clone());
        }
        assert_eq!(count, fast.order() as u64);
    }

    fn all_endos(w: &Rc<Window>) -> Vec<AbMap> {
        // all group endomorphisms of a small window
        let gens = w.generators();
        let els = w.elements();
        let mut out = Vec::new();
        let mut idx = vec![0usize; gens.len()];
        loop {
            let img: Vec<Coords> = idx.iter().map(|&i| els[i].clone()).collect();
            // respect generator orders
            let ok = w
                .dims()
                .iter()
                .zip(&img)
                .all(|(&d, im)| w.smul(d as i128, im).iter().all(|&x| x == 0));
            if ok {
                out.push(AbMap::new(w.clone(), w.clone(), img));
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return out;
                }
                idx[k] += 1;
                if idx[k] < els.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn factorize_identity_and_zero_transformations() {
        let (_, _, ext, basis) = setup();
        let id = NatTransformation::identity(&ext);
        let fac = nat_factorize(&id).unwrap();
        assert!(is_zero_functor(&fac.kernel, &basis).unwrap());
        assert!(is_zero_functor(&fac.cokernel, &basis).unwrap());
        verify_factorization(&id, &fac, &basis).unwrap();

        let zero = NatTransformation::zero(&ext, &ext);
        let fac0 = nat_factorize(&zero).unwrap();
        verify_factorization(&zero, &fac0, &basis).unwrap();
        assert!(functors_isomorphic(&fac0.kernel, &ext, &basis).unwrap().is_some());
        assert!(functors_isomorphic(&fac0.cokernel, &ext, &basis).unwrap().is_some());
    }

    #[test]
    fn product_evaluates_objectwise() {
        let (z2, z4, ext, basis) = setup();
        let y = yoneda(&z2);
        let p = product_functor(&ext, &y).unwrap();
        for b in &basis {
            let lhs = evaluate(&p, b).unwrap().group();
            let rhs = crate::abelian::ab_direct_sum(
                &evaluate(&ext, b).unwrap().group(),
                &evaluate(&y, b).unwrap().group(),
            );
            assert_eq!(lhs, rhs);
        }
        let _ = z4;
    }
}
