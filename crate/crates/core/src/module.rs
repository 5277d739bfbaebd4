//! Finitely presented modules over a finite ring.
//!
//! A module is a quotient `R^k / U` where `U` is the submodule generated
//! by the relation rows. Elements are lexicographically minimal coset
//! representatives in `R^k`, so every normal form is deterministic. Left
//! modules reuse the right-module machinery with the scalar action
//! reversed, which is the same thing as working over the opposite ring.
//!
//! Hom groups and tensor products are computed two ways: a brute-force
//! enumeration (the trusted oracle, used by tests and the verification
//! suite) and an integer-lattice path that expresses the constraints over
//! the additive structure and solves them with Smith/Hermite normal forms.
//! The lattice path is the production one; the suite cross-checks the two.

use std::cell::{OnceCell, RefCell};
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::abelian::{AbMap, Coords, Window};
use crate::error::{Error, Result};
use crate::ring::FiniteRing;
use crate::znf::{self, Mat};

/// Default public cap on module element counts.
pub const DEFAULT_MODULE_BOUND: u64 = 4096;
/// Cap used for modules the library builds internally (free covers and
/// block sums inside functor constructions). Internal modules may be
/// large because only their relation subgroup is ever enumerated.
pub const INTERNAL_MODULE_BOUND: u64 = u64::MAX;
/// Guard for explicit element enumeration.
const ENUM_CAP: u64 = 1 << 16;
/// Guard for the relation-subgroup closure.
const RELATION_CAP: u64 = 1 << 20;

#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Additive-group view of a module: generators, canonical window, and
/// encode/decode between module elements and window coordinates.
#[derive(Debug)]
pub struct GroupData {
    pub window: Rc<Window>,
    /// module elements corresponding to the window's canonical generators
    pub gen_elements: Vec<Vec<u8>>,
}

pub struct FpModule {
    pub ring: Rc<FiniteRing>,
    pub side: Side,
    pub gens: usize,
    pub relations: Vec<Vec<u8>>,
    pub size: u64,
    big: bool,
    rel_sub: Vec<Vec<u8>>,
    rel_sub_gens: Vec<Vec<u8>>,
    min_rel: OnceCell<Vec<Vec<u8>>>,
    elements: OnceCell<Vec<Vec<u8>>>,
    group: OnceCell<Rc<GroupData>>,
    reduce_cache: RefCell<HashMap<Vec<u8>, Vec<u8>>>,
    act_cache: RefCell<HashMap<u8, Rc<AbMap>>>,
    key: OnceCell<u64>,
}

impl std::fmt::Debug for FpModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FpModule")
            .field("ring", &self.ring.label)
            .field("side", &self.side)
            .field("gens", &self.gens)
            .field("relations", &self.relations)
            .field("size", &self.size)
            .finish()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleJson {
    pub ring_label: String,
    pub side: Side,
    pub gens: usize,
    pub relations: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismJson {
    pub ring_label: String,
    pub side: Side,
    pub source: ModuleJson,
    pub target: ModuleJson,
    pub images: Vec<Vec<u8>>,
}

/// Additive closure of a generating list inside a finite ambient.
/// Returns the sorted closure and the sublist of generators that were
/// actually needed.
fn additive_closure(
    zero: Vec<u8>,
    gens: impl IntoIterator<Item = Vec<u8>>,
    add: impl Fn(&[u8], &[u8]) -> Vec<u8>,
    cap: u64,
) -> Result<(Vec<Vec<u8>>, Vec<Vec<u8>>)> {
    let mut set: BTreeSet<Vec<u8>> = BTreeSet::new();
    set.insert(zero);
    let mut used = Vec::new();
    for g in gens {
        if set.contains(&g) {
            continue;
        }
        used.push(g.clone());
        let snapshot: Vec<Vec<u8>> = set.iter().cloned().collect();
        for s in snapshot {
            let mut cur = add(&s, &g);
            while cur != s {
                set.insert(cur.clone());
                if set.len() as u64 > cap {
                    return Err(Error::SizeLimit { predicted: set.len() as u64, bound: cap });
                }
                cur = add(&cur, &g);
            }
        }
    }
    Ok((set.into_iter().collect(), used))
}

impl FpModule {
    /// Build `R^k / <relations>` with element bound `bound`.
    pub fn new(
        ring: Rc<FiniteRing>,
        side: Side,
        gens: usize,
        relations: Vec<Vec<u8>>,
        bound: u64,
    ) -> Result<Rc<FpModule>> {
        for row in &relations {
            if row.len() != gens {
                return Err(Error::internal(format!(
                    "relation row has {} entries, expected {}",
                    row.len(),
                    gens
                )));
            }
            if row.iter().any(|&e| e as usize >= ring.size) {
                return Err(Error::internal("relation entry out of ring range"));
            }
        }
        if gens > 24 {
            return Err(Error::SizeLimit { predicted: u64::MAX, bound });
        }
        let total: u128 = (ring.size as u128).pow(gens as u32);
        // Close the relation rows under addition and the scalar action.
        let zero_vec = vec![ring.zero; gens];
        let scaled_rows: Vec<Vec<u8>> = {
            let mut rows: Vec<Vec<u8>> = relations
                .iter()
                .flat_map(|row| {
                    (0..ring.size as u8)
                        .map(|r| scale_vec(&ring, side, row, r))
                        .collect::<Vec<_>>()
                })
                .filter(|v| v.iter().any(|&x| x != ring.zero))
                .collect();
            rows.sort_unstable();
            rows.dedup();
            rows
        };
        let closure = additive_closure(
            zero_vec.clone(),
            scaled_rows.iter().cloned(),
            |a, b| add_vec(&ring, a, b),
            RELATION_CAP,
        );
        let group_cell = OnceCell::new();
        let (rel_sub, rel_sub_gens, big, size_u128) = match closure {
            Ok((sub, gens_used)) => {
                let size = total / sub.len() as u128;
                (sub, gens_used, false, size)
            }
            Err(Error::SizeLimit { .. }) => {
                // Too large to enumerate cosets: size and canonical
                // representatives come from the lattice window instead.
                let gd = build_group(&ring, gens, &scaled_rows);
                let order = gd.window.order();
                let _ = group_cell.set(Rc::new(gd));
                (vec![zero_vec], scaled_rows, true, order)
            }
            Err(e) => return Err(e),
        };
        if size_u128 > bound as u128 {
            return Err(Error::SizeLimit { predicted: size_u128.min(u64::MAX as u128) as u64, bound });
        }
        let size = size_u128.min(u64::MAX as u128) as u64;
        Ok(Rc::new(FpModule {
            ring,
            side,
            gens,
            relations,
            size,
            big,
            rel_sub,
            rel_sub_gens,
            min_rel: OnceCell::new(),
            elements: OnceCell::new(),
            group: group_cell,
            reduce_cache: RefCell::new(HashMap::new()),
            act_cache: RefCell::new(HashMap::new()),
            key: OnceCell::new(),
        }))
    }

    pub fn free(ring: Rc<FiniteRing>, side: Side, rank: usize, bound: u64) -> Result<Rc<FpModule>> {
        FpModule::new(ring, side, rank, vec![], bound)
    }

    pub fn zero(ring: Rc<FiniteRing>, side: Side) -> Rc<FpModule> {
        FpModule::new(ring, side, 0, vec![], DEFAULT_MODULE_BOUND).expect("zero module")
    }

    pub fn is_zero(&self) -> bool {
        self.size == 1
    }

    pub fn zero_elem(&self) -> Vec<u8> {
        self.reduce(&vec![self.ring.zero; self.gens])
    }

    pub fn scale(&self, v: &[u8], r: u8) -> Vec<u8> {
        scale_vec(&self.ring, self.side, v, r)
    }

    pub fn add_elems(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        self.reduce(&add_vec(&self.ring, a, b))
    }

    pub fn neg_elem(&self, a: &[u8]) -> Vec<u8> {
        self.reduce(&a.iter().map(|&x| self.ring.neg(x)).collect::<Vec<_>>())
    }

    /// Canonical representative of the coset `v + U`: lexicographically
    /// minimal for modules whose relation subgroup is enumerable, and a
    /// deterministic lattice-derived representative for oversized
    /// internal modules (which are never user-visible).
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        debug_assert_eq!(v.len(), self.gens);
        if !self.big && self.rel_sub.len() == 1 {
            return v.to_vec();
        }
        if let Some(hit) = self.reduce_cache.borrow().get(v) {
            return hit.clone();
        }
        let out = if self.big {
            let g = self.group();
            let coords = g
                .window
                .encode(&expr_of(&self.ring, v))
                .expect("ambient lattice is all of Z^n");
            elem_of(&self.ring, self.gens, &g.window.decode(&coords))
        } else {
            let mut best: Option<Vec<u8>> = None;
            for u in &self.rel_sub {
                let cand = add_vec(&self.ring, v, u);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
            best.expect("relation subgroup is nonempty")
        };
        self.reduce_cache.borrow_mut().insert(v.to_vec(), out.clone());
        out
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        v.len() == self.gens
            && v.iter().all(|&e| (e as usize) < self.ring.size)
            && self.reduce(v) == v
    }

    /// All canonical representatives, sorted. Guarded by an internal cap;
    /// the lattice paths never need this on large modules.
    pub fn elements(&self) -> &[Vec<u8>] {
        self.elements.get_or_init(|| {
            assert!(
                self.size <= ENUM_CAP,
                "element enumeration requested on a module of size {}",
                self.size
            );
            let gen_list = (0..self.gens).flat_map(|j| {
                self.ring.elements().map(move |r| (j, r)).collect::<Vec<_>>()
            });
            let items = gen_list.map(|(j, r)| {
                let mut v = vec![self.ring.zero; self.gens];
                v[j] = r;
                self.reduce(&v)
            });
            let (els, _) = additive_closure(
                self.zero_elem(),
                items,
                |a, b| self.reduce(&add_vec(&self.ring, a, b)),
                ENUM_CAP,
            )
            .expect("module size is within the enumeration cap");
            els
        })
    }

    /// A deterministic small generating set for the relation submodule:
    /// greedy module generators picked in lexicographic order, with
    /// membership tested against the integer lattice they span.
    pub fn min_relations(&self) -> &[Vec<u8>] {
        self.min_rel.get_or_init(|| {
            let plus = self.ring.plus();
            let t = plus.gens.len();
            let n = self.gens * t;
            // base lattice: kernel of Z^n -> R^k (per-slot ring relations)
            let mut base: Mat = Vec::new();
            for j in 0..self.gens {
                for row in &plus.rel_rows {
                    let mut r = vec![0i128; n];
                    r[j * t..(j + 1) * t].copy_from_slice(row);
                    base.push(r);
                }
            }
            let subgroup_order =
                (self.ring.size as u128).pow(self.gens as u32) / self.size as u128;
            let orders: Vec<u64> = (0..self.gens)
                .flat_map(|_| plus.gen_orders.iter().copied())
                .collect();
            let candidates: &[Vec<u8>] =
                if self.big { &self.rel_sub_gens } else { &self.rel_sub };
            let mut lattice = base.clone();
            let mut gens: Vec<Vec<u8>> = Vec::new();
            let mut spanned: u128 = 1;
            for v in candidates {
                if spanned == subgroup_order {
                    break;
                }
                if v.iter().all(|&x| x == self.ring.zero) {
                    continue;
                }
                let expr = expr_of(&self.ring, v);
                if znf::solve_left(&lattice, n, &expr).is_some() {
                    continue;
                }
                for r in 0..self.ring.size as u8 {
                    let scaled = scale_vec(&self.ring, self.side, v, r);
                    lattice.push(expr_of(&self.ring, &scaled));
                }
                gens.push(v.clone());
                spanned = Window::new(orders.clone(), &lattice, &base).order();
            }
            gens
        })
    }

    /// Additive-group view with canonical coordinates.
    pub fn group(&self) -> &Rc<GroupData> {
        self.group
            .get_or_init(|| Rc::new(build_group(&self.ring, self.gens, &self.rel_sub_gens)))
    }

    /// Coordinates of a (not necessarily canonical) vector's class.
    pub fn encode(&self, v: &[u8]) -> Coords {
        let g = self.group();
        g.window
            .encode(&expr_of(&self.ring, v))
            .expect("ambient lattice is all of Z^n")
    }

    pub fn decode(&self, c: &Coords) -> Vec<u8> {
        let g = self.group();
        self.reduce(&elem_of(&self.ring, self.gens, &g.window.decode(c)))
    }

    /// The scalar action as a group endomorphism in canonical coordinates.
    pub fn act_map(self: &Rc<Self>, r: u8) -> Rc<AbMap> {
        if let Some(hit) = self.act_cache.borrow().get(&r) {
            return hit.clone();
        }
        let g = self.group();
        let img = g
            .gen_elements
            .iter()
            .map(|e| self.encode(&self.scale(e, r)))
            .collect();
        let map = Rc::new(AbMap::new(g.window.clone(), g.window.clone(), img));
        self.act_cache.borrow_mut().insert(r, map.clone());
        map
    }

    /// Stable content key for caching.
    pub fn key(&self) -> u64 {
        *self.key.get_or_init(|| {
            let mut h = std::collections::hash_map::DefaultHasher::new();
            self.ring.label.hash(&mut h);
            self.ring.size.hash(&mut h);
            self.side.hash(&mut h);
            self.gens.hash(&mut h);
            self.relations.hash(&mut h);
            h.finish()
        })
    }

    pub fn same_module(&self, other: &FpModule) -> bool {
        self.side == other.side
            && self.gens == other.gens
            && self.relations == other.relations
            && self.ring.same_tables(&other.ring)
    }

    pub fn to_json(&self) -> ModuleJson {
        ModuleJson {
            ring_label: self.ring.label.clone(),
            side: self.side,
            gens: self.gens,
            relations: self.relations.clone(),
        }
    }

    /// The additive group in invariant-factor form.
    pub fn ab_group(&self) -> crate::abelian::AbGroup {
        self.group().window.group()
    }
}

pub fn add_vec(ring: &FiniteRing, a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(&x, &y)| ring.add(x, y)).collect()
}

pub fn scale_vec(ring: &FiniteRing, side: Side, v: &[u8], r: u8) -> Vec<u8> {
    match side {
        Side::Right => v.iter().map(|&x| ring.mul(x, r)).collect(),
        Side::Left => v.iter().map(|&x| ring.mul(r, x)).collect(),
    }
}

/// Integer expression of a vector in terms of the ring's additive
/// generators, one block per slot.
fn expr_of(ring: &FiniteRing, v: &[u8]) -> Vec<i128> {
    let plus = ring.plus();
    let mut out = Vec::with_capacity(v.len() * plus.gens.len());
    for &coord in v {
        out.extend_from_slice(&plus.exprs[coord as usize]);
    }
    out
}

/// Fold an ambient integer vector back to a (non-canonical) vector.
fn elem_of(ring: &FiniteRing, gens: usize, z: &[i128]) -> Vec<u8> {
    let plus = ring.plus();
    let t = plus.gens.len();
    let mut v = vec![ring.zero; gens];
    for (j, slot) in v.iter_mut().enumerate() {
        let mut acc = ring.zero;
        for (g, &zi) in z[j * t..(j + 1) * t].iter().enumerate() {
            let k = zi.rem_euclid(plus.gen_orders[g] as i128) as u64;
            for _ in 0..k {
                acc = ring.add(acc, plus.gens[g]);
            }
        }
        *slot = acc;
    }
    v
}

/// Integer lattice of all expressions that vanish in `R^gens / <rel_rows>`:
/// the per-slot ring relations plus the expressions of the relation rows.
fn relation_lattice(ring: &Rc<FiniteRing>, gens: usize, rel_rows: &[Vec<u8>]) -> Mat {
    let plus = ring.plus();
    let t = plus.gens.len();
    let n = gens * t;
    let mut k_rows: Mat = Vec::new();
    for j in 0..gens {
        for row in &plus.rel_rows {
            let mut r = vec![0i128; n];
            r[j * t..(j + 1) * t].copy_from_slice(row);
            k_rows.push(r);
        }
    }
    for u in rel_rows {
        k_rows.push(expr_of(ring, u));
    }
    k_rows
}

/// The additive group of `R^gens / <rel_rows>` in canonical coordinates.
/// `rel_rows` must generate the relation subgroup additively.
fn build_group(ring: &Rc<FiniteRing>, gens: usize, rel_rows: &[Vec<u8>]) -> GroupData {
    let plus = ring.plus();
    let t = plus.gens.len();
    let n = gens * t;
    let mut orders = Vec::with_capacity(n);
    for _ in 0..gens {
        orders.extend_from_slice(&plus.gen_orders);
    }
    let k_rows = relation_lattice(ring, gens, rel_rows);
    let window = Window::new(orders, &znf::identity(n), &k_rows);
    let gen_elements = window
        .generators()
        .iter()
        .map(|c| elem_of(ring, gens, &window.decode(c)))
        .collect();
    GroupData { window, gen_elements }
}

#[derive(Clone)]
pub struct ModuleMorphism {
    pub source: Rc<FpModule>,
    pub target: Rc<FpModule>,
    pub images: Vec<Vec<u8>>,
}

impl std::fmt::Debug for ModuleMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModuleMorphism")
            .field("source", &self.source)
            .field("target", &self.target)
            .field("images", &self.images)
            .finish()
    }
}

impl ModuleMorphism {
    pub fn new(
        source: Rc<FpModule>,
        target: Rc<FpModule>,
        images: Vec<Vec<u8>>,
    ) -> Result<ModuleMorphism> {
        if source.side != target.side {
            return Err(Error::SideMismatch { expected: source.side, got: target.side });
        }
        if !source.ring.same_tables(&target.ring) {
            return Err(Error::RingMismatch {
                left: source.ring.label.clone(),
                right: target.ring.label.clone(),
            });
        }
        if images.len() != source.gens {
            return Err(Error::internal(format!(
                "expected {} images, got {}",
                source.gens,
                images.len()
            )));
        }
        let images: Vec<Vec<u8>> = images
            .iter()
            .map(|v| {
                if v.len() != target.gens || v.iter().any(|&e| e as usize >= target.ring.size) {
                    Err(Error::internal("image vector out of range"))
                } else {
                    Ok(target.reduce(v))
                }
            })
            .collect::<Result<_>>()?;
        let zero = target.zero_elem();
        for (i, row) in source.relations.iter().enumerate() {
            let mut acc = vec![target.ring.zero; target.gens];
            for (img, &r) in images.iter().zip(row) {
                acc = add_vec(&target.ring, &acc, &target.scale(img, r));
            }
            if target.reduce(&acc) != zero {
                return Err(Error::RelationViolated { index: i });
            }
        }
        Ok(ModuleMorphism { source, target, images })
    }

    pub fn identity(m: &Rc<FpModule>) -> ModuleMorphism {
        let images = (0..m.gens)
            .map(|j| {
                let mut v = vec![m.ring.zero; m.gens];
                v[j] = m.ring.one;
                m.reduce(&v)
            })
            .collect();
        ModuleMorphism { source: m.clone(), target: m.clone(), images }
    }

    pub fn zero(source: &Rc<FpModule>, target: &Rc<FpModule>) -> ModuleMorphism {
        let images = vec![target.zero_elem(); source.gens];
        ModuleMorphism { source: source.clone(), target: target.clone(), images }
    }

    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        let mut acc = vec![self.target.ring.zero; self.target.gens];
        for (img, &r) in self.images.iter().zip(v) {
            acc = add_vec(&self.target.ring, &acc, &self.target.scale(img, r));
        }
        self.target.reduce(&acc)
    }

    /// `other ∘ self`; fails unless `other` starts where `self` ends.
    pub fn then(&self, other: &ModuleMorphism) -> Result<ModuleMorphism> {
        if !self.target.same_module(&other.source) {
            return Err(Error::NotComposable { position: 0 });
        }
        let images = self.images.iter().map(|v| other.apply(v)).collect();
        Ok(ModuleMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            images,
        })
    }

    pub fn add(&self, other: &ModuleMorphism) -> ModuleMorphism {
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| self.target.add_elems(a, b))
            .collect();
        ModuleMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            images,
        }
    }

    pub fn neg(&self) -> ModuleMorphism {
        let images = self.images.iter().map(|v| self.target.neg_elem(v)).collect();
        ModuleMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            images,
        }
    }

    pub fn equal(&self, other: &ModuleMorphism) -> bool {
        self.source.same_module(&other.source)
            && self.target.same_module(&other.target)
            && self.images == other.images
    }

    pub fn is_zero_morphism(&self) -> bool {
        let z = self.target.zero_elem();
        self.images.iter().all(|v| *v == z)
    }

    /// The underlying additive map in canonical coordinates.
    pub fn as_abmap(&self) -> AbMap {
        let sg = self.source.group();
        let tg = self.target.group();
        let img = sg
            .gen_elements
            .iter()
            .map(|e| self.target.encode(&self.apply(e)))
            .collect();
        AbMap::new(sg.window.clone(), tg.window.clone(), img)
    }

    pub fn is_mono(&self) -> bool {
        self.as_abmap().is_injective()
    }

    pub fn is_epi(&self) -> bool {
        self.as_abmap().is_surjective()
    }

    pub fn is_iso(&self) -> bool {
        self.as_abmap().is_iso()
    }

    pub fn key(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.source.key().hash(&mut h);
        self.target.key().hash(&mut h);
        self.images.hash(&mut h);
        h.finish()
    }

    pub fn to_json(&self) -> MorphismJson {
        MorphismJson {
            ring_label: self.source.ring.label.clone(),
            side: self.source.side,
            source: self.source.to_json(),
            target: self.target.to_json(),
            images: self.images.clone(),
        }
    }
}

/// The group `Hom(M, N)` with decode to actual morphisms.
pub struct HomGroup {
    pub source: Rc<FpModule>,
    pub target: Rc<FpModule>,
    pub window: Rc<Window>,
}

impl HomGroup {
    pub fn group(&self) -> crate::abelian::AbGroup {
        self.window.group()
    }

    pub fn decode(&self, c: &Coords) -> ModuleMorphism {
        let t = self.target.group().window.dims().len();
        let z = self.window.decode(c);
        let images = (0..self.source.gens)
            .map(|j| {
                let block: Coords =
                    z[j * t..(j + 1) * t].iter().map(|&x| x as u64).collect();
                self.target.decode(&block)
            })
            .collect();
        ModuleMorphism {
            source: self.source.clone(),
            target: self.target.clone(),
            images,
        }
    }

    pub fn encode(&self, f: &ModuleMorphism) -> Coords {
        let mut ambient = Vec::new();
        for img in &f.images {
            ambient.extend(self.target.encode(img).iter().map(|&x| x as i128));
        }
        self.window
            .encode(&ambient)
            .expect("a valid morphism satisfies the hom constraints")
    }

    /// All morphisms in canonical order. Guarded by group order.
    pub fn all(&self) -> Vec<ModuleMorphism> {
        assert!(self.window.order() <= ENUM_CAP as u128);
        self.window.elements().iter().map(|c| self.decode(c)).collect()
    }
}

/// `Hom(M, N)` via the integer-lattice path.
pub fn hom_group(source: &Rc<FpModule>, target: &Rc<FpModule>) -> Result<HomGroup> {
    if source.side != target.side {
        return Err(Error::SideMismatch { expected: source.side, got: target.side });
    }
    if !source.ring.same_tables(&target.ring) {
        return Err(Error::RingMismatch {
            left: source.ring.label.clone(),
            right: target.ring.label.clone(),
        });
    }
    let tw = target.group().window.clone();
    let t = tw.dims().len();
    let k = source.gens;
    let rels = source.min_relations().to_vec();
    let m = rels.len();
    let n = k * t;

    // x * C == 0 (mod target dims) encodes: every relation row maps to zero.
    let mut c = znf::zeros(n, m * t);
    for (i, row) in rels.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            let act = target.act_map(r);
            for alpha in 0..t {
                let gen_coords: Coords = tw.generators()[alpha].clone();
                let image = act.apply(&gen_coords);
                for (beta, &val) in image.iter().enumerate() {
                    c[j * t + alpha][i * t + beta] = val as i128;
                }
            }
        }
    }
    let mut stacked = c;
    let cols = m * t;
    for i in 0..m {
        for (beta, &d) in tw.dims().iter().enumerate() {
            let mut row = vec![0i128; cols];
            row[i * t + beta] = d as i128;
            stacked.push(row);
        }
    }
    let ker = znf::left_kernel(&stacked, cols);
    let sols: Mat = ker.into_iter().map(|row| row[..n].to_vec()).collect();
    let mut orders = Vec::with_capacity(n);
    for _ in 0..k {
        orders.extend_from_slice(tw.dims());
    }
    let window = Window::new(orders, &sols, &Vec::new());
    Ok(HomGroup { source: source.clone(), target: target.clone(), window })
}

/// Brute-force `Hom(M, N)`: enumerate all generator-image tuples and keep
/// the ones that satisfy the relations. The trusted oracle.
pub fn hom_invariants_brute(source: &Rc<FpModule>, target: &Rc<FpModule>) -> Vec<u64> {
    let els = target.elements();
    let mut tuples: Vec<Vec<Vec<u8>>> = vec![vec![]];
    for _ in 0..source.gens {
        let mut next = Vec::new();
        for t in &tuples {
            for e in els {
                let mut tt = t.clone();
                tt.push(e.clone());
                next.push(tt);
            }
        }
        tuples = next;
    }
    let zero = target.zero_elem();
    let solutions: Vec<Vec<Vec<u8>>> = tuples
        .into_iter()
        .filter(|images| {
            source.relations.iter().all(|row| {
                let mut acc = vec![target.ring.zero; target.gens];
                for (img, &r) in images.iter().zip(row) {
                    acc = add_vec(&target.ring, &acc, &target.scale(img, r));
                }
                target.reduce(&acc) == zero
            })
        })
        .collect();
    let zero_tuple = vec![zero; source.gens];
    crate::abelian::invariant_factors_brute(
        &solutions,
        |a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| target.add_elems(x, y))
                .collect()
        },
        &zero_tuple,
    )
}

/// The group `M ⊗ N` (M right, N left) with decode to representative
/// tuples: coordinates decode to `(n_1, ..., n_k)` standing for
/// `Σ g_j ⊗ n_j`.
pub struct TensorGroup {
    pub left: Rc<FpModule>,
    pub right: Rc<FpModule>,
    pub window: Rc<Window>,
}

impl TensorGroup {
    pub fn group(&self) -> crate::abelian::AbGroup {
        self.window.group()
    }

    pub fn decode(&self, c: &Coords) -> Vec<Vec<u8>> {
        let t = self.right.group().window.dims().len();
        let z = self.window.decode(c);
        (0..self.left.gens)
            .map(|j| {
                let block: Coords =
                    z[j * t..(j + 1) * t].iter().map(|&x| x as u64).collect();
                self.right.decode(&block)
            })
            .collect()
    }

    pub fn encode_tuple(&self, tuple: &[Vec<u8>]) -> Coords {
        let mut ambient = Vec::new();
        for n in tuple {
            ambient.extend(self.right.encode(n).iter().map(|&x| x as i128));
        }
        self.window.encode(&ambient).expect("tensor ambient is full")
    }

    /// Class of the simple tensor `m ⊗ n`.
    pub fn encode_simple(&self, m: &[u8], n: &[u8]) -> Coords {
        let tuple: Vec<Vec<u8>> = m
            .iter()
            .map(|&coeff| self.right.reduce(&self.right.scale(n, coeff)))
            .collect();
        self.encode_tuple(&tuple)
    }
}

/// `M ⊗_R N` via the lattice path: `N^k` modulo the relation tuples.
pub fn tensor_group(m: &Rc<FpModule>, n: &Rc<FpModule>) -> Result<TensorGroup> {
    if m.side != Side::Right || n.side != Side::Left {
        return Err(Error::SideMismatch {
            expected: if m.side != Side::Right { Side::Right } else { Side::Left },
            got: if m.side != Side::Right { m.side } else { n.side },
        });
    }
    if !m.ring.same_tables(&n.ring) {
        return Err(Error::RingMismatch {
            left: m.ring.label.clone(),
            right: n.ring.label.clone(),
        });
    }
    let nw = n.group().window.clone();
    let t = nw.dims().len();
    let k = m.gens;
    let mut orders = Vec::with_capacity(k * t);
    for _ in 0..k {
        orders.extend_from_slice(nw.dims());
    }
    let mut k_rows: Mat = Vec::new();
    for row in m.min_relations() {
        for gen in &n.group().gen_elements {
            let mut ambient = Vec::with_capacity(k * t);
            for &r in row {
                let el = n.reduce(&n.scale(gen, r));
                ambient.extend(n.encode(&el).iter().map(|&x| x as i128));
            }
            if ambient.iter().any(|&x| x != 0) {
                k_rows.push(ambient);
            }
        }
    }
    let window = Window::new(orders, &znf::identity(k * t), &k_rows);
    Ok(TensorGroup { left: m.clone(), right: n.clone(), window })
}

/// Brute-force tensor product invariants: enumerate `N^k` and quotient by
/// the closure of the relation tuples. The trusted oracle.
pub fn tensor_invariants_brute(m: &Rc<FpModule>, n: &Rc<FpModule>) -> Vec<u64> {
    let k = m.gens;
    if k == 0 || n.is_zero() {
        return vec![];
    }
    let els = n.elements();
    // tuples are stored flattened: k blocks of n.gens ring indices
    let tuple_add = |a: &[u8], b: &[u8]| -> Vec<u8> {
        a.chunks(n.gens)
            .zip(b.chunks(n.gens))
            .flat_map(|(x, y)| n.add_elems(x, y))
            .collect()
    };
    let zero_flat: Vec<u8> = vec![n.zero_elem(); k].into_iter().flatten().collect();
    let rel_flat = m.relations.iter().flat_map(|row| {
        els.iter().map(move |e| {
            row.iter()
                .flat_map(|&r| n.reduce(&n.scale(e, r)))
                .collect::<Vec<u8>>()
        })
    });
    let (sub, _) = additive_closure(zero_flat.clone(), rel_flat, tuple_add, ENUM_CAP)
        .expect("oracle sizes are small");
    let rep = |t: &[u8]| -> Vec<u8> { sub.iter().map(|u| tuple_add(t, u)).min().unwrap() };

    let mut tuples: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..k {
        tuples = tuples
            .iter()
            .flat_map(|t| {
                els.iter().map(move |e| {
                    let mut tt = t.clone();
                    tt.extend_from_slice(e);
                    tt
                })
            })
            .collect();
    }
    let reps: BTreeSet<Vec<u8>> = tuples.iter().map(|t| rep(t)).collect();
    let reps: Vec<Vec<u8>> = reps.into_iter().collect();
    crate::abelian::invariant_factors_brute(
        &reps,
        |a, b| rep(&tuple_add(a, b)),
        &rep(&zero_flat),
    )
}

/// Kernel, image, cokernel of a morphism, with canonical arrows.
pub struct Factorization {
    pub kernel: Rc<FpModule>,
    pub kernel_mono: ModuleMorphism,
    pub image: Rc<FpModule>,
    pub image_mono: ModuleMorphism,
    pub image_epi: ModuleMorphism,
    pub cokernel: Rc<FpModule>,
    pub cokernel_epi: ModuleMorphism,
}

/// Present the submodule of `parent` spanned by `subset` (which must be
/// closed): greedy generators, syzygies via the integer lattice.
fn present_submodule(
    parent: &Rc<FpModule>,
    subset: &[Vec<u8>],
) -> Result<(Rc<FpModule>, Vec<Vec<u8>>)> {
    let ring = parent.ring.clone();
    let mut gens: Vec<Vec<u8>> = Vec::new();
    let mut span: BTreeSet<Vec<u8>> = BTreeSet::new();
    span.insert(parent.zero_elem());
    for cand in subset {
        if span.contains(cand) {
            continue;
        }
        gens.push(cand.clone());
        let scaled = gens.iter().flat_map(|g| {
            ring.elements()
                .map(|r| parent.reduce(&parent.scale(g, r)))
                .collect::<Vec<_>>()
        });
        let (closure, _) = additive_closure(
            parent.zero_elem(),
            scaled,
            |a, b| parent.reduce(&add_vec(&ring, a, b)),
            ENUM_CAP,
        )?;
        span = closure.into_iter().collect();
    }
    let sub = syzygy_presentation(parent, &gens)?;
    if sub.size != span.len() as u64 {
        return Err(Error::internal(format!(
            "submodule presentation has size {}, expected {}",
            sub.size,
            span.len()
        )));
    }
    Ok((sub, gens))
}

/// Present the module generated inside `parent` by the given elements,
/// with relations derived from the kernel of the integer-lattice map
/// `Z^(t * #gens) -> parent`.
fn syzygy_presentation(
    parent: &Rc<FpModule>,
    gens: &[Vec<u8>],
) -> Result<Rc<FpModule>> {
    let ring = parent.ring.clone();
    let t = gens.len();
    let plus = ring.plus();
    let tr = plus.gens.len();
    let pw = parent.group().window.clone();
    let pt = pw.dims().len();

    // map Z^(t*tr) -> parent coords: (slot i, ring gen g) -> coords of gens[i] * g
    let mut mat = znf::zeros(t * tr, pt);
    for (i, g) in gens.iter().enumerate() {
        for (gi, &rg) in plus.gens.iter().enumerate() {
            let coords = parent.encode(&parent.scale(g, rg));
            for (b, &v) in coords.iter().enumerate() {
                mat[i * tr + gi][b] = v as i128;
            }
        }
    }
    let mut stacked = mat.clone();
    for (b, &d) in pw.dims().iter().enumerate() {
        let mut row = vec![0i128; pt];
        row[b] = d as i128;
        stacked.push(row);
    }
    let ker = znf::left_kernel(&stacked, pt);
    let mut rel_rows: Vec<Vec<u8>> = Vec::new();
    for row in ker {
        let z = &row[..t * tr];
        let mut rel = vec![ring.zero; t];
        for i in 0..t {
            let mut acc = ring.zero;
            for (gi, &zi) in z[i * tr..(i + 1) * tr].iter().enumerate() {
                let k = zi.rem_euclid(plus.gen_orders[gi] as i128) as u64;
                for _ in 0..k {
                    acc = ring.add(acc, plus.gens[gi]);
                }
            }
            rel[i] = acc;
        }
        if rel.iter().any(|&x| x != ring.zero) {
            rel_rows.push(rel);
        }
    }
    FpModule::new(ring, parent.side, t, rel_rows, INTERNAL_MODULE_BOUND)
}

/// Express a member of the span of `gens` as an `R`-combination of them.
fn express_in_span(
    parent: &Rc<FpModule>,
    gens: &[Vec<u8>],
    w: &[u8],
) -> Option<Vec<u8>> {
    let ring = &parent.ring;
    let plus = ring.plus();
    let tr = plus.gens.len();
    let t = gens.len();
    let pw = parent.group().window.clone();
    let pt = pw.dims().len();
    let mut mat = znf::zeros(t * tr, pt);
    for (i, g) in gens.iter().enumerate() {
        for (gi, &rg) in plus.gens.iter().enumerate() {
            let coords = parent.encode(&parent.scale(g, rg));
            for (b, &v) in coords.iter().enumerate() {
                mat[i * tr + gi][b] = v as i128;
            }
        }
    }
    let mut stacked = mat;
    for (b, &d) in pw.dims().iter().enumerate() {
        let mut row = vec![0i128; pt];
        row[b] = d as i128;
        stacked.push(row);
    }
    let target: Vec<i128> = parent.encode(w).iter().map(|&x| x as i128).collect();
    let sol = znf::solve_left(&stacked, pt, &target)?;
    let mut out = vec![ring.zero; t];
    for i in 0..t {
        let mut acc = ring.zero;
        for (gi, &zi) in sol[i * tr..(i + 1) * tr].iter().enumerate() {
            let k = zi.rem_euclid(plus.gen_orders[gi] as i128) as u64;
            for _ in 0..k {
                acc = ring.add(acc, plus.gens[gi]);
            }
        }
        out[i] = acc;
    }
    Some(out)
}

/// Just the cokernel and its projection, without enumerating kernels.
pub fn cokernel_only(phi: &ModuleMorphism) -> Result<(Rc<FpModule>, ModuleMorphism)> {
    let tgt = &phi.target;
    let mut rels = tgt.relations.clone();
    rels.extend(phi.images.iter().cloned());
    let cokernel = FpModule::new(
        tgt.ring.clone(),
        tgt.side,
        tgt.gens,
        rels,
        INTERNAL_MODULE_BOUND,
    )?;
    let coker_images = (0..tgt.gens)
        .map(|j| {
            let mut v = vec![tgt.ring.zero; tgt.gens];
            v[j] = tgt.ring.one;
            cokernel.reduce(&v)
        })
        .collect();
    let cokernel_epi = ModuleMorphism::new(tgt.clone(), cokernel.clone(), coker_images)?;
    Ok((cokernel, cokernel_epi))
}

pub fn factorize(phi: &ModuleMorphism) -> Result<Factorization> {
    let src = &phi.source;
    let tgt = &phi.target;
    let ab = phi.as_abmap();

    // kernel
    let kw = ab.kernel();
    if kw.order() > ENUM_CAP as u128 {
        return Err(Error::SizeLimit { predicted: kw.order() as u64, bound: ENUM_CAP });
    }
    let mut kernel_set: BTreeSet<Vec<u8>> = BTreeSet::new();
    for c in kw.elements() {
        let amb = kw.decode(&c);
        let coords: Coords = amb.iter().map(|&x| x as u64).collect();
        kernel_set.insert(src.decode(&coords));
    }
    let kernel_set: Vec<Vec<u8>> = kernel_set.into_iter().collect();
    let (kernel, kgens) = present_submodule(src, &kernel_set)?;
    let kernel_mono = ModuleMorphism::new(kernel.clone(), src.clone(), kgens)?;

    // image
    let iw = ab.image();
    if iw.order() > ENUM_CAP as u128 {
        return Err(Error::SizeLimit { predicted: iw.order() as u64, bound: ENUM_CAP });
    }
    let mut image_set: BTreeSet<Vec<u8>> = BTreeSet::new();
    for c in iw.elements() {
        let amb = iw.decode(&c);
        let coords: Coords = amb.iter().map(|&x| x as u64).collect();
        image_set.insert(tgt.decode(&coords));
    }
    let image_set: Vec<Vec<u8>> = image_set.into_iter().collect();
    let (image, igens) = present_submodule(tgt, &image_set)?;
    let image_mono = ModuleMorphism::new(image.clone(), tgt.clone(), igens.clone())?;
    let epi_images: Vec<Vec<u8>> = phi
        .images
        .iter()
        .map(|v| {
            express_in_span(tgt, &igens, v)
                .map(|s| image.reduce(&s))
                .ok_or_else(|| Error::internal("image generator expression failed"))
        })
        .collect::<Result<_>>()?;
    let image_epi = ModuleMorphism::new(src.clone(), image.clone(), epi_images)?;

    // cokernel
    let mut rels = tgt.relations.clone();
    rels.extend(phi.images.iter().cloned());
    let cokernel = FpModule::new(
        tgt.ring.clone(),
        tgt.side,
        tgt.gens,
        rels,
        INTERNAL_MODULE_BOUND,
    )?;
    let coker_images = (0..tgt.gens)
        .map(|j| {
            let mut v = vec![tgt.ring.zero; tgt.gens];
            v[j] = tgt.ring.one;
            cokernel.reduce(&v)
        })
        .collect();
    let cokernel_epi = ModuleMorphism::new(tgt.clone(), cokernel.clone(), coker_images)?;

    if kernel.size * image.size != src.size || image.size * cokernel.size != tgt.size {
        return Err(Error::internal("factorization counts do not balance"));
    }
    debug_assert!(image_epi.then(&image_mono).unwrap().equal(phi));
    Ok(Factorization {
        kernel,
        kernel_mono,
        image,
        image_mono,
        image_epi,
        cokernel,
        cokernel_epi,
    })
}

/// Block direct sum with the biproduct arrows.
pub struct DirectSum {
    pub module: Rc<FpModule>,
    pub inj: (ModuleMorphism, ModuleMorphism),
    pub proj: (ModuleMorphism, ModuleMorphism),
}

pub fn direct_sum(a: &Rc<FpModule>, b: &Rc<FpModule>) -> Result<DirectSum> {
    if a.side != b.side {
        return Err(Error::SideMismatch { expected: a.side, got: b.side });
    }
    if !a.ring.same_tables(&b.ring) {
        return Err(Error::RingMismatch {
            left: a.ring.label.clone(),
            right: b.ring.label.clone(),
        });
    }
    let ring = a.ring.clone();
    let gens = a.gens + b.gens;
    let mut rels = Vec::new();
    for row in &a.relations {
        let mut r = row.clone();
        r.extend(vec![ring.zero; b.gens]);
        rels.push(r);
    }
    for row in &b.relations {
        let mut r = vec![ring.zero; a.gens];
        r.extend(row.iter().copied());
        rels.push(r);
    }
    let sum = FpModule::new(ring.clone(), a.side, gens, rels, INTERNAL_MODULE_BOUND)?;
    let pad_a = |v: &[u8]| {
        let mut w = v.to_vec();
        w.extend(vec![ring.zero; b.gens]);
        sum.reduce(&w)
    };
    let pad_b = |v: &[u8]| {
        let mut w = vec![ring.zero; a.gens];
        w.extend_from_slice(v);
        sum.reduce(&w)
    };
    let unit = |m: &Rc<FpModule>, j: usize| {
        let mut v = vec![m.ring.zero; m.gens];
        v[j] = m.ring.one;
        v
    };
    let inj_a = ModuleMorphism::new(
        a.clone(),
        sum.clone(),
        (0..a.gens).map(|j| pad_a(&unit(a, j))).collect(),
    )?;
    let inj_b = ModuleMorphism::new(
        b.clone(),
        sum.clone(),
        (0..b.gens).map(|j| pad_b(&unit(b, j))).collect(),
    )?;
    let mut proj_a_images: Vec<Vec<u8>> = (0..a.gens).map(|j| a.reduce(&unit(a, j))).collect();
    proj_a_images.extend(vec![a.zero_elem(); b.gens]);
    let proj_a = ModuleMorphism::new(sum.clone(), a.clone(), proj_a_images)?;
    let mut proj_b_images: Vec<Vec<u8>> = vec![b.zero_elem(); a.gens];
    proj_b_images.extend((0..b.gens).map(|j| b.reduce(&unit(b, j))));
    let proj_b = ModuleMorphism::new(sum.clone(), b.clone(), proj_b_images)?;
    Ok(DirectSum { module: sum, inj: (inj_a, inj_b), proj: (proj_a, proj_b) })
}

/// Per-junction exactness report for a composable chain.
pub fn is_exact_modules(chain: &[ModuleMorphism]) -> Result<Vec<bool>> {
    for (i, pair) in chain.windows(2).enumerate() {
        if !pair[0].target.same_module(&pair[1].source) {
            return Err(Error::NotComposable { position: i });
        }
    }
    let mut out = Vec::new();
    for pair in chain.windows(2) {
        let im = pair[0].as_abmap().image();
        let ker = pair[1].as_abmap().kernel();
        // both are subgroup windows over the middle module's coordinates
        let contained = im_in(&im, &ker);
        out.push(contained && im.order() == ker.order());
    }
    Ok(out)
}

fn im_in(a: &Rc<Window>, b: &Rc<Window>) -> bool {
    // both windows are subgroups of the same parent coordinate space
    a.generators().iter().all(|c| b.contains_ambient(&a.decode(c)))
}

/// A verified short exact sequence `0 -> A -> B -> C -> 0` of modules.
pub struct ShortExactSequence {
    pub mono: ModuleMorphism,
    pub epi: ModuleMorphism,
}

impl ShortExactSequence {
    pub fn new(mono: ModuleMorphism, epi: ModuleMorphism) -> Result<ShortExactSequence> {
        if !mono.target.same_module(&epi.source) {
            return Err(Error::NotComposable { position: 0 });
        }
        if !mono.is_mono() {
            return Err(Error::internal("first arrow is not injective"));
        }
        if !epi.is_epi() {
            return Err(Error::internal("second arrow is not surjective"));
        }
        let exact = is_exact_modules(&[mono.clone(), epi.clone()])?;
        if !exact[0] {
            return Err(Error::internal("image does not match kernel at the middle"));
        }
        Ok(ShortExactSequence { mono, epi })
    }
}

/// Presentation simplification, entirely at the lattice level: select a
/// generating subset of the original generators (span tested against the
/// relation lattice), re-derive syzygies, and return the smaller module
/// with mutually inverse isomorphisms. No element enumeration happens,
/// so this is safe on oversized internal modules.
pub fn simplify(
    m: &Rc<FpModule>,
) -> Result<(Rc<FpModule>, ModuleMorphism, ModuleMorphism)> {
    let identity_result = |m: &Rc<FpModule>| {
        Ok((m.clone(), ModuleMorphism::identity(m), ModuleMorphism::identity(m)))
    };
    if m.gens <= 1 {
        return identity_result(m);
    }
    let ring = m.ring.clone();
    let plus = ring.plus();
    let t = plus.gens.len();
    let n = m.gens * t;
    let rel_rows: &[Vec<u8>] = if m.big { &m.rel_sub_gens } else { m.min_relations() };
    // the lattice needs additive generators, so include all ring multiples
    let scaled_rows: Vec<Vec<u8>> = rel_rows
        .iter()
        .flat_map(|row| {
            ring.elements()
                .map(|r| scale_vec(&ring, m.side, row, r))
                .collect::<Vec<_>>()
        })
        .collect();
    let base = relation_lattice(&ring, m.gens, &scaled_rows);
    let orders: Vec<u64> = (0..m.gens)
        .flat_map(|_| plus.gen_orders.iter().copied())
        .collect();

    let unit = |j: usize| {
        let mut v = vec![ring.zero; m.gens];
        v[j] = ring.one;
        v
    };
    let mut lattice = base.clone();
    let mut chosen: Vec<usize> = Vec::new();
    let mut spanned: u128 = 1;
    for j in 0..m.gens {
        if spanned == m.size as u128 {
            break;
        }
        let e = expr_of(&ring, &unit(j));
        if znf::solve_left(&lattice, n, &e).is_some() {
            continue;
        }
        for r in ring.elements() {
            lattice.push(expr_of(&ring, &m.scale(&unit(j), r)));
        }
        chosen.push(j);
        spanned = Window::new(orders.clone(), &lattice, &base).order();
    }
    if chosen.len() == m.gens {
        return identity_result(m);
    }
    let gen_elems: Vec<Vec<u8>> = chosen.iter().map(|&j| m.reduce(&unit(j))).collect();
    let tiny = syzygy_presentation(m, &gen_elems)?;
    let into = ModuleMorphism::new(tiny.clone(), m.clone(), gen_elems.clone())?;
    let onto_images: Vec<Vec<u8>> = (0..m.gens)
        .map(|o| {
            express_in_span(m, &gen_elems, &m.reduce(&unit(o)))
                .map(|s| tiny.reduce(&s))
                .ok_or_else(|| Error::internal("generator expression failed in simplify"))
        })
        .collect::<Result<_>>()?;
    let onto = ModuleMorphism::new(m.clone(), tiny.clone(), onto_images)?;
    if tiny.size != m.size
        || !into.then(&onto)?.equal(&ModuleMorphism::identity(&tiny))
        || !onto.then(&into)?.equal(&ModuleMorphism::identity(m))
    {
        return Err(Error::internal("presentation simplification broke the module"));
    }
    Ok((tiny, into, onto))
}

/// Present a module structure carried by a windowed abelian group: the
/// ring acts through the given endomorphisms (indexed by ring element).
/// Returns the presented module and the iso from its canonical group
/// coordinates onto the window.
pub fn present_from_window(
    ring: &Rc<FiniteRing>,
    side: Side,
    window: &Rc<Window>,
    act: &[AbMap],
) -> Result<(Rc<FpModule>, AbMap)> {
    if window.order() > ENUM_CAP as u128 {
        return Err(Error::SizeLimit { predicted: window.order() as u64, bound: ENUM_CAP });
    }
    let els = window.elements();
    let mut gens: Vec<Coords> = Vec::new();
    let mut span: BTreeSet<Coords> = BTreeSet::new();
    span.insert(window.zero());
    for cand in &els {
        if span.contains(cand) {
            continue;
        }
        gens.push(cand.clone());
        // close under addition and the ring action
        let mut frontier: Vec<Coords> = gens
            .iter()
            .flat_map(|g| act.iter().map(|a| a.apply(g)).collect::<Vec<_>>())
            .collect();
        while let Some(g) = frontier.pop() {
            if span.contains(&g) {
                continue;
            }
            let snapshot: Vec<Coords> = span.iter().cloned().collect();
            for s in snapshot {
                let mut cur = window.add(&s, &g);
                while cur != s {
                    span.insert(cur.clone());
                    cur = window.add(&cur, &g);
                }
            }
        }
    }
    let t = gens.len();
    let plus = ring.plus();
    let tr = plus.gens.len();
    let wt = window.dims().len();
    let mut mat = znf::zeros(t * tr, wt);
    for (i, g) in gens.iter().enumerate() {
        for (gi, &rg) in plus.gens.iter().enumerate() {
            let coords = act[rg as usize].apply(g);
            for (b, &v) in coords.iter().enumerate() {
                mat[i * tr + gi][b] = v as i128;
            }
        }
    }
    let mut stacked = mat;
    for (b, &d) in window.dims().iter().enumerate() {
        let mut row = vec![0i128; wt];
        row[b] = d as i128;
        stacked.push(row);
    }
    let ker = znf::left_kernel(&stacked, wt);
    let mut rel_rows: Vec<Vec<u8>> = Vec::new();
    for row in ker {
        let z = &row[..t * tr];
        let mut rel = vec![ring.zero; t];
        for (i, r) in rel.iter_mut().enumerate() {
            let mut acc = ring.zero;
            for (gi, &zi) in z[i * tr..(i + 1) * tr].iter().enumerate() {
                let k = zi.rem_euclid(plus.gen_orders[gi] as i128) as u64;
                for _ in 0..k {
                    acc = ring.add(acc, plus.gens[gi]);
                }
            }
            *r = acc;
        }
        if rel.iter().any(|&x| x != ring.zero) {
            rel_rows.push(rel);
        }
    }
    let module = FpModule::new(ring.clone(), side, t, rel_rows, INTERNAL_MODULE_BOUND)?;
    if module.size as u128 != window.order() {
        return Err(Error::internal("window presentation has the wrong size"));
    }
    // iso: a module element Σ gens_i * v_i maps to the matching window sum
    let mg = module.group().window.clone();
    let iso_img: Vec<Coords> = mg
        .generators()
        .iter()
        .map(|c| {
            let v = module.decode(&c.clone());
            let mut acc = window.zero();
            for (i, &coeff) in v.iter().enumerate() {
                acc = window.add(&acc, &act[coeff as usize].apply(&gens[i]));
            }
            acc
        })
        .collect();
    let iso = AbMap::new(mg, window.clone(), iso_img);
    if !iso.is_iso() {
        return Err(Error::internal("window presentation iso failed"));
    }
    Ok((module, iso))
}

/// Search for an isomorphism; `None` if the modules are not isomorphic.
pub fn modules_isomorphic(a: &Rc<FpModule>, b: &Rc<FpModule>) -> Result<Option<ModuleMorphism>> {
    if a.size != b.size || a.ab_group() != b.ab_group() {
        return Ok(None);
    }
    let hom = hom_group(a, b)?;
    if hom.window.order() > ENUM_CAP as u128 {
        return Err(Error::BoundExceeded {
            what: "isomorphism search space".into(),
            bound: ENUM_CAP as usize,
        });
    }
    for c in hom.window.elements() {
        let f = hom.decode(&c);
        if f.is_iso() {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::make_zmod;

    fn z4() -> Rc<FiniteRing> {
        make_zmod(4).unwrap()
    }

    fn z4_mod(rels: Vec<Vec<u8>>, gens: usize) -> Rc<FpModule> {
        FpModule::new(z4(), Side::Right, gens, rels, DEFAULT_MODULE_BOUND).unwrap()
    }

    #[test]
    fn free_rank_one() {
        let m = z4_mod(vec![], 1);
        assert_eq!(m.size, 4);
        assert_eq!(m.elements().len(), 4);
    }

    #[test]
    fn z2_as_z4_module() {
        let m = z4_mod(vec![vec![2]], 1);
        assert_eq!(m.size, 2);
        assert_eq!(m.elements(), &[vec![0], vec![1]]);
    }

    #[test]
    fn killed_generator_gives_zero_module() {
        let m = z4_mod(vec![vec![1]], 1);
        assert_eq!(m.size, 1);
        assert!(m.is_zero());
    }

    #[test]
    fn size_bound_is_enforced() {
        let r = z4();
        let err = FpModule::new(r, Side::Right, 10, vec![], DEFAULT_MODULE_BOUND).unwrap_err();
        match err {
            Error::SizeLimit { .. } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn archetypal_mono() {
        // Z/2 -> Z/4 over Z/4, generator to 2
        let m = z4_mod(vec![vec![2]], 1);
        let n = z4_mod(vec![], 1);
        let f = ModuleMorphism::new(m.clone(), n.clone(), vec![vec![2]]).unwrap();
        assert!(f.is_mono());
        assert!(!f.is_epi());
        // generator to 1 violates the relation 2*g = 0
        let err = ModuleMorphism::new(m, n, vec![vec![1]]).unwrap_err();
        match err {
            Error::RelationViolated { index: 0 } => {}
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn identity_is_iso() {
        let m = z4_mod(vec![vec![2], vec![0]], 1);
        let id = ModuleMorphism::identity(&m);
        assert!(id.is_mono() && id.is_epi());
    }

    #[test]
    fn hom_z2_z4_is_z2() {
        let m = z4_mod(vec![vec![2]], 1);
        let n = z4_mod(vec![], 1);
        let h = hom_group(&m, &n).unwrap();
        assert_eq!(h.group().invariant_factors, vec![2]);
        assert_eq!(hom_invariants_brute(&m, &n), vec![2]);
        // decode every element and check it's a valid morphism
        for c in h.window.elements() {
            let f = h.decode(&c);
            assert_eq!(h.encode(&f), c);
        }
    }

    #[test]
    fn hom_from_free_is_the_target() {
        let r = z4_mod(vec![], 1);
        let n = z4_mod(vec![vec![2]], 1);
        let h = hom_group(&r, &n).unwrap();
        assert_eq!(h.group(), n.ab_group());
        let zero = FpModule::zero(z4(), Side::Right);
        let h0 = hom_group(&r, &zero).unwrap();
        assert!(h0.group().is_trivial());
    }

    #[test]
    fn tensor_z2_z2_is_z2() {
        let m = z4_mod(vec![vec![2]], 1);
        let n = FpModule::new(z4(), Side::Left, 1, vec![vec![2]], DEFAULT_MODULE_BOUND).unwrap();
        let t = tensor_group(&m, &n).unwrap();
        assert_eq!(t.group().invariant_factors, vec![2]);
        assert_eq!(tensor_invariants_brute(&m, &n), vec![2]);
    }

    #[test]
    fn tensor_with_free_is_the_other_factor() {
        let m = z4_mod(vec![], 1);
        let n = FpModule::new(z4(), Side::Left, 1, vec![vec![2]], DEFAULT_MODULE_BOUND).unwrap();
        let t = tensor_group(&m, &n).unwrap();
        assert_eq!(t.group(), n.ab_group());
        let zero = FpModule::zero(z4(), Side::Left);
        let t0 = tensor_group(&m, &zero).unwrap();
        assert!(t0.group().is_trivial());
    }

    #[test]
    fn tensor_bilinearity() {
        let m = z4_mod(vec![vec![2]], 1);
        let n = FpModule::new(z4(), Side::Left, 1, vec![], DEFAULT_MODULE_BOUND).unwrap();
        let t = tensor_group(&m, &n).unwrap();
        // (m*r) ⊗ n == m ⊗ (r*n)
        for me in m.elements().to_vec() {
            for ne in n.elements().to_vec() {
                for r in m.ring.elements() {
                    let lhs = t.encode_simple(&m.reduce(&m.scale(&me, r)), &ne);
                    let rhs = t.encode_simple(&me, &n.reduce(&n.scale(&ne, r)));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn factorize_the_archetype() {
        let m = z4_mod(vec![vec![2]], 1);
        let n = z4_mod(vec![], 1);
        let f = ModuleMorphism::new(m, n, vec![vec![2]]).unwrap();
        let fac = factorize(&f).unwrap();
        assert_eq!(fac.kernel.size, 1);
        assert_eq!(fac.image.size, 2);
        assert_eq!(fac.cokernel.size, 2);
    }

    #[test]
    fn factorize_identity_and_zero() {
        let m = z4_mod(vec![vec![2]], 1);
        let fac = factorize(&ModuleMorphism::identity(&m)).unwrap();
        assert!(fac.kernel.is_zero());
        assert!(fac.cokernel.is_zero());
        let n = z4_mod(vec![], 1);
        let fac0 = factorize(&ModuleMorphism::zero(&m, &n)).unwrap();
        assert_eq!(fac0.kernel.size, m.size);
        assert_eq!(fac0.cokernel.size, n.size);
    }

    #[test]
    fn direct_sum_biproduct_identities() {
        let a = z4_mod(vec![vec![2]], 1);
        let b = z4_mod(vec![vec![2]], 1);
        let s = direct_sum(&a, &b).unwrap();
        assert_eq!(s.module.size, 4);
        assert_eq!(s.module.ab_group().invariant_factors, vec![2, 2]);
        let ia_pa = s.inj.0.then(&s.proj.0).unwrap();
        assert!(ia_pa.equal(&ModuleMorphism::identity(&a)));
        let ia_pb = s.inj.0.then(&s.proj.1).unwrap();
        assert!(ia_pb.is_zero_morphism());
    }

    #[test]
    fn sum_with_zero_is_isomorphic() {
        let a = z4_mod(vec![vec![2]], 1);
        let z = FpModule::zero(z4(), Side::Right);
        let s = direct_sum(&a, &z).unwrap();
        assert!(modules_isomorphic(&s.module, &a).unwrap().is_some());
    }

    #[test]
    fn exactness_of_the_standard_sequence() {
        // 0 -> Z/2 -> Z/4 -> Z/2 -> 0 over Z/4
        let z2 = z4_mod(vec![vec![2]], 1);
        let z4m = z4_mod(vec![], 1);
        let i = ModuleMorphism::new(z2.clone(), z4m.clone(), vec![vec![2]]).unwrap();
        let p = ModuleMorphism::new(z4m, z2.clone(), vec![vec![1]]).unwrap();
        let zero = FpModule::zero(z4(), Side::Right);
        let chain = vec![
            ModuleMorphism::zero(&zero, &i.source),
            i.clone(),
            p.clone(),
            ModuleMorphism::zero(&p.target, &zero),
        ];
        let verdicts = is_exact_modules(&chain).unwrap();
        assert_eq!(verdicts, vec![true, true, true]);
        assert!(ShortExactSequence::new(i, p).is_ok());
    }

    #[test]
    fn non_exact_middle() {
        let m = z4_mod(vec![vec![2]], 1);
        let id = ModuleMorphism::identity(&m);
        let verdicts = is_exact_modules(&[id.clone(), id]).unwrap();
        assert_eq!(verdicts, vec![false]);
    }

    #[test]
    fn kernel_image_sizes_multiply() {
        // all morphisms Z/4+Z/2 -> Z/4
        let a = FpModule::new(z4(), Side::Right, 2, vec![vec![0, 2]], DEFAULT_MODULE_BOUND)
            .unwrap();
        let b = z4_mod(vec![], 1);
        let h = hom_group(&a, &b).unwrap();
        for c in h.window.elements() {
            let f = h.decode(&c);
            let fac = factorize(&f).unwrap();
            assert_eq!(fac.kernel.size * fac.image.size, a.size);
            assert_eq!(fac.image.size * fac.cokernel.size, b.size);
        }
    }

    #[test]
    fn hom_additivity_in_each_argument() {
        let a = z4_mod(vec![vec![2]], 1);
        let b = z4_mod(vec![], 1);
        let s = direct_sum(&a, &b).unwrap();
        let n = z4_mod(vec![vec![2]], 1);
        let lhs = hom_group(&s.module, &n).unwrap().group();
        let rhs = crate::abelian::ab_direct_sum(
            &hom_group(&a, &n).unwrap().group(),
            &hom_group(&b, &n).unwrap().group(),
        );
        assert_eq!(lhs, rhs);
    }
}
