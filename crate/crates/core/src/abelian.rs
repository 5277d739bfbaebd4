//! Finite abelian groups as integer-lattice subquotients.
//!
//! A [`Window`] realizes a finite abelian group as `S / K` where
//! `K ⊆ S ⊆ Z^n` are full-rank lattices (both contain the ambient order
//! lattice `diag(orders)`). Smith normal form of `K` expressed in an
//! `S`-basis yields canonical coordinates: every element is a tuple
//! modulo the invariant factors `d_1 | d_2 | ...`. Group homomorphisms
//! ([`AbMap`]) are stored by generator images in canonical coordinates,
//! which makes kernels, images, cokernels and preimages lattice problems.

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::znf::{self, Mat};

/// Isomorphism class of a finite abelian group, the universal value
/// encoding used in reports and comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbGroup {
    pub invariant_factors: Vec<u64>,
}

impl AbGroup {
    pub fn trivial() -> Self {
        AbGroup { invariant_factors: vec![] }
    }

    pub fn order(&self) -> u128 {
        self.invariant_factors.iter().map(|&d| d as u128).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

impl std::fmt::Display for AbGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical element coordinates: one entry per invariant factor.
pub type Coords = Vec<u64>;

/// A finite abelian group presented as a lattice subquotient with
/// canonical Smith coordinates.
#[derive(Debug)]
pub struct Window {
    ambient: usize,
    orders: Vec<u64>,
    s_basis: Mat,
    dims: Vec<u64>,
    kept: Vec<usize>,
    w: Mat, // inverse of the SNF column transform, for decoding
    v: Mat,
}

impl Window {
    /// Build `S / K` inside `Z^ambient` where both lattices implicitly
    /// contain `diag(orders)`. `k_gens` must lie in the lattice spanned
    /// by `s_gens` plus the order rows.
    pub fn new(orders: Vec<u64>, s_gens: &Mat, k_gens: &Mat) -> Rc<Window> {
        let ambient = orders.len();
        let mut s_rows: Mat = s_gens.clone();
        for (i, &o) in orders.iter().enumerate() {
            let mut row = vec![0i128; ambient];
            row[i] = o as i128;
            s_rows.push(row);
        }
        let (h, _) = znf::hnf_with_transform(&s_rows, ambient);
        let s_basis: Mat = h.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
        assert_eq!(s_basis.len(), ambient, "subgroup lattice must have full rank");

        let mut k_rows: Mat = k_gens.clone();
        for (i, &o) in orders.iter().enumerate() {
            let mut row = vec![0i128; ambient];
            row[i] = o as i128;
            k_rows.push(row);
        }
        let k_in_s: Mat = k_rows
            .iter()
            .map(|row| {
                znf::solve_left(&s_basis, ambient, row)
                    .expect("relation lattice must sit inside the subgroup lattice")
            })
            .collect();
        let (d, v, w) = znf::snf_quotient(&k_in_s, ambient);
        let mut dims = Vec::new();
        let mut kept = Vec::new();
        for (i, &di) in d.iter().enumerate() {
            assert!(di > 0, "subquotient must be finite");
            if di > 1 {
                dims.push(di as u64);
                kept.push(i);
            }
        }
        Rc::new(Window { ambient, orders, s_basis, dims, kept, w, v })
    }

    /// The canonical group `⊕ Z/d_i` on its own coordinates.
    pub fn canonical(dims: &[u64]) -> Rc<Window> {
        Window::new(dims.to_vec(), &znf::identity(dims.len()), &Vec::new())
    }

    pub fn trivial() -> Rc<Window> {
        Window::new(vec![], &Vec::new(), &Vec::new())
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn group(&self) -> AbGroup {
        AbGroup { invariant_factors: self.dims.clone() }
    }

    pub fn order(&self) -> u128 {
        self.dims.iter().map(|&d| d as u128).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn zero(&self) -> Coords {
        vec![0; self.dims.len()]
    }

    pub fn add(&self, a: &Coords, b: &Coords) -> Coords {
        self.dims
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&d, (&x, &y))| (x + y) % d)
            .collect()
    }

    pub fn neg(&self, a: &Coords) -> Coords {
        self.dims.iter().zip(a).map(|(&d, &x)| (d - x) % d).collect()
    }

    pub fn smul(&self, k: i128, a: &Coords) -> Coords {
        self.dims
            .iter()
            .zip(a)
            .map(|(&d, &x)| ((k.rem_euclid(d as i128) as u64 * x) % d + d) % d)
            .collect()
    }

    /// Coordinates of an ambient vector; `None` when it is outside `S`.
    pub fn encode(&self, x: &[i128]) -> Option<Coords> {
        let y = znf::solve_left(&self.s_basis, self.ambient, x)?;
        let z = znf::row_mat_mul(&y, &self.v);
        Some(
            self.kept
                .iter()
                .zip(&self.dims)
                .map(|(&pos, &d)| z[pos].rem_euclid(d as i128) as u64)
                .collect(),
        )
    }

    /// An ambient representative of the element, reduced modulo the
    /// ambient orders.
    pub fn decode(&self, c: &Coords) -> Vec<i128> {
        assert_eq!(c.len(), self.dims.len());
        let mut z = vec![0i128; self.ambient];
        for (i, &pos) in self.kept.iter().enumerate() {
            z[pos] = c[i] as i128;
        }
        let y = znf::row_mat_mul(&z, &self.w);
        let x = znf::row_mat_mul(&y, &self.s_basis);
        x.iter()
            .zip(&self.orders)
            .map(|(&xi, &o)| if o > 1 { xi.rem_euclid(o as i128) } else { 0 })
            .collect()
    }

    /// Does the ambient vector lie in the subgroup `S`?
    pub fn contains_ambient(&self, x: &[i128]) -> bool {
        znf::solve_left(&self.s_basis, self.ambient, x).is_some()
    }

    /// All elements in canonical order (last coordinate fastest).
    /// Callers must guard the group order.
    pub fn elements(&self) -> Vec<Coords> {
        let mut out = vec![self.zero()];
        for (i, &d) in self.dims.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for c in &out {
                for val in 0..d {
                    let mut cc = c.clone();
                    cc[i] = val;
                    next.push(cc);
                }
            }
            out = next;
        }
        out
    }

    /// Canonical generators as coordinate tuples (unit vectors).
    pub fn generators(&self) -> Vec<Coords> {
        (0..self.dims.len())
            .map(|i| {
                let mut c = self.zero();
                c[i] = 1;
                c
            })
            .collect()
    }
}

/// Homomorphism between two windowed groups, stored by images of the
/// canonical generators of the domain.
#[derive(Debug, Clone)]
pub struct AbMap {
    pub dom: Rc<Window>,
    pub cod: Rc<Window>,
    img: Vec<Coords>,
}

impl AbMap {
    pub fn new(dom: Rc<Window>, cod: Rc<Window>, img: Vec<Coords>) -> AbMap {
        assert_eq!(img.len(), dom.dims().len());
        let map = AbMap { dom, cod, img };
        debug_assert!(map.is_well_defined(), "generator order not respected");
        map
    }

    fn is_well_defined(&self) -> bool {
        self.dom
            .dims()
            .iter()
            .zip(&self.img)
            .all(|(&d, im)| self.cod.smul(d as i128, im).iter().all(|&x| x == 0))
    }

    pub fn identity(w: &Rc<Window>) -> AbMap {
        AbMap::new(w.clone(), w.clone(), w.generators())
    }

    pub fn zero(dom: &Rc<Window>, cod: &Rc<Window>) -> AbMap {
        let img = vec![cod.zero(); dom.dims().len()];
        AbMap::new(dom.clone(), cod.clone(), img)
    }

    pub fn apply(&self, c: &Coords) -> Coords {
        let mut acc = self.cod.zero();
        for (&ci, im) in c.iter().zip(&self.img) {
            if ci != 0 {
                acc = self.cod.add(&acc, &self.cod.smul(ci as i128, im));
            }
        }
        acc
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &AbMap) -> AbMap {
        let img = self.img.iter().map(|c| g.apply(c)).collect();
        AbMap::new(self.dom.clone(), g.cod.clone(), img)
    }

    pub fn add(&self, other: &AbMap) -> AbMap {
        let img = self
            .img
            .iter()
            .zip(&other.img)
            .map(|(a, b)| self.cod.add(a, b))
            .collect();
        AbMap::new(self.dom.clone(), self.cod.clone(), img)
    }

    pub fn equal(&self, other: &AbMap) -> bool {
        self.img == other.img
    }

    fn img_mat(&self) -> Mat {
        self.img
            .iter()
            .map(|c| c.iter().map(|&x| x as i128).collect())
            .collect()
    }

    /// Kernel as a window over the domain coordinates; decoded elements
    /// are domain coordinate tuples.
    pub fn kernel(&self) -> Rc<Window> {
        let r = self.dom.dims().len();
        let s = self.cod.dims().len();
        let mut stacked = self.img_mat();
        for (i, &d) in self.cod.dims().iter().enumerate() {
            let mut row = vec![0i128; s];
            row[i] = d as i128;
            stacked.push(row);
        }
        let ker = znf::left_kernel(&stacked, s);
        let sols: Mat = ker.into_iter().map(|row| row[..r].to_vec()).collect();
        Window::new(self.dom.dims().to_vec(), &sols, &Vec::new())
    }

    /// Image as a window over the codomain coordinates.
    pub fn image(&self) -> Rc<Window> {
        Window::new(self.cod.dims().to_vec(), &self.img_mat(), &Vec::new())
    }

    /// Cokernel as a window over the codomain coordinates.
    pub fn cokernel(&self) -> Rc<Window> {
        let s = self.cod.dims().len();
        Window::new(self.cod.dims().to_vec(), &znf::identity(s), &self.img_mat())
    }

    /// One preimage of `target`, if any.
    pub fn preimage(&self, target: &Coords) -> Option<Coords> {
        let r = self.dom.dims().len();
        let s = self.cod.dims().len();
        let mut stacked = self.img_mat();
        for (i, &d) in self.cod.dims().iter().enumerate() {
            let mut row = vec![0i128; s];
            row[i] = d as i128;
            stacked.push(row);
        }
        let b: Vec<i128> = target.iter().map(|&x| x as i128).collect();
        let sol = znf::solve_left(&stacked, s, &b)?;
        Some(
            sol[..r]
                .iter()
                .zip(self.dom.dims())
                .map(|(&x, &d)| x.rem_euclid(d as i128) as u64)
                .collect(),
        )
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().order() == self.cod.order()
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    pub fn is_zero(&self) -> bool {
        self.img.iter().all(|c| c.iter().all(|&x| x == 0))
    }
}

/// Invariant factors of the direct sum of two groups. Concatenation is
/// wrong in general (`Z/4 ⊕ Z/6` has factors `2 | 12`), so this goes
/// through the primary decomposition.
pub fn ab_direct_sum(a: &AbGroup, b: &AbGroup) -> AbGroup {
    let mut primary: std::collections::BTreeMap<u64, Vec<u32>> = std::collections::BTreeMap::new();
    for &d in a.invariant_factors.iter().chain(&b.invariant_factors) {
        let mut m = d;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                let mut e = 0;
                while m % p == 0 {
                    m /= p;
                    e += 1;
                }
                primary.entry(p).or_default().push(e);
            }
            p += 1;
        }
        if m > 1 {
            primary.entry(m).or_default().push(1);
        }
    }
    let rank = primary.values().map(|v| v.len()).max().unwrap_or(0);
    let mut factors = vec![1u64; rank];
    for (p, exps) in &mut primary {
        exps.sort_unstable_by(|x, y| y.cmp(x));
        for (i, &e) in exps.iter().enumerate() {
            factors[i] *= p.pow(e);
        }
    }
    factors.retain(|&d| d > 1);
    factors.sort_unstable();
    AbGroup { invariant_factors: factors }
}

/// Invariant factors of a finite abelian group given as a black box:
/// an element list, addition, and a zero test. Works by counting
/// solutions of `p^j · x = 0`, which pins down the isomorphism class.
pub fn invariant_factors_brute<T: Clone + Eq + std::hash::Hash>(
    elements: &[T],
    add: impl Fn(&T, &T) -> T,
    zero: &T,
) -> Vec<u64> {
    let n = elements.len() as u64;
    if n <= 1 {
        return vec![];
    }
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            primes.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        primes.push(m);
    }

    // exponent multiset per prime, largest first
    let mut exps: Vec<Vec<u32>> = Vec::new();
    for &p in &primes {
        let mut counts = vec![1u64]; // c_0 = #{x : x = 0} = 1
        loop {
            let j = counts.len() as u32;
            let pj = p.pow(j);
            let c = elements
                .iter()
                .filter(|x| {
                    let mut acc = zero.clone();
                    let mut base = (*x).clone();
                    let mut k = pj;
                    while k > 0 {
                        if k & 1 == 1 {
                            acc = add(&acc, &base);
                        }
                        base = add(&base, &base);
                        k >>= 1;
                    }
                    acc == *zero
                })
                .count() as u64;
            let prev = *counts.last().unwrap();
            counts.push(c);
            if c == prev {
                break;
            }
        }
        let mut list = Vec::new();
        for j in 1..counts.len() {
            let ratio = counts[j] / counts[j - 1];
            let mut r = ratio;
            let mut m_j = 0u32;
            while r > 1 {
                r /= p;
                m_j += 1;
            }
            // m_j = number of cyclic factors with p-exponent >= j
            for slot in 0..m_j as usize {
                if list.len() <= slot {
                    list.push(0u32);
                }
                list[slot] += 1;
            }
        }
        exps.push(list);
    }

    let rank = exps.iter().map(|l| l.len()).max().unwrap_or(0);
    let mut factors = Vec::new();
    for i in 0..rank {
        let mut d: u64 = 1;
        for (pi, list) in exps.iter().enumerate() {
            if let Some(&e) = list.get(i) {
                d *= primes[pi].pow(e);
            }
        }
        factors.push(d);
    }
    factors.sort_unstable();
    factors
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_window_round_trip() {
        let w = Window::canonical(&[2, 4]);
        assert_eq!(w.dims(), &[2, 4]);
        for c in w.elements() {
            let x = w.decode(&c);
            assert_eq!(w.encode(&x), Some(c));
        }
    }

    #[test]
    fn quotient_z4_by_two() {
        // Z/4 / <2> = Z/2
        let w = Window::new(vec![4], &znf::identity(1), &vec![vec![2]]);
        assert_eq!(w.dims(), &[2]);
        assert_eq!(w.encode(&[2]), Some(vec![0]));
        assert_eq!(w.encode(&[1]), Some(vec![1]));
    }

    #[test]
    fn subgroup_of_z8() {
        // <2> inside Z/8 = Z/4
        let w = Window::new(vec![8], &vec![vec![2]], &Vec::new());
        assert_eq!(w.dims(), &[4]);
        assert!(w.contains_ambient(&[6]));
        assert!(!w.contains_ambient(&[3]));
    }

    #[test]
    fn map_kernel_image_cokernel() {
        // doubling on Z/4: kernel Z/2, image Z/2, cokernel Z/2
        let z4 = Window::canonical(&[4]);
        let double = AbMap::new(z4.clone(), z4.clone(), vec![vec![2]]);
        assert_eq!(double.kernel().dims(), &[2]);
        assert_eq!(double.image().dims(), &[2]);
        assert_eq!(double.cokernel().dims(), &[2]);
        assert_eq!(double.preimage(&vec![2]), Some(vec![1]));
        assert_eq!(double.preimage(&vec![1]), None);
    }

    #[test]
    fn map_between_different_groups() {
        let z2 = Window::canonical(&[2]);
        let z4 = Window::canonical(&[4]);
        // injection Z/2 -> Z/4
        let inj = AbMap::new(z2.clone(), z4.clone(), vec![vec![2]]);
        assert!(inj.is_injective());
        assert!(!inj.is_surjective());
        assert_eq!(inj.cokernel().dims(), &[2]);
    }

    #[test]
    fn brute_invariants() {
        let els: Vec<(u64, u64)> =
            (0..2).flat_map(|a| (0..4).map(move |b| (a, b))).collect();
        let add = |x: &(u64, u64), y: &(u64, u64)| ((x.0 + y.0) % 2, (x.1 + y.1) % 4);
        assert_eq!(invariant_factors_brute(&els, add, &(0, 0)), vec![2, 4]);
        let z6: Vec<u64> = (0..6).collect();
        assert_eq!(invariant_factors_brute(&z6, |a, b| (a + b) % 6, &0), vec![6]);
    }
}
