//! Finite unital rings given by addition and multiplication tables.
//!
//! Elements are opaque indices `0..size`. Construction validates every
//! ring axiom by exhaustive enumeration, so downstream code never has to
//! question the arithmetic. The additive structure of the ring (generators,
//! integer expressions, relation lattice) is computed once and shared; the
//! module layer leans on it to express everything as integer lattices.

use std::rc::Rc;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::znf::Mat;

/// Largest permitted ring size. Everything downstream enumerates, so this
/// keeps runtimes in seconds.
pub const RING_BOUND: usize = 64;

#[derive(Debug)]
pub struct FiniteRing {
    pub label: String,
    pub size: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    pub zero: u8,
    pub one: u8,
    neg: Vec<u8>,
    plus: OnceLock<RingPlus>,
}

/// Additive structure of `(R, +)`: a generating set, the order of each
/// generator, an integer expression for every element, and generators of
/// the relation lattice of the expression map `Z^t -> (R, +)`.
#[derive(Debug)]
pub struct RingPlus {
    pub gens: Vec<u8>,
    pub gen_orders: Vec<u64>,
    pub exprs: Vec<Vec<i128>>,
    pub rel_rows: Mat,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RingJson {
    pub label: String,
    pub size: usize,
    pub add: Vec<u8>,
    pub mul: Vec<u8>,
    pub zero: u8,
    pub one: u8,
}

impl FiniteRing {
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.size + b as usize]
    }

    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.size + b as usize]
    }

    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.size as u8
    }

    pub fn is_commutative(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Structural equality of the arithmetic (labels ignored).
    pub fn same_tables(&self, other: &FiniteRing) -> bool {
        self.size == other.size
            && self.zero == other.zero
            && self.one == other.one
            && self.add == other.add
            && self.mul == other.mul
    }

    pub fn to_json(&self) -> RingJson {
        RingJson {
            label: self.label.clone(),
            size: self.size,
            add: self.add.clone(),
            mul: self.mul.clone(),
            zero: self.zero,
            one: self.one,
        }
    }

    /// Additive structure, computed on first use.
    pub fn plus(&self) -> &RingPlus {
        self.plus.get_or_init(|| compute_plus(self))
    }

    /// Two-sided inverse of an element, if it is a unit.
    pub fn inverse(&self, r: u8) -> Option<u8> {
        self.elements()
            .find(|&s| self.mul(r, s) == self.one && self.mul(s, r) == self.one)
    }
}

fn validate(label: String, size: usize, add: Vec<u8>, mul: Vec<u8>, zero: u8, one: u8) -> Result<FiniteRing> {
    if size == 0 || size > RING_BOUND {
        return Err(Error::SizeLimit { predicted: size as u64, bound: RING_BOUND as u64 });
    }
    assert_eq!(add.len(), size * size, "addition table must be size x size");
    assert_eq!(mul.len(), size * size, "multiplication table must be size x size");
    let at = |a: u8, b: u8| add[a as usize * size + b as usize];
    let mt = |a: u8, b: u8| mul[a as usize * size + b as usize];
    let els = || 0..size as u8;

    for a in els() {
        for b in els() {
            if at(a, b) as usize >= size || mt(a, b) as usize >= size {
                return Err(Error::RingAxiom { axiom: "closure", witness: (a, b, 0) });
            }
            if at(a, b) != at(b, a) {
                return Err(Error::RingAxiom { axiom: "additive commutativity", witness: (a, b, 0) });
            }
        }
        if at(a, zero) != a {
            return Err(Error::RingAxiom { axiom: "additive identity", witness: (a, zero, 0) });
        }
        if mt(a, one) != a || mt(one, a) != a {
            return Err(Error::RingAxiom { axiom: "multiplicative identity", witness: (a, one, 0) });
        }
    }
    let mut neg = vec![0u8; size];
    for a in els() {
        match els().find(|&b| at(a, b) == zero) {
            Some(b) => neg[a as usize] = b,
            None => return Err(Error::RingAxiom { axiom: "additive inverse", witness: (a, 0, 0) }),
        }
    }
    for a in els() {
        for b in els() {
            for c in els() {
                if at(at(a, b), c) != at(a, at(b, c)) {
                    return Err(Error::RingAxiom { axiom: "additive associativity", witness: (a, b, c) });
                }
                if mt(mt(a, b), c) != mt(a, mt(b, c)) {
                    return Err(Error::RingAxiom { axiom: "associativity", witness: (a, b, c) });
                }
                if mt(a, at(b, c)) != at(mt(a, b), mt(a, c)) {
                    return Err(Error::RingAxiom { axiom: "left distributivity", witness: (a, b, c) });
                }
                if mt(at(a, b), c) != at(mt(a, c), mt(b, c)) {
                    return Err(Error::RingAxiom { axiom: "right distributivity", witness: (a, b, c) });
                }
            }
        }
    }
    Ok(FiniteRing { label, size, add, mul, zero, one, neg, plus: OnceLock::new() })
}

/// The ring `Z/n` with canonical tables.
pub fn make_zmod(n: usize) -> Result<Rc<FiniteRing>> {
    if n == 0 || n > RING_BOUND {
        return Err(Error::SizeLimit { predicted: n as u64, bound: RING_BOUND as u64 });
    }
    let add = table(n, |a, b| ((a + b) % n) as u8);
    let mul = table(n, |a, b| ((a * b) % n) as u8);
    let one = if n == 1 { 0 } else { 1 };
    Ok(Rc::new(validate(format!("Z/{n}"), n, add, mul, 0, one)?))
}

fn table(n: usize, f: impl Fn(usize, usize) -> u8) -> Vec<u8> {
    let mut t = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            t.push(f(a, b));
        }
    }
    t
}

/// A ring from explicit tables; fails with the violated axiom and a witness.
pub fn make_table_ring(
    label: impl Into<String>,
    add: Vec<u8>,
    mul: Vec<u8>,
    zero: u8,
    one: u8,
) -> Result<Rc<FiniteRing>> {
    let n2 = add.len();
    let size = (n2 as f64).sqrt().round() as usize;
    if size * size != n2 || mul.len() != n2 {
        return Err(Error::RingAxiom { axiom: "square tables", witness: (0, 0, 0) });
    }
    Ok(Rc::new(validate(label.into(), size, add, mul, zero, one)?))
}

pub fn from_json(j: &RingJson) -> Result<Rc<FiniteRing>> {
    make_table_ring(j.label.clone(), j.add.clone(), j.mul.clone(), j.zero, j.one)
}

/// Same elements and addition, reversed multiplication. The label gains
/// or loses an `^op` suffix so the construction is an involution.
pub fn opposite(r: &FiniteRing) -> Rc<FiniteRing> {
    let size = r.size;
    let mut mul = vec![0u8; size * size];
    for a in 0..size {
        for b in 0..size {
            mul[a * size + b] = r.mul(b as u8, a as u8);
        }
    }
    let label = match r.label.strip_suffix("^op") {
        Some(base) => base.to_string(),
        None => format!("{}^op", r.label),
    };
    Rc::new(
        validate(label, size, r.add.clone(), mul, r.zero, r.one)
            .expect("opposite of a valid ring is valid"),
    )
}

/// `F2[x]/(x^2)`: elements `a + b·x` encoded as `a + 2b`.
pub fn make_f2x2() -> Rc<FiniteRing> {
    let enc = |a: usize, b: usize| (a % 2 + 2 * (b % 2)) as u8;
    let add = table(4, |p, q| enc((p & 1) ^ (q & 1), (p >> 1) ^ (q >> 1)));
    let mul = table(4, |p, q| {
        let (a0, a1) = (p & 1, p >> 1);
        let (b0, b1) = (q & 1, q >> 1);
        enc(a0 * b0, (a0 * b1 + a1 * b0) % 2)
    });
    Rc::new(validate("F2[x]/(x^2)".into(), 4, add, mul, 0, 1).expect("valid ring"))
}

/// Upper triangular 2x2 matrices over `F2`: `[[a, b], [0, c]]` encoded as
/// `a + 2b + 4c`. The smallest noncommutative ring in the test fleet.
pub fn make_ut2_f2() -> Rc<FiniteRing> {
    let unpack = |p: usize| (p & 1, (p >> 1) & 1, (p >> 2) & 1);
    let enc = |a: usize, b: usize, c: usize| (a % 2 + 2 * (b % 2) + 4 * (c % 2)) as u8;
    let add = table(8, |p, q| {
        let (a, b, c) = unpack(p);
        let (d, e, f) = unpack(q);
        enc(a ^ d, b ^ e, c ^ f)
    });
    let mul = table(8, |p, q| {
        let (a, b, c) = unpack(p);
        let (d, e, f) = unpack(q);
        // [[a,b],[0,c]] * [[d,e],[0,f]] = [[ad, ae+bf],[0, cf]]
        enc(a * d, (a * e + b * f) % 2, c * f)
    });
    Rc::new(validate("T2(F2)".into(), 8, add, mul, 0, enc(1, 0, 1)).expect("valid ring"))
}

fn compute_plus(r: &FiniteRing) -> RingPlus {
    let mut gens: Vec<u8> = Vec::new();
    let mut exprs: Vec<Option<Vec<i128>>> = vec![None; r.size];
    exprs[r.zero as usize] = Some(vec![]);
    let mut known: Vec<u8> = vec![r.zero];

    for e in r.elements() {
        if exprs[e as usize].is_some() {
            continue;
        }
        // new additive generator: extend every known element by multiples of e
        let gi = gens.len();
        gens.push(e);
        for x in std::mem::take(&mut known) {
            let mut cur = x;
            let mut mult = 0i128;
            loop {
                let mut expr = exprs[x as usize].clone().expect("known element has expression");
                expr.resize(gi + 1, 0);
                expr[gi] = mult;
                if exprs[cur as usize].is_none() {
                    exprs[cur as usize] = Some(expr);
                }
                known.push(cur);
                cur = r.add(cur, e);
                mult += 1;
                if cur == x {
                    break;
                }
            }
        }
        known.sort_unstable();
        known.dedup();
    }
    let t = gens.len();
    let mut exprs: Vec<Vec<i128>> = exprs
        .into_iter()
        .map(|e| e.expect("all elements reached"))
        .collect();
    for e in &mut exprs {
        e.resize(t, 0);
    }
    let gen_orders: Vec<u64> = gens
        .iter()
        .map(|&g| {
            let mut o = 1u64;
            let mut cur = g;
            while cur != r.zero {
                cur = r.add(cur, g);
                o += 1;
            }
            o
        })
        .collect();
    // Cayley-graph relations: expr(x) + e_i - expr(x + g_i) for all x, i.
    let mut rel_rows: Mat = Vec::new();
    for x in r.elements() {
        for (i, &g) in gens.iter().enumerate() {
            let y = r.add(x, g);
            let mut row = exprs[x as usize].clone();
            row[i] += 1;
            for (a, b) in row.iter_mut().zip(&exprs[y as usize]) {
                *a -= b;
            }
            if row.iter().any(|&v| v != 0) {
                rel_rows.push(row);
            }
        }
    }
    RingPlus { gens, gen_orders, exprs, rel_rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zmod_arithmetic() {
        let r = make_zmod(4).unwrap();
        assert_eq!(r.mul(2, 2), 0);
        assert_eq!(r.label, "Z/4");
        let r6 = make_zmod(6).unwrap();
        assert_eq!(r6.mul(2, 3), 0);
        assert_eq!(r6.mul(3, 3), 3);
    }

    #[test]
    fn zero_ring() {
        let r = make_zmod(1).unwrap();
        assert_eq!(r.zero, r.one);
        assert_eq!(r.size, 1);
    }

    #[test]
    fn zmod_bounds() {
        assert!(make_zmod(0).is_err());
        assert!(make_zmod(65).is_err());
    }

    #[test]
    fn f2x2_is_the_dual_numbers() {
        // independently rebuilt from polynomial arithmetic: (a0 + a1 x)(b0 + b1 x) mod x^2
        let r = make_f2x2();
        let x = 2u8;
        assert_eq!(r.mul(x, x), 0);
        for p in 0..4usize {
            for q in 0..4usize {
                let (a0, a1) = (p & 1, p >> 1);
                let (b0, b1) = (q & 1, q >> 1);
                let c0 = (a0 * b0) % 2;
                let c1 = (a0 * b1 + a1 * b0) % 2;
                assert_eq!(r.mul(p as u8, q as u8) as usize, c0 + 2 * c1);
            }
        }
        assert!(r.is_commutative());
    }

    #[test]
    fn ut2_is_noncommutative() {
        let r = make_ut2_f2();
        // e12 = index 2, e11 = index 1
        let e12 = 2u8;
        let e11 = 1u8;
        assert_ne!(r.mul(e12, e11), r.mul(e11, e12));
        assert!(!r.is_commutative());
    }

    #[test]
    fn opposite_swaps_products() {
        let t = make_ut2_f2();
        let op = opposite(&t);
        let e12 = 2u8;
        let e22 = 4u8;
        assert_eq!(op.mul(e12, e22), t.mul(e22, e12));
        assert_eq!(op.label, "T2(F2)^op");
        let opop = opposite(&op);
        assert!(opop.same_tables(&t));
        assert_eq!(opop.label, "T2(F2)");
    }

    #[test]
    fn opposite_of_commutative_is_identical() {
        let r = make_zmod(4).unwrap();
        let op = opposite(&r);
        assert!(op.same_tables(&r));
    }

    #[test]
    fn bad_associativity_reports_witness() {
        // 2-element "ring" with broken multiplication
        let add = vec![0, 1, 1, 0];
        let mul = vec![0, 1, 1, 1]; // 0*0=0, 0*1=1 breaks identity/associativity
        let err = make_table_ring("bad", add, mul, 0, 1).unwrap_err();
        match err {
            Error::RingAxiom { .. } => {}
            other => panic!("expected axiom violation, got {other:?}"),
        }
    }

    #[test]
    fn plus_structure_expresses_everything() {
        for ring in [make_zmod(6).unwrap(), make_f2x2(), make_ut2_f2()] {
            let plus = ring.plus();
            for e in ring.elements() {
                let expr = &plus.exprs[e as usize];
                // re-evaluate the expression
                let mut acc = ring.zero;
                for (i, &z) in expr.iter().enumerate() {
                    let g = plus.gens[i];
                    let k = z.rem_euclid(plus.gen_orders[i] as i128);
                    for _ in 0..k {
                        acc = ring.add(acc, g);
                    }
                }
                assert_eq!(acc, e);
            }
        }
    }
}
