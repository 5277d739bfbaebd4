//! Supported rings and their representation bases.
//!
//! A representation basis is a finite list of test modules per side on
//! which all extensional functor checks run. For the rings supported
//! here (finite representation type) the bases list all indecomposables,
//! which is what makes basis checks conclusive. Indecomposability is
//! verified at registration time through the idempotents of the
//! endomorphism ring.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::module::{hom_group, FpModule, Side, DEFAULT_MODULE_BOUND};
use crate::ring::{self, FiniteRing};

pub struct SupportedRing {
    pub name: String,
    pub ring: Rc<FiniteRing>,
    pub basis_right: Vec<Rc<FpModule>>,
    pub basis_left: Vec<Rc<FpModule>>,
}

impl SupportedRing {
    pub fn basis(&self, side: Side) -> &[Rc<FpModule>] {
        match side {
            Side::Right => &self.basis_right,
            Side::Left => &self.basis_left,
        }
    }

    pub fn free(&self, side: Side) -> Rc<FpModule> {
        FpModule::free(self.ring.clone(), side, 1, DEFAULT_MODULE_BOUND)
            .expect("rank one free module")
    }
}

/// A finite module is indecomposable iff its endomorphism ring has no
/// idempotents besides 0 and 1.
pub fn is_indecomposable(m: &Rc<FpModule>) -> Result<bool> {
    if m.is_zero() {
        return Ok(false);
    }
    let end = hom_group(m, m)?;
    if end.window.order() > (1 << 14) {
        return Err(Error::BoundExceeded {
            what: "endomorphism enumeration".into(),
            bound: 1 << 14,
        });
    }
    let mut idempotents = 0usize;
    for c in end.window.elements() {
        let f = end.decode(&c);
        if f.then(&f)?.equal(&f) {
            idempotents += 1;
        }
    }
    Ok(idempotents == 2)
}

fn cyclic(ring: &Rc<FiniteRing>, side: Side, rel_rows: &[u8]) -> Result<Rc<FpModule>> {
    let rels = rel_rows.iter().map(|&r| vec![r]).collect();
    FpModule::new(ring.clone(), side, 1, rels, DEFAULT_MODULE_BOUND)
}

fn zmod_supported(n: usize) -> Result<SupportedRing> {
    let ring = ring::make_zmod(n)?;
    let mut divisors: Vec<usize> = (2..=n).filter(|d| n % d == 0).collect();
    divisors.sort_unstable();
    let mut basis_right = Vec::new();
    let mut basis_left = Vec::new();
    for d in divisors {
        let rel = if d == n { vec![] } else { vec![d as u8] };
        basis_right.push(cyclic(&ring, Side::Right, &rel)?);
        basis_left.push(cyclic(&ring, Side::Left, &rel)?);
    }
    if basis_right.is_empty() {
        // the zero ring: the only module is 0, which still works as a basis
        basis_right.push(FpModule::zero(ring.clone(), Side::Right));
        basis_left.push(FpModule::zero(ring.clone(), Side::Left));
    }
    Ok(SupportedRing { name: format!("Z{n}"), ring, basis_right, basis_left })
}

fn f2x2_supported() -> Result<SupportedRing> {
    let ring = ring::make_f2x2();
    // the two indecomposables: the ring itself and the residue field R/(x)
    let x = 2u8;
    let basis_right = vec![cyclic(&ring, Side::Right, &[x])?, cyclic(&ring, Side::Right, &[])?];
    let basis_left = vec![cyclic(&ring, Side::Left, &[x])?, cyclic(&ring, Side::Left, &[])?];
    Ok(SupportedRing { name: "F2x2".into(), ring, basis_right, basis_left })
}

fn t2_supported() -> Result<SupportedRing> {
    let ring = ring::make_ut2_f2();
    // element encoding: [[a, b], [0, c]] -> a + 2b + 4c
    let e11 = 1u8;
    let e12 = 2u8;
    let e22 = 4u8;
    // right indecomposables: the two simples and the projective e11*T
    let basis_right = vec![
        cyclic(&ring, Side::Right, &[e22, e12])?, // simple at the first vertex
        cyclic(&ring, Side::Right, &[e11])?,      // simple at the second vertex (= e22*T)
        cyclic(&ring, Side::Right, &[e22])?,      // projective e11*T, length two
    ];
    // left indecomposables, mirrored
    let basis_left = vec![
        cyclic(&ring, Side::Left, &[e22])?,       // T*e11, simple
        cyclic(&ring, Side::Left, &[e11, e12])?,  // simple top of T*e22
        cyclic(&ring, Side::Left, &[e11])?,       // projective T*e22, length two
    ];
    for m in basis_right.iter().chain(&basis_left) {
        if !is_indecomposable(m)? {
            return Err(Error::internal(format!(
                "declared basis module is decomposable: {:?}",
                m
            )));
        }
    }
    Ok(SupportedRing { name: "T2".into(), ring, basis_right, basis_left })
}

/// Look up a supported ring by CLI name: `Z2`..`Z64`, `F2x2`, `T2`.
pub fn supported_ring(name: &str) -> Result<Rc<SupportedRing>> {
    if let Some(num) = name.strip_prefix('Z') {
        if let Ok(n) = num.parse::<usize>() {
            return Ok(Rc::new(zmod_supported(n)?));
        }
    }
    match name {
        "F2x2" => Ok(Rc::new(f2x2_supported()?)),
        "T2" => Ok(Rc::new(t2_supported()?)),
        _ => Err(Error::UnsupportedRing { label: name.into() }),
    }
}

/// Match an arbitrary ring against the built-in registry by its tables.
pub fn supported_for(ring: &Rc<FiniteRing>) -> Result<Rc<SupportedRing>> {
    if let Some(num) = ring.label.strip_prefix("Z/") {
        if let Ok(n) = num.parse::<usize>() {
            let cand = supported_ring(&format!("Z{n}"))?;
            if cand.ring.same_tables(ring) {
                return Ok(cand);
            }
        }
    }
    for name in ["F2x2", "T2"] {
        if let Ok(cand) = supported_ring(name) {
            if cand.ring.same_tables(ring) {
                return Ok(cand);
            }
        }
    }
    for n in 1..=crate::ring::RING_BOUND {
        if let Ok(cand) = supported_ring(&format!("Z{n}")) {
            if cand.ring.same_tables(ring) {
                return Ok(cand);
            }
        }
    }
    Err(Error::UnsupportedRing { label: ring.label.clone() })
}

pub fn all_supported_names() -> Vec<&'static str> {
    vec!["Z4", "Z6", "F2x2", "T2"]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zmod_bases() {
        let s = supported_ring("Z4").unwrap();
        assert_eq!(s.basis_right.len(), 2);
        assert_eq!(s.basis_right[0].size, 2);
        assert_eq!(s.basis_right[1].size, 4);
        let s6 = supported_ring("Z6").unwrap();
        let sizes: Vec<u64> = s6.basis_right.iter().map(|m| m.size).collect();
        assert_eq!(sizes, vec![2, 3, 6]);
    }

    #[test]
    fn basis_modules_are_indecomposable() {
        // over Z/n the basis intentionally includes the ring itself, which
        // is only indecomposable for prime powers; everything else must be
        for name in all_supported_names() {
            let s = supported_ring(name).unwrap();
            for m in s.basis_right.iter().chain(&s.basis_left) {
                let distinct_primes = {
                    let mut n = m.size;
                    let mut count = 0;
                    let mut p = 2;
                    while p * p <= n {
                        if n % p == 0 {
                            count += 1;
                            while n % p == 0 {
                                n /= p;
                            }
                        }
                        p += 1;
                    }
                    if n > 1 {
                        count += 1;
                    }
                    count
                };
                let expect = if name.starts_with('Z') { distinct_primes == 1 } else { true };
                assert_eq!(is_indecomposable(m).unwrap(), expect, "{name}: {m:?}");
            }
        }
        // and the cyclic prime-power modules really are indecomposable
        let s = supported_ring("Z4").unwrap();
        for m in &s.basis_right {
            assert!(is_indecomposable(m).unwrap());
        }
    }

    #[test]
    fn t2_basis_sizes() {
        let s = supported_ring("T2").unwrap();
        let right: Vec<u64> = s.basis_right.iter().map(|m| m.size).collect();
        assert_eq!(right, vec![2, 2, 4]);
        let left: Vec<u64> = s.basis_left.iter().map(|m| m.size).collect();
        assert_eq!(left, vec![2, 2, 4]);
    }

    #[test]
    fn unsupported_ring_is_rejected() {
        assert!(supported_ring("Q8").is_err());
    }
}
