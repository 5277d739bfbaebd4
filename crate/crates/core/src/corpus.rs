//! Deterministic functor corpora and the verification suites.
//!
//! A corpus over a ring collects all modules with at most `maxgens`
//! generators up to isomorphism, and all defining morphisms between them
//! up to the action of the automorphism groups on both sides. Everything
//! is generated in a fixed order, so corpus contents (and hence suite
//! reports) are reproducible byte for byte.

use std::collections::BTreeSet;
use std::rc::Rc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::abelian::AbMap;
use crate::agj::Agj;
use crate::basis::SupportedRing;
use crate::error::{Error, Result};
use crate::functor::{
    evaluate, nat_factorize, nat_group, verify_factorization, yoneda, FpFunctor,
    NatTransformation,
};
use crate::module::{
    factorize, hom_group, hom_invariants_brute, tensor_group, tensor_invariants_brute,
    FpModule, ModuleMorphism, ShortExactSequence, Side, DEFAULT_MODULE_BOUND,
    INTERNAL_MODULE_BOUND,
};

#[derive(Debug, Clone, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub details: String,
}

impl Check {
    fn ok(name: impl Into<String>, details: impl Into<String>) -> Check {
        Check { name: name.into(), passed: true, details: details.into() }
    }

    fn fail(name: impl Into<String>, details: impl Into<String>) -> Check {
        Check { name: name.into(), passed: false, details: details.into() }
    }

    fn from(name: impl Into<String>, passed: bool, details: impl Into<String>) -> Check {
        Check { name: name.into(), passed, details: details.into() }
    }
}

pub struct Corpus {
    pub sup: Rc<SupportedRing>,
    pub maxgens: usize,
    /// right-side modules with ≤ maxgens generators, up to isomorphism
    pub modules: Vec<Rc<FpModule>>,
    /// defining morphisms up to automorphisms on both ends
    pub morphisms: Vec<ModuleMorphism>,
    pub functors: Vec<Rc<FpFunctor>>,
}

/// All submodules of the free module `R^k`, each as its sorted element set.
fn submodules(free: &Rc<FpModule>) -> Vec<Vec<Vec<u8>>> {
    let els = free.elements().to_vec();
    let zero_sub = vec![free.zero_elem()];
    let mut seen: BTreeSet<Vec<Vec<u8>>> = BTreeSet::new();
    seen.insert(zero_sub.clone());
    let mut frontier = vec![zero_sub];
    while let Some(sub) = frontier.pop() {
        for v in &els {
            if sub.binary_search(v).is_ok() {
                continue;
            }
            // close sub ∪ {v}
            let mut set: BTreeSet<Vec<u8>> = sub.iter().cloned().collect();
            let mut work = vec![v.clone()];
            while let Some(w) = work.pop() {
                for r in free.ring.elements() {
                    let scaled = free.scale(&w, r);
                    let snapshot: Vec<Vec<u8>> = set.iter().cloned().collect();
                    for s in snapshot {
                        let sum = free.add_elems(&s, &scaled);
                        if set.insert(sum.clone()) {
                            work.push(sum);
                        }
                    }
                }
            }
            let closed: Vec<Vec<u8>> = set.into_iter().collect();
            if seen.insert(closed.clone()) {
                frontier.push(closed);
            }
        }
    }
    seen.into_iter().collect()
}

/// Minimal generating rows of a submodule given by its element set.
fn generating_rows(free: &Rc<FpModule>, sub: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut gens: Vec<Vec<u8>> = Vec::new();
    let mut span: BTreeSet<Vec<u8>> = BTreeSet::new();
    span.insert(free.zero_elem());
    for v in sub {
        if span.contains(v) {
            continue;
        }
        gens.push(v.clone());
        let mut work: Vec<Vec<u8>> = gens
            .iter()
            .flat_map(|g| {
                free.ring.elements().map(|r| free.scale(g, r)).collect::<Vec<_>>()
            })
            .collect();
        let mut set: BTreeSet<Vec<u8>> = BTreeSet::new();
        set.insert(free.zero_elem());
        while let Some(w) = work.pop() {
            if set.contains(&w) {
                continue;
            }
            let snapshot: Vec<Vec<u8>> = set.iter().cloned().collect();
            for s in snapshot {
                let mut cur = free.add_elems(&s, &w);
                while cur != s {
                    set.insert(cur.clone());
                    cur = free.add_elems(&cur, &w);
                }
            }
        }
        span = set;
    }
    gens
}

pub fn build_corpus(sup: &Rc<SupportedRing>, maxgens: usize) -> Result<Corpus> {
    let ring = sup.ring.clone();
    let mut modules: Vec<Rc<FpModule>> = vec![FpModule::zero(ring.clone(), Side::Right)];
    for k in 1..=maxgens {
        let free = FpModule::free(ring.clone(), Side::Right, k, DEFAULT_MODULE_BOUND)?;
        for sub in submodules(&free) {
            let rows = generating_rows(&free, &sub);
            let m = FpModule::new(
                ring.clone(),
                Side::Right,
                k,
                rows,
                INTERNAL_MODULE_BOUND,
            )?;
            let mut known = false;
            for existing in &modules {
                if crate::module::modules_isomorphic(existing, &m)?.is_some() {
                    known = true;
                    break;
                }
            }
            if !known {
                modules.push(m);
            }
        }
    }
    modules.sort_by_key(|m| (m.size, m.gens, m.relations.clone()));

    // automorphisms per module
    let mut auts: Vec<Vec<ModuleMorphism>> = Vec::new();
    for m in &modules {
        let end = hom_group(m, m)?;
        if end.window.order() > (1 << 12) {
            return Err(Error::BoundExceeded {
                what: format!("automorphism enumeration for a module of size {}", m.size),
                bound: 1 << 12,
            });
        }
        let mut list = Vec::new();
        for c in end.window.elements() {
            let f = end.decode(&c);
            if f.is_iso() {
                list.push(f);
            }
        }
        auts.push(list);
    }

    // defining morphisms up to (Aut(M), Aut(N)) orbits
    let mut morphisms: Vec<ModuleMorphism> = Vec::new();
    for (mi, m) in modules.iter().enumerate() {
        for (ni, n) in modules.iter().enumerate() {
            let hom = hom_group(m, n)?;
            if hom.window.order() > (1 << 12) {
                return Err(Error::BoundExceeded {
                    what: "hom enumeration for the corpus".into(),
                    bound: 1 << 12,
                });
            }
            let mut remaining: BTreeSet<Vec<Vec<u8>>> = hom
                .window
                .elements()
                .iter()
                .map(|c| hom.decode(c).images)
                .collect();
            while let Some(images) = remaining.iter().next().cloned() {
                let f = ModuleMorphism { source: m.clone(), target: n.clone(), images };
                morphisms.push(f.clone());
                for a in &auts[mi] {
                    let fa = a.then(&f)?;
                    for b in &auts[ni] {
                        let orbit = fa.then(b)?;
                        remaining.remove(&orbit.images);
                    }
                }
            }
        }
    }
    let functors = morphisms.iter().map(|f| FpFunctor::from_morphism(f.clone())).collect();
    Ok(Corpus { sup: sup.clone(), maxgens, modules, morphisms, functors })
}

/// Pick a deterministic pseudo-random transformation between two corpus
/// functors (or None if the group is trivial).
fn sample_transformation(
    rng: &mut ChaCha8Rng,
    src: &Rc<FpFunctor>,
    dst: &Rc<FpFunctor>,
) -> Result<Option<NatTransformation>> {
    let ng = nat_group(src, dst)?;
    if ng.window.is_trivial() {
        return Ok(None);
    }
    let coords: Vec<u64> = ng.window.dims().iter().map(|&d| rng.gen_range(0..d)).collect();
    Ok(Some(ng.decode(&coords)?))
}

// ---------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------

/// Yoneda and its adjoint-side twin: `Nat((X,-), F) = F(X)` realized by
/// evaluation at the identity, and `Nat(F, (X,-)) = Hom(X, defect F)`.
pub fn suite_yoneda(agj: &Agj, corpus: &Corpus) -> Result<Vec<Check>> {
    let mut bad = Vec::new();
    let mut count = 0usize;
    for f in &corpus.functors {
        let w = agj.defect(f)?;
        for x in agj.basis(Side::Right) {
            count += 1;
            let y = yoneda(x);
            let ng = nat_group(&y, f)?;
            let ev = evaluate(f, x)?;
            if ng.group() != ev.group() {
                bad.push(format!("forward groups differ for functor {}", f.key()));
                continue;
            }
            // the canonical map α -> α_X(1_X)
            let id_class = ev_identity_class(&y, x)?;
            let img = ng
                .window
                .generators()
                .iter()
                .map(|c| {
                    let alpha = ng.decode(c)?;
                    Ok(alpha.at_module(x)?.apply(&id_class))
                })
                .collect::<Result<_>>()?;
            let canonical = AbMap::new(ng.window.clone(), ev.window.clone(), img);
            if !canonical.is_iso() {
                bad.push(format!("canonical Yoneda map is not an iso for {}", f.key()));
            }
            let co = nat_group(f, &y)?;
            let hom = hom_group(x, &w)?;
            if co.group() != hom.group() {
                bad.push(format!("reverse groups differ for functor {}", f.key()));
            }
        }
    }
    Ok(vec![Check::from(
        "yoneda-and-defect",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{count} functor/basis pairs checked")
        } else {
            bad.join("; ")
        },
    )])
}

fn ev_identity_class(y: &Rc<FpFunctor>, x: &Rc<FpModule>) -> Result<Vec<u64>> {
    let e = evaluate(y, x)?;
    Ok(e.encode(&ModuleMorphism::identity(x)))
}

/// The dual sends representables to tensor functors.
pub fn suite_dual_representables(agj: &Agj, corpus: &Corpus) -> Result<Vec<Check>> {
    let basis = agj.basis(Side::Left).to_vec();
    let mut bad = Vec::new();
    for x in &corpus.modules {
        let d = agj.d_a(&yoneda(x))?;
        let t = agj.tensor_functor(x)?;
        if crate::functor::functors_isomorphic(&d, &t, &basis)?.is_none() {
            bad.push(format!("module of size {}", x.size));
        }
    }
    Ok(vec![Check::from(
        "dual-of-representable",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} modules checked", corpus.modules.len())
        } else {
            bad.join("; ")
        },
    )])
}

/// Exactness of the dual on seeded short exact sequences of functors.
pub fn suite_dual_exactness(
    agj: &Agj,
    corpus: &Corpus,
    seed: u64,
    count: usize,
) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flip = agj.basis(Side::Left).to_vec();
    let mut done = 0usize;
    let mut bad = Vec::new();
    let mut guard = 0usize;
    while done < count && guard < count * 20 {
        guard += 1;
        let fi = rng.gen_range(0..corpus.functors.len());
        let gi = rng.gen_range(0..corpus.functors.len());
        let Some(alpha) =
            sample_transformation(&mut rng, &corpus.functors[fi], &corpus.functors[gi])?
        else {
            continue;
        };
        let fac = nat_factorize(&alpha)?;
        // short exact: im -> G -> coker
        let d_epi = agj.dualize_morphism(&fac.cokernel_epi)?;
        let d_mono = agj.dualize_morphism(&fac.image_mono)?;
        done += 1;
        for b in &flip {
            let m1 = d_epi.at_module(b)?;
            let m2 = d_mono.at_module(b)?;
            let exact_left = m1.is_injective();
            let exact_right = m2.is_surjective();
            let middle = m1.image().order() == m2.kernel().order()
                && m1
                    .image()
                    .generators()
                    .iter()
                    .all(|c| m2.kernel().contains_ambient(&m1.image().decode(c)));
            if !(exact_left && exact_right && middle) {
                bad.push(format!("sequence {done} fails at a basis module"));
                break;
            }
        }
    }
    Ok(vec![Check::from(
        "dual-exactness",
        bad.is_empty() && done == count,
        if bad.is_empty() {
            format!("{done} seeded short exact sequences")
        } else {
            bad.join("; ")
        },
    )])
}

/// The involution identities: double dual, left adjoint against the
/// search-based one, and the dual of tensor functors.
pub fn suite_duality(agj: &Agj, corpus: &Corpus) -> Result<Vec<Check>> {
    let right_basis = agj.basis(Side::Right).to_vec();
    let mut checks = Vec::new();

    let mut bad = Vec::new();
    for f in &corpus.functors {
        let d = agj.d_a(f)?;
        let dd = agj.d_r(&d)?;
        if crate::functor::functors_isomorphic(&dd, f, &right_basis)?.is_none() {
            bad.push(format!("functor {}", f.key()));
        }
    }
    checks.push(Check::from(
        "double-dual-identity",
        bad.is_empty(),
        if bad.is_empty() { format!("{} functors", corpus.functors.len()) } else { bad.join("; ") },
    ));

    // left-side corpus: duals of corpus functors and tensor functors
    let mut left_fns: Vec<Rc<FpFunctor>> = Vec::new();
    for f in &corpus.functors {
        left_fns.push(agj.d_a(f)?);
    }
    for x in &corpus.modules {
        left_fns.push(agj.tensor_functor(x)?);
    }
    let mut bad = Vec::new();
    let mut bad_dr = Vec::new();
    let left_basis = agj.basis(Side::Left).to_vec();
    for g in &left_fns {
        let dl = agj.d_l(g)?;
        let dr = agj.d_r(g)?;
        if crate::functor::functors_isomorphic(&dl, &dr, &right_basis)?.is_none() {
            bad_dr.push(format!("functor {}", g.key()));
        }
        let dadl = agj.d_a(&dl)?;
        if crate::functor::functors_isomorphic(&dadl, g, &left_basis)?.is_none() {
            bad.push(format!("functor {}", g.key()));
        }
    }
    checks.push(Check::from(
        "dual-of-left-adjoint-identity",
        bad.is_empty(),
        if bad.is_empty() { format!("{} functors", left_fns.len()) } else { bad.join("; ") },
    ));
    checks.push(Check::from(
        "left-equals-right-adjoint",
        bad_dr.is_empty(),
        if bad_dr.is_empty() { format!("{} functors", left_fns.len()) } else { bad_dr.join("; ") },
    ));

    let mut bad = Vec::new();
    for x in &corpus.modules {
        let t = agj.tensor_functor(x)?;
        let dr = agj.d_r(&t)?;
        if crate::functor::functors_isomorphic(&dr, &yoneda(x), &right_basis)?.is_none() {
            bad.push(format!("module of size {}", x.size));
        }
    }
    checks.push(Check::from(
        "right-adjoint-of-tensor",
        bad.is_empty(),
        if bad.is_empty() { format!("{} modules", corpus.modules.len()) } else { bad.join("; ") },
    ));
    Ok(checks)
}

/// Adjunction isomorphisms, their naturality, and the counit property.
pub fn suite_adjunction(
    agj: &Agj,
    corpus: &Corpus,
    seed: u64,
    pairs: usize,
) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut group_fail = Vec::new();
    let mut transpose_fail = Vec::new();
    let mut natural_fail = Vec::new();
    let mut counit_fail = Vec::new();
    let mut done = 0usize;
    while done < pairs {
        let f = corpus.functors[rng.gen_range(0..corpus.functors.len())].clone();
        let gsrc = corpus.functors[rng.gen_range(0..corpus.functors.len())].clone();
        let g = agj.d_a(&gsrc)?;
        done += 1;
        let label = format!("pair {done}");

        let h = agj.d_r(&g)?;
        let (da_f, _) = agj.dualize(&f)?;
        let ng_l = nat_group(&f, &h)?;
        let ng_r = nat_group(&g, &da_f)?;
        if ng_l.group() != ng_r.group() {
            group_fail.push(label.clone());
            continue;
        }
        // the transpose must be a group isomorphism
        let img = ng_l
            .window
            .generators()
            .iter()
            .map(|c| {
                let alpha = ng_l.decode(c)?;
                let phi = agj.transpose_right(&f, &g, &alpha)?;
                ng_r.encode(&phi)
            })
            .collect::<Result<_>>()?;
        let transpose = AbMap::new(ng_l.window.clone(), ng_r.window.clone(), img);
        if !transpose.is_iso() {
            transpose_fail.push(label.clone());
            continue;
        }
        // naturality in F: precompose with a sampled β: F' -> F
        let fprime = corpus.functors[rng.gen_range(0..corpus.functors.len())].clone();
        if let Some(beta) = sample_transformation(&mut rng, &fprime, &f)? {
            if let Some(alpha) = sample_transformation(&mut rng, &f, &h)? {
                let lhs = agj.transpose_right(&fprime, &g, &beta.then(&alpha)?)?;
                let da_beta = agj.dualize_morphism(&beta)?;
                let rhs = agj.transpose_right(&f, &g, &alpha)?.then(&da_beta)?;
                if !lhs.equal(&rhs)? {
                    natural_fail.push(format!("{label} (source side)"));
                }
            }
        }
        // naturality in G: postcompose with a sampled σ: G -> G'
        let gsrc2 = corpus.functors[rng.gen_range(0..corpus.functors.len())].clone();
        let g2 = agj.d_a(&gsrc2)?;
        if let Some(sigma) = sample_transformation(&mut rng, &g, &g2)? {
            let h2 = agj.d_r(&g2)?;
            if let Some(alpha2) = sample_transformation(&mut rng, &f, &h2)? {
                let dr_sigma = agj.dualize_morphism(&sigma)?;
                let lhs = agj.transpose_right(&f, &g, &alpha2.then(&dr_sigma)?)?;
                let rhs = sigma.then(&agj.transpose_right(&f, &g2, &alpha2)?)?;
                if !lhs.equal(&rhs)? {
                    natural_fail.push(format!("{label} (target side)"));
                }
            }
        }
        // counit: φ -> γ_F ∘ d_l(φ) bijects Nat(d_a F, G) onto Nat(d_l G, F)
        let gamma = agj.gamma(&f)?;
        let dl_g = agj.d_l(&g)?;
        let ng_phi = nat_group(&da_f, &g)?;
        let ng_alpha = nat_group(&dl_g, &f)?;
        if ng_phi.group() != ng_alpha.group() {
            counit_fail.push(format!("{label} (groups)"));
            continue;
        }
        let img = ng_phi
            .window
            .generators()
            .iter()
            .map(|c| {
                let phi = ng_phi.decode(c)?;
                let composed = agj.d_l_morphism(&phi)?.then(&gamma)?;
                ng_alpha.encode(&composed)
            })
            .collect::<Result<_>>()?;
        let counit_map = AbMap::new(ng_phi.window.clone(), ng_alpha.window.clone(), img);
        if !counit_map.is_iso() {
            counit_fail.push(label.clone());
            continue;
        }
        // spot check: a sampled α has exactly the solved preimage
        if let Some(alpha) = sample_transformation(&mut rng, &dl_g, &f)? {
            let target = ng_alpha.encode(&alpha)?;
            match counit_map.preimage(&target) {
                Some(c) => {
                    let phi = ng_phi.decode(&c)?;
                    let back = agj.d_l_morphism(&phi)?.then(&gamma)?;
                    if !back.equal(&alpha)? {
                        counit_fail.push(format!("{label} (round trip)"));
                    }
                }
                None => counit_fail.push(format!("{label} (no preimage)")),
            }
        }
    }
    Ok(vec![
        Check::from(
            "adjunction-groups",
            group_fail.is_empty(),
            if group_fail.is_empty() { format!("{done} pairs") } else { group_fail.join("; ") },
        ),
        Check::from(
            "adjunction-transpose-iso",
            transpose_fail.is_empty(),
            if transpose_fail.is_empty() { format!("{done} pairs") } else { transpose_fail.join("; ") },
        ),
        Check::from(
            "adjunction-naturality",
            natural_fail.is_empty(),
            if natural_fail.is_empty() { format!("{done} sampled squares") } else { natural_fail.join("; ") },
        ),
        Check::from(
            "counit-uniqueness",
            counit_fail.is_empty(),
            if counit_fail.is_empty() { format!("{done} pairs") } else { counit_fail.join("; ") },
        ),
    ])
}

/// The two four-term sequences and the finite-ring degeneracy.
pub fn suite_four_term(agj: &Agj, corpus: &Corpus, sample: usize) -> Result<Vec<Check>> {
    let mut bad = Vec::new();
    let take = if sample == 0 { corpus.functors.len() } else { sample.min(corpus.functors.len()) };
    for f in corpus.functors.iter().take(take) {
        let ft = agj.four_term(f)?;
        if !(ft.gamma_exact && ft.delta_exact) {
            bad.push(format!("functor {}: sequence not exact", f.key()));
        }
        if !ft.dual_kills_ends.iter().all(|&b| b) {
            bad.push(format!("functor {}: dual does not kill an end term", f.key()));
        }
        if !ft.ends_zero.iter().all(|&b| b) {
            bad.push(format!("functor {}: an end term is nonzero", f.key()));
        }
        if !(ft.gamma_iso && ft.delta_iso) {
            bad.push(format!("functor {}: comparison maps not isos", f.key()));
        }
    }
    Ok(vec![Check::from(
        "four-term-sequences",
        bad.is_empty(),
        if bad.is_empty() { format!("{take} functors") } else { bad.join("; ") },
    )])
}

/// Naturality of gamma on sampled transformations.
pub fn suite_gamma_natural(
    agj: &Agj,
    corpus: &Corpus,
    seed: u64,
    samples: usize,
) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let mut done = 0usize;
    let mut guard = 0usize;
    while done < samples && guard < samples * 20 {
        guard += 1;
        let f = corpus.functors[rng.gen_range(0..corpus.functors.len())].clone();
        let g = corpus.functors[rng.gen_range(0..corpus.functors.len())].clone();
        let Some(alpha) = sample_transformation(&mut rng, &f, &g)? else { continue };
        done += 1;
        let gamma_f = agj.gamma(&f)?;
        let gamma_g = agj.gamma(&g)?;
        let dlda = agj.d_l_morphism(&agj.dualize_morphism(&alpha)?)?;
        let lhs = dlda.then(&gamma_g)?;
        let rhs = gamma_f.then(&alpha)?;
        if !lhs.equal(&rhs)? {
            bad.push(format!("sample {done}"));
        }
    }
    Ok(vec![Check::from(
        "gamma-naturality",
        bad.is_empty() && done == samples,
        if bad.is_empty() { format!("{done} samples") } else { bad.join("; ") },
    )])
}

/// Purity equals splitness over these rings, exhaustively on corpus monos.
pub fn suite_purity(agj: &Agj, corpus: &Corpus) -> Result<Vec<Check>> {
    let mut bad = Vec::new();
    let mut count = 0usize;
    for a in &corpus.modules {
        for b in &corpus.modules {
            let hom = hom_group(a, b)?;
            for c in hom.window.elements() {
                let i = hom.decode(&c);
                if !i.is_mono() {
                    continue;
                }
                let fac = factorize(&i)?;
                let ses = ShortExactSequence::new(i, fac.cokernel_epi)?;
                let rep = agj.purity_and_split(&ses)?;
                count += 1;
                if rep.is_pure != rep.is_split {
                    bad.push(format!(
                        "mono of {} into {}: pure={} split={}",
                        a.size, b.size, rep.is_pure, rep.is_split
                    ));
                }
            }
        }
    }
    Ok(vec![Check::from(
        "purity-equals-splitness",
        bad.is_empty(),
        if bad.is_empty() { format!("{count} short exact sequences") } else { bad.join("; ") },
    )])
}

/// Factorization oracle and the fast-path/brute-force cross checks.
pub fn suite_oracle(
    agj: &Agj,
    corpus: &Corpus,
    seed: u64,
    count: usize,
) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = agj.basis(Side::Right).to_vec();
    let mut bad = Vec::new();
    let mut done = 0usize;
    let mut guard = 0usize;
    while done < count && guard < count * 20 {
        guard += 1;
        let f = corpus.functors[rng.gen_range(0..corpus.functors.len())].clone();
        let g = corpus.functors[rng.gen_range(0..corpus.functors.len())].clone();
        let Some(alpha) = sample_transformation(&mut rng, &f, &g)? else { continue };
        done += 1;
        let fac = nat_factorize(&alpha)?;
        if verify_factorization(&alpha, &fac, &basis).is_err() {
            bad.push(format!("factorization {done}"));
        }
    }
    let mut checks = vec![Check::from(
        "factorization-pointwise",
        bad.is_empty() && done == count,
        if bad.is_empty() { format!("{done} seeded transformations") } else { bad.join("; ") },
    )];

    let mut bad = Vec::new();
    let mut pairs = 0usize;
    for m in &corpus.modules {
        for n in &corpus.modules {
            pairs += 1;
            let fast = hom_group(m, n)?.group().invariant_factors;
            let brute = hom_invariants_brute(m, n);
            if fast != brute {
                bad.push(format!("hom({}, {})", m.size, n.size));
            }
            // mirror n to the left side for the tensor pairing
            let n_left = FpModule::new(
                n.ring.clone(),
                Side::Left,
                n.gens,
                n.relations.clone(),
                INTERNAL_MODULE_BOUND,
            )?;
            let fast_t = tensor_group(m, &n_left)?.group().invariant_factors;
            let brute_t = tensor_invariants_brute(m, &n_left);
            if fast_t != brute_t {
                bad.push(format!("tensor({}, {})", m.size, n.size));
            }
        }
    }
    checks.push(Check::from(
        "hom-tensor-oracle",
        bad.is_empty(),
        if bad.is_empty() { format!("{pairs} module pairs") } else { bad.join("; ") },
    ));
    Ok(checks)
}

/// The tensor-embedding adjunction `Nat(t(X), G) = Hom(X, G(R))`.
pub fn suite_t_ev(agj: &Agj, corpus: &Corpus, seed: u64) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let mut count = 0usize;
    let mut gs: Vec<Rc<FpFunctor>> = Vec::new();
    for f in corpus.functors.iter().take(8) {
        gs.push(agj.d_a(f)?);
    }
    for x in corpus.modules.iter().take(4) {
        gs.push(agj.tensor_functor(x)?);
    }
    for x in &corpus.modules {
        let t = agj.tensor_functor(x)?;
        for g in &gs {
            count += 1;
            let lhs = nat_group(&t, g)?.group();
            let evr = agj.ev_r(g)?;
            let rhs = hom_group(x, &evr)?.group();
            if lhs != rhs {
                bad.push(format!("module {} against functor {}", x.size, g.key()));
            }
        }
    }
    let _ = rng.gen_range(0..10u8);
    Ok(vec![Check::from(
        "tensor-evaluation-adjunction",
        bad.is_empty(),
        if bad.is_empty() { format!("{count} pairs") } else { bad.join("; ") },
    )])
}

/// The kernel characterization in its decidable form: the four statements
/// are simultaneously true or false, and over these rings they all mean
/// the functor vanishes.
pub fn suite_kernel_characterization(agj: &Agj, corpus: &Corpus) -> Result<Vec<Check>> {
    let basis = agj.basis(Side::Right).to_vec();
    let mut bad = Vec::new();
    for f in &corpus.functors {
        let dual_zero = agj.dual_is_zero(f)?;
        let vanishes = crate::functor::is_zero_functor(f, &basis)?;
        let mut nat_trivial = true;
        for m in &basis {
            if !nat_group(&yoneda(m), f)?.group().is_trivial() {
                nat_trivial = false;
                break;
            }
        }
        let gamma = agj.gamma(f)?;
        let gamma_zero = gamma.normal_form()?.iter().all(|&x| x == 0);
        let all = [dual_zero, vanishes, nat_trivial, gamma_zero];
        if all.iter().any(|&b| b != all[0]) {
            bad.push(format!(
                "functor {}: dual_zero={dual_zero} vanishes={vanishes} nat={nat_trivial} gamma={gamma_zero}",
                f.key()
            ));
        }
    }
    Ok(vec![Check::from(
        "kernel-characterization",
        bad.is_empty(),
        if bad.is_empty() { format!("{} functors", corpus.functors.len()) } else { bad.join("; ") },
    )])
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub exactness_count: usize,
    pub adjunction_pairs: usize,
    pub oracle_count: usize,
    pub gamma_samples: usize,
    pub four_term_sample: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            exactness_count: 25,
            adjunction_pairs: 10,
            oracle_count: 25,
            gamma_samples: 10,
            four_term_sample: 24,
        }
    }
}

#[derive(Debug, serde::Serialize)]
pub struct SuiteReport {
    pub ring: String,
    pub maxgens: usize,
    pub seed: u64,
    pub corpus_modules: usize,
    pub corpus_functors: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Run every invariant suite over a deterministic corpus.
pub fn verify_suite(
    sup: &Rc<SupportedRing>,
    maxgens: usize,
    seed: u64,
    cfg: SuiteConfig,
) -> Result<SuiteReport> {
    let agj = Agj::new(sup.clone()).with_debug(true);
    let corpus = build_corpus(sup, maxgens)?;
    let mut checks = Vec::new();
    checks.extend(suite_yoneda(&agj, &corpus)?);
    checks.extend(suite_dual_representables(&agj, &corpus)?);
    checks.extend(suite_dual_exactness(&agj, &corpus, seed, cfg.exactness_count)?);
    checks.extend(suite_duality(&agj, &corpus)?);
    checks.extend(suite_adjunction(&agj, &corpus, seed.wrapping_add(1), cfg.adjunction_pairs)?);
    checks.extend(suite_four_term(&agj, &corpus, cfg.four_term_sample)?);
    checks.extend(suite_gamma_natural(&agj, &corpus, seed.wrapping_add(2), cfg.gamma_samples)?);
    checks.extend(suite_purity(&agj, &corpus)?);
    checks.extend(suite_oracle(&agj, &corpus, seed.wrapping_add(3), cfg.oracle_count)?);
    checks.extend(suite_t_ev(&agj, &corpus, seed.wrapping_add(4))?);
    checks.extend(suite_kernel_characterization(&agj, &corpus)?);
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport {
        ring: sup.name.clone(),
        maxgens,
        seed,
        corpus_modules: corpus.modules.len(),
        corpus_functors: corpus.functors.len(),
        checks,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::supported_ring;

    #[test]
    fn corpus_over_z4_rank_one() {
        let sup = supported_ring("Z4").unwrap();
        let corpus = build_corpus(&sup, 1).unwrap();
        // modules: 0, Z/2, Z/4
        assert_eq!(corpus.modules.len(), 3);
        let sizes: Vec<u64> = corpus.modules.iter().map(|m| m.size).collect();
        assert_eq!(sizes, vec![1, 2, 4]);
        assert!(!corpus.functors.is_empty());
    }

    #[test]
    fn corpus_is_deterministic() {
        let sup = supported_ring("Z4").unwrap();
        let a = build_corpus(&sup, 1).unwrap();
        let b = build_corpus(&sup, 1).unwrap();
        let keys_a: Vec<u64> = a.functors.iter().map(|f| f.key()).collect();
        let keys_b: Vec<u64> = b.functors.iter().map(|f| f.key()).collect();
        assert_eq!(keys_a, keys_b);
    }

    #[test]
    fn small_suite_passes_over_z4() {
        let sup = supported_ring("Z4").unwrap();
        let cfg = SuiteConfig {
            exactness_count: 5,
            adjunction_pairs: 3,
            oracle_count: 5,
            gamma_samples: 3,
            four_term_sample: 6,
        };
        let report = verify_suite(&sup, 1, 0, cfg).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.details);
        }
    }

    #[test]
    fn small_suite_passes_over_z6() {
        let sup = supported_ring("Z6").unwrap();
        let cfg = SuiteConfig {
            exactness_count: 5,
            adjunction_pairs: 2,
            oracle_count: 5,
            gamma_samples: 2,
            four_term_sample: 4,
        };
        let report = verify_suite(&sup, 1, 0, cfg).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.details);
        }
    }
}
