use fpcat::basis::supported_ring;
use fpcat::corpus::*;
use fpcat::module::{direct_sum, factorize, simplify, FpModule};
use fpcat::functor::{nat_group, NatTransformation};
use rand::prelude::*;
use std::rc::Rc;

fn main() {
    let sup = supported_ring("T2").unwrap();
    let corpus = build_corpus(&sup, 1).unwrap();
    // exhaustive over all pairs and all alphas: find any simplify failure in the recipes
    for (fi, f) in corpus.functors.iter().enumerate() {
        for (gi, g) in corpus.functors.iter().enumerate() {
            let ng = nat_group(f, g).unwrap();
            if ng.window.order() > 256 { continue; }
            for coords in ng.window.elements() {
                let alpha = ng.decode(&coords).unwrap();
                if let Err(e) = fpcat::functor::nat_factorize(&alpha) {
                    eprintln!("pair ({fi},{gi}) coords {coords:?}: {e}");
                    // drill into components
                    let gdef = &alpha.dst.defining;
                    let sum = direct_sum(alpha.src.x_module(), alpha.dst.y_module()).unwrap();
                    let mut rels = sum.module.relations.clone();
                    for (ui, gim) in alpha.u.images.iter().zip(&gdef.images) {
                        let a = sum.inj.0.apply(ui);
                        let b = sum.inj.1.apply(&gdef.target.neg_elem(gim));
                        rels.push(sum.module.add_elems(&a, &b));
                    }
                    let c_mod = FpModule::new(sum.module.ring.clone(), sum.module.side, sum.module.gens, rels, u64::MAX).unwrap();
                    eprintln!("C: gens={} size={} rels={:?}", c_mod.gens, c_mod.size, c_mod.relations);
                    if let Err(e2) = simplify(&c_mod) { eprintln!("  simplify(C): {e2}"); }
                    let g_fac = factorize(gdef).unwrap();
                    let sum_d = direct_sum(alpha.src.y_module(), &g_fac.cokernel).unwrap();
                    eprintln!("D: gens={} size={} rels={:?}", sum_d.module.gens, sum_d.module.size, sum_d.module.relations);
                    if let Err(e2) = simplify(&sum_d.module) { eprintln!("  simplify(D): {e2}"); }
                    let s2 = direct_sum(alpha.src.x_module(), alpha.dst.y_module()).unwrap();
                    if let Err(e2) = simplify(&s2.module) { eprintln!("  simplify(ck tgt): {e2}"); }
                    if let Err(e2) = simplify(alpha.dst.x_module()) { eprintln!("  simplify(ck src): {e2}"); }
                    let _ : Rc<FpModule> = c_mod;
                    let _ : &NatTransformation = &alpha;
                    std::process::exit(1);
                }
            }
        }
    }
    eprintln!("no failures exhaustively!?");
}
