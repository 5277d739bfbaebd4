use fpcat::basis::supported_ring;
use fpcat::corpus::*;
use fpcat::module::simplify;
use fpcat::functor::nat_group;
use rand::prelude::*;

fn main() {
    let sup = supported_ring("T2").unwrap();
    let corpus = build_corpus(&sup, 1).unwrap();
    let f = &corpus.functors[28];
    let g = &corpus.functors[55];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    for _ in 0..5 { let _ : usize = rng.gen_range(0..corpus.functors.len()); }
    // recompute the same alpha: steps 0..4 consumed differing rng amounts; brute force all coords instead
    let ng = nat_group(f, g).unwrap();
    for coords in ng.window.elements() {
        let alpha = ng.decode(&coords).unwrap();
        // replicate kernel_of/cokernel_of inputs
        let gdef = &alpha.dst.defining;
        let sum = fpcat::module::direct_sum(alpha.src.x_module(), alpha.dst.y_module()).unwrap();
        let mut rels = sum.module.relations.clone();
        for (ui, gi) in alpha.u.images.iter().zip(&gdef.images) {
            let a = sum.inj.0.apply(ui);
            let b = sum.inj.1.apply(&gdef.target.neg_elem(gi));
            rels.push(sum.module.add_elems(&a, &b));
        }
        let c_mod = fpcat::module::FpModule::new(
            sum.module.ring.clone(), sum.module.side, sum.module.gens, rels, u64::MAX).unwrap();
        match simplify(&c_mod) {
            Ok(_) => {}
            Err(e) => {
                eprintln!("simplify(C) fails: {e}");
                eprintln!("C: gens={} size={} relations={:?}", c_mod.gens, c_mod.size, c_mod.relations);
                std::process::exit(1);
            }
        }
    }
    eprintln!("no C failure; trying cokernel side / D side...");
}
