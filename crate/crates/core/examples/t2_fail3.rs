use fpcat::basis::supported_ring;
use fpcat::corpus::*;
use fpcat::module::{direct_sum, factorize, simplify};
use fpcat::functor::nat_group;

fn main() {
    let sup = supported_ring("T2").unwrap();
    let corpus = build_corpus(&sup, 1).unwrap();
    let f = &corpus.functors[28];
    let g = &corpus.functors[55];
    let ng = nat_group(f, g).unwrap();
    for coords in ng.window.elements() {
        let alpha = ng.decode(&coords).unwrap();
        let gdef = &alpha.dst.defining;
        // cokernel_of sums
        let sum = direct_sum(alpha.src.x_module(), alpha.dst.y_module()).unwrap();
        for (tag, m) in [("ck src", alpha.dst.x_module().clone()), ("ck tgt", sum.module.clone())] {
            if let Err(e) = simplify(&m) {
                eprintln!("{tag} fails: {e}\n gens={} size={} rels={:?} big?", m.gens, m.size, m.relations);
                std::process::exit(1);
            }
        }
        // kernel_of D side
        let g_fac = factorize(gdef).unwrap();
        let sum_d = direct_sum(alpha.src.y_module(), &g_fac.cokernel).unwrap();
        if let Err(e) = simplify(&sum_d.module) {
            eprintln!("D fails: {e}\n gens={} size={} rels={:?}", sum_d.module.gens, sum_d.module.size, sum_d.module.relations);
            std::process::exit(1);
        }
    }
    eprintln!("all component simplifies pass for pair (28,55); failure must be elsewhere");
}
