use fpcat::agj::Agj;
use fpcat::basis::supported_ring;
use fpcat::corpus::*;
use fpcat::functor::nat_factorize;
use fpcat::module::simplify;

fn main() {
    let sup = supported_ring("T2").unwrap();
    let corpus = build_corpus(&sup, 1).unwrap();
    let agj = Agj::new(sup.clone()).with_debug(false);
    // replicate suite_dual_exactness deterministically
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    for step in 0..200 {
        let fi = rng.gen_range(0..corpus.functors.len());
        let gi = rng.gen_range(0..corpus.functors.len());
        let f = &corpus.functors[fi];
        let g = &corpus.functors[gi];
        let ng = fpcat::functor::nat_group(f, g).unwrap();
        if ng.window.is_trivial() { continue; }
        let coords: Vec<u64> = ng.window.dims().iter().map(|&d| rng.gen_range(0..d)).collect();
        let alpha = ng.decode(&coords).unwrap();
        let fac = match nat_factorize(&alpha) {
            Ok(f) => f,
            Err(e) => { eprintln!("step {step}: nat_factorize: {e}  (f={fi}, g={gi})"); 
                // try to find the inner failure
                let x = alpha.dst.x_module();
                eprintln!("  dst X gens {} size {}", x.gens, x.size);
                std::process::exit(1); }
        };
        match agj.dualize_morphism(&fac.cokernel_epi) {
            Ok(_) => {}
            Err(e) => {
                eprintln!("step {step}: dualize_morphism(coker_epi): {e}");
                let ck = &fac.cokernel;
                eprintln!("  coker defining: X gens={} size={} rels={:?}", ck.x_module().gens, ck.x_module().size, ck.x_module().relations);
                eprintln!("                  Y gens={} size={} rels={:?}", ck.y_module().gens, ck.y_module().size, ck.y_module().relations);
                // inner: dualize(ck) -> tensor_transformation -> nat_factorize -> kernel_of -> simplify
                let tau = agj.tensor_transformation(&ck.defining).unwrap();
                let cc = fpcat::module::direct_sum(tau.src.x_module(), tau.dst.y_module()).unwrap();
                eprintln!("  kernel C before quotient: gens={} size={}", cc.module.gens, cc.module.size);
                match simplify(&cc.module) {
                    Ok((s, _, _)) => eprintln!("  simplify(sum) ok -> gens {}", s.gens),
                    Err(e) => eprintln!("  simplify(sum) fails: {e}"),
                }
                std::process::exit(1);
            }
        }
    }
    eprintln!("no failure in 200 steps");
}
