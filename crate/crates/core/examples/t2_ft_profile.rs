use fpcat::agj::Agj;
use fpcat::basis::supported_ring;
use fpcat::corpus::build_corpus;
use fpcat::functor::{is_zero_functor, nat_factorize};
use fpcat::module::Side;

fn main() {
    let sup = supported_ring("T2").unwrap();
    let corpus = build_corpus(&sup, 1).unwrap();
    let agj = Agj::new(sup.clone()).with_debug(false);
    for f in corpus.functors.iter().skip(30).take(3) {
        let t0 = std::time::Instant::now();
        let gamma = agj.gamma(f).unwrap();
        eprintln!("gamma: {:?}", t0.elapsed());
        let t = std::time::Instant::now();
        let gfac = nat_factorize(&gamma).unwrap();
        eprintln!("  nat_factorize(gamma): {:?} (ker gens {}/{}; coker gens {}/{})", t.elapsed(),
            gfac.kernel.x_module().gens, gfac.kernel.y_module().gens,
            gfac.cokernel.x_module().gens, gfac.cokernel.y_module().gens);
        let t = std::time::Instant::now();
        let delta = agj.delta(f).unwrap();
        eprintln!("  delta: {:?}", t.elapsed());
        let t = std::time::Instant::now();
        let dfac = nat_factorize(&delta).unwrap();
        eprintln!("  nat_factorize(delta): {:?} (ker {}/{}; coker {}/{})", t.elapsed(),
            dfac.kernel.x_module().gens, dfac.kernel.y_module().gens,
            dfac.cokernel.x_module().gens, dfac.cokernel.y_module().gens);
        for (i, end) in [&gfac.kernel, &gfac.cokernel, &dfac.kernel, &dfac.cokernel].iter().enumerate() {
            let t = std::time::Instant::now();
            let (d, _) = agj.dualize(end).unwrap();
            let z = is_zero_functor(&d, agj.basis(Side::Left)).unwrap();
            eprintln!("  dualize(end {i}): {:?} zero={z} (end gens {}/{})", t.elapsed(), end.x_module().gens, end.y_module().gens);
        }
        let t = std::time::Instant::now();
        let _ = fpcat::agj::five_term_exact(&gamma, &gfac, agj.basis(Side::Right)).unwrap();
        let _ = fpcat::agj::five_term_exact(&delta, &dfac, agj.basis(Side::Right)).unwrap();
        eprintln!("  five_term x2: {:?}", t.elapsed());
        eprintln!("functor total {:?}", t0.elapsed());
    }
}
