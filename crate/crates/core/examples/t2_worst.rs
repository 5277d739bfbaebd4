use fpcat::agj::Agj;
use fpcat::basis::supported_ring;
use fpcat::corpus::build_corpus;

fn main() {
    let sup = supported_ring("T2").unwrap();
    let corpus = build_corpus(&sup, 1).unwrap();
    let agj = Agj::new(sup.clone()).with_debug(false);
    let mut times: Vec<(u128, usize)> = Vec::new();
    for (i, f) in corpus.functors.iter().enumerate() {
        let t0 = std::time::Instant::now();
        let _ = agj.four_term(f).unwrap();
        times.push((t0.elapsed().as_millis(), i));
    }
    times.sort_unstable();
    times.reverse();
    for (ms, i) in times.iter().take(5) {
        let f = &corpus.functors[*i];
        eprintln!("functor {i}: {ms} ms  (X: gens {} size {}, Y: gens {} size {})",
            f.x_module().gens, f.x_module().size, f.y_module().gens, f.y_module().size);
    }
    let total: u128 = times.iter().map(|t| t.0).sum();
    eprintln!("total {total} ms over {} functors", corpus.functors.len());
    // drill into the worst one
    let worst = times[0].1;
    let f = &corpus.functors[worst];
    let t = std::time::Instant::now(); let gamma = agj.gamma(f).unwrap(); eprintln!("gamma {:?}", t.elapsed());
    let t = std::time::Instant::now(); let gf = fpcat::functor::nat_factorize(&gamma).unwrap(); eprintln!("fact(gamma) {:?}", t.elapsed());
    let t = std::time::Instant::now(); let delta = agj.delta(f).unwrap(); eprintln!("delta {:?}", t.elapsed());
    let t = std::time::Instant::now(); let df = fpcat::functor::nat_factorize(&delta).unwrap(); eprintln!("fact(delta) {:?}", t.elapsed());
    for (i, end) in [&gf.kernel, &gf.cokernel, &df.kernel, &df.cokernel].iter().enumerate() {
        let t = std::time::Instant::now();
        let z = fpcat::functor::is_zero_functor(end, agj.basis(fpcat::Side::Right)).unwrap();
        let t1 = t.elapsed();
        let t = std::time::Instant::now();
        let dz = agj.dual_is_zero(end).unwrap();
        eprintln!("end {i}: zero({z}) {:?}; dual_zero({dz}) {:?} gens {}/{}", t1, t.elapsed(), end.x_module().gens, end.y_module().gens);
    }
}
