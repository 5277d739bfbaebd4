use fpcat::agj::Agj;
use fpcat::basis::supported_ring;
use fpcat::corpus::*;

fn main() {
    let sup = supported_ring("T2").unwrap();
    let t0 = std::time::Instant::now();
    let corpus = build_corpus(&sup, 1).unwrap();
    eprintln!("corpus: {} modules, {} functors in {:?}", corpus.modules.len(), corpus.functors.len(), t0.elapsed());
    let agj = Agj::new(sup.clone()).with_debug(true);
    macro_rules! run {
        ($name:expr, $e:expr) => {{
            let t = std::time::Instant::now();
            match $e {
                Ok(checks) => {
                    let ok = checks.iter().all(|c: &Check| c.passed);
                    eprintln!("{}: passed={} in {:?}", $name, ok, t.elapsed());
                    for c in checks.iter().filter(|c| !c.passed) { eprintln!("  FAIL {}: {}", c.name, c.details); }
                }
                Err(e) => eprintln!("{}: ERROR {} in {:?}", $name, e, t.elapsed()),
            }
        }};
    }
    run!("yoneda", suite_yoneda(&agj, &corpus));
    run!("dual_repr", suite_dual_representables(&agj, &corpus));
    run!("exactness", suite_dual_exactness(&agj, &corpus, 0, 10));
    run!("duality", suite_duality(&agj, &corpus));
    run!("adjunction", suite_adjunction(&agj, &corpus, 1, 5));
    run!("fourterm", suite_four_term(&agj, &corpus, 0));
    run!("gamma_nat", suite_gamma_natural(&agj, &corpus, 2, 5));
    run!("purity", suite_purity(&agj, &corpus));
    run!("oracle", suite_oracle(&agj, &corpus, 3, 10));
    run!("t_ev", suite_t_ev(&agj, &corpus, 4));
    run!("kernel_char", suite_kernel_characterization(&agj, &corpus));
    eprintln!("total {:?}", t0.elapsed());
}
