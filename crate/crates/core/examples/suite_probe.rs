use fpcat::basis::supported_ring;
use fpcat::corpus::{build_corpus, verify_suite, SuiteConfig};

fn main() {
    for name in ["Z4", "Z6", "F2x2", "T2"] {
        let t0 = std::time::Instant::now();
        let sup = supported_ring(name).unwrap();
        let corpus = build_corpus(&sup, 1).unwrap();
        let cfg = SuiteConfig { exactness_count: 10, adjunction_pairs: 5, oracle_count: 10, gamma_samples: 5, four_term_sample: 10 };
        match verify_suite(&sup, 1, 0, cfg) {
            Ok(rep) => {
                println!("{name}: modules={} functors={} passed={} in {:?}", corpus.modules.len(), corpus.functors.len(), rep.passed, t0.elapsed());
                for c in rep.checks.iter().filter(|c| !c.passed) {
                    println!("   FAIL {}: {}", c.name, c.details);
                }
            }
            Err(e) => println!("{name}: ERROR {e} after {:?}", t0.elapsed()),
        }
    }
}
