use fpcat::basis::supported_ring;
use fpcat::module::{hom_group, FpModule};

fn main() {
    eprintln!("start");
    let sup = supported_ring("T2").unwrap();
    eprintln!("ring ok");
    let free = FpModule::free(sup.ring.clone(), fpcat::Side::Right, 1, 4096).unwrap();
    eprintln!("free ok, elements: {}", free.elements().len());
    for (i, m) in sup.basis_right.iter().enumerate() {
        let t = std::time::Instant::now();
        let h = hom_group(m, m).unwrap();
        eprintln!("end({i}) order {} in {:?}", h.window.order(), t.elapsed());
    }
    let t = std::time::Instant::now();
    let corpus = fpcat::corpus::build_corpus(&sup, 1).unwrap();
    eprintln!("corpus {} modules {} functors in {:?}", corpus.modules.len(), corpus.functors.len(), t.elapsed());
}
