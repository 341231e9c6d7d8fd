use twirlkit_core::*;
fn main() {
    let t0 = std::time::Instant::now();
    for id in 1..=19 {
        let a = build_ansatz(id, 4, 1).unwrap();
        let mut row = format!("{id:2}");
        for sub in [Subgroup::trivial(4), Subgroup::symmetric(4)] {
            let (c, fb) = synthesize_with_fallback(4, &twirl_ansatz(&a, &sub).unwrap()).unwrap();
            let c = peephole(&c);
            let e = expressibility(&c, 10000, 75, 1).unwrap();
            let q = entangling_capability(&c, 10000, 2).unwrap();
            row += &format!("  fb={fb} size={:3} D={e:8.4} Q={q:.4}", metrics_of(&c).size);
        }
        println!("{row}");
    }
    println!("haar Q {:.4}  {:?}", haar_entanglement(4, 10000, 3).unwrap(), t0.elapsed());
}
