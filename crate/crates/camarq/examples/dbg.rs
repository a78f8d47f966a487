use camarq::curves::*;
use camarq::surface::FlipDir;
use camarq::verify::{seed_surfaces, verify_thm2_case, flip_paths};
use std::time::Instant;

fn main() {
    for (name, tr) in seed_surfaces().into_iter().take(3) {
        let t0 = Instant::now();
        let corpus = generate_corpus(&tr, 7, 3, 10).unwrap();
        let paths = flip_paths(&tr, 2);
        let (mut ok, mut bad, mut err) = (0, 0, 0);
        for p in &paths {
            for gamma in 0..tr.num_arcs() {
                for (_, eta) in corpus.iter().take(6) {
                    match verify_thm2_case(&tr, p, gamma, eta) {
                        Ok((l, r)) => { if l == r { ok += 1 } else { bad += 1;
                            if bad <= 3 { println!("{name}: thm2 MISMATCH path {p:?} arc {gamma}: {l} vs {r}"); } } }
                        Err(e) => { err += 1; if err <= 2 { println!("{name}: thm2 ERR {e}"); } }
                    }
                }
            }
        }
        println!("{name}: thm2 {ok} ok {bad} bad {err} err ({} paths); {:?}", paths.len(), t0.elapsed());
    }
    let _ = FlipDir::Forward;
}
