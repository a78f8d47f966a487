//! Theorem harnesses: the closed-closed dimension formula, the open-closed
//! formula through containing triangulations, tilting transport across
//! flips, twist commutation, and the report plumbing.

use crate::cells::{dual_arc, Curve};
use crate::curves::{
    apply_braid_word, braid_twist, generate_corpus, intersection_number, transport, BraidWord,
};
use crate::extalg::ExtAlgebra;
use crate::strings::{
    dg_module_of_string, hom_dims, iso_up_to_shift, reduce_dg_module, spherical_twist,
    spherical_twist_by, string_of_arc, DgModule,
};
use crate::surface::{ArcIdx, FlipDir, FlipMaps, GradedQuiver, QuiverWithPotential, Triangulation};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case: String,
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub surface: String,
    pub seed: u64,
    pub cases: Vec<CaseRecord>,
    pub passed: usize,
    pub failed: usize,
}

impl VerificationReport {
    pub fn new(surface: &str, seed: u64) -> Self {
        VerificationReport {
            surface: surface.to_string(),
            seed,
            cases: vec![],
            passed: 0,
            failed: 0,
        }
    }

    pub fn push(&mut self, case: String, lhs: i64, rhs: i64) {
        let pass = lhs == rhs;
        if pass {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        self.cases.push(CaseRecord {
            case,
            lhs,
            rhs,
            pass,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

pub fn algebra_of(tr: &Triangulation) -> ExtAlgebra {
    ExtAlgebra::new(GradedQuiver::new(QuiverWithPotential::of_triangulation(tr)))
}

pub fn module_of_arc(tr: &Triangulation, alg: &ExtAlgebra, arc: &Curve) -> Result<DgModule> {
    let w = string_of_arc(tr, alg, arc)?;
    dg_module_of_string(alg, &w)
}

/// Theorem-1 harness: total Hom dimension vs 2 Int on ordered corpus pairs.
pub fn verify_thm1(
    tr: &Triangulation,
    surface: &str,
    seed: u64,
    corpus: &[(BraidWord, Curve)],
    max_pairs: usize,
) -> Result<VerificationReport> {
    let alg = algebra_of(tr);
    let mut report = VerificationReport::new(surface, seed);
    let modules: Vec<DgModule> = corpus
        .iter()
        .map(|(_, c)| module_of_arc(tr, &alg, c))
        .collect::<Result<_>>()?;
    let mut pairs = 0usize;
    'outer: for (i, (_, a)) in corpus.iter().enumerate() {
        for (j, (_, b)) in corpus.iter().enumerate() {
            if pairs >= max_pairs {
                break 'outer;
            }
            pairs += 1;
            let (_, total) = hom_dims(&alg, &modules[i], &modules[j]);
            let int = intersection_number(tr, a, b)?;
            report.push(format!("thm1[{i},{j}]"), total as i64, int.doubled());
        }
    }
    Ok(report)
}

/// Theorem-2 harness for one open arc of a triangulation reached by flips:
/// letter count of the transported closed arc vs the intersection number
/// computed back on the seed.
pub fn verify_thm2_case(
    seed_tr: &Triangulation,
    path: &[(ArcIdx, FlipDir)],
    open_arc_idx: ArcIdx,
    eta: &Curve,
) -> Result<(i64, i64)> {
    // Forward: transport eta along the path, read its word, count the
    // flipped arc's vertex.
    let mut cur_tr = seed_tr.clone();
    let mut cur_eta = eta.clone();
    let mut maps_list: Vec<(Triangulation, FlipMaps)> = Vec::new();
    for &(a, d) in path {
        let (next, maps) = cur_tr.flip(a, d)?;
        cur_eta = transport(&cur_tr, &maps, &next, &cur_eta)?;
        maps_list.push((cur_tr.clone(), maps));
        cur_tr = next;
    }
    let alg = algebra_of(&cur_tr);
    let w = string_of_arc(&cur_tr, &alg, &cur_eta)?;
    let lhs = w
        .vertices
        .iter()
        .filter(|&&v| v == open_arc_idx)
        .count() as i64;
    // Backward: carry the open arc to the seed and intersect there.
    let mut gamma = crate::cells::edge_arc(&cur_tr, open_arc_idx)?;
    for (prev_tr, maps) in maps_list.iter().rev() {
        let inv_dir = match maps.dir {
            FlipDir::Forward => FlipDir::Backward,
            FlipDir::Backward => FlipDir::Forward,
        };
        // Flip back and transport.
        let here = {
            let (t, _) = prev_tr.flip(maps.arc, maps.dir)?;
            t
        };
        let (back, inv_maps) = here.flip(maps.arc, inv_dir)?;
        // `back` must equal prev_tr structurally.
        gamma = transport(&here, &inv_maps, &back, &gamma)?;
        let _ = back;
    }
    let rhs = intersection_number(seed_tr, &gamma, eta)?.doubled() / 2;
    Ok((lhs, rhs))
}

/// All single and multi flip paths up to `budget` flips (forward and
/// backward), pruned to distinct journal signatures.
pub fn flip_paths(tr: &Triangulation, budget: usize) -> Vec<Vec<(ArcIdx, FlipDir)>> {
    let mut out: Vec<Vec<(ArcIdx, FlipDir)>> = vec![vec![]];
    let mut frontier: Vec<Vec<(ArcIdx, FlipDir)>> = vec![vec![]];
    for _ in 0..budget {
        let mut next = Vec::new();
        for p in &frontier {
            for a in 0..tr.num_arcs() {
                for d in [FlipDir::Forward, FlipDir::Backward] {
                    // Skip immediately undoing the previous flip.
                    if let Some(&(pa, pd)) = p.last() {
                        if pa == a && pd != d {
                            continue;
                        }
                    }
                    let mut q = p.clone();
                    q.push((a, d));
                    next.push(q);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Tilting transport across a single forward flip at arc j: the string
/// module over the old algebra representing the new simple S_i'.
pub fn tilting_transport(tr: &Triangulation, j: ArcIdx) -> Result<Vec<DgModule>> {
    let alg = algebra_of(tr);
    let qp = &alg.gq.qp;
    let mut out = Vec::new();
    for i in 0..tr.num_arcs() {
        if i == j {
            out.push(DgModule::simple(j).shifted(1));
        } else if qp.arrows.iter().any(|a| a.src == i && a.tgt == j) {
            let m = spherical_twist(&alg, j, -1, &DgModule::simple(i))?;
            out.push(m);
        } else {
            out.push(DgModule::simple(i));
        }
    }
    Ok(out)
}

/// Twist commutation: the spherical-twist word applied to the string of an
/// arc matches the string of the braid-twisted arc, up to shift.
pub fn verify_twist_commutation(
    tr: &Triangulation,
    word: &[(ArcIdx, i8)],
    arc: &Curve,
) -> Result<bool> {
    let alg = algebra_of(tr);
    let x = module_of_arc(tr, &alg, arc)?;
    let mut lhs = reduce_dg_module(&alg, &x)?;
    for &(i, eps) in word {
        lhs = spherical_twist(&alg, i, eps, &lhs)?;
    }
    let twisted = apply_braid_word(tr, word, arc)?;
    let rhs = reduce_dg_module(&alg, &module_of_arc(tr, &alg, &twisted)?)?;
    Ok(iso_up_to_shift(&alg, &lhs, &rhs).is_some())
}

/// The seed-surface corpus used by the harnesses.
pub fn corpus_for(
    tr: &Triangulation,
    seed: u64,
    max_len: usize,
    count: usize,
) -> Result<Vec<(BraidWord, Curve)>> {
    generate_corpus(tr, seed, max_len, count)
}

/// Transport coherence across one flip: the string of the transported arc
/// in the flipped triangulation matches the twist-functor image computed
/// over the flipped algebra, for corpus arcs eta = word(t_base).
pub fn verify_transport_coherence(
    tr: &Triangulation,
    flip_arc: ArcIdx,
    dir: FlipDir,
    base: ArcIdx,
    word: &BraidWord,
) -> Result<bool> {
    let (tr2, maps) = tr.flip(flip_arc, dir)?;
    let alg2 = algebra_of(&tr2);
    let eta = apply_braid_word(tr, word, &dual_arc(tr, base)?)?;
    let direct = {
        let moved = transport(tr, &maps, &tr2, &eta)?;
        reduce_dg_module(&alg2, &module_of_arc(&tr2, &alg2, &moved)?)?
    };
    // Twist route: transport the base dual and the generators, then apply
    // the spherical twists over the flipped algebra.
    let base_moved = transport(tr, &maps, &tr2, &dual_arc(tr, base)?)?;
    let mut acc = reduce_dg_module(&alg2, &module_of_arc(&tr2, &alg2, &base_moved)?)?;
    for &(i, eps) in word.iter().rev() {
        let gen_moved = transport(tr, &maps, &tr2, &dual_arc(tr, i)?)?;
        let gen_mod = reduce_dg_module(&alg2, &module_of_arc(&tr2, &alg2, &gen_moved)?)?;
        acc = spherical_twist_by(&alg2, &gen_mod, eps, &acc)?;
    }
    Ok(iso_up_to_shift(&alg2, &direct, &acc).is_some())
}

/// Runs braid twists and checks the mapping-class invariance of Int.
pub fn twist_invariance(
    tr: &Triangulation,
    gen: ArcIdx,
    eps: i8,
    a: &Curve,
    b: &Curve,
) -> Result<bool> {
    let ia = intersection_number(tr, a, b)?;
    let ta = braid_twist(tr, gen, eps, a)?;
    let tb = braid_twist(tr, gen, eps, b)?;
    let ib = intersection_number(tr, &ta, &tb)?;
    Ok(ia == ib)
}

pub fn seed_surfaces() -> Vec<(&'static str, Triangulation)> {
    vec![
        ("pentagon", crate::surface::polygon_fan(5).unwrap()),
        ("hexagon-internal", crate::surface::hexagon_internal().unwrap()),
        ("annulus-2-2", crate::surface::annulus(2, 2).unwrap()),
        ("annulus-1-1", crate::surface::annulus(1, 1).unwrap()),
        ("torus-1-1", crate::surface::torus_one_boundary().unwrap()),
    ]
}

/// Exit-code style error for CLI wiring.
pub fn config_err(msg: &str) -> Error {
    Error::ConfigError(msg.to_string())
}
