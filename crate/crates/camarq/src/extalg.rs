//! The finite-dimensional graded algebra on the letters of the graded
//! quiver: trivial paths (hom-degree 0), arrows (1), reversed arrows (2),
//! and one loop per vertex (3), with the explicit product table.
//!
//! The naive table (cycle products positive, pi_a pi_{a*} = t at heads,
//! pi_{b*} pi_b = -t at tails) fails associativity on every potential
//! 3-cycle, so two signs per cycle are flipped: the product
//! pi_{a_1} pi_{a_3} picks up a minus sign, and so does pi_{a_3} pi_{a_3^*}
//! for the cycle's closing arrow. Associativity is then exhaustively
//! verified in tests.

use crate::qlin::{rint, R};
use crate::surface::{ArcIdx, GradedQuiver, Letter};
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct ExtAlgebra {
    pub gq: GradedQuiver,
    /// (f, g) -> (sign, f.g) for the nonzero non-unital products, where
    /// f.g means "apply g first".
    pub table: BTreeMap<(Letter, Letter), (i64, Letter)>,
}

/// Hom-degree of a letter: the r with the letter spanning
/// Hom(S_i, S_j[r]).
pub fn hom_degree(l: Letter) -> i64 {
    match l {
        Letter::Trivial(_) => 0,
        Letter::Arrow(_) => 1,
        Letter::Dual(_) => 2,
        Letter::Loop(_) => 3,
    }
}

impl ExtAlgebra {
    pub fn new(gq: GradedQuiver) -> ExtAlgebra {
        let mut table = BTreeMap::new();
        let qp = &gq.qp;
        // Which arrows close a potential cycle (position 3).
        let mut closing = vec![false; qp.arrows.len()];
        for &[a1, a2, a3] in &qp.potential {
            table.insert(
                (Letter::Arrow(a2), Letter::Arrow(a1)),
                (1, Letter::Dual(a3)),
            );
            table.insert(
                (Letter::Arrow(a3), Letter::Arrow(a2)),
                (1, Letter::Dual(a1)),
            );
            table.insert(
                (Letter::Arrow(a1), Letter::Arrow(a3)),
                (-1, Letter::Dual(a2)),
            );
            closing[a3] = true;
        }
        for (a, arrow) in qp.arrows.iter().enumerate() {
            let head = arrow.tgt;
            let tail = arrow.src;
            let u = if closing[a] { -1 } else { 1 };
            table.insert(
                (Letter::Arrow(a), Letter::Dual(a)),
                (u, Letter::Loop(head)),
            );
            table.insert(
                (Letter::Dual(a), Letter::Arrow(a)),
                (-1, Letter::Loop(tail)),
            );
        }
        ExtAlgebra { gq, table }
    }

    pub fn source(&self, l: Letter) -> ArcIdx {
        self.gq.ends(l).0
    }

    pub fn target(&self, l: Letter) -> ArcIdx {
        self.gq.ends(l).1
    }

    /// Product f.g ("apply g first"): zero unless target(g) = source(f).
    pub fn mult(&self, f: Letter, g: Letter) -> Option<(i64, Letter)> {
        if self.target(g) != self.source(f) {
            return None;
        }
        match (f, g) {
            (Letter::Trivial(_), _) => Some((1, g)),
            (_, Letter::Trivial(_)) => Some((1, f)),
            _ => self.table.get(&(f, g)).copied(),
        }
    }

    /// Bilinear extension over the rationals.
    pub fn mult_scaled(&self, cf: &R, f: Letter, cg: &R, g: Letter) -> Option<(R, Letter)> {
        let (s, l) = self.mult(f, g)?;
        let c = cf.clone() * cg.clone() * rint(s);
        if c.is_zero() {
            None
        } else {
            Some((c, l))
        }
    }

    /// Basis of Hom(S_i, S_j[r]).
    pub fn hom_basis(&self, i: ArcIdx, j: ArcIdx, r: i64) -> Vec<Letter> {
        let mut out = Vec::new();
        if r == 0 && i == j {
            out.push(Letter::Trivial(i));
        }
        for l in self.gq.letters() {
            if matches!(l, Letter::Trivial(_)) {
                continue;
            }
            if hom_degree(l) == r && self.gq.ends(l) == (i, j) {
                out.push(l);
            }
        }
        out
    }

    pub fn basis(&self) -> Vec<Letter> {
        self.gq.letters()
    }

    pub fn vertices(&self) -> usize {
        self.gq.qp.vertices
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{
        annulus, hexagon_internal, polygon_fan, torus_one_boundary, GradedQuiver,
        QuiverWithPotential, Triangulation,
    };

    fn alg(tr: &Triangulation) -> ExtAlgebra {
        ExtAlgebra::new(GradedQuiver::new(QuiverWithPotential::of_triangulation(tr)))
    }

    fn check_laws(e: &ExtAlgebra) {
        let basis = e.basis();
        // Grading and composability of every table entry.
        for (&(f, g), &(s, h)) in &e.table {
            assert!(s == 1 || s == -1);
            assert_eq!(e.target(g), e.source(f));
            assert_eq!(hom_degree(f) + hom_degree(g), hom_degree(h));
            assert_eq!(e.source(g), e.source(h));
            assert_eq!(e.target(f), e.target(h));
        }
        // Unit laws.
        for &x in &basis {
            let (i, j) = e.gq.ends(x);
            assert_eq!(e.mult(Letter::Trivial(j), x), Some((1, x)));
            assert_eq!(e.mult(x, Letter::Trivial(i)), Some((1, x)));
        }
        // Associativity on all composable triples.
        for &x in &basis {
            for &y in &basis {
                for &z in &basis {
                    let left = e
                        .mult(x, y)
                        .and_then(|(s, xy)| e.mult(xy, z).map(|(s2, w)| (s * s2, w)));
                    let right = e
                        .mult(y, z)
                        .and_then(|(s, yz)| e.mult(x, yz).map(|(s2, w)| (s * s2, w)));
                    assert_eq!(left, right, "associativity fails on {x:?},{y:?},{z:?}");
                }
            }
        }
    }

    #[test]
    fn laws_on_seed_surfaces() {
        for tr in [
            polygon_fan(5).unwrap(),
            hexagon_internal().unwrap(),
            annulus(2, 2).unwrap(),
            annulus(1, 1).unwrap(),
            torus_one_boundary().unwrap(),
        ] {
            check_laws(&alg(&tr));
        }
    }

    #[test]
    fn a2_products_match_the_stated_table() {
        // Pentagon: one arrow a with no potential.
        let tr = polygon_fan(5).unwrap();
        let e = alg(&tr);
        let a = 0usize;
        let (src, tgt) = e.gq.ends(Letter::Arrow(a));
        assert_eq!(
            e.mult(Letter::Arrow(a), Letter::Dual(a)),
            Some((1, Letter::Loop(tgt)))
        );
        assert_eq!(
            e.mult(Letter::Dual(a), Letter::Arrow(a)),
            Some((-1, Letter::Loop(src)))
        );
        // Loops annihilate everything nontrivial.
        for l in e.basis() {
            if matches!(l, Letter::Trivial(_)) {
                continue;
            }
            assert_eq!(e.mult(Letter::Loop(src), l), None);
            assert_eq!(e.mult(l, Letter::Loop(tgt)), None);
        }
    }

    #[test]
    fn cycle_products() {
        let tr = hexagon_internal().unwrap();
        let e = alg(&tr);
        let [a1, a2, a3] = e.gq.qp.potential[0];
        assert_eq!(
            e.mult(Letter::Arrow(a2), Letter::Arrow(a1)),
            Some((1, Letter::Dual(a3)))
        );
        assert_eq!(
            e.mult(Letter::Arrow(a3), Letter::Arrow(a2)),
            Some((1, Letter::Dual(a1)))
        );
    }

    #[test]
    fn cy_pairing_dimensions() {
        for tr in [
            polygon_fan(5).unwrap(),
            hexagon_internal().unwrap(),
            annulus(2, 2).unwrap(),
            annulus(1, 1).unwrap(),
            torus_one_boundary().unwrap(),
        ] {
            let e = alg(&tr);
            let n = e.vertices();
            for i in 0..n {
                for j in 0..n {
                    for r in 0..=3i64 {
                        assert_eq!(
                            e.hom_basis(i, j, r).len(),
                            e.hom_basis(j, i, 3 - r).len()
                        );
                    }
                }
                // No loops in the underlying quiver: the endomorphism space
                // is the trivial path and the loop only.
                let total: usize = (0..=3).map(|r| e.hom_basis(i, i, r).len()).sum();
                let self_arrows = e
                    .gq
                    .qp
                    .arrows
                    .iter()
                    .filter(|a| a.src == i && a.tgt == i)
                    .count();
                assert_eq!(total, 2 + 2 * self_arrows);
            }
        }
    }

    #[test]
    fn hom_basis_examples() {
        let tr = polygon_fan(5).unwrap();
        let e = alg(&tr);
        assert_eq!(e.hom_basis(0, 0, 0), vec![Letter::Trivial(0)]);
        assert_eq!(e.hom_basis(0, 0, 3), vec![Letter::Loop(0)]);
        assert!(e.hom_basis(0, 1, 5).is_empty());
        let (src, tgt) = e.gq.ends(Letter::Arrow(0));
        assert_eq!(e.hom_basis(src, tgt, 1), vec![Letter::Arrow(0)]);
        assert_eq!(e.hom_basis(tgt, src, 2), vec![Letter::Dual(0)]);
        assert!(e.hom_basis(src, tgt, 2).is_empty());
    }
}
