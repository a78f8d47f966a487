//! Refined cell complex of a triangulation and curve words on it.
//!
//! Each triangle with corners c0,c1,c2 (clockwise) and decoration Z is cut
//! along the three spokes Z-c_k into three cells. Cell (t, k) contains edge
//! slot k and has local vertices CornerA = corner_k, CornerB = corner_{k+1},
//! Deco = Z. All special points of the surface are vertices of this complex,
//! so a curve is just a vertex-anchored crossing word, and isotopy is
//! generated by digon removal and germ rotation.

use crate::surface::{EdgeKind, TriId, Triangulation};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub tri: TriId,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SideId {
    /// An internal edge of the triangulation.
    Edge(usize),
    /// Spoke from the decoration of `0` to its corner `1`; separates cells
    /// (t, c-1) and (t, c).
    Spoke(TriId, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CellVert {
    /// corner_k of the triangle: start of edge slot k.
    CornerA,
    /// corner_{k+1}: end of edge slot k.
    CornerB,
    /// The decoration.
    Deco,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Germ {
    pub cell: Cell,
    pub vert: CellVert,
}

/// Global identity of an anchor vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Anchor {
    Deco(TriId),
    Marked(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Curve {
    pub start: Germ,
    pub steps: Vec<SideId>,
    pub end: Germ,
}

impl Triangulation {
    pub fn anchor_of(&self, g: Germ) -> Anchor {
        match g.vert {
            CellVert::Deco => Anchor::Deco(g.cell.tri),
            CellVert::CornerA => Anchor::Marked(self.corner_marked[g.cell.tri][g.cell.k]),
            CellVert::CornerB => {
                Anchor::Marked(self.corner_marked[g.cell.tri][(g.cell.k + 1) % 3])
            }
        }
    }

    /// The three sides of a cell: its edge, then the spoke through CornerB,
    /// then the spoke through CornerA.
    pub fn cell_sides(&self, c: Cell) -> [SideId; 3] {
        [
            SideId::Edge(self.tris[c.tri][c.k]),
            SideId::Spoke(c.tri, (c.k + 1) % 3),
            SideId::Spoke(c.tri, c.k),
        ]
    }

    pub fn side_bounds(&self, s: SideId, c: Cell) -> bool {
        self.cell_sides(c).contains(&s)
    }

    /// The side of `c` not containing the vertex.
    pub fn opposite_side(&self, c: Cell, v: CellVert) -> SideId {
        match v {
            CellVert::Deco => SideId::Edge(self.tris[c.tri][c.k]),
            CellVert::CornerA => SideId::Spoke(c.tri, (c.k + 1) % 3),
            CellVert::CornerB => SideId::Spoke(c.tri, c.k),
        }
    }

    /// The vertex of `c` not on side `s`.
    pub fn opposite_vert(&self, c: Cell, s: SideId) -> CellVert {
        let sides = self.cell_sides(c);
        if s == sides[0] {
            CellVert::Deco
        } else if s == sides[1] {
            CellVert::CornerA
        } else {
            debug_assert_eq!(s, sides[2]);
            CellVert::CornerB
        }
    }

    /// The two cells bounded by a side. Boundary edges bound one cell and are
    /// never crossed by curves, so they are rejected here.
    pub fn side_cells(&self, s: SideId) -> Result<[Cell; 2]> {
        match s {
            SideId::Edge(e) => {
                let edge = &self.edges[e];
                if edge.kind != EdgeKind::Internal {
                    return Err(Error::Invalid(format!("boundary edge {e} crossed")));
                }
                let (t1, s1) = edge.sides[0];
                let (t2, s2) = edge.sides[1];
                Ok([Cell { tri: t1, k: s1 }, Cell { tri: t2, k: s2 }])
            }
            SideId::Spoke(t, c) => Ok([
                Cell {
                    tri: t,
                    k: (c + 2) % 3,
                },
                Cell { tri: t, k: c },
            ]),
        }
    }

    pub fn other_cell(&self, s: SideId, c: Cell) -> Result<Cell> {
        let [a, b] = self.side_cells(s)?;
        if a == c {
            Ok(b)
        } else if b == c {
            Ok(a)
        } else {
            Err(Error::Invalid(format!("side {s:?} does not bound {c:?}")))
        }
    }

    /// Carries a vertex of `from` across side `s` into the other cell,
    /// returning its local name there. The vertex must lie on `s`.
    pub fn vert_across(&self, s: SideId, from: Cell, v: CellVert) -> Result<(Cell, CellVert)> {
        let to = self.other_cell(s, from)?;
        let out = match s {
            SideId::Edge(_) => match v {
                // Glued edges reverse direction: corner_k <-> corner_{k'+1}.
                CellVert::CornerA => CellVert::CornerB,
                CellVert::CornerB => CellVert::CornerA,
                CellVert::Deco => return Err(Error::Invalid("deco not on edge".into())),
            },
            SideId::Spoke(t, c) => match v {
                CellVert::Deco => CellVert::Deco,
                _ => {
                    // The corner on spoke (t,c) is corner_c: CornerB of
                    // (t, c-1) and CornerA of (t, c).
                    if from == (Cell { tri: t, k: c }) {
                        debug_assert_eq!(v, CellVert::CornerA);
                        CellVert::CornerB
                    } else {
                        debug_assert_eq!(v, CellVert::CornerB);
                        CellVert::CornerA
                    }
                }
            },
        };
        Ok((to, out))
    }

    /// Is vertex `v` of cell `c` on side `s` of that cell?
    pub fn vert_on_side(&self, c: Cell, v: CellVert, s: SideId) -> bool {
        self.opposite_side(c, v) != s && self.side_bounds(s, c)
    }
}

impl Curve {
    pub fn new(start: Germ, steps: Vec<SideId>, end: Germ) -> Self {
        Curve { start, steps, end }
    }

    pub fn reversed(&self) -> Curve {
        Curve {
            start: self.end,
            steps: self.steps.iter().rev().cloned().collect(),
            end: self.start,
        }
    }

    /// Cell sequence along the curve: length steps + 1.
    pub fn cells(&self, tr: &Triangulation) -> Result<Vec<Cell>> {
        let mut out = vec![self.start.cell];
        let mut cur = self.start.cell;
        for &s in &self.steps {
            if !tr.side_bounds(s, cur) {
                return Err(Error::Invalid(format!(
                    "step {s:?} does not bound cell {cur:?}"
                )));
            }
            cur = tr.other_cell(s, cur)?;
            out.push(cur);
        }
        if cur != self.end.cell {
            return Err(Error::Invalid("end germ cell mismatch".into()));
        }
        Ok(out)
    }

    pub fn validate(&self, tr: &Triangulation) -> Result<()> {
        self.cells(tr)?;
        Ok(())
    }

    /// Normal form: removes digons (consecutive crossings of one side) and
    /// rotates anchored germs off anchor-incident sides, to a fixpoint.
    pub fn reduced(&self, tr: &Triangulation) -> Result<Curve> {
        let mut cur = self.clone();
        cur.validate(tr)?;
        loop {
            let mut changed = false;
            // Germ rotation at the start.
            while let Some(&s0) = cur.steps.first() {
                if tr.opposite_side(cur.start.cell, cur.start.vert) == s0 {
                    break;
                }
                let (cell, vert) = tr.vert_across(s0, cur.start.cell, cur.start.vert)?;
                cur.start = Germ { cell, vert };
                cur.steps.remove(0);
                changed = true;
            }
            // Germ rotation at the end.
            while let Some(&sl) = cur.steps.last() {
                if tr.opposite_side(cur.end.cell, cur.end.vert) == sl {
                    break;
                }
                let (cell, vert) = tr.vert_across(sl, cur.end.cell, cur.end.vert)?;
                cur.end = Germ { cell, vert };
                cur.steps.pop();
                changed = true;
            }
            // Digons.
            let mut i = 0;
            while i + 1 < cur.steps.len() {
                if cur.steps[i] == cur.steps[i + 1] {
                    cur.steps.remove(i);
                    cur.steps.remove(i);
                    changed = true;
                    i = i.saturating_sub(1);
                } else {
                    i += 1;
                }
            }
            if !changed {
                break;
            }
        }
        // Canonical side for crossing-free corner-to-corner curves (isotopic
        // to a triangulation edge): represent on the side of edge.sides[0].
        if cur.steps.is_empty()
            && cur.start.vert != CellVert::Deco
            && cur.end.vert != CellVert::Deco
        {
            let c = cur.start.cell;
            if cur.end.cell != c || cur.start.vert == cur.end.vert {
                return Err(Error::Invalid("degenerate cornered curve".into()));
            }
            let e = tr.tris[c.tri][c.k];
            let (t0, s0) = tr.edges[e].sides[0];
            let canon = Cell { tri: t0, k: s0 };
            if c != canon {
                let flip = |v: CellVert| match v {
                    CellVert::CornerA => CellVert::CornerB,
                    CellVert::CornerB => CellVert::CornerA,
                    CellVert::Deco => CellVert::Deco,
                };
                cur.start = Germ {
                    cell: canon,
                    vert: flip(cur.start.vert),
                };
                cur.end = Germ {
                    cell: canon,
                    vert: flip(cur.end.vert),
                };
            }
        }
        cur.validate(tr)?;
        if cur.steps.is_empty() && cur.start == cur.end {
            return Err(Error::NotNormal("curve is contractible".into()));
        }
        Ok(cur)
    }

    /// True if this is a crossing-free curve parallel to the internal edge of
    /// its cell; returns that edge.
    pub fn edge_parallel(&self, tr: &Triangulation) -> Option<usize> {
        if self.steps.is_empty()
            && self.start.vert != CellVert::Deco
            && self.end.vert != CellVert::Deco
        {
            Some(tr.tris[self.start.cell.tri][self.start.cell.k])
        } else {
            None
        }
    }

    /// Canonical form for deduplication: the lexicographically smaller of the
    /// curve and its reversal.
    pub fn canonical(&self) -> Curve {
        let r = self.reversed();
        if *self <= r {
            self.clone()
        } else {
            r
        }
    }

    /// Number of crossings of internal edge `e`.
    pub fn edge_crossings(&self, e: usize) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, SideId::Edge(x) if *x == e))
            .count()
    }

    pub fn is_closed(&self, _tr: &Triangulation) -> bool {
        self.start.vert == CellVert::Deco && self.end.vert == CellVert::Deco
    }
}

/// The dual arc t_i of an internal arc: joins the decorations of the two
/// adjacent triangles, crossing the arc once.
pub fn dual_arc(tr: &Triangulation, arc: usize) -> Result<Curve> {
    let e = *tr
        .arcs
        .get(arc)
        .ok_or(Error::NotInternal(arc))?;
    let (t1, s1) = tr.edges[e].sides[0];
    let (t2, s2) = tr.edges[e].sides[1];
    let c = Curve {
        start: Germ {
            cell: Cell { tri: t1, k: s1 },
            vert: CellVert::Deco,
        },
        steps: vec![SideId::Edge(e)],
        end: Germ {
            cell: Cell { tri: t2, k: s2 },
            vert: CellVert::Deco,
        },
    };
    c.validate(tr)?;
    Ok(c)
}

/// An open arc of the triangulation itself, as a crossing-free curve on the
/// canonical side.
pub fn edge_arc(tr: &Triangulation, arc: usize) -> Result<Curve> {
    let e = *tr
        .arcs
        .get(arc)
        .ok_or(Error::NotInternal(arc))?;
    let (t1, s1) = tr.edges[e].sides[0];
    let cell = Cell { tri: t1, k: s1 };
    let c = Curve {
        start: Germ {
            cell,
            vert: CellVert::CornerA,
        },
        steps: vec![],
        end: Germ {
            cell,
            vert: CellVert::CornerB,
        },
    };
    c.validate(tr)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::polygon_fan;

    #[test]
    fn dual_arcs_are_reduced() {
        let tr = polygon_fan(5).unwrap();
        for a in 0..tr.num_arcs() {
            let d = dual_arc(&tr, a).unwrap();
            assert_eq!(d.reduced(&tr).unwrap(), d);
            assert_eq!(d.edge_crossings(tr.arcs[a]), 1);
        }
    }

    #[test]
    fn digon_removal() {
        let tr = polygon_fan(5).unwrap();
        let e = tr.arcs[0];
        let [c1, c2] = tr.side_cells(SideId::Edge(e)).unwrap();
        // Z -> cross e -> cross e back -> Z in the same cell: contractible.
        let c = Curve {
            start: Germ {
                cell: c1,
                vert: CellVert::Deco,
            },
            steps: vec![SideId::Edge(e), SideId::Edge(e)],
            end: Germ {
                cell: c1,
                vert: CellVert::Deco,
            },
        };
        assert!(matches!(c.reduced(&tr), Err(Error::NotNormal(_))));
        // A dual arc with a wiggle reduces to the dual arc.
        let spoke = SideId::Spoke(c2.tri, c2.k);
        let mid = tr.other_cell(spoke, c2).unwrap();
        let wiggly = Curve {
            start: Germ {
                cell: c1,
                vert: CellVert::Deco,
            },
            steps: vec![SideId::Edge(e), spoke, spoke],
            end: Germ {
                cell: c2,
                vert: CellVert::Deco,
            },
        };
        let _ = mid;
        let red = wiggly.reduced(&tr).unwrap();
        assert_eq!(red, dual_arc(&tr, 0).unwrap());
    }

    #[test]
    fn germ_rotation() {
        let tr = polygon_fan(5).unwrap();
        let e = tr.arcs[0];
        let [c1, c2] = tr.side_cells(SideId::Edge(e)).unwrap();
        // Germ anchored at Deco but first crossing a spoke of the same cell:
        // rotates to the neighboring cell.
        let spoke = SideId::Spoke(c1.tri, c1.k);
        let nbr = tr.other_cell(spoke, c1).unwrap();
        let c = Curve {
            start: Germ {
                cell: nbr,
                vert: CellVert::Deco,
            },
            steps: vec![spoke, SideId::Edge(e)],
            end: Germ {
                cell: c2,
                vert: CellVert::Deco,
            },
        };
        let red = c.reduced(&tr).unwrap();
        assert_eq!(red, dual_arc(&tr, 0).unwrap());
    }

    #[test]
    fn edge_parallel_canonical_side() {
        let tr = polygon_fan(5).unwrap();
        let e = tr.arcs[1];
        let (t2, s2) = tr.edges[e].sides[1];
        let off = Cell { tri: t2, k: s2 };
        let c = Curve {
            start: Germ {
                cell: off,
                vert: CellVert::CornerA,
            },
            steps: vec![],
            end: Germ {
                cell: off,
                vert: CellVert::CornerB,
            },
        };
        let red = c.reduced(&tr).unwrap();
        assert_eq!(red.canonical(), edge_arc(&tr, 1).unwrap().canonical());
        assert_eq!(red.edge_parallel(&tr), Some(e));
    }
}
