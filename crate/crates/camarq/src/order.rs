//! Joint strand ordering for a family of reduced curves, and exact crossing
//! counting.
//!
//! Crossings of curves on one side of the refined complex are ordered by
//! walking both strands away from the side until their continuations diverge;
//! the local picture in the cell where they diverge forces the order. Fully
//! parallel strands (isotopic curves, or two references to the same curve)
//! are ordered by a push-off rule: the higher-indexed curve runs on the left
//! of the lower one's travel direction.
//!
//! With these orders every cell is realized as an exact euclidean triangle,
//! chords become straight segments, and minimal interior crossings are read
//! off per cell. A residual bigon scan (pairs of crossings adjacent along
//! both curves whose connecting subwords match) smooths anything the order
//! missed; with a correct comparator it never fires.

use crate::cells::{Cell, CellVert, Curve, Germ, SideId};
use crate::geom::{pt, pti, q, qi, seg_intersect, Pt, Q};
use crate::surface::Triangulation;
use crate::{Error, Result};
use std::cmp::Ordering;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Occ {
    pub curve: usize,
    pub step: usize,
}

pub struct Arrangement<'a> {
    pub tr: &'a Triangulation,
    pub curves: &'a [Curve],
    pub cells: Vec<Vec<Cell>>,
    /// Sorted occurrences per side, along the side's canonical direction.
    pub orders: BTreeMap<SideId, Vec<Occ>>,
}

/// Canonical start vertex of a side, as a local vertex of `cell`.
fn canonical_start(tr: &Triangulation, s: SideId, cell: Cell) -> CellVert {
    match s {
        SideId::Edge(e) => {
            let (t0, s0) = tr.edges[e].sides[0];
            if cell == (Cell { tri: t0, k: s0 }) {
                CellVert::CornerA
            } else {
                CellVert::CornerB
            }
        }
        SideId::Spoke(..) => CellVert::Deco,
    }
}

/// The cell on the right of the side's canonical direction.
fn right_cell(tr: &Triangulation, s: SideId) -> Cell {
    match s {
        SideId::Edge(e) => {
            let (t0, s0) = tr.edges[e].sides[0];
            Cell { tri: t0, k: s0 }
        }
        SideId::Spoke(t, c) => Cell { tri: t, k: c },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    Cross(SideId, Occ),
    Anchor,
}

impl<'a> Arrangement<'a> {
    pub fn new(tr: &'a Triangulation, curves: &'a [Curve]) -> Result<Arrangement<'a>> {
        let mut cells = Vec::with_capacity(curves.len());
        for c in curves {
            cells.push(c.cells(tr)?);
        }
        let mut arr = Arrangement {
            tr,
            curves,
            cells,
            orders: BTreeMap::new(),
        };
        let mut by_side: BTreeMap<SideId, Vec<Occ>> = BTreeMap::new();
        for (ci, c) in curves.iter().enumerate() {
            for (k, &s) in c.steps.iter().enumerate() {
                by_side.entry(s).or_default().push(Occ { curve: ci, step: k });
            }
        }
        for (s, mut occs) in by_side {
            occs.sort_by(|&a, &b| arr.cmp_occ(s, a, b));
            arr.orders.insert(s, occs);
        }
        Ok(arr)
    }

    fn cmp_occ(&self, s: SideId, a: Occ, b: Occ) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let [p, qq] = self.tr.side_cells(s).expect("internal side");
        for cell in [p, qq] {
            let start = canonical_start(self.tr, s, cell);
            if let Some(o) = self.cmp_dir(s, cell, a, b, start, 0) {
                return o;
            }
        }
        self.tiebreak(s, a, b)
    }

    /// Continuation event of occurrence `o` walking into `cell`.
    fn event(&self, o: Occ, cell: Cell) -> Event {
        let cs = &self.cells[o.curve];
        let curve = &self.curves[o.curve];
        if cs[o.step + 1] == cell {
            if o.step + 1 == curve.steps.len() {
                Event::Anchor
            } else {
                Event::Cross(
                    curve.steps[o.step + 1],
                    Occ {
                        curve: o.curve,
                        step: o.step + 1,
                    },
                )
            }
        } else {
            debug_assert_eq!(cs[o.step], cell);
            if o.step == 0 {
                Event::Anchor
            } else {
                Event::Cross(
                    curve.steps[o.step - 1],
                    Occ {
                        curve: o.curve,
                        step: o.step - 1,
                    },
                )
            }
        }
    }

    /// Some(Less) iff a's crossing point on `s` is strictly nearer the end of
    /// `s` at local vertex `ref_vert`, as forced by the continuations into
    /// `cell`. None means the continuations stay parallel to their anchors.
    fn cmp_dir(
        &self,
        s: SideId,
        cell: Cell,
        a: Occ,
        b: Occ,
        ref_vert: CellVert,
        depth: usize,
    ) -> Option<Ordering> {
        assert!(depth < 100_000, "strand comparison does not terminate");
        let u_ref = side_through(self.tr, cell, ref_vert, s);
        let far_vert = other_end(self.tr, cell, s, ref_vert);
        let u_far = side_through(self.tr, cell, far_vert, s);
        let rank = |e: &Event| match e {
            Event::Cross(u, _) if *u == u_ref => 0,
            Event::Anchor => 1,
            Event::Cross(u, _) if *u == u_far => 2,
            Event::Cross(u, _) => panic!("continuation crosses {u:?} not in cell"),
        };
        let ea = self.event(a, cell);
        let eb = self.event(b, cell);
        let (ra, rb) = (rank(&ea), rank(&eb));
        if ra != rb {
            return Some(ra.cmp(&rb));
        }
        match (ea, eb) {
            (Event::Anchor, Event::Anchor) => None,
            (Event::Cross(u, a2), Event::Cross(_, b2)) => {
                let shared = if ra == 0 { ref_vert } else { far_vert };
                let (ncell, nvert) = self
                    .tr
                    .vert_across(u, cell, shared)
                    .expect("shared vertex crosses side");
                let r = self.cmp_dir(u, ncell, a2, b2, nvert, depth + 1)?;
                Some(if ra == 0 { r } else { r.reverse() })
            }
            _ => unreachable!(),
        }
    }

    /// Push-off order for fully parallel strands.
    fn tiebreak(&self, s: SideId, a: Occ, b: Occ) -> Ordering {
        if a.curve == b.curve {
            // Two occurrences of one embedded curve always diverge; reaching
            // this point means the curve is not embedded, which downstream
            // simplicity checks will reject. Fall back to word order.
            return a.step.cmp(&b.step);
        }
        let (lo, hi) = if a.curve < b.curve { (a, b) } else { (b, a) };
        let rc = right_cell(self.tr, s);
        // lo travels right->left iff the cell before its crossing is the
        // right cell.
        let lo_rl = self.cells[lo.curve][lo.step] == rc;
        // hi goes on the left of lo's travel: nearer the canonical start if
        // lo travels right to left.
        let hi_first = lo_rl;
        let a_is_hi = a == hi;
        match (hi_first, a_is_hi) {
            (true, true) | (false, false) => Ordering::Less,
            _ => Ordering::Greater,
        }
    }

    /// Position of an occurrence in its side order.
    pub fn rank(&self, o: Occ) -> usize {
        let s = self.curves[o.curve].steps[o.step];
        self.orders[&s].iter().position(|&x| x == o).unwrap()
    }

    /// Exact foot of an occurrence on the local geometry of `cell`.
    fn foot(&self, o: Occ, cell: Cell, jitter: i128) -> Pt {
        let s = self.curves[o.curve].steps[o.step];
        let n = self.orders[&s].len() as i128;
        let idx = self.rank(o) as i128;
        let f = q(idx + 1, n + 1 + jitter);
        let start = canonical_start(self.tr, s, cell);
        let far = other_end(self.tr, cell, s, start);
        vert_coord(start).lerp(vert_coord(far), f)
    }

    /// All passages of curve `ci` through cells, as (cell index in the cells
    /// sequence, polyline).
    fn passages(&self, ci: usize, jitter: i128) -> Vec<(usize, Vec<Pt>)> {
        let curve = &self.curves[ci];
        let cs = &self.cells[ci];
        let mut out = Vec::new();
        for idx in 0..cs.len() {
            let cell = cs[idx];
            let entry: Pt = if idx == 0 {
                vert_coord(curve.start.vert)
            } else {
                self.foot(
                    Occ {
                        curve: ci,
                        step: idx - 1,
                    },
                    cell,
                    jitter,
                )
            };
            let exit: Pt = if idx == curve.steps.len() {
                vert_coord(curve.end.vert)
            } else {
                self.foot(Occ { curve: ci, step: idx }, cell, jitter)
            };
            // A crossing-free corner-to-corner curve hugs its edge; bend it
            // into the cell so strands through the edge cross it properly.
            let poly = if idx == 0 && curve.steps.is_empty() && curve.start.vert != CellVert::Deco
            {
                vec![entry, pt(qi(4), q(3, 2)), exit]
            } else {
                vec![entry, exit]
            };
            out.push((idx, poly));
        }
        out
    }

    /// Interior crossing records between curves i and j after bigon
    /// smoothing: ((passage, param) along i, same along j).
    pub fn crossings(&self, i: usize, j: usize) -> Result<Vec<((usize, Q), (usize, Q))>> {
        assert_ne!(i, j);
        // A curve parallel to a triangulation edge meets the other curve
        // once per crossing of that edge; read it off the word.
        if let Some(e) = self.curves[i].edge_parallel(self.tr) {
            let mut out = Vec::new();
            for (k, s) in self.curves[j].steps.iter().enumerate() {
                if *s == SideId::Edge(e) {
                    out.push(((0usize, q(k as i128 + 1, 1)), (k, q(1, 2))));
                }
            }
            return Ok(out);
        }
        if let Some(e) = self.curves[j].edge_parallel(self.tr) {
            let mut out = Vec::new();
            for (k, s) in self.curves[i].steps.iter().enumerate() {
                if *s == SideId::Edge(e) {
                    out.push(((k, q(1, 2)), (0usize, q(k as i128 + 1, 1))));
                }
            }
            return Ok(out);
        }
        let pi = self.passages(i, 0);
        let pj = self.passages(j, 0);
        let mut recs: Vec<((usize, Q), (usize, Q))> = Vec::new();
        for (ai, poly_i) in &pi {
            let cell_i = self.cells[i][*ai];
            for (aj, poly_j) in &pj {
                if self.cells[j][*aj] != cell_i {
                    continue;
                }
                for (si, wi) in poly_i.windows(2).enumerate() {
                    for (sj, wj) in poly_j.windows(2).enumerate() {
                        if let Some((t, u)) = seg_intersect(wi[0], wi[1], wj[0], wj[1]) {
                            recs.push((
                                (*ai, qi(si as i128) + t),
                                (*aj, qi(sj as i128) + u),
                            ));
                        }
                    }
                }
            }
        }
        // Bigon smoothing on the record list.
        loop {
            let mut by_i: Vec<usize> = (0..recs.len()).collect();
            by_i.sort_by(|&x, &y| recs[x].0.cmp(&recs[y].0));
            let mut by_j: Vec<usize> = (0..recs.len()).collect();
            by_j.sort_by(|&x, &y| recs[x].1.cmp(&recs[y].1));
            let pos_j: BTreeMap<usize, usize> =
                by_j.iter().enumerate().map(|(p, &r)| (r, p)).collect();
            let mut removed = None;
            'scan: for w in by_i.windows(2) {
                let (x, y) = (w[0], w[1]);
                let (pjx, pjy) = (pos_j[&x], pos_j[&y]);
                if pjx.abs_diff(pjy) != 1 {
                    continue;
                }
                let word_i = self.subword(i, &recs[x].0, &recs[y].0);
                let word_j = self.subword(j, &recs[x].1, &recs[y].1);
                let mut wj_rev = word_j.clone();
                wj_rev.reverse();
                if word_i == word_j || word_i == wj_rev {
                    removed = Some((x, y));
                    break 'scan;
                }
            }
            match removed {
                Some((x, y)) => {
                    let mut keep = Vec::new();
                    for (idx, r) in recs.into_iter().enumerate() {
                        if idx != x && idx != y {
                            keep.push(r);
                        }
                    }
                    recs = keep;
                }
                None => break,
            }
        }
        Ok(recs)
    }

    fn subword(&self, ci: usize, a: &(usize, Q), b: &(usize, Q)) -> Vec<SideId> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.curves[ci].steps[lo.0..hi.0].to_vec()
    }

    /// Interior crossing count between two distinct indexed curves.
    pub fn interior(&self, i: usize, j: usize) -> Result<usize> {
        Ok(self.crossings(i, j)?.len())
    }

    /// Self-crossing count of one curve: nonzero means not simple.
    pub fn self_crossings(&self, i: usize) -> usize {
        let ps = self.passages(i, 0);
        let mut count = 0;
        for (a, (ai, poly_a)) in ps.iter().enumerate() {
            for (bi, poly_b) in ps.iter().skip(a + 1).map(|(b, p)| (*b, p)) {
                if self.cells[i][*ai] != self.cells[i][bi] {
                    continue;
                }
                for wa in poly_a.windows(2) {
                    for wb in poly_b.windows(2) {
                        if seg_intersect(wa[0], wa[1], wb[0], wb[1]).is_some() {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }
}

/// The side of `cell` through vertex `v` other than `s`.
fn side_through(tr: &Triangulation, cell: Cell, v: CellVert, s: SideId) -> SideId {
    let sides = tr.cell_sides(cell);
    for side in sides {
        if side != s && tr.vert_on_side(cell, v, side) {
            return side;
        }
    }
    panic!("no side through vertex");
}

/// The other endpoint of side `s` within `cell`.
fn other_end(tr: &Triangulation, cell: Cell, s: SideId, v: CellVert) -> CellVert {
    let opp = tr.opposite_vert(cell, s);
    for w in [CellVert::CornerA, CellVert::CornerB, CellVert::Deco] {
        if w != opp && w != v {
            return w;
        }
    }
    unreachable!()
}

/// Local coordinates of cell vertices: an exact euclidean triangle.
fn vert_coord(v: CellVert) -> Pt {
    match v {
        CellVert::CornerA => pti(0, 0),
        CellVert::CornerB => pti(8, 0),
        CellVert::Deco => pti(4, 6),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::{dual_arc, edge_arc};
    use crate::surface::polygon_fan;

    #[test]
    fn dual_arcs_are_disjoint_in_pentagon() {
        let tr = polygon_fan(5).unwrap();
        let t1 = dual_arc(&tr, 0).unwrap();
        let t2 = dual_arc(&tr, 1).unwrap();
        let curves = vec![t1, t2];
        let arr = Arrangement::new(&tr, &curves).unwrap();
        assert_eq!(arr.interior(0, 1).unwrap(), 0);
        assert_eq!(arr.self_crossings(0), 0);
    }

    #[test]
    fn edge_vs_dual_crossing() {
        let tr = polygon_fan(5).unwrap();
        let g1 = edge_arc(&tr, 0).unwrap();
        let t1 = dual_arc(&tr, 0).unwrap();
        let t2 = dual_arc(&tr, 1).unwrap();
        let curves = vec![g1, t1, t2];
        let arr = Arrangement::new(&tr, &curves).unwrap();
        assert_eq!(arr.interior(0, 1).unwrap(), 1);
        assert_eq!(arr.interior(0, 2).unwrap(), 0);
    }
}
