//! Combinatorial model of decorated marked surfaces: triangulations as
//! abstract gluing data, seed constructions, flips, and the induced
//! (graded) quivers with potential.
//!
//! A triangulation stores, per triangle, its three directed edge slots in
//! clockwise order: slot `s` runs from corner `s` to corner `s+1`. Gluing
//! identifies an internal edge's two slots with opposite directions, which
//! makes the gluing format orientation-consistent by construction. Each
//! triangle carries one decorating point, identified with the triangle id.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type TriId = usize;
pub type EdgeId = usize;
pub type Slot = usize;
/// Index into the internal-arc list (quiver vertex).
pub type ArcIdx = usize;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub genus: u32,
    /// Marked points per boundary component; length = number of boundaries.
    pub boundaries: Vec<u32>,
    #[serde(default)]
    pub recipe: String,
}

impl SurfaceSpec {
    pub fn marked(&self) -> u32 {
        self.boundaries.iter().sum()
    }

    /// Returns (n, aleph): the internal arc count 6g+3b+m-6 and the triangle
    /// count (2n+m)/3. Rejects degenerate data.
    pub fn validate(&self) -> Result<(usize, usize)> {
        if self.boundaries.is_empty() {
            return Err(Error::DegenerateSurface("no boundary component".into()));
        }
        if self.boundaries.iter().any(|&k| k == 0) {
            return Err(Error::DegenerateSurface(
                "boundary component without marked points".into(),
            ));
        }
        let g = self.genus as i64;
        let b = self.boundaries.len() as i64;
        let m = self.marked() as i64;
        let n = 6 * g + 3 * b + m - 6;
        if n < 1 {
            return Err(Error::DegenerateSurface(format!(
                "arc count n = {n} < 1 for g={g}, b={b}, m={m}"
            )));
        }
        if (2 * n + m) % 3 != 0 {
            return Err(Error::DegenerateSurface(format!(
                "decoration count (2n+m)/3 not integral for n={n}, m={m}"
            )));
        }
        Ok((n as usize, ((2 * n + m) / 3) as usize))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    Internal,
    Boundary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Edge {
    pub kind: EdgeKind,
    /// (triangle, slot) incidences; two for internal edges, one for boundary.
    pub sides: Vec<(TriId, Slot)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FlipDir {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlipRecord {
    pub arc: ArcIdx,
    pub dir: FlipDir,
    pub old_label: u32,
    pub new_label: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Triangulation {
    /// Edge ids per slot, clockwise per triangle.
    pub tris: Vec<[EdgeId; 3]>,
    pub edges: Vec<Edge>,
    /// Internal arc index -> edge id.
    pub arcs: Vec<EdgeId>,
    /// Edge id -> internal arc index.
    pub edge_arc: Vec<Option<ArcIdx>>,
    /// Persistent labels per arc index; flips assign fresh labels.
    pub labels: Vec<u32>,
    pub next_label: u32,
    pub journal: Vec<FlipRecord>,
    /// Marked point id per (triangle, corner).
    pub corner_marked: Vec<[usize; 3]>,
    pub num_marked: usize,
    pub num_boundary_components: usize,
    pub genus: u32,
}

/// Data a flip hands to the curve-transport layer: how kept sides of the
/// refined complex are renamed, and which triangles changed.
#[derive(Debug, Clone)]
pub struct FlipMaps {
    pub arc: ArcIdx,
    pub dir: FlipDir,
    /// The two triangles adjacent to the flipped arc (x = the one listed
    /// first; the rule is symmetric).
    pub tri_x: TriId,
    pub tri_y: TriId,
    /// Slot of the flipped edge in tri_x / tri_y before the flip.
    pub gx: Slot,
    pub gy: Slot,
    /// Spoke renaming: old (tri, corner) -> new (tri, corner) for kept spokes.
    pub spoke_map: Vec<((TriId, usize), (TriId, usize))>,
    /// Edge slot renaming for the four outer quad slots.
    pub slot_map: Vec<((TriId, Slot), (TriId, Slot))>,
}

impl Triangulation {
    pub fn num_tris(&self) -> usize {
        self.tris.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn edge_of_arc(&self, a: ArcIdx) -> EdgeId {
        self.arcs[a]
    }

    pub fn is_internal(&self, e: EdgeId) -> bool {
        self.edges[e].kind == EdgeKind::Internal
    }

    /// The side of internal edge `e` other than (t, s).
    pub fn other_side(&self, e: EdgeId, t: TriId, s: Slot) -> (TriId, Slot) {
        let sides = &self.edges[e].sides;
        if sides[0] == (t, s) {
            sides[1]
        } else {
            debug_assert_eq!(sides[1], (t, s));
            sides[0]
        }
    }

    /// Builds a triangulation from triangles given by corner labels in
    /// clockwise order. Directed sides (a,b) and (b,a) glue automatically;
    /// `extra_glue` lists pairs of directed sides that form one edge even
    /// though their corner labels differ. Unmatched sides become boundary.
    pub fn build(tris_by_corners: &[[u32; 3]], extra_glue: &[((u32, u32), (u32, u32))]) -> Result<Self> {
        let nt = tris_by_corners.len();
        // Directed side (a,b) -> (tri, slot)
        let mut by_pair: BTreeMap<(u32, u32), (TriId, Slot)> = BTreeMap::new();
        for (t, cs) in tris_by_corners.iter().enumerate() {
            for s in 0..3 {
                let a = cs[s];
                let b = cs[(s + 1) % 3];
                if by_pair.insert((a, b), (t, s)).is_some() {
                    return Err(Error::Invalid(format!("duplicate directed side ({a},{b})")));
                }
            }
        }
        let mut glued: BTreeMap<(TriId, Slot), (TriId, Slot)> = BTreeMap::new();
        let mut try_glue = |x: (TriId, Slot), y: (TriId, Slot), glued: &mut BTreeMap<(TriId, Slot), (TriId, Slot)>| -> Result<()> {
            if x == y {
                return Err(Error::Invalid("slot glued to itself".into()));
            }
            if glued.contains_key(&x) || glued.contains_key(&y) {
                return Err(Error::Invalid("slot glued twice".into()));
            }
            glued.insert(x, y);
            glued.insert(y, x);
            Ok(())
        };
        for (&(a, b), &side) in by_pair.iter() {
            if let Some(&other) = by_pair.get(&(b, a)) {
                if a < b {
                    try_glue(side, other, &mut glued)?;
                }
            }
        }
        for &((a, b), (c, d)) in extra_glue {
            let x = *by_pair
                .get(&(a, b))
                .ok_or_else(|| Error::Invalid(format!("no side ({a},{b})")))?;
            let y = *by_pair
                .get(&(c, d))
                .ok_or_else(|| Error::Invalid(format!("no side ({c},{d})")))?;
            try_glue(x, y, &mut glued)?;
        }

        let mut tris = vec![[usize::MAX; 3]; nt];
        let mut edges: Vec<Edge> = Vec::new();
        for t in 0..nt {
            for s in 0..3 {
                if tris[t][s] != usize::MAX {
                    continue;
                }
                let e = edges.len();
                match glued.get(&(t, s)) {
                    Some(&(t2, s2)) => {
                        edges.push(Edge {
                            kind: EdgeKind::Internal,
                            sides: vec![(t, s), (t2, s2)],
                        });
                        tris[t][s] = e;
                        tris[t2][s2] = e;
                    }
                    None => {
                        edges.push(Edge {
                            kind: EdgeKind::Boundary,
                            sides: vec![(t, s)],
                        });
                        tris[t][s] = e;
                    }
                }
            }
        }

        let mut arcs = Vec::new();
        let mut edge_arc = vec![None; edges.len()];
        for (e, edge) in edges.iter().enumerate() {
            if edge.kind == EdgeKind::Internal {
                edge_arc[e] = Some(arcs.len());
                arcs.push(e);
            }
        }
        let n = arcs.len();
        let labels: Vec<u32> = (0..n as u32).collect();
        let mut tr = Triangulation {
            tris,
            edges,
            arcs,
            edge_arc,
            labels,
            next_label: n as u32,
            journal: Vec::new(),
            corner_marked: vec![[usize::MAX; 3]; nt],
            num_marked: 0,
            num_boundary_components: 0,
            genus: 0,
        };
        tr.recompute_derived()?;
        Ok(tr)
    }

    /// Walks clockwise around the marked point at corner (t, c): crosses the
    /// slot starting at that corner. Returns the next (tri, corner) or None
    /// if the slot is a boundary edge.
    fn rot_cw(&self, t: TriId, c: usize) -> Option<(TriId, usize)> {
        let e = self.tris[t][c];
        if self.edges[e].kind == EdgeKind::Boundary {
            return None;
        }
        let (t2, s2) = self.other_side(e, t, c);
        Some((t2, (s2 + 1) % 3))
    }

    /// Walks the other way: crosses the slot ending at corner (t, c).
    fn rot_ccw(&self, t: TriId, c: usize) -> Option<(TriId, usize)> {
        let s = (c + 2) % 3;
        let e = self.tris[t][s];
        if self.edges[e].kind == EdgeKind::Boundary {
            return None;
        }
        let (t2, s2) = self.other_side(e, t, s);
        Some((t2, s2))
    }

    fn recompute_derived(&mut self) -> Result<()> {
        let nt = self.tris.len();
        self.corner_marked = vec![[usize::MAX; 3]; nt];
        let mut next_marked = 0;
        for t in 0..nt {
            for c in 0..3 {
                if self.corner_marked[t][c] != usize::MAX {
                    continue;
                }
                // Trace the full corner orbit in both directions.
                let mut orbit = vec![(t, c)];
                let mut guard = 0;
                let mut cur = (t, c);
                while let Some(next) = self.rot_cw(cur.0, cur.1) {
                    if next == (t, c) {
                        // Interior vertex: corners cycle without a boundary.
                        return Err(Error::Invalid(format!(
                            "interior vertex at triangle {t} corner {c} (punctures are not supported)"
                        )));
                    }
                    orbit.push(next);
                    cur = next;
                    guard += 1;
                    if guard > 3 * nt {
                        return Err(Error::Invalid("corner orbit does not terminate".into()));
                    }
                }
                cur = (t, c);
                while let Some(prev) = self.rot_ccw(cur.0, cur.1) {
                    orbit.push(prev);
                    cur = prev;
                    guard += 1;
                    if guard > 3 * nt {
                        return Err(Error::Invalid("corner orbit does not terminate".into()));
                    }
                }
                for (ot, oc) in orbit {
                    self.corner_marked[ot][oc] = next_marked;
                }
                next_marked += 1;
            }
        }
        self.num_marked = next_marked;

        // Boundary components: follow boundary edges end-to-start.
        let boundary_edges: Vec<EdgeId> = (0..self.edges.len())
            .filter(|&e| self.edges[e].kind == EdgeKind::Boundary)
            .collect();
        let mut seen = vec![false; self.edges.len()];
        let mut components = 0;
        for &e0 in &boundary_edges {
            if seen[e0] {
                continue;
            }
            components += 1;
            let mut e = e0;
            loop {
                seen[e] = true;
                let (t, s) = self.edges[e].sides[0];
                // Rotate clockwise around the edge's end corner until the
                // next boundary slot.
                let mut cur = (t, (s + 1) % 3);
                let next_e = loop {
                    let slot_edge = self.tris[cur.0][cur.1];
                    if self.edges[slot_edge].kind == EdgeKind::Boundary {
                        break slot_edge;
                    }
                    cur = self
                        .rot_cw(cur.0, cur.1)
                        .expect("internal slot must rotate");
                };
                e = next_e;
                if e == e0 {
                    break;
                }
            }
        }
        self.num_boundary_components = components;
        if components == 0 {
            return Err(Error::Invalid("surface has no boundary".into()));
        }

        // Euler characteristic: V - E + F with V = marked points.
        let chi = self.num_marked as i64 - self.edges.len() as i64 + self.tris.len() as i64;
        let two_g = 2 - chi - components as i64;
        if two_g < 0 || two_g % 2 != 0 {
            return Err(Error::Invalid(format!("bad Euler characteristic {chi}")));
        }
        self.genus = (two_g / 2) as u32;
        Ok(())
    }

    /// Checks the triangle/arc counts against a surface spec.
    pub fn check_against(&self, spec: &SurfaceSpec) -> Result<()> {
        let (n, aleph) = spec.validate()?;
        if self.num_arcs() != n || self.num_tris() != aleph {
            return Err(Error::Invalid(format!(
                "triangulation has {} arcs / {} triangles, spec wants {n} / {aleph}",
                self.num_arcs(),
                self.num_tris()
            )));
        }
        if self.genus != spec.genus
            || self.num_boundary_components != spec.boundaries.len()
            || self.num_marked != spec.marked() as usize
        {
            return Err(Error::Invalid(
                "recomputed topology disagrees with the spec".into(),
            ));
        }
        Ok(())
    }

    /// True iff no two triangles share two or more edges.
    pub fn check_assumption(&self) -> bool {
        let mut shared: BTreeMap<(TriId, TriId), usize> = BTreeMap::new();
        for edge in &self.edges {
            if edge.kind == EdgeKind::Internal {
                let (t1, _) = edge.sides[0];
                let (t2, _) = edge.sides[1];
                let key = (t1.min(t2), t1.max(t2));
                *shared.entry(key).or_insert(0) += 1;
            }
        }
        shared.values().all(|&k| k < 2)
    }

    /// Flips the triangulation at internal arc `a`. Returns the new
    /// triangulation and the side-renaming data for curve transport.
    pub fn flip(&self, a: ArcIdx, dir: FlipDir) -> Result<(Triangulation, FlipMaps)> {
        if a >= self.arcs.len() {
            return Err(Error::NotInternal(a));
        }
        let e = self.arcs[a];
        let (tx, gx) = self.edges[e].sides[0];
        let (ty, gy) = self.edges[e].sides[1];
        if tx == ty {
            return Err(Error::Invalid("self-folded triangle cannot be flipped".into()));
        }
        let x1 = self.tris[tx][(gx + 1) % 3];
        let x2 = self.tris[tx][(gx + 2) % 3];
        let y1 = self.tris[ty][(gy + 1) % 3];
        let y2 = self.tris[ty][(gy + 2) % 3];

        let mut out = self.clone();
        // New triangles reuse the ids and keep the flipped edge at its old
        // slot, so flipping back restores the triangulation exactly.
        // Cyclically, a forward flip puts (e', y2, x1) in tx (keeping Z_X on
        // the quad side swept anticlockwise) and (e', x2, y1) in ty; a
        // backward flip swaps the outer pairs.
        let place = |t: &mut [EdgeId; 3], g: Slot, second: EdgeId, third: EdgeId| {
            t[g] = e;
            t[(g + 1) % 3] = second;
            t[(g + 2) % 3] = third;
        };
        let mut sx = self.tris[tx];
        let mut sy = self.tris[ty];
        match dir {
            FlipDir::Forward => {
                place(&mut sx, gx, x2, y1);
                place(&mut sy, gy, y2, x1);
            }
            FlipDir::Backward => {
                place(&mut sx, gx, y2, x1);
                place(&mut sy, gy, x2, y1);
            }
        }
        out.tris[tx] = sx;
        out.tris[ty] = sy;
        // Refresh side incidences for the five edges involved.
        let mut fix_edge = |edge: EdgeId, out: &mut Triangulation| {
            let mut sides = Vec::new();
            for t in [tx, ty] {
                for s in 0..3 {
                    if out.tris[t][s] == edge {
                        sides.push((t, s));
                    }
                }
            }
            for &(t0, s0) in &self.edges[edge].sides {
                if t0 != tx && t0 != ty {
                    sides.push((t0, s0));
                }
            }
            sides.sort();
            sides.dedup();
            out.edges[edge].sides = sides;
        };
        for ed in [e, x1, x2, y1, y2] {
            fix_edge(ed, &mut out);
        }
        for (eid, edge) in out.edges.iter().enumerate() {
            let want = match edge.kind {
                EdgeKind::Internal => 2,
                EdgeKind::Boundary => 1,
            };
            if edge.sides.len() != want {
                return Err(Error::Invalid(format!("edge {eid} has bad incidence after flip")));
            }
        }
        let new_label = out.next_label;
        out.next_label += 1;
        let old_label = out.labels[a];
        out.labels[a] = new_label;
        out.journal.push(FlipRecord {
            arc: a,
            dir,
            old_label,
            new_label,
        });
        out.recompute_derived()?;

        // Spoke and slot renaming. In the quad picture X = (A,B,C) has the
        // flipped edge at slot gx directed C->A, Y = (A,C,D) at gy directed
        // A->C; old corners: X: gx = C, gx+1 = A, gx+2 = B; Y: gy = A,
        // gy+1 = C, gy+2 = D. The new diagonal joins B and D.
        let m3 = |x: Slot| x % 3;
        let (spoke_map, slot_map) = match dir {
            FlipDir::Backward => {
                // tx = (e', DA, AB) from slot gx: corners gx = B, gx+1 = D,
                // gx+2 = A, keeps Z_X; ty = (e', BC, CD) from gy: corners
                // gy = D, gy+1 = B, gy+2 = C, keeps Z_Y.
                (
                    vec![
                        ((tx, m3(gx + 2)), (tx, gx)),          // Z_X - B
                        ((tx, m3(gx + 1)), (tx, m3(gx + 2))),  // Z_X - A
                        ((ty, m3(gy + 2)), (ty, gy)),          // Z_Y - D
                        ((ty, m3(gy + 1)), (ty, m3(gy + 2))),  // Z_Y - C
                    ],
                    vec![
                        ((tx, m3(gx + 1)), (tx, m3(gx + 2))), // AB
                        ((tx, m3(gx + 2)), (ty, m3(gy + 1))), // BC
                        ((ty, m3(gy + 1)), (ty, m3(gy + 2))), // CD
                        ((ty, m3(gy + 2)), (tx, m3(gx + 1))), // DA
                    ],
                )
            }
            FlipDir::Forward => {
                // tx = (e', BC, CD) corners gx = D, gx+1 = B, gx+2 = C keeps
                // Z_X; ty = (e', DA, AB) corners gy = B, gy+1 = D, gy+2 = A
                // keeps Z_Y.
                (
                    vec![
                        ((tx, m3(gx + 2)), (tx, m3(gx + 1))), // Z_X - B
                        ((tx, gx), (tx, m3(gx + 2))),         // Z_X - C
                        ((ty, m3(gy + 2)), (ty, m3(gy + 1))), // Z_Y - D
                        ((ty, gy), (ty, m3(gy + 2))),         // Z_Y - A
                    ],
                    vec![
                        ((tx, m3(gx + 1)), (ty, m3(gy + 2))), // AB
                        ((tx, m3(gx + 2)), (tx, m3(gx + 1))), // BC
                        ((ty, m3(gy + 1)), (tx, m3(gx + 2))), // CD
                        ((ty, m3(gy + 2)), (ty, m3(gy + 1))), // DA
                    ],
                )
            }
        };
        Ok((
            out,
            FlipMaps {
                arc: a,
                dir,
                tri_x: tx,
                tri_y: ty,
                gx,
                gy,
                spoke_map,
                slot_map,
            },
        ))
    }
}

/// Quiver with potential of a triangulation: one arrow per adjacent pair of
/// internal edges in a triangle, pointing with the triangle's orientation,
/// and one potential 3-cycle per fully-internal triangle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Arrow {
    pub src: ArcIdx,
    pub tgt: ArcIdx,
    pub tri: TriId,
    /// The arrow of slot pair (slot, slot+1): source at slot+1, target at
    /// slot.
    pub slot: Slot,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuiverWithPotential {
    pub vertices: usize,
    pub arrows: Vec<Arrow>,
    /// Each cycle lists three arrow ids (a1, a2, a3) with a2 following a1.
    pub potential: Vec<[usize; 3]>,
}

impl QuiverWithPotential {
    pub fn of_triangulation(tr: &Triangulation) -> Self {
        let mut arrows = Vec::new();
        let mut arrow_at: BTreeMap<(TriId, Slot), usize> = BTreeMap::new();
        for (t, slots) in tr.tris.iter().enumerate() {
            for s in 0..3 {
                // The arrow of the slot pair (s, s+1) points from the arc at
                // slot s+1 to the arc at slot s.
                let e1 = slots[(s + 1) % 3];
                let e2 = slots[s];
                if let (Some(a1), Some(a2)) = (tr.edge_arc[e1], tr.edge_arc[e2]) {
                    arrow_at.insert((t, s), arrows.len());
                    arrows.push(Arrow {
                        src: a1,
                        tgt: a2,
                        tri: t,
                        slot: s,
                    });
                }
            }
        }
        let mut potential = Vec::new();
        for (t, slots) in tr.tris.iter().enumerate() {
            if slots.iter().all(|&e| tr.edge_arc[e].is_some()) {
                potential.push([
                    arrow_at[&(t, 0)],
                    arrow_at[&(t, 2)],
                    arrow_at[&(t, 1)],
                ]);
            }
        }
        QuiverWithPotential {
            vertices: tr.num_arcs(),
            arrows,
            potential,
        }
    }

    pub fn arrow_id(&self, tri: TriId, slot: Slot) -> Option<usize> {
        self.arrows
            .iter()
            .position(|a| a.tri == tri && a.slot == slot)
    }

    pub fn has_double_arrow(&self) -> bool {
        let mut count: BTreeMap<(ArcIdx, ArcIdx), usize> = BTreeMap::new();
        for a in &self.arrows {
            *count.entry((a.src, a.tgt)).or_insert(0) += 1;
        }
        count.values().any(|&k| k >= 2)
    }
}

/// Letters of the graded quiver: trivial paths (degree 0), arrows (0),
/// reversed arrows (-1), and one loop per vertex (-2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    Trivial(ArcIdx),
    Arrow(usize),
    Dual(usize),
    Loop(ArcIdx),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GradedQuiver {
    pub qp: QuiverWithPotential,
}

impl GradedQuiver {
    pub fn new(qp: QuiverWithPotential) -> Self {
        GradedQuiver { qp }
    }

    pub fn letters(&self) -> Vec<Letter> {
        let mut out = Vec::new();
        for v in 0..self.qp.vertices {
            out.push(Letter::Trivial(v));
        }
        for a in 0..self.qp.arrows.len() {
            out.push(Letter::Arrow(a));
        }
        for a in 0..self.qp.arrows.len() {
            out.push(Letter::Dual(a));
        }
        for v in 0..self.qp.vertices {
            out.push(Letter::Loop(v));
        }
        out
    }

    /// Quiver degree of a letter: 0, 0, -1, -2.
    pub fn degree(&self, l: Letter) -> i64 {
        match l {
            Letter::Trivial(_) | Letter::Arrow(_) => 0,
            Letter::Dual(_) => -1,
            Letter::Loop(_) => -2,
        }
    }

    /// (source, target) of a letter as a map S_src -> S_tgt[..].
    pub fn ends(&self, l: Letter) -> (ArcIdx, ArcIdx) {
        match l {
            Letter::Trivial(v) | Letter::Loop(v) => (v, v),
            Letter::Arrow(a) => (self.qp.arrows[a].src, self.qp.arrows[a].tgt),
            Letter::Dual(a) => (self.qp.arrows[a].tgt, self.qp.arrows[a].src),
        }
    }
}

/// Seed recipes for deterministic small test surfaces.
pub fn seed(spec: &SurfaceSpec) -> Result<Triangulation> {
    spec.validate()?;
    let g = spec.genus;
    let b = spec.boundaries.len();
    let m = spec.marked();
    match spec.recipe.as_str() {
        "fan" => {
            if g != 0 || b != 1 {
                return Err(Error::UnsupportedRecipe("fan needs a disk".into()));
            }
            polygon_fan(m as usize)
        }
        "hexagon-internal" => {
            if g != 0 || b != 1 || m != 6 {
                return Err(Error::UnsupportedRecipe(
                    "hexagon-internal needs a disk with 6 marked points".into(),
                ));
            }
            hexagon_internal()
        }
        "annulus" => {
            if g != 0 || b != 2 {
                return Err(Error::UnsupportedRecipe("annulus needs g=0, b=2".into()));
            }
            annulus(spec.boundaries[0] as usize, spec.boundaries[1] as usize)
        }
        "torus" => {
            if g != 1 || b != 1 || m != 1 {
                return Err(Error::UnsupportedRecipe(
                    "torus needs g=1, b=1, m=1".into(),
                ));
            }
            torus_one_boundary()
        }
        other => Err(Error::UnsupportedRecipe(other.to_string())),
    }
}

/// Disk with m marked points, triangulated by the fan at vertex 0.
/// Vertices are labeled clockwise.
pub fn polygon_fan(m: usize) -> Result<Triangulation> {
    if m < 4 {
        return Err(Error::UnsupportedRecipe(format!("fan needs m >= 4, got {m}")));
    }
    let tris: Vec<[u32; 3]> = (1..m - 1)
        .map(|k| [0, k as u32, (k + 1) as u32])
        .collect();
    Triangulation::build(&tris, &[])
}

/// Disk with 6 marked points and an internal triangle on arcs (0,2),(2,4),(4,0).
pub fn hexagon_internal() -> Result<Triangulation> {
    let tris = [[0, 1, 2], [2, 3, 4], [4, 5, 0], [0, 2, 4]];
    Triangulation::build(&tris, &[])
}

/// Annulus with p marked points on the outer boundary and q on the inner,
/// triangulated as a zigzag strip. Outer vertices 0..p, inner 100..100+q
/// (inner labels offset to keep them distinct).
pub fn annulus(p: usize, q: usize) -> Result<Triangulation> {
    if p < 1 || q < 1 {
        return Err(Error::UnsupportedRecipe("annulus needs p,q >= 1".into()));
    }
    const IN: u32 = 100;
    let o = |k: usize| k as u32; // outer row, duplicated endpoint o(p)
    let i = |k: usize| IN + k as u32;
    let mut tris: Vec<[u32; 3]> = Vec::new();
    // Zigzag from left to right: alternately consume outer and inner edges.
    let (mut ko, mut ki) = (0usize, 0usize);
    while ko < p || ki < q {
        if ko < p && (ki * p <= ko * q || ki == q) {
            tris.push([o(ko), o(ko + 1), i(ki)]);
            ko += 1;
        } else {
            tris.push([o(ko), i(ki + 1), i(ki)]);
            ki += 1;
        }
    }
    // Glue the left rim (i0 -> o0) to the right rim (o(p) -> i(q)).
    let glue = [((i(0), o(0)), (o(p), i(q)))];
    Triangulation::build(&tris, &glue)
}

/// Torus with one boundary component and one marked point: a pentagon fan
/// with two side identifications.
pub fn torus_one_boundary() -> Result<Triangulation> {
    let tris = [[0, 1, 2], [0, 2, 3], [0, 3, 4]];
    let glue = [((0, 1), (2, 3)), ((1, 2), (3, 4))];
    Triangulation::build(&tris, &glue)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(m: u32) -> SurfaceSpec {
        SurfaceSpec {
            genus: 0,
            boundaries: vec![m],
            recipe: "fan".into(),
        }
    }

    #[test]
    fn validate_counts() {
        assert_eq!(disk(5).validate().unwrap(), (2, 3));
        assert_eq!(disk(6).validate().unwrap(), (3, 4));
        let ann = SurfaceSpec {
            genus: 0,
            boundaries: vec![2, 2],
            recipe: "annulus".into(),
        };
        assert_eq!(ann.validate().unwrap(), (4, 4));
        let tor = SurfaceSpec {
            genus: 1,
            boundaries: vec![1],
            recipe: "torus".into(),
        };
        assert_eq!(tor.validate().unwrap(), (4, 3));
        // Degenerate: disk with 3 marked points has n = 0.
        assert!(disk(3).validate().is_err());
        // With n from the arc-count formula, 2n + m is divisible by 3 for
        // every admissible surface; the decoration count is always integral.
        let odd = SurfaceSpec {
            genus: 0,
            boundaries: vec![4, 1],
            recipe: String::new(),
        };
        assert_eq!(odd.validate().unwrap(), (5, 5));
        // A boundary component without marked points is rejected.
        let empty = SurfaceSpec {
            genus: 0,
            boundaries: vec![5, 0],
            recipe: String::new(),
        };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn pentagon_fan_structure() {
        let tr = polygon_fan(5).unwrap();
        tr.check_against(&disk(5)).unwrap();
        assert_eq!(tr.num_arcs(), 2);
        assert_eq!(tr.num_tris(), 3);
        assert_eq!(tr.num_marked, 5);
        assert_eq!(tr.num_boundary_components, 1);
        assert_eq!(tr.genus, 0);
        let qp = QuiverWithPotential::of_triangulation(&tr);
        assert_eq!(qp.arrows.len(), 1);
        assert!(qp.potential.is_empty());
    }

    #[test]
    fn square_single_arc() {
        let tr = polygon_fan(4).unwrap();
        assert_eq!(tr.num_arcs(), 1);
        let qp = QuiverWithPotential::of_triangulation(&tr);
        assert!(qp.arrows.is_empty());
        assert!(qp.potential.is_empty());
    }

    #[test]
    fn hexagon_internal_triangle() {
        let tr = hexagon_internal().unwrap();
        tr.check_against(&disk(6)).unwrap();
        let qp = QuiverWithPotential::of_triangulation(&tr);
        assert_eq!(qp.arrows.len(), 3);
        assert_eq!(qp.potential.len(), 1);
        // The 3-cycle really is a cycle.
        let [a1, a2, a3] = qp.potential[0];
        assert_eq!(qp.arrows[a1].tgt, qp.arrows[a2].src);
        assert_eq!(qp.arrows[a2].tgt, qp.arrows[a3].src);
        assert_eq!(qp.arrows[a3].tgt, qp.arrows[a1].src);
        assert!(tr.check_assumption());
    }

    #[test]
    fn annulus_shapes() {
        let tr = annulus(2, 2).unwrap();
        let spec = SurfaceSpec {
            genus: 0,
            boundaries: vec![2, 2],
            recipe: "annulus".into(),
        };
        tr.check_against(&spec).unwrap();
        assert!(tr.check_assumption());

        let tr11 = annulus(1, 1).unwrap();
        assert_eq!(tr11.num_arcs(), 2);
        assert_eq!(tr11.num_tris(), 2);
        assert_eq!(tr11.num_marked, 2);
        assert_eq!(tr11.num_boundary_components, 2);
        // One marked point per boundary: the assumption fails.
        assert!(!tr11.check_assumption());
        let qp = QuiverWithPotential::of_triangulation(&tr11);
        assert!(qp.has_double_arrow());
        assert!(qp.potential.is_empty());
    }

    #[test]
    fn torus_structure() {
        let tr = torus_one_boundary().unwrap();
        assert_eq!(tr.genus, 1);
        assert_eq!(tr.num_boundary_components, 1);
        assert_eq!(tr.num_marked, 1);
        assert_eq!(tr.num_arcs(), 4);
        assert_eq!(tr.num_tris(), 3);
        assert!(!tr.check_assumption());
        let qp = QuiverWithPotential::of_triangulation(&tr);
        assert_eq!(qp.potential.len(), 2);
        assert_eq!(qp.arrows.len(), 7);
        assert!(qp.has_double_arrow());
    }

    #[test]
    fn assumption_matches_double_arrows() {
        for tr in [
            polygon_fan(5).unwrap(),
            polygon_fan(4).unwrap(),
            hexagon_internal().unwrap(),
            annulus(2, 2).unwrap(),
            annulus(1, 1).unwrap(),
            annulus(2, 1).unwrap(),
            torus_one_boundary().unwrap(),
        ] {
            let qp = QuiverWithPotential::of_triangulation(&tr);
            assert_eq!(tr.check_assumption(), !qp.has_double_arrow());
        }
    }

    #[test]
    fn flip_boundary_rejected() {
        let tr = polygon_fan(5).unwrap();
        assert!(tr.flip(7, FlipDir::Forward).is_err());
    }

    #[test]
    fn flip_then_unflip_restores_gluing() {
        for tr in [
            polygon_fan(5).unwrap(),
            hexagon_internal().unwrap(),
            annulus(2, 2).unwrap(),
            torus_one_boundary().unwrap(),
        ] {
            for a in 0..tr.num_arcs() {
                let (t1, _) = tr.flip(a, FlipDir::Forward).unwrap();
                let (t2, _) = t1.flip(a, FlipDir::Backward).unwrap();
                assert_eq!(t2.tris, tr.tris, "arc {a}");
                for (e1, e2) in t2.edges.iter().zip(tr.edges.iter()) {
                    assert_eq!(e1.sides, e2.sides);
                }
            }
        }
    }

    #[test]
    fn flip_reverses_pentagon_arrow() {
        let tr = polygon_fan(5).unwrap();
        let qp = QuiverWithPotential::of_triangulation(&tr);
        let (src, tgt) = (qp.arrows[0].src, qp.arrows[0].tgt);
        for a in 0..2 {
            let (t1, _) = tr.flip(a, FlipDir::Forward).unwrap();
            let qp1 = QuiverWithPotential::of_triangulation(&t1);
            assert_eq!(qp1.arrows.len(), 1);
            assert_eq!((qp1.arrows[0].src, qp1.arrows[0].tgt), (tgt, src));
        }
    }
}
