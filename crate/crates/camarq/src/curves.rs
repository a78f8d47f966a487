//! Arc operations: normal position, geometric intersection numbers, braid
//! twists along dual-arc generators, wedge extensions, the decomposition of
//! a closed arc into a twist of smaller arcs, flip transport, and corpus
//! generation.
//!
//! Braid twists and flip transport share one engine: the runs of an arc
//! through the two triangles adjacent to an edge are realized exactly in a
//! diamond chart, pushed through a PL map (the half twist) or read against a
//! replacement skeleton (the flipped triangulation), and the crossing words
//! are spliced back and reduced.

use crate::cells::{dual_arc, Anchor, Cell, CellVert, Curve, Germ, SideId};
use crate::geom::{pt, pti, q, qi, seg_intersect, HalfTwist, Pt, Q};
use crate::order::Arrangement;
use crate::surface::{ArcIdx, EdgeId, FlipDir, FlipMaps, Slot, TriId, Triangulation};
use crate::{Error, Result};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcKind {
    Open,
    Closed,
    GeneralClosed,
}

pub fn kind(tr: &Triangulation, c: &Curve) -> ArcKind {
    let a = tr.anchor_of(c.start);
    let b = tr.anchor_of(c.end);
    match (a, b) {
        (Anchor::Marked(_), Anchor::Marked(_)) => ArcKind::Open,
        (Anchor::Deco(x), Anchor::Deco(y)) if x == y => ArcKind::GeneralClosed,
        (Anchor::Deco(_), Anchor::Deco(_)) => ArcKind::Closed,
        _ => ArcKind::Open, // mixed anchors do not occur for arcs
    }
}

/// Puts an arc in normal position and certifies it is simple.
pub fn normalize_arc(tr: &Triangulation, c: &Curve) -> Result<Curve> {
    let red = c.reduced(tr)?;
    let curves = vec![red.clone()];
    let arr = Arrangement::new(tr, &curves)?;
    let k = arr.self_crossings(0);
    if k > 0 {
        return Err(Error::NotSimple(format!("{k} self-crossings")));
    }
    Ok(red)
}

/// Intersection numbers are half-integers; stored in half-units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInt(pub i64);

impl HalfInt {
    pub fn from_int(n: i64) -> HalfInt {
        HalfInt(2 * n)
    }
    pub fn halves(self) -> i64 {
        self.0
    }
    /// The doubled value, 2*Int, always an integer.
    pub fn doubled(self) -> i64 {
        self.0
    }
}

impl std::fmt::Display for HalfInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Geometric intersection number of two normalized arcs on one
/// triangulation: half the decoration-endpoint coincidence count plus the
/// minimal transverse interior count for (general) closed pairs; the plain
/// interior count when an open arc is involved.
pub fn intersection_number(tr: &Triangulation, a: &Curve, b: &Curve) -> Result<HalfInt> {
    a.validate(tr).map_err(|_| Error::MixedSurface)?;
    b.validate(tr).map_err(|_| Error::MixedSurface)?;
    // Arcs of the triangulation itself: crossings are already minimal in a
    // reduced word.
    if let Some(e) = a.edge_parallel(tr) {
        if let Some(e2) = b.edge_parallel(tr) {
            return Ok(HalfInt(if e == e2 { 0 } else { 0 }));
        }
        return Ok(HalfInt(2 * b.edge_crossings(e) as i64));
    }
    if let Some(e) = b.edge_parallel(tr) {
        return Ok(HalfInt(2 * a.edge_crossings(e) as i64));
    }
    let curves = vec![a.clone(), b.clone()];
    let arr = Arrangement::new(tr, &curves)?;
    let interior = arr.interior(0, 1)? as i64;
    let open = kind(tr, a) == ArcKind::Open || kind(tr, b) == ArcKind::Open;
    if open {
        return Ok(HalfInt(2 * interior));
    }
    let mut halves = 2 * interior;
    for d in 0..tr.num_tris() {
        let cnt = |c: &Curve| {
            let mut n = 0i64;
            if tr.anchor_of(c.start) == Anchor::Deco(d) {
                n += 1;
            }
            if tr.anchor_of(c.end) == Anchor::Deco(d) {
                n += 1;
            }
            n
        };
        halves += cnt(a) * cnt(b);
    }
    Ok(HalfInt(halves))
}

/// Total crossing count with the triangulation, l_T = sum_i Int(gamma_i, .).
pub fn l_t(tr: &Triangulation, c: &Curve) -> usize {
    c.steps
        .iter()
        .filter(|s| matches!(s, SideId::Edge(_)))
        .count()
}

// ---------------------------------------------------------------------------
// The diamond chart of the two triangles adjacent to an internal edge.

const AX: (i128, i128) = (0, 8);
const BX: (i128, i128) = (8, 0);
const CX: (i128, i128) = (0, -8);
const DX: (i128, i128) = (-8, 0);

fn p_a() -> Pt {
    pti(AX.0, AX.1)
}
fn p_b() -> Pt {
    pti(BX.0, BX.1)
}
fn p_c() -> Pt {
    pti(CX.0, CX.1)
}
fn p_d() -> Pt {
    pti(DX.0, DX.1)
}
fn p_zx() -> Pt {
    pt(qi(3), q(1, 3))
}
fn p_zy() -> Pt {
    pt(qi(-1), q(-1, 3))
}

struct QuadFrame<'a> {
    tr: &'a Triangulation,
    e: EdgeId,
    tx: TriId,
    gx: Slot,
    ty: TriId,
    gy: Slot,
}

impl<'a> QuadFrame<'a> {
    fn of_edge(tr: &'a Triangulation, e: EdgeId) -> Result<QuadFrame<'a>> {
        let (tx, gx) = tr.edges[e].sides[0];
        let (ty, gy) = *tr
            .edges[e]
            .sides
            .get(1)
            .ok_or_else(|| Error::Invalid("boundary edge has no quad".into()))?;
        if tx == ty {
            return Err(Error::Invalid("self-folded quad".into()));
        }
        Ok(QuadFrame { tr, e, tx, gx, ty, gy })
    }

    /// Interior skeleton sides with their diamond geometry, each directed
    /// along its canonical direction.
    fn interior_sides(&self) -> Vec<(SideId, [Pt; 2])> {
        vec![
            // Diagonal, canonical direction C -> A (as directed in tri x).
            (SideId::Edge(self.e), [p_c(), p_a()]),
            (SideId::Spoke(self.tx, self.gx), [p_zx(), p_c()]),
            (SideId::Spoke(self.tx, (self.gx + 1) % 3), [p_zx(), p_a()]),
            (SideId::Spoke(self.tx, (self.gx + 2) % 3), [p_zx(), p_b()]),
            (SideId::Spoke(self.ty, self.gy), [p_zy(), p_a()]),
            (SideId::Spoke(self.ty, (self.gy + 1) % 3), [p_zy(), p_c()]),
            (SideId::Spoke(self.ty, (self.gy + 2) % 3), [p_zy(), p_d()]),
        ]
    }

    /// Geometry of a rim slot, directed along the slot (corner_s ->
    /// corner_{s+1}).
    fn rim_segment(&self, t: TriId, s: Slot) -> [Pt; 2] {
        if t == self.tx {
            if s == (self.gx + 1) % 3 {
                [p_a(), p_b()]
            } else {
                debug_assert_eq!(s, (self.gx + 2) % 3);
                [p_b(), p_c()]
            }
        } else {
            debug_assert_eq!(t, self.ty);
            if s == (self.gy + 1) % 3 {
                [p_c(), p_d()]
            } else {
                debug_assert_eq!(s, (self.gy + 2) % 3);
                [p_d(), p_a()]
            }
        }
    }

    fn is_quad_tri(&self, t: TriId) -> bool {
        t == self.tx || t == self.ty
    }

    fn deco_coord(&self, t: TriId) -> Pt {
        if t == self.tx {
            p_zx()
        } else {
            p_zy()
        }
    }

    /// The six cells of the quad as straight triangles (old skeleton).
    fn cell_triangle(&self, c: Cell) -> [Pt; 3] {
        // corners of cell (t, k): corner_k, corner_{k+1}, deco.
        let corner = |t: TriId, k: usize| -> Pt {
            if t == self.tx {
                // corners: gx = C, gx+1 = A, gx+2 = B
                if k == self.gx {
                    p_c()
                } else if k == (self.gx + 1) % 3 {
                    p_a()
                } else {
                    p_b()
                }
            } else {
                // corners: gy = A, gy+1 = C, gy+2 = D
                if k == self.gy {
                    p_a()
                } else if k == (self.gy + 1) % 3 {
                    p_c()
                } else {
                    p_d()
                }
            }
        };
        [
            corner(c.tri, c.k),
            corner(c.tri, (c.k + 1) % 3),
            self.deco_coord(c.tri),
        ]
    }
}

// ---------------------------------------------------------------------------
// Runs of a curve through a quad.

#[derive(Debug, Clone)]
enum RunEnd {
    /// Crossing of a rim edge at word index `step`, entering/leaving the quad
    /// through slot (tri, slot).
    Rim { step: usize, tri: TriId, slot: Slot },
    /// Anchored at the decoration of `tri` (germ at a word end).
    Anchor { tri: TriId },
}

#[derive(Debug, Clone)]
struct Run {
    start: RunEnd,
    /// Word indices of interior crossings (diagonal and quad spokes).
    inner: Vec<usize>,
    end: RunEnd,
}

fn extract_runs(frame: &QuadFrame, curve: &Curve, cells: &[Cell]) -> Result<Vec<Run>> {
    let interior: BTreeSet<SideId> = frame.interior_sides().iter().map(|(s, _)| *s).collect();
    let mut runs = Vec::new();
    let mut cur: Option<Run> = None;
    if frame.is_quad_tri(cells[0].tri) {
        if curve.start.vert != CellVert::Deco {
            return Err(Error::Invalid("open arc germ inside a twist quad".into()));
        }
        cur = Some(Run {
            start: RunEnd::Anchor { tri: cells[0].tri },
            inner: vec![],
            end: RunEnd::Anchor { tri: 0 },
        });
    }
    for (k, &s) in curve.steps.iter().enumerate() {
        if interior.contains(&s) {
            match cur.as_mut() {
                Some(r) => r.inner.push(k),
                None => return Err(Error::Invalid("interior crossing outside a run".into())),
            }
        } else {
            // A rim or outside side. Rim iff one of its cells is a quad cell.
            let before_in = frame.is_quad_tri(cells[k].tri);
            let after_in = frame.is_quad_tri(cells[k + 1].tri);
            if before_in {
                let r = cur.take().ok_or_else(|| Error::Invalid("rim exit outside run".into()))?;
                runs.push(Run {
                    end: RunEnd::Rim {
                        step: k,
                        tri: cells[k].tri,
                        slot: cells[k].k,
                    },
                    ..r
                });
            }
            if after_in {
                cur = Some(Run {
                    start: RunEnd::Rim {
                        step: k,
                        tri: cells[k + 1].tri,
                        slot: cells[k + 1].k,
                    },
                    inner: vec![],
                    end: RunEnd::Anchor { tri: 0 },
                });
            }
        }
    }
    if let Some(r) = cur.take() {
        if curve.end.vert != CellVert::Deco {
            return Err(Error::Invalid("open arc germ inside a twist quad".into()));
        }
        runs.push(Run {
            end: RunEnd::Anchor {
                tri: cells[curve.steps.len()].tri,
            },
            ..r
        });
    }
    Ok(runs)
}

/// Exact foot of crossing `step` of the (single) arranged curve, in diamond
/// coordinates, with a jitter knob to dodge degeneracies.
fn diamond_foot(
    frame: &QuadFrame,
    arr: &Arrangement,
    step: usize,
    jitter: i128,
) -> Result<Pt> {
    let s = arr.curves[0].steps[step];
    let occ = crate::order::Occ { curve: 0, step };
    let n = arr.orders[&s].len() as i128;
    let f = q(arr.rank(occ) as i128 + 1, n + 1 + jitter);
    for (sid, [p1, p2]) in frame.interior_sides() {
        if sid == s {
            return Ok(p1.lerp(p2, f));
        }
    }
    // Rim crossing: geometry depends on the slot used; the caller passes the
    // slot via the run ends, so here we only handle interior sides.
    Err(Error::Invalid("foot requested for non-interior side".into()))
}

fn rim_foot(
    frame: &QuadFrame,
    arr: &Arrangement,
    step: usize,
    tri: TriId,
    slot: Slot,
    jitter: i128,
) -> Pt {
    let s = arr.curves[0].steps[step];
    let occ = crate::order::Occ { curve: 0, step };
    let n = arr.orders[&s].len() as i128;
    let f = q(arr.rank(occ) as i128 + 1, n + 1 + jitter);
    let [p1, p2] = frame.rim_segment(tri, slot);
    // The rim segment is directed along the slot; translate the canonical
    // fraction if the canonical direction is the other side's.
    let e = match s {
        SideId::Edge(e) => e,
        _ => unreachable!(),
    };
    let canonical_here = frame.tr.edges[e].sides[0] == (tri, slot);
    if canonical_here {
        p1.lerp(p2, f)
    } else {
        p2.lerp(p1, f)
    }
}

fn realize_run(
    frame: &QuadFrame,
    arr: &Arrangement,
    run: &Run,
    jitter: i128,
) -> Result<Vec<Pt>> {
    let mut pts = Vec::new();
    match &run.start {
        RunEnd::Anchor { tri } => pts.push(frame.deco_coord(*tri)),
        RunEnd::Rim { step, tri, slot } => {
            pts.push(rim_foot(frame, arr, *step, *tri, *slot, jitter))
        }
    }
    for &k in &run.inner {
        pts.push(diamond_foot(frame, arr, k, jitter)?);
    }
    match &run.end {
        RunEnd::Anchor { tri } => pts.push(frame.deco_coord(*tri)),
        RunEnd::Rim { step, tri, slot } => {
            pts.push(rim_foot(frame, arr, *step, *tri, *slot, jitter))
        }
    }
    // Interior vertices sit exactly on skeleton sides; bend each into a pair
    // of points straddling the side so the crossing lands in a segment
    // interior, where the reader sees it transversally.
    let delta = q(1, 512 + 71 * jitter);
    let mut bent = Vec::with_capacity(2 * pts.len());
    bent.push(pts[0]);
    for i in 1..pts.len() - 1 {
        let p = pts[i];
        bent.push(p.add(pts[i - 1].sub(p).scale(delta.clone())));
        bent.push(p.add(pts[i + 1].sub(p).scale(delta.clone())));
    }
    bent.push(pts[pts.len() - 1]);
    Ok(bent)
}

// ---------------------------------------------------------------------------
// Reading a PL path against a skeleton of directed polylines.

struct SkelCurve {
    side: SideId,
    poly: Vec<Pt>,
    /// Cells on the left/right of the directed polyline (in the complex the
    /// word is being read into).
    left: Cell,
    right: Cell,
}

struct ReadCrossing {
    /// Position along the path: (segment index, parameter).
    pos: (usize, Q),
    side: SideId,
    /// Cell the path enters after this crossing.
    into: Cell,
    /// Cell the path comes from.
    from: Cell,
}

/// Reads the crossing sequence of `path` against the skeleton. Errors on any
/// degeneracy (touching, collinear overlap, vertex hits), so callers can
/// retry with jittered feet.
fn read_path(path: &[Pt], skel: &[SkelCurve]) -> Result<Vec<ReadCrossing>> {
    let mut out: Vec<(usize, Q, usize, usize)> = Vec::new(); // seg, t, skel idx, skel seg
    for (si, w) in path.windows(2).enumerate() {
        for (ki, sc) in skel.iter().enumerate() {
            for (kj, sw) in sc.poly.windows(2).enumerate() {
                if crate::geom::seg_touch_degenerate(w[0], w[1], sw[0], sw[1]) {
                    return Err(Error::Invalid(format!(
                        "degenerate skeleton touch: path seg {:?}-{:?} vs {:?} seg {:?}-{:?}",
                        w[0], w[1], sc.side, sw[0], sw[1]
                    )));
                }
                if let Some((t, _)) = seg_intersect(w[0], w[1], sw[0], sw[1]) {
                    out.push((si, t, ki, kj));
                }
            }
        }
    }
    out.sort_by(|a, b| (a.0, a.1.clone()).cmp(&(b.0, b.1.clone())));
    let mut res = Vec::new();
    for (si, t, ki, kj) in out {
        let d = path[si + 1].sub(path[si]);
        let sc = &skel[ki];
        let sd = sc.poly[kj + 1].sub(sc.poly[kj]);
        let side_sign = crate::geom::cross(sd, d);
        if side_sign.is_zero() {
            return Err(Error::Invalid("tangential crossing".into()));
        }
        // cross(skel_dir, path_dir) > 0: the path heads to the left.
        let (into, from) = if side_sign.is_positive() {
            (sc.left, sc.right)
        } else {
            (sc.right, sc.left)
        };
        res.push(ReadCrossing {
            pos: (si, t),
            side: sc.side,
            into,
            from,
        });
    }
    Ok(res)
}

// ---------------------------------------------------------------------------
// Braid twist along a dual-arc generator.

/// Image of a closed arc under the braid twist along the dual arc of
/// internal arc `gen`, with exponent `eps`.
pub fn braid_twist(tr: &Triangulation, gen: ArcIdx, eps: i8, arc: &Curve) -> Result<Curve> {
    assert!(eps == 1 || eps == -1);
    let e = *tr.arcs.get(gen).ok_or(Error::NotInternal(gen))?;
    let frame = QuadFrame::of_edge(tr, e)?;
    let arc = arc.reduced(tr)?;
    for jitter in 0..32 {
        match braid_twist_attempt(tr, &frame, eps, &arc, jitter) {
            Ok(c) => return Ok(c),
            Err(Error::Invalid(_)) if jitter + 1 < 32 => continue,
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

fn braid_twist_attempt(
    tr: &Triangulation,
    frame: &QuadFrame,
    eps: i8,
    arc: &Curve,
    jitter: i128,
) -> Result<Curve> {
    let curves = vec![arc.clone()];
    let arr = Arrangement::new(tr, &curves)?;
    let cells = arc.cells(tr)?;
    let runs = extract_runs(frame, arc, &cells)?;
    if runs.is_empty() {
        return Ok(arc.clone());
    }
    let twist = HalfTwist::new(eps == -1);
    // Old-skeleton cells double as the new ones: the twist reads against the
    // same complex.
    let skel: Vec<SkelCurve> = frame
        .interior_sides()
        .into_iter()
        .map(|(side, [p1, p2])| {
            let [right, left] = side_cells_geometric(frame, side);
            SkelCurve {
                side,
                poly: vec![p1, p2],
                left,
                right,
            }
        })
        .collect();
    let mut pieces: Vec<(Run, Vec<ReadCrossing>, Vec<Pt>)> = Vec::new();
    for run in &runs {
        let path = realize_run(frame, &arr, run, jitter)?;
        let image = twist.apply_polyline(&path);
        let crossings = read_path(&image, &skel)?;
        pieces.push((run.clone(), crossings, image));
    }
    let out = splice(tr, tr, frame, arc, &cells, pieces, |t| t, true)?;
    check_simple(tr, &out)?;
    Ok(out)
}

/// A surgery must turn a simple arc into a simple arc; anything else is a
/// degeneracy the retry loop should dodge.
fn check_simple(tr: &Triangulation, c: &Curve) -> Result<()> {
    let cs = vec![c.clone()];
    let arr = Arrangement::new(tr, &cs)?;
    if arr.self_crossings(0) != 0 {
        return Err(Error::Invalid("surgery produced a non-simple arc".into()));
    }
    Ok(())
}

/// For a straight interior side in the old complex, its (right, left) cells
/// relative to the canonical direction.
fn side_cells_geometric(frame: &QuadFrame, side: SideId) -> [Cell; 2] {
    match side {
        SideId::Edge(_) => [
            Cell {
                tri: frame.tx,
                k: frame.gx,
            },
            Cell {
                tri: frame.ty,
                k: frame.gy,
            },
        ],
        SideId::Spoke(t, c) => [
            Cell { tri: t, k: c },
            Cell {
                tri: t,
                k: (c + 2) % 3,
            },
        ],
    }
}

/// Splices the re-read runs back into the word and reduces in `tr_new`.
/// `deco_map` translates an old quad triangle id (anchor) to the new one
/// (identity for flips; the swap for twists when the twist moves anchors).
#[allow(clippy::too_many_arguments)]
fn splice(
    tr_old: &Triangulation,
    tr_new: &Triangulation,
    frame: &QuadFrame,
    arc: &Curve,
    cells: &[Cell],
    pieces: Vec<(Run, Vec<ReadCrossing>, Vec<Pt>)>,
    deco_map: impl Fn(TriId) -> TriId,
    swap_anchors: bool,
) -> Result<Curve> {
    let _ = tr_old;
    let quad_interior: BTreeSet<SideId> =
        frame.interior_sides().iter().map(|(s, _)| *s).collect();
    // New steps assembled by walking the old word, substituting runs.
    let mut steps: Vec<SideId> = Vec::new();
    let mut start_germ: Option<Germ> = None;
    let mut end_germ: Option<Germ> = None;
    let mut piece_iter = pieces.into_iter().peekable();

    let starts_in_quad = frame.is_quad_tri(cells[0].tri);
    if !starts_in_quad {
        start_germ = Some(arc.start);
    }

    let mut k = 0usize;
    while k <= arc.steps.len() {
        // If a run starts at word position k (either an anchored run at the
        // word start, or a rim entry at step k), emit its crossings.
        let begin_here = match piece_iter.peek() {
            Some((run, _, _)) => match &run.start {
                RunEnd::Anchor { .. } => k == 0,
                RunEnd::Rim { step, .. } => k == *step + 1,
            },
            None => false,
        };
        if begin_here {
            let (run, crossings, image) = piece_iter.next().unwrap();
            // Germ for an anchored run start.
            if let RunEnd::Anchor { tri } = &run.start {
                let new_tri = deco_map(*tri);
                let cell = match crossings.first() {
                    Some(c) => c.from,
                    None => anchored_cell_from_rim(&run.end, tr_new, new_tri)?,
                };
                if swap_anchors {
                    // The twist moved the anchor: with crossings present the
                    // read cell is already correct.
                }
                start_germ = Some(Germ {
                    cell,
                    vert: CellVert::Deco,
                });
                debug_assert_eq!(cell.tri, anchor_tri_of(&crossings, new_tri, &run.end));
            }
            for c in &crossings {
                steps.push(c.side);
            }
            let _ = image;
            if let RunEnd::Anchor { tri } = &run.end {
                let new_tri = deco_map(*tri);
                let cell = match crossings.last() {
                    Some(c) => c.into,
                    None => anchored_cell_from_rim(&run.start, tr_new, new_tri)?,
                };
                end_germ = Some(Germ {
                    cell,
                    vert: CellVert::Deco,
                });
            }
        }
        if k < arc.steps.len() {
            let s = arc.steps[k];
            let emit = match s {
                _ if quad_interior.contains(&s) => false,
                SideId::Edge(_) => {
                    // Rim or outside edge: kept verbatim.
                    true
                }
                SideId::Spoke(t, _) => !frame.is_quad_tri(t),
            };
            if emit {
                steps.push(s);
            }
        }
        k += 1;
    }
    if end_germ.is_none() {
        end_germ = Some(arc.end);
    }
    let start = start_germ.ok_or_else(|| Error::Invalid("missing start germ".into()))?;
    let end = end_germ.ok_or_else(|| Error::Invalid("missing end germ".into()))?;
    let out = Curve::new(start, steps, end);
    out.reduced(tr_new)
}

fn anchor_tri_of(crossings: &[ReadCrossing], new_tri: TriId, _end: &RunEnd) -> TriId {
    crossings.first().map(|c| c.from.tri).unwrap_or(new_tri)
}

/// Germ cell for an anchored run with no interior crossings: the run goes
/// straight from the decoration out through its rim slot, so the germ cell is
/// the cell at that slot.
fn anchored_cell_from_rim(other: &RunEnd, tr_new: &Triangulation, tri: TriId) -> Result<Cell> {
    match other {
        RunEnd::Rim {
            tri: rt, slot: rs, ..
        } => {
            if *rt != tri {
                return Err(Error::Invalid(
                    "crossing-free anchored run does not end in its own triangle".into(),
                ));
            }
            let _ = tr_new;
            Ok(Cell { tri: *rt, k: *rs })
        }
        RunEnd::Anchor { .. } => Err(Error::Invalid(
            "anchored run with no crossings is contractible".into(),
        )),
    }
}

/// Diagnostic: checks embeddedness of the realized runs and of their twist
/// images for one twist application.
#[doc(hidden)]
pub fn twist_diagnostics(
    tr: &Triangulation,
    gen: ArcIdx,
    eps: i8,
    arc: &Curve,
    jitter: i128,
) -> Result<String> {
    use std::fmt::Write;
    let e = *tr.arcs.get(gen).ok_or(Error::NotInternal(gen))?;
    let frame = QuadFrame::of_edge(tr, e)?;
    let arc = arc.reduced(tr)?;
    let curves = vec![arc.clone()];
    let arr = Arrangement::new(tr, &curves)?;
    let cells = arc.cells(tr)?;
    let runs = extract_runs(&frame, &arc, &cells)?;
    let twist = HalfTwist::new(eps == -1);
    let mut out = String::new();
    let mut paths = Vec::new();
    let mut images = Vec::new();
    for run in &runs {
        let p = realize_run(&frame, &arr, run, jitter)?;
        images.push(twist.apply_polyline(&p));
        paths.push(p);
    }
    let count_crossings = |polys: &[Vec<Pt>]| -> usize {
        let mut n = 0;
        for i in 0..polys.len() {
            for j in i..polys.len() {
                for (si, wi) in polys[i].windows(2).enumerate() {
                    for (sj, wj) in polys[j].windows(2).enumerate() {
                        if i == j && sj <= si {
                            continue;
                        }
                        if seg_intersect(wi[0], wi[1], wj[0], wj[1]).is_some() {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    };
    writeln!(out, "runs: {}", runs.len()).ok();
    writeln!(out, "input realization crossings: {}", count_crossings(&paths)).ok();
    writeln!(out, "image crossings: {}", count_crossings(&images)).ok();
    let skel: Vec<SkelCurve> = frame
        .interior_sides()
        .into_iter()
        .map(|(side, [p1, p2])| {
            let [right, left] = side_cells_geometric(&frame, side);
            SkelCurve { side, poly: vec![p1, p2], left, right }
        })
        .collect();
    for (ri, run) in runs.iter().enumerate() {
        writeln!(out, "run {ri}: start {:?} inner {:?} end {:?}", run.start, run.inner, run.end).ok();
        writeln!(out, "  old sides: {:?}", run.inner.iter().map(|&k| arc.steps[k]).collect::<Vec<_>>()).ok();
        let rc = read_path(&images[ri], &skel)?;
        writeln!(out, "  new sides: {:?}", rc.iter().map(|c| (c.side, c.from, c.into)).collect::<Vec<_>>()).ok();
    }
    let mut pieces = Vec::new();
    for (ri, run) in runs.iter().enumerate() {
        let crossings = read_path(&images[ri], &skel)?;
        pieces.push((run.clone(), crossings, images[ri].clone()));
    }
    let spliced = splice(tr, tr, &frame, &arc, &cells, pieces, |t| t, true)?;
    writeln!(out, "result: {:?}", spliced.steps).ok();
    Ok(out)
}

/// One twist attempt at an explicit jitter, for debugging.
#[doc(hidden)]
pub fn braid_twist_at_jitter(
    tr: &Triangulation,
    gen: ArcIdx,
    eps: i8,
    arc: &Curve,
    jitter: i128,
) -> Result<Curve> {
    let e = *tr.arcs.get(gen).ok_or(Error::NotInternal(gen))?;
    let frame = QuadFrame::of_edge(tr, e)?;
    let arc = arc.reduced(tr)?;
    braid_twist_attempt(tr, &frame, eps, &arc, jitter)
}

pub fn apply_braid_word(
    tr: &Triangulation,
    word: &[(ArcIdx, i8)],
    arc: &Curve,
) -> Result<Curve> {
    let mut cur = arc.reduced(tr)?;
    for &(i, eps) in word {
        cur = braid_twist(tr, i, eps, &cur)?;
    }
    Ok(cur)
}

// ---------------------------------------------------------------------------
// Flip transport.

/// Rewrites a curve on `tr_old` as a curve on `tr_new`, where `tr_new` was
/// produced by `tr_old.flip(..)` with the given maps.
pub fn transport(
    tr_old: &Triangulation,
    maps: &FlipMaps,
    tr_new: &Triangulation,
    c: &Curve,
) -> Result<Curve> {
    let e = tr_old.edge_of_arc(maps.arc);
    let frame = QuadFrame::of_edge(tr_old, e)?;
    let arc = c.reduced(tr_old)?;
    for jitter in 0..32 {
        match transport_attempt(tr_old, tr_new, maps, &frame, &arc, jitter) {
            Ok(c) => return Ok(c),
            Err(Error::Invalid(_)) if jitter + 1 < 32 => continue,
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

fn transport_attempt(
    tr_old: &Triangulation,
    tr_new: &Triangulation,
    maps: &FlipMaps,
    frame: &QuadFrame,
    arc: &Curve,
    jitter: i128,
) -> Result<Curve> {
    let curves = vec![arc.clone()];
    let arr = Arrangement::new(tr_old, &curves)?;
    let cells = arc.cells(tr_old)?;
    let runs = extract_runs(frame, arc, &cells)?;
    let skel = flipped_skeleton(frame, maps)?;
    let mut pieces = Vec::new();
    for run in &runs {
        let path = realize_run(frame, &arr, run, jitter)?;
        let crossings = read_path(&path, &skel)?;
        pieces.push((run.clone(), crossings, path));
    }
    // Anchored runs with no new crossings need the rim slot in the new
    // complex; patch anchored_cell_from_rim's slot through the slot map.
    let mut patched = Vec::new();
    for (mut run, crossings, path) in pieces {
        if crossings.is_empty() {
            if let RunEnd::Rim { step, tri, slot } = run.start {
                let (nt, ns) = map_slot(maps, (tri, slot));
                run.start = RunEnd::Rim {
                    step,
                    tri: nt,
                    slot: ns,
                };
            }
            if let RunEnd::Rim { step, tri, slot } = run.end {
                let (nt, ns) = map_slot(maps, (tri, slot));
                run.end = RunEnd::Rim {
                    step,
                    tri: nt,
                    slot: ns,
                };
            }
        }
        patched.push((run, crossings, path));
    }
    let out = splice(tr_old, tr_new, frame, arc, &cells, patched, |t| t, false)?;
    check_simple(tr_new, &out)?;
    Ok(out)
}

fn map_slot(maps: &FlipMaps, old: (TriId, Slot)) -> (TriId, Slot) {
    for &(o, n) in &maps.slot_map {
        if o == old {
            return n;
        }
    }
    old
}

/// The refined skeleton of the flipped triangulation, drawn in the old quad
/// chart: the new diagonal, two fresh spokes, and the four surviving spokes.
fn flipped_skeleton(frame: &QuadFrame, maps: &FlipMaps) -> Result<Vec<SkelCurve>> {
    let e = frame.e;
    let (tx, ty) = (frame.tx, frame.ty);
    let (gx, gy) = (frame.gx, frame.gy);
    let m3 = |x: usize| x % 3;
    let fw = maps.dir == FlipDir::Backward;
    let cell = |t: TriId, k: usize| Cell { tri: t, k };
    let mut skel = Vec::new();
    if fw {
        // New tx corners: gx = B, gx+1 = D, gx+2 = A (keeps Z_X);
        // new ty corners: gy = D, gy+1 = B, gy+2 = C (keeps Z_Y).
        // Diagonal B -> D below Z_X, above Z_Y; Z_X on its right.
        skel.push(SkelCurve {
            side: SideId::Edge(e),
            poly: vec![p_b(), pti(3, -1), pti(-1, 1), p_d()],
            right: cell(tx, gx),
            left: cell(ty, gy),
        });
        // New spoke Z_X - D = Spoke(tx, gx+1).
        skel.push(SkelCurve {
            side: SideId::Spoke(tx, m3(gx + 1)),
            poly: vec![p_zx(), pti(-1, 2), p_d()],
            right: cell(tx, m3(gx + 1)),
            left: cell(tx, gx),
        });
        // New spoke Z_Y - B = Spoke(ty, gy+1).
        skel.push(SkelCurve {
            side: SideId::Spoke(ty, m3(gy + 1)),
            poly: vec![p_zy(), pti(3, -2), p_b()],
            right: cell(ty, m3(gy + 1)),
            left: cell(ty, gy),
        });
    } else {
        // New tx corners: gx = D, gx+1 = B, gx+2 = C (keeps Z_X);
        // new ty corners: gy = B, gy+1 = D, gy+2 = A (keeps Z_Y).
        // Diagonal B -> D above Z_X, below Z_Y; Z_Y on its right.
        skel.push(SkelCurve {
            side: SideId::Edge(e),
            poly: vec![p_b(), pti(3, 1), pti(-1, -1), p_d()],
            right: cell(ty, gy),
            left: cell(tx, gx),
        });
        // New spoke Z_X - D = Spoke(tx, gx).
        skel.push(SkelCurve {
            side: SideId::Spoke(tx, gx),
            poly: vec![p_zx(), pti(-1, -2), p_d()],
            right: cell(tx, gx),
            left: cell(tx, m3(gx + 2)),
        });
        // New spoke Z_Y - B = Spoke(ty, gy).
        skel.push(SkelCurve {
            side: SideId::Spoke(ty, gy),
            poly: vec![p_zy(), pti(3, 2), p_b()],
            right: cell(ty, gy),
            left: cell(ty, m3(gy + 2)),
        });
    }
    // Surviving spokes, renamed; direction deco -> corner, right cell =
    // (t, c) in the new complex.
    let old_geom = |t: TriId, c: usize| -> Pt {
        // old corner coordinates
        if t == tx {
            if c == frame.gx {
                p_c()
            } else if c == (frame.gx + 1) % 3 {
                p_a()
            } else {
                p_b()
            }
        } else if c == frame.gy {
            p_a()
        } else if c == (frame.gy + 1) % 3 {
            p_c()
        } else {
            p_d()
        }
    };
    for &((ot, oc), (nt, nc)) in &maps.spoke_map {
        let z = frame.deco_coord(ot);
        let corner = old_geom(ot, oc);
        skel.push(SkelCurve {
            side: SideId::Spoke(nt, nc),
            poly: vec![z, corner],
            right: cell(nt, nc),
            left: cell(nt, (nc + 2) % 3),
        });
    }
    Ok(skel)
}

// ---------------------------------------------------------------------------
// Germ positions around a decoration, wedge extensions, decomposition.

/// Angular position of a deco-anchored germ around its decoration, as
/// (cell index, fraction along the cell's edge in slot direction).
/// Clockwise order around the decoration is lexicographic in this key
/// (cyclically in the first component).
pub fn germ_position(
    tr: &Triangulation,
    arr: &Arrangement,
    curve_idx: usize,
    at_start: bool,
) -> Result<(usize, Q)> {
    let c = &arr.curves[curve_idx];
    let germ = if at_start { c.start } else { c.end };
    if germ.vert != CellVert::Deco {
        return Err(Error::Invalid("germ not deco-anchored".into()));
    }
    if c.steps.is_empty() {
        return Err(Error::Invalid("empty curve".into()));
    }
    let step = if at_start { 0 } else { c.steps.len() - 1 };
    let occ = crate::order::Occ {
        curve: curve_idx,
        step,
    };
    let s = c.steps[step];
    let n = arr.orders[&s].len() as i128;
    let f = q(arr.rank(occ) as i128 + 1, n + 1);
    // Fraction along the canonical direction; slot direction is CornerA ->
    // CornerB in the germ cell.
    let slot_dir = match s {
        SideId::Edge(e) => {
            let (t0, s0) = tr.edges[e].sides[0];
            (Cell { tri: t0, k: s0 }) == germ.cell
        }
        SideId::Spoke(..) => return Err(Error::Invalid("germ crossing a spoke first".into())),
    };
    let pos = if slot_dir { f } else { Q::one() - f };
    Ok((germ.cell.k, pos))
}

/// Spokes crossed by a connector from germ position `g1` to `g2` around the
/// decoration of triangle `t`, going clockwise (`cw` = true) or
/// anticlockwise.
fn connector_spokes(t: TriId, g1: (usize, Q), g2: (usize, Q), cw: bool) -> Vec<SideId> {
    let (k1, p1) = g1;
    let (k2, p2) = g2;
    let mut out = Vec::new();
    if cw {
        let steps = if k1 == k2 {
            if p2 > p1 {
                0
            } else {
                3
            }
        } else {
            ((k2 + 3) - k1) % 3
        };
        for j in 1..=steps {
            out.push(SideId::Spoke(t, (k1 + j) % 3));
        }
    } else {
        let steps = if k1 == k2 {
            if p2 < p1 {
                0
            } else {
                3
            }
        } else {
            ((k1 + 3) - k2) % 3
        };
        for j in 0..steps {
            out.push(SideId::Spoke(t, ((k1 + 3) - j) % 3));
        }
    }
    out
}

/// Positive extension tau ^ sigma (or the negative one): both arcs oriented
/// and sharing their starting decoration; the result runs through sigma
/// reversed, a connector on one side of the decoration, then tau.
pub fn wedge_extension(
    tr: &Triangulation,
    tau: &Curve,
    sigma: &Curve,
    positive: bool,
) -> Result<Curve> {
    let za = tr.anchor_of(sigma.start);
    let zb = tr.anchor_of(tau.start);
    if za != zb {
        return Err(Error::NoSharedStart);
    }
    let t = match za {
        Anchor::Deco(t) => t,
        _ => return Err(Error::NoSharedStart),
    };
    let connector = if sigma == tau {
        // Self extension: the connector wraps all the way around the
        // decoration; the result is the loop enclosing the arc.
        if !positive {
            return Err(Error::Invalid("negative self extension is trivial".into()));
        }
        let k = sigma.start.cell.k;
        vec![
            SideId::Spoke(t, (k + 1) % 3),
            SideId::Spoke(t, (k + 2) % 3),
            SideId::Spoke(t, k),
        ]
    } else {
        let curves = vec![sigma.clone(), tau.clone()];
        let arr = Arrangement::new(tr, &curves)?;
        if arr.interior(0, 1)? != 0 {
            return Err(Error::InteriorCrossing);
        }
        let g1 = germ_position(tr, &arr, 0, true)?;
        let g2 = germ_position(tr, &arr, 1, true)?;
        // Calibrated so that for duals sharing one decoration, t2 ^ t1
        // equals the braid twist of t2 along t1.
        let cw = !positive;
        connector_spokes(t, g1, g2, cw)
    };
    let rev = sigma.reversed();
    let mut steps = rev.steps.clone();
    steps.extend(connector);
    steps.extend(tau.steps.iter().cloned());
    let out = Curve::new(rev.start, steps, tau.end);
    out.reduced(tr)
}

/// Braid twist of `target` along a general closed arc `core` sharing its
/// starting point, realized through wedge extensions. Requires
/// Int_{S-Delta}(core, target) = 0.
pub fn twist_via_wedge(
    tr: &Triangulation,
    core: &Curve,
    target: &Curve,
    eps: i8,
) -> Result<Curve> {
    let shared_end = tr.anchor_of(core.end) == tr.anchor_of(target.end);
    let pos = eps == 1;
    if !shared_end {
        // Int_Delta = 1: B_core(target) = target ^ core.
        wedge_extension(tr, target, core, pos)
    } else {
        // Int_Delta = 2: B_core(target) = rev(target ^ core) ^ rev(core).
        let mid = wedge_extension(tr, target, core, pos)?;
        wedge_extension(tr, &mid.reversed(), &core.reversed(), pos)
    }
}

/// Lemma-style decomposition: a closed arc not dual to any edge is a braid
/// twist of strictly smaller arcs. Returns (alpha, beta, eps) with
/// B_alpha^eps(beta) = eta and l_T(alpha), l_T(beta) < l_T(eta).
pub fn decompose_arc(tr: &Triangulation, eta: &Curve) -> Result<(Curve, Curve, i8)> {
    let eta = normalize_arc(tr, eta)?;
    if kind(tr, &eta) == ArcKind::Open {
        return Err(Error::Invalid("decompose needs a closed arc".into()));
    }
    for a in 0..tr.num_arcs() {
        let d = dual_arc(tr, a)?;
        if eta.canonical() == d.canonical() {
            return Err(Error::IsDualArc);
        }
    }
    let cells = eta.cells(tr)?;
    let total = l_t(tr, &eta);
    // Candidate cuts: interior passages between consecutive edge crossings.
    let edge_steps: Vec<usize> = eta
        .steps
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, SideId::Edge(_)))
        .map(|(k, _)| k)
        .collect();
    for w in edge_steps.windows(2) {
        let (k1, k2) = (w[0], w[1]);
        let cut_tri = cells[k1 + 1].tri;
        // sigma: from the cut decoration back to eta's start.
        let sigma = Curve::new(
            Germ {
                cell: cells[k1 + 1],
                vert: CellVert::Deco,
            },
            {
                let mut s: Vec<SideId> = eta.steps[..=k1].to_vec();
                s.reverse();
                s
            },
            eta.start,
        )
        .reduced(tr)?;
        // tau: from the cut decoration to eta's end.
        let tau = Curve::new(
            Germ {
                cell: cells[k2],
                vert: CellVert::Deco,
            },
            eta.steps[k2..].to_vec(),
            eta.end,
        )
        .reduced(tr)?;
        let _ = cut_tri;
        if l_t(tr, &sigma) >= total || l_t(tr, &tau) >= total {
            continue;
        }
        if normalize_arc(tr, &sigma).is_err() || normalize_arc(tr, &tau).is_err() {
            continue;
        }
        {
            let pair = vec![sigma.clone(), tau.clone()];
            let arr = Arrangement::new(tr, &pair)?;
            if arr.interior(0, 1)? != 0 {
                continue;
            }
        }
        for (alpha, beta) in [(&sigma, &tau), (&tau, &sigma)] {
            for eps in [1i8, -1] {
                if let Ok(rebuilt) = twist_via_wedge(tr, alpha, beta, eps) {
                    if rebuilt.canonical() == eta.canonical() {
                        return Ok(((*alpha).clone(), (*beta).clone(), eps));
                    }
                }
            }
        }
    }
    Err(Error::Invalid("no decomposition found".into()))
}

// ---------------------------------------------------------------------------
// Corpus generation.

pub type BraidWord = Vec<(ArcIdx, i8)>;

/// Deterministic pseudo-random braid words applied to dual arcs, arcs
/// deduplicated by normalized word up to orientation reversal. Always starts
/// with the dual arcs themselves.
pub fn generate_corpus(
    tr: &Triangulation,
    seed: u64,
    max_len: usize,
    count: usize,
) -> Result<Vec<(BraidWord, Curve)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = tr.num_arcs();
    let mut out: Vec<(BraidWord, Curve)> = Vec::new();
    let mut seen: BTreeSet<Curve> = BTreeSet::new();
    for a in 0..n {
        let d = dual_arc(tr, a)?;
        if seen.insert(d.canonical()) {
            out.push((vec![], d));
        }
        if out.len() >= count {
            return Ok(out);
        }
    }
    if max_len == 0 {
        return Ok(out);
    }
    let mut attempts = 0usize;
    while out.len() < count && attempts < count * 40 {
        attempts += 1;
        let base = rng.gen_range(0..n);
        let len = rng.gen_range(1..=max_len);
        let mut word: BraidWord = Vec::new();
        for _ in 0..len {
            let i = rng.gen_range(0..n);
            let eps = if rng.gen_bool(0.5) { 1 } else { -1 };
            word.push((i, eps));
        }
        let arc = apply_braid_word(tr, &word, &dual_arc(tr, base)?)?;
        if seen.insert(arc.canonical()) {
            let mut full = vec![(base, 0i8)];
            full.clear();
            full.extend(word.iter().cloned());
            out.push((full, arc));
        }
    }
    Ok(out)
}
