//! The Carter surface of a flat or virtual diagram and its Z2 homology.
//!
//! The surface is built as a combinatorial map. Every endpoint position `p`
//! of the Gauss word contributes two darts: `out(p) = 2p`, the start of arc
//! `p`, and `in(p) = 2p + 1`, the end of arc `p - 1`. Arcs are the edges, so
//! a diagram with `n` crossings has `V = n`, `E = 2n`. At a crossing whose
//! arrow head sits at position `h` and tail at `t`, the cyclic order of darts
//! is `in(h), in(t), out(h), out(t)`; opposite half-edges are two apart.
//! For a virtual crossing this is the order (in-under, in-over, out-under,
//! out-over) at a positive crossing and its mirror at a negative one, which
//! is why only the flat shadow is needed.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::diagram::{ChordDiagram, DecoratedDiagram, Level};
use crate::error::{Error, Result};
use crate::parity::{GroupDescriptor, GroupElement, ParityAssignment};
use crate::z2::{BitMatrix, BitVec, EchelonBasis};

#[inline]
pub fn out_dart(p: usize) -> usize {
    2 * p
}

#[inline]
pub fn in_dart(p: usize) -> usize {
    2 * p + 1
}

/// Position at which a dart sits.
#[inline]
pub fn dart_position(d: usize) -> usize {
    d / 2
}

/// The combinatorial map of a diagram on its canonical surface.
#[derive(Clone, Debug)]
pub struct CarterSurface {
    word: Vec<u32>,
    rotation: Vec<usize>,
    rotation_inv: Vec<usize>,
    faces: Vec<Vec<usize>>,
    face_of: Vec<usize>,
}

impl CarterSurface {
    /// Builds the surface from arrow data. Needs a flat or virtual diagram.
    pub fn new(d: &DecoratedDiagram) -> Result<Self> {
        if d.level() == Level::Free {
            return Err(Error::InsufficientDecoration);
        }
        let base = d.base();
        let len = base.len();
        let mut rotation = vec![0; 2 * len];
        for l in 0..base.n() as u32 {
            let [a, b] = base.positions(l);
            let (h, t) = if d.heads()[a] { (a, b) } else { (b, a) };
            let cyc = [in_dart(h), in_dart(t), out_dart(h), out_dart(t)];
            for k in 0..4 {
                rotation[cyc[k]] = cyc[(k + 1) % 4];
            }
        }
        let mut rotation_inv = vec![0; 2 * len];
        for (d, &r) in rotation.iter().enumerate() {
            rotation_inv[r] = d;
        }
        let mut s = CarterSurface {
            word: base.word().to_vec(),
            rotation,
            rotation_inv,
            faces: Vec::new(),
            face_of: vec![usize::MAX; 2 * len],
        };
        for start in 0..2 * len {
            if s.face_of[start] != usize::MAX {
                continue;
            }
            let f = s.faces.len();
            let mut orbit = Vec::new();
            let mut d = start;
            loop {
                s.face_of[d] = f;
                orbit.push(d);
                d = s.next_in_face(d);
                if d == start {
                    break;
                }
            }
            s.faces.push(orbit);
        }
        Ok(s)
    }

    fn len(&self) -> usize {
        self.word.len()
    }

    pub fn vertex_count(&self) -> usize {
        if self.word.is_empty() {
            1
        } else {
            self.word.len() / 2
        }
    }

    pub fn edge_count(&self) -> usize {
        self.word.len().max(1)
    }

    pub fn face_count(&self) -> usize {
        if self.word.is_empty() {
            2
        } else {
            self.faces.len()
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn genus(&self) -> usize {
        ((2 - self.euler_characteristic()) / 2) as usize
    }

    /// Edge involution: the other end of the arc carrying `d`.
    pub fn alpha(&self, d: usize) -> usize {
        let p = dart_position(d);
        let len = self.len();
        if d % 2 == 0 {
            in_dart((p + 1) % len)
        } else {
            out_dart((p + len - 1) % len)
        }
    }

    /// Next dart counterclockwise around the same crossing.
    pub fn rotate(&self, d: usize) -> usize {
        self.rotation[d]
    }

    pub fn rotate_back(&self, d: usize) -> usize {
        self.rotation_inv[d]
    }

    /// Face permutation: leave along `d`, arrive at `alpha(d)`, turn once.
    pub fn next_in_face(&self, d: usize) -> usize {
        self.rotation[self.alpha(d)]
    }

    /// Arc (edge index) carried by a dart.
    pub fn arc(&self, d: usize) -> usize {
        let p = dart_position(d);
        if d % 2 == 0 {
            p
        } else {
            (p + self.len() - 1) % self.len()
        }
    }

    /// Crossing label at which a dart sits.
    pub fn vertex(&self, d: usize) -> u32 {
        self.word[dart_position(d)]
    }

    /// Dart orbits of the faces; each dart is the departure of one edge
    /// traversal along the face boundary.
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face_of(&self, d: usize) -> usize {
        self.face_of[d]
    }

    /// Arcs along a face boundary in traversal order.
    pub fn face_arcs(&self, f: usize) -> Vec<usize> {
        self.faces[f].iter().map(|&d| self.arc(d)).collect()
    }

    /// Crossings at the corners of a face, in traversal order.
    pub fn face_corners(&self, f: usize) -> Vec<u32> {
        self.faces[f]
            .iter()
            .map(|&d| self.vertex(self.alpha(d)))
            .collect()
    }

    /// Whether the given arcs are exactly the boundary of one face.
    pub fn is_face_boundary(&self, arcs: &[usize]) -> bool {
        let Some(&first) = arcs.first() else {
            return false;
        };
        let mut want: Vec<usize> = arcs.to_vec();
        want.sort_unstable();
        for d in [out_dart(first), in_dart((first + 1) % self.len())] {
            let mut got = self.face_arcs(self.face_of[d]);
            got.sort_unstable();
            if got == want {
                return true;
            }
        }
        false
    }

    /// Two-colouring of faces with faces on the two sides of every edge
    /// differently coloured, if one exists.
    pub fn face_colouring(&self) -> Option<Vec<bool>> {
        if self.word.is_empty() {
            return Some(vec![false, true]);
        }
        let nf = self.faces.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nf];
        for d in 0..2 * self.len() {
            let (a, b) = (self.face_of[d], self.face_of[self.alpha(d)]);
            adj[a].push(b);
        }
        let mut colour: Vec<Option<bool>> = vec![None; nf];
        for s in 0..nf {
            if colour[s].is_some() {
                continue;
            }
            colour[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(f) = queue.pop_front() {
                let c = colour[f].unwrap();
                for &g in &adj[f] {
                    match colour[g] {
                        None => {
                            colour[g] = Some(!c);
                            queue.push_back(g);
                        }
                        Some(cg) if cg == c => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(colour.into_iter().map(Option::unwrap).collect())
    }

    pub fn checkerboard(&self) -> bool {
        self.face_colouring().is_some()
    }

    /// Boundary matrix `faces -> edges` as rows of edge vectors.
    pub fn face_boundaries(&self) -> Vec<BitVec> {
        if self.word.is_empty() {
            // both discs are bounded by the single loop
            return vec![BitVec::unit(1, 0); 2];
        }
        (0..self.faces.len())
            .map(|f| {
                let mut v = BitVec::zeros(self.edge_count());
                for a in self.face_arcs(f) {
                    v.flip(a);
                }
                v
            })
            .collect()
    }

    /// Boundary matrix `edges -> vertices` (rows are vertices).
    pub fn edge_boundary(&self) -> BitMatrix {
        let len = self.len();
        let mut m = BitMatrix::zeros(self.vertex_count(), self.edge_count());
        if len == 0 {
            return m;
        }
        for p in 0..len {
            m.flip(self.word[p] as usize, p);
            m.flip(self.word[(p + 1) % len] as usize, p);
        }
        m
    }

    /// Crossings of the left push-off of a closed walk with the edges of the
    /// graph, as an edge vector mod 2. The walk is given by its departure
    /// darts; consecutive entries must sit at a common crossing.
    pub fn pushoff(&self, departures: &[usize]) -> Result<BitVec> {
        let mut v = BitVec::zeros(self.edge_count());
        let k = departures.len();
        for i in 0..k {
            let arrive = self.alpha(departures[i]);
            let leave = departures[(i + 1) % k];
            if self.vertex(arrive) != self.vertex(leave) {
                return Err(Error::IllegalWalk(format!(
                    "step {i} arrives at crossing {} but leaves from {}",
                    self.vertex(arrive) + 1,
                    self.vertex(leave) + 1
                )));
            }
            if arrive == leave {
                return Err(Error::IllegalWalk(format!("step {i} backtracks")));
            }
            let mut d = self.rotate(arrive);
            while d != leave {
                v.flip(self.arc(d));
                d = self.rotate(d);
            }
        }
        Ok(v)
    }

    /// Splits an even-degree edge set into closed walks (departure darts).
    pub fn closed_walks(&self, edges: &BitVec) -> Result<Vec<Vec<usize>>> {
        let len = self.len();
        let mut partner = vec![usize::MAX; 2 * len];
        let mut pending: Vec<Option<usize>> = vec![None; self.vertex_count()];
        for d in 0..2 * len {
            if !edges.get(self.arc(d)) {
                continue;
            }
            let v = self.vertex(d) as usize;
            match pending[v].take() {
                Some(e) => {
                    partner[d] = e;
                    partner[e] = d;
                }
                None => pending[v] = Some(d),
            }
        }
        if pending.iter().any(Option::is_some) {
            return Err(Error::NotACycle);
        }
        let mut used = vec![false; 2 * len];
        let mut walks = Vec::new();
        for start in 0..2 * len {
            if used[start] || partner[start] == usize::MAX {
                continue;
            }
            let mut walk = Vec::new();
            let mut d = start;
            loop {
                used[d] = true;
                used[self.alpha(d)] = true;
                walk.push(d);
                d = partner[self.alpha(d)];
                if d == start {
                    break;
                }
                if used[d] {
                    // the start dart was entered from the far end; restart from its partner
                    break;
                }
            }
            walks.push(walk);
        }
        Ok(walks)
    }

    /// Mod-2 intersection number of two cycles given as edge vectors.
    pub fn intersection(&self, a: &BitVec, b: &BitVec) -> Result<bool> {
        let mut total = false;
        for w in self.closed_walks(a)? {
            total ^= self.pushoff(&w)?.dot(b);
        }
        Ok(total)
    }

    /// Departure darts of the half `K_{v,side}`: side 1 runs from the first
    /// passage of `v` to the second, side 2 from the second back to the first.
    pub fn half_walk(&self, v: u32, side: u8) -> Vec<usize> {
        let [p, q] = positions_of(&self.word, v);
        let len = self.len();
        let (from, to) = if side == 1 { (p, q) } else { (q, p + len) };
        (from..to).map(|k| out_dart(k % len)).collect()
    }
}

fn positions_of(word: &[u32], v: u32) -> [usize; 2] {
    let mut it = word.iter().enumerate().filter(|(_, &l)| l == v).map(|(i, _)| i);
    [it.next().unwrap(), it.next().unwrap()]
}

/// Builds the surface of a flat or virtual diagram.
pub fn carter_surface(d: &DecoratedDiagram) -> Result<CarterSurface> {
    CarterSurface::new(d)
}

/// Edge vector of a half: the arcs from one passage of `v` to the other.
pub fn half_cycle(d: &ChordDiagram, v: u32, side: u8) -> BitVec {
    let len = d.len();
    let mut e = BitVec::zeros(len.max(1));
    let [p, q] = d.positions(v);
    let (from, to) = if side == 1 { (p, q) } else { (q, p + len) };
    for k in from..to {
        e.set(k % len, true);
    }
    e
}

/// Edge vector of the whole curve.
pub fn curve_cycle(d: &ChordDiagram) -> BitVec {
    let mut e = BitVec::zeros(d.len().max(1));
    for k in 0..d.len().max(1) {
        e.set(k, true);
    }
    e
}

/// A class in `H_1(S; Z2)`, as coordinates in the basis of [`ChainComplex`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct H1Class {
    pub coords: Vec<u8>,
}

impl H1Class {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn bits(&self) -> BitVec {
        BitVec::from_bits(&self.coords.iter().map(|&c| c == 1).collect::<Vec<_>>())
    }
}

/// Z2 cellular chain complex of a Carter surface with a chosen basis of
/// `H_1 = ker d1 / im d2`. Basis cycles are kernel vectors of `d1` (one per
/// free edge column, in edge order) that are independent modulo boundaries.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    d1: BitMatrix,
    boundaries: Vec<BitVec>,
    basis: Vec<BitVec>,
    reducer: EchelonBasis,
    tag_to_basis: Vec<Option<usize>>,
}

impl ChainComplex {
    pub fn new(s: &CarterSurface) -> Self {
        let d1 = s.edge_boundary();
        let boundaries = s.face_boundaries();
        let cycles = d1.kernel();
        let mut reducer = EchelonBasis::new(s.edge_count(), cycles.len());
        for b in &boundaries {
            reducer.insert(b, BitVec::zeros(cycles.len()));
        }
        let mut basis = Vec::new();
        let mut tag_to_basis = vec![None; cycles.len()];
        for (i, z) in cycles.iter().enumerate() {
            if reducer.insert(z, BitVec::unit(cycles.len(), i)) {
                tag_to_basis[i] = Some(basis.len());
                basis.push(z.clone());
            }
        }
        ChainComplex {
            d1,
            boundaries,
            basis,
            reducer,
            tag_to_basis,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVec] {
        &self.basis
    }

    pub fn boundaries(&self) -> &[BitVec] {
        &self.boundaries
    }

    /// `d1 * d2 = 0`.
    pub fn is_complex(&self) -> bool {
        self.boundaries.iter().all(|b| self.d1.mul_vec(b).is_zero())
    }

    pub fn class_of(&self, chain: &BitVec) -> Result<H1Class> {
        if !self.d1.mul_vec(chain).is_zero() {
            return Err(Error::NotACycle);
        }
        let (rem, tag) = self.reducer.reduce(chain);
        debug_assert!(rem.is_zero());
        let mut coords = vec![0u8; self.dim()];
        for t in tag.ones() {
            let b = self.tag_to_basis[t].expect("dependent cycles are never inserted");
            coords[b] ^= 1;
        }
        Ok(H1Class { coords })
    }

    /// Edge-vector representative of a class.
    pub fn representative(&self, c: &H1Class) -> BitVec {
        let mut v = BitVec::zeros(self.d1.ncols());
        for (i, &x) in c.coords.iter().enumerate() {
            if x == 1 {
                v.xor_assign(&self.basis[i]);
            }
        }
        v
    }
}

/// Builds the chain complex of a surface.
pub fn h1(s: &CarterSurface) -> ChainComplex {
    ChainComplex::new(s)
}

pub fn homology_class(cx: &ChainComplex, chain: &BitVec) -> Result<H1Class> {
    cx.class_of(chain)
}

pub fn knot_class(cx: &ChainComplex, d: &ChordDiagram) -> H1Class {
    cx.class_of(&curve_cycle(d))
        .expect("the whole curve is a cycle")
}

/// Projection `H_1(S) -> H_1(S)/[K]`: if `[K] != 0`, kill its leading
/// coordinate by adding `[K]` and drop that coordinate.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    knot: BitVec,
    pivot: Option<usize>,
    dim: usize,
}

impl QuotientMap {
    pub fn new(knot: &H1Class) -> Self {
        let k = knot.bits();
        QuotientMap {
            pivot: k.first_one(),
            dim: knot.coords.len(),
            knot: k,
        }
    }

    pub fn target_dim(&self) -> usize {
        self.dim - self.pivot.is_some() as usize
    }

    pub fn project(&self, c: &H1Class) -> GroupElement {
        let mut b = c.bits();
        if let Some(j) = self.pivot {
            if b.get(j) {
                b.xor_assign(&self.knot);
            }
        }
        let vals = (0..self.dim)
            .filter(|&i| Some(i) != self.pivot)
            .map(|i| b.get(i) as i64)
            .collect();
        GroupElement(vals)
    }
}

/// Homological parity: the class of the first half at each crossing in
/// `H_1(S; Z2)/[K]`.
pub fn homological_parity(d: &DecoratedDiagram, s: &CarterSurface) -> Result<ParityAssignment> {
    homological_parity_side(d, s, 1)
}

/// Homological parity computed from the chosen half (1 or 2).
pub fn homological_parity_side(
    d: &DecoratedDiagram,
    s: &CarterSurface,
    side: u8,
) -> Result<ParityAssignment> {
    let cx = ChainComplex::new(s);
    let base = d.base();
    let q = QuotientMap::new(&knot_class(&cx, base));
    let group = GroupDescriptor::Z2k(q.target_dim());
    let values = (0..base.n() as u32)
        .map(|v| {
            let c = cx.class_of(&half_cycle(base, v, side))?;
            Ok(q.project(&c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParityAssignment::new(group, base.vertex_ids().to_vec(), values))
}

/// Gram matrix of the intersection pairing on the chosen `H_1` basis.
pub fn intersection_form(s: &CarterSurface, cx: &ChainComplex) -> BitMatrix {
    let k = cx.dim();
    let mut m = BitMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let x = s
                .intersection(&cx.basis()[i], &cx.basis()[j])
                .expect("basis vectors are cycles");
            m.set(i, j, x);
        }
    }
    m
}

/// `chi_gamma(v) = <gamma, K_{v,1}>` for the cycle `gamma`. Requires `[K] = 0`.
pub fn characteristic_parity_for(
    d: &DecoratedDiagram,
    s: &CarterSurface,
    gamma: &BitVec,
) -> Result<ParityAssignment> {
    if !s.checkerboard() {
        return Err(Error::NotColourable);
    }
    let base = d.base();
    let values = (0..base.n() as u32)
        .map(|v| {
            let x = s.pushoff(&s.half_walk(v, 1))?.dot(gamma);
            Ok(GroupElement::z2(x))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParityAssignment::new(
        GroupDescriptor::Z2,
        base.vertex_ids().to_vec(),
        values,
    ))
}

/// Sum of first halves over the given crossings.
pub fn sum_of_halves(d: &ChordDiagram, crossings: impl IntoIterator<Item = u32>) -> BitVec {
    let mut g = BitVec::zeros(d.len().max(1));
    for w in crossings {
        g.xor_assign(&half_cycle(d, w, 1));
    }
    g
}

/// Characteristic parity of `gamma_a`, the sum of one half per crossing.
pub fn characteristic_parity_a(d: &DecoratedDiagram) -> Result<ParityAssignment> {
    let s = CarterSurface::new(d)?;
    let gamma = sum_of_halves(d.base(), 0..d.n() as u32);
    characteristic_parity_for(d, &s, &gamma)
}

/// Dimension of `H_1(K; Z2)/[K]` for the framed 4-graph as a 1-complex.
pub fn graph_quotient_homology(d: &ChordDiagram) -> usize {
    if d.is_unknot() {
        return 0;
    }
    let len = d.len();
    let mut d1 = BitMatrix::zeros(d.n(), len);
    for p in 0..len {
        d1.flip(d.label_at(p) as usize, p);
        d1.flip(d.label_at((p + 1) % len) as usize, p);
    }
    let cycles = d1.kernel();
    let mut span = EchelonBasis::new(len, 0);
    for z in &cycles {
        span.insert(z, BitVec::zeros(0));
    }
    let mut quotient = EchelonBasis::new(len, 0);
    quotient.insert(&curve_cycle(d), BitVec::zeros(0));
    for z in &cycles {
        quotient.insert(z, BitVec::zeros(0));
    }
    debug_assert!(span.contains(&curve_cycle(d)));
    quotient.rank() - 1
}

/// One traversal of an arc along a walk on the 4-graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcStep {
    pub arc: usize,
    pub forward: bool,
}

/// A closed walk on the 4-graph with its rotation points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub steps: Vec<ArcStep>,
}

impl Walk {
    /// Departure darts of a forward walk (as used by the surface map).
    pub fn from_departures(len: usize, departures: &[usize]) -> Walk {
        let steps = departures
            .iter()
            .map(|&d| {
                let p = dart_position(d);
                if d % 2 == 0 {
                    ArcStep { arc: p, forward: true }
                } else {
                    ArcStep {
                        arc: (p + len - 1) % len,
                        forward: false,
                    }
                }
            })
            .collect();
        Walk { steps }
    }

    /// The half `K_{v,side}` as a walk.
    pub fn half(d: &ChordDiagram, v: u32, side: u8) -> Walk {
        let len = d.len();
        let [p, q] = d.positions(v);
        let (from, to) = if side == 1 { (p, q) } else { (q, p + len) };
        Walk {
            steps: (from..to)
                .map(|k| ArcStep {
                    arc: k % len,
                    forward: true,
                })
                .collect(),
        }
    }

    pub fn edge_vector(&self, len: usize) -> BitVec {
        let mut e = BitVec::zeros(len.max(1));
        for s in &self.steps {
            e.flip(s.arc);
        }
        e
    }

    /// Checks legality and returns the rotation points (crossing labels).
    pub fn rotation_points(&self, d: &ChordDiagram) -> Result<Vec<u32>> {
        let len = d.len();
        if self.steps.is_empty() {
            return Ok(Vec::new());
        }
        if len == 0 {
            return Err(Error::IllegalWalk("the trivial diagram has no arcs".into()));
        }
        // (arrival position, departure position) at each junction
        let mut points = Vec::new();
        let k = self.steps.len();
        for i in 0..k {
            let a = self.steps[i];
            let b = self.steps[(i + 1) % k];
            if a.arc >= len || b.arc >= len {
                return Err(Error::IllegalWalk(format!("arc out of range at step {i}")));
            }
            // endpoint reached by a, endpoint left by b
            let (reach, reach_dart) = if a.forward {
                ((a.arc + 1) % len, in_dart((a.arc + 1) % len))
            } else {
                (a.arc, out_dart(a.arc))
            };
            let (leave, leave_dart) = if b.forward {
                (b.arc, out_dart(b.arc))
            } else {
                ((b.arc + 1) % len, in_dart((b.arc + 1) % len))
            };
            if d.label_at(reach) != d.label_at(leave) {
                return Err(Error::IllegalWalk(format!(
                    "steps {i} and {} do not meet at a crossing",
                    (i + 1) % k
                )));
            }
            if reach_dart == leave_dart {
                return Err(Error::IllegalWalk(format!("backtrack after step {i}")));
            }
            // straight through: in(p) <-> out(p) at the same position
            if reach != leave {
                points.push(d.label_at(reach));
            }
        }
        Ok(points)
    }
}

/// Class of a closed walk in `H_1(K; Z2)/[K]` in the basis of halves,
/// computed twice: by linear algebra on the edge vector, and as the sum of
/// the halves at the walk's rotation points. Returns both.
pub fn path_class(d: &ChordDiagram, walk: &Walk) -> Result<(Vec<u8>, Vec<u8>)> {
    let rot = walk.rotation_points(d)?;
    let n = d.n();
    let mut by_rotation = vec![0u8; n];
    for v in rot {
        by_rotation[v as usize] ^= 1;
    }
    let len = d.len();
    let z = walk.edge_vector(len);
    // basis: halves (tags 0..n) and the whole curve (tag n)
    let mut b = EchelonBasis::new(len.max(1), n + 1);
    b.insert(&curve_cycle(d), BitVec::unit(n + 1, n));
    for v in 0..n as u32 {
        b.insert(&half_cycle(d, v, 1), BitVec::unit(n + 1, v as usize));
    }
    let (rem, tag) = b.reduce(&z);
    if !rem.is_zero() {
        return Err(Error::NotACycle);
    }
    let by_algebra = (0..n).map(|i| tag.get(i) as u8).collect();
    Ok((by_algebra, by_rotation))
}

/// Face-boundary walks of a surface, for the cell relations.
pub fn face_walks(s: &CarterSurface, len: usize) -> Vec<Walk> {
    s.faces()
        .iter()
        .map(|f| Walk::from_departures(len, f))
        .collect()
}

/// Serializable summary of a surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceReport {
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "E")]
    pub e: usize,
    #[serde(rename = "F")]
    pub f: usize,
    pub chi: i64,
    pub genus: usize,
    pub colourable: bool,
    pub h1_dim: usize,
}

impl SurfaceReport {
    pub fn new(s: &CarterSurface) -> Self {
        SurfaceReport {
            v: s.vertex_count(),
            e: s.edge_count(),
            f: s.face_count(),
            chi: s.euler_characteristic(),
            genus: s.genus(),
            colourable: s.checkerboard(),
            h1_dim: ChainComplex::new(s).dim(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_code;

    fn surf(code: &str) -> (DecoratedDiagram, CarterSurface) {
        let d = parse_code(code, Level::Virtual).unwrap();
        let s = CarterSurface::new(&d).unwrap();
        (d, s)
    }

    const TREFOIL: &str = "O1+ U2+ O3+ U1+ O2+ U3+";

    #[test]
    fn empty_curve_is_null_homologous() {
        let (d, s) = surf("");
        let cx = h1(&s);
        assert_eq!((s.genus(), cx.dim()), (0, 0));
        assert!(knot_class(&cx, d.base()).is_zero());
    }
    const VIRTUAL_TREFOIL: &str = "O1+ O2+ U1+ U2+";

    #[test]
    fn genus_examples() {
        let (_, s) = surf(TREFOIL);
        assert_eq!((s.face_count(), s.genus()), (5, 0));
        let (_, s) = surf(VIRTUAL_TREFOIL);
        assert_eq!((s.face_count(), s.genus()), (2, 1));
        let (_, s) = surf("O1+ U1+");
        assert_eq!((s.face_count(), s.genus()), (3, 0));
        let (_, s) = surf("");
        assert_eq!((s.vertex_count(), s.edge_count(), s.face_count()), (1, 1, 2));
    }

    #[test]
    fn free_level_has_no_surface() {
        let d = parse_code("1 1", Level::Free).unwrap();
        assert_eq!(CarterSurface::new(&d).err(), Some(Error::InsufficientDecoration));
    }

    #[test]
    fn colourings() {
        assert!(surf(TREFOIL).1.checkerboard());
        assert!(surf("O1+ U1+").1.checkerboard());
        // both faces of the virtual trefoil touch themselves across an edge
        assert!(!surf(VIRTUAL_TREFOIL).1.checkerboard());
    }

    #[test]
    fn homology_dimensions() {
        for code in [TREFOIL, VIRTUAL_TREFOIL, "O1+ U1+", "O1- O2+ O3- U1- U2+ U3-"] {
            let (_, s) = surf(code);
            let cx = h1(&s);
            assert!(cx.is_complex());
            assert_eq!(cx.dim(), 2 * s.genus(), "{code}");
            let form = intersection_form(&s, &cx);
            assert_eq!(form, form.transpose());
            assert_eq!(form.rank(), 2 * s.genus());
            for i in 0..cx.dim() {
                assert!(!form.get(i, i));
            }
            for b in cx.boundaries() {
                assert!(cx.class_of(b).unwrap().is_zero());
            }
        }
        let (_, s) = surf(VIRTUAL_TREFOIL);
        let form = intersection_form(&s, &h1(&s));
        assert!(form.get(0, 1) && form.get(1, 0));
    }

    #[test]
    fn halves() {
        let (d, s) = surf("O1+ U1+");
        let loop_side = half_cycle(d.base(), 0, 1);
        assert_eq!(loop_side.to_bits(), vec![1, 0]);
        let mut both = half_cycle(d.base(), 0, 2);
        both.xor_assign(&loop_side);
        assert_eq!(both, curve_cycle(d.base()));
        let (d, _) = surf(VIRTUAL_TREFOIL);
        assert_eq!(half_cycle(d.base(), 0, 1).to_bits(), vec![1, 1, 0, 0]);
        assert_eq!(s.half_walk(0, 1), vec![out_dart(0)]);
    }

    #[test]
    fn homological_parity_examples() {
        let (d, s) = surf(TREFOIL);
        let hp = homological_parity(&d, &s).unwrap();
        assert!(hp.values().iter().all(|v| v.0.iter().all(|&c| c == 0)));
        let (d, s) = surf(VIRTUAL_TREFOIL);
        let hp = homological_parity(&d, &s).unwrap();
        assert_eq!(hp.at(0), hp.at(1));
        assert!(hp.is_odd(0));
        let hp2 = homological_parity_side(&d, &s, 2).unwrap();
        assert_eq!(hp, hp2);
    }

    #[test]
    fn characteristic_parity_examples() {
        let (d, _) = surf(TREFOIL);
        assert!(characteristic_parity_a(&d).unwrap().bits().iter().all(|&b| b == 0));
        let (d, _) = surf(VIRTUAL_TREFOIL);
        assert_eq!(characteristic_parity_a(&d), Err(Error::NotColourable));
    }

    #[test]
    fn graph_homology_is_n() {
        assert_eq!(graph_quotient_homology(&ChordDiagram::unknot()), 0);
        let d = ChordDiagram::from_word(&[1, 2, 1, 2]).unwrap();
        assert_eq!(graph_quotient_homology(&d), 2);
        let d = ChordDiagram::from_word(&[1, 2, 3, 4, 1, 3, 2, 4]).unwrap();
        assert_eq!(graph_quotient_homology(&d), 4);
    }

    #[test]
    fn path_classes() {
        let d = ChordDiagram::from_word(&[1, 2, 3, 1, 2, 3]).unwrap();
        let whole = Walk {
            steps: (0..6).map(|a| ArcStep { arc: a, forward: true }).collect(),
        };
        let (alg, rot) = path_class(&d, &whole).unwrap();
        assert_eq!(alg, rot);
        assert!(alg.iter().all(|&c| c == 0));
        let half = Walk::half(&d, 1, 1);
        let (alg, rot) = path_class(&d, &half).unwrap();
        assert_eq!(alg, vec![0, 1, 0]);
        assert_eq!(alg, rot);
        let bad = Walk {
            steps: vec![ArcStep { arc: 0, forward: true }, ArcStep { arc: 3, forward: true }],
        };
        assert!(matches!(path_class(&d, &bad), Err(Error::IllegalWalk(_))));
        let (dd, s) = surf(TREFOIL);
        for w in face_walks(&s, dd.base().len()) {
            let (alg, rot) = path_class(dd.base(), &w).unwrap();
            assert_eq!(alg, rot);
        }
    }
}
