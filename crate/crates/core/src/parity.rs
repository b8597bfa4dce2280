//! Group-valued crossing labellings and their axioms along move traces.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{ChordDiagram, VertexId};
use crate::error::{Error, Result};
use crate::moves::{MoveKind, MoveTrace};

/// Coefficient group of a parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum GroupDescriptor {
    #[serde(rename = "Z2")]
    Z2,
    #[serde(rename = "Z2^k")]
    Z2k { k: usize },
    #[serde(rename = "Z^k")]
    Zk { k: usize },
}

impl GroupDescriptor {
    #[allow(non_snake_case)]
    pub fn Z2k(k: usize) -> Self {
        GroupDescriptor::Z2k { k }
    }

    #[allow(non_snake_case)]
    pub fn Zk(k: usize) -> Self {
        GroupDescriptor::Zk { k }
    }

    /// Number of coordinates of an element.
    pub fn width(&self) -> usize {
        match *self {
            GroupDescriptor::Z2 => 1,
            GroupDescriptor::Z2k { k } | GroupDescriptor::Zk { k } => k,
        }
    }

    fn is_mod2(&self) -> bool {
        !matches!(self, GroupDescriptor::Zk { .. })
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.width()])
    }

    /// Brings coordinates into normal form (mod 2 where applicable).
    pub fn normalize(&self, mut x: GroupElement) -> GroupElement {
        if self.is_mod2() {
            for c in &mut x.0 {
                *c = c.rem_euclid(2);
            }
        }
        x
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        debug_assert_eq!(a.0.len(), b.0.len());
        self.normalize(GroupElement(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()))
    }

    pub fn negate(&self, a: &GroupElement) -> GroupElement {
        self.normalize(GroupElement(a.0.iter().map(|x| -x).collect()))
    }

    pub fn is_zero(&self, a: &GroupElement) -> bool {
        self.normalize(a.clone()).0.iter().all(|&c| c == 0)
    }

    pub fn eq(&self, a: &GroupElement, b: &GroupElement) -> bool {
        self.normalize(a.clone()) == self.normalize(b.clone())
    }

    pub fn sum<'a>(&self, xs: impl IntoIterator<Item = &'a GroupElement>) -> GroupElement {
        xs.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    pub fn contains(&self, a: &GroupElement) -> bool {
        a.0.len() == self.width() && (!self.is_mod2() || a.0.iter().all(|&c| c == 0 || c == 1))
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Z2 => write!(f, "Z2"),
            GroupDescriptor::Z2k { k } => write!(f, "Z2^{k}"),
            GroupDescriptor::Zk { k } => write!(f, "Z^{k}"),
        }
    }
}

/// Element of a coefficient group as an integer vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn z2(bit: bool) -> Self {
        GroupElement(vec![bit as i64])
    }
}

/// Values of a parity on the crossings of one diagram, indexed by chord label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityAssignment {
    pub group: GroupDescriptor,
    ids: Vec<VertexId>,
    values: Vec<GroupElement>,
}

impl ParityAssignment {
    /// `values[l]` is the value on the chord with label `l`, whose vertex id
    /// is `ids[l]`.
    pub fn new(group: GroupDescriptor, ids: Vec<VertexId>, values: Vec<GroupElement>) -> Self {
        assert_eq!(ids.len(), values.len());
        let values = values.into_iter().map(|v| group.normalize(v)).collect();
        ParityAssignment { group, ids, values }
    }

    /// Assignment on `d` computed chord by chord.
    pub fn from_fn(
        group: GroupDescriptor,
        d: &ChordDiagram,
        f: impl FnMut(u32) -> GroupElement,
    ) -> Self {
        let values = (0..d.n() as u32).map(f).collect();
        Self::new(group, d.vertex_ids().to_vec(), values)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    /// Value by chord label.
    pub fn at(&self, label: u32) -> &GroupElement {
        &self.values[label as usize]
    }

    /// Value by vertex id.
    pub fn get(&self, id: VertexId) -> Option<&GroupElement> {
        self.ids.iter().position(|&v| v == id).map(|i| &self.values[i])
    }

    /// Z2 values as bits (meaningful for `Z2`).
    pub fn bits(&self) -> Vec<u8> {
        self.values
            .iter()
            .map(|v| v.0.iter().any(|&c| c != 0) as u8)
            .collect()
    }

    pub fn is_odd(&self, label: u32) -> bool {
        !self.group.is_zero(self.at(label))
    }
}

/// `gp(v)`: parity of the number of chords linked with `v`.
pub fn gaussian_parity(d: &ChordDiagram) -> ParityAssignment {
    let m = d.interlacement();
    ParityAssignment::from_fn(GroupDescriptor::Z2, d, |l| {
        GroupElement::z2(m.row(l as usize).count_ones() % 2 == 1)
    })
}

/// One violated axiom instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub trace_step: usize,
    pub axiom: String,
    pub vertices: Vec<VertexId>,
    pub values: Vec<GroupElement>,
}

/// All violations found along a trace; empty means every check passed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Report(pub Vec<Violation>);

impl Report {
    pub fn is_clean(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.0
    }

    pub fn extend(&mut self, other: Report) {
        self.0.extend(other.0);
    }
}

fn lookup(p: &ParityAssignment, id: VertexId, step: usize) -> Result<GroupElement> {
    p.get(id)
        .cloned()
        .ok_or_else(|| Error::Invalid(format!("no value for vertex {id} at step {step}")))
}

/// Vertices present after step `i` that have no preimage.
fn created(trace: &MoveTrace, i: usize) -> Vec<VertexId> {
    let f = &trace.correspondences[i];
    let mut image: Vec<VertexId> = f.pairs().iter().map(|p| p.1).collect();
    image.sort_unstable();
    trace.diagrams[i + 1]
        .base()
        .vertex_ids()
        .iter()
        .copied()
        .filter(|v| image.binary_search(v).is_err())
        .collect()
}

/// Checks the parity axioms on every elementary step of a trace:
/// values are carried by the correspondence; the two crossings of an R2
/// bigon sum to zero; the three crossings of an R3 triangle sum to zero;
/// and, as a consequence, an R1 loop crossing has value zero. Insertions
/// are checked on the diagram after the move.
pub fn verify_axioms(trace: &MoveTrace, assignments: &[ParityAssignment]) -> Result<Report> {
    if assignments.len() != trace.diagrams.len() {
        return Err(Error::Invalid("one assignment per diagram required".into()));
    }
    let group = assignments[0].group;
    if assignments.iter().any(|a| a.group != group) {
        return Err(Error::GroupMismatch);
    }
    for (a, d) in assignments.iter().zip(&trace.diagrams) {
        if a.len() != d.n() {
            return Err(Error::Invalid("assignment does not cover the diagram".into()));
        }
    }
    let mut report = Report::default();
    for (i, m) in trace.moves.iter().enumerate() {
        let (before, after) = (&assignments[i], &assignments[i + 1]);
        for &(u, v) in trace.correspondences[i].pairs() {
            let (x, y) = (lookup(before, u, i)?, lookup(after, v, i)?);
            if !group.eq(&x, &y) {
                report.0.push(Violation {
                    trace_step: i,
                    axiom: "carried".into(),
                    vertices: vec![u, v],
                    values: vec![x, y],
                });
            }
        }
        let (vertices, side) = match m.kind {
            MoveKind::R1Minus | MoveKind::R2Minus | MoveKind::R3 => (m.site.chords.clone(), before),
            MoveKind::R1Plus | MoveKind::R2Plus => (created(trace, i), after),
        };
        let values = vertices
            .iter()
            .map(|&v| lookup(side, v, i))
            .collect::<Result<Vec<_>>>()?;
        if !group.is_zero(&group.sum(&values)) {
            let axiom = match m.kind {
                MoveKind::R1Minus | MoveKind::R1Plus => "loop",
                MoveKind::R2Minus | MoveKind::R2Plus => "bigon",
                MoveKind::R3 => "triangle",
            };
            report.0.push(Violation {
                trace_step: i,
                axiom: axiom.into(),
                vertices,
                values,
            });
        }
    }
    Ok(report)
}

/// A cyclic arrangement of chords, consecutive ones meeting at adjacency
/// sites of the word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Polygon {
    /// Vertex ids in increasing order.
    pub chords: Vec<VertexId>,
    /// Start positions `s` of the sides `(s, s+1)`, in traversal order.
    pub sides: Vec<usize>,
    /// Side `p` holds `chords[sigma[p]]` and `chords[sigma[p - 1]]`.
    pub sigma: Vec<usize>,
}

impl Polygon {
    pub fn k(&self) -> usize {
        self.chords.len()
    }
}

/// Default bound on the number of polygons reported per diagram.
pub const POLYGON_CAP: usize = 100_000;

/// All polygons with at most `kmax` sides (up to `cap` of them).
pub fn find_polygons(d: &ChordDiagram, kmax: usize) -> Vec<Polygon> {
    find_polygons_capped(d, kmax, POLYGON_CAP)
}

pub fn find_polygons_capped(d: &ChordDiagram, kmax: usize, cap: usize) -> Vec<Polygon> {
    let word = d.word();
    let len = word.len();
    let mut out = Vec::new();
    if len == 0 || kmax == 0 {
        return out;
    }
    // sites incident to each chord: (site start, position of that chord's endpoint in it)
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); d.n()];
    for s in 0..len {
        let t = (s + 1) % len;
        if word[s] == word[t] {
            // the two arcs of a one-chord word bound the same loop
            if len == 2 && s == 1 {
                continue;
            }
            out.push(Polygon {
                chords: vec![d.vertex_id(word[s])],
                sides: vec![s],
                sigma: vec![0],
            });
            continue;
        }
        incident[word[s] as usize].push((s, s));
        incident[word[t] as usize].push((s, t));
    }
    if kmax == 1 {
        out.truncate(cap);
        return out;
    }
    let other_end = |s: usize, p: usize| if p == s { (s + 1) % len } else { s };
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    // DFS over chains of sites; the first site is the smallest of the polygon
    struct Frame {
        chords: Vec<u32>,
        sides: Vec<usize>,
    }
    for s0 in 0..len {
        let t0 = (s0 + 1) % len;
        if word[s0] == word[t0] {
            continue;
        }
        // enter at chord word[s0] via position s0, leave through word[t0]
        let c0 = word[s0];
        let mut stack = vec![(
            Frame {
                chords: vec![c0, word[t0]],
                sides: vec![s0],
            },
            t0,
        )];
        while let Some((fr, entered_at)) = stack.pop() {
            if out.len() >= cap {
                out.truncate(cap);
                return out;
            }
            let cur = *fr.chords.last().unwrap();
            let exit_pos = d.partner(entered_at);
            for &(s, p) in &incident[cur as usize] {
                if p != exit_pos || s <= s0 {
                    continue;
                }
                let next_pos = other_end(s, p);
                let next = word[next_pos];
                if next == c0 {
                    // closes if it uses c0's other endpoint
                    if next_pos == d.partner(s0) {
                        let mut sides = fr.sides.clone();
                        sides.push(s);
                        let mut key = sides.clone();
                        key.sort_unstable();
                        if seen.insert(key) {
                            out.push(make_polygon(d, &fr.chords, &sides));
                        }
                    }
                    continue;
                }
                if fr.chords.contains(&next) || fr.sides.len() + 1 >= kmax {
                    continue;
                }
                let mut chords = fr.chords.clone();
                chords.push(next);
                let mut sides = fr.sides.clone();
                sides.push(s);
                stack.push((Frame { chords, sides }, next_pos));
            }
        }
    }
    out.truncate(cap);
    out
}

/// `walk[p]` and `walk[p+1]` meet at `sides[p]` (indices mod k).
fn make_polygon(d: &ChordDiagram, walk: &[u32], sides: &[usize]) -> Polygon {
    let k = sides.len();
    let mut chords: Vec<VertexId> = walk.iter().map(|&l| d.vertex_id(l)).collect();
    chords.sort_unstable();
    // side p joins walk[p] and walk[p+1]; name t_p = walk[p+1] so that side p
    // joins t_p and t_{p-1}
    let sigma = (0..k)
        .map(|p| {
            let id = d.vertex_id(walk[(p + 1) % k]);
            chords.binary_search(&id).unwrap()
        })
        .collect();
    Polygon {
        chords,
        sides: sides.to_vec(),
        sigma,
    }
}

/// Sum of a parity over the chords of a polygon.
pub fn polygon_sum(p: &ParityAssignment, poly: &Polygon) -> Result<GroupElement> {
    let vals = poly
        .chords
        .iter()
        .map(|&v| {
            p.get(v)
                .cloned()
                .ok_or_else(|| Error::Invalid(format!("polygon chord {v} has no value")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(p.group.sum(&vals))
}

/// A 0/1 labelling of crossings, indexed by chord label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pseudoparity {
    ids: Vec<VertexId>,
    values: Vec<u8>,
}

impl Pseudoparity {
    pub fn new(ids: Vec<VertexId>, values: Vec<u8>) -> Self {
        assert_eq!(ids.len(), values.len());
        Pseudoparity { ids, values }
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn at(&self, label: u32) -> u8 {
        self.values[label as usize]
    }

    pub fn get(&self, id: VertexId) -> Option<u8> {
        self.ids.iter().position(|&v| v == id).map(|i| self.values[i])
    }

    fn as_parity(&self) -> ParityAssignment {
        ParityAssignment::new(
            GroupDescriptor::Z2,
            self.ids.clone(),
            self.values.iter().map(|&b| GroupElement::z2(b == 1)).collect(),
        )
    }
}

/// 1 exactly where the parity is nonzero.
pub fn pseudoparity_of(p: &ParityAssignment) -> Pseudoparity {
    let values = (0..p.len() as u32).map(|l| p.is_odd(l) as u8).collect();
    Pseudoparity::new(p.ids().to_vec(), values)
}

/// Checks a pseudoparity along a trace: values carried by the
/// correspondence, equal values on the two crossings of a bigon, and never
/// exactly one 1 among the three crossings of a triangle.
pub fn verify_pseudoparity(trace: &MoveTrace, pp: &[Pseudoparity]) -> Result<Report> {
    let as_parity: Vec<ParityAssignment> = pp.iter().map(Pseudoparity::as_parity).collect();
    let full = verify_axioms(trace, &as_parity)?;
    let mut report = Report::default();
    for v in full.0 {
        match v.axiom.as_str() {
            "carried" | "bigon" => report.0.push(v),
            "triangle" => {
                let ones = v.values.iter().filter(|x| x.0[0] == 1).count();
                if ones == 1 {
                    report.0.push(Violation {
                        axiom: "triangle-count".into(),
                        ..v
                    });
                }
            }
            _ => {}
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::DecoratedDiagram;
    use crate::moves::{enumerate_moves, Move};

    fn cd(w: &[u32]) -> ChordDiagram {
        ChordDiagram::from_word(w).unwrap()
    }

    fn single_step(d: &ChordDiagram, kind: MoveKind) -> MoveTrace {
        let dd = DecoratedDiagram::free(d.clone());
        let m: Move = enumerate_moves(&dd).into_iter().find(|m| m.kind == kind).unwrap();
        let mut t = MoveTrace::start(dd);
        t.push(m).unwrap();
        t
    }

    fn gp_along(t: &MoveTrace) -> Vec<ParityAssignment> {
        t.diagrams.iter().map(|d| gaussian_parity(d.base())).collect()
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_parity(&cd(&[1, 2, 1, 2])).bits(), vec![1, 1]);
        assert_eq!(gaussian_parity(&cd(&[1, 1])).bits(), vec![0]);
        assert_eq!(gaussian_parity(&cd(&[1, 2, 3, 1, 2, 3])).bits(), vec![0, 0, 0]);
    }

    #[test]
    fn axiom_examples() {
        let t = single_step(&cd(&[1, 2, 1, 2]), MoveKind::R2Minus);
        assert!(verify_axioms(&t, &gp_along(&t)).unwrap().is_clean());
        let t = single_step(&cd(&[1, 1]), MoveKind::R1Minus);
        assert!(verify_axioms(&t, &gp_along(&t)).unwrap().is_clean());
        let ones = vec![
            ParityAssignment::new(GroupDescriptor::Z2, vec![1], vec![GroupElement::z2(true)]),
            ParityAssignment::new(GroupDescriptor::Z2, vec![], vec![]),
        ];
        let r = verify_axioms(&t, &ones).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.0[0].axiom, "loop");
    }

    #[test]
    fn group_mismatch() {
        let t = single_step(&cd(&[1, 1]), MoveKind::R1Minus);
        let a = vec![
            ParityAssignment::new(GroupDescriptor::Z2, vec![1], vec![GroupElement::z2(false)]),
            ParityAssignment::new(GroupDescriptor::Zk(1), vec![], vec![]),
        ];
        assert_eq!(verify_axioms(&t, &a), Err(Error::GroupMismatch));
    }

    #[test]
    fn polygon_examples() {
        let loops = find_polygons(&cd(&[1, 1]), 1);
        assert_eq!(loops.len(), 1);
        let tri = find_polygons(&cd(&[1, 2, 2, 3, 3, 1]), 3);
        assert!(tri.iter().any(|p| p.k() == 3 && {
            let mut s = p.sides.clone();
            s.sort();
            s == vec![0, 2, 4]
        }));
        let bigons = find_polygons(&cd(&[1, 2, 1, 2]), 2);
        assert!(bigons.iter().any(|p| p.k() == 2));
        let d = cd(&[1, 2, 2, 3, 3, 1]);
        let gp = gaussian_parity(&d);
        for p in &tri {
            assert_eq!(polygon_sum(&gp, p).unwrap(), GroupElement::z2(false));
            // consecutive sides share the chord named by sigma
            let k = p.k();
            for q in 0..k {
                let id = p.chords[p.sigma[q]];
                let l = d.label_of(id).unwrap();
                let (s, t) = (p.sides[q], p.sides[(q + 1) % k]);
                let at = |x: usize| d.label_at(x % d.len());
                assert!(at(s) == l || at(s + 1) == l);
                assert!(at(t) == l || at(t + 1) == l);
            }
        }
    }

    #[test]
    fn pseudoparity_examples() {
        assert_eq!(pseudoparity_of(&gaussian_parity(&cd(&[1, 2, 1, 2]))).values(), &[1, 1]);
        assert_eq!(pseudoparity_of(&gaussian_parity(&cd(&[1, 1]))).values(), &[0]);
        let t = single_step(&cd(&[1, 2, 2, 3, 3, 1]), MoveKind::R3);
        let zero: Vec<Pseudoparity> = t
            .diagrams
            .iter()
            .map(|d| Pseudoparity::new(d.base().vertex_ids().to_vec(), vec![0; d.n()]))
            .collect();
        assert!(verify_pseudoparity(&t, &zero).unwrap().is_clean());
        let one: Vec<Pseudoparity> = t
            .diagrams
            .iter()
            .map(|d| {
                let ids = d.base().vertex_ids().to_vec();
                let vals = ids.iter().map(|&v| (v == 1) as u8).collect();
                Pseudoparity::new(ids, vals)
            })
            .collect();
        let r = verify_pseudoparity(&t, &one).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.0[0].axiom, "triangle-count");
    }

    #[test]
    fn report_json() {
        let r = Report(vec![Violation {
            trace_step: 0,
            axiom: "loop".into(),
            vertices: vec![1],
            values: vec![GroupElement::z2(true)],
        }]);
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"[{"trace_step":0,"axiom":"loop","vertices":[1],"values":[[1]]}]"#
        );
    }
}
