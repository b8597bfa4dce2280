//! Finite approximations of the universal parity group: chord generators
//! over a region of the move graph, identified along moves and subject to
//! the bigon and triangle relations.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::DecoratedDiagram;
use crate::error::{Error, Result};
use crate::moves::{apply, enumerate_kind, enumerate_moves, MoveKind};
use crate::parity::{GroupDescriptor, GroupElement, ParityAssignment, Report, Violation};
use crate::search::{bfs_reachable, Reachable, SearchBounds, Truncation};
use crate::snf::{decompose, rank_mod2, Relation};

/// Diagrams within `radius` moves of a start diagram, one per class.
#[derive(Clone, Debug)]
pub struct Region {
    pub reach: Reachable,
    pub radius: usize,
    pub cap: usize,
}

impl Region {
    pub fn len(&self) -> usize {
        self.reach.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reach.is_empty()
    }

    pub fn diagrams(&self) -> impl Iterator<Item = &DecoratedDiagram> {
        self.reach.nodes.iter().map(|n| &n.diagram)
    }

    pub fn truncated(&self) -> Truncation {
        self.reach.truncated
    }
}

pub fn explore(d: &DecoratedDiagram, radius: usize, cap: usize) -> Region {
    Region {
        reach: bfs_reachable(d, SearchBounds::new(radius, cap)),
        radius,
        cap,
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        // smaller root wins, so classes are numbered deterministically
        if a < b {
            self.0[b] = a;
        } else if b < a {
            self.0[a] = b;
        }
    }
}

/// A relation row together with where it was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationRow {
    pub kind: MoveKind,
    pub node: usize,
    pub labels: Vec<u32>,
    pub coeffs: Relation,
}

/// Generator classes and relations collected over a region.
#[derive(Clone, Debug)]
pub struct RelationSystem {
    /// First slot of each node; slot `offsets[i] + l` is label `l` of node `i`.
    offsets: Vec<usize>,
    /// Class of every slot.
    class_of: Vec<usize>,
    /// Per node, label in the node's diagram to label in its canonical form.
    canon: Vec<Vec<u32>>,
    /// One representative slot per class, as `(node, label)`.
    representatives: Vec<(usize, u32)>,
    /// Least search depth of a diagram carrying each class. Classes seen only
    /// at the outer radius have had fewest chances to be identified.
    pub depths: Vec<usize>,
    pub relations: Vec<RelationRow>,
    /// `(node, label)` of every removable loop; these are expected, not
    /// imposed, to vanish.
    pub loops: Vec<(usize, u32)>,
    pub radius: usize,
    pub cap: usize,
    pub truncated: bool,
}

impl RelationSystem {
    pub fn generator_count(&self) -> usize {
        self.representatives.len()
    }

    /// Class of the chord with `label` in the `node`-th region diagram.
    pub fn class(&self, node: usize, label: u32) -> usize {
        self.class_of[self.offsets[node] + self.canon[node][label as usize] as usize]
    }

    pub fn representative(&self, class: usize) -> (usize, u32) {
        self.representatives[class]
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.generator_count()];
        for &c in &self.class_of {
            sizes[c] += 1;
        }
        sizes
    }
}

/// Identifications and relations contributed by one node.
struct NodeScan {
    unions: Vec<(usize, usize)>,
    relations: Vec<(MoveKind, Vec<u32>)>,
    loops: Vec<u32>,
}

fn scan(region: &Region, offsets: &[usize], i: usize) -> Result<NodeScan> {
    let d = &region.reach.nodes[i].diagram;
    let slot = |node: usize, iso: &[u32], label: u32| offsets[node] + iso[label as usize] as usize;
    let isos = d.canonical_isomorphisms();
    let mut unions = Vec::new();
    // symmetric diagrams identify the chords they permute
    for iso in &isos[1..] {
        for l in 0..d.n() as u32 {
            unions.push((slot(i, &isos[0], l), slot(i, iso, l)));
        }
    }
    let mut relations = Vec::new();
    let mut loops = Vec::new();
    let labels_of = |ids: &[u64]| -> Vec<u32> {
        ids.iter()
            .map(|&v| d.base().label_of(v).expect("site chords exist"))
            .collect()
    };
    for kind in [MoveKind::R2Minus, MoveKind::R3] {
        for m in enumerate_kind(d, kind) {
            relations.push((kind, labels_of(&m.site.chords)));
        }
    }
    for m in enumerate_kind(d, MoveKind::R1Minus) {
        loops.extend(labels_of(&m.site.chords));
    }
    for m in enumerate_moves(d) {
        if d.n() as i64 + m.kind.delta() as i64 > region.cap as i64 {
            continue;
        }
        let (e, f) = apply(d, &m)?;
        let Some(j) = region.reach.find(&e) else { continue };
        let to = &e.canonical_isomorphisms()[0];
        for &(a, b) in f.pairs() {
            let la = d.base().label_of(a).expect("source vertex");
            let lb = e.base().label_of(b).expect("target vertex");
            unions.push((slot(i, &isos[0], la), slot(j, to, lb)));
        }
    }
    Ok(NodeScan {
        unions,
        relations,
        loops,
    })
}

/// Identifies generators along every move between region diagrams (and
/// along symmetries) and records one relation per bigon and triangle site.
pub fn collect_relations(region: &Region) -> Result<RelationSystem> {
    let nodes = &region.reach.nodes;
    let mut offsets = Vec::with_capacity(nodes.len() + 1);
    let mut total = 0;
    for n in nodes {
        offsets.push(total);
        total += n.diagram.n();
    }
    offsets.push(total);
    let scans: Vec<NodeScan> = (0..nodes.len())
        .into_par_iter()
        .map(|i| scan(region, &offsets, i))
        .collect::<Result<_>>()?;
    let mut uf = UnionFind((0..total).collect());
    for s in &scans {
        for &(a, b) in &s.unions {
            uf.union(a, b);
        }
    }
    let canon: Vec<Vec<u32>> = nodes
        .iter()
        .map(|n| n.diagram.canonical_isomorphisms().swap_remove(0))
        .collect();
    let mut class_of = vec![usize::MAX; total];
    let mut representatives = Vec::new();
    let mut root_class = vec![usize::MAX; total];
    for (i, n) in nodes.iter().enumerate() {
        let iso = &canon[i];
        for l in 0..n.diagram.n() as u32 {
            let s = offsets[i] + iso[l as usize] as usize;
            let r = uf.find(s);
            if root_class[r] == usize::MAX {
                root_class[r] = representatives.len();
                representatives.push((i, l));
            }
        }
    }
    for (s, c) in class_of.iter_mut().enumerate() {
        *c = root_class[uf.find(s)];
    }
    let mut depths = vec![usize::MAX; representatives.len()];
    for (i, n) in nodes.iter().enumerate() {
        for s in offsets[i]..offsets[i + 1] {
            depths[class_of[s]] = depths[class_of[s]].min(n.depth);
        }
    }
    let mut sys = RelationSystem {
        offsets,
        class_of,
        canon,
        representatives,
        depths,
        relations: Vec::new(),
        loops: Vec::new(),
        radius: region.radius,
        cap: region.cap,
        truncated: region.truncated().any(),
    };
    let mut seen = BTreeSet::new();
    for (i, s) in scans.into_iter().enumerate() {
        for (kind, labels) in s.relations {
            let mut coeffs = Relation::new();
            for &l in &labels {
                *coeffs.entry(sys.class(i, l)).or_insert(0) += 1;
            }
            if seen.insert(coeffs.clone().into_iter().collect::<Vec<_>>()) {
                sys.relations.push(RelationRow {
                    kind,
                    node: i,
                    labels,
                    coeffs,
                });
            }
        }
        for l in s.loops {
            sys.loops.push((i, l));
        }
    }
    Ok(sys)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeneratorInfo {
    /// Canonical code of a diagram carrying the generator.
    pub diagram: String,
    /// Vertex id of the chord in that diagram.
    pub vertex: u64,
    /// Number of (diagram, chord) pairs identified with it.
    pub members: usize,
    pub depth: usize,
}

/// The group presented by a relation system, with where each generator
/// class lands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupPresentation {
    pub generators: Vec<GeneratorInfo>,
    pub invariant_factors: Vec<i128>,
    pub free_rank: usize,
    pub generator_images: Vec<Vec<i128>>,
    pub radius: usize,
    pub cap: usize,
    pub truncated: bool,
    /// Whether every removable loop chord is zero in the group. Loops are
    /// not imposed as relations; this reports whether they follow.
    pub loops_vanish: bool,
}

impl GroupPresentation {
    pub fn is_zero(&self, class: usize) -> bool {
        self.generator_images[class].iter().all(|&c| c == 0)
    }

    /// Order of a generator class, `None` when infinite.
    pub fn order(&self, class: usize) -> Option<i128> {
        let img = &self.generator_images[class];
        let t = self.invariant_factors.len();
        if img[t..].iter().any(|&c| c != 0) {
            return None;
        }
        let mut ord = 1i128;
        for (&c, &d) in img[..t].iter().zip(&self.invariant_factors) {
            let o = d / gcd(c, d);
            ord = ord / gcd(ord, o) * o;
        }
        Some(ord)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

pub fn local_universal_group(region: &Region, rs: &RelationSystem) -> Result<GroupPresentation> {
    let k = rs.generator_count();
    let rels: Vec<Relation> = rs.relations.iter().map(|r| r.coeffs.clone()).collect();
    let dec = decompose(k, &rels)?;
    let even = dec.torsion.iter().filter(|&&t| t % 2 == 0).count();
    if dec.free_rank + even != k - rank_mod2(k, &rels) {
        return Err(Error::Invalid("mod 2 rank disagrees with the integer reduction".into()));
    }
    let sizes = rs.class_sizes();
    let generators = (0..k)
        .map(|c| {
            let (node, label) = rs.representative(c);
            let d = &region.reach.nodes[node].diagram;
            GeneratorInfo {
                diagram: d.to_code(),
                vertex: d.base().vertex_id(label),
                members: sizes[c],
                depth: rs.depths[c],
            }
        })
        .collect();
    let images = dec.images;
    let loops_vanish = rs
        .loops
        .iter()
        .all(|&(i, l)| images[rs.class(i, l)].iter().all(|&c| c == 0));
    Ok(GroupPresentation {
        generators,
        invariant_factors: dec.torsion,
        free_rank: dec.free_rank,
        generator_images: images,
        radius: rs.radius,
        cap: rs.cap,
        truncated: rs.truncated,
        loops_vanish,
    })
}

/// Outcome of checking a parity family against a relation system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorReport {
    pub violations: Report,
    /// Value of the parity on each generator class; `None` when members of
    /// the class disagree.
    pub induced: Vec<Option<GroupElement>>,
}

impl FactorReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_clean()
    }
}

/// Checks that `p` is constant on generator classes and kills every
/// relation, so that it factors through the presented group.
pub fn factor_check(
    region: &Region,
    rs: &RelationSystem,
    p: &(dyn Fn(&DecoratedDiagram) -> Result<ParityAssignment> + Sync),
) -> Result<FactorReport> {
    let nodes = &region.reach.nodes;
    let values: Vec<ParityAssignment> = nodes
        .par_iter()
        .map(|n| p(&n.diagram))
        .collect::<Result<_>>()?;
    let group: GroupDescriptor = match values.first() {
        Some(v) => v.group.clone(),
        None => GroupDescriptor::Z2,
    };
    let mut violations = Vec::new();
    let mut induced: Vec<Option<GroupElement>> = vec![None; rs.generator_count()];
    let mut conflicted = vec![false; rs.generator_count()];
    for (i, n) in nodes.iter().enumerate() {
        if values[i].group != group {
            return Err(Error::GroupMismatch);
        }
        for l in 0..n.diagram.n() as u32 {
            let c = rs.class(i, l);
            let v = values[i].at(l);
            match &induced[c] {
                None if !conflicted[c] => induced[c] = Some(v.clone()),
                Some(w) if !group.eq(w, v) => {
                    let (rn, rl) = rs.representative(c);
                    violations.push(Violation {
                        trace_step: i,
                        axiom: "carried".into(),
                        vertices: vec![
                            nodes[rn].diagram.base().vertex_id(rl),
                            n.diagram.base().vertex_id(l),
                        ],
                        values: vec![w.clone(), v.clone()],
                    });
                    induced[c] = None;
                    conflicted[c] = true;
                }
                _ => {}
            }
        }
    }
    for r in &rs.relations {
        let vals: Vec<GroupElement> = r.labels.iter().map(|&l| values[r.node].at(l).clone()).collect();
        if !group.is_zero(&group.sum(&vals)) {
            let d = &nodes[r.node].diagram;
            violations.push(Violation {
                trace_step: r.node,
                axiom: match r.kind {
                    MoveKind::R3 => "triangle",
                    _ => "bigon",
                }
                .into(),
                vertices: r.labels.iter().map(|&l| d.base().vertex_id(l)).collect(),
                values: vals,
            });
        }
    }
    Ok(FactorReport {
        violations: Report(violations),
        induced,
    })
}
