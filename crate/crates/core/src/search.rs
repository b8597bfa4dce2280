//! Bounded exploration of the move graph and seeded random traces.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::DecoratedDiagram;
use crate::moves::{apply, enumerate_moves, Move, MoveTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_depth: usize,
    pub crossing_cap: usize,
    pub node_cap: usize,
}

impl SearchBounds {
    pub fn new(max_depth: usize, crossing_cap: usize) -> Self {
        SearchBounds {
            max_depth,
            crossing_cap,
            node_cap: 1_000_000,
        }
    }

    pub fn with_node_cap(mut self, node_cap: usize) -> Self {
        self.node_cap = node_cap;
        self
    }
}

/// Which bounds cut the exploration short.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Some diagram at the last depth still had moves to unseen diagrams.
    pub depth: bool,
    /// Some move was skipped because its result exceeds the crossing cap.
    pub crossings: bool,
    /// Unseen diagrams were dropped because the node cap was reached.
    pub nodes: bool,
}

impl Truncation {
    pub fn any(&self) -> bool {
        self.depth || self.crossings || self.nodes
    }
}

#[derive(Clone, Debug)]
pub struct Node {
    /// The diagram as produced by the recorded move sequence (not relabelled).
    pub diagram: DecoratedDiagram,
    pub key: Vec<u32>,
    pub depth: usize,
    /// Index of the parent node and the move leading here.
    pub parent: Option<(usize, Move)>,
}

/// Diagrams reachable within bounds, one per isomorphism class.
#[derive(Clone, Debug)]
pub struct Reachable {
    pub nodes: Vec<Node>,
    index: HashMap<Vec<u32>, usize>,
    pub truncated: Truncation,
    pub bounds: SearchBounds,
}

impl Reachable {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn find(&self, d: &DecoratedDiagram) -> Option<usize> {
        self.index.get(&d.canonical_key()).copied()
    }

    pub fn contains(&self, d: &DecoratedDiagram) -> bool {
        self.find(d).is_some()
    }

    /// Trace from the start diagram to node `i` along parent links.
    pub fn path_to(&self, i: usize) -> MoveTrace {
        let mut moves = Vec::new();
        let mut at = i;
        while let Some((p, m)) = &self.nodes[at].parent {
            moves.push(m.clone());
            at = *p;
        }
        moves.reverse();
        let mut t = MoveTrace::start(self.nodes[0].diagram.clone());
        for m in moves {
            t.push(m).expect("recorded moves replay");
        }
        t
    }
}

/// Successors of `d` within the crossing cap, and whether any move was
/// dropped by the cap.
fn successors(d: &DecoratedDiagram, cap: usize) -> (Vec<(Move, DecoratedDiagram, Vec<u32>)>, bool) {
    let mut capped = false;
    let mut out = Vec::new();
    for m in enumerate_moves(d) {
        if (d.n() as i64 + m.kind.delta() as i64) as usize > cap {
            capped = true;
            continue;
        }
        let (e, _) = apply(d, &m).expect("enumerated moves apply");
        let key = e.canonical_key();
        out.push((m, e, key));
    }
    (out, capped)
}

/// Breadth-first search from `d`. Each depth is expanded in parallel and
/// merged in canonical-key order, so the result does not depend on the
/// number of threads.
pub fn bfs_reachable(d: &DecoratedDiagram, bounds: SearchBounds) -> Reachable {
    bfs_until(d, bounds, None)
}

fn bfs_until(d: &DecoratedDiagram, bounds: SearchBounds, goal: Option<&[u32]>) -> Reachable {
    let start_key = d.canonical_key();
    let mut r = Reachable {
        nodes: vec![Node {
            diagram: d.clone(),
            key: start_key.clone(),
            depth: 0,
            parent: None,
        }],
        index: HashMap::from([(start_key.clone(), 0)]),
        truncated: Truncation::default(),
        bounds,
    };
    if goal == Some(&start_key[..]) {
        return r;
    }
    let mut frontier = vec![0usize];
    for depth in 0..=bounds.max_depth {
        if frontier.is_empty() {
            break;
        }
        let expanded: Vec<_> = frontier
            .par_iter()
            .map(|&i| successors(&r.nodes[i].diagram, bounds.crossing_cap))
            .collect();
        if depth == bounds.max_depth {
            let more = expanded
                .iter()
                .any(|(succ, _)| succ.iter().any(|s| !r.index.contains_key(&s.2)));
            r.truncated.depth |= more;
            break;
        }
        let mut next = Vec::new();
        for (&parent, (succ, capped)) in frontier.iter().zip(expanded) {
            r.truncated.crossings |= capped;
            for (m, e, key) in succ {
                if r.index.contains_key(&key) {
                    continue;
                }
                if r.nodes.len() >= bounds.node_cap {
                    r.truncated.nodes = true;
                    continue;
                }
                let idx = r.nodes.len();
                r.index.insert(key.clone(), idx);
                let found = goal == Some(&key[..]);
                r.nodes.push(Node {
                    diagram: e,
                    key,
                    depth: depth + 1,
                    parent: Some((parent, m)),
                });
                if found {
                    return r;
                }
                next.push(idx);
            }
        }
        next.sort_by(|&a, &b| r.nodes[a].key.cmp(&r.nodes[b].key));
        frontier = next;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// A trace from the first diagram to one isomorphic to the second.
    Path(MoveTrace),
    /// Not found within bounds; says nothing about non-equivalence.
    Inconclusive,
}

pub fn equivalent_bounded(
    a: &DecoratedDiagram,
    b: &DecoratedDiagram,
    bounds: SearchBounds,
) -> Equivalence {
    let goal = b.canonical_key();
    let r = bfs_until(a, bounds, Some(&goal));
    match r.index.get(&goal) {
        Some(&i) => Equivalence::Path(r.path_to(i)),
        None => Equivalence::Inconclusive,
    }
}

/// A random trace: at each step a move is drawn uniformly among those whose
/// result stays within `crossing_cap`. Stops early if no move qualifies.
pub fn fuzz_trace(d: &DecoratedDiagram, length: usize, seed: u64, crossing_cap: usize) -> MoveTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = MoveTrace::start(d.clone());
    for _ in 0..length {
        let n = t.last().n() as i64;
        let moves: Vec<Move> = enumerate_moves(t.last())
            .into_iter()
            .filter(|m| (n + m.kind.delta() as i64) as usize <= crossing_cap)
            .collect();
        let Some(m) = moves.choose(&mut rng) else {
            break;
        };
        t.push(m.clone()).expect("enumerated moves apply");
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_code, Level};

    fn free(code: &str) -> DecoratedDiagram {
        parse_code(code, Level::Free).unwrap()
    }

    #[test]
    fn reachable_examples() {
        let g0 = free("");
        assert!(bfs_reachable(&free("1 1"), SearchBounds::new(1, 3)).contains(&g0));
        assert!(bfs_reachable(&free("1 2 1 2"), SearchBounds::new(1, 4)).contains(&g0));
        let r = bfs_reachable(&g0, SearchBounds::new(0, 10));
        assert_eq!(r.len(), 1);
        assert!(r.truncated.depth);
    }

    #[test]
    fn monotone_in_depth() {
        let d = free("1 2 1 2");
        let a = bfs_reachable(&d, SearchBounds::new(1, 4));
        let b = bfs_reachable(&d, SearchBounds::new(2, 4));
        for n in &a.nodes {
            assert!(b.contains(&n.diagram));
        }
    }

    #[test]
    fn paths_replay() {
        let d = free("1 2 3 1 2 3");
        let r = bfs_reachable(&d, SearchBounds::new(2, 5));
        for i in (0..r.len()).step_by(7) {
            let t = r.path_to(i);
            assert_eq!(t.last().canonical_key(), r.nodes[i].key);
            t.replay().unwrap();
        }
    }

    #[test]
    fn bounded_equivalence() {
        let g0 = free("");
        for code in ["1 1", "1 2 1 2"] {
            match equivalent_bounded(&free(code), &g0, SearchBounds::new(3, 4)) {
                Equivalence::Path(t) => assert_eq!(t.len(), 1),
                Equivalence::Inconclusive => panic!("{code}"),
            }
        }
    }

    #[test]
    fn fuzz_is_seeded() {
        let d = free("1 2 1 2");
        assert_eq!(fuzz_trace(&d, 0, 3, 6).len(), 0);
        let a = fuzz_trace(&d, 6, 42, 6);
        assert_eq!(a, fuzz_trace(&d, 6, 42, 6));
        assert!(a.diagrams.iter().all(|x| x.n() <= 6));
        a.replay().unwrap();
    }
}
