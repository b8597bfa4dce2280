//! Smoothings of chord diagrams and the multi-component states they produce.

use serde::{Deserialize, Serialize};

use crate::diagram::{ChordDiagram, VertexId};
use crate::error::{Error, Result};

/// The two ways of repasting the half-edges at a smoothed vertex.
///
/// `Split` is the orientation-respecting smoothing: on one component it cuts
/// the curve into the two halves at the vertex. `Reverse` reconnects the
/// other way, reversing the segment between the two passages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothKind {
    Split,
    Reverse,
}

/// A framed 4-graph obtained from a chord diagram by smoothing some vertices.
///
/// Components are cyclic sequences of endpoint positions of the source word;
/// a component with no positions is a bare circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothedState {
    labels: Vec<u32>,
    ids: Vec<VertexId>,
    components: Vec<Vec<usize>>,
    smoothed: Vec<(u32, SmoothKind)>,
    active: Vec<bool>,
}

impl From<&ChordDiagram> for SmoothedState {
    fn from(d: &ChordDiagram) -> Self {
        SmoothedState {
            labels: d.word().to_vec(),
            ids: d.vertex_ids().to_vec(),
            components: vec![(0..d.len()).collect()],
            smoothed: Vec::new(),
            active: vec![true; d.n()],
        }
    }
}

impl SmoothedState {
    /// Builds a state from explicit components given as label sequences.
    /// Every label must occur exactly twice across all components.
    pub fn from_components(components: &[Vec<u32>]) -> Result<Self> {
        let flat: Vec<u32> = components.iter().flatten().copied().collect();
        if flat.is_empty() {
            return Ok(SmoothedState {
                labels: Vec::new(),
                ids: Vec::new(),
                components: components.iter().map(|_| Vec::new()).collect(),
                smoothed: Vec::new(),
                active: Vec::new(),
            });
        }
        let d = ChordDiagram::from_word(&flat)?;
        let mut comps = Vec::with_capacity(components.len());
        let mut at = 0;
        for c in components {
            comps.push((at..at + c.len()).collect());
            at += c.len();
        }
        Ok(SmoothedState {
            labels: d.word().to_vec(),
            ids: d.vertex_ids().to_vec(),
            components: comps,
            smoothed: Vec::new(),
            active: vec![true; d.n()],
        })
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Components as label sequences (source labels).
    pub fn components(&self) -> Vec<Vec<u32>> {
        self.components
            .iter()
            .map(|c| c.iter().map(|&p| self.labels[p]).collect())
            .collect()
    }

    pub fn smoothed(&self) -> &[(u32, SmoothKind)] {
        &self.smoothed
    }

    /// Labels of the chords that are still present.
    pub fn residual_chords(&self) -> Vec<u32> {
        (0..self.active.len() as u32)
            .filter(|&l| self.active[l as usize])
            .collect()
    }

    pub fn vertex_id(&self, label: u32) -> VertexId {
        self.ids[label as usize]
    }

    fn locate(&self, position: usize) -> (usize, usize) {
        for (ci, c) in self.components.iter().enumerate() {
            if let Some(i) = c.iter().position(|&p| p == position) {
                return (ci, i);
            }
        }
        unreachable!("residual endpoint without a location")
    }

    fn endpoints(&self, label: u32) -> [usize; 2] {
        let mut it = self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(p, _)| p);
        [it.next().unwrap(), it.next().unwrap()]
    }

    /// Smooths chord `v` (a source label).
    pub fn smooth(&self, v: u32, kind: SmoothKind) -> Result<SmoothedState> {
        if (v as usize) >= self.active.len() || !self.active[v as usize] {
            return Err(Error::AbsentChord(v));
        }
        let [p, q] = self.endpoints(v);
        let (cp, ip) = self.locate(p);
        let (cq, iq) = self.locate(q);
        let mut out = self.clone();
        out.active[v as usize] = false;
        out.smoothed.push((v, kind));
        if cp == cq {
            // rotate so that p is first: [p, A.., q, B..]
            let c = &self.components[cp];
            let len = c.len();
            let rot: Vec<usize> = (0..len).map(|i| c[(ip + i) % len]).collect();
            let k = (iq + len - ip) % len;
            let a: Vec<usize> = rot[1..k].to_vec();
            let b: Vec<usize> = rot[k + 1..].to_vec();
            match kind {
                SmoothKind::Split => {
                    out.components[cp] = a;
                    out.components.push(b);
                }
                SmoothKind::Reverse => {
                    let (mut a, mut b) = (a, b);
                    if b.len() < a.len() {
                        b.reverse();
                    } else {
                        a.reverse();
                    }
                    a.extend(b);
                    out.components[cp] = a;
                }
            }
        } else {
            let rot = |c: &Vec<usize>, i: usize| -> Vec<usize> {
                let len = c.len();
                (1..len).map(|k| c[(i + k) % len]).collect()
            };
            let mut a = rot(&self.components[cp], ip);
            let mut b = rot(&self.components[cq], iq);
            if kind == SmoothKind::Reverse {
                b.reverse();
            }
            a.append(&mut b);
            let (lo, hi) = (cp.min(cq), cp.max(cq));
            out.components.remove(hi);
            out.components[lo] = a;
        }
        Ok(out)
    }

    /// The chord diagram read along the single component, if there is one.
    pub fn as_diagram(&self) -> Option<ChordDiagram> {
        if self.components.len() != 1 {
            return None;
        }
        let w: Vec<u32> = self.components[0].iter().map(|&p| self.labels[p]).collect();
        Some(ChordDiagram::relabelled(&w, |l, _| self.ids[l as usize]))
    }
}

/// Smooths `v` in a chord diagram.
pub fn smooth(d: &ChordDiagram, v: u32, kind: SmoothKind) -> Result<SmoothedState> {
    SmoothedState::from(d).smooth(v, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cd(w: &[u32]) -> ChordDiagram {
        ChordDiagram::from_word(w).unwrap()
    }

    #[test]
    fn split_and_reverse_on_linked_pair() {
        let d = cd(&[1, 2, 1, 2]);
        let s = smooth(&d, 0, SmoothKind::Split).unwrap();
        assert_eq!(s.component_count(), 2);
        assert_eq!(s.components(), vec![vec![1], vec![1]]);
        assert!(s.as_diagram().is_none());
        let r = smooth(&d, 0, SmoothKind::Reverse).unwrap();
        assert_eq!(r.component_count(), 1);
        assert_eq!(r.components(), vec![vec![1, 1]]);
        assert_eq!(r.as_diagram().unwrap().word(), &[0, 0]);
    }

    #[test]
    fn kink_smoothings() {
        let d = cd(&[1, 1]);
        let s = smooth(&d, 0, SmoothKind::Split).unwrap();
        assert_eq!(s.components(), vec![Vec::<u32>::new(), vec![]]);
        let r = smooth(&d, 0, SmoothKind::Reverse).unwrap();
        assert_eq!(r.component_count(), 1);
        assert!(r.as_diagram().unwrap().is_unknot());
    }

    #[test]
    fn unknot_state() {
        let s = SmoothedState::from(&ChordDiagram::unknot());
        assert_eq!(s.component_count(), 1);
        assert!(s.as_diagram().unwrap().is_unknot());
    }

    #[test]
    fn absent_chord() {
        let d = cd(&[1, 1]);
        let s = smooth(&d, 0, SmoothKind::Split).unwrap();
        assert_eq!(s.smooth(0, SmoothKind::Split), Err(Error::AbsentChord(0)));
        assert_eq!(smooth(&d, 4, SmoothKind::Split), Err(Error::AbsentChord(4)));
    }

    #[test]
    fn merge_across_components() {
        // split at 1 leaves chords 2 and 3 spanning both halves
        let d = cd(&[1, 2, 3, 1, 2, 3]);
        let s = smooth(&d, 0, SmoothKind::Split).unwrap();
        assert_eq!(s.component_count(), 2);
        let m = s.smooth(1, SmoothKind::Split).unwrap();
        assert_eq!(m.component_count(), 1);
        let m2 = s.smooth(1, SmoothKind::Reverse).unwrap();
        assert_eq!(m2.component_count(), 1);
        assert_eq!(m.as_diagram().unwrap().n(), 1);
    }

    #[test]
    fn residual_endpoints_have_two_locations() {
        let d = cd(&[1, 2, 3, 4, 1, 3, 2, 4]);
        let s = smooth(&d, 1, SmoothKind::Reverse)
            .unwrap()
            .smooth(3, SmoothKind::Split)
            .unwrap();
        let comps = s.components();
        for l in s.residual_chords() {
            let c: usize = comps.iter().map(|c| c.iter().filter(|&&x| x == l).count()).sum();
            assert_eq!(c, 2);
        }
        assert!(s.component_count() >= 1);
    }
}
