//! Multi-component free links as words on several circles, and the
//! classifier deciding which smoothings lead to a given two-component link.

use std::collections::HashMap;

use crate::diagram::{DecoratedDiagram, VertexId};
use crate::error::{Error, Result};
use crate::parity::ParityAssignment;
use crate::smoothing::{SmoothKind, SmoothedState};
use crate::surface::{characteristic_parity_for, sum_of_halves, CarterSurface};

/// A free link diagram: one cyclic word per component; every label occurs
/// exactly twice in total.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeLink {
    components: Vec<Vec<u32>>,
}

impl FreeLink {
    pub fn new(components: Vec<Vec<u32>>) -> Result<Self> {
        let mut count: HashMap<u32, usize> = HashMap::new();
        for &l in components.iter().flatten() {
            *count.entry(l).or_default() += 1;
        }
        if let Some((l, c)) = count.iter().find(|(_, &c)| c != 2) {
            return Err(Error::BadMultiplicity {
                label: l.to_string(),
                count: *c,
                position: 0,
            });
        }
        Ok(FreeLink { components })
    }

    /// The `k`-component unlink.
    pub fn unlink(k: usize) -> Self {
        FreeLink {
            components: vec![Vec::new(); k],
        }
    }

    /// Parses components separated by `|`, e.g. `"1 2 | 1 2"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut labels: HashMap<String, u32> = HashMap::new();
        let comps = text
            .split('|')
            .map(|c| {
                c.split_whitespace()
                    .map(|t| {
                        let next = labels.len() as u32;
                        *labels.entry(t.to_string()).or_insert(next)
                    })
                    .collect()
            })
            .collect();
        Self::new(comps)
    }

    pub fn components(&self) -> &[Vec<u32>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn chord_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Number of chords joining different components, mod 2. Unchanged by
    /// all three moves.
    pub fn linking_parity(&self) -> bool {
        let mut home: HashMap<u32, usize> = HashMap::new();
        let mut odd = false;
        for (ci, c) in self.components.iter().enumerate() {
            for &l in c {
                if let Some(&other) = home.get(&l) {
                    odd ^= other != ci;
                } else {
                    home.insert(l, ci);
                }
            }
        }
        odd
    }

    fn remove(&mut self, labels: &[u32]) {
        for c in &mut self.components {
            c.retain(|l| !labels.contains(l));
        }
    }

    /// Adjacency sites `(component, i)` joining positions `i` and `i+1`.
    fn sites(&self) -> Vec<(usize, usize, u32, u32)> {
        let mut out = Vec::new();
        for (ci, c) in self.components.iter().enumerate() {
            let len = c.len();
            if len < 2 {
                continue;
            }
            let ends = if len == 2 { 1 } else { len };
            for i in 0..ends {
                out.push((ci, i, c[i], c[(i + 1) % len]));
            }
        }
        out
    }

    fn find_r1(&self) -> Option<u32> {
        self.sites().into_iter().find(|s| s.2 == s.3).map(|s| s.2)
    }

    fn find_r2(&self) -> Option<[u32; 2]> {
        let sites: Vec<_> = self.sites().into_iter().filter(|s| s.2 != s.3).collect();
        for (x, s) in sites.iter().enumerate() {
            for t in &sites[x + 1..] {
                let same = (s.2 == t.2 && s.3 == t.3) || (s.2 == t.3 && s.3 == t.2);
                if !same {
                    continue;
                }
                let overlap = s.0 == t.0 && {
                    let len = self.components[s.0].len();
                    let ps = [s.1, (s.1 + 1) % len];
                    let pt = [t.1, (t.1 + 1) % len];
                    ps.iter().any(|p| pt.contains(p))
                };
                if !overlap {
                    return Some([s.2, s.3]);
                }
            }
        }
        None
    }

    /// Removes loops and bigons until none remain.
    pub fn reduced(&self) -> FreeLink {
        let mut l = self.clone();
        loop {
            if let Some(a) = l.find_r1() {
                l.remove(&[a]);
            } else if let Some(ab) = l.find_r2() {
                l.remove(&ab);
            } else {
                return l;
            }
        }
    }

    /// Lexicographically least relabelled reading over component orders,
    /// rotations and reversals of each component.
    pub fn canonical_key(&self) -> Vec<u32> {
        let k = self.components.len();
        let mut best: Option<Vec<u32>> = None;
        for order in permutations(k) {
            let readings: Vec<Vec<Vec<u32>>> = order
                .iter()
                .map(|&ci| dihedral_readings(&self.components[ci]))
                .collect();
            let mut choice = vec![0usize; k];
            loop {
                let mut map: HashMap<u32, u32> = HashMap::new();
                let mut key = Vec::with_capacity(self.chord_count() * 2 + k);
                for (slot, r) in choice.iter().enumerate() {
                    for &l in &readings[slot][*r] {
                        let next = map.len() as u32;
                        key.push(*map.entry(l).or_insert(next) + 1);
                    }
                    key.push(0);
                }
                if best.as_ref().is_none_or(|b| key < *b) {
                    best = Some(key);
                }
                // advance the mixed-radix counter
                let mut slot = 0;
                while slot < k {
                    choice[slot] += 1;
                    if choice[slot] < readings[slot].len() {
                        break;
                    }
                    choice[slot] = 0;
                    slot += 1;
                }
                if slot == k {
                    break;
                }
            }
        }
        best.unwrap_or_default()
    }
}

fn dihedral_readings(c: &[u32]) -> Vec<Vec<u32>> {
    let len = c.len();
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::with_capacity(2 * len);
    for s in 0..len {
        out.push((0..len).map(|i| c[(s + i) % len]).collect());
        out.push((0..len).map(|i| c[(s + len - i) % len]).collect());
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push(q);
        }
    }
    out
}

impl From<&SmoothedState> for FreeLink {
    fn from(s: &SmoothedState) -> Self {
        FreeLink {
            components: s.components(),
        }
    }
}

/// Decides equivalence of free links, possibly giving up.
pub trait LinkClassifier {
    /// `Ok(true)` / `Ok(false)` when decided, `ClassifierInconclusive` otherwise.
    fn equivalent(&self, a: &FreeLink, b: &FreeLink) -> Result<bool>;
}

/// Decides by invariants that certainly separate (component count, linking
/// parity) and by equality of loop-and-bigon-reduced canonical forms, which
/// certainly identifies. Anything else is reported as inconclusive.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReducedFormClassifier;

impl LinkClassifier for ReducedFormClassifier {
    fn equivalent(&self, a: &FreeLink, b: &FreeLink) -> Result<bool> {
        if a.component_count() != b.component_count() || a.linking_parity() != b.linking_parity() {
            return Ok(false);
        }
        let (ra, rb) = (a.reduced(), b.reduced());
        if ra.canonical_key() == rb.canonical_key() {
            return Ok(true);
        }
        Err(Error::ClassifierInconclusive)
    }
}

/// Whether smoothing crossing `label` of `d` in the given way produces a
/// two-component diagram of `target`.
pub fn leads_to_with(
    d: &DecoratedDiagram,
    label: u32,
    kind: SmoothKind,
    target: &FreeLink,
    classifier: &dyn LinkClassifier,
) -> Result<bool> {
    let s = crate::smoothing::smooth(d.base(), label, kind)?;
    if s.component_count() != 2 {
        return Ok(false);
    }
    classifier.equivalent(&FreeLink::from(&s), target)
}

/// [`leads_to_with`] for the orientation-respecting smoothing and the default
/// classifier.
pub fn leads_to(d: &DecoratedDiagram, label: u32, target: &FreeLink) -> Result<bool> {
    leads_to_with(d, label, SmoothKind::Split, target, &ReducedFormClassifier)
}

/// Characteristic parity of `gamma_L`, the sum of first halves over the
/// crossings whose smoothing leads to `target`.
pub fn characteristic_parity_link(
    d: &DecoratedDiagram,
    target: &FreeLink,
    classifier: &dyn LinkClassifier,
) -> Result<ParityAssignment> {
    let s = CarterSurface::new(d)?;
    if !s.checkerboard() {
        return Err(Error::NotColourable);
    }
    let mut chosen = Vec::new();
    for v in 0..d.n() as u32 {
        if leads_to_with(d, v, SmoothKind::Split, target, classifier)? {
            chosen.push(v);
        }
    }
    characteristic_parity_for(d, &s, &sum_of_halves(d.base(), chosen))
}

/// Vertex ids of the crossings leading to `target`.
pub fn crossings_leading_to(
    d: &DecoratedDiagram,
    target: &FreeLink,
    classifier: &dyn LinkClassifier,
) -> Result<Vec<VertexId>> {
    let mut out = Vec::new();
    for v in 0..d.n() as u32 {
        if leads_to_with(d, v, SmoothKind::Split, target, classifier)? {
            out.push(d.base().vertex_id(v));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_code, Level};
    use crate::surface::characteristic_parity_a;

    #[test]
    fn wrong_component_count() {
        let d = parse_code("1 2 1 2", Level::Free).unwrap();
        let r = leads_to_with(&d, 0, SmoothKind::Reverse, &FreeLink::unlink(2), &ReducedFormClassifier);
        assert_eq!(r, Ok(false));
    }

    #[test]
    fn bigon_smoothing_gives_unlink() {
        let d = parse_code("1 2 3 1 3 2", Level::Free).unwrap();
        assert_eq!(leads_to(&d, 0, &FreeLink::unlink(2)), Ok(true));
        // one crossing left between the circles: odd linking
        let d = parse_code("1 2 1 2", Level::Free).unwrap();
        assert_eq!(leads_to(&d, 0, &FreeLink::unlink(2)), Ok(false));
        let hopf = FreeLink::parse("1 | 1").unwrap();
        assert_eq!(leads_to(&d, 0, &hopf), Ok(true));
    }

    #[test]
    fn inconclusive_is_surfaced() {
        // no loop or bigon to remove, yet not obviously different from the unlink
        let a = FreeLink::parse("1 2 1 3 2 3 4 5 4 6 5 6 |").unwrap();
        let b = FreeLink::unlink(2);
        assert_eq!(
            ReducedFormClassifier.equivalent(&a, &b),
            Err(Error::ClassifierInconclusive)
        );
    }

    #[test]
    fn canonical_key_ignores_presentation() {
        let a = FreeLink::parse("1 2 | 2 1 3 3").unwrap();
        let b = FreeLink::parse("7 7 5 9 | 9 5").unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
    }

    #[test]
    fn all_crossings_leading_matches_gamma_a() {
        let d = parse_code("O1+ U2+ O3+ U1+ O2+ U3+", Level::Virtual).unwrap();
        let target = FreeLink::unlink(2);
        let leading = crossings_leading_to(&d, &target, &ReducedFormClassifier).unwrap();
        assert_eq!(leading, vec![1, 2, 3]);
        assert_eq!(
            characteristic_parity_link(&d, &target, &ReducedFormClassifier).unwrap(),
            characteristic_parity_a(&d).unwrap()
        );
    }
}
