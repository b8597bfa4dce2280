//! Invariants built from a parity: the parity bracket, deletion of odd
//! crossings, and minimality certificates.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::{ChordDiagram, DecoratedDiagram, VertexId};
use crate::error::{Error, Result};
use crate::moves::{is_r2_irreducible, r2_reduced_form, remove_chords};
use crate::parity::{gaussian_parity, ParityAssignment, Pseudoparity};
use crate::search::{bfs_reachable, SearchBounds};
use crate::smoothing::{SmoothKind, SmoothedState};

/// Default bound on the number of smoothed crossings in a bracket.
pub const BRACKET_CAP: usize = 20;

/// An element of the Z2 span of R2-reduced free knot diagrams: a set of
/// canonical terms, added by symmetric difference.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BracketValue {
    terms: BTreeMap<Vec<u32>, ChordDiagram>,
}

impl BracketValue {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(d: &ChordDiagram) -> Self {
        let mut b = Self::zero();
        b.toggle(r2_reduced_form(d));
        b
    }

    /// Adds one term (already reduced and canonical).
    fn toggle(&mut self, term: ChordDiagram) {
        let key = term.word().to_vec();
        if self.terms.remove(&key).is_none() {
            self.terms.insert(key, term);
        }
    }

    pub fn add(&mut self, other: &BracketValue) {
        for t in other.terms.values() {
            self.toggle(t.clone());
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &ChordDiagram> {
        self.terms.values()
    }

    /// Sorted canonical codes of the terms.
    pub fn codes(&self) -> Vec<String> {
        let mut v: Vec<String> = self.terms.values().map(ChordDiagram::to_code).collect();
        v.sort();
        v
    }
}

impl Serialize for BracketValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.codes().serialize(s)
    }
}

pub fn bracket_eq(a: &BracketValue, b: &BracketValue) -> bool {
    a == b
}

/// Bracket together with the number of states dropped for having more
/// than one component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketDetail {
    pub value: BracketValue,
    pub states: usize,
    pub discarded: usize,
}

/// Parity bracket with the default cap on even crossings.
pub fn parity_bracket(d: &ChordDiagram, p: &ParityAssignment) -> Result<BracketValue> {
    parity_bracket_capped(d, p, BRACKET_CAP).map(|b| b.value)
}

/// Smooths every even crossing both ways, keeps odd crossings as chords,
/// and sums the R2-reduced one-component results mod 2.
pub fn parity_bracket_capped(d: &ChordDiagram, p: &ParityAssignment, cap: usize) -> Result<BracketDetail> {
    if p.len() != d.n() || p.ids() != d.vertex_ids() {
        return Err(Error::Invalid("parity is not defined on this diagram".into()));
    }
    let even: Vec<u32> = (0..d.n() as u32).filter(|&l| !p.is_odd(l)).collect();
    if even.len() > cap {
        return Err(Error::StateExplosion(even.len(), cap));
    }
    let root = SmoothedState::from(d);
    let terms: Vec<Option<ChordDiagram>> = (0u64..1 << even.len())
        .into_par_iter()
        .map(|s| {
            let mut st = root.clone();
            for (i, &v) in even.iter().enumerate() {
                let kind = if s >> i & 1 == 0 {
                    SmoothKind::Split
                } else {
                    SmoothKind::Reverse
                };
                st = st.smooth(v, kind).expect("each even chord is smoothed once");
            }
            st.as_diagram().map(|k| r2_reduced_form(&k))
        })
        .collect();
    let mut value = BracketValue::zero();
    let mut discarded = 0;
    for t in terms {
        match t {
            Some(k) => value.toggle(k),
            None => discarded += 1,
        }
    }
    Ok(BracketDetail {
        value,
        states: 1 << even.len(),
        discarded,
    })
}

/// Removes every crossing on which the pseudoparity is 1.
pub fn delete_odd(d: &DecoratedDiagram, pp: &Pseudoparity) -> Result<DecoratedDiagram> {
    if pp.ids() != d.base().vertex_ids() {
        return Err(Error::Invalid("pseudoparity is not defined on this diagram".into()));
    }
    let odd: Vec<VertexId> = pp
        .ids()
        .iter()
        .zip(pp.values())
        .filter(|(_, &v)| v == 1)
        .map(|(&id, _)| id)
        .collect();
    Ok(remove_chords(d, &odd))
}

/// Bounded check of the strong minimality consequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attestation {
    pub depth: usize,
    pub cap: usize,
    pub reachable: usize,
    pub truncated: bool,
    /// No reachable diagram has fewer crossings.
    pub no_smaller: bool,
    /// Every reachable diagram smooths to the certified one.
    pub verified_strong_form: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityCertificate {
    pub code: String,
    pub n: usize,
    pub gp: Vec<u8>,
    pub irreducible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attestation: Option<Attestation>,
}

impl MinimalityCertificate {
    /// Rechecks the witnesses from the code alone.
    pub fn recheck(&self) -> Result<bool> {
        let d = crate::diagram::parse_free_code(&self.code)?;
        Ok(minimality_certificate(&d).is_some_and(|c| c.n == self.n && c.gp == self.gp))
    }
}

/// Certificate for a diagram whose crossings are all odd and which admits
/// no decreasing R2 move.
pub fn minimality_certificate(d: &ChordDiagram) -> Option<MinimalityCertificate> {
    let gp = gaussian_parity(d).bits();
    let irreducible = is_r2_irreducible(&DecoratedDiagram::free(d.clone()));
    if !irreducible || gp.iter().any(|&b| b == 0) {
        return None;
    }
    Some(MinimalityCertificate {
        code: d.canonical_code(),
        n: d.n(),
        gp,
        irreducible,
        attestation: None,
    })
}

/// Whether smoothing some crossings of `big` yields a one-component diagram
/// isomorphic to `small`.
pub fn smooths_to(big: &ChordDiagram, small: &ChordDiagram) -> bool {
    let (n, m) = (big.n(), small.n());
    if n < m {
        return false;
    }
    let target = small.canonical_key();
    let k = n - m;
    let root = SmoothedState::from(big);
    let mut subset: Vec<u32> = (0..k as u32).collect();
    loop {
        for kinds in 0u32..1 << k {
            let mut st = root.clone();
            for (i, &v) in subset.iter().enumerate() {
                let kind = if kinds >> i & 1 == 0 {
                    SmoothKind::Split
                } else {
                    SmoothKind::Reverse
                };
                st = st.smooth(v, kind).expect("distinct chords");
            }
            if let Some(r) = st.as_diagram() {
                if r.canonical_key() == target {
                    return true;
                }
            }
        }
        // next k-subset in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| subset[i] < (n - k + i) as u32) else {
            return false;
        };
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

/// Adds a bounded attestation of the strong minimality consequence.
pub fn attest(cert: &mut MinimalityCertificate, depth: usize, cap: usize) -> Result<()> {
    let d = crate::diagram::parse_free_code(&cert.code)?;
    let r = bfs_reachable(&DecoratedDiagram::free(d.clone()), SearchBounds::new(depth, cap));
    let no_smaller = r.nodes.iter().all(|x| x.diagram.n() >= cert.n);
    let strong = r
        .nodes
        .par_iter()
        .all(|x| smooths_to(x.diagram.base(), &d));
    cert.attestation = Some(Attestation {
        depth,
        cap,
        reachable: r.len(),
        truncated: r.truncated.any(),
        no_smaller,
        verified_strong_form: no_smaller && strong,
    });
    Ok(())
}

/// Every chord diagram with `n` chords up to rotation and reflection, as
/// canonical representatives in increasing word order.
pub fn enumerate_diagrams(n: usize) -> Vec<ChordDiagram> {
    enumerate_words(n)
        .into_par_iter()
        .filter_map(|w| {
            let d = ChordDiagram::from_dense(w, (1..=n as VertexId).collect());
            let c = d.canonical_form();
            (c.word() == d.word()).then_some(d)
        })
        .collect()
}

/// All double-occurrence words on `n` letters with labels in
/// first-occurrence order.
pub fn enumerate_words(n: usize) -> Vec<Vec<u32>> {
    fn rec(w: &mut Vec<u32>, count: &mut [u8], used: u32, n: usize, out: &mut Vec<Vec<u32>>) {
        if w.len() == 2 * n {
            out.push(w.clone());
            return;
        }
        for l in 0..n as u32 {
            let c = count[l as usize];
            // a label may open only if it is the next unused one
            if c == 2 || (c == 0 && l != used) {
                continue;
            }
            count[l as usize] += 1;
            w.push(l);
            rec(w, count, used + (c == 0) as u32, n, out);
            w.pop();
            count[l as usize] -= 1;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(2 * n), &mut vec![0; n], 0, n, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_free_code, Level};
    use crate::parity::pseudoparity_of;

    fn cd(code: &str) -> ChordDiagram {
        parse_free_code(code).unwrap()
    }

    #[test]
    fn bracket_examples() {
        let g0 = BracketValue::single(&ChordDiagram::unknot());
        let d = cd("1 2 1 2");
        assert_eq!(parity_bracket(&d, &gaussian_parity(&d)).unwrap(), g0);
        let u = ChordDiagram::unknot();
        assert_eq!(parity_bracket(&u, &gaussian_parity(&u)).unwrap(), g0);
        assert!(!bracket_eq(&BracketValue::zero(), &g0));
        assert_eq!(serde_json::to_string(&g0).unwrap(), r#"[""]"#);
    }

    #[test]
    fn bracket_cap() {
        let d = cd("1 1 2 2 3 3");
        let r = parity_bracket_capped(&d, &gaussian_parity(&d), 2);
        assert_eq!(r, Err(Error::StateExplosion(3, 2)));
        let r = parity_bracket_capped(&d, &gaussian_parity(&d), 3).unwrap();
        assert_eq!(r.states, 8);
    }

    #[test]
    fn deletion_examples() {
        let d = crate::diagram::parse_code("1 2 1 2", Level::Free).unwrap();
        let pp = pseudoparity_of(&gaussian_parity(d.base()));
        assert!(delete_odd(&d, &pp).unwrap().base().is_unknot());
        let d = crate::diagram::parse_code("1 1", Level::Free).unwrap();
        let pp = pseudoparity_of(&gaussian_parity(d.base()));
        assert_eq!(delete_odd(&d, &pp).unwrap(), d);
    }

    #[test]
    fn certificates() {
        assert!(minimality_certificate(&cd("1 2 1 2")).is_none());
        assert!(minimality_certificate(&cd("1 1")).is_none());
    }

    #[test]
    fn enumeration_counts() {
        let c: Vec<usize> = (0..=5).map(|n| enumerate_diagrams(n).len()).collect();
        // chord diagrams up to rotation and reflection
        assert_eq!(c, vec![1, 1, 2, 5, 17, 79]);
        assert_eq!(enumerate_words(4).len(), 105);
    }

    #[test]
    fn smoothing_containment() {
        let big = cd("1 2 3 1 3 2");
        assert!(smooths_to(&big, &cd("1 2 1 2")));
        assert!(!smooths_to(&cd("1 2 3 1 2 3"), &cd("1 2 1 2")));
        assert!(smooths_to(&big, &big));
        assert!(!smooths_to(&cd("1 1"), &big));
    }
}
