//! Chord diagrams (Gauss diagrams) and their flat/virtual decorations.
//!
//! A chord diagram is stored as a cyclic word of `2n` labels in which every
//! label occurs exactly twice. Labels are always dense (`0..n`) and numbered
//! in order of first occurrence; each label carries a stable [`VertexId`]
//! that survives relabelling, so that move correspondences can be tracked
//! across diagrams.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::z2::BitMatrix;

/// Stable identifier of a crossing (chord).
pub type VertexId = u64;

/// An undecorated chord diagram, i.e. a framed 4-graph with one unicursal
/// component. The empty word is the trivial diagram `G_0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChordDiagram {
    word: Vec<u32>,
    ids: Vec<VertexId>,
    pos: Vec<[usize; 2]>,
}

impl ChordDiagram {
    /// The diagram without chords.
    pub fn unknot() -> Self {
        ChordDiagram {
            word: Vec::new(),
            ids: Vec::new(),
            pos: Vec::new(),
        }
    }

    /// Builds a diagram from an arbitrary double-occurrence word. Vertex ids
    /// are assigned `1..=n` in first-occurrence order.
    pub fn from_word<L: Copy + Eq + std::hash::Hash + ToString>(word: &[L]) -> Result<Self> {
        let mut counts: HashMap<L, (usize, usize)> = HashMap::new();
        for (i, &l) in word.iter().enumerate() {
            let e = counts.entry(l).or_insert((0, i));
            e.0 += 1;
        }
        let offender = |pred: &dyn Fn(usize) -> bool| {
            counts
                .iter()
                .filter(|(_, (c, _))| pred(*c))
                .min_by_key(|(_, (_, p))| *p)
                .map(|(l, (c, p))| Error::BadMultiplicity {
                    label: l.to_string(),
                    count: *c,
                    position: *p,
                })
        };
        // over-used labels are reported before parity of the length
        if let Some(e) = offender(&|c| c > 2) {
            return Err(e);
        }
        if word.len() % 2 == 1 {
            return Err(Error::OddLength(word.len()));
        }
        if let Some(e) = offender(&|c| c != 2) {
            return Err(e);
        }
        Ok(Self::relabelled(word, |_, rank| rank as VertexId + 1))
    }

    /// Densifies labels in first-occurrence order; `id_of(old_label, rank)`
    /// supplies the vertex id for each chord. The caller guarantees the word
    /// is a valid double-occurrence word.
    pub(crate) fn relabelled<L: Copy + Eq + std::hash::Hash>(
        word: &[L],
        mut id_of: impl FnMut(L, usize) -> VertexId,
    ) -> Self {
        let mut map: HashMap<L, u32> = HashMap::with_capacity(word.len() / 2);
        let mut out = Vec::with_capacity(word.len());
        let mut ids = Vec::with_capacity(word.len() / 2);
        for &l in word {
            let next = map.len() as u32;
            let new = *map.entry(l).or_insert_with(|| {
                ids.push(id_of(l, next as usize));
                next
            });
            out.push(new);
        }
        Self::from_dense(out, ids)
    }

    /// `word` must already use dense first-occurrence labels.
    pub(crate) fn from_dense(word: Vec<u32>, ids: Vec<VertexId>) -> Self {
        let n = ids.len();
        let mut pos = vec![[usize::MAX; 2]; n];
        for (i, &l) in word.iter().enumerate() {
            let p = &mut pos[l as usize];
            if p[0] == usize::MAX {
                p[0] = i;
            } else {
                p[1] = i;
            }
        }
        debug_assert!(pos.iter().all(|p| p[1] != usize::MAX));
        ChordDiagram { word, ids, pos }
    }

    /// Number of chords.
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn is_unknot(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> &[u32] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Label of the chord ending at `position`.
    pub fn label_at(&self, position: usize) -> u32 {
        self.word[position]
    }

    /// The two endpoint positions of a chord, in increasing order.
    pub fn positions(&self, label: u32) -> [usize; 2] {
        self.pos[label as usize]
    }

    /// The other endpoint of the chord ending at `position`.
    pub fn partner(&self, position: usize) -> usize {
        let [a, b] = self.pos[self.word[position] as usize];
        if a == position {
            b
        } else {
            a
        }
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn vertex_id(&self, label: u32) -> VertexId {
        self.ids[label as usize]
    }

    pub fn label_of(&self, id: VertexId) -> Option<u32> {
        self.ids.iter().position(|&v| v == id).map(|l| l as u32)
    }

    /// A vertex id not used by this diagram.
    pub fn fresh_id(&self) -> VertexId {
        self.ids.iter().copied().max().unwrap_or(0) + 1
    }

    /// Replaces the vertex ids, indexed by label.
    pub fn with_vertex_ids(mut self, ids: Vec<VertexId>) -> Self {
        assert_eq!(ids.len(), self.n());
        self.ids = ids;
        self
    }

    /// Rotates the core circle so that position `k` becomes position 0.
    pub fn rotate(&self, k: usize) -> Self {
        if self.word.is_empty() {
            return self.clone();
        }
        let len = self.word.len();
        let w: Vec<u32> = (0..len).map(|i| self.word[(i + k) % len]).collect();
        Self::relabelled(&w, |l, _| self.ids[l as usize])
    }

    /// Reverses the core circle.
    pub fn reflect(&self) -> Self {
        let w: Vec<u32> = self.word.iter().rev().copied().collect();
        Self::relabelled(&w, |l, _| self.ids[l as usize])
    }

    /// Lexicographically least representative under rotations and, unless
    /// `oriented`, reflections of the core circle.
    pub fn canonical_form_with(&self, oriented: bool) -> ChordDiagram {
        let (key, start, rev) = dihedral_min(&self.word, self.n(), !oriented, |_| 0);
        let len = self.word.len();
        let mut ids = vec![0; self.n()];
        for (i, &new) in key.iter().enumerate() {
            let old = self.word[read_index(start, rev, i, len)];
            ids[new as usize] = self.ids[old as usize];
        }
        Self::from_dense(key, ids)
    }

    /// Canonical form for unoriented diagrams (rotations and reflections).
    pub fn canonical_form(&self) -> ChordDiagram {
        self.canonical_form_with(false)
    }

    /// Hashable key of the isomorphism class.
    pub fn canonical_key(&self) -> Vec<u32> {
        dihedral_min(&self.word, self.n(), true, |_| 0).0
    }

    pub fn is_isomorphic(&self, other: &ChordDiagram) -> bool {
        self.n() == other.n() && self.canonical_key() == other.canonical_key()
    }

    /// Symmetries of the unoriented diagram: every `(start, reversed)` reading
    /// that reproduces the same labelled word, as permutations of labels.
    pub fn automorphisms(&self) -> Vec<Vec<u32>> {
        let len = self.word.len();
        let mut out = Vec::new();
        if len == 0 {
            return out;
        }
        for rev in [false, true] {
            for start in 0..len {
                let mut perm = vec![u32::MAX; self.n()];
                let mut ok = true;
                let mut seen: Vec<u32> = Vec::with_capacity(self.n());
                let mut relabel = vec![u32::MAX; self.n()];
                for i in 0..len {
                    let old = self.word[read_index(start, rev, i, len)];
                    if relabel[old as usize] == u32::MAX {
                        relabel[old as usize] = seen.len() as u32;
                        seen.push(old);
                    }
                    if relabel[old as usize] != self.word[i] {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    for (new, &old) in seen.iter().enumerate() {
                        perm[old as usize] = new as u32;
                    }
                    out.push(perm);
                }
            }
        }
        out
    }

    /// Interlacement matrix: entry (i, j) is set iff chords i and j are linked.
    pub fn interlacement(&self) -> BitMatrix {
        let n = self.n();
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            let [a, b] = self.pos[i];
            for j in (i + 1)..n {
                let [c, d] = self.pos[j];
                let inside = |x: usize| a < x && x < b;
                if inside(c) != inside(d) {
                    m.set(i, j, true);
                    m.set(j, i, true);
                }
            }
        }
        m
    }

    /// Whether chords `i` and `j` are linked.
    pub fn linked(&self, i: u32, j: u32) -> bool {
        let [a, b] = self.pos[i as usize];
        let [c, d] = self.pos[j as usize];
        let inside = |x: usize| a < x && x < b;
        i != j && inside(c) != inside(d)
    }

    /// Removes the given chords (by label), keeping vertex ids of survivors.
    pub fn delete_chords(&self, labels: &[u32]) -> ChordDiagram {
        let mut drop = vec![false; self.n()];
        for &l in labels {
            drop[l as usize] = true;
        }
        let w: Vec<u32> = self
            .word
            .iter()
            .copied()
            .filter(|&l| !drop[l as usize])
            .collect();
        Self::relabelled(&w, |l, _| self.ids[l as usize])
    }

    /// Whitespace-separated code of this exact word, 1-based labels.
    pub fn to_code(&self) -> String {
        let mut s = String::new();
        for (i, l) in self.word.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{}", l + 1).unwrap();
        }
        s
    }

    /// Code of the canonical form.
    pub fn canonical_code(&self) -> String {
        self.canonical_form().to_code()
    }

    /// Graphviz rendering of the framed 4-graph. Edges are arcs of the core
    /// circle; ports 0/2 and 1/3 are the opposite half-edge pairs.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph framed4 {\n  node [shape=circle];\n");
        if self.word.is_empty() {
            s.push_str("  c [label=\"\"];\n  c -- c;\n}\n");
            return s;
        }
        for l in 0..self.n() {
            writeln!(s, "  v{} [label=\"{}\"];", self.ids[l], self.ids[l]).unwrap();
        }
        let len = self.word.len();
        for p in 0..len {
            let q = (p + 1) % len;
            let (from, to) = (self.word[p], self.word[q]);
            let out_port = if self.pos[from as usize][0] == p { 2 } else { 3 };
            let in_port = if self.pos[to as usize][0] == q { 0 } else { 1 };
            writeln!(
                s,
                "  v{} -- v{} [taillabel=\"{}\", headlabel=\"{}\", label=\"e{}\"];",
                self.ids[from as usize], self.ids[to as usize], out_port, in_port, p
            )
            .unwrap();
        }
        s.push_str("}\n");
        s
    }
}

#[inline]
pub(crate) fn read_index(start: usize, rev: bool, i: usize, len: usize) -> usize {
    if rev {
        (start + len - i % len) % len
    } else {
        (start + i) % len
    }
}

/// Lexicographic minimum over rotations (and reflections when `reflect`) of
/// a labelled cyclic word with greedy first-occurrence relabelling. Each key
/// element is `new_label * 4 + mark(position)`. Returns the key with the
/// start position and direction achieving it (the first found on ties).
pub(crate) fn dihedral_min(
    word: &[u32],
    n: usize,
    reflect: bool,
    mark: impl Fn(usize) -> u32,
) -> (Vec<u32>, usize, bool) {
    let len = word.len();
    if len == 0 {
        return (Vec::new(), 0, false);
    }
    let mut best: Vec<u32> = Vec::new();
    let mut best_at = (0, false);
    let mut cand = Vec::with_capacity(len);
    let mut relabel = vec![u32::MAX; n];
    let dirs: &[bool] = if reflect { &[false, true] } else { &[false] };
    for &rev in dirs {
        for start in 0..len {
            cand.clear();
            relabel.iter_mut().for_each(|x| *x = u32::MAX);
            let mut next = 0u32;
            // Less: candidate already smaller; Equal: still tied
            let mut state = if best.is_empty() {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Equal
            };
            let mut aborted = false;
            for i in 0..len {
                let p = read_index(start, rev, i, len);
                let old = word[p] as usize;
                if relabel[old] == u32::MAX {
                    relabel[old] = next;
                    next += 1;
                }
                let e = relabel[old] * 4 + mark(p);
                if state == std::cmp::Ordering::Equal {
                    match e.cmp(&best[i]) {
                        std::cmp::Ordering::Greater => {
                            aborted = true;
                            break;
                        }
                        std::cmp::Ordering::Less => state = std::cmp::Ordering::Less,
                        std::cmp::Ordering::Equal => {}
                    }
                }
                cand.push(e);
            }
            if !aborted && state == std::cmp::Ordering::Less {
                std::mem::swap(&mut best, &mut cand);
                best_at = (start, rev);
            }
        }
    }
    (best.iter().map(|e| e / 4).collect(), best_at.0, best_at.1)
}

/// Same as [`dihedral_min`] but returns the full key including marks.
pub(crate) fn dihedral_min_marked(
    word: &[u32],
    n: usize,
    reflect: bool,
    mark: impl Fn(usize) -> u32,
) -> (Vec<u32>, usize, bool) {
    let (_, start, rev) = dihedral_min(word, n, reflect, &mark);
    let len = word.len();
    let mut relabel = vec![u32::MAX; n];
    let mut next = 0;
    let key = (0..len)
        .map(|i| {
            let p = read_index(start, rev, i, len);
            let old = word[p] as usize;
            if relabel[old] == u32::MAX {
                relabel[old] = next;
                next += 1;
            }
            relabel[old] * 4 + mark(p)
        })
        .collect();
    (key, start, rev)
}

/// Parses a free Gauss code: whitespace-separated opaque tokens.
pub fn parse_free_code(text: &str) -> Result<ChordDiagram> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    ChordDiagram::from_word(&tokens)
}

/// Decoration level of a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Free,
    Flat,
    Virtual,
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(Level::Free),
            "flat" => Ok(Level::Flat),
            "virtual" => Ok(Level::Virtual),
            other => Err(Error::Invalid(format!("unknown level `{other}`"))),
        }
    }
}

/// Local writhe of a classical crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// A chord diagram with the decorations of its knot theory.
///
/// Flat and virtual diagrams carry one arrow per chord, stored as a head bit
/// per endpoint. Virtual diagrams also carry a sign per chord. Over/under
/// information is not stored separately: an endpoint is the over passage iff
/// `head XOR (sign == +)`, which makes a crossing switch (swap over/under
/// and flip the sign) leave the arrow, and so the flat shadow, unchanged.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecoratedDiagram {
    base: ChordDiagram,
    level: Level,
    oriented: bool,
    heads: Vec<bool>,
    signs: Vec<Sign>,
}

impl DecoratedDiagram {
    /// Free-level view of a chord diagram (unoriented).
    pub fn free(base: ChordDiagram) -> Self {
        DecoratedDiagram {
            base,
            level: Level::Free,
            oriented: false,
            heads: Vec::new(),
            signs: Vec::new(),
        }
    }

    /// Flat diagram from per-position head bits. Each chord must have exactly
    /// one head endpoint.
    pub fn flat(base: ChordDiagram, heads: Vec<bool>) -> Result<Self> {
        Self::check_heads(&base, &heads)?;
        Ok(DecoratedDiagram {
            base,
            level: Level::Flat,
            oriented: true,
            heads,
            signs: Vec::new(),
        })
    }

    /// Virtual diagram from per-position head bits and per-label signs.
    pub fn virtual_(base: ChordDiagram, heads: Vec<bool>, signs: Vec<Sign>) -> Result<Self> {
        Self::check_heads(&base, &heads)?;
        if signs.len() != base.n() {
            return Err(Error::Invalid("one sign per chord required".into()));
        }
        Ok(DecoratedDiagram {
            base,
            level: Level::Virtual,
            oriented: true,
            heads,
            signs,
        })
    }

    fn check_heads(base: &ChordDiagram, heads: &[bool]) -> Result<()> {
        if heads.len() != base.len() {
            return Err(Error::Invalid("one arrow mark per endpoint required".into()));
        }
        for l in 0..base.n() as u32 {
            let [a, b] = base.positions(l);
            if heads[a] == heads[b] {
                return Err(Error::Invalid(format!(
                    "chord {} needs exactly one arrow head",
                    l + 1
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn from_parts(
        base: ChordDiagram,
        level: Level,
        oriented: bool,
        heads: Vec<bool>,
        signs: Vec<Sign>,
    ) -> Self {
        DecoratedDiagram {
            base,
            level,
            oriented,
            heads,
            signs,
        }
    }

    pub fn base(&self) -> &ChordDiagram {
        &self.base
    }

    pub fn into_base(self) -> ChordDiagram {
        self.base
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn oriented(&self) -> bool {
        self.oriented
    }

    pub fn with_oriented(mut self, oriented: bool) -> Self {
        self.oriented = oriented;
        self
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Per-position head bits (empty at free level).
    pub fn heads(&self) -> &[bool] {
        &self.heads
    }

    /// Per-label signs (empty unless virtual).
    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn is_head(&self, position: usize) -> Option<bool> {
        self.heads.get(position).copied()
    }

    pub fn sign(&self, label: u32) -> Option<Sign> {
        self.signs.get(label as usize).copied()
    }

    /// Whether the passage at `position` is the over passage.
    pub fn is_over(&self, position: usize) -> Option<bool> {
        if self.level != Level::Virtual {
            return None;
        }
        let sign = self.signs[self.base.label_at(position) as usize];
        Some(self.heads[position] ^ sign.is_plus())
    }

    /// Drops decorations down to `level` (never adds any).
    pub fn forget_to(&self, level: Level) -> Result<Self> {
        if level > self.level {
            return Err(Error::InsufficientDecoration);
        }
        let mut out = self.clone();
        out.level = level;
        match level {
            Level::Free => {
                out.heads.clear();
                out.signs.clear();
                out.oriented = false;
            }
            Level::Flat => out.signs.clear(),
            Level::Virtual => {}
        }
        Ok(out)
    }

    /// Replaces the underlying chord diagram's vertex ids.
    pub fn with_vertex_ids(mut self, ids: Vec<VertexId>) -> Self {
        self.base = self.base.with_vertex_ids(ids);
        self
    }

    fn mark(&self, p: usize) -> u32 {
        let mut m = 0;
        if let Some(&h) = self.heads.get(p) {
            m |= h as u32;
        }
        if let Some(s) = self.signs.get(self.base.label_at(p) as usize) {
            m |= (!s.is_plus() as u32) << 1;
        }
        m
    }

    /// Canonical representative: rotations, plus reflections when the
    /// diagram is unoriented. Decorations travel with their endpoints.
    pub fn canonical_form(&self) -> Self {
        let word = self.base.word();
        let (key, start, rev) =
            dihedral_min_marked(word, self.n(), !self.oriented, |p| self.mark(p));
        self.reread(start, rev, &key)
    }

    fn reread(&self, start: usize, rev: bool, key: &[u32]) -> Self {
        let len = key.len();
        let n = self.n();
        let mut ids = vec![0; n];
        let mut heads = Vec::new();
        let mut signs = vec![Sign::Plus; if self.signs.is_empty() { 0 } else { n }];
        let mut dense = Vec::with_capacity(len);
        for (i, &e) in key.iter().enumerate() {
            let p = read_index(start, rev, i, len);
            let old = self.base.label_at(p) as usize;
            let new = (e / 4) as usize;
            dense.push(new as u32);
            ids[new] = self.base.vertex_id(old as u32);
            if !self.heads.is_empty() {
                heads.push(self.heads[p]);
            }
            if !self.signs.is_empty() {
                signs[new] = self.signs[old];
            }
        }
        DecoratedDiagram {
            base: ChordDiagram::from_dense(dense, ids),
            level: self.level,
            oriented: self.oriented,
            heads,
            signs,
        }
    }

    /// Every relabelling carrying this diagram onto its canonical form, as
    /// maps from labels here to labels there. More than one exactly when the
    /// diagram has symmetries.
    pub fn canonical_isomorphisms(&self) -> Vec<Vec<u32>> {
        let word = self.base.word();
        let (n, len) = (self.n(), word.len());
        if len == 0 {
            return vec![Vec::new()];
        }
        let (target, _, _) = dihedral_min_marked(word, n, !self.oriented, |p| self.mark(p));
        let mut out = Vec::new();
        let revs: &[bool] = if self.oriented { &[false] } else { &[false, true] };
        for &rev in revs {
            for start in 0..len {
                let mut relabel = vec![u32::MAX; n];
                let mut next = 0;
                let ok = (0..len).all(|i| {
                    let p = read_index(start, rev, i, len);
                    let old = word[p] as usize;
                    if relabel[old] == u32::MAX {
                        relabel[old] = next;
                        next += 1;
                    }
                    relabel[old] * 4 + self.mark(p) == target[i]
                });
                if ok {
                    out.push(relabel);
                }
            }
        }
        out
    }

    /// Hashable key of the decorated isomorphism class (level included).
    pub fn canonical_key(&self) -> Vec<u32> {
        let mut key = dihedral_min_marked(self.base.word(), self.n(), !self.oriented, |p| {
            self.mark(p)
        })
        .0;
        key.push(self.level as u32 | (self.oriented as u32) << 4 | 1 << 8);
        key
    }

    /// Serializes in the grammar of the diagram's level: free codes, `H<k>` /
    /// `T<k>` tokens for flat arrows, `O<k><sign>` / `U<k><sign>` for virtual.
    pub fn to_code(&self) -> String {
        let mut s = String::new();
        for p in 0..self.base.len() {
            if p > 0 {
                s.push(' ');
            }
            let l = self.base.label_at(p);
            match self.level {
                Level::Free => write!(s, "{}", l + 1).unwrap(),
                Level::Flat => {
                    let c = if self.heads[p] { 'H' } else { 'T' };
                    write!(s, "{c}{}", l + 1).unwrap()
                }
                Level::Virtual => {
                    let c = if self.is_over(p).unwrap() { 'O' } else { 'U' };
                    write!(s, "{c}{}{}", l + 1, self.signs[l as usize].symbol()).unwrap()
                }
            }
        }
        s
    }

    pub fn canonical_code(&self) -> String {
        self.canonical_form().to_code()
    }
}

fn split_token(tok: &str, position: usize, letters: &[char], signed: bool) -> Result<(char, String, Option<Sign>)> {
    let bad = || Error::BadToken {
        token: tok.to_string(),
        position,
    };
    let mut chars = tok.chars();
    let c = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
    if !letters.contains(&c) {
        return Err(bad());
    }
    let rest: &str = chars.as_str();
    let (body, sign) = if signed {
        let last = rest.chars().last().ok_or_else(bad)?;
        let sign = match last {
            '+' => Sign::Plus,
            '-' => Sign::Minus,
            _ => return Err(bad()),
        };
        (&rest[..rest.len() - 1], Some(sign))
    } else {
        (rest, None)
    };
    if body.is_empty() || !body.chars().all(|ch| ch.is_ascii_digit()) {
        return Err(bad());
    }
    Ok((c, body.to_string(), sign))
}

/// Parses a signed Gauss code with tokens `O<k><+|->` / `U<k><+|->`.
pub fn parse_signed_code(text: &str) -> Result<DecoratedDiagram> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut labels = Vec::with_capacity(tokens.len());
    let mut overs = Vec::with_capacity(tokens.len());
    let mut sign_of: HashMap<String, (Sign, usize, usize)> = HashMap::new();
    for (i, tok) in tokens.iter().enumerate() {
        let (c, k, sign) = split_token(tok, i, &['O', 'U'], true)?;
        let sign = sign.unwrap();
        let e = sign_of.entry(k.clone()).or_insert((sign, 0, 0));
        if e.0 != sign {
            return Err(Error::SignMismatch(k));
        }
        if c == 'O' {
            e.1 += 1;
        } else {
            e.2 += 1;
        }
        labels.push(k);
        overs.push(c == 'O');
    }
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let base = ChordDiagram::from_word(&refs)?;
    for (k, (_, o, u)) in &sign_of {
        if *o != 1 || *u != 1 {
            return Err(Error::MissingPassage(k.clone()));
        }
    }
    let mut signs = vec![Sign::Plus; base.n()];
    let mut heads = Vec::with_capacity(labels.len());
    for (p, k) in labels.iter().enumerate() {
        let s = sign_of[k].0;
        signs[base.label_at(p) as usize] = s;
        heads.push(overs[p] ^ s.is_plus());
    }
    DecoratedDiagram::virtual_(base, heads, signs)
}

/// Parses a flat code with tokens `H<k>` (arrow head) / `T<k>` (arrow tail).
pub fn parse_flat_code(text: &str) -> Result<DecoratedDiagram> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut labels = Vec::with_capacity(tokens.len());
    let mut heads = Vec::with_capacity(tokens.len());
    for (i, tok) in tokens.iter().enumerate() {
        let (c, k, _) = split_token(tok, i, &['H', 'T'], false)?;
        labels.push(k);
        heads.push(c == 'H');
    }
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    let base = ChordDiagram::from_word(&refs)?;
    for l in 0..base.n() as u32 {
        let [a, b] = base.positions(l);
        if heads[a] == heads[b] {
            return Err(Error::MissingPassage((l + 1).to_string()));
        }
    }
    DecoratedDiagram::flat(base, heads)
}

/// Parses a code in the grammar of `level`; signed codes are accepted at
/// every level and forgotten down to it.
pub fn parse_code(text: &str, level: Level) -> Result<DecoratedDiagram> {
    let first = text.split_whitespace().next().unwrap_or("");
    let looks_signed = first.starts_with(['O', 'U', 'o', 'u']);
    let looks_flat = first.starts_with(['H', 'T', 'h', 't']);
    match level {
        Level::Free if looks_signed => parse_signed_code(text)?.forget_to(Level::Free),
        Level::Free if looks_flat => parse_flat_code(text)?.forget_to(Level::Free),
        Level::Free => Ok(DecoratedDiagram::free(parse_free_code(text)?)),
        Level::Flat if looks_signed => parse_signed_code(text)?.forget_to(Level::Flat),
        Level::Flat if looks_flat || text.trim().is_empty() => parse_flat_code(text),
        Level::Virtual if looks_signed || text.trim().is_empty() => parse_signed_code(text),
        _ => Err(Error::InsufficientDecoration),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cd(w: &[u32]) -> ChordDiagram {
        ChordDiagram::from_word(w).unwrap()
    }

    #[test]
    fn parse_examples() {
        let d = parse_free_code("1 2 1 2").unwrap();
        assert_eq!(d.word(), &[0, 1, 0, 1]);
        assert_eq!(d.n(), 2);
        assert!(parse_free_code("").unwrap().is_unknot());
        assert!(matches!(
            parse_free_code("1 1 1"),
            Err(Error::BadMultiplicity { count: 3, .. })
        ));
        assert!(matches!(parse_free_code("1 2 1"), Err(Error::OddLength(3))));
        assert!(matches!(
            parse_free_code("1 1 1 2"),
            Err(Error::BadMultiplicity { .. })
        ));
        // opaque labels
        let d = parse_free_code("a x a x").unwrap();
        assert_eq!(d.word(), &[0, 1, 0, 1]);
    }

    #[test]
    fn bad_multiplicity_for_triple() {
        let e = parse_free_code("1 1 1 1").unwrap_err();
        assert!(matches!(e, Error::BadMultiplicity { count: 4, .. }));
    }

    #[test]
    fn signed_parse() {
        let t = parse_signed_code("O1+ U2+ O3+ U1+ O2+ U3+").unwrap();
        assert_eq!(t.n(), 3);
        assert_eq!(t.level(), Level::Virtual);
        assert_eq!(t.is_over(0), Some(true));
        assert_eq!(t.is_over(1), Some(false));
        assert_eq!(t.to_code(), "O1+ U2+ O3+ U1+ O2+ U3+");
        let v = parse_signed_code("O1+ O2+ U1+ U2+").unwrap();
        assert_eq!(v.n(), 2);
        assert_eq!(parse_signed_code("O1+ U1-"), Err(Error::SignMismatch("1".into())));
        assert_eq!(
            parse_signed_code("O1+ O1+"),
            Err(Error::MissingPassage("1".into()))
        );
        assert!(matches!(
            parse_signed_code("O1+ U1+ O2+"),
            Err(Error::OddLength(3))
        ));
        assert!(matches!(
            parse_signed_code("X1+ U1+"),
            Err(Error::BadToken { position: 0, .. })
        ));
    }

    #[test]
    fn crossing_switch_keeps_arrow() {
        let a = parse_signed_code("O1+ U1+").unwrap();
        let b = parse_signed_code("U1- O1-").unwrap();
        assert_eq!(a.heads(), b.heads());
        assert_eq!(
            a.forget_to(Level::Flat).unwrap(),
            b.forget_to(Level::Flat).unwrap()
        );
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(
            cd(&[2, 1, 2, 1]).canonical_form().word(),
            cd(&[1, 2, 1, 2]).canonical_form().word()
        );
        assert_eq!(
            cd(&[1, 2, 2, 1]).canonical_form().word(),
            cd(&[1, 1, 2, 2]).canonical_form().word()
        );
        assert!(ChordDiagram::unknot().canonical_form().is_unknot());
        assert_eq!(cd(&[1, 2, 2, 1]).canonical_code(), "1 1 2 2");
    }

    #[test]
    fn canonical_keeps_vertex_ids() {
        let d = cd(&[5, 7, 7, 5]); // ids 1 (label 5), 2 (label 7)
        let c = d.canonical_form();
        // canonical word 1 1 2 2: chord 7 comes first
        let first = c.vertex_id(c.label_at(0));
        assert_eq!(first, 2);
    }

    #[test]
    fn interlacement_examples() {
        let m = cd(&[1, 2, 1, 2]).interlacement();
        assert!(m.get(0, 1) && m.get(1, 0) && !m.get(0, 0));
        assert!(cd(&[1, 1, 2, 2]).interlacement().is_zero());
        let m = cd(&[1, 2, 3, 1, 2, 3]).interlacement();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.get(i, j), i != j);
            }
        }
    }

    #[test]
    fn automorphisms_of_symmetric_words() {
        // (1,2,1,2) has the full dihedral symmetry of the square: 8 readings
        assert_eq!(cd(&[1, 2, 1, 2]).automorphisms().len(), 8);
        assert_eq!(cd(&[1, 1]).automorphisms().len(), 4);
    }

    #[test]
    fn dot_export_ports() {
        let dot = cd(&[1, 2, 1, 2]).to_dot();
        assert!(dot.contains("taillabel=\"2\""));
        assert_eq!(dot.matches(" -- ").count(), 4);
    }

    #[test]
    fn parse_code_levels() {
        let f = parse_code("O1+ O2+ U1+ U2+", Level::Flat).unwrap();
        assert_eq!(f.level(), Level::Flat);
        assert_eq!(parse_flat_code(&f.to_code()).unwrap(), f);
        assert!(parse_code("1 2 1 2", Level::Virtual).is_err());
    }
}
