//! Reidemeister moves on Gauss diagrams and the crossing correspondences
//! they induce.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diagram::{ChordDiagram, DecoratedDiagram, Level, Sign, VertexId};
use crate::error::{Error, Result};
use crate::surface::CarterSurface;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    #[serde(rename = "R1+")]
    R1Plus,
    #[serde(rename = "R1-")]
    R1Minus,
    #[serde(rename = "R2+")]
    R2Plus,
    #[serde(rename = "R2-")]
    R2Minus,
    #[serde(rename = "R3")]
    R3,
}

impl MoveKind {
    /// Change in the number of crossings.
    pub fn delta(self) -> i32 {
        match self {
            MoveKind::R1Plus => 1,
            MoveKind::R1Minus => -1,
            MoveKind::R2Plus => 2,
            MoveKind::R2Minus => -2,
            MoveKind::R3 => 0,
        }
    }
}

/// Where a move acts.
///
/// * `R1-`: `[p, p+1]`, the adjacent endpoints of the removed chord.
/// * `R1+`: `[a]`, the new loop goes between positions `a` and `a+1`.
/// * `R2-`: `[i, i+1, j, j+1]`, the two adjacency sites.
/// * `R2+`: `[a, b]` with `a <= b`; new endpoints go after `a` and after `b`.
/// * `R3`: `[i, i+1, j, j+1, k, k+1]`, the three adjacency sites.
///
/// Positions are taken modulo the word length; `chords` lists the vertex ids
/// of the chords read at the site positions (empty for insertions).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub positions: Vec<usize>,
    pub chords: Vec<VertexId>,
}

/// Decoration and pattern choices of a move. Removals and R3 carry `parallel`
/// only as a description of the pattern found.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variant {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub site: Site,
    #[serde(default)]
    pub variant: Variant,
}

/// Correspondence between the crossings of two diagrams.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialBijection {
    pairs: Vec<(VertexId, VertexId)>,
}

impl PartialBijection {
    pub fn new(mut pairs: Vec<(VertexId, VertexId)>) -> Result<Self> {
        pairs.sort_unstable();
        let mut image: Vec<VertexId> = pairs.iter().map(|p| p.1).collect();
        image.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) || image.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("correspondence is not injective".into()));
        }
        Ok(PartialBijection { pairs })
    }

    pub fn identity(ids: impl IntoIterator<Item = VertexId>) -> Self {
        let mut pairs: Vec<_> = ids.into_iter().map(|v| (v, v)).collect();
        pairs.sort_unstable();
        PartialBijection { pairs }
    }

    pub fn pairs(&self) -> &[(VertexId, VertexId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, v: VertexId) -> Option<VertexId> {
        self.pairs
            .binary_search_by_key(&v, |p| p.0)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn inverse(&self) -> Self {
        let mut pairs: Vec<_> = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort_unstable();
        PartialBijection { pairs }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &PartialBijection) -> Self {
        let pairs = self
            .pairs
            .iter()
            .filter_map(|&(a, b)| other.get(b).map(|c| (a, c)))
            .collect();
        PartialBijection { pairs }
    }
}

/// A sequence of diagrams joined by elementary moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveTrace {
    pub diagrams: Vec<DecoratedDiagram>,
    pub moves: Vec<Move>,
    pub correspondences: Vec<PartialBijection>,
}

impl MoveTrace {
    pub fn start(d: DecoratedDiagram) -> Self {
        MoveTrace {
            diagrams: vec![d],
            moves: Vec::new(),
            correspondences: Vec::new(),
        }
    }

    pub fn last(&self) -> &DecoratedDiagram {
        self.diagrams.last().expect("a trace has a start diagram")
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Applies `m` to the last diagram and records the step.
    pub fn push(&mut self, m: Move) -> Result<()> {
        let (d, f) = apply(self.last(), &m)?;
        self.diagrams.push(d);
        self.moves.push(m);
        self.correspondences.push(f);
        Ok(())
    }

    /// Composite correspondence from the first diagram to the last.
    pub fn composite(&self) -> PartialBijection {
        let mut f = PartialBijection::identity(self.diagrams[0].base().vertex_ids().iter().copied());
        for g in &self.correspondences {
            f = f.then(g);
        }
        f
    }

    /// Re-applies every move from the start diagram and checks that the
    /// recorded diagrams and correspondences are reproduced.
    pub fn replay(&self) -> Result<()> {
        let mut t = MoveTrace::start(self.diagrams[0].clone());
        for (i, m) in self.moves.iter().enumerate() {
            t.push(m.clone())?;
            if t.diagrams[i + 1] != self.diagrams[i + 1] || t.correspondences[i] != self.correspondences[i] {
                return Err(Error::IllegalMove(format!("step {i} does not replay")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> TraceJson {
        TraceJson {
            level: self.diagrams[0].level(),
            oriented: self.diagrams[0].oriented(),
            diagrams: self.diagrams.iter().map(DiagramJson::from).collect(),
            moves: self.moves.clone(),
            correspondences: self.correspondences.clone(),
        }
    }

    /// Rebuilds a trace from its serialized form by replaying the moves.
    pub fn from_json(t: &TraceJson) -> Result<Self> {
        let first = t
            .diagrams
            .first()
            .ok_or_else(|| Error::Invalid("trace without diagrams".into()))?;
        let start = first.to_diagram(t.level, t.oriented)?;
        let mut out = MoveTrace::start(start);
        for m in &t.moves {
            out.push(m.clone())?;
        }
        for (i, d) in t.diagrams.iter().enumerate().skip(1) {
            let want = d.to_diagram(t.level, t.oriented)?;
            if out.diagrams.get(i) != Some(&want) {
                return Err(Error::IllegalMove(format!("diagram {i} does not replay")));
            }
        }
        Ok(out)
    }
}

/// A diagram in a trace file: its code and its vertex ids in label order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub code: String,
    pub ids: Vec<VertexId>,
}

impl From<&DecoratedDiagram> for DiagramJson {
    fn from(d: &DecoratedDiagram) -> Self {
        DiagramJson {
            code: d.to_code(),
            ids: d.base().vertex_ids().to_vec(),
        }
    }
}

impl DiagramJson {
    pub fn to_diagram(&self, level: Level, oriented: bool) -> Result<DecoratedDiagram> {
        let d = crate::diagram::parse_code(&self.code, level)?;
        if self.ids.len() != d.n() {
            return Err(Error::Invalid("vertex id list does not match the code".into()));
        }
        Ok(d.with_vertex_ids(self.ids.clone()).with_oriented(oriented))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub level: Level,
    pub oriented: bool,
    pub diagrams: Vec<DiagramJson>,
    pub moves: Vec<Move>,
    #[serde(default)]
    pub correspondences: Vec<PartialBijection>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum R2Rule {
    Any,
    HeadsAlternate,
    OneStrandOver,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum R3Rule {
    Sites,
    TriangleFace,
    NotAlternating,
}

#[derive(Deserialize)]
struct PerLevel<T> {
    free: T,
    flat: T,
    #[serde(rename = "virtual")]
    virtual_: T,
}

impl<T> PerLevel<T> {
    fn at(&self, level: Level) -> &T {
        match level {
            Level::Free => &self.free,
            Level::Flat => &self.flat,
            Level::Virtual => &self.virtual_,
        }
    }
}

#[derive(Deserialize)]
struct VariantTable {
    r1_plus: PerLevel<Vec<Variant>>,
    r2_plus: PerLevel<Vec<Variant>>,
    r2_minus: PerLevel<R2Rule>,
    r3: PerLevel<R3Rule>,
}

fn table() -> &'static VariantTable {
    static TABLE: OnceLock<VariantTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        toml::from_str(include_str!("../data/move_variants.toml"))
            .expect("bundled move variant table parses")
    })
}

/// One endpoint with its decorations, used while rewriting words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Tok {
    id: VertexId,
    head: bool,
    sign: Sign,
}

fn tokens(d: &DecoratedDiagram) -> Vec<Tok> {
    let base = d.base();
    (0..base.len())
        .map(|p| {
            let l = base.label_at(p);
            Tok {
                id: base.vertex_id(l),
                head: d.is_head(p).unwrap_or(false),
                sign: d.sign(l).unwrap_or(Sign::Plus),
            }
        })
        .collect()
}

fn from_tokens(toks: &[Tok], level: Level, oriented: bool) -> DecoratedDiagram {
    let ids: Vec<VertexId> = toks.iter().map(|t| t.id).collect();
    let base = ChordDiagram::relabelled(&ids, |id, _| id);
    let (heads, signs) = match level {
        Level::Free => (Vec::new(), Vec::new()),
        _ => {
            let heads = toks.iter().map(|t| t.head).collect();
            let mut signs = vec![Sign::Plus; base.n()];
            if level == Level::Virtual {
                for (p, t) in toks.iter().enumerate() {
                    signs[base.label_at(p) as usize] = t.sign;
                }
            } else {
                signs.clear();
            }
            (heads, signs)
        }
    };
    DecoratedDiagram::from_parts(base, level, oriented, heads, signs)
}

/// Removes the chords with the given vertex ids, keeping all other
/// decorations and ids.
pub fn remove_chords(d: &DecoratedDiagram, ids: &[VertexId]) -> DecoratedDiagram {
    let mut toks = tokens(d);
    toks.retain(|t| !ids.contains(&t.id));
    from_tokens(&toks, d.level(), d.oriented())
}

fn illegal(msg: impl Into<String>) -> Error {
    Error::IllegalMove(msg.into())
}

/// Start positions `i` of adjacency sites `(i, i+1)` holding two distinct chords.
fn adjacency_sites(word: &[u32]) -> Vec<usize> {
    let len = word.len();
    (0..len)
        .filter(|&i| word[i] != word[(i + 1) % len])
        .collect()
}

fn pair_key(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

fn sites_disjoint(len: usize, starts: &[usize]) -> bool {
    let mut seen = vec![false; len];
    for &s in starts {
        for p in [s, (s + 1) % len] {
            if seen[p] {
                return false;
            }
            seen[p] = true;
        }
    }
    true
}

fn site_positions(len: usize, starts: &[usize]) -> Vec<usize> {
    starts.iter().flat_map(|&s| [s, (s + 1) % len]).collect()
}

fn chords_at(d: &ChordDiagram, positions: &[usize]) -> Vec<VertexId> {
    positions.iter().map(|&p| d.vertex_id(d.label_at(p))).collect()
}

fn r2_minus_decoration_ok(d: &DecoratedDiagram, i: usize) -> bool {
    let len = d.base().len();
    let j = (i + 1) % len;
    let rule = *table().r2_minus.at(d.level());
    match rule {
        R2Rule::Any => true,
        R2Rule::HeadsAlternate => d.is_head(i) != d.is_head(j),
        R2Rule::OneStrandOver => {
            let (a, b) = (d.base().label_at(i), d.base().label_at(j));
            d.is_over(i) == d.is_over(j) && d.sign(a) != d.sign(b)
        }
    }
}

fn r3_decoration_ok(d: &DecoratedDiagram, starts: &[usize], surface: Option<&CarterSurface>) -> bool {
    let rule = *table().r3.at(d.level());
    if rule == R3Rule::Sites {
        return true;
    }
    let owned;
    let s = match surface {
        Some(s) => s,
        None => match CarterSurface::new(d) {
            Ok(s) => {
                owned = s;
                &owned
            }
            Err(_) => return false,
        },
    };
    if !s.is_face_boundary(starts) {
        return false;
    }
    if rule == R3Rule::NotAlternating {
        let len = d.base().len();
        let mixed = starts
            .iter()
            .all(|&i| d.is_over(i) != d.is_over((i + 1) % len));
        return !mixed;
    }
    true
}

/// All moves applicable to `d`, in a fixed order.
pub fn enumerate_moves(d: &DecoratedDiagram) -> Vec<Move> {
    let mut out = Vec::new();
    out.extend(enumerate_kind(d, MoveKind::R1Minus));
    out.extend(enumerate_kind(d, MoveKind::R2Minus));
    out.extend(enumerate_kind(d, MoveKind::R3));
    out.extend(enumerate_kind(d, MoveKind::R1Plus));
    out.extend(enumerate_kind(d, MoveKind::R2Plus));
    out
}

/// Applicable moves of one kind.
pub fn enumerate_kind(d: &DecoratedDiagram, kind: MoveKind) -> Vec<Move> {
    let base = d.base();
    let word = base.word();
    let len = word.len();
    let level = d.level();
    let mut out = Vec::new();
    match kind {
        MoveKind::R1Minus => {
            for l in 0..base.n() as u32 {
                let [a, b] = base.positions(l);
                let start = if b == a + 1 {
                    a
                } else if a == 0 && b == len - 1 {
                    b
                } else {
                    continue;
                };
                let positions = vec![start, (start + 1) % len];
                out.push(Move {
                    kind,
                    site: Site {
                        positions,
                        chords: vec![base.vertex_id(l)],
                    },
                    variant: Variant::default(),
                });
            }
        }
        MoveKind::R1Plus => {
            for a in 0..len.max(1) {
                for v in table().r1_plus.at(level) {
                    out.push(Move {
                        kind,
                        site: Site {
                            positions: vec![a],
                            chords: Vec::new(),
                        },
                        variant: v.clone(),
                    });
                }
            }
        }
        MoveKind::R2Minus => {
            let sites = adjacency_sites(word);
            let mut by_pair: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
            for &s in &sites {
                by_pair
                    .entry(pair_key(word[s], word[(s + 1) % len]))
                    .or_default()
                    .push(s);
            }
            for &i in &sites {
                let group = &by_pair[&pair_key(word[i], word[(i + 1) % len])];
                for &j in group {
                    if j <= i || !sites_disjoint(len, &[i, j]) {
                        continue;
                    }
                    if !r2_minus_decoration_ok(d, i) {
                        continue;
                    }
                    let positions = site_positions(len, &[i, j]);
                    out.push(Move {
                        kind,
                        variant: Variant {
                            parallel: Some(word[i] == word[j]),
                            ..Variant::default()
                        },
                        site: Site {
                            chords: chords_at(base, &positions[..2]),
                            positions,
                        },
                    });
                }
            }
        }
        MoveKind::R2Plus => {
            for a in 0..len.max(1) {
                for b in a..len.max(1) {
                    for v in table().r2_plus.at(level) {
                        out.push(Move {
                            kind,
                            site: Site {
                                positions: vec![a, b],
                                chords: Vec::new(),
                            },
                            variant: v.clone(),
                        });
                    }
                }
            }
        }
        MoveKind::R3 => {
            let sites = adjacency_sites(word);
            let mut by_pair: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
            for &s in &sites {
                by_pair
                    .entry(pair_key(word[s], word[(s + 1) % len]))
                    .or_default()
                    .push(s);
            }
            let surface = if level == Level::Free {
                None
            } else {
                CarterSurface::new(d).ok()
            };
            for &i in &sites {
                let (a, b) = (word[i], word[(i + 1) % len]);
                for c in 0..base.n() as u32 {
                    if c == a || c == b {
                        continue;
                    }
                    let (Some(bc), Some(ca)) =
                        (by_pair.get(&pair_key(b, c)), by_pair.get(&pair_key(c, a)))
                    else {
                        continue;
                    };
                    for &j in bc {
                        for &k in ca {
                            // count each triangle once: i is its smallest site
                            if j <= i || k <= i || !sites_disjoint(len, &[i, j, k]) {
                                continue;
                            }
                            if !r3_decoration_ok(d, &[i, j, k], surface.as_ref()) {
                                continue;
                            }
                            let positions = site_positions(len, &[i, j, k]);
                            out.push(Move {
                                kind,
                                site: Site {
                                    chords: vec![
                                        base.vertex_id(a),
                                        base.vertex_id(b),
                                        base.vertex_id(c),
                                    ],
                                    positions,
                                },
                                variant: Variant::default(),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn check_variant(level: Level, m: &Move) -> Result<()> {
    let t = table();
    let allowed = match m.kind {
        MoveKind::R1Plus => t.r1_plus.at(level),
        MoveKind::R2Plus => t.r2_plus.at(level),
        _ => {
            let ok = m.variant.head.is_none() && m.variant.sign.is_none();
            return if ok {
                Ok(())
            } else {
                Err(illegal("removals and R3 take no decoration variant"))
            };
        }
    };
    if allowed.contains(&m.variant) {
        Ok(())
    } else {
        Err(illegal(format!("variant {:?} is not legal at this level", m.variant)))
    }
}

/// Revalidates `m` against `d`.
pub fn validate(d: &DecoratedDiagram, m: &Move) -> Result<()> {
    check_variant(d.level(), m)?;
    let base = d.base();
    let len = base.len();
    let pos = &m.site.positions;
    let expect_positions = match m.kind {
        MoveKind::R1Plus => 1,
        MoveKind::R1Minus => 2,
        MoveKind::R2Plus => 2,
        MoveKind::R2Minus => 4,
        MoveKind::R3 => 6,
    };
    if pos.len() != expect_positions {
        return Err(illegal(format!("{:?} needs {expect_positions} positions", m.kind)));
    }
    match m.kind {
        MoveKind::R1Plus | MoveKind::R2Plus => {
            if pos.iter().any(|&p| p >= len.max(1)) {
                return Err(illegal("arc out of range"));
            }
            if m.kind == MoveKind::R2Plus && pos[0] > pos[1] {
                return Err(illegal("R2+ arcs must be ordered"));
            }
            if !m.site.chords.is_empty() {
                return Err(illegal("insertions name no chords"));
            }
            return Ok(());
        }
        _ => {}
    }
    if pos.iter().any(|&p| p >= len) {
        return Err(illegal("position out of range"));
    }
    let starts: Vec<usize> = pos.iter().step_by(2).copied().collect();
    if pos
        .chunks(2)
        .any(|c| c[1] != (c[0] + 1) % len)
    {
        return Err(illegal("site positions must be cyclically adjacent"));
    }
    let labels: Vec<u32> = pos.iter().map(|&p| base.label_at(p)).collect();
    match m.kind {
        MoveKind::R1Minus => {
            if labels[0] != labels[1] {
                return Err(illegal("R1- needs both endpoints of one chord"));
            }
            if m.site.chords != [base.vertex_id(labels[0])] {
                return Err(illegal("R1- chord ids do not match the site"));
            }
        }
        MoveKind::R2Minus => {
            if !sites_disjoint(len, &starts) {
                return Err(illegal("R2- sites overlap"));
            }
            if labels[0] == labels[1] || pair_key(labels[0], labels[1]) != pair_key(labels[2], labels[3]) {
                return Err(illegal("R2- sites must hold the same two chords"));
            }
            if m.site.chords != chords_at(base, &pos[..2]) {
                return Err(illegal("R2- chord ids do not match the site"));
            }
            if !r2_minus_decoration_ok(d, starts[0]) {
                return Err(illegal("R2- decorations are not compatible"));
            }
        }
        MoveKind::R3 => {
            if !sites_disjoint(len, &starts) {
                return Err(illegal("R3 sites overlap"));
            }
            let (a, b) = (labels[0], labels[1]);
            let c = labels[2..].iter().copied().find(|&x| x != a && x != b);
            let Some(c) = c else {
                return Err(illegal("R3 needs three chords"));
            };
            let ok = a != b
                && pair_key(labels[2], labels[3]) == pair_key(b, c)
                && pair_key(labels[4], labels[5]) == pair_key(c, a);
            if !ok {
                return Err(illegal("R3 sites must pair the three chords cyclically"));
            }
            let ids = vec![base.vertex_id(a), base.vertex_id(b), base.vertex_id(c)];
            if m.site.chords != ids {
                return Err(illegal("R3 chord ids do not match the site"));
            }
            if !r3_decoration_ok(d, &starts, None) {
                return Err(illegal("R3 is not legal for these decorations"));
            }
        }
        MoveKind::R1Plus | MoveKind::R2Plus => unreachable!(),
    }
    Ok(())
}

/// Performs a move, returning the new diagram and the induced correspondence.
/// New crossings get fresh vertex ids; surviving crossings keep theirs.
pub fn apply(d: &DecoratedDiagram, m: &Move) -> Result<(DecoratedDiagram, PartialBijection)> {
    validate(d, m)?;
    let base = d.base();
    let len = base.len();
    let mut toks = tokens(d);
    let pos = &m.site.positions;
    let survivors = |gone: &[VertexId]| {
        PartialBijection::identity(
            base.vertex_ids()
                .iter()
                .copied()
                .filter(|v| !gone.contains(v)),
        )
    };
    let (toks, f) = match m.kind {
        MoveKind::R1Minus | MoveKind::R2Minus => {
            let gone = &m.site.chords;
            toks.retain(|t| !gone.contains(&t.id));
            (toks, survivors(gone))
        }
        MoveKind::R3 => {
            for c in pos.chunks(2) {
                toks.swap(c[0], c[1]);
            }
            (toks, survivors(&[]))
        }
        MoveKind::R1Plus => {
            let x = base.fresh_id();
            let head = m.variant.head.unwrap_or(false);
            let sign = m.variant.sign.unwrap_or(Sign::Plus);
            let at = if len == 0 { 0 } else { pos[0] + 1 };
            toks.splice(
                at..at,
                [
                    Tok { id: x, head, sign },
                    Tok { id: x, head: !head, sign },
                ],
            );
            (toks, survivors(&[]))
        }
        MoveKind::R2Plus => {
            let x = base.fresh_id();
            let y = x + 1;
            let head = m.variant.head.unwrap_or(false);
            let sx = m.variant.sign.unwrap_or(Sign::Plus);
            let sy = if d.level() == Level::Virtual { sx.flip() } else { Sign::Plus };
            let first = [
                Tok { id: x, head, sign: sx },
                Tok { id: y, head: !head, sign: sy },
            ];
            let x2 = Tok { id: x, head: !head, sign: sx };
            let y2 = Tok { id: y, head, sign: sy };
            let second = if m.variant.parallel == Some(false) {
                [y2, x2]
            } else {
                [x2, y2]
            };
            let (a, b) = if len == 0 { (0, 0) } else { (pos[0] + 1, pos[1] + 1) };
            // the later insertion first keeps the earlier index valid
            toks.splice(b..b, second);
            toks.splice(a..a, first);
            (toks, survivors(&[]))
        }
    };
    Ok((from_tokens(&toks, d.level(), d.oriented()), f))
}

/// Whether no R2- move applies.
pub fn is_r2_irreducible(d: &DecoratedDiagram) -> bool {
    enumerate_kind(d, MoveKind::R2Minus).is_empty()
}

/// Removes R2 bigons greedily, always at the leftmost available site, and
/// returns the canonical form of the result with the trace of removals.
pub fn r2_reduce(d: &ChordDiagram) -> (ChordDiagram, MoveTrace) {
    let mut trace = MoveTrace::start(DecoratedDiagram::free(d.clone()));
    while let Some(m) = enumerate_kind(trace.last(), MoveKind::R2Minus).into_iter().next() {
        trace.push(m).expect("enumerated moves apply");
    }
    (trace.last().base().canonical_form(), trace)
}

/// R2 reduction choosing uniformly among the available removals at each step.
pub fn r2_reduce_random<R: Rng>(d: &ChordDiagram, rng: &mut R) -> ChordDiagram {
    let mut cur = DecoratedDiagram::free(d.clone());
    loop {
        let moves = enumerate_kind(&cur, MoveKind::R2Minus);
        let Some(m) = moves.choose(rng) else {
            return cur.base().canonical_form();
        };
        cur = apply(&cur, m).expect("enumerated moves apply").0;
    }
}

/// Canonical R2-reduced form without recording a trace.
pub fn r2_reduced_form(d: &ChordDiagram) -> ChordDiagram {
    let mut word: Vec<u32> = d.word().to_vec();
    'outer: loop {
        let len = word.len();
        if len < 4 {
            break;
        }
        let mut seen: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
        for i in 0..len {
            let (a, b) = (word[i], word[(i + 1) % len]);
            if a == b {
                continue;
            }
            let earlier = seen.entry(pair_key(a, b)).or_default();
            if earlier.iter().any(|&j| sites_disjoint(len, &[j, i])) {
                word.retain(|&l| l != a && l != b);
                continue 'outer;
            }
            earlier.push(i);
        }
        break;
    }
    if word.is_empty() {
        return ChordDiagram::unknot();
    }
    ChordDiagram::relabelled(&word, |l, _| d.vertex_id(l)).canonical_form()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_code;

    fn free(w: &[u32]) -> DecoratedDiagram {
        DecoratedDiagram::free(ChordDiagram::from_word(w).unwrap())
    }

    fn of_kind(d: &DecoratedDiagram, k: MoveKind) -> Vec<Move> {
        enumerate_moves(d).into_iter().filter(|m| m.kind == k).collect()
    }

    #[test]
    fn kink_removal() {
        let d = free(&[1, 1]);
        let ms = of_kind(&d, MoveKind::R1Minus);
        assert_eq!(ms.len(), 1);
        let (e, f) = apply(&d, &ms[0]).unwrap();
        assert!(e.base().is_unknot());
        assert!(f.is_empty());
    }

    #[test]
    fn bigon_removal() {
        let d = free(&[1, 2, 1, 2]);
        let ms = of_kind(&d, MoveKind::R2Minus);
        assert!(ms
            .iter()
            .any(|m| m.site.positions == [0, 1, 2, 3] && m.variant.parallel == Some(true)));
        let (e, f) = apply(&d, &ms[0]).unwrap();
        assert!(e.base().is_unknot());
        assert!(f.is_empty());
    }

    #[test]
    fn triangle_move() {
        let d = free(&[1, 2, 2, 3, 3, 1]);
        let ms = of_kind(&d, MoveKind::R3);
        assert!(!ms.is_empty());
        let (e, f) = apply(&d, &ms[0]).unwrap();
        assert_eq!(f, PartialBijection::identity([1, 2, 3]));
        assert_eq!(e.base().n(), 3);
        // the three sites are flipped and R3 applies again to undo it
        let back = of_kind(&e, MoveKind::R3)
            .into_iter()
            .map(|m| apply(&e, &m).unwrap().0)
            .any(|g| g.canonical_key() == d.canonical_key());
        assert!(back);
    }

    #[test]
    fn r2_reduction_examples() {
        let (r, t) = r2_reduce(free(&[1, 2, 1, 2]).base());
        assert!(r.is_unknot());
        assert_eq!(t.len(), 1);
        let (r, t) = r2_reduce(free(&[1, 1]).base());
        assert_eq!(r.word(), &[0, 0]);
        assert!(t.is_empty());
        assert!(r2_reduce(&ChordDiagram::unknot()).0.is_unknot());
        assert!(!is_r2_irreducible(&free(&[1, 2, 1, 2])));
        assert!(is_r2_irreducible(&free(&[1, 1])));
        assert!(is_r2_irreducible(&free(&[])));
    }

    #[test]
    fn fast_reduction_agrees() {
        for w in [
            vec![1, 2, 1, 2],
            vec![1, 2, 3, 1, 3, 2],
            vec![1, 2, 3, 4, 1, 2, 3, 4],
            vec![1, 2, 3, 2, 1, 3],
        ] {
            let d = ChordDiagram::from_word(&w).unwrap();
            assert_eq!(r2_reduce(&d).0, r2_reduced_form(&d), "{w:?}");
        }
    }

    #[test]
    fn insertions_then_removal() {
        let d = free(&[1, 2, 3, 1, 2, 3]);
        for m in of_kind(&d, MoveKind::R2Plus) {
            let (e, f) = apply(&d, &m).unwrap();
            assert_eq!(e.n(), 5);
            assert_eq!(f.len(), 3);
            let undone = of_kind(&e, MoveKind::R2Minus)
                .iter()
                .filter(|r| r.site.chords.iter().all(|c| *c > 3))
                .map(|r| apply(&e, r).unwrap().0)
                .any(|g| g.canonical_key() == d.canonical_key());
            assert!(undone, "{m:?}");
        }
    }

    #[test]
    fn flat_and_virtual_variant_counts() {
        let d = parse_code("O1+ U1+", Level::Virtual).unwrap();
        assert_eq!(of_kind(&d, MoveKind::R1Plus).len(), 2 * 4);
        let f = d.forget_to(Level::Flat).unwrap();
        assert_eq!(of_kind(&f, MoveKind::R1Plus).len(), 2 * 2);
        assert_eq!(of_kind(&f, MoveKind::R2Plus).len(), 3 * 4);
        let u = parse_code("", Level::Virtual).unwrap();
        assert_eq!(of_kind(&u, MoveKind::R1Plus).len(), 4);
    }

    #[test]
    fn virtual_bigon_rules() {
        // strand over both crossings, opposite signs: removable
        // (the sites (1,2) and (3,0) pass over then under, so only one pair)
        let ok = parse_code("O1+ O2- U1+ U2-", Level::Virtual).unwrap();
        assert_eq!(of_kind(&ok, MoveKind::R2Minus).len(), 1);
        // same signs: not a bigon of the knot
        let bad = parse_code("O1+ O2+ U1+ U2+", Level::Virtual).unwrap();
        assert!(of_kind(&bad, MoveKind::R2Minus).is_empty());
        let under = parse_code("O1+ U2- U1+ O2-", Level::Virtual).unwrap();
        let ms = of_kind(&under, MoveKind::R2Minus);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].site.positions, [1, 2, 3, 0]);
    }

    #[test]
    fn revalidation_rejects_stale_moves() {
        let d = free(&[1, 2, 1, 2]);
        let m = of_kind(&d, MoveKind::R2Minus).remove(0);
        let e = free(&[1, 1, 2, 2]);
        assert!(matches!(apply(&e, &m), Err(Error::IllegalMove(_))));
    }

    #[test]
    fn move_json_shape() {
        let d = free(&[1, 1]);
        let m = of_kind(&d, MoveKind::R1Minus).remove(0);
        let j = serde_json::to_string(&m).unwrap();
        assert_eq!(j, r#"{"kind":"R1-","site":{"positions":[0,1],"chords":[1]},"variant":{}}"#);
        let back: Move = serde_json::from_str(&j).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn trace_json_replays() {
        let d = parse_code("O1- O2+ U1- U2+", Level::Virtual).unwrap();
        let mut t = MoveTrace::start(d);
        let m = of_kind(t.last(), MoveKind::R2Plus).remove(5);
        t.push(m).unwrap();
        let m = of_kind(t.last(), MoveKind::R3).into_iter().next();
        if let Some(m) = m {
            t.push(m).unwrap();
        }
        let j = serde_json::to_string(&t.to_json()).unwrap();
        let back = MoveTrace::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, t);
        t.replay().unwrap();
    }
}
