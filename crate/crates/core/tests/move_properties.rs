use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gauss_parity::diagram::{ChordDiagram, DecoratedDiagram, Level, Sign};
use gauss_parity::moves::{apply, enumerate_kind, enumerate_moves, r2_reduce_random, r2_reduced_form, MoveKind};
use gauss_parity::surface::CarterSurface;

fn word(n: usize, seed: u64) -> ChordDiagram {
    let mut w: Vec<u32> = (0..n as u32).flat_map(|l| [l, l]).collect();
    w.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ChordDiagram::from_word(&w).unwrap()
}

fn decorate(base: ChordDiagram, level: Level, mask: u64) -> DecoratedDiagram {
    let n = base.n();
    match level {
        Level::Free => DecoratedDiagram::free(base),
        _ => {
            let mut heads = vec![false; base.len()];
            for l in 0..n as u32 {
                let [p, q] = base.positions(l);
                heads[if mask >> l & 1 == 1 { q } else { p }] = true;
            }
            if level == Level::Flat {
                DecoratedDiagram::flat(base, heads).unwrap()
            } else {
                let signs = (0..n)
                    .map(|l| if mask >> (n + l) & 1 == 1 { Sign::Minus } else { Sign::Plus })
                    .collect();
                DecoratedDiagram::virtual_(base, heads, signs).unwrap()
            }
        }
    }
}

fn level() -> impl Strategy<Value = Level> {
    prop_oneof![Just(Level::Free), Just(Level::Flat), Just(Level::Virtual)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn crossing_bookkeeping(n in 0usize..6, seed: u64, lv in level(), mask: u64) {
        let d = decorate(word(n, seed), lv, mask);
        for m in enumerate_moves(&d) {
            let (e, f) = apply(&d, &m).unwrap();
            prop_assert_eq!(e.n() as i64, d.n() as i64 + m.kind.delta() as i64);
            let kept = d.n() - if m.kind.delta() < 0 { (-m.kind.delta()) as usize } else { 0 };
            prop_assert_eq!(f.len(), kept);
            for &(a, b) in f.pairs() {
                prop_assert_eq!(a, b);
                prop_assert!(e.base().label_of(b).is_some());
            }
            prop_assert_eq!(e.level(), d.level());
        }
    }

    #[test]
    fn insert_then_remove_bigon(n in 0usize..5, seed: u64, lv in level(), mask: u64) {
        let d = decorate(word(n, seed), lv, mask);
        let key = d.canonical_key();
        for m in enumerate_kind(&d, MoveKind::R2Plus) {
            let (e, f) = apply(&d, &m).unwrap();
            let fresh: Vec<u64> = e.base().vertex_ids().iter().copied()
                .filter(|&v| f.pairs().iter().all(|p| p.1 != v))
                .collect();
            let undo = enumerate_kind(&e, MoveKind::R2Minus)
                .into_iter()
                .find(|r| {
                    let mut c = r.site.chords.clone();
                    c.sort();
                    c == fresh
                });
            prop_assert!(undo.is_some(), "no way back from {}", e.to_code());
            let (back, _) = apply(&e, &undo.unwrap()).unwrap();
            prop_assert_eq!(back.canonical_key(), key.clone());
        }
    }

    #[test]
    fn triangle_move_is_an_involution(n in 3usize..7, seed: u64, lv in level(), mask: u64) {
        let d = decorate(word(n, seed), lv, mask);
        let key = d.canonical_key();
        for m in enumerate_kind(&d, MoveKind::R3) {
            let (e, _) = apply(&d, &m).unwrap();
            let mut chords = m.site.chords.clone();
            chords.sort();
            let again = enumerate_kind(&e, MoveKind::R3).into_iter().find(|r| {
                let mut c = r.site.chords.clone();
                c.sort();
                c == chords
            });
            prop_assert!(again.is_some());
            let (back, _) = apply(&e, &again.unwrap()).unwrap();
            prop_assert_eq!(back.canonical_key(), key.clone());
        }
    }

    #[test]
    fn r2_reduction_is_confluent(n in 0usize..9, seed: u64) {
        let d = word(n, seed);
        let want = r2_reduced_form(&d).canonical_key();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..10 {
            prop_assert_eq!(r2_reduce_random(&d, &mut rng).canonical_key(), want.clone());
        }
    }

    /// A decoration-legal decreasing R2 move removes two crossings that
    /// bound a bigon face of the surface.
    #[test]
    fn legal_bigons_are_faces(n in 2usize..7, seed: u64, flat: bool, mask: u64) {
        let lv = if flat { Level::Flat } else { Level::Virtual };
        let d = decorate(word(n, seed), lv, mask);
        let s = CarterSurface::new(&d).unwrap();
        let mut faces: Vec<Vec<u32>> = (0..s.faces().len())
            .map(|f| s.face_corners(f))
            .filter(|c| c.len() == 2)
            .map(|mut c| { c.sort(); c })
            .collect();
        faces.sort();
        for m in enumerate_kind(&d, MoveKind::R2Minus) {
            let mut c: Vec<u32> = m.site.chords.iter().map(|&v| d.base().label_of(v).unwrap()).collect();
            c.sort();
            prop_assert!(faces.binary_search(&c).is_ok(), "{} at {:?}", d.to_code(), m.site);
        }
    }
}

#[test]
fn search_ignores_thread_count() {
    use gauss_parity::search::{bfs_reachable, SearchBounds};
    let d = DecoratedDiagram::free(ChordDiagram::from_word(&[0, 1, 2, 0, 1, 2]).unwrap());
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let r = bfs_reachable(&d, SearchBounds::new(2, 6));
            r.nodes.iter().map(|n| (n.key.clone(), n.depth)).collect::<Vec<_>>()
        })
    };
    assert_eq!(run(1), run(4));
}
