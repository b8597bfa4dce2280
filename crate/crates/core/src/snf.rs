//! Abelian groups given by generators and integer relations, reduced to
//! invariant factors with exact checked arithmetic.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::z2::{BitVec, EchelonBasis};

/// A relation `sum coeff * g = 0`, sparse over generator indices.
pub type Relation = BTreeMap<usize, i128>;

fn add_scaled(a: &mut Relation, b: &Relation, k: i128) -> Result<()> {
    for (&g, &c) in b {
        let prod = c.checked_mul(k).ok_or(Error::OverflowGuard)?;
        let e = a.entry(g).or_insert(0);
        *e = e.checked_add(prod).ok_or(Error::OverflowGuard)?;
        if *e == 0 {
            a.remove(&g);
        }
    }
    Ok(())
}

/// Structure of `Z^k / <relations>` and where each generator lands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Invariant factors greater than 1, each dividing the next.
    pub torsion: Vec<i128>,
    pub free_rank: usize,
    /// Image of each generator: one coordinate per torsion factor (reduced
    /// modulo it) followed by `free_rank` integer coordinates.
    pub images: Vec<Vec<i128>>,
}

impl Decomposition {
    pub fn is_zero(&self, x: &[i128]) -> bool {
        x.iter().all(|&c| c == 0)
    }

    /// Reduces torsion coordinates into `0..d`.
    pub fn normalize(&self, x: &mut [i128]) {
        for (c, &d) in x.iter_mut().zip(&self.torsion) {
            *c = c.rem_euclid(d);
        }
    }
}

/// Eliminates generators that occur with coefficient ±1 in some relation,
/// then diagonalizes what remains.
pub fn decompose(generators: usize, relations: &[Relation]) -> Result<Decomposition> {
    let mut rels: Vec<Option<Relation>> = relations
        .iter()
        .filter(|r| !r.is_empty())
        .cloned()
        .map(Some)
        .collect();
    let mut occurs: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); generators];
    for (i, r) in rels.iter().enumerate() {
        for &g in r.as_ref().unwrap().keys() {
            occurs[g].insert(i);
        }
    }
    // definitions of eliminated generators in terms of later survivors
    let mut defs: Vec<(usize, Relation)> = Vec::new();
    let mut eliminated = vec![false; generators];
    loop {
        // unit pivot with the fewest occurrences of its generator
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, r) in rels.iter().enumerate() {
            let Some(r) = r else { continue };
            for (&g, &c) in r {
                if c.abs() == 1 {
                    let cost = occurs[g].len();
                    if best.is_none_or(|b| cost < b.0) {
                        best = Some((cost, i, g));
                    }
                }
            }
            if best.is_some_and(|b| b.0 == 1) {
                break;
            }
        }
        let Some((_, pi, g)) = best else { break };
        let pivot = rels[pi].take().unwrap();
        let s = pivot[&g];
        for &h in pivot.keys() {
            occurs[h].remove(&pi);
        }
        let users: Vec<usize> = occurs[g].iter().copied().collect();
        for ri in users {
            let mut r = rels[ri].take().unwrap();
            let c = r[&g];
            for &h in r.keys() {
                occurs[h].remove(&ri);
            }
            add_scaled(&mut r, &pivot, -c * s)?;
            debug_assert!(!r.contains_key(&g));
            if !r.is_empty() {
                for &h in r.keys() {
                    occurs[h].insert(ri);
                }
                rels[ri] = Some(r);
            }
        }
        // g = -s * (pivot - s g)
        let mut def = pivot;
        def.remove(&g);
        for v in def.values_mut() {
            *v = v.checked_mul(-s).ok_or(Error::OverflowGuard)?;
        }
        eliminated[g] = true;
        defs.push((g, def));
    }
    let survivors: Vec<usize> = (0..generators).filter(|&g| !eliminated[g]).collect();
    let col_of: BTreeMap<usize, usize> = survivors.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let dense: Vec<Vec<i128>> = rels
        .into_iter()
        .flatten()
        .map(|r| {
            let mut row = vec![0; survivors.len()];
            for (g, c) in r {
                row[col_of[&g]] = c;
            }
            row
        })
        .collect();
    let snf = smith(dense, survivors.len())?;
    let rank = snf.diagonal.len();
    let torsion_at: Vec<usize> = (0..rank).filter(|&i| snf.diagonal[i] > 1).collect();
    let torsion: Vec<i128> = torsion_at.iter().map(|&i| snf.diagonal[i]).collect();
    let free_rank = survivors.len() - rank;
    let image_of_survivor = |c: usize| -> Vec<i128> {
        let row = &snf.column_ops[c];
        let mut v: Vec<i128> = torsion_at
            .iter()
            .map(|&i| row[i].rem_euclid(snf.diagonal[i]))
            .collect();
        v.extend(row[rank..].iter().copied());
        v
    };
    let width = torsion.len() + free_rank;
    let mut images: Vec<Option<Vec<i128>>> = vec![None; generators];
    for (i, &g) in survivors.iter().enumerate() {
        images[g] = Some(image_of_survivor(i));
    }
    for (g, def) in defs.iter().rev() {
        let mut v = vec![0i128; width];
        for (&h, &c) in def {
            let img = images[h].as_ref().expect("definitions refer to later generators");
            for (x, y) in v.iter_mut().zip(img) {
                *x = x
                    .checked_add(c.checked_mul(*y).ok_or(Error::OverflowGuard)?)
                    .ok_or(Error::OverflowGuard)?;
            }
        }
        for (x, &d) in v.iter_mut().zip(&torsion) {
            *x = x.rem_euclid(d);
        }
        images[*g] = Some(v);
    }
    Ok(Decomposition {
        torsion,
        free_rank,
        images: images.into_iter().map(Option::unwrap).collect(),
    })
}

/// Result of [`smith`]: the nonzero diagonal entries (positive, each
/// dividing the next) and the accumulated column operations `C` with
/// `U * R * C = D`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diagonal: Vec<i128>,
    pub column_ops: Vec<Vec<i128>>,
}

fn ck(x: Option<i128>) -> Result<i128> {
    x.ok_or(Error::OverflowGuard)
}

/// Smith normal form of a dense integer matrix with `cols` columns.
pub fn smith(mut a: Vec<Vec<i128>>, cols: usize) -> Result<Smith> {
    let rows = a.len();
    let mut c: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| (i == j) as i128).collect())
        .collect();
    let mut diagonal = Vec::new();
    let col_axpy = |m: &mut Vec<Vec<i128>>, dst: usize, src: usize, k: i128| -> Result<()> {
        for row in m.iter_mut() {
            row[dst] = ck(row[dst].checked_sub(ck(k.checked_mul(row[src]))?))?;
        }
        Ok(())
    };
    let swap_cols = |m: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
    };
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(i128, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 && best.is_none_or(|b| x.abs() < b.0) {
                    best = Some((x.abs(), i, j));
                }
            }
        }
        let Some((_, bi, bj)) = best else { break };
        a.swap(t, bi);
        swap_cols(&mut a, t, bj);
        swap_cols(&mut c, t, bj);
        loop {
            let p = a[t][t];
            let mut done = true;
            for i in t + 1..rows {
                if a[i][t] != 0 {
                    let q = a[i][t].div_euclid(p);
                    for j in t..cols {
                        a[i][j] = ck(a[i][j].checked_sub(ck(q.checked_mul(a[t][j]))?))?;
                    }
                    if a[i][t] != 0 {
                        done = false;
                    }
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 {
                    let q = a[t][j].div_euclid(p);
                    col_axpy(&mut a, j, t, q)?;
                    col_axpy(&mut c, j, t, q)?;
                    if a[t][j] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                // the pivot must divide the rest of the block
                let bad = (t + 1..rows).find(|&i| a[i][t + 1..].iter().any(|&x| x % p != 0));
                match bad {
                    Some(i) => {
                        for j in t..cols {
                            a[t][j] = ck(a[t][j].checked_add(a[i][j]))?;
                        }
                        continue;
                    }
                    None => break,
                }
            }
            // move the smallest entry of row t / column t to the pivot
            let mut best = (a[t][t].abs(), t, t);
            for i in t + 1..rows {
                if a[i][t] != 0 && a[i][t].abs() < best.0 {
                    best = (a[i][t].abs(), i, t);
                }
            }
            for j in t + 1..cols {
                if a[t][j] != 0 && a[t][j].abs() < best.0 {
                    best = (a[t][j].abs(), t, j);
                }
            }
            if best.1 != t {
                a.swap(t, best.1);
            }
            if best.2 != t {
                swap_cols(&mut a, t, best.2);
                swap_cols(&mut c, t, best.2);
            }
        }
        if a[t][t] < 0 {
            for j in t..cols {
                a[t][j] = -a[t][j];
            }
        }
        diagonal.push(a[t][t]);
        t += 1;
    }
    Ok(Smith {
        diagonal,
        column_ops: c,
    })
}

/// Rank over Z2 of the relation matrix, for cross-checking.
pub fn rank_mod2(generators: usize, relations: &[Relation]) -> usize {
    let mut b = EchelonBasis::new(generators, 0);
    for r in relations {
        let mut v = BitVec::zeros(generators);
        for (&g, &c) in r {
            if c.rem_euclid(2) == 1 {
                v.set(g, true);
            }
        }
        b.insert(&v, BitVec::zeros(0));
    }
    b.rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(pairs: &[(usize, i128)]) -> Relation {
        pairs.iter().copied().collect()
    }

    #[test]
    fn free_group() {
        let d = decompose(3, &[]).unwrap();
        assert_eq!((d.torsion.len(), d.free_rank), (0, 3));
    }

    #[test]
    fn one_bigon() {
        let d = decompose(2, &[rel(&[(0, 1), (1, 1)])]).unwrap();
        assert_eq!((d.torsion.clone(), d.free_rank), (vec![], 1));
        let mut s = d.images[0].clone();
        for (x, y) in s.iter_mut().zip(&d.images[1]) {
            *x += y;
        }
        assert!(d.is_zero(&s));
        assert!(!d.is_zero(&d.images[0]));
    }

    #[test]
    fn torsion_survives_elimination() {
        // g0 + g1 = 0, 2 g1 = 0, g2 + 2 g0 = 0 -> Z/2 generated by g0
        let rs = [rel(&[(0, 1), (1, 1)]), rel(&[(1, 2)]), rel(&[(2, 1), (0, 2)])];
        let d = decompose(3, &rs).unwrap();
        assert_eq!(d.torsion, vec![2]);
        assert_eq!(d.free_rank, 0);
        assert_eq!(d.images[0], vec![1]);
        assert_eq!(d.images[1], vec![1]);
        assert_eq!(d.images[2], vec![0]);
        let k2 = d.torsion.iter().filter(|&&t| t % 2 == 0).count();
        assert_eq!(d.free_rank + k2, 3 - rank_mod2(3, &rs));
    }

    #[test]
    fn smith_divisibility() {
        let s = smith(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3).unwrap();
        assert_eq!(s.diagonal, vec![2, 6, 12]);
        let s = smith(vec![vec![4, 0], vec![0, 6]], 2).unwrap();
        assert_eq!(s.diagonal, vec![2, 12]);
    }

    #[test]
    fn relations_vanish_on_images() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = rng.gen_range(1..7);
            let rs: Vec<Relation> = (0..rng.gen_range(0..6))
                .map(|_| {
                    let mut r = Relation::new();
                    for _ in 0..3 {
                        let g = rng.gen_range(0..k);
                        *r.entry(g).or_insert(0) += rng.gen_range(-3..4);
                    }
                    r.retain(|_, c| *c != 0);
                    r
                })
                .collect();
            let d = decompose(k, &rs).unwrap();
            for w in d.torsion.windows(2) {
                assert_eq!(w[1] % w[0], 0);
            }
            for r in &rs {
                let mut v = vec![0i128; d.torsion.len() + d.free_rank];
                for (&g, &c) in r {
                    for (x, y) in v.iter_mut().zip(&d.images[g]) {
                        *x += c * y;
                    }
                }
                d.normalize(&mut v);
                assert!(d.is_zero(&v), "{rs:?}");
            }
            let k2 = d.torsion.iter().filter(|&&t| t % 2 == 0).count();
            assert_eq!(d.free_rank + k2, k - rank_mod2(k, &rs));
        }
    }
}
