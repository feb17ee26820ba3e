//! Bounded-effort fundamental-group analysis.
//!
//! The edge-path group of a connected complex is presented on the non-tree
//! edges of a spanning tree with one relator per triangle, then simplified
//! by elementary moves under a step budget. Reaching the empty presentation
//! proves triviality; anything else is reported as-is together with the
//! abelianization, never as a failure — triviality of a finitely presented
//! group is not decidable in general, so a leftover presentation is a
//! report item, not an error.

use std::collections::BTreeMap;

use super::snf::{smith_normal_form, SparseIntMatrix};
use super::SimplicialComplex;
use crate::error::{Error, Result};

/// A word in the generators: nonzero signed 1-based generator indices.
pub type Word = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pi1Outcome {
    /// Simplification reached the empty presentation.
    TrivialProven { steps: usize },
    /// The simplified presentation with its abelianization.
    Presentation {
        generators: usize,
        relators: Vec<Word>,
        h1_rank: u64,
        h1_torsion: Vec<u64>,
    },
    /// The presentation outgrew the reporting size; only the
    /// abelianization is returned.
    AbelianizationOnly { h1_rank: u64, h1_torsion: Vec<u64> },
}

/// Edge-path-group presentation of a connected complex, simplified for at
/// most `effort_budget` elementary moves.
pub fn pi1_presentation(k: &SimplicialComplex, effort_budget: usize) -> Result<Pi1Outcome> {
    if k.is_empty() {
        return Err(Error::pre("fundamental group of the empty complex"));
    }
    if k.component_count() != 1 {
        return Err(Error::pre("fundamental group needs a connected complex"));
    }

    let verts = k.vertices();
    let vid: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edges: Vec<(u32, u32)> = k
        .faces_of_dim(1)
        .into_iter()
        .map(|e| (e[0], e[1]))
        .collect();

    // Spanning tree by breadth-first search from the smallest vertex.
    let mut adjacency: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(a, b) in &edges {
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    }
    let mut in_tree: BTreeMap<(u32, u32), bool> =
        edges.iter().map(|&e| (e, false)).collect();
    let mut seen = vec![false; verts.len()];
    let mut queue = std::collections::VecDeque::new();
    seen[0] = true;
    queue.push_back(verts[0]);
    while let Some(v) = queue.pop_front() {
        if let Some(nexts) = adjacency.get(&v) {
            for &w in nexts {
                if !seen[vid[&w]] {
                    seen[vid[&w]] = true;
                    let key = if v < w { (v, w) } else { (w, v) };
                    in_tree.insert(key, true);
                    queue.push_back(w);
                }
            }
        }
    }

    // Generators: non-tree edges, numbered 1.. in edge order.
    let mut gen_of_edge: BTreeMap<(u32, u32), i64> = BTreeMap::new();
    let mut generators = 0i64;
    for &e in &edges {
        if !in_tree[&e] {
            generators += 1;
            gen_of_edge.insert(e, generators);
        }
    }

    // One relator per triangle: traverse its three directed sides; tree
    // edges contribute nothing.
    let side = |a: u32, b: u32| -> Option<i64> {
        let key = if a < b { (a, b) } else { (b, a) };
        let g = gen_of_edge.get(&key)?;
        Some(if a < b { *g } else { -*g })
    };
    let mut relators: Vec<Word> = Vec::new();
    for t in k.faces_of_dim(2) {
        let (a, b, c) = (t[0], t[1], t[2]);
        let word: Word = [side(a, b), side(b, c), side(c, a)]
            .into_iter()
            .flatten()
            .collect();
        relators.push(word);
    }

    let mut live: Vec<bool> = vec![true; generators as usize];
    let steps = simplify(&mut relators, &mut live, effort_budget);
    let remaining = live.iter().filter(|&&l| l).count();

    if remaining == 0 && relators.is_empty() {
        return Ok(Pi1Outcome::TrivialProven { steps });
    }

    let (h1_rank, h1_torsion) = abelianization(&relators, &live)?;
    let total_len: usize = relators.iter().map(|r| r.len()).sum();
    if total_len > 10_000 {
        return Ok(Pi1Outcome::AbelianizationOnly { h1_rank, h1_torsion });
    }
    Ok(Pi1Outcome::Presentation {
        generators: remaining,
        relators,
        h1_rank,
        h1_torsion,
    })
}

/// Elementary simplification moves under a step budget; returns the number
/// of moves applied.
fn simplify(relators: &mut Vec<Word>, live: &mut [bool], budget: usize) -> usize {
    let mut steps = 0;
    loop {
        if steps >= budget {
            return steps;
        }
        let mut acted = false;

        // Free and cyclic reduction, drop empty relators.
        for r in relators.iter_mut() {
            let before = r.len();
            free_reduce(r);
            cyclic_reduce(r);
            if r.len() != before {
                acted = true;
            }
        }
        let before = relators.len();
        relators.retain(|r| !r.is_empty());
        if relators.len() != before {
            acted = true;
        }

        // A length-one relator kills its generator everywhere.
        if let Some(pos) = relators.iter().position(|r| r.len() == 1) {
            let g = relators[pos][0].unsigned_abs() as usize;
            relators.remove(pos);
            for r in relators.iter_mut() {
                r.retain(|x| x.unsigned_abs() as usize != g);
            }
            live[g - 1] = false;
            steps += 1;
            continue;
        }

        // A generator occurring exactly once in exactly one relator can be
        // solved for: drop both.
        let mut occurrence: BTreeMap<usize, usize> = BTreeMap::new();
        for r in relators.iter() {
            for x in r {
                *occurrence.entry(x.unsigned_abs() as usize).or_insert(0) += 1;
            }
        }
        if let Some((&g, _)) = occurrence.iter().find(|&(_, &c)| c == 1) {
            let pos = relators
                .iter()
                .position(|r| r.iter().any(|x| x.unsigned_abs() as usize == g))
                .expect("occurrence count said the generator appears");
            // Every other generator of that relator survives; the relator
            // expresses g through them.
            relators.remove(pos);
            live[g - 1] = false;
            steps += 1;
            continue;
        }

        // Duplicate relators (up to rotation and inversion) collapse.
        let mut canon_seen: BTreeMap<Word, usize> = BTreeMap::new();
        let mut drop: Vec<usize> = Vec::new();
        for (i, r) in relators.iter().enumerate() {
            let c = canonical_cyclic(r);
            if canon_seen.contains_key(&c) {
                drop.push(i);
            } else {
                canon_seen.insert(c, i);
            }
        }
        if !drop.is_empty() {
            for &i in drop.iter().rev() {
                relators.remove(i);
            }
            steps += 1;
            continue;
        }

        if !acted {
            return steps;
        }
        steps += 1;
    }
}

fn free_reduce(w: &mut Word) {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w.iter() {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    *w = out;
}

fn cyclic_reduce(w: &mut Word) {
    while w.len() >= 2 && w.first().copied() == w.last().map(|&x| -x) {
        w.pop();
        w.remove(0);
    }
}

/// Least rotation of the word or its inverse, as a set-of-relators key.
fn canonical_cyclic(w: &Word) -> Word {
    let mut best: Option<Word> = None;
    let candidates = [w.clone(), {
        let mut inv: Word = w.iter().rev().map(|&x| -x).collect();
        free_reduce(&mut inv);
        inv
    }];
    for cand in candidates {
        if cand.is_empty() {
            return Vec::new();
        }
        for shift in 0..cand.len() {
            let rotated: Word = cand[shift..]
                .iter()
                .chain(cand[..shift].iter())
                .copied()
                .collect();
            if best.as_ref().is_none_or(|b| rotated < *b) {
                best = Some(rotated);
            }
        }
    }
    best.unwrap_or_default()
}

/// H_1 from the abelianized relator matrix of the live generators.
fn abelianization(relators: &[Word], live: &[bool]) -> Result<(u64, Vec<u64>)> {
    let live_index: BTreeMap<usize, usize> = live
        .iter()
        .enumerate()
        .filter(|(_, &l)| l)
        .map(|(g, _)| g + 1)
        .enumerate()
        .map(|(col, g)| (g, col))
        .collect();
    let ncols = live_index.len();
    let mut entries: Vec<(usize, usize, i64)> = Vec::new();
    for (row, r) in relators.iter().enumerate() {
        for &x in r {
            let g = x.unsigned_abs() as usize;
            let col = live_index[&g];
            entries.push((row, col, x.signum()));
        }
    }
    let m = SparseIntMatrix::from_triplets(relators.len().max(1), ncols.max(1), &entries)?;
    let snf = smith_normal_form(&m, 5_000_000)?;
    let rank = (ncols - snf.rank) as u64;
    let torsion = snf
        .torsion()
        .into_iter()
        .map(|f| u64::try_from(f).map_err(|_| Error::Overflow))
        .collect::<Result<Vec<u64>>>()?;
    Ok((rank, torsion))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solid_triangle_is_simply_connected() {
        let k = SimplicialComplex::simplex(3);
        match pi1_presentation(&k, 1000).unwrap() {
            Pi1Outcome::TrivialProven { .. } => {}
            other => panic!("expected a triviality proof, got {other:?}"),
        }
    }

    #[test]
    fn triangle_boundary_is_free_of_rank_one() {
        let labels = vec!["a".into(), "b".into(), "c".into()];
        let k =
            SimplicialComplex::from_faces(labels, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        match pi1_presentation(&k, 1000).unwrap() {
            Pi1Outcome::Presentation {
                generators,
                relators,
                h1_rank,
                h1_torsion,
            } => {
                assert_eq!(generators, 1);
                assert!(relators.is_empty());
                assert_eq!(h1_rank, 1);
                assert!(h1_torsion.is_empty());
            }
            other => panic!("expected a free presentation, got {other:?}"),
        }
    }

    #[test]
    fn sphere_boundary_of_tetrahedron_is_simply_connected() {
        let full = SimplicialComplex::simplex(4);
        let k = full.skeleton(2);
        // Remove nothing else: the 2-skeleton of Δ³ is S² plus nothing.
        match pi1_presentation(&k, 10_000).unwrap() {
            Pi1Outcome::TrivialProven { .. } => {}
            other => panic!("expected a triviality proof, got {other:?}"),
        }
    }

    #[test]
    fn projective_plane_abelianization_detects_torsion() {
        let labels = (1..=6).map(|i| format!("v{i}")).collect();
        let tris = [
            [1u32, 2, 4],
            [1, 2, 5],
            [1, 3, 4],
            [1, 3, 6],
            [1, 5, 6],
            [2, 3, 5],
            [2, 3, 6],
            [2, 4, 6],
            [3, 4, 5],
            [4, 5, 6],
        ];
        let faces: Vec<Vec<u32>> = tris
            .iter()
            .map(|t| t.iter().map(|&v| v - 1).collect())
            .collect();
        let k = SimplicialComplex::from_faces(labels, &faces).unwrap();
        match pi1_presentation(&k, 10_000).unwrap() {
            Pi1Outcome::TrivialProven { .. } => {
                panic!("the projective plane is not simply connected")
            }
            Pi1Outcome::Presentation {
                h1_rank, h1_torsion, ..
            }
            | Pi1Outcome::AbelianizationOnly { h1_rank, h1_torsion } => {
                assert_eq!(h1_rank, 0);
                assert_eq!(h1_torsion, vec![2]);
            }
        }
    }

    #[test]
    fn disconnected_input_is_rejected() {
        let k = SimplicialComplex::from_faces(
            vec!["a".into(), "b".into()],
            &[vec![0], vec![1]],
        )
        .unwrap();
        assert!(pi1_presentation(&k, 100).is_err());
        assert!(pi1_presentation(&SimplicialComplex::empty(), 100).is_err());
    }

    #[test]
    fn graph_presentation_is_free_of_first_betti_rank() {
        // The complete bipartite graph on 3+3 vertices: b̃_1 = 4.
        let three = SimplicialComplex::from_faces(
            vec!["x".into(), "y".into(), "z".into()],
            &[vec![0], vec![1], vec![2]],
        )
        .unwrap();
        let k = three.join(&three.clone());
        match pi1_presentation(&k, 1000).unwrap() {
            Pi1Outcome::Presentation {
                generators,
                relators,
                h1_rank,
                ..
            } => {
                assert_eq!(generators, 4);
                assert!(relators.is_empty());
                assert_eq!(h1_rank, 4);
            }
            other => panic!("expected a free presentation, got {other:?}"),
        }
    }

    #[test]
    fn word_utilities_reduce_correctly() {
        let mut w: Word = vec![1, 2, -2, -1, 3];
        free_reduce(&mut w);
        assert_eq!(w, vec![3]);
        let mut w: Word = vec![1, 2, 3, -1];
        cyclic_reduce(&mut w);
        assert_eq!(w, vec![2, 3]);
        assert_eq!(
            canonical_cyclic(&vec![2, 3]),
            canonical_cyclic(&vec![3, 2])
        );
        assert_eq!(
            canonical_cyclic(&vec![1, 2]),
            canonical_cyclic(&vec![-2, -1])
        );
    }
}
