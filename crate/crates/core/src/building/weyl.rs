//! Permutation and signed-permutation groups with word length.
//!
//! `WeylElement` models the two group families this crate needs: plain
//! permutations of `{1, …, m}` (linear flags) and signed permutations of
//! `{±1, …, ±n}` (isotropic flags, where `w(-i) = -w(i)` always holds).
//! Elements compose right-to-left like functions, carry a cached word
//! length over the standard generators, and expose the longest element.
//!
//! Generator convention for the signed family: `s_1, …, s_{n-1}` are the
//! adjacent transpositions and `s_n` is the sign change in the last
//! position.  Placing the sign node at position `n` (rather than the more
//! common position 1) lines the generator index up with the dimension of
//! the flag member a panel move varies, so residues of a polar space can
//! use their free dimensions directly as generator subsets.  Word length
//! is computed by conjugating with the order-reversing permutation and
//! applying the classical inversion/negative/negative-sum-pair count.

use crate::error::{Error, Result};

/// Which group family an element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WeylKind {
    /// Permutations of `{1, …, letters}`.
    Linear { letters: usize },
    /// Signed permutations of `{±1, …, ±rank}`.
    Signed { rank: usize },
}

impl WeylKind {
    /// Number of letters the permutations act on.
    pub fn degree(&self) -> usize {
        match *self {
            WeylKind::Linear { letters } => letters,
            WeylKind::Signed { rank } => rank,
        }
    }

    /// Number of standard generators.
    pub fn generator_count(&self) -> usize {
        match *self {
            WeylKind::Linear { letters } => letters.saturating_sub(1),
            WeylKind::Signed { rank } => rank,
        }
    }

    /// Length of the longest element.
    pub fn longest_length(&self) -> u64 {
        match *self {
            WeylKind::Linear { letters } => (letters as u64 * (letters as u64 - 1)) / 2,
            WeylKind::Signed { rank } => (rank as u64) * (rank as u64),
        }
    }
}

/// A permutation or signed permutation with cached word length.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylElement {
    kind: WeylKind,
    /// Images of `1, …, degree` (1-based, signed for the signed family).
    map: Vec<i32>,
    length: u64,
}

impl WeylElement {
    /// Validate and wrap an image list.  For the linear family every image
    /// must be positive; in both families `|images|` must be a permutation
    /// of `1..=degree`.
    pub fn new(kind: WeylKind, map: Vec<i32>) -> Result<WeylElement> {
        let deg = kind.degree();
        if map.len() != deg {
            return Err(Error::DimensionMismatch {
                context: "weyl element image list",
                left: map.len(),
                right: deg,
            });
        }
        let mut seen = vec![false; deg];
        for &x in &map {
            let a = x.unsigned_abs() as usize;
            if a == 0 || a > deg || seen[a - 1] {
                return Err(Error::invalid("images must form a permutation of 1..=degree"));
            }
            if x < 0 && matches!(kind, WeylKind::Linear { .. }) {
                return Err(Error::invalid("plain permutations take positive images"));
            }
            seen[a - 1] = true;
        }
        let length = word_length(kind, &map);
        Ok(WeylElement { kind, map, length })
    }

    pub fn identity(kind: WeylKind) -> WeylElement {
        let map = (1..=kind.degree() as i32).collect();
        WeylElement { kind, map, length: 0 }
    }

    /// The `i`-th standard generator, `i` in `1..=generator_count()`.
    pub fn generator(kind: WeylKind, i: usize) -> Result<WeylElement> {
        if i == 0 || i > kind.generator_count() {
            return Err(Error::invalid(format!(
                "generator index {i} out of range 1..={}",
                kind.generator_count()
            )));
        }
        let mut map: Vec<i32> = (1..=kind.degree() as i32).collect();
        match kind {
            WeylKind::Linear { .. } => map.swap(i - 1, i),
            WeylKind::Signed { rank } => {
                if i < rank {
                    map.swap(i - 1, i);
                } else {
                    map[rank - 1] = -(rank as i32);
                }
            }
        }
        let length = word_length(kind, &map);
        Ok(WeylElement { kind, map, length })
    }

    pub fn generators(kind: WeylKind) -> Vec<WeylElement> {
        (1..=kind.generator_count())
            .map(|i| WeylElement::generator(kind, i).expect("index in range"))
            .collect()
    }

    /// The longest element: order reversal for the linear family, `-id`
    /// for the signed family (where it is central).
    pub fn longest(kind: WeylKind) -> WeylElement {
        let deg = kind.degree() as i32;
        let map: Vec<i32> = match kind {
            WeylKind::Linear { .. } => (1..=deg).rev().collect(),
            WeylKind::Signed { .. } => (1..=deg).map(|i| -i).collect(),
        };
        let length = word_length(kind, &map);
        WeylElement { kind, map, length }
    }

    pub fn kind(&self) -> WeylKind {
        self.kind
    }

    /// Image of a signed letter; `apply(-i) == -apply(i)`.
    pub fn apply(&self, i: i32) -> i32 {
        let a = i.unsigned_abs() as usize;
        debug_assert!(a >= 1 && a <= self.map.len());
        let img = self.map[a - 1];
        if i < 0 {
            -img
        } else {
            img
        }
    }

    /// Function composition: `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &WeylElement) -> Result<WeylElement> {
        if self.kind != other.kind {
            return Err(Error::invalid("cannot compose elements of different groups"));
        }
        let map: Vec<i32> = (1..=self.map.len() as i32)
            .map(|i| self.apply(other.apply(i)))
            .collect();
        let length = word_length(self.kind, &map);
        Ok(WeylElement {
            kind: self.kind,
            map,
            length,
        })
    }

    pub fn inverse(&self) -> WeylElement {
        let deg = self.map.len();
        let mut map = vec![0i32; deg];
        for i in 1..=deg {
            let img = self.map[i - 1];
            let a = img.unsigned_abs() as usize;
            map[a - 1] = if img < 0 { -(i as i32) } else { i as i32 };
        }
        let length = self.length; // inversion preserves word length
        WeylElement {
            kind: self.kind,
            map,
            length,
        }
    }

    /// Cached word length over the standard generators.
    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &x)| x == i as i32 + 1)
    }

    pub fn is_involution(&self) -> bool {
        !self.is_identity()
            && self
                .compose(self)
                .map(|w| w.is_identity())
                .unwrap_or(false)
    }

    /// Raw image list (1-based, signed).
    pub fn images(&self) -> &[i32] {
        &self.map
    }
}

impl std::fmt::Display for WeylElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

fn word_length(kind: WeylKind, map: &[i32]) -> u64 {
    match kind {
        WeylKind::Linear { .. } => inversions(map),
        WeylKind::Signed { rank } => {
            // Conjugate by the order reversal so the sign node moves from
            // the last position to the first, then count inversions,
            // negatives, and pairs with negative sum.
            let n = rank as i32;
            let v: Vec<i32> = (0..rank)
                .map(|i| {
                    let x = map[rank - 1 - i];
                    x.signum() * (n + 1 - x.abs())
                })
                .collect();
            let mut total = inversions(&v);
            for i in 0..v.len() {
                if v[i] < 0 {
                    total += 1;
                }
                for j in (i + 1)..v.len() {
                    if v[i] + v[j] < 0 {
                        total += 1;
                    }
                }
            }
            total
        }
    }
}

fn inversions(v: &[i32]) -> u64 {
    let mut count = 0u64;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            if v[i] > v[j] {
                count += 1;
            }
        }
    }
    count
}

/// Longest-element length of the parabolic subgroup generated by a set of
/// generator indices (1-based).  The subgroup factors over the maximal
/// consecutive runs of indices; a run of `k` linear-type generators
/// contributes `k(k+1)/2`, and a run that reaches the sign node
/// contributes `k²`.
pub fn parabolic_longest_length(kind: WeylKind, types: &[usize]) -> Result<u64> {
    let gens = kind.generator_count();
    let mut sorted: Vec<usize> = types.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != types.len() {
        return Err(Error::invalid("generator subset contains duplicates"));
    }
    if sorted.iter().any(|&t| t == 0 || t > gens) {
        return Err(Error::invalid("generator index out of range"));
    }
    let mut total = 0u64;
    let mut run = 0u64;
    let mut prev: Option<usize> = None;
    let flush = |run: u64, last: Option<usize>| -> u64 {
        if run == 0 {
            return 0;
        }
        let signed_end =
            matches!(kind, WeylKind::Signed { rank } if last == Some(rank));
        if signed_end {
            run * run
        } else {
            run * (run + 1) / 2
        }
    };
    for &t in &sorted {
        if prev == Some(t - 1) {
            run += 1;
        } else {
            total += flush(run, prev);
            run = 1;
        }
        prev = Some(t);
    }
    total += flush(run, prev);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, VecDeque};

    fn bfs_lengths(kind: WeylKind) -> HashMap<Vec<i32>, u64> {
        let gens = WeylElement::generators(kind);
        let id = WeylElement::identity(kind);
        let mut dist: HashMap<Vec<i32>, u64> = HashMap::new();
        dist.insert(id.images().to_vec(), 0);
        let mut queue = VecDeque::new();
        queue.push_back(id);
        while let Some(w) = queue.pop_front() {
            let d = dist[w.images()];
            for s in &gens {
                let next = w.compose(s).unwrap();
                if !dist.contains_key(next.images()) {
                    dist.insert(next.images().to_vec(), d + 1);
                    queue.push_back(next);
                }
            }
        }
        dist
    }

    fn check_group(kind: WeylKind, expected_order: usize) {
        let dist = bfs_lengths(kind);
        assert_eq!(dist.len(), expected_order);
        let mut max_len = 0;
        let mut max_count = 0;
        for (map, &d) in &dist {
            let w = WeylElement::new(kind, map.clone()).unwrap();
            assert_eq!(w.length(), d, "formula disagrees with word metric at {w}");
            assert_eq!(w.inverse().length(), d);
            if d > max_len {
                max_len = d;
                max_count = 1;
            } else if d == max_len {
                max_count += 1;
            }
        }
        assert_eq!(max_len, kind.longest_length());
        assert_eq!(max_count, 1, "longest element must be unique");
        let w0 = WeylElement::longest(kind);
        assert_eq!(w0.length(), kind.longest_length());
        assert!(w0.is_involution());
    }

    #[test]
    fn length_formula_matches_word_metric_linear() {
        check_group(WeylKind::Linear { letters: 3 }, 6);
        check_group(WeylKind::Linear { letters: 4 }, 24);
    }

    #[test]
    fn length_formula_matches_word_metric_signed() {
        check_group(WeylKind::Signed { rank: 1 }, 2);
        check_group(WeylKind::Signed { rank: 2 }, 8);
        check_group(WeylKind::Signed { rank: 3 }, 48);
    }

    #[test]
    fn poincare_sums_at_two() {
        // Σ_w 2^{ℓ(w)} counts chambers of the rank-2 buildings over 𝔽₂.
        let sum = |kind: WeylKind| -> u64 {
            bfs_lengths(kind).values().map(|&d| 1u64 << d).sum()
        };
        assert_eq!(sum(WeylKind::Linear { letters: 3 }), 21);
        assert_eq!(sum(WeylKind::Signed { rank: 2 }), 45);
    }

    #[test]
    fn composition_is_right_to_left() {
        let kind = WeylKind::Linear { letters: 3 };
        let s1 = WeylElement::generator(kind, 1).unwrap();
        let s2 = WeylElement::generator(kind, 2).unwrap();
        let w = s1.compose(&s2).unwrap();
        // s2 first: 1 ↦ 1 ↦ 2, 2 ↦ 3 ↦ 3, 3 ↦ 2 ↦ 1.
        assert_eq!(w.images(), &[2, 3, 1]);
        assert_eq!(w.length(), 2);
        let wi = w.inverse();
        assert_eq!(wi.images(), &[3, 1, 2]);
        assert!(w.compose(&wi).unwrap().is_identity());
    }

    #[test]
    fn sign_generator_acts_in_last_position() {
        let kind = WeylKind::Signed { rank: 2 };
        let s2 = WeylElement::generator(kind, 2).unwrap();
        assert_eq!(s2.images(), &[1, -2]);
        assert_eq!(s2.apply(-2), 2);
        assert_eq!(s2.length(), 1);
        let s1 = WeylElement::generator(kind, 1).unwrap();
        assert_eq!(s1.compose(&s2).unwrap().length(), 2);
    }

    #[test]
    fn longest_element_is_central_for_signed_groups() {
        for rank in 1..=4 {
            let kind = WeylKind::Signed { rank };
            let w0 = WeylElement::longest(kind);
            for s in WeylElement::generators(kind) {
                assert_eq!(
                    w0.compose(&s).unwrap(),
                    s.compose(&w0).unwrap(),
                    "-id must commute with every generator"
                );
            }
        }
    }

    #[test]
    fn longest_element_conjugates_generators_linear() {
        let kind = WeylKind::Linear { letters: 4 };
        let w0 = WeylElement::longest(kind);
        for i in 1..=3usize {
            let s = WeylElement::generator(kind, i).unwrap();
            let conj = w0.compose(&s).unwrap().compose(&w0).unwrap();
            let mirror = WeylElement::generator(kind, 4 - i).unwrap();
            assert_eq!(conj, mirror);
        }
    }

    #[test]
    fn validation_rejects_bad_maps() {
        let lin = WeylKind::Linear { letters: 3 };
        assert!(WeylElement::new(lin, vec![1, 1, 2]).is_err());
        assert!(WeylElement::new(lin, vec![1, -2, 3]).is_err());
        assert!(WeylElement::new(lin, vec![1, 2]).is_err());
        assert!(WeylElement::new(lin, vec![0, 1, 2]).is_err());
        let sgn = WeylKind::Signed { rank: 2 };
        assert!(WeylElement::new(sgn, vec![-1, 1]).is_err());
        assert!(WeylElement::new(sgn, vec![2, -1]).is_ok());
    }

    #[test]
    fn parabolic_lengths_decompose_into_runs() {
        let b3 = WeylKind::Signed { rank: 3 };
        assert_eq!(parabolic_longest_length(b3, &[]).unwrap(), 0);
        assert_eq!(parabolic_longest_length(b3, &[1]).unwrap(), 1);
        assert_eq!(parabolic_longest_length(b3, &[3]).unwrap(), 1);
        assert_eq!(parabolic_longest_length(b3, &[2, 3]).unwrap(), 4);
        assert_eq!(parabolic_longest_length(b3, &[1, 2]).unwrap(), 3);
        assert_eq!(parabolic_longest_length(b3, &[1, 3]).unwrap(), 2);
        assert_eq!(
            parabolic_longest_length(b3, &[1, 2, 3]).unwrap(),
            b3.longest_length()
        );
        let a3 = WeylKind::Linear { letters: 4 };
        assert_eq!(parabolic_longest_length(a3, &[1, 2, 3]).unwrap(), 6);
        assert_eq!(parabolic_longest_length(a3, &[1, 3]).unwrap(), 2);
        assert!(parabolic_longest_length(a3, &[4]).is_err());
        assert!(parabolic_longest_length(a3, &[1, 1]).is_err());
    }

    #[test]
    fn parabolic_full_set_matches_group_longest() {
        for kind in [
            WeylKind::Linear { letters: 3 },
            WeylKind::Linear { letters: 5 },
            WeylKind::Signed { rank: 2 },
            WeylKind::Signed { rank: 4 },
        ] {
            let all: Vec<usize> = (1..=kind.generator_count()).collect();
            assert_eq!(
                parabolic_longest_length(kind, &all).unwrap(),
                kind.longest_length()
            );
        }
    }
}
