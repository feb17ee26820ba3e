//! Sparse integer matrices and their Smith normal form.
//!
//! The elimination is fraction-free over `i128` with checked arithmetic;
//! pivots are chosen to keep values small first and fill-in low second
//! (Markowitz cost). Exceeding the configured fill budget or overflowing
//! `i128` aborts with a typed error so callers can fall back to modular
//! ranks.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Row-major sparse integer matrix.
#[derive(Debug, Clone)]
pub struct SparseIntMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<BTreeMap<usize, i128>>,
}

impl SparseIntMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> SparseIntMatrix {
        SparseIntMatrix {
            nrows,
            ncols,
            rows: vec![BTreeMap::new(); nrows],
        }
    }

    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        entries: &[(usize, usize, i64)],
    ) -> Result<SparseIntMatrix> {
        let mut m = SparseIntMatrix::zeros(nrows, ncols);
        for &(r, c, v) in entries {
            if r >= nrows || c >= ncols {
                return Err(Error::invalid(format!(
                    "entry ({r}, {c}) outside a {nrows}x{ncols} matrix"
                )));
            }
            if v != 0 {
                let slot = m.rows[r].entry(c).or_insert(0);
                *slot += v as i128;
                if *slot == 0 {
                    m.rows[r].remove(&c);
                }
            }
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> i128 {
        self.rows[r].get(&c).copied().unwrap_or(0)
    }

    /// Matrix product, used by the ∂∘∂ = 0 assertions.
    pub fn mul(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                context: "sparse matrix product",
                left: self.ncols,
                right: other.nrows,
            });
        }
        let mut out = SparseIntMatrix::zeros(self.nrows, other.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc: BTreeMap<usize, i128> = BTreeMap::new();
            for (&k, &v) in row {
                for (&c, &w) in &other.rows[k] {
                    let term = v.checked_mul(w).ok_or(Error::Overflow)?;
                    let slot = acc.entry(c).or_insert(0);
                    *slot = slot.checked_add(term).ok_or(Error::Overflow)?;
                }
            }
            acc.retain(|_, v| *v != 0);
            out.rows[r] = acc;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    /// Invariant factors `d_1 | d_2 | … | d_r`, all positive.
    pub invariant_factors: Vec<u128>,
    pub rank: usize,
}

impl SnfResult {
    /// Factors greater than one — the torsion contribution.
    pub fn torsion(&self) -> Vec<u128> {
        self.invariant_factors
            .iter()
            .copied()
            .filter(|&d| d > 1)
            .collect()
    }
}

/// Working state: row-major maps plus a column → rows occupancy index so
/// column operations stay near-linear in the entries they touch.
struct Elimination {
    rows: Vec<BTreeMap<usize, i128>>,
    col_rows: Vec<BTreeSet<usize>>,
    fill_budget: u64,
}

impl Elimination {
    fn new(m: &SparseIntMatrix, fill_budget: u64) -> Elimination {
        let mut col_rows = vec![BTreeSet::new(); m.ncols];
        for (r, row) in m.rows.iter().enumerate() {
            for &c in row.keys() {
                col_rows[c].insert(r);
            }
        }
        Elimination {
            rows: m.rows.clone(),
            col_rows,
            fill_budget,
        }
    }

    fn nnz(&self) -> u64 {
        self.rows.iter().map(|r| r.len() as u64).sum()
    }

    fn check_fill(&self) -> Result<()> {
        let nnz = self.nnz();
        if nnz > self.fill_budget {
            return Err(Error::Budget {
                what: "smith normal form fill-in",
                needed: nnz,
                budget: self.fill_budget,
            });
        }
        Ok(())
    }

    fn get(&self, r: usize, c: usize) -> i128 {
        self.rows[r].get(&c).copied().unwrap_or(0)
    }

    fn set(&mut self, r: usize, c: usize, v: i128) {
        if v == 0 {
            self.rows[r].remove(&c);
            self.col_rows[c].remove(&r);
        } else {
            self.rows[r].insert(c, v);
            self.col_rows[c].insert(r);
        }
    }

    /// row[dst] -= q · row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: i128) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        let src_row: Vec<(usize, i128)> = self.rows[src].iter().map(|(&c, &v)| (c, v)).collect();
        for (c, v) in src_row {
            let term = q.checked_mul(v).ok_or(Error::Overflow)?;
            let next = self.get(dst, c).checked_sub(term).ok_or(Error::Overflow)?;
            self.set(dst, c, next);
        }
        Ok(())
    }

    /// col[dst] -= q · col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: i128) -> Result<()> {
        if q == 0 {
            return Ok(());
        }
        let src_col: Vec<usize> = self.col_rows[src].iter().copied().collect();
        for r in src_col {
            let term = q
                .checked_mul(self.get(r, src))
                .ok_or(Error::Overflow)?;
            let next = self.get(r, dst).checked_sub(term).ok_or(Error::Overflow)?;
            self.set(r, dst, next);
        }
        Ok(())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let cols: Vec<usize> = self.rows[a]
            .keys()
            .chain(self.rows[b].keys())
            .copied()
            .collect();
        self.rows.swap(a, b);
        for c in cols {
            if self.rows[a].contains_key(&c) {
                self.col_rows[c].insert(a);
            } else {
                self.col_rows[c].remove(&a);
            }
            if self.rows[b].contains_key(&c) {
                self.col_rows[c].insert(b);
            } else {
                self.col_rows[c].remove(&b);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let rows: Vec<usize> = self.col_rows[a]
            .union(&self.col_rows[b])
            .copied()
            .collect();
        for r in rows {
            let va = self.rows[r].remove(&a);
            let vb = self.rows[r].remove(&b);
            if let Some(v) = va {
                self.rows[r].insert(b, v);
            }
            if let Some(v) = vb {
                self.rows[r].insert(a, v);
            }
        }
        self.col_rows.swap(a, b);
    }

    /// The active entry (r ≥ t, c ≥ t) with the smallest
    /// (|value|, Markowitz cost); `None` when the active block is zero.
    fn choose_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<((i128, u64), usize, usize)> = None;
        for (r, row) in self.rows.iter().enumerate().skip(t) {
            let row_count = row.range(t..).count() as u64;
            for (&c, &v) in row.range(t..) {
                let col_count = self.col_rows[c].range(t..).count() as u64;
                let cost = (row_count - 1) * (col_count - 1);
                let key = (v.abs(), cost);
                match &best {
                    Some((bk, _, _)) if *bk <= key => {}
                    _ => best = Some((key, r, c)),
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    /// Euclidean reduction of column `t` against the pivot at `(t, t)`.
    /// Returns true if the pivot row was swapped (value shrank).
    fn reduce_column(&mut self, t: usize) -> Result<bool> {
        let mut swapped = false;
        loop {
            let pivot = self.get(t, t);
            debug_assert_ne!(pivot, 0);
            let others: Vec<usize> = self.col_rows[t]
                .iter()
                .copied()
                .filter(|&r| r > t)
                .collect();
            if others.is_empty() {
                return Ok(swapped);
            }
            let mut descended = false;
            for r in others {
                let v = self.get(r, t);
                if v == 0 {
                    continue;
                }
                self.row_axpy(r, t, v.div_euclid(pivot))?;
                if self.get(r, t) != 0 {
                    // Remainder is strictly smaller: promote it to pivot.
                    self.swap_rows(t, r);
                    swapped = true;
                    descended = true;
                    break;
                }
            }
            self.check_fill()?;
            if !descended {
                return Ok(swapped);
            }
        }
    }

    /// Euclidean reduction of row `t` against the pivot at `(t, t)`.
    fn reduce_row(&mut self, t: usize) -> Result<bool> {
        let mut swapped = false;
        loop {
            let pivot = self.get(t, t);
            debug_assert_ne!(pivot, 0);
            let others: Vec<usize> = self.rows[t].keys().copied().filter(|&c| c > t).collect();
            if others.is_empty() {
                return Ok(swapped);
            }
            let mut descended = false;
            for c in others {
                let v = self.get(t, c);
                if v == 0 {
                    continue;
                }
                self.col_axpy(c, t, v.div_euclid(pivot))?;
                if self.get(t, c) != 0 {
                    self.swap_cols(t, c);
                    swapped = true;
                    descended = true;
                    break;
                }
            }
            self.check_fill()?;
            if !descended {
                return Ok(swapped);
            }
        }
    }

    fn column_clean(&self, t: usize) -> bool {
        self.col_rows[t].iter().all(|&r| r <= t)
    }

    fn row_clean(&self, t: usize) -> bool {
        self.rows[t].keys().all(|&c| c <= t)
    }
}

/// Smith normal form of a sparse integer matrix.
///
/// `fill_budget` caps the number of nonzero entries the elimination is
/// allowed to reach; exceeding it returns a budget error so the caller can
/// switch to modular ranks instead.
pub fn smith_normal_form(m: &SparseIntMatrix, fill_budget: u64) -> Result<SnfResult> {
    let mut e = Elimination::new(m, fill_budget);
    e.check_fill()?;
    let bound = m.nrows.min(m.ncols);
    let mut factors: Vec<u128> = Vec::new();

    for t in 0..bound {
        let Some((pr, pc)) = e.choose_pivot(t) else {
            break;
        };
        e.swap_rows(t, pr);
        e.swap_cols(t, pc);

        loop {
            // Alternate row/column clearing until both stabilize; each pass
            // strictly shrinks |pivot| or the off-diagonal support, so this
            // terminates.
            loop {
                e.reduce_column(t)?;
                e.reduce_row(t)?;
                if e.column_clean(t) && e.row_clean(t) {
                    break;
                }
            }
            // Divisibility: the pivot must divide the remaining block. If
            // it misses an entry, fold that row in and keep reducing — the
            // Euclidean steps then strictly shrink the pivot.
            let pivot = e.get(t, t);
            let mut offender = None;
            'scan: for (r, row) in e.rows.iter().enumerate().skip(t + 1) {
                for (&c, &v) in row.range(t + 1..) {
                    if v % pivot != 0 {
                        offender = Some((r, c));
                        break 'scan;
                    }
                }
            }
            match offender {
                Some((r, _)) => e.row_axpy(t, r, -1)?,
                None => break,
            }
        }
        factors.push(e.get(t, t).unsigned_abs());
    }

    let rank = factors.len();
    Ok(SnfResult {
        invariant_factors: factors,
        rank,
    })
}

/// Rank of the matrix over the prime field `F_p` by sparse elimination.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> Result<usize> {
    if p < 2 || p >= (1 << 31) {
        return Err(Error::invalid(format!("modulus {p} out of range")));
    }
    let mut rows: Vec<BTreeMap<usize, u64>> = m
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .filter_map(|(&c, &v)| {
                    let w = v.rem_euclid(p as i128) as u64;
                    (w != 0).then_some((c, w))
                })
                .collect()
        })
        .collect();

    let mut rank = 0;
    let mut active: Vec<usize> = (0..rows.len()).collect();
    loop {
        active.retain(|&r| !rows[r].is_empty());
        let Some(&pr) = active.iter().min_by_key(|&&r| rows[r].len()) else {
            break;
        };
        let (&pc, &pv) = rows[pr].iter().next().unwrap();
        let pinv = pow_mod(pv, p - 2, p);
        let pivot_row: Vec<(usize, u64)> = rows[pr]
            .iter()
            .map(|(&c, &v)| (c, v * pinv % p))
            .collect();
        rank += 1;
        active.retain(|&r| r != pr);
        rows[pr].clear();
        for &r in &active {
            let Some(&f) = rows[r].get(&pc) else { continue };
            for &(c, v) in &pivot_row {
                let cur = rows[r].get(&c).copied().unwrap_or(0);
                let next = (cur + p - f * v % p) % p;
                if next == 0 {
                    rows[r].remove(&c);
                } else {
                    rows[r].insert(c, next);
                }
            }
        }
    }
    Ok(rank)
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snf(entries: &[(usize, usize, i64)], nrows: usize, ncols: usize) -> SnfResult {
        let m = SparseIntMatrix::from_triplets(nrows, ncols, entries).unwrap();
        smith_normal_form(&m, 1_000_000).unwrap()
    }

    #[test]
    fn diagonal_matrix_is_its_own_normal_form() {
        let r = snf(&[(0, 0, 2), (1, 1, 6)], 2, 2);
        assert_eq!(r.invariant_factors, vec![2, 6]);
        assert_eq!(r.rank, 2);
    }

    #[test]
    fn divisibility_chain_is_enforced() {
        // diag(4, 6) has normal form diag(2, 12).
        let r = snf(&[(0, 0, 4), (1, 1, 6)], 2, 2);
        assert_eq!(r.invariant_factors, vec![2, 12]);
    }

    #[test]
    fn classic_textbook_example() {
        // [[2, 4, 4], [-6, 6, 12], [10, -4, -16]] reduces to diag(2, 6, 12).
        let r = snf(
            &[
                (0, 0, 2),
                (0, 1, 4),
                (0, 2, 4),
                (1, 0, -6),
                (1, 1, 6),
                (1, 2, 12),
                (2, 0, 10),
                (2, 1, -4),
                (2, 2, -16),
            ],
            3,
            3,
        );
        assert_eq!(r.invariant_factors, vec![2, 6, 12]);
    }

    #[test]
    fn zero_matrix_has_empty_factors() {
        let r = snf(&[], 3, 5);
        assert_eq!(r.invariant_factors, Vec::<u128>::new());
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn wide_and_tall_shapes_agree_with_transpose() {
        let entries = [(0, 0, 3), (0, 2, 9), (1, 1, 5), (1, 3, 10)];
        let m = SparseIntMatrix::from_triplets(2, 4, &entries).unwrap();
        let t: Vec<(usize, usize, i64)> =
            entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        let mt = SparseIntMatrix::from_triplets(4, 2, &t).unwrap();
        assert_eq!(
            smith_normal_form(&m, 10_000).unwrap(),
            smith_normal_form(&mt, 10_000).unwrap()
        );
    }

    #[test]
    fn rank_counts_pivots_over_modular_fields() {
        let m = SparseIntMatrix::from_triplets(
            3,
            3,
            &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4), (2, 2, 3)],
        )
        .unwrap();
        // Rows 0 and 1 are proportional over ℤ; over F_3 the lone (2,2)
        // entry also vanishes and the rank drops further.
        assert_eq!(rank_mod_p(&m, 1_000_003).unwrap(), 2);
        assert_eq!(rank_mod_p(&m, 3).unwrap(), 1);
    }

    #[test]
    fn fill_budget_is_respected() {
        let mut entries = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                entries.push((i, j, (1 + i + j) as i64));
            }
        }
        let m = SparseIntMatrix::from_triplets(20, 20, &entries).unwrap();
        match smith_normal_form(&m, 10) {
            Err(Error::Budget { budget, .. }) => assert_eq!(budget, 10),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn products_support_boundary_identities() {
        let a =
            SparseIntMatrix::from_triplets(2, 2, &[(0, 0, 1), (0, 1, -1), (1, 0, 1), (1, 1, -1)])
                .unwrap();
        let b =
            SparseIntMatrix::from_triplets(2, 2, &[(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)])
                .unwrap();
        assert!(a.mul(&b).unwrap().is_zero());
    }

    #[test]
    fn random_small_matrices_match_dense_reference() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..60 {
            let nrows = rng.gen_range(1..5);
            let ncols = rng.gen_range(1..5);
            let mut entries = Vec::new();
            let mut dense = vec![vec![0i128; ncols]; nrows];
            for r in 0..nrows {
                for c in 0..ncols {
                    if rng.gen_bool(0.6) {
                        let v = rng.gen_range(-6..=6i64);
                        entries.push((r, c, v));
                        dense[r][c] = v as i128;
                    }
                }
            }
            let m = SparseIntMatrix::from_triplets(nrows, ncols, &entries).unwrap();
            let got = smith_normal_form(&m, 100_000).unwrap();
            let want = dense_snf_reference(dense);
            assert_eq!(got.invariant_factors, want);
        }
    }

    /// Naive dense reference: repeated gcd sweeps, no sparsity tricks.
    fn dense_snf_reference(mut m: Vec<Vec<i128>>) -> Vec<u128> {
        let nrows = m.len();
        let ncols = if nrows == 0 { 0 } else { m[0].len() };
        let mut factors = Vec::new();
        let mut t = 0;
        while t < nrows.min(ncols) {
            // Find any nonzero in the block.
            let mut pivot = None;
            'find: for r in t..nrows {
                for c in t..ncols {
                    if m[r][c] != 0 {
                        pivot = Some((r, c));
                        break 'find;
                    }
                }
            }
            let Some((pr, pc)) = pivot else { break };
            m.swap(t, pr);
            for row in m.iter_mut() {
                row.swap(t, pc);
            }
            loop {
                let mut done = true;
                for r in t + 1..nrows {
                    while m[r][t] != 0 {
                        let q = m[r][t].div_euclid(m[t][t]);
                        for c in 0..ncols {
                            m[r][c] -= q * m[t][c];
                        }
                        if m[r][t] != 0 {
                            m.swap(t, r);
                            done = false;
                        }
                    }
                }
                for c in t + 1..ncols {
                    while m[t][c] != 0 {
                        let q = m[t][c].div_euclid(m[t][t]);
                        for row in m.iter_mut() {
                            row[c] -= q * row[t];
                        }
                        if m[t][c] != 0 {
                            for row in m.iter_mut() {
                                row.swap(t, c);
                            }
                            done = false;
                        }
                    }
                }
                let col_ok = (t + 1..nrows).all(|r| m[r][t] == 0);
                let row_ok = (t + 1..ncols).all(|c| m[t][c] == 0);
                if done && col_ok && row_ok {
                    let mut fixed = true;
                    'div: for r in t + 1..nrows {
                        for c in t + 1..ncols {
                            if m[r][c] % m[t][t] != 0 {
                                for k in 0..ncols {
                                    let add = m[r][k];
                                    m[t][k] += add;
                                }
                                fixed = false;
                                break 'div;
                            }
                        }
                    }
                    if fixed {
                        break;
                    }
                }
            }
            factors.push(m[t][t].unsigned_abs());
            t += 1;
        }
        factors
    }
}
