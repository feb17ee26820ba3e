//! Exact reduced homology of simplicial complexes.
//!
//! Boundary matrices are built with the sorted-vertex sign convention and
//! include the augmentation map, so all Betti numbers are reduced: a
//! contractible complex reports zero in every degree and the empty complex
//! reports 1 in degree −1. Exact mode runs integer Smith normal form and
//! yields torsion coefficients; modular mode only certifies ranks and can
//! at most flag suspected torsion.

use std::collections::BTreeMap;

use super::snf::{rank_mod_p, smith_normal_form, SparseIntMatrix};
use super::SimplicialComplex;
use crate::error::{Error, Result};

/// Chain complex of a simplicial complex up to a dimension cap.
///
/// `boundary[k]` is the matrix of ∂_k : C_k → C_{k−1} with one row per
/// k-face; `boundary[0]` is the augmentation onto the empty face.
#[derive(Debug)]
pub struct ChainComplex {
    pub face_counts: Vec<usize>,
    pub boundary: Vec<SparseIntMatrix>,
}

impl ChainComplex {
    pub fn from_complex(k: &SimplicialComplex, dim_cap: Option<usize>) -> Result<ChainComplex> {
        let dim = match k.dim() {
            None => {
                return Ok(ChainComplex {
                    face_counts: Vec::new(),
                    boundary: Vec::new(),
                })
            }
            Some(d) => match dim_cap {
                Some(cap) => d.min(cap),
                None => d,
            },
        };

        // Index the faces of each dimension in their sorted order.
        let mut index: Vec<BTreeMap<&Vec<u32>, usize>> = vec![BTreeMap::new(); dim + 1];
        for f in k.faces() {
            let d = f.len() - 1;
            if d <= dim {
                let next = index[d].len();
                index[d].insert(f, next);
            }
        }
        let face_counts: Vec<usize> = index.iter().map(|m| m.len()).collect();

        let mut boundary = Vec::with_capacity(dim + 1);
        // Augmentation: every vertex maps to the single empty face.
        let aug: Vec<(usize, usize, i64)> =
            (0..face_counts[0]).map(|i| (i, 0, 1)).collect();
        boundary.push(SparseIntMatrix::from_triplets(face_counts[0], 1, &aug)?);

        for d in 1..=dim {
            let mut entries = Vec::new();
            for (face, &row) in &index[d] {
                for (i, _) in face.iter().enumerate() {
                    let mut sub: Vec<u32> = face.to_vec();
                    sub.remove(i);
                    let col = index[d - 1][&sub];
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    entries.push((row, col, sign));
                }
            }
            boundary.push(SparseIntMatrix::from_triplets(
                face_counts[d],
                face_counts[d - 1],
                &entries,
            )?);
        }

        let cc = ChainComplex {
            face_counts,
            boundary,
        };
        debug_assert!(cc.boundary_squares_to_zero()?);
        Ok(cc)
    }

    /// ∂_{k} ∘ ∂_{k+1} = 0 for every consecutive pair.
    pub fn boundary_squares_to_zero(&self) -> Result<bool> {
        for pair in self.boundary.windows(2) {
            // Rows are faces, so composing boundaries is B_{k+1} · B_k.
            if !pair[1].mul(&pair[0])?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomologyMode {
    /// Integer Smith normal form: exact Betti numbers and torsion.
    Exact,
    /// Ranks over the given primes only; torsion is flagged, not computed.
    Modular(Vec<u64>),
}

#[derive(Debug, Clone)]
pub struct HomologyOptions {
    pub mode: HomologyMode,
    /// Compute homology only up to this dimension (inclusive).
    pub dim_cap: Option<usize>,
    /// Hard cap on the number of faces fed to the chain complex.
    pub face_budget: u64,
    /// Nonzero-entry threshold at which exact elimination gives up and the
    /// report falls back to modular ranks.
    pub fill_threshold: u64,
}

impl Default for HomologyOptions {
    fn default() -> Self {
        HomologyOptions {
            mode: HomologyMode::Exact,
            dim_cap: None,
            face_budget: 10_000_000,
            fill_threshold: 5_000_000,
        }
    }
}

/// Reference primes used for rank computations in modular mode; both are
/// large enough that boundary-matrix torsion (tiny in practice) cannot
/// divide them, so their ranks agree with the rational rank on every
/// complex this crate touches.
pub const REFERENCE_PRIMES: [u64; 2] = [1_000_003, 2_147_483_647];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportMode {
    Exact,
    ModularRank,
}

#[derive(Debug, Clone)]
pub struct HomologyReport {
    /// Reduced Betti numbers indexed by dimension (0..=d).
    pub betti_reduced: Vec<u64>,
    /// Reduced Betti number in degree −1 (1 exactly for the empty complex).
    pub betti_minus_one: u64,
    /// Torsion coefficients of H̃_k (exact mode only; empty otherwise).
    pub torsion: Vec<Vec<u64>>,
    /// Dimensions where modular ranks disagreed across primes.
    pub torsion_suspect: Vec<bool>,
    /// Alternating sum of face counts (non-reduced).
    pub euler: i64,
    /// Largest s such that H̃_k vanishes (rank and torsion) for all k ≤ s,
    /// within the computed range; −1 when H̃_0 ≠ 0, −2 for the empty
    /// complex.
    pub spherical_up_to: i64,
    pub mode: ReportMode,
}

impl HomologyReport {
    pub fn is_zero_through(&self, s: i64) -> bool {
        self.spherical_up_to >= s
    }
}

/// Reduced homology of `k` under the given options.
pub fn reduced_homology(k: &SimplicialComplex, opts: &HomologyOptions) -> Result<HomologyReport> {
    let faces = k.face_count() as u64;
    if faces > opts.face_budget {
        return Err(Error::Budget {
            what: "homology face count",
            needed: faces,
            budget: opts.face_budget,
        });
    }

    if k.is_empty() {
        return Ok(HomologyReport {
            betti_reduced: Vec::new(),
            betti_minus_one: 1,
            torsion: Vec::new(),
            torsion_suspect: Vec::new(),
            euler: 0,
            spherical_up_to: -2,
            mode: ReportMode::Exact,
        });
    }

    // Betti numbers up to dimension `want` need boundary matrices one
    // dimension higher, so the chain complex is built one step past the cap.
    let full_dim = k.dim().expect("nonempty complex has a dimension");
    let want = opts.dim_cap.map_or(full_dim, |c| c.min(full_dim));
    let build_depth = (want + 1).min(full_dim);
    let cc = ChainComplex::from_complex(k, Some(build_depth))?;
    let top = cc.face_counts.len() - 1;

    // Exact unless asked for modular or the matrices are too dense for
    // integer elimination; a budget blowout during elimination also
    // downgrades to modular ranks instead of failing.
    let nnz_max = cc.boundary.iter().map(|b| b.nnz() as u64).max().unwrap_or(0);
    let try_exact = match &opts.mode {
        HomologyMode::Exact => nnz_max <= opts.fill_threshold,
        HomologyMode::Modular(_) => false,
    };

    // rank[d] = rank ∂_d for d = 0..=top; the map above the top is zero.
    let mut ranks = vec![0usize; top + 2];
    let mut torsion: Vec<Vec<u64>> = vec![Vec::new(); want + 1];
    let mut torsion_suspect = vec![false; want + 1];
    let mut mode = ReportMode::ModularRank;

    let mut exact_done = false;
    if try_exact {
        let mut ok = true;
        for d in 0..=top {
            match smith_normal_form(&cc.boundary[d], opts.fill_threshold) {
                Ok(snf) => {
                    ranks[d] = snf.rank;
                    if d >= 1 && d - 1 <= want {
                        // Torsion of H̃_{d-1} comes from the factors of ∂_d.
                        torsion[d - 1] = snf
                            .torsion()
                            .into_iter()
                            .map(|f| u64::try_from(f).map_err(|_| Error::Overflow))
                            .collect::<Result<Vec<u64>>>()?;
                    }
                }
                Err(Error::Budget { .. }) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if ok {
            mode = ReportMode::Exact;
            exact_done = true;
        } else {
            for t in torsion.iter_mut() {
                t.clear();
            }
        }
    }

    if !exact_done {
        let primes: Vec<u64> = match &opts.mode {
            HomologyMode::Modular(ps) if !ps.is_empty() => ps.clone(),
            _ => REFERENCE_PRIMES.to_vec(),
        };
        for d in 0..=top {
            let mut reference = 0;
            for &p in REFERENCE_PRIMES.iter() {
                reference = reference.max(rank_mod_p(&cc.boundary[d], p)?);
            }
            ranks[d] = reference;
            for &p in &primes {
                let rp = rank_mod_p(&cc.boundary[d], p)?;
                if rp != reference && d >= 1 && d - 1 <= want {
                    torsion_suspect[d - 1] = true;
                }
            }
        }
    }

    let mut betti_reduced = Vec::with_capacity(want + 1);
    for d in 0..=want {
        let above = if d + 1 <= top { ranks[d + 1] } else { 0 };
        let b = cc.face_counts[d] - ranks[d] - above;
        betti_reduced.push(b as u64);
    }
    let betti_minus_one = (1 - ranks[0]) as u64;

    // Alternating face-count sum over the whole complex, independent of
    // any dimension cap.
    let euler: i64 = k
        .face_counts()
        .iter()
        .enumerate()
        .map(|(d, &c)| if d % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum();

    let mut spherical = -1i64;
    for d in 0..=want {
        if betti_reduced[d] == 0 && torsion[d].is_empty() && !torsion_suspect[d] {
            spherical = d as i64;
        } else {
            break;
        }
    }

    Ok(HomologyReport {
        betti_reduced,
        betti_minus_one,
        torsion,
        torsion_suspect,
        euler,
        spherical_up_to: spherical,
        mode,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityVerdict {
    pub target: i64,
    pub ok: bool,
    /// The first level at which the certificate failed: −1 means empty,
    /// 0 disconnected, k ≥ 1 a homology obstruction at dimension k.
    pub failed_at: Option<i64>,
}

/// Certify homological `target`-connectivity: nonempty, path-connected,
/// and vanishing reduced homology (rank and torsion) in dimensions
/// 1..=target. Level 0 uses union–find only; homology starts at level 1.
pub fn connectivity_report(
    k: &SimplicialComplex,
    target: i64,
    opts: &HomologyOptions,
) -> Result<ConnectivityVerdict> {
    let fail = |level: i64| ConnectivityVerdict {
        target,
        ok: false,
        failed_at: Some(level),
    };
    if k.is_empty() {
        return Ok(fail(-1));
    }
    if target >= 0 && k.component_count() != 1 {
        return Ok(fail(0));
    }
    if target >= 1 {
        let mut capped = opts.clone();
        capped.dim_cap = Some(target as usize);
        let report = reduced_homology(k, &capped)?;
        for d in 1..=target {
            let du = d as usize;
            if du < report.betti_reduced.len()
                && (report.betti_reduced[du] != 0
                    || !report.torsion[du].is_empty()
                    || report.torsion_suspect[du])
            {
                return Ok(fail(d));
            }
        }
    }
    Ok(ConnectivityVerdict {
        target,
        ok: true,
        failed_at: None,
    })
}
