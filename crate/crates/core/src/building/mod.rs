//! Chamber systems of linear and isotropic flags with Weyl-valued distance.
//!
//! A [`Building`] enumerates every maximal flag (chamber) of one of the
//! supported geometries over a finite field:
//!
//! * linear: all complete flags of proper subspaces of `F^{n+1}`,
//! * polar: all complete flags of totally isotropic subspaces for a fixed
//!   non-degenerate alternating or symmetric bilinear form.
//!
//! The distance between two chambers is a [`WeylElement`] read off the
//! intersection-dimension table of the associated complete flags; for
//! polar chambers the flags are first extended by their perps so the
//! table again describes complete flags and the resulting permutation is
//! folded to a signed one.  Residues, panels, and gate projections are
//! provided on top of the distance.

pub mod flip;
pub mod weyl;

pub use flip::{
    CharacterizationReport, Flip, FlipFlopSystem, GpgReport, StepFit,
};
pub use weyl::{parabolic_longest_length, WeylElement, WeylKind};

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::form::Form;
use crate::phan::GeometryKind;
use crate::subspace::{QuotientChart, Subspace};

/// Default ceiling on the number of chambers a building may enumerate.
pub const DEFAULT_CHAMBER_BUDGET: u64 = 1_000_000;

/// A maximal flag: nested subspaces of dimensions `1, …, rank`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberFlag {
    members: Vec<Subspace>,
}

impl ChamberFlag {
    /// Validate a chain of subspaces with dimensions exactly `1..=len`.
    pub fn new(members: Vec<Subspace>) -> Result<ChamberFlag> {
        if members.is_empty() {
            return Err(Error::invalid("a chamber needs at least one member"));
        }
        let ambient = members[0].ambient();
        for (i, m) in members.iter().enumerate() {
            if m.ambient() != ambient {
                return Err(Error::invalid("chamber members live in one space"));
            }
            if m.dim() != i + 1 {
                return Err(Error::invalid(format!(
                    "chamber member {} has dimension {}, expected {}",
                    i,
                    m.dim(),
                    i + 1
                )));
            }
            if i > 0 && !m.contains(&members[i - 1]) {
                return Err(Error::invalid("chamber members must be nested"));
            }
        }
        Ok(ChamberFlag { members })
    }

    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    /// The member of the given dimension (1-based).
    pub fn member(&self, dim: usize) -> &Subspace {
        &self.members[dim - 1]
    }

    pub fn rank(&self) -> usize {
        self.members.len()
    }

    pub fn ambient(&self) -> usize {
        self.members[0].ambient()
    }

    /// Deterministic key used for indexing and ordering.
    pub fn key(&self) -> Vec<u32> {
        let mut key = Vec::new();
        for m in &self.members {
            key.extend_from_slice(&m.canonical_key());
            key.push(u32::MAX); // separator
        }
        key
    }
}

/// A chamber system together with its Weyl-distance structure.
#[derive(Clone, Debug)]
pub struct Building {
    kind: GeometryKind,
    rank: usize,
    field: Arc<Field>,
    ambient_dim: usize,
    defining: Option<Form>,
    chambers: Vec<ChamberFlag>,
    index: BTreeMap<Vec<u32>, usize>,
}

impl Building {
    /// All complete flags of `F^{rank+1}`.
    pub fn new_linear(field: Arc<Field>, rank: usize, budget: u64) -> Result<Building> {
        if rank == 0 {
            return Err(Error::invalid("rank must be at least 1"));
        }
        let ambient = rank + 1;
        let mut chambers = Vec::new();
        let start = Subspace::zero(field.clone(), ambient);
        extend_flags(&mut Vec::new(), &start, rank, None, budget, &mut chambers)?;
        Building::finish(GeometryKind::A, rank, field, ambient, None, chambers)
    }

    /// All complete totally isotropic flags of a non-degenerate bilinear
    /// form: alternating (even dimension) or symmetric (odd dimension,
    /// odd characteristic).  The rank is the Witt index, which for these
    /// two shapes is half the dimension rounded down.
    pub fn new_polar(form: Form, budget: u64) -> Result<Building> {
        use crate::field::Involution;
        let field = form.field().clone();
        let dim = form.dim();
        if !form.is_nondegenerate() {
            return Err(Error::pre("defining form must be non-degenerate"));
        }
        if form.sigma() != Involution::Identity {
            return Err(Error::invalid("defining form must be bilinear"));
        }
        let kind = if dim % 2 == 0 {
            // Alternating: ε = -1 and zero diagonal.
            if form.epsilon() != field.minus_one() {
                return Err(Error::invalid("even-dimensional defining form must be alternating"));
            }
            for i in 0..dim {
                let e: Vec<_> = (0..dim)
                    .map(|j| if i == j { field.one() } else { field.zero() })
                    .collect();
                if !form.eval(&e, &e)?.is_zero() {
                    return Err(Error::invalid("alternating form needs isotropic axes"));
                }
            }
            GeometryKind::C
        } else {
            if field.characteristic() == 2 {
                return Err(Error::Unsupported(
                    "odd-dimensional symmetric forms need odd characteristic".into(),
                ));
            }
            if form.epsilon() != field.one() {
                return Err(Error::invalid("odd-dimensional defining form must be symmetric"));
            }
            GeometryKind::B
        };
        let rank = dim / 2;
        if rank == 0 {
            return Err(Error::invalid("the form admits no isotropic flags"));
        }
        let mut chambers = Vec::new();
        let start = Subspace::zero(field.clone(), dim);
        extend_flags(&mut Vec::new(), &start, rank, Some(&form), budget, &mut chambers)?;
        if chambers.is_empty() {
            return Err(Error::pre("the form admits no complete isotropic flag"));
        }
        Building::finish(kind, rank, field, dim, Some(form), chambers)
    }

    fn finish(
        kind: GeometryKind,
        rank: usize,
        field: Arc<Field>,
        ambient_dim: usize,
        defining: Option<Form>,
        mut chambers: Vec<ChamberFlag>,
    ) -> Result<Building> {
        chambers.sort_by_cached_key(|c| c.key());
        let mut index = BTreeMap::new();
        for (i, c) in chambers.iter().enumerate() {
            if index.insert(c.key(), i).is_some() {
                return Err(Error::invalid("duplicate chamber during enumeration"));
            }
        }
        Ok(Building {
            kind,
            rank,
            field,
            ambient_dim,
            defining,
            chambers,
            index,
        })
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// The defining bilinear form (polar buildings only).
    pub fn defining_form(&self) -> Option<&Form> {
        self.defining.as_ref()
    }

    pub fn chambers(&self) -> &[ChamberFlag] {
        &self.chambers
    }

    pub fn chamber_count(&self) -> usize {
        self.chambers.len()
    }

    pub fn chamber(&self, i: usize) -> &ChamberFlag {
        &self.chambers[i]
    }

    /// Index of a chamber flag in this building.
    pub fn index_of(&self, c: &ChamberFlag) -> Result<usize> {
        self.index
            .get(&c.key())
            .copied()
            .ok_or_else(|| Error::invalid("flag is not a chamber of this building"))
    }

    pub fn weyl_kind(&self) -> WeylKind {
        match self.kind {
            GeometryKind::A => WeylKind::Linear {
                letters: self.rank + 1,
            },
            GeometryKind::B | GeometryKind::C => WeylKind::Signed { rank: self.rank },
        }
    }

    /// Extend a chamber to a complete flag of the ambient space, omitting
    /// `0` and the full space.  Polar chambers gain the perps of their
    /// members in reverse order (skipping a member that equals its perp).
    fn extended_flag(&self, c: &ChamberFlag) -> Result<Vec<Subspace>> {
        match &self.defining {
            None => Ok(c.members().to_vec()),
            Some(j) => {
                let mut ext = c.members().to_vec();
                for m in c.members().iter().rev() {
                    let p = j.perp(m)?;
                    if p.dim() > ext.last().map_or(0, |s| s.dim()) {
                        ext.push(p);
                    }
                }
                Ok(ext)
            }
        }
    }

    /// The Weyl-valued distance between two chambers of this building.
    pub fn weyl_distance_flags(&self, c: &ChamberFlag, d: &ChamberFlag) -> Result<WeylElement> {
        if c.rank() != self.rank || d.rank() != self.rank {
            return Err(Error::invalid("chamber rank does not match the building"));
        }
        if c.ambient() != self.ambient_dim || d.ambient() != self.ambient_dim {
            return Err(Error::invalid("chamber ambient does not match the building"));
        }
        let ec = self.extended_flag(c)?;
        let ed = self.extended_flag(d)?;
        let n = self.ambient_dim;
        debug_assert_eq!(ec.len(), n - 1);
        debug_assert_eq!(ed.len(), n - 1);

        // dims[i][j] = dim(C_i ∩ D_j) with C_0 = D_0 = 0 and C_n = D_n = V.
        let mut dims = vec![vec![0usize; n + 1]; n + 1];
        for i in 1..=n {
            for j in 1..=n {
                dims[i][j] = if i == n {
                    if j == n { n } else { ed[j - 1].dim() }
                } else if j == n {
                    ec[i - 1].dim()
                } else {
                    ec[i - 1].intersect(&ed[j - 1])?.dim()
                };
            }
        }

        // The double difference of the table is a permutation matrix;
        // entry (i, j) = 1 reads "position j of d pairs with position i
        // of c", i.e. the distance permutation sends j to i.
        let mut pi = vec![0usize; n + 1];
        let mut hit_row = vec![false; n + 1];
        for j in 1..=n {
            let mut found = 0usize;
            for i in 1..=n {
                let m = dims[i][j] + dims[i - 1][j - 1];
                let m2 = dims[i - 1][j] + dims[i][j - 1];
                debug_assert!(m == m2 || m == m2 + 1);
                if m == m2 + 1 {
                    if found != 0 || hit_row[i] {
                        return Err(Error::invalid("intersection table is not unimodal"));
                    }
                    found = i;
                    hit_row[i] = true;
                }
            }
            if found == 0 {
                return Err(Error::invalid("intersection table is not unimodal"));
            }
            pi[j] = found;
        }

        match self.weyl_kind() {
            WeylKind::Linear { .. } => {
                let map: Vec<i32> = (1..=n).map(|j| pi[j] as i32).collect();
                WeylElement::new(self.weyl_kind(), map)
            }
            WeylKind::Signed { rank } => {
                // Fold the permutation of 1..=n-? positions: the first
                // `rank` positions carry the isotropic members; images in
                // the upper half are mirrored with a sign.
                let map: Vec<i32> = (1..=rank)
                    .map(|j| {
                        let i = pi[j];
                        if i <= rank {
                            i as i32
                        } else {
                            -((n + 1 - i) as i32)
                        }
                    })
                    .collect();
                WeylElement::new(self.weyl_kind(), map)
            }
        }
    }

    /// Distance between chambers given by index.
    pub fn weyl_distance(&self, c: usize, d: usize) -> Result<WeylElement> {
        self.weyl_distance_flags(&self.chambers[c], &self.chambers[d])
    }

    /// Numerical (gallery) distance.
    pub fn gallery_distance(&self, c: usize, d: usize) -> Result<u64> {
        Ok(self.weyl_distance(c, d)?.length())
    }

    /// The residue of a partial flag: all chambers containing every given
    /// member.  The members may be passed in any order.
    pub fn residue(&self, fixed: &[Subspace]) -> Result<Residue> {
        let mut sorted = fixed.to_vec();
        sorted.sort_by_key(|s| s.dim());
        for w in sorted.windows(2) {
            if w[0].dim() == w[1].dim() || !w[1].contains(&w[0]) {
                return Err(Error::invalid("fixed members must form a partial flag"));
            }
        }
        for s in &sorted {
            if s.dim() == 0 || s.dim() > self.rank || s.ambient() != self.ambient_dim {
                return Err(Error::invalid("fixed member outside the building's types"));
            }
        }
        let fixed_dims: Vec<usize> = sorted.iter().map(|s| s.dim()).collect();
        let free_types: Vec<usize> =
            (1..=self.rank).filter(|t| !fixed_dims.contains(t)).collect();
        let mut members = Vec::new();
        'outer: for (i, c) in self.chambers.iter().enumerate() {
            for s in &sorted {
                if c.member(s.dim()) != s {
                    continue 'outer;
                }
            }
            members.push(i);
        }
        if members.is_empty() {
            return Err(Error::pre("no chamber contains the given partial flag"));
        }
        Ok(Residue {
            fixed: sorted,
            free_types,
            chambers: members,
        })
    }

    /// The residue containing every chamber.
    pub fn whole_residue(&self) -> Residue {
        Residue {
            fixed: Vec::new(),
            free_types: (1..=self.rank).collect(),
            chambers: (0..self.chambers.len()).collect(),
        }
    }

    /// The panel of a chamber along one type: fix every member except the
    /// one of the given dimension.
    pub fn panel(&self, chamber: usize, typ: usize) -> Result<Residue> {
        if typ == 0 || typ > self.rank {
            return Err(Error::invalid("panel type out of range"));
        }
        let fixed: Vec<Subspace> = self.chambers[chamber]
            .members()
            .iter()
            .filter(|m| m.dim() != typ)
            .cloned()
            .collect();
        self.residue(&fixed)
    }

    /// Gate projection: the chamber of the residue nearest to the target.
    /// The gate of a residue is unique; a tie means the input is not a
    /// residue of this building and is reported as an error.
    pub fn gate(&self, residue: &Residue, target: usize) -> Result<usize> {
        if residue.contains(target) {
            // Distance zero is strictly minimal: the target is its own gate.
            return Ok(target);
        }
        let mut best: Option<(u64, usize)> = None;
        let mut tie = false;
        for &x in &residue.chambers {
            let d = self.gallery_distance(target, x)?;
            match best {
                None => best = Some((d, x)),
                Some((bd, _)) if d < bd => {
                    best = Some((d, x));
                    tie = false;
                }
                Some((bd, _)) if d == bd => tie = true,
                _ => {}
            }
        }
        let (_, gate) = best.ok_or_else(|| Error::invalid("empty residue has no gate"))?;
        if tie {
            return Err(Error::invalid("gate projection is not unique"));
        }
        Ok(gate)
    }

    /// Gate the whole residue `source` through `target`: the set
    /// `{gate(target, s) : s ∈ source}` collected as a residue.  Errors if
    /// the gated set is not the chamber set of a residue.
    pub fn project_residue(&self, target: &Residue, source: &Residue) -> Result<Residue> {
        let mut gated: Vec<usize> = source
            .chambers
            .iter()
            .map(|&s| self.gate(target, s))
            .collect::<Result<_>>()?;
        gated.sort_unstable();
        gated.dedup();
        // Infer the common partial flag of the gated set and re-derive a
        // residue from it.
        let first = &self.chambers[gated[0]];
        let mut common: Vec<Subspace> = Vec::new();
        for t in 1..=self.rank {
            let m = first.member(t);
            if gated
                .iter()
                .all(|&i| self.chambers[i].member(t) == m)
            {
                common.push(m.clone());
            }
        }
        let residue = self.residue(&common)?;
        if residue.chambers != gated {
            return Err(Error::invalid(
                "gated chamber set is not a residue of the building",
            ));
        }
        Ok(residue)
    }
}

/// A residue: all chambers through a fixed partial flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residue {
    fixed: Vec<Subspace>,
    free_types: Vec<usize>,
    chambers: Vec<usize>,
}

impl Residue {
    pub fn fixed(&self) -> &[Subspace] {
        &self.fixed
    }

    /// Dimensions (= generator indices) that vary across the residue.
    pub fn free_types(&self) -> &[usize] {
        &self.free_types
    }

    pub fn chambers(&self) -> &[usize] {
        &self.chambers
    }

    pub fn chamber_count(&self) -> usize {
        self.chambers.len()
    }

    pub fn contains(&self, chamber: usize) -> bool {
        self.chambers.binary_search(&chamber).is_ok()
    }

    /// Length of the longest element of the residue's Weyl subgroup.
    pub fn longest_length(&self, kind: WeylKind) -> Result<u64> {
        parabolic_longest_length(kind, &self.free_types)
    }
}

/// Depth-first enumeration of maximal flags, isotropic when a form is
/// given.  Each extension step walks the projective points of the
/// quotient of the current top by its admissible superspace, so every
/// flag is produced exactly once.
fn extend_flags(
    stack: &mut Vec<Subspace>,
    top: &Subspace,
    rank: usize,
    form: Option<&Form>,
    budget: u64,
    out: &mut Vec<ChamberFlag>,
) -> Result<()> {
    if stack.len() == rank {
        if out.len() as u64 >= budget {
            return Err(Error::Budget {
                what: "chamber enumeration",
                needed: out.len() as u64 + 1,
                budget,
            });
        }
        out.push(ChamberFlag::new(stack.clone())?);
        return Ok(());
    }
    let field = top.field().clone();
    let ambient = top.ambient();
    let ceiling = match form {
        Some(j) => j.perp(top)?,
        None => Subspace::full(field.clone(), ambient),
    };
    let chart = QuotientChart::new(top.clone(), ceiling)?;
    let quotient_points =
        Subspace::full(field.clone(), chart.dim()).projective_points();
    for p in quotient_points {
        let v = chart.lift_vector(&p)?;
        if let Some(j) = form {
            if !j.is_isotropic_vector(&v)? {
                continue;
            }
        }
        let line = Subspace::line(field.clone(), &v)?;
        let next = top.sum(&line)?;
        debug_assert_eq!(next.dim(), top.dim() + 1);
        stack.push(next.clone());
        extend_flags(stack, &next, rank, form, budget, out)?;
        stack.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap as Map;

    fn f(q: u32) -> Arc<Field> {
        match q {
            2 | 3 | 5 => Field::prime(q).unwrap(),
            4 => Field::with_default_modulus(2, 2).unwrap(),
            9 => Field::with_default_modulus(3, 2).unwrap(),
            _ => panic!("unexpected order"),
        }
    }

    #[test]
    fn linear_chamber_counts() {
        // Complete flags of F_q^3: (q²+q+1)(q+1).
        assert_eq!(
            Building::new_linear(f(2), 2, 1_000).unwrap().chamber_count(),
            21
        );
        assert_eq!(
            Building::new_linear(f(4), 2, 1_000).unwrap().chamber_count(),
            105
        );
    }

    #[test]
    fn symplectic_chamber_counts() {
        let b2 = Building::new_polar(Form::symplectic(f(2), 2), 1_000).unwrap();
        assert_eq!(b2.chamber_count(), 45);
        assert_eq!(b2.kind(), GeometryKind::C);
        let b3 = Building::new_polar(Form::symplectic(f(3), 2), 1_000).unwrap();
        assert_eq!(b3.chamber_count(), 160);
    }

    #[test]
    fn large_symplectic_count_within_budget() {
        let b = Building::new_polar(Form::symplectic(f(9), 2), 10_000).unwrap();
        assert_eq!(b.chamber_count(), 8_200);
    }

    #[test]
    fn odd_orthogonal_chamber_count() {
        let j = Form::symmetric_odd_dim(f(3), 2).unwrap();
        let b = Building::new_polar(j, 1_000).unwrap();
        assert_eq!(b.kind(), GeometryKind::B);
        // Same Weyl group as the symplectic rank-2 case: Σ 3^{ℓ(w)} = 160.
        assert_eq!(b.chamber_count(), 160);
    }

    #[test]
    fn budget_is_enforced() {
        let err = Building::new_linear(f(4), 2, 50).unwrap_err();
        assert!(matches!(err, Error::Budget { .. }));
    }

    #[test]
    fn distance_identity_and_inverse_symmetry() {
        let b = Building::new_polar(Form::symplectic(f(2), 2), 1_000).unwrap();
        for c in 0..b.chamber_count() {
            assert!(b.weyl_distance(c, c).unwrap().is_identity());
        }
        for c in [0usize, 7, 13] {
            for d in [3usize, 21, 44] {
                let fwd = b.weyl_distance(c, d).unwrap();
                let back = b.weyl_distance(d, c).unwrap();
                assert_eq!(fwd.inverse(), back);
            }
        }
    }

    fn cell_sizes(b: &Building, base: usize) -> Map<Vec<i32>, u64> {
        let mut cells: Map<Vec<i32>, u64> = Map::new();
        for d in 0..b.chamber_count() {
            let w = b.weyl_distance(base, d).unwrap();
            *cells.entry(w.images().to_vec()).or_insert(0) += 1;
        }
        cells
    }

    #[test]
    fn bruhat_cells_have_power_sizes_linear() {
        let b = Building::new_linear(f(2), 2, 1_000).unwrap();
        let kind = b.weyl_kind();
        for base in 0..b.chamber_count() {
            let cells = cell_sizes(&b, base);
            assert_eq!(cells.len(), 6);
            for (map, count) in cells {
                let w = WeylElement::new(kind, map).unwrap();
                assert_eq!(count, 1u64 << w.length());
            }
        }
    }

    #[test]
    fn bruhat_cells_have_power_sizes_symplectic() {
        let b = Building::new_polar(Form::symplectic(f(2), 2), 1_000).unwrap();
        let kind = b.weyl_kind();
        for base in 0..b.chamber_count() {
            let cells = cell_sizes(&b, base);
            assert_eq!(cells.len(), 8);
            for (map, count) in cells {
                let w = WeylElement::new(kind, map).unwrap();
                assert_eq!(count, 1u64 << w.length());
            }
        }
    }

    #[test]
    fn bruhat_cells_odd_orthogonal_single_base() {
        let j = Form::symmetric_odd_dim(f(3), 2).unwrap();
        let b = Building::new_polar(j, 1_000).unwrap();
        let kind = b.weyl_kind();
        let cells = cell_sizes(&b, 0);
        assert_eq!(cells.len(), 8);
        for (map, count) in cells {
            let w = WeylElement::new(kind, map).unwrap();
            assert_eq!(count, 3u64.pow(w.length() as u32));
        }
    }

    #[test]
    fn panels_have_point_size() {
        let b = Building::new_linear(f(2), 2, 1_000).unwrap();
        for c in 0..5 {
            for t in 1..=2 {
                let p = b.panel(c, t).unwrap();
                assert_eq!(p.chamber_count(), 3); // q + 1
                assert_eq!(p.free_types(), &[t]);
                assert!(p.contains(c));
            }
        }
        let s = Building::new_polar(Form::symplectic(f(2), 2), 1_000).unwrap();
        for t in 1..=2 {
            assert_eq!(s.panel(0, t).unwrap().chamber_count(), 3);
        }
    }

    #[test]
    fn adjacent_chambers_are_generator_distance_apart() {
        let b = Building::new_polar(Form::symplectic(f(2), 2), 1_000).unwrap();
        let kind = b.weyl_kind();
        for c in 0..b.chamber_count() {
            for t in 1..=2usize {
                let p = b.panel(c, t).unwrap();
                let s = WeylElement::generator(kind, t).unwrap();
                for &d in p.chambers() {
                    if d == c {
                        continue;
                    }
                    assert_eq!(b.weyl_distance(c, d).unwrap(), s);
                }
            }
        }
    }

    #[test]
    fn gate_identity_holds_exhaustively() {
        // δ(c, y) = δ(c, gate) · δ(gate, y) with additive lengths, for
        // every chamber c, panel or point residue R, and y in R.
        let b = Building::new_linear(f(2), 2, 1_000).unwrap();
        let mut residues = Vec::new();
        for c in 0..b.chamber_count() {
            for t in 1..=2 {
                residues.push(b.panel(c, t).unwrap());
            }
        }
        residues.dedup_by(|a, b| a.chambers() == b.chambers());
        for r in &residues {
            for c in 0..b.chamber_count() {
                let g = b.gate(r, c).unwrap();
                let to_gate = b.weyl_distance(c, g).unwrap();
                for &y in r.chambers() {
                    let direct = b.weyl_distance(c, y).unwrap();
                    let tail = b.weyl_distance(g, y).unwrap();
                    assert_eq!(direct, to_gate.compose(&tail).unwrap());
                    assert_eq!(direct.length(), to_gate.length() + tail.length());
                }
            }
        }
    }

    #[test]
    fn residue_lookup_and_whole_residue() {
        let b = Building::new_polar(Form::symplectic(f(3), 2), 1_000).unwrap();
        let c0 = b.chamber(0).clone();
        let point_res = b.residue(&[c0.member(1).clone()]).unwrap();
        assert_eq!(point_res.free_types(), &[2]);
        assert_eq!(point_res.chamber_count(), 4); // q + 1 Lagrangians through a point
        let whole = b.whole_residue();
        assert_eq!(whole.chamber_count(), b.chamber_count());
        assert_eq!(
            whole.longest_length(b.weyl_kind()).unwrap(),
            b.weyl_kind().longest_length()
        );
        let bad = Subspace::line(f(3), &[f(3).one(), f(3).zero(), f(3).zero(), f(3).zero()]);
        // A non-isotropic line is not part of any chamber.
        let j = b.defining_form().unwrap();
        let v = bad.unwrap();
        if !j.is_totally_isotropic(&v).unwrap() {
            assert!(b.residue(std::slice::from_ref(&v)).is_err());
        }
    }

    #[test]
    fn project_residue_onto_disjoint_panel() {
        let b = Building::new_linear(f(2), 2, 1_000).unwrap();
        // Two panels sharing no chamber: project one onto the other.
        let p0 = b.panel(0, 1).unwrap();
        let far = (0..b.chamber_count())
            .find(|&c| b.gallery_distance(0, c).unwrap() == 3)
            .unwrap();
        let p1 = b.panel(far, 2).unwrap();
        let proj = b.project_residue(&p0, &p1).unwrap();
        assert!(proj.chamber_count() <= p0.chamber_count());
        for &c in proj.chambers() {
            assert!(p0.contains(c));
        }
    }
}
