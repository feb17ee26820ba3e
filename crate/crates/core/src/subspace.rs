//! Subspaces of `F^N` with canonical representatives, plus quotient charts.
//!
//! A subspace is stored as the reduced row echelon form of any spanning set,
//! which makes equality testing, hashing into sorted sets, and deterministic
//! enumeration straightforward. Enumeration order is fixed: pivot-column
//! patterns in lexicographic order, free entries counting up in base `q`
//! (row-major position order, first position fastest). The first subspace of
//! dimension `k` is therefore always the coordinate subspace `⟨e_1,…,e_k⟩`.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::matrix::Matrix;

#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Subspace(dim {} of F^{}, pivots {:?})",
            self.dim(),
            self.ambient(),
            self.pivots
        )?;
        if self.dim() > 0 {
            write!(f, " {:?}", self.basis)?;
        }
        Ok(())
    }
}

impl Subspace {
    /// Canonicalize a spanning matrix into a subspace.
    pub fn from_matrix(m: &Matrix) -> Subspace {
        let (rr, pivots) = m.rref();
        let basis = rr.take_rows(&(0..pivots.len()).collect::<Vec<_>>());
        Subspace { basis, pivots }
    }

    pub fn from_rows(field: Arc<Field>, rows: Vec<Vec<FieldElement>>) -> Result<Subspace> {
        let ambient = rows.first().map(|r| r.len()).unwrap_or(0);
        if ambient == 0 {
            return Err(Error::invalid("from_rows needs at least one row"));
        }
        Ok(Subspace::from_matrix(&Matrix::from_rows(field, rows)?))
    }

    /// Trusted constructor: `basis` must already be in reduced echelon form
    /// with the given pivot columns. Used by the enumerator.
    fn from_rref_unchecked(basis: Matrix, pivots: Vec<usize>) -> Subspace {
        Subspace { basis, pivots }
    }

    pub fn zero(field: Arc<Field>, ambient: usize) -> Subspace {
        Subspace {
            basis: Matrix::zeros(field, 0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Arc<Field>, ambient: usize) -> Subspace {
        Subspace {
            basis: Matrix::identity(field, ambient),
            pivots: (0..ambient).collect(),
        }
    }

    /// The coordinate subspace `⟨e_1, …, e_k⟩`.
    pub fn coordinate(field: Arc<Field>, ambient: usize, k: usize) -> Subspace {
        let mut basis = Matrix::zeros(field, k, ambient);
        for i in 0..k {
            basis.set(i, i, FieldElement::ONE);
        }
        Subspace {
            basis,
            pivots: (0..k).collect(),
        }
    }

    pub fn line(field: Arc<Field>, v: &[FieldElement]) -> Result<Subspace> {
        let s = Subspace::from_rows(field, vec![v.to_vec()])?;
        if s.dim() != 1 {
            return Err(Error::invalid("line through the zero vector"));
        }
        Ok(s)
    }

    pub fn field(&self) -> &Arc<Field> {
        self.basis.field()
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn codim(&self) -> usize {
        self.ambient() - self.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient()
    }

    /// The canonical (reduced echelon) basis matrix.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// A total-order key (within one field): dimension, pivot columns,
    /// then basis entry codes. Canonical bases make this a set identity.
    pub fn canonical_key(&self) -> Vec<u32> {
        let mut key = Vec::with_capacity(2 + self.pivots.len() + self.dim() * self.ambient());
        key.push(self.ambient() as u32);
        key.push(self.dim() as u32);
        key.extend(self.pivots.iter().map(|&p| p as u32));
        for r in 0..self.dim() {
            for c in 0..self.ambient() {
                key.push(self.basis.get(r, c).code());
            }
        }
        key
    }

    /// Canonical coset representative of `v` modulo this subspace: the
    /// unique vector in `v + U` whose pivot-column coordinates vanish.
    pub fn reduce(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        let f = self.field().clone();
        let mut w = v.to_vec();
        for (i, &pc) in self.pivots.iter().enumerate() {
            let c = w[pc];
            if c.is_zero() {
                continue;
            }
            let row = self.basis.row(i);
            for (wj, &bj) in w.iter_mut().zip(row) {
                *wj = f.sub(*wj, f.mul(c, bj));
            }
        }
        w
    }

    pub fn contains_vector(&self, v: &[FieldElement]) -> bool {
        self.reduce(v).iter().all(|e| e.is_zero())
    }

    /// Coefficients of `v` in the canonical basis.
    pub fn coords_of(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let mut coords = Vec::with_capacity(self.dim());
        let f = self.field().clone();
        let mut w = v.to_vec();
        for (i, &pc) in self.pivots.iter().enumerate() {
            let c = w[pc];
            coords.push(c);
            if c.is_zero() {
                continue;
            }
            let row = self.basis.row(i);
            for (wj, &bj) in w.iter_mut().zip(row) {
                *wj = f.sub(*wj, f.mul(c, bj));
            }
        }
        if w.iter().any(|e| !e.is_zero()) {
            return Err(Error::NotInSpan);
        }
        Ok(coords)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        (0..other.dim()).all(|i| self.contains_vector(other.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        Ok(Subspace::from_matrix(&self.basis.vstack(&other.basis)?))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        if self.field() != other.field() || self.ambient() != other.ambient() {
            return Err(Error::FieldMismatch);
        }
        // Kernel vectors (x, y) of the stacked basis satisfy
        // x·B_U = −y·B_W ∈ U ∩ W, and that assignment is a bijection.
        let stacked = self.basis.vstack(&other.basis)?;
        let ker = stacked.row_kernel();
        let ambient = self.ambient();
        let mut rows = Vec::with_capacity(ker.rows());
        for i in 0..ker.rows() {
            let x = &ker.row(i)[..self.dim()];
            rows.push(self.basis.mul_row(x)?);
        }
        if rows.is_empty() {
            return Ok(Subspace::zero(self.field().clone(), ambient));
        }
        Subspace::from_rows(self.field().clone(), rows)
    }

    /// Rows spanning a complement `A` with `self ⊕ A = sup`.
    pub fn complement_in(&self, sup: &Subspace) -> Result<Matrix> {
        if !sup.contains(self) {
            return Err(Error::pre("complement_in: subspace not contained in sup"));
        }
        let mut running = self.clone();
        let mut chosen: Vec<Vec<FieldElement>> = Vec::new();
        for i in 0..sup.dim() {
            if running.dim() == sup.dim() {
                break;
            }
            let v = sup.basis.row(i);
            if !running.contains_vector(v) {
                chosen.push(v.to_vec());
                running = running.sum(&Subspace::from_rows(
                    self.field().clone(),
                    vec![v.to_vec()],
                )?)?;
            }
        }
        debug_assert_eq!(running.dim(), sup.dim());
        if chosen.is_empty() {
            return Ok(Matrix::zeros(self.field().clone(), 0, self.ambient()));
        }
        Matrix::from_rows(self.field().clone(), chosen)
    }

    /// A complement of `self` in the full ambient space.
    pub fn complement_total(&self) -> Matrix {
        self.complement_in(&Subspace::full(self.field().clone(), self.ambient()))
            .expect("every subspace sits inside the full space")
    }

    /// Normalized representatives (first nonzero coordinate 1) of the
    /// projective points of this subspace, as ambient vectors.
    pub fn projective_points(&self) -> Vec<Vec<FieldElement>> {
        let f = self.field().clone();
        let d = self.dim();
        let q = f.order() as u64;
        let mut out = Vec::new();
        // Normalized coordinate vectors: position of the leading 1, then
        // arbitrary later coordinates.
        for lead in 0..d {
            let free = d - lead - 1;
            let count = q.pow(free as u32);
            for code in 0..count {
                let mut coords = vec![FieldElement::ZERO; d];
                coords[lead] = FieldElement::ONE;
                let mut c = code;
                for j in (lead + 1)..d {
                    coords[j] = f.el((c % q as u64) as u32);
                    c /= q as u64;
                }
                out.push(self.basis.mul_row(&coords).expect("coords match dim"));
            }
        }
        out
    }

    /// Every vector of the subspace (use only for small dimensions).
    pub fn vectors(&self) -> Vec<Vec<FieldElement>> {
        let f = self.field().clone();
        let d = self.dim();
        let q = f.order() as u64;
        let total = q.pow(d as u32);
        let mut out = Vec::with_capacity(total as usize);
        for code in 0..total {
            let mut coords = vec![FieldElement::ZERO; d];
            let mut c = code;
            for coord in coords.iter_mut() {
                *coord = f.el((c % q) as u32);
                c /= q;
            }
            out.push(self.basis.mul_row(&coords).expect("coords match dim"));
        }
        out
    }

    /// A uniformly random subspace of the given dimension (rejection
    /// sampling on random spanning matrices; fine for tests).
    pub fn random<R: Rng + ?Sized>(
        field: &Arc<Field>,
        ambient: usize,
        dim: usize,
        rng: &mut R,
    ) -> Subspace {
        assert!(dim <= ambient);
        if dim == 0 {
            return Subspace::zero(field.clone(), ambient);
        }
        loop {
            let m = Matrix::from_fn(field.clone(), dim, ambient, |_, _| {
                field.random_element(rng)
            });
            let s = Subspace::from_matrix(&m);
            if s.dim() == dim {
                return s;
            }
        }
    }
}

/// Number of `k`-dimensional subspaces of `F_q^n` (Gaussian binomial),
/// saturating at `u128::MAX`.
pub fn subspace_count(q: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut result: u128 = 1;
    for i in 0..k {
        let num = match (q as u128).checked_pow((n - i) as u32) {
            Some(x) => x - 1,
            None => return u128::MAX,
        };
        let den = (q as u128).pow((i + 1) as u32) - 1;
        match result.checked_mul(num) {
            Some(x) => result = x / den,
            None => return u128::MAX,
        }
    }
    result
}

/// Iterator over all `dim`-dimensional subspaces of `F^ambient` in the
/// canonical deterministic order.
pub struct SubspaceIter {
    field: Arc<Field>,
    ambient: usize,
    dim: usize,
    pattern: Option<Vec<usize>>,
    /// Free positions (row, col) of the current pattern in row-major order.
    free: Vec<(usize, usize)>,
    counter: u64,
    count_for_pattern: u64,
}

pub fn all_subspaces(field: &Arc<Field>, ambient: usize, dim: usize) -> SubspaceIter {
    let pattern: Option<Vec<usize>> = if dim <= ambient {
        Some((0..dim).collect())
    } else {
        None
    };
    let mut it = SubspaceIter {
        field: field.clone(),
        ambient,
        dim,
        pattern,
        free: Vec::new(),
        counter: 0,
        count_for_pattern: 0,
    };
    it.prepare_pattern();
    it
}

impl SubspaceIter {
    fn prepare_pattern(&mut self) {
        let Some(p) = &self.pattern else {
            return;
        };
        self.free.clear();
        for (i, &pc) in p.iter().enumerate() {
            for c in (pc + 1)..self.ambient {
                if !p.contains(&c) {
                    self.free.push((i, c));
                }
            }
        }
        let q = self.field.order() as u64;
        self.count_for_pattern = q.pow(self.free.len() as u32);
        self.counter = 0;
    }

    fn advance_pattern(&mut self) {
        // Lexicographically next combination of `dim` columns out of `ambient`.
        let Some(p) = &mut self.pattern else {
            return;
        };
        let k = p.len();
        if k == 0 {
            self.pattern = None;
            return;
        }
        let n = self.ambient;
        let mut i = k;
        loop {
            if i == 0 {
                self.pattern = None;
                return;
            }
            i -= 1;
            if p[i] != i + n - k {
                break;
            }
        }
        p[i] += 1;
        for j in i + 1..k {
            p[j] = p[j - 1] + 1;
        }
        self.prepare_pattern();
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        let pattern = self.pattern.clone()?;
        if self.dim == 0 {
            // Single item: the zero subspace.
            self.pattern = None;
            return Some(Subspace::zero(self.field.clone(), self.ambient));
        }
        let q = self.field.order() as u64;
        let mut m = Matrix::zeros(self.field.clone(), self.dim, self.ambient);
        for (i, &pc) in pattern.iter().enumerate() {
            m.set(i, pc, FieldElement::ONE);
        }
        let mut c = self.counter;
        for &(r, col) in &self.free {
            m.set(r, col, self.field.el((c % q) as u32));
            c /= q;
        }
        let item = Subspace::from_rref_unchecked(m, pattern);
        self.counter += 1;
        if self.counter == self.count_for_pattern {
            self.advance_pattern();
        }
        Some(item)
    }
}

/// A chart for the quotient `sup / sub` given by a chosen complement `A`
/// (so `sub ⊕ A = sup`): identifies the interval `[sub, sup]` of the
/// subspace lattice with the subspace lattice of `F^(dim A)`.
#[derive(Clone, Debug)]
pub struct QuotientChart {
    sub: Subspace,
    sup: Subspace,
    complement: Matrix,
}

impl QuotientChart {
    pub fn new(sub: Subspace, sup: Subspace) -> Result<QuotientChart> {
        let complement = sub.complement_in(&sup)?;
        Ok(QuotientChart {
            sub,
            sup,
            complement,
        })
    }

    /// Use an externally chosen complement (validated).
    pub fn with_complement(sub: Subspace, sup: Subspace, complement: Matrix) -> Result<QuotientChart> {
        if complement.cols() != sub.ambient() {
            return Err(Error::DimensionMismatch {
                context: "chart complement ambient",
                left: complement.cols(),
                right: sub.ambient(),
            });
        }
        let a = Subspace::from_matrix(&complement);
        if a.dim() != complement.rows() {
            return Err(Error::pre("chart complement rows are dependent"));
        }
        if !a.intersect(&sub)?.is_zero() {
            return Err(Error::pre("chart complement meets the subspace"));
        }
        let span = a.sum(&sub)?;
        if span != sup {
            return Err(Error::pre("chart complement does not span the quotient"));
        }
        Ok(QuotientChart {
            sub,
            sup,
            complement,
        })
    }

    /// Chart onto `V / sub` for the full ambient space.
    pub fn total(sub: Subspace) -> QuotientChart {
        let ambient = sub.ambient();
        let full = Subspace::full(sub.field().clone(), ambient);
        QuotientChart::new(sub, full).expect("total quotient always exists")
    }

    pub fn sub(&self) -> &Subspace {
        &self.sub
    }

    pub fn sup(&self) -> &Subspace {
        &self.sup
    }

    pub fn complement(&self) -> &Matrix {
        &self.complement
    }

    /// Dimension of the quotient.
    pub fn dim(&self) -> usize {
        self.complement.rows()
    }

    /// Coordinates of `v ∈ sup` in the complement basis, modulo `sub`.
    pub fn project_vector(&self, v: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let stacked = self.sub.basis().vstack(&self.complement)?;
        let x = stacked.solve_left_vec(v)?;
        Ok(x[self.sub.dim()..].to_vec())
    }

    /// Lift quotient coordinates to the distinguished representative in `A`.
    pub fn lift_vector(&self, coords: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.complement.mul_row(coords)
    }

    /// Image of a subspace `sub ≤ W ≤ sup` in the chart.
    pub fn project_subspace(&self, w: &Subspace) -> Result<Subspace> {
        if !w.contains(&self.sub) || !self.sup.contains(w) {
            return Err(Error::pre("project_subspace: W outside [sub, sup]"));
        }
        let d = self.dim();
        if w.dim() == self.sub.dim() {
            return Ok(Subspace::zero(self.sub.field().clone(), d));
        }
        let mut rows = Vec::with_capacity(w.dim());
        for i in 0..w.dim() {
            rows.push(self.project_vector(w.basis().row(i))?);
        }
        Subspace::from_rows(self.sub.field().clone(), rows)
    }

    /// Preimage of a chart subspace: contains `sub`, contained in `sup`.
    pub fn lift_subspace(&self, s: &Subspace) -> Result<Subspace> {
        if s.ambient() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "lift_subspace ambient",
                left: s.ambient(),
                right: self.dim(),
            });
        }
        let mut rows: Vec<Vec<FieldElement>> = Vec::new();
        for i in 0..self.sub.dim() {
            rows.push(self.sub.basis().row_vec(i));
        }
        for i in 0..s.dim() {
            rows.push(self.lift_vector(s.basis().row(i))?);
        }
        if rows.is_empty() {
            return Ok(Subspace::zero(self.sub.field().clone(), self.sub.ambient()));
        }
        Subspace::from_rows(self.sub.field().clone(), rows)
    }
}
