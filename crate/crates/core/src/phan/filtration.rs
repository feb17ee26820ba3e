//! A filtration of a B/C geometry relative to a pivot point.
//!
//! Fix a point `p` of the geometry whose top forms are all non-degenerate
//! on it. Members are layered as `Y_0 ⊆ Y_1 ⊆ … ⊆ Y_2n = Γ`:
//!
//! * `Z` — members `U` with `⟨p, U⟩` transversal to every `(F_j, ω_j)`;
//! * `Y_0` — members of `Z` with `U ∩ p^⊥` and `⟨U ∩ p^⊥, p⟩` in `Γ`;
//! * stages `1..n` add the `Z`-members of that dimension;
//! * stages `n+1..2n` add the remaining members by descending dimension.
//!
//! For a member attached at stage `i ≥ 1`, the part of its link already
//! present in `Y_{i−1}` is described by geometries on the quotient
//! `U^⊥/U` (upward) and by a transversality predicate (downward); this
//! module assembles those descriptions.

use rand::Rng;

use crate::error::{Error, Result};
use crate::form::Form;
use crate::matrix::Matrix;
use crate::subspace::{all_subspaces, QuotientChart, Subspace};

use super::quotient::{project_flag, transfer_flag_perp, ProjectionMode, QuotientFlagData};
use super::{
    is_transversal_to_pair, scan_witness, CompatibleFamily, Flag, Geometry, GeometryKind,
    GeometrySpec, DEFAULT_WITNESS_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageResult {
    /// Not a member of the geometry at all.
    NotMember,
    /// The least `i` such that the member lies in `Y_i`.
    Stage(usize),
}

#[derive(Debug, Clone)]
pub struct FiltrationContext {
    geometry: Geometry,
    pivot: Subspace,
    pivot_perp: Subspace,
    n: usize,
}

impl FiltrationContext {
    /// Deterministic pivot: the first point in enumeration order that is
    /// ambient-isotropic and non-degenerate for the top form of every
    /// component.
    pub fn new(geometry: Geometry) -> Result<FiltrationContext> {
        Self::with_scan_budget(geometry, DEFAULT_WITNESS_BUDGET)
    }

    pub fn with_scan_budget(geometry: Geometry, budget: u64) -> Result<FiltrationContext> {
        let ambient = Self::require_bc(&geometry)?;
        let tops: Vec<Form> = geometry
            .components()
            .iter()
            .map(|c| c.family().top().clone())
            .collect();
        let Some(v) = scan_witness(&ambient, &tops, budget)? else {
            return Err(Error::pre(
                "no pivot point: every isotropic point is isotropic for some top form",
            ));
        };
        let pivot = Subspace::line(geometry.field().clone(), &v)?;
        Self::with_pivot(geometry, pivot)
    }

    /// Use a caller-chosen pivot (validated).
    pub fn with_pivot(geometry: Geometry, pivot: Subspace) -> Result<FiltrationContext> {
        let ambient = Self::require_bc(&geometry)?;
        if pivot.dim() != 1 || pivot.ambient() != geometry.ambient_dim() {
            return Err(Error::pre("pivot must be a point of the ambient space"));
        }
        let v = pivot.basis().row_vec(0);
        if !ambient.is_isotropic_vector(&v)? {
            return Err(Error::pre("pivot must be ambient-isotropic"));
        }
        for c in geometry.components() {
            if c.family().top().eval(&v, &v)?.is_zero() {
                return Err(Error::pre(
                    "pivot must be non-isotropic for every component's top form",
                ));
            }
        }
        debug_assert!(
            geometry.membership(&pivot)?,
            "a valid pivot is itself a member"
        );
        let pivot_perp = ambient.perp(&pivot)?;
        let n = geometry.rank();
        Ok(FiltrationContext {
            geometry,
            pivot,
            pivot_perp,
            n,
        })
    }

    /// Random pivot among all valid ones (for robustness sweeps).
    pub fn with_random_pivot<R: Rng + ?Sized>(
        geometry: Geometry,
        rng: &mut R,
    ) -> Result<FiltrationContext> {
        let ambient = Self::require_bc(&geometry)?;
        let field = geometry.field().clone();
        let full = Subspace::full(field.clone(), geometry.ambient_dim());
        let mut candidates = Vec::new();
        'pts: for v in full.projective_points() {
            if !ambient.is_isotropic_vector(&v)? {
                continue;
            }
            for c in geometry.components() {
                if c.family().top().eval(&v, &v)?.is_zero() {
                    continue 'pts;
                }
            }
            candidates.push(v);
        }
        if candidates.is_empty() {
            return Err(Error::pre(
                "no pivot point: every isotropic point is isotropic for some top form",
            ));
        }
        let v = &candidates[rng.gen_range(0..candidates.len())];
        Self::with_pivot(geometry, Subspace::line(field, v)?)
    }

    fn require_bc(geometry: &Geometry) -> Result<Form> {
        match geometry.kind() {
            GeometryKind::B | GeometryKind::C => Ok(geometry
                .ambient_form()
                .expect("B/C geometries carry an ambient form")
                .clone()),
            GeometryKind::A => Err(Error::Unsupported(
                "the pivot filtration is defined for types B and C only".into(),
            )),
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn pivot(&self) -> &Subspace {
        &self.pivot
    }

    pub fn pivot_perp(&self) -> &Subspace {
        &self.pivot_perp
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// Largest stage index; `Y_max = Γ`.
    pub fn max_stage(&self) -> usize {
        2 * self.n
    }

    fn ambient_form(&self) -> &Form {
        self.geometry
            .ambient_form()
            .expect("B/C geometries carry an ambient form")
    }

    /// `U ∈ Z`: member with `⟨p, U⟩` transversal to every `(F_j, ω_j)`.
    /// Assumes membership of `u` has already been established.
    pub fn in_z(&self, u: &Subspace) -> Result<bool> {
        let span = u.sum(&self.pivot)?;
        for c in self.geometry.components() {
            if !is_transversal_to_pair(&span, c.flag(), c.family())? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `U ∈ Y_0`: in `Z`, with `U ∩ p^⊥` and `⟨U ∩ p^⊥, p⟩` both members.
    pub fn in_y0(&self, u: &Subspace) -> Result<bool> {
        if !self.in_z(u)? {
            return Ok(false);
        }
        let cut = u.intersect(&self.pivot_perp)?;
        if !self.geometry.membership(&cut)? {
            return Ok(false);
        }
        self.geometry.membership(&cut.sum(&self.pivot)?)
    }

    /// The least `i` with `U ∈ Y_i`, or `NotMember`.
    pub fn stage(&self, u: &Subspace) -> Result<StageResult> {
        if !self.geometry.membership(u)? {
            return Ok(StageResult::NotMember);
        }
        if self.in_y0(u)? {
            return Ok(StageResult::Stage(0));
        }
        if self.in_z(u)? {
            return Ok(StageResult::Stage(u.dim()));
        }
        Ok(StageResult::Stage(2 * self.n + 1 - u.dim()))
    }

    /// All members bucketed by stage (`0..=2n`).
    pub fn members_by_stage(&self, budget: u64) -> Result<Vec<Vec<Subspace>>> {
        let vertices = self.geometry.vertices(budget)?;
        let mut buckets = vec![Vec::new(); self.max_stage() + 1];
        for u in vertices.iter_all() {
            match self.stage(u)? {
                StageResult::Stage(s) => buckets[s].push(u.clone()),
                StageResult::NotMember => unreachable!("vertices are members"),
            }
        }
        Ok(buckets)
    }

    /// Lower-link predicate at any stage `≥ 1`: nonzero `W < U` such that
    /// both `W` and `⟨p, W⟩` are transversal to every `(F_j, ω_j)`.
    pub fn lower_link_contains(&self, u: &Subspace, w: &Subspace) -> Result<bool> {
        if w.is_zero() || w == u || !u.contains(w) {
            return Ok(false);
        }
        let span = w.sum(&self.pivot)?;
        for c in self.geometry.components() {
            if !is_transversal_to_pair(w, c.flag(), c.family())?
                || !is_transversal_to_pair(&span, c.flag(), c.family())?
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All lower-link members of `u` (the predicate evaluated over every
    /// proper nonzero subspace of `u`).
    pub fn lower_link_members(&self, u: &Subspace) -> Result<Vec<Subspace>> {
        let zero = Subspace::zero(u.field().clone(), u.ambient());
        let chart = QuotientChart::new(zero, u.clone())?;
        let mut out = Vec::new();
        for d in 1..u.dim() {
            for wq in all_subspaces(u.field(), u.dim(), d) {
                let w = chart.lift_subspace(&wq)?;
                if self.lower_link_contains(u, &w)? {
                    out.push(w);
                }
            }
        }
        Ok(out)
    }

    /// Upper-link description for a member at its computed stage.
    pub fn upper_link_specs(&self, u: &Subspace) -> Result<LinkSpecs> {
        match self.stage(u)? {
            StageResult::NotMember => Err(Error::pre("upper link requested for a non-member")),
            StageResult::Stage(0) => Err(Error::pre(
                "upper links are described only at stages 1 and above",
            )),
            StageResult::Stage(s) => self.upper_link_specs_at(u, s),
        }
    }

    /// As `upper_link_specs`, but errors unless the member's stage is the
    /// expected one.
    pub fn upper_link_specs_expecting(
        &self,
        u: &Subspace,
        expected_stage: usize,
    ) -> Result<LinkSpecs> {
        match self.stage(u)? {
            StageResult::Stage(s) if s == expected_stage => (),
            StageResult::Stage(s) => {
                return Err(Error::pre(format!(
                    "member sits at stage {s}, not the expected stage {expected_stage}"
                )))
            }
            StageResult::NotMember => {
                return Err(Error::pre("upper link requested for a non-member"))
            }
        }
        if expected_stage == 0 {
            return Err(Error::pre(
                "upper links are described only at stages 1 and above",
            ));
        }
        self.upper_link_specs_at(u, expected_stage)
    }

    fn upper_link_specs_at(&self, u: &Subspace, stage: usize) -> Result<LinkSpecs> {
        let ambient = self.ambient_form();
        let field = u.field().clone();
        let u_perp = ambient.perp(u)?;
        let r = u_perp.dim() - u.dim();
        let kind = self.geometry.kind();

        // Choose the common complement: inside p^⊥ at the Z-stages (where
        // the four-pair description needs it), plain otherwise.
        let complement = if stage <= self.n {
            let cut = u.intersect(&self.pivot_perp)?;
            let perp_cut = u_perp.intersect(&self.pivot_perp)?;
            cut.complement_in(&perp_cut)?
        } else {
            u.complement_in(&u_perp)?
        };
        let chart = QuotientChart::with_complement(u.clone(), u_perp.clone(), complement)?;

        if r <= 1 {
            // A quotient of dimension ≤ 1 has no nonzero totally isotropic
            // subspaces, so the upper link is empty and carries no specs.
            let gram = chart
                .complement()
                .mul(ambient.gram())?
                .mul(&chart.complement().sigma_transpose(ambient.sigma())?)?;
            let quotient_ambient = Form::new(gram, ambient.sigma(), ambient.epsilon())?;
            return Ok(LinkSpecs {
                stage,
                chart,
                quotient_ambient,
                specs: Vec::new(),
                trivially_empty: true,
            });
        }

        // Interval pairs whose projections describe the upper link.
        let mut pairs: Vec<(Subspace, Subspace, ProjectionMode)> = Vec::new();
        pairs.push((u.clone(), u_perp.clone(), ProjectionMode::Strict));
        if stage <= self.n {
            let cut = u.intersect(&self.pivot_perp)?;
            let perp_cut = u_perp.intersect(&self.pivot_perp)?;
            pairs.push((
                u.sum(&self.pivot)?,
                u_perp.sum(&self.pivot)?,
                ProjectionMode::Generalized,
            ));
            pairs.push((cut.clone(), perp_cut.clone(), ProjectionMode::Generalized));
            pairs.push((
                cut.sum(&self.pivot)?,
                perp_cut.sum(&self.pivot)?,
                ProjectionMode::Generalized,
            ));
        }

        // The induced ambient form on the common chart, certified once per
        // component below via the strict pair.
        let gram = chart
            .complement()
            .mul(ambient.gram())?
            .mul(&chart.complement().sigma_transpose(ambient.sigma())?)?;
        let quotient_ambient = Form::new(gram, ambient.sigma(), ambient.epsilon())?;

        let mut raw_specs: Vec<GeometrySpec> = Vec::new();
        for component in self.geometry.components() {
            for (sub, sup, mode) in &pairs {
                let qd = project_flag(sub, sup, component.flag(), component.family(), *mode)?;
                if *mode == ProjectionMode::Strict {
                    transfer_flag_perp(&qd, ambient, DEFAULT_WITNESS_BUDGET)?;
                }
                raw_specs.push(self.transport_spec(&qd, &chart, &quotient_ambient, kind, &field)?);
            }
        }

        // Deduplicate, recording multiplicity.
        let mut specs: Vec<(GeometrySpec, usize)> = Vec::new();
        for s in raw_specs {
            if let Some(entry) = specs.iter_mut().find(|(t, _)| *t == s) {
                entry.1 += 1;
            } else {
                specs.push((s, 1));
            }
        }

        Ok(LinkSpecs {
            stage,
            chart,
            quotient_ambient,
            specs,
            trivially_empty: false,
        })
    }

    /// Express a projected flag/family in the coordinates of the common
    /// chart and package it as a geometry spec on the quotient.
    fn transport_spec(
        &self,
        qd: &QuotientFlagData,
        common: &QuotientChart,
        quotient_ambient: &Form,
        kind: GeometryKind,
        field: &std::sync::Arc<crate::field::Field>,
    ) -> Result<GeometrySpec> {
        let r = common.dim();
        if qd.dim() != r {
            return Err(Error::DimensionMismatch {
                context: "link pair quotient dimension",
                left: qd.dim(),
                right: r,
            });
        }
        // L maps common coordinates to the pair's own chart coordinates.
        let mut l = Matrix::zeros(field.clone(), r, r);
        for t in 0..r {
            let coords = qd.chart().project_vector(&common.complement().row_vec(t))?;
            for (c, val) in coords.into_iter().enumerate() {
                l.set(t, c, val);
            }
        }
        let l_inv = l
            .inverse()
            .map_err(|_| Error::pre("common chart does not span the link pair's interval"))?;

        let mut members = Vec::with_capacity(qd.flag().members().len());
        for m in qd.flag().members() {
            members.push(Subspace::from_matrix(&m.basis().mul(&l_inv)?));
        }
        let flag = Flag::new(members)?;
        let mut forms = Vec::with_capacity(qd.family().len());
        for i in 1..=qd.family().len() {
            let g = qd.family().form(i);
            let gram = l.mul(g.gram())?.mul(&l.sigma_transpose(g.sigma())?)?;
            forms.push(Form::new(gram, g.sigma(), g.epsilon())?);
        }
        let family = CompatibleFamily::new(&flag, forms)?;
        GeometrySpec::new_bc(kind, quotient_ambient.clone(), flag, family)
    }
}

/// Upper-link description: geometry specs on the quotient `U^⊥/U`,
/// expressed in one shared chart, deduplicated with multiplicities.
#[derive(Debug, Clone)]
pub struct LinkSpecs {
    pub stage: usize,
    pub chart: QuotientChart,
    pub quotient_ambient: Form,
    pub specs: Vec<(GeometrySpec, usize)>,
    trivially_empty: bool,
}

impl LinkSpecs {
    /// Number of spec instances before deduplication.
    pub fn total_multiplicity(&self) -> usize {
        self.specs.iter().map(|(_, m)| m).sum()
    }

    /// True when the quotient is too small to carry any member at all.
    pub fn is_trivially_empty(&self) -> bool {
        self.trivially_empty
    }

    /// Members of the intersection of all specs, in quotient coordinates.
    pub fn upper_members(&self) -> Result<Vec<Subspace>> {
        if self.trivially_empty {
            return Ok(Vec::new());
        }
        let field = self.quotient_ambient.field().clone();
        let r = self.chart.dim();
        let maxd = self
            .specs
            .first()
            .map(|(s, _)| s.max_member_dim())
            .unwrap_or(0);
        let mut out = Vec::new();
        for d in 1..=maxd {
            'subs: for w in all_subspaces(&field, r, d) {
                for (spec, _) in &self.specs {
                    if !spec.membership(&w)? {
                        continue 'subs;
                    }
                }
                out.push(w);
            }
        }
        Ok(out)
    }

    /// Members lifted back to the ambient space (subspaces over `U`).
    pub fn upper_members_ambient(&self) -> Result<Vec<Subspace>> {
        self.upper_members()?
            .into_iter()
            .map(|w| self.chart.lift_subspace(&w))
            .collect()
    }
}
