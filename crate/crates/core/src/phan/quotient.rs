//! Projecting a flag-with-forms onto the quotient of an interval `[U, U′]`.
//!
//! Given `U ≤ U′` in suitable position relative to `(F, ω)`, the induced
//! flag `F′` on `U′/U` has members `V′_i = ((V_i + U) ∩ U′)/U` and carries
//! induced forms read off on a complement `A` of `U` in `U′` chosen so that
//! `U′ ∩ V_i = (A ∩ V_i) ⊕ (U ∩ V_i)` is `ω_i`-orthogonal at every index.
//! Membership in the source geometry then corresponds, across the interval,
//! to membership in the projected geometry.

use crate::error::{Error, Result};
use crate::form::Form;
use crate::matrix::Matrix;
use crate::subspace::{subspace_count, all_subspaces, QuotientChart, Subspace};

use super::{
    is_almost_transversal, is_nearly_transversal, is_transversal_to_flag,
    is_transversal_to_pair, CompatibleFamily, Flag,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMode {
    /// `U` transversal to `(F, ω)`, `U′` transversal to `F`.
    Strict,
    /// `U` almost transversal to `(F, ω)`, `U′` nearly transversal to `F`,
    /// and `dim U′ − dim U ≥ 2`.
    Generalized,
}

/// The result of projecting `(F, ω)` onto `U′/U`.
#[derive(Debug, Clone)]
pub struct QuotientFlagData {
    u: Subspace,
    usup: Subspace,
    /// `max{i : (V_i + U) ∩ U′ = U}`.
    m_index: usize,
    /// `min{i : (V_i + U) ∩ U′ = U′}`.
    big_m_index: usize,
    chart: QuotientChart,
    flag: Flag,
    family: CompatibleFamily,
}

impl QuotientFlagData {
    pub fn u(&self) -> &Subspace {
        &self.u
    }

    pub fn usup(&self) -> &Subspace {
        &self.usup
    }

    pub fn m_index(&self) -> usize {
        self.m_index
    }

    pub fn big_m_index(&self) -> usize {
        self.big_m_index
    }

    pub fn chart(&self) -> &QuotientChart {
        &self.chart
    }

    pub fn flag(&self) -> &Flag {
        &self.flag
    }

    pub fn family(&self) -> &CompatibleFamily {
        &self.family
    }

    /// Quotient dimension `dim U′ − dim U`.
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Coordinates of `W ∈ [U, U′]` in the quotient.
    pub fn project_member(&self, w: &Subspace) -> Result<Subspace> {
        self.chart.project_subspace(w)
    }
}

/// Project `(F, ω)` onto `U′/U`. The mode selects which transversality
/// hypotheses are demanded of `U` and `U′`; each is checked and a violation
/// is reported by name.
pub fn project_flag(
    u: &Subspace,
    usup: &Subspace,
    flag: &Flag,
    family: &CompatibleFamily,
    mode: ProjectionMode,
) -> Result<QuotientFlagData> {
    if !usup.contains(u) {
        return Err(Error::pre("projection needs U ≤ U′"));
    }
    if u.ambient() != flag.ambient() {
        return Err(Error::DimensionMismatch {
            context: "projection ambient",
            left: u.ambient(),
            right: flag.ambient(),
        });
    }
    match mode {
        ProjectionMode::Strict => {
            if !is_transversal_to_pair(u, flag, family)? {
                return Err(Error::pre("strict projection: U is not transversal to (F, ω)"));
            }
            if !is_transversal_to_flag(usup, flag)? {
                return Err(Error::pre("strict projection: U′ is not transversal to F"));
            }
        }
        ProjectionMode::Generalized => {
            if usup.dim() - u.dim() < 2 {
                return Err(Error::pre(
                    "generalized projection: dim U′ − dim U must be at least 2",
                ));
            }
            if !is_almost_transversal(u, flag, Some(family))? {
                return Err(Error::pre(
                    "generalized projection: U is not almost transversal to (F, ω)",
                ));
            }
            if !is_nearly_transversal(usup, flag)? {
                return Err(Error::pre(
                    "generalized projection: U′ is not nearly transversal to F",
                ));
            }
        }
    }

    let field = u.field().clone();
    let k = flag.k();

    // meets[i] = (V_i + U) ∩ U′, increasing from U to U′.
    let mut meets = Vec::with_capacity(k + 1);
    for i in 0..=k {
        meets.push(u.sum(flag.member(i))?.intersect(usup)?);
    }
    let m_index = (0..=k).rev().find(|&i| meets[i] == *u).ok_or_else(|| {
        Error::pre("no index with (V_i + U) ∩ U′ = U; is the flag well formed?")
    })?;
    let big_m_index = (0..=k)
        .find(|&i| meets[i] == *usup)
        .ok_or_else(|| Error::pre("no index with (V_i + U) ∩ U′ = U′"))?;

    let r = usup.dim() - u.dim();
    if r == 0 {
        // Degenerate interval: zero quotient, empty flag data.
        let chart = QuotientChart::with_complement(
            u.clone(),
            usup.clone(),
            Matrix::zeros(field.clone(), 0, u.ambient()),
        )?;
        let qflag = Flag::new(vec![Subspace::zero(field.clone(), 0)])?;
        let qfamily = CompatibleFamily::new(&qflag, vec![])?;
        return Ok(QuotientFlagData {
            u: u.clone(),
            usup: usup.clone(),
            m_index,
            big_m_index,
            chart,
            flag: qflag,
            family: qfamily,
        });
    }

    // Build the complement A step by step: at index i it must complement
    // U ∩ V_i inside U′ ∩ V_i while staying ω_i-orthogonal to it. Earlier
    // steps remain valid because V_{i−1} lies in the radical of ω_i.
    let mut a = Subspace::zero(field.clone(), u.ambient());
    for i in 1..=big_m_index {
        let y_i = usup.intersect(flag.member(i))?;
        let w_i = u.intersect(flag.member(i))?;
        let p_i = family.form(i).perp(&w_i)?.intersect(&y_i)?;
        if p_i.sum(&w_i)?.dim() != y_i.dim() {
            return Err(Error::pre(format!(
                "projection blocked at index {i}: the ω_{i}-perp of U ∩ V_{i} \
                 does not cover U′ ∩ V_{i} modulo U"
            )));
        }
        let mut s = a.sum(&w_i)?;
        for row_idx in 0..p_i.dim() {
            if s.dim() == y_i.dim() {
                break;
            }
            let v = p_i.basis().row_vec(row_idx);
            if !s.contains_vector(&v) {
                let line = Subspace::line(field.clone(), &v)?;
                a = a.sum(&line)?;
                s = s.sum(&line)?;
            }
        }
        debug_assert_eq!(s.dim(), y_i.dim(), "greedy extension must fill U′ ∩ V_i");
    }
    if a.dim() != r {
        return Err(Error::pre(
            "complement construction did not reach the full quotient dimension",
        ));
    }

    let chart = QuotientChart::with_complement(u.clone(), usup.clone(), a.basis().clone())?;

    // Quotient flag members with duplicate runs collapsed; each surviving
    // member keeps the form of the first index of its run.
    let mut members = vec![Subspace::zero(field.clone(), r)];
    let mut forms: Vec<Form> = Vec::new();
    let mut last = members[0].clone();
    for (i, meet) in meets.iter().enumerate().take(big_m_index + 1).skip(m_index + 1) {
        let vq = chart.project_subspace(meet)?;
        if vq == last {
            continue;
        }
        // Read ω_i off lifted representatives, which land in A ∩ V_i.
        let basis = vq.basis();
        let kdim = basis.rows();
        let mut lifts = Vec::with_capacity(kdim);
        for t in 0..kdim {
            lifts.push(chart.lift_vector(&basis.row_vec(t))?);
        }
        let omega = family.form(i);
        let mut values = Matrix::zeros(field.clone(), kdim, kdim);
        for s in 0..kdim {
            for t in 0..kdim {
                values.set(s, t, omega.eval(&lifts[s], &lifts[t])?);
            }
        }
        let qform = Form::from_values_on_basis(basis, &values, omega.sigma(), field.one())?;
        members.push(vq.clone());
        forms.push(qform);
        last = vq;
    }
    let qflag = Flag::new(members)?;
    let qfamily = CompatibleFamily::new(&qflag, forms).map_err(|e| {
        Error::pre(format!("projected family violates the radical chain: {e}"))
    })?;

    Ok(QuotientFlagData {
        u: u.clone(),
        usup: usup.clone(),
        m_index,
        big_m_index,
        chart,
        flag: qflag,
        family: qfamily,
    })
}

// ---------------------------------------------------------------------------
// Perp transfer to the quotient
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PerpTransfer {
    /// The ambient form induced on `U′/U` by reading the original form on
    /// complement representatives.
    pub quotient_form: Form,
    /// Number of interval members the perp identity was verified on.
    pub checked: u64,
}

/// Induce `ambient` on the quotient chart of `data` and certify, for every
/// `W` in `[U, U′]` (up to `check_budget` subspaces), that perps commute
/// with projection: `((W^⊥ + U) ∩ U′)/U = (W/U)^⊥` in the quotient form.
pub fn transfer_flag_perp(
    data: &QuotientFlagData,
    ambient: &Form,
    check_budget: u64,
) -> Result<PerpTransfer> {
    let u = data.u();
    let usup = data.usup();
    if ambient.dim() != u.ambient() {
        return Err(Error::DimensionMismatch {
            context: "perp transfer ambient",
            left: ambient.dim(),
            right: u.ambient(),
        });
    }
    if !ambient.is_nondegenerate() {
        return Err(Error::pre("perp transfer needs a non-degenerate ambient form"));
    }
    if !ambient.perp(u)?.contains(usup) {
        return Err(Error::pre(
            "perp transfer needs U′ ≤ U^⊥, otherwise the quotient form is ill-defined",
        ));
    }
    let field = u.field().clone();
    let r = data.dim();
    let a = data.chart().complement();
    let gram = a.mul(ambient.gram())?.mul(&a.sigma_transpose(ambient.sigma())?)?;
    let quotient_form = Form::new(gram, ambient.sigma(), ambient.epsilon())?;

    // Certification sweep over the interval.
    let q = field.order() as u64;
    let mut total: u128 = 0;
    for d in 0..=r {
        total += subspace_count(q, r, d);
    }
    if total > check_budget as u128 {
        return Err(Error::Budget {
            what: "perp transfer certification",
            needed: total.min(u64::MAX as u128) as u64,
            budget: check_budget,
        });
    }
    let mut checked = 0u64;
    for d in 0..=r {
        for wq in all_subspaces(&field, r, d) {
            let w = data.chart().lift_subspace(&wq)?;
            let lhs = data
                .chart()
                .project_subspace(&ambient.perp(&w)?.sum(u)?.intersect(usup)?)?;
            let rhs = quotient_form.perp(&wq)?;
            if lhs != rhs {
                return Err(Error::pre(format!(
                    "perp transfer identity failed on a {d}-dimensional member",
                )));
            }
            checked += 1;
        }
    }
    Ok(PerpTransfer {
        quotient_form,
        checked,
    })
}

// ---------------------------------------------------------------------------
// Dimension shifts between intervals
// ---------------------------------------------------------------------------

/// Auxiliary datum for a dimension shift: a hyperplane to intersect with,
/// or a point to join with.
#[derive(Debug, Clone, Copy)]
pub enum ShiftAux<'a> {
    /// `[U, U′] → [U ∩ H, U′ ∩ H]`, `W ↦ W ∩ H`; requires `U ⊄ H`.
    Hyperplane(&'a Subspace),
    /// `[U, U′] → [⟨U, p⟩, ⟨U′, p⟩]`, `W ↦ ⟨W, p⟩`; requires `p ⊄ U′`.
    Point(&'a Subspace),
}

/// An order isomorphism between two intervals realized by a shared
/// complement, so that corresponding members have identical coordinates.
#[derive(Debug, Clone)]
pub struct DimensionShift {
    source: QuotientChart,
    target: QuotientChart,
}

impl DimensionShift {
    pub fn new(u: &Subspace, usup: &Subspace, aux: ShiftAux<'_>) -> Result<DimensionShift> {
        if !usup.contains(u) {
            return Err(Error::pre("dimension shift needs U ≤ U′"));
        }
        match aux {
            ShiftAux::Hyperplane(h) => {
                if h.dim() + 1 != h.ambient() {
                    return Err(Error::pre("shift auxiliary must be a hyperplane"));
                }
                if h.contains(u) {
                    return Err(Error::pre("hyperplane shift needs U ⊄ H"));
                }
                let uh = u.intersect(h)?;
                let usuph = usup.intersect(h)?;
                let a = uh.complement_in(&usuph)?;
                let source =
                    QuotientChart::with_complement(u.clone(), usup.clone(), a.clone())?;
                let target = QuotientChart::with_complement(uh, usuph, a)?;
                Ok(DimensionShift { source, target })
            }
            ShiftAux::Point(p) => {
                if p.dim() != 1 {
                    return Err(Error::pre("shift auxiliary must be a point"));
                }
                if usup.contains(p) {
                    return Err(Error::pre("point shift needs p ⊄ U′"));
                }
                let up = u.sum(p)?;
                let usupp = usup.sum(p)?;
                let a = u.complement_in(usup)?;
                let source =
                    QuotientChart::with_complement(u.clone(), usup.clone(), a.clone())?;
                let target = QuotientChart::with_complement(up, usupp, a)?;
                Ok(DimensionShift { source, target })
            }
        }
    }

    pub fn source(&self) -> &QuotientChart {
        &self.source
    }

    pub fn target(&self) -> &QuotientChart {
        &self.target
    }

    /// Image of `W ∈ [U, U′]` under the shift (`W ∩ H` resp. `⟨W, p⟩`).
    pub fn forward(&self, w: &Subspace) -> Result<Subspace> {
        self.target.lift_subspace(&self.source.project_subspace(w)?)
    }

    /// Preimage of a member of the target interval.
    pub fn backward(&self, w: &Subspace) -> Result<Subspace> {
        self.source.lift_subspace(&self.target.project_subspace(w)?)
    }
}
