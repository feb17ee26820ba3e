//! Flag geometries: transversality, membership, enumeration.
//!
//! The objects here are triples (ambient space, flag `F`, form family `ω`)
//! over a finite field, in three flavours:
//!
//! * type `A` — a bare space; geometry members are proper nontrivial
//!   subspaces transversal to `(F, ω)`;
//! * type `B` — odd-dimensional space `F^{2n+1}` with a non-degenerate
//!   symmetric form (odd characteristic);
//! * type `C` — `F^{2n}` with a non-degenerate alternating form.
//!
//! For `B`/`C` the members are the nonzero totally isotropic subspaces
//! transversal to `(F, ω)`, and several such geometries over one ambient
//! model can be intersected.

pub mod filtration;
pub mod quotient;

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, Involution};
use crate::form::Form;
use crate::matrix::Matrix;
use crate::subspace::{all_subspaces, subspace_count, Subspace};

/// Default cap on exhaustive point scans performed during construction.
pub const DEFAULT_WITNESS_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeometryKind {
    A,
    B,
    C,
}

impl std::fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeometryKind::A => write!(f, "A"),
            GeometryKind::B => write!(f, "B"),
            GeometryKind::C => write!(f, "C"),
        }
    }
}

/// The standard ambient form for a kind/rank pair: alternating for `C_n`,
/// symmetric odd-dimensional for `B_n`, none for `A_n`.
pub fn ambient_model(kind: GeometryKind, n: usize, field: &Arc<Field>) -> Result<Option<Form>> {
    match kind {
        GeometryKind::A => Ok(None),
        GeometryKind::B => Ok(Some(Form::symmetric_odd_dim(field.clone(), n)?)),
        GeometryKind::C => Ok(Some(Form::symplectic(field.clone(), n))),
    }
}

/// Ambient dimension of the standard model.
pub fn ambient_dim(kind: GeometryKind, n: usize) -> usize {
    match kind {
        GeometryKind::A => n + 1,
        GeometryKind::B => 2 * n + 1,
        GeometryKind::C => 2 * n,
    }
}

// ---------------------------------------------------------------------------
// Flags
// ---------------------------------------------------------------------------

/// A strictly increasing chain of subspaces `0 = V_0 < V_1 < … < V_k = V`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Flag {
    spaces: Vec<Subspace>,
}

impl Flag {
    pub fn new(spaces: Vec<Subspace>) -> Result<Flag> {
        let Some(first) = spaces.first() else {
            return Err(Error::invalid("flag needs at least 0 and V"));
        };
        if !first.is_zero() {
            return Err(Error::invalid("flag must start at the zero subspace"));
        }
        if !spaces.last().unwrap().is_full() {
            return Err(Error::invalid("flag must end at the full space"));
        }
        for w in spaces.windows(2) {
            if !(w[1].contains(&w[0]) && w[1].dim() > w[0].dim()) {
                return Err(Error::invalid("flag members must strictly increase"));
            }
        }
        Ok(Flag { spaces })
    }

    /// The flag `0 < V`.
    pub fn trivial(field: Arc<Field>, ambient: usize) -> Flag {
        Flag {
            spaces: vec![
                Subspace::zero(field.clone(), ambient),
                Subspace::full(field, ambient),
            ],
        }
    }

    /// Build from the proper nontrivial members only.
    pub fn from_proper(field: Arc<Field>, ambient: usize, proper: Vec<Subspace>) -> Result<Flag> {
        let mut spaces = vec![Subspace::zero(field.clone(), ambient)];
        spaces.extend(proper);
        spaces.push(Subspace::full(field, ambient));
        Flag::new(spaces)
    }

    /// The index `k` of the top member.
    pub fn k(&self) -> usize {
        self.spaces.len() - 1
    }

    pub fn member(&self, i: usize) -> &Subspace {
        &self.spaces[i]
    }

    pub fn members(&self) -> &[Subspace] {
        &self.spaces
    }

    /// Members other than `0` and `V`.
    pub fn proper_members(&self) -> &[Subspace] {
        &self.spaces[1..self.spaces.len() - 1]
    }

    pub fn ambient(&self) -> usize {
        self.spaces[0].ambient()
    }

    pub fn field(&self) -> &Arc<Field> {
        self.spaces[0].field()
    }

    /// Whether the reversed list of perps equals the flag itself.
    pub fn is_self_perp(&self, form: &Form) -> Result<bool> {
        let k = self.k();
        for i in 0..=k {
            if form.perp(&self.spaces[k - i])? != self.spaces[i] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// ---------------------------------------------------------------------------
// Compatible form families
// ---------------------------------------------------------------------------

/// Forms `ω_1, …, ω_k` aligned with a flag: `ω_i` is carried by `V_i` and
/// its restriction to `V_i` has radical exactly `V_{i−1}`. Values of the
/// stored ambient gram outside `V_i` are never consulted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CompatibleFamily {
    forms: Vec<Form>,
    sigma: Involution,
}

impl CompatibleFamily {
    pub fn new(flag: &Flag, forms: Vec<Form>) -> Result<CompatibleFamily> {
        if forms.len() != flag.k() {
            return Err(Error::DimensionMismatch {
                context: "family length must equal flag length",
                left: forms.len(),
                right: flag.k(),
            });
        }
        let sigma = forms
            .first()
            .map(|f| f.sigma())
            .unwrap_or(Involution::Identity);
        for (j, form) in forms.iter().enumerate() {
            let i = j + 1;
            if form.sigma() != sigma {
                return Err(Error::invalid("family forms must share one involution"));
            }
            if form.epsilon() != form.field().one() {
                return Err(Error::invalid("family forms must be hermitian (ε = 1)"));
            }
            if form.dim() != flag.ambient() {
                return Err(Error::DimensionMismatch {
                    context: "family form ambient",
                    left: form.dim(),
                    right: flag.ambient(),
                });
            }
            let rad = form.radical_in(flag.member(i))?;
            if &rad != flag.member(i - 1) {
                return Err(Error::invalid(format!(
                    "form {i} has radical of dimension {} on V_{i}, expected V_{} of dimension {}",
                    rad.dim(),
                    i - 1,
                    flag.member(i - 1).dim()
                )));
            }
        }
        Ok(CompatibleFamily { forms, sigma })
    }

    /// `ω_i`, 1-based to match the flag indexing.
    pub fn form(&self, i: usize) -> &Form {
        &self.forms[i - 1]
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn sigma(&self) -> Involution {
        self.sigma
    }

    /// The top form `ω_k` (carried by the full space).
    pub fn top(&self) -> &Form {
        self.forms.last().expect("flags have k ≥ 1")
    }

    /// A random compatible family on the given flag.
    pub fn random<R: Rng + ?Sized>(
        flag: &Flag,
        sigma: Involution,
        rng: &mut R,
    ) -> Result<CompatibleFamily> {
        let mut forms = Vec::with_capacity(flag.k());
        for i in 1..=flag.k() {
            forms.push(random_form_with_radical(
                flag.member(i - 1),
                flag.member(i),
                sigma,
                rng,
            )?);
        }
        CompatibleFamily::new(flag, forms)
    }
}

/// A random hermitian form carried by `sup` whose restriction to `sup` has
/// radical exactly `rad` (and which vanishes against a fixed complement of
/// `sup`, so that the stored ambient gram is fully determined).
pub fn random_form_with_radical<R: Rng + ?Sized>(
    rad: &Subspace,
    sup: &Subspace,
    sigma: Involution,
    rng: &mut R,
) -> Result<Form> {
    if !sup.contains(rad) {
        return Err(Error::pre("radical must lie inside the carrier"));
    }
    let field = sup.field().clone();
    let d = sup.dim() - rad.dim();
    let b = rad.complement_in(sup)?; // d × N, basis of the effective part
    // Rows that must be annihilated: rad itself and a complement of sup.
    let rest = sup.complement_total();
    let killed = rad.basis().vstack(&rest)?;
    if killed.rows() + d != sup.ambient() {
        return Err(Error::pre("complement bookkeeping failed"));
    }
    // T = [B; killed] is a basis of the ambient space; P = T⁻¹ restricted to
    // the first d columns satisfies B·P = I and killed·P = 0.
    let t = b.vstack(&killed)?;
    let tinv = t.inverse()?;
    let p = Matrix::from_fn(field.clone(), sup.ambient(), d, |r, c| tinv.get(r, c));
    // Random non-degenerate hermitian d×d core.
    let h = loop {
        let cand = random_hermitian(&field, d, sigma, rng)?;
        if cand.rank() == d {
            break cand;
        }
    };
    let gram = p.mul(&h)?.mul(&p.sigma_transpose(sigma)?)?;
    Form::new(gram, sigma, field.one())
}

/// A random σ-hermitian `d×d` matrix (not necessarily invertible).
fn random_hermitian<R: Rng + ?Sized>(
    field: &Arc<Field>,
    d: usize,
    sigma: Involution,
    rng: &mut R,
) -> Result<Matrix> {
    let mut m = Matrix::zeros(field.clone(), d, d);
    for i in 0..d {
        // Diagonal entries are fixed by σ.
        let diag = loop {
            let x = field.random_element(rng);
            if field.apply(sigma, x)? == x {
                break x;
            }
        };
        m.set(i, i, diag);
        for j in (i + 1)..d {
            let x = field.random_element(rng);
            m.set(i, j, x);
            m.set(j, i, field.apply(sigma, x)?);
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Transversality calculus
// ---------------------------------------------------------------------------

/// `U ⋔ W`: the intersection is as small as possible, equivalently
/// `U ∩ W = 0` or `⟨U, W⟩ = V`.
pub fn is_transversal_pairwise(u: &Subspace, w: &Subspace) -> Result<bool> {
    let inter = u.intersect(w)?;
    let expected = (u.dim() + w.dim()).saturating_sub(u.ambient());
    Ok(inter.dim() == expected)
}

#[derive(Debug, Clone)]
pub struct TransversalityProfile {
    /// `min{i : U ∩ V_i ≠ 0}`; equals `k` for `U = 0` by convention.
    pub k_u: usize,
    /// `U ⋔ V_i` for `i = 0, …, k`.
    pub per_index: Vec<bool>,
    /// `U ⋔ F`.
    pub transversal_flag: bool,
    /// `U ⋔ (F, ω)`, when a family was supplied.
    pub transversal_pair: Option<bool>,
}

pub fn transversality_profile(
    u: &Subspace,
    flag: &Flag,
    family: Option<&CompatibleFamily>,
) -> Result<TransversalityProfile> {
    if u.ambient() != flag.ambient() {
        return Err(Error::DimensionMismatch {
            context: "profile ambient",
            left: u.ambient(),
            right: flag.ambient(),
        });
    }
    let k = flag.k();
    let mut per_index = Vec::with_capacity(k + 1);
    let mut k_u = k;
    let mut found_ku = false;
    for i in 0..=k {
        let vi = flag.member(i);
        let inter = u.intersect(vi)?;
        if !found_ku && !inter.is_zero() {
            k_u = i;
            found_ku = true;
        }
        let expected = (u.dim() + vi.dim()).saturating_sub(u.ambient());
        per_index.push(inter.dim() == expected);
    }
    let transversal_flag = per_index.iter().all(|&b| b);
    let transversal_pair = match family {
        None => None,
        Some(fam) => {
            let ok = if u.is_zero() {
                transversal_flag
            } else {
                transversal_flag && {
                    let crit = u.intersect(flag.member(k_u))?;
                    fam.form(k_u).is_nondegenerate_on(&crit)?
                }
            };
            Some(ok)
        }
    };
    Ok(TransversalityProfile {
        k_u,
        per_index,
        transversal_flag,
        transversal_pair,
    })
}

pub fn is_transversal_to_flag(u: &Subspace, flag: &Flag) -> Result<bool> {
    Ok(transversality_profile(u, flag, None)?.transversal_flag)
}

pub fn is_transversal_to_pair(
    u: &Subspace,
    flag: &Flag,
    family: &CompatibleFamily,
) -> Result<bool> {
    Ok(transversality_profile(u, flag, Some(family))?
        .transversal_pair
        .expect("family supplied"))
}

/// Almost transversal: wherever `U ∩ V_i ≠ 0`, the span `⟨U, V_i⟩` has
/// codimension at most 1. With a family, additionally `U ∩ V_{k_U}` must be
/// `ω_{k_U}`-non-degenerate.
pub fn is_almost_transversal(
    u: &Subspace,
    flag: &Flag,
    family: Option<&CompatibleFamily>,
) -> Result<bool> {
    let k = flag.k();
    let mut k_u = k;
    let mut found = false;
    for i in 0..=k {
        let vi = flag.member(i);
        let inter = u.intersect(vi)?;
        if inter.is_zero() {
            continue;
        }
        if !found {
            k_u = i;
            found = true;
        }
        let span_dim = u.dim() + vi.dim() - inter.dim();
        if u.ambient() - span_dim > 1 {
            return Ok(false);
        }
    }
    if let Some(fam) = family {
        if found {
            let crit = u.intersect(flag.member(k_u))?;
            if !fam.form(k_u).is_nondegenerate_on(&crit)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Nearly transversal: wherever `⟨U, V_i⟩ ≠ V`, the intersection `U ∩ V_i`
/// has dimension at most 1.
pub fn is_nearly_transversal(u: &Subspace, flag: &Flag) -> Result<bool> {
    for i in 0..=flag.k() {
        let vi = flag.member(i);
        let inter = u.intersect(vi)?;
        let span_dim = u.dim() + vi.dim() - inter.dim();
        if span_dim != u.ambient() && inter.dim() > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Geometry specs
// ---------------------------------------------------------------------------

/// One flag geometry `Γ(F, ω)` over an ambient model.
#[derive(Clone, PartialEq, Debug)]
pub struct GeometrySpec {
    kind: GeometryKind,
    rank: usize,
    ambient_form: Option<Form>,
    flag: Flag,
    family: CompatibleFamily,
    /// For B/C: a vector that is ambient-isotropic and `ω_k`-non-isotropic.
    witness: Option<Vec<FieldElement>>,
}

impl GeometrySpec {
    /// Type-A geometry on a bare space of dimension `n + 1`.
    pub fn new_a(flag: Flag, family: CompatibleFamily) -> Result<GeometrySpec> {
        CompatibleFamily::new(&flag, family.forms().to_vec())?; // re-validate alignment
        let n = flag.ambient();
        if n < 2 {
            return Err(Error::invalid("type A needs ambient dimension ≥ 2"));
        }
        Ok(GeometrySpec {
            kind: GeometryKind::A,
            rank: n - 1,
            ambient_form: None,
            flag,
            family,
            witness: None,
        })
    }

    /// Type-B/C geometry; scans for the witness vector required by the
    /// definition (ambient-isotropic, `ω_k`-non-isotropic).
    pub fn new_bc(
        kind: GeometryKind,
        ambient_form: Form,
        flag: Flag,
        family: CompatibleFamily,
    ) -> Result<GeometrySpec> {
        GeometrySpec::new_bc_with_budget(kind, ambient_form, flag, family, DEFAULT_WITNESS_BUDGET)
    }

    pub fn new_bc_with_budget(
        kind: GeometryKind,
        ambient_form: Form,
        flag: Flag,
        family: CompatibleFamily,
        budget: u64,
    ) -> Result<GeometrySpec> {
        let n = match kind {
            GeometryKind::A => return Err(Error::invalid("use new_a for type A")),
            GeometryKind::B => {
                if ambient_form.field().characteristic() == 2 {
                    return Err(Error::Unsupported(
                        "type B requires odd characteristic".into(),
                    ));
                }
                if ambient_form.dim() % 2 != 1 {
                    return Err(Error::invalid("type B ambient dimension must be odd"));
                }
                ambient_form.dim() / 2
            }
            GeometryKind::C => {
                if ambient_form.dim() % 2 != 0 {
                    return Err(Error::invalid("type C ambient dimension must be even"));
                }
                ambient_form.dim() / 2
            }
        };
        if !ambient_form.is_nondegenerate() {
            return Err(Error::invalid("ambient form must be non-degenerate"));
        }
        if flag.ambient() != ambient_form.dim() {
            return Err(Error::DimensionMismatch {
                context: "flag ambient vs form",
                left: flag.ambient(),
                right: ambient_form.dim(),
            });
        }
        CompatibleFamily::new(&flag, family.forms().to_vec())?;
        if !flag.is_self_perp(&ambient_form)? {
            return Err(Error::pre("flag is not self-perp for the ambient form"));
        }
        let witness = scan_witness(&ambient_form, &[family.top().clone()], budget)?;
        let Some(witness) = witness else {
            return Err(Error::pre(
                "no witness vector (ambient-isotropic, ω_k-non-isotropic) exists",
            ));
        };
        Ok(GeometrySpec {
            kind,
            rank: n,
            ambient_form: Some(ambient_form),
            flag,
            family,
            witness: Some(witness),
        })
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_dim(&self) -> usize {
        self.flag.ambient()
    }

    pub fn field(&self) -> &Arc<Field> {
        self.flag.field()
    }

    pub fn ambient_form(&self) -> Option<&Form> {
        self.ambient_form.as_ref()
    }

    pub fn flag(&self) -> &Flag {
        &self.flag
    }

    pub fn family(&self) -> &CompatibleFamily {
        &self.family
    }

    pub fn witness(&self) -> Option<&[FieldElement]> {
        self.witness.as_deref()
    }

    /// Geometry membership.
    pub fn membership(&self, u: &Subspace) -> Result<bool> {
        if u.ambient() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                context: "membership ambient",
                left: u.ambient(),
                right: self.ambient_dim(),
            });
        }
        match self.kind {
            GeometryKind::A => {
                if u.is_zero() || u.is_full() {
                    return Ok(false);
                }
            }
            GeometryKind::B | GeometryKind::C => {
                if u.is_zero() {
                    return Ok(false);
                }
                let form = self.ambient_form.as_ref().expect("B/C carries a form");
                if !form.is_totally_isotropic(u)? {
                    return Ok(false);
                }
            }
        }
        is_transversal_to_pair(u, &self.flag, &self.family)
    }

    /// Largest dimension a member can have.
    pub fn max_member_dim(&self) -> usize {
        match self.kind {
            GeometryKind::A => self.ambient_dim() - 1,
            GeometryKind::B | GeometryKind::C => self.rank,
        }
    }
}

/// Scan projective points for a vector that is isotropic for `ambient`
/// (skipped when `None`) and non-isotropic for every form in `forms`.
/// Returns `Ok(None)` for an honest failed search.
pub fn scan_witness(
    ambient: &Form,
    forms: &[Form],
    budget: u64,
) -> Result<Option<Vec<FieldElement>>> {
    let field = ambient.field().clone();
    let n = ambient.dim();
    let total = subspace_count(field.order() as u64, n, 1);
    if total > budget as u128 {
        return Err(Error::Budget {
            what: "witness point scan",
            needed: total.min(u64::MAX as u128) as u64,
            budget,
        });
    }
    let pts = Subspace::full(field, n).projective_points();
    for v in pts {
        if !ambient.is_isotropic_vector(&v)? {
            continue;
        }
        let mut good = true;
        for f in forms {
            if f.eval(&v, &v)?.is_zero() {
                good = false;
                break;
            }
        }
        if good {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Geometry = intersection of specs over one ambient model
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct Geometry {
    components: Vec<GeometrySpec>,
}

impl Geometry {
    pub fn new(components: Vec<GeometrySpec>) -> Result<Geometry> {
        let Some(first) = components.first() else {
            return Err(Error::invalid("geometry needs at least one component"));
        };
        for c in &components[1..] {
            if c.kind() != first.kind()
                || c.rank() != first.rank()
                || c.field() != first.field()
                || c.ambient_form() != first.ambient_form()
            {
                return Err(Error::invalid(
                    "intersected geometries must share kind, rank, field and ambient form",
                ));
            }
        }
        Ok(Geometry { components })
    }

    pub fn single(spec: GeometrySpec) -> Geometry {
        Geometry {
            components: vec![spec],
        }
    }

    pub fn components(&self) -> &[GeometrySpec] {
        &self.components
    }

    pub fn kind(&self) -> GeometryKind {
        self.components[0].kind()
    }

    pub fn rank(&self) -> usize {
        self.components[0].rank()
    }

    pub fn field(&self) -> &Arc<Field> {
        self.components[0].field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.components[0].ambient_dim()
    }

    pub fn ambient_form(&self) -> Option<&Form> {
        self.components[0].ambient_form()
    }

    pub fn membership(&self, u: &Subspace) -> Result<bool> {
        for c in &self.components {
            if !c.membership(u)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn max_member_dim(&self) -> usize {
        self.components[0].max_member_dim()
    }

    /// All members, grouped by dimension, in the canonical enumeration
    /// order. Errors out (with the estimate) when the scan would exceed
    /// `budget` subspaces.
    pub fn vertices(&self, budget: u64) -> Result<GeometryVertices> {
        let q = self.field().order() as u64;
        let n = self.ambient_dim();
        let maxd = self.max_member_dim();
        let mut estimate: u128 = 0;
        for d in 1..=maxd {
            estimate += subspace_count(q, n, d);
        }
        if estimate > budget as u128 {
            return Err(Error::Budget {
                what: "geometry vertex enumeration",
                needed: estimate.min(u64::MAX as u128) as u64,
                budget,
            });
        }
        let mut by_dim = Vec::with_capacity(maxd);
        for d in 1..=maxd {
            let mut members = Vec::new();
            for u in all_subspaces(self.field(), n, d) {
                if self.membership(&u)? {
                    members.push(u);
                }
            }
            by_dim.push(members);
        }
        Ok(GeometryVertices { by_dim })
    }

    /// The sufficient field bound reported (never enforced) alongside
    /// results: `4^(n−1) · Σ_j c_j` with `c_j = 2` for a component with
    /// `σ = id` and `c_j = q + 1` (where `|F| = q²`) otherwise.
    pub fn field_bound(&self) -> BoundCheck {
        let field_order = self.field().order() as u64;
        let n = self.rank().max(1);
        let mut sum: u64 = 0;
        for c in &self.components {
            let contribution = match c.family().sigma() {
                Involution::Identity => 2,
                Involution::FrobeniusSqrt => {
                    let q = (field_order as f64).sqrt().round() as u64;
                    q + 1
                }
            };
            sum += contribution;
        }
        let bound = 4u64.saturating_pow(n as u32 - 1).saturating_mul(sum);
        BoundCheck {
            bound,
            field_order,
            ok: field_order >= bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundCheck {
    pub bound: u64,
    pub field_order: u64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct GeometryVertices {
    /// `by_dim[d-1]` holds the members of dimension `d`.
    pub by_dim: Vec<Vec<Subspace>>,
}

impl GeometryVertices {
    pub fn total(&self) -> usize {
        self.by_dim.iter().map(|v| v.len()).sum()
    }

    pub fn iter_all(&self) -> impl Iterator<Item = &Subspace> {
        self.by_dim.iter().flatten()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_dim.iter().map(|v| v.len()).collect()
    }
}

// ---------------------------------------------------------------------------
// Base-case witness search (rank 1)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct WitnessSearch {
    pub bound: u64,
    pub field_order: u64,
    pub bound_ok: bool,
    /// `None` is the honest "no witness exists" outcome.
    pub witness: Option<Subspace>,
    pub points_scanned: usize,
}

/// Rank-1 witness search: a point of the ambient model that is isotropic
/// (B/C) and non-isotropic for every supplied form. The isotropic points
/// are scanned in a fixed parametrized order.
pub fn base_case_witness(
    kind: GeometryKind,
    ambient: Option<&Form>,
    forms: &[Form],
) -> Result<WitnessSearch> {
    if forms.is_empty() {
        return Err(Error::invalid("witness search needs at least one form"));
    }
    let field = forms[0].field().clone();
    let sigma = forms[0].sigma();
    for f in forms {
        if f.field() != &field || f.sigma() != sigma {
            return Err(Error::invalid("witness forms must share field and involution"));
        }
    }
    let m = forms.len() as u64;
    let field_order = field.order() as u64;
    let bound = match sigma {
        Involution::Identity => 2 * m,
        Involution::FrobeniusSqrt => {
            let q = (field_order as f64).sqrt().round() as u64;
            (q + 1) * m
        }
    };
    let dim = match kind {
        GeometryKind::A => 2,
        GeometryKind::B => 3,
        GeometryKind::C => 2,
    };
    for f in forms {
        if f.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "rank-1 witness form dimension",
                left: f.dim(),
                right: dim,
            });
        }
    }
    if matches!(kind, GeometryKind::B | GeometryKind::C) && ambient.is_none() {
        return Err(Error::invalid("B/C witness search needs the ambient form"));
    }

    // Parametrized isotropic points, in the documented scan order.
    let mut candidates: Vec<Vec<FieldElement>> = Vec::new();
    match kind {
        GeometryKind::C | GeometryKind::A => {
            // ⟨α·e1 + e2⟩ for α in code order, then ⟨e1⟩.
            for alpha in field.elements() {
                candidates.push(vec![alpha, field.one()]);
            }
            candidates.push(vec![field.one(), field.zero()]);
        }
        GeometryKind::B => {
            // Basis e, x, f with (e,f) = 1, (x,x) = 1: first ⟨f⟩, then
            // ⟨e + β·x − (β²/2)·f⟩ for β in code order.
            let half = field.inv(field.from_int(2)).map_err(|_| {
                Error::Unsupported("rank-1 B-case needs odd characteristic".into())
            })?;
            candidates.push(vec![field.zero(), field.zero(), field.one()]);
            for beta in field.elements() {
                let minus_half_beta_sq = field.neg(field.mul(half, field.mul(beta, beta)));
                candidates.push(vec![field.one(), beta, minus_half_beta_sq]);
            }
        }
    }

    let mut scanned = 0;
    for v in &candidates {
        scanned += 1;
        if let Some(am) = ambient {
            debug_assert!(am.is_isotropic_vector(v)?, "parametrization stays isotropic");
        }
        let mut good = true;
        for f in forms {
            if f.eval(v, v)?.is_zero() {
                good = false;
                break;
            }
        }
        if good {
            return Ok(WitnessSearch {
                bound,
                field_order,
                bound_ok: field_order >= bound,
                witness: Some(Subspace::line(field.clone(), v)?),
                points_scanned: scanned,
            });
        }
    }
    Ok(WitnessSearch {
        bound,
        field_order,
        bound_ok: field_order >= bound,
        witness: None,
        points_scanned: scanned,
    })
}

// ---------------------------------------------------------------------------
// Random generators for flags (used by randomized suites and tests)
// ---------------------------------------------------------------------------

/// A random flag: random invertible matrix, random subset of dimensions.
pub fn random_flag<R: Rng + ?Sized>(
    field: &Arc<Field>,
    ambient: usize,
    rng: &mut R,
) -> Result<Flag> {
    let g = loop {
        let m = Matrix::from_fn(field.clone(), ambient, ambient, |_, _| {
            field.random_element(rng)
        });
        if m.rank() == ambient {
            break m;
        }
    };
    let mut proper = Vec::new();
    for d in 1..ambient {
        if rng.gen_bool(0.5) {
            let rows: Vec<Vec<FieldElement>> = (0..d).map(|r| g.row_vec(r)).collect();
            proper.push(Subspace::from_rows(field.clone(), rows)?);
        }
    }
    Flag::from_proper(field.clone(), ambient, proper)
}

/// A random self-perp flag for a non-degenerate reflexive form: a random
/// totally isotropic chain together with its perps.
pub fn random_self_perp_flag<R: Rng + ?Sized>(form: &Form, rng: &mut R) -> Result<Flag> {
    let field = form.field().clone();
    let n = form.dim();
    // Grow a random isotropic chain.
    let mut chain: Vec<Subspace> = Vec::new();
    let mut current = Subspace::zero(field.clone(), n);
    loop {
        // Stop with probability 1/2 once the chain is nonempty.
        if !chain.is_empty() && rng.gen_bool(0.5) {
            break;
        }
        let perp = form.perp(&current)?;
        let candidates: Vec<Vec<FieldElement>> = perp
            .projective_points()
            .into_iter()
            .filter(|v| {
                form.is_isotropic_vector(v).unwrap_or(false) && !current.contains_vector(v)
            })
            .collect();
        if candidates.is_empty() {
            break;
        }
        let v = &candidates[rng.gen_range(0..candidates.len())];
        current = current.sum(&Subspace::line(field.clone(), v)?)?;
        chain.push(current.clone());
    }
    let mut proper: Vec<Subspace> = chain.clone();
    for s in chain.iter().rev() {
        let p = form.perp(s)?;
        if &p != proper.last().unwrap_or(&p) && !proper.contains(&p) {
            proper.push(p);
        }
    }
    // Drop any accidental non-strictness (e.g. lagrangians equal to their perp).
    proper.dedup();
    proper.retain(|s| !s.is_zero() && !s.is_full());
    Flag::from_proper(field, n, proper)
}

/// Enumerate every flag of the ambient space (all chains `0 < … < V`).
/// Exponential; use only for small spaces in tests and suites.
pub fn all_flags(field: &Arc<Field>, ambient: usize) -> Vec<Flag> {
    let all: Vec<Subspace> = (1..ambient)
        .flat_map(|d| all_subspaces(field, ambient, d))
        .collect();
    let mut flags = Vec::new();
    let zero = Subspace::zero(field.clone(), ambient);
    let full = Subspace::full(field.clone(), ambient);
    let mut stack: Vec<Vec<&Subspace>> = vec![vec![]];
    while let Some(chain) = stack.pop() {
        // Extend by any strictly larger proper subspace.
        let members: Vec<Subspace> = std::iter::once(zero.clone())
            .chain(chain.iter().map(|s| (*s).clone()))
            .chain(std::iter::once(full.clone()))
            .collect();
        flags.push(Flag::new(members).expect("chains are valid flags"));
        let last_dim = chain.last().map(|s| s.dim()).unwrap_or(0);
        for s in &all {
            if s.dim() > last_dim && (chain.is_empty() || s.contains(chain.last().unwrap())) {
                let mut next = chain.clone();
                next.push(s);
                stack.push(next);
            }
        }
    }
    flags
}
