//! Form-induced involutions of a building and the chamber systems they
//! select.
//!
//! A [`Flip`] is the involution a non-degenerate σ-hermitian form `ω`
//! induces on a building: on linear buildings it is the duality
//! `U ↦ U^{⊥ω}`, on polar buildings the type-preserving map
//! `U ↦ (U^{⊥ω})^{⊥J}` where `J` is the defining bilinear form.  The
//! codistance of a chamber is `w₀·δ(c, τc)`; chambers realizing the full
//! longest length are exactly those whose members are all
//! `ω`-non-degenerate, and the set of chambers of a residue with maximal
//! codistance (equivalently minimal `δ(c, τc)`) is its flip-flop system.
//!
//! [`characterize_r_theta`] validates the gate-theoretic description of a
//! flip-flop system (coprojection residue `Q`, induced involution on `Q`,
//! and the two-term length formula), and [`gpg_compare`] rebuilds the
//! flip-flop system of a residue as a standalone transversal geometry on
//! the residue's quotient model and compares the two chamber sets
//! exactly, reporting the first mismatch as a counterexample.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, Involution};
use crate::form::Form;
use crate::matrix::Matrix;
use crate::phan::{CompatibleFamily, Flag, GeometryKind, GeometrySpec};
use crate::subspace::{QuotientChart, Subspace};

use super::weyl::WeylElement;
use super::{Building, ChamberFlag, Residue};

/// An involution of a building induced by a non-degenerate form.
#[derive(Clone, Debug)]
pub struct Flip {
    kind: GeometryKind,
    ambient_dim: usize,
    omega: Form,
    /// For polar buildings: the matrix `T` with `τ(rowspace M) =
    /// rowspace(σ(M)·T)`.  Linear buildings use the perp directly.
    tau: Option<Matrix>,
}

impl Flip {
    /// Validate that `omega` induces an involution of the given building.
    ///
    /// `omega` must be non-degenerate and hermitian (`ε = 1`).  On polar
    /// buildings two compatibility conditions are checked: composing the
    /// two perps must square to a scalar (involutivity) and must carry
    /// the defining form to a scalar multiple of itself (so totally
    /// isotropic subspaces stay totally isotropic).
    pub fn new(building: &Building, omega: Form) -> Result<Flip> {
        let field = building.field().clone();
        if omega.field() != &field {
            return Err(Error::FieldMismatch);
        }
        if omega.dim() != building.ambient_dim() {
            return Err(Error::DimensionMismatch {
                context: "flip form vs building ambient",
                left: omega.dim(),
                right: building.ambient_dim(),
            });
        }
        if omega.epsilon() != field.one() {
            return Err(Error::invalid("flip forms must be hermitian (ε = 1)"));
        }
        if !omega.is_nondegenerate() {
            return Err(Error::pre("flip forms must be non-degenerate"));
        }
        let sigma = omega.sigma();
        let tau = match building.kind() {
            GeometryKind::A => {
                if building.ambient_dim() == 2 {
                    // Degenerate corner: a form all of whose points are
                    // isotropic fixes every chamber of the rank-1
                    // building and induces nothing.
                    let all_fixed = building.chambers().iter().try_fold(
                        true,
                        |acc, c| -> Result<bool> {
                            let p = c.member(1);
                            Ok(acc && &omega.perp(p)? == p)
                        },
                    )?;
                    if all_fixed {
                        return Err(Error::pre(
                            "the form fixes every point and induces the identity",
                        ));
                    }
                }
                None
            }
            GeometryKind::B | GeometryKind::C => {
                let j = building
                    .defining_form()
                    .ok_or_else(|| Error::invalid("polar building lacks a defining form"))?;
                if j.gram().apply_sigma(sigma)? != *j.gram() {
                    return Err(Error::Unsupported(
                        "defining form must have σ-fixed entries".into(),
                    ));
                }
                let t = omega
                    .gram()
                    .apply_sigma(sigma)?
                    .mul(&j.gram().transpose().inverse()?)?;
                let square = t.apply_sigma(sigma)?.mul(&t)?;
                if identity_scalar(&square).is_none() {
                    return Err(Error::Unsupported(
                        "perp composition does not square to a scalar".into(),
                    ));
                }
                let tjt = t.mul(j.gram())?.mul(&t.transpose())?;
                if proportionality(&tjt, j.gram()).filter(|c| !c.is_zero()).is_none() {
                    return Err(Error::Unsupported(
                        "perp composition does not preserve the defining form".into(),
                    ));
                }
                if sigma == Involution::Identity && identity_scalar(&t).is_some() {
                    return Err(Error::pre("the form induces the identity map"));
                }
                Some(t)
            }
        };
        Ok(Flip {
            kind: building.kind(),
            ambient_dim: building.ambient_dim(),
            omega,
            tau,
        })
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn sigma(&self) -> Involution {
        self.omega.sigma()
    }

    pub fn form(&self) -> &Form {
        &self.omega
    }

    /// Image of a subspace.  Linear: the `ω`-perp (dimensions reverse);
    /// polar: the `J`-perp of the `ω`-perp (dimensions are preserved).
    pub fn subspace_image(&self, u: &Subspace) -> Result<Subspace> {
        if u.ambient() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "flip image ambient",
                left: u.ambient(),
                right: self.ambient_dim,
            });
        }
        match &self.tau {
            None => self.omega.perp(u),
            Some(t) => {
                let m = u.basis().apply_sigma(self.omega.sigma())?.mul(t)?;
                Ok(Subspace::from_matrix(&m))
            }
        }
    }

    /// Image of a chamber.  Linear flips reverse the flag.
    pub fn chamber_image(&self, c: &ChamberFlag) -> Result<ChamberFlag> {
        let mut members: Vec<Subspace> = c
            .members()
            .iter()
            .map(|m| self.subspace_image(m))
            .collect::<Result<_>>()?;
        if self.tau.is_none() {
            members.reverse();
        }
        ChamberFlag::new(members)
    }

    /// The Weyl-valued codistance `w₀ · δ(c, τc)`.
    pub fn codistance(&self, building: &Building, c: usize) -> Result<WeylElement> {
        let image = self.chamber_image(building.chamber(c))?;
        let delta = building.weyl_distance_flags(building.chamber(c), &image)?;
        WeylElement::longest(building.weyl_kind()).compose(&delta)
    }

    /// `ℓ(w₀) − ℓ(δ(c, τc))`, the numerical codistance.
    pub fn numerical_codistance(&self, building: &Building, c: usize) -> Result<u64> {
        let image = self.chamber_image(building.chamber(c))?;
        let delta = building.weyl_distance_flags(building.chamber(c), &image)?;
        Ok(building.weyl_kind().longest_length() - delta.length())
    }

    /// Is the chamber opposite its own image (`δ(c, τc) = w₀`, numerical
    /// codistance zero)?
    pub fn is_opposition_chamber(&self, building: &Building, c: usize) -> Result<bool> {
        Ok(self.numerical_codistance(building, c)? == 0)
    }

    /// Check the twisted-isometry identity `δ(τc, τd) = w₀ δ(c, d) w₀`
    /// on one pair of chambers.
    pub fn isometry_twist_holds(&self, building: &Building, c: usize, d: usize) -> Result<bool> {
        let ic = self.chamber_image(building.chamber(c))?;
        let id_ = self.chamber_image(building.chamber(d))?;
        let lhs = building.weyl_distance_flags(&ic, &id_)?;
        let w0 = WeylElement::longest(building.weyl_kind());
        let rhs = w0
            .compose(&building.weyl_distance(c, d)?)?
            .compose(&w0)?;
        Ok(lhs == rhs)
    }
}

/// The chambers of a residue nearest to opposition with their own image.
///
/// The numerical codistance `ℓ(w₀·δ(c, τc))` vanishes exactly at
/// chambers opposite their image, so the flip-flop system collects the
/// minimizers.
#[derive(Clone, Debug)]
pub struct FlipFlopSystem {
    /// Chamber indices (into the building) at minimal numerical
    /// codistance.
    pub chambers: Vec<usize>,
    /// The maximal numerical codistance over the residue.
    pub max_codistance: u64,
    /// The minimal numerical codistance over the residue.
    pub min_codistance: u64,
}

/// Collect the chambers of `residue` whose numerical codistance is
/// minimal.
pub fn flip_flop_system(
    building: &Building,
    flip: &Flip,
    residue: &Residue,
) -> Result<FlipFlopSystem> {
    let mut best: Option<u64> = None;
    let mut worst: Option<u64> = None;
    let mut values = Vec::with_capacity(residue.chamber_count());
    for &c in residue.chambers() {
        let v = flip.numerical_codistance(building, c)?;
        best = Some(best.map_or(v, |b| b.min(v)));
        worst = Some(worst.map_or(v, |w| w.max(v)));
        values.push((c, v));
    }
    let min = best.ok_or_else(|| Error::invalid("empty residue"))?;
    let chambers = values
        .into_iter()
        .filter_map(|(c, v)| (v == min).then_some(c))
        .collect();
    Ok(FlipFlopSystem {
        chambers,
        max_codistance: worst.unwrap(),
        min_codistance: min,
    })
}

/// Chambers of the whole building opposite their own image (empty when
/// no chamber reaches opposition).
pub fn opposition_chambers(building: &Building, flip: &Flip) -> Result<Vec<usize>> {
    let whole = building.whole_residue();
    let ffs = flip_flop_system(building, flip, &whole)?;
    if ffs.min_codistance != 0 {
        return Ok(Vec::new());
    }
    Ok(ffs.chambers)
}

/// Chambers fixed by the flip.
pub fn count_fixed_chambers(building: &Building, flip: &Flip) -> Result<usize> {
    let mut count = 0;
    for c in building.chambers() {
        if &flip.chamber_image(c)? == c {
            count += 1;
        }
    }
    Ok(count)
}

fn gate_fast(building: &Building, residue: &Residue, target: usize) -> Result<usize> {
    if residue.contains(target) {
        return Ok(target);
    }
    building.gate(residue, target)
}

/// The image residue `τR`, described by the images of the fixed members.
pub fn residue_image(building: &Building, flip: &Flip, residue: &Residue) -> Result<Residue> {
    if residue.fixed().is_empty() {
        return Ok(building.whole_residue());
    }
    let fixed: Vec<Subspace> = residue
        .fixed()
        .iter()
        .map(|s| flip.subspace_image(s))
        .collect::<Result<_>>()?;
    building.residue(&fixed)
}

/// The coprojection residue `Q`: gates of the image residue's chambers
/// back into `R`, verified to form a residue.
pub fn coprojection_residue(
    building: &Building,
    flip: &Flip,
    residue: &Residue,
) -> Result<Residue> {
    let image = residue_image(building, flip, residue)?;
    building.project_residue(residue, &image)
}

/// Outcome of validating the gate-theoretic description of a flip-flop
/// system over one residue.
#[derive(Clone, Debug)]
pub struct CharacterizationReport {
    /// Chambers of the residue examined.
    pub chambers: usize,
    /// Chambers of the coprojection residue `Q`.
    pub q_chambers: usize,
    /// Codistance of the residue with its image: the maximum over `c` of
    /// `ℓ(w₀) − ℓ(δ(c, proj_{τR}(c)))`.
    pub residue_codistance: u64,
    /// Maximal numerical codistance over the residue's chambers.
    pub max_codistance: u64,
    /// Minimal numerical codistance over the residue's chambers.
    pub min_codistance: u64,
    /// The induced map on `Q` squares to the identity.
    pub involution_ok: bool,
    /// Chambers violating the two-term length formula.
    pub formula_failures: Vec<usize>,
    /// Chambers violating the membership biconditional.
    pub biconditional_failures: Vec<usize>,
}

impl CharacterizationReport {
    pub fn verified(&self) -> bool {
        self.involution_ok
            && self.formula_failures.is_empty()
            && self.biconditional_failures.is_empty()
    }
}

/// Validate, chamber by chamber, the description of the flip-flop system
/// of `residue`:
///
/// * `Q` (the gates of `τR` in `R`) is a residue and the induced map
///   `x ↦ proj_R(τx)` is an involution of `Q`;
/// * the codistance of every chamber satisfies
///   `ℓθ(c) = ℓ*(R) − 2·ℓ(δ(c, x)) − ℓ(δ(x, x'))` with `x = proj_Q(c)`
///   and `x'` its image;
/// * `c` has minimal numerical codistance in `R` exactly when `δ(c, x)`
///   realizes the longest length of `R` relative to `Q` and `δ(x, x')`
///   the longest length attained on `Q` — that is, `x` belongs to the
///   flip-flop system of `Q` under the induced involution.  (When the
///   induced involution moves some chamber of `Q` the attained length is
///   the longest length of `Q`; when it is trivial — for instance on the
///   point row of an eigenspace Lagrangian — every chamber of `Q`
///   qualifies.)
pub fn characterize_r_theta(
    building: &Building,
    flip: &Flip,
    residue: &Residue,
) -> Result<CharacterizationReport> {
    let kind = building.weyl_kind();
    let l0 = kind.longest_length();
    let image = residue_image(building, flip, residue)?;
    let q = building.project_residue(residue, &image)?;
    for &x in q.chambers() {
        if !residue.contains(x) {
            return Err(Error::invalid("coprojection residue escapes the residue"));
        }
    }

    // Induced involution on Q with a cache.
    let mut theta_prime: BTreeMap<usize, usize> = BTreeMap::new();
    let mut involution_ok = true;
    for &x in q.chambers() {
        let img = flip.chamber_image(building.chamber(x))?;
        let gx = gate_fast(building, residue, building.index_of(&img)?)?;
        if !q.contains(gx) {
            involution_ok = false;
        }
        theta_prime.insert(x, gx);
    }
    if involution_ok {
        for (&x, &gx) in &theta_prime {
            if theta_prime.get(&gx) != Some(&x) {
                involution_ok = false;
                break;
            }
        }
    }

    // Residue codistance: maximal over c of ℓ(w₀) − ℓ(δ(c, proj_{τR} c)).
    let mut residue_codistance = 0u64;
    for &c in residue.chambers() {
        let g = gate_fast(building, &image, c)?;
        let v = l0 - building.gallery_distance(c, g)?;
        residue_codistance = residue_codistance.max(v);
    }

    let w0_r = residue.longest_length(kind)?;
    let w0_q = q.longest_length(kind)?;

    // Longest length the induced involution actually attains on Q; this is
    // w₀(Q) whenever θ' moves some chamber far enough, and drops below it
    // when θ' degenerates (trivial action forces 0).
    let mut attained_q = 0u64;
    for (&x, &x_img) in &theta_prime {
        attained_q = attained_q.max(building.gallery_distance(x, x_img)?);
    }

    let mut min_codistance = u64::MAX;
    let mut max_codistance = 0u64;
    let mut per_chamber = Vec::with_capacity(residue.chamber_count());
    for &c in residue.chambers() {
        let ltheta = flip.numerical_codistance(building, c)?;
        min_codistance = min_codistance.min(ltheta);
        max_codistance = max_codistance.max(ltheta);
        let x = gate_fast(building, &q, c)?;
        let to_gate = building.gallery_distance(c, x)?;
        let x_img = *theta_prime
            .get(&x)
            .ok_or_else(|| Error::invalid("gate landed outside the coprojection residue"))?;
        let within_q = building.gallery_distance(x, x_img)?;
        per_chamber.push((c, ltheta, to_gate, within_q));
    }

    let mut formula_failures = Vec::new();
    let mut biconditional_failures = Vec::new();
    for &(c, ltheta, to_gate, within_q) in &per_chamber {
        let rhs = residue_codistance as i128 - 2 * to_gate as i128 - within_q as i128;
        if ltheta as i128 != rhs {
            formula_failures.push(c);
        }
        let minimal = ltheta == min_codistance;
        let opposite_q = to_gate == w0_r - w0_q;
        let gate_in_q_system = within_q == attained_q;
        if minimal != (opposite_q && gate_in_q_system) {
            biconditional_failures.push(c);
        }
    }

    Ok(CharacterizationReport {
        chambers: residue.chamber_count(),
        q_chambers: q.chamber_count(),
        residue_codistance,
        max_codistance,
        min_codistance,
        involution_ok,
        formula_failures,
        biconditional_failures,
    })
}

// ---------------------------------------------------------------------------
// Rebuilding a flip-flop system as a standalone transversal geometry
// ---------------------------------------------------------------------------

/// How one flag step's form was obtained.
#[derive(Clone, Debug)]
pub struct StepFit {
    /// Dimension of the step's lower flag member (in the model space).
    pub lower: usize,
    /// Dimension of the step's upper flag member.
    pub upper: usize,
    /// Whether a linear calibration was solved (steps of dimension ≥ 2);
    /// one-dimensional steps take a rank-one form directly.
    pub fitted: bool,
}

/// Result of comparing a flip-flop system with the transversal geometry
/// assembled on the residue's quotient model.
#[derive(Clone, Debug)]
pub struct GpgReport {
    /// Chamber count of the residue examined.
    pub residue_chambers: usize,
    /// Size of the flip-flop system.
    pub r_theta_size: usize,
    /// Chamber count of the assembled geometry.
    pub geometry_size: usize,
    /// Kind of the quotient model building.
    pub model_kind: GeometryKind,
    /// Ambient dimension of the model.
    pub model_dim: usize,
    /// Field automorphism used by the assembled forms.
    pub sigma: Involution,
    /// Per-step provenance of the assembled forms.
    pub steps: Vec<StepFit>,
    /// First chamber in the symmetric difference, if any.
    pub counterexample: Option<String>,
}

impl GpgReport {
    pub fn verified(&self) -> bool {
        self.counterexample.is_none()
    }
}

struct ResidueModel {
    kind: GeometryKind,
    lo: usize,
    hi: usize,
    chart: QuotientChart,
    dim: usize,
    defining: Option<Form>,
    building: Building,
}

impl ResidueModel {
    fn build(building: &Building, residue: &Residue, budget: u64) -> Result<ResidueModel> {
        let free = residue.free_types();
        if free.is_empty() {
            return Err(Error::invalid("residue fixes every type"));
        }
        for w in free.windows(2) {
            if w[1] != w[0] + 1 {
                return Err(Error::Unsupported(
                    "only residues over a consecutive run of types have a quotient model".into(),
                ));
            }
        }
        let lo = free[0];
        let hi = *free.last().unwrap();
        let n = building.rank();
        let field = building.field().clone();
        let fixed_of_dim = |d: usize| -> Result<Subspace> {
            residue
                .fixed()
                .iter()
                .find(|s| s.dim() == d)
                .cloned()
                .ok_or_else(|| Error::invalid("missing fixed member"))
        };
        let sub = if lo > 1 {
            fixed_of_dim(lo - 1)?
        } else {
            Subspace::zero(field.clone(), building.ambient_dim())
        };
        let polar_top = matches!(building.kind(), GeometryKind::B | GeometryKind::C) && hi == n;
        let (kind, sup) = if polar_top {
            let j = building.defining_form().expect("polar building");
            (building.kind(), j.perp(&sub)?)
        } else if hi < n {
            (GeometryKind::A, fixed_of_dim(hi + 1)?)
        } else {
            (
                GeometryKind::A,
                Subspace::full(field.clone(), building.ambient_dim()),
            )
        };
        let chart = QuotientChart::new(sub, sup)?;
        let dim = chart.dim();
        let (defining, model) = match kind {
            GeometryKind::A => (None, Building::new_linear(field, dim - 1, budget)?),
            _ => {
                let j = building.defining_form().expect("polar building");
                let gram = j.gram_on(chart.complement())?;
                let jbar = Form::new(gram, Involution::Identity, j.epsilon())?;
                (Some(jbar.clone()), Building::new_polar(jbar, budget)?)
            }
        };
        if model.rank() != free.len() {
            return Err(Error::invalid("quotient model rank mismatch"));
        }
        Ok(ResidueModel {
            kind,
            lo,
            hi,
            chart,
            dim,
            defining,
            building: model,
        })
    }

    fn covers_dim(&self, d: usize) -> bool {
        d >= self.lo && d <= self.hi
    }

    fn to_model(&self, building: &Building, chamber: usize) -> Result<ChamberFlag> {
        let c = building.chamber(chamber);
        let members: Vec<Subspace> = (self.lo..=self.hi)
            .map(|d| self.chart.project_subspace(c.member(d)))
            .collect::<Result<_>>()?;
        ChamberFlag::new(members)
    }

    fn from_model(
        &self,
        building: &Building,
        residue: &Residue,
        model_chamber: &ChamberFlag,
    ) -> Result<usize> {
        let mut members: Vec<Subspace> = residue.fixed().to_vec();
        for m in model_chamber.members() {
            members.push(self.chart.lift_subspace(m)?);
        }
        members.sort_by_key(|s| s.dim());
        building.index_of(&ChamberFlag::new(members)?)
    }
}

struct Sample {
    point: Vec<FieldElement>,
    normal: Vec<FieldElement>,
    opposite: bool,
}

/// One calibration sample per projective point of the step: the point's
/// coordinates in the step quotient, the hyperplane its image vertex
/// induces there, and whether the point-vertex and its image are opposite
/// in the model.
#[allow(clippy::too_many_arguments)]
fn collect_step_samples(
    building: &Building,
    flip: &Flip,
    residue: &Residue,
    q: &Residue,
    model: &ResidueModel,
    flag_members: &[Subspace],
    lower: &Subspace,
    upper: &Subspace,
    theta_cache: &mut BTreeMap<usize, usize>,
) -> Result<Vec<Sample>> {
    let field = lower.field().clone();
    let step_chart = QuotientChart::new(lower.clone(), upper.clone())?;
    let step_dim = step_chart.dim();
    let model_rank = model.building.rank();
    let constraints: Vec<&Subspace> = flag_members
        .iter()
        .filter(|m| m.dim() >= 1 && m.dim() <= model_rank.min(model.dim - 1))
        .collect();
    let mut samples = Vec::new();
    for p in Subspace::full(field.clone(), step_dim).projective_points() {
        let v = step_chart.lift_vector(&p)?;
        let line = Subspace::line(field.clone(), &v)?;
        let u = lower.sum(&line)?;
        if let Some(j) = &model.defining {
            if !j.is_totally_isotropic(&u)? {
                continue; // not a vertex of the polar model
            }
        }
        let d_u = u.dim();
        if d_u > model_rank {
            continue;
        }
        let Some(x_idx) = model.building.chambers().iter().position(|c| {
            c.member(d_u) == &u
                && constraints
                    .iter()
                    .all(|f| f.dim() == d_u || c.member(f.dim()) == *f)
        }) else {
            continue;
        };
        let ambient = model.from_model(building, residue, model.building.chamber(x_idx))?;
        let gated = match theta_cache.get(&ambient) {
            Some(&g) => g,
            None => {
                let img = flip.chamber_image(building.chamber(ambient))?;
                let g = gate_fast(building, residue, building.index_of(&img)?)?;
                theta_cache.insert(ambient, g);
                g
            }
        };
        if !q.contains(gated) {
            return Err(Error::invalid(
                "induced involution leaves the coprojection residue",
            ));
        }
        let image_flag = model.to_model(building, gated)?;
        let partner_dim = match model.kind {
            GeometryKind::A => model.dim - d_u,
            _ => d_u,
        };
        if partner_dim == 0 || partner_dim > model_rank {
            return Err(Error::Unsupported(
                "image vertex falls outside the model's types".into(),
            ));
        }
        let partner = image_flag.member(partner_dim);
        let h_space = match &model.defining {
            None => partner.clone(),
            Some(j) => j.perp(partner)?,
        };
        let h_step = step_chart.project_subspace(&h_space.intersect(upper)?.sum(lower)?)?;
        if h_step.dim() + 1 != step_dim {
            return Err(Error::Unsupported(
                "step correlation is not hyperplane-valued".into(),
            ));
        }
        let kernel = h_step.basis().transpose().row_kernel();
        if kernel.rows() != 1 {
            return Err(Error::invalid("hyperplane normal is not unique"));
        }
        let opposite = !h_step.contains_vector(&p);
        samples.push(Sample {
            point: p,
            normal: kernel.row_vec(0),
            opposite,
        });
    }
    if samples.len() < 2 {
        return Err(Error::Unsupported(
            "not enough step vertices to calibrate a form".into(),
        ));
    }
    Ok(samples)
}

/// Solve for a hermitian gram matrix `G` on the step quotient such that
/// `G·σ(v)ᵀ` is the normal of each sample's image hyperplane, and the
/// induced values `v·G·σ(v)ᵀ` vanish exactly on the non-opposite
/// samples.
fn fit_step_gram(
    field: &Arc<Field>,
    sigma: Involution,
    dim: usize,
    samples: &[Sample],
) -> Result<Matrix> {
    if !field.supports(sigma) {
        return Err(Error::Unsupported("field lacks the automorphism".into()));
    }
    // Linear system: for each sample and each coordinate pair a < b,
    //   n_b · (G σ(v)ᵀ)_a − n_a · (G σ(v)ᵀ)_b = 0,
    // in the dim² unknowns G[a][j].
    let mut rows: Vec<Vec<FieldElement>> = Vec::new();
    for s in samples {
        let sv: Vec<FieldElement> = s
            .point
            .iter()
            .map(|&x| field.apply(sigma, x))
            .collect::<std::result::Result<_, _>>()?;
        for a in 0..dim {
            for b in (a + 1)..dim {
                let mut row = vec![field.zero(); dim * dim];
                for j in 0..dim {
                    row[a * dim + j] = field.add(row[a * dim + j], field.mul(s.normal[b], sv[j]));
                    row[b * dim + j] =
                        field.sub(row[b * dim + j], field.mul(s.normal[a], sv[j]));
                }
                rows.push(row);
            }
        }
    }
    let eqs = Matrix::from_rows(field.clone(), rows)?;
    let kernel = eqs.transpose().row_kernel();
    'candidates: for k in 0..kernel.rows() {
        let flat = kernel.row(k);
        let gram = Matrix::from_fn(field.clone(), dim, dim, |i, j| flat[i * dim + j]);
        let Some(hermitian) = hermitianize(field, sigma, &gram) else {
            continue;
        };
        if hermitian.rank() != dim {
            continue;
        }
        // Verify every sample: parallel normals and the opposition rule.
        for s in samples {
            let sv: Vec<FieldElement> = s
                .point
                .iter()
                .map(|&x| field.apply(sigma, x))
                .collect::<std::result::Result<_, _>>()?;
            let w: Vec<FieldElement> = (0..dim)
                .map(|a| {
                    (0..dim).fold(field.zero(), |acc, j| {
                        field.add(acc, field.mul(hermitian.get(a, j), sv[j]))
                    })
                })
                .collect();
            if w.iter().all(|x| x.is_zero()) {
                continue 'candidates;
            }
            for a in 0..dim {
                for b in (a + 1)..dim {
                    if field.mul(w[a], s.normal[b]) != field.mul(w[b], s.normal[a]) {
                        continue 'candidates;
                    }
                }
            }
            let value = (0..dim).fold(field.zero(), |acc, a| {
                field.add(acc, field.mul(s.point[a], w[a]))
            });
            if value.is_zero() == s.opposite {
                continue 'candidates;
            }
        }
        return Ok(hermitian);
    }
    Err(Error::invalid(
        "no hermitian form reproduces the induced correlation",
    ))
}

/// Scale a gram matrix into hermitian shape (`Gᵀ = σ(G)`), if possible.
fn hermitianize(field: &Arc<Field>, sigma: Involution, gram: &Matrix) -> Option<Matrix> {
    let gt = gram.transpose();
    let sg = gram.apply_sigma(sigma).ok()?;
    let c = proportionality(&gt, &sg)?;
    if c.is_zero() {
        return None;
    }
    for mu in field.elements() {
        if mu.is_zero() {
            continue;
        }
        if field.apply(sigma, mu).ok()? == field.mul(mu, c) {
            return Some(gram.scale(mu));
        }
    }
    None
}

/// `m == c·I` for some scalar `c ≠ 0`.
fn identity_scalar(m: &Matrix) -> Option<FieldElement> {
    let id = Matrix::identity(m.field().clone(), m.rows());
    proportionality(m, &id).filter(|c| !c.is_zero())
}

/// The scalar `c` with `a == c·b`, if one exists (`b ≠ 0`).
fn proportionality(a: &Matrix, b: &Matrix) -> Option<FieldElement> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return None;
    }
    let field = a.field().clone();
    let mut c: Option<FieldElement> = None;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let bv = b.get(i, j);
            if !bv.is_zero() {
                c = Some(field.div(a.get(i, j), bv).ok()?);
                break;
            }
        }
        if c.is_some() {
            break;
        }
    }
    let c = c?;
    if *a == b.scale(c) {
        Some(c)
    } else {
        None
    }
}

/// A rank-one hermitian form for a one-dimensional flag step: pick a
/// functional vanishing on `lower` but not on `upper` and square it.
fn rank_one_step_form(
    field: &Arc<Field>,
    sigma: Involution,
    lower: &Subspace,
    upper: &Subspace,
) -> Result<Form> {
    let m = lower.ambient();
    let candidates = if lower.dim() == 0 {
        Matrix::identity(field.clone(), m)
    } else {
        lower.basis().transpose().row_kernel()
    };
    for k in 0..candidates.rows() {
        let n = candidates.row(k);
        let vanishes_on_upper = (0..upper.basis().rows()).all(|r| {
            let b = upper.basis().row(r);
            (0..m)
                .fold(field.zero(), |acc, j| field.add(acc, field.mul(n[j], b[j])))
                .is_zero()
        });
        if vanishes_on_upper {
            continue;
        }
        let gram = Matrix::from_fn(field.clone(), m, m, |i, j| {
            field.mul(n[i], field.apply(sigma, n[j]).expect("supported"))
        });
        return Form::new(gram, sigma, field.one());
    }
    Err(Error::invalid("no functional separates the step"))
}

/// Rebuild the flip-flop system of `residue` as a transversal geometry on
/// the residue's quotient model and compare chamber sets exactly.
///
/// The model is the interval of subspaces between the fixed members
/// bracketing the free types (with the perp of the lower member as upper
/// bracket when the free run reaches the top of a polar building).  The
/// coprojection residue supplies the distinguished flag; each flag step
/// receives a hermitian form — rank-one steps directly, larger steps by
/// solving a linear system against the induced involution's action on
/// point vertices and verifying the fit exhaustively.
pub fn gpg_compare(
    building: &Building,
    flip: &Flip,
    residue: &Residue,
    budget: u64,
) -> Result<GpgReport> {
    let image = residue_image(building, flip, residue)?;
    let q = building.project_residue(residue, &image)?;
    let model = ResidueModel::build(building, residue, budget)?;
    let field = building.field().clone();

    // Distinguished flag: the model images of Q's common members at free
    // dimensions, closed under the model perp for polar models.
    let mut proper: Vec<Subspace> = Vec::new();
    for s in q.fixed() {
        if model.covers_dim(s.dim()) {
            proper.push(model.chart.project_subspace(s)?);
        }
    }
    if let Some(j) = &model.defining {
        let perps: Vec<Subspace> = proper
            .iter()
            .map(|s| j.perp(s))
            .collect::<Result<_>>()?;
        proper.extend(perps);
    }
    proper.sort_by_key(|s| s.dim());
    proper.dedup_by(|a, b| a == b);
    proper.retain(|s| s.dim() > 0 && s.dim() < model.dim);
    let flag = Flag::from_proper(field.clone(), model.dim, proper)?;

    // Per-step samples (σ-independent geometry).
    let members = flag.members().to_vec();
    let mut theta_cache: BTreeMap<usize, usize> = BTreeMap::new();
    let mut step_samples: Vec<Option<Vec<Sample>>> = Vec::new();
    for t in 1..members.len() {
        let lower = &members[t - 1];
        let upper = &members[t];
        if upper.dim() - lower.dim() == 1 {
            step_samples.push(None);
        } else {
            step_samples.push(Some(collect_step_samples(
                building,
                flip,
                residue,
                &q,
                &model,
                flag.proper_members(),
                lower,
                upper,
                &mut theta_cache,
            )?));
        }
    }

    // Try the flip's automorphism first, then the other supported one.
    let mut candidates = vec![flip.sigma()];
    for alt in [Involution::Identity, Involution::FrobeniusSqrt] {
        if alt != flip.sigma() && field.supports(alt) {
            candidates.push(alt);
        }
    }
    let mut chosen: Option<(Involution, Vec<Form>)> = None;
    'sigmas: for sigma in candidates {
        let mut forms = Vec::new();
        for (t, samples) in step_samples.iter().enumerate() {
            let lower = &members[t];
            let upper = &members[t + 1];
            let form = match samples {
                None => rank_one_step_form(&field, sigma, lower, upper)?,
                Some(samples) => {
                    let step_chart = QuotientChart::new(lower.clone(), upper.clone())?;
                    let gram =
                        match fit_step_gram(&field, sigma, step_chart.dim(), samples) {
                            Ok(g) => g,
                            Err(_) => continue 'sigmas,
                        };
                    embed_step_form(&field, sigma, lower, upper, &step_chart, &gram)?
                }
            };
            forms.push(form);
        }
        chosen = Some((sigma, forms));
        break;
    }
    let Some((sigma, forms)) = chosen else {
        return Err(Error::invalid(
            "no hermitian family reproduces the induced involution",
        ));
    };
    let steps: Vec<StepFit> = members
        .windows(2)
        .zip(&step_samples)
        .map(|(w, s)| StepFit {
            lower: w[0].dim(),
            upper: w[1].dim(),
            fitted: s.is_some(),
        })
        .collect();

    let family = CompatibleFamily::new(&flag, forms)?;
    let spec = match model.kind {
        GeometryKind::A => GeometrySpec::new_a(flag, family)?,
        kind => GeometrySpec::new_bc(
            kind,
            model.defining.clone().expect("polar model"),
            flag,
            family,
        )?,
    };

    // Chamber sets: the assembled geometry vs. the charted flip-flop
    // system.
    let mut geometry_keys: BTreeSet<Vec<u32>> = BTreeSet::new();
    for (i, c) in model.building.chambers().iter().enumerate() {
        let mut all = true;
        for m in c.members() {
            if !spec.membership(m)? {
                all = false;
                break;
            }
        }
        if all {
            geometry_keys.insert(model.building.chamber(i).key());
        }
    }
    let ffs = flip_flop_system(building, flip, residue)?;
    let mut r_theta_keys: BTreeSet<Vec<u32>> = BTreeSet::new();
    for &c in &ffs.chambers {
        r_theta_keys.insert(model.to_model(building, c)?.key());
    }

    let counterexample = if geometry_keys == r_theta_keys {
        None
    } else if let Some(key) = r_theta_keys.difference(&geometry_keys).next() {
        Some(format!(
            "flip-flop chamber outside the assembled geometry: {}",
            describe_model_chamber(&model, key)
        ))
    } else {
        r_theta_keys
            .symmetric_difference(&geometry_keys)
            .next()
            .map(|key| {
                format!(
                    "geometry chamber outside the flip-flop system: {}",
                    describe_model_chamber(&model, key)
                )
            })
    };

    Ok(GpgReport {
        residue_chambers: residue.chamber_count(),
        r_theta_size: r_theta_keys.len(),
        geometry_size: geometry_keys.len(),
        model_kind: model.kind,
        model_dim: model.dim,
        sigma,
        steps,
        counterexample,
    })
}

/// Extend a step gram to a form on the whole model space that vanishes
/// outside the step: zero on the lower member and on a complement of the
/// upper one, the given gram across the step.
fn embed_step_form(
    field: &Arc<Field>,
    sigma: Involution,
    lower: &Subspace,
    upper: &Subspace,
    step_chart: &QuotientChart,
    gram: &Matrix,
) -> Result<Form> {
    let s = step_chart.dim();
    let mut basis = lower.basis().clone();
    if basis.rows() == 0 {
        basis = step_chart.complement().clone();
    } else {
        basis = basis.vstack(step_chart.complement())?;
    }
    if !upper.is_full() {
        basis = basis.vstack(&upper.complement_total())?;
    }
    let m = basis.rows();
    let offset = lower.dim();
    let values = Matrix::from_fn(field.clone(), m, m, |i, j| {
        if i >= offset && i < offset + s && j >= offset && j < offset + s {
            gram.get(i - offset, j - offset)
        } else {
            field.zero()
        }
    });
    Form::from_values_on_basis(&basis, &values, sigma, field.one())
}

fn describe_model_chamber(model: &ResidueModel, key: &[u32]) -> String {
    for c in model.building.chambers() {
        if c.key() == key {
            let parts: Vec<String> = c
                .members()
                .iter()
                .map(|m| {
                    let rows: Vec<String> = (0..m.basis().rows())
                        .map(|r| {
                            let coords: Vec<String> = m
                                .basis()
                                .row(r)
                                .iter()
                                .map(|x| x.code().to_string())
                                .collect();
                            format!("({})", coords.join(","))
                        })
                        .collect();
                    format!("dim {}: {}", m.dim(), rows.join(" "))
                })
                .collect();
            return parts.join("; ");
        }
    }
    "unknown chamber".to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> Arc<Field> {
        match q {
            1 => unreachable!(),
            2 | 3 | 5 | 7 | 11 | 13 => Field::prime(q).unwrap(),
            4 => Field::with_default_modulus(2, 2).unwrap(),
            8 => Field::with_default_modulus(2, 3).unwrap(),
            9 => Field::with_default_modulus(3, 2).unwrap(),
            16 => Field::with_default_modulus(2, 4).unwrap(),
            25 => Field::with_default_modulus(5, 2).unwrap(),
            _ => panic!("unexpected order"),
        }
    }

    fn linear_building(q: u32, rank: usize) -> Building {
        Building::new_linear(f(q), rank, 1_000_000).unwrap()
    }

    fn symplectic_building(q: u32, witt: usize) -> Building {
        Building::new_polar(Form::symplectic(f(q), witt), 1_000_000).unwrap()
    }

    fn hermitian_flip(b: &Building) -> Flip {
        Flip::new(b, Form::hermitian(b.field().clone(), b.ambient_dim()).unwrap()).unwrap()
    }

    fn symmetric_flip(b: &Building) -> Flip {
        let field = b.field().clone();
        let gram = Matrix::identity(field.clone(), b.ambient_dim());
        Flip::new(b, Form::new(gram, Involution::Identity, field.one()).unwrap()).unwrap()
    }

    #[test]
    fn flip_images_are_involutive() {
        let a = linear_building(4, 2);
        let fa = hermitian_flip(&a);
        for c in a.chambers().iter().take(30) {
            let img = fa.chamber_image(c).unwrap();
            assert_eq!(&fa.chamber_image(&img).unwrap(), c);
            // duality reverses: member dims stay 1..=2 but come from perps
            assert_eq!(img.member(1).dim(), 1);
            assert_eq!(img.member(2).dim(), 2);
        }
        let c2 = symplectic_building(3, 2);
        let fc = symmetric_flip(&c2);
        for c in c2.chambers() {
            let img = fc.chamber_image(c).unwrap();
            assert_eq!(&fc.chamber_image(&img).unwrap(), c);
            // images stay totally isotropic, so they are chambers again
            assert!(c2.index_of(&img).is_ok());
        }
    }

    #[test]
    fn flip_constructor_rejects_incompatible_forms() {
        let c2 = symplectic_building(3, 2);
        let field = f(3);
        // Degenerate form: accepted as a form, rejected as a flip.
        let rank_deficient = Matrix::from_ints(
            field.clone(),
            &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]],
        )
        .unwrap();
        let degenerate = Form::new(rank_deficient, Involution::Identity, field.one()).unwrap();
        assert!(matches!(
            Flip::new(&c2, degenerate),
            Err(Error::Precondition(_))
        ));
        // A symmetric form that does not normalize the symplectic form.
        let gram = Matrix::from_ints(
            field.clone(),
            &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 1], &[0, 0, 1, 0]],
        )
        .unwrap();
        let omega = Form::new(gram, Involution::Identity, field.one()).unwrap();
        let err = Flip::new(&c2, omega).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        // Dimension mismatch.
        let a2 = linear_building(3, 2);
        let omega3 = Form::new(
            Matrix::identity(field.clone(), 3),
            Involution::Identity,
            field.one(),
        )
        .unwrap();
        assert!(Flip::new(&c2, omega3.clone()).is_err());
        assert!(Flip::new(&a2, omega3).is_ok());
    }

    #[test]
    fn opposition_matches_member_nondegeneracy() {
        // A chamber is opposite its image exactly when every member is
        // non-degenerate for the inducing form — checked exhaustively.
        let a = linear_building(4, 2);
        let fa = hermitian_flip(&a);
        let mut opposite = 0usize;
        for (i, c) in a.chambers().iter().enumerate() {
            let expect = c
                .members()
                .iter()
                .all(|m| fa.form().is_nondegenerate_on(m).unwrap());
            assert_eq!(fa.is_opposition_chamber(&a, i).unwrap(), expect);
            opposite += expect as usize;
        }
        assert_eq!(opposite, 24);

        let c2 = symplectic_building(3, 2);
        let fc = symmetric_flip(&c2);
        let mut opposite = 0usize;
        for (i, c) in c2.chambers().iter().enumerate() {
            let expect = c
                .members()
                .iter()
                .all(|m| fc.form().is_nondegenerate_on(m).unwrap());
            assert_eq!(fc.is_opposition_chamber(&c2, i).unwrap(), expect);
            opposite += expect as usize;
        }
        assert_eq!(opposite, 96);
    }

    #[test]
    fn codistance_twist_identity_holds() {
        let a = linear_building(4, 2);
        let fa = hermitian_flip(&a);
        for c in (0..a.chamber_count()).step_by(11) {
            for d in (0..a.chamber_count()).step_by(7) {
                assert!(fa.isometry_twist_holds(&a, c, d).unwrap());
            }
        }
        let c2 = symplectic_building(3, 2);
        let fc = symmetric_flip(&c2);
        for c in (0..c2.chamber_count()).step_by(13) {
            for d in (0..c2.chamber_count()).step_by(9) {
                assert!(fc.isometry_twist_holds(&c2, c, d).unwrap());
            }
        }
    }

    #[test]
    fn codistance_element_inverts_under_the_involution() {
        // δθ(τc) is determined by δθ(c): the involution permutes the
        // chamber set preserving the numerical codistance.
        let c2 = symplectic_building(3, 2);
        let fc = symmetric_flip(&c2);
        for c in 0..c2.chamber_count() {
            let img = fc.chamber_image(c2.chamber(c)).unwrap();
            let ci = c2.index_of(&img).unwrap();
            assert_eq!(
                fc.numerical_codistance(&c2, c).unwrap(),
                fc.numerical_codistance(&c2, ci).unwrap()
            );
        }
    }

    #[test]
    fn codistance_descends_without_local_minima() {
        // The numerical codistance has no strict local minima: every
        // chamber above the global minimum has a strictly better
        // neighbor in one of its panels, so greedy descent always
        // reaches the flip-flop system.  Along the way the panel
        // structure is pinned down: each panel carries at most two
        // codistance values, they differ by 1 or 2, and a gap of 2
        // isolates a unique worst chamber.
        let cases: [(Building, fn(&Building) -> Flip, [usize; 4]); 2] = [
            (linear_building(4, 2), hermitian_flip, [24, 72, 0, 9]),
            (symplectic_building(3, 2), symmetric_flip, [96, 48, 0, 16]),
        ];
        for (b, make_flip, histogram) in cases {
            let flip = make_flip(&b);
            let values: Vec<u64> = (0..b.chamber_count())
                .map(|c| flip.numerical_codistance(&b, c).unwrap())
                .collect();
            let mut observed = [0usize; 4];
            for &v in &values {
                observed[v as usize] += 1;
            }
            assert_eq!(observed, histogram);
            let global_min = *values.iter().min().unwrap();
            for c in 0..b.chamber_count() {
                let mut can_descend = false;
                for t in 1..=b.rank() {
                    let panel = b.panel(c, t).unwrap();
                    let panel_values: Vec<u64> =
                        panel.chambers().iter().map(|&d| values[d]).collect();
                    let lo = *panel_values.iter().min().unwrap();
                    let hi = *panel_values.iter().max().unwrap();
                    assert!(hi - lo <= 2, "panel spread exceeds 2");
                    assert!(
                        panel_values.iter().all(|&v| v == lo || v == hi),
                        "panel carries more than two codistance values"
                    );
                    if hi - lo == 2 {
                        let at_top = panel_values.iter().filter(|&&v| v == hi).count();
                        assert_eq!(at_top, 1, "gap-2 panel must have a unique worst chamber");
                    }
                    if panel_values.iter().any(|&v| v < values[c]) {
                        can_descend = true;
                    }
                }
                assert!(
                    can_descend || values[c] == global_min,
                    "chamber {c} is a strict local minimum above the global minimum"
                );
            }
        }
    }

    #[test]
    fn fixed_point_counts_follow_the_rank_one_trichotomy() {
        // Rank-one flips on a two-dimensional space: the number of fixed
        // projective points is (√q)+1 when σ is a proper involution, 0 or
        // 2 for symmetric forms in odd characteristic, and exactly 1 for
        // non-alternating symmetric forms in characteristic 2 — swept
        // over every non-degenerate hermitian form on every field of
        // order ≤ 25 carrying the automorphism.
        for q in [4u32, 9, 16, 25] {
            let field = f(q);
            let b = Building::new_linear(field.clone(), 1, 10_000).unwrap();
            let sqrt = (q as f64).sqrt() as usize;
            let fixed: Vec<FieldElement> = field
                .elements()
                .filter(|&x| field.apply(Involution::FrobeniusSqrt, x).unwrap() == x)
                .collect();
            let mut seen = 0usize;
            for &d1 in &fixed {
                for &d2 in &fixed {
                    for g12 in field.elements() {
                        let g21 = field.apply(Involution::FrobeniusSqrt, g12).unwrap();
                        let gram = Matrix::from_rows(
                            field.clone(),
                            vec![vec![d1, g12], vec![g21, d2]],
                        )
                        .unwrap();
                        if gram.rank() != 2 {
                            continue;
                        }
                        let omega =
                            Form::new(gram, Involution::FrobeniusSqrt, field.one()).unwrap();
                        let flip = Flip::new(&b, omega).unwrap();
                        assert_eq!(count_fixed_chambers(&b, &flip).unwrap(), sqrt + 1);
                        seen += 1;
                    }
                }
            }
            assert!(seen > 0);
        }
        for q in [3u32, 5, 7, 9, 11, 13, 25] {
            let field = f(q);
            let b = Building::new_linear(field.clone(), 1, 10_000).unwrap();
            let mut seen = [0usize; 3];
            for d1 in field.elements() {
                for d2 in field.elements() {
                    for g12 in field.elements() {
                        let gram = Matrix::from_rows(
                            field.clone(),
                            vec![vec![d1, g12], vec![g12, d2]],
                        )
                        .unwrap();
                        if gram.rank() != 2 {
                            continue;
                        }
                        let omega = Form::new(gram, Involution::Identity, field.one()).unwrap();
                        let flip = Flip::new(&b, omega).unwrap();
                        let count = count_fixed_chambers(&b, &flip).unwrap();
                        assert!(count == 0 || count == 2, "odd characteristic: {count}");
                        seen[count.min(2)] += 1;
                    }
                }
            }
            assert!(seen[0] > 0 && seen[2] > 0, "both flavors must occur");
        }
        for q in [2u32, 4, 8, 16] {
            let field = f(q);
            let b = Building::new_linear(field.clone(), 1, 10_000).unwrap();
            let mut seen = 0usize;
            for d1 in field.elements() {
                for d2 in field.elements() {
                    for g12 in field.elements() {
                        let gram = Matrix::from_rows(
                            field.clone(),
                            vec![vec![d1, g12], vec![g12, d2]],
                        )
                        .unwrap();
                        if gram.rank() != 2 {
                            continue;
                        }
                        let omega = Form::new(gram, Involution::Identity, field.one()).unwrap();
                        if d1.is_zero() && d2.is_zero() {
                            // alternating: induces the identity, rejected
                            assert!(Flip::new(&b, omega).is_err());
                            continue;
                        }
                        let flip = Flip::new(&b, omega).unwrap();
                        assert_eq!(count_fixed_chambers(&b, &flip).unwrap(), 1);
                        seen += 1;
                    }
                }
            }
            assert!(seen > 0);
        }
    }

    #[test]
    fn whole_building_flip_flop_system_collects_opposition() {
        let a = linear_building(4, 2);
        let fa = hermitian_flip(&a);
        let ffs = flip_flop_system(&a, &fa, &a.whole_residue()).unwrap();
        assert_eq!(ffs.min_codistance, 0);
        assert_eq!(ffs.max_codistance, 3); // chambers fixed by the flip exist
        assert_eq!(ffs.chambers.len(), 24);
        assert_eq!(ffs.chambers, opposition_chambers(&a, &fa).unwrap());

        let c2 = symplectic_building(3, 2);
        let fc = symmetric_flip(&c2);
        let ffs = flip_flop_system(&c2, &fc, &c2.whole_residue()).unwrap();
        assert_eq!(ffs.min_codistance, 0);
        assert_eq!(ffs.max_codistance, 3); // no fixed chambers over F_3
        assert_eq!(ffs.chambers.len(), 96);
    }

    fn isotropic_point(b: &Building, flip: &Flip) -> Subspace {
        for c in b.chambers() {
            let p = c.member(1);
            let img = flip.subspace_image(p).unwrap();
            let isotropic = match b.kind() {
                GeometryKind::A => img.contains(p),
                _ => flip.form().gram_on(p.basis()).unwrap().is_zero(),
            };
            if isotropic {
                return p.clone();
            }
        }
        panic!("no isotropic point found");
    }

    #[test]
    fn gate_description_holds_on_whole_buildings() {
        let a = linear_building(4, 2);
        let fa = hermitian_flip(&a);
        let rep = characterize_r_theta(&a, &fa, &a.whole_residue()).unwrap();
        assert!(rep.verified());
        assert_eq!(rep.q_chambers, a.chamber_count());
        assert_eq!(rep.residue_codistance, 3);
        assert_eq!(rep.min_codistance, 0);
        assert_eq!(rep.max_codistance, 3); // flip-fixed chambers exist

        let c2 = symplectic_building(3, 2);
        let fc = symmetric_flip(&c2);
        let rep = characterize_r_theta(&c2, &fc, &c2.whole_residue()).unwrap();
        assert!(rep.verified());
        assert_eq!(rep.residue_codistance, 4);
        assert_eq!(rep.min_codistance, 0);
        assert_eq!(rep.max_codistance, 3); // but no flip-fixed chambers
    }

    #[test]
    fn gate_description_holds_on_point_residues() {
        // Residue of an isotropic point in the hermitian plane: the
        // coprojection residue is the single chamber through the point
        // and its perp, and the flip-flop system is the remaining
        // chambers of the panel.
        let a = linear_building(4, 2);
        let fa = hermitian_flip(&a);
        let p = isotropic_point(&a, &fa);
        let r = a.residue(std::slice::from_ref(&p)).unwrap();
        assert_eq!(r.chamber_count(), 5);
        let rep = characterize_r_theta(&a, &fa, &r).unwrap();
        assert!(rep.verified());
        assert_eq!(rep.q_chambers, 1);
        assert_eq!(rep.residue_codistance, 3);
        // The unique chamber through the point and its perp is fixed by
        // the flip; the remaining chambers of the panel do strictly
        // better.
        assert_eq!(rep.max_codistance, 3);
        assert_eq!(rep.min_codistance, 1);
        let ffs = flip_flop_system(&a, &fa, &r).unwrap();
        assert_eq!(ffs.chambers.len(), 4);

        let c2 = symplectic_building(3, 2);
        let fc = symmetric_flip(&c2);
        let p = isotropic_point(&c2, &fc);
        let r = c2.residue(std::slice::from_ref(&p)).unwrap();
        let rep = characterize_r_theta(&c2, &fc, &r).unwrap();
        assert!(rep.verified());
    }

    #[test]
    fn geometry_comparison_verifies_whole_buildings() {
        let a = linear_building(4, 2);
        let fa = hermitian_flip(&a);
        let rep = gpg_compare(&a, &fa, &a.whole_residue(), 1_000_000).unwrap();
        assert!(rep.verified(), "{:?}", rep.counterexample);
        assert_eq!(rep.r_theta_size, 24);
        assert_eq!(rep.geometry_size, 24);
        assert_eq!(rep.model_kind, GeometryKind::A);
        assert_eq!(rep.sigma, Involution::FrobeniusSqrt);
        assert_eq!(rep.steps.len(), 1);
        assert!(rep.steps[0].fitted);

        let c2 = symplectic_building(3, 2);
        let fc = symmetric_flip(&c2);
        let rep = gpg_compare(&c2, &fc, &c2.whole_residue(), 1_000_000).unwrap();
        assert!(rep.verified(), "{:?}", rep.counterexample);
        assert_eq!(rep.r_theta_size, 96);
        assert_eq!(rep.model_kind, GeometryKind::C);
        assert_eq!(rep.sigma, Involution::Identity);
    }

    #[test]
    fn geometry_comparison_verifies_point_residue() {
        let a = linear_building(4, 2);
        let fa = hermitian_flip(&a);
        let p = isotropic_point(&a, &fa);
        let r = a.residue(std::slice::from_ref(&p)).unwrap();
        let rep = gpg_compare(&a, &fa, &r, 1_000_000).unwrap();
        assert!(rep.verified(), "{:?}", rep.counterexample);
        assert_eq!(rep.r_theta_size, 4);
        assert_eq!(rep.model_kind, GeometryKind::A);
        assert_eq!(rep.model_dim, 2);
        // Both steps are rank-one: no calibration necessary.
        assert!(rep.steps.iter().all(|s| !s.fitted));
    }

    #[test]
    fn geometry_comparison_verifies_lagrangian_residue() {
        // Fix a point and vary the Lagrangians through it: the model is
        // the rank-one polar building on p^⊥/p.  Over F_9 the flip fixes
        // some points (the perp composition has eigenvectors there), so
        // the residue equals its own coprojection and the single flag
        // step is calibrated from the induced involution.
        let c2 = symplectic_building(9, 2);
        let fc = symmetric_flip(&c2);
        let fixed_p = c2
            .chambers()
            .iter()
            .map(|c| c.member(1).clone())
            .find(|p| fc.subspace_image(p).unwrap() == *p)
            .expect("the perp composition has an eigenvector over F_9");
        let r = c2.residue(std::slice::from_ref(&fixed_p)).unwrap();
        assert_eq!(r.chamber_count(), 10);
        let rep = characterize_r_theta(&c2, &fc, &r).unwrap();
        assert!(rep.verified());
        assert_eq!(rep.q_chambers, 10); // Q = R when the point is fixed
        let gpg = gpg_compare(&c2, &fc, &r, 1_000_000).unwrap();
        assert!(gpg.verified(), "{:?}", gpg.counterexample);
        assert_eq!(gpg.model_kind, GeometryKind::C);
        assert_eq!(gpg.model_dim, 2);
        assert_eq!(gpg.r_theta_size, 8);
        assert!(gpg.steps[0].fitted);
    }

    #[test]
    fn point_row_of_eigenspace_lagrangian_is_all_minimal() {
        // Over F_9 the perp composition of the symmetric flip squares to
        // −1, so its eigenspace Lagrangians are genuinely fixed and the
        // map acts on them as a scalar.  The induced involution on the
        // point row of such a Lagrangian is trivial: every chamber of the
        // residue has the same codistance and the flip-flop system is the
        // whole residue.  The minimality description must degrade
        // gracefully to that case.
        let c2 = symplectic_building(9, 2);
        let fc = symmetric_flip(&c2);
        let fixed_l = c2
            .chambers()
            .iter()
            .map(|c| c.member(2).clone())
            .find(|l| fc.subspace_image(l).unwrap() == *l)
            .expect("an eigenspace Lagrangian exists over F_9");
        let r = c2.residue(std::slice::from_ref(&fixed_l)).unwrap();
        assert_eq!(r.chamber_count(), 10);
        let rep = characterize_r_theta(&c2, &fc, &r).unwrap();
        assert!(rep.verified(), "{rep:?}");
        assert_eq!(rep.q_chambers, 10);
        assert_eq!(rep.min_codistance, rep.max_codistance);
        let ffs = flip_flop_system(&c2, &fc, &r).unwrap();
        assert_eq!(ffs.chambers.len(), 10);
        // No sesquilinear family reproduces a trivial involution, so the
        // assembled-geometry comparison refuses this residue outright.
        assert!(matches!(
            gpg_compare(&c2, &fc, &r, 1_000_000),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn geometry_comparison_with_moved_point_residue() {
        // A point notfixed by the flip but perpendicular to its image:
        // the coprojection residue is a proper sub-residue.
        let c2 = symplectic_building(3, 2);
        let fc = symmetric_flip(&c2);
        let j = c2.defining_form().unwrap();
        let moved = c2
            .chambers()
            .iter()
            .map(|c| c.member(1).clone())
            .find(|p| {
                let img = fc.subspace_image(p).unwrap();
                img != *p
                    && j.eval(&p.basis().row_vec(0), &img.basis().row_vec(0))
                        .unwrap()
                        .is_zero()
            });
        if let Some(p) = moved {
            let r = c2.residue(std::slice::from_ref(&p)).unwrap();
            let rep = characterize_r_theta(&c2, &fc, &r).unwrap();
            assert!(rep.verified());
            assert!(rep.q_chambers < r.chamber_count());
            let gpg = gpg_compare(&c2, &fc, &r, 1_000_000).unwrap();
            assert!(gpg.verified(), "{:?}", gpg.counterexample);
        } else {
            panic!("expected a moved-but-perpendicular point over F_3");
        }
    }
}
