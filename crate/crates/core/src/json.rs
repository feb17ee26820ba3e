//! Stable JSON documents for every value that crosses the CLI boundary.
//!
//! Each `*Doc` type is a plain serde struct; its field order fixes the byte
//! layout of the emitted object, so emit → parse → emit is the identity on
//! bytes. Field elements travel as their base-`p` digit codes (the
//! little-endian coefficient vector of the polynomial representative packed
//! into one integer), and every document either embeds its field descriptor
//! or is decoded against an explicitly supplied field, so a document plus
//! its descriptor reproduces the original value exactly.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::building::{Building, Flip};
use crate::complex::homology::{HomologyReport, ReportMode};
use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, Involution};
use crate::form::Form;
use crate::matrix::Matrix;
use crate::phan::{ambient_model, BoundCheck, CompatibleFamily, Flag, Geometry, GeometryKind, GeometrySpec};
use crate::subspace::Subspace;

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------

/// `{"p": 3, "degree": 2, "modulus": [1, 0, 1]}` — the modulus is the full
/// little-endian coefficient vector of the defining polynomial, monic
/// leading coefficient spelled out (`[0, 1]` for prime fields).
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct FieldDoc {
    pub p: u32,
    pub degree: u32,
    pub modulus: Vec<u32>,
}

impl FieldDoc {
    pub fn encode(field: &Arc<Field>) -> FieldDoc {
        FieldDoc {
            p: field.characteristic(),
            degree: field.degree(),
            modulus: field.modulus().to_vec(),
        }
    }

    pub fn decode(&self) -> Result<Arc<Field>> {
        Ok(Field::new(self.p, self.degree, self.modulus.clone())?)
    }
}

/// Name-level parse used by document decoding and the CLI: `"id"` or
/// `"frob"`, matching how [`Involution`] displays itself.
pub fn involution_from_name(name: &str) -> Result<Involution> {
    match name {
        "id" => Ok(Involution::Identity),
        "frob" => Ok(Involution::FrobeniusSqrt),
        other => Err(Error::invalid(format!(
            "unknown involution {other:?}; expected \"id\" or \"frob\""
        ))),
    }
}

fn kind_from_name(name: &str) -> Result<GeometryKind> {
    match name {
        "A" => Ok(GeometryKind::A),
        "B" => Ok(GeometryKind::B),
        "C" => Ok(GeometryKind::C),
        other => Err(Error::invalid(format!(
            "unknown type {other:?}; expected \"A\", \"B\" or \"C\""
        ))),
    }
}

/// Parse a compact building name like `"A2"`, `"B3"` or `"C2"` into its
/// kind and rank. Rank must be at least 1.
pub fn parse_building_name(name: &str) -> Result<(GeometryKind, usize)> {
    let mut chars = name.chars();
    let head = chars
        .next()
        .ok_or_else(|| Error::invalid("empty building name"))?;
    let kind = kind_from_name(&head.to_string())?;
    let rank: usize = chars
        .as_str()
        .parse()
        .map_err(|_| Error::invalid(format!("bad rank in building name {name:?}")))?;
    if rank == 0 {
        return Err(Error::invalid("building rank must be at least 1"));
    }
    Ok((kind, rank))
}

// ---------------------------------------------------------------------------
// Subspaces and forms
// ---------------------------------------------------------------------------

/// `{"ambient": 4, "basis": [[...], ...]}` with one row per basis vector,
/// entries as element codes. Always emitted in canonical reduced echelon
/// form; decoding re-canonicalizes, so the emitted bytes are a fixed point.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct SubspaceDoc {
    pub ambient: usize,
    pub basis: Vec<Vec<u32>>,
}

impl SubspaceDoc {
    pub fn encode(space: &Subspace) -> SubspaceDoc {
        SubspaceDoc {
            ambient: space.ambient(),
            basis: matrix_codes(space.basis()),
        }
    }

    pub fn decode(&self, field: &Arc<Field>) -> Result<Subspace> {
        if self.basis.is_empty() {
            return Ok(Subspace::zero(field.clone(), self.ambient));
        }
        for row in &self.basis {
            if row.len() != self.ambient {
                return Err(Error::invalid(format!(
                    "basis row of length {} in ambient dimension {}",
                    row.len(),
                    self.ambient
                )));
            }
        }
        Subspace::from_rows(field.clone(), rows_from_codes(field, &self.basis)?)
    }
}

/// `{"gram": [[...]], "sigma": "id"|"frob", "epsilon": 1|-1}`. The gram
/// matrix is written row by row in element codes; epsilon is the literal
/// integer, not a code.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct FormDoc {
    pub gram: Vec<Vec<u32>>,
    pub sigma: String,
    pub epsilon: i32,
}

impl FormDoc {
    pub fn encode(form: &Form) -> FormDoc {
        FormDoc {
            gram: matrix_codes(form.gram()),
            sigma: form.sigma().to_string(),
            epsilon: if form.epsilon() == form.field().one() {
                1
            } else {
                -1
            },
        }
    }

    pub fn decode(&self, field: &Arc<Field>) -> Result<Form> {
        let sigma = involution_from_name(&self.sigma)?;
        let epsilon = match self.epsilon {
            1 => field.one(),
            -1 => field.minus_one(),
            other => {
                return Err(Error::invalid(format!(
                    "epsilon must be 1 or -1, got {other}"
                )))
            }
        };
        let gram = Matrix::from_rows(field.clone(), rows_from_codes(field, &self.gram)?)?;
        Form::new(gram, sigma, epsilon)
    }
}

// ---------------------------------------------------------------------------
// Geometries
// ---------------------------------------------------------------------------

/// One geometry component: the flag lists proper members only (the zero and
/// full spaces are implied), and the forms are listed innermost first, one
/// per flag step. For types B and C the ambient form is the standard model
/// determined by `type`, `n` and the field, so it is not repeated here.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct ComponentDoc {
    #[serde(rename = "type")]
    pub kind: String,
    pub n: usize,
    pub field: FieldDoc,
    pub flag: Vec<SubspaceDoc>,
    pub forms: Vec<FormDoc>,
}

impl ComponentDoc {
    pub fn encode(spec: &GeometrySpec) -> ComponentDoc {
        ComponentDoc {
            kind: spec.kind().to_string(),
            n: spec.rank(),
            field: FieldDoc::encode(spec.field()),
            flag: spec.flag().proper_members().iter().map(SubspaceDoc::encode).collect(),
            forms: spec.family().forms().iter().map(FormDoc::encode).collect(),
        }
    }

    pub fn decode(&self) -> Result<GeometrySpec> {
        let kind = kind_from_name(&self.kind)?;
        let field = self.field.decode()?;
        let ambient = crate::phan::ambient_dim(kind, self.n);
        let proper = self
            .flag
            .iter()
            .map(|doc| doc.decode(&field))
            .collect::<Result<Vec<_>>>()?;
        let flag = Flag::from_proper(field.clone(), ambient, proper)?;
        let forms = self
            .forms
            .iter()
            .map(|doc| doc.decode(&field))
            .collect::<Result<Vec<_>>>()?;
        let family = CompatibleFamily::new(&flag, forms)?;
        match kind {
            GeometryKind::A => GeometrySpec::new_a(flag, family),
            _ => {
                let model = ambient_model(kind, self.n, &field)?
                    .expect("B/C kinds always carry an ambient model");
                GeometrySpec::new_bc(kind, model, flag, family)
            }
        }
    }
}

/// `{"type": ..., "n": ..., "field": ..., "flag": [...], "forms": [...],
/// "intersect_with": [...]}` — the base component inline plus any further
/// components whose point sets are intersected with it, each restated in
/// full.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct GeometryDoc {
    #[serde(rename = "type")]
    pub kind: String,
    pub n: usize,
    pub field: FieldDoc,
    pub flag: Vec<SubspaceDoc>,
    pub forms: Vec<FormDoc>,
    pub intersect_with: Vec<ComponentDoc>,
}

impl GeometryDoc {
    pub fn encode(geometry: &Geometry) -> GeometryDoc {
        let base = ComponentDoc::encode(&geometry.components()[0]);
        GeometryDoc {
            kind: base.kind,
            n: base.n,
            field: base.field,
            flag: base.flag,
            forms: base.forms,
            intersect_with: geometry.components()[1..]
                .iter()
                .map(ComponentDoc::encode)
                .collect(),
        }
    }

    pub fn decode(&self) -> Result<Geometry> {
        let base = ComponentDoc {
            kind: self.kind.clone(),
            n: self.n,
            field: self.field.clone(),
            flag: self.flag.clone(),
            forms: self.forms.clone(),
        };
        let mut components = vec![base.decode()?];
        for doc in &self.intersect_with {
            components.push(doc.decode()?);
        }
        Geometry::new(components)
    }
}

/// The rank-bound fragment attached to geometry reports:
/// `{"field_bound_ok": true, "bound": 24, "field_order": 25}`. Reported
/// only — no operation refuses to run below the bound.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct BoundDoc {
    pub field_bound_ok: bool,
    pub bound: u64,
    pub field_order: u64,
}

impl BoundDoc {
    pub fn encode(check: &BoundCheck) -> BoundDoc {
        BoundDoc {
            field_bound_ok: check.ok,
            bound: check.bound,
            field_order: check.field_order,
        }
    }
}

// ---------------------------------------------------------------------------
// Complexes and homology reports
// ---------------------------------------------------------------------------

/// A complex as a vertex label table plus its maximal faces (vertex indices
/// into the table, strictly increasing within each face).
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct ComplexDoc {
    pub vertices: Vec<String>,
    pub maximal_faces: Vec<Vec<u32>>,
}

impl ComplexDoc {
    pub fn encode(complex: &SimplicialComplex) -> ComplexDoc {
        ComplexDoc {
            vertices: complex.labels().to_vec(),
            maximal_faces: complex.maximal_faces(),
        }
    }

    pub fn decode(&self) -> Result<SimplicialComplex> {
        SimplicialComplex::from_faces(self.vertices.clone(), &self.maximal_faces)
    }
}

/// `{"betti_reduced": [...], "torsion": [[...]], "euler": ...,
/// "spherical_up_to": ..., "mode": "exact"|"modular"}`. Betti numbers and
/// torsion lists are indexed by dimension starting at 0.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct HomologyDoc {
    pub betti_reduced: Vec<u64>,
    pub torsion: Vec<Vec<u64>>,
    pub euler: i64,
    pub spherical_up_to: i64,
    pub mode: String,
}

impl HomologyDoc {
    pub fn encode(report: &HomologyReport) -> HomologyDoc {
        HomologyDoc {
            betti_reduced: report.betti_reduced.clone(),
            torsion: report.torsion.clone(),
            euler: report.euler,
            spherical_up_to: report.spherical_up_to,
            mode: match report.mode {
                ReportMode::Exact => "exact".to_string(),
                ReportMode::ModularRank => "modular".to_string(),
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Buildings and flips
// ---------------------------------------------------------------------------

/// `{"type": "C", "n": 2, "field": {...}}` — always the standard model for
/// the given kind, rank and field.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct BuildingDoc {
    #[serde(rename = "type")]
    pub kind: String,
    pub n: usize,
    pub field: FieldDoc,
}

impl BuildingDoc {
    pub fn encode(building: &Building) -> BuildingDoc {
        BuildingDoc {
            kind: building.kind().to_string(),
            n: building.rank(),
            field: FieldDoc::encode(building.field()),
        }
    }

    pub fn decode(&self, budget: u64) -> Result<Building> {
        let kind = kind_from_name(&self.kind)?;
        let field = self.field.decode()?;
        match kind {
            GeometryKind::A => Building::new_linear(field, self.n, budget),
            _ => {
                let model = ambient_model(kind, self.n, &field)?
                    .expect("B/C kinds always carry an ambient model");
                Building::new_polar(model, budget)
            }
        }
    }
}

/// A flip is its inducing form plus the building it acts on: all the
/// [`FormDoc`] fields inline, then `"building"`.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct FlipDoc {
    #[serde(flatten)]
    pub form: FormDoc,
    pub building: BuildingDoc,
}

impl FlipDoc {
    pub fn encode(building: &Building, flip: &Flip) -> FlipDoc {
        FlipDoc {
            form: FormDoc::encode(flip.form()),
            building: BuildingDoc::encode(building),
        }
    }

    pub fn decode(&self, budget: u64) -> Result<(Building, Flip)> {
        let building = self.building.decode(budget)?;
        let omega = self.form.decode(building.field())?;
        let flip = Flip::new(&building, omega)?;
        Ok((building, flip))
    }
}

/// One claim-level verification record:
/// `{"claim": ..., "status": ..., "chambers": ..., "counterexample": ...}`.
/// Status is one of `"verified"`, `"refuted-with-counterexample"`,
/// `"skipped-budget"` or `"no-witness"`; the counterexample is `null`
/// unless the status carries one.
#[derive(Serialize, Deserialize, Clone, PartialEq, Debug)]
pub struct VerificationRecord {
    pub claim: String,
    pub status: String,
    pub chambers: u64,
    pub counterexample: Option<serde_json::Value>,
}

// ---------------------------------------------------------------------------
// Shared element-code plumbing
// ---------------------------------------------------------------------------

fn matrix_codes(m: &Matrix) -> Vec<Vec<u32>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|e| e.code()).collect())
        .collect()
}

fn rows_from_codes(field: &Arc<Field>, rows: &[Vec<u32>]) -> Result<Vec<Vec<FieldElement>>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|&code| field.element(code).map_err(Error::from))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::homology::{reduced_homology, HomologyMode, HomologyOptions};

    fn f(q: u32) -> Arc<Field> {
        match q {
            2 | 3 | 5 | 7 => Field::prime(q).unwrap(),
            4 => Field::with_default_modulus(2, 2).unwrap(),
            9 => Field::with_default_modulus(3, 2).unwrap(),
            25 => Field::with_default_modulus(5, 2).unwrap(),
            _ => panic!("no fixture for order {q}"),
        }
    }

    fn round_trip<T>(doc: &T) -> String
    where
        T: Serialize + for<'de> Deserialize<'de> + PartialEq + std::fmt::Debug,
    {
        let bytes = serde_json::to_string(doc).unwrap();
        let back: T = serde_json::from_str(&bytes).unwrap();
        assert_eq!(&back, doc);
        assert_eq!(serde_json::to_string(&back).unwrap(), bytes);
        bytes
    }

    #[test]
    fn field_document_bytes_are_stable() {
        let f9 = Field::new(3, 2, vec![1, 0, 1]).unwrap();
        let doc = FieldDoc::encode(&f9);
        assert_eq!(
            round_trip(&doc),
            r#"{"p":3,"degree":2,"modulus":[1,0,1]}"#
        );
        assert_eq!(doc.decode().unwrap().order(), 9);

        let f7 = FieldDoc::encode(&f(7));
        assert_eq!(round_trip(&f7), r#"{"p":7,"degree":1,"modulus":[0,1]}"#);

        let bad = FieldDoc {
            p: 4,
            degree: 1,
            modulus: vec![0, 1],
        };
        assert!(bad.decode().is_err());
    }

    #[test]
    fn subspace_document_round_trips_canonically() {
        let field = f(4);
        let a = field.gen();
        // Deliberately non-echelon input rows; the document must still hold
        // the canonical form.
        let space = Subspace::from_rows(
            field.clone(),
            vec![
                vec![a, field.one(), field.zero(), a],
                vec![field.one(), a, field.one(), field.zero()],
            ],
        )
        .unwrap();
        let doc = SubspaceDoc::encode(&space);
        let bytes = round_trip(&doc);
        let back = doc.decode(&field).unwrap();
        assert_eq!(back, space);
        assert_eq!(serde_json::to_string(&SubspaceDoc::encode(&back)).unwrap(), bytes);

        let zero = Subspace::zero(field.clone(), 3);
        let zero_doc = SubspaceDoc::encode(&zero);
        assert_eq!(round_trip(&zero_doc), r#"{"ambient":3,"basis":[]}"#);
        assert_eq!(zero_doc.decode(&field).unwrap(), zero);

        let ragged = SubspaceDoc {
            ambient: 3,
            basis: vec![vec![1, 0]],
        };
        assert!(ragged.decode(&field).is_err());
    }

    #[test]
    fn form_document_bytes_are_stable() {
        let sp = Form::symplectic(f(3), 2);
        let doc = FormDoc::encode(&sp);
        assert_eq!(
            round_trip(&doc),
            r#"{"gram":[[0,0,0,1],[0,0,1,0],[0,2,0,0],[2,0,0,0]],"sigma":"id","epsilon":-1}"#
        );
        assert_eq!(doc.decode(&f(3)).unwrap(), sp);

        let herm = Form::hermitian(f(4), 2).unwrap();
        let herm_doc = FormDoc::encode(&herm);
        assert_eq!(
            round_trip(&herm_doc),
            r#"{"gram":[[1,0],[0,1]],"sigma":"frob","epsilon":1}"#
        );
        assert_eq!(herm_doc.decode(&f(4)).unwrap(), herm);

        let mut bad_sigma = herm_doc.clone();
        bad_sigma.sigma = "conj".into();
        assert!(bad_sigma.decode(&f(4)).is_err());

        let mut bad_eps = herm_doc;
        bad_eps.epsilon = 0;
        assert!(bad_eps.decode(&f(4)).is_err());
    }

    #[test]
    fn geometry_document_round_trips() {
        let field = f(3);
        let flag = Flag::trivial(field.clone(), 4);
        let omega = Form::new(Matrix::identity(field.clone(), 4), Involution::Identity, field.one()).unwrap();
        let family = CompatibleFamily::new(&flag, vec![omega]).unwrap();
        let ambient = Form::symplectic(field.clone(), 2);
        let spec = GeometrySpec::new_bc(GeometryKind::C, ambient, flag, family).unwrap();
        let geometry = Geometry::single(spec.clone());

        let doc = GeometryDoc::encode(&geometry);
        let bytes = round_trip(&doc);
        assert!(bytes.starts_with(r#"{"type":"C","n":2,"field":{"p":3,"#));
        assert!(bytes.ends_with(r#""intersect_with":[]}"#));
        let back = doc.decode().unwrap();
        assert_eq!(back.components().len(), 1);
        assert_eq!(back.components()[0].kind(), GeometryKind::C);
        assert_eq!(serde_json::to_string(&GeometryDoc::encode(&back)).unwrap(), bytes);

        let pair = Geometry::new(vec![spec.clone(), spec]).unwrap();
        let pair_doc = GeometryDoc::encode(&pair);
        let pair_bytes = round_trip(&pair_doc);
        let pair_back = pair_doc.decode().unwrap();
        assert_eq!(pair_back.components().len(), 2);
        assert_eq!(
            serde_json::to_string(&GeometryDoc::encode(&pair_back)).unwrap(),
            pair_bytes
        );
    }

    #[test]
    fn bound_fragment_bytes_are_stable() {
        let doc = BoundDoc::encode(&BoundCheck {
            bound: 24,
            field_order: 25,
            ok: true,
        });
        assert_eq!(
            round_trip(&doc),
            r#"{"field_bound_ok":true,"bound":24,"field_order":25}"#
        );
    }

    #[test]
    fn complex_document_round_trips() {
        let triangle = SimplicialComplex::from_faces(
            vec!["a".into(), "b".into(), "c".into()],
            &[vec![0, 1], vec![0, 2], vec![1, 2]],
        )
        .unwrap();
        let doc = ComplexDoc::encode(&triangle);
        assert_eq!(
            round_trip(&doc),
            r#"{"vertices":["a","b","c"],"maximal_faces":[[0,1],[0,2],[1,2]]}"#
        );
        let back = doc.decode().unwrap();
        assert_eq!(back, triangle);
    }

    #[test]
    fn homology_document_bytes_are_stable() {
        let triangle = SimplicialComplex::from_faces(
            vec!["a".into(), "b".into(), "c".into()],
            &[vec![0, 1], vec![0, 2], vec![1, 2]],
        )
        .unwrap();
        let report = reduced_homology(&triangle, &HomologyOptions::default()).unwrap();
        let doc = HomologyDoc::encode(&report);
        assert_eq!(
            round_trip(&doc),
            r#"{"betti_reduced":[0,1],"torsion":[[],[]],"euler":0,"spherical_up_to":0,"mode":"exact"}"#
        );

        let modular = reduced_homology(
            &triangle,
            &HomologyOptions {
                mode: HomologyMode::Modular(vec![2, 3]),
                ..HomologyOptions::default()
            },
        )
        .unwrap();
        assert_eq!(HomologyDoc::encode(&modular).mode, "modular");
    }

    #[test]
    fn flip_document_round_trips() {
        let field = f(3);
        let building = Building::new_polar(Form::symplectic(field.clone(), 2), 1_000_000).unwrap();
        let omega = Form::new(Matrix::identity(field.clone(), 4), Involution::Identity, field.one()).unwrap();
        let flip = Flip::new(&building, omega).unwrap();

        let doc = FlipDoc::encode(&building, &flip);
        let bytes = round_trip(&doc);
        assert!(bytes.starts_with(r#"{"gram":[[1,0,0,0],"#));
        assert!(bytes.contains(r#""building":{"type":"C","n":2,"field":{"p":3,"degree":1,"modulus":[0,1]}}"#));

        let (back_building, back_flip) = doc.decode(1_000_000).unwrap();
        assert_eq!(back_building.chamber_count(), building.chamber_count());
        assert_eq!(back_flip.form(), flip.form());
    }

    #[test]
    fn building_names_parse() {
        assert_eq!(parse_building_name("A2").unwrap(), (GeometryKind::A, 2));
        assert_eq!(parse_building_name("B3").unwrap(), (GeometryKind::B, 3));
        assert_eq!(parse_building_name("C2").unwrap(), (GeometryKind::C, 2));
        assert!(parse_building_name("D4").is_err());
        assert!(parse_building_name("A0").is_err());
        assert!(parse_building_name("").is_err());
        assert!(parse_building_name("Axy").is_err());
    }

    #[test]
    fn verification_record_bytes_are_stable() {
        let record = VerificationRecord {
            claim: "involution-images".into(),
            status: "verified".into(),
            chambers: 1170,
            counterexample: None,
        };
        assert_eq!(
            round_trip(&record),
            r#"{"claim":"involution-images","status":"verified","chambers":1170,"counterexample":null}"#
        );

        let refuted = VerificationRecord {
            claim: "involution-images".into(),
            status: "refuted-with-counterexample".into(),
            chambers: 12,
            counterexample: Some(serde_json::json!({"chamber": [0, 1]})),
        };
        let bytes = round_trip(&refuted);
        assert!(bytes.ends_with(r#""counterexample":{"chamber":[0,1]}}"#));
    }
}
