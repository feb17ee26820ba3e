//! Finite simplicial complexes.
//!
//! A complex stores its faces as sorted vertex-id tuples, closed under
//! taking subsets; the empty face is implicit (it participates in reduced
//! homology but is not stored). Vertices carry string labels so complexes
//! built from subspace sets stay self-describing.
//!
//! Submodules: [`snf`] for exact integer linear algebra, [`homology`] for
//! reduced homology and connectivity verdicts, [`pi1`] for bounded-effort
//! fundamental-group analysis.

pub mod homology;
pub mod pi1;
pub mod snf;

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::subspace::Subspace;

/// A finite abstract simplicial complex with labeled vertices.
///
/// `faces` holds every nonempty face; construction closes the input
/// downward. A complex with no faces is the empty complex (its only face
/// is the implicit empty one).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    labels: Vec<String>,
    faces: BTreeSet<Vec<u32>>,
}

impl SimplicialComplex {
    pub fn empty() -> SimplicialComplex {
        SimplicialComplex {
            labels: Vec::new(),
            faces: BTreeSet::new(),
        }
    }

    /// Build from generating faces (vertex-id tuples into `labels`); the
    /// face set is closed downward. Duplicate ids inside one face are
    /// rejected.
    pub fn from_faces(labels: Vec<String>, generating: &[Vec<u32>]) -> Result<SimplicialComplex> {
        let mut faces: BTreeSet<Vec<u32>> = BTreeSet::new();
        for face in generating {
            let mut f = face.clone();
            f.sort_unstable();
            let before = f.len();
            f.dedup();
            if f.len() != before {
                return Err(Error::invalid("face with a repeated vertex"));
            }
            if let Some(&max) = f.last() {
                if max as usize >= labels.len() {
                    return Err(Error::invalid(format!(
                        "vertex id {max} has no label (only {} labels)",
                        labels.len()
                    )));
                }
            }
            if f.is_empty() {
                continue;
            }
            insert_closed(&mut faces, &f);
        }
        Ok(SimplicialComplex { labels, faces })
    }

    /// A single full simplex on `n` fresh vertices, with all its faces.
    pub fn simplex(n: usize) -> SimplicialComplex {
        let labels = (0..n).map(|i| format!("v{i}")).collect();
        let top: Vec<u32> = (0..n as u32).collect();
        SimplicialComplex::from_faces(labels, &[top]).expect("valid simplex input")
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Dimension of the complex; `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.faces.iter().map(|f| f.len() - 1).max()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: u32) -> &str {
        &self.labels[v as usize]
    }

    /// Vertex ids that actually occur in a face.
    pub fn vertices(&self) -> Vec<u32> {
        self.faces
            .iter()
            .filter(|f| f.len() == 1)
            .map(|f| f[0])
            .collect()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// `counts[k]` = number of k-dimensional faces.
    pub fn face_counts(&self) -> Vec<usize> {
        let Some(d) = self.dim() else {
            return Vec::new();
        };
        let mut counts = vec![0usize; d + 1];
        for f in &self.faces {
            counts[f.len() - 1] += 1;
        }
        counts
    }

    pub fn faces_of_dim(&self, k: usize) -> Vec<&Vec<u32>> {
        self.faces.iter().filter(|f| f.len() == k + 1).collect()
    }

    pub fn faces(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.faces.iter()
    }

    pub fn contains_face(&self, face: &[u32]) -> bool {
        let mut f = face.to_vec();
        f.sort_unstable();
        f.dedup();
        if f.is_empty() {
            return true; // the implicit empty face
        }
        self.faces.contains(&f)
    }

    /// Faces not properly contained in any other face.
    pub fn maximal_faces(&self) -> Vec<Vec<u32>> {
        let mut by_size: Vec<&Vec<u32>> = self.faces.iter().collect();
        by_size.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        let mut out: Vec<Vec<u32>> = Vec::new();
        for f in by_size {
            if !out.iter().any(|g| f.len() < g.len() && is_subset(f, g)) {
                out.push(f.clone());
            }
        }
        out.sort();
        out
    }

    /// Number of connected components of the vertex set under edges,
    /// by union–find; 0 for the empty complex.
    pub fn component_count(&self) -> usize {
        let verts = self.vertices();
        if verts.is_empty() {
            return 0;
        }
        let index: BTreeMap<u32, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for f in &self.faces {
            if f.len() == 2 {
                uf.union(index[&f[0]], index[&f[1]]);
            }
        }
        uf.count()
    }

    /// Link, closed star, and boundary of a face, as subcomplexes on the
    /// same label table.
    pub fn link_star_boundary(
        &self,
        face: &[u32],
    ) -> Result<(SimplicialComplex, SimplicialComplex, SimplicialComplex)> {
        let mut s = face.to_vec();
        s.sort_unstable();
        s.dedup();
        if !s.is_empty() && !self.faces.contains(&s) {
            return Err(Error::pre("face is not in the complex"));
        }
        let mut link = BTreeSet::new();
        let mut star = BTreeSet::new();
        for t in &self.faces {
            let union = merge_sorted(t, &s);
            if self.faces.contains(&union) {
                star.insert(t.clone());
                if t.iter().all(|v| !s.contains(v)) {
                    link.insert(t.clone());
                }
            }
        }
        let mut boundary = BTreeSet::new();
        for sub in proper_subsets(&s) {
            if !sub.is_empty() {
                boundary.insert(sub);
            }
        }
        let mk = |faces: BTreeSet<Vec<u32>>| SimplicialComplex {
            labels: self.labels.clone(),
            faces,
        };
        Ok((mk(link), mk(star), mk(boundary)))
    }

    /// Join: every union of a face here (or ∅) with a face of `other`
    /// (or ∅). Vertex ids of `other` are shifted past ours.
    pub fn join(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let offset = self.labels.len() as u32;
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut faces: BTreeSet<Vec<u32>> = self.faces.clone();
        for t in &other.faces {
            let shifted: Vec<u32> = t.iter().map(|&v| v + offset).collect();
            faces.insert(shifted.clone());
            for s in &self.faces {
                let mut u = s.clone();
                u.extend(shifted.iter().copied());
                faces.insert(u);
            }
        }
        SimplicialComplex { labels, faces }
    }

    /// The subcomplex of faces of dimension ≤ `k`.
    pub fn skeleton(&self, k: usize) -> SimplicialComplex {
        SimplicialComplex {
            labels: self.labels.clone(),
            faces: self
                .faces
                .iter()
                .filter(|f| f.len() <= k + 1)
                .cloned()
                .collect(),
        }
    }
}

/// Order complex of a set of pairwise-distinct subspaces: vertices are the
/// subspaces, faces are the chains under strict inclusion.
pub fn order_complex(vertices: &[Subspace]) -> Result<SimplicialComplex> {
    let mut sorted: Vec<(usize, &Subspace)> = vertices.iter().enumerate().collect();
    sorted.sort_by_key(|(_, s)| (s.dim(), s.canonical_key()));
    for pair in sorted.windows(2) {
        if pair[0].1 == pair[1].1 {
            return Err(Error::pre("order complex input contains duplicates"));
        }
    }

    let labels: Vec<String> = vertices
        .iter()
        .map(|s| {
            let key = s.canonical_key();
            let body: Vec<String> = key.iter().map(|k| k.to_string()).collect();
            body.join(".")
        })
        .collect();

    // successors[i] = indices j with sorted[i] < sorted[j] (strict inclusion).
    let n = sorted.len();
    let mut successors: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if sorted[j].1.dim() > sorted[i].1.dim() && sorted[j].1.contains(sorted[i].1) {
                successors[i].push(j);
            }
        }
    }

    // Depth-first chain enumeration; every chain is a face.
    let mut faces: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut stack: Vec<u32> = Vec::new();
    fn extend(
        at: usize,
        sorted: &[(usize, &Subspace)],
        successors: &[Vec<usize>],
        stack: &mut Vec<u32>,
        faces: &mut BTreeSet<Vec<u32>>,
    ) {
        stack.push(sorted[at].0 as u32);
        let mut face: Vec<u32> = stack.clone();
        face.sort_unstable();
        faces.insert(face);
        for &next in &successors[at] {
            extend(next, sorted, successors, stack, faces);
        }
        stack.pop();
    }
    for start in 0..n {
        extend(start, &sorted, &successors, &mut stack, &mut faces);
    }

    Ok(SimplicialComplex { labels, faces })
}

fn insert_closed(faces: &mut BTreeSet<Vec<u32>>, face: &[u32]) {
    if face.is_empty() || faces.contains(face) {
        return;
    }
    faces.insert(face.to_vec());
    for i in 0..face.len() {
        let mut sub = face.to_vec();
        sub.remove(i);
        insert_closed(faces, &sub);
    }
}

fn is_subset(small: &[u32], big: &[u32]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}

fn merge_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out.dedup();
    out
}

fn proper_subsets(face: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if face.is_empty() {
        return out;
    }
    for mask in 0..(1u32 << face.len()) - 1 {
        let sub: Vec<u32> = face
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        out.push(sub);
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
    groups: usize,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
            groups: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
            self.groups -= 1;
        }
    }

    fn count(&self) -> usize {
        self.groups
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    #[test]
    fn closure_and_counts_of_a_triangle() {
        let k = SimplicialComplex::simplex(3);
        assert_eq!(k.face_counts(), vec![3, 3, 1]);
        assert_eq!(k.dim(), Some(2));
        assert!(k.contains_face(&[0, 2]));
        assert!(k.contains_face(&[]));
        assert_eq!(k.maximal_faces(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn repeated_vertex_in_a_face_is_rejected() {
        let labels = vec!["a".into(), "b".into()];
        assert!(SimplicialComplex::from_faces(labels, &[vec![0, 0]]).is_err());
    }

    #[test]
    fn antichain_gives_a_zero_dimensional_complex() {
        let f2 = Field::prime(2).unwrap();
        let lines: Vec<Subspace> = Subspace::full(f2.clone(), 3)
            .projective_points()
            .into_iter()
            .map(|v| Subspace::line(f2.clone(), &v).unwrap())
            .collect();
        let k = order_complex(&lines).unwrap();
        assert_eq!(k.dim(), Some(0));
        assert_eq!(k.face_count(), 7);
    }

    #[test]
    fn full_flag_gives_a_solid_simplex() {
        let f2 = Field::prime(2).unwrap();
        let chain: Vec<Subspace> = (1..4)
            .map(|d| Subspace::coordinate(f2.clone(), 4, d))
            .collect();
        let k = order_complex(&chain).unwrap();
        assert_eq!(k.face_counts(), vec![3, 3, 1]);
    }

    #[test]
    fn order_complex_rejects_duplicates() {
        let f2 = Field::prime(2).unwrap();
        let l = Subspace::coordinate(f2.clone(), 3, 1);
        assert!(order_complex(&[l.clone(), l]).is_err());
    }

    #[test]
    fn order_complex_counts_match_incidence_double_loop() {
        // All proper nonzero subspaces of F_2^3: 7 points, 7 planes.
        let f2 = Field::prime(2).unwrap();
        let mut verts: Vec<Subspace> = Vec::new();
        for d in 1..3 {
            verts.extend(crate::subspace::all_subspaces(&f2, 3, d));
        }
        let k = order_complex(&verts).unwrap();
        let mut incidences = 0;
        for a in &verts {
            for b in &verts {
                if a.dim() < b.dim() && b.contains(a) {
                    incidences += 1;
                }
            }
        }
        assert_eq!(k.face_counts(), vec![14, incidences]);
        assert_eq!(incidences, 21); // each plane holds 3 of the 7 points
    }

    #[test]
    fn link_and_star_of_a_triangle_vertex() {
        // Boundary of a triangle: three edges, no 2-face.
        let labels = vec!["a".into(), "b".into(), "c".into()];
        let k =
            SimplicialComplex::from_faces(labels, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let (link, star, boundary) = k.link_star_boundary(&[0]).unwrap();
        assert_eq!(link.face_counts(), vec![2]); // the two opposite vertices
        assert_eq!(star.face_counts(), vec![3, 2]);
        assert!(boundary.is_empty()); // a vertex has empty boundary
        let (_, _, edge_boundary) = k.link_star_boundary(&[0, 1]).unwrap();
        assert_eq!(edge_boundary.face_counts(), vec![2]);
    }

    #[test]
    fn star_of_maximal_face_is_its_closure() {
        let k = SimplicialComplex::simplex(3);
        let (link, star, _) = k.link_star_boundary(&[0, 1, 2]).unwrap();
        assert!(link.is_empty());
        assert_eq!(star.face_counts(), vec![3, 3, 1]);
    }

    #[test]
    fn missing_face_is_an_error() {
        let k = SimplicialComplex::simplex(2);
        assert!(k.link_star_boundary(&[0, 1, 5]).is_err());
    }

    #[test]
    fn join_with_empty_is_identity() {
        let k = SimplicialComplex::simplex(3);
        let j = k.join(&SimplicialComplex::empty());
        assert_eq!(j.face_counts(), k.face_counts());
        let j2 = SimplicialComplex::empty().join(&k);
        assert_eq!(j2.face_counts(), k.face_counts());
    }

    #[test]
    fn join_of_discrete_sets_is_complete_bipartite() {
        let a = SimplicialComplex::from_faces(
            vec!["a0".into(), "a1".into(), "a2".into()],
            &[vec![0], vec![1], vec![2]],
        )
        .unwrap();
        let j = a.join(&a.clone());
        assert_eq!(j.face_counts(), vec![6, 9]);
        assert_eq!(j.component_count(), 1);
    }

    #[test]
    fn join_of_two_point_pairs_is_a_four_cycle() {
        let s0 = SimplicialComplex::from_faces(
            vec!["p".into(), "q".into()],
            &[vec![0], vec![1]],
        )
        .unwrap();
        let j = s0.join(&s0.clone());
        assert_eq!(j.face_counts(), vec![4, 4]);
        assert_eq!(j.component_count(), 1);
    }

    #[test]
    fn component_count_by_union_find() {
        let k = SimplicialComplex::from_faces(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            &[vec![0, 1], vec![2], vec![3]],
        )
        .unwrap();
        assert_eq!(k.component_count(), 3);
        assert_eq!(SimplicialComplex::empty().component_count(), 0);
    }

    #[test]
    fn star_equals_link_join_closure_on_face_sets() {
        // Octahedron boundary: join of three point pairs.
        let s0 = SimplicialComplex::from_faces(
            vec!["p".into(), "q".into()],
            &[vec![0], vec![1]],
        )
        .unwrap();
        let oct = s0.join(&s0.clone()).join(&s0.clone());
        assert_eq!(oct.face_counts(), vec![6, 12, 8]);
        let (link, star, _) = oct.link_star_boundary(&[0]).unwrap();
        // Rebuild the star as link * closure({0}) and compare face sets.
        let closure: BTreeSet<Vec<u32>> = [vec![0u32]].into_iter().collect();
        let mut rebuilt: BTreeSet<Vec<u32>> = link.faces.clone();
        for f in &link.faces {
            for c in &closure {
                rebuilt.insert(merge_sorted(f, c));
            }
        }
        rebuilt.insert(vec![0]);
        assert_eq!(rebuilt, star.faces);
    }

    #[test]
    fn skeleton_truncates_dimension() {
        let k = SimplicialComplex::simplex(4);
        let sk = k.skeleton(1);
        assert_eq!(sk.face_counts(), vec![4, 6]);
    }
}
