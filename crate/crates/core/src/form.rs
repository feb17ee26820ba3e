//! Sesquilinear forms `f(x, y) = x · G · σ(y)ᵀ` with the reflexivity
//! invariant `G = ε · σ(G)ᵀ`, which gives `f(y, x) = ε · σ(f(x, y))`.
//!
//! Symmetric bilinear (`σ = id, ε = 1`), alternating (`σ = id, ε = −1`) and
//! hermitian (`σ` of order 2, `ε = 1`) forms are all instances. Left and
//! right perps coincide thanks to the invariant.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, Involution};
use crate::matrix::Matrix;
use crate::subspace::Subspace;

#[derive(Clone, PartialEq, Eq)]
pub struct Form {
    gram: Matrix,
    sigma: Involution,
    epsilon: FieldElement,
}

impl std::fmt::Debug for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Form(dim {}, sigma {}, epsilon {}) {:?}",
            self.dim(),
            self.sigma,
            self.field().format_element(self.epsilon),
            self.gram
        )
    }
}

impl Form {
    pub fn new(gram: Matrix, sigma: Involution, epsilon: FieldElement) -> Result<Form> {
        if gram.rows() != gram.cols() {
            return Err(Error::DimensionMismatch {
                context: "gram matrix must be square",
                left: gram.rows(),
                right: gram.cols(),
            });
        }
        let field = gram.field().clone();
        if !field.supports(sigma) {
            return Err(Error::Unsupported(format!(
                "field of degree {} has no order-2 automorphism",
                field.degree()
            )));
        }
        if epsilon != field.one() && epsilon != field.minus_one() {
            return Err(Error::invalid("epsilon must be 1 or -1"));
        }
        let mirrored = gram.sigma_transpose(sigma)?.scale(epsilon);
        if mirrored != gram {
            return Err(Error::invalid(
                "gram matrix violates the reflexivity invariant G = ε·σ(G)ᵀ",
            ));
        }
        Ok(Form {
            gram,
            sigma,
            epsilon,
        })
    }

    /// The standard alternating form on `F^{2n}`: antidiagonal `+1` in the
    /// top half, `−1` in the bottom half.
    pub fn symplectic(field: Arc<Field>, n: usize) -> Form {
        let dim = 2 * n;
        let mut g = Matrix::zeros(field.clone(), dim, dim);
        for i in 0..n {
            g.set(i, dim - 1 - i, field.one());
            g.set(dim - 1 - i, i, field.minus_one());
        }
        Form::new(g, Involution::Identity, field.minus_one())
            .expect("standard alternating gram is reflexive")
    }

    /// The standard symmetric form on `F^{2n+1}` (odd characteristic):
    /// antidiagonal `+1`, i.e. `n` hyperbolic pairs around an anisotropic
    /// middle vector. Maximal totally isotropic subspaces have dimension `n`.
    pub fn symmetric_odd_dim(field: Arc<Field>, n: usize) -> Result<Form> {
        if field.characteristic() == 2 {
            return Err(Error::Unsupported(
                "odd-dimensional symmetric model needs odd characteristic".into(),
            ));
        }
        let dim = 2 * n + 1;
        let mut g = Matrix::zeros(field.clone(), dim, dim);
        for i in 0..dim {
            g.set(i, dim - 1 - i, field.one());
        }
        Form::new(g, Involution::Identity, field.one())
    }

    /// The standard hermitian form (identity gram) on `F^dim`; the field
    /// must carry the order-2 automorphism.
    pub fn hermitian(field: Arc<Field>, dim: usize) -> Result<Form> {
        Form::new(
            Matrix::identity(field.clone(), dim),
            Involution::FrobeniusSqrt,
            field.one(),
        )
    }

    pub fn field(&self) -> &Arc<Field> {
        self.gram.field()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn sigma(&self) -> Involution {
        self.sigma
    }

    pub fn epsilon(&self) -> FieldElement {
        self.epsilon
    }

    pub fn eval(&self, x: &[FieldElement], y: &[FieldElement]) -> Result<FieldElement> {
        if x.len() != self.dim() || y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "form evaluation",
                left: x.len(),
                right: y.len(),
            });
        }
        let f = self.field();
        let xg = self.gram.mul_row(x)?;
        let mut acc = FieldElement::ZERO;
        for (a, &b) in xg.iter().zip(y) {
            acc = f.add(acc, f.mul(*a, f.apply(self.sigma, b)?));
        }
        Ok(acc)
    }

    pub fn is_isotropic_vector(&self, v: &[FieldElement]) -> Result<bool> {
        Ok(self.eval(v, v)?.is_zero())
    }

    /// The perp `{x : f(x, u) = 0 for all u ∈ U}`.
    pub fn perp(&self, u: &Subspace) -> Result<Subspace> {
        if u.ambient() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "perp ambient",
                left: u.ambient(),
                right: self.dim(),
            });
        }
        // x · (G·σ(B)ᵀ) = 0.
        let m = self.gram.mul(&u.basis().sigma_transpose(self.sigma)?)?;
        Ok(Subspace::from_matrix(&m.row_kernel()))
    }

    pub fn radical(&self) -> Result<Subspace> {
        self.perp(&Subspace::full(self.field().clone(), self.dim()))
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.gram.rank() == self.dim()
    }

    /// Gram matrix of the restriction to the rows of `basis`.
    pub fn gram_on(&self, basis: &Matrix) -> Result<Matrix> {
        basis
            .mul(&self.gram)?
            .mul(&basis.sigma_transpose(self.sigma)?)
    }

    pub fn is_nondegenerate_on(&self, u: &Subspace) -> Result<bool> {
        Ok(self.gram_on(u.basis())?.rank() == u.dim())
    }

    pub fn is_totally_isotropic(&self, u: &Subspace) -> Result<bool> {
        Ok(self.gram_on(u.basis())?.is_zero())
    }

    /// `{u ∈ U : f(u, U) = 0}`, the radical of the restriction.
    pub fn radical_in(&self, u: &Subspace) -> Result<Subspace> {
        let gu = self.gram_on(u.basis())?;
        let coords = gu.row_kernel();
        if coords.rows() == 0 {
            return Ok(Subspace::zero(self.field().clone(), self.dim()));
        }
        Ok(Subspace::from_matrix(&coords.mul(u.basis())?))
    }

    /// A form on the ambient space whose restriction to the rows of `basis`
    /// (full row rank, `k×N`) has the prescribed gram `values` (`k×k`).
    /// Built as `G = P·K·σ(P)ᵀ` for a right inverse `P` of the basis, so
    /// `B·G·σ(B)ᵀ = K` exactly; values off the row span are incidental.
    pub fn from_values_on_basis(
        basis: &Matrix,
        values: &Matrix,
        sigma: Involution,
        epsilon: FieldElement,
    ) -> Result<Form> {
        let k = basis.rows();
        if values.rows() != k || values.cols() != k {
            return Err(Error::DimensionMismatch {
                context: "value matrix must match basis size",
                left: values.rows(),
                right: k,
            });
        }
        let field = basis.field().clone();
        // Right inverse: X·Bᵀ = I gives P = Xᵀ with B·P = I.
        let x = basis
            .transpose()
            .solve_left(&Matrix::identity(field.clone(), k))
            .map_err(|_| Error::pre("basis must have full row rank"))?;
        let p = x.transpose();
        let gram = p.mul(values)?.mul(&p.sigma_transpose(sigma)?)?;
        let form = Form::new(gram, sigma, epsilon)?;
        debug_assert_eq!(&form.gram_on(basis)?, values);
        Ok(form)
    }
}
