//! Multimatrix C*-algebras `⊕_k M_{n_k}(ℂ)`.
//!
//! Elements are stored as one dense complex block per matrix summand. The
//! self-adjoint part carries two products:
//!
//! * the Jordan product `{a, b} = (ab + ba) / 2`, commutative;
//! * the Lie product `[[a, b]] = (ab - ba) / 2i`, antisymmetric.
//!
//! Both map self-adjoint pairs to self-adjoint elements, and the associative
//! product splits as `ab = {a, b} + i [[a, b]]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used to accept an element as self-adjoint.
pub const SELF_ADJOINT_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Block signature `(n_1, ..., n_K)` of a multimatrix algebra.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraShape {
    blocks: Arc<[usize]>,
}

impl AlgebraShape {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidShape("no blocks".into()));
        }
        if let Some(k) = blocks.iter().position(|&n| n == 0) {
            return Err(Error::InvalidShape(format!("block {k} has size 0")));
        }
        Ok(Self {
            blocks: blocks.into(),
        })
    }

    /// The full matrix algebra `M_n(ℂ)`.
    pub fn full(n: usize) -> Self {
        Self::new(vec![n]).expect("n >= 1")
    }

    /// The Abelian algebra `ℂ^m`.
    pub fn abelian(m: usize) -> Self {
        Self::new(vec![1; m]).expect("m >= 1")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Complex dimension `Σ n_k²`, equal to the real dimension of the
    /// self-adjoint part.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Number of diagonal slots `Σ n_k`.
    pub fn diag_len(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn is_abelian(&self) -> bool {
        self.blocks.iter().all(|&n| n == 1)
    }

    fn check_same(&self, other: &AlgebraShape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                left: self.blocks.to_vec(),
                right: other.blocks.to_vec(),
            })
        }
    }
}

impl fmt::Debug for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraShape{:?}", &*self.blocks)
    }
}

/// Spectral data of one Hermitian block, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct BlockEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl BlockEigen {
    /// Rotates `m` into this eigenbasis: `U† m U`.
    pub fn to_eigenbasis(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        self.vectors.adjoint() * m * &self.vectors
    }

    pub fn from_eigenbasis(&self, m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        &self.vectors * m * self.vectors.adjoint()
    }
}

/// Block-diagonal element of a multimatrix algebra.
///
/// The arithmetic operator impls panic on shape mismatch, the named
/// methods (`mul`, [`jordan`], [`lie`], ...) return an error instead.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    shape: AlgebraShape,
    blocks: Vec<DMatrix<Complex64>>,
}

impl Element {
    pub fn from_blocks(shape: &AlgebraShape, blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if blocks.len() != shape.num_blocks() {
            return Err(Error::InvalidShape(format!(
                "expected {} blocks, got {}",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (k, (b, &n)) in blocks.iter().zip(shape.blocks()).enumerate() {
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::BlockDimension {
                    block: k,
                    expected: n,
                    got: b.nrows().max(b.ncols()),
                });
            }
        }
        Ok(Self {
            shape: shape.clone(),
            blocks,
        })
    }

    pub fn zero(shape: &AlgebraShape) -> Self {
        Self {
            shape: shape.clone(),
            blocks: shape.blocks().iter().map(|&n| DMatrix::zeros(n, n)).collect(),
        }
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        Self::scalar(shape, Complex64::new(1.0, 0.0))
    }

    pub fn scalar(shape: &AlgebraShape, c: Complex64) -> Self {
        Self {
            shape: shape.clone(),
            blocks: shape
                .blocks()
                .iter()
                .map(|&n| DMatrix::from_diagonal_element(n, n, c))
                .collect(),
        }
    }

    /// Diagonal element from `Σ n_k` real entries, blocks concatenated.
    pub fn from_real_diagonal(shape: &AlgebraShape, diag: &[f64]) -> Result<Self> {
        if diag.len() != shape.diag_len() {
            return Err(Error::InvalidShape(format!(
                "expected {} diagonal entries, got {}",
                shape.diag_len(),
                diag.len()
            )));
        }
        let mut offset = 0;
        let blocks = shape
            .blocks()
            .iter()
            .map(|&n| {
                let d = DVector::from_iterator(
                    n,
                    diag[offset..offset + n].iter().map(|&x| Complex64::new(x, 0.0)),
                );
                offset += n;
                DMatrix::from_diagonal(&d)
            })
            .collect();
        Ok(Self {
            shape: shape.clone(),
            blocks,
        })
    }

    /// Single-block convenience constructor.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidShape(format!(
                "matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let shape = AlgebraShape::full(m.nrows());
        Ok(Self {
            shape,
            blocks: vec![m],
        })
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &DMatrix<Complex64> {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<DMatrix<Complex64>> {
        self.blocks
    }

    pub fn map_blocks(&self, f: impl Fn(&DMatrix<Complex64>) -> DMatrix<Complex64>) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    fn zip_blocks(
        &self,
        other: &Element,
        f: impl Fn(&DMatrix<Complex64>, &DMatrix<Complex64>) -> DMatrix<Complex64>,
    ) -> Self {
        assert_eq!(self.shape, other.shape, "shape mismatch");
        Self {
            shape: self.shape.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Associative (blockwise matrix) product.
    pub fn mul(&self, other: &Element) -> Result<Element> {
        self.shape.check_same(&other.shape)?;
        Ok(self * other)
    }

    pub fn adjoint(&self) -> Element {
        self.map_blocks(|b| b.adjoint())
    }

    pub fn scale(&self, s: f64) -> Element {
        self.map_blocks(|b| b * Complex64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: Complex64) -> Element {
        self.map_blocks(|b| b * s)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Element) -> Element {
        self.zip_blocks(other, |a, b| a + b * Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖x - x†‖_max`.
    pub fn self_adjoint_deviation(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (b - b.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.self_adjoint_deviation() <= SELF_ADJOINT_TOL * (1.0 + self.max_abs())
    }

    pub fn ensure_self_adjoint(&self) -> Result<()> {
        if self.is_self_adjoint() {
            Ok(())
        } else {
            Err(Error::NotSelfAdjoint(self.self_adjoint_deviation()))
        }
    }

    /// Hermitian part `(x + x†)/2`, used to scrub round-off asymmetry.
    pub fn hermitian_part(&self) -> Element {
        self.map_blocks(|b| (b + b.adjoint()) * Complex64::new(0.5, 0.0))
    }

    /// Per-block Hermitian eigendecomposition with ascending eigenvalues.
    /// The input is symmetrized first.
    pub fn eigh(&self) -> Vec<BlockEigen> {
        self.blocks.iter().map(hermitian_eigen).collect()
    }

    /// All eigenvalues of a self-adjoint element, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .eigh()
            .into_iter()
            .flat_map(|e| e.values.iter().copied().collect::<Vec<_>>())
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// Applies a real function to the spectrum of a self-adjoint element.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> Element {
        let blocks = self
            .eigh()
            .into_iter()
            .map(|e| {
                let d = DVector::from_iterator(
                    e.values.len(),
                    e.values.iter().map(|&x| Complex64::new(f(x), 0.0)),
                );
                &e.vectors * DMatrix::from_diagonal(&d) * e.vectors.adjoint()
            })
            .collect();
        Element {
            shape: self.shape.clone(),
            blocks,
        }
    }

    pub fn commutes_with(&self, other: &Element, tol: f64) -> bool {
        let c = &(self * other) - &(other * self);
        c.max_abs() <= tol * (1.0 + self.max_abs() * other.max_abs())
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Delegated to faer: nalgebra's symmetric eigensolvers leave residuals far
/// above rounding level on small dense inputs, and its complex variant can
/// return orthonormal vectors that are not eigenvectors at all.
pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> BlockEigen {
    let n = m.nrows();
    if n == 0 {
        return BlockEigen {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    let h = faer::Mat::<Complex64>::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = h
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("self-adjoint eigensolver converges on finite input");
    let (u, s) = (eig.U(), eig.S());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].re.total_cmp(&s[j].re));
    let values = DVector::from_iterator(n, order.iter().map(|&k| s[k].re));
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    BlockEigen { values, vectors }
}

impl Add<&Element> for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl Sub<&Element> for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

impl Mul<&Element> for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.zip_blocks(rhs, |a, b| a * b)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.map_blocks(|b| -b)
    }
}

fn check_pair(a: &Element, b: &Element) -> Result<()> {
    a.shape.check_same(&b.shape)?;
    a.ensure_self_adjoint()?;
    b.ensure_self_adjoint()
}

/// Jordan product `(ab + ba)/2` of two self-adjoint elements.
pub fn jordan(a: &Element, b: &Element) -> Result<Element> {
    check_pair(a, b)?;
    Ok(jordan_raw(a, b))
}

/// Lie product `(ab - ba)/2i` of two self-adjoint elements.
pub fn lie(a: &Element, b: &Element) -> Result<Element> {
    check_pair(a, b)?;
    Ok(lie_raw(a, b))
}

pub(crate) fn jordan_raw(a: &Element, b: &Element) -> Element {
    a.zip_blocks(b, |x, y| (x * y + y * x) * Complex64::new(0.5, 0.0))
}

pub(crate) fn lie_raw(a: &Element, b: &Element) -> Element {
    // 1/(2i) = -i/2
    a.zip_blocks(b, |x, y| (x * y - y * x) * Complex64::new(0.0, -0.5))
}

/// Trace pairing `Σ_k Tr(ξ_k a_k)`.
pub fn trace_pair(xi: &Element, a: &Element) -> Result<Complex64> {
    xi.shape.check_same(&a.shape)?;
    Ok(pair_complex(xi, a))
}

pub(crate) fn pair_complex(xi: &Element, a: &Element) -> Complex64 {
    xi.blocks
        .iter()
        .zip(&a.blocks)
        .map(|(x, y)| {
            // Tr(x y) = Σ_ij x_ij y_ji
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..x.nrows() {
                for j in 0..x.ncols() {
                    s += x[(i, j)] * y[(j, i)];
                }
            }
            s
        })
        .sum()
}

/// Real part of the trace pairing; exact pairing value for self-adjoint
/// arguments.
pub(crate) fn pair(xi: &Element, a: &Element) -> f64 {
    pair_complex(xi, a).re
}

/// Trace-orthonormal basis of the self-adjoint part.
///
/// Per block, in order: the diagonal units `E_ii`, the symmetric pairs
/// `(E_ij + E_ji)/√2` for `i < j` in row-major order, then the antisymmetric
/// pairs `(-i E_ij + i E_ji)/√2` in the same order.
pub fn hermitian_basis(shape: &AlgebraShape) -> Vec<Element> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(shape.dim());
    for (k, &n) in shape.blocks().iter().enumerate() {
        let unit = |fill: &dyn Fn(&mut DMatrix<Complex64>)| {
            let mut e = Element::zero(shape);
            fill(&mut e.blocks[k]);
            e
        };
        for i in 0..n {
            out.push(unit(&|m| m[(i, i)] = Complex64::new(1.0, 0.0)));
        }
        for i in 0..n {
            for j in i + 1..n {
                out.push(unit(&|m| {
                    m[(i, j)] = Complex64::new(r, 0.0);
                    m[(j, i)] = Complex64::new(r, 0.0);
                }));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                out.push(unit(&|m| {
                    m[(i, j)] = Complex64::new(0.0, -r);
                    m[(j, i)] = Complex64::new(0.0, r);
                }));
            }
        }
    }
    out
}

/// Coordinates of a self-adjoint element in [`hermitian_basis`].
pub fn coordinates(x: &Element) -> Vec<f64> {
    hermitian_basis(x.shape()).iter().map(|e| pair(e, x)).collect()
}

pub fn from_coordinates(shape: &AlgebraShape, coords: &[f64]) -> Result<Element> {
    let basis = hermitian_basis(shape);
    if coords.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            got: coords.len(),
        });
    }
    Ok(basis
        .iter()
        .zip(coords)
        .fold(Element::zero(shape), |acc, (e, &c)| acc.axpy(c, e)))
}

/// Group element `exp((a + ib)/2)` for self-adjoint `a`, `b`.
///
/// Commuting pairs go through Hermitian eigendecompositions; otherwise the
/// block exponential uses scaling-and-squaring with a Padé approximant.
pub fn group_exp(a: &Element, b: &Element) -> Result<Element> {
    check_pair(a, b)?;
    if a.commutes_with(b, 1e-13) {
        let ea = a.apply_spectral(|x| (0.5 * x).exp());
        let eb_blocks = b
            .eigh()
            .into_iter()
            .map(|e| {
                let d = DVector::from_iterator(
                    e.values.len(),
                    e.values.iter().map(|&x| (I * 0.5 * x).exp()),
                );
                &e.vectors * DMatrix::from_diagonal(&d) * e.vectors.adjoint()
            })
            .collect();
        let eb = Element {
            shape: b.shape.clone(),
            blocks: eb_blocks,
        };
        return Ok(&ea * &eb);
    }
    Ok(a.zip_blocks(b, |x, y| ((x + y * I) * Complex64::new(0.5, 0.0)).exp()))
}

/// Pauli matrices on `M_2(ℂ)`, handy for examples and tests.
pub mod pauli {
    use super::*;

    fn m(entries: [[Complex64; 2]; 2]) -> Element {
        Element::from_matrix(DMatrix::from_fn(2, 2, |i, j| entries[i][j])).expect("2x2")
    }

    const O: Complex64 = Complex64::new(0.0, 0.0);
    const L: Complex64 = Complex64::new(1.0, 0.0);

    pub fn identity() -> Element {
        m([[L, O], [O, L]])
    }
    pub fn x() -> Element {
        m([[O, L], [L, O]])
    }
    pub fn y() -> Element {
        m([[O, -I], [I, O]])
    }
    pub fn z() -> Element {
        m([[L, O], [O, -L]])
    }
    /// `|i⟩⟨i|` on a qubit.
    pub fn projector(i: usize) -> Element {
        let mut e = Element::zero(&AlgebraShape::full(2));
        e.blocks[0][(i, i)] = L;
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &Element, b: &Element, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn eigen_errors(m: &DMatrix<Complex64>) -> (f64, f64) {
        let e = hermitian_eigen(m);
        let n = m.nrows();
        let v = &e.vectors;
        let d = DMatrix::from_diagonal(&e.values.map(c));
        let res = (m * v - v * d).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let orth = (v.adjoint() * v - DMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        (res, orth)
    }

    #[test]
    fn hermitian_eigen_on_degenerate_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..9 {
            let s = AlgebraShape::full(n);
            let u = sample::random_unitary(&s, &mut rng).block(0).clone();
            let d = DMatrix::from_fn(n, n, |i, j| if i == j { c((i % 3) as f64) } else { c(0.0) });
            let m = &u * d * u.adjoint();
            let (res, orth) = eigen_errors(&m);
            assert!(res < 1e-12 && orth < 1e-12, "{n}: {res:e} {orth:e}");
            let e = hermitian_eigen(&m);
            assert!(e.values.iter().zip(e.values.iter().skip(1)).all(|(a, b)| a <= b));
        }
    }

    #[test]
    fn hermitian_eigen_on_commutator_laplacian() {
        // Σ_r (I⊗r - r̄⊗I)† (I⊗r - r̄⊗I) over a basis of M_3: highly
        // degenerate, with the identity spanning the kernel
        let s = AlgebraShape::full(3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = sample::random_unitary(&s, &mut rng).block(0).clone();
        let id = DMatrix::<Complex64>::identity(3, 3);
        let mut k = DMatrix::<Complex64>::zeros(9, 9);
        for e in hermitian_basis(&s) {
            let r = &u * e.block(0) * u.adjoint();
            let l = id.kronecker(&r) - r.conjugate().kronecker(&id);
            k += l.adjoint() * l;
        }
        let (res, orth) = eigen_errors(&k);
        assert!(res < 1e-12 && orth < 1e-12, "{res:e} {orth:e}");
        let e = hermitian_eigen(&k);
        assert!(e.values[0].abs() < 1e-12 && e.values[1] > 1.0);
    }

    #[test]
    fn shape_validation() {
        assert!(AlgebraShape::new(vec![]).is_err());
        assert!(AlgebraShape::new(vec![2, 0]).is_err());
        let s = AlgebraShape::new(vec![2, 3]).unwrap();
        assert_eq!(s.dim(), 13);
        assert!(!s.is_abelian());
        assert!(AlgebraShape::abelian(4).is_abelian());
    }

    #[test]
    fn mul_examples() {
        let s = AlgebraShape::full(2);
        let id = Element::identity(&s);
        assert_eq!(id.mul(&id).unwrap(), id);
        assert!(close(&pauli::x().mul(&pauli::x()).unwrap(), &id, 0.0));

        let ab = AlgebraShape::abelian(2);
        let p = Element::from_real_diagonal(&ab, &[2.0, 5.0]).unwrap();
        let q = Element::from_real_diagonal(&ab, &[3.0, 7.0]).unwrap();
        let r = p.mul(&q).unwrap();
        assert_eq!(r.block(0)[(0, 0)], c(6.0));
        assert_eq!(r.block(1)[(0, 0)], c(35.0));

        let err = p.mul(&id).unwrap_err();
        assert!(matches!(err, Error::ShapeMismatch { .. }));
    }

    #[test]
    fn jordan_examples() {
        let id = pauli::identity();
        assert!(close(&jordan(&pauli::x(), &pauli::y()).unwrap(), &Element::zero(id.shape()), 0.0));
        assert!(close(&jordan(&pauli::x(), &pauli::x()).unwrap(), &id, 0.0));
        let a = pauli::x().axpy(0.3, &pauli::z());
        assert!(close(&jordan(&a, &id).unwrap(), &a, 1e-15));

        let not_sa = pauli::x().scale_complex(I);
        assert!(matches!(jordan(&not_sa, &id), Err(Error::NotSelfAdjoint(_))));
    }

    #[test]
    fn lie_examples() {
        let x = pauli::x();
        assert!(close(&lie(&x, &x).unwrap(), &Element::zero(x.shape()), 0.0));
        assert!(close(&lie(&pauli::x(), &pauli::y()).unwrap(), &pauli::z(), 1e-15));
        let ab = AlgebraShape::abelian(3);
        let p = Element::from_real_diagonal(&ab, &[1.0, -2.0, 0.5]).unwrap();
        let q = Element::from_real_diagonal(&ab, &[4.0, 1.0, 3.0]).unwrap();
        assert_eq!(lie(&p, &q).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn trace_pair_examples() {
        let s = AlgebraShape::full(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = sample::random_self_adjoint(&s, &mut rng);
        let mixed = Element::identity(&s).scale(1.0 / 3.0);
        let v = trace_pair(&mixed, &a).unwrap();
        assert!((v - a.trace() / 3.0).norm() < 1e-15);
        assert_eq!(trace_pair(&pauli::z(), &pauli::z()).unwrap(), c(2.0));
        assert_eq!(trace_pair(&pauli::z(), &pauli::x()).unwrap(), c(0.0));
    }

    #[test]
    fn basis_examples() {
        let ab = hermitian_basis(&AlgebraShape::abelian(2));
        assert_eq!(ab.len(), 2);
        assert_eq!(ab[0], Element::from_real_diagonal(&AlgebraShape::abelian(2), &[1.0, 0.0]).unwrap());
        assert_eq!(ab[1], Element::from_real_diagonal(&AlgebraShape::abelian(2), &[0.0, 1.0]).unwrap());
        assert_eq!(hermitian_basis(&AlgebraShape::new(vec![2, 3]).unwrap()).len(), 13);

        // qubit basis spans {I, σx, σy, σz}/√2 and is trace-orthonormal
        let q = hermitian_basis(&AlgebraShape::full(2));
        for (i, e) in q.iter().enumerate() {
            for (j, f) in q.iter().enumerate() {
                let g = trace_pair(e, f).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - c(want)).norm() < 1e-15);
            }
        }
        for p in [pauli::identity(), pauli::x(), pauli::y(), pauli::z()] {
            let back = from_coordinates(p.shape(), &coordinates(&p)).unwrap();
            assert!(close(&back, &p, 1e-15));
        }
    }

    #[test]
    fn group_exp_examples() {
        let s = AlgebraShape::full(2);
        let zero = Element::zero(&s);
        assert!(close(&group_exp(&zero, &zero).unwrap(), &Element::identity(&s), 0.0));

        let one = AlgebraShape::full(1);
        let a = Element::identity(&one).scale(2.0 * 2f64.ln());
        let g = group_exp(&a, &Element::zero(&one)).unwrap();
        assert!((g.block(0)[(0, 0)] - c(2.0)).norm() < 1e-15);

        let b = pauli::z().scale(std::f64::consts::PI);
        let g = group_exp(&zero, &b).unwrap();
        assert!(close(&g, &pauli::z().scale_complex(I), 1e-15));
    }

    #[test]
    fn group_exp_non_commuting_matches_series() {
        // exp((σx + iσy)/2) with (σx+iσy)² = 0: exp = I + (σx + iσy)/2
        let g = group_exp(&pauli::x(), &pauli::y()).unwrap();
        let want = &pauli::identity() + &(&pauli::x() + &pauli::y().scale_complex(I)).scale(0.5);
        assert!(close(&g, &want, 1e-14));
    }

    fn shape_strategy() -> impl Strategy<Value = AlgebraShape> {
        prop::collection::vec(1usize..4, 1..3).prop_map(|b| AlgebraShape::new(b).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn jordan_lie_identities(shape in shape_strategy(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sample::random_self_adjoint(&shape, &mut rng);
            let b = sample::random_self_adjoint(&shape, &mut rng);
            let cc = sample::random_self_adjoint(&shape, &mut rng);
            let scale = 1.0 + a.max_abs() * b.max_abs() * cc.max_abs();

            // commutativity / antisymmetry
            prop_assert!(close(&jordan(&a, &b).unwrap(), &jordan(&b, &a).unwrap(), 0.0));
            prop_assert!(close(&lie(&a, &b).unwrap(), &-&lie(&b, &a).unwrap(), 0.0));

            // Jacobi
            let j = &(&lie_raw(&a, &lie_raw(&b, &cc)) + &lie_raw(&b, &lie_raw(&cc, &a)))
                + &lie_raw(&cc, &lie_raw(&a, &b));
            prop_assert!(j.max_abs() <= 1e-12 * scale);

            // Lie product is a derivation of the Jordan product
            let lhs = lie_raw(&a, &jordan_raw(&b, &cc));
            let rhs = &jordan_raw(&lie_raw(&a, &b), &cc) + &jordan_raw(&b, &lie_raw(&a, &cc));
            prop_assert!(close(&lhs, &rhs, 1e-12 * scale));

            // Jordan identity
            let a2 = jordan_raw(&a, &a);
            let lhs = jordan_raw(&jordan_raw(&a, &b), &a2);
            let rhs = jordan_raw(&a, &jordan_raw(&b, &a2));
            prop_assert!(close(&lhs, &rhs, 1e-12 * (1.0 + a.max_abs().powi(3) * b.max_abs())));

            // recombination ab = {a,b} + i[[a,b]]
            let ab = a.mul(&b).unwrap();
            let re = &jordan_raw(&a, &b) + &lie_raw(&a, &b).scale_complex(I);
            prop_assert!(close(&ab, &re, 1e-13 * scale));

            // products stay self-adjoint
            prop_assert!(jordan_raw(&a, &b).is_self_adjoint());
            prop_assert!(lie_raw(&a, &b).is_self_adjoint());
        }

        #[test]
        fn adjoint_is_an_involutive_antihomomorphism(shape in shape_strategy(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = sample::random_element(&shape, &mut rng);
            let y = sample::random_element(&shape, &mut rng);
            prop_assert_eq!(x.adjoint().adjoint(), x.clone());
            let lhs = (&x * &y).adjoint();
            let rhs = &y.adjoint() * &x.adjoint();
            prop_assert!(close(&lhs, &rhs, 1e-13));
        }

        #[test]
        fn basis_gram_is_identity(shape in shape_strategy()) {
            let basis = hermitian_basis(&shape);
            prop_assert_eq!(basis.len(), shape.dim());
            for (i, e) in basis.iter().enumerate() {
                prop_assert!(e.is_self_adjoint());
                for (j, f) in basis.iter().enumerate() {
                    let g = pair(e, f);
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((g - want).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn group_exp_is_invertible(shape in shape_strategy(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = sample::random_self_adjoint(&shape, &mut rng);
            let b = sample::random_self_adjoint(&shape, &mut rng);
            let g = group_exp(&a, &b).unwrap();
            let ginv = group_exp(&-&a, &-&b).unwrap();
            // exp(X) exp(-X) = I for X = (a+ib)/2
            prop_assert!(close(&(&g * &ginv), &Element::identity(&shape), 1e-9));
        }
    }
}
