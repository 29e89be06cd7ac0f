//! GNS construction for a reference state, the unit sphere of the GNS
//! space, and the projection of that sphere onto the orbit of states.
//!
//! Vectors of the GNS space are coordinate columns in an orthonormal basis
//! of the quotient `𝒜 / N_ω`. The ambient metric and symplectic form are
//! `ℰ(u, v) = 4 Re⟨u, v⟩` and `Ω(u, v) = 4 Im⟨u, v⟩`; with these constants
//! `ℰ(Ψ_a0, Ψ_b0) = G₁(𝕐_a, 𝕐_b)` holds with no extra factor.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{self, hermitian_eigen, AlgebraShape, Element};
use crate::error::{Error, Result};
use crate::metric;
use crate::orbits::{self, Functional, RankSignature, StateFunctional, TangentVector};

/// Relative threshold for the Gel'fand ideal.
pub const DEFAULT_IDEAL_TOL: f64 = 1e-12;

const COMMUTANT_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;

type CVec = DVector<Complex64>;
type CMat = DMatrix<Complex64>;

/// Unit vector of the GNS space, in quotient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereVector {
    coords: CVec,
}

impl SphereVector {
    pub fn new(coords: CVec) -> Result<Self> {
        let n = coords.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidShape(format!("sphere vector has norm {n}")));
        }
        Ok(Self { coords })
    }

    /// Rescales a nonzero vector onto the sphere.
    pub fn normalized(coords: CVec) -> Result<Self> {
        let n = coords.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroDirection);
        }
        Ok(Self { coords: coords.unscale(n) })
    }

    pub fn coords(&self) -> &CVec {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `e^{iθ} ψ`.
    pub fn phase(&self, theta: f64) -> Self {
        Self {
            coords: &self.coords * Complex64::from_polar(1.0, theta),
        }
    }
}

/// Dimension counts and structural residuals of a GNS construction.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct GnsReport {
    pub blocks: Vec<usize>,
    pub algebra_dim: usize,
    pub ideal_dim: usize,
    pub quotient_dim: usize,
    pub commutant_dim: usize,
    pub multiplicative_residual: f64,
    pub adjoint_residual: f64,
    pub expectation_residual: f64,
    pub ideal_orthogonality_residual: f64,
    pub commutant_residual: f64,
}

/// GNS data of a reference state.
#[derive(Clone, Debug)]
pub struct GnsData {
    reference: StateFunctional,
    gram: CMat,
    ideal_basis: Vec<Element>,
    hilbert_basis: Vec<Element>,
    /// Orthonormal Hermitian basis of the algebra and its representatives.
    basis: Vec<Element>,
    rep_basis: Vec<CMat>,
    cyclic: CVec,
    commutant_basis: Vec<CMat>,
    commutant_skew: Vec<CMat>,
}

/// Matrix units `(block, row, col)` in block-major, row-major order.
fn matrix_units(shape: &AlgebraShape) -> Vec<(usize, usize, usize)> {
    let mut units = Vec::with_capacity(shape.dim());
    for (k, &n) in shape.blocks().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                units.push((k, i, j));
            }
        }
    }
    units
}

fn element_from_unit_coords(shape: &AlgebraShape, units: &[(usize, usize, usize)], c: &CVec) -> Element {
    let mut blocks: Vec<CMat> = shape.blocks().iter().map(|&n| CMat::zeros(n, n)).collect();
    for (p, &(k, i, j)) in units.iter().enumerate() {
        blocks[k][(i, j)] = c[p];
    }
    Element::from_blocks(shape, blocks).expect("block sizes follow the shape")
}

fn dagger_dot(u: &CVec, v: &CVec) -> Complex64 {
    u.dotc(v)
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl GnsData {
    pub fn build(rho: &StateFunctional, tol: f64) -> Self {
        let shape = rho.shape().clone();
        let units = matrix_units(&shape);
        let d = units.len();
        let dens = rho.density();

        // (E_p, E_q) = ρ(E_p† E_q) = δ_{i i'} ρ_{l j} for p = (k,i,j), q = (k,i',l)
        let gram = CMat::from_fn(d, d, |p, q| {
            let (kp, ip, jp) = units[p];
            let (kq, iq, lq) = units[q];
            if kp == kq && ip == iq {
                dens.block(kp)[(lq, jp)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let eig = hermitian_eigen(&gram);
        let lmax = eig.values.iter().copied().fold(0.0, f64::max);
        let mut ideal_basis = Vec::new();
        let mut hilbert_basis = Vec::new();
        for m in (0..d).rev() {
            let l = eig.values[m];
            let u: CVec = eig.vectors.column(m).into_owned();
            if l <= tol * lmax {
                ideal_basis.push(element_from_unit_coords(&shape, &units, &u));
            } else {
                hilbert_basis.push(element_from_unit_coords(&shape, &units, &u.unscale(l.sqrt())));
            }
        }
        let q = hilbert_basis.len();
        let h_dag: Vec<Element> = hilbert_basis.iter().map(Element::adjoint).collect();
        let inner = |m: usize, x: &Element| algebra::pair_complex(dens, &(&h_dag[m] * x));

        let basis = algebra::hermitian_basis(&shape);
        let rep_basis: Vec<CMat> = basis
            .iter()
            .map(|e| {
                let moved: Vec<Element> = hilbert_basis.iter().map(|h| e * h).collect();
                CMat::from_fn(q, q, |m, n| inner(m, &moved[n]))
            })
            .collect();
        let id = Element::identity(&shape);
        let cyclic = CVec::from_fn(q, |m, _| inner(m, &id));

        let (commutant_basis, commutant_skew) = commutant(&rep_basis, q);

        Self {
            reference: rho.clone(),
            gram,
            ideal_basis,
            hilbert_basis,
            basis,
            rep_basis,
            cyclic,
            commutant_basis,
            commutant_skew,
        }
    }

    pub fn reference(&self) -> &StateFunctional {
        &self.reference
    }

    pub fn shape(&self) -> &AlgebraShape {
        self.reference.shape()
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn ideal_basis(&self) -> &[Element] {
        &self.ideal_basis
    }

    pub fn hilbert_basis(&self) -> &[Element] {
        &self.hilbert_basis
    }

    pub fn quotient_dim(&self) -> usize {
        self.hilbert_basis.len()
    }

    pub fn ideal_dim(&self) -> usize {
        self.ideal_basis.len()
    }

    /// Complex dimension of the commutant of the represented algebra.
    pub fn commutant_dim(&self) -> usize {
        self.commutant_basis.len()
    }

    /// Complex basis of the commutant.
    pub fn commutant_basis(&self) -> &[CMat] {
        &self.commutant_basis
    }

    /// Real basis of the skew-adjoint part of the commutant, orthonormal
    /// under `Re Tr(A† B)`.
    pub fn commutant_skew_basis(&self) -> &[CMat] {
        &self.commutant_skew
    }

    /// Coordinates of the cyclic vector `ψ_𝕀`.
    pub fn cyclic(&self) -> SphereVector {
        SphereVector {
            coords: self.cyclic.clone(),
        }
    }

    /// Matrix of `r(a)` on the quotient.
    pub fn rep(&self, a: &Element) -> Result<CMat> {
        if a.shape() != self.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape().blocks().to_vec(),
                right: a.shape().blocks().to_vec(),
            });
        }
        let q = self.quotient_dim();
        let mut out = CMat::zeros(q, q);
        for (e, r) in self.basis.iter().zip(&self.rep_basis) {
            let c = algebra::pair_complex(e, a);
            if c != Complex64::new(0.0, 0.0) {
                out += r * c;
            }
        }
        Ok(out)
    }

    fn check_dim(&self, v: &CVec) -> Result<()> {
        if v.len() != self.quotient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.quotient_dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `pr(g) = r(g) ψ_𝕀 / ‖r(g) ψ_𝕀‖`.
    pub fn lift(&self, g: &Element) -> Result<SphereVector> {
        SphereVector::normalized(self.rep(g)? * &self.cyclic)
    }

    /// State `c ↦ ⟨ψ| r(c) |ψ⟩`.
    pub fn project_pi(&self, psi: &SphereVector) -> Result<StateFunctional> {
        self.check_dim(psi.coords())?;
        let weights: Vec<f64> = self
            .rep_basis
            .iter()
            .map(|r| dagger_dot(&psi.coords, &(r * &psi.coords)).re)
            .collect();
        let density = algebra::from_coordinates(self.shape(), &weights)?;
        let tr = density.trace().re;
        StateFunctional::new(density.scale(1.0 / tr).hermitian_part())
    }

    /// Whether `ψ = pr(g)` for some invertible `g`.
    pub fn in_orbit_sphere(&self, psi: &SphereVector, tol: f64) -> Result<bool> {
        let projected = self.project_pi(psi)?;
        let want: RankSignature = orbits::rank_signature(&self.reference, tol);
        Ok(orbits::rank_signature(&projected, tol) == want)
    }

    /// `β_g(ψ) = r(g) ψ / ‖r(g) ψ‖` for an arbitrary invertible `g`.
    pub fn beta_act_by(&self, g: &Element, psi: &SphereVector) -> Result<SphereVector> {
        self.check_dim(psi.coords())?;
        SphereVector::normalized(self.rep(g)? * &psi.coords)
    }

    /// `β` for `g = exp((g_a + i g_b)/2)`.
    pub fn beta_act(&self, g_a: &Element, g_b: &Element, psi: &SphereVector) -> Result<SphereVector> {
        self.beta_act_by(&algebra::group_exp(g_a, g_b)?, psi)
    }

    /// `Ψ_ab(ψ) = ½ (r(a) + i r(b)) ψ - ½ ⟨ψ| r(a) |ψ⟩ ψ`.
    pub fn psi_field(&self, psi: &SphereVector, a: &Element, b: &Element) -> Result<CVec> {
        self.check_dim(psi.coords())?;
        a.ensure_self_adjoint()?;
        b.ensure_self_adjoint()?;
        let ra = self.rep(a)? * &psi.coords;
        let rb = self.rep(b)? * &psi.coords;
        let ea = dagger_dot(&psi.coords, &ra).re;
        let i = Complex64::new(0.0, 1.0);
        Ok((ra + rb * i - &psi.coords * Complex64::new(ea, 0.0)) * Complex64::new(0.5, 0.0))
    }

    /// Ensures `b` is skew-adjoint and commutes with the represented algebra.
    pub fn check_commutant(&self, b: &CMat) -> Result<()> {
        let q = self.quotient_dim();
        if b.nrows() != q || b.ncols() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                got: b.nrows(),
            });
        }
        let scale = 1.0 + max_abs(b);
        let skew = max_abs(&(b + b.adjoint()));
        if skew > 1e-10 * scale {
            return Err(Error::NotSkewAdjoint(skew));
        }
        let residual = self
            .rep_basis
            .iter()
            .map(|r| max_abs(&(r * b - b * r)))
            .fold(0.0, f64::max);
        let rscale = self.rep_basis.iter().map(max_abs).fold(0.0, f64::max);
        if residual > 1e-9 * scale * (1.0 + rscale) {
            return Err(Error::NotInCommutant(residual));
        }
        Ok(())
    }

    /// Fundamental field `Ξ_B(ψ) = B ψ` of the commutant unitary group.
    pub fn xi_field(&self, psi: &SphereVector, b: &CMat) -> Result<CVec> {
        self.check_dim(psi.coords())?;
        self.check_commutant(b)?;
        Ok(b * &psi.coords)
    }

    /// `T π(u) = Σ_i 2 Re⟨ψ| r(e_i) |u⟩ e_i`, tangent at `π(ψ)`.
    pub fn pushforward(&self, psi: &SphereVector, u: &CVec) -> Result<TangentVector> {
        self.check_dim(psi.coords())?;
        self.check_dim(u)?;
        let base = self.project_pi(psi)?;
        let weights: Vec<f64> = self
            .rep_basis
            .iter()
            .map(|r| 2.0 * dagger_dot(&psi.coords, &(r * u)).re)
            .collect();
        let value = algebra::from_coordinates(self.shape(), &weights)?;
        Ok(TangentVector::unchecked(&base, value))
    }

    /// Horizontal lift `Ψ_{a0}(ψ)` of a tangent vector at `π(ψ)`, with
    /// `{π(ψ), a} = v`.
    pub fn horizontal_lift(&self, psi: &SphereVector, v: &TangentVector) -> Result<CVec> {
        let base = self.project_pi(psi)?;
        let dev = (base.density() - v.base()).max_abs();
        if dev > 1e-10 {
            return Err(Error::BaseMismatch(dev));
        }
        let shifted = TangentVector::unchecked(&base, v.value().clone());
        let a = metric::lyapunov_solve(&base, &shifted, metric::DEFAULT_TOL)?.solution;
        self.psi_field(psi, &a, &Element::zero(self.shape()))
    }

    /// True iff `B ψ = 0` forces `B = 0` on the commutant.
    pub fn free_action_check(&self, psi: &SphereVector) -> Result<bool> {
        self.check_dim(psi.coords())?;
        let k = self.commutant_dim();
        if k == 0 {
            return Ok(true);
        }
        let images: Vec<CVec> = self.commutant_basis.iter().map(|m| m * &psi.coords).collect();
        let gram = CMat::from_fn(k, k, |i, j| dagger_dot(&images[i], &images[j]));
        let eig = hermitian_eigen(&gram);
        let min = eig.values[0];
        let max = eig.values[k - 1];
        Ok(max > 0.0 && min > 1e-10 * max)
    }

    /// `max(|ω(a† b)|, |ω(b a)|)`, which vanishes for `a` in the Gel'fand
    /// ideal.
    pub fn ideal_orthogonality_check(&self, a: &Element, b: &Element) -> Result<f64> {
        let d = self.reference.density();
        let ab = a.adjoint().mul(b)?;
        let ba = b.mul(a)?;
        Ok(algebra::pair_complex(d, &ab).norm().max(algebra::pair_complex(d, &ba).norm()))
    }

    pub fn report(&self) -> GnsReport {
        let mut multiplicative: f64 = 0.0;
        let mut adjoint: f64 = 0.0;
        let mut expectation: f64 = 0.0;
        for (e, r) in self.basis.iter().zip(&self.rep_basis) {
            adjoint = adjoint.max(max_abs(&(r - r.adjoint())));
            let ev = dagger_dot(&self.cyclic, &(r * &self.cyclic));
            expectation = expectation.max((ev - algebra::pair_complex(self.reference.density(), e)).norm());
            for (f, s) in self.basis.iter().zip(&self.rep_basis) {
                let prod = self.rep(&(e * f)).expect("same shape");
                multiplicative = multiplicative.max(max_abs(&(prod - r * s)));
            }
        }
        let mut ideal: f64 = 0.0;
        for a in &self.ideal_basis {
            for b in &self.basis {
                ideal = ideal.max(self.ideal_orthogonality_check(a, b).expect("same shape"));
            }
        }
        let commutant = self
            .commutant_basis
            .iter()
            .flat_map(|m| self.rep_basis.iter().map(move |r| max_abs(&(r * m - m * r))))
            .fold(0.0, f64::max);
        GnsReport {
            blocks: self.shape().blocks().to_vec(),
            algebra_dim: self.shape().dim(),
            ideal_dim: self.ideal_dim(),
            quotient_dim: self.quotient_dim(),
            commutant_dim: self.commutant_dim(),
            multiplicative_residual: multiplicative,
            adjoint_residual: adjoint,
            expectation_residual: expectation,
            ideal_orthogonality_residual: ideal,
            commutant_residual: commutant,
        }
    }
}

/// Builds GNS data with the default ideal threshold.
pub fn build_gns(rho: &StateFunctional) -> GnsData {
    GnsData::build(rho, DEFAULT_IDEAL_TOL)
}

/// `ℰ(u, v) = 4 Re⟨u, v⟩`.
pub fn ambient_metric(u: &CVec, v: &CVec) -> f64 {
    4.0 * dagger_dot(u, v).re
}

/// `Ω(u, v) = 4 Im⟨u, v⟩`.
pub fn ambient_symplectic(u: &CVec, v: &CVec) -> f64 {
    4.0 * dagger_dot(u, v).im
}

/// Nullspace of `M ↦ ([R_i, M])_i` over Hermitian `R_i`, from the kernel of
/// `Σ_i L_i† L_i = I⊗S + S̄⊗I - 2 Σ_i R̄_i⊗R_i` with `S = Σ_i R_i²`
/// (column-major vectorization).
fn commutant(reps: &[CMat], q: usize) -> (Vec<CMat>, Vec<CMat>) {
    if q == 0 {
        return (Vec::new(), Vec::new());
    }
    let id = CMat::identity(q, q);
    let mut s = CMat::zeros(q, q);
    let mut k = CMat::zeros(q * q, q * q);
    for r in reps {
        s += r * r;
        k -= r.conjugate().kronecker(r) * Complex64::new(2.0, 0.0);
    }
    k += id.kronecker(&s) + s.conjugate().kronecker(&id);
    let eig = hermitian_eigen(&k);
    let lmax = eig.values.iter().copied().fold(0.0, f64::max);
    let mut basis = Vec::new();
    for m in 0..q * q {
        if eig.values[m] <= COMMUTANT_TOL * lmax.max(1.0) {
            let v = eig.vectors.column(m);
            basis.push(CMat::from_fn(q, q, |i, j| v[i + j * q]));
        }
    }

    // real skew-adjoint basis, Gram-Schmidt under Re Tr(A† B)
    let re_inner = |a: &CMat, b: &CMat| a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum::<f64>();
    let mut skew: Vec<CMat> = Vec::new();
    let i = Complex64::new(0.0, 1.0);
    for m in &basis {
        let md = m.adjoint();
        for cand in [(m - &md).scale(0.5), (m + &md) * (i * 0.5)] {
            let mut c = cand;
            for e in &skew {
                let p = re_inner(e, &c);
                c -= e.scale(p);
            }
            let n = re_inner(&c, &c).sqrt();
            if n > 1e-8 {
                skew.push(c.unscale(n));
            }
        }
    }
    (basis, skew)
}
