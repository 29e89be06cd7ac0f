//! Positive functionals and states, stored through their trace-dual density
//! elements, together with the group actions on them and their fundamental
//! vector fields.
//!
//! A functional `ξ` is represented by the self-adjoint element `ρ` with
//! `ξ(a) = Tr(ρ a)`. Under this identification the action
//! `ξ_g(a) = ξ(g† a g)` becomes `ρ ↦ g ρ g†`, and tangent vectors to an orbit
//! are again self-adjoint elements.

use std::sync::OnceLock;

use crate::algebra::{self, AlgebraShape, BlockEigen, Element};
use crate::error::{Error, Result};

/// Default relative threshold separating kernel eigenvalues from the support.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-12;

const POSITIVITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;

/// Common view of positive functionals and states.
pub trait Functional {
    fn density(&self) -> &Element;

    /// Cached per-block eigendecomposition of the density.
    fn spectrum(&self) -> &[BlockEigen];

    fn is_state(&self) -> bool;

    fn shape(&self) -> &AlgebraShape {
        self.density().shape()
    }

    /// `ξ(a) = Tr(ρ a)` for self-adjoint `a` (real part otherwise).
    fn eval(&self, a: &Element) -> f64 {
        algebra::pair(self.density(), a)
    }

    fn max_eigenvalue(&self) -> f64 {
        self.spectrum()
            .iter()
            .filter_map(|e| e.values.iter().copied().reduce(f64::max))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn min_eigenvalue(&self) -> f64 {
        self.spectrum()
            .iter()
            .filter_map(|e| e.values.iter().copied().reduce(f64::min))
            .fold(f64::INFINITY, f64::min)
    }

    /// Faithful iff every eigenvalue exceeds `tol · λ_max`.
    fn is_faithful(&self, tol: f64) -> bool {
        self.min_eigenvalue() > tol * self.max_eigenvalue()
    }
}

fn validate_positive(density: &Element) -> Result<Vec<BlockEigen>> {
    density.ensure_self_adjoint()?;
    if density.max_abs() == 0.0 {
        return Err(Error::ZeroFunctional);
    }
    let spectrum = density.eigh();
    let min = spectrum
        .iter()
        .filter_map(|e| e.values.iter().copied().reduce(f64::min))
        .fold(f64::INFINITY, f64::min);
    let max = spectrum
        .iter()
        .filter_map(|e| e.values.iter().copied().reduce(f64::max))
        .fold(f64::NEG_INFINITY, f64::max);
    if min < -POSITIVITY_TOL * max.max(1.0) {
        return Err(Error::NotPositive(min));
    }
    if max <= 0.0 {
        return Err(Error::ZeroFunctional);
    }
    Ok(spectrum)
}

/// Nonzero positive linear functional.
#[derive(Clone, Debug)]
pub struct PositiveFunctional {
    density: Element,
    spectrum: OnceLock<Vec<BlockEigen>>,
}

impl PositiveFunctional {
    pub fn new(density: Element) -> Result<Self> {
        let spectrum = validate_positive(&density)?;
        Ok(Self {
            density,
            spectrum: OnceLock::from(spectrum),
        })
    }

    pub fn into_density(self) -> Element {
        self.density
    }

    /// `ξ / ξ(𝕀)`.
    pub fn normalized(&self) -> StateFunctional {
        let tr = self.density.trace().re;
        StateFunctional::new(self.density.scale(1.0 / tr))
            .expect("rescaled positive functional is a state")
    }
}

impl Functional for PositiveFunctional {
    fn density(&self) -> &Element {
        &self.density
    }
    fn spectrum(&self) -> &[BlockEigen] {
        self.spectrum.get_or_init(|| self.density.eigh())
    }
    fn is_state(&self) -> bool {
        false
    }
}

/// Positive functional with `ρ(𝕀) = 1`.
#[derive(Clone, Debug)]
pub struct StateFunctional {
    density: Element,
    spectrum: OnceLock<Vec<BlockEigen>>,
}

impl StateFunctional {
    pub fn new(density: Element) -> Result<Self> {
        let spectrum = validate_positive(&density)?;
        let tr = density.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace(tr));
        }
        Ok(Self {
            density,
            spectrum: OnceLock::from(spectrum),
        })
    }

    /// Maximally mixed state `𝕀 / Σ n_k`.
    pub fn maximally_mixed(shape: &AlgebraShape) -> Self {
        let n = shape.diag_len() as f64;
        Self::new(Element::identity(shape).scale(1.0 / n)).expect("maximally mixed state")
    }

    /// Diagonal state on `ℂ^m` from a probability vector.
    pub fn distribution(p: &[f64]) -> Result<Self> {
        let shape = AlgebraShape::new(vec![1; p.len()])?;
        Self::new(Element::from_real_diagonal(&shape, p)?)
    }

    pub fn as_positive(&self) -> PositiveFunctional {
        PositiveFunctional {
            density: self.density.clone(),
            spectrum: self.spectrum.clone(),
        }
    }

    pub fn into_density(self) -> Element {
        self.density
    }
}

impl Functional for StateFunctional {
    fn density(&self) -> &Element {
        &self.density
    }
    fn spectrum(&self) -> &[BlockEigen] {
        self.spectrum.get_or_init(|| self.density.eigh())
    }
    fn is_state(&self) -> bool {
        true
    }
}

/// Per-block rank of a density; labels the orbit through it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankSignature(pub Vec<usize>);

impl RankSignature {
    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Counts eigenvalues above `tol · λ_max` block by block.
pub fn rank_signature<F: Functional + ?Sized>(x: &F, tol: f64) -> RankSignature {
    let threshold = tol * x.max_eigenvalue();
    RankSignature(
        x.spectrum()
            .iter()
            .map(|e| e.values.iter().filter(|&&l| l > threshold).count())
            .collect(),
    )
}

/// Rank signature of a bare PSD element.
pub fn element_rank(density: &Element, tol: f64) -> RankSignature {
    let spectrum = density.eigh();
    let max = spectrum
        .iter()
        .filter_map(|e| e.values.iter().copied().reduce(f64::max))
        .fold(0.0, f64::max);
    RankSignature(
        spectrum
            .iter()
            .map(|e| e.values.iter().filter(|&&l| l > tol * max).count())
            .collect(),
    )
}

/// `ρ ↦ g ρ g†` for an arbitrary invertible `g`.
pub fn act_positive_by(g: &Element, xi: &PositiveFunctional) -> Result<PositiveFunctional> {
    let moved = g.mul(xi.density())?.mul(&g.adjoint())?;
    PositiveFunctional::new(moved.hermitian_part())
}

/// Action of `g = exp((g_a + i g_b)/2)` on positive functionals.
pub fn act_positive(g_a: &Element, g_b: &Element, xi: &PositiveFunctional) -> Result<PositiveFunctional> {
    act_positive_by(&algebra::group_exp(g_a, g_b)?, xi)
}

/// `ρ ↦ g ρ g† / Tr(g ρ g†)` for an arbitrary invertible `g`.
pub fn act_state_by(g: &Element, rho: &StateFunctional) -> Result<StateFunctional> {
    let moved = g.mul(rho.density())?.mul(&g.adjoint())?.hermitian_part();
    let tr = moved.trace().re;
    StateFunctional::new(moved.scale(1.0 / tr))
}

/// Action of `g = exp((g_a + i g_b)/2)` on states.
pub fn act_state(g_a: &Element, g_b: &Element, rho: &StateFunctional) -> Result<StateFunctional> {
    act_state_by(&algebra::group_exp(g_a, g_b)?, rho)
}

/// Self-adjoint tangent direction at a functional.
#[derive(Clone, Debug)]
pub struct TangentVector {
    base: Element,
    value: Element,
    at_state: bool,
}

impl TangentVector {
    /// Tangent vector at a state: self-adjoint and traceless.
    pub fn at_state(rho: &StateFunctional, value: Element) -> Result<Self> {
        check_tangent_shape(rho, &value)?;
        let tr = value.trace().re;
        if tr.abs() > 1e-12 * (1.0 + value.max_abs()) {
            return Err(Error::NotTraceless(tr));
        }
        Ok(Self {
            base: rho.density().clone(),
            value,
            at_state: true,
        })
    }

    /// Tangent vector at a positive functional: any self-adjoint value.
    pub fn at_positive<F: Functional + ?Sized>(xi: &F, value: Element) -> Result<Self> {
        check_tangent_shape(xi, &value)?;
        Ok(Self {
            base: xi.density().clone(),
            value,
            at_state: false,
        })
    }

    pub(crate) fn unchecked<F: Functional + ?Sized>(xi: &F, value: Element) -> Self {
        Self {
            base: xi.density().clone(),
            value,
            at_state: xi.is_state(),
        }
    }

    pub fn base(&self) -> &Element {
        &self.base
    }

    pub fn value(&self) -> &Element {
        &self.value
    }

    pub fn into_value(self) -> Element {
        self.value
    }

    pub fn is_at_state(&self) -> bool {
        self.at_state
    }

    /// Largest entry of the value on the kernel × kernel sub-block of the
    /// base, in the base's eigenbasis.
    pub fn kernel_mass(&self, tol: f64) -> f64 {
        kernel_mass(&self.base.eigh(), &self.value, tol)
    }

    /// Whether the value is tangent to the orbit of the base point.
    pub fn is_orbit_tangent(&self, tol: f64) -> bool {
        self.kernel_mass(tol) <= tol * (1.0 + self.value.max_abs())
    }
}

fn check_tangent_shape<F: Functional + ?Sized>(xi: &F, value: &Element) -> Result<()> {
    if xi.shape() != value.shape() {
        return Err(Error::ShapeMismatch {
            left: xi.shape().blocks().to_vec(),
            right: value.shape().blocks().to_vec(),
        });
    }
    value.ensure_self_adjoint()
}

/// Indices of kernel eigenvalues per block (relative to the global λ_max).
pub(crate) fn kernel_indices(spectrum: &[BlockEigen], tol: f64) -> Vec<Vec<bool>> {
    let max = spectrum
        .iter()
        .filter_map(|e| e.values.iter().copied().reduce(f64::max))
        .fold(0.0, f64::max);
    spectrum
        .iter()
        .map(|e| e.values.iter().map(|&l| l <= tol * max).collect())
        .collect()
}

pub(crate) fn kernel_mass(spectrum: &[BlockEigen], value: &Element, tol: f64) -> f64 {
    let kernel = kernel_indices(spectrum, tol);
    let mut mass: f64 = 0.0;
    for (k, eig) in spectrum.iter().enumerate() {
        let rotated = eig.to_eigenbasis(value.block(k));
        for (i, &ki) in kernel[k].iter().enumerate() {
            for (j, &kj) in kernel[k].iter().enumerate() {
                if ki && kj {
                    mass = mass.max(rotated[(i, j)].norm());
                }
            }
        }
    }
    mass
}

fn ensure_operand<F: Functional + ?Sized>(xi: &F, a: &Element) -> Result<()> {
    if xi.shape() != a.shape() {
        return Err(Error::ShapeMismatch {
            left: xi.shape().blocks().to_vec(),
            right: a.shape().blocks().to_vec(),
        });
    }
    a.ensure_self_adjoint()
}

/// Expectation value `e_a(ρ) = Tr(ρ a)`.
pub fn expectation(rho: &StateFunctional, a: &Element) -> Result<f64> {
    ensure_operand(rho, a)?;
    Ok(rho.eval(a))
}

/// Gradient tangent vector `𝕐_a(ρ) = {ρ, a} - Tr(ρ a) ρ` at a state.
pub fn gradient_vec(rho: &StateFunctional, a: &Element) -> Result<TangentVector> {
    ensure_operand(rho, a)?;
    Ok(TangentVector::unchecked(rho, gradient_value(rho, a)))
}

pub(crate) fn gradient_value(rho: &StateFunctional, a: &Element) -> Element {
    let d = rho.density();
    algebra::jordan_raw(d, a).axpy(-rho.eval(a), d)
}

/// Gradient tangent vector `Y_a(ξ) = {ξ, a}` on the orbit of positive
/// functionals.
pub fn positive_gradient_vec<F: Functional + ?Sized>(xi: &F, a: &Element) -> Result<TangentVector> {
    ensure_operand(xi, a)?;
    Ok(TangentVector {
        base: xi.density().clone(),
        value: algebra::jordan_raw(xi.density(), a),
        at_state: false,
    })
}

/// Hamiltonian tangent vector `(ξ b - b ξ) / 2i`.
///
/// This is the unique self-adjoint `v` with `Tr(v c) = ξ([[b, c]])` for
/// every self-adjoint `c`.
pub fn hamiltonian_vec<F: Functional + ?Sized>(xi: &F, b: &Element) -> Result<TangentVector> {
    ensure_operand(xi, b)?;
    Ok(TangentVector::unchecked(xi, hamiltonian_value(xi, b)))
}

pub(crate) fn hamiltonian_value<F: Functional + ?Sized>(xi: &F, b: &Element) -> Element {
    algebra::lie_raw(xi.density(), b)
}

/// Fundamental vector `V_ab(ξ) = {ξ, a} + (ξ b - b ξ)/2i` of the action on
/// positive functionals.
pub fn tangent_from_pair<F: Functional + ?Sized>(xi: &F, a: &Element, b: &Element) -> Result<TangentVector> {
    ensure_operand(xi, a)?;
    ensure_operand(xi, b)?;
    let value = &algebra::jordan_raw(xi.density(), a) + &hamiltonian_value(xi, b);
    Ok(TangentVector {
        base: xi.density().clone(),
        value,
        at_state: false,
    })
}
