//! Levi-Civita connections of `G` and `G₁`, their Riemann and sectional
//! curvatures, and the second fundamental form of the state orbit inside
//! the orbit of positive functionals.
//!
//! All quantities are evaluated on gradient vector fields `Y_a`, which span
//! every tangent space of a point orbit.

use crate::algebra::{self, Element};
use crate::error::{Error, Result};
use crate::metric;
use crate::orbits::{self, Functional, StateFunctional, TangentVector};

const DEGENERATE_TOL: f64 = 1e-12;

/// Plane spanned by the gradient vectors of two self-adjoint generators.
#[derive(Clone, Debug)]
pub struct CurvaturePlane {
    a: Element,
    b: Element,
}

impl CurvaturePlane {
    pub fn new(a: Element, b: Element) -> Result<Self> {
        if a.shape() != b.shape() {
            return Err(Error::ShapeMismatch {
                left: a.shape().blocks().to_vec(),
                right: b.shape().blocks().to_vec(),
            });
        }
        a.ensure_self_adjoint()?;
        b.ensure_self_adjoint()?;
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &Element {
        &self.a
    }

    pub fn b(&self) -> &Element {
        &self.b
    }
}

fn check_operands<F: Functional + ?Sized>(xi: &F, ops: &[&Element]) -> Result<()> {
    for x in ops {
        if x.shape() != xi.shape() {
            return Err(Error::ShapeMismatch {
                left: xi.shape().blocks().to_vec(),
                right: x.shape().blocks().to_vec(),
            });
        }
        x.ensure_self_adjoint()?;
    }
    Ok(())
}

/// `∇_{Y_a} Y_b = ½ (Y_{a∘b} - X_{[[a,b]]})` on the orbit of positive
/// functionals.
pub fn covariant_derivative_o<F: Functional + ?Sized>(omega: &F, a: &Element, b: &Element) -> Result<TangentVector> {
    check_operands(omega, &[a, b])?;
    let d = omega.density();
    let y = algebra::jordan_raw(d, &algebra::jordan_raw(a, b));
    let x = algebra::lie_raw(d, &algebra::lie_raw(a, b));
    TangentVector::at_positive(omega, (&y - &x).scale(0.5))
}

/// `∇¹_{𝕐_a} 𝕐_b = ½ (𝕐_{a∘b} - e_a 𝕐_b - e_b 𝕐_a - 𝕏_{[[a,b]]})` on the
/// orbit of states.
pub fn covariant_derivative_o1(rho: &StateFunctional, a: &Element, b: &Element) -> Result<TangentVector> {
    check_operands(rho, &[a, b])?;
    let ea = rho.eval(a);
    let eb = rho.eval(b);
    let value = orbits::gradient_value(rho, &algebra::jordan_raw(a, b))
        .axpy(-ea, &orbits::gradient_value(rho, b))
        .axpy(-eb, &orbits::gradient_value(rho, a))
        .axpy(-1.0, &orbits::hamiltonian_value(rho, &algebra::lie_raw(a, b)))
        .scale(0.5);
    Ok(TangentVector::unchecked(rho, value))
}

/// `G(X_x, X_y)` at `ω`, through the gradient representative of `X_y`.
fn g_hamiltonian<F: Functional + ?Sized>(omega: &F, x: &Element, y: &Element) -> Result<f64> {
    metric::metric_g_hamiltonian(omega, x, y)
}

/// `G(R(Y_a, Y_b) Y_c, Y_d)` on the orbit of positive functionals.
pub fn riemann_o<F: Functional + ?Sized>(
    omega: &F,
    a: &Element,
    b: &Element,
    c: &Element,
    d: &Element,
) -> Result<f64> {
    check_operands(omega, &[a, b, c, d])?;
    let l = algebra::lie_raw;
    let (ab, ac, ad) = (l(a, b), l(a, c), l(a, d));
    let (bc, bd, cd) = (l(b, c), l(b, d), l(c, d));
    let gy = |x: &Element, y: &Element| metric::metric_g_fields(omega, x, y);
    let yy = 0.25 * gy(&ad, &bc) - 0.25 * gy(&ac, &bd) - 0.5 * gy(&ab, &cd);
    let xx = 0.5 * g_hamiltonian(omega, &ab, &cd)? + 0.25 * g_hamiltonian(omega, &ac, &bd)?
        - 0.25 * g_hamiltonian(omega, &bc, &ad)?;
    Ok(yy + xx)
}

fn degenerate(n: f64, scale: f64) -> bool {
    !(n > DEGENERATE_TOL * scale) || n <= f64::MIN_POSITIVE
}

/// Sectional curvature of `G` on the plane `(Y_a, Y_b)`.
pub fn sectional_o<F: Functional + ?Sized>(omega: &F, plane: &CurvaturePlane) -> Result<f64> {
    let (a, b) = (plane.a(), plane.b());
    check_operands(omega, &[a, b])?;
    let gaa = metric::metric_g_fields(omega, a, a);
    let gbb = metric::metric_g_fields(omega, b, b);
    let gab = metric::metric_g_fields(omega, a, b);
    let n = gaa * gbb - gab * gab;
    if degenerate(n, gaa * gbb) {
        return Err(Error::DegeneratePlane(n));
    }
    let c = algebra::lie_raw(a, b);
    let gyy = metric::metric_g_fields(omega, &c, &c);
    let gxx = g_hamiltonian(omega, &c, &c)?;
    Ok(0.75 * (gyy - gxx) / n)
}

/// `Π(Y_a, Y_b) = ½ (ρ({a,b}) - ρ(a) ρ(b)) Y_𝕀(ρ)`, normal to the state orbit.
pub fn second_fundamental_form(rho: &StateFunctional, a: &Element, b: &Element) -> Result<TangentVector> {
    check_operands(rho, &[a, b])?;
    let coeff = 0.5 * metric::metric_g1_fields(rho, a, b);
    TangentVector::at_positive(rho, rho.density().scale(coeff))
}

/// `G₁(𝕐_a, 𝕐_d) G₁(𝕐_b, 𝕐_c) - G₁(𝕐_a, 𝕐_c) G₁(𝕐_b, 𝕐_d)`.
pub fn gauss_term(rho: &StateFunctional, a: &Element, b: &Element, c: &Element, d: &Element) -> f64 {
    let g = |x: &Element, y: &Element| metric::metric_g1_fields(rho, x, y);
    g(a, d) * g(b, c) - g(a, c) * g(b, d)
}

/// `G₁(R₁(𝕐_a, 𝕐_b) 𝕐_c, 𝕐_d)` on the orbit of states.
pub fn riemann_o1(rho: &StateFunctional, a: &Element, b: &Element, c: &Element, d: &Element) -> Result<f64> {
    Ok(riemann_o(rho, a, b, c, d)? + 0.25 * gauss_term(rho, a, b, c, d))
}

/// Sectional curvature of `G₁` on the plane `(𝕐_a, 𝕐_b)`.
pub fn sectional_o1(rho: &StateFunctional, plane: &CurvaturePlane) -> Result<f64> {
    let (a, b) = (plane.a(), plane.b());
    check_operands(rho, &[a, b])?;
    let gaa = metric::metric_g1_fields(rho, a, a);
    let gbb = metric::metric_g1_fields(rho, b, b);
    let gab = metric::metric_g1_fields(rho, a, b);
    let n = gaa * gbb - gab * gab;
    if degenerate(n, gaa * gbb) {
        return Err(Error::DegeneratePlane(n));
    }
    let c = algebra::lie_raw(a, b);
    let ec = rho.eval(&c);
    let gyy = metric::metric_g1_fields(rho, &c, &c);
    let gxx = g_hamiltonian(rho, &c, &c)?;
    Ok(0.25 + 0.75 * (gyy + ec * ec - gxx) / n)
}
