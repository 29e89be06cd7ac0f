//! Contravariant tensors `R` and `Λ`, the metric `G` on orbits of positive
//! functionals, its restriction `G₁` to states, and the closed forms it
//! reduces to (Fisher–Rao on Abelian algebras, Bures–Helstrom on faithful
//! states).
//!
//! Everything goes through the inverse of `A_ξ(a) = {ξ, a}`, computed by
//! division in the eigenbasis of the density.

use crate::algebra::{self, BlockEigen, Element};
use crate::error::{Error, Result};
use crate::orbits::{self, Functional, StateFunctional, TangentVector};

/// Relative threshold used for kernel detection and tangent compatibility.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Solution `a` of `{ξ, a} = v`.
#[derive(Clone, Debug)]
pub struct LyapunovSolution {
    pub base: Element,
    pub rhs: Element,
    pub solution: Element,
    /// `max |{ξ, a} - v|`.
    pub residual: f64,
}

/// `R(a, b)(ξ) = ξ({a, b})`.
pub fn r_tensor<F: Functional + ?Sized>(xi: &F, a: &Element, b: &Element) -> f64 {
    xi.eval(&algebra::jordan_raw(a, b))
}

/// `Λ(a, b)(ξ) = ξ([[a, b]])`.
pub fn lambda_tensor<F: Functional + ?Sized>(xi: &F, a: &Element, b: &Element) -> f64 {
    xi.eval(&algebra::lie_raw(a, b))
}

fn max_eigenvalue(spectrum: &[BlockEigen]) -> f64 {
    spectrum
        .iter()
        .filter_map(|e| e.values.iter().copied().reduce(f64::max))
        .fold(0.0, f64::max)
}

/// Eigenbasis division `a_ij = 2 v_ij / (λ_i + λ_j)`, zero on the
/// kernel × kernel block. Fails if `v` has mass there.
pub(crate) fn invert_anticommutator(spectrum: &[BlockEigen], v: &Element, tol: f64) -> Result<Element> {
    let lmax = max_eigenvalue(spectrum);
    let cutoff = tol * lmax;
    let scale = 1.0 + v.max_abs();
    let mut blocks = Vec::with_capacity(spectrum.len());
    for (k, eig) in spectrum.iter().enumerate() {
        let mut m = eig.to_eigenbasis(v.block(k));
        let n = m.nrows();
        for i in 0..n {
            for j in 0..n {
                let li = eig.values[i];
                let lj = eig.values[j];
                if li <= cutoff && lj <= cutoff {
                    let mass = m[(i, j)].norm();
                    if mass > tol * scale {
                        return Err(Error::IncompatibleTangent { mass });
                    }
                    m[(i, j)] = 0.0.into();
                } else {
                    m[(i, j)] *= 2.0 / (li + lj);
                }
            }
        }
        blocks.push(eig.from_eigenbasis(&m));
    }
    Ok(Element::from_blocks(v.shape(), blocks)?.hermitian_part())
}

fn check_base<F: Functional + ?Sized>(xi: &F, v: &TangentVector) -> Result<()> {
    if xi.shape() != v.value().shape() {
        return Err(Error::ShapeMismatch {
            left: xi.shape().blocks().to_vec(),
            right: v.value().shape().blocks().to_vec(),
        });
    }
    let dev = (xi.density() - v.base()).max_abs();
    if dev > 1e-12 * (1.0 + xi.density().max_abs()) {
        return Err(Error::BaseMismatch(dev));
    }
    Ok(())
}

/// Solves `{ξ, a} = v` for a tangent vector `v` at `ξ`.
pub fn lyapunov_solve<F: Functional + ?Sized>(xi: &F, v: &TangentVector, tol: f64) -> Result<LyapunovSolution> {
    check_base(xi, v)?;
    let solution = invert_anticommutator(xi.spectrum(), v.value(), tol)?;
    let residual = (&algebra::jordan_raw(xi.density(), &solution) - v.value()).max_abs();
    Ok(LyapunovSolution {
        base: xi.density().clone(),
        rhs: v.value().clone(),
        solution,
        residual,
    })
}

/// `G_ω(v, w) = Tr(v A_ω⁻¹(w))`.
pub fn metric_g<F: Functional + ?Sized>(omega: &F, v: &TangentVector, w: &TangentVector) -> Result<f64> {
    check_base(omega, v)?;
    check_base(omega, w)?;
    let aw = invert_anticommutator(omega.spectrum(), w.value(), DEFAULT_TOL)?;
    // reject off-orbit v as well
    invert_anticommutator(omega.spectrum(), v.value(), DEFAULT_TOL)?;
    Ok(algebra::pair(v.value(), &aw))
}

/// `G(Y_a, Y_b)(ω) = ω({a, b})`.
pub fn metric_g_fields<F: Functional + ?Sized>(omega: &F, a: &Element, b: &Element) -> f64 {
    r_tensor(omega, a, b)
}

/// `G(Y_a, X_b)(ω) = ω([[b, a]])`.
pub fn metric_g_mixed<F: Functional + ?Sized>(omega: &F, a: &Element, b: &Element) -> f64 {
    lambda_tensor(omega, b, a)
}

/// Minimal-support `B` with `{ω, B} = X_b(ω)`, so that the gradient field of
/// `B` matches the Hamiltonian field of `b` at `ω`.
pub fn hamiltonian_to_gradient<F: Functional + ?Sized>(omega: &F, b: &Element, tol: f64) -> Result<Element> {
    let x = orbits::hamiltonian_vec(omega, b)?;
    invert_anticommutator(omega.spectrum(), x.value(), tol)
}

/// `G(X_a, X_b)(ω) = ω([[a, B_ω^b]])`.
pub fn metric_g_hamiltonian<F: Functional + ?Sized>(omega: &F, a: &Element, b: &Element) -> Result<f64> {
    let bb = hamiltonian_to_gradient(omega, b, DEFAULT_TOL)?;
    Ok(omega.eval(&algebra::lie_raw(a, &bb)))
}

fn ensure_traceless(v: &TangentVector) -> Result<()> {
    let tr = v.value().trace().re;
    if tr.abs() > 1e-12 * (1.0 + v.value().max_abs()) {
        return Err(Error::NotTraceless(tr));
    }
    Ok(())
}

/// `G₁(v, w)` at a state, for traceless tangent vectors.
pub fn metric_g1(rho: &StateFunctional, v: &TangentVector, w: &TangentVector) -> Result<f64> {
    ensure_traceless(v)?;
    ensure_traceless(w)?;
    metric_g(rho, v, w)
}

/// `G₁(𝕐_a, 𝕐_b)(ρ) = e_{a∘b}(ρ) - e_a(ρ) e_b(ρ)`.
pub fn metric_g1_fields(rho: &StateFunctional, a: &Element, b: &Element) -> f64 {
    r_tensor(rho, a, b) - rho.eval(a) * rho.eval(b)
}

/// Fisher–Rao `Σ_j v_j w_j / p_j` over the support of `p`.
pub fn fisher_rao(p: &StateFunctional, v: &TangentVector, w: &TangentVector) -> Result<f64> {
    if !p.shape().is_abelian() {
        return Err(Error::NotAbelian);
    }
    check_base(p, v)?;
    check_base(p, w)?;
    let probs: Vec<f64> = p.density().blocks().iter().map(|b| b[(0, 0)].re).collect();
    let pmax = probs.iter().copied().fold(0.0, f64::max);
    let vs: Vec<f64> = v.value().blocks().iter().map(|b| b[(0, 0)].re).collect();
    let ws: Vec<f64> = w.value().blocks().iter().map(|b| b[(0, 0)].re).collect();
    let scale = 1.0 + v.value().max_abs().max(w.value().max_abs());
    let mut sum = 0.0;
    for (j, &pj) in probs.iter().enumerate() {
        if pj <= DEFAULT_TOL * pmax {
            for value in [vs[j], ws[j]] {
                if value.abs() > DEFAULT_TOL * scale {
                    return Err(Error::SupportMismatch { index: j, value });
                }
            }
        } else {
            sum += vs[j] * ws[j] / pj;
        }
    }
    Ok(sum)
}

/// Bures–Helstrom `Tr(a A_ρ⁻¹(b))` at a faithful state (no factor ½).
pub fn bures_helstrom(rho: &StateFunctional, a: &TangentVector, b: &TangentVector) -> Result<f64> {
    if !rho.is_faithful(orbits::DEFAULT_KERNEL_TOL) {
        return Err(Error::NotFaithful(rho.min_eigenvalue()));
    }
    metric_g1(rho, a, b)
}
