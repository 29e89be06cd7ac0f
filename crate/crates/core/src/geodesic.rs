//! Geodesics of `G₁` as projections of great circles on the GNS sphere.
//!
//! Starting at `ρ` with initial velocity `𝕐_a(ρ)`, put `a_g = a - ρ(a) 𝕀`
//! and `N² = ρ(a²) - ρ(a)²`. The horizontal lift of the velocity is
//! `φ = ½ a_g ψ` with `|φ| = N/2`, and projecting the great circle through
//! `ψ` in direction `φ` gives
//!
//! `σ(t) = cos²(Nt/2) ρ + sin²(Nt/2)/N² a_g ρ a_g + sin(Nt)/N {ρ, a_g}`.
//!
//! The curve has constant speed `N` and period `2π/N`. It can touch lower
//! rank strata at isolated times.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{self, Element};
use crate::curvature;
use crate::error::{Error, Result};
use crate::gns::SphereVector;
use crate::metric;
use crate::orbits::{self, element_rank, Functional, PositiveFunctional, RankSignature, StateFunctional, TangentVector};

/// Smallest finite-difference step accepted by [`geodesic_residual`].
pub const MIN_STEP: f64 = 1e-6;

const RANK_TOL: f64 = 1e-9;

/// Start point and generator of a geodesic through the state orbit.
#[derive(Clone, Debug)]
pub struct GeodesicSpec {
    start: StateFunctional,
    direction: Element,
    centered: Element,
    speed: f64,
    sandwich: Element,
    jordan: Element,
}

impl GeodesicSpec {
    pub fn new(start: StateFunctional, direction: Element) -> Result<Self> {
        if start.shape() != direction.shape() {
            return Err(Error::ShapeMismatch {
                left: start.shape().blocks().to_vec(),
                right: direction.shape().blocks().to_vec(),
            });
        }
        direction.ensure_self_adjoint()?;
        let ea = start.eval(&direction);
        let centered = direction.axpy(-ea, &Element::identity(start.shape()));
        let n2 = start.eval(&algebra::jordan_raw(&centered, &centered));
        let scale = direction.max_abs().powi(2);
        if !(n2 > 1e-14 * scale) || n2 <= f64::MIN_POSITIVE {
            return Err(Error::ZeroDirection);
        }
        let d = start.density();
        let sandwich = (&(&centered * d) * &centered).hermitian_part();
        let jordan = algebra::jordan_raw(d, &centered);
        Ok(Self {
            start,
            direction,
            centered,
            speed: n2.sqrt(),
            sandwich,
            jordan,
        })
    }

    /// Geodesic with initial velocity `v`, through `a = A_ρ⁻¹(v)`.
    pub fn from_tangent(start: StateFunctional, v: &TangentVector) -> Result<Self> {
        let a = metric::lyapunov_solve(&start, v, metric::DEFAULT_TOL)?.solution;
        Self::new(start, a)
    }

    pub fn start(&self) -> &StateFunctional {
        &self.start
    }

    pub fn direction(&self) -> &Element {
        &self.direction
    }

    /// `a_g = a - ρ(a) 𝕀`.
    pub fn centered(&self) -> &Element {
        &self.centered
    }

    /// `N`, the constant `G₁`-speed.
    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.speed
    }

    /// Initial velocity `𝕐_a(ρ)`.
    pub fn initial_velocity(&self) -> TangentVector {
        orbits::gradient_vec(&self.start, &self.direction).expect("validated on construction")
    }

    fn combine(&self, c0: f64, c1: f64, c2: f64) -> Element {
        self.start
            .density()
            .scale(c0)
            .axpy(c1, &self.sandwich)
            .axpy(c2, &self.jordan)
    }

    /// `σ(t)`.
    pub fn density_at(&self, t: f64) -> Element {
        let n = self.speed;
        let (s, c) = (0.5 * n * t).sin_cos();
        self.combine(c * c, s * s / (n * n), (n * t).sin() / n)
    }

    /// `σ̇(t)`.
    pub fn velocity_at(&self, t: f64) -> Element {
        let n = self.speed;
        let (s, c) = (n * t).sin_cos();
        self.combine(-0.5 * n * s, 0.5 * s / n, c)
    }
}

/// Sample of a geodesic with its spectral diagnostics.
#[derive(Clone, Debug)]
pub struct GeodesicPoint {
    pub t: f64,
    pub density: Element,
    pub trace: f64,
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub rank: RankSignature,
}

impl GeodesicPoint {
    /// The sample as a state, if it passes validation.
    pub fn state(&self) -> Result<StateFunctional> {
        StateFunctional::new(self.density.clone())
    }
}

pub fn geodesic_point(spec: &GeodesicSpec, t: f64) -> GeodesicPoint {
    let density = spec.density_at(t);
    let mut eigenvalues = density.eigenvalues();
    eigenvalues.sort_by(f64::total_cmp);
    GeodesicPoint {
        t,
        trace: density.trace().re,
        min_eigenvalue: eigenvalues.first().copied().unwrap_or(0.0),
        rank: element_rank(&density, RANK_TOL),
        eigenvalues,
        density,
    }
}

/// `samples` evenly spaced points on `[0, t_max]`, endpoints included.
pub fn sample(spec: &GeodesicSpec, t_max: f64, samples: usize) -> Vec<GeodesicPoint> {
    let step = if samples > 1 { t_max / (samples - 1) as f64 } else { 0.0 };
    (0..samples)
        .into_par_iter()
        .map(|i| geodesic_point(spec, i as f64 * step))
        .collect()
}

/// `γ(t) = cos(|φ| t) ψ + sin(|φ| t) φ/|φ|` for `φ` tangent to the sphere.
pub fn great_circle(psi: &SphereVector, phi: &DVector<Complex64>, t: f64) -> Result<SphereVector> {
    if phi.len() != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            got: phi.len(),
        });
    }
    let norm = phi.norm();
    if norm == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let (s, c) = (norm * t).sin_cos();
    SphereVector::normalized(psi.coords() * Complex64::new(c, 0.0) + phi * Complex64::new(s / norm, 0.0))
}

/// `|t1 - t0| · √G₁(𝕐_a, 𝕐_a)`.
pub fn arc_length(spec: &GeodesicSpec, t0: f64, t1: f64) -> f64 {
    let g = metric::metric_g1_fields(&spec.start, &spec.direction, &spec.direction);
    (t1 - t0).abs() * g.sqrt()
}

/// Christoffel term `Γ(v, v)` of `G₁` in the affine chart of self-adjoint
/// elements, at a state `ρ` with tangent `v`.
pub fn christoffel(rho: &StateFunctional, v: &TangentVector) -> Result<Element> {
    let a = metric::lyapunov_solve(rho, v, metric::DEFAULT_TOL)?.solution;
    let nabla = curvature::covariant_derivative_o1(rho, &a, &a)?.into_value();
    // derivative of the field 𝕐_a along v, with a held fixed
    let d = rho.density();
    let dy = algebra::jordan_raw(v.value(), &a)
        .axpy(-algebra::pair(v.value(), &a), d)
        .axpy(-rho.eval(&a), v.value());
    Ok(&nabla - &dy)
}

/// Frobenius norm of `σ̈ + Γ(σ̇, σ̇)` at `t`, with both derivatives taken by
/// central differences of step `h`.
pub fn geodesic_residual(spec: &GeodesicSpec, t: f64, h: f64) -> Result<f64> {
    if !(h >= MIN_STEP) {
        return Err(Error::StepTooSmall(h));
    }
    let (prev, here, next) = (spec.density_at(t - h), spec.density_at(t), spec.density_at(t + h));
    let vel = (&next - &prev).scale(0.5 / h);
    let acc = (&(&next - &here.scale(2.0)) + &prev).scale(1.0 / (h * h));
    let rho = StateFunctional::new(here)?;
    let v = TangentVector::at_state(&rho, vel.hermitian_part())?;
    let gamma = christoffel(&rho, &v)?;
    Ok((&acc + &gamma).frobenius_norm())
}

/// Residual of the Fisher–Rao geodesic equation
/// `p̈_j - ṗ_j²/(2p_j) + p_j Σ_k ṗ_k²/(2p_k)` on an Abelian orbit, by
/// central differences.
pub fn fisher_rao_residual(spec: &GeodesicSpec, t: f64, h: f64) -> Result<f64> {
    if !spec.start.shape().is_abelian() {
        return Err(Error::NotAbelian);
    }
    if !(h >= MIN_STEP) {
        return Err(Error::StepTooSmall(h));
    }
    let diag = |x: &Element| -> Vec<f64> { x.blocks().iter().map(|b| b[(0, 0)].re).collect() };
    let (pm, p0, pp) = (diag(&spec.density_at(t - h)), diag(&spec.density_at(t)), diag(&spec.density_at(t + h)));
    let pmax = p0.iter().copied().fold(0.0, f64::max);
    let support: Vec<usize> = (0..p0.len()).filter(|&j| p0[j] > 1e-12 * pmax).collect();
    let dp: Vec<f64> = (0..p0.len()).map(|j| (pp[j] - pm[j]) / (2.0 * h)).collect();
    let ddp: Vec<f64> = (0..p0.len()).map(|j| (pp[j] - 2.0 * p0[j] + pm[j]) / (h * h)).collect();
    let energy: f64 = support.iter().map(|&j| dp[j] * dp[j] / (2.0 * p0[j])).sum();
    Ok(support
        .iter()
        .map(|&j| (ddp[j] - dp[j] * dp[j] / (2.0 * p0[j]) + p0[j] * energy).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Geodesic of `G` on positive functionals with initial velocity `Y_a(ξ)`:
/// the projection of the straight line `ψ + t ½ r(a) ψ`, which is
/// `(𝕀 + t a/2) ξ (𝕀 + t a/2)`.
pub fn positive_geodesic_point(xi: &PositiveFunctional, a: &Element, t: f64) -> Result<Element> {
    a.ensure_self_adjoint()?;
    let g = Element::identity(xi.shape()).axpy(0.5 * t, a);
    Ok((&(&g * xi.density()) * &g).hermitian_part())
}

/// Root fidelity `Tr √(√ρ σ √ρ)`.
pub fn fidelity(rho: &StateFunctional, sigma: &StateFunctional) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::ShapeMismatch {
            left: rho.shape().blocks().to_vec(),
            right: sigma.shape().blocks().to_vec(),
        });
    }
    let sqrt = |x: f64| x.max(0.0).sqrt();
    let r = rho.density().apply_spectral(sqrt);
    let inner = (&(&r * sigma.density()) * &r).hermitian_part();
    Ok(inner.eigenvalues().into_iter().map(sqrt).sum())
}

/// Geodesic from `ρ` to `σ` with the time at which it arrives.
#[derive(Clone, Debug)]
pub struct ConnectingGeodesic {
    pub spec: Option<GeodesicSpec>,
    pub t_end: f64,
    pub fidelity: f64,
    /// `max |σ(t_end) - σ|`.
    pub endpoint_residual: f64,
}

impl ConnectingGeodesic {
    /// Length of the connecting arc, `2 arccos F`.
    pub fn length(&self) -> f64 {
        self.spec.as_ref().map_or(0.0, |s| arc_length(s, 0.0, self.t_end))
    }
}

/// Builds the geodesic from a faithful `ρ` to `σ` with generator
/// `M = ρ^{-1/2} (ρ^{1/2} σ ρ^{1/2})^{1/2} ρ^{-1/2}`, which satisfies
/// `M ρ M = σ` and `ρ(M) = F`.
pub fn connecting_geodesic(rho: &StateFunctional, sigma: &StateFunctional) -> Result<ConnectingGeodesic> {
    if !rho.is_faithful(orbits::DEFAULT_KERNEL_TOL) {
        return Err(Error::NotFaithful(rho.min_eigenvalue()));
    }
    let f = fidelity(rho, sigma)?;
    let r = rho.density().apply_spectral(f64::sqrt);
    let r_inv = rho.density().apply_spectral(|x| 1.0 / x.sqrt());
    let inner = (&(&r * sigma.density()) * &r).hermitian_part().apply_spectral(|x| x.max(0.0).sqrt());
    let m = (&(&r_inv * &inner) * &r_inv).hermitian_part();
    let theta = f.clamp(-1.0, 1.0).acos();
    match GeodesicSpec::new(rho.clone(), m) {
        Ok(spec) if theta > 0.0 => {
            let t_end = 2.0 * theta / spec.speed();
            let endpoint_residual = (&spec.density_at(t_end) - sigma.density()).max_abs();
            Ok(ConnectingGeodesic {
                spec: Some(spec),
                t_end,
                fidelity: f,
                endpoint_residual,
            })
        }
        _ => Ok(ConnectingGeodesic {
            spec: None,
            t_end: 0.0,
            fidelity: f,
            endpoint_residual: (rho.density() - sigma.density()).max_abs(),
        }),
    }
}

/// Geodesic distance of `G₁`, equal to `2 arccos F(ρ, σ)`.
pub fn distance(rho: &StateFunctional, sigma: &StateFunctional) -> Result<f64> {
    Ok(connecting_geodesic(rho, sigma)?.length())
}
