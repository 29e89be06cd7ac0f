//! Random elements and states for tests, verification suites and demos.
//!
//! Gaussian entries are independent standard normals on real and imaginary
//! parts. States are drawn as `g g† / Tr(g g†)` with `g` an `n × r` Gaussian
//! block, which reaches every rank stratum.
//!
//! Reproducible runs use [`rng_from_seed`], a ChaCha8 stream keyed by one
//! 64-bit seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraShape, Element};
use crate::orbits::StateFunctional;

/// The generator behind every seeded computation.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `index` of a run keyed by `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_element<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Element {
    let blocks = shape
        .blocks()
        .iter()
        .map(|&n| gaussian_matrix(n, n, rng))
        .collect();
    Element::from_blocks(shape, blocks).expect("block sizes follow the shape")
}

pub fn random_self_adjoint<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Element {
    random_element(shape, rng).hermitian_part()
}

/// Haar-distributed unitary via QR of a Gaussian matrix with phase fix.
pub fn random_unitary<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> Element {
    let blocks = shape
        .blocks()
        .iter()
        .map(|&n| {
            let qr = gaussian_matrix(n, n, rng).qr();
            let (mut q, r) = qr.unpack();
            for j in 0..n {
                let d = r[(j, j)];
                let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
                let mut col = q.column_mut(j);
                col *= phase;
            }
            q
        })
        .collect();
    Element::from_blocks(shape, blocks).expect("block sizes follow the shape")
}

/// Random faithful state.
pub fn random_state<R: Rng + ?Sized>(shape: &AlgebraShape, rng: &mut R) -> StateFunctional {
    random_state_with_ranks(shape, shape.blocks(), rng)
}

/// Random state with prescribed per-block ranks (at least one nonzero).
pub fn random_state_with_ranks<R: Rng + ?Sized>(
    shape: &AlgebraShape,
    ranks: &[usize],
    rng: &mut R,
) -> StateFunctional {
    assert_eq!(ranks.len(), shape.num_blocks(), "one rank per block");
    assert!(ranks.iter().any(|&r| r > 0), "at least one block must be nonzero");
    let blocks: Vec<_> = shape
        .blocks()
        .iter()
        .zip(ranks)
        .map(|(&n, &r)| {
            assert!(r <= n, "rank exceeds block size");
            if r == 0 {
                DMatrix::zeros(n, n)
            } else {
                let g = gaussian_matrix(n, r, rng);
                &g * g.adjoint()
            }
        })
        .collect();
    let density = Element::from_blocks(shape, blocks).expect("block sizes follow the shape");
    let tr = density.trace().re;
    StateFunctional::new(density.scale(1.0 / tr).hermitian_part())
        .expect("normalized Gram matrix is a state")
}

/// Random pure state supported in block `block`.
pub fn random_pure_state<R: Rng + ?Sized>(
    shape: &AlgebraShape,
    block: usize,
    rng: &mut R,
) -> StateFunctional {
    let mut ranks = vec![0; shape.num_blocks()];
    ranks[block] = 1;
    random_state_with_ranks(shape, &ranks, rng)
}

/// Random faithful probability vector on `ℂ^m`, as a diagonal state.
pub fn random_distribution<R: Rng + ?Sized>(m: usize, rng: &mut R) -> StateFunctional {
    random_state(&AlgebraShape::abelian(m), rng)
}
