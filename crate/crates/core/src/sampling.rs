//! Seeded random ensembles: Ginibre states, Haar isometries, random instruments.
//!
//! Every randomized check draws from a per-trial generator derived from
//! `(suite seed, trial index)`, so results do not depend on how trials are
//! scheduled across threads.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numkit::{c, CMatrix, HermOp, C64};

pub type TrialRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for trial `index` of a suite seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Unnormalized random positive operator `G G^dag` with `G` Ginibre.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermOp {
    let g = complex_gaussian(rng, d, d);
    HermOp::symmetrized(&g * g.adjoint())
}

/// Ginibre-ensemble density operator `G G^dag / Tr[G G^dag]` (full rank almost surely).
pub fn ginibre_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermOp {
    let p = random_psd(rng, d);
    let t = p.trace();
    p.scale(1.0 / t)
}

/// Normalized Gaussian vector.
pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DVector<C64> {
    let v = complex_gaussian(rng, d, 1);
    let n = v.norm();
    DVector::from_iterator(d, v.iter().map(|z| z / n))
}

pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermOp {
    let v = random_pure_vector(rng, d);
    HermOp::symmetrized(&v * v.adjoint())
}

/// Haar-distributed isometry `rows x cols` (`rows >= cols`) from the QR factor
/// of a Gaussian matrix, with the phase of `R`'s diagonal absorbed.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = complex_gaussian(rng, rows, cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let n = d.norm();
        if n > 0.0 {
            let phase = d / n;
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    random_isometry(rng, d, d)
}

/// Slices a Haar isometry `(n d) x d` into `n` Kraus operators; `sum_j M_j^dag M_j = I`.
pub fn random_instrument_kraus<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    outcomes: usize,
) -> Vec<CMatrix> {
    let v = random_isometry(rng, outcomes * d, d);
    (0..outcomes)
        .map(|j| v.rows(j * d, d).into_owned())
        .collect()
}

pub fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
