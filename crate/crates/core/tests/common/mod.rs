//! Random test inputs shared by the integration targets.
#![allow(dead_code)]

use nonlocal_memory::qlinalg::{ComplexMatrix, DensityMatrix};
use nonlocal_memory::C64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian_vector<R: Rng>(rng: &mut R) -> [C64; 4] {
    let mut v = [C64::new(0.0, 0.0); 4];
    for z in v.iter_mut() {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *z = C64::new(re, im);
    }
    v
}

/// Haar unitary from Gram-Schmidt on complex Gaussian columns.
pub fn haar_unitary<R: Rng>(rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<[C64; 4]> = Vec::new();
    while cols.len() < 4 {
        let mut v = gaussian_vector(rng);
        for u in &cols {
            let p: C64 = (0..4).map(|i| u[i].conj() * v[i]).sum();
            for i in 0..4 {
                v[i] -= p * u[i];
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            cols.push(v.map(|z| z / n));
        }
    }
    let mut m = ComplexMatrix::zeros(4).unwrap();
    for (c, col) in cols.iter().enumerate() {
        for r in 0..4 {
            m[(r, c)] = col[r];
        }
    }
    m
}

/// Random full-rank mixed state `G G† / tr(G G†)` with `G` a complex Ginibre
/// matrix.
pub fn random_mixed<R: Rng>(rng: &mut R) -> DensityMatrix {
    let mut g = ComplexMatrix::zeros(4).unwrap();
    for r in 0..4 {
        let row = gaussian_vector(rng);
        for c in 0..4 {
            g[(r, c)] = row[c];
        }
    }
    let w = g.checked_mul(&g.adjoint()).unwrap();
    let tr = w.trace().re;
    let mut m = w.scale(C64::new(1.0 / tr, 0.0));
    // Exact Hermiticity after rounding.
    for r in 0..4 {
        m[(r, r)] = C64::new(m[(r, r)].re, 0.0);
        for c in r + 1..4 {
            m[(c, r)] = m[(r, c)].conj();
        }
    }
    DensityMatrix::new(m).unwrap()
}
