#![allow(dead_code)]

use ncg_hodge::linalg::{c64, identity, kron, ComplexMatrix};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Q factor of a Gaussian matrix.
pub fn unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    gaussian(rng, n, n).qr().q()
}

/// Rank-`r` matrix of shape `rows x cols`.
pub fn low_rank(rng: &mut impl Rng, rows: usize, cols: usize, r: usize) -> ComplexMatrix {
    gaussian(rng, rows, r) * gaussian(rng, r, cols)
}

/// `u (⊕ M_m ⊗ 1_k) u^*` for the given `(m, k)` shape.
pub struct BlockAlgebra {
    pub shape: Vec<(usize, usize)>,
    pub u: ComplexMatrix,
    pub n: usize,
}

impl BlockAlgebra {
    pub fn random(rng: &mut impl Rng, max_blocks: usize, max_m: usize, max_k: usize) -> Self {
        let count = rng.random_range(1..=max_blocks);
        let shape: Vec<(usize, usize)> = (0..count)
            .map(|_| (rng.random_range(1..=max_m), rng.random_range(1..=max_k)))
            .collect();
        let n = shape.iter().map(|&(m, k)| m * k).sum();
        let u = unitary(rng, n);
        Self { shape, u, n }
    }

    /// Block-diagonal element with the given summand entries, conjugated.
    pub fn element(&self, parts: &[ComplexMatrix]) -> ComplexMatrix {
        let mut x = ComplexMatrix::zeros(self.n, self.n);
        let mut at = 0;
        for (&(m, k), p) in self.shape.iter().zip(parts) {
            let b = kron(p, &identity(k));
            x.view_mut((at, at), (m * k, m * k)).copy_from(&b);
            at += m * k;
        }
        &self.u * x * self.u.adjoint()
    }

    pub fn random_element(&self, rng: &mut impl Rng) -> ComplexMatrix {
        let parts: Vec<ComplexMatrix> = self
            .shape
            .iter()
            .map(|&(m, _)| gaussian(rng, m, m))
            .collect();
        self.element(&parts)
    }

    /// Two random elements and the central projections.
    pub fn generators(&self, rng: &mut impl Rng) -> Vec<ComplexMatrix> {
        let mut g = vec![self.random_element(rng), self.random_element(rng)];
        for i in 0..self.shape.len() {
            let parts: Vec<ComplexMatrix> = self
                .shape
                .iter()
                .enumerate()
                .map(|(j, &(m, _))| {
                    if i == j {
                        identity(m)
                    } else {
                        ComplexMatrix::zeros(m, m)
                    }
                })
                .collect();
            g.push(self.element(&parts));
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.shape.iter().map(|&(m, _)| m * m).sum()
    }

    pub fn commutant_dim(&self) -> usize {
        self.shape.iter().map(|&(_, k)| k * k).sum()
    }

    pub fn sorted_shape(&self) -> Vec<(usize, usize)> {
        let mut s = self.shape.clone();
        s.sort();
        s
    }
}
