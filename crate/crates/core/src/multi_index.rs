//! Multi-indices `α ∈ ℕ^D` with `|α| ≤ M`, stored in graded lexicographic order.
//!
//! Index 0 is `α = 0`; all indices of total degree `g` form the contiguous
//! block `[g(g+1)/2, (g+1)(g+2)/2)` in 2D (`[g, g+1)` in 1D), so "all
//! coefficients up to degree `K`" is always a prefix of the coefficient array.

use crate::error::{Error, Result};

/// Largest velocity dimension supported.
pub const MAX_DIM: usize = 2;

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexSet {
    dim: usize,
    order: usize,
    alphas: Vec<[usize; MAX_DIM]>,
    plus: [Vec<u32>; MAX_DIM],
    minus: [Vec<u32>; MAX_DIM],
}

impl MultiIndexSet {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "velocity dimension must be 1 or 2, got {dim}"
            )));
        }
        let mut alphas = Vec::with_capacity(count(dim, order));
        for grade in 0..=order {
            if dim == 1 {
                alphas.push([grade, 0]);
            } else {
                for a1 in 0..=grade {
                    alphas.push([a1, grade - a1]);
                }
            }
        }
        let mut set = MultiIndexSet {
            dim,
            order,
            alphas,
            plus: [Vec::new(), Vec::new()],
            minus: [Vec::new(), Vec::new()],
        };
        for d in 0..dim {
            let mut plus = Vec::with_capacity(set.len());
            let mut minus = Vec::with_capacity(set.len());
            for alpha in &set.alphas {
                let mut up = *alpha;
                up[d] += 1;
                plus.push(set.position(&up[..dim]).map_or(ABSENT, |i| i as u32));
                minus.push(if alpha[d] == 0 {
                    ABSENT
                } else {
                    let mut down = *alpha;
                    down[d] -= 1;
                    set.position(&down[..dim]).map_or(ABSENT, |i| i as u32)
                });
            }
            set.plus[d] = plus;
            set.minus[d] = minus;
        }
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn alpha(&self, index: usize) -> &[usize] {
        &self.alphas[index][..self.dim]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.alphas[index].iter().sum()
    }

    /// Number of leading entries with `|α| ≤ grade`.
    pub fn prefix_len(&self, grade: usize) -> usize {
        count(self.dim, grade.min(self.order))
    }

    /// Linear index of `alpha`, or `None` if it lies outside the set.
    pub fn position(&self, alpha: &[usize]) -> Option<usize> {
        if alpha.len() != self.dim {
            return None;
        }
        let grade: usize = alpha.iter().sum();
        if grade > self.order {
            return None;
        }
        Some(match self.dim {
            1 => grade,
            _ => grade * (grade + 1) / 2 + alpha[0],
        })
    }

    /// Index of `α + e_d`, absent past the top order.
    #[inline]
    pub fn raise(&self, index: usize, d: usize) -> Option<usize> {
        lookup(&self.plus[d], index)
    }

    /// Index of `α − e_d`, absent when `α_d = 0`.
    #[inline]
    pub fn lower(&self, index: usize, d: usize) -> Option<usize> {
        lookup(&self.minus[d], index)
    }

    /// Index of `e_d`.
    pub fn unit(&self, d: usize) -> usize {
        let mut a = [0; MAX_DIM];
        a[d] = 1;
        self.position(&a[..self.dim]).expect("order >= 1")
    }

    /// Index of `2 e_d`.
    pub fn double_unit(&self, d: usize) -> usize {
        let mut a = [0; MAX_DIM];
        a[d] = 2;
        self.position(&a[..self.dim]).expect("order >= 2")
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.alphas.iter().map(move |a| &a[..self.dim])
    }
}

#[inline]
fn lookup(table: &[u32], index: usize) -> Option<usize> {
    match table[index] {
        ABSENT => None,
        i => Some(i as usize),
    }
}

/// `binomial(order + dim, dim)`.
fn count(dim: usize, order: usize) -> usize {
    match dim {
        1 => order + 1,
        _ => (order + 1) * (order + 2) / 2,
    }
}
