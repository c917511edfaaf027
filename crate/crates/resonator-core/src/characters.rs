//! Dirichlet characters mod an odd prime q.
//!
//! The group is cyclic of order m = q - 1: with g the smallest primitive
//! root and ind the discrete log base g, the characters are
//! chi_j(n) = e(j ind(n) / m) for j in [0, m-1], chi_j(n) = 0 when q | n,
//! and j = 0 is the principal character. Evaluating *all* characters against
//! a fixed coefficient vector is a length-m DFT after reordering by ind,
//! which is what [`CharacterGroup::transform_all`] does.

use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::arith::DiscreteLogTable;
use crate::error::{CoreError, Result};
use crate::{parallel, C64};

/// Index of a character in the cyclic group; `CharIndex(0)` is principal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharIndex(pub usize);

impl CharIndex {
    pub fn is_principal(self) -> bool {
        self.0 == 0
    }
}

pub struct CharacterGroup {
    table: DiscreteLogTable,
    /// roots[k] = e(k/m), computed from the angle 2 pi k / m.
    roots: Vec<C64>,
    fft: Arc<dyn Fft<f64>>,
}

impl CharacterGroup {
    /// Build the full character group mod the odd prime q (q = 3 is the
    /// smallest accepted modulus; q = 2 has only the trivial character and
    /// is rejected).
    pub fn new(q: u64) -> Result<Self> {
        let table = DiscreteLogTable::new(q)?;
        let m = table.m();
        let step = std::f64::consts::TAU / m as f64;
        let roots: Vec<C64> = (0..m)
            .map(|k| {
                let (s, c) = (step * k as f64).sin_cos();
                C64::new(c, s)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_inverse(m);
        Ok(CharacterGroup { table, roots, fft })
    }

    pub fn q(&self) -> u64 {
        self.table.q()
    }

    /// Group order m = q - 1 = number of characters.
    pub fn m(&self) -> usize {
        self.table.m()
    }

    pub fn generator(&self) -> u64 {
        self.table.g()
    }

    pub fn table(&self) -> &DiscreteLogTable {
        &self.table
    }

    /// e(k/m) for k in [0, m-1].
    pub fn roots(&self) -> &[C64] {
        &self.roots
    }

    /// Index of the conjugate character: chi_{m-j} = conj(chi_j).
    pub fn conjugate(&self, j: CharIndex) -> CharIndex {
        let m = self.m();
        CharIndex((m - j.0 % m) % m)
    }

    /// chi_j(n); zero when q | n. j is reduced mod m.
    pub fn char_value(&self, j: CharIndex, n: u64) -> C64 {
        match self.table.ind(n) {
            None => C64::new(0.0, 0.0),
            Some(k) => {
                let m = self.m();
                self.roots[(j.0 % m) * k as usize % m]
            }
        }
    }

    /// (1/phi(q)) * sum over all characters of conj(chi(a)) chi(n), by
    /// direct summation over the group. Detects n = a mod q on coprime
    /// residues: the sum is 1 when n = a mod q, 0 otherwise.
    pub fn orthogonality_sum(&self, a: u64, n: u64) -> Result<C64> {
        if a % self.q() == 0 {
            return Err(CoreError::invalid(format!(
                "orthogonality_sum needs gcd(a, q) = 1; a = {a}, q = {}",
                self.q()
            )));
        }
        let ia = self.table.ind(a).expect("a is coprime to q") as usize;
        let Some(in_) = self.table.ind(n) else {
            return Ok(C64::new(0.0, 0.0));
        };
        let in_ = in_ as usize;
        let m = self.m();
        let mut sum = C64::new(0.0, 0.0);
        for j in 0..m {
            sum += self.roots[j * ia % m].conj() * self.roots[j * in_ % m];
        }
        Ok(sum / m as f64)
    }

    /// Evaluate sum over a in [1, q-1] of f[a-1] * chi_j(a) for every j at
    /// once. `f` must have exactly m = q - 1 entries. This is the fast path
    /// (reorder by the discrete log, then one length-m DFT);
    /// [`Self::transform_all_naive`] is the O(m^2) reference it is checked
    /// against.
    pub fn transform_all(&self, f: &[C64]) -> Result<Vec<C64>> {
        let m = self.m();
        if f.len() != m {
            return Err(CoreError::invalid(format!(
                "transform_all wants q - 1 = {m} coefficients, got {}",
                f.len()
            )));
        }
        // buf[k] = f at a = g^k; then out[j] = sum_k buf[k] e(jk/m) is an
        // unnormalized inverse DFT.
        let mut buf: Vec<C64> = (0..m)
            .map(|k| f[self.table.pow_g(k) as usize - 1])
            .collect();
        self.fft.process(&mut buf);
        Ok(buf)
    }

    /// O(m^2) direct evaluation of the same sums, kept as an independent
    /// check on the DFT route.
    pub fn transform_all_naive(&self, f: &[C64]) -> Result<Vec<C64>> {
        let m = self.m();
        if f.len() != m {
            return Err(CoreError::invalid(format!(
                "transform_all_naive wants q - 1 = {m} coefficients, got {}",
                f.len()
            )));
        }
        Ok(parallel::map_indexed(m, |j| {
            let mut sum = C64::new(0.0, 0.0);
            for a in 1..=m {
                let k = self.table.ind_residue(a) as usize;
                sum += f[a - 1] * self.roots[j * k % m];
            }
            sum
        }))
    }
}
