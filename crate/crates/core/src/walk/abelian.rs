//! Length tracking in rank 2 through the abelianization.
//!
//! A primitive class of `F_2` has a cyclically reduced representative in which
//! each generator occurs with a single sign, so its cyclic length is
//! `|p| + |q|` for its image `(p, q)` in `Z²`. Automorphisms keep primitive
//! classes primitive, so tracking the integer vector suffices.

use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};
use crate::freegroup::{Automorphism, CyclicWord, Elementary, Rank};

/// Integer matrix of the induced map on `Z²`; column `i` is the image of `a_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Matrix2([[i64; 2]; 2]);

impl Matrix2 {
    pub fn identity() -> Self {
        Matrix2([[1, 0], [0, 1]])
    }

    pub fn of(phi: &Automorphism) -> Result<Self> {
        if phi.rank().get() != 2 {
            return Err(Error::invalid("abelian backend needs rank 2"));
        }
        let mut m = [[0i64; 2]; 2];
        for (col, image) in phi.images().iter().enumerate() {
            for l in image.letters() {
                m[l.index()][col] += if l.is_inverse() { -1 } else { 1 };
            }
        }
        Ok(Matrix2(m))
    }

    /// `self · other`.
    pub fn mul(&self, other: &Matrix2) -> Matrix2 {
        let (a, b) = (self.0, other.0);
        let mut m = [[0i64; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Matrix2(m)
    }

    pub fn apply(&self, v: &mut [BigInt; 2]) {
        let m = self.0;
        let x = &v[0] * m[0][0] + &v[1] * m[0][1];
        let y = &v[0] * m[1][0] + &v[1] * m[1][1];
        *v = [x, y];
    }
}

/// Running product of the increments' matrices, with unbounded entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigMatrix2([[BigInt; 2]; 2]);

impl BigMatrix2 {
    pub fn identity() -> Self {
        BigMatrix2([
            [BigInt::from(1), BigInt::from(0)],
            [BigInt::from(0), BigInt::from(1)],
        ])
    }

    /// `self ← m · self`.
    pub fn left_mul(&mut self, m: &Matrix2) {
        let a = m.0;
        let b = &self.0;
        let cell = |i: usize, j: usize| &b[0][j] * a[i][0] + &b[1][j] * a[i][1];
        self.0 = [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]];
    }

    pub fn apply(&self, v: &[BigInt; 2]) -> [BigInt; 2] {
        let m = &self.0;
        [
            &m[0][0] * &v[0] + &m[0][1] * &v[1],
            &m[1][0] * &v[0] + &m[1][1] * &v[1],
        ]
    }
}

pub fn abelianize(g: &CyclicWord) -> [BigInt; 2] {
    let mut v = [BigInt::from(0), BigInt::from(0)];
    for l in g.letters() {
        v[l.index()] += if l.is_inverse() { -1 } else { 1 };
    }
    v
}

/// `|p| + |q|`.
pub fn length_of(v: &[BigInt; 2]) -> BigUint {
    v[0].magnitude() + v[1].magnitude()
}

/// Whether `g` is primitive in `F_2`: descend by Nielsen moves until the
/// length stops dropping; a primitive class reaches length 1.
pub fn is_primitive_rank2(g: &CyclicWord) -> bool {
    let rank = Rank::new(2).expect("valid rank");
    let moves: Vec<Automorphism> = Elementary::all(rank)
        .into_iter()
        .map(|e| Automorphism::elementary(rank, e).expect("rank 2 generator"))
        .collect();
    let mut current = g.clone();
    loop {
        let len = current.letters().len();
        if len <= 1 {
            return len == 1;
        }
        let shorter = moves
            .iter()
            .map(|m| m.apply_cyclic(&current).expect("rank 2 class"))
            .find(|c| c.letters().len() < len);
        match shorter {
            Some(c) => current = c,
            None => return false,
        }
    }
}

pub fn check_supported(rank: Rank, tracked: &[CyclicWord]) -> Result<()> {
    if rank.get() != 2 {
        return Err(Error::invalid(format!("abelian backend needs rank 2, got {rank}")));
    }
    if let Some(g) = tracked.iter().find(|g| !is_primitive_rank2(g)) {
        return Err(Error::invalid(format!(
            "abelian backend tracks primitive classes only; '{g}' is not primitive"
        )));
    }
    Ok(())
}
