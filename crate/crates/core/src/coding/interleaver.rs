use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Bit interleaver `y[k] = x[perm[k]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interleaver {
    perm: Vec<usize>,
}

impl Interleaver {
    pub fn identity(size: usize) -> Self {
        Self {
            perm: (0..size).collect(),
        }
    }

    /// Uniformly random permutation drawn from a seeded shuffle.
    pub fn random(size: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..size).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self { perm }
    }

    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
        }
        Ok(Self { perm })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave<T: Copy>(&self, input: &[T]) -> Result<Vec<T>> {
        self.check(input.len())?;
        Ok(self.perm.iter().map(|&p| input[p]).collect())
    }

    pub fn deinterleave<T: Copy + Default>(&self, input: &[T]) -> Result<Vec<T>> {
        self.check(input.len())?;
        let mut out = vec![T::default(); input.len()];
        for (&p, &x) in self.perm.iter().zip(input) {
            out[p] = x;
        }
        Ok(out)
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.perm.len() {
            return Err(Error::LengthMismatch {
                expected: self.perm.len(),
                actual: len,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_noop() {
        let x: Vec<u32> = (0..17).collect();
        assert_eq!(Interleaver::identity(17).interleave(&x).unwrap(), x);
    }

    #[test]
    fn seeded_and_invertible() {
        let a = Interleaver::random(1000, 7);
        assert_eq!(a, Interleaver::random(1000, 7));
        assert_ne!(a, Interleaver::random(1000, 8));
        assert!(Interleaver::from_permutation(a.permutation().to_vec()).is_ok());
        let x: Vec<f64> = (0..1000).map(|k| (k as f64).sin()).collect();
        let y = a.interleave(&x).unwrap();
        assert_ne!(x, y);
        assert_eq!(a.deinterleave(&y).unwrap(), x);
    }

    #[test]
    fn length_mismatch() {
        let a = Interleaver::random(10, 1);
        assert!(matches!(
            a.interleave(&[0u8; 9]),
            Err(Error::LengthMismatch {
                expected: 10,
                actual: 9
            })
        ));
        assert!(Interleaver::from_permutation(vec![0, 0]).is_err());
    }
}
