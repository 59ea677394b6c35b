//! Autocorrelation statistics and the GLRT metric algebra.
//!
//! Symbols are indexed as in the signal model: the reference symbol `b_0` is
//! implicit, information symbols are `a_1..a_L`, and the autocorrelation
//! statistic `Z_{l,i}` is defined for `0 <= l < i <= L`.

use crate::error::{Error, Result};

/// Antipodal sign with the convention `sign(0) = +1`.
#[inline]
pub fn sign_of(x: f64) -> i8 {
    if x >= 0.0 {
        1
    } else {
        -1
    }
}

/// Strictly lower-triangular matrix of autocorrelation-receiver outputs
/// `Z_{l,i}` for one MSDD window of `L + 1` symbols, together with the noise
/// level `sigma_n2` used to scale log-likelihood ratios.
#[derive(Clone, Debug, PartialEq)]
pub struct AcrMatrix {
    block_size: usize,
    // Row i (1..=L) holds Z_{0,i} .. Z_{i-1,i}, rows stored consecutively.
    entries: Vec<f64>,
    sigma_n2: f64,
}

#[inline]
fn row_offset(i: usize) -> usize {
    i * (i - 1) / 2
}

impl AcrMatrix {
    /// Builds a matrix from entries stored row by row: `Z_{0,1}, Z_{0,2},
    /// Z_{1,2}, Z_{0,3}, ...`.
    pub fn new(block_size: usize, entries: Vec<f64>, sigma_n2: f64) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::InvalidInput(
                "block size L must be at least 1".into(),
            ));
        }
        let expected = block_size * (block_size + 1) / 2;
        if entries.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: entries.len(),
            });
        }
        if let Some(k) = entries.iter().position(|z| !z.is_finite()) {
            return Err(Error::InvalidInput(format!("entry {k} is not finite")));
        }
        if !(sigma_n2.is_finite() && sigma_n2 > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sigma_n2 must be finite and positive, got {sigma_n2}"
            )));
        }
        Ok(Self {
            block_size,
            entries,
            sigma_n2,
        })
    }

    /// Builds a matrix by evaluating `f(l, i)` for every `0 <= l < i <= L`.
    pub fn from_fn(
        block_size: usize,
        sigma_n2: f64,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(block_size * (block_size + 1) / 2);
        for i in 1..=block_size {
            for l in 0..i {
                entries.push(f(l, i));
            }
        }
        Self::new(block_size, entries, sigma_n2)
    }

    /// Block size `L` (number of information symbols).
    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn sigma_n2(&self) -> f64 {
        self.sigma_n2
    }

    /// `Z_{l,i}`. Panics unless `l < i <= L`.
    pub fn get(&self, l: usize, i: usize) -> f64 {
        assert!(
            l < i && i <= self.block_size,
            "Z_({l},{i}) outside 0 <= l < i <= {}",
            self.block_size
        );
        self.entries[row_offset(i) + l]
    }

    /// `[Z_{0,i}, .., Z_{i-1,i}]`.
    pub fn row(&self, i: usize) -> &[f64] {
        assert!(
            i >= 1 && i <= self.block_size,
            "row {i} outside 1..={}",
            self.block_size
        );
        let start = row_offset(i);
        &self.entries[start..start + i]
    }

    /// All entries, row by row.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `sum_{l<i} |Z_{l,i}|`, the common upper bound of the GLRT metric.
    pub fn sum_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.abs()).sum()
    }

    /// `min_{l<i} |Z_{l,i}|`.
    pub fn min_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// A full hypothesis `[a_1, .., a_L]` of antipodal information symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypothesis(Vec<i8>);

impl Hypothesis {
    pub fn new(symbols: Vec<i8>) -> Result<Self> {
        if let Some(k) = symbols.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput(format!(
                "symbol a_{} = {} is not antipodal",
                k + 1,
                symbols[k]
            )));
        }
        Ok(Self(symbols))
    }

    /// The all-`+1` hypothesis of length `len`.
    pub fn ones(len: usize) -> Self {
        Self(vec![1; len])
    }

    /// Hypothesis whose bit `k` of `index` set means `a_{k+1} = -1`.
    pub fn from_index(len: usize, index: u64) -> Self {
        Self(
            (0..len)
                .map(|k| if index >> k & 1 == 1 { -1 } else { 1 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `a_i` for `1 <= i <= L`.
    pub fn get(&self, i: usize) -> i8 {
        self.0[i - 1]
    }

    pub fn symbols(&self) -> &[i8] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<i8> {
        self.0
    }
}

/// `Gamma(a) = sum_i sum_{l<i} (prod_{k=l+1..i} a_k) Z_{l,i}`.
pub fn gamma_metric(z: &AcrMatrix, a: &Hypothesis) -> f64 {
    assert_eq!(a.len(), z.block_size(), "hypothesis length must equal L");
    let a = a.symbols();
    let mut gamma = 0.0;
    for i in 1..=z.block_size() {
        let row = z.row(i);
        let mut prod = 1.0;
        for l in (0..i).rev() {
            prod *= f64::from(a[l]);
            gamma += prod * row[l];
        }
    }
    gamma
}

/// `Lambda(a) = sum_i sum_{l<i} |Z_{l,i}| (1 - sign(Z_{l,i}) prod_{k=l+1..i} a_k)`,
/// the non-negative distance of `Gamma(a)` from its upper bound.
pub fn lambda_metric(z: &AcrMatrix, a: &Hypothesis) -> f64 {
    assert_eq!(a.len(), z.block_size(), "hypothesis length must equal L");
    (1..=z.block_size())
        .map(|i| branch_metric(z, a.symbols(), i))
        .sum()
}

/// Branch metric of depth `i` given the symbols `a_1..a_i` in `prefix[..i]`:
/// `delta_i = sum_{l<i} |Z_{l,i}| (1 - sign(Z_{l,i}) prod_{k=l+1..i} a_k)`.
pub fn branch_metric(z: &AcrMatrix, prefix: &[i8], i: usize) -> f64 {
    assert!(prefix.len() >= i, "prefix must hold a_1..a_{i}");
    row_metric(z.row(i), &prefix[..i])
}

/// Branch metric for one row, `prefix` holding exactly `a_1..a_i`.
#[inline]
pub(crate) fn row_metric(row: &[f64], prefix: &[i8]) -> f64 {
    debug_assert_eq!(row.len(), prefix.len());
    let mut delta = 0.0;
    let mut prod: i8 = 1;
    for l in (0..row.len()).rev() {
        prod *= prefix[l];
        if sign_of(row[l]) != prod {
            delta += 2.0 * row[l].abs();
        }
    }
    delta
}

/// Branch metrics of depth `i` for `a_i = +1` and `a_i = -1`, given
/// `a_1..a_{i-1}` in `parent` (`parent.len() == i - 1`).
#[inline]
pub(crate) fn row_metric_pair(row: &[f64], parent: &[i8]) -> (f64, f64) {
    debug_assert_eq!(row.len(), parent.len() + 1);
    let i = row.len();
    let (mut plus, mut minus) = (0.0, 0.0);
    // prod holds prod_{k=l+1..i-1} a_k, i.e. the product with a_i = +1.
    let mut prod: i8 = 1;
    for l in (0..i).rev() {
        if l + 1 < i {
            prod *= parent[l];
        }
        let weight = 2.0 * row[l].abs();
        if sign_of(row[l]) == prod {
            minus += weight;
        } else {
            plus += weight;
        }
    }
    (plus, minus)
}
