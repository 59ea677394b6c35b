use crate::metric::{sign_of, AcrMatrix, Hypothesis};

/// Symbol-by-symbol differential detection: `a_i = sign(Z_{i-1,i})`.
pub fn dd_hard(z: &AcrMatrix) -> Hypothesis {
    let symbols = (1..=z.block_size())
        .map(|i| sign_of(z.get(i - 1, i)))
        .collect();
    Hypothesis::new(symbols).expect("signs are antipodal")
}

/// Soft-output differential detection: `LLR_i = Z_{i-1,i} / sigma_n^2`.
pub fn dd_soft(z: &AcrMatrix) -> Vec<f64> {
    (1..=z.block_size())
        .map(|i| z.get(i - 1, i) / z.sigma_n2())
        .collect()
}
