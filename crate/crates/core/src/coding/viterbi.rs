use super::ConvCode;
use crate::error::{Error, Result};

/// Viterbi decoder output.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub info: Vec<u8>,
    /// Correlation metric `sum llr (1 - 2c)` of the decoded path.
    pub path_metric: f64,
    /// Set when an add-compare-select tie was resolved on the decoded path.
    pub ambiguous: bool,
}

impl ConvCode {
    /// Soft-input Viterbi decoding of a zero-terminated codeword.
    ///
    /// `llrs` holds `2 (K + nu)` code-bit LLRs (`log P(c=0)/P(c=1)`); the
    /// decoder returns the path maximising `sum llr (1 - 2c)`. Hard-input
    /// decoding is obtained by passing `+-1`.
    pub fn viterbi_decode(&self, llrs: &[f64]) -> Result<Decoded> {
        let nu = self.nu() as usize;
        if !llrs.len().is_multiple_of(2) || llrs.len() < 2 * nu {
            return Err(Error::InvalidInput(format!(
                "{} LLRs cannot hold a terminated rate-1/2 codeword with nu = {nu}",
                llrs.len()
            )));
        }
        if let Some(k) = llrs.iter().position(|l| !l.is_finite()) {
            return Err(Error::NonFiniteLlr(k));
        }
        let steps = llrs.len() / 2;
        let states = self.num_states();
        let mask = (states - 1) as u32;

        // Signed code-bit weights (+1 for c = 0) for every register value.
        let signs: Vec<[f64; 2]> = (0..2 * states as u32)
            .map(|reg| self.outputs(reg).map(|c| 1.0 - 2.0 * f64::from(c)))
            .collect();

        let mut metric = vec![f64::NEG_INFINITY; states];
        metric[0] = 0.0;
        let mut next = vec![0.0; states];
        // Per step and state: chosen predecessor bit and tie flag.
        let mut choice = vec![0u8; steps * states];
        let mut tie = vec![false; steps * states];

        for t in 0..steps {
            let (l0, l1) = (llrs[2 * t], llrs[2 * t + 1]);
            let row = t * states;
            for s in 0..states as u32 {
                let reg0 = s << 1;
                let reg1 = reg0 | 1;
                let m0 = metric[(reg0 & mask) as usize]
                    + l0 * signs[reg0 as usize][0]
                    + l1 * signs[reg0 as usize][1];
                let m1 = metric[(reg1 & mask) as usize]
                    + l0 * signs[reg1 as usize][0]
                    + l1 * signs[reg1 as usize][1];
                let idx = row + s as usize;
                if m1 > m0 {
                    next[s as usize] = m1;
                    choice[idx] = 1;
                } else {
                    next[s as usize] = m0;
                    tie[idx] = m1 == m0 && m0.is_finite();
                }
            }
            std::mem::swap(&mut metric, &mut next);
        }

        let mut info = vec![0u8; steps];
        let mut state = 0u32;
        let mut ambiguous = false;
        for t in (0..steps).rev() {
            let idx = t * states + state as usize;
            ambiguous |= tie[idx];
            let reg = state << 1 | u32::from(choice[idx]);
            info[t] = (reg >> nu) as u8;
            state = reg & mask;
        }
        info.truncate(steps - nu);
        Ok(Decoded {
            info,
            path_metric: metric[0],
            ambiguous,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn to_llr(code: &[u8], amp: f64) -> Vec<f64> {
        code.iter()
            .map(|&c| amp * (1.0 - 2.0 * f64::from(c)))
            .collect()
    }

    #[test]
    fn noiseless_round_trip_all_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for nu in 2..=7 {
            let code = ConvCode::max_free_distance(nu).unwrap();
            for _ in 0..20 {
                let info: Vec<u8> = (0..200).map(|_| rng.random_range(0..2)).collect();
                let cw = code.encode(&info);
                let dec = code.viterbi_decode(&to_llr(&cw, 50.0)).unwrap();
                assert_eq!(dec.info, info);
                assert!(!dec.ambiguous);
                assert_eq!(code.encode(&dec.info), cw);
            }
        }
    }

    #[test]
    fn corrects_single_strong_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let code = ConvCode::max_free_distance(6).unwrap();
        let info: Vec<u8> = (0..100).map(|_| rng.random_range(0..2)).collect();
        let cw = code.encode(&info);
        for pos in [0, 37, 101, cw.len() - 1] {
            let mut llr = to_llr(&cw, 10.0);
            llr[pos] = -llr[pos];
            assert_eq!(code.viterbi_decode(&llr).unwrap().info, info);
        }
    }

    #[test]
    fn zero_llrs_are_ambiguous() {
        let code = ConvCode::max_free_distance(3).unwrap();
        let dec = code.viterbi_decode(&vec![0.0; code.coded_len(20)]).unwrap();
        assert_eq!(dec.info.len(), 20);
        assert!(dec.ambiguous);
    }

    #[test]
    fn rejects_bad_input() {
        let code = ConvCode::max_free_distance(3).unwrap();
        assert!(code.viterbi_decode(&[0.0; 5]).is_err());
        let mut llr = vec![1.0; code.coded_len(4)];
        llr[2] = f64::NAN;
        assert!(matches!(
            code.viterbi_decode(&llr),
            Err(Error::NonFiniteLlr(2))
        ));
    }
}
