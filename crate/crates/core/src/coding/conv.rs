use crate::error::{Error, Result};

/// Rate-1/2 feedforward convolutional code with `2^nu` states.
///
/// Generators are given in the usual octal notation; their most significant
/// tap multiplies the current input bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvCode {
    nu: u32,
    generators: [u32; 2],
}

/// Maximum-free-distance rate-1/2 codes, nu = 2..=7.
const CATALOG: [(u32, [u32; 2]); 6] = [
    (2, [0o7, 0o5]),
    (3, [0o17, 0o15]),
    (4, [0o35, 0o23]),
    (5, [0o75, 0o53]),
    (6, [0o171, 0o133]),
    (7, [0o371, 0o247]),
];

impl ConvCode {
    pub fn new(nu: u32, generators: [u32; 2]) -> Result<Self> {
        if !(1..=16).contains(&nu) {
            return Err(Error::InvalidInput(format!(
                "memory nu = {nu} out of range"
            )));
        }
        for g in generators {
            if g >> nu != 1 {
                return Err(Error::InvalidInput(format!(
                    "generator {g:o} does not have degree {nu}"
                )));
            }
        }
        Ok(Self { nu, generators })
    }

    /// The maximum-free-distance code with `2^nu` states from the catalog.
    pub fn max_free_distance(nu: u32) -> Result<Self> {
        CATALOG
            .iter()
            .find(|(n, _)| *n == nu)
            .map(|&(nu, generators)| Self { nu, generators })
            .ok_or_else(|| Error::InvalidInput(format!("no catalog code for nu = {nu} (2..=7)")))
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn generators(&self) -> [u32; 2] {
        self.generators
    }

    pub fn num_states(&self) -> usize {
        1 << self.nu
    }

    /// Coded length for `info_len` information bits including the tail.
    pub fn coded_len(&self, info_len: usize) -> usize {
        2 * (info_len + self.nu as usize)
    }

    /// The two output bits for shift-register contents `reg` (current input
    /// in bit `nu`).
    #[inline]
    pub(crate) fn outputs(&self, reg: u32) -> [u8; 2] {
        [
            ((self.generators[0] & reg).count_ones() & 1) as u8,
            ((self.generators[1] & reg).count_ones() & 1) as u8,
        ]
    }

    /// Encodes `info` starting from the zero state and appends `nu` zero
    /// tail bits, returning `2 (len + nu)` code bits.
    pub fn encode(&self, info: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.coded_len(info.len()));
        let mut state = 0u32;
        for &bit in info
            .iter()
            .chain(std::iter::repeat_n(&0u8, self.nu as usize))
        {
            let reg = u32::from(bit & 1) << self.nu | state;
            out.extend_from_slice(&self.outputs(reg));
            state = reg >> 1;
        }
        out
    }
}
