/// Code bit `0 -> +1`, `1 -> -1`.
#[inline]
pub fn bit_to_symbol(bit: u8) -> i8 {
    1 - 2 * (bit & 1) as i8
}

#[inline]
pub fn symbol_to_bit(symbol: i8) -> u8 {
    u8::from(symbol < 0)
}

/// Differential encoding `b_i = b_{i-1} a_i` with reference `b_0 = +1`;
/// returns `len + 1` channel symbols.
pub fn map_differential(a: &[i8]) -> Vec<i8> {
    let mut b = Vec::with_capacity(a.len() + 1);
    let mut prev = 1i8;
    b.push(prev);
    for &ai in a {
        prev *= ai;
        b.push(prev);
    }
    b
}

/// Inverse of [`map_differential`]: `a_i = b_{i-1} b_i`.
pub fn differential_decode(b: &[i8]) -> Vec<i8> {
    b.windows(2).map(|w| w[0] * w[1]).collect()
}

/// One MSDD window: information symbols `a_{start+1} .. a_{start+len}`,
/// observed over channel slots `start ..= start + len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub len: usize,
}

/// Splits `num_symbols` information symbols into consecutive blocks of
/// `block_size`; adjacent blocks share their boundary reference slot. The
/// last block is shorter when `block_size` does not divide `num_symbols`.
pub fn segment_blocks(num_symbols: usize, block_size: usize) -> Vec<Block> {
    assert!(block_size > 0);
    (0..num_symbols)
        .step_by(block_size)
        .map(|start| Block {
            start,
            len: block_size.min(num_symbols - start),
        })
        .collect()
}
