//! Bit-interleaved coded modulation outer chain: rate-1/2 convolutional
//! code, bit interleaver, differential mapping and soft-input Viterbi
//! decoding.

mod conv;
mod differential;
mod interleaver;
mod viterbi;

pub use conv::ConvCode;
pub use differential::{
    bit_to_symbol, differential_decode, map_differential, segment_blocks, symbol_to_bit, Block,
};
pub use interleaver::Interleaver;
pub use viterbi::Decoded;
