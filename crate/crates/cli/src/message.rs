//! Byte files <-> k-bit blocks with 10* padding.

use mcss::binmat::BitVec;
use mcss::sss::BlockMessage;

/// Appends a single 1 bit then zeros up to a multiple of `k`; an input whose
/// bit length is already a multiple of `k` gains a whole extra block.
pub fn to_blocks(bytes: &[u8], k: usize) -> BlockMessage {
    let bits = bytes.len() * 8;
    let blocks = (bits + 1).div_ceil(k);
    let mut padded = BitVec::from_bytes(bytes, bits).expect("whole bytes");
    padded = padded.concat(&BitVec::unit(blocks * k - bits, 0));
    let split = (0..blocks).map(|i| padded.slice(i * k, k)).collect();
    BlockMessage::new(k, split).expect("blocks have k bits")
}
