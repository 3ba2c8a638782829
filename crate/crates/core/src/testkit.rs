//! Constructive instances for exercising the collision path.
//!
//! Under a genuine random oracle, a trapdoor collision for an arbitrary new
//! message exists only when the target syndrome happens to be decodable,
//! which is vanishingly rare beyond tiny parameters. With
//! [`IdentityOracle`](crate::chameleon::IdentityOracle) the hash is linear and
//! decodable targets can be built on purpose. None of this is for production.

use rand::Rng;

use crate::binmat::BitVec;
use crate::error::Error;
use crate::goppa::random_fixed_weight;
use crate::sss::{chain_digest, BlockMessage, SanitizableSignature, SchemePublicKey};
use crate::chameleon::IdentityOracle;

/// `x xor r xor r_new`: with an identity digest, `(x', r_new)` collides with
/// `(x, r)` and no trapdoor is involved.
pub fn linear_collision(x: &BitVec, r: &BitVec, r_new: &BitVec) -> BitVec {
    x.xor(r).xor(r_new)
}

/// Builds a new message, differing from `msg` only in block `block`, whose
/// identity-oracle collision target is a weight-`t` vector agreeing with the
/// current randomizer on the chain-prefix positions.
pub fn identity_rewrite<R: Rng + ?Sized>(
    pk: &SchemePublicKey,
    msg: &BlockMessage,
    sig: &SanitizableSignature,
    block: usize,
    rng: &mut R,
) -> Result<BlockMessage, Error> {
    let params = &pk.params;
    let prefix = params.redundancy();
    // only used to validate shapes
    chain_digest(pk, &IdentityOracle, msg, &sig.adm, &sig.randomizers)?;
    let r = &sig.randomizers.get(block).ok_or_else(|| Error::InvalidInput(format!("no block {block}")))?.0;
    let suffix_weight = r.slice(prefix, params.k).weight();
    if suffix_weight == 0 {
        return Err(Error::InvalidInput("randomizer has no bits in the message part".into()));
    }
    for _ in 0..64 {
        let suffix = random_fixed_weight(params.k, suffix_weight, rng);
        let f = r.slice(0, prefix).concat(&suffix);
        let delta = r.xor(&f).slice(prefix, params.k);
        if delta.is_zero() {
            continue;
        }
        let new_block = msg.blocks()[block].xor(&delta);
        return msg.with_block(block, new_block);
    }
    Err(Error::InvalidInput("could not find a distinct rewrite".into()))
}
