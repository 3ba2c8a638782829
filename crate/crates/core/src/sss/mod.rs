//! Block-chained sanitizable signatures.
//!
//! Each block `M[i]` is hashed together with the previous chain value,
//! `h_i = CH(h_{i-1} || M[i], r_i)`, under the sanitizer's chameleon key when
//! the block is admissible and under a second, trapdoor-free key otherwise.
//! The outer signature covers only `(h_L, adm)`, so a sanitizer who finds a
//! collision for an admissible block leaves it untouched.

mod outer;

use std::fmt;

use rand::{Rng, RngCore};

use crate::binmat::BitVec;
use crate::chameleon::{
    ch_collide, ch_gen, ch_hash, sample_randomizer, ChameleonPublic, ChameleonSecret,
    DigestOracle, Randomizer,
};
use crate::error::Error;
use crate::params::CodeParams;

pub use outer::{OuterSigner, SimulatedDilithium2};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemePublicKey {
    pub params: CodeParams,
    pub outer_pk: Vec<u8>,
    pub non: ChameleonPublic,
    pub san: ChameleonPublic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignerKey {
    pub params: CodeParams,
    pub outer_sk: Vec<u8>,
}

/// Trapdoor for the admissible-block chameleon instance only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SanitizerKey {
    pub secret: ChameleonSecret,
}

/// Trapdoor of the non-admissible instance. No operation takes it; it is
/// handed back from key generation only so it can be stored or destroyed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EscrowedSecret {
    pub secret: ChameleonSecret,
}

#[derive(Clone, Debug)]
pub struct KeyMaterial {
    pub public: SchemePublicKey,
    pub signer: SignerKey,
    pub sanitizer: SanitizerKey,
    pub escrow: EscrowedSecret,
}

/// A message of `L >= 1` blocks of exactly `k` bits each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMessage {
    blocks: Vec<BitVec>,
}

impl BlockMessage {
    pub fn new(k: usize, blocks: Vec<BitVec>) -> Result<Self, Error> {
        if blocks.is_empty() {
            return Err(Error::InvalidInput("message needs at least one block".into()));
        }
        if let Some(b) = blocks.iter().find(|b| b.len() != k) {
            return Err(Error::dims(k, b.len()));
        }
        Ok(BlockMessage { blocks })
    }

    pub fn random<R: Rng + ?Sized>(k: usize, len: usize, rng: &mut R) -> Self {
        BlockMessage::new(k, (0..len).map(|_| BitVec::random(k, rng)).collect())
            .expect("at least one block")
    }

    pub fn blocks(&self) -> &[BitVec] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_bits(&self) -> usize {
        self.blocks[0].len()
    }

    /// Replaces block `i`, keeping the block length.
    pub fn with_block(&self, i: usize, block: BitVec) -> Result<Self, Error> {
        let mut blocks = self.blocks.clone();
        if block.len() != self.block_bits() {
            return Err(Error::dims(self.block_bits(), block.len()));
        }
        *blocks.get_mut(i).ok_or_else(|| Error::InvalidInput(format!("no block {i}")))? = block;
        Ok(BlockMessage { blocks })
    }
}

/// Admissibility mask: `true` marks a block the sanitizer may rewrite.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdmMask(pub Vec<bool>);

impl AdmMask {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_admissible(&self, i: usize) -> bool {
        self.0[i]
    }

    /// LSB-first packing into `ceil(L / 8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        BitVec::from_bits(&self.0).to_bytes()
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self, Error> {
        let v = BitVec::from_bytes(bytes, len)?;
        Ok(AdmMask((0..len).map(|i| v.get(i)).collect()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SanitizableSignature {
    pub h_l: BitVec,
    pub outer_sig: Vec<u8>,
    pub randomizers: Vec<Randomizer>,
    pub adm: AdmMask,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// Lengths of message, mask, randomizers or digest disagree.
    Malformed,
    WeightCheck,
    ChainMismatch,
    OuterSig,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RejectReason::Malformed => "Malformed",
            RejectReason::WeightCheck => "WeightCheck",
            RejectReason::ChainMismatch => "ChainMismatch",
            RejectReason::OuterSig => "OuterSig",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(self) -> bool {
        self == Verdict::Accept
    }

    pub fn reason(self) -> Option<RejectReason> {
        match self {
            Verdict::Accept => None,
            Verdict::Reject(r) => Some(r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SanitizeError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("block {block}: syndrome outside the decoding radius")]
    NotDecodable { block: usize },
    #[error("block {block}: decoded randomizer has weight {found}, expected {expected}")]
    WeightMismatch { block: usize, expected: usize, found: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

pub fn keygen<R: RngCore + ?Sized>(
    params: CodeParams,
    outer: &dyn OuterSigner,
    rng: &mut R,
) -> Result<KeyMaterial, Error> {
    let (non, non_sk) = ch_gen(params, rng)?;
    let (san, san_sk) = ch_gen(params, rng)?;
    let (outer_pk, outer_sk) = outer.keygen(&mut DynRng(rng));
    Ok(KeyMaterial {
        public: SchemePublicKey { params, outer_pk, non, san },
        signer: SignerKey { params, outer_sk },
        sanitizer: SanitizerKey { secret: san_sk },
        escrow: EscrowedSecret { secret: non_sk },
    })
}

struct DynRng<'a, R: RngCore + ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for DynRng<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// `h_L || adm || L` with `L` as a 4-byte little-endian integer.
pub fn outer_payload(h_l: &BitVec, adm: &AdmMask) -> Vec<u8> {
    let mut out = h_l.to_bytes();
    out.extend(adm.to_bytes());
    out.extend((adm.len() as u32).to_le_bytes());
    out
}

fn chain_input(prev: &BitVec, block: &BitVec) -> BitVec {
    prev.concat(block)
}

fn instance(pk: &SchemePublicKey, admissible: bool) -> &ChameleonPublic {
    if admissible {
        &pk.san
    } else {
        &pk.non
    }
}

/// Returns `h_0, ..., h_L` (so `L + 1` values, `h_0 = 0`).
pub fn chain_digest(
    pk: &SchemePublicKey,
    oracle: &dyn DigestOracle,
    msg: &BlockMessage,
    adm: &AdmMask,
    randomizers: &[Randomizer],
) -> Result<Vec<BitVec>, Error> {
    let params = &pk.params;
    if adm.len() != msg.len() {
        return Err(Error::dims(msg.len(), adm.len()));
    }
    if randomizers.len() != msg.len() {
        return Err(Error::dims(msg.len(), randomizers.len()));
    }
    if msg.block_bits() != params.k {
        return Err(Error::dims(params.k, msg.block_bits()));
    }
    let mut chain = Vec::with_capacity(msg.len() + 1);
    chain.push(BitVec::zeros(params.redundancy()));
    for (i, (block, r)) in msg.blocks().iter().zip(randomizers).enumerate() {
        let x = chain_input(&chain[i], block);
        let h = ch_hash(instance(pk, adm.is_admissible(i)), oracle, &x, r)?;
        chain.push(h);
    }
    Ok(chain)
}

pub fn sign<R: Rng + ?Sized>(
    signer: &SignerKey,
    pk: &SchemePublicKey,
    outer: &dyn OuterSigner,
    oracle: &dyn DigestOracle,
    msg: &BlockMessage,
    adm: &AdmMask,
    rng: &mut R,
) -> Result<SanitizableSignature, Error> {
    if adm.len() != msg.len() {
        return Err(Error::dims(msg.len(), adm.len()));
    }
    let randomizers: Vec<Randomizer> =
        (0..msg.len()).map(|_| sample_randomizer(&pk.params, rng)).collect();
    let chain = chain_digest(pk, oracle, msg, adm, &randomizers)?;
    let h_l = chain.last().cloned().expect("chain is nonempty");
    let outer_sig = outer.sign(&signer.outer_sk, &outer_payload(&h_l, adm))?;
    Ok(SanitizableSignature { h_l, outer_sig, randomizers, adm: adm.clone() })
}

pub fn verify(
    pk: &SchemePublicKey,
    outer: &dyn OuterSigner,
    oracle: &dyn DigestOracle,
    msg: &BlockMessage,
    sig: &SanitizableSignature,
) -> Verdict {
    let params = &pk.params;
    let l = msg.len();
    if sig.adm.len() != l
        || sig.randomizers.len() != l
        || sig.h_l.len() != params.redundancy()
        || msg.block_bits() != params.k
        || sig.randomizers.iter().any(|r| r.0.len() != params.n)
    {
        return Verdict::Reject(RejectReason::Malformed);
    }
    if sig.randomizers.iter().any(|r| r.weight() != params.t) {
        return Verdict::Reject(RejectReason::WeightCheck);
    }
    let chain = match chain_digest(pk, oracle, msg, &sig.adm, &sig.randomizers) {
        Ok(c) => c,
        Err(_) => return Verdict::Reject(RejectReason::Malformed),
    };
    if chain[l] != sig.h_l {
        return Verdict::Reject(RejectReason::ChainMismatch);
    }
    if !outer.verify(&pk.outer_pk, &outer_payload(&chain[l], &sig.adm), &sig.outer_sig) {
        return Verdict::Reject(RejectReason::OuterSig);
    }
    Verdict::Accept
}

/// Rewrites admissible blocks of `msg` into `msg_new` by finding chameleon
/// collisions, leaving `h_L` and the outer signature untouched.
#[allow(clippy::too_many_arguments)]
pub fn sanitize(
    key: &SanitizerKey,
    pk: &SchemePublicKey,
    outer: &dyn OuterSigner,
    oracle: &dyn DigestOracle,
    msg: &BlockMessage,
    sig: &SanitizableSignature,
    msg_new: &BlockMessage,
) -> Result<SanitizableSignature, SanitizeError> {
    if let Verdict::Reject(reason) = verify(pk, outer, oracle, msg, sig) {
        return Err(SanitizeError::InvalidInput(format!("signature does not verify ({reason})")));
    }
    if msg_new.len() != msg.len() || msg_new.block_bits() != msg.block_bits() {
        return Err(SanitizeError::InvalidInput("new message has a different shape".into()));
    }
    let changed: Vec<usize> =
        (0..msg.len()).filter(|&i| msg.blocks()[i] != msg_new.blocks()[i]).collect();
    if let Some(&i) = changed.iter().find(|&&i| !sig.adm.is_admissible(i)) {
        return Err(SanitizeError::InvalidInput(format!("block {i} is not admissible")));
    }
    let chain = chain_digest(pk, oracle, msg, &sig.adm, &sig.randomizers)
        .map_err(|e| SanitizeError::Internal(e.to_string()))?;

    let mut randomizers = sig.randomizers.clone();
    for &i in &changed {
        let old = chain_input(&chain[i], &msg.blocks()[i]);
        let new = chain_input(&chain[i], &msg_new.blocks()[i]);
        randomizers[i] = ch_collide(&key.secret, &pk.san, oracle, &old, &randomizers[i], &new)
            .map_err(|e| match e {
                Error::NotDecodable => SanitizeError::NotDecodable { block: i },
                Error::WeightMismatch { expected, found } => {
                    SanitizeError::WeightMismatch { block: i, expected, found }
                }
                other => SanitizeError::Internal(format!("block {i}: {other}")),
            })?;
    }

    let recomputed = chain_digest(pk, oracle, msg_new, &sig.adm, &randomizers)
        .map_err(|e| SanitizeError::Internal(e.to_string()))?;
    if recomputed != chain {
        return Err(SanitizeError::Internal("collision did not preserve the hash chain".into()));
    }
    Ok(SanitizableSignature {
        h_l: sig.h_l.clone(),
        outer_sig: sig.outer_sig.clone(),
        randomizers,
        adm: sig.adm.clone(),
    })
}
