//! McEliece chameleon hash `CH(m, r) = (G(m) xor r) * Hpub^T` with
//! `Hpub = S' * Hsec * P`, and trapdoor collision finding through Patterson
//! decoding.

use std::cell::RefCell;

use rand::Rng;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::binmat::{
    apply_inverse_permutation, apply_permutation, mat_invert, mat_mul, random_invertible,
    random_permutation, vec_mat_transpose_mul, BitMatrix, BitVec, Permutation,
};
use crate::error::Error;
use crate::goppa::{random_fixed_weight, GoppaCode};
use crate::params::CodeParams;

/// Domain-separation tag for the message digest `G`.
pub const TAG_G: u8 = 0x01;

/// A deterministic function from `(tag, bytes)` to a bit vector of the
/// requested length, standing in for a random oracle.
pub trait DigestOracle {
    fn digest(&self, tag: u8, input: &[u8], out_bits: usize) -> BitVec;
}

/// SHAKE-256 over `tag || params_id || input`, squeezed to `out_bits`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sha3Oracle {
    params_id: u8,
}

impl Sha3Oracle {
    pub fn new(params: &CodeParams) -> Self {
        Sha3Oracle { params_id: params.id }
    }
}

impl DigestOracle for Sha3Oracle {
    fn digest(&self, tag: u8, input: &[u8], out_bits: usize) -> BitVec {
        let mut xof = Shake256::default();
        xof.update(&[tag, self.params_id]);
        xof.update(input);
        let mut out = vec![0u8; out_bits.div_ceil(8)];
        xof.finalize_xof().read(&mut out);
        if out_bits % 8 != 0 {
            if let Some(last) = out.last_mut() {
                *last &= (1u8 << (out_bits % 8)) - 1;
            }
        }
        BitVec::from_bytes(&out, out_bits).expect("padding bits cleared")
    }
}

/// Returns the input bits unchanged, truncated or zero-extended.
///
/// Test use only: it makes the hash linear, which is exactly what the random
/// oracle exists to prevent, but it lets decodable collision instances be
/// built at any parameter size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IdentityOracle;

impl DigestOracle for IdentityOracle {
    fn digest(&self, _tag: u8, input: &[u8], out_bits: usize) -> BitVec {
        let mut bytes = input.to_vec();
        bytes.resize(out_bits.div_ceil(8), 0);
        let mut v = BitVec::zeros(out_bits);
        for i in 0..out_bits {
            if bytes[i / 8] >> (i % 8) & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }
}

/// Wraps another oracle and records every query. Single-threaded.
#[derive(Debug, Default)]
pub struct RecordingOracle<O> {
    inner: O,
    queries: RefCell<Vec<(u8, Vec<u8>)>>,
}

impl<O: DigestOracle> RecordingOracle<O> {
    pub fn new(inner: O) -> Self {
        RecordingOracle { inner, queries: RefCell::new(Vec::new()) }
    }

    pub fn queries(&self) -> Vec<(u8, Vec<u8>)> {
        self.queries.borrow().clone()
    }

    pub fn query_count(&self) -> usize {
        self.queries.borrow().len()
    }
}

impl<O: DigestOracle> DigestOracle for RecordingOracle<O> {
    fn digest(&self, tag: u8, input: &[u8], out_bits: usize) -> BitVec {
        self.queries.borrow_mut().push((tag, input.to_vec()));
        self.inner.digest(tag, input, out_bits)
    }
}

/// Which randomizer weights are acceptable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WeightMode {
    /// Weight exactly `t`; the only mode the signature scheme uses.
    #[default]
    Exact,
    /// Weight at most `t`; kept for distribution analysis.
    AtMost,
}

impl WeightMode {
    fn check(self, found: usize, t: usize) -> Result<(), Error> {
        let ok = match self {
            WeightMode::Exact => found == t,
            WeightMode::AtMost => found <= t,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::WeightMismatch { expected: t, found })
        }
    }
}

/// The `n`-bit hash randomizer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Randomizer(pub BitVec);

impl Randomizer {
    pub fn bits(&self) -> &BitVec {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.weight()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChameleonPublic {
    pub params: CodeParams,
    pub hpub: BitMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChameleonSecret {
    pub perm: Permutation,
    pub s_inv: BitMatrix,
    pub code: GoppaCode,
}

impl ChameleonSecret {
    pub fn params(&self) -> &CodeParams {
        self.code.params()
    }

    /// Recomputes `S' * Hsec * P` from the stored components.
    pub fn reconstruct_public(&self) -> Result<BitMatrix, Error> {
        let s = mat_invert(&self.s_inv)?;
        mat_mul(&s, self.code.parity_check())?.permute_columns(&self.perm)
    }

    /// Whether this trapdoor belongs to `pk`.
    pub fn matches(&self, pk: &ChameleonPublic) -> bool {
        self.reconstruct_public().is_ok_and(|h| h == pk.hpub)
    }
}

pub fn ch_gen<R: Rng + ?Sized>(
    params: CodeParams,
    rng: &mut R,
) -> Result<(ChameleonPublic, ChameleonSecret), Error> {
    let code = GoppaCode::generate(params, rng)?;
    let scrambler = random_invertible(params.redundancy(), rng);
    let perm = random_permutation(params.n, rng);
    let hpub = mat_mul(&scrambler, code.parity_check())?.permute_columns(&perm)?;
    let s_inv = mat_invert(&scrambler)?;
    let pk = ChameleonPublic { params, hpub };
    let sk = ChameleonSecret { perm, s_inv, code };

    // v * Hpub^T * S'^{-T} must equal (v * P^T) * Hsec^T
    for _ in 0..4 {
        let v = BitVec::random(params.n, rng);
        let lhs = vec_mat_transpose_mul(&vec_mat_transpose_mul(&v, &pk.hpub)?, &sk.s_inv)?;
        let rhs = sk.code.syndrome_of(&apply_inverse_permutation(&v, &sk.perm)?)?;
        if lhs != rhs {
            return Err(Error::Internal("masked key failed self-check".into()));
        }
    }
    Ok((pk, sk))
}

/// Uniform over the weight-`t` sphere.
pub fn sample_randomizer<R: Rng + ?Sized>(params: &CodeParams, rng: &mut R) -> Randomizer {
    Randomizer(random_fixed_weight(params.n, params.t, rng))
}

fn masked_input(
    pk: &ChameleonPublic,
    oracle: &dyn DigestOracle,
    msg: &BitVec,
) -> BitVec {
    oracle.digest(TAG_G, &msg.to_bytes(), pk.params.n)
}

pub fn ch_hash(
    pk: &ChameleonPublic,
    oracle: &dyn DigestOracle,
    msg: &BitVec,
    r: &Randomizer,
) -> Result<BitVec, Error> {
    ch_hash_with_mode(pk, oracle, msg, r, WeightMode::Exact)
}

pub fn ch_hash_with_mode(
    pk: &ChameleonPublic,
    oracle: &dyn DigestOracle,
    msg: &BitVec,
    r: &Randomizer,
    mode: WeightMode,
) -> Result<BitVec, Error> {
    if r.0.len() != pk.params.n {
        return Err(Error::dims(pk.params.n, r.0.len()));
    }
    mode.check(r.weight(), pk.params.t)?;
    let mut x = masked_input(pk, oracle, msg);
    x.xor_assign(&r.0);
    vec_mat_transpose_mul(&x, &pk.hpub)
}

/// Finds `r'` with `CH(msg_new, r') = CH(msg, r)` using the trapdoor.
pub fn ch_collide(
    sk: &ChameleonSecret,
    pk: &ChameleonPublic,
    oracle: &dyn DigestOracle,
    msg: &BitVec,
    r: &Randomizer,
    msg_new: &BitVec,
) -> Result<Randomizer, Error> {
    ch_collide_with_mode(sk, pk, oracle, msg, r, msg_new, WeightMode::Exact)
}

pub fn ch_collide_with_mode(
    sk: &ChameleonSecret,
    pk: &ChameleonPublic,
    oracle: &dyn DigestOracle,
    msg: &BitVec,
    r: &Randomizer,
    msg_new: &BitVec,
    mode: WeightMode,
) -> Result<Randomizer, Error> {
    let t = pk.params.t;
    if r.0.len() != pk.params.n {
        return Err(Error::dims(pk.params.n, r.0.len()));
    }
    mode.check(r.weight(), t)?;
    let mut diff = masked_input(pk, oracle, msg);
    diff.xor_assign(&r.0);
    diff.xor_assign(&masked_input(pk, oracle, msg_new));
    let target = vec_mat_transpose_mul(&diff, &pk.hpub)?;
    let unscrambled = vec_mat_transpose_mul(&target, &sk.s_inv)?;
    let f = sk.code.decode(&unscrambled)?;
    let r_new = Randomizer(apply_permutation(&f, &sk.perm)?);
    mode.check(r_new.weight(), t)?;
    if vec_mat_transpose_mul(&r_new.0, &pk.hpub)? != target {
        return Err(Error::Internal("trapdoor does not match the public key".into()));
    }
    Ok(r_new)
}
