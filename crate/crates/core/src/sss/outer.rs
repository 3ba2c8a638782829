//! Outer signature providers.

use hmac::{Hmac, Mac};
use rand::RngCore;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::{Sha3_256, Shake256};

use crate::error::Error;

/// The signature that binds `(h_L, adm)`.
pub trait OuterSigner {
    fn name(&self) -> &'static str;
    fn public_key_bytes(&self) -> usize;
    fn secret_key_bytes(&self) -> usize;
    fn signature_bytes(&self) -> usize;
    fn keygen(&self, rng: &mut dyn RngCore) -> (Vec<u8>, Vec<u8>);
    fn sign(&self, sk: &[u8], msg: &[u8]) -> Result<Vec<u8>, Error>;
    fn verify(&self, pk: &[u8], msg: &[u8], sig: &[u8]) -> bool;
}

/// Size-faithful stand-in for Dilithium2: an HMAC-SHA3-256 tag padded to the
/// 2420-byte signature length, with a 1312-byte public key.
///
/// This is NOT a public-key signature. The MAC key is embedded in the public
/// key so that verification works; anyone holding the public key can forge.
/// It exists to reproduce byte counts and timing structure only.
#[derive(Clone, Copy, Debug, Default)]
pub struct SimulatedDilithium2;

impl SimulatedDilithium2 {
    pub const PK_BYTES: usize = 1312;
    pub const SIG_BYTES: usize = 2420;
    pub const KEY_BYTES: usize = 32;

    fn expand(label: &[u8], seed: &[u8], len: usize) -> Vec<u8> {
        let mut xof = Shake256::default();
        xof.update(b"mcss/sim-dilithium2/");
        xof.update(label);
        xof.update(seed);
        let mut out = vec![0u8; len];
        xof.finalize_xof().read(&mut out);
        out
    }

    fn public_from_key(key: &[u8]) -> Vec<u8> {
        let mut pk = key.to_vec();
        pk.extend(Self::expand(b"pk", key, Self::PK_BYTES - Self::KEY_BYTES));
        pk
    }

    fn tag(key: &[u8], msg: &[u8]) -> Vec<u8> {
        let mut mac = <Hmac<Sha3_256> as Mac>::new_from_slice(key).expect("HMAC accepts any key length");
        Mac::update(&mut mac, msg);
        let tag = mac.finalize().into_bytes().to_vec();
        let mut sig = tag.clone();
        sig.extend(Self::expand(b"sig", &tag, Self::SIG_BYTES - tag.len()));
        sig
    }
}

impl OuterSigner for SimulatedDilithium2 {
    fn name(&self) -> &'static str {
        "simulated-dilithium2"
    }

    fn public_key_bytes(&self) -> usize {
        Self::PK_BYTES
    }

    fn secret_key_bytes(&self) -> usize {
        Self::KEY_BYTES
    }

    fn signature_bytes(&self) -> usize {
        Self::SIG_BYTES
    }

    fn keygen(&self, rng: &mut dyn RngCore) -> (Vec<u8>, Vec<u8>) {
        let mut key = vec![0u8; Self::KEY_BYTES];
        rng.fill_bytes(&mut key);
        (Self::public_from_key(&key), key)
    }

    fn sign(&self, sk: &[u8], msg: &[u8]) -> Result<Vec<u8>, Error> {
        if sk.len() != Self::KEY_BYTES {
            return Err(Error::dims(Self::KEY_BYTES, sk.len()));
        }
        Ok(Self::tag(sk, msg))
    }

    fn verify(&self, pk: &[u8], msg: &[u8], sig: &[u8]) -> bool {
        if pk.len() != Self::PK_BYTES || sig.len() != Self::SIG_BYTES {
            return false;
        }
        let key = &pk[..Self::KEY_BYTES];
        if Self::public_from_key(key) != pk {
            return false;
        }
        let expect = Self::tag(key, msg);
        // constant-time comparison is out of scope
        expect == sig
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn sizes_and_round_trip() {
        let s = SimulatedDilithium2;
        let (pk, sk) = s.keygen(&mut ChaCha20Rng::seed_from_u64(1));
        assert_eq!(pk.len(), 1312);
        let sig = s.sign(&sk, b"payload").unwrap();
        assert_eq!(sig.len(), 2420);
        assert!(s.verify(&pk, b"payload", &sig));
        assert!(!s.verify(&pk, b"paylaod", &sig));
        assert!(s.sign(&sk[..31], b"x").is_err());
    }

    #[test]
    fn any_flipped_bit_fails() {
        let s = SimulatedDilithium2;
        let (pk, sk) = s.keygen(&mut ChaCha20Rng::seed_from_u64(2));
        let msg = b"h_L || adm".to_vec();
        let sig = s.sign(&sk, &msg).unwrap();
        for bit in 0..msg.len() * 8 {
            let mut m = msg.clone();
            m[bit / 8] ^= 1 << (bit % 8);
            assert!(!s.verify(&pk, &m, &sig));
        }
        for bit in (0..sig.len() * 8).step_by(97) {
            let mut g = sig.clone();
            g[bit / 8] ^= 1 << (bit % 8);
            assert!(!s.verify(&pk, &msg, &g));
        }
        let mut bad_pk = pk.clone();
        bad_pk[1000] ^= 1;
        assert!(!s.verify(&bad_pk, &msg, &sig));
    }
}
