//! Byte formats for keys and signatures.
//!
//! Every encoding starts with a 7-byte header: `"MCSS"`, version `0x01`, a
//! kind byte and the parameter-set id. Bits are packed LSB-first, multi-byte
//! integers are little-endian. See `docs/FORMAT.md` for offsets.

use crate::binmat::{mat_invert, BitMatrix, BitVec, Permutation};
use crate::chameleon::{ChameleonPublic, ChameleonSecret, Randomizer};
use crate::error::Error;
use crate::gf2m::{FieldElement, FieldPoly};
use crate::goppa::GoppaCode;
use crate::params::CodeParams;
use crate::sss::{
    AdmMask, EscrowedSecret, OuterSigner, SanitizableSignature, SanitizerKey, SchemePublicKey,
    SignerKey,
};

pub const MAGIC: [u8; 4] = *b"MCSS";
pub const VERSION: u8 = 0x01;
pub const HEADER_BYTES: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    PublicKey = 0x01,
    SignerKey = 0x02,
    SanitizerKey = 0x03,
    Signature = 0x04,
}

impl Kind {
    fn from_byte(b: u8) -> Result<Self, Error> {
        match b {
            0x01 => Ok(Kind::PublicKey),
            0x02 => Ok(Kind::SignerKey),
            0x03 => Ok(Kind::SanitizerKey),
            0x04 => Ok(Kind::Signature),
            other => Err(Error::malformed(format!("unknown kind {other:#04x}"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Kind::PublicKey => "public key",
            Kind::SignerKey => "signer secret key",
            Kind::SanitizerKey => "sanitizer secret key",
            Kind::Signature => "signature",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WireHeader {
    pub kind: Kind,
    pub params: CodeParams,
}

impl WireHeader {
    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.kind as u8);
        out.push(self.params.id);
    }
}

/// Parses and validates the header without touching the payload.
pub fn read_header(bytes: &[u8]) -> Result<WireHeader, Error> {
    if bytes.len() < HEADER_BYTES {
        return Err(Error::malformed("truncated header"));
    }
    if bytes[..4] != MAGIC {
        return Err(Error::malformed("bad magic"));
    }
    if bytes[4] != VERSION {
        return Err(Error::malformed(format!("unsupported version {}", bytes[4])));
    }
    let kind = Kind::from_byte(bytes[5])?;
    let params = CodeParams::by_id(bytes[6]).map_err(|_| Error::malformed("unknown params id"))?;
    Ok(WireHeader { kind, params })
}

fn expect_header(bytes: &[u8], kind: Kind) -> Result<CodeParams, Error> {
    let h = read_header(bytes)?;
    if h.kind != kind {
        return Err(Error::malformed(format!("expected {}, found {}", kind.label(), h.kind.label())));
    }
    Ok(h.params)
}

/// Sequential reader over a payload; every read is bounds-checked.
struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: HEADER_BYTES }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8], Error> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::malformed("truncated input"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, Error> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, Error> {
        let b = self.take(2)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32, Error> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn finish(self) -> Result<(), Error> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(Error::malformed("trailing bytes"))
        }
    }
}

fn matrix(r: &mut Reader<'_>, rows: usize, cols: usize) -> Result<BitMatrix, Error> {
    let bytes = r.take(rows * cols.div_ceil(8))?;
    BitMatrix::from_bytes(bytes, rows, cols).map_err(|e| Error::malformed(e.to_string()))
}

fn bitvec(r: &mut Reader<'_>, len: usize) -> Result<BitVec, Error> {
    let bytes = r.take(len.div_ceil(8))?;
    BitVec::from_bytes(bytes, len).map_err(|e| Error::malformed(e.to_string()))
}

pub fn encode_public_key(pk: &SchemePublicKey) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_BYTES + pk.outer_pk.len() + 2 * pk.non.hpub.byte_len());
    WireHeader { kind: Kind::PublicKey, params: pk.params }.write(&mut out);
    out.extend_from_slice(&pk.outer_pk);
    pk.non.hpub.write_bytes(&mut out);
    pk.san.hpub.write_bytes(&mut out);
    out
}

pub fn decode_public_key(bytes: &[u8], outer: &dyn OuterSigner) -> Result<SchemePublicKey, Error> {
    let params = expect_header(bytes, Kind::PublicKey)?;
    let mut r = Reader::new(bytes);
    let outer_pk = r.take(outer.public_key_bytes())?.to_vec();
    let non = matrix(&mut r, params.redundancy(), params.n)?;
    let san = matrix(&mut r, params.redundancy(), params.n)?;
    r.finish()?;
    Ok(SchemePublicKey {
        params,
        outer_pk,
        non: ChameleonPublic { params, hpub: non },
        san: ChameleonPublic { params, hpub: san },
    })
}

pub fn encode_signature(params: &CodeParams, sig: &SanitizableSignature) -> Vec<u8> {
    let mut out = Vec::new();
    WireHeader { kind: Kind::Signature, params: *params }.write(&mut out);
    out.extend((sig.randomizers.len() as u32).to_le_bytes());
    out.extend(sig.adm.to_bytes());
    sig.h_l.write_bytes(&mut out);
    for r in &sig.randomizers {
        r.0.write_bytes(&mut out);
    }
    out.extend_from_slice(&sig.outer_sig);
    out
}

pub fn decode_signature(
    bytes: &[u8],
    outer: &dyn OuterSigner,
) -> Result<(CodeParams, SanitizableSignature), Error> {
    let params = expect_header(bytes, Kind::Signature)?;
    let mut r = Reader::new(bytes);
    let l = r.u32()? as usize;
    if l == 0 {
        return Err(Error::malformed("signature over zero blocks"));
    }
    let expected = l
        .checked_mul(params.n_bytes())
        .and_then(|x| x.checked_add(l.div_ceil(8) + 4 + params.redundancy_bytes()))
        .and_then(|x| x.checked_add(outer.signature_bytes() + HEADER_BYTES));
    if expected != Some(bytes.len()) {
        return Err(Error::malformed("signature length does not match its block count"));
    }
    let adm = AdmMask::from_bytes(r.take(l.div_ceil(8))?, l).map_err(|e| Error::malformed(e.to_string()))?;
    let h_l = bitvec(&mut r, params.redundancy())?;
    let mut randomizers = Vec::with_capacity(l);
    for _ in 0..l {
        let v = bitvec(&mut r, params.n)?;
        if v.weight() != params.t {
            return Err(Error::WeightMismatch { expected: params.t, found: v.weight() });
        }
        randomizers.push(Randomizer(v));
    }
    let outer_sig = r.take(outer.signature_bytes())?.to_vec();
    r.finish()?;
    Ok((params, SanitizableSignature { h_l, outer_sig, randomizers, adm }))
}

pub fn encode_signer_key(key: &SignerKey) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_BYTES + 4 + key.outer_sk.len());
    WireHeader { kind: Kind::SignerKey, params: key.params }.write(&mut out);
    out.extend((key.outer_sk.len() as u32).to_le_bytes());
    out.extend_from_slice(&key.outer_sk);
    out
}

pub fn decode_signer_key(bytes: &[u8], outer: &dyn OuterSigner) -> Result<SignerKey, Error> {
    let params = expect_header(bytes, Kind::SignerKey)?;
    let mut r = Reader::new(bytes);
    let len = r.u32()? as usize;
    if len != outer.secret_key_bytes() {
        return Err(Error::malformed("outer secret key has the wrong length"));
    }
    let outer_sk = r.take(len)?.to_vec();
    r.finish()?;
    Ok(SignerKey { params, outer_sk })
}

fn encode_chameleon_secret(secret: &ChameleonSecret) -> Vec<u8> {
    let params = *secret.params();
    let code = &secret.code;
    let mut out = Vec::new();
    WireHeader { kind: Kind::SanitizerKey, params }.write(&mut out);
    for &i in secret.perm.map() {
        out.extend(i.to_le_bytes());
    }
    secret.s_inv.write_bytes(&mut out);
    for i in 0..=params.t {
        out.extend(code.goppa_poly().coeff(i).value().to_le_bytes());
    }
    for a in code.support() {
        out.extend(a.value().to_le_bytes());
    }
    out.push(params.m as u8);
    out
}

fn decode_chameleon_secret(bytes: &[u8]) -> Result<ChameleonSecret, Error> {
    let params = expect_header(bytes, Kind::SanitizerKey)?;
    let mut r = Reader::new(bytes);
    let map = (0..params.n).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
    let perm = Permutation::from_map(map).map_err(|e| Error::malformed(e.to_string()))?;
    let s_inv = matrix(&mut r, params.redundancy(), params.redundancy())?;
    let order = 1u32 << params.m;
    let mut field_elem = |v: u16| {
        if (v as u32) < order {
            Ok(FieldElement(v))
        } else {
            Err(Error::malformed("field element out of range"))
        }
    };
    let g = (0..=params.t)
        .map(|_| r.u16().and_then(&mut field_elem))
        .collect::<Result<Vec<_>, _>>()?;
    let support = (0..params.n)
        .map(|_| r.u16().and_then(&mut field_elem))
        .collect::<Result<Vec<_>, _>>()?;
    if r.u8()? as u32 != params.m {
        return Err(Error::malformed("field id does not match the parameter set"));
    }
    r.finish()?;
    mat_invert(&s_inv).map_err(|_| Error::malformed("scrambler inverse is singular"))?;
    let code = GoppaCode::from_parts(params, FieldPoly::from_coeffs(g), support)
        .map_err(|e| Error::malformed(e.to_string()))?;
    Ok(ChameleonSecret { perm, s_inv, code })
}

pub fn encode_sanitizer_key(key: &SanitizerKey) -> Vec<u8> {
    encode_chameleon_secret(&key.secret)
}

pub fn decode_sanitizer_key(bytes: &[u8]) -> Result<SanitizerKey, Error> {
    Ok(SanitizerKey { secret: decode_chameleon_secret(bytes)? })
}

/// The escrowed non-admissible trapdoor uses the sanitizer-key layout.
pub fn encode_escrow(key: &EscrowedSecret) -> Vec<u8> {
    encode_chameleon_secret(&key.secret)
}

pub fn decode_escrow(bytes: &[u8]) -> Result<EscrowedSecret, Error> {
    Ok(EscrowedSecret { secret: decode_chameleon_secret(bytes)? })
}

/// Payload sizes in bytes, header excluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SizeReport {
    pub pk_bytes: usize,
    pub sig_bytes: usize,
    pub per_block_bytes: usize,
}

pub fn size_report(params: &CodeParams, blocks: usize, outer: &dyn OuterSigner) -> SizeReport {
    let matrix_bytes = params.redundancy() * params.n / 8;
    SizeReport {
        pk_bytes: 2 * matrix_bytes + outer.public_key_bytes(),
        sig_bytes: params.redundancy_bytes()
            + outer.signature_bytes()
            + blocks * params.n_bytes()
            + blocks.div_ceil(8)
            + 4,
        per_block_bytes: params.n_bytes(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chameleon::Sha3Oracle;
    use crate::sss::{keygen, sign, BlockMessage, SimulatedDilithium2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn header_validation() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let keys = keygen(CodeParams::NANO, &SimulatedDilithium2, &mut rng).unwrap();
        let bytes = encode_public_key(&keys.public);
        assert_eq!(read_header(&bytes).unwrap().kind, Kind::PublicKey);
        for (pos, val) in [(0usize, b'X'), (4, 2), (5, 9), (6, 5)] {
            let mut b = bytes.clone();
            b[pos] = val;
            assert!(matches!(decode_public_key(&b, &SimulatedDilithium2), Err(Error::MalformedInput(_))));
        }
        assert!(decode_signer_key(&bytes, &SimulatedDilithium2).is_err());
        assert!(read_header(&bytes[..6]).is_err());
    }

    #[test]
    fn public_key_round_trip_and_truncation() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let keys = keygen(CodeParams::TOY, &SimulatedDilithium2, &mut rng).unwrap();
        let bytes = encode_public_key(&keys.public);
        assert_eq!(bytes.len() - HEADER_BYTES, 9504);
        assert_eq!(decode_public_key(&bytes, &SimulatedDilithium2).unwrap(), keys.public);
        assert!(decode_public_key(&bytes[..bytes.len() - 1], &SimulatedDilithium2).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_public_key(&extra, &SimulatedDilithium2).is_err());
    }

    #[test]
    fn signature_layout_medium() {
        let params = CodeParams::MEDIUM;
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let keys = keygen(params, &SimulatedDilithium2, &mut rng).unwrap();
        let msg = BlockMessage::random(params.k, 10, &mut rng);
        let adm = AdmMask(vec![true; 10]);
        let oracle = Sha3Oracle::new(&params);
        let sig = sign(&keys.signer, &keys.public, &SimulatedDilithium2, &oracle, &msg, &adm, &mut rng).unwrap();
        let bytes = encode_signature(&params, &sig);
        // h_L: 500 bits in 63 bytes, top 4 bits of the last byte zero
        let h_start = HEADER_BYTES + 4 + 2;
        assert_eq!(&bytes[h_start..h_start + 63], sig.h_l.to_bytes().as_slice());
        assert_eq!(bytes[h_start + 62] & 0xF0, 0);
        assert_eq!(bytes.len() - HEADER_BYTES, size_report(&params, 10, &SimulatedDilithium2).sig_bytes);
        assert_eq!(decode_signature(&bytes, &SimulatedDilithium2).unwrap(), (params, sig));
    }

    #[test]
    fn signature_weight_checked_on_decode() {
        let params = CodeParams::NANO;
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let keys = keygen(params, &SimulatedDilithium2, &mut rng).unwrap();
        let msg = BlockMessage::random(params.k, 2, &mut rng);
        let sig = sign(
            &keys.signer, &keys.public, &SimulatedDilithium2, &Sha3Oracle::new(&params), &msg,
            &AdmMask(vec![false, true]), &mut rng,
        )
        .unwrap();
        let mut bytes = encode_signature(&params, &sig);
        let r0 = HEADER_BYTES + 4 + 1 + 2;
        let free = (0..32).find(|&j| !sig.randomizers[0].0.get(j)).unwrap();
        bytes[r0 + free / 8] ^= 1 << (free % 8);
        assert_eq!(
            decode_signature(&bytes, &SimulatedDilithium2),
            Err(Error::WeightMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn secret_keys_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let keys = keygen(CodeParams::NANO, &SimulatedDilithium2, &mut rng).unwrap();
        let san = encode_sanitizer_key(&keys.sanitizer);
        assert_eq!(decode_sanitizer_key(&san).unwrap(), keys.sanitizer);
        assert_eq!(decode_escrow(&encode_escrow(&keys.escrow)).unwrap(), keys.escrow);
        let signer = encode_signer_key(&keys.signer);
        assert_eq!(decode_signer_key(&signer, &SimulatedDilithium2).unwrap(), keys.signer);

        let mut dup = san.clone();
        dup.copy_within(HEADER_BYTES + 4..HEADER_BYTES + 8, HEADER_BYTES);
        assert!(matches!(decode_sanitizer_key(&dup), Err(Error::MalformedInput(_))));
        for cut in [0, 7, 50, san.len() - 1] {
            assert!(decode_sanitizer_key(&san[..cut]).is_err());
        }
        let mut wrong_field = san.clone();
        *wrong_field.last_mut().unwrap() = 6;
        assert!(decode_sanitizer_key(&wrong_field).is_err());
    }

    #[test]
    fn reducible_goppa_polynomial_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let keys = keygen(CodeParams::NANO, &SimulatedDilithium2, &mut rng).unwrap();
        let mut san = encode_sanitizer_key(&keys.sanitizer);
        // g = x^2 + 1 = (x + 1)^2
        let g_off = HEADER_BYTES + 32 * 4 + 10 * 2;
        san[g_off..g_off + 6].copy_from_slice(&[1, 0, 0, 0, 1, 0]);
        assert!(matches!(decode_sanitizer_key(&san), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn size_formula_examples() {
        let s = size_report(&CodeParams::SECURE, 10, &SimulatedDilithium2);
        assert_eq!((s.pk_bytes, s.sig_bytes, s.per_block_bytes), (671_008, 6882, 436));
        let t = size_report(&CodeParams::TOY, 10, &SimulatedDilithium2);
        assert_eq!((t.pk_bytes, t.sig_bytes), (9504, 2762));
    }
}
