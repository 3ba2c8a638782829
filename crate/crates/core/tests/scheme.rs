use mcss::binmat::BitVec;
use mcss::chameleon::{ch_hash, sample_randomizer, IdentityOracle, RecordingOracle, Sha3Oracle, TAG_G};
use mcss::codec;
use mcss::sss::{
    chain_digest, keygen, outer_payload, sanitize, sign, verify, AdmMask, BlockMessage, OuterSigner,
    RejectReason, SanitizableSignature, SimulatedDilithium2, Verdict,
};
use mcss::testkit::identity_rewrite;
use mcss::CodeParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const OUTER: SimulatedDilithium2 = SimulatedDilithium2;

// A sanitizer that tries to change an immutable block by hand: keep h_L and
// the outer signature, pick fresh randomizers, and hope the chain still ends
// at h_L. Without the non-instance trapdoor this should never work.
#[test]
fn manual_chain_forgery_fails() {
    let params = CodeParams::NANO;
    let mut rng = ChaCha20Rng::seed_from_u64(21);
    let keys = keygen(params, &OUTER, &mut rng).unwrap();
    let oracle = Sha3Oracle::new(&params);
    let adm = AdmMask(vec![false, true]);
    let msg = BlockMessage::random(params.k, 2, &mut rng);
    let sig = sign(&keys.signer, &keys.public, &OUTER, &oracle, &msg, &adm, &mut rng).unwrap();
    let mut accepted = 0;
    for _ in 0..1000 {
        let mut block = msg.blocks()[0].clone();
        block.flip(rng.gen_range(0..params.k));
        let forged_msg = msg.with_block(0, block).unwrap();
        let mut forged = sig.clone();
        forged.randomizers[0] = sample_randomizer(&params, &mut rng);
        if rng.gen() {
            forged.randomizers[1] = sample_randomizer(&params, &mut rng);
        }
        if verify(&keys.public, &OUTER, &oracle, &forged_msg, &forged).is_accept() {
            accepted += 1;
        }
    }
    // a chance hit on a 10-bit digest is possible; anything near 1/1024 is noise
    assert!(accepted <= 5, "{accepted} forgeries accepted");
}

#[test]
fn keys_survive_serialization() {
    let params = CodeParams::TOY;
    let mut rng = ChaCha20Rng::seed_from_u64(22);
    let keys = keygen(params, &OUTER, &mut rng).unwrap();
    let pk = codec::decode_public_key(&codec::encode_public_key(&keys.public), &OUTER).unwrap();
    let signer = codec::decode_signer_key(&codec::encode_signer_key(&keys.signer), &OUTER).unwrap();
    let san = codec::decode_sanitizer_key(&codec::encode_sanitizer_key(&keys.sanitizer)).unwrap();

    let adm = AdmMask(vec![true, false, true]);
    let msg = BlockMessage::random(params.k, 3, &mut rng);
    let sig = sign(&signer, &pk, &OUTER, &IdentityOracle, &msg, &adm, &mut rng).unwrap();
    let bytes = codec::encode_signature(&params, &sig);
    let (_, sig) = codec::decode_signature(&bytes, &OUTER).unwrap();
    let msg_new = identity_rewrite(&pk, &msg, &sig, 2, &mut rng).unwrap();
    let out = sanitize(&san, &pk, &OUTER, &IdentityOracle, &msg, &sig, &msg_new).unwrap();
    assert!(verify(&keys.public, &OUTER, &IdentityOracle, &msg_new, &out).is_accept());
    // the sanitized encoding differs from the original only in randomizer 2
    let out_bytes = codec::encode_signature(&params, &out);
    let diff: Vec<usize> = (0..bytes.len()).filter(|&i| bytes[i] != out_bytes[i]).collect();
    let r2 = codec::HEADER_BYTES + 4 + 1 + params.redundancy_bytes() + 2 * params.n_bytes();
    assert!(diff.iter().all(|&i| (r2..r2 + params.n_bytes()).contains(&i)), "{diff:?}");
}

#[test]
fn one_digest_query_per_block() {
    let params = CodeParams::NANO;
    let mut rng = ChaCha20Rng::seed_from_u64(23);
    let keys = keygen(params, &OUTER, &mut rng).unwrap();
    let oracle = RecordingOracle::new(Sha3Oracle::new(&params));
    let msg = BlockMessage::random(params.k, 6, &mut rng);
    let adm = AdmMask(vec![true; 6]);
    let sig = sign(&keys.signer, &keys.public, &OUTER, &oracle, &msg, &adm, &mut rng).unwrap();
    assert_eq!(oracle.query_count(), 6);
    assert!(oracle.queries().iter().all(|(tag, _)| *tag == TAG_G));
    // first query is h_0 || M[0] with h_0 = 0
    let x0 = BitVec::zeros(params.redundancy()).concat(&msg.blocks()[0]);
    assert_eq!(oracle.queries()[0].1, x0.to_bytes());
    verify(&keys.public, &OUTER, &oracle, &msg, &sig);
    assert_eq!(oracle.query_count(), 12);
}

#[test]
fn outer_signature_binds_adm_and_length() {
    let params = CodeParams::NANO;
    let mut rng = ChaCha20Rng::seed_from_u64(24);
    let keys = keygen(params, &OUTER, &mut rng).unwrap();
    let oracle = Sha3Oracle::new(&params);
    let msg = BlockMessage::random(params.k, 3, &mut rng);
    let sig = sign(&keys.signer, &keys.public, &OUTER, &oracle, &msg, &AdmMask(vec![false, true, false]), &mut rng)
        .unwrap();

    // widen adm and recompute h_L honestly: chain matches, outer signature does not
    let adm = AdmMask(vec![true, true, false]);
    let chain = chain_digest(&keys.public, &oracle, &msg, &adm, &sig.randomizers).unwrap();
    let widened = SanitizableSignature { h_l: chain[3].clone(), adm, ..sig.clone() };
    assert_eq!(
        verify(&keys.public, &OUTER, &oracle, &msg, &widened),
        Verdict::Reject(RejectReason::OuterSig)
    );
    assert_ne!(outer_payload(&sig.h_l, &sig.adm), outer_payload(&sig.h_l, &AdmMask(vec![false, true, false, false])));
    assert!(OUTER.verify(&keys.public.outer_pk, &outer_payload(&sig.h_l, &sig.adm), &sig.outer_sig));
}

#[test]
fn chain_links_use_the_right_instance() {
    let params = CodeParams::NANO;
    let mut rng = ChaCha20Rng::seed_from_u64(25);
    let keys = keygen(params, &OUTER, &mut rng).unwrap();
    let oracle = Sha3Oracle::new(&params);
    let msg = BlockMessage::random(params.k, 2, &mut rng);
    let adm = AdmMask(vec![false, true]);
    let sig = sign(&keys.signer, &keys.public, &OUTER, &oracle, &msg, &adm, &mut rng).unwrap();
    let h1 = ch_hash(
        &keys.public.non,
        &oracle,
        &BitVec::zeros(params.redundancy()).concat(&msg.blocks()[0]),
        &sig.randomizers[0],
    )
    .unwrap();
    let h2 = ch_hash(&keys.public.san, &oracle, &h1.concat(&msg.blocks()[1]), &sig.randomizers[1]).unwrap();
    assert_eq!(h2, sig.h_l);
}
