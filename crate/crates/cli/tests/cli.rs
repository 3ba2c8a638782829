use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mcss::codec;
use mcss::sss::SimulatedDilithium2;
use mcss::CodeParams;

fn mcss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcss")).args(args).output().expect("runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mcss-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn keygen(dir: &Path, params: &str, seed: &str) {
    let out = mcss(&["keygen", "--params", params, "--out", s(dir), "--seed", seed]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn seeded_keygen_is_deterministic() {
    let (a, b) = (tmpdir("det-a"), tmpdir("det-b"));
    keygen(&a, "nano", "00ff");
    keygen(&b, "nano", "00ff");
    for f in ["pk.mcss", "signer.sk", "sanitizer.sk", "escrow.sk"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = tmpdir("det-c");
    keygen(&c, "nano", "0100");
    assert_ne!(fs::read(a.join("pk.mcss")).unwrap(), fs::read(c.join("pk.mcss")).unwrap());
}

#[test]
fn sign_verify_tamper() {
    let dir = tmpdir("sv");
    keygen(&dir, "toy", "01");
    let msg = dir.join("msg.bin");
    fs::write(&msg, vec![7u8; 40]).unwrap(); // 320 bits + marker -> 3 blocks of 128
    let sig = dir.join("sig.mcss");
    let out = mcss(&[
        "sign", "--pk", s(&dir.join("pk.mcss")), "--sk", s(&dir.join("signer.sk")), "--in", s(&msg),
        "--adm", "0,1,0", "--out", s(&sig), "--seed", "02",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let verify = |m: &Path| mcss(&["verify", "--pk", s(&dir.join("pk.mcss")), "--in", s(m), "--sig", s(&sig)]);
    let ok = verify(&msg);
    assert_eq!((code(&ok), stdout(&ok).trim()), (0, "OK"));

    let bad = dir.join("bad.bin");
    let mut bytes = vec![7u8; 40];
    bytes[3] ^= 0x10;
    fs::write(&bad, &bytes).unwrap();
    let rej = verify(&bad);
    assert_eq!((code(&rej), stdout(&rej).trim()), (1, "ChainMismatch"));

    let wrong_len = dir.join("short.bin");
    fs::write(&wrong_len, vec![7u8; 10]).unwrap();
    assert_eq!(code(&verify(&wrong_len)), 1);

    let inspect = mcss(&["inspect", "--file", s(&sig)]);
    assert_eq!(code(&inspect), 0);
    let text = stdout(&inspect);
    assert!(text.contains("kind: signature") && text.contains("blocks: 3") && text.contains("adm: 0,1,0"), "{text}");
}

#[test]
fn adm_must_match_block_count() {
    let dir = tmpdir("adm");
    keygen(&dir, "nano", "03");
    let msg = dir.join("m");
    fs::write(&msg, b"hello").unwrap(); // 41 bits -> 2 blocks of 22
    let out = mcss(&[
        "sign", "--pk", s(&dir.join("pk.mcss")), "--sk", s(&dir.join("signer.sk")), "--in", s(&msg),
        "--adm", "1,1,1", "--out", s(&dir.join("sig")),
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn nano_sanitize_genuine_digest() {
    let dir = tmpdir("san");
    keygen(&dir, "nano", "04");
    let pk = dir.join("pk.mcss");
    let orig = dir.join("orig");
    let original = b"hello".to_vec(); // blocks: bits 0..22, 22..44 (incl. marker at 40)
    fs::write(&orig, &original).unwrap();
    let sig = dir.join("sig");
    let out = mcss(&[
        "sign", "--pk", s(&pk), "--sk", s(&dir.join("signer.sk")), "--in", s(&orig), "--adm", "0,1",
        "--out", s(&sig), "--seed", "05",
    ]);
    assert_eq!(code(&out), 0);

    let new = dir.join("new");
    let out_sig = dir.join("sig2");
    let sanitize = || {
        mcss(&[
            "sanitize", "--pk", s(&pk), "--sankey", s(&dir.join("sanitizer.sk")), "--orig", s(&orig), "--new",
            s(&new), "--sig", s(&sig), "--out", s(&out_sig),
        ])
    };
    // byte 4 lies entirely in the admissible block 1
    let (mut ok, mut undecodable) = (0, 0);
    for v in 0..=255u8 {
        if v == original[4] {
            continue;
        }
        let mut m = original.clone();
        m[4] = v;
        fs::write(&new, &m).unwrap();
        match code(&sanitize()) {
            0 => {
                ok += 1;
                let ver = mcss(&["verify", "--pk", s(&pk), "--in", s(&new), "--sig", s(&out_sig)]);
                assert_eq!(stdout(&ver).trim(), "OK");
            }
            2 => undecodable += 1,
            other => panic!("unexpected exit {other}"),
        }
        if ok >= 3 && undecodable >= 3 {
            break;
        }
    }
    assert!(ok >= 3 && undecodable >= 3, "ok {ok} undecodable {undecodable}");

    // byte 0 is in the immutable block 0
    let mut m = original.clone();
    m[0] ^= 1;
    fs::write(&new, &m).unwrap();
    assert_eq!(code(&sanitize()), 1);
}

#[test]
fn toy_sanitize_with_identity_digest() {
    let params = CodeParams::TOY;
    let dir = tmpdir("ident");
    keygen(&dir, "toy", "06");
    let pk = dir.join("pk.mcss");
    let orig = dir.join("orig");
    let original: Vec<u8> = (0..40u8).collect(); // 3 blocks, block 1 = bits 128..256
    fs::write(&orig, &original).unwrap();
    let sig = dir.join("sig");
    let out = mcss(&[
        "sign", "--pk", s(&pk), "--sk", s(&dir.join("signer.sk")), "--in", s(&orig), "--adm", "0,1,0",
        "--out", s(&sig), "--seed", "07", "--test-oracle", "identity",
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("WARNING"));

    // move one randomizer bit within the message part of block 1: the target
    // r xor delta keeps weight t, so it is decodable
    let (_, decoded) = codec::decode_signature(&fs::read(&sig).unwrap(), &SimulatedDilithium2).unwrap();
    let r = &decoded.randomizers[1].0;
    let prefix = params.redundancy();
    let one = (prefix..params.n).find(|&p| r.get(p)).expect("randomizer has message-part bits");
    let zero = (prefix..params.n).find(|&p| !r.get(p)).unwrap();
    let mut m = original.clone();
    for p in [one, zero] {
        let bit = params.k + (p - prefix);
        m[bit / 8] ^= 1 << (bit % 8);
    }
    let new = dir.join("new");
    fs::write(&new, &m).unwrap();
    let out_sig = dir.join("sig2");
    let out = mcss(&[
        "sanitize", "--pk", s(&pk), "--sankey", s(&dir.join("sanitizer.sk")), "--orig", s(&orig), "--new",
        s(&new), "--sig", s(&sig), "--out", s(&out_sig), "--test-oracle", "identity",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let ver = mcss(&["verify", "--pk", s(&pk), "--in", s(&new), "--sig", s(&out_sig), "--test-oracle", "identity"]);
    assert_eq!(stdout(&ver).trim(), "OK");
    let a = fs::read(&sig).unwrap();
    let b = fs::read(&out_sig).unwrap();
    let tail = SimulatedDilithium2::SIG_BYTES;
    assert_eq!(a[a.len() - tail..], b[b.len() - tail..]);
}

#[test]
fn analyze_outputs() {
    let out = mcss(&["analyze", "--what", "delta", "--n", "32", "--t", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("= 33/529") && text.contains("~ 0.062381852552"), "{text}");
    let out = mcss(&["analyze", "--what", "ratio", "--params", "secure"]);
    assert!(stdout(&out).contains("~ 0.981"), "{}", stdout(&out));
    let out = mcss(&["analyze", "--what", "density", "--params", "nano"]);
    assert!(stdout(&out).contains("= 529/1024"));
    let out = mcss(&["analyze", "--what", "density", "--params", "toy"]);
    assert!(stdout(&out).contains("~ 0.000000000000"));
    assert_eq!(code(&mcss(&["analyze", "--what", "density", "--n", "32", "--t", "2"])), 4);
}

#[test]
fn usage_and_malformed_codes() {
    assert_eq!(code(&mcss(&["frobnicate"])), 4);
    assert_eq!(code(&mcss(&[])), 4);
    assert_eq!(code(&mcss(&["--help"])), 0);
    let dir = tmpdir("codes");
    assert_eq!(code(&mcss(&["keygen", "--params", "huge", "--out", s(&dir)])), 4);
    assert_eq!(code(&mcss(&["keygen", "--params", "nano", "--out", s(&dir), "--seed", "xyz"])), 4);
    keygen(&dir, "nano", "08");
    let pk = fs::read(dir.join("pk.mcss")).unwrap();
    let cut = dir.join("cut");
    fs::write(&cut, &pk[..pk.len() - 3]).unwrap();
    assert_eq!(code(&mcss(&["inspect", "--file", s(&cut)])), 3);
    fs::write(&cut, b"not an mcss file").unwrap();
    assert_eq!(code(&mcss(&["inspect", "--file", s(&cut)])), 3);
    let inspect = mcss(&["inspect", "--file", s(&dir.join("sanitizer.sk"))]);
    assert_eq!(code(&inspect), 0);
    assert!(stdout(&inspect).contains("sanitizer secret key"));
}

#[test]
fn bench_writes_json() {
    let dir = tmpdir("bench");
    let report = dir.join("report.json");
    let out = mcss(&["bench", "--params", "nano,toy", "--blocks", "1,2", "--out", s(&report), "--seed", "09"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    let records = json["records"].as_array().unwrap();
    assert_eq!(records.len(), 2 * 2 * 4);
    assert!(records.iter().all(|r| r["samples_ms"].as_array().unwrap().len() >= 5));
    assert!(stdout(&out).contains("sign ms"));
}
