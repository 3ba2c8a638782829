//! `mcss`: key generation, signing, verification, sanitization and analysis.

mod message;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mcss::analysis::{decodable_density, delta_exact, weight_ratio, ExactRatio};
use mcss::bench::{bench_run, render_table};
use mcss::chameleon::{DigestOracle, IdentityOracle, Sha3Oracle};
use mcss::codec::{self, Kind};
use mcss::sss::{self, AdmMask, OuterSigner, SanitizeError, SimulatedDilithium2, Verdict};
use mcss::{CodeParams, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

const OUTER: SimulatedDilithium2 = SimulatedDilithium2;

#[derive(Parser)]
#[command(name = "mcss", version, about = "Code-based sanitizable signatures")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TestOracle {
    Identity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Delta,
    Ratio,
    Density,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key set into a directory.
    Keygen {
        #[arg(long)]
        params: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<String>,
    },
    /// Sign a message file.
    Sign {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Comma-separated 0/1 flags, one per block.
        #[arg(long)]
        adm: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<String>,
        #[arg(long, value_enum)]
        test_oracle: Option<TestOracle>,
    },
    /// Verify a signature; prints OK or the rejection reason.
    Verify {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        #[arg(long, value_enum)]
        test_oracle: Option<TestOracle>,
    },
    /// Rewrite admissible blocks, keeping the signature valid.
    Sanitize {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        sankey: PathBuf,
        #[arg(long)]
        orig: PathBuf,
        #[arg(long)]
        new: PathBuf,
        #[arg(long)]
        sig: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        test_oracle: Option<TestOracle>,
    },
    /// Exact transparency and density figures.
    Analyze {
        #[arg(long, value_enum)]
        what: What,
        #[arg(long, conflicts_with_all = ["n", "t"])]
        params: Option<String>,
        #[arg(long, requires = "t")]
        n: Option<usize>,
        #[arg(long, requires = "n")]
        t: Option<usize>,
    },
    /// Time keygen/sign/verify/sanitize and write a JSON report.
    Bench {
        /// Comma-separated parameter-set names.
        #[arg(long)]
        params: String,
        /// Comma-separated block counts.
        #[arg(long)]
        blocks: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long)]
        seed: Option<String>,
    },
    /// Decode any mcss file and summarize its structure.
    Inspect {
        #[arg(long)]
        file: PathBuf,
    },
}

/// Exit statuses.
#[derive(Debug)]
enum Fail {
    Verify(String),
    NotDecodable(String),
    Malformed(String),
    Usage(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Verify(_) => 1,
            Fail::NotDecodable(_) => 2,
            Fail::Malformed(_) => 3,
            Fail::Usage(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Verify(m) | Fail::NotDecodable(m) | Fail::Malformed(m) | Fail::Usage(m) => m,
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::NotDecodable => Fail::NotDecodable(e.to_string()),
            Error::UnknownParams(_) | Error::InvalidInput(_) => Fail::Usage(e.to_string()),
            _ => Fail::Malformed(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mcss: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cmd: Command) -> CmdResult {
    match cmd {
        Command::Keygen { params, out, seed } => keygen(&params, &out, seed.as_deref()),
        Command::Sign { pk, sk, input, adm, out, seed, test_oracle } => {
            sign(&pk, &sk, &input, &adm, &out, seed.as_deref(), test_oracle)
        }
        Command::Verify { pk, input, sig, test_oracle } => verify(&pk, &input, &sig, test_oracle),
        Command::Sanitize { pk, sankey, orig, new, sig, out, test_oracle } => {
            sanitize(&pk, &sankey, &orig, &new, &sig, &out, test_oracle)
        }
        Command::Analyze { what, params, n, t } => analyze(what, params.as_deref(), n, t),
        Command::Bench { params, blocks, out, runs, seed } => {
            bench(&params, &blocks, &out, runs, seed.as_deref())
        }
        Command::Inspect { file } => inspect(&file),
    }
}

/// Deterministic stream from `--seed`, OS entropy otherwise.
fn make_rng(seed: Option<&str>) -> Result<ChaCha20Rng, Fail> {
    let Some(hex_seed) = seed else {
        return Ok(ChaCha20Rng::from_entropy());
    };
    let bytes = hex::decode(hex_seed).map_err(|e| Fail::Usage(format!("--seed: {e}")))?;
    let mut xof = Shake256::default();
    xof.update(b"mcss/cli-seed");
    xof.update(&bytes);
    let mut key = [0u8; 32];
    xof.finalize_xof().read(&mut key);
    Ok(ChaCha20Rng::from_seed(key))
}

fn read(path: &Path) -> Result<Vec<u8>, Fail> {
    fs::read(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CmdResult {
    fs::write(path, bytes).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn params_by_name(name: &str) -> Result<CodeParams, Fail> {
    CodeParams::by_name(name).map_err(|_| {
        let names: Vec<_> = CodeParams::ALL.iter().map(|p| p.name).collect();
        Fail::Usage(format!("unknown parameter set '{name}' (expected one of {})", names.join(", ")))
    })
}

fn oracle_for(params: &CodeParams, test_oracle: Option<TestOracle>) -> Box<dyn DigestOracle> {
    match test_oracle {
        Some(TestOracle::Identity) => {
            eprintln!("WARNING: identity digest selected. Collisions can be forged without any trapdoor.");
            eprintln!("WARNING: for testing only; never use these signatures in production.");
            Box::new(IdentityOracle)
        }
        None => Box::new(Sha3Oracle::new(params)),
    }
}

fn check_same_params(what: &str, a: &CodeParams, b: &CodeParams) -> CmdResult {
    if a != b {
        return Err(Fail::Malformed(format!("{what} uses '{}', public key uses '{}'", a.name, b.name)));
    }
    Ok(())
}

fn keygen(params: &str, out: &Path, seed: Option<&str>) -> CmdResult {
    let params = params_by_name(params)?;
    let mut rng = make_rng(seed)?;
    let keys = sss::keygen(params, &OUTER, &mut rng)?;
    fs::create_dir_all(out).map_err(|e| Fail::Usage(format!("{}: {e}", out.display())))?;
    write(&out.join("pk.mcss"), &codec::encode_public_key(&keys.public))?;
    write(&out.join("signer.sk"), &codec::encode_signer_key(&keys.signer))?;
    write(&out.join("sanitizer.sk"), &codec::encode_sanitizer_key(&keys.sanitizer))?;
    write(&out.join("escrow.sk"), &codec::encode_escrow(&keys.escrow))?;
    println!("wrote {} keys to {}", params.name, out.display());
    Ok(())
}

fn parse_adm(csv: &str, blocks: usize) -> Result<AdmMask, Fail> {
    let flags = csv
        .split(',')
        .map(|s| match s.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(Fail::Usage(format!("--adm: expected 0 or 1, found '{other}'"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if flags.len() != blocks {
        return Err(Fail::Usage(format!("--adm has {} entries but the message has {blocks} blocks", flags.len())));
    }
    Ok(AdmMask(flags))
}

fn sign(
    pk: &Path,
    sk: &Path,
    input: &Path,
    adm: &str,
    out: &Path,
    seed: Option<&str>,
    test_oracle: Option<TestOracle>,
) -> CmdResult {
    let pk = codec::decode_public_key(&read(pk)?, &OUTER)?;
    let sk = codec::decode_signer_key(&read(sk)?, &OUTER)?;
    check_same_params("signer key", &sk.params, &pk.params)?;
    let msg = message::to_blocks(&read(input)?, pk.params.k);
    let adm = parse_adm(adm, msg.len())?;
    let oracle = oracle_for(&pk.params, test_oracle);
    let mut rng = make_rng(seed)?;
    let sig = sss::sign(&sk, &pk, &OUTER, oracle.as_ref(), &msg, &adm, &mut rng)?;
    write(out, &codec::encode_signature(&pk.params, &sig))?;
    println!("signed {} blocks", msg.len());
    Ok(())
}

fn verify(pk: &Path, input: &Path, sig: &Path, test_oracle: Option<TestOracle>) -> CmdResult {
    let pk = codec::decode_public_key(&read(pk)?, &OUTER)?;
    let (params, sig) = match codec::decode_signature(&read(sig)?, &OUTER) {
        Ok(s) => s,
        Err(Error::WeightMismatch { expected, found }) => {
            println!("WeightCheck");
            return Err(Fail::Verify(format!("randomizer weight {found}, expected {expected}")));
        }
        Err(e) => return Err(e.into()),
    };
    check_same_params("signature", &params, &pk.params)?;
    let msg = message::to_blocks(&read(input)?, pk.params.k);
    let oracle = oracle_for(&pk.params, test_oracle);
    match sss::verify(&pk, &OUTER, oracle.as_ref(), &msg, &sig) {
        Verdict::Accept => {
            println!("OK");
            Ok(())
        }
        Verdict::Reject(reason) => {
            println!("{reason}");
            Err(Fail::Verify(format!("signature rejected: {reason}")))
        }
    }
}

fn sanitize(
    pk: &Path,
    sankey: &Path,
    orig: &Path,
    new: &Path,
    sig: &Path,
    out: &Path,
    test_oracle: Option<TestOracle>,
) -> CmdResult {
    let pk = codec::decode_public_key(&read(pk)?, &OUTER)?;
    let key = codec::decode_sanitizer_key(&read(sankey)?)?;
    check_same_params("sanitizer key", key.secret.params(), &pk.params)?;
    let (params, sig) = codec::decode_signature(&read(sig)?, &OUTER)?;
    check_same_params("signature", &params, &pk.params)?;
    let msg = message::to_blocks(&read(orig)?, pk.params.k);
    let msg_new = message::to_blocks(&read(new)?, pk.params.k);
    if msg_new.len() != msg.len() {
        return Err(Fail::Usage(format!(
            "new message has {} blocks, original has {}",
            msg_new.len(),
            msg.len()
        )));
    }
    let oracle = oracle_for(&pk.params, test_oracle);
    let sanitized = sss::sanitize(&key, &pk, &OUTER, oracle.as_ref(), &msg, &sig, &msg_new)
        .map_err(|e| match e {
            SanitizeError::NotDecodable { .. } | SanitizeError::WeightMismatch { .. } => {
                Fail::NotDecodable(e.to_string())
            }
            SanitizeError::InvalidInput(_) | SanitizeError::Internal(_) => Fail::Verify(e.to_string()),
        })?;
    write(out, &codec::encode_signature(&pk.params, &sanitized))?;
    let changed = (0..msg.len()).filter(|&i| msg.blocks()[i] != msg_new.blocks()[i]).count();
    println!("sanitized {changed} of {} blocks", msg.len());
    Ok(())
}

fn print_ratio(label: &str, r: &ExactRatio) {
    println!("{label} = {r}");
    println!("{label} ~ {}", r.to_decimal(12));
    if r.to_f64() < 1e-6 {
        println!("{label} ~ {}", r.to_scientific(6));
    }
}

fn analyze(what: What, params: Option<&str>, n: Option<usize>, t: Option<usize>) -> CmdResult {
    let params = params.map(params_by_name).transpose()?;
    let (n, t) = match (params, n, t) {
        (Some(p), _, _) => (p.n, p.t),
        (None, Some(n), Some(t)) => (n, t),
        _ => return Err(Fail::Usage("give --params NAME or both --n and --t".into())),
    };
    match what {
        What::Delta => print_ratio(&format!("delta(n={n}, t={t})"), &delta_exact(n, t)?),
        What::Ratio => print_ratio(&format!("ratio(n={n}, t={t})"), &weight_ratio(n, t)?),
        What::Density => {
            let p = params.ok_or_else(|| Fail::Usage("density needs --params (k is required)".into()))?;
            print_ratio(&format!("density({})", p.name), &decodable_density(&p));
        }
    }
    Ok(())
}

fn parse_list<T>(csv: &str, flag: &str, f: impl Fn(&str) -> Result<T, Fail>) -> Result<Vec<T>, Fail> {
    let items: Vec<T> = csv.split(',').map(|s| f(s.trim())).collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(Fail::Usage(format!("--{flag} is empty")));
    }
    Ok(items)
}

fn bench(params: &str, blocks: &str, out: &Path, runs: usize, seed: Option<&str>) -> CmdResult {
    let params = parse_list(params, "params", params_by_name)?;
    let blocks = parse_list(blocks, "blocks", |s| match s.parse::<usize>() {
        Ok(l) if l > 0 => Ok(l),
        _ => Err(Fail::Usage(format!("--blocks: '{s}' is not a positive integer"))),
    })?;
    let mut rng = make_rng(seed)?;
    let records = bench_run(&params, &blocks, runs, &mut rng)?;
    let report = serde_json::json!({
        "outer_signer": "simulated-dilithium2",
        "sanitize_digest": "identity",
        "records": records,
    });
    let text = serde_json::to_string_pretty(&report).expect("serializable");
    write(out, text.as_bytes())?;
    print!("{}", render_table(&records));
    Ok(())
}

fn inspect(file: &Path) -> CmdResult {
    let bytes = read(file)?;
    let header = codec::read_header(&bytes)?;
    let p = header.params;
    println!("kind: {}", header.kind.label());
    println!("params: {p}");
    println!("size: {} bytes ({} payload)", bytes.len(), bytes.len() - codec::HEADER_BYTES);
    match header.kind {
        Kind::PublicKey => {
            let pk = codec::decode_public_key(&bytes, &OUTER)?;
            println!("outer public key: {} bytes ({})", pk.outer_pk.len(), OUTER.name());
            for (label, m) in [("non", &pk.non.hpub), ("san", &pk.san.hpub)] {
                println!("{label} Hpub: {}x{}, rank {}", m.rows(), m.cols(), m.rank());
            }
        }
        Kind::SignerKey => {
            let sk = codec::decode_signer_key(&bytes, &OUTER)?;
            println!("outer secret key: {} bytes ({})", sk.outer_sk.len(), OUTER.name());
        }
        Kind::SanitizerKey => {
            let key = codec::decode_sanitizer_key(&bytes)?;
            let code = &key.secret.code;
            println!("permutation: {} entries", key.secret.perm.len());
            println!("scrambler inverse: {0}x{0}", key.secret.s_inv.rows());
            println!("goppa polynomial: degree {}, irreducible", p.t);
            println!("support: {} distinct elements of GF(2^{})", code.support().len(), p.m);
        }
        Kind::Signature => {
            let (_, sig) = codec::decode_signature(&bytes, &OUTER)?;
            let adm: Vec<&str> = sig.adm.0.iter().map(|&a| if a { "1" } else { "0" }).collect();
            println!("blocks: {}", sig.randomizers.len());
            println!("adm: {}", adm.join(","));
            println!("h_L: {}", hex::encode(sig.h_l.to_bytes()));
            println!("randomizer weights: all {}", p.t);
            println!("outer signature: {} bytes", sig.outer_sig.len());
        }
    }
    Ok(())
}
