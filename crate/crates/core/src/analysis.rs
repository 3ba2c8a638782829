//! Exact transparency/density figures and the randomizer-distribution trial.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::chameleon::{sample_randomizer, IdentityOracle, Randomizer, Sha3Oracle, DigestOracle};
use crate::error::Error;
use crate::params::CodeParams;
use crate::sss::{keygen, sanitize, sign, AdmMask, BlockMessage, SanitizeError, SimulatedDilithium2};
use crate::testkit::identity_rewrite;

/// A rational with positive denominator, kept in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactRatio(BigRational);

impl ExactRatio {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, Error> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(ExactRatio(BigRational::new(numer.into(), denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn one_minus(&self) -> Self {
        ExactRatio(BigRational::one() - &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal expansion rounded half-up to `digits` fractional digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let neg = self.0.is_negative();
        let abs = self.0.abs();
        let (q, r) = (abs.numer() * &scale).div_rem(abs.denom());
        let scaled = if r * 2u32 >= *abs.denom() { q + 1u32 } else { q };
        let s = scaled.to_string();
        let s = format!("{s:0>width$}", width = digits + 1);
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg && scaled_nonzero(&s) { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }

    /// `d.ddd...e-X` with `sig` significant digits; exact even for tiny values.
    pub fn to_scientific(&self, sig: usize) -> String {
        let abs = self.0.abs();
        if abs.is_zero() {
            return "0".into();
        }
        let sig = sig.max(1);
        // find exponent e with 10^e <= abs < 10^(e+1)
        let mut e = abs.numer().to_string().len() as i64 - abs.denom().to_string().len() as i64;
        let ten = BigRational::from_integer(BigInt::from(10u32));
        let pow10 = |e: i64| ten.pow(e as i32);
        while pow10(e) > abs {
            e -= 1;
        }
        while pow10(e + 1) <= abs {
            e += 1;
        }
        let mantissa = ExactRatio(abs / pow10(e)).to_decimal(sig - 1);
        // rounding can carry to 10.0...
        let (mantissa, e) = if mantissa.starts_with("10") {
            (ExactRatio(BigRational::one()).to_decimal(sig - 1), e + 1)
        } else {
            (mantissa, e)
        };
        let sign = if self.0.is_negative() { "-" } else { "" };
        format!("{sign}{mantissa}e{e}")
    }
}

fn scaled_nonzero(s: &str) -> bool {
    s.bytes().any(|b| b != b'0')
}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// `C(n, 0), ..., C(n, t)`.
fn binomials(n: usize, t: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(t + 1);
    let mut c = BigUint::one();
    out.push(c.clone());
    for j in 0..t {
        c = c * BigUint::from(n - j) / BigUint::from(j + 1);
        out.push(c.clone());
    }
    out
}

fn check_nt(n: usize, t: usize) -> Result<(), Error> {
    if t > n {
        return Err(Error::InvalidInput(format!("t = {t} exceeds n = {n}")));
    }
    Ok(())
}

/// `C(n,t) / sum_{j<=t} C(n,j)`.
pub fn weight_ratio(n: usize, t: usize) -> Result<ExactRatio, Error> {
    check_nt(n, t)?;
    let b = binomials(n, t);
    let sum: BigUint = b.iter().sum();
    ExactRatio::new(BigInt::from(b[t].clone()), BigInt::from(sum))
}

/// `1 - C(n,t) / sum_{j<=t} C(n,j)`: the mass a relaxed (weight `<= t`)
/// decoder would put off the weight-`t` sphere.
pub fn delta_exact(n: usize, t: usize) -> Result<ExactRatio, Error> {
    Ok(weight_ratio(n, t)?.one_minus())
}

/// Fraction of syndromes within the decoding radius.
pub fn decodable_density(params: &CodeParams) -> ExactRatio {
    let sum: BigUint = binomials(params.n, params.t).into_iter().sum();
    let space = BigUint::one() << params.redundancy();
    ExactRatio::new(BigInt::from(sum), BigInt::from(space)).expect("nonzero")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialOracle {
    /// SHA-3 digest; sanitizations succeed only on decodable targets.
    Genuine,
    /// Linear digest with constructed rewrites; test use only.
    Identity,
}

/// One pool of weight-`t` vectors: weight histogram plus per-position counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RandomizerPool {
    pub weights: BTreeMap<usize, u64>,
    pub ones: Vec<u64>,
    pub draws: u64,
}

impl RandomizerPool {
    fn new(n: usize) -> Self {
        RandomizerPool { weights: BTreeMap::new(), ones: vec![0; n], draws: 0 }
    }

    pub fn add(&mut self, r: &Randomizer) {
        *self.weights.entry(r.weight()).or_default() += 1;
        for j in r.0.ones() {
            self.ones[j] += 1;
        }
        self.draws += 1;
    }

    pub fn is_point_mass_at(&self, t: usize) -> bool {
        self.draws > 0 && self.weights.len() == 1 && self.weights.contains_key(&t)
    }

    /// Per-position z-scores against the uniform rate `t/n`.
    pub fn z_scores(&self, t: usize) -> Vec<f64> {
        let n = self.ones.len() as f64;
        let p = t as f64 / n;
        let mean = self.draws as f64 * p;
        let sd = (self.draws as f64 * p * (1.0 - p)).sqrt();
        self.ones.iter().map(|&c| if sd > 0.0 { (c as f64 - mean) / sd } else { 0.0 }).collect()
    }

    pub fn max_abs_z(&self, t: usize) -> f64 {
        self.z_scores(t).into_iter().fold(0.0, |m, z| m.max(z.abs()))
    }
}

#[derive(Clone, Debug)]
pub struct TransparencyReport {
    pub params: CodeParams,
    pub oracle: TrialOracle,
    pub fresh: RandomizerPool,
    pub sanitized: RandomizerPool,
    pub attempts: u64,
    pub not_decodable: u64,
}

impl TransparencyReport {
    pub fn success_rate(&self) -> f64 {
        self.sanitized.draws as f64 / self.attempts.max(1) as f64
    }
}

impl fmt::Display for TransparencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.params.t;
        writeln!(f, "params {} oracle {:?}", self.params.name, self.oracle)?;
        writeln!(
            f,
            "sanitize attempts {}  successes {}  not decodable {}",
            self.attempts, self.sanitized.draws, self.not_decodable
        )?;
        for (label, pool) in [("fresh", &self.fresh), ("sanitized", &self.sanitized)] {
            writeln!(
                f,
                "{label:>9}: draws {:>7}  weights {:?}  max |z| {:.2}",
                pool.draws,
                pool.weights,
                pool.max_abs_z(t)
            )?;
        }
        Ok(())
    }
}

/// Pools randomizers of fresh signatures (topped up with direct sampler
/// draws to `fresh_draws`) and of sanitized blocks until `successes`
/// sanitizations have gone through.
pub fn transparency_trial<R: Rng + ?Sized>(
    params: CodeParams,
    blocks: usize,
    successes: u64,
    fresh_draws: u64,
    oracle: TrialOracle,
    rng: &mut R,
) -> Result<TransparencyReport, Error> {
    if blocks == 0 {
        return Err(Error::InvalidInput("need at least one block".into()));
    }
    let outer = SimulatedDilithium2;
    let keys = keygen(params, &outer, rng)?;
    let sha3 = Sha3Oracle::new(&params);
    let digest: &dyn DigestOracle = match oracle {
        TrialOracle::Genuine => &sha3,
        TrialOracle::Identity => &IdentityOracle,
    };
    let adm = AdmMask(vec![true; blocks]);
    let mut report = TransparencyReport {
        params,
        oracle,
        fresh: RandomizerPool::new(params.n),
        sanitized: RandomizerPool::new(params.n),
        attempts: 0,
        not_decodable: 0,
    };
    let cap = successes.saturating_mul(50).max(100);
    while report.sanitized.draws < successes {
        if report.attempts >= cap {
            return Err(Error::Internal(format!(
                "only {} of {successes} sanitizations succeeded in {cap} attempts",
                report.sanitized.draws
            )));
        }
        report.attempts += 1;
        let msg = BlockMessage::random(params.k, blocks, rng);
        let sig = sign(&keys.signer, &keys.public, &outer, digest, &msg, &adm, rng)?;
        for r in &sig.randomizers {
            report.fresh.add(r);
        }
        let i = rng.gen_range(0..blocks);
        let msg_new = match oracle {
            TrialOracle::Genuine => {
                msg.with_block(i, BlockMessage::random(params.k, 1, rng).blocks()[0].clone())?
            }
            TrialOracle::Identity => identity_rewrite(&keys.public, &msg, &sig, i, rng)?,
        };
        match sanitize(&keys.sanitizer, &keys.public, &outer, digest, &msg, &sig, &msg_new) {
            Ok(s) => report.sanitized.add(&s.randomizers[i]),
            Err(SanitizeError::NotDecodable { .. } | SanitizeError::WeightMismatch { .. }) => {
                report.not_decodable += 1
            }
            Err(e) => return Err(Error::Internal(e.to_string())),
        }
    }
    while report.fresh.draws < fresh_draws {
        report.fresh.add(&sample_randomizer(&params, rng));
    }
    Ok(report)
}
