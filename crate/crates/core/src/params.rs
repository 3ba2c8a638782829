use std::fmt;

use crate::error::Error;

/// A binary Goppa code parameter set `[n, k]` over GF(2^m) correcting `t`
/// errors, with `k = n - m * t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeParams {
    pub name: &'static str,
    /// Wire identifier, the index into [`CodeParams::ALL`].
    pub id: u8,
    pub m: u32,
    pub n: usize,
    pub k: usize,
    pub t: usize,
}

impl CodeParams {
    pub const NANO: CodeParams = CodeParams { name: "nano", id: 0, m: 5, n: 32, k: 22, t: 2 };
    pub const TOY: CodeParams = CodeParams { name: "toy", id: 1, m: 8, n: 256, k: 128, t: 16 };
    /// Length 512 with t = 32 forces m = 9 and hence k = 224.
    pub const BENCHMARK: CodeParams =
        CodeParams { name: "benchmark", id: 2, m: 9, n: 512, k: 224, t: 32 };
    pub const MEDIUM: CodeParams =
        CodeParams { name: "medium", id: 3, m: 10, n: 1024, k: 524, t: 50 };
    pub const SECURE: CodeParams =
        CodeParams { name: "secure", id: 4, m: 12, n: 3488, k: 2720, t: 64 };

    pub const ALL: [CodeParams; 5] =
        [Self::NANO, Self::TOY, Self::BENCHMARK, Self::MEDIUM, Self::SECURE];

    pub fn by_name(name: &str) -> Result<CodeParams, Error> {
        Self::ALL
            .iter()
            .find(|p| p.name.eq_ignore_ascii_case(name))
            .copied()
            .ok_or_else(|| Error::UnknownParams(name.to_string()))
    }

    pub fn by_id(id: u8) -> Result<CodeParams, Error> {
        Self::ALL
            .get(id as usize)
            .copied()
            .ok_or_else(|| Error::UnknownParams(format!("id {id}")))
    }

    /// `n - k`, the syndrome and chain-digest length in bits.
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    pub fn n_bytes(&self) -> usize {
        self.n / 8
    }

    pub fn redundancy_bytes(&self) -> usize {
        self.redundancy().div_ceil(8)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let ok = self.m >= 3
            && self.m <= 16
            && self.t >= 1
            && self.n <= 1usize << self.m
            && self.n % 8 == 0
            && self.m as usize * self.t < self.n
            && self.k == self.n - self.m as usize * self.t;
        if ok {
            Ok(())
        } else {
            Err(Error::UnknownParams(format!("{self} is inconsistent")))
        }
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(m={}, n={}, k={}, t={})", self.name, self.m, self.n, self.k, self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_consistent() {
        for (i, p) in CodeParams::ALL.iter().enumerate() {
            p.validate().unwrap();
            assert_eq!(p.id as usize, i);
            assert_eq!(CodeParams::by_name(p.name).unwrap(), *p);
            assert_eq!(CodeParams::by_id(p.id).unwrap(), *p);
        }
        assert!(CodeParams::by_name("huge").is_err());
        assert!(CodeParams::by_id(5).is_err());
    }

    #[test]
    fn published_dimensions() {
        assert_eq!((CodeParams::TOY.n, CodeParams::TOY.k, CodeParams::TOY.t), (256, 128, 16));
        assert_eq!((CodeParams::MEDIUM.n, CodeParams::MEDIUM.k, CodeParams::MEDIUM.t), (1024, 524, 50));
        assert_eq!((CodeParams::SECURE.n, CodeParams::SECURE.k, CodeParams::SECURE.t), (3488, 2720, 64));
        assert_eq!(CodeParams::SECURE.redundancy(), 768);
        assert_eq!(CodeParams::NANO.redundancy(), 10);
    }

    #[test]
    fn inconsistent_benchmark_row_rejected() {
        let bad = CodeParams { k: 256, ..CodeParams::BENCHMARK };
        assert!(bad.validate().is_err());
    }
}
