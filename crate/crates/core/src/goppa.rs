//! Binary irreducible Goppa codes with a Patterson decoder.
//!
//! The secret parity-check matrix has entry `(i, j) = L_j^i / g(L_j)` for
//! `i < t`, each GF(2^m) entry expanded into `m` rows: bit `b` of entry `i`
//! sits in row `i * m + b`.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::binmat::{vec_mat_transpose_mul, BitMatrix, BitVec};
use crate::error::Error;
use crate::gf2m::{
    is_irreducible, poly_eea_partial, random_irreducible, sqrt_mod_g, sqrt_x_mod, Field,
    FieldElement, FieldPoly,
};
use crate::params::CodeParams;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoppaCode {
    params: CodeParams,
    field: Field,
    g: FieldPoly,
    support: Vec<FieldElement>,
    hsec: BitMatrix,
    sqrt_x: FieldPoly,
}

impl GoppaCode {
    /// Samples an irreducible `g` and a uniformly shuffled support.
    pub fn generate<R: Rng + ?Sized>(params: CodeParams, rng: &mut R) -> Result<Self, Error> {
        params.validate()?;
        let field = Field::for_degree(params.m)?;
        let g = random_irreducible(&field, params.t, rng);
        let mut pool: Vec<FieldElement> =
            field.elements().filter(|&a| !g.eval(&field, a).is_zero()).collect();
        if pool.len() < params.n {
            return Err(Error::InvalidInput("not enough non-roots of g for the support".into()));
        }
        pool.shuffle(rng);
        pool.truncate(params.n);
        Self::assemble(params, field, g, pool)
    }

    /// Rebuilds a code from its secret description, checking every invariant.
    pub fn from_parts(
        params: CodeParams,
        g: FieldPoly,
        support: Vec<FieldElement>,
    ) -> Result<Self, Error> {
        params.validate()?;
        let field = Field::for_degree(params.m)?;
        if g.degree() != Some(params.t) || !g.is_monic() {
            return Err(Error::InvalidInput("Goppa polynomial must be monic of degree t".into()));
        }
        if g.coeffs().iter().any(|c| c.value() as usize >= field.order()) {
            return Err(Error::InvalidInput("Goppa coefficient outside the field".into()));
        }
        if !is_irreducible(&field, &g) {
            return Err(Error::InvalidInput("Goppa polynomial is reducible".into()));
        }
        if support.len() != params.n {
            return Err(Error::dims(params.n, support.len()));
        }
        let mut seen = vec![false; field.order()];
        for &a in &support {
            let v = a.value() as usize;
            if v >= field.order() || seen[v] {
                return Err(Error::InvalidInput("support elements must be distinct field elements".into()));
            }
            seen[v] = true;
            if g.eval(&field, a).is_zero() {
                return Err(Error::InvalidInput("support contains a root of g".into()));
            }
        }
        Self::assemble(params, field, g, support)
    }

    fn assemble(
        params: CodeParams,
        field: Field,
        g: FieldPoly,
        support: Vec<FieldElement>,
    ) -> Result<Self, Error> {
        let m = params.m as usize;
        let mut hsec = BitMatrix::zeros(params.redundancy(), params.n);
        for (j, &alpha) in support.iter().enumerate() {
            let mut entry = field.inv(g.eval(&field, alpha))?;
            for i in 0..params.t {
                let v = entry.value();
                for b in 0..m {
                    if v >> b & 1 == 1 {
                        hsec.set(i * m + b, j, true);
                    }
                }
                entry = field.mul(entry, alpha);
            }
        }
        let sqrt_x = sqrt_x_mod(&field, &g);
        Ok(GoppaCode { params, field, g, support, hsec, sqrt_x })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn goppa_poly(&self) -> &FieldPoly {
        &self.g
    }

    pub fn support(&self) -> &[FieldElement] {
        &self.support
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.hsec
    }

    pub fn sqrt_x(&self) -> &FieldPoly {
        &self.sqrt_x
    }

    /// `e * Hsec^T`.
    pub fn syndrome_of(&self, e: &BitVec) -> Result<BitVec, Error> {
        vec_mat_transpose_mul(e, &self.hsec)
    }

    /// Regroups the `m * t` syndrome bits into `t` field coefficients,
    /// inverting the row expansion used for `Hsec`.
    pub fn syndrome_to_poly(&self, s: &BitVec) -> Result<FieldPoly, Error> {
        let m = self.params.m as usize;
        if s.len() != self.params.redundancy() {
            return Err(Error::dims(self.params.redundancy(), s.len()));
        }
        let coeffs = (0..self.params.t)
            .map(|i| {
                let v = (0..m).fold(0u16, |acc, b| acc | (s.get(i * m + b) as u16) << b);
                FieldElement(v)
            })
            .collect();
        Ok(FieldPoly::from_coeffs(coeffs))
    }

    /// Maps the power-sum syndrome `sum_j L_j^i / g(L_j)` onto the Patterson
    /// syndrome `sum_j 1 / (x - L_j) mod g`: coefficient `i` becomes
    /// `sum_{l > i} g_l * s_{l - 1 - i}`.
    fn key_equation_syndrome(&self, power_sums: &FieldPoly) -> FieldPoly {
        let t = self.params.t;
        let coeffs = (0..t)
            .map(|i| {
                (i + 1..=t).fold(FieldElement::ZERO, |acc, l| {
                    acc + self.field.mul(self.g.coeff(l), power_sums.coeff(l - 1 - i))
                })
            })
            .collect();
        FieldPoly::from_coeffs(coeffs)
    }

    fn error_locator(&self, s: &BitVec) -> Result<FieldPoly, Error> {
        let f = &self.field;
        let syndrome = self.key_equation_syndrome(&self.syndrome_to_poly(s)?);
        let inv = syndrome.inv_mod(f, &self.g).map_err(|_| Error::NotDecodable)?;
        let x = FieldPoly::x();
        if inv == x {
            return Ok(x);
        }
        let root = sqrt_mod_g(f, &inv.add(&x), &self.g, &self.sqrt_x);
        let (a, b) = poly_eea_partial(f, &self.g, &root, self.params.t / 2);
        Ok(a.square(f).add(&b.square(f).mul(f, &x)))
    }

    /// Patterson decoding of a syndrome to the unique error of weight at most
    /// `t`, or [`Error::NotDecodable`] when no such error exists.
    pub fn decode(&self, s: &BitVec) -> Result<BitVec, Error> {
        let n = self.params.n;
        if s.len() != self.params.redundancy() {
            return Err(Error::dims(self.params.redundancy(), s.len()));
        }
        if s.is_zero() {
            return Ok(BitVec::zeros(n));
        }
        let sigma = self.error_locator(s)?;
        let degree = match sigma.degree() {
            Some(d) if d >= 1 && d <= self.params.t => d,
            _ => return Err(Error::NotDecodable),
        };
        let mut e = BitVec::zeros(n);
        let mut roots = 0;
        for (j, &alpha) in self.support.iter().enumerate() {
            if sigma.eval(&self.field, alpha).is_zero() {
                e.set(j, true);
                roots += 1;
                if roots > degree {
                    return Err(Error::NotDecodable);
                }
            }
        }
        if roots != degree || self.syndrome_of(&e)? != *s {
            return Err(Error::NotDecodable);
        }
        Ok(e)
    }
}

/// Uniform vector of weight exactly `w` via a partial Fisher-Yates shuffle.
pub fn random_fixed_weight<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> BitVec {
    assert!(w <= n, "weight exceeds length");
    let mut idx: Vec<usize> = (0..n).collect();
    let (chosen, _) = idx.partial_shuffle(rng, w);
    BitVec::from_positions(n, chosen.iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    fn nano(seed: u64) -> GoppaCode {
        GoppaCode::generate(CodeParams::NANO, &mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn invariants_hold() {
        let code = nano(1);
        let f = code.field();
        let distinct: HashSet<_> = code.support().iter().collect();
        assert_eq!(distinct.len(), 32);
        assert!(code.support().iter().all(|&a| !code.goppa_poly().eval(f, a).is_zero()));
        assert_eq!(code.parity_check().rows(), 10);
        assert_eq!(code.parity_check().cols(), 32);
    }

    #[test]
    fn deterministic_under_seed() {
        assert_eq!(nano(42), nano(42));
        assert_ne!(nano(42), nano(43));
    }

    #[test]
    fn nano_weight_two_syndromes_distinct() {
        let code = nano(2);
        let mut seen = HashSet::new();
        seen.insert(code.syndrome_of(&BitVec::zeros(32)).unwrap());
        for i in 0..32 {
            seen.insert(code.syndrome_of(&BitVec::unit(32, i)).unwrap());
            for j in i + 1..32 {
                seen.insert(code.syndrome_of(&BitVec::from_positions(32, [i, j])).unwrap());
            }
        }
        assert_eq!(seen.len(), 529);
    }

    #[test]
    fn toy_parity_check_full_rank() {
        let code = GoppaCode::generate(CodeParams::TOY, &mut ChaCha20Rng::seed_from_u64(3)).unwrap();
        assert_eq!(code.parity_check().rank(), 128);
    }

    #[test]
    fn syndrome_basics() {
        let code = nano(4);
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        assert!(code.syndrome_of(&BitVec::zeros(32)).unwrap().is_zero());
        for j in 0..32 {
            assert_eq!(code.syndrome_of(&BitVec::unit(32, j)).unwrap(), code.parity_check().column(j));
        }
        for _ in 0..100 {
            let a = BitVec::random(32, &mut rng);
            let b = BitVec::random(32, &mut rng);
            let lhs = code.syndrome_of(&a.xor(&b)).unwrap();
            let rhs = code.syndrome_of(&a).unwrap().xor(&code.syndrome_of(&b).unwrap());
            assert_eq!(lhs, rhs);
        }
        assert!(code.syndrome_of(&BitVec::zeros(31)).is_err());
    }

    #[test]
    fn syndrome_to_poly_of_single_error() {
        let code = GoppaCode::generate(CodeParams::TOY, &mut ChaCha20Rng::seed_from_u64(6)).unwrap();
        let f = code.field();
        assert!(code.syndrome_to_poly(&BitVec::zeros(128)).unwrap().is_zero());
        for j in [0usize, 17, 255] {
            let alpha = code.support()[j];
            let inv_g = f.inv(code.goppa_poly().eval(f, alpha)).unwrap();
            let poly = code.syndrome_to_poly(&code.syndrome_of(&BitVec::unit(256, j)).unwrap()).unwrap();
            for i in 0..16 {
                assert_eq!(poly.coeff(i), f.mul(f.pow(alpha, i as u64), inv_g));
            }
        }
    }

    #[test]
    fn syndrome_to_poly_inverts_packing() {
        let code = nano(7);
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        for _ in 0..50 {
            let s = BitVec::random(10, &mut rng);
            let poly = code.syndrome_to_poly(&s).unwrap();
            let mut back = BitVec::zeros(10);
            for i in 0..2 {
                for b in 0..5 {
                    back.set(i * 5 + b, poly.coeff(i).value() >> b & 1 == 1);
                }
            }
            assert_eq!(back, s);
        }
    }

    #[test]
    fn decode_exhaustive_nano() {
        let code = nano(9);
        let mut patterns = vec![BitVec::zeros(32)];
        for i in 0..32 {
            patterns.push(BitVec::unit(32, i));
            for j in i + 1..32 {
                patterns.push(BitVec::from_positions(32, [i, j]));
            }
        }
        assert_eq!(patterns.len(), 529);
        for e in patterns {
            assert_eq!(code.decode(&code.syndrome_of(&e).unwrap()).unwrap(), e);
        }
    }

    #[test]
    fn decode_random_weights() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        for params in [CodeParams::TOY, CodeParams::BENCHMARK] {
            let code = GoppaCode::generate(params, &mut rng).unwrap();
            for trial in 0..200 {
                let w = if trial % 2 == 0 { params.t } else { rng.gen_range(0..=params.t) };
                let e = random_fixed_weight(params.n, w, &mut rng);
                assert_eq!(code.decode(&code.syndrome_of(&e).unwrap()).unwrap(), e);
            }
        }
    }

    #[test]
    fn single_error_at_zero_element() {
        let code = nano(11);
        let j = code.support().iter().position(|a| a.is_zero()).unwrap();
        let e = BitVec::unit(32, j);
        assert_eq!(code.decode(&code.syndrome_of(&e).unwrap()).unwrap(), e);
    }

    #[test]
    fn decode_rejects_beyond_radius() {
        let code = nano(12);
        let mut rng = ChaCha20Rng::seed_from_u64(13);
        for _ in 0..200 {
            let e = random_fixed_weight(32, 3, &mut rng);
            match code.decode(&code.syndrome_of(&e).unwrap()) {
                Err(Error::NotDecodable) => {}
                Ok(found) => {
                    // a different low-weight vector with the same syndrome
                    assert!(found.weight() <= 2);
                    assert_eq!(code.syndrome_of(&found).unwrap(), code.syndrome_of(&e).unwrap());
                }
                Err(other) => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn random_syndrome_success_rate_nano() {
        // expected 529 / 1024
        let code = nano(14);
        let mut rng = ChaCha20Rng::seed_from_u64(15);
        let trials = 4000;
        let ok = (0..trials)
            .filter(|_| code.decode(&BitVec::random(10, &mut rng)).is_ok())
            .count();
        let rate = ok as f64 / trials as f64;
        assert!((rate - 529.0 / 1024.0).abs() < 0.04, "rate {rate}");
    }

    #[test]
    fn from_parts_validation() {
        let code = nano(16);
        let rebuilt =
            GoppaCode::from_parts(CodeParams::NANO, code.goppa_poly().clone(), code.support().to_vec()).unwrap();
        assert_eq!(rebuilt, code);
        let mut dup = code.support().to_vec();
        dup[1] = dup[0];
        assert!(GoppaCode::from_parts(CodeParams::NANO, code.goppa_poly().clone(), dup).is_err());
        let f = code.field();
        let reducible = FieldPoly::from_coeffs(vec![f.element(1).unwrap(), FieldElement::ZERO, FieldElement::ONE]);
        assert!(GoppaCode::from_parts(CodeParams::NANO, reducible, code.support().to_vec()).is_err());
    }

    #[test]
    fn fixed_weight_sampler() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        for w in [0usize, 1, 2, 32] {
            assert_eq!(random_fixed_weight(32, w, &mut rng).weight(), w);
        }
    }
}
