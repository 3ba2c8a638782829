//! Arithmetic in GF(2^m) and in GF(2^m)[x].
//!
//! Elements are bitmasks: coefficient `i` of the binary polynomial lives at
//! bit `i`. Multiplication goes through log/antilog tables built once per
//! field; the tables are derived from a shift-and-reduce multiplier so the
//! two always agree.

use std::fmt;

use rand::Rng;

use crate::error::Error;

/// Smallest supported extension degree.
pub const MIN_DEGREE: u32 = 3;
/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 16;

/// Registry of reduction polynomials, indexed by `m - MIN_DEGREE`.
///
/// m = 12 is the Classic McEliece field polynomial z^12 + z^3 + 1.
const REDUCTION_REGISTRY: [u32; 14] = [
    0b1011,      // 3: x^3 + x + 1
    0x13,        // 4: x^4 + x + 1
    0x25,        // 5: x^5 + x^2 + 1
    0x43,        // 6: x^6 + x + 1
    0x83,        // 7: x^7 + x + 1
    0x11B,       // 8: x^8 + x^4 + x^3 + x + 1
    0x211,       // 9: x^9 + x^4 + 1
    0x409,       // 10: x^10 + x^3 + 1
    0x805,       // 11: x^11 + x^2 + 1
    0x1009,      // 12: x^12 + x^3 + 1
    0x201B,      // 13: x^13 + x^4 + x^3 + x + 1
    0x4443,      // 14: x^14 + x^10 + x^6 + x + 1
    0x8003,      // 15: x^15 + x + 1
    0x1100B,     // 16: x^16 + x^12 + x^3 + x + 1
];

/// Extension degree plus the binary reduction polynomial defining GF(2^m).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldParams {
    m: u32,
    reduction: u32,
}

impl FieldParams {
    /// Registry entry for degree `m`, re-checked for irreducibility.
    pub fn for_degree(m: u32) -> Result<Self, Error> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&m) {
            return Err(Error::UnsupportedField(m));
        }
        Self::new(m, REDUCTION_REGISTRY[(m - MIN_DEGREE) as usize])
    }

    /// Custom field definition; `reduction` must be an irreducible binary
    /// polynomial of degree exactly `m`.
    pub fn new(m: u32, reduction: u32) -> Result<Self, Error> {
        if !(MIN_DEGREE..=MAX_DEGREE).contains(&m) {
            return Err(Error::UnsupportedField(m));
        }
        if binary_degree(reduction) != Some(m) || !binary_is_irreducible(reduction) {
            return Err(Error::ReducibleModulus(reduction));
        }
        Ok(FieldParams { m, reduction })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn reduction(&self) -> u32 {
        self.reduction
    }

    pub fn order(&self) -> usize {
        1usize << self.m
    }
}

fn binary_degree(p: u32) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(31 - p.leading_zeros())
    }
}

fn binary_rem(mut a: u32, b: u32) -> u32 {
    let db = binary_degree(b).expect("nonzero divisor");
    while let Some(da) = binary_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Trial division by every binary polynomial of degree 1..=deg/2.
pub fn binary_is_irreducible(p: u32) -> bool {
    let Some(d) = binary_degree(p) else {
        return false;
    };
    if d == 0 {
        return false;
    }
    let limit = 1u32 << (d / 2 + 1);
    (2..limit).all(|q| binary_rem(p, q) != 0)
}

/// Carry-less multiply followed by reduction. Used to seed the tables and as
/// a cross-check in tests.
pub fn shift_reduce_mul(a: u32, b: u32, params: &FieldParams) -> u32 {
    let m = params.m;
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= params.reduction;
        }
    }
    acc
}

/// An element of GF(2^m), stored as a bitmask below `2^m`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub(crate) u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u16 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

// addition in characteristic 2 is xor
#[allow(clippy::suspicious_arithmetic_impl)]
impl std::ops::Add for FieldElement {
    type Output = FieldElement;

    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl std::ops::AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// GF(2^m) with precomputed log/antilog tables.
#[derive(Clone)]
pub struct Field {
    params: FieldParams,
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").field("params", &self.params).finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(params: FieldParams) -> Self {
        let q = params.order();
        let group = q - 1;
        // The reduction polynomial need not be primitive, so search for a
        // generator of the multiplicative group.
        let generator = (2..q as u32)
            .find(|&g| {
                let mut x = g;
                for k in 1..group {
                    if x == 1 {
                        return k == group;
                    }
                    x = shift_reduce_mul(x, g, &params);
                }
                x == 1
            })
            .expect("multiplicative group of a field is cyclic");

        let mut exp = vec![0u16; 2 * group];
        let mut log = vec![0u16; q];
        let mut x = 1u32;
        for (k, slot) in exp.iter_mut().enumerate().take(group) {
            *slot = x as u16;
            log[x as usize] = k as u16;
            x = shift_reduce_mul(x, generator, &params);
        }
        for k in group..2 * group {
            exp[k] = exp[k - group];
        }
        Field { params, exp, log }
    }

    pub fn for_degree(m: u32) -> Result<Self, Error> {
        Ok(Field::new(FieldParams::for_degree(m)?))
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }

    pub fn m(&self) -> u32 {
        self.params.m
    }

    pub fn order(&self) -> usize {
        self.params.order()
    }

    /// Validating constructor.
    pub fn element(&self, value: u32) -> Result<FieldElement, Error> {
        if (value as usize) < self.order() {
            Ok(FieldElement(value as u16))
        } else {
            Err(Error::ElementOutOfRange { value, m: self.m() })
        }
    }

    /// All field elements in increasing bitmask order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order()).map(|v| FieldElement(v as u16))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.order()) as u16)
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let k = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FieldElement(self.exp[k])
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, Error> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let group = self.order() - 1;
        Ok(FieldElement(self.exp[group - self.log[a.0 as usize] as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, Error> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let group = (self.order() - 1) as u64;
        let k = (self.log[a.0 as usize] as u64 * (e % group)) % group;
        FieldElement(self.exp[k as usize])
    }

    /// Square root, computed as `a^(2^(m-1))`.
    pub fn sqrt(&self, a: FieldElement) -> FieldElement {
        let mut x = a;
        for _ in 1..self.m() {
            x = self.square(x);
        }
        x
    }
}

/// Polynomial over GF(2^m), lowest-degree coefficient first, with no
/// trailing zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FieldPoly {
    coeffs: Vec<FieldElement>,
}

impl FieldPoly {
    pub fn zero() -> Self {
        FieldPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        FieldPoly::constant(FieldElement::ONE)
    }

    pub fn x() -> Self {
        FieldPoly::monomial(FieldElement::ONE, 1)
    }

    pub fn constant(c: FieldElement) -> Self {
        FieldPoly::from_coeffs(vec![c])
    }

    pub fn monomial(c: FieldElement, degree: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; degree + 1];
        coeffs[degree] = c;
        FieldPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(coeffs: Vec<FieldElement>) -> Self {
        let mut p = FieldPoly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// `None` stands for the zero polynomial's degree of minus infinity.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to -1.
    fn deg_i(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FieldElement::ONE)
    }

    pub fn add(&self, other: &FieldPoly) -> FieldPoly {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut coeffs = long.coeffs.clone();
        for (c, &s) in coeffs.iter_mut().zip(&short.coeffs) {
            *c += s;
        }
        FieldPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, field: &Field, c: FieldElement) -> FieldPoly {
        FieldPoly::from_coeffs(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, field: &Field, other: &FieldPoly) -> FieldPoly {
        if self.is_zero() || other.is_zero() {
            return FieldPoly::zero();
        }
        let mut coeffs = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += field.mul(a, b);
            }
        }
        FieldPoly::from_coeffs(coeffs)
    }

    /// Squaring in characteristic 2 only squares coefficients and doubles
    /// exponents.
    pub fn square(&self, field: &Field) -> FieldPoly {
        let Some(d) = self.degree() else {
            return FieldPoly::zero();
        };
        let mut coeffs = vec![FieldElement::ZERO; 2 * d + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = field.square(c);
        }
        FieldPoly::from_coeffs(coeffs)
    }

    pub fn eval(&self, field: &Field, x: FieldElement) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| field.mul(acc, x) + c)
    }

    pub fn divmod(&self, field: &Field, divisor: &FieldPoly) -> Result<(FieldPoly, FieldPoly), Error> {
        let Some(db) = divisor.degree() else {
            return Err(Error::DivisionByZeroPoly);
        };
        let lead_inv = field.inv(divisor.coeffs[db])?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((FieldPoly::zero(), self.clone()));
        }
        let mut quot = vec![FieldElement::ZERO; rem.len() - db];
        for i in (db..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let factor = field.mul(c, lead_inv);
            quot[i - db] = factor;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[i - db + j] += field.mul(factor, d);
            }
        }
        rem.truncate(db);
        Ok((FieldPoly::from_coeffs(quot), FieldPoly::from_coeffs(rem)))
    }

    pub fn rem(&self, field: &Field, divisor: &FieldPoly) -> Result<FieldPoly, Error> {
        Ok(self.divmod(field, divisor)?.1)
    }

    pub fn mul_mod(&self, field: &Field, other: &FieldPoly, modulus: &FieldPoly) -> Result<FieldPoly, Error> {
        self.mul(field, other).rem(field, modulus)
    }

    pub fn square_mod(&self, field: &Field, modulus: &FieldPoly) -> Result<FieldPoly, Error> {
        self.square(field).rem(field, modulus)
    }

    pub fn make_monic(&self, field: &Field) -> FieldPoly {
        match self.leading() {
            None => FieldPoly::zero(),
            Some(c) => self.scale(field, field.inv(c).expect("leading coefficient is nonzero")),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, field: &Field, other: &FieldPoly) -> FieldPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(field, &b).expect("divisor is nonzero");
            a = b;
            b = r;
        }
        a.make_monic(field)
    }

    /// Inverse modulo `modulus` via the extended Euclidean algorithm.
    pub fn inv_mod(&self, field: &Field, modulus: &FieldPoly) -> Result<FieldPoly, Error> {
        let a = self.rem(field, modulus)?;
        if a.is_zero() {
            return Err(Error::NotInvertibleMod);
        }
        let mut r0 = modulus.clone();
        let mut r1 = a;
        let mut u0 = FieldPoly::zero();
        let mut u1 = FieldPoly::one();
        while r1.deg_i() > 0 {
            let (q, r) = r0.divmod(field, &r1)?;
            let u2 = u0.add(&q.mul(field, &u1));
            r0 = r1;
            r1 = r;
            u0 = u1;
            u1 = u2;
        }
        match r1.leading() {
            Some(c) => u1.scale(field, field.inv(c)?).rem(field, modulus),
            None => Err(Error::NotInvertibleMod),
        }
    }
}

/// Runs the Euclidean remainder sequence on `(g, r)` and stops at the first
/// remainder of degree at most `stop_deg`. Returns `(a, b)` with
/// `a = b * r (mod g)`, `deg a <= stop_deg`, `deg b <= deg g - 1 - stop_deg`.
pub fn poly_eea_partial(
    field: &Field,
    g: &FieldPoly,
    r: &FieldPoly,
    stop_deg: usize,
) -> (FieldPoly, FieldPoly) {
    let mut r0 = g.clone();
    let mut r1 = r.clone();
    let mut u0 = FieldPoly::zero();
    let mut u1 = FieldPoly::one();
    while r1.deg_i() > stop_deg as isize {
        let (q, rem) = r0.divmod(field, &r1).expect("r1 is nonzero inside the loop");
        let u2 = u0.add(&q.mul(field, &u1));
        r0 = r1;
        r1 = rem;
        u0 = u1;
        u1 = u2;
    }
    (r1, u1)
}

/// `x^(2^(m*deg g - 1)) mod g`, the square root of `x` in GF(2^m)[x]/(g).
pub fn sqrt_x_mod(field: &Field, g: &FieldPoly) -> FieldPoly {
    let t = g.degree().expect("modulus is nonzero");
    let mut acc = FieldPoly::x().rem(field, g).expect("nonzero modulus");
    for _ in 1..(field.m() as usize * t) {
        acc = acc.square_mod(field, g).expect("nonzero modulus");
    }
    acc
}

/// Square root modulo an irreducible `g`: split `t = te^2 + x * to^2`,
/// return `te + sqrt_x * to`.
pub fn sqrt_mod_g(field: &Field, t: &FieldPoly, g: &FieldPoly, sqrt_x: &FieldPoly) -> FieldPoly {
    let half = t.coeffs().len().div_ceil(2);
    let mut even = Vec::with_capacity(half);
    let mut odd = Vec::with_capacity(half);
    for (i, &c) in t.coeffs().iter().enumerate() {
        let root = field.sqrt(c);
        if i % 2 == 0 {
            even.push(root);
        } else {
            odd.push(root);
        }
    }
    let even = FieldPoly::from_coeffs(even);
    let odd = FieldPoly::from_coeffs(odd);
    even.add(&sqrt_x.mul_mod(field, &odd, g).expect("nonzero modulus"))
        .rem(field, g)
        .expect("nonzero modulus")
}

/// Ben-Or irreducibility test: `g` of degree `d` is irreducible iff
/// `gcd(x^(q^i) - x, g) = 1` for every `1 <= i <= d/2`, with `q = 2^m`.
pub fn is_irreducible(field: &Field, g: &FieldPoly) -> bool {
    let Some(d) = g.degree() else {
        return false;
    };
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    let g = g.make_monic(field);
    let x = FieldPoly::x();
    let mut h = x.clone();
    for _ in 1..=d / 2 {
        for _ in 0..field.m() {
            h = h.square_mod(field, &g).expect("nonzero modulus");
        }
        if g.gcd(field, &h.add(&x)).degree() != Some(0) {
            return false;
        }
    }
    true
}

/// Rejection-samples a monic irreducible polynomial of degree `t`.
pub fn random_irreducible<R: Rng + ?Sized>(field: &Field, t: usize, rng: &mut R) -> FieldPoly {
    assert!(t >= 1, "degree must be positive");
    loop {
        let mut coeffs: Vec<FieldElement> = (0..t).map(|_| field.random(rng)).collect();
        coeffs.push(FieldElement::ONE);
        let candidate = FieldPoly::from_coeffs(coeffs);
        if is_irreducible(field, &candidate) {
            return candidate;
        }
    }
}
