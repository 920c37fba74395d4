//! Arithmetic in GF(2^{2m}) in polynomial basis.
//!
//! Elements are stored little-endian: bit `i` is the coefficient of `x^i`.
//! Fields with `2m <= 16` get log/antilog tables built from a verified
//! generator; larger fields fall back to carry-less shift-and-reduce.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::FieldError;

/// Largest extension degree `2m` accepted.
pub const MAX_DEGREE: u32 = 32;
const TABLE_DEGREE_LIMIT: u32 = 16;

/// An element of GF(2^{2m}) in polynomial-basis coordinates.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

// Characteristic 2: addition is XOR.
impl std::ops::Add for Elem {
    type Output = Elem;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Elem) -> Elem {
        Elem(self.0 ^ rhs.0)
    }
}

impl std::ops::AddAssign for Elem {
    #[inline]
    #[allow(clippy::suspicious_op_assign_impl)]
    fn add_assign(&mut self, rhs: Elem) {
        self.0 ^= rhs.0;
    }
}

/// Degree and modulus of a binary extension field GF(2^{2m}).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    /// `q = 2^m`; the field is GF(q^2).
    pub m: u32,
    /// Irreducible polynomial of degree `2m`, bit `i` = coefficient of `x^i`.
    pub modulus: u64,
}

impl FieldSpec {
    pub const F4: FieldSpec = FieldSpec { m: 1, modulus: 0x7 };
    pub const F16: FieldSpec = FieldSpec {
        m: 2,
        modulus: 0x13,
    };
    pub const F64: FieldSpec = FieldSpec {
        m: 3,
        modulus: 0x5B,
    };
    pub const F256: FieldSpec = FieldSpec {
        m: 4,
        modulus: 0x11D,
    };

    pub fn new(m: u32, modulus: u64) -> FieldSpec {
        FieldSpec { m, modulus }
    }

    pub fn degree(&self) -> u32 {
        2 * self.m
    }

    /// The four built-in fields, in increasing size.
    pub fn named() -> [(&'static str, FieldSpec); 4] {
        [
            ("F4", Self::F4),
            ("F16", Self::F16),
            ("F64", Self::F64),
            ("F256", Self::F256),
        ]
    }

    /// Short alias if this is one of the built-in fields.
    pub fn alias(&self) -> Option<&'static str> {
        Self::named()
            .into_iter()
            .find(|(_, s)| s == self)
            .map(|(n, _)| n)
    }

    fn check_shape(&self) -> Result<(), FieldError> {
        let n = self.degree();
        if self.m == 0 || n > MAX_DEGREE {
            return Err(FieldError::BadDegree(n));
        }
        if self.modulus >> n != 1 || self.modulus & 1 == 0 {
            return Err(FieldError::MalformedModulus {
                degree: n,
                modulus: self.modulus,
            });
        }
        Ok(())
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gf2:{}:{:#x}", self.degree(), self.modulus)
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    /// Accepts `gf2:<2m>:<modulus-hex>` or one of the aliases `F4`, `F16`, `F64`, `F256`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((_, spec)) = Self::named()
            .into_iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(s))
        {
            return Ok(spec);
        }
        let bad = || FieldError::BadSpec(s.to_string());
        let mut parts = s.split(':');
        if parts.next() != Some("gf2") {
            return Err(bad());
        }
        let n: u32 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let hex = parts.next().ok_or_else(bad)?;
        if parts.next().is_some() || !n.is_multiple_of(2) {
            return Err(bad());
        }
        let hex = hex.trim_start_matches("0x").trim_start_matches("0X");
        let modulus = u64::from_str_radix(hex, 16).map_err(|_| bad())?;
        let spec = FieldSpec { m: n / 2, modulus };
        spec.check_shape()?;
        Ok(spec)
    }
}

// ---------------------------------------------------------------------------
// GF(2)[x] helpers on machine words.

fn clmul(a: u64, b: u64) -> u128 {
    let mut r = 0u128;
    let a = a as u128;
    let mut b = b;
    let mut i = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a << i;
        }
        b >>= 1;
        i += 1;
    }
    r
}

fn poly_deg(p: u128) -> i32 {
    127 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u128, m: u128) -> u128 {
    let dm = poly_deg(m);
    while a != 0 && poly_deg(a) >= dm {
        a ^= m << (poly_deg(a) - dm);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    poly_rem(clmul(a, b), m as u128) as u64
}

/// x^(2^k) mod m.
fn x_pow_2k(k: u32, m: u64) -> u64 {
    let mut r = poly_rem(0b10, m as u128) as u64;
    for _ in 0..k {
        r = mulmod(r, r, m);
    }
    r
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test.
fn is_irreducible(modulus: u64, n: u32) -> bool {
    if x_pow_2k(n, modulus) != 0b10 {
        return false;
    }
    prime_factors(n as u64).into_iter().all(|p| {
        let h = x_pow_2k(n / p as u32, modulus) ^ 0b10;
        poly_gcd(modulus as u128, h as u128) == 1
    })
}

fn smallest_factor(modulus: u64, n: u32) -> u64 {
    for d in 1..=n / 2 {
        for low in 0..(1u64 << d) {
            let cand = (1u64 << d) | low;
            if poly_rem(modulus as u128, cand as u128) == 0 {
                return cand;
            }
        }
    }
    modulus
}

/// Render a GF(2)[x] polynomial such as `x^2 + 1`.
pub fn format_gf2_poly(p: u64) -> String {
    if p == 0 {
        return "0".into();
    }
    let mut terms = Vec::new();
    for i in (0..64).rev() {
        if p >> i & 1 == 1 {
            terms.push(match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            });
        }
    }
    terms.join(" + ")
}

// ---------------------------------------------------------------------------

/// Immutable arithmetic context for GF(q^2), q = 2^m.
#[derive(Clone, Debug)]
pub struct Field {
    spec: FieldSpec,
    n: u32,
    size: u64,
    generator: Elem,
    x_is_primitive: bool,
    trace_mask: u32,
    // Populated only when 2m <= 16.
    log: Vec<u32>,
    exp: Vec<u32>,
    frob: Vec<u32>,
}

impl Field {
    /// Build the context, verifying irreducibility of the modulus and locating a generator.
    pub fn new(spec: FieldSpec) -> Result<Field, FieldError> {
        spec.check_shape()?;
        let n = spec.degree();
        if !is_irreducible(spec.modulus, n) {
            let factor = smallest_factor(spec.modulus, n);
            return Err(FieldError::Reducible {
                modulus: spec.modulus,
                factor,
                rendered: format_gf2_poly(factor),
            });
        }
        let mut field = Field {
            spec,
            n,
            size: 1u64 << n,
            generator: Elem(0b10),
            x_is_primitive: false,
            trace_mask: 0,
            log: Vec::new(),
            exp: Vec::new(),
            frob: Vec::new(),
        };
        field.x_is_primitive = field.is_primitive(Elem(0b10));
        if !field.x_is_primitive {
            let g = (2..field.size)
                .map(|v| Elem(v as u32))
                .find(|&g| field.is_primitive(g))
                .expect("multiplicative group of a finite field is cyclic");
            field.generator = g;
        }
        let mut mask = 0u32;
        for i in 0..n {
            if field.abs_trace_slow(Elem(1 << i)) {
                mask |= 1 << i;
            }
        }
        field.trace_mask = mask;
        if n <= TABLE_DEGREE_LIMIT {
            field.build_tables();
        }
        Ok(field)
    }

    fn build_tables(&mut self) {
        let order = (self.size - 1) as usize;
        let mut exp = vec![0u32; 2 * order];
        let mut log = vec![0u32; self.size as usize];
        let mut v = 1u64;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            *slot = v as u32;
            log[v as usize] = i as u32;
            v = mulmod(v, self.generator.0 as u64, self.spec.modulus);
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        self.exp = exp;
        self.log = log;
        let m = self.spec.m;
        self.frob = (0..self.size)
            .map(|z| {
                let mut r = z;
                for _ in 0..m {
                    r = mulmod(r, r, self.spec.modulus);
                }
                r as u32
            })
            .collect();
    }

    fn is_primitive(&self, g: Elem) -> bool {
        if g.is_zero() {
            return false;
        }
        let order = self.size - 1;
        prime_factors(order)
            .into_iter()
            .all(|p| self.pow_slow(g, order / p) != Elem::ONE)
    }

    fn pow_slow(&self, base: Elem, mut e: u64) -> Elem {
        let mut r = 1u64;
        let mut b = base.0 as u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, b, self.spec.modulus);
            }
            b = mulmod(b, b, self.spec.modulus);
            e >>= 1;
        }
        Elem(r as u32)
    }

    fn abs_trace_slow(&self, z: Elem) -> bool {
        let mut acc = 0u64;
        let mut t = z.0 as u64;
        for _ in 0..self.n {
            acc ^= t;
            t = mulmod(t, t, self.spec.modulus);
        }
        debug_assert!(acc <= 1);
        acc == 1
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// m, where q = 2^m.
    pub fn m(&self) -> u32 {
        self.spec.m
    }

    /// q = 2^m, the size of the subfield fixed by `frobenius_q`.
    pub fn q(&self) -> u64 {
        1u64 << self.spec.m
    }

    /// Extension degree over GF(2), i.e. 2m.
    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Number of elements, q^2.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Number of elements as a `usize`; only meaningful for table-sized fields.
    pub fn len(&self) -> usize {
        self.size as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn has_tables(&self) -> bool {
        !self.log.is_empty()
    }

    /// Verified generator of the multiplicative group; the class of x for all built-in fields.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn x_is_primitive(&self) -> bool {
        self.x_is_primitive
    }

    pub fn contains(&self, z: Elem) -> bool {
        (z.0 as u64) < self.size
    }

    /// All elements in increasing bit order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.size).map(|v| Elem(v as u32))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.0 == 0 || b.0 == 0 {
            return Elem::ZERO;
        }
        if self.has_tables() {
            let i = self.log[a.0 as usize] + self.log[b.0 as usize];
            Elem(self.exp[i as usize])
        } else {
            Elem(mulmod(a.0 as u64, b.0 as u64, self.spec.modulus) as u32)
        }
    }

    #[inline]
    pub fn square(&self, a: Elem) -> Elem {
        self.mul(a, a)
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return Elem::ONE;
        }
        if a.is_zero() {
            return Elem::ZERO;
        }
        if self.has_tables() {
            let order = self.size - 1;
            let l = (self.log[a.0 as usize] as u64 * (e % order)) % order;
            Elem(self.exp[l as usize])
        } else {
            self.pow_slow(a, e)
        }
    }

    /// generator^k.
    pub fn gen_pow(&self, k: u64) -> Elem {
        self.pow(self.generator, k)
    }

    /// Discrete log base the generator; `None` for zero.
    pub fn log(&self, a: Elem) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        if self.has_tables() {
            return Some(self.log[a.0 as usize] as u64);
        }
        let mut v = Elem::ONE;
        for k in 0..self.size - 1 {
            if v == a {
                return Some(k);
            }
            v = self.mul(v, self.generator);
        }
        None
    }

    pub fn inv(&self, a: Elem) -> Result<Elem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroDivisor("inverse of 0"));
        }
        if self.has_tables() {
            let order = (self.size - 1) as u32;
            let l = self.log[a.0 as usize];
            return Ok(Elem(self.exp[((order - l) % order) as usize]));
        }
        Ok(self.pow_slow(a, self.size - 2))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// z^q, the relative Frobenius of GF(q^2)/GF(q).
    #[inline]
    pub fn frobenius_q(&self, z: Elem) -> Elem {
        if self.has_tables() {
            return Elem(self.frob[z.0 as usize]);
        }
        let mut r = z;
        for _ in 0..self.spec.m {
            r = self.square(r);
        }
        r
    }

    /// Square root in characteristic 2: z^(2^(2m-1)).
    pub fn sqrt(&self, z: Elem) -> Elem {
        let mut r = z;
        for _ in 0..self.n - 1 {
            r = self.square(r);
        }
        r
    }

    /// Relative trace and norm to GF(q): (z + z^q, z * z^q).
    pub fn trace_norm_rel(&self, z: Elem) -> (Elem, Elem) {
        let zq = self.frobenius_q(z);
        (z + zq, self.mul(z, zq))
    }

    /// Absolute trace to GF(2).
    #[inline]
    pub fn abs_trace(&self, z: Elem) -> u32 {
        (z.0 & self.trace_mask).count_ones() & 1
    }

    /// Bit mask `t` with Tr(z) = parity(z & t).
    pub fn trace_mask(&self) -> u32 {
        self.trace_mask
    }

    pub fn in_subfield(&self, z: Elem) -> bool {
        self.frobenius_q(z) == z
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, z: Elem) -> Result<u64, FieldError> {
        if z.is_zero() {
            return Err(FieldError::ZeroDivisor("order of 0"));
        }
        let mut order = self.size - 1;
        for p in prime_factors(self.size - 1) {
            while order.is_multiple_of(p) && self.pow(z, order / p) == Elem::ONE {
                order /= p;
            }
        }
        Ok(order)
    }

    // --- text formats -----------------------------------------------------

    /// `0`, `1`, `a` or `a^k` relative to the generator.
    pub fn format_power(&self, z: Elem) -> String {
        match self.log(z) {
            None => "0".into(),
            Some(0) => "1".into(),
            Some(1) => "a".into(),
            Some(k) => format!("a^{k}"),
        }
    }

    /// Basis notation such as `a^3 + a + 1` (the generator's polynomial basis when it is x).
    pub fn format_basis(&self, z: Elem) -> String {
        if z.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for i in (0..self.n).rev() {
            if z.0 >> i & 1 == 1 {
                terms.push(match i {
                    0 => "1".to_string(),
                    1 => "a".to_string(),
                    _ => format!("a^{i}"),
                });
            }
        }
        terms.join(" + ")
    }

    pub fn format_hex(&self, z: Elem) -> String {
        format!("{:#x}", z.0)
    }

    /// Parse an element: `0x..` hex, bare hex digits, `a`, `a^k` (also `a^{k}`),
    /// or a `+`-separated sum of those, optionally parenthesised.
    pub fn parse_elem(&self, s: &str) -> Result<Elem, FieldError> {
        let t = s.trim();
        let t = t
            .strip_prefix('(')
            .and_then(|u| u.strip_suffix(')'))
            .unwrap_or(t);
        let bad = || FieldError::BadElement(s.to_string());
        if t.is_empty() {
            return Err(bad());
        }
        let mut acc = Elem::ZERO;
        for term in t.split('+') {
            let term = term.trim();
            let v = if let Some(rest) = term.strip_prefix('a') {
                let rest = rest.trim();
                if rest.is_empty() {
                    self.generator
                } else {
                    let k = rest.strip_prefix('^').ok_or_else(bad)?.trim();
                    let k = k.trim_start_matches('{').trim_end_matches('}');
                    let k: u64 = k.parse().map_err(|_| bad())?;
                    self.gen_pow(k)
                }
            } else {
                let h = term.trim_start_matches("0x").trim_start_matches("0X");
                let v = u64::from_str_radix(h, 16).map_err(|_| bad())?;
                if v >= self.size {
                    return Err(FieldError::OutOfRange {
                        value: v,
                        size: self.size,
                    });
                }
                Elem(v as u32)
            };
            acc += v;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(spec: FieldSpec) -> Field {
        Field::new(spec).unwrap()
    }

    #[test]
    fn gf4_basics() {
        let k = f(FieldSpec::F4);
        let a = Elem(2);
        assert_eq!(k.mul(a, a), Elem(3));
        assert_eq!(k.mul(a, Elem(3)), Elem::ONE);
        assert_eq!(k.inv(Elem::ONE).unwrap(), Elem::ONE);
        assert_eq!(k.inv(a).unwrap(), Elem(3));
        assert_eq!(k.frobenius_q(a), Elem(3));
        assert_eq!(k.sqrt(Elem(3)), a);
        assert_eq!(k.trace_norm_rel(a), (Elem::ONE, Elem::ONE));
        assert_eq!(k.mult_order(a).unwrap(), 3);
        assert!(k.x_is_primitive());
    }

    #[test]
    fn gf16_frobenius_and_inverse() {
        let k = f(FieldSpec::F16);
        let a = Elem(2);
        assert_eq!(k.frobenius_q(a), Elem(3));
        assert_eq!(k.mul(k.inv(a).unwrap(), a), Elem::ONE);
    }

    #[test]
    fn named_moduli_have_primitive_x() {
        for (_, spec) in FieldSpec::named() {
            let k = f(spec);
            assert!(k.x_is_primitive());
            assert_eq!(k.mult_order(Elem(2)).unwrap(), k.size() - 1);
        }
        assert_eq!(f(FieldSpec::F64).mult_order(Elem(2)).unwrap(), 63);
        assert_eq!(f(FieldSpec::F256).mult_order(Elem(2)).unwrap(), 255);
    }

    #[test]
    fn reducible_modulus_names_factor() {
        let err = Field::new(FieldSpec::new(1, 0x5)).unwrap_err();
        match err {
            FieldError::Reducible { factor, .. } => assert_eq!(factor, 0b11),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn malformed_modulus_rejected() {
        assert!(matches!(
            Field::new(FieldSpec::new(2, 0x12)),
            Err(FieldError::MalformedModulus { .. })
        ));
        assert!(matches!(
            Field::new(FieldSpec::new(2, 0x3)),
            Err(FieldError::MalformedModulus { .. })
        ));
    }

    #[test]
    fn zero_has_no_inverse_or_order() {
        let k = f(FieldSpec::F16);
        assert!(k.inv(Elem::ZERO).is_err());
        assert!(k.mult_order(Elem::ZERO).is_err());
        assert_eq!(k.mult_order(Elem::ONE).unwrap(), 1);
    }

    #[test]
    fn non_primitive_x_gets_scanned_generator() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible but x has order 5.
        let k = f(FieldSpec::new(2, 0x1F));
        assert!(!k.x_is_primitive());
        assert_eq!(k.mult_order(Elem(2)).unwrap(), 5);
        assert_eq!(k.mult_order(k.generator()).unwrap(), 15);
    }

    #[test]
    fn spec_strings() {
        assert_eq!("F16".parse::<FieldSpec>().unwrap(), FieldSpec::F16);
        assert_eq!("gf2:4:0x13".parse::<FieldSpec>().unwrap(), FieldSpec::F16);
        assert_eq!("gf2:8:11d".parse::<FieldSpec>().unwrap(), FieldSpec::F256);
        assert_eq!(FieldSpec::F64.to_string(), "gf2:6:0x5b");
        assert!("gf2:5:0x25".parse::<FieldSpec>().is_err());
        assert!("gf3:4:0x13".parse::<FieldSpec>().is_err());
        assert!("gf2:4:0x12".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn element_text_round_trip() {
        let k = f(FieldSpec::F64);
        for z in k.elements() {
            assert_eq!(k.parse_elem(&k.format_power(z)).unwrap(), z);
            assert_eq!(k.parse_elem(&k.format_basis(z)).unwrap(), z);
            assert_eq!(k.parse_elem(&k.format_hex(z)).unwrap(), z);
        }
        assert_eq!(k.parse_elem("a^{23}").unwrap(), k.gen_pow(23));
        assert_eq!(k.parse_elem("(a^3 + a + 1)").unwrap(), Elem(0b1011));
        assert!(k.parse_elem("0x40").is_err());
        assert!(k.parse_elem("b^2").is_err());
    }

    #[test]
    fn large_field_without_tables() {
        // x^20 + x^3 + 1 is irreducible over GF(2).
        let k = f(FieldSpec::new(10, (1 << 20) | 0b1001));
        assert!(!k.has_tables());
        let z = Elem(0xABCDE);
        assert_eq!(k.mul(k.inv(z).unwrap(), z), Elem::ONE);
        assert_eq!(k.square(k.sqrt(z)), z);
        assert_eq!(k.frobenius_q(k.frobenius_q(z)), z);
    }
}
