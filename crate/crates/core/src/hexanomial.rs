//! The hexanomial family
//! f(x) = x(Ax^2 + Bx^q + Cx^{2q}) + x^2(Dx^q + Ex^{2q}) + x^{3q}
//! and its univariate rendering.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// The coefficient tuple (A, B, C, D, E).
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Coeffs {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
    pub e: Elem,
}

impl Coeffs {
    pub fn new(a: Elem, b: Elem, c: Elem, d: Elem, e: Elem) -> Coeffs {
        Coeffs { a, b, c, d, e }
    }

    pub fn from_bits(v: [u32; 5]) -> Coeffs {
        Coeffs::new(Elem(v[0]), Elem(v[1]), Elem(v[2]), Elem(v[3]), Elem(v[4]))
    }

    pub fn as_array(&self) -> [Elem; 5] {
        [self.a, self.b, self.c, self.d, self.e]
    }

    /// Position in the lexicographic enumeration of GF(q^2)^5 (A most significant).
    pub fn index(&self, field: &Field) -> u64 {
        let n = field.size();
        self.as_array()
            .iter()
            .fold(0u64, |acc, z| acc * n + z.0 as u64)
    }

    pub fn from_index(field: &Field, mut idx: u64) -> Coeffs {
        let n = field.size();
        let mut v = [0u32; 5];
        for slot in v.iter_mut().rev() {
            *slot = (idx % n) as u32;
            idx /= n;
        }
        Coeffs::from_bits(v)
    }

    pub fn is_valid(&self, field: &Field) -> bool {
        self.as_array().iter().all(|&z| field.contains(z))
    }

    /// Comma-separated power notation, e.g. `a^23,a^23,a^47,a^25,a^29`.
    pub fn format(&self, field: &Field) -> String {
        self.as_array()
            .iter()
            .map(|&z| field.format_power(z))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parse five comma-separated elements, optionally wrapped in parentheses.
    pub fn parse(field: &Field, s: &str) -> Result<Coeffs> {
        let t = s.trim();
        let t = t
            .strip_prefix('(')
            .and_then(|u| u.strip_suffix(')'))
            .unwrap_or(t);
        let parts: Vec<&str> = t.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::Invalid(format!(
                "expected 5 comma-separated coefficients, got `{s}`"
            )));
        }
        let mut v = [Elem::ZERO; 5];
        for (slot, p) in v.iter_mut().zip(parts) {
            *slot = field.parse_elem(p)?;
        }
        Ok(Coeffs::new(v[0], v[1], v[2], v[3], v[4]))
    }

    /// Coefficients of f(λx), which is again a member of the family only up to the
    /// leading x^{3q} coefficient λ^{3q}; returned together with that scale.
    pub fn input_scaled(&self, field: &Field, lambda: Elem) -> (Coeffs, Elem) {
        let q = field.q();
        let s = |k: Elem, e: u64| field.mul(k, field.pow(lambda, e));
        (
            Coeffs::new(
                s(self.a, 3),
                s(self.b, q + 1),
                s(self.c, 2 * q + 1),
                s(self.d, q + 2),
                s(self.e, 2 * q + 2),
            ),
            field.pow(lambda, 3 * q),
        )
    }
}

/// Exponents of the six monomials, in the order A, B, C, D, E, leading term.
pub fn exponents(q: u64) -> [u64; 6] {
    [3, q + 1, 2 * q + 1, q + 2, 2 * q + 2, 3 * q]
}

/// Exact value of f at x.
pub fn evaluate(field: &Field, c: &Coeffs, x: Elem) -> Elem {
    let xq = field.frobenius_q(x);
    let x2 = field.square(x);
    let x2q = field.square(xq);
    let inner1 = field.mul(c.a, x2) + field.mul(c.b, xq) + field.mul(c.c, x2q);
    let inner2 = field.mul(c.d, xq) + field.mul(c.e, x2q);
    field.mul(x, inner1) + field.mul(x2, inner2) + field.mul(xq, x2q)
}

/// Batch evaluator; for fields of at most 256 elements it caches
/// `v * x^e` for every coefficient slot, so a full value table is five XORs per point.
pub struct Evaluator<'f> {
    field: &'f Field,
    mono: [Vec<Elem>; 6],
    scaled: Option<Vec<u32>>,
}

impl<'f> Evaluator<'f> {
    pub fn new(field: &'f Field) -> Evaluator<'f> {
        let exps = exponents(field.q());
        let mono = exps.map(|e| {
            field
                .elements()
                .map(|x| field.pow(x, e))
                .collect::<Vec<_>>()
        });
        let n = field.len();
        let scaled = (field.size() <= 256).then(|| {
            let mut t = vec![0u32; 5 * n * n];
            for slot in 0..5 {
                for v in 0..n {
                    for x in 0..n {
                        t[(slot * n + v) * n + x] = field.mul(Elem(v as u32), mono[slot][x]).0;
                    }
                }
            }
            t
        });
        Evaluator {
            field,
            mono,
            scaled,
        }
    }

    pub fn field(&self) -> &'f Field {
        self.field
    }

    /// Fill `out` with f(x) for every x, indexed by the bits of x.
    pub fn table_into(&self, c: &Coeffs, out: &mut Vec<u32>) {
        let n = self.field.len();
        out.clear();
        out.extend(self.mono[5].iter().map(|z| z.0));
        let coeffs = c.as_array();
        match &self.scaled {
            Some(t) => {
                for (slot, k) in coeffs.iter().enumerate() {
                    if k.is_zero() {
                        continue;
                    }
                    let row = &t[(slot * n + k.0 as usize) * n..][..n];
                    for (o, v) in out.iter_mut().zip(row) {
                        *o ^= v;
                    }
                }
            }
            None => {
                for (slot, k) in coeffs.iter().enumerate() {
                    if k.is_zero() {
                        continue;
                    }
                    for (o, m) in out.iter_mut().zip(&self.mono[slot]) {
                        *o ^= self.field.mul(*k, *m).0;
                    }
                }
            }
        }
    }

    pub fn table(&self, c: &Coeffs) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.field.len());
        self.table_into(c, &mut out);
        out
    }
}

/// Value table of f over all of GF(q^2).
pub fn value_table(field: &Field, c: &Coeffs) -> Vec<u32> {
    field.elements().map(|x| evaluate(field, c, x).0).collect()
}

// ---------------------------------------------------------------------------

/// A univariate polynomial with distinct exponents and no zero coefficients,
/// stored in ascending exponent order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnivariateForm {
    pub terms: Vec<(u64, Elem)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoeffStyle {
    /// `a^k` relative to the generator.
    #[default]
    Power,
    /// Basis polynomial in a, e.g. `(a^3 + a + 1)`.
    Basis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TermOrder {
    #[default]
    Descending,
    Ascending,
}

impl UnivariateForm {
    pub fn from_terms(
        field: &Field,
        terms: impl IntoIterator<Item = (u64, Elem)>,
    ) -> UnivariateForm {
        let _ = field;
        let mut map: BTreeMap<u64, Elem> = BTreeMap::new();
        for (e, k) in terms {
            *map.entry(e).or_default() += k;
        }
        UnivariateForm {
            terms: map.into_iter().filter(|(_, k)| !k.is_zero()).collect(),
        }
    }

    pub fn coefficient(&self, e: u64) -> Elem {
        self.terms
            .iter()
            .find(|(x, _)| *x == e)
            .map(|t| t.1)
            .unwrap_or_default()
    }

    pub fn eval(&self, field: &Field, x: Elem) -> Elem {
        self.terms.iter().fold(Elem::ZERO, |acc, &(e, k)| {
            acc + field.mul(k, field.pow(x, e))
        })
    }

    pub fn format(&self, field: &Field, style: CoeffStyle, order: TermOrder) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(e, k)| format_term(field, k, e, style))
            .collect();
        if order == TermOrder::Descending {
            parts.reverse();
        }
        parts.join(" + ")
    }

    /// Descending terms with `a^k` coefficients, as written in the CSV tables.
    pub fn power_string(&self, field: &Field) -> String {
        self.format(field, CoeffStyle::Power, TermOrder::Descending)
    }

    /// Parse `coef x^e` terms joined by `+`. Accepts LaTeX braces (`x^{12}`), missing
    /// spaces (`ax^{3}`) and parenthesised basis coefficients.
    pub fn parse(field: &Field, s: &str) -> Result<UnivariateForm> {
        let bad = || Error::Invalid(format!("malformed polynomial `{s}`"));
        let mut terms = Vec::new();
        for term in split_top_level(s) {
            let term = term.trim();
            if term.is_empty() {
                return Err(bad());
            }
            let (coef, exp) = match term.find('x') {
                Some(i) => {
                    let rest = term[i + 1..].trim();
                    let e = if rest.is_empty() {
                        1
                    } else {
                        let r = rest.strip_prefix('^').ok_or_else(bad)?.trim();
                        r.trim_start_matches('{')
                            .trim_end_matches('}')
                            .trim()
                            .parse()
                            .map_err(|_| bad())?
                    };
                    (term[..i].trim(), e)
                }
                None => (term, 0),
            };
            let k = if coef.is_empty() {
                Elem::ONE
            } else {
                field.parse_elem(coef).map_err(Error::from)?
            };
            terms.push((exp, k));
        }
        Ok(UnivariateForm::from_terms(field, terms))
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            '+' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn format_term(field: &Field, k: Elem, e: u64, style: CoeffStyle) -> String {
    let mono = match e {
        0 => String::new(),
        1 => "x".into(),
        _ => format!("x^{e}"),
    };
    let coef = match style {
        CoeffStyle::Power => field.format_power(k),
        CoeffStyle::Basis => {
            let b = field.format_basis(k);
            if b.contains('+') {
                format!("({b})")
            } else {
                b
            }
        }
    };
    match (coef.as_str(), mono.is_empty()) {
        (_, true) => coef,
        ("1", false) => mono,
        _ => format!("{coef} {mono}"),
    }
}

/// Collision-merged univariate rendering of f.
pub fn to_univariate(field: &Field, c: &Coeffs) -> UnivariateForm {
    let exps = exponents(field.q());
    let coefs = [c.a, c.b, c.c, c.d, c.e, Elem::ONE];
    UnivariateForm::from_terms(field, exps.into_iter().zip(coefs))
}

/// Groups of coefficient slots whose exponents coincide for this q
/// (slots 0..5 are A..E, slot 5 the leading 1).
pub fn exponent_collisions(q: u64) -> Vec<Vec<usize>> {
    let exps = exponents(q);
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (slot, e) in exps.iter().enumerate() {
        groups.entry(*e).or_default().push(slot);
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

impl fmt::Display for UnivariateForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, k)| format!("{:#x}*x^{e}", k.0))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn gf(spec: FieldSpec) -> Field {
        Field::new(spec).unwrap()
    }

    #[test]
    fn evaluate_at_zero_and_one() {
        let k = gf(FieldSpec::F16);
        let c = Coeffs::from_bits([3, 7, 9, 1, 14]);
        assert_eq!(evaluate(&k, &c, Elem::ZERO), Elem::ZERO);
        let sum = c.a + c.b + c.c + c.d + c.e + Elem::ONE;
        assert_eq!(evaluate(&k, &c, Elem::ONE), sum);
    }

    #[test]
    fn evaluate_f4_example() {
        let k = gf(FieldSpec::F4);
        let a = k.generator();
        let c = Coeffs::new(a, Elem::ZERO, Elem::ZERO, Elem::ZERO, a);
        // a*a^3 + a*a^6 + a^6 = a + a + 1
        assert_eq!(evaluate(&k, &c, a), Elem::ONE);
    }

    #[test]
    fn univariate_table_rows() {
        let k = gf(FieldSpec::F4);
        let a = k.generator();
        let c = Coeffs::new(a, Elem::ZERO, Elem::ZERO, Elem::ZERO, a);
        let u = to_univariate(&k, &c);
        assert_eq!(
            u,
            UnivariateForm::parse(&k, "a^{2} x^{6} + a x^{3}").unwrap()
        );
        assert_eq!(
            u.format(&k, CoeffStyle::Power, TermOrder::Descending),
            "a^2 x^6 + a x^3"
        );

        let k16 = gf(FieldSpec::F16);
        let a = k16.generator();
        let c = Coeffs::new(a, Elem::ZERO, Elem::ZERO, a, Elem::ZERO);
        let u = to_univariate(&k16, &c);
        assert_eq!(
            u,
            UnivariateForm::parse(&k16, "x^{12} + a x^{6} + a x^{3}").unwrap()
        );

        let c = Coeffs::new(Elem::ONE, Elem(2), Elem::ZERO, Elem::ONE, Elem::ONE);
        let u = to_univariate(&k, &c);
        assert_eq!(u.terms, vec![(3, Elem(3)), (4, Elem::ONE)]);
        assert_eq!(
            u.format(&k, CoeffStyle::Basis, TermOrder::Ascending),
            "(a + 1) x^3 + x^4"
        );
    }

    #[test]
    fn collisions_only_at_q2() {
        assert_eq!(exponent_collisions(2), vec![vec![0, 1], vec![4, 5]]);
        for q in [4u64, 8, 16, 32] {
            assert!(exponent_collisions(q).is_empty());
        }
    }

    #[test]
    fn evaluator_matches_direct_evaluation() {
        for spec in [FieldSpec::F4, FieldSpec::F16, FieldSpec::F64] {
            let k = gf(spec);
            let ev = Evaluator::new(&k);
            for i in 0..50u32 {
                let n = k.size() as u32;
                let c = Coeffs::from_bits([
                    i % n,
                    (i * 7 + 1) % n,
                    (i * 13) % n,
                    (i * 3 + 2) % n,
                    (i * 11 + 5) % n,
                ]);
                assert_eq!(ev.table(&c), value_table(&k, &c));
            }
        }
    }

    #[test]
    fn parses_latex_q4_rows() {
        let k = gf(FieldSpec::F16);
        let u = UnivariateForm::parse(
            &k,
            "ax^{3} + ax^{5} + (a^2 + a + 1)x^{6} + a^2x^{10} + x^{12}",
        )
        .unwrap();
        assert_eq!(u.coefficient(6), Elem(0b111));
        assert_eq!(u.coefficient(10), Elem(0b100));
        assert_eq!(u.coefficient(12), Elem::ONE);
        assert_eq!(u.terms.len(), 5);
    }

    #[test]
    fn tuple_text_round_trip() {
        let k = gf(FieldSpec::F64);
        let c = Coeffs::parse(&k, "a^23,a^23,a^47,a^25,a^29").unwrap();
        assert_eq!(c.format(&k), "a^23,a^23,a^47,a^25,a^29");
        assert_eq!(Coeffs::from_index(&k, c.index(&k)), c);
        assert!(Coeffs::parse(&k, "a,0,0").is_err());
    }
}
