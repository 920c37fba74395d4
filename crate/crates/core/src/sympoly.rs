//! Sparse polynomials over GF(q^2) in X0, X1, Z0, Z1, the variety system attached to a
//! hexanomial, bivariate gcd and resultants in Z0, and rational-point scans.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, GateError, Result};
use crate::field::{Elem, Field};
use crate::hexanomial::Coeffs;
use crate::theory;

/// Exponent vector (eX0, eX1, eZ0, eZ1).
pub type Exps = [u8; 4];

pub const X0: usize = 0;
pub const X1: usize = 1;
pub const Z0: usize = 2;
pub const Z1: usize = 3;
pub const VAR_NAMES: [&str; 4] = ["X0", "X1", "Z0", "Z1"];

/// Sparse polynomial; keys ordered lexicographically with X0 > X1 > Z0 > Z1.
#[derive(Clone)]
pub struct MPoly<'f> {
    field: &'f Field,
    terms: BTreeMap<Exps, Elem>,
}

impl PartialEq for MPoly<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.field.spec() == other.field.spec() && self.terms == other.terms
    }
}

impl Eq for MPoly<'_> {}

impl fmt::Debug for MPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

impl fmt::Display for MPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = (0..4)
                    .filter(|&i| e[i] > 0)
                    .map(|i| {
                        if e[i] == 1 {
                            VAR_NAMES[i].to_string()
                        } else {
                            format!("{}^{}", VAR_NAMES[i], e[i])
                        }
                    })
                    .collect();
                let coef = self.field.format_power(*c);
                match (coef.as_str(), mono.is_empty()) {
                    (_, true) => coef,
                    ("1", false) => mono.join("*"),
                    _ => format!("{coef}*{}", mono.join("*")),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn add_exps(a: &Exps, b: &Exps) -> Exps {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn total(e: &Exps) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

impl<'f> MPoly<'f> {
    pub fn zero(field: &'f Field) -> MPoly<'f> {
        MPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &'f Field, c: Elem) -> MPoly<'f> {
        MPoly::monomial(field, c, [0; 4])
    }

    pub fn one(field: &'f Field) -> MPoly<'f> {
        MPoly::constant(field, Elem::ONE)
    }

    pub fn var(field: &'f Field, i: usize) -> MPoly<'f> {
        let mut e = [0; 4];
        e[i] = 1;
        MPoly::monomial(field, Elem::ONE, e)
    }

    pub fn monomial(field: &'f Field, c: Elem, e: Exps) -> MPoly<'f> {
        let mut p = MPoly::zero(field);
        p.add_term(e, c);
        p
    }

    pub fn from_terms(
        field: &'f Field,
        terms: impl IntoIterator<Item = (Exps, Elem)>,
    ) -> MPoly<'f> {
        let mut p = MPoly::zero(field);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exps, c: Elem) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn field(&self) -> &'f Field {
        self.field
    }

    pub fn terms(&self) -> &BTreeMap<Exps, Elem> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: Exps) -> Elem {
        self.terms.get(&e).copied().unwrap_or_default()
    }

    fn same_field(&self, o: &MPoly<'_>) -> Result<()> {
        if self.field.spec() != o.field.spec() {
            return Err(Error::MixedFields(
                self.field.spec().to_string(),
                o.field.spec().to_string(),
            ));
        }
        Ok(())
    }

    pub fn checked_add(&self, o: &MPoly<'_>) -> Result<MPoly<'f>> {
        self.same_field(o)?;
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, *c);
        }
        Ok(r)
    }

    pub fn checked_mul(&self, o: &MPoly<'_>) -> Result<MPoly<'f>> {
        self.same_field(o)?;
        let mut r = MPoly::zero(self.field);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                r.add_term(add_exps(ea, eb), self.field.mul(*ca, *cb));
            }
        }
        Ok(r)
    }

    pub fn scale(&self, c: Elem) -> MPoly<'f> {
        MPoly::from_terms(
            self.field,
            self.terms.iter().map(|(e, x)| (*e, self.field.mul(*x, c))),
        )
    }

    /// Multiply by a monomial with coefficient 1.
    pub fn shift(&self, e: Exps) -> MPoly<'f> {
        MPoly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (add_exps(k, &e), *c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> MPoly<'f> {
        let mut r = MPoly::one(self.field);
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    /// Squaring in characteristic 2: square every coefficient and double every exponent.
    pub fn square(&self) -> MPoly<'f> {
        MPoly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.map(|x| 2 * x), self.field.square(*c)))
                .collect(),
        }
    }

    pub fn eval(&self, point: &[Elem; 4]) -> Elem {
        let k = self.field;
        self.terms.iter().fold(Elem::ZERO, |acc, (e, c)| {
            let mut v = *c;
            for i in 0..4 {
                if e[i] > 0 {
                    v = k.mul(v, k.pow(point[i], e[i] as u64));
                }
            }
            acc + v
        })
    }

    /// Replace variable `var` by `by`.
    pub fn substitute(&self, var: usize, by: &MPoly<'f>) -> MPoly<'f> {
        let mut powers: Vec<MPoly<'f>> = vec![MPoly::one(self.field)];
        let mut r = MPoly::zero(self.field);
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            while powers.len() <= k {
                let next = &powers[powers.len() - 1] * by;
                powers.push(next);
            }
            let mut rest = *e;
            rest[var] = 0;
            let t = powers[k].shift(rest).scale(*c);
            for (e2, c2) in t.terms {
                r.add_term(e2, c2);
            }
        }
        r
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(total).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u8> {
        self.terms.keys().map(|e| e[var]).max()
    }

    pub fn is_free_of(&self, var: usize) -> bool {
        self.terms.keys().all(|e| e[var] == 0)
    }

    pub fn homogeneous_part(&self, d: u32) -> MPoly<'f> {
        MPoly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| total(e) == d)
                .map(|(e, c)| (*e, *c))
                .collect(),
        }
    }

    /// The nonzero homogeneous part of least degree (zero for the zero polynomial).
    pub fn lowest_part(&self) -> MPoly<'f> {
        match self.terms.keys().map(total).min() {
            Some(d) => self.homogeneous_part(d),
            None => self.clone(),
        }
    }

    /// Coefficient of var^k, as a polynomial free of var.
    pub fn coeff_in(&self, var: usize, k: u8) -> MPoly<'f> {
        MPoly {
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e[var] == k)
                .map(|(e, c)| {
                    let mut e = *e;
                    e[var] = 0;
                    (e, *c)
                })
                .collect(),
        }
    }

    fn leading(&self) -> Option<(Exps, Elem)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, *c))
    }

    /// Exact quotient, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly<'f>) -> Option<MPoly<'f>> {
        let (ed, cd) = d.leading()?;
        let inv = self.field.inv(cd).ok()?;
        let mut r = self.clone();
        let mut q = MPoly::zero(self.field);
        while let Some((er, cr)) = r.leading() {
            if (0..4).any(|i| er[i] < ed[i]) {
                return None;
            }
            let e = [er[0] - ed[0], er[1] - ed[1], er[2] - ed[2], er[3] - ed[3]];
            let c = self.field.mul(cr, inv);
            q.add_term(e, c);
            for (e2, c2) in d.shift(e).scale(c).terms {
                r.add_term(e2, c2);
            }
        }
        Some(q)
    }

    /// The involution phi: q-th power on coefficients, X0 <-> X1, Z0 <-> Z1.
    pub fn phi(&self) -> MPoly<'f> {
        MPoly::from_terms(
            self.field,
            self.terms
                .iter()
                .map(|(e, c)| ([e[1], e[0], e[3], e[2]], self.field.frobenius_q(*c))),
        )
    }

    /// One term per line, `eX0 eX1 eZ0 eZ1 coeff-hex`, ascending.
    pub fn dump(&self) -> String {
        self.terms
            .iter()
            .map(|(e, c)| format!("{} {} {} {} {:#x}\n", e[0], e[1], e[2], e[3], c.0))
            .collect()
    }

    pub fn parse_dump(field: &'f Field, s: &str) -> Result<MPoly<'f>> {
        let mut p = MPoly::zero(field);
        for line in s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Invalid(format!("bad polynomial dump line `{line}`"));
            if f.len() != 5 {
                return Err(bad());
            }
            let mut e = [0u8; 4];
            for i in 0..4 {
                e[i] = f[i].parse().map_err(|_| bad())?;
            }
            p.add_term(e, field.parse_elem(f[4])?);
        }
        Ok(p)
    }
}

impl<'f> Add for &MPoly<'f> {
    type Output = MPoly<'f>;

    /// Panics when the operands live over different fields; see `checked_add`.
    fn add(self, o: &MPoly<'f>) -> MPoly<'f> {
        self.checked_add(o).expect("polynomials over one field")
    }
}

impl<'f> Mul for &MPoly<'f> {
    type Output = MPoly<'f>;

    /// Panics when the operands live over different fields; see `checked_mul`.
    fn mul(self, o: &MPoly<'f>) -> MPoly<'f> {
        self.checked_mul(o).expect("polynomials over one field")
    }
}

// ---------------------------------------------------------------------------
// Dense univariate polynomials in Z1, used for gcd and resultants in Z0.

type UPoly = Vec<Elem>;

fn u_trim(mut a: UPoly) -> UPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn u_add(a: &[Elem], b: &[Elem]) -> UPoly {
    let mut r = vec![Elem::ZERO; a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        r[i] += *c;
    }
    for (i, c) in b.iter().enumerate() {
        r[i] += *c;
    }
    u_trim(r)
}

fn u_mul(k: &Field, a: &[Elem], b: &[Elem]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![Elem::ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += k.mul(*x, *y);
        }
    }
    u_trim(r)
}

fn u_divrem(k: &Field, a: &[Elem], b: &[Elem]) -> (UPoly, UPoly) {
    let b = u_trim(b.to_vec());
    let db = b.len() - 1;
    let inv = k.inv(b[db]).expect("nonzero divisor");
    let mut r = u_trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Elem::ZERO; r.len() - db];
    while r.len() >= b.len() {
        let s = r.len() - 1 - db;
        let c = k.mul(*r.last().unwrap(), inv);
        q[s] = c;
        for (j, y) in b.iter().enumerate() {
            r[s + j] += k.mul(c, *y);
        }
        r = u_trim(r);
    }
    (u_trim(q), r)
}

fn u_monic(k: &Field, a: UPoly) -> UPoly {
    match a.last() {
        Some(&lc) => {
            let inv = k.inv(lc).expect("nonzero");
            a.iter().map(|c| k.mul(*c, inv)).collect()
        }
        None => a,
    }
}

fn u_gcd(k: &Field, a: &[Elem], b: &[Elem]) -> UPoly {
    let (mut a, mut b) = (u_trim(a.to_vec()), u_trim(b.to_vec()));
    while !b.is_empty() {
        let r = u_divrem(k, &a, &b).1;
        a = b;
        b = r;
    }
    u_monic(k, a)
}

fn u_div_exact(k: &Field, a: &[Elem], b: &[Elem]) -> UPoly {
    let (q, r) = u_divrem(k, a, b);
    debug_assert!(r.is_empty(), "inexact division in k[Z1]");
    q
}

/// Bivariate polynomial as coefficients of Z0^i in k[Z1].
type BPoly = Vec<UPoly>;

fn b_trim(mut a: BPoly) -> BPoly {
    while a.last().is_some_and(|c| c.is_empty()) {
        a.pop();
    }
    a
}

fn to_biv(p: &MPoly<'_>) -> Result<BPoly> {
    let mut b: BPoly = Vec::new();
    for (e, c) in p.terms() {
        if e[X0] != 0 || e[X1] != 0 {
            return Err(Error::Invalid(format!(
                "expected a polynomial in Z0, Z1 only, got {p}"
            )));
        }
        let (i, j) = (e[Z0] as usize, e[Z1] as usize);
        if b.len() <= i {
            b.resize(i + 1, Vec::new());
        }
        if b[i].len() <= j {
            b[i].resize(j + 1, Elem::ZERO);
        }
        b[i][j] += *c;
    }
    Ok(b_trim(b.into_iter().map(u_trim).collect()))
}

fn from_biv<'f>(k: &'f Field, b: &BPoly) -> MPoly<'f> {
    MPoly::from_terms(
        k,
        b.iter().enumerate().flat_map(|(i, u)| {
            u.iter()
                .enumerate()
                .map(move |(j, c)| ([0, 0, i as u8, j as u8], *c))
        }),
    )
}

fn b_content(k: &Field, a: &BPoly) -> UPoly {
    a.iter().fold(Vec::new(), |g, c| u_gcd(k, &g, c))
}

fn b_div_u(k: &Field, a: &BPoly, u: &[Elem]) -> BPoly {
    a.iter()
        .map(|c| {
            if c.is_empty() {
                Vec::new()
            } else {
                u_div_exact(k, c, u)
            }
        })
        .collect()
}

fn b_prim(k: &Field, a: &BPoly) -> BPoly {
    let c = b_content(k, a);
    if c.is_empty() {
        return a.clone();
    }
    b_div_u(k, a, &c)
}

/// lc(b)^(da-db+1) * a mod b in Z0 (signs are irrelevant in characteristic 2).
fn b_prem(k: &Field, a: &BPoly, b: &BPoly) -> BPoly {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.clone();
    while r.len() > db {
        let s = r.len() - 1 - db;
        let lr = r.last().unwrap().clone();
        let mut next: BPoly = r.iter().map(|c| u_mul(k, c, lb)).collect();
        for (j, y) in b.iter().enumerate() {
            next[s + j] = u_add(&next[s + j], &u_mul(k, &lr, y));
        }
        r = b_trim(next);
    }
    r
}

fn b_normalize(k: &Field, a: BPoly) -> BPoly {
    match a.last().and_then(|u| u.last()) {
        Some(&lc) => {
            let inv = k.inv(lc).expect("nonzero");
            a.iter()
                .map(|u| u.iter().map(|c| k.mul(*c, inv)).collect())
                .collect()
        }
        None => a,
    }
}

/// gcd of two polynomials in Z0, Z1, normalized so that the leading term in
/// lexicographic order (Z0 > Z1) has coefficient 1. Uses content extraction and a
/// primitive remainder sequence in Z0 over GF(q^2)[Z1].
pub fn gcd_bivariate<'f>(p: &MPoly<'f>, r: &MPoly<'f>) -> Result<MPoly<'f>> {
    p.same_field(r)?;
    let k = p.field();
    let (a, b) = (to_biv(p)?, to_biv(r)?);
    if a.is_empty() {
        return Ok(from_biv(k, &b_normalize(k, b)));
    }
    if b.is_empty() {
        return Ok(from_biv(k, &b_normalize(k, a)));
    }
    let cont = u_gcd(k, &b_content(k, &a), &b_content(k, &b));
    let (mut a, mut b) = (b_prim(k, &a), b_prim(k, &b));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while b.len() > 1 {
        let r = b_prem(k, &a, &b);
        a = b;
        if r.is_empty() {
            b = Vec::new();
            break;
        }
        b = b_prim(k, &r);
    }
    let prim = if b.is_empty() {
        a
    } else {
        // b is a nonzero element of k[Z1] with trivial content: a unit.
        vec![vec![Elem::ONE]]
    };
    let g: BPoly = prim.iter().map(|c| u_mul(k, c, &cont)).collect();
    Ok(from_biv(k, &b_normalize(k, b_trim(g))))
}

fn bareiss_det(k: &Field, mut m: Vec<Vec<UPoly>>) -> UPoly {
    let n = m.len();
    if n == 0 {
        return vec![Elem::ONE];
    }
    let mut prev: UPoly = vec![Elem::ONE];
    for p in 0..n - 1 {
        if m[p][p].is_empty() {
            match (p + 1..n).find(|&i| !m[i][p].is_empty()) {
                Some(i) => m.swap(p, i),
                None => return Vec::new(),
            }
        }
        for i in p + 1..n {
            for j in p + 1..n {
                let num = u_add(&u_mul(k, &m[p][p], &m[i][j]), &u_mul(k, &m[i][p], &m[p][j]));
                m[i][j] = if num.is_empty() {
                    num
                } else {
                    u_div_exact(k, &num, &prev)
                };
            }
        }
        prev = m[p][p].clone();
    }
    m[n - 1][n - 1].clone()
}

/// Res_{Z0}(p, r) as the Sylvester determinant for the given formal degrees in Z0,
/// returned as a polynomial in Z1.
pub fn resultant_z0_formal<'f>(
    p: &MPoly<'f>,
    r: &MPoly<'f>,
    dp: usize,
    dr: usize,
) -> Result<MPoly<'f>> {
    p.same_field(r)?;
    let k = p.field();
    let (a, b) = (to_biv(p)?, to_biv(r)?);
    if a.len() > dp + 1 || b.len() > dr + 1 {
        return Err(Error::Invalid(
            "formal degree below actual degree in Z0".into(),
        ));
    }
    let n = dp + dr;
    let coef = |v: &BPoly, i: usize| v.get(i).cloned().unwrap_or_default();
    let mut m = vec![vec![Vec::new(); n]; n];
    for row in 0..dr {
        for i in 0..=dp {
            m[row][row + i] = coef(&a, dp - i);
        }
    }
    for row in 0..dp {
        for i in 0..=dr {
            m[dr + row][row + i] = coef(&b, dr - i);
        }
    }
    let det = bareiss_det(k, m);
    Ok(MPoly::from_terms(
        k,
        det.iter()
            .enumerate()
            .map(|(j, c)| ([0, 0, 0, j as u8], *c)),
    ))
}

/// Res_{Z0}(p, r) using the actual degrees in Z0.
pub fn resultant_z0<'f>(p: &MPoly<'f>, r: &MPoly<'f>) -> Result<MPoly<'f>> {
    let dp = p.degree_in(Z0).unwrap_or(0) as usize;
    let dr = r.degree_in(Z0).unwrap_or(0) as usize;
    resultant_z0_formal(p, r, dp, dr)
}

// ---------------------------------------------------------------------------
// The variety system.

/// Coefficient values and their q-th powers.
struct Cv {
    a: Elem,
    b: Elem,
    c: Elem,
    d: Elem,
    e: Elem,
    aq: Elem,
    bq: Elem,
    cq: Elem,
    dq: Elem,
    eq: Elem,
}

impl Cv {
    fn new(k: &Field, c: &Coeffs) -> Cv {
        let f = |z| k.frobenius_q(z);
        Cv {
            a: c.a,
            b: c.b,
            c: c.c,
            d: c.d,
            e: c.e,
            aq: f(c.a),
            bq: f(c.b),
            cq: f(c.c),
            dq: f(c.d),
            eq: f(c.e),
        }
    }
}

/// Build a polynomial in Z0, Z1 from `(coefficient, eZ0, eZ1)` triples.
fn zpoly<'f>(k: &'f Field, t: &[(Elem, u8, u8)]) -> MPoly<'f> {
    MPoly::from_terms(k, t.iter().map(|&(c, i, j)| ([0, 0, i, j], c)))
}

fn with_x<'f>(p: &MPoly<'f>, x0: u8, x1: u8) -> MPoly<'f> {
    p.shift([x0, x1, 0, 0])
}

pub fn f1_poly<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    let v = Cv::new(k, c);
    let one = Elem::ONE;
    let parts = [
        (zpoly(k, &[(v.a, 1, 0), (v.e, 0, 2), (v.d, 0, 1)]), 2, 0),
        (zpoly(k, &[(v.a, 2, 0), (v.c, 0, 2), (v.b, 0, 1)]), 1, 0),
        (zpoly(k, &[(v.e, 2, 0), (v.c, 1, 0), (one, 0, 1)]), 0, 2),
        (zpoly(k, &[(v.d, 2, 0), (v.b, 1, 0), (one, 0, 2)]), 0, 1),
    ];
    parts.iter().fold(MPoly::zero(k), |acc, (p, x0, x1)| {
        &acc + &with_x(p, *x0, *x1)
    })
}

pub fn f2_poly<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    let v = Cv::new(k, c);
    let one = Elem::ONE;
    let parts = [
        (zpoly(k, &[(v.aq, 0, 1), (v.eq, 2, 0), (v.dq, 1, 0)]), 0, 2),
        (zpoly(k, &[(v.aq, 0, 2), (v.cq, 2, 0), (v.bq, 1, 0)]), 0, 1),
        (zpoly(k, &[(v.eq, 0, 2), (v.cq, 0, 1), (one, 1, 0)]), 2, 0),
        (zpoly(k, &[(v.dq, 0, 2), (v.bq, 0, 1), (one, 2, 0)]), 1, 0),
    ];
    parts.iter().fold(MPoly::zero(k), |acc, (p, x0, x1)| {
        &acc + &with_x(p, *x0, *x1)
    })
}

/// Z0^2 E^q + Z0 D^q + Z1 A^q, the multiplier of F1 in G and the extra factor of G-bar.
pub fn alpha_poly<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    let v = Cv::new(k, c);
    zpoly(k, &[(v.eq, 2, 0), (v.dq, 1, 0), (v.aq, 0, 1)])
}

/// Z0^2 E + Z0 C + Z1, the multiplier of F2 in G.
fn beta_mult<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    zpoly(k, &[(c.e, 2, 0), (c.c, 1, 0), (Elem::ONE, 0, 1)])
}

/// G = (Z0^2 E^q + Z0 D^q + Z1 A^q) F1 + (Z0^2 E + Z0 C + Z1) F2, defined for every tuple.
pub fn g_poly<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    &(&alpha_poly(k, c) * &f1_poly(k, c)) + &(&beta_mult(k, c) * &f2_poly(k, c))
}

/// The X0^2 coefficient of G as displayed; it is also g3.
pub fn g3_display<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    let v = Cv::new(k, c);
    let m = |x: Elem, y: Elem| k.mul(x, y);
    let s = theory_sum(k, &v);
    zpoly(
        k,
        &[
            (m(v.a, v.eq) + v.e, 3, 0),
            (m(v.cq, v.e) + m(v.d, v.eq), 2, 1),
            (m(v.a, v.dq) + v.c, 2, 0),
            (m(v.c, v.eq) + m(v.dq, v.e), 1, 2),
            (s, 1, 1),
            (m(v.aq, v.e) + v.eq, 0, 3),
            (m(v.aq, v.d) + v.cq, 0, 2),
        ],
    )
}

/// A^{q+1} + C^{q+1} + D^{q+1} + 1
fn theory_sum(k: &Field, v: &Cv) -> Elem {
    k.mul(v.a, v.aq) + k.mul(v.c, v.cq) + k.mul(v.d, v.dq) + Elem::ONE
}

/// The X0 coefficient of G as displayed.
fn g_x0_display<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    let v = Cv::new(k, c);
    let m = |x: Elem, y: Elem| k.mul(x, y);
    zpoly(
        k,
        &[
            (m(v.a, v.eq) + v.e, 4, 0),
            (m(v.a, v.dq) + v.c, 3, 0),
            (m(v.c, v.eq) + m(v.dq, v.e), 2, 2),
            (m(v.a, v.aq) + m(v.b, v.eq) + m(v.bq, v.e) + Elem::ONE, 2, 1),
            (m(v.b, v.dq) + m(v.bq, v.c), 1, 1),
            (m(v.aq, v.c) + v.dq, 0, 3),
            (m(v.aq, v.b) + v.bq, 0, 2),
        ],
    )
}

/// The X1 coefficient of G as displayed.
fn g_x1_display<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    let v = Cv::new(k, c);
    let m = |x: Elem, y: Elem| k.mul(x, y);
    zpoly(
        k,
        &[
            (m(v.cq, v.e) + m(v.d, v.eq), 4, 0),
            (
                m(v.b, v.eq) + m(v.bq, v.e) + m(v.c, v.cq) + m(v.d, v.dq),
                3,
                0,
            ),
            (m(v.aq, v.e) + v.eq, 2, 2),
            (m(v.aq, v.d) + v.cq, 2, 1),
            (m(v.b, v.dq) + m(v.bq, v.c), 2, 0),
            (m(v.aq, v.c) + v.dq, 1, 2),
            (m(v.aq, v.b) + v.bq, 1, 1),
        ],
    )
}

/// G assembled from its fully expanded display.
pub fn g_display<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    let x2 = with_x(&g3_display(k, c), 2, 0);
    let x1 = with_x(&g_x0_display(k, c), 1, 0);
    let y1 = with_x(&g_x1_display(k, c), 0, 1);
    &(&x2 + &x1) + &y1
}

/// First bracketed factor of a0 (degree 3 in Z0, Z1).
pub fn g1_display<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    let v = Cv::new(k, c);
    let m = |x: Elem, y: Elem| k.mul(x, y);
    zpoly(
        k,
        &[
            (m(v.cq, v.e) + m(v.d, v.eq), 3, 0),
            (
                m(v.b, v.eq) + m(v.bq, v.e) + m(v.c, v.cq) + m(v.d, v.dq),
                2,
                0,
            ),
            (m(v.aq, v.e) + v.eq, 1, 2),
            (m(v.aq, v.d) + v.cq, 1, 1),
            (m(v.b, v.dq) + m(v.bq, v.c), 1, 0),
            (m(v.aq, v.c) + v.dq, 0, 2),
            (m(v.aq, v.b) + v.bq, 0, 1),
        ],
    )
}

/// Second bracketed factor of a0 (degree 4 in Z0, Z1).
pub fn g2_display<'f>(k: &'f Field, c: &Coeffs) -> MPoly<'f> {
    let v = Cv::new(k, c);
    let m = |x: Elem, y: Elem| k.mul(x, y);
    zpoly(
        k,
        &[
            (m(v.a, v.cq) + v.d, 4, 0),
            (m(v.a, v.bq) + v.b, 3, 0),
            (theory_sum(k, &v), 2, 2),
            (m(v.b, v.cq) + m(v.bq, v.d), 2, 1),
            (m(v.b, v.dq) + m(v.bq, v.c), 1, 2),
            (m(v.aq, v.c) + v.dq, 0, 4),
            (m(v.aq, v.b) + v.bq, 0, 3),
        ],
    )
}

/// (a2, a0) from the displayed factors: (g3^2, g1 g2).
pub fn a2_a0_display<'f>(k: &'f Field, c: &Coeffs) -> (MPoly<'f>, MPoly<'f>) {
    (
        g3_display(k, c).square(),
        &g1_display(k, c) * &g2_display(k, c),
    )
}

/// Outcome of each identity check made while building the system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemChecks {
    /// G from its definition equals the expanded display term for term.
    pub g_matches_display: bool,
    /// G-bar = alpha X0 (X0 + Z0)(a2 X0^2 + a1 X0 + a0) with a2, a1, a0 free of X0, X1.
    pub gbar_factorization: bool,
    pub a1_is_a2_z0: bool,
    pub a2_is_g3_squared: bool,
    pub a0_is_g1_g2: bool,
}

impl SystemChecks {
    pub fn all_hold(&self) -> bool {
        self.g_matches_display
            && self.gbar_factorization
            && self.a1_is_a2_z0
            && self.a2_is_g3_squared
            && self.a0_is_g1_g2
    }
}

#[derive(Clone, Debug)]
pub struct VarietySystem<'f> {
    pub f1: MPoly<'f>,
    pub f2: MPoly<'f>,
    pub g: MPoly<'f>,
    pub gbar: MPoly<'f>,
    pub alpha: MPoly<'f>,
    pub a2: MPoly<'f>,
    pub a1: MPoly<'f>,
    pub a0: MPoly<'f>,
    pub g1: MPoly<'f>,
    pub g2: MPoly<'f>,
    pub g3: MPoly<'f>,
    pub checks: SystemChecks,
}

/// Build F1, F2, G, eliminate X1 and split G-bar, verifying every identity on the way.
///
/// Refuses when A = D = E = 0 (the multiplier of F1 is zero) or when the X1 coefficient of G
/// vanishes identically.
pub fn build_variety_system<'f>(k: &'f Field, c: &Coeffs) -> Result<VarietySystem<'f>> {
    let f1 = f1_poly(k, c);
    let f2 = f2_poly(k, c);
    let alpha = alpha_poly(k, c);
    if alpha.is_zero() {
        return Err(Error::DegenerateSystem(
            "A = D = E = 0: the factor Z0^2 E^q + Z0 D^q + Z1 A^q vanishes",
        ));
    }
    let g = &(&alpha * &f1) + &(&beta_mult(k, c) * &f2);
    let lcoef = g.coeff_in(X1, 1);
    if lcoef.is_zero() {
        let (c1, c2) = theory::cond_c1_c2(k, c);
        return Err(Error::DegenerateSystem(if c1 {
            "condition (C1) holds: the X1 coefficient of G vanishes"
        } else if c2 {
            "condition (C2) holds: the X1 coefficient of G vanishes"
        } else {
            "all coefficients vanish: the X1 coefficient of G vanishes"
        }));
    }
    debug_assert!(g.degree_in(X1) == Some(1));
    // G = P + L X1, so X1 = P / L; F2 = u X1^2 + w X1 + t with u, w free of X0, X1.
    let p = g.coeff_in(X1, 0);
    let u = f2.coeff_in(X1, 2);
    let w = f2.coeff_in(X1, 1);
    let t = f2.coeff_in(X1, 0);
    let gbar = &(&(&u * &p.square()) + &(&w * &(&p * &lcoef))) + &(&t * &lcoef.square());

    let x0 = MPoly::var(k, X0);
    let x0_plus_z0 = &x0 + &MPoly::var(k, Z0);
    let divisor = &(&alpha * &x0) * &x0_plus_z0;
    let quotient = gbar.div_exact(&divisor);
    let zero = MPoly::zero(k);
    let (a2, a1, a0, split_ok) = match &quotient {
        Some(qt) if qt.is_free_of(X1) && qt.degree_in(X0).unwrap_or(0) <= 2 => (
            qt.coeff_in(X0, 2),
            qt.coeff_in(X0, 1),
            qt.coeff_in(X0, 0),
            true,
        ),
        _ => (zero.clone(), zero.clone(), zero.clone(), false),
    };
    let g1 = g1_display(k, c);
    let g2 = g2_display(k, c);
    let g3 = g3_display(k, c);
    let z0 = MPoly::var(k, Z0);
    let checks = SystemChecks {
        g_matches_display: g == g_display(k, c),
        gbar_factorization: split_ok,
        a1_is_a2_z0: split_ok && a1 == &a2 * &z0,
        a2_is_g3_squared: split_ok && a2 == g3.square(),
        a0_is_g1_g2: split_ok && a0 == &g1 * &g2,
    };
    Ok(VarietySystem {
        f1,
        f2,
        g,
        gbar,
        alpha,
        a2,
        a1,
        a0,
        g1,
        g2,
        g3,
        checks,
    })
}

// ---------------------------------------------------------------------------
// Rational points.

/// Points enumerated without forcing: q^4 <= 256, i.e. q <= 4.
pub const SCAN_GATE: u64 = 256;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PointScan {
    /// phi-fixed points (x, x^q, a, a^q) on which every polynomial vanishes.
    pub on_system: u64,
    /// Those outside X0=0, X1=0, Z0=X0, Z1=X1, Z0=0, Z1=0.
    pub off_plane_count: u64,
    /// Up to 16 off-plane points as (x, a).
    pub samples: Vec<(Elem, Elem)>,
}

/// True when a phi-fixed point (x, x^q, a, a^q) avoids the six forbidden hyperplanes.
pub fn is_off_plane(x: Elem, a: Elem) -> bool {
    !a.is_zero() && !x.is_zero() && x != a
}

/// Enumerate the phi-fixed points of GF(q^2)^4 on which all of `system` vanishes.
pub fn rational_point_scan(k: &Field, system: &[MPoly<'_>], force: bool) -> Result<PointScan> {
    let pts = k.size() * k.size();
    if pts > SCAN_GATE && !force {
        return Err(GateError {
            what: "rational point scan",
            estimate: format!("{pts} points (q = {})", k.q()),
            limit: format!("{SCAN_GATE} points"),
        }
        .into());
    }
    let mut out = PointScan::default();
    for a in k.elements() {
        let aq = k.frobenius_q(a);
        for x in k.elements() {
            let pt = [x, k.frobenius_q(x), a, aq];
            if system.iter().all(|p| p.eval(&pt).is_zero()) {
                out.on_system += 1;
                if is_off_plane(x, a) {
                    out.off_plane_count += 1;
                    if out.samples.len() < 16 {
                        out.samples.push((x, a));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Off-plane phi-fixed points of the variety F1 = F2 = 0.
pub fn scan_w(k: &Field, c: &Coeffs, force: bool) -> Result<PointScan> {
    rational_point_scan(k, &[f1_poly(k, c), f2_poly(k, c)], force)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GcdRegimeClass {
    /// Precondition h1 = 0 and BC^q + B^qD != 0 fails.
    NotApplicable,
    GcdTrivial,
    ExceptionalCandidate,
    GenericObstruction,
}

#[derive(Clone, Debug)]
pub struct GcdRegime<'f> {
    pub class: GcdRegimeClass,
    pub gcd: Option<MPoly<'f>>,
    pub scan: Option<PointScan>,
}

/// Split the gcd regime by gcd(a2, a0) and by whether {G = 0, gcd = 0} has
/// off-plane phi-fixed points.
pub fn classify_gcd_regime<'f>(k: &'f Field, c: &Coeffs, force: bool) -> Result<GcdRegime<'f>> {
    if !theory::in_gcd_regime(k, c) {
        return Ok(GcdRegime {
            class: GcdRegimeClass::NotApplicable,
            gcd: None,
            scan: None,
        });
    }
    let (a2, a0) = a2_a0_display(k, c);
    let l = gcd_bivariate(&a2, &a0)?;
    if l.total_degree() == Some(0) {
        return Ok(GcdRegime {
            class: GcdRegimeClass::GcdTrivial,
            gcd: Some(l),
            scan: None,
        });
    }
    let scan = rational_point_scan(k, &[g_poly(k, c), l.clone()], force)?;
    let class = if scan.off_plane_count == 0 {
        GcdRegimeClass::ExceptionalCandidate
    } else {
        GcdRegimeClass::GenericObstruction
    };
    Ok(GcdRegime {
        class,
        gcd: Some(l),
        scan: Some(scan),
    })
}

#[derive(Clone, Debug)]
pub struct ResultantCheck<'f> {
    pub g1l: MPoly<'f>,
    pub g2l: MPoly<'f>,
    pub g3l: MPoly<'f>,
    /// The displays coincide with the homogeneous parts of g1, g2, g3 of degrees 1, 3, 2.
    pub displays_match_parts: bool,
    pub resultant: MPoly<'f>,
    pub expected: MPoly<'f>,
    pub identity_holds: bool,
}

/// Res_{Z0}(g1L, g2L) against (A^qB + B^q)^2 h1 Z1^3, with g1L, g2L taken at their
/// formal degrees 1 and 3 in Z0.
pub fn lowest_part_resultant_check<'f>(k: &'f Field, c: &Coeffs) -> Result<ResultantCheck<'f>> {
    let v = Cv::new(k, c);
    let m = |x: Elem, y: Elem| k.mul(x, y);
    let u = m(v.aq, v.b) + v.bq;
    let w = m(v.b, v.dq) + m(v.bq, v.c);
    let g1l = zpoly(k, &[(u, 0, 1), (w, 1, 0)]);
    let g2l = zpoly(
        k,
        &[
            (m(v.a, v.bq) + v.b, 3, 0),
            (m(v.b, v.cq) + m(v.bq, v.d), 2, 1),
            (w, 1, 2),
            (u, 0, 3),
        ],
    );
    let g3l = zpoly(
        k,
        &[
            (m(v.a, v.dq) + v.c, 2, 0),
            (theory_sum(k, &v), 1, 1),
            (m(v.aq, v.d) + v.cq, 0, 2),
        ],
    );
    let displays_match_parts = g1l == g1_display(k, c).homogeneous_part(1)
        && g2l == g2_display(k, c).homogeneous_part(3)
        && g3l == g3_display(k, c).homogeneous_part(2);
    let resultant = resultant_z0_formal(&g1l, &g2l, 1, 3)?;
    let h1 = theory::h1_value(k, c);
    let expected = MPoly::monomial(k, m(k.square(u), h1), [0, 0, 0, 3]);
    let identity_holds = resultant == expected;
    Ok(ResultantCheck {
        g1l,
        g2l,
        g3l,
        displays_match_parts,
        resultant,
        expected,
        identity_holds,
    })
}

/// The B = 0, AC^q + D = 0 displays (b2, b0) of the specialised factorization.
pub fn b0_specialization_displays<'f>(k: &'f Field, c: &Coeffs) -> (MPoly<'f>, MPoly<'f>) {
    let v = Cv::new(k, c);
    let m = |x: Elem, y: Elem| k.mul(x, y);
    let na1 = m(v.a, v.aq) + Elem::ONE;
    let nc1 = m(v.c, v.cq) + Elem::ONE;
    let ae = m(v.a, v.eq) + v.e;
    let aqe = m(v.aq, v.e) + v.eq;
    let inner = zpoly(
        k,
        &[
            (m(na1, nc1), 1, 1),
            (m(v.c, na1), 2, 0),
            (m(v.cq, na1), 0, 2),
            (m(v.cq, ae), 2, 1),
            (m(v.c, aqe), 1, 2),
            (ae, 3, 0),
            (aqe, 0, 3),
        ],
    );
    let b2 = inner.square();
    let tail = zpoly(
        k,
        &[
            (m(na1, m(v.c, v.cq)), 1, 0),
            (m(na1, v.cq), 0, 1),
            (m(ae, v.cq), 2, 0),
            (aqe, 0, 2),
        ],
    );
    let b0 = tail.shift([0, 0, 3, 2]).scale(m(na1, nc1));
    (b2, b0)
}
