//! Closed-form coefficient conditions, the eleven summary cases and theory verdicts.
//!
//! Every result here is asymptotic (q large); at small q it is a prediction to be
//! compared against brute force, not a proof.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::field::{Elem, Field};
use crate::hexanomial::Coeffs;

pub const ASYMPTOTIC_CAVEAT: &str = "asymptotic (q large) result applied at small q";

/// Coefficients with their q-th powers and the field, to keep formulas short.
struct Sym<'f> {
    k: &'f Field,
    q: u64,
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

impl<'f> Sym<'f> {
    fn new(k: &'f Field, c: &Coeffs) -> Sym<'f> {
        let f = |z| k.frobenius_q(z);
        Sym {
            k,
            q: k.q(),
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

    fn m(&self, xs: &[Elem]) -> Elem {
        xs.iter().fold(Elem::ONE, |acc, &x| self.k.mul(acc, x))
    }

    fn p(&self, x: Elem, e: u64) -> Elem {
        self.k.pow(x, e)
    }

    /// z^{q+1}
    fn norm(&self, z: Elem) -> Elem {
        self.k.trace_norm_rel(z).1
    }

    fn c1(&self) -> bool {
        !self.a.is_zero()
            && self.c.is_zero()
            && self.d.is_zero()
            && self.m(&[self.aq, self.b]) == self.bq
            && self.m(&[self.aq, self.e]) == self.eq
    }

    fn c2(&self) -> bool {
        !self.m(&[self.a, self.c, self.d]).is_zero()
            && self.norm(self.a) == Elem::ONE
            && self.d == self.m(&[self.a, self.cq])
            && self.bq == self.m(&[self.aq, self.b])
            && self.eq == self.m(&[self.aq, self.e])
    }

    /// A^{q+1} + C^{q+1} + D^{q+1} + 1
    fn s(&self) -> Elem {
        self.norm(self.a) + self.norm(self.c) + self.norm(self.d) + Elem::ONE
    }

    fn c6(&self) -> bool {
        !(self.m(&[self.a, self.dq]) + self.c).is_zero() || !self.s().is_zero()
    }

    fn h1(&self) -> Elem {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (aq, bq, cq, dq) = (self.aq, self.bq, self.cq, self.dq);
        let b2 = self.k.square(b);
        let b2q = self.k.square(bq);
        let nb = self.norm(b);
        self.m(&[self.norm(a), nb])
            + self.m(&[a, b2q])
            + self.m(&[aq, b2])
            + self.m(&[b2, cq, dq])
            + self.m(&[nb, self.norm(c)])
            + self.m(&[nb, self.norm(d)])
            + nb
            + self.m(&[b2q, c, d])
    }

    fn p1_p2(&self) -> (Elem, Elem) {
        let k = self.k;
        let q = self.q;
        let (a, c, d) = (self.a, self.c, self.d);
        let (cq, dq) = (self.cq, self.dq);
        let na = self.norm(a);
        let nc = self.norm(c);
        let nd = self.norm(d);
        let p1 = self.m(&[self.p(a, q + 2), cq])
            + self.m(&[k.square(a), self.p(d, 2 * q)])
            + self.m(&[na, d])
            + self.m(&[a, self.p(c, 2 * q + 1)])
            + self.m(&[a, cq, nd])
            + self.m(&[a, cq])
            + k.square(c)
            + self.m(&[nc, d])
            + self.p(d, q + 2)
            + d;
        let inner = self.m(&[
            self.p(a, q + 2),
            self.m(&[c, self.p(d, 2 * q)]) + self.m(&[cq, dq]),
        ]) + self.m(&[k.square(a), self.p(d, 3 * q)])
            + self.m(&[
                a,
                self.m(&[self.p(c, 2 * q + 1), dq])
                    + self.p(c, 3 * q)
                    + self.m(&[cq, self.p(d, 2 * q + 1)])
                    + self.m(&[cq, dq]),
            ])
            + self.m(&[k.square(c), dq]);
        let tr = k.trace_norm_rel(inner).0;
        debug_assert!(k.in_subfield(tr));
        let nc2 = k.square(nc);
        let nd2 = k.square(nd);
        let p2 = self.m(&[k.square(na), nc])
            + self.m(&[na, self.m(&[nc, nd]) + nc + nd + nd2 + Elem::ONE])
            + self.m(&[nc2, nc])
            + nc2
            + self.m(&[nc, nd])
            + self.m(&[nd2, nd])
            + self.m(&[nc2, nd])
            + self.m(&[nc, nd2])
            + tr;
        (p1, p2)
    }
}

pub fn cond_c1_c2(field: &Field, c: &Coeffs) -> (bool, bool) {
    let s = Sym::new(field, c);
    (s.c1(), s.c2())
}

pub fn h1_value(field: &Field, c: &Coeffs) -> Elem {
    Sym::new(field, c).h1()
}

pub fn cond_c6(field: &Field, c: &Coeffs) -> bool {
    Sym::new(field, c).c6()
}

pub fn p1_p2_values(field: &Field, c: &Coeffs) -> (Elem, Elem) {
    Sym::new(field, c).p1_p2()
}

/// h1 = 0 and BC^q + B^qD != 0: the regime of the gcd(a2, a0) census.
pub fn in_gcd_regime(field: &Field, c: &Coeffs) -> bool {
    let s = Sym::new(field, c);
    s.h1().is_zero() && !(s.m(&[s.b, s.cq]) + s.m(&[s.bq, s.d])).is_zero()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicRoots {
    pub has_root_in_field: bool,
    pub has_unit_norm_root: bool,
}

/// Scan GF(q^2) for roots of `coefs[0] T^3 + coefs[1] T^2 + coefs[2] T + coefs[3]`.
pub fn cubic_predicates(field: &Field, coefs: [Elem; 4]) -> CubicRoots {
    let mut out = CubicRoots::default();
    for t in field.elements() {
        let v = coefs
            .iter()
            .fold(Elem::ZERO, |acc, &k| field.mul(acc, t) + k);
        if v.is_zero() {
            out.has_root_in_field = true;
            if field.trace_norm_rel(t).1 == Elem::ONE {
                out.has_unit_norm_root = true;
                break;
            }
        }
    }
    out
}

/// The cubics that appear in the case analysis, with their root flags.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicFlags {
    /// T^3 + C T^2 + A C^q T + A
    pub b0: CubicRoots,
    /// B^q T^3 + B^q C T^2 + B C^q T + B
    pub c7: CubicRoots,
    /// B^q T^3 + B^q T^2 + C^q T + B, the summary's transcription of the previous cubic
    pub c7_summary: CubicRoots,
    /// T^3 + A D^q T^2 + D T + A
    pub c6: CubicRoots,
}

pub fn cubic_flags(field: &Field, c: &Coeffs) -> CubicFlags {
    let s = Sym::new(field, c);
    CubicFlags {
        b0: cubic_predicates(field, [Elem::ONE, s.c, s.m(&[s.a, s.cq]), s.a]),
        c7: cubic_predicates(field, [s.bq, s.m(&[s.bq, s.c]), s.m(&[s.b, s.cq]), s.b]),
        c7_summary: cubic_predicates(field, [s.bq, s.bq, s.cq, s.b]),
        c6: cubic_predicates(field, [Elem::ONE, s.m(&[s.a, s.dq]), s.d, s.a]),
    }
}

/// Matched summary cases (ids 1..=11) plus the alternative reading of case 9.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseMatch {
    pub matched: Vec<u8>,
    /// Case 9 with `q = 1 mod 3` and no `A != 1` clause, as the summary prints it.
    pub case9_summary_reading: bool,
}

impl CaseMatch {
    pub fn contains(&self, id: u8) -> bool {
        self.matched.contains(&id)
    }
}

/// Cases whose statement is an equivalence rather than a necessary condition.
pub const NEC_SUF_CASES: [u8; 3] = [1, 9, 10];

fn case_predicates(s: &Sym<'_>, cubics: &CubicFlags) -> ([bool; 11], bool) {
    let k = s.k;
    let q = s.q;
    let one = Elem::ONE;
    let na = s.norm(s.a);
    let nb = s.norm(s.b);
    let nd = s.norm(s.d);
    let ac_q_d = s.m(&[s.a, s.cq]) + s.d;
    let ad_q_c = s.m(&[s.a, s.dq]) + s.c;
    let ae_q_e = s.m(&[s.a, s.eq]) + s.e;
    let ab_q_b = s.m(&[s.a, s.bq]) + s.b;
    let bc_bd = s.m(&[s.b, s.cq]) + s.m(&[s.bq, s.d]);
    let h1 = s.h1();
    let sum = s.s();

    let case1 = s.c1() && na != one;
    let case2 = s.b.is_zero()
        && ac_q_d.is_zero()
        && !ae_q_e.is_zero()
        && s.m(&[na + one, s.norm(s.c) + one]).is_zero();
    let be = s.b.is_zero() && s.e.is_zero() && !ac_q_d.is_zero();
    let case3 = be && sum.is_zero() && s.p(ac_q_d, q - 1) == s.p(ad_q_c, 2 * (q - 1));
    let case4 = be && !sum.is_zero() && !ad_q_c.is_zero() && {
        let (p1, p2) = s.p1_p2();
        k.mul(p1, p2).is_zero()
    };
    let h1_reg = h1.is_zero() && !bc_bd.is_zero();
    let case5 = h1_reg
        && s.cq == s.m(&[s.aq, s.b]) + s.m(&[s.aq, s.d]) + s.bq
        && (nb + nd + s.m(&[s.b, s.dq]) + s.m(&[s.bq, s.d]) + one).is_zero();
    let case6 = h1_reg && s.e.is_zero();
    let case7 = h1.is_zero()
        && bc_bd.is_zero()
        && s.b == s.m(&[s.bq, s.a])
        && !(s.m(&[s.b, s.eq]) + s.m(&[s.bq, s.e])).is_zero()
        && !cubics.c7.has_root_in_field;
    let case8 = ad_q_c.is_zero()
        && !k.mul(ab_q_b, ae_q_e).is_zero()
        && nd == one
        && na != one
        && s.m(&[s.b, s.eq]) == s.m(&[s.bq, s.e])
        && s.p(ae_q_e, q * q - q) == k.mul(s.d, k.sqrt(s.d));
    let c6_2_core =
        s.c.is_zero() && s.d.is_zero() && na == one && ae_q_e.is_zero() && !ab_q_b.is_zero();
    let case9 = q % 3 == 2 && s.a != one && c6_2_core;
    let case9_summary = q % 3 == 1 && c6_2_core;
    let case10 = ad_q_c.is_zero()
        && na == one
        && ae_q_e.is_zero()
        && !ab_q_b.is_zero()
        && !k.mul(s.d, nd + one).is_zero()
        && !cubics.c6.has_root_in_field;
    let case11 = na == one
        && ad_q_c.is_zero()
        && !k.mul(s.b, ae_q_e).is_zero()
        && ab_q_b.is_zero()
        && !cubics.c6.has_root_in_field;
    (
        [
            case1, case2, case3, case4, case5, case6, case7, case8, case9, case10, case11,
        ],
        case9_summary,
    )
}

pub fn match_summary_cases(field: &Field, c: &Coeffs) -> CaseMatch {
    let s = Sym::new(field, c);
    let (flags, case9_summary_reading) = case_predicates(&s, &cubic_flags(field, c));
    CaseMatch {
        matched: (1..=11u8).filter(|&i| flags[i as usize - 1]).collect(),
        case9_summary_reading,
    }
}

/// The condition behind a decisive verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// Condition (C1): APN iff A^{q+1} != 1.
    C1,
    /// Condition (C2): never APN.
    C2,
    /// (C6) fails, AB^q + B != 0, AE^q + E = 0: APN iff case 9 or case 10 holds.
    C6Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exclusion {
    /// B != 0, (C6) and h1 != 0.
    SmallestHomogeneousParts,
    /// B = 0 and none of cases 2-4.
    BZero,
    /// B != 0, (C6) holds, h1 = 0 and none of cases 5-7.
    H1Vanishing,
    /// B != 0, (C6) fails and none of cases 8-11.
    C6Failure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    ExcludedByTheory { reason: Exclusion },
    CandidateApn { cases: Vec<u8> },
    NecessarilyApn { rule: Rule, case: u8 },
    NecessarilyNotApn { rule: Rule },
}

impl Verdict {
    pub fn predicts_apn(&self) -> Option<bool> {
        match self {
            Verdict::NecessarilyApn { .. } => Some(true),
            Verdict::NecessarilyNotApn { .. } | Verdict::ExcludedByTheory { .. } => Some(false),
            Verdict::CandidateApn { .. } => None,
        }
    }

    pub fn rule(&self) -> Option<Rule> {
        match self {
            Verdict::NecessarilyApn { rule, .. } | Verdict::NecessarilyNotApn { rule } => {
                Some(*rule)
            }
            _ => None,
        }
    }

    pub fn is_excluded(&self) -> bool {
        matches!(self, Verdict::ExcludedByTheory { .. })
    }
}

fn verdict_from(s: &Sym<'_>, cases: &CaseMatch) -> Verdict {
    if s.c1() {
        return if cases.contains(1) {
            Verdict::NecessarilyApn {
                rule: Rule::C1,
                case: 1,
            }
        } else {
            Verdict::NecessarilyNotApn { rule: Rule::C1 }
        };
    }
    if s.c2() {
        return Verdict::NecessarilyNotApn { rule: Rule::C2 };
    }
    let ab_q_b = s.m(&[s.a, s.bq]) + s.b;
    let ae_q_e = s.m(&[s.a, s.eq]) + s.e;
    if !s.c6() && !ab_q_b.is_zero() && ae_q_e.is_zero() {
        return match [9u8, 10].into_iter().find(|&i| cases.contains(i)) {
            Some(case) => Verdict::NecessarilyApn {
                rule: Rule::C6Two,
                case,
            },
            None => Verdict::NecessarilyNotApn { rule: Rule::C6Two },
        };
    }
    if !cases.matched.is_empty() {
        return Verdict::CandidateApn {
            cases: cases.matched.clone(),
        };
    }
    let reason = if s.b.is_zero() {
        Exclusion::BZero
    } else if !s.c6() {
        Exclusion::C6Failure
    } else if s.h1().is_zero() {
        Exclusion::H1Vanishing
    } else {
        Exclusion::SmallestHomogeneousParts
    };
    Verdict::ExcludedByTheory { reason }
}

pub fn predict_verdict(field: &Field, c: &Coeffs) -> Verdict {
    let s = Sym::new(field, c);
    verdict_from(&s, &match_summary_cases(field, c))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryReport {
    pub c1: bool,
    pub c2: bool,
    pub c6: bool,
    pub h1: Elem,
    /// Present on the branch B = E = 0, AC^q + D != 0.
    pub p1_p2: Option<(Elem, Elem)>,
    pub cubic_flags: CubicFlags,
    pub cases: CaseMatch,
    pub verdict: Verdict,
}

impl TheoryReport {
    pub fn new(field: &Field, c: &Coeffs) -> TheoryReport {
        let s = Sym::new(field, c);
        let cubic_flags = cubic_flags(field, c);
        let (flags, case9_summary_reading) = case_predicates(&s, &cubic_flags);
        let cases = CaseMatch {
            matched: (1..=11u8).filter(|&i| flags[i as usize - 1]).collect(),
            case9_summary_reading,
        };
        let branch = s.b.is_zero() && s.e.is_zero() && !(s.m(&[s.a, s.cq]) + s.d).is_zero();
        TheoryReport {
            c1: s.c1(),
            c2: s.c2(),
            c6: s.c6(),
            h1: s.h1(),
            p1_p2: branch.then(|| s.p1_p2()),
            verdict: verdict_from(&s, &cases),
            cubic_flags,
            cases,
        }
    }

    pub fn to_json(&self, field: &Field, c: &Coeffs) -> Value {
        let el = |z: Elem| field.format_power(z);
        json!({
            "field": field.spec().to_string(),
            "tuple": c.format(field),
            "c1": self.c1,
            "c2": self.c2,
            "c6": self.c6,
            "h1": el(self.h1),
            "p1": self.p1_p2.map(|p| el(p.0)),
            "p2": self.p1_p2.map(|p| el(p.1)),
            "cubic_flags": self.cubic_flags,
            "matched_cases": self.cases.matched,
            "case9_summary_reading": self.cases.case9_summary_reading,
            "verdict": self.verdict,
            "caveat": ASYMPTOTIC_CAVEAT,
        })
    }
}

/// Tally of one reading of case 9 against brute force on the C = D = 0 part of the
/// (C6)-fails, AB^q + B != 0, AE^q + E = 0 branch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadingTally {
    pub predicted_apn_and_apn: u64,
    pub predicted_apn_not_apn: u64,
    pub predicted_not_apn_but_apn: u64,
    pub predicted_not_apn_and_not_apn: u64,
}

impl ReadingTally {
    fn add(&mut self, predicted: bool, empirical: bool) {
        match (predicted, empirical) {
            (true, true) => self.predicted_apn_and_apn += 1,
            (true, false) => self.predicted_apn_not_apn += 1,
            (false, true) => self.predicted_not_apn_but_apn += 1,
            (false, false) => self.predicted_not_apn_and_not_apn += 1,
        }
    }

    pub fn mismatches(&self) -> u64 {
        self.predicted_apn_not_apn + self.predicted_not_apn_but_apn
    }

    pub fn total(&self) -> u64 {
        self.mismatches() + self.predicted_apn_and_apn + self.predicted_not_apn_and_not_apn
    }

    fn merge(&mut self, o: &ReadingTally) {
        self.predicted_apn_and_apn += o.predicted_apn_and_apn;
        self.predicted_apn_not_apn += o.predicted_apn_not_apn;
        self.predicted_not_apn_but_apn += o.predicted_not_apn_but_apn;
        self.predicted_not_apn_and_not_apn += o.predicted_not_apn_and_not_apn;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconcileReport {
    pub total: u64,
    pub empirical_apn: u64,
    /// Excluded by theory and indeed not APN.
    pub exclusions_confirmed: u64,
    /// Excluded by theory yet APN at this q.
    pub small_q_exceptions: u64,
    pub small_q_exceptions_by_reason: BTreeMap<String, u64>,
    pub candidates_apn: u64,
    pub candidates_not_apn: u64,
    /// Decisive verdicts that agree with brute force, by rule.
    pub iff_agreements: BTreeMap<String, u64>,
    /// Decisive verdicts contradicted by brute force, by rule.
    pub iff_violations: BTreeMap<String, u64>,
    /// APN tuples matching no summary case (any verdict).
    pub apn_matching_no_case: u64,
    pub case9_prop_reading: ReadingTally,
    pub case9_summary_reading: ReadingTally,
}

fn rule_key(r: Rule) -> String {
    match r {
        Rule::C1 => "C1".into(),
        Rule::C2 => "C2".into(),
        Rule::C6Two => "C6_2".into(),
    }
}

impl ReconcileReport {
    pub fn add(&mut self, field: &Field, c: &Coeffs, apn: bool) {
        let s = Sym::new(field, c);
        let cubics = cubic_flags(field, c);
        let (flags, case9_summary) = case_predicates(&s, &cubics);
        let cases = CaseMatch {
            matched: (1..=11u8).filter(|&i| flags[i as usize - 1]).collect(),
            case9_summary_reading: case9_summary,
        };
        let verdict = verdict_from(&s, &cases);
        self.total += 1;
        self.empirical_apn += apn as u64;
        if apn && cases.matched.is_empty() {
            self.apn_matching_no_case += 1;
        }
        match &verdict {
            Verdict::ExcludedByTheory { reason } => {
                if apn {
                    self.small_q_exceptions += 1;
                    let key = serde_json::to_value(reason)
                        .unwrap()
                        .as_str()
                        .unwrap()
                        .to_string();
                    *self.small_q_exceptions_by_reason.entry(key).or_insert(0) += 1;
                } else {
                    self.exclusions_confirmed += 1;
                }
            }
            Verdict::CandidateApn { .. } => {
                if apn {
                    self.candidates_apn += 1
                } else {
                    self.candidates_not_apn += 1
                }
            }
            v => {
                let rule = rule_key(v.rule().unwrap());
                let ok = v.predicts_apn() == Some(apn);
                let map = if ok {
                    &mut self.iff_agreements
                } else {
                    &mut self.iff_violations
                };
                *map.entry(rule).or_insert(0) += 1;
            }
        }
        let in_c6_2 = !s.c6()
            && !(s.m(&[s.a, s.bq]) + s.b).is_zero()
            && (s.m(&[s.a, s.eq]) + s.e).is_zero()
            && s.c.is_zero()
            && s.d.is_zero();
        if in_c6_2 {
            self.case9_prop_reading.add(flags[8], apn);
            self.case9_summary_reading.add(case9_summary, apn);
        }
    }

    pub fn merge(&mut self, o: &ReconcileReport) {
        self.total += o.total;
        self.empirical_apn += o.empirical_apn;
        self.exclusions_confirmed += o.exclusions_confirmed;
        self.small_q_exceptions += o.small_q_exceptions;
        self.candidates_apn += o.candidates_apn;
        self.candidates_not_apn += o.candidates_not_apn;
        self.apn_matching_no_case += o.apn_matching_no_case;
        for (dst, src) in [
            (
                &mut self.small_q_exceptions_by_reason,
                &o.small_q_exceptions_by_reason,
            ),
            (&mut self.iff_agreements, &o.iff_agreements),
            (&mut self.iff_violations, &o.iff_violations),
        ] {
            for (k, v) in src {
                *dst.entry(k.clone()).or_insert(0) += v;
            }
        }
        self.case9_prop_reading.merge(&o.case9_prop_reading);
        self.case9_summary_reading.merge(&o.case9_summary_reading);
    }

    /// Violations of the (C1) and (C2) equivalences only.
    pub fn c1_c2_violations(&self) -> u64 {
        ["C1", "C2"]
            .iter()
            .map(|k| self.iff_violations.get(*k).copied().unwrap_or(0))
            .sum()
    }

    /// Which case-9 reading the data supports.
    pub fn case9_resolution(&self) -> String {
        let p = &self.case9_prop_reading;
        let s = &self.case9_summary_reading;
        if p.total() == 0 {
            return "no tuples in the C = D = 0 branch; undecided".into();
        }
        match (p.mismatches(), s.mismatches()) {
            (0, 0) => "both readings agree with brute force".into(),
            (0, _) => "q = 2 mod 3 reading (with A != 1) agrees with brute force; q = 1 mod 3 reading does not".into(),
            (_, 0) => "q = 1 mod 3 reading agrees with brute force; q = 2 mod 3 reading does not".into(),
            (a, b) => format!("neither reading agrees ({a} and {b} mismatches)"),
        }
    }
}

pub fn reconcile(field: &Field, batch: &[(Coeffs, bool)]) -> ReconcileReport {
    let mut r = ReconcileReport::default();
    for (c, apn) in batch {
        r.add(field, c, *apn);
    }
    r
}
