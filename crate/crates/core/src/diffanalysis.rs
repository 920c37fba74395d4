//! Difference distribution tables and the APN tests.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::field::{Elem, Field};
use crate::hexanomial::{value_table, Coeffs};

/// DDT summary. The spectrum counts every entry of the rows a != 0, zeros included.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffProfile {
    pub uniformity: u32,
    pub spectrum: BTreeMap<u32, u64>,
    pub is_apn: bool,
    pub is_permutation: bool,
}

impl DiffProfile {
    pub fn from_table(table: &[u32]) -> DiffProfile {
        let n = table.len();
        let mut spectrum = BTreeMap::new();
        let mut uniformity = 0;
        let mut row = vec![0u32; n];
        for a in 1..n {
            ddt_row_into(table, a as u32, &mut row);
            for &v in &row {
                *spectrum.entry(v).or_insert(0) += 1;
                uniformity = uniformity.max(v);
            }
        }
        DiffProfile {
            uniformity,
            spectrum,
            is_apn: uniformity == 2,
            is_permutation: table_is_permutation(table),
        }
    }

    pub fn new(field: &Field, c: &Coeffs) -> DiffProfile {
        DiffProfile::from_table(&value_table(field, c))
    }

    /// Canonical `value:count` rendering, ascending by value.
    pub fn spectrum_string(&self) -> String {
        spectrum_to_string(&self.spectrum)
    }
}

pub(crate) fn spectrum_to_string<K: std::fmt::Display>(m: &BTreeMap<K, u64>) -> String {
    m.iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// One DDT row: `row[b] = #{x : f(x+a) + f(x) = b}`.
pub fn ddt_row_into(table: &[u32], a: u32, row: &mut [u32]) {
    row.fill(0);
    for (x, fx) in table.iter().enumerate() {
        row[(fx ^ table[x ^ a as usize]) as usize] += 1;
    }
}

/// The full N x N table from a value table.
pub fn ddt_from_table(table: &[u32]) -> Vec<Vec<u32>> {
    let n = table.len();
    (0..n)
        .map(|a| {
            let mut row = vec![0; n];
            ddt_row_into(table, a as u32, &mut row);
            row
        })
        .collect()
}

pub fn ddt(field: &Field, c: &Coeffs) -> Vec<Vec<u32>> {
    ddt_from_table(&value_table(field, c))
}

/// The DDT as CSV: N lines of N comma-separated integers.
pub fn ddt_csv(ddt: &[Vec<u32>]) -> String {
    let mut s = String::new();
    for row in ddt {
        let line: Vec<String> = row.iter().map(u32::to_string).collect();
        let _ = writeln!(s, "{}", line.join(","));
    }
    s
}

/// Reusable scratch for the early-abort APN test.
///
/// Pairs {x, x+a} are visited once each and add 2 to their output difference, so a
/// second visit to any difference means a count of 4 and the row is rejected at once.
pub struct ApnTester {
    stamp: Vec<u32>,
    generation: u32,
}

impl ApnTester {
    pub fn new(n: usize) -> ApnTester {
        ApnTester {
            stamp: vec![0; n],
            generation: 0,
        }
    }

    fn next_generation(&mut self) -> u32 {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.fill(0);
            self.generation = 1;
        }
        self.generation
    }

    pub fn is_apn(&mut self, table: &[u32]) -> bool {
        let n = table.len();
        if self.stamp.len() != n {
            self.stamp = vec![0; n];
            self.generation = 0;
        }
        for a in 1..n {
            let g = self.next_generation();
            let hi = 1usize << (usize::BITS - 1 - a.leading_zeros());
            for x in 0..n {
                if x & hi != 0 {
                    continue;
                }
                let b = (table[x] ^ table[x ^ a]) as usize;
                if self.stamp[b] == g {
                    return false;
                }
                self.stamp[b] = g;
            }
        }
        true
    }
}

/// Early-abort DDT test.
pub fn is_apn_ddt(field: &Field, c: &Coeffs) -> bool {
    ApnTester::new(field.len()).is_apn(&value_table(field, c))
}

/// Full-table test with no early exit.
pub fn is_apn_full(field: &Field, c: &Coeffs) -> bool {
    DiffProfile::new(field, c).uniformity == 2
}

/// The APN test written as the quadratic derivative equation: for every a != 0 the
/// linearised derivative must vanish only at x = 0 and x = a.
pub fn is_apn_equation(field: &Field, c: &Coeffs) -> bool {
    let k = field;
    let xs: Vec<(Elem, Elem, Elem, Elem)> = k
        .elements()
        .map(|x| {
            let xq = k.frobenius_q(x);
            (k.square(x), x, k.square(xq), xq)
        })
        .collect();
    for a in k.elements().skip(1) {
        let aq = k.frobenius_q(a);
        let a2 = k.square(a);
        let a2q = k.square(aq);
        let k2 = k.mul(c.a, a) + k.mul(a2q, c.e) + k.mul(aq, c.d);
        let k1 = k.mul(a2, c.a) + k.mul(a2q, c.c) + k.mul(aq, c.b);
        let k2q = k.mul(a2, c.e) + k.mul(a, c.c) + aq;
        let kq = k.mul(a2, c.d) + k.mul(a, c.b) + a2q;
        for (i, &(x2, x, x2q, xq)) in xs.iter().enumerate() {
            if i == 0 || x == a {
                continue;
            }
            let v = k.mul(k2, x2) + k.mul(k1, x) + k.mul(k2q, x2q) + k.mul(kq, xq);
            if v.is_zero() {
                return false;
            }
        }
    }
    true
}

pub fn table_is_permutation(table: &[u32]) -> bool {
    let mut seen = vec![false; table.len()];
    for &v in table {
        let s = &mut seen[v as usize];
        if *s {
            return false;
        }
        *s = true;
    }
    true
}

pub fn is_permutation(field: &Field, c: &Coeffs) -> bool {
    table_is_permutation(&value_table(field, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn f4_representative() {
        let k = Field::new(FieldSpec::F4).unwrap();
        let a = k.generator();
        let c = Coeffs::new(a, Elem::ZERO, Elem::ZERO, Elem::ZERO, a);
        assert!(is_apn_ddt(&k, &c));
        assert!(is_apn_equation(&k, &c));
        assert!(!is_permutation(&k, &c));
        let p = DiffProfile::new(&k, &c);
        assert_eq!(p.uniformity, 2);
        let total: u64 = p.spectrum.iter().map(|(v, n)| *v as u64 * n).sum();
        assert_eq!(total, 3 * 4);
    }

    #[test]
    fn leading_monomial_alone() {
        let k = Field::new(FieldSpec::F4).unwrap();
        let c = Coeffs::default();
        assert!(!is_permutation(&k, &c));
        assert_eq!(is_apn_ddt(&k, &c), is_apn_full(&k, &c));
        let c = Coeffs::new(Elem::ONE, Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO);
        assert_eq!(is_apn_ddt(&k, &c), is_apn_full(&k, &c));
    }

    #[test]
    fn ddt_rows_and_csv() {
        let k = Field::new(FieldSpec::F16).unwrap();
        let c = Coeffs::from_bits([2, 0, 0, 2, 0]);
        let t = ddt(&k, &c);
        assert_eq!(t[0][0], 16);
        for row in &t {
            assert_eq!(row.iter().sum::<u32>(), 16);
            assert!(row.iter().all(|v| v % 2 == 0));
        }
        let csv = ddt_csv(&t);
        assert_eq!(csv.lines().count(), 16);
        assert!(csv.lines().all(|l| l.split(',').count() == 16));
    }

    #[test]
    fn tester_agrees_with_full_on_f4() {
        let k = Field::new(FieldSpec::F4).unwrap();
        let mut t = ApnTester::new(4);
        for i in 0..1024u64 {
            let c = Coeffs::from_index(&k, i);
            let table = value_table(&k, &c);
            let full = DiffProfile::from_table(&table).is_apn;
            assert_eq!(t.is_apn(&table), full);
            assert_eq!(is_apn_equation(&k, &c), full, "{c:?}");
        }
    }
}
