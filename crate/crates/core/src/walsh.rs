//! Walsh coefficients and the extended Walsh spectrum, using the absolute trace.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::diffanalysis::spectrum_to_string;
use crate::field::{Elem, Field};
use crate::hexanomial::{evaluate, value_table, Coeffs};

/// Multiset of |W(a,b)| over all a and all b != 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalshSpectrum {
    pub counts: BTreeMap<u64, u64>,
}

impl WalshSpectrum {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Sorted `value:count` pairs.
    pub fn to_canonical_string(&self) -> String {
        spectrum_to_string(&self.counts)
    }

    pub fn parse(s: &str) -> Option<WalshSpectrum> {
        let mut counts = BTreeMap::new();
        for part in s.split(',').filter(|p| !p.is_empty()) {
            let (v, n) = part.split_once(':')?;
            counts.insert(v.trim().parse().ok()?, n.trim().parse().ok()?);
        }
        Some(WalshSpectrum { counts })
    }
}

/// Direct summation of W(a,b) = sum_x (-1)^{Tr(b f(x) + a x)}.
pub fn walsh_coefficient(field: &Field, c: &Coeffs, a: Elem, b: Elem) -> i64 {
    field
        .elements()
        .map(|x| {
            let t = field.abs_trace(field.mul(b, evaluate(field, c, x)) + field.mul(a, x));
            1 - 2 * t as i64
        })
        .sum()
}

/// In-place Walsh-Hadamard butterfly.
pub fn fwht(v: &mut [i64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (x, y) = (v[j], v[j + h]);
                v[j] = x + y;
                v[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// For each a, the bit mask u with Tr(a x) = <u, x> over GF(2).
pub fn trace_dual_masks(field: &Field) -> Vec<u32> {
    let deg = field.degree();
    field
        .elements()
        .map(|a| {
            (0..deg).fold(0u32, |u, i| {
                u | (field.abs_trace(field.mul(a, Elem(1 << i))) << i)
            })
        })
        .collect()
}

/// All W(a,b) for one b, indexed by a.
pub fn walsh_row(field: &Field, table: &[u32], b: Elem, masks: &[u32]) -> Vec<i64> {
    let mut v: Vec<i64> = table
        .iter()
        .map(|&fx| 1 - 2 * field.abs_trace(field.mul(b, Elem(fx))) as i64)
        .collect();
    fwht(&mut v);
    masks.iter().map(|&u| v[u as usize]).collect()
}

pub fn spectrum_from_table(field: &Field, table: &[u32]) -> WalshSpectrum {
    let mut counts = BTreeMap::new();
    let mut v = vec![0i64; table.len()];
    for b in field.elements().skip(1) {
        for (slot, &fx) in v.iter_mut().zip(table) {
            *slot = 1 - 2 * field.abs_trace(field.mul(b, Elem(fx))) as i64;
        }
        fwht(&mut v);
        // a -> trace-dual mask is a bijection, so the multiset over masks is the one over a.
        for w in &v {
            *counts.entry(w.unsigned_abs()).or_insert(0) += 1;
        }
    }
    WalshSpectrum { counts }
}

pub fn extended_walsh_spectrum(field: &Field, c: &Coeffs) -> WalshSpectrum {
    spectrum_from_table(field, &value_table(field, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn trivial_coefficients() {
        let k = Field::new(FieldSpec::F16).unwrap();
        let c = Coeffs::from_bits([5, 1, 0, 9, 3]);
        assert_eq!(walsh_coefficient(&k, &c, Elem::ZERO, Elem::ZERO), 16);
        for a in k.elements().skip(1) {
            assert_eq!(walsh_coefficient(&k, &c, a, Elem::ZERO), 0);
        }
    }

    #[test]
    fn fast_row_matches_direct_sum() {
        let k = Field::new(FieldSpec::F16).unwrap();
        let c = Coeffs::from_bits([2, 0, 0, 2, 0]);
        let table = value_table(&k, &c);
        let masks = trace_dual_masks(&k);
        for b in k.elements() {
            let row = walsh_row(&k, &table, b, &masks);
            for a in k.elements() {
                assert_eq!(row[a.0 as usize], walsh_coefficient(&k, &c, a, b));
            }
        }
    }

    #[test]
    fn parseval_f4_representative() {
        let k = Field::new(FieldSpec::F4).unwrap();
        let g = k.generator();
        let c = Coeffs::new(g, Elem::ZERO, Elem::ZERO, Elem::ZERO, g);
        for b in k.elements().skip(1) {
            let s: i64 = k
                .elements()
                .map(|a| walsh_coefficient(&k, &c, a, b).pow(2))
                .sum();
            assert_eq!(s, 16);
        }
        let spec = extended_walsh_spectrum(&k, &c);
        assert_eq!(spec.total(), 12);
        assert_eq!(
            WalshSpectrum::parse(&spec.to_canonical_string()),
            Some(spec)
        );
    }
}
