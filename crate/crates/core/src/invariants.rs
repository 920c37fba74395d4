//! CCZ-invariant fingerprints: differential spectrum, extended Walsh spectrum and the
//! Gamma/Delta ranks. Equal fingerprints never prove equivalence; distinct ones rule it out.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diffanalysis::{ddt_row_into, spectrum_to_string, DiffProfile};
use crate::error::{Error, GateError, Result};
use crate::field::{Field, FieldSpec};
use crate::hexanomial::{value_table, Coeffs};
use crate::walsh::spectrum_from_table;

/// Largest matrix side (N^2) ranked without forcing: q <= 8.
pub const RANK_GATE: u64 = 4096;

/// Dense GF(2) matrix, rows packed into 64-bit words.
#[derive(Clone, Debug)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> BitMatrix {
        let words = cols.div_ceil(64);
        BitMatrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    /// Rank by Gaussian elimination with row-swap pivoting. Consumes the matrix.
    pub fn rank(mut self) -> usize {
        let w = self.words;
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (cw, cb) = (col / 64, 1u64 << (col % 64));
            let Some(p) = (rank..self.rows).find(|&r| self.data[r * w + cw] & cb != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..w {
                    self.data.swap(p * w + k, rank * w + k);
                }
            }
            let (head, tail) = self.data.split_at_mut((rank + 1) * w);
            let pivot = &head[rank * w + cw..];
            for row in tail.chunks_exact_mut(w) {
                if row[cw] & cb != 0 {
                    for (x, y) in row[cw..].iter_mut().zip(pivot) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKind {
    Gamma,
    Delta,
}

fn check_gate(field: &Field, force: bool) -> Result<()> {
    let side = field.size() * field.size();
    if side > RANK_GATE && !force {
        return Err(GateError {
            what: "rank matrix side",
            estimate: format!("{side} x {side} bits (q^2 = {})", field.size()),
            limit: format!("side <= {RANK_GATE}"),
        }
        .into());
    }
    Ok(())
}

/// Rank of M[u][v] = [u + v in S] for a set S of pairs (x, y), encoded as `x << deg | y`.
fn incidence_rank(set: &[bool]) -> u64 {
    let side = set.len();
    let mut m = BitMatrix::zeros(side, side);
    let members: Vec<usize> = (0..side).filter(|&s| set[s]).collect();
    for u in 0..side {
        for &s in &members {
            m.set(u, u ^ s, true);
        }
    }
    m.rank() as u64
}

pub fn gamma_rank_table(field: &Field, table: &[u32]) -> u64 {
    let deg = field.degree();
    let mut set = vec![false; table.len() * table.len()];
    for (x, &y) in table.iter().enumerate() {
        set[(x << deg) | y as usize] = true;
    }
    incidence_rank(&set)
}

pub fn delta_rank_table(field: &Field, table: &[u32]) -> u64 {
    let deg = field.degree();
    let n = table.len();
    let mut set = vec![false; n * n];
    let mut row = vec![0u32; n];
    for a in 1..n {
        ddt_row_into(table, a as u32, &mut row);
        for (b, &v) in row.iter().enumerate() {
            if v > 0 {
                set[(a << deg) | b] = true;
            }
        }
    }
    incidence_rank(&set)
}

/// Gamma or Delta rank, refused above the gate unless forced.
pub fn gamma_delta_rank(field: &Field, c: &Coeffs, which: RankKind, force: bool) -> Result<u64> {
    check_gate(field, force)?;
    let t = value_table(field, c);
    Ok(match which {
        RankKind::Gamma => gamma_rank_table(field, &t),
        RankKind::Delta => delta_rank_table(field, &t),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FingerprintOpts {
    pub ranks: bool,
    pub force_gate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub diff_spectrum: BTreeMap<u32, u64>,
    pub walsh_spectrum: BTreeMap<u64, u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma_rank: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta_rank: Option<u64>,
    pub hash: String,
}

impl Fingerprint {
    pub fn canonical_string(&self) -> String {
        let r = |x: Option<u64>| x.map_or("-".to_string(), |v| v.to_string());
        format!(
            "diff={};walsh={};gamma={};delta={}",
            spectrum_to_string(&self.diff_spectrum),
            spectrum_to_string(&self.walsh_spectrum),
            r(self.gamma_rank),
            r(self.delta_rank)
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("fingerprint serializes")
    }

    /// Short form of the hash for tables.
    pub fn short_hash(&self) -> &str {
        &self.hash[..16]
    }
}

pub fn fingerprint_table(
    field: &Field,
    table: &[u32],
    opts: FingerprintOpts,
) -> Result<Fingerprint> {
    let (gamma_rank, delta_rank) = if opts.ranks {
        check_gate(field, opts.force_gate)?;
        (
            Some(gamma_rank_table(field, table)),
            Some(delta_rank_table(field, table)),
        )
    } else {
        (None, None)
    };
    let mut fp = Fingerprint {
        diff_spectrum: DiffProfile::from_table(table).spectrum,
        walsh_spectrum: spectrum_from_table(field, table).counts,
        gamma_rank,
        delta_rank,
        hash: String::new(),
    };
    fp.hash = hex::encode(Sha256::digest(fp.canonical_string().as_bytes()));
    Ok(fp)
}

pub fn fingerprint(field: &Field, c: &Coeffs, opts: FingerprintOpts) -> Result<Fingerprint> {
    fingerprint_table(field, &value_table(field, c), opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct FingerprintGroup {
    pub id: usize,
    pub fingerprint: Fingerprint,
    pub members: Vec<Coeffs>,
}

/// Groups tuples by identical fingerprints; groups are ordered by their first member.
pub fn partition_by_fingerprint(
    items: &[(FieldSpec, Coeffs)],
    opts: FingerprintOpts,
) -> Result<Vec<FingerprintGroup>> {
    let Some((spec, _)) = items.first() else {
        return Ok(Vec::new());
    };
    if let Some((other, _)) = items.iter().find(|(s, _)| s != spec) {
        return Err(Error::MixedFields(spec.to_string(), other.to_string()));
    }
    let field = Field::new(*spec)?;
    let mut groups: Vec<FingerprintGroup> = Vec::new();
    let mut by_hash: BTreeMap<String, usize> = BTreeMap::new();
    for (_, c) in items {
        let fp = fingerprint(&field, c, opts)?;
        match by_hash.get(&fp.hash) {
            Some(&i) => groups[i].members.push(*c),
            None => {
                by_hash.insert(fp.hash.clone(), groups.len());
                groups.push(FingerprintGroup {
                    id: groups.len(),
                    fingerprint: fp,
                    members: vec![*c],
                });
            }
        }
    }
    Ok(groups)
}

/// Partition report CSV: `group,size,representative,hash`.
pub fn partition_csv(field: &Field, groups: &[FingerprintGroup]) -> String {
    let mut s = String::from("group,size,representative,hash\n");
    for g in groups {
        s.push_str(&format!(
            "{},{},\"{}\",{}\n",
            g.id,
            g.members.len(),
            g.members[0].format(field),
            g.fingerprint.hash
        ));
    }
    s
}
