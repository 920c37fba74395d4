//! Deliberately naive reference code. Nothing here shares logic with `hexapn`: field
//! multiplication is schoolbook shift-and-reduce, powers are repeated multiplication
//! by squaring, and every table is built by direct enumeration.

/// GF(2^deg) with an explicit modulus, no tables.
#[derive(Clone, Copy, Debug)]
pub struct RefField {
    pub deg: u32,
    pub modulus: u32,
}

impl RefField {
    /// GF(q^2) for q = 2^m.
    pub fn new(m: u32, modulus: u32) -> RefField {
        RefField {
            deg: 2 * m,
            modulus,
        }
    }

    pub fn size(&self) -> u32 {
        1 << self.deg
    }

    pub fn q(&self) -> u64 {
        1 << (self.deg / 2)
    }

    pub fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let mut r = 0;
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a >> self.deg & 1 == 1 {
                a ^= self.modulus;
            }
        }
        r
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn frob(&self, a: u32) -> u32 {
        self.pow(a, self.q())
    }

    /// Absolute trace, 0 or 1.
    pub fn trace(&self, a: u32) -> u32 {
        let mut t = 0;
        let mut s = a;
        for _ in 0..self.deg {
            t ^= s;
            s = self.mul(s, s);
        }
        debug_assert!(t <= 1);
        t
    }

    /// x^k, where x is the class of the indeterminate (bit pattern 0b10).
    pub fn gen_pow(&self, k: u64) -> u32 {
        self.pow(2, k)
    }

    /// x(A x^2 + B x^q + C x^{2q}) + x^2(D x^q + E x^{2q}) + x^{3q}, term by term.
    pub fn hexanomial(&self, c: [u32; 5], x: u32) -> u32 {
        let q = self.q();
        let [a, b, cc, d, e] = c;
        let terms = [
            (a, 3),
            (b, q + 1),
            (cc, 2 * q + 1),
            (d, q + 2),
            (e, 2 * q + 2),
            (1, 3 * q),
        ];
        terms
            .iter()
            .fold(0, |acc, &(k, ex)| acc ^ self.mul(k, self.pow(x, ex)))
    }

    pub fn table(&self, c: [u32; 5]) -> Vec<u32> {
        (0..self.size()).map(|x| self.hexanomial(c, x)).collect()
    }

    /// W_F(a, b) = sum over x of (-1)^Tr(b F(x) + a x), straight from the definition.
    pub fn walsh(&self, table: &[u32], a: u32, b: u32) -> i64 {
        table
            .iter()
            .enumerate()
            .map(|(x, &y)| {
                if self.trace(self.mul(b, y) ^ self.mul(a, x as u32)) == 0 {
                    1
                } else {
                    -1
                }
            })
            .sum()
    }
}

pub fn ddt(table: &[u32]) -> Vec<Vec<u32>> {
    let n = table.len();
    let mut d = vec![vec![0; n]; n];
    for a in 0..n {
        for x in 0..n {
            d[a][(table[x] ^ table[x ^ a]) as usize] += 1;
        }
    }
    d
}

/// Largest DDT entry over nonzero input differences.
pub fn uniformity(table: &[u32]) -> u32 {
    ddt(table)
        .iter()
        .skip(1)
        .flat_map(|r| r.iter().copied())
        .max()
        .unwrap_or(0)
}

pub fn is_apn(table: &[u32]) -> bool {
    uniformity(table) == 2
}

pub fn is_permutation(table: &[u32]) -> bool {
    let mut seen = vec![false; table.len()];
    table
        .iter()
        .all(|&y| !std::mem::replace(&mut seen[y as usize], true))
}

/// Rank over GF(2), rows as byte vectors of 0/1.
pub fn gf2_rank(mut rows: Vec<Vec<u8>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] == 1 {
                row.iter_mut().zip(&pivot).for_each(|(v, p)| *v ^= p);
            }
        }
        rank += 1;
    }
    rank
}

/// Incidence matrix M[u][v] = [u + v in S], points of GF(2)^(2 deg) packed as x << deg | y.
fn incidence(deg: u32, members: &[usize]) -> Vec<Vec<u8>> {
    let side = 1usize << (2 * deg);
    let mut m = vec![vec![0u8; side]; side];
    for (u, row) in m.iter_mut().enumerate() {
        for &s in members {
            row[u ^ s] = 1;
        }
    }
    m
}

/// Rank of the incidence matrix of the graph {(x, F(x))}.
pub fn gamma_rank(deg: u32, table: &[u32]) -> usize {
    let g: Vec<usize> = table
        .iter()
        .enumerate()
        .map(|(x, &y)| x << deg | y as usize)
        .collect();
    gf2_rank(incidence(deg, &g))
}

/// Rank of the incidence matrix of {(a, b) : a != 0, DDT[a][b] > 0}.
pub fn delta_rank(deg: u32, table: &[u32]) -> usize {
    let d = ddt(table);
    let mut s = Vec::new();
    for (a, row) in d.iter().enumerate().skip(1) {
        for (b, &v) in row.iter().enumerate() {
            if v > 0 {
                s.push(a << deg | b);
            }
        }
    }
    gf2_rank(incidence(deg, &s))
}
