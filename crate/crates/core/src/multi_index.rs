//! Multi-indices for mixed Wirtinger derivatives.
//!
//! A coefficient of a jet is addressed by a pair (alpha, beta) of multi-indices:
//! alpha counts holomorphic derivatives per coordinate, beta antiholomorphic ones.
//! Pairs are enumerated in graded lexicographic order: ascending total degree
//! |alpha| + |beta|, ties broken lexicographically on the concatenated exponent
//! vector (alpha_1, ..., alpha_n, beta_1, ..., beta_n).

/// Maximum supported complex dimension.
pub const MAX_DIM: usize = 8;

/// Maximum supported derivative order.
pub const MAX_ORDER: usize = 5;

/// Exponent vector of length `n <= MAX_DIM`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    n: u8,
    exps: [u8; MAX_DIM],
}

impl std::fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", &self.exps[..self.n as usize])
    }
}

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "dimension must be in 1..={MAX_DIM}");
        MultiIndex {
            n: n as u8,
            exps: [0; MAX_DIM],
        }
    }

    /// Unit index e_i (0-based coordinate).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = Self::zero(n);
        assert!(i < n);
        m.exps[i] = 1;
        m
    }

    pub fn from_exps(exps: &[u8]) -> Self {
        let mut m = Self::zero(exps.len());
        m.exps[..exps.len()].copy_from_slice(exps);
        m
    }

    /// Build from a list of derivative directions, e.g. `[0, 0, 2]` gives
    /// exponents (2, 0, 1) in dimension 3.
    pub fn from_dirs(n: usize, dirs: &[usize]) -> Self {
        let mut m = Self::zero(n);
        for &d in dirs {
            assert!(d < n);
            m.exps[d] += 1;
        }
        m
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.degree() == 0
    }

    pub fn entry(&self, i: usize) -> usize {
        self.exps[i] as usize
    }

    pub fn degree(&self) -> usize {
        self.exps[..self.n as usize].iter().map(|&e| e as usize).sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        assert_eq!(self.n, other.n);
        let mut m = *self;
        for i in 0..self.n as usize {
            m.exps[i] += other.exps[i];
        }
        m
    }

    /// Componentwise subtraction; `None` if any entry would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        assert_eq!(self.n, other.n);
        let mut m = *self;
        for i in 0..self.n as usize {
            m.exps[i] = m.exps[i].checked_sub(other.exps[i])?;
        }
        Some(m)
    }

    /// alpha! as a float (orders are tiny, this is exact).
    pub fn factorial(&self) -> f64 {
        self.exps[..self.n as usize]
            .iter()
            .map(|&e| FACTORIALS[e as usize])
            .product()
    }

    /// Expand to the list of derivative directions with repetition.
    pub fn dirs(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        for i in 0..self.n as usize {
            for _ in 0..self.exps[i] {
                out.push(i);
            }
        }
        out
    }

    /// All multi-indices of dimension `n` with the given total degree,
    /// in lexicographic order.
    pub fn of_degree(n: usize, degree: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = Self::zero(n);
        fill(&mut out, &mut cur, 0, degree);
        out
    }
}

const FACTORIALS: [f64; 11] = [
    1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0, 362880.0, 3628800.0,
];

fn fill(out: &mut Vec<MultiIndex>, cur: &mut MultiIndex, pos: usize, remaining: usize) {
    let n = cur.n as usize;
    if pos == n {
        if remaining == 0 {
            out.push(*cur);
        }
        return;
    }
    if pos == n - 1 {
        cur.exps[pos] = remaining as u8;
        out.push(*cur);
        cur.exps[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur.exps[pos] = e as u8;
        fill(out, cur, pos + 1, remaining - e);
    }
    cur.exps[pos] = 0;
}

/// All pairs (alpha, beta) with |alpha| + |beta| <= max_degree, in graded
/// lexicographic order on the concatenated exponent vector.
pub fn graded_pairs(n: usize, max_degree: usize) -> Vec<(MultiIndex, MultiIndex)> {
    let mut out = Vec::new();
    for d in 0..=max_degree {
        if 2 * n <= MAX_DIM {
            // Enumerate over the 2n concatenated slots directly.
            let mut combined = Vec::new();
            let mut cur = MultiIndex::zero(2 * n);
            fill(&mut combined, &mut cur, 0, d);
            for c in combined {
                let mut a = MultiIndex::zero(n);
                let mut b = MultiIndex::zero(n);
                for i in 0..n {
                    a.exps[i] = c.exps[i];
                    b.exps[i] = c.exps[n + i];
                }
                out.push((a, b));
            }
        } else {
            // n > 4: enumerate alpha degree descending, then beta; this is the
            // same order because alpha is the prefix of the concatenation.
            for da in (0..=d).rev() {
                for a in MultiIndex::of_degree(n, da) {
                    for b in MultiIndex::of_degree(n, d - da) {
                        out.push((a, b));
                    }
                }
            }
        }
    }
    out
}
