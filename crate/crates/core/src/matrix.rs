//! Dense symmetric matrices and the cached adjacency powers that drive the
//! per-step edge weights.
//!
//! The weight exponent for a pair `(i, j)` is entry `(i, j)` of
//! `E = X^2 + .. + X^{k-1}` with `X = M + q (J - I - M)`, `M` the adjacency
//! matrix of the partial graph. `q` changes every step, so powers of `X` are
//! never cached. Instead `X` is split as `Y + qJ` with `Y = (1-q) M - q I`.
//! `Y` is a polynomial in `M`, and any product containing `J` collapses
//! through `J B J = (1' B 1) J` into outer products of the vectors
//! `u_p = Y^p 1`. Everything is then expressed in the cached powers
//! `M, M^2, .., M^{k-1}`, which are maintained under edge insertion with a
//! rank-2 update per term of
//! `A'^r - A^r = sum_{s<r} A'^s D A^{r-1-s}`, `D = e_i e_j' + e_j e_i'`.

use thiserror::Error;

use crate::graph::{pair_count, pair_index, Graph, MAX_K};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("girth parameter k = {0} outside 2..={MAX_K}")]
    InvalidK(usize),
    #[error("pair ({0}, {1}) is already an edge")]
    EdgePresent(usize, usize),
    #[error("pair ({0}, {1}) is not a valid vertex pair")]
    InvalidPair(usize, usize),
}

/// Row-major `n x n` real matrix kept symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseSymMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseSymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn adjacency(g: &Graph) -> Self {
        let mut m = Self::zeros(g.n());
        for (i, j) in g.edges() {
            m.set(i, j, 1.0);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Plain `O(n^3)` product.
    pub fn multiply(&self, other: &DenseSymMatrix) -> DenseSymMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = DenseSymMatrix::zeros(n);
        for i in 0..n {
            let dst = &mut out.data[i * n..(i + 1) * n];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (d, &b) in dst.iter_mut().zip(other.row(l)) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &DenseSymMatrix, s: f64) {
        assert_eq!(self.n, other.n);
        for (d, &o) in self.data.iter_mut().zip(&other.data) {
            *d += s * o;
        }
    }

    /// Replaces every off-diagonal pair by its mean.
    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }

    pub fn max_abs_diff(&self, other: &DenseSymMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    // out[a][:] += sum_p u_p[a] * v_p[:]
    fn add_outer_products(&mut self, terms: &[(&[f64], &[f64])]) {
        let n = self.n;
        for a in 0..n {
            let dst = &mut self.data[a * n..(a + 1) * n];
            for &(u, v) in terms {
                let c = u[a];
                if c == 0.0 {
                    continue;
                }
                for (d, &x) in dst.iter_mut().zip(v) {
                    *d += c * x;
                }
            }
        }
    }
}

/// Cached walk-count matrices `A, A^2, .., A^{k-1}` of the partial graph.
#[derive(Debug, Clone)]
pub struct PowerCache {
    n: usize,
    k: usize,
    t: usize,
    // powers[r - 1] = A^r
    powers: Vec<DenseSymMatrix>,
}

impl PowerCache {
    /// Cache for the empty graph on `n` vertices.
    pub fn new(n: usize, k: usize) -> Result<Self, MatrixError> {
        if !(2..=MAX_K).contains(&k) {
            return Err(MatrixError::InvalidK(k));
        }
        Ok(PowerCache {
            n,
            k,
            t: 0,
            powers: (1..k).map(|_| DenseSymMatrix::zeros(n)).collect(),
        })
    }

    /// Builds the cache from scratch by repeated multiplication.
    pub fn from_graph(g: &Graph, k: usize) -> Result<Self, MatrixError> {
        let mut cache = Self::new(g.n(), k)?;
        let a = DenseSymMatrix::adjacency(g);
        let mut cur = a.clone();
        for r in 1..k {
            if r > 1 {
                cur = cur.multiply(&a);
            }
            cache.powers[r - 1] = cur.clone();
        }
        cache.t = g.edge_count();
        Ok(cache)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of edge updates applied (edges in the cached graph).
    pub fn t(&self) -> usize {
        self.t
    }

    /// `A^r` for `1 <= r <= k - 1`.
    pub fn power(&self, r: usize) -> &DenseSymMatrix {
        &self.powers[r - 1]
    }

    pub fn adjacency(&self) -> &DenseSymMatrix {
        &self.powers[0]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.powers[0].get(i, j) > 0.5
    }

    /// Inserts edge `(i, j)` in `O(k^2 n^2)`.
    pub fn apply_edge_update(&mut self, i: usize, j: usize) -> Result<(), MatrixError> {
        let n = self.n;
        if i == j || i >= n || j >= n {
            return Err(MatrixError::InvalidPair(i, j));
        }
        if self.has_edge(i, j) {
            return Err(MatrixError::EdgePresent(i.min(j), i.max(j)));
        }
        let kmax = self.k - 1;
        let unit = |v: usize| {
            let mut e = vec![0.0; n];
            e[v] = 1.0;
            e
        };
        // Rows i, j of the old powers A^0 .. A^{k-2}.
        let mut old_i = vec![unit(i)];
        let mut old_j = vec![unit(j)];
        for q in 1..kmax {
            old_i.push(self.powers[q - 1].row(i).to_vec());
            old_j.push(self.powers[q - 1].row(j).to_vec());
        }
        // Rows i, j of the updated powers, filled in as they are finalized.
        let mut new_i = vec![unit(i)];
        let mut new_j = vec![unit(j)];
        for r in 1..=kmax {
            let mut terms: Vec<(&[f64], &[f64])> = Vec::with_capacity(2 * r);
            for s in 0..r {
                let q = r - 1 - s;
                terms.push((&new_i[s], &old_j[q]));
                terms.push((&new_j[s], &old_i[q]));
            }
            let target = &mut self.powers[r - 1];
            target.add_outer_products(&terms);
            target.symmetrize();
            if r < kmax {
                new_i.push(target.row(i).to_vec());
                new_j.push(target.row(j).to_vec());
            }
        }
        self.t += 1;
        Ok(())
    }
}

/// Pairs whose insertion creates no cycle of length `<= k`: distinct vertices
/// joined by no walk of length `1..=k-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuitableMask {
    n: usize,
    // Packed upper triangle, indexed by `pair_index`.
    bits: Vec<bool>,
}

impl SuitableMask {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => false,
            std::cmp::Ordering::Less => self.bits[pair_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.bits[pair_index(self.n, j, i)],
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Suitable pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .filter(move |&(i, j)| self.get(i, j))
    }

    /// The mask as a 0/1 matrix.
    pub fn to_matrix(&self) -> DenseSymMatrix {
        let mut m = DenseSymMatrix::zeros(self.n);
        for (i, j) in self.pairs() {
            m.set(i, j, 1.0);
        }
        m
    }
}

/// `J - sign(I + A + .. + A^{k-1})`.
pub fn suitable_mask(cache: &PowerCache) -> SuitableMask {
    let n = cache.n();
    let mut bits = vec![true; pair_count(n)];
    for power in &cache.powers {
        for i in 0..n {
            let row = power.row(i);
            let base = pair_index_row_start(n, i);
            for j in i + 1..n {
                if row[j] > 0.5 {
                    bits[base + (j - i - 1)] = false;
                }
            }
        }
    }
    SuitableMask { n, bits }
}

fn pair_index_row_start(n: usize, i: usize) -> usize {
    i * (2 * n - i - 1) / 2
}

/// `X = M + q (J - I - M)`.
pub fn walk_weight_matrix(cache: &PowerCache, q: f64) -> DenseSymMatrix {
    let n = cache.n();
    let m = cache.adjacency();
    let mut x = DenseSymMatrix::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            let a = m.get(i, j);
            x.set(i, j, a + q * (1.0 - a));
        }
    }
    x
}

/// `sum_{a=2}^{k-1} X^a` by repeated dense multiplication, `O(k n^3)`.
pub fn exponent_matrix_naive(cache: &PowerCache, q: f64) -> DenseSymMatrix {
    let n = cache.n();
    let mut e = DenseSymMatrix::zeros(n);
    if cache.k() < 3 {
        return e;
    }
    let x = walk_weight_matrix(cache, q);
    let mut cur = x.clone();
    for _ in 2..cache.k() {
        cur = cur.multiply(&x);
        e.add_scaled(&cur, 1.0);
    }
    e.symmetrize();
    e
}

fn binomial(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Same quantity as [`exponent_matrix_naive`], assembled from the cached
/// powers of `M` in `O(k^2 n^2)`.
pub fn exponent_matrix_affine(cache: &PowerCache, q: f64) -> DenseSymMatrix {
    let n = cache.n();
    let mut e = DenseSymMatrix::zeros(n);
    let k = cache.k();
    if k < 3 {
        return e;
    }
    let top = k - 1;
    let c = 1.0 - q;
    // coef(a, b): weight of M^b in Y^a = ((1-q) M - q I)^a.
    let coef = |a: usize, b: usize| binomial(a, b) * c.powi(b as i32) * (-q).powi((a - b) as i32);

    // v_b = M^b 1, u_p = Y^p 1, s_p = 1' u_p.
    let mut v = vec![vec![1.0; n]];
    for b in 1..=top {
        v.push(cache.power(b).row_sums());
    }
    let u: Vec<Vec<f64>> = (0..=top)
        .map(|p| {
            let mut out = vec![0.0; n];
            for (b, vb) in v.iter().enumerate().take(p + 1) {
                let w = coef(p, b);
                for (o, &x) in out.iter_mut().zip(vb) {
                    *o += w * x;
                }
            }
            out
        })
        .collect();
    let s: Vec<f64> = u.iter().map(|up| up.iter().sum()).collect();

    // X^a = Y^a + sum_{p,r} C_a[p][r] u_p u_r'. Accumulate D = sum_{a>=2} C_a.
    let dim = top + 1;
    let mut cur = vec![vec![0.0; dim]; dim];
    cur[0][0] = q;
    let mut acc = vec![vec![0.0; dim]; dim];
    for a in 1..top {
        let mut next = vec![vec![0.0; dim]; dim];
        for p in 0..dim {
            for r in 0..dim {
                let w = cur[p][r];
                if w == 0.0 {
                    continue;
                }
                // (u_p u_r') Y = u_p u_{r+1}';  (u_p u_r') qJ = q s_r u_p u_0'
                if r + 1 < dim {
                    next[p][r + 1] += w;
                }
                next[p][0] += q * s[r] * w;
            }
        }
        // Y^a qJ = q u_a u_0'
        next[a][0] += q;
        for p in 0..dim {
            for r in 0..dim {
                acc[p][r] += next[p][r];
            }
        }
        cur = next;
    }

    // Polynomial part: sum_b alpha_b M^b.
    for b in 0..=top {
        let alpha: f64 = (2.max(b)..=top).map(|a| coef(a, b)).sum();
        if alpha == 0.0 {
            continue;
        }
        if b == 0 {
            for i in 0..n {
                e.data[i * n + i] += alpha;
            }
        } else {
            e.add_scaled(cache.power(b), alpha);
        }
    }

    // Low-rank part: sum_p u_p w_p', w_p = sum_r D[p][r] u_r.
    let w: Vec<Vec<f64>> = (0..dim)
        .map(|p| {
            let mut out = vec![0.0; n];
            for r in 0..dim {
                let d = acc[p][r];
                if d == 0.0 {
                    continue;
                }
                for (o, &x) in out.iter_mut().zip(&u[r]) {
                    *o += d * x;
                }
            }
            out
        })
        .collect();
    let terms: Vec<(&[f64], &[f64])> = (0..dim)
        .filter(|&p| acc[p].iter().any(|&d| d != 0.0))
        .map(|p| (u[p].as_slice(), w[p].as_slice()))
        .collect();
    e.add_outer_products(&terms);
    e.symmetrize();
    e
}
