//! Integer lattice reduction (LLL and BKZ) over row bases.
//!
//! Used to hunt for short vectors in the `p`-ary lattice of window
//! assignments when exhaustive enumeration is out of reach. Reduction only
//! ever proposes candidates; callers re-check every candidate exactly.
//!
//! Gram-Schmidt data is kept in `f64` and recomputed row by row; the basis
//! itself is exact `i64`. That is adequate for the dimensions (a few
//! hundred) and entry sizes (below `p`) seen here.

#[derive(Debug, Clone)]
pub struct Lattice {
    rows: Vec<Vec<i64>>,
    mu: Vec<Vec<f64>>,
    r: Vec<f64>,
}

fn dot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

fn axpy(dst: &mut [i64], q: i64, src: &[i64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

impl Lattice {
    pub fn new(rows: Vec<Vec<i64>>) -> Self {
        let n = rows.len();
        Lattice {
            rows,
            mu: vec![vec![0.0; n]; n],
            r: vec![0.0; n],
        }
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<i64>> {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Squared Gram-Schmidt norms (valid after a reduction call).
    pub fn gso_norms(&self) -> &[f64] {
        &self.r
    }

    fn gso_row(&mut self, k: usize) {
        for j in 0..k {
            let mut s = dot(&self.rows[k], &self.rows[j]) as f64;
            for l in 0..j {
                s -= self.mu[j][l] * self.mu[k][l] * self.r[l];
            }
            self.mu[k][j] = s / self.r[j];
        }
        let mut s = dot(&self.rows[k], &self.rows[k]) as f64;
        for j in 0..k {
            s -= self.mu[k][j] * self.mu[k][j] * self.r[j];
        }
        self.r[k] = s;
    }

    fn remove_row(&mut self, k: usize) {
        self.rows.remove(k);
        self.mu.remove(k);
        self.r.remove(k);
        for row in &mut self.mu {
            row.truncate(self.rows.len());
            row.resize(self.rows.len(), 0.0);
        }
    }

    /// LLL reduction with parameter `delta`. Zero rows arising from linear
    /// dependencies are dropped.
    pub fn lll(&mut self, delta: f64) {
        let mut k = 0;
        while k < self.rows.len() {
            // size-reduce row k, repeating while large multiples were
            // subtracted (the float GSO is stale after big updates)
            loop {
                self.gso_row(k);
                let mut big = false;
                for j in (0..k).rev() {
                    let q = self.mu[k][j].round();
                    if q != 0.0 {
                        let qi = q as i64;
                        let (head, tail) = self.rows.split_at_mut(k);
                        axpy(&mut tail[0], qi, &head[j]);
                        for l in 0..j {
                            self.mu[k][l] -= q * self.mu[j][l];
                        }
                        self.mu[k][j] -= q;
                        if q.abs() > (1u64 << 20) as f64 {
                            big = true;
                        }
                    }
                }
                if !big {
                    break;
                }
            }
            self.gso_row(k);
            if self.rows[k].iter().all(|&x| x == 0) {
                self.remove_row(k);
                continue;
            }
            if k > 0 {
                let lhs = self.r[k];
                let rhs = (delta - self.mu[k][k - 1] * self.mu[k][k - 1]) * self.r[k - 1];
                if lhs < rhs {
                    self.rows.swap(k, k - 1);
                    k -= 1;
                    if k == 0 {
                        self.gso_row(0);
                    }
                    continue;
                }
            }
            k += 1;
        }
    }

    /// Shortest nonzero combination of the projected block `[start, end)`,
    /// if shorter than `bound` (squared norm).
    fn enumerate_block(&self, start: usize, end: usize, bound: f64) -> Option<Vec<i64>> {
        let n = end - start;
        let mut best = bound;
        let mut best_x = None;
        let mut x = vec![0i64; n];
        self.enum_level(start, n, n - 1, 0.0, &mut x, &mut best, &mut best_x, true);
        best_x
    }

    #[allow(clippy::too_many_arguments)]
    fn enum_level(
        &self,
        start: usize,
        n: usize,
        i: usize,
        partial: f64,
        x: &mut [i64],
        best: &mut f64,
        best_x: &mut Option<Vec<i64>>,
        top_zero: bool,
    ) {
        let gi = start + i;
        let mut c = 0.0;
        for l in i + 1..n {
            c -= self.mu[start + l][gi] * x[l] as f64;
        }
        let r = self.r[gi];
        let center = c.round() as i64;
        let visit = |xi: i64, x: &mut [i64], best: &mut f64, best_x: &mut Option<Vec<i64>>| {
            let d = xi as f64 - c;
            let norm = partial + d * d * r;
            if norm >= *best {
                return false;
            }
            // above the first nonzero coordinate only one sign is explored
            if top_zero && xi < 0 {
                return true;
            }
            x[i] = xi;
            if i == 0 {
                if x.iter().any(|&v| v != 0) {
                    *best = norm;
                    *best_x = Some(x.to_vec());
                }
            } else {
                self.enum_level(start, n, i - 1, norm, x, best, best_x, top_zero && xi == 0);
            }
            x[i] = 0;
            true
        };
        // zig-zag outward from the nearest integer; each side is monotone
        if !visit(center, x, best, best_x) {
            return;
        }
        let (mut up, mut down) = (true, true);
        let mut step = 1;
        while up || down {
            if up {
                up = visit(center + step, x, best, best_x);
            }
            if down {
                down = visit(center - step, x, best, best_x);
            }
            step += 1;
        }
    }

    /// Replaces the block `[start, end)` by an equivalent one whose first
    /// vector is `sum x_i b_{start+i}` (requires `gcd(x) = 1`).
    fn insert_combination(&mut self, start: usize, x: &[i64]) {
        let mut x = x.to_vec();
        let n = x.len();
        for i in (1..n).rev() {
            while x[i] != 0 {
                let q = x[i - 1].div_euclid(x[i]);
                x[i - 1] -= q * x[i];
                let (head, tail) = self.rows.split_at_mut(start + i);
                axpy(&mut tail[0], -q, &head[start + i - 1]);
                x.swap(i - 1, i);
                self.rows.swap(start + i - 1, start + i);
            }
        }
        if x[0] < 0 {
            for v in &mut self.rows[start] {
                *v = -*v;
            }
        }
    }

    /// BKZ with the given block size; stops after a tour without changes
    /// or `max_tours` tours.
    pub fn bkz(&mut self, block: usize, max_tours: usize) {
        const DELTA: f64 = 0.99;
        self.lll(DELTA);
        for _ in 0..max_tours {
            let mut changed = false;
            let mut j = 0;
            while j + 1 < self.rows.len() {
                let end = (j + block).min(self.rows.len());
                let bound = self.r[j] * DELTA;
                if let Some(x) = self.enumerate_block(j, end, bound) {
                    let g = x.iter().fold(0i64, |g, &v| gcd(g, v.abs()));
                    if g == 1 {
                        self.insert_combination(j, &x);
                        self.lll(DELTA);
                        changed = true;
                    }
                }
                j += 1;
            }
            if !changed {
                break;
            }
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
