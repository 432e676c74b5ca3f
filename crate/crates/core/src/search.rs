//! Constrained interpolation search.
//!
//! A polynomial of degree `< k` is fixed by its values at `k` base points.
//! The search walks the product of per-base-point value lists and, for each
//! assignment, checks every other constrained point. Each check has the
//! form `(g * f(x) + offset) mod p in [lo, hi]`, which covers both bucket
//! membership (`offset = 0`) and the symmetric window `[-t, t]`
//! (`offset = t`, range `[0, 2t]`). Values at non-base points are linear in
//! the base values, so the contributions are precomputed and the inner loop
//! is a handful of modular additions.
//!
//! Assignments are visited in lexicographic order of value-list positions
//! (first base point slowest). Work is split across threads by prefix;
//! results are merged in prefix order so output never depends on
//! scheduling.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::Result;
use crate::field::{LagrangeBasis, PrimeField};

/// `(g * f(x) + offset) mod p` must land in `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RangeConstraint {
    pub point: u64,
    pub scale: u64,
    pub offset: u64,
    pub lo: u64,
    pub hi: u64,
}

impl RangeConstraint {
    /// `f(x)` lies in the bucket `j` of the partition with inverse step `g`.
    pub fn bucket(point: u64, gamma_inv: u64, j: u64, t: u64, p: u64) -> Self {
        RangeConstraint {
            point,
            scale: gamma_inv,
            offset: 0,
            lo: j * t,
            hi: (j * t + t - 1).min(p - 1),
        }
    }

    /// `balanced(g * f(x))` lies in `[-t, t]`.
    pub fn window(point: u64, gamma_inv: u64, t: u64) -> Self {
        RangeConstraint {
            point,
            scale: gamma_inv,
            offset: t,
            lo: 0,
            hi: 2 * t,
        }
    }

    #[cfg(test)]
    pub fn accepts(&self, field: &PrimeField, value: u64) -> bool {
        let v = field.add(field.mul(self.scale, value), self.offset % field.modulus());
        self.lo <= v && v <= self.hi
    }
}

/// How [`Enumerator::find_first_split`] divides the base points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SplitPlan {
    /// Leading base points enumerated directly.
    pub outer: usize,
    /// Checks used as table keys (the first ones).
    pub keys: usize,
    /// Predicted number of elementary steps.
    pub cost: f64,
}

/// Largest inner table the split search builds.
const MAX_INNER: u64 = 1 << 22;
/// Largest number of key buckets.
const MAX_BUCKETS: u64 = 1 << 24;

impl SplitPlan {
    /// Picks the split minimizing predicted cost for domains of the given
    /// sizes and checks whose accepted ranges have the given widths.
    pub fn choose(sizes: &[u64], widths: &[u64], p: u64) -> Option<SplitPlan> {
        let k = sizes.len();
        if k < 2 || widths.is_empty() {
            return None;
        }
        let keys = if widths.len() >= 2 && p.saturating_mul(p) <= MAX_BUCKETS {
            2
        } else if p <= MAX_BUCKETS {
            1
        } else {
            return None;
        };
        let pairs: f64 = widths[..keys].iter().map(|&w| w as f64).product();
        let density = pairs / (p as f64).powi(keys as i32);
        let mut best: Option<SplitPlan> = None;
        for outer in 1..k {
            let inner: f64 = sizes[outer..].iter().map(|&s| s as f64).product();
            if inner > MAX_INNER as f64 {
                continue;
            }
            let outer_n: f64 = sizes[..outer].iter().map(|&s| s as f64).product();
            let cost = outer_n * (pairs + inner * density) + inner;
            if best.is_none_or(|b| cost < b.cost) {
                best = Some(SplitPlan { outer, keys, cost });
            }
        }
        best
    }
}

pub(crate) struct Enumerator {
    field: PrimeField,
    k: usize,
    basis: LagrangeBasis,
    domains: Vec<Vec<u64>>,
    checks: Vec<RangeConstraint>,
    /// `contrib[c][j][m]`: scaled contribution of value `domains[j][m]` at
    /// check `c`.
    contrib: Vec<Vec<Vec<u64>>>,
}

/// Outcome of a full (or capped) sweep.
pub(crate) struct Sweep {
    /// Base-point values of accepted assignments, in canonical order.
    pub hits: Vec<Vec<u64>>,
    /// Assignments examined.
    pub examined: u64,
}

impl Enumerator {
    pub fn new(
        field: PrimeField,
        base_points: &[u64],
        domains: Vec<Vec<u64>>,
        checks: Vec<RangeConstraint>,
    ) -> Result<Self> {
        let k = base_points.len();
        assert_eq!(domains.len(), k);
        let basis = LagrangeBasis::new(field, base_points)?;
        let contrib = checks
            .iter()
            .map(|c| {
                let w = basis.weights_at(c.point);
                domains
                    .iter()
                    .zip(&w)
                    .map(|(dom, &wj)| {
                        let g = field.mul(c.scale, wj);
                        dom.iter().map(|&v| field.mul(g, v)).collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Enumerator {
            field,
            k,
            basis,
            domains,
            checks,
            contrib,
        })
    }

    pub fn basis(&self) -> &LagrangeBasis {
        &self.basis
    }

    /// Number of leading coordinates used to split work into chunks.
    fn prefix_len(&self) -> usize {
        let mut len = 0;
        let mut chunks = 1usize;
        while len + 1 < self.k && chunks < 256 {
            chunks = chunks.saturating_mul(self.domains[len].len());
            len += 1;
        }
        if self.k == 1 {
            1
        } else {
            len
        }
    }

    fn chunk_count(&self, prefix: usize) -> usize {
        self.domains[..prefix].iter().map(|d| d.len()).product()
    }

    fn chunk_size(&self, prefix: usize) -> u64 {
        self.domains[prefix..].iter().map(|d| d.len() as u64).product()
    }

    /// Walks one chunk, calling `visit` with base values of each accepted
    /// assignment and its offset within the chunk. Stops when `visit`
    /// returns `false` or `stop` reports cancellation.
    fn walk_chunk(
        &self,
        prefix: usize,
        chunk: usize,
        stop: &dyn Fn() -> bool,
        visit: &mut dyn FnMut(&[u64], u64) -> bool,
    ) -> u64 {
        let k = self.k;
        let f = &self.field;
        let nchecks = self.checks.len();
        let mut idx = vec![0usize; k];
        // decode prefix (first coordinate slowest)
        let mut rem = chunk;
        for j in (0..prefix).rev() {
            let len = self.domains[j].len();
            idx[j] = rem % len;
            rem /= len;
        }
        if self.domains[prefix..].iter().any(|d| d.is_empty()) {
            return 0;
        }

        // partial[l * nchecks + c] = offset_c + sum_{j < l} contrib[c][j][idx_j]
        let mut partial = vec![0u64; (k + 1) * nchecks];
        for (c, chk) in self.checks.iter().enumerate() {
            partial[c] = chk.offset % f.modulus();
        }
        let refresh = |partial: &mut Vec<u64>, idx: &[usize], from: usize| {
            for l in from..k {
                for c in 0..nchecks {
                    partial[(l + 1) * nchecks + c] =
                        f.add(partial[l * nchecks + c], self.contrib[c][l][idx[l]]);
                }
            }
        };
        refresh(&mut partial, &idx, 0);

        let mut values: Vec<u64> = (0..k).map(|j| self.domains[j][idx[j]]).collect();
        let last = k - 1;
        let mut examined = 0u64;
        let mut counter = 0u32;
        loop {
            // innermost coordinate; when the prefix covers every coordinate
            // the chunk is a single assignment
            let range = if prefix == k {
                idx[last]..idx[last] + 1
            } else {
                0..self.domains[last].len()
            };
            let base = last * nchecks;
            for m in range {
                examined += 1;
                let ok = self.checks.iter().enumerate().all(|(c, chk)| {
                    let v = f.add(partial[base + c], self.contrib[c][last][m]);
                    chk.lo <= v && v <= chk.hi
                });
                if ok {
                    values[last] = self.domains[last][m];
                    if !visit(&values, examined - 1) {
                        return examined;
                    }
                }
            }
            counter += 1;
            if counter.is_multiple_of(64) && stop() {
                return examined;
            }
            // advance the odometer over coordinates prefix..last
            let mut level = last;
            loop {
                if level == prefix || level == 0 {
                    return examined;
                }
                level -= 1;
                if level < prefix {
                    return examined;
                }
                idx[level] += 1;
                if idx[level] < self.domains[level].len() {
                    break;
                }
                idx[level] = 0;
            }
            for j in level + 1..=last {
                idx[j] = 0;
            }
            for j in level..last {
                values[j] = self.domains[j][idx[j]];
            }
            refresh(&mut partial, &idx, level);
        }
    }

    /// Plan for [`Enumerator::find_first_split`], or `None` when the split
    /// does not apply.
    #[cfg(test)]
    pub fn split_plan(&self) -> Option<SplitPlan> {
        let widths: Vec<u64> = self.checks.iter().map(|c| c.hi - c.lo + 1).collect();
        let sizes: Vec<u64> = self.domains.iter().map(|d| d.len() as u64).collect();
        SplitPlan::choose(&sizes, &widths, self.field.modulus())
    }

    /// Same result as [`Enumerator::find_first`], found by meet in the
    /// middle: the trailing base points form an inner table keyed by their
    /// contribution to one or two checks, so each leading assignment only
    /// visits inner assignments that already satisfy those checks. The
    /// returned work is the number of complete assignments evaluated.
    pub fn find_first_split(
        &self,
        plan: &SplitPlan,
        pred: &(dyn Fn(&[u64]) -> bool + Sync),
    ) -> (Option<Vec<u64>>, u64) {
        let f = &self.field;
        let p = f.modulus();
        let k = self.k;
        let a = plan.outer;
        let keys = plan.keys;
        let inner_sizes: Vec<usize> = self.domains[a..].iter().map(|d| d.len()).collect();
        let inner_total: usize = inner_sizes.iter().product();
        let outer_sizes: Vec<usize> = self.domains[..a].iter().map(|d| d.len()).collect();
        let outer_total: usize = outer_sizes.iter().product();
        let decode = |mut r: usize, sizes: &[usize], idx: &mut [usize]| {
            for j in (0..sizes.len()).rev() {
                idx[j] = r % sizes[j];
                r /= sizes[j];
            }
        };
        let key_of = |vals: &[u64]| vals.iter().fold(0usize, |acc, &v| acc * p as usize + v as usize);

        // inner contributions to the key checks, bucketed (CSR layout)
        let buckets = (p as usize).pow(keys as u32);
        let mut key = vec![0u32; inner_total];
        let mut idx = vec![0usize; k - a];
        let mut kv = vec![0u64; keys];
        let mut counts = vec![0u32; buckets + 1];
        for (r, slot) in key.iter_mut().enumerate() {
            decode(r, &inner_sizes, &mut idx);
            for (c, v) in kv.iter_mut().enumerate() {
                *v = idx
                    .iter()
                    .enumerate()
                    .fold(0, |acc, (j, &m)| f.add(acc, self.contrib[c][a + j][m]));
            }
            *slot = key_of(&kv) as u32;
            counts[*slot as usize + 1] += 1;
        }
        for b in 0..buckets {
            counts[b + 1] += counts[b];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0u32; inner_total];
        for (r, &kb) in key.iter().enumerate() {
            items[fill[kb as usize] as usize] = r as u32;
            fill[kb as usize] += 1;
        }
        drop(key);

        let work = AtomicU64::new(0);
        let nchecks = self.checks.len();
        let hit = (0..outer_total).into_par_iter().find_map_first(|o| {
            let mut oidx = vec![0usize; a];
            decode(o, &outer_sizes, &mut oidx);
            let u: Vec<u64> = (0..nchecks)
                .map(|c| {
                    oidx.iter().enumerate().fold(self.checks[c].offset % p, |acc, (j, &m)| {
                        f.add(acc, self.contrib[c][j][m])
                    })
                })
                .collect();
            // inner key values compatible with this outer assignment
            let allowed: Vec<Vec<u64>> = (0..keys)
                .map(|c| {
                    let chk = &self.checks[c];
                    (chk.lo..=chk.hi).map(|d| f.sub(d, u[c])).collect()
                })
                .collect();
            let mut cand: Vec<u32> = Vec::new();
            let mut combo = vec![0usize; keys];
            'outer: loop {
                let kv: Vec<u64> = combo.iter().enumerate().map(|(c, &i)| allowed[c][i]).collect();
                let b = key_of(&kv);
                cand.extend_from_slice(&items[starts[b] as usize..starts[b + 1] as usize]);
                for c in (0..keys).rev() {
                    combo[c] += 1;
                    if combo[c] < allowed[c].len() {
                        continue 'outer;
                    }
                    combo[c] = 0;
                }
                break;
            }
            cand.sort_unstable();
            work.fetch_add(cand.len() as u64, Ordering::Relaxed);
            let mut iidx = vec![0usize; k - a];
            for r in cand {
                decode(r as usize, &inner_sizes, &mut iidx);
                let ok = (keys..nchecks).all(|c| {
                    let chk = &self.checks[c];
                    let v = iidx
                        .iter()
                        .enumerate()
                        .fold(u[c], |acc, (j, &m)| f.add(acc, self.contrib[c][a + j][m]));
                    chk.lo <= v && v <= chk.hi
                });
                if !ok {
                    continue;
                }
                let vals: Vec<u64> = oidx
                    .iter()
                    .enumerate()
                    .map(|(j, &m)| self.domains[j][m])
                    .chain(iidx.iter().enumerate().map(|(j, &m)| self.domains[a + j][m]))
                    .collect();
                if pred(&vals) {
                    return Some(vals);
                }
            }
            None
        });
        (hit, work.into_inner())
    }

    /// Collects accepted assignments, at most `limit` per chunk and overall.
    pub fn collect(&self, limit: usize) -> Sweep {
        let prefix = self.prefix_len();
        let chunks = self.chunk_count(prefix);
        let never = || false;
        let per_chunk: Vec<(Vec<Vec<u64>>, u64)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut hits = Vec::new();
                let examined = self.walk_chunk(prefix, c, &never, &mut |vals, _| {
                    hits.push(vals.to_vec());
                    hits.len() < limit
                });
                (hits, examined)
            })
            .collect();
        let mut hits = Vec::new();
        let mut examined = 0;
        for (h, e) in per_chunk {
            examined += e;
            hits.extend(h);
        }
        hits.truncate(limit);
        Sweep { hits, examined }
    }

    /// First accepted assignment (in canonical order) satisfying `pred`,
    /// with its 1-based position in the full enumeration order. Without a
    /// hit, returns the size of the space.
    pub fn find_first(
        &self,
        pred: &(dyn Fn(&[u64]) -> bool + Sync),
    ) -> (Option<Vec<u64>>, u64) {
        let prefix = self.prefix_len();
        let chunks = self.chunk_count(prefix);
        let size = self.chunk_size(prefix);
        let best = AtomicUsize::new(usize::MAX);
        let found: Vec<Option<(usize, Vec<u64>, u64)>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                if best.load(Ordering::Relaxed) < c {
                    return None;
                }
                let stop = || best.load(Ordering::Relaxed) < c;
                let mut hit = None;
                self.walk_chunk(prefix, c, &stop, &mut |vals, pos| {
                    if pred(vals) {
                        hit = Some((c, vals.to_vec(), pos));
                        best.fetch_min(c, Ordering::Relaxed);
                        false
                    } else {
                        true
                    }
                });
                hit
            })
            .collect();
        match found.into_iter().flatten().min_by_key(|(c, _, _)| *c) {
            Some((c, vals, pos)) => (Some(vals), c as u64 * size + pos + 1),
            None => (None, chunks as u64 * size),
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Poly;

    /// Checks with the enumerator against naive evaluation of every
    /// polynomial.
    #[test]
    fn collect_matches_naive_filter() {
        let f = PrimeField::new(13).unwrap();
        let base = [1u64, 2];
        let domains = vec![(0..13).collect::<Vec<_>>(), (0..13).collect::<Vec<_>>()];
        let checks = vec![
            RangeConstraint::window(5, 3, 2),
            RangeConstraint::bucket(7, 4, 1, 3, 13),
        ];
        let e = Enumerator::new(f, &base, domains, checks.clone()).unwrap();
        let sweep = e.collect(usize::MAX);
        assert_eq!(sweep.examined, 169);

        let mut naive = Vec::new();
        for a in 0..13u64 {
            for b in 0..13u64 {
                let g = Poly::new(f, vec![a, b]);
                if checks.iter().all(|c| c.accepts(&f, g.eval(c.point))) {
                    naive.push(g);
                }
            }
        }
        let mut got: Vec<Poly> = sweep
            .hits
            .iter()
            .map(|v| e.basis().interpolate(v))
            .collect();
        let key = |p: &Poly| p.padded(2);
        got.sort_by_key(key);
        naive.sort_by_key(key);
        assert_eq!(got, naive);
    }

    #[test]
    fn find_first_is_canonical() {
        let f = PrimeField::new(31).unwrap();
        let base = [0u64, 1, 2];
        let dom: Vec<u64> = (0..31).collect();
        let checks = vec![RangeConstraint::window(9, 1, 3)];
        let e = Enumerator::new(f, &base, vec![dom.clone(), dom.clone(), dom], checks).unwrap();
        let pred = |v: &[u64]| v[0] == 7 && v[2] > 20;
        let (hit, pos) = e.find_first(&pred);
        // sequential scan in the same order
        let all = e.collect(usize::MAX).hits;
        let first = all.iter().find(|v| pred(v)).unwrap();
        assert_eq!(hit.as_deref(), Some(first.as_slice()));
        let seq_pos = {
            let mut n = 0u64;
            'o: for a in 0..31u64 {
                for b in 0..31u64 {
                    for c in 0..31u64 {
                        n += 1;
                        if [a, b, c] == first[..] {
                            break 'o;
                        }
                    }
                }
            }
            n
        };
        assert_eq!(pos, seq_pos);
    }

    #[test]
    fn single_coordinate() {
        let f = PrimeField::new(7).unwrap();
        let e = Enumerator::new(
            f,
            &[3],
            vec![vec![0, 1, 2, 3, 4, 5, 6]],
            vec![RangeConstraint::bucket(5, 1, 0, 2, 7)],
        )
        .unwrap();
        let s = e.collect(usize::MAX);
        assert_eq!(s.examined, 7);
        assert_eq!(s.hits, vec![vec![0], vec![1]]);
    }

    #[test]
    fn split_agrees_with_walk() {
        let f = PrimeField::new(29).unwrap();
        let t = 4i64;
        let window = |g: u64| -> Vec<u64> { (-t..=t).map(|a| f.mul(g, f.reduce_i64(a))).collect() };
        for seed in 0..12u64 {
            let gam = |i: u64| (i * 7 + seed * 3) % 28 + 1;
            let base = [0u64, 1, 2, 3];
            let domains: Vec<Vec<u64>> = base.iter().map(|&i| window(gam(i))).collect();
            let checks: Vec<RangeConstraint> = (4..12u64)
                .map(|i| RangeConstraint::window(i, f.inv(gam(i)).unwrap(), t as u64))
                .collect();
            let e = Enumerator::new(f, &base, domains, checks).unwrap();
            let plan = e.split_plan().unwrap();
            let preds: [&(dyn Fn(&[u64]) -> bool + Sync); 2] =
                [&|v: &[u64]| v.iter().any(|&x| x != 0), &|v: &[u64]| v[3] != 0 && v[0] == 0];
            for pred in preds {
                let (a, _) = e.find_first(pred);
                let (b, _) = e.find_first_split(&plan, pred);
                assert_eq!(a, b, "seed {seed}");
            }
        }
    }
}
