//! Reconstruction from leaked bucket indices.
//!
//! Every node that reports bucket `j` pins its symbol to one of at most `t`
//! values. Fixing the values at `k` reporting nodes fixes the polynomial,
//! so the consistent polynomials are found by walking the product of the
//! `k` smallest buckets and filtering on the remaining buckets. That is at
//! most `t^k` interpolations.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::field::{FieldElement, Poly};
use crate::schemes::{DecodingScheme, LeakageScheme, RepairScheme, Transcript};
use crate::search::{Enumerator, RangeConstraint};

/// Largest `p^k` the brute-force oracle accepts.
pub const BRUTE_FORCE_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    /// Sorted by coefficient vector.
    pub candidates: Vec<Poly>,
    /// `true` when the whole search space was covered.
    pub exhaustive: bool,
    /// Assignments examined (each is one implicit interpolation).
    pub interpolations: u64,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// Outcome of a successful repair with search statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct RepairOutcome {
    pub value: FieldElement,
    /// Number of consistent polynomials (all agreeing at the target).
    pub candidates: u64,
    pub interpolations: u64,
}

/// Builds the search for a transcript: `None` when `k = 0`.
fn build_search(scheme: &dyn LeakageScheme, transcript: &Transcript) -> Result<Option<Enumerator>> {
    let buckets = transcript.aligned_buckets(scheme)?;
    let field = scheme.field();
    let p = field.modulus();
    let k = scheme.dimension();
    if k == 0 {
        return Ok(None);
    }
    let nodes = scheme.nodes();
    let sizes: Vec<u64> = nodes
        .iter()
        .zip(&buckets)
        .map(|(n, &j)| n.partition.bucket_size(j))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by_key(|&i| (sizes[i], nodes[i].index));
    let chosen: Vec<usize> = order.iter().copied().take(k).collect();

    let mut base_points = Vec::with_capacity(k);
    let mut domains = Vec::with_capacity(k);
    for &i in &chosen {
        base_points.push(nodes[i].index);
        domains.push(nodes[i].partition.bucket_members(buckets[i])?);
    }
    // with fewer than k reporting nodes the rest of the basis is free
    if base_points.len() < k {
        let used: Vec<u64> = nodes.iter().map(|n| n.index).collect();
        let spare = scheme
            .silent()
            .iter()
            .copied()
            .chain(field.residues())
            .filter(|x| !used.contains(x));
        for x in spare {
            if base_points.len() == k {
                break;
            }
            if !base_points.contains(&x) {
                base_points.push(x);
                domains.push(field.residues().collect());
            }
        }
        if base_points.len() < k {
            return Err(Error::TooFewPoints {
                needed: k,
                available: p,
            });
        }
    }
    let checks = order[chosen.len()..]
        .iter()
        .map(|&i| {
            let part = &nodes[i].partition;
            RangeConstraint::bucket(nodes[i].index, part.gamma_inv(), buckets[i], part.width(), p)
        })
        .collect();
    Enumerator::new(field, &base_points, domains, checks).map(Some)
}

fn sort_candidates(mut v: Vec<Poly>, k: usize) -> Vec<Poly> {
    v.sort_by_key(|f| f.padded(k));
    v
}

/// Every polynomial of degree `< k` consistent with the transcript, capped
/// at `limit` members.
pub fn enumerate_consistent_limited(
    scheme: &dyn LeakageScheme,
    transcript: &Transcript,
    limit: usize,
) -> Result<CandidateSet> {
    let k = scheme.dimension();
    let Some(search) = build_search(scheme, transcript)? else {
        // only the zero polynomial, which leaks bucket 0 everywhere
        let zero_ok = transcript.entries.iter().all(|e| e.bucket == 0);
        let candidates = if zero_ok && limit > 0 {
            vec![Poly::zero(scheme.field())]
        } else {
            Vec::new()
        };
        return Ok(CandidateSet {
            candidates,
            exhaustive: true,
            interpolations: 1,
        });
    };
    let sweep = search.collect(limit);
    let exhaustive = sweep.hits.len() < limit;
    let candidates = sweep
        .hits
        .iter()
        .map(|vals| search.basis().interpolate(vals))
        .collect();
    Ok(CandidateSet {
        candidates: sort_candidates(candidates, k),
        exhaustive,
        interpolations: sweep.examined,
    })
}

/// The complete set of polynomials consistent with the transcript.
pub fn enumerate_consistent(scheme: &dyn LeakageScheme, transcript: &Transcript) -> Result<CandidateSet> {
    enumerate_consistent_limited(scheme, transcript, usize::MAX)
}

/// Recovers the symbol at the scheme's target node.
pub fn repair(scheme: &RepairScheme, transcript: &Transcript) -> Result<FieldElement> {
    repair_detailed(scheme, transcript).map(|o| o.value)
}

pub fn repair_detailed(scheme: &RepairScheme, transcript: &Transcript) -> Result<RepairOutcome> {
    let field = scheme.field();
    let target = scheme.target();
    let Some(search) = build_search(scheme, transcript)? else {
        let set = enumerate_consistent(scheme, transcript)?;
        if set.is_empty() {
            return Err(Error::InconsistentTranscript);
        }
        return Ok(RepairOutcome {
            value: field.zero(),
            candidates: 1,
            interpolations: set.interpolations,
        });
    };
    let weights = search.basis().weights_at(target);
    let at_target = |vals: &[u64]| {
        vals.iter()
            .zip(&weights)
            .fold(0, |acc, (&v, &w)| field.add(acc, field.mul(v, w)))
    };
    let (first, work1) = search.find_first(&|_: &[u64]| true);
    let first = first.ok_or(Error::InconsistentTranscript)?;
    let value = at_target(&first);
    let count = AtomicU64::new(0);
    let (other, work2) = search.find_first(&|vals: &[u64]| {
        count.fetch_add(1, Ordering::Relaxed);
        at_target(vals) != value
    });
    if other.is_some() {
        return Err(Error::AmbiguousRepair);
    }
    Ok(RepairOutcome {
        value: field.elem(value),
        candidates: count.into_inner(),
        interpolations: work1 + work2,
    })
}

/// Recovers the stored polynomial (and with it the whole codeword).
pub fn decode(scheme: &DecodingScheme, transcript: &Transcript) -> Result<Poly> {
    let set = enumerate_consistent_limited(scheme, transcript, 2)?;
    match set.candidates.len() {
        0 => Err(Error::InconsistentTranscript),
        1 => Ok(set.candidates.into_iter().next().unwrap()),
        _ => Err(Error::AmbiguousDecoding),
    }
}

/// Reference implementation: tries all `p^k` polynomials.
pub fn brute_force_consistent(scheme: &dyn LeakageScheme, transcript: &Transcript) -> Result<Vec<Poly>> {
    let buckets = transcript.aligned_buckets(scheme)?;
    let field = scheme.field();
    let p = field.modulus();
    let k = scheme.dimension();
    let total = (p as u128).saturating_pow(k as u32);
    if total > BRUTE_FORCE_LIMIT as u128 {
        return Err(Error::SearchBudgetExceeded {
            needed: total,
            budget: BRUTE_FORCE_LIMIT,
        });
    }
    let nodes = scheme.nodes();
    let mut out = Vec::new();
    for mut idx in 0..total as u64 {
        let mut coeffs = vec![0u64; k];
        for c in coeffs.iter_mut() {
            *c = idx % p;
            idx /= p;
        }
        let f = Poly::new(field, coeffs);
        if nodes
            .iter()
            .zip(&buckets)
            .all(|(n, &j)| n.partition.leak(f.eval(n.index)) == j)
        {
            out.push(f);
        }
    }
    Ok(sort_candidates(out, k))
}
