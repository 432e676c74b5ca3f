//! The two explicit leakage constructions and their transcripts.
//!
//! * [`RepairScheme`]: an `[n+1, k]` code on the points `0..=n`; every node
//!   `i != ell` leaks its bucket under the step `gamma_i = i - ell` with
//!   width `ceil(p/8)`, i.e. three bits, and the symbol at `ell` is rebuilt.
//! * [`DecodingScheme`]: the full-length `[p, k]` code; the nodes in `M`
//!   stay silent, every other node leaks `B` bits under
//!   `gamma_i = prod_j (i - l_j)^{-1}`, and the whole codeword is rebuilt.
//!
//! Node indices double as evaluation points (`alpha_i = i`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ceil_div, ceil_log2, Poly, PrimeField};
use crate::partition::PartitionScheme;

/// Downward nudge applied to the floating-point admissibility bound so that
/// ties break toward rejection.
pub const ADMISSIBILITY_NUDGE: f64 = 1.0 / (1u64 << 40) as f64;

/// One participating node: its index (= evaluation point) and the
/// partition it leaks through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node {
    pub index: u64,
    pub partition: PartitionScheme,
}

impl Node {
    pub fn gamma(&self) -> u64 {
        self.partition.gamma()
    }
}

/// JSON descriptor identifying a scheme; field names are part of the file
/// format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SchemeDescriptor {
    Kloosterman {
        p: u64,
        n: u64,
        ell: u64,
        k: usize,
        t: u64,
    },
    Weil {
        p: u64,
        #[serde(rename = "B")]
        bits: u32,
        k: usize,
        missing: Vec<u64>,
        t: u64,
    },
}

/// Behaviour shared by both constructions.
pub trait LeakageScheme {
    fn field(&self) -> PrimeField;
    /// Code dimension: polynomials have degree `< k`.
    fn dimension(&self) -> usize;
    fn width(&self) -> u64;
    /// Participating nodes, ascending by index.
    fn nodes(&self) -> &[Node];
    /// Evaluation points of nodes that send nothing.
    fn silent(&self) -> &[u64];
    fn descriptor(&self) -> SchemeDescriptor;

    fn bits_per_node(&self) -> u32 {
        ceil_log2(ceil_div(self.field().modulus(), self.width()))
    }

    /// Total bits sent by all participating nodes.
    fn bandwidth(&self) -> u64 {
        self.nodes().len() as u64 * self.bits_per_node() as u64
    }
}

/// Bits needed to send `k` full symbols, the cost of naive repair.
pub fn trivial_repair_bits(field: PrimeField, k: usize) -> u64 {
    k as u64 * field.symbol_bits() as u64
}

/// Repair scheme on the points `0..=n` for the node `ell`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepairScheme {
    field: PrimeField,
    n: u64,
    ell: u64,
    k: usize,
    t: u64,
    nodes: Vec<Node>,
    silent: [u64; 1],
    in_theorem_range: bool,
}

/// `[2 exp((ln p)^{2/3} (ln ln p)^{1/3}), sqrt(p)]`, the code lengths for
/// which the three-bit repair is proven (for large enough `p`).
pub fn kloosterman_length_range(p: u64) -> (f64, f64) {
    let lp = (p as f64).ln();
    let lower = 2.0 * (lp.powf(2.0 / 3.0) * lp.ln().cbrt()).exp();
    (lower, (p as f64).sqrt())
}

impl RepairScheme {
    /// The three-bit instance: `k = 3`, `t = ceil(p/8)`, `gamma_i = i - ell`.
    pub fn kloosterman(p: u64, n: u64, ell: u64) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if n >= p {
            return Err(Error::BadLength { len: n + 1, p });
        }
        if ell > n {
            return Err(Error::BadIndex { ell, n });
        }
        let t = ceil_div(p, 8);
        let (lo, hi) = kloosterman_length_range(p);
        let mut scheme = RepairScheme {
            field,
            n,
            ell,
            k: 3,
            t,
            nodes: Vec::new(),
            silent: [ell],
            in_theorem_range: lo <= n as f64 && n as f64 <= hi,
        };
        scheme.rebuild_nodes()?;
        Ok(scheme)
    }

    /// Same layout with a different code dimension.
    pub fn with_dimension(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    /// Same layout with a different bucket width.
    pub fn with_width(mut self, t: u64) -> Result<Self> {
        self.t = t;
        self.rebuild_nodes()?;
        Ok(self)
    }

    fn rebuild_nodes(&mut self) -> Result<()> {
        let f = self.field;
        self.nodes = (0..=self.n)
            .filter(|&i| i != self.ell)
            .map(|i| {
                Ok(Node {
                    index: i,
                    partition: PartitionScheme::from_raw(f, self.t, f.sub(i, self.ell))?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(())
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn target(&self) -> u64 {
        self.ell
    }

    /// `false` when `n` lies outside the proven range; validity of the
    /// instance then rests on the verifier alone.
    pub fn in_theorem_range(&self) -> bool {
        self.in_theorem_range
    }
}

impl LeakageScheme for RepairScheme {
    fn field(&self) -> PrimeField {
        self.field
    }
    fn dimension(&self) -> usize {
        self.k
    }
    fn width(&self) -> u64 {
        self.t
    }
    fn nodes(&self) -> &[Node] {
        &self.nodes
    }
    fn silent(&self) -> &[u64] {
        &self.silent
    }
    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor::Kloosterman {
            p: self.field.modulus(),
            n: self.n,
            ell: self.ell,
            k: self.k,
            t: self.t,
        }
    }
}

/// `cos(2 pi / 2^B + 2 pi / p) * sqrt(p)`, the cap on `k + m`.
pub fn weil_bound(p: u64, bits: u32) -> f64 {
    use std::f64::consts::TAU;
    let pf = p as f64;
    (TAU / 2f64.powi(bits as i32) + TAU / pf).cos() * pf.sqrt()
}

/// Largest `k` with `k + m` under the cap, or an error if even `k = 1`
/// is too large.
pub fn admissible_dimension(p: u64, bits: u32, m: usize) -> Result<usize> {
    if bits < 3 {
        return Err(Error::BadBitBudget(bits));
    }
    let bound = weil_bound(p, bits);
    let cap = (bound - ADMISSIBILITY_NUDGE).floor();
    if cap < (m + 1) as f64 {
        return Err(Error::NoAdmissibleDimension {
            bound,
            needed: m + 1,
        });
    }
    Ok(cap as usize - m)
}

/// Full-length decoding scheme with silent set `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodingScheme {
    field: PrimeField,
    bits: u32,
    k: usize,
    t: u64,
    missing: Vec<u64>,
    nodes: Vec<Node>,
}

impl DecodingScheme {
    /// The `B`-bit instance; rejects `(k, m)` above the admissible cap.
    pub fn weil(p: u64, bits: u32, k: usize, missing: &[u64]) -> Result<Self> {
        let scheme = Self::weil_unchecked(p, bits, k, missing)?;
        let bound = weil_bound(p, bits);
        let sum = k + scheme.missing.len();
        if sum as f64 > bound - ADMISSIBILITY_NUDGE {
            return Err(Error::InadmissibleDimension { sum, bound });
        }
        Ok(scheme)
    }

    /// The same construction without the admissibility check. Decoding may
    /// then be ambiguous; useful for probing where the guarantee ends.
    pub fn weil_unchecked(p: u64, bits: u32, k: usize, missing: &[u64]) -> Result<Self> {
        if bits < 3 {
            return Err(Error::BadBitBudget(bits));
        }
        let field = PrimeField::new(p)?;
        let t = if bits >= 64 { 1 } else { ceil_div(p, 1u64 << bits).max(1) };
        Self::with_width(field, k, missing, t).map(|mut s| {
            s.bits = bits;
            s
        })
    }

    /// Weil multipliers with an arbitrary bucket width `t`.
    pub fn with_width(field: PrimeField, k: usize, missing: &[u64], t: u64) -> Result<Self> {
        let p = field.modulus();
        let mut m: Vec<u64> = Vec::with_capacity(missing.len());
        for &l in missing {
            if l >= p || m.contains(&l) {
                return Err(Error::BadMissingSet(l));
            }
            m.push(l);
        }
        m.sort_unstable();
        let nodes = (0..p)
            .filter(|i| m.binary_search(i).is_err())
            .map(|i| {
                let prod = m
                    .iter()
                    .fold(1u64, |acc, &l| field.mul(acc, field.sub(i, l)));
                Ok(Node {
                    index: i,
                    partition: PartitionScheme::from_raw(field, t, field.inv(prod)?)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let bits = ceil_log2(ceil_div(p, t));
        Ok(DecodingScheme {
            field,
            bits,
            k,
            t,
            missing: m,
            nodes,
        })
    }

    pub fn bit_budget(&self) -> u32 {
        self.bits
    }

    pub fn missing(&self) -> &[u64] {
        &self.missing
    }
}

impl LeakageScheme for DecodingScheme {
    fn field(&self) -> PrimeField {
        self.field
    }
    fn dimension(&self) -> usize {
        self.k
    }
    fn width(&self) -> u64 {
        self.t
    }
    fn nodes(&self) -> &[Node] {
        &self.nodes
    }
    fn silent(&self) -> &[u64] {
        &self.missing
    }
    fn descriptor(&self) -> SchemeDescriptor {
        SchemeDescriptor::Weil {
            p: self.field.modulus(),
            bits: self.bits,
            k: self.k,
            missing: self.missing.clone(),
            t: self.t,
        }
    }
}

/// Either construction, as rebuilt from a descriptor.
#[derive(Debug, Clone, PartialEq)]
pub enum Scheme {
    Repair(RepairScheme),
    Decoding(DecodingScheme),
}

impl Scheme {
    pub fn from_descriptor(d: &SchemeDescriptor) -> Result<Scheme> {
        match d {
            SchemeDescriptor::Kloosterman { p, n, ell, k, t } => {
                let s = RepairScheme::kloosterman(*p, *n, *ell)?.with_dimension(*k);
                let s = if s.width() == *t { s } else { s.with_width(*t)? };
                Ok(Scheme::Repair(s))
            }
            SchemeDescriptor::Weil {
                p,
                bits,
                k,
                missing,
                t,
            } => {
                let s = DecodingScheme::weil(*p, *bits, *k, missing)?;
                if s.width() != *t {
                    return Err(Error::Parse(format!(
                        "descriptor width t={t} does not match ceil(p/2^B)={}",
                        s.width()
                    )));
                }
                Ok(Scheme::Decoding(s))
            }
        }
    }

    fn inner(&self) -> &dyn LeakageScheme {
        match self {
            Scheme::Repair(s) => s,
            Scheme::Decoding(s) => s,
        }
    }
}

impl LeakageScheme for Scheme {
    fn field(&self) -> PrimeField {
        self.inner().field()
    }
    fn dimension(&self) -> usize {
        self.inner().dimension()
    }
    fn width(&self) -> u64 {
        self.inner().width()
    }
    fn nodes(&self) -> &[Node] {
        self.inner().nodes()
    }
    fn silent(&self) -> &[u64] {
        self.inner().silent()
    }
    fn descriptor(&self) -> SchemeDescriptor {
        self.inner().descriptor()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranscriptEntry {
    pub node: u64,
    pub bucket: u64,
}

/// The leaked messages of one run; doubles as the transcript file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transcript {
    pub scheme: SchemeDescriptor,
    pub entries: Vec<TranscriptEntry>,
    pub bits_per_node: u32,
}

impl Transcript {
    pub fn buckets(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.bucket).collect()
    }

    /// Bucket index per participating node, in the scheme's node order.
    ///
    /// Fails unless the transcript names exactly the participating nodes,
    /// each once, with in-range buckets.
    pub fn aligned_buckets(&self, scheme: &dyn LeakageScheme) -> Result<Vec<u64>> {
        if self.scheme != scheme.descriptor() {
            return Err(Error::TranscriptMismatch("scheme descriptor differs".into()));
        }
        if self.bits_per_node != scheme.bits_per_node() {
            return Err(Error::TranscriptMismatch(format!(
                "bits_per_node {} != {}",
                self.bits_per_node,
                scheme.bits_per_node()
            )));
        }
        let nodes = scheme.nodes();
        if self.entries.len() != nodes.len() {
            return Err(Error::TranscriptMismatch(format!(
                "{} entries for {} participating nodes",
                self.entries.len(),
                nodes.len()
            )));
        }
        let mut sorted = self.entries.clone();
        sorted.sort_by_key(|e| e.node);
        let mut out = Vec::with_capacity(nodes.len());
        for (e, node) in sorted.iter().zip(nodes) {
            if e.node != node.index {
                return Err(Error::TranscriptMismatch(format!(
                    "unexpected or repeated node {}",
                    e.node
                )));
            }
            if e.bucket >= node.partition.bucket_count() {
                return Err(Error::TranscriptMismatch(format!(
                    "bucket {} out of range at node {}",
                    e.bucket, e.node
                )));
            }
            out.push(e.bucket);
        }
        Ok(out)
    }
}

/// Every participating node reports the bucket of `f(i)`.
pub fn leak_transcript(scheme: &dyn LeakageScheme, f: &Poly) -> Result<Transcript> {
    let field = scheme.field();
    if f.field() != field {
        return Err(Error::FieldMismatch(field.modulus(), f.field().modulus()));
    }
    if let Some(degree) = f.degree() {
        if degree >= scheme.dimension() {
            return Err(Error::DegreeTooHigh {
                degree,
                k: scheme.dimension(),
            });
        }
    }
    let entries = scheme
        .nodes()
        .iter()
        .map(|node| TranscriptEntry {
            node: node.index,
            bucket: node.partition.leak(f.eval(node.index)),
        })
        .collect();
    Ok(Transcript {
        scheme: scheme.descriptor(),
        entries,
        bits_per_node: scheme.bits_per_node(),
    })
}
