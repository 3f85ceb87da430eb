//! Blind embedding and extraction.
//!
//! Both directions run the same front end on the canonical (normalized) mesh:
//! compute saliency, keep the most salient vertices as carriers, and split
//! the carriers' norm range into `m` equal-width bins. Bin `i` carries
//! payload bit `i`.
//!
//! The embedder snaps every carrier norm onto the lattice of its bin's bit,
//! never leaving the bin, and moves the vertex radially to the new norm. The
//! extractor recomputes the bins from the observed carrier norms, decodes one
//! vote per carrier and takes a majority per bin. Nothing but the mesh and the
//! key is needed, and vertex or face order never enters the computation.

mod bins;
mod key;
mod prng;

pub use bins::{assign_bins, NormBins};
pub use key::{CarrierMode, WatermarkKey};
pub use prng::{splitmix64, KeyStream};

use crate::error::{Error, Result};
use crate::mesh::{normalize, principal_bbox_diagonal, rescale_vertex, vertex_norms, Mesh};
use crate::qim::{detect_bit, quantize_bit_bounded, QuantizerParams};
use crate::saliency::{compute_saliency, select_salient};

/// A payload bit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Watermark {
    pub bits: Vec<bool>,
}

impl Watermark {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn hamming(&self, other: &Watermark) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count()
    }
}

/// The pseudo-random payload for `key1`: the top bit of each of the first
/// `m` outputs of [`KeyStream`].
pub fn generate_watermark(key1: u64, m: usize) -> Watermark {
    let mut ks = KeyStream::new(key1);
    Watermark { bits: (0..m).map(|_| ks.next_bit()).collect() }
}

/// What the embedder did, for diagnostics.
#[derive(Debug, Clone)]
pub struct EmbedReport {
    /// Carrier count per payload bit.
    pub carriers_used: Vec<usize>,
    /// Carriers left untouched because their norm is zero.
    pub skipped_vertices: usize,
    pub bins: NormBins,
    /// Saliency scale in normalized units; `None` when saliency was not used.
    pub sigma: Option<f64>,
    /// Vertices whose curvature could not be estimated.
    pub flagged_curvature: usize,
    /// Re-synchronization passes needed after the first quantization.
    pub sync_rounds: usize,
    /// Vertex updates made by those passes.
    pub resynced_vertices: usize,
}

/// Result of blind extraction.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub watermark: Watermark,
    /// Per-bit vote margin `(winning - losing) / total`; zero for empty bins.
    pub confidence: Vec<f64>,
    /// Per-bit `(votes for 0, votes for 1)`.
    pub votes: Vec<(usize, usize)>,
}

/// Carrier front end shared by embedding and extraction.
struct Carriers {
    canonical: Mesh,
    transform: crate::mesh::NormalizationTransform,
    norms: Vec<f64>,
    /// Carrier vertex indices with non-zero norm, ascending by norm.
    indices: Vec<usize>,
    skipped: usize,
    sigma: Option<f64>,
    flagged: usize,
}

fn carriers(mesh: &Mesh, key: &WatermarkKey) -> Result<Carriers> {
    key.validate()?;
    let (canonical, transform) = normalize(mesh)?;
    let norms = vertex_norms(&canonical);
    let (selected, sigma, flagged) = match key.carriers {
        CarrierMode::Salient => {
            let sigma = key.sigma_fraction * principal_bbox_diagonal(&canonical);
            let smap = compute_saliency(&canonical, sigma)?;
            let sel = select_salient(&smap.values, &norms, key.saliency_ratio);
            (sel, Some(sigma), smap.curvature.flagged.len())
        }
        CarrierMode::AllVertices => (select_salient(&vec![0.0; norms.len()], &norms, 1.0), None, 0),
    };
    let indices: Vec<usize> = selected.iter().copied().filter(|&v| norms[v] > 0.0).collect();
    let skipped = selected.len() - indices.len();
    Ok(Carriers { canonical, transform, norms, indices, skipped, sigma, flagged })
}

/// Upper bound on the re-synchronization passes run by [`embed`].
pub const MAX_SYNC_ROUNDS: usize = 8;

/// Snaps every carrier in `indices` onto its bin's lattice inside the frame of
/// `c`, writing the moved vertices (in original coordinates) to `vertices`.
fn quantize_carriers(
    c: &Carriers,
    indices: &[usize],
    bins: &NormBins,
    payload: &Watermark,
    q: QuantizerParams,
    vertices: &mut [nalgebra::Point3<f64>],
) -> Result<()> {
    for &v in indices {
        let norm = c.norms[v];
        let bin = bins.bin_of(norm);
        let (lo, hi) = bins.bounds(bin);
        let mut target = quantize_bit_bounded(norm, payload.bits[bin], q, lo, hi)?;
        // Keep the target inside the half-open bin as seen by `bin_of`.
        if bins.bin_of(target) > bin {
            target -= q.delta();
        } else if bins.bin_of(target) < bin {
            target += q.delta();
        }
        let moved = rescale_vertex(&c.canonical.vertices()[v].coords, target).expect("carriers have non-zero norm");
        vertices[v] = c.transform.invert(&moved.into());
    }
    Ok(())
}

/// Embeds the payload of `key` into `mesh`.
///
/// Carriers move along their own direction from the centroid. Moving them
/// changes curvature, so the extractor may select a slightly different
/// carrier set or bin range on the marked mesh. After the first pass the
/// embedder therefore runs the extractor's front end on its own output and,
/// in every bin whose majority vote is wrong, re-quantizes the original
/// carriers that disagree, until extraction is consistent or
/// [`MAX_SYNC_ROUNDS`] passes have run. Vertices that are not carriers of the
/// original mesh are copied bit-for-bit.
pub fn embed(mesh: &Mesh, key: &WatermarkKey) -> Result<(Mesh, EmbedReport)> {
    let c = carriers(mesh, key)?;
    let q = QuantizerParams::new(key.delta)?;
    let carrier_norms: Vec<f64> = c.indices.iter().map(|&v| c.norms[v]).collect();
    if carrier_norms.is_empty() {
        return Err(Error::EmptyBins((0..key.payload_bits).collect()));
    }
    let bins = assign_bins(&carrier_norms, key.payload_bits, key.delta)?;

    let mut per_bin = vec![0usize; key.payload_bits];
    for &n in &carrier_norms {
        per_bin[bins.bin_of(n)] += 1;
    }
    let empty: Vec<usize> = (0..key.payload_bits).filter(|&i| per_bin[i] == 0).collect();
    if !empty.is_empty() {
        return Err(Error::EmptyBins(empty));
    }

    let payload = generate_watermark(key.key1, key.payload_bits);
    let mut vertices = mesh.vertices().to_vec();
    quantize_carriers(&c, &c.indices, &bins, &payload, q, &mut vertices)?;

    let mut original = vec![false; mesh.vertex_count()];
    for &v in &c.indices {
        original[v] = true;
    }
    let mut sync_rounds = 0;
    let mut resynced = 0;
    while sync_rounds < MAX_SYNC_ROUNDS {
        let marked = mesh.with_vertices(vertices.clone());
        let now = carriers(&marked, key)?;
        let norms: Vec<f64> = now.indices.iter().map(|&v| now.norms[v]).collect();
        let Ok(now_bins) = assign_bins(&norms, key.payload_bits, key.delta) else { break };
        let vote_ok = |v: usize| detect_bit(now.norms[v], q) == payload.bits[now_bins.bin_of(now.norms[v])];
        let mut agree = vec![(0usize, 0usize); key.payload_bits];
        for &v in &now.indices {
            let slot = &mut agree[now_bins.bin_of(now.norms[v])];
            slot.0 += vote_ok(v) as usize;
            slot.1 += 1;
        }
        // Extraction only needs a strict majority per bin.
        let weak = |b: usize| 2 * agree[b].0 <= agree[b].1;
        let wrong: Vec<usize> =
            now.indices.iter().copied().filter(|&v| original[v] && !vote_ok(v) && weak(now_bins.bin_of(now.norms[v]))).collect();
        if wrong.is_empty() {
            break;
        }
        sync_rounds += 1;
        resynced += wrong.len();
        quantize_carriers(&now, &wrong, &now_bins, &payload, q, &mut vertices)?;
    }

    let report = EmbedReport {
        carriers_used: per_bin,
        skipped_vertices: c.skipped,
        bins,
        sigma: c.sigma,
        flagged_curvature: c.flagged,
        sync_rounds,
        resynced_vertices: resynced,
    };
    Ok((mesh.with_vertices(vertices), report))
}

/// Recovers the payload using only the mesh and the key.
pub fn extract(mesh: &Mesh, key: &WatermarkKey) -> Result<Extraction> {
    let c = carriers(mesh, key)?;
    let q = QuantizerParams::new(key.delta)?;
    let m = key.payload_bits;
    let mut votes = vec![(0usize, 0usize); m];
    let carrier_norms: Vec<f64> = c.indices.iter().map(|&v| c.norms[v]).collect();
    if !carrier_norms.is_empty() {
        let bins = assign_bins(&carrier_norms, m, key.delta)?;
        for &n in &carrier_norms {
            let slot = &mut votes[bins.bin_of(n)];
            if detect_bit(n, q) {
                slot.1 += 1;
            } else {
                slot.0 += 1;
            }
        }
    }
    let bits = votes.iter().map(|&(zero, one)| one > zero).collect();
    let confidence = votes
        .iter()
        .map(|&(zero, one)| {
            let total = zero + one;
            if total == 0 {
                0.0
            } else {
                zero.abs_diff(one) as f64 / total as f64
            }
        })
        .collect();
    Ok(Extraction { watermark: Watermark { bits }, confidence, votes })
}

/// Normalized correlation between two bit strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub value: f64,
    /// False when either string is constant and Pearson correlation is
    /// undefined; `value` is then 1 for identical strings and 0 otherwise.
    pub defined: bool,
}

/// Pearson correlation of the two strings as 0/1 sequences.
///
/// Panics if the lengths differ.
pub fn correlation(a: &Watermark, b: &Watermark) -> Correlation {
    assert_eq!(a.len(), b.len(), "watermarks must have equal length");
    let n = a.len() as f64;
    let x: Vec<f64> = a.bits.iter().map(|&v| v as u8 as f64).collect();
    let y: Vec<f64> = b.bits.iter().map(|&v| v as u8 as f64).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(&y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Correlation { value: if a == b { 1.0 } else { 0.0 }, defined: false };
    }
    Correlation { value: (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0), defined: true }
}
