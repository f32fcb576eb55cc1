//! Fixed-point quantization of distributions with a slope `2^-q` and a bias.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::simplex::{variational_distance, Distribution};

/// Word length and bias of the fixed-point format `p̂ = z · 2^-q + bias`,
/// with `z` an unsigned `q`-bit integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizerSpec {
    bits: u32,
    bias: f64,
}

impl QuantizerSpec {
    pub const MAX_BITS: u32 = 52;

    /// Zero-bias format with `bits` fractional bits.
    pub fn new(bits: u32) -> Result<Self> {
        Self::with_bias(bits, 0.0)
    }

    pub fn with_bias(bits: u32, bias: f64) -> Result<Self> {
        if bits == 0 || bits > Self::MAX_BITS {
            return Err(Error::InvalidQuantizerBits(bits));
        }
        Ok(Self { bits, bias })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// `2^-q`.
    pub fn step(&self) -> f64 {
        (-(self.bits as f64)).exp2()
    }
}

/// Quantizes the first `|X| - 1` entries to the nearest representable value
/// (ties up, `z` clamped to `[0, 2^q - 1]`); the last entry absorbs the
/// remainder `1 - Σ p̂`.
pub fn quantize_distribution<T: Real>(
    p: &Distribution<T>,
    spec: QuantizerSpec,
) -> Result<Distribution<T>> {
    let step = T::of(spec.step());
    let bias = T::of(spec.bias);
    let z_max = T::of(((1u64 << spec.bits) - 1) as f64);
    let k = p.alphabet_size();

    let mut out: Vec<T> = p.probs()[..k - 1]
        .iter()
        .map(|&x| {
            let z = ((x - bias) / step + T::of(0.5)).floor();
            z.max(T::zero()).min(z_max) * step + bias
        })
        .collect();
    let head: T = out.iter().copied().sum();
    let last = T::one() - head;
    let tol = T::sum_tolerance();
    if !(last >= -tol && last <= T::one() + tol) || out.iter().any(|&x| x < -tol) {
        return Err(Error::InvalidQuantization {
            bits: spec.bits,
            last: last.to_f64().unwrap_or(f64::NAN),
        });
    }
    out.push(last.max(T::zero()));
    Distribution::new(out).map_err(|_| Error::InvalidQuantization {
        bits: spec.bits,
        last: last.to_f64().unwrap_or(f64::NAN),
    })
}

/// Quantizes every distribution of a family.
pub fn quantize_all<T: Real>(
    ps: &[Distribution<T>],
    spec: QuantizerSpec,
) -> Result<Vec<Distribution<T>>> {
    ps.iter().map(|p| quantize_distribution(p, spec)).collect()
}

/// Realized radii `ε_j = V(P_j, Q_j)` and their maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizationRadius<T> {
    pub per_hypothesis: Vec<T>,
    pub epsilon: T,
}

pub fn quantization_radius<T: Real>(
    originals: &[Distribution<T>],
    quantized: &[Distribution<T>],
) -> Result<QuantizationRadius<T>> {
    if originals.len() != quantized.len() {
        return Err(Error::InvalidHypothesisSet(format!(
            "{} originals for {} quantized distributions",
            originals.len(),
            quantized.len()
        )));
    }
    let per_hypothesis = originals
        .iter()
        .zip(quantized)
        .map(|(p, q)| variational_distance(p, q))
        .collect::<Result<Vec<T>>>()?;
    let epsilon = per_hypothesis.iter().copied().fold(T::zero(), T::max);
    Ok(QuantizationRadius {
        per_hypothesis,
        epsilon,
    })
}
