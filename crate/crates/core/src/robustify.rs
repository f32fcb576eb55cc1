//! Robust testing with nominal distributions known only up to a variational
//! radius: the shrink-toward-uniform representatives, the per-sequence
//! probability bound they give, and the resulting error-exponent bounds.

use crate::error::{Error, Result};
use crate::exponents::Bound;
use crate::scalar::Real;
use crate::simplex::{
    entropy, kl_divergence, min_pairwise_chernoff, variational_distance, Distribution,
};
use crate::types::{type_of, SymbolSequence, TypeVector};

/// Nominal distributions `Q_j`, their radii `ε_j` and the representatives
/// `P̄_j(x) = (Q_j(x) + ε_j) / (1 + |X| ε_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustModel<T> {
    nominals: Vec<Distribution<T>>,
    epsilons: Vec<T>,
    representatives: Vec<Distribution<T>>,
    epsilon_max: T,
}

impl<T: Real> RobustModel<T> {
    pub fn nominals(&self) -> &[Distribution<T>] {
        &self.nominals
    }

    pub fn epsilons(&self) -> &[T] {
        &self.epsilons
    }

    pub fn representatives(&self) -> &[Distribution<T>] {
        &self.representatives
    }

    /// `ε = max_k ε_k`.
    pub fn epsilon_max(&self) -> T {
        self.epsilon_max
    }

    pub fn len(&self) -> usize {
        self.nominals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nominals.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.nominals[0].alphabet_size()
    }

    /// `log2(1 + |X| ε)`, the price paid for not knowing the true distributions.
    pub fn robustness_penalty(&self) -> T {
        robustness_penalty(self.alphabet_size(), self.epsilon_max)
    }
}

fn robustness_penalty<T: Real>(alphabet_size: usize, epsilon: T) -> T {
    (T::of_count(alphabet_size as u64) * epsilon).ln_1p() / T::LN_2()
}

/// Shrinks one nominal toward uniform by radius `epsilon`.
pub fn representative<T: Real>(nominal: &Distribution<T>, epsilon: T) -> Result<Distribution<T>> {
    let scale = T::one() + T::of_count(nominal.alphabet_size() as u64) * epsilon;
    Distribution::new(
        nominal
            .probs()
            .iter()
            .map(|&q| (q + epsilon) / scale)
            .collect(),
    )
}

pub fn build_robust_model<T: Real>(
    nominals: Vec<Distribution<T>>,
    epsilons: Vec<T>,
) -> Result<RobustModel<T>> {
    if nominals.len() < 2 {
        return Err(Error::InvalidHypothesisSet(format!(
            "need at least two nominals, got {}",
            nominals.len()
        )));
    }
    if epsilons.len() != nominals.len() {
        return Err(Error::InvalidHypothesisSet(format!(
            "{} radii for {} nominals",
            epsilons.len(),
            nominals.len()
        )));
    }
    let k = nominals[0].alphabet_size();
    if let Some(bad) = nominals.iter().find(|q| q.alphabet_size() != k) {
        return Err(Error::AlphabetMismatch {
            left: k,
            right: bad.alphabet_size(),
        });
    }
    if let Some((index, &e)) = epsilons
        .iter()
        .enumerate()
        .find(|(_, e)| !e.is_finite() || **e < T::zero())
    {
        return Err(Error::NegativeEpsilon {
            index,
            value: e.to_f64().unwrap_or(f64::NAN),
        });
    }
    let representatives = nominals
        .iter()
        .zip(&epsilons)
        .map(|(q, &e)| representative(q, e))
        .collect::<Result<Vec<_>>>()?;
    let epsilon_max = epsilons.iter().copied().fold(T::zero(), T::max);
    Ok(RobustModel {
        nominals,
        epsilons,
        representatives,
        epsilon_max,
    })
}

/// Upper bound on `log2 P_j(x)` for every sequence `x` of type `t` and every
/// `P_j` within variational distance `ε_j` of `Q_j`:
/// `-n (H(P_x) + D(P_x‖P̄_j) - log2(1 + |X| ε_j))`.
pub fn robust_log_bound<T: Real>(t: &TypeVector, rm: &RobustModel<T>, j: usize) -> Result<T> {
    let rep = rm
        .representatives
        .get(j)
        .ok_or_else(|| Error::InvalidHypothesisSet(format!("no hypothesis {j}")))?;
    if rep.alphabet_size() != t.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            left: t.alphabet_size(),
            right: rep.alphabet_size(),
        });
    }
    // -n(H + D) collapses to Σ counts log2 P̄_j; with ε_j = 0 this is exactly
    // the exact sequence log-probability under Q_j.
    let mut total = T::zero();
    for (&c, &p) in t.counts().iter().zip(rep.probs()) {
        if c == 0 {
            continue;
        }
        if p <= T::zero() {
            return Ok(T::neg_infinity());
        }
        total = total + T::of_count(c) * p.log2();
    }
    let n = T::of_count(t.n());
    Ok(total + n * robustness_penalty(t.alphabet_size(), rm.epsilons[j]))
}

/// The same bound evaluated literally through entropy and divergence.
pub fn robust_log_bound_entropic<T: Real>(
    t: &TypeVector,
    rm: &RobustModel<T>,
    j: usize,
) -> Result<T> {
    let px = t.as_distribution::<T>();
    let n = T::of_count(t.n());
    let d = kl_divergence(&px, &rm.representatives[j])?;
    let penalty = robustness_penalty(t.alphabet_size(), rm.epsilons[j]);
    Ok(-n * (entropy(&px) + d - penalty))
}

/// Error-probability bound of the robust NN test:
/// exponent `min C(P̄_i, P̄_j) - log2(1 + |X| ε) - (|X|-1) log2(n+1)/n - log2(M)/n`.
pub fn robust_bound<T: Real>(rm: &RobustModel<T>, n: u64) -> Result<Bound<T>> {
    let c = min_pairwise_chernoff(&rm.representatives)?;
    Ok(Bound::from_exponent(
        c.value - rm.robustness_penalty() - finite_length_penalty(rm.alphabet_size(), rm.len(), n),
        n,
    ))
}

/// `(|X|-1) log2(n+1)/n + log2(M)/n`.
pub(crate) fn finite_length_penalty<T: Real>(alphabet_size: usize, hypotheses: usize, n: u64) -> T {
    let nf = T::of_count(n);
    let types = T::of_count(alphabet_size as u64 - 1) * (nf + T::one()).log2() / nf;
    types + T::of_count(hypotheses as u64).log2() / nf
}

/// Result of the positive-exponent check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Positivity<T> {
    /// `min C(P̄_i, P̄_j) - log2(1 + |X| ε)`.
    pub margin: T,
    pub holds: bool,
}

/// Whether the robust test is guaranteed a positive error exponent.
pub fn positivity_check<T: Real>(rm: &RobustModel<T>) -> Result<Positivity<T>> {
    let c = min_pairwise_chernoff(&rm.representatives)?;
    let margin = c.value - rm.robustness_penalty();
    Ok(Positivity {
        margin,
        holds: margin > T::zero(),
    })
}

/// Exponent of the DGL upper bound without uncertainty, `min ½ V(Q_i, Q_j)²`,
/// converted from nats to bits.
pub fn dgl_exponent<T: Real>(nominals: &[Distribution<T>]) -> Result<T> {
    if nominals.len() < 2 {
        return Err(Error::InvalidHypothesisSet(format!(
            "need at least two nominals, got {}",
            nominals.len()
        )));
    }
    let mut best = T::infinity();
    for i in 0..nominals.len() {
        for j in i + 1..nominals.len() {
            let v = variational_distance(&nominals[i], &nominals[j])?;
            best = best.min(v * v / T::of(2.0));
        }
    }
    Ok(best / T::LN_2())
}

/// Probability bound `2^{-m(β - |X| log2(m+1)/m)}` that the type of a
/// length-`m` training sequence lies farther than `β` (in KL) from its source,
/// clamped to `[0, 1]`.
pub fn training_bound<T: Real>(m: u64, beta: T, alphabet_size: usize) -> T {
    let mf = T::of_count(m.max(1));
    let slack = T::of_count(alphabet_size as u64) * (mf + T::one()).log2() / mf;
    let value = (-mf * (beta - slack)).exp2();
    value.max(T::zero()).min(T::one())
}

/// The type of a training sequence, used as a nominal distribution.
pub fn nominal_from_training<T: Real>(training: &SymbolSequence) -> Result<Distribution<T>> {
    Ok(type_of(training)?.as_distribution())
}
