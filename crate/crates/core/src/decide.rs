//! Decision rules: nearest neighbour in KL, exact MAP, the robust NN test and
//! the Scheffé-set baselines.
//!
//! Every rule breaks ties toward the lowest hypothesis index. Indices are
//! zero-based.

use crate::error::{Error, Result};
use crate::robustify::RobustModel;
use crate::scalar::Real;
use crate::simplex::{kl_unchecked, Distribution};
use crate::types::{type_of, SymbolSequence, TypeVector};

/// Hypothesis distributions `P_1..P_M` with strictly positive priors.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisSet<T> {
    distributions: Vec<Distribution<T>>,
    priors: Vec<T>,
}

impl<T: Real> HypothesisSet<T> {
    pub fn new(distributions: Vec<Distribution<T>>, priors: Vec<T>) -> Result<Self> {
        if distributions.len() < 2 {
            return Err(Error::InvalidHypothesisSet(format!(
                "need at least two hypotheses, got {}",
                distributions.len()
            )));
        }
        if priors.len() != distributions.len() {
            return Err(Error::InvalidHypothesisSet(format!(
                "{} priors for {} hypotheses",
                priors.len(),
                distributions.len()
            )));
        }
        let k = distributions[0].alphabet_size();
        if let Some(bad) = distributions.iter().find(|p| p.alphabet_size() != k) {
            return Err(Error::AlphabetMismatch {
                left: k,
                right: bad.alphabet_size(),
            });
        }
        if priors.iter().any(|&w| !w.is_finite() || w <= T::zero()) {
            return Err(Error::InvalidHypothesisSet(
                "priors must be strictly positive".into(),
            ));
        }
        let total: T = priors.iter().copied().sum();
        if (total - T::one()).abs() > T::sum_tolerance() {
            return Err(Error::InvalidHypothesisSet(format!(
                "priors sum to {total}, not 1"
            )));
        }
        Ok(Self {
            distributions,
            priors,
        })
    }

    pub fn uniform(distributions: Vec<Distribution<T>>) -> Result<Self> {
        let m = T::of_count(distributions.len().max(1) as u64);
        let priors = vec![T::one() / m; distributions.len()];
        Self::new(distributions, priors)
    }

    pub fn distributions(&self) -> &[Distribution<T>] {
        &self.distributions
    }

    pub fn priors(&self) -> &[T] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.distributions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distributions.is_empty()
    }

    pub fn alphabet_size(&self) -> usize {
        self.distributions[0].alphabet_size()
    }

    pub(crate) fn check_type(&self, t: &TypeVector) -> Result<()> {
        check_alphabet(self.alphabet_size(), t.alphabet_size())
    }
}

fn check_alphabet(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::AlphabetMismatch {
            left: expected,
            right: got,
        });
    }
    Ok(())
}

/// The chosen hypothesis and the statistic each hypothesis scored.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision<T> {
    /// Zero-based index of the accepted hypothesis.
    pub index: usize,
    pub scores: Vec<T>,
}

fn argmin<T: Real>(scores: &[T]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s < scores[best] {
            best = i;
        }
    }
    best
}

fn argmax<T: Real>(scores: &[T]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Counts the elementary steps a rule performs, for complexity checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCount {
    /// Symbols read from the observed sequence.
    pub symbol_reads: u64,
    /// Per-symbol terms evaluated while scoring hypotheses.
    pub score_terms: u64,
}

fn nearest<T: Real>(
    centroids: &[Distribution<T>],
    t: &TypeVector,
    ops: &mut OpCount,
) -> Decision<T> {
    let px = t.frequencies::<T>();
    let scores: Vec<T> = centroids
        .iter()
        .map(|p| kl_unchecked(&px, p.probs()))
        .collect();
    ops.score_terms += (centroids.len() * px.len()) as u64;
    Decision {
        index: argmin(&scores),
        scores,
    }
}

/// `argmin_j D(P_x‖P_j)`. When every score is `+inf` the first hypothesis wins.
pub fn nn_decide<T: Real>(h: &HypothesisSet<T>, t: &TypeVector) -> Result<Decision<T>> {
    h.check_type(t)?;
    Ok(nearest(&h.distributions, t, &mut OpCount::default()))
}

/// NN rule applied to a raw sequence, counting the work it does.
pub fn nn_decide_sequence_counted<T: Real>(
    h: &HypothesisSet<T>,
    x: &SymbolSequence,
    ops: &mut OpCount,
) -> Result<Decision<T>> {
    check_alphabet(h.alphabet_size(), x.alphabet_size())?;
    let t = type_of(x)?;
    ops.symbol_reads += x.len() as u64;
    Ok(nearest(&h.distributions, &t, ops))
}

/// Exact MAP: `argmax_i log2 P(H_i) + log2 P_i(x)`, in the log domain.
pub fn map_decide<T: Real>(h: &HypothesisSet<T>, x: &SymbolSequence) -> Result<Decision<T>> {
    check_alphabet(h.alphabet_size(), x.alphabet_size())?;
    let t = type_of(x)?;
    Ok(map_decide_type(h, &t))
}

/// MAP on a type; every sequence of the type has the same posterior.
pub fn map_decide_type<T: Real>(h: &HypothesisSet<T>, t: &TypeVector) -> Decision<T> {
    let scores: Vec<T> = h
        .distributions
        .iter()
        .zip(&h.priors)
        .map(|(p, &prior)| {
            let mut total = prior.log2();
            for (&c, &pa) in t.counts().iter().zip(p.probs()) {
                if c == 0 {
                    continue;
                }
                if pa <= T::zero() {
                    return T::neg_infinity();
                }
                total = total + T::of_count(c) * pa.log2();
            }
            total
        })
        .collect();
    Decision {
        index: argmax(&scores),
        scores,
    }
}

/// The robust test: NN against the representatives `P̄_j`.
pub fn robust_decide<T: Real>(rm: &RobustModel<T>, t: &TypeVector) -> Result<Decision<T>> {
    check_alphabet(rm.alphabet_size(), t.alphabet_size())?;
    Ok(nearest(rm.representatives(), t, &mut OpCount::default()))
}

pub fn robust_decide_sequence_counted<T: Real>(
    rm: &RobustModel<T>,
    x: &SymbolSequence,
    ops: &mut OpCount,
) -> Result<Decision<T>> {
    check_alphabet(rm.alphabet_size(), x.alphabet_size())?;
    let t = type_of(x)?;
    ops.symbol_reads += x.len() as u64;
    Ok(nearest(rm.representatives(), &t, ops))
}

/// Scheffé set `A_ij = {a : Q_i(a) > Q_j(a)}` as a membership mask.
fn scheffe_set<T: Real>(qi: &Distribution<T>, qj: &Distribution<T>) -> Vec<bool> {
    qi.probs()
        .iter()
        .zip(qj.probs())
        .map(|(a, b)| a > b)
        .collect()
}

fn mass<T: Real>(q: &Distribution<T>, set: &[bool]) -> T {
    q.probs()
        .iter()
        .zip(set)
        .filter(|(_, &inside)| inside)
        .map(|(&p, _)| p)
        .sum()
}

/// Empirical mass of `set`, read off the sequence itself.
fn empirical_mass<T: Real>(x: &SymbolSequence, set: &[bool], ops: &mut OpCount) -> T {
    ops.symbol_reads += x.len() as u64;
    let hits = x.symbols().iter().filter(|&&s| set[s as usize]).count();
    T::of_count(hits as u64) / T::of_count(x.len() as u64)
}

fn check_nominals<T: Real>(nominals: &[Distribution<T>], x: &SymbolSequence) -> Result<()> {
    if nominals.len() < 2 {
        return Err(Error::InvalidHypothesisSet(format!(
            "need at least two nominals, got {}",
            nominals.len()
        )));
    }
    for q in nominals {
        check_alphabet(q.alphabet_size(), x.alphabet_size())?;
    }
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(())
}

/// DGL minimum-distance test.
///
/// Over the class of Scheffé sets `A_ij` for all ordered pairs `i ≠ j`, each
/// hypothesis scores `max_A |μ̂(A) - Q_k(A)|`, where `μ̂` is the empirical
/// measure of `x`; the smallest score wins.
pub fn dgl_decide<T: Real>(
    nominals: &[Distribution<T>],
    x: &SymbolSequence,
) -> Result<Decision<T>> {
    dgl_decide_counted(nominals, x, &mut OpCount::default())
}

pub fn dgl_decide_counted<T: Real>(
    nominals: &[Distribution<T>],
    x: &SymbolSequence,
    ops: &mut OpCount,
) -> Result<Decision<T>> {
    check_nominals(nominals, x)?;
    let mut terms = 0;
    let dec = minimum_distance(nominals, |set| empirical_mass(x, set, ops), &mut terms);
    ops.score_terms += terms;
    Ok(dec)
}

/// DGL test on the type of the sequence; the empirical measure of a set only
/// depends on the counts, so this agrees with [`dgl_decide`] exactly.
pub fn dgl_decide_type<T: Real>(
    nominals: &[Distribution<T>],
    t: &TypeVector,
) -> Result<Decision<T>> {
    if nominals.len() < 2 {
        return Err(Error::InvalidHypothesisSet(format!(
            "need at least two nominals, got {}",
            nominals.len()
        )));
    }
    for q in nominals {
        check_alphabet(q.alphabet_size(), t.alphabet_size())?;
    }
    let n = T::of_count(t.n());
    let observed = |set: &[bool]| {
        let hits: u64 = t
            .counts()
            .iter()
            .zip(set)
            .filter(|(_, &inside)| inside)
            .map(|(&c, _)| c)
            .sum();
        T::of_count(hits) / n
    };
    Ok(minimum_distance(nominals, observed, &mut 0))
}

fn minimum_distance<T: Real>(
    nominals: &[Distribution<T>],
    mut observed: impl FnMut(&[bool]) -> T,
    terms: &mut u64,
) -> Decision<T> {
    let m = nominals.len();
    let mut scores = vec![T::zero(); m];
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let set = scheffe_set(&nominals[i], &nominals[j]);
            let mu = observed(&set);
            for (k, q) in nominals.iter().enumerate() {
                scores[k] = scores[k].max((mu - mass(q, &set)).abs());
                *terms += 1;
            }
        }
    }
    Decision {
        index: argmin(&scores),
        scores,
    }
}

/// Scheffé tournament: for each pair `i < j`, `i` wins iff
/// `|μ̂(A_ij) - Q_i(A_ij)| < |μ̂(A_ij) - Q_j(A_ij)|`, ties to `i`; the
/// hypothesis with the most wins is chosen. Scores are win counts.
pub fn scheffe_tournament_decide<T: Real>(
    nominals: &[Distribution<T>],
    x: &SymbolSequence,
) -> Result<Decision<T>> {
    check_nominals(nominals, x)?;
    let m = nominals.len();
    let mut wins = vec![0u64; m];
    let mut ops = OpCount::default();
    for i in 0..m {
        for j in i + 1..m {
            let set = scheffe_set(&nominals[i], &nominals[j]);
            let observed = empirical_mass::<T>(x, &set, &mut ops);
            let ei = (observed - mass(&nominals[i], &set)).abs();
            let ej = (observed - mass(&nominals[j], &set)).abs();
            if ei <= ej {
                wins[i] += 1;
            } else {
                wins[j] += 1;
            }
        }
    }
    let scores: Vec<T> = wins.iter().map(|&w| T::of_count(w)).collect();
    Ok(Decision {
        index: argmax(&scores),
        scores,
    })
}
