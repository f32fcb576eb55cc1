//! Error exponents of the NN rule: the classical Sanov-style bound, per-type
//! exponents, their minimum over the type lattice and the sorted ratio curve.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::decide::HypothesisSet;
use crate::error::{Error, Result};
use crate::format::format_sig;
use crate::robustify::finite_length_penalty;
use crate::scalar::Real;
use crate::simplex::{kl_unchecked, min_pairwise_chernoff};
use crate::types::{enumerate_types, TypeVector};

/// An error-probability bound `P(e) ≤ 2^{-n · exponent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound<T> {
    pub exponent: T,
    /// `-n · exponent`.
    pub log2_bound: T,
}

impl<T: Real> Bound<T> {
    pub fn from_exponent(exponent: T, n: u64) -> Self {
        Self {
            exponent,
            log2_bound: -T::of_count(n) * exponent,
        }
    }

    /// `2^{log2_bound}`, unclamped (values above one mean the bound is vacuous).
    pub fn value(&self) -> T {
        self.log2_bound.exp2()
    }
}

/// `min_{i≠j} C(P_i, P_j) - (|X|-1) log2(n+1)/n - log2(M)/n`.
pub fn classical_bound<T: Real>(h: &HypothesisSet<T>, n: u64) -> Result<Bound<T>> {
    let c = min_pairwise_chernoff(h.distributions())?;
    Ok(Bound::from_exponent(
        c.value - finite_length_penalty(h.alphabet_size(), h.len(), n),
        n,
    ))
}

fn pair_exponent<T: Real>(divergences: &[T]) -> T {
    let mut best = T::infinity();
    for i in 0..divergences.len() {
        for j in i + 1..divergences.len() {
            best = best.min(divergences[i].max(divergences[j]));
        }
    }
    best
}

fn divergences_from<T: Real>(h: &HypothesisSet<T>, t: &TypeVector) -> Vec<T> {
    let px = t.frequencies::<T>();
    h.distributions()
        .iter()
        .map(|p| kl_unchecked(&px, p.probs()))
        .collect()
}

/// `min_{i≠j} max{D(P_x‖P_i), D(P_x‖P_j)}`: the exponent of the error
/// probability averaged over the type class of `t`.
pub fn per_type_exponent<T: Real>(h: &HypothesisSet<T>, t: &TypeVector) -> Result<T> {
    h.check_type(t)?;
    Ok(pair_exponent(&divergences_from(h, t)))
}

/// Minimum of `max{D(P_x‖P_i), D(P_x‖P_j)}` over all types of length `n`,
/// with the first minimizing type in enumeration order.
pub fn min_over_types<T: Real>(
    h: &HypothesisSet<T>,
    n: u64,
    pair: (usize, usize),
) -> Result<(T, TypeVector)> {
    let (i, j) = pair;
    if i == j || i >= h.len() || j >= h.len() {
        return Err(Error::InvalidHypothesisSet(format!(
            "invalid pair ({i}, {j}) for {} hypotheses",
            h.len()
        )));
    }
    let (pi, pj) = (h.distributions()[i].probs(), h.distributions()[j].probs());
    let mut best: Option<(T, TypeVector)> = None;
    for t in enumerate_types(n, h.alphabet_size())? {
        let px = t.frequencies::<T>();
        let v = kl_unchecked(&px, pi).max(kl_unchecked(&px, pj));
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, t));
        }
    }
    Ok(best.expect("at least one type"))
}

/// One point of the sorted ratio curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioPoint<T> {
    pub counts: TypeVector,
    pub ratio: T,
}

/// Per-type exponent divided by `min_{i≠j} C(P_i, P_j)` for every type of
/// length `n`, sorted ascending. Equal ratios keep enumeration order, so the
/// output does not depend on how the work was split.
pub fn ratio_curve<T: Real>(h: &HypothesisSet<T>, n: u64) -> Result<Vec<RatioPoint<T>>> {
    let min_c = min_pairwise_chernoff(h.distributions())?.value;
    if min_c <= T::zero() {
        return Err(Error::DegenerateRatio);
    }
    let types: Vec<TypeVector> = enumerate_types(n, h.alphabet_size())?.collect();
    let mut scored: Vec<(usize, RatioPoint<T>)> = types
        .into_par_iter()
        .enumerate()
        .map(|(rank, t)| {
            let ratio = pair_exponent(&divergences_from(h, &t)) / min_c;
            (rank, RatioPoint { counts: t, ratio })
        })
        .collect();
    scored.sort_by(|(ra, a), (rb, b)| {
        a.ratio
            .partial_cmp(&b.ratio)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ra.cmp(rb))
    });
    Ok(scored.into_iter().map(|(_, p)| p).collect())
}

/// Writes the curve as `rank,counts,ratio` with 1-based ranks and
/// `|`-joined counts.
pub fn write_ratio_csv<T: Real, W: Write>(points: &[RatioPoint<T>], mut out: W) -> Result<()> {
    writeln!(out, "rank,counts,ratio")?;
    for (rank, p) in points.iter().enumerate() {
        let counts = p
            .counts
            .counts()
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join("|");
        writeln!(
            out,
            "{},{},{}",
            rank + 1,
            counts,
            format_sig(p.ratio.to_f64().unwrap_or(f64::NAN))
        )?;
    }
    Ok(())
}

/// Classical and per-type view of one hypothesis set at one length.
#[derive(Debug, Clone)]
pub struct ExponentReport<T> {
    /// Exponent of the classical bound at the report's `n`.
    pub classical_exponent: T,
    pub per_type_exponents: BTreeMap<TypeVector, T>,
    pub min_chernoff: T,
    /// Zero-based closest pair.
    pub pair_argmin: (usize, usize),
}

pub fn exponent_report<T: Real>(h: &HypothesisSet<T>, n: u64) -> Result<ExponentReport<T>> {
    let c = min_pairwise_chernoff(h.distributions())?;
    let classical = classical_bound(h, n)?;
    let per_type_exponents = enumerate_types(n, h.alphabet_size())?
        .map(|t| {
            let e = pair_exponent(&divergences_from(h, &t));
            (t, e)
        })
        .collect();
    Ok(ExponentReport {
        classical_exponent: classical.exponent,
        per_type_exponents,
        min_chernoff: c.value,
        pair_argmin: c.pair,
    })
}
