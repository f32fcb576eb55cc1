//! Probability vectors over a finite alphabet and the distances between them.
//!
//! All information quantities are in bits. Support mismatches are routine
//! (quantized nominals carry exact zeros), so divergences return the scalar's
//! `+inf` instead of failing; it orders above every finite value and prints
//! as `inf`.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A probability vector over the alphabet `{0, .., alphabet_size - 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    probs: Vec<T>,
}

impl<T: Real> Distribution<T> {
    /// Validates and renormalizes `probs`.
    ///
    /// Entries must be finite and non-negative, there must be at least two of
    /// them, and their sum must be within [`Real::sum_tolerance`] of one. The
    /// vector is then divided by its sum once, so decimal table input lands
    /// exactly on the simplex.
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "alphabet size {} < 2",
                probs.len()
            )));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < T::zero())
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} = {p} is not a finite non-negative number"
            )));
        }
        let sum: T = probs.iter().copied().sum();
        if (sum - T::one()).abs() > T::sum_tolerance() {
            return Err(Error::InvalidDistribution(format!(
                "entries sum to {sum}, not 1"
            )));
        }
        // Already-normalized input is kept bit for bit.
        let slack = T::epsilon() * T::of_count(probs.len() as u64);
        let probs = if (sum - T::one()).abs() <= slack {
            probs
        } else {
            probs.into_iter().map(|p| p / sum).collect()
        };
        Ok(Self { probs })
    }

    /// Convenience constructor from `f64` input.
    pub fn from_f64s(probs: &[f64]) -> Result<Self> {
        Self::new(probs.iter().map(|&p| T::of(p)).collect())
    }

    /// The uniform distribution `U(x) = 1/|X|`.
    pub fn uniform(alphabet_size: usize) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::InvalidDistribution(format!(
                "alphabet size {alphabet_size} < 2"
            )));
        }
        let p = T::one() / T::of_count(alphabet_size as u64);
        Ok(Self {
            probs: vec![p; alphabet_size],
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> T {
        self.probs[symbol]
    }

    /// Re-expresses the distribution in another scalar type, renormalizing
    /// in the target precision.
    pub fn cast<U: Real>(&self) -> Result<Distribution<U>> {
        let probs: Vec<U> = self
            .probs
            .iter()
            .map(|p| U::of(p.to_f64().unwrap_or(f64::NAN)))
            .collect();
        let sum: U = probs.iter().copied().sum();
        Distribution::new(probs.into_iter().map(|p| p / sum).collect())
    }

    pub(crate) fn check_alphabet(&self, other: &Self) -> Result<()> {
        if self.alphabet_size() != other.alphabet_size() {
            return Err(Error::AlphabetMismatch {
                left: self.alphabet_size(),
                right: other.alphabet_size(),
            });
        }
        Ok(())
    }
}

/// Shannon entropy `-Σ p log2 p`, with `0 log 0 = 0`.
pub fn entropy<T: Real>(p: &Distribution<T>) -> T {
    p.probs
        .iter()
        .filter(|&&x| x > T::zero())
        .map(|&x| -x * x.log2())
        .sum()
}

/// Variational (total variation) distance `½ Σ |q - p|`.
pub fn variational_distance<T: Real>(p: &Distribution<T>, q: &Distribution<T>) -> Result<T> {
    p.check_alphabet(q)?;
    let l1: T = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(&a, &b)| (b - a).abs())
        .sum();
    Ok(l1 / T::of(2.0))
}

/// Relative entropy `D(p‖q) = Σ p log2(p/q)`.
///
/// Terms with `p(x) = 0` vanish; a term with `p(x) > 0 = q(x)` makes the
/// divergence `+inf`.
pub fn kl_divergence<T: Real>(p: &Distribution<T>, q: &Distribution<T>) -> Result<T> {
    p.check_alphabet(q)?;
    Ok(kl_unchecked(&p.probs, &q.probs))
}

pub(crate) fn kl_unchecked<T: Real>(p: &[T], q: &[T]) -> T {
    let mut total = T::zero();
    for (&a, &b) in p.iter().zip(q) {
        if a > T::zero() {
            if b <= T::zero() {
                return T::infinity();
            }
            total = total + a * (a / b).log2();
        }
    }
    // Rounding can leave a tiny negative value for p ≈ q.
    total.max(T::zero())
}

/// `base^exponent` with the limits used by the Chernoff sum: `0^0 = 1` and
/// `0^e = 0` for `e > 0`.
fn pow_limit<T: Real>(base: T, exponent: T) -> T {
    if exponent == T::zero() {
        T::one()
    } else if base == T::zero() {
        T::zero()
    } else {
        base.powf(exponent)
    }
}

fn chernoff_sum<T: Real>(p: &[T], q: &[T], lambda: T) -> T {
    let mu = T::one() - lambda;
    p.iter()
        .zip(q)
        .map(|(&a, &b)| pow_limit(a, lambda) * pow_limit(b, mu))
        .sum()
}

/// Geometric mixture `p^λ q^(1-λ) / Σ p^λ q^(1-λ)`.
///
/// `λ = 1` gives `p` and `λ = 0` gives `q`. For `λ ∈ (0, 1)` the supports must
/// intersect.
pub fn tilted<T: Real>(
    p: &Distribution<T>,
    q: &Distribution<T>,
    lambda: T,
) -> Result<Distribution<T>> {
    p.check_alphabet(q)?;
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(Error::InvalidDistribution(format!(
            "tilt parameter {lambda} outside [0, 1]"
        )));
    }
    let mu = T::one() - lambda;
    let weights: Vec<T> = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(&a, &b)| pow_limit(a, lambda) * pow_limit(b, mu))
        .collect();
    let total: T = weights.iter().copied().sum();
    if total <= T::zero() {
        return Err(Error::DegenerateTilt);
    }
    Distribution::new(weights.into_iter().map(|w| w / total).collect())
}

/// Chernoff information together with its minimizing tilt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chernoff<T> {
    /// `-min_λ log2 Σ p^λ q^(1-λ)`, in bits.
    pub value: T,
    /// The minimizing `λ ∈ [0, 1]`.
    pub lambda: T,
}

/// Chernoff information `C(p, q)`.
///
/// The objective `λ ↦ log2 Σ p^λ q^(1-λ)` is convex on `[0, 1]` and zero at
/// both endpoints. It is minimized by golden-section search on the open
/// interval, which copes with the jump at an endpoint caused by symbols that
/// only one distribution supports. Disjoint supports give `+inf`.
pub fn chernoff_information<T: Real>(
    p: &Distribution<T>,
    q: &Distribution<T>,
) -> Result<Chernoff<T>> {
    p.check_alphabet(q)?;
    let half = T::of(0.5);
    let overlap = p
        .probs
        .iter()
        .zip(&q.probs)
        .any(|(&a, &b)| a > T::zero() && b > T::zero());
    if !overlap {
        return Ok(Chernoff {
            value: T::infinity(),
            lambda: half,
        });
    }

    let objective = |lambda: T| chernoff_sum(&p.probs, &q.probs, lambda).log2();
    let ratio = (T::of(5.0).sqrt() - T::one()) / T::of(2.0);
    let tolerance = T::solver_tolerance();

    let (mut lo, mut hi) = (T::zero(), T::one());
    let mut left = hi - ratio * (hi - lo);
    let mut right = lo + ratio * (hi - lo);
    let mut f_left = objective(left);
    let mut f_right = objective(right);
    for _ in 0..200 {
        if hi - lo <= tolerance {
            break;
        }
        if f_left < f_right {
            hi = right;
            right = left;
            f_right = f_left;
            left = hi - ratio * (hi - lo);
            f_left = objective(left);
        } else {
            lo = left;
            left = right;
            f_left = f_right;
            right = lo + ratio * (hi - lo);
            f_right = objective(right);
        }
    }
    let lambda = (lo + hi) * half;
    let best = objective(lambda);
    // Both endpoints evaluate to log2(1) = 0.
    let value = if best < T::zero() { -best } else { T::zero() };
    Ok(Chernoff { value, lambda })
}

/// Lower bound `C(p, q) ≥ -½ ln(1 - V²)`, converted to bits. `+inf` when `V = 1`.
pub fn sason_lower_bound<T: Real>(p: &Distribution<T>, q: &Distribution<T>) -> Result<T> {
    let v = variational_distance(p, q)?;
    if v >= T::one() {
        return Ok(T::infinity());
    }
    let nats = -T::of(0.5) * (-(v * v)).ln_1p();
    Ok(nats / T::LN_2())
}

/// The closest pair of a family under Chernoff information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseChernoff<T> {
    pub value: T,
    pub lambda: T,
    /// Zero-based indices `(i, j)` with `i < j`.
    pub pair: (usize, usize),
}

/// `min_{i≠j} C(P_i, P_j)`; ties go to the lexicographically first pair.
pub fn min_pairwise_chernoff<T: Real>(dists: &[Distribution<T>]) -> Result<PairwiseChernoff<T>> {
    if dists.len() < 2 {
        return Err(Error::InvalidHypothesisSet(format!(
            "need at least two distributions, got {}",
            dists.len()
        )));
    }
    let mut best: Option<PairwiseChernoff<T>> = None;
    for i in 0..dists.len() {
        for j in i + 1..dists.len() {
            let c = chernoff_information(&dists[i], &dists[j])?;
            if best.is_none_or(|b| c.value < b.value) {
                best = Some(PairwiseChernoff {
                    value: c.value,
                    lambda: c.lambda,
                    pair: (i, j),
                });
            }
        }
    }
    Ok(best.expect("at least one pair"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn d(v: &[f64]) -> Distribution<f64> {
        Distribution::from_f64s(v).unwrap()
    }

    fn five_sources() -> Vec<Distribution<f64>> {
        [
            [0.1, 0.8, 0.1],
            [0.3, 0.2, 0.5],
            [0.6, 0.1, 0.3],
            [0.4, 0.4, 0.2],
            [0.3, 0.6, 0.1],
        ]
        .iter()
        .map(|p| d(p))
        .collect()
    }

    #[test]
    fn construction_validates() {
        assert!(Distribution::<f64>::from_f64s(&[1.0]).is_err());
        assert!(Distribution::<f64>::from_f64s(&[0.5, 0.6]).is_err());
        assert!(Distribution::<f64>::from_f64s(&[-0.1, 1.1]).is_err());
        assert!(Distribution::<f64>::from_f64s(&[f64::NAN, 1.0]).is_err());
        let p = d(&[0.5, 0.5 + 5e-10]);
        assert_abs_diff_eq!(p.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&d(&[0.5, 0.5])), 1.0);
        assert_eq!(entropy(&d(&[1.0, 0.0])), 0.0);
        let by_hand = -(0.1f64 * 0.1f64.log2() + 0.8 * 0.8f64.log2() + 0.1 * 0.1f64.log2());
        assert_abs_diff_eq!(entropy(&d(&[0.1, 0.8, 0.1])), by_hand, epsilon = 1e-15);
        for k in 2..20 {
            let u = Distribution::<f64>::uniform(k).unwrap();
            assert_abs_diff_eq!(entropy(&u), (k as f64).log2(), epsilon = 1e-12);
        }
    }

    #[test]
    fn variational_examples() {
        let p = d(&[0.1, 0.8, 0.1]);
        assert_eq!(variational_distance(&p, &p).unwrap(), 0.0);
        assert_abs_diff_eq!(
            variational_distance(&p, &d(&[0.0, 0.75, 0.25])).unwrap(),
            0.15,
            epsilon = 1e-15
        );
        assert_eq!(
            variational_distance(&d(&[1.0, 0.0]), &d(&[0.0, 1.0])).unwrap(),
            1.0
        );
        assert!(matches!(
            variational_distance(&p, &d(&[0.5, 0.5])),
            Err(Error::AlphabetMismatch { left: 3, right: 2 })
        ));
    }

    #[test]
    fn kl_examples() {
        let p = d(&[0.5, 0.5]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let expected = 0.5 * 2f64.log2() + 0.5 * (2.0f64 / 3.0).log2();
        assert_abs_diff_eq!(
            kl_divergence(&p, &d(&[0.25, 0.75])).unwrap(),
            expected,
            epsilon = 1e-15
        );
        let inf = kl_divergence(&p, &d(&[1.0, 0.0])).unwrap();
        assert!(inf.is_infinite() && inf > f64::MAX);
        assert_eq!(format!("{inf}"), "inf");
        // Zero-mass symbols of p contribute nothing.
        assert!(kl_divergence(&d(&[1.0, 0.0]), &p).unwrap().is_finite());
    }

    #[test]
    fn tilted_examples() {
        let p = d(&[0.1, 0.8, 0.1]);
        let q = d(&[0.3, 0.2, 0.5]);
        assert_eq!(tilted(&p, &q, 1.0).unwrap(), p);
        assert_eq!(tilted(&p, &q, 0.0).unwrap(), q);
        let raw = [0.03f64.sqrt(), 0.16f64.sqrt(), 0.05f64.sqrt()];
        let z: f64 = raw.iter().sum();
        let mid = tilted(&p, &q, 0.5).unwrap();
        for (got, want) in mid.probs().iter().zip(raw.iter().map(|r| r / z)) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let a = d(&[1.0, 0.0]);
        let b = d(&[0.0, 1.0]);
        assert!(matches!(tilted(&a, &b, 0.5), Err(Error::DegenerateTilt)));
        assert_eq!(tilted(&a, &b, 1.0).unwrap(), a);
    }

    #[test]
    fn chernoff_examples() {
        let p = d(&[0.2, 0.3, 0.5]);
        assert_eq!(chernoff_information(&p, &p).unwrap().value, 0.0);
        let min = min_pairwise_chernoff(&five_sources()).unwrap();
        assert!((min.value - 0.0329).abs() < 5e-4, "{min:?}");
        assert_eq!(min.pair, (3, 4));
        let c = chernoff_information(&d(&[1.0, 0.0]), &d(&[0.0, 1.0])).unwrap();
        assert!(c.value.is_infinite());
    }

    #[test]
    fn chernoff_matches_dense_grid() {
        let p = d(&[0.13, 0.42, 0.07, 0.38]);
        let q = d(&[0.31, 0.05, 0.44, 0.20]);
        let grid_min = (0..=1_000_000)
            .map(|k| {
                let l = k as f64 / 1e6;
                p.probs()
                    .iter()
                    .zip(q.probs())
                    .map(|(a, b)| a.powf(l) * b.powf(1.0 - l))
                    .sum::<f64>()
                    .log2()
            })
            .fold(f64::INFINITY, f64::min);
        let c = chernoff_information(&p, &q).unwrap();
        assert_abs_diff_eq!(c.value, -grid_min, epsilon = 1e-6);
    }

    #[test]
    fn chernoff_handles_partial_support() {
        // Symbol 0 only under p: objective jumps at λ = 0.
        let p = d(&[0.5, 0.25, 0.25]);
        let q = d(&[0.0, 0.5, 0.5]);
        let c = chernoff_information(&p, &q).unwrap();
        // Σ p^λ q^(1-λ) = 2^-λ on (0, 1), so the supremum 1 is approached at λ → 1.
        let brute = (1..100_000)
            .map(|k| chernoff_sum(p.probs(), q.probs(), k as f64 / 1e5).log2())
            .fold(f64::INFINITY, f64::min);
        assert!(c.value >= -brute - 1e-12);
        assert_abs_diff_eq!(c.value, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn sason_examples() {
        let p = d(&[0.3, 0.7]);
        assert_eq!(sason_lower_bound(&p, &p).unwrap(), 0.0);
        assert!(sason_lower_bound(&d(&[1.0, 0.0]), &d(&[0.0, 1.0]))
            .unwrap()
            .is_infinite());
    }

    #[test]
    fn works_in_single_precision() {
        let p = Distribution::<f32>::from_f64s(&[0.4, 0.4, 0.2]).unwrap();
        let q = Distribution::<f32>::from_f64s(&[0.3, 0.6, 0.1]).unwrap();
        let c32 = chernoff_information(&p, &q).unwrap().value as f64;
        let c64 = chernoff_information(&p.cast::<f64>().unwrap(), &q.cast().unwrap())
            .unwrap()
            .value;
        assert_abs_diff_eq!(c32, c64, epsilon = 1e-5);
    }

    fn arb_dist(k: usize) -> impl Strategy<Value = Distribution<f64>> {
        prop::collection::vec(0.01f64..1.0, k).prop_map(|w| {
            let s: f64 = w.iter().sum();
            Distribution::new(w.into_iter().map(|x| x / s).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn entropy_in_range(p in (2usize..8).prop_flat_map(arb_dist)) {
            let h = entropy(&p);
            prop_assert!(h >= 0.0 && h <= (p.alphabet_size() as f64).log2() + 1e-12);
        }

        #[test]
        fn kl_nonnegative((p, q) in (2usize..6).prop_flat_map(|k| (arb_dist(k), arb_dist(k)))) {
            let dv = kl_divergence(&p, &q).unwrap();
            prop_assert!(dv >= 0.0);
            prop_assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        }

        #[test]
        fn variational_is_metric((p, q, r) in (2usize..6).prop_flat_map(|k| (arb_dist(k), arb_dist(k), arb_dist(k)))) {
            let pq = variational_distance(&p, &q).unwrap();
            prop_assert_eq!(pq, variational_distance(&q, &p).unwrap());
            let pr = variational_distance(&p, &r).unwrap();
            let rq = variational_distance(&r, &q).unwrap();
            prop_assert!(pq <= pr + rq + 1e-15);
            prop_assert!((0.0..=1.0).contains(&pq));
        }

        #[test]
        fn chernoff_symmetric_and_equidistant((p, q) in (2usize..6).prop_flat_map(|k| (arb_dist(k), arb_dist(k)))) {
            prop_assume!(variational_distance(&p, &q).unwrap() > 1e-3);
            let a = chernoff_information(&p, &q).unwrap();
            let b = chernoff_information(&q, &p).unwrap();
            prop_assert!((a.value - b.value).abs() < 1e-9);
            // Swapping the arguments mirrors the tilt: λ ↦ 1 - λ.
            let mirrored = -chernoff_sum(p.probs(), q.probs(), 1.0 - b.lambda).log2();
            prop_assert!((mirrored - a.value).abs() < 1e-12);
            let t = tilted(&p, &q, a.lambda).unwrap();
            let dp = kl_divergence(&t, &p).unwrap();
            let dq = kl_divergence(&t, &q).unwrap();
            prop_assert!((dp - dq).abs() < 1e-6);
            prop_assert!((dp - a.value).abs() < 1e-6);
            prop_assert!(a.value >= sason_lower_bound(&p, &q).unwrap() - 1e-12);
        }
    }
}
