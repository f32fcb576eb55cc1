//! Method of types: empirical distributions, type classes and their sizes.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::simplex::Distribution;

/// Largest number of type classes [`enumerate_types`] agrees to produce.
pub const MAX_TYPE_CLASSES: u128 = 1_000_000_000;

/// Sequence lengths up to this use exact big-integer multinomials.
pub const EXACT_SIZE_LIMIT: u64 = 170;

/// A sequence over the alphabet `{0, .., alphabet_size - 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    symbols: Vec<u32>,
    alphabet_size: usize,
}

impl SymbolSequence {
    pub fn new(symbols: Vec<u32>, alphabet_size: usize) -> Result<Self> {
        if let Some(&s) = symbols.iter().find(|&&s| s as usize >= alphabet_size) {
            return Err(Error::SymbolOutOfRange {
                symbol: s as usize,
                alphabet_size,
            });
        }
        Ok(Self {
            symbols,
            alphabet_size,
        })
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Symbol counts of a length-`n` sequence, i.e. its type `P_x = counts / n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeVector {
    counts: Vec<u64>,
    n: u64,
}

impl TypeVector {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::InvalidType(format!(
                "alphabet size {} < 2",
                counts.len()
            )));
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidType("counts sum to zero".into()));
        }
        Ok(Self { counts, n })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    pub fn as_distribution<T: Real>(&self) -> Distribution<T> {
        let n = T::of_count(self.n);
        Distribution::new(self.counts.iter().map(|&c| T::of_count(c) / n).collect())
            .expect("counts over n always form a distribution")
    }

    pub(crate) fn frequencies<T: Real>(&self) -> Vec<T> {
        let n = T::of_count(self.n);
        self.counts.iter().map(|&c| T::of_count(c) / n).collect()
    }
}

/// Counts the occurrences of each symbol.
pub fn type_of(x: &SymbolSequence) -> Result<TypeVector> {
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut counts = vec![0u64; x.alphabet_size];
    for &s in &x.symbols {
        counts[s as usize] += 1;
    }
    TypeVector::new(counts)
}

/// `binomial(n + k - 1, k - 1)`, saturating at `u128::MAX`.
pub fn type_class_count(n: u64, alphabet_size: usize) -> u128 {
    let k = alphabet_size as u128 - 1;
    let top = n as u128 + k;
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (top - k + i) / i stays integral at each step.
        match acc.checked_mul(top - k + i) {
            Some(v) => acc = v / i,
            None => return u128::MAX,
        }
    }
    acc
}

/// Every type of length-`n` sequences over an alphabet of the given size, in
/// descending lexicographic order of the counts (`[n, 0, ..]` first).
pub fn enumerate_types(n: u64, alphabet_size: usize) -> Result<TypeEnumeration> {
    if n == 0 {
        return Err(Error::InvalidType(
            "sequence length must be positive".into(),
        ));
    }
    if alphabet_size < 2 {
        return Err(Error::InvalidType(format!(
            "alphabet size {alphabet_size} < 2"
        )));
    }
    let count = type_class_count(n, alphabet_size);
    if count > MAX_TYPE_CLASSES {
        return Err(Error::EnumerationOverflow {
            count,
            limit: MAX_TYPE_CLASSES,
        });
    }
    let mut first = vec![0u64; alphabet_size];
    first[0] = n;
    Ok(TypeEnumeration {
        next: Some(first),
        n,
        remaining: count,
    })
}

/// Iterator returned by [`enumerate_types`].
#[derive(Debug, Clone)]
pub struct TypeEnumeration {
    next: Option<Vec<u64>>,
    n: u64,
    remaining: u128,
}

impl Iterator for TypeEnumeration {
    type Item = TypeVector;

    fn next(&mut self) -> Option<TypeVector> {
        let current = self.next.take()?;
        let mut following = current.clone();
        let k = following.len();
        let tail = following[k - 1];
        following[k - 1] = 0;
        if let Some(i) = (0..k - 1).rev().find(|&i| following[i] > 0) {
            following[i] -= 1;
            following[i + 1] = tail + 1;
            self.next = Some(following);
        }
        self.remaining -= 1;
        Some(TypeVector {
            counts: current,
            n: self.n,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

/// Size of the type class `T(P_x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeClassSize {
    /// `n! / Π counts!`, available for `n ≤ EXACT_SIZE_LIMIT`.
    pub exact: Option<BigUint>,
    pub log2: f64,
}

fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

pub fn type_class_size(t: &TypeVector) -> TypeClassSize {
    if t.n <= EXACT_SIZE_LIMIT {
        let denom = t
            .counts
            .iter()
            .fold(BigUint::one(), |acc, &c| acc * factorial(c));
        let exact = factorial(t.n) / denom;
        let log2 = exact
            .to_f64()
            .map(f64::log2)
            .unwrap_or_else(|| log2_multinomial(t));
        TypeClassSize {
            exact: Some(exact),
            log2,
        }
    } else {
        TypeClassSize {
            exact: None,
            log2: log2_multinomial(t),
        }
    }
}

fn log2_multinomial(t: &TypeVector) -> f64 {
    let ln = ln_gamma(t.n as f64 + 1.0)
        - t.counts
            .iter()
            .map(|&c| ln_gamma(c as f64 + 1.0))
            .sum::<f64>();
    ln / std::f64::consts::LN_2
}

/// `log2` of the probability of any single sequence of type `t` under i.i.d.
/// draws from `p`: `Σ_a counts[a] log2 p(a)`, which equals
/// `-n (H(P_x) + D(P_x‖p))`.
pub fn sequence_log_prob<T: Real>(t: &TypeVector, p: &Distribution<T>) -> Result<T> {
    if t.alphabet_size() != p.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            left: t.alphabet_size(),
            right: p.alphabet_size(),
        });
    }
    let mut total = T::zero();
    for (&c, &pa) in t.counts.iter().zip(p.probs()) {
        if c == 0 {
            continue;
        }
        if pa <= T::zero() {
            return Ok(T::neg_infinity());
        }
        total = total + T::of_count(c) * pa.log2();
    }
    Ok(total)
}

/// Draws `n` i.i.d. symbols from `p` by inverting its cumulative sums.
pub fn sample_sequence<T: Real, R: Rng + ?Sized>(
    p: &Distribution<T>,
    n: usize,
    rng: &mut R,
) -> SymbolSequence {
    let sampler = InverseCdf::new(p);
    let symbols = (0..n).map(|_| sampler.draw(rng)).collect();
    SymbolSequence {
        symbols,
        alphabet_size: p.alphabet_size(),
    }
}

/// Precomputed cumulative sums for repeated sampling from one distribution.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    cumulative: Vec<f64>,
    last_supported: u32,
}

impl InverseCdf {
    pub fn new<T: Real>(p: &Distribution<T>) -> Self {
        let mut acc = 0.0;
        let cumulative = p
            .probs()
            .iter()
            .map(|x| {
                acc += x.to_f64().unwrap_or(0.0);
                acc
            })
            .collect();
        let last_supported =
            p.probs()
                .iter()
                .rposition(|&x| x > T::zero())
                .expect("a distribution has positive mass somewhere") as u32;
        Self {
            cumulative,
            last_supported,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .map_or(self.last_supported, |i| i as u32)
            .min(self.last_supported)
    }
}
