//! Exact information-theoretic primitives over finite cyclic alphabets.
//!
//! Everything here is base-2: entropies and mutual informations are in bits.
//! Distributions are validated once at construction, so the arithmetic
//! operations themselves are total.

use thiserror::Error;

/// Tolerance for "sums to one" checks at construction time.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("probability vector is empty")]
    EmptyAlphabet,
    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, expected 1 within {tol}")]
    NotNormalized { sum: f64, tol: f64 },
    #[error("alphabet size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("expected a {expected}-axis joint, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shape {dims:?} holds {product} entries, got {len}")]
    ShapeMismatch {
        dims: Vec<usize>,
        product: usize,
        len: usize,
    },
    #[error("axis {axis} out of range for a {ndims}-axis joint")]
    AxisOutOfRange { axis: usize, ndims: usize },
    #[error("value {value} outside [0, 1]")]
    OutOfUnitInterval { value: f64 },
}

/// Probability mass function over `{0, .., m-1}`.
///
/// Entries are nonnegative and renormalized to sum to exactly 1 (the raw sum
/// must already be within [`NORMALIZATION_TOL`] of 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self, InfoError> {
        if probs.is_empty() {
            return Err(InfoError::EmptyAlphabet);
        }
        for (index, &value) in probs.iter().enumerate() {
            if value < 0.0 || !value.is_finite() {
                return Err(InfoError::NegativeProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(InfoError::NotNormalized {
                sum,
                tol: NORMALIZATION_TOL,
            });
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Self { probs })
    }

    /// Uniform law over an `m`-ary alphabet.
    pub fn uniform(m: usize) -> Self {
        assert!(m >= 1, "alphabet size must be at least 1");
        Self {
            probs: vec![1.0 / m as f64; m],
        }
    }

    /// Point mass at symbol `at` in an `m`-ary alphabet.
    pub fn point_mass(m: usize, at: usize) -> Self {
        assert!(
            at < m,
            "point mass symbol {at} outside alphabet of size {m}"
        );
        let mut probs = vec![0.0; m];
        probs[at] = 1.0;
        Self { probs }
    }

    /// Binary law with `Pr{1} = p`.
    pub fn bernoulli(p: f64) -> Result<Self, InfoError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(InfoError::OutOfUnitInterval { value: p });
        }
        Ok(Self {
            probs: vec![1.0 - p, p],
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }
}

impl std::ops::Index<usize> for Pmf {
    type Output = f64;

    fn index(&self, symbol: usize) -> &f64 {
        &self.probs[symbol]
    }
}

/// Joint probability mass function over a product alphabet, stored flat in
/// row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    dims: Vec<usize>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(dims: Vec<usize>, probs: Vec<f64>) -> Result<Self, InfoError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(InfoError::EmptyAlphabet);
        }
        let product: usize = dims.iter().product();
        if product != probs.len() {
            return Err(InfoError::ShapeMismatch {
                dims,
                product,
                len: probs.len(),
            });
        }
        for (index, &value) in probs.iter().enumerate() {
            if value < 0.0 || !value.is_finite() {
                return Err(InfoError::NegativeProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(InfoError::NotNormalized {
                sum,
                tol: NORMALIZATION_TOL,
            });
        }
        let probs = probs.into_iter().map(|p| p / sum).collect();
        Ok(Self { dims, probs })
    }

    /// Builds a joint by evaluating `f` at every multi-index.
    pub fn from_fn(dims: &[usize], f: impl Fn(&[usize]) -> f64) -> Result<Self, InfoError> {
        let product: usize = dims.iter().product();
        let mut probs = Vec::with_capacity(product);
        let mut idx = vec![0usize; dims.len()];
        for flat in 0..product {
            unflatten(dims, flat, &mut idx);
            probs.push(f(&idx));
        }
        Self::new(dims.to_vec(), probs)
    }

    /// Independent product of marginal laws.
    pub fn product(margins: &[&Pmf]) -> Self {
        let dims: Vec<usize> = margins.iter().map(|p| p.alphabet_size()).collect();
        let joint = Self::from_fn(&dims, |idx| {
            idx.iter()
                .zip(margins)
                .map(|(&s, m)| m.get(s))
                .product::<f64>()
        });
        joint.expect("product of valid pmfs is a valid joint")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn ndims(&self) -> usize {
        self.dims.len()
    }

    /// Flat row-major index of a multi-index.
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.dims.len());
        let mut flat = 0;
        for (i, &s) in idx.iter().enumerate() {
            debug_assert!(s < self.dims[i]);
            flat = flat * self.dims[i] + s;
        }
        flat
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.probs[self.flat_index(idx)]
    }

    /// Marginal law of one axis.
    pub fn marginal(&self, axis: usize) -> Result<Pmf, InfoError> {
        if axis >= self.dims.len() {
            return Err(InfoError::AxisOutOfRange {
                axis,
                ndims: self.dims.len(),
            });
        }
        let mut sums = vec![0.0; self.dims[axis]];
        let mut idx = vec![0usize; self.dims.len()];
        for (flat, &p) in self.probs.iter().enumerate() {
            unflatten(&self.dims, flat, &mut idx);
            sums[idx[axis]] += p;
        }
        Pmf::new(sums)
    }

    /// Joint entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }
}

fn unflatten(dims: &[usize], mut flat: usize, idx: &mut [usize]) {
    for axis in (0..dims.len()).rev() {
        idx[axis] = flat % dims[axis];
        flat /= dims[axis];
    }
}

/// `-sum p log2 p` with the `0 log 0 = 0` convention, over any nonnegative
/// slice (callers guarantee normalization).
pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Shannon entropy of a pmf, in bits. Lies in `[0, log2 m]`.
pub fn entropy(p: &Pmf) -> f64 {
    p.entropy()
}

/// Binary entropy function `H(x) = -x log2 x - (1-x) log2 (1-x)`.
pub fn binary_entropy(x: f64) -> Result<f64, InfoError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(InfoError::OutOfUnitInterval { value: x });
    }
    Ok(entropy_of(&[x, 1.0 - x]))
}

/// Law of `A + B mod m` for independent `A ~ a`, `B ~ b` on a common m-ary
/// alphabet.
pub fn cyclic_convolve(a: &Pmf, b: &Pmf) -> Result<Pmf, InfoError> {
    let m = a.alphabet_size();
    if b.alphabet_size() != m {
        return Err(InfoError::SizeMismatch {
            left: m,
            right: b.alphabet_size(),
        });
    }
    let mut out = vec![0.0; m];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for j in 0..m {
            // (k - j) mod m, written without underflow
            acc += a.get(j) * b.get((k + m - j) % m);
        }
        *slot = acc;
    }
    Pmf::new(out)
}

/// Mutual information `I(A;B)` of a two-axis joint, in bits.
///
/// Computed as `H(A) + H(B) - H(A,B)`; tiny negatives from rounding are
/// clamped to zero.
pub fn mutual_information(joint: &JointPmf) -> Result<f64, InfoError> {
    if joint.ndims() != 2 {
        return Err(InfoError::DimensionMismatch {
            expected: 2,
            got: joint.ndims(),
        });
    }
    let (rows, cols) = (joint.dims()[0], joint.dims()[1]);
    let mut row_sums = vec![0.0; rows];
    let mut col_sums = vec![0.0; cols];
    for (flat, &p) in joint.probs().iter().enumerate() {
        row_sums[flat / cols] += p;
        col_sums[flat % cols] += p;
    }
    let mi = entropy_of(&row_sums) + entropy_of(&col_sums) - joint.entropy();
    Ok(mi.max(0.0))
}

/// Capacity of the m-ary modulo-additive channel `Y = X + N mod m`, in
/// bits per use: `log2 m - H(N)`, attained by a uniform input.
pub fn modulo_channel_capacity(noise: &Pmf) -> f64 {
    (noise.alphabet_size() as f64).log2() - noise.entropy()
}
