//! Modulo-additive wiretap channels with a noisy feedback path.
//!
//! A channel is described by alphabet sizes and the joint law of the noise
//! triple `(N0, N1, N2)` hitting the feedback link, the destination, and the
//! wiretapper. All additions are per-output modulo the receiving alphabet:
//!
//! ```text
//! y0 = (x + x1 + n0) mod |Y0|      received back at the source
//! y  = (x + x1 + n1) mod |Y|       received at the destination
//! z  = (x + x1 + n2) mod |Z|       received at the wiretapper
//! ```

use rand::Rng;
use thiserror::Error;

use crate::infotheory::{InfoError, JointPmf, Pmf};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("alphabet size {size} for {role} is too small (need >= {min})")]
    AlphabetTooSmall {
        role: &'static str,
        size: usize,
        min: usize,
    },
    #[error("noise law has dims {got:?}, expected {want:?}")]
    NoiseShapeMismatch { got: Vec<usize>, want: Vec<usize> },
    #[error("symbol {symbol} outside {role} alphabet of size {size}")]
    SymbolOutOfAlphabet {
        role: &'static str,
        symbol: usize,
        size: usize,
    },
    #[error("crossover probability {value} for {role} outside [0, 1/2]")]
    CrossoverOutOfRange { role: &'static str, value: f64 },
    #[error("case {case} needs {need}, got epsilon={epsilon}, delta={delta}")]
    CaseOrderingViolated {
        case: u8,
        need: &'static str,
        epsilon: f64,
        delta: f64,
    },
    #[error("case 5 joint marginal for {role} is {got}, expected {want} within 1e-12")]
    Case5MarginalMismatch {
        role: &'static str,
        got: f64,
        want: f64,
    },
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// The five binary-symmetric parameterizations of the wiretap pair
/// `(N1, N2)` with `Pr{N1=1} = epsilon` and `Pr{N2=1} = delta`.
#[derive(Debug, Clone, PartialEq)]
pub enum BscCase {
    /// Case 1: both links noiseless (`epsilon = delta = 0`).
    Noiseless,
    /// Case 2: `N1` and `N2` independent.
    Independent { epsilon: f64, delta: f64 },
    /// Case 3: main channel degraded w.r.t. the wiretap channel,
    /// `N1 = N2 + N'` with `Pr{N'=1} = (epsilon - delta) / (1 - 2 delta)`.
    /// Needs `delta <= epsilon`.
    MainDegraded { epsilon: f64, delta: f64 },
    /// Case 4: wiretap channel degraded w.r.t. the main channel,
    /// `N2 = N1 + N'` with `Pr{N'=1} = (delta - epsilon) / (1 - 2 epsilon)`.
    /// Needs `epsilon <= delta`.
    WiretapDegraded { epsilon: f64, delta: f64 },
    /// Case 5: arbitrary correlated pair given by an explicit 2x2 joint law
    /// whose marginals must match `Bernoulli(epsilon)` and `Bernoulli(delta)`.
    Correlated {
        epsilon: f64,
        delta: f64,
        joint: JointPmf,
    },
}

impl BscCase {
    /// Numeric identifier 1..=5 used by the CLI and scenario files.
    pub fn case_id(&self) -> u8 {
        match self {
            BscCase::Noiseless => 1,
            BscCase::Independent { .. } => 2,
            BscCase::MainDegraded { .. } => 3,
            BscCase::WiretapDegraded { .. } => 4,
            BscCase::Correlated { .. } => 5,
        }
    }

    /// Destination crossover probability `Pr{N1 = 1}`.
    pub fn epsilon(&self) -> f64 {
        match self {
            BscCase::Noiseless => 0.0,
            BscCase::Independent { epsilon, .. }
            | BscCase::MainDegraded { epsilon, .. }
            | BscCase::WiretapDegraded { epsilon, .. }
            | BscCase::Correlated { epsilon, .. } => *epsilon,
        }
    }

    /// Wiretapper crossover probability `Pr{N2 = 1}`.
    pub fn delta(&self) -> f64 {
        match self {
            BscCase::Noiseless => 0.0,
            BscCase::Independent { delta, .. }
            | BscCase::MainDegraded { delta, .. }
            | BscCase::WiretapDegraded { delta, .. }
            | BscCase::Correlated { delta, .. } => *delta,
        }
    }
}

/// A modulo-additive wiretap channel with noisy feedback.
///
/// Immutable after construction; sampling takes a caller-owned RNG so the
/// channel itself can be shared freely across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct WiretapChannel {
    x_size: usize,
    x1_size: usize,
    y_size: usize,
    z_size: usize,
    y0_size: usize,
    noise_law: JointPmf,
    noise_cdf: Vec<f64>,
    bsc_case: Option<BscCase>,
}

impl WiretapChannel {
    /// Builds a channel from alphabet sizes and the joint `(N0, N1, N2)` law
    /// with dims `(y0_size, y_size, z_size)`. The feedback alphabet defaults
    /// to the wiretapper alphabet.
    pub fn new(
        x_size: usize,
        y_size: usize,
        z_size: usize,
        y0_size: usize,
        noise_law: JointPmf,
    ) -> Result<Self, ChannelError> {
        for (role, size, min) in [
            ("X", x_size, 2),
            ("Y", y_size, 2),
            ("Z", z_size, 2),
            ("Y0", y0_size, 1),
        ] {
            if size < min {
                return Err(ChannelError::AlphabetTooSmall { role, size, min });
            }
        }
        let want = vec![y0_size, y_size, z_size];
        if noise_law.dims() != want.as_slice() {
            return Err(ChannelError::NoiseShapeMismatch {
                got: noise_law.dims().to_vec(),
                want,
            });
        }
        let mut noise_cdf = Vec::with_capacity(noise_law.probs().len());
        let mut acc = 0.0;
        for &p in noise_law.probs() {
            acc += p;
            noise_cdf.push(acc);
        }
        Ok(Self {
            x_size,
            x1_size: z_size,
            y_size,
            z_size,
            y0_size,
            noise_law,
            noise_cdf,
            bsc_case: None,
        })
    }

    /// Convenience constructor: joint `(N1, N2)` law with a noiseless
    /// feedback link (`N0` a point mass at 0, `|Y0| = |Y|`).
    pub fn from_wiretap_pair(
        x_size: usize,
        y_size: usize,
        z_size: usize,
        pair_law: JointPmf,
    ) -> Result<Self, ChannelError> {
        if pair_law.dims() != [y_size, z_size] {
            return Err(ChannelError::NoiseShapeMismatch {
                got: pair_law.dims().to_vec(),
                want: vec![y_size, z_size],
            });
        }
        let y0_size = y_size;
        let full = JointPmf::from_fn(&[y0_size, y_size, z_size], |idx| {
            if idx[0] == 0 {
                pair_law.get(&idx[1..])
            } else {
                0.0
            }
        })?;
        Self::new(x_size, y_size, z_size, y0_size, full)
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn x1_size(&self) -> usize {
        self.x1_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn z_size(&self) -> usize {
        self.z_size
    }

    pub fn y0_size(&self) -> usize {
        self.y0_size
    }

    pub fn noise_law(&self) -> &JointPmf {
        &self.noise_law
    }

    /// Construction metadata when the channel came from [`build_bsc_case`].
    pub fn bsc_case(&self) -> Option<&BscCase> {
        self.bsc_case.as_ref()
    }

    /// Marginal law of the destination noise `N1`.
    pub fn main_noise(&self) -> Pmf {
        self.noise_law.marginal(1).expect("axis 1 exists")
    }

    /// Marginal law of the wiretapper noise `N2`.
    pub fn wiretap_noise(&self) -> Pmf {
        self.noise_law.marginal(2).expect("axis 2 exists")
    }

    /// Joint law of `(N1, N2)` with the feedback noise marginalized out.
    pub fn wiretap_pair(&self) -> JointPmf {
        let dims = [self.y_size, self.z_size];
        JointPmf::from_fn(&dims, |idx| {
            (0..self.y0_size)
                .map(|n0| self.noise_law.get(&[n0, idx[0], idx[1]]))
                .sum()
        })
        .expect("marginal of a valid joint")
    }

    /// Applies the channel to one symbol triple under a fixed noise draw.
    pub fn transmit(
        &self,
        x: usize,
        x1: usize,
        noise: (usize, usize, usize),
    ) -> Result<(usize, usize, usize), ChannelError> {
        let (n0, n1, n2) = noise;
        for (role, symbol, size) in [
            ("X", x, self.x_size),
            ("X1", x1, self.x1_size),
            ("N0", n0, self.y0_size),
            ("N1", n1, self.y_size),
            ("N2", n2, self.z_size),
        ] {
            if symbol >= size {
                return Err(ChannelError::SymbolOutOfAlphabet { role, symbol, size });
            }
        }
        let y0 = (x + x1 + n0) % self.y0_size;
        let y = (x + x1 + n1) % self.y_size;
        let z = (x + x1 + n2) % self.z_size;
        Ok((y0, y, z))
    }

    /// Draws one `(n0, n1, n2)` triple from the noise law.
    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize, usize) {
        let u: f64 = rng.random();
        let flat = self
            .noise_cdf
            .partition_point(|&c| c < u)
            .min(self.noise_cdf.len() - 1);
        let z = flat % self.z_size;
        let rest = flat / self.z_size;
        let n1 = rest % self.y_size;
        let n0 = rest / self.y_size;
        (n0, n1, z)
    }
}

fn check_crossover(role: &'static str, value: f64) -> Result<(), ChannelError> {
    if !(0.0..=0.5).contains(&value) {
        return Err(ChannelError::CrossoverOutOfRange { role, value });
    }
    Ok(())
}

/// Builds the binary wiretap channel for one of the five correlation
/// structures. Marginals of the constructed `(N1, N2)` law are exactly
/// `Bernoulli(epsilon)` and `Bernoulli(delta)`.
pub fn build_bsc_case(case: &BscCase) -> Result<WiretapChannel, ChannelError> {
    let pair = wiretap_pair_law(case)?;
    let mut ch = WiretapChannel::from_wiretap_pair(2, 2, 2, pair)?;
    ch.bsc_case = Some(case.clone());
    Ok(ch)
}

/// Joint 2x2 law of `(N1, N2)` for a [`BscCase`].
fn wiretap_pair_law(case: &BscCase) -> Result<JointPmf, ChannelError> {
    match case {
        BscCase::Noiseless => {
            Ok(JointPmf::new(vec![2, 2], vec![1.0, 0.0, 0.0, 0.0]).expect("point mass"))
        }
        BscCase::Independent { epsilon, delta } => {
            check_crossover("epsilon", *epsilon)?;
            check_crossover("delta", *delta)?;
            let n1 = Pmf::bernoulli(*epsilon)?;
            let n2 = Pmf::bernoulli(*delta)?;
            Ok(JointPmf::product(&[&n1, &n2]))
        }
        BscCase::MainDegraded { epsilon, delta } => {
            check_crossover("epsilon", *epsilon)?;
            check_crossover("delta", *delta)?;
            if delta > epsilon {
                return Err(ChannelError::CaseOrderingViolated {
                    case: 3,
                    need: "delta <= epsilon",
                    epsilon: *epsilon,
                    delta: *delta,
                });
            }
            // N1 = N2 + N' with N' independent of N2.
            let extra = if 1.0 - 2.0 * delta > 0.0 {
                (epsilon - delta) / (1.0 - 2.0 * delta)
            } else {
                0.0
            };
            let n2 = Pmf::bernoulli(*delta)?;
            let np = Pmf::bernoulli(extra)?;
            Ok(JointPmf::from_fn(&[2, 2], |idx| {
                let (n1, n2v) = (idx[0], idx[1]);
                n2.get(n2v) * np.get(n1 ^ n2v)
            })?)
        }
        BscCase::WiretapDegraded { epsilon, delta } => {
            check_crossover("epsilon", *epsilon)?;
            check_crossover("delta", *delta)?;
            if epsilon > delta {
                return Err(ChannelError::CaseOrderingViolated {
                    case: 4,
                    need: "epsilon <= delta",
                    epsilon: *epsilon,
                    delta: *delta,
                });
            }
            // N2 = N1 + N' with N' independent of N1.
            let extra = if 1.0 - 2.0 * epsilon > 0.0 {
                (delta - epsilon) / (1.0 - 2.0 * epsilon)
            } else {
                0.0
            };
            let n1 = Pmf::bernoulli(*epsilon)?;
            let np = Pmf::bernoulli(extra)?;
            Ok(JointPmf::from_fn(&[2, 2], |idx| {
                let (n1v, n2) = (idx[0], idx[1]);
                n1.get(n1v) * np.get(n1v ^ n2)
            })?)
        }
        BscCase::Correlated {
            epsilon,
            delta,
            joint,
        } => {
            check_crossover("epsilon", *epsilon)?;
            check_crossover("delta", *delta)?;
            if joint.dims() != [2, 2] {
                return Err(ChannelError::NoiseShapeMismatch {
                    got: joint.dims().to_vec(),
                    want: vec![2, 2],
                });
            }
            let n1_one = joint.marginal(0)?.get(1);
            if (n1_one - epsilon).abs() > 1e-12 {
                return Err(ChannelError::Case5MarginalMismatch {
                    role: "N1",
                    got: n1_one,
                    want: *epsilon,
                });
            }
            let n2_one = joint.marginal(1)?.get(1);
            if (n2_one - delta).abs() > 1e-12 {
                return Err(ChannelError::Case5MarginalMismatch {
                    role: "N2",
                    got: n2_one,
                    want: *delta,
                });
            }
            Ok(joint.clone())
        }
    }
}
