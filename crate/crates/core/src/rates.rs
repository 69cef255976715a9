//! Secrecy rates and capacity bounds: closed forms for the binary symmetric
//! cases, grid-certified bounds for small general alphabets, and the
//! numerical optimizer for the half-duplex feedback scheme.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channels::{BscCase, WiretapChannel};
use crate::infotheory::{
    cyclic_convolve, entropy_of, modulo_channel_capacity, InfoError, JointPmf, Pmf,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RateError {
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    DomainViolation {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("input-distribution search supports |X| <= {max}, channel has |X| = {size}")]
    AlphabetTooLarge { size: usize, max: usize },
    #[error("distribution over {got} symbols, channel expects {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// Which tightness condition of the public-discussion bounds applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TightCase {
    /// Main and wiretap channels independent given the input.
    Independent,
    /// Wiretap channel is a degraded version of the main channel.
    WiretapDegraded,
    /// Main channel is a degraded version of the wiretap channel.
    MainDegraded,
}

/// Lower and upper bounds on the secret key capacity of the public
/// discussion paradigm, in bits per use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicDiscussionBounds {
    pub lower: f64,
    pub upper: f64,
    pub tight: bool,
    pub tight_case: Option<TightCase>,
}

impl PublicDiscussionBounds {
    fn tight_at(value: f64, case: TightCase) -> Self {
        Self {
            lower: value,
            upper: value,
            tight: true,
            tight_case: Some(case),
        }
    }
}

/// Result of maximizing the half-duplex feedback rate over the input bias
/// `mu` and the feedback probability `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfDuplexSolution {
    /// Achievable secrecy rate in bits per use (clamped at zero).
    pub rate: f64,
    pub mu_star: f64,
    pub t_star: f64,
    /// Effective wiretapper crossover `delta + t - 2 delta t` at the optimum.
    pub delta_hat: f64,
}

/// One channel's rate summary. `c_s` and `half_duplex` are only populated
/// for binary channels, where the closed forms apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub c_s: Option<f64>,
    pub pd_bounds: PublicDiscussionBounds,
    pub c_s_f: f64,
    pub half_duplex: Option<HalfDuplexSolution>,
}

fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<(), RateError> {
    if !(lo..=hi).contains(&value) {
        return Err(RateError::DomainViolation {
            name,
            value,
            lo,
            hi,
        });
    }
    Ok(())
}

/// `Pr{A xor B = 1}` for independent Bernoulli(a), Bernoulli(b).
fn xor_prob(a: f64, b: f64) -> f64 {
    a + b - 2.0 * a * b
}

fn h(x: f64) -> f64 {
    entropy_of(&[x, 1.0 - x])
}

/// No-feedback secrecy capacity of the binary symmetric wiretap channel:
/// `[H(delta) - H(epsilon)]^+`.
pub fn secrecy_capacity_bsc(eps: f64, delta: f64) -> Result<f64, RateError> {
    check_range("epsilon", eps, 0.0, 0.5)?;
    check_range("delta", delta, 0.0, 0.5)?;
    Ok((h(delta) - h(eps)).max(0.0))
}

/// Secrecy capacity with full-duplex noisy feedback: the main-channel
/// capacity `log2 |Y| - H(N1)`, independent of the wiretapper.
pub fn full_duplex_secrecy_capacity(ch: &WiretapChannel) -> f64 {
    modulo_channel_capacity(&ch.main_noise())
}

/// Bounds on the secret key capacity of the public discussion paradigm.
///
/// Channels built from a [`BscCase`] use the matching closed form (cases
/// 1-4); everything else is bounded by an exhaustive search over input
/// distributions on a simplex grid (step 0.01 for binary inputs, 0.05 up to
/// `|X| = 4`; larger input alphabets are rejected).
pub fn public_discussion_bounds(ch: &WiretapChannel) -> Result<PublicDiscussionBounds, RateError> {
    match ch.bsc_case() {
        Some(BscCase::Noiseless) => Ok(PublicDiscussionBounds::tight_at(
            0.0,
            TightCase::MainDegraded,
        )),
        Some(BscCase::Independent { epsilon, delta }) => Ok(PublicDiscussionBounds::tight_at(
            h(xor_prob(*epsilon, *delta)) - h(*epsilon),
            TightCase::Independent,
        )),
        Some(BscCase::MainDegraded { .. }) => Ok(PublicDiscussionBounds::tight_at(
            0.0,
            TightCase::MainDegraded,
        )),
        Some(BscCase::WiretapDegraded { epsilon, delta }) => Ok(PublicDiscussionBounds::tight_at(
            h(*delta) - h(*epsilon),
            TightCase::WiretapDegraded,
        )),
        Some(BscCase::Correlated { .. }) | None => grid_bounds(ch),
    }
}

fn grid_bounds(ch: &WiretapChannel) -> Result<PublicDiscussionBounds, RateError> {
    let m = ch.x_size();
    let steps = match m {
        2 => 100,
        3 | 4 => 20,
        _ => return Err(RateError::AlphabetTooLarge { size: m, max: 4 }),
    };
    let pair = ch.wiretap_pair();
    let mut lower = f64::NEG_INFINITY;
    let mut max_ixy = 0.0f64;
    let mut max_ixy_given_z = 0.0f64;
    for input in simplex_grid(m, steps) {
        let s = InputStats::compute(ch, &pair, &input);
        lower = lower.max((s.ixy - s.ixz).max(s.ixy - s.iyz));
        max_ixy = max_ixy.max(s.ixy);
        max_ixy_given_z = max_ixy_given_z.max(s.ixy_given_z);
    }
    let upper = max_ixy.min(max_ixy_given_z);
    // Rounding guard: 0 <= lower <= upper holds mathematically.
    let lower = lower.max(0.0).min(upper);
    Ok(PublicDiscussionBounds {
        lower,
        upper,
        tight: false,
        tight_case: None,
    })
}

struct InputStats {
    ixy: f64,
    ixz: f64,
    iyz: f64,
    ixy_given_z: f64,
}

impl InputStats {
    /// Information quantities of the no-feedback triple `(X, X+N1, X+N2)`
    /// under input law `px`.
    fn compute(ch: &WiretapChannel, pair: &JointPmf, px: &[f64]) -> Self {
        let (nx, ny, nz) = (ch.x_size(), ch.y_size(), ch.z_size());
        let mut p_y = vec![0.0; ny];
        let mut p_z = vec![0.0; nz];
        let mut p_xy = vec![0.0; nx * ny];
        let mut p_xz = vec![0.0; nx * nz];
        let mut p_yz = vec![0.0; ny * nz];
        for (x, &pxv) in px.iter().enumerate() {
            for n1 in 0..ny {
                for n2 in 0..nz {
                    let p = pxv * pair.get(&[n1, n2]);
                    if p == 0.0 {
                        continue;
                    }
                    let y = (x + n1) % ny;
                    let z = (x + n2) % nz;
                    p_y[y] += p;
                    p_z[z] += p;
                    p_xy[x * ny + y] += p;
                    p_xz[x * nz + z] += p;
                    p_yz[y * nz + z] += p;
                }
            }
        }
        let h_x = entropy_of(px);
        let h_y = entropy_of(&p_y);
        let h_z = entropy_of(&p_z);
        let h_xy = entropy_of(&p_xy);
        let h_xz = entropy_of(&p_xz);
        let h_yz = entropy_of(&p_yz);
        // (N1, N2) determines (Y, Z) bijectively given X, so the triple
        // entropy splits as H(X) + H(N1, N2).
        let h_xyz = h_x + pair.entropy();
        Self {
            ixy: (h_x + h_y - h_xy).max(0.0),
            ixz: (h_x + h_z - h_xz).max(0.0),
            iyz: (h_y + h_z - h_yz).max(0.0),
            ixy_given_z: (h_xz + h_yz - h_z - h_xyz).max(0.0),
        }
    }
}

/// All pmfs over `m` symbols whose entries are multiples of `1/steps`.
pub(crate) fn simplex_grid(m: usize, steps: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(m);
    fill_simplex(m, steps, steps, &mut prefix, &mut out);
    out
}

fn fill_simplex(
    m: usize,
    steps: usize,
    left: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<f64>>,
) {
    if prefix.len() == m - 1 {
        let mut pmf: Vec<f64> = prefix.iter().map(|&k| k as f64 / steps as f64).collect();
        pmf.push(left as f64 / steps as f64);
        out.push(pmf);
        return;
    }
    for k in 0..=left {
        prefix.push(k);
        fill_simplex(m, steps, left - k, prefix, out);
        prefix.pop();
    }
}

/// Half-duplex achievable-rate objective at a fixed input bias `mu` and
/// feedback probability `t`, before the outer maximization and clamp:
///
/// ```text
/// (1-t) [H(eps xor mu) - H(eps)] - [H(dh xor mu) - H(dh)],  dh = delta xor t
/// ```
///
/// May be negative; [`optimize_half_duplex`] applies the positive-part clamp
/// to the maximized value.
pub fn half_duplex_bsc_rate(eps: f64, delta: f64, mu: f64, t: f64) -> Result<f64, RateError> {
    check_range("epsilon", eps, 0.0, 0.5)?;
    check_range("delta", delta, 0.0, 0.5)?;
    check_range("mu", mu, 0.0, 1.0)?;
    check_range("t", t, 0.0, 1.0)?;
    Ok(half_duplex_objective(eps, delta, mu, t))
}

fn half_duplex_objective(eps: f64, delta: f64, mu: f64, t: f64) -> f64 {
    let delta_hat = xor_prob(delta, t);
    (1.0 - t) * (h(xor_prob(eps, mu)) - h(eps)) - (h(xor_prob(delta_hat, mu)) - h(delta_hat))
}

/// Maximizes [`half_duplex_bsc_rate`] over `(mu, t)`.
///
/// Coarse grid at step 0.005 over `[0, 1/2] x [0, 1]` (`mu` restricted to
/// `[0, 1/2]` by the `mu <-> 1-mu` symmetry of the objective), then
/// coordinate-wise golden-section refinement to 1e-8. The grid scan keeps
/// the first maximizer in (t ascending, mu ascending) order, so exact ties
/// resolve toward smaller `t`.
pub fn optimize_half_duplex(eps: f64, delta: f64) -> Result<HalfDuplexSolution, RateError> {
    check_range("epsilon", eps, 0.0, 0.5)?;
    check_range("delta", delta, 0.0, 0.5)?;
    let f = |mu: f64, t: f64| half_duplex_objective(eps, delta, mu, t);

    const STEP: f64 = 0.005;
    let mut best = f64::NEG_INFINITY;
    let (mut mu, mut t) = (0.0, 0.0);
    for ti in 0..=200u32 {
        let t_grid = ti as f64 * STEP;
        for mi in 0..=100u32 {
            let mu_grid = mi as f64 * STEP;
            let v = f(mu_grid, t_grid);
            if v > best {
                best = v;
                mu = mu_grid;
                t = t_grid;
            }
        }
    }

    // Local refinement around the grid winner, one coordinate at a time.
    let half_window = 1.5 * STEP;
    for _ in 0..64 {
        let (mu_new, v_mu) = golden_max(
            |m| f(m, t),
            (mu - half_window).max(0.0),
            (mu + half_window).min(0.5),
        );
        if v_mu > best {
            best = v_mu;
            mu = mu_new;
        }
        let (t_new, v_t) = golden_max(
            |tt| f(mu, tt),
            (t - half_window).max(0.0),
            (t + half_window).min(1.0),
        );
        if v_t > best {
            best = v_t;
            t = t_new;
        } else if (mu_new - mu).abs() < 1e-9 && (t_new - t).abs() < 1e-9 {
            break;
        }
    }

    Ok(HalfDuplexSolution {
        rate: best.max(0.0),
        mu_star: mu,
        t_star: t,
        delta_hat: xor_prob(delta, t),
    })
}

/// Golden-section maximization of a unimodal `f` on `[a, b]` to interval
/// width 1e-10; returns `(argmax, max)`.
fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > 1e-10 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Achievable half-duplex rate on a general modulo-additive channel for a
/// fixed source input law `p_x` and feedback law `p_x1` over the wiretapper
/// alphabet (entry 0 is the "listen" probability):
///
/// ```text
/// [ p_x1[0] * I(X; X+N1)  -  I(X; X + (N2 conv p_x1)) ]^+
/// ```
pub fn general_half_duplex_rate(
    ch: &WiretapChannel,
    p_x: &Pmf,
    p_x1: &Pmf,
) -> Result<f64, RateError> {
    if p_x.alphabet_size() != ch.x_size() {
        return Err(RateError::SizeMismatch {
            got: p_x.alphabet_size(),
            want: ch.x_size(),
        });
    }
    if p_x1.alphabet_size() != ch.z_size() {
        return Err(RateError::SizeMismatch {
            got: p_x1.alphabet_size(),
            want: ch.z_size(),
        });
    }
    let listen = p_x1.get(0);
    let main_mi = additive_channel_mi(p_x, &ch.main_noise());
    let effective_tap_noise = cyclic_convolve(&ch.wiretap_noise(), p_x1)?;
    let tap_mi = additive_channel_mi(p_x, &effective_tap_noise);
    Ok((listen * main_mi - tap_mi).max(0.0))
}

/// `I(X; X + N mod m)` for independent `X ~ px`, `N ~ noise` over an m-ary
/// output alphabet.
fn additive_channel_mi(px: &Pmf, noise: &Pmf) -> f64 {
    let m = noise.alphabet_size();
    let mut p_out = vec![0.0; m];
    let mut h_joint = 0.0;
    for x in 0..px.alphabet_size() {
        let pxv = px.get(x);
        if pxv == 0.0 {
            continue;
        }
        for n in 0..m {
            let p = pxv * noise.get(n);
            p_out[(x + n) % m] += p;
            if p > 0.0 {
                h_joint -= p * p.log2();
            }
        }
    }
    (px.entropy() + entropy_of(&p_out) - h_joint).max(0.0)
}

/// Full rate summary for one channel: secrecy capacity (binary only),
/// public-discussion bounds, full-duplex capacity, and the optimized
/// half-duplex solution (binary only).
pub fn rate_report(ch: &WiretapChannel) -> Result<RateReport, RateError> {
    let pd_bounds = public_discussion_bounds(ch)?;
    let c_s_f = full_duplex_secrecy_capacity(ch);
    let binary = ch.x_size() == 2 && ch.y_size() == 2 && ch.z_size() == 2;
    let (c_s, half_duplex) = if binary {
        // A binary modulo-additive channel with crossover above 1/2 is the
        // same channel with relabeled outputs; fold into [0, 1/2].
        let fold = |p: f64| p.min(1.0 - p);
        let eps = fold(ch.main_noise().get(1));
        let delta = fold(ch.wiretap_noise().get(1));
        (
            Some(secrecy_capacity_bsc(eps, delta)?),
            Some(optimize_half_duplex(eps, delta)?),
        )
    } else {
        (None, None)
    };
    Ok(RateReport {
        c_s,
        pd_bounds,
        c_s_f,
        half_duplex,
    })
}
