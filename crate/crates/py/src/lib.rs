//! Python bindings for the modtap wiretap-channel library.
//!
//! Builds as an extension module named `modtap_py`. The smoke test under
//! `python/` shows how to load it straight from a cargo build without any
//! packaging machinery.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use modtap::{
    build_bsc_case, BscCase, DuplexMode, JointPmf, Pmf as CorePmf, SchemeConfig, TightCase,
    WiretapChannel,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Probability mass function over a finite cyclic alphabet.
#[pyclass(name = "Pmf", skip_from_py_object)]
#[derive(Clone)]
struct PyPmf {
    inner: CorePmf,
}

#[pymethods]
impl PyPmf {
    #[new]
    fn new(probs: Vec<f64>) -> PyResult<Self> {
        Ok(Self {
            inner: CorePmf::new(probs).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn uniform(m: usize) -> PyResult<Self> {
        if m == 0 {
            return Err(value_err("alphabet size must be at least 1"));
        }
        Ok(Self {
            inner: CorePmf::uniform(m),
        })
    }

    #[staticmethod]
    fn point_mass(m: usize, at: usize) -> PyResult<Self> {
        if at >= m {
            return Err(value_err(format!(
                "symbol {at} outside alphabet of size {m}"
            )));
        }
        Ok(Self {
            inner: CorePmf::point_mass(m, at),
        })
    }

    #[staticmethod]
    fn bernoulli(p: f64) -> PyResult<Self> {
        Ok(Self {
            inner: CorePmf::bernoulli(p).map_err(value_err)?,
        })
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.inner.probs().to_vec()
    }

    #[getter]
    fn alphabet_size(&self) -> usize {
        self.inner.alphabet_size()
    }

    /// Shannon entropy in bits.
    fn entropy(&self) -> f64 {
        self.inner.entropy()
    }

    /// Law of the modulo-m sum with an independent variable.
    fn convolve(&self, other: &PyPmf) -> PyResult<Self> {
        Ok(Self {
            inner: modtap::cyclic_convolve(&self.inner, &other.inner).map_err(value_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Pmf({:?})", self.inner.probs())
    }
}

#[pyclass(name = "PublicDiscussionBounds", skip_from_py_object)]
#[derive(Clone)]
struct PyBounds {
    #[pyo3(get)]
    lower: f64,
    #[pyo3(get)]
    upper: f64,
    #[pyo3(get)]
    tight: bool,
    #[pyo3(get)]
    tight_case: Option<String>,
}

#[pymethods]
impl PyBounds {
    fn __repr__(&self) -> String {
        format!(
            "PublicDiscussionBounds(lower={}, upper={}, tight={}, tight_case={:?})",
            self.lower, self.upper, self.tight, self.tight_case
        )
    }
}

fn tight_label(tc: Option<TightCase>) -> Option<String> {
    tc.map(|t| {
        match t {
            TightCase::Independent => "independent",
            TightCase::WiretapDegraded => "wiretap_degraded",
            TightCase::MainDegraded => "main_degraded",
        }
        .to_string()
    })
}

#[pyclass(name = "HalfDuplexSolution", skip_from_py_object)]
#[derive(Clone)]
struct PyHalfDuplex {
    #[pyo3(get)]
    rate: f64,
    #[pyo3(get)]
    mu_star: f64,
    #[pyo3(get)]
    t_star: f64,
    #[pyo3(get)]
    delta_hat: f64,
}

#[pymethods]
impl PyHalfDuplex {
    fn __repr__(&self) -> String {
        format!(
            "HalfDuplexSolution(rate={}, mu_star={}, t_star={}, delta_hat={})",
            self.rate, self.mu_star, self.t_star, self.delta_hat
        )
    }
}

#[pyclass(name = "RateReport", skip_from_py_object)]
#[derive(Clone)]
struct PyRateReport {
    #[pyo3(get)]
    c_s: Option<f64>,
    #[pyo3(get)]
    pd_bounds: PyBounds,
    #[pyo3(get)]
    c_s_f: f64,
    #[pyo3(get)]
    half_duplex: Option<PyHalfDuplex>,
}

#[pymethods]
impl PyRateReport {
    fn __repr__(&self) -> String {
        let c_s = self
            .c_s
            .map(|v| v.to_string())
            .unwrap_or_else(|| "None".to_string());
        format!(
            "RateReport(c_s={c_s}, c_s_f={}, pd=[{}, {}])",
            self.c_s_f, self.pd_bounds.lower, self.pd_bounds.upper
        )
    }
}

#[pyclass(name = "SimulationResult", skip_from_py_object)]
#[derive(Clone)]
struct PySimResult {
    #[pyo3(get)]
    error_rate: f64,
    #[pyo3(get)]
    erasure_fraction: f64,
    #[pyo3(get)]
    equivocation: f64,
}

#[pymethods]
impl PySimResult {
    fn __repr__(&self) -> String {
        format!(
            "SimulationResult(error_rate={}, erasure_fraction={}, equivocation={})",
            self.error_rate, self.erasure_fraction, self.equivocation
        )
    }
}

fn pair_from_rows(rows: Vec<Vec<f64>>) -> PyResult<JointPmf> {
    let dims = vec![rows.len(), rows.first().map(|r| r.len()).unwrap_or(0)];
    if rows.iter().any(|r| r.len() != dims[1]) {
        return Err(value_err("joint rows must have equal lengths"));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    JointPmf::new(dims, flat).map_err(value_err)
}

/// A modulo-additive wiretap channel with noisy feedback.
#[pyclass(name = "Channel", skip_from_py_object)]
#[derive(Clone)]
struct PyChannel {
    inner: WiretapChannel,
}

#[pymethods]
impl PyChannel {
    /// One of the five binary symmetric cases (case 5 needs `joint`, a 2x2
    /// row-major law of (N1, N2)).
    #[staticmethod]
    #[pyo3(signature = (case_id, epsilon=0.0, delta=0.0, joint=None))]
    fn bsc_case(
        case_id: u8,
        epsilon: f64,
        delta: f64,
        joint: Option<Vec<Vec<f64>>>,
    ) -> PyResult<Self> {
        let case = match case_id {
            1 => BscCase::Noiseless,
            2 => BscCase::Independent { epsilon, delta },
            3 => BscCase::MainDegraded { epsilon, delta },
            4 => BscCase::WiretapDegraded { epsilon, delta },
            5 => BscCase::Correlated {
                epsilon,
                delta,
                joint: pair_from_rows(
                    joint.ok_or_else(|| value_err("case 5 needs a joint noise law"))?,
                )?,
            },
            other => return Err(value_err(format!("unknown case id {other}"))),
        };
        Ok(Self {
            inner: build_bsc_case(&case).map_err(value_err)?,
        })
    }

    /// General channel from alphabet sizes and the row-major joint law of
    /// (N1, N2); the feedback link is noiseless.
    #[staticmethod]
    fn modulo_additive(
        x_size: usize,
        y_size: usize,
        z_size: usize,
        pair: Vec<Vec<f64>>,
    ) -> PyResult<Self> {
        let pair = pair_from_rows(pair)?;
        Ok(Self {
            inner: WiretapChannel::from_wiretap_pair(x_size, y_size, z_size, pair)
                .map_err(value_err)?,
        })
    }

    #[getter]
    fn x_size(&self) -> usize {
        self.inner.x_size()
    }

    #[getter]
    fn y_size(&self) -> usize {
        self.inner.y_size()
    }

    #[getter]
    fn z_size(&self) -> usize {
        self.inner.z_size()
    }

    fn main_noise(&self) -> Vec<f64> {
        self.inner.main_noise().probs().to_vec()
    }

    fn wiretap_noise(&self) -> Vec<f64> {
        self.inner.wiretap_noise().probs().to_vec()
    }

    /// Secrecy capacity with full-duplex noisy feedback (= main-channel
    /// capacity).
    fn full_duplex_secrecy_capacity(&self) -> f64 {
        modtap::full_duplex_secrecy_capacity(&self.inner)
    }

    fn public_discussion_bounds(&self) -> PyResult<PyBounds> {
        let b = modtap::public_discussion_bounds(&self.inner).map_err(value_err)?;
        Ok(PyBounds {
            lower: b.lower,
            upper: b.upper,
            tight: b.tight,
            tight_case: tight_label(b.tight_case),
        })
    }

    /// Full rate summary (secrecy capacity and half-duplex solution are
    /// binary-only).
    fn rates(&self) -> PyResult<PyRateReport> {
        let r = modtap::rate_report(&self.inner).map_err(value_err)?;
        Ok(PyRateReport {
            c_s: r.c_s,
            pd_bounds: PyBounds {
                lower: r.pd_bounds.lower,
                upper: r.pd_bounds.upper,
                tight: r.pd_bounds.tight,
                tight_case: tight_label(r.pd_bounds.tight_case),
            },
            c_s_f: r.c_s_f,
            half_duplex: r.half_duplex.map(|s| PyHalfDuplex {
                rate: s.rate,
                mu_star: s.mu_star,
                t_star: s.t_star,
                delta_hat: s.delta_hat,
            }),
        })
    }

    /// Achievable half-duplex rate for explicit input and feedback laws
    /// (`p_x1[0]` is the listen probability).
    fn general_half_duplex_rate(&self, p_x: &PyPmf, p_x1: &PyPmf) -> PyResult<f64> {
        modtap::general_half_duplex_rate(&self.inner, &p_x.inner, &p_x1.inner).map_err(value_err)
    }

    /// Exact `I(W; Z^n)` of the feedback scheme by full enumeration.
    #[pyo3(signature = (n, messages, mode="full", t=0.5, key_law=None, codebook_seed=0))]
    fn exact_wiretap_mi(
        &self,
        n: usize,
        messages: usize,
        mode: &str,
        t: f64,
        key_law: Option<&PyPmf>,
        codebook_seed: u64,
    ) -> PyResult<f64> {
        let mut cfg = scheme_config(mode, n, messages, t)?;
        cfg.codebook_seed = codebook_seed;
        cfg.key_law = key_law.map(|k| k.inner.clone());
        modtap::exact_wiretap_mi(&self.inner, &cfg).map_err(value_err)
    }

    /// Run the scheme over seeded trials; returns aggregate statistics.
    #[pyo3(signature = (n, messages, mode="full", t=0.5, trials=1000, seed=0))]
    fn simulate(
        &self,
        n: usize,
        messages: usize,
        mode: &str,
        t: f64,
        trials: usize,
        seed: u64,
    ) -> PyResult<PySimResult> {
        let mut cfg = scheme_config(mode, n, messages, t)?;
        cfg.codebook_seed = seed;
        cfg.noise_seed = seed.wrapping_add(1);
        cfg.key_seed = seed.wrapping_add(2);
        let outcome = match cfg.mode {
            DuplexMode::FullDuplex => modtap::run_full_duplex(&self.inner, &cfg, trials),
            DuplexMode::HalfDuplex => modtap::run_half_duplex(&self.inner, &cfg, trials),
        }
        .map_err(value_err)?;
        let equivocation =
            modtap::plug_in_equivocation(&outcome.transcripts, &cfg).map_err(value_err)?;
        Ok(PySimResult {
            error_rate: outcome.error_rate,
            erasure_fraction: outcome.erasure_fraction,
            equivocation,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Channel(x={}, y={}, z={}, case={:?})",
            self.inner.x_size(),
            self.inner.y_size(),
            self.inner.z_size(),
            self.inner.bsc_case().map(|c| c.case_id())
        )
    }
}

fn scheme_config(mode: &str, n: usize, messages: usize, t: f64) -> PyResult<SchemeConfig> {
    match mode {
        "full" | "full_duplex" => Ok(SchemeConfig::full_duplex(n, messages)),
        "half" | "half_duplex" => Ok(SchemeConfig::half_duplex(n, messages, t)),
        other => Err(value_err(format!(
            "mode '{other}' must be 'full' or 'half'"
        ))),
    }
}

/// Binary entropy `H(x)` in bits.
#[pyfunction]
fn binary_entropy(x: f64) -> PyResult<f64> {
    modtap::binary_entropy(x).map_err(value_err)
}

/// Mutual information in bits of a two-axis joint law given as row-major
/// nested lists.
#[pyfunction]
fn mutual_information(joint: Vec<Vec<f64>>) -> PyResult<f64> {
    modtap::mutual_information(&pair_from_rows(joint)?).map_err(value_err)
}

/// No-feedback secrecy capacity of the binary symmetric wiretap channel.
#[pyfunction]
fn secrecy_capacity_bsc(epsilon: f64, delta: f64) -> PyResult<f64> {
    modtap::secrecy_capacity_bsc(epsilon, delta).map_err(value_err)
}

/// Half-duplex achievable-rate objective at fixed `(mu, t)` (unclamped).
#[pyfunction]
fn half_duplex_bsc_rate(epsilon: f64, delta: f64, mu: f64, t: f64) -> PyResult<f64> {
    modtap::half_duplex_bsc_rate(epsilon, delta, mu, t).map_err(value_err)
}

/// Maximize the half-duplex rate over `(mu, t)`.
#[pyfunction]
fn optimize_half_duplex(epsilon: f64, delta: f64) -> PyResult<PyHalfDuplex> {
    let s = modtap::optimize_half_duplex(epsilon, delta).map_err(value_err)?;
    Ok(PyHalfDuplex {
        rate: s.rate,
        mu_star: s.mu_star,
        t_star: s.t_star,
        delta_hat: s.delta_hat,
    })
}

#[pymodule]
fn modtap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyPmf>()?;
    m.add_class::<PyChannel>()?;
    m.add_class::<PyBounds>()?;
    m.add_class::<PyHalfDuplex>()?;
    m.add_class::<PyRateReport>()?;
    m.add_class::<PySimResult>()?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(secrecy_capacity_bsc, m)?)?;
    m.add_function(wrap_pyfunction!(half_duplex_bsc_rate, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_half_duplex, m)?)?;
    Ok(())
}
