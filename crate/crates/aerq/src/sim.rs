//! Synthetic data generation with splittable per-instance streams.
//!
//! Regressors are uniform on `[-1, 1]^p`; errors come from a configurable
//! law (normal, Student t, or Pareto) and may be scaled per observation to
//! make them heteroscedastic. Instances are keyed by `(seed, stream)`, so a
//! corpus generated in parallel is identical to one generated sequentially.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Pareto, StudentT};

use crate::data::Dataset;
use crate::{Error, Result};

/// Error distribution of the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorLaw {
    Normal,
    /// Student t with the given degrees of freedom.
    StudentT(f64),
    /// Pareto with scale 1 and the given tail index.
    Pareto(f64),
}

impl ErrorLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            ErrorLaw::Normal => Ok(()),
            ErrorLaw::StudentT(df) if df > 0.0 && df.is_finite() => Ok(()),
            ErrorLaw::StudentT(df) => Err(Error::InvalidGenerator(format!(
                "student-t degrees of freedom must be positive, got {}",
                df
            ))),
            ErrorLaw::Pareto(tail) if tail > 0.0 && tail.is_finite() => Ok(()),
            ErrorLaw::Pareto(tail) => Err(Error::InvalidGenerator(format!(
                "pareto tail index must be positive, got {}",
                tail
            ))),
        }
    }
}

impl fmt::Display for ErrorLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorLaw::Normal => write!(f, "normal"),
            ErrorLaw::StudentT(df) => write!(f, "t({})", df),
            ErrorLaw::Pareto(tail) => write!(f, "pareto({})", tail),
        }
    }
}

impl FromStr for ErrorLaw {
    type Err = Error;

    /// Accepts `normal`, `t(DF)`, and `pareto(TAIL)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "normal" {
            return Ok(ErrorLaw::Normal);
        }
        let parse_arg = |inner: &str| -> Result<f64> {
            inner.parse::<f64>().map_err(|_| {
                Error::InvalidGenerator(format!("cannot parse distribution parameter '{}'", inner))
            })
        };
        if let Some(rest) = s.strip_prefix("t(").and_then(|r| r.strip_suffix(')')) {
            return Ok(ErrorLaw::StudentT(parse_arg(rest)?));
        }
        if let Some(rest) = s.strip_prefix("pareto(").and_then(|r| r.strip_suffix(')')) {
            return Ok(ErrorLaw::Pareto(parse_arg(rest)?));
        }
        Err(Error::InvalidGenerator(format!(
            "unknown distribution '{}'; expected normal, t(df), or pareto(tail)",
            s
        )))
    }
}

/// Full generator configuration for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub n: usize,
    pub p: usize,
    pub law: ErrorLaw,
    /// Heteroscedasticity strength: observation `i` gets error scale
    /// `1 + hetero · i/(n−1)`. Zero means identically distributed errors.
    pub hetero: f64,
    /// True coefficients, intercept first (`p + 1` entries).
    pub beta: Vec<f64>,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        self.law.validate()?;
        if self.beta.len() != self.p + 1 {
            return Err(Error::InvalidGenerator(format!(
                "beta has {} entries, expected p + 1 = {}",
                self.beta.len(),
                self.p + 1
            )));
        }
        if self.n < self.p + 2 {
            return Err(Error::InvalidGenerator(format!(
                "n = {} too small for p = {}",
                self.n, self.p
            )));
        }
        if !self.hetero.is_finite() || self.hetero < 0.0 {
            return Err(Error::InvalidGenerator(format!(
                "heteroscedasticity multiplier must be finite and non-negative, got {}",
                self.hetero
            )));
        }
        if self.beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidGenerator("non-finite beta".into()));
        }
        Ok(())
    }
}

/// A generated dataset together with the realized (scaled) errors and the
/// true coefficients, so tests can check bounds that involve the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedInstance {
    pub dataset: Dataset,
    /// The realized error of each observation, scaling included.
    pub errors: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Draws one instance, deterministically keyed by `(seed, stream)`.
pub fn simulate(spec: &GeneratorSpec, seed: u64, stream: u64) -> Result<SimulatedInstance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);

    let n = spec.n;
    let p = spec.p;
    let mut x_rows = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        x_rows.push(row);
    }
    let raw: Vec<f64> = match spec.law {
        ErrorLaw::Normal => {
            let d = Normal::new(0.0, 1.0).expect("unit normal");
            (0..n).map(|_| d.sample(&mut rng)).collect()
        }
        ErrorLaw::StudentT(df) => {
            let d = StudentT::new(df)
                .map_err(|e| Error::InvalidGenerator(format!("student-t: {}", e)))?;
            (0..n).map(|_| d.sample(&mut rng)).collect()
        }
        ErrorLaw::Pareto(tail) => {
            let d = Pareto::new(1.0, tail)
                .map_err(|e| Error::InvalidGenerator(format!("pareto: {}", e)))?;
            (0..n).map(|_| d.sample(&mut rng)).collect()
        }
    };
    let errors: Vec<f64> = raw
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            (1.0 + spec.hetero * t) * e
        })
        .collect();
    let y: Vec<f64> = (0..n)
        .map(|i| {
            spec.beta[0]
                + x_rows[i]
                    .iter()
                    .zip(&spec.beta[1..])
                    .map(|(x, b)| x * b)
                    .sum::<f64>()
                + errors[i]
        })
        .collect();
    let dataset = Dataset::new(y, &x_rows)?;
    Ok(SimulatedInstance {
        dataset,
        errors,
        beta: spec.beta.clone(),
    })
}

/// The mixed verification corpus: cycles sample sizes over `[8, 60]`,
/// dimensions over `1..=5`, the three error laws, and alternates
/// heteroscedastic scaling on odd indices.
pub fn corpus_spec(index: usize) -> GeneratorSpec {
    let n = 8 + (index * 7) % 53;
    let p = 1 + index % 5;
    let law = match index % 3 {
        0 => ErrorLaw::Normal,
        1 => ErrorLaw::StudentT(3.0),
        _ => ErrorLaw::Pareto(1.5),
    };
    let hetero = if index % 2 == 1 { 1.0 } else { 0.0 };
    let beta: Vec<f64> = (0..=p)
        .map(|j| ((index + 3 * j) % 7) as f64 * 0.5 - 1.5)
        .collect();
    GeneratorSpec {
        n,
        p,
        law,
        hetero,
        beta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_key() {
        let spec = corpus_spec(4);
        let a = simulate(&spec, 42, 4).unwrap();
        let b = simulate(&spec, 42, 4).unwrap();
        assert_eq!(a, b);
        let c = simulate(&spec, 42, 5).unwrap();
        assert_ne!(a.dataset.y(), c.dataset.y());
    }

    #[test]
    fn zero_beta_makes_pure_errors() {
        let spec = GeneratorSpec {
            n: 20,
            p: 2,
            law: ErrorLaw::Normal,
            hetero: 0.0,
            beta: vec![0.0, 0.0, 0.0],
        };
        let inst = simulate(&spec, 7, 0).unwrap();
        for (y, e) in inst.dataset.y().iter().zip(&inst.errors) {
            assert_eq!(y, e);
        }
    }

    #[test]
    fn pareto_is_finite_and_heavy_tailed() {
        let spec = GeneratorSpec {
            n: 50,
            p: 1,
            law: ErrorLaw::Pareto(1.5),
            hetero: 0.0,
            beta: vec![0.0, 0.0],
        };
        let inst = simulate(&spec, 11, 0).unwrap();
        assert!(inst.errors.iter().all(|e| e.is_finite()));
        // Pareto support starts at 1 and the top order statistic dwarfs it.
        assert!(inst.errors.iter().all(|&e| e >= 1.0));
        let max = inst.errors.iter().cloned().fold(f64::MIN, f64::max);
        assert!(max > 2.0);
    }

    #[test]
    fn law_parsing_round_trips() {
        for s in ["normal", "t(3)", "pareto(1.5)"] {
            let law: ErrorLaw = s.parse().unwrap();
            assert_eq!(law.to_string(), s);
        }
        assert!("cauchy".parse::<ErrorLaw>().is_err());
        assert!("t(-1)".parse::<ErrorLaw>().unwrap().validate().is_err());
        assert!("pareto(0)".parse::<ErrorLaw>().unwrap().validate().is_err());
    }

    #[test]
    fn corpus_covers_the_stated_ranges() {
        let mut laws = [false; 3];
        let mut hetero = 0;
        for i in 0..500 {
            let s = corpus_spec(i);
            assert!((8..=60).contains(&s.n));
            assert!((1..=5).contains(&s.p));
            match s.law {
                ErrorLaw::Normal => laws[0] = true,
                ErrorLaw::StudentT(_) => laws[1] = true,
                ErrorLaw::Pareto(_) => laws[2] = true,
            }
            if s.hetero > 0.0 {
                hetero += 1;
            }
        }
        assert!(laws.iter().all(|&l| l));
        assert_eq!(hetero, 250);
    }
}
