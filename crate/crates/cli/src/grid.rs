use ecs_epp::quadrature::QuadratureSpec;

use crate::error::{CliError, CliResult};

pub const DEFAULT_ALPHAS: &str = "0.5,0.8,1.0,1.6,2.0";
pub const DEFAULT_RS: &str = "0:1:101";
pub const DEFAULT_ETAS: &str = "0.01:1:100";
pub const DEFAULT_THRESHOLD_ALPHAS: &str = "0.5,0.8,1.0,1.5,1.6,2.0,4.0";

/// One sweep axis: the text it was parsed from and its sorted values.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub source: String,
    pub values: Vec<f64>,
}

impl Axis {
    /// Parses `start:stop:count` (inclusive, evenly spaced) or a comma list.
    pub fn parse(name: &str, text: &str) -> CliResult<Self> {
        let bad = |why: String| CliError::usage(format!("--{name} {text:?}: {why}"));
        let number = |s: &str| -> CliResult<f64> {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| bad(format!("{s:?} is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(format!("{s:?} is not finite")))
            }
        };
        let text = text.trim();
        let mut values = if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("range must be start:stop:count".into()));
            }
            let (start, stop) = (number(parts[0])?, number(parts[1])?);
            let count: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| bad(format!("{:?} is not a count", parts[2])))?;
            match count {
                0 => return Err(bad("count must be at least 1".into())),
                1 => vec![start],
                _ => {
                    let step = (stop - start) / (count - 1) as f64;
                    (0..count)
                        .map(|i| {
                            if i + 1 == count {
                                stop
                            } else {
                                start + step * i as f64
                            }
                        })
                        .collect()
                }
            }
        } else {
            text.split(',').map(number).collect::<CliResult<Vec<_>>>()?
        };
        if values.is_empty() {
            return Err(bad("no values".into()));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(Self {
            source: text.to_string(),
            values,
        })
    }

    fn check(&self, name: &str, ok: impl Fn(f64) -> bool, range: &str) -> CliResult<()> {
        match self.values.iter().find(|&&v| !ok(v)) {
            Some(v) => Err(CliError::usage(format!("--{name}: {v} outside {range}"))),
            None => Ok(()),
        }
    }

    pub fn alphas(text: &str) -> CliResult<Self> {
        let axis = Self::parse("alpha", text)?;
        axis.check("alpha", |v| v > 0.0, "(0, ∞)")?;
        Ok(axis)
    }

    pub fn rs(text: &str) -> CliResult<Self> {
        let axis = Self::parse("r", text)?;
        axis.check("r", |v| (0.0..=1.0).contains(&v), "[0, 1]")?;
        Ok(axis)
    }

    pub fn etas(text: &str) -> CliResult<Self> {
        let axis = Self::parse("eta", text)?;
        axis.check("eta", |v| v > 0.0 && v <= 1.0, "(0, 1]")?;
        Ok(axis)
    }
}

/// Parses `N_polar,N_azimuth`.
pub fn parse_quad(text: &str) -> CliResult<QuadratureSpec> {
    let bad = || CliError::usage(format!("--quad {text:?}: expected N_polar,N_azimuth"));
    let (a, b) = text.split_once(',').ok_or_else(bad)?;
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    QuadratureSpec::new(a, b).map_err(|e| CliError::usage(format!("--quad {text:?}: {e}")))
}

/// Cartesian sweep with rows ordered α outer, r middle, η inner.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub alphas: Axis,
    pub rs: Axis,
    pub etas: Axis,
    pub quad: QuadratureSpec,
}

impl SweepGrid {
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(
            self.alphas.values.len() * self.rs.values.len() * self.etas.values.len(),
        );
        for &a in &self.alphas.values {
            for &r in &self.rs.values {
                for &e in &self.etas.values {
                    out.push((a, r, e));
                }
            }
        }
        out
    }

    /// `(α, r)` pairs, ignoring η.
    pub fn plane(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.alphas.values.len() * self.rs.values.len());
        for &a in &self.alphas.values {
            for &r in &self.rs.values {
                out.push((a, r));
            }
        }
        out
    }

    pub fn describe(&self) -> String {
        format!(
            "alpha={} r={} eta={} quad={},{}",
            self.alphas.source,
            self.rs.source,
            self.etas.source,
            self.quad.n_polar(),
            self.quad.n_azimuth()
        )
    }
}
