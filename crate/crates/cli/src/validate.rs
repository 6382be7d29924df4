//! The acceptance checks, each reported once with its largest deviation.

use std::f64::consts::PI;
use std::fmt::Write as _;

use ecs_epp::entanglement::{
    ecs_negativity_closed, ecs_negativity_small_alpha, epp_negativity_closed,
    epp_negativity_numeric,
};
use ecs_epp::fock::{FockOperator, ModeSpec, DEFAULT_TAIL_TOLERANCE};
use ecs_epp::loss::{
    apply_damping, ecs_decohered, ecs_ket, epp_decohered, epp_dual_rail_ket, fold_dual_rail,
    project_dynamic_basis, EcsParity, LossParams,
};
use ecs_epp::quadrature::QuadratureSpec;
use ecs_epp::teleport::analytic::{
    closed_form_f_ecs, closed_form_p_ecs, ecs_averages, ecs_averages_checked, ecs_outcome,
    epp_metrics,
};
use ecs_epp::teleport::oracle::{
    resolve_correction_wiring, simulate, simulate_ecs_end_to_end, ChannelKind, CorrectionWiring,
    ProtocolConfig,
};
use ecs_epp::teleport::threshold::{threshold_r, ThresholdKind};
use ecs_epp::teleport::InputQubit;
use ecs_epp::Result;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub level: Level,
    pub wiring: CorrectionWiring,
    pub quad: QuadratureSpec,
}

impl ValidationOptions {
    pub fn new(level: Level) -> Self {
        Self {
            level,
            wiring: ecs_epp::teleport::oracle::CORRECTION_WIRING,
            quad: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: usize,
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub level: Level,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# ecs-epp {} validate level={}",
            env!("CARGO_PKG_VERSION"),
            match self.level {
                Level::Fast => "fast",
                Level::Full => "full",
            }
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} [{:>2}] {:<32} max_dev={:.3e} tol={:.1e}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.id,
                c.name,
                c.max_deviation,
                c.tolerance,
                c.detail
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.checks.len() - self.failures(),
            self.checks.len()
        );
        out
    }
}

/// Outcome of one check body: largest toleranced deviation, whether the untoleranced
/// conditions hold, and a summary.
struct Outcome {
    dev: f64,
    ok: bool,
    detail: String,
}

fn check(
    id: usize,
    name: &'static str,
    tolerance: f64,
    body: impl FnOnce() -> Result<Outcome>,
) -> Check {
    match body() {
        Ok(o) => Check {
            id,
            name,
            max_deviation: o.dev,
            tolerance,
            passed: o.ok && o.dev <= tolerance,
            detail: o.detail,
        },
        Err(e) => Check {
            id,
            name,
            max_deviation: f64::NAN,
            tolerance,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |m, v| if v.is_nan() || v > m { v } else { m })
}

fn steps(from: usize, to: usize, scale: f64) -> Vec<f64> {
    (from..=to).map(|i| i as f64 / scale).collect()
}

/// Bloch points `(u, v)` shared by the oracle checks.
pub const BLOCH_POINTS: [(f64, f64); 5] = [
    (0.0, 0.0),
    (PI, 0.0),
    (PI / 2.0, 0.0),
    (PI / 2.0, PI / 2.0),
    (PI / 3.0, PI / 5.0),
];
pub const ORACLE_ALPHAS: [f64; 3] = [0.5, 1.0, 1.5];
pub const ORACLE_RS: [f64; 3] = [0.0, 0.3, 0.6];
pub const ORACLE_ETAS: [f64; 2] = [0.6, 1.0];

fn oracle_grid() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for &a in &ORACLE_ALPHAS {
        for &r in &ORACLE_RS {
            for &e in &ORACLE_ETAS {
                out.push((a, r, e));
            }
        }
    }
    out
}

pub fn run(opts: &ValidationOptions) -> ValidationReport {
    let mut notes = Vec::new();
    let checks = vec![
        epp_threshold(opts),
        perfect_detection_success(opts, &mut notes),
        ecs_thresholds(opts),
        crossover(opts),
        oracle_equivalence(opts),
        channel_closed_forms(opts),
        entanglement_ordering(),
        detector_dichotomy(opts),
        even_odd(opts),
        closed_form_resolution(opts, &mut notes),
    ];
    match resolve_correction_wiring(ChannelKind::EcsOdd, 1.0) {
        Ok(w) => notes.push(format!(
            "corrections: {w:?} wiring (Φ-type outcome → π phase on the receiver mode, Ψ-type → identity; \
             photon pair: Ψ⁻ → Z, Ψ⁺ → identity) gives fidelity 1 on the ideal channel"
        )),
        Err(e) => notes.push(format!("corrections: unresolved ({e})")),
    }
    if opts.wiring != ecs_epp::teleport::oracle::CORRECTION_WIRING {
        notes.push(format!(
            "oracle checks ran with {:?} correction wiring",
            opts.wiring
        ));
    }
    ValidationReport {
        level: opts.level,
        checks,
        notes,
    }
}

fn epp_threshold(opts: &ValidationOptions) -> Check {
    check(1, "epp-classical-threshold", 1e-9, || {
        let r = threshold_r(ThresholdKind::EppClassical, 1.0, opts.quad)?.unwrap_or(f64::NAN);
        Ok(Outcome {
            dev: (r - 1.0 / 3f64.sqrt()).abs(),
            ok: true,
            detail: format!("r_epp = {r:.12}"),
        })
    })
}

fn perfect_detection_success(opts: &ValidationOptions, notes: &mut Vec<String>) -> Check {
    let c = check(2, "ecs-success-perfect-detection", 1e-9, || {
        let mut points = Vec::new();
        for a in [0.3f64, 0.8, 1.5, 2.0] {
            for r in [0.0, 0.3, 0.6] {
                points.push((a, r));
            }
        }
        let devs = points
            .par_iter()
            .map(|&(a, r)| Ok((ecs_averages(a, r, 1.0, opts.quad)?.success - 0.5).abs()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Outcome {
            dev: max_of(devs),
            ok: true,
            detail: "α ∈ {0.3, 0.8, 1.5, 2}, r ∈ {0, 0.3, 0.6}".into(),
        })
    });
    if c.passed {
        notes.push(format!(
            "success at η = 1: P_ecs = 1/2 independent of r as well as α (max |P − 1/2| = {:.1e})",
            c.max_deviation
        ));
    }
    c
}

fn ecs_thresholds(opts: &ValidationOptions) -> Check {
    check(3, "ecs-classical-thresholds", 0.02, || {
        let alphas = [0.5, 1.0, 1.5, 2.0, 4.0];
        let roots = alphas
            .par_iter()
            .map(|&alpha| threshold_r(ThresholdKind::EcsClassical { alpha }, 1.0, opts.quad))
            .collect::<Result<Vec<_>>>()?;
        let mut ok = true;
        let mut detail = String::new();
        for (a, r) in alphas.iter().zip(&roots) {
            let r = r.unwrap_or(f64::NAN);
            if *a < 4.0 {
                ok &= r > 0.70 && r < 0.80;
            }
            let _ = write!(detail, "r_ecs({a}) = {r:.6} ");
        }
        Ok(Outcome {
            dev: (roots[4].unwrap_or(f64::NAN) - 0.7).abs(),
            ok,
            detail: detail.trim_end().into(),
        })
    })
}

fn crossover(opts: &ValidationOptions) -> Check {
    check(4, "ecs-epp-crossover", 1e-9, || {
        let rs = steps(1, 99, 100.0);
        let mut points = Vec::new();
        for a in [0.5, 0.8] {
            for &r in &rs {
                points.push((a, r));
            }
        }
        let margins = points
            .par_iter()
            .map(|&(a, r)| {
                Ok(ecs_averages(a, r, 1.0, opts.quad)?.fidelity - epp_metrics(r, 1.0)?.fidelity)
            })
            .collect::<Result<Vec<_>>>()?;
        let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
        let r_c = threshold_r(ThresholdKind::Crossover { alpha: 1.6 }, 1.0, opts.quad)?;
        let r_epp = 1.0 / 3f64.sqrt();
        let ok = matches!(r_c, Some(r) if r > 0.0 && r < r_epp);
        Ok(Outcome {
            dev: (-worst).max(0.0),
            ok,
            detail: format!(
                "min(F_ecs − F_epp) = {worst:.3e} for α ∈ {{0.5, 0.8}}; r_c(1.6) = {}",
                r_c.map_or("none".into(), |r| format!("{r:.6}"))
            ),
        })
    })
}

fn oracle_equivalence(opts: &ValidationOptions) -> Check {
    check(5, "oracle-equivalence", 1e-7, || {
        let mut cases = Vec::new();
        for (a, r, e) in oracle_grid() {
            for &(u, v) in &BLOCH_POINTS {
                cases.push((a, r, e, u, v));
            }
        }
        let results = cases
            .par_iter()
            .map(|&(a, r, eta, u, v)| {
                let res = simulate(
                    &ProtocolConfig::new(ChannelKind::EcsOdd, a, r, eta, u, v)?
                        .with_wiring(opts.wiring),
                )?;
                let q = InputQubit::new(u, v, a, r)?;
                let mut dev = 0.0f64;
                let mut ideal = 0.0f64;
                for rec in ecs_outcome(a, r, eta, &q)? {
                    let o = res.record(rec.outcome);
                    dev = dev
                        .max((o.p - rec.p).abs())
                        .max((o.weighted_fidelity() - rec.weighted_fidelity()).abs());
                    if r == 0.0 && eta == 1.0 {
                        ideal = ideal.max((o.f.unwrap_or(f64::NAN) - 1.0).abs());
                    }
                }
                Ok((dev, ideal))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut dev = max_of(results.iter().map(|x| x.0));
        let ideal = max_of(results.iter().map(|x| x.1));
        let mut detail = format!(
            "{} configurations; ideal-channel max |f − 1| = {ideal:.1e}",
            cases.len()
        );
        if opts.level == Level::Full {
            let cfg = ProtocolConfig::new(ChannelKind::EcsOdd, 1.0f64, 0.5, 0.8, 1.3, 3.9)?
                .with_wiring(opts.wiring);
            let closed = simulate(&cfg)?;
            let full = simulate_ecs_end_to_end(&cfg)?;
            let smoke = max_of(
                closed
                    .outcomes
                    .iter()
                    .zip(&full.outcomes)
                    .flat_map(|(a, b)| {
                        [
                            (a.p - b.p).abs(),
                            (a.weighted_fidelity() - b.weighted_fidelity()).abs(),
                        ]
                    }),
            );
            dev = dev.max(smoke);
            let _ = write!(detail, "; end-to-end channel at α = 1: {smoke:.1e}");
        }
        Ok(Outcome {
            dev,
            ok: ideal <= 1e-10,
            detail,
        })
    })
}

fn channel_closed_forms(opts: &ValidationOptions) -> Check {
    check(6, "channel-closed-forms", 1e-8, || {
        let mut points = Vec::new();
        for a in [0.5, 1.0, 1.5, 2.0] {
            for r in [0.0, 0.25, 0.5, 0.75] {
                points.push((a, r));
            }
        }
        let devs = points
            .par_iter()
            .map(|&(a, r)| {
                let loss = LossParams::new(r)?;
                let spec = ModeSpec::for_amplitude(2, a, DEFAULT_TAIL_TOLERANCE)?;
                let mut rho = FockOperator::projector(&ecs_ket(a, EcsParity::Odd, spec)?);
                for mode in 0..2 {
                    rho = apply_damping(&rho, mode, loss)?;
                }
                let ch = ecs_decohered(a, EcsParity::Odd, loss)?;
                Ok(project_dynamic_basis(&rho, ch.damped_amplitude())?.max_abs_diff(ch.matrix4()))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut dev = max_of(devs);
        let mut ok = true;
        for i in 0..=20 {
            let r = i as f64 / 20.0;
            let w = epp_decohered(LossParams::new(r)?).sector_weights();
            let r2 = r * r;
            let t2 = 1.0 - r2;
            ok &= w.two_photon == t2 * t2 && w.one_photon == 2.0 * r2 * t2 && w.vacuum == r2 * r2;
        }
        let mut detail =
            "ECS on α ∈ {0.5, 1, 1.5, 2} × r ∈ {0, 0.25, 0.5, 0.75}; EPP sector weights"
                .to_string();
        if opts.level == Level::Full {
            let pure = FockOperator::projector(&epp_dual_rail_ket::<f64>()?);
            for r in [0.25, 0.5, 0.75] {
                let loss = LossParams::new(r)?;
                let mut rho = pure.clone();
                for mode in 0..4 {
                    rho = apply_damping(&rho, mode, loss)?;
                }
                dev = dev
                    .max(fold_dual_rail(&rho, 1e-12)?.max_abs_diff(epp_decohered(loss).matrix9()));
            }
            detail.push_str("; dual-rail EPP Kraus oracle");
        }
        Ok(Outcome { dev, ok, detail })
    })
}

fn entanglement_ordering() -> Check {
    check(7, "entanglement-ordering", 1e-4, || {
        let mut ok = true;
        let mut worst_gap = f64::INFINITY;
        for i in 1..=20 {
            let a = i as f64 / 10.0;
            for j in 0..=100 {
                let r = j as f64 / 100.0;
                let gap = epp_negativity_closed(r) - ecs_negativity_closed(a, r)?;
                worst_gap = worst_gap.min(gap);
            }
        }
        ok &= worst_gap >= 0.0;
        let mut small = 0.0f64;
        for r in [0.2f64, 0.5, 0.8] {
            small =
                small.max((ecs_negativity_closed(1e-3, r)? - ecs_negativity_small_alpha(r)).abs());
        }
        let mut epp_dev = 0.0f64;
        for j in 0..=20 {
            let r = j as f64 / 20.0;
            let t2 = 1.0 - r * r;
            ok &= epp_negativity_closed(r) == t2 * t2;
            epp_dev = epp_dev.max((epp_negativity_numeric(r)? - t2 * t2).abs());
        }
        ok &= epp_dev <= 1e-10;
        Ok(Outcome {
            dev: small,
            ok,
            detail: format!("min(E_epp − E_ecs) = {worst_gap:.3e}; EPP partial-transpose vs (1 − r²)²: {epp_dev:.1e}"),
        })
    })
}

fn detector_dichotomy(opts: &ValidationOptions) -> Check {
    check(8, "detector-inefficiency-dichotomy", 1e-9, || {
        let mut cases = Vec::new();
        for r in [0.0, 0.3, 0.6] {
            for &(u, v) in &BLOCH_POINTS {
                cases.push((r, u, v));
            }
        }
        let devs = cases
            .par_iter()
            .map(|&(r, u, v)| {
                let f = |eta: f64| -> Result<f64> {
                    let cfg = ProtocolConfig::new(ChannelKind::Epp, 0.0, r, eta, u, v)?
                        .with_wiring(opts.wiring);
                    Ok(simulate(&cfg)?.fidelity().unwrap_or(f64::NAN))
                };
                let base = f(1.0)?;
                Ok(max_of([(f(0.2)? - base).abs(), (f(0.6)? - base).abs()]))
            })
            .collect::<Result<Vec<_>>>()?;
        let dev = max_of(devs);

        let etas = steps(1, 10, 10.0);
        let f_ecs = etas
            .par_iter()
            .map(|&eta| Ok(ecs_averages(1.0, 0.0, eta, opts.quad)?.fidelity))
            .collect::<Result<Vec<_>>>()?;
        let decreasing = f_ecs.windows(2).all(|w| w[0] < w[1]);

        let mut exact = true;
        for i in 1..=20 {
            let eta = i as f64 / 20.0;
            for j in 0..=20 {
                let r = j as f64 / 20.0;
                exact &= epp_metrics(r, eta)?.success == eta * eta * (1.0 - r * r) / 2.0;
            }
        }

        let n = if opts.level == Level::Full { 50 } else { 20 };
        let mut points = Vec::new();
        for a in [0.5, 0.8, 1.0, 1.6, 2.0] {
            for j in 0..n {
                for i in 1..=n {
                    points.push((a, j as f64 / n as f64, i as f64 / n as f64));
                }
            }
        }
        let worst = points
            .par_iter()
            .map(|&(a, r, eta)| {
                Ok(ecs_averages(a, r, eta, opts.quad)?.success - epp_metrics(r, eta)?.success)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        Ok(Outcome {
            dev,
            ok: decreasing && exact && worst >= 0.0,
            detail: format!(
                "F_ecs(α=1, r=0) decreasing in 1 − η: {decreasing}; P_epp exact: {exact}; \
                 min(P_ecs − P_epp) = {worst:.3e} over {} points",
                points.len()
            ),
        })
    })
}

/// Oracle-averaged `(F, P)` on a coarse Bloch grid.
fn oracle_average(kind: ChannelKind, alpha: f64, wiring: CorrectionWiring) -> Result<(f64, f64)> {
    let quad = QuadratureSpec::new(8, 8)?;
    let points: Vec<(f64, f64, f64)> = quad.points();
    let values = points
        .par_iter()
        .map(|&(u, v, w)| {
            let res =
                simulate(&ProtocolConfig::new(kind, alpha, 0.0, 1.0, u, v)?.with_wiring(wiring))?;
            Ok((
                w * res.fidelity().unwrap_or(f64::NAN),
                w * res.success_probability(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(values
        .iter()
        .fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1)))
}

fn even_odd(opts: &ValidationOptions) -> Check {
    check(9, "even-odd-ecs", 1e-6, || {
        let mut dev = 0.0f64;
        let mut ok = true;
        let mut detail = String::new();
        for alpha in [0.5, 1.0] {
            let (f_odd, p_odd) = oracle_average(ChannelKind::EcsOdd, alpha, opts.wiring)?;
            let (f_even, p_even) = oracle_average(ChannelKind::EcsEven, alpha, opts.wiring)?;
            dev = dev.max((f_odd - f_even).abs());
            ok &= p_even < p_odd;
            let _ = write!(detail, "α={alpha}: P_odd={p_odd:.6} P_even={p_even:.6} ");
        }
        Ok(Outcome {
            dev,
            ok,
            detail: detail.trim_end().into(),
        })
    })
}

fn closed_form_resolution(opts: &ValidationOptions, notes: &mut Vec<String>) -> Check {
    let mut f_dev = f64::NAN;
    let mut p_dev = f64::NAN;
    let c = check(10, "closed-form-resolution", 1e-8, || {
        let grid = oracle_grid();
        let full = opts.level == Level::Full;
        let devs = grid
            .par_iter()
            .map(|&(a, r, eta)| {
                let avg = if full {
                    ecs_averages_checked(a, r, eta, opts.quad, 1e-8)?
                } else {
                    ecs_averages(a, r, eta, opts.quad)?
                };
                Ok((
                    (closed_form_f_ecs(a, r, eta)? - avg.fidelity).abs(),
                    (closed_form_p_ecs(a, r, eta)? - avg.success).abs(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        f_dev = max_of(devs.iter().map(|d| d.0));
        p_dev = max_of(devs.iter().map(|d| d.1));
        let mut detail = format!(
            "fidelity {f_dev:.1e}, success {p_dev:.1e} on {} points",
            grid.len()
        );
        if full {
            detail.push_str("; quadrature doubling within 1e-8");
        }
        Ok(Outcome {
            dev: f_dev.max(p_dev),
            ok: true,
            detail,
        })
    });
    notes.push(format!(
        "fidelity closed form: F = 2n(l − m)/c · atanh(x)/x + 4nm/c · (atanh(x) − x)/x³ with x = d/c, \
         i.e. the bracket d²(l − m) + 2c²m multiplies (atanh(x) − x)/(c³x³) and the leading 2n(l − m)/c \
         stands alone; finite as d → 0; max |closed − quadrature| = {f_dev:.1e}"
    ));
    notes.push(format!(
        "success closed form: the printed expression is the probability of one retained outcome; \
         P_ecs is twice it (two retained outcomes), giving 1/2 at η = 1; max |closed − quadrature| = {p_dev:.1e}"
    ));
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_criterion_once() {
        let report = run(&ValidationOptions::new(Level::Fast));
        let ids: Vec<usize> = report.checks.iter().map(|c| c.id).collect();
        assert_eq!(ids, (1..=10).collect::<Vec<_>>());
        assert!(report.passed(), "{}", report.render());
        assert!(report
            .notes
            .iter()
            .any(|n| n.starts_with("fidelity closed form")));
        assert!(report
            .notes
            .iter()
            .any(|n| n.starts_with("success closed form")));
    }
}
