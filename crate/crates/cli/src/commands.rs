use ecs_epp::entanglement::{ecs_negativity_closed, ecs_negativity_numeric, epp_negativity_closed};
use ecs_epp::quadrature::QuadratureSpec;
use ecs_epp::teleport::analytic::{ecs_averages, epp_metrics, EcsAverages};
use ecs_epp::teleport::threshold::{threshold_r, ThresholdKind};
use ecs_epp::teleport::CLASSICAL_LIMIT;
use rayon::prelude::*;

use crate::error::CliResult;
use crate::grid::{Axis, SweepGrid};
use crate::table::{Cell, Table};

/// Large-amplitude value the ECS classical threshold approaches.
pub const LARGE_ALPHA_THRESHOLD: f64 = 0.7;
pub const LARGE_ALPHA_WINDOW: f64 = 0.02;

fn or_nan(v: ecs_epp::Result<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// Columns `alpha, r, E_ecs_closed, E_ecs_numeric, E_epp`; η is ignored.
pub fn entanglement(grid: &SweepGrid) -> Table {
    let mut table = Table::new(
        "entanglement",
        &grid.describe(),
        vec!["alpha", "r", "E_ecs_closed", "E_ecs_numeric", "E_epp"],
    );
    table.rows = grid
        .plane()
        .into_par_iter()
        .map(|(a, r)| {
            vec![
                a.into(),
                r.into(),
                or_nan(ecs_negativity_closed(a, r)).into(),
                or_nan(ecs_negativity_numeric(a, r)).into(),
                epp_negativity_closed(r).into(),
            ]
        })
        .collect();
    table
}

/// ECS averages and photon-pair metrics at every grid point, in grid order. Entries are
/// `NaN` where a quantity is undefined (`r = 1` for ECS; zero success for EPP fidelity).
pub fn teleport_rows(grid: &SweepGrid) -> Vec<(f64, f64, f64, EcsAverages<f64>, f64, f64)> {
    let quad = grid.quad;
    grid.points()
        .into_par_iter()
        .map(|(a, r, eta)| {
            let ecs = ecs_averages(a, r, eta, quad).unwrap_or(EcsAverages {
                fidelity: f64::NAN,
                success: f64::NAN,
            });
            let (f_epp, p_epp) = match epp_metrics(r, eta) {
                Ok(m) if m.success > 0.0 => (m.fidelity, m.success),
                Ok(m) => (f64::NAN, m.success),
                Err(_) => (f64::NAN, f64::NAN),
            };
            (a, r, eta, ecs, f_epp, p_epp)
        })
        .collect()
}

/// Columns `alpha, r, eta, F_ecs, F_epp, classical_limit`.
pub fn fidelity(grid: &SweepGrid) -> Table {
    let mut table = Table::new(
        "fidelity",
        &grid.describe(),
        vec!["alpha", "r", "eta", "F_ecs", "F_epp", "classical_limit"],
    );
    table.rows = teleport_rows(grid)
        .into_iter()
        .map(|(a, r, eta, ecs, f_epp, _)| {
            vec![
                a.into(),
                r.into(),
                eta.into(),
                ecs.fidelity.into(),
                f_epp.into(),
                CLASSICAL_LIMIT.into(),
            ]
        })
        .collect();
    table
}

/// Columns `alpha, r, eta, P_ecs, P_epp`.
pub fn success(grid: &SweepGrid) -> Table {
    let mut table = Table::new(
        "success",
        &grid.describe(),
        vec!["alpha", "r", "eta", "P_ecs", "P_epp"],
    );
    table.rows = teleport_rows(grid)
        .into_iter()
        .map(|(a, r, eta, ecs, _, p_epp)| {
            vec![
                a.into(),
                r.into(),
                eta.into(),
                ecs.success.into(),
                p_epp.into(),
            ]
        })
        .collect();
    table
}

/// Threshold table plus one message per amplitude whose root search failed.
pub struct ThresholdReport {
    pub table: Table,
    pub failures: Vec<String>,
}

fn root_cell(found: &ecs_epp::Result<Option<f64>>) -> (Cell, &'static str) {
    match found {
        Ok(Some(r)) => ((*r).into(), "found"),
        Ok(None) => (f64::NAN.into(), "none"),
        Err(_) => (f64::NAN.into(), "error"),
    }
}

/// Columns `alpha, eta, r_epp, r_ecs, r_ecs_status, r_c, r_c_status, large_alpha_limit`.
///
/// `r_c_status = none` means the ECS fidelity stays at or above the photon-pair fidelity
/// over the whole scan (crossover at `r ≈ 0`). `large_alpha_limit` marks rows whose
/// `r_ecs` lies within 0.02 of 0.7.
pub fn thresholds(alphas: &Axis, eta: f64, quad: QuadratureSpec) -> CliResult<ThresholdReport> {
    let r_epp = threshold_r(ThresholdKind::EppClassical, eta, quad)?.unwrap_or(f64::NAN);
    let mut table = Table::new(
        "thresholds",
        &format!(
            "alpha={} eta={eta} quad={},{}",
            alphas.source,
            quad.n_polar(),
            quad.n_azimuth()
        ),
        vec![
            "alpha",
            "eta",
            "r_epp",
            "r_ecs",
            "r_ecs_status",
            "r_c",
            "r_c_status",
            "large_alpha_limit",
        ],
    );
    let found: Vec<_> = alphas
        .values
        .par_iter()
        .map(|&alpha| {
            (
                alpha,
                threshold_r(ThresholdKind::EcsClassical { alpha }, eta, quad),
                threshold_r(ThresholdKind::Crossover { alpha }, eta, quad),
            )
        })
        .collect();
    let mut failures = Vec::new();
    for (alpha, ecs, cross) in found {
        for (what, res) in [("r_ecs", &ecs), ("r_c", &cross)] {
            if let Err(e) = res {
                failures.push(format!("alpha={alpha}: {what}: {e}"));
            }
        }
        let (ecs_cell, ecs_status) = root_cell(&ecs);
        let (cross_cell, cross_status) = root_cell(&cross);
        let near =
            matches!(ecs, Ok(Some(r)) if (r - LARGE_ALPHA_THRESHOLD).abs() <= LARGE_ALPHA_WINDOW);
        table.rows.push(vec![
            alpha.into(),
            eta.into(),
            r_epp.into(),
            ecs_cell,
            ecs_status.into(),
            cross_cell,
            cross_status.into(),
            (if near { "yes" } else { "no" }).into(),
        ]);
    }
    Ok(ThresholdReport { table, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(alphas: &str, rs: &str, etas: &str) -> SweepGrid {
        SweepGrid {
            alphas: Axis::alphas(alphas).unwrap(),
            rs: Axis::rs(rs).unwrap(),
            etas: Axis::etas(etas).unwrap(),
            quad: QuadratureSpec::default(),
        }
    }

    fn num(c: &Cell) -> f64 {
        match c {
            Cell::Num(x) => *x,
            Cell::Text(_) => panic!("text cell"),
        }
    }

    #[test]
    fn entanglement_rows() {
        let t = entanglement(&grid("0.001,1", "0,0.5,1", "1"));
        assert_eq!(t.rows.len(), 6);
        assert!((num(&t.rows[0][2]) - 1.0).abs() < 1e-10);
        assert!((num(&t.rows[0][4]) - 1.0).abs() < 1e-15);
        assert!((num(&t.rows[1][2]) - (-0.25 + 0.625f64.sqrt())).abs() < 1e-4);
        for cell in &t.rows[5][2..] {
            assert!(num(cell).abs() < 1e-10);
        }
    }

    #[test]
    fn teleport_rows_match_known_values() {
        let rows = fidelity(&grid("1", "0,0.5773502691896258,1", "0.8,1")).rows;
        assert!((num(&rows[1][3]) - 1.0).abs() < 1e-9);
        assert_eq!(num(&rows[1][4]), 1.0);
        assert!(num(&rows[0][3]) < 1.0);
        assert_eq!(num(&rows[0][4]), 1.0);
        assert!((num(&rows[3][4]) - 2.0 / 3.0).abs() < 1e-15);
        assert!(num(&rows[5][3]).is_nan() && num(&rows[5][4]).is_nan());
        let rows = success(&grid("1", "0", "0.8,1")).rows;
        assert!((num(&rows[1][3]) - 0.5).abs() < 1e-9);
        assert_eq!(num(&rows[1][4]), 0.5);
        assert!((num(&rows[0][4]) - 0.32).abs() < 1e-15);
    }

    #[test]
    fn threshold_rows() {
        let report = thresholds(
            &Axis::alphas("0.5,1").unwrap(),
            1.0,
            QuadratureSpec::default(),
        )
        .unwrap();
        assert!(report.failures.is_empty());
        let rows = &report.table.rows;
        assert!((num(&rows[0][2]) - 1.0 / 3f64.sqrt()).abs() < 1e-9);
        assert_eq!(rows[0][6], Cell::from("none"));
        let r = num(&rows[1][3]);
        assert!(r > 0.7 && r < 0.8);
    }
}
