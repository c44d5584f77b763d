//! Runtime invariant battery behind the `selftest` subcommand.
//!
//! Each check prints one pass/fail line through the report; the battery
//! is deterministic given the seed.

use serde::{Deserialize, Serialize};

use crate::displacement::{quadrilateral_area, temporal_displacement, Quadrilateral};
use crate::dynamics::{billiard_map, jacobi_perp_propagator, Direction, FlowPoint};
use crate::error::Result;
use crate::geometry::{tri6, Table};
use crate::orbits::{sample_trapped_points, solve_periodic_orbit};
use crate::rigidity::bowen_dimension;
use crate::symbolic::{enumerate_words, is_palindromic_periodic, Word};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: &str, measured: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.to_string(),
            pass: measured.is_finite() && measured <= tolerance,
            measured,
            tolerance,
        });
    }
}

/// Run the battery on a table (the closed-form checks assume tri6 and
/// are skipped elsewhere).
pub fn run(table: &Table, samples: usize, seed: u64) -> Result<SelftestReport> {
    let mut report = SelftestReport::default();
    let is_tri6 = {
        let reference = tri6();
        table.len() == 3
            && (0..3).all(|i| {
                (table.curve(i).perimeter() - reference.curve(i).perimeter()).abs() < 1e-12
            })
    };

    // symplecticity, twist sign, generating relations, involution
    let points = sample_trapped_points(table, samples, 6, seed)?;
    let mut det_dev = 0.0f64;
    let mut twist_entry_sign_flips = 0.0f64;
    let mut gen_res = 0.0f64;
    let mut invol_dev = 0.0f64;
    let mut liou = 0.0f64;
    for p in points.iter() {
        let step = billiard_map(table, &p.point, Direction::Forward)?;
        det_dev = det_dev.max((step.differential.det() - 1.0).abs());
        if step.differential.b <= 0.0 {
            twist_entry_sign_flips += 1.0;
        }
        let (r1, r2) = crate::dynamics::check_generating_relations(table, &p.point)?;
        gen_res = gen_res.max(r1.max(r2));
        let back = billiard_map(table, &step.image, Direction::Backward)?;
        invol_dev = invol_dev
            .max((back.image.s - p.point.s).abs())
            .max((back.image.r - p.point.r).abs());
    }
    for p in points.iter().take(samples / 10 + 1) {
        liou = liou.max(crate::dynamics::liouville_defect(table, &p.point)?);
    }
    report.push("map determinant is 1", det_dev, 1e-9);
    report.push("twist entry keeps one sign", twist_entry_sign_flips, 0.0);
    report.push("generating relations", gen_res, 1e-7);
    report.push("backward map inverts forward", invol_dev, 1e-9);
    report.push("liouville exactness defect", liou, 1e-5);

    if is_tri6 {
        let o12 = solve_periodic_orbit(table, &Word::parse("12")?)?;
        report.push("2-orbit length is 8", (o12.length - 8.0).abs(), 1e-10);
        let o123 = solve_periodic_orbit(table, &Word::parse("123")?)?;
        report.push(
            "3-orbit length is 18 - 3 sqrt(3)",
            (o123.length - (18.0 - 3.0 * 3.0f64.sqrt())).abs(),
            1e-9,
        );
        let expect = (5.0 + 2.0 * 6.0f64.sqrt()).ln();
        report.push(
            "2-orbit lyapunov exponent",
            (o12.lyapunov_exponent()? - expect).abs(),
            1e-9,
        );
    }

    // palindromic centers have perpendicular bounces
    let mut palindromic_r = 0.0f64;
    for len in 2..=7usize {
        for w in enumerate_words(table.len(), len, true, true) {
            let orbit = match solve_periodic_orbit(table, &w) {
                Ok(o) => o,
                Err(_) => continue,
            };
            for c in 0..w.len() {
                if is_palindromic_periodic(&w, c) {
                    palindromic_r = palindromic_r.max(orbit.points[c].r.abs());
                }
            }
        }
    }
    report.push("palindromic centers are perpendicular", palindromic_r, 1e-10);

    // jacobi propagator vs monodromy spectrum
    let mut moduli_dev = 0.0f64;
    for w in ["12", "123", "1213"] {
        let orbit = solve_periodic_orbit(table, &Word::parse(w)?)?;
        let prop = jacobi_perp_propagator(
            table,
            &FlowPoint { base: orbit.points[0], t: 0.0 },
            orbit.length,
        )?;
        let a = prop.matrix.spectral_radius();
        let b = orbit.monodromy.spectral_radius();
        moduli_dev = moduli_dev.max((a - b).abs() / b);
    }
    report.push("jacobi propagator spectrum", moduli_dev, 1e-6);

    if is_tri6 {
        // displacement identity on the standard quadrilateral
        let quad = Quadrilateral::from_periodic(table, &Word::parse("12")?, 0, &Word::parse("13")?, 0)?;
        let h = temporal_displacement(table, &quad, 60)?;
        report.push("displacement routes agree", h.route_difference, 1e-8);
        let area = quadrilateral_area(table, &quad, 2e-3)?;
        report.push(
            "area equals minus displacement",
            (area.area + h.four_holonomy).abs(),
            1e-7,
        );
    }

    // dimension reversal symmetry
    let est = bowen_dimension(table, 6)?;
    report.push("dimension reversal symmetry", (est.delta_u - est.delta_s).abs(), 1e-9);

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_passes_on_tri6() {
        let t = tri6();
        let report = run(&t, 40, 7).unwrap();
        for c in &report.checks {
            assert!(c.pass, "{}: measured {} tolerance {}", c.name, c.measured, c.tolerance);
        }
    }
}
