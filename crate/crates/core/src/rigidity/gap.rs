//! The gap-perturbation experiment: a bump supported inside a certified
//! gap of the trace leaves the marked length spectrum unchanged, while
//! the same bump on a cover interval moves it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BumpPerturbation, Table};
use crate::orbits::marked_length_spectrum;

use super::cover::{trace_cover, TraceCover};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapExperimentReport {
    pub obstacle: usize,
    pub gap: (f64, f64),
    pub support: (f64, f64),
    pub control_support: (f64, f64),
    pub amplitude: f64,
    pub max_len: usize,
    pub cover_depth: usize,
    /// Largest spectrum change with the bump inside the gap.
    pub max_delta_gap: f64,
    /// Largest spectrum change with the bump on a cover interval.
    pub max_delta_control: f64,
    pub entries_compared: usize,
}

/// Choice of the perturbation site: the `rank`-th widest certified gap
/// of the given obstacle.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GapChoice {
    pub obstacle: usize,
    pub rank: usize,
}

fn spectrum_deviation(table: &Table, other: &Table, max_len: usize) -> Result<(f64, usize)> {
    let a = marked_length_spectrum(table, max_len);
    let b = marked_length_spectrum(other, max_len);
    if !a.failures.is_empty() || !b.failures.is_empty() {
        return Err(Error::NonConvergence { residual: f64::NAN, iterations: 0 });
    }
    let mut max = 0.0f64;
    for (x, y) in a.entries.iter().zip(&b.entries) {
        debug_assert_eq!(x.word, y.word);
        max = max.max((x.length - y.length).abs());
    }
    Ok((max, a.entries.len()))
}

pub fn gap_perturbation_experiment(
    table: &Table,
    choice: GapChoice,
    amplitude: f64,
    max_len: usize,
    cover_depth: usize,
) -> Result<GapExperimentReport> {
    let cover: TraceCover = trace_cover(table, cover_depth)?;
    let gaps = cover.widest_gaps(choice.obstacle);
    let gap = *gaps.get(choice.rank).ok_or(Error::GapTooSmall {
        needed: 0.0,
        available: 0.0,
    })?;
    let gap_width = gap.1 - gap.0;
    // the bump support sits centered in the gap with margin at least
    // equal to its own width on both sides
    let width = (gap_width / 3.0).min(0.6);
    if !(width > 0.0) {
        return Err(Error::GapTooSmall { needed: 3.0 * width, available: gap_width });
    }
    let per = table.curve(choice.obstacle).perimeter();
    let start = (gap.0 + 0.5 * (gap_width - width)).rem_euclid(per);
    let bump = BumpPerturbation {
        obstacle: choice.obstacle,
        start,
        width,
        amplitude,
        order: 7,
    };
    let perturbed = table.perturb_boundary(&bump)?;
    let (max_delta_gap, entries_compared) = spectrum_deviation(table, &perturbed, max_len)?;
    // control: same bump centered on the widest cover interval
    let mut intervals = cover.intervals[choice.obstacle].clone();
    intervals.sort_by(|a, b| (b.1 - b.0).partial_cmp(&(a.1 - a.0)).unwrap());
    let target = intervals.first().ok_or(Error::TooFewOrbits(cover_depth))?;
    let control_start = (0.5 * (target.0 + target.1) - 0.5 * width).rem_euclid(per);
    let control_bump = BumpPerturbation {
        obstacle: choice.obstacle,
        start: control_start,
        width,
        amplitude,
        order: 7,
    };
    let control = table.perturb_boundary(&control_bump)?;
    let (max_delta_control, _) = spectrum_deviation(table, &control, max_len)?;
    Ok(GapExperimentReport {
        obstacle: choice.obstacle,
        gap,
        support: (start, start + width),
        control_support: (control_start, control_start + width),
        amplitude,
        max_len,
        cover_depth,
        max_delta_gap,
        max_delta_control,
        entries_compared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::tri6;

    #[test]
    fn gap_bump_is_invisible_control_is_not() {
        let t = tri6();
        let report = gap_perturbation_experiment(
            &t,
            GapChoice { obstacle: 0, rank: 0 },
            1e-3,
            6,
            3,
        )
        .unwrap();
        assert!(report.max_delta_gap < 1e-9, "gap delta {}", report.max_delta_gap);
        assert!(report.max_delta_control > 1e-6, "control delta {}", report.max_delta_control);
    }

    #[test]
    fn zero_amplitude_changes_nothing() {
        let t = tri6();
        let report = gap_perturbation_experiment(
            &t,
            GapChoice { obstacle: 0, rank: 0 },
            0.0,
            4,
            2,
        )
        .unwrap();
        assert!(report.max_delta_gap < 1e-12);
        assert!(report.max_delta_control < 1e-12);
    }
}
