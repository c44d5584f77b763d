//! Numerical verification of the conjugacy consequences at matched
//! periodic points: angle matching, per-segment lengths, curvature
//! jets, and finite-difference derivative estimates of the conjugacy.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Table;
use crate::num::Mat2;
use crate::orbits::resolve_code_default;
use crate::symbolic::{SpliceCode, Sym, Word};

use super::pairing::{iso_length_spectral_report, paired_orbits, AlphabetMap, OrbitPairing};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchedBounce {
    pub word: String,
    pub index: usize,
    pub s1: f64,
    pub r1: f64,
    pub s2: f64,
    pub r2: f64,
    pub r_diff: f64,
    /// Per-segment length mismatch `|tau_2 - tau_1|` of the outgoing
    /// chord.
    pub tau_diff: f64,
    /// Curvature-jet mismatches `K_1^(j)(s1) - K_2^(j)(s2)`.
    pub jet_diffs: Vec<f64>,
    /// Angle mismatch between orbit segments, `|phi_2 - phi_1|`.
    pub angle_diff: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub word: String,
    /// Finite-difference estimate of the conjugacy differential over
    /// matched deep-cylinder displacements.
    pub matrix: Mat2,
    pub distance_to_identity: f64,
    /// Scale of the displacements used.
    pub scale: f64,
    /// Diagonal estimate `a = r1 / r2` where defined.
    pub a_estimate: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConjugacyReport {
    /// Set when iso-spectrality failed upstream; the consequence data
    /// is then reported for diagnosis only.
    pub gated: bool,
    pub max_r_diff: f64,
    pub max_tau_diff: f64,
    /// Max jet mismatch per order `0..=jet_order`.
    pub max_jet_diff: Vec<f64>,
    pub max_angle_diff: f64,
    pub max_derivative_distance: f64,
    pub bounces: Vec<MatchedBounce>,
    pub derivatives: Vec<DerivativeEstimate>,
    /// Induced boundary-map samples `(s1, s2)` per obstacle symbol.
    pub boundary_map: Vec<(Sym, f64, f64)>,
}

/// Depth of the shared cylinders used for derivative estimates; the
/// per-letter contraction is about 0.1, so depth 4 probes scale 1e-4.
const DERIVATIVE_DEPTH: usize = 4;

pub fn conjugacy_consequence_report(
    table_a: &Table,
    table_b: &Table,
    map: &AlphabetMap,
    pairing: &OrbitPairing,
    jet_order: usize,
    iso_tolerance: f64,
) -> Result<ConjugacyReport> {
    let iso = iso_length_spectral_report(pairing, iso_tolerance);
    let pairs = paired_orbits(table_a, table_b, map, pairing.max_len)?;
    let mut bounces = Vec::new();
    let mut max_r_diff: f64 = 0.0;
    let mut max_tau_diff: f64 = 0.0;
    let mut max_jet_diff = vec![0.0f64; jet_order + 1];
    let mut max_angle_diff: f64 = 0.0;
    let mut boundary_map = Vec::new();
    for (word, a, b) in &pairs {
        for j in 0..a.period() {
            let (pa, pb) = (a.points[j], b.points[j]);
            let jets_a = table_a.curve(pa.obstacle).curvature_jet(pa.s, jet_order)?;
            let jets_b = table_b.curve(pb.obstacle).curvature_jet(pb.s, jet_order)?;
            let jet_diffs: Vec<f64> =
                jets_a.iter().zip(&jets_b).map(|(x, y)| (x - y).abs()).collect();
            let angle_diff = (pa.r.asin() - pb.r.asin()).abs();
            let row = MatchedBounce {
                word: word.to_string(),
                index: j,
                s1: pa.s,
                r1: pa.r,
                s2: pb.s,
                r2: pb.r,
                r_diff: (pa.r - pb.r).abs(),
                tau_diff: (a.taus[j] - b.taus[j]).abs(),
                jet_diffs: jet_diffs.clone(),
                angle_diff,
            };
            max_r_diff = max_r_diff.max(row.r_diff);
            max_tau_diff = max_tau_diff.max(row.tau_diff);
            for (m, d) in jet_diffs.iter().enumerate() {
                max_jet_diff[m] = max_jet_diff[m].max(*d);
            }
            max_angle_diff = max_angle_diff.max(angle_diff);
            boundary_map.push((word.at(j), pa.s, pb.s));
            bounces.push(row);
        }
    }
    // derivative estimates at the 2-orbit base points
    let mut derivatives = Vec::new();
    let mut max_derivative_distance: f64 = 0.0;
    for word in two_orbit_words(table_a.len()) {
        let est = derivative_estimate(table_a, table_b, map, &word, DERIVATIVE_DEPTH)?;
        max_derivative_distance = max_derivative_distance.max(est.distance_to_identity);
        derivatives.push(est);
    }
    Ok(ConjugacyReport {
        gated: !iso.pass,
        max_r_diff,
        max_tau_diff,
        max_jet_diff,
        max_angle_diff,
        max_derivative_distance,
        bounces,
        derivatives,
        boundary_map,
    })
}

fn two_orbit_words(alphabet: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for a in 1..=alphabet.min(3) as Sym {
        for b in a + 1..=alphabet as Sym {
            out.push(Word::new(vec![a, b]));
        }
    }
    out
}

/// Whitney-style finite-difference estimate of the conjugacy
/// differential at the periodic point of `word`, using a stable-side
/// and an unstable-side matched displacement of cylinder depth `depth`.
pub fn derivative_estimate(
    table_a: &Table,
    table_b: &Table,
    map: &AlphabetMap,
    word: &Word,
    depth: usize,
) -> Result<DerivativeEstimate> {
    let code_a = SpliceCode::periodic(word, 0);
    let code_b = SpliceCode::periodic(&map.apply(word), 0);
    let branch = |a: Sym, b: Sym| {
        (1..=table_a.len() as Sym).find(|s| *s != a && *s != b).unwrap()
    };
    // deviate the future (unstable-transverse) and the past
    // (stable-transverse) beyond `depth` letters
    let d = depth as isize;
    let bf = branch(code_a.symbol_at(d), code_a.symbol_at(d + 1));
    let bp = branch(code_a.symbol_at(-d), code_a.symbol_at(-d - 1));
    let deviate = |code: &SpliceCode, map_syms: bool, future: bool| -> SpliceCode {
        let mut c = code.clone();
        let m = |s: Sym| if map_syms { map.0[s as usize - 1] } else { s };
        if future {
            let block: Vec<Sym> = (1..=d).map(|j| code.symbol_at(j)).collect();
            let last = *block.last().unwrap();
            c.future_block = block;
            c.future_cycle = Word::new(vec![m(bf), last]);
        } else {
            let block: Vec<Sym> = (-d..=-1).map(|j| code.symbol_at(j)).collect();
            let first = block[0];
            c.past_block = block;
            c.past_cycle = Word::new(vec![first, m(bp)]);
        }
        c
    };
    let base_a = resolve_code_default(table_a, &code_a)?;
    let base_b = resolve_code_default(table_b, &code_b)?;
    let u_a = resolve_code_default(table_a, &deviate(&code_a, false, true))?;
    let s_a = resolve_code_default(table_a, &deviate(&code_a, false, false))?;
    let u_b = resolve_code_default(table_b, &deviate(&code_b, true, true))?;
    let s_b = resolve_code_default(table_b, &deviate(&code_b, true, false))?;
    let du_a = (u_a.point.s - base_a.point.s, u_a.point.r - base_a.point.r);
    let ds_a = (s_a.point.s - base_a.point.s, s_a.point.r - base_a.point.r);
    let du_b = (u_b.point.s - base_b.point.s, u_b.point.r - base_b.point.r);
    let ds_b = (s_b.point.s - base_b.point.s, s_b.point.r - base_b.point.r);
    // D Psi ~ [du_b ds_b] [du_a ds_a]^{-1}
    let m_a = Mat2::new(du_a.0, ds_a.0, du_a.1, ds_a.1);
    let m_b = Mat2::new(du_b.0, ds_b.0, du_b.1, ds_b.1);
    let matrix = m_b * m_a.inverse();
    let scale = du_a.0.hypot(du_a.1).max(ds_a.0.hypot(ds_a.1));
    let a_estimate = if u_a.point.r.abs() > 0.05 {
        Some(u_a.point.r / u_b.point.r)
    } else {
        None
    };
    Ok(DerivativeEstimate {
        word: word.to_string(),
        matrix,
        distance_to_identity: matrix.max_abs_diff(Mat2::IDENTITY),
        scale,
        a_estimate,
    })
}
