//! Two-table orbit pairing by symbolic code and the iso-length-spectral
//! verdict.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Table;
use crate::orbits::{necklaces_up_to, solve_periodic_orbit, PeriodicOrbit};
use crate::par::par_map;
use crate::symbolic::{Sym, Word};

/// A bijection of obstacle symbols between two tables (1-based;
/// `map[i-1]` is the image of symbol `i`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphabetMap(pub Vec<Sym>);

impl AlphabetMap {
    pub fn identity(l: usize) -> Self {
        AlphabetMap((1..=l as Sym).collect())
    }

    pub fn apply(&self, word: &Word) -> Word {
        Word::new(word.syms.iter().map(|&s| self.0[s as usize - 1]).collect())
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        for &s in &self.0 {
            let i = s as usize - 1;
            if i >= seen.len() || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairedOrbit {
    pub word: String,
    pub word_b: String,
    pub length_a: f64,
    pub length_b: f64,
    pub diff: f64,
}

/// Orbit pairing between two tables, keyed by relabeled codes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitPairing {
    pub max_len: usize,
    pub rows: Vec<PairedOrbit>,
    pub failures: Vec<(String, String)>,
}

pub fn match_periodic_orbits(
    table_a: &Table,
    table_b: &Table,
    map: &AlphabetMap,
    max_len: usize,
) -> Result<OrbitPairing> {
    if table_a.len() != table_b.len() {
        return Err(Error::InvalidConfig("tables have different obstacle counts".into()));
    }
    if map.0.len() != table_a.len() || !map.is_bijective() {
        return Err(Error::InvalidConfig("alphabet map is not a bijection".into()));
    }
    let words = necklaces_up_to(table_a.len(), max_len);
    let solved = par_map(&words, |w| {
        let a = solve_periodic_orbit(table_a, w);
        let b = solve_periodic_orbit(table_b, &map.apply(w));
        (a, b)
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (w, (a, b)) in words.iter().zip(solved) {
        match (a, b) {
            (Ok(a), Ok(b)) => rows.push(PairedOrbit {
                word: w.to_string(),
                word_b: map.apply(w).to_string(),
                length_a: a.length,
                length_b: b.length,
                diff: (a.length - b.length).abs(),
            }),
            (Err(e), _) | (_, Err(e)) => failures.push((w.to_string(), e.to_string())),
        }
    }
    Ok(OrbitPairing { max_len, rows, failures })
}

/// Solved orbit pairs (used by the conjugacy-consequence report).
pub fn paired_orbits(
    table_a: &Table,
    table_b: &Table,
    map: &AlphabetMap,
    max_len: usize,
) -> Result<Vec<(Word, PeriodicOrbit, PeriodicOrbit)>> {
    let words = necklaces_up_to(table_a.len(), max_len);
    let solved = par_map(&words, |w| {
        let a = solve_periodic_orbit(table_a, w)?;
        let b = solve_periodic_orbit(table_b, &map.apply(w))?;
        Ok::<_, Error>((w.clone(), a, b))
    });
    solved.into_iter().collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IsoSpectralReport {
    pub pass: bool,
    pub tolerance: f64,
    pub max_diff: f64,
    /// Worst mismatches, largest first (at most ten).
    pub worst: Vec<PairedOrbit>,
    /// Set when the pairing carries no data.
    pub no_data: bool,
}

pub fn iso_length_spectral_report(pairing: &OrbitPairing, tolerance: f64) -> IsoSpectralReport {
    if pairing.rows.is_empty() {
        return IsoSpectralReport {
            pass: false,
            tolerance,
            max_diff: f64::NAN,
            worst: Vec::new(),
            no_data: true,
        };
    }
    let mut sorted = pairing.rows.clone();
    sorted.sort_by(|a, b| b.diff.partial_cmp(&a.diff).unwrap());
    let max_diff = sorted[0].diff;
    IsoSpectralReport {
        pass: max_diff <= tolerance,
        tolerance,
        max_diff,
        worst: sorted.into_iter().take(10).collect(),
        no_data: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{tri6, Isometry, ShapeSpec, Table, TableConfig};
    use crate::num::Vec2;

    #[test]
    fn identity_pairing_is_exact_and_complete() {
        let t = tri6();
        let pairing = match_periodic_orbits(&t, &t, &AlphabetMap::identity(3), 4).unwrap();
        assert!(pairing.failures.is_empty());
        assert!(pairing.rows.iter().all(|r| r.diff == 0.0));
        // the key set is the full admissible necklace set to this depth
        let expected: Vec<String> = crate::orbits::necklaces_up_to(3, 4)
            .iter()
            .map(|w| w.to_string())
            .collect();
        let mut keys: Vec<String> = pairing.rows.iter().map(|r| r.word.clone()).collect();
        keys.sort();
        let mut expected_sorted = expected;
        expected_sorted.sort();
        assert_eq!(keys, expected_sorted);
    }

    #[test]
    fn isometric_image_is_iso_spectral() {
        let t = tri6();
        let img = t
            .apply_isometry(&Isometry { rotation: 0.7, translation: Vec2::new(1.3, -2.1) })
            .unwrap();
        let pairing = match_periodic_orbits(&t, &img, &AlphabetMap::identity(3), 5).unwrap();
        let report = iso_length_spectral_report(&pairing, 1e-9);
        assert!(report.pass, "max diff {}", report.max_diff);
    }

    #[test]
    fn radius_perturbation_breaks_the_spectrum() {
        let t = tri6();
        let bigger = TableConfig {
            non_eclipse: false,
            obstacles: vec![
                ShapeSpec::Circle { center: [0.0, 0.0], radius: 1.1, phase: 0.0 },
                ShapeSpec::Circle { center: [6.0, 0.0], radius: 1.0, phase: 0.0 },
                ShapeSpec::Circle { center: [3.0, 3.0 * 3.0f64.sqrt()], radius: 1.0, phase: 0.0 },
            ],
        };
        let b = Table::build(&bigger).unwrap();
        let pairing = match_periodic_orbits(&t, &b, &AlphabetMap::identity(3), 2).unwrap();
        let report = iso_length_spectral_report(&pairing, 1e-9);
        assert!(!report.pass);
        // the 12-orbit shortens by exactly the radius increase: 8.0 -> 7.8
        let worst = &report.worst[0];
        assert_eq!(worst.word, "12");
        assert!((worst.diff - 0.2).abs() < 1e-9, "diff {}", worst.diff);
    }

    #[test]
    fn relabeling_symmetry_of_tri6() {
        // the rotation symmetry 1 -> 2 -> 3 of the equilateral table is
        // an isometry, so the relabeled spectrum matches
        let t = tri6();
        let map = AlphabetMap(vec![2, 3, 1]);
        let pairing = match_periodic_orbits(&t, &t, &map, 5).unwrap();
        let report = iso_length_spectral_report(&pairing, 1e-9);
        assert!(report.pass, "max diff {}", report.max_diff);
    }

    #[test]
    fn empty_pairing_flags_no_data() {
        let pairing = OrbitPairing { max_len: 2, rows: vec![], failures: vec![] };
        let report = iso_length_spectral_report(&pairing, 1e-9);
        assert!(!report.pass && report.no_data);
    }
}
