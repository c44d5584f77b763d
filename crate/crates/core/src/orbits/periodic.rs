//! Periodic orbits from symbolic codes and the marked length spectrum.

use serde::{Deserialize, Serialize};

use crate::dynamics::{chord_partials, map_differential_from_data, PhasePoint};
use crate::error::{Error, Result};
use crate::geometry::Table;
use crate::num::Mat2;
use crate::par::par_map;
use crate::symbolic::{enumerate_words, is_admissible, Word};

use super::newton::{initial_site, minimize_length};

/// A solved periodic orbit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub word: Word,
    /// Bounce sites `(obstacle, s)` in word order.
    pub sites: Vec<(usize, f64)>,
    /// Phase points with `r` recovered from the generating relations.
    pub points: Vec<PhasePoint>,
    /// Chord lengths `tau_j = h(s_j, s_{j+1})`.
    pub taus: Vec<f64>,
    pub length: f64,
    /// Product of the step differentials over one period, at phase 0.
    pub monodromy: Mat2,
    /// Final gradient infinity-norm of the Newton solve.
    pub residual: f64,
}

impl PeriodicOrbit {
    pub fn period(&self) -> usize {
        self.sites.len()
    }

    /// Per-bounce Lyapunov exponent:
    /// `log(spectral radius of the monodromy) / period`.
    pub fn lyapunov_exponent(&self) -> Result<f64> {
        let tr = self.monodromy.trace().abs();
        if tr <= 2.0 {
            return Err(Error::NonHyperbolic(tr));
        }
        Ok(self.monodromy.spectral_radius().ln() / self.period() as f64)
    }

    /// Monodromy with the product started at `phase`.
    pub fn monodromy_at(&self, table: &Table, phase: usize) -> Mat2 {
        let p = self.period();
        let mut m = Mat2::IDENTITY;
        for k in 0..p {
            m = self.step_differential(table, (phase + k) % p) * m;
        }
        m
    }

    /// Differential of one step `j -> j+1` from the solved data.
    pub fn step_differential(&self, table: &Table, j: usize) -> Mat2 {
        let p = self.period();
        let k = (j + 1) % p;
        map_differential_from_data(
            self.taus[j],
            table.curve(self.sites[j].0).curvature(self.sites[j].1),
            table.curve(self.sites[k].0).curvature(self.sites[k].1),
            self.points[j].nu(),
            self.points[k].nu(),
        )
    }
}

/// Solve the unique periodic orbit with the given admissible code by
/// Newton on the cyclic length functional.
pub fn solve_periodic_orbit(table: &Table, word: &Word) -> Result<PeriodicOrbit> {
    solve_periodic_orbit_from(table, word, None)
}

/// Same, but starting from explicit initial sites when provided.
pub fn solve_periodic_orbit_from(
    table: &Table,
    word: &Word,
    initial: Option<Vec<f64>>,
) -> Result<PeriodicOrbit> {
    if word.len() < 2 || !is_admissible(word, true) {
        return Err(Error::InadmissibleWord(word.to_string()));
    }
    let obstacles: Vec<usize> = word.syms.iter().map(|&s| s as usize - 1).collect();
    if obstacles.iter().any(|&o| o >= table.len()) {
        return Err(Error::InadmissibleWord(format!("{word} exceeds the alphabet")));
    }
    let p = obstacles.len();
    let init = initial.unwrap_or_else(|| {
        (0..p)
            .map(|j| initial_site(table, obstacles[j], obstacles[(j + p - 1) % p], obstacles[(j + 1) % p]))
            .collect()
    });
    let outcome = minimize_length(table, &obstacles, init, true, None)?;
    let sites: Vec<(usize, f64)> = obstacles.iter().copied().zip(outcome.sites.iter().copied()).collect();
    let mut taus = Vec::with_capacity(p);
    let mut points = Vec::with_capacity(p);
    for j in 0..p {
        let k = (j + 1) % p;
        let (r, _) = chord_partials(table, sites[j], sites[k]);
        let d = table.curve(sites[k].0).point(sites[k].1) - table.curve(sites[j].0).point(sites[j].1);
        taus.push(d.norm());
        points.push(PhasePoint::new(sites[j].0, sites[j].1, r));
    }
    let mut orbit = PeriodicOrbit {
        word: word.clone(),
        sites,
        points,
        taus: taus.clone(),
        length: taus.iter().sum(),
        monodromy: Mat2::IDENTITY,
        residual: outcome.residual,
    };
    orbit.monodromy = orbit.monodromy_at(table, 0);
    Ok(orbit)
}

/// One row of the marked length spectrum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MlsEntry {
    pub word: String,
    pub length: f64,
    pub lyapunov: f64,
    pub residual: f64,
    pub prime: bool,
}

/// The marked length spectrum to a maximum word length: one entry per
/// admissible necklace, ordered by (length, word).
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MlsTable {
    pub entries: Vec<MlsEntry>,
    pub failures: Vec<(String, String)>,
}

impl MlsTable {
    pub fn get(&self, word: &str) -> Option<&MlsEntry> {
        self.entries.iter().find(|e| e.word == word)
    }
}

/// All admissible necklaces with `2 <= len <= max_len`.
pub fn necklaces_up_to(alphabet: usize, max_len: usize) -> Vec<Word> {
    let mut words = Vec::new();
    for len in 2..=max_len {
        words.extend(enumerate_words(alphabet, len, true, true));
    }
    words
}

pub fn marked_length_spectrum(table: &Table, max_len: usize) -> MlsTable {
    let words = necklaces_up_to(table.len(), max_len);
    let solved = par_map(&words, |w| solve_periodic_orbit(table, w));
    let mut out = MlsTable::default();
    for (w, res) in words.iter().zip(solved) {
        match res {
            Ok(orbit) => {
                let lyapunov = orbit.lyapunov_exponent().unwrap_or(f64::NAN);
                out.entries.push(MlsEntry {
                    word: w.to_string(),
                    length: orbit.length,
                    lyapunov,
                    residual: orbit.residual,
                    prime: w.is_prime(),
                });
            }
            Err(e) => out.failures.push((w.to_string(), e.to_string())),
        }
    }
    out.entries.sort_by(|a, b| {
        (a.word.len(), &a.word).cmp(&(b.word.len(), &b.word))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{tri6, tri_custom};

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn axis_two_orbit() {
        let t = tri6();
        let orbit = solve_periodic_orbit(&t, &w("12")).unwrap();
        assert!((orbit.length - 8.0).abs() < 1e-11);
        assert!(orbit.points[0].r.abs() < 1e-11);
        assert!(orbit.points[1].r.abs() < 1e-11);
        assert!(orbit.residual < 1e-10);
        assert!((orbit.monodromy.det() - 1.0).abs() < 1e-9);
        // monodromy is the square of [[-5,4],[6,-5]]
        let expect = Mat2::new(49.0, -40.0, -60.0, 49.0);
        assert!(orbit.monodromy.max_abs_diff(expect) < 1e-8, "{:?}", orbit.monodromy);
    }

    #[test]
    fn symmetric_triangle_orbit() {
        let t = tri6();
        let orbit = solve_periodic_orbit(&t, &w("123")).unwrap();
        let expect = 18.0 - 3.0 * 3.0f64.sqrt();
        assert!((orbit.length - expect).abs() < 1e-10, "L = {}", orbit.length);
        for p in &orbit.points {
            assert!((p.r - 0.5).abs() < 1e-10, "r = {}", p.r);
        }
    }

    #[test]
    fn inadmissible_rejected() {
        let t = tri6();
        assert!(matches!(solve_periodic_orbit(&t, &w("11")), Err(Error::InadmissibleWord(_))));
    }

    #[test]
    fn lyapunov_closed_forms() {
        let t = tri6();
        let orbit = solve_periodic_orbit(&t, &w("12")).unwrap();
        let expect = (5.0 + 2.0 * 6.0f64.sqrt()).ln();
        assert!((orbit.lyapunov_exponent().unwrap() - expect).abs() < 1e-10);
        // reversed word has the same exponent
        let rev = solve_periodic_orbit(&t, &w("21")).unwrap();
        assert!((rev.lyapunov_exponent().unwrap() - expect).abs() < 1e-10);
        // scaled separation: h = 10 gives log(11 + 2 sqrt(30))
        let wide = tri_custom(12.0, 1.0);
        let orbit = solve_periodic_orbit(&wide, &w("12")).unwrap();
        let expect = (11.0 + 2.0 * 30.0f64.sqrt()).ln();
        assert!((orbit.lyapunov_exponent().unwrap() - expect).abs() < 1e-10);
        assert!(expect > 3.0889 && expect < 3.0890);
    }

    #[test]
    fn mls_small_table() {
        let t = tri6();
        let mls = marked_length_spectrum(&t, 3);
        assert!(mls.failures.is_empty());
        let words: Vec<&str> = mls.entries.iter().map(|e| e.word.as_str()).collect();
        assert_eq!(words, ["12", "13", "23", "123", "132"]);
        for e in &mls.entries[..3] {
            assert!((e.length - 8.0).abs() < 1e-10);
        }
        for e in &mls.entries[3..] {
            assert!((e.length - (18.0 - 3.0 * 3.0f64.sqrt())).abs() < 1e-9);
        }
    }

    #[test]
    fn mls_isometry_invariance() {
        use crate::geometry::Isometry;
        use crate::num::Vec2;
        let t = tri6();
        let img = t.apply_isometry(&Isometry { rotation: 0.7, translation: Vec2::new(1.3, -2.1) }).unwrap();
        let a = marked_length_spectrum(&t, 4);
        let b = marked_length_spectrum(&img, 4);
        assert_eq!(a.entries.len(), b.entries.len());
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert_eq!(x.word, y.word);
            assert!((x.length - y.length).abs() < 1e-10, "{} vs {}", x.length, y.length);
        }
    }

    #[test]
    fn uniqueness_under_perturbed_initialization() {
        let t = tri6();
        let word = w("1213");
        let base = solve_periodic_orbit(&t, &word).unwrap();
        let perturbed: Vec<f64> = base.sites.iter().enumerate().map(|(i, &(_, s))| s + 0.1 * if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let again = solve_periodic_orbit_from(&t, &word, Some(perturbed)).unwrap();
        for (a, b) in base.sites.iter().zip(&again.sites) {
            assert!((a.1 - b.1).abs() < 1e-9);
        }
    }

    #[test]
    fn mls_reversal_and_rotation_equality() {
        let t = tri6();
        for word in ["1213", "1232", "12123"] {
            let a = solve_periodic_orbit(&t, &w(word)).unwrap();
            let b = solve_periodic_orbit(&t, &w(word).reversed()).unwrap();
            let c = solve_periodic_orbit(&t, &w(word).rotated(1)).unwrap();
            assert!((a.length - b.length).abs() < 1e-10);
            assert!((a.length - c.length).abs() < 1e-10);
        }
    }
}
