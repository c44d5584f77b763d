//! The coding layer: admissible words over the obstacle alphabet,
//! bi-infinite eventually-periodic codes, palindromes, cylinder
//! enumeration, and the bridge-word construction.
//!
//! A symbol is the 1-based position of an obstacle in its table. A word
//! is admissible when consecutive symbols differ; a periodic word also
//! needs last != first.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Obstacle symbol (1-based).
pub type Sym = u8;

/// A finite symbol sequence, optionally with a marked position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    pub syms: Vec<Sym>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked: Option<usize>,
}

impl Word {
    pub fn new(syms: Vec<Sym>) -> Word {
        Word { syms, marked: None }
    }

    /// Parse "123" (all ids < 10) or "1-2-13" (dash separated).
    pub fn parse(text: &str) -> Result<Word> {
        let syms: Vec<Sym> = if text.contains('-') {
            text.split('-')
                .map(|p| p.parse::<Sym>().map_err(|_| Error::InvalidConfig(format!("bad word {text:?}"))))
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as Sym)
                        .ok_or_else(|| Error::InvalidConfig(format!("bad word {text:?}")))
                })
                .collect::<Result<_>>()?
        };
        if syms.is_empty() {
            return Err(Error::InvalidConfig("empty word".into()));
        }
        Ok(Word::new(syms))
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn at(&self, i: usize) -> Sym {
        self.syms[i]
    }

    /// Symbol at position `i mod len` (cyclic reading).
    pub fn cyclic(&self, i: isize) -> Sym {
        let n = self.syms.len() as isize;
        self.syms[i.rem_euclid(n) as usize]
    }

    pub fn reversed(&self) -> Word {
        let mut syms = self.syms.clone();
        syms.reverse();
        Word::new(syms)
    }

    pub fn rotated(&self, by: usize) -> Word {
        let n = self.syms.len();
        Word::new((0..n).map(|i| self.syms[(i + by) % n]).collect())
    }

    /// Lexicographically minimal rotation (necklace representative).
    pub fn necklace(&self) -> Word {
        (0..self.syms.len()).map(|k| self.rotated(k)).min().unwrap()
    }

    /// Smallest period dividing the length.
    pub fn prime_period(&self) -> usize {
        let n = self.syms.len();
        'outer: for p in 1..=n {
            if n % p != 0 {
                continue;
            }
            for i in 0..n {
                if self.syms[i] != self.syms[i % p] {
                    continue 'outer;
                }
            }
            return p;
        }
        n
    }

    pub fn is_prime(&self) -> bool {
        self.prime_period() == self.syms.len()
    }

    pub fn repeat(&self, times: usize) -> Word {
        let mut syms = Vec::with_capacity(self.syms.len() * times);
        for _ in 0..times {
            syms.extend_from_slice(&self.syms);
        }
        Word::new(syms)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syms.iter().all(|&s| s < 10) {
            for s in &self.syms {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.syms.iter().map(|s| s.to_string()).collect();
            write!(f, "{}", parts.join("-"))
        }
    }
}

/// True iff no equal adjacent pair; cyclically when `periodic`.
pub fn is_admissible(word: &Word, periodic: bool) -> bool {
    let n = word.len();
    if n == 0 {
        return false;
    }
    for i in 1..n {
        if word.syms[i] == word.syms[i - 1] {
            return false;
        }
    }
    if periodic && n > 1 && word.syms[n - 1] == word.syms[0] {
        return false;
    }
    true
}

/// Admissible words of exactly `length` over `{1..=alphabet}`,
/// lexicographic. With `necklaces`, one representative per necklace
/// (lexicographically minimal rotation).
pub fn enumerate_words(alphabet: usize, length: usize, periodic: bool, necklaces: bool) -> Vec<Word> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(length);
    fn rec(alphabet: usize, length: usize, periodic: bool, necklaces: bool, current: &mut Vec<Sym>, out: &mut Vec<Word>) {
        if current.len() == length {
            let w = Word::new(current.clone());
            if periodic && w.syms[length - 1] == w.syms[0] && length > 1 {
                return;
            }
            if !necklaces || w.necklace() == w {
                out.push(w);
            }
            return;
        }
        for s in 1..=alphabet as Sym {
            if let Some(&last) = current.last() {
                if last == s {
                    continue;
                }
            }
            current.push(s);
            rec(alphabet, length, periodic, necklaces, current, out);
            current.pop();
        }
    }
    rec(alphabet, length, periodic, necklaces, &mut current, &mut out);
    out
}

/// Number of admissible periodic sequences of length `n` (fixed points
/// of the n-th shift power): the trace of `A^n` for the transition
/// matrix `A = (1 - delta_ij)`.
pub fn periodic_sequence_count(alphabet: usize, n: u32) -> u64 {
    // A = J - I with J the all-ones matrix: eigenvalues l-1 (once) and
    // -1 (l-1 times), so trace A^n = (l-1)^n + (l-1)(-1)^n.
    let l = alphabet as i64;
    let main = (l - 1).pow(n);
    let rest = (l - 1) * if n % 2 == 0 { 1 } else { -1 };
    (main + rest) as u64
}

/// Brute-force companion of `periodic_sequence_count` (test oracle).
pub fn periodic_sequence_count_by_power(alphabet: usize, n: u32) -> u64 {
    let l = alphabet;
    let mut m = vec![vec![0u64; l]; l];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if i == j { 0 } else { 1 };
        }
    }
    let mut acc = m.clone();
    for _ in 1..n {
        let mut next = vec![vec![0u64; l]; l];
        for i in 0..l {
            for k in 0..l {
                if acc[i][k] == 0 {
                    continue;
                }
                for j in 0..l {
                    next[i][j] += acc[i][k] * m[k][j];
                }
            }
        }
        acc = next;
    }
    (0..l).map(|i| acc[i][i]).sum()
}

/// A bi-infinite, eventually periodic code
/// `... C C B c F D D ...` with past cycle `C`, past block `B`, center
/// `c`, future block `F`, future cycle `D`. Position 0 is the center.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpliceCode {
    pub past_cycle: Word,
    pub past_block: Vec<Sym>,
    pub center: Sym,
    pub future_block: Vec<Sym>,
    pub future_cycle: Word,
}

impl SpliceCode {
    /// A periodic point: the cycle everywhere, centered at `phase`.
    pub fn periodic(word: &Word, phase: usize) -> SpliceCode {
        let w = word.rotated(phase);
        SpliceCode {
            past_cycle: w.clone(),
            past_block: Vec::new(),
            center: w.syms[0],
            future_block: w.syms[1..].to_vec(),
            future_cycle: w.clone(),
        }
    }

    /// Symbol at any position (0 = center).
    pub fn symbol_at(&self, j: isize) -> Sym {
        if j == 0 {
            return self.center;
        }
        if j > 0 {
            let j = j as usize - 1;
            if j < self.future_block.len() {
                return self.future_block[j];
            }
            return self.future_cycle.cyclic((j - self.future_block.len()) as isize);
        }
        let j = (-j) as usize - 1;
        if j < self.past_block.len() {
            return self.past_block[self.past_block.len() - 1 - j];
        }
        let k = j - self.past_block.len();
        self.past_cycle.cyclic(-1 - k as isize)
    }

    /// Check admissibility over the full (eventually periodic) code.
    pub fn check_admissible(&self) -> Result<()> {
        if !is_admissible(&self.past_cycle, true) || !is_admissible(&self.future_cycle, true) {
            return Err(Error::InadmissibleWord(format!("{self}")));
        }
        let reach = (self.past_block.len() + self.past_cycle.len() + 2) as isize;
        let ahead = (self.future_block.len() + self.future_cycle.len() + 2) as isize;
        for j in -reach..ahead {
            if self.symbol_at(j) == self.symbol_at(j + 1) {
                return Err(Error::InadmissibleSplice(j));
            }
        }
        Ok(())
    }

    /// The code of the image point: everything shifted one step left.
    pub fn shifted(&self, by: isize) -> SpliceCode {
        let mut code = self.clone();
        match by.cmp(&0) {
            std::cmp::Ordering::Equal => {}
            std::cmp::Ordering::Greater => {
                for _ in 0..by {
                    code.past_block.push(code.center);
                    code.center = if code.future_block.is_empty() {
                        let c = code.future_cycle.syms[0];
                        code.future_cycle = code.future_cycle.rotated(1);
                        c
                    } else {
                        code.future_block.remove(0)
                    };
                    code.normalize();
                }
            }
            std::cmp::Ordering::Less => {
                for _ in 0..-by {
                    code.future_block.insert(0, code.center);
                    code.center = if code.past_block.is_empty() {
                        let n = code.past_cycle.len();
                        let c = code.past_cycle.syms[n - 1];
                        code.past_cycle = code.past_cycle.rotated(n - 1);
                        c
                    } else {
                        code.past_block.pop().unwrap()
                    };
                    code.normalize();
                }
            }
        }
        code
    }

    /// Drop block symbols that just repeat the adjacent cycle.
    fn normalize(&mut self) {
        loop {
            let n = self.past_block.len();
            if n >= self.past_cycle.len() {
                let tail = &self.past_block[n - self.past_cycle.len()..];
                if tail == self.past_cycle.syms.as_slice() {
                    self.past_block.truncate(n - self.past_cycle.len());
                    continue;
                }
            }
            break;
        }
        loop {
            let n = self.future_block.len();
            if n >= self.future_cycle.len() {
                let head = &self.future_block[..self.future_cycle.len()];
                if head == self.future_cycle.syms.as_slice() {
                    self.future_block.drain(..self.future_cycle.len());
                    continue;
                }
            }
            break;
        }
    }

    /// Splice: the future of `x` glued to the past of `y`. Both codes
    /// must share the center symbol (the local product in a cylinder
    /// rectangle). This is the code of `[x, y]`.
    pub fn bracket(x: &SpliceCode, y: &SpliceCode) -> Result<SpliceCode> {
        if x.center != y.center {
            return Err(Error::InadmissibleSplice(0));
        }
        let code = SpliceCode {
            past_cycle: y.past_cycle.clone(),
            past_block: y.past_block.clone(),
            center: x.center,
            future_block: x.future_block.clone(),
            future_cycle: x.future_cycle.clone(),
        };
        code.check_admissible()?;
        Ok(code)
    }

    /// Number of leading positions (>= 0 forward, <= 0 backward) on
    /// which the two codes agree.
    pub fn shared_future_depth(&self, other: &SpliceCode, max: usize) -> usize {
        let mut d = 0;
        while d < max && self.symbol_at(d as isize) == other.symbol_at(d as isize) {
            d += 1;
        }
        d
    }

    pub fn shared_past_depth(&self, other: &SpliceCode, max: usize) -> usize {
        let mut d = 0;
        while d < max && self.symbol_at(-(d as isize)) == other.symbol_at(-(d as isize)) {
            d += 1;
        }
        d
    }

    /// Reversed code (time reversal): the code of the involuted point.
    pub fn reversed(&self) -> SpliceCode {
        SpliceCode {
            past_cycle: self.future_cycle.reversed(),
            past_block: {
                let mut b = self.future_block.clone();
                b.reverse();
                b
            },
            center: self.center,
            future_block: {
                let mut b = self.past_block.clone();
                b.reverse();
                b
            },
            future_cycle: self.past_cycle.reversed(),
        }
    }
}

impl fmt::Display for SpliceCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})^inf {:?} [{}] {:?} ({})^inf",
            self.past_cycle, self.past_block, self.center, self.future_block, self.future_cycle
        )
    }
}

/// Palindrome verdict for a window of a bi-infinite code.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PalindromeCheck {
    pub palindromic: bool,
    /// Offsets `1..=depth` were certified.
    pub depth: usize,
}

/// Check `sigma_{c+j} = sigma_{c-j}` for all in-window `j`.
pub fn is_palindromic_at(window: &Word, center: usize) -> Result<PalindromeCheck> {
    if window.len() < 3 {
        return Err(Error::WindowTooShort(format!("palindrome window of {} symbols", window.len())));
    }
    let depth = center.min(window.len() - 1 - center);
    for j in 1..=depth {
        if window.syms[center + j] != window.syms[center - j] {
            return Ok(PalindromeCheck { palindromic: false, depth: j });
        }
    }
    Ok(PalindromeCheck { palindromic: true, depth })
}

/// Palindromicity of a periodic word read bi-infinitely, centered at
/// `center`. Checking one full period on each side is conclusive.
pub fn is_palindromic_periodic(word: &Word, center: usize) -> bool {
    let n = word.len() as isize;
    let c = center as isize;
    (1..=n).all(|j| word.cyclic(c + j) == word.cyclic(c - j))
}

/// Heteroclinic code data: the two periodic endpoints plus the
/// bridging blocks `(minus, center, plus)` used by the bridge-word
/// construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Bridge {
    pub minus: Vec<Sym>,
    pub center: Sym,
    pub plus: Vec<Sym>,
}

/// Build the periodic bridge word
/// `c1 p1 A^{2n} m3 c3 p3 B^{2n} m1`
/// where `(m1, c1, p1)` bridges from the `B`-orbit into the `A`-orbit
/// and `(m3, c3, p3)` bridges back. For empty bridges and 2-letter
/// blocks the period is `2 + 8 n`.
pub fn bridge_word(block_a: &Word, block_b: &Word, bridge1: &Bridge, bridge3: &Bridge, n: usize) -> Result<Word> {
    let mut syms = Vec::new();
    syms.push(bridge1.center);
    syms.extend_from_slice(&bridge1.plus);
    for _ in 0..2 * n {
        syms.extend_from_slice(&block_a.syms);
    }
    syms.extend_from_slice(&bridge3.minus);
    syms.push(bridge3.center);
    syms.extend_from_slice(&bridge3.plus);
    for _ in 0..2 * n {
        syms.extend_from_slice(&block_b.syms);
    }
    syms.extend_from_slice(&bridge1.minus);
    let word = Word::new(syms);
    if !is_admissible(&word, true) {
        return Err(Error::InadmissibleWord(word.to_string()));
    }
    Ok(word)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible(&w("1213"), true));
        assert!(!is_admissible(&w("1123"), false));
        assert!(!is_admissible(&w("121"), true)); // wraps 1 -> 1
        assert!(is_admissible(&w("121"), false));
    }

    #[test]
    fn enumeration_counts() {
        let len2 = enumerate_words(3, 2, true, false);
        assert_eq!(
            len2.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            ["12", "13", "21", "23", "31", "32"]
        );
        let neck2 = enumerate_words(3, 2, true, true);
        assert_eq!(neck2.iter().map(|x| x.to_string()).collect::<Vec<_>>(), ["12", "13", "23"]);
        let neck3 = enumerate_words(3, 3, true, true);
        assert_eq!(neck3.iter().map(|x| x.to_string()).collect::<Vec<_>>(), ["123", "132"]);
    }

    #[test]
    fn transition_trace() {
        assert_eq!(periodic_sequence_count(3, 4), 18);
        for l in 2..=5 {
            for n in 1..=10 {
                assert_eq!(
                    periodic_sequence_count(l, n),
                    periodic_sequence_count_by_power(l, n),
                    "l={l} n={n}"
                );
                if n >= 2 {
                    let count = enumerate_words(l, n as usize, true, false).len() as u64;
                    assert_eq!(count, periodic_sequence_count(l, n), "enumeration l={l} n={n}");
                }
            }
        }
    }

    #[test]
    fn palindromes() {
        // ...232 1 232... centered at the 1
        assert!(is_palindromic_at(&w("2321232"), 3).unwrap().palindromic);
        assert!(!is_palindromic_at(&w("12313"), 2).unwrap().palindromic);
        assert!(is_palindromic_at(&w("12"), 0).is_err());
        // periodic word 12 is palindromic at every position
        assert!(is_palindromic_periodic(&w("12"), 0));
        assert!(is_palindromic_periodic(&w("12"), 1));
        assert!(!is_palindromic_periodic(&w("123"), 0));
    }

    #[test]
    fn splice_code_reading() {
        // ...1313 [1] 2121... : the standard heteroclinic corner
        let x0 = SpliceCode::periodic(&w("12"), 0);
        let x2 = SpliceCode::periodic(&w("13"), 0);
        let x1 = SpliceCode::bracket(&x0, &x2).unwrap();
        let view: Vec<Sym> = (-4..=4).map(|j| x1.symbol_at(j)).collect();
        assert_eq!(view, vec![1, 3, 1, 3, 1, 2, 1, 2, 1]);
        let shifted = x1.shifted(2);
        let view: Vec<Sym> = (-4..=4).map(|j| shifted.symbol_at(j)).collect();
        assert_eq!(view, vec![1, 3, 1, 2, 1, 2, 1, 2, 1]);
        let back = x1.shifted(-3);
        let view: Vec<Sym> = (-2..=6).map(|j| back.symbol_at(j)).collect();
        assert_eq!(view, vec![3, 1, 3, 1, 3, 1, 2, 1, 2]);
        // time reversal swaps the roles of the two cycles
        let rev = x1.reversed();
        let view: Vec<Sym> = (-4..=4).map(|j| rev.symbol_at(j)).collect();
        assert_eq!(view, vec![1, 2, 1, 2, 1, 3, 1, 3, 1]);
    }

    #[test]
    fn bracket_requires_shared_center() {
        let x0 = SpliceCode::periodic(&w("12"), 0);
        let x2 = SpliceCode::periodic(&w("13"), 1); // centered on obstacle 3
        assert!(SpliceCode::bracket(&x0, &x2).is_err());
    }

    #[test]
    fn bridge_words() {
        // tri6 standard layout: center 1, A = 21 repeated, center 3,
        // B = 13 repeated; empty bridge blocks
        let b1 = Bridge { minus: vec![], center: 1, plus: vec![] };
        let b3 = Bridge { minus: vec![], center: 3, plus: vec![] };
        for n in [1usize, 3] {
            let word = bridge_word(&w("21"), &w("13"), &b1, &b3, n).unwrap();
            assert_eq!(word.len(), 2 + 8 * n);
            assert!(is_admissible(&word, true));
        }
        let word = bridge_word(&w("21"), &w("13"), &b1, &b3, 1).unwrap();
        assert_eq!(word.to_string(), "1212131313");
        // n = 0 degenerates to the two centers
        let word = bridge_word(&w("21"), &w("13"), &b1, &b3, 0).unwrap();
        assert_eq!(word.to_string(), "13");
        // incompatible bridges are rejected
        let bad = Bridge { minus: vec![], center: 1, plus: vec![] };
        assert!(bridge_word(&w("21"), &w("13"), &b1, &bad, 0).is_err());
    }

    #[test]
    fn necklace_and_reversal() {
        assert_eq!(w("312").necklace().to_string(), "123");
        assert_eq!(w("1212").prime_period(), 2);
        assert!(w("1213").is_prime());
    }
}
