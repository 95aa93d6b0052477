//! Random substitutions and their static structural properties.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::word::{Alphabet, Letter, Word};

/// Default cap on the size of image sets produced by `apply` and `power`.
pub const DEFAULT_IMAGE_CAP: usize = 1_000_000;

/// Letter counts of a word, indexed by alphabet order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianVector(pub Vec<usize>);

/// Exact letter-count matrix of a compatible substitution:
/// `entries[i][j]` counts occurrences of letter `i` in any image of letter `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionMatrix {
    pub entries: Vec<Vec<usize>>,
}

/// A map from letters to finite nonempty sets of nonempty words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSubstitution {
    alphabet: Alphabet,
    /// Images per letter, sorted and deduplicated.
    rules: Vec<Vec<Word>>,
}

pub fn abelianise(u: &Word, d: usize) -> AbelianVector {
    let mut counts = vec![0usize; d];
    for l in u.letters() {
        counts[l.index()] += 1;
    }
    AbelianVector(counts)
}

impl RandomSubstitution {
    pub fn new(alphabet: Alphabet, rules: Vec<Vec<Word>>) -> Result<Self> {
        if rules.len() != alphabet.len() {
            return Err(Error::Syntax {
                line: 0,
                msg: format!(
                    "expected {} rules, got {}",
                    alphabet.len(),
                    rules.len()
                ),
            });
        }
        let mut sorted_rules = Vec::with_capacity(rules.len());
        for (i, images) in rules.into_iter().enumerate() {
            let letter = alphabet.symbol(Letter(i as u8));
            if images.is_empty() || images.iter().any(Word::is_empty) {
                return Err(Error::EmptyImage { letter });
            }
            let set: BTreeSet<Word> = images.into_iter().collect();
            sorted_rules.push(set.into_iter().collect());
        }
        Ok(RandomSubstitution {
            alphabet,
            rules: sorted_rules,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.alphabet.len()
    }

    /// The sorted image set of a letter.
    pub fn images(&self, l: Letter) -> &[Word] {
        &self.rules[l.index()]
    }

    pub fn max_image_len(&self) -> usize {
        self.rules
            .iter()
            .flat_map(|ws| ws.iter().map(Word::len))
            .max()
            .unwrap_or(0)
    }

    pub fn min_image_len(&self) -> usize {
        self.rules
            .iter()
            .flat_map(|ws| ws.iter().map(Word::len))
            .min()
            .unwrap_or(0)
    }

    /// Set concatenation of the image sets along `u`.
    pub fn apply(&self, u: &Word) -> Result<BTreeSet<Word>> {
        self.apply_capped(u, DEFAULT_IMAGE_CAP)
    }

    pub fn apply_capped(&self, u: &Word, cap: usize) -> Result<BTreeSet<Word>> {
        if u.is_empty() {
            return Err(Error::Precondition {
                msg: "apply requires a nonempty word".into(),
            });
        }
        let mut acc: BTreeSet<Word> = [Word::empty()].into();
        for &l in u.letters() {
            let mut next = BTreeSet::new();
            for prefix in &acc {
                for image in self.images(l) {
                    next.insert(prefix.concat(image));
                    if next.len() > cap {
                        return Err(Error::SizeLimit {
                            what: "image set of apply".into(),
                            limit: cap,
                        });
                    }
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// The p-th iterate as a substitution, with deduplicated image sets.
    pub fn power(&self, p: usize) -> Result<RandomSubstitution> {
        self.power_capped(p, DEFAULT_IMAGE_CAP)
    }

    pub fn power_capped(&self, p: usize, cap: usize) -> Result<RandomSubstitution> {
        if p == 0 {
            return Err(Error::Precondition {
                msg: "power requires p >= 1".into(),
            });
        }
        let mut current = self.clone();
        for _ in 1..p {
            let mut rules = Vec::with_capacity(self.dim());
            for l in self.alphabet.letters() {
                let mut set = BTreeSet::new();
                for w in current.images(l) {
                    for v in self.apply_capped(w, cap)? {
                        set.insert(v);
                        if set.len() > cap {
                            return Err(Error::SizeLimit {
                                what: "image set of power".into(),
                                limit: cap,
                            });
                        }
                    }
                }
                rules.push(set.into_iter().collect());
            }
            current = RandomSubstitution {
                alphabet: self.alphabet.clone(),
                rules,
            };
        }
        Ok(current)
    }

    pub fn abelianise(&self, u: &Word) -> AbelianVector {
        abelianise(u, self.dim())
    }

    /// All images of every letter have equal abelianisation; on failure,
    /// returns the letter and two offending images.
    pub fn compatibility_witness(&self) -> Option<(Letter, Word, Word)> {
        for l in self.alphabet.letters() {
            let images = self.images(l);
            let first = self.abelianise(&images[0]);
            for w in &images[1..] {
                if self.abelianise(w) != first {
                    return Some((l, images[0].clone(), w.clone()));
                }
            }
        }
        None
    }

    pub fn is_compatible(&self) -> bool {
        self.compatibility_witness().is_none()
    }

    pub fn substitution_matrix(&self) -> Result<SubstitutionMatrix> {
        if let Some((l, u, v)) = self.compatibility_witness() {
            return Err(Error::NotCompatible {
                letter: self.alphabet.symbol(l),
                left: self.alphabet.format(&u),
                right: self.alphabet.format(&v),
            });
        }
        let d = self.dim();
        let mut entries = vec![vec![0usize; d]; d];
        for j in 0..d {
            let counts = self.abelianise(&self.rules[j][0]);
            for i in 0..d {
                entries[i][j] = counts.0[i];
            }
        }
        Ok(SubstitutionMatrix { entries })
    }

    /// Occurrence digraph: `adj[j][i]` iff letter `i` occurs in some image
    /// of letter `j`. Its p-step closure has the positivity pattern of
    /// `M^p` for compatible substitutions and decides primitivity in general.
    fn occurrence_pattern(&self) -> Vec<Vec<bool>> {
        let d = self.dim();
        let mut adj = vec![vec![false; d]; d];
        for j in 0..d {
            for w in &self.rules[j] {
                for l in w.letters() {
                    adj[j][l.index()] = true;
                }
            }
        }
        adj
    }

    /// Smallest p with every letter occurring in some word of every
    /// `images^p` set, bounded by the Wielandt bound (d-1)^2 + 1.
    pub fn primitivity_power(&self) -> Option<usize> {
        let d = self.dim();
        let bound = (d - 1) * (d - 1) + 1;
        let adj = self.occurrence_pattern();
        let mut reach = adj.clone();
        for p in 1..=bound {
            if reach.iter().all(|row| row.iter().all(|&x| x)) {
                return Some(p);
            }
            // one more step: reach' = reach * adj (boolean product)
            let mut next = vec![vec![false; d]; d];
            for j in 0..d {
                for k in 0..d {
                    if reach[j][k] {
                        for i in 0..d {
                            if adj[k][i] {
                                next[j][i] = true;
                            }
                        }
                    }
                }
            }
            reach = next;
        }
        None
    }

    pub fn is_primitive(&self) -> bool {
        self.primitivity_power().is_some()
    }

    pub fn is_degenerate(&self) -> bool {
        self.rules.iter().all(|ws| ws.len() == 1)
    }

    /// The common image length, if all images of all letters agree.
    pub fn constant_length(&self) -> Option<usize> {
        let len = self.rules[0][0].len();
        for ws in &self.rules {
            for w in ws {
                if w.len() != len {
                    return None;
                }
            }
        }
        Some(len)
    }

    /// On failure, returns two letters and a word in both image sets.
    pub fn disjoint_images_witness(&self) -> Option<(Letter, Letter, Word)> {
        let d = self.dim();
        for i in 0..d {
            for j in (i + 1)..d {
                let set: BTreeSet<&Word> = self.rules[i].iter().collect();
                if let Some(shared) = self.rules[j].iter().find(|w| set.contains(w)) {
                    return Some((Letter(i as u8), Letter(j as u8), shared.clone()));
                }
            }
        }
        None
    }

    pub fn has_disjoint_letter_images(&self) -> bool {
        self.disjoint_images_witness().is_none()
    }

    /// Smallest p <= p_cap with a letter whose p-th image set has at least
    /// k elements, together with the first such letter in alphabet order.
    pub fn branching_witness(&self, k: usize, p_cap: usize) -> Result<Option<(Letter, usize)>> {
        let mut current = self.clone();
        for p in 1..=p_cap {
            for l in self.alphabet.letters() {
                if current.images(l).len() >= k {
                    return Ok(Some((l, p)));
                }
            }
            if p < p_cap {
                match current.power_step(self) {
                    Ok(next) => current = next,
                    Err(Error::SizeLimit { .. }) => return Ok(None),
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(None)
    }

    fn power_step(&self, base: &RandomSubstitution) -> Result<RandomSubstitution> {
        let mut rules = Vec::with_capacity(self.dim());
        for l in self.alphabet.letters() {
            let mut set = BTreeSet::new();
            for w in self.images(l) {
                set.extend(base.apply(w)?);
                if set.len() > DEFAULT_IMAGE_CAP {
                    return Err(Error::SizeLimit {
                        what: "image set of power".into(),
                        limit: DEFAULT_IMAGE_CAP,
                    });
                }
            }
            rules.push(set.into_iter().collect());
        }
        Ok(RandomSubstitution {
            alphabet: self.alphabet.clone(),
            rules,
        })
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.alphabet.format(w)
    }

    pub fn word(&self, s: &str) -> Result<Word> {
        self.alphabet.word(s)
    }
}

/// Parses the line-oriented spec format:
/// `alphabet: a b`, then one `X -> w1 | w2 | ...` line per letter.
/// `#` starts a comment; surrounding whitespace is ignored.
pub fn parse_substitution(text: &str) -> Result<RandomSubstitution> {
    let mut alphabet: Option<Alphabet> = None;
    let mut rules: Vec<Option<Vec<Word>>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("alphabet:") {
            if alphabet.is_some() {
                return Err(Error::Syntax {
                    line: line_no,
                    msg: "duplicate alphabet line".into(),
                });
            }
            let mut symbols = Vec::new();
            for token in rest.split_whitespace() {
                let mut chars = token.chars();
                let c = chars.next().unwrap();
                if chars.next().is_some() {
                    return Err(Error::Syntax {
                        line: line_no,
                        msg: format!("letter '{token}' must be a single character"),
                    });
                }
                symbols.push(c);
            }
            let al = Alphabet::new(symbols).map_err(|e| match e {
                Error::Syntax { msg, .. } => Error::Syntax { line: line_no, msg },
                other => other,
            })?;
            rules = vec![None; al.len()];
            alphabet = Some(al);
            continue;
        }
        let al = alphabet.as_ref().ok_or_else(|| Error::Syntax {
            line: line_no,
            msg: "rule line before alphabet line".into(),
        })?;
        let (lhs, rhs) = line.split_once("->").ok_or_else(|| Error::Syntax {
            line: line_no,
            msg: "expected 'X -> w1 | w2 | ...'".into(),
        })?;
        let lhs = lhs.trim();
        let mut lhs_chars = lhs.chars();
        let letter_char = lhs_chars.next().ok_or_else(|| Error::Syntax {
            line: line_no,
            msg: "missing letter before '->'".into(),
        })?;
        if lhs_chars.next().is_some() {
            return Err(Error::Syntax {
                line: line_no,
                msg: format!("rule left-hand side '{lhs}' must be a single letter"),
            });
        }
        let letter = al.letter_of(letter_char)?;
        if rules[letter.index()].is_some() {
            return Err(Error::Syntax {
                line: line_no,
                msg: format!("duplicate rule for '{letter_char}'"),
            });
        }
        let mut images = Vec::new();
        for part in rhs.split('|') {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::EmptyImage {
                    letter: letter_char,
                });
            }
            images.push(al.word(part)?);
        }
        rules[letter.index()] = Some(images);
    }
    let alphabet = alphabet.ok_or_else(|| Error::Syntax {
        line: 0,
        msg: "missing alphabet line".into(),
    })?;
    let mut complete = Vec::with_capacity(rules.len());
    for (i, r) in rules.into_iter().enumerate() {
        match r {
            Some(images) => complete.push(images),
            None => {
                return Err(Error::Syntax {
                    line: 0,
                    msg: format!(
                        "missing rule for letter '{}'",
                        alphabet.symbol(Letter(i as u8))
                    ),
                })
            }
        }
    }
    RandomSubstitution::new(alphabet, complete)
}

impl std::str::FromStr for RandomSubstitution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_substitution(s)
    }
}
