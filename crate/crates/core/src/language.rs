//! Legal language enumeration and derived queries.
//!
//! A word is legal when it occurs in some realisation of some power of the
//! substitution applied to a letter. We compute the legal words of length
//! at most n as a least fixpoint: seed with the alphabet and repeatedly add
//! the short subwords of realisations of one more inflation step. Applying
//! the step to a word w only requires the spanning subwords of realisations
//! of ϑ(w) (those meeting both the first and last image), because every
//! other subword spans a proper subword of w and the set is kept closed
//! under taking subwords.

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::substitution::RandomSubstitution;
use crate::word::{Letter, Word};

/// Cap on the number of stored legal words per closure computation.
pub const DEFAULT_LANGUAGE_CAP: usize = 4_000_000;

/// The legal words of one fixed length, with the inflation power at which
/// the enumerating fixpoint closed.
#[derive(Debug, Clone)]
pub struct LanguageSlice {
    pub n: usize,
    pub words: BTreeSet<Word>,
    pub stabilisation: usize,
}

/// Subword-closed set of all legal words of length <= max_len.
#[derive(Debug)]
struct Closure {
    max_len: usize,
    words: BTreeSet<Word>,
    stabilisation: usize,
}

/// Legality oracle for one primitive substitution, with a cached closure.
#[derive(Debug)]
pub struct Language {
    sub: RandomSubstitution,
    cap: usize,
    closure: Mutex<Option<Arc<Closure>>>,
}

impl Language {
    pub fn new(sub: RandomSubstitution) -> Result<Self> {
        Self::with_cap(sub, DEFAULT_LANGUAGE_CAP)
    }

    pub fn with_cap(sub: RandomSubstitution, cap: usize) -> Result<Self> {
        if !sub.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        Ok(Language {
            sub,
            cap,
            closure: Mutex::new(None),
        })
    }

    pub fn substitution(&self) -> &RandomSubstitution {
        &self.sub
    }

    fn closure_at_least(&self, n: usize) -> Result<Arc<Closure>> {
        let mut guard = self.closure.lock().unwrap();
        if let Some(c) = guard.as_ref() {
            if c.max_len >= n {
                return Ok(Arc::clone(c));
            }
        }
        let fresh = Arc::new(self.compute_closure(n)?);
        *guard = Some(Arc::clone(&fresh));
        Ok(fresh)
    }

    fn compute_closure(&self, n: usize) -> Result<Closure> {
        let mut words: BTreeSet<Word> = BTreeSet::new();
        let mut frontier: Vec<Word> = Vec::new();
        for l in self.sub.alphabet().letters() {
            let w = Word::single(l);
            words.insert(w.clone());
            frontier.push(w);
        }
        let mut stabilisation = 0;
        let mut round = 0;
        while !frontier.is_empty() {
            round += 1;
            let mut next_frontier = Vec::new();
            for w in &frontier {
                for produced in self.spanning_subwords(w, n)? {
                    self.insert_closed(produced, n, &mut words, &mut next_frontier)?;
                }
            }
            if !next_frontier.is_empty() {
                stabilisation = round;
            }
            frontier = next_frontier;
        }
        Ok(Closure {
            max_len: n,
            words,
            stabilisation,
        })
    }

    /// Inserts `w` and all of its subwords of length <= n, recording genuinely
    /// new words in `fresh`.
    fn insert_closed(
        &self,
        w: Word,
        n: usize,
        words: &mut BTreeSet<Word>,
        fresh: &mut Vec<Word>,
    ) -> Result<()> {
        debug_assert!(w.len() <= n);
        let mut stack = vec![w];
        while let Some(v) = stack.pop() {
            if v.is_empty() || words.contains(&v) {
                continue;
            }
            words.insert(v.clone());
            if words.len() > self.cap {
                return Err(Error::SizeLimit {
                    what: "legal word closure".into(),
                    limit: self.cap,
                });
            }
            if v.len() > 1 {
                stack.push(v.slice(0, v.len() - 1));
                stack.push(v.slice(1, v.len()));
            }
            fresh.push(v);
        }
        Ok(())
    }

    /// All subwords of realisations of ϑ(w) of length <= n that meet both the
    /// first and the last image (for |w| = 1, all subwords of the images;
    /// only inclusion-maximal words are produced, shorter ones being covered
    /// by the caller's subword closure).
    fn spanning_subwords(&self, w: &Word, n: usize) -> Result<Vec<Word>> {
        let letters = w.letters();
        if letters.len() >= 2
            && (letters.len() - 2) * self.sub.min_image_len() + 2 > n
        {
            return Ok(Vec::new());
        }
        if letters.len() == 1 {
            let mut out = Vec::new();
            for image in self.sub.images(letters[0]) {
                if image.len() <= n {
                    out.push(image.clone());
                } else {
                    for start in 0..=(image.len() - n) {
                        out.push(image.slice(start, start + n));
                    }
                }
            }
            return Ok(out);
        }
        // Partial words: a suffix of one image of the first letter followed
        // by full images of the interior letters, deduplicated per stage and
        // pruned at length n.
        let mut partials: BTreeSet<Word> = BTreeSet::new();
        for image in self.sub.images(letters[0]) {
            for start in 0..image.len() {
                let suffix = image.slice(start, image.len());
                if suffix.len() <= n {
                    partials.insert(suffix);
                }
            }
        }
        for &l in &letters[1..letters.len() - 1] {
            let mut next = BTreeSet::new();
            for p in &partials {
                for image in self.sub.images(l) {
                    if p.len() + image.len() <= n {
                        next.insert(p.concat(image));
                    }
                    if next.len() > self.cap {
                        return Err(Error::SizeLimit {
                            what: "spanning subword enumeration".into(),
                            limit: self.cap,
                        });
                    }
                }
            }
            partials = next;
            if partials.is_empty() {
                return Ok(Vec::new());
            }
        }
        let mut out = Vec::new();
        for p in &partials {
            for image in self.sub.images(letters[letters.len() - 1]) {
                let take = image.len().min(n - p.len());
                if take >= 1 {
                    out.push(p.concat(&image.slice(0, take)));
                }
            }
        }
        Ok(out)
    }

    pub fn legal_words(&self, n: usize) -> Result<LanguageSlice> {
        if n == 0 {
            return Err(Error::Precondition {
                msg: "legal_words requires n >= 1".into(),
            });
        }
        let closure = self.closure_at_least(n)?;
        let words = closure
            .words
            .iter()
            .filter(|w| w.len() == n)
            .cloned()
            .collect();
        Ok(LanguageSlice {
            n,
            words,
            stabilisation: closure.stabilisation,
        })
    }

    pub fn is_legal(&self, u: &Word) -> Result<bool> {
        if u.is_empty() {
            return Ok(true);
        }
        let closure = self.closure_at_least(u.len())?;
        Ok(closure.words.contains(u))
    }

    /// Smallest m <= m_max with every legal m-word containing the letter.
    pub fn letter_gap_bound(&self, a: Letter, m_max: usize) -> Result<Option<usize>> {
        self.word_gap_bound(&Word::single(a), m_max)
    }

    /// Smallest m <= m_max with every legal m-word containing u as a subword.
    ///
    /// The predicate "no legal m-word avoids u" is monotone in m (an avoider
    /// of length m contains avoiders of every smaller length), so the answer
    /// is found by binary search over a single existence test per probe.
    pub fn word_gap_bound(&self, u: &Word, m_max: usize) -> Result<Option<usize>> {
        if u.is_empty() {
            return Ok(Some(1));
        }
        if m_max < u.len() || self.avoider_exists(u, m_max)? {
            return Ok(None);
        }
        let mut lo = u.len();
        let mut hi = m_max;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.avoider_exists(u, mid)? {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        Ok(Some(lo))
    }

    /// Whether some legal word of length m avoids u.
    ///
    /// Every legal m-word is a length-m window of a realisation of ϑ(w) for
    /// some legal parent w just long enough for its inflation to carry the
    /// window, so for expanding substitutions the search only enumerates the
    /// parent language at roughly half the length and explores realisations
    /// by depth-first search, pruning branches in which no window clear of u
    /// can still fit.
    fn avoider_exists(&self, u: &Word, m: usize) -> Result<bool> {
        if u.len() > m {
            return Ok(true);
        }
        let min = self.sub.min_image_len();
        let parent_len = if min >= 2 {
            (m.saturating_sub(2)) / min + 2
        } else {
            usize::MAX
        };
        if parent_len >= m {
            let slice = self.legal_words(m)?;
            return Ok(slice.words.iter().any(|w| !w.contains(u)));
        }
        for parent in &self.legal_words(parent_len)?.words {
            if self.window_avoider_in(parent, u, m) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether some realisation of ϑ(parent) has a length-m window avoiding u.
    fn window_avoider_in(&self, parent: &Word, u: &Word, m: usize) -> bool {
        let letters = parent.letters();
        // max_tail[i]: most letters the images of letters[i..] can still add
        let mut max_tail = vec![0usize; letters.len() + 1];
        for i in (0..letters.len()).rev() {
            let longest = self
                .sub
                .images(letters[i])
                .iter()
                .map(Word::len)
                .max()
                .unwrap_or(0);
            max_tail[i] = max_tail[i + 1] + longest;
        }
        let mut r: Vec<Letter> = Vec::new();
        self.avoider_dfs(letters, 0, &mut r, 0, u, m, &max_tail)
    }

    fn avoider_dfs(
        &self,
        letters: &[Letter],
        i: usize,
        r: &mut Vec<Letter>,
        min_start: usize,
        u: &Word,
        m: usize,
        max_tail: &[usize],
    ) -> bool {
        if r.len() >= min_start + m {
            return true;
        }
        if i == letters.len() || min_start + m > r.len() + max_tail[i] {
            return false;
        }
        for image in self.sub.images(letters[i]) {
            let old_len = r.len();
            r.extend_from_slice(image.letters());
            // occurrences of u ending inside the appended image invalidate
            // every window start at or before their own start
            let mut start = min_start;
            let from = (old_len + 1).max(u.len());
            for end in from..=r.len() {
                if r[end - u.len()..end] == u.0[..] {
                    start = start.max(end - u.len() + 1);
                }
            }
            let found = self.avoider_dfs(letters, i + 1, r, start, u, m, max_tail);
            r.truncate(old_len);
            if found {
                return true;
            }
        }
        false
    }

    /// Primitive-period words w with |w| <= p_max whose powers w^k stay legal
    /// for all k <= k_max, reported as lexicographically least rotations.
    /// Passing the probe is evidence, not proof, that w repeats forever in
    /// some element of the subshift.
    pub fn periodic_candidates(&self, p_max: usize, k_max: usize) -> Result<Vec<Word>> {
        let k = k_max.max(1);
        if p_max >= 1 {
            self.closure_at_least(p_max * k)?;
        }
        let mut seen = BTreeSet::new();
        for len in 1..=p_max {
            for w in self.legal_words(len)?.words {
                if w.is_proper_power() {
                    continue;
                }
                let canonical = w.canonical_rotation();
                if seen.contains(&canonical) {
                    continue;
                }
                // Legality is closed under subwords, so only the largest
                // power needs checking.
                if self.is_legal(&canonical.repeat(k))? {
                    seen.insert(canonical);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }
}

/// Deterministic sample of legal words of a fixed length, drawn as windows
/// of random realisations of iterated images. Cheaper than enumerating the
/// language at lengths where the full slice is out of reach; the result may
/// contain repeats.
pub fn sample_legal_words(
    sub: &RandomSubstitution,
    len: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Word>> {
    if len == 0 {
        return Err(Error::TooShort { len: 0, radius: 0 });
    }
    // splitmix-style scramble so that nearby seeds give unrelated streams
    let mut state = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    state = (state ^ (state >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    state = (state ^ (state >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    state = (state ^ (state >> 31)) | 1;
    let mut next = move || {
        // xorshift64*, fixed stream so runs are reproducible
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        state = state.wrapping_mul(0x2545_F491_4F6C_DD1D);
        state
    };
    let letters: Vec<Letter> = sub.alphabet().letters().collect();
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let mut w = Word::single(letters[k % letters.len()]);
        let mut rounds = 0;
        while w.len() < len + sub.max_image_len() {
            let mut image = Vec::new();
            for &l in w.letters() {
                let choices = sub.images(l);
                let pick = &choices[(next() % choices.len() as u64) as usize];
                image.extend_from_slice(&pick.0);
            }
            w = Word(image);
            rounds += 1;
            // primitive rules grow within dim() rounds; 64 leaves headroom
            // and still cuts off degenerate non-growing inputs
            if rounds > 64 {
                return Err(Error::SizeLimit {
                    what: "sampled realisation".into(),
                    limit: len,
                });
            }
        }
        let start = (next() % (w.len() - len + 1) as u64) as usize;
        out.push(w.slice(start, start + len));
    }
    Ok(out)
}
