//! Automorphism constructions compiled to executable sliding block codes.
//!
//! A sliding block code is a translation-invariant map given by a local
//! rule of finite radius r: the output letter at a position is a function
//! of the (2r+1)-window around it. All constructions here (shuffles, the
//! full shift embedding, marker automorphisms, the conveyor belt) are
//! compiled down to such rules and then verified on finite windows; the
//! bi-infinite maps themselves are never represented.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::decomposition::{decompositions, Decomposition};
use crate::error::{Error, Result};
use crate::language::{sample_legal_words, Language};
use crate::recognisability::{local_radius, word_radius};
use crate::substitution::RandomSubstitution;
use crate::word::{Alphabet, Letter, Word};

type Rule = Arc<dyn Fn(&[Letter]) -> Result<Letter> + Send + Sync>;

#[derive(Clone)]
enum Backing {
    /// Explicit window table; lookups outside the table are illegal input.
    Table(Arc<BTreeMap<Word, Letter>>),
    /// Rule evaluated on demand. Used where the window table would be too
    /// large to enumerate (large radii over fast-growing languages).
    Procedural(Rule),
}

/// A local rule of radius r, applied to (2r+1)-windows.
#[derive(Clone)]
pub struct SlidingBlockCode {
    radius: usize,
    provenance: String,
    backing: Backing,
}

impl fmt::Debug for SlidingBlockCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SlidingBlockCode")
            .field("radius", &self.radius)
            .field("provenance", &self.provenance)
            .finish()
    }
}

/// A word read as the bi-infinite periodic sequence ...www... ; finite
/// stand-in for a periodic subshift element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CyclicConfiguration {
    pub word: Word,
}

impl CyclicConfiguration {
    pub fn new(word: Word) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::TooShort { len: 0, radius: 0 });
        }
        Ok(CyclicConfiguration { word })
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    pub fn letter_at(&self, i: isize) -> Letter {
        let p = self.period() as isize;
        self.word.0[i.rem_euclid(p) as usize]
    }

    pub fn rotate(&self, k: usize) -> CyclicConfiguration {
        CyclicConfiguration {
            word: self.word.rotation(k),
        }
    }
}

impl SlidingBlockCode {
    pub fn identity(radius: usize) -> SlidingBlockCode {
        SlidingBlockCode {
            radius,
            provenance: "identity".into(),
            backing: Backing::Procedural(Arc::new(move |w: &[Letter]| Ok(w[radius]))),
        }
    }

    pub fn from_table(table: BTreeMap<Word, Letter>, provenance: &str) -> Result<SlidingBlockCode> {
        let Some(first) = table.keys().next() else {
            return Err(Error::Precondition {
                msg: "code table is empty".into(),
            });
        };
        let len = first.len();
        if len % 2 == 0 {
            return Err(Error::Precondition {
                msg: "code windows must have odd length".into(),
            });
        }
        if table.keys().any(|k| k.len() != len) {
            return Err(Error::Precondition {
                msg: "code windows must all have the same length".into(),
            });
        }
        Ok(SlidingBlockCode {
            radius: len / 2,
            provenance: provenance.into(),
            backing: Backing::Table(Arc::new(table)),
        })
    }

    fn procedural(radius: usize, provenance: String, rule: Rule) -> SlidingBlockCode {
        SlidingBlockCode {
            radius,
            provenance,
            backing: Backing::Procedural(rule),
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Evaluate the rule on one window of length exactly 2r+1.
    pub fn eval(&self, window: &[Letter]) -> Result<Letter> {
        debug_assert_eq!(window.len(), 2 * self.radius + 1);
        match &self.backing {
            Backing::Table(t) => {
                t.get(&Word(window.to_vec()))
                    .copied()
                    .ok_or_else(|| Error::IllegalInput {
                        window: format!("{:?}", window.iter().map(|l| l.0).collect::<Vec<_>>()),
                    })
            }
            Backing::Procedural(r) => r(window),
        }
    }

    /// Apply the rule to every fully-covered position, shrinking the word
    /// by r letters on each side.
    pub fn apply_central(&self, w: &Word) -> Result<Word> {
        let span = 2 * self.radius + 1;
        if w.len() < span {
            return Err(Error::TooShort {
                len: w.len(),
                radius: self.radius,
            });
        }
        let mut out = Vec::with_capacity(w.len() - 2 * self.radius);
        for i in 0..=w.len() - span {
            out.push(self.eval(&w.0[i..i + span])?);
        }
        Ok(Word(out))
    }

    /// Apply the rule to a periodic configuration, reading windows with
    /// wraparound. The output has the same period.
    pub fn apply_cyclic(&self, cfg: &CyclicConfiguration) -> Result<CyclicConfiguration> {
        let p = cfg.period();
        let span = 2 * self.radius + 1;
        let mut out = Vec::with_capacity(p);
        for i in 0..p {
            let mut window = Vec::with_capacity(span);
            for d in -(self.radius as isize)..=(self.radius as isize) {
                window.push(cfg.letter_at(i as isize + d));
            }
            out.push(self.eval(&window)?);
        }
        CyclicConfiguration::new(Word(out))
    }

    /// The composite self after inner, of radius r_self + r_inner.
    pub fn compose(&self, inner: &SlidingBlockCode) -> SlidingBlockCode {
        let outer = self.clone();
        let inner = inner.clone();
        let radius = outer.radius + inner.radius;
        let span_inner = 2 * inner.radius + 1;
        SlidingBlockCode::procedural(
            radius,
            format!("({}) o ({})", outer.provenance, inner.provenance),
            Arc::new(move |w: &[Letter]| {
                let mut mid = Vec::with_capacity(2 * outer.radius + 1);
                for i in 0..=w.len() - span_inner {
                    mid.push(inner.eval(&w[i..i + span_inner])?);
                }
                outer.eval(&mid)
            }),
        )
    }

    /// Tabulate the rule over every legal window.
    pub fn table(&self, lang: &Language) -> Result<BTreeMap<Word, Letter>> {
        if let Backing::Table(t) = &self.backing {
            return Ok((**t).clone());
        }
        let mut out = BTreeMap::new();
        for w in &lang.legal_words(2 * self.radius + 1)?.words {
            out.insert(w.clone(), self.eval(&w.0)?);
        }
        Ok(out)
    }

    /// Rebuild the code as an explicit window table over the legal language.
    pub fn materialise(&self, lang: &Language) -> Result<SlidingBlockCode> {
        Ok(SlidingBlockCode {
            radius: self.radius,
            provenance: self.provenance.clone(),
            backing: Backing::Table(Arc::new(self.table(lang)?)),
        })
    }

    /// Text form: one "window -> letter" line per legal window, sorted.
    pub fn export(&self, lang: &Language) -> Result<String> {
        let alphabet = lang.substitution().alphabet();
        let mut out = String::new();
        for (w, l) in self.table(lang)? {
            out.push_str(&alphabet.format(&w));
            out.push_str(" -> ");
            out.push_str(&alphabet.format(&Word::single(l)));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn import(alphabet: &Alphabet, text: &str, provenance: &str) -> Result<SlidingBlockCode> {
        let mut table = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let Some((lhs, rhs)) = line.split_once("->") else {
                return Err(Error::Syntax {
                    line: i + 1,
                    msg: "expected 'window -> letter'".into(),
                });
            };
            let window = alphabet.word(lhs.trim())?;
            let out = alphabet.word(rhs.trim())?;
            if out.len() != 1 {
                return Err(Error::Syntax {
                    line: i + 1,
                    msg: "rule output must be a single letter".into(),
                });
            }
            table.insert(window, out.0[0]);
        }
        SlidingBlockCode::from_table(table, provenance)
    }
}

/// A reversible local rule over an abstract index alphabet {0, .., n-1},
/// used to act on the realisation indices of inflation words rather than
/// on subshift letters directly.
#[derive(Debug, Clone)]
pub struct IndexCode {
    symbols: usize,
    radius: usize,
    table: Arc<BTreeMap<Vec<usize>, usize>>,
}

impl IndexCode {
    fn build(
        symbols: usize,
        radius: usize,
        f: impl Fn(&[usize]) -> usize,
    ) -> Result<IndexCode> {
        if symbols < 2 {
            return Err(Error::Precondition {
                msg: "index codes need at least two symbols".into(),
            });
        }
        let len = 2 * radius + 1;
        if symbols.pow(len as u32) > 1 << 20 {
            return Err(Error::SizeLimit {
                what: "index code table".into(),
                limit: 1 << 20,
            });
        }
        let mut table = BTreeMap::new();
        let mut window = vec![0usize; len];
        loop {
            let out = f(&window);
            debug_assert!(out < symbols);
            table.insert(window.clone(), out);
            // odometer step through all windows
            let mut i = 0;
            loop {
                if i == len {
                    return Ok(IndexCode {
                        symbols,
                        radius,
                        table: Arc::new(table),
                    });
                }
                window[i] += 1;
                if window[i] < symbols {
                    break;
                }
                window[i] = 0;
                i += 1;
            }
        }
    }

    pub fn identity(symbols: usize) -> Result<IndexCode> {
        IndexCode::build(symbols, 0, |w| w[0])
    }

    pub fn from_permutation(perm: &[usize]) -> Result<IndexCode> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::BadPermutation {
                    msg: format!("{perm:?} is not a bijection"),
                });
            }
            seen[p] = true;
        }
        let perm = perm.to_vec();
        IndexCode::build(n, 0, move |w| perm[w[0]])
    }

    /// The shift itself: output at a position is its right neighbour.
    pub fn shift_left(symbols: usize) -> Result<IndexCode> {
        IndexCode::build(symbols, 1, |w| w[2])
    }

    pub fn shift_right(symbols: usize) -> Result<IndexCode> {
        IndexCode::build(symbols, 1, |w| w[0])
    }

    pub fn complement() -> Result<IndexCode> {
        IndexCode::from_permutation(&[1, 0])
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn apply(&self, window: &[usize]) -> usize {
        self.table[window]
    }

    /// Apply the rule to a circular word, windows wrapping around.
    pub fn apply_cyclic(&self, cycle: &[usize]) -> Vec<usize> {
        let p = cycle.len() as isize;
        (0..cycle.len())
            .map(|i| {
                let window: Vec<usize> = (-(self.radius as isize)..=self.radius as isize)
                    .map(|d| cycle[(i as isize + d).rem_euclid(p) as usize])
                    .collect();
                self.apply(&window)
            })
            .collect()
    }

    /// Whether self and other invert each other on all index windows.
    pub fn inverts(&self, other: &IndexCode) -> bool {
        for (f, g) in [(self, other), (other, self)] {
            let r = f.radius + g.radius;
            let len = 2 * r + 1;
            let mut window = vec![0usize; len];
            'windows: loop {
                let mid: Vec<usize> = (0..2 * f.radius + 1)
                    .map(|i| g.apply(&window[i..i + 2 * g.radius + 1]))
                    .collect();
                if f.apply(&mid) != window[r] {
                    return false;
                }
                let mut i = 0;
                loop {
                    if i == len {
                        break 'windows;
                    }
                    window[i] += 1;
                    if window[i] < self.symbols {
                        break;
                    }
                    window[i] = 0;
                    i += 1;
                }
            }
        }
        true
    }
}

/// A level-n shuffle: permute the realisations of the level-n inflation
/// words of one letter, in place.
#[derive(Debug, Clone)]
pub struct ShuffleSpec {
    pub level: usize,
    pub letter: Letter,
    /// Permutation of the sorted list of level-n images of the letter,
    /// image i being replaced by image perm[i].
    pub perm: Vec<usize>,
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::BadPermutation {
            msg: format!("permutation of length {} over {} images", perm.len(), n),
        });
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::BadPermutation {
                msg: format!("{perm:?} is not a bijection"),
            });
        }
        seen[p] = true;
    }
    Ok(())
}

/// The piece of a decomposition containing one position, when every
/// decomposition of the window agrees on it: (piece start, piece, root
/// letter). Only full images count; windows that leave the piece undetermined
/// yield None.
fn determined_piece(
    lang: &Language,
    window: &Word,
    pos: usize,
) -> Result<Option<(usize, Word, Letter)>> {
    let ds = match decompositions(lang, window) {
        Ok(ds) => ds,
        Err(Error::NotLegal { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let sub = lang.substitution();
    let mut agreed: Option<(usize, Word, Letter)> = None;
    for d in &ds {
        let mut start = 0;
        let last = d.pieces.len() - 1;
        for (k, piece) in d.pieces.iter().enumerate() {
            let end = start + piece.len();
            if start <= pos && pos < end {
                let full =
                    (k > 0 || d.first_is_exact(sub)) && (k < last || d.last_is_exact(sub));
                if !full {
                    return Ok(None);
                }
                let item = (start, piece.clone(), d.root.0[k]);
                match &agreed {
                    None => agreed = Some(item),
                    Some(prev) if *prev == item => {}
                    Some(_) => return Ok(None),
                }
                break;
            }
            start = end;
        }
    }
    Ok(agreed)
}

/// All fully-determined full-image pieces of the window inside positions
/// [lo, hi]: present with identical boundaries, content and root letter in
/// every decomposition of the window.
fn determined_pieces(
    lang: &Language,
    window: &Word,
    lo: usize,
    hi: usize,
) -> Result<Option<Vec<(usize, Word, Letter)>>> {
    let ds = match decompositions(lang, window) {
        Ok(ds) => ds,
        Err(Error::NotLegal { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let sub = lang.substitution();
    let mut agreed: Option<Vec<(usize, Word, Letter)>> = None;
    for d in &ds {
        let full = full_pieces(d, sub, lo, hi);
        match &agreed {
            None => agreed = Some(full),
            Some(prev) if *prev == full => {}
            Some(_) => return Ok(None),
        }
    }
    Ok(agreed)
}

fn full_pieces(
    d: &Decomposition,
    sub: &RandomSubstitution,
    lo: usize,
    hi: usize,
) -> Vec<(usize, Word, Letter)> {
    let mut out = Vec::new();
    let mut start = 0;
    let last = d.pieces.len() - 1;
    for (k, piece) in d.pieces.iter().enumerate() {
        let end = start + piece.len();
        let interior = (k > 0 || d.first_is_exact(sub)) && (k < last || d.last_is_exact(sub));
        if interior && start >= lo && end <= hi + 1 {
            out.push((start, piece.clone(), d.root.0[k]));
        }
        start = end;
    }
    out
}

/// Compile a shuffle into an explicit window table.
///
/// The radius is N' + 2 L_n, where N' certifies local recognisability of
/// the level-n power and L_n bounds level-n image lengths: enough context
/// to pin down the inflation word containing the window centre.
pub fn compile_shuffle(
    lang: &Language,
    spec: &ShuffleSpec,
    n_max: usize,
) -> Result<SlidingBlockCode> {
    let sub = lang.substitution();
    if spec.level == 0 {
        return Err(Error::Precondition {
            msg: "shuffle level must be at least 1".into(),
        });
    }
    let theta = sub.power(spec.level)?;
    let theta_lang = Language::new(theta.clone())?;
    let verdict = local_radius(&theta_lang, n_max)?;
    let Some(n_prime) = verdict.radius else {
        return Err(Error::NotRecognisable {
            msg: format!(
                "level-{} power not certified locally recognisable within radius {}",
                spec.level, n_max
            ),
        });
    };
    let images: Vec<Word> = theta.images(spec.letter).to_vec();
    check_permutation(&spec.perm, images.len())?;
    for (i, &p) in spec.perm.iter().enumerate() {
        if images[i].len() != images[p].len() {
            return Err(Error::LengthChangingPermutation {
                left: theta.format_word(&images[i]),
                right: theta.format_word(&images[p]),
            });
        }
    }
    let radius = n_prime + 2 * theta.max_image_len();
    let mut table = BTreeMap::new();
    for w in &lang.legal_words(2 * radius + 1)?.words {
        let out = match determined_piece(&theta_lang, w, radius)? {
            Some((start, piece, root)) if root == spec.letter => {
                // a full image of the shuffled letter: rewrite in place
                let idx = images
                    .iter()
                    .position(|im| *im == piece)
                    .expect("full image is in the image list");
                images[spec.perm[idx]].0[radius - start]
            }
            _ => w.0[radius],
        };
        table.insert(w.clone(), out);
    }
    Ok(SlidingBlockCode {
        radius,
        provenance: format!(
            "shuffle level {} letter {} perm {:?}",
            spec.level,
            sub.alphabet().symbol(spec.letter),
            spec.perm
        ),
        backing: Backing::Table(Arc::new(table)),
    })
}

/// Compile the full shift embedding: act on the realisation indices of the
/// type-a inflation words by a reversible index code.
///
/// Procedural: the radius N' + (r_alpha + 1)(M + L_1) is too large to
/// tabulate over fast-growing languages, so windows are decomposed on
/// demand.
pub fn compile_full_shift_embedding(
    lang: Arc<Language>,
    a: Letter,
    alpha: &IndexCode,
    n_max: usize,
    gap_cap: usize,
) -> Result<SlidingBlockCode> {
    let sub = lang.substitution();
    if !sub.is_compatible() {
        return Err(Error::Precondition {
            msg: "embedding requires a compatible substitution".into(),
        });
    }
    if sub.is_degenerate() {
        return Err(Error::Precondition {
            msg: "embedding requires a non-degenerate substitution".into(),
        });
    }
    let images: Vec<Word> = sub.images(a).to_vec();
    if images.len() < 2 {
        return Err(Error::Precondition {
            msg: "embedding needs at least two images of the chosen letter".into(),
        });
    }
    if alpha.symbols() != images.len() {
        return Err(Error::Precondition {
            msg: format!(
                "index code over {} symbols against {} images",
                alpha.symbols(),
                images.len()
            ),
        });
    }
    let verdict = local_radius(&lang, n_max)?;
    let Some(n_prime) = verdict.radius else {
        return Err(Error::NotRecognisable {
            msg: format!("not certified locally recognisable within radius {n_max}"),
        });
    };
    let Some(gap) = lang.letter_gap_bound(a, gap_cap)? else {
        return Err(Error::GapUnbounded { cap: gap_cap });
    };
    // consecutive type-a inflation words are separated by images of at most
    // gap-1 letters
    let l1 = sub.max_image_len();
    let block_span = (gap - 1) * l1 + l1;
    let radius = n_prime + (alpha.radius() + 1) * block_span;
    let alpha = alpha.clone();
    let provenance = format!(
        "full shift embedding letter {} (radius {})",
        sub.alphabet().symbol(a),
        radius
    );
    let rule = Arc::new(move |w: &[Letter]| {
        let window = Word(w.to_vec());
        let center = radius;
        let Some(pieces) = determined_pieces(&lang, &window, n_prime, 2 * radius - n_prime)?
        else {
            return Ok(w[center]);
        };
        let of_type: Vec<&(usize, Word, Letter)> =
            pieces.iter().filter(|(_, _, root)| *root == a).collect();
        let Some(q) = of_type
            .iter()
            .position(|(start, piece, _)| *start <= center && center < start + piece.len())
        else {
            return Ok(w[center]);
        };
        let ra = alpha.radius();
        if q < ra || q + ra >= of_type.len() {
            // not enough index context survived the window edges
            return Ok(w[center]);
        }
        let images_sorted = lang.substitution().images(a);
        let idx_window: Vec<usize> = of_type[q - ra..=q + ra]
            .iter()
            .map(|(_, piece, _)| {
                images_sorted
                    .iter()
                    .position(|im| im == piece)
                    .expect("full image is in the image list")
            })
            .collect();
        let new = alpha.apply(&idx_window);
        let (start, _, _) = *of_type[q];
        Ok(images_sorted[new].0[center - start])
    });
    Ok(SlidingBlockCode::procedural(radius, provenance, rule))
}

/// Gap words grouped by the unique root of their marker block, plus the
/// gap words whose block decomposes with more than one root.
#[derive(Debug, Clone)]
pub struct MarkerReport {
    pub grouped: BTreeMap<Word, Vec<Word>>,
    pub ungrouped: Vec<Word>,
}

/// All v of the given length with u v u legal and exactly two occurrences
/// of u, grouped by the unique common root of u v u.
pub fn find_markers(
    lang: &Language,
    u: &Word,
    n: usize,
    u_radius: usize,
) -> Result<MarkerReport> {
    let sub = lang.substitution();
    if sub.constant_length().is_none() {
        return Err(Error::Precondition {
            msg: "marker search requires a constant length substitution".into(),
        });
    }
    if !sub.is_compatible() {
        return Err(Error::Precondition {
            msg: "marker search requires a compatible substitution".into(),
        });
    }
    if !sub.has_disjoint_letter_images() {
        return Err(Error::Precondition {
            msg: "marker search requires disjoint letter images".into(),
        });
    }
    if word_radius(lang, u, u_radius)?.radius.is_none() {
        return Err(Error::NotRecognisable {
            msg: format!(
                "marker word {} not certified within radius {}",
                sub.format_word(u),
                u_radius
            ),
        });
    }
    let mut grouped: BTreeMap<Word, Vec<Word>> = BTreeMap::new();
    let mut ungrouped = Vec::new();
    for w in &lang.legal_words(2 * u.len() + n)?.words {
        if !w.starts_with(u) || !w.ends_with(u) || w.count_occurrences(u) != 2 {
            continue;
        }
        let v = w.slice(u.len(), u.len() + n);
        let mut roots = decompositions(lang, w)?
            .into_iter()
            .map(|d| d.root)
            .collect::<std::collections::BTreeSet<_>>();
        if roots.len() == 1 {
            grouped.entry(roots.pop_first().unwrap()).or_default().push(v);
        } else {
            ungrouped.push(v);
        }
    }
    Ok(MarkerReport { grouped, ungrouped })
}

/// Rewrite occurrences of u v_i u to u v_perm(i) u between two copies of a
/// recognisable marker word u.
#[derive(Debug, Clone)]
pub struct MarkerSpec {
    pub u: Word,
    /// Radius at which u is certified recognisable.
    pub u_radius: usize,
    pub gaps: Vec<Word>,
    pub perm: Vec<usize>,
}

pub fn compile_marker_automorphism(
    lang: &Language,
    spec: &MarkerSpec,
) -> Result<SlidingBlockCode> {
    let sub = lang.substitution();
    let u = spec.u.clone();
    if spec.gaps.is_empty() {
        return Err(Error::Precondition {
            msg: "marker automorphism needs at least one gap word".into(),
        });
    }
    let n_k = spec.gaps[0].len();
    if spec.gaps.iter().any(|v| v.len() != n_k) {
        return Err(Error::Precondition {
            msg: "gap words must share one length".into(),
        });
    }
    for (i, v) in spec.gaps.iter().enumerate() {
        if spec.gaps[..i].contains(v) {
            return Err(Error::Precondition {
                msg: format!("duplicate gap word {}", sub.format_word(v)),
            });
        }
    }
    check_permutation(&spec.perm, spec.gaps.len())?;
    if word_radius(lang, &u, spec.u_radius)?.radius.is_none() {
        return Err(Error::NotRecognisable {
            msg: format!(
                "marker word {} not certified within radius {}",
                sub.format_word(&u),
                spec.u_radius
            ),
        });
    }
    let blocks: Vec<Word> = spec
        .gaps
        .iter()
        .map(|v| u.concat(v).concat(&u))
        .collect();
    let mut common_root: Option<Word> = None;
    for b in &blocks {
        if !lang.is_legal(b)? {
            return Err(Error::NotLegal {
                word: sub.format_word(b),
            });
        }
        if b.count_occurrences(&u) != 2 {
            return Err(Error::Precondition {
                msg: format!(
                    "block {} does not contain the marker exactly twice",
                    sub.format_word(b)
                ),
            });
        }
        let roots: std::collections::BTreeSet<Word> = decompositions(lang, b)?
            .into_iter()
            .map(|d| d.root)
            .collect();
        if roots.len() != 1 {
            return Err(Error::RootMismatch {
                msg: format!("block {} has {} roots", sub.format_word(b), roots.len()),
            });
        }
        let root = roots.into_iter().next().unwrap();
        match &common_root {
            None => common_root = Some(root),
            Some(r) if *r == root => {}
            Some(r) => {
                return Err(Error::RootMismatch {
                    msg: format!(
                        "roots {} and {} differ",
                        sub.format_word(r),
                        sub.format_word(&root)
                    ),
                });
            }
        }
    }
    let radius = u.len() + n_k;
    let perm = spec.perm.clone();
    let u_len = u.len();
    let provenance = format!(
        "marker automorphism u={} gaps={:?} perm={:?}",
        sub.format_word(&u),
        spec.gaps.iter().map(|v| sub.format_word(v)).collect::<Vec<_>>(),
        perm
    );
    let rule = Arc::new(move |w: &[Letter]| {
        let window = Word(w.to_vec());
        let mut hit: Option<(usize, usize)> = None;
        for (i, b) in blocks.iter().enumerate() {
            for s in window.occurrences(b) {
                if s + u_len <= radius && radius < s + u_len + n_k {
                    if hit.is_some() {
                        return Err(Error::OverlapConflict {
                            msg: "two marker blocks claim the same gap letter".into(),
                        });
                    }
                    hit = Some((i, s));
                }
            }
        }
        match hit {
            Some((i, s)) => Ok(blocks[perm[i]].0[radius - s]),
            None => Ok(w[radius]),
        }
    });
    Ok(SlidingBlockCode::procedural(radius, provenance, rule))
}

/// Conveyor belt coding: four marker blocks carry two binary tracks, the
/// top read forwards and the bottom in reverse, wrapping into each other
/// at gaps longer than the threshold.
#[derive(Debug, Clone)]
pub struct ConveyorSpec {
    pub u: Word,
    pub u_radius: usize,
    /// blocks[i][j] is the gap word carrying bottom index i, top index j.
    pub blocks: [[Word; 2]; 2],
    /// Gaps of at most this length keep a run together; longer gaps end it.
    pub threshold: usize,
    pub alpha: IndexCode,
    pub alpha_inv: IndexCode,
}

struct ConveyorData {
    u_len: usize,
    v_len: usize,
    /// Full blocks u v u, indexed [bottom][top].
    full: [[Word; 2]; 2],
    threshold: usize,
    alpha: IndexCode,
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum Track {
    Top,
    Bottom,
}

#[derive(Clone, Copy)]
enum Step {
    /// Next block of the same run.
    Next(usize),
    /// Confirmed end of the run.
    End,
}

impl ConveyorData {
    fn block_len(&self) -> usize {
        2 * self.u_len + self.v_len
    }

    fn occurrences(&self, window: &Word) -> Vec<(usize, usize, usize)> {
        let mut occ = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                for s in window.occurrences(&self.full[i][j]) {
                    occ.push((s, i, j));
                }
            }
        }
        occ.sort_unstable();
        occ
    }

    /// Step from block k to its run neighbour in the given direction, or
    /// confirm the run ends there. Errs when the window cannot tell.
    fn step(
        &self,
        occ: &[(usize, usize, usize)],
        window_len: usize,
        k: usize,
        dir: isize,
    ) -> Result<Step> {
        let bl = self.block_len();
        let (s, _, _) = occ[k];
        if dir > 0 {
            if k + 1 < occ.len() {
                let gap = occ[k + 1].0 as isize - (s + bl) as isize;
                return Ok(if gap <= self.threshold as isize {
                    Step::Next(k + 1)
                } else {
                    Step::End
                });
            }
            // no further block seen: the run provably ends only if a block
            // within threshold would be fully visible
            if window_len - (s + bl) >= self.threshold + bl {
                Ok(Step::End)
            } else {
                Err(Error::InsufficientContext {
                    msg: "run continues past the right edge of the window".into(),
                })
            }
        } else {
            if k > 0 {
                let gap = s as isize - (occ[k - 1].0 + bl) as isize;
                return Ok(if gap <= self.threshold as isize {
                    Step::Next(k - 1)
                } else {
                    Step::End
                });
            }
            if s >= self.threshold + bl {
                Ok(Step::End)
            } else {
                Err(Error::InsufficientContext {
                    msg: "run continues past the left edge of the window".into(),
                })
            }
        }
    }

    /// Move one position along the two-track circle. Forward order is: tops
    /// left to right, then bottoms right to left, then wrap.
    fn circle_step(
        &self,
        occ: &[(usize, usize, usize)],
        window_len: usize,
        pos: (Track, usize),
        dir: isize,
    ) -> Result<(Track, usize)> {
        let (track, k) = pos;
        let along = match (track, dir > 0) {
            (Track::Top, true) | (Track::Bottom, false) => 1,
            _ => -1,
        };
        Ok(match self.step(occ, window_len, k, along)? {
            Step::Next(k2) => (track, k2),
            Step::End => match track {
                Track::Top => (Track::Bottom, k),
                Track::Bottom => (Track::Top, k),
            },
        })
    }

    fn value(&self, occ: &[(usize, usize, usize)], pos: (Track, usize)) -> usize {
        let (_, i, j) = occ[pos.1];
        match pos.0 {
            Track::Top => j,
            Track::Bottom => i,
        }
    }

    /// Alpha applied at one circle position.
    fn rewrite(
        &self,
        occ: &[(usize, usize, usize)],
        window_len: usize,
        center: (Track, usize),
    ) -> Result<usize> {
        let ra = self.alpha.radius() as isize;
        let mut window = Vec::with_capacity(2 * self.alpha.radius() + 1);
        for d in -ra..=ra {
            let mut pos = center;
            for _ in 0..d.abs() {
                pos = self.circle_step(occ, window_len, pos, d.signum())?;
            }
            window.push(self.value(occ, pos));
        }
        Ok(self.alpha.apply(&window))
    }
}

pub fn compile_conveyor(lang: &Language, spec: &ConveyorSpec) -> Result<SlidingBlockCode> {
    let sub = lang.substitution();
    if sub.constant_length().is_none() {
        return Err(Error::Precondition {
            msg: "conveyor coding requires a constant length substitution".into(),
        });
    }
    if !sub.is_compatible() {
        return Err(Error::Precondition {
            msg: "conveyor coding requires a compatible substitution".into(),
        });
    }
    if word_radius(lang, &spec.u, spec.u_radius)?.radius.is_none() {
        return Err(Error::NotRecognisable {
            msg: format!(
                "marker word {} not certified within radius {}",
                sub.format_word(&spec.u),
                spec.u_radius
            ),
        });
    }
    let v_len = spec.blocks[0][0].len();
    let mut seen: Vec<&Word> = Vec::new();
    let mut full: [[Word; 2]; 2] = Default::default();
    let mut common_root: Option<Word> = None;
    for i in 0..2 {
        for j in 0..2 {
            let v = &spec.blocks[i][j];
            if v.len() != v_len {
                return Err(Error::Precondition {
                    msg: "conveyor blocks must share one length".into(),
                });
            }
            if seen.contains(&v) {
                return Err(Error::Precondition {
                    msg: "conveyor blocks must be distinct".into(),
                });
            }
            seen.push(v);
            let b = spec.u.concat(v).concat(&spec.u);
            if !lang.is_legal(&b)? {
                return Err(Error::NotLegal {
                    word: sub.format_word(&b),
                });
            }
            if b.count_occurrences(&spec.u) != 2 {
                return Err(Error::Precondition {
                    msg: format!(
                        "block {} does not contain the marker exactly twice",
                        sub.format_word(&b)
                    ),
                });
            }
            let roots: std::collections::BTreeSet<Word> = decompositions(lang, &b)?
                .into_iter()
                .map(|d| d.root)
                .collect();
            if roots.len() != 1 {
                return Err(Error::RootMismatch {
                    msg: format!("block {} has {} roots", sub.format_word(&b), roots.len()),
                });
            }
            let root = roots.into_iter().next().unwrap();
            match &common_root {
                None => common_root = Some(root),
                Some(r) if *r == root => {}
                Some(r) => {
                    return Err(Error::RootMismatch {
                        msg: format!(
                            "roots {} and {} differ",
                            sub.format_word(r),
                            sub.format_word(&root)
                        ),
                    });
                }
            }
            full[i][j] = b;
        }
    }
    if spec.alpha.symbols() != 2 || spec.alpha_inv.symbols() != 2 {
        return Err(Error::Precondition {
            msg: "conveyor index codes are binary".into(),
        });
    }
    if !spec.alpha.inverts(&spec.alpha_inv) {
        return Err(Error::Precondition {
            msg: "alpha and alpha_inv do not invert each other".into(),
        });
    }
    let block_len = 2 * spec.u.len() + v_len;
    if spec.threshold < block_len {
        return Err(Error::Precondition {
            msg: format!(
                "threshold {} below the block visibility bound {}",
                spec.threshold, block_len
            ),
        });
    }
    let data = Arc::new(ConveyorData {
        u_len: spec.u.len(),
        v_len,
        full,
        threshold: spec.threshold,
        alpha: spec.alpha.clone(),
    });
    // index context is only consulted when the centre sits inside a block,
    // so a radius-0 alpha needs to see just that one block
    let radius = if spec.alpha.radius() == 0 {
        spec.u.len() + v_len
    } else {
        (spec.alpha.radius() + 2) * (block_len + spec.threshold)
    };
    let provenance = format!(
        "conveyor u={} threshold={} alpha radius {}",
        sub.format_word(&spec.u),
        spec.threshold,
        spec.alpha.radius()
    );
    let rule = Arc::new(move |w: &[Letter]| {
        let window = Word(w.to_vec());
        let occ = data.occurrences(&window);
        let u_len = data.u_len;
        let Some(k0) = occ
            .iter()
            .position(|(s, _, _)| s + u_len <= radius && radius < s + u_len + data.v_len)
        else {
            // markers and gap letters are fixed by the rewrite
            return Ok(w[radius]);
        };
        let j_new = data.rewrite(&occ, w.len(), (Track::Top, k0))?;
        let i_new = data.rewrite(&occ, w.len(), (Track::Bottom, k0))?;
        let (s, _, _) = occ[k0];
        Ok(data.full[i_new][j_new].0[radius - s])
    });
    Ok(SlidingBlockCode::procedural(radius, provenance, rule))
}

/// Parse a periodic configuration into conveyor runs and apply alpha to
/// each circular two-track word directly, from the global definition. Used
/// to cross-check the compiled local rule.
pub fn conveyor_replay(
    spec: &ConveyorSpec,
    cfg: &CyclicConfiguration,
) -> Result<CyclicConfiguration> {
    let v_len = spec.blocks[0][0].len();
    let block_len = 2 * spec.u.len() + v_len;
    let p = cfg.period();
    let doubled = cfg.word.concat(&cfg.word);
    let mut occ: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..2 {
        for j in 0..2 {
            let b = spec.u.concat(&spec.blocks[i][j]).concat(&spec.u);
            for s in doubled.occurrences(&b) {
                if s < p {
                    occ.push((s, i, j));
                }
            }
        }
    }
    occ.sort_unstable();
    let mut out = cfg.word.clone();
    if occ.is_empty() {
        return Ok(CyclicConfiguration { word: out });
    }
    // cyclic gaps between consecutive blocks; index g is the gap after block g
    let m = occ.len();
    let gap_after = |k: usize| -> isize {
        let (s, _, _) = occ[k];
        let (s2, _, _) = occ[(k + 1) % m];
        let next = if k + 1 == m { s2 + p } else { s2 };
        next as isize - (s + block_len) as isize
    };
    let boundaries: Vec<usize> = (0..m)
        .filter(|&k| gap_after(k) > spec.threshold as isize)
        .collect();
    let mut rewritten: Vec<(usize, usize, usize)> = Vec::new();
    if boundaries.is_empty() {
        // one run wrapping the whole period: the two tracks each close into
        // their own circle and never meet
        let tops: Vec<usize> = occ.iter().map(|&(_, _, j)| j).collect();
        let bottoms_rev: Vec<usize> = occ.iter().rev().map(|&(_, i, _)| i).collect();
        let new_tops = spec.alpha.apply_cyclic(&tops);
        let new_bottoms_rev = spec.alpha.apply_cyclic(&bottoms_rev);
        for (k, &(s, _, _)) in occ.iter().enumerate() {
            rewritten.push((s, new_bottoms_rev[m - 1 - k], new_tops[k]));
        }
    } else {
        for b in 0..boundaries.len() {
            // run starts after boundary b and ends at the next boundary
            let start = (boundaries[b] + 1) % m;
            let end = boundaries[(b + 1) % boundaries.len().max(1)];
            let mut run = Vec::new();
            let mut k = start;
            loop {
                run.push(occ[k]);
                if k == end {
                    break;
                }
                k = (k + 1) % m;
            }
            let n = run.len();
            let mut circle: Vec<usize> = run.iter().map(|&(_, _, j)| j).collect();
            circle.extend(run.iter().rev().map(|&(_, i, _)| i));
            let new = spec.alpha.apply_cyclic(&circle);
            for (q, &(s, _, _)) in run.iter().enumerate() {
                rewritten.push((s, new[2 * n - 1 - q], new[q]));
            }
        }
    }
    for (s, i, j) in rewritten {
        let b = spec.u.concat(&spec.blocks[i][j]).concat(&spec.u);
        for (t, &l) in b.0.iter().enumerate() {
            out.0[(s + t) % p] = l;
        }
    }
    Ok(CyclicConfiguration { word: out })
}

/// Outcome of a finite-window verification sweep.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub ok: bool,
    /// Offending input window and the output it produced.
    pub counterexample: Option<(Word, Word)>,
    pub checked: usize,
}

impl Verdict {
    fn pass(checked: usize) -> Verdict {
        Verdict {
            ok: true,
            counterexample: None,
            checked,
        }
    }

    fn fail(input: Word, output: Word, checked: usize) -> Verdict {
        Verdict {
            ok: false,
            counterexample: Some((input, output)),
            checked,
        }
    }
}

/// Check that central outputs of legal words of length 2r + l are legal,
/// for every l up to ell_max.
pub fn verify_endomorphism(
    code: &SlidingBlockCode,
    lang: &Language,
    ell_max: usize,
) -> Result<Verdict> {
    let mut checked = 0;
    for ell in 1..=ell_max {
        for w in &lang.legal_words(2 * code.radius() + ell)?.words {
            let out = code.apply_central(w)?;
            checked += 1;
            if !lang.is_legal(&out)? {
                return Ok(Verdict::fail(w.clone(), out, checked));
            }
        }
    }
    Ok(Verdict::pass(checked))
}

/// Check that g after f and f after g are the identity. Exhaustive over all
/// legal (2(r_f + r_g) + 1)-windows; because every output letter of a longer
/// word is computed from one such window, identity there extends letter by
/// letter to words of every length.
pub fn verify_inverse(
    f: &SlidingBlockCode,
    g: &SlidingBlockCode,
    lang: &Language,
) -> Result<Verdict> {
    let r = f.radius() + g.radius();
    let mut checked = 0;
    for w in &lang.legal_words(2 * r + 1)?.words {
        for (first, second) in [(f, g), (g, f)] {
            let mid = first.apply_central(w)?;
            let out = second.apply_central(&mid)?;
            checked += 1;
            if out.0[0] != w.0[r] {
                return Ok(Verdict::fail(w.clone(), out, checked));
            }
        }
    }
    Ok(Verdict::pass(checked))
}

/// Sampled variant of verify_inverse for radii whose window slice is out of
/// enumeration reach. Deterministic in the seed.
pub fn verify_inverse_sampled(
    f: &SlidingBlockCode,
    g: &SlidingBlockCode,
    sub: &RandomSubstitution,
    samples: usize,
    seed: u64,
) -> Result<Verdict> {
    let r = f.radius() + g.radius();
    let mut checked = 0;
    for w in sample_legal_words(sub, 2 * r + 1, samples, seed)? {
        for (first, second) in [(f, g), (g, f)] {
            let mid = first.apply_central(&w)?;
            let out = second.apply_central(&mid)?;
            checked += 1;
            if out.0[0] != w.0[r] {
                return Ok(Verdict::fail(w, out, checked));
            }
        }
    }
    Ok(Verdict::pass(checked))
}

/// Sampled check that f and g commute, window by window.
pub fn verify_commute_sampled(
    f: &SlidingBlockCode,
    g: &SlidingBlockCode,
    sub: &RandomSubstitution,
    samples: usize,
    seed: u64,
) -> Result<Verdict> {
    let r = f.radius() + g.radius();
    let mut checked = 0;
    for w in sample_legal_words(sub, 2 * r + 1, samples, seed)? {
        let fg = g.apply_central(&f.apply_central(&w)?)?;
        let gf = f.apply_central(&g.apply_central(&w)?)?;
        checked += 1;
        if fg != gf {
            return Ok(Verdict::fail(w, fg, checked));
        }
    }
    Ok(Verdict::pass(checked))
}

/// First legal window on which the two codes disagree, if any. Agreement on
/// every window implies extensional equality on all longer words.
pub fn extensional_difference(
    f: &SlidingBlockCode,
    g: &SlidingBlockCode,
    lang: &Language,
) -> Result<Option<Word>> {
    let r = f.radius().max(g.radius());
    for w in &lang.legal_words(2 * r + 1)?.words {
        let a = f.eval(&w.0[r - f.radius()..r + f.radius() + 1])?;
        let b = g.eval(&w.0[r - g.radius()..r + g.radius() + 1])?;
        if a != b {
            return Ok(Some(w.clone()));
        }
    }
    Ok(None)
}

/// First legal window the code moves, if any; None means the code acts as
/// the identity on every legal word.
pub fn nontrivial_witness(code: &SlidingBlockCode, lang: &Language) -> Result<Option<Word>> {
    let r = code.radius();
    for w in &lang.legal_words(2 * r + 1)?.words {
        if code.eval(&w.0)? != w.0[r] {
            return Ok(Some(w.clone()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundled;
    use std::collections::BTreeSet;

    fn lang(sub: RandomSubstitution) -> Language {
        Language::new(sub).unwrap()
    }

    fn sq_swap(l: &Language) -> SlidingBlockCode {
        let b = l.substitution().word("b").unwrap().0[0];
        compile_shuffle(
            l,
            &ShuffleSpec {
                level: 1,
                letter: b,
                perm: vec![1, 0],
            },
            6,
        )
        .unwrap()
    }

    fn pd_marker_swap(l: &Language) -> SlidingBlockCode {
        let sub = l.substitution();
        compile_marker_automorphism(
            l,
            &MarkerSpec {
                u: sub.word("bb").unwrap(),
                u_radius: 0,
                gaps: vec![sub.word("aaba").unwrap(), sub.word("abaa").unwrap()],
                perm: vec![1, 0],
            },
        )
        .unwrap()
    }

    /// All period-24 admissible configurations over the period doubling
    /// substitution, as realisations of aab three inflation steps up.
    fn pd_period_24() -> Vec<Word> {
        let pd = bundled::period_doubling();
        let mut cur: BTreeSet<Word> = [pd.word("aab").unwrap()].into();
        for _ in 0..3 {
            cur = cur.iter().flat_map(|w| pd.apply(w).unwrap()).collect();
        }
        cur.into_iter().collect()
    }

    #[test]
    fn shuffle_reproduces_swapped_inflation_row() {
        let l = lang(bundled::square_fibonacci());
        let sub = l.substitution();
        let f = sq_swap(&l);
        let top = sub.word("aabaababaabaabbaaabbaaabaabbaabaabbaaabaabaabab").unwrap();
        let bot = sub.word("aabaabbaaabaababaababaabaababbaaababaabaabaabba").unwrap();
        let out = f.apply_central(&top).unwrap();
        assert_eq!(out, bot.slice(f.radius(), top.len() - f.radius()));
    }

    #[test]
    fn shuffle_identity_permutation_is_identity() {
        let l = lang(bundled::square_fibonacci());
        let b = l.substitution().word("b").unwrap().0[0];
        let f = compile_shuffle(
            &l,
            &ShuffleSpec {
                level: 1,
                letter: b,
                perm: vec![0, 1],
            },
            6,
        )
        .unwrap();
        let id = SlidingBlockCode::identity(f.radius());
        assert_eq!(extensional_difference(&f, &id, &l).unwrap(), None);
    }

    #[test]
    fn shuffle_rejects_bad_permutation() {
        let l = lang(bundled::square_fibonacci());
        let b = l.substitution().word("b").unwrap().0[0];
        let err = compile_shuffle(
            &l,
            &ShuffleSpec {
                level: 1,
                letter: b,
                perm: vec![0, 0],
            },
            6,
        )
        .unwrap_err();
        assert!(matches!(err, Error::BadPermutation { .. }));
    }

    #[test]
    fn shuffle_swap_is_involution_sampled() {
        let l = lang(bundled::square_fibonacci());
        let f = sq_swap(&l);
        let v = verify_inverse_sampled(&f, &f, l.substitution(), 60, 5).unwrap();
        assert!(v.ok, "counterexample: {:?}", v.counterexample);
        assert!(nontrivial_witness(&f, &l).unwrap().is_some());
    }

    #[test]
    fn code_table_export_import_round_trip() {
        let l = lang(bundled::square_fibonacci());
        let f = sq_swap(&l);
        let text = f.export(&l).unwrap();
        let g =
            SlidingBlockCode::import(l.substitution().alphabet(), &text, "imported").unwrap();
        assert_eq!(g.radius(), f.radius());
        assert_eq!(extensional_difference(&f, &g, &l).unwrap(), None);

        let err = SlidingBlockCode::import(l.substitution().alphabet(), "aaa = b", "bad")
            .unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
    }

    #[test]
    fn eval_rejects_windows_outside_the_table() {
        let l = lang(bundled::square_fibonacci());
        let f = sq_swap(&l).materialise(&l).unwrap();
        let sub = l.substitution();
        // bbb never occurs, so neither does any window containing it
        let junk = sub.word("b").unwrap().repeat(2 * f.radius() + 1);
        assert!(matches!(f.eval(&junk.0), Err(Error::IllegalInput { .. })));
        let short = sub.word("ab").unwrap();
        assert!(matches!(
            f.apply_central(&short),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn index_code_constructions_invert() {
        assert!(IndexCode::complement().unwrap().inverts(&IndexCode::complement().unwrap()));
        let sl = IndexCode::shift_left(3).unwrap();
        let sr = IndexCode::shift_right(3).unwrap();
        assert!(sl.inverts(&sr));
        assert!(!sl.inverts(&sl));
        let c = IndexCode::from_permutation(&[1, 2, 0]).unwrap();
        let ci = IndexCode::from_permutation(&[2, 0, 1]).unwrap();
        assert!(c.inverts(&ci));
        assert_eq!(sl.apply_cyclic(&[0, 1, 2, 0, 1]), vec![1, 2, 0, 1, 0]);
        assert!(matches!(
            IndexCode::from_permutation(&[0, 0]),
            Err(Error::BadPermutation { .. })
        ));
        assert!(matches!(
            IndexCode::identity(1),
            Err(Error::Precondition { .. })
        ));
    }

    #[test]
    fn marker_families_for_bb() {
        let l = lang(bundled::period_doubling());
        let sub = l.substitution();
        let w = |s: &str| sub.word(s).unwrap();
        let bb = w("bb");

        let rep = find_markers(&l, &bb, 0, 0).unwrap();
        assert!(rep.grouped.is_empty() && rep.ungrouped.is_empty());

        let rep = find_markers(&l, &bb, 4, 0).unwrap();
        assert!(rep.ungrouped.is_empty());
        let expect: BTreeMap<Word, Vec<Word>> = [
            (w("aaaaa"), vec![w("aaba"), w("abaa")]),
            (w("aabaa"), vec![w("aaaa")]),
        ]
        .into();
        assert_eq!(rep.grouped, expect);

        let rep = find_markers(&l, &bb, 8, 0).unwrap();
        assert!(rep.ungrouped.is_empty());
        assert_eq!(
            rep.grouped[&w("aaabaaa")],
            vec![w("aabaaaba"), w("aabaabaa"), w("abaaaaba"), w("abaaabaa")]
        );
    }

    #[test]
    fn marker_swap_rewrites_gap_words_in_place() {
        let l = lang(bundled::period_doubling());
        let sub = l.substitution();
        let f = pd_marker_swap(&l);
        let b0 = sub.word("bbaababb").unwrap();
        let b1 = sub.word("bbabaabb").unwrap();
        let cfg = pd_period_24()
            .into_iter()
            .find(|c| c.concat(c).contains(&b0))
            .map(|c| CyclicConfiguration::new(c).unwrap())
            .expect("some period-24 configuration contains bb aaba bb");
        let out = f.apply_cyclic(&cfg).unwrap();
        // expected image: every block swapped, everything else untouched
        let p = cfg.period();
        let mut expect = cfg.word.clone();
        let doubled = cfg.word.concat(&cfg.word);
        for (from, to) in [(&b0, &b1), (&b1, &b0)] {
            for s in doubled.occurrences(from) {
                if s < p {
                    for (k, &x) in to.0.iter().enumerate() {
                        expect.0[(s + k) % p] = x;
                    }
                }
            }
        }
        assert_eq!(out.word, expect);
        assert_ne!(out.word, cfg.word);
        // rewriting commutes with rotation
        let rot = f.apply_cyclic(&cfg.rotate(5)).unwrap();
        assert_eq!(rot.word, out.word.rotation(5));
    }

    #[test]
    fn marker_identity_permutation_is_identity() {
        let l = lang(bundled::period_doubling());
        let sub = l.substitution();
        let f = compile_marker_automorphism(
            &l,
            &MarkerSpec {
                u: sub.word("bb").unwrap(),
                u_radius: 0,
                gaps: vec![sub.word("aaba").unwrap(), sub.word("abaa").unwrap()],
                perm: vec![0, 1],
            },
        )
        .unwrap();
        let id = SlidingBlockCode::identity(f.radius());
        assert_eq!(extensional_difference(&f, &id, &l).unwrap(), None);
    }

    #[test]
    fn marker_swap_is_self_inverse_sampled() {
        let l = lang(bundled::period_doubling());
        let f = pd_marker_swap(&l);
        let v = verify_inverse_sampled(&f, &f, l.substitution(), 200, 9).unwrap();
        assert!(v.ok, "counterexample: {:?}", v.counterexample);
    }

    #[test]
    fn marker_four_cycle_has_order_four() {
        let l = lang(bundled::period_doubling());
        let sub = l.substitution();
        let bb = sub.word("bb").unwrap();
        let fam = find_markers(&l, &bb, 8, 0).unwrap().grouped[&sub.word("aaabaaa").unwrap()]
            .clone();
        let f = compile_marker_automorphism(
            &l,
            &MarkerSpec {
                u: bb.clone(),
                u_radius: 0,
                gaps: fam.clone(),
                perm: vec![1, 2, 3, 0],
            },
        )
        .unwrap();
        let block = bb.concat(&fam[0]).concat(&bb);
        let cfg = pd_period_24()
            .into_iter()
            .find(|c| c.concat(c).contains(&block))
            .map(|c| CyclicConfiguration::new(c).unwrap())
            .expect("some period-24 configuration contains a gap-8 block");
        let once = f.apply_cyclic(&cfg).unwrap();
        let twice = f.apply_cyclic(&once).unwrap();
        let back = f
            .apply_cyclic(&f.apply_cyclic(&twice).unwrap())
            .unwrap();
        assert_ne!(once.word, cfg.word);
        assert_ne!(twice.word, cfg.word);
        assert_eq!(back.word, cfg.word);
    }

    #[test]
    fn endomorphism_check_accepts_marker_swap_and_rejects_collapse() {
        let l = lang(bundled::period_doubling());
        let sub = l.substitution();
        let f = pd_marker_swap(&l);
        let v = verify_endomorphism(&f, &l, 4).unwrap();
        assert!(v.ok, "counterexample: {:?}", v.counterexample);

        // a -> b, b -> b produces bbb, which is not legal
        let b = sub.word("b").unwrap().0[0];
        let table: BTreeMap<Word, Letter> = sub
            .alphabet()
            .letters()
            .map(|x| (Word::single(x), b))
            .collect();
        let collapse = SlidingBlockCode::from_table(table, "collapse").unwrap();
        let v = verify_endomorphism(&collapse, &l, 3).unwrap();
        assert!(!v.ok);
        assert!(v.counterexample.is_some());
    }

    #[test]
    fn embedding_specialises_to_the_shuffle() {
        let sq = bundled::square_fibonacci();
        let l = Arc::new(Language::new(sq.clone()).unwrap());
        let b = sq.word("b").unwrap().0[0];
        assert_eq!(l.letter_gap_bound(b, 16).unwrap(), Some(3));
        let emb = compile_full_shift_embedding(
            l.clone(),
            b,
            &IndexCode::complement().unwrap(),
            6,
            16,
        )
        .unwrap();
        let f = sq_swap(&l);
        assert!(emb.radius() >= f.radius());
        let len = 2 * emb.radius() + 1;
        for s in sample_legal_words(&sq, len, 200, 7).unwrap() {
            let c = emb.radius();
            assert_eq!(
                emb.eval(&s.0).unwrap(),
                f.eval(&s.0[c - f.radius()..c + f.radius() + 1]).unwrap()
            );
        }
    }

    #[test]
    fn embedding_identity_rule_fixes_samples() {
        let sq = bundled::square_fibonacci();
        let l = Arc::new(Language::new(sq.clone()).unwrap());
        let b = sq.word("b").unwrap().0[0];
        let emb = compile_full_shift_embedding(
            l.clone(),
            b,
            &IndexCode::identity(2).unwrap(),
            6,
            16,
        )
        .unwrap();
        let len = 2 * emb.radius() + 1;
        for s in sample_legal_words(&sq, len, 200, 3).unwrap() {
            assert_eq!(emb.eval(&s.0).unwrap(), s.0[emb.radius()]);
        }
    }

    #[test]
    fn embedding_shift_codes_invert_sampled() {
        let sq = bundled::square_fibonacci();
        let l = Arc::new(Language::new(sq.clone()).unwrap());
        let b = sq.word("b").unwrap().0[0];
        let es = compile_full_shift_embedding(
            l.clone(),
            b,
            &IndexCode::shift_left(2).unwrap(),
            6,
            16,
        )
        .unwrap();
        let esr = compile_full_shift_embedding(
            l.clone(),
            b,
            &IndexCode::shift_right(2).unwrap(),
            6,
            16,
        )
        .unwrap();
        let v = verify_inverse_sampled(&es, &esr, &sq, 30, 11).unwrap();
        assert!(v.ok, "counterexample: {:?}", v.counterexample);
    }

    #[test]
    fn embedding_rejects_letters_with_one_image() {
        let sq = bundled::square_fibonacci();
        let l = Arc::new(Language::new(sq.clone()).unwrap());
        let a = sq.word("a").unwrap().0[0];
        let err = compile_full_shift_embedding(
            l,
            a,
            &IndexCode::complement().unwrap(),
            6,
            16,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Precondition { .. }));
    }

    fn pd_conveyor_spec(alpha: IndexCode, alpha_inv: IndexCode) -> ConveyorSpec {
        let pd = bundled::period_doubling();
        let l = lang(pd.clone());
        let bb = pd.word("bb").unwrap();
        let fam =
            find_markers(&l, &bb, 8, 0).unwrap().grouped[&pd.word("aaabaaa").unwrap()].clone();
        ConveyorSpec {
            u: bb,
            u_radius: 0,
            blocks: [
                [fam[0].clone(), fam[1].clone()],
                [fam[2].clone(), fam[3].clone()],
            ],
            threshold: 12,
            alpha,
            alpha_inv,
        }
    }

    #[test]
    fn conveyor_identity_rule_is_identity() {
        let l = lang(bundled::period_doubling());
        let spec = pd_conveyor_spec(
            IndexCode::identity(2).unwrap(),
            IndexCode::identity(2).unwrap(),
        );
        let f = compile_conveyor(&l, &spec).unwrap();
        let id = SlidingBlockCode::identity(f.radius());
        assert_eq!(extensional_difference(&f, &id, &l).unwrap(), None);
    }

    #[test]
    fn conveyor_complement_flips_blocks() {
        let l = lang(bundled::period_doubling());
        let spec = pd_conveyor_spec(
            IndexCode::complement().unwrap(),
            IndexCode::complement().unwrap(),
        );
        let f = compile_conveyor(&l, &spec).unwrap();
        assert!(nontrivial_witness(&f, &l).unwrap().is_some());
        let v = verify_inverse_sampled(&f, &f, l.substitution(), 500, 17).unwrap();
        assert!(v.ok, "counterexample: {:?}", v.counterexample);

        // on a single wrapped run the block v_i^j becomes v_{1-i}^{1-j}
        let block = spec.u.concat(&spec.blocks[0][0]).concat(&spec.u);
        let cfg = pd_period_24()
            .into_iter()
            .find(|c| c.concat(c).contains(&block))
            .map(|c| CyclicConfiguration::new(c).unwrap())
            .expect("some period-24 configuration contains the block");
        let out = f.apply_cyclic(&cfg).unwrap();
        let p = cfg.period();
        let s = cfg
            .word
            .concat(&cfg.word)
            .occurrences(&block)
            .into_iter()
            .find(|&s| s < p)
            .unwrap();
        let swapped = spec.u.concat(&spec.blocks[1][1]).concat(&spec.u);
        let mut expect = cfg.word.clone();
        for (k, &x) in swapped.0.iter().enumerate() {
            expect.0[(s + k) % p] = x;
        }
        assert_eq!(out.word, expect);
    }

    #[test]
    fn conveyor_replay_matches_local_rule() {
        let l = lang(bundled::period_doubling());
        let sub = l.substitution();
        // two blocks, one keeping gap and one breaking gap
        let two_run = [
            "ababbaaaabaaabaaabaaabaaabbaabaaababbaaaabbaabaa",
            "ababbaaaabaaabaaabaaabaaabbaabaaababbaaaabbabaaa",
            "ababbaaaabaaabaaabaaabaaabbaabaabaabbaaaabbaabaa",
        ];
        let block_of = |spec: &ConveyorSpec| spec.u.concat(&spec.blocks[0][0]).concat(&spec.u);
        let mut cfgs: Vec<CyclicConfiguration> = two_run
            .iter()
            .map(|s| CyclicConfiguration::new(sub.word(s).unwrap()).unwrap())
            .collect();
        let spec = pd_conveyor_spec(
            IndexCode::complement().unwrap(),
            IndexCode::complement().unwrap(),
        );
        cfgs.push(
            pd_period_24()
                .into_iter()
                .find(|c| c.concat(c).contains(&block_of(&spec)))
                .map(|c| CyclicConfiguration::new(c).unwrap())
                .unwrap(),
        );
        let f = compile_conveyor(&l, &spec).unwrap();
        let sspec = pd_conveyor_spec(
            IndexCode::shift_left(2).unwrap(),
            IndexCode::shift_right(2).unwrap(),
        );
        let g = compile_conveyor(&l, &sspec).unwrap();
        assert!(g.radius() > f.radius());
        for cfg in &cfgs {
            let local = f.apply_cyclic(cfg).unwrap();
            assert_eq!(local, conveyor_replay(&spec, cfg).unwrap());
            let local = g.apply_cyclic(cfg).unwrap();
            assert_eq!(local, conveyor_replay(&sspec, cfg).unwrap());
        }
    }

    #[test]
    fn conveyor_rejects_mismatched_inverse() {
        let l = lang(bundled::period_doubling());
        let spec = pd_conveyor_spec(
            IndexCode::shift_left(2).unwrap(),
            IndexCode::shift_left(2).unwrap(),
        );
        let err = compile_conveyor(&l, &spec).unwrap_err();
        assert!(matches!(err, Error::Precondition { .. }));
    }
}
