//! Inflation word decompositions.
//!
//! A decomposition of a legal word u is a tuple of pieces [u_1, ..., u_l]
//! concatenating to u together with a legal root v of length l: the interior
//! pieces are exact images of the root letters, the first piece a suffix and
//! the last piece a prefix of an image. A single piece may sit anywhere
//! inside one image. Identity is (pieces, root); the witnessing images are
//! not part of it.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::language::Language;
use crate::word::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Decomposition {
    pub pieces: Vec<Word>,
    pub root: Word,
}

impl Decomposition {
    pub fn word(&self) -> Word {
        let mut w = Word::empty();
        for p in &self.pieces {
            w = w.concat(p);
        }
        w
    }

    /// Whether the first piece is a full image of the first root letter.
    pub fn first_is_exact(&self, sub: &crate::substitution::RandomSubstitution) -> bool {
        sub.images(self.root.0[0]).contains(&self.pieces[0])
    }

    /// Whether the last piece is a full image of the last root letter.
    pub fn last_is_exact(&self, sub: &crate::substitution::RandomSubstitution) -> bool {
        sub.images(self.root.0[self.root.len() - 1])
            .contains(&self.pieces[self.pieces.len() - 1])
    }
}

/// A decomposition restricted to a subword, remembering where it came from.
/// Equality and order ignore the provenance fields, matching how sets of
/// induced decompositions are counted.
#[derive(Debug, Clone)]
pub struct InducedDecomposition {
    pub pieces: Vec<Word>,
    pub root: Word,
    /// Inclusive 0-based interval of the source word.
    pub interval: (usize, usize),
    /// Indices of the source pieces the interval starts and ends in.
    pub k: (usize, usize),
}

impl PartialEq for InducedDecomposition {
    fn eq(&self, other: &Self) -> bool {
        self.pieces == other.pieces && self.root == other.root
    }
}

impl Eq for InducedDecomposition {}

impl PartialOrd for InducedDecomposition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for InducedDecomposition {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.pieces, &self.root).cmp(&(&other.pieces, &other.root))
    }
}

/// Complete enumeration of D_ϑ(u).
pub fn decompositions(lang: &Language, u: &Word) -> Result<BTreeSet<Decomposition>> {
    if u.is_empty() {
        return Err(Error::Precondition {
            msg: "cannot decompose the empty word".into(),
        });
    }
    if !lang.is_legal(u)? {
        return Err(Error::NotLegal {
            word: lang.substitution().format_word(u),
        });
    }
    let sub = lang.substitution();
    let mut out = BTreeSet::new();
    // one piece: u anywhere inside a single image
    for l in sub.alphabet().letters() {
        if sub.images(l).iter().any(|w| w.contains(u)) {
            out.insert(Decomposition {
                pieces: vec![u.clone()],
                root: Word::single(l),
            });
        }
    }
    // two or more pieces: first a nonempty suffix of an image, interior
    // exact images, last a nonempty prefix of an image; the root prefix is
    // kept legal while searching
    for c1 in 1..u.len() {
        let first = u.slice(0, c1);
        if first.len() > sub.max_image_len() {
            continue;
        }
        for l in sub.alphabet().letters() {
            if sub.images(l).iter().any(|w| w.ends_with(&first)) {
                let mut pieces = vec![first.clone()];
                let mut root = vec![l];
                cut_dfs(lang, u, c1, &mut pieces, &mut root, &mut out)?;
            }
        }
    }
    Ok(out)
}

fn cut_dfs(
    lang: &Language,
    u: &Word,
    pos: usize,
    pieces: &mut Vec<Word>,
    root: &mut Vec<Letter>,
    out: &mut BTreeSet<Decomposition>,
) -> Result<()> {
    let sub = lang.substitution();
    if !lang.is_legal(&Word(root.clone()))? {
        return Ok(());
    }
    debug_assert!(pos < u.len());
    let rest = u.slice(pos, u.len());
    for l in sub.alphabet().letters() {
        // close with a nonempty prefix of an image of l
        if sub.images(l).iter().any(|w| w.starts_with(&rest)) {
            root.push(l);
            if lang.is_legal(&Word(root.clone()))? {
                let mut ps = pieces.clone();
                ps.push(rest.clone());
                out.insert(Decomposition {
                    pieces: ps,
                    root: Word(root.clone()),
                });
            }
            root.pop();
        }
        // or consume a full image of l and continue
        for image in sub.images(l) {
            if image.len() < rest.len() && rest.starts_with(image) {
                pieces.push(image.clone());
                root.push(l);
                cut_dfs(lang, u, pos + image.len(), pieces, root, out)?;
                root.pop();
                pieces.pop();
            }
        }
    }
    Ok(())
}

/// All legal v with u a realisation of ϑ(v).
pub fn exact_roots(lang: &Language, u: &Word) -> Result<BTreeSet<Word>> {
    if u.is_empty() {
        return Err(Error::Precondition {
            msg: "cannot decompose the empty word".into(),
        });
    }
    let mut out = BTreeSet::new();
    let mut root = Vec::new();
    exact_dfs(lang, u, 0, &mut root, &mut out)?;
    Ok(out)
}

fn exact_dfs(
    lang: &Language,
    u: &Word,
    pos: usize,
    root: &mut Vec<Letter>,
    out: &mut BTreeSet<Word>,
) -> Result<()> {
    if !root.is_empty() && !lang.is_legal(&Word(root.clone()))? {
        return Ok(());
    }
    if pos == u.len() {
        if !root.is_empty() {
            out.insert(Word(root.clone()));
        }
        return Ok(());
    }
    let sub = lang.substitution();
    for l in sub.alphabet().letters() {
        for image in sub.images(l) {
            if pos + image.len() <= u.len() && u.slice(pos, pos + image.len()) == *image {
                root.push(l);
                exact_dfs(lang, u, pos + image.len(), root, out)?;
                root.pop();
            }
        }
    }
    Ok(())
}

/// Restricts d to the inclusive 0-based interval [i, j] of its word.
pub fn induce(d: &Decomposition, i: usize, j: usize) -> Result<InducedDecomposition> {
    let len: usize = d.pieces.iter().map(Word::len).sum();
    if i > j || j >= len {
        return Err(Error::IndexOutOfRange { i, j, len });
    }
    // piece index and offset of the piece containing a position
    let locate = |pos: usize| -> (usize, usize) {
        let mut acc = 0;
        for (k, p) in d.pieces.iter().enumerate() {
            if pos < acc + p.len() {
                return (k, pos - acc);
            }
            acc += p.len();
        }
        unreachable!()
    };
    let (ki, oi) = locate(i);
    let (kj, oj) = locate(j);
    let pieces = if ki == kj {
        vec![d.pieces[ki].slice(oi, oj + 1)]
    } else {
        let mut ps = Vec::with_capacity(kj - ki + 1);
        ps.push(d.pieces[ki].slice(oi, d.pieces[ki].len()));
        ps.extend(d.pieces[ki + 1..kj].iter().cloned());
        ps.push(d.pieces[kj].slice(0, oj + 1));
        ps
    };
    Ok(InducedDecomposition {
        pieces,
        root: d.root.slice(ki, kj + 1),
        interval: (i, j),
        k: (ki, kj),
    })
}

/// {d restricted to [i, j] : d ∈ D_ϑ(w)}, deduplicated.
pub fn induced_set(
    lang: &Language,
    w: &Word,
    i: usize,
    j: usize,
) -> Result<BTreeSet<InducedDecomposition>> {
    let mut out = BTreeSet::new();
    for d in decompositions(lang, w)? {
        out.insert(induce(&d, i, j)?);
    }
    Ok(out)
}
