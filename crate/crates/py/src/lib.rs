//! Python bindings for the random substitution toolkit. Words cross the
//! boundary as plain strings over the substitution's alphabet; big integers
//! as decimal strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rss_core::decomposition::{decompositions, exact_roots, induced_set};
use rss_core::recognisability::{is_recognisable, local_radius, word_radius};
use rss_core::{parse_substitution, shuffle_group_order, Language, Word};

fn err(e: rss_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A random substitution together with its legality oracle.
#[pyclass]
struct Substitution {
    lang: Language,
}

impl Substitution {
    fn word(&self, s: &str) -> PyResult<Word> {
        self.lang.substitution().word(s).map_err(err)
    }

    fn fmt(&self, w: &Word) -> String {
        self.lang.substitution().format_word(w)
    }
}

#[pymethods]
impl Substitution {
    /// Parse the rule file format: an `alphabet:` line, then `a -> u | v` lines.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let sub = parse_substitution(text).map_err(err)?;
        let lang = Language::new(sub).map_err(err)?;
        Ok(Substitution { lang })
    }

    fn __repr__(&self) -> String {
        let sub = self.lang.substitution();
        let letters: String = sub.alphabet().letters().map(|l| sub.alphabet().symbol(l)).collect();
        format!("Substitution(alphabet='{letters}')")
    }

    #[getter]
    fn alphabet(&self) -> Vec<String> {
        let sub = self.lang.substitution();
        sub.alphabet().letters().map(|l| sub.alphabet().symbol(l).to_string()).collect()
    }

    #[getter]
    fn compatible(&self) -> bool {
        self.lang.substitution().is_compatible()
    }

    #[getter]
    fn primitive(&self) -> bool {
        self.lang.substitution().is_primitive()
    }

    #[getter]
    fn constant_length(&self) -> Option<usize> {
        self.lang.substitution().constant_length()
    }

    #[getter]
    fn disjoint_letter_images(&self) -> bool {
        self.lang.substitution().has_disjoint_letter_images()
    }

    /// Rows of the substitution matrix M with M[a][b] = occurrences of a in images of b.
    fn matrix(&self) -> PyResult<Vec<Vec<usize>>> {
        Ok(self.lang.substitution().substitution_matrix().map_err(err)?.entries)
    }

    /// All realisations of the substitution applied to `word`, sorted.
    fn apply(&self, word: &str) -> PyResult<Vec<String>> {
        let u = self.word(word)?;
        let out = self.lang.substitution().apply(&u).map_err(err)?;
        Ok(out.iter().map(|w| self.fmt(w)).collect())
    }

    /// All realisations of the p-th power applied to `word`, sorted.
    fn apply_power(&self, word: &str, p: usize) -> PyResult<Vec<String>> {
        let u = self.word(word)?;
        let pw = self.lang.substitution().power(p).map_err(err)?;
        let out = pw.apply(&u).map_err(err)?;
        Ok(out.iter().map(|w| self.fmt(w)).collect())
    }

    /// The legal words of length n, sorted.
    fn legal_words(&self, n: usize) -> PyResult<Vec<String>> {
        let slice = self.lang.legal_words(n).map_err(err)?;
        Ok(slice.words.iter().map(|w| self.fmt(w)).collect())
    }

    fn is_legal(&self, word: &str) -> PyResult<bool> {
        let u = self.word(word)?;
        self.lang.is_legal(&u).map_err(err)
    }

    /// Smallest m such that every legal m-word contains `word`, searched up to m_max.
    #[pyo3(signature = (word, m_max = 30))]
    fn gap_bound(&self, word: &str, m_max: usize) -> PyResult<Option<usize>> {
        let u = self.word(word)?;
        self.lang.word_gap_bound(&u, m_max).map_err(err)
    }

    /// Words w of period <= p_max with w^k legal for all k <= k_max.
    fn periodic_candidates(&self, p_max: usize, k_max: usize) -> PyResult<Vec<String>> {
        let out = self.lang.periodic_candidates(p_max, k_max).map_err(err)?;
        Ok(out.iter().map(|w| self.fmt(w)).collect())
    }

    /// Inflation word decompositions of `word` as (pieces, root) pairs.
    fn decompositions(&self, word: &str) -> PyResult<Vec<(Vec<String>, String)>> {
        let u = self.word(word)?;
        let ds = decompositions(&self.lang, &u).map_err(err)?;
        Ok(ds
            .iter()
            .map(|d| (d.pieces.iter().map(|p| self.fmt(p)).collect(), self.fmt(&d.root)))
            .collect())
    }

    /// Roots of the edge-exact decompositions of `word`.
    fn exact_roots(&self, word: &str) -> PyResult<Vec<String>> {
        let u = self.word(word)?;
        let roots = exact_roots(&self.lang, &u).map_err(err)?;
        Ok(roots.iter().map(|w| self.fmt(w)).collect())
    }

    /// Induced decompositions of word[i..=j] as (pieces, root) pairs.
    fn induced(&self, word: &str, i: usize, j: usize) -> PyResult<Vec<(Vec<String>, String)>> {
        let u = self.word(word)?;
        let ds = induced_set(&self.lang, &u, i, j).map_err(err)?;
        Ok(ds
            .iter()
            .map(|d| (d.pieces.iter().map(|p| self.fmt(p)).collect(), self.fmt(&d.root)))
            .collect())
    }

    /// Least certified recognisability radius of `word`, or None up to n_max.
    fn word_radius(&self, word: &str, n_max: usize) -> PyResult<Option<usize>> {
        let u = self.word(word)?;
        Ok(word_radius(&self.lang, &u, n_max).map_err(err)?.radius)
    }

    /// Uniform local recognisability radius, or None up to n_max.
    fn local_radius(&self, n_max: usize) -> PyResult<Option<usize>> {
        Ok(local_radius(&self.lang, n_max).map_err(err)?.radius)
    }

    /// Whether every subshift element desubstitutes uniquely, certified up to n_max.
    fn recognisable(&self, n_max: usize) -> PyResult<bool> {
        Ok(is_recognisable(&self.lang, n_max).map_err(err)?.recognisable())
    }

    /// Shuffle group data at the given level: per-letter inflation word counts
    /// and the group orders as decimal strings.
    fn orders<'py>(&self, py: Python<'py>, level: usize) -> PyResult<Bound<'py, PyAny>> {
        let report = shuffle_group_order(self.lang.substitution(), level).map_err(err)?;
        let sub = self.lang.substitution();
        let dict = pyo3::types::PyDict::new(py);
        let counts = pyo3::types::PyDict::new(py);
        for (l, c) in &report.counts {
            counts.set_item(sub.alphabet().symbol(*l).to_string(), c)?;
        }
        dict.set_item("level", report.level)?;
        dict.set_item("counts", counts)?;
        dict.set_item("full_order", report.full_order.to_string())?;
        dict.set_item("alternating_order", report.alternating_order.to_string())?;
        dict.set_item("index", report.index.to_string())?;
        dict.set_item("index_bound", report.index_bound.to_string())?;
        Ok(dict.into_any())
    }
}

/// Named bundled example substitutions.
#[pyfunction]
fn bundled() -> PyResult<Vec<(String, Substitution)>> {
    rss_core::bundled::all()
        .into_iter()
        .map(|(name, sub)| {
            let lang = Language::new(sub).map_err(err)?;
            Ok((name.to_string(), Substitution { lang }))
        })
        .collect()
}

#[pymodule]
fn rsskit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Substitution>()?;
    m.add_function(wrap_pyfunction!(bundled, m)?)?;
    Ok(())
}
