//! Python bindings: `import pyidpos`.

#[pyo3::pymodule]
mod pyidpos {
    use std::collections::BTreeMap;
    use std::path::{Path, PathBuf};

    use idpos::cli::ConfigCode;
    use idpos::corpus::{read_corpus, IdentifierRecord};
    use idpos::features::FeatureSubset;
    use idpos::learners::{kfold_evaluate, Hyperparameters, TaggerModel};
    use idpos::metrics::Metric;
    use idpos::taggers::{fill_missing, tag_lexicon, tag_posse_like, tag_swum_like, Lexicon};
    use idpos::tagset::{
        map_penn_to_gold, map_penn_to_reduced, Conjugation, DatasetConfiguration, IdentifierContext, PennTag, Tag,
    };
    use pyo3::exceptions::PyValueError;
    use pyo3::prelude::*;

    fn err(e: idpos::Error) -> PyErr {
        PyValueError::new_err(e.to_string())
    }

    fn tags(names: &[String]) -> PyResult<Vec<Tag>> {
        names.iter().map(|s| s.parse::<Tag>().map_err(err)).collect()
    }

    fn names(tags: &[Tag]) -> Vec<String> {
        tags.iter().map(|t| t.to_string()).collect()
    }

    fn context(s: &str) -> PyResult<IdentifierContext> {
        s.parse().map_err(err)
    }

    /// Splits an identifier into words.
    #[pyfunction]
    fn split(raw: &str) -> PyResult<Vec<String>> {
        Ok(idpos::splitter::split(raw).map_err(err)?.words)
    }

    /// Space-joined grammar pattern, e.g. ["V", "NM", "N"] -> "V NM N".
    #[pyfunction]
    fn pattern_of(tag_names: Vec<String>) -> PyResult<String> {
        Ok(idpos::analysis::pattern_of(&tags(&tag_names)?)
            .map_err(err)?
            .to_string())
    }

    /// Maps a Penn Treebank tag to (feature value, gold tag) for a context.
    #[pyfunction]
    #[pyo3(signature = (penn, context_name, conjugated = true))]
    fn map_penn(penn: &str, context_name: &str, conjugated: bool) -> PyResult<(String, String)> {
        let p: PennTag = penn.parse().map_err(err)?;
        let ctx = context(context_name)?;
        let conj = if conjugated {
            Conjugation::Conjugated
        } else {
            Conjugation::Normalized
        };
        Ok((
            map_penn_to_reduced(p, conj, ctx).to_string(),
            map_penn_to_gold(p, ctx).to_string(),
        ))
    }

    /// 1 for the first word, 3 for the last, 2 otherwise; `index` is 1-based.
    #[pyfunction]
    fn normalized_position(index: usize, length: usize) -> PyResult<u8> {
        idpos::features::normalized_position(index, length).map_err(err)
    }

    /// Accuracy, balanced accuracy and weighted precision/recall/F1.
    #[pyfunction]
    fn word_metrics(gold: Vec<String>, pred: Vec<String>) -> PyResult<BTreeMap<String, f64>> {
        let m = idpos::metrics::word_metrics(&tags(&gold)?, &tags(&pred)?).map_err(err)?;
        Ok(Metric::ALL
            .iter()
            .map(|&k| (k.as_str().to_string(), m.summary.get(k)))
            .collect())
    }

    #[pyfunction]
    fn identifier_accuracy(gold: Vec<Vec<String>>, pred: Vec<Vec<String>>) -> PyResult<f64> {
        let g = gold.iter().map(|x| tags(x)).collect::<PyResult<Vec<_>>>()?;
        let p = pred.iter().map(|x| tags(x)).collect::<PyResult<Vec<_>>>()?;
        idpos::metrics::identifier_accuracy(&g, &p).map_err(err)
    }

    /// Output of the built-in stand-in taggers: {"swum": [...], "posse":
    /// [...], "stanford": [...]}.
    #[pyfunction]
    #[pyo3(signature = (name, context_name, type_hint = ""))]
    fn stand_in_tags(name: &str, context_name: &str, type_hint: &str) -> PyResult<BTreeMap<String, Vec<String>>> {
        let ctx = context(context_name)?;
        let words = idpos::splitter::split(name).map_err(err)?.words;
        let lexicon = Lexicon::embedded();
        let mut out = BTreeMap::new();
        out.insert(
            "swum".into(),
            names(&tag_swum_like(&words, ctx, type_hint).map_err(err)?),
        );
        out.insert(
            "posse".into(),
            names(&tag_posse_like(&words, ctx, type_hint, lexicon).map_err(err)?),
        );
        let stanford = tag_lexicon(&words, ctx, Conjugation::Conjugated, lexicon).map_err(err)?;
        out.insert("stanford".into(), stanford.iter().map(|s| s.to_string()).collect());
        Ok(out)
    }

    fn prepared(corpus: &Path) -> PyResult<Vec<IdentifierRecord>> {
        let mut records = read_corpus(corpus).map_err(err)?;
        for r in &mut records {
            fill_missing(r, Lexicon::embedded()).map_err(err)?;
        }
        Ok(records)
    }

    fn settings(
        config: &str,
        features: Option<&str>,
        seed: u64,
        n_estimators: Option<usize>,
        max_depth: Option<usize>,
    ) -> PyResult<(Hyperparameters, DatasetConfiguration, FeatureSubset)> {
        let code: ConfigCode = config.parse().map_err(err)?;
        let mut hp = Hyperparameters::defaults_for(code.algorithm).with_seed(seed);
        if let Some(n) = n_estimators {
            hp.n_estimators = n;
        }
        if let Some(d) = max_depth {
            hp.max_depth = d;
        }
        let subset = match features {
            Some(f) => f.parse().map_err(err)?,
            None => FeatureSubset::best(),
        };
        Ok((hp, DatasetConfiguration::new(code.variant, code.conjugation), subset))
    }

    /// Mean k-fold metrics for a configuration code.
    #[pyfunction]
    #[pyo3(signature = (corpus, config = "RFCP", k = 5, seed = 0, features = None, n_estimators = None, max_depth = None))]
    fn crossval(
        corpus: PathBuf,
        config: &str,
        k: usize,
        seed: u64,
        features: Option<&str>,
        n_estimators: Option<usize>,
        max_depth: Option<usize>,
    ) -> PyResult<BTreeMap<String, f64>> {
        let (hp, dataset, subset) = settings(config, features, seed, n_estimators, max_depth)?;
        let records = prepared(&corpus)?;
        let cv = kfold_evaluate(&records, k, &hp, &dataset, &subset, seed).map_err(err)?;
        let mut out: BTreeMap<String, f64> = Metric::ALL
            .iter()
            .map(|&m| (m.as_str().to_string(), cv.mean.get(m)))
            .collect();
        out.insert("identifier_accuracy".into(), cv.mean_identifier_accuracy);
        Ok(out)
    }

    #[pyclass(frozen)]
    struct Model {
        inner: TaggerModel,
    }

    #[pymethods]
    impl Model {
        /// Trains on an annotated corpus file; absent tagger columns are
        /// filled by the stand-in taggers.
        #[staticmethod]
        #[pyo3(signature = (corpus, config = "RFCP", features = None, seed = 0, n_estimators = None, max_depth = None))]
        fn train(
            corpus: PathBuf,
            config: &str,
            features: Option<&str>,
            seed: u64,
            n_estimators: Option<usize>,
            max_depth: Option<usize>,
        ) -> PyResult<Model> {
            let (hp, dataset, subset) = settings(config, features, seed, n_estimators, max_depth)?;
            let records = prepared(&corpus)?;
            let inner = TaggerModel::train(&records, &hp, &dataset, &subset).map_err(err)?;
            Ok(Model { inner })
        }

        #[staticmethod]
        fn load(path: PathBuf) -> PyResult<Model> {
            Ok(Model {
                inner: TaggerModel::load(&path).map_err(err)?,
            })
        }

        fn save(&self, path: PathBuf) -> PyResult<()> {
            self.inner.save(&path).map_err(err)
        }

        /// Tags one identifier, returning one tag per word.
        #[pyo3(signature = (name, context_name, type_hint = ""))]
        fn tag(&self, name: &str, context_name: &str, type_hint: &str) -> PyResult<Vec<String>> {
            let record = IdentifierRecord::new("py", "py", context(context_name)?, type_hint, name).map_err(err)?;
            Ok(names(&self.inner.tag(&record, Some(Lexicon::embedded())).map_err(err)?))
        }

        #[getter]
        fn features(&self) -> Vec<String> {
            self.inner.features.features().iter().map(|f| f.to_string()).collect()
        }

        #[getter]
        fn classes(&self) -> Vec<String> {
            names(&self.inner.classes)
        }

        #[getter]
        fn n_trees(&self) -> usize {
            self.inner.trees.len()
        }
    }
}
