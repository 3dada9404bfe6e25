//! Assembly of in-memory run resources from the files the configuration
//! names.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use slavlink_core::lemmatize::{
    parse_agreement_rules, read_schemas, read_suffixes, AgreementRuleTable, CascadeToggles,
    Lemmatizer, LemmatizerResources, SchemaSet, SuffixInventory,
};
use slavlink_core::link::{read_override_rules, OverrideRule};
use slavlink_core::morpho::{read_entries, read_rules, MorphLexicon};
use slavlink_core::wiki::{read_stoppers, read_word_counts, StopperSet};
use slavlink_core::{EntityCatalog, VectorTable};

use crate::config::{CascadeConfig, LangResources, RunConfig};

pub fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| {
        format!("cannot open {}", path.display())
    })?))
}

/// Everything `run` needs, loaded once before the worker pool starts.
pub struct LoadedRun {
    pub catalog: EntityCatalog,
    pub table: VectorTable,
    pub overrides: Vec<OverrideRule>,
    pub lemmatizers: BTreeMap<String, Lemmatizer>,
    pub theta: f32,
}

pub fn load_run(config: &RunConfig) -> Result<LoadedRun> {
    let catalog = match &config.catalog {
        Some(path) => serde_json::from_reader(open(path)?)
            .with_context(|| format!("bad catalog snapshot {}", path.display()))?,
        None => EntityCatalog::default(),
    };
    let table = match &config.vectors.path {
        Some(path) => {
            let (table, warnings) = VectorTable::load(open(path)?, config.vectors.seed)
                .with_context(|| format!("bad vector file {}", path.display()))?;
            for w in warnings {
                eprintln!("warning: {}: {w}", path.display());
            }
            table
        }
        None => VectorTable::fallback_only(config.vectors.dimension, config.vectors.seed),
    };
    let overrides = match &config.overrides {
        Some(path) => read_override_rules(open(path)?)
            .with_context(|| format!("bad override rules {}", path.display()))?,
        None => Vec::new(),
    };
    let mut lemmatizers = BTreeMap::new();
    let empty = LangResources::default();
    for language in &config.languages {
        let resources = config.resources.get(language).unwrap_or(&empty);
        lemmatizers.insert(
            language.clone(),
            build_lemmatizer(language, resources, config.cascade)?,
        );
    }
    Ok(LoadedRun {
        catalog,
        table,
        overrides,
        lemmatizers,
        theta: config.theta,
    })
}

/// Builds one language's lemmatizer. The `W` toggle gates the
/// Wikipedia-derived inputs (wiki schemas, mined lemma frequencies); the
/// remaining toggles gate cascade steps at run time.
pub fn build_lemmatizer(
    language: &str,
    files: &LangResources,
    cascade: CascadeConfig,
) -> Result<Lemmatizer> {
    let rules = match &files.rules {
        Some(path) => read_rules(open(path)?)
            .with_context(|| format!("bad rules file {}", path.display()))?,
        None => Default::default(),
    };
    let entries = match &files.lexicon {
        Some(path) => read_entries(open(path)?)
            .with_context(|| format!("bad lexicon file {}", path.display()))?,
        None => Vec::new(),
    };
    let mut lexicon = MorphLexicon::from_parts(entries, rules);
    if cascade.wiki {
        if let Some(path) = &files.lemma_freq {
            let counts = read_word_counts(open(path)?)
                .with_context(|| format!("bad lemma-frequency file {}", path.display()))?;
            lexicon.add_lemma_counts(counts.iter().map(|(w, c)| (w.as_str(), *c)));
        }
    }

    let inventory = match &files.suffixes {
        Some(path) => read_suffixes(open(path)?)
            .with_context(|| format!("bad suffix file {}", path.display()))?,
        None => SuffixInventory::default(),
    };

    let mut schemas = SchemaSet::default();
    if let Some(path) = &files.schemas {
        schemas.merge(
            read_schemas(open(path)?)
                .with_context(|| format!("bad schema file {}", path.display()))?,
        );
    }
    if cascade.wiki {
        if let Some(path) = &files.wiki_schemas {
            schemas.merge(
                read_schemas(open(path)?)
                    .with_context(|| format!("bad schema file {}", path.display()))?,
            );
        }
    }

    let stoppers = match &files.stoppers {
        Some(path) => read_stoppers(open(path)?, 1)
            .with_context(|| format!("bad stopper file {}", path.display()))?,
        None => StopperSet::default(),
    };

    // User rules first, built-in Polish defaults after them.
    let mut agreement = match &files.agreement {
        Some(path) => parse_agreement_rules(open(path)?, language)
            .with_context(|| format!("bad agreement rules {}", path.display()))?,
        None => AgreementRuleTable::new(language),
    };
    if language == "pl" {
        agreement.append(AgreementRuleTable::default_polish());
    }

    let resources = LemmatizerResources {
        language: language.to_string(),
        stoppers,
        agreement: (!agreement.is_empty()).then_some(agreement),
        schemas,
        inventory,
        lexicon,
    };
    let toggles = CascadeToggles {
        stoppers: cascade.s,
        agreement: cascade.a,
        schemas: cascade.p,
        words: cascade.w,
    };
    Ok(Lemmatizer::new(resources, toggles))
}
