//! The run-configuration file: languages, resource paths, cascade toggles
//! and linker settings. Paths are relative to the config file's directory
//! and must exist when a command starts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use slavlink_core::{Category, CategoryRoots};

fn default_true() -> bool {
    true
}

fn default_theta() -> f32 {
    0.5
}

fn default_dimension() -> usize {
    64
}

fn default_seed() -> u64 {
    42
}

/// Cascade ablation switches: `p` phrase schemas, `w` word-level fallback,
/// `W` Wikipedia-derived resources, `a` agreement rules, `s` stopper
/// words. All default to on; all off is the identity baseline.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CascadeConfig {
    #[serde(default = "default_true")]
    pub p: bool,
    #[serde(default = "default_true")]
    pub w: bool,
    #[serde(default = "default_true", rename = "W")]
    pub wiki: bool,
    #[serde(default = "default_true")]
    pub a: bool,
    #[serde(default = "default_true")]
    pub s: bool,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        CascadeConfig {
            p: true,
            w: true,
            wiki: true,
            a: true,
            s: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorsConfig {
    pub path: Option<PathBuf>,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for VectorsConfig {
    fn default() -> Self {
        VectorsConfig {
            path: None,
            dimension: default_dimension(),
            seed: default_seed(),
        }
    }
}

/// Per-language resource files; any entry may be omitted, which leaves the
/// corresponding cascade step without data.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LangResources {
    pub rules: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub suffixes: Option<PathBuf>,
    pub schemas: Option<PathBuf>,
    pub wiki_schemas: Option<PathBuf>,
    pub stoppers: Option<PathBuf>,
    pub lemma_freq: Option<PathBuf>,
    pub agreement: Option<PathBuf>,
}

impl LangResources {
    fn paths(&self) -> impl Iterator<Item = &PathBuf> {
        [
            &self.rules,
            &self.lexicon,
            &self.suffixes,
            &self.schemas,
            &self.wiki_schemas,
            &self.stoppers,
            &self.lemma_freq,
            &self.agreement,
        ]
        .into_iter()
        .flatten()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub languages: Vec<String>,
    #[serde(default = "default_theta")]
    pub theta: f32,
    #[serde(default)]
    pub cascade: CascadeConfig,
    pub catalog: Option<PathBuf>,
    pub overrides: Option<PathBuf>,
    #[serde(default)]
    pub vectors: VectorsConfig,
    #[serde(default)]
    pub category_roots: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub resources: BTreeMap<String, LangResources>,
}

impl RunConfig {
    /// Loads the file, resolves every path against the config directory and
    /// checks that all referenced files exist.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut config: RunConfig =
            toml::from_str(&text).with_context(|| format!("bad config {}", path.display()))?;
        if config.languages.is_empty() {
            bail!("config lists no languages");
        }
        if !config.theta.is_finite() {
            bail!("theta must be finite");
        }
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = config.catalog.as_mut() {
            resolve(p);
        }
        if let Some(p) = config.overrides.as_mut() {
            resolve(p);
        }
        if let Some(p) = config.vectors.path.as_mut() {
            resolve(p);
        }
        for resources in config.resources.values_mut() {
            for p in [
                &mut resources.rules,
                &mut resources.lexicon,
                &mut resources.suffixes,
                &mut resources.schemas,
                &mut resources.wiki_schemas,
                &mut resources.stoppers,
                &mut resources.lemma_freq,
                &mut resources.agreement,
            ]
            .into_iter()
            .flatten()
            {
                resolve(p);
            }
        }
        config.check_paths()?;
        config.roots()?;
        Ok(config)
    }

    fn check_paths(&self) -> Result<()> {
        let mut all: Vec<&PathBuf> = Vec::new();
        all.extend(&self.catalog);
        all.extend(&self.overrides);
        all.extend(&self.vectors.path);
        for r in self.resources.values() {
            all.extend(r.paths());
        }
        for path in all {
            if !path.exists() {
                bail!("configured path does not exist: {}", path.display());
            }
        }
        for lang in self.resources.keys() {
            if !self.languages.contains(lang) {
                bail!("resources configured for unlisted language `{lang}`");
            }
        }
        Ok(())
    }

    /// Category roots: the built-in defaults overridden per category by the
    /// config. Every category must keep at least one root.
    pub fn roots(&self) -> Result<CategoryRoots> {
        let mut roots = CategoryRoots::default();
        for (key, ids) in &self.category_roots {
            let category: Category = key
                .parse()
                .map_err(|e| anyhow::anyhow!("bad category_roots key: {e}"))?;
            roots.0.insert(category, ids.clone());
        }
        roots.validate().map_err(|e| anyhow::anyhow!(e))?;
        Ok(roots)
    }
}
