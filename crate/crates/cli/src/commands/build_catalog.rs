//! `build-catalog`: slim entity records in, catalog snapshot out.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use slavlink_core::{
    build_catalog, descendant_closure, ingest_entities, term_frequency, CategoryRoots, EntityStore,
};

use crate::config::RunConfig;
use crate::resources::open;
use crate::{CliError, IntoCliError};

pub fn run(
    entities: &[PathBuf],
    out: &Path,
    config: Option<&Path>,
    languages: Option<&str>,
) -> Result<(), CliError> {
    if entities.is_empty() {
        return Err(CliError::Usage(anyhow::anyhow!(
            "at least one --entities file is required"
        )));
    }
    for path in entities {
        if !path.exists() {
            return Err(CliError::Usage(anyhow::anyhow!(
                "input does not exist: {}",
                path.display()
            )));
        }
    }

    let (roots, config_languages) = match config {
        Some(path) => {
            let config = RunConfig::load(path).usage()?;
            (config.roots().usage()?, Some(config.languages))
        }
        None => (CategoryRoots::default(), None),
    };
    let languages: Vec<String> = match languages {
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect(),
        None => config_languages.unwrap_or_default(),
    };
    if languages.is_empty() {
        return Err(CliError::Usage(anyhow::anyhow!(
            "no languages given; pass --languages or a --config with a language list"
        )));
    }

    let mut store = EntityStore::default();
    for path in entities {
        let part = ingest_entities(open(path).usage()?)
            .with_context(|| format!("in {}", path.display()))
            .data()?;
        store.absorb(part);
    }

    let closure = descendant_closure(&store, &roots);
    let tf = term_frequency(&store);
    let catalog = build_catalog(&store, &closure, &tf, &languages);

    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).usage()?;
        }
    }
    let mut writer = BufWriter::new(File::create(out).usage()?);
    serde_json::to_writer_pretty(&mut writer, &catalog).data()?;
    use std::io::Write;
    writeln!(writer).data()?;

    println!("records\t{}", store.len());
    println!("malformed\t{}", store.malformed);
    println!("duplicates\t{}", store.duplicates);
    for (category, size) in catalog.closure_sizes() {
        println!("closure.{category}\t{size}");
    }
    println!("entities_indexed\t{}", catalog.entities());
    println!("names\t{}", catalog.names());
    println!("catalog_file\t{}", out.display());
    Ok(())
}
