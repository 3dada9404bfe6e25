//! `build-morph`: CoNLL-U treebanks and form/lemma dictionaries in,
//! rules.tsv and lexicon.tsv out.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use slavlink_core::morpho::{
    induce_word_rules, ingest_conllu, ingest_dict_tsv, merge_entries, write_entries, write_rules,
};

use crate::resources::open;
use crate::{CliError, IntoCliError};

pub fn run(
    conllu: &[PathBuf],
    dict: &[PathBuf],
    out_dir: &Path,
    min_support: u32,
    max_suffix_len: usize,
) -> Result<(), CliError> {
    for path in conllu.iter().chain(dict) {
        if !path.exists() {
            return Err(CliError::Usage(anyhow::anyhow!(
                "input does not exist: {}",
                path.display()
            )));
        }
    }
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))
        .usage()?;

    let mut sources = Vec::new();
    for path in conllu {
        let entries = ingest_conllu(open(path).usage()?)
            .with_context(|| format!("in {}", path.display()))
            .data()?;
        sources.push(entries);
    }
    for path in dict {
        let entries = ingest_dict_tsv(open(path).usage()?)
            .with_context(|| format!("in {}", path.display()))
            .data()?;
        sources.push(entries);
    }
    let entries = merge_entries(sources);
    if entries.is_empty() {
        eprintln!("warning: no entries ingested; writing empty resources");
    }
    let rules = induce_word_rules(&entries, min_support, max_suffix_len);

    let rules_path = out_dir.join("rules.tsv");
    let mut writer = BufWriter::new(File::create(&rules_path).usage()?);
    write_rules(&mut writer, &rules).data()?;

    let lexicon_path = out_dir.join("lexicon.tsv");
    let mut writer = BufWriter::new(File::create(&lexicon_path).usage()?);
    write_entries(&mut writer, &entries).data()?;

    let tokens: u64 = entries.iter().map(|e| e.count).sum();
    println!("entries\t{}", entries.len());
    println!("tokens\t{tokens}");
    println!("rules\t{}", rules.len());
    println!("rules_file\t{}", rules_path.display());
    println!("lexicon_file\t{}", lexicon_path.display());
    Ok(())
}
