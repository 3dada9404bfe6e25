//! `mine-wiki`: wikitext in; validated pairs, stopper words, lemma
//! frequencies, a suffix inventory and phrase schemas out.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use slavlink_core::lemmatize::{induce_schema, write_schemas, write_suffixes, SchemaSet, SuffixInventory};
use slavlink_core::morpho::read_rules;
use slavlink_core::wiki::{
    count_lemma_frequencies, extract_link_pairs, mine_stopper_words, read_pairs, validate_pair,
    write_pairs, write_stoppers, write_word_counts, ExtractStats, LinkPair,
};
use slavlink_core::tokenize_phrase;

use crate::resources::open;
use crate::xml::xml_to_marked_text;
use crate::{CliError, IntoCliError};

#[allow(clippy::too_many_arguments)]
pub fn run(
    input: &[PathBuf],
    xml: &[PathBuf],
    rules: Option<&Path>,
    pairs_in: &[PathBuf],
    out_dir: &Path,
    min_stopper_support: u32,
    inventory_size: usize,
    max_suffix_len: usize,
) -> Result<(), CliError> {
    for path in input.iter().chain(xml).chain(pairs_in) {
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

    let rule_set = match rules {
        Some(path) => read_rules(open(path).usage()?)
            .with_context(|| format!("bad rules file {}", path.display()))
            .data()?,
        None => Default::default(),
    };

    let mut extracted: Vec<LinkPair> = Vec::new();
    let mut stats = ExtractStats::default();
    let mut absorb = |(pairs, s): (Vec<LinkPair>, ExtractStats)| {
        extracted.extend(pairs);
        stats.pages += s.pages;
        stats.links += s.links;
        stats.skipped_malformed += s.skipped_malformed;
        stats.skipped_namespace += s.skipped_namespace;
        stats.duplicates += s.duplicates;
    };
    for path in input {
        absorb(
            extract_link_pairs(open(path).usage()?)
                .with_context(|| format!("in {}", path.display()))
                .data()?,
        );
    }
    for path in xml {
        let marked = xml_to_marked_text(path).data()?;
        absorb(
            extract_link_pairs(marked.as_bytes())
                .with_context(|| format!("in {}", path.display()))
                .data()?,
        );
    }

    let validated: Vec<LinkPair> = extracted
        .iter()
        .filter(|p| validate_pair(p, &rule_set))
        .cloned()
        .collect();

    // Externally supplied pairs are taken as already validated.
    let mut evidence = validated.clone();
    for path in pairs_in {
        let extra = read_pairs(open(path).usage()?)
            .with_context(|| format!("in {}", path.display()))
            .data()?;
        evidence.extend(extra);
    }

    let stoppers = mine_stopper_words(&evidence, min_stopper_support);
    let lemma_freq =
        count_lemma_frequencies(extracted.iter().map(|p| p.title.as_str()), []);
    let inventory = SuffixInventory::build_from_pairs(&evidence, inventory_size, max_suffix_len);

    let mut schemas = SchemaSet::default();
    let mut schema_failures = 0usize;
    for pair in &evidence {
        let anchor = tokenize_phrase(&pair.anchor);
        let title = tokenize_phrase(&pair.title);
        if anchor.len() != title.len() {
            schema_failures += 1;
            continue;
        }
        match induce_schema(&anchor, &title, &inventory).data()? {
            Some(schema) => schemas.insert(schema),
            None => schema_failures += 1,
        }
    }

    let write = |name: &str, f: &dyn Fn(&mut BufWriter<File>) -> slavlink_core::Result<()>| {
        let path = out_dir.join(name);
        let mut writer = BufWriter::new(File::create(&path).map_err(slavlink_core::Error::Io)?);
        f(&mut writer)
    };
    write("pairs.tsv", &|w| write_pairs(w, &validated)).data()?;
    write("stoppers.txt", &|w| write_stoppers(w, &stoppers)).data()?;
    write("lemma_freq.tsv", &|w| write_word_counts(w, &lemma_freq)).data()?;
    write("suffixes.txt", &|w| write_suffixes(w, &inventory)).data()?;
    write("schemas.tsv", &|w| write_schemas(w, &schemas)).data()?;

    println!("pages\t{}", stats.pages);
    println!("links\t{}", stats.links);
    println!("skipped_malformed\t{}", stats.skipped_malformed);
    println!("skipped_namespace\t{}", stats.skipped_namespace);
    println!("duplicate_links\t{}", stats.duplicates);
    println!("extracted_pairs\t{}", extracted.len());
    println!("validated_pairs\t{}", validated.len());
    println!("stoppers\t{}", stoppers.len());
    println!("suffixes\t{}", inventory.len());
    println!("schemas\t{}", schemas.len());
    println!("schema_failures\t{schema_failures}");
    Ok(())
}
