//! Document/mention data model and the annotation and raw-document file
//! formats.
//!
//! An annotation file is UTF-8 text: line 1 carries the document id, every
//! following non-empty line is `surface<TAB>lemma<TAB>category<TAB>entity_id`.
//! A raw document file is a 5-line metadata header (id, language, date, URL,
//! title) followed by the body. All text is NFC-normalized at ingestion so
//! that suffix operations later in the pipeline see a single code-point
//! representation.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::{IsNormalized, UnicodeNormalization};

use crate::error::{Error, ParseCategoryError, Result};

/// Entity categories used by the annotation scheme.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "UPPERCASE")]
pub enum Category {
    Per,
    Loc,
    Org,
    Pro,
    Evt,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Per,
        Category::Loc,
        Category::Org,
        Category::Pro,
        Category::Evt,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Category::Per => "PER",
            Category::Loc => "LOC",
            Category::Org => "ORG",
            Category::Pro => "PRO",
            Category::Evt => "EVT",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = ParseCategoryError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "PER" => Ok(Category::Per),
            "LOC" => Ok(Category::Loc),
            "ORG" => Ok(Category::Org),
            "PRO" => Ok(Category::Pro),
            "EVT" => Ok(Category::Evt),
            other => Err(ParseCategoryError(other.to_string())),
        }
    }
}

/// NFC-normalize a string. Returns the input unchanged when it is already
/// normalized, which is the common case for well-formed dumps.
pub fn nfc(text: &str) -> String {
    match unicode_normalization::is_nfc_quick(text.chars()) {
        IsNormalized::Yes => text.to_string(),
        _ => text.nfc().collect(),
    }
}

/// Trim and collapse every internal whitespace run to a single space.
pub fn collapse_ws(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Split a phrase on Unicode whitespace. Punctuation stays attached to its
/// word ("św." remains one token); empty input yields an empty list.
pub fn tokenize_phrase(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

/// Number of whitespace-separated words in a phrase.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// A source document entering the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub doc_id: String,
    /// ISO 639-1 code, e.g. "cs".
    pub language: String,
    /// NFC-normalized body text.
    pub body: String,
    /// Header fields beyond id and language (date, URL, title), carried
    /// opaquely.
    pub extra_header: Vec<String>,
}

/// A recognized entity span.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mention {
    pub surface: String,
    pub category: Category,
    pub doc_id: String,
}

impl Mention {
    /// Builds a mention, trimming and NFC-normalizing the surface form.
    pub fn new(surface: &str, category: Category, doc_id: &str) -> Result<Mention> {
        let surface = nfc(surface.trim());
        if surface.is_empty() {
            return Err(Error::Resource("mention surface is empty".into()));
        }
        if doc_id.is_empty() {
            return Err(Error::Resource("mention doc_id is empty".into()));
        }
        Ok(Mention {
            surface,
            category,
            doc_id: doc_id.to_string(),
        })
    }
}

/// A mention with its normalized lemma and assigned identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinkedMention {
    pub mention: Mention,
    pub lemma: String,
    /// Either a Wikidata identifier ("Q" + digits) or a synthetic identifier
    /// derived from lemma and category.
    pub entity_id: String,
}

impl LinkedMention {
    pub fn new(mention: Mention, lemma: &str, entity_id: &str) -> Result<LinkedMention> {
        let lemma = nfc(lemma.trim());
        let surface_words = word_count(&mention.surface);
        let lemma_words = word_count(&lemma);
        if surface_words != lemma_words {
            return Err(Error::WordCountMismatch {
                left: surface_words,
                right: lemma_words,
            });
        }
        if entity_id.is_empty() {
            return Err(Error::Resource("entity_id is empty".into()));
        }
        Ok(LinkedMention {
            mention,
            lemma,
            entity_id: entity_id.to_string(),
        })
    }
}

/// True for identifiers of the form "Q" + digits.
pub fn is_wikidata_id(id: &str) -> bool {
    let mut chars = id.chars();
    chars.next() == Some('Q') && {
        let rest = chars.as_str();
        !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
    }
}

/// Parses an annotation file: id line, then 4-column TSV mention lines.
/// Blank lines are ignored. Returns the document id and the mentions in
/// file order.
pub fn parse_annotation_file<R: BufRead>(reader: R) -> Result<(String, Vec<LinkedMention>)> {
    let mut lines = reader.lines();
    let doc_id = match lines.next() {
        Some(line) => nfc(line?.trim_end_matches(['\r', '\n'])),
        None => return Err(Error::parse(1, "missing document id line")),
    };
    if doc_id.is_empty() {
        return Err(Error::parse(1, "empty document id"));
    }

    let mut mentions = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                line_no,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        let category = Category::from_str(fields[2]).map_err(|source| Error::Category {
            line: line_no,
            source,
        })?;
        let mention = Mention::new(fields[0], category, &doc_id)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
        let linked = LinkedMention::new(mention, fields[1], fields[3])
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
        mentions.push(linked);
    }
    Ok((doc_id, mentions))
}

/// Writes an annotation file; exact inverse of [`parse_annotation_file`].
pub fn write_annotation_file<W: Write>(
    writer: &mut W,
    doc_id: &str,
    mentions: &[LinkedMention],
) -> Result<()> {
    check_field(doc_id)?;
    writeln!(writer, "{doc_id}")?;
    for m in mentions {
        for field in [
            m.mention.surface.as_str(),
            m.lemma.as_str(),
            m.entity_id.as_str(),
        ] {
            check_field(field)?;
        }
        writeln!(
            writer,
            "{}\t{}\t{}\t{}",
            m.mention.surface, m.lemma, m.mention.category, m.entity_id
        )?;
    }
    Ok(())
}

fn check_field(field: &str) -> Result<()> {
    if field.contains('\t') || field.contains('\n') || field.contains('\r') {
        return Err(Error::Serialize(format!(
            "field contains a tab or newline: {field:?}"
        )));
    }
    Ok(())
}

/// Parses a raw document file: 5 header lines (id, language, date, URL,
/// title) followed by the body.
pub fn parse_document_file<R: BufRead>(reader: R) -> Result<Document> {
    let mut lines = Vec::new();
    let mut buf = String::new();
    let mut reader = reader;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf)?;
        if n == 0 {
            break;
        }
        lines.push(buf.clone());
        if lines.len() == 5 {
            break;
        }
    }
    if lines.len() < 2 {
        return Err(Error::parse(
            lines.len() + 1,
            "document header needs at least id and language lines",
        ));
    }
    let header: Vec<String> = lines
        .iter()
        .map(|l| nfc(l.trim_end_matches(['\r', '\n'])))
        .collect();
    let doc_id = header[0].clone();
    if doc_id.is_empty() {
        return Err(Error::parse(1, "empty document id"));
    }
    let language = header[1].clone();
    if language.is_empty() {
        return Err(Error::parse(2, "empty language code"));
    }
    let mut body = String::new();
    reader.read_to_string(&mut body)?;
    Ok(Document {
        doc_id,
        language,
        body: nfc(&body),
        extra_header: header.into_iter().skip(2).collect(),
    })
}
