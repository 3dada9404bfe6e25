//! Extraction of page titles and wikitext bodies from a MediaWiki XML
//! export. The output uses the `%%PAGE <title>` marker format consumed by
//! the wikitext scanner, so both input kinds share one pipeline.

use std::io::BufRead;
use std::path::Path;

use anyhow::{Context, Result};
use quick_xml::events::Event;
use quick_xml::Reader;

pub fn xml_to_marked_text(path: &Path) -> Result<String> {
    let file = std::fs::File::open(path)
        .with_context(|| format!("cannot open XML export {}", path.display()))?;
    extract(std::io::BufReader::new(file))
        .with_context(|| format!("cannot parse XML export {}", path.display()))
}

fn extract<R: BufRead>(reader: R) -> Result<String> {
    let mut xml = Reader::from_reader(reader);
    xml.config_mut().trim_text(false);
    let mut buf = Vec::new();
    let mut out = String::new();
    let mut in_title = false;
    let mut in_text = false;
    let mut title = String::new();
    loop {
        match xml.read_event_into(&mut buf)? {
            Event::Start(e) => match e.name().as_ref() {
                b"title" => {
                    in_title = true;
                    title.clear();
                }
                b"text" => {
                    in_text = true;
                    out.push_str("%%PAGE ");
                    out.push_str(title.trim());
                    out.push('\n');
                }
                _ => {}
            },
            Event::End(e) => match e.name().as_ref() {
                b"title" => in_title = false,
                b"text" => {
                    in_text = false;
                    out.push('\n');
                }
                _ => {}
            },
            Event::Text(t) => {
                let text = t.xml_content(quick_xml::XmlVersion::Implicit1_0)?;
                if in_title {
                    title.push_str(&text);
                } else if in_text {
                    out.push_str(&text);
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pages_become_marked_segments() {
        let xml = r#"<mediawiki>
  <page>
    <title>Kraków</title>
    <revision><text>Miasto [[Kraków|Krakowa]] nad [[Wisła|Wisłą]].</text></revision>
  </page>
  <page>
    <title>Warszawa</title>
    <revision><text>Stolica to [[Warszawa]]. &lt;nowiki&gt;</text></revision>
  </page>
</mediawiki>"#;
        let marked = extract(std::io::Cursor::new(xml)).unwrap();
        assert!(marked.starts_with("%%PAGE Kraków\n"));
        assert!(marked.contains("[[Kraków|Krakowa]]"));
        assert!(marked.contains("%%PAGE Warszawa\n"));
        // Escaped entities are unescaped into plain wikitext.
        assert!(marked.contains("<nowiki>"));
    }
}
