//! JSONL and CoNLL corpus files.
//!
//! JSONL: one `{"tokens":[...],"tags":[...]}` object per line.
//! CoNLL: one `token<TAB>tag` pair per line, a blank line after each
//! sentence. Both are UTF-8 with LF line endings. The writers are canonical:
//! the same corpus always produces the same bytes.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use addrtag_core::{Corpus, Tag, TaggedSentence, Token};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Jsonl,
    Conll,
}

impl Format {
    /// `.conll`, `.tsv` and `.txt` are CoNLL; everything else is JSONL.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("conll" | "tsv" | "txt") => Format::Conll,
            _ => Format::Jsonl,
        }
    }
}

#[derive(Serialize)]
struct RecordOut<'a> {
    tokens: Vec<&'a str>,
    tags: Vec<&'a str>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordIn {
    tokens: Vec<String>,
    tags: Vec<String>,
}

fn build_sentence(tokens: Vec<String>, tags: &[&str]) -> std::result::Result<TaggedSentence, String> {
    if tokens.len() != tags.len() {
        return Err(format!("length mismatch: {} tokens, {} tags", tokens.len(), tags.len()));
    }
    let tags = tags
        .iter()
        .map(|t| Tag::from_str(t).map_err(|_| format!("unknown tag {t:?}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let tokens = tokens
        .into_iter()
        .map(|t| Token::new(t.as_str()).map_err(|_| format!("invalid token {t:?}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    TaggedSentence::new(tokens, tags).map_err(|e| e.to_string())
}

fn corpus_name(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("corpus").to_string()
}

pub fn to_jsonl(corpus: &Corpus) -> String {
    let mut out = String::new();
    for s in corpus {
        let rec = RecordOut {
            tokens: s.tokens().iter().map(Token::as_str).collect(),
            tags: s.tags().iter().map(|t| t.as_str()).collect(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("string-only record"));
        out.push('\n');
    }
    out
}

pub fn to_conll(corpus: &Corpus) -> String {
    let mut out = String::new();
    for s in corpus {
        for (tok, tag) in s.tokens().iter().zip(s.tags()) {
            out.push_str(tok);
            out.push('\t');
            out.push_str(tag.as_str());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

/// Parse JSONL text; `path` is only used in error messages.
pub fn parse_jsonl(text: &str, path: &Path) -> Result<Corpus> {
    let mut sentences = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |reason: String| Error::Record { path: path.to_path_buf(), line: i + 1, reason };
        let rec: RecordIn = serde_json::from_str(line).map_err(|e| err(format!("malformed record: {e}")))?;
        let tags: Vec<&str> = rec.tags.iter().map(String::as_str).collect();
        sentences.push(build_sentence(rec.tokens, &tags).map_err(err)?);
    }
    Ok(Corpus::new(corpus_name(path), sentences))
}

pub fn parse_conll(text: &str, path: &Path) -> Result<Corpus> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut tags: Vec<String> = Vec::new();
    let mut first_line = 1;
    let flush = |tokens: &mut Vec<String>, tags: &mut Vec<String>, line: usize, out: &mut Vec<TaggedSentence>| -> Result<()> {
        if tokens.is_empty() {
            return Ok(());
        }
        let t: Vec<&str> = tags.iter().map(String::as_str).collect();
        let s = build_sentence(std::mem::take(tokens), &t)
            .map_err(|reason| Error::Record { path: path.to_path_buf(), line, reason })?;
        tags.clear();
        out.push(s);
        Ok(())
    };
    for (i, line) in text.split('\n').enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            flush(&mut tokens, &mut tags, first_line, &mut sentences)?;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 2 {
            return Err(Error::Record {
                path: path.to_path_buf(),
                line: lineno,
                reason: format!("malformed record: expected 2 tab-separated columns, found {}", cols.len()),
            });
        }
        if let Err(reason) = Tag::from_str(cols[1]).map_err(|_| format!("unknown tag {:?}", cols[1])) {
            return Err(Error::Record { path: path.to_path_buf(), line: lineno, reason });
        }
        if tokens.is_empty() {
            first_line = lineno;
        }
        tokens.push(cols[0].to_string());
        tags.push(cols[1].to_string());
    }
    flush(&mut tokens, &mut tags, first_line, &mut sentences)?;
    Ok(Corpus::new(corpus_name(path), sentences))
}

fn read_text(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| {
        let good = &e.as_bytes()[..e.utf8_error().valid_up_to()];
        let line = good.iter().filter(|&&b| b == b'\n').count() + 1;
        Error::Record { path: path.to_path_buf(), line, reason: "invalid UTF-8".into() }
    })
}

pub fn read_corpus(path: &Path, format: Format) -> Result<Corpus> {
    let text = read_text(path)?;
    match format {
        Format::Jsonl => parse_jsonl(&text, path),
        Format::Conll => parse_conll(&text, path),
    }
}

pub fn write_corpus(corpus: &Corpus, path: &Path, format: Format) -> Result<()> {
    let text = match format {
        Format::Jsonl => to_jsonl(corpus),
        Format::Conll => to_conll(corpus),
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_utf8(path: &Path) -> Result<String> {
    read_text(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Corpus {
        let s = |pairs: &[(&str, &str)]| TaggedSentence::from_pairs(pairs.iter().copied()).unwrap();
        Corpus::new(
            "sample",
            vec![
                s(&[("Stupava", "B-Municipality"), ("Záhumenská", "B-Street"), ("834", "B-Housenumber")]),
                s(&[("Ďalšie", "O"), ("bauerová", "B-Street"), ("44", "B-Housenumber"), ("Košice", "B-Municipality")]),
                s(&[("PSČ", "O"), ("841", "B-Postcode"), ("04", "I-Postcode"), ("\"úvodzovky\"", "O")]),
            ],
        )
    }

    #[test]
    fn jsonl_shape() {
        let text = to_jsonl(&sample());
        assert!(text.starts_with(r#"{"tokens":["Stupava","Záhumenská","834"],"tags":["B-Municipality","B-Street","B-Housenumber"]}"#));
        assert_eq!(text.lines().count(), 3);
        let back = parse_jsonl(&text, Path::new("sample.jsonl")).unwrap();
        assert_eq!(back, sample());
    }

    #[test]
    fn conll_shape() {
        let text = to_conll(&sample());
        assert!(text.starts_with("Stupava\tB-Municipality\nZáhumenská\tB-Street\n834\tB-Housenumber\n\nĎalšie\tO\n"));
        assert!(text.ends_with("I-Postcode\n\"úvodzovky\"\tO\n\n"));
        assert_eq!(parse_conll(&text, Path::new("sample.conll")).unwrap(), sample());
    }

    fn record_err(r: Result<Corpus>) -> (usize, String) {
        match r {
            Err(Error::Record { line, reason, .. }) => (line, reason),
            other => panic!("expected record error, got {other:?}"),
        }
    }

    #[test]
    fn conll_errors_are_line_numbered() {
        let p = Path::new("x.conll");
        let (line, reason) = record_err(parse_conll("Hlavná\tB-Street\n7\tB-Housenumber\textra\n", p));
        assert_eq!(line, 2);
        assert!(reason.starts_with("malformed record"), "{reason}");
        let (line, reason) = record_err(parse_conll("Hlavná\tB-Street\n\nKošice\tB-City\n", p));
        assert_eq!(line, 3);
        assert!(reason.contains("\"B-City\""), "{reason}");
        let (line, reason) = record_err(parse_conll("ehm\tO\nmládeže\tI-Street\n", p));
        assert_eq!(line, 1);
        assert!(reason.contains("BIO"), "{reason}");
    }

    #[test]
    fn jsonl_errors_are_line_numbered() {
        let p = Path::new("x.jsonl");
        let good = r#"{"tokens":["Košice"],"tags":["B-Municipality"]}"#;
        let (line, reason) = record_err(parse_jsonl(&format!("{good}\n{{\"tokens\":[\"a\",\"b\"],\"tags\":[\"O\"]}}\n"), p));
        assert_eq!(line, 2);
        assert!(reason.starts_with("length mismatch"), "{reason}");
        let (line, reason) = record_err(parse_jsonl(&format!("{good}\n\n{{\"tokens\":[\"a\"],\"tags\":[\"B-City\"]}}\n"), p));
        assert_eq!(line, 3);
        assert!(reason.contains("\"B-City\""));
        let (_, reason) = record_err(parse_jsonl("{\"tokens\":[\"a\"]", p));
        assert!(reason.starts_with("malformed record"));
        let (_, reason) = record_err(parse_jsonl(r#"{"tokens":["a b"],"tags":["O"]}"#, p));
        assert!(reason.contains("invalid token"));
        let (_, reason) = record_err(parse_jsonl(r#"{"tokens":[],"tags":[]}"#, p));
        assert!(reason.contains("empty"), "{reason}");
    }

    #[test]
    fn files_round_trip_byte_for_byte() {
        let dir = tempfile::tempdir().unwrap();
        for (name, fmt) in [("c.jsonl", Format::Jsonl), ("c.conll", Format::Conll)] {
            let p = dir.path().join(name);
            write_corpus(&sample(), &p, fmt).unwrap();
            let first = fs::read(&p).unwrap();
            let back = read_corpus(&p, Format::from_path(&p)).unwrap();
            assert_eq!(back.sentences, sample().sentences);
            write_corpus(&back, &p, fmt).unwrap();
            assert_eq!(fs::read(&p).unwrap(), first);
        }
    }

    #[test]
    fn invalid_utf8_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.conll");
        fs::write(&p, b"Hlavn\xc3\xa1\tB-Street\n\nKo\xffice\tB-Municipality\n").unwrap();
        let (line, reason) = record_err(read_corpus(&p, Format::Conll));
        assert_eq!((line, reason.as_str()), (3, "invalid UTF-8"));
    }
}
