//! Line-oriented `key = value` documents with `#` comments.
//!
//! Shared by term sheets and model spec files.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits a document into entries. Lines without `=` are returned as errors
/// carrying their 1-based line number.
pub(crate) fn parse_document(text: &str) -> (Vec<Entry>, Vec<(usize, String)>) {
    let mut entries = Vec::new();
    let mut bad = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        match content.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => entries.push(Entry {
                line,
                key: k.trim().to_ascii_lowercase(),
                value: v.trim().to_string(),
            }),
            _ => bad.push((line, raw.trim().to_string())),
        }
    }
    (entries, bad)
}
