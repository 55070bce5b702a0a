//! The known-preposition list, including phrasal prepositions.

use std::collections::BTreeSet;
use std::io::BufRead;

use crate::text::words;
use crate::tsv::TsvError;

/// Lowercased prepositions; multiword entries are stored word-normalized
/// ("out  of" becomes "out of").
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrepositionList {
    entries: BTreeSet<String>,
    longest: usize,
}

impl PrepositionList {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut list = PrepositionList::default();
        for e in entries {
            list.insert(e.as_ref());
        }
        list
    }

    pub fn insert(&mut self, entry: &str) {
        let ws = words(entry);
        if ws.is_empty() {
            return;
        }
        self.longest = self.longest.max(ws.len());
        self.entries.insert(ws.join(" "));
    }

    /// One preposition per line; blank lines and `#` comments are skipped.
    pub fn from_reader<R: BufRead>(source: R) -> Result<Self, TsvError> {
        let mut list = PrepositionList::default();
        for (i, line) in source.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if !trimmed.chars().all(|c| c.is_alphabetic() || c == ' ') {
                return Err(TsvError::row(i + 1, format!("not a preposition: {trimmed:?}")));
            }
            list.insert(trimmed);
        }
        Ok(list)
    }

    pub fn contains(&self, prep: &str) -> bool {
        self.entries.contains(&words(prep).join(" "))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }

    /// Longest entry that `ws` starts with, as (entry, word count).
    pub fn longest_prefix<S: AsRef<str>>(&self, ws: &[S]) -> Option<(&str, usize)> {
        (1..=self.longest.min(ws.len())).rev().find_map(|n| {
            let candidate = join(&ws[..n]);
            self.entries.get(&candidate).map(|e| (e.as_str(), n))
        })
    }

    /// Longest entry that `ws` ends with, as (entry, word count).
    pub fn longest_suffix<S: AsRef<str>>(&self, ws: &[S]) -> Option<(&str, usize)> {
        (1..=self.longest.min(ws.len())).rev().find_map(|n| {
            let candidate = join(&ws[ws.len() - n..]);
            self.entries.get(&candidate).map(|e| (e.as_str(), n))
        })
    }
}

fn join<S: AsRef<str>>(ws: &[S]) -> String {
    ws.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiword_longest_match() {
        let list = PrepositionList::new(["of", "out", "out of", "by"]);
        assert_eq!(list.longest_prefix(&["out", "of", "the"]), Some(("out of", 2)));
        assert_eq!(list.longest_prefix(&["out", "there"]), Some(("out", 1)));
        assert_eq!(list.longest_suffix(&["moving", "out", "of"]), Some(("out of", 2)));
        assert_eq!(list.longest_suffix(&["the", "house"]), None);
    }

    #[test]
    fn reads_list_file() {
        let src = "# comment\nby\n\nOut  of\n";
        let list = PrepositionList::from_reader(src.as_bytes()).unwrap();
        assert!(list.contains("out of"));
        assert!(list.contains("By"));
        assert_eq!(list.len(), 2);
    }

    #[test]
    fn rejects_punctuation() {
        assert!(PrepositionList::from_reader("by,\n".as_bytes()).is_err());
    }
}
