//! Character-offset text helpers.
//!
//! All offsets in the workbench count Unicode scalar values, 0-based, with
//! exclusive ends.

/// Number of characters in `text`.
pub fn char_len(text: &str) -> usize {
    text.chars().count()
}

/// The substring between character offsets `start..end`.
pub fn char_slice(text: &str, start: usize, end: usize) -> &str {
    let mut indices = text.char_indices().map(|(i, _)| i).chain([text.len()]);
    let from = indices.nth(start).unwrap_or(text.len());
    let to = if end > start {
        indices.nth(end - start - 1).unwrap_or(text.len())
    } else {
        from
    };
    &text[from..to]
}

/// Start offsets of every case-insensitive whole-word occurrence of `word`.
///
/// A match must be bounded on both sides by a non-letter or the string edge.
pub fn whole_word_occurrences(text: &str, word: &str) -> Vec<usize> {
    let hay: Vec<char> = text.chars().collect();
    let needle: Vec<char> = word.chars().collect();
    if needle.is_empty() || needle.len() > hay.len() {
        return Vec::new();
    }
    let mut found = Vec::new();
    for start in 0..=hay.len() - needle.len() {
        let end = start + needle.len();
        if start > 0 && hay[start - 1].is_alphabetic() {
            continue;
        }
        if end < hay.len() && hay[end].is_alphabetic() {
            continue;
        }
        if hay[start..end]
            .iter()
            .zip(&needle)
            .all(|(h, n)| chars_eq_ignore_case(*h, *n))
        {
            found.push(start);
        }
    }
    found
}

fn chars_eq_ignore_case(a: char, b: char) -> bool {
    a == b || a.to_lowercase().eq(b.to_lowercase())
}

/// Lowercased words of `text`: maximal runs of alphabetic characters.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slices_by_chars() {
        let t = "Zoë moved through";
        assert_eq!(char_slice(t, 0, 3), "Zoë");
        assert_eq!(char_slice(t, 10, 17), "through");
        assert_eq!(char_slice(t, 4, 4), "");
        assert_eq!(char_len(t), 17);
    }

    #[test]
    fn whole_words_only() {
        let t = "Standing by the nearby gate, By the way: by.";
        assert_eq!(whole_word_occurrences(t, "by"), vec![9, 29, 41]);
        assert!(whole_word_occurrences("nearby", "by").is_empty());
        assert!(whole_word_occurrences("", "by").is_empty());
    }

    #[test]
    fn offsets_count_scalar_values() {
        let t = "café through";
        assert_eq!(whole_word_occurrences(t, "through"), vec![5]);
    }

    #[test]
    fn word_split() {
        assert_eq!(words("Out of the  house!"), vec!["out", "of", "the", "house"]);
    }
}
