//! Shared token normalization for dictionary definitions and running text.

/// Normalizes one raw whitespace-delimited chunk: lowercases it and strips
/// every non-alphanumeric character. Returns `None` when nothing survives,
/// so punctuation-only chunks disappear rather than becoming empty tokens.
pub(crate) fn normalize(raw: &str) -> Option<String> {
    let token: String = raw
        .chars()
        .flat_map(char::to_lowercase)
        .filter(|c| c.is_alphanumeric())
        .collect();
    if token.is_empty() {
        None
    } else {
        Some(token)
    }
}

#[cfg(test)]
mod tests {
    use super::normalize;

    #[test]
    fn lowercases_and_strips_punctuation() {
        assert_eq!(normalize("Cat,"), Some("cat".to_string()));
        assert_eq!(normalize("don't"), Some("dont".to_string()));
        assert_eq!(normalize("B2B"), Some("b2b".to_string()));
    }

    #[test]
    fn punctuation_only_chunks_vanish() {
        assert_eq!(normalize("--"), None);
        assert_eq!(normalize("..."), None);
        assert_eq!(normalize(""), None);
    }
}
