//! Identifier keyword matching shared by the resource and taxonomy rules.

/// Case-insensitive occurrence of `keyword` in `ident` starting at a word
/// boundary: the start, after a non-alphanumeric character, or at a
/// camel-case hump (`fooBar`, `HTTPClient`, `v2Bar`).
pub fn keyword_match(ident: &str, keyword: &str) -> bool {
    if keyword.is_empty() {
        return false;
    }
    let chars: Vec<char> = ident.chars().collect();
    let kw: Vec<char> = keyword.chars().collect();
    if kw.len() > chars.len() {
        return false;
    }
    (0..=chars.len() - kw.len()).any(|i| {
        is_boundary(&chars, i)
            && chars[i..i + kw.len()]
                .iter()
                .zip(&kw)
                .all(|(a, b)| a.to_lowercase().eq(b.to_lowercase()))
    })
}

fn is_boundary(chars: &[char], i: usize) -> bool {
    if i == 0 {
        return true;
    }
    let prev = chars[i - 1];
    let cur = chars[i];
    if !prev.is_alphanumeric() {
        return true;
    }
    if cur.is_uppercase() && (prev.is_lowercase() || prev.is_ascii_digit()) {
        return true;
    }
    // end of an acronym: the `C` in `HTTPClient`
    cur.is_uppercase()
        && prev.is_uppercase()
        && chars.get(i + 1).is_some_and(|n| n.is_lowercase())
}

/// Whole-word occurrence of an identifier in source text.
pub fn mentions_identifier(text: &str, name: &str) -> bool {
    if name.is_empty() {
        return false;
    }
    let is_word = |c: char| c.is_alphanumeric() || c == '_';
    text.match_indices(name).any(|(at, _)| {
        let before = text[..at].chars().next_back();
        let after = text[at + name.len()..].chars().next();
        !before.is_some_and(is_word) && !after.is_some_and(is_word)
    })
}
