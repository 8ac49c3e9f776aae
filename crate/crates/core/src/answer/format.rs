//! Number formatting shared by tables and narrative, so both carry the same
//! strings.

/// Thousands separator (U+2009 THIN SPACE).
pub const THIN_SPACE: char = '\u{2009}';

pub fn ratio(v: f64) -> String {
    format!("{v:.2}")
}

pub fn percent(v: f64) -> String {
    format!("{v:.2}%")
}

/// Whole currency units with thin-space grouping, e.g. `1 234 567`.
pub fn currency(v: f64) -> String {
    let r = v.round();
    let digits = format!("{}", (r.abs()) as u128);
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(THIN_SPACE);
        }
        out.push(c);
    }
    if r < 0.0 {
        format!("-{out}")
    } else {
        out
    }
}

/// Number-like tokens in free text: digit runs with optional sign, decimal
/// point, thin-space grouping and trailing `%`. Runs touching letters (as in
/// `SC0001` or `Q4`) are part of words and skipped.
pub fn number_tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let numeric = |c: char| c.is_ascii_digit() || c == '.' || c == THIN_SPACE || c == '%' || c == '-';
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !numeric(chars[i]) {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && numeric(chars[i]) {
            i += 1;
        }
        let touches_word =
            (start > 0 && chars[start - 1].is_alphanumeric()) || (i < chars.len() && chars[i].is_alphanumeric());
        let raw: String = chars[start..i].iter().collect();
        let token = raw
            .trim_start_matches([THIN_SPACE, '.'])
            .trim_end_matches([THIN_SPACE, '.', '-']);
        let token = if token.starts_with('-') && !token[1..].starts_with(|c: char| c.is_ascii_digit()) {
            token.trim_start_matches('-')
        } else {
            token
        };
        if !touches_word && token.chars().any(|c| c.is_ascii_digit()) {
            out.push(token.to_string());
        }
    }
    out
}
