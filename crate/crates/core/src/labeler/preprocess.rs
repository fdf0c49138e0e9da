use super::LabelError;

/// Strips parenthesized material and quoted example sentences from a raw
/// gloss, keeping the first remaining `;`-separated segment.
pub fn preprocess_gloss(gloss: &str) -> Result<String, LabelError> {
    let mut depth = 0usize;
    let mut stripped = String::with_capacity(gloss.len());
    for ch in gloss.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ if depth == 0 => stripped.push(ch),
            _ => {}
        }
    }
    let kept = stripped
        .split(';')
        .find(|seg| {
            let seg = seg.trim_start();
            !seg.is_empty() && !seg.starts_with('"')
        })
        .map(|seg| seg.split_whitespace().collect::<Vec<_>>().join(" "))
        .unwrap_or_default();
    if kept.is_empty() {
        Err(LabelError::EmptyDefinition)
    } else {
        Ok(kept)
    }
}
