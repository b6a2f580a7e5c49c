/// Pulls DSL source out of a chat completion.
///
/// Preference order: the first triple-backtick block tagged `reward`, then the
/// first block with no tag at all. Blocks tagged anything else are ignored, as
/// is text outside fences. Returns the block body without the fence lines.
pub fn extract_block(text: &str) -> Option<String> {
    let blocks = fenced_blocks(text);
    blocks
        .iter()
        .find(|(tag, _)| tag == "reward")
        .or_else(|| blocks.iter().find(|(tag, _)| tag.is_empty()))
        .map(|(_, body)| body.clone())
}

/// All fenced blocks as (tag, body), in document order. An unterminated fence
/// runs to the end of the text.
fn fenced_blocks(text: &str) -> Vec<(String, String)> {
    let mut blocks = Vec::new();
    let mut open: Option<(String, Vec<&str>)> = None;
    for line in text.lines() {
        let trimmed = line.trim_start();
        match open.take() {
            None => {
                if let Some(rest) = trimmed.strip_prefix("```") {
                    open = Some((rest.trim().to_string(), Vec::new()));
                }
            }
            Some((tag, body)) => {
                if trimmed.trim_end() == "```" {
                    blocks.push((tag, body.join("\n")));
                } else {
                    let mut body = body;
                    body.push(line);
                    open = Some((tag, body));
                }
            }
        }
    }
    if let Some((tag, body)) = open {
        blocks.push((tag, body.join("\n")));
    }
    blocks
}
