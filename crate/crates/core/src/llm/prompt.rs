use crate::corpus::SourceNote;

/// The standardization prompt. The instruction text is followed by a clearly
/// delimited output-format block; the note text is appended after it.
pub const PROMPT_TEMPLATE: &str = include_str!("../../resources/prompt_template.txt");

pub const EXTENSION_MARKER: &str = "### BEGIN OUTPUT FORMAT EXTENSION ###";

/// The instruction text without the output-format block.
pub fn instructions() -> &'static str {
    let end = PROMPT_TEMPLATE
        .find(EXTENSION_MARKER)
        .expect("template has an extension block");
    PROMPT_TEMPLATE[..end].trim_end()
}

pub fn build_prompt(note: &SourceNote) -> String {
    let mut p = String::with_capacity(PROMPT_TEMPLATE.len() + note.note_text.len());
    p.push_str(PROMPT_TEMPLATE);
    p.push_str(&note.note_text);
    p
}
