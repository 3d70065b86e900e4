/// A hand-built context for the ambiguous abbreviation `MS` and the sense its
/// cue words call for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisambiguationCase {
    pub context: &'static str,
    pub expected: &'static str,
    /// No cue word of any sense occurs in the context.
    pub cue_free: bool,
}

const fn case(context: &'static str, expected: &'static str) -> DisambiguationCase {
    DisambiguationCase { context, expected, cue_free: false }
}

const fn bare(context: &'static str) -> DisambiguationCase {
    DisambiguationCase { context, expected: "multiple sclerosis", cue_free: true }
}

/// Contexts covering the three senses of `MS`, mixed-cue ties and cue-free fallback.
pub const MS_SUITE: [DisambiguationCase; 25] = [
    case("Patient with relapsing remitting MS on ocrelizumab.", "multiple sclerosis"),
    case("MS diagnosed in 2015 after optic neuritis.", "multiple sclerosis"),
    case("MRI shows new lesions consistent with MS flare.", "multiple sclerosis"),
    case("Secondary progressive MS with gradual decline.", "multiple sclerosis"),
    case("History of MS, previously on natalizumab.", "multiple sclerosis"),
    case("MS relapse treated with steroids last spring.", "multiple sclerosis"),
    case("She has demyelinating disease, likely MS.", "multiple sclerosis"),
    case("MS: alert and oriented times three.", "mental status"),
    case("MS exam shows the patient awake and attentive.", "mental status"),
    case("Altered MS, lethargic and drowsy this morning.", "mental status"),
    case("MS intact, normal cognition and orientation.", "mental status"),
    case("Patient confused, MS waxing and waning.", "mental status"),
    case("MS notable for slowed mentation.", "mental status"),
    case("Give MS 4 milligrams IV for pain.", "morphine sulfate"),
    case("MS injection every four hours as needed.", "morphine sulfate"),
    case("Switched from PCA to oral MS.", "morphine sulfate"),
    case("MS dose increased for opioid tolerance.", "morphine sulfate"),
    case("Opioid analgesic MS contin prescribed.", "morphine sulfate"),
    case("Narcotic regimen includes MS for breakthrough pain.", "morphine sulfate"),
    // two hits each; the higher-priority sense wins the tie
    case("Alert and oriented; MS with relapsing course and new lesions.", "multiple sclerosis"),
    case("MS: alert, oriented, awake; history of optic neuritis.", "mental status"),
    case("Morphine dose and opioid plan; MS relapsing.", "morphine sulfate"),
    bare("MS noted in chart."),
    bare("Follow up regarding MS next week."),
    bare("MS"),
];
