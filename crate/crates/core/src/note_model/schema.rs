use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardizedNote {
    #[serde(rename = "HISTORY")]
    pub history: SectionHistory,
    #[serde(rename = "VITAL SIGNS")]
    pub vital_signs: SectionVitals,
    #[serde(rename = "EXAMINATION")]
    pub examination: SectionExam,
    #[serde(rename = "LABS")]
    pub labs: String,
    #[serde(rename = "RADIOLOGY")]
    pub radiology: String,
    #[serde(rename = "IMPRESSION")]
    pub impression: SectionImpression,
    #[serde(rename = "PLAN")]
    pub plan: SectionPlan,
    #[serde(rename = "Metrics")]
    pub metrics: NoteMetrics,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionHistory {
    #[serde(rename = "Chief Complaint")]
    pub chief_complaint: String,
    #[serde(rename = "Interim History")]
    pub interim_history: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionVitals {
    #[serde(rename = "Blood Pressure")]
    pub blood_pressure: String,
    #[serde(rename = "Pulse")]
    pub pulse: String,
    #[serde(rename = "Temperature")]
    pub temperature: String,
    #[serde(rename = "Weight")]
    pub weight: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionExam {
    #[serde(rename = "Mental Status")]
    pub mental_status: String,
    #[serde(rename = "Cranial Nerves")]
    pub cranial_nerves: String,
    #[serde(rename = "Motor")]
    pub motor: String,
    #[serde(rename = "Sensory")]
    pub sensory: String,
    #[serde(rename = "Reflexes")]
    pub reflexes: String,
    #[serde(rename = "Coordination")]
    pub coordination: String,
    #[serde(rename = "Gait and Station")]
    pub gait_and_station: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionImpression {
    #[serde(rename = "Assessment")]
    pub assessment: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionPlan {
    #[serde(rename = "Testing")]
    pub testing: String,
    #[serde(rename = "Education Provided")]
    pub education_provided: EducationProvided,
    #[serde(rename = "Return Visit")]
    pub return_visit: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EducationProvided {
    #[serde(rename = "Instructions")]
    pub instructions: String,
    #[serde(rename = "Barriers to Learning")]
    pub barriers_to_learning: String,
    #[serde(rename = "Content")]
    pub content: String,
    #[serde(rename = "Outcome")]
    pub outcome: String,
}

/// Per-note standardization ledger.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoteMetrics {
    #[serde(rename = "Grammatical Errors")]
    pub grammatical_errors: u64,
    #[serde(rename = "Abbreviations Expanded")]
    pub abbreviations_expanded: Vec<String>,
    #[serde(rename = "Spelling Errors")]
    pub spelling_errors: Vec<String>,
    #[serde(rename = "Non-Standard Terms")]
    pub non_standard_terms: Vec<String>,
}

/// The seven canonical top-level sections, in schema order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Section {
    #[serde(rename = "HISTORY")]
    History,
    #[serde(rename = "VITAL SIGNS")]
    VitalSigns,
    #[serde(rename = "EXAMINATION")]
    Examination,
    #[serde(rename = "LABS")]
    Labs,
    #[serde(rename = "RADIOLOGY")]
    Radiology,
    #[serde(rename = "IMPRESSION")]
    Impression,
    #[serde(rename = "PLAN")]
    Plan,
}

impl Section {
    pub const ALL: [Section; 7] = [
        Section::History,
        Section::VitalSigns,
        Section::Examination,
        Section::Labs,
        Section::Radiology,
        Section::Impression,
        Section::Plan,
    ];

    pub fn heading(self) -> &'static str {
        match self {
            Section::History => "HISTORY",
            Section::VitalSigns => "VITAL SIGNS",
            Section::Examination => "EXAMINATION",
            Section::Labs => "LABS",
            Section::Radiology => "RADIOLOGY",
            Section::Impression => "IMPRESSION",
            Section::Plan => "PLAN",
        }
    }

    pub fn from_heading(s: &str) -> Option<Section> {
        Section::ALL.into_iter().find(|sec| sec.heading() == s)
    }

    pub fn fields(self) -> impl Iterator<Item = NoteField> {
        NoteField::ALL.into_iter().filter(move |f| f.section() == self)
    }
}

/// Every string leaf of the schema. The external path is the `/`-joined key chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NoteField {
    ChiefComplaint,
    InterimHistory,
    BloodPressure,
    Pulse,
    Temperature,
    Weight,
    MentalStatus,
    CranialNerves,
    Motor,
    Sensory,
    Reflexes,
    Coordination,
    GaitAndStation,
    Labs,
    Radiology,
    Assessment,
    Testing,
    EducationInstructions,
    EducationBarriers,
    EducationContent,
    EducationOutcome,
    ReturnVisit,
}

impl NoteField {
    pub const ALL: [NoteField; 22] = [
        NoteField::ChiefComplaint,
        NoteField::InterimHistory,
        NoteField::BloodPressure,
        NoteField::Pulse,
        NoteField::Temperature,
        NoteField::Weight,
        NoteField::MentalStatus,
        NoteField::CranialNerves,
        NoteField::Motor,
        NoteField::Sensory,
        NoteField::Reflexes,
        NoteField::Coordination,
        NoteField::GaitAndStation,
        NoteField::Labs,
        NoteField::Radiology,
        NoteField::Assessment,
        NoteField::Testing,
        NoteField::EducationInstructions,
        NoteField::EducationBarriers,
        NoteField::EducationContent,
        NoteField::EducationOutcome,
        NoteField::ReturnVisit,
    ];

    /// External path, e.g. `PLAN/Education Provided/Instructions`.
    pub fn path(self) -> &'static str {
        use NoteField::*;
        match self {
            ChiefComplaint => "HISTORY/Chief Complaint",
            InterimHistory => "HISTORY/Interim History",
            BloodPressure => "VITAL SIGNS/Blood Pressure",
            Pulse => "VITAL SIGNS/Pulse",
            Temperature => "VITAL SIGNS/Temperature",
            Weight => "VITAL SIGNS/Weight",
            MentalStatus => "EXAMINATION/Mental Status",
            CranialNerves => "EXAMINATION/Cranial Nerves",
            Motor => "EXAMINATION/Motor",
            Sensory => "EXAMINATION/Sensory",
            Reflexes => "EXAMINATION/Reflexes",
            Coordination => "EXAMINATION/Coordination",
            GaitAndStation => "EXAMINATION/Gait and Station",
            Labs => "LABS",
            Radiology => "RADIOLOGY",
            Assessment => "IMPRESSION/Assessment",
            Testing => "PLAN/Testing",
            EducationInstructions => "PLAN/Education Provided/Instructions",
            EducationBarriers => "PLAN/Education Provided/Barriers to Learning",
            EducationContent => "PLAN/Education Provided/Content",
            EducationOutcome => "PLAN/Education Provided/Outcome",
            ReturnVisit => "PLAN/Return Visit",
        }
    }

    pub fn from_path(path: &str) -> Option<NoteField> {
        NoteField::ALL.into_iter().find(|f| f.path() == path)
    }

    pub fn section(self) -> Section {
        use NoteField::*;
        match self {
            ChiefComplaint | InterimHistory => Section::History,
            BloodPressure | Pulse | Temperature | Weight => Section::VitalSigns,
            MentalStatus | CranialNerves | Motor | Sensory | Reflexes | Coordination
            | GaitAndStation => Section::Examination,
            Labs => Section::Labs,
            Radiology => Section::Radiology,
            Assessment => Section::Impression,
            Testing | EducationInstructions | EducationBarriers | EducationContent
            | EducationOutcome | ReturnVisit => Section::Plan,
        }
    }
}

impl StandardizedNote {
    pub fn field(&self, field: NoteField) -> &str {
        use NoteField::*;
        match field {
            ChiefComplaint => &self.history.chief_complaint,
            InterimHistory => &self.history.interim_history,
            BloodPressure => &self.vital_signs.blood_pressure,
            Pulse => &self.vital_signs.pulse,
            Temperature => &self.vital_signs.temperature,
            Weight => &self.vital_signs.weight,
            MentalStatus => &self.examination.mental_status,
            CranialNerves => &self.examination.cranial_nerves,
            Motor => &self.examination.motor,
            Sensory => &self.examination.sensory,
            Reflexes => &self.examination.reflexes,
            Coordination => &self.examination.coordination,
            GaitAndStation => &self.examination.gait_and_station,
            Labs => &self.labs,
            Radiology => &self.radiology,
            Assessment => &self.impression.assessment,
            Testing => &self.plan.testing,
            EducationInstructions => &self.plan.education_provided.instructions,
            EducationBarriers => &self.plan.education_provided.barriers_to_learning,
            EducationContent => &self.plan.education_provided.content,
            EducationOutcome => &self.plan.education_provided.outcome,
            ReturnVisit => &self.plan.return_visit,
        }
    }

    pub fn field_mut(&mut self, field: NoteField) -> &mut String {
        use NoteField::*;
        match field {
            ChiefComplaint => &mut self.history.chief_complaint,
            InterimHistory => &mut self.history.interim_history,
            BloodPressure => &mut self.vital_signs.blood_pressure,
            Pulse => &mut self.vital_signs.pulse,
            Temperature => &mut self.vital_signs.temperature,
            Weight => &mut self.vital_signs.weight,
            MentalStatus => &mut self.examination.mental_status,
            CranialNerves => &mut self.examination.cranial_nerves,
            Motor => &mut self.examination.motor,
            Sensory => &mut self.examination.sensory,
            Reflexes => &mut self.examination.reflexes,
            Coordination => &mut self.examination.coordination,
            GaitAndStation => &mut self.examination.gait_and_station,
            Labs => &mut self.labs,
            Radiology => &mut self.radiology,
            Assessment => &mut self.impression.assessment,
            Testing => &mut self.plan.testing,
            EducationInstructions => &mut self.plan.education_provided.instructions,
            EducationBarriers => &mut self.plan.education_provided.barriers_to_learning,
            EducationContent => &mut self.plan.education_provided.content,
            EducationOutcome => &mut self.plan.education_provided.outcome,
            ReturnVisit => &mut self.plan.return_visit,
        }
    }

    /// Non-empty leaves in schema order.
    pub fn populated_fields(&self) -> impl Iterator<Item = (NoteField, &str)> {
        NoteField::ALL
            .into_iter()
            .map(|f| (f, self.field(f)))
            .filter(|(_, t)| !t.trim().is_empty())
    }

    /// All leaf text joined with newlines, in schema order.
    pub fn content_text(&self) -> String {
        self.populated_fields()
            .map(|(_, t)| t)
            .collect::<Vec<_>>()
            .join("\n")
    }
}
