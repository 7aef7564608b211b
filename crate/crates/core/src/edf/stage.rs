//! Five-class sleep-stage taxonomy and the raw-label remapping
//! (S1 -> N1, S2 -> N2, S3/S4 -> N3).

pub const CLASS_COUNT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StageLabel {
    Wake,
    N1,
    N2,
    N3,
    Rem,
    /// Movement time, unscored epochs, anything outside the five classes.
    /// Never enters a training fold.
    Excluded,
}

impl StageLabel {
    /// Class index for trainable stages, None for Excluded.
    pub fn class_index(self) -> Option<usize> {
        match self {
            StageLabel::Wake => Some(0),
            StageLabel::N1 => Some(1),
            StageLabel::N2 => Some(2),
            StageLabel::N3 => Some(3),
            StageLabel::Rem => Some(4),
            StageLabel::Excluded => None,
        }
    }

    pub fn from_class_index(index: usize) -> Option<Self> {
        match index {
            0 => Some(StageLabel::Wake),
            1 => Some(StageLabel::N1),
            2 => Some(StageLabel::N2),
            3 => Some(StageLabel::N3),
            4 => Some(StageLabel::Rem),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StageLabel::Wake => "W",
            StageLabel::N1 => "N1",
            StageLabel::N2 => "N2",
            StageLabel::N3 => "N3",
            StageLabel::Rem => "REM",
            StageLabel::Excluded => "Excluded",
        }
    }

    /// Raw hypnogram text for each trainable class (the fixture generator's
    /// inverse of `remap_stage`; S3 is the representative N3 source).
    pub fn raw_label(self) -> &'static str {
        match self {
            StageLabel::Wake => "Sleep stage W",
            StageLabel::N1 => "Sleep stage 1",
            StageLabel::N2 => "Sleep stage 2",
            StageLabel::N3 => "Sleep stage 3",
            StageLabel::Rem => "Sleep stage R",
            StageLabel::Excluded => "Sleep stage ?",
        }
    }
}

/// Total remap from raw hypnogram text to the five-class taxonomy.
/// Unknown or non-stage text (movement, artifacts) maps to Excluded.
pub fn remap_stage(raw_label: &str) -> StageLabel {
    match raw_label.trim() {
        "Sleep stage W" => StageLabel::Wake,
        "Sleep stage 1" => StageLabel::N1,
        "Sleep stage 2" => StageLabel::N2,
        "Sleep stage 3" | "Sleep stage 4" => StageLabel::N3,
        "Sleep stage R" => StageLabel::Rem,
        _ => StageLabel::Excluded,
    }
}
