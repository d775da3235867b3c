//! Moral emotions, moral-foundation value poles and Plutchik emotions.
//!
//! [`TABLE`] is the manual mapping from Haidt's moral emotions onto value
//! poles and onto Plutchik emotion labels. It is static data; lookups never
//! allocate beyond their result.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::OppositionTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("unknown moral emotion {0:?}")]
    UnknownMoralEmotion(String),
    #[error("{0:?} is not a basic Plutchik emotion")]
    NotBasic(String),
    #[error("unknown emotion label {0:?}")]
    UnknownEmotion(String),
    #[error("unknown foundation {0:?}")]
    UnknownFoundation(String),
    #[error("unknown polarity {0:?}")]
    UnknownPolarity(String),
    #[error("unknown value pole {0:?}")]
    UnknownPole(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Foundation {
    Care,
    Fairness,
    Loyalty,
    Authority,
    Sanctity,
}

impl Foundation {
    pub const ALL: [Foundation; 5] = [
        Foundation::Care,
        Foundation::Fairness,
        Foundation::Loyalty,
        Foundation::Authority,
        Foundation::Sanctity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Foundation::Care => "care",
            Foundation::Fairness => "fairness",
            Foundation::Loyalty => "loyalty",
            Foundation::Authority => "authority",
            Foundation::Sanctity => "sanctity",
        }
    }

    pub fn vice_name(self) -> &'static str {
        match self {
            Foundation::Care => "harm",
            Foundation::Fairness => "cheating",
            Foundation::Loyalty => "betrayal",
            Foundation::Authority => "subversion",
            Foundation::Sanctity => "degradation",
        }
    }
}

impl fmt::Display for Foundation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Foundation {
    type Err = MappingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Foundation::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| MappingError::UnknownFoundation(s.trim().to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Virtue,
    Vice,
}

impl Polarity {
    pub fn flip(self) -> Self {
        match self {
            Polarity::Virtue => Polarity::Vice,
            Polarity::Vice => Polarity::Virtue,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Polarity::Virtue => "virtue",
            Polarity::Vice => "vice",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Polarity {
    type Err = MappingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "virtue" | "+" => Ok(Polarity::Virtue),
            "vice" | "-" => Ok(Polarity::Vice),
            other => Err(MappingError::UnknownPolarity(other.to_string())),
        }
    }
}

/// One of the ten poles: a foundation with its virtue or vice polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ValuePole {
    pub foundation: Foundation,
    pub polarity: Polarity,
}

impl ValuePole {
    pub const fn new(foundation: Foundation, polarity: Polarity) -> Self {
        Self { foundation, polarity }
    }

    pub const fn virtue(foundation: Foundation) -> Self {
        Self::new(foundation, Polarity::Virtue)
    }

    pub const fn vice(foundation: Foundation) -> Self {
        Self::new(foundation, Polarity::Vice)
    }

    /// All ten poles, virtue before vice within each foundation.
    pub fn all() -> impl Iterator<Item = ValuePole> {
        Foundation::ALL
            .into_iter()
            .flat_map(|f| [ValuePole::virtue(f), ValuePole::vice(f)])
    }

    /// "sanctity" for the virtue pole, "degradation" for the vice pole.
    pub fn label(self) -> &'static str {
        match self.polarity {
            Polarity::Virtue => self.foundation.name(),
            Polarity::Vice => self.foundation.vice_name(),
        }
    }

    pub fn from_label(label: &str) -> Result<Self, MappingError> {
        ValuePole::all()
            .find(|p| p.label().eq_ignore_ascii_case(label.trim()))
            .ok_or_else(|| MappingError::UnknownPole(label.trim().to_string()))
    }

    pub fn opposite(self) -> Self {
        opposite_value_pole(self)
    }
}

impl fmt::Display for ValuePole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

macro_rules! emotions {
    ($($variant:ident => $label:literal),* $(,)?) => {
        /// Plutchik wheel labels: basic emotions, their intensity grades and
        /// the primary dyads.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum Emotion {
            $($variant),*
        }

        impl Emotion {
            pub const ALL: &'static [Emotion] = &[$(Emotion::$variant),*];

            pub fn label(self) -> &'static str {
                match self {
                    $(Emotion::$variant => $label),*
                }
            }
        }
    };
}

emotions! {
    Joy => "joy",
    Trust => "trust",
    Fear => "fear",
    Surprise => "surprise",
    Sadness => "sadness",
    Disgust => "disgust",
    Anger => "anger",
    Anticipation => "anticipation",
    Ecstasy => "ecstasy",
    Admiration => "admiration",
    Terror => "terror",
    Amazement => "amazement",
    Grief => "grief",
    Loathing => "loathing",
    Rage => "rage",
    Vigilance => "vigilance",
    Serenity => "serenity",
    Acceptance => "acceptance",
    Apprehension => "apprehension",
    Distraction => "distraction",
    Pensiveness => "pensiveness",
    Boredom => "boredom",
    Annoyance => "annoyance",
    Interest => "interest",
    Love => "love",
    Submission => "submission",
    Awe => "awe",
    Disapproval => "disapproval",
    Remorse => "remorse",
    Contempt => "contempt",
    Aggressiveness => "aggressiveness",
    Optimism => "optimism",
}

impl Emotion {
    pub const BASIC: [Emotion; 8] = [
        Emotion::Joy,
        Emotion::Trust,
        Emotion::Fear,
        Emotion::Surprise,
        Emotion::Sadness,
        Emotion::Disgust,
        Emotion::Anger,
        Emotion::Anticipation,
    ];

    pub fn is_basic(self) -> bool {
        Self::BASIC.contains(&self)
    }

    /// The basic emotions a label is made of: itself for a basic emotion,
    /// the graded basic for intensity variants, both members for a dyad.
    pub fn components(self) -> &'static [Emotion] {
        use Emotion::*;
        match self {
            Joy | Ecstasy | Serenity => &[Joy],
            Trust | Admiration | Acceptance => &[Trust],
            Fear | Terror | Apprehension => &[Fear],
            Surprise | Amazement | Distraction => &[Surprise],
            Sadness | Grief | Pensiveness => &[Sadness],
            Disgust | Loathing | Boredom => &[Disgust],
            Anger | Rage | Annoyance => &[Anger],
            Anticipation | Vigilance | Interest => &[Anticipation],
            Love => &[Joy, Trust],
            Submission => &[Trust, Fear],
            Awe => &[Fear, Surprise],
            Disapproval => &[Surprise, Sadness],
            Remorse => &[Sadness, Disgust],
            Contempt => &[Disgust, Anger],
            Aggressiveness => &[Anger, Anticipation],
            Optimism => &[Anticipation, Joy],
        }
    }

    /// True if some basic component of `self` sits opposite some basic
    /// component of `other` on the wheel.
    pub fn contrasts_with(self, other: Emotion) -> bool {
        self.components().iter().any(|a| {
            other
                .components()
                .iter()
                .any(|b| opposite_emotion(*a).ok() == Some(*b))
        })
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Emotion {
    type Err = MappingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Emotion::ALL
            .iter()
            .copied()
            .find(|e| e.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| MappingError::UnknownEmotion(s.to_string()))
    }
}

/// One row of the moral-emotion mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MappingRow {
    pub moral_emotion: &'static str,
    pub value_poles: &'static [ValuePole],
    pub plutchik_emotions: &'static [Emotion],
}

use Foundation::*;

const fn row(
    moral_emotion: &'static str,
    value_poles: &'static [ValuePole],
    plutchik_emotions: &'static [Emotion],
) -> MappingRow {
    MappingRow { moral_emotion, value_poles, plutchik_emotions }
}

/// Haidt moral emotion → value pole(s) → Plutchik emotion(s), 17 rows.
///
/// "Loyalty -" in the Shame row is read as the betrayal pole.
pub static TABLE: [MappingRow; 17] = [
    row("Admiration", &[ValuePole::virtue(Authority)], &[Emotion::Awe]),
    row("Anger", &[ValuePole::vice(Fairness)], &[Emotion::Anger]),
    row(
        "Compassion",
        &[ValuePole::vice(Care)],
        &[Emotion::Grief, Emotion::Sadness, Emotion::Pensiveness],
    ),
    row(
        "Contempt",
        &[ValuePole::vice(Loyalty), ValuePole::vice(Fairness)],
        &[Emotion::Disapproval],
    ),
    row("Disgust", &[ValuePole::vice(Sanctity)], &[Emotion::Disgust, Emotion::Loathing]),
    row("Embarrassment", &[ValuePole::vice(Fairness)], &[Emotion::Annoyance]),
    row("Evaluation", &[ValuePole::virtue(Sanctity)], &[Emotion::Awe]),
    row("Fear", &[ValuePole::vice(Authority)], &[Emotion::Terror]),
    row(
        "Gratitude",
        &[ValuePole::virtue(Fairness)],
        &[Emotion::Vigilance, Emotion::Anticipation, Emotion::Interest],
    ),
    row("Guilt", &[ValuePole::vice(Fairness)], &[Emotion::Remorse]),
    row(
        "Pity",
        &[ValuePole::vice(Care)],
        &[Emotion::Grief, Emotion::Sadness, Emotion::Pensiveness],
    ),
    row(
        "Pride",
        &[ValuePole::virtue(Loyalty)],
        &[Emotion::Admiration, Emotion::Trust, Emotion::Acceptance],
    ),
    row("Rage", &[ValuePole::vice(Loyalty)], &[Emotion::Rage]),
    row("Remorse", &[ValuePole::vice(Care)], &[Emotion::Grief, Emotion::Sadness]),
    row("Reproach", &[ValuePole::vice(Loyalty)], &[Emotion::Aggressiveness]),
    row("Respect", &[ValuePole::virtue(Authority)], &[Emotion::Submission, Emotion::Fear]),
    row("Shame", &[ValuePole::vice(Loyalty)], &[Emotion::Remorse]),
];

pub fn rows() -> &'static [MappingRow] {
    &TABLE
}

/// The value column of the row for `moral_emotion` (case-insensitive).
pub fn value_poles_for_moral_emotion(moral_emotion: &str) -> Result<Vec<ValuePole>, MappingError> {
    TABLE
        .iter()
        .find(|r| r.moral_emotion.eq_ignore_ascii_case(moral_emotion.trim()))
        .map(|r| r.value_poles.to_vec())
        .ok_or_else(|| MappingError::UnknownMoralEmotion(moral_emotion.trim().to_string()))
}

/// Union of the mapped emotions of every row citing `pole`, in order of
/// first appearance down the table.
pub fn plutchik_for_value_pole(pole: ValuePole) -> Vec<Emotion> {
    let mut out = Vec::new();
    for r in TABLE.iter().filter(|r| r.value_poles.contains(&pole)) {
        for e in r.plutchik_emotions {
            if !out.contains(e) {
                out.push(*e);
            }
        }
    }
    out
}

pub fn opposite_value_pole(pole: ValuePole) -> ValuePole {
    ValuePole::new(pole.foundation, pole.polarity.flip())
}

/// Opposite basic emotion on the wheel.
pub fn opposite_emotion(emotion: Emotion) -> Result<Emotion, MappingError> {
    use Emotion::*;
    Ok(match emotion {
        Joy => Sadness,
        Sadness => Joy,
        Trust => Disgust,
        Disgust => Trust,
        Fear => Anger,
        Anger => Fear,
        Surprise => Anticipation,
        Anticipation => Surprise,
        other => return Err(MappingError::NotBasic(other.label().to_string())),
    })
}

/// Term-level oppositions implied by the mapping: the four basic-emotion
/// pairs and the virtue/vice name of every foundation.
pub fn default_oppositions() -> OppositionTable {
    let mut table = OppositionTable::new();
    for e in Emotion::BASIC {
        let o = opposite_emotion(e).expect("basic emotions have opposites");
        table.insert(e.label(), o.label()).expect("distinct labels");
    }
    for f in Foundation::ALL {
        table.insert(f.name(), f.vice_name()).expect("distinct labels");
    }
    table
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub foundation: Foundation,
    pub polarity: Polarity,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingRecord {
    pub moral_emotion: String,
    pub value_poles: Vec<PoleRecord>,
    pub plutchik_emotions: Vec<Emotion>,
}

/// The table as serializable records.
pub fn export_records() -> Vec<MappingRecord> {
    TABLE
        .iter()
        .map(|r| MappingRecord {
            moral_emotion: r.moral_emotion.to_string(),
            value_poles: r
                .value_poles
                .iter()
                .map(|p| PoleRecord {
                    foundation: p.foundation,
                    polarity: p.polarity,
                    label: p.label().to_string(),
                })
                .collect(),
            plutchik_emotions: r.plutchik_emotions.to_vec(),
        })
        .collect()
}
