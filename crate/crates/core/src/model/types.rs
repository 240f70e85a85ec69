use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// One of the four incivility dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dimension {
    #[serde(rename = "IMP")]
    Imp,
    #[serde(rename = "PHAVPR")]
    Phavpr,
    #[serde(rename = "HSST")]
    Hsst,
    #[serde(rename = "THREAT")]
    Threat,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::Imp,
        Dimension::Phavpr,
        Dimension::Hsst,
        Dimension::Threat,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Imp => "IMP",
            Dimension::Phavpr => "PHAVPR",
            Dimension::Hsst => "HSST",
            Dimension::Threat => "THREAT",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "IMP" => Ok(Dimension::Imp),
            "PHAVPR" => Ok(Dimension::Phavpr),
            "HSST" => Ok(Dimension::Hsst),
            "THREAT" => Ok(Dimension::Threat),
            other => Err(Error::invalid(format!("unknown dimension `{other}`"))),
        }
    }
}

/// Fixed-size table with one slot per [`Dimension`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PerDimension<T>(pub [T; 4]);

impl<T> PerDimension<T> {
    pub fn from_fn(mut f: impl FnMut(Dimension) -> T) -> Self {
        PerDimension(Dimension::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Dimension, &T)> {
        Dimension::ALL.into_iter().zip(self.0.iter())
    }
}

impl<T> Index<Dimension> for PerDimension<T> {
    type Output = T;
    fn index(&self, d: Dimension) -> &T {
        &self.0[d.index()]
    }
}

impl<T> IndexMut<Dimension> for PerDimension<T> {
    fn index_mut(&mut self, d: Dimension) -> &mut T {
        &mut self.0[d.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AccountType {
    Politician,
    Media,
    Individual,
    Unknown,
}

impl AccountType {
    pub const ALL: [AccountType; 4] = [
        AccountType::Politician,
        AccountType::Media,
        AccountType::Individual,
        AccountType::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AccountType::Politician => "politician",
            AccountType::Media => "media",
            AccountType::Individual => "individual",
            AccountType::Unknown => "unknown",
        }
    }

    /// Single-letter code used in motif identity histograms.
    pub fn code(self) -> &'static str {
        match self {
            AccountType::Politician => "P",
            AccountType::Media => "M",
            AccountType::Individual => "I",
            AccountType::Unknown => "U",
        }
    }
}

impl fmt::Display for AccountType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Self-disclosed socio-political identity annotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    Left,
    Right,
    Center,
    LulaCamp,
    BolsonaroCamp,
    Women,
    Black,
    Lgbtq,
    Religious,
    Unlabeled,
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Identity::Left,
        Identity::Right,
        Identity::Center,
        Identity::LulaCamp,
        Identity::BolsonaroCamp,
        Identity::Women,
        Identity::Black,
        Identity::Lgbtq,
        Identity::Religious,
        Identity::Unlabeled,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Identity::Left => "left",
            Identity::Right => "right",
            Identity::Center => "center",
            Identity::LulaCamp => "lula_camp",
            Identity::BolsonaroCamp => "bolsonaro_camp",
            Identity::Women => "women",
            Identity::Black => "black",
            Identity::Lgbtq => "lgbtq",
            Identity::Religious => "religious",
            Identity::Unlabeled => "unlabeled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Account {
    pub id: String,
    pub handle: String,
    pub account_type: AccountType,
    pub follower_count: u64,
    pub profile_text: String,
    pub location: Option<String>,
    pub identities: BTreeSet<Identity>,
    #[serde(default)]
    pub is_influencer: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetweetOf {
    pub post_id: String,
    pub author_id: String,
}

/// A machine-assigned label for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MachineLabel {
    pub value: bool,
    pub prob: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub author_id: String,
    pub timestamp: DateTime<Utc>,
    pub text: String,
    pub retweet_of: Option<RetweetOf>,
    pub machine: PerDimension<Option<MachineLabel>>,
}

impl Post {
    pub fn day(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }

    pub fn is_retweet(&self) -> bool {
        self.retweet_of.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FollowEdge {
    pub follower_id: String,
    pub followee_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyUser {
    pub id: String,
    pub demographics: BTreeMap<String, serde_json::Value>,
    pub ideology: Option<i64>,
}

impl SurveyUser {
    pub fn age(&self) -> Option<f64> {
        self.demographics.get("age").and_then(|v| v.as_f64())
    }

    /// Categorical demographic value rendered as a string.
    pub fn category(&self, key: &str) -> Option<String> {
        self.demographics.get(key).map(|v| match v {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }
}

/// A human coder's annotation of one post in one dimension.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Annotation {
    pub post_id: String,
    pub dimension: Dimension,
    pub coder_id: String,
    pub value: bool,
}

/// Half-open `[start, end)` interval of UTC instants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl StudyWindow {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> crate::Result<Self> {
        if end <= start {
            return Err(Error::invalid("study window end must be after start"));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        self.start <= t && t < self.end
    }

    /// Every UTC calendar day overlapping the window, in order.
    pub fn days(&self) -> Vec<NaiveDate> {
        let first = self.start.date_naive();
        let last = (self.end - chrono::Duration::nanoseconds(1)).date_naive();
        first.iter_days().take_while(|d| *d <= last).collect()
    }
}

/// Whose labels count as "uncivil" in downstream statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    #[default]
    Machine,
    Human,
}
