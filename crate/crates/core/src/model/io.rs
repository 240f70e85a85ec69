//! Readers and writers for the corpus file formats.
//!
//! * `accounts.jsonl`: `{"id","handle","account_type","follower_count","profile_text","location","identities":[...]}`
//! * `posts.jsonl`: `{"id","author_id","ts","text","retweet_of":{"post_id","author_id"}|null}`
//! * `follows.csv`: header `follower_id,followee_id`
//! * `survey.jsonl`: `{"id","demographics":{...},"ideology":int|null}`
//! * `labels.csv`: header `post_id,dimension,coder_id,value[,prob]`

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::dataset::{Dataset, DropCounts};
use super::types::{
    Account, AccountType, FollowEdge, Identity, PerDimension, Post, RetweetOf, StudyWindow,
    SurveyUser,
};
use crate::error::{Error, Result};

/// Coder id reserved for classifier output in `labels.csv`.
pub const MACHINE_CODER: &str = "machine";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccountRecord {
    pub id: String,
    pub handle: String,
    pub account_type: AccountType,
    pub follower_count: u64,
    pub profile_text: String,
    #[serde(default)]
    pub location: Option<String>,
    #[serde(default)]
    pub identities: Vec<Identity>,
}

impl From<AccountRecord> for Account {
    fn from(r: AccountRecord) -> Self {
        Account {
            id: r.id,
            handle: r.handle,
            account_type: r.account_type,
            follower_count: r.follower_count,
            profile_text: r.profile_text,
            location: r.location,
            identities: r.identities.into_iter().collect(),
            is_influencer: false,
        }
    }
}

impl From<&Account> for AccountRecord {
    fn from(a: &Account) -> Self {
        AccountRecord {
            id: a.id.clone(),
            handle: a.handle.clone(),
            account_type: a.account_type,
            follower_count: a.follower_count,
            profile_text: a.profile_text.clone(),
            location: a.location.clone(),
            identities: a.identities.iter().copied().collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostRecord {
    pub id: String,
    pub author_id: String,
    pub ts: String,
    pub text: String,
    #[serde(default)]
    pub retweet_of: Option<RetweetOf>,
}

impl PostRecord {
    fn into_post(self) -> std::result::Result<Post, String> {
        let ts = DateTime::parse_from_rfc3339(&self.ts)
            .map_err(|e| format!("bad timestamp `{}`: {e}", self.ts))?
            .with_timezone(&Utc);
        Ok(Post {
            id: self.id,
            author_id: self.author_id,
            timestamp: ts,
            text: self.text,
            retweet_of: self.retweet_of,
            machine: PerDimension::default(),
        })
    }
}

impl From<&Post> for PostRecord {
    fn from(p: &Post) -> Self {
        PostRecord {
            id: p.id.clone(),
            author_id: p.author_id.clone(),
            ts: format_ts(p.timestamp),
            text: p.text.clone(),
            retweet_of: p.retweet_of.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyRecord {
    pub id: String,
    #[serde(default)]
    pub demographics: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub ideology: Option<i64>,
}

/// One row of `labels.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub post_id: String,
    pub dimension: String,
    pub coder_id: String,
    pub value: String,
    #[serde(default)]
    pub prob: Option<String>,
}

pub fn format_ts(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))
}

/// Reads a JSON-lines file, skipping blank lines. Errors carry the 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let reader = BufReader::new(open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = create(path)?;
    for r in records {
        serde_json::to_writer(&mut w, &r)?;
        w.write_all(b"\n")
            .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    }
    w.flush()
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Reads a headed CSV file. Errors carry the 1-based line number (header = line 1).
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize().enumerate() {
        let rec = rec.map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: i + 2,
            reason: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_csv<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn read_accounts(path: &Path) -> Result<Vec<Account>> {
    Ok(read_jsonl::<AccountRecord>(path)?
        .into_iter()
        .map(Account::from)
        .collect())
}

pub fn read_posts(path: &Path) -> Result<Vec<Post>> {
    let reader = BufReader::new(open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: String| Error::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let rec: PostRecord = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        out.push(rec.into_post().map_err(malformed)?);
    }
    Ok(out)
}

pub fn read_follows(path: &Path) -> Result<Vec<FollowEdge>> {
    read_csv(path)
}

pub fn read_survey(path: &Path) -> Result<Vec<SurveyUser>> {
    Ok(read_jsonl::<SurveyRecord>(path)?
        .into_iter()
        .map(|r| SurveyUser {
            id: r.id,
            demographics: r.demographics,
            ideology: r.ideology,
        })
        .collect())
}

pub fn read_label_rows(path: &Path) -> Result<Vec<LabelRow>> {
    read_csv(path)
}

/// Locations of the four corpus files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusPaths {
    pub accounts: PathBuf,
    pub posts: PathBuf,
    pub follows: PathBuf,
    pub survey: Option<PathBuf>,
}

impl CorpusPaths {
    /// Standard file names inside one directory.
    pub fn in_dir(dir: &Path) -> Self {
        CorpusPaths {
            accounts: dir.join("accounts.jsonl"),
            posts: dir.join("posts.jsonl"),
            follows: dir.join("follows.csv"),
            survey: Some(dir.join("survey.jsonl")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub dataset: Dataset,
    pub dropped: DropCounts,
}

/// Reads, validates and assembles a corpus.
pub fn ingest_corpus(paths: &CorpusPaths, window: StudyWindow) -> Result<Ingested> {
    for p in [&paths.accounts, &paths.posts, &paths.follows]
        .into_iter()
        .chain(paths.survey.as_ref())
    {
        if !p.exists() {
            return Err(Error::invalid(format!("missing input file {}", p.display())));
        }
    }
    let accounts = read_accounts(&paths.accounts)?;
    let posts = read_posts(&paths.posts)?;
    let follows = read_follows(&paths.follows)?;
    let survey = match &paths.survey {
        Some(p) => read_survey(p)?,
        None => Vec::new(),
    };
    let (dataset, dropped) = Dataset::from_records(accounts, posts, follows, survey, window)?;
    Ok(Ingested { dataset, dropped })
}

/// Writes a dataset back out in the corpus formats (labels excluded).
pub fn write_corpus(dataset: &Dataset, paths: &CorpusPaths) -> Result<()> {
    write_jsonl(
        &paths.accounts,
        dataset.accounts().iter().map(AccountRecord::from),
    )?;
    write_jsonl(&paths.posts, dataset.posts().iter().map(PostRecord::from))?;
    write_csv(&paths.follows, dataset.follows())?;
    if let Some(sp) = &paths.survey {
        write_jsonl(
            sp,
            dataset.survey_users().iter().map(|s| SurveyRecord {
                id: s.id.clone(),
                demographics: s.demographics.clone(),
                ideology: s.ideology,
            }),
        )?;
    }
    Ok(())
}
