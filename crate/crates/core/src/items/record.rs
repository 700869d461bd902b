use std::collections::BTreeSet;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{Map, Value};

use super::ItemCode;

/// One extracted filing: metadata plus the text of each of the twenty
/// items, empty when an item was not found or not requested.
///
/// Serializes to a JSON object with exactly 23 keys in a fixed order:
/// `filename`, `cik`, `year`, then `item_1` through `item_15`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Deserialize)]
#[serde(try_from = "Map<String, Value>")]
pub struct FilingRecord {
    pub filename: String,
    pub cik: String,
    pub year: String,
    items: [String; 20],
}

impl FilingRecord {
    pub fn new(filename: impl Into<String>, cik: impl Into<String>, year: impl Into<String>) -> Self {
        FilingRecord { filename: filename.into(), cik: cik.into(), year: year.into(), items: Default::default() }
    }

    pub fn item(&self, code: ItemCode) -> &str {
        &self.items[code.index()]
    }

    pub fn set_item(&mut self, code: ItemCode, text: impl Into<String>) {
        self.items[code.index()] = text.into();
    }

    /// Items in document order.
    pub fn items(&self) -> impl Iterator<Item = (ItemCode, &str)> {
        ItemCode::ALL.into_iter().map(move |c| (c, self.item(c)))
    }

    pub fn non_empty_items(&self) -> BTreeSet<ItemCode> {
        self.items().filter(|(_, t)| !t.is_empty()).map(|(c, _)| c).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.items.iter().all(String::is_empty)
    }

    /// The 23 keys of the JSON form, in serialization order.
    pub fn keys() -> impl Iterator<Item = &'static str> {
        ["filename", "cik", "year"].into_iter().chain(ItemCode::ALL.into_iter().map(ItemCode::json_key))
    }
}

impl Serialize for FilingRecord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(23))?;
        map.serialize_entry("filename", &self.filename)?;
        map.serialize_entry("cik", &self.cik)?;
        map.serialize_entry("year", &self.year)?;
        for (code, text) in self.items() {
            map.serialize_entry(code.json_key(), text)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("missing key {0:?}")]
    Missing(String),
    #[error("key {0:?} is not a string")]
    NotAString(String),
    #[error("unexpected key {0:?}")]
    Unexpected(String),
}

impl TryFrom<Map<String, Value>> for FilingRecord {
    type Error = RecordError;

    fn try_from(mut map: Map<String, Value>) -> Result<Self, Self::Error> {
        let mut take = |key: &str| match map.remove(key) {
            Some(Value::String(s)) => Ok(s),
            Some(_) => Err(RecordError::NotAString(key.to_string())),
            None => Err(RecordError::Missing(key.to_string())),
        };
        let mut record = FilingRecord::new(take("filename")?, take("cik")?, take("year")?);
        for code in ItemCode::ALL {
            record.items[code.index()] = take(code.json_key())?;
        }
        if let Some(key) = map.keys().next() {
            return Err(RecordError::Unexpected(key.clone()));
        }
        Ok(record)
    }
}
