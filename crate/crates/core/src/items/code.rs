use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One of the twenty item sections of a 10-K annual report.
///
/// Variants are declared in document order, so the derived `Ord` is the
/// order in which items appear in a well-formed filing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemCode {
    Item1,
    Item1A,
    Item1B,
    Item2,
    Item3,
    Item4,
    Item5,
    Item6,
    Item7,
    Item7A,
    Item8,
    Item9,
    Item9A,
    Item9B,
    Item10,
    Item11,
    Item12,
    Item13,
    Item14,
    Item15,
}

use ItemCode::*;

impl ItemCode {
    pub const ALL: [ItemCode; 20] = [
        Item1, Item1A, Item1B, Item2, Item3, Item4, Item5, Item6, Item7, Item7A, Item8, Item9,
        Item9A, Item9B, Item10, Item11, Item12, Item13, Item14, Item15,
    ];

    /// The code as printed in a filing: `"1"`, `"7A"`, `"15"`.
    pub fn code(self) -> &'static str {
        match self {
            Item1 => "1",
            Item1A => "1A",
            Item1B => "1B",
            Item2 => "2",
            Item3 => "3",
            Item4 => "4",
            Item5 => "5",
            Item6 => "6",
            Item7 => "7",
            Item7A => "7A",
            Item8 => "8",
            Item9 => "9",
            Item9A => "9A",
            Item9B => "9B",
            Item10 => "10",
            Item11 => "11",
            Item12 => "12",
            Item13 => "13",
            Item14 => "14",
            Item15 => "15",
        }
    }

    /// Part of the report (1 to 4) the item belongs to.
    pub fn part(self) -> u8 {
        match self {
            Item1 | Item1A | Item1B | Item2 | Item3 | Item4 => 1,
            Item5 | Item6 | Item7 | Item7A | Item8 | Item9 | Item9A | Item9B => 2,
            Item10 | Item11 | Item12 | Item13 | Item14 => 3,
            Item15 => 4,
        }
    }

    pub fn canonical_name(self) -> &'static str {
        match self {
            Item1 => "Business",
            Item1A => "Risk Factors",
            Item1B => "Unresolved Staff Comments",
            Item2 => "Properties",
            Item3 => "Legal Proceedings",
            Item4 => "Mine Safety Disclosures",
            Item5 => "Market",
            Item6 => "Consolidated Financial Data",
            Item7 => "Management's Discussion and Analysis",
            Item7A => "Quantitative and Qualitative Disclosures about Market Risks",
            Item8 => "Financial Statements",
            Item9 => "Changes in and Disagreements With Accountants",
            Item9A => "Controls and Procedures",
            Item9B => "Other Information",
            Item10 => "Directors, Executive Officers and Corporate Governance",
            Item11 => "Executive Compensation",
            Item12 => "Security Ownership of Certain Beneficial Owners",
            Item13 => "Certain Relationships and Related Transactions",
            Item14 => "Principal Accounting Fees and Services",
            Item15 => "Exhibits and Financial Statement Schedules Signatures",
        }
    }

    /// Key used for this item in JSON records, e.g. `"item_7A"`.
    pub fn json_key(self) -> &'static str {
        match self {
            Item1 => "item_1",
            Item1A => "item_1A",
            Item1B => "item_1B",
            Item2 => "item_2",
            Item3 => "item_3",
            Item4 => "item_4",
            Item5 => "item_5",
            Item6 => "item_6",
            Item7 => "item_7",
            Item7A => "item_7A",
            Item8 => "item_8",
            Item9 => "item_9",
            Item9A => "item_9A",
            Item9B => "item_9B",
            Item10 => "item_10",
            Item11 => "item_11",
            Item12 => "item_12",
            Item13 => "item_13",
            Item14 => "item_14",
            Item15 => "item_15",
        }
    }

    pub fn from_json_key(key: &str) -> Option<ItemCode> {
        ItemCode::ALL.into_iter().find(|c| c.json_key() == key)
    }

    /// Position in document order, 0 for Item 1 through 19 for Item 15.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Builds a code from a number and an optional letter suffix as they
    /// appear in a heading. Returns `None` for combinations that are not
    /// one of the twenty items (e.g. 7B, 16).
    pub fn from_parts(number: u32, letter: Option<char>) -> Option<ItemCode> {
        let letter = letter.map(|c| c.to_ascii_uppercase());
        Some(match (number, letter) {
            (1, None) => Item1,
            (1, Some('A')) => Item1A,
            (1, Some('B')) => Item1B,
            (2, None) => Item2,
            (3, None) => Item3,
            (4, None) => Item4,
            (5, None) => Item5,
            (6, None) => Item6,
            (7, None) => Item7,
            (7, Some('A')) => Item7A,
            (8, None) => Item8,
            (9, None) => Item9,
            (9, Some('A')) => Item9A,
            (9, Some('B')) => Item9B,
            (10, None) => Item10,
            (11, None) => Item11,
            (12, None) => Item12,
            (13, None) => Item13,
            (14, None) => Item14,
            (15, None) => Item15,
            _ => return None,
        })
    }
}

impl fmt::Display for ItemCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown 10-K item code {0:?}")]
pub struct UnknownItemCode(pub String);

impl FromStr for ItemCode {
    type Err = UnknownItemCode;

    /// Accepts `"7A"`, `"7a"`, `"item_7A"` and `"Item 7A"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        let lower = trimmed.to_ascii_lowercase();
        let bare = lower
            .strip_prefix("item_")
            .or_else(|| lower.strip_prefix("item"))
            .unwrap_or(&lower)
            .trim();
        let digits: String = bare.chars().take_while(|c| c.is_ascii_digit()).collect();
        let rest = &bare[digits.len()..];
        let letter = match rest.len() {
            0 => None,
            1 => rest.chars().next(),
            _ => return Err(UnknownItemCode(s.to_string())),
        };
        digits
            .parse::<u32>()
            .ok()
            .and_then(|n| ItemCode::from_parts(n, letter))
            .ok_or_else(|| UnknownItemCode(s.to_string()))
    }
}

impl Serialize for ItemCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for ItemCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_items_in_document_order() {
        assert_eq!(ItemCode::ALL.len(), 20);
        assert!(ItemCode::ALL.windows(2).all(|w| w[0] < w[1]));
        assert!(Item1 < Item1A && Item1A < Item1B && Item1B < Item2);
        assert!(Item7 < Item7A && Item7A < Item8);
        assert!(Item9B < Item10 && Item14 < Item15);
        for (i, c) in ItemCode::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
    }

    #[test]
    fn part_assignment() {
        let parts: Vec<u8> = ItemCode::ALL.iter().map(|c| c.part()).collect();
        assert_eq!(parts, [1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 4]);
    }

    #[test]
    fn parse_variants() {
        assert_eq!("7a".parse::<ItemCode>().unwrap(), Item7A);
        assert_eq!("item_9B".parse::<ItemCode>().unwrap(), Item9B);
        assert_eq!("Item 15".parse::<ItemCode>().unwrap(), Item15);
        assert!("7B".parse::<ItemCode>().is_err());
        assert!("16".parse::<ItemCode>().is_err());
        assert!("".parse::<ItemCode>().is_err());
        for c in ItemCode::ALL {
            assert_eq!(c.code().parse::<ItemCode>().unwrap(), c);
            assert_eq!(ItemCode::from_json_key(c.json_key()), Some(c));
        }
    }
}
