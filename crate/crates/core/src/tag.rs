//! The closed nine-label BIO tag set for address entities.

use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Address entity types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityType {
    Street,
    Housenumber,
    Municipality,
    Postcode,
}

impl EntityType {
    pub const ALL: [EntityType; 4] = [
        EntityType::Street,
        EntityType::Housenumber,
        EntityType::Municipality,
        EntityType::Postcode,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Street => "Street",
            EntityType::Housenumber => "Housenumber",
            EntityType::Municipality => "Municipality",
            EntityType::Postcode => "Postcode",
        }
    }

    pub fn begin(self) -> Tag {
        match self {
            EntityType::Street => Tag::BStreet,
            EntityType::Housenumber => Tag::BHousenumber,
            EntityType::Municipality => Tag::BMunicipality,
            EntityType::Postcode => Tag::BPostcode,
        }
    }

    pub fn inside(self) -> Tag {
        match self {
            EntityType::Street => Tag::IStreet,
            EntityType::Housenumber => Tag::IHousenumber,
            EntityType::Municipality => Tag::IMunicipality,
            EntityType::Postcode => Tag::IPostcode,
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One of the nine BIO labels.
///
/// The declaration order is the total order used for matrix axes and for
/// breaking ties during decoding, so `O` sorts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Tag {
    O = 0,
    BStreet,
    IStreet,
    BHousenumber,
    IHousenumber,
    BMunicipality,
    IMunicipality,
    BPostcode,
    IPostcode,
}

/// Number of tags; the width of every per-tag table.
pub const NUM_TAGS: usize = 9;

impl Tag {
    pub const ALL: [Tag; NUM_TAGS] = [
        Tag::O,
        Tag::BStreet,
        Tag::IStreet,
        Tag::BHousenumber,
        Tag::IHousenumber,
        Tag::BMunicipality,
        Tag::IMunicipality,
        Tag::BPostcode,
        Tag::IPostcode,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Tag> {
        Tag::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::O => "O",
            Tag::BStreet => "B-Street",
            Tag::IStreet => "I-Street",
            Tag::BHousenumber => "B-Housenumber",
            Tag::IHousenumber => "I-Housenumber",
            Tag::BMunicipality => "B-Municipality",
            Tag::IMunicipality => "I-Municipality",
            Tag::BPostcode => "B-Postcode",
            Tag::IPostcode => "I-Postcode",
        }
    }

    pub fn entity_type(self) -> Option<EntityType> {
        match self {
            Tag::O => None,
            Tag::BStreet | Tag::IStreet => Some(EntityType::Street),
            Tag::BHousenumber | Tag::IHousenumber => Some(EntityType::Housenumber),
            Tag::BMunicipality | Tag::IMunicipality => Some(EntityType::Municipality),
            Tag::BPostcode | Tag::IPostcode => Some(EntityType::Postcode),
        }
    }

    pub fn is_begin(self) -> bool {
        matches!(
            self,
            Tag::BStreet | Tag::BHousenumber | Tag::BMunicipality | Tag::BPostcode
        )
    }

    pub fn is_inside(self) -> bool {
        matches!(
            self,
            Tag::IStreet | Tag::IHousenumber | Tag::IMunicipality | Tag::IPostcode
        )
    }

    /// Whether `self` may legally follow `prev` (`None` = sentence start).
    pub fn may_follow(self, prev: Option<Tag>) -> bool {
        if !self.is_inside() {
            return true;
        }
        match prev {
            Some(p) => p != Tag::O && p.entity_type() == self.entity_type(),
            None => false,
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tag::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownTag(s.into()))
    }
}

impl Serialize for Tag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
