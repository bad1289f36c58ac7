//! Polynomials serialize as their printed form; variables are declared from the text.

use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

use crate::arith::{parse_polynomial, Polynomial, VarContext};

/// Parse with every identifier in `text` treated as declared.
pub fn parse_free(text: &str) -> crate::error::Result<Polynomial> {
    let mut names = Vec::new();
    let mut cur = String::new();
    let mut in_ident = false;
    for ch in text.chars().chain(std::iter::once(' ')) {
        if in_ident && (ch.is_ascii_alphanumeric() || ch == '_') {
            cur.push(ch);
            continue;
        }
        if in_ident {
            names.push(std::mem::take(&mut cur));
            in_ident = false;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            in_ident = true;
            cur.push(ch);
        }
    }
    parse_polynomial(text, &VarContext::new(names))
}

pub fn serialize<S: Serializer>(p: &Polynomial, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Polynomial, D::Error> {
    let text = String::deserialize(d)?;
    parse_free(&text).map_err(D::Error::custom)
}

pub mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Polynomial], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for p in v {
            seq.serialize_element(&p.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Polynomial>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts.iter().map(|t| parse_free(t).map_err(D::Error::custom)).collect()
    }
}

pub mod map {
    use std::collections::BTreeMap;

    use super::*;
    use serde::ser::SerializeMap;

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Polynomial>, s: S) -> Result<S::Ok, S::Error> {
        let mut out = s.serialize_map(Some(m.len()))?;
        for (k, p) in m {
            out.serialize_entry(k, &p.to_string())?;
        }
        out.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, Polynomial>, D::Error> {
        let texts = BTreeMap::<String, String>::deserialize(d)?;
        texts.into_iter().map(|(k, t)| Ok((k, parse_free(&t).map_err(D::Error::custom)?))).collect()
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(p: &Option<Polynomial>, s: S) -> Result<S::Ok, S::Error> {
        match p {
            Some(p) => s.serialize_some(&p.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Polynomial>, D::Error> {
        Option::<String>::deserialize(d)?.map(|t| parse_free(&t).map_err(D::Error::custom)).transpose()
    }
}
