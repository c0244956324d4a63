//! Shipped JSON fixtures, compiled into the binary.

use serde_json::Value;

use crate::charvar::RepresentationPair;
use crate::error::{Error, Result};
use crate::normalform::Branch;

const PAIRS: [&str; 6] = [
    include_str!("../fixtures/pairs/osp_planted.json"),
    include_str!("../fixtures/pairs/osp_raw_matrix.json"),
    include_str!("../fixtures/pairs/sl2_generic.json"),
    include_str!("../fixtures/pairs/sl2_unipotent.json"),
    include_str!("../fixtures/pairs/central_a.json"),
    include_str!("../fixtures/pairs/osp_nondiagonal_a.json"),
];
const WORDS: &str = include_str!("../fixtures/words.json");
const DOUBLE_ST: &str = include_str!("../fixtures/double_supertranspose.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Osp,
    Sl2(Branch),
    Error,
}

#[derive(Clone, Debug)]
pub struct PairFixture {
    pub name: String,
    pub expect: Expect,
    pub json: Value,
}

impl PairFixture {
    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        let name = v["name"].as_str().ok_or_else(|| Error::Json("fixture needs a name".into()))?.to_string();
        let expect = match v["expect"].as_str() {
            Some("osp") => Expect::Osp,
            Some("diagonalizable") => Expect::Sl2(Branch::Diagonalizable),
            Some("unipotent") => Expect::Sl2(Branch::Unipotent),
            Some("reducible") => Expect::Sl2(Branch::Reducible),
            Some("error") => Expect::Error,
            other => return Err(Error::Json(format!("unknown expectation {other:?}"))),
        };
        Ok(PairFixture { name, expect, json: v["pair"].clone() })
    }

    pub fn pair(&self) -> Result<RepresentationPair> {
        RepresentationPair::from_json(&self.json)
    }
}

pub fn pairs() -> Vec<PairFixture> {
    PAIRS.iter().map(|t| PairFixture::parse(t).expect("shipped fixture parses")).collect()
}

pub fn words() -> Vec<String> {
    serde_json::from_str(WORDS).expect("shipped word list parses")
}

/// Sign pattern of (M^st)^st relative to M, frozen from one symbolic evaluation.
pub fn double_supertranspose_signs() -> [[i8; 3]; 3] {
    let v: Value = serde_json::from_str(DOUBLE_ST).expect("shipped fixture parses");
    serde_json::from_value(v["signs"].clone()).expect("3x3 sign array")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_fixture_loads() {
        for fx in pairs() {
            assert!(fx.pair().is_ok(), "{}", fx.name);
        }
        assert!(words().contains(&"AB".to_string()));
        assert_eq!(double_supertranspose_signs()[2][2], 1);
    }
}
