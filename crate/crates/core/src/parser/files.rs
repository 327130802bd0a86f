//! JSON input files.
//!
//! ```text
//! derivation: { "vars": ["x", "y"], "images": { "y": "1/x" } }
//! flow:       { "vars": ["x", "y"], "flow": { "y": "y + t/x" } }
//! fan:        { "rank": 2, "cones": [ [[1,0],[0,1]], [[1,0]], [] ] }
//! ```
//!
//! Generators missing from `images` map to 0; generators missing from
//! `flow` stay fixed.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use super::{parse_ratfunc, ExprError, Mode};
use crate::arith::{ArithError, RatFunc, VarContext};
use crate::derivation::{Derivation, DerivationError};
use crate::flow::{FlowError, RationalFlow};
use crate::toric::{Cone, Fan, LatticeVec, ToricError};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Context(#[from] ArithError),
    #[error("`{name}`: {source}")]
    Expr { name: String, source: ExprError },
    #[error("`{0}` is not a declared variable")]
    UnknownVariable(String),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Toric(#[from] ToricError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationFile {
    pub vars: Vec<String>,
    #[serde(default)]
    pub images: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowFile {
    pub vars: Vec<String>,
    #[serde(default)]
    pub flow: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub rank: usize,
    pub cones: Vec<Vec<Vec<i64>>>,
}

fn check_names(ctx: &VarContext, map: &BTreeMap<String, String>) -> Result<(), FileError> {
    match map.keys().find(|k| ctx.index_of(k).is_none()) {
        Some(k) => Err(FileError::UnknownVariable(k.clone())),
        None => Ok(()),
    }
}

fn expr(src: &str, name: &str, ctx: &VarContext, mode: Mode) -> Result<RatFunc, FileError> {
    parse_ratfunc(src, ctx, mode).map_err(|source| FileError::Expr { name: name.to_string(), source })
}

impl DerivationFile {
    pub fn build(&self) -> Result<Derivation, FileError> {
        let ctx = VarContext::new(&self.vars)?;
        check_names(&ctx, &self.images)?;
        let images = ctx
            .names()
            .iter()
            .map(|n| match self.images.get(n) {
                Some(src) => expr(src, n, &ctx, Mode::Plain),
                None => Ok(RatFunc::zero(&ctx)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Derivation::new(&ctx, images)?)
    }
}

impl FlowFile {
    pub fn build(&self) -> Result<RationalFlow, FileError> {
        let ctx = VarContext::new(&self.vars)?;
        check_names(&ctx, &self.flow)?;
        let ext = ctx.flow_extension();
        let values = ctx
            .names()
            .iter()
            .map(|n| match self.flow.get(n) {
                Some(src) => expr(src, n, &ctx, Mode::Flow),
                None => Ok(RatFunc::var(&ext, ext.index_of(n).expect("declared"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RationalFlow::from_ratfuncs(&ctx, &values)?)
    }
}

impl FanFile {
    pub fn build(&self, trust: bool) -> Result<Fan, FileError> {
        let cones = self
            .cones
            .iter()
            .map(|rays| Cone::unchecked(self.rank, rays.iter().map(|r| LatticeVec::from_i64(r)).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Fan::new(self.rank, cones, trust)?)
    }
}

pub fn load_derivation(json: &str) -> Result<Derivation, FileError> {
    serde_json::from_str::<DerivationFile>(json)?.build()
}

pub fn load_flow(json: &str) -> Result<RationalFlow, FileError> {
    serde_json::from_str::<FlowFile>(json)?.build()
}

pub fn load_fan(json: &str, trust: bool) -> Result<Fan, FileError> {
    serde_json::from_str::<FanFile>(json)?.build(trust)
}
