//! Stateless computations shared by the `/compute` routes and the CLI.

use std::fmt;
use std::str::FromStr;

use ivalue_core::bridges;
use ivalue_core::format::{Document, Node};
use ivalue_core::ipr::{self, ConsistencyReport};
use ivalue_core::repair::{self, RepairSolution};
use ivalue_core::scale::{self, ConsecutiveChain, ValueScale};
use ivalue_core::session;
use ivalue_core::{Error, IntervalMatrix, NeutralElement, Result, DEFAULT_TOL};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckParams {
    /// Neutral half-width; inferred from the diagonal when absent.
    pub neutral: Option<f64>,
    pub tol: f64,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self {
            neutral: None,
            tol: DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RepairParams {
    pub mu: f64,
    /// Fixes the neutral half-width instead of fitting it.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScaleParams {
    pub normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Ipr,
    Fuzzy,
    Saaty,
}

impl Representation {
    pub fn as_str(self) -> &'static str {
        match self {
            Representation::Ipr => "ipr",
            Representation::Fuzzy => "fuzzy",
            Representation::Saaty => "saaty",
        }
    }

    pub fn of(doc: &Document) -> Option<Representation> {
        match doc {
            Document::IntervalMatrix(_) => Some(Representation::Ipr),
            Document::FuzzyRelation(_) => Some(Representation::Fuzzy),
            Document::SaatyRelation(_) => Some(Representation::Saaty),
            _ => None,
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ipr" => Ok(Representation::Ipr),
            "fuzzy" => Ok(Representation::Fuzzy),
            "saaty" => Ok(Representation::Saaty),
            other => Err(format!("unknown representation {other:?}; expected ipr, fuzzy or saaty")),
        }
    }
}

fn wrong_kind(doc: &Document, expected: &str) -> Error {
    Error::SchemaViolation {
        path: "$.kind".into(),
        detail: format!("expected {expected}, got {}", doc.kind()),
    }
}

pub fn expect_matrix(doc: &Document) -> Result<&IntervalMatrix> {
    match doc {
        Document::IntervalMatrix(z) => Ok(z),
        other => Err(wrong_kind(other, "interval_matrix")),
    }
}

pub fn check(z: &IntervalMatrix, params: &CheckParams) -> Result<ConsistencyReport> {
    let u = match params.neutral {
        Some(eps) => NeutralElement::new(eps)?,
        None => ipr::infer_neutral(z),
    };
    ipr::check_consistency(z, u, params.tol)
}

pub fn repair(z: &IntervalMatrix, params: &RepairParams) -> Result<RepairSolution> {
    match params.alpha {
        Some(alpha) => {
            let mut s = repair::repair_fixed_neutral(z, alpha)?;
            if params.mu != 0.0 {
                // The fixed-neutral model is gauge invariant; shift to the requested mean.
                s.nu.iter_mut().for_each(|x| *x += params.mu);
                s.mu = params.mu;
            }
            Ok(s)
        }
        None => repair::repair_full(z, params.mu),
    }
}

/// Value scale from a chain of consecutive steps or from a consistent matrix.
///
/// A chain whose steps differ in length is first replaced by its closest
/// equal-length chain. The normalization constant always comes from the
/// steps as given.
pub fn scale(doc: &Document, params: &ScaleParams) -> Result<ValueScale> {
    let (raw, chain) = match doc {
        Document::Chain(chain) => {
            let d = session::diagnose_chain(chain.clone());
            let r = session::evaluate_chain(chain.clone(), &d.proposal);
            match r {
                Ok(r) => (r.raw_scale, chain.clone()),
                // Without normalization a non-positive C is harmless.
                Err(Error::DegenerateScale(_)) if !params.normalize => {
                    let u = NeutralElement::new(d.proposal.alpha)?;
                    (scale::cumulative_from_chain(&d.proposal.adjusted_chain(), u)?, chain.clone())
                }
                Err(e) => return Err(e),
            }
        }
        Document::IntervalMatrix(z) => {
            if z.n() < 2 {
                return Err(Error::TooFewObjects(z.n()));
            }
            let raw = scale::derive_scale(z, ipr::infer_neutral(z))?;
            (raw, ConsecutiveChain::from_matrix(z)?)
        }
        other => return Err(wrong_kind(other, "chain or interval_matrix")),
    };
    if params.normalize {
        scale::normalize(&raw, scale::normalization_constant(&chain)?)
    } else {
        Ok(raw)
    }
}

fn to_ipr(doc: &Document) -> Result<IntervalMatrix> {
    Ok(match doc {
        Document::IntervalMatrix(z) => z.clone(),
        Document::FuzzyRelation(y) => bridges::from_fuzzy(y),
        Document::SaatyRelation(a) => bridges::from_saaty(a),
        other => return Err(wrong_kind(other, "interval_matrix, fuzzy_relation or saaty_relation")),
    })
}

/// Moves a relation between the additive, fuzzy and multiplicative forms.
///
/// `from`, when given, must name the representation the document is in.
pub fn convert(doc: &Document, from: Option<Representation>, to: Representation) -> Result<Document> {
    let actual = Representation::of(doc);
    if let Some(from) = from {
        if actual != Some(from) {
            return Err(wrong_kind(doc, &format!("a {from} document")));
        }
    }
    if actual == Some(to) {
        return Ok(doc.clone());
    }
    let z = to_ipr(doc)?;
    Ok(match to {
        Representation::Ipr => Document::IntervalMatrix(z),
        Representation::Fuzzy => Document::FuzzyRelation(bridges::to_fuzzy(&z)?),
        Representation::Saaty => Document::SaatyRelation(bridges::to_saaty(&z)?),
    })
}

/// A compute request: a document plus an optional top-level `params` object.
pub struct Request {
    pub document: Document,
    params: Value,
}

impl Request {
    pub fn parse(text: &str) -> Result<Request> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let document = Document::from_value(&value)?;
        let params = value.get("params").cloned().unwrap_or(Value::Null);
        if !(params.is_null() || params.is_object()) {
            return Err(Error::SchemaViolation {
                path: "$.params".into(),
                detail: "expected an object".into(),
            });
        }
        Ok(Request { document, params })
    }

    fn param(&self, key: &str) -> Option<Node<'_>> {
        let mut node = Node::root(&self.params).opt_field(key)?;
        node.rebase("$.params");
        Some(node)
    }

    pub fn check_params(&self) -> Result<CheckParams> {
        let mut p = CheckParams::default();
        if let Some(n) = self.param("neutral") {
            p.neutral = Some(n.f64()?);
        }
        if let Some(n) = self.param("tol") {
            p.tol = n.f64()?;
        }
        Ok(p)
    }

    pub fn repair_params(&self) -> Result<RepairParams> {
        let mut p = RepairParams::default();
        if let Some(n) = self.param("mu") {
            p.mu = n.f64()?;
        }
        if let Some(n) = self.param("alpha") {
            p.alpha = Some(n.f64()?);
        }
        Ok(p)
    }

    pub fn scale_params(&self) -> Result<ScaleParams> {
        let mut p = ScaleParams::default();
        if let Some(n) = self.param("normalize") {
            p.normalize = n.bool()?;
        }
        Ok(p)
    }

    pub fn convert_params(&self) -> Result<(Option<Representation>, Representation)> {
        let repr = |n: Node| -> Result<Representation> { n.str()?.parse().map_err(|e: String| n.schema(e)) };
        let from = self.param("from").map(repr).transpose()?;
        let to = self
            .param("to")
            .ok_or_else(|| Error::SchemaViolation {
                path: "$.params".into(),
                detail: "missing field \"to\"".into(),
            })
            .and_then(repr)?;
        Ok((from, to))
    }
}
