//! Canonical `.ivpr.json` documents.
//!
//! Every document is `{"kind": ..., "payload": ..., "version": 1}`. Output is
//! deterministic: object keys are sorted, integral numbers print without a
//! fractional part, other numbers in shortest round-trip form, intervals as
//! `[lower, upper]` and matrices as row-major arrays of intervals. Parsing
//! enforces the domain invariants and reports the JSON path of the first
//! offending field. Unknown fields are ignored.

use std::io;

use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::{json, Map, Value};

use crate::bridges::{FuzzyRelation, SaatyDomain, SaatyRelation};
use crate::error::{Error, Result};
use crate::interval::{Interval, NeutralElement};
use crate::ipr::ConsistencyReport;
use crate::matrix::IntervalMatrix;
use crate::repair::{ChainRepairSolution, RepairSolution};
use crate::scale::{ConsecutiveChain, ValueScale};
use crate::session::{
    CardCount, Diagnosis, ElicitationSession, HistoryEntry, Phase, SessionEvent, SessionResult,
};

pub const FORMAT_VERSION: u64 = 1;
pub const FILE_EXTENSION: &str = ".ivpr.json";

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    IntervalMatrix(IntervalMatrix),
    Chain(ConsecutiveChain),
    ValueScale(ValueScale),
    Session(ElicitationSession),
    RepairSolution(RepairSolution),
    FuzzyRelation(FuzzyRelation),
    SaatyRelation(SaatyRelation),
    ConsistencyReport(ConsistencyReport),
    Diagnosis(Diagnosis),
    SessionResult(SessionResult),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::IntervalMatrix(_) => "interval_matrix",
            Document::Chain(_) => "chain",
            Document::ValueScale(_) => "value_scale",
            Document::Session(_) => "session",
            Document::RepairSolution(_) => "repair_solution",
            Document::FuzzyRelation(_) => "fuzzy_relation",
            Document::SaatyRelation(_) => "saaty_relation",
            Document::ConsistencyReport(_) => "consistency_report",
            Document::Diagnosis(_) => "diagnosis",
            Document::SessionResult(_) => "session_result",
        }
    }

    pub fn to_value(&self) -> Value {
        let payload = match self {
            Document::IntervalMatrix(z) => json!({ "entries": matrix_value(z) }),
            Document::Chain(c) => json!({ "steps": intervals_value(c.steps()) }),
            Document::ValueScale(s) => scale_value(s),
            Document::Session(s) => session_value(s),
            Document::RepairSolution(r) => json!({
                "alpha": r.alpha,
                "mu": r.mu,
                "nu": r.nu,
                "objective": r.objective,
                "repaired": matrix_value(&r.repaired),
            }),
            Document::FuzzyRelation(y) => json!({ "entries": matrix_value(y.entries()) }),
            Document::SaatyRelation(a) => json!({ "entries": matrix_value(a.entries()) }),
            Document::ConsistencyReport(r) => report_value(r),
            Document::Diagnosis(d) => json!({
                "adjusted_steps": intervals_value(&d.proposal.adjusted_steps),
                "alpha": d.proposal.alpha,
                "equal_lengths": d.equal_lengths,
                "objective": d.proposal.objective,
                "unit_steps": intervals_value(d.unit_chain.steps()),
            }),
            Document::SessionResult(r) => json!({
                "accepted_steps": intervals_value(r.accepted_chain.steps()),
                "full_table": matrix_value(&r.full_table),
                "neutral": r.neutral.epsilon(),
                "normalization_constant": r.normalization_constant,
                "normalized_scale": scale_value(&r.normalized_scale),
                "raw_scale": scale_value(&r.raw_scale),
                "unit_steps": intervals_value(r.unit_chain.steps()),
            }),
        };
        json!({ "kind": self.kind(), "payload": payload, "version": FORMAT_VERSION })
    }

    pub fn from_value(value: &Value) -> Result<Document> {
        let root = Node::root(value);
        root.object()?;
        let version = root.field("version")?.u64()?;
        if version != FORMAT_VERSION {
            return Err(root.field("version")?.schema(format!("unsupported version {version}")));
        }
        let kind_node = root.field("kind")?;
        let kind = kind_node.str()?;
        let p = root.field("payload")?;
        p.object()?;
        Ok(match kind {
            "interval_matrix" => Document::IntervalMatrix(p.field("entries")?.matrix()?),
            "chain" => Document::Chain(read_chain(&p.field("steps")?)?),
            "value_scale" => Document::ValueScale(read_scale(&p)?),
            "session" => Document::Session(read_session(&p)?),
            "repair_solution" => Document::RepairSolution(read_repair(&p)?),
            "fuzzy_relation" => {
                let e = p.field("entries")?;
                Document::FuzzyRelation(FuzzyRelation::new(e.matrix()?).map_err(|err| e.invariant(err))?)
            }
            "saaty_relation" => {
                let e = p.field("entries")?;
                let m = e.matrix()?;
                // Stored documents may carry any positive ratio.
                Document::SaatyRelation(
                    SaatyRelation::with_domain(m, SaatyDomain::AnyPositive).map_err(|err| e.invariant(err))?,
                )
            }
            "consistency_report" => Document::ConsistencyReport(read_report(&p)?),
            "diagnosis" => Document::Diagnosis(read_diagnosis(&p)?),
            "session_result" => Document::SessionResult(read_result(&p)?),
            other => return Err(kind_node.schema(format!("unknown kind {other:?}"))),
        })
    }
}

/// Canonical text of a document.
pub fn serialize(doc: &Document) -> String {
    to_canonical_string(&doc.to_value())
}

pub fn parse(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    Document::from_value(&value)
}

struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        // Integral doubles below 2^53 are exact as integers.
        if value.fract() == 0.0 && value.abs() < 9_007_199_254_740_992.0 && !(value == 0.0 && value.is_sign_negative()) {
            write!(writer, "{}", value as i64)
        } else {
            CompactFormatter.write_f64(writer, value)
        }
    }
}

/// Compact JSON with sorted keys and canonical numbers.
pub fn to_canonical_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    serde::Serialize::serialize(value, &mut ser).expect("serializing a Value cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

pub fn interval_value(z: &Interval) -> Value {
    json!([z.lower(), z.upper()])
}

pub fn intervals_value(zs: &[Interval]) -> Value {
    Value::Array(zs.iter().map(interval_value).collect())
}

pub fn matrix_value(z: &IntervalMatrix) -> Value {
    Value::Array(z.rows().map(intervals_value).collect())
}

fn scale_value(s: &ValueScale) -> Value {
    let mut m = Map::new();
    m.insert("neutral".into(), json!(s.neutral.epsilon()));
    if let Some(c) = s.normalization_constant {
        m.insert("normalization_constant".into(), json!(c));
    }
    m.insert("values".into(), intervals_value(&s.values));
    Value::Object(m)
}

fn report_value(r: &ConsistencyReport) -> Value {
    let mut m = Map::new();
    m.insert("is_consistent".into(), json!(r.is_consistent));
    m.insert("is_reciprocal".into(), json!(r.is_reciprocal));
    m.insert("max_residual".into(), json!(r.max_residual));
    if let Some(u) = r.neutral {
        m.insert("neutral".into(), json!(u.epsilon()));
    }
    if let Some((i, j, k)) = r.worst_triple {
        m.insert("worst_triple".into(), json!([i, j, k]));
    }
    Value::Object(m)
}

fn chain_solution_value(s: &ChainRepairSolution) -> Value {
    json!({
        "adjusted_steps": intervals_value(&s.adjusted_steps),
        "alpha": s.alpha,
        "objective": s.objective,
    })
}

fn cards_value(c: &CardCount) -> Value {
    json!([c.lower(), c.upper()])
}

pub fn event_value(e: &SessionEvent) -> Value {
    match e {
        SessionEvent::Started {
            session_id,
            objects,
        } => json!({ "type": "started", "session_id": session_id, "objects": objects }),
        SessionEvent::CardsSet { slot, cards } => {
            json!({ "type": "cards_set", "slot": slot, "cards": cards_value(cards) })
        }
        SessionEvent::Diagnosed {
            equal_lengths,
            proposal,
        } => json!({
            "type": "diagnosed",
            "equal_lengths": equal_lengths,
            "proposal": chain_solution_value(proposal),
        }),
        SessionEvent::Responded { accept } => json!({ "type": "responded", "accept": accept }),
        SessionEvent::Finalized => json!({ "type": "finalized" }),
    }
}

pub fn history_entry_value(h: &HistoryEntry) -> Value {
    json!({ "event": event_value(&h.event), "timestamp": h.timestamp })
}

fn session_value(s: &ElicitationSession) -> Value {
    let mut m = Map::new();
    m.insert(
        "blank_cards".into(),
        Value::Array(
            s.blank_cards()
                .iter()
                .map(|c| c.as_ref().map_or(Value::Null, cards_value))
                .collect(),
        ),
    );
    m.insert(
        "history".into(),
        Value::Array(s.history().iter().map(history_entry_value).collect()),
    );
    m.insert("objects".into(), json!(s.objects()));
    m.insert("phase".into(), json!(s.phase().as_str()));
    if let Some(p) = s.proposal() {
        m.insert("proposal".into(), chain_solution_value(p));
    }
    m.insert("revision".into(), json!(s.revision()));
    m.insert("session_id".into(), json!(s.session_id()));
    Value::Object(m)
}

/// A value together with its JSON path, for error reporting.
pub struct Node<'a> {
    value: &'a Value,
    path: String,
}

impl<'a> Node<'a> {
    pub fn root(value: &'a Value) -> Self {
        Node {
            value,
            path: "$".into(),
        }
    }

    /// Re-roots the path, e.g. for a value read from a sub-document.
    pub fn rebase(&mut self, root: &str) {
        self.path = format!("{root}{}", &self.path[1..]);
    }

    pub fn value(&self) -> &'a Value {
        self.value
    }

    pub fn path(&self) -> &str {
        &self.path
    }

    pub fn schema(&self, detail: impl Into<String>) -> Error {
        Error::SchemaViolation {
            path: self.path.clone(),
            detail: detail.into(),
        }
    }

    pub fn invariant(&self, detail: impl ToString) -> Error {
        Error::InvariantViolation {
            path: self.path.clone(),
            detail: detail.to_string(),
        }
    }

    fn object(&self) -> Result<&'a Map<String, Value>> {
        self.value.as_object().ok_or_else(|| self.schema("expected an object"))
    }

    /// A present, non-null field.
    pub fn opt_field(&self, key: &str) -> Option<Node<'a>> {
        let v = self.value.as_object()?.get(key)?;
        (!v.is_null()).then(|| Node {
            value: v,
            path: format!("{}.{key}", self.path),
        })
    }

    pub fn field(&self, key: &str) -> Result<Node<'a>> {
        self.object()?;
        self.opt_field(key)
            .ok_or_else(|| self.schema(format!("missing field {key:?}")))
    }

    pub fn array(&self) -> Result<Vec<Node<'a>>> {
        let items = self.value.as_array().ok_or_else(|| self.schema("expected an array"))?;
        Ok(items
            .iter()
            .enumerate()
            .map(|(i, v)| Node {
                value: v,
                path: format!("{}[{i}]", self.path),
            })
            .collect())
    }

    pub fn f64(&self) -> Result<f64> {
        self.value.as_f64().ok_or_else(|| self.schema("expected a number"))
    }

    pub fn u64(&self) -> Result<u64> {
        self.value
            .as_u64()
            .ok_or_else(|| self.schema("expected a non-negative integer"))
    }

    pub fn usize(&self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| self.schema("integer out of range"))
    }

    pub fn bool(&self) -> Result<bool> {
        self.value.as_bool().ok_or_else(|| self.schema("expected a boolean"))
    }

    pub fn str(&self) -> Result<&'a str> {
        self.value.as_str().ok_or_else(|| self.schema("expected a string"))
    }

    fn pair(&self) -> Result<(Node<'a>, Node<'a>)> {
        let mut items = self.array()?;
        if items.len() != 2 {
            return Err(self.schema("expected [lower, upper]"));
        }
        let b = items.pop().expect("two items");
        let a = items.pop().expect("two items");
        Ok((a, b))
    }

    pub fn interval(&self) -> Result<Interval> {
        let (a, b) = self.pair()?;
        Interval::new(a.f64()?, b.f64()?).map_err(|e| self.invariant(e))
    }

    pub fn intervals(&self) -> Result<Vec<Interval>> {
        self.array()?.iter().map(Node::interval).collect()
    }

    pub fn matrix(&self) -> Result<IntervalMatrix> {
        let rows = self
            .array()?
            .iter()
            .map(Node::intervals)
            .collect::<Result<Vec<_>>>()?;
        IntervalMatrix::from_rows(rows).map_err(|e| self.invariant(e))
    }

    fn neutral(&self) -> Result<NeutralElement> {
        NeutralElement::new(self.f64()?).map_err(|e| self.invariant(e))
    }

    fn cards(&self) -> Result<CardCount> {
        let (a, b) = self.pair()?;
        let (l, u) = (
            a.value.as_u64().ok_or_else(|| a.invariant("card counts are non-negative integers"))?,
            b.value.as_u64().ok_or_else(|| b.invariant("card counts are non-negative integers"))?,
        );
        CardCount::new(l, u).map_err(|e| self.invariant(e))
    }
}

fn read_chain(n: &Node) -> Result<ConsecutiveChain> {
    ConsecutiveChain::new(n.intervals()?).map_err(|e| n.invariant(e))
}

fn read_scale(p: &Node) -> Result<ValueScale> {
    let normalization_constant = match p.opt_field("normalization_constant") {
        Some(c) => {
            let v = c.f64()?;
            if v <= 0.0 {
                return Err(c.invariant("normalization constant must be positive"));
            }
            Some(v)
        }
        None => None,
    };
    Ok(ValueScale {
        values: p.field("values")?.intervals()?,
        neutral: p.field("neutral")?.neutral()?,
        normalization_constant,
    })
}

fn read_repair(p: &Node) -> Result<RepairSolution> {
    let nu = p
        .field("nu")?
        .array()?
        .iter()
        .map(Node::f64)
        .collect::<Result<Vec<_>>>()?;
    let alpha_node = p.field("alpha")?;
    let alpha = alpha_node.f64()?;
    if alpha < 0.0 {
        return Err(alpha_node.invariant("alpha must be non-negative"));
    }
    let repaired_node = p.field("repaired")?;
    let repaired = repaired_node.matrix()?;
    if repaired.n() != nu.len() {
        return Err(repaired_node.invariant("dimension differs from nu"));
    }
    Ok(RepairSolution {
        nu,
        alpha,
        repaired,
        objective: p.field("objective")?.f64()?,
        mu: p.field("mu")?.f64()?,
    })
}

fn read_report(p: &Node) -> Result<ConsistencyReport> {
    let worst_triple = match p.opt_field("worst_triple") {
        Some(t) => {
            let items = t.array()?;
            if items.len() != 3 {
                return Err(t.schema("expected [i, j, k]"));
            }
            Some((items[0].usize()?, items[1].usize()?, items[2].usize()?))
        }
        None => None,
    };
    Ok(ConsistencyReport {
        is_reciprocal: p.field("is_reciprocal")?.bool()?,
        is_consistent: p.field("is_consistent")?.bool()?,
        neutral: p.opt_field("neutral").map(|n| n.neutral()).transpose()?,
        max_residual: p.field("max_residual")?.f64()?,
        worst_triple,
    })
}

fn read_chain_solution(p: &Node) -> Result<ChainRepairSolution> {
    Ok(ChainRepairSolution {
        alpha: p.field("alpha")?.f64()?,
        adjusted_steps: p.field("adjusted_steps")?.intervals()?,
        objective: p.field("objective")?.f64()?,
    })
}

fn read_diagnosis(p: &Node) -> Result<Diagnosis> {
    let proposal = read_chain_solution(p)?;
    let unit_chain = read_chain(&p.field("unit_steps")?)?;
    if proposal.adjusted_steps.len() != unit_chain.steps().len() {
        return Err(p.field("adjusted_steps")?.invariant("length differs from unit_steps"));
    }
    Ok(Diagnosis {
        equal_lengths: p.field("equal_lengths")?.bool()?,
        unit_chain,
        proposal,
    })
}

fn read_result(p: &Node) -> Result<SessionResult> {
    let c_node = p.field("normalization_constant")?;
    let normalization_constant = c_node.f64()?;
    if normalization_constant <= 0.0 {
        return Err(c_node.invariant("normalization constant must be positive"));
    }
    Ok(SessionResult {
        unit_chain: read_chain(&p.field("unit_steps")?)?,
        accepted_chain: read_chain(&p.field("accepted_steps")?)?,
        neutral: p.field("neutral")?.neutral()?,
        full_table: p.field("full_table")?.matrix()?,
        raw_scale: read_scale(&p.field("raw_scale")?)?,
        normalized_scale: read_scale(&p.field("normalized_scale")?)?,
        normalization_constant,
    })
}

pub fn read_event(n: &Node) -> Result<SessionEvent> {
    let ty = n.field("type")?;
    Ok(match ty.str()? {
        "started" => SessionEvent::Started {
            session_id: n.field("session_id")?.str()?.to_owned(),
            objects: n
                .field("objects")?
                .array()?
                .iter()
                .map(|o| o.str().map(str::to_owned))
                .collect::<Result<_>>()?,
        },
        "cards_set" => SessionEvent::CardsSet {
            slot: n.field("slot")?.usize()?,
            cards: n.field("cards")?.cards()?,
        },
        "diagnosed" => SessionEvent::Diagnosed {
            equal_lengths: n.field("equal_lengths")?.bool()?,
            proposal: read_chain_solution(&n.field("proposal")?)?,
        },
        "responded" => SessionEvent::Responded {
            accept: n.field("accept")?.bool()?,
        },
        "finalized" => SessionEvent::Finalized,
        other => return Err(ty.schema(format!("unknown event type {other:?}"))),
    })
}

pub fn read_history_entry(n: &Node) -> Result<HistoryEntry> {
    Ok(HistoryEntry {
        timestamp: n.field("timestamp")?.u64()?,
        event: read_event(&n.field("event")?)?,
    })
}

fn read_session(p: &Node) -> Result<ElicitationSession> {
    let history_node = p.field("history")?;
    let history = history_node
        .array()?
        .iter()
        .map(read_history_entry)
        .collect::<Result<Vec<_>>>()?;
    let session = ElicitationSession::replay(history).map_err(|e| history_node.invariant(e))?;

    let id = p.field("session_id")?;
    if id.str()? != session.session_id() {
        return Err(id.invariant("session_id disagrees with history"));
    }
    let phase = p.field("phase")?;
    match Phase::parse(phase.str()?) {
        Some(ph) if ph == session.phase() => {}
        Some(_) => return Err(phase.invariant("phase disagrees with history")),
        None => return Err(phase.schema("unknown phase")),
    }
    let revision = p.field("revision")?;
    if revision.u64()? != session.revision() {
        return Err(revision.invariant("revision disagrees with history"));
    }
    Ok(session)
}
