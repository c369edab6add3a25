//! Deck-of-Cards elicitation sessions.
//!
//! Objects are ranked best to worst, the decision-maker places an interval
//! number of blank cards between consecutive objects, and each gap becomes a
//! unit step `[cards⁻ + 1, cards⁺ + 1]`. Unequal step lengths trigger a
//! repair proposal that the decision-maker accepts or answers by revising the
//! cards. The accepted equal-length chain determines the consistent table and
//! the normalized interval value scale.
//!
//! Every mutation is recorded as a [`SessionEvent`]; the state is a pure
//! function of the history, and [`ElicitationSession::replay`] rebuilds it.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::interval::{Interval, NeutralElement, DEFAULT_TOL};
use crate::matrix::IntervalMatrix;
use crate::repair::{self, ChainRepairSolution};
use crate::scale::{self, ConsecutiveChain, ValueScale};

/// Milliseconds since the Unix epoch.
pub type Timestamp = u64;

/// An interval number of blank cards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardCount {
    lower: u64,
    upper: u64,
}

impl CardCount {
    pub fn new(lower: u64, upper: u64) -> Result<Self> {
        if lower > upper {
            return Err(Error::InvalidInterval {
                lower: lower as f64,
                upper: upper as f64,
            });
        }
        Ok(Self { lower, upper })
    }

    pub fn from_interval(cards: &Interval) -> Result<Self> {
        let (l, u) = (cards.lower(), cards.upper());
        if l < 0.0 || u < 0.0 {
            return Err(Error::NegativeCards);
        }
        if l.fract() != 0.0 || u.fract() != 0.0 || u > u64::MAX as f64 {
            return Err(Error::NonIntegerCards);
        }
        Self::new(l as u64, u as u64)
    }

    pub fn lower(&self) -> u64 {
        self.lower
    }

    pub fn upper(&self) -> u64 {
        self.upper
    }

    /// Zero cards mean a difference of one unit.
    pub fn unit_step(&self) -> Interval {
        Interval::from_bounds_unchecked(self.lower as f64 + 1.0, self.upper as f64 + 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Ranking,
    /// Waiting for blank-card counts.
    CardsEntry,
    /// Every slot holds cards; ready for diagnosis.
    Diagnosed,
    ProposalPending,
    Accepted,
    Finalized,
}

impl Phase {
    pub const ALL: [Phase; 6] = [
        Phase::Ranking,
        Phase::CardsEntry,
        Phase::Diagnosed,
        Phase::ProposalPending,
        Phase::Accepted,
        Phase::Finalized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Ranking => "Ranking",
            Phase::CardsEntry => "CardsEntry",
            Phase::Diagnosed => "Diagnosed",
            Phase::ProposalPending => "ProposalPending",
            Phase::Accepted => "Accepted",
            Phase::Finalized => "Finalized",
        }
    }

    pub fn parse(s: &str) -> Option<Phase> {
        Phase::ALL.into_iter().find(|p| p.as_str() == s)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SessionEvent {
    Started {
        session_id: String,
        objects: Vec<String>,
    },
    CardsSet {
        slot: usize,
        cards: CardCount,
    },
    Diagnosed {
        equal_lengths: bool,
        proposal: ChainRepairSolution,
    },
    Responded {
        accept: bool,
    },
    Finalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub timestamp: Timestamp,
    pub event: SessionEvent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosis {
    pub equal_lengths: bool,
    pub unit_chain: ConsecutiveChain,
    pub proposal: ChainRepairSolution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionResult {
    pub unit_chain: ConsecutiveChain,
    /// The accepted equal-length chain the table is built from.
    pub accepted_chain: ConsecutiveChain,
    pub neutral: NeutralElement,
    pub full_table: IntervalMatrix,
    pub raw_scale: ValueScale,
    pub normalized_scale: ValueScale,
    pub normalization_constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElicitationSession {
    session_id: String,
    objects: Vec<String>,
    blank_cards: Vec<Option<CardCount>>,
    phase: Phase,
    diagnosis: Option<(bool, ChainRepairSolution)>,
    history: Vec<HistoryEntry>,
}

impl ElicitationSession {
    /// Opens a session for objects listed best to worst.
    pub fn start(session_id: impl Into<String>, objects: Vec<String>, at: Timestamp) -> Result<Self> {
        let event = SessionEvent::Started {
            session_id: session_id.into(),
            objects,
        };
        Self::replay(vec![HistoryEntry {
            timestamp: at,
            event,
        }])
    }

    /// Rebuilds a session from its full history, validating every event.
    pub fn replay(history: impl IntoIterator<Item = HistoryEntry>) -> Result<Self> {
        let mut entries = history.into_iter();
        let first = entries
            .next()
            .ok_or(Error::InvalidPhase("history must begin with Started"))?;
        let SessionEvent::Started {
            session_id,
            objects,
        } = &first.event
        else {
            return Err(Error::InvalidPhase("history must begin with Started"));
        };
        if objects.len() < 2 {
            return Err(Error::TooFewObjects(objects.len()));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = objects.iter().find(|o| !seen.insert(o.as_str())) {
            return Err(Error::DuplicateNames(dup.clone()));
        }
        let mut session = Self {
            session_id: session_id.clone(),
            objects: objects.clone(),
            blank_cards: vec![None; objects.len() - 1],
            phase: Phase::CardsEntry,
            diagnosis: None,
            history: vec![first],
        };
        for entry in entries {
            session.apply(entry)?;
        }
        Ok(session)
    }

    fn apply(&mut self, entry: HistoryEntry) -> Result<()> {
        match &entry.event {
            SessionEvent::Started { .. } => return Err(Error::InvalidPhase("already started")),
            SessionEvent::CardsSet { slot, cards } => {
                if matches!(self.phase, Phase::ProposalPending | Phase::Finalized) {
                    return Err(Error::InvalidPhase(self.phase.as_str()));
                }
                let slots = self.blank_cards.len();
                let cell = self
                    .blank_cards
                    .get_mut(*slot)
                    .ok_or(Error::BadSlot { slot: *slot, slots })?;
                *cell = Some(*cards);
                self.diagnosis = None;
                self.phase = if self.missing_slot().is_none() {
                    Phase::Diagnosed
                } else {
                    Phase::CardsEntry
                };
            }
            SessionEvent::Diagnosed {
                equal_lengths,
                proposal,
            } => {
                if !matches!(self.phase, Phase::CardsEntry | Phase::Diagnosed) {
                    return Err(Error::InvalidPhase(self.phase.as_str()));
                }
                let computed = self.compute_diagnosis()?;
                if computed.equal_lengths != *equal_lengths || computed.proposal != *proposal {
                    return Err(Error::InvalidPhase("recorded diagnosis does not match cards"));
                }
                self.phase = if *equal_lengths {
                    Phase::Accepted
                } else {
                    Phase::ProposalPending
                };
                self.diagnosis = Some((*equal_lengths, proposal.clone()));
            }
            SessionEvent::Responded { accept } => {
                if self.phase != Phase::ProposalPending {
                    return Err(Error::NoPendingProposal);
                }
                if *accept {
                    self.phase = Phase::Accepted;
                } else {
                    self.phase = Phase::CardsEntry;
                    self.diagnosis = None;
                }
            }
            SessionEvent::Finalized => {
                if self.phase != Phase::Accepted {
                    return Err(Error::NotAccepted);
                }
                self.phase = Phase::Finalized;
            }
        }
        self.history.push(entry);
        Ok(())
    }

    fn record(&mut self, event: SessionEvent, at: Timestamp) -> Result<()> {
        self.apply(HistoryEntry {
            timestamp: at,
            event,
        })
    }

    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn blank_cards(&self) -> &[Option<CardCount>] {
        &self.blank_cards
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    /// Number of recorded events; bumps on every mutation.
    pub fn revision(&self) -> u64 {
        self.history.len() as u64
    }

    /// The current repair proposal, pending or accepted.
    pub fn proposal(&self) -> Option<&ChainRepairSolution> {
        self.diagnosis.as_ref().map(|(_, p)| p)
    }

    fn missing_slot(&self) -> Option<usize> {
        self.blank_cards.iter().position(Option::is_none)
    }

    pub fn set_blank_cards(&mut self, slot: usize, cards: &Interval, at: Timestamp) -> Result<()> {
        let slots = self.blank_cards.len();
        if slot >= slots {
            return Err(Error::BadSlot { slot, slots });
        }
        let cards = CardCount::from_interval(cards)?;
        self.record(SessionEvent::CardsSet { slot, cards }, at)
    }

    /// Consecutive unit steps: blank cards plus one.
    pub fn unit_chain(&self) -> Result<ConsecutiveChain> {
        let steps = self
            .blank_cards
            .iter()
            .enumerate()
            .map(|(slot, c)| c.map(|c| c.unit_step()).ok_or(Error::IncompleteCards(slot)))
            .collect::<Result<Vec<_>>>()?;
        ConsecutiveChain::new(steps)
    }

    fn compute_diagnosis(&self) -> Result<Diagnosis> {
        Ok(diagnose_chain(self.unit_chain()?))
    }

    /// Checks whether the unit steps share one length and, if not, proposes
    /// the closest equal-length chain.
    ///
    /// Once a diagnosis is on record it is returned unchanged until the cards
    /// change.
    pub fn diagnose(&mut self, at: Timestamp) -> Result<Diagnosis> {
        if let Some((equal_lengths, proposal)) = &self.diagnosis {
            return Ok(Diagnosis {
                equal_lengths: *equal_lengths,
                unit_chain: self.unit_chain()?,
                proposal: proposal.clone(),
            });
        }
        if let Some(slot) = self.missing_slot() {
            return Err(Error::IncompleteCards(slot));
        }
        let d = self.compute_diagnosis()?;
        self.record(
            SessionEvent::Diagnosed {
                equal_lengths: d.equal_lengths,
                proposal: d.proposal.clone(),
            },
            at,
        )?;
        Ok(d)
    }

    /// Accepting adopts the proposal; rejecting returns to card entry with the
    /// current cards kept for revision.
    pub fn respond_to_proposal(&mut self, accept: bool, at: Timestamp) -> Result<()> {
        if self.phase != Phase::ProposalPending {
            return Err(Error::NoPendingProposal);
        }
        self.record(SessionEvent::Responded { accept }, at)
    }

    /// Builds the consistent table and the value scales from the accepted
    /// chain. Calling it again on a finalized session returns the same result.
    pub fn finalize(&mut self, at: Timestamp) -> Result<SessionResult> {
        match self.phase {
            Phase::Accepted => {
                let result = self.result()?;
                self.record(SessionEvent::Finalized, at)?;
                Ok(result)
            }
            Phase::Finalized => self.result(),
            _ => Err(Error::NotAccepted),
        }
    }

    /// The result implied by the accepted chain, without recording anything.
    pub fn result(&self) -> Result<SessionResult> {
        if !matches!(self.phase, Phase::Accepted | Phase::Finalized) {
            return Err(Error::NotAccepted);
        }
        let (_, accepted) = self.diagnosis.as_ref().ok_or(Error::NotAccepted)?;
        evaluate_chain(self.unit_chain()?, accepted)
    }
}

/// Diagnosis of a unit chain: equal-length chains are their own proposal.
pub fn diagnose_chain(unit_chain: ConsecutiveChain) -> Diagnosis {
    let (equal_lengths, proposal) = match unit_chain.common_length(DEFAULT_TOL) {
        Some(len) => (
            true,
            ChainRepairSolution {
                alpha: len / 2.0,
                adjusted_steps: unit_chain.steps().to_vec(),
                objective: 0.0,
            },
        ),
        None => (false, repair::repair_chain(&unit_chain)),
    };
    Diagnosis {
        equal_lengths,
        unit_chain,
        proposal,
    }
}

/// The consistent table and value scales implied by an accepted proposal.
pub fn evaluate_chain(unit_chain: ConsecutiveChain, accepted: &ChainRepairSolution) -> Result<SessionResult> {
    let accepted_chain = accepted.adjusted_chain();
    let neutral = NeutralElement::new(accepted.alpha)?;
    let full_table = accepted_chain.propagate(neutral)?;
    let raw_scale = scale::cumulative_from_chain(&accepted_chain, neutral)?;
    // C comes from the cards as entered, not from the adjusted chain.
    let normalization_constant = scale::normalization_constant(&unit_chain)?;
    let normalized_scale = scale::normalize(&raw_scale, normalization_constant)?;
    Ok(SessionResult {
        unit_chain,
        accepted_chain,
        neutral,
        full_table,
        raw_scale,
        normalized_scale,
        normalization_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipr;

    fn iv(l: f64, u: f64) -> Interval {
        Interval::new(l, u).unwrap()
    }

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn with_cards(cards: &[(f64, f64)]) -> ElicitationSession {
        let objs: Vec<String> = (1..=cards.len() + 1).map(|k| format!("l{k}")).collect();
        let mut s = ElicitationSession::start("s", objs, 0).unwrap();
        for (slot, &(l, u)) in cards.iter().enumerate() {
            s.set_blank_cards(slot, &iv(l, u), slot as u64 + 1).unwrap();
        }
        s
    }

    #[test]
    fn start() {
        let s = ElicitationSession::start("a", names(&["l1", "l2", "l3", "l4"]), 0).unwrap();
        assert_eq!(s.phase(), Phase::CardsEntry);
        assert_eq!(s.blank_cards().len(), 3);
        assert!(s.blank_cards().iter().all(Option::is_none));
        let s = ElicitationSession::start("b", names(&["A", "B"]), 0).unwrap();
        assert_eq!(s.blank_cards().len(), 1);
        assert_eq!(
            ElicitationSession::start("c", names(&["A", "A"]), 0),
            Err(Error::DuplicateNames("A".into()))
        );
        assert_eq!(
            ElicitationSession::start("d", names(&["A"]), 0),
            Err(Error::TooFewObjects(1))
        );
    }

    #[test]
    fn card_validation() {
        let mut s = ElicitationSession::start("a", names(&["A", "B", "C"]), 0).unwrap();
        assert_eq!(s.set_blank_cards(0, &iv(-1.0, 2.0), 1), Err(Error::NegativeCards));
        assert_eq!(s.set_blank_cards(0, &iv(0.5, 2.0), 1), Err(Error::NonIntegerCards));
        assert_eq!(
            s.set_blank_cards(2, &iv(0.0, 2.0), 1),
            Err(Error::BadSlot { slot: 2, slots: 2 })
        );
        assert_eq!(s.revision(), 1);
        s.set_blank_cards(0, &iv(0.0, 0.0), 1).unwrap();
        assert_eq!(s.phase(), Phase::CardsEntry);
        assert_eq!(s.unit_chain(), Err(Error::IncompleteCards(1)));
        assert_eq!(s.diagnose(2), Err(Error::IncompleteCards(1)));
        s.set_blank_cards(1, &iv(2.0, 2.0), 2).unwrap();
        assert_eq!(s.phase(), Phase::Diagnosed);
    }

    #[test]
    fn unit_chains() {
        let s = with_cards(&[(3.0, 5.0), (0.0, 2.0), (1.0, 3.0)]);
        assert_eq!(
            s.unit_chain().unwrap().steps(),
            &[iv(4.0, 6.0), iv(1.0, 3.0), iv(2.0, 4.0)]
        );
        let s = with_cards(&[(3.0, 5.0), (0.0, 2.0), (1.0, 4.0)]);
        assert_eq!(
            s.unit_chain().unwrap().steps(),
            &[iv(4.0, 6.0), iv(1.0, 3.0), iv(2.0, 5.0)]
        );
        let s = with_cards(&[(0.0, 0.0)]);
        assert_eq!(s.unit_chain().unwrap().steps(), &[iv(1.0, 1.0)]);
    }

    #[test]
    fn equal_length_flow() {
        let mut s = with_cards(&[(3.0, 5.0), (0.0, 2.0), (1.0, 3.0)]);
        let d = s.diagnose(10).unwrap();
        assert!(d.equal_lengths);
        assert_eq!(d.proposal.alpha, 1.0);
        assert_eq!(d.proposal.adjusted_steps, d.unit_chain.steps());
        assert_eq!(s.phase(), Phase::Accepted);
        assert_eq!(s.respond_to_proposal(true, 11), Err(Error::NoPendingProposal));

        let r = s.finalize(12).unwrap();
        assert_eq!(s.phase(), Phase::Finalized);
        let expected = IntervalMatrix::from_bounds(&[
            &[(-1.0, 1.0), (4.0, 6.0), (6.0, 8.0), (9.0, 11.0)],
            &[(-6.0, -4.0), (-1.0, 1.0), (1.0, 3.0), (4.0, 6.0)],
            &[(-8.0, -6.0), (-3.0, -1.0), (-1.0, 1.0), (2.0, 4.0)],
            &[(-11.0, -9.0), (-6.0, -4.0), (-4.0, -2.0), (-1.0, 1.0)],
        ])
        .unwrap();
        assert_eq!(r.full_table, expected);
        assert_eq!(r.normalization_constant, 10.0);
        let want = [(0.9, 1.1), (0.4, 0.6), (0.2, 0.4), (-0.1, 0.1)];
        for (v, (l, u)) in r.normalized_scale.values.iter().zip(want) {
            assert!(v.approx_eq(&iv(l, u), 1e-12));
        }
        assert_eq!(r.normalized_scale, scale::normalize(&r.raw_scale, 10.0).unwrap());
        assert!(r.normalized_scale.is_monotone());

        // Finalizing again is a read.
        let rev = s.revision();
        assert_eq!(s.finalize(13).unwrap(), r);
        assert_eq!(s.revision(), rev);
        assert_eq!(s.respond_to_proposal(true, 14), Err(Error::NoPendingProposal));
    }

    #[test]
    fn unequal_length_flow_with_revision() {
        let mut s = with_cards(&[(3.0, 5.0), (0.0, 2.0), (1.0, 4.0)]);
        assert_eq!(s.finalize(9), Err(Error::NotAccepted));
        let d = s.diagnose(10).unwrap();
        assert!(!d.equal_lengths);
        assert!((d.proposal.alpha - 7.0 / 6.0).abs() < 1e-12);
        assert_eq!(s.phase(), Phase::ProposalPending);
        assert_eq!(s.diagnose(11).unwrap(), d);
        assert_eq!(s.revision(), 5);
        assert!(matches!(
            s.set_blank_cards(0, &iv(1.0, 1.0), 11),
            Err(Error::InvalidPhase(_))
        ));

        s.respond_to_proposal(false, 12).unwrap();
        assert_eq!(s.phase(), Phase::CardsEntry);
        assert_eq!(s.blank_cards()[2], Some(CardCount::new(1, 4).unwrap()));
        assert!(s.proposal().is_none());

        s.set_blank_cards(2, &iv(1.0, 3.0), 13).unwrap();
        let d = s.diagnose(14).unwrap();
        assert!(d.equal_lengths);
        let r = s.finalize(15).unwrap();
        assert_eq!(r.normalization_constant, 10.0);
        let kinds: Vec<_> = s.history().iter().map(|h| std::mem::discriminant(&h.event)).collect();
        assert_eq!(kinds.len(), 9);
    }

    #[test]
    fn accepted_proposal_flow() {
        let mut s = with_cards(&[(3.0, 5.0), (0.0, 2.0), (1.0, 4.0)]);
        s.diagnose(10).unwrap();
        s.respond_to_proposal(true, 11).unwrap();
        assert_eq!(s.phase(), Phase::Accepted);
        let r = s.finalize(12).unwrap();
        let a = 7.0 / 6.0;
        assert!((r.neutral.epsilon() - a).abs() < 1e-12);
        assert_eq!(r.normalization_constant, 10.5);
        assert!(ipr::check_consistency(&r.full_table, r.neutral, 1e-9).unwrap().is_consistent);
        let v2 = r.normalized_scale.values[1];
        assert!((v2.lower() - 4.333_333_333_333_333 / 10.5).abs() < 1e-9);
        assert!((v2.upper() - 6.666_666_666_666_667 / 10.5).abs() < 1e-9);
    }

    #[test]
    fn trivial_two_object_session() {
        let mut s = with_cards(&[(0.0, 0.0)]);
        let d = s.diagnose(5).unwrap();
        assert!(d.equal_lengths);
        assert_eq!(d.proposal.alpha, 0.0);
        let r = s.finalize(6).unwrap();
        assert_eq!(r.normalization_constant, 1.0);
        assert_eq!(
            r.normalized_scale.values,
            vec![Interval::point(1.0), Interval::point(0.0)]
        );
    }

    #[test]
    fn replay_reconstructs_state() {
        let mut s = with_cards(&[(3.0, 5.0), (0.0, 2.0), (1.0, 4.0)]);
        s.diagnose(10).unwrap();
        s.respond_to_proposal(false, 11).unwrap();
        s.set_blank_cards(2, &iv(1.0, 3.0), 12).unwrap();
        s.diagnose(13).unwrap();
        let copy = ElicitationSession::replay(s.history().to_vec()).unwrap();
        assert_eq!(copy, s);

        let before = s.history().to_vec();
        s.finalize(14).unwrap();
        assert_eq!(&s.history()[..before.len()], &before[..]);
    }

    #[test]
    fn replay_rejects_tampered_history() {
        let mut s = with_cards(&[(3.0, 5.0), (0.0, 2.0), (1.0, 4.0)]);
        s.diagnose(10).unwrap();
        let mut h = s.history().to_vec();
        if let SessionEvent::Diagnosed { proposal, .. } = &mut h[4].event {
            proposal.alpha = 1.0;
        }
        assert!(ElicitationSession::replay(h).is_err());
        let mut h = s.history().to_vec();
        h.push(HistoryEntry {
            timestamp: 20,
            event: SessionEvent::Finalized,
        });
        assert_eq!(ElicitationSession::replay(h), Err(Error::NotAccepted));
    }
}
