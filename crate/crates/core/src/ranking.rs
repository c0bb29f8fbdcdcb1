//! Brute-force and virtual-object (RTC*) ranking of swap pairs.
//!
//! Both methods return the same list: swap pairs ordered by the exact
//! post-exchange distance, ties broken by `(swap_out_id, swap_in_id)`.
//!
//! RTC* works in rate space. A candidate `P` is normalised to `p / lambda_p`
//! and each member `R` gets a virtual object `v = (diff + r) / lambda_r` on
//! the team's weak dimensions. For a fixed `R`, and as long as no strong
//! dimension is flipped by the exchange, the post-exchange distance equals
//! `lambda_r * odis(v, p / lambda_p)`. Strong-dimension flips only add to
//! the exact distance, so `lambda_r * odis` is a lower bound that lets the
//! search stop reading a member's sorted run once the bound passes the
//! current k-th best exact distance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, RtcError};
use crate::index::{scan_blocks, IndexEntry, IoCounters, NnIndex, PartitionCursor};
use crate::model::{
    self, AttributeVector, ObjectId, ObjectRecord, ObjectSpace, TargetContext, TeamContext,
    TruncatingVector, WeightVector,
};

/// Relative slack on the stopping bound of the RTC* search.
const BOUND_REL_SLACK: f64 = 1e-9;

/// Everything a ranking query depends on.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub space: &'a ObjectSpace,
    pub team: &'a TeamContext,
    pub target: &'a TargetContext,
    pub weights: &'a WeightVector,
}

impl<'a> Problem<'a> {
    pub fn new(
        space: &'a ObjectSpace,
        team: &'a TeamContext,
        target: &'a TargetContext,
        weights: &'a WeightVector,
    ) -> Result<Self> {
        let d = space.dimension();
        for found in [team.dim(), target.dim(), weights.dim()] {
            if found != d {
                return Err(RtcError::DimensionMismatch { expected: d, found });
            }
        }
        Ok(Problem {
            space,
            team,
            target,
            weights,
        })
    }

    pub fn diff(&self) -> Result<model::DiffVector> {
        model::diff(self.target, self.team)
    }

    /// Truncated distance between team and target before any exchange.
    pub fn initial_distance(&self) -> Result<f64> {
        model::gap_distance(&self.diff()?, self.weights)
    }

    /// Identity of (space version, team, target, weights).
    pub fn fingerprint(&self) -> Fingerprint {
        let mut h = Sha256::new();
        h.update(b"rtc-config-v1");
        h.update(self.space.digest());
        h.update((self.team.members().len() as u64).to_le_bytes());
        for r in self.team.members() {
            h.update(r.id.0.to_le_bytes());
            h.update(r.lambda.to_bits().to_le_bytes());
            for v in r.attrs.values() {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        for v in self.target.aggregate.values() {
            h.update(v.to_bits().to_le_bytes());
        }
        for v in self.weights.values() {
            h.update(v.to_bits().to_le_bytes());
        }
        Fingerprint(h.finalize().into())
    }
}

/// SHA-256 fingerprint of a ranking configuration.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub [u8; 32]);

impl Fingerprint {
    /// First 8 bytes as 16 lowercase hex digits; used in index file names.
    pub fn short(&self) -> String {
        self.0[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({self})")
    }
}

/// Rate-space point a swap-in must reach to close every weak-dimension gap
/// when it replaces `swap_out_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VirtualObject {
    pub swap_out_id: ObjectId,
    pub lambda_r: f64,
    values: AttributeVector,
    tv2: TruncatingVector,
    /// True when a negative raw value on a weak dimension was raised to 0.
    clipped: bool,
}

impl VirtualObject {
    /// Builds a virtual object from explicit values. Components on masked
    /// dimensions are forced to 0.
    pub fn from_parts(
        swap_out_id: ObjectId,
        lambda_r: f64,
        values: Vec<f64>,
        tv2: TruncatingVector,
    ) -> Result<Self> {
        if values.len() != tv2.dim() {
            return Err(RtcError::DimensionMismatch {
                expected: values.len(),
                found: tv2.dim(),
            });
        }
        let values = values
            .iter()
            .zip(tv2.bits())
            .map(|(&v, &b)| if b == 1 { v } else { 0.0 })
            .collect();
        Ok(VirtualObject {
            swap_out_id,
            lambda_r,
            values: AttributeVector::new(values)?,
            tv2,
            clipped: false,
        })
    }

    pub fn values(&self) -> &[f64] {
        self.values.values()
    }

    pub fn tv2(&self) -> &TruncatingVector {
        &self.tv2
    }

    pub fn clipped(&self) -> bool {
        self.clipped
    }
}

/// Candidate attributes divided by its exchange parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedCandidate {
    pub object_id: ObjectId,
    pub rates: AttributeVector,
}

impl NormalizedCandidate {
    pub fn new(record: &ObjectRecord) -> Result<Self> {
        if !(record.lambda.is_finite() && record.lambda > 0.0) {
            return Err(RtcError::InvalidLambda {
                id: record.id,
                value: record.lambda,
            });
        }
        let rates = record.attrs.values().iter().map(|p| p / record.lambda).collect();
        Ok(NormalizedCandidate {
            object_id: record.id,
            rates: AttributeVector::new(rates)?,
        })
    }

    /// Rate vector given directly (already per unit of exchange parameter).
    pub fn from_rates(object_id: ObjectId, rates: Vec<f64>) -> Result<Self> {
        Ok(NormalizedCandidate {
            object_id,
            rates: AttributeVector::new(rates)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapRecommendation {
    pub swap_out_id: ObjectId,
    pub swap_in_id: ObjectId,
    /// Exact post-exchange truncated distance.
    pub new_distance: f64,
    /// Distance from the swap-in's rates to the swap-out's virtual object.
    pub odis: f64,
}

pub fn virtual_object(
    team: &TeamContext,
    target: &TargetContext,
    swap_out: &ObjectRecord,
) -> Result<VirtualObject> {
    if team.member(swap_out.id).is_none() {
        return Err(RtcError::NotAMember(swap_out.id));
    }
    let diff = model::diff(target, team)?;
    virtual_object_from_diff(&diff, swap_out)
}

pub(crate) fn virtual_object_from_diff(
    diff: &model::DiffVector,
    swap_out: &ObjectRecord,
) -> Result<VirtualObject> {
    let lambda_r = swap_out.lambda;
    if !(lambda_r.is_finite() && lambda_r > 0.0) {
        return Err(RtcError::InvalidLambda {
            id: swap_out.id,
            value: lambda_r,
        });
    }
    if diff.dim() != swap_out.dim() {
        return Err(RtcError::DimensionMismatch {
            expected: diff.dim(),
            found: swap_out.dim(),
        });
    }
    let tv2 = model::truncating_vector(diff);
    let mut clipped = false;
    let values = diff
        .values()
        .iter()
        .zip(swap_out.attrs.values())
        .zip(tv2.bits())
        .map(|((&d, &r), &b)| {
            if b == 0 {
                return 0.0;
            }
            let raw = (d + r) / lambda_r;
            if raw < 0.0 {
                clipped = true;
                0.0
            } else {
                raw
            }
        })
        .collect();
    Ok(VirtualObject {
        swap_out_id: swap_out.id,
        lambda_r,
        values: AttributeVector::new(values)?,
        tv2,
        clipped,
    })
}

/// `sqrt(sum_i (w_i * max(v_i - rate_i, 0) * tv2_i)^2)`.
pub fn odis(v: &VirtualObject, cand: &NormalizedCandidate, w: &WeightVector) -> Result<f64> {
    let d = v.values().len();
    for found in [cand.rates.dim(), w.dim()] {
        if found != d {
            return Err(RtcError::DimensionMismatch { expected: d, found });
        }
    }
    let mut sum = 0.0;
    for (((&vi, &b), &rate), &wi) in v
        .values()
        .iter()
        .zip(v.tv2.bits())
        .zip(cand.rates.values())
        .zip(w.values())
    {
        sum += odis_term(vi, b, rate, wi);
    }
    Ok(sum.sqrt())
}

/// [`odis`] against a raw record, normalising on the fly with the same
/// arithmetic as [`NormalizedCandidate::new`].
#[inline]
pub(crate) fn odis_record(v: &VirtualObject, cand: &ObjectRecord, w: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (((&vi, &b), &p), &wi) in v
        .values()
        .iter()
        .zip(v.tv2.bits())
        .zip(cand.attrs.values())
        .zip(w)
    {
        sum += odis_term(vi, b, p / cand.lambda, wi);
    }
    sum.sqrt()
}

#[inline]
fn odis_term(vi: f64, b: u8, rate: f64, wi: f64) -> f64 {
    let gap = vi - rate;
    let gap = if gap > 0.0 { gap } else { 0.0 };
    let term = wi * gap * f64::from(b);
    term * term
}

/// Ordering used by both methods: distance, then swap-out id, then swap-in id.
fn rank_order(a: &SwapRecommendation, b: &SwapRecommendation) -> Ordering {
    a.new_distance
        .total_cmp(&b.new_distance)
        .then(a.swap_out_id.cmp(&b.swap_out_id))
        .then(a.swap_in_id.cmp(&b.swap_in_id))
}

struct Ranked(SwapRecommendation);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        rank_order(&self.0, &other.0) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        rank_order(&self.0, &other.0)
    }
}

/// Bounded max-heap keeping the `k` best recommendations.
struct TopK {
    k: usize,
    heap: BinaryHeap<Ranked>,
}

impl TopK {
    fn new(k: usize) -> Self {
        TopK {
            k,
            heap: BinaryHeap::with_capacity(k.min(1 << 16) + 1),
        }
    }

    fn is_full(&self) -> bool {
        self.heap.len() >= self.k
    }

    fn worst(&self) -> Option<&SwapRecommendation> {
        self.heap.peek().map(|r| &r.0)
    }

    /// Whether (distance, out, in) would enter the list.
    #[inline]
    fn admits(&self, new_distance: f64, out: ObjectId, inn: ObjectId) -> bool {
        match self.worst() {
            Some(w) if self.is_full() => new_distance
                .total_cmp(&w.new_distance)
                .then(out.cmp(&w.swap_out_id))
                .then(inn.cmp(&w.swap_in_id))
                == Ordering::Less,
            _ => true,
        }
    }

    fn push(&mut self, rec: SwapRecommendation) {
        if self.is_full() {
            self.heap.pop();
        }
        self.heap.push(Ranked(rec));
    }

    fn into_sorted(self) -> Vec<SwapRecommendation> {
        let mut v: Vec<_> = self.heap.into_iter().map(|r| r.0).collect();
        v.sort_by(rank_order);
        v
    }
}

fn check_top_k(top_k: usize) -> Result<()> {
    if top_k == 0 {
        Err(RtcError::InvalidArgument("top_k must be positive".into()))
    } else {
        Ok(())
    }
}

/// Exhaustive baseline: scores every (member, candidate) pair.
pub fn brute_force_rank(problem: &Problem<'_>, top_k: usize) -> Result<Vec<SwapRecommendation>> {
    let counters = IoCounters::default();
    brute_force_rank_scanned(problem, top_k, problem.space.len().max(1), &counters)
}

/// [`brute_force_rank`] reading the space in blocks of `block_size`
/// records, once per team member, with every block read tallied in
/// `counters`.
pub fn brute_force_rank_scanned(
    problem: &Problem<'_>,
    top_k: usize,
    block_size: usize,
    counters: &IoCounters,
) -> Result<Vec<SwapRecommendation>> {
    check_top_k(top_k)?;
    if problem.space.is_empty() {
        return Err(RtcError::EmptySpace);
    }
    let diff = problem.diff()?;
    let w = problem.weights.values();
    let mut best = TopK::new(top_k);
    for r in problem.team.members() {
        for block in scan_blocks(problem.space, block_size, counters)? {
            for p in block {
                let d = model::exchange_distance(diff.values(), r, p, w);
                if best.admits(d, r.id, p.id) {
                    best.push(SwapRecommendation {
                        swap_out_id: r.id,
                        swap_in_id: p.id,
                        new_distance: d,
                        odis: f64::NAN,
                    });
                }
            }
        }
    }
    let mut out = best.into_sorted();
    // odis is reported for the winners only
    for rec in &mut out {
        let r = problem
            .team
            .member(rec.swap_out_id)
            .ok_or(RtcError::NotAMember(rec.swap_out_id))?;
        let p = problem
            .space
            .get(rec.swap_in_id)
            .ok_or(RtcError::UnknownObject(rec.swap_in_id))?;
        let v = virtual_object_from_diff(&diff, r)?;
        rec.odis = odis_record(&v, p, w);
    }
    Ok(out)
}

/// Block counts of one RTC* search, split by phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Blocks read by the nearest-neighbour lookup (one per member).
    pub lookup_blocks: u64,
    /// Extra blocks read while widening to guarantee exactness.
    pub refine_blocks: u64,
    /// Members scanned exhaustively because their virtual object was clipped.
    pub exhaustive_members: u64,
}

struct MemberStream<'a> {
    swap_out: &'a ObjectRecord,
    cursor: PartitionCursor<'a>,
    /// Largest key read so far; every unread key is at least this.
    last_key: f64,
    margin: f64,
    clipped: bool,
}

/// Incremental RTC* query, split into phases so each can be timed.
///
/// ```text
/// lookup()  one block per member: the nearest neighbours of each virtual object
/// refine()  keep reading sorted runs until no unread pair can enter the top k
/// finish()  the ranked list
/// ```
pub struct RtcStarSearch<'a> {
    problem: Problem<'a>,
    index: &'a NnIndex,
    diff: Vec<f64>,
    members: Vec<MemberStream<'a>>,
    best: TopK,
    stats: SearchStats,
    looked_up: bool,
    refined: bool,
}

impl<'a> RtcStarSearch<'a> {
    pub fn new(problem: Problem<'a>, index: &'a NnIndex, top_k: usize) -> Result<Self> {
        check_top_k(top_k)?;
        index.check_fingerprint(&problem.fingerprint())?;
        if index.partitions() != problem.team.members().len() {
            return Err(RtcError::InvalidArgument(format!(
                "index has {} partitions, team has {} members",
                index.partitions(),
                problem.team.members().len()
            )));
        }
        let diff = problem.diff()?;
        let w = problem.weights.values();
        let mut members = Vec::with_capacity(index.partitions());
        for (i, r) in problem.team.members().iter().enumerate() {
            let v = virtual_object_from_diff(&diff, r)?;
            let spread: f64 = diff
                .values()
                .iter()
                .zip(r.attrs.values())
                .zip(w)
                .map(|((d, x), wi)| wi * (d.abs() + x.abs()))
                .sum();
            members.push(MemberStream {
                swap_out: r,
                cursor: index.cursor(i)?,
                last_key: 0.0,
                margin: BOUND_REL_SLACK * (1.0 + spread),
                clipped: v.clipped(),
            });
        }
        Ok(RtcStarSearch {
            problem,
            index,
            diff: diff.values().to_vec(),
            members,
            best: TopK::new(top_k),
            stats: SearchStats::default(),
            looked_up: false,
            refined: false,
        })
    }

    fn score_block(&mut self, member: usize, block: &[IndexEntry]) -> Result<()> {
        let w = self.problem.weights.values();
        let r = self.members[member].swap_out;
        for e in block {
            let p = self
                .problem
                .space
                .get(e.id)
                .ok_or(RtcError::UnknownObject(e.id))?;
            let d = model::exchange_distance(&self.diff, r, p, w);
            if self.best.admits(d, r.id, p.id) {
                self.best.push(SwapRecommendation {
                    swap_out_id: r.id,
                    swap_in_id: p.id,
                    new_distance: d,
                    odis: e.key,
                });
            }
        }
        if let Some(last) = block.last() {
            self.members[member].last_key = last.key;
        }
        Ok(())
    }

    /// Reads the first block of every member's run and scores it.
    pub fn lookup(&mut self) -> Result<()> {
        if self.looked_up {
            return Ok(());
        }
        self.index.record_query();
        for i in 0..self.members.len() {
            if let Some(block) = self.members[i].cursor.next_block()? {
                self.stats.lookup_blocks += 1;
                self.score_block(i, &block)?;
            }
        }
        self.looked_up = true;
        Ok(())
    }

    fn can_stop(&self, member: usize) -> bool {
        let m = &self.members[member];
        if m.cursor.is_exhausted() {
            return true;
        }
        if !self.best.is_full() {
            return false;
        }
        let worst = match self.best.worst() {
            Some(w) => w,
            None => return false,
        };
        if worst.new_distance == 0.0 && m.swap_out.id > worst.swap_out_id {
            return true;
        }
        if m.clipped {
            return false;
        }
        let bound = m.swap_out.lambda * m.last_key;
        bound > worst.new_distance * (1.0 + BOUND_REL_SLACK) + m.margin
    }

    /// Lower bound on any exact distance still unread for `member`.
    fn pending_bound(&self, member: usize) -> f64 {
        let m = &self.members[member];
        if m.clipped {
            f64::NEG_INFINITY
        } else {
            m.swap_out.lambda * m.last_key
        }
    }

    /// Widens candidate streams until exactness is guaranteed, always
    /// advancing the member with the smallest pending bound so blocks that a
    /// later, tighter threshold would prune are never read.
    pub fn refine(&mut self) -> Result<()> {
        self.lookup()?;
        if self.refined {
            return Ok(());
        }
        self.refined = true;
        self.stats.exhaustive_members += self.members.iter().filter(|m| m.clipped).count() as u64;
        loop {
            let next = (0..self.members.len())
                .filter(|&i| !self.can_stop(i))
                .min_by(|&a, &b| self.pending_bound(a).total_cmp(&self.pending_bound(b)).then(a.cmp(&b)));
            let Some(i) = next else { break };
            if let Some(block) = self.members[i].cursor.next_block()? {
                self.stats.refine_blocks += 1;
                self.score_block(i, &block)?;
            }
        }
        Ok(())
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    /// Completes any outstanding phase and returns the ranked list.
    pub fn finish(mut self) -> Result<(Vec<SwapRecommendation>, SearchStats)> {
        self.refine()?;
        Ok((self.best.into_sorted(), self.stats))
    }
}

/// Index-backed ranking; returns exactly what [`brute_force_rank`] returns.
pub fn rtc_star_rank(
    problem: &Problem<'_>,
    index: &NnIndex,
    top_k: usize,
) -> Result<Vec<SwapRecommendation>> {
    let search = RtcStarSearch::new(*problem, index, top_k)?;
    Ok(search.finish()?.0)
}

/// Diagnostic comparing the exact exchange distance with the scaled oDis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub dis_prime: f64,
    pub odis: f64,
    pub lambda_r: f64,
    /// Some strong dimension became weak after the exchange.
    pub strong_flip: bool,
    /// The virtual object needed clipping on a weak dimension.
    pub clipped: bool,
}

impl CorollaryReport {
    /// Whether `dis_prime = lambda_r * odis` is expected to hold.
    pub fn identity_applies(&self) -> bool {
        !self.strong_flip && !self.clipped
    }

    pub fn identity_gap(&self) -> f64 {
        (self.dis_prime - self.lambda_r * self.odis).abs()
    }
}

pub fn verify_corollary(
    team: &TeamContext,
    target: &TargetContext,
    swap_out: &ObjectRecord,
    cand: &ObjectRecord,
    w: &WeightVector,
) -> Result<CorollaryReport> {
    let dis_prime = model::post_exchange_distance(team, target, swap_out, cand, w)?;
    let before = model::diff(target, team)?;
    let after = model::post_exchange_diff(&before, swap_out, cand)?;
    let strong_flip = before
        .values()
        .iter()
        .zip(after.values())
        .any(|(&b, &a)| b < 0.0 && a > 0.0);
    let v = virtual_object_from_diff(&before, swap_out)?;
    let od = odis(&v, &NormalizedCandidate::new(cand)?, w)?;
    Ok(CorollaryReport {
        dis_prime,
        odis: od,
        lambda_r: swap_out.lambda,
        strong_flip,
        clipped: v.clipped(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: u64, lambda: f64, attrs: &[f64]) -> ObjectRecord {
        ObjectRecord::new(id, format!("o{id}"), lambda, attrs.to_vec()).unwrap()
    }

    /// T=(10,10), C = R1(3,1; 2) + R2(9,5; 1), candidates P1(4,6; 1), P2(1,1; 1).
    fn instance() -> (ObjectSpace, TeamContext, TargetContext, WeightVector) {
        let team = TeamContext::new(vec![rec(1, 2.0, &[3.0, 1.0]), rec(2, 1.0, &[9.0, 5.0])]).unwrap();
        let space = ObjectSpace::new(
            vec!["x".into(), "y".into()],
            vec![rec(3, 1.0, &[4.0, 6.0]), rec(4, 1.0, &[1.0, 1.0])],
        )
        .unwrap();
        let target = TargetContext::new("T", vec![10.0, 10.0]).unwrap();
        (space, team, target, WeightVector::uniform(2))
    }

    #[test]
    fn virtual_object_example() {
        let (_, team, target, _) = instance();
        let v = virtual_object(&team, &target, &team.members()[0]).unwrap();
        assert_eq!(v.tv2().bits(), &[0, 1]);
        assert_eq!(v.values(), &[0.0, 2.5]);
        assert!(!v.clipped());
    }

    #[test]
    fn virtual_object_of_dominant_team_is_zero() {
        let team = TeamContext::new(vec![rec(1, 3.0, &[20.0, 30.0])]).unwrap();
        let target = TargetContext::new("T", vec![10.0, 10.0]).unwrap();
        let v = virtual_object(&team, &target, &team.members()[0]).unwrap();
        assert_eq!(v.values(), &[0.0, 0.0]);
        assert_eq!(v.tv2().bits(), &[0, 0]);
    }

    #[test]
    fn virtual_object_clips_negative_weak_values() {
        let team = TeamContext::new(vec![rec(1, 1.0, &[-5.0, 1.0])]).unwrap();
        let target = TargetContext::new("T", vec![-4.0, 0.0]).unwrap();
        // diff = (1, -1): dim 0 weak with (1 + -5)/1 < 0
        let v = virtual_object(&team, &target, &team.members()[0]).unwrap();
        assert_eq!(v.values(), &[0.0, 0.0]);
        assert!(v.clipped());
    }

    #[test]
    fn virtual_object_errors() {
        let (_, team, target, _) = instance();
        let outsider = rec(9, 1.0, &[1.0, 1.0]);
        assert!(matches!(
            virtual_object(&team, &target, &outsider),
            Err(RtcError::NotAMember(ObjectId(9)))
        ));
    }

    #[test]
    fn odis_examples() {
        let w = WeightVector::uniform(2);
        let v = VirtualObject::from_parts(ObjectId(1), 2.0, vec![0.0, 2.5], TruncatingVector::new(vec![0, 1]).unwrap()).unwrap();
        let p1 = NormalizedCandidate::new(&rec(3, 1.0, &[4.0, 6.0])).unwrap();
        assert_eq!(odis(&v, &p1, &w).unwrap(), 0.0);
        let same = NormalizedCandidate::from_rates(ObjectId(5), vec![0.0, 2.5]).unwrap();
        assert_eq!(odis(&v, &same, &w).unwrap(), 0.0);
        let p2 = NormalizedCandidate::new(&rec(4, 1.0, &[1.0, 1.0])).unwrap();
        assert_eq!(odis(&v, &p2, &w).unwrap(), 1.5);
        let bad = NormalizedCandidate::from_rates(ObjectId(5), vec![1.0]).unwrap();
        assert!(matches!(odis(&v, &bad, &w), Err(RtcError::DimensionMismatch { .. })));
    }

    #[test]
    fn odis_record_matches_normalized_path() {
        let v = VirtualObject::from_parts(ObjectId(1), 2.0, vec![0.7, 2.5], TruncatingVector::ones(2)).unwrap();
        let w = WeightVector::new(vec![0.3, 0.9]).unwrap();
        for p in [rec(3, 3.0, &[1.0, 6.0]), rec(4, 0.37, &[0.1, 0.2])] {
            let a = odis(&v, &NormalizedCandidate::new(&p).unwrap(), &w).unwrap();
            let b = odis_record(&v, &p, w.values());
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn brute_force_example() {
        let (space, team, target, w) = instance();
        let p = Problem::new(&space, &team, &target, &w).unwrap();
        let all = brute_force_rank(&p, 4).unwrap();
        // exhaustive oracle over the 4 pairs
        let mut expected = Vec::new();
        for r in team.members() {
            for c in space.records() {
                let d = model::post_exchange_distance(&team, &target, r, c, &w).unwrap();
                expected.push((d, r.id, c.id));
            }
        }
        expected.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let got: Vec<_> = all.iter().map(|r| (r.new_distance, r.swap_out_id, r.swap_in_id)).collect();
        assert_eq!(got, expected);
        assert_eq!((all[0].swap_out_id, all[0].swap_in_id), (ObjectId(1), ObjectId(3)));
        assert_eq!(all[0].new_distance, 0.0);
        assert_eq!(all[0].odis, 0.0);

        assert!(matches!(brute_force_rank(&p, 0), Err(RtcError::InvalidArgument(_))));
    }

    #[test]
    fn brute_force_with_space_of_team_members_keeps_distance() {
        let (_, team, target, w) = instance();
        let space = ObjectSpace::new(vec!["x".into(), "y".into()], team.members().to_vec()).unwrap();
        let p = Problem::new(&space, &team, &target, &w).unwrap();
        let before = p.initial_distance().unwrap();
        let all = brute_force_rank(&p, 10).unwrap();
        let identity: Vec<_> = all.iter().filter(|r| r.swap_in_id == r.swap_out_id).collect();
        assert_eq!(identity.len(), 2);
        assert!(identity.iter().all(|r| r.new_distance == before));
        assert!(all[0].new_distance <= before);
    }

    #[test]
    fn brute_force_counts_block_reads() {
        let (space, team, target, w) = instance();
        let p = Problem::new(&space, &team, &target, &w).unwrap();
        let io = IoCounters::default();
        brute_force_rank_scanned(&p, 1, 1, &io).unwrap();
        assert_eq!(io.snapshot().blocks_read, 2 * 2);
    }

    #[test]
    fn rtc_star_matches_example() {
        let (space, team, target, w) = instance();
        let p = Problem::new(&space, &team, &target, &w).unwrap();
        let index = NnIndex::build(&p, 1).unwrap();
        for k in 1..=5 {
            assert_eq!(rtc_star_rank(&p, &index, k).unwrap(), brute_force_rank(&p, k).unwrap());
        }
        let top = rtc_star_rank(&p, &index, 1).unwrap();
        assert_eq!((top[0].swap_out_id, top[0].swap_in_id, top[0].new_distance), (ObjectId(1), ObjectId(3), 0.0));
    }

    #[test]
    fn rtc_star_singleton_space() {
        let (_, team, target, w) = instance();
        let space = ObjectSpace::new(vec!["x".into(), "y".into()], vec![rec(7, 1.0, &[1.0, 1.0])]).unwrap();
        let p = Problem::new(&space, &team, &target, &w).unwrap();
        let index = NnIndex::build(&p, 4).unwrap();
        let top = rtc_star_rank(&p, &index, 1).unwrap();
        assert_eq!(top, brute_force_rank(&p, 1).unwrap());
        assert_eq!(top[0].swap_in_id, ObjectId(7));
    }

    #[test]
    fn rtc_star_rejects_stale_index() {
        let (space, team, target, w) = instance();
        let p = Problem::new(&space, &team, &target, &w).unwrap();
        let index = NnIndex::build(&p, 2).unwrap();
        let w2 = WeightVector::new(vec![1.0, 2.0]).unwrap();
        let p2 = Problem::new(&space, &team, &target, &w2).unwrap();
        assert!(matches!(rtc_star_rank(&p2, &index, 1), Err(RtcError::StaleIndex { .. })));
    }

    #[test]
    fn corollary_examples() {
        let (space, team, target, w) = instance();
        let r1 = &team.members()[0];
        let p1 = space.get(ObjectId(3)).unwrap();
        let rep = verify_corollary(&team, &target, r1, p1, &w).unwrap();
        assert_eq!((rep.dis_prime, rep.odis, rep.lambda_r, rep.strong_flip), (0.0, 0.0, 2.0, false));
        assert!(rep.identity_applies());

        let id = verify_corollary(&team, &target, r1, r1, &w).unwrap();
        let before = Problem::new(&space, &team, &target, &w).unwrap().initial_distance().unwrap();
        assert_eq!(id.dis_prime, before);
        assert!(!id.strong_flip);
        let v = virtual_object(&team, &target, r1).unwrap();
        let own = odis(&v, &NormalizedCandidate::new(r1).unwrap(), &w).unwrap();
        assert_eq!(id.odis, own);
        assert!(id.identity_gap() <= 1e-9 * id.dis_prime.max(1.0));
    }

    #[test]
    fn corollary_detects_strong_flip() {
        // R2 carries (9,5); team surplus on x is only 2, so a weak
        // candidate drains x below target.
        let (_, team, target, w) = instance();
        let r2 = &team.members()[1];
        let weak = rec(4, 1.0, &[1.0, 1.0]);
        let rep = verify_corollary(&team, &target, r2, &weak, &w).unwrap();
        assert!(rep.strong_flip);
        // diff' = (6, 8) gives 10; oDis only sees y: v_y = 9, rate 1
        assert_eq!(rep.dis_prime, 10.0);
        assert_eq!(rep.odis, 8.0);
        assert!(rep.dis_prime >= rep.lambda_r * rep.odis);
    }
}
