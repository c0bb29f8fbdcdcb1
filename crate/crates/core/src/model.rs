//! Vector-level domain types and the distance / exchange arithmetic.
//!
//! A team is the component-wise sum of its members. The gap to a target
//! team is measured with a truncated weighted Euclidean distance: dimensions
//! where the team already exceeds the target ("strong" dimensions) are
//! masked out, so a team is never pushed to give up an advantage.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Result, RtcError};

/// Identifier of an object in an [`ObjectSpace`].
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct ObjectId(pub u64);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for ObjectId {
    fn from(v: u64) -> Self {
        ObjectId(v)
    }
}

/// A non-empty vector of finite attribute values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AttributeVector(Vec<f64>);

impl AttributeVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(RtcError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(RtcError::NonFinite { index });
        }
        Ok(AttributeVector(values))
    }

    pub fn zeros(dim: usize) -> Self {
        AttributeVector(vec![0.0; dim.max(1)])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for AttributeVector {
    type Error = RtcError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        AttributeVector::new(values)
    }
}

impl From<AttributeVector> for Vec<f64> {
    fn from(v: AttributeVector) -> Self {
        v.0
    }
}

/// One database tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectRecord {
    pub id: ObjectId,
    pub label: String,
    /// Exchange parameter (minutes played in the basketball instantiation).
    pub lambda: f64,
    pub attrs: AttributeVector,
}

impl ObjectRecord {
    pub fn new(
        id: impl Into<ObjectId>,
        label: impl Into<String>,
        lambda: f64,
        attrs: Vec<f64>,
    ) -> Result<Self> {
        let id = id.into();
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(RtcError::InvalidLambda { id, value: lambda });
        }
        Ok(ObjectRecord {
            id,
            label: label.into(),
            lambda,
            attrs: AttributeVector::new(attrs)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.attrs.dim()
    }

    fn check_lambda(&self) -> Result<()> {
        if self.lambda.is_finite() && self.lambda > 0.0 {
            Ok(())
        } else {
            Err(RtcError::InvalidLambda {
                id: self.id,
                value: self.lambda,
            })
        }
    }
}

/// The database of candidate objects.
///
/// Records are kept sorted by id, so two spaces built from the same rows in
/// a different order are identical (including their content digest).
#[derive(Debug, Clone)]
pub struct ObjectSpace {
    attribute_names: Vec<String>,
    records: Vec<ObjectRecord>,
    positions: HashMap<ObjectId, usize>,
    digest: [u8; 32],
}

impl PartialEq for ObjectSpace {
    fn eq(&self, other: &Self) -> bool {
        self.attribute_names == other.attribute_names && self.records == other.records
    }
}

impl ObjectSpace {
    pub fn new(attribute_names: Vec<String>, mut records: Vec<ObjectRecord>) -> Result<Self> {
        let dim = attribute_names.len();
        if dim == 0 {
            return Err(RtcError::InvalidArgument(
                "object space needs at least one attribute".into(),
            ));
        }
        for r in &records {
            if r.dim() != dim {
                return Err(RtcError::DimensionMismatch {
                    expected: dim,
                    found: r.dim(),
                });
            }
            r.check_lambda()?;
        }
        records.sort_by_key(|r| r.id);
        if let Some(w) = records.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(RtcError::DuplicateId(w[0].id));
        }
        let positions = records.iter().enumerate().map(|(i, r)| (r.id, i)).collect();
        let digest = space_digest(&attribute_names, &records);
        Ok(ObjectSpace {
            attribute_names,
            records,
            positions,
            digest,
        })
    }

    pub fn dimension(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    /// Records in ascending id order.
    pub fn records(&self) -> &[ObjectRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: ObjectId) -> Option<&ObjectRecord> {
        self.positions.get(&id).map(|&i| &self.records[i])
    }

    /// SHA-256 over the attribute names and every record; identifies the
    /// space version inside index fingerprints.
    pub fn digest(&self) -> &[u8; 32] {
        &self.digest
    }
}

fn space_digest(names: &[String], records: &[ObjectRecord]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"rtc-space-v1");
    h.update((names.len() as u64).to_le_bytes());
    for n in names {
        h.update((n.len() as u64).to_le_bytes());
        h.update(n.as_bytes());
    }
    h.update((records.len() as u64).to_le_bytes());
    for r in records {
        h.update(r.id.0.to_le_bytes());
        h.update((r.label.len() as u64).to_le_bytes());
        h.update(r.label.as_bytes());
        h.update(r.lambda.to_bits().to_le_bytes());
        for v in r.attrs.values() {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    h.finalize().into()
}

/// A team: its member records and their aggregate vector.
///
/// Members are stored in ascending id order; the aggregate is summed in that
/// order so it is bit-reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamContext {
    members: Vec<ObjectRecord>,
    aggregate: AttributeVector,
}

impl TeamContext {
    pub fn new(mut members: Vec<ObjectRecord>) -> Result<Self> {
        members.sort_by_key(|r| r.id);
        if let Some(w) = members.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(RtcError::DuplicateId(w[0].id));
        }
        let aggregate = aggregate_team(&members)?;
        Ok(TeamContext { members, aggregate })
    }

    /// Resolves `ids` in `space` and builds the team from those records.
    pub fn from_space(space: &ObjectSpace, ids: &[ObjectId]) -> Result<Self> {
        let members = ids
            .iter()
            .map(|&id| space.get(id).cloned().ok_or(RtcError::UnknownObject(id)))
            .collect::<Result<Vec<_>>>()?;
        TeamContext::new(members)
    }

    pub fn members(&self) -> &[ObjectRecord] {
        &self.members
    }

    pub fn member_ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.members.iter().map(|r| r.id)
    }

    pub fn member(&self, id: ObjectId) -> Option<&ObjectRecord> {
        self.members
            .binary_search_by_key(&id, |r| r.id)
            .ok()
            .map(|i| &self.members[i])
    }

    pub fn aggregate(&self) -> &AttributeVector {
        &self.aggregate
    }

    pub fn dim(&self) -> usize {
        self.aggregate.dim()
    }
}

/// The team being approached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetContext {
    pub team_id: String,
    pub aggregate: AttributeVector,
}

impl TargetContext {
    pub fn new(team_id: impl Into<String>, aggregate: Vec<f64>) -> Result<Self> {
        Ok(TargetContext {
            team_id: team_id.into(),
            aggregate: AttributeVector::new(aggregate)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.aggregate.dim()
    }
}

/// Strictly positive per-dimension weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(RtcError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(RtcError::InvalidWeights { index, value });
        }
        Ok(WeightVector(weights))
    }

    pub fn uniform(dim: usize) -> Self {
        WeightVector(vec![1.0; dim.max(1)])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = RtcError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        WeightVector::new(values)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// 0/1 mask: 0 on strong dimensions, 1 on weak ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatingVector(Vec<u8>);

impl TruncatingVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(RtcError::InvalidArgument(
                "truncating vector components must be 0 or 1".into(),
            ));
        }
        Ok(TruncatingVector(bits))
    }

    pub fn ones(dim: usize) -> Self {
        TruncatingVector(vec![1; dim])
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn is_weak(&self, i: usize) -> bool {
        self.0[i] == 1
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Per-dimension gap `t_i - c_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffVector(Vec<f64>);

impl DiffVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(RtcError::NonFinite { index });
        }
        Ok(DiffVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(RtcError::DimensionMismatch { expected, found })
    }
}

/// Component-wise sum of the members' attributes, accumulated in ascending id
/// order regardless of the input order.
pub fn aggregate_team(members: &[ObjectRecord]) -> Result<AttributeVector> {
    let first = members.first().ok_or(RtcError::EmptyTeam)?;
    let dim = first.dim();
    let mut order: Vec<&ObjectRecord> = members.iter().collect();
    order.sort_by_key(|r| r.id);
    let mut sum = vec![0.0; dim];
    for r in order {
        check_dim(dim, r.dim())?;
        for (s, v) in sum.iter_mut().zip(r.attrs.values()) {
            *s += v;
        }
    }
    AttributeVector::new(sum)
}

pub fn diff(target: &TargetContext, team: &TeamContext) -> Result<DiffVector> {
    diff_vectors(&target.aggregate, team.aggregate())
}

pub(crate) fn diff_vectors(target: &AttributeVector, team: &AttributeVector) -> Result<DiffVector> {
    check_dim(target.dim(), team.dim())?;
    DiffVector::new(
        target
            .values()
            .iter()
            .zip(team.values())
            .map(|(t, c)| t - c)
            .collect(),
    )
}

/// `diff_i = 0` counts as weak.
pub fn truncating_vector(diff: &DiffVector) -> TruncatingVector {
    TruncatingVector(diff.values().iter().map(|&d| u8::from(d >= 0.0)).collect())
}

pub fn truncated_distance(diff: &DiffVector, tv: &TruncatingVector, w: &WeightVector) -> Result<f64> {
    check_dim(diff.dim(), tv.dim())?;
    check_dim(diff.dim(), w.dim())?;
    let sum: f64 = diff
        .values()
        .iter()
        .zip(tv.bits())
        .zip(w.values())
        .map(|((&d, &b), &wi)| {
            let term = wi * d * f64::from(b);
            term * term
        })
        .sum();
    Ok(sum.sqrt())
}

/// Distance of a gap vector using its own truncating vector.
pub fn gap_distance(diff: &DiffVector, w: &WeightVector) -> Result<f64> {
    truncated_distance(diff, &truncating_vector(diff), w)
}

/// Gap after replacing `swap_out` (R) by `swap_in` (P), whose contribution is
/// rescaled by `lambda_r / lambda_p`.
pub fn post_exchange_diff(
    diff: &DiffVector,
    swap_out: &ObjectRecord,
    swap_in: &ObjectRecord,
) -> Result<DiffVector> {
    swap_out.check_lambda()?;
    swap_in.check_lambda()?;
    check_dim(diff.dim(), swap_out.dim())?;
    check_dim(diff.dim(), swap_in.dim())?;
    let ratio = swap_out.lambda / swap_in.lambda;
    DiffVector::new(
        diff.values()
            .iter()
            .zip(swap_out.attrs.values())
            .zip(swap_in.attrs.values())
            .map(|((&d, &r), &p)| (d + r) - ratio * p)
            .collect(),
    )
}

/// Truncated distance to the target after the exchange, with the truncating
/// vector recomputed from the post-exchange gap.
pub fn post_exchange_distance(
    team: &TeamContext,
    target: &TargetContext,
    swap_out: &ObjectRecord,
    swap_in: &ObjectRecord,
    w: &WeightVector,
) -> Result<f64> {
    if team.member(swap_out.id).is_none() {
        return Err(RtcError::NotAMember(swap_out.id));
    }
    let before = diff(target, team)?;
    let after = post_exchange_diff(&before, swap_out, swap_in)?;
    gap_distance(&after, w)
}

/// Allocation-free form of [`post_exchange_distance`] for hot loops. Performs
/// the same floating-point operations in the same order, so results are
/// bit-identical. Inputs must already be validated.
#[inline]
pub(crate) fn exchange_distance(
    diff: &[f64],
    swap_out: &ObjectRecord,
    swap_in: &ObjectRecord,
    w: &[f64],
) -> f64 {
    let ratio = swap_out.lambda / swap_in.lambda;
    let mut sum = 0.0;
    for (((&d, &r), &p), &wi) in diff
        .iter()
        .zip(swap_out.attrs.values())
        .zip(swap_in.attrs.values())
        .zip(w)
    {
        let after = (d + r) - ratio * p;
        let term = wi * after * f64::from(u8::from(after >= 0.0));
        sum += term * term;
    }
    sum.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: u64, lambda: f64, attrs: &[f64]) -> ObjectRecord {
        ObjectRecord::new(id, format!("o{id}"), lambda, attrs.to_vec()).unwrap()
    }

    fn dv(v: &[f64]) -> DiffVector {
        DiffVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate_team(&[rec(1, 1.0, &[1.0, 2.0])]).unwrap().values(), &[1.0, 2.0]);
        assert_eq!(
            aggregate_team(&[rec(1, 1.0, &[1.0, 2.0]), rec(2, 1.0, &[3.0, 4.0])])
                .unwrap()
                .values(),
            &[4.0, 6.0]
        );
        let zeros: Vec<_> = (0..3).map(|i| rec(i, 1.0, &[0.0, 0.0])).collect();
        assert_eq!(aggregate_team(&zeros).unwrap().values(), &[0.0, 0.0]);
        assert!(matches!(aggregate_team(&[]), Err(RtcError::EmptyTeam)));
    }

    #[test]
    fn aggregate_is_order_independent_bitwise() {
        let a = rec(3, 1.0, &[0.1, 1e16]);
        let b = rec(1, 1.0, &[0.2, 1.0]);
        let c = rec(2, 1.0, &[0.3, -1e16]);
        let x = aggregate_team(&[a.clone(), b.clone(), c.clone()]).unwrap();
        let y = aggregate_team(&[c, a, b]).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn aggregate_rejects_mixed_dimensions() {
        let err = aggregate_team(&[rec(1, 1.0, &[1.0]), rec(2, 1.0, &[1.0, 2.0])]);
        assert!(matches!(err, Err(RtcError::DimensionMismatch { .. })));
    }

    #[test]
    fn diff_examples_from_truncation_figure() {
        let team = TeamContext::new(vec![rec(1, 1.0, &[1.0, 0.3])]).unwrap();
        let t = TargetContext::new("T", vec![0.5, 1.0]).unwrap();
        let d = diff(&t, &team).unwrap();
        assert!((d.values()[0] + 0.5).abs() < 1e-12);
        assert!((d.values()[1] - 0.7).abs() < 1e-12);

        let team2 = TeamContext::new(vec![rec(1, 1.0, &[0.3, 0.3])]).unwrap();
        let d2 = diff(&t, &team2).unwrap();
        assert!((d2.values()[0] - 0.2).abs() < 1e-12);
        assert!((d2.values()[1] - 0.7).abs() < 1e-12);

        let same = TargetContext::new("C", vec![0.3, 0.3]).unwrap();
        assert_eq!(diff(&same, &team2).unwrap().values(), &[0.0, 0.0]);

        let bad = TargetContext::new("X", vec![1.0]).unwrap();
        assert!(matches!(diff(&bad, &team), Err(RtcError::DimensionMismatch { .. })));
    }

    #[test]
    fn truncating_vector_examples() {
        assert_eq!(truncating_vector(&dv(&[-0.5, 0.7])).bits(), &[0, 1]);
        assert_eq!(truncating_vector(&dv(&[0.2, 0.7])).bits(), &[1, 1]);
        assert_eq!(truncating_vector(&dv(&[-1.0, -2.0, -0.1])).bits(), &[0, 0, 0]);
        assert_eq!(truncating_vector(&dv(&[0.0])).bits(), &[1]);
    }

    #[test]
    fn truncated_distance_examples() {
        let w = WeightVector::uniform(2);
        let d = dv(&[-0.5, 0.7]);
        let got = truncated_distance(&d, &truncating_vector(&d), &w).unwrap();
        assert!((got - 0.7).abs() < 1e-12);

        let d = dv(&[0.2, 0.7]);
        let got = truncated_distance(&d, &truncating_vector(&d), &w).unwrap();
        assert!((got - 0.53f64.sqrt()).abs() < 1e-12);
        assert!((got - 0.72801).abs() < 1e-5);

        let z = dv(&[0.0, 0.0]);
        assert_eq!(truncated_distance(&z, &truncating_vector(&z), &w).unwrap(), 0.0);
    }

    #[test]
    fn truncated_distance_errors() {
        let d = dv(&[1.0, 2.0]);
        let tv = TruncatingVector::ones(3);
        assert!(matches!(
            truncated_distance(&d, &tv, &WeightVector::uniform(2)),
            Err(RtcError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            WeightVector::new(vec![1.0, 0.0]),
            Err(RtcError::InvalidWeights { index: 1, .. })
        ));
        assert!(WeightVector::new(vec![-1.0]).is_err());
    }

    #[test]
    fn post_exchange_diff_examples() {
        let r = rec(1, 2.0, &[3.0, 1.0]);
        let p = rec(2, 1.0, &[4.0, 6.0]);
        let after = post_exchange_diff(&dv(&[-2.0, 4.0]), &r, &p).unwrap();
        assert_eq!(after.values(), &[-7.0, -7.0]);

        let same = post_exchange_diff(&dv(&[-2.0, 4.0]), &r, &r).unwrap();
        assert_eq!(same.values(), &[-2.0, 4.0]);

        let one = rec(3, 1.0, &[1.0, 1.0]);
        let zero = post_exchange_diff(&dv(&[0.0, 0.0]), &one, &one).unwrap();
        assert_eq!(zero.values(), &[0.0, 0.0]);
    }

    #[test]
    fn invalid_lambda_is_rejected() {
        assert!(matches!(
            ObjectRecord::new(1u64, "x", 0.0, vec![1.0]),
            Err(RtcError::InvalidLambda { .. })
        ));
        let mut r = rec(1, 1.0, &[1.0]);
        r.lambda = -3.0;
        let p = rec(2, 1.0, &[1.0]);
        assert!(matches!(
            post_exchange_diff(&dv(&[0.0]), &r, &p),
            Err(RtcError::InvalidLambda { .. })
        ));
    }

    fn two_dim_instance() -> (TeamContext, TargetContext) {
        let team = TeamContext::new(vec![rec(1, 2.0, &[3.0, 1.0]), rec(2, 1.0, &[9.0, 5.0])]).unwrap();
        let target = TargetContext::new("T", vec![10.0, 10.0]).unwrap();
        (team, target)
    }

    #[test]
    fn post_exchange_distance_examples() {
        let (team, target) = two_dim_instance();
        assert_eq!(team.aggregate().values(), &[12.0, 6.0]);
        let w = WeightVector::uniform(2);
        let r1 = team.members()[0].clone();
        let p1 = rec(3, 1.0, &[4.0, 6.0]);
        assert_eq!(post_exchange_distance(&team, &target, &r1, &p1, &w).unwrap(), 0.0);

        let before = gap_distance(&diff(&target, &team).unwrap(), &w).unwrap();
        let identity = post_exchange_distance(&team, &target, &r1, &r1, &w).unwrap();
        assert_eq!(identity, before);

        assert!(matches!(
            post_exchange_distance(&team, &target, &p1, &r1, &w),
            Err(RtcError::NotAMember(ObjectId(3)))
        ));
    }

    #[test]
    fn kernel_matches_composed_operation() {
        let (team, target) = two_dim_instance();
        let w = WeightVector::new(vec![0.3, 1.7]).unwrap();
        let d = diff(&target, &team).unwrap();
        for r in team.members() {
            for p in [rec(3, 1.0, &[4.0, 6.0]), rec(4, 3.3, &[1.0, 1.0]), rec(5, 0.7, &[0.1, 9.0])] {
                let slow = post_exchange_distance(&team, &target, r, &p, &w).unwrap();
                let fast = exchange_distance(d.values(), r, &p, w.values());
                assert_eq!(slow.to_bits(), fast.to_bits());
            }
        }
    }

    #[test]
    fn object_space_sorts_and_rejects_duplicates() {
        let names = vec!["a".to_string()];
        let s1 = ObjectSpace::new(names.clone(), vec![rec(2, 1.0, &[1.0]), rec(1, 1.0, &[2.0])]).unwrap();
        let s2 = ObjectSpace::new(names.clone(), vec![rec(1, 1.0, &[2.0]), rec(2, 1.0, &[1.0])]).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.digest(), s2.digest());
        assert_eq!(s1.records()[0].id, ObjectId(1));
        assert!(matches!(
            ObjectSpace::new(names, vec![rec(1, 1.0, &[1.0]), rec(1, 1.0, &[2.0])]),
            Err(RtcError::DuplicateId(ObjectId(1)))
        ));
    }

    #[test]
    fn team_from_space_requires_known_ids() {
        let space = ObjectSpace::new(vec!["a".into()], vec![rec(1, 1.0, &[1.0])]).unwrap();
        assert!(TeamContext::from_space(&space, &[ObjectId(1)]).is_ok());
        assert!(matches!(
            TeamContext::from_space(&space, &[ObjectId(9)]),
            Err(RtcError::UnknownObject(ObjectId(9)))
        ));
        assert!(matches!(TeamContext::from_space(&space, &[]), Err(RtcError::EmptyTeam)));
    }
}
