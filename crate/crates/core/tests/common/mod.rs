//! Random instances and from-scratch oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use rtc_core::{ObjectRecord, ObjectSpace, TargetContext, TeamContext, WeightVector};

pub struct Instance {
    pub space: ObjectSpace,
    pub team: TeamContext,
    pub target: TargetContext,
    pub weights: WeightVector,
    pub top_k: usize,
    pub block_size: usize,
    pub members_in_space: bool,
}

pub struct InstanceShape {
    pub n: (usize, usize),
    pub d: (usize, usize),
    pub m: (usize, usize),
    pub lambda: (f64, f64),
    /// Fix every member's λ to this value.
    pub member_lambda: Option<f64>,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            n: (20, 500),
            d: (2, 11),
            m: (2, 15),
            lambda: (1.0, 100.0),
            member_lambda: None,
        }
    }
}

fn nb_like<R: Rng>(rng: &mut R, shape: f64, mean: f64) -> f64 {
    let g = Gamma::new(shape, mean / shape).unwrap().sample(rng);
    if g <= 0.0 {
        0.0
    } else {
        Poisson::new(g).unwrap().sample(rng)
    }
}

pub fn random_instance(seed: u64) -> Instance {
    random_instance_with(seed, &InstanceShape::default())
}

pub fn random_instance_with(seed: u64, shape: &InstanceShape) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(shape.n.0..=shape.n.1);
    let d = rng.random_range(shape.d.0..=shape.d.1);
    let m = rng.random_range(shape.m.0..=shape.m.1).min(n);
    let dims: Vec<(f64, f64)> = (0..d)
        .map(|_| (rng.random_range(0.5..3.0), rng.random_range(1.0..200.0)))
        .collect();
    let record = |rng: &mut ChaCha8Rng, id: u64| {
        let lambda = rng.random_range(shape.lambda.0..=shape.lambda.1);
        let attrs = dims.iter().map(|&(s, mu)| nb_like(rng, s, mu)).collect();
        ObjectRecord::new(id, format!("o{id}"), lambda, attrs).unwrap()
    };
    let records: Vec<ObjectRecord> = (0..n as u64).map(|id| record(&mut rng, id)).collect();
    let members_in_space = rng.random_bool(0.8);
    let mut members: Vec<ObjectRecord> = if members_in_space {
        let mut ids: Vec<usize> = (0..n).collect();
        for i in 0..m {
            let j = rng.random_range(i..n);
            ids.swap(i, j);
        }
        ids[..m].iter().map(|&i| records[i].clone()).collect()
    } else {
        (0..m as u64).map(|i| record(&mut rng, n as u64 + 1000 + i)).collect()
    };
    if let Some(l) = shape.member_lambda {
        for r in &mut members {
            r.lambda = l;
        }
    }
    let names = (0..d).map(|i| format!("a{i}")).collect();
    let space = ObjectSpace::new(names, records).unwrap();
    let team = TeamContext::new(members).unwrap();
    let target = team
        .aggregate()
        .values()
        .iter()
        .map(|c| c * rng.random_range(0.5..1.8) + rng.random_range(0.0..5.0))
        .collect();
    let target = TargetContext::new("T", target).unwrap();
    let weights = WeightVector::new((0..d).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap();
    Instance {
        space,
        team,
        target,
        weights,
        top_k: rng.random_range(1..=15),
        block_size: rng.random_range(1..=32),
        members_in_space,
    }
}

/// `sqrt(sum (w_i * max(t_i - c_i, 0))^2)` straight from the aggregates.
pub fn oracle_distance(target: &[f64], team: &[f64], w: &[f64]) -> f64 {
    target
        .iter()
        .zip(team)
        .zip(w)
        .map(|((t, c), wi)| {
            let gap = (t - c).max(0.0);
            (wi * gap) * (wi * gap)
        })
        .sum::<f64>()
        .sqrt()
}

/// Team aggregate after replacing `r` by `p` scaled to `r`'s exchange parameter.
pub fn oracle_exchanged(team: &[f64], r: &ObjectRecord, p: &ObjectRecord) -> Vec<f64> {
    let ratio = r.lambda / p.lambda;
    team.iter()
        .zip(r.attrs.values())
        .zip(p.attrs.values())
        .map(|((c, ri), pi)| c - ri + ratio * pi)
        .collect()
}

/// Every (swap-out, swap-in, distance) triple, sorted.
pub fn oracle_all_pairs(inst: &Instance) -> Vec<(u64, u64, f64)> {
    let c: Vec<f64> = {
        let mut acc = vec![0.0; inst.space.dimension()];
        for r in inst.team.members() {
            for (a, x) in acc.iter_mut().zip(r.attrs.values()) {
                *a += x;
            }
        }
        acc
    };
    let t = inst.target.aggregate.values();
    let w = inst.weights.values();
    let mut all = Vec::new();
    for r in inst.team.members() {
        for p in inst.space.records() {
            let after = oracle_exchanged(&c, r, p);
            all.push((r.id.0, p.id.0, oracle_distance(t, &after, w)));
        }
    }
    all.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    all
}

/// oDis of `p` against `r`'s virtual object, computed from scratch.
pub fn oracle_odis(inst: &Instance, r: &ObjectRecord, p: &ObjectRecord) -> f64 {
    let c = inst.team.aggregate().values();
    let t = inst.target.aggregate.values();
    let w = inst.weights.values();
    let mut sum = 0.0;
    for i in 0..c.len() {
        let diff = t[i] - c[i];
        if diff < 0.0 {
            continue;
        }
        let v = ((diff + r.attrs.values()[i]) / r.lambda).max(0.0);
        let gap = (v - p.attrs.values()[i] / p.lambda).max(0.0);
        sum += (w[i] * gap) * (w[i] * gap);
    }
    sum.sqrt()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Kendall tau by checking every pair.
pub fn oracle_tau(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut c, mut d) = (0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let s = (x[i] - x[j]).signum() * (y[i] - y[j]).signum();
            if x[i] == x[j] || y[i] == y[j] {
                continue;
            }
            if s > 0.0 {
                c += 1;
            } else {
                d += 1;
            }
        }
    }
    let total = (n * (n - 1) / 2) as f64;
    (c - d) as f64 / total
}
