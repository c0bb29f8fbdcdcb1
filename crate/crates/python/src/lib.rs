//! Python bindings for `rtc-core`.
use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rtc_core::bench::{self, BenchConfig, ReportFormat};
use rtc_core::dataio::{self, NbParams, SyntheticSpec};
use rtc_core::index::IoCounters;
use rtc_core::ranking;
use rtc_core::{
    NnIndex, ObjectId, ObjectRecord, Problem, RankedSeries, RtcStarSearch, TargetContext,
    TeamContext, WeightVector,
};

create_exception!(rtc, RtcError, PyValueError);

fn err(e: rtc_core::RtcError) -> PyErr {
    RtcError::new_err(e.to_string())
}

/// Immutable set of objects with named attributes.
#[pyclass(frozen, module = "rtc")]
struct ObjectSpace {
    inner: rtc_core::ObjectSpace,
}

#[pymethods]
impl ObjectSpace {
    /// `records` is a list of `(id, label, lambda, attrs)` tuples.
    #[new]
    fn new(attribute_names: Vec<String>, records: Vec<(u64, String, f64, Vec<f64>)>) -> PyResult<Self> {
        let recs = records
            .into_iter()
            .map(|(id, label, lambda, attrs)| ObjectRecord::new(id, label, lambda, attrs))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let inner = rtc_core::ObjectSpace::new(attribute_names, recs).map_err(err)?;
        Ok(ObjectSpace { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn attribute_names(&self) -> Vec<String> {
        self.inner.attribute_names().to_vec()
    }

    /// `(id, label, lambda, attrs)` or None.
    fn get(&self, id: u64) -> Option<(u64, String, f64, Vec<f64>)> {
        self.inner
            .get(ObjectId(id))
            .map(|r| (r.id.0, r.label.clone(), r.lambda, r.attrs.values().to_vec()))
    }

    fn ids(&self) -> Vec<u64> {
        self.inner.records().iter().map(|r| r.id.0).collect()
    }

    fn digest(&self) -> String {
        self.inner.digest().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn __repr__(&self) -> String {
        format!("ObjectSpace(len={}, dimension={})", self.inner.len(), self.inner.dimension())
    }
}

#[pyclass(frozen, get_all, module = "rtc")]
struct SwapRecommendation {
    swap_out_id: u64,
    swap_in_id: u64,
    new_distance: f64,
    odis: f64,
}

#[pymethods]
impl SwapRecommendation {
    fn __repr__(&self) -> String {
        format!(
            "SwapRecommendation(swap_out_id={}, swap_in_id={}, new_distance={}, odis={})",
            self.swap_out_id, self.swap_in_id, self.new_distance, self.odis
        )
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.swap_out_id == other.swap_out_id
            && self.swap_in_id == other.swap_in_id
            && self.new_distance.to_bits() == other.new_distance.to_bits()
            && self.odis.to_bits() == other.odis.to_bits()
    }
}

impl From<ranking::SwapRecommendation> for SwapRecommendation {
    fn from(r: ranking::SwapRecommendation) -> Self {
        SwapRecommendation {
            swap_out_id: r.swap_out_id.0,
            swap_in_id: r.swap_in_id.0,
            new_distance: r.new_distance,
            odis: r.odis,
        }
    }
}

/// A team (members drawn from a space), a target aggregate and weights.
#[pyclass(frozen, module = "rtc")]
struct Query {
    space: Py<ObjectSpace>,
    team: TeamContext,
    target: TargetContext,
    weights: WeightVector,
}

impl Query {
    fn with_problem<T>(
        &self,
        py: Python<'_>,
        f: impl FnOnce(&Problem<'_>) -> rtc_core::Result<T>,
    ) -> PyResult<T> {
        let space = self.space.bind(py).get();
        let problem = Problem::new(&space.inner, &self.team, &self.target, &self.weights).map_err(err)?;
        f(&problem).map_err(err)
    }
}

#[pymethods]
impl Query {
    #[new]
    #[pyo3(signature = (space, member_ids, target, weights=None))]
    fn new(
        space: Py<ObjectSpace>,
        member_ids: Vec<u64>,
        target: Vec<f64>,
        weights: Option<Vec<f64>>,
        py: Python<'_>,
    ) -> PyResult<Self> {
        let s = &space.bind(py).get().inner;
        let ids: Vec<ObjectId> = member_ids.into_iter().map(ObjectId).collect();
        let team = TeamContext::from_space(s, &ids).map_err(err)?;
        let target = TargetContext::new("target", target).map_err(err)?;
        let weights = match weights {
            Some(w) => WeightVector::new(w).map_err(err)?,
            None => WeightVector::uniform(s.dimension()),
        };
        Ok(Query {
            space,
            team,
            target,
            weights,
        })
    }

    fn team_aggregate(&self) -> Vec<f64> {
        self.team.aggregate().values().to_vec()
    }

    fn initial_distance(&self, py: Python<'_>) -> PyResult<f64> {
        self.with_problem(py, |p| p.initial_distance())
    }

    fn fingerprint(&self, py: Python<'_>) -> PyResult<String> {
        self.with_problem(py, |p| Ok(p.fingerprint().to_string()))
    }

    /// Exhaustive ranking. Returns `(recommendations, blocks_read)`.
    #[pyo3(signature = (top_k, block_size=100))]
    fn brute_force(&self, py: Python<'_>, top_k: usize, block_size: usize) -> PyResult<(Vec<SwapRecommendation>, u64)> {
        self.with_problem(py, |p| {
            let counters = IoCounters::default();
            let recs = ranking::brute_force_rank_scanned(p, top_k, block_size, &counters)?;
            Ok((recs.into_iter().map(Into::into).collect(), counters.snapshot().blocks_read))
        })
    }

    /// Index-backed ranking. Returns `(recommendations, stats)` where stats
    /// holds `lookup_blocks`, `refine_blocks` and `blocks_written`.
    #[pyo3(signature = (top_k, block_size=100))]
    fn rtc_star(
        &self,
        py: Python<'_>,
        top_k: usize,
        block_size: usize,
    ) -> PyResult<(Vec<SwapRecommendation>, BTreeMap<String, u64>)> {
        self.with_problem(py, |p| {
            let index = NnIndex::build(p, block_size)?;
            let (recs, stats) = RtcStarSearch::new(*p, &index, top_k)?.finish()?;
            let info = BTreeMap::from([
                ("lookup_blocks".to_string(), stats.lookup_blocks),
                ("refine_blocks".to_string(), stats.refine_blocks),
                ("blocks_written".to_string(), index.build_io().blocks_written),
            ]);
            Ok((recs.into_iter().map(Into::into).collect(), info))
        })
    }

    /// Virtual object of `swap_out_id` as `(values, clipped)`.
    fn virtual_object(&self, swap_out_id: u64) -> PyResult<(Vec<f64>, bool)> {
        let r = self
            .team
            .member(ObjectId(swap_out_id))
            .ok_or(rtc_core::RtcError::NotAMember(ObjectId(swap_out_id)))
            .map_err(err)?;
        let v = ranking::virtual_object(&self.team, &self.target, r).map_err(err)?;
        Ok((v.values().to_vec(), v.clipped()))
    }
}

#[pyfunction]
fn kendall_tau(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    let x = RankedSeries::new(x).map_err(err)?;
    let y = RankedSeries::new(y).map_err(err)?;
    rtc_core::kendall_tau(&x, &y).map_err(err)
}

/// Per-attribute weights from team stats (one row per team) and final standings.
#[pyfunction]
fn compute_weights(team_stats: Vec<Vec<f64>>, final_ranking: Vec<f64>) -> PyResult<Vec<f64>> {
    let ranking = RankedSeries::new(final_ranking).map_err(err)?;
    let rep = rtc_core::compute_weights(&team_stats, &ranking).map_err(err)?;
    Ok(rep.weights.values().to_vec())
}

/// Closest elite team: `(target_id, distance)`.
#[pyfunction]
#[pyo3(signature = (space, member_ids, elite, weights=None))]
fn select_target(
    space: &ObjectSpace,
    member_ids: Vec<u64>,
    elite: BTreeMap<String, Vec<f64>>,
    weights: Option<Vec<f64>>,
) -> PyResult<(String, f64)> {
    let ids: Vec<ObjectId> = member_ids.into_iter().map(ObjectId).collect();
    let team = TeamContext::from_space(&space.inner, &ids).map_err(err)?;
    let elite = elite
        .into_iter()
        .map(|(id, agg)| TargetContext::new(id, agg))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let w = match weights {
        Some(w) => WeightVector::new(w).map_err(err)?,
        None => WeightVector::uniform(space.inner.dimension()),
    };
    let sel = rtc_core::select_target("query", &team, &elite, &w).map_err(err)?;
    Ok((sel.target_id, sel.distance))
}

/// Synthetic space with the standard 11 negative-binomial attributes.
#[pyfunction]
#[pyo3(signature = (count, seed=0, lambda_min=500.0, lambda_max=3000.0))]
fn gen_synthetic(count: usize, seed: u64, lambda_min: f64, lambda_max: f64) -> PyResult<ObjectSpace> {
    let mut spec = SyntheticSpec::standard(count, seed);
    spec.lambda_range = (lambda_min, lambda_max);
    let inner = dataio::gen_synthetic(&spec).map_err(err)?;
    Ok(ObjectSpace { inner })
}

/// Returns a dict with `statistic`, `dof`, `critical`, `p_value`, `accepted`.
#[pyfunction]
#[pyo3(signature = (samples, r, p, alpha=0.05))]
fn chi_square_gof(py: Python<'_>, samples: Vec<f64>, r: f64, p: f64, alpha: f64) -> PyResult<Py<PyAny>> {
    let params = NbParams::new(r, p).map_err(err)?;
    let res = dataio::chi_square_gof(&samples, params, alpha).map_err(err)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("statistic", res.statistic)?;
    d.set_item("dof", res.dof)?;
    d.set_item("critical", res.critical)?;
    d.set_item("p_value", res.p_value)?;
    d.set_item("accepted", res.accepted)?;
    Ok(d.into_any().unbind())
}

/// Runs an experiment from a TOML config string; returns the JSON report.
#[pyfunction]
fn run_experiment(config_toml: &str) -> PyResult<String> {
    let config = BenchConfig::parse(config_toml).map_err(err)?;
    let report = bench::run_experiment(&config).map_err(err)?;
    let mut buf = Vec::new();
    bench::write_report(&report, ReportFormat::Json, &mut buf).map_err(err)?;
    Ok(String::from_utf8(buf).expect("json is utf-8"))
}

#[pymodule]
fn rtc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RtcError", m.py().get_type::<RtcError>())?;
    m.add_class::<ObjectSpace>()?;
    m.add_class::<Query>()?;
    m.add_class::<SwapRecommendation>()?;
    m.add_function(wrap_pyfunction!(kendall_tau, m)?)?;
    m.add_function(wrap_pyfunction!(compute_weights, m)?)?;
    m.add_function(wrap_pyfunction!(select_target, m)?)?;
    m.add_function(wrap_pyfunction!(gen_synthetic, m)?)?;
    m.add_function(wrap_pyfunction!(chi_square_gof, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
