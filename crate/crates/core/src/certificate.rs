//! Full pipeline per `(n, characteristic)` and the certificate it produces.
//!
//! A certificate file is a JSON document with three top-level keys in a
//! fixed order: `schema`, `header` (tool version, wall-clock timestamp and
//! timings) and `certificate`. Everything after the header is a pure
//! function of the configuration and the tool version.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{build_algebra, build_algebra_with, AlgebraError, AlgebraTable, SanityReport, SocleSignConvention};
use crate::cochain::{commutator_quotient_dim, connes_images, cyclic_dims, CochainComplex, CochainError, ZModuleReport};
use crate::exactla::{FieldError, FieldSpec, PivotOrder};
use crate::nakayama::{associated_form, certify_dualizable, ArrowWitness, DualizabilityReport, NakayamaError};
use crate::oracle::{self, OracleComparison, OracleError};
use crate::presentation::{self, RelationStatus, RingAxioms, StableReport, VerificationReport};
use crate::resolution::{ExactnessReport, Resolution};
use crate::yoneda::{c_matrix_report, CMatrixReport, YonedaEngine, YonedaError};

pub const SCHEMA: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Nakayama(#[from] NakayamaError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Yoneda(#[from] YonedaError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("n must be at least 1")]
    EmptyGrid,
    #[error("maxdeg must be at least 7 to see a full period")]
    ShortWindow,
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Markdown => "md",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub ns: Vec<usize>,
    pub characteristics: Vec<u64>,
    /// Resolution depth; cohomology is reported in degrees `0..maxdeg`.
    pub maxdeg: usize,
    pub oracle_budget: u64,
    /// Total degree bound for associativity triples.
    pub triple_degree: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            ns: vec![1, 2, 3, 4],
            characteristics: vec![0],
            maxdeg: 13,
            oracle_budget: oracle::DEFAULT_BUDGET,
            triple_degree: 6,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.ns.is_empty() || self.ns.contains(&0) {
            return Err(PipelineError::EmptyGrid);
        }
        if self.maxdeg < 7 {
            return Err(PipelineError::ShortWindow);
        }
        for &p in &self.characteristics {
            FieldSpec::new(p)?;
        }
        Ok(())
    }

    /// Grid points in a fixed order.
    pub fn points(&self) -> Vec<(usize, u64)> {
        let mut ns = self.ns.clone();
        ns.sort_unstable();
        ns.dedup();
        let mut ps = self.characteristics.clone();
        ps.sort_unstable();
        ps.dedup();
        ns.iter().flat_map(|&n| ps.iter().map(move |&p| (n, p))).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraSummary {
    pub dim: usize,
    pub cartan: Vec<Vec<i64>>,
    pub cartan_determinant: String,
    pub center_dim: usize,
    pub sanity: SanityReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualizabilitySummary {
    pub canonical: DualizabilityReport,
    pub unsigned_variant_passes: bool,
    pub unsigned_variant_witnesses: Vec<ArrowWitness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionSummary {
    pub exactness: ExactnessReport,
    pub failures: Vec<String>,
    /// `(degree, explicit formula equals dualized map)`.
    pub explicit_differentials: Vec<(usize, bool)>,
    pub complex_squares_to_zero: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionTables {
    pub cohomology: Vec<usize>,
    pub homology: Vec<usize>,
    pub commutator_quotient: usize,
    pub cyclic: Option<Vec<usize>>,
    pub connes_images: Vec<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub degree: usize,
    /// Nonzero canonical coordinates as `(label, exact value)`.
    pub value: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSummary {
    pub upto: Option<usize>,
    pub comparison: Option<OracleComparison>,
    pub negative_control_degree: Option<usize>,
    pub negative_control_detected: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub characteristic: u64,
    pub maxdeg: usize,
    pub algebra: AlgebraSummary,
    pub dualizability: DualizabilitySummary,
    pub resolution: ResolutionSummary,
    pub dimensions: DimensionTables,
    pub zmodule: ZModuleReport,
    pub c_matrix: CMatrixReport,
    pub products: Vec<ProductEntry>,
    pub product_lemmas: Vec<RelationStatus>,
    pub ring_axioms: RingAxioms,
    pub presentation: VerificationReport,
    pub stable: StableReport,
    pub oracle: OracleSummary,
    pub verdicts: BTreeMap<String, bool>,
    pub pass: bool,
}

impl Certificate {
    pub fn failures(&self) -> Vec<String> {
        self.verdicts
            .iter()
            .filter(|(_, ok)| !**ok)
            .map(|(k, _)| format!("n={} char={}: {k}", self.n, self.characteristic))
            .collect()
    }
}

/// Stage timings in milliseconds, kept out of the certificate body.
pub type Timings = Vec<(String, u128)>;

struct Clock {
    start: Instant,
    last: Instant,
    out: Timings,
}

impl Clock {
    fn new() -> Self {
        let now = Instant::now();
        Self {
            start: now,
            last: now,
            out: Vec::new(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.out.push((stage.into(), (now - self.last).as_millis()));
        self.last = now;
    }

    fn finish(mut self) -> Timings {
        self.out.push(("total".into(), self.start.elapsed().as_millis()));
        self.out
    }
}

fn unsigned_variant(n: usize, field: FieldSpec) -> Result<(bool, Vec<ArrowWitness>), PipelineError> {
    let t = build_algebra_with(n, field, SocleSignConvention::Unsigned)?;
    match associated_form(&t) {
        Ok(f) => {
            let r = certify_dualizable(&t, &f);
            Ok((r.pass(), r.arrow_witnesses))
        }
        Err(_) => Ok((false, Vec::new())),
    }
}

/// Whether the unsigned variant fails exactly through `a_i* a_i = (-1)^i ω_{i+1}`.
pub fn variant_witnesses_match(t: &AlgebraTable, passes: bool, witnesses: &[ArrowWitness]) -> bool {
    let n = t.n();
    if n == 1 {
        // Both conventions agree when there is a single vertex.
        return passes;
    }
    if passes {
        return false;
    }
    let mut seen_a1 = false;
    for w in witnesses {
        if (1..n).contains(&w.arrow) {
            let i = w.arrow;
            let sign = if i % 2 == 0 { 1 } else { -1 };
            if w.sign != sign || w.vertex != i + 1 {
                return false;
            }
            seen_a1 |= i == 1;
        }
    }
    seen_a1
}

fn oracle_upto(t: &AlgebraTable, maxdeg: usize, budget: u64) -> Option<usize> {
    (0..maxdeg)
        .take_while(|&k| oracle::check_budget(t, k, budget).is_ok())
        .last()
}

fn product_table(engine: &YonedaEngine, maxdeg: usize) -> Result<Vec<ProductEntry>, YonedaError> {
    let n = engine.algebra().n();
    let gens = presentation::all_generators(n);
    let mut out = Vec::new();
    for a in &gens {
        for b in &gens {
            let degree = a.degree() + b.degree();
            if degree >= maxdeg {
                continue;
            }
            let c = engine.monomial(&[*a, *b])?;
            let labels = engine.complex.canonical(degree).labels;
            let value = c
                .coords
                .iter()
                .zip(labels)
                .filter(|(v, _)| !v.is_zero())
                .map(|(v, l)| (l, v.to_exact_string()))
                .collect();
            out.push(ProductEntry {
                left: a.name(),
                right: b.name(),
                degree,
                value,
            });
        }
    }
    Ok(out)
}

/// Runs every stage for one grid point.
pub fn certify(n: usize, characteristic: u64, cfg: &RunConfig) -> Result<(Certificate, Timings), PipelineError> {
    let field = FieldSpec::new(characteristic)?;
    let mut clock = Clock::new();
    let maxdeg = cfg.maxdeg;
    let top = maxdeg - 1;

    let t = Arc::new(build_algebra(n, field)?);
    let sanity = t.sanity_report();
    let algebra = AlgebraSummary {
        dim: t.dim(),
        cartan: t.cartan_matrix(),
        cartan_determinant: t.cartan_determinant().to_exact_string(),
        center_dim: t.center_basis()?.len(),
        sanity,
    };
    clock.lap("algebra");

    let form = associated_form(&t)?;
    let (variant_passes, variant_witnesses) = unsigned_variant(n, field)?;
    let dualizability = DualizabilitySummary {
        canonical: certify_dualizable(&t, &form),
        unsigned_variant_passes: variant_passes,
        unsigned_variant_witnesses: variant_witnesses,
    };
    clock.lap("dualizability");

    let res = Arc::new(Resolution::new(t.clone(), &form));
    let exactness = res.certify_exact(maxdeg);
    clock.lap("resolution");

    let complex = Arc::new(CochainComplex::new(res)?);
    let resolution = ResolutionSummary {
        failures: exactness.failures(),
        exactness,
        explicit_differentials: complex.explicit_matches_dualized(),
        complex_squares_to_zero: complex.squares_to_zero(),
    };
    let homology = complex.homology_dims(top);
    let dimensions = DimensionTables {
        cohomology: complex.hh_dims(top),
        commutator_quotient: commutator_quotient_dim(&t),
        cyclic: cyclic_dims(field, n, top).ok(),
        connes_images: connes_images(&homology, n),
        homology,
    };
    let zmodule = complex.zmodule_checks();
    clock.lap("cochain");

    let engine = YonedaEngine::new(complex.clone());
    let reversed = YonedaEngine::with_order(complex.clone(), PivotOrder::Reversed);
    let c_matrix = c_matrix_report(&t, Some(&engine))?;
    let products = product_table(&engine, maxdeg)?;
    let product_lemmas = presentation::product_lemmas(&engine)?;
    let ring_axioms = presentation::ring_axioms(&engine, &reversed, &presentation::all_generators(n), cfg.triple_degree)?;
    clock.lap("products");

    let pres = presentation::presentation_in(n, field);
    let presentation = presentation::verify(&pres, &engine, top)?;
    let stable = presentation::stable_check(&engine)?;
    clock.lap("presentation");

    let upto = oracle_upto(&t, maxdeg, cfg.oracle_budget);
    let oracle = match upto {
        None => OracleSummary {
            upto: None,
            comparison: None,
            negative_control_degree: None,
            negative_control_detected: None,
        },
        Some(k) => {
            let comparison = oracle::compare(&t, &complex, k, cfg.oracle_budget)?;
            let degree = Some(0);
            let perturbed = degree.map(|d| (d, oracle::perturbed_dims(&complex, d, k)));
            let detected = perturbed.map(|(d, dims)| dims[d] != comparison.bar[d]);
            OracleSummary {
                upto: Some(k),
                comparison: Some(comparison),
                negative_control_degree: degree,
                negative_control_detected: detected,
            }
        }
    };
    clock.lap("oracle");

    let mut verdicts = BTreeMap::new();
    let dims = &dimensions.cohomology;
    verdicts.insert("algebra".into(), algebra.sanity.pass() && algebra.cartan_determinant == (1u64 << n).to_string());
    verdicts.insert(
        "dualizability".into(),
        dualizability.canonical.pass()
            && variant_witnesses_match(&t, dualizability.unsigned_variant_passes, &dualizability.unsigned_variant_witnesses),
    );
    verdicts.insert(
        "resolution".into(),
        resolution.exactness.pass() && resolution.complex_squares_to_zero && resolution.explicit_differentials.iter().all(|x| x.1),
    );
    verdicts.insert(
        "dimensions".into(),
        dims.iter().enumerate().all(|(i, &d)| d == if i == 0 { 2 * n } else { n })
            && dimensions.homology == *dims
            && dimensions.commutator_quotient == dimensions.homology[0],
    );
    if let Some(hc) = &dimensions.cyclic {
        let bookkeeping = dimensions
            .connes_images
            .iter()
            .enumerate()
            .all(|(i, &b)| b == if i % 2 == 0 { n as i64 } else { 0 });
        verdicts.insert("cyclic".into(), bookkeeping && hc[0] == dimensions.homology[0]);
    }
    verdicts.insert("zmodule".into(), zmodule.pass());
    verdicts.insert("c_matrix".into(), c_matrix.pass());
    verdicts.insert("product_lemmas".into(), product_lemmas.iter().all(|r| r.holds));
    verdicts.insert("ring_axioms".into(), ring_axioms.pass());
    verdicts.insert("presentation".into(), presentation.pass);
    verdicts.insert("stable".into(), stable.pass());
    if let Some(c) = &oracle.comparison {
        verdicts.insert("oracle".into(), c.pass() && oracle.negative_control_detected.unwrap_or(true));
    }
    let pass = verdicts.values().all(|v| *v);
    let cert = Certificate {
        n,
        characteristic,
        maxdeg,
        algebra,
        dualizability,
        resolution,
        dimensions,
        zmodule,
        c_matrix,
        products,
        product_lemmas,
        ring_axioms,
        presentation,
        stable,
        oracle,
        verdicts,
        pass,
    };
    Ok((cert, clock.finish()))
}

pub fn file_stem(n: usize, characteristic: u64) -> String {
    format!("cert_n{n}_p{characteristic}")
}

/// The JSON document for a certificate.
pub fn document(cert: &Certificate, timings: &Timings) -> Value {
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let timings: serde_json::Map<String, Value> = timings.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect();
    json!({
        "schema": SCHEMA,
        "header": {
            "tool": "preproj",
            "version": TOOL_VERSION,
            "timestamp_unix": stamp.to_string(),
            "timings_ms": timings,
        },
        "certificate": cert,
    })
}

/// The bytes of a rendered JSON document from the certificate body on,
/// i.e. everything that must be reproducible.
pub fn body_bytes(rendered: &str) -> &str {
    match rendered.find("\"certificate\"") {
        Some(i) => &rendered[i..],
        None => rendered,
    }
}

pub fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("certificate serializes");
            s.push('\n');
            s
        }
        Format::Csv => render_csv(std::slice::from_ref(doc)),
        Format::Markdown => render_markdown(doc),
    }
}

/// Dimension tables of one or more documents as CSV.
pub fn render_csv(docs: &[Value]) -> String {
    let mut s = String::from("n,characteristic,table,degree,dimension\n");
    for doc in docs {
        let c = &doc["certificate"];
        for table in ["cohomology", "homology", "cyclic"] {
            if let Some(arr) = c["dimensions"][table].as_array() {
                for (i, v) in arr.iter().enumerate() {
                    s.push_str(&format!("{},{},{table},{i},{v}\n", c["n"], c["characteristic"]));
                }
            }
        }
    }
    s
}

fn list(v: &Value) -> String {
    match v.as_array() {
        Some(a) => a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
        None => "-".into(),
    }
}

pub fn render_markdown(doc: &Value) -> String {
    let c = &doc["certificate"];
    let mut s = format!("# n = {}, characteristic {}\n\n", c["n"], c["characteristic"]);
    s.push_str(&format!(
        "Overall: **{}**\n\n",
        if c["pass"].as_bool() == Some(true) { "pass" } else { "FAIL" }
    ));
    s.push_str("| check | verdict |\n|---|---|\n");
    if let Some(map) = c["verdicts"].as_object() {
        for (k, v) in map {
            s.push_str(&format!("| {k} | {} |\n", if v.as_bool() == Some(true) { "pass" } else { "fail" }));
        }
    }
    let a = &c["algebra"];
    s.push_str(&format!(
        "\nAlgebra: dimension {}, Cartan determinant {}, center dimension {}.\n\n",
        a["dim"], a["cartan_determinant"], a["center_dim"]
    ));
    let d = &c["dimensions"];
    s.push_str(&format!("- HH^i: {}\n", list(&d["cohomology"])));
    s.push_str(&format!("- HH_i: {}\n", list(&d["homology"])));
    s.push_str(&format!("- HC_i: {}\n", list(&d["cyclic"])));
    let cm = &c["c_matrix"];
    s.push_str(&format!(
        "\nC matrix: {} (rank {}, determinant {}).\n",
        cm["entries"], cm["rank"], cm["determinant"]
    ));
    s.push_str(&format!("\nPresentation regime: {}.\n", c["presentation"]["regime"]));
    s
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), PipelineError> {
    let io = |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

#[derive(Debug, Clone, Serialize)]
pub struct PointOutcome {
    pub n: usize,
    pub characteristic: u64,
    pub pass: bool,
    pub failures: Vec<String>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunOutcome {
    pub points: Vec<PointOutcome>,
}

impl RunOutcome {
    pub fn pass(&self) -> bool {
        self.points.iter().all(|p| p.pass)
    }

    /// 0 when every verdict passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }
}

/// Certifies every grid point, in parallel, writing one file per point when
/// `out` is given.
pub fn run(cfg: &RunConfig, out: Option<&Path>, format: Format) -> Result<(RunOutcome, Vec<Value>), PipelineError> {
    cfg.validate()?;
    let results: Vec<Result<(PointOutcome, Value), PipelineError>> = cfg
        .points()
        .par_iter()
        .map(|&(n, p)| {
            let (cert, timings) = certify(n, p, cfg)?;
            let doc = document(&cert, &timings);
            let path = match out {
                Some(dir) => {
                    let path = dir.join(format!("{}.{}", file_stem(n, p), format.extension()));
                    write_atomic(&path, &render(&doc, format))?;
                    Some(path)
                }
                None => None,
            };
            Ok((
                PointOutcome {
                    n,
                    characteristic: p,
                    pass: cert.pass,
                    failures: cert.failures(),
                    path,
                },
                doc,
            ))
        })
        .collect();
    let mut points = Vec::new();
    let mut docs = Vec::new();
    for r in results {
        let (p, d) = r?;
        points.push(p);
        docs.push(d);
    }
    Ok((RunOutcome { points }, docs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_point_passes() {
        let cfg = RunConfig::default();
        let (cert, _) = certify(2, 0, &cfg).unwrap();
        assert!(cert.pass, "{:?}", cert.failures());
        let (cert, _) = certify(2, 5, &cfg).unwrap();
        assert!(cert.pass, "{:?}", cert.failures());
    }

    #[test]
    fn body_excludes_header() {
        let cfg = RunConfig::default();
        let (cert, timings) = certify(1, 3, &cfg).unwrap();
        let a = render(&document(&cert, &timings), Format::Json);
        let b = render(&document(&cert, &vec![("total".into(), 12345)]), Format::Json);
        assert_ne!(a, b);
        assert_eq!(body_bytes(&a), body_bytes(&b));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = RunConfig::default();
        cfg.characteristics = vec![2];
        assert!(matches!(cfg.validate(), Err(PipelineError::Field(FieldError::CharacteristicTwo))));
        cfg.characteristics = vec![9];
        assert!(cfg.validate().is_err());
    }
}
