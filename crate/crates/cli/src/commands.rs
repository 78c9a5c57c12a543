use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cosk_core::ctj::CtjDocument;
use cosk_core::four_dim::{
    cgt_blocks, einstein_defect, is_einstein, r_hat_blocks, rigidity_certificate, Orientation, DEFAULT_CERTIFICATE_TOL,
};
use cosk_core::kahler::{min_orth_bisectional, KahlerStructure, DEFAULT_J_TOL};
use cosk_core::models::{flat, fubini_study, product_surfaces, s2xs2, space_form, ComplexStructure};
use cosk_core::operators::{cosk_spectrum, r_hat_eigenvalues, DEFAULT_VERDICT_TOL};
use cosk_core::tensor::{AlgebraicCurvatureTensor, DEFAULT_BIANCHI_TOL};
use cosk_core::verify::{self, Comparison, VerifyConfig};
use nalgebra::Matrix3;
use serde_json::{json, Value};

use crate::report::{
    sha256_hex, CliError, Outcome, Report, EXIT_CHECK_FAILED, EXIT_DIMENSION, EXIT_MISSING_J, EXIT_PARSE,
};

/// Orthogonal bisectional curvature counts as nonnegative down to this
/// multiple of `‖R‖∞`.
pub const BISECTIONAL_TOL: f64 = 1e-8;

const ALPHAS: [f64; 4] = [2.0, 3.0, 4.5, 6.0];

struct Input {
    doc: CtjDocument,
    tensor: AlgebraicCurvatureTensor,
    digest: String,
}

fn load(path: &Path) -> Result<Input, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let doc = CtjDocument::parse(text)?;
    let tensor = doc.to_tensor()?;
    Ok(Input { doc, tensor, digest: sha256_hex(&bytes) })
}

fn path_arg(path: &Path) -> Value {
    Value::String(path.display().to_string())
}

/// Rounds away roundoff-sized values and negative zero for tables only.
fn clean(x: f64) -> f64 {
    if x.abs() < 5e-13 {
        0.0
    } else {
        x
    }
}

fn row(values: &[f64]) -> String {
    values.iter().map(|v| format!("{:>10.6}", clean(*v))).collect::<Vec<_>>().join(" ")
}

fn mat3(m: &Matrix3<f64>) -> Value {
    json!((0..3).map(|r| (0..3).map(|c| m[(r, c)]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn alpha_key(a: f64) -> String {
    format!("{a}")
}

pub fn spectrum(path: &Path) -> Result<Outcome, CliError> {
    let input = load(path)?;
    let r = &input.tensor;
    let spec = cosk_spectrum(r)?;
    let rhat = r_hat_eigenvalues(r)?;
    let sums: BTreeMap<String, Option<f64>> =
        ALPHAS.iter().map(|&a| (alpha_key(a), spec.alpha_sum(a).ok())).collect();

    let mut table = String::new();
    writeln!(table, "n = {}   N = {}   S = {:.6}", spec.n, spec.dim_s20, clean(spec.scalar)).unwrap();
    writeln!(table, "R̊ eigenvalues: {}", row(&spec.eigs)).unwrap();
    writeln!(table, "R̂ eigenvalues: {}", row(&rhat)).unwrap();
    for (a, s) in &sums {
        match s {
            Some(v) => writeln!(table, "alpha_sum({a}) = {:.6}", clean(*v)).unwrap(),
            None => writeln!(table, "alpha_sum({a}) = n/a (alpha > N)").unwrap(),
        }
    }
    match spec.alpha_max {
        Some(a) => writeln!(table, "max_alpha = {a:.6}").unwrap(),
        None => writeln!(table, "max_alpha = none (trace is negative)").unwrap(),
    }

    let mut report = Report::new("spectrum").arg("file", path_arg(path)).tol("bianchi", DEFAULT_BIANCHI_TOL);
    report.input_digest = Some(input.digest);
    report.results = json!({
        "n": spec.n,
        "dim_s20": spec.dim_s20,
        "r_ring_eigenvalues": spec.eigs,
        "r_hat_eigenvalues": rhat,
        "scalar": spec.scalar,
        "alpha_sums": sums,
        "max_alpha": spec.alpha_max,
    });
    Ok(Outcome { report, table, code: 0, payload: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelName {
    SpaceForm,
    ProductSurfaces,
    S2xs2,
    FubiniStudy,
    Flat,
}

#[derive(Clone, Debug, Default, clap::Args)]
pub struct ModelParams {
    /// Dimension (space-form, flat).
    #[arg(long)]
    pub n: Option<usize>,
    /// Sectional curvature (space-form).
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Curvature of the first factor (product-surfaces).
    #[arg(long, allow_negative_numbers = true)]
    pub k1: Option<f64>,
    /// Curvature of the second factor (product-surfaces).
    #[arg(long, allow_negative_numbers = true)]
    pub k2: Option<f64>,
    /// Complex dimension (fubini-study).
    #[arg(long)]
    pub m: Option<usize>,
    /// Holomorphic sectional curvature (fubini-study).
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
}

impl ModelParams {
    fn given(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for (name, set) in [
            ("n", self.n.is_some()),
            ("kappa", self.kappa.is_some()),
            ("k1", self.k1.is_some()),
            ("k2", self.k2.is_some()),
            ("m", self.m.is_some()),
            ("c", self.c.is_some()),
        ] {
            if set {
                out.push(name);
            }
        }
        out
    }
}

type Built = (AlgebraicCurvatureTensor, Option<ComplexStructure>, BTreeMap<&'static str, Value>);

pub fn build_model(name: ModelName, p: &ModelParams) -> Result<Built, CliError> {
    let allowed: &[&str] = match name {
        ModelName::SpaceForm => &["n", "kappa"],
        ModelName::ProductSurfaces => &["k1", "k2"],
        ModelName::S2xs2 => &[],
        ModelName::FubiniStudy => &["m", "c"],
        ModelName::Flat => &["n"],
    };
    if let Some(bad) = p.given().into_iter().find(|g| !allowed.contains(g)) {
        return Err(CliError::new(EXIT_PARSE, format!("--{bad} does not apply to this model")));
    }
    let mut params = BTreeMap::new();
    let built = match name {
        ModelName::SpaceForm => {
            let (n, kappa) = (p.n.unwrap_or(4), p.kappa.unwrap_or(1.0));
            params.insert("n", json!(n));
            params.insert("kappa", json!(kappa));
            (space_form(n, kappa), None)
        }
        ModelName::ProductSurfaces => {
            let (k1, k2) = (p.k1.unwrap_or(1.0), p.k2.unwrap_or(1.0));
            params.insert("k1", json!(k1));
            params.insert("k2", json!(k2));
            (Ok(product_surfaces(k1, k2)), Some(ComplexStructure::standard(4)?))
        }
        ModelName::S2xs2 => {
            let (r, j) = s2xs2();
            (Ok(r), Some(j))
        }
        ModelName::FubiniStudy => {
            let (m, c) = (p.m.unwrap_or(2), p.c.unwrap_or(4.0));
            params.insert("m", json!(m));
            params.insert("c", json!(c));
            let (r, j) = fubini_study(m, c).map_err(|e| CliError::new(EXIT_PARSE, e.to_string()))?;
            (Ok(r), Some(j))
        }
        ModelName::Flat => {
            let n = p.n.unwrap_or(4);
            params.insert("n", json!(n));
            let j = if n.is_multiple_of(2) { ComplexStructure::standard(n).ok() } else { None };
            (flat(n), j)
        }
    };
    let r = built.0.map_err(|e| CliError::new(EXIT_PARSE, e.to_string()))?;
    Ok((r, built.1, params))
}

fn model_label(name: ModelName) -> &'static str {
    match name {
        ModelName::SpaceForm => "space-form",
        ModelName::ProductSurfaces => "product-surfaces",
        ModelName::S2xs2 => "s2xs2",
        ModelName::FubiniStudy => "fubini-study",
        ModelName::Flat => "flat",
    }
}

pub fn model_document(name: ModelName, p: &ModelParams) -> Result<CtjDocument, CliError> {
    let (r, j, params) = build_model(name, p)?;
    let mut doc = CtjDocument::from_tensor(&r, j.as_ref()).with_metadata("model", model_label(name));
    if !params.is_empty() {
        doc = doc.with_metadata("params", json!(params));
    }
    Ok(doc)
}

pub fn model(name: ModelName, p: &ModelParams, out: &Path) -> Result<Outcome, CliError> {
    let doc = model_document(name, p)?;
    let text = doc.to_json();
    let digest = sha256_hex(text.as_bytes());
    let to_stdout = out == Path::new("-");
    if !to_stdout {
        fs::write(out, &text).map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", out.display())))?;
    }
    let mut report = Report::new("model").arg("model", model_label(name)).arg("out", path_arg(out));
    if let Some(params) = doc.metadata.get("params") {
        report = report.arg("params", params.clone());
    }
    report.input_digest = Some(digest.clone());
    report.results = json!({ "n": doc.n, "components": doc.components.len(), "has_j": doc.j.is_some(), "sha256": digest });
    let table = format!("sha256:{digest}  {}\n", out.display());
    Ok(Outcome { report, table, code: 0, payload: to_stdout.then_some(text) })
}

fn kahler_of(input: &Input) -> Result<KahlerStructure, CliError> {
    let j = input
        .doc
        .complex_structure()?
        .ok_or_else(|| CliError::new(EXIT_MISSING_J, "input has no complex structure (\"J\" key)"))?;
    Ok(KahlerStructure::new(input.tensor.clone(), j)?)
}

pub fn kahler_check(path: &Path, samples: usize, refine: usize, seed: u64) -> Result<Outcome, CliError> {
    let input = load(path)?;
    let k = kahler_of(&input)?;
    if k.dim() < 4 {
        return Err(CliError::new(EXIT_DIMENSION, format!("need n >= 4 for orthogonal pairs, got n = {}", k.dim())));
    }
    if samples == 0 {
        return Err(CliError::new(EXIT_PARSE, "--samples must be at least 1"));
    }
    let spec = cosk_spectrum(k.tensor())?;
    let six = spec.alpha_sum(6.0)?;
    let six_nonneg = spec.is_alpha_nonneg(6.0, DEFAULT_VERDICT_TOL)?;
    let search = min_orth_bisectional(&k, samples, refine, seed)?;
    let floor = -BISECTIONAL_TOL * k.tensor().sup_norm();
    let bisectional_nonneg = search.min >= floor;
    let (verdict, code) = match (six_nonneg, bisectional_nonneg) {
        (true, true) => ("holds", 0),
        (true, false) => ("violated", EXIT_CHECK_FAILED),
        (false, _) => ("vacuous", 0),
    };

    let mut table = String::new();
    writeln!(table, "j_defect              {:.3e}", k.j_defect()).unwrap();
    writeln!(table, "alpha_sum(6)          {:.6}", clean(six)).unwrap();
    writeln!(table, "six-nonnegative       {six_nonneg}").unwrap();
    writeln!(table, "min orth bisectional  {:.6}", clean(search.min)).unwrap();
    writeln!(table, "identity defect       {:.3e}", search.max_identity_defect).unwrap();
    writeln!(table, "pairs evaluated       {}", search.pairs_evaluated).unwrap();
    writeln!(table, "implication           {verdict}").unwrap();

    let mut report = Report::new("kahler-check")
        .arg("file", path_arg(path))
        .arg("samples", samples)
        .arg("refine", refine)
        .tol("j", DEFAULT_J_TOL)
        .tol("verdict", DEFAULT_VERDICT_TOL)
        .tol("bisectional", BISECTIONAL_TOL);
    report.input_digest = Some(input.digest);
    report.seed = Some(seed);
    report.results = json!({
        "j_defect": k.j_defect(),
        "alpha_sum_6": six,
        "six_nonnegative": six_nonneg,
        "min_orth_bisectional": search.min,
        "witness": { "x": search.x.as_slice(), "y": search.y.as_slice() },
        "max_identity_defect": search.max_identity_defect,
        "pairs_evaluated": search.pairs_evaluated,
        "bisectional_nonnegative": bisectional_nonneg,
        "implication": verdict,
    });
    Ok(Outcome { report, table, code, payload: None })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OrientationArg {
    #[default]
    Standard,
    Reversed,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Standard => Orientation::Standard,
            OrientationArg::Reversed => Orientation::Reversed,
        }
    }
}

pub fn decompose4(path: &Path, orientation: OrientationArg) -> Result<Outcome, CliError> {
    let input = load(path)?;
    let r = &input.tensor;
    if r.dim() != 4 {
        return Err(CliError::new(EXIT_DIMENSION, format!("decompose4 needs n = 4, got n = {}", r.dim())));
    }
    let o: Orientation = orientation.into();
    let cgt = cgt_blocks(r, o)?;
    let rhat = r_hat_blocks(r, o)?;
    let ein_defect = einstein_defect(r);
    let einstein = is_einstein(r, DEFAULT_CERTIFICATE_TOL);
    let certificate = match input.doc.complex_structure()? {
        Some(j) => {
            let k = KahlerStructure::new(r.clone(), j)?;
            let c = rigidity_certificate(&k, DEFAULT_CERTIFICATE_TOL)?;
            Some(json!({
                "einstein_defect": c.einstein_defect,
                "w_minus_norm": c.w_minus_norm,
                "scalar": c.scalar,
                "constant_holomorphic": c.constant_holomorphic,
                "verdict": c.verdict.as_str(),
            }))
        }
        None => None,
    };

    let mut table = String::new();
    writeln!(table, "S        {:.6}", clean(cgt.scalar)).unwrap();
    writeln!(table, "lambda   {}", row(&cgt.lambda)).unwrap();
    writeln!(table, "mu       {}", row(&cgt.mu)).unwrap();
    for (a, d) in cgt.d.iter().enumerate() {
        writeln!(table, "D{}       {}", a + 1, row(&[d[(0, 0)], d[(1, 1)], d[(2, 2)]])).unwrap();
    }
    for (a, b) in cgt.o.iter().enumerate() {
        writeln!(table, "O{} norm  {:.3e}", a + 1, b.norm()).unwrap();
    }
    writeln!(table, "d_defect {:.3e}   o_skew_defect {:.3e}   o_norm {:.3e}", cgt.d_defect, cgt.o_skew_defect, cgt.o_norm)
        .unwrap();
    writeln!(table, "einstein {einstein} (defect {ein_defect:.3e})").unwrap();
    if let Some(c) = &certificate {
        writeln!(table, "certificate {}", c["verdict"].as_str().unwrap_or("?")).unwrap();
    }

    let orientation_name = match orientation {
        OrientationArg::Standard => "standard",
        OrientationArg::Reversed => "reversed",
    };
    let mut report = Report::new("decompose4")
        .arg("file", path_arg(path))
        .arg("orientation", orientation_name)
        .tol("certificate", DEFAULT_CERTIFICATE_TOL);
    report.input_digest = Some(input.digest);
    report.results = json!({
        "scalar": cgt.scalar,
        "lambda": cgt.lambda,
        "mu": cgt.mu,
        "r_hat": { "a_plus": mat3(&rhat.a_plus), "b": mat3(&rhat.b), "a_minus": mat3(&rhat.a_minus) },
        "d_blocks": cgt.d.iter().map(mat3).collect::<Vec<_>>(),
        "o_blocks": cgt.o.iter().map(mat3).collect::<Vec<_>>(),
        "d_defect": cgt.d_defect,
        "o_skew_defect": cgt.o_skew_defect,
        "o_norm": cgt.o_norm,
        "basis_defect": cgt.basis_defect,
        "symmetry_defect": cgt.symmetry_defect,
        "einstein_defect": ein_defect,
        "einstein": einstein,
        "certificate": certificate,
    });
    Ok(Outcome { report, table, code: 0, payload: None })
}

pub fn verify_paper(seed: u64, trials: usize, s2xs2_path: Option<&Path>) -> Result<Outcome, CliError> {
    let mut cfg = VerifyConfig::new(seed);
    cfg.trials = trials;
    let digest = match s2xs2_path {
        Some(path) => {
            let input = load(path)?;
            if input.tensor.dim() != 4 {
                return Err(CliError::new(EXIT_DIMENSION, "the S²×S² fixture must have n = 4"));
            }
            cfg.s2xs2 = input.tensor;
            input.digest
        }
        None => sha256_hex(CtjDocument::from_tensor(&cfg.s2xs2, None).to_json().as_bytes()),
    };
    let results = verify::run(&cfg);
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();

    let mut table = String::new();
    for r in &results {
        let op = match r.comparison {
            Comparison::AtMost => "<=",
            Comparison::AtLeast => ">=",
        };
        let status = if r.passed { "PASS" } else { "FAIL" };
        writeln!(table, "{status}  {:<26} {:>12.3e} {op} {:<9.1e} {}", r.id, r.measured, r.tolerance, r.anchor).unwrap();
        if let Some(e) = &r.error {
            writeln!(table, "      error: {e}").unwrap();
        }
    }
    writeln!(table, "{} checks, {} failed", results.len(), failed.len()).unwrap();

    let mut report = Report::new("verify-paper").arg("trials", trials);
    if let Some(p) = s2xs2_path {
        report = report.arg("s2xs2", path_arg(p));
    }
    report.input_digest = Some(digest);
    report.seed = Some(seed);
    report.results = json!({
        "checks": results,
        "total": results.len(),
        "failed": failed,
        "passed": failed.is_empty(),
    });
    let code = if failed.is_empty() { 0 } else { EXIT_CHECK_FAILED };
    Ok(Outcome { report, table, code, payload: None })
}
