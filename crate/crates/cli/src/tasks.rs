//! One function per subcommand. Each returns a JSON section and its series.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use kestenlab::amenability::{
    build_kesten_walk, cogrowth_series, folner_search_traced, folner_sequence, self_adjoint_check,
    spectral_radius_estimate, FolnerBudget, FolnerCertificate, FolnerOutcome, FolnerSet, KestenWalk, SpectralMethod,
};
use kestenlab::extension::{amenability_verdict, check_symmetry, hnorm_1, ReturnMethod, ReturnSeries, Verdict};
use kestenlab::group::{ball, GroupElement, GroupSpec};
use kestenlab::potential::{
    conformal_check, gibbs_check, normalize, pressure_estimate, variation_constants, variation_constants_with_symmetry,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{parse_elements, ExperimentConfig, KestenConfig};
use crate::error::{Classify, CliError, ResultExt};
use crate::output::{Cell, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Task {
    Pressure,
    ExtensionPressure,
    Kesten,
    Cogrowth,
    Folner,
    VerifySymmetry,
    Report,
}

impl Task {
    pub const ALL: [Task; 7] = [
        Task::Pressure,
        Task::ExtensionPressure,
        Task::Kesten,
        Task::Cogrowth,
        Task::Folner,
        Task::VerifySymmetry,
        Task::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Pressure => "pressure",
            Task::ExtensionPressure => "extension-pressure",
            Task::Kesten => "kesten",
            Task::Cogrowth => "cogrowth",
            Task::Folner => "folner",
            Task::VerifySymmetry => "verify-symmetry",
            Task::Report => "report",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| CliError::validation("task", format!("unknown task {s:?}")))
    }
}

/// What a task produced.
#[derive(Debug)]
pub struct TaskOutput {
    pub json: Value,
    pub tables: Vec<Table>,
    /// Set when a budget stopped the task after partial results were made.
    pub exhausted: Option<String>,
}

impl TaskOutput {
    fn ok(json: Value, tables: Vec<Table>) -> Self {
        TaskOutput {
            json,
            tables,
            exhausted: None,
        }
    }
}

pub fn run_task(task: Task, cfg: &ExperimentConfig, seed: u64) -> Result<TaskOutput, CliError> {
    match task {
        Task::Pressure => pressure(cfg),
        Task::ExtensionPressure => extension_pressure(cfg, seed),
        Task::Kesten => kesten(cfg),
        Task::Cogrowth => cogrowth(cfg),
        Task::Folner => folner(cfg),
        Task::VerifySymmetry => verify_symmetry(cfg),
        Task::Report => Err(CliError::validation("task", "report is dispatched by the runner")),
    }
}

/// Tasks whose config sections are present, in fixed order.
pub fn report_tasks(cfg: &ExperimentConfig) -> Vec<Task> {
    let mut out = Vec::new();
    let base = cfg.shift.is_some() && cfg.potential.is_some();
    let ext = base && cfg.group.is_some() && cfg.cocycle.is_some();
    if base {
        out.push(Task::Pressure);
    }
    if ext {
        out.push(Task::ExtensionPressure);
    }
    if cfg.kesten.is_some() {
        out.push(Task::Kesten);
    }
    if cfg.cogrowth.is_some() {
        out.push(Task::Cogrowth);
    }
    if cfg.folner.is_some() {
        out.push(Task::Folner);
    }
    if cfg.shift.is_some() && cfg.group.is_some() && cfg.cocycle.is_some() && cfg.involution.is_some() {
        out.push(Task::VerifySymmetry);
    }
    out
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn element_strings(g: &GroupSpec, elems: &[GroupElement]) -> Vec<String> {
    elems.iter().map(|e| g.format_element(e)).collect()
}

fn pressure(cfg: &ExperimentConfig) -> Result<TaskOutput, CliError> {
    let shift = cfg.shift()?;
    let p = cfg.potential(&shift)?;
    let num = &cfg.numerics;
    let (lo, hi) = num.pressure_range;
    if lo == 0 || lo >= hi {
        return Err(CliError::validation("[numerics].pressure_range", "need 1 <= lo < hi"));
    }
    let est = pressure_estimate(&p, num.pressure_letter, lo..=hi).at("[numerics].pressure_letter")?;
    let mut table = Table::new("pressure", vec!["n", "log_z", "log_z_over_n"]);
    for &(n, v) in &est.samples {
        table.push(vec![n.into(), (v * n as f64).into(), v.into()]);
    }
    let bip = shift.check_bip().at("[shift]")?;
    let var = variation_constants(&p, num.gibbs_n_max.max(1)).at("[potential]")?;
    let mut json = json!({
        "letter": est.letter,
        "range": [lo, hi],
        "pressure": est.eigenvalue_pressure,
        "periodic_orbit_slope": est.periodic_orbit_slope,
        "periodic_orbit_intercept": est.periodic_orbit_intercept,
        "discrepancy": est.discrepancy,
        "period": shift.period(),
        "mixing": shift.is_mixing(),
        "bip": to_value(&bip),
        "log_variation": var.log_c,
        "memory": p.memory(),
    });
    let mut tables = vec![table];
    if num.gibbs_n_max > 0 {
        let q = normalize(&p).at("[potential]")?;
        let g = gibbs_check(&q, num.gibbs_n_max).at("[potential]")?;
        let c = conformal_check(&q, num.gibbs_n_max).at("[potential]")?;
        let mut t = Table::new("conformal", vec!["n", "max_distortion", "bound"]);
        for (i, (d, b)) in c.max_distortion.iter().zip(&c.bound).enumerate() {
            t.push(vec![(i + 1).into(), (*d).into(), (*b).into()]);
        }
        tables.push(t);
        json["gibbs"] = to_value(&g);
        json["conformal"] = to_value(&c);
    }
    Ok(TaskOutput::ok(json, tables))
}

fn return_method(cfg: &ExperimentConfig, method: &str, field: &str) -> Result<ReturnMethod, CliError> {
    match method {
        "ball" => Ok(ReturnMethod::Ball {
            radius: cfg.numerics.ball_radius,
            cap: cfg.numerics.ball_cap,
        }),
        "radial" => Ok(ReturnMethod::Radial),
        other => Err(CliError::validation(field, format!("unknown method {other:?}"))),
    }
}

fn series_table(series: &ReturnSeries, verdict: Option<&Verdict>) -> Table {
    let mut t = Table::new(
        "return_series",
        vec!["n", "r", "log_r", "loss", "exp_fit", "poly_fit", "joint_fit"],
    );
    for s in &series.samples {
        let n = s.n as f64;
        let fits = verdict
            .filter(|v| s.n >= v.window.0 && s.n <= v.window.1 && s.n > 0)
            .map(|v| {
                (
                    v.exponential.intercept + v.exponential.slope * n,
                    v.polynomial.intercept - v.polynomial.beta * n.ln(),
                    v.joint.intercept + v.joint.slope * n - v.joint.beta * n.ln(),
                )
            });
        let (e, p, j) = fits.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
        t.push(vec![
            s.n.into(),
            s.r.into(),
            s.log_r.into(),
            s.loss.into(),
            e.into(),
            p.into(),
            j.into(),
        ]);
    }
    t
}

fn extension_pressure(cfg: &ExperimentConfig, seed: u64) -> Result<TaskOutput, CliError> {
    let ext = cfg.extension()?;
    let num = &cfg.numerics;
    let window = cfg.window()?;
    let method = return_method(cfg, &num.method, "[numerics].method")?;
    let series = ext.return_weight_series(num.n_max, method).at("[numerics]")?;
    let (verdict, exhausted) = match amenability_verdict(&series, window, num.threshold, num.max_loss) {
        Ok(v) => (Some(v), None),
        Err(e) => match e.at("[numerics].ball_radius") {
            CliError::Budget { message, .. } => (None, Some(message)),
            other => return Err(other),
        },
    };
    let mut tables = vec![series_table(&series, verdict.as_ref())];
    let mut json = json!({
        "group": series.group,
        "method": to_value(&series.method),
        "radius": series.radius,
        "ball_size": series.ball_size,
        "n_max": num.n_max,
        "window": [window.0, window.1],
        "verdict": verdict.as_ref().map(to_value),
        "pressure_drop": verdict.as_ref().map(|v| -v.rate),
    });
    if num.lambda_samples > 0 {
        let g = ext.group();
        let support = ball(g, 2, &g.standard_generators(), num.ball_cap).at("[numerics].ball_cap")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Table::new("lambda", vec!["sample", "support", "k", "lambda"]);
        let mut worst: f64 = 0.0;
        for i in 0..num.lambda_samples {
            let mut f = BTreeMap::new();
            for e in support.elements() {
                if rng.gen_bool(0.5) {
                    f.insert(e.clone(), rng.gen_range(0.0..1.0));
                }
            }
            if f.is_empty() {
                f.insert(g.identity(), 1.0);
            }
            let k = rng.gen_range(1..=num.lambda_k.max(1));
            debug_assert!(hnorm_1(&f).is_ok());
            let l = ext.lambda_k_capped(&f, k, num.ball_cap).at("[numerics].lambda_k")?;
            worst = worst.max(l);
            t.push(vec![i.into(), f.len().into(), k.into(), l.into()]);
        }
        json["lambda_max"] = json!(worst);
        tables.push(t);
    }
    Ok(TaskOutput {
        json,
        tables,
        exhausted,
    })
}

fn kesten(cfg: &ExperimentConfig) -> Result<TaskOutput, CliError> {
    let kc = cfg.kesten.clone().unwrap_or_default();
    let KestenConfig {
        walk: kind,
        anchor,
        n,
        xi,
        k_max,
        method,
        self_adjoint_radius,
    } = kc;
    let num = &cfg.numerics;
    let walk = match kind.as_str() {
        "simple" => KestenWalk::simple(cfg.group()?).at("[group]")?,
        "extension" => {
            let ext = cfg.extension()?;
            build_kesten_walk(&ext, &anchor, n, xi.as_deref()).at("[kesten]")?
        }
        other => return Err(CliError::validation("[kesten].walk", format!("unknown walk {other:?}"))),
    };
    let k_max = k_max.unwrap_or(num.n_max);
    if k_max == 0 {
        return Err(CliError::validation("[kesten].k_max", "must be positive"));
    }
    let method = match method.as_deref().unwrap_or(num.method.as_str()) {
        "ball" => SpectralMethod::Ball {
            radius: num.ball_radius,
            cap: num.ball_cap,
        },
        "radial" => SpectralMethod::Radial,
        other => {
            return Err(CliError::validation(
                "[kesten].method",
                format!("unknown method {other:?}"),
            ))
        }
    };
    let residual = self_adjoint_check(&walk, self_adjoint_radius, num.ball_cap).at("[kesten].self_adjoint_radius")?;
    let est = spectral_radius_estimate(&walk, k_max, method).at("[kesten]")?;
    let g = &walk.group;
    let mut weights = Table::new("kesten_weights", vec!["element", "weight"]);
    for (e, &w) in &walk.weights {
        weights.push(vec![g.format_element(e).into(), w.into()]);
    }
    let mut spectral = Table::new("spectral", vec!["k", "p_2k", "rho_hat", "rayleigh"]);
    for k in 0..k_max {
        spectral.push(vec![
            (k + 1).into(),
            est.p_2k[k].into(),
            est.rho_hat[k].into(),
            est.rayleigh[k].into(),
        ]);
    }
    let json = json!({
        "walk": kind,
        "group": g.name(),
        "n": walk.n,
        "anchor": walk.anchor,
        "xi": walk.xi,
        "total": walk.total,
        "support": walk.weights.len(),
        "symmetry_defect": walk.symmetry_defect(),
        "self_adjoint_residual": residual,
        "self_adjoint_radius": self_adjoint_radius,
        "k_max": k_max,
        "method": est.method,
        "ball_size": est.ball_size,
        "lower_bound": est.lower_bound,
        "rayleigh": est.rayleigh.last(),
    });
    Ok(TaskOutput::ok(json, vec![weights, spectral]))
}

fn count_value(c: u128) -> Value {
    match u64::try_from(c) {
        Ok(v) => json!(v),
        Err(_) => json!(c.to_string()),
    }
}

fn cogrowth(cfg: &ExperimentConfig) -> Result<TaskOutput, CliError> {
    let cc = cfg
        .cogrowth
        .as_ref()
        .ok_or_else(|| CliError::validation("[cogrowth]", "section is required"))?;
    let target = cfg.group()?;
    let images = parse_elements(&target, &cc.images, "[cogrowth].images")?;
    let hom = kestenlab::group::Homomorphism::new(cc.rank, target, images).at("[cogrowth].images")?;
    let n_max = cc.n_max.unwrap_or(cfg.numerics.n_max);
    if n_max == 0 {
        return Err(CliError::validation("[cogrowth].n_max", "must be positive"));
    }
    let series = cogrowth_series(&hom, n_max, cfg.numerics.ball_cap).at("[numerics].ball_cap")?;
    let mut t = Table::new("cogrowth", vec!["n", "count", "exponent"]);
    for (i, &c) in series.counts.iter().enumerate() {
        let n = i + 1;
        t.push(vec![n.into(), c.into(), series.exponent(n).unwrap_or(f64::NAN).into()]);
    }
    let q = 2 * cc.rank - 1;
    let last = (1..=n_max).rev().find_map(|n| series.exponent(n));
    let json = json!({
        "rank": cc.rank,
        "n_max": n_max,
        "counts": series.counts.iter().map(|&c| count_value(c)).collect::<Vec<_>>(),
        "free_exponent": (q as f64).ln(),
        "last_exponent": last,
    });
    Ok(TaskOutput::ok(json, vec![t]))
}

fn certificate_json(g: &GroupSpec, c: &FolnerCertificate) -> Value {
    let set = match &c.set {
        FolnerSet::Box { lower, side } => json!({"box": {"lower": lower, "side": side}}),
        FolnerSet::Explicit(v) => json!({"elements": element_strings(g, v)}),
    };
    json!({
        "family": c.family,
        "size": count_value(c.size),
        "defect": c.defect,
        "epsilon": c.epsilon,
        "k": element_strings(g, &c.k),
        "set": set,
    })
}

fn folner(cfg: &ExperimentConfig) -> Result<TaskOutput, CliError> {
    let fc = cfg.folner.clone().unwrap_or_default();
    let g = cfg.group()?;
    let k = match &fc.generators {
        Some(gens) => parse_elements(&g, gens, "[folner].generators")?,
        None => g.standard_generators(),
    };
    if !(fc.epsilon > 0.0) {
        return Err(CliError::validation("[folner].epsilon", "must be positive"));
    }
    let budget = FolnerBudget {
        max_radius: fc.max_radius,
        max_size: fc.max_size,
        max_box_side: fc.max_box_side,
    };
    let mut summary = Table::new("folner", vec!["stage", "family", "size", "defect", "epsilon"]);
    if let Some(eps) = &fc.epsilons {
        if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0)) {
            return Err(CliError::validation(
                "[folner].epsilons",
                "need a nonempty list of positive values",
            ));
        }
        let certs = folner_sequence(&g, &vec![k; eps.len()], eps, budget).at("[folner]")?;
        for (i, c) in certs.iter().enumerate() {
            summary.push(vec![
                (i + 1).into(),
                c.family.into(),
                c.size.into(),
                c.defect.into(),
                c.epsilon.into(),
            ]);
        }
        let json = json!({
            "mode": "sequence",
            "status": "found",
            "certificates": certs.iter().map(|c| certificate_json(&g, c)).collect::<Vec<_>>(),
        });
        return Ok(TaskOutput::ok(json, vec![summary]));
    }
    let (outcome, trace) = folner_search_traced(&g, &k, fc.epsilon, budget).map_err(|e| e.at("[folner]"))?;
    let mut tr = Table::new("folner_trace", vec!["step", "family", "size", "defect"]);
    for (i, c) in trace.iter().enumerate() {
        tr.push(vec![i.into(), c.family.into(), c.size.into(), c.defect.into()]);
    }
    let (json, exhausted) = match &outcome {
        FolnerOutcome::Found(c) => {
            summary.push(vec![
                1usize.into(),
                c.family.into(),
                c.size.into(),
                c.defect.into(),
                c.epsilon.into(),
            ]);
            (
                json!({"mode": "search", "status": "found", "certificate": certificate_json(&g, c)}),
                None,
            )
        }
        FolnerOutcome::NotFound {
            best_defect,
            best_size,
            best_family,
            candidates,
        } => (
            json!({
                "mode": "search",
                "status": "not_found",
                "best_defect": best_defect,
                "best_size": count_value(*best_size),
                "best_family": best_family,
                "candidates": candidates,
                "epsilon": fc.epsilon,
            }),
            Some(format!(
                "no Følner set with defect <= {} within budget; best defect {best_defect}",
                fc.epsilon
            )),
        ),
    };
    Ok(TaskOutput {
        json,
        tables: vec![summary, tr],
        exhausted,
    })
}

fn verify_symmetry(cfg: &ExperimentConfig) -> Result<TaskOutput, CliError> {
    let shift = cfg.shift()?;
    let group = cfg.group()?;
    let images = cfg.cocycle(&group)?;
    let dagger = cfg
        .involution
        .as_ref()
        .ok_or_else(|| CliError::validation("[involution]", "section is required"))?
        .dagger
        .clone();
    let report = check_symmetry(&shift, &dagger, &group, &images);
    let mut t = Table::new("symmetry", vec!["letter", "dagger", "image", "dagger_image"]);
    for (v, img) in images.iter().enumerate() {
        let d = dagger.get(v).copied();
        let d_img = d
            .and_then(|d| images.get(d))
            .map(|e| group.format_element(e))
            .unwrap_or_default();
        t.push(vec![
            v.into(),
            d.map_or(Cell::Text(String::new()), Cell::from),
            group.format_element(img).into(),
            d_img.into(),
        ]);
    }
    let mut json = json!({
        "involutive": report.involutive,
        "reverses_admissibility": report.reverses_admissibility,
        "inverts_cocycle": report.inverts_cocycle,
        "all_pass": report.all_pass(),
        "failures": report.failures,
    });
    let mut tables = vec![t];
    if report.all_pass() && cfg.potential.is_some() {
        let inv = cfg.involution(&shift)?.expect("involution present");
        let p = cfg.potential(&shift)?;
        let var =
            variation_constants_with_symmetry(&p, cfg.numerics.gibbs_n_max.max(1), Some(&inv)).at("[potential]")?;
        let log_d = var.log_d.clone().unwrap_or_default();
        let mut w = Table::new("weak_symmetry", vec!["n", "log_c", "log_d"]);
        for (i, (c, d)) in var.log_c.iter().zip(&log_d).enumerate() {
            w.push(vec![(i + 1).into(), (*c).into(), (*d).into()]);
        }
        tables.push(w);
        json["log_d"] = json!(log_d);
        if shift.is_mixing() {
            let ext = cfg.extension()?;
            let rep = ext.trivial_connectors(8, false).map_err(|e| e.at("[cocycle]"))?;
            json["connectors"] = to_value(&rep);
        }
    }
    Ok(TaskOutput::ok(json, tables))
}
