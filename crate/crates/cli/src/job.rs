//! Job specifications and the command runner.
//!
//! Every invocation — flag-driven or `--json` — is normalized into a
//! [`JobSpec`], validated strictly (unknown fields are errors), and
//! executed by [`run`], which returns the output document together with
//! the machine-readable exit code: 0 success, 2 domain violation, 3
//! precision/convergence failure, 4 schema error.

use std::sync::Arc;

use perikos_core::actions::{
    act_gl, act_j, act_weil, commute_check, ActionError, Deformation, ODElem, TowerPoint,
};
use perikos_core::ff_curve::{
    fundamental_domain, global_point, hecke_validate, kappa, pdiv_bundle_classes, AdicPoint,
    FfError, GlobalError, HeckeError, PointTag,
};
use perikos_core::formal_groups::{gh_deformation_law, DeformationParams, FormalGroupLaw};
use perikos_core::isocrystals::{kottwitz_enumerate, IsoError, Isocrystal};
use perikos_core::matrix::Mat;
use perikos_core::parith::{ArithError, Coeff, FqElem, Padic, WittElem, WittRing};
use perikos_core::period_map::{period_point, PeriodError, RigidPoint};
use perikos_core::Rat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dto::*;

pub const SCHEMA_VERSION: &str = "1";

/// Exit-code classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input document.
    Schema,
    /// Mathematically valid input outside an operation's domain.
    Domain,
    /// Precision or convergence failure.
    Precision,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Schema => 4,
            ErrorKind::Domain => 2,
            ErrorKind::Precision => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ErrorKind::Schema => "schema",
            ErrorKind::Domain => "domain",
            ErrorKind::Precision => "precision",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    fn schema<S: Into<String>>(msg: S) -> Self {
        CliError {
            kind: ErrorKind::Schema,
            message: msg.into(),
        }
    }
}

fn map_arith(e: &ArithError) -> ErrorKind {
    match e {
        ArithError::PrecisionExhausted { .. } | ArithError::ExponentOverflow => {
            ErrorKind::Precision
        }
        ArithError::DivisionByZero | ArithError::NonUnit { .. } => ErrorKind::Domain,
        _ => ErrorKind::Schema,
    }
}

impl From<ArithError> for CliError {
    fn from(e: ArithError) -> Self {
        CliError {
            kind: map_arith(&e),
            message: e.to_string(),
        }
    }
}

impl From<PeriodError> for CliError {
    fn from(e: PeriodError) -> Self {
        let kind = match &e {
            PeriodError::RadiusViolation { .. } | PeriodError::NotAPoint => ErrorKind::Domain,
            PeriodError::NonConvergence { .. } | PeriodError::PrecisionBudget { .. } => {
                ErrorKind::Precision
            }
            PeriodError::Arith(a) => map_arith(a),
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<IsoError> for CliError {
    fn from(e: IsoError) -> Self {
        let kind = match &e {
            IsoError::IndeterminateValuation { .. } => ErrorKind::Precision,
            IsoError::Singular => ErrorKind::Domain,
            IsoError::InvalidSlopeData(_) => ErrorKind::Schema,
            IsoError::Arith(a) => map_arith(a),
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<FfError> for CliError {
    fn from(e: FfError) -> Self {
        let kind = match &e {
            FfError::NonAnalyticPoint | FfError::NotYPoint => ErrorKind::Domain,
            FfError::InvalidRadius(_) | FfError::InvalidBundle(_) => ErrorKind::Schema,
            FfError::Arith(a) => map_arith(a),
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<ActionError> for CliError {
    fn from(e: ActionError) -> Self {
        let kind = match &e {
            ActionError::NonUnit | ActionError::Singular => ErrorKind::Domain,
            ActionError::Arith(a) => map_arith(a),
            ActionError::Ff(f) => return CliError::from(f.clone()),
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<GlobalError> for CliError {
    fn from(e: GlobalError) -> Self {
        match e {
            GlobalError::Period(p) => p.into(),
            GlobalError::Hecke(h) => CliError {
                kind: ErrorKind::Domain,
                message: h.to_string(),
            },
        }
    }
}

/// Default precision block `(p, abs precision, trunc order)`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PrecJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
}

/// One validated invocation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<PrecJson>,
}

/// Resolved defaults: job block, then `PERIKOS_DEFAULT_PREC` (`P,ABS,ORDER`),
/// then built-ins.
#[derive(Debug, Clone, Copy)]
struct PrecBlock {
    p: Option<u64>,
    abs: i64,
    order: usize,
}

fn resolve_prec(job: &JobSpec) -> Result<PrecBlock, CliError> {
    let mut block = PrecBlock {
        p: None,
        abs: 10,
        order: 20,
    };
    if let Ok(env) = std::env::var("PERIKOS_DEFAULT_PREC") {
        let parts: Vec<&str> = env.split(',').collect();
        if parts.len() != 3 {
            return Err(CliError::schema(
                "PERIKOS_DEFAULT_PREC must be \"P,ABS,ORDER\"",
            ));
        }
        block.p = Some(
            parts[0]
                .trim()
                .parse()
                .map_err(|_| CliError::schema("bad prime in PERIKOS_DEFAULT_PREC"))?,
        );
        block.abs = parts[1]
            .trim()
            .parse()
            .map_err(|_| CliError::schema("bad abs precision in PERIKOS_DEFAULT_PREC"))?;
        block.order = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::schema("bad trunc order in PERIKOS_DEFAULT_PREC"))?;
    }
    if let Some(p) = &job.prec {
        if p.p.is_some() {
            block.p = p.p;
        }
        if let Some(abs) = p.abs {
            block.abs = abs;
        }
        if let Some(order) = p.order {
            block.order = order;
        }
    }
    Ok(block)
}

fn parse_params<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(|e| CliError::schema(e.to_string()))
}

fn require_prime(explicit: Option<u64>, block: &PrecBlock) -> Result<u64, CliError> {
    explicit
        .or(block.p)
        .ok_or_else(|| CliError::schema("no prime given (flag --p or precision block)"))
}

fn check_prime(p: u64) -> Result<u64, CliError> {
    let mut is_prime = p >= 2;
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            is_prime = false;
            break;
        }
        d += 1;
    }
    if !is_prime {
        return Err(CliError::schema(format!("{p} is not prime")));
    }
    Ok(p)
}

/// Run a job; returns the output document and the process exit code.
pub fn run(job: &JobSpec) -> (Value, i32) {
    match dispatch(job) {
        Ok((result, provenance)) => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "tool": {"name": "perikos", "version": env!("CARGO_PKG_VERSION")},
                "command": job.command,
                "inputs": {"params": job.params, "seed": job.seed, "prec": job.prec},
                "result": result,
                "provenance": provenance,
            });
            (doc, 0)
        }
        Err(e) => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "tool": {"name": "perikos", "version": env!("CARGO_PKG_VERSION")},
                "command": job.command,
                "inputs": {"params": job.params, "seed": job.seed, "prec": job.prec},
                "error": {"kind": e.kind.name(), "message": e.message},
            });
            (doc, e.kind.exit_code())
        }
    }
}

fn dispatch(job: &JobSpec) -> Result<(Value, Value), CliError> {
    match job.command.as_str() {
        "fgl-check" => cmd_fgl_check(job),
        "period-eval" => cmd_period_eval(job),
        "global-eval" => cmd_global_eval(job),
        "newton" => cmd_newton(job),
        "kottwitz" => cmd_kottwitz(job),
        "bundles" => cmd_bundles(job),
        "kappa" => cmd_kappa(job),
        "hecke-check" => cmd_hecke_check(job),
        "od-mul" => cmd_od_mul(job),
        "act" => cmd_act(job),
        "commute-check" => cmd_commute_check(job),
        other => Err(CliError::schema(format!("unknown command {other:?}"))),
    }
}

// ---------------------------------------------------------------- fgl-check

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FglCheckParams {
    #[serde(default)]
    h: Option<u32>,
    #[serde(default)]
    p: Option<u64>,
    #[serde(default)]
    u: Option<Vec<i64>>,
    #[serde(default)]
    order: Option<usize>,
    #[serde(default)]
    prec: Option<i64>,
    /// "full" (default for small orders) or "sampled".
    #[serde(default)]
    assoc: Option<String>,
    /// Check a serialized bivariate law instead of building one.
    #[serde(default)]
    fgl: Option<SeriesJson>,
    #[serde(default)]
    h_max: Option<u32>,
}

fn cmd_fgl_check(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let block = resolve_prec(job)?;
    let params: FglCheckParams = parse_params(&job.params)?;
    let order = params.order.unwrap_or(block.order).max(2);
    let prec = params.prec.unwrap_or(block.abs).max(2);
    let h_max = params.h_max.unwrap_or(3);

    let (law, p, built): (FormalGroupLaw<Padic>, u64, bool) = match &params.fgl {
        Some(series) => {
            let s = series.to_core().map_err(CliError::schema)?;
            let p = check_prime(series.coeff_ring.prime)?;
            (
                FormalGroupLaw::from_series(s).map_err(CliError::from)?,
                p,
                false,
            )
        }
        None => {
            let h = params
                .h
                .ok_or_else(|| CliError::schema("fgl-check needs --h (or an fgl document)"))?;
            let p = check_prime(require_prime(params.p, &block)?)?;
            let u_ints = params.u.clone().unwrap_or_default();
            if u_ints.len() != (h.saturating_sub(1)) as usize {
                return Err(CliError::schema(format!(
                    "height {h} needs {} u-values, got {}",
                    h.saturating_sub(1),
                    u_ints.len()
                )));
            }
            // budget: one division by p per log coefficient, plus the
            // exponential's denominators of order trunc/(p-1)
            let mut depth = 0usize;
            let mut e = p as u128;
            let log_order = order.max((p as usize).pow(h_max) + 2);
            while e < log_order as u128 {
                depth += 1;
                e = e.saturating_mul(p as u128);
            }
            let budget = prec + depth as i64 + 2 * log_order as i64 / (p as i64 - 1).max(1) + 8;
            let u: Vec<Padic> = u_ints
                .iter()
                .map(|&v| Padic::from_integer(p, v, budget))
                .collect();
            let dp = DeformationParams::new(h, u).map_err(CliError::from)?;
            let one = Padic::one(p, budget);
            (
                gh_deformation_law(&dp, &one, order, log_order).map_err(CliError::from)?,
                p,
                true,
            )
        }
    };

    let unit_ok = law.check_unit().map_err(CliError::from)?;
    let comm_ok = law.check_comm().map_err(CliError::from)?;
    let assoc_mode = params
        .assoc
        .clone()
        .unwrap_or_else(|| if law.trunc_order() <= 24 { "full" } else { "sampled" }.into());
    let assoc_ok = match assoc_mode.as_str() {
        "full" => law.check_assoc().map_err(CliError::from)?,
        "sampled" => {
            let seed = job.seed.unwrap_or(0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<(Padic, Padic, Padic)> = (0..8)
                .map(|_| {
                    let mut v = || {
                        Padic::from_integer(p, rng.gen_range(1..1000), prec + 4).mul_p_pow(1)
                    };
                    (v(), v(), v())
                })
                .collect();
            law.check_assoc_at(&samples).map_err(CliError::from)?
        }
        other => {
            return Err(CliError::schema(format!(
                "assoc must be \"full\" or \"sampled\", got {other:?}"
            )))
        }
    };
    let log_ok = law.check_log_additivity().map_err(CliError::from)?;
    let height = if built || law.log().is_some() {
        Some(HeightJson::from_core(
            law.height_mod_p(h_max).map_err(CliError::from)?,
        ))
    } else {
        match law.height_mod_p(h_max) {
            Ok(h) => Some(HeightJson::from_core(h)),
            Err(_) => None, // truncation too small to see the height
        }
    };

    let result = json!({
        "unit_ok": unit_ok,
        "comm_ok": comm_ok,
        "assoc_ok": assoc_ok,
        "assoc_mode": assoc_mode,
        "log_additivity_ok": log_ok,
        "height": height,
        "all_ok": unit_ok && comm_ok && assoc_ok && log_ok,
    });
    let provenance = json!({
        "trunc_order": law.trunc_order(),
        "coefficient_precision": prec,
        "seed": job.seed,
    });
    Ok((result, provenance))
}

// -------------------------------------------------------------- period-eval

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PeriodEvalParams {
    h: u32,
    #[serde(default)]
    p: Option<u64>,
    #[serde(default)]
    u: Option<Vec<i64>>,
    #[serde(default)]
    prec: Option<i64>,
}

fn build_rigid_point(
    h: u32,
    p: u64,
    u_ints: &[i64],
    target: i64,
) -> Result<RigidPoint<Padic>, CliError> {
    // enough budget for the adaptive driver's deepest stage
    let budget = target + 33 * h as i64 + 4;
    let u: Vec<Padic> = u_ints
        .iter()
        .map(|&v| Padic::from_integer(p, v, budget))
        .collect();
    RigidPoint::new(h, u, Padic::one(p, budget)).map_err(CliError::from)
}

fn cmd_period_eval(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let block = resolve_prec(job)?;
    let params: PeriodEvalParams = parse_params(&job.params)?;
    let p = check_prime(require_prime(params.p, &block)?)?;
    let target = params.prec.unwrap_or(block.abs).max(1);
    let u_ints = params.u.clone().unwrap_or_default();
    if u_ints.len() != (params.h.saturating_sub(1)) as usize {
        return Err(CliError::schema(format!(
            "height {} needs {} u-values, got {}",
            params.h,
            params.h.saturating_sub(1),
            u_ints.len()
        )));
    }
    let x = build_rigid_point(params.h, p, &u_ints, target)?;
    let out = period_point(&x, target).map_err(CliError::from)?;
    let result = json!({
        "point": ProjPointJson::from_core(&out.point),
    });
    let provenance = json!({
        "target_precision": target,
        "achieved_precision": out.achieved_prec,
        "n_max_used": out.n_max_used,
        "input_budget": x.budget(),
    });
    Ok((result, provenance))
}

// -------------------------------------------------------------- global-eval

fn cmd_global_eval(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let block = resolve_prec(job)?;
    let params: PeriodEvalParams = parse_params(&job.params)?;
    let p = check_prime(require_prime(params.p, &block)?)?;
    let target = params.prec.unwrap_or(block.abs).max(1);
    let u_ints = params.u.clone().unwrap_or_default();
    if u_ints.len() != (params.h.saturating_sub(1)) as usize {
        return Err(CliError::schema(format!(
            "height {} needs {} u-values, got {}",
            params.h,
            params.h.saturating_sub(1),
            u_ints.len()
        )));
    }
    let x = build_rigid_point(params.h, p, &u_ints, target)?;
    let g = global_point(&x, target).map_err(CliError::from)?;
    let result = json!({
        "triple": TripleJson::from_core(&g.triple),
        "base_class": bundle_to_json(&g.base),
        "fiber": {
            "base_class": bundle_to_json(&g.fiber.base),
            "projective_dimension": g.fiber.fiber_dim,
        },
        "point": ProjPointJson::from_core(&g.point),
    });
    let provenance = json!({
        "target_precision": target,
        "n_max_used": g.n_max_used,
        "input_budget": x.budget(),
    });
    Ok((result, provenance))
}

// ------------------------------------------------------------------- newton

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewtonParams {
    #[serde(default)]
    p: Option<u64>,
    #[serde(default)]
    m: Option<u32>,
    #[serde(default)]
    prec: Option<i64>,
    entries: Vec<Vec<WittEntryJson>>,
}

fn cmd_newton(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let block = resolve_prec(job)?;
    let params: NewtonParams = parse_params(&job.params)?;
    let p = check_prime(require_prime(params.p, &block)?)?;
    let m = params.m.unwrap_or(1);
    let prec = params.prec.unwrap_or(block.abs).max(2);
    let ring = WittRing::new(p, m, prec + 6).map_err(CliError::from)?;
    let mat = MatrixJson {
        entries: params.entries.clone(),
    }
    .to_core(&ring, prec)
    .map_err(CliError::schema)?;
    let iso = Isocrystal::new(ring, mat).map_err(CliError::from)?;
    let polygon = iso.newton_polygon().map_err(CliError::from)?;
    let result = json!({
        "slopes": slope_data_to_json(&polygon),
        "rank": polygon.rank(),
        "degree": polygon.degree(),
    });
    let provenance = json!({"precision": prec, "m": m});
    Ok((result, provenance))
}

// ----------------------------------------------------------------- kottwitz

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KottwitzParams {
    h: u32,
    d: i64,
    #[serde(default)]
    lo: Option<RatJson>,
    #[serde(default)]
    hi: Option<RatJson>,
}

fn cmd_kottwitz(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let params: KottwitzParams = parse_params(&job.params)?;
    if params.h < 1 {
        return Err(CliError::schema("kottwitz needs h >= 1"));
    }
    let lo = match params.lo {
        Some(r) => rat_from_json(r).map_err(CliError::schema)?,
        None => Rat::from_integer(0),
    };
    let hi = match params.hi {
        Some(r) => rat_from_json(r).map_err(CliError::schema)?,
        None => Rat::from_integer(1),
    };
    let classes = kottwitz_enumerate(params.h, params.d, lo, hi);
    let result = json!({
        "count": classes.len(),
        "classes": classes.iter().map(KottwitzClassJson::from_core).collect::<Vec<_>>(),
    });
    let provenance = json!({
        "lo": rat_to_json(lo),
        "hi": rat_to_json(hi),
    });
    Ok((result, provenance))
}

// ------------------------------------------------------------------ bundles

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundlesParams {
    h: u32,
}

fn cmd_bundles(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let params: BundlesParams = parse_params(&job.params)?;
    if params.h < 1 {
        return Err(CliError::schema("bundles needs h >= 1"));
    }
    let classes = pdiv_bundle_classes(params.h);
    let result = json!({
        "count": classes.len(),
        "classes": classes.iter().map(bundle_to_json).collect::<Vec<_>>(),
        "display": classes.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    });
    Ok((result, json!({})))
}

// -------------------------------------------------------------------- kappa

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KappaParams {
    #[serde(default)]
    p: Option<u64>,
    log_p: ExtRatJson,
    log_w: ExtRatJson,
}

fn cmd_kappa(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let block = resolve_prec(job)?;
    let params: KappaParams = parse_params(&job.params)?;
    let p = check_prime(require_prime(params.p, &block)?)?;
    let point = AdicPointJson {
        log_p: params.log_p.clone(),
        log_w: params.log_w.clone(),
    }
    .to_core(p)
    .map_err(CliError::schema)?;
    let k = kappa(&point).map_err(CliError::from)?;
    let tag = match point.tag() {
        PointTag::Y => "Y",
        PointTag::PAxis => "p-axis",
        PointTag::WAxis => "w-axis",
        PointTag::Xk => "x_k",
    };
    let fundamental = if point.tag() == PointTag::Y {
        let (rep, n) = fundamental_domain(&point).map_err(CliError::from)?;
        json!({
            "representative": AdicPointJson::from_core(&rep),
            "kappa": ExtRatJson::from_core(kappa(&rep).map_err(CliError::from)?),
            "frobenius_steps": n,
        })
    } else {
        Value::Null
    };
    let result = json!({
        "kappa": ExtRatJson::from_core(k),
        "tag": tag,
        "fundamental_domain": fundamental,
    });
    Ok((result, json!({})))
}

// -------------------------------------------------------------- hecke-check

fn cmd_hecke_check(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let params: TripleJson = parse_params(&job.params)?;
    let triple = params.to_core().map_err(CliError::schema)?;
    let (valid, error_kind, message) = match hecke_validate(&triple) {
        Ok(_) => (true, Value::Null, Value::Null),
        Err(e) => {
            let kind = match e {
                HeckeError::RankMismatch { .. } => "rank_mismatch",
                HeckeError::DegreeLengthMismatch { .. } => "degree_length_mismatch",
            };
            (false, json!(kind), json!(e.to_string()))
        }
    };
    let result = json!({
        "valid": valid,
        "error_kind": error_kind,
        "message": message,
        "rank_e": triple.leg_e().rank(),
        "rank_f": triple.leg_f().rank(),
        "deg_e": triple.leg_e().degree(),
        "deg_f": triple.leg_f().degree(),
        "length": triple.length,
    });
    Ok((result, json!({})))
}

// ------------------------------------------------------------------- od-mul

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OdMulParams {
    #[serde(default)]
    p: Option<u64>,
    h: u32,
    #[serde(default)]
    prec: Option<i64>,
    a: ODElemJson,
    b: ODElemJson,
}

fn cmd_od_mul(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let block = resolve_prec(job)?;
    let params: OdMulParams = parse_params(&job.params)?;
    let p = check_prime(require_prime(params.p, &block)?)?;
    let prec = params.prec.unwrap_or(block.abs).max(2);
    let ring = WittRing::new(p, params.h, prec + 4).map_err(CliError::from)?;
    let a = params.a.to_core(&ring, prec).map_err(CliError::schema)?;
    let b = params.b.to_core(&ring, prec).map_err(CliError::schema)?;
    let prod = a.mul(&b).map_err(CliError::from)?;
    let result = json!({
        "product": ODElemJson::from_core(&prod),
        "a_is_unit": a.is_unit(),
        "b_is_unit": b.is_unit(),
    });
    Ok((result, json!({"precision": prec})))
}

// ----------------------------------------------------------------------- act

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActParams {
    #[serde(default)]
    p: Option<u64>,
    h: u32,
    #[serde(default)]
    prec: Option<i64>,
    action: String,
    point: TowerPointJson,
    #[serde(default)]
    s: Option<ODElemJson>,
    #[serde(default)]
    g: Option<MatrixJson>,
    #[serde(default)]
    w: Option<WeilJson>,
}

fn cmd_act(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let block = resolve_prec(job)?;
    let params: ActParams = parse_params(&job.params)?;
    let p = check_prime(require_prime(params.p, &block)?)?;
    let prec = params.prec.unwrap_or(block.abs).max(2);
    let ring = WittRing::new(p, params.h, prec + 4).map_err(CliError::from)?;
    let point = params.point.to_core(&ring, prec).map_err(CliError::schema)?;
    let moved: TowerPoint = match params.action.as_str() {
        "j" => {
            let s = params
                .s
                .as_ref()
                .ok_or_else(|| CliError::schema("action \"j\" needs operand s"))?
                .to_core(&ring, prec)
                .map_err(CliError::schema)?;
            act_j(&s, &point).map_err(CliError::from)?
        }
        "gl" => {
            let g = params
                .g
                .as_ref()
                .ok_or_else(|| CliError::schema("action \"gl\" needs operand g"))?
                .to_core(&ring, prec)
                .map_err(CliError::schema)?;
            act_gl(&g, &point).map_err(CliError::from)?
        }
        "weil" => {
            let w = params
                .w
                .as_ref()
                .ok_or_else(|| CliError::schema("action \"weil\" needs operand w"))?
                .to_core();
            act_weil(&w, &point).map_err(CliError::from)?
        }
        other => {
            return Err(CliError::schema(format!(
                "action must be \"j\", \"gl\", or \"weil\", got {other:?}"
            )))
        }
    };
    let result = json!({
        "point": TowerPointJson::from_core(&moved).map_err(CliError::schema)?,
    });
    Ok((result, json!({"precision": prec})))
}

// ------------------------------------------------------------ commute-check

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommuteCheckParams {
    #[serde(default)]
    p: Option<u64>,
    h: u32,
    #[serde(default)]
    prec: Option<i64>,
    #[serde(default)]
    trials: Option<u32>,
}

fn random_fq(rng: &mut ChaCha8Rng, ring: &Arc<WittRing>) -> FqElem {
    let m = ring.m() as usize;
    let coeffs: Vec<u64> = (0..m).map(|_| rng.gen_range(0..ring.p())).collect();
    FqElem::new(ring.fq().clone(), coeffs).unwrap()
}

fn random_witt(rng: &mut ChaCha8Rng, ring: &Arc<WittRing>, prec: i64) -> WittElem {
    let val = rng.gen_range(-1..2);
    let digits: Vec<FqElem> = (0..prec as usize).map(|_| random_fq(rng, ring)).collect();
    WittElem::from_teich_digits(ring.clone(), val, &digits, val + prec).unwrap()
}

fn random_unit_od(rng: &mut ChaCha8Rng, ring: &Arc<WittRing>, prec: i64) -> ODElem {
    loop {
        let h = ring.m() as usize;
        let coeffs: Vec<WittElem> = (0..h)
            .map(|_| {
                let val = rng.gen_range(0..2);
                let digits: Vec<FqElem> =
                    (0..prec as usize).map(|_| random_fq(rng, ring)).collect();
                WittElem::from_teich_digits(ring.clone(), val, &digits, val + prec).unwrap()
            })
            .collect();
        let s = ODElem::new(ring.clone(), coeffs).unwrap();
        if s.is_unit() {
            return s;
        }
    }
}

fn random_invertible_mat(rng: &mut ChaCha8Rng, ring: &Arc<WittRing>, prec: i64) -> Mat<WittElem> {
    let h = ring.m() as usize;
    loop {
        let entries: Vec<WittElem> = (0..h * h).map(|_| random_witt(rng, ring, prec)).collect();
        let m = Mat::new(h, entries).unwrap();
        if let Ok(det) = m.det() {
            if !det.is_zero() {
                return m;
            }
        }
    }
}

fn random_tower_point(rng: &mut ChaCha8Rng, ring: &Arc<WittRing>, prec: i64) -> TowerPoint {
    TowerPoint::new(
        ring.clone(),
        Deformation::symbolic("G"),
        random_invertible_mat(rng, ring, prec),
        random_invertible_mat(rng, ring, prec),
        Some(AdicPoint::untilt(ring.p())),
    )
    .expect("random matrices are invertible by construction")
}

fn cmd_commute_check(job: &JobSpec) -> Result<(Value, Value), CliError> {
    let block = resolve_prec(job)?;
    let params: CommuteCheckParams = parse_params(&job.params)?;
    let p = check_prime(require_prime(params.p, &block)?)?;
    if params.h < 2 {
        return Err(CliError::schema("commute-check needs h >= 2"));
    }
    let prec = params.prec.unwrap_or(block.abs).max(4);
    let trials = params.trials.unwrap_or(100);
    let seed = job.seed.unwrap_or(0);
    let ring = WittRing::new(p, params.h, prec + 4).map_err(CliError::from)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0u32;
    for _ in 0..trials {
        let s = random_unit_od(&mut rng, &ring, prec);
        let g = random_invertible_mat(&mut rng, &ring, prec);
        let x = random_tower_point(&mut rng, &ring, prec);
        if !commute_check(&s, &g, &x).map_err(CliError::from)? {
            failures += 1;
        }
    }
    let result = json!({
        "trials": trials,
        "failures": failures,
        "all_commute": failures == 0,
    });
    let provenance = json!({"seed": seed, "precision": prec});
    Ok((result, provenance))
}
