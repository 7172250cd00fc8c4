//! One function per subcommand, each returning a [`Report`].

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Value};

use qmx_core::depth1::{self, KFn, Variant};
use qmx_core::extremal::{numax_and_form, ExtremalConfig};
use qmx_core::par::Execution;
use qmx_core::qmpoly::dim_report;
use qmx_core::rational::{self, frac, int};
use qmx_core::scan::{self, CellStatus};
use qmx_core::verify;
use qmx_core::{leech, wronskian, QMPoly, QmxError, Rational, Result};

use crate::config::Config;
use crate::output::{code, opt, Report};
use crate::{Cli, Command, Depth1Args, Depth1Check, GridArgs};

pub fn error_code(e: &QmxError) -> i32 {
    match e {
        _ if e.is_precision() => code::PRECISION,
        QmxError::Parse(_) | QmxError::OutOfRange(_) | QmxError::NotHomogeneous | QmxError::EmptySpace { .. } => {
            code::USAGE
        }
        _ => code::CHECK_FAILED,
    }
}

struct Ctx {
    config: Config,
    prec: Option<usize>,
    exec: Execution,
}

impl Ctx {
    fn prec(&self, default: usize) -> usize {
        self.prec.or(self.config.prec).unwrap_or(default)
    }

    fn extremal(&self) -> ExtremalConfig {
        let mut c = ExtremalConfig::default();
        if let Some(m) = self.config.max_q_prec {
            c.max_q_prec = m;
        }
        c
    }

    fn cells(&self, g: &GridArgs, l_min: u32, l_max: u32, w_max: i64) -> Vec<(u32, i64)> {
        let (lo, hi) = match g.l {
            Some(l) => (l, l),
            None => (g.l_min.unwrap_or(l_min), g.l_max.or(self.config.scan.l_max).unwrap_or(l_max)),
        };
        match g.w {
            Some(w) => (lo..=hi).map(|l| (l, w)).collect(),
            None => scan::grid(lo..=hi, g.w_max.or(self.config.scan.w_max).unwrap_or(w_max)),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let ctx = Ctx { config, prec: cli.prec, exec };
    match &cli.command {
        Command::Expand { form } => expand(&ctx, form),
        Command::Dims(g) => dims(&ctx, g),
        Command::Extremal { l, w, terms } => extremal(&ctx, *l, *w, *terms),
        Command::ScanExtremal(g) => scan_extremal(&ctx, g),
        Command::Wronskian { form, l, w } => wronskian_cmd(&ctx, form.as_deref(), *l, *w),
        Command::Depth1(a) => depth1_cmd(&ctx, a),
        Command::Leech { a_max } => leech_cmd(&ctx, *a_max),
        Command::ScanIntegrality { grid, conjecture1 } => scan_integrality(&ctx, grid, *conjecture1),
        Command::Verify { profile, only, tamper_mu, report, list } => {
            verify_cmd(&ctx, profile.as_deref(), only, *tamper_mu, report.as_deref(), *list)
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn r2s(r: &Rational) -> String {
    rational::to_string(r)
}

fn expand(ctx: &Ctx, form: &str) -> Result<Report> {
    let f: QMPoly = form.parse()?;
    let n = ctx.prec(20);
    let s = f.expand(n);
    let coeffs: Vec<String> = (0..n as i64).map(|i| r2s(&s.q_coeff(i))).collect();
    let mut r = Report::new(
        json!({
            "form": f.to_string(),
            "weight": f.weight().ok().flatten(),
            "depth": f.depth(),
            "q_prec": n,
            "coefficients": coeffs,
        }),
        &["n", "coefficient"],
    );
    r.note(format!("{f}  (weight {}, depth {})", opt(f.weight().ok().flatten()), opt(f.depth())));
    for (i, c) in coeffs.into_iter().enumerate() {
        r.row(vec![i.to_string(), c]);
    }
    Ok(r)
}

fn dims(ctx: &Ctx, g: &GridArgs) -> Result<Report> {
    let cells = ctx.cells(g, 0, 4, 24);
    let rows: Vec<_> = cells.iter().map(|&(l, w)| dim_report(l, w)).collect();
    let mut r = Report::new(to_json(&rows), &["l", "w", "delta", "d", "kappa_w", "kappa_stable"]);
    for d in &rows {
        r.row(vec![
            d.l.to_string(),
            d.w.to_string(),
            d.delta.to_string(),
            d.d.to_string(),
            d.kappa_w.to_string(),
            d.kappa_stable.to_string(),
        ]);
    }
    Ok(r)
}

fn extremal(ctx: &Ctx, l: u32, w: i64, terms: Option<usize>) -> Result<Report> {
    let e = numax_and_form(l, w, &ctx.extremal())?;
    let n = terms.unwrap_or(e.nu as usize + 10);
    let s = e.expansion_to(n);
    let coeffs: Vec<String> = (0..n as i64).map(|i| r2s(&s.q_coeff(i))).collect();
    let mut r = Report::new(
        json!({
            "l": l,
            "w": w,
            "nu": e.nu,
            "delta": e.delta,
            "kappa": e.kappa,
            "meets_dimension_bound": e.meets_dimension_bound,
            "algebraically_extremal": e.algebraically_extremal,
            "depth_actual": e.depth_actual,
            "no_form_of_exact_depth": e.no_form_of_exact_depth,
            "form": e.form_poly,
            "form_text": e.form_poly.to_string(),
            "certificate": e.certificate,
            "coefficients": coeffs,
        }),
        &["n", "coefficient"],
    );
    r.note(format!("f_{{{l},{w}}} = {}", e.form_poly));
    r.note(format!(
        "nu = {}, delta = {}, kappa = {}, nu = delta - 1: {}, depth {}",
        e.nu, e.delta, e.kappa, e.meets_dimension_bound, e.depth_actual
    ));
    for (i, c) in coeffs.into_iter().enumerate() {
        r.row(vec![i.to_string(), c]);
    }
    Ok(r)
}

fn status_code(s: CellStatus) -> i32 {
    match s {
        CellStatus::Failed => code::CHECK_FAILED,
        CellStatus::PrecisionExhausted => code::PRECISION,
        _ => code::OK,
    }
}

fn snake<T: serde::Serialize>(v: &T) -> String {
    to_json(v).as_str().unwrap_or_default().to_string()
}

fn scan_extremal(ctx: &Ctx, g: &GridArgs) -> Result<Report> {
    let cells = ctx.cells(g, 0, 4, 60);
    let rows = scan::scan_extremal(&cells, &ctx.extremal(), ctx.exec);
    let mut r = Report::new(
        to_json(&rows),
        &["l", "w", "status", "nu", "delta", "kappa", "lower_ok", "upper_ok", "nu_eq_delta_minus_1", "prec_used"],
    );
    for x in &rows {
        r.escalate(status_code(x.status));
        if x.status == CellStatus::Observed && !(x.lower_bound_ok && x.upper_bound_ok) {
            r.escalate(code::CHECK_FAILED);
        }
        r.row(vec![
            x.l.to_string(),
            x.w.to_string(),
            snake(&x.status),
            opt(x.nu),
            x.delta.to_string(),
            x.kappa.to_string(),
            x.lower_bound_ok.to_string(),
            x.upper_bound_ok.to_string(),
            x.meets_dimension_bound.to_string(),
            x.prec_used.to_string(),
        ]);
    }
    Ok(r)
}

fn wronskian_cmd(ctx: &Ctx, form: Option<&str>, l: Option<u32>, w: Option<i64>) -> Result<Report> {
    let q_prec = ctx.prec(30);
    if let Some(form) = form {
        let f: QMPoly = form.parse()?;
        if !f.is_homogeneous() {
            return Err(QmxError::NotHomogeneous);
        }
        let l = l.or(f.depth()).unwrap_or(0);
        let wr = wronskian::wronskian(&f, l)?;
        let nu_f = f.expand(q_prec).q_valuation()?;
        let nu_w = wronskian::valuation(&wr, q_prec)?;
        let mut r = Report::new(
            json!({
                "form": f.to_string(),
                "l": l,
                "wronskian": wr,
                "wronskian_text": wr.to_string(),
                "weight": wr.weight()?,
                "nu_form": nu_f.to_string(),
                "nu_wronskian": nu_w.to_string(),
            }),
            &["quantity", "value"],
        );
        r.row(vec!["wronskian".into(), wr.to_string()]);
        r.row(vec!["weight".into(), opt(wr.weight()?)]);
        r.row(vec!["nu(f)".into(), nu_f.to_string()]);
        r.row(vec!["nu(W)".into(), nu_w.to_string()]);
        return Ok(r);
    }
    let (l, w) = (l.unwrap_or(1), w.expect("clap requires --w without --form"));
    let c = wronskian::multiplicity_certificate(l, w, &ctx.extremal())?;
    let mut r = Report::new(to_json(&c), &["l", "w", "nu_f", "nu_wronskian", "modular_bound", "chain_holds"]);
    r.note(format!("W(F_f) = {}", c.wronskian));
    r.row(vec![
        l.to_string(),
        w.to_string(),
        c.nu_f.to_string(),
        c.nu_wronskian.to_string(),
        c.modular_bound.to_string(),
        c.chain_holds.to_string(),
    ]);
    if !c.chain_holds {
        r.escalate(code::CHECK_FAILED);
    }
    Ok(r)
}

fn k_values(ctx: &Ctx, a: &Depth1Args) -> Result<Vec<Rational>> {
    if !a.k.is_empty() {
        return a.k.iter().map(|s| rational::parse(s)).collect();
    }
    if let Some(ks) = ctx.config.k_samples()? {
        return Ok(ks);
    }
    Ok(depth1::k_samples(a.samples, a.seed))
}

fn tampered(k: &Rational) -> Result<Rational> {
    Ok(depth1::mu(k)? * frac(1001, 1000))
}

fn identity_rows(r: &mut Report, reports: &[depth1::IdentityReport], extra: &str) {
    for x in reports {
        if !x.ok() {
            r.escalate(code::CHECK_FAILED);
        }
        r.row(vec![
            x.name.clone(),
            extra.to_string(),
            x.k.clone(),
            x.trials.to_string(),
            x.passed.to_string(),
            x.checked_u_prec.to_string(),
            x.ok().to_string(),
        ]);
    }
}

fn depth1_cmd(ctx: &Ctx, a: &Depth1Args) -> Result<Report> {
    let variant = if a.printed { Variant::AsPrinted } else { Variant::Corrected };
    let ok_cell = |r: &mut Report, ok: bool| {
        if !ok {
            r.escalate(code::CHECK_FAILED);
        }
        ok.to_string()
    };
    match a.check {
        Depth1Check::Ode => {
            let prec = ctx.prec(40);
            let k_max = a.max.unwrap_or(12);
            let rows: Vec<(i64, bool)> = (0..=k_max)
                .map(|k| Ok((k, depth1::ode_residual(k as u32, prec)?.is_zero())))
                .collect::<Result<_>>()?;
            let mut r = Report::new(json!({"q_prec": prec, "rows": rows}), &["k", "residual_zero"]);
            for (k, z) in rows {
                let c = ok_cell(&mut r, z);
                r.row(vec![k.to_string(), c]);
            }
            Ok(r)
        }
        Depth1Check::KkOde => {
            let prec = ctx.prec(40);
            let w_max = a.max.unwrap_or(72);
            let rows: Vec<(i64, bool)> = (0..=w_max)
                .step_by(6)
                .map(|w| Ok((w, depth1::kk_ode_residual(w, prec, &ctx.extremal())?.is_zero())))
                .collect::<Result<_>>()?;
            let mut r = Report::new(json!({"q_prec": prec, "rows": rows}), &["w", "residual_zero"]);
            for (w, z) in rows {
                let c = ok_cell(&mut r, z);
                r.row(vec![w.to_string(), c]);
            }
            Ok(r)
        }
        Depth1Check::Contiguity => {
            let prec = ctx.prec(60);
            let over: Option<&dyn Fn(&Rational) -> Result<Rational>> = if a.tamper_mu { Some(&tampered) } else { None };
            let rows = depth1::contiguity_agreement(a.max.unwrap_or(20) as u32, prec, over)?;
            let mut r = Report::new(to_json(&rows), &["i", "agrees", "checked_q_prec"]);
            for x in &rows {
                let c = ok_cell(&mut r, x.agrees);
                r.row(vec![x.i.to_string(), c, x.checked_q_prec.to_string()]);
            }
            Ok(r)
        }
        Depth1Check::Lax1 | Depth1Check::Lax2 | Depth1Check::Conjugation => {
            let prec = ctx.prec(30);
            let ks = k_values(ctx, a)?;
            let mut r = Report::new(Value::Null, &["identity", "mu", "k", "trials", "passed", "checked_u_prec", "ok"]);
            let mut all = Vec::new();
            let run = |f: &dyn Fn(&Rational, u64) -> Result<depth1::IdentityReport>| -> Result<Vec<_>> {
                ks.iter().enumerate().map(|(i, k)| f(k, a.seed + i as u64)).collect()
            };
            match a.check {
                Depth1Check::Lax1 => {
                    let v = run(&|k, s| depth1::lax_check_1(k, prec, a.trials, s, variant))?;
                    identity_rows(&mut r, &v, "");
                    all.extend(v);
                }
                Depth1Check::Conjugation => {
                    let v = run(&|k, s| depth1::conjugation_check(k, prec, a.trials, s))?;
                    identity_rows(&mut r, &v, "");
                    all.extend(v);
                }
                _ => {
                    let mu = if a.tamper_mu { KFn::mu().scale(&frac(1001, 1000)) } else { KFn::mu() };
                    let v = run(&|k, s| depth1::lax_check_2(k, &mu, prec, a.trials, s, variant))?;
                    identity_rows(&mut r, &v, "mu(k)");
                    all.extend(v);
                    let one = KFn::constant(int(1));
                    let v = run(&|k, s| depth1::lax_check_2(k, &one, prec, a.trials, s, variant))?;
                    identity_rows(&mut r, &v, "1");
                    all.extend(v);
                }
            }
            r.json = json!({"variant": variant, "truncation": prec, "reports": all});
            Ok(r)
        }
        Depth1Check::Eigen => {
            let prec = ctx.prec(30);
            let ks = k_values(ctx, a)?;
            let rows: Vec<_> = ks.iter().map(|k| depth1::eigen_check(k, prec, variant)).collect::<Result<_>>()?;
            let mut r = Report::new(json!({"variant": variant, "rows": rows}), &["k", "F(phi2)/phi2", "lambda", "k+1", "ok"]);
            for (k, x) in ks.iter().zip(&rows) {
                let c = ok_cell(&mut r, x.equals_k_plus_one(k));
                r.row(vec![x.k.clone(), opt(x.raw.clone()), opt(x.lambda.clone()), r2s(&(k + int(1))), c]);
            }
            Ok(r)
        }
        Depth1Check::Kernel => {
            let prec = ctx.prec(30);
            let ks = k_values(ctx, a)?;
            let mut r = Report::new(Value::Null, &["k", "E(phi1)=0", "E(phi2)=0", "G_mu(phi2)=0"]);
            let mut js = Vec::new();
            for k in &ks {
                let (p1, p2) = depth1::kernel_check(k, prec)?;
                let m = if a.tamper_mu { tampered(k)? } else { depth1::mu(k)? };
                let g = depth1::g_residual(k, &m, prec)?.is_zero();
                js.push(json!({"k": r2s(k), "e_phi1": p1, "e_phi2": p2, "g_phi2": g}));
                let cells = vec![r2s(k), ok_cell(&mut r, p1), ok_cell(&mut r, p2), ok_cell(&mut r, g)];
                r.row(cells);
            }
            r.json = Value::Array(js);
            Ok(r)
        }
        Depth1Check::Denoms => {
            let prec = ctx.prec(60);
            let k_max = a.max.unwrap_or(20).max(1) as u32;
            let rows: Vec<_> = (1..=k_max).map(|k| depth1::denominator_row(k, prec)).collect::<Result<_>>()?;
            let mut r = Report::new(to_json(&rows), &["k", "q_prec", "primes", "primes_below_6k", "g_nonnegative"]);
            for x in &rows {
                let a = ok_cell(&mut r, x.within_bound);
                let b = ok_cell(&mut r, x.g_nonnegative);
                r.row(vec![x.k.to_string(), x.q_prec.to_string(), x.primes.join(" "), a, b]);
            }
            Ok(r)
        }
    }
}

fn leech_cmd(ctx: &Ctx, a_max: usize) -> Result<Report> {
    let t = leech::divisibility_scan(a_max, &ctx.extremal())?;
    let mut r = Report::new(to_json(&t), &["a", "shell_size", "a_times_shell_over_393120"]);
    let big_a = BigInt::from(leech::A);
    for (a, l) in &t.shells {
        let l: BigInt = l.parse().map_err(|_| QmxError::Invariant(format!("shell {l}")))?;
        let q = if *a == 0 { BigInt::zero() } else { l.clone() * BigInt::from(*a) / &big_a };
        r.row(vec![a.to_string(), l.to_string(), q.to_string()]);
    }
    r.note(format!("393120 | a|L_a| for 1 <= a <= {a_max}: {}", t.divisibility_ok));
    for c in &t.finer_checks {
        r.note(format!("{}: {}", c.statement, c.holds));
    }
    r.note(format!(
        "f_{{1,14}} = D(theta)/393120: integral {}, non-negative {}, nu = {}, equals extremal solver: {}",
        t.f114_integral,
        t.f114_nonnegative,
        opt(t.f114_valuation),
        t.f114_matches_extremal
    ));
    let ok = t.divisibility_ok && t.f114_integral && t.f114_nonnegative && t.f114_matches_extremal && t.f114_valuation == Some(2);
    if !ok {
        r.escalate(code::CHECK_FAILED);
    }
    Ok(r)
}

fn scan_integrality(ctx: &Ctx, g: &GridArgs, conjecture1: bool) -> Result<Report> {
    let prec = ctx.prec(40);
    let header = [
        "l",
        "w",
        "status",
        "nu",
        "delta",
        "integral",
        "positive",
        "nonnegative",
        "max_denominator_prime",
        "primes_below_w",
        "prec_used",
    ];
    let row = |x: &scan::ScanRow| {
        vec![
            x.l.to_string(),
            x.w.to_string(),
            snake(&x.status),
            opt(x.nu),
            x.delta.to_string(),
            x.integral.to_string(),
            x.positive.to_string(),
            x.nonnegative.to_string(),
            opt(x.max_denominator_prime.clone()),
            x.primes_below_w.to_string(),
            x.prec_used.to_string(),
        ]
    };
    if conjecture1 {
        let l_max = g.l.or(g.l_max).or(ctx.config.scan.l_max).unwrap_or(4);
        let w_max = g.w_max.or(ctx.config.scan.w_max).unwrap_or(60);
        let c = scan::conjecture1_scan(l_max, w_max, prec, &ctx.extremal(), ctx.exec)?;
        let mut r = Report::new(to_json(&c), &header);
        r.note(format!(
            "{} cells checked, {} skipped, {} violations ({})",
            c.cells_checked,
            c.cells_skipped,
            c.violations.len(),
            c.label
        ));
        for v in &c.violations {
            r.note(format!("violation at (l={}, w={}): {}", v.l, v.w, v.what));
        }
        for x in &c.rows {
            r.escalate(status_code(x.status));
            r.row(row(x));
        }
        if !c.violations.is_empty() {
            r.escalate(code::CHECK_FAILED);
        }
        return Ok(r);
    }
    let cells = ctx.cells(g, 1, 6, 60);
    let rows = scan::scan_integrality(&cells, prec, &ctx.extremal(), ctx.exec);
    let label = format!("observed to q-precision {prec}; not a proof");
    let mut r = Report::new(json!({"label": label, "rows": rows}), &header);
    r.note(label);
    for x in &rows {
        r.escalate(status_code(x.status));
        r.row(row(x));
    }
    Ok(r)
}

fn verify_cmd(
    ctx: &Ctx,
    profile: Option<&str>,
    only: &[String],
    tamper_mu: bool,
    report: Option<&std::path::Path>,
    list: bool,
) -> Result<Report> {
    if list {
        let mut r = Report::new(Value::Null, &["id", "description"]);
        let all: Vec<_> = verify::checks().into_iter().chain(verify::printed_form_checks()).collect();
        r.json = Value::Array(all.iter().map(|(id, d, _)| json!({"id": id, "description": d})).collect());
        for (id, d, _) in all {
            r.row(vec![id.to_string(), d.to_string()]);
        }
        return Ok(r);
    }
    let known: Vec<&str> =
        verify::checks().iter().chain(verify::printed_form_checks().iter()).map(|c| c.0).collect();
    if let Some(bad) = only.iter().find(|o| !known.contains(&o.as_str())) {
        return Err(QmxError::Parse(format!("unknown check id {bad:?}")));
    }
    let mut p = ctx.config.profile(profile)?;
    p.tamper_mu |= tamper_mu;
    let v = verify::verify_all(&p, only, ctx.exec);
    let json = to_json(&v);
    if let Some(path) = report {
        let text = serde_json::to_string_pretty(&json).expect("serializable");
        std::fs::write(path, text).map_err(|e| QmxError::Parse(format!("{}: {e}", path.display())))?;
    }
    let mut r = Report::new(json, &["id", "status", "detail"]);
    r.note(format!(
        "profile {}: {} passed, {} failed, {} precision exhausted",
        p.name, v.passed, v.failed, v.precision_exhausted
    ));
    if v.precision_exhausted > 0 {
        r.note("increase precision (max_q_prec) for checks marked precision_exhausted");
    }
    for c in &v.results {
        r.row(vec![c.id.clone(), snake(&c.status), c.detail.clone()]);
    }
    r.code = v.exit_code();
    Ok(r)
}
