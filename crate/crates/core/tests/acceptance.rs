//! Acceptance suite: one PASS/FAIL line per criterion. Sizes and tolerances
//! are pinned below; all comparisons are exact, so the tolerance on every
//! coefficient comparison is zero.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qmx_core::depth1::{self, KFn, Variant};
use qmx_core::extremal::{diagonal_basis, numax_and_form, ExtremalConfig};
use qmx_core::leech;
use qmx_core::par::{self, Execution};
use qmx_core::qmpoly::{basis_monomials, delta_form, dim_qm, eisenstein, kappa, kappa_stable, Eisenstein};
use qmx_core::rational::{frac, int};
use qmx_core::scan::{self, CellStatus};
use qmx_core::wronskian::{self, ZQMPoly};
use qmx_core::{QMPoly, Rational, Result, USeries};

const EISENSTEIN_N: usize = 200;
const KAPPA_EXPECTED: [i64; 18] = [0, 0, 0, 0, 0, 1, 1, 2, 3, 4, 5, 7, 8, 10, 12, 14, 16, 19];
const KAPPA_W_MAX: i64 = 200;
const T1_W_MAX: i64 = 120;
const T3_W_MAX: i64 = 60;
const RANDOM_WRONSKIANS: usize = 30;
const ODE_K_MAX: u32 = 12;
const ODE_PREC: usize = 40;
const KK_W_MAX: i64 = 72;
const CONTIGUITY_I_MAX: u32 = 20;
const CONTIGUITY_PREC: usize = 60;
const K_SAMPLES: usize = 5;
const LAX_TRIALS: usize = 20;
const LAX_PREC: usize = 30;
const T2_K_MAX: u32 = 20;
const T2_PREC: usize = 60;
const LEECH_A_MAX: usize = 400;
const DIAG_W_MAX: i64 = 60;
const SCAN_L_MAX: u32 = 6;
const SCAN_W_MAX: i64 = 60;
const SCAN_PREC: usize = 40;
const SEED: u64 = 0x5eed_0001;

type Outcome = Result<(bool, String)>;

fn cfg() -> ExtremalConfig {
    ExtremalConfig::default()
}

fn sigma_brute(k: u32, n: usize) -> BigInt {
    (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(k)).sum()
}

fn c1_eisenstein() -> Outcome {
    for (which, k, c) in [(Eisenstein::E2, 1, -24), (Eisenstein::E4, 3, 240), (Eisenstein::E6, 5, -504)] {
        let s = eisenstein(which, EISENSTEIN_N + 1);
        if s.q_coeff(0) != int(1) {
            return Ok((false, format!("{which:?} constant term")));
        }
        for n in 1..=EISENSTEIN_N {
            let want = Rational::from_integer(sigma_brute(k, n) * c);
            if s.q_coeff(n as i64) != want {
                return Ok((false, format!("{which:?} coefficient of q^{n}")));
            }
        }
    }
    if delta_form().expand(EISENSTEIN_N + 1) != delta_product(EISENSTEIN_N + 1) {
        return Ok((false, "Delta differs from q prod (1 - q^n)^24".into()));
    }
    Ok((true, format!("E2, E4, E6 and Delta exact for n <= {EISENSTEIN_N}")))
}

fn c2_kappa() -> Outcome {
    let got: Vec<i64> = (0..18).map(kappa_stable).collect();
    if got != KAPPA_EXPECTED {
        return Ok((false, format!("kappa_0..17 = {got:?}")));
    }
    for l in 0..=4 {
        for w in (0..=KAPPA_W_MAX).step_by(2) {
            if kappa(l, w) != 0 {
                return Ok((false, format!("kappa_{l}({w}) = {}", kappa(l, w))));
            }
        }
    }
    Ok((true, format!("kappa_0..17 = {got:?}; kappa_l(w) = 0 for l <= 4, w <= {KAPPA_W_MAX}")))
}

fn c3_extremal_orders() -> Outcome {
    let mut cells = scan::grid(0..=4, T1_W_MAX);
    cells.extend(scan::grid(5..=8, T3_W_MAX));
    cells.retain(|&(l, w)| dim_qm(l, w) > 0);
    let rows = scan::scan_extremal(&cells, &cfg(), Execution::Parallel);
    let mut above = 0;
    for r in &rows {
        if r.status != CellStatus::Observed {
            return Ok((false, format!("(l={}, w={}) {:?}: {:?}", r.l, r.w, r.status, r.message)));
        }
        let ok = if r.l <= 4 { r.meets_dimension_bound } else { r.lower_bound_ok && r.upper_bound_ok };
        if !ok {
            return Ok((false, format!("(l={}, w={}): nu={:?}, delta={}, kappa={}", r.l, r.w, r.nu, r.delta, r.kappa)));
        }
        above += usize::from(!r.meets_dimension_bound);
    }
    Ok((true, format!("{} cells; {above} cells with l >= 5 strictly above delta - 1", rows.len())))
}

fn c4_wronskian() -> Outcome {
    let anchor = wronskian::wronskian(&QMPoly::e2(), 1)?;
    if anchor != ZQMPoly::constant(-&QMPoly::e4(), -1) {
        return Ok((false, format!("W(E2, 1) = {anchor}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut done = 0;
    while done < RANDOM_WRONSKIANS {
        let l = rng.gen_range(0..=4u32);
        let w = 2 * rng.gen_range(0..=10i64);
        let basis = basis_monomials(l, w);
        if basis.is_empty() {
            continue;
        }
        let mut f = QMPoly::zero();
        for m in basis {
            f.add_term(m, frac(rng.gen_range(-6..=6), rng.gen_range(1..=4)));
        }
        if f.is_zero() {
            continue;
        }
        let depth = f.depth().unwrap_or(0);
        done += 1;
        let wr = wronskian::wronskian(&f, depth)?;
        let c = wr.coeff(0);
        let homogeneous = wr.weight()? == Some((depth as i64 + 1) * w);
        let nu_f = f.expand(16).q_valuation()?;
        let nu_w = wronskian::valuation(&wr, 16)?;
        if !(wr.is_z_free() && c.is_e2_free() && homogeneous && nu_w >= nu_f) {
            return Ok((false, format!("f = {f}, l = {depth}: W = {wr}")));
        }
    }
    Ok((true, format!("W(E2, 1) = -E4 (2 pi i)^-1; {RANDOM_WRONSKIANS} random Wronskians modular with nu(W) >= nu(f)")))
}

fn c5_odes() -> Outcome {
    for k in 0..=ODE_K_MAX {
        let r = depth1::ode_residual(k, ODE_PREC)?;
        if !r.is_zero() {
            return Ok((false, format!("D^2 g_{k} residual {r}")));
        }
    }
    for w in (0..=KK_W_MAX).step_by(6) {
        let r = depth1::kk_ode_residual(w, ODE_PREC, &cfg())?;
        if !r.is_zero() {
            return Ok((false, format!("Kaneko-Koike residual at w = {w}: {r}")));
        }
    }
    Ok((true, format!("k <= {ODE_K_MAX} and w in {{0, 6, ..., {KK_W_MAX}}} at q-precision {ODE_PREC}")))
}

fn c6_contiguity() -> Outcome {
    let rows = depth1::contiguity_agreement(CONTIGUITY_I_MAX, CONTIGUITY_PREC, None)?;
    if let Some(r) = rows.iter().find(|r| !r.agrees || r.checked_q_prec < CONTIGUITY_PREC as i64) {
        return Ok((false, format!("g_{} disagrees (checked to {})", r.i, r.checked_q_prec)));
    }
    let ks = depth1::k_samples(K_SAMPLES, SEED);
    for k in &ks {
        let e = depth1::eigen_check(k, LAX_PREC, Variant::Corrected)?;
        if !(e.scalar && e.lambda == Some(qmx_core::rational::to_string(&(k + int(1))))) {
            return Ok((false, format!("eigen_check at k = {k}: {e:?}")));
        }
    }
    let ks: Vec<String> = ks.iter().map(ToString::to_string).collect();
    Ok((true, format!("g_2..g_{CONTIGUITY_I_MAX} agree to q^{CONTIGUITY_PREC}; lambda = k+1 at k in {ks:?}")))
}

fn c7_lax() -> Outcome {
    let ks = depth1::k_samples(K_SAMPLES, SEED);
    let jobs: Vec<(usize, Rational, u8)> =
        ks.iter().enumerate().flat_map(|(i, k)| (0..3).map(move |j| (i, k.clone(), j))).collect();
    let reports = par::map(Execution::Parallel, jobs, |(i, k, j)| {
        let seed = SEED + i as u64;
        match j {
            0 => depth1::lax_check_1(&k, LAX_PREC, LAX_TRIALS, seed, Variant::Corrected),
            1 => depth1::lax_check_2(&k, &KFn::mu(), LAX_PREC, LAX_TRIALS, seed, Variant::Corrected),
            _ => depth1::lax_check_2(&k, &KFn::constant(int(1)), LAX_PREC, LAX_TRIALS, seed, Variant::Corrected),
        }
    });
    let mut n = 0;
    for r in reports {
        let r = r?;
        if !r.ok() || r.trials != LAX_TRIALS {
            return Ok((false, format!("{} at k = {}: {}/{} ({:?})", r.name, r.k, r.passed, r.trials, r.counterexample)));
        }
        n += r.trials;
    }
    Ok((true, format!("{n} element checks: lax1, lax2 with mu(k), lax2 with mu = 1; truncation {LAX_PREC}")))
}

fn c8_denominators() -> Outcome {
    let rows = par::map(Execution::Parallel, (1..=T2_K_MAX).collect(), |k| depth1::denominator_row(k, T2_PREC));
    let mut worst = Vec::new();
    for r in rows {
        let r = r?;
        if r.primes.iter().any(|p| p.parse::<BigInt>().map_or(true, |p| p >= BigInt::from(6 * r.k))) || !r.within_bound || !r.g_nonnegative {
            return Ok((false, format!("k = {}: primes {:?}, g >= 0: {}", r.k, r.primes, r.g_nonnegative)));
        }
        worst.push(r.primes.last().cloned().unwrap_or_else(|| "-".into()));
    }
    Ok((true, format!("k = 1..{T2_K_MAX} at q-precision {T2_PREC}; largest primes {worst:?}")))
}

fn c9_leech() -> Outcome {
    let r = leech::divisibility_scan(LEECH_A_MAX, &cfg())?;
    let theta = leech::theta_leech(LEECH_A_MAX + 1)?;
    let shells = leech::shell_sizes(&theta);
    let a = BigInt::from(393_120);
    let div = shells.iter().enumerate().skip(1).all(|(n, l)| (l * BigInt::from(n) % &a).is_zero());
    let f = leech::f_1_14(LEECH_A_MAX)?;
    let ext = numax_and_form(1, 14, &cfg())?;
    let f_ext = ext.form_poly.expand(LEECH_A_MAX);
    let checks = [
        ("theta >= 0 integral", shells.iter().all(|c| !c.is_negative())),
        ("|L_2| = 196560", shells[2] == BigInt::from(196_560)),
        ("393120 | a|L_a|", div && r.divisibility_ok),
        ("f_{1,14} integral", f.all_integral() && r.f114_integral),
        ("f_{1,14} >= 0", f.all_nonnegative()),
        ("nu(f_{1,14}) = 2", ext.nu == 2 && r.f114_valuation == Some(2)),
        ("matches solver", f == f_ext && r.f114_matches_extremal),
    ];
    let bad: Vec<_> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    Ok((bad.is_empty(), format!("a <= {LEECH_A_MAX}, f_{{1,14}} to q^{LEECH_A_MAX}; failing: {bad:?}")))
}

fn c10_diagonal() -> Outcome {
    let cells: Vec<_> = scan::grid(0..=4, DIAG_W_MAX).into_iter().filter(|&(l, w)| dim_qm(l, w) > 0).collect();
    let n = cells.len();
    let res = par::map(Execution::Parallel, cells, |(l, w)| {
        let b = diagonal_basis(l, w)?;
        let d = dim_qm(l, w);
        let prec = d as usize + 1;
        let ok = b.len() as i64 == d
            && b.iter().enumerate().all(|(i, f)| {
                let s = f.expand(prec);
                (0..d).all(|j| s.q_coeff(j) == if i as i64 == j { int(1) } else { int(0) })
            });
        Ok::<_, qmx_core::QmxError>((l, w, ok))
    });
    for r in res {
        let (l, w, ok) = r?;
        if !ok {
            return Ok((false, format!("(l={l}, w={w}) basis not diagonal")));
        }
    }
    Ok((true, format!("{n} cells, l <= 4, w <= {DIAG_W_MAX}")))
}

fn c11_scans() -> Outcome {
    let cells = scan::grid(0..=SCAN_L_MAX, SCAN_W_MAX);
    let ext = scan::scan_extremal(&cells, &cfg(), Execution::Parallel);
    let rows = scan::scan_integrality(&cells, SCAN_PREC, &cfg(), Execution::Parallel);
    let report = serde_json::to_string(&(&ext, &rows)).map_err(|e| qmx_core::QmxError::Parse(e.to_string()))?;
    let crashed = ext.iter().map(|r| r.status).chain(rows.iter().map(|r| r.status)).filter(|s| *s == CellStatus::Failed).count();
    let c1 = scan::conjecture1_scan(4, SCAN_W_MAX, SCAN_PREC, &cfg(), Execution::Parallel)?;
    let ok = crashed == 0 && !report.is_empty() && c1.violations.is_empty() && c1.cells_checked > 0;
    Ok((
        ok,
        format!(
            "{} + {} rows, {crashed} failed; depth <= 4 conjecture: {} cells, {} violations ({})",
            ext.len(),
            rows.len(),
            c1.cells_checked,
            c1.violations.len(),
            c1.label
        ),
    ))
}

/// Independent of the library's Delta: the product formula.
fn delta_product(n: usize) -> USeries {
    let mut c = vec![BigInt::zero(); n];
    c[1] = BigInt::one();
    for m in 1..n {
        for _ in 0..24 {
            for i in (m..n).rev() {
                let t = c[i - m].clone();
                c[i] -= t;
            }
        }
    }
    USeries::from_q_coeffs(c.into_iter().map(Rational::from_integer))
}

fn main() {
    let criteria: Vec<(u32, &str, fn() -> Outcome)> = vec![
        (1, "Eisenstein expansions", c1_eisenstein),
        (2, "kappa sequence", c2_kappa),
        (3, "extremal orders against dimension bounds", c3_extremal_orders),
        (4, "Wronskian anchor and random Wronskians", c4_wronskian),
        (5, "differential equations", c5_odes),
        (6, "contiguity and eigenvalue", c6_contiguity),
        (7, "Lax identities", c7_lax),
        (8, "denominators of f_{1,6k}", c8_denominators),
        (9, "Leech theta series and f_{1,14}", c9_leech),
        (10, "diagonal bases", c10_diagonal),
        (11, "conjecture scans", c11_scans),
    ];
    let start = Instant::now();
    let results = par::map(Execution::Parallel, criteria, |(n, name, f)| {
        let t = Instant::now();
        let r = f();
        (n, name, r, t.elapsed())
    });
    let mut failed = 0;
    for (n, name, r, t) in results {
        let (ok, detail) = match r {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!("criterion {n}: {} {name} ({:.1}s): {detail}", if ok { "PASS" } else { "FAIL" }, t.as_secs_f64());
    }
    println!("acceptance: {failed} failing, total {:.1}s", start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
