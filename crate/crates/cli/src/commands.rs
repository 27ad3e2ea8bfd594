use anyhow::{anyhow, bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use padic_hecke::arith::{parse_rat, Rat};
use padic_hecke::canonical::branch::frobenius_defect;
use padic_hecke::canonical::{orbit_classify, phi_modular, t_eval, t_series, tail_bound, CanonicalBranch};
use padic_hecke::cm::{class_row, is_discriminant, zhang_degree_check, zhang_p_power_degree_check};
use padic_hecke::kite::{cm_sups_valuation, format_kite, kite_rows, tau_m_closed, tau_m_recursive};
use padic_hecke::orbit::{
    classify_j, cm_sequence_experiment, hecke_orbit_experiment, sups_start, tate_sweep, AnnularPoint, MassWindow,
};
use padic_hecke::padic::PadicInt;
use padic_hecke::qexp::verify_identities;
use padic_hecke::{Error, Exec};

use crate::config::RunConfig;
use crate::output::{emit_csv, emit_json, Table};

/// A computed check came out false.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "check failed: {}", self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn exec(cfg: &RunConfig) -> Exec {
    Exec::from_jobs(cfg.jobs)
}

/// Comma-separated integers and inclusive ranges `a..b`.
pub fn parse_list(s: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let bad = || Error::Parse(format!("bad list item {item:?}"));
        match item.split_once("..") {
            Some((a, b)) => {
                let a: i64 = a.trim().parse().map_err(|_| bad())?;
                let b: i64 = b.trim().parse().map_err(|_| bad())?;
                if a <= b {
                    out.extend(a..=b);
                } else {
                    out.extend((b..=a).rev());
                }
            }
            None => out.push(item.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        bail!(Error::Parse(format!("empty list {s:?}")));
    }
    Ok(out)
}

fn parse_positive(s: &str) -> Result<Vec<u64>> {
    parse_list(s)?
        .into_iter()
        .map(|n| u64::try_from(n).ok().filter(|&n| n > 0).ok_or_else(|| anyhow!(Error::InvalidArgument(format!("n = {n} must be >= 1")))))
        .collect()
}

fn windows(cfg: &RunConfig) -> Result<Vec<MassWindow>> {
    Ok(cfg.windows.iter().map(|w| w.parse()).collect::<padic_hecke::Result<_>>()?)
}

fn padic(cfg: &RunConfig, j: &str) -> Result<PadicInt> {
    Ok(PadicInt::from_rat(cfg.p, cfg.precision, &parse_rat(j)?)?)
}

pub fn kite(cfg: &RunConfig, m: Option<u32>, x: Option<&str>, disc: Option<i64>) -> Result<()> {
    let p = cfg.p;
    let mut point = None;
    if let Some(d) = disc {
        let v = cm_sups_valuation(p, d)?;
        println!("vhat={v}");
        if m.is_none() && x.is_none() {
            return emit_json(cfg, "kite", &json!({"p": p, "D": d, "vhat": v.to_string()}));
        }
        point = Some(v);
    }
    if let Some(x) = x {
        point = Some(parse_rat(x)?);
    }
    let x = point.ok_or_else(|| anyhow!(Error::InvalidArgument("kite needs -x or -D".into())))?;
    let m = m.unwrap_or(1);
    let closed = tau_m_closed(p, m, &x)?;
    let ok = closed == tau_m_recursive(p, m, &x)?;
    if m == 0 {
        println!("{}", format_kite(&closed));
    } else {
        println!("{}; check={}", format_kite(&closed), if ok { "ok" } else { "FAIL" });
    }
    if cfg.csv.is_some() {
        let mut t = Table::new(["x_num", "x_den", "mult"]);
        for r in kite_rows(&closed) {
            t.push([r.x_num, r.x_den, r.mult]);
        }
        emit_csv(cfg, &t)?;
    }
    emit_json(cfg, "kite", &json!({"p": p, "m": m, "x": x.to_string(), "divisor": closed.to_json(), "check": ok}))?;
    if !ok {
        bail!(CheckFailed(format!("closed form and recursion differ at x = {x}")));
    }
    Ok(())
}

pub fn canon_series(cfg: &RunConfig) -> Result<()> {
    let p = cfg.p;
    let map = t_series(p, cfg.order)?;
    let k: Vec<String> = map.kcheck().iter().map(ToString::to_string).collect();
    println!("kcheck: {}", k.join(" "));
    let mut t = Table::new(["n", "A_n", "ord", "bound"]);
    for n in 1..=cfg.order {
        let ord = map.ord_a(n).map_or("inf".to_string(), |o| o.to_string());
        let bound = tail_bound(p, n as u64)?;
        if cfg.csv.is_none() {
            println!("A_{n} = {} ord={ord} bound={bound}", map.a(n));
        }
        t.push([n.to_string(), map.a(n).to_string(), ord, bound.to_string()]);
    }
    if cfg.csv.is_some() {
        emit_csv(cfg, &t)?;
    }
    emit_json(cfg, "canon series", &map)
}

pub fn canon_eval(cfg: &RunConfig, j: &str) -> Result<()> {
    let x = padic(cfg, j)?;
    let t = t_eval(cfg.p, &x)?;
    let prec = t.value.prec();
    let fixed = t.value.congruent(&x.reduce(prec), prec);
    let v = t.value.centered();
    if fixed {
        println!("{v} (fixed)");
    } else {
        println!("{v} mod {}^{prec}", cfg.p);
    }
    emit_json(
        cfg,
        "canon eval",
        &json!({"j": j, "t": v.to_string(), "precision": prec, "distance": t.distance, "terms": t.terms, "fixed": fixed}),
    )
}

pub fn canon_orbit(cfg: &RunConfig, j: &str, max_iter: usize) -> Result<()> {
    let branch = CanonicalBranch::for_precision(cfg.p, cfg.precision)?;
    let class = orbit_classify(&branch, &padic(cfg, j)?, max_iter)?;
    println!("{class}");
    emit_json(cfg, "canon orbit", &json!({"j": j, "class": class}))
}

pub fn canon_phicheck(cfg: &RunConfig, j: Option<&str>, count: usize) -> Result<()> {
    let p = cfg.p;
    let phi = phi_modular(p)?;
    let branch = CanonicalBranch::for_precision(p, cfg.precision)?;
    let js: Vec<Rat> = match j {
        Some(j) => vec![parse_rat(j)?],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut out = Vec::with_capacity(count);
            while out.len() < count {
                let j: i64 = rng.gen_range(-1_000_000_000_000..1_000_000_000_000);
                if j.rem_euclid(p as i64) != 0 {
                    out.push(Rat::from_integer(j.into()));
                }
            }
            out
        }
    };
    let rows = exec(cfg).try_map(&js, |j| -> padic_hecke::Result<(String, u32, Option<u32>, u32, Rat)> {
        let x = PadicInt::from_rat(p, cfg.precision, j)?;
        let t = branch.eval(&x)?;
        let cert = t.value.prec();
        let residual = phi.eval_padic(&x.reduce(cert), &t.value).ord();
        let (defect, bound) = frobenius_defect(&branch, &x)?;
        Ok((j.to_string(), cert, residual, defect, bound))
    })?;
    let mut table = Table::new(["j", "precision", "residual_ord", "frobenius_defect", "defect_bound", "ok"]);
    let mut failures = 0;
    for (j, cert, residual, defect, bound) in &rows {
        let ok = residual.is_none() && Rat::from_integer((*defect).into()) >= *bound;
        failures += usize::from(!ok);
        let res = residual.map_or(format!(">={cert}"), |o| o.to_string());
        table.push([j.clone(), cert.to_string(), res, defect.to_string(), bound.to_string(), ok.to_string()]);
    }
    emit_csv(cfg, &table)?;
    emit_json(cfg, "canon phicheck", &json!({"count": rows.len(), "failures": failures}))?;
    if failures > 0 {
        bail!(CheckFailed(format!("{failures} of {} residuals", rows.len())));
    }
    Ok(())
}

pub fn class(cfg: &RunConfig, discs: &str) -> Result<()> {
    // Ranges sweep every integer; keep the discriminants.
    let discs: Vec<i64> = parse_list(discs)?.into_iter().filter(|&d| is_discriminant(d)).collect();
    let rows = exec(cfg).try_map(&discs, |&d| class_row(cfg.p, d))?;
    let mut t = Table::new(["D", "d", "f", "h_forms", "h_formula", "type"]);
    let mut mismatches = 0;
    for r in &rows {
        mismatches += usize::from(r.h_forms != r.h_formula);
        t.push([r.disc.to_string(), r.d.to_string(), r.f.to_string(), r.h_forms.to_string(), r.h_formula.to_string(), r.kind.clone()]);
    }
    emit_csv(cfg, &t)?;
    emit_json(cfg, "class", &json!({"rows": rows.len(), "mismatches": mismatches}))?;
    if mismatches > 0 {
        bail!(CheckFailed(format!("{mismatches} class number mismatches")));
    }
    Ok(())
}

pub fn cm(cfg: &RunConfig, discs: &str) -> Result<()> {
    let discs = parse_list(discs)?;
    let ws = windows(cfg)?;
    let e = cm_sequence_experiment(cfg.p, &discs, &ws, exec(cfg))?;
    let mut header: Vec<String> = ["D", "reduction", "supsn", "h", "vhat", "radial"].map(String::from).to_vec();
    header.extend(ws.iter().map(ToString::to_string));
    let mut t = Table::new(header);
    for r in &e.rows {
        let mut row = vec![
            r.disc.to_string(),
            r.reduction.to_string(),
            r.supsn.to_string(),
            r.h.to_string(),
            r.vhat.as_ref().map_or(String::new(), ToString::to_string),
            r.radial.as_ref().map_or(String::new(), ToString::to_string),
        ];
        row.extend(r.masses.iter().map(|m| m.fraction_label()));
        t.push(row);
    }
    emit_csv(cfg, &t)?;
    emit_json(cfg, "cm", &e)
}

fn parse_start(p: u64, s: &str) -> Result<AnnularPoint> {
    let (kind, value) = s.split_once(':').unwrap_or((s, ""));
    Ok(match kind {
        "sups" => sups_start(p, &parse_rat(value)?)?,
        "bad" => AnnularPoint::bad(parse_rat(value)?)?,
        "ordinary" => AnnularPoint::Ordinary { residue: None },
        "j" => classify_j(p, &parse_rat(value)?)?,
        _ => bail!(Error::Parse(format!("start {s:?}: expected sups:V, bad:O, ordinary or j:J"))),
    })
}

pub fn orbit(cfg: &RunConfig, start: &str, ns: &str) -> Result<()> {
    let ns = parse_positive(ns)?;
    let ws = windows(cfg)?;
    let start = parse_start(cfg.p, start)?;
    let e = hecke_orbit_experiment(cfg.p, &start, &ns, &ws, exec(cfg))?;
    let mut header: Vec<String> = ["n", "m", "n0", "bound"].map(String::from).to_vec();
    header.extend(ws.iter().map(ToString::to_string));
    let mut t = Table::new(header);
    for r in &e.rows {
        let mut row = vec![
            r.n.to_string(),
            r.m.to_string(),
            r.n0.to_string(),
            r.bound.as_ref().map_or(String::new(), ToString::to_string),
        ];
        row.extend(r.masses.iter().map(|m| m.fraction_label()));
        t.push(row);
    }
    emit_csv(cfg, &t)?;
    emit_json(cfg, "orbit", &e)
}

pub fn tate(cfg: &RunConfig, ordz: &str, ns: &str, rho: &str) -> Result<()> {
    let ns = parse_positive(ns)?;
    let rows = tate_sweep(&parse_rat(ordz)?, &parse_rat(rho)?, &ns, exec(cfg))?;
    let mut t = Table::new(["n", "mass", "fraction", "bound", "within_bound"]);
    for r in &rows {
        t.push([r.n.to_string(), r.mass.to_string(), r.fraction.to_string(), format!("{:.6}", r.bound), r.within_bound.to_string()]);
    }
    emit_csv(cfg, &t)?;
    emit_json(cfg, "tate", &rows)?;
    let over = rows.iter().filter(|r| !r.within_bound).count();
    if over > 0 {
        bail!(CheckFailed(format!("{over} values of n exceed the bound")));
    }
    Ok(())
}

pub fn zhang(cfg: &RunConfig, d: i64, fmax: i64, ftilde: &str, mmax: u32) -> Result<()> {
    let fts = parse_list(ftilde)?;
    let pairs: Vec<(i64, i64)> = fts
        .iter()
        .flat_map(|&ft| (1..=fmax).map(move |f| (f, ft)))
        .filter(|&(f, ft)| num_gcd(f, ft) == 1)
        .collect();
    let reports = exec(cfg).try_map(&pairs, |&(f, ft)| zhang_degree_check(d, f, ft))?;
    let p = cfg.p;
    let p_cases: Vec<(i64, u32)> =
        (1..=fmax).filter(|f| f % p as i64 != 0).flat_map(|f| (0..=mmax).map(move |m| (f, m))).collect();
    let p_reports = exec(cfg).try_map(&p_cases, |&(f, m)| zhang_p_power_degree_check(p, d, f, m))?;
    let mut t = Table::new(["d", "f", "ftilde", "lhs", "rhs", "inverse_lhs", "inverse_rhs", "ok"]);
    for r in &reports {
        t.push([
            r.d.to_string(),
            r.f.to_string(),
            r.ftilde.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.inverse_lhs.to_string(),
            r.inverse_rhs.to_string(),
            r.ok().to_string(),
        ]);
    }
    emit_csv(cfg, &t)?;
    let failed = reports.iter().filter(|r| !r.ok()).count() + p_reports.iter().filter(|r| !r.ok()).count();
    emit_json(cfg, "zhang", &json!({"degree": reports, "p_power": p_reports, "failures": failed}))?;
    eprintln!("zhang: {} identities, {} p-power checks, {failed} failures", reports.len(), p_reports.len());
    if failed > 0 {
        bail!(CheckFailed(format!("{failed} Zhang identities")));
    }
    Ok(())
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        num_gcd(b, a % b)
    }
}

pub fn qexp_verify(cfg: &RunConfig) -> Result<()> {
    let r = verify_identities(cfg.qprec);
    println!("{} {} {}", r.discriminant, r.g2_cubic, r.congruences);
    emit_json(cfg, "qexp verify", &r)?;
    if !r.all_ok() {
        bail!(CheckFailed(format!("q-expansion identities through q^{}", cfg.qprec)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists() {
        assert_eq!(parse_list("1..3,7").unwrap(), vec![1, 2, 3, 7]);
        assert_eq!(parse_list("-4..-6").unwrap(), vec![-4, -5, -6]);
        assert!(parse_list("1..x").is_err());
        assert!(parse_list("").is_err());
        assert!(parse_positive("0..2").is_err());
        assert_eq!(num_gcd(12, 18), 6);
    }
}
