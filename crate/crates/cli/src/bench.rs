use std::io;
use std::path::Path;
use std::time::Instant;

use palstream::approx_sqrt::{self, SqrtConfig};
use palstream::fingerprint::FpContext;
use palstream::gen;
use palstream::oracle::all_arms;
use palstream::stream::{InputFormat, SymbolSource};
use palstream::{approx_log, exact, isqrt, Symbol};
use serde::Serialize;

use crate::args::{Algo, BenchArgs, GenKind};
use crate::output::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub algo: &'static str,
    pub source: String,
    pub n: u64,
    pub eps: Option<f64>,
    pub seed: u64,
    pub peak_registers: u64,
    pub wall_time_ms: f64,
    pub max_error_observed: u64,
    pub within_bound: bool,
}

const HEADER: [&str; 9] =
    ["algo", "source", "n", "eps", "seed", "peak_registers", "wall_time_ms", "max_error_observed", "within_bound"];

fn generated(kind: GenKind, n: usize, sigma: u32, seed: u64) -> CliResult<Vec<Symbol>> {
    Ok(match kind {
        GenKind::Random => gen::gen_random(n, sigma, seed)?,
        GenKind::Unary => gen::gen_unary(n, 1),
        GenKind::Run => gen::gen_run(&[1, 2, 3], (n / 6).max(1), n / 4, seed)?.symbols,
        GenKind::LowerBound => {
            let e_r = (isqrt(n as u64) as usize / 4).max(1);
            let m = (1..).take_while(|&m| gen::lower_bound_len(m, e_r) <= n).last().unwrap_or(1);
            gen::gen_lower_bound(m, e_r, &gen::mirrored_assignments(m))?
        }
    })
}

fn sources(a: &BenchArgs) -> CliResult<Vec<(String, Vec<Symbol>)>> {
    match &a.corpus {
        Some(dir) => corpus(dir),
        None => a
            .sizes
            .iter()
            .map(|&n| Ok((format!("gen:{:?}", a.gen).to_lowercase(), generated(a.gen, n, a.sigma, a.seed)?)))
            .collect(),
    }
}

/// Regular files of `dir` in name order.
fn corpus(dir: &Path) -> CliResult<Vec<(String, Vec<Symbol>)>> {
    let rd = std::fs::read_dir(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<_> = rd.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_file()).collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_name().map_or_else(String::new, |f| f.to_string_lossy().into_owned());
            Ok((name, SymbolSource::open(&p, InputFormat::Raw)?.collect()?))
        })
        .collect()
}

fn ms(t: Instant) -> f64 {
    (t.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

pub fn bench(a: &BenchArgs) -> CliResult<()> {
    let srcs = sources(a)?;
    // The header is written up front so that an empty corpus still yields one.
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(io::stdout().lock());
    w.write_record(HEADER).map_err(csv_err)?;
    for (name, s) in &srcs {
        if s.len() < 2 {
            continue;
        }
        let n = s.len() as u64;
        let ctx = FpContext::new(a.seed, n);
        let prof = all_arms(s);
        let lmax = prof.max_arm() as u64;
        let q = isqrt(n);
        let row = |algo, eps, peak, wall, err, ok| BenchRow {
            algo,
            source: name.clone(),
            n,
            eps,
            seed: a.seed,
            peak_registers: peak,
            wall_time_ms: wall,
            max_error_observed: err,
            within_bound: ok,
        };
        for &algo in &a.algos {
            match algo {
                Algo::Exact => {
                    let t = Instant::now();
                    let r = exact::run_symbols(s, ctx)?;
                    let wall = ms(t);
                    let ok = r.lmax == lmax;
                    w.serialize(row("exact", None, r.space.peak_registers, wall, r.lmax.abs_diff(lmax), ok))
                        .map_err(csv_err)?;
                }
                Algo::Sqrt => {
                    for &eps in &a.eps {
                        let eps = eps.max(approx_sqrt::min_eps(n));
                        let t = Instant::now();
                        let r = approx_sqrt::run_symbols(s, &SqrtConfig::new(n, eps), ctx)?;
                        let wall = ms(t);
                        let bound = eps * q as f64;
                        let (mut err, mut ok) = (0, true);
                        for rep in &r.reports {
                            let l = prof.arm(rep.m as usize) as u64;
                            err = err.max(l.saturating_sub(rep.est));
                            ok &= rep.est <= l && ((l - rep.est.min(l)) as f64) < bound;
                        }
                        w.serialize(row("approx-sqrt", Some(eps), r.space.peak_registers, wall, err, ok))
                            .map_err(csv_err)?;
                    }
                }
                Algo::Log => {
                    for &eps in &a.eps {
                        let t = Instant::now();
                        let r = approx_log::run_symbols(s, eps, ctx)?;
                        let wall = ms(t);
                        let ok = r.est <= lmax && lmax as f64 <= (1.0 + eps) * r.est as f64 + 1e-9;
                        w.serialize(row("approx-log", Some(eps), r.space.peak_registers, wall, lmax - r.est.min(lmax), ok))
                            .map_err(csv_err)?;
                    }
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Internal(e.to_string())
}
