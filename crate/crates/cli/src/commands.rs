use std::io::{self, Write};

use palstream::approx_log::ApproxLog;
use palstream::approx_sqrt::{self, Mode, Report, SqrtConfig};
use palstream::fingerprint::FpContext;
use palstream::gen;
use palstream::meter::Meter;
use palstream::oracle::{all_arms_by, ArmProfile};
use palstream::stream::{
    demux_doubled_report, double_symbols, double_transform, ComplementMap, Demuxed, InputFormat, SymbolSource,
};
use palstream::{exact, Symbol};

use crate::args::{
    ApproxLongestArgs, Common, GenArgs, GenKind, InputFormatArg, LongestArgs, Metering, ModeArg, OracleArgs,
    ParityArg, ScanArgs,
};
use crate::output::{CliError, CliResult, LongestLine, ReportLine, Sink};

pub fn complement(c: &Common) -> CliResult<Option<ComplementMap>> {
    match c.complement.as_deref() {
        None => Ok(None),
        Some("dna") => Ok(Some(ComplementMap::dna())),
        Some(path) => Ok(Some(ComplementMap::load(path)?)),
    }
}

fn input_format(c: &Common) -> InputFormat {
    match c.input_format {
        InputFormatArg::Raw => InputFormat::Raw,
        InputFormatArg::Fasta => InputFormat::Fasta,
    }
}

/// Opens the input. Standard input is spooled to a temporary file unless the
/// caller can work with a single unmeasured pass.
fn open_source(c: &Common, one_pass_ok: bool) -> CliResult<SymbolSource> {
    let format = input_format(c);
    if c.input != "-" {
        return Ok(SymbolSource::open(&c.input, format)?);
    }
    if one_pass_ok && format == InputFormat::Raw {
        return Ok(SymbolSource::one_shot(io::stdin()));
    }
    eprintln!("palstream: spooling standard input to a temporary file");
    Ok(SymbolSource::spool(io::stdin().lock(), format)?)
}

fn meter(m: &Metering) -> Meter {
    if m.meter_stride > 0 {
        Meter::with_stride(m.meter_stride)
    } else {
        Meter::new()
    }
}

fn parity_name(p: ParityArg) -> &'static str {
    match p {
        ParityArg::Even => "even",
        ParityArg::Odd => "odd",
        ParityArg::Both => "both",
    }
}

fn stream_for(src: &SymbolSource, parity: ParityArg) -> SymbolSource {
    match parity {
        ParityArg::Even => src.clone(),
        ParityArg::Odd | ParityArg::Both => double_transform(src),
    }
}

/// Maps a report on the (possibly doubled) stream to an output line, or
/// `None` if the requested parity excludes it.
fn line_for(algo: &str, parity: ParityArg, m: u64, lower: u64, upper_ex: u64, exact: bool) -> Option<ReportLine> {
    let mk = |mid: u64, lo: u64, up: u64, full: Option<u64>, par: &str| ReportLine {
        algo: algo.to_string(),
        midpoint: Some(mid),
        arm_estimate: lo,
        arm_lower: lo,
        arm_upper_exclusive: up,
        full_length: full,
        parity: par.to_string(),
        flags: Vec::new(),
    };
    match parity {
        ParityArg::Even => Some(mk(m, lower, upper_ex, exact.then_some(2 * lower), "even")),
        _ => match demux_doubled_report(m, lower) {
            Demuxed::Odd { center, full_len } => Some(mk(center, full_len, upper_ex, exact.then_some(full_len), "odd")),
            Demuxed::Even { midpoint, arm } if parity == ParityArg::Both => {
                Some(mk(midpoint, arm, upper_ex.div_ceil(2), exact.then_some(2 * arm), "even"))
            }
            Demuxed::Even { .. } => None,
        },
    }
}

/// Oracle arms on the stream the algorithm saw: doubled unless even parity.
fn oracle_profile(src: &SymbolSource, parity: ParityArg, comp: &Option<ComplementMap>, limit: u64) -> CliResult<ArmProfile> {
    let n = src.len().unwrap_or(0);
    if n > limit {
        return Err(CliError::Usage(format!("input of {n} symbols exceeds --verify-limit {limit}")));
    }
    let mut s = src.collect()?;
    if parity != ParityArg::Even {
        s = double_symbols(&s);
    }
    let f = |x: Symbol| comp.as_ref().map_or(Ok(x), |c| c.map(x));
    for &x in &s {
        f(x)?;
    }
    Ok(all_arms_by(&s, |a, b| a == f(b).unwrap_or(0)))
}

/// Undoes [`line_for`]: the position and value to compare on the oracle
/// profile of the stream the algorithm saw.
fn oracle_value(line: &ReportLine, parity: ParityArg, prof: &ArmProfile) -> u64 {
    let mid = line.midpoint.unwrap_or(0) as usize;
    match (parity, line.parity.as_str()) {
        (ParityArg::Even, _) => prof.arm(mid) as u64,
        (_, "odd") => prof.arm(2 * mid - 1) as u64,
        _ => prof.arm(2 * mid) as u64 / 2,
    }
}

pub fn scan(a: &ScanArgs) -> CliResult<()> {
    let c = &a.common;
    let comp = complement(c)?;
    let src = open_source(c, false)?;
    let stream = stream_for(&src, c.parity);
    let n = stream.len().unwrap_or(0);
    let mut sink = Sink::new(io::stdout().lock(), c.format);
    if n < 2 {
        return sink.finish();
    }
    let eps = a.eps.unwrap_or_else(|| approx_sqrt::min_eps(n).clamp(0.5, 1.0));
    let mode = match a.mode {
        ModeArg::Compressed => Mode::Compressed,
        ModeArg::Simple => Mode::Simple,
    };
    let cfg = SqrtConfig::new(n, eps).with_mode(mode).with_complement(comp.clone());
    let p = approx_sqrt::params(n, eps)?;
    let ctx = FpContext::new(c.seed.unwrap_or(0), n);
    let dump = a.dump_state;
    let stderr = io::stderr();
    let run = approx_sqrt::run_with(&stream, &cfg, ctx, meter(&a.metering), |st| {
        if dump && st.iteration() % p.s == 0 {
            let _ = write!(stderr.lock(), "# i={}\n{}", st.iteration(), st.dump_state());
        }
    })?;
    let exact = p.s == 1;
    let lines: Vec<ReportLine> = run
        .reports
        .iter()
        .filter_map(|r: &Report| line_for("approx-sqrt", c.parity, r.m, r.est, r.upper_exclusive, exact))
        .filter(|l| l.arm_estimate >= a.min_arm)
        .filter(|l| a.threshold.is_none_or(|t| l.arm_upper_exclusive > t))
        .collect();
    if a.verify.verify {
        let prof = oracle_profile(&src, c.parity, &comp, a.verify.verify_limit)?;
        for l in &lines {
            let v = oracle_value(l, c.parity, &prof);
            if !(l.arm_lower <= v && v < l.arm_upper_exclusive) {
                return Err(CliError::Verify(format!(
                    "midpoint {:?} ({}) has {v}, outside [{}, {})",
                    l.midpoint, l.parity, l.arm_lower, l.arm_upper_exclusive
                )));
            }
        }
        eprintln!("palstream: verified {} lines against the oracle", lines.len());
    }
    for l in &lines {
        sink.report(l)?;
    }
    if a.metering.meter {
        sink.meter(&run.space)?;
    }
    sink.finish()
}

pub fn longest(a: &LongestArgs) -> CliResult<()> {
    let c = &a.common;
    if c.parity == ParityArg::Odd {
        return Err(CliError::Usage("longest supports --parity even or both".into()));
    }
    let comp = complement(c)?;
    let src = open_source(c, false)?;
    let stream = stream_for(&src, c.parity);
    let n = stream.len().unwrap_or(0);
    let ctx = FpContext::new(c.seed.unwrap_or(0), n);
    let res = exact::run(&stream, ctx, comp.clone())?;
    let mut line = LongestLine {
        algo: "exact".into(),
        parity: parity_name(c.parity).into(),
        arm: res.lmax,
        full_length: 2 * res.lmax,
        midpoints: res.midpoints.clone(),
        odd_centers: Vec::new(),
        flags: if res.collisions.is_empty() { Vec::new() } else { vec!["collision".into()] },
    };
    if c.parity == ParityArg::Both {
        line.arm = res.lmax / 2;
        line.full_length = res.lmax;
        line.midpoints.clear();
        for &m in &res.midpoints {
            match demux_doubled_report(m, res.lmax) {
                Demuxed::Odd { center, .. } => line.odd_centers.push(center),
                Demuxed::Even { midpoint, .. } => line.midpoints.push(midpoint),
            }
        }
    }
    if a.verify.verify {
        let prof = oracle_profile(&src, c.parity, &comp, a.verify.verify_limit)?;
        let lmax = prof.max_arm() as u64;
        let mids: Vec<u64> =
            if lmax == 0 { Vec::new() } else { prof.iter().filter(|&(_, v)| v as u64 == lmax).map(|(m, _)| m as u64).collect() };
        if lmax != res.lmax || mids != res.midpoints {
            return Err(CliError::Verify(format!("oracle longest {lmax} at {mids:?}, got {} at {:?}", res.lmax, res.midpoints)));
        }
        eprintln!("palstream: verified longest palindrome against the oracle");
    }
    let mut sink = Sink::new(io::stdout().lock(), c.format);
    sink.longest(&line)?;
    if a.metering.meter {
        sink.meter(&res.space)?;
    }
    sink.finish()
}

pub fn approx_longest(a: &ApproxLongestArgs) -> CliResult<()> {
    let c = &a.common;
    if c.parity == ParityArg::Odd {
        return Err(CliError::Usage("approx-longest supports --parity even or both".into()));
    }
    let comp = complement(c)?;
    let src = open_source(c, !a.verify.verify)?;
    let stream = stream_for(&src, c.parity);
    let ctx = FpContext::new(c.seed.unwrap_or(0), 0);
    let mut st = ApproxLog::with_meter(a.eps, ctx, comp.clone(), meter(&a.metering))?;
    for sym in stream.symbols()? {
        st.step(sym?)?;
        if let Some(k) = a.dump_state.filter(|&k| k > 0) {
            if st.iteration() % k == 0 {
                eprint!("# i={}\n{}", st.iteration(), st.dump_state());
            }
        }
    }
    let res = st.finish();
    let upper = ((1.0 + a.eps) * res.est as f64 + 1e-9).floor() as u64 + 1;
    let line = match res.midpoint {
        Some(m) => line_for("approx-log", c.parity, m, res.est, upper, false).expect("even or both parity"),
        None => ReportLine {
            algo: "approx-log".into(),
            midpoint: None,
            arm_estimate: 0,
            arm_lower: 0,
            arm_upper_exclusive: if c.parity == ParityArg::Both { upper.div_ceil(2) } else { upper },
            full_length: None,
            parity: parity_name(c.parity).into(),
            flags: Vec::new(),
        },
    };
    if a.verify.verify {
        let prof = oracle_profile(&src, c.parity, &comp, a.verify.verify_limit)?;
        let lmax = prof.max_arm() as u64;
        let witnessed = res.midpoint.map_or(res.est == 0, |m| prof.arm(m as usize) as u64 >= res.est);
        if !(res.est <= lmax && lmax < upper && witnessed) {
            return Err(CliError::Verify(format!("estimate {} for longest {lmax} at {:?}", res.est, res.midpoint)));
        }
        eprintln!("palstream: verified estimate against the oracle");
    }
    let mut sink = Sink::new(io::stdout().lock(), c.format);
    sink.report(&line)?;
    if a.metering.meter {
        sink.meter(&res.space)?;
    }
    sink.finish()
}

pub fn oracle(a: &OracleArgs) -> CliResult<()> {
    let c = &a.common;
    let comp = complement(c)?;
    let src = open_source(c, false)?;
    let prof = oracle_profile(&src, c.parity, &comp, u64::MAX)?;
    let mut sink = Sink::new(io::stdout().lock(), c.format);
    for (m, arm) in prof.iter() {
        let arm = arm as u64;
        if let Some(l) = line_for("oracle", c.parity, m as u64, arm, arm + 1, true) {
            if l.arm_estimate >= a.min_arm {
                sink.report(&l)?;
            }
        }
    }
    sink.finish()
}

/// Letters for alphabets up to 26, raw bytes `k - 1` otherwise.
pub fn symbols_to_bytes(s: &[Symbol]) -> CliResult<Vec<u8>> {
    let max = s.iter().copied().max().unwrap_or(1);
    if max <= 26 {
        Ok(s.iter().map(|&k| b'a' + (k - 1) as u8).collect())
    } else if max <= 256 {
        Ok(s.iter().map(|&k| (k - 1) as u8).collect())
    } else {
        Err(CliError::Usage(format!("symbol {max} does not fit in a byte")))
    }
}

pub fn generate(a: &GenArgs) -> CliResult<Vec<Symbol>> {
    Ok(match a.kind {
        GenKind::Random => gen::gen_random(a.n, a.sigma, a.seed)?,
        GenKind::Unary => gen::gen_unary(a.n, 1),
        GenKind::Run => {
            if a.w.is_empty() || !a.w.bytes().all(|b| b.is_ascii_lowercase()) {
                return Err(CliError::Usage("--w must be a non-empty lowercase word".into()));
            }
            let w: Vec<Symbol> = a.w.bytes().map(|b| (b - b'a' + 1) as Symbol).collect();
            gen::gen_run(&w, a.h, a.pad, a.seed)?.symbols
        }
        GenKind::LowerBound => {
            let assign = match a.broken {
                Some(j) => gen::broken_assignments(a.m, j)?,
                None => gen::mirrored_assignments(a.m),
            };
            gen::gen_lower_bound(a.m, a.e_r, &assign)?
        }
    })
}

pub fn gen_cmd(a: &GenArgs) -> CliResult<()> {
    let bytes = symbols_to_bytes(&generate(a)?)?;
    match &a.output {
        Some(p) => std::fs::write(p, &bytes).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(&bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}
