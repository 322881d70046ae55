use std::path::{Path, PathBuf};

use cartierkit::cartier::{
    catalog, completed_tensor, derived_v_completion, homotopy_mod_v, is_derived_v_complete, lookup, tensor_trunc,
    CartierModule,
};
use cartierkit::drw::{build_drw, v_dv_quotient, DRWConfig};
use cartierkit::witt::{resolve_cache_dir, BaseRing, CacheStore, WittVector};
use cartierkit::Error;
use serde_json::{json, Value};

use crate::args::{CartierArgs, CartierOp, Cli, Command, DrwArgs, Format, VerifyArgs, WittArgs, WittOp};
use crate::error::{CliError, CliResult, EXIT_FAILURE};
use crate::suites::{run_suite, Context};

/// Text to print and the exit code.
pub struct Output {
    pub text: String,
    pub out: Option<PathBuf>,
    pub code: i32,
}

impl Output {
    fn ok(text: String, out: &Option<PathBuf>) -> Output {
        Output { text, out: out.clone(), code: 0 }
    }

    pub fn emit(&self) -> CliResult<()> {
        let mut text = self.text.clone();
        if !text.ends_with('\n') {
            text.push('\n');
        }
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

pub fn run(cli: Cli) -> CliResult<Output> {
    let cache_dir = resolve_cache_dir(cli.cache_dir.as_deref());
    match cli.command {
        Command::Witt(a) => witt(&a, &cache_dir),
        Command::Cartier(a) => cartier(&a),
        Command::Drw(a) => drw(&a),
        Command::Verify(a) => verify(&a, cache_dir),
    }
}

fn parse_json(s: &str) -> CliResult<Value> {
    serde_json::from_str(s).map_err(|e| CliError::Usage(format!("invalid JSON operand {s:?}: {e}")))
}

fn operands<const K: usize>(a: &WittArgs) -> CliResult<[&str; K]> {
    let ops: Vec<&str> = a.operands.iter().map(String::as_str).collect();
    ops.try_into()
        .map_err(|ops: Vec<&str>| CliError::Usage(format!("{:?} takes {K} operand(s), got {}", a.op, ops.len())))
}

fn vector(ring: &BaseRing, s: &str, len: usize) -> CliResult<WittVector> {
    let w = WittVector::from_coords_json(ring, &parse_json(s)?)?;
    if w.len() != len {
        return Err(Error::RingMismatch(format!("{s} has {} coordinates but --len is {len}", w.len())).into());
    }
    Ok(w)
}

fn witt(a: &WittArgs, cache_dir: &Path) -> CliResult<Output> {
    let ring = BaseRing::parse(&a.ring, Some(a.p))?;
    let show = |w: WittVector| -> String {
        if a.full {
            w.to_json().to_string()
        } else {
            json!({ "coords": w.coords_json() }).to_string()
        }
    };
    let cache = || -> CliResult<_> { Ok(CacheStore::new(cache_dir).load_or_generate(a.p, a.len)?.0) };
    let text = match a.op {
        WittOp::Add | WittOp::Mul => {
            let [x, y] = operands::<2>(a)?;
            let (x, y) = (vector(&ring, x, a.len)?, vector(&ring, y, a.len)?);
            let r = match (a.op, a.polys) {
                (WittOp::Add, false) => x.add(&y)?,
                (WittOp::Add, true) => cache()?.add(&x, &y)?,
                (_, false) => x.mul(&y)?,
                (_, true) => cache()?.mul(&x, &y)?,
            };
            show(r)
        }
        WittOp::Frobenius => {
            let [x] = operands::<1>(a)?;
            let x = vector(&ring, x, a.len)?;
            show(match (a.char_p, a.polys) {
                (true, _) => x.frobenius_char_p()?,
                (false, true) => cache()?.frobenius(&x)?,
                (false, false) => x.frobenius()?,
            })
        }
        WittOp::Verschiebung => {
            let [x] = operands::<1>(a)?;
            let x = vector(&ring, x, a.len)?;
            show(if a.trunc { x.verschiebung_trunc() } else { x.verschiebung() })
        }
        WittOp::Teichmuller => {
            let [t] = operands::<1>(a)?;
            let t = ring.elem_from_json(&parse_json(t)?)?;
            let w = WittVector::teichmuller(&ring, &t, a.len);
            if a.full { w.to_json().to_string() } else { w.coords_json().to_string() }
        }
        WittOp::Ghost => {
            let [x] = operands::<1>(a)?;
            let x = vector(&ring, x, a.len)?;
            Value::Array(x.ghost().iter().map(|g| ring.elem_to_json(g)).collect()).to_string()
        }
        WittOp::Pairing => {
            let [x, y] = operands::<2>(a)?;
            let ring2 = match &a.ring2 {
                Some(r) => BaseRing::parse(r, Some(a.p))?,
                None => ring.clone(),
            };
            show(vector(&ring, x, a.len)?.pairing(&vector(&ring2, y, a.len)?)?)
        }
    };
    Ok(Output::ok(text, &a.out))
}

/// `catalog:<name>`, `file:<path>` or `@<path>`, inline JSON, or a bare catalog name.
pub fn parse_module(spec: &str, p: Option<u64>, prec: usize) -> CliResult<CartierModule> {
    let from_json = |text: &str| -> CliResult<CartierModule> {
        let v: Value = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid module JSON: {e}")))?;
        let m = CartierModule::from_json(&v)?;
        match p {
            Some(p) if p != m.p() => Err(Error::PrimeMismatch(p, m.p()).into()),
            _ => Ok(m),
        }
    };
    if let Some(path) = spec.strip_prefix("file:").or_else(|| spec.strip_prefix('@')) {
        return from_json(&std::fs::read_to_string(path)?);
    }
    if spec.trim_start().starts_with('{') {
        return from_json(spec);
    }
    let name = spec.strip_prefix("catalog:").unwrap_or(spec);
    Ok(lookup(name, p.unwrap_or(2), prec)?)
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    v.as_deref().ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

fn cartier(a: &CartierArgs) -> CliResult<Output> {
    let module = |v: &Option<String>, flag: &str| parse_module(required(v, flag)?, a.p, a.prec);
    let pair = || -> CliResult<_> {
        let (m, n) = (module(&a.m, "m")?, module(&a.n, "n")?);
        if m.p() != n.p() {
            return Err(Error::PrimeMismatch(m.p(), n.p()).into());
        }
        Ok((m, n))
    };
    let text = match a.op {
        CartierOp::Tensor => {
            let (m, n) = pair()?;
            tensor_trunc(&m, &n, a.trunc)?.to_json().to_string()
        }
        CartierOp::Completed => {
            let (m, n) = pair()?;
            completed_tensor(&m, &n, a.prec)?.to_json().to_string()
        }
        CartierOp::Completion => {
            let m = module(&a.module, "module")?;
            let mut v = derived_v_completion(&m)?.to_json();
            let c = is_derived_v_complete(&m)?;
            v["complete"] = json!(c.complete);
            v["witness"] = json!(c.witness);
            v.to_string()
        }
        CartierOp::Homotopy => {
            let t = homotopy_mod_v(&module(&a.module, "module")?, a.dmax)?;
            match a.format.unwrap_or(Format::Csv) {
                Format::Csv => t.to_csv(),
                Format::Json => t.to_json().to_string(),
            }
        }
        CartierOp::Catalog => {
            let entries = catalog(a.p.unwrap_or(2), a.prec)?;
            let list: Vec<Value> = entries
                .iter()
                .map(|e| json!({ "name": e.name, "complete": e.complete, "module": e.module.to_json() }))
                .collect();
            Value::Array(list).to_string()
        }
    };
    Ok(Output::ok(text, &a.out))
}

fn drw(a: &DrwArgs) -> CliResult<Output> {
    let c = build_drw(&DRWConfig::new(a.p, a.wittlen, a.vars, a.degcap))?;
    let text = match a.quotient {
        Some(i) => {
            let q = v_dv_quotient(&c.v_complex(a.wittlen), i, a.r)?;
            json!({
                "witt_length": a.wittlen,
                "degree": i,
                "r": a.r,
                "h0": q.h0.invariants().to_string(),
                "h1": q.h1.invariants().to_string(),
                "h2": q.h2.invariants().to_string(),
            })
            .to_string()
        }
        None => match a.format {
            Format::Csv => c.csv_rows(),
            Format::Json => c.to_json().to_string(),
        },
    };
    Ok(Output::ok(text, &a.out))
}

fn verify(a: &VerifyArgs, cache_dir: PathBuf) -> CliResult<Output> {
    let ctx = Context {
        primes: a.p.clone(),
        seed: a.seed,
        cache_dir,
        timings: !a.no_timings,
    };
    let report = run_suite(a.suite, &ctx);
    let text = serde_json::to_string_pretty(&report.to_json()).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Output {
        text,
        out: a.out.clone(),
        code: if report.passed() { 0 } else { EXIT_FAILURE },
    })
}
